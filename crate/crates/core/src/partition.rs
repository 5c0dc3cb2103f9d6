//! Tiling of Z′ by return tubes and periodic tubes, and the red/green
//! measure bookkeeping over refinement levels.

use std::collections::HashMap;

use serde::Serialize;

use crate::billiard::WedgeSystem;
use crate::dynamics::{find_periodic_component, Component, DResult, DynamicsError, ReturnSystem};
use crate::field::QS3;
use crate::geometry::{AffMap, Line, Location, Point, Region};

/// A tile with a float bounding box for quick rejection.
#[derive(Debug, Clone)]
struct Tile {
    region: Region,
    bbox: [f64; 4],
}

impl Tile {
    fn new(region: Region) -> Tile {
        let (lo, hi) = region.bounding_box();
        let (x0, y0) = lo.to_f64();
        let (x1, y1) = hi.to_f64();
        Tile { region, bbox: [x0 - 1e-9, y0 - 1e-9, x1 + 1e-9, y1 + 1e-9] }
    }

    fn may_contain(&self, p: (f64, f64)) -> bool {
        p.0 >= self.bbox[0] && p.0 <= self.bbox[2] && p.1 >= self.bbox[1] && p.1 <= self.bbox[3]
    }
}

/// Directed boundary segment on a canonical line, parametrized along the
/// line; `positive` says whether the owning tile lies on the side the
/// normal points to.
struct Segment {
    lo: QS3,
    hi: QS3,
    positive: bool,
}

fn push_edges(region: &Region, reversed: bool, lines: &mut HashMap<Line, Vec<Segment>>) {
    for (a, b) in region.edges() {
        let line = Line::through(a, b).expect("distinct vertices");
        let along = line.normal().perp();
        let d = b - a;
        let positive = (d.perp().dot(line.normal()).is_positive()) != reversed;
        let (ta, tb) = (along.dot(a), along.dot(b));
        let (lo, hi) = if ta < tb { (ta, tb) } else { (tb, ta) };
        lines.entry(line).or_default().push(Segment { lo, hi, positive });
    }
}

/// An interval of some tile edge where coverage on the two sides differs.
#[derive(Debug, Clone)]
struct Imbalance {
    midpoint: Point,
    /// Unit-free normal pointing to the less covered side.
    toward: Point,
}

fn imbalances(domain: &Region, tiles: &[Tile]) -> Vec<Imbalance> {
    let mut lines: HashMap<Line, Vec<Segment>> = HashMap::new();
    push_edges(domain, true, &mut lines);
    for t in tiles {
        push_edges(&t.region, false, &mut lines);
    }
    let mut out = Vec::new();
    let mut keys: Vec<&Line> = lines.keys().collect();
    keys.sort_by(|a, b| (a.normal(), a.offset()).cmp(&(b.normal(), b.offset())));
    for line in keys {
        let segs = &lines[line];
        let mut cuts: Vec<&QS3> = segs.iter().flat_map(|s| [&s.lo, &s.hi]).collect();
        cuts.sort();
        cuts.dedup();
        let along = line.normal().perp();
        let n2 = line.normal().norm2();
        for pair in cuts.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (mut pos, mut neg) = (0i32, 0i32);
            for s in segs {
                if &s.lo <= a && b <= &s.hi {
                    if s.positive {
                        pos += 1;
                    } else {
                        neg += 1;
                    }
                }
            }
            if pos == neg {
                continue;
            }
            let t = (a + b).scale(&crate::field::Rat::new(1, 2));
            // Foot point: normal·p = offset and along·p = t.
            let foot = line.normal().scale(&line.offset().checked_div(&n2).expect("nonzero"))
                + along.scale(&t.checked_div(&n2).expect("nonzero"));
            let toward = if pos < neg { line.normal().clone() } else { -line.normal() };
            out.push(Imbalance { midpoint: foot, toward });
        }
    }
    out
}

fn times(x: &QS3, n: u64) -> QS3 {
    x * &QS3::int(n as i64)
}

fn covered(tiles: &[Tile], p: &Point) -> bool {
    let pf = p.to_f64();
    tiles.iter().any(|t| t.may_contain(pf) && t.region.classify(p) != Location::Exterior)
}

/// Result of tiling a domain by tubes.
#[derive(Debug, Clone, Serialize)]
pub struct PartitionReport {
    pub domain: Region,
    pub domain_area: QS3,
    pub return_pieces: usize,
    pub return_tube_area: QS3,
    pub components: Vec<Component>,
    /// T′-periods of the complementary components, in discovery order.
    pub periods: Vec<u64>,
    pub component_tube_area: QS3,
    pub area_identity: bool,
}

impl PartitionReport {
    pub fn n(&self) -> usize {
        self.components.len()
    }

    pub fn sorted_periods(&self) -> Vec<u64> {
        let mut p = self.periods.clone();
        p.sort_unstable();
        p
    }
}

/// Covers `domain` by the tubes of `rs` and fills every remaining hole with
/// the tube of a periodic component found by the component search.
pub fn verify_partition(w: &WedgeSystem, domain: &Region, rs: &ReturnSystem, max_iter: u64) -> DResult<PartitionReport> {
    let mut tiles: Vec<Tile> = rs.pieces.iter().flat_map(|p| p.tube(w)).map(Tile::new).collect();
    let mut components: Vec<Component> = Vec::new();
    loop {
        let holes = imbalances(domain, &tiles);
        if holes.is_empty() {
            break;
        }
        let mut found = None;
        for hole in &holes {
            if let Some(c) = seed_component(w, domain, &tiles, hole, max_iter)? {
                found = Some(c);
                break;
            }
        }
        let c = found.ok_or_else(|| DynamicsError::Invariant("coverage imbalance without a fillable hole".into()))?;
        if components.iter().any(|k| k.tube(w).contains(&c.region)) {
            return Err(DynamicsError::Invariant("component discovered twice".into()));
        }
        tiles.extend(c.tube(w).into_iter().map(Tile::new));
        components.push(c);
    }
    let domain_area = domain.area()?;
    let return_tube_area: QS3 = rs.pieces.iter().map(|p| times(&p.source.area().expect("bounded"), p.return_time)).sum();
    let component_tube_area: QS3 =
        components.iter().map(|c| times(&c.region.area().expect("bounded"), c.per_tprime)).sum();
    let area_identity = &return_tube_area + &component_tube_area == domain_area;
    let periods = components.iter().map(|c| c.per_tprime).collect();
    Ok(PartitionReport {
        domain: domain.clone(),
        domain_area,
        return_pieces: rs.pieces.len(),
        return_tube_area,
        components,
        periods,
        component_tube_area,
        area_identity,
    })
}

fn seed_component(
    w: &WedgeSystem,
    domain: &Region,
    tiles: &[Tile],
    hole: &Imbalance,
    max_iter: u64,
) -> DResult<Option<Component>> {
    let mut delta = QS3::rat(1, 64);
    let half = QS3::rat(1, 2);
    for _ in 0..48 {
        let seed = &hole.midpoint + &hole.toward.scale(&delta);
        delta = &delta * &half;
        if !domain.contains(&seed) {
            continue;
        }
        if covered(tiles, &seed) {
            // The less covered side holds a tile: an overlap, not a hole.
            if delta < QS3::rat(1, 1 << 20) {
                return Err(DynamicsError::Invariant("overlapping tiles".into()));
            }
            continue;
        }
        match find_periodic_component(w, &seed, max_iter) {
            Ok(c) => return Ok(Some(c)),
            Err(DynamicsError::Boundary { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Per-level red/green figures.
#[derive(Debug, Clone, Serialize)]
pub struct RedLevel {
    pub level: usize,
    /// Minimum over green pieces of the share turned red within two more
    /// levels.
    pub min_red_fraction: QS3,
    /// Red share of Z′ after this level's partition.
    pub total_red_fraction: QS3,
}

#[derive(Debug, Clone, Serialize)]
pub struct RedReport {
    pub ratio: QS3,
    pub piece_areas: Vec<QS3>,
    /// Red area inside each coarse piece after one refinement.
    pub red_inside: Vec<QS3>,
    /// `counts[i][m]`: fine green tiles of type `m` inside coarse piece `i`.
    pub counts: Vec<Vec<u64>>,
    pub levels: Vec<RedLevel>,
}

/// Red/green bookkeeping from two consecutive partitions whose return
/// pieces correspond under `similarity`.
pub fn red_fraction_check(
    w: &WedgeSystem,
    coarse_rs: &ReturnSystem,
    coarse: &PartitionReport,
    fine_rs: &ReturnSystem,
    fine: &PartitionReport,
    similarity: &AffMap,
    levels: usize,
) -> DResult<RedReport> {
    let k = coarse_rs.pieces.len();
    if fine_rs.pieces.len() != k {
        return Err(DynamicsError::Invariant("refinement changes the piece count".into()));
    }
    let ratio2 = similarity.det();
    let zp_area = coarse.domain_area.clone();
    let coarse_tiles: Vec<Tile> = coarse_rs.pieces.iter().map(|p| Tile::new(p.source.clone())).collect();
    let piece_areas: Vec<QS3> = coarse_rs.pieces.iter().map(|p| p.source.area().expect("bounded")).collect();
    // Fine pieces reordered so that fine piece m is the image of coarse piece m.
    let mut fine_pieces = Vec::with_capacity(k);
    for p in &coarse_rs.pieces {
        let image = p.source.map(similarity)?;
        let q = fine_rs
            .pieces
            .iter()
            .find(|q| q.source == image)
            .ok_or_else(|| DynamicsError::Invariant("fine pieces are not images of coarse pieces".into()))?;
        fine_pieces.push(q);
    }
    let mut red_inside = vec![QS3::zero(); k];
    let mut green_inside = vec![QS3::zero(); k];
    let mut counts = vec![vec![0u64; k]; k];
    let locate = |r: &Region| -> Option<usize> {
        let p = r.interior_point();
        let pf = p.to_f64();
        coarse_tiles.iter().position(|t| t.may_contain(pf) && t.region.contains(&p))
    };
    for (m, piece) in fine_pieces.iter().enumerate() {
        for tile in piece.tube(w) {
            if let Some(i) = locate(&tile) {
                if !tile.is_inside(&coarse_rs.pieces[i].source) {
                    return Err(DynamicsError::Invariant("fine tile crosses a coarse piece".into()));
                }
                counts[i][m] += 1;
                green_inside[i] += &tile.area()?;
            }
        }
    }
    for c in &fine.components {
        for tile in c.tube(w) {
            if let Some(i) = locate(&tile) {
                if !tile.is_inside(&coarse_rs.pieces[i].source) {
                    return Err(DynamicsError::Invariant("fine tile crosses a coarse piece".into()));
                }
                red_inside[i] += &tile.area()?;
            }
        }
    }
    for i in 0..k {
        if &red_inside[i] + &green_inside[i] != piece_areas[i] {
            return Err(DynamicsError::Invariant(format!("fine tiles do not fill coarse piece {i}")));
        }
    }
    // Return times of the fine system are the visit counts weighted by the
    // coarse return times.
    for m in 0..k {
        let t: u64 = (0..k).map(|i| counts[i][m] * coarse_rs.pieces[i].return_time).sum();
        if t != fine_pieces[m].return_time {
            return Err(DynamicsError::Invariant(format!("visit counts disagree with return time of piece {m}")));
        }
    }

    // Red share of piece i after two refinements; the same at every level
    // since the levels are conjugate.
    let eps = (0..k)
        .map(|i| {
            let deeper: QS3 = (0..k).map(|m| times(&red_inside[m], counts[i][m])).sum();
            (&red_inside[i] + &(&deeper * &ratio2)).checked_div(&piece_areas[i]).expect("positive area")
        })
        .min()
        .expect("pieces");

    let mut out = Vec::new();
    let mut visits: Vec<u64> = coarse_rs.pieces.iter().map(|p| p.return_time).collect();
    let mut scale = QS3::one();
    for level in 0..levels {
        let green: QS3 = (0..k).map(|m| &times(&piece_areas[m], visits[m]) * &scale).sum();
        let total = (&zp_area - &green).checked_div(&zp_area).expect("positive area");
        if level == 1 && green != fine.return_tube_area {
            return Err(DynamicsError::Invariant("recursion disagrees with the fine partition".into()));
        }
        out.push(RedLevel { level, min_red_fraction: eps.clone(), total_red_fraction: total });
        visits = (0..k).map(|m| (0..k).map(|i| visits[i] * counts[i][m]).sum()).collect();
        scale = &scale * &ratio2;
    }
    Ok(RedReport { ratio: ratio2, piece_areas, red_inside, counts, levels: out })
}
