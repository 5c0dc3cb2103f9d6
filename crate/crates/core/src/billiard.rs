//! The regular 12-gon table, the outer billiard map, the wedge and its induced
//! piecewise isometry.

use serde::Serialize;
use thiserror::Error;

use crate::field::QS3;
use crate::geometry::{AffMap, GeometryError, Line, Location, Point, Region};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BilliardError {
    /// The orbit reached a boundary where the map is undefined.
    #[error("point lies on the boundary of piece {index}")]
    Grane { index: usize },
    #[error("point lies in the closed table")]
    InsideTable,
    #[error("point lies outside the wedge")]
    OutsideWedge,
    #[error("no return within {cap} iterations")]
    CapExceeded { cap: u64 },
    #[error("region is not contained in a single piece")]
    RegionSplit,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type BResult<T> = Result<T, BilliardError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Forward,
    Backward,
}

fn idx(k: i64) -> usize {
    k.rem_euclid(12) as usize
}

/// The table γ with circumradius 2 centred at the origin, vertex `A_k` at
/// angle `30k` degrees.
#[derive(Debug, Clone)]
pub struct Table {
    pub vertices: Vec<Point>,
    pub sides: Vec<Line>,
    pub crossings: Vec<Point>,
    /// `mirrored[i][k]` is the vertex `A^i_k` of the reflected table γ^i.
    pub mirrored: Vec<Vec<Point>>,
    pub polygon: Region,
    sectors: Vec<Region>,
    back_sectors: Vec<Region>,
}

impl Table {
    pub fn new() -> Table {
        let two = QS3::int(2);
        let vertices: Vec<Point> = (0..12)
            .map(|k| {
                let (c, s) = crate::geometry::unit_30(k);
                Point::new(&c * &two, &s * &two)
            })
            .collect();
        let a = |k: i64| &vertices[idx(k)];
        let sides: Vec<Line> = (0..12).map(|i| Line::through(a(i), a(i + 1)).expect("distinct vertices")).collect();
        let crossings: Vec<Point> = (0..12)
            .map(|i| sides[idx(i - 2)].intersect(&sides[idx(i + 2)]).expect("sides are not parallel"))
            .collect();
        // Labels are transported by the table's rotation from those of γ^3.
        let mirrored: Vec<Vec<Point>> = (0..12)
            .map(|i| {
                let c2 = crossings[idx(i)].scale(&two);
                (0..12).map(|k| &c2 - a(k + i - 3)).collect()
            })
            .collect();
        let polygon = Region::polygon(vertices.clone()).expect("regular polygon");
        let sectors: Vec<Region> = (0..12)
            .map(|i| {
                let exit = a(i - 1) - a(i);
                let entry = a(i) - a(i + 1);
                Region::unbounded(vec![a(i).clone()], entry, exit).expect("sector is a convex wedge")
            })
            .collect();
        let back_sectors = (0..12)
            .map(|i| sectors[i].map(&AffMap::point_reflection(&vertices[i])).expect("invertible"))
            .collect();
        Table { vertices, sides, crossings, mirrored, polygon, sectors, back_sectors }
    }

    pub fn vertex(&self, k: i64) -> &Point {
        &self.vertices[idx(k)]
    }

    pub fn crossing(&self, i: i64) -> &Point {
        &self.crossings[idx(i)]
    }

    /// `A^i_k`.
    pub fn mirrored_vertex(&self, i: i64, k: i64) -> &Point {
        &self.mirrored[idx(i)][idx(k)]
    }

    /// The reflected table γ^i as an open region.
    pub fn mirrored_table(&self, i: i64) -> Region {
        Region::polygon(self.mirrored[idx(i)].clone()).expect("reflected polygon")
    }

    /// Sector `V_i`: points whose forward image reflects through `A_i`.
    pub fn sector(&self, i: i64) -> &Region {
        &self.sectors[idx(i)]
    }

    pub fn backward_sector(&self, i: i64) -> &Region {
        &self.back_sectors[idx(i)]
    }

    fn locate(&self, p: &Point, sectors: &[Region]) -> BResult<usize> {
        if self.polygon.classify(p) != Location::Exterior {
            return Err(BilliardError::InsideTable);
        }
        let mut boundary = None;
        for (i, s) in sectors.iter().enumerate() {
            match s.classify(p) {
                Location::Interior => return Ok(i),
                Location::Boundary => boundary = boundary.or(Some(i)),
                Location::Exterior => {}
            }
        }
        Err(BilliardError::Grane { index: boundary.expect("sectors cover the exterior") })
    }

    /// Index `i` with `p` in the open sector `V_i`.
    pub fn sector_of(&self, p: &Point) -> BResult<usize> {
        self.locate(p, &self.sectors)
    }

    /// One step of the outer billiard map or its inverse.
    pub fn billiard_step(&self, p: &Point, dir: Dir) -> BResult<Point> {
        let i = match dir {
            Dir::Forward => self.sector_of(p)?,
            Dir::Backward => self.locate(p, &self.back_sectors)?,
        };
        Ok(&self.vertices[i].scale(&QS3::int(2)) - p)
    }

    /// Image of a region lying inside one sector.
    pub fn map_region(&self, r: &Region) -> BResult<Region> {
        let probe = r.interior_point();
        let i = self.sector_of(&probe)?;
        let sector = &self.sectors[i];
        if r.vertices().iter().any(|v| sector.classify(v) == Location::Exterior) {
            return Err(BilliardError::RegionSplit);
        }
        Ok(r.map(&AffMap::point_reflection(&self.vertices[i]))?)
    }

    /// The 60-gon whose interior, minus the closed table, is the invariant
    /// ring region Z.
    pub fn z_outer(&self) -> Region {
        let vs: Vec<Point> = (0..12)
            .flat_map(|i| (2..=6).rev().map(move |k| self.mirrored_vertex(i, k).clone()))
            .collect();
        Region::polygon(vs).expect("simple 60-gon")
    }
}

impl Default for Table {
    fn default() -> Table {
        Table::new()
    }
}

/// The wedge ∠P₂P₁Q₂ with its six pieces and piece maps.
#[derive(Debug, Clone)]
pub struct WedgeSystem {
    pub table: Table,
    /// `p[k]` for `k` in `1..=5`; index 0 unused.
    pub p: Vec<Point>,
    /// `q[k]` for `k` in `2..=6`; indices 0 and 1 unused.
    pub q: Vec<Point>,
    /// Fixed points `o[k]` for `k` in `1..=5`.
    pub o: Vec<Point>,
    pub wedge: Region,
    /// `alpha[j]` for `j` in `1..=6`.
    pub alpha: Vec<Region>,
    /// Images `f_j(alpha[j])`, the pieces of the inverse map.
    pub beta: Vec<Region>,
    pub piece_maps: Vec<AffMap>,
    pub inverse_maps: Vec<AffMap>,
    /// The rocket hexagon Z′.
    pub zp: Region,
    pub z: Region,
    /// Translation taking `A_1` to `A^3_1`.
    pub h: AffMap,
}

impl WedgeSystem {
    pub fn new() -> WedgeSystem {
        WedgeSystem::from_table(Table::new())
    }

    pub fn from_table(table: Table) -> WedgeSystem {
        let a = |k: i64| table.vertex(k).clone();
        let edge = |k: i64| Line::through(&a(k + 1), &a(k)).expect("distinct");
        let ray_p = Line::through(&a(0), &a(1)).expect("distinct");
        let ray_q = Line::through(&a(1), &a(2)).expect("distinct");
        let mut p = vec![Point::origin()];
        p.extend((1..=5).map(|k| ray_p.intersect(&edge(k)).expect("not parallel")));
        let mut q = vec![Point::origin(), Point::origin()];
        q.extend((2..=6).map(|k| ray_q.intersect(&edge(k)).expect("not parallel")));
        let wedge = Region::unbounded(vec![a(1)], &a(2) - &a(1), &a(1) - &a(0)).expect("wedge");
        let mut alpha = vec![wedge.clone()];
        let mut piece_maps = vec![AffMap::identity()];
        for j in 1..=6i64 {
            let pieces = wedge.intersect_convex(table.sector(j + 1));
            assert_eq!(pieces.len(), 1, "piece {j} is connected");
            alpha.push(pieces.into_iter().next().unwrap());
            piece_maps.push(AffMap::rotation(-j).compose(&AffMap::point_reflection(&a(j + 1))));
        }
        let inverse_maps: Vec<AffMap> = piece_maps.iter().map(|f| f.inverse().expect("isometry")).collect();
        let beta: Vec<Region> = alpha.iter().zip(&piece_maps).map(|(r, f)| r.map(f).expect("isometry")).collect();
        let mut o = vec![Point::origin()];
        o.extend((1..=5).map(|k| piece_maps[k].fixed_point().expect("nontrivial rotation")));
        let mut zp_vs = vec![a(1)];
        zp_vs.extend((2..=6).map(|k| table.mirrored_vertex(3, k).clone()));
        let zp = Region::polygon(zp_vs).expect("rocket hexagon");
        let z = table.z_outer();
        let h = AffMap::translation(&(table.mirrored_vertex(3, 1) - &a(1)));
        WedgeSystem { table, p, q, o, wedge, alpha, beta, piece_maps, inverse_maps, zp, z, h }
    }

    /// Index `j` with `p` in the open piece `alpha[j]`.
    pub fn piece_of(&self, p: &Point) -> BResult<usize> {
        self.locate(p, &self.alpha)
    }

    fn locate(&self, p: &Point, pieces: &[Region]) -> BResult<usize> {
        match self.wedge.classify(p) {
            Location::Exterior => return Err(BilliardError::OutsideWedge),
            Location::Boundary => return Err(BilliardError::Grane { index: 0 }),
            Location::Interior => {}
        }
        let mut boundary = None;
        for (j, piece) in pieces.iter().enumerate().skip(1) {
            match piece.classify(p) {
                Location::Interior => return Ok(j),
                Location::Boundary => boundary = boundary.or(Some(j)),
                Location::Exterior => {}
            }
        }
        Err(BilliardError::Grane { index: boundary.expect("pieces cover the wedge") })
    }

    /// One step of T′ or its inverse, with the symbol of the piece of the
    /// preimage.
    pub fn induced_step(&self, p: &Point, dir: Dir) -> BResult<(Point, usize)> {
        match dir {
            Dir::Forward => {
                let j = self.piece_of(p)?;
                Ok((self.piece_maps[j].apply(p), j))
            }
            Dir::Backward => {
                let j = self.locate(p, &self.beta)?;
                Ok((self.inverse_maps[j].apply(p), j))
            }
        }
    }

    pub fn step(&self, p: &Point) -> BResult<Point> {
        Ok(self.induced_step(p, Dir::Forward)?.0)
    }

    /// Symbols `u′_{-n_bwd} … u′_{n_fwd - 1}`; stops at the first boundary hit.
    pub fn itinerary(&self, p: &Point, n_fwd: usize, n_bwd: usize) -> Itinerary {
        let mut back = Vec::with_capacity(n_bwd);
        let mut stop = None;
        let mut cur = p.clone();
        for k in 0..n_bwd {
            match self.induced_step(&cur, Dir::Backward) {
                Ok((prev, j)) => {
                    back.push(j as u8);
                    cur = prev;
                }
                Err(e) => {
                    stop = Some(ItineraryStop { step: -(k as i64) - 1, error: e });
                    break;
                }
            }
        }
        back.reverse();
        let start_offset = back.len();
        let mut symbols = back;
        let mut cur = p.clone();
        for k in 0..n_fwd {
            match self.induced_step(&cur, Dir::Forward) {
                Ok((next, j)) => {
                    symbols.push(j as u8);
                    cur = next;
                }
                Err(e) => {
                    stop = stop.or(Some(ItineraryStop { step: k as i64, error: e }));
                    break;
                }
            }
        }
        Itinerary { symbols, start_offset, stop, end: cur }
    }

    /// Image of a region lying inside one piece, with that piece's index.
    pub fn step_region(&self, r: &Region, dir: Dir) -> BResult<(Region, usize)> {
        let pieces = if dir == Dir::Forward { &self.alpha } else { &self.beta };
        let j = self.locate(&r.interior_point(), pieces)?;
        let piece = &pieces[j];
        if r.vertices().iter().any(|v| piece.classify(v) == Location::Exterior) {
            return Err(BilliardError::RegionSplit);
        }
        let f = if dir == Dir::Forward { &self.piece_maps[j] } else { &self.inverse_maps[j] };
        Ok((r.map(f)?, j))
    }

    /// Open pieces of `r` cut by the piece boundaries, with their indices.
    pub fn split_by_pieces(&self, r: &Region) -> Vec<(usize, Region)> {
        (1..=6)
            .flat_map(|j| r.intersect_convex(&self.alpha[j]).into_iter().map(move |piece| (j, piece)))
            .collect()
    }

    /// First return of T′ to the piece α₆.
    pub fn t6(&self, x: &Point, cap: u64) -> BResult<(Point, u64)> {
        let mut cur = self.step(x)?;
        for n in 1..=cap {
            if self.alpha[6].contains(&cur) {
                return Ok((cur, n));
            }
            cur = self.step(&cur)?;
        }
        Err(BilliardError::CapExceeded { cap })
    }

    /// Exact T′-period of `p` if it is at most `cap`.
    pub fn period(&self, p: &Point, cap: u64) -> BResult<Option<u64>> {
        let mut cur = p.clone();
        for n in 1..=cap {
            cur = self.step(&cur)?;
            if &cur == p {
                return Ok(Some(n));
            }
        }
        Ok(None)
    }

    /// Every vertex `A_i`, `P_k`, `Q_k`, `O_k`, `C_i` as labelled points.
    pub fn named_points(&self) -> Vec<NamedPoint> {
        let t = &self.table;
        let mut out = Vec::new();
        let mut push = |name: String, p: &Point| out.push(NamedPoint { name, point: p.clone() });
        for k in 0..12 {
            push(format!("A{k}"), t.vertex(k));
        }
        for i in 0..12 {
            push(format!("C{i}"), t.crossing(i));
        }
        for k in 1..=5 {
            push(format!("P{k}"), &self.p[k]);
        }
        for k in 2..=6 {
            push(format!("Q{k}"), &self.q[k]);
        }
        for k in 1..=5 {
            push(format!("O{k}"), &self.o[k]);
        }
        for i in 0..12 {
            for k in 0..12 {
                push(format!("A^{i}_{k}"), t.mirrored_vertex(i, k));
            }
        }
        out
    }
}

impl Default for WedgeSystem {
    fn default() -> WedgeSystem {
        WedgeSystem::new()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct NamedPoint {
    pub name: String,
    pub point: Point,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItineraryStop {
    /// Index of the step that failed: negative for backward steps.
    pub step: i64,
    pub error: BilliardError,
}

#[derive(Debug, Clone)]
pub struct Itinerary {
    pub symbols: Vec<u8>,
    /// Position of the symbol for time 0.
    pub start_offset: usize,
    pub stop: Option<ItineraryStop>,
    /// Last point reached going forward.
    pub end: Point,
}

impl Itinerary {
    pub fn forward(&self) -> &[u8] {
        &self.symbols[self.start_offset..]
    }

    pub fn backward(&self) -> &[u8] {
        &self.symbols[..self.start_offset]
    }

    pub fn code_string(&self) -> String {
        self.symbols.iter().map(|s| char::from(b'0' + s)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QS3 {
        s.parse().unwrap()
    }

    #[test]
    fn vertex_coordinates() {
        let t = Table::new();
        assert_eq!(t.vertex(0), &Point::from_ints(2, 0));
        assert_eq!(t.vertex(1), &Point::new(QS3::sqrt3(), QS3::one()));
        assert_eq!(t.vertex(3), &Point::from_ints(0, 2));
        let side = (t.vertex(1) - t.vertex(0)).norm2();
        for k in 0..12 {
            assert_eq!((t.vertex(k + 1) - t.vertex(k)).norm2(), side);
        }
    }

    #[test]
    fn billiard_step_example() {
        let t = Table::new();
        // (2√3, 0) sits in V_2 under the sector orientation fixed by the mirrored tables.
        let p = Point::new(q("0+2*s3"), QS3::zero());
        assert_eq!(t.sector_of(&p).unwrap(), 2);
        let inside_v1 = &(&(t.vertex(0) - t.vertex(1)) + &(t.vertex(1) - t.vertex(2))) + t.vertex(1);
        assert_eq!(t.sector_of(&inside_v1).unwrap(), 1);
        let image = t.billiard_step(&inside_v1, Dir::Forward).unwrap();
        assert_eq!(image, &t.vertex(1).scale(&QS3::int(2)) - &inside_v1);
        assert_eq!(t.billiard_step(&image, Dir::Backward).unwrap(), inside_v1);
    }

    #[test]
    fn mirrored_tables_cycle() {
        let t = Table::new();
        for i in 0..12 {
            assert_eq!(t.map_region(&t.mirrored_table(i)).unwrap(), t.mirrored_table(i + 5));
            assert_eq!(t.mirrored_vertex(i, 1), t.mirrored_vertex(i + 1, 6));
        }
    }

    #[test]
    fn boundary_and_table_points_are_rejected() {
        let t = Table::new();
        assert_eq!(t.billiard_step(&Point::origin(), Dir::Forward), Err(BilliardError::InsideTable));
        assert_eq!(t.billiard_step(t.vertex(3), Dir::Forward), Err(BilliardError::InsideTable));
        // On the extension of a side beyond a vertex.
        let p = &t.vertex(1).scale(&QS3::int(2)) - t.vertex(2);
        assert!(matches!(t.billiard_step(&p, Dir::Forward), Err(BilliardError::Grane { .. })));
    }

    #[test]
    fn wedge_pieces() {
        let w = WedgeSystem::new();
        assert!(w.alpha[1..=4].iter().all(Region::is_bounded));
        assert!(!w.alpha[5].is_bounded() && !w.alpha[6].is_bounded());
        assert_eq!(w.alpha[6], w.wedge.map(&w.h).unwrap());
        assert_eq!(w.piece_maps[6], AffMap::translation(&w.table.vertex(1).scale(&QS3::int(2))));
        for j in 1..=5 {
            assert_eq!(w.piece_maps[j].rotation_steps(), Some(6 - j as u32));
        }
    }

    #[test]
    fn fixed_points_have_constant_codes() {
        let w = WedgeSystem::new();
        for k in 1..=5 {
            let it = w.itinerary(&w.o[k], 5, 0);
            assert!(it.stop.is_none());
            assert_eq!(it.forward(), &[k as u8; 5]);
        }
    }
}
