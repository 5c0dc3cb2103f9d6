//! Periodic components, first-return maps and their periods.

use std::collections::HashMap;

use num_integer::gcd;
use serde::Serialize;
use thiserror::Error;

use crate::billiard::{BilliardError, Dir, WedgeSystem};
use crate::field::QS3;
use crate::geometry::{AffMap, GeometryError, Point, Region, Relation};

pub const DEFAULT_COMPONENT_CAP: u64 = 1_000_000;
pub const DEFAULT_RETURN_CAP: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("iteration cap of {cap} exceeded")]
    Inconclusive { cap: u64 },
    #[error("orbit hit a piece boundary at step {step}")]
    Boundary { step: u64, source: BilliardError },
    #[error("start point is not in any recurrent region")]
    NotPeriodic,
    #[error("an image straddles the target region after {time} steps")]
    NiceReturnViolated { time: u64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Billiard(#[from] BilliardError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type DResult<T> = Result<T, DynamicsError>;

/// A periodic component of T′: an open convex polygon mapped onto itself by
/// `T′^per_tprime` as a rotation by `30·rotation_l` degrees about `center`.
#[derive(Debug, Clone, Serialize)]
pub struct Component {
    pub region: Region,
    pub per_tprime: u64,
    pub rotation_l: u32,
    pub center: Point,
    /// Piece symbols along one cycle, starting at `region`.
    pub code: Vec<u8>,
}

impl Component {
    pub fn code_sum(&self) -> u64 {
        self.code.iter().map(|&s| s as u64).sum()
    }

    pub fn periods(&self) -> ComponentPeriods {
        component_periods(self)
    }

    /// The regions `T′^k(region)` for `k < per_tprime`.
    pub fn tube(&self, w: &WedgeSystem) -> Vec<Region> {
        let mut out = Vec::with_capacity(self.per_tprime as usize);
        let mut cur = self.region.clone();
        for &j in &self.code {
            let next = cur.map(&w.piece_maps[j as usize]).expect("isometry");
            out.push(cur);
            cur = next;
        }
        out
    }
}

/// Periods of the points of a component under T′ and under T.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComponentPeriods {
    pub center_tprime: u64,
    pub generic_tprime: u64,
    pub center_t: u64,
    pub generic_t: u64,
}

/// T-period of a periodic point with T′-period `m` and code sum `k` over
/// that period.
pub fn t_period(m: u64, code_sum: u64) -> u64 {
    m * 12 / gcd(code_sum, 12)
}

pub fn component_periods(c: &Component) -> ComponentPeriods {
    let l = c.rotation_l as u64;
    let repeat = if l == 0 { 1 } else { 12 / gcd(l, 12) };
    let k = c.code_sum();
    ComponentPeriods {
        center_tprime: c.per_tprime,
        generic_tprime: c.per_tprime * repeat,
        center_t: t_period(c.per_tprime, k),
        generic_t: t_period(c.per_tprime * repeat, k * repeat),
    }
}

/// The periodic component containing `p`.
pub fn find_periodic_component(w: &WedgeSystem, p: &Point, max_iter: u64) -> DResult<Component> {
    let mut u = w.wedge.clone();
    let mut q = p.clone();
    let mut seen: HashMap<Region, usize> = HashMap::new();
    let mut history: Vec<(Region, u8)> = Vec::new();
    let mut step = 0u64;
    let cycle_start = loop {
        if step >= max_iter {
            return Err(DynamicsError::Inconclusive { cap: max_iter });
        }
        let j = w.piece_of(&q).map_err(|source| DynamicsError::Boundary { step, source })?;
        let piece = u
            .intersect_convex(&w.alpha[j])
            .into_iter()
            .find(|r| r.contains(&q))
            .ok_or(DynamicsError::Boundary { step, source: BilliardError::Grane { index: j } })?;
        let f = &w.piece_maps[j];
        let next = piece.map(f)?;
        q = f.apply(&q);
        step += 1;
        seen.insert(u, history.len());
        history.push((piece, j as u8));
        if let Some(&s) = seen.get(&next) {
            break s;
        }
        u = next;
    };
    let cycle = &history[cycle_start..];
    let len = cycle.len();
    // The cycle regions are preserved whole; the start point lies in one.
    let k = (0..len).find(|&k| cycle[k].0.contains(p)).ok_or(DynamicsError::NotPeriodic)?;
    let code: Vec<u8> = (0..len).map(|i| cycle[(k + i) % len].1).collect();
    let region = cycle[k].0.clone();
    let total = code.iter().fold(AffMap::identity(), |acc, &j| w.piece_maps[j as usize].compose(&acc));
    let rotation_l = total
        .rotation_steps()
        .ok_or_else(|| DynamicsError::Invariant("return map is not a rotation".into()))?;
    if region.map(&total)? != region {
        return Err(DynamicsError::Invariant("component is not mapped onto itself".into()));
    }
    let center = if rotation_l == 0 { region.centroid()? } else { total.fixed_point()? };
    Ok(Component { region, per_tprime: len as u64, rotation_l, center, code })
}

/// One piece of a first-return map: `map(source) = target` after
/// `return_time` steps of T′ along the symbols `code`.
#[derive(Debug, Clone, Serialize)]
pub struct ReturnPiece {
    pub source: Region,
    pub target: Region,
    pub map: AffMap,
    pub return_time: u64,
    pub code: Vec<u8>,
}

impl ReturnPiece {
    /// The regions `T′^j(source)` for `j < return_time`.
    pub fn tube(&self, w: &WedgeSystem) -> Vec<Region> {
        let mut out = Vec::with_capacity(self.code.len());
        let mut cur = self.source.clone();
        for &j in &self.code {
            let next = cur.map(&w.piece_maps[j as usize]).expect("isometry");
            out.push(cur);
            cur = next;
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReturnSystem {
    pub domain: Region,
    pub pieces: Vec<ReturnPiece>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PieceShape {
    pub vertices: usize,
    pub convex: bool,
    pub equilateral: bool,
}

pub fn shape_of(r: &Region) -> PieceShape {
    let lens: Vec<QS3> = r.edges().map(|(a, b)| (b - a).norm2()).collect();
    PieceShape { vertices: r.vertices().len(), convex: r.is_convex(), equilateral: lens.windows(2).all(|p| p[0] == p[1]) }
}

impl ReturnSystem {
    pub fn return_times(&self) -> Vec<u64> {
        let mut t: Vec<u64> = self.pieces.iter().map(|p| p.return_time).collect();
        t.sort_unstable();
        t
    }

    pub fn shapes(&self) -> Vec<PieceShape> {
        self.pieces.iter().map(|p| shape_of(&p.source)).collect()
    }

    /// First-return image of an interior point, `None` on a piece boundary.
    pub fn apply(&self, p: &Point) -> Option<Point> {
        self.pieces.iter().find(|piece| piece.source.contains(p)).map(|piece| piece.map.apply(p))
    }

    pub fn piece_index(&self, p: &Point) -> Option<usize> {
        self.pieces.iter().position(|piece| piece.source.contains(p))
    }

    pub fn map_by(&self, f: &AffMap) -> DResult<ReturnSystem> {
        let finv = f.inverse()?;
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                Ok(ReturnPiece {
                    source: p.source.map(f)?,
                    target: p.target.map(f)?,
                    map: f.compose(&p.map).compose(&finv),
                    return_time: p.return_time,
                    code: p.code.clone(),
                })
            })
            .collect::<DResult<Vec<_>>>()?;
        Ok(ReturnSystem { domain: self.domain.map(f)?, pieces })
    }
}

/// The first-return map of T′ to `domain`.
pub fn first_return_map(w: &WedgeSystem, domain: &Region, max_events: u64) -> DResult<ReturnSystem> {
    struct Pending {
        region: Region,
        map: AffMap,
        code: Vec<u8>,
    }
    let mut pending = vec![Pending { region: domain.clone(), map: AffMap::identity(), code: vec![] }];
    let mut pieces = Vec::new();
    let mut events = 0u64;
    let mut time = 0u64;
    while !pending.is_empty() {
        time += 1;
        let mut next = Vec::new();
        for item in pending {
            for (j, piece) in w.split_by_pieces(&item.region) {
                events += 1;
                if events > max_events {
                    return Err(DynamicsError::Inconclusive { cap: max_events });
                }
                let f = &w.piece_maps[j];
                let image = piece.map(f)?;
                let map = f.compose(&item.map);
                let mut code = item.code.clone();
                code.push(j as u8);
                match image.relation(domain) {
                    Relation::Inside => {
                        let source = image.map(&map.inverse()?)?;
                        pieces.push(ReturnPiece { source, target: image, map, return_time: time, code });
                    }
                    Relation::Disjoint => next.push(Pending { region: image, map, code }),
                    Relation::Straddle => return Err(DynamicsError::NiceReturnViolated { time }),
                }
            }
        }
        pending = next;
    }
    pieces.sort_by(|a, b| (a.return_time, a.source.vertices()).cmp(&(b.return_time, b.source.vertices())));
    Ok(ReturnSystem { domain: domain.clone(), pieces })
}

/// Replays every piece step by step: the piece is never cut, intermediate
/// images avoid the domain, and the last image is the target.
pub fn verify_return_system(w: &WedgeSystem, rs: &ReturnSystem) -> DResult<()> {
    let domain_area = rs.domain.area()?;
    let sources: QS3 = rs.pieces.iter().map(|p| p.source.area().expect("bounded")).sum();
    let targets: QS3 = rs.pieces.iter().map(|p| p.target.area().expect("bounded")).sum();
    if sources != domain_area || targets != domain_area {
        return Err(DynamicsError::Invariant("return pieces do not tile the domain".into()));
    }
    for (i, p) in rs.pieces.iter().enumerate() {
        let mut cur = p.source.clone();
        for (k, &sym) in p.code.iter().enumerate() {
            let (next, j) = w.step_region(&cur, Dir::Forward)?;
            if j != sym as usize {
                return Err(DynamicsError::Invariant(format!("piece {i} left its code at step {k}")));
            }
            let last = k + 1 == p.code.len();
            let rel = next.relation(&rs.domain);
            if (last && rel != Relation::Inside) || (!last && rel != Relation::Disjoint) {
                return Err(DynamicsError::Invariant(format!("piece {i} returns early or late at step {k}")));
            }
            cur = next;
        }
        if cur != p.target || p.source.map(&p.map)? != p.target {
            return Err(DynamicsError::Invariant(format!("piece {i} misses its target")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t_period_formula() {
        assert_eq!(t_period(1, 1), 12);
        assert_eq!(t_period(1, 4), 3);
        assert_eq!(t_period(2, 12), 2);
        assert_eq!(t_period(3, 6), 6);
    }

    #[test]
    fn fixed_points_give_base_components() {
        let w = WedgeSystem::new();
        let mut sizes = Vec::new();
        for k in 1..=4 {
            let c = find_periodic_component(&w, &w.o[k], DEFAULT_COMPONENT_CAP).unwrap();
            assert_eq!(c.per_tprime, 1);
            assert_eq!(c.center, w.o[k]);
            sizes.push(c.region.vertices().len());
        }
        assert_eq!(sizes, vec![12, 6, 8, 12]);
    }

    #[test]
    fn zero_rotation_gives_uniform_period() {
        let w = WedgeSystem::new();
        let c = find_periodic_component(&w, &w.o[1], DEFAULT_COMPONENT_CAP).unwrap();
        let flat = Component { rotation_l: 0, ..c.clone() };
        let p = flat.periods();
        assert_eq!(p.center_tprime, p.generic_tprime);
        assert_eq!(c.rotation_l, 5);
        assert_eq!(c.periods().generic_tprime, 12);
    }
}
