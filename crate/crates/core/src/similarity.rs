//! Renormalization: the contractions Γ₁, Γ₄ and Γ_X, the rockets they
//! produce, conjugacy of first-return maps, and the aperiodic witness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::billiard::{BilliardError, Dir, WedgeSystem};
use crate::dynamics::{find_periodic_component, Component, DynamicsError, ReturnSystem};
use crate::field::QS3;
use crate::geometry::{AffMap, GeometryError, Point, Region};
use crate::sampling::random_interior_point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimilarityError {
    #[error("backward iterate splits the rocket")]
    RocketSplit,
    #[error("map is not a strict contraction")]
    NotContraction,
    #[error("points are not collinear with the homothety centre")]
    NotCollinear,
    #[error("point returns to itself after {steps} steps")]
    Periodic { steps: u64 },
    #[error("nesting fails: {0}")]
    Nesting(String),
    #[error("conjugacy fails: {0}")]
    Conjugacy(String),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Billiard(#[from] BilliardError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub type SResult<T> = Result<T, SimilarityError>;

/// Homothety centred at `center` sending `from` to `to`.
pub fn homothety_through(center: &Point, from: &Point, to: &Point) -> SResult<AffMap> {
    let u = from - center;
    let v = to - center;
    if !u.cross(&v).is_zero() || u.is_zero() {
        return Err(SimilarityError::NotCollinear);
    }
    let ratio = if !u.x.is_zero() { v.x.checked_div(&u.x) } else { v.y.checked_div(&u.y) }.map_err(GeometryError::from)?;
    Ok(AffMap::homothety(center, &ratio))
}

/// Squared similarity ratio when the linear part is a scaled rotation.
pub fn similarity_ratio2(f: &AffMap) -> Option<QS3> {
    let rotation_like = f.m00 == f.m11 && f.m01 == -&f.m10;
    rotation_like.then(|| f.det())
}

#[derive(Debug, Clone, Serialize)]
pub struct SimilaritySystem {
    pub gamma1: AffMap,
    pub gamma4: AffMap,
    pub ratio1: QS3,
    pub ratio4: QS3,
    pub z1: Region,
    pub z4: Region,
    pub z14: Region,
    pub x: Region,
    /// The isometry realizing `T′^{-2}` on `z14`.
    pub back2: AffMap,
    pub gamma_x: AffMap,
}

pub fn build_similarity(w: &WedgeSystem) -> SResult<SimilaritySystem> {
    let a1 = w.table.vertex(1);
    let gamma1 = homothety_through(a1, &w.o[5], &w.o[1])?;
    let gamma4 = homothety_through(a1, &w.o[5], &w.o[4])?;
    let ratio1 = gamma1.homothety_ratio().expect("homothety");
    let ratio4 = gamma4.homothety_ratio().expect("homothety");
    let z1 = w.zp.map(&gamma1)?;
    let z4 = w.zp.map(&gamma4)?;
    let z14 = z4.map(&gamma1)?;
    let mut x = z14.clone();
    let mut back2 = AffMap::identity();
    for _ in 0..2 {
        let (prev, j) = w.step_region(&x, Dir::Backward).map_err(|e| match e {
            BilliardError::RegionSplit => SimilarityError::RocketSplit,
            other => other.into(),
        })?;
        back2 = w.inverse_maps[j].compose(&back2);
        x = prev;
    }
    let gamma_x = back2.compose(&gamma1);
    if z4.map(&gamma_x)? != x {
        return Err(SimilarityError::Nesting("Γ_X does not carry Z′₄ onto X".into()));
    }
    Ok(SimilaritySystem { gamma1, gamma4, ratio1, ratio4, z1, z4, z14, x, back2, gamma_x })
}

impl SimilaritySystem {
    /// Whether `Γ_X^{k+1}(X) ⊂ Γ_X^k(X)` strictly; holds for every `k` once
    /// `X ⊂ Z′₄` strictly.
    pub fn check_nesting(&self) -> SResult<()> {
        if self.x == self.z4 || !self.x.is_inside(&self.z4) {
            return Err(SimilarityError::Nesting("X is not strictly inside Z′₄".into()));
        }
        Ok(())
    }

    /// `Γ_X^k(X)` for `k = 0..=depth`.
    pub fn nested_rockets(&self, depth: usize) -> SResult<Vec<Region>> {
        let mut out = vec![self.x.clone()];
        for _ in 0..depth {
            let next = out.last().unwrap().map(&self.gamma_x)?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Unique fixed point of a strict contraction similarity.
pub fn contraction_fixed_point(f: &AffMap) -> SResult<Point> {
    let r2 = similarity_ratio2(f).ok_or(SimilarityError::NotContraction)?;
    if !(r2.is_positive() && r2 < QS3::one()) {
        return Err(SimilarityError::NotContraction);
    }
    Ok(f.fixed_point()?)
}

/// Piece-level conjugacy: `f` carries every piece of `from` onto a piece of
/// `to`, with conjugated maps.
pub fn piece_conjugacy(from: &ReturnSystem, to: &ReturnSystem, f: &AffMap) -> SResult<()> {
    let image = from.map_by(f)?;
    if image.domain != to.domain {
        return Err(SimilarityError::Conjugacy("domains differ".into()));
    }
    if image.pieces.len() != to.pieces.len() {
        return Err(SimilarityError::Conjugacy("piece counts differ".into()));
    }
    for (i, p) in image.pieces.iter().enumerate() {
        let matched = to.pieces.iter().any(|q| q.source == p.source && q.target == p.target && q.map == p.map);
        if !matched {
            return Err(SimilarityError::Conjugacy(format!("piece {i} has no counterpart")));
        }
    }
    Ok(())
}

/// First return of `p` to `domain` by exact iteration; `None` when the
/// orbit meets a boundary first.
pub fn first_return_point(w: &WedgeSystem, domain: &Region, p: &Point, cap: u64) -> Result<Option<(Point, u64)>, SimilarityError> {
    let mut cur = p.clone();
    for n in 1..=cap {
        cur = match w.step(&cur) {
            Ok(q) => q,
            Err(BilliardError::Grane { .. }) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        match domain.classify(&cur) {
            crate::geometry::Location::Interior => return Ok(Some((cur, n))),
            crate::geometry::Location::Boundary => return Ok(None),
            crate::geometry::Location::Exterior => {}
        }
    }
    Err(DynamicsError::Inconclusive { cap }.into())
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacySample {
    pub samples: usize,
    pub defined: usize,
    pub counterexample: Option<Point>,
}

/// Sampled commuting square `f ∘ T′_from = T′_to ∘ f` by exact orbit
/// iteration on both sides.
pub fn sampled_conjugacy(
    w: &WedgeSystem,
    from: &Region,
    to: &Region,
    f: &AffMap,
    samples: usize,
    seed: u64,
    cap: u64,
) -> SResult<ConjugacySample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut defined = 0;
    for _ in 0..samples {
        let p = random_interior_point(from, &mut rng);
        let lhs = first_return_point(w, from, &p, cap)?;
        let fp = f.apply(&p);
        let rhs = first_return_point(w, to, &fp, cap)?;
        let ok = match (&lhs, &rhs) {
            (None, None) => true,
            (Some((a, _)), Some((b, _))) => {
                defined += 1;
                &f.apply(a) == b
            }
            _ => false,
        };
        if !ok {
            return Ok(ConjugacySample { samples, defined, counterexample: Some(p) });
        }
    }
    Ok(ConjugacySample { samples, defined, counterexample: None })
}

/// Period of a region under a first-return map, with the total number of
/// T′ steps; `None` if the region is cut by the pieces or not back within
/// `cap` returns.
pub fn return_period(rs: &ReturnSystem, r: &Region, cap: u64) -> Option<(u64, u64)> {
    let mut cur = r.clone();
    let mut time = 0;
    for n in 1..=cap {
        let piece = rs.pieces.iter().find(|p| cur.is_inside(&p.source))?;
        cur = cur.map(&piece.map).ok()?;
        time += piece.return_time;
        if &cur == r {
            return Some((n, time));
        }
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct SpiralEntry {
    pub index: usize,
    pub region: Region,
    /// Period under the first return to Z′₄, when the figure lies there.
    pub return_period: Option<u64>,
    pub tprime_period: u64,
    /// Whether the component search from an interior point reproduced the figure.
    pub component_confirmed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AperiodicWitness {
    pub y: Point,
    pub certificate_steps: u64,
    /// Set when the orbit met a boundary before `certificate_steps`.
    pub boundary_hit_at: Option<u64>,
    pub nested_depth: usize,
    pub spiral: Vec<SpiralEntry>,
    /// Ratios of return periods of `Y_n` and `Y_{n-3}`.
    pub growth_factors: Vec<f64>,
    /// Any period of `y` is at least `2^period_lower_bound_log2`.
    pub period_lower_bound_log2: usize,
}

/// The spiral `Y_0 = W₃`, `Y_1 = W₂`, `Y_2 = T′^{-2}(Γ₁(W₄))`,
/// `Y_n = Γ_X(Y_{n-3})`.
pub fn spiral(w: &WedgeSystem, s: &SimilaritySystem, count: usize) -> SResult<Vec<Region>> {
    let cap = crate::dynamics::DEFAULT_COMPONENT_CAP;
    let w3 = find_periodic_component(w, &w.o[3], cap)?.region;
    let w2 = find_periodic_component(w, &w.o[2], cap)?.region;
    let w4 = find_periodic_component(w, &w.o[4], cap)?.region;
    let mut y2 = w4.map(&s.gamma1)?;
    for _ in 0..2 {
        y2 = w.step_region(&y2, Dir::Backward)?.0;
    }
    let mut out = vec![w3, w2, y2];
    while out.len() < count {
        let next = out[out.len() - 3].map(&s.gamma_x)?;
        out.push(next);
    }
    out.truncate(count);
    Ok(out)
}

/// Options for [`aperiodic_witness`].
#[derive(Debug, Clone, Copy)]
pub struct WitnessOptions {
    /// Orbit length checked for a return of `y`.
    pub steps: u64,
    /// Nesting levels `Γ_X^k(X)` checked to contain `y`.
    pub depth: usize,
    /// Number of spiral figures measured.
    pub spiral_len: usize,
    /// Figures with T′-period up to this are re-derived by the component search.
    pub confirm_up_to: u64,
}

impl Default for WitnessOptions {
    fn default() -> WitnessOptions {
        WitnessOptions { steps: 10_000, depth: 8, spiral_len: 9, confirm_up_to: 2_000 }
    }
}

pub fn aperiodic_witness(
    w: &WedgeSystem,
    s: &SimilaritySystem,
    z4_returns: &ReturnSystem,
    opts: &WitnessOptions,
) -> SResult<AperiodicWitness> {
    let y = contraction_fixed_point(&s.gamma_x)?;
    if s.gamma_x.apply(&y) != y {
        return Err(SimilarityError::Nesting("fixed point residual is nonzero".into()));
    }
    s.check_nesting()?;
    let rockets = s.nested_rockets(opts.depth)?;
    for (k, r) in rockets.iter().enumerate() {
        if !r.contains(&y) {
            return Err(SimilarityError::Nesting(format!("y is not interior to Γ_X^{k}(X)")));
        }
    }
    let mut boundary_hit_at = None;
    let mut cur = y.clone();
    for n in 1..=opts.steps {
        match w.step(&cur) {
            Ok(next) => cur = next,
            Err(BilliardError::Grane { .. }) => {
                boundary_hit_at = Some(n);
                break;
            }
            Err(e) => return Err(e.into()),
        }
        if cur == y {
            return Err(SimilarityError::Periodic { steps: n });
        }
    }
    let mut spiral_entries = Vec::new();
    for (index, region) in spiral(w, s, opts.spiral_len)?.into_iter().enumerate() {
        let rp = return_period(z4_returns, &region, 1 << 24);
        let mut component_confirmed = false;
        let tprime_period = match rp {
            Some((_, time)) if time > opts.confirm_up_to => time,
            _ => {
                let c = find_periodic_component(w, &region.interior_point(), crate::dynamics::DEFAULT_COMPONENT_CAP)?;
                component_confirmed = c.region == region && rp.is_none_or(|(_, t)| t == c.per_tprime);
                c.per_tprime
            }
        };
        spiral_entries.push(SpiralEntry { index, region, return_period: rp.map(|p| p.0), tprime_period, component_confirmed });
    }
    let growth_factors = (3..spiral_entries.len())
        .filter_map(|n| match (spiral_entries[n].return_period, spiral_entries[n - 3].return_period) {
            (Some(a), Some(b)) => Some(a as f64 / b as f64),
            _ => None,
        })
        .collect();
    Ok(AperiodicWitness {
        y,
        certificate_steps: opts.steps,
        boundary_hit_at,
        nested_depth: opts.depth,
        spiral: spiral_entries,
        growth_factors,
        period_lower_bound_log2: opts.depth,
    })
}

/// Spiral figures as periodic components, via the component search on an interior
/// point of each.
pub fn spiral_components(w: &WedgeSystem, figures: &[Region], cap: u64) -> SResult<Vec<Component>> {
    figures.iter().map(|r| Ok(find_periodic_component(w, &r.interior_point(), cap)?)).collect()
}
