//! The acceptance suite: one check per criterion, shared by `dodeca verify`
//! and the integration tests.

use std::sync::OnceLock;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::billiard::{BilliardError, WedgeSystem};
use crate::dynamics::{
    find_periodic_component, first_return_map, verify_return_system, Component, DynamicsError, ReturnSystem,
    DEFAULT_COMPONENT_CAP, DEFAULT_RETURN_CAP,
};
use crate::field::{Rat, QS3};
use crate::geometry::{Line, Point, Region};
use crate::partition::{red_fraction_check, verify_partition, PartitionReport, RedReport};
use crate::periods::{cross_validate, full_period_set, t_orbit_period, PeriodError};
use crate::sampling::random_interior_point;
use crate::similarity::{
    aperiodic_witness, build_similarity, piece_conjugacy, sampled_conjugacy, SimilarityError, SimilaritySystem,
    WitnessOptions,
};

pub const EXPECTED_Z14_PERIODS: [u64; 20] = [1, 1, 18, 24, 1, 60, 54, 3, 32, 2, 756, 1008, 48, 1, 2, 3, 4, 37, 42, 85];
pub const EXPECTED_Z4_PERIODS: [u64; 7] = [1, 2, 3, 3, 4, 54, 60];
/// Minimum red share of a green piece two levels down.
pub const GOLDEN_EPSILON: &str = "-892085+515046*s3";
pub const RED_THRESHOLD: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub id: u8,
    pub name: &'static str,
    pub outcome: Outcome,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub enum Failure {
    Fail(String),
    Inconclusive(String),
}

type CResult<T> = Result<T, Failure>;

fn fail<T>(msg: impl Into<String>) -> CResult<T> {
    Err(Failure::Fail(msg.into()))
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> CResult<()> {
    if cond {
        Ok(())
    } else {
        Err(Failure::Fail(msg()))
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Failure {
        match e {
            DynamicsError::Inconclusive { .. } => Failure::Inconclusive(e.to_string()),
            e => Failure::Fail(e.to_string()),
        }
    }
}

impl From<SimilarityError> for Failure {
    fn from(e: SimilarityError) -> Failure {
        match e {
            SimilarityError::Dynamics(d) => d.into(),
            e => Failure::Fail(e.to_string()),
        }
    }
}

impl From<BilliardError> for Failure {
    fn from(e: BilliardError) -> Failure {
        match e {
            BilliardError::CapExceeded { .. } => Failure::Inconclusive(e.to_string()),
            e => Failure::Fail(e.to_string()),
        }
    }
}

impl From<PeriodError> for Failure {
    fn from(e: PeriodError) -> Failure {
        Failure::Fail(e.to_string())
    }
}

impl From<crate::geometry::GeometryError> for Failure {
    fn from(e: crate::geometry::GeometryError) -> Failure {
        Failure::Fail(e.to_string())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub seed: u64,
    /// Random cases per sampled property.
    pub samples: usize,
    /// Random wedge points tested for being fixed.
    pub fixed_point_samples: usize,
    pub component_cap: u64,
    pub return_cap: u64,
    pub period_bound: u64,
    pub witness: WitnessOptions,
    pub red_levels: usize,
}

impl Default for CheckOptions {
    fn default() -> CheckOptions {
        CheckOptions {
            seed: 12,
            samples: 1_000,
            fixed_point_samples: 10_000,
            component_cap: DEFAULT_COMPONENT_CAP,
            return_cap: DEFAULT_RETURN_CAP,
            period_bound: 2_000,
            witness: WitnessOptions::default(),
            red_levels: 4,
        }
    }
}

pub struct Returns {
    pub z1: ReturnSystem,
    pub z4: ReturnSystem,
    pub z14: ReturnSystem,
    pub x: ReturnSystem,
}

/// Shared state; expensive pieces are built on first use.
pub struct Context {
    pub w: WedgeSystem,
    pub opts: CheckOptions,
    sim: OnceLock<CResult<SimilaritySystem>>,
    returns: OnceLock<CResult<Returns>>,
    partitions: OnceLock<CResult<(PartitionReport, PartitionReport)>>,
    base: OnceLock<CResult<Vec<Component>>>,
}

fn cached<T>(cell: &OnceLock<CResult<T>>, build: impl FnOnce() -> CResult<T>) -> CResult<&T> {
    cell.get_or_init(build).as_ref().map_err(Clone::clone)
}

impl Context {
    pub fn new(opts: CheckOptions) -> Context {
        Context {
            w: WedgeSystem::new(),
            opts,
            sim: OnceLock::new(),
            returns: OnceLock::new(),
            partitions: OnceLock::new(),
            base: OnceLock::new(),
        }
    }

    pub fn similarity(&self) -> CResult<&SimilaritySystem> {
        cached(&self.sim, || Ok(build_similarity(&self.w)?))
    }

    pub fn returns(&self) -> CResult<&Returns> {
        let s = self.similarity()?;
        cached(&self.returns, || {
            let cap = self.opts.return_cap;
            Ok(Returns {
                z1: first_return_map(&self.w, &s.z1, cap)?,
                z4: first_return_map(&self.w, &s.z4, cap)?,
                z14: first_return_map(&self.w, &s.z14, cap)?,
                x: first_return_map(&self.w, &s.x, cap)?,
            })
        })
    }

    pub fn partitions(&self) -> CResult<&(PartitionReport, PartitionReport)> {
        let rs = self.returns()?;
        cached(&self.partitions, || {
            let cap = self.opts.component_cap;
            Ok((verify_partition(&self.w, &self.w.zp, &rs.z4, cap)?, verify_partition(&self.w, &self.w.zp, &rs.z14, cap)?))
        })
    }

    /// `W₁..W₄` at indices 0..4.
    pub fn base_components(&self) -> CResult<&Vec<Component>> {
        cached(&self.base, || {
            (1..=4).map(|k| Ok(find_periodic_component(&self.w, &self.w.o[k], self.opts.component_cap)?)).collect()
        })
    }
}

pub type CheckFn = fn(&Context) -> CResult<String>;

pub const CHECKS: [(u8, &str, CheckFn); 10] = [
    (1, "construction-identities", check_construction),
    (2, "fixed-points", check_fixed_points),
    (3, "base-components", check_base_components),
    (4, "first-return-structure", check_first_return),
    (5, "partition-lemma", check_partition),
    (6, "self-similarity", check_self_similarity),
    (7, "aperiodic-witness", check_aperiodic),
    (8, "full-measure", check_full_measure),
    (9, "period-set", check_period_set),
    (10, "kernel-properties", check_kernel),
];

pub fn run_check(ctx: &Context, id: u8) -> Option<CheckResult> {
    let &(id, name, f) = CHECKS.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let (outcome, detail) = match f(ctx) {
        Ok(d) => (Outcome::Pass, d),
        Err(Failure::Fail(d)) => (Outcome::Fail, d),
        Err(Failure::Inconclusive(d)) => (Outcome::Inconclusive, d),
    };
    Some(CheckResult { id, name, outcome, detail, seconds: start.elapsed().as_secs_f64() })
}

pub fn run_all(ctx: &Context) -> Vec<CheckResult> {
    CHECKS.iter().filter_map(|c| run_check(ctx, c.0)).collect()
}

fn check_construction(ctx: &Context) -> CResult<String> {
    let w = &ctx.w;
    let t = &w.table;
    ensure(w.p[1] == *t.vertex(1), || "P1 != A1".into())?;
    ensure(w.q[2] == *t.vertex(2), || "Q2 != A2".into())?;
    ensure(w.q[5] == *t.crossing(3), || "Q5 != C3".into())?;
    ensure(w.p[5] == *t.mirrored_vertex(3, 6), || "P5 != A^3_6".into())?;
    ensure(w.q[6] == *t.mirrored_vertex(3, 1), || "Q6 != A^3_1".into())?;
    ensure(t.mirrored_vertex(3, 1) == t.mirrored_vertex(4, 6), || "A^3_1 != A^4_6".into())?;
    for i in 0..12 {
        ensure(t.mirrored_vertex(i, 1) == t.mirrored_vertex(i + 1, 6), || format!("A^{i}_1 != A^{}_6", (i + 1) % 12))?;
        let image = t.map_region(&t.mirrored_table(i))?;
        ensure(image == t.mirrored_table(i + 5), || format!("T(γ^{i}) != γ^{}", (i + 5) % 12))?;
    }
    Ok("5 named identities, 12 gluing identities, 12 mirrored-table images".into())
}

fn check_fixed_points(ctx: &Context) -> CResult<String> {
    let w = &ctx.w;
    for k in 1..=5 {
        ensure(w.step(&w.o[k])? == w.o[k], || format!("O{k} is not fixed"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.opts.seed);
    let mut tested = 0;
    for _ in 0..ctx.opts.fixed_point_samples {
        let p = random_interior_point(&w.wedge, &mut rng);
        match w.step(&p) {
            Ok(q) => {
                tested += 1;
                ensure(q != p || w.o[1..=5].contains(&p), || format!("unexpected fixed point {}", p.to_literal()))?;
            }
            Err(BilliardError::Grane { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    Ok(format!("O1..O5 fixed; {tested} random wedge points moved"))
}

/// Whether the interior angle at vertex `v` has cosine `target`.
fn angle_cos_matches(r: &Region, v: usize, target: &QS3) -> bool {
    let vs = r.vertices();
    let n = vs.len();
    let a = &vs[(v + n - 1) % n] - &vs[v];
    let b = &vs[(v + 1) % n] - &vs[v];
    let d = a.dot(&b);
    d.signum() == target.signum() && d.square() == target.square() * a.norm2() * b.norm2()
}

fn equilateral(r: &Region) -> bool {
    let lens: Vec<QS3> = r.edges().map(|(a, b)| (b - a).norm2()).collect();
    lens.windows(2).all(|p| p[0] == p[1])
}

/// Every side of the convex polygon `outer` carries an edge of `inner`, and
/// `inner` lies inside.
fn inscribed(inner: &Region, outer: &[Point]) -> CResult<bool> {
    let poly = Region::polygon(outer.to_vec())?;
    let touches = (0..outer.len()).all(|i| {
        let line = Line::through(&outer[i], &outer[(i + 1) % outer.len()]).expect("distinct");
        inner.edges().any(|(a, b)| line.contains(a) && line.contains(b))
    });
    Ok(touches && inner.is_inside(&poly))
}

fn vertex_index(r: &Region, p: &Point) -> Option<usize> {
    r.vertices().iter().position(|v| v == p)
}

fn check_base_components(ctx: &Context) -> CResult<String> {
    let w = &ctx.w;
    let base = ctx.base_components()?;
    let cos_150 = QS3::new(Rat::zero(), Rat::new(-1, 2));
    let cos_90 = QS3::zero();
    let cos_120 = QS3::rat(-1, 2);
    let alternating = |r: &Region, start: usize, first: &QS3, second: &QS3| {
        let n = r.vertices().len();
        (0..n).all(|i| angle_cos_matches(r, (start + i) % n, if i % 2 == 0 { first } else { second }))
    };
    let [w1, w2, w3, w4] = [&base[0].region, &base[1].region, &base[2].region, &base[3].region];
    for (k, c) in base.iter().enumerate() {
        ensure(c.center == w.o[k + 1], || format!("W{} is not centred at O{}", k + 1, k + 1))?;
    }
    ensure(w1.vertices().len() == 12 && equilateral(w1), || "W1 is not an equilateral 12-gon".into())?;
    ensure(alternating(w1, 0, &cos_150, &cos_150), || "W1 angles are not 5π/6".into())?;
    ensure(inscribed(w1, &[w.p[2].clone(), w.p[1].clone(), w.q[2].clone()])?, || "W1 is not inscribed in P2P1Q2".into())?;

    ensure(w2.vertices().len() == 6 && equilateral(w2), || "W2 is not an equilateral hexagon".into())?;
    let at_p3 = vertex_index(w2, &w.p[3]).ok_or_else(|| Failure::Fail("P3 is not a vertex of W2".into()))?;
    let at_q2 = vertex_index(w2, &w.q[2]).ok_or_else(|| Failure::Fail("Q2 is not a vertex of W2".into()))?;
    ensure((at_p3 + 3) % 6 == at_q2, || "P3 and Q2 are not opposite in W2".into())?;
    ensure(alternating(w2, at_p3, &cos_90, &cos_150), || "W2 angles do not alternate π/2, 5π/6".into())?;
    ensure(!equilateral_angles(w2), || "W2 is regular".into())?;

    ensure(w3.vertices().len() == 8 && equilateral(w3), || "W3 is not an equilateral octagon".into())?;
    let at_q3 = vertex_index(w3, &w.q[3]).ok_or_else(|| Failure::Fail("Q3 is not a vertex of W3".into()))?;
    ensure(alternating(w3, at_q3, &cos_120, &cos_150), || "W3 angles do not alternate 2π/3, 5π/6".into())?;

    ensure(w4.vertices().len() == 12 && equilateral(w4), || "W4 is not an equilateral 12-gon".into())?;
    ensure(alternating(w4, 0, &cos_150, &cos_150), || "W4 angles are not 5π/6".into())?;
    let quad = [w.p[5].clone(), w.p[4].clone(), w.q[4].clone(), w.q[5].clone()];
    ensure(inscribed(w4, &quad)?, || "W4 is not inscribed in P5P4Q4Q5".into())?;
    Ok(format!(
        "W1..W4: {}, {}, {}, {} vertices, T′-periods {:?}",
        w1.vertices().len(),
        w2.vertices().len(),
        w3.vertices().len(),
        w4.vertices().len(),
        base.iter().map(|c| c.per_tprime).collect::<Vec<_>>()
    ))
}

fn equilateral_angles(r: &Region) -> bool {
    let first = {
        let vs = r.vertices();
        let n = vs.len();
        (&vs[n - 1] - &vs[0]).dot(&(&vs[1] - &vs[0]))
    };
    (0..r.vertices().len()).all(|i| {
        let vs = r.vertices();
        let n = vs.len();
        (&vs[(i + n - 1) % n] - &vs[i]).dot(&(&vs[(i + 1) % n] - &vs[i])) == first
    })
}

/// Triangles, quadrilaterals, hexagons with unequal sides, nonconvex pieces.
fn shape_census(rs: &ReturnSystem) -> (usize, usize, usize, usize) {
    let shapes = rs.shapes();
    let count = |f: &dyn Fn(&crate::dynamics::PieceShape) -> bool| shapes.iter().filter(|s| f(s)).count();
    (
        count(&|s| s.vertices == 3),
        count(&|s| s.vertices == 4),
        count(&|s| s.vertices == 6 && !s.equilateral),
        count(&|s| !s.convex),
    )
}

fn check_first_return(ctx: &Context) -> CResult<String> {
    let s = ctx.similarity()?;
    let rs = ctx.returns()?;
    for (name, sys) in [("Z′1", &rs.z1), ("Z′4", &rs.z4), ("Z′14", &rs.z14)] {
        verify_return_system(&ctx.w, sys).map_err(|e| Failure::Fail(format!("{name}: {e}")))?;
    }
    let c1 = shape_census(&rs.z1);
    ensure(rs.z1.pieces.len() == 10 && (c1.0, c1.1, c1.2) == (4, 5, 1), || format!("Z′1 census {c1:?}"))?;
    for (name, sys) in [("Z′4", &rs.z4), ("Z′14", &rs.z14)] {
        let c = shape_census(sys);
        ensure(sys.pieces.len() == 8 && (c.0, c.1, c.3) == (2, 6, 1), || format!("{name} census {c:?}"))?;
    }
    piece_conjugacy(&rs.z4, &rs.z14, &s.gamma1)?;
    Ok(format!(
        "Z′1 times {:?}; Z′4 times {:?}; Z′14 times {:?}; Γ1 matches all 8 pieces",
        rs.z1.return_times(),
        rs.z4.return_times(),
        rs.z14.return_times()
    ))
}

fn check_partition(ctx: &Context) -> CResult<String> {
    let (p4, p14) = ctx.partitions()?;
    ensure(p4.area_identity && p14.area_identity, || "tube areas do not sum to area(Z′)".into())?;
    ensure(p4.n() == 7, || format!("Z′4 gives n = {}", p4.n()))?;
    ensure(p14.n() == 20, || format!("Z′14 gives n = {}", p14.n()))?;
    ensure(p4.sorted_periods() == EXPECTED_Z4_PERIODS, || format!("Z′4 periods {:?}", p4.sorted_periods()))?;
    let mut expected = EXPECTED_Z14_PERIODS.to_vec();
    expected.sort_unstable();
    ensure(p14.sorted_periods() == expected, || format!("Z′14 periods {:?}", p14.sorted_periods()))?;
    Ok(format!("n = 7 with periods {:?}; n = 20 with periods {:?}; area identity exact", p4.sorted_periods(), p14.sorted_periods()))
}

fn check_self_similarity(ctx: &Context) -> CResult<String> {
    let w = &ctx.w;
    let s = ctx.similarity()?;
    let rs = ctx.returns()?;
    let a1 = w.table.vertex(1);
    ensure(s.gamma1.apply(&w.o[5]) == w.o[1] && s.gamma4.apply(&w.o[5]) == w.o[4], || "contraction centres".into())?;
    ensure((&w.o[1] - a1).norm2() == s.ratio1.square() * (&w.o[5] - a1).norm2(), || "Γ1 ratio".into())?;
    ensure((&w.o[4] - a1).norm2() == s.ratio4.square() * (&w.o[5] - a1).norm2(), || "Γ4 ratio".into())?;
    let w4 = &ctx.base_components()?[3];
    let image = w4.region.map(&s.gamma1)?;
    let c = find_periodic_component(w, &image.interior_point(), ctx.opts.component_cap)?;
    ensure(c.region == image, || "Γ1(W4) is not a component".into())?;
    ensure(c.per_tprime == 37, || format!("Γ1(W4) has T′-period {}", c.per_tprime))?;
    piece_conjugacy(&rs.z4, &rs.z14, &s.gamma1)?;
    piece_conjugacy(&rs.z4, &rs.x, &s.gamma_x)?;
    let cap = 1 << 20;
    let n = ctx.opts.samples;
    let g1 = sampled_conjugacy(w, &s.z4, &s.z14, &s.gamma1, n, ctx.opts.seed, cap)?;
    let gx = sampled_conjugacy(w, &s.z4, &s.x, &s.gamma_x, n, ctx.opts.seed + 1, cap)?;
    for (name, r) in [("Γ1", &g1), ("Γ_X", &gx)] {
        if let Some(p) = &r.counterexample {
            return fail(format!("{name} conjugacy fails at {}", p.to_literal()));
        }
    }
    Ok(format!(
        "Γ1 ratio {}, Γ4 ratio {}; Γ1(W4) period 37; piece-level conjugacy for Γ1 and Γ_X; {} + {} sampled squares",
        s.ratio1,
        s.ratio4,
        g1.samples,
        gx.samples
    ))
}

fn check_aperiodic(ctx: &Context) -> CResult<String> {
    let s = ctx.similarity()?;
    let rs = ctx.returns()?;
    let opts = ctx.opts.witness;
    let wit = aperiodic_witness(&ctx.w, s, &rs.z4, &opts)?;
    ensure(wit.boundary_hit_at.is_none(), || format!("orbit of y meets a boundary at step {:?}", wit.boundary_hit_at))?;
    ensure(wit.spiral.iter().all(|e| e.component_confirmed || e.tprime_period > opts.confirm_up_to), || {
        "a spiral figure is not a periodic component".into()
    })?;
    ensure(wit.growth_factors.iter().all(|&g| g >= 2.0), || format!("growth factors {:?}", wit.growth_factors))?;
    Ok(format!(
        "y = {}; no return in {} steps; inside Γ_X^k(X) for k ≤ {}; spiral periods {:?}",
        wit.y.to_literal(),
        wit.certificate_steps,
        wit.nested_depth,
        wit.spiral.iter().map(|e| e.tprime_period).collect::<Vec<_>>()
    ))
}

pub fn red_report(ctx: &Context) -> CResult<RedReport> {
    let s = ctx.similarity()?;
    let rs = ctx.returns()?;
    let (p4, p14) = ctx.partitions()?;
    Ok(red_fraction_check(&ctx.w, &rs.z4, p4, &rs.z14, p14, &s.gamma1, ctx.opts.red_levels)?)
}

fn check_full_measure(ctx: &Context) -> CResult<String> {
    let report = red_report(ctx)?;
    let levels = &report.levels;
    ensure(levels.iter().all(|l| l.min_red_fraction.is_positive()), || "a level has ε ≤ 0".into())?;
    ensure(levels.windows(2).all(|p| p[0].total_red_fraction <= p[1].total_red_fraction), || "red share decreases".into())?;
    ensure(levels.iter().any(|l| l.total_red_fraction.to_f64() > RED_THRESHOLD), || "red share stays below 0.9".into())?;
    let eps = levels[0].min_red_fraction.to_literal();
    ensure(eps == GOLDEN_EPSILON, || format!("ε = {eps} differs from the frozen value"))?;
    let shares: Vec<String> = levels.iter().map(|l| format!("{:.4}", l.total_red_fraction.to_f64())).collect();
    Ok(format!("ε = {eps} ≈ {:.4} at every level; red share by level {}", levels[0].min_red_fraction.to_f64(), shares.join(", ")))
}

/// Exact T-periods of the centre and a generic point of `c`, by iteration,
/// compared with the formula.
fn simulated_t_periods(ctx: &Context, c: &Component, rng: &mut ChaCha8Rng) -> CResult<Vec<u64>> {
    let p = c.periods();
    let cap = 12 * p.generic_tprime * 12;
    let center = t_orbit_period(&ctx.w.table, &c.center, cap)?.ok_or_else(|| Failure::Inconclusive("centre orbit".into()))?;
    let generic_point = random_interior_point(&c.region, rng);
    let generic =
        t_orbit_period(&ctx.w.table, &generic_point, cap)?.ok_or_else(|| Failure::Inconclusive("generic orbit".into()))?;
    let expected_center = if c.rotation_l == 0 { p.generic_t } else { p.center_t };
    ensure(center == expected_center && generic == p.generic_t, || {
        format!("simulated T-periods ({center}, {generic}) differ from ({expected_center}, {})", p.generic_t)
    })?;
    Ok(vec![center, generic])
}

fn check_period_set(ctx: &Context) -> CResult<String> {
    let bound = ctx.opts.period_bound;
    let set = full_period_set(bound)?;
    ensure(set == full_period_set(bound)?, || "enumeration is not deterministic".into())?;
    for &p in set.generators.keys() {
        ensure(p % 2 == 0 || 2 * p > bound || set.contains(2 * p), || format!("{p} is odd but {} is missing", 2 * p))?;
    }
    for (&p, wit) in &set.generators {
        let h = wit.generator.replay().ok_or_else(|| Failure::Fail("witness overflow".into()))?;
        let b = crate::periods::period_of_h(&h)?;
        ensure(b == p || (wit.doubled && 2 * b == p), || format!("witness for {p} replays to {b}"))?;
    }
    let mut comps: Vec<Component> = ctx.base_components()?.clone();
    let s = ctx.similarity()?;
    let w4 = &comps[3];
    comps.push(find_periodic_component(&ctx.w, &w4.region.map(&s.gamma1)?.interior_point(), ctx.opts.component_cap)?);
    let (p4, p14) = ctx.partitions()?;
    comps.extend(p4.components.iter().cloned());
    comps.extend(p14.components.iter().cloned());
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.opts.seed);
    let mut from_components = Vec::new();
    for c in &comps {
        from_components.extend(simulated_t_periods(ctx, c, &mut rng)?);
    }
    from_components.sort_unstable();
    from_components.dedup();
    let report = cross_validate(&ctx.w.table, &set, &ctx.w.zp, ctx.opts.samples, ctx.opts.seed, &from_components)?;
    Ok(format!(
        "{} periods ≤ {bound}; {} component orbits and {} sampled orbits inside the set (distinct periods {:?})",
        set.generators.len(),
        comps.len(),
        report.samples - report.skipped,
        report.observed
    ))
}

fn check_kernel(ctx: &Context) -> CResult<String> {
    let n = ctx.opts.samples;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.opts.seed);
    kernel::field_axioms(&mut rng, n)?;
    kernel::sign_correctness(&mut rng, n)?;
    kernel::split_area(ctx, &mut rng, n)?;
    kernel::isometry_area(ctx, &mut rng, n)?;
    kernel::itinerary_shift(ctx, &mut rng, n)?;
    let checked = kernel::wedge_conjugacy(ctx, &mut rng, n)?;
    Ok(format!("{n} cases each for field axioms, signs, split areas, isometries, itinerary shifts; {checked} wedge-conjugacy points"))
}

mod kernel {
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    use super::{ensure, CResult, Context, Failure};
    use crate::billiard::BilliardError;
    use crate::field::{Rat, QS3};
    use crate::geometry::{AffMap, Line, Point};
    use crate::sampling::random_interior_point;

    fn rat(rng: &mut ChaCha8Rng) -> Rat {
        Rat::new(rng.gen_range(-1_000_000..=1_000_000), rng.gen_range(1..=1_000))
    }

    fn qs3(rng: &mut ChaCha8Rng) -> QS3 {
        QS3::new(rat(rng), rat(rng))
    }

    pub fn field_axioms(rng: &mut ChaCha8Rng, n: usize) -> CResult<()> {
        for _ in 0..n {
            let (a, b, c) = (qs3(rng), qs3(rng), qs3(rng));
            ensure(&(&a + &b) + &c == &a + &(&b + &c), || "addition is not associative".into())?;
            ensure(&(&a * &b) * &c == &a * &(&b * &c), || "multiplication is not associative".into())?;
            ensure(&a * &(&b + &c) == &(&a * &b) + &(&a * &c), || "distributivity fails".into())?;
            ensure(&a * &b == &b * &a && &a + &b == &b + &a, || "commutativity fails".into())?;
            if !a.is_zero() {
                ensure(&a * &a.recip().expect("nonzero") == QS3::one(), || "inverse fails".into())?;
            }
        }
        Ok(())
    }

    pub fn sign_correctness(rng: &mut ChaCha8Rng, n: usize) -> CResult<()> {
        for _ in 0..n {
            let x = qs3(rng);
            let f = x.to_f64();
            if f.abs() > 1e-6 {
                ensure(x.signum() == if f > 0.0 { 1 } else { -1 }, || format!("sign of {x}"))?;
            }
            let y = qs3(rng);
            ensure((&x * &y).signum() == x.signum() * y.signum(), || "sign is not multiplicative".into())?;
        }
        Ok(())
    }

    pub fn split_area(ctx: &Context, rng: &mut ChaCha8Rng, n: usize) -> CResult<()> {
        let zp = &ctx.w.zp;
        let area = zp.area()?;
        for _ in 0..n {
            let p = random_interior_point(zp, rng);
            let q = random_interior_point(zp, rng);
            if p == q {
                continue;
            }
            let line = Line::through(&p, &q)?;
            let total: QS3 = zp.split(&line).iter().map(|r| r.area().expect("bounded")).sum();
            ensure(total == area, || "split changes the area".into())?;
        }
        Ok(())
    }

    pub fn isometry_area(ctx: &Context, rng: &mut ChaCha8Rng, n: usize) -> CResult<()> {
        let zp = &ctx.w.zp;
        let area = zp.area()?;
        for _ in 0..n {
            let f = AffMap::rotation(rng.gen_range(0..12))
                .compose(&AffMap::point_reflection(&Point::new(qs3(rng), qs3(rng))));
            let image = zp.map(&f)?;
            ensure(image.area()? == area, || "isometry changes the area".into())?;
            let p = random_interior_point(zp, rng);
            ensure(image.contains(&f.apply(&p)), || "isometry moves an interior point out".into())?;
        }
        Ok(())
    }

    pub fn itinerary_shift(ctx: &Context, rng: &mut ChaCha8Rng, n: usize) -> CResult<()> {
        let w = &ctx.w;
        let mut done = 0;
        while done < n {
            let p = random_interior_point(&w.zp, rng);
            let long = w.itinerary(&p, 20, 0);
            if long.stop.is_some() {
                continue;
            }
            let q = w.step(&p)?;
            let short = w.itinerary(&q, 19, 0);
            ensure(short.forward() == &long.forward()[1..], || format!("shift fails at {}", p.to_literal()))?;
            done += 1;
        }
        Ok(())
    }

    /// `H ∘ T′ = T₆ ∘ H` on sampled wedge points; returns how many were
    /// away from boundaries.
    pub fn wedge_conjugacy(ctx: &Context, rng: &mut ChaCha8Rng, n: usize) -> CResult<usize> {
        let w = &ctx.w;
        let mut checked = 0;
        for _ in 0..n {
            let p = random_interior_point(&w.wedge, rng);
            let lhs = match w.step(&p) {
                Ok(q) => w.h.apply(&q),
                Err(BilliardError::Grane { .. }) => continue,
                Err(e) => return Err(e.into()),
            };
            let rhs = match w.t6(&w.h.apply(&p), 1 << 20) {
                Ok((q, _)) => q,
                Err(BilliardError::Grane { .. }) => return Err(Failure::Fail("T6 meets a boundary where T′ does not".into())),
                Err(e) => return Err(e.into()),
            };
            ensure(lhs == rhs, || format!("H∘T′ differs from T6∘H at {}", p.to_literal()))?;
            checked += 1;
        }
        Ok(checked)
    }
}
