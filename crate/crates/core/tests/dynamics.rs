use dodeca::billiard::{Dir, WedgeSystem};
use dodeca::dynamics::*;
use dodeca::sampling::random_samples;
use dodeca::periods::t_orbit_period;

#[test]
fn fixed_points_are_fixed() {
    let w = WedgeSystem::new();
    for k in 1..=5 {
        assert_eq!(w.step(&w.o[k]).unwrap(), w.o[k], "O{k}");
    }
}

#[test]
fn base_components_have_the_expected_vertex_counts() {
    let w = WedgeSystem::new();
    let counts: Vec<usize> = (1..=4)
        .map(|k| find_periodic_component(&w, &w.o[k], DEFAULT_COMPONENT_CAP).unwrap().region.vertices().len())
        .collect();
    assert_eq!(counts, vec![12, 6, 8, 12]);
}

#[test]
fn component_periods_match_direct_orbits() {
    let w = WedgeSystem::new();
    for k in 1..=4 {
        let c = find_periodic_component(&w, &w.o[k], DEFAULT_COMPONENT_CAP).unwrap();
        let per = c.periods();
        let direct = t_orbit_period(&w.table, &c.center, 10_000).unwrap();
        assert_eq!(direct, Some(per.center_t), "W{k}");
    }
}

#[test]
fn forward_and_backward_steps_cancel() {
    let w = WedgeSystem::new();
    for p in random_samples(&w.wedge, 200, 5) {
        let Ok((q, _)) = w.induced_step(&p, Dir::Forward) else { continue };
        let (back, _) = w.induced_step(&q, Dir::Backward).unwrap();
        assert_eq!(back, p);
    }
}

#[test]
fn first_return_to_zp_scaled_by_gamma4() {
    let w = WedgeSystem::new();
    let s = dodeca::similarity::build_similarity(&w).unwrap();
    let rs = first_return_map(&w, &s.z4, DEFAULT_RETURN_CAP).unwrap();
    assert_eq!(rs.return_times(), vec![1, 1, 1, 1, 10, 25, 27, 53]);
    assert_eq!(rs.shapes().iter().filter(|s| !s.convex).count(), 1);
    verify_return_system(&w, &rs).unwrap();
}

#[test]
fn t_period_formula() {
    assert_eq!(t_period(1, 1), 12);
    assert_eq!(t_period(37, 6), 74);
    assert_eq!(t_period(5, 12), 5);
}
