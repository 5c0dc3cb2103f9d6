use dodeca::billiard::WedgeSystem;
use dodeca::dynamics::{find_periodic_component, first_return_map, DEFAULT_COMPONENT_CAP, DEFAULT_RETURN_CAP};
use dodeca::field::QS3;
use dodeca::similarity::*;

#[test]
fn contraction_ratios() {
    let w = WedgeSystem::new();
    let s = build_similarity(&w).unwrap();
    assert_eq!(s.ratio1, QS3::parse_literal("7+-4*s3").unwrap());
    assert_eq!(s.ratio4, QS3::parse_literal("-3+2*s3").unwrap());
    assert_eq!(s.gamma1.apply(&w.o[5]), w.o[1]);
    assert_eq!(s.gamma4.apply(&w.o[5]), w.o[4]);
    assert!(s.back2.is_isometry());
    s.check_nesting().unwrap();
}

#[test]
fn gamma1_conjugates_z4_returns_onto_z14_returns() {
    let w = WedgeSystem::new();
    let s = build_similarity(&w).unwrap();
    let rs4 = first_return_map(&w, &s.z4, DEFAULT_RETURN_CAP).unwrap();
    let rs14 = first_return_map(&w, &s.z14, DEFAULT_RETURN_CAP).unwrap();
    piece_conjugacy(&rs4, &rs14, &s.gamma1).unwrap();
}

#[test]
fn scaled_w4_has_period_37() {
    let w = WedgeSystem::new();
    let s = build_similarity(&w).unwrap();
    let w4 = find_periodic_component(&w, &w.o[4], DEFAULT_COMPONENT_CAP).unwrap();
    let image = w4.region.map(&s.gamma1).unwrap();
    let c = find_periodic_component(&w, &s.gamma1.apply(&w4.center), DEFAULT_COMPONENT_CAP).unwrap();
    assert_eq!(c.per_tprime, 37);
    assert_eq!(c.region, image);
}

#[test]
fn witness_is_the_fixed_point_of_gamma_x() {
    let w = WedgeSystem::new();
    let s = build_similarity(&w).unwrap();
    let y = contraction_fixed_point(&s.gamma_x).unwrap();
    assert_eq!(s.gamma_x.apply(&y), y);
    assert!(s.x.contains(&y));
    assert_eq!(w.period(&y, 2_000).unwrap(), None);
}
