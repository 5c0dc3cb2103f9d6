use dodeca::billiard::WedgeSystem;
use dodeca::dynamics::{first_return_map, DEFAULT_COMPONENT_CAP, DEFAULT_RETURN_CAP};
use dodeca::partition::{red_fraction_check, verify_partition};
use dodeca::periods::M88;
use dodeca::similarity::build_similarity;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for at in 0..n {
            let mut q = p.clone();
            q.insert(at, n - 1);
            out.push(q);
        }
    }
    out
}

#[test]
fn z4_and_z14_tilings_and_refinement_counts() {
    let w = WedgeSystem::new();
    let s = build_similarity(&w).unwrap();
    let rs4 = first_return_map(&w, &s.z4, DEFAULT_RETURN_CAP).unwrap();
    let rs14 = first_return_map(&w, &s.z14, DEFAULT_RETURN_CAP).unwrap();
    let p4 = verify_partition(&w, &w.zp, &rs4, DEFAULT_COMPONENT_CAP).unwrap();
    let p14 = verify_partition(&w, &w.zp, &rs14, DEFAULT_COMPONENT_CAP).unwrap();
    assert!(p4.area_identity && p14.area_identity);
    assert_eq!(p4.sorted_periods(), vec![1, 2, 3, 3, 4, 54, 60]);
    assert_eq!(p14.n(), 20);
    assert_eq!(&p4.domain_area, &p14.domain_area);

    let red = red_fraction_check(&w, &rs4, &p4, &rs14, &p14, &s.gamma1, 3).unwrap();
    assert_eq!(red.ratio, s.ratio1.square());
    let c = &red.counts;
    let found = permutations(8).into_iter().find(|sigma| {
        (0..8).all(|r| (0..8).all(|col| M88[r][col] == c[sigma[r]][sigma[col]]))
    });
    assert!(found.is_some(), "refinement counts {c:?} are not a relabelling of M88");

    let eps = &red.levels[0].min_red_fraction;
    assert!(eps.is_positive());
    assert!(red.levels.iter().all(|l| &l.min_red_fraction == eps));
    let totals: Vec<f64> = red.levels.iter().map(|l| l.total_red_fraction.to_f64()).collect();
    assert!(totals.windows(2).all(|t| t[0] <= t[1]), "{totals:?}");
}
