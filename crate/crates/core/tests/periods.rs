use dodeca::periods::*;

#[test]
fn constants_are_frozen() {
    assert_eq!(constants_checksum(), 0xb8ac_1323_50f9_e341);
}

#[test]
fn m68_column_sums_are_z4_return_times() {
    let sums: Vec<u64> = (0..8).map(|c| M68.iter().map(|r| r[c]).sum()).collect();
    assert_eq!(sums, vec![1, 1, 1, 1, 10, 25, 27, 53]);
}

#[test]
fn every_column_sum_is_positive() {
    for c in 0..8 {
        assert!(M88.iter().map(|r| r[c]).sum::<u64>() >= 1);
    }
    for c in 0..6 {
        assert!(M66.iter().map(|r| r[c]).sum::<u64>() >= 1);
    }
}

#[test]
fn small_bound_set() {
    let set = full_period_set(100).unwrap();
    let p = set.periods();
    assert!(p.windows(2).all(|w| w[0] < w[1]));
    assert!(p.iter().all(|&x| x <= 100));
    for &x in &p {
        if x % 2 == 1 && 2 * x <= 100 {
            assert!(set.contains(2 * x), "{x} odd but {} missing", 2 * x);
        }
    }
    assert_eq!(full_period_set(100).unwrap(), set);
}

#[test]
fn witnesses_replay_to_their_period() {
    let set = full_period_set(2000).unwrap();
    for (&p, w) in &set.generators {
        let h = w.generator.replay().unwrap();
        let base = period_of_h(&h).unwrap();
        assert_eq!(if w.doubled { 2 * base } else { base }, p);
    }
}

#[test]
fn enumeration_is_monotone_in_the_bound() {
    let small = full_period_set(500).unwrap().periods();
    let large = full_period_set(2000).unwrap().periods();
    let clipped: Vec<u64> = large.into_iter().filter(|&p| p <= 500).collect();
    assert_eq!(small, clipped);
}
