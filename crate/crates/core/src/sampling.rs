//! Random exact points for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{Rat, QS3};
use crate::geometry::{Point, Region};

const GRID: i64 = 1 << 20;

/// A random field element in `[lo, hi]` on a dyadic grid, with a random
/// irrational perturbation so that samples avoid rational lines.
pub fn random_between<R: Rng>(lo: &QS3, hi: &QS3, rng: &mut R) -> QS3 {
    let t = QS3::rat(rng.gen_range(0..=GRID), GRID);
    let wobble = QS3::new(Rat::zero(), Rat::new(rng.gen_range(-GRID..=GRID), GRID * GRID * 64));
    lo + &(&(hi - lo) * &t) + wobble
}

/// Rejection-sampled interior point of a bounded region, or of the part of
/// an unbounded one within distance 8 of its vertices.
pub fn random_interior_point<R: Rng>(r: &Region, rng: &mut R) -> Point {
    let (lo, hi) = if r.is_bounded() {
        r.bounding_box()
    } else {
        let (lo, hi) = r.bounding_box();
        let pad = QS3::int(8);
        (Point::new(&lo.x - &pad, &lo.y - &pad), Point::new(&hi.x + &pad, &hi.y + &pad))
    };
    for _ in 0..100_000 {
        let p = Point::new(random_between(&lo.x, &hi.x, rng), random_between(&lo.y, &hi.y, rng));
        if r.contains(&p) {
            return p;
        }
    }
    r.interior_point()
}

/// `n` seeded interior points of `region`.
pub fn random_samples(region: &Region, n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_interior_point(region, &mut rng)).collect()
}
