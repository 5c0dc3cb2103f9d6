//! The set of all periods as an explicit matrix formula, its enumeration up
//! to a bound, and cross-validation against exact orbits.

use std::collections::BTreeMap;

use num_integer::gcd;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::billiard::{BilliardError, Dir, Table};
use crate::geometry::{Point, Region};
use crate::sampling::random_interior_point;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PeriodError {
    #[error("visit vector is zero")]
    ZeroVector,
    #[error("bound must be positive")]
    ZeroBound,
    #[error("period {period} of a sampled orbit at {point} is missing from the enumerated set")]
    Missing { period: u64, point: String },
    #[error(transparent)]
    Billiard(#[from] BilliardError),
}

pub const M68: [[u64; 8]; 6] = [
    [1, 0, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 8, 18, 13, 24],
    [0, 0, 0, 0, 2, 7, 14, 29],
    [0, 0, 0, 0, 0, 0, 0, 0],
];

pub const M66: [[u64; 6]; 6] = [
    [0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0],
    [5, 4, 3, 2, 1, 0],
    [1, 1, 1, 1, 1, 1],
];

pub const M88: [[u64; 8]; 8] = [
    [2, 2, 2, 2, 20, 50, 26, 50],
    [2, 2, 2, 2, 20, 50, 26, 50],
    [4, 4, 4, 4, 42, 107, 74, 145],
    [2, 2, 2, 2, 20, 50, 48, 94],
    [0, 1, 0, 0, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 1, 8, 18, 13, 24],
    [0, 0, 1, 0, 0, 0, 0, 0],
];

pub const F: [[u64; 8]; 13] = [
    [0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0],
    [9, 2, 5, 2, 0, 0, 0, 0],
    [6, 4, 10, 4, 0, 0, 0, 0],
    [0, 0, 2, 3, 0, 0, 1, 0],
    [24, 24, 120, 102, 0, 0, 18, 0],
    [48, 48, 156, 108, 0, 0, 24, 0],
    [4, 4, 9, 4, 0, 0, 1, 0],
    [1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 1, 0, 0, 0, 0],
    [2, 2, 4, 2, 0, 0, 1, 0],
    [0, 0, 7, 8, 0, 0, 1, 0],
    [6, 6, 13, 6, 0, 0, 2, 0],
];

pub const G: [[u64; 6]; 8] = [
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 1, 0, 0],
    [0, 0, 0, 24, 36, 0],
    [0, 0, 0, 18, 36, 0],
    [0, 0, 0, 1, 2, 0],
    [0, 0, 0, 1, 1, 0],
    [0, 0, 0, 2, 1, 0],
    [0, 0, 0, 1, 3, 0],
];

/// FNV-1a over every constant in declaration order.
pub fn constants_checksum() -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let rows = M68.iter().map(|r| &r[..]).chain(M66.iter().map(|r| &r[..])).chain(M88.iter().map(|r| &r[..]));
    let rows = rows.chain(F.iter().map(|r| &r[..])).chain(G.iter().map(|r| &r[..]));
    for row in rows {
        for &x in row {
            for byte in x.to_le_bytes() {
                h ^= byte as u64;
                h = h.wrapping_mul(0x100_0000_01b3);
            }
        }
    }
    h
}

fn mul<const R: usize, const C: usize>(m: &[[u64; C]; R], v: &[u64; C]) -> Option<[u64; R]> {
    let mut out = [0u64; R];
    for (o, row) in out.iter_mut().zip(m) {
        for (a, b) in row.iter().zip(v) {
            *o = o.checked_add(a.checked_mul(*b)?)?;
        }
    }
    Some(out)
}

/// Period `12 Σh / gcd(12, Σ i·h_i)` of a visit vector.
pub fn period_of_h(h: &[u64; 6]) -> Result<u64, PeriodError> {
    let total: u64 = h.iter().sum();
    if total == 0 {
        return Err(PeriodError::ZeroVector);
    }
    let weighted: u64 = h.iter().enumerate().map(|(i, &x)| (i as u64 + 1) * x).sum();
    Ok(12 * total / gcd(12, weighted))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    F,
    G,
}

/// Indices producing `h = M66^k M68 M88^n f` (family F) or `h = M66^k g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Generator {
    pub family: Family,
    pub index: usize,
    pub k: u32,
    pub n: u32,
}

impl Generator {
    /// Recomputes `h` from the matrices.
    pub fn replay(&self) -> Option<[u64; 6]> {
        let mut h = match self.family {
            Family::F => {
                let mut v = F[self.index];
                for _ in 0..self.n {
                    v = mul(&M88, &v)?;
                }
                mul(&M68, &v)?
            }
            Family::G => G[self.index],
        };
        for _ in 0..self.k {
            h = mul(&M66, &h)?;
        }
        Some(h)
    }
}

/// Every `(h, generator)` whose period is at most `bound`.
pub fn enumerate_h(bound: u64) -> Result<Vec<([u64; 6], Generator)>, PeriodError> {
    if bound == 0 {
        return Err(PeriodError::ZeroBound);
    }
    let mut out = Vec::new();
    // The period is at least Σh, and Σ never decreases under the matrices.
    let walk_k = |family, index, n, start: [u64; 6], out: &mut Vec<_>| {
        let mut h = start;
        let mut k = 0u32;
        loop {
            if h.iter().sum::<u64>() > bound {
                break;
            }
            if let Ok(p) = period_of_h(&h) {
                if p <= bound {
                    out.push((h, Generator { family, index, k, n }));
                }
            }
            match mul(&M66, &h) {
                Some(next) if next != h => h = next,
                _ => break,
            }
            k += 1;
        }
    };
    for (index, f) in F.iter().enumerate() {
        let mut v = *f;
        let mut n = 0u32;
        while v.iter().sum::<u64>() <= bound {
            if let Some(h) = mul(&M68, &v) {
                walk_k(Family::F, index, n, h, &mut out);
            }
            match mul(&M88, &v) {
                Some(next) if next != v => v = next,
                _ => break,
            }
            n += 1;
        }
    }
    for (index, g) in G.iter().enumerate() {
        walk_k(Family::G, index, 0, *g, &mut out);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub generator: Generator,
    /// Set when the period is twice an odd member of the base set.
    pub doubled: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeriodSet {
    pub bound: u64,
    pub generators: BTreeMap<u64, Witness>,
}

impl PeriodSet {
    pub fn periods(&self) -> Vec<u64> {
        self.generators.keys().copied().collect()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.generators.contains_key(&p)
    }
}

/// The base set unioned with doubles of its odd members, up to `bound`.
pub fn full_period_set(bound: u64) -> Result<PeriodSet, PeriodError> {
    let mut base: BTreeMap<u64, Generator> = BTreeMap::new();
    for (h, g) in enumerate_h(bound)? {
        let p = period_of_h(&h)?;
        base.entry(p).and_modify(|w| *w = (*w).min(g)).or_insert(g);
    }
    let mut generators: BTreeMap<u64, Witness> =
        base.iter().map(|(&p, &g)| (p, Witness { generator: g, doubled: false })).collect();
    for (&p, &g) in &base {
        if p % 2 == 1 && 2 * p <= bound {
            generators.entry(2 * p).or_insert(Witness { generator: g, doubled: true });
        }
    }
    Ok(PeriodSet { bound, generators })
}

/// Exact period of `p` under the outer billiard map, or `None` if the orbit
/// does not close within `cap` steps.
pub fn t_orbit_period(table: &Table, p: &Point, cap: u64) -> Result<Option<u64>, BilliardError> {
    let mut cur = p.clone();
    for n in 1..=cap {
        cur = table.billiard_step(&cur, Dir::Forward)?;
        if &cur == p {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossReport {
    pub bound: u64,
    pub samples: usize,
    /// Distinct periods seen on sampled orbits, all members of the set.
    pub observed: Vec<u64>,
    /// Samples that met a boundary or did not close within the bound.
    pub skipped: usize,
    /// Enumerated periods with no sampled orbit.
    pub unwitnessed: Vec<u64>,
}

/// Samples points of `region`, finds their exact T-periods by iteration and
/// checks each one against the enumerated set.
pub fn cross_validate(
    table: &Table,
    set: &PeriodSet,
    region: &Region,
    samples: usize,
    seed: u64,
    extra: &[u64],
) -> Result<CrossReport, PeriodError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut observed = std::collections::BTreeSet::new();
    let mut skipped = 0;
    let check = |p: u64, at: String| {
        if p <= set.bound && !set.contains(p) {
            return Err(PeriodError::Missing { period: p, point: at });
        }
        Ok(())
    };
    for &p in extra {
        check(p, "(given)".into())?;
        observed.insert(p);
    }
    for _ in 0..samples {
        let p = random_interior_point(region, &mut rng);
        match t_orbit_period(table, &p, set.bound) {
            Ok(Some(per)) => {
                check(per, p.to_literal())?;
                observed.insert(per);
            }
            Ok(None) | Err(BilliardError::Grane { .. }) => skipped += 1,
            Err(e) => return Err(e.into()),
        }
    }
    let unwitnessed = set.periods().into_iter().filter(|p| !observed.contains(p)).collect();
    Ok(CrossReport { bound: set.bound, samples, observed: observed.into_iter().collect(), skipped, unwitnessed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_examples() {
        assert_eq!(period_of_h(&[0, 1, 0, 0, 0, 0]).unwrap(), 6);
        assert_eq!(period_of_h(&[0, 0, 0, 0, 1, 0]).unwrap(), 12);
        assert_eq!(period_of_h(&[1, 1, 1, 1, 1, 1]).unwrap(), 24);
        assert_eq!(period_of_h(&[0; 6]), Err(PeriodError::ZeroVector));
    }

    #[test]
    fn first_generators() {
        let g = Generator { family: Family::F, index: 0, k: 0, n: 0 };
        assert_eq!(g.replay().unwrap(), [0, 1, 0, 0, 0, 0]);
        let g = Generator { family: Family::G, index: 0, k: 0, n: 0 };
        assert_eq!(g.replay().unwrap(), [0, 0, 0, 0, 1, 0]);
    }

    #[test]
    fn zero_bound_rejected() {
        assert_eq!(full_period_set(0), Err(PeriodError::ZeroBound));
    }
}
