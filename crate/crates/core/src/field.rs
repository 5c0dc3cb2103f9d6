//! Exact arithmetic in the quadratic field Q[√3].
//!
//! Every coordinate, matrix entry and predicate in the engine lives here. A
//! [`Rat`] keeps machine-word numerators and denominators while they fit and
//! falls back to arbitrary precision otherwise; the representation is always
//! canonical, so structural equality and hashing agree with value equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub const SQRT_3_F64: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid number literal at byte {position}: {message}")]
    Parse { position: usize, message: String },
}

/// Arbitrary-precision rational, always reduced with a positive denominator.
#[derive(Clone)]
pub struct Rat(Repr);

#[derive(Clone)]
enum Repr {
    // Invariant: den > 0, gcd(|num|, den) = 1, and no value that fits here is
    // ever stored as `Big`.
    Small { num: i64, den: i64 },
    Big(BigRational),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rat {
    pub fn zero() -> Rat {
        Rat(Repr::Small { num: 0, den: 1 })
    }

    pub fn one() -> Rat {
        Rat(Repr::Small { num: 1, den: 1 })
    }

    pub fn from_int(n: i64) -> Rat {
        Rat(Repr::Small { num: n, den: 1 })
    }

    /// `num / den`; panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Rat {
        assert!(den != 0, "zero denominator");
        Rat::from_i128(num as i128, den as i128)
    }

    pub fn from_bigint(num: BigInt, den: BigInt) -> Result<Rat, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(Rat::from_big(BigRational::new(num, den)))
    }

    fn from_i128(num: i128, den: i128) -> Rat {
        debug_assert!(den != 0);
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let (mut n, mut d) = (num / g, den / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(num), Ok(den)) => Rat(Repr::Small { num, den }),
            _ => Rat(Repr::Big(BigRational::new_raw(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Rat {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(num), Some(den)) => Rat(Repr::Small { num, den }),
            _ => Rat(Repr::Big(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small { num, .. } => num.signum() as i32,
            Repr::Big(r) => {
                if r.is_positive() {
                    1
                } else if r.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Rat {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<Rat, FieldError> {
        match &self.0 {
            Repr::Small { num: 0, .. } => Err(FieldError::DivisionByZero),
            Repr::Small { num, den } => Ok(Rat::from_i128(*den as i128, *num as i128)),
            Repr::Big(r) => Ok(Rat::from_big(r.recip())),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => *num as f64 / *den as f64,
            Repr::Big(r) => r.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Whether the value is an integer.
    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }
}

impl PartialEq for Rat {
    fn eq(&self, other: &Rat) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rat {}

impl Hash for Rat {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.numer().hash(state);
                r.denom().hash(state);
            }
        }
    }
}

impl PartialOrd for Rat {
    fn partial_cmp(&self, other: &Rat) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rat {
    fn cmp(&self, other: &Rat) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            if b == d {
                return Rat::from_i128(*a as i128 + *c as i128, *b as i128);
            }
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if let (Some(x), Some(y), Some(z)) = (a.checked_mul(d), c.checked_mul(b), b.checked_mul(d)) {
                if let Some(n) = x.checked_add(y) {
                    return Rat::from_i128(n, z);
                }
            }
        }
        Rat::from_big(self.to_big() + rhs.to_big())
    }
}

impl<'a> Sub<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn sub(self, rhs: &Rat) -> Rat {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if let (Some(n), Some(z)) = (a.checked_mul(c), b.checked_mul(d)) {
                return Rat::from_i128(n, z);
            }
        }
        Rat::from_big(self.to_big() * rhs.to_big())
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        match &self.0 {
            Repr::Small { num, den } if *num != i64::MIN => Rat(Repr::Small { num: -num, den: *den }),
            _ => Rat::from_big(-self.to_big()),
        }
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        -&self
    }
}

impl FromStr for Rat {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<Rat, FieldError> {
        parse_rat(s, 0)
    }
}

fn parse_int(s: &str, offset: usize) -> Result<BigInt, FieldError> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() {
        return Err(FieldError::Parse { position: offset, message: "expected an integer".into() });
    }
    if let Some(bad) = digits.bytes().position(|c| !c.is_ascii_digit()) {
        let position = offset + (s.len() - digits.len()) + bad;
        return Err(FieldError::Parse { position, message: format!("unexpected character {:?}", &s[position - offset..=position - offset]) });
    }
    Ok(s.parse::<BigInt>().expect("validated digits"))
}

fn parse_rat(s: &str, offset: usize) -> Result<Rat, FieldError> {
    match s.split_once('/') {
        None => Ok(Rat::from_big(BigRational::from_integer(parse_int(s, offset)?))),
        Some((n, d)) => {
            let num = parse_int(n, offset)?;
            let den_offset = offset + n.len() + 1;
            if d.starts_with('-') {
                return Err(FieldError::Parse { position: den_offset, message: "denominator must be positive".into() });
            }
            let den = parse_int(d, den_offset)?;
            if den.is_zero() {
                return Err(FieldError::Parse { position: den_offset, message: "zero denominator".into() });
            }
            Ok(Rat::from_big(BigRational::new(num, den)))
        }
    }
}

/// The number `a + b√3` with rational `a` and `b`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QS3 {
    a: Rat,
    b: Rat,
}

impl QS3 {
    pub fn new(a: Rat, b: Rat) -> QS3 {
        QS3 { a, b }
    }

    pub fn zero() -> QS3 {
        QS3 { a: Rat::zero(), b: Rat::zero() }
    }

    pub fn one() -> QS3 {
        QS3 { a: Rat::one(), b: Rat::zero() }
    }

    pub fn sqrt3() -> QS3 {
        QS3 { a: Rat::zero(), b: Rat::one() }
    }

    pub fn int(n: i64) -> QS3 {
        QS3 { a: Rat::from_int(n), b: Rat::zero() }
    }

    pub fn rat(num: i64, den: i64) -> QS3 {
        QS3 { a: Rat::new(num, den), b: Rat::zero() }
    }

    /// `(an/ad) + (bn/bd)√3` from machine integers.
    pub fn from_parts(an: i64, ad: i64, bn: i64, bd: i64) -> QS3 {
        QS3 { a: Rat::new(an, ad), b: Rat::new(bn, bd) }
    }

    pub fn rational_part(&self) -> &Rat {
        &self.a
    }

    pub fn sqrt3_part(&self) -> &Rat {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Galois conjugate `a - b√3`.
    pub fn conjugate(&self) -> QS3 {
        QS3 { a: self.a.clone(), b: -&self.b }
    }

    /// Field norm `a² - 3b²`.
    pub fn norm(&self) -> Rat {
        let three = Rat::from_int(3);
        &(&self.a * &self.a) - &(&three * &(&self.b * &self.b))
    }

    /// Exact sign of the real number `a + b√3`.
    pub fn signum(&self) -> i32 {
        let sa = self.a.signum();
        let sb = self.b.signum();
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        // Opposite signs: the term with the larger square dominates.
        let lhs = &self.a * &self.a;
        let rhs = &Rat::from_int(3) * &(&self.b * &self.b);
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> QS3 {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Result<QS3, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.norm().recip()?;
        Ok(QS3 { a: &self.a * &n, b: -&(&self.b * &n) })
    }

    pub fn checked_div(&self, rhs: &QS3) -> Result<QS3, FieldError> {
        Ok(self * &rhs.recip()?)
    }

    pub fn square(&self) -> QS3 {
        self * self
    }

    /// Approximate value for rendering. Never used by predicates.
    pub fn to_f64(&self) -> f64 {
        let (a, b) = (self.a.to_f64(), self.b.to_f64() * SQRT_3_F64);
        if self.a.signum() * self.b.signum() < 0 {
            // Opposite signs cancel; divide the exact norm by the conjugate.
            self.norm().to_f64() / (a - b)
        } else {
            a + b
        }
    }

    pub fn scale(&self, r: &Rat) -> QS3 {
        QS3 { a: &self.a * r, b: &self.b * r }
    }

    /// Canonical literal `p/q+r/s*s3`.
    pub fn to_literal(&self) -> String {
        self.to_string()
    }

    /// Parses `p/q+r/s*s3` or the rational shorthand `p` / `p/q`.
    pub fn parse_literal(s: &str) -> Result<QS3, FieldError> {
        s.parse()
    }
}

impl Default for QS3 {
    fn default() -> QS3 {
        QS3::zero()
    }
}

impl fmt::Display for QS3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}*s3", self.a, self.b)
    }
}

impl fmt::Debug for QS3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (~{:.6})", self.to_f64())
    }
}

impl FromStr for QS3 {
    type Err = FieldError;

    fn from_str(s: &str) -> Result<QS3, FieldError> {
        if s.is_empty() {
            return Err(FieldError::Parse { position: 0, message: "empty literal".into() });
        }
        match s.strip_suffix("*s3") {
            None => Ok(QS3 { a: parse_rat(s, 0)?, b: Rat::zero() }),
            Some(body) => {
                // The rational part never contains '+', so the last one separates.
                let Some(split) = body.rfind('+') else {
                    return Err(FieldError::Parse { position: 0, message: "expected `<rational>+<rational>*s3`".into() });
                };
                let a = parse_rat(&body[..split], 0)?;
                let b = parse_rat(&body[split + 1..], split + 1)?;
                Ok(QS3 { a, b })
            }
        }
    }
}

impl PartialOrd for QS3 {
    fn partial_cmp(&self, other: &QS3) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QS3 {
    fn cmp(&self, other: &QS3) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        (self - other).signum().cmp(&0)
    }
}

impl<'a> Add<&'a QS3> for &'a QS3 {
    type Output = QS3;
    fn add(self, rhs: &QS3) -> QS3 {
        QS3 { a: &self.a + &rhs.a, b: &self.b + &rhs.b }
    }
}

impl<'a> Sub<&'a QS3> for &'a QS3 {
    type Output = QS3;
    fn sub(self, rhs: &QS3) -> QS3 {
        QS3 { a: &self.a - &rhs.a, b: &self.b - &rhs.b }
    }
}

impl<'a> Mul<&'a QS3> for &'a QS3 {
    type Output = QS3;
    fn mul(self, rhs: &QS3) -> QS3 {
        if self.b.is_zero() && rhs.b.is_zero() {
            return QS3 { a: &self.a * &rhs.a, b: Rat::zero() };
        }
        let three = Rat::from_int(3);
        let a = &(&self.a * &rhs.a) + &(&three * &(&self.b * &rhs.b));
        let b = &(&self.a * &rhs.b) + &(&self.b * &rhs.a);
        QS3 { a, b }
    }
}

/// Panics on a zero divisor; use [`QS3::checked_div`] when that can happen.
impl<'a> Div<&'a QS3> for &'a QS3 {
    type Output = QS3;
    fn div(self, rhs: &QS3) -> QS3 {
        self.checked_div(rhs).expect("QS3 division by zero")
    }
}

impl Neg for &QS3 {
    type Output = QS3;
    fn neg(self) -> QS3 {
        QS3 { a: -&self.a, b: -&self.b }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<QS3> for QS3 {
            type Output = QS3;
            fn $m(self, rhs: QS3) -> QS3 { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a QS3> for QS3 {
            type Output = QS3;
            fn $m(self, rhs: &QS3) -> QS3 { (&self).$m(rhs) }
        }
        impl<'a> $tr<QS3> for &'a QS3 {
            type Output = QS3;
            fn $m(self, rhs: QS3) -> QS3 { self.$m(&rhs) }
        }
    )*};
}

forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for QS3 {
    type Output = QS3;
    fn neg(self) -> QS3 {
        -&self
    }
}

impl AddAssign<&QS3> for QS3 {
    fn add_assign(&mut self, rhs: &QS3) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&QS3> for QS3 {
    fn sub_assign(&mut self, rhs: &QS3) {
        *self = &*self - rhs;
    }
}

impl std::iter::Sum for QS3 {
    fn sum<I: Iterator<Item = QS3>>(iter: I) -> QS3 {
        iter.fold(QS3::zero(), |acc, x| acc + x)
    }
}

impl From<i64> for QS3 {
    fn from(n: i64) -> QS3 {
        QS3::int(n)
    }
}

impl From<Rat> for QS3 {
    fn from(a: Rat) -> QS3 {
        QS3 { a, b: Rat::zero() }
    }
}

impl One for QS3 {
    fn one() -> QS3 {
        QS3::one()
    }
}

impl Zero for QS3 {
    fn zero() -> QS3 {
        QS3::zero()
    }
    fn is_zero(&self) -> bool {
        QS3::is_zero(self)
    }
}

impl serde::Serialize for QS3 {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_literal())
    }
}

impl<'de> serde::Deserialize<'de> for QS3 {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<QS3, D::Error> {
        let s = String::deserialize(de)?;
        QS3::parse_literal(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(s: &str) -> QS3 {
        s.parse().unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(q("1+1*s3") * q("1+-1*s3"), QS3::int(-2));
    }

    #[test]
    fn sqrt3_squared() {
        assert_eq!(QS3::sqrt3() * QS3::sqrt3(), QS3::int(3));
    }

    #[test]
    fn reciprocal_multiplies_back() {
        let x = q("1+1*s3");
        let inv = QS3::one().checked_div(&x).unwrap();
        assert_eq!(inv, q("-1/2+1/2*s3"));
        assert_eq!(&inv * &x, QS3::one());
    }

    #[test]
    fn division_by_zero_is_an_error() {
        assert_eq!(QS3::one().checked_div(&QS3::zero()), Err(FieldError::DivisionByZero));
        assert_eq!(Rat::zero().recip(), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn signs() {
        assert_eq!(QS3::zero().signum(), 0);
        assert_eq!(q("-2+1*s3").signum(), -1);
        assert_eq!(q("7+-4*s3").signum(), 1);
        assert_eq!(q("-7+4*s3").signum(), -1);
    }

    #[test]
    fn float_approximation() {
        assert_eq!(QS3::one().to_f64(), 1.0);
        assert!((QS3::sqrt3().to_f64() - 1.7320508).abs() < 1e-7);
        assert!((q("1/2+1/2*s3").to_f64() - 1.3660254).abs() < 1e-7);
    }

    #[test]
    fn literal_format() {
        assert_eq!(q("1/2+-1/3*s3").to_string(), "1/2+-1/3*s3");
        assert_eq!(q("7").to_string(), "7+0*s3");
        assert_eq!(q("2/4+0/5*s3").to_string(), "1/2+0*s3");
        assert_eq!(q("-3/6"), QS3::rat(-1, 2));
    }

    #[test]
    fn parse_errors_carry_position() {
        for (text, pos) in [("abc", 0), ("1/2+x*s3", 4), ("1/0", 2), ("", 0), ("12a", 2), ("1/-2", 2)] {
            match text.parse::<QS3>() {
                Err(FieldError::Parse { position, .. }) => assert_eq!(position, pos, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn small_and_big_representations_agree() {
        let big = Rat::new(i64::MAX, 3);
        let sq = &big * &big;
        let back = &(&sq * &Rat::new(3, i64::MAX)) * &Rat::new(3, i64::MAX);
        assert_eq!(back, Rat::one());
        assert!(matches!(back.0, Repr::Small { .. }));
        assert!(sq > big);
        assert_eq!(sq.to_string().parse::<Rat>().unwrap(), sq);
    }

    fn arb_rat() -> impl Strategy<Value = Rat> {
        (-60i64..60, 1i64..20).prop_map(|(n, d)| Rat::new(n, d))
    }

    fn arb_qs3() -> impl Strategy<Value = QS3> {
        (arb_rat(), arb_rat()).prop_map(|(a, b)| QS3::new(a, b))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn field_axioms(x in arb_qs3(), y in arb_qs3(), z in arb_qs3()) {
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&x + &y, &y + &x);
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            if !x.is_zero() {
                prop_assert_eq!(&x * &x.recip().unwrap(), QS3::one());
            }
        }

        #[test]
        fn sign_is_multiplicative(x in arb_qs3(), y in arb_qs3()) {
            prop_assert_eq!(x.signum() * y.signum(), (&x * &y).signum());
        }

        #[test]
        fn sign_matches_float(x in arb_qs3()) {
            let v = x.to_f64();
            if v.abs() > 1e-6 {
                prop_assert_eq!(x.signum(), if v > 0.0 { 1 } else { -1 });
            }
        }

        #[test]
        fn literal_round_trip(x in arb_qs3()) {
            let text = x.to_literal();
            let back: QS3 = text.parse().unwrap();
            prop_assert_eq!(&back, &x);
            prop_assert_eq!(back.to_literal(), text);
        }
    }
}
