//! Exact arithmetic in a real quadratic field `Q(sqrt(d))`.
//!
//! Every circle point used by the crate (rotation numbers, initial points,
//! arc endpoints, orbit points) is a [`QuadraticIrrational`]. Comparisons are
//! decided by integer sign analysis of `a + b*sqrt(d)`; no floating point is
//! involved in any membership decision.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Deserializer;
use serde::ser::{SerializeTuple, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The number `(p + q*sqrt(d)) / r` in canonical form.
///
/// Canonical form means `r > 0` and `gcd(p, q, r) = 1`. When `q = 0` the value
/// is rational and is compatible with every field; `d` is kept only as a tag.
#[derive(Clone, Debug)]
pub struct QuadraticIrrational {
    p: BigInt,
    q: BigInt,
    r: BigInt,
    d: u64,
}

/// True when no square of a prime divides `d`. `1` counts as squarefree.
pub fn is_squarefree(d: u64) -> bool {
    if d == 0 {
        return false;
    }
    let mut n = d;
    let mut f = 2u64;
    while f.saturating_mul(f) <= n {
        if n % (f * f) == 0 {
            return false;
        }
        if n % f == 0 {
            n /= f;
        }
        f += 1;
    }
    true
}

/// Sign of `a + b*sqrt(d)` for `d` not a perfect square (or `b = 0`).
pub(crate) fn surd_sign(a: &BigInt, b: &BigInt, d: u64) -> Ordering {
    use Sign::*;
    match (a.sign(), b.sign()) {
        (NoSign, NoSign) => Ordering::Equal,
        (Plus | NoSign, Plus | NoSign) => Ordering::Greater,
        (Minus | NoSign, Minus | NoSign) => Ordering::Less,
        // a > 0 > b: compare a^2 with b^2 d
        (Plus, Minus) => (a * a).cmp(&(b * b * BigInt::from(d))),
        (Minus, Plus) => (b * b * BigInt::from(d)).cmp(&(a * a)),
    }
}

/// `floor(q * sqrt(d))` for nonsquare `d`.
fn floor_q_sqrt_d(q: &BigInt, d: u64) -> BigInt {
    if q.is_zero() {
        return BigInt::zero();
    }
    let n = q * q * BigInt::from(d);
    let s = n.sqrt();
    if q.is_positive() {
        s
    } else if &s * &s == n {
        -s
    } else {
        -s - 1
    }
}

impl QuadraticIrrational {
    /// Builds `(p + q*sqrt(d)) / r`, rejecting `r = 0`, `d = 0` and non-squarefree `d`.
    pub fn new(p: BigInt, q: BigInt, r: BigInt, d: u64) -> Result<Self> {
        if r.is_zero() {
            return Err(Error::InvalidQuadratic("denominator r must be nonzero".into()));
        }
        if d == 0 {
            return Err(Error::InvalidQuadratic("radicand d must be positive".into()));
        }
        if !is_squarefree(d) {
            return Err(Error::InvalidQuadratic(format!("radicand {d} is not squarefree")));
        }
        Ok(Self::canonical(p, q, r, d))
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(p: i64, q: i64, r: i64, d: u64) -> Result<Self> {
        Self::new(p.into(), q.into(), r.into(), d)
    }

    /// The rational `num / den`.
    pub fn rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        Self::new(num.into(), BigInt::zero(), den.into(), 1)
    }

    pub fn integer(n: impl Into<BigInt>) -> Self {
        Self::canonical(n.into(), BigInt::zero(), BigInt::one(), 1)
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn one() -> Self {
        Self::integer(1)
    }

    fn canonical(mut p: BigInt, mut q: BigInt, mut r: BigInt, d: u64) -> Self {
        if d == 1 {
            p += &q;
            q = BigInt::zero();
        }
        if r.is_negative() {
            p = -p;
            q = -q;
            r = -r;
        }
        let g = p.gcd(&q).gcd(&r);
        if !g.is_zero() && !g.is_one() {
            p /= &g;
            q /= &g;
            r /= &g;
        }
        if p.is_zero() && q.is_zero() {
            r = BigInt::one();
        }
        Self { p, q, r, d }
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    /// Radicand shared by `self` and `other`, treating rationals as wildcards.
    pub fn common_field(&self, other: &Self) -> Result<u64> {
        if other.is_rational() {
            Ok(self.d)
        } else if self.is_rational() || self.d == other.d {
            Ok(other.d)
        } else {
            Err(Error::IncompatibleRadicands(self.d, other.d))
        }
    }

    fn field_or_panic(&self, other: &Self) -> u64 {
        match self.common_field(other) {
            Ok(d) => d,
            Err(e) => panic!("{e}"),
        }
    }

    /// Exact three-way comparison.
    pub fn try_cmp(&self, other: &Self) -> Result<Ordering> {
        let d = self.common_field(other)?;
        let a = &self.p * &other.r - &other.p * &self.r;
        let b = &self.q * &other.r - &other.q * &self.r;
        Ok(surd_sign(&a, &b, d))
    }

    pub fn signum(&self) -> Ordering {
        surd_sign(&self.p, &self.q, self.d)
    }

    /// `floor(self)`, exact.
    pub fn floor(&self) -> BigInt {
        let s = floor_q_sqrt_d(&self.q, self.d);
        (&self.p + s).div_floor(&self.r)
    }

    pub fn ceil(&self) -> BigInt {
        -(-self.clone()).floor()
    }

    /// Returns `(floor(x), x - floor(x))` with the fractional part in `[0, 1)`.
    pub fn floor_frac(&self) -> (BigInt, Self) {
        let f = self.floor();
        let frac = Self::canonical(&self.p - &f * &self.r, self.q.clone(), self.r.clone(), self.d);
        (f, frac)
    }

    pub fn frac(&self) -> Self {
        self.floor_frac().1
    }

    pub fn recip(&self) -> Result<Self> {
        let den = &self.p * &self.p - &self.q * &self.q * BigInt::from(self.d);
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(&self.p * &self.r, -(&self.q * &self.r), den, self.d))
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        Self::canonical(&self.p * k, &self.q * k, self.r.clone(), self.d)
    }

    pub fn div_int(&self, k: &BigInt) -> Result<Self> {
        if k.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::canonical(self.p.clone(), self.q.clone(), &self.r * k, self.d))
    }

    /// Circle distance to `0`, i.e. `min({x}, 1 - {x})`.
    pub fn circle_norm(&self) -> Self {
        let f = self.frac();
        let g = Self::one() - f.clone();
        if f <= g {
            f
        } else {
            g
        }
    }

    /// Approximation for reporting. Accurate to about `2^-64` absolute for values of modest size.
    pub fn to_f64(&self) -> f64 {
        let scale = BigInt::one() << 64u32;
        let scaled = Self::canonical(&self.p * &scale, &self.q * &scale, self.r.clone(), self.d).floor();
        scaled.to_f64().unwrap_or(f64::NAN) / 18_446_744_073_709_551_616.0
    }
}

impl PartialEq for QuadraticIrrational {
    fn eq(&self, other: &Self) -> bool {
        if self.is_rational() && other.is_rational() {
            self.p == other.p && self.r == other.r
        } else {
            self.p == other.p && self.q == other.q && self.r == other.r && self.d == other.d
        }
    }
}

impl Eq for QuadraticIrrational {}

impl PartialOrd for QuadraticIrrational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.try_cmp(other).ok()
    }
}

impl Add for QuadraticIrrational {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        &self + &o
    }
}

impl Add for &QuadraticIrrational {
    type Output = QuadraticIrrational;
    fn add(self, o: Self) -> QuadraticIrrational {
        let d = self.field_or_panic(o);
        QuadraticIrrational::canonical(
            &self.p * &o.r + &o.p * &self.r,
            &self.q * &o.r + &o.q * &self.r,
            &self.r * &o.r,
            d,
        )
    }
}

impl Sub for QuadraticIrrational {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        &self - &o
    }
}

impl Sub for &QuadraticIrrational {
    type Output = QuadraticIrrational;
    fn sub(self, o: Self) -> QuadraticIrrational {
        self + &(-o.clone())
    }
}

impl Neg for QuadraticIrrational {
    type Output = Self;
    fn neg(self) -> Self {
        Self { p: -self.p, q: -self.q, r: self.r, d: self.d }
    }
}

impl Mul for QuadraticIrrational {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        &self * &o
    }
}

impl Mul for &QuadraticIrrational {
    type Output = QuadraticIrrational;
    fn mul(self, o: Self) -> QuadraticIrrational {
        let d = self.field_or_panic(o);
        QuadraticIrrational::canonical(
            &self.p * &o.p + &self.q * &o.q * BigInt::from(d),
            &self.p * &o.q + &self.q * &o.p,
            &self.r * &o.r,
            d,
        )
    }
}

impl fmt::Display for QuadraticIrrational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            if self.r.is_one() {
                write!(f, "{}", self.p)
            } else {
                write!(f, "{}/{}", self.p, self.r)
            }
        } else {
            let sign = if self.q.is_negative() { '-' } else { '+' };
            write!(f, "({} {} {}*sqrt({}))/{}", self.p, sign, self.q.abs(), self.d, self.r)
        }
    }
}

/// Parses `"p,q,r,d"`.
impl FromStr for QuadraticIrrational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::InvalidQuadratic(format!("expected p,q,r,d but got {s:?}")));
        }
        let int = |t: &str| {
            t.parse::<BigInt>()
                .map_err(|_| Error::InvalidQuadratic(format!("not an integer: {t:?}")))
        };
        let d = parts[3]
            .parse::<u64>()
            .map_err(|_| Error::InvalidQuadratic(format!("radicand must be a positive integer: {:?}", parts[3])))?;
        Self::new(int(parts[0])?, int(parts[1])?, int(parts[2])?, d)
    }
}

impl Serialize for QuadraticIrrational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(4)?;
        for v in [&self.p, &self.q, &self.r] {
            match v.to_i64() {
                Some(x) => t.serialize_element(&x)?,
                None => t.serialize_element(&v.to_string())?,
            }
        }
        t.serialize_element(&self.d)?;
        t.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum IntRepr {
    Num(i64),
    Text(String),
}

impl IntRepr {
    fn into_bigint<E: serde::de::Error>(self) -> std::result::Result<BigInt, E> {
        match self {
            IntRepr::Num(n) => Ok(n.into()),
            IntRepr::Text(s) => s.parse().map_err(|_| E::custom(format!("not an integer: {s:?}"))),
        }
    }
}

impl<'de> Deserialize<'de> for QuadraticIrrational {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let (p, q, r, d) = <(IntRepr, IntRepr, IntRepr, u64)>::deserialize(de)?;
        Self::new(p.into_bigint()?, q.into_bigint()?, r.into_bigint()?, d).map_err(D::Error::custom)
    }
}

/// A circular arc of `R/Z` with independently open or closed ends.
///
/// `lo > hi` denotes an arc that wraps through `0`. The full circle is `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    lo: QuadraticIrrational,
    hi: QuadraticIrrational,
    lo_closed: bool,
    hi_closed: bool,
}

impl Arc {
    pub fn new(
        lo: QuadraticIrrational,
        hi: QuadraticIrrational,
        lo_closed: bool,
        hi_closed: bool,
    ) -> Result<Self> {
        lo.common_field(&hi)?;
        let zero = QuadraticIrrational::zero();
        let one = QuadraticIrrational::one();
        if lo < zero || lo >= one {
            return Err(Error::InvalidArgument(format!("arc start {lo} not in [0,1)")));
        }
        if hi < zero || hi > one {
            return Err(Error::InvalidArgument(format!("arc end {hi} not in [0,1]")));
        }
        Ok(Self { lo, hi, lo_closed, hi_closed })
    }

    /// `[lo, hi]`
    pub fn closed(lo: QuadraticIrrational, hi: QuadraticIrrational) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    /// `[lo, hi)`
    pub fn half_open(lo: QuadraticIrrational, hi: QuadraticIrrational) -> Result<Self> {
        Self::new(lo, hi, true, false)
    }

    pub fn full() -> Self {
        Self {
            lo: QuadraticIrrational::zero(),
            hi: QuadraticIrrational::one(),
            lo_closed: true,
            hi_closed: false,
        }
    }

    pub fn lo(&self) -> &QuadraticIrrational {
        &self.lo
    }

    pub fn hi(&self) -> &QuadraticIrrational {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_wrapping(&self) -> bool {
        self.lo > self.hi
    }

    pub fn length(&self) -> QuadraticIrrational {
        if self.is_wrapping() {
            QuadraticIrrational::one() - self.lo.clone() + self.hi.clone()
        } else {
            &self.hi - &self.lo
        }
    }

    /// Exact membership of a point of `[0, 1)`. Points outside are reduced mod 1 first.
    pub fn contains(&self, x: &QuadraticIrrational) -> bool {
        let zero = QuadraticIrrational::zero();
        let one = QuadraticIrrational::one();
        let reduced;
        let x = if *x < zero || *x >= one {
            reduced = x.frac();
            &reduced
        } else {
            x
        };
        let after_lo = match x.try_cmp(&self.lo).expect("point and arc in different fields") {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let before_hi = match x.try_cmp(&self.hi).expect("point and arc in different fields") {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        if self.is_wrapping() {
            after_lo || before_hi
        } else {
            after_lo && before_hi
        }
    }
}

/// Exact arc membership, `x` taken mod 1.
pub fn in_arc(x: &QuadraticIrrational, arc: &Arc) -> bool {
    arc.contains(x)
}
