//! Fixed-denominator circle points for hot loops.
//!
//! A [`Frame`] fixes a radicand `d` and a common denominator `D`; a point is
//! stored as the integer pair `(a, b)` meaning `(a + b*sqrt(d)) / D`. Orbit
//! steps are then two integer additions plus one conditional subtraction, and
//! comparisons are sign tests on `a + b*sqrt(d)`. Coordinates live in `i128`
//! and silently promote to `BigInt` when an operation would overflow, so the
//! results are exact for every input size.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{ToPrimitive, Zero};

use crate::error::Result;
use crate::quad::{surd_sign, Arc, QuadraticIrrational};

/// A point of `Q(sqrt(d))` scaled by the frame denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Pt {
    Small(i128, i128),
    Big(BigInt, BigInt),
}

impl Pt {
    fn big(&self) -> (BigInt, BigInt) {
        match self {
            Pt::Small(a, b) => (BigInt::from(*a), BigInt::from(*b)),
            Pt::Big(a, b) => (a.clone(), b.clone()),
        }
    }

    fn from_big(a: BigInt, b: BigInt) -> Pt {
        match (a.to_i128(), b.to_i128()) {
            // keep headroom so that sums of two small points never overflow silently
            (Some(x), Some(y)) if x.unsigned_abs() < 1 << 124 && y.unsigned_abs() < 1 << 124 => {
                Pt::Small(x, y)
            }
            _ => Pt::Big(a, b),
        }
    }

    #[inline]
    pub fn add(&self, o: &Pt) -> Pt {
        if let (Pt::Small(a, b), Pt::Small(c, e)) = (self, o) {
            if let (Some(x), Some(y)) = (a.checked_add(*c), b.checked_add(*e)) {
                return Pt::Small(x, y);
            }
        }
        let (a, b) = self.big();
        let (c, e) = o.big();
        Pt::from_big(a + c, b + e)
    }

    #[inline]
    pub fn sub(&self, o: &Pt) -> Pt {
        if let (Pt::Small(a, b), Pt::Small(c, e)) = (self, o) {
            if let (Some(x), Some(y)) = (a.checked_sub(*c), b.checked_sub(*e)) {
                return Pt::Small(x, y);
            }
        }
        let (a, b) = self.big();
        let (c, e) = o.big();
        Pt::from_big(a - c, b - e)
    }

    pub fn scale(&self, k: i64) -> Pt {
        if let Pt::Small(a, b) = self {
            if let (Some(x), Some(y)) = (a.checked_mul(k as i128), b.checked_mul(k as i128)) {
                return Pt::Small(x, y);
            }
        }
        let (a, b) = self.big();
        Pt::from_big(a * k, b * k)
    }

    pub fn neg(&self) -> Pt {
        Pt::Small(0, 0).sub(self)
    }
}

#[inline]
fn small_sign(a: i128, b: i128, d: i128) -> Option<Ordering> {
    if a >= 0 && b >= 0 {
        return Some(if a == 0 && b == 0 { Ordering::Equal } else { Ordering::Greater });
    }
    if a <= 0 && b <= 0 {
        return Some(Ordering::Less);
    }
    let a2 = a.checked_mul(a)?;
    let b2 = b.checked_mul(b)?.checked_mul(d)?;
    Some(if a > 0 { a2.cmp(&b2) } else { b2.cmp(&a2) })
}

/// Common representation for a set of field elements.
#[derive(Clone, Debug)]
pub struct Frame {
    d: u64,
    denom: BigInt,
    one: Pt,
}

impl Frame {
    /// Smallest frame holding every value in `values`.
    pub fn for_values<'a>(values: impl IntoIterator<Item = &'a QuadraticIrrational>) -> Result<Self> {
        let mut d: Option<u64> = None;
        let mut denom = BigInt::from(1);
        for v in values {
            if !v.is_rational() {
                match d {
                    None => d = Some(v.d()),
                    Some(e) if e != v.d() => {
                        return Err(crate::error::Error::IncompatibleRadicands(e, v.d()))
                    }
                    _ => {}
                }
            }
            denom = denom.lcm(v.r());
        }
        let one = Pt::from_big(denom.clone(), BigInt::zero());
        Ok(Self { d: d.unwrap_or(1), denom, one })
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    /// The point `1`.
    pub fn one(&self) -> &Pt {
        &self.one
    }

    /// Coordinates of `x`. Panics if `x` is not representable in this frame.
    pub fn embed(&self, x: &QuadraticIrrational) -> Pt {
        assert!(x.is_rational() || x.d() == self.d, "value {x} outside frame sqrt({})", self.d);
        let (factor, rem) = self.denom.div_rem(x.r());
        assert!(rem.is_zero(), "denominator of {x} does not divide frame denominator");
        Pt::from_big(x.p() * &factor, x.q() * &factor)
    }

    pub fn lift(&self, pt: &Pt) -> QuadraticIrrational {
        let (a, b) = pt.big();
        QuadraticIrrational::new(a, b, self.denom.clone(), self.d).expect("frame values are valid")
    }

    /// Sign of the value of `pt`.
    #[inline]
    pub fn sign(&self, pt: &Pt) -> Ordering {
        if let Pt::Small(a, b) = pt {
            if let Some(s) = small_sign(*a, *b, self.d as i128) {
                return s;
            }
        }
        let (a, b) = pt.big();
        surd_sign(&a, &b, self.d)
    }

    #[inline]
    pub fn cmp(&self, x: &Pt, y: &Pt) -> Ordering {
        self.sign(&x.sub(y))
    }

    /// `floor` of the value of `pt`.
    pub fn floor(&self, pt: &Pt) -> BigInt {
        if let (Pt::Small(a, b), Some(den)) = (pt, self.denom.to_i128()) {
            if let Some(s) = floor_b_sqrt_d(*b, self.d) {
                if let Some(num) = a.checked_add(s) {
                    return BigInt::from(Integer::div_floor(&num, &den));
                }
            }
        }
        self.lift(pt).floor()
    }

    /// Fractional part of the value of `pt`, as a point in `[0, 1)`.
    pub fn reduce(&self, pt: &Pt) -> Pt {
        let f = self.floor(pt);
        if f.is_zero() {
            return pt.clone();
        }
        let shift = Pt::from_big(&f * &self.denom, BigInt::zero());
        pt.sub(&shift)
    }

    pub fn to_f64(&self, pt: &Pt) -> f64 {
        self.lift(pt).to_f64()
    }

    pub fn arc(&self, arc: &Arc) -> FrameArc {
        let lo = self.embed(arc.lo());
        let hi = self.embed(arc.hi());
        let wrapping = self.cmp(&lo, &hi) == Ordering::Greater;
        FrameArc { lo, hi, lo_closed: arc.lo_closed(), hi_closed: arc.hi_closed(), wrapping }
    }

    #[inline]
    pub fn contains(&self, arc: &FrameArc, x: &Pt) -> bool {
        let after_lo = match self.cmp(x, &arc.lo) {
            Ordering::Greater => true,
            Ordering::Equal => arc.lo_closed,
            Ordering::Less => false,
        };
        if !arc.wrapping && !after_lo {
            return false;
        }
        if arc.wrapping && after_lo {
            return true;
        }
        match self.cmp(x, &arc.hi) {
            Ordering::Less => true,
            Ordering::Equal => arc.hi_closed,
            Ordering::Greater => false,
        }
    }

    /// Cursor over `start, start + step, start + 2 step, ...` reduced mod 1.
    pub fn orbit(&self, start: Pt, step: Pt) -> Orbit<'_> {
        let pos = self.reduce(&start);
        let step = self.reduce(&step);
        Orbit { frame: self, pos, step }
    }
}

/// `floor(b * sqrt(d))` in machine integers, `None` on overflow.
fn floor_b_sqrt_d(b: i128, d: u64) -> Option<i128> {
    if b == 0 {
        return Some(0);
    }
    let n = (b.unsigned_abs()).checked_mul(b.unsigned_abs())?.checked_mul(d as u128)?;
    let s = Roots::sqrt(&n);
    let s = i128::try_from(s).ok()?;
    Some(if b > 0 {
        s
    } else if (s as u128) * (s as u128) == n {
        -s
    } else {
        -s - 1
    })
}

/// An [`Arc`] with endpoints embedded in a [`Frame`].
#[derive(Clone, Debug)]
pub struct FrameArc {
    lo: Pt,
    hi: Pt,
    lo_closed: bool,
    hi_closed: bool,
    wrapping: bool,
}

/// Exact rotation orbit on the circle.
#[derive(Clone, Debug)]
pub struct Orbit<'f> {
    frame: &'f Frame,
    pos: Pt,
    step: Pt,
}

impl Orbit<'_> {
    pub fn pos(&self) -> &Pt {
        &self.pos
    }

    #[inline]
    pub fn advance(&mut self) {
        let next = self.pos.add(&self.step);
        self.pos = if self.frame.cmp(&next, &self.frame.one) != Ordering::Less {
            next.sub(&self.frame.one)
        } else {
            next
        };
    }
}
