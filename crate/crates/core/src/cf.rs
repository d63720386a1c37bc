//! Continued fractions of quadratic irrationals, convergents, and the
//! empirical badly-approximable constant `min_k k * ||k phi||`.

use std::cmp::Ordering;
use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, Pt};
use crate::quad::QuadraticIrrational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodicTail {
    pub start: usize,
    pub len: usize,
}

/// `[a0; a1, a2, ...]`, optionally with a detected periodic tail.
///
/// When `periodic_tail` is present the stored quotients cover exactly one
/// pre-period plus one period, and [`ContinuedFraction::term`] extends them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuedFraction {
    pub partial_quotients: Vec<BigInt>,
    pub periodic_tail: Option<PeriodicTail>,
}

impl ContinuedFraction {
    /// The `i`-th partial quotient, following the period when one is known.
    pub fn term(&self, i: usize) -> Option<&BigInt> {
        if i < self.partial_quotients.len() {
            return self.partial_quotients.get(i);
        }
        let tail = self.periodic_tail?;
        let idx = tail.start + (i - tail.start) % tail.len;
        self.partial_quotients.get(idx)
    }

    /// Number of quotients available (unbounded when periodic).
    pub fn depth(&self) -> Option<usize> {
        match self.periodic_tail {
            Some(_) => None,
            None => Some(self.partial_quotients.len()),
        }
    }

    /// Largest quotient `a_i` with `i >= 1`, over the stored range.
    pub fn max_partial_quotient(&self) -> Option<&BigInt> {
        self.partial_quotients.iter().skip(1).max()
    }

    /// Bounded partial quotients certify badly approximable numbers. Only a
    /// detected period gives a certificate; otherwise the answer is unknown.
    pub fn is_badly_approximable(&self) -> Option<bool> {
        self.periodic_tail.map(|_| true)
    }
}

/// Expands `x` with the classical surd algorithm on states `(P, Q)`,
/// `x_i = (P_i + sqrt(D)) / Q_i`, stopping when a state repeats.
pub fn cf_expand(x: &QuadraticIrrational, max_depth: usize) -> Result<ContinuedFraction> {
    if x.is_rational() {
        return Err(Error::RationalInput);
    }
    let (mut p, mut q) = if x.q().is_positive() {
        (x.p().clone(), x.r().clone())
    } else {
        (-x.p(), -x.r())
    };
    let mut disc = x.q() * x.q() * BigInt::from(x.d());
    if !(&disc - &p * &p).is_multiple_of(&q) {
        let qa = q.abs();
        p *= &qa;
        disc *= &q * &q;
        q *= &qa;
    }
    let s = disc.sqrt();

    let mut seen: HashMap<(BigInt, BigInt), usize> = HashMap::new();
    let mut quotients = Vec::new();
    let mut tail = None;
    for i in 0..max_depth {
        if let Some(&j) = seen.get(&(p.clone(), q.clone())) {
            tail = Some(PeriodicTail { start: j, len: i - j });
            break;
        }
        seen.insert((p.clone(), q.clone()), i);
        let a = if q.is_positive() {
            (&p + &s).div_floor(&q)
        } else {
            (&p + &s + BigInt::one()).div_floor(&q)
        };
        let p_next = &a * &q - &p;
        let q_next = (&disc - &p_next * &p_next) / &q;
        quotients.push(a);
        p = p_next;
        q = q_next;
    }
    Ok(ContinuedFraction { partial_quotients: quotients, periodic_tail: tail })
}

/// Convergents `p_0/q_0, ..., p_n/q_n` from `p_k = a_k p_{k-1} + p_{k-2}`.
pub fn convergents(cf: &ContinuedFraction, n: usize) -> Result<Vec<(BigInt, BigInt)>> {
    let mut out = Vec::with_capacity(n + 1);
    let (mut p2, mut q2) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    for i in 0..=n {
        let a = cf.term(i).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "convergent {i} requested but only {} partial quotients are known",
                cf.partial_quotients.len()
            ))
        })?;
        let p = a * &p1 + &p2;
        let q = a * &q1 + &q2;
        out.push((p.clone(), q.clone()));
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    Ok(out)
}

/// Result of scanning `k * ||k phi||` for `1 <= k <= k_max`.
#[derive(Clone, Debug)]
pub struct BadlyConstant {
    /// Exact minimum of `k * ||k phi||` over the scanned range.
    pub c_est: QuadraticIrrational,
    /// Rational lower bound on `c_est`, within `2^-64`.
    pub c_lower: BigRational,
    pub argmin_k: u64,
    /// `ceil(1 / c_est)`.
    pub d: u64,
    /// Successive strict record minima `(k, k * ||k phi||)` as `k` increases.
    pub records: Vec<(u64, QuadraticIrrational)>,
}

impl BadlyConstant {
    pub fn c_est_f64(&self) -> f64 {
        self.c_est.to_f64()
    }
}

/// Scans `k * dist({k phi}, 0)` exactly and returns the minimum with its record history.
pub fn badly_constant_scan(phi: &QuadraticIrrational, k_max: u64) -> Result<BadlyConstant> {
    if phi.is_rational() {
        return Err(Error::RationalInput);
    }
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let frame = Frame::for_values([phi])?;
    let mut orbit = frame.orbit(Pt::Small(0, 0), frame.embed(phi));
    let mut best: Option<Pt> = None;
    let mut records: Vec<(u64, Pt)> = Vec::new();
    for k in 1..=k_max {
        orbit.advance();
        let pos = orbit.pos();
        let norm = if frame.cmp(&pos.scale(2), frame.one()) == Ordering::Greater {
            frame.one().sub(pos)
        } else {
            pos.clone()
        };
        let value = norm.scale(k as i64);
        let is_record = match &best {
            None => true,
            Some(b) => frame.cmp(&value, b) == Ordering::Less,
        };
        if is_record {
            records.push((k, value.clone()));
            best = Some(value);
        }
    }
    let records: Vec<(u64, QuadraticIrrational)> =
        records.into_iter().map(|(k, v)| (k, frame.lift(&v))).collect();
    let (argmin_k, c_est) = records.last().cloned().expect("k_max >= 1");
    let scale = BigInt::one() << 64u32;
    let c_lower = BigRational::new(c_est.mul_int(&scale).floor(), scale);
    let d = c_est.recip()?.ceil().to_u64().unwrap_or(u64::MAX);
    Ok(BadlyConstant { c_est, c_lower, argmin_k, d, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, qq: i64, r: i64, d: u64) -> QuadraticIrrational {
        QuadraticIrrational::from_i64(p, qq, r, d).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn golden_ratio_is_all_ones() {
        let cf = cf_expand(&q(1, 1, 2, 5), 8).unwrap();
        assert_eq!(cf.partial_quotients, ints(&[1]));
        assert_eq!(cf.periodic_tail, Some(PeriodicTail { start: 0, len: 1 }));
        let c = convergents(&cf, 4).unwrap();
        let expect = [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)];
        for ((p, qq), (ep, eq)) in c.iter().zip(expect) {
            assert_eq!((p, qq), (&BigInt::from(ep), &BigInt::from(eq)));
        }
        assert_eq!(convergents(&cf, 0).unwrap(), vec![(BigInt::one(), BigInt::one())]);
    }

    #[test]
    fn three_minus_sqrt5() {
        let cf = cf_expand(&q(3, -1, 1, 5), 32).unwrap();
        assert_eq!(cf.partial_quotients, ints(&[0, 1, 3, 4]));
        assert_eq!(cf.periodic_tail, Some(PeriodicTail { start: 3, len: 1 }));
        assert_eq!(cf.is_badly_approximable(), Some(true));
        let c = convergents(&cf, 5).unwrap();
        let qs: Vec<i64> = c.iter().map(|(_, d)| d.to_i64().unwrap()).collect();
        assert_eq!(qs, vec![1, 1, 4, 17, 72, 305]);
    }

    #[test]
    fn negative_and_unreduced_inputs() {
        // -(3 - sqrt5) = -1 + (sqrt5 - 2)  and  sqrt5 - 2 = [0; 4, 4, ...]
        let cf = cf_expand(&q(-3, 1, 1, 5), 16).unwrap();
        assert_eq!(cf.partial_quotients, ints(&[-1, 4]));
        assert_eq!(cf.periodic_tail, Some(PeriodicTail { start: 1, len: 1 }));
        // sqrt(7)/3 needs the Q | D - P^2 fix-up
        let cf = cf_expand(&q(0, 1, 3, 7), 64).unwrap();
        assert!(cf.periodic_tail.is_some());
        assert_eq!(cf.term(0), Some(&BigInt::zero()));
    }

    #[test]
    fn rational_rejected_and_depth_limit() {
        assert!(matches!(cf_expand(&q(1, 0, 2, 5), 4), Err(Error::RationalInput)));
        let cf = cf_expand(&q(0, 1, 1, 94), 3).unwrap();
        assert!(cf.periodic_tail.is_none());
        assert_eq!(cf.partial_quotients.len(), 3);
        assert!(convergents(&cf, 3).is_err());
    }

    #[test]
    fn badly_constant_small_cases() {
        let phi = q(3, -1, 1, 5);
        let one = badly_constant_scan(&phi, 1).unwrap();
        assert_eq!(one.argmin_k, 1);
        assert_eq!(one.c_est, q(-2, 1, 1, 5));
        let scan = badly_constant_scan(&phi, 1000).unwrap();
        assert_eq!(scan.argmin_k, 4);
        assert_eq!(scan.d, 5);
        assert!(scan.c_est_f64() > 0.2229 && scan.c_est_f64() < 0.2230);
        assert!(badly_constant_scan(&phi, 0).is_err());
    }
}
