//! Hitting counts of the accelerated rotation `x_i = x0 + i k phi` in a long
//! arc, and the `k ||k phi||` lower bound for badly approximable `phi`.

use std::cmp::Ordering;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cf::{badly_constant_scan, cf_expand, convergents};
use crate::error::{Error, Result};
use crate::frame::{Frame, Pt};
use crate::quad::{Arc, QuadraticIrrational};
use crate::report;
use crate::word::{RotationWord, Word};

type Quad = QuadraticIrrational;

/// Which coordinates the orbit is followed in.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameMode {
    /// The arc and orbit as given.
    #[default]
    Original,
    /// Reflected so that the step lies in `(0, 1/2)` and rotated so that the
    /// arc contains `[1/2, 1)`. Hit counts are identical to the original frame.
    Proof,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingResult {
    pub k: u64,
    pub d: u64,
    /// `#{1 <= i <= dk : x_i in P}`
    pub hits: u64,
    /// `k d / 6`
    pub bound: f64,
    pub pass: bool,
    /// `n` with `z in (1/(n+1), 1/n)`, where `z = min({k phi}, 1 - {k phi})`.
    pub n_bracket: u64,
    pub case_id: u8,
    /// `{k phi} > 1/2`, handled by reflection.
    pub reflected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HittingScan {
    pub results: Vec<HittingResult>,
    /// Smallest `k` in the range from which every result passes.
    pub threshold_k: Option<u64>,
    /// `min hits / k` over the range.
    pub empirical_r: f64,
    pub d: u64,
}

impl HittingScan {
    /// Rows `k,n_bracket,case_id,hits,bound,pass`.
    pub fn to_csv(&self) -> String {
        let rows = self.results.iter().map(|r| {
            vec![
                r.k.to_string(),
                r.n_bracket.to_string(),
                r.case_id.to_string(),
                r.hits.to_string(),
                report::real(r.bound),
                r.pass.to_string(),
            ]
        });
        report::csv(&["k", "n_bracket", "case_id", "hits", "bound", "pass"], rows)
    }
}

fn half() -> Quad {
    Quad::rational(1, 2).expect("1/2")
}

fn check_long_arc(p: &Arc) -> Result<()> {
    if p.length() < half() {
        return Err(Error::Hypothesis(format!(
            "the arc must have length at least 1/2, got {:.6}",
            p.length().to_f64()
        )));
    }
    Ok(())
}

/// Image of `p` under `x -> s x + t` with `s = +-1`.
fn map_arc(p: &Arc, reflect: bool, t: &Quad) -> Result<Arc> {
    if p.length() == Quad::one() {
        return Ok(Arc::full());
    }
    let one = Quad::one();
    let image = |x: &Quad| if reflect { (t - x).frac() } else { (x + t).frac() };
    let (lo, hi, lc, hc) = if reflect {
        (image(p.hi()), image(p.lo()), p.hi_closed(), p.lo_closed())
    } else {
        (image(p.lo()), image(p.hi()), p.lo_closed(), p.hi_closed())
    };
    // an upper end at 0 is the point 1 approached from below
    let hi = if hi == Quad::zero() { one } else { hi };
    Arc::new(lo, hi, lc, hc)
}

/// True when `p` contains `[1/2, 1)`.
fn contains_upper_half(p: &Arc) -> bool {
    let h = half();
    let lo_ok = match p.lo().try_cmp(&h).unwrap_or(Ordering::Greater) {
        Ordering::Less => true,
        Ordering::Equal => p.lo_closed(),
        Ordering::Greater => false,
    };
    lo_ok && (p.is_wrapping() || *p.hi() == Quad::one())
}

struct Setup {
    x0: Quad,
    step: Quad,
    arc: Arc,
    n_bracket: u64,
    case_id: u8,
    reflected: bool,
}

fn setup(phi: &Quad, x0: &Quad, k: u64, d: u64, p: &Arc, mode: FrameMode) -> Result<Setup> {
    if phi.is_rational() {
        return Err(Error::RationalInput);
    }
    if k == 0 || d == 0 {
        return Err(Error::InvalidArgument("k and d must be at least 1".into()));
    }
    check_long_arc(p)?;
    let step = phi.mul_int(&BigInt::from(k)).frac();
    let reflected = step > half();
    let z = if reflected { Quad::one() - step.clone() } else { step.clone() };
    let n_bracket = z.recip()?.floor().to_u64().unwrap_or(u64::MAX);
    let dk = d.saturating_mul(k);
    let case_id = if n_bracket <= 4 {
        3
    } else if 2 * n_bracket + 2 <= dk {
        1
    } else {
        2
    };
    let (x0, step, arc) = match mode {
        FrameMode::Original => (x0.frac(), step, p.clone()),
        FrameMode::Proof => {
            let zero = Quad::zero();
            let r = map_arc(p, reflected, &zero)?;
            let t = (Quad::one() - r.hi().clone()).frac();
            let arc = map_arc(&r, false, &t)?;
            let x0 = if reflected { (t.clone() - x0.clone()).frac() } else { (x0 + &t).frac() };
            (x0, z, arc)
        }
    };
    Ok(Setup { x0, step, arc, n_bracket, case_id, reflected })
}

/// Membership of `x_1, ..., x_{dk}` in the arc of the chosen frame.
pub fn hitting_trace(phi: &Quad, x0: &Quad, k: u64, d: u64, p: &Arc, mode: FrameMode) -> Result<Vec<bool>> {
    let s = setup(phi, x0, k, d, p, mode)?;
    let w = RotationWord::new(s.step, s.x0, s.arc)?;
    Ok(w.fill(1, (d * k) as usize).into_iter().map(|b| b == 0).collect())
}

/// Counts the `i in 1..=dk` with `x_i in P` exactly.
pub fn hitting_count(phi: &Quad, x0: &Quad, k: u64, d: u64, p: &Arc) -> Result<HittingResult> {
    hitting_count_in(phi, x0, k, d, p, FrameMode::Original)
}

pub fn hitting_count_in(phi: &Quad, x0: &Quad, k: u64, d: u64, p: &Arc, mode: FrameMode) -> Result<HittingResult> {
    let s = setup(phi, x0, k, d, p, mode)?;
    let (n_bracket, case_id, reflected) = (s.n_bracket, s.case_id, s.reflected);
    let w = RotationWord::new(s.step, s.x0, s.arc)?;
    let hits = w.fill(1, (d * k) as usize).iter().filter(|&&b| b == 0).count() as u64;
    let bound = (k * d) as f64 / 6.0;
    Ok(HittingResult { k, d, hits, bound, pass: hits as f64 >= bound, n_bracket, case_id, reflected })
}

/// For a case-3 step in a frame whose arc contains `[1/2, 1)`, checks that
/// every four consecutive orbit points include a hit. `None` when the
/// preconditions do not hold in the chosen frame.
pub fn case3_window_check(phi: &Quad, x0: &Quad, k: u64, d: u64, p: &Arc, mode: FrameMode) -> Result<Option<bool>> {
    let s = setup(phi, x0, k, d, p, mode)?;
    let fifth = Quad::rational(1, 5)?;
    let applies = s.case_id == 3 && s.step > fifth && s.step < half() && contains_upper_half(&s.arc);
    if !applies {
        return Ok(None);
    }
    let w = RotationWord::new(s.step, s.x0, s.arc)?;
    let trace: Vec<bool> = w.fill(0, (d * k) as usize + 1).into_iter().map(|b| b == 0).collect();
    Ok(Some(trace.windows(4).all(|win| win.iter().any(|&h| h))))
}

/// [`hitting_count`] for every `k` in `k_range`, in parallel, sorted by `k`.
pub fn hitting_scan(phi: &Quad, x0: &Quad, p: &Arc, k_range: RangeInclusive<u64>, d: u64) -> Result<HittingScan> {
    if k_range.is_empty() {
        return Err(Error::InvalidArgument("empty k range".into()));
    }
    let ks: Vec<u64> = k_range.collect();
    let results = ks.par_iter().map(|&k| hitting_count(phi, x0, k, d, p)).collect::<Result<Vec<_>>>()?;
    let threshold_k = match results.iter().rposition(|r| !r.pass) {
        None => Some(results[0].k),
        Some(i) if i + 1 < results.len() => Some(results[i + 1].k),
        Some(_) => None,
    };
    let empirical_r = results.iter().map(|r| r.hits as f64 / r.k as f64).fold(f64::INFINITY, f64::min);
    Ok(HittingScan { results, threshold_k, empirical_r, d })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub k_max: u64,
    pub c_est: Quad,
    pub c_est_f64: f64,
    pub argmin_k: u64,
    pub d: u64,
    /// `k ||k phi|| >= c_est` for every `k`, strictly away from the minimizers.
    pub holds: bool,
    /// The three smallest `(k, k ||k phi||)`.
    pub smallest: Vec<(u64, f64)>,
    /// Strict record minima as `k` increases.
    pub records: Vec<(u64, f64)>,
    pub convergent_denominators: Vec<u64>,
    pub records_at_convergents: bool,
}

/// Checks `||k phi|| >= c_est / k` for `k <= k_max` and locates the record minima.
pub fn lemma_bound_check(phi: &Quad, k_max: u64) -> Result<LemmaReport> {
    let scan = badly_constant_scan(phi, k_max)?;
    let frame = Frame::for_values([phi, &scan.c_est])?;
    let c = frame.embed(&scan.c_est);
    let fphi = frame.embed(phi);
    let mut orbit = frame.orbit(Pt::Small(0, 0), fphi);
    let mut holds = true;
    let mut smallest: Vec<(u64, Pt)> = Vec::with_capacity(4);
    for k in 1..=k_max {
        orbit.advance();
        let pos = orbit.pos();
        let norm = if frame.cmp(&pos.scale(2), frame.one()) == Ordering::Greater { frame.one().sub(pos) } else { pos.clone() };
        let v = norm.scale(k as i64);
        match frame.cmp(&v, &c) {
            Ordering::Less => holds = false,
            Ordering::Equal if k != scan.argmin_k => {
                // ties are possible only at the minimizer for irrational phi
                holds = false;
            }
            _ => {}
        }
        if smallest.len() < 3 || frame.cmp(&v, &smallest[smallest.len() - 1].1) == Ordering::Less {
            let at = smallest.iter().position(|(_, s)| frame.cmp(&v, s) == Ordering::Less).unwrap_or(smallest.len());
            smallest.insert(at, (k, v));
            smallest.truncate(3);
        }
    }
    let cf = cf_expand(phi, 256)?;
    let depth = match cf.depth() {
        Some(n) => n.saturating_sub(1),
        None => 200,
    };
    let mut denominators: Vec<u64> = Vec::new();
    for (_, q) in convergents(&cf, depth)? {
        match q.to_u64() {
            Some(q) if q <= k_max => {
                if !denominators.contains(&q) {
                    denominators.push(q);
                }
            }
            _ => break,
        }
    }
    let records_at_convergents = scan.records.iter().all(|(k, _)| denominators.contains(k));
    Ok(LemmaReport {
        k_max,
        c_est_f64: scan.c_est.to_f64(),
        c_est: scan.c_est,
        argmin_k: scan.argmin_k,
        d: scan.d,
        holds,
        smallest: smallest.into_iter().map(|(k, v)| (k, frame.to_f64(&v))).collect(),
        records: scan.records.iter().map(|(k, v)| (*k, v.to_f64())).collect(),
        convergent_denominators: denominators,
        records_at_convergents,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn phi() -> Quad {
        Quad::from_i64(3, -1, 1, 5).unwrap()
    }

    fn forbidden_arc() -> Arc {
        Arc::closed(Quad::one() - phi(), phi()).unwrap()
    }

    #[test]
    fn full_circle_hits_everything() {
        let r = hitting_count(&phi(), &Quad::zero(), 7, 3, &Arc::full()).unwrap();
        assert_eq!(r.hits, 21);
    }

    #[test]
    fn short_arc_rejected() {
        let p = Arc::half_open(Quad::zero(), Quad::rational(2, 5).unwrap()).unwrap();
        assert!(matches!(hitting_count(&phi(), &Quad::zero(), 3, 5, &p), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn proof_frame_preserves_counts() {
        let x0 = Quad::from_i64(0, 1, 7, 5).unwrap().frac();
        for k in 1..60 {
            let a = hitting_count_in(&phi(), &x0, k, 5, &forbidden_arc(), FrameMode::Original).unwrap();
            let b = hitting_count_in(&phi(), &x0, k, 5, &forbidden_arc(), FrameMode::Proof).unwrap();
            assert_eq!(a, b, "k = {k}");
            let ta = hitting_trace(&phi(), &x0, k, 5, &forbidden_arc(), FrameMode::Original).unwrap();
            let tb = hitting_trace(&phi(), &x0, k, 5, &forbidden_arc(), FrameMode::Proof).unwrap();
            assert_eq!(ta, tb);
        }
    }

    #[test]
    fn case_three_windows() {
        let mut seen = 0;
        for k in 1..200 {
            if let Some(ok) = case3_window_check(&phi(), &Quad::zero(), k, 5, &forbidden_arc(), FrameMode::Proof).unwrap() {
                assert!(ok, "k = {k}");
                seen += 1;
            }
        }
        assert!(seen > 0);
    }

    #[test]
    fn lemma_records_at_convergents() {
        let r = lemma_bound_check(&phi(), 10_000).unwrap();
        assert!(r.holds);
        assert_eq!(r.argmin_k, 4);
        assert!(r.records_at_convergents);
        assert_eq!(r.smallest[0].0, 4);
        let golden = Quad::from_i64(-1, 1, 2, 5).unwrap();
        let g = lemma_bound_check(&golden, 1000).unwrap();
        assert!(g.records_at_convergents);
        assert!(lemma_bound_check(&Quad::rational(1, 3).unwrap(), 10).is_err());
    }
}
