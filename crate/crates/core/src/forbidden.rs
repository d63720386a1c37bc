//! Forbidden distances and the zero-run bound.
//!
//! For `phi` in `(1/2, 1)` the Sturmian words of `phi` are exactly the words
//! with no run of `m` zeros and no two 1's at a distance `k` with
//! `{k phi}` in the closed arc `[1 - phi, phi]`.

use std::sync::{Arc as Shared, RwLock};

use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, FrameArc, Pt};
use crate::quad::{Arc, QuadraticIrrational};
use crate::word::{check_unit_irrational, Convention, SturmianWord, Word};

const TABLE_CHUNK: usize = 1 << 16;

#[derive(Debug)]
pub struct ForbiddenModel {
    phi: QuadraticIrrational,
    zero_run_m: usize,
    arc: Arc,
    frame: Frame,
    fphi: Pt,
    farc: FrameArc,
    table: RwLock<Shared<Vec<bool>>>,
}

impl Clone for ForbiddenModel {
    fn clone(&self) -> Self {
        let table = self.table.read().expect("table lock").clone();
        Self {
            phi: self.phi.clone(),
            zero_run_m: self.zero_run_m,
            arc: self.arc.clone(),
            frame: self.frame.clone(),
            fphi: self.fphi.clone(),
            farc: self.farc.clone(),
            table: RwLock::new(table),
        }
    }
}

/// Outcome of the zero-run scan.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZeroRunScan {
    pub m: usize,
    pub max_run: usize,
    /// Distinct distances between consecutive 1's, ascending.
    pub gaps: Vec<usize>,
    /// Gap set and longest run agree between the first half of the scan and the whole scan.
    pub stable: bool,
    pub scan_n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Pair,
    ZeroRun,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Left end of the offending pair or run.
    pub position: i64,
    /// Pair distance, or run length for zero runs.
    pub distance: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub k: u64,
    /// Position `n` of the left 1 of a pair at distance `k`.
    pub position: i64,
}

/// Result of checking a word against the pattern-absence characterization.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacterizationReport {
    /// First recorded violations (at most [`MAX_RECORDED`]).
    pub violations: Vec<Violation>,
    pub violation_count: u64,
    /// Allowed distances `k <= k_max` with no witness in the window.
    pub unrealized: Vec<u64>,
    pub witnesses: Vec<Witness>,
    pub m: usize,
    pub k_max: u64,
    pub word_len: usize,
    pub note: Option<String>,
}

pub const MAX_RECORDED: usize = 1000;

impl CharacterizationReport {
    pub fn absence_holds(&self) -> bool {
        self.violation_count == 0
    }
}

impl ForbiddenModel {
    /// Builds the model for `phi` in `(1/2, 1)`. `m` is found by scanning the
    /// word and checked against `ceil(1 / (1 - phi))`.
    pub fn new(phi: &QuadraticIrrational) -> Result<Self> {
        check_unit_irrational(phi)?;
        let half = QuadraticIrrational::rational(1, 2)?;
        if *phi <= half {
            return Err(Error::Hypothesis(format!(
                "phi = {phi} must lie in (1/2, 1); for phi < 1/2 exchange the roles of 0 and 1"
            )));
        }
        let one_minus = QuadraticIrrational::one() - phi.clone();
        let arc = Arc::closed(one_minus.clone(), phi.clone())?;
        let frame = Frame::for_values([phi])?;
        let fphi = frame.embed(phi);
        let farc = frame.arc(&arc);
        let mut model = Self {
            phi: phi.clone(),
            zero_run_m: 0,
            arc,
            frame,
            fphi,
            farc,
            table: RwLock::new(Shared::new(vec![false])),
        };
        let closed_form = one_minus.recip()?.ceil().to_usize().unwrap_or(usize::MAX);
        let scan_n = (1usize << 16).max(closed_form.saturating_mul(128));
        let scan = model.zero_run_bound(scan_n)?;
        if scan.m != closed_form || !scan.stable {
            return Err(Error::Internal(format!(
                "zero-run scan gave m = {} (stable: {}), expected {closed_form}",
                scan.m, scan.stable
            )));
        }
        model.zero_run_m = scan.m;
        Ok(model)
    }

    pub fn phi(&self) -> &QuadraticIrrational {
        &self.phi
    }

    pub fn zero_run_m(&self) -> usize {
        self.zero_run_m
    }

    /// The closed arc `[1 - phi, phi]`.
    pub fn arc(&self) -> &Arc {
        &self.arc
    }

    /// Exact test of `{k phi}` in `[1 - phi, phi]`.
    pub fn is_forbidden_distance(&self, k: i64) -> Result<bool> {
        if k <= 0 {
            return Err(Error::InvalidArgument(format!("distance k = {k} must be positive")));
        }
        Ok(self.forbidden_unchecked(k))
    }

    fn forbidden_unchecked(&self, k: i64) -> bool {
        let pt = self.frame.reduce(&self.fphi.scale(k));
        self.frame.contains(&self.farc, &pt)
    }

    pub fn forbidden_set(&self, k_max: u64) -> Result<Vec<u64>> {
        if k_max == 0 {
            return Err(Error::InvalidArgument("k_max must be at least 1".into()));
        }
        let t = self.table(k_max as usize);
        Ok((1..=k_max).filter(|&k| t[k as usize]).collect())
    }

    /// `table[t]` is true iff `t >= 1` is forbidden, for `t <= t_max` at least.
    /// The table is cached and grows on demand.
    pub fn table(&self, t_max: usize) -> Shared<Vec<bool>> {
        {
            let cur = self.table.read().expect("table lock");
            if cur.len() > t_max {
                return cur.clone();
            }
        }
        let mut guard = self.table.write().expect("table lock");
        if guard.len() > t_max {
            return guard.clone();
        }
        let len = (t_max + 1).next_power_of_two();
        let starts: Vec<usize> = (0..len).step_by(TABLE_CHUNK).collect();
        let parts: Vec<Vec<bool>> = starts
            .par_iter()
            .map(|&s| {
                let n = TABLE_CHUNK.min(len - s);
                let mut orbit = self.frame.orbit(self.fphi.scale(s as i64), self.fphi.clone());
                let mut out = Vec::with_capacity(n);
                for _ in 0..n {
                    out.push(self.frame.contains(&self.farc, orbit.pos()));
                    orbit.advance();
                }
                out
            })
            .collect();
        let mut table = parts.concat();
        table[0] = false;
        let table = Shared::new(table);
        *guard = table.clone();
        table
    }

    /// Longest zero run in `X(0..scan_n)` for `x0 = 0`, plus one; with the gap
    /// structure between consecutive 1's.
    pub fn zero_run_bound(&self, scan_n: usize) -> Result<ZeroRunScan> {
        if scan_n < 4 {
            return Err(Error::InvalidArgument("scan_n must be at least 4".into()));
        }
        let x = SturmianWord::sturmian(&self.phi, &QuadraticIrrational::zero(), Convention::LeftClosed)?;
        let bits = x.fill(0, scan_n);
        let (run_half, gaps_half) = run_and_gaps(&bits[..scan_n / 2]);
        let (max_run, gaps) = run_and_gaps(&bits);
        if gaps.len() > 3 {
            return Err(Error::Internal(format!("{} distinct gaps between 1's, at most 3 expected", gaps.len())));
        }
        Ok(ZeroRunScan { m: max_run + 1, max_run, stable: run_half == max_run && gaps_half == gaps, gaps, scan_n })
    }

    /// Checks `bits` (placed at `origin`) for forbidden pairs at distances up
    /// to `k_max`, for runs of `m` zeros, and records where each allowed
    /// distance is realized.
    pub fn verify_characterization(&self, bits: &[u8], origin: i64, k_max: u64) -> CharacterizationReport {
        let table = self.table(k_max as usize);
        let m = self.zero_run_m;
        let mut violations = Vec::new();
        let mut count = 0u64;
        let mut push = |v: Violation, count: &mut u64| {
            *count += 1;
            if violations.len() < MAX_RECORDED {
                violations.push(v);
            }
        };
        let ones: Vec<usize> = (0..bits.len()).filter(|&i| bits[i] == 1).collect();
        let mut witness: Vec<Option<i64>> = vec![None; k_max as usize + 1];
        for (j, &b) in ones.iter().enumerate() {
            for &a in ones[..j].iter().rev() {
                let dist = b - a;
                if dist as u64 > k_max {
                    break;
                }
                if table[dist] {
                    push(Violation { kind: ViolationKind::Pair, position: origin + a as i64, distance: dist as u64 }, &mut count);
                } else if witness[dist].is_none() {
                    witness[dist] = Some(origin + a as i64);
                }
            }
        }
        let mut run = 0usize;
        for (i, &b) in bits.iter().enumerate() {
            run = if b == 0 { run + 1 } else { 0 };
            if m > 0 && run >= m {
                let start = i + 1 - m;
                push(Violation { kind: ViolationKind::ZeroRun, position: origin + start as i64, distance: m as u64 }, &mut count);
            }
        }
        let mut unrealized = Vec::new();
        let mut witnesses = Vec::new();
        for k in 1..=k_max as usize {
            if table[k] {
                continue;
            }
            match witness[k] {
                Some(position) => witnesses.push(Witness { k: k as u64, position }),
                None => unrealized.push(k as u64),
            }
        }
        let note = (!unrealized.is_empty()).then(|| {
            "some allowed distances were not realized; enlarge the window (a witness for k is expected within about k/c symbols)".to_string()
        });
        CharacterizationReport {
            violations,
            violation_count: count,
            unrealized,
            witnesses,
            m,
            k_max,
            word_len: bits.len(),
            note,
        }
    }

    /// [`Self::verify_characterization`] on `X(0..word_n)` for `x0 = 0`.
    pub fn verify_sturmian(&self, word_n: usize, k_max: u64) -> Result<CharacterizationReport> {
        let x = SturmianWord::sturmian(&self.phi, &QuadraticIrrational::zero(), Convention::LeftClosed)?;
        Ok(self.verify_characterization(&x.fill(0, word_n), 0, k_max))
    }
}

fn run_and_gaps(bits: &[u8]) -> (usize, Vec<usize>) {
    let mut max_run = 0;
    let mut run = 0;
    let mut last_one: Option<usize> = None;
    let mut gaps = Vec::new();
    for (i, &b) in bits.iter().enumerate() {
        if b == 0 {
            run += 1;
            max_run = max_run.max(run);
        } else {
            run = 0;
            if let Some(l) = last_one {
                let g = i - l;
                if !gaps.contains(&g) {
                    gaps.push(g);
                }
            }
            last_one = Some(i);
        }
    }
    gaps.sort_unstable();
    (max_run, gaps)
}
