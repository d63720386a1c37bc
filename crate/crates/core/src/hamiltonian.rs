//! The pair-plus-zero-run Hamiltonian `H_alpha`, pattern perturbations and
//! energy densities.
//!
//! A pair of 1's at a forbidden distance `n` costs `pair_scale / n^alpha`, each
//! occurrence of `m` consecutive 0's costs `zero_run_energy`, and each
//! occurrence of a perturbation pattern `p` adds its signed `delta`.
//!
//! Forbidden-distance decisions are exact; energies are `f64`.

use std::fmt::Write as _;
use std::sync::{Arc as Shared, RwLock};

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::conv::{autocorrelation_counts, causal_correlate};
use crate::error::{Error, Result};
use crate::forbidden::ForbiddenModel;
use crate::quad::QuadraticIrrational;
use crate::word::{count_in, FiniteWord, PeriodicWord, Word};
use crate::zeta::{hurwitz_tail, integral_tail_bound, zeta};

/// Checkpoints per residue table for the discrepancy estimate.
const CHECKPOINTS: usize = 1024;

/// Largest explicit horizon used by [`HamiltonianSpec::density_periodic_exact`].
pub const PERIODIC_HORIZON_CAP: usize = 1 << 22;

/// Per-residue weight sums `W[r]` for one period length and horizon.
#[derive(Clone, Debug)]
pub struct ResidueTable {
    pub k: usize,
    pub horizon: usize,
    pub weights: Vec<f64>,
    start: usize,
    marks: Vec<usize>,
    /// Forbidden `t` in `[start, mark]` per residue, one row of `k` per mark.
    counts: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternEntry {
    pub pattern: FiniteWord,
    pub delta: f64,
}

/// Finitely many signed pattern energies with `|delta| < lambda`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable")]
pub struct PatternTable {
    entries: Vec<PatternEntry>,
    lambda: f64,
}

#[derive(Deserialize)]
struct RawTable {
    entries: Vec<PatternEntry>,
    lambda: f64,
}

impl TryFrom<RawTable> for PatternTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        PatternTable::new(raw.entries, raw.lambda)
    }
}

impl PatternTable {
    pub fn new(entries: Vec<PatternEntry>, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda = {lambda} must be finite and >= 0")));
        }
        for (i, e) in entries.iter().enumerate() {
            if e.pattern.is_empty() {
                return Err(Error::InvalidWord("perturbation patterns must be nonempty".into()));
            }
            if !(e.delta.abs() < lambda) {
                return Err(Error::PerturbationTooLarge { pattern: e.pattern.to_string(), delta: e.delta.abs(), lambda });
            }
            if entries[..i].iter().any(|o| o.pattern.bits() == e.pattern.bits()) {
                return Err(Error::InvalidArgument(format!("pattern {} listed twice", e.pattern)));
            }
        }
        Ok(Self { entries, lambda })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[PatternEntry] {
        &self.entries
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn max_len(&self) -> usize {
        self.entries.iter().map(|e| e.pattern.len()).max().unwrap_or(0)
    }
}

/// Energy of a finite word split by term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub pair: f64,
    pub zero_run: f64,
    pub perturbation: f64,
    pub forbidden_pairs: u64,
    pub zero_runs: u64,
}

impl EnergyBreakdown {
    pub fn total(&self) -> f64 {
        self.pair + self.zero_run + self.perturbation
    }
}

/// An energy density with its window trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub window_sizes: Vec<u64>,
    pub energies: Vec<f64>,
    pub per_window: Vec<f64>,
    /// True when `|value - density| <= tail_bound` is guaranteed.
    pub is_exact: bool,
    pub tail_bound: f64,
    /// Pair-distance horizon of the explicit sum.
    pub horizon: usize,
}

impl DensityEstimate {
    /// Rows `window_size,energy,density`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("window_size,energy,density\n");
        for ((n, e), d) in self.window_sizes.iter().zip(&self.energies).zip(&self.per_window) {
            let _ = writeln!(out, "{n},{},{}", crate::report::real(*e), crate::report::real(*d));
        }
        out
    }
}

/// JSON form of a Hamiltonian.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianConfig {
    pub alpha: f64,
    #[serde(default = "one")]
    pub pair_scale: f64,
    #[serde(default = "one")]
    pub zero_run_energy: f64,
    pub phi: QuadraticIrrational,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub perturbation: Vec<PatternEntry>,
    #[serde(default)]
    pub lambda: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    alpha: f64,
    pair_scale: f64,
    zero_run_energy: f64,
    forbidden: Shared<ForbiddenModel>,
    perturbation: PatternTable,
    weights: Shared<RwLock<Shared<Vec<f64>>>>,
}

impl HamiltonianSpec {
    /// `H_alpha` with unit pair scale and zero-run energy.
    pub fn new(alpha: f64, forbidden: Shared<ForbiddenModel>) -> Result<Self> {
        if !(alpha > 1.0 && alpha.is_finite()) {
            return Err(Error::Hypothesis(format!("alpha = {alpha} must exceed 1 for the pair sum to converge")));
        }
        Ok(Self {
            alpha,
            pair_scale: 1.0,
            zero_run_energy: 1.0,
            forbidden,
            perturbation: PatternTable::empty(),
            weights: Shared::new(RwLock::new(Shared::new(vec![0.0]))),
        })
    }

    pub fn with_pair_scale(mut self, pair_scale: f64) -> Result<Self> {
        if !(pair_scale >= 0.0 && pair_scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("pair_scale = {pair_scale} must be finite and >= 0")));
        }
        self.pair_scale = pair_scale;
        self.weights = Shared::new(RwLock::new(Shared::new(vec![0.0])));
        Ok(self)
    }

    pub fn with_zero_run_energy(mut self, e: f64) -> Result<Self> {
        if !(e >= 0.0 && e.is_finite()) {
            return Err(Error::InvalidArgument(format!("zero_run_energy = {e} must be finite and >= 0")));
        }
        self.zero_run_energy = e;
        Ok(self)
    }

    pub fn from_config(cfg: &HamiltonianConfig) -> Result<Self> {
        let model = ForbiddenModel::new(&cfg.phi)?;
        if let Some(m) = cfg.m {
            if m != model.zero_run_m() {
                return Err(Error::InvalidArgument(format!(
                    "configured m = {m} differs from the zero-run bound {} of phi",
                    model.zero_run_m()
                )));
            }
        }
        let table = PatternTable::new(cfg.perturbation.clone(), cfg.lambda)?;
        Self::new(cfg.alpha, Shared::new(model))?
            .with_pair_scale(cfg.pair_scale)?
            .with_zero_run_energy(cfg.zero_run_energy)?
            .perturb(table)
    }

    pub fn to_config(&self) -> HamiltonianConfig {
        HamiltonianConfig {
            alpha: self.alpha,
            pair_scale: self.pair_scale,
            zero_run_energy: self.zero_run_energy,
            phi: self.forbidden.phi().clone(),
            m: Some(self.forbidden.zero_run_m()),
            perturbation: self.perturbation.entries.clone(),
            lambda: self.perturbation.lambda,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn pair_scale(&self) -> f64 {
        self.pair_scale
    }

    pub fn zero_run_energy(&self) -> f64 {
        self.zero_run_energy
    }

    pub fn forbidden(&self) -> &ForbiddenModel {
        &self.forbidden
    }

    pub fn forbidden_shared(&self) -> Shared<ForbiddenModel> {
        self.forbidden.clone()
    }

    pub fn perturbation(&self) -> &PatternTable {
        &self.perturbation
    }

    /// `H + H_P`. Deltas of a pattern already present are added; the result
    /// must still satisfy `|delta| < lambda` with `lambda` the larger of the two.
    pub fn perturb(&self, table: PatternTable) -> Result<Self> {
        let lambda = self.perturbation.lambda.max(table.lambda);
        let mut entries = self.perturbation.entries.clone();
        for e in table.entries {
            match entries.iter_mut().find(|o| o.pattern.bits() == e.pattern.bits()) {
                Some(o) => o.delta += e.delta,
                None => entries.push(PatternEntry { pattern: FiniteWord::new(e.pattern.bits().to_vec()), delta: e.delta }),
            }
        }
        let mut out = self.clone();
        out.perturbation = PatternTable::new(entries, lambda)?;
        Ok(out)
    }

    /// `pair_scale / n^alpha`.
    pub fn pair_weight(&self, n: usize) -> f64 {
        self.pair_scale * (n as f64).powf(-self.alpha)
    }

    /// `w[t] = pair_scale / t^alpha` if `t` is forbidden, else 0; for `t <= t_max` at least.
    pub fn forbidden_weights(&self, t_max: usize) -> Shared<Vec<f64>> {
        {
            let cur = self.weights.read().expect("weights lock");
            if cur.len() > t_max {
                return cur.clone();
            }
        }
        let mut guard = self.weights.write().expect("weights lock");
        if guard.len() > t_max {
            return guard.clone();
        }
        let table = self.forbidden.table(t_max);
        let len = (t_max + 1).next_power_of_two();
        let w: Vec<f64> = (0..len).map(|t| if table[t] { self.pair_weight(t) } else { 0.0 }).collect();
        let w = Shared::new(w);
        *guard = w.clone();
        w
    }

    /// Energy of all patterns fully inside `w`, by term.
    pub fn window_energy_breakdown(&self, w: &FiniteWord) -> EnergyBreakdown {
        let bits = w.bits();
        let n = bits.len();
        let mut out = EnergyBreakdown::default();
        if n == 0 {
            return out;
        }
        let counts = autocorrelation_counts(bits);
        let table = self.forbidden.table(n);
        for t in 1..n {
            if table[t] && counts[t] > 0 {
                out.forbidden_pairs += counts[t];
                out.pair += counts[t] as f64 * self.pair_weight(t);
            }
        }
        let m = self.forbidden.zero_run_m();
        let mut run = 0usize;
        for &b in bits {
            run = if b == 0 { run + 1 } else { 0 };
            if run >= m {
                out.zero_runs += 1;
            }
        }
        out.zero_run = out.zero_runs as f64 * self.zero_run_energy;
        for e in &self.perturbation.entries {
            out.perturbation += e.delta * count_in(bits, e.pattern.bits()) as f64;
        }
        out
    }

    /// `H(w)`: forbidden pairs, zero runs and perturbation patterns inside `w`.
    pub fn window_energy(&self, w: &FiniteWord) -> f64 {
        self.window_energy_breakdown(w).total()
    }

    /// `M` with `sum_{p containing site i} |Phi(p)| < M` for every site.
    pub fn summability_bound(&self) -> f64 {
        let pairs = 2.0 * self.pair_scale * zeta(self.alpha);
        let runs = self.zero_run_energy * self.forbidden.zero_run_m() as f64;
        let pert: f64 = self.perturbation.entries.iter().map(|e| e.delta.abs() * e.pattern.len() as f64).sum();
        pairs + runs + pert
    }

    /// `W[r] = sum_{t <= horizon, t = r mod k} w[t]`.
    pub fn residue_weights(&self, k: usize, horizon: usize) -> Vec<f64> {
        self.residue_table(k, horizon).weights
    }

    /// Residue weights together with the checkpoint counts used by the
    /// discrepancy estimate; shareable by every period of length `k`.
    pub fn residue_table(&self, k: usize, horizon: usize) -> ResidueTable {
        let w = self.forbidden_weights(horizon);
        let table = self.forbidden.table(horizon);
        let mut weights = vec![0.0; k];
        let start = horizon / 2 + 1;
        let spacing = (horizon / 2 / CHECKPOINTS).max(1);
        let mut running = vec![0u32; k];
        let mut marks = Vec::new();
        let mut counts = Vec::new();
        let mut r = 0;
        for t in 1..=horizon {
            r += 1;
            if r == k {
                r = 0;
            }
            weights[r] += w[t];
            if t >= start {
                if table[t] {
                    running[r] += 1;
                }
                if (t - start + 1) % spacing == 0 || t == horizon {
                    marks.push(t);
                    counts.extend_from_slice(&running);
                }
            }
        }
        ResidueTable { k, horizon, weights, start, marks, counts }
    }

    /// Density of a periodic word: explicit pair sum out to a horizon chosen
    /// from `tol`, an equidistribution correction for the remaining tail, and
    /// exact per-period counts of zero runs and perturbation patterns.
    pub fn density_periodic_exact(&self, y: &PeriodicWord, tol: f64) -> Result<DensityEstimate> {
        self.density_periodic_with(y, tol, None)
    }

    /// As [`Self::density_periodic_exact`] with precomputed residue weights for `y.k()`.
    pub fn density_periodic_with(&self, y: &PeriodicWord, tol: f64, table: Option<&ResidueTable>) -> Result<DensityEstimate> {
        if !(tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tol = {tol} must be positive")));
        }
        let k = y.k();
        let kf = k as f64;
        let ones = y.period().ones();
        let zeros = FiniteWord::new(vec![0; self.forbidden.zero_run_m()]);
        let local = self.zero_run_energy * y.cyclic_count(&zeros) as f64
            + self.perturbation.entries.iter().map(|e| e.delta * y.cyclic_count(&e.pattern) as f64).sum::<f64>();

        let (pair, horizon, bound, certified) = if ones == 0 || self.pair_scale == 0.0 {
            (0.0, 0, 0.0, true)
        } else {
            let c = y.cyclic_autocorrelation();
            let horizon = self.horizon_for(ones, k, tol);
            let owned;
            let rt = match table {
                Some(t) if t.horizon == horizon && t.k == k => t,
                _ => {
                    owned = self.residue_table(k, horizon);
                    &owned
                }
            };
            let explicit: f64 = c.iter().zip(&rt.weights).map(|(&ci, &wi)| ci as f64 * wi).sum();
            let arc_len = self.forbidden.arc().length().to_f64();
            let abar = arc_len * (ones * ones) as f64 / kf;
            let zt = self.pair_scale * hurwitz_tail(self.alpha, horizon as u64);
            let cmax = *c.iter().max().unwrap_or(&0) as f64;
            let crude = abar.max(cmax - abar) * zt / kf;
            if crude <= tol {
                (explicit + abar * zt, horizon, crude, true)
            } else {
                let est = self.discrepancy_estimate(&c, abar, rt) / kf;
                (explicit + abar * zt, horizon, est, false)
            }
        };
        let value = pair / kf + local / kf;
        Ok(DensityEstimate {
            value,
            window_sizes: vec![k as u64],
            energies: vec![value * kf],
            per_window: vec![value],
            is_exact: certified,
            tail_bound: bound,
            horizon,
        })
    }

    /// Horizon `T` with `pair_scale * ones * T^(1-alpha) / ((alpha-1) k) <= tol`, capped.
    pub fn horizon_for(&self, ones: usize, k: usize, tol: f64) -> usize {
        let a = self.alpha;
        let base = self.pair_scale * ones as f64 / ((a - 1.0) * tol * k as f64);
        let t = base.powf(1.0 / (a - 1.0)).ceil();
        if !t.is_finite() || t >= PERIODIC_HORIZON_CAP as f64 {
            PERIODIC_HORIZON_CAP
        } else {
            (t as usize).max(1)
        }
    }

    /// Abel-summation estimate of the error of the equidistribution tail
    /// correction, from the partial sums of `F(t) c[t mod k] - abar` over the
    /// second half of the explicit range, read at the table's checkpoints.
    fn discrepancy_estimate(&self, c: &[u64], abar: f64, rt: &ResidueTable) -> f64 {
        let k = c.len();
        let mut sup = 0.0f64;
        for (i, &t) in rt.marks.iter().enumerate() {
            let row = &rt.counts[i * k..(i + 1) * k];
            let hits: f64 = row.iter().zip(c).map(|(&n, &ci)| f64::from(n) * ci as f64).sum();
            let g = hits - abar * (t + 1 - rt.start) as f64;
            sup = sup.max(g.abs());
        }
        2.0 * sup * self.pair_weight(rt.horizon + 1)
    }

    /// Streaming density over the windows `[-mk, mk]`, `m = 1..=m_max`.
    ///
    /// Energy is attributed to sites: a site carries the pairs, zero runs and
    /// perturbation patterns whose right end it is, looking back up to
    /// `horizon` symbols even past the window's left edge. The reported value
    /// is the minimum density over the second half of the schedule, and
    /// `tail_bound = pair_scale * horizon^(1-alpha) / (alpha-1)` bounds the
    /// per-site energy of the neglected pairs.
    pub fn density_estimate_stream(&self, w: &dyn Word, stride_k: usize, m_max: usize, horizon: usize) -> Result<DensityEstimate> {
        if stride_k == 0 || m_max == 0 || horizon == 0 {
            return Err(Error::InvalidArgument("stride_k, m_max and horizon must be at least 1".into()));
        }
        let big = m_max * stride_k;
        let n_sites = 2 * big + 1;
        let e = self.site_energies(w, -(big as i64), n_sites, horizon);

        let mut window_sizes = Vec::with_capacity(m_max);
        let mut energies = Vec::with_capacity(m_max);
        let mut per_window = Vec::with_capacity(m_max);
        let mut energy = e[big];
        let mut reach = 0usize;
        for m in 1..=m_max {
            let target = m * stride_k;
            while reach < target {
                reach += 1;
                energy += e[big - reach] + e[big + reach];
            }
            let size = 2 * target + 1;
            window_sizes.push(size as u64);
            energies.push(energy);
            per_window.push(energy / size as f64);
        }
        let tail_start = m_max / 2;
        let value = per_window[tail_start..].iter().copied().fold(f64::INFINITY, f64::min);
        Ok(DensityEstimate {
            value,
            window_sizes,
            energies,
            per_window,
            is_exact: false,
            tail_bound: self.pair_scale * integral_tail_bound(self.alpha, horizon as u64),
            horizon,
        })
    }

    /// Per-site energies of `w` at sites `start..start + n`, see
    /// [`Self::density_estimate_stream`].
    pub fn site_energies(&self, w: &dyn Word, start: i64, n: usize, horizon: usize) -> Vec<f64> {
        let m = self.forbidden.zero_run_m();
        let lookback = horizon.max(m.saturating_sub(1)).max(self.perturbation.max_len().saturating_sub(1));
        let bits = w.fill(start - lookback as i64, lookback + n);
        let weights = self.forbidden_weights(horizon);
        let table = self.forbidden.table(horizon);
        let kernel: Vec<Complex64> = (0..=horizon)
            .map(|t| if t > 0 && table[t] { Complex64::new(weights[t], 1.0) } else { Complex64::new(0.0, 0.0) })
            .collect();
        let signal = &bits[lookback - horizon..];
        let mut e = causal_correlate(signal, &kernel, n, |j, z| {
            // a site with no forbidden partner gets exactly zero
            if bits[lookback + j] == 1 && z.im.round() >= 1.0 {
                z.re
            } else {
                0.0
            }
        });
        let mut run = 0usize;
        for b in &bits[..lookback] {
            run = if *b == 0 { run + 1 } else { 0 };
        }
        for (j, ej) in e.iter_mut().enumerate() {
            let idx = lookback + j;
            run = if bits[idx] == 0 { run + 1 } else { 0 };
            if run >= m {
                *ej += self.zero_run_energy;
            }
            for p in &self.perturbation.entries {
                let l = p.pattern.len();
                if &bits[idx + 1 - l..=idx] == p.pattern.bits() {
                    *ej += p.delta;
                }
            }
        }
        e
    }
}
