//! Stability scans: periodically Sturmian competitors and the family of
//! Sturmian words for `phi - 1/n`, each against the Sturmian ground state
//! under a bounded perturbation of pattern energies.

use std::sync::Arc as Shared;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forbidden::ForbiddenModel;
use crate::hamiltonian::{HamiltonianSpec, ResidueTable};
use crate::quad::{Arc, QuadraticIrrational};
use crate::report;
use crate::word::{
    boundary_constant, cylinder_measure, fluctuation_stats, periodic_sturmian, Convention, FiniteWord, RotationWord,
    SturmianWord,
};

type Quad = QuadraticIrrational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompetitorKind {
    Periodic,
    Family,
}

impl CompetitorKind {
    fn as_str(self) -> &'static str {
        match self {
            CompetitorKind::Periodic => "periodic",
            CompetitorKind::Family => "family",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityRecord {
    pub kind: CompetitorKind,
    /// Period length `k` or family index `n`.
    pub parameter: u64,
    pub sample: u64,
    /// Density of the competitor under the unperturbed Hamiltonian. The
    /// Sturmian reference density is exactly zero.
    pub base_density: f64,
    /// Largest density advantage any admissible perturbation gives the competitor.
    pub perturbation_gain: f64,
    /// `base_density - perturbation_gain`
    pub margin: f64,
    pub pass: bool,
    pub freq_ones: f64,
    /// The counting bound `n C lambda / k` and the margin it leaves, periodic only.
    pub worst_case_gain: Option<f64>,
    pub worst_case_margin: Option<f64>,
    /// Below the frequency floor; kept out of thresholds and fits.
    pub excluded: bool,
    pub certified: bool,
}

/// Rows `kind,parameter,base_density,perturbation_gain,margin,pass,...`.
pub fn records_csv(records: &[StabilityRecord]) -> String {
    let opt = |x: Option<f64>| x.map(report::real).unwrap_or_default();
    let rows = records.iter().map(|r| {
        vec![
            r.kind.as_str().to_string(),
            r.parameter.to_string(),
            report::real(r.base_density),
            report::real(r.perturbation_gain),
            report::real(r.margin),
            r.pass.to_string(),
            r.sample.to_string(),
            report::real(r.freq_ones),
            opt(r.worst_case_gain),
            opt(r.worst_case_margin),
            r.excluded.to_string(),
            r.certified.to_string(),
        ]
    });
    report::csv(
        &[
            "kind",
            "parameter",
            "base_density",
            "perturbation_gain",
            "margin",
            "pass",
            "sample",
            "freq_ones",
            "worst_case_gain",
            "worst_case_margin",
            "excluded",
            "certified",
        ],
        rows,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub k_range: (u64, u64),
    pub predicted_exponent: f64,
}

impl ScalingFit {
    pub fn deviation(&self) -> f64 {
        self.exponent - self.predicted_exponent
    }
}

/// Least squares of `log density` on `log size`.
pub fn scaling_fit(points: &[(u64, f64)], predicted: f64) -> Result<ScalingFit> {
    if points.len() < 5 {
        return Err(Error::InvalidArgument(format!("a fit needs at least 5 points, got {}", points.len())));
    }
    if let Some((k, d)) = points.iter().find(|(k, d)| !(*d > 0.0) || *k == 0) {
        return Err(Error::InvalidArgument(format!("nonpositive point ({k}, {d})")));
    }
    let xs: Vec<f64> = points.iter().map(|(k, _)| (*k as f64).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, d)| d.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("all sizes are equal".into()));
    }
    let exponent = sxy / sxx;
    let intercept = my - exponent * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let lo = points.iter().map(|p| p.0).min().unwrap_or(0);
    let hi = points.iter().map(|p| p.0).max().unwrap_or(0);
    Ok(ScalingFit { exponent, intercept, r_squared, k_range: (lo, hi), predicted_exponent: predicted })
}

/// Smallest parameter from which every included record passes.
fn threshold(records: &[StabilityRecord]) -> Option<u64> {
    let kept: Vec<&StabilityRecord> = records.iter().filter(|r| !r.excluded).collect();
    match kept.iter().rposition(|r| !r.pass) {
        None => kept.first().map(|r| r.parameter),
        Some(i) => kept[i + 1..].iter().map(|r| r.parameter).find(|&p| p > kept[i].parameter),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicScanConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub patterns: Vec<FiniteWord>,
    pub k_min: usize,
    pub k_max: usize,
    pub samples_per_k: usize,
    pub density_tol: f64,
    /// Minimum frequency of 1's; `None` means `(1 - phi) / 2`.
    pub frequency_floor: Option<f64>,
    pub fit_min_k: usize,
    /// Segments `[sk, (s+1)k]`, `s in 0..fluctuation_segments`, for the counting bound.
    pub fluctuation_segments: i64,
}

impl Default for PeriodicScanConfig {
    fn default() -> Self {
        Self {
            alpha: 1.4,
            lambda: 1e-3,
            patterns: FiniteWord::all_up_to(3),
            k_min: 2,
            k_max: 500,
            samples_per_k: 8,
            density_tol: 1e-9,
            frequency_floor: None,
            fit_min_k: 20,
            fluctuation_segments: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodicScan {
    pub records: Vec<StabilityRecord>,
    /// Minimum over samples of the base density, per `k`.
    pub min_phase: Vec<(u64, f64)>,
    pub fit: Option<ScalingFit>,
    pub k_star: Option<u64>,
    /// Largest `lambda` keeping every included margin positive.
    pub lambda_star: f64,
    /// The same under the counting bound.
    pub lambda_star_worst_case: f64,
    pub frequency_floor: f64,
    pub excluded: usize,
}

fn check_stability_phi(phi: &Quad) -> Result<()> {
    if phi.is_rational() {
        return Err(Error::RationalInput);
    }
    let lo = Quad::rational(3, 4)?;
    if !(*phi > lo && *phi < Quad::one()) {
        return Err(Error::Hypothesis(format!(
            "phi must lie in (3/4, 1) so that the arc [1-phi, phi] exceeds length 1/2, got {:.6}",
            phi.to_f64()
        )));
    }
    Ok(())
}

/// Scans periodically Sturmian competitors `Y_k` for `k` in the configured range.
///
/// For each `k`, `samples_per_k` starting points `x0 = j / samples_per_k`
/// give the periods `X(0..k)`; repeated periods are scanned once. The
/// perturbation gain is the exact supremum `lambda * sum_p |nu_p(Y) - nu_p(X)|`
/// over tables on `patterns`, with `nu_p(X)` the exact Sturmian frequency.
pub fn stability_scan_periodic(phi: &Quad, cfg: &PeriodicScanConfig) -> Result<PeriodicScan> {
    check_stability_phi(phi)?;
    if !(cfg.lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda = {} must be nonnegative", cfg.lambda)));
    }
    if cfg.k_min == 0 || cfg.k_min > cfg.k_max || cfg.samples_per_k == 0 {
        return Err(Error::InvalidArgument("need 1 <= k_min <= k_max and samples_per_k >= 1".into()));
    }
    let model = Shared::new(ForbiddenModel::new(phi)?);
    let h = HamiltonianSpec::new(cfg.alpha, model)?;
    let floor = cfg.frequency_floor.unwrap_or_else(|| (1.0 - phi.to_f64()) / 2.0);
    let nu_x: Vec<f64> = cfg.patterns.iter().map(|p| cylinder_measure(phi, p).map(|m| m.to_f64())).collect::<Result<_>>()?;
    let n_patterns = cfg.patterns.len() as f64;

    let ks: Vec<usize> = (cfg.k_min..=cfg.k_max).collect();
    let per_k: Vec<Vec<StabilityRecord>> = ks
        .par_iter()
        .map(|&k| {
            let mut seen: Vec<FiniteWord> = Vec::new();
            let mut tables: Vec<ResidueTable> = Vec::new();
            let mut out = Vec::new();
            for j in 0..cfg.samples_per_k {
                let x0 = Quad::rational(j as i64, cfg.samples_per_k as i64)?;
                let y = periodic_sturmian(phi, k, &x0)?;
                if seen.contains(y.period()) {
                    continue;
                }
                seen.push(y.period().clone());
                let horizon = h.horizon_for(y.period().ones(), k, cfg.density_tol);
                if !tables.iter().any(|t| t.horizon == horizon) {
                    tables.push(h.residue_table(k, horizon));
                }
                let rt = tables.iter().find(|t| t.horizon == horizon).expect("cached");
                let est = h.density_periodic_with(&y, cfg.density_tol, Some(rt))?;
                let base = est.value;

                let spread: f64 = cfg
                    .patterns
                    .iter()
                    .zip(&nu_x)
                    .map(|(p, nu)| (y.cyclic_count(p) as f64 / k as f64 - nu).abs())
                    .sum();
                let gain = cfg.lambda * spread;

                let x = SturmianWord::sturmian(phi, &x0, Convention::LeftClosed)?;
                let stats = cfg
                    .patterns
                    .iter()
                    .map(|p| fluctuation_stats(&x, &y, p, k, 0..cfg.fluctuation_segments))
                    .collect::<Result<Vec<_>>>()?;
                let c = boundary_constant(&stats) as f64;
                let worst_case = n_patterns * c * cfg.lambda / k as f64;

                let freq = y.ones_frequency();
                out.push(StabilityRecord {
                    kind: CompetitorKind::Periodic,
                    parameter: k as u64,
                    sample: j as u64,
                    base_density: base,
                    perturbation_gain: gain,
                    margin: base - gain,
                    pass: base - gain > 0.0,
                    freq_ones: freq,
                    worst_case_gain: Some(worst_case),
                    worst_case_margin: Some(base - worst_case),
                    excluded: freq < floor,
                    certified: est.is_exact,
                });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let records: Vec<StabilityRecord> = per_k.into_iter().flatten().collect();

    let mut min_phase: Vec<(u64, f64)> = Vec::new();
    for r in records.iter().filter(|r| !r.excluded) {
        match min_phase.last_mut() {
            Some((k, d)) if *k == r.parameter => *d = d.min(r.base_density),
            _ => min_phase.push((r.parameter, r.base_density)),
        }
    }
    let fit_points: Vec<(u64, f64)> = min_phase.iter().copied().filter(|(k, _)| *k as usize >= cfg.fit_min_k).collect();
    let fit = scaling_fit(&fit_points, 2.0 - 2.0 * cfg.alpha).ok();

    let ratio_min = |f: &dyn Fn(&StabilityRecord) -> f64| {
        records
            .iter()
            .filter(|r| !r.excluded)
            .map(|r| {
                let per_lambda = f(r);
                if per_lambda > 0.0 {
                    r.base_density / per_lambda
                } else {
                    f64::INFINITY
                }
            })
            .fold(f64::INFINITY, f64::min)
    };
    let lambda = cfg.lambda;
    let lambda_star = if lambda > 0.0 { ratio_min(&|r| r.perturbation_gain / lambda) } else { f64::NAN };
    let lambda_star_worst_case = if lambda > 0.0 { ratio_min(&|r| r.worst_case_gain.unwrap_or(0.0) / lambda) } else { f64::NAN };

    Ok(PeriodicScan {
        k_star: threshold(&records),
        excluded: records.iter().filter(|r| r.excluded).count(),
        records,
        min_phase,
        fit,
        lambda_star,
        lambda_star_worst_case,
        frequency_floor: floor,
    })
}

/// How `S_n` is coded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyCoding {
    /// Rotation by `psi = phi - 1/n` against `[0, psi)`: a Sturmian word for `psi`.
    #[default]
    Rotation,
    /// Rotation by `phi` against `[0, phi - 1/n)`.
    PhiOrbit,
}

/// The word `S_n`, zero exactly when the orbit of 0 lies in `[0, phi - 1/n)`.
pub fn family_word(phi: &Quad, n: u64, coding: FamilyCoding) -> Result<RotationWord> {
    if phi.is_rational() {
        return Err(Error::RationalInput);
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let psi = phi - &Quad::rational(1, BigInt::from(n))?;
    if !(psi > Quad::zero()) || !(*phi < Quad::one()) {
        return Err(Error::InvalidArgument(format!("n = {n} is too small: phi - 1/n must be positive")));
    }
    let arc = Arc::half_open(Quad::zero(), psi.clone())?;
    let step = match coding {
        FamilyCoding::Rotation => psi,
        FamilyCoding::PhiOrbit => phi.clone(),
    };
    RotationWord::new(step, Quad::zero(), arc)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyScanConfig {
    pub alpha: f64,
    pub lambda: f64,
    pub ns: Vec<u64>,
    pub coding: FamilyCoding,
    pub horizon: usize,
    /// Windows `[-m, m]` for `m` up to this many sites on each side.
    pub m_max: usize,
    pub fit_min_n: u64,
}

impl Default for FamilyScanConfig {
    fn default() -> Self {
        Self {
            alpha: 1.8,
            lambda: 1e-3,
            ns: (2..=500).collect(),
            coding: FamilyCoding::Rotation,
            horizon: 1 << 16,
            m_max: 1 << 19,
            fit_min_n: 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyScan {
    pub records: Vec<StabilityRecord>,
    pub fit: Option<ScalingFit>,
    pub n_star: Option<u64>,
    /// Largest `lambda` keeping every margin positive.
    pub lambda_star: f64,
    /// `n` whose windowed density moved by more than `1e-4` relatively over the last doubling.
    pub unconverged: Vec<u64>,
    pub tail_bound: f64,
    pub coding: FamilyCoding,
}

/// Scans `S_n` against the Sturmian word for `phi` with the reward
/// `delta("1") = -lambda`: the competitor gains `lambda` times its excess
/// frequency of 1's, which is `1/n`.
pub fn stability_scan_family(phi: &Quad, cfg: &FamilyScanConfig) -> Result<FamilyScan> {
    if !(cfg.lambda >= 0.0) {
        return Err(Error::InvalidArgument(format!("lambda = {} must be nonnegative", cfg.lambda)));
    }
    if cfg.ns.is_empty() {
        return Err(Error::InvalidArgument("empty n range".into()));
    }
    let model = Shared::new(ForbiddenModel::new(phi)?);
    let h = HamiltonianSpec::new(cfg.alpha, model)?;
    let mut ns = cfg.ns.clone();
    ns.sort_unstable();
    ns.dedup();

    let cells: Vec<(StabilityRecord, bool, f64)> = ns
        .par_iter()
        .map(|&n| {
            let w = family_word(phi, n, cfg.coding)?;
            let est = h.density_estimate_stream(&w, 1, cfg.m_max, cfg.horizon)?;
            let last = *est.per_window.last().expect("m_max >= 1");
            let half = est.per_window[(cfg.m_max / 2).max(1) - 1];
            let converged = last == half || ((last - half) / last).abs() < 1e-4;
            let excess = (phi - w.zero_arc().hi()).to_f64();
            let gain = cfg.lambda * excess;
            let rec = StabilityRecord {
                kind: CompetitorKind::Family,
                parameter: n,
                sample: 0,
                base_density: est.value,
                perturbation_gain: gain,
                margin: est.value - gain,
                pass: est.value - gain > 0.0,
                freq_ones: 1.0 - w.zero_arc().hi().to_f64(),
                worst_case_gain: None,
                worst_case_margin: None,
                excluded: false,
                certified: false,
            };
            Ok((rec, converged, est.tail_bound))
        })
        .collect::<Result<_>>()?;

    let tail_bound = cells.first().map(|c| c.2).unwrap_or(0.0);
    let unconverged = cells.iter().filter(|c| !c.1).map(|c| c.0.parameter).collect();
    let records: Vec<StabilityRecord> = cells.into_iter().map(|c| c.0).collect();
    let points: Vec<(u64, f64)> =
        records.iter().filter(|r| r.parameter >= cfg.fit_min_n).map(|r| (r.parameter, r.base_density)).collect();
    let fit = scaling_fit(&points, 1.0 - cfg.alpha).ok();
    let lambda_star = records
        .iter()
        .map(|r| {
            let per = r.perturbation_gain / cfg.lambda;
            if cfg.lambda > 0.0 && per > 0.0 {
                r.base_density / per
            } else {
                f64::INFINITY
            }
        })
        .fold(f64::INFINITY, f64::min);
    Ok(FamilyScan { n_star: threshold(&records), records, fit, lambda_star, unconverged, tail_bound, coding: cfg.coding })
}

/// Pair density of a rotation word `(psi, 0, [0, psi))` for `phi`'s forbidden
/// distances, from the overlap of the 1-arc with its translates, truncated at
/// `horizon`.
pub fn family_pair_density_overlap(h: &HamiltonianSpec, w: &RotationWord, horizon: usize) -> f64 {
    let weights = h.forbidden_weights(horizon);
    let ones = 1.0 - w.zero_arc().length().to_f64();
    let step = w.step().clone();
    (1..=horizon)
        .filter(|&t| weights[t] != 0.0)
        .map(|t| {
            let d = step.mul_int(&BigInt::from(t)).frac().to_f64();
            let ov = (ones - d).max(0.0) + (ones - (1.0 - d)).max(0.0);
            weights[t] * ov
        })
        .sum()
}
