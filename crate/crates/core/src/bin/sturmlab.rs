use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc as Shared;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sturmlab::cf::{cf_expand, convergents};
use sturmlab::config::{OutputFormat, RunConfig};
use sturmlab::ergodicity::{hitting_count_in, hitting_scan, lemma_bound_check, FrameMode, HittingScan};
use sturmlab::forbidden::ForbiddenModel;
use sturmlab::hamiltonian::HamiltonianSpec;
use sturmlab::quad::{Arc, QuadraticIrrational};
use sturmlab::report;
use sturmlab::stability::{
    records_csv, stability_scan_family, stability_scan_periodic, FamilyCoding, FamilyScanConfig, PeriodicScanConfig,
};
use sturmlab::word::{Convention, FiniteWord, PeriodicWord, SturmianWord, Word};
use sturmlab::{Error, Result};

#[derive(Parser)]
#[command(name = "sturmlab", version, about = "Sturmian ground states, forbidden distances and stability scans")]
struct Cli {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel scans.
    #[arg(long, global = true, env = "STURMLAB_THREADS")]
    threads: Option<usize>,
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Default)]
struct Common {
    /// Rotation number as p,q,r,d meaning (p + q sqrt d) / r.
    #[arg(long, global = true, allow_hyphen_values = true)]
    phi: Option<QuadraticIrrational>,
    #[arg(long, global = true)]
    convention: Option<Convention>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Starting point as p,q,r,d.
    #[arg(long, global = true, allow_hyphen_values = true)]
    x0: Option<QuadraticIrrational>,
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print symbols of the Sturmian word.
    Generate {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        start: i64,
    },
    /// Forbidden distances up to k_max and the zero-run bound.
    Forbidden {
        #[arg(long)]
        k_max: Option<u64>,
        /// Check the pattern-absence characterization on a word window.
        #[arg(long)]
        verify: bool,
        #[arg(long)]
        scan_n: Option<usize>,
    },
    /// Hitting counts of the accelerated rotation in the arc [1 - phi, phi].
    Ergodicity {
        #[arg(long)]
        k_min: Option<u64>,
        #[arg(long)]
        k_max: Option<u64>,
        /// Defaults to ceil(1 / c) with c from a scan up to --c-scan.
        #[arg(long)]
        d: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        c_scan: u64,
        #[arg(long)]
        proof_frame: bool,
    },
    /// Energy density of a periodic word, or a streaming estimate for the Sturmian word.
    Density {
        /// Period of the word as a 0/1 string; the Sturmian word when absent.
        #[arg(long)]
        word: Option<FiniteWord>,
        #[arg(long)]
        stride: Option<usize>,
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        /// Use the streaming estimator for periodic words too.
        #[arg(long)]
        stream: bool,
    },
    /// Periodically Sturmian competitors against the Sturmian word.
    StabilityPeriodic {
        #[arg(long)]
        k_min: Option<u64>,
        #[arg(long)]
        k_max: Option<u64>,
        #[arg(long)]
        samples: Option<usize>,
        /// Comma separated 0/1 patterns; all words of length <= 3 when absent.
        #[arg(long, value_delimiter = ',')]
        patterns: Option<Vec<FiniteWord>>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// The family S_n against the Sturmian word.
    StabilityFamily {
        #[arg(long)]
        n_min: Option<u64>,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long, value_parser = parse_coding)]
        coding: Option<FamilyCoding>,
    },
    /// Continued fraction expansion and convergents.
    Cf {
        #[arg(long, default_value_t = 20)]
        depth: usize,
    },
}

fn parse_format(s: &str) -> std::result::Result<OutputFormat, String> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        _ => Err(format!("unknown format {s:?}, expected csv or json")),
    }
}

fn parse_coding(s: &str) -> std::result::Result<FamilyCoding, String> {
    match s {
        "rotation" => Ok(FamilyCoding::Rotation),
        "phi_orbit" => Ok(FamilyCoding::PhiOrbit),
        _ => Err(format!("unknown coding {s:?}, expected rotation or phi_orbit")),
    }
}

fn merge(cfg: &mut RunConfig, c: &Common) {
    macro_rules! set {
        ($dst:expr, $src:expr) => {
            if let Some(v) = $src.clone() {
                $dst = Some(v);
            }
        };
    }
    set!(cfg.phi, c.phi);
    set!(cfg.convention, c.convention);
    set!(cfg.alpha, c.alpha);
    set!(cfg.lambda, c.lambda);
    set!(cfg.x0, c.x0);
    set!(cfg.output.format, c.format);
    set!(cfg.output.path, c.output);
}

fn range(lo: Option<u64>, hi: Option<u64>, cfg: Option<(u64, u64)>, default: (u64, u64)) -> Result<(u64, u64)> {
    let base = cfg.unwrap_or(default);
    let r = (lo.unwrap_or(base.0), hi.unwrap_or(base.1));
    if r.0 > r.1 {
        return Err(Error::InvalidArgument(format!("empty range {}..={}", r.0, r.1)));
    }
    Ok(r)
}

fn run(cli: Cli) -> Result<(String, i32)> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    merge(&mut cfg, &cli.common);
    let format = cfg.format();
    let convention = cfg.convention.unwrap_or_default();
    let x0 = cfg.x0.clone().unwrap_or_else(QuadraticIrrational::zero);

    match cli.cmd {
        Cmd::Generate { n, start } => {
            let phi = cfg.phi()?;
            let n = n.or(cfg.ranges.scan_n).unwrap_or(0);
            let w = SturmianWord::sturmian(&phi, &x0, convention)?;
            let s: String = w.fill(start, n).iter().map(|b| char::from(b'0' + b)).collect();
            Ok((format!("{s}\n"), 0))
        }
        Cmd::Forbidden { k_max, verify, scan_n } => {
            let phi = cfg.phi()?;
            let k_max = k_max.or(cfg.ranges.k_max).unwrap_or(10);
            let model = ForbiddenModel::new(&phi)?;
            let set = model.forbidden_set(k_max)?;
            let m = model.zero_run_m();
            let report = if verify {
                let n = scan_n.or(cfg.ranges.scan_n).unwrap_or(1_000_000);
                Some(model.verify_sturmian(n, k_max)?)
            } else {
                None
            };
            let code = match &report {
                Some(r) if !r.absence_holds() => 4,
                _ => 0,
            };
            let out = match format {
                OutputFormat::Json => {
                    format!("{}\n", serde_json::to_string_pretty(&json!({"forbidden": set, "m": m, "k_max": k_max, "verify": report}))?)
                }
                OutputFormat::Csv => {
                    let list: Vec<String> = set.iter().map(u64::to_string).collect();
                    let mut s = format!("{}\nm={m}\n", list.join(" "));
                    if let Some(r) = &report {
                        s.push_str(&format!(
                            "violations={} unrealized={} window={}\n",
                            r.violation_count,
                            r.unrealized.len(),
                            r.word_len
                        ));
                    }
                    s
                }
            };
            Ok((out, code))
        }
        Cmd::Ergodicity { k_min, k_max, d, c_scan, proof_frame } => {
            let phi = cfg.phi()?;
            let (lo, hi) = range(k_min, k_max, cfg.ranges.k_range, (10, 2000))?;
            let lemma = lemma_bound_check(&phi, c_scan)?;
            let d = d.or(cfg.d).unwrap_or(lemma.d);
            let p = Arc::closed(QuadraticIrrational::one() - phi.clone(), phi.clone())?;
            let scan = if proof_frame {
                let results = (lo..=hi)
                    .map(|k| hitting_count_in(&phi, &x0, k, d, &p, FrameMode::Proof))
                    .collect::<Result<Vec<_>>>()?;
                let base = hitting_scan(&phi, &x0, &p, lo..=hi, d)?;
                if base.results != results {
                    return Err(Error::Internal("proof frame changed a hitting count".into()));
                }
                HittingScan { results, ..base }
            } else {
                hitting_scan(&phi, &x0, &p, lo..=hi, d)?
            };
            let out = match format {
                OutputFormat::Csv => scan.to_csv(),
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({
                        "k_star": scan.threshold_k,
                        "empirical_r": scan.empirical_r,
                        "d": d,
                        "c_est": lemma.c_est_f64,
                        "results": scan.results,
                    }))?
                ),
            };
            Ok((out, 0))
        }
        Cmd::Density { word, stride, m_max, horizon, tol, stream } => {
            let phi = cfg.phi()?;
            let h = HamiltonianSpec::new(cfg.alpha()?, Shared::new(ForbiddenModel::new(&phi)?))?;
            let word = word.or(cfg.word.clone());
            let horizon = horizon.or(cfg.horizon).unwrap_or(1 << 14);
            let m_max = m_max.or(cfg.m_max).unwrap_or(64);
            let est = match word {
                Some(period) if !stream => {
                    let y = PeriodicWord::new(period, 0)?;
                    h.density_periodic_exact(&y, tol.or(cfg.tolerances.density_tol).unwrap_or(1e-9))?
                }
                Some(period) => {
                    let y = PeriodicWord::new(period, 0)?;
                    h.density_estimate_stream(&y, stride.or(cfg.stride).unwrap_or(y.k()), m_max, horizon)?
                }
                None => {
                    let x = SturmianWord::sturmian(&phi, &x0, convention)?;
                    let est = h.density_estimate_stream(&x, stride.or(cfg.stride).unwrap_or(1000), m_max, horizon)?;
                    if est.energies.iter().any(|&e| e != 0.0) {
                        return Err(Error::Internal("a Sturmian window has nonzero energy".into()));
                    }
                    est
                }
            };
            let out = match format {
                OutputFormat::Csv => est.to_csv(),
                OutputFormat::Json => format!("{}\n", serde_json::to_string_pretty(&est)?),
            };
            Ok((out, 0))
        }
        Cmd::StabilityPeriodic { k_min, k_max, samples, patterns, tol } => {
            let phi = cfg.phi()?;
            let (lo, hi) = range(k_min, k_max, cfg.ranges.k_range, (2, 500))?;
            let scan_cfg = PeriodicScanConfig {
                alpha: cfg.alpha()?,
                lambda: cfg.lambda()?,
                patterns: patterns.or(cfg.pattern_set.clone()).unwrap_or_else(|| FiniteWord::all_up_to(3)),
                k_min: lo as usize,
                k_max: hi as usize,
                samples_per_k: samples.or(cfg.samples_per_k).unwrap_or(8),
                density_tol: tol.or(cfg.tolerances.density_tol).unwrap_or(1e-9),
                ..Default::default()
            };
            let scan = stability_scan_periodic(&phi, &scan_cfg)?;
            let out = match format {
                OutputFormat::Csv => records_csv(&scan.records),
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({
                        "fit": scan.fit,
                        "k_star": scan.k_star,
                        "lambda_star": finite(scan.lambda_star),
                        "lambda_star_worst_case": finite(scan.lambda_star_worst_case),
                        "frequency_floor": scan.frequency_floor,
                        "excluded": scan.excluded,
                        "records": scan.records,
                    }))?
                ),
            };
            Ok((out, 0))
        }
        Cmd::StabilityFamily { n_min, n_max, horizon, m_max, coding } => {
            let phi = cfg.phi()?;
            let (lo, hi) = range(n_min, n_max, cfg.ranges.n_range, (2, 500))?;
            let defaults = FamilyScanConfig::default();
            let scan_cfg = FamilyScanConfig {
                alpha: cfg.alpha()?,
                lambda: cfg.lambda()?,
                ns: (lo..=hi).collect(),
                coding: coding.or(cfg.coding).unwrap_or_default(),
                horizon: horizon.or(cfg.horizon).unwrap_or(defaults.horizon),
                m_max: m_max.or(cfg.m_max).unwrap_or(defaults.m_max),
                fit_min_n: defaults.fit_min_n,
            };
            let scan = stability_scan_family(&phi, &scan_cfg)?;
            let out = match format {
                OutputFormat::Csv => records_csv(&scan.records),
                OutputFormat::Json => format!(
                    "{}\n",
                    serde_json::to_string_pretty(&json!({
                        "fit": scan.fit,
                        "n_star": scan.n_star,
                        "lambda_star": finite(scan.lambda_star),
                        "unconverged": scan.unconverged,
                        "tail_bound": scan.tail_bound,
                        "coding": scan.coding,
                        "records": scan.records,
                    }))?
                ),
            };
            Ok((out, 0))
        }
        Cmd::Cf { depth } => {
            let phi = cfg.phi.clone().ok_or_else(|| Error::InvalidArgument("phi is required".into()))?;
            let cf = cf_expand(&phi, depth.max(1))?;
            let n = cf.depth().map_or(depth, |d| d.min(depth + 1)).saturating_sub(1);
            let conv = convergents(&cf, n)?;
            let rows = conv.iter().enumerate().map(|(i, (p, q))| {
                vec![i.to_string(), cf.term(i).expect("term").to_string(), p.to_string(), q.to_string()]
            });
            let out = match format {
                OutputFormat::Csv => report::csv(&["index", "a", "p", "q"], rows),
                OutputFormat::Json => {
                    let conv: Vec<(String, String)> = conv.iter().map(|(p, q)| (p.to_string(), q.to_string())).collect();
                    format!(
                        "{}\n",
                        serde_json::to_string_pretty(&json!({
                            "partial_quotients": cf.partial_quotients.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
                            "periodic_tail": cf.periodic_tail,
                            "convergents": conv,
                        }))?
                    )
                }
            };
            Ok((out, 0))
        }
    }
    .and_then(|(out, code)| {
        match &cfg.output.path {
            Some(p) => std::fs::write(p, &out)?,
            None => std::io::stdout().write_all(out.as_bytes())?,
        }
        Ok((String::new(), code))
    })
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Hypothesis(_) | Error::RationalInput => 3,
        Error::Internal(_) => 4,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok((_, 0)) => ExitCode::SUCCESS,
        Ok((_, code)) => {
            eprintln!("error: check failed");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
