//! Config-driven experiment runs and their artifact files.
//!
//! Every run writes its data files plus `manifest.json` into the output
//! directory. Data files depend only on the resolved config; the manifest
//! keeps the one volatile field (`run.timestamp_unix`) apart from the rest.

mod config;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::json;

pub use config::{Command, ExperimentConfig, WeightsConfig, WeightsKind};

use crate::counterexample::{build_pair, dimension_gap_report, verify_ratio_condition};
use crate::dimension::{continuity_sweep, dimension_estimate, smb_check, write_sweep_csv};
use crate::entropy::{
    delta_recursion_check, entropy_bruteforce, entropy_profile, lemma2_scan, write_window_csv,
    WindowTable, BRUTE_FORCE_LIMIT,
};
use crate::error::{Error, Result};
use crate::measure::{path_rng, MarkovMeasure};

pub const THREADS_ENV: &str = "DYADIM_THREADS";

/// Sizes the global rayon pool from `DYADIM_THREADS` when it is set.
pub fn init_thread_pool() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| Error::param(format!("{THREADS_ENV}={raw} is not a positive integer")))?;
    // a pool built earlier in the process wins; that is not an error here
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: Command,
    pub output_dir: PathBuf,
    /// File names written, manifest last.
    pub files: Vec<String>,
    /// Human-readable lines, 6 decimals.
    pub summary: Vec<String>,
}

struct Outputs<'a> {
    dir: &'a Path,
    files: Vec<String>,
}

impl Outputs<'_> {
    fn write(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let mut out = BufWriter::new(File::create(self.dir.join(name))?);
        f(&mut out)?;
        out.flush()?;
        self.files.push(name.to_string());
        Ok(())
    }
}

/// Runs `command` with `config`, writing into `config.output_dir`
/// (default `out/<command>`).
pub fn run(command: Command, config: &ExperimentConfig) -> Result<RunReport> {
    config.validate(command)?;
    let mut resolved = config.clone();
    resolved.command = Some(command);
    let dir = resolved
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("out").join(command.name()));
    resolved.output_dir = Some(dir.clone());
    std::fs::create_dir_all(&dir)?;

    let mut out = Outputs {
        dir: &dir,
        files: Vec::new(),
    };
    let summary = dispatch(command, &resolved, &mut out)?;

    let mut files = out.files.clone();
    files.push("manifest.json".into());
    let manifest = json!({
        "crate": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "config": resolved,
        "outputs": files,
        "run": {
            "timestamp_unix": SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        },
    });
    out.write("manifest.json", |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest)?;
        writeln!(w)?;
        Ok(())
    })?;
    Ok(RunReport {
        command,
        output_dir: dir,
        files,
        summary,
    })
}

fn measure(config: &ExperimentConfig) -> Result<MarkovMeasure> {
    let w = config
        .weights
        .as_ref()
        .ok_or_else(|| Error::param("missing weights"))?;
    Ok(MarkovMeasure::new(w.build()?))
}

fn dispatch(command: Command, c: &ExperimentConfig, out: &mut Outputs) -> Result<Vec<String>> {
    match command {
        Command::Entropy => {
            let m = measure(c)?;
            let profile = entropy_profile(&m, c.horizon)?;
            let mut lines = vec![format!(
                "H_{n} = {:.6} nats, c_{n} = {:.6}",
                profile.entropy(c.horizon),
                profile.normalized(c.horizon),
                n = c.horizon
            )];
            let oracle = if c.oracle {
                if c.horizon > BRUTE_FORCE_LIMIT {
                    return Err(Error::SizeLimit {
                        requested: c.horizon,
                        limit: BRUTE_FORCE_LIMIT,
                    });
                }
                let brute = (1..=c.horizon)
                    .map(|n| entropy_bruteforce(&m, n))
                    .collect::<Result<Vec<_>>>()?;
                let worst = brute
                    .iter()
                    .zip(profile.entropies())
                    .map(|(b, h)| (b - h).abs())
                    .fold(0.0, f64::max);
                lines.push(format!("max |recursion - enumeration| = {worst:.3e} nats"));
                Some(brute)
            } else {
                None
            };
            out.write("entropy.csv", |w| Ok(profile.write_csv(w, oracle.as_deref())?))?;
            Ok(lines)
        }
        Command::Dimension => {
            let est = dimension_estimate(&measure(c)?, c.horizon, c.window)?;
            out.write("dimension.csv", |w| Ok(est.write_csv(w)?))?;
            Ok(vec![est.summary()])
        }
        Command::Sample => {
            let m = measure(c)?;
            let trace = m.sample_path(c.depth, &mut path_rng(c.seed, 0))?;
            out.write("path.csv", |w| Ok(trace.write_csv(w)?))?;
            let report = smb_check(&m, c.depth, c.paths, c.seed, &c.checkpoints)?;
            out.write("smb.csv", |w| Ok(report.write_csv(w)?))?;
            Ok(report
                .summary
                .iter()
                .map(|s| {
                    format!(
                        "n={}: c_n={:.6}, median exponent={:.6}, mean dev={:.6}, max dev={:.6}",
                        s.checkpoint, s.reference, s.median_exponent, s.mean_dev, s.max_dev
                    )
                })
                .collect())
        }
        Command::WindowGap => {
            let m = measure(c)?;
            let table = WindowTable::new(&m, c.n_max, c.k_max)?;
            out.write("window_gap.csv", |w| Ok(write_window_csv(&table, w)?))?;
            let check = delta_recursion_check(&m, c.n_max, c.k_max)?;
            Ok(vec![format!(
                "{} (n, k) pairs: {} recursion violations, {} eta violations, max delta/eta = {:.6}",
                check.rows.len(),
                check.recursive_violations,
                check.eta_violations,
                check.max_eta_ratio
            )])
        }
        Command::LemmaScan => {
            let scan = lemma2_scan(c.grid_step)?;
            out.write("lemma_scan.csv", |w| {
                writeln!(w, "p,q,lhs,rhs,excess")?;
                for v in &scan.violations {
                    writeln!(w, "{},{},{},{},{}", v.p, v.q, v.lhs, v.rhs, v.excess())?;
                }
                Ok(())
            })?;
            Ok(vec![format!(
                "{} grid points, {} violations, max excess {:.6}",
                scan.points_checked,
                scan.violations.len(),
                scan.max_excess()
            )])
        }
        Command::Continuity => {
            let w = c.weights.as_ref().expect("validated").build()?;
            let rows = continuity_sweep(&w, &c.zetas, c.perturbation, c.seed, c.horizon, c.window)?;
            out.write("sweep.csv", |out| Ok(write_sweep_csv(&rows, out)?))?;
            Ok(rows
                .iter()
                .map(|r| {
                    format!(
                        "zeta={:.6}: lower diff {:.6}, upper diff {:.6} ({})",
                        r.zeta, r.lower_diff, r.upper_diff, r.mode
                    )
                })
                .collect())
        }
        Command::Counterexample => {
            let (mu, nu, plan) = build_pair(c.epsilon, c.delta, c.stages)?;
            out.write("stage_plan.json", |w| plan.write_json(w))?;
            let ratio = verify_ratio_condition(&mu, &nu, plan.deepest())?;
            out.write("ratio_report.csv", |w| Ok(ratio.write_csv(w)?))?;
            let gap = dimension_gap_report(&mu, &nu, &plan);
            out.write("dimension_gap.json", |w| {
                serde_json::to_writer_pretty(&mut *w, &gap)?;
                writeln!(w)?;
                Ok(())
            })?;
            let mut lines = vec![format!(
                "stage depths: {}",
                plan.depths()
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(", ")
            )];
            lines.push(format!("sup log-ratio gap = {:.6}", ratio.sup_log_gap));
            lines.push(format!(
                "dim mu = {:.6}, dim nu <= {:.6}, gap = {:.6} (asymptotic)",
                gap.dim_mu, gap.dim_nu_bound, gap.gap
            ));
            Ok(lines)
        }
    }
}
