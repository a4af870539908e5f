use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use telegraph_core::density::{density_p, log_density};
use telegraph_core::experiments::{
    compare_report, estimate_crossing, fit_decay_slope, ldp_curve, sharp_bound_check, CompareConfig,
    CrossingEstimate, HorizonPolicy, SharpBoundCheck, SlopeFit, CROSSING_CSV_HEADER, LDP_CSV_HEADER,
};
use telegraph_core::sampler::PATH_CSV_HEADER;
use telegraph_core::{
    decay_rate_closed, decay_rate_numeric, rate_id, rate_is, sample_path, Error, ModelParams, ProcessKind, RngStream,
};

use crate::error::CliError;
use crate::manifest::RunManifest;
use crate::{usage, Command, Common};

fn load_params(path: &Path) -> Result<ModelParams, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    serde_json::from_str(&text).map_err(|e| CliError::ParamFile {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

struct Run {
    out_dir: PathBuf,
    manifest: RunManifest,
}

impl Run {
    fn start(common: &Common, command: String, seed: Option<u64>) -> Result<(Self, ModelParams), CliError> {
        let params = load_params(&common.params)?;
        if let Some(n) = common.threads {
            if n == 0 {
                return Err(usage("--threads must be at least 1"));
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| usage(e.to_string()))?;
        }
        std::fs::create_dir_all(&common.out_dir)
            .map_err(|e| CliError::io(common.out_dir.display().to_string(), e))?;
        let run = Run {
            out_dir: common.out_dir.clone(),
            manifest: RunManifest::new(params.raw(), command, seed, common.threads),
        };
        Ok((run, params))
    }

    fn emit(&mut self, name: &str, contents: &[u8]) -> Result<(), CliError> {
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(path.display().to_string(), e))?;
        self.manifest.outputs.push(name.to_string());
        Ok(())
    }

    fn emit_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.emit(name, text.as_bytes())
    }

    fn finish(self) -> Result<(), CliError> {
        self.manifest.write(&self.out_dir)
    }
}

fn csv(header: &str, rows: impl IntoIterator<Item = String>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

fn default_grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| if i == steps { hi } else { lo + (hi - lo) * i as f64 / steps as f64 })
        .collect()
}

pub fn run(command: Command, argv: String) -> Result<(), CliError> {
    match command {
        Command::Density { common, t, grid } => {
            let (mut run, p) = Run::start(&common, argv, None)?;
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::NonPositiveTime(t).into());
            }
            let xs = grid.map_or_else(|| default_grid(-p.c2() * t, p.c1() * t, 200), |g| g.0);
            let rows = xs
                .iter()
                .map(|&x| Ok(format!("{x},{t},{},{}", density_p(x, t, &p)?, log_density(x, t, &p)?)))
                .collect::<Result<Vec<_>, Error>>()?;
            run.manifest.budget("grid_points", xs.len());
            run.emit("density.csv", csv("x,t,p,log_p", rows).as_bytes())?;
            run.finish()
        }
        Command::Rate { common, grid } => {
            let (mut run, p) = Run::start(&common, argv, None)?;
            let xs = grid.map_or_else(|| default_grid(-p.c2(), p.c1(), 300), |g| g.0);
            let rows = xs
                .iter()
                .map(|&x| format!("{x},{},{}", rate_id(x, &p), rate_is(x, &p)));
            run.manifest.budget("grid_points", xs.len());
            run.emit("rate.csv", csv("x,I_D,I_S", rows).as_bytes())?;
            run.finish()
        }
        Command::Decay { common, process } => {
            let (mut run, p) = Run::start(&common, argv, None)?;
            let report = decay_rate_numeric(process, &p)?;
            println!("{}", serde_json::to_string(&report)?);
            run.emit_json("decay.json", &report)?;
            run.finish()
        }
        Command::Simulate {
            common,
            process,
            seed,
            n,
            horizon,
        } => {
            let (mut run, p) = Run::start(&common, argv, Some(seed))?;
            let chunks = (0..n)
                .into_par_iter()
                .map(|i| {
                    let s = sample_path(process, &p, horizon, RngStream::new(seed, i))?;
                    let mut buf = Vec::new();
                    s.write_csv_rows(i, &mut buf).expect("writing to memory");
                    Ok(buf)
                })
                .collect::<Result<Vec<_>, Error>>()?;
            let mut out = format!("{PATH_CSV_HEADER}\n").into_bytes();
            chunks.into_iter().for_each(|c| out.extend(c));
            run.manifest.budget("n_paths", n);
            run.manifest.budget("horizon", horizon);
            run.manifest.budget("process", process.to_string());
            run.emit("paths.csv", &out)?;
            run.finish()
        }
        Command::LdpVerify { common, x, eps, t } => {
            let (mut run, p) = Run::start(&common, argv, None)?;
            let mut rows = Vec::new();
            for &centre in &x.0 {
                rows.extend(ldp_curve(centre, eps, &t.0, &p)?.iter().map(|pt| pt.csv_row()));
            }
            run.manifest.budget("eps", eps);
            run.manifest.budget("times", t.0.clone());
            run.emit("ldp_curve.csv", csv(LDP_CSV_HEADER, rows).as_bytes())?;
            run.finish()
        }
        Command::Crossing {
            common,
            process,
            seed,
            n,
            grid,
            abandon_margin,
            t_max,
        } => {
            let (mut run, p) = Run::start(&common, argv, Some(seed))?;
            let w = decay_rate_closed(process, &p)?;
            let policy = HorizonPolicy {
                abandon_margin: abandon_margin.unwrap_or(HorizonPolicy::for_decay_rate(w).abandon_margin),
                t_max,
            };
            run.manifest.budget("n_paths", n);
            run.manifest.budget("process", process.to_string());
            run.manifest.budget("abandon_margin", policy.abandon_margin);
            run.manifest.budget("t_max", policy.t_max);
            run.manifest.budget("residual_bias", policy.residual_bias(w));
            let (estimates, failure) = match estimate_crossing(&grid.0, &p, process, n, seed, policy) {
                Ok(est) => (est, None),
                Err(Error::BudgetExceeded {
                    truncated,
                    n_paths,
                    estimates,
                }) => {
                    let err = Error::BudgetExceeded {
                        truncated,
                        n_paths,
                        estimates: estimates.clone(),
                    };
                    (estimates, Some(err))
                }
                Err(e) => return Err(e.into()),
            };
            run.emit(
                "crossing.csv",
                csv(CROSSING_CSV_HEADER, estimates.iter().map(CrossingEstimate::csv_row)).as_bytes(),
            )?;
            let summary = FitSummary::new(process, w, &estimates);
            println!("{}", serde_json::to_string(&summary)?);
            run.emit_json("fit.json", &summary)?;
            run.finish()?;
            match failure {
                Some(e) => Err(e.into()),
                None => Ok(()),
            }
        }
        Command::Compare {
            common,
            seed,
            grid_size,
            lln_paths,
            lln_time,
            crossing_paths,
            q_grid,
        } => {
            let (mut run, p) = Run::start(&common, argv, Some(seed))?;
            let config = CompareConfig {
                grid_size,
                lln_paths,
                lln_time,
                crossing_paths,
                q_grid: q_grid.0,
                seed,
            };
            run.manifest.budget("grid_size", grid_size);
            run.manifest.budget("lln_paths", lln_paths);
            run.manifest.budget("crossing_paths", crossing_paths);
            let report = compare_report(&p, &config)?;
            run.emit_json("compare.json", &report)?;
            let mut line = String::new();
            for c in &report.checks {
                let _ = write!(line, "{}={} ", c.name, if c.passed { "pass" } else { "fail" });
            }
            println!("{}", line.trim_end());
            run.finish()
        }
    }
}

#[derive(Debug, Serialize)]
struct FitSummary {
    process: ProcessKind,
    w_closed: f64,
    fit: Option<SlopeFit>,
    fit_error: Option<String>,
    sharp_bound: Option<SharpBoundCheck>,
    sharp_bound_error: Option<String>,
}

impl FitSummary {
    fn new(process: ProcessKind, w: f64, estimates: &[CrossingEstimate]) -> Self {
        let (fit, fit_error) = match fit_decay_slope(estimates) {
            Ok(f) => (Some(f), None),
            Err(e) => (None, Some(e.to_string())),
        };
        let (sharp_bound, sharp_bound_error) = match process {
            ProcessKind::Standard => match sharp_bound_check(estimates, w) {
                Ok(c) => (Some(c), None),
                Err(e) => (None, Some(e.to_string())),
            },
            ProcessKind::Damped => (None, None),
        };
        FitSummary {
            process,
            w_closed: w,
            fit,
            fit_error,
            sharp_bound,
            sharp_bound_error,
        }
    }
}
