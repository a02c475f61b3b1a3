use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tabkit::commands::{cmd_figure, cmd_rate_check, cmd_verify_bounds, BoundOptions, RateOptions};
use tabkit::config::{parse_config, ExperimentConfig, FigureId};
use tabkit::{init_threads, HarnessError};
use tabkit_core::evaluate::Method;

#[derive(Parser)]
#[command(name = "tabkit", version, about = "Transfer-around-boundary simulation harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce one of the simulation figures (band, flip, logistic).
    Figure {
        id: String,
        #[command(flatten)]
        flags: ExperimentFlags,
    },
    /// Run a sweep described by a configuration file.
    Run {
        #[command(flatten)]
        flags: ExperimentFlags,
    },
    /// Fit the log-log slope of K-NN excess risk against sample size.
    RateCheck {
        /// Sample sizes.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<usize>>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Monte-Carlo points per excess-risk estimate.
        #[arg(long)]
        mc: Option<usize>,
        /// q_knn or p_knn.
        #[arg(long)]
        method: Option<String>,
        /// Fit these mean risks instead of simulating.
        #[arg(long, value_delimiter = ',')]
        risks: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check ambiguity and signal-transfer bounds by Monte Carlo.
    VerifyBounds {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long)]
        str_reps: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long)]
        s: Option<usize>,
        /// Write every checked row to this CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct ExperimentFlags {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid values, comma separated.
    #[arg(long)]
    grid: Option<String>,
    /// Transfer exponent(s), comma separated.
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    n_q: Option<usize>,
    #[arg(long)]
    n_p: Option<usize>,
    #[arg(long)]
    n_test: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    c_tau: Option<f64>,
    #[arg(long)]
    k_q: Option<usize>,
    #[arg(long)]
    k_p: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    /// accuracy or agreement.
    #[arg(long)]
    metric: Option<String>,
    /// Methods, comma separated.
    #[arg(long)]
    methods: Option<String>,
    /// Choose the lasso penalty by the rate formula instead of CV.
    #[arg(long)]
    theory_params: bool,
    /// Rotate 3 beta_Q by exactly delta in the logistic design.
    #[arg(long)]
    exact_angle: bool,
}

impl ExperimentFlags {
    fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let mut push = |k: &'static str, val: Option<String>| {
            if let Some(x) = val {
                v.push((k, x));
            }
        };
        push("out", self.out.as_ref().map(|p| p.display().to_string()));
        push("reps", self.reps.map(|x| x.to_string()));
        push("seed", self.seed.map(|x| x.to_string()));
        push("grid", self.grid.clone());
        push("gamma", self.gamma.clone());
        push("n_q", self.n_q.map(|x| x.to_string()));
        push("n_p", self.n_p.map(|x| x.to_string()));
        push("n_test", self.n_test.map(|x| x.to_string()));
        push("tau", self.tau.map(|x| x.to_string()));
        push("c_tau", self.c_tau.map(|x| x.to_string()));
        push("k_q", self.k_q.map(|x| x.to_string()));
        push("k_p", self.k_p.map(|x| x.to_string()));
        push("d", self.d.map(|x| x.to_string()));
        push("s", self.s.map(|x| x.to_string()));
        push("metric", self.metric.clone());
        push("methods", self.methods.clone());
        push("theory_params", self.theory_params.then(|| "true".into()));
        push("exact_angle", self.exact_angle.then(|| "true".into()));
        v
    }

    /// File values over `base`, then flags over both.
    fn resolve(&self, base: ExperimentConfig) -> Result<ExperimentConfig, HarnessError> {
        let mut cfg = match &self.config {
            Some(p) => parse_config(p, &base)?,
            None => base,
        };
        for (k, v) in self.pairs() {
            cfg.set(k, &v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run_sweep(cfg: &ExperimentConfig) -> Result<(), HarnessError> {
    let (outcome, paths) = cmd_figure(cfg)?;
    for s in &outcome.summary {
        let metric = match cfg.metric {
            tabkit::config::Metric::Accuracy => s.accuracy,
            tabkit::config::Metric::Agreement => s.bayes_agreement,
        };
        let gamma = s.gamma.map(|g| format!(" gamma={g}")).unwrap_or_default();
        println!(
            "{}{gamma} {}={} {:<13} {}={:.4} (se {:.4}, n={})",
            s.scenario,
            s.param_name,
            s.param_value,
            s.method.name(),
            cfg.metric.name(),
            metric.mean,
            metric.se,
            s.count
        );
    }
    println!("wrote {}", paths.detail.display());
    println!("wrote {}", paths.summary.display());
    println!("wrote {}", paths.svg.display());
    println!("wrote {}", paths.script.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    init_threads()?;
    match cli.command {
        Command::Figure { id, flags } => {
            let id: FigureId = id.parse()?;
            run_sweep(&flags.resolve(ExperimentConfig::figure(id))?)
        }
        Command::Run { flags } => {
            if flags.config.is_none() {
                return Err(HarnessError::Config("run needs --config".into()));
            }
            run_sweep(&flags.resolve(ExperimentConfig::figure(FigureId::Band))?)
        }
        Command::RateCheck {
            grid,
            reps,
            seed,
            gamma,
            mc,
            method,
            risks,
            out,
        } => {
            let d = RateOptions::default();
            let opts = RateOptions {
                n_grid: grid.unwrap_or(d.n_grid),
                reps: reps.unwrap_or(d.reps),
                n_mc: mc.unwrap_or(d.n_mc),
                seed: seed.unwrap_or(d.seed),
                gamma: gamma.unwrap_or(d.gamma),
                method: match method {
                    Some(m) => m.parse::<Method>().map_err(|e| HarnessError::Config(e.to_string()))?,
                    None => d.method,
                },
                risks,
                out,
                ..d
            };
            let r = cmd_rate_check(&opts)?;
            for (n, risk) in r.n_grid.iter().zip(&r.mean_risk) {
                println!("n={n} mean_excess_risk={risk:.6}");
            }
            println!("slope={:.4} se={:.4} theory={:.4}", r.fit.slope, r.fit.se, r.theory);
            Ok(())
        }
        Command::VerifyBounds {
            seed,
            mc,
            str_reps,
            d,
            s,
            out,
        } => {
            let base = BoundOptions::default();
            let opts = BoundOptions {
                seed: seed.unwrap_or(base.seed),
                n_mc: mc.unwrap_or(base.n_mc),
                str_reps: str_reps.unwrap_or(base.str_reps),
                d: d.unwrap_or(base.d),
                s: s.unwrap_or(base.s),
                ..base
            };
            let rows = cmd_verify_bounds(&opts)?;
            let failed: Vec<_> = rows.iter().filter(|r| !r.passes()).collect();
            if let Some(path) = out {
                let mut text = String::from("family,gamma,delta,z,lhs,se,rhs,pass\n");
                for r in &rows {
                    text.push_str(&format!(
                        "{},{},{},{},{},{},{},{}\n",
                        r.family,
                        r.gamma,
                        r.delta,
                        r.z,
                        r.lhs,
                        r.se,
                        r.rhs,
                        r.passes()
                    ));
                }
                tabkit::report::write_text(&path, &text)?;
            }
            for fam in ["band", "logistic", "signal_transfer"] {
                let n = rows.iter().filter(|r| r.family == fam).count();
                let bad = failed.iter().filter(|r| r.family == fam).count();
                if n > 0 {
                    println!("{fam}: {} of {n} inequalities hold", n - bad);
                }
            }
            for r in &failed {
                println!(
                    "FAIL {} gamma={} delta={} z={} lhs={:.6} se={:.6} rhs={:.6}",
                    r.family, r.gamma, r.delta, r.z, r.lhs, r.se, r.rhs
                );
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(HarnessError::Bound(format!("{} inequalities violated", failed.len())))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tabkit: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

