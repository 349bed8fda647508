use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use newman_lab::extremal::{crest_factor, newman_polynomial_l1_with};
use newman_lab::io::{self, Provenance};
use newman_lab::metrics::{convergence_sweep, ensemble_study, sup_error};
use newman_lab::phase_opt::{minimize, stationarity_report, Ensemble, InitKind, OptReport, StationarityReport};
use newman_lab::spectral::{newman_phase, PhaseSequence, Spectrum};
use serde::de::DeserializeOwned;
use serde::Serialize;

mod config;

use config::{
    CrestPhase, EnsembleConfig, ExtremalConfig, OptimizeConfig, ReconstructConfig, SweepConfig, LARGE_LIMIT,
};

#[derive(Parser)]
#[command(name = "newman-lab", version, about = "Quadratic-phase spectral recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct one spectrum at one size (reconstruct.csv).
    Reconstruct(Common),
    /// Error against size for one spectrum (sweep.csv).
    Sweep(Common),
    /// Random sum-of-sinusoids ensemble (ensemble_raw.csv, ensemble_box.csv).
    Ensemble(Common),
    /// Minimize the ensemble phase objective (optimize.json, optimize_trace.csv).
    Optimize(Common),
    /// L1 norms and crest factors (extremal_l1.csv, extremal_crest.csv).
    Extremal(Common),
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `out_dir` in the config. Defaults to `.`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, env = "NEWMAN_LAB_THREADS")]
    threads: Option<usize>,
    /// Permit sizes above 2^20.
    #[arg(long)]
    allow_large: bool,
}

/// Failure classes with stable exit codes.
enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Numerical(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

impl From<newman_lab::Error> for Failure {
    fn from(e: newman_lab::Error) -> Self {
        use newman_lab::Error::*;
        match e {
            NonFinite { .. } | Format(_) | OracleCapExceeded { .. } | LengthMismatch { .. } => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Loaded config plus everything needed to write artifacts.
struct Run<C> {
    cfg: C,
    text: String,
    out: PathBuf,
    seed: Option<u64>,
}

impl<C> Run<C> {
    fn provenance(&self, kind: &str) -> Provenance {
        let prov = Provenance::new(kind, self.text.clone());
        match self.seed {
            Some(s) => prov.with_override("seed", s),
            None => prov,
        }
    }

    fn write(&self, name: &str, contents: &str) -> Outcome<()> {
        std::fs::create_dir_all(&self.out)
            .and_then(|()| std::fs::write(self.out.join(name), contents))
            .map_err(|e| Failure::Numerical(format!("writing {}: {e}", self.out.join(name).display())))
    }
}

fn load<C: DeserializeOwned>(
    common: &Common,
    out_dir: impl Fn(&C) -> Option<String>,
    sizes: impl Fn(&C) -> Vec<usize>,
) -> Outcome<Run<C>> {
    let text = std::fs::read_to_string(&common.config)
        .map_err(|e| Failure::Usage(format!("reading {}: {e}", common.config.display())))?;
    let cfg: C = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("config {}: {e}", common.config.display())))?;
    if !common.allow_large {
        if let Some(n) = sizes(&cfg).into_iter().find(|&n| n > LARGE_LIMIT) {
            return Err(Failure::Usage(format!("size {n} exceeds 2^20; pass --allow-large to run it")));
        }
    }
    let out = common
        .out
        .clone()
        .or_else(|| out_dir(&cfg).map(PathBuf::from))
        .unwrap_or_else(|| Path::new(".").to_path_buf());
    Ok(Run { cfg, text, out, seed: common.seed })
}

fn reconstruct(common: &Common) -> Outcome<()> {
    let run = load::<ReconstructConfig>(common, |c| c.out_dir.clone(), ReconstructConfig::sizes)?;
    let target = run.cfg.source.sample(run.cfg.n)?;
    let recon = run.cfg.pipeline.run(&target)?;
    let err = sup_error(&recon, &target)?;
    if !err.is_finite() {
        return Err(Failure::Numerical("reconstruction produced non-finite values".into()));
    }
    eprintln!("n = {}, sup_error = {err}", run.cfg.n);
    run.write("reconstruct.csv", &io::reconstruct_csv(&run.provenance("reconstruct"), &target, &recon)?)
}

fn sweep(common: &Common) -> Outcome<()> {
    let run = load::<SweepConfig>(common, |c| c.out_dir.clone(), SweepConfig::sizes)?;
    let records = convergence_sweep(&run.cfg.source, &run.cfg.sizes, &run.cfg.pipeline)?;
    if records.iter().any(|r| !r.sup_error.is_finite() || !r.rms_error.is_finite()) {
        return Err(Failure::Numerical("sweep produced non-finite errors".into()));
    }
    run.write("sweep.csv", &io::sweep_csv(&run.provenance("sweep"), &records)?)
}

fn ensemble(common: &Common) -> Outcome<()> {
    let mut run = load::<EnsembleConfig>(common, |c| c.out_dir.clone(), EnsembleConfig::sizes)?;
    if let Some(seed) = run.seed {
        run.cfg.ensemble.seed = seed;
    }
    let levels = ensemble_study(&run.cfg.ensemble, &run.cfg.sizes, &run.cfg.pipeline)?;
    run.write("ensemble_raw.csv", &io::ensemble_raw_csv(&run.provenance("ensemble_raw"), &levels)?)?;
    run.write("ensemble_box.csv", &io::ensemble_box_csv(&run.provenance("ensemble_box"), &levels)?)
}

#[derive(Serialize)]
struct OptimizeOutput<'a> {
    n: usize,
    ensemble_count: usize,
    initial_objective: f64,
    final_objective: f64,
    steps: usize,
    optimization: &'a OptReport,
    stationarity: Option<StationarityReport>,
}

fn optimize(common: &Common) -> Outcome<()> {
    let mut run = load::<OptimizeConfig>(common, |c| c.out_dir.clone(), OptimizeConfig::sizes)?;
    if let Some(seed) = run.seed {
        run.cfg.ensemble.seed = seed;
        run.cfg.init = match run.cfg.init {
            InitKind::Random { .. } => InitKind::Random { seed },
            InitKind::NewmanPerturbed { radius, .. } => InitKind::NewmanPerturbed { radius, seed },
            InitKind::Newman => InitKind::Newman,
        };
    }
    let cfg = &run.cfg;
    let ensemble = Ensemble::from_spec(&cfg.ensemble, cfg.n, cfg.objective)?;
    let report = minimize(&cfg.init.initial_theta(cfg.n)?, &ensemble, cfg.init, &cfg.optimizer)?;
    let stationarity = match cfg.stationarity_samples {
        0 => None,
        k => Some(stationarity_report(&ensemble, k, cfg.ensemble.seed)?),
    };
    eprintln!(
        "objective {} -> {} in {} steps ({:?})",
        report.initial_objective(),
        report.final_objective(),
        report.steps(),
        report.stop_reason
    );
    let output = OptimizeOutput {
        n: cfg.n,
        ensemble_count: ensemble.len(),
        initial_objective: report.initial_objective(),
        final_objective: report.final_objective(),
        steps: report.steps(),
        optimization: &report,
        stationarity,
    };
    run.write("optimize.json", &io::json_artifact(&run.provenance("optimize"), &output)?)?;
    run.write("optimize_trace.csv", &io::opt_trace_csv(&run.provenance("optimize_trace"), &report)?)
}

fn extremal(common: &Common) -> Outcome<()> {
    let run = load::<ExtremalConfig>(common, |c| c.out_dir.clone(), ExtremalConfig::sizes)?;
    let cfg = &run.cfg;
    if cfg.degrees.is_empty() && cfg.tone_counts.is_empty() {
        return Err(Failure::Usage("extremal config needs `degrees` or `tone_counts`".into()));
    }
    if !cfg.degrees.is_empty() {
        let reports = cfg
            .degrees
            .iter()
            .map(|&d| newman_polynomial_l1_with(d, cfg.l1_oversample, cfg.polynomial_phase))
            .collect::<newman_lab::Result<Vec<_>>>()?;
        run.write("extremal_l1.csv", &io::l1_csv(&run.provenance("extremal_l1"), &reports)?)?;
    }
    if !cfg.tone_counts.is_empty() {
        let mut rows = Vec::new();
        for &phase in &cfg.crest_phases {
            for &n in &cfg.tone_counts {
                let m = Spectrum::constant(n, 1.0)?;
                let phi = match phase {
                    CrestPhase::Newman => newman_phase(n)?,
                    CrestPhase::Zero => PhaseSequence::zeros(n),
                };
                rows.push((phase.as_str().to_string(), crest_factor(&m, &phi, cfg.crest_oversample)?));
            }
        }
        run.write("extremal_crest.csv", &io::crest_csv(&run.provenance("extremal_crest"), &rows)?)?;
    }
    Ok(())
}

fn dispatch(command: &Command) -> Outcome<()> {
    let (common, f): (&Common, fn(&Common) -> Outcome<()>) = match command {
        Command::Reconstruct(c) => (c, reconstruct),
        Command::Sweep(c) => (c, sweep),
        Command::Ensemble(c) => (c, ensemble),
        Command::Optimize(c) => (c, optimize),
        Command::Extremal(c) => (c, extremal),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = common.threads {
        if t == 0 {
            return Err(Failure::Usage("--threads must be >= 1".into()));
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build().map_err(|e| Failure::Numerical(format!("thread pool: {e}")))?;
    pool.install(|| f(common))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Numerical(msg) => eprintln!("numerical failure: {msg}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
