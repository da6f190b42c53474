//! Subcommand implementations.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use clap::Parser;
use serde::Serialize;

use qpuf_core::adversary::{
    run_attack_game, run_trap_experiment, AttackGameRecord, AttackMode, Attacker, DecisionRule, ForgeStrategy,
    QueryChoice, TrapExperimentConfig, TrapExperimentReport,
};
use qpuf_core::analysis::{
    avg_uniform_rows, bounds_rows, brute_force_cver, epsilon_grid, figure3_rows, figure6_rows, figure7_rows,
    figure8_rows, resources_rows, write_csv, OracleStrategy,
};
use qpuf_core::equality::TestKind;
use qpuf_core::protocol::{run_honest, trial_seed, Protocol};
use qpuf_core::qpuf::qgen;
use qpuf_core::SeedStream;

use crate::manifest::{strip_out, RunManifest};
use crate::{
    AnalyzeArgs, AttackArgs, AttackModeName, AttackerName, Cli, CliError, Command, OracleArgs, OracleStrategyName,
    QueryChoiceName, ReplayArgs, RuleName, RunArgs, StrategyName, Target, TestName,
};

pub fn dispatch(command: Command, argv: &[String]) -> Result<(), CliError> {
    match command {
        Command::Run(a) => run(a, argv),
        Command::Attack(a) => attack(a, argv),
        Command::Analyze(a) => analyze(a, argv),
        Command::Oracle(a) => oracle(a),
        Command::Replay(a) => replay(a),
    }
}

/// Collects output files and writes the manifest last.
struct Output {
    dir: PathBuf,
    files: Vec<PathBuf>,
    started: Instant,
}

impl Output {
    fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new(), started: Instant::now() })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.files.push(PathBuf::from(name));
        self.dir.join(name)
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let path = self.path(name);
        let text = serde_json::to_string_pretty(value).map_err(anyhow::Error::from)?;
        fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(())
    }

    fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        for r in rows {
            w.serialize(r).map_err(anyhow::Error::from)?;
        }
        w.flush()?;
        Ok(())
    }

    fn finish(self, argv: &[String], config: serde_json::Value, seed: u64) -> Result<(), CliError> {
        let manifest = RunManifest {
            command: strip_out(argv),
            config,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs: self.files,
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
        };
        manifest.write(&self.dir)?;
        Ok(())
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<serde_json::Value, CliError> {
    Ok(serde_json::to_value(v).map_err(anyhow::Error::from)?)
}

#[derive(Serialize)]
struct SummaryRow {
    protocol: String,
    attacker: String,
    mode: String,
    trials: u64,
    accepted: u64,
    rate: f64,
    ci_low: f64,
    ci_high: f64,
    upper_one_sided: f64,
    expected_rate: Option<f64>,
    formula_id: Option<String>,
    analytic_value: Option<f64>,
    flag: Option<String>,
    guess_accuracy: Option<f64>,
}

impl SummaryRow {
    fn from_record(r: &AttackGameRecord) -> Self {
        Self {
            protocol: r.protocol.to_string(),
            attacker: r.attacker.name().to_string(),
            mode: format!("{:?}", r.config.mode).to_lowercase(),
            trials: r.trials,
            accepted: r.estimate.successes,
            rate: r.estimate.rate,
            ci_low: r.estimate.ci_low,
            ci_high: r.estimate.ci_high,
            upper_one_sided: r.estimate.upper_one_sided,
            expected_rate: r.expected_rate,
            formula_id: r.bound.as_ref().map(|b| b.formula_id.clone()),
            analytic_value: r.bound.as_ref().map(|b| b.analytic_value),
            flag: r.bound.as_ref().map(|b| b.flag.to_string()),
            guess_accuracy: r.guess_accuracy.as_ref().map(|g| g.rate),
        }
    }
}

fn print_record(r: &AttackGameRecord) {
    let e = &r.estimate;
    println!(
        "{} {}: accept_rate {:.6} ({}/{}), 95% CI [{:.6}, {:.6}], one-sided upper {:.3e}",
        r.protocol,
        r.attacker.name(),
        e.rate,
        e.successes,
        e.trials,
        e.ci_low,
        e.ci_high,
        e.upper_one_sided
    );
    if let Some(x) = r.expected_rate {
        println!("  expected from per-round probabilities: {x:.6e}");
    }
    if let Some(b) = &r.bound {
        println!("  {}: {:.6e} ({})", b.formula_id, b.analytic_value, b.flag);
    }
    if let (Some(b), Some(f)) = (&r.bound_at_mean_fidelity, r.mean_fidelity_sq) {
        println!("  {} at delta = mean F^2 = {f:.4e}: {:.6e}", b.formula_id, b.analytic_value);
    }
    if let Some(g) = &r.guess_accuracy {
        println!("  per-round guess accuracy {:.6} ({}/{})", g.rate, g.successes, g.trials);
    }
}

fn run(a: RunArgs, argv: &[String]) -> Result<(), CliError> {
    let cfg = a.cfg.resolve(a.protocol)?;
    let mut out = Output::create(&a.out)?;
    let record = run_attack_game(a.protocol, &Attacker::Honest, &cfg, a.trials, cfg.seed, false)?;
    print_record(&record);
    out.json("summary.json", &record)?;
    out.csv("summary.csv", &[SummaryRow::from_record(&record)])?;
    if a.transcripts > 0 {
        let path = out.path("transcripts.jsonl");
        let mut f = std::io::BufWriter::new(fs::File::create(&path)?);
        for i in 0..a.transcripts.min(a.trials) {
            let result = run_honest(a.protocol, &cfg, trial_seed(cfg.seed, i))?;
            serde_json::to_writer(&mut f, &result).map_err(anyhow::Error::from)?;
            writeln!(f)?;
        }
        f.flush()?;
    }
    out.finish(argv, to_value(&cfg)?, cfg.seed)
}

fn attacker_from(a: &AttackArgs) -> Attacker {
    let query_choice = match a.query_choice {
        QueryChoiceName::Haar => QueryChoice::Haar,
        QueryChoiceName::Structured => QueryChoice::Structured,
    };
    match a.attacker {
        AttackerName::Honest => Attacker::Honest,
        AttackerName::HaarResponder => Attacker::HaarResponder,
        AttackerName::ClassicalIndependent => Attacker::ClassicalIndependent { alpha: a.alpha },
        AttackerName::ClassicalGlobal => Attacker::ClassicalGlobal,
        AttackerName::SubspaceForger => Attacker::SubspaceForger {
            learn: a.learn,
            query_choice,
            strategy: match a.strategy {
                StrategyName::BayesOptimal => ForgeStrategy::BayesOptimal,
                StrategyName::Mixed => ForgeStrategy::Mixed,
            },
        },
        AttackerName::QuantumCollective => Attacker::QuantumCollective {
            learn: a.learn,
            query_choice,
            test: test_kind(a.test),
            rule: rule(a),
            mode: attack_mode(a.attack_mode),
        },
    }
}

fn test_kind(t: TestName) -> TestKind {
    match t {
        TestName::Ideal => TestKind::Ideal,
        TestName::Swap => TestKind::Swap,
    }
}

fn rule(a: &AttackArgs) -> DecisionRule {
    match a.rule {
        RuleName::AcceptMeansValid => DecisionRule::AcceptMeansValid,
        RuleName::AlwaysValid => DecisionRule::AlwaysValid,
        RuleName::CoinFlip => DecisionRule::CoinFlip,
        RuleName::Threshold => DecisionRule::Threshold { min_overlap: a.threshold },
    }
}

fn attack_mode(m: AttackModeName) -> AttackMode {
    match m {
        AttackModeName::Collective => AttackMode::Collective,
        AttackModeName::Coherent => AttackMode::Coherent,
    }
}

#[derive(Serialize)]
struct TrapSummaryRow {
    n: u32,
    d: usize,
    rounds: usize,
    batch: usize,
    correct: u64,
    accuracy: f64,
    ci_low: f64,
    ci_high: f64,
    mean_correct_probability: f64,
    reference_accuracy: f64,
    valid_accuracy: f64,
    trap_accuracy: f64,
    batches: u64,
    joint_successes: u64,
    joint_rate: f64,
    predicted_joint: f64,
}

fn attack(a: AttackArgs, argv: &[String]) -> Result<(), CliError> {
    let cfg = a.cfg.resolve(a.protocol)?;
    let attacker = attacker_from(&a);
    let mut out = Output::create(&a.out)?;
    if a.attacker == AttackerName::QuantumCollective && !a.game {
        if a.protocol != Protocol::Lrv {
            return Err(CliError::Config("quantum-collective attacks lrv".into()));
        }
        let exp = TrapExperimentConfig {
            learn: a.learn,
            query_choice: match a.query_choice {
                QueryChoiceName::Haar => QueryChoice::Haar,
                QueryChoiceName::Structured => QueryChoice::Structured,
            },
            rounds: a.trap_rounds,
            batch: cfg.rounds,
            p: cfg.p,
            test: test_kind(a.test),
            rule: rule(&a),
            mode: attack_mode(a.attack_mode),
        };
        let root = SeedStream::new(cfg.seed);
        let mut device = qgen(cfg.dim()?, root.child(1));
        let report = run_trap_experiment(&mut device, &exp, root.child(2))?;
        print_trap(&report);
        out.json("trap.json", &report)?;
        out.csv("summary.csv", &[trap_row(&report)])?;
        let config = serde_json::json!({ "protocol": cfg, "experiment": exp });
        return out.finish(argv, config, cfg.seed);
    }
    let record = run_attack_game(a.protocol, &attacker, &cfg, a.trials, cfg.seed, a.trials_csv)?;
    print_record(&record);
    if a.trials_csv {
        out.csv("trials.csv", &record.per_trial)?;
    }
    out.json("attack.json", &AttackGameRecord { per_trial: Vec::new(), ..record.clone() })?;
    out.csv("summary.csv", &[SummaryRow::from_record(&record)])?;
    let config = serde_json::json!({ "protocol": cfg, "attacker": attacker, "trials": a.trials });
    out.finish(argv, config, cfg.seed)
}

fn reference_accuracy(r: &TrapExperimentReport) -> f64 {
    let d = r.learned_dimension as f64;
    let big_d = 2f64.powi(r.n as i32);
    0.5 + d / (2.0 * big_d)
}

fn trap_row(r: &TrapExperimentReport) -> TrapSummaryRow {
    TrapSummaryRow {
        n: r.n,
        d: r.learned_dimension,
        rounds: r.config.rounds,
        batch: r.config.batch,
        correct: r.accuracy.successes,
        accuracy: r.accuracy.rate,
        ci_low: r.accuracy.ci_low,
        ci_high: r.accuracy.ci_high,
        mean_correct_probability: r.mean_correct_probability,
        reference_accuracy: reference_accuracy(r),
        valid_accuracy: r.valid_accuracy,
        trap_accuracy: r.trap_accuracy,
        batches: r.joint.trials,
        joint_successes: r.joint.successes,
        joint_rate: r.joint.rate,
        predicted_joint: r.predicted_joint,
    }
}

fn print_trap(r: &TrapExperimentReport) {
    println!(
        "lrv quantum-collective: per-round guess accuracy {:.6} ({}/{}), 95% CI [{:.6}, {:.6}]",
        r.accuracy.rate, r.accuracy.successes, r.accuracy.trials, r.accuracy.ci_low, r.accuracy.ci_high
    );
    println!(
        "  n = {}, d = {}: exact mean {:.6}, reference 1/2 + d/(2D) = {:.6}",
        r.n,
        r.learned_dimension,
        r.mean_correct_probability,
        reference_accuracy(r)
    );
    println!("  valid rounds {:.6}, trap rounds {:.6}", r.valid_accuracy, r.trap_accuracy);
    println!(
        "  all {} marks of a batch: {:.6} ({}/{}), product of per-round accuracies {:.6e}",
        r.config.batch, r.joint.rate, r.joint.successes, r.joint.trials, r.predicted_joint
    );
}

fn analyze(a: AnalyzeArgs, argv: &[String]) -> Result<(), CliError> {
    let ns = |default: &[usize]| if a.n.is_empty() { default.to_vec() } else { a.n.clone() };
    let (name, rows, config) = match a.target {
        Target::Bounds => {
            let n = ns(&[8])[0];
            let m = a.m.unwrap_or(4);
            let tau = a.tau.unwrap_or(n as f64 / 4.0);
            let delta = a.delta.unwrap_or(0.0);
            let cfg = serde_json::json!({ "N": n, "M": m, "tau": tau, "delta": delta });
            ("bounds", bounds_rows(n, m, tau, delta)?, cfg)
        }
        Target::SweepFigure3 => {
            let tau = a.tau.unwrap_or(1.0);
            let n_max = a.n_max.unwrap_or(64);
            ("sweep-figure3", figure3_rows(tau, n_max)?, serde_json::json!({ "tau": tau, "Nmax": n_max }))
        }
        Target::SweepFigure6 => {
            let list = ns(&[16, 32, 64]);
            ("sweep-figure6", figure6_rows(&list)?, serde_json::json!({ "N": list }))
        }
        Target::SweepFigure7 => {
            let points = a.points.unwrap_or(11);
            let m = a.m.unwrap_or(4);
            ("sweep-figure7", figure7_rows(&epsilon_grid(points), m)?, serde_json::json!({ "points": points, "M": m }))
        }
        Target::SweepFigure8 => {
            let m_max = a.m_max.unwrap_or(10);
            let n_max = a.n_max.unwrap_or(20);
            ("sweep-figure8", figure8_rows(m_max, n_max)?, serde_json::json!({ "Mmax": m_max, "Nmax": n_max }))
        }
        Target::Resources => {
            let eps = a.epsilon.unwrap_or(1e-6);
            let m = a.m.unwrap_or(4);
            ("resources", resources_rows(eps, m)?, serde_json::json!({ "epsilon": eps, "M": m }))
        }
        Target::AvgUniformP => {
            let list = ns(&[100, 1000, 10000]);
            ("avg-uniform-p", avg_uniform_rows(&list)?, serde_json::json!({ "N": list }))
        }
    };
    let mut out = Output::create(&a.out)?;
    let path = out.path(&format!("{name}.csv"));
    let file = fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
    write_csv(&rows, std::io::BufWriter::new(file))?;
    println!("{name}: {} rows -> {}", rows.len(), path.display());
    out.finish(argv, config, 0)
}

fn oracle(a: OracleArgs) -> Result<(), CliError> {
    let strategy = match a.strategy {
        OracleStrategyName::Global => OracleStrategy::Global,
        OracleStrategyName::Independent => OracleStrategy::Independent { alpha: a.alpha },
        OracleStrategyName::FixedWeight => OracleStrategy::FixedWeight { ones: a.ones },
    };
    let report = brute_force_cver(a.n, a.tau, a.p, &strategy)?;
    let text = serde_json::to_string_pretty(&report).map_err(anyhow::Error::from)?;
    println!("{text}");
    if let Some(dir) = a.out {
        fs::create_dir_all(&dir)?;
        fs::write(dir.join("oracle.json"), text + "\n")?;
    }
    Ok(())
}

fn replay(a: ReplayArgs) -> Result<(), CliError> {
    let manifest = RunManifest::read(&a.manifest).with_context(|| format!("reading {}", a.manifest.display()))?;
    let mut args = manifest.command.clone();
    args.push("--out".into());
    args.push(a.out.display().to_string());
    let cli = Cli::try_parse_from(std::iter::once("qpuf-id".to_string()).chain(args.iter().cloned()))
        .map_err(|e| CliError::Config(format!("manifest command does not parse: {e}")))?;
    if matches!(cli.command, Command::Replay(_)) {
        return Err(CliError::Config("a manifest cannot replay another replay".into()));
    }
    // pin the recorded seed so QPUF_SEED cannot change a replay
    let mut cli = cli;
    if let Command::Run(r) = &mut cli.command {
        r.cfg.seed.get_or_insert(manifest.seed);
    }
    if let Command::Attack(r) = &mut cli.command {
        r.cfg.seed.get_or_insert(manifest.seed);
    }
    dispatch(cli.command, &args)
}
