//! The `hplab` command-line front end.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, Pair};
use crate::equilibrium::{solve_scalar_equilibrium, solve_vector_equilibrium, type2_limit_measure};
use crate::error::{Error, Result};
use crate::hermite_pade::{
    hp_type1_germ, hp_type2_germ, hp_type2_markov, type1_zeros, type2_zeros, HPTypeI, HPTypeII, ZeroCloud,
};
use crate::maps::Interval;
use crate::markov::MarkovPair;
use crate::precision::PrecisionContext;
use crate::series::{algebraic_germ, AlgebraicFunctionSpec};
use crate::verify::{
    check_corollary1, check_lemma1, check_lemma2, check_strong_asymptotics, fraction_near, ks_distance,
};

pub const BUNDLED_MARKOV: &str = include_str!("../../../configs/markov.json");
pub const BUNDLED_EXAMPLES: [&str; 4] = [
    include_str!("../../../configs/example1.json"),
    include_str!("../../../configs/example2.json"),
    include_str!("../../../configs/example3.json"),
    include_str!("../../../configs/example4.json"),
];

/// Exit status when a verification suite misses its tolerance.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hplab", version, about = "Hermite-Pade polynomials, equilibrium measures and zero-distribution checks")]
pub struct Cli {
    /// Experiment configuration (JSON); bundled defaults are used when absent.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override of `precision_bits`.
    #[arg(long = "prec-bits", global = true)]
    pub prec_bits: Option<u32>,
    /// Output directory (default: the config's `output_dir`, else `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Width of the worker pool.
    #[arg(long, global = true, env = "HPLAB_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Type II polynomials q_2n and their zeros.
    Type2 {
        /// Comma-separated indices overriding `degrees`.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// Type I polynomials Q_n,0..2 of an algebraic function and their zeros.
    Type1 {
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
    /// Scalar and vector equilibrium measures.
    Equilibrium {
        #[arg(long, value_enum, default_value_t = Mode::Both)]
        mode: Mode,
    },
    /// Zero clouds of one of the four bundled examples.
    Figure {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
        example: u8,
    },
    /// Verification suites writing comparison reports.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Scalar,
    Vector,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Lemma1,
    Corollary1,
    Strong,
    Lemma2,
    All,
}

/// Files written by one command, checksummed into the manifest.
struct Output {
    dir: PathBuf,
    files: BTreeMap<String, String>,
}

impl Output {
    fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Output {
            dir,
            files: BTreeMap::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files.insert(name.to_string(), hex::encode(Sha256::digest(contents.as_bytes())));
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, &s)
    }

    fn manifest(&self, command: &str, cfg: Option<&ExperimentConfig>, status: &str, error: Option<String>) -> Result<()> {
        let manifest = json!({
            "tool": "hplab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "status": status,
            "error": error,
            "config": cfg,
            "files": self.files,
            "unchecksummed": ["timings.json"],
        });
        let mut s = serde_json::to_string_pretty(&manifest)?;
        s.push('\n');
        fs::write(self.dir.join("MANIFEST.json"), s)?;
        Ok(())
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_NUMERICAL,
    }
}

fn load_config(cli: &Cli, fallback: &str) -> Result<ExperimentConfig> {
    let text = match &cli.config {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?,
        None => fallback.to_string(),
    };
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(b) = cli.prec_bits {
        cfg.precision_bits = b;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = Some(out.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn with_degrees(mut cfg: ExperimentConfig, n: &Option<Vec<usize>>) -> Result<ExperimentConfig> {
    if let Some(n) = n {
        cfg.degrees = n.clone();
        cfg.validate()?;
    }
    Ok(cfg)
}

fn require_markov(cfg: &ExperimentConfig, what: &str) -> Result<MarkovPair> {
    match cfg.pair.resolve()? {
        Pair::Markov(p) => Ok(p),
        Pair::Algebraic(_) => Err(Error::Config(format!("pair: {what} needs kind \"markov\""))),
    }
}

fn require_algebraic(cfg: &ExperimentConfig, what: &str) -> Result<AlgebraicFunctionSpec> {
    match cfg.pair.resolve()? {
        Pair::Algebraic(s) => Ok(s),
        Pair::Markov(_) => Err(Error::Config(format!("pair: {what} needs an algebraic kind"))),
    }
}

pub fn type2_for(pair: &Pair, n: usize, ctx: &PrecisionContext) -> Result<HPTypeII> {
    match pair {
        Pair::Markov(p) => hp_type2_markov(p, n, ctx),
        Pair::Algebraic(spec) => {
            let g = algebraic_germ(spec, 3 * n + 8, ctx)?;
            hp_type2_germ(&g, &g.mul(&g), n, ctx)
        }
    }
}

pub fn type1_for(spec: &AlgebraicFunctionSpec, n: usize, ctx: &PrecisionContext) -> Result<HPTypeI> {
    let g = algebraic_germ(spec, 3 * n + 8, ctx)?;
    hp_type1_germ(&g, n, ctx)
}

fn type2_summary(hp: &HPTypeII, cloud: &ZeroCloud, root_residual: f64) -> Value {
    let in_e = cloud.points.iter().all(|z| z.im == 0.0 && z.re.abs() < 1.0);
    json!({
        "n": hp.n,
        "degree": hp.degree,
        "nullity": hp.nullity,
        "degenerate": hp.is_degenerate(),
        "germ_residual": hp.germ_residual,
        "system_residual": hp.system_residual,
        "root_residual": root_residual,
        "quadrature_nodes": hp.quadrature_nodes,
        "zeros": cloud.len(),
        "all_zeros_real_in_e": in_e,
    })
}

fn write_timings(out: &mut Output, timings: &BTreeMap<String, f64>) -> Result<()> {
    let s = serde_json::to_string_pretty(timings)? + "\n";
    fs::write(out.dir.join("timings.json"), s)?;
    Ok(())
}

fn cmd_type2(cfg: &ExperimentConfig, out: &mut Output) -> Result<bool> {
    let ctx = cfg.context()?;
    let pair = cfg.pair.resolve()?;
    let results: Vec<(HPTypeII, ZeroCloud, f64, f64)> = cfg
        .degrees
        .par_iter()
        .map(|&n| {
            let t = Instant::now();
            let hp = type2_for(&pair, n, &ctx)?;
            let (cloud, res) = type2_zeros(&hp, &ctx)?;
            Ok((hp, cloud, res, t.elapsed().as_secs_f64()))
        })
        .collect::<Result<_>>()?;
    let mut summary = Vec::new();
    let mut timings = BTreeMap::new();
    for (hp, cloud, res, secs) in &results {
        out.write(&format!("zeros_type2_n{}.csv", hp.n), &cloud.to_csv())?;
        summary.push(type2_summary(hp, cloud, *res));
        timings.insert(format!("type2_n{}", hp.n), *secs);
    }
    out.write_json("summary_type2.json", &json!({ "precision_bits": ctx.bits(), "results": summary }))?;
    write_timings(out, &timings)?;
    Ok(true)
}

fn type1_summary(hp: &HPTypeI) -> Value {
    json!({
        "n": hp.n,
        "degrees": [hp.q0.degree(), hp.q1.degree(), hp.q2.degree()],
        "remainder_order": hp.remainder_order,
        "nullity": hp.nullity,
        "system_residual": hp.system_residual,
    })
}

fn cmd_type1(cfg: &ExperimentConfig, out: &mut Output) -> Result<bool> {
    let ctx = cfg.context()?;
    let spec = require_algebraic(cfg, "type1")?;
    let results: Vec<(HPTypeI, [ZeroCloud; 3], f64)> = cfg
        .degrees
        .par_iter()
        .map(|&n| {
            let t = Instant::now();
            let hp = type1_for(&spec, n, &ctx)?;
            let clouds = type1_zeros(&hp, &ctx)?;
            Ok((hp, clouds, t.elapsed().as_secs_f64()))
        })
        .collect::<Result<_>>()?;
    let mut summary = Vec::new();
    let mut timings = BTreeMap::new();
    for (hp, clouds, secs) in &results {
        for (j, cloud) in clouds.iter().enumerate() {
            out.write(&format!("zeros_type1_Q{j}_n{}.csv", hp.n), &cloud.to_csv())?;
        }
        summary.push(type1_summary(hp));
        timings.insert(format!("type1_n{}", hp.n), *secs);
    }
    out.write_json("summary_type1.json", &json!({ "precision_bits": ctx.bits(), "results": summary }))?;
    write_timings(out, &timings)?;
    Ok(true)
}

fn cmd_equilibrium(cfg: &ExperimentConfig, mode: Mode, out: &mut Output) -> Result<bool> {
    let pair = require_markov(cfg, "equilibrium")?;
    let f = &pair.support;
    let nodes = cfg.nodes.equilibrium;
    let tol = cfg.tolerance("equilibrium_residual");
    let single: Option<Interval> = match f.components() {
        [j] => Some(*j),
        _ => None,
    };
    if mode != Mode::Scalar && single.is_none() {
        return Err(Error::Config("pair.support: the vector problem needs a single interval F".into()));
    }
    let mut report = BTreeMap::<String, Value>::new();
    report.insert("nodes".into(), json!(nodes));
    report.insert("tolerance".into(), json!(tol));
    let mut ok = true;
    let scalar = if mode != Mode::Vector {
        let s = solve_scalar_equilibrium(f, nodes, tol)?;
        out.write("equilibrium_scalar.json", &(s.to_json() + "\n"))?;
        report.insert("scalar_residual".into(), json!(s.residual));
        report.insert("scalar_energy".into(), json!(s.energy));
        ok &= s.residual <= tol;
        Some(s)
    } else {
        None
    };
    let vector = if mode != Mode::Scalar {
        let j = single.expect("checked above");
        let s = solve_vector_equilibrium(&j, nodes, tol)?;
        out.write("equilibrium_vector.json", &(s.to_json() + "\n"))?;
        report.insert("vector_residual".into(), json!(s.residual));
        ok &= s.residual <= tol;
        Some(s)
    } else {
        None
    };
    if let (Some(s), Some(v)) = (&scalar, &vector) {
        let mu = type2_limit_measure(&s.measure, cfg.nodes.balayage)?;
        let ks = ks_distance(&mu, &v.measure)?;
        report.insert("ks_mu_composed_lambda_e".into(), json!(ks));
        ok &= ks <= cfg.tolerance("mu_lambda_e_ks");
    }
    report.insert("passed".into(), json!(ok));
    out.write_json("equilibrium_report.json", &report)?;
    Ok(ok)
}

fn cmd_figure(cfg: &ExperimentConfig, example: u8, out: &mut Output) -> Result<bool> {
    let ctx = cfg.context()?;
    let spec = require_algebraic(cfg, "figure")?;
    let fig = cfg.figure.clone().unwrap_or_default();
    let t = Instant::now();
    let (t2, t1) = rayon::join(
        || -> Result<ZeroCloud> {
            let hp = type2_for(&Pair::Algebraic(spec.clone()), fig.type2_n, &ctx)?;
            Ok(type2_zeros(&hp, &ctx)?.0)
        },
        || -> Result<(HPTypeI, [ZeroCloud; 3])> {
            let hp = type1_for(&spec, fig.type1_n, &ctx)?;
            let clouds = type1_zeros(&hp, &ctx)?;
            Ok((hp, clouds))
        },
    );
    let (type2, (hp1, type1)) = (t2?, t1?);
    for (j, cloud) in type1.iter().enumerate() {
        out.write(&format!("zeros_type1_Q{j}_n{}.csv", fig.type1_n), &cloud.to_csv())?;
    }
    out.write(&format!("zeros_type2_n{}.csv", fig.type2_n), &type2.to_csv())?;
    let target = if fig.type2_target.is_empty() {
        vec![Interval::unit()]
    } else {
        fig.type2_target.clone()
    };
    let type1_points: Vec<Complex64> = type1.iter().flat_map(|c| c.points.clone()).collect();
    let far = 1.0 - fraction_near(&type1_points, &spec.intervals, cfg.tolerance("figure_type1_distance"));
    let near = fraction_near(&type2.points, &target, cfg.tolerance("figure_near"));
    let imag = if type2.is_empty() {
        0.0
    } else {
        type2.points.iter().filter(|z| z.im.abs() <= cfg.tolerance("figure_imag")).count() as f64 / type2.len() as f64
    };
    let report = json!({
        "example": example,
        "precision_bits": ctx.bits(),
        "type1": {
            "n": fig.type1_n,
            "remainder_order": hp1.remainder_order,
            "zeros": type1_points.len(),
            "fraction_far_from_e": far,
        },
        "type2": {
            "n": fig.type2_n,
            "zeros": type2.len(),
            "fraction_small_imag": imag,
            "fraction_near_target": near,
            "target": target,
        },
        "thresholds": {
            "fraction": cfg.tolerance("figure_fraction"),
            "imag": cfg.tolerance("figure_imag"),
            "type1_distance": cfg.tolerance("figure_type1_distance"),
            "near": cfg.tolerance("figure_near"),
        },
        "note": cfg.note,
    });
    out.write_json("figure_report.json", &report)?;
    let mut timings = BTreeMap::new();
    timings.insert(format!("figure_example{example}"), t.elapsed().as_secs_f64());
    write_timings(out, &timings)?;
    Ok(true)
}

fn cmd_verify(cfg: &ExperimentConfig, suite: Suite, out: &mut Output) -> Result<bool> {
    let ctx = cfg.context()?;
    let run = |s: Suite| suite == Suite::All || suite == s;
    let mut passed = true;
    let mut timings = BTreeMap::new();
    if run(Suite::Lemma2) {
        let t = Instant::now();
        let r = check_lemma2(cfg.nodes.lemma2, cfg.tolerance("lemma2_spread"), &PrecisionContext::default())?;
        passed &= r.passed;
        out.write("report_lemma2.json", &(r.to_json() + "\n"))?;
        timings.insert("lemma2".to_string(), t.elapsed().as_secs_f64());
    }
    if suite == Suite::Lemma2 {
        write_timings(out, &timings)?;
        return Ok(passed);
    }
    let pair = require_markov(cfg, "verify")?;
    if run(Suite::Lemma1) {
        let t = Instant::now();
        let r = check_lemma1(&pair, &cfg.degrees, &cfg.check_settings("lemma1_ks"), &ctx)?;
        passed &= r.passed;
        out.write("report_lemma1.json", &(r.to_json() + "\n"))?;
        timings.insert("lemma1".to_string(), t.elapsed().as_secs_f64());
    }
    if run(Suite::Corollary1) {
        let t = Instant::now();
        let r = check_corollary1(&pair, &cfg.degrees, &cfg.check_settings("corollary1_ks"), &ctx)?;
        let mu_ok = r
            .details
            .get("ks_mu_lambda_e")
            .is_none_or(|k| *k <= cfg.tolerance("mu_lambda_e_ks"));
        passed &= r.passed && mu_ok;
        out.write("report_corollary1.json", &(r.to_json() + "\n"))?;
        timings.insert("corollary1".to_string(), t.elapsed().as_secs_f64());
    }
    if run(Suite::Strong) {
        let t = Instant::now();
        let points = [Complex64::new(2.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(-3.0, 0.0)];
        let r = check_strong_asymptotics(
            &pair,
            &cfg.degrees,
            &points,
            cfg.tolerance("strong_asymptotics"),
            &cfg.check_settings("lemma1_ks"),
            &ctx,
        )?;
        passed &= r.passed;
        out.write("report_strong.json", &(r.to_json() + "\n"))?;
        timings.insert("strong".to_string(), t.elapsed().as_secs_f64());
    }
    write_timings(out, &timings)?;
    Ok(passed)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Type2 { .. } => "type2",
        Command::Type1 { .. } => "type1",
        Command::Equilibrium { .. } => "equilibrium",
        Command::Figure { .. } => "figure",
        Command::Verify { .. } => "verify",
    }
}

fn default_out(cfg: &ExperimentConfig) -> PathBuf {
    cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
}

/// Runs the parsed command and returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be positive");
            return EXIT_CONFIG;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let name = command_name(&cli.command);
    let fallback = match &cli.command {
        Command::Type1 { .. } => BUNDLED_EXAMPLES[0],
        Command::Figure { example } => BUNDLED_EXAMPLES[*example as usize - 1],
        _ => BUNDLED_MARKOV,
    };
    let cfg = match load_config(cli, fallback).and_then(|c| match &cli.command {
        Command::Type2 { n } | Command::Type1 { n } | Command::Verify { n, .. } => with_degrees(c, n),
        _ => Ok(c),
    }) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            if let Some(dir) = &cli.out {
                if let Ok(out) = Output::new(dir.clone()) {
                    let _ = out.manifest(name, None, "failed", Some(e.to_string()));
                }
            }
            return exit_code(&e);
        }
    };
    let mut out = match Output::new(default_out(&cfg)) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = match &cli.command {
        Command::Type2 { .. } => cmd_type2(&cfg, &mut out),
        Command::Type1 { .. } => cmd_type1(&cfg, &mut out),
        Command::Equilibrium { mode } => cmd_equilibrium(&cfg, *mode, &mut out),
        Command::Figure { example } => cmd_figure(&cfg, *example, &mut out),
        Command::Verify { suite, .. } => cmd_verify(&cfg, *suite, &mut out),
    };
    let (status, code, error) = match result {
        Ok(true) => ("ok", 0, None),
        Ok(false) => ("check-failed", EXIT_CHECK_FAILED, None),
        Err(e) => {
            eprintln!("error: {e}");
            ("failed", exit_code(&e), Some(e.to_string()))
        }
    };
    if let Err(e) = out.manifest(name, Some(&cfg), status, error) {
        eprintln!("error: cannot write manifest: {e}");
        return EXIT_NUMERICAL;
    }
    code
}

/// Parses the process arguments and runs; clap usage errors exit with 2.
pub fn main() -> i32 {
    let cli = Cli::parse();
    run(&cli)
}
