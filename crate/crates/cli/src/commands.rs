//! One function per subcommand. Each returns `Ok(true)` when the answer (or
//! every check) is correct.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use bvsim_core::bv::{
    classical_solve, run_original_bv, run_refined_bv, Backend, BitString, ParityOracle, RunOptions,
};
use bvsim_core::nmr::compiled_suite;
use bvsim_core::spectro::DoubletReading;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::pipeline::run_nmr;
use crate::report::Report;
use crate::{Algorithm, Command};

/// Above this size the per-step impurity trace is skipped: it keeps four
/// copies of the dense state alive.
pub const TRACE_LIMIT: usize = 20;

pub fn dispatch(
    command: Command,
    config: &Config,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<bool> {
    match command {
        Command::Run {
            a,
            backend,
            algorithm,
            out: file,
            timing,
        } => {
            let report = cmd_run(&a, backend, algorithm, config, timing)?;
            emit(&report, out, file.as_deref())?;
            Ok(report.get("a_measured") == Some(&a.to_string()[..]))
        }
        Command::Sweep {
            n,
            trials,
            backend,
            seed,
            timing,
        } => {
            let report = cmd_sweep(
                n,
                trials,
                backend,
                seed.unwrap_or(config.seed),
                config,
                timing,
            )?;
            emit(&report, out, None)?;
            Ok(report.get("success_rate") == Some("1"))
        }
        Command::Nmr { a, out: prefix } => cmd_nmr(&a, &prefix, config, out, err),
        Command::Fidelity => cmd_fidelity(config, out),
        Command::Bench {
            max_n,
            dense_max_n,
            out: file,
        } => {
            let (csv, ok) = cmd_bench(max_n, dense_max_n, config)?;
            match file {
                Some(path) => write_file(&path, &csv)?,
                None => out.write_all(csv.as_bytes())?,
            }
            Ok(ok)
        }
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn emit(report: &Report, out: &mut dyn Write, file: Option<&Path>) -> anyhow::Result<()> {
    let text = report.to_string();
    out.write_all(text.as_bytes())?;
    if let Some(path) = file {
        write_file(path, &text)?;
    }
    Ok(())
}

fn run_options(config: &Config, n: usize, backend: Backend, seed: u64) -> RunOptions {
    RunOptions {
        dense_limit: config.dense_limit,
        seed,
        record_trace: backend == Backend::Product || n <= TRACE_LIMIT,
    }
}

fn impurity_field(value: Option<f64>) -> String {
    value.map_or_else(|| "not_recorded".to_string(), bvsim_core::fmt::sig)
}

pub fn cmd_run(
    a: &BitString,
    backend: Backend,
    algorithm: Algorithm,
    config: &Config,
    timing: bool,
) -> anyhow::Result<Report> {
    let n = a.len();
    let mut oracle = ParityOracle::new(a.clone());
    let opts = run_options(config, n, backend, config.seed);
    let start = Instant::now();
    let (measured, certain, impurity, backend_name) = match algorithm {
        Algorithm::Refined => {
            let run = run_refined_bv(&mut oracle, backend, &opts)?;
            let imp = run.max_impurity();
            (
                run.answer,
                run.certain,
                impurity_field(imp),
                backend.to_string(),
            )
        }
        Algorithm::Original => {
            if backend != Backend::Dense {
                bail!("the original algorithm needs the (n+1)-qubit bit oracle and runs on the dense backend only");
            }
            let run = run_original_bv(&mut oracle, &opts)?;
            let imp = run.max_impurity();
            (
                run.answer,
                run.certain,
                impurity_field(imp),
                backend.to_string(),
            )
        }
        Algorithm::Classical => (
            classical_solve(&mut oracle)?,
            true,
            "n/a".into(),
            "classical".into(),
        ),
    };
    let elapsed = start.elapsed().as_secs_f64();

    let mut r = Report::new("run");
    r.text("algorithm", format!("{algorithm:?}").to_lowercase())
        .text("n", n)
        .text("a_true", a)
        .text("a_measured", &measured)
        .text("queries_used", oracle.queries())
        .text("backend", backend_name)
        .text("max_impurity", impurity)
        .text("certain", certain)
        .text("seed", config.seed);
    if timing {
        r.num("wall_time_s", elapsed);
    }
    Ok(r)
}

pub fn cmd_sweep(
    n: usize,
    trials: u64,
    backend: Backend,
    seed: u64,
    config: &Config,
    timing: bool,
) -> anyhow::Result<Report> {
    if n == 0 || trials == 0 {
        bail!("sweep needs n >= 1 and trials >= 1");
    }
    if backend == Backend::Dense && n > config.dense_limit {
        bail!(
            "dense backend refused: n = {n} exceeds dense_limit = {}",
            config.dense_limit
        );
    }
    let exhaustive = n < 64 && trials >= 1u64 << n;
    let count = if exhaustive { 1u64 << n } else { trials };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let (mut successes, mut max_queries) = (0u64, 0u64);
    let mut max_impurity: Option<f64> = Some(0.0);
    let start = Instant::now();
    for i in 0..count {
        let a = if exhaustive {
            BitString::from_index(i as usize, n)
        } else {
            BitString::random(n, &mut rng)
        };
        let mut oracle = ParityOracle::new(a.clone());
        let opts = run_options(config, n, backend, seed.wrapping_add(i));
        let run = run_refined_bv(&mut oracle, backend, &opts)?;
        if run.certain && run.answer == a {
            successes += 1;
        }
        max_queries = max_queries.max(oracle.queries());
        max_impurity = match (max_impurity, run.max_impurity()) {
            (Some(m), Some(x)) => Some(m.max(x)),
            _ => None,
        };
    }
    let elapsed = start.elapsed().as_secs_f64();

    let mut r = Report::new("sweep");
    r.text("n", n)
        .text("backend", backend)
        .text("mode", if exhaustive { "exhaustive" } else { "random" })
        .text("seed", seed)
        .text("trials", count)
        .text("successes", successes)
        .num("success_rate", successes as f64 / count as f64)
        .text("max_queries_per_run", max_queries)
        .text("max_impurity", impurity_field(max_impurity));
    if timing {
        r.num("mean_wall_time_s", elapsed / count as f64);
    }
    Ok(r)
}

fn sign(x: f64) -> &'static str {
    if x > 0.0 {
        "+"
    } else if x < 0.0 {
        "-"
    } else {
        "0"
    }
}

fn doublet_fields(r: &mut Report, prefix: &str, d: &DoubletReading) {
    r.text(&format!("{prefix}_sign"), sign(d.integral))
        .num(&format!("{prefix}_integral"), d.integral)
        .num(&format!("{prefix}_center_hz"), d.center)
        .num(&format!("{prefix}_splitting_hz"), d.splitting);
}

pub fn cmd_nmr(
    a: &BitString,
    prefix: &str,
    config: &Config,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> anyhow::Result<bool> {
    let o = run_nmr(a, config)?;
    let path = |suffix: &str| PathBuf::from(format!("{prefix}{suffix}"));

    write_file(&path("_reference_fid.csv"), &o.reference_fid.to_csv())?;
    write_file(&path("_experiment_fid.csv"), &o.experiment_fid.to_csv())?;
    write_file(
        &path("_reference_spectrum.csv"),
        &o.reference_spectrum.to_csv(),
    )?;
    write_file(
        &path("_experiment_spectrum.csv"),
        &o.experiment_spectrum.to_csv(),
    )?;
    write_file(&path("_sequence.txt"), &o.experiment.sequence.to_text())?;

    let mut r = Report::new("nmr");
    r.text("a_true", a)
        .text(
            "a_decoded",
            o.decoded
                .as_ref()
                .map_or_else(|_| "inconclusive".to_string(), |d| d.to_string()),
        )
        .text("gradient", config.gradient)
        .text("prep_delay", config.prep_delay)
        .num(
            "prepared_excess_fraction",
            o.reference.prepared.excess_fraction(0),
        )
        .num("phase_rad", o.reference_spectrum.phase_applied)
        .num("noise_floor", o.floor)
        .num("resolution_hz", o.experiment_spectrum.resolution());
    for d in &o.readings {
        doublet_fields(&mut r, &d.spin.to_string(), d);
    }
    for d in &o.reference_readings {
        doublet_fields(&mut r, &format!("reference_{}", d.spin), d);
    }
    emit(&r, out, Some(&path("_report.txt")))?;
    if let Err(e) = &o.decoded {
        writeln!(err, "decode failed: {e}")?;
    }
    Ok(o.success())
}

pub fn cmd_fidelity(config: &Config, out: &mut dyn Write) -> anyhow::Result<bool> {
    let suite = compiled_suite(&config.spin())?;
    writeln!(
        out,
        "{:<12} {:>10} {:>16}",
        "sequence", "fidelity", "coupling_phase"
    )?;
    let mut ok = true;
    for c in &suite {
        let phase = c
            .coupling_phase
            .map_or_else(|| "-".to_string(), bvsim_core::fmt::sig);
        writeln!(out, "{:<12} {:>10.6} {:>16}", c.name, c.fidelity, phase)?;
        ok &= c.fidelity >= 1.0 - config.fidelity_tol;
    }
    Ok(ok)
}

fn bench_sizes(dense_max: usize, product_max: usize) -> (Vec<usize>, Vec<usize>) {
    let dense = (1..=dense_max)
        .filter(|n| n % 2 == 0 || *n == dense_max)
        .collect();
    let mut product: Vec<usize> = std::iter::successors(Some(10usize), |n| n.checked_mul(10))
        .take_while(|&n| n <= product_max)
        .collect();
    if product.last() != Some(&product_max) && product_max > 0 {
        product.push(product_max);
    }
    (dense, product)
}

pub fn cmd_bench(
    max_n: usize,
    dense_max_n: usize,
    config: &Config,
) -> anyhow::Result<(String, bool)> {
    if dense_max_n > config.dense_limit {
        bail!(
            "dense backend refused: n = {dense_max_n} exceeds dense_limit = {}",
            config.dense_limit
        );
    }
    let (dense, product) = bench_sizes(dense_max_n, max_n);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let opts = RunOptions {
        dense_limit: config.dense_limit,
        seed: config.seed,
        record_trace: false,
    };
    let mut csv = String::from("n,backend,seconds\n");
    let mut ok = true;
    for (backend, sizes) in [(Backend::Dense, dense), (Backend::Product, product)] {
        for n in sizes {
            let a = BitString::random(n, &mut rng);
            let mut oracle = ParityOracle::new(a.clone());
            let start = Instant::now();
            let run = run_refined_bv(&mut oracle, backend, &opts)?;
            let secs = start.elapsed().as_secs_f64();
            ok &= run.certain && run.answer == a;
            csv.push_str(&format!("{n},{backend},{}\n", bvsim_core::fmt::sig(secs)));
        }
    }
    Ok((csv, ok))
}
