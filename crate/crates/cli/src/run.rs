//! Execute one job: build the oracle, run the mapped operations, write the
//! CSV/JSON artifacts and the final report.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use num_complex::Complex64;

use momidx_core::{
    alpha_sequence, audit_inequalities, bpe_map, bpe_verdict, density_verdict,
    estimate_limit_lenient, gamma_at_sequence, gamma_sequence, gamma_shift_crosscheck,
    lambda_sequence, szego_verdict, AffineMap, IndexSequence, MatrixOracle, Warning,
};

use crate::config::JobConfig;
use crate::report::{
    CrosscheckSummary, MapSummary, MomentsSummary, Report, TransformSummary,
};
use crate::JobArgs;

pub fn run(command: &str, args: &JobArgs) -> anyhow::Result<i32> {
    let started = Instant::now();
    let text = if args.config.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).context("reading config from stdin")?;
        buf
    } else {
        fs::read_to_string(&args.config)
            .with_context(|| format!("cannot read config {}", args.config.display()))?
    };
    let cfg = JobConfig::parse(&text)?;
    if let Some(declared) = &cfg.command {
        if declared != command {
            bail!("config error at 'command': config says '{declared}' but the subcommand is '{command}'");
        }
    }
    let out_dir: PathBuf = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)
        .with_context(|| format!("cannot create output directory {}", out_dir.display()))?;

    let echo: serde_json::Value = serde_json::from_str(&text).expect("parsed once already");
    let mut report = Report::new(command, args.seed, echo);

    match command {
        "indexes" => run_indexes(&cfg, args, &out_dir, &mut report)?,
        "szego" => run_szego(&cfg, args, &out_dir, &mut report)?,
        "density" => run_density(&cfg, args, &out_dir, &mut report)?,
        "bpe" => run_bpe(&cfg, args, &out_dir, &mut report)?,
        "map" => run_map(&cfg, args, &out_dir, &mut report)?,
        "transform" => run_transform(&cfg, args, &out_dir, &mut report)?,
        "moments" => run_moments(&cfg, args, &out_dir, &mut report)?,
        other => bail!("unknown command '{other}'"),
    }

    report.timing_ms = started.elapsed().as_millis();
    let code = report.exit_code();
    let report_path = out_dir.join("report.json");
    fs::write(&report_path, serde_json::to_string_pretty(&report).context("serializing report")?)
        .with_context(|| format!("cannot write {}", report_path.display()))?;
    println!("wrote {}", report_path.display());
    for v in &report.verdicts {
        println!("{:?}: {:?} (value {:.9})", v.question, v.answer, v.basis.value);
    }
    Ok(code)
}

fn write_file(out_dir: &Path, name: &str, contents: &str, report: &mut Report) -> anyhow::Result<()> {
    let path = out_dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    report.files.push(name.to_string());
    Ok(())
}

fn write_sequence(
    out_dir: &Path,
    name: &str,
    key: &str,
    seq: &IndexSequence,
    cfg: &JobConfig,
    report: &mut Report,
) -> anyhow::Result<()> {
    write_file(out_dir, name, &seq.to_csv(), report)?;
    report
        .estimates
        .insert(key.to_string(), estimate_limit_lenient(seq, &cfg.tolerances().limits()));
    report.add_warnings(&seq.warnings);
    Ok(())
}

fn checked_oracle(cfg: &JobConfig, n: usize) -> anyhow::Result<MatrixOracle> {
    let oracle = cfg.build_oracle(n)?;
    if let Some(cap) = oracle.max_order() {
        if n > cap {
            bail!("config error at 'n': order {n} exceeds the explicit matrix order {cap}");
        }
    }
    Ok(oracle)
}

fn run_indexes(
    cfg: &JobConfig,
    args: &JobArgs,
    out_dir: &Path,
    report: &mut Report,
) -> anyhow::Result<()> {
    let n = cfg.order(args.max_order, "indexes")?;
    let oracle = checked_oracle(cfg, n)?;
    report.order_requested = Some(n);

    let lambda = lambda_sequence(&oracle, n)?;
    let gamma = gamma_sequence(&oracle, n)?;
    let alpha = alpha_sequence(&oracle, n)?;
    report.order_reached = Some(gamma.last_order());
    write_sequence(out_dir, "lambda.csv", "lambda", &lambda, cfg, report)?;
    write_sequence(out_dir, "gamma.csv", "gamma", &gamma, cfg, report)?;
    write_sequence(out_dir, "alpha.csv", "alpha", &alpha, cfg, report)?;
    if let Some(z0) = cfg.z0_complex() {
        let at = gamma_at_sequence(&oracle, z0, n)?;
        write_sequence(out_dir, "gamma_at.csv", "gamma_at", &at, cfg, report)?;
    }
    report.audit = Some(audit_inequalities(&oracle, n)?);
    Ok(())
}

fn run_szego(
    cfg: &JobConfig,
    args: &JobArgs,
    out_dir: &Path,
    report: &mut Report,
) -> anyhow::Result<()> {
    let n = cfg.order(args.max_order, "szego")?;
    let measure = cfg.require_measure("szego")?;
    let tol = cfg.tolerances();
    let verdict = szego_verdict(measure, n, &tol.quadrature(), &tol.limits())?;
    report.order_requested = Some(n);

    let oracle = MatrixOracle::moment(measure.clone(), tol.quadrature())?;
    let gamma = gamma_sequence(&oracle, n)?;
    report.order_reached = Some(gamma.last_order());
    write_sequence(out_dir, "gamma.csv", "gamma", &gamma, cfg, report)?;
    report.add_warnings(&verdict.warnings);
    report.verdicts.push(verdict);
    Ok(())
}

fn run_density(
    cfg: &JobConfig,
    args: &JobArgs,
    out_dir: &Path,
    report: &mut Report,
) -> anyhow::Result<()> {
    let n = cfg.order(args.max_order, "density")?;
    let measure = cfg.require_measure("density")?;
    let z_ref = cfg.z0_complex().unwrap_or(Complex64::ZERO);
    let over = cfg.applicability_override.unwrap_or(false);
    let tol = cfg.tolerances();
    let verdict = density_verdict(measure, z_ref, n, over, &tol.quadrature(), &tol.limits())?;
    report.order_requested = Some(n);

    let oracle = MatrixOracle::moment(measure.clone(), tol.quadrature())?;
    let at = gamma_at_sequence(&oracle, z_ref, n)?;
    report.order_reached = Some(at.last_order());
    write_sequence(out_dir, "gamma_at.csv", "gamma_at", &at, cfg, report)?;
    report.add_warnings(&verdict.warnings);
    report.verdicts.push(verdict);
    Ok(())
}

fn run_bpe(
    cfg: &JobConfig,
    args: &JobArgs,
    out_dir: &Path,
    report: &mut Report,
) -> anyhow::Result<()> {
    let n = cfg.order(args.max_order, "bpe")?;
    let z0 = cfg.require_z0("bpe")?;
    let oracle = checked_oracle(cfg, n)?;
    let tol = cfg.tolerances();
    report.order_requested = Some(n);

    let verdict = bpe_verdict(&oracle, z0, n, &tol.limits())?;
    let at = gamma_at_sequence(&oracle, z0, n)?;
    report.order_reached = Some(at.last_order());
    write_sequence(out_dir, "gamma_at.csv", "gamma_at", &at, cfg, report)?;
    report.add_warnings(&verdict.warnings);
    report.verdicts.push(verdict);

    if cfg.crosscheck.unwrap_or(false) {
        let cc = gamma_shift_crosscheck(&oracle, z0, n)?;
        let mut csv = String::from("order,direct,conjugated\n");
        for i in 0..cc.orders_compared {
            csv.push_str(&format!("{i},{:.17e},{:.17e}\n", cc.direct[i], cc.conjugated[i]));
        }
        write_file(out_dir, "crosscheck.csv", &csv, report)?;
        report.add_warnings(&cc.warnings);
        report.crosscheck = Some(CrosscheckSummary {
            z0: [z0.re, z0.im],
            orders_compared: cc.orders_compared,
            max_rel_gap: cc.max_rel_gap,
        });
    }
    Ok(())
}

fn run_map(
    cfg: &JobConfig,
    args: &JobArgs,
    out_dir: &Path,
    report: &mut Report,
) -> anyhow::Result<()> {
    let n = cfg.order(args.max_order, "map")?;
    let grid = cfg.require_grid("map")?;
    let oracle = checked_oracle(cfg, n)?;
    let threads = std::env::var("MOMIDX_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| std::thread::available_parallelism().map(|p| p.get()).unwrap_or(1));
    let map = bpe_map(&oracle, grid, n, threads)?;
    report.order_requested = Some(n);
    report.order_reached = Some(map.order);
    write_file(out_dir, "gamma_map.csv", &map.to_csv(), report)?;
    let overflow_points = map
        .warnings
        .iter()
        .filter(|w| matches!(w, Warning::KernelOverflow { .. }))
        .count();
    report.add_warnings(&map.warnings);
    report.map = Some(MapSummary { order: map.order, points: map.values.len(), overflow_points });
    Ok(())
}

fn run_transform(
    cfg: &JobConfig,
    args: &JobArgs,
    out_dir: &Path,
    report: &mut Report,
) -> anyhow::Result<()> {
    let measure = cfg.require_measure("transform")?;
    let (alpha, beta) = cfg.require_affine("transform")?;
    let pushed = measure.pushforward(alpha, beta)?;
    write_file(
        out_dir,
        "transformed_measure.json",
        &serde_json::to_string_pretty(&pushed).context("serializing measure")?,
        report,
    )?;

    let mut summary = TransformSummary {
        alpha: [alpha.re, alpha.im],
        beta: [beta.re, beta.im],
        two_path_max_dev: None,
    };
    // with an order given, also materialize the conjugated section and
    // cross-check it against the pushforward moments
    if let Some(n) = args.max_order.or(cfg.n) {
        let tol = cfg.tolerances();
        let inner = MatrixOracle::moment(measure.clone(), tol.quadrature())?;
        let map = AffineMap::new(alpha, beta)?;
        let conj = MatrixOracle::conjugated(inner, map);
        let section = conj.section(n)?;
        write_file(
            out_dir,
            "conjugated_section.json",
            &MatrixOracle::section_to_json(&section),
            report,
        )?;
        let pushed_oracle = MatrixOracle::moment(pushed, tol.quadrature())?;
        let pushed_section = pushed_oracle.section(n)?;
        let mut dev = 0f64;
        for j in 0..=n {
            for k in 0..=n {
                dev = dev.max((section.at(j, k) - pushed_section.at(j, k)).norm());
            }
        }
        summary.two_path_max_dev = Some(dev);
        report.order_requested = Some(n);
        report.order_reached = Some(n);
        report.add_warnings(&conj.warnings());
    }
    report.transform = Some(summary);
    Ok(())
}

fn run_moments(
    cfg: &JobConfig,
    args: &JobArgs,
    out_dir: &Path,
    report: &mut Report,
) -> anyhow::Result<()> {
    let measure = cfg.require_measure("moments")?;
    let degrees = match cfg.degrees.or(args.max_order).or(cfg.n) {
        Some(d) => d,
        None => bail!("config error: 'moments' requires field 'degrees' (or 'n')"),
    };
    let tol = cfg.tolerances();
    let oracle = MatrixOracle::moment(measure.clone(), tol.quadrature())?;
    let section = oracle.section(degrees)?;
    write_file(out_dir, "moments.json", &MatrixOracle::section_to_json(&section), report)?;

    let q = tol.quadrature();
    let mut max_bound = 0f64;
    let mut all_converged = true;
    for j in 0..=degrees {
        for k in 0..=j {
            let m = measure.moment(j, k, &q)?;
            max_bound = max_bound.max(m.error_bound);
            all_converged &= m.converged;
        }
    }
    report.order_requested = Some(degrees);
    report.order_reached = Some(degrees);
    report.add_warnings(&oracle.warnings());
    report.moments = Some(MomentsSummary { degrees, max_error_bound: max_bound, all_converged });
    Ok(())
}
