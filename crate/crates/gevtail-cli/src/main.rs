//! `gevtail`: coefficient tables, elemental shape estimates, GEV sampling
//! and MLE fits, plus the Monte Carlo study harness, all on stdout or a
//! file.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use gevtail::{
    approx_b, beta_direct, beta_recursion_table, combined_estimate_opts, compare_mle,
    elemental_estimate, enumerate_elementals, fit_mle, fmt_float, idealized_sample, order_sample,
    parse_config_file, parse_grid, parse_sample_file, parse_usize_list, parse_weights_file,
    run_consistency, run_idealized_study, run_midpoint_study, run_sweep, sample_gev,
    sample_weibullrel, spacing_ratios, BetaTable, Cell, CompareConfig, Error, Family, FitOptions,
    GevParams, Init, Method, OrderedSample, OutputTable, Result, RngSpec, SweepConfig,
    WeibullRelParams, WeightScheme, DEFAULT_METHOD_THRESHOLD, GENERATOR, NAMED_SCHEMES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "gevtail", version, about = "Elemental shape estimators for extreme-value tails")]
struct Cli {
    /// Flat `key = value` defaults file; explicit flags win over it.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write the report here instead of stdout. Nothing is written on error.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    /// Output format. Defaults to csv everywhere except `mle`.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Cap the harness thread pool. The reporting layer itself stays
    /// single-threaded.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Tabulate beta_N(I), b_N(I) and the matching a_N(J) index.
    Coeffs {
        /// Sample size N (rows cover I = 1..N-1).
        #[arg(long)]
        n: usize,
        /// auto, direct, recursion, or approx.
        #[arg(long, default_value = "auto")]
        method: String,
        /// N above which auto switches from recursion to approx.
        #[arg(long, default_value_t = DEFAULT_METHOD_THRESHOLD)]
        threshold: usize,
    },
    /// Combined elemental estimate for one observed sample.
    Estimate {
        /// Sample file, one real per line; `#` starts a comment.
        #[arg(long)]
        input: PathBuf,
        /// gev, gpd, or weibull.
        #[arg(long, default_value = "gev")]
        family: String,
        /// Named scheme (equal|nj1|jmi|i|nj1+jmi|jmi+i|nj1+i) or
        /// custom:<file> with `i j weight` lines.
        #[arg(long, default_value = "equal")]
        weights: String,
        /// Report every elemental (i, j, tau, t, estimate) instead of the
        /// combination.
        #[arg(long)]
        per_elemental: bool,
        /// Drop elementals with tied order statistics instead of failing.
        #[arg(long)]
        skip_degenerate: bool,
    },
    /// Draw pseudo-random variates, one value per line.
    Sample {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        sigma: f64,
        /// Shape: GEV xi, or the Weibull mirror shape under
        /// `--family weibull`.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        xi: f64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// gev or weibull.
        #[arg(long, default_value = "gev")]
        family: String,
    },
    /// Deterministic sample at midpoint quantiles, or with --study the
    /// estimate it yields over an (n, xi) grid.
    Idealized {
        /// Sample size (plain mode).
        #[arg(long, conflicts_with = "study")]
        n: Option<usize>,
        /// Location (plain mode only).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        mu: f64,
        /// Scale (plain mode only).
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        sigma: f64,
        /// Shape (plain mode).
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        xi: f64,
        /// Sweep the equal-weight estimate over --n-list x --xi-grid.
        #[arg(long)]
        study: bool,
        /// Comma-separated sample sizes for --study.
        #[arg(long, requires = "study", default_value = "3,7,15,31")]
        n_list: String,
        /// Shape grid for --study: lo:hi:step or a comma list.
        #[arg(long, requires = "study", default_value = "-10:10:0.5", allow_hyphen_values = true)]
        xi_grid: String,
    },
    /// Maximum-likelihood GEV fit of a sample file.
    Mle {
        /// Sample file, one real per line.
        #[arg(long)]
        input: PathBuf,
        /// Starting point: elemental or moments.
        #[arg(long, default_value = "elemental")]
        init: String,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Monte Carlo bias / RMSE of weighting schemes over a shape grid.
    Sweep {
        /// Sample size per replicate.
        #[arg(long)]
        n: usize,
        /// Shape grid: lo:hi:step or a comma list.
        #[arg(long, default_value = "-5,-2,-1,0,1,2,5", allow_hyphen_values = true)]
        xi_grid: String,
        /// Replicates per grid point (default 10000, or 500000 with --full).
        #[arg(long)]
        replicates: Option<usize>,
        /// Full-scale replicate counts.
        #[arg(long)]
        full: bool,
        /// Comma list of scheme names, or `all`.
        #[arg(long, default_value = "equal")]
        schemes: String,
        /// gev or weibull.
        #[arg(long, default_value = "gev")]
        family: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Also report each raw elemental as its own estimator.
        #[arg(long)]
        per_elemental: bool,
    },
    /// RMSE of one scheme as the sample size grows.
    Consistency {
        /// Comma-separated sample sizes.
        #[arg(long, default_value = "25,50,100,200,400")]
        n_list: String,
        #[arg(long, default_value = "-5,-2,-1,0,1,2,5", allow_hyphen_values = true)]
        xi_grid: String,
        /// Replicates per cell (default 10000, or 100000 with --full).
        #[arg(long)]
        replicates: Option<usize>,
        /// Full-scale replicate counts.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value = "nj1")]
        scheme: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
    },
    /// The three-point [-1, x, 1] sample as its midpoint moves.
    Midpoint {
        /// x grid inside (-1, 1): lo:hi:step or a comma list.
        #[arg(long, default_value = "-0.99:0.99:0.0198", allow_hyphen_values = true)]
        grid: String,
        /// Fit the MLE alongside each elemental estimate.
        #[arg(long)]
        mle: bool,
    },
    /// Per-replicate elemental-vs-MLE scatter at random true shapes.
    MleCompare {
        #[arg(long, default_value_t = 7)]
        n: usize,
        /// Replicates (default 10000, or 100000 with --full).
        #[arg(long)]
        replicates: Option<usize>,
        /// Full-scale replicate counts.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        xi_min: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        xi_max: f64,
        #[arg(long, default_value = "equal")]
        scheme: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long, default_value_t = 500)]
        max_iter: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) | Error::Config(_) => 1,
        Error::Input(_) | Error::DegenerateSpacing { .. } => 2,
        Error::Numeric(_) => 3,
    }
}

/// Config keys that surface as bare boolean flags.
const BOOL_KEYS: &[&str] = &["per-elemental", "skip-degenerate", "full", "study", "mle"];

fn has_flag(args: &[String], flag: &str) -> bool {
    let prefix = format!("{flag}=");
    args.iter().any(|a| a == flag || a.starts_with(&prefix))
}

/// Appends `--key value` pairs from the --config file for every key the
/// command line left unset, so explicit flags always win.
fn merge_config(mut args: Vec<String>) -> Result<Vec<String>> {
    let path = {
        let mut found = None;
        let mut it = args.iter();
        while let Some(a) = it.next() {
            if a == "--config" {
                found = it.next().cloned();
                break;
            }
            if let Some(rest) = a.strip_prefix("--config=") {
                found = Some(rest.to_string());
                break;
            }
        }
        match found {
            Some(p) => p,
            None => return Ok(args),
        }
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| Error::config(format!("cannot read config file '{path}': {e}")))?;

    // parse_config_file keeps duplicates in order; the last one wins.
    let mut merged: Vec<(String, String)> = Vec::new();
    for (k, v) in parse_config_file(&text)? {
        merged.retain(|(mk, _)| *mk != k);
        merged.push((k, v));
    }

    for (key, value) in merged {
        if key == "config" {
            return Err(Error::config("config file cannot set 'config'"));
        }
        let flag = format!("--{key}");
        if has_flag(&args, &flag) {
            continue;
        }
        if BOOL_KEYS.contains(&key.as_str()) {
            match value.as_str() {
                "true" | "1" | "yes" | "on" => args.push(flag),
                "false" | "0" | "no" | "off" => {}
                other => {
                    return Err(Error::config(format!(
                        "config key '{key}' wants a boolean, got '{other}'"
                    )));
                }
            }
        } else {
            args.push(flag);
            args.push(value);
        }
    }
    Ok(args)
}

fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read '{}': {e}", path.display())))
}

fn parse_scheme(spec: &str) -> Result<WeightScheme> {
    if let Some(path) = spec.strip_prefix("custom:") {
        let entries = parse_weights_file(&read_input(Path::new(path))?)?;
        return Ok(WeightScheme::Custom(entries));
    }
    WeightScheme::from_str(spec)
}

fn parse_init(spec: &str) -> Result<Init> {
    match spec {
        "elemental" => Ok(Init::Elemental),
        "moments" => Ok(Init::Moments),
        other => Err(Error::config(format!(
            "unknown init '{other}' (expected elemental|moments)"
        ))),
    }
}

fn load_sample(path: &Path) -> Result<OrderedSample> {
    let values = parse_sample_file(&read_input(path)?)?;
    if values.len() < 3 {
        return Err(Error::input(format!("need N ≥ 3, got N = {}", values.len())));
    }
    order_sample(&values)
}

fn base_meta(table: &mut OutputTable, command: &str) {
    table.push_meta("command", command);
    table.push_meta("version", env!("CARGO_PKG_VERSION"));
}

fn seed_meta(table: &mut OutputTable, seed: u64, stream: u64) {
    table.push_meta("seed", seed.to_string());
    table.push_meta("stream", stream.to_string());
    table.push_meta("generator", GENERATOR);
}

/// Plain-lines output (sample and idealized): `# key: value` header, then
/// one full-precision value per line.
fn render_values(meta: &[(String, String)], values: &[f64], format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = String::new();
            for (k, v) in meta {
                out.push_str(&format!("# {k}: {v}\n"));
            }
            for v in values {
                out.push_str(&fmt_float(*v));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let meta_map: serde_json::Map<String, serde_json::Value> = meta
                .iter()
                .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
                .collect();
            let doc = serde_json::json!({ "meta": meta_map, "values": values });
            let mut s = serde_json::to_string_pretty(&doc).expect("valid json value");
            s.push('\n');
            s
        }
    }
}

fn run_coeffs(n: usize, method: &str, threshold: usize) -> Result<OutputTable> {
    let requested = Method::from_str(method)?;
    let effective = requested.resolve(n, threshold);
    let recursion: Option<BetaTable> = match effective {
        Method::Recursion => Some(beta_recursion_table(n)?),
        _ => None,
    };

    let mut table = OutputTable::new(&["n", "i", "beta", "b", "a_index", "method"]);
    base_meta(&mut table, "coeffs");
    table.push_meta("n", n.to_string());
    table.push_meta("method", requested.name());
    table.push_meta("threshold", threshold.to_string());

    for i in 1..n {
        let (beta, b) = match effective {
            Method::Recursion => {
                let beta = recursion.as_ref().expect("built above").get(n, i)?;
                (beta, -1.0 / beta)
            }
            Method::Direct => {
                let beta = beta_direct(n, i)?;
                (beta, -1.0 / beta)
            }
            Method::Approximation => {
                let b = approx_b(n, i)?;
                (-1.0 / b, b)
            }
            Method::Auto => unreachable!("resolve never returns auto"),
        };
        table.push_row(vec![
            n.into(),
            i.into(),
            beta.into(),
            b.into(),
            (i + 1).into(),
            effective.name().into(),
        ]);
    }
    if table.rows.is_empty() {
        return Err(Error::domain(format!("no coefficients exist for n = {n}")));
    }
    Ok(table)
}

fn run_estimate(
    input: &Path,
    family: &str,
    weights: &str,
    per_elemental: bool,
    skip_degenerate: bool,
) -> Result<OutputTable> {
    let sample = load_sample(input)?;
    let family = Family::from_str(family)?;
    let scheme = parse_scheme(weights)?;

    let mut table = if per_elemental {
        let mut t = OutputTable::new(&["i", "j", "tau", "t", "estimate"]);
        for e in enumerate_elementals(sample.n())? {
            let ratios = match spacing_ratios(&sample, e) {
                Err(Error::DegenerateSpacing { .. }) if skip_degenerate => continue,
                other => other?,
            };
            let est = elemental_estimate(&sample, e, family)?;
            t.push_row(vec![
                e.i.into(),
                e.j.into(),
                ratios.tau.into(),
                ratios.t.into(),
                est.into(),
            ]);
        }
        t
    } else {
        let est = combined_estimate_opts(&sample, &scheme, family, skip_degenerate)?;
        let mut t = OutputTable::new(&["n", "family", "weights", "estimate"]);
        t.push_row(vec![
            sample.n().into(),
            family.name().into(),
            scheme.name().into(),
            est.into(),
        ]);
        t
    };

    base_meta(&mut table, "estimate");
    table.push_meta("input", input.display().to_string());
    table.push_meta("n", sample.n().to_string());
    table.push_meta("family", family.name());
    table.push_meta("weights", weights);
    table.push_meta("skip-degenerate", skip_degenerate.to_string());
    Ok(table)
}

fn run_mle(input: &Path, init: &str, max_iter: usize, tol: f64) -> Result<OutputTable> {
    let sample = load_sample(input)?;
    let opts = FitOptions {
        max_iter,
        tol,
        init: parse_init(init)?,
    };
    let fit = fit_mle(&sample, &opts)?;

    let mut table = OutputTable::new(&["mu", "sigma", "xi", "negloglik", "status", "iterations"]);
    base_meta(&mut table, "mle");
    table.push_meta("input", input.display().to_string());
    table.push_meta("n", sample.n().to_string());
    table.push_meta("init", init);
    table.push_meta("max-iter", max_iter.to_string());
    table.push_meta("tol", tol.to_string());
    table.push_row(vec![
        fit.params.mu().into(),
        fit.params.sigma().into(),
        fit.params.xi().into(),
        fit.negloglik.into(),
        fit.status.name().into(),
        fit.iterations.into(),
    ]);
    Ok(table)
}

fn parse_schemes(spec: &str) -> Result<Vec<WeightScheme>> {
    if spec == "all" {
        return Ok(NAMED_SCHEMES.to_vec());
    }
    spec.split(',').map(|s| parse_scheme(s.trim())).collect()
}

#[allow(clippy::too_many_arguments)]
fn run_sweep_cmd(
    n: usize,
    xi_grid: &str,
    replicates: Option<usize>,
    full: bool,
    schemes: &str,
    family: &str,
    seed: u64,
    stream: u64,
    per_elemental: bool,
) -> Result<OutputTable> {
    let replicates = replicates.unwrap_or(if full { 500_000 } else { 10_000 });
    let cfg = SweepConfig {
        n,
        xi_grid: parse_grid(xi_grid)?,
        replicates,
        schemes: parse_schemes(schemes)?,
        family: Family::from_str(family)?,
        seed: RngSpec::new(seed, stream),
        per_elemental,
    };
    let result = run_sweep(&cfg)?;

    let mut table = OutputTable::new(&[
        "xi_true",
        "n",
        "estimator",
        "mean",
        "bias",
        "std",
        "rmse",
        "replicates",
        "rejected",
    ]);
    base_meta(&mut table, "sweep");
    table.push_meta("n", n.to_string());
    table.push_meta("xi-grid", xi_grid);
    table.push_meta("replicates", replicates.to_string());
    table.push_meta("schemes", schemes);
    table.push_meta("family", family);
    table.push_meta("per-elemental", per_elemental.to_string());
    seed_meta(&mut table, seed, stream);
    for row in &result.rows {
        table.push_row(vec![
            row.xi_true.into(),
            row.n.into(),
            row.estimator.as_str().into(),
            row.mean.into(),
            row.bias.into(),
            row.std.into(),
            row.rmse.into(),
            row.replicates.into(),
            row.rejected.into(),
        ]);
    }
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn run_consistency_cmd(
    n_list: &str,
    xi_grid: &str,
    replicates: Option<usize>,
    full: bool,
    scheme: &str,
    seed: u64,
    stream: u64,
) -> Result<OutputTable> {
    let replicates = replicates.unwrap_or(if full { 100_000 } else { 10_000 });
    let rows = run_consistency(
        &parse_usize_list(n_list)?,
        &parse_grid(xi_grid)?,
        replicates,
        &parse_scheme(scheme)?,
        RngSpec::new(seed, stream),
    )?;

    let mut table =
        OutputTable::new(&["n", "xi_true", "rmse", "abscissa", "replicates", "rejected"]);
    base_meta(&mut table, "consistency");
    table.push_meta("n-list", n_list);
    table.push_meta("xi-grid", xi_grid);
    table.push_meta("replicates", replicates.to_string());
    table.push_meta("scheme", scheme);
    seed_meta(&mut table, seed, stream);
    for row in &rows {
        table.push_row(vec![
            row.n.into(),
            row.xi_true.into(),
            row.rmse.into(),
            row.abscissa.into(),
            row.replicates.into(),
            row.rejected.into(),
        ]);
    }
    Ok(table)
}

fn run_midpoint_cmd(grid: &str, mle: bool) -> Result<OutputTable> {
    let rows = run_midpoint_study(&parse_grid(grid)?, mle)?;
    let columns: &[&str] = if mle {
        &["x_mid", "estimate", "mle_xi", "mle_status"]
    } else {
        &["x_mid", "estimate"]
    };
    let mut table = OutputTable::new(columns);
    base_meta(&mut table, "midpoint");
    table.push_meta("grid", grid);
    table.push_meta("mle", mle.to_string());
    for row in &rows {
        let mut cells: Vec<Cell> = vec![row.x_mid.into(), row.estimate.into()];
        if mle {
            cells.push(row.mle_xi.expect("mle requested").into());
            cells.push(row.mle_status.expect("mle requested").name().into());
        }
        table.push_row(cells);
    }
    Ok(table)
}

fn run_idealized_study_cmd(n_list: &str, xi_grid: &str) -> Result<OutputTable> {
    let rows = run_idealized_study(&parse_usize_list(n_list)?, &parse_grid(xi_grid)?)?;
    let mut table = OutputTable::new(&["n", "xi_nominal", "estimate"]);
    base_meta(&mut table, "idealized");
    table.push_meta("study", "true");
    table.push_meta("n-list", n_list);
    table.push_meta("xi-grid", xi_grid);
    for row in &rows {
        table.push_row(vec![row.n.into(), row.xi_nominal.into(), row.estimate.into()]);
    }
    Ok(table)
}

#[allow(clippy::too_many_arguments)]
fn run_compare_cmd(
    n: usize,
    replicates: Option<usize>,
    full: bool,
    xi_min: f64,
    xi_max: f64,
    scheme: &str,
    seed: u64,
    stream: u64,
    max_iter: usize,
    tol: f64,
) -> Result<OutputTable> {
    let replicates = replicates.unwrap_or(if full { 100_000 } else { 10_000 });
    let cfg = CompareConfig {
        n,
        replicates,
        xi_min,
        xi_max,
        scheme: parse_scheme(scheme)?,
        seed: RngSpec::new(seed, stream),
        max_iter,
        tol,
    };
    let result = compare_mle(&cfg)?;

    let mut table = OutputTable::new(&[
        "replicate",
        "xi_true",
        "elemental",
        "mle_xi",
        "mle_negloglik",
        "mle_status",
        "mle_iterations",
    ]);
    base_meta(&mut table, "mle-compare");
    table.push_meta("n", n.to_string());
    table.push_meta("replicates", replicates.to_string());
    table.push_meta("xi-min", xi_min.to_string());
    table.push_meta("xi-max", xi_max.to_string());
    table.push_meta("scheme", scheme);
    table.push_meta("max-iter", max_iter.to_string());
    table.push_meta("tol", tol.to_string());
    seed_meta(&mut table, seed, stream);
    table.push_meta("rejected", result.rejected.to_string());
    for row in &result.rows {
        table.push_row(vec![
            row.replicate.into(),
            row.xi_true.into(),
            row.elemental.into(),
            row.mle_xi.into(),
            row.mle_negloglik.into(),
            row.mle_status.name().into(),
            row.mle_iterations.into(),
        ]);
    }
    Ok(table)
}

fn render_table(table: &OutputTable, format: Format) -> String {
    match format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json_string(),
    }
}

fn run(cli: &Cli) -> Result<String> {
    // mle reports a fit, not a table, so it defaults to json.
    let format = cli.format.unwrap_or(match cli.cmd {
        Cmd::Mle { .. } => Format::Json,
        _ => Format::Csv,
    });

    let out = match &cli.cmd {
        Cmd::Coeffs { n, method, threshold } => {
            render_table(&run_coeffs(*n, method, *threshold)?, format)
        }
        Cmd::Estimate {
            input,
            family,
            weights,
            per_elemental,
            skip_degenerate,
        } => render_table(
            &run_estimate(input, family, weights, *per_elemental, *skip_degenerate)?,
            format,
        ),
        Cmd::Sample {
            mu,
            sigma,
            xi,
            count,
            seed,
            stream,
            family,
        } => {
            if *count == 0 {
                return Err(Error::config("count must be >= 1"));
            }
            let spec = RngSpec::new(*seed, *stream);
            let values = match family.as_str() {
                "gev" => sample_gev(&GevParams::new(*mu, *sigma, *xi)?, *count, spec),
                "weibull" => {
                    sample_weibullrel(&WeibullRelParams::new(*mu, *sigma, *xi)?, *count, spec)
                }
                other => {
                    return Err(Error::config(format!(
                        "unknown family '{other}' (expected gev|weibull)"
                    )));
                }
            };
            let meta = vec![
                ("command".to_string(), "sample".to_string()),
                ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
                ("family".to_string(), family.clone()),
                ("mu".to_string(), mu.to_string()),
                ("sigma".to_string(), sigma.to_string()),
                ("xi".to_string(), xi.to_string()),
                ("count".to_string(), count.to_string()),
                ("seed".to_string(), seed.to_string()),
                ("stream".to_string(), stream.to_string()),
                ("generator".to_string(), GENERATOR.to_string()),
            ];
            render_values(&meta, &values, format)
        }
        Cmd::Idealized {
            n,
            mu,
            sigma,
            xi,
            study,
            n_list,
            xi_grid,
        } => {
            if *study {
                render_table(&run_idealized_study_cmd(n_list, xi_grid)?, format)
            } else {
                let n = n.ok_or_else(|| Error::config("idealized needs --n (or --study)"))?;
                let sample = idealized_sample(&GevParams::new(*mu, *sigma, *xi)?, n)?;
                let meta = vec![
                    ("command".to_string(), "idealized".to_string()),
                    ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
                    ("n".to_string(), n.to_string()),
                    ("mu".to_string(), mu.to_string()),
                    ("sigma".to_string(), sigma.to_string()),
                    ("xi".to_string(), xi.to_string()),
                ];
                render_values(&meta, sample.values(), format)
            }
        }
        Cmd::Mle {
            input,
            init,
            max_iter,
            tol,
        } => render_table(&run_mle(input, init, *max_iter, *tol)?, format),
        Cmd::Sweep {
            n,
            xi_grid,
            replicates,
            full,
            schemes,
            family,
            seed,
            stream,
            per_elemental,
        } => render_table(
            &run_sweep_cmd(
                *n,
                xi_grid,
                *replicates,
                *full,
                schemes,
                family,
                *seed,
                *stream,
                *per_elemental,
            )?,
            format,
        ),
        Cmd::Consistency {
            n_list,
            xi_grid,
            replicates,
            full,
            scheme,
            seed,
            stream,
        } => render_table(
            &run_consistency_cmd(n_list, xi_grid, *replicates, *full, scheme, *seed, *stream)?,
            format,
        ),
        Cmd::Midpoint { grid, mle } => render_table(&run_midpoint_cmd(grid, *mle)?, format),
        Cmd::MleCompare {
            n,
            replicates,
            full,
            xi_min,
            xi_max,
            scheme,
            seed,
            stream,
            max_iter,
            tol,
        } => render_table(
            &run_compare_cmd(
                *n, *replicates, *full, *xi_min, *xi_max, scheme, *seed, *stream, *max_iter, *tol,
            )?,
            format,
        ),
    };
    Ok(out)
}

fn write_output(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Error::input(format!("cannot write '{}': {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let merged = match merge_config(raw) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };

    let cli = match Cli::try_parse_from(&merged) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: config: --threads must be >= 1");
            return ExitCode::from(1);
        }
        // Only effective once per process; the harness picks it up globally.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }

    match run(&cli).and_then(|text| write_output(&cli.out, &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
