//! Command-line surface: argument parsing, experiment dispatch, and
//! deterministic table emission.
//!
//! Every subcommand reads one JSON configuration, runs entirely from it
//! plus the flags below, and writes one table. CSV gets a header row and
//! '.' decimals; JSON wraps the same rows in an object with a `meta`
//! block (config echo, version). Identical inputs produce byte-identical
//! output — floats are printed in shortest round-trip form and no
//! timestamp, locale, or thread count leaks into the bytes.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;
use serde_json::{json, Map, Value};

use crate::analysis::{loglog_fit, Normalizer};
use crate::config::{Experiment, ExperimentConfig, FamilyHandle, OutputFormat};
use crate::error::{Error, Result};
use crate::lvalues::{
    delta_central_value, dirichlet_central_value, dirichlet_l, elliptic_central_value,
    predicted_central_constant, CentralValue,
};
use crate::series;
use crate::zeros::{explicit_formula_report, ZeroTable};

#[derive(Debug, Parser)]
#[command(
    name = "centerbias",
    version,
    about = "Partial Euler products, Chebyshev-bias sums, and explicit-formula checks for automorphic L-functions at the central point"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bias sum Σ_{p≤x} a(p)/√p with its log-log slope fit
    Bias(CommonArgs),
    /// Partial Euler product at s, scaled by (log x)^m at the center
    Product(CommonArgs),
    /// Itemized truncated explicit-formula residuals (JSON only)
    Explicit(CommonArgs),
    /// Prime race π_s(x; q, a) − π_s(x; q, b)
    Race(CommonArgs),
    /// Point-count products ∏_{p≤x} N_p/p against (log x)^rank
    Goldfeld(CommonArgs),
    /// Weighted prime-power sum ψ(x) with growth-normalizer ratios
    Psi(CommonArgs),
    /// Log-log fits of the bias and second-moment series
    Fit(CommonArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Bias(_) => "bias",
            Command::Product(_) => "product",
            Command::Explicit(_) => "explicit",
            Command::Race(_) => "race",
            Command::Goldfeld(_) => "goldfeld",
            Command::Psi(_) => "psi",
            Command::Fit(_) => "fit",
        }
    }

    fn args(&self) -> &CommonArgs {
        match self {
            Command::Bias(a)
            | Command::Product(a)
            | Command::Explicit(a)
            | Command::Race(a)
            | Command::Goldfeld(a)
            | Command::Psi(a)
            | Command::Fit(a) => a,
        }
    }
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Experiment configuration file (JSON)
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Evaluation point: "center", a real number, or "re,im"
    #[arg(long, default_value = "center")]
    pub s: SPoint,
    /// Zero-sum truncation height for the explicit formula
    #[arg(long = "T", value_name = "REAL")]
    pub t_cut: Option<f64>,
    /// Evaluation point x for the explicit formula (default: xmax)
    #[arg(long)]
    pub x: Option<f64>,
    /// Output file (default: config `output.path`, else stdout)
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Table format (default: config `output.format`, else csv;
    /// `explicit` is always json)
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads for the sieve sweeps (never affects the bytes)
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
    /// Directory for on-disk coefficient caches
    #[arg(long, value_name = "DIR")]
    pub tau_cache: Option<PathBuf>,
}

/// Where a series is evaluated: the central point or an explicit s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SPoint {
    Center,
    At(Complex<f64>),
}

impl FromStr for SPoint {
    type Err = String;

    fn from_str(text: &str) -> std::result::Result<Self, String> {
        if text.eq_ignore_ascii_case("center") {
            return Ok(SPoint::Center);
        }
        let (re_s, im_s) = match text.split_once(',') {
            Some((a, b)) => (a, b),
            None => (text, "0"),
        };
        let bad = |_| format!("expected \"center\", a real, or \"re,im\"; got {text:?}");
        let re: f64 = re_s.trim().parse().map_err(bad)?;
        let im: f64 = im_s.trim().parse().map_err(bad)?;
        Ok(SPoint::At(Complex::new(re, im)))
    }
}

/// One table cell; the unit both emitters understand.
#[derive(Debug, Clone)]
enum Cell {
    Int(u64),
    Num(f64),
    Text(&'static str),
}

impl Cell {
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => fmt_f64(*v),
            Cell::Text(v) => (*v).to_string(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            // non-finite numbers have no JSON form; null is the honest cell
            Cell::Num(v) => serde_json::Number::from_f64(*v)
                .map(Value::Number)
                .unwrap_or(Value::Null),
            Cell::Text(v) => Value::from(*v),
        }
    }
}

/// Shortest round-trip decimal form; '.' separator, no locale.
fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        format!("{v}")
    }
}

/// A fully computed table, ready for either emitter.
struct Rendered {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
    /// Extra key/value pairs for the JSON `meta` block.
    extras: Vec<(&'static str, Value)>,
}

/// Run one parsed command line to completion.
pub fn run(cli: &Cli) -> Result<()> {
    let name = cli.command.name();
    let args = cli.command.args();
    let config = ExperimentConfig::from_file(&args.config)?;
    let exp = config.build(args.tau_cache.as_deref())?;
    let threads = args.threads.max(1);

    let rendered = match name {
        "bias" => cmd_bias(&exp, threads)?,
        "product" => cmd_product(&exp, args.s, threads)?,
        "explicit" => cmd_explicit(&exp, args)?,
        "race" => cmd_race(&exp, args.s, threads)?,
        "goldfeld" => cmd_goldfeld(&exp, threads)?,
        "psi" => cmd_psi(&exp)?,
        "fit" => cmd_fit(&exp, threads)?,
        _ => unreachable!("subcommand list is closed"),
    };

    let format = resolve_format(name, args, &config)?;
    let text = match format {
        OutputFormat::Csv => to_csv(&rendered),
        OutputFormat::Json => to_json(name, &exp.label, &config, &rendered)?,
    };
    let out_path = args
        .out
        .clone()
        .or_else(|| config.output.as_ref().and_then(|o| o.path.clone()));
    match out_path {
        Some(path) => std::fs::write(path, text)?,
        None => {
            use std::io::Write;
            std::io::stdout().lock().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

/// Flag beats config; the explicit-formula report is JSON by contract
/// (its rows are itemized identities, not a flat numeric table).
fn resolve_format(name: &str, args: &CommonArgs, config: &ExperimentConfig) -> Result<OutputFormat> {
    if name == "explicit" {
        if args.format == Some(OutputFormat::Csv) {
            return Err(Error::Config(
                "the explicit-formula report is JSON-only; drop --format csv".into(),
            ));
        }
        return Ok(OutputFormat::Json);
    }
    Ok(args
        .format
        .or_else(|| config.output.as_ref().and_then(|o| o.format))
        .unwrap_or(OutputFormat::Csv))
}

fn to_csv(rendered: &Rendered) -> String {
    let mut text = rendered.columns.join(",");
    text.push('\n');
    for row in &rendered.rows {
        let line: Vec<String> = row.iter().map(Cell::to_csv).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    text
}

fn to_json(
    name: &str,
    label: &str,
    config: &ExperimentConfig,
    rendered: &Rendered,
) -> Result<String> {
    let mut meta = Map::new();
    meta.insert("command".into(), Value::from(name));
    meta.insert(
        "config".into(),
        serde_json::to_value(config).map_err(|e| Error::Config(e.to_string()))?,
    );
    meta.insert("label".into(), Value::from(label));
    meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
    for (k, v) in &rendered.extras {
        meta.insert((*k).into(), v.clone());
    }
    let rows: Vec<Value> = rendered
        .rows
        .iter()
        .map(|row| {
            let mut obj = Map::new();
            for (col, cell) in rendered.columns.iter().zip(row) {
                obj.insert((*col).into(), cell.to_json());
            }
            Value::Object(obj)
        })
        .collect();
    let doc = json!({ "meta": Value::Object(meta), "rows": rows });
    let mut text =
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Config(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// The predicted limit of the scaled central product, when an engine for
/// L^{(m)} at the center exists for this family: the constant, its
/// provenance, and the engine's error bound.
fn central_constant(exp: &Experiment) -> Option<(f64, CentralValue<f64>)> {
    let spec = &exp.spec;
    let l_m = match &exp.family {
        FamilyHandle::Dirichlet(chi) if spec.m == 0 && chi.is_real() => {
            dirichlet_central_value(chi).ok()?
        }
        FamilyHandle::Delta(table) if spec.m == 0 => delta_central_value(table).ok()?,
        FamilyHandle::Elliptic(curve) if spec.m <= 1 => {
            elliptic_central_value(curve, spec.m).ok()?
        }
        _ => return None,
    };
    let c = predicted_central_constant(spec.nu, spec.m, l_m.value);
    Some((c, l_m))
}

fn cmd_bias(exp: &Experiment, threads: usize) -> Result<Rendered> {
    let xs = exp.grid.points()?;
    let series = series::bias_series(&exp.spec, &xs, threads)?;
    let fit = loglog_fit(&series).ok();
    let slope = fit.as_ref().map_or(f64::NAN, |f| f.slope);
    let predicted = exp.spec.predicted_bias_slope();
    let rows = series
        .xs
        .iter()
        .zip(&series.values)
        .map(|(&x, &v)| {
            vec![
                Cell::Num(x),
                Cell::Num(v),
                Cell::Num(x.ln().ln()),
                Cell::Num(slope),
                Cell::Num(predicted),
            ]
        })
        .collect();
    let extras = match fit {
        Some(f) => vec![(
            "fit",
            json!({
                "slope": f.slope,
                "intercept": f.intercept,
                "rms_residual": f.rms_residual,
                "n_samples": f.n_samples,
            }),
        )],
        None => vec![("fit", Value::Null)],
    };
    Ok(Rendered {
        columns: vec!["x", "bias", "loglog_x", "fit_slope", "predicted_slope"],
        rows,
        extras,
    })
}

fn cmd_product(exp: &Experiment, s: SPoint, threads: usize) -> Result<Rendered> {
    let xs = exp.grid.points()?;
    match s {
        SPoint::Center => {
            let series = series::central_product_series(&exp.spec, &xs, threads)?;
            let (target, extras) = match central_constant(exp) {
                Some((c, l_m)) => (
                    c,
                    vec![
                        ("s", Value::from("center")),
                        ("target_method", Value::from(l_m.method)),
                        (
                            "target_est_error",
                            Cell::Num(l_m.est_error).to_json(),
                        ),
                    ],
                ),
                None => (f64::NAN, vec![("s", Value::from("center"))]),
            };
            let rows = series
                .xs
                .iter()
                .zip(&series.values)
                .map(|(&x, &v)| vec![Cell::Num(x), Cell::Num(v), Cell::Num(target)])
                .collect();
            Ok(Rendered {
                columns: vec!["x", "product", "target"],
                rows,
                extras,
            })
        }
        SPoint::At(sc) => {
            let target = match &exp.family {
                FamilyHandle::Dirichlet(chi) if sc.re > 0.0 => {
                    dirichlet_l(sc, chi).unwrap_or(Complex::new(f64::NAN, f64::NAN))
                }
                _ => Complex::new(f64::NAN, f64::NAN),
            };
            let mut rows = Vec::with_capacity(xs.len());
            for &x in &xs {
                let v = series::log_partial_euler_product(&exp.spec, x, sc)?.exp();
                rows.push(vec![
                    Cell::Num(x),
                    Cell::Num(v.re),
                    Cell::Num(v.im),
                    Cell::Num(target.re),
                    Cell::Num(target.im),
                ]);
            }
            Ok(Rendered {
                columns: vec!["x", "product_re", "product_im", "target_re", "target_im"],
                rows,
                extras: vec![("s", json!([sc.re, sc.im]))],
            })
        }
    }
}

fn cmd_explicit(exp: &Experiment, args: &CommonArgs) -> Result<Rendered> {
    let s = match args.s {
        SPoint::Center => Complex::new(0.5, 0.0),
        SPoint::At(c) => c,
    };
    let x = args.x.unwrap_or(exp.xmax as f64);
    let zeros_rel = exp.zeros_path.as_ref().ok_or_else(|| {
        Error::Config("the explicit formula needs `zeros_path` in the configuration".into())
    })?;
    let table = ZeroTable::load(&resolve_sibling(&args.config, zeros_rel))?;

    // No --T: one row per decade height up to the table, matching how
    // convergence in T is usually displayed.
    let heights = match args.t_cut {
        Some(t) => vec![t],
        None => {
            let mut ts = Vec::new();
            let mut t = 10.0;
            while t <= table.t_max() {
                ts.push(t);
                t *= 10.0;
            }
            if ts.is_empty() {
                ts.push(table.t_max());
            }
            ts
        }
    };

    let mut rows = Vec::with_capacity(heights.len());
    for &t in &heights {
        let rep = explicit_formula_report(&exp.spec, &table, x, s, t)?;
        rows.push(vec![
            Cell::Num(rep.x),
            Cell::Num(t),
            Cell::Int(rep.zeros_used as u64),
            Cell::Num(rep.lhs.re),
            Cell::Num(rep.lhs.im),
            Cell::Num(rep.central_term.re),
            Cell::Num(rep.central_term.im),
            Cell::Num(rep.l_log_derivative.re),
            Cell::Num(rep.l_log_derivative.im),
            Cell::Num(rep.zero_sum.re),
            Cell::Num(rep.zero_sum.im),
            Cell::Num(rep.trivial_tail.re),
            Cell::Num(rep.trivial_tail.im),
            Cell::Num(rep.rhs.re),
            Cell::Num(rep.rhs.im),
            Cell::Num(rep.residual),
            Cell::Num(rep.est_error),
        ]);
    }
    Ok(Rendered {
        columns: vec![
            "x",
            "T",
            "zeros_used",
            "lhs_re",
            "lhs_im",
            "central_term_re",
            "central_term_im",
            "l_log_derivative_re",
            "l_log_derivative_im",
            "zero_sum_re",
            "zero_sum_im",
            "trivial_tail_re",
            "trivial_tail_im",
            "rhs_re",
            "rhs_im",
            "residual",
            "est_error",
        ],
        rows,
        extras: vec![
            ("s", json!([s.re, s.im])),
            ("x", Cell::Num(x).to_json()),
            ("zeros_file", Value::from(table.lfunction.clone())),
            ("zeros_available", Value::from(table.len() as u64)),
        ],
    })
}

fn cmd_race(exp: &Experiment, s: SPoint, threads: usize) -> Result<Rendered> {
    let s_real = match s {
        SPoint::Center => 0.5,
        SPoint::At(c) if c.im == 0.0 => c.re,
        SPoint::At(_) => {
            return Err(Error::Config(
                "the race weight exponent s must be real".into(),
            ))
        }
    };
    let xs = exp.grid.points()?;
    let race = exp.race;
    let series = series::prime_race_series(race.q, race.a, race.b, s_real, &xs, threads)?;
    let rows = series
        .xs
        .iter()
        .zip(&series.values)
        .map(|(&x, &v)| vec![Cell::Num(x), Cell::Num(v)])
        .collect();
    Ok(Rendered {
        columns: vec!["x", "race"],
        rows,
        extras: vec![(
            "race",
            json!({ "q": race.q, "a": race.a, "b": race.b, "s": s_real }),
        )],
    })
}

fn cmd_goldfeld(exp: &Experiment, threads: usize) -> Result<Rendered> {
    let xs = exp.grid.points()?;
    let series = series::goldfeld_series(&exp.spec, &xs, threads)?;
    let rank = exp.spec.m;
    let rows = series
        .xs
        .iter()
        .zip(&series.values)
        .map(|(&x, &v)| {
            vec![
                Cell::Num(x),
                Cell::Num(v),
                Cell::Num(x.ln().powi(rank as i32)),
                Cell::Int(rank as u64),
            ]
        })
        .collect();
    Ok(Rendered {
        columns: vec!["x", "product", "logx_pow_r", "rank"],
        rows,
        extras: vec![],
    })
}

fn cmd_psi(exp: &Experiment) -> Result<Rendered> {
    let xs = exp.grid.points()?;
    let series = series::psi_series(&exp.spec, &xs)?;
    let rows = series
        .xs
        .iter()
        .zip(&series.values)
        .map(|(&x, &v)| {
            vec![
                Cell::Num(x),
                Cell::Num(v),
                Cell::Num(v.abs() / Normalizer::SqrtLogLogSq.eval::<f64>(x)),
                Cell::Num(v.abs() / Normalizer::SqrtLogSq.eval::<f64>(x)),
            ]
        })
        .collect();
    Ok(Rendered {
        columns: vec!["x", "psi", "ratio_sqrt_loglog_sq", "ratio_sqrt_log_sq"],
        rows,
        extras: vec![],
    })
}

fn cmd_fit(exp: &Experiment, threads: usize) -> Result<Rendered> {
    let xs = exp.grid.points()?;
    let bias = series::bias_series(&exp.spec, &xs, threads)?;
    let second = series::second_moment_series(&exp.spec, &xs, threads)?;
    let fit_b = loglog_fit(&bias)?;
    let fit_s = loglog_fit(&second)?;
    let rows = vec![
        vec![
            Cell::Text("bias"),
            Cell::Num(fit_b.slope),
            Cell::Num(fit_b.intercept),
            Cell::Num(fit_b.rms_residual),
            Cell::Int(fit_b.n_samples as u64),
            Cell::Num(exp.spec.predicted_bias_slope()),
        ],
        vec![
            Cell::Text("second_moment"),
            Cell::Num(fit_s.slope),
            Cell::Num(fit_s.intercept),
            Cell::Num(fit_s.rms_residual),
            Cell::Int(fit_s.n_samples as u64),
            Cell::Num(exp.spec.predicted_second_moment_slope()),
        ],
    ];

    // With a central-value engine available, assemble the bias intercept
    // the identity predicts: log C − M̂/2 − (tail at xmax). Comparing it
    // with the fitted intercept closes the loop between the product side
    // and the sum side.
    let mut extras = Vec::new();
    if let Some((c, _)) = central_constant(exp) {
        if c > 0.0 {
            let tail = series::tail_sum(&exp.spec, exp.xmax as f64)?;
            let assembled = c.ln() - fit_s.intercept / 2.0 - tail;
            extras.push(("central_constant", Cell::Num(c).to_json()));
            extras.push(("tail_at_xmax", Cell::Num(tail).to_json()));
            extras.push(("assembled_bias_intercept", Cell::Num(assembled).to_json()));
            extras.push((
                "fitted_bias_intercept",
                Cell::Num(fit_b.intercept).to_json(),
            ));
        }
    }
    Ok(Rendered {
        columns: vec![
            "series",
            "slope",
            "intercept",
            "rms_residual",
            "n_samples",
            "predicted_slope",
        ],
        rows,
        extras,
    })
}

/// Interpret a possibly relative data path against the directory of the
/// configuration file that named it.
fn resolve_sibling(config_path: &Path, data_path: &Path) -> PathBuf {
    if data_path.is_absolute() {
        data_path.to_path_buf()
    } else {
        config_path
            .parent()
            .unwrap_or_else(|| Path::new(""))
            .join(data_path)
    }
}
