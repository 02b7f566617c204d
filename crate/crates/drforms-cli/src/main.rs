//! Command-line driver: exact computations on the Drinfeld period domain
//! and the full identity verification suites, with machine-readable
//! reports.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 precision
//! exhausted / out of certified domain, 3 at least one identity failed.

use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use drforms::cinfty::CInfty;
use drforms::config::{parse_config_file, OutputFormat, RunConfig};
use drforms::drinfeld::{carlitz_pi, DrinfeldModule};
use drforms::eisenstein::{
    bold_e_u_series, false_eisenstein_det, false_eisenstein_dl, false_eisenstein_u,
    j_invariants, u_value, w_normalize, PointContext,
};
use drforms::error::Error;
use drforms::report::Report;
use drforms::verify::{run_mutation_demonstration, run_suite, VerifyOptions, ALL_SUITES};

#[derive(Parser)]
#[command(name = "drforms", version, about = "Exact Drinfeld modular form computations and identity verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// base field size (prime power)
    #[arg(long)]
    q: Option<u32>,
    /// rank of the period domain
    #[arg(long)]
    r: Option<usize>,
    /// guaranteed θ-digits
    #[arg(long = "theta-precision", short = 'P')]
    theta_precision: Option<i64>,
    /// t-series truncation order
    #[arg(long = "t-trunc", short = 'N')]
    t_trunc: Option<usize>,
    /// Z-series truncation order
    #[arg(long = "z-trunc")]
    z_trunc: Option<usize>,
    /// brute-force sum degree bound
    #[arg(long = "degree-bound", short = 'D')]
    degree_bound: Option<i64>,
    /// module pipeline degree bound
    #[arg(long = "module-degree-bound")]
    module_degree_bound: Option<i64>,
    /// point descriptor: canonical | tall | canonical:q=..,r=.. | file:<path>
    #[arg(long)]
    point: Option<String>,
    /// output format
    #[arg(long, value_parser = ["json", "text"])]
    output: Option<String>,
    /// difference-quotient step valuation
    #[arg(long = "m-step")]
    m_step: Option<i64>,
    /// seed for randomized spot checks
    #[arg(long)]
    seed: Option<u64>,
    /// forced-bug branch flip (generator power), for sensitivity testing
    #[arg(long = "mutate-beta", hide = true)]
    mutate_beta: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an object and emit it as JSON
    Compute {
        /// module | h | u | E | boldE | J | pi | period
        object: String,
        /// route for E: u | det | dl
        #[arg(long, default_value = "u")]
        route: String,
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Run verification suites
    Verify {
        /// comma-separated suite names, or "default" for all
        #[arg(long)]
        suite: Option<String>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn build_config(common: &CommonOpts, suites: Option<&str>, route: Option<&str>) -> Result<RunConfig, Error> {
    // precedence: flags > config file > defaults
    let file_kv = match std::env::var("DRFORMS_CONFIG") {
        Ok(path) if !path.is_empty() => parse_config_file(std::path::Path::new(&path))?,
        _ => BTreeMap::new(),
    };
    let q = common
        .q
        .or_else(|| file_kv.get("q").and_then(|v| v.parse().ok()))
        .unwrap_or(3);
    let r = common
        .r
        .or_else(|| file_kv.get("r").and_then(|v| v.parse().ok()))
        .unwrap_or(2);
    let mut cfg = RunConfig::defaults(q, r);
    let mut file_rest = file_kv.clone();
    file_rest.remove("q");
    file_rest.remove("r");
    cfg.apply_kv(&file_rest)?;
    cfg.q = q;
    cfg.r = r;
    // flag layer
    let mut kv = BTreeMap::new();
    if let Some(v) = common.theta_precision {
        kv.insert("digits".into(), v.to_string());
    }
    if let Some(v) = common.t_trunc {
        kv.insert("t-trunc".into(), v.to_string());
    }
    if let Some(v) = common.z_trunc {
        kv.insert("z-trunc".into(), v.to_string());
    }
    if let Some(v) = common.degree_bound {
        kv.insert("degree-bound".into(), v.to_string());
    }
    if let Some(v) = common.module_degree_bound {
        kv.insert("module-degree-bound".into(), v.to_string());
    }
    if let Some(v) = &common.point {
        kv.insert("point".into(), v.clone());
    }
    if let Some(v) = &common.output {
        kv.insert("output".into(), v.clone());
    }
    if let Some(v) = common.m_step {
        kv.insert("m-step".into(), v.to_string());
    }
    if let Some(v) = common.seed {
        kv.insert("seed".into(), v.to_string());
    }
    if let Some(v) = common.mutate_beta {
        kv.insert("mutate-beta".into(), v.to_string());
    }
    if let Some(s) = suites {
        kv.insert("suite".into(), s.to_string());
    }
    if let Some(rt) = route {
        kv.insert("route".into(), rt.to_string());
    }
    cfg.apply_kv(&kv)?;
    Ok(cfg)
}

fn exit_code_for(e: &Error) -> ExitCode {
    match e {
        Error::InvalidConfig(_) => ExitCode::from(1),
        _ => ExitCode::from(2),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Compute { object, route, common } => {
            let cfg = match build_config(&common, None, Some(&route)) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            match run_compute(&object, &cfg) {
                Ok(doc) => {
                    emit_value(&cfg, &doc);
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            }
        }
        Command::Verify { suite, common } => {
            let cfg = match build_config(&common, suite.as_deref(), None) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            match run_verify(&cfg) {
                Ok(reports) => {
                    let pass = reports.iter().all(|r| r.pass);
                    emit_reports(&cfg, &reports, pass);
                    if pass {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(3)
                    }
                }
                Err(e) => fail(&e),
            }
        }
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    exit_code_for(e)
}

fn run_compute(object: &str, cfg: &RunConfig) -> Result<serde_json::Value, Error> {
    // π̃ needs no point at all
    if object == "pi" {
        cfg.validate(false)?;
        let pi = carlitz_pi(cfg.q, cfg.digits)?;
        return Ok(provenance(cfg, json!({ "pi": pi })));
    }
    cfg.validate(true)?;
    let z = cfg.resolve_point()?;
    let budget = cfg.budget();
    match object {
        "module" => {
            let m = DrinfeldModule::from_point(&z, &budget)?;
            let g: Vec<&CInfty> = (1..m.rank()).map(|i| m.g(i)).collect();
            let alpha: Vec<&CInfty> = (0..m.alpha_count()).map(|j| m.alpha(j)).collect();
            Ok(provenance(cfg, json!({
                "rank": m.rank(),
                "g": g,
                "delta": m.delta(),
                "alpha": alpha,
            })))
        }
        "h" => {
            let ctx = PointContext::new(&z, &budget)?;
            Ok(provenance(cfg, json!({ "h": ctx.h })))
        }
        "u" => {
            let ctx = PointContext::new(&z, &budget)?;
            let u = u_value(&ctx)?;
            Ok(provenance(cfg, json!({ "u": u })))
        }
        "E" => {
            let ctx = PointContext::new(&z, &budget)?;
            let value = match cfg.route.as_str() {
                "u" => false_eisenstein_u(&ctx)?,
                "det" => false_eisenstein_det(&ctx)?,
                "dl" => false_eisenstein_dl(&ctx, cfg.m_step)?,
                other => {
                    return Err(Error::InvalidConfig(format!("unknown route '{other}'")))
                }
            };
            let certified = value.err_bound().exp().map(|e| {
                let (n, d) = drforms::norm::exp_to_i64_pair(e);
                json!({"num": n, "den": d})
            });
            Ok(provenance(cfg, json!({
                "route": cfg.route,
                "value": value,
                "certified_valuation": certified,
            })))
        }
        "boldE" => {
            let ctx = PointContext::new(&z, &budget)?;
            let series = bold_e_u_series(&ctx, cfg.t_trunc)?;
            Ok(provenance(cfg, json!({ "boldE": series })))
        }
        "J" => {
            let m = DrinfeldModule::from_point(&z, &budget)?;
            let j = j_invariants(&m)?;
            let (w, normalized) = w_normalize(&m)?;
            Ok(provenance(cfg, json!({
                "J": j,
                "w": w,
                "normalized_coefficients": normalized,
            })))
        }
        "period" => {
            let m = DrinfeldModule::from_point(&z, &budget)?;
            let p = m.period_matrix()?;
            Ok(provenance(cfg, json!({ "period_matrix": p })))
        }
        other => Err(Error::InvalidConfig(format!("unknown object '{other}'"))),
    }
}

fn provenance(cfg: &RunConfig, mut doc: serde_json::Value) -> serde_json::Value {
    let meta = json!({
        "tool": "drforms",
        "version": env!("CARGO_PKG_VERSION"),
        "q": cfg.q,
        "r": cfg.r,
        "digits": cfg.digits,
        "t_trunc": cfg.t_trunc,
        "z_trunc": cfg.z_trunc,
        "degree_bound": cfg.degree_bound,
        "module_degree_bound": cfg.module_degree_bound,
        "point": cfg.point,
    });
    if let Some(map) = doc.as_object_mut() {
        map.insert("provenance".into(), meta);
    }
    doc
}

fn run_verify(cfg: &RunConfig) -> Result<Vec<Report>, Error> {
    cfg.validate(true)?;
    let z = cfg.resolve_point()?;
    let budget = cfg.budget();
    let ctx = PointContext::new(&z, &budget)?;
    let opts = VerifyOptions {
        n: cfg.t_trunc.min(24),
        m_step: cfg.m_step,
        seed: cfg.seed,
        mutate_beta: cfg.mutate_beta,
    };
    let names: Vec<String> = if cfg.suites.iter().any(|s| s == "default") {
        ALL_SUITES.iter().map(|s| s.to_string()).collect()
    } else {
        cfg.suites.clone()
    };
    let mut reports = Vec::new();
    for name in &names {
        if name == "mutation" {
            reports.extend(run_mutation_demonstration(&ctx, &opts)?);
        } else {
            reports.extend(run_suite(name, &ctx, &opts)?);
        }
    }
    Ok(reports)
}

fn emit_value(cfg: &RunConfig, doc: &serde_json::Value) {
    match cfg.output {
        OutputFormat::Json => println!("{}", serde_json::to_string_pretty(doc).unwrap()),
        OutputFormat::Text => println!("{doc}"),
    }
}

fn emit_reports(cfg: &RunConfig, reports: &[Report], pass: bool) {
    match cfg.output {
        OutputFormat::Json => {
            let doc = json!({
                "config": cfg,
                "reports": reports,
                "pass": pass,
                "timestamp": std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0),
            });
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        OutputFormat::Text => {
            for r in reports {
                let rv = r
                    .residual_valuation
                    .as_ref()
                    .map(|v| format!("q^({}/{})", v.num, v.den))
                    .unwrap_or_else(|| "0".into());
                let cv = r
                    .certified_valuation
                    .as_ref()
                    .map(|v| format!("q^({}/{})", v.num, v.den))
                    .unwrap_or_else(|| "exact".into());
            println!(
                    "{} {:<46} residual<= {:<16} certified= {}{}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.name,
                    rv,
                    cv,
                    r.detail
                        .as_ref()
                        .map(|d| format!("  [{d}]"))
                        .unwrap_or_default()
                );
            }
            println!("{}", if pass { "ALL PASS" } else { "FAILURES PRESENT" });
        }
    }
}
