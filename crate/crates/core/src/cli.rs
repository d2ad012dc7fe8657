//! `g4` command line: `list`, `verify`, `simulate`.
//!
//! Exit codes: 0 success, 1 an asserted check failed, 2 usage or
//! configuration error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::adiff::DIM;
use crate::catalog::{self, GroupId, GroupParams, SampleDomain};
use crate::checks::ToleranceConfig;
use crate::geometry::Eta;
use crate::mechanics::{self, DriftStats, PhasePoint};
use crate::report::{self, ParamsEcho, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "g4",
    version,
    about = "Verify and simulate the simply transitive G4 catalog"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Human,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print catalog entries with parameter constraints and structure constants.
    List {
        #[arg(long)]
        group: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Human)]
        format: Format,
    },
    /// Run the verification suite.
    Verify {
        /// Group id or `all`.
        #[arg(long, default_value = "all")]
        group: String,
        #[arg(long, env = "G4_SEED", default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        /// key=value; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        #[arg(long)]
        tol_exact: Option<f64>,
        #[arg(long)]
        tol_deriv: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate a trajectory and report conservation drift.
    Simulate {
        #[arg(long)]
        group: String,
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
        /// Comma-separated initial coordinates; defaults to the domain centre.
        #[arg(long)]
        u0: Option<String>,
        #[arg(long, default_value = "0.1,0.2,0.3,0.4")]
        p0: String,
        #[arg(long = "T", default_value_t = 10.0)]
        t_final: f64,
        #[arg(long, default_value_t = 1e-3)]
        h: f64,
        /// Trajectory CSV path; the drift summary then goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Apply one `key=value` override.
pub fn apply_param(p: &mut GroupParams, kv: &str) -> Result<(), String> {
    let (key, value) = kv
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got `{kv}`"))?;
    let num = || {
        value
            .trim()
            .parse::<f64>()
            .map_err(|_| format!("`{key}` needs a number, got `{value}`"))
    };
    match key.trim() {
        "c" => p.c = num()?,
        "alpha-angle" => p.alpha_angle = num()?,
        "k" => p.k = num()?,
        "l" => p.l = num()?,
        "eps01" => p.eps01 = num()?,
        "alpha1" => p.em_alphas[0] = num()?,
        "alpha2" => p.em_alphas[1] = num()?,
        "alpha3" => p.em_alphas[2] = num()?,
        "alpha4" => p.em_alphas[3] = num()?,
        "eta" => {
            let d = value
                .strip_prefix("diag:")
                .ok_or("eta must be given as diag:a,b,c,d")?;
            p.eta = Eta::diag(parse_vec4(d)?).map_err(|e| e.to_string())?;
        }
        other => return Err(format!("unknown parameter `{other}`")),
    }
    Ok(())
}

pub fn parse_vec4(s: &str) -> Result<[f64; DIM], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != DIM {
        return Err(format!("expected {DIM} comma-separated numbers, got `{s}`"));
    }
    let mut out = [0.0; DIM];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| format!("not a number: `{part}`"))?;
    }
    Ok(out)
}

fn params_from(list: &[String]) -> Result<GroupParams, String> {
    let mut p = GroupParams::default();
    for kv in list {
        apply_param(&mut p, kv)?;
    }
    Ok(p)
}

fn parse_groups(sel: &str) -> Result<Vec<GroupId>, String> {
    if sel.eq_ignore_ascii_case("all") {
        Ok(GroupId::ALL.to_vec())
    } else {
        sel.parse::<GroupId>()
            .map(|g| vec![g])
            .map_err(|e| e.to_string())
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

#[derive(Serialize)]
struct ConstantEntry {
    gamma: usize,
    alpha: usize,
    beta: usize,
    value: f64,
}

#[derive(Serialize)]
struct ListEntry {
    id: GroupId,
    title: &'static str,
    constraints: Vec<&'static str>,
    abelian_family: bool,
    structure_constants: Vec<ConstantEntry>,
    domain: SampleDomain,
}

#[derive(Serialize)]
struct ListDoc {
    schema: u32,
    groups: Vec<ListEntry>,
}

fn cmd_list(group: Option<String>, format: Format) -> Result<i32, String> {
    let ids = match group {
        Some(g) => parse_groups(&g)?,
        None => GroupId::ALL.to_vec(),
    };
    let params = GroupParams::default();
    let mut entries = Vec::new();
    for id in ids {
        let m = catalog::get_group(id, &params).map_err(|e| e.to_string())?;
        entries.push(ListEntry {
            id,
            title: id.title(),
            constraints: id.constraints(),
            abelian_family: id.is_abelian_family(),
            structure_constants: m
                .constants
                .nonzero()
                .into_iter()
                .map(|(gamma, alpha, beta, value)| ConstantEntry {
                    gamma,
                    alpha,
                    beta,
                    value,
                })
                .collect(),
            domain: m.domain.clone(),
        });
    }
    let text = match format {
        Format::Json => report::to_json_string(&ListDoc {
            schema: report::SCHEMA_VERSION,
            groups: entries,
        }),
        Format::Human => {
            let mut s = String::new();
            for e in &entries {
                let cs: Vec<String> = e
                    .structure_constants
                    .iter()
                    .map(|c| format!("C^{}_{}{}={}", c.gamma, c.alpha, c.beta, c.value))
                    .collect();
                s.push_str(&format!("{:<14} {}\n", e.id.as_str(), e.title));
                s.push_str(&format!(
                    "{:<14} constants: {}\n",
                    "",
                    if cs.is_empty() {
                        "none (abelian)".into()
                    } else {
                        cs.join(" ")
                    }
                ));
                if !e.constraints.is_empty() {
                    s.push_str(&format!(
                        "{:<14} constraints: {}\n",
                        "",
                        e.constraints.join("; ")
                    ));
                }
            }
            s
        }
        Format::Csv => return Err("list supports --format json or human".into()),
    };
    emit(&None, &text)?;
    Ok(EXIT_OK)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    group: &str,
    seed: u64,
    points: usize,
    params: &[String],
    tol_exact: Option<f64>,
    tol_deriv: Option<f64>,
    format: Format,
    out: &Option<PathBuf>,
) -> Result<i32, String> {
    let groups = parse_groups(group)?;
    let params = params_from(params)?;
    let mut tol = ToleranceConfig::default();
    if let Some(t) = tol_exact {
        tol.tol_exact = t;
    }
    if let Some(t) = tol_deriv {
        tol.tol_deriv = t;
    }
    if !tol.is_valid() {
        return Err("tolerances must be positive and finite".into());
    }
    let cfg = VerifyConfig {
        groups,
        params,
        n_points: points,
        seed,
        tol,
    };
    let rep = report::run_verification(&cfg).map_err(|e| e.to_string())?;
    let text = match format {
        Format::Json => rep.to_json(),
        Format::Csv => rep.to_csv(),
        Format::Human => rep.to_human(),
    };
    emit(out, &text)?;
    Ok(if rep.all_asserted_pass() {
        EXIT_OK
    } else {
        EXIT_FAILED
    })
}

#[derive(Serialize)]
struct SimulationSummary {
    schema: u32,
    group: GroupId,
    params: ParamsEcho,
    u0: [f64; DIM],
    p0: [f64; DIM],
    t_final: f64,
    h: f64,
    drift: DriftStats,
}

fn domain_centre(d: &SampleDomain) -> [f64; DIM] {
    std::array::from_fn(|k| 0.5 * (d.bounds[k].0 + d.bounds[k].1))
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    group: &str,
    params: &[String],
    u0: Option<String>,
    p0: &str,
    t_final: f64,
    h: f64,
    out: &Option<PathBuf>,
) -> Result<i32, String> {
    let id: GroupId = group
        .parse()
        .map_err(|e: catalog::CatalogError| e.to_string())?;
    let params = params_from(params)?;
    let model = catalog::get_group(id, &params).map_err(|e| e.to_string())?;
    let u0 = match u0 {
        Some(s) => parse_vec4(&s)?,
        None => domain_centre(&model.domain),
    };
    let p0 = parse_vec4(p0)?;
    let state0 = PhasePoint::new(u0, p0);
    let traj =
        mechanics::integrate_trajectory(&model, &state0, t_final, h).map_err(|e| e.to_string())?;
    let summary = SimulationSummary {
        schema: report::SCHEMA_VERSION,
        group: id,
        params: (&params).into(),
        u0,
        p0,
        t_final,
        h,
        drift: mechanics::drift_report(&traj),
    };
    let summary = report::to_json_string(&summary);
    let mut csv = Vec::new();
    traj.write_csv(&mut csv).map_err(|e| e.to_string())?;
    let csv = String::from_utf8(csv).expect("csv is ascii");
    match out {
        Some(_) => {
            emit(out, &csv)?;
            emit(&None, &summary)?;
        }
        None => {
            emit(&None, &csv)?;
            eprint!("{summary}");
        }
    }
    Ok(EXIT_OK)
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::List { group, format } => cmd_list(group, format),
        Command::Verify {
            group,
            seed,
            points,
            params,
            tol_exact,
            tol_deriv,
            format,
            out,
        } => cmd_verify(
            &group, seed, points, &params, tol_exact, tol_deriv, format, &out,
        ),
        Command::Simulate {
            group,
            params,
            u0,
            p0,
            t_final,
            h,
            out,
        } => cmd_simulate(&group, &params, u0, &p0, t_final, h, &out),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params_parse() {
        let mut p = GroupParams::default();
        apply_param(&mut p, "c=3.5").unwrap();
        apply_param(&mut p, "alpha3=-2").unwrap();
        apply_param(&mut p, "eta=diag:1,1,1,1").unwrap();
        assert_eq!(p.c, 3.5);
        assert_eq!(p.em_alphas[2], -2.0);
        assert_eq!(p.eta, Eta::euclidean());
        assert!(apply_param(&mut p, "nosuch=1").is_err());
        assert!(apply_param(&mut p, "c").is_err());
        assert!(apply_param(&mut p, "eta=1,1,1,1").is_err());
        assert!(apply_param(&mut p, "eta=diag:1,0,1,1").is_err());
    }

    #[test]
    fn vec4_parse() {
        assert_eq!(
            parse_vec4("0.1, 0.2,0.3,0.4").unwrap(),
            [0.1, 0.2, 0.3, 0.4]
        );
        assert!(parse_vec4("1,2,3").is_err());
        assert!(parse_vec4("1,2,x,4").is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["g4", "list", "--group", "nosuch"]), EXIT_USAGE);
        assert_eq!(
            run(["g4", "verify", "--group", "g4-i-cne1", "--param", "c=1"]),
            EXIT_USAGE
        );
        assert_eq!(
            run(["g4", "simulate", "--group", "g4-i-cne1", "--h", "0"]),
            EXIT_USAGE
        );
        assert_eq!(run(["g4", "frobnicate"]), EXIT_USAGE);
        assert_eq!(run(["g4", "verify", "--tol-exact", "-1"]), EXIT_USAGE);
    }
}
