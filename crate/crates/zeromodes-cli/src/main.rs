//! `zeromodes`: count, construct and verify zero modes from a TOML config.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 bad configuration,
//! 3 numerical failure.

mod config;
mod report;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use log::{info, warn};
use serde_json::{json, Value};

use config::{sweep_points, ConfigError, Kind, RunConfig, SweepTarget};
use report::{emit, Format, Row};
use zeromodes::bm::{bm_verify, bm_zero_mode, BmConfig, BmOutcome};
use zeromodes::eta::{eta_closed, eta_continued, index_formula, index_vs_count, IndexReport};
use zeromodes::field::{normalized_hole_fluxes, total_flux, FieldSpec, KernelChoice};
use zeromodes::geometry::{DomainKind, DomainSpec};
use zeromodes::modes::{
    analytic_extension_check, build_basis, count_zero_modes, verify_mode, Chirality, GridSpec, ModeCount,
};
use zeromodes::potential::PotentialField;
use zeromodes::Error;

#[derive(Parser, Debug)]
#[command(name = "zeromodes", version, about = "Zero modes of magnetic Dirac operators with spectral boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Problem configuration (TOML)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,

    /// Write the table here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Residual and leakage tolerance for `verify`
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Finite-difference resolution (step = smallest radius / n)
    #[arg(long, global = true)]
    grid: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Number and chirality of zero modes
    Count,
    /// Build the monomial basis and verify every mode numerically
    Verify,
    /// Staircase table over a flux range, or a Berry-Mondragon sweep
    Sweep,
    /// Eta invariants from the closed form and the continued series
    Eta,
    /// Index from boundary eta invariants, compared with the signed count
    Index,
    /// Berry-Mondragon existence test and verification
    Bm,
}

fn pi_units(x: f64) -> f64 {
    x / PI
}

fn chirality_name(c: Chirality) -> &'static str {
    match c {
        Chirality::Up => "up",
        Chirality::Down => "down",
        Chirality::None => "none",
    }
}

fn kind_name(d: &DomainSpec) -> &'static str {
    match d.kind {
        DomainKind::Plane => "plane",
        DomainKind::Disc { .. } => "disc",
        DomainKind::Sphere { .. } => "sphere",
    }
}

fn kernel_name(k: KernelChoice) -> &'static str {
    match k {
        KernelChoice::Default => "default",
        KernelChoice::Alternate => "alternate",
    }
}

fn signed(m: ModeCount) -> i64 {
    match m.chirality {
        Chirality::Up => m.count as i64,
        Chirality::Down => -(m.count as i64),
        Chirality::None => 0,
    }
}

fn eta_list(ind: &Option<IndexReport>) -> Value {
    match ind {
        // adding zero turns -0.0 into 0.0
        Some(r) => json!(r.eta_holes.iter().chain(std::iter::once(&r.eta_outer)).map(|e| e + 0.0).collect::<Vec<_>>()),
        None => json!([]),
    }
}

/// Fields shared by `count`, `verify` and `index` rows.
fn base_row(domain: &DomainSpec, field: &FieldSpec) -> Result<(Row, ModeCount, Option<IndexReport>)> {
    let phi = total_flux(field, domain)?;
    let mc = count_zero_modes(domain, field)?;
    let ind = if matches!(domain.kind, DomainKind::Plane) { None } else { Some(index_formula(domain, field)?) };
    let normalized: Vec<f64> = normalized_hole_fluxes(field, domain).iter().map(|n| pi_units(n.value)).collect();
    let row = json!({
        "domain": kind_name(domain),
        "phi_total": pi_units(phi),
        "phi_normalized": normalized,
        "q": field.q,
        "kernel_choice": kernel_name(field.kernel),
        "count": mc.count,
        "chirality": chirality_name(mc.chirality),
        "index": ind.as_ref().map(|r| r.index),
        "eta": eta_list(&ind),
    });
    let Value::Object(row) = row else { unreachable!() };
    Ok((row, mc, ind))
}

fn cmd_count(cfg: &RunConfig) -> Result<(Vec<Row>, bool)> {
    let (domain, field) = cfg.problem()?;
    let (row, _, _) = base_row(&domain, &field)?;
    Ok((vec![row], true))
}

fn grid_spec(cfg: &RunConfig, cli: &Cli) -> Result<GridSpec> {
    let mut g = match cfg.grid(cli.grid)? {
        Some(n) => GridSpec::new(n),
        None => GridSpec::default(),
    };
    if let Some(t) = cfg.tolerance(cli.tol)? {
        g = g.with_tol(t);
    }
    Ok(g)
}

fn cmd_verify(cfg: &RunConfig, cli: &Cli) -> Result<(Vec<Row>, bool)> {
    let (domain, field) = cfg.problem()?;
    let grid = grid_spec(cfg, cli)?;
    let (base, mc, _) = base_row(&domain, &field)?;
    let note = if domain.is_sphere() { "modes carry W^(-1/2); residual is for W^(-3/2) D W^(1/2)" } else { "" };
    let potential = PotentialField::new(&domain, &field)?;
    let basis = match build_basis(&domain, &field, &potential) {
        Ok(b) => b,
        Err(Error::EmptyBasis) => {
            info!("count is 0, nothing to verify");
            let mut row = base;
            row.insert("mode_degree".into(), Value::Null);
            row.insert("residuals".into(), json!({"pde": null, "leakage": [], "exponent_ok": null}));
            row.insert("analytic_extension".into(), json!([]));
            row.insert("pass".into(), json!(true));
            row.insert("note".into(), json!(note));
            return Ok((vec![row], true));
        }
        Err(e) => return Err(e.into()),
    };
    debug_assert_eq!(basis.modes.len() as u64, mc.count);
    let mut rows = Vec::new();
    let mut all = true;
    for (n, mode) in basis.degrees.iter().zip(&basis.modes) {
        let r = verify_mode(mode, &domain, &field, &potential, &grid)?;
        let ext = (0..domain.holes.len())
            .map(|j| analytic_extension_check(mode, &domain, &field, &potential, j))
            .collect::<zeromodes::Result<Vec<bool>>>()?;
        let pass = r.pass && ext.iter().all(|&b| b);
        all &= pass;
        if !pass {
            warn!("degree {n} failed: {r:?}");
        }
        let mut row = base.clone();
        row.insert("mode_degree".into(), json!(n));
        row.insert(
            "residuals".into(),
            json!({
                "pde": r.pde_residual,
                "leakage": r.leakage.iter().map(|l| l.1).collect::<Vec<_>>(),
                "exponent_ok": r.exponent_ok,
            }),
        );
        row.insert("analytic_extension".into(), json!(ext));
        row.insert("pass".into(), json!(pass));
        row.insert("note".into(), json!(note));
        rows.push(row);
    }
    Ok((rows, all))
}

/// The configured field with bump 0 retuned so the (semi-)total flux is
/// `phi`; on a sphere the designated hole absorbs the change.
fn field_with_total(domain: &DomainSpec, field: &FieldSpec, phi: f64) -> Result<FieldSpec> {
    if field.bumps.is_empty() {
        bail!(ConfigError("a flux sweep retunes bump 0, so [field] needs at least one bump".into()));
    }
    let mut f = field.clone();
    let held: f64 = normalized_hole_fluxes(field, domain).iter().map(|n| n.value).sum();
    let others: f64 = field.bumps[1..].iter().map(|b| b.flux).sum();
    f.bumps[0].flux = phi - held - others;
    if domain.is_sphere() {
        let n = domain.holes.len();
        let raw: f64 = f.bumps.iter().map(|b| b.flux).sum::<f64>() + f.hole_fluxes[..n].iter().sum::<f64>();
        f.hole_fluxes[n] = -raw;
    }
    Ok(f)
}

fn cmd_sweep(cfg: &RunConfig) -> Result<(Vec<Row>, bool)> {
    let s = cfg.sweep.as_ref().ok_or_else(|| ConfigError("missing [sweep]".into()))?;
    let points = sweep_points(s.phi_min, s.phi_max, s.step)?;
    if s.target == SweepTarget::Bm {
        let bm = cfg.bm_config()?;
        let mut rows = Vec::new();
        for p in points {
            let out = bm_zero_mode(&BmConfig { phi: p.value() * PI, ..bm })?;
            let (n, reason) = match &out {
                BmOutcome::Mode(m) => (Some(m.n), None),
                BmOutcome::None(r) => (None, Some(r.clone())),
            };
            if let Some(n) = n {
                info!("mode at Φ = {}π (n = {n})", p.value());
            }
            let Value::Object(row) = json!({
                "phi_total": p.value(),
                "has_mode": n.is_some(),
                "n": n,
                "reason": reason,
            }) else { unreachable!() };
            rows.push(row);
        }
        return Ok((rows, true));
    }
    let (domain, field) = cfg.problem()?;
    let plane = DomainSpec::plane(domain.holes.clone());
    let bounded = !matches!(domain.kind, DomainKind::Plane);
    let mut rows = Vec::new();
    let mut prev: Option<(f64, i64, Option<i64>)> = None;
    for p in points {
        let phi = p.value() * PI;
        let f = field_with_total(&domain, &field, phi)?;
        let mut pf = f.clone();
        pf.hole_fluxes.truncate(domain.holes.len());
        pf.q = 0.0;
        let cp = signed(count_zero_modes(&plane, &pf)?);
        let (cd, ind) = if bounded {
            (Some(signed(count_zero_modes(&domain, &f)?)), Some(index_formula(&domain, &f)?))
        } else {
            (None, None)
        };
        let last = prev.map_or(f64::NAN, |x| x.0);
        let (jp, jd) = match prev {
            Some((_, a, b)) => (Some(cp - a), cd.zip(b).map(|(x, y)| x - y)),
            None => (None, None),
        };
        if let Some(j) = jp.filter(|&j| j != 0) {
            info!("plane count jumps by {j} between Φ = {}π and {}π", last, p.value());
        }
        if let Some(j) = jd.filter(|&j| j != 0) {
            info!("{} count jumps by {j} between Φ = {}π and {}π", kind_name(&domain), last, p.value());
        }
        prev = Some((p.value(), cp, cd));
        let Value::Object(row) = json!({
            "phi_total": p.value(),
            "count_plane": cp.unsigned_abs(),
            "chirality_plane": chirality_name(chirality_of(cp)),
            "count_disc": cd.map(i64::unsigned_abs),
            "chirality_disc": cd.map(|c| chirality_name(chirality_of(c))),
            "q": f.q,
            "index": ind.as_ref().map(|r| r.index),
            "eta": eta_list(&ind),
            "jump_plane": jp,
            "jump_disc": jd,
        }) else { unreachable!() };
        rows.push(row);
    }
    Ok((rows, true))
}

fn chirality_of(signed: i64) -> Chirality {
    match signed.signum() {
        1 => Chirality::Up,
        -1 => Chirality::Down,
        _ => Chirality::None,
    }
}

fn cmd_eta(cfg: &RunConfig) -> Result<(Vec<Row>, bool)> {
    let e = cfg.eta.as_ref().ok_or_else(|| ConfigError("missing [eta]".into()))?;
    let terms = e.terms.unwrap_or(10_000);
    if terms < 8 {
        bail!(ConfigError("[eta] terms must be at least 8".into()));
    }
    let mut rows = Vec::new();
    for c in &e.c {
        let c = c.value();
        let closed = eta_closed(c);
        let cont = eta_continued(c, terms)?;
        let Value::Object(row) = json!({
            "c": c,
            "eta_closed": closed,
            "eta_continued": cont,
            "abs_error": (cont - closed).abs(),
            "terms": terms,
        }) else { unreachable!() };
        rows.push(row);
    }
    Ok((rows, true))
}

fn cmd_index(cfg: &RunConfig) -> Result<(Vec<Row>, bool)> {
    let (domain, field) = cfg.problem()?;
    if cfg.kind()? == Kind::Plane {
        bail!(ConfigError("the index formula needs a disc or sphere".into()));
    }
    let (mut row, _, ind) = base_row(&domain, &field)?;
    let ind = ind.expect("bounded domain");
    let check = index_vs_count(&domain, &field)?;
    row.insert("raw".into(), json!(ind.raw));
    row.insert("simplified".into(), json!(ind.simplified));
    row.insert("kernel_dims".into(), json!(ind.ker_holes.iter().chain(std::iter::once(&ind.ker_outer)).collect::<Vec<_>>()));
    row.insert("signed_count".into(), json!(check.signed_count));
    row.insert("consistent".into(), json!(check.consistent));
    Ok((vec![row], check.consistent))
}

fn cmd_bm(cfg: &RunConfig) -> Result<(Vec<Row>, bool)> {
    let bm = cfg.bm_config()?;
    let out = bm_zero_mode(&bm)?;
    let (n, reason) = match &out {
        BmOutcome::Mode(m) => (Some(m.n), None),
        BmOutcome::None(r) => (None, Some(r.clone())),
    };
    let report = match out.mode() {
        Some(m) => Some(bm_verify(&bm, m)?),
        None => None,
    };
    let pass = report.as_ref().is_none_or(|r| r.pass);
    let Value::Object(row) = json!({
        "phi_total": pi_units(bm.phi),
        "has_mode": n.is_some(),
        "n": n,
        "residuals": {
            "pde": report.as_ref().map(|r| r.pde_residual),
            "inner": report.as_ref().map(|r| r.inner_residual),
            "outer": report.as_ref().map(|r| r.outer_residual),
        },
        "pass": pass,
        "reason": reason,
    }) else { unreachable!() };
    Ok((vec![row], pass))
}

fn run(cli: &Cli) -> Result<bool> {
    let path = cli.config.as_ref().ok_or_else(|| ConfigError("--config is required".into()))?;
    let cfg = config::load(path)?;
    let (rows, ok) = match cli.command {
        Command::Count => cmd_count(&cfg)?,
        Command::Verify => cmd_verify(&cfg, cli)?,
        Command::Sweep => cmd_sweep(&cfg)?,
        Command::Eta => cmd_eta(&cfg)?,
        Command::Index => cmd_index(&cfg)?,
        Command::Bm => cmd_bm(&cfg)?,
    };
    emit(&rows, cli.format, cli.out.as_deref()).context("writing output")?;
    Ok(ok)
}

fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.downcast_ref::<ConfigError>().is_some() {
            return 2;
        }
        if let Some(err) = cause.downcast_ref::<Error>() {
            return match err {
                Error::InvalidDomain(_) | Error::InvalidField(_) | Error::SphereFluxMismatch(_) => 2,
                _ => 3,
            };
        }
    }
    3
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
