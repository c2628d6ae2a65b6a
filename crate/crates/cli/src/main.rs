mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use casimir_core::energies::{
    beta, casimir_energy, casimir_force, pfa_energy, EnergyOptions, Model,
};
use casimir_core::expansions::{
    default_fit_grid, fit_drude_constants, gamma0_quadrature, short_energy, ExpansionConstants,
};
use casimir_core::geometry::{mu_of_ell, Configuration};
use casimir_core::verify::{self, VerifyOptions, DEFAULT_SEED};
use casimir_core::{Error, BOLTZMANN};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use output::{CheckRecord, ConstantRecord, EnergyRecord, Format, SweepRecord};

/// Classical Casimir energies for spheres and a sphere facing a plane.
#[derive(Parser)]
#[command(name = "casimir", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy of a single configuration in units of k_B T.
    Energy(EnergyArgs),
    /// Sphere-plane energies, forces and PFA deviations on a log-spaced grid.
    Sweep(SweepArgs),
    /// Run the self-verification suite.
    Verify(VerifyArgs),
    /// Print the short-distance expansion constants.
    Constants(ConstantsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum GeometryArg {
    SpherePlane,
    Exterior,
    Interior,
    Concentric,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Dirichlet,
    Drude,
}

impl From<ModelArg> for Model {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Dirichlet => Model::Dirichlet,
            ModelArg::Drude => Model::Drude,
        }
    }
}

#[derive(Args)]
struct EnergyArgs {
    #[arg(long, value_enum)]
    geometry: GeometryArg,
    #[arg(long, value_enum, default_value = "dirichlet")]
    model: ModelArg,
    /// Radius of the first sphere (the sphere for sphere-plane, default 1).
    #[arg(long = "R1")]
    r1: Option<f64>,
    /// Radius of the second sphere.
    #[arg(long = "R2")]
    r2: Option<f64>,
    /// Surface-to-surface gap.
    #[arg(long = "L", conflicts_with = "ell")]
    gap: Option<f64>,
    /// Gap in units of R1.
    #[arg(long)]
    ell: Option<f64>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Also report the energy in joules at this temperature.
    #[arg(long = "temperature-K")]
    temperature: Option<f64>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Allow the Drude model for two spheres.
    #[arg(long)]
    experimental_drude_spheres: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 1e-3)]
    ell_min: f64,
    #[arg(long, default_value_t = 10.0)]
    ell_max: f64,
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Restrict to one model; both by default.
    #[arg(long, value_enum)]
    model: Option<ModelArg>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct VerifyArgs {
    /// Reduced cutoffs and grids.
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Negate the oracle operator entries; the suite must then fail.
    #[arg(long, hide = true)]
    inject_sign_flip: bool,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct ConstantsArgs {
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

enum Failure {
    Usage(String),
    Core(Error),
    Verification(usize),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Io(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Core(Error::Domain(_) | Error::Unsupported(_)) => 3,
            Failure::Core(_) => 4,
            Failure::Verification(_) => 5,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => e.to_string(),
            Failure::Verification(n) => format!("{n} verification check(s) failed"),
            Failure::Io(e) => e.to_string(),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn configuration(args: &EnergyArgs) -> Result<Configuration, Failure> {
    let need = |v: Option<f64>, flag: &str| {
        v.ok_or_else(|| Failure::Usage(format!("--{flag} is required for this geometry")))
    };
    let gap = |r1: f64| match (args.gap, args.ell) {
        (Some(l), _) => Ok(l),
        (None, Some(ell)) => Ok(ell * r1),
        (None, None) => usage("one of --L or --ell is required for this geometry"),
    };
    let cfg = match args.geometry {
        GeometryArg::SpherePlane => {
            if args.r2.is_some() {
                return usage("--R2 does not apply to sphere-plane");
            }
            let radius = args.r1.unwrap_or(1.0);
            Configuration::SpherePlane {
                radius,
                gap: gap(radius)?,
            }
        }
        GeometryArg::Exterior => {
            let (r1, r2) = (need(args.r1, "R1")?, need(args.r2, "R2")?);
            Configuration::Exterior {
                r1,
                r2,
                gap: gap(r1)?,
            }
        }
        GeometryArg::Interior => {
            let (r1, r2) = (need(args.r1, "R1")?, need(args.r2, "R2")?);
            Configuration::Interior {
                r1,
                r2,
                gap: gap(r1)?,
            }
        }
        GeometryArg::Concentric => {
            if args.gap.is_some() || args.ell.is_some() {
                return usage("concentric spheres take no gap; the gap is R2 - R1");
            }
            Configuration::Concentric {
                r1: need(args.r1, "R1")?,
                r2: need(args.r2, "R2")?,
            }
        }
    };
    Ok(cfg)
}

fn cmd_energy(args: &EnergyArgs, out: &mut impl Write) -> Result<(), Failure> {
    let cfg = configuration(args)?;
    if let Some(t) = args.temperature {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("temperature must be positive, got {t}")).into());
        }
    }
    let model = Model::from(args.model);
    let opts = EnergyOptions {
        tol: args.tol,
        experimental_drude_spheres: args.experimental_drude_spheres,
        ..Default::default()
    };
    let e = casimir_energy(&cfg, model, &opts)?;
    let geometry = GeometryArg::to_possible_value(&args.geometry)
        .map(|v| v.get_name().to_string())
        .unwrap_or_default();
    let rec = EnergyRecord {
        geometry,
        model: model.name().to_string(),
        z: e.z,
        energy: e.value,
        tail_bound: e.tail_bound,
        terms_used: e.terms_used,
        energy_joule: args.temperature.map(|t| e.value * BOLTZMANN * t),
    };
    output::write_energy(out, &rec, args.format)?;
    Ok(())
}

fn sweep_point(ell: f64, model: Model, tol: f64) -> SweepRecord {
    let cfg = Configuration::sphere_plane(1.0, ell);
    let opts = EnergyOptions {
        tol,
        ..Default::default()
    };
    let mut problems = Vec::new();
    let mut keep = |what: &str, r: casimir_core::Result<f64>| match r {
        Ok(v) => Some(v),
        Err(e) => {
            problems.push(format!("{what}: {e}"));
            None
        }
    };
    let exact = casimir_energy(&cfg, model, &opts);
    let (tail_bound, terms_used) = match &exact {
        Ok(e) => (Some(e.tail_bound), Some(e.terms_used)),
        Err(_) => (None, None),
    };
    let e_exact = keep("exact", exact.map(|e| e.value));
    let e_expansion = keep(
        "expansion",
        mu_of_ell(ell)
            .and_then(|mu| short_energy(mu, model))
            .map(|e| e.value),
    );
    let e_pfa = keep("pfa", pfa_energy(&cfg));
    let f_exact = keep("force", casimir_force(&cfg, model, &opts).map(|f| f.value));
    let b = keep("beta", beta(ell, model, tol));
    let status = if problems.is_empty() {
        "ok".to_string()
    } else {
        problems.join("; ")
    };
    SweepRecord {
        ell,
        model: model.name().to_string(),
        E_exact: e_exact,
        E_expansion: e_expansion,
        E_pfa: e_pfa,
        F_exact: f_exact,
        beta: b,
        tail_bound,
        terms_used,
        status,
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i + 1 == n => hi,
            _ => 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64),
        })
        .collect()
}

fn cmd_sweep(args: &SweepArgs, out: &mut impl Write) -> Result<(), Failure> {
    if !(args.ell_min > 0.0 && args.ell_max >= args.ell_min && args.ell_max.is_finite()) {
        return Err(Error::Domain(format!(
            "need 0 < ell-min <= ell-max, got {} and {}",
            args.ell_min, args.ell_max
        ))
        .into());
    }
    if args.points == 0 {
        return usage("--points must be at least 1");
    }
    let models: Vec<Model> = match args.model {
        Some(m) => vec![m.into()],
        None => Model::ALL.to_vec(),
    };
    let jobs: Vec<(f64, Model)> = log_grid(args.ell_min, args.ell_max, args.points)
        .into_iter()
        .flat_map(|ell| models.iter().map(move |&m| (ell, m)))
        .collect();
    let rows: Vec<SweepRecord> = jobs
        .par_iter()
        .map(|&(ell, m)| sweep_point(ell, m, args.tol))
        .collect();
    output::write_sweep(out, &rows, args.format)?;
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, out: &mut impl Write) -> Result<(), Failure> {
    let report = verify::run(&VerifyOptions {
        quick: args.quick,
        seed: args.seed,
        inject_sign_flip: args.inject_sign_flip,
    });
    let rows: Vec<CheckRecord> = report
        .checks
        .iter()
        .map(|c| CheckRecord {
            name: c.name.clone(),
            passed: c.passed,
            detail: c.detail.clone(),
        })
        .collect();
    output::write_checks(out, &rows, args.format)?;
    let failed: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        eprintln!("failed: {}", failed.join(", "));
        Err(Failure::Verification(failed.len()))
    }
}

fn cmd_constants(args: &ConstantsArgs, out: &mut impl Write) -> Result<(), Failure> {
    let published = ExpansionConstants::published();
    let derived = ExpansionConstants::derived();
    let fit = fit_drude_constants(&default_fit_grid())?;
    let g0 = gamma0_quadrature(1e-15)?;
    let mut rows = vec![ConstantRecord {
        name: "gamma0".into(),
        published: Some(published.gamma0),
        computed: g0,
        fitted: None,
        deviation: Some((g0 - published.gamma0).abs()),
    }];
    for (name, p, d, f) in [
        ("gamma1", published.gamma1, derived.gamma1, fit.gamma1),
        ("gamma2", published.gamma2, derived.gamma2, fit.gamma2),
        ("gamma3", published.gamma3, derived.gamma3, fit.gamma3),
        ("gamma4", published.gamma4, derived.gamma4, fit.gamma4),
    ] {
        rows.push(ConstantRecord {
            name: name.into(),
            published: Some(p),
            computed: d,
            fitted: Some(f),
            deviation: Some((f - p).abs()),
        });
    }
    rows.push(ConstantRecord {
        name: "zeta3".into(),
        published: None,
        computed: derived.zeta3,
        fitted: None,
        deviation: None,
    });
    output::write_constants(out, &rows, args.format)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = match &cli.command {
        Command::Energy(a) => cmd_energy(a, &mut out),
        Command::Sweep(a) => cmd_sweep(a, &mut out),
        Command::Verify(a) => cmd_verify(a, &mut out),
        Command::Constants(a) => cmd_constants(a, &mut out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
