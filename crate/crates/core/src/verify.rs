//! Self-verification suite run by `casimir verify`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energies::{
    casimir_energy, dirichlet_energy, drude_energy, drude_monopole_log, energy_mu, EnergyOptions,
    Model,
};
use crate::expansions::{
    gamma0_quadrature, short_energy_with, ExpansionConstants, GAMMA0_PUBLISHED,
};
use crate::geometry::{mu_of_ell, Configuration};
use crate::numeric::{constant, fit_slope, DoubleDouble, LN_2, LN_GLAISHER};
use crate::oracle::{
    build_n_spherical, det_one_minus, dirichlet_energy_oracle, drude_energy_oracle,
    energy_oracle_sign_flipped, logdet_one_minus_matrix, translation_inverse_residual,
    verify_transform_chain, OracleEnergy,
};
use crate::Result;

pub const DEFAULT_SEED: u64 = 0x5eed_ca51;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Reduced grids and cutoffs.
    pub quick: bool,
    pub seed: u64,
    /// Negate every entry of the spherical-basis operator in the oracle.
    pub inject_sign_flip: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            quick: false,
            seed: DEFAULT_SEED,
            inject_sign_flip: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    fn push(&mut self, name: impl Into<String>, outcome: Result<(bool, String)>) {
        let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
        self.checks.push(CheckResult {
            name: name.into(),
            passed,
            detail,
        });
    }
}

pub const EQUIVALENCE_GRID: [f64; 5] = [0.05, 0.1, 0.3, 0.5, 0.2679491924311227];
const EQUIVALENCE_TOL: f64 = 1e-7;
// Floor for the comparison, covering rounding in both routes.
const ROUNDING_FLOOR: f64 = 1e-13;

fn oracle(z: f64, model: Model, l_max: usize, m_max: usize, flip: bool) -> Result<OracleEnergy> {
    if flip {
        return energy_oracle_sign_flipped(z, model, l_max, m_max);
    }
    match model {
        Model::Dirichlet => dirichlet_energy_oracle(z, l_max, m_max),
        Model::Drude => drude_energy_oracle(z, l_max, m_max),
    }
}

fn representation_equivalence(opts: &VerifyOptions, model: Model) -> Result<(bool, String)> {
    let (l_max, m_max) = if opts.quick { (100, 60) } else { (160, 100) };
    let mut ok = true;
    let mut worst: f64 = 0.0;
    for &z in &EQUIVALENCE_GRID {
        let s = match model {
            Model::Dirichlet => dirichlet_energy(z, 1e-15)?,
            Model::Drude => drude_energy(z, 1e-15)?,
        };
        let o = oracle(z, model, l_max, m_max, opts.inject_sign_flip)?;
        let diff = (s.value - o.value).abs();
        worst = worst.max(diff);
        ok &= s.tail_bound <= EQUIVALENCE_TOL
            && o.convergence_estimate <= EQUIVALENCE_TOL
            && diff <= s.tail_bound + o.convergence_estimate + ROUNDING_FLOOR;
    }
    Ok((
        ok,
        format!("max |series - oracle| = {worst:.3e} (l_max {l_max}, m_max {m_max})"),
    ))
}

/// Cutoff gaps `|ld(l) - ld(2l)|` must shrink geometrically at no worse than
/// the asymptotic rate `sech²(mu)` per unit of `l`.
fn cutoff_convergence(opts: &VerifyOptions) -> Result<(bool, String)> {
    let z: f64 = 0.5;
    let rate = (2.0 * z / (1.0 + z * z)).powi(2);
    let ld = |l: usize| -> Result<f64> {
        logdet_one_minus_matrix(&build_n_spherical(z, 0, l, Model::Dirichlet)?.entries)
    };
    let top = if opts.quick { 20 } else { 28 };
    let mut gaps = Vec::new();
    for l in (8..=top).step_by(2) {
        gaps.push((ld(l)? - ld(2 * l)?).abs());
    }
    let ratios: Vec<f64> = gaps.windows(2).map(|w| (w[1] / w[0]).sqrt()).collect();
    let ok = ratios.iter().all(|&r| r < rate);
    let last = ratios.last().copied().unwrap_or(f64::NAN);
    Ok((
        ok,
        format!("per-unit ratio {last:.4} vs sech^2(mu) = {rate:.4} at Z = {z}"),
    ))
}

fn transform_chain(opts: &VerifyOptions) -> Result<(bool, String)> {
    let z = 0.3;
    let l_max = 40;
    let rep = verify_transform_chain(z, 1.0, l_max)?;
    let closed = drude_monopole_log(z, 1e-16)?;
    let bracket = (rep.rank_one_part - closed).abs();
    let mut ok = rep.logdet_gap <= 1e-9
        && bracket <= 1e-10
        && rep.after_translation_deviation <= 1e-12
        && rep.bispherical_deviation <= 1e-9;
    let radii: &[f64] = if opts.quick { &[10.0] } else { &[0.1, 10.0] };
    let mut r_gap: f64 = 0.0;
    for &r in radii {
        let other = verify_transform_chain(z, r, l_max)?;
        r_gap = r_gap
            .max((other.logdet_spherical_f - rep.logdet_spherical_f).abs())
            .max((other.logdet_bispherical_f - rep.logdet_bispherical_f).abs());
    }
    ok &= r_gap <= 1e-9;
    Ok((
        ok,
        format!(
            "logdet gap {:.2e}, bracket {:.2e}, entrywise {:.2e}/{:.2e}, radius {:.2e}",
            rep.logdet_gap,
            bracket,
            rep.after_translation_deviation,
            rep.bispherical_deviation,
            r_gap
        ),
    ))
}

/// `det(1 - A) = 1 - tr A` on random matrices with equal rows.
pub fn rank_one(opts: &VerifyOptions) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=12);
        let mut row: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let tr: f64 = row.iter().sum();
        if tr >= 1.0 {
            let target = rng.gen_range(-1.0..0.99);
            row.iter_mut().for_each(|v| *v *= target / tr);
        }
        let a = DMatrix::from_fn(n, n, |_, j| row[j]);
        let tr: f64 = row.iter().sum();
        worst = worst.max((det_one_minus(&a) - (1.0 - tr)).abs());
    }
    Ok((
        worst <= 1e-12,
        format!("max deviation {worst:.3e} over 100 matrices"),
    ))
}

pub fn inverse_translation(opts: &VerifyOptions) -> Result<(bool, String)> {
    let l_max = if opts.quick { 40 } else { 60 };
    let worst = EQUIVALENCE_GRID
        .iter()
        .map(|&z| translation_inverse_residual(z, 1.0, l_max))
        .fold(0.0, f64::max);
    Ok((
        worst <= 1e-10,
        format!("max |V(ZR)V(-ZR) - I| = {worst:.3e} at l_max {l_max}"),
    ))
}

fn gamma0() -> Result<(bool, String)> {
    let q = gamma0_quadrature(1e-14)?;
    let closed = 1.0 / 24.0 - constant::<f64>(LN_2) / 6.0 + constant::<f64>(LN_GLAISHER);
    let ok = (q - GAMMA0_PUBLISHED).abs() <= 5e-6 && (q - closed).abs() <= 1e-13;
    Ok((
        ok,
        format!("quadrature {q:.15}, closed form {closed:.15}, published {GAMMA0_PUBLISHED}"),
    ))
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Fitted slope of `ln|E|` against `ln ell` for the sphere-plane energy.
pub fn decay_slope(model: Model, ell_min: f64, ell_max: f64, points: usize) -> Result<f64> {
    let opts = EnergyOptions::default();
    let grid = log_grid(ell_min, ell_max, points);
    let mut x = Vec::with_capacity(points);
    let mut y = Vec::with_capacity(points);
    for &ell in &grid {
        let e = casimir_energy(&Configuration::sphere_plane(1.0, ell), model, &opts)?;
        x.push(ell.ln());
        y.push(e.value.abs().ln());
    }
    fit_slope(&x, &y).ok_or_else(|| crate::Error::Consistency("degenerate slope fit".into()))
}

/// Fitted slope of `ln|E_expansion - E_exact|` against `ln mu`, evaluated in
/// double-double so that residuals far below the energy scale stay resolved.
pub fn expansion_residual_slope(model: Model, ells: &[f64]) -> Result<f64> {
    let c = ExpansionConstants::default();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &ell in ells {
        let mu = mu_of_ell(DoubleDouble::from(ell))?;
        let exact = energy_mu(mu, model, 1e-24)?.value;
        let approx = short_energy_with(mu, model, &c)?.value;
        x.push(f64::from(mu).ln());
        y.push(f64::from(approx - exact).abs().ln());
    }
    fit_slope(&x, &y).ok_or_else(|| crate::Error::Consistency("degenerate slope fit".into()))
}

fn asymptotic_slopes(opts: &VerifyOptions) -> Result<(bool, String)> {
    let points = if opts.quick { 5 } else { 11 };
    let d = decay_slope(Model::Dirichlet, 10.0, 100.0, points)?;
    // The Drude energy reaches its cubic decay only well beyond ell = 100.
    let r = decay_slope(Model::Drude, 1e3, 1e4, points)?;
    let short_d = expansion_residual_slope(Model::Dirichlet, &[0.001, 0.01, 0.1])?;
    let short_r = expansion_residual_slope(Model::Drude, &[0.001, 0.01, 0.1])?;
    let ok = (d + 1.0).abs() <= 0.05 && (r + 3.0).abs() <= 0.05 && short_d >= 5.5 && short_r >= 5.5;
    Ok((
        ok,
        format!(
            "large-ell slopes {d:.4} (Dirichlet, [10, 100]) {r:.4} (Drude, [1e3, 1e4]); short-distance residual slopes {short_d:.3} {short_r:.3}"
        ),
    ))
}

pub fn run(opts: &VerifyOptions) -> VerifyReport {
    let mut report = VerifyReport::default();
    report.push(
        "representation equivalence (dirichlet)",
        representation_equivalence(opts, Model::Dirichlet),
    );
    report.push(
        "representation equivalence (drude)",
        representation_equivalence(opts, Model::Drude),
    );
    report.push("cutoff convergence", cutoff_convergence(opts));
    report.push("transform chain", transform_chain(opts));
    report.push("rank-one identity", rank_one(opts));
    report.push("inverse translation", inverse_translation(opts));
    report.push("gamma0", gamma0());
    report.push("asymptotic slopes", asymptotic_slopes(opts));
    report
}
