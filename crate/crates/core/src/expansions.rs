//! Short-distance expansions of the sphere-plane energies in `mu = arccosh(1 + ell)`.
//!
//! ```text
//! 2 E_D  = -ζ(3)/(2μ²) + ln(μ)/12 + 1/8 - γ0 - 7μ²/2880 - 31μ⁴/725760 + O(μ⁶)
//! 2 E_Dr = 2 E_D + ln(γ1 - L) + μ²/6 (L - γ2)/(L - γ1)
//!          - μ⁴/180 (γ3 - γ4 L + L²)/(L - γ1)² + O(μ⁶),      L = ln μ
//! ```
//!
//! `γ0` is the integral `∫_0^∞ 2 Im[(1+2it) ln(1+2it)] / (e^{2πt} - 1) dt`.
//! The Drude constants have the closed forms `γ1 = γ_E + ln 2`,
//! `γ2 = γ1 + 1/12`, `γ3 = γ1² - 7γ1/240 + 5/288` and `γ4 = 2γ1 - 7/240`,
//! which agree with the commonly quoted six-digit values.

use std::sync::OnceLock;

use crate::energies::{casimir_force, energy_mu, EnergyOptions, Model};
use crate::geometry::{dmu_dell, mu_of_ell, Configuration};
use crate::numeric::{constant, least_squares, DoubleDouble, Real, EULER_GAMMA, LN_2, ZETA3};
use crate::{domain, Error, Result};

/// Default integration cutoff for `γ0`; the neglected tail is below 1e-25.
pub const GAMMA0_CUTOFF: f64 = 10.0;

/// `γ0` as commonly quoted.
pub const GAMMA0_PUBLISHED: f64 = 0.174897;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionConstants {
    pub gamma0: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    pub zeta3: f64,
}

impl ExpansionConstants {
    /// Six-digit values as quoted alongside the expansion.
    pub fn published() -> Self {
        Self {
            gamma0: GAMMA0_PUBLISHED,
            gamma1: 1.270362,
            gamma2: 1.35369,
            gamma3: 1.59409,
            gamma4: 2.51153,
            zeta3: ZETA3.0,
        }
    }

    /// Full-precision constants: `γ0` by quadrature, `γ1..γ4` in closed form.
    pub fn derived() -> Self {
        static CACHE: OnceLock<ExpansionConstants> = OnceLock::new();
        *CACHE.get_or_init(|| {
            let g0 =
                gamma0_quadrature(1e-15).expect("γ0 integrand is smooth and decays exponentially");
            let g1 = constant::<DoubleDouble>(EULER_GAMMA) + constant::<DoubleDouble>(LN_2);
            let g2 = g1 + DoubleDouble::ONE / 12.0;
            let g3 = g1 * g1 - g1 * 7.0 / 240.0 + DoubleDouble::from(5.0) / 288.0;
            let g4 = g1 * 2.0 - DoubleDouble::from(7.0) / 240.0;
            Self {
                gamma0: g0,
                gamma1: g1.into(),
                gamma2: g2.into(),
                gamma3: g3.into(),
                gamma4: g4.into(),
                zeta3: ZETA3.0,
            }
        })
    }

    fn zeta3_as<R: Real>(&self) -> R {
        if self.zeta3 == ZETA3.0 {
            constant(ZETA3)
        } else {
            R::from_f64(self.zeta3)
        }
    }
}

impl Default for ExpansionConstants {
    fn default() -> Self {
        Self::derived()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionResult<R = f64> {
    /// Energy in units of `k_B T`.
    pub value: R,
    /// Highest power of `mu` retained.
    pub order: u32,
    /// `mu^6`, the size of the first omitted term.
    pub remainder_scale: f64,
}

/// Real form of the `γ0` integrand, `2 [atan(2t) + t ln(1 + 4t²)] / (e^{2πt} - 1)`.
pub fn gamma0_integrand(t: f64) -> f64 {
    if t == 0.0 {
        return 2.0 / std::f64::consts::PI;
    }
    2.0 * ((2.0 * t).atan() + t * (4.0 * t * t).ln_1p()) / (2.0 * std::f64::consts::PI * t).exp_m1()
}

/// `γ0` integrated over `[0, t_max]` by Clenshaw-Curtis quadrature.
pub fn gamma0_truncated(t_max: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) || !(t_max > 0.0) {
        return domain(format!("need t_max > 0 and tol > 0, got {t_max}, {tol}"));
    }
    // Split where the integrand changes from its plateau to the exponential decay.
    let knots = [0.0, 0.5, 2.0, t_max.max(2.0)];
    let mut total = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in knots.windows(2) {
        let (a, b) = (w[0], w[1].min(t_max));
        if b <= a {
            continue;
        }
        let out = quadrature::clenshaw_curtis::integrate(gamma0_integrand, a, b, tol / 3.0);
        total += out.integral;
        error += out.error_estimate;
        evaluations += out.num_function_evaluations as usize;
    }
    if !(error <= tol) {
        return Err(Error::Convergence {
            achieved: error,
            terms: evaluations,
        });
    }
    Ok(total)
}

/// `γ0 ≈ 0.174897` from its defining integral.
pub fn gamma0_quadrature(tol: f64) -> Result<f64> {
    gamma0_truncated(GAMMA0_CUTOFF, tol)
}

fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu.is_finite() {
        Ok(())
    } else {
        domain(format!("mu must be positive, got {mu}"))
    }
}

/// Dirichlet short-distance energy with explicit constants.
pub fn dirichlet_short_with<R: Real>(mu: R, c: &ExpansionConstants) -> Result<ExpansionResult<R>> {
    let m = mu.to_f64();
    check_mu(m)?;
    let mu2 = mu * mu;
    let bracket = -c.zeta3_as::<R>() / (mu2 * 2.0) + mu.ln() / 12.0 + 0.125
        - c.gamma0
        - mu2 * (7.0 / 2880.0)
        - mu2 * mu2 * (31.0 / 725760.0);
    Ok(ExpansionResult {
        value: bracket * 0.5,
        order: 4,
        remainder_scale: m.powi(6),
    })
}

/// Drude correction `E_Dr - E_D` of the expansion, in units of `k_B T`.
pub fn drude_correction_with<R: Real>(mu: R, c: &ExpansionConstants) -> Result<R> {
    check_mu(mu.to_f64())?;
    let l = mu.ln();
    let g = R::from_f64(c.gamma1) - l;
    if !(g.to_f64() > 0.0) {
        return domain(format!("need ln(mu) < gamma1, got mu = {}", mu.to_f64()));
    }
    let mu2 = mu * mu;
    let d = l - c.gamma1;
    let bracket = g.ln() + mu2 * (l - c.gamma2) / (d * 6.0)
        - mu2 * mu2 * (l * l - l * c.gamma4 + c.gamma3) / (d * d * 180.0);
    Ok(bracket * 0.5)
}

pub fn drude_short_with<R: Real>(mu: R, c: &ExpansionConstants) -> Result<ExpansionResult<R>> {
    let corr = drude_correction_with(mu, c)?;
    let base = dirichlet_short_with(mu, c)?;
    Ok(ExpansionResult {
        value: base.value + corr,
        ..base
    })
}

pub fn dirichlet_short(mu: f64) -> Result<ExpansionResult> {
    dirichlet_short_with(mu, &ExpansionConstants::derived())
}

pub fn drude_short(mu: f64) -> Result<ExpansionResult> {
    drude_short_with(mu, &ExpansionConstants::derived())
}

pub fn short_energy_with<R: Real>(
    mu: R,
    model: Model,
    c: &ExpansionConstants,
) -> Result<ExpansionResult<R>> {
    match model {
        Model::Dirichlet => dirichlet_short_with(mu, c),
        Model::Drude => drude_short_with(mu, c),
    }
}

pub fn short_energy(mu: f64, model: Model) -> Result<ExpansionResult> {
    short_energy_with(mu, model, &ExpansionConstants::derived())
}

/// `β` computed from the short-distance expansion.
pub fn beta_short(ell: f64, model: Model) -> Result<f64> {
    if !(ell > 0.0) {
        return domain(format!("ell must be positive, got {ell}"));
    }
    let l = DoubleDouble::from(ell);
    let mu = mu_of_ell(l)?;
    let e = short_energy_with(mu, model, &ExpansionConstants::derived())?.value;
    let zeta3: DoubleDouble = constant(ZETA3);
    Ok((-(e * 8.0) / zeta3 - DoubleDouble::ONE / l).into())
}

/// Sphere-plane force in units of `k_B T / R` from differentiating the
/// Dirichlet expansion in `ell`.
pub fn dirichlet_short_force(ell: f64, c: &ExpansionConstants) -> Result<f64> {
    let mu = mu_of_ell(ell)?;
    check_mu(mu)?;
    let de_dmu = 0.5
        * (c.zeta3 / mu.powi(3) + 1.0 / (12.0 * mu)
            - 7.0 / 1440.0 * mu
            - 31.0 / 181440.0 * mu.powi(3));
    Ok(-de_dmu * dmu_dell(ell)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentReport {
    pub model: Model,
    pub points: usize,
    /// Coefficient `b` of the fit `F_exact - F_expansion ≈ a + b ln ell`.
    pub log_coefficient: Option<f64>,
    /// Largest `mu^6 / ell` on the grid: the size of the omitted terms.
    pub noise_floor: f64,
    pub log_component_detected: Option<bool>,
    pub insufficient_data: bool,
}

/// Fits the residual between the exact sphere-plane force and the force of
/// the Dirichlet expansion to `a + b ln ell`.
///
/// For Dirichlet the expansion force is a Laurent series in `ell`, so `b`
/// should vanish at the noise floor. For Drude the residual carries the
/// derivative of the double logarithm and `b` is of order one.
pub fn force_laurent_check(ell_grid: &[f64], model: Model) -> Result<LaurentReport> {
    let consts = ExpansionConstants::derived();
    let mut x = Vec::new();
    let mut r = Vec::new();
    let mut floor: f64 = 0.0;
    let opts = EnergyOptions {
        tol: 1e-13,
        ..Default::default()
    };
    for &ell in ell_grid {
        let exact = casimir_force(&Configuration::sphere_plane(1.0, ell), model, &opts)?.value;
        let approx = dirichlet_short_force(ell, &consts)?;
        let mu = mu_of_ell(ell)?;
        floor = floor.max(mu.powi(6) / ell);
        x.push(ell.ln());
        r.push(exact - approx);
    }
    if x.len() < 3 {
        return Ok(LaurentReport {
            model,
            points: x.len(),
            log_coefficient: None,
            noise_floor: floor,
            log_component_detected: None,
            insufficient_data: true,
        });
    }
    let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![1.0, v]).collect();
    let b = least_squares(&rows, &r)
        .ok_or_else(|| Error::Instability("degenerate ell grid".into()))?[1];
    Ok(LaurentReport {
        model,
        points: x.len(),
        log_coefficient: Some(b),
        noise_floor: floor,
        log_component_detected: Some(b.abs() > floor),
        insufficient_data: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DrudeFit {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    /// Largest absolute fit residual on the grid.
    pub max_residual: f64,
}

/// Recovers `γ1..γ4` from the exact Drude-Dirichlet energy difference.
///
/// With `G = exp(2 (E_Dr - E_D))` and `L = ln μ`, the expansion implies
/// `G + L (1 + μ²/6 + μ⁴/120) = γ1 + γ2 μ²/6 + c2 μ⁴ + O(μ⁶, μ⁶ L)`, which is
/// linear in the unknowns. `γ3` and `γ4` follow from `c2`.
pub fn fit_drude_constants(mu_grid: &[f64]) -> Result<DrudeFit> {
    if mu_grid.len() < 6 {
        return domain("fit needs at least six points");
    }
    let mut rows = Vec::with_capacity(mu_grid.len());
    let mut t = Vec::with_capacity(mu_grid.len());
    for &mu in mu_grid {
        check_mu(mu)?;
        let m = DoubleDouble::from(mu);
        let d = energy_mu(m, Model::Dirichlet, 1e-20)?.value;
        let r = energy_mu(m, Model::Drude, 1e-20)?.value;
        let g: f64 = ((r - d) * 2.0).exp().into();
        let l = mu.ln();
        let mu2 = mu * mu;
        t.push(g + l * (1.0 + mu2 / 6.0 + mu2 * mu2 / 120.0));
        rows.push(vec![1.0, mu2, mu2 * mu2, mu2.powi(3), mu2.powi(3) * l]);
    }
    let coef = least_squares(&rows, &t).ok_or_else(|| Error::Instability("singular fit".into()))?;
    let max_residual = rows
        .iter()
        .zip(&t)
        .map(|(row, y)| (row.iter().zip(&coef).map(|(a, b)| a * b).sum::<f64>() - y).abs())
        .fold(0.0, f64::max);
    let gamma1 = coef[0];
    let gamma2 = 6.0 * coef[1];
    let c2 = coef[2];
    let c3 = -1.0 / 120.0;
    Ok(DrudeFit {
        gamma1,
        gamma2,
        gamma3: -180.0 * (c2 * gamma1 - gamma2 * gamma2 / 72.0),
        gamma4: 180.0 * (c3 * gamma1 - c2 + gamma2 / 36.0),
        max_residual,
    })
}

/// Evenly spaced `mu` grid on `[0.05, 0.3]` used for constant validation.
pub fn default_fit_grid() -> Vec<f64> {
    (0..26).map(|i| 0.05 + 0.01 * i as f64).collect()
}
