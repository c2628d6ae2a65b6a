//! Exact classical Casimir energies and forces from the closed-form series.
//!
//! With `Z = exp(-mu)` the Dirichlet energy is
//!
//! ```text
//! E / k_B T = 1/2 Σ_{l≥0} (2l+1) ln(1 - Z^{2l+1})
//! ```
//!
//! and the Drude sphere-plane energy is
//!
//! ```text
//! E / k_B T = 1/2 [ Σ_{l≥1} (2l+1) ln(1 - Z^{2l+1}) + ln A ],
//! A = 1 - (1 - Z²) Σ_{l≥1} Z^{2l+1} (1 - Z^{2l}) / (1 - Z^{2l+1}).
//! ```
//!
//! `A` is evaluated in the equivalent form
//! `(1 - Z³) + (1 - Z²)(1 - Z) Σ_{l≥1} Z^{4l+1} / (1 - Z^{2l+1})`,
//! whose terms are all positive, so nothing cancels as `Z -> 1`.

use std::fmt;
use std::str::FromStr;

use crate::geometry::{mu_of_ell, Configuration};
use crate::numeric::{
    constant, tail_moment0, tail_moment1, tail_moment2, CompensatedSum, DoubleDouble, Real, ZETA3,
};
use crate::{domain, Error, Result};

/// Default cap on the number of terms summed per series.
pub const MAX_TERMS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Model {
    Dirichlet,
    Drude,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::Dirichlet, Model::Drude];

    pub fn name(self) -> &'static str {
        match self {
            Model::Dirichlet => "dirichlet",
            Model::Drude => "drude",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(Model::Dirichlet),
            "drude" => Ok(Model::Drude),
            other => domain(format!("unknown model '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyResult<R = f64> {
    /// Energy in units of `k_B T`.
    pub value: R,
    /// Upper bound on the truncation error of `value`.
    pub tail_bound: f64,
    pub terms_used: usize,
    pub model: Model,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceMethod {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceResult {
    /// Force in units of `k_B T / R1`, negative for attraction.
    pub value: f64,
    pub method: ForceMethod,
    pub estimated_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyOptions {
    pub tol: f64,
    /// Per-series term cap; exceeding it is a convergence error.
    pub max_terms: usize,
    /// Allow the Drude series for geometries other than sphere-plane. The
    /// series is only established for a sphere facing a plane.
    pub experimental_drude_spheres: bool,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_terms: MAX_TERMS,
            experimental_drude_spheres: false,
        }
    }
}

struct Partial<R> {
    sum: R,
    tail: f64,
    terms: usize,
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        domain(format!("tolerance must be positive, got {tol}"))
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        domain(format!("Z must lie in (0, 1), got exp(-{mu})"))
    }
}

fn mu_of_z(z: f64) -> Result<f64> {
    if z > 0.0 && z < 1.0 {
        Ok(-z.ln())
    } else {
        domain(format!("Z must lie in (0, 1), got {z}"))
    }
}

/// `1 - Z^{2n+1}` for `Z = exp(-mu)`.
fn one_minus_pow(mu: f64, n: u64) -> f64 {
    -(-((2 * n + 1) as f64) * mu).exp_m1()
}

/// Bound on Σ_{l≥n} (2l+1) |ln(1 - Z^{2l+1})|.
fn log_tail(mu: f64, n: u64) -> f64 {
    let z = (-mu).exp();
    let y = z * z;
    z / one_minus_pow(mu, n) * (2.0 * tail_moment1(y, n) + tail_moment0(y, n))
}

/// Bound on Σ_{l≥n} (2l+1)² / expm1((2l+1) mu).
fn dlog_tail(mu: f64, n: u64) -> f64 {
    let z = (-mu).exp();
    let y = z * z;
    z / one_minus_pow(mu, n)
        * (4.0 * tail_moment2(y, n) + 4.0 * tail_moment1(y, n) + tail_moment0(y, n))
}

/// Bound on Σ_{l≥n} Z^{4l+1} / (1 - Z^{2l+1}).
fn s2_tail(mu: f64, n: u64) -> f64 {
    (-((4 * n + 1) as f64) * mu).exp() / (-(-4.0 * mu).exp_m1() * one_minus_pow(mu, n))
}

/// Bound on Σ_{l≥n} (4l+1) Z^{4l+1} / (1 - Z^{2l+1}).
fn s2_weighted_tail(mu: f64, n: u64) -> f64 {
    let z = (-mu).exp();
    let y = (-4.0 * mu).exp();
    z / one_minus_pow(mu, n) * (4.0 * tail_moment1(y, n) + tail_moment0(y, n))
}

/// `ln(1 - exp(-x))` for `x > 0`, accurate on both sides of `x = ln 2`.
fn ln_one_minus_exp<R: Real>(x: R) -> R {
    if x.to_f64() > std::f64::consts::LN_2 {
        (-(-x).exp()).ln_1p()
    } else {
        (-(-x).exp_m1()).ln()
    }
}

fn converged(terms: usize, cap: usize, bound: f64) -> Result<()> {
    if terms >= cap {
        Err(Error::Convergence {
            achieved: bound,
            terms,
        })
    } else {
        Ok(())
    }
}

/// Σ_{l≥l0} (2l+1) ln(1 - exp(-(2l+1) mu)), stopped once half the last term
/// and half the remaining tail are both below `tol / 4`.
fn log_series<R: Real>(mu: R, l0: u64, tol: f64, cap: usize) -> Result<Partial<R>> {
    let m = mu.to_f64();
    let mut acc = CompensatedSum::default();
    let mut l = l0;
    loop {
        let n = (2 * l + 1) as f64;
        let t = ln_one_minus_exp(mu * n) * n;
        acc.add(t);
        l += 1;
        let tail = log_tail(m, l);
        let terms = (l - l0) as usize;
        if 0.5 * t.to_f64().abs() < 0.25 * tol && 0.5 * tail < 0.25 * tol {
            return Ok(Partial {
                sum: acc.value(),
                tail,
                terms,
            });
        }
        converged(terms, cap, 0.5 * tail)?;
    }
}

/// Σ_{l≥l0} (2l+1)² / expm1((2l+1) mu): the mu-derivative of [`log_series`].
fn dlog_series<R: Real>(mu: R, l0: u64, tol: f64, cap: usize) -> Result<Partial<R>> {
    let m = mu.to_f64();
    let mut acc = CompensatedSum::default();
    let mut l = l0;
    loop {
        let n = (2 * l + 1) as f64;
        let t = R::from_f64(n * n) / (mu * n).exp_m1();
        acc.add(t);
        l += 1;
        let tail = dlog_tail(m, l);
        let terms = (l - l0) as usize;
        if 0.5 * t.to_f64().abs() < 0.25 * tol && 0.5 * tail < 0.25 * tol {
            return Ok(Partial {
                sum: acc.value(),
                tail,
                terms,
            });
        }
        converged(terms, cap, 0.5 * tail)?;
    }
}

/// Pieces of the Drude second logarithm `A = (1 - Z³) + c S2` with
/// `c = (1 - Z²)(1 - Z)` and `S2 = Σ_{l≥1} Z^{4l+1} / (1 - Z^{2l+1})`.
struct DrudeLog<R> {
    a: R,
    ln_a: R,
    /// Bound on `ln A_true - ln A`.
    ln_error: f64,
    /// `dA / dmu` and a bound on its truncation error, when requested.
    da: Option<(R, f64)>,
    terms: usize,
}

fn drude_log<R: Real>(mu: R, tol: f64, cap: usize, derivative: bool) -> Result<DrudeLog<R>> {
    let m = mu.to_f64();
    let z = (-mu).exp();
    let e1 = -(-mu).exp_m1();
    let e2 = -(mu * -2.0).exp_m1();
    let e3 = -(mu * -3.0).exp_m1();
    let c = e1 * e2;
    let (cf, muf) = (c.to_f64(), m);
    let mut s2 = CompensatedSum::default();
    let mut ds2 = CompensatedSum::default();
    let mut l: u64 = 1;
    loop {
        let k = (2 * l + 1) as f64;
        let den = -(mu * -k).exp_m1();
        let s = (mu * -((4 * l + 1) as f64)).exp() / den;
        s2.add(s);
        if derivative {
            let w = R::from_f64((4 * l + 1) as f64) + R::from_f64(k) / (mu * k).exp_m1();
            ds2.add(-(s * w));
        }
        l += 1;
        let a_partial = (e3 + c * s2.value()).to_f64();
        let tail = cf * s2_tail(muf, l) / a_partial;
        let last = cf * s.to_f64() / a_partial;
        let mut done = 0.5 * tail < 0.25 * tol && 0.5 * last < 0.25 * tol;
        if derivative {
            let dtail = cf * (s2_weighted_tail(muf, l) + s2_tail(muf, l) / muf);
            done &= 0.5 * dtail / a_partial < 0.25 * tol;
        }
        let terms = (l - 1) as usize;
        if done {
            let s2v = s2.value();
            let a = e3 + c * s2v;
            let af = a.to_f64();
            if !(af > 0.0 && af <= 1.0) {
                return Err(Error::Consistency(format!(
                    "Drude log argument {af} outside (0, 1]"
                )));
            }
            let da = derivative.then(|| {
                let dc = z * e2 + z * z * e1 * 2.0;
                let da = z * z * z * 3.0 + dc * s2v + c * ds2.value();
                let t2 = s2_tail(muf, l);
                let err = dc.to_f64() * t2 + cf * (s2_weighted_tail(muf, l) + t2 / muf);
                (da, err)
            });
            // ln A = ln(1 + (c S2 - Z³)) keeps full relative accuracy when A is near 1.
            let ln_a = if af < 0.5 {
                a.ln()
            } else {
                (c * s2v - z * z * z).ln_1p()
            };
            return Ok(DrudeLog {
                a,
                ln_a,
                ln_error: cf * s2_tail(muf, l) / af,
                da,
                terms,
            });
        }
        converged(terms, cap, 0.5 * tail)?;
    }
}

/// The Drude monopole-coupling logarithm `ln A` alone, as a function of `Z`.
pub fn drude_monopole_log(z: f64, tol: f64) -> Result<f64> {
    check_tol(tol)?;
    let mu = mu_of_z(z)?;
    Ok(drude_log(mu, tol, MAX_TERMS, false)?.ln_a)
}

fn dirichlet_series<R: Real>(mu: R, tol: f64, cap: usize) -> Result<EnergyResult<R>> {
    check_tol(tol)?;
    check_mu(mu.to_f64())?;
    let p = log_series(mu, 0, tol, cap)?;
    Ok(EnergyResult {
        value: p.sum * 0.5,
        tail_bound: 0.5 * p.tail,
        terms_used: p.terms,
        model: Model::Dirichlet,
        z: (-mu.to_f64()).exp(),
    })
}

fn drude_series<R: Real>(mu: R, tol: f64, cap: usize) -> Result<EnergyResult<R>> {
    check_tol(tol)?;
    check_mu(mu.to_f64())?;
    let p = log_series(mu, 1, tol, cap)?;
    let d = drude_log(mu, tol, cap, false)?;
    Ok(EnergyResult {
        value: (p.sum + d.ln_a) * 0.5,
        tail_bound: 0.5 * (p.tail + d.ln_error),
        terms_used: p.terms.max(d.terms),
        model: Model::Drude,
        z: (-mu.to_f64()).exp(),
    })
}

/// Dirichlet energy as a function of `mu = -ln Z`.
pub fn dirichlet_energy_mu<R: Real>(mu: R, tol: f64) -> Result<EnergyResult<R>> {
    dirichlet_series(mu, tol, MAX_TERMS)
}

/// Drude sphere-plane energy as a function of `mu = -ln Z`.
pub fn drude_energy_mu<R: Real>(mu: R, tol: f64) -> Result<EnergyResult<R>> {
    drude_series(mu, tol, MAX_TERMS)
}

pub fn energy_mu<R: Real>(mu: R, model: Model, tol: f64) -> Result<EnergyResult<R>> {
    energy_mu_capped(mu, model, tol, MAX_TERMS)
}

/// As [`energy_mu`] with an explicit per-series term cap.
pub fn energy_mu_capped<R: Real>(
    mu: R,
    model: Model,
    tol: f64,
    max_terms: usize,
) -> Result<EnergyResult<R>> {
    match model {
        Model::Dirichlet => dirichlet_series(mu, tol, max_terms),
        Model::Drude => drude_series(mu, tol, max_terms),
    }
}

pub fn dirichlet_energy(z: f64, tol: f64) -> Result<EnergyResult> {
    dirichlet_energy_mu(mu_of_z(z)?, tol).map(|r| EnergyResult { z, ..r })
}

pub fn drude_energy(z: f64, tol: f64) -> Result<EnergyResult> {
    drude_energy_mu(mu_of_z(z)?, tol).map(|r| EnergyResult { z, ..r })
}

/// `dE/dmu` in units of `k_B T`, with a bound on its truncation error.
pub fn energy_mu_derivative<R: Real>(mu: R, model: Model, tol: f64) -> Result<(R, f64)> {
    energy_mu_derivative_capped(mu, model, tol, MAX_TERMS)
}

pub fn energy_mu_derivative_capped<R: Real>(
    mu: R,
    model: Model,
    tol: f64,
    max_terms: usize,
) -> Result<(R, f64)> {
    check_tol(tol)?;
    check_mu(mu.to_f64())?;
    match model {
        Model::Dirichlet => {
            let p = dlog_series(mu, 0, tol, max_terms)?;
            Ok((p.sum * 0.5, 0.5 * p.tail))
        }
        Model::Drude => {
            let p = dlog_series(mu, 1, tol, max_terms)?;
            let d = drude_log(mu, tol, max_terms, true)?;
            let (da, da_err) = d.da.expect("derivative requested");
            let a = d.a.to_f64();
            let a_err = d.ln_error * a;
            let q_err = da_err / a + da.to_f64().abs() * a_err / (a * a);
            Ok(((p.sum + da / d.a) * 0.5, 0.5 * (p.tail + q_err)))
        }
    }
}

fn check_model(config: &Configuration, model: Model, opts: &EnergyOptions) -> Result<()> {
    if model == Model::Drude
        && !opts.experimental_drude_spheres
        && !matches!(config, Configuration::SpherePlane { .. })
    {
        return Err(Error::Unsupported(
            "the Drude series is established for sphere-plane only; \
             enable the experimental flag for sphere-sphere geometries"
                .into(),
        ));
    }
    Ok(())
}

pub fn casimir_energy(
    config: &Configuration,
    model: Model,
    opts: &EnergyOptions,
) -> Result<EnergyResult> {
    check_model(config, model, opts)?;
    let mu = config.mu()?;
    let r = energy_mu_capped(mu, model, opts.tol, opts.max_terms)?;
    Ok(EnergyResult {
        z: config.z()?,
        ..r
    })
}

/// Force `-dE/dL`, in units of `k_B T / R1`, from the termwise derivative.
pub fn casimir_force(
    config: &Configuration,
    model: Model,
    opts: &EnergyOptions,
) -> Result<ForceResult> {
    check_model(config, model, opts)?;
    let mu = config.mu()?;
    let dmu = config.dmu_dgap()?;
    let r = config.reference_radius();
    let (de, err) = energy_mu_derivative_capped(mu, model, opts.tol, opts.max_terms)?;
    Ok(ForceResult {
        value: -de * dmu * r,
        method: ForceMethod::Analytic,
        estimated_error: err * dmu * r,
    })
}

/// Force from a Richardson-extrapolated central difference of the energy in
/// the gap, with step `1e-6 L`.
pub fn casimir_force_fd(
    config: &Configuration,
    model: Model,
    opts: &EnergyOptions,
) -> Result<ForceResult> {
    check_model(config, model, opts)?;
    let gap = config
        .gap()
        .ok_or_else(|| Error::Unsupported("concentric spheres have no gap".into()))?;
    let energy = |g: f64| -> Result<f64> {
        let c = config.with_gap(g)?;
        Ok(energy_mu_capped(c.mu()?, model, opts.tol, opts.max_terms)?.value)
    };
    let h = 1e-6 * gap;
    let central = |h: f64| -> Result<f64> { Ok((energy(gap + h)? - energy(gap - h)?) / (2.0 * h)) };
    let d1 = central(h)?;
    let d2 = central(0.5 * h)?;
    let de = (4.0 * d2 - d1) / 3.0;
    let r = config.reference_radius();
    Ok(ForceResult {
        value: -de * r,
        method: ForceMethod::FiniteDifference,
        estimated_error: (d2 - d1).abs() * r,
    })
}

/// Proximity-force estimate `-ζ(3) / (8 L / R_eff)` in units of `k_B T`.
///
/// `R_eff` is the sphere radius for sphere-plane and `R1 R2 / (R1 + R2)` for
/// two exterior spheres; the latter extension is a convention.
pub fn pfa_energy(config: &Configuration) -> Result<f64> {
    config.validate()?;
    let (r_eff, gap) = match *config {
        Configuration::SpherePlane { radius, gap } => (radius, gap),
        Configuration::Exterior { r1, r2, gap } => (r1 * r2 / (r1 + r2), gap),
        _ => {
            return Err(Error::Unsupported(
                "PFA is defined for sphere-plane and exterior spheres".into(),
            ))
        }
    };
    Ok(-ZETA3.0 / (8.0 * gap / r_eff))
}

/// Deviation from PFA, `β = -8 E / ζ(3) - 1/ℓ`, for the sphere-plane energy.
///
/// Evaluated in double-double so that the subtraction of `1/ℓ` does not
/// cost digits at short distance.
pub fn beta(ell: f64, model: Model, tol: f64) -> Result<f64> {
    if !(ell > 0.0 && ell.is_finite()) {
        return domain(format!("ell must be positive, got {ell}"));
    }
    let l = DoubleDouble::from(ell);
    let mu = mu_of_ell(l)?;
    let e = energy_mu(mu, model, tol)?.value;
    let zeta3: DoubleDouble = constant(ZETA3);
    Ok((-(e * 8.0) / zeta3 - DoubleDouble::ONE / l).into())
}
