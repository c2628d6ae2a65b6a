//! Bispherical parametrisation of sphere-sphere and sphere-plane configurations.
//!
//! Every supported geometry reduces to a single interaction variable
//! `Z = exp(-mu)` with `0 < Z < 1`; `Z -> 1` at contact and `Z -> 0` at
//! infinite separation.

use crate::numeric::Real;
use crate::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Configuration {
    /// Sphere of radius `radius` at surface distance `gap` from a plane.
    SpherePlane {
        radius: f64,
        gap: f64,
    },
    /// Two spheres outside each other.
    Exterior {
        r1: f64,
        r2: f64,
        gap: f64,
    },
    /// Sphere `r1` inside sphere `r2`; `gap` is the closest surface distance.
    Interior {
        r1: f64,
        r2: f64,
        gap: f64,
    },
    Concentric {
        r1: f64,
        r2: f64,
    },
}

/// Derived bispherical scales of a non-concentric configuration.
///
/// The spheres are the coordinate surfaces `mu = mu1` and `mu = mu2`; `a` is
/// the focal half-distance and `d` the distance between centres (for the
/// sphere-plane case, between the sphere centre and the plane).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisphericalParams {
    pub a: f64,
    pub mu1: f64,
    /// Negative for exterior spheres, positive and below `mu1` for the
    /// interior case, zero for the plane.
    pub mu2: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub d: f64,
    pub mu: f64,
    pub z: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite, got {v}"))
    }
}

/// arccosh(1 + x) without cancellation for small `x`.
fn acosh1p(x: f64) -> f64 {
    (x + (x * (x + 2.0)).sqrt()).ln_1p()
}

/// `lambda - 1` for both exterior spheres.
fn exterior_excess(r1: f64, r2: f64, l: f64) -> (f64, f64) {
    let s = l + r1 + r2;
    (
        l * (l + 2.0 * r2) / (2.0 * r1 * s),
        l * (l + 2.0 * r1) / (2.0 * r2 * s),
    )
}

/// `lambda - 1` for the inner and outer sphere of the interior configuration.
fn interior_excess(r1: f64, r2: f64, l: f64) -> (f64, f64) {
    let d = r2 - r1 - l;
    (
        l * (2.0 * r2 - l) / (2.0 * r1 * d),
        l * (l + 2.0 * r1) / (2.0 * r2 * d),
    )
}

/// Exterior bispherical parameters `(lambda1, lambda2)`.
pub fn lambdas_exterior(r1: f64, r2: f64, l: f64) -> Result<(f64, f64)> {
    positive("R1", r1)?;
    positive("R2", r2)?;
    positive("L", l)?;
    let (x1, x2) = exterior_excess(r1, r2, l);
    Ok((1.0 + x1, 1.0 + x2))
}

/// `Z = 1 / ((lambda1 + sqrt(lambda1^2 - 1)) (lambda2 + sqrt(lambda2^2 - 1)))`.
pub fn z_exterior(lambda1: f64, lambda2: f64) -> Result<f64> {
    if !(lambda1 >= 1.0 && lambda2 >= 1.0) || !lambda1.is_finite() || !lambda2.is_finite() {
        return domain(format!("lambda must be >= 1, got ({lambda1}, {lambda2})"));
    }
    Ok((-(acosh1p(lambda1 - 1.0) + acosh1p(lambda2 - 1.0))).exp())
}

fn check_interior(r1: f64, r2: f64, l: f64) -> Result<()> {
    positive("R1", r1)?;
    positive("R2", r2)?;
    positive("L", l)?;
    if r2 - r1 - l <= 0.0 {
        return domain(format!(
            "inner sphere does not fit: need R2 > R1 + L, got R1={r1}, R2={r2}, L={l}"
        ));
    }
    Ok(())
}

/// Interaction variable for a sphere of radius `r1` inside a sphere of radius `r2`.
pub fn z_interior(r1: f64, r2: f64, l: f64) -> Result<f64> {
    check_interior(r1, r2, l)?;
    let (x1, x2) = interior_excess(r1, r2, l);
    Ok((acosh1p(x2) - acosh1p(x1)).exp())
}

pub fn z_concentric(r1: f64, r2: f64) -> Result<f64> {
    positive("R1", r1)?;
    positive("R2", r2)?;
    if r1 >= r2 {
        return domain(format!("concentric spheres need R1 < R2, got {r1} >= {r2}"));
    }
    Ok(r1 / r2)
}

/// Sphere-plane expansion variable `mu = ln(1 + ell + sqrt(ell (2 + ell)))`.
pub fn mu_of_ell<R: Real>(ell: R) -> Result<R> {
    let e = ell.to_f64();
    if !(e >= 0.0) || !e.is_finite() {
        return domain(format!("ell must be non-negative, got {e}"));
    }
    Ok((ell + (ell * (ell + 2.0)).sqrt()).ln_1p())
}

/// `d mu / d ell` for the sphere-plane geometry.
pub fn dmu_dell(ell: f64) -> Result<f64> {
    positive("ell", ell)?;
    Ok(1.0 / (ell * (ell + 2.0)).sqrt())
}

impl Configuration {
    pub fn sphere_plane(radius: f64, gap: f64) -> Self {
        Self::SpherePlane { radius, gap }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::SpherePlane { radius, gap } => {
                positive("R", radius)?;
                positive("L", gap)
            }
            Self::Exterior { r1, r2, gap } => lambdas_exterior(r1, r2, gap).map(|_| ()),
            Self::Interior { r1, r2, gap } => check_interior(r1, r2, gap),
            Self::Concentric { r1, r2 } => z_concentric(r1, r2).map(|_| ()),
        }
    }

    /// Radius used to make forces dimensionless.
    pub fn reference_radius(&self) -> f64 {
        match *self {
            Self::SpherePlane { radius, .. } => radius,
            Self::Exterior { r1, .. } | Self::Interior { r1, .. } | Self::Concentric { r1, .. } => {
                r1
            }
        }
    }

    pub fn gap(&self) -> Option<f64> {
        match *self {
            Self::SpherePlane { gap, .. }
            | Self::Exterior { gap, .. }
            | Self::Interior { gap, .. } => Some(gap),
            Self::Concentric { .. } => None,
        }
    }

    /// Same geometry with a different surface distance.
    pub fn with_gap(&self, gap: f64) -> Result<Self> {
        Ok(match *self {
            Self::SpherePlane { radius, .. } => Self::SpherePlane { radius, gap },
            Self::Exterior { r1, r2, .. } => Self::Exterior { r1, r2, gap },
            Self::Interior { r1, r2, .. } => Self::Interior { r1, r2, gap },
            Self::Concentric { .. } => {
                return Err(Error::Unsupported("concentric spheres have no gap".into()))
            }
        })
    }

    pub fn params(&self) -> Result<BisphericalParams> {
        self.validate()?;
        match *self {
            Self::SpherePlane { radius, gap } => {
                let ell = gap / radius;
                let mu = mu_of_ell(ell)?;
                Ok(BisphericalParams {
                    a: radius * (ell * (ell + 2.0)).sqrt(),
                    mu1: mu,
                    mu2: 0.0,
                    lambda1: 1.0 + ell,
                    lambda2: 1.0,
                    d: radius + gap,
                    mu,
                    z: (-mu).exp(),
                })
            }
            Self::Exterior { r1, r2, gap } => {
                let (x1, x2) = exterior_excess(r1, r2, gap);
                let mu1 = acosh1p(x1);
                let mu2 = -acosh1p(x2);
                let mu = mu1 - mu2;
                Ok(BisphericalParams {
                    a: r1 * (x1 * (x1 + 2.0)).sqrt(),
                    mu1,
                    mu2,
                    lambda1: 1.0 + x1,
                    lambda2: 1.0 + x2,
                    d: gap + r1 + r2,
                    mu,
                    z: (-mu).exp(),
                })
            }
            Self::Interior { r1, r2, gap } => {
                let (x1, x2) = interior_excess(r1, r2, gap);
                let mu1 = acosh1p(x1);
                let mu2 = acosh1p(x2);
                let mu = mu1 - mu2;
                Ok(BisphericalParams {
                    a: r1 * (x1 * (x1 + 2.0)).sqrt(),
                    mu1,
                    mu2,
                    lambda1: 1.0 + x1,
                    lambda2: 1.0 + x2,
                    d: r2 - r1 - gap,
                    mu,
                    z: (-mu).exp(),
                })
            }
            Self::Concentric { .. } => Err(Error::Unsupported(
                "concentric spheres have no finite bispherical foci".into(),
            )),
        }
    }

    /// Interaction exponent `mu` with `Z = exp(-mu)`.
    pub fn mu(&self) -> Result<f64> {
        match *self {
            Self::Concentric { r1, r2 } => Ok(-z_concentric(r1, r2)?.ln()),
            _ => self.params().map(|p| p.mu),
        }
    }

    pub fn z(&self) -> Result<f64> {
        match *self {
            Self::Concentric { r1, r2 } => z_concentric(r1, r2),
            _ => self.params().map(|p| p.z),
        }
    }

    /// `d mu / d L`, from `cosh(mu) - 1` written directly as a function of the gap.
    pub fn dmu_dgap(&self) -> Result<f64> {
        self.validate()?;
        let (x, dx) = match *self {
            Self::SpherePlane { radius, gap } => (gap / radius, 1.0 / radius),
            Self::Exterior { r1, r2, gap } => {
                let p = r1 * r2;
                (
                    gap * (gap + 2.0 * (r1 + r2)) / (2.0 * p),
                    (gap + r1 + r2) / p,
                )
            }
            Self::Interior { r1, r2, gap } => {
                let p = r1 * r2;
                let span = r2 - r1;
                (gap * (2.0 * span - gap) / (2.0 * p), (span - gap) / p)
            }
            Self::Concentric { .. } => {
                return Err(Error::Unsupported("concentric spheres have no gap".into()))
            }
        };
        Ok(dx / (x * (x + 2.0)).sqrt())
    }
}
