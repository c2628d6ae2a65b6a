//! Scalar types, constants and small series helpers shared by the physics modules.

mod ddouble;
mod real;

use std::sync::OnceLock;

pub use ddouble::DoubleDouble;
pub use real::Real;

/// Apéry's constant ζ(3) as a hi/lo pair.
pub const ZETA3: (f64, f64) = (1.2020569031595942, 4.875891010379532e-17);
/// Euler–Mascheroni constant as a hi/lo pair.
pub const EULER_GAMMA: (f64, f64) = (0.5772156649015329, -4.942915152430645e-18);
pub const LN_2: (f64, f64) = (std::f64::consts::LN_2, 2.3190468138462996e-17);
/// Logarithm of the Glaisher–Kinkelin constant.
pub const LN_GLAISHER: (f64, f64) = (0.24875447703378425, 7.755882066780179e-18);

pub fn constant<R: Real>(c: (f64, f64)) -> R {
    R::from_parts(c.0, c.1)
}

/// Σ_{l≥n} y^l for 0 ≤ y < 1.
pub fn tail_moment0(y: f64, n: u64) -> f64 {
    y.powf(n as f64) / (1.0 - y)
}

/// Σ_{l≥n} l·y^l for 0 ≤ y < 1.
pub fn tail_moment1(y: f64, n: u64) -> f64 {
    let n = n as f64;
    let q = 1.0 - y;
    y.powf(n) * (n * q + y) / (q * q)
}

/// Σ_{l≥n} l²·y^l for 0 ≤ y < 1.
pub fn tail_moment2(y: f64, n: u64) -> f64 {
    let n = n as f64;
    let q = 1.0 - y;
    y.powf(n) * (n * n / q + (2.0 * n + 1.0) * y / (q * q) + 2.0 * y * y / (q * q * q))
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<R: Real> {
    sum: R,
    comp: R,
}

impl<R: Real> Default for CompensatedSum<R> {
    fn default() -> Self {
        Self {
            sum: R::zero(),
            comp: R::zero(),
        }
    }
}

impl<R: Real> CompensatedSum<R> {
    pub fn add(&mut self, x: R) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> R {
        self.sum + self.comp
    }
}

const LN_FACT_TABLE: usize = 4096;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut acc = DoubleDouble::ZERO;
        let mut out = Vec::with_capacity(LN_FACT_TABLE);
        out.push(0.0);
        for k in 1..LN_FACT_TABLE {
            acc += DoubleDouble::from(k as f64).ln();
            out.push(acc.into());
        }
        out
    })
}

/// ln(n!) to about one ulp.
pub fn ln_factorial(n: usize) -> f64 {
    if n < LN_FACT_TABLE {
        return ln_fact_table()[n];
    }
    // Stirling series; at n ≥ 4096 three correction terms are far below an ulp.
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0))
}

/// ln of the binomial coefficient C(n, k).
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// Ordinary least squares for `y ≈ X·β`, solved by SVD after scaling each
/// column to unit max-norm. Returns `None` when there are fewer rows than
/// columns or the system is rank deficient.
pub fn least_squares(rows: &[Vec<f64>], y: &[f64]) -> Option<Vec<f64>> {
    let p = rows.first()?.len();
    if rows.len() < p || rows.len() != y.len() {
        return None;
    }
    let scale: Vec<f64> = (0..p)
        .map(|j| rows.iter().map(|r| r[j].abs()).fold(0.0, f64::max))
        .collect();
    if scale.iter().any(|&s| s == 0.0 || !s.is_finite()) {
        return None;
    }
    let x = nalgebra::DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j] / scale[j]);
    let b = nalgebra::DVector::from_column_slice(y);
    let svd = x.svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-13 * smax {
        return None;
    }
    let sol = svd.solve(&b, 0.0).ok()?;
    Some(sol.iter().zip(&scale).map(|(c, s)| c / s).collect())
}

/// Slope of the least-squares line through `(x, y)`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![1.0, v]).collect();
    least_squares(&rows, y).map(|c| c[1])
}
