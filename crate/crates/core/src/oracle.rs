//! Energies rebuilt from truncated matrix log-determinants, independent of the
//! closed-form series in [`crate::energies`].
//!
//! The sphere-plane round-trip operator in the spherical basis centred on the
//! sphere is block diagonal in `m` with
//!
//! ```text
//! N_{ll'} = (l+l')! / ((l+m)! (l'-m)!) · (Z + 1/Z)^{-l-l'-1}
//! ```
//!
//! and the energy is `1/2 ln det(1 - N)`. Monopoles (`l = 0`) are present for
//! Dirichlet and absent for Drude.

use nalgebra::DMatrix;

use crate::energies::Model;
use crate::numeric::{ln_binomial, ln_factorial, DoubleDouble};
use crate::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// Spherical waves about the sphere centre.
    SphericalAtC,
    /// Spherical waves about the focal point.
    SphericalAtF,
    /// Bispherical waves about the focal point.
    BisphericalAtF,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    pub basis: Basis,
    pub m: i64,
    pub l_min: usize,
    pub l_max: usize,
    /// Row and column `i` correspond to `l = l_min + i`.
    pub entries: DMatrix<f64>,
    pub z: f64,
}

impl TruncatedOperator {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// The same operator truncated at a smaller `l_max`.
    pub fn truncate(&self, l_max: usize) -> Self {
        let n = (l_max + 1).saturating_sub(self.l_min).min(self.dim());
        Self {
            entries: self.entries.view((0, 0), (n, n)).into_owned(),
            l_max: self.l_min + n.saturating_sub(1),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDetResult {
    pub value: f64,
    pub l_max: usize,
    /// `|value(l_max) - value(l_max / 2)|`.
    pub convergence_estimate: f64,
}

fn check_z(z: f64) -> Result<()> {
    if z > 0.0 && z < 1.0 {
        Ok(())
    } else {
        domain(format!("Z must lie in (0, 1), got {z}"))
    }
}

/// Smallest multipole order present for a given model and `m`.
pub fn l_min_for(model: Model, m: i64) -> usize {
    let am = m.unsigned_abs() as usize;
    match model {
        Model::Dirichlet => am,
        Model::Drude => am.max(1),
    }
}

/// Sphere-plane round-trip operator in the spherical basis about the sphere
/// centre, for azimuthal index `m`.
pub fn build_n_spherical(z: f64, m: i64, l_max: usize, model: Model) -> Result<TruncatedOperator> {
    check_z(z)?;
    let l_min = l_min_for(model, m);
    if l_max < l_min {
        return domain(format!("l_max = {l_max} below l_min = {l_min} for m = {m}"));
    }
    // ln(Z + 1/Z) = -ln Z + ln(1 + Z²)
    let ln_x = -z.ln() + (z * z).ln_1p();
    let n = l_max - l_min + 1;
    let entries = DMatrix::from_fn(n, n, |i, j| {
        let (l, lp) = ((l_min + i) as i64, (l_min + j) as i64);
        let ln_mag = ln_factorial((l + lp) as usize)
            - ln_factorial((l + m) as usize)
            - ln_factorial((lp - m) as usize)
            - (l + lp + 1) as f64 * ln_x;
        ln_mag.exp()
    });
    Ok(TruncatedOperator {
        basis: Basis::SphericalAtC,
        m,
        l_min,
        l_max,
        entries,
        z,
    })
}

/// `ln det(1 - A)` by pivoted LU. A non-positive determinant means the
/// truncated operator has left the physical regime.
pub fn logdet_one_minus_matrix(a: &DMatrix<f64>) -> Result<f64> {
    let n = a.nrows();
    if n == 0 {
        return Ok(0.0);
    }
    let lu = (DMatrix::identity(n, n) - a).lu();
    let mut sign: f64 = lu.p().determinant();
    let mut ln = 0.0;
    for u in lu.u().diagonal().iter() {
        if *u == 0.0 || !u.is_finite() {
            return Err(Error::Instability(
                "1 - N is singular at this cutoff; increase l_max or reduce Z".into(),
            ));
        }
        sign *= u.signum();
        ln += u.abs().ln();
    }
    if sign < 0.0 {
        return Err(Error::Instability(
            "det(1 - N) is negative at this cutoff; increase l_max or reduce Z".into(),
        ));
    }
    Ok(ln)
}

pub fn logdet_one_minus(op: &TruncatedOperator) -> Result<LogDetResult> {
    let value = logdet_one_minus_matrix(&op.entries)?;
    let half = op.truncate(op.l_min.max(op.l_max / 2));
    let coarse = logdet_one_minus_matrix(&half.entries)?;
    Ok(LogDetResult {
        value,
        l_max: op.l_max,
        convergence_estimate: (value - coarse).abs(),
    })
}

/// `Σ_{l ≥ l_min} ln(1 - Z^{2l+1})`, the per-`m` value in the bispherical basis.
pub fn bispherical_block_logdet(z: f64, l_min: usize) -> f64 {
    let mu = -z.ln();
    let mut sum = 0.0;
    let mut l = l_min;
    loop {
        let t = (-(-((2 * l + 1) as f64) * mu).exp()).ln_1p();
        sum += t;
        if t.abs() < 1e-18 * sum.abs().max(1e-300) {
            return sum;
        }
        l += 1;
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleEnergy {
    /// Energy in units of `k_B T`.
    pub value: f64,
    /// Sum of the per-block cutoff-convergence estimates.
    pub convergence_estimate: f64,
    /// Largest `m` whose block was included.
    pub m_used: usize,
}

fn oracle_energy(
    z: f64,
    model: Model,
    l_max: usize,
    m_max: usize,
    flip_sign: bool,
) -> Result<OracleEnergy> {
    check_z(z)?;
    let mut total = 0.0;
    let mut estimate = 0.0;
    let mut m_used = 0;
    let mut last_block = 0.0;
    let mut exhausted = true;
    for m in 0..=m_max.min(l_max) {
        let mut op = build_n_spherical(z, m as i64, l_max, model)?;
        if flip_sign {
            op.entries.neg_mut();
        }
        let ld = logdet_one_minus(&op)?;
        // Blocks ±m contribute equally.
        let weight = if m == 0 { 1.0 } else { 2.0 };
        total += weight * ld.value;
        estimate += weight * ld.convergence_estimate;
        m_used = m;
        last_block = weight * ld.value;
        if m > 0 && last_block.abs() < 1e-18 * total.abs() {
            exhausted = false;
            break;
        }
    }
    if exhausted {
        // Blocks decay like Z^{2m}; bound the omitted ones geometrically.
        estimate += last_block.abs() * z * z / (1.0 - z * z);
    }
    Ok(OracleEnergy {
        value: 0.5 * total,
        convergence_estimate: 0.5 * estimate,
        m_used,
    })
}

/// Drude sphere-plane energy summed over `m` blocks of the spherical operator.
pub fn drude_energy_oracle(z: f64, l_max: usize, m_max: usize) -> Result<OracleEnergy> {
    oracle_energy(z, Model::Drude, l_max, m_max, false)
}

/// Dirichlet sphere-plane energy summed over `m` blocks of the spherical operator.
pub fn dirichlet_energy_oracle(z: f64, l_max: usize, m_max: usize) -> Result<OracleEnergy> {
    oracle_energy(z, Model::Dirichlet, l_max, m_max, false)
}

/// Oracle energy with every operator entry negated, for mutation testing of
/// the verification suite.
pub fn energy_oracle_sign_flipped(
    z: f64,
    model: Model,
    l_max: usize,
    m_max: usize,
) -> Result<OracleEnergy> {
    oracle_energy(z, model, l_max, m_max, true)
}

/// Translation between spherical bases about the sphere centre and the focal
/// point, over the distance `ZR`:
/// `V_{ll'} = (ZR)^{l-l'} / (l-l')! · l!/l'! · sqrt((2l'+1)/(2l+1))` for `l ≥ l' ≥ 1`.
///
/// Entries are assembled from log-magnitudes and a tracked sign.
pub fn translation_matrix(z: f64, r: f64, l_max: usize) -> DMatrix<f64> {
    let s = z * r;
    let ln_s = s.abs().ln();
    DMatrix::from_fn(l_max, l_max, |i, j| {
        let (l, lp) = (i + 1, j + 1);
        if l < lp {
            return 0.0;
        }
        let k = l - lp;
        let sign = if s < 0.0 && k % 2 == 1 { -1.0 } else { 1.0 };
        let ln_mag = if k == 0 { 0.0 } else { k as f64 * ln_s } + ln_binomial(l, lp);
        sign * ln_mag.exp() * ((2 * lp + 1) as f64 / (2 * l + 1) as f64).sqrt()
    })
}

/// [`translation_matrix`] in double-double arithmetic, with exact binomials.
pub fn translation_matrix_dd(z: f64, r: f64, l_max: usize) -> DMatrix<DoubleDouble> {
    let s = DoubleDouble::from(z) * r;
    // Pascal's triangle is exact in double-double up to 2^106.
    let mut binom = vec![vec![DoubleDouble::ZERO; l_max + 1]; l_max + 1];
    for n in 0..=l_max {
        binom[n][0] = DoubleDouble::ONE;
        for k in 1..=n {
            binom[n][k] = binom[n - 1][k - 1]
                + if k < n {
                    binom[n - 1][k]
                } else {
                    DoubleDouble::ZERO
                };
        }
    }
    let mut powers = vec![DoubleDouble::ONE; l_max + 1];
    for k in 1..=l_max {
        powers[k] = powers[k - 1] * s;
    }
    DMatrix::from_fn(l_max, l_max, |i, j| {
        let (l, lp) = (i + 1, j + 1);
        if l < lp {
            return DoubleDouble::ZERO;
        }
        let ratio = DoubleDouble::from((2 * lp + 1) as f64) / (2 * l + 1) as f64;
        binom[l][lp] * powers[l - lp] * ratio.sqrt()
    })
}

/// `max |V(ZR) V(-ZR) - I|` evaluated in double-double.
pub fn translation_inverse_residual(z: f64, r: f64, l_max: usize) -> f64 {
    let a = translation_matrix_dd(z, r, l_max);
    let b = translation_matrix_dd(-z, r, l_max);
    let p = &a * &b;
    let mut worst: f64 = 0.0;
    for i in 0..l_max {
        for j in 0..l_max {
            let target = if i == j {
                DoubleDouble::ONE
            } else {
                DoubleDouble::ZERO
            };
            worst = worst.max(f64::from(p[(i, j)] - target).abs());
        }
    }
    worst
}

/// Conversion from spherical to bispherical waves about the focal point:
/// `(-1)^l / sqrt(2l+1) · [R (1/Z - Z)]^{l+1/2} · C(l', l)` for `l' ≥ l ≥ 1`.
pub fn conversion_matrix(z: f64, r: f64, l_max: usize) -> DMatrix<f64> {
    let ln_c = (r * (1.0 / z - z)).ln();
    DMatrix::from_fn(l_max, l_max, |i, j| {
        let (l, lp) = (i + 1, j + 1);
        if lp < l {
            return 0.0;
        }
        let sign = if l % 2 == 1 { -1.0 } else { 1.0 };
        let ln_mag = (l as f64 + 0.5) * ln_c + ln_binomial(lp, l);
        sign * ln_mag.exp() / ((2 * l + 1) as f64).sqrt()
    })
}

/// The `m = 0`, `l ≥ 1` Drude block after translation to the focal point, in
/// the unnormalised spherical basis:
/// `-(-1)^l Z^{l+l'+1}` for `l > l'` and `(C(l', l) - (-1)^l) Z^{l+l'+1}` otherwise.
pub fn after_translation_form(z: f64, l_max: usize) -> DMatrix<f64> {
    let ln_z = z.ln();
    DMatrix::from_fn(l_max, l_max, |i, j| {
        let (l, lp) = (i + 1, j + 1);
        let parity = if l % 2 == 0 { 1.0 } else { -1.0 };
        let pow = ((l + lp + 1) as f64 * ln_z).exp();
        if l > lp {
            -parity * pow
        } else {
            (ln_binomial(lp, l).exp() - parity) * pow
        }
    })
}

/// The `m = 0`, `l ≥ 1` Drude block in the bispherical basis:
/// `Z^{2l'+1} (δ_{ll'} + (1 - Z²)(1 - Z^{2l'}))`, a diagonal plus equal rows.
pub fn bispherical_form(z: f64, l_max: usize) -> DMatrix<f64> {
    let mu = -z.ln();
    let one_minus_z2 = -(-2.0 * mu).exp_m1();
    DMatrix::from_fn(l_max, l_max, |i, j| {
        let lp = j + 1;
        let diag = if i == j { 1.0 } else { 0.0 };
        let col = ((2 * lp + 1) as f64 * -mu).exp();
        col * (diag + one_minus_z2 * -(-((2 * lp) as f64) * mu).exp_m1())
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainReport {
    pub z: f64,
    pub radius: f64,
    pub l_max: usize,
    /// Leading block size used for entrywise comparisons.
    pub compared_block: usize,
    pub logdet_spherical_c: f64,
    pub logdet_spherical_f: f64,
    pub logdet_bispherical_f: f64,
    pub logdet_bispherical_form: f64,
    /// Max entrywise gap to [`after_translation_form`] on the leading block.
    pub after_translation_deviation: f64,
    /// Max entrywise gap to [`bispherical_form`] on the leading block, after
    /// the diagonal rescaling `diag(Z^{-2l})`.
    pub bispherical_deviation: f64,
    /// Largest difference between any of the four log-determinants.
    pub logdet_gap: f64,
    /// `ln det(1 - bispherical form) - Σ_{l=1}^{l_max} ln(1 - Z^{2l+1})`: the
    /// monopole-coupling logarithm as seen by the matrix route.
    pub rank_one_part: f64,
}

/// Applies the translation and the basis conversion to the `m = 0` Drude
/// block and compares each stage with its closed form.
pub fn verify_transform_chain(z: f64, r: f64, l_max: usize) -> Result<ChainReport> {
    check_z(z)?;
    if l_max < 2 {
        return domain("transform chain needs l_max >= 2");
    }
    if !(r > 0.0) {
        return domain(format!("radius must be positive, got {r}"));
    }
    let n0 = build_n_spherical(z, 0, l_max, Model::Drude)?.entries;
    // Express the operator in length units so that R enters as in the translation.
    let rpow = |l: usize| (l as f64 * r.ln()).exp();
    let n_c = DMatrix::from_fn(l_max, l_max, |i, j| n0[(i, j)] * rpow(i + 1) / rpow(j + 1));
    let norm = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(l_max, |i, _| {
        ((2 * i + 3) as f64).sqrt()
    }));
    let norm_inv = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(l_max, |i, _| {
        1.0 / ((2 * i + 3) as f64).sqrt()
    }));
    let x = &norm_inv * &n_c * &norm;
    let n_f = translation_matrix(-z, r, l_max) * x * translation_matrix(z, r, l_max);

    let unscale = DMatrix::from_fn(l_max, l_max, |i, j| rpow(j + 1) / rpow(i + 1));
    let unnormalised = (&norm * &n_f * &norm_inv).component_mul(&unscale);
    let printed = after_translation_form(z, l_max);

    let w = conversion_matrix(z, r, l_max);
    let n_b = w
        .solve_upper_triangular(&(&n_f * &w))
        .ok_or_else(|| Error::Instability("conversion matrix is singular".into()))?;
    let gauge = |i: usize| ((2 * (i + 1)) as f64 * z.ln()).exp();
    let n_b_gauged = DMatrix::from_fn(l_max, l_max, |i, j| n_b[(i, j)] * gauge(j) / gauge(i));
    let closed = bispherical_form(z, l_max);

    let k = (l_max / 4).max(1);
    let block_gap = |a: &DMatrix<f64>, b: &DMatrix<f64>| {
        (a.view((0, 0), (k, k)) - b.view((0, 0), (k, k))).amax()
    };
    let lds = [
        logdet_one_minus_matrix(&n0)?,
        logdet_one_minus_matrix(&n_f)?,
        logdet_one_minus_matrix(&n_b)?,
        logdet_one_minus_matrix(&closed)?,
    ];
    let hi = lds.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = lds.iter().copied().fold(f64::INFINITY, f64::min);
    let diag: f64 = (1..=l_max)
        .map(|l| (-((-((2 * l + 1) as f64) * -z.ln()).exp())).ln_1p())
        .sum();
    Ok(ChainReport {
        z,
        radius: r,
        l_max,
        compared_block: k,
        logdet_spherical_c: lds[0],
        logdet_spherical_f: lds[1],
        logdet_bispherical_f: lds[2],
        logdet_bispherical_form: lds[3],
        after_translation_deviation: block_gap(&unnormalised, &printed),
        bispherical_deviation: block_gap(&n_b_gauged, &closed),
        logdet_gap: hi - lo,
        rank_one_part: lds[3] - diag,
    })
}

/// `det(1 - A)` by LU, for checking the equal-rows identity `det(1 - A) = 1 - tr A`.
pub fn det_one_minus(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    (DMatrix::identity(n, n) - a).determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energies::{dirichlet_energy, drude_energy, drude_monopole_log};
    use proptest::prelude::*;

    #[test]
    fn small_entries() {
        let z: f64 = 0.3;
        let x = z + 1.0 / z;
        let d = build_n_spherical(z, 0, 3, Model::Dirichlet).unwrap();
        assert!((d.entries[(0, 0)] - 1.0 / x).abs() < 1e-16);
        assert!((d.entries[(1, 1)] - 2.0 / x.powi(3)).abs() < 1e-16);
        let r = build_n_spherical(z, 0, 3, Model::Drude).unwrap();
        assert_eq!(r.l_min, 1);
        assert!((r.entries[(0, 0)] - 2.0 / x.powi(3)).abs() < 1e-16);
        assert_eq!(build_n_spherical(z, -2, 5, Model::Drude).unwrap().l_min, 2);
        assert!(build_n_spherical(z, 4, 3, Model::Dirichlet).is_err());
    }

    #[test]
    fn m_reflection_symmetry() {
        let a = build_n_spherical(0.4, 3, 12, Model::Dirichlet).unwrap();
        let b = build_n_spherical(0.4, -3, 12, Model::Dirichlet).unwrap();
        assert!((a.entries.clone() - b.entries.transpose()).amax() < 1e-15 * a.entries.amax());
    }

    #[test]
    fn logdet_of_simple_matrices() {
        assert_eq!(logdet_one_minus_matrix(&DMatrix::zeros(4, 4)).unwrap(), 0.0);
        let z: f64 = 0.6;
        let d = DMatrix::from_fn(6, 6, |i, j| {
            if i == j {
                z.powi(2 * i as i32 + 3)
            } else {
                0.0
            }
        });
        let want: f64 = (0..6).map(|i| (1.0 - z.powi(2 * i + 3)).ln()).sum();
        assert!((logdet_one_minus_matrix(&d).unwrap() - want).abs() < 1e-15);
        let bad = DMatrix::from_element(1, 1, 2.0);
        assert!(matches!(
            logdet_one_minus_matrix(&bad),
            Err(Error::Instability(_))
        ));
    }

    #[test]
    fn dirichlet_m0_matches_bispherical() {
        let z = 2.0 - 3f64.sqrt();
        let op = build_n_spherical(z, 0, 40, Model::Dirichlet).unwrap();
        let ld = logdet_one_minus(&op).unwrap();
        let want = bispherical_block_logdet(z, 0);
        assert!((0.5 * ld.value - 0.5 * want).abs() < 1e-9);
        assert!(ld.convergence_estimate < 1e-9);
    }

    #[test]
    fn dirichlet_oracle_matches_series() {
        for z in [0.05, 0.1, 0.3, 0.5] {
            let o = dirichlet_energy_oracle(z, 80, 80).unwrap();
            let s = dirichlet_energy(z, 1e-15).unwrap();
            assert!(
                (o.value - s.value).abs() < 1e-9,
                "{z}: {} {}",
                o.value,
                s.value
            );
        }
    }

    #[test]
    fn drude_oracle_matches_series() {
        let o = drude_energy_oracle(0.1, 30, 30).unwrap();
        let s = drude_energy(0.1, 1e-15).unwrap();
        assert!((o.value - s.value).abs() < 1e-8);
        let z = 2.0 - 3f64.sqrt();
        let o = drude_energy_oracle(z, 60, 60).unwrap();
        let s = drude_energy(z, 1e-15).unwrap();
        assert!((o.value - s.value).abs() < 1e-6);
    }

    #[test]
    fn higher_m_blocks_are_dirichlet() {
        let z = 0.3;
        for m in [1, 2, 5] {
            let op = build_n_spherical(z, m, 60, Model::Drude).unwrap();
            let ld = logdet_one_minus(&op).unwrap().value;
            assert!((ld - bispherical_block_logdet(z, m as usize)).abs() < 1e-12);
        }
    }

    #[test]
    fn convergence_estimate_shrinks() {
        let z = 0.5;
        let mut prev = f64::INFINITY;
        for l_max in [10, 20, 40] {
            let op = build_n_spherical(z, 0, l_max, Model::Dirichlet).unwrap();
            let e = logdet_one_minus(&op).unwrap().convergence_estimate;
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn translation_entries() {
        let v = translation_matrix(0.3, 2.0, 5);
        for i in 0..5 {
            assert!((v[(i, i)] - 1.0).abs() < 1e-15);
        }
        assert!((v[(1, 0)] - 2.0 * 0.6 * (3.0f64 / 5.0).sqrt()).abs() < 1e-15);
        assert_eq!(v[(0, 1)], 0.0);
        let vd = translation_matrix_dd(0.3, 2.0, 5);
        assert!((f64::from(vd[(4, 1)]) - v[(4, 1)]).abs() < 1e-14 * v[(4, 1)].abs());
    }

    #[test]
    fn translation_inverse() {
        for z in [0.05, 0.1, 0.3, 0.5, 2.0 - 3f64.sqrt()] {
            assert!(translation_inverse_residual(z, 1.0, 60) < 1e-10, "{z}");
        }
        // Plain doubles lose the identity to cancellation at this size.
        let p = translation_matrix(0.5, 1.0, 60) * translation_matrix(-0.5, 1.0, 60);
        assert!((p - DMatrix::<f64>::identity(60, 60)).amax() > 1e-10);
    }

    #[test]
    fn eq_bispherical_form_diagonal() {
        let q = bispherical_form(0.5, 4);
        assert!((q[(0, 0)] - 0.1953125).abs() < 1e-16);
    }

    #[test]
    fn transform_chain_is_consistent() {
        let rep = verify_transform_chain(0.3, 1.0, 40).unwrap();
        assert!(rep.logdet_gap < 1e-10, "{rep:?}");
        assert!(rep.after_translation_deviation < 1e-12, "{rep:?}");
        assert!(rep.bispherical_deviation < 1e-10, "{rep:?}");
        let closed = drude_monopole_log(0.3, 1e-16).unwrap();
        assert!((rep.rank_one_part - closed).abs() < 1e-10);
    }

    #[test]
    fn transform_chain_radius_invariant() {
        let base = verify_transform_chain(0.3, 1.0, 40).unwrap();
        for r in [0.1, 10.0] {
            let rep = verify_transform_chain(0.3, r, 40).unwrap();
            assert!((rep.logdet_spherical_f - base.logdet_spherical_f).abs() < 1e-9);
            assert!((rep.logdet_bispherical_f - base.logdet_bispherical_f).abs() < 1e-9);
        }
    }

    #[test]
    fn equal_rows_identity() {
        let v = [0.1, -0.05, 0.2, 0.3];
        let a = DMatrix::from_fn(4, 4, |_, j| v[j]);
        let tr: f64 = v.iter().sum();
        assert!((det_one_minus(&a) - (1.0 - tr)).abs() < 1e-15);
    }

    #[test]
    fn sign_flip_changes_energy() {
        let good = drude_energy_oracle(0.3, 30, 20).unwrap().value;
        let bad = energy_oracle_sign_flipped(0.3, Model::Drude, 30, 20)
            .unwrap()
            .value;
        assert!((good - bad).abs() > 1e-3);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn reflection_symmetry_holds(z in 0.01f64..0.9, m in 0i64..8) {
            let a = build_n_spherical(z, m, 30, Model::Dirichlet).unwrap().entries;
            let b = build_n_spherical(z, -m, 30, Model::Dirichlet).unwrap().entries;
            prop_assert!((a.clone() - b.transpose()).amax() <= 1e-14 * a.amax());
        }

        #[test]
        fn equal_rows_determinant(row in proptest::collection::vec(-0.5f64..0.5, 1..10)) {
            let tr: f64 = row.iter().sum();
            prop_assume!(tr < 1.0);
            let a = DMatrix::from_fn(row.len(), row.len(), |_, j| row[j]);
            prop_assert!((det_one_minus(&a) - (1.0 - tr)).abs() <= 1e-12);
        }

        #[test]
        fn translation_inverts(z in 0.01f64..0.6) {
            prop_assert!(translation_inverse_residual(z, 1.0, 40) <= 1e-10);
        }

        #[test]
        fn block_logdet_converges(z in 0.05f64..0.6, m in 0i64..4) {
            let mut prev = f64::INFINITY;
            for l_max in [16usize, 32, 64] {
                let op = build_n_spherical(z, m, l_max, Model::Drude).unwrap();
                let e = logdet_one_minus(&op).unwrap().convergence_estimate;
                prop_assert!(e <= prev);
                prev = e;
            }
        }
    }
}
