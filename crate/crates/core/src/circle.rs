//! Circle sampling, equal-weight quadrature, Fourier/Fejér analysis,
//! the Schwarz integral and winding numbers.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, Hermitian};
use crate::poly::{MatrixLaurent, MatrixPolynomial};

/// Closed disc `D_r(z0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiscSpec {
    pub z0: Complex64,
    pub r: f64,
}

impl DiscSpec {
    pub fn new(z0: Complex64, r: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) || !z0.re.is_finite() || !z0.im.is_finite() {
            return Err(Error::InvalidInput(format!("disc radius must be positive, got {r}")));
        }
        Ok(Self { z0, r })
    }

    pub fn unit() -> Self {
        Self {
            z0: c64(0.0, 0.0),
            r: 1.0,
        }
    }

    /// Local coordinate `w = (z - z0) / r`.
    pub fn to_local(&self, z: Complex64) -> Complex64 {
        (z - self.z0) / self.r
    }

    pub fn to_global(&self, w: Complex64) -> Complex64 {
        self.z0 + w * self.r
    }

    pub fn contains_point(&self, z: Complex64, slack: f64) -> bool {
        (z - self.z0).norm() <= self.r * (1.0 + slack)
    }

    /// True when the closed disc `inner` lies in this closed disc.
    pub fn contains_disc(&self, inner: &DiscSpec, slack: f64) -> bool {
        (inner.z0 - self.z0).norm() + inner.r <= self.r * (1.0 + slack)
    }
}

pub fn is_power_of_two(n: usize) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// Default quadrature size `max(256, 8(N+1))`, rounded up to a power of two.
pub fn default_samples(degree: usize) -> usize {
    (8 * (degree + 1)).max(256).next_power_of_two()
}

/// `e^{2 pi i j / n}` for `j = 0..n`.
pub fn unit_roots(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
        .collect()
}

/// `z_j = z0 + r e^{2 pi i j / n}`.
pub fn circle_samples(disc: &DiscSpec, n: usize) -> Result<Vec<Complex64>> {
    if !is_power_of_two(n) {
        return Err(Error::InvalidInput(format!("sample count {n} is not a power of two")));
    }
    Ok(unit_roots(n).into_iter().map(|w| disc.to_global(w)).collect())
}

/// Hermitian values on an equispaced circle.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySamples {
    disc: DiscSpec,
    values: Vec<Hermitian>,
}

impl BoundarySamples {
    pub fn new(disc: DiscSpec, values: Vec<Hermitian>) -> Result<Self> {
        let n = values.len();
        if n < 4 || !is_power_of_two(n) {
            return Err(Error::InvalidInput(format!(
                "boundary data needs a power-of-two count >= 4, got {n}"
            )));
        }
        let dim = values[0].dim();
        if values.iter().any(|v| v.dim() != dim) {
            return Err(Error::InvalidInput("boundary values differ in dimension".into()));
        }
        Ok(Self { disc, values })
    }

    /// Samples `f(z_j)` at the circle points of `disc`.
    pub fn from_fn(disc: DiscSpec, n: usize, f: impl Fn(Complex64) -> Hermitian) -> Result<Self> {
        let values = circle_samples(&disc, n)?.into_iter().map(f).collect();
        Self::new(disc, values)
    }

    /// Samples a hermitian Laurent polynomial in the local coordinate.
    pub fn from_laurent(disc: DiscSpec, n: usize, f: &MatrixLaurent) -> Result<Self> {
        let values = unit_roots(n)
            .into_iter()
            .map(|w| Hermitian::from_part(&f.eval(w)))
            .collect();
        if !is_power_of_two(n) {
            return Err(Error::InvalidInput(format!("sample count {n} is not a power of two")));
        }
        Self::new(disc, values)
    }

    pub fn disc(&self) -> &DiscSpec {
        &self.disc
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn values(&self) -> &[Hermitian] {
        &self.values
    }

    pub fn points(&self) -> Vec<Complex64> {
        unit_roots(self.n()).into_iter().map(|w| self.disc.to_global(w)).collect()
    }

    /// Smallest eigenvalue over all samples.
    pub fn psd_margin(&self) -> f64 {
        self.values
            .iter()
            .map(Hermitian::min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(Hermitian::norm).fold(0.0, f64::max)
    }

    fn matrices(&self) -> Vec<CMatrix> {
        self.values.iter().map(|v| v.as_matrix().clone()).collect()
    }
}

/// The three circle averages `m0 = avg P |dz|`, `mplus = avg P dz`, `mminus = avg P dzbar`
/// (each normalized by `1/(2 pi r)`).
#[derive(Clone, Debug, PartialEq)]
pub struct CircleMoments {
    pub m0: Hermitian,
    pub mplus: CMatrix,
    pub mminus: CMatrix,
}

fn times_i(z: Complex64) -> Complex64 {
    c64(-z.im, z.re)
}

fn times_minus_i(z: Complex64) -> Complex64 {
    c64(z.im, -z.re)
}

pub fn average_moments(samples: &BoundarySamples) -> CircleMoments {
    let n = samples.n();
    let d = samples.dim();
    let inv_n = 1.0 / n as f64;
    let roots = unit_roots(n);
    let mut s0 = CMatrix::zeros(d, d);
    let mut sp = CMatrix::zeros(d, d);
    let mut sm = CMatrix::zeros(d, d);
    for (p, w) in samples.values.iter().zip(&roots) {
        let p = p.as_matrix();
        s0 += p;
        sp += p * *w;
        sm += p * w.conj();
    }
    CircleMoments {
        m0: Hermitian::from_part(&(s0 * c64(inv_n, 0.0))),
        mplus: sp.map(|z| times_i(z) * inv_n),
        mminus: sm.map(|z| times_minus_i(z) * inv_n),
    }
}

/// Forward DFT of matrix samples: `c_k = (1/n) sum_j v_j e^{-2 pi i jk/n}`.
pub fn dft(values: &[CMatrix]) -> Vec<CMatrix> {
    transform(values, false)
}

/// Inverse of [`dft`]: `v_j = sum_k c_k e^{2 pi i jk/n}`.
pub fn idft(coeffs: &[CMatrix]) -> Vec<CMatrix> {
    transform(coeffs, true)
}

fn transform(values: &[CMatrix], inverse: bool) -> Vec<CMatrix> {
    let n = values.len();
    let (rows, cols) = values[0].shape();
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let scale = if inverse { 1.0 } else { 1.0 / n as f64 };
    let mut out = vec![CMatrix::zeros(rows, cols); n];
    let mut buf = vec![Complex64::default(); n];
    for a in 0..rows {
        for b in 0..cols {
            for (slot, v) in buf.iter_mut().zip(values) {
                *slot = v[(a, b)];
            }
            fft.process(&mut buf);
            for (o, x) in out.iter_mut().zip(&buf) {
                o[(a, b)] = x * scale;
            }
        }
    }
    out
}

/// Fourier coefficients `F_{-N}..F_N` in the local coordinate.
pub fn fourier_coefficients(samples: &BoundarySamples, degree: usize) -> Result<MatrixLaurent> {
    let n = samples.n();
    if 2 * degree + 1 > n {
        return Err(Error::InvalidInput(format!(
            "degree {degree} needs at least {} samples, have {n}",
            2 * degree + 1
        )));
    }
    let hat = dft(&samples.matrices());
    Ok(MatrixLaurent::from_nonnegative(hat[..=degree].to_vec()))
}

/// Fejér weight `1 - |n|/(N+1)`.
pub fn fejer_weight(n: i64, degree: usize) -> f64 {
    (1.0 - n.unsigned_abs() as f64 / (degree as f64 + 1.0)).max(0.0)
}

/// Number of validation points used for a degree-`N` symbol.
pub fn validation_points(degree: usize) -> usize {
    (4 * degree).max(16).next_power_of_two()
}

#[derive(Clone, Debug)]
pub struct FejerTruncation {
    pub laurent: MatrixLaurent,
    /// Smallest eigenvalue on the validation grid.
    pub margin: f64,
}

/// Cesàro means of order `N`; fails when the validated margin falls below `floor`.
pub fn fejer_truncate(samples: &BoundarySamples, degree: usize, floor: f64) -> Result<FejerTruncation> {
    let raw = fourier_coefficients(samples, degree)?;
    let pos: Vec<CMatrix> = (0..=degree)
        .map(|k| raw.coeff(k as i64).scale(fejer_weight(k as i64, degree)))
        .collect();
    let laurent = MatrixLaurent::from_nonnegative(pos);
    let margin = laurent.min_circle_margin(validation_points(degree));
    if margin < floor {
        return Err(Error::Degenerate(format!(
            "Fejér truncation margin {margin:.3e} is below {floor:.3e}; raise the degree or lift the data by a multiple of the identity"
        )));
    }
    Ok(FejerTruncation { laurent, margin })
}

/// Taylor coefficients `s_0 = f_0/2`, `s_k = f_k` of the Schwarz integral of
/// hermitian samples on the unit circle (degree `n/2 - 1`).
pub fn schwarz_integral(samples: &BoundarySamples) -> MatrixPolynomial {
    schwarz_from_values(&samples.matrices())
}

pub(crate) fn schwarz_from_values(values: &[CMatrix]) -> MatrixPolynomial {
    let n = values.len();
    let mut hat = dft(values);
    hat.truncate(n / 2);
    hat[0] = Hermitian::from_part(&hat[0]).into_matrix().scale(0.5);
    MatrixPolynomial::new(hat).expect("DFT output is finite and square")
}

/// Winding number of a closed sampled curve around 0.
pub fn winding_number(values: &[Complex64]) -> Result<i64> {
    if values.is_empty() {
        return Err(Error::InvalidInput("no values".into()));
    }
    if let Some(j) = values.iter().position(|v| *v == Complex64::default() || !v.is_finite()) {
        return Err(Error::Degenerate(format!("curve passes through 0 at sample {j}")));
    }
    let n = values.len();
    let mut total = 0.0;
    for j in 0..n {
        let step = (values[(j + 1) % n] / values[j]).arg();
        if step.abs() >= PI / 2.0 {
            return Err(Error::Resolution { step });
        }
        total += step;
    }
    Ok((total / (2.0 * PI)).round() as i64)
}

/// Center plus `rings x spokes` points on concentric circles of radii
/// `fill * r * k / rings`, `k = 1..=rings`.
pub fn polar_grid(disc: &DiscSpec, rings: usize, spokes: usize, fill: f64) -> Vec<Complex64> {
    let mut pts = vec![disc.z0];
    for k in 1..=rings {
        let rho = fill * disc.r * k as f64 / rings as f64;
        for j in 0..spokes {
            let t = 2.0 * PI * (j as f64 + 0.5 * (k % 2) as f64) / spokes as f64;
            pts.push(disc.z0 + Complex64::from_polar(rho, t));
        }
    }
    pts
}

/// Points of an `m x m` Cartesian grid over the square circumscribing the
/// disc of radius `fill * r`, keeping those inside it.
pub fn square_grid(disc: &DiscSpec, m: usize, fill: f64) -> Vec<Complex64> {
    let rho = fill * disc.r;
    let step = if m > 1 { 2.0 / (m - 1) as f64 } else { 0.0 };
    let mut pts = Vec::new();
    for a in 0..m {
        for b in 0..m {
            let w = if m > 1 {
                c64(-1.0 + a as f64 * step, -1.0 + b as f64 * step)
            } else {
                c64(0.0, 0.0)
            };
            if w.norm() <= 1.0 + 1e-12 {
                pts.push(disc.z0 + w * rho);
            }
        }
    }
    pts
}
