//! Matrix-coefficient polynomials and hermitian Laurent polynomials.

use num_complex::Complex64;

use crate::circle::unit_roots;
use crate::error::{Error, Result};
use crate::linalg::{c64, frobenius, identity, is_finite, CMatrix, CVector, Hermitian};

/// `H(z) = sum_{n=0}^{N} H_n z^n` with square `d x d` coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixPolynomial {
    dim: usize,
    coeffs: Vec<CMatrix>,
}

impl MatrixPolynomial {
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::InvalidInput("polynomial needs at least one coefficient".into()));
        };
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::InvalidInput("polynomial coefficients must be non-empty".into()));
        }
        for (n, c) in coeffs.iter().enumerate() {
            if c.nrows() != dim || c.ncols() != dim {
                return Err(Error::InvalidInput(format!(
                    "coefficient {n} is {}x{}, expected {dim}x{dim}",
                    c.nrows(),
                    c.ncols()
                )));
            }
            if !is_finite(c) {
                return Err(Error::InvalidInput(format!("coefficient {n} is not finite")));
            }
        }
        Ok(Self { dim, coeffs })
    }

    pub fn constant(m: CMatrix) -> Result<Self> {
        Self::new(vec![m])
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            coeffs: vec![identity(dim)],
        }
    }

    /// `m0 + m1 z`.
    pub fn linear(m0: CMatrix, m1: CMatrix) -> Result<Self> {
        Self::new(vec![m0, m1])
    }

    /// Scalar polynomial as a `1 x 1` matrix polynomial.
    pub fn scalar(coeffs: &[Complex64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| CMatrix::from_element(1, 1, c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Option<&CMatrix> {
        self.coeffs.get(n)
    }

    pub fn into_coeffs(self) -> Vec<CMatrix> {
        self.coeffs
    }

    pub fn eval(&self, z: Complex64) -> CMatrix {
        let mut acc = self.coeffs[self.coeffs.len() - 1].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * z + c;
        }
        acc
    }

    /// Coefficientwise derivative `H'`.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self {
                dim: self.dim,
                coeffs: vec![CMatrix::zeros(self.dim, self.dim)],
            };
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(n, c)| c.scale(n as f64))
            .collect();
        Self {
            dim: self.dim,
            coeffs,
        }
    }

    /// `(H(z), H'(z))` in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (CMatrix, CMatrix) {
        let n = self.coeffs.len();
        let mut value = self.coeffs[n - 1].clone();
        let mut deriv = CMatrix::zeros(self.dim, self.dim);
        for c in self.coeffs.iter().rev().skip(1) {
            deriv = deriv * z + &value;
            value = value * z + c;
        }
        (value, deriv)
    }

    /// `U H`.
    pub fn left_mul(&self, u: &CMatrix) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| u * c).collect(),
        }
    }

    /// `H U`.
    pub fn right_mul(&self, u: &CMatrix) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c * u).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Polynomial product `self * other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::InvalidInput("polynomial dimensions differ".into()));
        }
        let mut coeffs = vec![CMatrix::zeros(self.dim, self.dim); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Ok(Self {
            dim: self.dim,
            coeffs,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::InvalidInput("polynomial dimensions differ".into()));
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = CMatrix::zeros(self.dim, self.dim);
        let coeffs = (0..len)
            .map(|n| self.coeffs.get(n).unwrap_or(&zero) + other.coeffs.get(n).unwrap_or(&zero))
            .collect();
        Ok(Self {
            dim: self.dim,
            coeffs,
        })
    }

    /// Coefficientwise transpose.
    pub fn transpose(&self) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().map(|c| c.transpose()).collect(),
        }
    }

    /// `z -> H(a + b z)`.
    pub fn compose_affine(&self, a: Complex64, b: Complex64) -> Self {
        let dim = self.dim;
        let mut acc: Vec<CMatrix> = vec![self.coeffs[self.coeffs.len() - 1].clone()];
        for c in self.coeffs.iter().rev().skip(1) {
            // acc <- acc * (a + b z) + c
            let mut next = vec![CMatrix::zeros(dim, dim); acc.len() + 1];
            for (k, m) in acc.iter().enumerate() {
                next[k] += m * a;
                next[k + 1] += m * b;
            }
            next[0] += c;
            acc = next;
        }
        Self { dim, coeffs: acc }
    }

    /// Keeps coefficients `0..=degree`.
    pub fn truncate(&self, degree: usize) -> Self {
        Self {
            dim: self.dim,
            coeffs: self.coeffs.iter().take(degree + 1).cloned().collect(),
        }
    }

    /// Largest Frobenius norm among coefficients above `degree`.
    pub fn tail_mass(&self, degree: usize) -> f64 {
        self.coeffs
            .iter()
            .skip(degree + 1)
            .map(frobenius)
            .fold(0.0, f64::max)
    }

    /// Drops trailing coefficients whose Frobenius norm is at most `tol`.
    pub fn trim(&self, tol: f64) -> Self {
        let mut keep = self.coeffs.len();
        while keep > 1 && frobenius(&self.coeffs[keep - 1]) <= tol {
            keep -= 1;
        }
        self.truncate(keep - 1)
    }

    /// `sum_n ||H_n||_F` (an upper bound for `sup_{|z|<=1} ||H(z)||_2`).
    pub fn coefficient_norm(&self) -> f64 {
        self.coeffs.iter().map(frobenius).sum()
    }

    /// The hermitian Laurent polynomial `H(w)* H(w)` on the unit circle.
    pub fn gram_on_circle(&self) -> MatrixLaurent {
        let n = self.degree();
        let mut pos = vec![CMatrix::zeros(self.dim, self.dim); n + 1];
        // F_k = sum_j H_j* H_{j+k}
        for (k, slot) in pos.iter_mut().enumerate() {
            for j in 0..=(n - k) {
                *slot += self.coeffs[j].adjoint() * &self.coeffs[j + k];
            }
        }
        MatrixLaurent::from_nonnegative(pos)
    }
}

/// Hermitian-symmetric Laurent polynomial `F(w) = sum_{n=-N}^{N} F_n w^n`
/// with `F_{-n} = F_n*`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixLaurent {
    dim: usize,
    degree: usize,
    /// `F_{-N}, ..., F_N`.
    coeffs: Vec<CMatrix>,
}

impl MatrixLaurent {
    /// Coefficients ordered `F_{-N}..F_N`; the symmetry `F_{-n} = F_n*` is
    /// checked to `1e-12` relative and then imposed exactly.
    pub fn new(coeffs: Vec<CMatrix>) -> Result<Self> {
        if coeffs.len() % 2 != 1 {
            return Err(Error::InvalidInput("Laurent polynomial needs 2N+1 coefficients".into()));
        }
        let degree = coeffs.len() / 2;
        let dim = coeffs[0].nrows();
        for (i, c) in coeffs.iter().enumerate() {
            if c.nrows() != dim || c.ncols() != dim || dim == 0 {
                return Err(Error::InvalidInput(format!(
                    "coefficient {} has shape {}x{}, expected {dim}x{dim}",
                    i as i64 - degree as i64,
                    c.nrows(),
                    c.ncols()
                )));
            }
            if !is_finite(c) {
                return Err(Error::InvalidInput("Laurent coefficients must be finite".into()));
            }
        }
        for n in 0..=degree {
            let pos = &coeffs[degree + n];
            let neg = &coeffs[degree - n];
            let gap = frobenius(&(neg - pos.adjoint()));
            if gap > 1e-12 * (1.0 + frobenius(pos)) {
                return Err(Error::InvalidInput(format!(
                    "F_-{n} differs from F_{n}* by {gap:.3e}"
                )));
            }
        }
        let pos: Vec<CMatrix> = coeffs[degree..].to_vec();
        Ok(Self::from_nonnegative(pos))
    }

    /// Builds the full symbol from `F_0, ..., F_N`; `F_0` is replaced by its hermitian part.
    pub fn from_nonnegative(mut pos: Vec<CMatrix>) -> Self {
        assert!(!pos.is_empty(), "at least F_0 is required");
        pos[0] = Hermitian::from_part(&pos[0]).into_matrix();
        let degree = pos.len() - 1;
        let dim = pos[0].nrows();
        let mut coeffs = Vec::with_capacity(2 * degree + 1);
        for n in (1..=degree).rev() {
            coeffs.push(pos[n].adjoint());
        }
        coeffs.extend(pos);
        Self { dim, degree, coeffs }
    }

    pub fn constant(c: &Hermitian) -> Self {
        Self::from_nonnegative(vec![c.as_matrix().clone()])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `F_n` for `|n| <= N`, zero-padded outside.
    pub fn coeff(&self, n: i64) -> CMatrix {
        let idx = n + self.degree as i64;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            CMatrix::zeros(self.dim, self.dim)
        } else {
            self.coeffs[idx as usize].clone()
        }
    }

    /// Coefficients `F_{-N}..F_N`.
    pub fn coeffs(&self) -> &[CMatrix] {
        &self.coeffs
    }

    pub fn eval(&self, w: Complex64) -> CMatrix {
        let mut acc = CMatrix::zeros(self.dim, self.dim);
        for (i, c) in self.coeffs.iter().enumerate() {
            let n = i as i32 - self.degree as i32;
            acc += c * w.powi(n);
        }
        acc
    }

    /// Value at `e^{it}`, as a hermitian matrix.
    pub fn eval_angle(&self, t: f64) -> Hermitian {
        Hermitian::from_part(&self.eval(Complex64::from_polar(1.0, t)))
    }

    /// Smallest eigenvalue over `n` equispaced circle points.
    pub fn min_circle_margin(&self, n: usize) -> f64 {
        unit_roots(n)
            .into_iter()
            .map(|w| Hermitian::from_part(&self.eval(w)).min_eigenvalue())
            .fold(f64::INFINITY, f64::min)
    }

    /// `max_j ||F(w_j)||_2` over `n` equispaced circle points.
    pub fn sup_norm(&self, n: usize) -> f64 {
        unit_roots(n)
            .into_iter()
            .map(|w| Hermitian::from_part(&self.eval(w)).norm())
            .fold(0.0, f64::max)
    }

    /// `F + s Id`.
    pub fn lift(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[self.degree] += identity(self.dim).scale(s);
        out
    }

    /// Coefficientwise transpose (`F^T(w) = F(w)^T`).
    pub fn transpose(&self) -> Self {
        Self {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c.transpose()).collect(),
        }
    }
}

/// Vector-valued polynomial `phi(z) = sum_n v_n z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorPolynomial {
    coeffs: Vec<CVector>,
}

impl VectorPolynomial {
    pub fn new(coeffs: Vec<CVector>) -> Result<Self> {
        let Some(first) = coeffs.first() else {
            return Err(Error::InvalidInput("vector polynomial needs a coefficient".into()));
        };
        let dim = first.len();
        if coeffs.iter().any(|v| v.len() != dim) || dim == 0 {
            return Err(Error::InvalidInput("vector coefficients differ in length".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn constant(v: CVector) -> Result<Self> {
        Self::new(vec![v])
    }

    pub fn dim(&self) -> usize {
        self.coeffs[0].len()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> CVector {
        let mut acc = self.coeffs[self.coeffs.len() - 1].clone();
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc * z + c;
        }
        acc
    }
}

/// `<M v, v>` (real part; exact for hermitian `M`).
pub fn quadratic_form(m: &CMatrix, v: &CVector) -> f64 {
    (v.adjoint() * m * v)[(0, 0)].re
}

#[allow(dead_code)]
pub(crate) fn unit_scalar(x: f64) -> CMatrix {
    CMatrix::from_element(1, 1, c64(x, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn horner_and_derivative_agree_with_direct_sums() {
        let h = MatrixPolynomial::scalar(&[c64(1.0, 0.0), c64(2.0, -1.0), c64(0.0, 3.0)]).unwrap();
        let z = c64(0.3, -0.7);
        let direct = c64(1.0, 0.0) + c64(2.0, -1.0) * z + c64(0.0, 3.0) * z * z;
        let (v, d) = h.eval_with_derivative(z);
        assert_abs_diff_eq!((v[(0, 0)] - direct).norm(), 0.0, epsilon = 1e-14);
        let dd = c64(2.0, -1.0) + c64(0.0, 6.0) * z;
        assert_abs_diff_eq!((d[(0, 0)] - dd).norm(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!((h.derivative().eval(z)[(0, 0)] - dd).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn affine_composition() {
        let h = MatrixPolynomial::scalar(&[c64(1.0, 0.0), c64(0.0, 1.0), c64(2.0, 0.0)]).unwrap();
        let (a, b) = (c64(0.5, 0.25), c64(0.0, 0.5));
        let g = h.compose_affine(a, b);
        for z in [c64(0.1, 0.2), c64(-0.7, 0.4)] {
            let lhs = g.eval(z)[(0, 0)];
            let rhs = h.eval(a + b * z)[(0, 0)];
            assert_abs_diff_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn gram_on_circle_matches_pointwise_product() {
        let h = MatrixPolynomial::new(vec![
            CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.5, 0.5), c64(2.0, 0.0)]),
            CMatrix::from_row_slice(2, 2, &[c64(0.0, 1.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.3, 0.0)]),
        ])
        .unwrap();
        let f = h.gram_on_circle();
        for t in [0.0, 1.0, 2.5, 4.0] {
            let w = Complex64::from_polar(1.0, t);
            let hw = h.eval(w);
            let diff = f.eval(w) - hw.adjoint() * hw;
            assert!(frobenius(&diff) < 1e-14);
        }
    }

    #[test]
    fn laurent_symmetry_is_enforced() {
        let f1 = CMatrix::from_row_slice(1, 1, &[c64(1.0, 0.0)]);
        let bad = MatrixLaurent::new(vec![f1.scale(2.0), unit_scalar(2.5), f1.clone()]);
        assert!(bad.is_err());
        let good = MatrixLaurent::new(vec![f1.clone(), unit_scalar(2.5), f1]).unwrap();
        assert_abs_diff_eq!(good.eval_angle(0.0).as_matrix()[(0, 0)].re, 4.5, epsilon = 1e-15);
        assert_abs_diff_eq!(good.min_circle_margin(64), 0.5, epsilon = 1e-12);
    }
}
