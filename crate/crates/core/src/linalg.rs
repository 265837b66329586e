//! Dense complex matrix kernel.
//!
//! Everything downstream works with `d x d` complex matrices standing in for
//! bounded operators on a `d`-dimensional Hilbert space. Hermitian and
//! positive semidefinite matrices get their own wrappers so that the
//! canonical form `(M + M*)/2` is applied once, at construction.
//!
//! PSD tests are relative: a hermitian `M` counts as PSD when
//! `lambda_min(M) >= -tol * (1 + ||M||_2)`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Default relative PSD tolerance.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;

/// Relative hermiticity tolerance accepted by [`Hermitian::new`].
pub const HERMITIAN_TOL: f64 = 1e-12;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn ensure_finite(m: &CMatrix, what: &str) -> Result<()> {
    if is_finite(m) {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("{what} has non-finite entries")))
    }
}

fn ensure_square(m: &CMatrix, what: &str) -> Result<()> {
    if m.nrows() == m.ncols() && m.nrows() > 0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "{what} must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )))
    }
}

/// `(M + M*)/2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Largest singular value.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Smallest singular value.
pub fn min_singular(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().min()
}

pub fn inverse(m: &CMatrix) -> Result<CMatrix> {
    ensure_square(m, "matrix")?;
    let inv = m
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Degenerate("singular matrix".into()))?;
    if !is_finite(&inv) {
        return Err(Error::Degenerate("inverse overflowed".into()));
    }
    Ok(inv)
}

/// Solve `m x = rhs` by LU with partial pivoting.
pub fn solve(m: &CMatrix, rhs: &CMatrix) -> Result<CMatrix> {
    let x = m
        .clone()
        .lu()
        .solve(rhs)
        .ok_or_else(|| Error::Degenerate("singular system".into()))?;
    if !is_finite(&x) {
        return Err(Error::Degenerate("solution overflowed".into()));
    }
    Ok(x)
}

/// A hermitian matrix stored in canonical form `(M + M*)/2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hermitian(CMatrix);

impl Hermitian {
    /// Validates squareness, finiteness and `||M - M*||_F <= 1e-12 (1 + ||M||_F)`.
    pub fn new(m: CMatrix) -> Result<Self> {
        ensure_square(&m, "hermitian matrix")?;
        ensure_finite(&m, "hermitian matrix")?;
        let skew = frobenius(&(&m - m.adjoint()));
        if skew > HERMITIAN_TOL * (1.0 + frobenius(&m)) {
            return Err(Error::InvalidInput(format!(
                "matrix is not hermitian (||M - M*||_F = {skew:.3e})"
            )));
        }
        Ok(Self(hermitian_part(&m)))
    }

    /// Takes the hermitian part of `m` without checking how far off it was.
    pub fn from_part(m: &CMatrix) -> Self {
        Self(hermitian_part(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self(identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(CMatrix::zeros(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| c64(x, 0.0)));
        Self(CMatrix::from_diagonal(&d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// Eigenvalues (ascending) and matching unit eigenvectors as columns.
    pub fn eigh(&self) -> (Vec<f64>, CMatrix) {
        let eig = SymmetricEigen::new(self.0.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = CMatrix::zeros(self.dim(), self.dim());
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        (values, vectors)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.0.clone().symmetric_eigenvalues().iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_eigenvalue(&self) -> f64 {
        self.0
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    /// `||M||_2`, which for hermitian `M` is the largest absolute eigenvalue.
    pub fn norm(&self) -> f64 {
        self.max_abs_eigenvalue()
    }

    /// Relative PSD test with the default tolerance.
    pub fn is_psd(&self) -> bool {
        is_psd(self, DEFAULT_PSD_TOL).map(|c| c.psd).unwrap_or(false)
    }

    pub fn sub(&self, other: &Hermitian) -> Hermitian {
        Hermitian::from_part(&(&self.0 - &other.0))
    }

    pub fn add(&self, other: &Hermitian) -> Hermitian {
        Hermitian::from_part(&(&self.0 + &other.0))
    }

    pub fn scale(&self, s: f64) -> Hermitian {
        Hermitian(self.0.scale(s))
    }

    /// `K* M K`.
    pub fn congruence(&self, k: &CMatrix) -> Hermitian {
        Hermitian::from_part(&(k.adjoint() * &self.0 * k))
    }

    /// Entrywise transpose (still hermitian).
    pub fn transpose(&self) -> Hermitian {
        Hermitian(self.0.transpose())
    }
}

/// Outcome of a relative PSD test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsdCheck {
    pub psd: bool,
    /// Smallest eigenvalue.
    pub margin: f64,
}

/// `lambda_min(m) >= -tol (1 + ||m||_2)`.
pub fn is_psd(m: &Hermitian, tol: f64) -> Result<PsdCheck> {
    ensure_finite(m.as_matrix(), "matrix")?;
    let values = m.eigenvalues();
    let margin = values[0];
    let norm = values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    Ok(PsdCheck {
        psd: margin >= -tol * (1.0 + norm),
        margin,
    })
}

/// A hermitian matrix certified PSD at construction, with its smallest eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct Psd {
    inner: Hermitian,
    margin: f64,
}

impl Psd {
    pub fn new(inner: Hermitian, tol: f64) -> Result<Self> {
        let check = is_psd(&inner, tol)?;
        if !check.psd {
            return Err(Error::InvalidInput(format!(
                "matrix is not positive semidefinite (lambda_min = {:.3e})",
                check.margin
            )));
        }
        Ok(Self {
            inner,
            margin: check.margin,
        })
    }

    /// Wraps a matrix that is PSD by construction.
    pub(crate) fn trusted(inner: Hermitian) -> Self {
        let margin = inner.min_eigenvalue();
        Self { inner, margin }
    }

    /// `H* H`, PSD by construction.
    pub fn from_factor(h: &CMatrix) -> Self {
        let inner = Hermitian::from_part(&(h.adjoint() * h));
        let margin = inner.min_eigenvalue();
        Self { inner, margin }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            inner: Hermitian::identity(dim),
            margin: 1.0,
        }
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn hermitian(&self) -> &Hermitian {
        &self.inner
    }

    pub fn as_matrix(&self) -> &CMatrix {
        self.inner.as_matrix()
    }

    pub fn into_hermitian(self) -> Hermitian {
        self.inner
    }
}

/// Applies `f` to the eigenvalues of a hermitian matrix.
pub fn hermitian_function(m: &Hermitian, f: impl Fn(f64) -> f64) -> Hermitian {
    let (values, vectors) = m.eigh();
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        let fv = f(v);
        scaled.column_mut(j).scale_mut(fv);
    }
    Hermitian::from_part(&(scaled * vectors.adjoint()))
}

/// Principal square root; negative eigenvalues (within tolerance) are clamped to zero.
pub fn sqrt_psd(m: &Psd) -> Psd {
    let root = hermitian_function(m.hermitian(), |v| v.max(0.0).sqrt());
    Psd::trusted(root)
}

/// `M^{-1/2}` for positive definite `M`.
pub fn inv_sqrt_pd(m: &Hermitian) -> Result<Hermitian> {
    let lo = m.min_eigenvalue();
    if lo <= 0.0 {
        return Err(Error::Degenerate(format!(
            "inverse square root of a matrix with lambda_min = {lo:.3e}"
        )));
    }
    Ok(hermitian_function(m, |v| 1.0 / v.sqrt()))
}

/// `M^{1/2}` for a hermitian matrix assumed PSD (negative eigenvalues clamped).
pub fn sqrt_hermitian(m: &Hermitian) -> Hermitian {
    hermitian_function(m, |v| v.max(0.0).sqrt())
}

/// Unitary polar factor `U` with `U H0` hermitian PSD, i.e.
/// `U = (H0* H0)^{1/2} H0^{-1}`, computed through the SVD.
pub fn polar_unitary(h0: &CMatrix) -> Result<CMatrix> {
    ensure_square(h0, "matrix")?;
    let svd = h0.clone().svd(true, true);
    let smin = svd.singular_values.min();
    let smax = svd.singular_values.max();
    if !(smin > smax * 1e-14) {
        return Err(Error::Degenerate(format!(
            "constant term is singular (sigma_min = {smin:.3e})"
        )));
    }
    let (Some(u), Some(v_t)) = (svd.u, svd.v_t) else {
        return Err(Error::Degenerate("SVD failed".into()));
    };
    // h0 = W S V*, so (h0* h0)^{1/2} h0^{-1} = V W*.
    Ok(v_t.adjoint() * u.adjoint())
}

/// `B (C + t Id)^{-1} B*` for `C` PSD and `t > 0`.
fn regularized_quadratic(b: &CMatrix, c: &CMatrix, t: f64) -> Result<CMatrix> {
    let dim = c.nrows();
    let shifted = c + identity(dim).scale(t);
    let bt = b.adjoint();
    let x = match Cholesky::new(shifted.clone()) {
        Some(ch) => ch.solve(&bt),
        None => solve(&shifted, &bt)?,
    };
    if !is_finite(&x) {
        return Err(Error::Degenerate("regularized solve overflowed".into()));
    }
    Ok(hermitian_part(&(b * x)))
}

/// `a - b (c + t Id)^{-1} b*`.
pub fn schur_complement(a: &Hermitian, b: &CMatrix, c: &Psd, t: f64) -> Result<Hermitian> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidInput(format!(
            "regularization parameter must be positive, got {t}"
        )));
    }
    check_block_shapes(a, b, c.hermitian())?;
    let d = regularized_quadratic(b, c.as_matrix(), t)?;
    Ok(Hermitian::from_part(&(a.as_matrix() - d)))
}

fn check_block_shapes(a: &Hermitian, b: &CMatrix, c: &Hermitian) -> Result<()> {
    if b.nrows() != a.dim() || b.ncols() != c.dim() {
        return Err(Error::InvalidInput(format!(
            "block shapes disagree: a {0}x{0}, b {1}x{2}, c {3}x{3}",
            a.dim(),
            b.nrows(),
            b.ncols(),
            c.dim()
        )));
    }
    Ok(())
}

/// Configuration of the `t -> 0` limit in [`schur_complement_limit`].
#[derive(Clone, Debug, PartialEq)]
pub struct SchurLimitConfig {
    /// Decreasing grid; each value is multiplied by `1 + ||c||_2`.
    pub t_grid: Vec<f64>,
    /// Accept when the last two evaluations differ by at most `accept * (1 + ||a||_2)`.
    pub accept: f64,
    /// Allowed violation of monotonicity, relative to `1 + ||D||_2`.
    pub monotone_tol: f64,
}

impl Default for SchurLimitConfig {
    fn default() -> Self {
        Self {
            t_grid: vec![1e-3, 1e-5, 1e-7, 1e-9],
            accept: 1e-6,
            monotone_tol: 1e-9,
        }
    }
}

impl SchurLimitConfig {
    /// The scaled t values actually used for a given `c`.
    pub fn scaled_grid(&self, c: &Psd) -> Vec<f64> {
        let scale = 1.0 + c.hermitian().norm();
        self.t_grid.iter().map(|t| t * scale).collect()
    }
}

/// Result of the regularized Schur complement limit.
#[derive(Clone, Debug, PartialEq)]
pub struct SchurLimit {
    /// `a - D` with `D = lim_{t -> 0} b (c + t)^{-1} b*`.
    pub value: Hermitian,
    /// `||D(t_last) - D(t_prev)||_2`.
    pub spread: f64,
}

/// Schur complement of a block with a possibly singular `c`, through the
/// monotone limit `t -> 0`.
pub fn schur_complement_limit(
    a: &Hermitian,
    b: &CMatrix,
    c: &Psd,
    config: &SchurLimitConfig,
) -> Result<SchurLimit> {
    check_block_shapes(a, b, c.hermitian())?;
    let grid = config.scaled_grid(c);
    if grid.len() < 2 || grid.windows(2).any(|w| !(w[1] < w[0])) || grid[grid.len() - 1] <= 0.0 {
        return Err(Error::InvalidInput(
            "t-grid must hold at least two strictly decreasing positive values".into(),
        ));
    }
    let mut values = Vec::with_capacity(grid.len());
    for &t in &grid {
        values.push(Hermitian::from_part(&regularized_quadratic(b, c.as_matrix(), t)?));
    }
    for (j, pair) in values.windows(2).enumerate() {
        let step = pair[1].sub(&pair[0]);
        let bound = config.monotone_tol * (1.0 + pair[1].norm());
        if step.min_eigenvalue() < -bound {
            return Err(Error::Degenerate(format!(
                "b (c + t)^-1 b* is not monotone between t = {:.1e} and t = {:.1e}",
                grid[j],
                grid[j + 1]
            )));
        }
    }
    let last = &values[values.len() - 1];
    let prev = &values[values.len() - 2];
    let diff = last.sub(prev);
    let spread = diff.norm();
    if !(spread <= config.accept * (1.0 + a.norm())) {
        return Err(Error::Degenerate(format!(
            "Schur complement limit diverges (spread {spread:.3e}); c is effectively singular in a direction b reaches"
        )));
    }
    // D(t) is analytic in t near 0 for this regime; one linear extrapolation step.
    let (t_last, t_prev) = (grid[grid.len() - 1], grid[grid.len() - 2]);
    let limit = last.add(&diff.scale(t_last / (t_prev - t_last)));
    Ok(SchurLimit {
        value: a.sub(&limit),
        spread,
    })
}

/// The 2x2 block hermitian matrix `[[a, b], [b*, c]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMatrix2x2 {
    pub a: Hermitian,
    pub b: CMatrix,
    pub c: Hermitian,
}

impl BlockMatrix2x2 {
    pub fn new(a: Hermitian, b: CMatrix, c: Hermitian) -> Result<Self> {
        check_block_shapes(&a, &b, &c)?;
        Ok(Self { a, b, c })
    }

    pub fn assemble(&self) -> Hermitian {
        let (p, q) = (self.a.dim(), self.c.dim());
        let mut m = CMatrix::zeros(p + q, p + q);
        m.view_mut((0, 0), (p, p)).copy_from(self.a.as_matrix());
        m.view_mut((0, p), (p, q)).copy_from(&self.b);
        m.view_mut((p, 0), (q, p)).copy_from(&self.b.adjoint());
        m.view_mut((p, p), (q, q)).copy_from(self.c.as_matrix());
        Hermitian(m)
    }

    /// Splits a `2d x 2d` hermitian matrix into equal blocks.
    pub fn split(m: &Hermitian) -> Result<Self> {
        let n = m.dim();
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidInput("odd dimension cannot be split".into()));
        }
        let d = n / 2;
        let mm = m.as_matrix();
        Ok(Self {
            a: Hermitian::from_part(&mm.view((0, 0), (d, d)).into_owned()),
            b: mm.view((0, d), (d, d)).into_owned(),
            c: Hermitian::from_part(&mm.view((d, d), (d, d)).into_owned()),
        })
    }
}

/// PSD test of the assembled block.
pub fn block_psd_test(block: &BlockMatrix2x2, tol: f64) -> Result<PsdCheck> {
    is_psd(&block.assemble(), tol)
}

/// True iff every member satisfies `sigma_min >= tol`, i.e. `sup ||m_k^{-1}|| <= 1/tol`.
pub fn invertibility_certificate(ms: &[CMatrix], tol: f64) -> Result<bool> {
    let Some(first) = ms.first() else {
        return Ok(true);
    };
    let shape = first.shape();
    if ms.iter().any(|m| m.shape() != shape) {
        return Err(Error::InvalidInput("matrices differ in dimension".into()));
    }
    Ok(ms.iter().all(|m| is_finite(m) && min_singular(m) >= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn diag(values: &[f64]) -> Hermitian {
        Hermitian::from_real_diagonal(values)
    }

    fn scalar(x: f64) -> CMatrix {
        CMatrix::from_element(1, 1, c64(x, 0.0))
    }

    #[test]
    fn identity_is_psd_with_unit_margin() {
        let check = is_psd(&Hermitian::identity(3), 1e-9).unwrap();
        assert!(check.psd);
        assert_abs_diff_eq!(check.margin, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn negative_eigenvalue_is_rejected() {
        let check = is_psd(&diag(&[1.0, -0.5]), 1e-9).unwrap();
        assert!(!check.psd);
        assert_abs_diff_eq!(check.margin, -0.5, epsilon = 1e-15);
    }

    #[test]
    fn non_finite_entries_are_input_errors() {
        let mut m = identity(2);
        m[(0, 1)] = c64(f64::NAN, 0.0);
        assert!(matches!(Hermitian::new(m), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m = identity(2);
        m[(0, 1)] = c64(1.0, 0.0);
        assert!(Hermitian::new(m).is_err());
    }

    #[test]
    fn sqrt_of_diagonal() {
        let m = Psd::new(diag(&[4.0, 1.0]), 1e-9).unwrap();
        let s = sqrt_psd(&m);
        assert_abs_diff_eq!(s.as_matrix()[(0, 0)].re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.as_matrix()[(1, 1)].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s.as_matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-14);
        let id = sqrt_psd(&Psd::identity(3));
        assert_abs_diff_eq!(frobenius(&(id.as_matrix() - identity(3))), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn scalar_schur_complement_tends_to_one() {
        let a = Hermitian::new(scalar(2.0)).unwrap();
        let c = Psd::new(Hermitian::new(scalar(1.0)).unwrap(), 1e-9).unwrap();
        let mut last = 0.0;
        for t in [1e-2, 1e-4, 1e-6, 1e-8] {
            let s = schur_complement(&a, &scalar(1.0), &c, t).unwrap();
            last = s.as_matrix()[(0, 0)].re;
            assert_abs_diff_eq!(last, 2.0 - 1.0 / (1.0 + t), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(last, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn zero_off_diagonal_returns_a() {
        let a = diag(&[3.0, -1.0]);
        let c = Psd::new(diag(&[0.0, 2.0]), 1e-9).unwrap();
        let b = CMatrix::zeros(2, 2);
        for t in [1.0, 1e-3, 1e-9] {
            assert_eq!(schur_complement(&a, &b, &c, t).unwrap(), a);
        }
        let lim = schur_complement_limit(&a, &b, &c, &SchurLimitConfig::default()).unwrap();
        assert_eq!(lim.value, a);
        assert_eq!(lim.spread, 0.0);
    }

    #[test]
    fn nonpositive_t_is_input_error() {
        let a = diag(&[1.0]);
        let c = Psd::identity(1);
        assert!(matches!(
            schur_complement(&a, &scalar(1.0), &c, 0.0),
            Err(Error::InvalidInput(_))
        ));
        assert!(schur_complement(&a, &scalar(1.0), &c, -1.0).is_err());
    }

    #[test]
    fn singular_c_touched_by_b_diverges() {
        let a = diag(&[1.0]);
        let c = Psd::new(diag(&[0.0]), 1e-9).unwrap();
        let err = schur_complement_limit(&a, &scalar(1.0), &c, &SchurLimitConfig::default());
        assert!(matches!(err, Err(Error::Degenerate(_))));
    }

    #[test]
    fn singular_c_avoided_by_b_converges() {
        // c = diag(0, 1), b only reaches the second coordinate.
        let a = diag(&[2.0, 2.0]);
        let c = Psd::new(diag(&[0.0, 1.0]), 1e-9).unwrap();
        let mut b = CMatrix::zeros(2, 2);
        b[(1, 1)] = c64(1.0, 0.0);
        let lim = schur_complement_limit(&a, &b, &c, &SchurLimitConfig::default()).unwrap();
        assert_abs_diff_eq!(lim.value.as_matrix()[(1, 1)].re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lim.value.as_matrix()[(0, 0)].re, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn block_examples() {
        let id = Hermitian::identity(2);
        let blk = BlockMatrix2x2::new(id.clone(), CMatrix::zeros(2, 2), id).unwrap();
        assert!(block_psd_test(&blk, 1e-9).unwrap().psd);

        let one = Hermitian::new(scalar(1.0)).unwrap();
        let blk = BlockMatrix2x2::new(one.clone(), scalar(2.0), one).unwrap();
        let check = block_psd_test(&blk, 1e-9).unwrap();
        assert!(!check.psd);
        assert_abs_diff_eq!(check.margin, -1.0, epsilon = 1e-14);
        let mut eig = blk.assemble().eigenvalues();
        eig.sort_by(f64::total_cmp);
        assert_abs_diff_eq!(eig[1], 3.0, epsilon = 1e-14);
    }

    #[test]
    fn split_inverts_assemble() {
        let a = diag(&[1.0, 2.0]);
        let mut b = CMatrix::zeros(2, 2);
        b[(0, 1)] = c64(0.5, -0.25);
        let c = diag(&[3.0, 4.0]);
        let blk = BlockMatrix2x2::new(a, b, c).unwrap();
        assert_eq!(BlockMatrix2x2::split(&blk.assemble()).unwrap(), blk);
    }

    #[test]
    fn invertibility_certificate_examples() {
        let id = identity(2);
        assert!(invertibility_certificate(&[id.clone(), id.scale(2.0)], 0.5).unwrap());
        let seq: Vec<CMatrix> = (1..=100)
            .map(|k| diag(&[1.0, 1.0 / k as f64]).into_matrix())
            .collect();
        assert!(!invertibility_certificate(&seq, 0.1).unwrap());
        let singular = diag(&[1.0, 0.0]).into_matrix();
        assert!(!invertibility_certificate(&[singular], 1e-12).unwrap());
        assert!(invertibility_certificate(&[identity(2), identity(3)], 0.1).is_err());
    }

    #[test]
    fn norms_of_simple_matrices() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c64(3.0, 0.0), c64(-4.0, 0.0)]));
        assert_abs_diff_eq!(operator_norm(&m), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(min_singular(&m), 3.0, epsilon = 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = CMatrix::from_row_slice(2, 2, &[c64(s, 0.0), c64(0.0, s), c64(0.0, s), c64(s, 0.0)]);
        assert_abs_diff_eq!(operator_norm(&u), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(min_singular(&u), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn polar_factor_of_negative_scalar() {
        let u = polar_unitary(&scalar(-2.0)).unwrap();
        assert_abs_diff_eq!(u[(0, 0)].re, -1.0, epsilon = 1e-15);
        assert!(polar_unitary(&CMatrix::zeros(2, 2)).is_err());
    }
}
