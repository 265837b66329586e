//! Matrix Fejér–Riesz factorization `F = H*H` of Laurent polynomials that are
//! strictly positive on the unit circle, by block-Toeplitz Cholesky (Bauer)
//! or by a Newton iteration on circle samples (Wilson).

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use nalgebra::Cholesky;
use serde::Serialize;

use crate::circle::{dft, idft, is_power_of_two, unit_roots, winding_number, BoundarySamples};
use crate::error::{Error, Result};
use crate::linalg::{
    frobenius, hermitian_part, identity, inverse, min_singular, polar_unitary, CMatrix, Hermitian,
};
use crate::poly::{MatrixLaurent, MatrixPolynomial};

pub const DEFAULT_FACTOR_TOL: f64 = 1e-10;
/// Relative strict-positivity floor: `min eig >= floor * sup ||F||`.
pub const DEFAULT_POSITIVITY_FLOOR: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Bauer,
    Wilson,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Bauer => "bauer",
            Method::Wilson => "wilson",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bauer" => Ok(Method::Bauer),
            "wilson" => Ok(Method::Wilson),
            other => Err(Error::InvalidInput(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FactorOptions {
    /// Relative residual target `sup ||H*H - F|| <= tol (1 + sup ||F||)`.
    pub tol: f64,
    pub method: Method,
    /// Block rows allowed in the Bauer recursion.
    pub max_blocks: usize,
    pub max_iters: usize,
    pub floor: f64,
}

impl Default for FactorOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_FACTOR_TOL,
            method: Method::Bauer,
            max_blocks: 1 << 16,
            max_iters: 100,
            floor: DEFAULT_POSITIVITY_FLOOR,
        }
    }
}

impl FactorOptions {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FactorizationReport {
    /// `sup ||H*H - F||_2 / (1 + sup ||F||_2)` on the validation grid.
    pub residual: f64,
    pub winding: i64,
    pub h0_hermiticity: f64,
    pub method: Method,
    /// Block rows (Bauer) or Newton steps (Wilson).
    pub iterations: usize,
    /// Largest coefficient dropped beyond degree `N`.
    pub tail_mass: f64,
    pub restarts: usize,
    pub min_singular_on_circle: f64,
    pub margin: f64,
}

/// Output of one of the two raw factorization methods.
#[derive(Clone, Debug)]
pub struct RawFactor {
    pub h: MatrixPolynomial,
    pub iterations: usize,
    pub tail_mass: f64,
    pub restarts: usize,
}

/// Validation grid size: eight times the Nyquist count.
pub fn validation_size(degree: usize) -> usize {
    (8 * (2 * degree + 1)).max(64).next_power_of_two()
}

/// Returns the circle margin, or fails when it is below `floor * sup ||F||`.
pub fn check_positivity(f: &MatrixLaurent, floor: f64) -> Result<f64> {
    let n = validation_size(f.degree());
    let margin = f.min_circle_margin(n);
    let scale = f.sup_norm(n);
    let floor = floor * scale;
    if !(margin >= floor) || margin <= 0.0 {
        return Err(Error::NotStrictlyPositive { margin, floor });
    }
    Ok(margin)
}

/// `sup_j ||H(w_j)*H(w_j) - F(w_j)||_2 / (1 + sup_j ||F(w_j)||_2)`.
pub fn circle_residual(h: &MatrixPolynomial, f: &MatrixLaurent, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for w in unit_roots(n) {
        let hw = h.eval(w);
        let fw = f.eval(w);
        worst = worst.max(Hermitian::from_part(&(hw.adjoint() * &hw - &fw)).norm());
        scale = scale.max(Hermitian::from_part(&fw).norm());
    }
    worst / (1.0 + scale)
}

/// Winding number of `det H` on the unit circle, refining the grid until
/// consecutive phase steps are resolved.
pub fn det_winding(h: &MatrixPolynomial, n0: usize) -> Result<i64> {
    let mut n = n0.max(16).next_power_of_two();
    loop {
        let dets: Vec<_> = unit_roots(n).into_iter().map(|w| h.eval(w).determinant()).collect();
        match winding_number(&dets) {
            Err(Error::Resolution { .. }) if n < 1 << 18 => n *= 2,
            other => return other,
        }
    }
}

/// Gauge `H -> U H` with `U = (H(0)*H(0))^{1/2} H(0)^{-1}`, making `H(0)` hermitian PSD.
pub fn normalize_factor(h: &MatrixPolynomial) -> Result<MatrixPolynomial> {
    let u = polar_unitary(&h.coeffs()[0])?;
    let d = h.dim();
    let defect = frobenius(&(u.adjoint() * &u - identity(d)));
    if defect > 1e-10 * (d as f64).sqrt() {
        return Err(Error::Degenerate(format!(
            "normalizing gauge is not unitary (defect {defect:.3e})"
        )));
    }
    let mut coeffs = h.left_mul(&u).into_coeffs();
    coeffs[0] = hermitian_part(&coeffs[0]);
    MatrixPolynomial::new(coeffs)
}

/// Factorization with the chosen method, outer normalization and a full report.
pub fn fejer_riesz_factor(
    f: &MatrixLaurent,
    opts: &FactorOptions,
) -> Result<(MatrixPolynomial, FactorizationReport)> {
    let margin = check_positivity(f, opts.floor)?;
    let raw = match opts.method {
        Method::Bauer => factor_bauer(f, opts.tol, opts.max_blocks)?,
        Method::Wilson => factor_wilson(f, opts.tol, opts.max_iters)?,
    };
    let h = normalize_factor(&raw.h)?;
    let n = validation_size(f.degree());
    let residual = circle_residual(&h, f, n);
    let min_singular_on_circle = unit_roots(n)
        .into_iter()
        .map(|w| min_singular(&h.eval(w)))
        .fold(f64::INFINITY, f64::min);
    if min_singular_on_circle <= 0.0 {
        return Err(Error::Degenerate("factor is singular on the circle".into()));
    }
    let winding = det_winding(&h, n)?;
    let h0 = &h.coeffs()[0];
    let h0_hermiticity = frobenius(&(h0 - h0.adjoint()));
    if residual > opts.tol {
        return Err(Error::Convergence {
            iterations: raw.iterations,
            residual,
        });
    }
    if winding != 0 {
        return Err(Error::Degenerate(format!(
            "det H winds {winding} times; factor is not outer"
        )));
    }
    let report = FactorizationReport {
        residual,
        winding,
        h0_hermiticity,
        method: opts.method,
        iterations: raw.iterations,
        tail_mass: raw.tail_mass,
        restarts: raw.restarts,
        min_singular_on_circle,
        margin,
    };
    Ok((h, report))
}

/// Cholesky of the banded block-Toeplitz matrix `T_{ij} = F_{j-i}`; the
/// trailing block row converges to the adjoint coefficients of the outer factor.
pub fn factor_bauer(f: &MatrixLaurent, tol: f64, max_blocks: usize) -> Result<RawFactor> {
    let d = f.dim();
    let nb = f.degree();
    let pos: Vec<CMatrix> = (0..=nb).map(|k| f.coeff(k as i64)).collect();
    let scale = 1.0 + Hermitian::from_part(&pos[0]).norm();
    let step_tol = 0.25 * tol * scale.sqrt();
    let vn = validation_size(nb);

    // rows[back] = row i; row[n] = L_{i, i-n}
    let mut rows: VecDeque<Vec<CMatrix>> = VecDeque::with_capacity(nb + 1);
    let mut previous: Option<Vec<CMatrix>> = None;
    let mut checkpoint = 1usize;
    for i in 0..max_blocks {
        let width = i.min(nb);
        let mut row: Vec<CMatrix> = vec![CMatrix::zeros(d, d); width + 1];
        // j runs from i - width up to i
        for j in (i - width)..=i {
            let n = i - j;
            let mut s = pos[n].adjoint();
            let lo = (i - width).max(j.saturating_sub(nb));
            let row_j: &Vec<CMatrix> = if j == i {
                &row
            } else {
                &rows[rows.len() - (i - j)]
            };
            for k in lo..j {
                let lik = &row[i - k];
                let ljk = &row_j[j - k];
                s -= lik * ljk.adjoint();
            }
            if j < i {
                let ljj = &row_j[0];
                // X ljj* = s  <=>  ljj X* = s*
                let xt = ljj
                    .solve_lower_triangular(&s.adjoint())
                    .ok_or_else(|| Error::Degenerate("zero pivot in block Cholesky".into()))?;
                row[n] = xt.adjoint();
            } else {
                let s = hermitian_part(&s);
                match Cholesky::new(s.clone()) {
                    Some(ch) => row[0] = ch.l(),
                    None => {
                        let margin = Hermitian::from_part(&s).min_eigenvalue();
                        return Err(Error::NotStrictlyPositive {
                            margin,
                            floor: 0.0,
                        });
                    }
                }
            }
        }
        rows.push_back(row);
        if rows.len() > nb + 1 {
            rows.pop_front();
        }
        if i + 1 == checkpoint {
            let last = rows.back().expect("row just pushed");
            let cand: Vec<CMatrix> = (0..=nb)
                .map(|n| last.get(n).map(|m| m.adjoint()).unwrap_or_else(|| CMatrix::zeros(d, d)))
                .collect();
            if let Some(prev) = &previous {
                let diff = cand
                    .iter()
                    .zip(prev)
                    .map(|(a, b)| frobenius(&(a - b)))
                    .fold(0.0, f64::max);
                if diff <= step_tol {
                    let h = MatrixPolynomial::new(cand.clone())?;
                    if circle_residual(&h, f, vn) <= tol {
                        return Ok(RawFactor {
                            h,
                            iterations: i + 1,
                            tail_mass: 0.0,
                            restarts: 0,
                        });
                    }
                }
            }
            previous = Some(cand);
            checkpoint *= 2;
        }
    }
    let residual = previous
        .map(|c| MatrixPolynomial::new(c).map(|h| circle_residual(&h, f, vn)))
        .transpose()?
        .unwrap_or(f64::INFINITY);
    Err(Error::Convergence {
        iterations: max_blocks,
        residual,
    })
}

struct WilsonRun {
    coeffs: Vec<CMatrix>,
    iterations: usize,
    tail_mass: f64,
}

/// Newton iteration for `H*H = F` on `M` circle samples of `F`, keeping the
/// analytic part of `H` up to `degree`.
fn wilson_core(
    fvals: &[CMatrix],
    degree: usize,
    start: Vec<CMatrix>,
    tol_abs: f64,
    max_iters: usize,
) -> Result<WilsonRun> {
    let m = fvals.len();
    debug_assert!(is_power_of_two(m) && degree < m / 2);
    let d = fvals[0].nrows();
    let id = identity(d);
    let mut coeffs = start;
    coeffs.resize(degree + 1, CMatrix::zeros(d, d));
    let mut tail_mass = 0.0;
    let mut best = f64::INFINITY;
    let mut stall = 0;
    for iter in 0..=max_iters {
        let mut padded = coeffs.clone();
        padded.resize(m, CMatrix::zeros(d, d));
        let hvals = idft(&padded);
        let mut residual: f64 = 0.0;
        let mut xvals = Vec::with_capacity(m);
        for (hv, fv) in hvals.iter().zip(fvals) {
            residual = residual.max(Hermitian::from_part(&(hv.adjoint() * hv - fv)).norm());
            let inv = inverse(hv).map_err(|_| Error::Degenerate("iterate lost invertibility".into()))?;
            if min_singular(hv) < 1e-13 * (1.0 + hv.norm()) {
                return Err(Error::Degenerate("iterate lost invertibility".into()));
            }
            xvals.push(inv.adjoint() * fv * inv);
        }
        if residual <= tol_abs {
            return Ok(WilsonRun {
                coeffs,
                iterations: iter,
                tail_mass,
            });
        }
        if residual < 0.9 * best {
            best = residual;
            stall = 0;
        } else {
            stall += 1;
            if stall >= 6 {
                return Err(Error::Convergence {
                    iterations: iter,
                    residual,
                });
            }
        }
        if iter == max_iters {
            return Err(Error::Convergence {
                iterations: iter,
                residual,
            });
        }
        let xhat = dft(&xvals);
        let mut g = vec![CMatrix::zeros(d, d); m];
        g[0] = hermitian_part(&(&xhat[0] + &id)).scale(0.5);
        g[1..m / 2].clone_from_slice(&xhat[1..m / 2]);
        let gvals = idft(&g);
        let prod: Vec<CMatrix> = gvals.iter().zip(&hvals).map(|(a, b)| a * b).collect();
        let phat = dft(&prod);
        tail_mass = phat[degree + 1..m / 2].iter().map(frobenius).fold(0.0, f64::max);
        coeffs = phat[..=degree].to_vec();
    }
    unreachable!("loop returns on the final iteration")
}

fn grid_size(degree: usize) -> usize {
    (16 * (degree + 1)).max(256).next_power_of_two()
}

/// Wilson's Newton iteration from `H = ||F||^{1/2} Id`, restarting from a
/// lifted symbol if an iterate loses invertibility on the circle.
pub fn factor_wilson(f: &MatrixLaurent, tol: f64, max_iters: usize) -> Result<RawFactor> {
    let m = grid_size(f.degree());
    let fvals: Vec<CMatrix> = unit_roots(m).into_iter().map(|w| hermitian_part(&f.eval(w))).collect();
    let sup = fvals.iter().map(|v| Hermitian::from_part(v).norm()).fold(0.0, f64::max);
    let d = f.dim();
    let tol_abs = 0.5 * tol * (1.0 + sup);
    let start = vec![identity(d).scale(sup.sqrt())];
    let mut restarts = 0;
    let mut lift = 1e-3 * sup;
    let mut warm = start.clone();
    loop {
        match wilson_core(&fvals, f.degree(), warm.clone(), tol_abs, max_iters) {
            Ok(run) => {
                return Ok(RawFactor {
                    h: MatrixPolynomial::new(run.coeffs)?,
                    iterations: run.iterations,
                    tail_mass: run.tail_mass,
                    restarts,
                })
            }
            Err(Error::Degenerate(_)) if restarts < 3 => {
                restarts += 1;
                let lifted: Vec<CMatrix> = fvals.iter().map(|v| v + identity(d).scale(lift)).collect();
                let run = wilson_core(&lifted, f.degree(), start.clone(), tol_abs, max_iters)?;
                warm = run.coeffs;
                lift *= 10.0;
            }
            Err(e) => return Err(e),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DualOptions {
    pub tol: f64,
    pub floor: f64,
    /// Starting truncation degree; defaults to four times the estimated band.
    pub degree: Option<usize>,
    pub max_iters: usize,
}

impl Default for DualOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            floor: DEFAULT_POSITIVITY_FLOOR,
            degree: None,
            max_iters: 80,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DualFactor {
    /// Holomorphic `H` (local coordinate) with `H* p H = Id` on the circle.
    pub h: MatrixPolynomial,
    /// `sup_j ||H(w_j)* p_j H(w_j) - Id||_2`.
    pub residual: f64,
    pub degree: usize,
    pub iterations: usize,
}

/// Largest frequency carrying relative mass above `1e-13`.
pub fn estimate_band(samples: &BoundarySamples) -> usize {
    let vals: Vec<CMatrix> = samples.values().iter().map(|v| v.as_matrix().clone()).collect();
    let hat = dft(&vals);
    let n = hat.len();
    let base = frobenius(&hat[0]).max(f64::MIN_POSITIVE);
    (1..=n / 2)
        .rev()
        .find(|&k| frobenius(&hat[k]).max(frobenius(&hat[(n - k) % n])) > 1e-13 * base)
        .unwrap_or(0)
}

/// Holomorphic `H` with `H* p H = Id` on the circle: factor `(p^{-1})^T = K*K`
/// and return `H = K^T`.
pub fn dual_boundary_factor(p: &BoundarySamples, opts: &DualOptions) -> Result<DualFactor> {
    let margin = p.psd_margin();
    let sup = p.sup_norm();
    if !(margin > opts.floor * sup) {
        return Err(Error::NotStrictlyPositive {
            margin,
            floor: opts.floor * sup,
        });
    }
    let n = p.n();
    let d = p.dim();
    let qvals: Vec<CMatrix> = p
        .values()
        .iter()
        .map(|v| inverse(v.as_matrix()).map(|m| hermitian_part(&m.transpose())))
        .collect::<Result<_>>()?;
    let qsup = qvals.iter().map(|v| Hermitian::from_part(v).norm()).fold(0.0, f64::max);
    let cap = n / 2 - 1;
    let mut degree = opts.degree.unwrap_or(4 * estimate_band(p).max(1)).clamp(1, cap);
    let tol_abs = 0.25 * opts.tol / sup;
    let start = vec![identity(d).scale(qsup.sqrt())];
    let mut last_residual;
    let mut total_iters = 0;
    loop {
        match wilson_core(&qvals, degree, start.clone(), tol_abs, opts.max_iters) {
            Ok(run) => {
                total_iters += run.iterations;
                let k = normalize_factor(&MatrixPolynomial::new(run.coeffs)?)?;
                let h = k.transpose();
                let residual = unit_roots(n)
                    .into_iter()
                    .zip(p.values())
                    .map(|(w, pv)| {
                        let hw = h.eval(w);
                        Hermitian::from_part(&(hw.adjoint() * pv.as_matrix() * &hw - identity(d))).norm()
                    })
                    .fold(0.0, f64::max);
                if residual <= opts.tol {
                    return Ok(DualFactor {
                        h,
                        residual,
                        degree,
                        iterations: total_iters,
                    });
                }
                last_residual = residual;
            }
            Err(Error::Convergence { iterations, residual }) => {
                total_iters += iterations;
                last_residual = residual;
            }
            Err(e) => return Err(e),
        }
        if degree == cap {
            return Err(Error::Convergence {
                iterations: total_iters,
                residual: last_residual,
            });
        }
        degree = (2 * degree).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::DiscSpec;
    use crate::linalg::c64;
    use approx::assert_abs_diff_eq;

    fn scalar_symbol() -> MatrixLaurent {
        MatrixLaurent::from_nonnegative(vec![
            CMatrix::from_element(1, 1, c64(2.5, 0.0)),
            CMatrix::from_element(1, 1, c64(1.0, 0.0)),
        ])
    }

    #[test]
    fn constant_symbol_gives_square_root() {
        let f = MatrixLaurent::constant(&Hermitian::from_real_diagonal(&[4.0, 1.0]));
        for method in [Method::Bauer, Method::Wilson] {
            let (h, rep) = fejer_riesz_factor(&f, &FactorOptions::with_method(method)).unwrap();
            assert_eq!(h.degree(), 0);
            assert_abs_diff_eq!(h.coeffs()[0][(0, 0)].re, 2.0, epsilon = 1e-10);
            assert_abs_diff_eq!(h.coeffs()[0][(1, 1)].re, 1.0, epsilon = 1e-10);
            assert_eq!(rep.winding, 0);
        }
        assert_eq!(factor_bauer(&f, 1e-10, 64).unwrap().iterations, 2);
    }

    #[test]
    fn scalar_quadratic_symbol() {
        let f = scalar_symbol();
        for method in [Method::Bauer, Method::Wilson] {
            let (h, rep) = fejer_riesz_factor(&f, &FactorOptions::with_method(method)).unwrap();
            assert_abs_diff_eq!(h.coeffs()[0][(0, 0)].re, 2f64.sqrt(), epsilon = 1e-9);
            assert_abs_diff_eq!(h.coeffs()[1][(0, 0)].re, 0.5f64.sqrt(), epsilon = 1e-9);
            assert!(rep.residual <= 1e-10);
        }
    }

    #[test]
    fn upper_triangular_example() {
        let f0 = CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(2.0, 0.0)]);
        let f1 = CMatrix::from_row_slice(2, 2, &[c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]);
        let f = MatrixLaurent::from_nonnegative(vec![f0, f1.clone()]);
        for method in [Method::Bauer, Method::Wilson] {
            let (h, _) = fejer_riesz_factor(&f, &FactorOptions::with_method(method)).unwrap();
            assert!(frobenius(&(&h.coeffs()[0] - identity(2))) < 1e-9);
            assert!(frobenius(&(&h.coeffs()[1] - &f1)) < 1e-9);
        }
    }

    #[test]
    fn normalization_fixes_sign_and_is_idempotent() {
        let h = MatrixPolynomial::scalar(&[c64(-(2f64.sqrt()), 0.0), c64(-(0.5f64.sqrt()), 0.0)]).unwrap();
        let n = normalize_factor(&h).unwrap();
        assert_abs_diff_eq!(n.coeffs()[0][(0, 0)].re, 2f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(n.coeffs()[1][(0, 0)].re, 0.5f64.sqrt(), epsilon = 1e-15);
        let nn = normalize_factor(&n).unwrap();
        for (a, b) in n.coeffs().iter().zip(nn.coeffs()) {
            assert!(frobenius(&(a - b)) <= 1e-12);
        }
    }

    #[test]
    fn semidefinite_symbol_is_rejected() {
        let f = MatrixLaurent::from_nonnegative(vec![
            CMatrix::from_element(1, 1, c64(2.0, 0.0)),
            CMatrix::from_element(1, 1, c64(1.0, 0.0)),
        ]);
        assert!(matches!(
            fejer_riesz_factor(&f, &FactorOptions::default()),
            Err(Error::NotStrictlyPositive { .. })
        ));
    }

    #[test]
    fn dual_factor_of_constant_and_flat_data() {
        let c = Hermitian::from_real_diagonal(&[4.0, 0.25]);
        let p = BoundarySamples::from_fn(DiscSpec::unit(), 64, |_| c.clone()).unwrap();
        let dual = dual_boundary_factor(&p, &DualOptions::default()).unwrap();
        assert_abs_diff_eq!(dual.h.coeffs()[0][(0, 0)].re, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(dual.h.coeffs()[0][(1, 1)].re, 2.0, epsilon = 1e-9);

        let p = BoundarySamples::from_fn(DiscSpec::unit(), 128, |w| {
            Hermitian::from_real_diagonal(&[(c64(1.0, 0.0) + w / 2.0).norm_sqr()])
        })
        .unwrap();
        let dual = dual_boundary_factor(&p, &DualOptions::default()).unwrap();
        assert_abs_diff_eq!(dual.h.eval(c64(0.0, 0.0))[(0, 0)].norm(), 1.0, epsilon = 1e-8);
    }
}
