//! Flat Dirichlet problem on a disc: boundary metric -> `P = H*H` with `H`
//! holomorphic and invertible, plus maximum-principle comparators.

use num_complex::Complex64;
use serde::Serialize;

use crate::cert::{CertBuilder, CertReport, Witness};
use crate::circle::{
    fejer_truncate, fourier_coefficients, schwarz_from_values, unit_roots, BoundarySamples, DiscSpec,
};
use crate::curvature::MetricField;
use crate::error::{Error, Result};
use crate::linalg::{
    frobenius, identity, inv_sqrt_pd, inverse, operator_norm, sqrt_hermitian, CMatrix, Hermitian, Psd,
};
use crate::poly::{MatrixLaurent, MatrixPolynomial};
use crate::specfact::{
    det_winding, fejer_riesz_factor, normalize_factor, validation_size, FactorOptions, FactorizationReport,
    Method, DEFAULT_POSITIVITY_FLOOR,
};

/// How boundary samples are reduced to a Laurent polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Truncation {
    /// Plain Fourier truncation when it stays strictly positive, else Fejér.
    Auto,
    Raw,
    Fejer,
}

#[derive(Clone, Debug)]
pub struct DirichletOptions {
    pub degree: usize,
    pub tol: f64,
    pub method: Method,
    pub truncation: Truncation,
    pub floor: f64,
}

impl Default for DirichletOptions {
    fn default() -> Self {
        Self {
            degree: 64,
            tol: 1e-10,
            method: Method::Bauer,
            truncation: Truncation::Auto,
            floor: DEFAULT_POSITIVITY_FLOOR,
        }
    }
}

/// `P(z) = H(w)*H(w)` with `w = (z - z0)/r` the local coordinate of `domain`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlatMetric {
    h: MatrixPolynomial,
    domain: DiscSpec,
}

impl FlatMetric {
    pub fn new(h: MatrixPolynomial, domain: DiscSpec) -> Self {
        Self { h, domain }
    }

    /// Factor in the local coordinate.
    pub fn factor(&self) -> &MatrixPolynomial {
        &self.h
    }

    pub fn domain(&self) -> &DiscSpec {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    fn local(&self, z: Complex64) -> Result<Complex64> {
        if !self.domain.contains_point(z, 1e-12) {
            return Err(Error::Domain(format!(
                "z = {:.6}{:+.6}i lies outside the metric's disc",
                z.re, z.im
            )));
        }
        Ok(self.domain.to_local(z))
    }

    /// `H` at the global point `z`.
    pub fn factor_at(&self, z: Complex64) -> Result<CMatrix> {
        Ok(self.h.eval(self.local(z)?))
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Psd> {
        Ok(Psd::from_factor(&self.factor_at(z)?))
    }

    /// Factor as a polynomial in the global coordinate.
    pub fn global_factor(&self) -> MatrixPolynomial {
        let r = self.domain.r;
        self.h.compose_affine(-self.domain.z0 / r, Complex64::new(1.0 / r, 0.0))
    }

    pub fn to_field(&self) -> MetricField {
        MetricField::flat(self.global_factor(), self.domain)
    }
}

pub fn evaluate_metric(fm: &FlatMetric, z: Complex64) -> Result<Psd> {
    fm.evaluate(z)
}

#[derive(Clone, Debug, Serialize)]
pub struct DirichletReport {
    pub degree: usize,
    pub truncation: Truncation,
    /// `max_j ||F_N(w_j) - F(w_j)||_2` over the input samples.
    pub truncation_error: f64,
    /// Smallest eigenvalue of the truncated symbol on its validation grid.
    pub truncation_margin: f64,
    pub factorization: FactorizationReport,
}

fn truncation_error(samples: &BoundarySamples, f: &MatrixLaurent) -> f64 {
    unit_roots(samples.n())
        .into_iter()
        .zip(samples.values())
        .map(|(w, v)| Hermitian::from_part(&(f.eval(w) - v.as_matrix())).norm())
        .fold(0.0, f64::max)
}

/// Boundary samples -> truncated symbol -> outer factor.
pub fn solve_dirichlet(f: &BoundarySamples, opts: &DirichletOptions) -> Result<(FlatMetric, DirichletReport)> {
    let margin = f.psd_margin();
    let floor = opts.floor * f.sup_norm();
    if !(margin > floor) {
        return Err(Error::NotStrictlyPositive { margin, floor });
    }
    let degree = opts.degree.min((f.n() - 1) / 2);
    let vn = validation_size(degree);
    let (laurent, used, tmargin) = match opts.truncation {
        Truncation::Fejer => {
            let t = fejer_truncate(f, degree, floor)?;
            (t.laurent, Truncation::Fejer, t.margin)
        }
        Truncation::Raw | Truncation::Auto => {
            let raw = fourier_coefficients(f, degree)?;
            let m = raw.min_circle_margin(vn);
            if m > floor {
                (raw, Truncation::Raw, m)
            } else if opts.truncation == Truncation::Raw {
                return Err(Error::NotStrictlyPositive { margin: m, floor });
            } else {
                let t = fejer_truncate(f, degree, floor)?;
                (t.laurent, Truncation::Fejer, t.margin)
            }
        }
    };
    let fopts = FactorOptions {
        tol: opts.tol,
        method: opts.method,
        ..FactorOptions::default()
    };
    let (h, factorization) = fejer_riesz_factor(&laurent, &fopts)?;
    let report = DirichletReport {
        degree,
        truncation: used,
        truncation_error: truncation_error(f, &laurent),
        truncation_margin: tmargin,
        factorization,
    };
    Ok((FlatMetric::new(h.trim(0.0), *f.disc()), report))
}

#[derive(Clone, Debug)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iters: usize,
    /// Largest admissible `sup ||F(1)^{-1/2} F F(1)^{-1/2} - Id||`.
    pub radius: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iters: 20,
            radius: 0.25,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct NewtonReport {
    pub iterations: usize,
    /// `max_j ||H*H - F||_2 / (1 + sup ||F||)` on the samples.
    pub residual: f64,
    /// Normalized distance of the data from the identity.
    pub distance: f64,
    pub winding: i64,
}

/// Perturbative solver: Newton steps on `h -> (Id+h)*(Id+h) - F~`, each
/// linearization inverted with the Schwarz integral.
pub fn newton_schwarz_solve(f: &BoundarySamples, opts: &NewtonOptions) -> Result<(FlatMetric, NewtonReport)> {
    let d = f.dim();
    let n = f.n();
    let id = identity(d);
    let f1 = &f.values()[0];
    let c = sqrt_hermitian(f1).into_matrix();
    let cinv = inv_sqrt_pd(f1)?.into_matrix();
    let ft: Vec<CMatrix> = f.values().iter().map(|v| &cinv * v.as_matrix() * &cinv).collect();
    let distance = ft
        .iter()
        .map(|v| Hermitian::from_part(&(v - &id)).norm())
        .fold(0.0, f64::max);
    if distance > opts.radius {
        return Err(Error::Convergence {
            iterations: 0,
            residual: distance,
        });
    }
    let scale = 1.0 + f.sup_norm();
    // values of Id + h on the sample grid
    let mut g: Vec<CMatrix> = vec![id.clone(); n];
    let mut residual = f64::INFINITY;
    for iter in 0..=opts.max_iters {
        let mut psi = Vec::with_capacity(n);
        let mut worst: f64 = 0.0;
        for (gv, fv) in g.iter().zip(&ft) {
            let phi = gv.adjoint() * gv - fv;
            let inv = inverse(gv)?;
            psi.push(Hermitian::from_part(&(-(inv.adjoint() * &phi * &inv))).into_matrix());
            let back = c.adjoint() * &phi * &c;
            worst = worst.max(Hermitian::from_part(&back).norm());
        }
        residual = worst / scale;
        if residual <= opts.tol {
            let coeffs = crate::circle::dft(&g);
            let h = MatrixPolynomial::new(coeffs[..n / 2].to_vec())?.right_mul(&c);
            let h = normalize_factor(&h)?.trim(1e-15 * (1.0 + f.sup_norm().sqrt()));
            let winding = det_winding(&h, n)?;
            if winding != 0 {
                return Err(Error::Degenerate(format!("det H winds {winding} times")));
            }
            let report = NewtonReport {
                iterations: iter,
                residual,
                distance,
                winding,
            };
            return Ok((FlatMetric::new(h, *f.disc()), report));
        }
        if iter == opts.max_iters {
            break;
        }
        let eta = schwarz_from_values(&psi);
        let mut eta_coeffs = eta.into_coeffs();
        eta_coeffs.resize(n, CMatrix::zeros(d, d));
        let eta_vals = crate::circle::idft(&eta_coeffs);
        let next: Vec<CMatrix> = g.iter().zip(&eta_vals).map(|(gv, ev)| gv + ev * gv).collect();
        // keep the analytic part below the Nyquist frequency
        let mut coeffs = crate::circle::dft(&next);
        for c in coeffs.iter_mut().skip(n / 2) {
            *c = CMatrix::zeros(d, d);
        }
        g = crate::circle::idft(&coeffs);
    }
    Err(Error::Convergence {
        iterations: opts.max_iters,
        residual,
    })
}

/// Checks `P >= Q` on the boundary circle, then reports the interior margins
/// `lambda_min(P(z) - Q(z))` over `grid`.
pub fn compare_boundary_interior(
    p: &FlatMetric,
    q: &FlatMetric,
    grid: &[Complex64],
    boundary_n: usize,
    tol: f64,
) -> Result<CertReport> {
    if p.domain() != q.domain() || p.dim() != q.dim() {
        return Err(Error::InvalidInput("metrics live on different discs or dimensions".into()));
    }
    let domain = *p.domain();
    for z in crate::circle::circle_samples(&domain, boundary_n)? {
        let pv = p.evaluate(z)?.into_hermitian();
        let qv = q.evaluate(z)?.into_hermitian();
        let m = pv.sub(&qv).min_eigenvalue();
        if m < -tol * (1.0 + pv.norm()) {
            return Err(Error::Precondition(format!(
                "boundary ordering fails at z = {:.4}{:+.4}i (margin {m:.3e})",
                z.re, z.im
            )));
        }
    }
    let mut cert = CertBuilder::new(tol);
    for &z in grid {
        let pv = p.evaluate(z)?.into_hermitian();
        let qv = q.evaluate(z)?.into_hermitian();
        let m = pv.sub(&qv).min_eigenvalue();
        cert.record(m, tol * (1.0 + pv.norm()), Witness::point(z));
    }
    Ok(cert.finish())
}

/// `max(||U*U - Id||, sup_circle ||h2 - U h1||)` with `U = h2(0) h1(0)^{-1}`.
pub fn unitary_gauge_distance(h1: &MatrixPolynomial, h2: &MatrixPolynomial) -> Result<f64> {
    if h1.dim() != h2.dim() {
        return Err(Error::InvalidInput("factors differ in dimension".into()));
    }
    let inv = inverse(&h1.coeffs()[0])
        .map_err(|_| Error::Degenerate("constant term of the first factor is singular".into()))?;
    let u = &h2.coeffs()[0] * inv;
    let unitary_defect = operator_norm(&(u.adjoint() * &u - identity(h1.dim())));
    let n = validation_size(h1.degree().max(h2.degree()));
    let gap = unit_roots(n)
        .into_iter()
        .map(|w| operator_norm(&(h2.eval(w) - &u * h1.eval(w))))
        .fold(0.0, f64::max);
    Ok(unitary_defect.max(gap))
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilityReport {
    /// Smallest `eps` with `(1-eps) F <= G <= (1+eps) F` on the samples.
    pub sandwich_eps: f64,
    /// `sup_z ||P_G(z) - P_F(z)||` over the grid.
    pub interior_change: f64,
    /// `interior_change / (sandwich_eps * sup_z ||P_F(z)||)`.
    pub constant: f64,
}

/// Measures how far the flat extensions of two boundary data sets drift apart
/// relative to their multiplicative boundary distance.
pub fn boundary_stability(
    f: &BoundarySamples,
    g: &BoundarySamples,
    opts: &DirichletOptions,
    grid: &[Complex64],
) -> Result<StabilityReport> {
    if f.n() != g.n() || f.disc() != g.disc() {
        return Err(Error::InvalidInput("boundary data sets differ in layout".into()));
    }
    let mut sandwich_eps: f64 = 0.0;
    for (a, b) in f.values().iter().zip(g.values()) {
        let ainv = inv_sqrt_pd(a)?.into_matrix();
        let rel = Hermitian::from_part(&(&ainv * b.as_matrix() * &ainv));
        let eig = rel.eigenvalues();
        sandwich_eps = sandwich_eps.max((1.0 - eig[0]).abs()).max((eig[eig.len() - 1] - 1.0).abs());
    }
    let (pf, _) = solve_dirichlet(f, opts)?;
    let (pg, _) = solve_dirichlet(g, opts)?;
    let mut change: f64 = 0.0;
    let mut size: f64 = 0.0;
    for &z in grid {
        let a = pf.evaluate(z)?.into_hermitian();
        let b = pg.evaluate(z)?.into_hermitian();
        change = change.max(b.sub(&a).norm());
        size = size.max(a.norm());
    }
    let constant = if sandwich_eps > 0.0 {
        change / (sandwich_eps * size)
    } else {
        0.0
    };
    Ok(StabilityReport {
        sandwich_eps,
        interior_change: change,
        constant,
    })
}

/// Largest coefficient-norm gap between two factors.
pub fn coefficient_distance(a: &MatrixPolynomial, b: &MatrixPolynomial) -> f64 {
    let len = a.coeffs().len().max(b.coeffs().len());
    let zero = CMatrix::zeros(a.dim(), a.dim());
    (0..len)
        .map(|k| frobenius(&(a.coeffs().get(k).unwrap_or(&zero) - b.coeffs().get(k).unwrap_or(&zero))))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;
    use approx::assert_abs_diff_eq;

    fn scalar(x: f64) -> Hermitian {
        Hermitian::from_real_diagonal(&[x])
    }

    #[test]
    fn constant_boundary() {
        let c = Hermitian::from_real_diagonal(&[4.0, 9.0]);
        let f = BoundarySamples::from_fn(DiscSpec::unit(), 64, |_| c.clone()).unwrap();
        let (fm, rep) = solve_dirichlet(&f, &DirichletOptions::default()).unwrap();
        assert_eq!(rep.truncation, Truncation::Raw);
        let p = fm.evaluate(c64(0.3, 0.1)).unwrap();
        assert!(frobenius(&(p.as_matrix() - c.as_matrix())) < 1e-10);
    }

    #[test]
    fn scalar_closed_form() {
        let f = BoundarySamples::from_fn(DiscSpec::unit(), 256, |z| scalar(1.25 + z.re)).unwrap();
        let (fm, _) = solve_dirichlet(&f, &DirichletOptions::default()).unwrap();
        assert_abs_diff_eq!(fm.evaluate(c64(0.6, 0.0)).unwrap().as_matrix()[(0, 0)].re, 1.69, epsilon = 1e-9);
        assert_abs_diff_eq!(fm.evaluate(c64(0.0, 0.0)).unwrap().as_matrix()[(0, 0)].re, 1.0, epsilon = 1e-9);
        assert!(matches!(fm.evaluate(c64(1.5, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn fejer_path_keeps_positivity() {
        let f = BoundarySamples::from_fn(DiscSpec::unit(), 256, |z| scalar(1.25 + z.re)).unwrap();
        let opts = DirichletOptions {
            truncation: Truncation::Fejer,
            degree: 16,
            ..DirichletOptions::default()
        };
        let (_, rep) = solve_dirichlet(&f, &opts).unwrap();
        assert!(rep.truncation_margin > 0.0);
        assert!(rep.truncation_error > 1e-3);
    }

    #[test]
    fn newton_schwarz_matches_direct_solver() {
        let f = BoundarySamples::from_fn(DiscSpec::unit(), 128, |z| scalar(1.0 + 0.1 * z.re)).unwrap();
        let (a, rep) = newton_schwarz_solve(&f, &NewtonOptions::default()).unwrap();
        assert!(rep.residual <= 1e-10);
        let (b, _) = solve_dirichlet(&f, &DirichletOptions::default()).unwrap();
        assert!(unitary_gauge_distance(b.factor(), a.factor()).unwrap() < 1e-8);
        let far = BoundarySamples::from_fn(DiscSpec::unit(), 64, |z| scalar(2.0 + 1.5 * z.re)).unwrap();
        assert!(matches!(
            newton_schwarz_solve(&far, &NewtonOptions::default()),
            Err(Error::Convergence { .. })
        ));
    }

    #[test]
    fn gauge_distance_examples() {
        let h = MatrixPolynomial::scalar(&[c64(1.0, 0.0), c64(0.5, 0.0)]).unwrap();
        assert_abs_diff_eq!(unitary_gauge_distance(&h, &h.scale(c64(2.0, 0.0))).unwrap(), 3.0, epsilon = 1e-12);
        let u = h.scale(c64(0.0, 1.0));
        assert!(unitary_gauge_distance(&h, &u).unwrap() < 1e-12);
    }

    #[test]
    fn comparator() {
        let unit = DiscSpec::unit();
        let p = FlatMetric::new(MatrixPolynomial::scalar(&[c64(1.0, 0.0), c64(0.5, 0.0)]).unwrap(), unit);
        let q = FlatMetric::new(MatrixPolynomial::scalar(&[c64(0.5, 0.0)]).unwrap(), unit);
        let grid = crate::circle::polar_grid(&unit, 5, 12, 1.0);
        let rep = compare_boundary_interior(&p, &q, &grid, 256, 1e-9).unwrap();
        assert!(rep.passed);
        assert!(rep.worst_margin >= -1e-12);
        assert!(matches!(
            compare_boundary_interior(&q, &p, &grid, 256, 1e-9),
            Err(Error::Precondition(_))
        ));
    }
}
