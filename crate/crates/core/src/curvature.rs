//! Closed-form metric fields `z -> P(z)` with exact `z`/`zbar` derivatives,
//! the curvature defect `P_{z zbar} - P_zbar P^{-1} P_z`, finite-difference
//! cross-checks and the subharmonicity oracles.

use num_complex::Complex64;
use serde::Serialize;

use crate::cert::{CertBuilder, CertReport, Witness};
use crate::circle::{circle_samples, DiscSpec};
use crate::error::{Error, Result};
use crate::linalg::{c64, inv_sqrt_pd, operator_norm, solve, sqrt_hermitian, CMatrix, Hermitian};
use crate::poly::{quadratic_form, MatrixPolynomial, VectorPolynomial};

/// `P` with its first and mixed second derivatives at one point.
#[derive(Clone, Debug)]
pub struct MetricJet {
    pub p: Hermitian,
    pub pz: CMatrix,
    pub pzb: CMatrix,
    pub pzzb: Hermitian,
}

impl MetricJet {
    pub fn zeros(dim: usize) -> Self {
        Self {
            p: Hermitian::zeros(dim),
            pz: CMatrix::zeros(dim, dim),
            pzb: CMatrix::zeros(dim, dim),
            pzzb: Hermitian::zeros(dim),
        }
    }

    /// Jet of `H*H` from `H(z)` and `H'(z)` for holomorphic `H`.
    pub fn from_factor(h: &CMatrix, dh: &CMatrix) -> Self {
        Self {
            p: Hermitian::from_part(&(h.adjoint() * h)),
            pz: h.adjoint() * dh,
            pzb: dh.adjoint() * h,
            pzzb: Hermitian::from_part(&(dh.adjoint() * dh)),
        }
    }

    fn accumulate(&mut self, other: &MetricJet) {
        self.p = self.p.add(&other.p);
        self.pz += &other.pz;
        self.pzb += &other.pzb;
        self.pzzb = self.pzzb.add(&other.pzzb);
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FieldKind {
    /// `sum_i H_i*H_i`.
    FlatSum(Vec<MatrixPolynomial>),
    /// `((sum_i H_i*H_i)^T)^{-1}`.
    DualFlatSum(Vec<MatrixPolynomial>),
    Constant(Hermitian),
    /// Block-diagonal combination of fields.
    DirectSum(Vec<MetricField>),
    /// `K* P K` for a holomorphic gauge `K`.
    Gauged {
        inner: Box<MetricField>,
        gauge: MatrixPolynomial,
    },
}

/// A metric field on a closed disc, given in global coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricField {
    kind: FieldKind,
    domain: DiscSpec,
    dim: usize,
}

fn common_dim(terms: &[MatrixPolynomial]) -> Result<usize> {
    let Some(first) = terms.first() else {
        return Err(Error::InvalidInput("field needs at least one term".into()));
    };
    if terms.iter().any(|t| t.dim() != first.dim()) {
        return Err(Error::InvalidInput("field terms differ in dimension".into()));
    }
    Ok(first.dim())
}

impl MetricField {
    pub fn flat_sum(terms: Vec<MatrixPolynomial>, domain: DiscSpec) -> Result<Self> {
        let dim = common_dim(&terms)?;
        Ok(Self {
            kind: FieldKind::FlatSum(terms),
            domain,
            dim,
        })
    }

    /// Single-term flat field `H*H`.
    pub fn flat(h: MatrixPolynomial, domain: DiscSpec) -> Self {
        let dim = h.dim();
        Self {
            kind: FieldKind::FlatSum(vec![h]),
            domain,
            dim,
        }
    }

    /// Requires the inner sum to be invertible on a grid covering the domain.
    pub fn dual_flat_sum(terms: Vec<MatrixPolynomial>, domain: DiscSpec) -> Result<Self> {
        let dim = common_dim(&terms)?;
        let inner = Self::flat_sum(terms.clone(), domain)?;
        let mut pts = crate::circle::polar_grid(&domain, 8, 32, 1.0);
        pts.extend(circle_samples(&domain, 64)?);
        for z in pts {
            let s = inner.raw_jet(z)?.p;
            if s.min_eigenvalue() <= 1e-12 * (1.0 + s.norm()) {
                return Err(Error::Degenerate(format!(
                    "inner sum is singular near z = {:.4}{:+.4}i",
                    z.re, z.im
                )));
            }
        }
        Ok(Self {
            kind: FieldKind::DualFlatSum(terms),
            domain,
            dim,
        })
    }

    pub fn constant(value: Hermitian, domain: DiscSpec) -> Result<Self> {
        if value.min_eigenvalue() < -crate::linalg::DEFAULT_PSD_TOL * (1.0 + value.norm()) {
            return Err(Error::InvalidInput("constant metric must be PSD".into()));
        }
        let dim = value.dim();
        Ok(Self {
            kind: FieldKind::Constant(value),
            domain,
            dim,
        })
    }

    pub fn direct_sum(parts: Vec<MetricField>, domain: DiscSpec) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidInput("direct sum needs parts".into()));
        }
        let dim = parts.iter().map(|p| p.dim).sum();
        Ok(Self {
            kind: FieldKind::DirectSum(parts),
            domain,
            dim,
        })
    }

    pub fn gauged(inner: MetricField, gauge: MatrixPolynomial) -> Result<Self> {
        if gauge.dim() != inner.dim {
            return Err(Error::InvalidInput("gauge dimension differs from the field".into()));
        }
        let domain = inner.domain;
        let dim = inner.dim;
        Ok(Self {
            kind: FieldKind::Gauged {
                inner: Box::new(inner),
                gauge,
            },
            domain,
            dim,
        })
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn variant_name(&self) -> &'static str {
        match self.kind {
            FieldKind::FlatSum(_) => "flat_sum",
            FieldKind::DualFlatSum(_) => "dual_flat_sum",
            FieldKind::Constant(_) => "constant",
            FieldKind::DirectSum(_) => "direct_sum",
            FieldKind::Gauged { .. } => "gauged",
        }
    }

    pub fn domain(&self) -> &DiscSpec {
        &self.domain
    }

    pub fn with_domain(mut self, domain: DiscSpec) -> Self {
        self.domain = domain;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_domain(&self, z: Complex64) -> Result<()> {
        if self.domain.contains_point(z, 1e-12) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "z = {:.6}{:+.6}i lies outside the disc of radius {} about {:.4}{:+.4}i",
                z.re, z.im, self.domain.r, self.domain.z0.re, self.domain.z0.im
            )))
        }
    }

    /// Exact `(P, P_z, P_zbar, P_{z zbar})` at `z`.
    pub fn jet(&self, z: Complex64) -> Result<MetricJet> {
        self.check_domain(z)?;
        self.raw_jet(z)
    }

    pub fn value(&self, z: Complex64) -> Result<Hermitian> {
        self.check_domain(z)?;
        self.raw_value(z)
    }

    pub(crate) fn raw_value(&self, z: Complex64) -> Result<Hermitian> {
        match &self.kind {
            FieldKind::FlatSum(terms) => {
                let mut acc = CMatrix::zeros(self.dim, self.dim);
                for h in terms {
                    let v = h.eval(z);
                    acc += v.adjoint() * v;
                }
                Ok(Hermitian::from_part(&acc))
            }
            FieldKind::Constant(c) => Ok(c.clone()),
            _ => Ok(self.raw_jet(z)?.p),
        }
    }

    fn raw_jet(&self, z: Complex64) -> Result<MetricJet> {
        match &self.kind {
            FieldKind::FlatSum(terms) => {
                let mut jet = MetricJet::zeros(self.dim);
                for h in terms {
                    let (v, d) = h.eval_with_derivative(z);
                    jet.accumulate(&MetricJet::from_factor(&v, &d));
                }
                Ok(jet)
            }
            FieldKind::DualFlatSum(terms) => {
                let mut s = MetricJet::zeros(self.dim);
                for h in terms {
                    let (v, d) = h.eval_with_derivative(z);
                    s.accumulate(&MetricJet::from_factor(&v, &d));
                }
                dual_jet(&s)
            }
            FieldKind::Constant(c) => {
                let mut jet = MetricJet::zeros(self.dim);
                jet.p = c.clone();
                Ok(jet)
            }
            FieldKind::DirectSum(parts) => {
                let mut p = CMatrix::zeros(self.dim, self.dim);
                let mut pz = p.clone();
                let mut pzb = p.clone();
                let mut pzzb = p.clone();
                let mut at = 0;
                for part in parts {
                    let j = part.raw_jet(z)?;
                    let k = part.dim;
                    p.view_mut((at, at), (k, k)).copy_from(j.p.as_matrix());
                    pz.view_mut((at, at), (k, k)).copy_from(&j.pz);
                    pzb.view_mut((at, at), (k, k)).copy_from(&j.pzb);
                    pzzb.view_mut((at, at), (k, k)).copy_from(j.pzzb.as_matrix());
                    at += k;
                }
                Ok(MetricJet {
                    p: Hermitian::from_part(&p),
                    pz,
                    pzb,
                    pzzb: Hermitian::from_part(&pzzb),
                })
            }
            FieldKind::Gauged { inner, gauge } => {
                let j = inner.raw_jet(z)?;
                let (k, dk) = gauge.eval_with_derivative(z);
                let ks = k.adjoint();
                let dks = dk.adjoint();
                let p = j.p.as_matrix();
                let pzzb = &ks * j.pzzb.as_matrix() * &k
                    + &dks * &j.pz * &k
                    + &dks * p * &dk
                    + &ks * &j.pzb * &dk;
                Ok(MetricJet {
                    p: j.p.congruence(&k),
                    pz: &ks * &j.pz * &k + &ks * p * &dk,
                    pzb: &dks * p * &k + &ks * &j.pzb * &k,
                    pzzb: Hermitian::from_part(&pzzb),
                })
            }
        }
    }

    /// The inner flat sum of a dual field.
    pub fn dual_inner(&self) -> Option<MetricField> {
        match &self.kind {
            FieldKind::DualFlatSum(terms) => Some(MetricField {
                kind: FieldKind::FlatSum(terms.clone()),
                domain: self.domain,
                dim: self.dim,
            }),
            _ => None,
        }
    }

    /// The dual partner of a flat sum (and vice versa).
    pub fn dual_partner(&self) -> Result<MetricField> {
        match &self.kind {
            FieldKind::FlatSum(terms) => MetricField::dual_flat_sum(terms.clone(), self.domain),
            FieldKind::DualFlatSum(terms) => MetricField::flat_sum(terms.clone(), self.domain),
            _ => Err(Error::InvalidInput("only flat and dual flat sums have partners".into())),
        }
    }
}

/// Jet of `Q = (S^T)^{-1}` from the jet of `S`.
fn dual_jet(s: &MetricJet) -> Result<MetricJet> {
    let r = s.p.transpose();
    if r.min_eigenvalue() <= 1e-14 * (1.0 + r.norm()) {
        return Err(Error::Degenerate("inner sum is singular".into()));
    }
    let q = Hermitian::from_part(&crate::linalg::inverse(r.as_matrix())?);
    let qm = q.as_matrix();
    let rz = s.pz.transpose();
    let rzb = s.pzb.transpose();
    let rzzb = s.pzzb.as_matrix().transpose();
    let qz = -(qm * &rz * qm);
    let qzb = -(qm * &rzb * qm);
    let qzzb = qm * &rzb * qm * &rz * qm - qm * &rzzb * qm + qm * &rz * qm * &rzb * qm;
    Ok(MetricJet {
        p: q,
        pz: qz,
        pzb: qzb,
        pzzb: Hermitian::from_part(&qzzb),
    })
}

#[derive(Clone, Debug)]
pub struct CurvatureSample {
    pub z: Complex64,
    /// `P_{z zbar} - P_zbar P^{-1} P_z`.
    pub defect_neg: Hermitian,
    /// `P_zbar P^{-1} P_z - P_{z zbar}`.
    pub defect_pos: Hermitian,
    pub margin_neg: f64,
    pub margin_pos: f64,
    /// `||P_{z zbar}|| + ||P_zbar P^{-1} P_z||`, the size of the cancelling terms.
    pub scale: f64,
}

impl CurvatureSample {
    pub fn is_seminegative(&self, tol: f64) -> bool {
        self.margin_neg >= -tol * (1.0 + self.scale)
    }

    pub fn is_semipositive(&self, tol: f64) -> bool {
        self.margin_pos >= -tol * (1.0 + self.scale)
    }
}

/// Curvature defect from a jet.
pub fn defect_from_jet(z: Complex64, jet: &MetricJet) -> Result<CurvatureSample> {
    let p = &jet.p;
    if p.min_eigenvalue() <= 1e-14 * (1.0 + p.norm()) {
        return Err(Error::Degenerate(format!(
            "metric is singular at z = {:.4}{:+.4}i",
            z.re, z.im
        )));
    }
    let quad = Hermitian::from_part(&(&jet.pzb * solve(p.as_matrix(), &jet.pz)?));
    let defect_neg = jet.pzzb.sub(&quad);
    let defect_pos = defect_neg.scale(-1.0);
    let (eig, _) = defect_neg.eigh();
    Ok(CurvatureSample {
        z,
        margin_neg: eig[0],
        margin_pos: -eig[eig.len() - 1],
        defect_neg,
        defect_pos,
        scale: jet.pzzb.norm() + quad.norm(),
    })
}

pub fn derivatives_exact(field: &MetricField, z: Complex64) -> Result<MetricJet> {
    field.jet(z)
}

pub fn curvature_defect(field: &MetricField, z: Complex64) -> Result<CurvatureSample> {
    defect_from_jet(z, &field.jet(z)?)
}

/// Default finite-difference step: `eps^{1/4}` times the local scale, clipped
/// so the stencil stays in the domain.
pub fn default_fd_step(field: &MetricField, z: Complex64) -> f64 {
    let room = field.domain().r - (z - field.domain().z0).norm();
    (f64::EPSILON.powf(0.25) * (1.0 + z.norm())).min(0.5 * room)
}

/// Second-order central differences for `P_z`, `P_zbar` and the 5-point
/// Laplacian for `P_{z zbar}`.
pub fn fd_jet(field: &MetricField, z: Complex64, step: f64) -> Result<MetricJet> {
    let room = field.domain().r - (z - field.domain().z0).norm();
    if !(step > 0.0) || room < 2.0 * step * (1.0 - 1e-12) {
        return Err(Error::Domain(format!(
            "finite-difference step {step} needs distance {} to the boundary, have {room}",
            2.0 * step
        )));
    }
    let h = c64(step, 0.0);
    let ih = c64(0.0, step);
    let p0 = field.raw_value(z)?;
    let pe = field.raw_value(z + h)?;
    let pw = field.raw_value(z - h)?;
    let pn = field.raw_value(z + ih)?;
    let ps = field.raw_value(z - ih)?;
    let px = (pe.as_matrix() - pw.as_matrix()) / c64(2.0 * step, 0.0);
    let py = (pn.as_matrix() - ps.as_matrix()) / c64(2.0 * step, 0.0);
    let i = c64(0.0, 1.0);
    let pz = (&px - &py * i) * c64(0.5, 0.0);
    let pzb = (&px + &py * i) * c64(0.5, 0.0);
    let lap = (pe.as_matrix() + pw.as_matrix() + pn.as_matrix() + ps.as_matrix() - p0.as_matrix() * c64(4.0, 0.0))
        / c64(step * step, 0.0);
    Ok(MetricJet {
        p: p0,
        pz,
        pzb,
        pzzb: Hermitian::from_part(&(lap * c64(0.25, 0.0))),
    })
}

pub fn curvature_fd(field: &MetricField, z: Complex64, step: f64) -> Result<CurvatureSample> {
    defect_from_jet(z, &fd_jet(field, z, step)?)
}

/// `err(step) / err(step/2)` for the finite-difference defect against the exact one.
pub fn richardson_ratio(field: &MetricField, z: Complex64, step: f64) -> Result<f64> {
    let exact = curvature_defect(field, z)?.defect_neg;
    let e1 = operator_norm(curvature_fd(field, z, step)?.defect_neg.sub(&exact).as_matrix());
    let e2 = operator_norm(curvature_fd(field, z, step / 2.0)?.defect_neg.sub(&exact).as_matrix());
    Ok(e1 / e2)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CurvatureClass {
    Flat,
    Seminegative,
    Semipositive,
    Indefinite,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub class: CurvatureClass,
    pub worst_neg: f64,
    pub worst_neg_at: [f64; 2],
    pub worst_pos: f64,
    pub worst_pos_at: [f64; 2],
    pub checked: usize,
}

pub fn classify_field(field: &MetricField, grid: &[Complex64], tol: f64) -> Result<Classification> {
    let mut neg_ok = true;
    let mut pos_ok = true;
    let mut worst_neg = (f64::INFINITY, [0.0, 0.0]);
    let mut worst_pos = (f64::INFINITY, [0.0, 0.0]);
    for &z in grid {
        let s = curvature_defect(field, z)?;
        neg_ok &= s.is_seminegative(tol);
        pos_ok &= s.is_semipositive(tol);
        if s.margin_neg < worst_neg.0 {
            worst_neg = (s.margin_neg, [z.re, z.im]);
        }
        if s.margin_pos < worst_pos.0 {
            worst_pos = (s.margin_pos, [z.re, z.im]);
        }
    }
    let class = match (neg_ok, pos_ok) {
        (true, true) => CurvatureClass::Flat,
        (true, false) => CurvatureClass::Seminegative,
        (false, true) => CurvatureClass::Semipositive,
        (false, false) => CurvatureClass::Indefinite,
    };
    Ok(Classification {
        class,
        worst_neg: worst_neg.0,
        worst_neg_at: worst_neg.1,
        worst_pos: worst_pos.0,
        worst_pos_at: worst_pos.1,
        checked: grid.len(),
    })
}

fn require_inside(field: &MetricField, disc: &DiscSpec) -> Result<()> {
    if field.domain().contains_disc(disc, 1e-12) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "disc of radius {} about {:.4}{:+.4}i leaves the field's domain",
            disc.r, disc.z0.re, disc.z0.im
        )))
    }
}

/// Circle average of `<P phi, phi>` against its value at the center.
pub fn subharmonicity_margin(field: &MetricField, phi: &VectorPolynomial, disc: &DiscSpec, n: usize) -> Result<(f64, f64)> {
    require_inside(field, disc)?;
    let u = |z: Complex64| -> Result<f64> { Ok(quadratic_form(field.raw_value(z)?.as_matrix(), &phi.eval(z))) };
    let center = u(disc.z0)?;
    let mut avg = 0.0;
    let pts = circle_samples(disc, n)?;
    for &z in &pts {
        avg += u(z)?;
    }
    avg /= pts.len() as f64;
    Ok((avg - center, center))
}

/// Sub-mean-value test of `<P phi, phi>` on each disc.
pub fn subharmonicity_test(
    field: &MetricField,
    phi: &VectorPolynomial,
    discs: &[DiscSpec],
    n: usize,
    tol: f64,
) -> Result<CertReport> {
    subharmonicity_suite(field, std::slice::from_ref(phi), discs, n, tol)
}

/// [`subharmonicity_test`] for several test vectors at once; `P` is sampled
/// once per disc.
pub fn subharmonicity_suite(
    field: &MetricField,
    phis: &[VectorPolynomial],
    discs: &[DiscSpec],
    n: usize,
    tol: f64,
) -> Result<CertReport> {
    if phis.iter().any(|phi| phi.dim() != field.dim()) {
        return Err(Error::InvalidInput("test vector dimension differs from the field".into()));
    }
    let mut cert = CertBuilder::new(tol);
    for disc in discs {
        require_inside(field, disc)?;
        let pts = circle_samples(disc, n)?;
        let values: Vec<Hermitian> = pts.iter().map(|&z| field.raw_value(z)).collect::<Result<_>>()?;
        let p0 = field.raw_value(disc.z0)?;
        for phi in phis {
            let center = quadratic_form(p0.as_matrix(), &phi.eval(disc.z0));
            let avg = pts
                .iter()
                .zip(&values)
                .map(|(&z, p)| quadratic_form(p.as_matrix(), &phi.eval(z)))
                .sum::<f64>()
                / n as f64;
            cert.record(avg - center, tol * (1.0 + center.abs()), Witness::disc(disc));
        }
    }
    Ok(cert.finish())
}

/// `||Q^{1/2} A P^{-1/2}||_2` at `z`.
pub fn hom_norm(p: &MetricField, q: &MetricField, a: &MatrixPolynomial, z: Complex64) -> Result<f64> {
    let pv = p.value(z)?;
    let qv = q.value(z)?;
    let x = sqrt_hermitian(&qv).into_matrix() * a.eval(z) * inv_sqrt_pd(&pv)?.into_matrix();
    Ok(operator_norm(&x))
}

/// Sub-mean-value test for `log ||Q^{1/2} A P^{-1/2}||` with `A: (V, P) -> (W, Q)`.
pub fn log_norm_psh_test(
    p: &MetricField,
    q: &MetricField,
    a: &MatrixPolynomial,
    discs: &[DiscSpec],
    n: usize,
    tol: f64,
) -> Result<CertReport> {
    if a.dim() != p.dim() || a.dim() != q.dim() {
        return Err(Error::InvalidInput("homomorphism and metrics differ in dimension".into()));
    }
    let mut cert = CertBuilder::new(tol);
    for disc in discs {
        require_inside(p, disc)?;
        require_inside(q, disc)?;
        let center = hom_norm(p, q, a, disc.z0)?.ln();
        let pts = circle_samples(disc, n)?;
        let mut avg = 0.0;
        for &z in &pts {
            avg += hom_norm(p, q, a, z)?.ln();
        }
        avg /= pts.len() as f64;
        cert.record(avg - center, tol * (1.0 + center.abs()), Witness::disc(disc));
    }
    Ok(cert.finish())
}
