//! Circle means of a metric: the moment block, its Schur complement and the
//! gauge-covariant mean, with the curvature-sign certificates built on them.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cert::{CertBuilder, CertReport, Witness};
use crate::circle::{average_moments, circle_samples, BoundarySamples, DiscSpec};
use crate::curvature::MetricField;
use crate::error::{Error, Result};
use crate::linalg::{
    c64, inverse, schur_complement_limit, BlockMatrix2x2, CVector, Hermitian, Psd, SchurLimitConfig,
    DEFAULT_PSD_TOL,
};
use crate::poly::{MatrixPolynomial, VectorPolynomial};
use crate::specfact::{dual_boundary_factor, DualOptions};

/// Default quadrature size for circle means.
pub const DEFAULT_MEAN_SAMPLES: usize = 256;

/// `[[avg P|dz|, r avg P dz], [r avg P dzbar, r^2 avg P|dz|]]`.
#[derive(Clone, Debug)]
pub struct MeanBlock {
    pub disc: DiscSpec,
    pub block: BlockMatrix2x2,
}

pub fn sample_field(field: &MetricField, disc: &DiscSpec, n: usize) -> Result<BoundarySamples> {
    if !field.domain().contains_disc(disc, 1e-12) {
        return Err(Error::Domain(format!(
            "disc of radius {} about {:.4}{:+.4}i leaves the field's domain",
            disc.r, disc.z0.re, disc.z0.im
        )));
    }
    let values = circle_samples(disc, n)?
        .into_iter()
        .map(|z| field.raw_value(z))
        .collect::<Result<Vec<_>>>()?;
    BoundarySamples::new(*disc, values)
}

pub fn mean_block_from_samples(samples: &BoundarySamples) -> MeanBlock {
    let m = average_moments(samples);
    let r = samples.disc().r;
    let block = BlockMatrix2x2 {
        a: m.m0.clone(),
        b: m.mplus.scale(r),
        c: m.m0.scale(r * r),
    };
    MeanBlock {
        disc: *samples.disc(),
        block,
    }
}

pub fn mean_block(field: &MetricField, disc: &DiscSpec, n: usize) -> Result<MeanBlock> {
    Ok(mean_block_from_samples(&sample_field(field, disc, n)?))
}

/// `S(P, z0, r) = avg P|dz| - avg P dz (avg P|dz|)^{-1} avg P dzbar`.
#[derive(Clone, Debug)]
pub struct SchurMean {
    pub disc: DiscSpec,
    pub value: Hermitian,
    /// Spread of the `t -> 0` extrapolation.
    pub t_diagnostic: f64,
}

pub fn schur_mean_from_samples(samples: &BoundarySamples) -> Result<SchurMean> {
    let m = average_moments(samples);
    let c = Psd::new(m.m0.clone(), DEFAULT_PSD_TOL)?;
    let lim = schur_complement_limit(&m.m0, &m.mplus, &c, &SchurLimitConfig::default())?;
    Ok(SchurMean {
        disc: *samples.disc(),
        value: lim.value,
        t_diagnostic: lim.spread,
    })
}

pub fn schur_mean(field: &MetricField, disc: &DiscSpec, n: usize) -> Result<SchurMean> {
    schur_mean_from_samples(&sample_field(field, disc, n)?)
}

/// Both forms of the seminegativity test on one disc.
#[derive(Clone, Debug)]
pub struct DiscCheck {
    pub disc: DiscSpec,
    /// `lambda_min([[m0 - P(z0), mplus], [mminus, m0]])`.
    pub block_margin: f64,
    /// Eigenvector of the block margin, split as `(u, v)`.
    pub block_witness: (CVector, CVector),
    /// `lambda_min(S - P(z0))`.
    pub schur_margin: f64,
    pub scale: f64,
}

pub fn seminegative_disc_check(field: &MetricField, disc: &DiscSpec, n: usize) -> Result<DiscCheck> {
    let samples = sample_field(field, disc, n)?;
    let p0 = field.value(disc.z0)?;
    let m = average_moments(&samples);
    let block = BlockMatrix2x2 {
        a: m.m0.sub(&p0),
        b: m.mplus.clone(),
        c: m.m0.clone(),
    };
    let (eig, vecs) = block.assemble().eigh();
    let d = field.dim();
    let v0 = vecs.column(0);
    let u = CVector::from_iterator(d, v0.iter().take(d).copied());
    let v = CVector::from_iterator(d, v0.iter().skip(d).copied());
    let schur = schur_mean_from_samples(&samples)?;
    Ok(DiscCheck {
        disc: *disc,
        block_margin: eig[0],
        block_witness: (u, v),
        schur_margin: schur.value.sub(&p0).min_eigenvalue(),
        scale: p0.norm() + m.m0.norm(),
    })
}

/// Holomorphic test vector `phi(z) = u + i v (z - z0)/r` realizing a block margin.
pub fn witness_vector(check: &DiscCheck) -> Result<VectorPolynomial> {
    let (u, v) = &check.block_witness;
    let i_over_r = c64(0.0, 1.0 / check.disc.r);
    let lin = v * i_over_r;
    let constant = u - &lin * check.disc.z0;
    VectorPolynomial::new(vec![constant, lin])
}

/// Block form and Schur form of the sub-mean-value inequality on every disc.
pub fn certify_seminegative(field: &MetricField, discs: &[DiscSpec], n: usize, tol: f64) -> Result<CertReport> {
    let checks: Vec<DiscCheck> = discs
        .par_iter()
        .map(|d| seminegative_disc_check(field, d, n))
        .collect::<Result<_>>()?;
    let mut block = CertBuilder::new(tol);
    let mut schur = CertBuilder::new(tol);
    let mut agree = true;
    for c in &checks {
        let slack = tol * (1.0 + c.scale);
        block.record(c.block_margin, slack, Witness::disc(&c.disc));
        schur.record(c.schur_margin, slack, Witness::disc(&c.disc));
        agree &= forms_agree(c.block_margin, c.schur_margin, slack);
    }
    let schur = schur.finish();
    let mut report = block.finish();
    report.passed = report.passed && schur.passed;
    report.alt_margin = Some(schur.worst_margin);
    report.forms_agree = Some(agree);
    Ok(report)
}

/// Same verdict for two margins, treating values within `band` of zero as ties.
pub fn forms_agree(a: f64, b: f64, band: f64) -> bool {
    let pass_a = a >= -band;
    let pass_b = b >= -band;
    pass_a == pass_b || a.abs() <= band + 1e-8 || b.abs() <= band + 1e-8
}

/// Schur means along a radial profile about `z0`.
pub fn radial_profile(field: &MetricField, z0: Complex64, radii: &[f64], n: usize) -> Result<Vec<SchurMean>> {
    radii
        .par_iter()
        .map(|&r| schur_mean(field, &DiscSpec::new(z0, r)?, n))
        .collect()
}

/// `S(P, z0, r)` nondecreasing along ascending radii.
pub fn monotonicity_check(field: &MetricField, z0: Complex64, radii: &[f64], n: usize, tol: f64) -> Result<CertReport> {
    if radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("radii must be strictly ascending".into()));
    }
    let means = radial_profile(field, z0, radii, n)?;
    let mut cert = CertBuilder::new(tol);
    for pair in means.windows(2) {
        let m = pair[1].value.sub(&pair[0].value).min_eigenvalue();
        cert.record(m, tol * (1.0 + pair[1].value.norm()), Witness::disc(&pair[1].disc));
    }
    Ok(cert.finish())
}

/// Convexity of `t -> S(P, z0, e^t)` in hermitian order on consecutive triples.
pub fn three_circles_convexity(field: &MetricField, z0: Complex64, radii: &[f64], n: usize, tol: f64) -> Result<CertReport> {
    if radii.len() < 3 || radii.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("need at least three strictly ascending radii".into()));
    }
    let means = radial_profile(field, z0, radii, n)?;
    let mut cert = CertBuilder::new(tol);
    for (j, tri) in means.windows(3).enumerate() {
        let (t1, t2, t3) = (radii[j].ln(), radii[j + 1].ln(), radii[j + 2].ln());
        let lam = (t3 - t2) / (t3 - t1);
        let chord = tri[0].value.scale(lam).add(&tri[2].value.scale(1.0 - lam));
        let m = chord.sub(&tri[1].value).min_eigenvalue();
        cert.record(m, tol * (1.0 + chord.norm()), Witness::disc(&tri[1].disc));
    }
    Ok(cert.finish())
}

/// `||S(r) - P(z0)|| / ||S(r/2) - P(z0)||`, close to 4 when `S` approaches
/// `P(z0)` at rate `r^2`.
pub fn schur_richardson_ratio(field: &MetricField, z0: Complex64, r: f64, n: usize) -> Result<f64> {
    let p0 = field.value(z0)?;
    let e1 = schur_mean(field, &DiscSpec::new(z0, r)?, n)?.value.sub(&p0).norm();
    let e2 = schur_mean(field, &DiscSpec::new(z0, r / 2.0)?, n)?.value.sub(&p0).norm();
    if e2 == 0.0 {
        return Err(Error::Degenerate("Schur mean equals the center value; no rate to measure".into()));
    }
    Ok(e1 / e2)
}

/// `T(P, z0, r) = H(z0)^{*-1} H(z0)^{-1}` for the boundary factor with `H*PH = Id`.
#[derive(Clone, Debug)]
pub struct GaugeMean {
    pub disc: DiscSpec,
    pub value: Hermitian,
    pub factor_residual: f64,
    /// The optimal gauge in the local coordinate of the disc.
    pub factor: MatrixPolynomial,
}

pub fn gauge_mean_from_samples(samples: &BoundarySamples, tol: f64) -> Result<GaugeMean> {
    let opts = DualOptions {
        tol,
        ..DualOptions::default()
    };
    let dual = dual_boundary_factor(samples, &opts)?;
    if dual.residual > tol {
        return Err(Error::UnreliableCertificate {
            residual: dual.residual,
            tol,
        });
    }
    let h0inv = inverse(&dual.h.coeffs()[0])?;
    let value = Hermitian::from_part(&(h0inv.adjoint() * h0inv));
    Ok(GaugeMean {
        disc: *samples.disc(),
        value,
        factor_residual: dual.residual,
        factor: dual.h,
    })
}

pub fn gauge_mean(field: &MetricField, disc: &DiscSpec, n: usize, tol: f64) -> Result<GaugeMean> {
    gauge_mean_from_samples(&sample_field(field, disc, n)?, tol)
}

/// `H(z0)^{*-1} S(H*PH, z0, r) H(z0)^{-1}` for a competitor gauge `H` given in
/// the local coordinate of `disc`.
pub fn competitor_value(field: &MetricField, disc: &DiscSpec, gauge: &MatrixPolynomial, n: usize) -> Result<Hermitian> {
    let samples = sample_field(field, disc, n)?;
    let gauged: Vec<Hermitian> = crate::circle::unit_roots(n)
        .into_iter()
        .zip(samples.values())
        .map(|(w, p)| p.congruence(&gauge.eval(w)))
        .collect();
    let s = schur_mean_from_samples(&BoundarySamples::new(*disc, gauged)?)?;
    let hinv = inverse(&gauge.eval(c64(0.0, 0.0)))?;
    Ok(s.value.congruence(&hinv))
}

/// `T(P, z0, r) <= P(z0)` on every disc.
pub fn certify_semipositive(field: &MetricField, discs: &[DiscSpec], n: usize, tol: f64) -> Result<CertReport> {
    let results: Vec<(DiscSpec, f64, f64)> = discs
        .par_iter()
        .map(|d| {
            let t = gauge_mean(field, d, n, tol.max(1e-10))?;
            let p0 = field.value(d.z0)?;
            Ok((*d, p0.sub(&t.value).min_eigenvalue(), p0.norm()))
        })
        .collect::<Result<_>>()?;
    let mut cert = CertBuilder::new(tol);
    for (d, m, s) in results {
        cert.record(m, tol * (1.0 + s), Witness::disc(&d));
    }
    Ok(cert.finish())
}

/// 5x5 centers times 3 radii, all inside 90% of the domain.
pub fn default_disc_family(domain: &DiscSpec) -> Vec<DiscSpec> {
    let offsets = [-0.3, -0.15, 0.0, 0.15, 0.3];
    let radii = [0.1, 0.25, 0.45];
    let mut discs = Vec::with_capacity(75);
    for &a in &offsets {
        for &b in &offsets {
            for &r in &radii {
                discs.push(DiscSpec {
                    z0: domain.z0 + c64(a, b) * domain.r,
                    r: r * domain.r,
                });
            }
        }
    }
    discs
}

/// Halves every radius of a family, keeping the centers.
pub fn refine_discs(discs: &[DiscSpec]) -> Vec<DiscSpec> {
    discs
        .iter()
        .flat_map(|d| [*d, DiscSpec { z0: d.z0, r: d.r / 2.0 }])
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileRow {
    pub r: f64,
    pub min_eig: f64,
    pub max_eig: f64,
    pub distance_to_center: f64,
    pub t_diagnostic: f64,
}

/// Eigenvalue range of `S(P, z0, r)` and `||S - P(z0)||` per radius.
pub fn profile_rows(field: &MetricField, z0: Complex64, radii: &[f64], n: usize) -> Result<Vec<ProfileRow>> {
    let p0 = field.value(z0)?;
    Ok(radial_profile(field, z0, radii, n)?
        .into_iter()
        .map(|s| {
            let eig = s.value.eigenvalues();
            ProfileRow {
                r: s.disc.r,
                min_eig: eig[0],
                max_eig: eig[eig.len() - 1],
                distance_to_center: s.value.sub(&p0).norm(),
                t_diagnostic: s.t_diagnostic,
            }
        })
        .collect())
}

pub fn write_profile_csv(rows: &[ProfileRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "r,min_eig,max_eig,distance_to_center,t_diagnostic")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.17e},{:.17e},{:.17e},{:.3e}",
            r.r, r.min_eig, r.max_eig, r.distance_to_center, r.t_diagnostic
        )?;
    }
    Ok(())
}
