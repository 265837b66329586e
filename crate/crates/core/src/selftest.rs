//! Reduced invariant suites run by `ncpot selftest`.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::circle::{polar_grid, BoundarySamples, DiscSpec};
use crate::curvature::MetricField;
use crate::dirichlet::{solve_dirichlet, unitary_gauge_distance, DirichletOptions};
use crate::error::Result;
use crate::harnack::{harnack_family, product_identity_check, scalar_harnack_check, truncation_gap};
use crate::linalg::{c64, Hermitian};
use crate::meanvalue::{certify_semipositive, certify_seminegative, default_disc_family};
use crate::poly::MatrixPolynomial;
use crate::random;
use crate::specfact::{fejer_riesz_factor, FactorOptions, Method};

pub type Check = (&'static str, bool, Value);

pub fn run_all(seed: u64) -> Result<Vec<Check>> {
    Ok(vec![
        factorization(seed)?,
        dirichlet_closed_form()?,
        mean_value(seed)?,
        semipositive()?,
        shift_identities()?,
        harnack()?,
        scalar_harnack(seed),
    ])
}

fn factorization(seed: u64) -> Result<Check> {
    let mut rng = random::rng(seed);
    let mut worst_residual: f64 = 0.0;
    let mut worst_gauge: f64 = 0.0;
    for i in 0..5 {
        let f = random::symbol(&mut rng, 1 + i % 3, 1 + i, 0.1);
        let (hb, rb) = fejer_riesz_factor(&f, &FactorOptions::with_method(Method::Bauer))?;
        let (hw, rw) = fejer_riesz_factor(&f, &FactorOptions::with_method(Method::Wilson))?;
        worst_residual = worst_residual.max(rb.residual).max(rw.residual);
        worst_gauge = worst_gauge.max(unitary_gauge_distance(&hb, &hw)?);
    }
    let passed = worst_residual <= 1e-8 && worst_gauge <= 1e-6;
    Ok(("factorization", passed, json!({"residual": worst_residual, "gauge_distance": worst_gauge})))
}

fn dirichlet_closed_form() -> Result<Check> {
    let f = BoundarySamples::from_fn(DiscSpec::unit(), 64, |w| Hermitian::from_real_diagonal(&[1.25 + w.re]))?;
    let (m, _) = solve_dirichlet(&f, &DirichletOptions::default())?;
    let mut err: f64 = 0.0;
    for z in polar_grid(&DiscSpec::unit(), 6, 16, 0.9) {
        let want = (c64(1.0, 0.0) + z / 2.0).norm_sqr();
        err = err.max((m.evaluate(z)?.as_matrix()[(0, 0)].re - want).abs());
    }
    Ok(("dirichlet_closed_form", err <= 1e-8, json!({"max_error": err})))
}

fn one_and_z() -> Vec<MatrixPolynomial> {
    vec![
        MatrixPolynomial::scalar(&[c64(1.0, 0.0)]).expect("constant"),
        MatrixPolynomial::scalar(&[c64(0.0, 0.0), c64(1.0, 0.0)]).expect("linear"),
    ]
}

fn mean_value(seed: u64) -> Result<Check> {
    let mut rng = random::rng(seed ^ 0x5eed);
    let dom = DiscSpec::unit();
    let terms = (0..2).map(|_| random::polynomial(&mut rng, 2, 2, 0.5)).collect();
    let flat = MetricField::flat_sum(terms, dom)?;
    let family = default_disc_family(&dom);
    let pos = certify_seminegative(&flat, &family, 128, 1e-9)?;
    let dual = MetricField::dual_flat_sum(one_and_z(), dom)?;
    let neg = certify_seminegative(&dual, &family, 128, 1e-9)?;
    let passed = pos.passed && !neg.passed && pos.forms_agree == Some(true) && neg.forms_agree == Some(true);
    Ok((
        "mean_value",
        passed,
        json!({"flat_sum_margin": pos.worst_margin, "dual_margin": neg.worst_margin, "dual_witness": neg.witness}),
    ))
}

fn semipositive() -> Result<Check> {
    let dom = DiscSpec::unit();
    let discs: Vec<DiscSpec> = default_disc_family(&dom).into_iter().step_by(7).collect();
    let dual = MetricField::dual_flat_sum(one_and_z(), dom)?;
    let rep = certify_semipositive(&dual, &discs, 128, 1e-8)?;
    Ok(("semipositive", rep.passed, json!({"worst_margin": rep.worst_margin})))
}

fn shift_identities() -> Result<Check> {
    let mut ok = true;
    for k in 1..=10 {
        let p = product_identity_check(k)?;
        ok &= p.equal && p.below_bound;
    }
    let mut gap_err: f64 = 0.0;
    for k in 1..=6u32 {
        gap_err = gap_err.max((truncation_gap((1 << k) + 8, k)? - 0.5f64.powi(k as i32)).abs());
    }
    Ok(("shift_identities", ok && gap_err <= 1e-14, json!({"products_exact": ok, "gap_error": gap_err})))
}

fn harnack() -> Result<Check> {
    let fam = harnack_family(Complex64::new(0.5, 0.0), &[1, 2, 3], 16)?;
    let r2 = &fam.records[1];
    let passed = fam.is_nondecreasing()
        && fam.records.iter().all(|r| r.zero_exact && r.value_at_zero == 25.0)
        && r2.lower_bound >= 625.0;
    Ok(("harnack", passed, json!({"norm_k2": r2.norm_at_z0, "lower_bound_k2": r2.lower_bound})))
}

fn scalar_harnack(seed: u64) -> Check {
    let rep = scalar_harnack_check(&mut random::rng(seed.wrapping_add(17)), 20, 1e-10);
    ("scalar_harnack", rep.passed, json!({"worst_slack": rep.worst_slack}))
}
