//! The gauge-covariant circle mean: semipositive certificate, equality for flat
//! fields, and random competitor gauges against the optimal one.
//!
//! ```bash
//! cargo run --example semipositive_gauge
//! ```

use ncpot::circle::DiscSpec;
use ncpot::curvature::MetricField;
use ncpot::error::Result;
use ncpot::linalg::c64;
use ncpot::meanvalue::{certify_semipositive, competitor_value, default_disc_family, gauge_mean};
use ncpot::poly::MatrixPolynomial;
use ncpot::random;

pub fn run_example() -> Result<()> {
    let dom = DiscSpec::unit();
    let mut rng = random::rng(8);
    let terms: Vec<MatrixPolynomial> = (0..2).map(|_| random::near_identity_polynomial(&mut rng, 2, 1, 0.3)).collect();
    let dual = MetricField::dual_flat_sum(terms, dom)?;
    let family: Vec<DiscSpec> = default_disc_family(&dom).into_iter().step_by(5).collect();
    let rep = certify_semipositive(&dual, &family, 256, 1e-8)?;
    println!("dual flat sum: passed {}, worst margin {:.3e}", rep.passed, rep.worst_margin);

    let flat = MetricField::flat(random::near_identity_polynomial(&mut rng, 2, 2, 0.2), dom);
    let disc = DiscSpec::new(c64(0.1, 0.1), 0.4)?;
    let t = gauge_mean(&flat, &disc, 256, 1e-10)?;
    println!("flat field: ||T - P(z0)|| = {:.2e}", t.value.sub(&flat.value(disc.z0)?).norm());

    let t = gauge_mean(&dual, &disc, 256, 1e-10)?;
    let mut best = f64::INFINITY;
    for _ in 0..10 {
        let k = random::near_identity_polynomial(&mut rng, 2, 2, 0.25);
        let v = competitor_value(&dual, &disc, &k, 256)?;
        best = best.min(v.sub(&t.value).min_eigenvalue());
    }
    println!("competitors minus optimum: smallest eigenvalue {best:.3e}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
