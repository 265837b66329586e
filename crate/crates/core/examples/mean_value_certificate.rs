//! Schur-complement circle means: the seminegative certificate with a failing
//! witness, monotonicity in the radius and convexity in log r.
//!
//! ```bash
//! cargo run --example mean_value_certificate
//! ```

use ncpot::circle::DiscSpec;
use ncpot::curvature::{subharmonicity_test, MetricField};
use ncpot::error::Result;
use ncpot::linalg::c64;
use ncpot::meanvalue::{
    certify_seminegative, default_disc_family, monotonicity_check, profile_rows, seminegative_disc_check,
    three_circles_convexity, witness_vector, write_profile_csv,
};
use ncpot::poly::MatrixPolynomial;
use ncpot::random;

pub fn run_example() -> Result<()> {
    let dom = DiscSpec::unit();
    let mut rng = random::rng(21);
    let flat = MetricField::flat_sum((0..3).map(|_| random::polynomial(&mut rng, 2, 2, 0.5)).collect(), dom)?;
    let family = default_disc_family(&dom);

    let rep = certify_seminegative(&flat, &family, 256, 1e-9)?;
    println!(
        "flat sum: passed {} over {} discs, block margin {:.3e}, Schur margin {:.3e}",
        rep.passed,
        rep.checked,
        rep.worst_margin,
        rep.alt_margin.unwrap_or(f64::NAN)
    );

    let radii = [0.1, 0.2, 0.3, 0.45, 0.6, 0.8];
    let z0 = c64(0.05, -0.1);
    let mono = monotonicity_check(&flat, z0, &radii, 256, 1e-9)?;
    let conv = three_circles_convexity(&flat, z0, &radii, 256, 1e-9)?;
    println!("increasing in r: {} ({:.3e}); convex in log r: {} ({:.3e})", mono.passed, mono.worst_margin, conv.passed, conv.worst_margin);
    let mut csv = Vec::new();
    write_profile_csv(&profile_rows(&flat, z0, &radii, 256)?, &mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));

    let one = MatrixPolynomial::scalar(&[c64(1.0, 0.0)])?;
    let z = MatrixPolynomial::scalar(&[c64(0.0, 0.0), c64(1.0, 0.0)])?;
    let dual = MetricField::dual_flat_sum(vec![one, z], dom)?;
    let bad = certify_seminegative(&dual, &family, 256, 1e-9)?;
    println!("dual field: passed {}, worst margin {:.4} at {:?}", bad.passed, bad.worst_margin, bad.witness);
    let disc = DiscSpec::new(c64(0.0, 0.0), 0.45)?;
    let check = seminegative_disc_check(&dual, &disc, 256)?;
    let phi = witness_vector(&check)?;
    let sub = subharmonicity_test(&dual, &phi, &[disc], 256, 1e-9)?;
    println!("witness section: mean minus center value {:.4}", sub.worst_margin);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
