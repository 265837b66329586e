//! Factor a random positive matrix symbol with both methods and compare.
//!
//! ```bash
//! cargo run --example spectral_factor
//! ```

use ncpot::dirichlet::unitary_gauge_distance;
use ncpot::error::Result;
use ncpot::random;
use ncpot::specfact::{fejer_riesz_factor, FactorOptions, Method};

pub fn run_example() -> Result<()> {
    let mut rng = random::rng(11);
    let f = random::symbol(&mut rng, 3, 4, 0.1);
    println!("symbol: dim {}, degree {}, circle margin {:.3e}", f.dim(), f.degree(), f.min_circle_margin(512));

    let mut factors = Vec::new();
    for method in [Method::Bauer, Method::Wilson] {
        let (h, report) = fejer_riesz_factor(&f, &FactorOptions::with_method(method))?;
        println!(
            "{method:>6}: residual {:.2e}, winding {}, iterations {}, min singular on circle {:.3e}",
            report.residual, report.winding, report.iterations, report.min_singular_on_circle
        );
        factors.push(h);
    }
    println!("distance up to a constant unitary: {:.2e}", unitary_gauge_distance(&factors[0], &factors[1])?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
