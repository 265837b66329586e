//! Pointwise curvature defects and the sign classification of a few fields.
//!
//! ```bash
//! cargo run --example curvature_sign
//! ```

use ncpot::circle::{square_grid, DiscSpec};
use ncpot::curvature::{classify_field, curvature_defect, richardson_ratio, MetricField};
use ncpot::error::Result;
use ncpot::linalg::{c64, Hermitian};
use ncpot::poly::MatrixPolynomial;

pub fn run_example() -> Result<()> {
    let dom = DiscSpec::unit();
    let one = MatrixPolynomial::scalar(&[c64(1.0, 0.0)])?;
    let z = MatrixPolynomial::scalar(&[c64(0.0, 0.0), c64(1.0, 0.0)])?;
    let fields = [
        ("flat 1+z", MetricField::flat(MatrixPolynomial::scalar(&[c64(1.0, 0.0), c64(1.0, 0.0)])?, dom)),
        ("1 + |z|^2", MetricField::flat_sum(vec![one.clone(), z.clone()], dom)?),
        ("1/(1 + |z|^2)", MetricField::dual_flat_sum(vec![one, z], dom)?),
        ("constant", MetricField::constant(Hermitian::from_real_diagonal(&[1.0, 3.0]), dom)?),
    ];
    let grid = square_grid(&dom, 16, 0.95);
    for (name, f) in &fields {
        let c = classify_field(f, &grid, 1e-9)?;
        let s = curvature_defect(f, c64(0.3, 0.1))?;
        println!(
            "{name:>14}: {:?}, defect at 0.3+0.1i in [{:.4}, {:.4}]",
            c.class, s.margin_neg, -s.margin_pos
        );
    }
    let r = richardson_ratio(&fields[2].1, c64(0.2, -0.3), 1e-2)?;
    println!("finite-difference error ratio under step halving: {r:.3}");
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
