//! Flat extension of boundary data into the disc: a scalar closed form, a
//! matrix worked case and the perturbative Newton-Schwarz solver.
//!
//! ```bash
//! cargo run --example dirichlet_disc
//! ```

use num_complex::Complex64;
use ncpot::circle::{polar_grid, BoundarySamples, DiscSpec};
use ncpot::dirichlet::{newton_schwarz_solve, solve_dirichlet, DirichletOptions, NewtonOptions};
use ncpot::error::Result;
use ncpot::linalg::{c64, Hermitian};

pub fn run_example() -> Result<()> {
    let disc = DiscSpec::unit();

    // 5/4 + cos t extends to |1 + z/2|^2.
    let f = BoundarySamples::from_fn(disc, 64, |w| Hermitian::from_real_diagonal(&[1.25 + w.re]))?;
    let (metric, report) = solve_dirichlet(&f, &DirichletOptions::default())?;
    let grid = polar_grid(&disc, 5, 20, 0.9);
    let err = grid
        .iter()
        .map(|&z| Ok((metric.evaluate(z)?.as_matrix()[(0, 0)].re - (c64(1.0, 0.0) + z / 2.0).norm_sqr()).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("scalar: truncation {:?}, max error on {} points {err:.2e}", report.truncation, grid.len());

    // [[1, e^{it}], [e^{-it}, 2]] is H*H for H(z) = [[1, z], [0, 1]].
    let g = BoundarySamples::from_fn(disc, 64, |w| {
        Hermitian::new(ncpot::linalg::CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), w, w.conj(), c64(2.0, 0.0)]))
            .expect("hermitian by construction")
    })?;
    let (m, _) = solve_dirichlet(&g, &DirichletOptions::default())?;
    let mut err: f64 = 0.0;
    for &z in &grid {
        let want = ncpot::linalg::CMatrix::from_row_slice(2, 2, &[c64(1.0, 0.0), z, c64(0.0, 0.0), c64(1.0, 0.0)]);
        err = err.max(ncpot::linalg::operator_norm(&(m.factor_at(z)? - want)));
    }
    println!("matrix case: sup ||H(z) - [[1, z], [0, 1]]|| = {err:.2e}");

    // Data close to the identity: Newton steps with the Schwarz integral.
    let near = BoundarySamples::from_fn(disc, 64, |w| {
        let a = 0.05 * (w + w.conj()).re;
        Hermitian::from_real_diagonal(&[1.0 + a, 1.0 - 0.5 * a])
    })?;
    let (nm, nr) = newton_schwarz_solve(&near, &NewtonOptions::default())?;
    let z = Complex64::new(0.3, -0.2);
    println!(
        "newton: {} iterations, residual {:.2e}, P(0.3-0.2i) diagonal = ({:.6}, {:.6})",
        nr.iterations,
        nr.residual,
        nm.evaluate(z)?.as_matrix()[(0, 0)].re,
        nm.evaluate(z)?.as_matrix()[(1, 1)].re
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
