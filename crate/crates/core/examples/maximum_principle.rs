//! Boundary ordering of flat metrics propagates to the interior, and flat
//! extensions depend stably on their boundary data.
//!
//! ```bash
//! cargo run --example maximum_principle
//! ```

use ncpot::circle::{polar_grid, BoundarySamples, DiscSpec};
use ncpot::dirichlet::{boundary_stability, compare_boundary_interior, solve_dirichlet, DirichletOptions};
use ncpot::error::Result;
use ncpot::random;

pub fn run_example() -> Result<()> {
    let disc = DiscSpec::unit();
    let mut rng = random::rng(3);
    let q = random::symbol(&mut rng, 2, 2, 0.2);
    let extra = random::symbol(&mut rng, 2, 1, 0.05).lift(-0.05);
    let fq = BoundarySamples::from_laurent(disc, 64, &q)?;
    let values = fq
        .values()
        .iter()
        .zip(BoundarySamples::from_laurent(disc, 64, &extra)?.values())
        .map(|(a, b)| a.add(&b.scale(0.1)))
        .collect();
    let fp = BoundarySamples::new(disc, values)?;

    let opts = DirichletOptions::default();
    let (p, _) = solve_dirichlet(&fp, &opts)?;
    let (qm, _) = solve_dirichlet(&fq, &opts)?;
    let grid = polar_grid(&disc, 6, 24, 0.95);
    let cert = compare_boundary_interior(&p, &qm, &grid, 128, 1e-9)?;
    println!("P >= Q on the circle; interior margin {:.3e} over {} points", cert.worst_margin, cert.checked);

    let stab = boundary_stability(&fq, &fp, &opts, &grid)?;
    println!(
        "sandwich eps {:.3e}, interior change {:.3e}, ratio {:.3}",
        stab.sandwich_eps, stab.interior_change, stab.constant
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
