//! Flat metrics with P >= Id and P(0) = 25 Id whose value at 1/2 is unbounded,
//! built from nilpotent truncations of a weighted shift.
//!
//! ```bash
//! cargo run --example harnack_counterexample
//! ```

use ncpot::error::Result;
use ncpot::harnack::{
    harnack_family, noninvertible_limit_witness, product_identity_check, scalar_harnack_check, write_family_csv,
};
use ncpot::linalg::c64;
use ncpot::random;

pub fn run_example() -> Result<()> {
    for k in [3, 10] {
        let p = product_identity_check(k)?;
        println!("k = {k}: prod beta = 2^{} exactly: {}, below 2^(2^k): {}", p.exponent, p.equal, p.below_bound);
    }

    let fam = harnack_family(c64(0.5, 0.0), &[1, 2, 3, 4, 5, 6], 256)?;
    let mut csv = Vec::new();
    write_family_csv(&fam, &mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    println!("nondecreasing: {}", fam.is_nondecreasing());

    let w = noninvertible_limit_witness(256, c64(2.0, 0.0))?;
    for g in &w.growth {
        println!("d = {:>4}: sigma_min {:.3e}, |x| {:.1}", g.dim, g.min_singular, g.preimage_norm);
    }

    let s = scalar_harnack_check(&mut random::rng(4), 50, 1e-10);
    println!("scalar flat metrics obey the classical bound: {} (slack {:.3e})", s.passed, s.worst_slack);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
