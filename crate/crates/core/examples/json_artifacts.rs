//! Write a symbol to JSON, factor it through the command-line entry point and
//! read the factor back.
//!
//! ```bash
//! cargo run --example json_artifacts
//! ```

use ncpot::error::Result;
use ncpot::io::{read_json, write_json, LaurentJson, PolynomialJson};
use ncpot::linalg::Hermitian;
use ncpot::poly::MatrixLaurent;

pub fn run_example() -> Result<()> {
    let dir = std::env::temp_dir().join(format!("ncpot-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let input = dir.join("symbol.json");
    let output = dir.join("factor.json");

    let f = MatrixLaurent::constant(&Hermitian::from_real_diagonal(&[4.0, 1.0]));
    write_json(&input, &LaurentJson::from_laurent(&f))?;

    let args = ["ncpot", "factor", "--in", input.to_str().unwrap_or_default(), "--out", output.to_str().unwrap_or_default()];
    let mut report = Vec::new();
    let code = ncpot::cli::run(args, &mut report, &mut std::io::stderr());
    println!("exit code {code}");
    print!("{}", String::from_utf8_lossy(&report));

    let h = read_json::<PolynomialJson>(&output)?.to_polynomial()?;
    println!("H(0) diagonal: {:?}", h.coeffs()[0].diagonal().iter().map(|x| x.re).collect::<Vec<_>>());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
