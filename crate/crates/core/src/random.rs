//! Seeded generators for test instances, examples and the self-test.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c64, identity, CMatrix, CVector, Hermitian};
use crate::poly::{MatrixLaurent, MatrixPolynomial, VectorPolynomial};

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex normal with unit variance.
pub fn complex(rng: &mut impl Rng) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex(rng) * scale)
}

pub fn vector(rng: &mut impl Rng, d: usize) -> CVector {
    CVector::from_fn(d, |_, _| complex(rng))
}

pub fn hermitian(rng: &mut impl Rng, d: usize) -> Hermitian {
    Hermitian::from_part(&matrix(rng, d, d, 1.0))
}

/// Haar-ish unitary from the QR factorization of a complex Gaussian matrix.
pub fn unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    let qr = matrix(rng, d, d, 1.0).qr();
    let q = qr.q();
    let r = qr.r();
    let phases = CMatrix::from_diagonal(&r.diagonal().map(|x| {
        if x.norm() > 0.0 {
            x / x.norm()
        } else {
            c64(1.0, 0.0)
        }
    }));
    q * phases
}

/// Invertible matrix with condition number at most `cond`.
pub fn conditioned(rng: &mut impl Rng, d: usize, cond: f64) -> CMatrix {
    let u = unitary(rng, d);
    let v = unitary(rng, d);
    let s: Vec<Complex64> = (0..d)
        .map(|i| {
            let t = if d == 1 { 0.0 } else { i as f64 / (d - 1) as f64 };
            c64(cond.powf(-t), 0.0)
        })
        .collect();
    u * CMatrix::from_diagonal(&CVector::from_vec(s)) * v
}

/// Matrix polynomial with Gaussian coefficients of standard deviation `scale`.
pub fn polynomial(rng: &mut impl Rng, d: usize, degree: usize, scale: f64) -> MatrixPolynomial {
    MatrixPolynomial::new((0..=degree).map(|_| matrix(rng, d, d, scale)).collect())
        .expect("Gaussian coefficients are finite")
}

/// `G*G + delta Id` on the circle with `G` a random degree-`degree` polynomial;
/// the circle margin is at least `delta`.
pub fn symbol(rng: &mut impl Rng, d: usize, degree: usize, delta: f64) -> MatrixLaurent {
    let scale = 1.0 / ((d * (degree + 1)) as f64).sqrt();
    let g = polynomial(rng, d, degree, scale);
    g.gram_on_circle().lift(delta)
}

pub fn vector_polynomial(rng: &mut impl Rng, d: usize, degree: usize) -> VectorPolynomial {
    VectorPolynomial::new((0..=degree).map(|_| vector(rng, d)).collect())
        .expect("coefficients share a dimension")
}

/// `Id + scale * (random polynomial)`, an invertible gauge on the unit disc when
/// `scale * sum ||coeff||` stays below one.
pub fn near_identity_polynomial(rng: &mut impl Rng, d: usize, degree: usize, scale: f64) -> MatrixPolynomial {
    let p = polynomial(rng, d, degree, scale);
    let mut coeffs = p.into_coeffs();
    coeffs[0] += identity(d);
    MatrixPolynomial::new(coeffs).expect("finite coefficients")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::frobenius;

    #[test]
    fn seeded_streams_repeat() {
        let a = matrix(&mut rng(7), 3, 3, 1.0);
        let b = matrix(&mut rng(7), 3, 3, 1.0);
        assert_eq!(a, b);
    }

    #[test]
    fn unitary_is_unitary() {
        let u = unitary(&mut rng(1), 5);
        assert!(frobenius(&(u.adjoint() * &u - identity(5))) < 1e-12);
    }

    #[test]
    fn symbol_margin_is_at_least_delta() {
        let f = symbol(&mut rng(3), 4, 5, 0.1);
        assert!(f.min_circle_margin(256) >= 0.1 - 1e-12);
    }
}
