//! The weighted shift with weights `1/beta(n)`, its nilpotent truncations, and
//! the family of flat metrics along which a noncommutative Harnack bound fails.
//!
//! Indices are 1-based in the documentation and 0-based in storage.

use std::io::Write;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circle::{polar_grid, unit_roots, DiscSpec};
use crate::curvature::{defect_from_jet, MetricJet};
use crate::error::{Error, Result};
use crate::linalg::{c64, identity, min_singular, operator_norm, CMatrix};

/// Largest power of two dividing `n`.
pub fn beta(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidInput("beta is defined for n >= 1".into()));
    }
    Ok(1 << n.trailing_zeros())
}

fn beta_unchecked(n: usize) -> f64 {
    (1u64 << n.trailing_zeros()) as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftSpec {
    pub dim: usize,
    /// Truncation parameter of `A_k`; `None` for `A` itself.
    pub k: Option<u32>,
}

impl ShiftSpec {
    pub fn new(dim: usize, k: Option<u32>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidInput(format!("shift dimension must be at least 2, got {dim}")));
        }
        if matches!(k, Some(k) if k >= 63) {
            return Err(Error::InvalidInput("truncation parameter must be below 63".into()));
        }
        Ok(Self { dim, k })
    }

    /// Weight on the edge `n-1 -> n`, i.e. entry `(n, n-1)`, for `m = n-1 >= 1`.
    pub fn weight(&self, m: usize) -> f64 {
        match self.k {
            Some(k) if m.is_multiple_of(1usize << k) => 0.0,
            _ => 1.0 / beta_unchecked(m),
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (1..self.dim).map(|m| self.weight(m)).collect()
    }

    /// Size of the diagonal blocks `A_k` splits into (the whole matrix for `A`).
    pub fn block_size(&self) -> usize {
        match self.k {
            Some(k) => (1usize << k).min(self.dim),
            None => self.dim,
        }
    }

    /// The same operator restricted to its leading diagonal block. Every full
    /// block of `A_k` is this block, and a trailing partial block is a leading
    /// corner of it.
    pub fn leading_block(&self) -> ShiftSpec {
        ShiftSpec {
            dim: self.block_size().max(2),
            k: self.k,
        }
    }
}

pub fn shift_matrix(spec: &ShiftSpec) -> CMatrix {
    let mut a = CMatrix::zeros(spec.dim, spec.dim);
    for (i, w) in spec.weights().into_iter().enumerate() {
        a[(i + 1, i)] = c64(w, 0.0);
    }
    a
}

/// `Id - zeta A`.
pub fn pencil(spec: &ShiftSpec, zeta: Complex64) -> CMatrix {
    identity(spec.dim) - shift_matrix(spec) * zeta
}

/// `(Id - zeta A)^{-1}` by forward substitution, one column at a time.
pub fn pencil_inverse(spec: &ShiftSpec, zeta: Complex64) -> CMatrix {
    let w = spec.weights();
    let d = spec.dim;
    let mut inv = CMatrix::zeros(d, d);
    for j in 0..d {
        inv[(j, j)] = c64(1.0, 0.0);
        for i in j + 1..d {
            let next = inv[(i - 1, j)] * zeta * w[i - 1];
            if next == c64(0.0, 0.0) {
                break;
            }
            inv[(i, j)] = next;
        }
    }
    inv
}

/// Solution of `(Id - zeta A_k) x = e_1` in floating point.
pub fn resolvent_vector(spec: &ShiftSpec, zeta: Complex64) -> Vec<Complex64> {
    let w = spec.weights();
    let mut x = vec![c64(0.0, 0.0); spec.dim];
    x[0] = c64(1.0, 0.0);
    for n in 1..spec.dim {
        x[n] = x[n - 1] * zeta * w[n - 1];
    }
    x
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactResolvent {
    pub x: Vec<BigRational>,
    pub norm_sq: BigRational,
}

/// Solution of `(Id - zeta A_k) x = e_1` in exact rational arithmetic.
pub fn resolvent_vector_exact(spec: &ShiftSpec, zeta: &BigRational) -> ExactResolvent {
    let mut x = Vec::with_capacity(spec.dim);
    x.push(BigRational::one());
    for m in 1..spec.dim {
        let prev = &x[m - 1];
        let next = match spec.k {
            Some(k) if m % (1usize << k) == 0 => BigRational::zero(),
            _ => prev * zeta / BigRational::from_integer((1u64 << m.trailing_zeros()).into()),
        };
        x.push(next);
    }
    let norm_sq = x.iter().fold(BigRational::zero(), |acc, v| acc + v * v);
    ExactResolvent { x, norm_sq }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProductIdentity {
    pub k: u32,
    /// `prod_{m < 2^k} beta(m)`, by brute force.
    pub product: String,
    /// `2^{sum_{j<k} j 2^{k-j-1}}`.
    pub closed_form: String,
    pub exponent: u64,
    pub equal: bool,
    /// `product < 2^{2^k}`.
    pub below_bound: bool,
}

pub fn product_identity_check(k: u32) -> Result<ProductIdentity> {
    if k == 0 || k > 24 {
        return Err(Error::InvalidInput(format!("product identity needs 1 <= k <= 24, got {k}")));
    }
    let n = 1u64 << k;
    let mut product = BigUint::one();
    for m in 1..n {
        product *= BigUint::from(1u64 << m.trailing_zeros());
    }
    let exponent: u64 = (0..k as u64).map(|j| j << (k as u64 - j - 1)).sum();
    let closed = BigUint::one() << exponent;
    let bound = BigUint::one() << n;
    Ok(ProductIdentity {
        k,
        equal: product == closed,
        below_bound: product < bound,
        product: product.to_string(),
        closed_form: closed.to_string(),
        exponent,
    })
}

/// `||A - A_k||` and the largest removed weight.
pub fn truncation_gap(dim: usize, k: u32) -> Result<f64> {
    let a = shift_matrix(&ShiftSpec::new(dim, None)?);
    let ak = shift_matrix(&ShiftSpec::new(dim, Some(k))?);
    Ok(operator_norm(&(a - ak)))
}

/// `A^m` is zero exactly.
pub fn is_nilpotent(spec: &ShiftSpec, m: usize) -> bool {
    let a = shift_matrix(spec);
    let mut p = identity(spec.dim);
    for _ in 0..m {
        p = &p * &a;
    }
    p.iter().all(|v| *v == c64(0.0, 0.0))
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnackRecord {
    pub k: u32,
    /// `||P_k(z0)||` from the full inverse of `H_k(2)`.
    pub norm_at_z0: f64,
    /// `(1 + 2/|z0|)^2 ||x||^2` with `x` the exact resolvent vector.
    pub lower_bound: f64,
    /// The scalar `s` with `P_k(0) = s Id`.
    pub value_at_zero: f64,
    /// `P_k(0)` equals `s Id` entry for entry.
    pub zero_exact: bool,
    /// `min lambda(P_k - Id)` over the boundary grid.
    pub boundary_margin: f64,
    /// Largest relative curvature defect over the interior test points.
    pub flatness: f64,
    pub block: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct HarnackFamily {
    pub z0: [f64; 2],
    pub dim: usize,
    pub epsilon: f64,
    pub records: Vec<HarnackRecord>,
}

impl HarnackFamily {
    pub fn is_nondecreasing(&self) -> bool {
        self.records.windows(2).all(|w| w[1].norm_at_z0 >= w[0].norm_at_z0 * (1.0 - 1e-12))
    }
}

/// Boundary samples used for `P_k >= Id`.
pub const HARNACK_BOUNDARY_POINTS: usize = 32;

/// `P_k = L_k^{*-1} L_k^{-1}` with `L_k(z) = H_k(2z/z0) / (1 + 2/|z0|)`.
///
/// `A_k` is block diagonal with identical `2^k` blocks, so every quantity is
/// computed on one block.
pub fn harnack_family(z0: Complex64, ks: &[u32], dim: usize) -> Result<HarnackFamily> {
    let r0 = z0.norm();
    if !(r0 > 0.0 && r0 < 1.0) {
        return Err(Error::InvalidInput(format!("z0 must satisfy 0 < |z0| < 1, got |z0| = {r0}")));
    }
    let c = 1.0 + 2.0 / r0;
    let records = ks
        .par_iter()
        .map(|&k| harnack_record(z0, c, k, dim))
        .collect::<Result<Vec<_>>>()?;
    Ok(HarnackFamily {
        z0: [z0.re, z0.im],
        dim,
        epsilon: 1.0 / c,
        records,
    })
}

fn harnack_record(z0: Complex64, c: f64, k: u32, dim: usize) -> Result<HarnackRecord> {
    let r0 = z0.norm();
    let spec = ShiftSpec::new(dim, Some(k))?;
    let block = spec.leading_block();
    let a = shift_matrix(&block);
    let zeta_of = |z: Complex64| z * 2.0 / z0;

    let g_at = |zeta: Complex64| pencil_inverse(&block, zeta) * c64(c, 0.0);
    let norm_at_z0 = operator_norm(&g_at(c64(2.0, 0.0))).powi(2);

    let exact = resolvent_vector_exact(&block, &BigRational::from_integer(2.into()));
    let lower_bound = c * c * exact.norm_sq.to_f64().unwrap_or(f64::INFINITY);

    let g0 = g_at(c64(0.0, 0.0));
    let p0 = g0.adjoint() * &g0;
    let s = c * c;
    let zero_exact = p0
        .iter()
        .enumerate()
        .all(|(idx, v)| *v == if idx % (block.dim + 1) == 0 { c64(s, 0.0) } else { c64(0.0, 0.0) });

    let boundary_margin = unit_roots(HARNACK_BOUNDARY_POINTS)
        .into_iter()
        .map(|w| {
            let l = pencil(&block, zeta_of(w)) / c64(c, 0.0);
            let smax = operator_norm(&l);
            1.0 / (smax * smax) - 1.0
        })
        .fold(f64::INFINITY, f64::min);

    // Beyond |zeta| = 2 the entries of H_k^{-1} grow like |zeta|^{2^k}.
    let mut points = vec![c64(0.0, 0.0), z0];
    points.extend(polar_grid(&DiscSpec::new(c64(0.0, 0.0), r0)?, 1, 4, 1.0));
    let mut flatness: f64 = 0.0;
    for z in points {
        let zeta = zeta_of(z);
        let g = g_at(zeta);
        // G = c H^{-1}, G' = c H^{-1} (2/z0) A H^{-1}.
        let dg = &g * (&a * (c64(2.0, 0.0) / z0)) * pencil_inverse(&block, zeta);
        let sample = defect_from_jet(z, &MetricJet::from_factor(&g, &dg))?;
        flatness = flatness.max(sample.defect_neg.norm() / (1.0 + sample.scale));
    }

    Ok(HarnackRecord {
        k,
        norm_at_z0,
        lower_bound,
        value_at_zero: s,
        zero_exact,
        boundary_margin,
        flatness,
        block: block.dim,
    })
}

pub fn write_family_csv(family: &HarnackFamily, mut out: impl Write) -> Result<()> {
    writeln!(out, "k,norm_p_z0,lower_bound,p0_scalar")?;
    for r in &family.records {
        writeln!(out, "{},{:.17e},{:.17e},{}", r.k, r.norm_at_z0, r.lower_bound, r.value_at_zero)?;
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncationGrowth {
    pub dim: usize,
    /// `sigma_min(Id - zeta A)` at this truncation.
    pub min_singular: f64,
    /// `||x||` for `(Id - zeta A) x = e_1`, so `min_singular <= 1/||x||`.
    pub preimage_norm: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct LimitWitness {
    pub zeta: [f64; 2],
    pub growth: Vec<TruncationGrowth>,
    /// `|x_{2^j}|` for `2^j <= d`.
    pub power_components: Vec<f64>,
    pub all_above_half: bool,
}

/// Growth of the preimage of `e_1` under truncations of `Id - zeta A` for
/// dimensions `8, 16, ...` up to `dim`.
pub fn noninvertible_limit_witness(dim: usize, zeta: Complex64) -> Result<LimitWitness> {
    if dim < 8 {
        return Err(Error::InvalidInput(format!("witness needs dim >= 8, got {dim}")));
    }
    let mut dims = Vec::new();
    let mut d = 8;
    while d < dim {
        dims.push(d);
        d *= 2;
    }
    dims.push(dim);
    let growth = dims
        .par_iter()
        .map(|&d| {
            let spec = ShiftSpec::new(d, None)?;
            let x = resolvent_vector(&spec, zeta);
            Ok(TruncationGrowth {
                dim: d,
                min_singular: min_singular(&pencil(&spec, zeta)),
                preimage_norm: x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let x = resolvent_vector(&ShiftSpec::new(dim, None)?, zeta);
    let power_components: Vec<f64> = (0..)
        .map(|j| 1usize << j)
        .take_while(|&n| n <= dim)
        .map(|n| x[n - 1].norm())
        .collect();
    Ok(LimitWitness {
        zeta: [zeta.re, zeta.im],
        all_above_half: power_components.iter().all(|&v| v > 0.5),
        growth,
        power_components,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalarHarnack {
    pub metrics: usize,
    pub points: usize,
    /// `min ((1+|z|)/(1-|z|) log P(0) - log P(z))`.
    pub worst_slack: f64,
    pub passed: bool,
}

/// `log P(z) <= (1+|z|)/(1-|z|) log P(0)` for random scalar flat metrics
/// `P = |h|^2` with `h` zero-free on the closed disc and `|h| >= 1` on the circle.
pub fn scalar_harnack_check(rng: &mut impl Rng, metrics: usize, tol: f64) -> ScalarHarnack {
    let grid: Vec<Complex64> = polar_grid(&DiscSpec::unit(), 9, 16, 0.95).into_iter().skip(1).collect();
    let circle = unit_roots(512);
    let mut worst = f64::INFINITY;
    for _ in 0..metrics {
        let nroots = rng.random_range(1..=4);
        let roots: Vec<Complex64> = (0..nroots)
            .map(|_| {
                let r = 1.1 + 2.0 * rng.random::<f64>();
                Complex64::from_polar(r, std::f64::consts::TAU * rng.random::<f64>())
            })
            .collect();
        let h = |z: Complex64| roots.iter().fold(c64(1.0, 0.0), |acc, a| acc * (c64(1.0, 0.0) - z / a));
        let floor = circle.iter().map(|&w| h(w).norm()).fold(f64::INFINITY, f64::min);
        let boost = 1.0 + rng.random::<f64>();
        let log_p = |z: Complex64| 2.0 * (boost * h(z).norm() / floor).ln();
        let at0 = log_p(c64(0.0, 0.0));
        for &z in &grid {
            let r = z.norm();
            let slack = (1.0 + r) / (1.0 - r) * at0 - log_p(z);
            worst = worst.min(slack);
        }
    }
    ScalarHarnack {
        metrics,
        points: grid.len(),
        worst_slack: worst,
        passed: worst >= -tol,
    }
}
