//! Outcome of a sign certificate over a finite family of points or discs.

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::DiscSpec;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Witness {
    Point { z: [f64; 2] },
    Disc { z0: [f64; 2], r: f64 },
}

impl Witness {
    pub fn point(z: Complex64) -> Self {
        Witness::Point { z: [z.re, z.im] }
    }

    pub fn disc(d: &DiscSpec) -> Self {
        Witness::Disc {
            z0: [d.z0.re, d.z0.im],
            r: d.r,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertReport {
    pub passed: bool,
    /// Smallest eigenvalue margin seen (negative means a violation).
    pub worst_margin: f64,
    /// Location of the worst margin.
    pub witness: Option<Witness>,
    pub checked: usize,
    pub failures: usize,
    /// Worst margin of a second, equivalent form of the same test, when one is run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alt_margin: Option<f64>,
    /// Whether both forms gave the same verdict on every item.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub forms_agree: Option<bool>,
}

/// Accumulates per-item margins against a tolerance.
#[derive(Clone, Debug)]
pub struct CertBuilder {
    tol: f64,
    worst: f64,
    witness: Option<Witness>,
    checked: usize,
    failures: usize,
}

impl CertBuilder {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            worst: f64::INFINITY,
            witness: None,
            checked: 0,
            failures: 0,
        }
    }

    /// Records a margin; `slack` is the item's own scale-adjusted tolerance.
    pub fn record(&mut self, margin: f64, slack: f64, at: Witness) {
        self.checked += 1;
        if !(margin >= -slack) {
            self.failures += 1;
        }
        if margin < self.worst || self.witness.is_none() {
            self.worst = margin;
            self.witness = Some(at);
        }
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn finish(self) -> CertReport {
        CertReport {
            passed: self.failures == 0,
            worst_margin: if self.checked == 0 { 0.0 } else { self.worst },
            witness: self.witness,
            checked: self.checked,
            failures: self.failures,
            alt_margin: None,
            forms_agree: None,
        }
    }
}
