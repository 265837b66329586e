//! JSON wire formats for matrices, boundary data, symbols, flat metrics and
//! metric fields, with validation on load.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::circle::{BoundarySamples, DiscSpec};
use crate::curvature::{FieldKind, MetricField};
use crate::dirichlet::FlatMetric;
use crate::error::{Error, Result};
use crate::linalg::{c64, CMatrix, Hermitian, Psd, DEFAULT_PSD_TOL};
use crate::poly::{MatrixLaurent, MatrixPolynomial};

/// `{"dim": d, "entries": [[[re, im], ...], ...]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        Self {
            kind: None,
            dim: m.nrows(),
            entries: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                .collect(),
        }
    }

    pub fn from_hermitian(h: &Hermitian) -> Self {
        Self {
            kind: Some("hermitian".into()),
            ..Self::from_matrix(h.as_matrix())
        }
    }

    pub fn from_psd(p: &Psd) -> Self {
        Self {
            kind: Some("psd".into()),
            ..Self::from_matrix(p.as_matrix())
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        let d = self.dim;
        if d == 0 || self.entries.len() != d || self.entries.iter().any(|r| r.len() != d) {
            return Err(Error::InvalidInput(format!("matrix entries do not form a {d}x{d} array")));
        }
        let m = CMatrix::from_fn(d, d, |i, j| {
            let [re, im] = self.entries[i][j];
            c64(re, im)
        });
        if !crate::linalg::is_finite(&m) {
            return Err(Error::InvalidInput("matrix has non-finite entries".into()));
        }
        Ok(m)
    }

    pub fn to_hermitian(&self) -> Result<Hermitian> {
        Hermitian::new(self.to_matrix()?)
    }

    pub fn to_psd(&self, tol: f64) -> Result<Psd> {
        Psd::new(self.to_hermitian()?, tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscJson {
    pub z0: [f64; 2],
    pub r: f64,
}

impl DiscJson {
    pub fn from_disc(d: &DiscSpec) -> Self {
        Self {
            z0: [d.z0.re, d.z0.im],
            r: d.r,
        }
    }

    pub fn to_disc(&self) -> Result<DiscSpec> {
        DiscSpec::new(c64(self.z0[0], self.z0[1]), self.r)
    }
}

/// `{"dim": d, "degree": N, "coeffs": [matrix, ...]}`, ascending powers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub dim: usize,
    pub degree: usize,
    pub coeffs: Vec<MatrixJson>,
}

impl PolynomialJson {
    pub fn from_polynomial(p: &MatrixPolynomial) -> Self {
        Self {
            dim: p.dim(),
            degree: p.degree(),
            coeffs: p.coeffs().iter().map(MatrixJson::from_matrix).collect(),
        }
    }

    pub fn to_polynomial(&self) -> Result<MatrixPolynomial> {
        if self.coeffs.len() != self.degree + 1 {
            return Err(Error::InvalidInput(format!(
                "polynomial of degree {} lists {} coefficients",
                self.degree,
                self.coeffs.len()
            )));
        }
        let coeffs = self.coeffs.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
        if coeffs.iter().any(|c| c.nrows() != self.dim) {
            return Err(Error::InvalidInput("coefficient dimension disagrees with dim".into()));
        }
        MatrixPolynomial::new(coeffs)
    }
}

/// `{"z0": [re, im], "r": r, "n": n, "values": [matrix, ...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryJson {
    pub z0: [f64; 2],
    pub r: f64,
    pub n: usize,
    pub values: Vec<MatrixJson>,
}

impl BoundaryJson {
    pub fn from_samples(s: &BoundarySamples) -> Self {
        Self {
            z0: [s.disc().z0.re, s.disc().z0.im],
            r: s.disc().r,
            n: s.n(),
            values: s.values().iter().map(MatrixJson::from_hermitian).collect(),
        }
    }

    pub fn to_samples(&self) -> Result<BoundarySamples> {
        if self.values.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "n = {} but {} values given",
                self.n,
                self.values.len()
            )));
        }
        let disc = DiscSpec::new(c64(self.z0[0], self.z0[1]), self.r)?;
        let values = self.values.iter().map(MatrixJson::to_hermitian).collect::<Result<Vec<_>>>()?;
        BoundarySamples::new(disc, values)
    }
}

/// `{"dim": d, "N": N, "coeffs": {"-N": matrix, ..., "N": matrix}}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LaurentJson {
    pub dim: usize,
    #[serde(rename = "N")]
    pub degree: usize,
    pub coeffs: BTreeMap<String, MatrixJson>,
}

impl LaurentJson {
    pub fn from_laurent(f: &MatrixLaurent) -> Self {
        let n = f.degree() as i64;
        Self {
            dim: f.dim(),
            degree: f.degree(),
            coeffs: (-n..=n)
                .map(|k| (k.to_string(), MatrixJson::from_matrix(&f.coeff(k))))
                .collect(),
        }
    }

    /// Rejects missing keys and coefficients violating `F_{-n} = F_n*`.
    pub fn to_laurent(&self) -> Result<MatrixLaurent> {
        let n = self.degree as i64;
        let mut by_index = BTreeMap::new();
        for (key, m) in &self.coeffs {
            let k: i64 = key
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("coefficient key '{key}' is not an integer")))?;
            if k.abs() > n {
                return Err(Error::InvalidInput(format!("coefficient {k} exceeds N = {n}")));
            }
            let mat = m.to_matrix()?;
            if mat.nrows() != self.dim {
                return Err(Error::InvalidInput(format!("coefficient {k} has the wrong dimension")));
            }
            by_index.insert(k, mat);
        }
        let mut coeffs = Vec::with_capacity(2 * self.degree + 1);
        for k in -n..=n {
            match by_index.remove(&k) {
                Some(m) => coeffs.push(m),
                None => return Err(Error::InvalidInput(format!("coefficient {k} is missing"))),
            }
        }
        MatrixLaurent::new(coeffs)
    }
}

/// `{"domain": disc, "H": polynomial}` with `H` in the local coordinate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlatMetricJson {
    pub domain: DiscJson,
    #[serde(rename = "H")]
    pub h: PolynomialJson,
}

impl FlatMetricJson {
    pub fn from_metric(m: &FlatMetric) -> Self {
        Self {
            domain: DiscJson::from_disc(m.domain()),
            h: PolynomialJson::from_polynomial(m.factor()),
        }
    }

    pub fn to_metric(&self) -> Result<FlatMetric> {
        Ok(FlatMetric::new(self.h.to_polynomial()?, self.domain.to_disc()?))
    }
}

/// `{"variant": ..., "terms": [polynomial, ...]}`; `constant` carries `value`,
/// `direct_sum` carries `parts`, `gauged` carries `inner` and `gauge`. The
/// domain defaults to the unit disc.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldJson {
    pub variant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<PolynomialJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parts: Option<Vec<FieldJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<Box<FieldJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<PolynomialJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DiscJson>,
}

impl FieldJson {
    pub fn from_field(f: &MetricField) -> Self {
        let mut out = FieldJson {
            variant: f.variant_name().into(),
            terms: None,
            value: None,
            parts: None,
            inner: None,
            gauge: None,
            domain: Some(DiscJson::from_disc(f.domain())),
        };
        match f.kind() {
            FieldKind::FlatSum(t) | FieldKind::DualFlatSum(t) => {
                out.terms = Some(t.iter().map(PolynomialJson::from_polynomial).collect());
            }
            FieldKind::Constant(v) => out.value = Some(MatrixJson::from_hermitian(v)),
            FieldKind::DirectSum(parts) => out.parts = Some(parts.iter().map(FieldJson::from_field).collect()),
            FieldKind::Gauged { inner, gauge } => {
                out.inner = Some(Box::new(FieldJson::from_field(inner)));
                out.gauge = Some(PolynomialJson::from_polynomial(gauge));
            }
        }
        out
    }

    pub fn to_field(&self) -> Result<MetricField> {
        let domain = match &self.domain {
            Some(d) => d.to_disc()?,
            None => DiscSpec::unit(),
        };
        let missing = |what: &str| Error::InvalidInput(format!("variant '{}' needs '{what}'", self.variant));
        let terms = || -> Result<Vec<MatrixPolynomial>> {
            self.terms
                .as_ref()
                .ok_or_else(|| missing("terms"))?
                .iter()
                .map(PolynomialJson::to_polynomial)
                .collect()
        };
        match self.variant.as_str() {
            "flat_sum" => MetricField::flat_sum(terms()?, domain),
            "dual_flat_sum" => MetricField::dual_flat_sum(terms()?, domain),
            "constant" => MetricField::constant(self.value.as_ref().ok_or_else(|| missing("value"))?.to_hermitian()?, domain),
            "direct_sum" => {
                let parts = self
                    .parts
                    .as_ref()
                    .ok_or_else(|| missing("parts"))?
                    .iter()
                    .map(|p| Ok(p.to_field()?.with_domain(domain)))
                    .collect::<Result<Vec<_>>>()?;
                MetricField::direct_sum(parts, domain)
            }
            "gauged" => {
                let inner = self.inner.as_ref().ok_or_else(|| missing("inner"))?.to_field()?.with_domain(domain);
                let gauge = self.gauge.as_ref().ok_or_else(|| missing("gauge"))?.to_polynomial()?;
                MetricField::gauged(inner, gauge)
            }
            other => Err(Error::InvalidInput(format!("unknown field variant '{other}'"))),
        }
    }
}

pub fn points_from_json(points: &[[f64; 2]]) -> Vec<Complex64> {
    points.iter().map(|p| c64(p[0], p[1])).collect()
}

pub fn discs_from_json(discs: &[DiscJson]) -> Result<Vec<DiscSpec>> {
    discs.iter().map(DiscJson::to_disc).collect()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let file = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Parses `{"kind": "psd", ...}` matrices with the default tolerance.
pub fn psd_from_json(m: &MatrixJson) -> Result<Psd> {
    m.to_psd(DEFAULT_PSD_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;

    #[test]
    fn matrix_round_trip() {
        let m = random::matrix(&mut random::rng(1), 3, 3, 1.0);
        let j = MatrixJson::from_matrix(&m);
        let s = serde_json::to_string(&j).unwrap();
        let back: MatrixJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_matrix().unwrap(), m);
    }

    #[test]
    fn ragged_matrix_rejected() {
        let j: MatrixJson = serde_json::from_str(r#"{"dim":2,"entries":[[[1,0],[0,0]],[[0,0]]]}"#).unwrap();
        assert!(j.to_matrix().is_err());
    }

    #[test]
    fn laurent_validates_symmetry() {
        let f = random::symbol(&mut random::rng(2), 2, 2, 0.1);
        let j = LaurentJson::from_laurent(&f);
        assert_eq!(j.to_laurent().unwrap(), f);
        let mut bad = j.clone();
        bad.coeffs.get_mut("-1").unwrap().entries[0][1][0] += 1.0;
        assert!(bad.to_laurent().is_err());
        let mut missing = j;
        missing.coeffs.remove("2");
        assert!(missing.to_laurent().is_err());
    }

    #[test]
    fn field_round_trip() {
        let t = vec![
            MatrixPolynomial::scalar(&[c64(1.0, 0.0)]).unwrap(),
            MatrixPolynomial::scalar(&[c64(0.0, 0.0), c64(1.0, 0.0)]).unwrap(),
        ];
        let f = MetricField::dual_flat_sum(t, DiscSpec::unit()).unwrap();
        let j = FieldJson::from_field(&f);
        let s = serde_json::to_string(&j).unwrap();
        let back: FieldJson = serde_json::from_str(&s).unwrap();
        assert_eq!(back.to_field().unwrap(), f);
        let short: FieldJson = serde_json::from_str(r#"{"variant":"flat_sum"}"#).unwrap();
        assert!(short.to_field().is_err());
    }
}
