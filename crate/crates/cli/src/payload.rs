//! JSON payload grammar and codecs.
//!
//! Complex scalars are two-element arrays `[re, im]`, matrices are row-major
//! nested arrays, vectors are arrays of complex scalars, and polynomials are
//! sparse term lists `{"nvars": n, "terms": [{"c": [re, im], "k": [k1..kn]}]}`.

use multilin::{Error, HilbertSpace, MultiMap, MultiPoly, Result, Vector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A complex scalar on the wire.
pub type Cpx = [f64; 2];

pub fn decode_c(v: Cpx) -> Complex64 {
    Complex64::new(v[0], v[1])
}

pub fn encode_c(z: Complex64) -> Cpx {
    [z.re, z.im]
}

pub fn encode_vector(v: &Vector) -> Vec<Cpx> {
    v.coords().iter().map(|&z| encode_c(z)).collect()
}

pub fn decode_vector(space: &HilbertSpace, coords: &[Cpx]) -> Result<Vector> {
    Vector::new(space.clone(), coords.iter().map(|&c| decode_c(c)).collect())
}

/// Row-major matrix to a linear map; rows index the codomain.
pub fn decode_matrix(rows: &[Vec<Cpx>]) -> Result<MultiMap> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Usage("matrix payload has no rows".into()));
    }
    let m = rows[0].len();
    if m == 0 {
        return Err(Error::Usage("matrix payload has empty rows".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != m) {
        return Err(Error::Usage(format!(
            "matrix row {bad} has {} entries, expected {m}",
            rows[bad].len()
        )));
    }
    let coeffs = rows.iter().flatten().map(|&c| decode_c(c)).collect();
    MultiMap::new(
        vec![HilbertSpace::new(m, "H")?],
        HilbertSpace::new(n, "K")?,
        coeffs,
    )
}

/// Row-major matrix of a linear map; rows index the codomain.
pub fn encode_matrix(a: &MultiMap) -> Vec<Vec<Cpx>> {
    let m = a.domain()[0].dim();
    a.coeffs().chunks(m).map(|row| row.iter().map(|&z| encode_c(z)).collect()).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyTermJson {
    pub c: Cpx,
    pub k: Vec<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyJson {
    pub nvars: usize,
    pub terms: Vec<PolyTermJson>,
}

impl PolyJson {
    pub fn decode(&self) -> Result<MultiPoly> {
        let terms = self.terms.iter().map(|t| (decode_c(t.c), t.k.clone())).collect();
        MultiPoly::new(self.nvars, terms)
    }
}

/// Midpoint grid on an interval plus the multiplier sampled at its nodes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridPayload {
    pub interval: [f64; 2],
    pub npoints: usize,
    pub multiplier: Vec<Cpx>,
}

/// Input to `eval`: exactly one of `operator` (square matrix) or `grid`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalPayload {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operator: Option<Vec<Vec<Cpx>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridPayload>,
    pub poly: PolyJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub inputs: Vec<Vec<Cpx>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumPayload {
    pub matrix: Vec<Vec<Cpx>>,
    #[serde(default)]
    pub basis: bool,
}

/// A multilinear map in coefficient form: `coeffs[k; i_1..i_n]` row-major
/// with the codomain axis first.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormPayload {
    pub domain: Vec<usize>,
    pub codomain: usize,
    pub coeffs: Vec<Cpx>,
}

impl NormPayload {
    pub fn decode(&self) -> Result<MultiMap> {
        let domain = self
            .domain
            .iter()
            .map(|&d| HilbertSpace::new(d, "H"))
            .collect::<Result<Vec<_>>>()?;
        let codomain = HilbertSpace::new(self.codomain, "K")?;
        MultiMap::new(domain, codomain, self.coeffs.iter().map(|&c| decode_c(c)).collect())
    }
}

/// Parse a payload, turning serde's message (which names the offending line
/// and column) into a usage error.
pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Usage(format!("payload: {e}")))
}
