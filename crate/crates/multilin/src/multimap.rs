//! Multilinear operators between finite-dimensional complex Hilbert spaces.
//!
//! A [`MultiMap`] `T` with domain `(H_1, ..., H_n)` and codomain `K` stores
//! the dense coefficient tensor `t[k; i_1..i_n]`, the `k`-th coordinate of
//! `T(e_{i_1}, ..., e_{i_n})`, row-major with the codomain axis first. All
//! values are immutable; every operation returns a fresh map.

use num_complex::Complex64;

use crate::dense;
use crate::error::{Error, Result};
use crate::space::{HilbertSpace, Vector};

#[derive(Debug, Clone, PartialEq)]
pub struct MultiMap {
    domain: Vec<HilbertSpace>,
    codomain: HilbertSpace,
    coeffs: Vec<Complex64>,
}

impl MultiMap {
    /// Builds a map from its coefficient tensor. The tensor length must equal
    /// `dim(K) · Π dim(H_j)`, and the arity must be at least 1: nullary maps
    /// are not modeled.
    pub fn new(
        domain: Vec<HilbertSpace>,
        codomain: HilbertSpace,
        coeffs: Vec<Complex64>,
    ) -> Result<Self> {
        if domain.is_empty() {
            return Err(Error::Usage("maps must have at least one input slot".into()));
        }
        let want = codomain.dim() * domain.iter().map(|h| h.dim()).product::<usize>();
        if coeffs.len() != want {
            return Err(Error::Shape(format!(
                "coefficient tensor has {} entries, expected {}",
                coeffs.len(),
                want
            )));
        }
        Ok(Self { domain, codomain, coeffs })
    }

    /// Identity map on `space`.
    pub fn identity(space: &HilbertSpace) -> Self {
        let d = space.dim();
        let mut coeffs = vec![dense::CZERO; d * d];
        for i in 0..d {
            coeffs[i * d + i] = Complex64::new(1.0, 0.0);
        }
        Self { domain: vec![space.clone()], codomain: space.clone(), coeffs }
    }

    /// Zero map of the given signature.
    pub fn zero(domain: Vec<HilbertSpace>, codomain: HilbertSpace) -> Result<Self> {
        let len = codomain.dim() * domain.iter().map(|h| h.dim()).product::<usize>();
        Self::new(domain, codomain, vec![dense::CZERO; len])
    }

    /// Arity-`n` entrywise product in the standard basis:
    /// `(x_1, ..., x_n) ↦ x_1 ⊙ ... ⊙ x_n`.
    pub fn hadamard(space: &HilbertSpace, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Usage("entrywise product needs arity >= 1".into()));
        }
        let d = space.dim();
        let shape: Vec<usize> = std::iter::repeat_n(d, arity + 1).collect();
        let mut coeffs = vec![dense::CZERO; dense::total_len(&shape)];
        let mut idx = vec![0usize; arity + 1];
        for k in 0..d {
            for slot in idx.iter_mut() {
                *slot = k;
            }
            coeffs[dense::offset(&shape, &idx)] = Complex64::new(1.0, 0.0);
        }
        Self::new(vec![space.clone(); arity], space.clone(), coeffs)
    }

    /// The multilinear extension of addition on basis tuples:
    /// `(e_{i_1}, ..., e_{i_n}) ↦ e_{i_1} + ... + e_{i_n}`. On general
    /// inputs each slot is weighted by the coordinate totals of the others,
    /// so this is not pointwise vector addition (no multilinear map is).
    pub fn coordinate_sum(space: &HilbertSpace, arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::Usage("coordinate sum needs arity >= 1".into()));
        }
        let d = space.dim();
        let shape: Vec<usize> = std::iter::repeat_n(d, arity + 1).collect();
        let mut coeffs = vec![dense::CZERO; dense::total_len(&shape)];
        let mut idx = vec![0usize; arity + 1];
        loop {
            let k = idx[0];
            let hits = idx[1..].iter().filter(|&&i| i == k).count();
            if hits > 0 {
                coeffs[dense::offset(&shape, &idx)] = Complex64::new(hits as f64, 0.0);
            }
            if !dense::step(&shape, &mut idx) {
                break;
            }
        }
        Self::new(vec![space.clone(); arity], space.clone(), coeffs)
    }

    /// Diagonal linear operator with the given diagonal entries.
    pub fn diagonal(space: &HilbertSpace, entries: &[Complex64]) -> Result<Self> {
        let d = space.dim();
        if entries.len() != d {
            return Err(Error::Shape(format!(
                "diagonal has {} entries for dimension {}",
                entries.len(),
                d
            )));
        }
        let mut coeffs = vec![dense::CZERO; d * d];
        for (i, &e) in entries.iter().enumerate() {
            coeffs[i * d + i] = e;
        }
        Self::new(vec![space.clone()], space.clone(), coeffs)
    }

    /// Linear operator from matrix rows (`rows[k][i]` maps `e_i` to
    /// `Σ_k rows[k][i] e_k`).
    pub fn from_matrix(rows: &[Vec<Complex64>]) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::Shape("matrix with no rows".into()));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::Shape("matrix with no columns".into()));
        }
        let mut coeffs = Vec::with_capacity(k * d);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Shape(format!(
                    "matrix row {} has {} entries, expected {}",
                    r,
                    row.len(),
                    d
                )));
            }
            coeffs.extend_from_slice(row);
        }
        let codomain = HilbertSpace::new(k, "K")?;
        let domain = HilbertSpace::new(d, "H")?;
        Self::new(vec![domain], codomain, coeffs)
    }

    /// Real-entry variant of [`MultiMap::from_matrix`].
    pub fn from_real_matrix(rows: &[Vec<f64>]) -> Result<Self> {
        let lifted: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_matrix(&lifted)
    }

    pub fn arity(&self) -> usize {
        self.domain.len()
    }

    pub fn domain(&self) -> &[HilbertSpace] {
        &self.domain
    }

    pub fn codomain(&self) -> &HilbertSpace {
        &self.codomain
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Tensor shape `[dim K, dim H_1, ..., dim H_n]`.
    pub fn shape(&self) -> Vec<usize> {
        let mut s = Vec::with_capacity(self.arity() + 1);
        s.push(self.codomain.dim());
        s.extend(self.domain.iter().map(|h| h.dim()));
        s
    }

    /// Coefficient `t[k; idx]`.
    pub fn coeff(&self, k: usize, idx: &[usize]) -> Complex64 {
        let shape = self.shape();
        let mut full = Vec::with_capacity(idx.len() + 1);
        full.push(k);
        full.extend_from_slice(idx);
        self.coeffs[dense::offset(&shape, &full)]
    }

    fn check_slot(&self, slot: usize, dim: usize, what: &str) -> Result<()> {
        if self.domain[slot].dim() != dim {
            return Err(Error::Shape(format!(
                "slot {} expects dimension {}, got {} {}",
                slot,
                self.domain[slot].dim(),
                dim,
                what
            )));
        }
        Ok(())
    }

    /// Applies the map to one vector per input slot.
    pub fn apply(&self, xs: &[Vector]) -> Result<Vector> {
        if xs.len() != self.arity() {
            return Err(Error::Shape(format!(
                "map of arity {} applied to {} vectors",
                self.arity(),
                xs.len()
            )));
        }
        for (j, x) in xs.iter().enumerate() {
            self.check_slot(j, x.dim(), "from the supplied vector")?;
        }
        let mut data = self.coeffs.clone();
        for x in xs.iter().rev() {
            data = dense::contract_last(&data, x.dim(), x.coords());
        }
        Vector::new(self.codomain.clone(), data)
    }

    /// Multicategorical composition: feeds the output of `parts[j]` into the
    /// `j`-th input slot, producing a map on the concatenated domains.
    pub fn compose(&self, parts: &[MultiMap]) -> Result<MultiMap> {
        if parts.len() != self.arity() {
            return Err(Error::Shape(format!(
                "map of arity {} composed with {} parts",
                self.arity(),
                parts.len()
            )));
        }
        for (j, part) in parts.iter().enumerate() {
            self.check_slot(j, part.codomain.dim(), "from the part's codomain")?;
        }
        let mut data = self.coeffs.clone();
        let mut shape = self.shape();
        for (j, part) in parts.iter().enumerate() {
            // The part's coefficient tensor, viewed with its input axes fused,
            // is exactly the axis-0 matricization: a dim(K_j) x Π dim(H_{j,l})
            // matrix. Replacing the slot axis keeps the row-major layout
            // consistent, so fused axes can be reinterpreted as separate axes
            // afterwards without moving data.
            let f = part.coeffs.len() / part.codomain.dim();
            let (next, next_shape) = dense::mode_product(&data, &shape, 1 + j, &part.coeffs, f);
            data = next;
            shape = next_shape;
        }
        let mut domain = Vec::new();
        for part in parts {
            domain.extend(part.domain.iter().cloned());
        }
        MultiMap::new(domain, self.codomain.clone(), data)
    }

    /// Tensor product of two maps. Output indices fuse row-major with the
    /// left factor major: `(T ⊗ T')[k·K' + k'; i.., i'..] = t[k; i..] · t'[k'; i'..]`.
    pub fn tensor(&self, other: &MultiMap) -> MultiMap {
        let k1 = self.codomain.dim();
        let k2 = other.codomain.dim();
        let f1 = self.coeffs.len() / k1;
        let f2 = other.coeffs.len() / k2;
        let mut coeffs = vec![dense::CZERO; self.coeffs.len() * other.coeffs.len()];
        for k in 0..k1 {
            for i1 in 0..f1 {
                let a = self.coeffs[k * f1 + i1];
                if a == dense::CZERO {
                    continue;
                }
                for kk in 0..k2 {
                    let out_base = (((k * k2 + kk) * f1) + i1) * f2;
                    let src = &other.coeffs[kk * f2..(kk + 1) * f2];
                    let dst = &mut coeffs[out_base..out_base + f2];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d = a * s;
                    }
                }
            }
        }
        let mut domain = self.domain.clone();
        domain.extend(other.domain.iter().cloned());
        MultiMap {
            domain,
            codomain: self.codomain.tensor(&other.codomain),
            coeffs,
        }
    }

    /// Slot permutation: `permute(T, π)(x_1, ..., x_n) = T(x_{π(1)}, ..., x_{π(n)})`
    /// with `π` given 0-based. Spaces travel with their slots. The relabeling
    /// is exact: no arithmetic is performed.
    pub fn permute(&self, pi: &[usize]) -> Result<MultiMap> {
        let n = self.arity();
        if pi.len() != n {
            return Err(Error::Shape(format!(
                "permutation of length {} for arity {}",
                pi.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for &p in pi {
            if p >= n || seen[p] {
                return Err(Error::Domain(format!(
                    "permutation {:?} is not a bijection on 0..{}",
                    pi, n
                )));
            }
            seen[p] = true;
        }
        // Slot j of the original receives x_{pi[j]}, so the new domain puts
        // the old slot-j space at position pi[j].
        let mut domain = self.domain.clone();
        for (j, &p) in pi.iter().enumerate() {
            domain[p] = self.domain[j].clone();
        }
        let in_shape = self.shape();
        let mut out_shape = Vec::with_capacity(n + 1);
        out_shape.push(self.codomain.dim());
        out_shape.extend(domain.iter().map(|h| h.dim()));
        let coeffs = dense::reindex(&self.coeffs, &in_shape, &out_shape, |out_idx, in_idx| {
            in_idx[0] = out_idx[0];
            for (j, &p) in pi.iter().enumerate() {
                in_idx[1 + j] = out_idx[1 + p];
            }
        });
        MultiMap::new(domain, self.codomain.clone(), coeffs)
    }

    pub fn scale(&self, alpha: Complex64) -> MultiMap {
        MultiMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            coeffs: self.coeffs.iter().map(|c| alpha * c).collect(),
        }
    }

    pub fn add(&self, other: &MultiMap) -> Result<MultiMap> {
        linear_combination(
            Complex64::new(1.0, 0.0),
            self,
            Complex64::new(1.0, 0.0),
            other,
        )
    }

    pub fn sub(&self, other: &MultiMap) -> Result<MultiMap> {
        linear_combination(
            Complex64::new(1.0, 0.0),
            self,
            Complex64::new(-1.0, 0.0),
            other,
        )
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> MultiMap {
        MultiMap {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            coeffs: self.coeffs.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Whether every coefficient is real (exactly zero imaginary part).
    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        dense::max_abs(&self.coeffs)
    }

    /// Largest coefficient deviation against `other`; panics on signature
    /// mismatch (a diagnostics helper, not part of the algebra).
    pub fn max_abs_diff(&self, other: &MultiMap) -> f64 {
        assert_eq!(self.shape(), other.shape(), "max_abs_diff on mismatched maps");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Entrywise linear combination `alpha · t + beta · u`. The two signatures
/// must agree slot by slot.
pub fn linear_combination(
    alpha: Complex64,
    t: &MultiMap,
    beta: Complex64,
    u: &MultiMap,
) -> Result<MultiMap> {
    if t.arity() != u.arity() {
        return Err(Error::Shape(format!(
            "combining maps of arities {} and {}",
            t.arity(),
            u.arity()
        )));
    }
    if t.codomain.dim() != u.codomain.dim() {
        return Err(Error::Shape("combining maps with different codomains".into()));
    }
    for j in 0..t.arity() {
        if t.domain[j].dim() != u.domain[j].dim() {
            return Err(Error::Shape(format!("slot {} differs between the summands", j)));
        }
    }
    let coeffs = t
        .coeffs
        .iter()
        .zip(&u.coeffs)
        .map(|(a, b)| alpha * a + beta * b)
        .collect();
    MultiMap::new(t.domain.clone(), t.codomain.clone(), coeffs)
}

/// The bilinear contraction `(H1 ⊗ H2) × (H1 ⊗ H2) → H1` pairing the second
/// tensor factors without conjugation and keeping the first argument's
/// `H1`-component. On basis tensors,
/// `(e_a ⊗ e_x) • (e_b ⊗ e_y) = δ_{x,y} e_a` for every `b`; general inputs
/// follow by bilinear extension, so the second argument's `H1`-factor enters
/// through the sum of its coordinates.
pub fn partial_contraction(h1: &HilbertSpace, h2: &HilbertSpace) -> MultiMap {
    let d1 = h1.dim();
    let d2 = h2.dim();
    let fused = h1.tensor(h2);
    let p = d1 * d2;
    let mut coeffs = vec![dense::CZERO; d1 * p * p];
    let shape = [d1, p, p];
    for a in 0..d1 {
        for x in 0..d2 {
            for b in 0..d1 {
                let idx = [a, a * d2 + x, b * d2 + x];
                coeffs[dense::offset(&shape, &idx)] = Complex64::new(1.0, 0.0);
            }
        }
    }
    MultiMap {
        domain: vec![fused.clone(), fused],
        codomain: h1.clone(),
        coeffs,
    }
}
