//! Currying, adjoints, mates and scalar forms.
//!
//! The mate at slot `i` trades the output of a map against input `i`:
//! coefficients are transposed across that pair of axes and conjugated.
//! Conjugation makes the mate satisfy an exact adjunction identity on
//! complex data (see `mate`), reduces to the usual adjoint at arity 1, and
//! makes the operation an involution.

use num_complex::Complex64;

use crate::dense;
use crate::error::{Error, Result};
use crate::multimap::MultiMap;
use crate::space::Vector;
use crate::spectral;

/// A multilinear map with one input slot held open: a family of linear
/// operators from that slot's space, parameterized by the remaining inputs.
#[derive(Debug, Clone)]
pub struct CurriedMap {
    base: MultiMap,
    slot: usize,
}

/// Holds slot `slot` of `t` open.
pub fn curry(t: &MultiMap, slot: usize) -> Result<CurriedMap> {
    if slot >= t.arity() {
        return Err(Error::Usage(format!(
            "curry slot {slot} out of range for arity {}",
            t.arity()
        )));
    }
    Ok(CurriedMap {
        base: t.clone(),
        slot,
    })
}

impl CurriedMap {
    pub fn base(&self) -> &MultiMap {
        &self.base
    }

    pub fn slot(&self) -> usize {
        self.slot
    }

    /// The linear operator obtained by filling every other slot with the
    /// given vectors (in original slot order, the curried slot skipped).
    pub fn evaluate(&self, others: &[Vector]) -> Result<MultiMap> {
        let n = self.base.arity();
        if others.len() != n - 1 {
            return Err(Error::Shape(format!(
                "curried evaluation needs {} vectors, got {}",
                n - 1,
                others.len()
            )));
        }
        let mut data = self.base.coeffs().to_vec();
        let mut shape = self.base.shape();
        for j in (0..n).rev() {
            if j == self.slot {
                continue;
            }
            let pos = if j < self.slot { j } else { j - 1 };
            let v = &others[pos];
            if v.space() != &self.base.domain()[j] {
                return Err(Error::Shape(format!(
                    "vector for slot {j} has dimension {}, expected {}",
                    v.space().dim(),
                    self.base.domain()[j].dim()
                )));
            }
            let (d, s) = dense::contract_axis(&data, &shape, 1 + j, v.coords());
            data = d;
            shape = s;
        }
        // Remaining axes: output, then the open slot.
        MultiMap::new(
            vec![self.base.domain()[self.slot].clone()],
            self.base.codomain().clone(),
            data,
        )
    }

    /// Returns the underlying map unchanged; currying is a view, not a
    /// transformation of the coefficients.
    pub fn uncurry(self) -> MultiMap {
        self.base
    }
}

/// Adjoint of a linear map: the conjugate transpose of its matrix, the
/// unique operator with `⟨A x, y⟩ = ⟨x, A* y⟩`.
pub fn adjoint(a: &MultiMap) -> Result<MultiMap> {
    if a.arity() != 1 {
        return Err(Error::Usage(format!(
            "adjoint is defined for linear maps, got arity {}; use mate for higher arity",
            a.arity()
        )));
    }
    let k = a.codomain().dim();
    let d = a.domain()[0].dim();
    let data = dense::conj_transpose(a.coeffs(), k, d);
    MultiMap::new(
        vec![a.codomain().clone()],
        a.domain()[0].clone(),
        data,
    )
}

/// Mate of `t` at input `i`: output and slot `i` trade places and all
/// coefficients are conjugated. The defining identity, exact on complex
/// data, is
///
/// `⟨T(x_1..x_n), y⟩ = ⟨x_i, T^(i)(conj x_1, .., y, .., conj x_n)⟩`
///
/// with `y` in position `i`. Taking the mate at the same slot twice returns
/// the original map bit for bit, and at arity 1 the mate is the adjoint.
pub fn mate(t: &MultiMap, i: usize) -> Result<MultiMap> {
    let n = t.arity();
    if i >= n {
        return Err(Error::Usage(format!(
            "mate slot {i} out of range for arity {n}"
        )));
    }
    let in_shape = t.shape();
    let mut out_shape = in_shape.clone();
    out_shape[0] = in_shape[1 + i];
    out_shape[1 + i] = in_shape[0];
    let mut data = dense::reindex(t.coeffs(), &in_shape, &out_shape, |out_idx, in_idx| {
        in_idx.copy_from_slice(out_idx);
        in_idx[0] = out_idx[1 + i];
        in_idx[1 + i] = out_idx[0];
    });
    for z in &mut data {
        *z = z.conj();
    }
    let mut domain = t.domain().to_vec();
    let codomain = std::mem::replace(&mut domain[i], t.codomain().clone());
    MultiMap::new(domain, codomain, data)
}

/// The scalar form `(x_1, .., x_n, y) ↦ ⟨T(x_1..x_n), y⟩`, multilinear in
/// the inputs and conjugate-linear in `y`.
#[derive(Debug, Clone)]
pub struct MultiForm {
    map: MultiMap,
}

pub fn as_form(t: &MultiMap) -> MultiForm {
    MultiForm { map: t.clone() }
}

impl MultiForm {
    pub fn map(&self) -> &MultiMap {
        &self.map
    }

    pub fn eval(&self, xs: &[Vector], y: &Vector) -> Result<Complex64> {
        let tx = self.map.apply(xs)?;
        tx.inner(y)
    }
}

/// True when `A` equals its adjoint entrywise within `tol`.
pub fn is_self_adjoint(a: &MultiMap, tol: f64) -> Result<bool> {
    let (data, n) = spectral::square_data(a, "is_self_adjoint")?;
    for i in 0..n {
        for j in 0..n {
            if (data[i * n + j] - data[j * n + i].conj()).norm() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True when `A* A = A A*` entrywise within `tol`.
pub fn is_normal(a: &MultiMap, tol: f64) -> Result<bool> {
    let (data, n) = spectral::square_data(a, "is_normal")?;
    let astar = dense::conj_transpose(&data, n, n);
    let sa = dense::matmul(&astar, &data, n, n, n);
    let as_ = dense::matmul(&data, &astar, n, n, n);
    for (x, y) in sa.iter().zip(&as_) {
        if (x - y).norm() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True when `A` is self-adjoint with spectrum bounded below by `-tol`.
pub fn is_positive(a: &MultiMap, tol: f64) -> Result<bool> {
    if !is_self_adjoint(a, tol)? {
        return Ok(false);
    }
    let dec = spectral::eigh(a)?;
    Ok(dec
        .eigenvalues()
        .first()
        .is_none_or(|l| l.re >= -tol))
}
