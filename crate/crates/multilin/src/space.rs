//! Finite-dimensional complex Hilbert spaces and their elements.
//!
//! The inner product is conjugate-linear in the *second* argument:
//! `⟨u, v⟩ = Σ_a u_a · conj(v_a)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A finite-dimensional complex Hilbert space.
///
/// Spaces are interchangeable wherever their dimensions agree; the label is
/// carried for diagnostics only and never takes part in equality.
#[derive(Debug, Clone)]
pub struct HilbertSpace {
    dim: usize,
    label: String,
}

impl HilbertSpace {
    /// Creates a space of dimension `dim >= 1`.
    pub fn new(dim: usize, label: impl Into<String>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Domain("space dimension must be at least 1".into()));
        }
        Ok(Self { dim, label: label.into() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Tensor product space; dimension is the product of the factors.
    pub fn tensor(&self, other: &HilbertSpace) -> HilbertSpace {
        HilbertSpace {
            dim: self.dim * other.dim,
            label: format!("{}(x){}", self.label, other.label),
        }
    }
}

impl PartialEq for HilbertSpace {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
    }
}

impl Eq for HilbertSpace {}

/// An element of a [`HilbertSpace`], stored as coordinates in the standard
/// basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    space: HilbertSpace,
    coords: Vec<Complex64>,
}

impl Vector {
    pub fn new(space: HilbertSpace, coords: Vec<Complex64>) -> Result<Self> {
        if coords.len() != space.dim() {
            return Err(Error::Shape(format!(
                "vector has {} coordinates but the space has dimension {}",
                coords.len(),
                space.dim()
            )));
        }
        Ok(Self { space, coords })
    }

    /// Vector with the given real coordinates.
    pub fn from_reals(space: HilbertSpace, coords: &[f64]) -> Result<Self> {
        Self::new(space, coords.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zero(space: HilbertSpace) -> Self {
        let coords = vec![Complex64::new(0.0, 0.0); space.dim()];
        Self { space, coords }
    }

    /// Standard basis vector `e_index`.
    pub fn basis(space: HilbertSpace, index: usize) -> Result<Self> {
        if index >= space.dim() {
            return Err(Error::Domain(format!(
                "basis index {} out of range for dimension {}",
                index,
                space.dim()
            )));
        }
        let mut coords = vec![Complex64::new(0.0, 0.0); space.dim()];
        coords[index] = Complex64::new(1.0, 0.0);
        Ok(Self { space, coords })
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Inner product, conjugate-linear in the second argument.
    pub fn inner(&self, other: &Vector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::Shape(format!(
                "inner product between dimensions {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (u, v) in self.coords.iter().zip(&other.coords) {
            acc += u * v.conj();
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, alpha: Complex64) -> Vector {
        Vector {
            space: self.space.clone(),
            coords: self.coords.iter().map(|c| alpha * c).collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Result<Vector> {
        if self.dim() != other.dim() {
            return Err(Error::Shape("vector sum between different dimensions".into()));
        }
        Ok(Vector {
            space: self.space.clone(),
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Vector {
        Vector {
            space: self.space.clone(),
            coords: self.coords.iter().map(|c| c.conj()).collect(),
        }
    }

    /// Largest coordinate deviation against `other`; panics on shape mismatch.
    pub fn max_abs_diff(&self, other: &Vector) -> f64 {
        assert_eq!(self.dim(), other.dim(), "max_abs_diff on mismatched vectors");
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_dimension_zero() {
        assert!(matches!(HilbertSpace::new(0, "H"), Err(Error::Domain(_))));
    }

    #[test]
    fn spaces_compare_by_dimension_only() {
        let h = HilbertSpace::new(3, "H").unwrap();
        let k = HilbertSpace::new(3, "K").unwrap();
        let l = HilbertSpace::new(2, "L").unwrap();
        assert_eq!(h, k);
        assert_ne!(h, l);
    }

    #[test]
    fn inner_product_conjugates_second_argument() {
        let h = HilbertSpace::new(2, "H").unwrap();
        let u = Vector::new(h.clone(), vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let v = Vector::new(h, vec![c(0.0, 1.0), c(1.0, 0.0)]).unwrap();
        // ⟨u, v⟩ = 1·conj(i) + i·conj(1) = -i + i = 0
        assert_eq!(u.inner(&v).unwrap(), c(0.0, 0.0));
        // ⟨v, u⟩ = i·conj(1) + 1·conj(i) = i - i = 0, and ⟨u, u⟩ = 2
        assert_eq!(u.inner(&u).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn inner_is_linear_in_first_antilinear_in_second() {
        let h = HilbertSpace::new(2, "H").unwrap();
        let u = Vector::new(h.clone(), vec![c(1.0, 2.0), c(-0.5, 0.25)]).unwrap();
        let v = Vector::new(h, vec![c(0.5, -1.0), c(2.0, 1.5)]).unwrap();
        let alpha = c(0.3, -0.7);
        let lhs = u.scale(alpha).inner(&v).unwrap();
        assert!((lhs - alpha * u.inner(&v).unwrap()).norm() < 1e-15);
        let rhs = u.inner(&v.scale(alpha)).unwrap();
        assert!((rhs - alpha.conj() * u.inner(&v).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn norm_matches_inner_product() {
        let h = HilbertSpace::new(3, "H").unwrap();
        let u = Vector::new(h, vec![c(3.0, 0.0), c(0.0, 4.0), c(0.0, 0.0)]).unwrap();
        assert!((u.norm() - 5.0).abs() < 1e-15);
        assert!((u.inner(&u).unwrap().re - 25.0).abs() < 1e-12);
    }

    #[test]
    fn basis_vectors_are_orthonormal() {
        let h = HilbertSpace::new(3, "H").unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let ei = Vector::basis(h.clone(), i).unwrap();
                let ej = Vector::basis(h.clone(), j).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_eq!(ei.inner(&ej).unwrap(), c(expect, 0.0));
            }
        }
        assert!(Vector::basis(h, 3).is_err());
    }
}
