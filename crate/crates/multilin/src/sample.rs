//! Deterministic random test data.
//!
//! Every generator draws from a caller-provided ChaCha stream, so a single
//! 64-bit seed reproduces an entire check run exactly. Magnitudes are kept
//! at desk scale (entries in the unit box) so residual tolerances mean the
//! same thing across checks.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dense::CZERO;
use crate::duality::adjoint;
use crate::error::Result;
use crate::multimap::MultiMap;
use crate::poly::MultiPoly;
use crate::space::{HilbertSpace, Vector};
use crate::spectral::eigh;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_in_box(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn real_in_box(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(-1.0..1.0)
}

pub fn vector(rng: &mut ChaCha8Rng, space: &HilbertSpace) -> Vector {
    let coords = (0..space.dim()).map(|_| complex_in_box(rng)).collect();
    Vector::new(space.clone(), coords).expect("coordinate count matches the space")
}

pub fn real_vector(rng: &mut ChaCha8Rng, space: &HilbertSpace) -> Vector {
    let coords: Vec<f64> = (0..space.dim()).map(|_| real_in_box(rng)).collect();
    Vector::from_reals(space.clone(), &coords).expect("coordinate count matches the space")
}

/// A random vector normalized to unit length (redrawn when degenerate).
pub fn unit_vector(rng: &mut ChaCha8Rng, space: &HilbertSpace) -> Vector {
    loop {
        let v = vector(rng, space);
        let n = v.norm();
        if n > 1e-3 {
            return v.scale(Complex64::new(1.0 / n, 0.0));
        }
    }
}

/// Dense random map with entries in the unit box.
pub fn multimap(
    rng: &mut ChaCha8Rng,
    domain: Vec<HilbertSpace>,
    codomain: HilbertSpace,
) -> Result<MultiMap> {
    let len = codomain.dim() * domain.iter().map(|h| h.dim()).product::<usize>();
    let coeffs = (0..len).map(|_| complex_in_box(rng)).collect();
    MultiMap::new(domain, codomain, coeffs)
}

/// Dense random map with real entries in the unit box.
pub fn real_multimap(
    rng: &mut ChaCha8Rng,
    domain: Vec<HilbertSpace>,
    codomain: HilbertSpace,
) -> Result<MultiMap> {
    let len = codomain.dim() * domain.iter().map(|h| h.dim()).product::<usize>();
    let coeffs = (0..len)
        .map(|_| Complex64::new(real_in_box(rng), 0.0))
        .collect();
    MultiMap::new(domain, codomain, coeffs)
}

/// Random Hermitian operator with entries in the unit box.
pub fn hermitian(rng: &mut ChaCha8Rng, space: &HilbertSpace) -> MultiMap {
    let n = space.dim();
    let mut coeffs = vec![CZERO; n * n];
    for i in 0..n {
        coeffs[i * n + i] = Complex64::new(real_in_box(rng), 0.0);
        for j in i + 1..n {
            let z = complex_in_box(rng);
            coeffs[i * n + j] = z;
            coeffs[j * n + i] = z.conj();
        }
    }
    MultiMap::new(vec![space.clone()], space.clone(), coeffs)
        .expect("square coefficient block")
}

/// Random unitary: the eigenbasis of a random Hermitian operator.
pub fn unitary(rng: &mut ChaCha8Rng, space: &HilbertSpace) -> MultiMap {
    loop {
        let h = hermitian(rng, space);
        if let Ok(dec) = eigh(&h) {
            return dec.basis().clone();
        }
    }
}

/// Random Hermitian operator with eigenvalues drawn uniformly from
/// `[lo, hi]`, assembled as `U diag(λ) U*` from a random eigenbasis.
pub fn hermitian_with_spectrum_in(
    rng: &mut ChaCha8Rng,
    space: &HilbertSpace,
    lo: f64,
    hi: f64,
) -> MultiMap {
    let u = unitary(rng, space);
    let n = space.dim();
    let lambda: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(lo..=hi), 0.0))
        .collect();
    conjugated_diagonal(&u, &lambda)
}

/// Random normal operator `U diag(λ) U*` with complex `λ` in the unit box.
pub fn normal_operator(rng: &mut ChaCha8Rng, space: &HilbertSpace) -> MultiMap {
    let u = unitary(rng, space);
    let lambda: Vec<Complex64> = (0..space.dim()).map(|_| complex_in_box(rng)).collect();
    conjugated_diagonal(&u, &lambda)
}

fn conjugated_diagonal(u: &MultiMap, lambda: &[Complex64]) -> MultiMap {
    let space = u.codomain().clone();
    let d = MultiMap::diagonal(&space, lambda).expect("diagonal length matches the space");
    let ustar = adjoint(u).expect("eigenbasis is a linear map");
    u.compose(&[d.compose(&[ustar]).expect("square chain")])
        .expect("square chain")
}

/// Random univariate polynomial with real coefficients in the unit box and
/// degree at most `max_deg`.
pub fn univariate_real_poly(rng: &mut ChaCha8Rng, max_deg: u32) -> MultiPoly {
    let deg = rng.gen_range(0..=max_deg);
    let terms = (0..=deg)
        .map(|k| (Complex64::new(real_in_box(rng), 0.0), vec![k]))
        .collect();
    MultiPoly::new(1, terms).expect("univariate exponent rows")
}

/// Random polynomial in `nvars` variables: up to `max_terms` monomials with
/// per-variable degree at most `max_deg` and real coefficients in the unit
/// box. May canonicalize to fewer terms when exponent rows collide.
pub fn multipoly(
    rng: &mut ChaCha8Rng,
    nvars: usize,
    max_deg: u32,
    max_terms: usize,
) -> MultiPoly {
    let count = rng.gen_range(1..=max_terms.max(1));
    let terms = (0..count)
        .map(|_| {
            let exps: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..=max_deg)).collect();
            (Complex64::new(real_in_box(rng), 0.0), exps)
        })
        .collect();
    MultiPoly::new(nvars, terms).expect("exponent rows match nvars")
}

/// Uniform random permutation of `0..n` (Fisher-Yates).
pub fn permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        p.swap(i, j);
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::duality::is_self_adjoint;
    use crate::multimap::MultiMap;
    use crate::spectral::eig_normal;

    #[test]
    fn equal_seeds_reproduce_equal_draws() {
        let h = HilbertSpace::new(3, "H").unwrap();
        let a = hermitian(&mut rng(9), &h);
        let b = hermitian(&mut rng(9), &h);
        assert_eq!(a.coeffs(), b.coeffs());
    }

    #[test]
    fn hermitian_draws_are_self_adjoint() {
        let h = HilbertSpace::new(4, "H").unwrap();
        let mut r = rng(3);
        for _ in 0..10 {
            let a = hermitian(&mut r, &h);
            assert!(is_self_adjoint(&a, 0.0).unwrap());
        }
    }

    #[test]
    fn unitary_draws_invert_by_adjoint() {
        let h = HilbertSpace::new(3, "H").unwrap();
        let mut r = rng(5);
        for _ in 0..5 {
            let u = unitary(&mut r, &h);
            let eye = adjoint(&u).unwrap().compose(std::slice::from_ref(&u)).unwrap();
            assert!(eye.max_abs_diff(&MultiMap::identity(&h)) < 1e-10);
        }
    }

    #[test]
    fn spectrum_window_draws_stay_inside() {
        let h = HilbertSpace::new(4, "H").unwrap();
        let mut r = rng(7);
        for _ in 0..5 {
            let a = hermitian_with_spectrum_in(&mut r, &h, -1.0, 1.0);
            let dec = eigh(&a).unwrap();
            for l in dec.real_eigenvalues() {
                assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&l), "eigenvalue {l}");
            }
        }
    }

    #[test]
    fn normal_draws_commute_with_their_adjoints() {
        let h = HilbertSpace::new(3, "H").unwrap();
        let mut r = rng(11);
        for _ in 0..5 {
            let a = normal_operator(&mut r, &h);
            assert!(eig_normal(&a).is_ok());
        }
    }

    #[test]
    fn unit_vectors_have_unit_norm() {
        let h = HilbertSpace::new(5, "H").unwrap();
        let mut r = rng(13);
        for _ in 0..10 {
            assert!((unit_vector(&mut r, &h).norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn permutations_are_bijections() {
        let mut r = rng(17);
        for n in 1..8 {
            let p = permutation(&mut r, n);
            let mut seen = vec![false; n];
            for &v in &p {
                assert!(!seen[v]);
                seen[v] = true;
            }
        }
    }
}
