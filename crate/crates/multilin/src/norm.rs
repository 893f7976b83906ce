//! Operator norms and certified two-sided brackets.
//!
//! For arity 1 the norm is the largest singular value and is computed
//! exactly (up to rounding). For higher arity the injective norm is NP-hard
//! in general, so the engine reports a bracket instead: an alternating
//! maximization gives a certified lower bound (every iterate is an attained
//! value on unit inputs), and the smallest spectral norm over all
//! matricizations gives an upper bound (grouping indices can only enlarge
//! the supremum, since unit rank-one inputs fuse to unit vectors).

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dense::{self, CZERO};
use crate::error::{Error, Result};
use crate::multimap::MultiMap;
use crate::spectral::{jacobi_hermitian, OFF_DIAGONAL_TOL};

/// Spectral norm (largest singular value) of a dense row-major matrix.
///
/// The matrix is rescaled by its largest entry before forming the Gram
/// matrix, which keeps the iteration well-conditioned for inputs whose norm
/// is far from 1 (high matrix powers, tensor products of many factors).
pub(crate) fn spectral_norm_matrix(m: &[Complex64], rows: usize, cols: usize) -> Result<f64> {
    debug_assert_eq!(m.len(), rows * cols);
    let scale = dense::max_abs(m);
    if scale == 0.0 {
        return Ok(0.0);
    }
    let inv = 1.0 / scale;
    // Gram matrix on the smaller side.
    let side = rows.min(cols);
    let mut g = vec![CZERO; side * side];
    if cols <= rows {
        for i in 0..side {
            for j in i..side {
                let mut acc = CZERO;
                for r in 0..rows {
                    acc += (m[r * cols + i] * inv).conj() * (m[r * cols + j] * inv);
                }
                g[i * side + j] = acc;
                g[j * side + i] = acc.conj();
            }
        }
    } else {
        for i in 0..side {
            for j in i..side {
                let mut acc = CZERO;
                for c in 0..cols {
                    acc += (m[i * cols + c] * inv) * (m[j * cols + c] * inv).conj();
                }
                g[i * side + j] = acc;
                g[j * side + i] = acc.conj();
            }
        }
    }
    for i in 0..side {
        g[i * side + i] = Complex64::new(g[i * side + i].re, 0.0);
    }
    let off_tol = OFF_DIAGONAL_TOL * dense::max_abs(&g).max(1.0);
    jacobi_hermitian(&mut g, side, None, off_tol)?;
    let lmax = (0..side)
        .map(|i| g[i * side + i].re)
        .fold(0.0f64, f64::max);
    Ok(scale * lmax.max(0.0).sqrt())
}

/// Exact operator norm of a linear map (largest singular value).
pub fn operator_norm(a: &MultiMap) -> Result<f64> {
    if a.arity() != 1 {
        return Err(Error::Usage(format!(
            "operator_norm is exact for linear maps only, got arity {}; use norm_bounds",
            a.arity()
        )));
    }
    let n = a.codomain().dim();
    let d = a.domain()[0].dim();
    spectral_norm_matrix(a.coeffs(), n, d)
}

/// A two-sided bracket around an operator norm. `lower <= upper` always;
/// `exact` marks the arity-1 case where both sides are the singular value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
}

impl NormBracket {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// True when two brackets could describe the same norm.
    pub fn overlaps(&self, other: &NormBracket) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

/// Search parameters for the lower-bound maximization.
#[derive(Debug, Clone, Copy)]
pub struct NormParams {
    /// Independent random starts; the best value over all of them is kept.
    pub restarts: usize,
    /// Alternating update rounds per start.
    pub max_iters: usize,
    /// Stop a start once the value improves by less than this.
    pub tol: f64,
    /// Seed for the start vectors; equal seeds give identical brackets.
    pub seed: u64,
}

impl Default for NormParams {
    fn default() -> Self {
        NormParams {
            restarts: 8,
            max_iters: 200,
            tol: 1e-10,
            seed: 0,
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.iter().map(|z| z / n).collect();
        }
    }
}

/// Value `‖T(x_1..x_n)‖` for the current slot vectors.
fn value_at(t: &MultiMap, xs: &[Vec<Complex64>]) -> f64 {
    let mut data = t.coeffs().to_vec();
    let mut shape = t.shape();
    for j in (0..xs.len()).rev() {
        let (d, s) = dense::contract_axis(&data, &shape, 1 + j, &xs[j]);
        data = d;
        shape = s;
    }
    data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Gradient of `Re⟨T(x), y⟩` in slot `j`: the tensor contracted with
/// `conj(y)` on the output axis and with every other slot vector.
fn slot_gradient(t: &MultiMap, xs: &[Vec<Complex64>], y: &[Complex64], j: usize) -> Vec<Complex64> {
    let conj_y: Vec<Complex64> = y.iter().map(|z| z.conj()).collect();
    let (mut data, mut shape) = dense::contract_axis(t.coeffs(), &t.shape(), 0, &conj_y);
    for s in (0..xs.len()).rev() {
        if s == j {
            continue;
        }
        let (d, sh) = dense::contract_axis(&data, &shape, s, &xs[s]);
        data = d;
        shape = sh;
    }
    data
}

fn als_lower_bound(t: &MultiMap, params: &NormParams) -> f64 {
    let n = t.arity();
    let kdim = t.codomain().dim();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut best = 0.0f64;
    for _ in 0..params.restarts {
        let mut xs: Vec<Vec<Complex64>> = t
            .domain()
            .iter()
            .map(|h| random_unit(&mut rng, h.dim()))
            .collect();
        let mut prev = 0.0f64;
        for _ in 0..params.max_iters {
            let mut tx = t.coeffs().to_vec();
            let mut shape = t.shape();
            for j in (0..n).rev() {
                let (d, s) = dense::contract_axis(&tx, &shape, 1 + j, &xs[j]);
                tx = d;
                shape = s;
            }
            let val = tx.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if val <= f64::MIN_POSITIVE * kdim as f64 {
                break;
            }
            let y: Vec<Complex64> = tx.iter().map(|z| z / val).collect();
            for j in 0..n {
                let g = slot_gradient(t, &xs, &y, j);
                let gn = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                if gn <= f64::MIN_POSITIVE {
                    continue;
                }
                xs[j] = g.iter().map(|z| z.conj() / gn).collect();
            }
            if (val - prev).abs() < params.tol {
                prev = val;
                break;
            }
            prev = val;
        }
        let final_val = value_at(t, &xs);
        best = best.max(final_val.max(prev));
    }
    best
}

/// Certified bracket around the injective norm of a multilinear map.
///
/// Exact (lower = upper) for arity 1. For higher arity the lower bound is
/// the best value found by alternating maximization over `params.restarts`
/// seeded starts, and the upper bound is the smallest spectral norm over
/// all matricizations of the coefficient tensor.
pub fn norm_bounds(t: &MultiMap, params: &NormParams) -> Result<NormBracket> {
    if t.arity() == 1 {
        let s = operator_norm(t)?;
        return Ok(NormBracket {
            lower: s,
            upper: s,
            exact: true,
        });
    }
    let shape = t.shape();
    let mut upper = f64::INFINITY;
    for axis in 0..shape.len() {
        let (m, rows, cols) = dense::matricize(t.coeffs(), &shape, axis);
        upper = upper.min(spectral_norm_matrix(&m, rows, cols)?);
    }
    let lower = als_lower_bound(t, params).min(upper);
    Ok(NormBracket {
        lower,
        upper,
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::HilbertSpace;

    fn r(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn operator_norm_of_the_identity_is_one() {
        let h = HilbertSpace::new(4, "H").unwrap();
        let id = MultiMap::identity(&h);
        assert!((operator_norm(&id).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_of_a_diagonal_is_the_largest_magnitude() {
        let h = HilbertSpace::new(3, "H").unwrap();
        let d = MultiMap::diagonal(&h, &[r(3.0), r(-1.0), r(0.5)]).unwrap();
        assert!((operator_norm(&d).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn operator_norm_rejects_higher_arity() {
        let h = HilbertSpace::new(2, "H").unwrap();
        let had = MultiMap::hadamard(&h, 2).unwrap();
        assert!(matches!(operator_norm(&had), Err(Error::Usage(_))));
    }

    #[test]
    fn arity_one_bracket_is_exact() {
        let a = MultiMap::from_real_matrix(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let b = norm_bounds(&a, &NormParams::default()).unwrap();
        assert!(b.exact);
        assert!((b.lower - 3.0).abs() < 1e-12);
        assert_eq!(b.lower, b.upper);
    }

    #[test]
    fn rank_one_bilinear_map_brackets_tightly() {
        // T(x, y) = (x·a)(y·b) c with ‖a‖ = 5, ‖b‖ = 1, ‖c‖ = 1: norm 5.
        let a = [3.0, 4.0];
        let b = [1.0, 0.0];
        let c = [0.6, 0.8];
        let h = HilbertSpace::new(2, "H").unwrap();
        let mut coeffs = Vec::new();
        for ck in c {
            for ai in a {
                for bj in b {
                    coeffs.push(r(ck * ai * bj));
                }
            }
        }
        let t = MultiMap::new(vec![h.clone(), h.clone()], h, coeffs).unwrap();
        let bracket = norm_bounds(&t, &NormParams::default()).unwrap();
        assert!(bracket.contains(5.0), "bracket {bracket:?}");
        assert!(bracket.lower > 5.0 - 1e-6, "bracket {bracket:?}");
        assert!(bracket.upper < 5.0 + 1e-9, "bracket {bracket:?}");
    }

    #[test]
    fn hadamard_bracket_pins_norm_one() {
        let h = HilbertSpace::new(2, "H").unwrap();
        let had = MultiMap::hadamard(&h, 2).unwrap();
        let bracket = norm_bounds(&had, &NormParams::default()).unwrap();
        assert!(bracket.lower > 1.0 - 1e-6, "bracket {bracket:?}");
        assert!(bracket.upper < 1.0 + 1e-9, "bracket {bracket:?}");
    }

    #[test]
    fn zero_map_brackets_to_zero() {
        let h = HilbertSpace::new(2, "H").unwrap();
        let z = MultiMap::zero(vec![h.clone(), h.clone()], h).unwrap();
        let bracket = norm_bounds(&z, &NormParams::default()).unwrap();
        assert_eq!(bracket.lower, 0.0);
        assert_eq!(bracket.upper, 0.0);
    }

    #[test]
    fn equal_seeds_give_identical_brackets() {
        let h = HilbertSpace::new(3, "H").unwrap();
        let mut coeffs = Vec::new();
        for k in 0..27 {
            let k = k as f64;
            coeffs.push(Complex64::new((k * 0.37).sin(), (k * 0.61).cos()));
        }
        let t = MultiMap::new(vec![h.clone(), h.clone()], h, coeffs).unwrap();
        let p = NormParams {
            seed: 11,
            ..NormParams::default()
        };
        let b1 = norm_bounds(&t, &p).unwrap();
        let b2 = norm_bounds(&t, &p).unwrap();
        assert_eq!(b1, b2);
    }

    #[test]
    fn bracket_orders_lower_below_upper_on_random_tensors() {
        let h = HilbertSpace::new(2, "H").unwrap();
        let coeffs: Vec<Complex64> = (0..8)
            .map(|k| Complex64::new(((k * 7 + 3) % 11) as f64 - 5.0, ((k * 5 + 1) % 7) as f64))
            .collect();
        let t = MultiMap::new(vec![h.clone(), h.clone()], h, coeffs).unwrap();
        let bracket = norm_bounds(&t, &NormParams::default()).unwrap();
        assert!(bracket.lower <= bracket.upper);
        assert!(bracket.lower > 0.0);
    }
}
