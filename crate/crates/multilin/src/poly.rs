//! Sparse multivariate polynomials over ℂ.
//!
//! A [`MultiPoly`] is a list of `(coefficient, exponent vector)` terms kept in
//! canonical form: terms sorted graded-lexicographically (total degree first,
//! then exponents), duplicate monomials merged, exact-zero coefficients
//! dropped. Two polynomials are equal iff their canonical forms are equal.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::error::{Error, Result};

const CZERO: Complex64 = Complex64::new(0.0, 0.0);
const CONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub exps: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    nvars: usize,
    terms: Vec<Term>,
}

fn grlex(a: &[u32], b: &[u32]) -> Ordering {
    let ta: u64 = a.iter().map(|&e| e as u64).sum();
    let tb: u64 = b.iter().map(|&e| e as u64).sum();
    ta.cmp(&tb).then_with(|| a.cmp(b))
}

impl MultiPoly {
    /// Builds a polynomial in `nvars` variables from raw terms, canonicalizing
    /// as it goes. Every exponent vector must have length `nvars`.
    pub fn new(nvars: usize, terms: Vec<(Complex64, Vec<u32>)>) -> Result<Self> {
        for (_, exps) in &terms {
            if exps.len() != nvars {
                return Err(Error::Shape(format!(
                    "exponent vector {:?} in a polynomial of {} variables",
                    exps, nvars
                )));
            }
        }
        let mut terms: Vec<Term> = terms
            .into_iter()
            .map(|(coeff, exps)| Term { coeff, exps })
            .collect();
        terms.sort_by(|s, t| grlex(&s.exps, &t.exps));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.exps == t.exps => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !(t.coeff.re == 0.0 && t.coeff.im == 0.0));
        Ok(Self { nvars, terms: merged })
    }

    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: Vec::new() }
    }

    pub fn constant(nvars: usize, c: Complex64) -> Self {
        Self::new(nvars, vec![(c, vec![0; nvars])]).expect("constant term is well-formed")
    }

    /// The monomial `z_j` inside a polynomial ring of `nvars` variables.
    pub fn variable(nvars: usize, j: usize) -> Result<Self> {
        if j >= nvars {
            return Err(Error::Domain(format!(
                "variable index {} out of range for {} variables",
                j, nvars
            )));
        }
        let mut exps = vec![0; nvars];
        exps[j] = 1;
        Self::new(nvars, vec![(CONE, exps)])
    }

    /// Univariate polynomial from dense coefficients ascending in degree.
    pub fn from_univariate_coeffs(coeffs: &[Complex64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| (c, vec![k as u32]))
            .collect();
        Self::new(1, terms).expect("univariate exponents are well-formed")
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .iter()
            .map(|t| t.exps.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        if self.nvars != other.nvars {
            return Err(Error::Shape(format!(
                "adding polynomials of {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        let mut terms: Vec<(Complex64, Vec<u32>)> = Vec::with_capacity(self.terms.len() + other.terms.len());
        for t in self.terms.iter().chain(&other.terms) {
            terms.push((t.coeff, t.exps.clone()));
        }
        MultiPoly::new(self.nvars, terms)
    }

    pub fn scale(&self, c: Complex64) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .map(|t| (c * t.coeff, t.exps.clone()))
            .collect();
        MultiPoly::new(self.nvars, terms).expect("scaling preserves well-formedness")
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        if self.nvars != other.nvars {
            return Err(Error::Shape(format!(
                "multiplying polynomials of {} and {} variables",
                self.nvars, other.nvars
            )));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for s in &self.terms {
            for t in &other.terms {
                let exps = s.exps.iter().zip(&t.exps).map(|(a, b)| a + b).collect();
                terms.push((s.coeff * t.coeff, exps));
            }
        }
        MultiPoly::new(self.nvars, terms)
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut out = MultiPoly::constant(self.nvars, CONE);
        for _ in 0..k {
            out = out.mul(self).expect("powers keep the variable count");
        }
        out
    }

    /// Evaluates at a point, computing monomial powers by repeated
    /// multiplication.
    pub fn eval(&self, zs: &[Complex64]) -> Result<Complex64> {
        if zs.len() != self.nvars {
            return Err(Error::Shape(format!(
                "evaluating {} variables with {} arguments",
                self.nvars,
                zs.len()
            )));
        }
        let mut acc = CZERO;
        for t in &self.terms {
            let mut m = t.coeff;
            for (z, &e) in zs.iter().zip(&t.exps) {
                for _ in 0..e {
                    m *= z;
                }
            }
            acc += m;
        }
        Ok(acc)
    }

    /// Substitution `P(Q_1, ..., Q_m)`. The result lives in the disjoint
    /// union of the inner variable blocks: variable `j` of `P` is replaced by
    /// `Q_j` acting on its own block, so the result has `Σ_j nvars(Q_j)`
    /// variables.
    pub fn compose(&self, qs: &[MultiPoly]) -> Result<MultiPoly> {
        if qs.len() != self.nvars {
            return Err(Error::Shape(format!(
                "composing {} variables with {} inner polynomials",
                self.nvars,
                qs.len()
            )));
        }
        let total: usize = qs.iter().map(|q| q.nvars).sum();
        let mut offsets = Vec::with_capacity(qs.len());
        let mut off = 0;
        for q in qs {
            offsets.push(off);
            off += q.nvars;
        }
        let embedded: Vec<MultiPoly> = qs
            .iter()
            .zip(&offsets)
            .map(|(q, &o)| {
                let terms = q
                    .terms
                    .iter()
                    .map(|t| {
                        let mut exps = vec![0u32; total];
                        exps[o..o + q.nvars].copy_from_slice(&t.exps);
                        (t.coeff, exps)
                    })
                    .collect();
                MultiPoly::new(total, terms).expect("embedding preserves well-formedness")
            })
            .collect();
        let mut acc = MultiPoly::zero(total);
        for t in &self.terms {
            let mut prod = MultiPoly::constant(total, t.coeff);
            for (q, &e) in embedded.iter().zip(&t.exps) {
                prod = prod.mul(&q.pow(e))?;
            }
            acc = acc.add(&prod)?;
        }
        Ok(acc)
    }

    /// Variable relabeling mirroring slot permutation on maps:
    /// `permute_vars(P, π)(z_1, ..., z_n) = P(z_{π(1)}, ..., z_{π(n)})`.
    pub fn permute_vars(&self, pi: &[usize]) -> Result<MultiPoly> {
        let n = self.nvars;
        if pi.len() != n {
            return Err(Error::Shape(format!(
                "permutation of length {} for {} variables",
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
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut exps = vec![0u32; n];
                for (j, &p) in pi.iter().enumerate() {
                    exps[p] = t.exps[j];
                }
                (t.coeff, exps)
            })
            .collect();
        MultiPoly::new(n, terms)
    }

    /// Dense univariate coefficients ascending in degree.
    pub fn univariate_coeffs(&self) -> Result<Vec<Complex64>> {
        if self.nvars != 1 {
            return Err(Error::Usage(format!(
                "univariate coefficients requested from a polynomial of {} variables",
                self.nvars
            )));
        }
        let deg = self.degree() as usize;
        let mut out = vec![CZERO; deg + 1];
        for t in &self.terms {
            out[t.exps[0] as usize] = t.coeff;
        }
        Ok(out)
    }

    /// Largest coefficient difference against `other` after aligning
    /// monomials; both polynomials must have the same variable count.
    pub fn max_abs_diff(&self, other: &MultiPoly) -> Result<f64> {
        let diff = self.sub(other)?;
        Ok(diff.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn canonical_form_merges_and_sorts() {
        // z2·z1 + z1·z2 collapses to one term; ordering is by total degree
        // then exponents.
        let p = MultiPoly::new(
            2,
            vec![
                (r(1.0), vec![1, 1]),
                (r(1.0), vec![1, 1]),
                (r(3.0), vec![0, 0]),
                (r(2.0), vec![2, 0]),
            ],
        )
        .unwrap();
        let exps: Vec<Vec<u32>> = p.terms().iter().map(|t| t.exps.clone()).collect();
        assert_eq!(exps, vec![vec![0, 0], vec![1, 1], vec![2, 0]]);
        assert_eq!(p.terms()[1].coeff, r(2.0));
    }

    #[test]
    fn exact_zero_coefficients_are_dropped() {
        let p = MultiPoly::new(1, vec![(r(1.0), vec![1]), (r(-1.0), vec![1])]).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.degree(), 0);
    }

    #[test]
    fn eval_cubes_a_complex_point() {
        // z^3 at 1 + i is -2 + 2i.
        let p = MultiPoly::new(1, vec![(r(1.0), vec![3])]).unwrap();
        assert_eq!(p.eval(&[c(1.0, 1.0)]).unwrap(), c(-2.0, 2.0));
    }

    #[test]
    fn eval_handles_constants_and_mixed_terms() {
        let five = MultiPoly::constant(0, r(5.0));
        assert_eq!(five.eval(&[]).unwrap(), r(5.0));
        // P(z, w) = z² + zw + w² at (2, 3) = 4 + 6 + 9.
        let p = MultiPoly::new(
            2,
            vec![(r(1.0), vec![2, 0]), (r(1.0), vec![1, 1]), (r(1.0), vec![0, 2])],
        )
        .unwrap();
        assert_eq!(p.eval(&[r(2.0), r(3.0)]).unwrap(), r(19.0));
    }

    #[test]
    fn compose_substitutes_disjoint_blocks() {
        // P(z, w) = z·w with z ← z1² and w ← z2 + 1 gives z1²z2 + z1².
        let p = MultiPoly::new(2, vec![(r(1.0), vec![1, 1])]).unwrap();
        let q1 = MultiPoly::new(1, vec![(r(1.0), vec![2])]).unwrap();
        let q2 = MultiPoly::new(1, vec![(r(1.0), vec![1]), (r(1.0), vec![0])]).unwrap();
        let got = p.compose(&[q1, q2]).unwrap();
        let want = MultiPoly::new(2, vec![(r(1.0), vec![2, 1]), (r(1.0), vec![2, 0])]).unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn compose_with_identity_variables_is_identity() {
        let p = MultiPoly::new(
            2,
            vec![(c(0.5, -1.0), vec![2, 1]), (r(2.0), vec![0, 1])],
        )
        .unwrap();
        let ids = vec![
            MultiPoly::variable(1, 0).unwrap(),
            MultiPoly::variable(1, 0).unwrap(),
        ];
        assert_eq!(p.compose(&ids).unwrap(), p);
    }

    #[test]
    fn compose_agrees_with_pointwise_evaluation() {
        let p = MultiPoly::new(
            2,
            vec![(r(1.0), vec![2, 0]), (c(0.0, 1.0), vec![1, 1]), (r(-0.5), vec![0, 0])],
        )
        .unwrap();
        let q1 = MultiPoly::new(2, vec![(r(1.0), vec![1, 0]), (r(2.0), vec![0, 1])]).unwrap();
        let q2 = MultiPoly::new(1, vec![(c(0.5, 0.5), vec![2])]).unwrap();
        let comp = p.compose(&[q1.clone(), q2.clone()]).unwrap();
        assert_eq!(comp.nvars(), 3);
        let z = [c(0.3, -0.2), c(-1.1, 0.4), c(0.8, 0.9)];
        let inner1 = q1.eval(&z[0..2]).unwrap();
        let inner2 = q2.eval(&z[2..3]).unwrap();
        let direct = p.eval(&[inner1, inner2]).unwrap();
        let composed = comp.eval(&z).unwrap();
        assert!((direct - composed).norm() < 1e-12);
    }

    #[test]
    fn permute_vars_matches_permuted_evaluation() {
        let p = MultiPoly::new(
            3,
            vec![(r(1.0), vec![2, 1, 0]), (c(0.0, -1.0), vec![0, 1, 1])],
        )
        .unwrap();
        let pi = [2usize, 0, 1];
        let pp = p.permute_vars(&pi).unwrap();
        let z = [c(0.4, 0.1), c(-0.3, 0.8), c(1.2, -0.5)];
        let gathered = [z[pi[0]], z[pi[1]], z[pi[2]]];
        assert!((pp.eval(&z).unwrap() - p.eval(&gathered).unwrap()).norm() < 1e-14);
    }

    #[test]
    fn univariate_coeffs_are_dense_ascending() {
        let p = MultiPoly::new(1, vec![(r(2.0), vec![3]), (r(-1.0), vec![0])]).unwrap();
        assert_eq!(
            p.univariate_coeffs().unwrap(),
            vec![r(-1.0), r(0.0), r(0.0), r(2.0)]
        );
        let bivariate = MultiPoly::zero(2);
        assert!(bivariate.univariate_coeffs().is_err());
    }

    #[test]
    fn arithmetic_matches_evaluation() {
        let p = MultiPoly::new(2, vec![(r(1.0), vec![1, 0]), (r(1.0), vec![0, 1])]).unwrap();
        let q = MultiPoly::new(2, vec![(r(1.0), vec![1, 0]), (r(-1.0), vec![0, 1])]).unwrap();
        let prod = p.mul(&q).unwrap();
        let z = [c(0.7, 0.2), c(-0.4, 1.0)];
        let want = p.eval(&z).unwrap() * q.eval(&z).unwrap();
        assert!((prod.eval(&z).unwrap() - want).norm() < 1e-13);
        let sum = p.add(&q).unwrap();
        assert_eq!(sum, MultiPoly::new(2, vec![(r(2.0), vec![1, 0])]).unwrap());
    }
}
