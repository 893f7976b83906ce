//! Eigendecomposition and spectral tools for linear operators.
//!
//! The Hermitian kernel is a self-contained cyclic Jacobi iteration on
//! complex matrices: each rotation zeroes one off-diagonal pair through a
//! phased plane rotation, sweeps run until the largest off-diagonal entry
//! falls below the threshold. Normal operators reduce to a joint Hermitian
//! problem via their real and imaginary parts; commuting families are
//! diagonalized through a random combination with recursive refinement of
//! degenerate clusters.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dense::{self, CZERO};
use crate::error::{Error, Result};
use crate::multimap::MultiMap;
use crate::poly::MultiPoly;
use crate::space::Vector;

const CONE: Complex64 = Complex64::new(1.0, 0.0);

/// Off-diagonal convergence threshold at unit scale.
pub(crate) const OFF_DIAGONAL_TOL: f64 = 1e-12;
/// Sweep budget before the iteration reports a numeric error.
pub(crate) const MAX_SWEEPS: usize = 100;
/// Eigenvalues closer than this are treated as one degenerate cluster.
const CLUSTER_TOL: f64 = 1e-8;
/// Entrywise tolerance for the self-adjointness and commutation preconditions.
const HERMITIAN_TOL: f64 = 1e-9;
const JOINT_DIAG_TOL: f64 = 1e-8;

pub(crate) fn identity_matrix(n: usize) -> Vec<Complex64> {
    let mut v = vec![CZERO; n * n];
    for i in 0..n {
        v[i * n + i] = CONE;
    }
    v
}

fn off_diag_max(a: &[Complex64], n: usize) -> f64 {
    let mut off: f64 = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                off = off.max(a[p * n + q].norm());
            }
        }
    }
    off
}

/// Largest deviation from self-adjointness; `None` when within `tol`.
fn hermitian_violation(a: &[Complex64], n: usize, tol: f64) -> Option<(usize, usize, f64)> {
    let mut worst = (0, 0, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            let dev = (a[i * n + j] - a[j * n + i].conj()).norm();
            if dev > worst.2 {
                worst = (i, j, dev);
            }
        }
    }
    if worst.2 > tol {
        Some(worst)
    } else {
        None
    }
}

/// In-place cyclic Jacobi diagonalization of a Hermitian matrix (row-major,
/// `n × n`). When `v` is given it must hold the identity on entry; the
/// accumulated unitary satisfies `V* A_in V = diag` on exit, so the columns of
/// `V` are eigenvectors. Errors when the sweep budget is exhausted before the
/// largest off-diagonal magnitude drops below `off_tol`.
pub(crate) fn jacobi_hermitian(
    a: &mut [Complex64],
    n: usize,
    mut v: Option<&mut [Complex64]>,
    off_tol: f64,
) -> Result<()> {
    debug_assert_eq!(a.len(), n * n);
    let rotate_floor = off_tol * 1e-3;
    for _sweep in 0..MAX_SWEEPS {
        if off_diag_max(a, n) < off_tol {
            return Ok(());
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let b = apq.norm();
                if b <= rotate_floor {
                    continue;
                }
                let alpha = a[p * n + p].re;
                let gamma = a[q * n + q].re;
                let phase = apq / b;
                let delta = (alpha - gamma) / (2.0 * b);
                // tan of the rotation angle, the root of t² + 2tδ − 1 = 0
                // with the smaller magnitude (stable for large |δ|).
                let t = if delta >= 0.0 {
                    1.0 / (delta + (delta * delta + 1.0).sqrt())
                } else {
                    -1.0 / (-delta + (delta * delta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let sp = s * phase;
                let spc = s * phase.conj();
                // A ← A·J with J[p,p] = J[q,q] = c, J[p,q] = −s·phase,
                // J[q,p] = s·conj(phase).
                for r in 0..n {
                    let ap = a[r * n + p];
                    let aq = a[r * n + q];
                    a[r * n + p] = c * ap + spc * aq;
                    a[r * n + q] = -sp * ap + c * aq;
                }
                // A ← J*·A.
                for col in 0..n {
                    let ap = a[p * n + col];
                    let aq = a[q * n + col];
                    a[p * n + col] = c * ap + sp * aq;
                    a[q * n + col] = -spc * ap + c * aq;
                }
                // The rotation annihilates the pivot pair by construction;
                // pin it and keep the diagonal exactly real.
                a[p * n + q] = CZERO;
                a[q * n + p] = CZERO;
                a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
                if let Some(vv) = v.as_deref_mut() {
                    for r in 0..n {
                        let vp = vv[r * n + p];
                        let vq = vv[r * n + q];
                        vv[r * n + p] = c * vp + spc * vq;
                        vv[r * n + q] = -sp * vp + c * vq;
                    }
                }
            }
        }
    }
    if off_diag_max(a, n) < off_tol {
        Ok(())
    } else {
        Err(Error::Numeric(format!(
            "Jacobi iteration did not converge within {} sweeps",
            MAX_SWEEPS
        )))
    }
}

/// Makes the largest-magnitude component of every column real and positive
/// (ties broken toward the lowest index).
fn phase_fix_columns(v: &mut [Complex64], n: usize) {
    for j in 0..n {
        let mut best = 0;
        let mut best_mag = 0.0f64;
        for r in 0..n {
            let mag = v[r * n + j].norm();
            if mag > best_mag {
                best_mag = mag;
                best = r;
            }
        }
        if best_mag <= f64::MIN_POSITIVE {
            continue;
        }
        let phase = v[best * n + j] / best_mag;
        let fix = phase.conj();
        for r in 0..n {
            v[r * n + j] *= fix;
        }
        // The anchor entry is |z| up to rounding; pin its imaginary part.
        v[best * n + j] = Complex64::new(v[best * n + j].norm(), 0.0);
    }
}

fn permute_columns(v: &[Complex64], n: usize, order: &[usize]) -> Vec<Complex64> {
    let mut out = vec![CZERO; v.len()];
    for (new_j, &old_j) in order.iter().enumerate() {
        for r in 0..n {
            out[r * n + new_j] = v[r * n + old_j];
        }
    }
    out
}

pub(crate) fn square_data(a: &MultiMap, op: &str) -> Result<(Vec<Complex64>, usize)> {
    if a.arity() != 1 {
        return Err(Error::Usage(format!(
            "{op} is defined for linear operators only, got arity {}",
            a.arity()
        )));
    }
    let n = a.codomain().dim();
    if a.domain()[0].dim() != n {
        return Err(Error::Shape(format!(
            "{op} needs a square operator, got {} -> {}",
            a.domain()[0].dim(),
            n
        )));
    }
    Ok((a.coeffs().to_vec(), n))
}

fn matrix_map(template: &MultiMap, data: Vec<Complex64>) -> MultiMap {
    MultiMap::new(
        vec![template.domain()[0].clone()],
        template.codomain().clone(),
        data,
    )
    .expect("square data matches the template signature")
}

/// Eigendecomposition of a Hermitian operator.
///
/// Eigenvalues are sorted ascending; the basis columns are orthonormal
/// eigenvectors whose largest-magnitude component is real and positive.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<Complex64>,
    basis: MultiMap,
}

impl SpectralDecomposition {
    /// Assembles a decomposition from parts already known to be consistent
    /// (eigenvalue count equal to the basis dimension, unitary basis).
    pub(crate) fn from_parts(eigenvalues: Vec<Complex64>, basis: MultiMap) -> Self {
        debug_assert_eq!(eigenvalues.len(), basis.codomain().dim());
        SpectralDecomposition { eigenvalues, basis }
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    /// Real parts of the eigenvalues (exact for Hermitian input).
    pub fn real_eigenvalues(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| l.re).collect()
    }

    /// Unitary whose column `j` is the eigenvector for `eigenvalues[j]`.
    pub fn basis(&self) -> &MultiMap {
        &self.basis
    }

    /// Eigenvector for `eigenvalues[j]`, as a vector in the operator's space.
    pub fn basis_column(&self, j: usize) -> Vector {
        let n = self.dim();
        assert!(j < n, "column index {j} out of range for dimension {n}");
        let coeffs = self.basis.coeffs();
        let coords = (0..n).map(|i| coeffs[i * n + j]).collect();
        Vector::new(self.basis.codomain().clone(), coords)
            .expect("column length matches the space")
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    fn assemble(&self, values: &[Complex64]) -> MultiMap {
        let n = self.dim();
        let u = self.basis.coeffs();
        let mut out = vec![CZERO; n * n];
        for l in 0..n {
            let g = values[l];
            if g == CZERO {
                continue;
            }
            for i in 0..n {
                let uil = u[i * n + l];
                if uil == CZERO {
                    continue;
                }
                let gi = g * uil;
                for j in 0..n {
                    out[i * n + j] += gi * u[j * n + l].conj();
                }
            }
        }
        matrix_map(&self.basis, out)
    }

    /// `U · diag(eigenvalues) · U*`.
    pub fn reconstruct(&self) -> MultiMap {
        self.assemble(&self.eigenvalues.clone())
    }

    /// Operator function `U · diag(f(λ)) · U*`; errors where `f` is
    /// undefined.
    pub fn apply_function(
        &self,
        f: impl Fn(Complex64) -> Option<Complex64>,
    ) -> Result<MultiMap> {
        let mut values = Vec::with_capacity(self.dim());
        for &l in &self.eigenvalues {
            match f(l) {
                Some(v) => values.push(v),
                None => {
                    return Err(Error::Domain(format!(
                        "function undefined at eigenvalue {l}"
                    )))
                }
            }
        }
        Ok(self.assemble(&values))
    }

    /// Convenience wrapper for real scalar functions of real eigenvalues.
    pub fn apply_real_function(&self, f: impl Fn(f64) -> Option<f64>) -> Result<MultiMap> {
        self.apply_function(|l| f(l.re).map(|v| Complex64::new(v, 0.0)))
    }
}

/// Hermitian eigendecomposition by cyclic Jacobi sweeps.
pub fn eigh(a: &MultiMap) -> Result<SpectralDecomposition> {
    let (data, n) = square_data(a, "eigh")?;
    if let Some((i, j, dev)) = hermitian_violation(&data, n, HERMITIAN_TOL) {
        return Err(Error::Domain(format!(
            "operator is not self-adjoint: entry ({i},{j}) deviates from the conjugate of ({j},{i}) by {dev:.3e}"
        )));
    }
    // Exact symmetrization removes the sub-tolerance drift before iterating.
    let mut m = vec![CZERO; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = (data[i * n + j] + data[j * n + i].conj()) * 0.5;
        }
        m[i * n + i] = Complex64::new(m[i * n + i].re, 0.0);
    }
    let scale = dense::max_abs(&m).max(1.0);
    let mut v = identity_matrix(n);
    jacobi_hermitian(&mut m, n, Some(&mut v), OFF_DIAGONAL_TOL * scale)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let eigenvalues: Vec<Complex64> = order
        .iter()
        .map(|&i| Complex64::new(m[i * n + i].re, 0.0))
        .collect();
    let mut v = permute_columns(&v, n, &order);
    phase_fix_columns(&mut v, n);
    Ok(SpectralDecomposition {
        eigenvalues,
        basis: matrix_map(a, v),
    })
}

/// Joint eigendecomposition of a commuting Hermitian family: a shared
/// orthonormal basis plus one eigenvalue list per operator.
#[derive(Debug, Clone)]
pub struct JointDecomposition {
    basis: MultiMap,
    eigenvalues: Vec<Vec<f64>>,
}

impl JointDecomposition {
    pub fn basis(&self) -> &MultiMap {
        &self.basis
    }

    /// Eigenvalue list of operator `k`, aligned with the basis columns.
    pub fn eigenvalues(&self, k: usize) -> &[f64] {
        &self.eigenvalues[k]
    }

    pub fn operator_count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.first().map_or(0, |e| e.len())
    }

    /// Joint spectrum: one eigenvalue tuple per basis column.
    pub fn joint_spectrum(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        (0..n)
            .map(|j| self.eigenvalues.iter().map(|e| e[j]).collect())
            .collect()
    }
}

fn joint_refine(
    mats: &[Vec<Complex64>],
    n: usize,
    rng: &mut ChaCha8Rng,
    depth: usize,
) -> Result<Vec<Complex64>> {
    if n == 1 {
        return Ok(vec![CONE]);
    }
    if depth > 32 {
        return Err(Error::Numeric(
            "joint diagonalization failed to split a degenerate cluster".into(),
        ));
    }
    let mut m = vec![CZERO; n * n];
    for a in mats {
        let cj = rng.gen_range(-1.0..1.0);
        for (mi, ai) in m.iter_mut().zip(a) {
            *mi += cj * ai;
        }
    }
    // Defensive exact symmetrization: projections of Hermitian operators are
    // Hermitian up to rounding.
    for i in 0..n {
        for j in i + 1..n {
            let avg = (m[i * n + j] + m[j * n + i].conj()) * 0.5;
            m[i * n + j] = avg;
            m[j * n + i] = avg.conj();
        }
        m[i * n + i] = Complex64::new(m[i * n + i].re, 0.0);
    }
    let scale = dense::max_abs(&m).max(1.0);
    let mut v = identity_matrix(n);
    jacobi_hermitian(&mut m, n, Some(&mut v), OFF_DIAGONAL_TOL * scale)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].re.total_cmp(&m[j * n + j].re));
    let evals: Vec<f64> = order.iter().map(|&i| m[i * n + i].re).collect();
    let mut v = permute_columns(&v, n, &order);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (evals[end] - evals[end - 1]).abs() < CLUSTER_TOL {
            end += 1;
        }
        let size = end - start;
        if size > 1 {
            // Columns of the cluster as an n × size block.
            let mut vc = vec![CZERO; n * size];
            for r in 0..n {
                for c in 0..size {
                    vc[r * size + c] = v[r * n + (start + c)];
                }
            }
            let vc_star = dense::conj_transpose(&vc, n, size);
            let mut projected = Vec::with_capacity(mats.len());
            let mut needs_work = false;
            for a in mats {
                let avc = dense::matmul(a, &vc, n, n, size);
                let b = dense::matmul(&vc_star, &avc, size, n, size);
                if off_diag_max(&b, size) > JOINT_DIAG_TOL * 0.1 {
                    needs_work = true;
                }
                projected.push(b);
            }
            if needs_work {
                let w = joint_refine(&projected, size, rng, depth + 1)?;
                let refined = dense::matmul(&vc, &w, n, size, size);
                for r in 0..n {
                    for c in 0..size {
                        v[r * n + (start + c)] = refined[r * size + c];
                    }
                }
            }
        }
        start = end;
    }
    Ok(v)
}

/// Simultaneous diagonalization of pairwise commuting Hermitian operators.
///
/// A random Hermitian combination (coefficients drawn from `seed`) is
/// diagonalized first; degenerate eigenvalue clusters are refined recursively
/// until every operator is diagonal in the shared basis. Basis columns are
/// sorted by their joint eigenvalue tuples, lexicographically ascending.
pub fn joint_eigh(ops: &[MultiMap], seed: u64) -> Result<JointDecomposition> {
    if ops.is_empty() {
        return Err(Error::Usage("joint diagonalization of an empty family".into()));
    }
    let (first, n) = square_data(&ops[0], "joint_eigh")?;
    let mut mats = vec![first];
    for op in &ops[1..] {
        let (data, dim) = square_data(op, "joint_eigh")?;
        if dim != n {
            return Err(Error::Shape(format!(
                "joint family mixes dimensions {n} and {dim}"
            )));
        }
        mats.push(data);
    }
    for (k, mat) in mats.iter().enumerate() {
        if let Some((i, j, dev)) = hermitian_violation(mat, n, HERMITIAN_TOL) {
            return Err(Error::Domain(format!(
                "operator {k} is not self-adjoint: entry ({i},{j}) deviates by {dev:.3e}"
            )));
        }
    }
    for j in 0..mats.len() {
        for k in j + 1..mats.len() {
            let ab = dense::matmul(&mats[j], &mats[k], n, n, n);
            let ba = dense::matmul(&mats[k], &mats[j], n, n, n);
            let mut worst = (0usize, 0usize, 0.0f64);
            for r in 0..n {
                for c in 0..n {
                    let dev = (ab[r * n + c] - ba[r * n + c]).norm();
                    if dev > worst.2 {
                        worst = (r, c, dev);
                    }
                }
            }
            if worst.2 > JOINT_DIAG_TOL {
                return Err(Error::Domain(format!(
                    "operators {j} and {k} do not commute: commutator entry ({},{}) is {:.3e}",
                    worst.0, worst.1, worst.2
                )));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = joint_refine(&mats, n, &mut rng, 0)?;
    // Verify joint diagonality and collect per-operator eigenvalues.
    let v_star = dense::conj_transpose(&v, n, n);
    let mut eigenvalues = Vec::with_capacity(mats.len());
    for (k, mat) in mats.iter().enumerate() {
        let b = dense::matmul(&v_star, &dense::matmul(mat, &v, n, n, n), n, n, n);
        let off = off_diag_max(&b, n);
        if off > JOINT_DIAG_TOL {
            return Err(Error::Numeric(format!(
                "operator {k} is not diagonal in the refined basis (off-diagonal {off:.3e})"
            )));
        }
        eigenvalues.push((0..n).map(|j| b[j * n + j].re).collect::<Vec<f64>>());
    }
    // Sort columns by joint eigenvalue tuples.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        for evs in &eigenvalues {
            match evs[i].total_cmp(&evs[j]) {
                std::cmp::Ordering::Equal => continue,
                other => return other,
            }
        }
        std::cmp::Ordering::Equal
    });
    v = permute_columns(&v, n, &order);
    phase_fix_columns(&mut v, n);
    let eigenvalues = eigenvalues
        .into_iter()
        .map(|evs| order.iter().map(|&j| evs[j]).collect())
        .collect();
    Ok(JointDecomposition {
        basis: matrix_map(&ops[0], v),
        eigenvalues,
    })
}

/// Largest commutator entry of `N* N − N N*`.
fn normality_violation(data: &[Complex64], n: usize) -> (usize, usize, f64) {
    let nstar = dense::conj_transpose(data, n, n);
    let sn = dense::matmul(&nstar, data, n, n, n);
    let ns = dense::matmul(data, &nstar, n, n, n);
    let mut worst = (0, 0, 0.0f64);
    for i in 0..n {
        for j in 0..n {
            let dev = (sn[i * n + j] - ns[i * n + j]).norm();
            if dev > worst.2 {
                worst = (i, j, dev);
            }
        }
    }
    worst
}

/// Eigendecomposition of a normal operator via the joint diagonalization of
/// its Hermitian real and imaginary parts.
pub fn eig_normal(op: &MultiMap) -> Result<SpectralDecomposition> {
    let (data, n) = square_data(op, "eig_normal")?;
    let (i, j, dev) = normality_violation(&data, n);
    if dev > HERMITIAN_TOL {
        return Err(Error::Domain(format!(
            "operator is not normal: commutator entry ({i},{j}) is {dev:.3e}"
        )));
    }
    let mut re = vec![CZERO; n * n];
    let mut im = vec![CZERO; n * n];
    let half_over_i = Complex64::new(0.0, -0.5);
    for r in 0..n {
        for c in 0..n {
            let z = data[r * n + c];
            let zt = data[c * n + r].conj();
            re[r * n + c] = (z + zt) * 0.5;
            im[r * n + c] = (z - zt) * half_over_i;
        }
    }
    let re_map = matrix_map(op, re);
    let im_map = matrix_map(op, im);
    // The combination seed is fixed: the decomposition is a deterministic
    // function of the operator.
    let joint = joint_eigh(&[re_map, im_map], 0x6e6f726d)?;
    let n_dim = joint.dim();
    let mut eigenvalues: Vec<Complex64> = (0..n_dim)
        .map(|j| Complex64::new(joint.eigenvalues(0)[j], joint.eigenvalues(1)[j]))
        .collect();
    let mut order: Vec<usize> = (0..n_dim).collect();
    order.sort_by(|&i, &j| {
        eigenvalues[i]
            .re
            .total_cmp(&eigenvalues[j].re)
            .then(eigenvalues[i].im.total_cmp(&eigenvalues[j].im))
    });
    let mut v = permute_columns(joint.basis().coeffs(), n_dim, &order);
    eigenvalues = order.iter().map(|&j| eigenvalues[j]).collect();
    phase_fix_columns(&mut v, n_dim);
    Ok(SpectralDecomposition {
        eigenvalues,
        basis: matrix_map(op, v),
    })
}

/// Spectrum of a Hermitian or normal operator, ascending by (re, im).
pub fn spectrum(op: &MultiMap) -> Result<Vec<Complex64>> {
    let (data, n) = square_data(op, "spectrum")?;
    if hermitian_violation(&data, n, HERMITIAN_TOL).is_none() {
        return Ok(eigh(op)?.eigenvalues().to_vec());
    }
    let (i, j, dev) = normality_violation(&data, n);
    if dev > HERMITIAN_TOL {
        return Err(Error::Domain(format!(
            "spectrum needs a self-adjoint or normal operator; commutator entry ({i},{j}) is {dev:.3e}"
        )));
    }
    Ok(eig_normal(op)?.eigenvalues().to_vec())
}

/// Evaluates a univariate polynomial in the operator algebra by Horner's
/// rule: products and sums of matrices only, no diagonalization.
pub fn poly_of_operator(a: &MultiMap, p: &MultiPoly) -> Result<MultiMap> {
    let (data, n) = square_data(a, "poly_of_operator")?;
    if p.nvars() != 1 {
        return Err(Error::Usage(format!(
            "operator evaluation needs a univariate polynomial, got {} variables",
            p.nvars()
        )));
    }
    let coeffs = p.univariate_coeffs()?;
    let mut b = vec![CZERO; n * n];
    let deg = coeffs.len() - 1;
    for i in 0..n {
        b[i * n + i] = coeffs[deg];
    }
    for k in (0..deg).rev() {
        b = dense::matmul(&data, &b, n, n, n);
        for i in 0..n {
            b[i * n + i] += coeffs[k];
        }
    }
    Ok(matrix_map(a, b))
}

/// Outcome of a spectral mapping comparison: the multiset `p(σ(A))` against
/// the computed spectrum of `p(A)`.
#[derive(Debug, Clone)]
pub struct SpectralMappingReport {
    pub passed: bool,
    pub tol: f64,
    pub max_deviation: f64,
    pub mapped: Vec<Complex64>,
    pub computed: Vec<Complex64>,
}

fn sort_complex(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Greedy nearest matching between two equal-length multisets; returns the
/// largest pairing distance.
fn multiset_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for &x in a {
        let mut best = f64::INFINITY;
        let mut best_j = usize::MAX;
        for (j, &y) in b.iter().enumerate() {
            if used[j] {
                continue;
            }
            let d = (x - y).norm();
            if d < best {
                best = d;
                best_j = j;
            }
        }
        used[best_j] = true;
        worst = worst.max(best);
    }
    worst
}

/// Checks `σ(p(A)) = p(σ(A))` as multisets for Hermitian `A`.
pub fn spectral_mapping_check(
    a: &MultiMap,
    p: &MultiPoly,
    tol: f64,
) -> Result<SpectralMappingReport> {
    let dec = eigh(a)?;
    let mut mapped = Vec::with_capacity(dec.dim());
    for &l in dec.eigenvalues() {
        mapped.push(p.eval(&[l])?);
    }
    sort_complex(&mut mapped);
    let pa = poly_of_operator(a, p)?;
    let computed = spectrum(&pa)?;
    let max_deviation = multiset_deviation(&mapped, &computed);
    Ok(SpectralMappingReport {
        passed: max_deviation <= tol,
        tol,
        max_deviation,
        mapped,
        computed,
    })
}

/// The Gelfand sequence `‖A^n‖^{1/n}` up to `max_n`, whose tail approximates
/// the spectral radius.
#[derive(Debug, Clone)]
pub struct GelfandSequence {
    pub value: f64,
    pub sequence: Vec<f64>,
}

pub fn spectral_radius(a: &MultiMap, max_n: usize) -> Result<GelfandSequence> {
    let (data, n) = square_data(a, "spectral_radius")?;
    if max_n == 0 {
        return Err(Error::Domain("the Gelfand sequence needs max_n >= 1".into()));
    }
    let mut power = data.clone();
    let mut sequence = Vec::with_capacity(max_n);
    for k in 1..=max_n {
        if k > 1 {
            power = dense::matmul(&power, &data, n, n, n);
        }
        let s = crate::norm::spectral_norm_matrix(&power, n, n)?;
        sequence.push(s.powf(1.0 / k as f64));
    }
    Ok(GelfandSequence {
        value: *sequence.last().expect("max_n >= 1"),
        sequence,
    })
}

/// A Chebyshev interpolant in monomial form together with its sampled sup
/// error on the interval.
#[derive(Debug, Clone)]
pub struct ChebyshevApprox {
    pub poly: MultiPoly,
    pub grid_sup_error: f64,
}

// Odd count so the interval midpoint is a sample; kinks of even symmetric
// functions (like |x| on [-1, 1]) sit exactly on the grid.
const CHEBYSHEV_GRID: usize = 200_001;

/// Interpolates `f` at the `degree + 1` Chebyshev points of `[a, b]` and
/// reports the interpolant in monomial form along with the sup error sampled
/// on a dense uniform grid that includes both endpoints.
pub fn chebyshev_approx(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    degree: usize,
) -> Result<ChebyshevApprox> {
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::Domain(format!(
            "interpolation interval [{a}, {b}] is not a finite nonempty interval"
        )));
    }
    let n = degree + 1;
    let mut thetas = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let theta = std::f64::consts::PI * (2 * i + 1) as f64 / (2 * n) as f64;
        let t = theta.cos();
        let x = a + (b - a) * (t + 1.0) * 0.5;
        let fx = f(x);
        if !fx.is_finite() {
            return Err(Error::Domain(format!(
                "function value at node {x} is not finite"
            )));
        }
        thetas.push(theta);
        values.push(fx);
    }
    // Chebyshev coefficients of the interpolant.
    let mut cheb = vec![0.0f64; n];
    for (j, cj) in cheb.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (theta, v) in thetas.iter().zip(&values) {
            acc += v * (j as f64 * theta).cos();
        }
        *cj = acc * 2.0 / n as f64;
    }
    cheb[0] *= 0.5;
    // Monomial coefficients in the reference variable t via the three-term
    // recurrence.
    let mut mono_t = vec![0.0f64; n];
    let mut t_prev = vec![0.0f64; n];
    t_prev[0] = 1.0;
    for (mt, tp) in mono_t.iter_mut().zip(&t_prev) {
        *mt += cheb[0] * tp;
    }
    if degree >= 1 {
        let mut t_cur = vec![0.0f64; n];
        t_cur[1] = 1.0;
        for (mt, tc) in mono_t.iter_mut().zip(&t_cur) {
            *mt += cheb[1] * tc;
        }
        for &cj in &cheb[2..=degree] {
            let mut t_next = vec![0.0f64; n];
            for k in 0..n {
                let shifted = if k == 0 { 0.0 } else { 2.0 * t_cur[k - 1] };
                t_next[k] = shifted - t_prev[k];
            }
            for (mt, tn) in mono_t.iter_mut().zip(&t_next) {
                *mt += cj * tn;
            }
            t_prev = t_cur;
            t_cur = t_next;
        }
    }
    // Substitute t = alpha·x + beta to return to the requested interval.
    let alpha = 2.0 / (b - a);
    let beta = -(a + b) / (b - a);
    let mut mono_x = vec![mono_t[degree]];
    for k in (0..degree).rev() {
        let mut next = vec![0.0f64; mono_x.len() + 1];
        for (i, &ci) in mono_x.iter().enumerate() {
            next[i] += ci * beta;
            next[i + 1] += ci * alpha;
        }
        next[0] += mono_t[k];
        mono_x = next;
    }
    let horner = |x: f64| {
        let mut acc = 0.0;
        for &c in mono_x.iter().rev() {
            acc = acc * x + c;
        }
        acc
    };
    let mut sup = 0.0f64;
    for g in 0..CHEBYSHEV_GRID {
        let x = a + (b - a) * g as f64 / (CHEBYSHEV_GRID - 1) as f64;
        sup = sup.max((horner(x) - f(x)).abs());
    }
    let poly = MultiPoly::new(
        1,
        mono_x
            .iter()
            .enumerate()
            .map(|(k, &c)| (Complex64::new(c, 0.0), vec![k as u32]))
            .collect(),
    )?;
    Ok(ChebyshevApprox {
        poly,
        grid_sup_error: sup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{HilbertSpace, Vector};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn two_one_matrix() -> MultiMap {
        MultiMap::from_real_matrix(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap()
    }

    #[test]
    fn eigh_solves_the_symmetric_two_by_two() {
        let dec = eigh(&two_one_matrix()).unwrap();
        assert!((dec.eigenvalues()[0] - r(1.0)).norm() < 1e-12);
        assert!((dec.eigenvalues()[1] - r(3.0)).norm() < 1e-12);
        let u = dec.basis().coeffs();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // Column for eigenvalue 1 is (1, -1)/√2 with its first component
        // pinned real positive; column for 3 is (1, 1)/√2.
        assert!((u[0] - r(s)).norm() < 1e-12);
        assert!((u[2] - r(-s)).norm() < 1e-12);
        assert!((u[1] - r(s)).norm() < 1e-12);
        assert!((u[3] - r(s)).norm() < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian_input_naming_the_entry() {
        let a = MultiMap::from_real_matrix(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        match eigh(&a) {
            Err(Error::Domain(msg)) => assert!(msg.contains("(0,1)"), "message: {msg}"),
            other => panic!("expected a domain error, got {other:?}"),
        }
    }

    #[test]
    fn eigh_diagonalizes_a_complex_hermitian_matrix() {
        let a = MultiMap::from_matrix(&[
            vec![r(1.0), c(0.0, -2.0)],
            vec![c(0.0, 2.0), r(5.0)],
        ])
        .unwrap();
        let dec = eigh(&a).unwrap();
        let recon = dec.reconstruct();
        assert!(a.max_abs_diff(&recon) < 1e-12);
        // Orthonormal columns.
        let u = dec.basis();
        let ustar = crate::duality::adjoint(u).unwrap();
        let eye = ustar.compose(std::slice::from_ref(u)).unwrap();
        assert!(eye.max_abs_diff(&MultiMap::identity(&HilbertSpace::new(2, "H").unwrap())) < 1e-12);
    }

    #[test]
    fn spectrum_of_the_rotation_generator_is_plus_minus_i() {
        let rot = MultiMap::from_real_matrix(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let spec = spectrum(&rot).unwrap();
        assert!((spec[0] - c(0.0, -1.0)).norm() < 1e-10);
        assert!((spec[1] - c(0.0, 1.0)).norm() < 1e-10);
    }

    #[test]
    fn spectrum_rejects_non_normal_operators() {
        let shift = MultiMap::from_real_matrix(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(spectrum(&shift), Err(Error::Domain(_))));
    }

    #[test]
    fn joint_eigh_recovers_a_rotated_pair_of_diagonals() {
        let (cs, sn) = (0.7f64.cos(), 0.7f64.sin());
        let u = [[cs, -sn], [sn, cs]];
        let conj = |d: [f64; 2]| {
            let mut m = [[0.0f64; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    for l in 0..2 {
                        m[i][j] += u[i][l] * d[l] * u[j][l];
                    }
                }
            }
            MultiMap::from_real_matrix(&[m[0].to_vec(), m[1].to_vec()]).unwrap()
        };
        let a = conj([1.0, 2.0]);
        let b = conj([3.0, 4.0]);
        let joint = joint_eigh(&[a, b], 7).unwrap();
        let tuples = joint.joint_spectrum();
        assert!((tuples[0][0] - 1.0).abs() < 1e-9);
        assert!((tuples[0][1] - 3.0).abs() < 1e-9);
        assert!((tuples[1][0] - 2.0).abs() < 1e-9);
        assert!((tuples[1][1] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn joint_eigh_rejects_non_commuting_operators() {
        let a = MultiMap::from_real_matrix(&[vec![1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        let b = MultiMap::from_real_matrix(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        match joint_eigh(&[a, b], 1) {
            Err(Error::Domain(msg)) => assert!(msg.contains("commut"), "message: {msg}"),
            other => panic!("expected a domain error, got {other:?}"),
        }
    }

    #[test]
    fn square_root_via_functions_squares_back() {
        let a = two_one_matrix();
        let dec = eigh(&a).unwrap();
        let root = dec.apply_real_function(|l| (l >= 0.0).then(|| l.sqrt())).unwrap();
        let squared = root.compose(std::slice::from_ref(&root)).unwrap();
        assert!(a.max_abs_diff(&squared) < 1e-8);
    }

    #[test]
    fn real_branch_of_the_square_root_rejects_negative_spectrum() {
        let a = MultiMap::diagonal(
            &HilbertSpace::new(2, "H").unwrap(),
            &[r(-1.0), r(2.0)],
        )
        .unwrap();
        let dec = eigh(&a).unwrap();
        let out = dec.apply_real_function(|l| (l >= 0.0).then(|| l.sqrt()));
        assert!(matches!(out, Err(Error::Domain(_))));
    }

    #[test]
    fn identity_function_reconstructs_the_operator() {
        let a = MultiMap::from_matrix(&[
            vec![r(0.5), c(1.0, 1.0)],
            vec![c(1.0, -1.0), r(-2.0)],
        ])
        .unwrap();
        let dec = eigh(&a).unwrap();
        let same = dec.apply_function(Some).unwrap();
        assert!(a.max_abs_diff(&same) < 1e-12);
    }

    #[test]
    fn horner_evaluation_matches_the_hand_computed_square_plus_one() {
        let a = two_one_matrix();
        let p = MultiPoly::new(1, vec![(r(1.0), vec![2]), (r(1.0), vec![0])]).unwrap();
        let pa = poly_of_operator(&a, &p).unwrap();
        let want = MultiMap::from_real_matrix(&[vec![6.0, 4.0], vec![4.0, 6.0]]).unwrap();
        assert!(pa.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn horner_evaluation_needs_no_diagonalizability() {
        // Nilpotent shift: z² kills it even though it has no eigenbasis.
        let shift = MultiMap::from_real_matrix(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let p = MultiPoly::new(1, vec![(r(1.0), vec![2])]).unwrap();
        let sq = poly_of_operator(&shift, &p).unwrap();
        assert!(sq.max_abs() == 0.0);
    }

    #[test]
    fn spectral_mapping_holds_for_square_plus_one() {
        let a = two_one_matrix();
        let p = MultiPoly::new(1, vec![(r(1.0), vec![2]), (r(1.0), vec![0])]).unwrap();
        let report = spectral_mapping_check(&a, &p, 1e-9).unwrap();
        assert!(report.passed, "deviation {}", report.max_deviation);
        assert!((report.mapped[0] - r(2.0)).norm() < 1e-10);
        assert!((report.mapped[1] - r(10.0)).norm() < 1e-10);
    }

    #[test]
    fn gelfand_sequence_of_a_hermitian_matrix_is_flat() {
        let seq = spectral_radius(&two_one_matrix(), 4).unwrap();
        for v in &seq.sequence {
            assert!((v - 3.0).abs() < 1e-9);
        }
        assert!((seq.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn gelfand_sequence_of_a_nilpotent_operator_collapses() {
        let shift = MultiMap::from_real_matrix(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        let seq = spectral_radius(&shift, 3).unwrap();
        assert!((seq.sequence[0] - 1.0).abs() < 1e-12);
        assert_eq!(seq.sequence[1], 0.0);
        assert_eq!(seq.value, 0.0);
    }

    #[test]
    fn chebyshev_reproduces_low_degree_polynomials() {
        let approx = chebyshev_approx(|x| 2.0 * x * x * x - x + 0.5, -1.0, 1.0, 3).unwrap();
        assert!(approx.grid_sup_error < 1e-12, "error {}", approx.grid_sup_error);
        let at = |x: f64| approx.poly.eval(&[r(x)]).unwrap().re;
        assert!((at(0.3) - (2.0 * 0.027 - 0.3 + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn chebyshev_handles_shifted_intervals() {
        let approx = chebyshev_approx(|x| x * x, 1.0, 4.0, 2).unwrap();
        assert!(approx.grid_sup_error < 1e-11, "error {}", approx.grid_sup_error);
    }

    #[test]
    fn chebyshev_absolute_value_at_degree_twenty_is_accurate() {
        let approx = chebyshev_approx(f64::abs, -1.0, 1.0, 20).unwrap();
        assert!(
            approx.grid_sup_error <= 0.05,
            "error {}",
            approx.grid_sup_error
        );
    }

    #[test]
    fn basis_columns_act_as_eigenvectors() {
        let a = MultiMap::from_matrix(&[
            vec![r(2.0), c(0.5, 0.5), r(0.0)],
            vec![c(0.5, -0.5), r(1.0), c(0.0, 1.0)],
            vec![r(0.0), c(0.0, -1.0), r(-1.0)],
        ])
        .unwrap();
        let dec = eigh(&a).unwrap();
        let h = HilbertSpace::new(3, "H").unwrap();
        for (j, &l) in dec.eigenvalues().iter().enumerate() {
            let col: Vec<Complex64> = (0..3).map(|i| dec.basis().coeffs()[i * 3 + j]).collect();
            let v = Vector::new(h.clone(), col).unwrap();
            let av = a.apply(std::slice::from_ref(&v)).unwrap();
            let lv = v.scale(l);
            assert!(av.max_abs_diff(&lv) < 1e-10);
        }
    }
}
