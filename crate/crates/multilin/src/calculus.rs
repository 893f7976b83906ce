//! Polynomial calculus over a Hermitian generator and a family of n-linear
//! operations.
//!
//! A [`TFamily`] supplies one n-linear map per arity on a fixed space. Given
//! a Hermitian generator `A`, [`calculus_map`] realizes a polynomial
//! `P(z_1, ..., z_n) = sum c_k z^k` as the multilinear map
//!
//! ```text
//! (x_1, ..., x_n) |-> sum_k c_k T_n(A^{k_1} x_1, ..., A^{k_n} x_n)
//! ```
//!
//! with one operator power per slot and exponent. The check functions probe
//! the identities this construction does and does not satisfy: the product
//! rule over the generator, route agreement under polynomial substitution,
//! unitary covariance, and spectral locality. Failures are reported as
//! check outcomes, never panics; the pointwise-addition family exists
//! precisely to exercise the failing side.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::duality::adjoint;
use crate::error::{Error, Result};
use crate::multimap::MultiMap;
use crate::poly::MultiPoly;
use crate::sample;
use crate::space::{HilbertSpace, Vector};
use crate::spectral::{eigh, SpectralDecomposition};

/// A context's decomposition must rebuild its generator this tightly.
const RECONSTRUCT_TOL: f64 = 1e-9;
/// Conjugating unitaries must satisfy `U*U = I` to this tolerance.
const UNITARY_TOL: f64 = 1e-9;

type Maker = Arc<dyn Fn(usize, &HilbertSpace) -> Result<MultiMap> + Send + Sync>;
type Action = Arc<dyn Fn(&[Vector]) -> Result<Vector> + Send + Sync>;
type Kernel = Arc<dyn Fn(f64, &[Complex64]) -> Complex64 + Send + Sync>;

/// A family of n-linear operations, one per arity, on a common space.
///
/// `maker` materializes the arity-n coefficient tensor. An optional `action`
/// records the family's defining rule on vectors when that rule is not
/// multilinear (pointwise addition of n vectors is the canonical case: no
/// tensor reproduces it, so the tensor is a stand-in and the action is the
/// ground truth that checks evaluate). An optional `kernel` gives the
/// family's scalar symbol on spectrally aligned inputs.
#[derive(Clone)]
pub struct TFamily {
    name: String,
    maker: Maker,
    action: Option<Action>,
    kernel: Option<Kernel>,
}

impl fmt::Debug for TFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TFamily").field("name", &self.name).finish_non_exhaustive()
    }
}

impl TFamily {
    pub fn new(
        name: impl Into<String>,
        maker: impl Fn(usize, &HilbertSpace) -> Result<MultiMap> + Send + Sync + 'static,
    ) -> Self {
        TFamily {
            name: name.into(),
            maker: Arc::new(maker),
            action: None,
            kernel: None,
        }
    }

    /// Declares the family's defining rule on vectors. `apply` uses it in
    /// place of the materialized tensor.
    pub fn with_action(
        mut self,
        action: impl Fn(&[Vector]) -> Result<Vector> + Send + Sync + 'static,
    ) -> Self {
        self.action = Some(Arc::new(action));
        self
    }

    /// Declares the scalar symbol `kernel(spectral point, z_1..z_n)`.
    pub fn with_kernel(
        mut self,
        kernel: impl Fn(f64, &[Complex64]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        self.kernel = Some(Arc::new(kernel));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// The arity-n coefficient tensor on `space`.
    pub fn materialize(&self, arity: usize, space: &HilbertSpace) -> Result<MultiMap> {
        if arity == 0 {
            return Err(Error::Usage("family arity must be at least 1".into()));
        }
        let t = (self.maker)(arity, space)?;
        if t.arity() != arity || t.codomain() != space || t.domain().iter().any(|h| h != space) {
            return Err(Error::Shape(format!(
                "family '{}' produced a map of the wrong shape at arity {arity}",
                self.name
            )));
        }
        Ok(t)
    }

    /// Evaluates the family on vectors: the declared action when present,
    /// otherwise the materialized tensor.
    pub fn apply(&self, xs: &[Vector]) -> Result<Vector> {
        let first = xs
            .first()
            .ok_or_else(|| Error::Usage("family application needs at least one vector".into()))?;
        match &self.action {
            Some(act) => act(xs),
            None => self.materialize(xs.len(), first.space())?.apply(xs),
        }
    }

    pub fn has_kernel(&self) -> bool {
        self.kernel.is_some()
    }

    pub fn kernel_value(&self, point: f64, zs: &[Complex64]) -> Option<Complex64> {
        self.kernel.as_ref().map(|k| k(point, zs))
    }
}

/// Entrywise product family expressed in the eigenbasis of a decomposed
/// generator: `T_n = U (entrywise product) (U* x ... x U*)`. In that basis
/// every slot is diagonal, which makes the product rule over the generator
/// an exact identity.
pub fn family_mult(decomp: &SpectralDecomposition) -> TFamily {
    let u = decomp.basis().clone();
    let ustar = adjoint(&u).expect("eigenbasis has arity 1");
    let maker = move |arity: usize, space: &HilbertSpace| -> Result<MultiMap> {
        if space != u.codomain() {
            return Err(Error::Shape(format!(
                "family is tied to a dimension-{} space but was asked for dimension {}",
                u.codomain().dim(),
                space.dim()
            )));
        }
        let had = MultiMap::hadamard(space, arity)?;
        let inner = had.compose(&vec![ustar.clone(); arity])?;
        u.compose(&[inner])
    };
    TFamily::new("mult", maker).with_kernel(|_, zs| zs.iter().product())
}

/// Pointwise addition family: the action is the literal vector sum
/// `x_1 + ... + x_n`, which is not multilinear for n >= 2. The materialized
/// tensor is its multilinear stand-in `n * (entrywise product)`: it matches
/// the action on aligned standard-basis inputs, has operator norm exactly n,
/// and reduces to the identity at arity 1.
pub fn family_add() -> TFamily {
    let maker = |arity: usize, space: &HilbertSpace| -> Result<MultiMap> {
        let had = MultiMap::hadamard(space, arity)?;
        Ok(had.scale(Complex64::new(arity as f64, 0.0)))
    };
    TFamily::new("add", maker)
        .with_action(|xs: &[Vector]| {
            let (first, rest) = xs
                .split_first()
                .ok_or_else(|| Error::Usage("vector sum needs at least one vector".into()))?;
            rest.iter().try_fold(first.clone(), |acc, x| acc.add(x))
        })
        .with_kernel(|_, zs| zs.iter().sum())
}

/// Conjugates every arity of the family by a unitary:
/// `T'_n = U T_n (U* x ... x U*)`.
pub fn family_conjugate(family: &TFamily, u: &MultiMap) -> Result<TFamily> {
    let ustar = unitary_inverse(u)?;
    let name = family.name.clone();
    let maker_u = u.clone();
    let maker_ustar = ustar.clone();
    let base_maker = family.maker.clone();
    let maker = move |arity: usize, space: &HilbertSpace| -> Result<MultiMap> {
        let base = (base_maker)(arity, space)?;
        let pulled = base.compose(&vec![maker_ustar.clone(); arity])?;
        maker_u.compose(&[pulled])
    };
    let mut out = TFamily {
        name,
        maker: Arc::new(maker),
        action: None,
        kernel: family.kernel.clone(),
    };
    if let Some(act) = &family.action {
        let act = act.clone();
        let act_u = u.clone();
        let act_ustar = ustar;
        out.action = Some(Arc::new(move |xs: &[Vector]| {
            let pulled: Vec<Vector> = xs
                .iter()
                .map(|x| act_ustar.apply(std::slice::from_ref(x)))
                .collect::<Result<_>>()?;
            act_u.apply(&[act(&pulled)?])
        }));
    }
    Ok(out)
}

/// Checks `u` is a unitary operator and returns its adjoint.
fn unitary_inverse(u: &MultiMap) -> Result<MultiMap> {
    if u.arity() != 1 || u.domain()[0] != *u.codomain() {
        return Err(Error::Usage("conjugation requires a square arity-1 map".into()));
    }
    let ustar = adjoint(u)?;
    let gram = ustar.compose(std::slice::from_ref(u))?;
    let dev = gram.max_abs_diff(&MultiMap::identity(u.codomain()));
    if dev > UNITARY_TOL {
        return Err(Error::Domain(format!(
            "conjugating map is not unitary: |U*U - I| = {dev:.3e}"
        )));
    }
    Ok(ustar)
}

/// A Hermitian generator, its spectral decomposition, and the family that
/// together define a polynomial calculus.
#[derive(Debug, Clone)]
pub struct CalculusContext {
    a: MultiMap,
    decomp: SpectralDecomposition,
    family: TFamily,
}

impl CalculusContext {
    /// Decomposes `a` and pairs it with `family`.
    pub fn new(a: &MultiMap, family: TFamily) -> Result<Self> {
        let decomp = eigh(a)?;
        Self::with_decomposition(a, decomp, family)
    }

    /// Uses a decomposition computed elsewhere; it must rebuild `a` to
    /// within 10^-9.
    pub fn with_decomposition(
        a: &MultiMap,
        decomp: SpectralDecomposition,
        family: TFamily,
    ) -> Result<Self> {
        let dev = decomp.reconstruct().max_abs_diff(a);
        if dev > RECONSTRUCT_TOL {
            return Err(Error::Numeric(format!(
                "decomposition rebuilds the generator to {dev:.3e}, beyond {RECONSTRUCT_TOL:.0e}"
            )));
        }
        Ok(CalculusContext { a: a.clone(), decomp, family })
    }

    pub fn operator(&self) -> &MultiMap {
        &self.a
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomp
    }

    pub fn family(&self) -> &TFamily {
        &self.family
    }

    pub fn space(&self) -> &HilbertSpace {
        self.a.codomain()
    }
}

/// Materializes `sum_k c_k T_n (A^{k_1} x ... x A^{k_n})` for an n-variable
/// polynomial. Powers of the generator are computed once per call.
pub fn calculus_map(ctx: &CalculusContext, p: &MultiPoly) -> Result<MultiMap> {
    let n = p.nvars();
    if n == 0 {
        return Err(Error::Usage(
            "calculus needs at least one variable; lift constants to a univariate polynomial"
                .into(),
        ));
    }
    let space = ctx.space().clone();
    let t_n = ctx.family.materialize(n, &space)?;
    let mut powers: Vec<MultiMap> = vec![MultiMap::identity(&space)];
    let mut acc = MultiMap::zero(vec![space.clone(); n], space.clone())?;
    for term in p.terms() {
        let mut parts = Vec::with_capacity(n);
        for &k in &term.exps {
            let k = k as usize;
            while powers.len() <= k {
                let next = ctx.a.compose(&[powers.last().expect("nonempty cache").clone()])?;
                powers.push(next);
            }
            parts.push(powers[k].clone());
        }
        acc = acc.add(&t_n.compose(&parts)?.scale(term.coeff))?;
    }
    Ok(acc)
}

/// Outcome of a randomized identity check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub trials: usize,
    pub max_residual: f64,
    pub tol: f64,
    pub seed: u64,
    pub counterexample: Option<String>,
}

impl CheckReport {
    fn from_trials(
        name: String,
        trials: usize,
        max_residual: f64,
        tol: f64,
        seed: u64,
        counterexample: Option<String>,
    ) -> Self {
        CheckReport {
            name,
            passed: max_residual <= tol,
            trials,
            max_residual,
            tol,
            seed,
            counterexample,
        }
    }
}

/// Deviation of the family from the product rule on one input:
/// `|T_n(p_1(A) f_1, ..., p_n(A) f_n) - (p_1 ... p_n)(A) T_n(f_1, ..., f_n)|`.
///
/// The family's declared action is the evaluation route, so a family whose
/// rule is not multilinear is judged on its actual rule.
pub fn compatibility_residual(
    ctx: &CalculusContext,
    ps: &[MultiPoly],
    fs: &[Vector],
) -> Result<f64> {
    if ps.is_empty() || ps.len() != fs.len() {
        return Err(Error::Usage(format!(
            "need equally many polynomials and vectors, got {} and {}",
            ps.len(),
            fs.len()
        )));
    }
    let mut product = MultiPoly::constant(1, Complex64::new(1.0, 0.0));
    for p in ps {
        if p.nvars() != 1 {
            return Err(Error::Usage("slot polynomials must be univariate".into()));
        }
        product = product.mul(p)?;
    }
    let moved: Vec<Vector> = ps
        .iter()
        .zip(fs)
        .map(|(p, f)| crate::spectral::poly_of_operator(&ctx.a, p)?.apply(std::slice::from_ref(f)))
        .collect::<Result<_>>()?;
    let lhs = ctx.family.apply(&moved)?;
    let collected = ctx.family.apply(fs)?;
    let rhs = crate::spectral::poly_of_operator(&ctx.a, &product)?.apply(&[collected])?;
    Ok(lhs.max_abs_diff(&rhs))
}

/// Product rule over the generator on random degree-at-most-4 univariate
/// polynomials and random unit vectors.
pub fn compatibility_check(
    ctx: &CalculusContext,
    arity: usize,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport> {
    if arity == 0 {
        return Err(Error::Usage("compatibility needs arity at least 1".into()));
    }
    let mut rng = sample::rng(seed);
    let mut max_residual = 0.0f64;
    let mut counterexample = None;
    for trial in 0..trials {
        let ps: Vec<MultiPoly> =
            (0..arity).map(|_| sample::univariate_real_poly(&mut rng, 4)).collect();
        let fs: Vec<Vector> =
            (0..arity).map(|_| sample::unit_vector(&mut rng, ctx.space())).collect();
        let residual = compatibility_residual(ctx, &ps, &fs)?;
        if residual > max_residual {
            max_residual = residual;
        }
        if residual > tol && counterexample.is_none() {
            counterexample = Some(format!("trial {trial}: residual {residual:.6e}"));
        }
    }
    Ok(CheckReport::from_trials(
        format!("compatibility({})", ctx.family.name()),
        trials,
        max_residual,
        tol,
        seed,
        counterexample,
    ))
}

/// Substitution against composition: materializes both
/// `calculus_map(P composed with Qs)` and
/// `calculus_map(P) composed with [calculus_map(Q_j)]` and compares them on
/// random unit tuples.
pub fn functoriality_check(
    ctx: &CalculusContext,
    p: &MultiPoly,
    qs: &[MultiPoly],
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport> {
    let composed = p.compose(qs)?;
    let direct = calculus_map(ctx, &composed)?;
    let p_map = calculus_map(ctx, p)?;
    let q_maps: Vec<MultiMap> = qs.iter().map(|q| calculus_map(ctx, q)).collect::<Result<_>>()?;
    let routed = p_map.compose(&q_maps)?;
    let total_vars = composed.nvars();
    let mut rng = sample::rng(seed);
    let mut max_residual = 0.0f64;
    let mut counterexample = None;
    for trial in 0..trials {
        let xs: Vec<Vector> =
            (0..total_vars).map(|_| sample::unit_vector(&mut rng, ctx.space())).collect();
        let residual = direct.apply(&xs)?.max_abs_diff(&routed.apply(&xs)?);
        if residual > max_residual {
            max_residual = residual;
        }
        if residual > tol && counterexample.is_none() {
            counterexample = Some(format!("trial {trial}: residual {residual:.6e}"));
        }
    }
    Ok(CheckReport::from_trials(
        format!("substitution({})", ctx.family.name()),
        trials,
        max_residual,
        tol,
        seed,
        counterexample,
    ))
}

/// Unitary covariance: conjugating the generator and the family commutes
/// with the calculus, `U F_{A}(P)(U* x_1, ..., U* x_n) = F_{UAU*}(P)(x_1,
/// ..., x_n)`, checked on random unit tuples.
pub fn covariance_check(
    ctx: &CalculusContext,
    u: &MultiMap,
    p: &MultiPoly,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport> {
    let ustar = unitary_inverse(u)?;
    let conjugated_family = family_conjugate(&ctx.family, u)?;
    let a_prime = u.compose(&[ctx.a.compose(std::slice::from_ref(&ustar))?])?;
    let basis_prime = u.compose(&[ctx.decomp.basis().clone()])?;
    let decomp_prime =
        SpectralDecomposition::from_parts(ctx.decomp.eigenvalues().to_vec(), basis_prime);
    let ctx_prime = CalculusContext::with_decomposition(&a_prime, decomp_prime, conjugated_family)?;
    let original = calculus_map(ctx, p)?;
    let conjugated = calculus_map(&ctx_prime, p)?;
    let n = p.nvars();
    let mut rng = sample::rng(seed);
    let mut max_residual = 0.0f64;
    let mut counterexample = None;
    for trial in 0..trials {
        let xs: Vec<Vector> =
            (0..n).map(|_| sample::unit_vector(&mut rng, ctx.space())).collect();
        let pulled: Vec<Vector> =
            xs.iter().map(|x| ustar.apply(std::slice::from_ref(x))).collect::<Result<_>>()?;
        let lhs = u.apply(&[original.apply(&pulled)?])?;
        let rhs = conjugated.apply(&xs)?;
        let residual = lhs.max_abs_diff(&rhs);
        if residual > max_residual {
            max_residual = residual;
        }
        if residual > tol && counterexample.is_none() {
            counterexample = Some(format!("trial {trial}: residual {residual:.6e}"));
        }
    }
    Ok(CheckReport::from_trials(
        format!("covariance({})", ctx.family.name()),
        trials,
        max_residual,
        tol,
        seed,
        counterexample,
    ))
}

/// Witnesses the family's declared kernel on spectrally aligned inputs: for
/// every eigenvector `u_i` of the generator and random scalars `z_j`,
/// `apply(z_1 u_i, ..., z_n u_i)` must equal `kernel(lambda_i, z) u_i`.
/// Families without a kernel pass vacuously with zero trials.
pub fn spectral_locality_witness(
    ctx: &CalculusContext,
    arity: usize,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<CheckReport> {
    let name = format!("locality({})", ctx.family.name());
    if !ctx.family.has_kernel() {
        return Ok(CheckReport::from_trials(name, 0, 0.0, tol, seed, None));
    }
    if arity == 0 {
        return Err(Error::Usage("locality needs arity at least 1".into()));
    }
    let lambdas = ctx.decomp.real_eigenvalues();
    let mut rng = sample::rng(seed);
    let mut max_residual = 0.0f64;
    let mut counterexample = None;
    for trial in 0..trials {
        for (i, &lambda) in lambdas.iter().enumerate() {
            let column = ctx.decomp.basis_column(i);
            let zs: Vec<Complex64> = (0..arity).map(|_| sample::complex_in_box(&mut rng)).collect();
            let aligned: Vec<Vector> = zs.iter().map(|&z| column.scale(z)).collect();
            let got = ctx.family.apply(&aligned)?;
            let symbol = ctx
                .family
                .kernel_value(lambda, &zs)
                .expect("kernel presence checked above");
            let residual = got.max_abs_diff(&column.scale(symbol));
            if residual > max_residual {
                max_residual = residual;
            }
            if residual > tol && counterexample.is_none() {
                counterexample =
                    Some(format!("trial {trial}, eigenvector {i}: residual {residual:.6e}"));
            }
        }
    }
    Ok(CheckReport::from_trials(name, trials, max_residual, tol, seed, counterexample))
}
