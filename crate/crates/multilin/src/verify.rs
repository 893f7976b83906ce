//! Catalog of machine-checkable invariants over the whole library, grouped
//! into named suites. Every check draws its inputs from a seed derived from
//! the run configuration, computes a worst-case residual, and passes when
//! that residual stays at or below the check's tolerance.
//!
//! Residual conventions: equality checks report the largest entrywise
//! deviation; inequality checks report the largest violation, clamped at
//! zero, so a satisfied bound always yields residual 0.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::calculus::{
    calculus_map, compatibility_check, covariance_check, family_add, family_mult,
    functoriality_check, spectral_locality_witness, CalculusContext,
};
use crate::duality::{adjoint, curry, mate};
use crate::error::{Error, Result};
use crate::grid::{grid_calculus, grid_calculus_generic, make_grid, mult_operator, Grid, GridFunction};
use crate::multimap::MultiMap;
use crate::norm::{norm_bounds, operator_norm, NormBracket, NormParams};
use crate::poly::MultiPoly;
use crate::sample;
use crate::space::{HilbertSpace, Vector};
use crate::spectral::{
    eig_normal, eigh, joint_eigh, poly_of_operator, spectral_mapping_check, spectral_radius,
};

/// Operator family driving the calculus suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    Mult,
    Add,
}

impl FamilyKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "mult" => Ok(FamilyKind::Mult),
            "add" => Ok(FamilyKind::Add),
            other => Err(Error::Usage(format!(
                "unknown family '{other}'; expected 'mult' or 'add'"
            ))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Mult => "mult",
            FamilyKind::Add => "add",
        }
    }

    /// Builds a calculus context for `a` with this family.
    pub fn context(self, a: &MultiMap) -> Result<CalculusContext> {
        match self {
            FamilyKind::Mult => {
                let dec = eigh(a)?;
                let fam = family_mult(&dec);
                CalculusContext::with_decomposition(a, dec, fam)
            }
            FamilyKind::Add => CalculusContext::new(a, family_add()),
        }
    }
}

/// Run configuration: one seed threaded through every check, a family for
/// the calculus suite, and optional per-check tolerance overrides.
#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub family: FamilyKind,
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            family: FamilyKind::Mult,
            tolerances: BTreeMap::new(),
        }
    }
}

/// Result of one check: worst residual against the tolerance in force.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tol: f64,
    pub seed: u64,
    pub detail: Option<String>,
}

/// Results of one suite; `passed` is the conjunction over its checks.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: String,
    pub family: String,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
}

pub const SUITE_NAMES: [&str; 6] = [
    "axioms",
    "duality",
    "spectral",
    "calculus",
    "covariance",
    "grid",
];

type Runner = fn(u64, f64, FamilyKind) -> Result<(f64, Option<String>)>;

struct CheckDef {
    suite: &'static str,
    name: &'static str,
    tol: f64,
    run: Runner,
}

const CHECKS: &[CheckDef] = &[
    CheckDef { suite: "axioms", name: "multilinearity", tol: 1e-10, run: multilinearity },
    CheckDef { suite: "axioms", name: "composition_associativity", tol: 1e-10, run: composition_associativity },
    CheckDef { suite: "axioms", name: "unit_laws", tol: 0.0, run: unit_laws },
    CheckDef { suite: "axioms", name: "composition_contractivity", tol: 1e-9, run: composition_contractivity },
    CheckDef { suite: "axioms", name: "tensor_isometry", tol: 1e-9, run: tensor_isometry },
    CheckDef { suite: "axioms", name: "joint_continuity", tol: 1e-9, run: joint_continuity },
    CheckDef { suite: "axioms", name: "norm_permutation_invariance", tol: 1e-10, run: norm_permutation_invariance },
    CheckDef { suite: "duality", name: "curry_round_trip", tol: 0.0, run: curry_round_trip },
    CheckDef { suite: "duality", name: "curry_norm_preservation", tol: 0.0, run: curry_norm_preservation },
    CheckDef { suite: "duality", name: "mate_involution", tol: 0.0, run: mate_involution },
    CheckDef { suite: "duality", name: "mate_norm_preservation", tol: 1e-9, run: mate_norm_preservation },
    CheckDef { suite: "duality", name: "adjunction", tol: 1e-10, run: adjunction },
    CheckDef { suite: "duality", name: "mate_compositionality", tol: 1e-10, run: mate_compositionality },
    CheckDef { suite: "duality", name: "mate_tensor_compatibility", tol: 1e-12, run: mate_tensor_compatibility },
    CheckDef { suite: "duality", name: "cstar_identity", tol: 1e-8, run: cstar_identity },
    CheckDef { suite: "spectral", name: "eigh_reconstruction", tol: 1e-9, run: eigh_reconstruction },
    CheckDef { suite: "spectral", name: "calculus_homomorphism", tol: 1e-9, run: calculus_homomorphism },
    CheckDef { suite: "spectral", name: "poly_routes_agree", tol: 1e-8, run: poly_routes_agree },
    CheckDef { suite: "spectral", name: "spectral_mapping", tol: 1e-9, run: spectral_mapping },
    CheckDef { suite: "spectral", name: "gelfand_radius", tol: 1e-4, run: gelfand_radius },
    CheckDef { suite: "spectral", name: "joint_diagonalization", tol: 1e-8, run: joint_diagonalization },
    CheckDef { suite: "calculus", name: "poly_category_laws", tol: 1e-10, run: poly_category_laws },
    CheckDef { suite: "calculus", name: "univariate_agreement", tol: 1e-9, run: univariate_agreement },
    CheckDef { suite: "calculus", name: "calculus_norm_bound", tol: 1e-6, run: calculus_norm_bound },
    CheckDef { suite: "calculus", name: "compatibility", tol: 1e-9, run: compatibility },
    CheckDef { suite: "calculus", name: "substitution", tol: 1e-8, run: substitution },
    CheckDef { suite: "calculus", name: "equivariance", tol: 1e-10, run: equivariance },
    CheckDef { suite: "calculus", name: "locality", tol: 1e-10, run: locality },
    CheckDef { suite: "covariance", name: "covariance_mult", tol: 1e-8, run: covariance_mult },
    CheckDef { suite: "covariance", name: "covariance_add", tol: 1e-8, run: covariance_add },
    CheckDef { suite: "grid", name: "grid_route_agreement", tol: 1e-9, run: grid_route_agreement },
    CheckDef { suite: "grid", name: "grid_spectral_mapping", tol: 1e-9, run: grid_spectral_mapping },
    CheckDef { suite: "grid", name: "grid_norm_bound", tol: 1e-9, run: grid_norm_bound },
];

pub fn suite_names() -> &'static [&'static str] {
    &SUITE_NAMES
}

/// Every check name, in catalog order. Tolerance overrides must use these.
pub fn check_names() -> Vec<&'static str> {
    CHECKS.iter().map(|c| c.name).collect()
}

/// (suite, check, default tolerance) rows in catalog order.
pub fn catalog() -> Vec<(&'static str, &'static str, f64)> {
    CHECKS.iter().map(|c| (c.suite, c.name, c.tol)).collect()
}

pub fn default_tolerance(name: &str) -> Option<f64> {
    CHECKS.iter().find(|c| c.name == name).map(|c| c.tol)
}

// Derived seeds decouple the checks: editing one never reshuffles another.
fn check_seed(base: u64, idx: usize) -> u64 {
    base ^ (idx as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn run_def(idx: usize, def: &CheckDef, cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let tol = cfg.tolerances.get(def.name).copied().unwrap_or(def.tol);
    let seed = check_seed(cfg.seed, idx);
    let (residual, detail) = (def.run)(seed, tol, cfg.family)?;
    Ok(CheckOutcome {
        name: def.name.to_string(),
        passed: residual <= tol,
        residual,
        tol,
        seed,
        detail,
    })
}

/// Runs one named check with the configured seed and tolerance.
pub fn run_check(name: &str, cfg: &VerifyConfig) -> Result<CheckOutcome> {
    let (idx, def) = CHECKS
        .iter()
        .enumerate()
        .find(|(_, c)| c.name == name)
        .ok_or_else(|| Error::Usage(format!("unknown check '{name}'")))?;
    run_def(idx, def, cfg)
}

/// Runs every check of one suite.
pub fn run_suite(suite: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    if !SUITE_NAMES.contains(&suite) {
        return Err(Error::Usage(format!(
            "unknown suite '{suite}'; expected one of {}",
            SUITE_NAMES.join(", ")
        )));
    }
    let mut checks = Vec::new();
    for (idx, def) in CHECKS.iter().enumerate() {
        if def.suite == suite {
            checks.push(run_def(idx, def, cfg)?);
        }
    }
    Ok(SuiteReport {
        suite: suite.to_string(),
        family: cfg.family.name().to_string(),
        seed: cfg.seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

/// Runs every suite in catalog order.
pub fn run_all(cfg: &VerifyConfig) -> Result<Vec<SuiteReport>> {
    SUITE_NAMES.iter().map(|s| run_suite(s, cfg)).collect()
}

fn random_space(rng: &mut ChaCha8Rng, max_dim: usize) -> HilbertSpace {
    HilbertSpace::new(rng.gen_range(2..=max_dim), "H").expect("positive dimension")
}

fn random_spaces(rng: &mut ChaCha8Rng, count: usize, max_dim: usize) -> Vec<HilbertSpace> {
    (0..count).map(|_| random_space(rng, max_dim)).collect()
}

fn random_map(rng: &mut ChaCha8Rng, arity: usize, max_dim: usize) -> MultiMap {
    let domain = random_spaces(rng, arity, max_dim);
    let codomain = random_space(rng, max_dim);
    sample::multimap(rng, domain, codomain).expect("shape is consistent by construction")
}

fn real_random_map(rng: &mut ChaCha8Rng, arity: usize, max_dim: usize) -> MultiMap {
    let domain = random_spaces(rng, arity, max_dim);
    let codomain = random_space(rng, max_dim);
    sample::real_multimap(rng, domain, codomain).expect("shape is consistent by construction")
}

fn norm_params(rng: &mut ChaCha8Rng) -> NormParams {
    NormParams { seed: rng.gen(), ..NormParams::default() }
}

// Both brackets contain the true norm, so disjoint brackets witness a bug.
fn bracket_gap(a: &NormBracket, b: &NormBracket) -> f64 {
    (a.lower - b.upper).max(b.lower - a.upper).max(0.0)
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for tail in permutations(n - 1) {
        for slot in 0..n {
            let mut pi = tail.clone();
            pi.insert(slot, n - 1);
            out.push(pi);
        }
    }
    out
}

fn for_each_index(dims: &[usize], mut f: impl FnMut(&[usize])) {
    let mut idx = vec![0usize; dims.len()];
    loop {
        f(&idx);
        let mut axis = dims.len();
        loop {
            if axis == 0 {
                return;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < dims[axis] {
                break;
            }
            idx[axis] = 0;
        }
    }
}

fn windowed_hermitian(rng: &mut ChaCha8Rng, dim: usize, half_width: f64) -> (HilbertSpace, MultiMap) {
    let h = HilbertSpace::new(dim, "H").expect("positive dimension");
    let a = sample::hermitian_with_spectrum_in(rng, &h, -half_width, half_width);
    (h, a)
}

// Homogeneous polynomial of the given total degree whose coefficients sum
// to one, so its diagonal collapse is exactly z^deg.
fn homogeneous_unit_sum(rng: &mut ChaCha8Rng, nvars: usize, total_deg: u32) -> MultiPoly {
    let count = rng.gen_range(2..=4usize);
    let exps: Vec<Vec<u32>> = (0..count)
        .map(|_| {
            let mut e = vec![0u32; nvars];
            for _ in 0..total_deg {
                e[rng.gen_range(0..nvars)] += 1;
            }
            e
        })
        .collect();
    let coeffs: Vec<Complex64> = loop {
        let draw: Vec<Complex64> = (0..count).map(|_| sample::complex_in_box(rng)).collect();
        let sum: Complex64 = draw.iter().sum();
        if sum.norm() >= 0.3 {
            break draw.iter().map(|c| c / sum).collect();
        }
    };
    let terms = coeffs.into_iter().zip(exps).collect();
    MultiPoly::new(nvars, terms).expect("exponent rows match nvars")
}

fn random_grid_function(rng: &mut ChaCha8Rng, grid: &Grid) -> GridFunction {
    let v = sample::vector(rng, &grid.space());
    GridFunction::from_vector(grid.clone(), &v).expect("vector drawn on the grid space")
}

fn multilinearity(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..20 {
        let t_map = random_map(&mut rng, 1 + t % 3, 4);
        let xs: Vec<Vector> = t_map.domain().iter().map(|h| sample::vector(&mut rng, h)).collect();
        for j in 0..t_map.arity() {
            let alt = sample::vector(&mut rng, &t_map.domain()[j]);
            let alpha = sample::complex_in_box(&mut rng);
            let beta = sample::complex_in_box(&mut rng);
            let mut mixed = xs.clone();
            mixed[j] = xs[j].scale(alpha).add(&alt.scale(beta))?;
            let lhs = t_map.apply(&mixed)?;
            let mut swapped = xs.clone();
            swapped[j] = alt;
            let rhs = t_map.apply(&xs)?.scale(alpha).add(&t_map.apply(&swapped)?.scale(beta))?;
            worst = worst.max(lhs.max_abs_diff(&rhs));
        }
    }
    Ok((worst, None))
}

fn composition_associativity(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..12 {
        let s = random_map(&mut rng, 1 + t % 2, 3);
        let ts: Vec<MultiMap> = s
            .domain()
            .iter()
            .map(|d| {
                let arity = 1 + rng.gen_range(0..2usize);
                let inner = random_spaces(&mut rng, arity, 3);
                sample::multimap(&mut rng, inner, d.clone()).expect("consistent shape")
            })
            .collect();
        let mut us = Vec::new();
        let mut blocks: Vec<Vec<MultiMap>> = Vec::new();
        for t_j in &ts {
            let mut block = Vec::new();
            for e in t_j.domain() {
                let arity = 1 + rng.gen_range(0..2usize);
                let inner = random_spaces(&mut rng, arity, 3);
                let u = sample::multimap(&mut rng, inner, e.clone()).expect("consistent shape");
                us.push(u.clone());
                block.push(u);
            }
            blocks.push(block);
        }
        let flat = s.compose(&ts)?.compose(&us)?;
        let inner_composites: Vec<MultiMap> = ts
            .iter()
            .zip(&blocks)
            .map(|(t_j, block)| t_j.compose(block))
            .collect::<Result<_>>()?;
        let nested = s.compose(&inner_composites)?;
        worst = worst.max(flat.max_abs_diff(&nested));
    }
    Ok((worst, None))
}

fn unit_laws(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..10 {
        let t_map = random_map(&mut rng, 1 + t % 3, 4);
        let left = MultiMap::identity(t_map.codomain()).compose(std::slice::from_ref(&t_map))?;
        let ids: Vec<MultiMap> = t_map.domain().iter().map(MultiMap::identity).collect();
        let right = t_map.compose(&ids)?;
        worst = worst.max(left.max_abs_diff(&t_map)).max(right.max_abs_diff(&t_map));
    }
    Ok((worst, None))
}

fn composition_contractivity(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..50 {
        if t % 2 == 0 {
            let s = random_map(&mut rng, 1 + t % 4 / 2, 3);
            let ts: Vec<MultiMap> = s
                .domain()
                .iter()
                .map(|d| {
                    let arity = 1 + rng.gen_range(0..2usize);
                    let inner = random_spaces(&mut rng, arity, 3);
                    sample::multimap(&mut rng, inner, d.clone()).expect("consistent shape")
                })
                .collect();
            let composite = s.compose(&ts)?;
            let lhs = norm_bounds(&composite, &norm_params(&mut rng))?.lower;
            let mut rhs = norm_bounds(&s, &norm_params(&mut rng))?.upper;
            for t_j in &ts {
                rhs *= norm_bounds(t_j, &norm_params(&mut rng))?.upper;
            }
            worst = worst.max(lhs - rhs);
        } else {
            let g = random_space(&mut rng, 3);
            let h = random_space(&mut rng, 3);
            let k = random_space(&mut rng, 3);
            let a = sample::multimap(&mut rng, vec![h.clone()], k)?;
            let b = sample::multimap(&mut rng, vec![g], h)?;
            let chained = a.compose(std::slice::from_ref(&b))?;
            worst = worst.max(operator_norm(&chained)? - operator_norm(&a)? * operator_norm(&b)?);
        }
    }
    Ok((worst.max(0.0), None))
}

fn tensor_isometry(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..20 {
        if t % 2 == 0 {
            let a = random_map(&mut rng, 1, 3);
            let b = random_map(&mut rng, 1, 3);
            let ab = a.tensor(&b);
            let fused_domain = a.domain()[0].tensor(&b.domain()[0]);
            let fused = MultiMap::new(vec![fused_domain], ab.codomain().clone(), ab.coeffs().to_vec())?;
            let product = operator_norm(&a)? * operator_norm(&b)?;
            let rel = (operator_norm(&fused)? - product).abs() / product.max(1e-12);
            worst = worst.max(rel);
        } else {
            let a = random_map(&mut rng, 2, 3);
            let b = random_map(&mut rng, 1 + t % 4 / 2, 3);
            let ab = a.tensor(&b);
            let ba = norm_bounds(&a, &norm_params(&mut rng))?;
            let bb = norm_bounds(&b, &norm_params(&mut rng))?;
            let bab = norm_bounds(&ab, &norm_params(&mut rng))?;
            worst = worst
                .max(bab.lower - ba.upper * bb.upper)
                .max(ba.lower * bb.lower - bab.upper);
        }
    }
    Ok((worst.max(0.0), None))
}

fn joint_continuity(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let eps = 1e-3;
    let mut worst = 0.0f64;
    for t in 0..10 {
        let s = random_map(&mut rng, 1 + t % 2, 3);
        let ts: Vec<MultiMap> = s
            .domain()
            .iter()
            .map(|d| {
                let arity = 1 + rng.gen_range(0..2usize);
                let inner = random_spaces(&mut rng, arity, 3);
                sample::multimap(&mut rng, inner, d.clone()).expect("consistent shape")
            })
            .collect();
        let ds = sample::multimap(&mut rng, s.domain().to_vec(), s.codomain().clone())?
            .scale(Complex64::new(eps, 0.0));
        let s2 = s.add(&ds)?;
        let mut ts2 = Vec::new();
        let mut dts = Vec::new();
        for t_j in &ts {
            let d = sample::multimap(&mut rng, t_j.domain().to_vec(), t_j.codomain().clone())?
                .scale(Complex64::new(eps, 0.0));
            ts2.push(t_j.add(&d)?);
            dts.push(d);
        }
        let diff = s.compose(&ts)?.sub(&s2.compose(&ts2)?)?;
        let lhs = norm_bounds(&diff, &norm_params(&mut rng))?.upper;
        let uppers: Vec<f64> = ts
            .iter()
            .map(|t_j| Ok(norm_bounds(t_j, &norm_params(&mut rng))?.upper))
            .collect::<Result<_>>()?;
        let mut rhs = norm_bounds(&ds, &norm_params(&mut rng))?.upper * uppers.iter().product::<f64>();
        let s2_upper = norm_bounds(&s2, &norm_params(&mut rng))?.upper;
        for (j, d) in dts.iter().enumerate() {
            let others: f64 = uppers
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, u)| u)
                .product();
            rhs += s2_upper * norm_bounds(d, &norm_params(&mut rng))?.upper * others;
        }
        worst = worst.max(lhs - rhs);
    }
    Ok((worst.max(0.0), None))
}

fn norm_permutation_invariance(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..10 {
        let t_map = random_map(&mut rng, 2 + t % 2, 3);
        let base = norm_bounds(&t_map, &norm_params(&mut rng))?;
        for pi in permutations(t_map.arity()) {
            let permuted = t_map.permute(&pi)?;
            let other = norm_bounds(&permuted, &norm_params(&mut rng))?;
            worst = worst.max(bracket_gap(&base, &other));
        }
    }
    Ok((worst, None))
}

fn curry_round_trip(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..10 {
        let t_map = random_map(&mut rng, 1 + t % 3, 4);
        for slot in 0..t_map.arity() {
            let back = curry(&t_map, slot)?.uncurry();
            worst = worst.max(back.max_abs_diff(&t_map));
        }
    }
    Ok((worst, None))
}

fn curry_norm_preservation(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..5 {
        let t_map = random_map(&mut rng, 2 + t % 2, 3);
        let params = norm_params(&mut rng);
        let direct = norm_bounds(&t_map, &params)?;
        for slot in 0..t_map.arity() {
            let curried = curry(&t_map, slot)?;
            let through = norm_bounds(curried.base(), &params)?;
            worst = worst
                .max((direct.lower - through.lower).abs())
                .max((direct.upper - through.upper).abs());
        }
    }
    Ok((worst, None))
}

fn mate_involution(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..10 {
        let t_map = random_map(&mut rng, 1 + t % 3, 4);
        for i in 0..t_map.arity() {
            let twice = mate(&mate(&t_map, i)?, i)?;
            worst = worst.max(twice.max_abs_diff(&t_map));
        }
    }
    Ok((worst, None))
}

fn mate_norm_preservation(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..10 {
        let arity = 1 + t % 3;
        let t_map = random_map(&mut rng, arity, 3);
        if arity == 1 {
            let flipped = mate(&t_map, 0)?;
            worst = worst.max((operator_norm(&flipped)? - operator_norm(&t_map)?).abs());
        } else {
            let base = norm_bounds(&t_map, &norm_params(&mut rng))?;
            for i in 0..arity {
                let flipped = mate(&t_map, i)?;
                let other = norm_bounds(&flipped, &norm_params(&mut rng))?;
                worst = worst.max(bracket_gap(&base, &other));
            }
        }
    }
    Ok((worst, None))
}

fn adjunction(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..15 {
        let real_case = t % 2 == 1;
        let t_map = if real_case {
            real_random_map(&mut rng, 1 + t % 3, 3)
        } else {
            random_map(&mut rng, 1 + t % 3, 3)
        };
        let xs: Vec<Vector> = t_map
            .domain()
            .iter()
            .map(|h| {
                if real_case {
                    sample::real_vector(&mut rng, h)
                } else {
                    sample::vector(&mut rng, h)
                }
            })
            .collect();
        let y = if real_case {
            sample::real_vector(&mut rng, t_map.codomain())
        } else {
            sample::vector(&mut rng, t_map.codomain())
        };
        let lhs = t_map.apply(&xs)?.inner(&y)?;
        for i in 0..t_map.arity() {
            let flipped = mate(&t_map, i)?;
            // Passive slots carry conjugated arguments; on real data the
            // conjugation is invisible, which is the unconjugated variant.
            let args: Vec<Vector> = (0..t_map.arity())
                .map(|l| {
                    if l == i {
                        y.clone()
                    } else if real_case {
                        xs[l].clone()
                    } else {
                        xs[l].conj()
                    }
                })
                .collect();
            let rhs = xs[i].inner(&flipped.apply(&args)?)?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok((worst, None))
}

fn mate_compositionality(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..8 {
        let s = real_random_map(&mut rng, 1 + t % 2, 3);
        let ts: Vec<MultiMap> = s
            .domain()
            .iter()
            .map(|d| {
                let arity = 1 + rng.gen_range(0..2usize);
                let inner = random_spaces(&mut rng, arity, 3);
                sample::real_multimap(&mut rng, inner, d.clone()).expect("consistent shape")
            })
            .collect();
        let composite = s.compose(&ts)?;
        let blocks: Vec<Vec<Vector>> = ts
            .iter()
            .map(|t_j| t_j.domain().iter().map(|h| sample::real_vector(&mut rng, h)).collect())
            .collect();
        let y = sample::real_vector(&mut rng, s.codomain());
        let mut offset = 0;
        for (j, t_j) in ts.iter().enumerate() {
            for i_j in 0..t_j.arity() {
                let global = offset + i_j;
                let mut args: Vec<Vector> = blocks.iter().flatten().cloned().collect();
                args[global] = y.clone();
                let lhs = mate(&composite, global)?.apply(&args)?;
                let outer_args: Vec<Vector> = ts
                    .iter()
                    .zip(&blocks)
                    .enumerate()
                    .map(|(k, (t_k, block))| {
                        if k == j { Ok(y.clone()) } else { t_k.apply(block) }
                    })
                    .collect::<Result<_>>()?;
                let w = mate(&s, j)?.apply(&outer_args)?;
                let mut inner_args = blocks[j].clone();
                inner_args[i_j] = w;
                let rhs = mate(t_j, i_j)?.apply(&inner_args)?;
                worst = worst.max(lhs.max_abs_diff(&rhs));
            }
            offset += t_j.arity();
        }
    }
    Ok((worst, None))
}

fn mate_tensor_compatibility(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..6 {
        let a = real_random_map(&mut rng, 1 + t % 2, 3);
        let b = real_random_map(&mut rng, 1 + (t + 1) % 2, 3);
        let k2 = b.codomain().dim();
        for i in 0..a.arity() {
            let lhs = mate(&a.tensor(&b), i)?;
            let rhs = mate(&a, i)?.tensor(&b);
            // The two mates index the same coefficients through different
            // fusions: the left fuses both codomains into slot i, the right
            // fuses the second codomain into its own output axis.
            let mut rest_dims: Vec<usize> = a.domain().iter().map(HilbertSpace::dim).collect();
            rest_dims.remove(i);
            rest_dims.extend(b.domain().iter().map(HilbertSpace::dim));
            let hi = a.domain()[i].dim();
            let k1 = a.codomain().dim();
            for z in 0..hi {
                for y in 0..k1 {
                    for y2 in 0..k2 {
                        for_each_index(&rest_dims, |rest| {
                            let mut li = rest.to_vec();
                            li.insert(i, y * k2 + y2);
                            let mut ri = rest.to_vec();
                            ri.insert(i, y);
                            let d = (lhs.coeff(z, &li) - rhs.coeff(z * k2 + y2, &ri)).norm();
                            if d > worst {
                                worst = d;
                            }
                        });
                    }
                }
            }
        }
    }
    Ok((worst, None))
}

fn cstar_identity(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..15 {
        let a = random_map(&mut rng, 1, 4);
        let s = operator_norm(&a)?;
        let gram = adjoint(&a)?.compose(std::slice::from_ref(&a))?;
        let rel = (operator_norm(&gram)? - s * s).abs() / (s * s).max(1e-12);
        worst = worst.max(rel);
    }
    Ok((worst, None))
}

fn eigh_reconstruction(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..100 {
        let h = HilbertSpace::new(2 + t % 5, "H")?;
        let a = sample::hermitian(&mut rng, &h);
        let dec = eigh(&a)?;
        worst = worst.max(dec.reconstruct().max_abs_diff(&a));
        let u = dec.basis();
        let gram = adjoint(u)?.compose(std::slice::from_ref(u))?;
        worst = worst.max(gram.max_abs_diff(&MultiMap::identity(&h)));
        for pair in dec.eigenvalues().windows(2) {
            worst = worst.max(pair[0].re - pair[1].re);
        }
        for j in 0..h.dim() {
            let col = dec.basis_column(j);
            let anchor = col
                .coords()
                .iter()
                .copied()
                .max_by(|a, b| a.norm().total_cmp(&b.norm()))
                .expect("nonempty column");
            worst = worst.max(anchor.im.abs()).max(-anchor.re);
        }
    }
    Ok((worst.max(0.0), None))
}

fn calculus_homomorphism(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..20 {
        let (_, a) = windowed_hermitian(&mut rng, 2 + t % 3, 2.0);
        let dec = eigh(&a)?;
        let f = sample::univariate_real_poly(&mut rng, 4);
        let g = sample::univariate_real_poly(&mut rng, 4);
        let fg = f.mul(&g)?;
        let joint = dec.apply_function(|l| fg.eval(std::slice::from_ref(&l)).ok())?;
        let fa = dec.apply_function(|l| f.eval(std::slice::from_ref(&l)).ok())?;
        let ga = dec.apply_function(|l| g.eval(std::slice::from_ref(&l)).ok())?;
        worst = worst.max(joint.max_abs_diff(&fa.compose(&[ga])?));
    }
    Ok((worst, None))
}

fn poly_routes_agree(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..20 {
        let (_, a) = windowed_hermitian(&mut rng, 2 + t % 3, 1.5);
        let p = sample::univariate_real_poly(&mut rng, 6);
        let direct = poly_of_operator(&a, &p)?;
        let through = eigh(&a)?.apply_function(|l| p.eval(std::slice::from_ref(&l)).ok())?;
        worst = worst.max(direct.max_abs_diff(&through));
    }
    Ok((worst, None))
}

fn spectral_mapping(seed: u64, tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..50 {
        let (_, a) = windowed_hermitian(&mut rng, 2 + t % 4, 1.5);
        let p = sample::univariate_real_poly(&mut rng, 6);
        let report = spectral_mapping_check(&a, &p, tol)?;
        worst = worst.max(report.max_deviation);
    }
    Ok((worst, None))
}

fn gelfand_radius(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..10 {
        let h = HilbertSpace::new(2 + t % 4, "H")?;
        let a = if t % 2 == 0 {
            sample::hermitian(&mut rng, &h)
        } else {
            sample::normal_operator(&mut rng, &h)
        };
        let rho = eig_normal(&a)?
            .eigenvalues()
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        let estimate = spectral_radius(&a, 32)?.value;
        worst = worst.max((estimate - rho).abs());
    }
    Ok((worst, None))
}

fn joint_diagonalization(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..5 {
        let h = HilbertSpace::new(2 + t % 3, "H")?;
        let n = h.dim();
        let u = sample::unitary(&mut rng, &h);
        let ustar = adjoint(&u)?;
        let count = 2 + t % 2;
        let mut ops = Vec::new();
        for _ in 0..count {
            let entries: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(2.0 * sample::real_in_box(&mut rng), 0.0))
                .collect();
            let d = MultiMap::diagonal(&h, &entries)?;
            ops.push(u.compose(&[d.compose(std::slice::from_ref(&ustar))?])?);
        }
        let joint = joint_eigh(&ops, seed ^ (t as u64 + 1))?;
        let v = joint.basis().clone();
        let vstar = adjoint(&v)?;
        for (k, op) in ops.iter().enumerate() {
            let m = vstar.compose(&[op.compose(std::slice::from_ref(&v))?])?;
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        worst = worst.max((m.coeff(i, &[i]).re - joint.eigenvalues(k)[i]).abs());
                        worst = worst.max(m.coeff(i, &[i]).im.abs());
                    } else {
                        worst = worst.max(m.coeff(i, &[j]).norm());
                    }
                }
            }
        }
        let w = sample::unitary(&mut rng, &h);
        let wstar = adjoint(&w)?;
        let conjugated: Vec<MultiMap> = ops
            .iter()
            .map(|op| w.compose(&[op.compose(std::slice::from_ref(&wstar))?]))
            .collect::<Result<_>>()?;
        let joint2 = joint_eigh(&conjugated, seed ^ (t as u64 + 17))?;
        let mut tuples1 = joint.joint_spectrum();
        let mut tuples2 = joint2.joint_spectrum();
        let lex = |a: &Vec<f64>, b: &Vec<f64>| {
            for (x, y) in a.iter().zip(b) {
                match x.total_cmp(y) {
                    std::cmp::Ordering::Equal => continue,
                    other => return other,
                }
            }
            std::cmp::Ordering::Equal
        };
        tuples1.sort_by(lex);
        tuples2.sort_by(lex);
        for (row1, row2) in tuples1.iter().zip(&tuples2) {
            for (x, y) in row1.iter().zip(row2) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok((worst, None))
}

fn poly_category_laws(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..10 {
        let m = 1 + t % 3;
        let p = sample::multipoly(&mut rng, m, 2, 3);
        let qs: Vec<MultiPoly> = (0..m)
            .map(|_| {
                let nv = 1 + rng.gen_range(0..2usize);
                sample::multipoly(&mut rng, nv, 2, 3)
            })
            .collect();
        let inner_total: usize = qs.iter().map(MultiPoly::nvars).sum();
        let rs: Vec<MultiPoly> = (0..inner_total)
            .map(|_| {
                let nv = 1 + rng.gen_range(0..2usize);
                sample::multipoly(&mut rng, nv, 2, 2)
            })
            .collect();
        let flat = p.compose(&qs)?.compose(&rs)?;
        let mut offset = 0;
        let nested_inner: Vec<MultiPoly> = qs
            .iter()
            .map(|q| {
                let block = &rs[offset..offset + q.nvars()];
                offset += q.nvars();
                q.compose(block)
            })
            .collect::<Result<_>>()?;
        let nested = p.compose(&nested_inner)?;
        for _ in 0..5 {
            let zs: Vec<Complex64> = (0..flat.nvars()).map(|_| sample::complex_in_box(&mut rng)).collect();
            worst = worst.max((flat.eval(&zs)? - nested.eval(&zs)?).norm());
        }
        let ids: Vec<MultiPoly> = (0..m).map(|_| MultiPoly::variable(1, 0).expect("one variable")).collect();
        worst = worst.max(p.compose(&ids)?.max_abs_diff(&p)?);
        for q in &qs {
            worst = worst.max(MultiPoly::variable(1, 0)?.compose(std::slice::from_ref(q))?.max_abs_diff(q)?);
        }
    }
    Ok((worst, None))
}

fn univariate_agreement(seed: u64, _tol: f64, family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..15 {
        let (_, a) = windowed_hermitian(&mut rng, 2 + t % 3, 1.5);
        let ctx = family.context(&a)?;
        let p = sample::univariate_real_poly(&mut rng, 4);
        let through = calculus_map(&ctx, &p)?;
        let direct = poly_of_operator(&a, &p)?;
        worst = worst.max(through.max_abs_diff(&direct));
    }
    Ok((worst, None))
}

fn calculus_norm_bound(seed: u64, _tol: f64, family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..10 {
        let (_, a) = windowed_hermitian(&mut rng, 2 + t % 2, 1.5);
        let ctx = family.context(&a)?;
        let nvars = 1 + t % 3;
        let p = sample::multipoly(&mut rng, nvars, 3, 3);
        let f = calculus_map(&ctx, &p)?;
        let f_upper = norm_bounds(&f, &norm_params(&mut rng))?.upper;
        let t_n = ctx.family().materialize(nvars, ctx.space())?;
        let t_upper = norm_bounds(&t_n, &norm_params(&mut rng))?.upper;
        let a_norm = operator_norm(&a)?;
        let mut bound = 0.0;
        for term in p.terms() {
            let total: u32 = term.exps.iter().sum();
            bound += term.coeff.norm() * t_upper * a_norm.powi(total as i32);
        }
        worst = worst.max(f_upper - bound);
    }
    Ok((worst.max(0.0), None))
}

fn compatibility(seed: u64, tol: f64, family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let (_, a) = windowed_hermitian(&mut rng, 3, 1.5);
    let ctx = family.context(&a)?;
    let mut worst = 0.0f64;
    let mut detail = None;
    for arity in 1..=3usize {
        let report = compatibility_check(&ctx, arity, 100, tol, seed ^ arity as u64)?;
        if report.max_residual > worst {
            worst = report.max_residual;
            if !report.passed {
                detail = report.counterexample.clone();
            }
        }
    }
    Ok((worst, detail))
}

fn substitution(seed: u64, tol: f64, family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let (_, a) = windowed_hermitian(&mut rng, 3, 1.5);
    let ctx = family.context(&a)?;
    let mut worst = 0.0f64;
    let mut detail = None;
    for t in 0..50u32 {
        let one = Complex64::new(1.0, 0.0);
        let (p, qs) = match t % 4 {
            // Power of one variable against a matching homogeneous inner layer.
            0 => {
                let c = sample::complex_in_box(&mut rng);
                let p = MultiPoly::new(1, vec![(c, vec![2])])?;
                let nv = 1 + rng.gen_range(0..3usize);
                let q = homogeneous_unit_sum(&mut rng, nv, 2);
                (p, vec![q])
            }
            // Squared leading slot: the first inner polynomial must collapse
            // onto z^3; the second is unconstrained.
            1 => {
                let p = MultiPoly::new(2, vec![(one, vec![2, 1])])?;
                let nv1 = 1 + rng.gen_range(0..3usize);
                let q1 = homogeneous_unit_sum(&mut rng, nv1, 3);
                let nv2 = 1 + rng.gen_range(0..2usize);
                let q2 = sample::multipoly(&mut rng, nv2, 2, 3);
                (p, vec![q1, q2])
            }
            // Full bidegree-4 support with shared quadratic inner layers.
            2 => {
                let terms: Vec<(Complex64, Vec<u32>)> = (1..=3u32)
                    .map(|a_exp| (sample::complex_in_box(&mut rng), vec![a_exp, 4 - a_exp]))
                    .collect();
                let p = MultiPoly::new(2, terms)?;
                let nv1 = 1 + rng.gen_range(0..2usize);
                let q1 = homogeneous_unit_sum(&mut rng, nv1, 2);
                let nv2 = 1 + rng.gen_range(0..2usize);
                let q2 = homogeneous_unit_sum(&mut rng, nv2, 2);
                (p, vec![q1, q2])
            }
            // Constant outer polynomial over constant-one inner layers.
            _ => {
                let m = 1 + rng.gen_range(0..3usize);
                let p = MultiPoly::constant(m, sample::complex_in_box(&mut rng));
                let qs = (0..m)
                    .map(|_| {
                        let nv = 1 + rng.gen_range(0..2usize);
                        MultiPoly::constant(nv, one)
                    })
                    .collect();
                (p, qs)
            }
        };
        let report = functoriality_check(&ctx, &p, &qs, 3, tol, seed ^ u64::from(t + 1))?;
        if report.max_residual > worst {
            worst = report.max_residual;
            if !report.passed {
                detail = report.counterexample.clone();
            }
        }
    }
    Ok((worst, detail))
}

fn equivariance(seed: u64, _tol: f64, family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let (_, a) = windowed_hermitian(&mut rng, 3, 1.5);
    let ctx = family.context(&a)?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p = sample::multipoly(&mut rng, 3, 2, 4);
        let pi = sample::permutation(&mut rng, 3);
        let relabeled = calculus_map(&ctx, &p.permute_vars(&pi)?)?;
        let permuted = calculus_map(&ctx, &p)?.permute(&pi)?;
        worst = worst.max(relabeled.max_abs_diff(&permuted));
    }
    Ok((worst, None))
}

fn locality(seed: u64, tol: f64, family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let (_, a) = windowed_hermitian(&mut rng, 3, 1.5);
    let ctx = family.context(&a)?;
    let mut worst = 0.0f64;
    for arity in 1..=3usize {
        let report = spectral_locality_witness(&ctx, arity, 5, tol, seed ^ arity as u64)?;
        worst = worst.max(report.max_residual);
    }
    Ok((worst, None))
}

fn covariance_for(kind: FamilyKind, seed: u64, tol: f64) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let h = HilbertSpace::new(3, "H")?;
    let a = sample::hermitian_with_spectrum_in(&mut rng, &h, -1.5, 1.5);
    let ctx = kind.context(&a)?;
    let mut worst = 0.0f64;
    let mut detail = None;
    for t in 0..20u32 {
        let u = sample::unitary(&mut rng, &h);
        let p = sample::multipoly(&mut rng, 1 + (t as usize) % 3, 2, 3);
        let report = covariance_check(&ctx, &u, &p, 2, tol, seed ^ u64::from(t + 1))?;
        if report.max_residual > worst {
            worst = report.max_residual;
            if !report.passed {
                detail = report.counterexample.clone();
            }
        }
    }
    Ok((worst, detail))
}

fn covariance_mult(seed: u64, tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    covariance_for(FamilyKind::Mult, seed, tol)
}

fn covariance_add(seed: u64, tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    covariance_for(FamilyKind::Add, seed, tol)
}

fn grid_route_agreement(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for t in 0..50usize {
        let nvars = 1 + t % 3;
        // The generic route materializes arity-nvars tensors on the grid
        // space, so point counts shrink as the variable count grows.
        let npoints = match nvars {
            1 => {
                if t == 0 {
                    64
                } else {
                    rng.gen_range(8..=64)
                }
            }
            2 => rng.gen_range(4..=24),
            _ => rng.gen_range(2..=8),
        };
        let (a, b) = if t % 2 == 0 { (0.0, 1.0) } else { (-1.0, 1.0) };
        let grid = make_grid(a, b, npoints)?;
        let mp = sample::univariate_real_poly(&mut rng, 2);
        let me = |x: f64| mp.eval(&[Complex64::new(x, 0.0)]).expect("univariate evaluation");
        let p = sample::multipoly(&mut rng, nvars, 2, 4);
        let gs: Vec<GridFunction> = (0..nvars).map(|_| random_grid_function(&mut rng, &grid)).collect();
        let fast = grid_calculus(&grid, me, &p, &gs)?;
        let generic = grid_calculus_generic(&grid, me, &p, &gs)?;
        worst = worst.max(fast.max_abs_diff(&generic));
    }
    Ok((worst, None))
}

fn grid_spectral_mapping(seed: u64, tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let npoints = rng.gen_range(4..=32);
        let grid = make_grid(-1.0, 1.0, npoints)?;
        let mp = sample::univariate_real_poly(&mut rng, 2);
        let a = mult_operator(&grid, |x| mp.eval(&[Complex64::new(x, 0.0)]).expect("univariate evaluation"))?;
        let p = sample::univariate_real_poly(&mut rng, 4);
        let report = spectral_mapping_check(&a, &p, tol)?;
        worst = worst.max(report.max_deviation);
    }
    Ok((worst, None))
}

fn grid_norm_bound(seed: u64, _tol: f64, _family: FamilyKind) -> Result<(f64, Option<String>)> {
    let mut rng = sample::rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let npoints = rng.gen_range(4..=32);
        let grid = make_grid(-1.0, 1.0, npoints)?;
        let mp = sample::univariate_real_poly(&mut rng, 2);
        let me = |x: f64| mp.eval(&[Complex64::new(x, 0.0)]).expect("univariate evaluation");
        let p = sample::multipoly(&mut rng, 2, 2, 4);
        let g = random_grid_function(&mut rng, &grid);
        let h = random_grid_function(&mut rng, &grid);
        let out = grid_calculus(&grid, me, &p, &[g.clone(), h.clone()])?;
        let sup = grid
            .nodes()
            .iter()
            .map(|&x| {
                let v = me(x);
                p.eval(&[v, v]).expect("two variables").norm()
            })
            .fold(0.0f64, f64::max);
        let g_max = g.values().iter().map(|c| c.norm()).fold(0.0f64, f64::max);
        worst = worst.max(out.norm() - sup * g_max * h.norm());
    }
    Ok((worst.max(0.0), None))
}
