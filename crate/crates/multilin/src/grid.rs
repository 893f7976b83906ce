//! Midpoint discretization of square-integrable functions on an interval.
//!
//! A [`Grid`] carries the midpoint nodes and the uniform quadrature weight
//! of an interval `[a, b]`. Multiplication by a real function becomes a
//! diagonal operator on the grid space, so the whole polynomial calculus of
//! [`crate::calculus`] has a closed pointwise form here, computed by
//! [`grid_calculus`] and checked against the generic route.

use num_complex::Complex64;

use crate::calculus::{calculus_map, family_mult, CalculusContext};
use crate::error::{Error, Result};
use crate::multimap::MultiMap;
use crate::poly::MultiPoly;
use crate::space::{HilbertSpace, Vector};
use crate::spectral::eigh;

/// Multiplier values must be real at the nodes to this tolerance.
const IMAG_TOL: f64 = 1e-12;

/// Uniform midpoint grid on an interval: nodes `x_i = a + (i + 1/2) h` with
/// `h = (b - a) / npoints`, each carrying quadrature weight `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    a: f64,
    b: f64,
    nodes: Vec<f64>,
    weight: f64,
}

/// Builds the midpoint grid with `npoints` nodes on `[a, b]`.
pub fn make_grid(a: f64, b: f64, npoints: usize) -> Result<Grid> {
    if !a.is_finite() || !b.is_finite() || a >= b {
        return Err(Error::Domain(format!(
            "interval needs finite a < b, got [{a}, {b}]"
        )));
    }
    if npoints == 0 {
        return Err(Error::Domain("grid needs at least one node".into()));
    }
    let weight = (b - a) / npoints as f64;
    let nodes = (0..npoints).map(|i| a + (i as f64 + 0.5) * weight).collect();
    Ok(Grid { a, b, nodes, weight })
}

impl Grid {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn npoints(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// The coordinate space whose i-th axis is the node `x_i`.
    pub fn space(&self) -> HilbertSpace {
        HilbertSpace::new(self.npoints(), "L2").expect("grids have at least one node")
    }
}

/// A function sampled at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.npoints() {
            return Err(Error::Shape(format!(
                "{} values on a grid with {} nodes",
                values.len(),
                grid.npoints()
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes.iter().map(|&x| f(x)).collect();
        GridFunction { grid, values }
    }

    pub fn constant(grid: Grid, c: Complex64) -> Self {
        let values = vec![c; grid.npoints()];
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Discrete L2 norm, `sqrt(weight * sum |values|^2)`.
    pub fn norm(&self) -> f64 {
        let sum: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (self.grid.weight * sum).sqrt()
    }

    /// Discrete L2 inner product, conjugate-linear in `other`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::Shape("inner product across different grids".into()));
        }
        let sum: Complex64 =
            self.values.iter().zip(&other.values).map(|(f, g)| f * g.conj()).sum();
        Ok(sum * self.grid.weight)
    }

    /// The raw node values as a vector in the grid space. No quadrature
    /// scaling is applied, so diagonal operators and pointwise products act
    /// identically on either representation.
    pub fn to_vector(&self) -> Vector {
        Vector::new(self.grid.space(), self.values.clone())
            .expect("value count matches the grid space")
    }

    pub fn from_vector(grid: Grid, v: &Vector) -> Result<Self> {
        GridFunction::new(grid, v.coords().to_vec())
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(f, g)| (f - g).norm())
            .fold(0.0, f64::max)
    }
}

/// Samples `me` at the nodes, rejecting values with a nonreal part.
fn real_node_values(grid: &Grid, me: &dyn Fn(f64) -> Complex64) -> Result<Vec<f64>> {
    grid.nodes
        .iter()
        .map(|&x| {
            let v = me(x);
            if v.im.abs() > IMAG_TOL {
                return Err(Error::Domain(format!(
                    "multiplier is not real at node {x}: imaginary part {:.3e}",
                    v.im
                )));
            }
            Ok(v.re)
        })
        .collect()
}

/// The multiplication operator `f(x) |-> me(x) f(x)` as a diagonal map on
/// the grid space. Its spectrum is exactly the multiset of node values.
pub fn mult_operator(grid: &Grid, me: impl Fn(f64) -> Complex64) -> Result<MultiMap> {
    let entries: Vec<Complex64> = real_node_values(grid, &me)?
        .into_iter()
        .map(|x| Complex64::new(x, 0.0))
        .collect();
    MultiMap::diagonal(&grid.space(), &entries)
}

/// Pointwise polynomial calculus on the grid:
///
/// ```text
/// out(x_i) = P(me(x_i), ..., me(x_i)) * g_1(x_i) * ... * g_n(x_i)
/// ```
///
/// This is the closed form of the generic calculus for the multiplication
/// generator with the entrywise product family; the two routes agree to
/// rounding error because the generator is diagonal on the grid.
pub fn grid_calculus(
    grid: &Grid,
    me: impl Fn(f64) -> Complex64,
    p: &MultiPoly,
    gs: &[GridFunction],
) -> Result<GridFunction> {
    let n = p.nvars();
    if n == 0 {
        return Err(Error::Usage(
            "calculus needs at least one variable; lift constants to a univariate polynomial"
                .into(),
        ));
    }
    if gs.len() != n {
        return Err(Error::Shape(format!(
            "polynomial in {n} variables applied to {} functions",
            gs.len()
        )));
    }
    for g in gs {
        if g.grid() != grid {
            return Err(Error::Shape("argument sampled on a different grid".into()));
        }
    }
    let lambdas = real_node_values(grid, &me)?;
    let mut values = Vec::with_capacity(grid.npoints());
    for (i, &lam) in lambdas.iter().enumerate() {
        let zs = vec![Complex64::new(lam, 0.0); n];
        let mut v = p.eval(&zs)?;
        for g in gs {
            v *= g.values[i];
        }
        values.push(v);
    }
    GridFunction::new(grid.clone(), values)
}

/// The generic-engine route for the same calculus: decomposes the
/// multiplication operator and applies [`calculus_map`] with the entrywise
/// product family to the sampled functions.
pub fn grid_calculus_generic(
    grid: &Grid,
    me: impl Fn(f64) -> Complex64,
    p: &MultiPoly,
    gs: &[GridFunction],
) -> Result<GridFunction> {
    if gs.len() != p.nvars() {
        return Err(Error::Shape(format!(
            "polynomial in {} variables applied to {} functions",
            p.nvars(),
            gs.len()
        )));
    }
    for g in gs {
        if g.grid() != grid {
            return Err(Error::Shape("argument sampled on a different grid".into()));
        }
    }
    let a = mult_operator(grid, me)?;
    let decomp = eigh(&a)?;
    let family = family_mult(&decomp);
    let ctx = CalculusContext::with_decomposition(&a, decomp, family)?;
    let map = calculus_map(&ctx, p)?;
    let xs: Vec<Vector> = gs.iter().map(GridFunction::to_vector).collect();
    GridFunction::from_vector(grid.clone(), &map.apply(&xs)?)
}
