//! Multilinear operator calculus on finite-dimensional complex Hilbert
//! spaces: dense multilinear maps with composition, tensor products, slot
//! permutation, currying and mates, norm brackets, a Hermitian eigensolver
//! with functional calculus, polynomial calculus driven by operator
//! families, a midpoint-grid function space, and named verification suites
//! over all of it.

mod dense;

pub mod calculus;
pub mod duality;
pub mod error;
pub mod grid;
pub mod multimap;
pub mod norm;
pub mod poly;
pub mod sample;
pub mod space;
pub mod spectral;
pub mod verify;

pub use calculus::{
    calculus_map, compatibility_check, compatibility_residual, covariance_check, family_add,
    family_conjugate, family_mult, functoriality_check, spectral_locality_witness,
    CalculusContext, CheckReport, TFamily,
};
pub use duality::{
    adjoint, as_form, curry, is_normal, is_positive, is_self_adjoint, mate, CurriedMap, MultiForm,
};
pub use error::{Error, Result};
pub use grid::{
    grid_calculus, grid_calculus_generic, make_grid, mult_operator, Grid, GridFunction,
};
pub use multimap::{linear_combination, partial_contraction, MultiMap};
pub use norm::{norm_bounds, operator_norm, NormBracket, NormParams};
pub use poly::{MultiPoly, Term};
pub use space::{HilbertSpace, Vector};
pub use spectral::{
    chebyshev_approx, eig_normal, eigh, joint_eigh, poly_of_operator, spectral_mapping_check,
    spectral_radius, spectrum, ChebyshevApprox, GelfandSequence, JointDecomposition,
    SpectralDecomposition, SpectralMappingReport,
};
pub use verify::{
    run_all, run_check, run_suite, suite_names, CheckOutcome, FamilyKind, SuiteReport,
    VerifyConfig,
};
