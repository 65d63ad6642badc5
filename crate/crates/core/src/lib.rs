//! Slice analysis on the quadratic cone of the Clifford algebra `ℝ₃`,
//! planar topology of symmetric domains, Runge-pair analysis and
//! least-squares approximation experiments.

pub mod approx;
pub mod clifford;
pub mod cone;
pub mod error;
pub mod runge;
pub mod selftest;
pub mod stem;
pub mod tolerance;
pub mod topology;

pub use approx::{
    poly_approx, rational_approx, runge_experiment, ApproxResult, CompactSampler, ExperimentRecord,
};
pub use clifford::{Cl3Element, ProductTable, QuatPair, Quaternion, PRODUCT_TABLE};
pub use cone::{in_cone, in_root_sphere, sample_root_sphere, slice_coords, SliceCoords};
pub use error::{Error, Result};
pub use runge::{analyze_pair, betti_omega, OmegaBetti, RungeReport};
pub use stem::{
    is_intrinsic, norm_bounds, rational_build, refined_split_components, representation_eval,
    slice_eval, CompletionBasis, Pole, RationalSliceFunction, SliceFunction, SlicePolynomial,
    StemFunction, StemValue,
};
pub use topology::{rasterize, DomainGrid, DomainSpec, TopoSummary};
