//! Curvature of indefinite (almost Hermitian) tangent-space models: algebraic
//! curvature tensors, isotropic and antiholomorphic plane sampling, and
//! diagnostics relating vanishing-curvature conditions to flatness.

pub mod canonical;
pub mod contract;
pub mod diagnostics;
pub mod document;
pub mod error;
pub mod frames;
pub mod generate;
pub mod identities;
pub mod model;
pub mod sampling;
pub mod tensor;
pub mod tolerance;

pub use canonical::{bochner, conformal, phi, pi1, pi2, psi, BochnerTensor};
pub use contract::{
    conjugate, ricci, ricci_star, scalar_curv, scalar_star, validate_curvature_like,
    CurvatureLikeReport,
};
pub use diagnostics::{
    einstein_check, equivalence_check, flatness_norms, fuzz, uniqueness_check, vanishing_report,
    DiagReport, EquivalenceReport, FlatnessNorms, FuzzConfig, FuzzSummary, TheoremId,
    UniquenessKind, Witness,
};
pub use document::TensorDocument;
pub use error::{Error, Result};
pub use frames::{
    classify_holomorphy, classify_plane, complete_to_basis, gram_schmidt_indefinite,
    sectional_curvature, Degeneracy, Frame, Holomorphy, Plane, Sign,
};
pub use identities::{theorem6_identities, IdentityReport};
pub use model::{ModelPoint, Vector};
pub use sampling::{sample_one, sample_planes, PlaneKind, Sample};
pub use tensor::{Bilinear, QuadTensor, Symmetry};
pub use tolerance::Tolerance;
