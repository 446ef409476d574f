//! H(curl²)-conforming quadrilateral spectral elements.
//!
//! The crate builds hierarchical vector modes on convex quadrilaterals from
//! generalized Jacobi polynomials, assembles the mixed quad-curl saddle system
//! and solves both the source problem and the eigenvalue problem.
//!
//! Layout, bottom-up:
//!
//! * [`orthopoly`]: Jacobi polynomials, the two generalized families, Gauss–Legendre rules.
//! * [`geometry`]: the bilinear reference map and the contravariant transforms.
//! * [`refbasis`]: vector and scalar modes on the reference square.
//! * [`meshing`]: meshes, refinement and global DOF numbering with orientation signs.
//! * [`assembly`]: element matrices and the global saddle system.
//! * [`solvers`]: direct saddle solve and shift-invert eigensolver.
//! * [`harness`]: manufactured solution, error norms and study drivers.

pub mod assembly;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod meshing;
pub mod orthopoly;
pub mod refbasis;
pub mod solvers;
pub mod sparse;

pub use assembly::{assemble, element_load, element_matrices, ElementMatrices, SaddleSystem};
pub use error::{Error, Result};
pub use geometry::{JacobianData, Point, Quadrilateral};
pub use harness::{Domain, ErrorReport, ExactSolution, MeshKind};
pub use meshing::{DofMap, Mesh};
pub use orthopoly::{PolynomialValue, QuadratureRule};
pub use refbasis::{Corner, EdgeId, Mode, ModeEval, ScalarMode, SpectralOrder};
pub use solvers::{EigenSolution, SourceSolution};
pub use sparse::CsrMatrix;
