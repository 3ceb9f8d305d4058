//! Truncated Hermite and grid representations with the `(G, H, K)` norm scale.

pub mod basis;
pub mod calculus;
pub mod dual;
pub mod integrate;
pub mod norms;
pub mod quadrature;
pub mod state;

pub use basis::{basis_size, hermite_basis, hermite_function_at, hermite_functions, HermiteBasis, MultiIndex};
pub use calculus::{derivative, second_derivative, tail_ratio, translate, translate_checked, truncated_derivative, Translation};
pub use dual::DualField;
pub use integrate::{integrate_path, PathIntegral};
pub use norms::{check_embedding, norm_at, sobolev_weight, EmbeddingReport, Metric, NormScale};
pub use quadrature::{evaluate_1d, project_function, GaussHermite};
pub use state::{Basis, BasisTag, SpectralState, StateDoc};
