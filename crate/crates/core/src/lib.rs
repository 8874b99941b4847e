//! Numerical chainlet calculus: polyhedral chains, differential forms,
//! natural norms, differential elements and the geometric star, coboundary
//! and Laplace operators.
//!
//! Geometry is generic over the floating point [`Scalar`] (`f32` or `f64`);
//! the aliases at the crate root fix it to `f64`.

pub mod chains;
pub mod elements;
pub mod error;
pub mod exterior;
pub mod forms;
pub mod harness;
pub mod norms;
mod geom;
pub mod quadrature;
pub mod scalar;

pub use error::{ChainletError, Result};
pub use exterior::{blades, frame_to_kvector, Blade, MAX_DIM};
pub use scalar::Scalar;

pub type KVector = exterior::KVector<f64>;
pub type KDirection = exterior::KDirection<f64>;
pub type Simplex = chains::Simplex<f64>;
pub type Cube = chains::Cube<f64>;
pub type Cell = chains::Cell<f64>;
pub type PolyChain = chains::PolyChain<f64>;
pub type FormField = forms::FormField<f64>;
pub type SmoothMap = forms::SmoothMap<f64>;
pub type Poly = forms::Poly<f64>;
pub type ElementaryChain = elements::ElementaryChain<f64>;
pub type ChainletSeq = elements::ChainletSeq<f64>;
pub type DiffChain = norms::DiffChain<f64>;

pub type KVectorF32 = exterior::KVector<f32>;
pub type PolyChainF32 = chains::PolyChain<f32>;
