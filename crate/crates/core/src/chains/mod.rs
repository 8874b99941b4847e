//! Oriented cells, polyhedral chains, dyadic subdivision and supports.

mod cell;
mod chain;
mod dyadic;
mod support;
mod whitney;

pub use cell::{Cell, Cube, Simplex};
pub(crate) use cell::CellKey;
pub use chain::{PolyChain, Term};
pub use dyadic::{Dyadic, DyadicCube};
pub use support::Support;
pub use whitney::whitney_cubes;
