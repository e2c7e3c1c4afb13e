pub mod a3;
pub mod appendix;
pub mod bipoly;
pub mod error;
pub mod io;
pub mod jacobi;
pub mod linalg;
pub mod monomialize;
pub mod path;
pub mod potential;
pub mod quiver;
pub mod rational;
pub mod realize;
pub mod rewrite;
pub mod substitution;

pub use error::{QpError, Result};
pub use path::{NCElement, Path};
pub use potential::Potential;
pub use quiver::{Quiver, QuiverSpec};
pub use rational::Q;
pub use rewrite::{Orientation, ReductionSystem};
pub use substitution::Substitution;
