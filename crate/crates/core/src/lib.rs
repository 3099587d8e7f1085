pub mod catalog;
pub mod derivations;
pub mod doc;
pub mod error;
pub mod field;
pub mod isoclinism;
pub mod lie;
pub mod linalg;
pub mod search;
pub mod verdict;
pub mod xmod;

pub use error::{Error, Result};
pub use field::{FieldSpec, Scalar};
pub use lie::LieAlgebra;
pub use verdict::Verdict;
pub use xmod::CrossedModule;
