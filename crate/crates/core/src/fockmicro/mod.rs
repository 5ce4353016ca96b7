//! Exact simulator on a truncated Fock space over a handful of labeled
//! momentum modes. Operators are real sparse matrices; exponentials are
//! taken block by block over connected components.

pub mod checks;
pub mod expm;
pub mod hamiltonian;
pub mod layout;
pub mod ops;
pub mod space;
pub mod sparse;

pub use checks::{fock_demo, CheckRow};
pub use layout::{default_layout, random_layout, ToyLayout};
pub use space::{FockSpace, Mode, Tag};
pub use sparse::SparseOperator;
