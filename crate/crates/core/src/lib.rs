//! Partitions `A ∪ B = ℕ \ {r + mk}` with equal strict-pair representation
//! counts: set builders, representation functions, a forced-extension solver,
//! and exact identity checkers.

pub mod builders;
pub mod cli;
pub mod intset;
pub mod repfn;
pub mod solver;
pub mod verify;

pub use builders::{build_family, Family, FamilySets, WeightSequence};
pub use intset::{BoundedSet, ProgressionSpec, SetError};
pub use repfn::{r2, r2_profile, RepProfile};
pub use solver::{classify_grid, forced_extend, match_family, ExtensionOutcome, Status};
