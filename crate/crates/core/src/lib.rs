//! Mixed-level orthogonal arrays.
//!
//! The crate covers four jobs:
//!
//! * [`numtheory`]: the divisibility bounds `L_t` on the size of a strength-`t`
//!   array and the threshold `d` past which `L_t` equals the size of the
//!   complete factorial.
//! * [`groups`] and [`constructions`]: proper fractions of strength `k - 1`
//!   over `S3`, `Dih4` or `Dih5` times cyclic groups, whose counting function
//!   is constant on conjugacy classes.
//! * [`oarray`]: the array data model, its text/JSON formats and the strength
//!   and conjugacy verifiers.
//! * [`search`]: backtracking enumeration of small arrays of a given size and
//!   strength.
//!
//! The [`cli`] module backs the `mixoa` binary.

pub mod cli;
pub mod constructions;
pub mod error;
pub mod groups;
pub mod numtheory;
pub mod oarray;
pub mod search;

pub use constructions::{
    build_reference_catalog, construct, select_recipe, select_recipe_with, Case, CatalogEntry, ConstructionRecipe,
    LastRowRule, RecipeOptions,
};
pub use error::{Error, Result};
pub use groups::{ConjugacyPartition, FiniteGroup, GroupOrdering};
pub use numtheory::{bound_profile, compute_d, compute_l, BoundProfile, FactorSpec};
pub use oarray::{ConjugacyReport, FactorTag, OrthogonalArray, StrengthReport};
pub use search::{search_arrays, uniqueness_probe, SearchConfig, SearchOutcome, SearchStatus, Uniqueness};

/// Version string written into provenance footers.
pub const TOOL_VERSION: &str = concat!("mixoa ", env!("CARGO_PKG_VERSION"));
