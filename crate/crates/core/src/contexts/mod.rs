//! Abelian contexts and the poset they form under inclusion.

mod context;
mod poset;
mod set;

pub use context::{context_from_atoms, Context, MAX_ATOMS};
pub use poset::{generate_poset, set_partitions, ContextId, ContextPoset, SeedBasis, UnitaryImage};
pub use set::ContextSet;
