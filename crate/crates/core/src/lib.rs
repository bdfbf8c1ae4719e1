pub mod bitset;
pub mod bounds;
pub mod catalog;
pub mod endo;
pub mod enumerate;
pub mod error;
pub mod group;
pub mod orbit;
pub mod poset;
pub mod prune;
pub(crate) mod search;
pub mod structure;

pub use bitset::BitSet;
pub use error::{Error, Result};
pub use poset::{ElementSubset, Poset, RankDecomposition};
pub use structure::DictatedOrbitStructure;
