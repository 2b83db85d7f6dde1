//! Exact symmetric chain complexes over rings with involution and the twisted
//! Blanchfield pairings of symmetric triads.

pub mod blanchfield;
pub mod builders;
pub mod chain_complex;
pub mod error;
pub mod group_ring;
pub mod homology_engine;
pub mod io;
pub mod matrix;
pub mod ring_core;
pub mod symmetric_structure;

pub use blanchfield::{Blanchfield, PairingMatrix, Side};
pub use chain_complex::{ChainHomotopy, ChainMap, Complex};
pub use error::{Error, Result};
pub use group_ring::{GroupRelations, GroupRingElement, GroupWord, Representation};
pub use matrix::Matrix;
pub use ring_core::{Fraction, Rat, Ring, RingElement, RingOps, TorsionValue};
pub use symmetric_structure::{SymmetricComplex, SymmetricPair, SymmetricTriad};
