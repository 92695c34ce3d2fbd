//! Exact intersection lattices, building sets and nested sets of braid and
//! r-braid arrangements.

pub mod arrangement;
pub mod building;
pub mod cyclotomic;
pub mod export;
pub mod expr;
pub mod finite_field;
pub mod graphs;
pub mod lattice;
pub mod linalg;
pub mod poset;
pub mod verify;
