//! Exact lattice computations for attractor points of K3 x T2: the attractor
//! solution of a charge, the lattice mirror map, central charges on the mirror
//! and checkable certificates for their reality, P0 membership and walls.

pub mod attractor;
pub mod exact;
pub mod forms;
pub mod lattice;
pub mod mirror;
pub mod scenario;
pub mod stability;
