pub mod artinalg;
pub mod basis;
pub mod cli;
pub mod intarith;
pub mod irreducible;
pub mod lattice;
pub mod poly;
pub mod polygon;
pub mod sftypes;
#[cfg(feature = "validation")]
pub mod validate;
pub mod ffactor;
pub mod sfom;
pub mod families;
