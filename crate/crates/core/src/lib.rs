//! Exact computational tools for producing number fields with large class-group
//! m-rank by specializing torsion on curve Jacobians.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`], [`field`], [`poly`], [`qpoly`]: integer, finite-field and polynomial plumbing.
//! * [`quadfield`]: quadratic fields, ideal factorization, Selmer membership and Kummer degrees.
//! * [`classgroup`]: binary quadratic forms and full class-group structure.
//! * [`jacobian`]: hyperelliptic Jacobians over finite fields, torsion certificates, zeta data.
//! * [`families`]: the curve families with their certificates and specialization maps.
//! * [`specialize`]: the fiber pipeline producing certified and measured class-group ranks.

pub mod arith;
pub mod classgroup;
pub mod error;
pub mod families;
pub mod field;
pub mod jacobian;
pub mod poly;
pub mod qpoly;
pub mod quadfield;
pub mod specialize;

pub use arith::Budgets;
pub use error::{Error, Result};
