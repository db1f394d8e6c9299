//! Exact verification engine for a characteristic-5 counterexample to
//! Kawamata-Viehweg vanishing on a klt del Pezzo surface of Picard rank one.
//!
//! The pipeline has two independent halves that must agree:
//!
//! * a *lattice* half ([`lattice`], [`contraction`], [`riemann_roch`]) that
//!   rebuilds the surface as an iterated blow-up of the plane, contracts
//!   eleven curves to reach the rank-one model, and certifies `h^1 != 0` for
//!   an ample line bundle through exact rational arithmetic; and
//! * a *finite-field* half ([`pencil`]) that reconstructs the plane cubic
//!   pencil the construction starts from and locates its cuspidal member by
//!   brute-force point enumeration.
//!
//! Everything is exact: rationals are arbitrary-precision ([`qla`]), finite
//! fields are explicit modulus arithmetic, and reports serialize to canonical
//! JSON so byte-identical reruns are a regression test.

pub mod contraction;
pub mod lattice;
pub mod pencil;
pub mod commands;
pub mod qla;
pub mod report;
pub mod scenario;
pub mod riemann_roch;

#[cfg(test)]
pub(crate) mod test_fixtures;

pub use qla::Rational;
