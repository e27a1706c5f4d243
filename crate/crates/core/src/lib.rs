//! Numerical toolkit for contraction fixed-point analysis on truncated
//! boson operator algebras equipped with graded seminorm families.
//!
//! Everything lives on a finite `D`-dimensional number basis: operators are
//! dense complex matrices ([`fock::TruncOp`]), the topology is a finite
//! panel of weighted seminorms ([`seminorm::Panel`]), and the central engine
//! iterates contraction maps with certified geometric rates
//! ([`contraction`]). On top of that sit cutoff-indexed families
//! ([`family`]), an operator-valued Picard solver ([`picard`]), Heisenberg
//! dynamics with cutoff removal on the free-boson model ([`dynamics`]), and
//! explicit admissible start elements ([`blcert`]).
//!
//! The crate is `no_std` + `alloc`; all IO lives in the companion CLI crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod blcert;
pub mod contraction;
pub mod dynamics;
pub mod family;
pub mod fock;
pub mod picard;
pub mod seminorm;

pub use fock::TruncOp;
pub use seminorm::{Panel, SeminormIndex, Weight};
