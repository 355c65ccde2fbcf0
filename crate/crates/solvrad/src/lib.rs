//! Monodromy of algebraic functions, decided and made constructive.
//!
//! Given a polynomial equation `P_n(x) y^n + ... + P_0(x) = 0` with exact
//! polynomial coefficients in parameters `x`, this crate
//!
//! * finds the branch locus and computes the monodromy group from tracked
//!   petal loops around its points,
//! * decides solvability by radicals from the derived series of that group,
//! * when solvable, builds an explicit nested-radical expression for a root
//!   and verifies it numerically against tracked values, and
//! * when unsolvable, emits a certificate: the derived series stabilizing at
//!   a nontrivial perfect group.
//!
//! Start with the `examples/` directory (one runnable example per
//! capability) or the `solvrad` binary (`analyze`, `local`, `verify`
//! subcommands). The top-level entry points are [`report::analyze`],
//! [`report::local`] and [`report::verify`].

pub mod config;
pub mod error;
pub mod exact;
pub mod groups;
pub mod monodromy;
pub mod num;
pub mod polyalg;
pub mod radicals;
pub mod report;
pub mod rng;
pub mod roots;

pub use config::{Precision, Settings};
pub use error::{Error, Result};
