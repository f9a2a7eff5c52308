//! Finite-dimensional representations of the Drinfeld-Jimbo algebras
//! `U_q(g)` over exact rationals, Clebsch-Gordan data and twist blocks for
//! `U_q(su(2))`, and a constructive lift of `U_q`-module-algebra
//! `*`-actions on finite-dimensional C*-algebras to `*`-representations.

pub mod cartan;
pub mod cgtwist;
pub mod error;
pub mod liftalg;
pub mod linalg;
pub mod qnum;
pub mod repcore;

pub use error::{Error, LiftStage, Result};
