//! Exact Walsh analysis on the dyadic group `G` and its powers `G^d`.
//!
//! The crate covers group arithmetic and dyadic cubes ([`dyadic`]), Walsh and
//! Dirichlet kernels ([`walsh`]), multiple Walsh series ([`series`]) and the
//! quasimeasures they generate ([`quasimeasure`]), structured subsets of `G^d` such
//! as Dirichlet sets and dyadic planes ([`sets`]), an explicit double series with
//! growing coefficients ([`counterexample`]) and finite-rank checks of the
//! identities these objects satisfy ([`harness`]).
//!
//! All arithmetic is exact: kernel values are big integers and partial sums are
//! big rationals.

pub mod cli;
pub mod counterexample;
pub mod dyadic;
pub mod error;
pub mod harness;
pub mod partition;
pub mod quasimeasure;
pub mod rational;
pub mod series;
pub mod sets;
pub mod walsh;

pub use counterexample::{GrowthSchedule, IndexSequence};
pub use dyadic::{contract_eq, DyadicCube, DyadicElement, DyadicPoint, SignVector, Tail};
pub use error::{Error, Result};
pub use partition::Partition;
pub use quasimeasure::{Parallelepiped, Quasimeasure, SupportMask};
pub use rational::Rational;
pub use series::SeriesSpec;
pub use sets::{Membership, SetSpec};
pub use walsh::{MultiIndex, Sign, WalshIndex};
