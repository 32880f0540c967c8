//! Finite-rank verification of identities, and the exploratory U-set falsifier.
//!
//! Every check evaluates both sides through separate code paths: partial sums on one
//! side, coefficient boxes or quasimeasure integrals on the other. Grid sweeps run
//! cells in parallel, each with its own ChaCha stream derived from the seed, so
//! reports do not depend on the thread count.

mod falsify;
mod functional;
mod kernels;
mod lemma1;
mod lemma2;
mod lemma4;
pub mod linalg;
mod relations;
mod tk;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use crate::rational::{format_rational, Rational};

pub use falsify::{uset_falsify, Constraints, FalsifierProblem, EXPLORATORY_NOTE, MAX_FALSIFIER_BITS};
pub use functional::{
    check_index_sequence, functional_trend, FunctionalMode, TrendReport, TrendRow,
};
pub use kernels::{kernel_equivalence, quasimeasure_suite, recursion_check, vanishing_check};
pub use lemma1::{lemma1_check, lemma1_grid, lemma1_sides, Lemma1Grid};
pub use lemma2::{lemma2_search, Lemma2Outcome};
pub use lemma4::{lemma4_check, lemma4_grid, lemma4_instance, Lemma4Instance};
pub use relations::{corollary_equivalence, plane_inclusions};
pub use tk::{tk_decomposition_check, tk_grid, tk_values, TkGrid, TkValues};

/// Mismatches kept per cell; the count is always exact.
pub const KEPT_MISMATCHES: usize = 16;

/// Two values that should have been equal.
#[derive(Clone, Debug, Serialize)]
pub struct Mismatch {
    pub detail: String,
    pub lhs: String,
    pub rhs: String,
}

/// One parameter combination of a grid.
#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub params: Value,
    pub checks: u64,
    pub mismatch_count: u64,
    pub mismatches: Vec<Mismatch>,
}

impl Cell {
    pub fn new(params: Value) -> Self {
        Cell {
            params,
            checks: 0,
            mismatch_count: 0,
            mismatches: Vec::new(),
        }
    }

    /// Records one comparison; `detail` is only built on a mismatch.
    pub fn compare(&mut self, lhs: &Rational, rhs: &Rational, detail: impl FnOnce() -> String) -> bool {
        self.checks += 1;
        if lhs == rhs {
            return true;
        }
        self.fail(detail(), format_rational(lhs), format_rational(rhs));
        false
    }

    /// Records a failed comparison of non-rational values.
    pub fn fail(&mut self, detail: String, lhs: String, rhs: String) {
        self.mismatch_count += 1;
        if self.mismatches.len() < KEPT_MISMATCHES {
            self.mismatches.push(Mismatch { detail, lhs, rhs });
        }
    }

    /// Records a passed check of non-rational values.
    pub fn pass(&mut self) {
        self.checks += 1;
    }
}

/// Verdicts of one identity over a parameter grid.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub parameters: Value,
    pub cells: Vec<Cell>,
    pub total_checks: u64,
    pub total_mismatches: u64,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl IdentityReport {
    pub fn new(identity: &str, parameters: Value, cells: Vec<Cell>) -> Self {
        let total_checks = cells.iter().map(|c| c.checks).sum();
        let total_mismatches = cells.iter().map(|c| c.mismatch_count).sum();
        IdentityReport {
            identity: identity.to_string(),
            parameters,
            cells,
            total_checks,
            total_mismatches,
            passed: total_mismatches == 0,
            notes: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// The first recorded mismatch, for one-line failure messages.
    pub fn first_mismatch(&self) -> Option<(&Value, &Mismatch)> {
        self.cells
            .iter()
            .find_map(|c| c.mismatches.first().map(|m| (&c.params, m)))
    }

    pub fn summary(&self) -> String {
        format!(
            "{}: {} checks, {} mismatches over {} cells",
            self.identity,
            self.total_checks,
            self.total_mismatches,
            self.cells.len()
        )
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One CSV row per cell: `cell,params,checks,mismatches`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cell,params,checks,mismatches\n");
        for (i, c) in self.cells.iter().enumerate() {
            let params = c.params.to_string().replace('"', "\"\"");
            out.push_str(&format!("{i},\"{params}\",{},{}\n", c.checks, c.mismatch_count));
        }
        out
    }
}

/// The random stream for grid cell `cell` under `seed`.
pub fn cell_rng(seed: u64, cell: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(cell);
    rng
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;
    use rand::Rng;

    #[test]
    fn mismatches_carry_both_values() {
        let mut c = Cell::new(Value::Null);
        assert!(c.compare(&int(1), &int(1), || unreachable!()));
        assert!(!c.compare(&int(1), &int(2), || "x".into()));
        let r = IdentityReport::new("demo", Value::Null, vec![c]);
        assert!(!r.passed);
        assert_eq!((r.total_checks, r.total_mismatches), (2, 1));
        let (_, m) = r.first_mismatch().unwrap();
        assert_eq!((m.lhs.as_str(), m.rhs.as_str()), ("1/1", "2/1"));
        assert!(r.to_csv().starts_with("cell,params,checks,mismatches\n0,"));
    }

    #[test]
    fn cell_streams_are_independent_and_reproducible() {
        let a: u64 = cell_rng(1, 0).gen();
        let b: u64 = cell_rng(1, 1).gen();
        assert_ne!(a, b);
        assert_eq!(a, cell_rng(1, 0).gen::<u64>());
    }
}
