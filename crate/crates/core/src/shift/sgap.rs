//! S-gap shifts over {0,1}: the runs of 0s between successive 1s must lie in
//! the gap set. Truncated boundary runs are admissible when they extend to an
//! allowed gap; this is the standard convention (the defining papers leave
//! boundary semantics implicit).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// The set of allowed gap lengths: an explicit finite set, or the complement
/// of a finite excluded set (covering infinite and cofinite gap sets).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GapSet {
    Finite { values: BTreeSet<u32> },
    Cofinite { excluded: BTreeSet<u32> },
}

impl GapSet {
    pub fn validate(&self) -> Result<()> {
        match self {
            GapSet::Finite { values } if values.is_empty() => {
                Err(Error::InvalidSpec("finite gap set must be nonempty".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn member(&self, gap: u32) -> bool {
        match self {
            GapSet::Finite { values } => values.contains(&gap),
            GapSet::Cofinite { excluded } => !excluded.contains(&gap),
        }
    }

    /// Is a truncated boundary run of this length admissible, i.e. is it a
    /// prefix/suffix of some allowed gap?
    pub fn boundary_ok(&self, run: u32) -> bool {
        match self {
            GapSet::Finite { values } => values.last().is_some_and(|&mx| run <= mx),
            GapSet::Cofinite { .. } => true,
        }
    }

    /// True when arbitrarily large gaps are allowed (so the all-zero point
    /// belongs to the shift).
    pub fn unbounded(&self) -> bool {
        matches!(self, GapSet::Cofinite { .. })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::shift::{make_shift, ShiftSpec};

    fn sgap12() -> crate::shift::Shift {
        make_shift(ShiftSpec::SGap {
            gaps: GapSet::Finite { values: BTreeSet::from([1, 2]) },
        })
        .unwrap()
    }

    #[test]
    fn interior_gaps_must_be_members() {
        let s = sgap12();
        let a = Alphabet::binary();
        assert!(s.is_in(&a.word_from_str("10101").unwrap()));
        assert!(s.is_in(&a.word_from_str("10010").unwrap()));
        // adjacent ones: gap 0 not in {1,2}
        assert!(!s.is_in(&a.word_from_str("110").unwrap()));
        // gap 3
        assert!(!s.is_in(&a.word_from_str("10001").unwrap()));
    }

    #[test]
    fn boundary_runs_are_relaxed() {
        let s = sgap12();
        let a = Alphabet::binary();
        assert!(s.is_in(&a.word_from_str("00").unwrap()));
        assert!(!s.is_in(&a.word_from_str("000").unwrap()));
        assert!(s.is_in(&a.word_from_str("001").unwrap()));
        assert!(s.is_in(&a.word_from_str("100").unwrap()));
        assert!(!s.is_in(&a.word_from_str("1000").unwrap()));
    }

    #[test]
    fn cofinite_gap_sets_allow_long_runs() {
        let s = make_shift(ShiftSpec::SGap {
            gaps: GapSet::Cofinite {
                excluded: BTreeSet::from([0, 2]),
            },
        })
        .unwrap();
        let a = Alphabet::binary();
        assert!(s.is_in(&a.word_from_str("0000000").unwrap()));
        assert!(s.is_in(&a.word_from_str("101").unwrap())); // gap 1
        assert!(!s.is_in(&a.word_from_str("1001").unwrap())); // gap 2 excluded
        assert!(!s.is_in(&a.word_from_str("11").unwrap())); // gap 0 excluded
        assert!(s.is_in(&a.word_from_str("10001").unwrap())); // gap 3
    }

    #[test]
    fn empty_finite_gap_set_rejected() {
        assert!(make_shift(ShiftSpec::SGap {
            gaps: GapSet::Finite { values: BTreeSet::new() },
        })
        .is_err());
    }

    #[test]
    fn gap_zero_only_means_all_ones() {
        let s = make_shift(ShiftSpec::SGap {
            gaps: GapSet::Finite { values: BTreeSet::from([0]) },
        })
        .unwrap();
        let a = Alphabet::binary();
        assert!(s.is_in(&a.word_from_str("111").unwrap()));
        assert!(!s.is_in(&a.word_from_str("110").unwrap()));
        assert!(!s.is_in(&a.word_from_str("0").unwrap()));
    }
}
