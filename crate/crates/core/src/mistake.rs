//! Mistake functions: nondecreasing budgets `n -> g(n)` for the
//! specification-type properties, and the density bound of bounded-density
//! shifts.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The rule backing a mistake function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MistakeRule {
    /// `g(n) = m` for all n.
    Constant { m: u32 },
    /// Explicit table for `n = 1..=values.len()`; the final value extends to
    /// all larger n.
    Table { values: Vec<u32> },
    /// `g(n) = ceil(sqrt(n))`.
    CeilSqrt,
    /// `g(n) = 1 + 2*floor(log2 log2 n)` for `n >= 4`, and `1` below.
    OnePlusTwoLogLog,
    /// `g(n) = c * floor(log2 n)`.
    CLog { c: u32 },
}

/// A nondecreasing mistake function with declared sublinearity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MistakeFunction {
    rule: MistakeRule,
}

impl MistakeFunction {
    pub fn new(rule: MistakeRule) -> Result<MistakeFunction> {
        if let MistakeRule::Table { values } = &rule {
            if values.is_empty() {
                return Err(Error::InvalidSpec("mistake table must be nonempty".into()));
            }
            if values.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::InvalidSpec(
                    "mistake table must be nondecreasing".into(),
                ));
            }
        }
        Ok(MistakeFunction { rule })
    }

    pub fn constant(m: u32) -> MistakeFunction {
        MistakeFunction {
            rule: MistakeRule::Constant { m },
        }
    }

    pub fn ceil_sqrt() -> MistakeFunction {
        MistakeFunction {
            rule: MistakeRule::CeilSqrt,
        }
    }

    pub fn one_plus_two_loglog() -> MistakeFunction {
        MistakeFunction {
            rule: MistakeRule::OnePlusTwoLogLog,
        }
    }

    pub fn rule(&self) -> &MistakeRule {
        &self.rule
    }

    /// Evaluate `g(n)`. `g(0) = 0` by convention (the empty word needs no
    /// changes).
    pub fn eval(&self, n: usize) -> usize {
        if n == 0 {
            return 0;
        }
        match &self.rule {
            MistakeRule::Constant { m } => *m as usize,
            MistakeRule::Table { values } => {
                let i = n.min(values.len());
                values[i - 1] as usize
            }
            MistakeRule::CeilSqrt => ceil_sqrt(n),
            MistakeRule::OnePlusTwoLogLog => {
                if n < 4 {
                    1
                } else {
                    1 + 2 * floor_log2(floor_log2(n))
                }
            }
            MistakeRule::CLog { c } => (*c as usize) * floor_log2(n),
        }
    }

    /// Spot-check the declared sublinearity `g(n)/n -> 0` at `n_max`.
    pub fn sublinear_at(&self, n_max: usize) -> bool {
        n_max == 0 || (self.eval(n_max) as f64) / (n_max as f64) <= 0.5
    }

    /// Compact text form used in reports and fingerprints.
    pub fn describe(&self) -> String {
        match &self.rule {
            MistakeRule::Constant { m } => format!("const:{m}"),
            MistakeRule::Table { values } => format!(
                "table:{}",
                values
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ),
            MistakeRule::CeilSqrt => "ceil-sqrt".into(),
            MistakeRule::OnePlusTwoLogLog => "one-plus-two-loglog".into(),
            MistakeRule::CLog { c } => format!("{c}log2"),
        }
    }

    /// Parse the CLI form: `const:M`, `table:a,b,c`, `ceil-sqrt`,
    /// `one-plus-two-loglog`, or `Clog2`.
    pub fn parse(s: &str) -> Result<MistakeFunction> {
        if let Some(rest) = s.strip_prefix("const:") {
            let m = rest
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("bad constant in {s:?}: {e}")))?;
            return Ok(MistakeFunction::constant(m));
        }
        if let Some(rest) = s.strip_prefix("table:") {
            let values = rest
                .split(',')
                .map(|t| t.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("bad table in {s:?}: {e}")))?;
            return MistakeFunction::new(MistakeRule::Table { values });
        }
        match s {
            "ceil-sqrt" => Ok(MistakeFunction::ceil_sqrt()),
            "one-plus-two-loglog" => Ok(MistakeFunction::one_plus_two_loglog()),
            _ => {
                if let Some(rest) = s.strip_suffix("log2") {
                    let c = rest
                        .parse::<u32>()
                        .map_err(|e| Error::Parse(format!("bad coefficient in {s:?}: {e}")))?;
                    return MistakeFunction::new(MistakeRule::CLog { c });
                }
                Err(Error::Parse(format!("unknown mistake function {s:?}")))
            }
        }
    }
}

fn ceil_sqrt(n: usize) -> usize {
    let r = (n as f64).sqrt() as usize;
    // correct float drift in both directions
    let mut r = r;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

fn floor_log2(n: usize) -> usize {
    debug_assert!(n >= 1);
    (usize::BITS - 1 - n.leading_zeros()) as usize
}
