use serde::Serialize;

use crate::error::{Error, Result};

/// Caps on exhaustive enumerations. Exceeding one is an error, never a
/// silent truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Candidate subsets visited by the brute-force `H_m^n` search.
    pub subsets: u128,
    /// Down-sets visited while enumerating monotone families.
    pub monotone: u128,
    /// Set partitions visited by the exhaustive quantizer search.
    pub partitions: u128,
    /// Joint channel states `t^n` enumerated for a BMS mixture.
    pub channel_states: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            subsets: 2_000_000,
            monotone: 2_000_000,
            partitions: 10_000_000,
            channel_states: 256,
        }
    }
}

impl Budget {
    /// Same cap for every enumeration.
    pub fn uniform(limit: u128) -> Self {
        Self {
            subsets: limit,
            monotone: limit,
            partitions: limit,
            channel_states: limit,
        }
    }

    pub(crate) fn ensure(what: &'static str, required: u128, limit: u128) -> Result<()> {
        if required > limit {
            Err(Error::Budget {
                what,
                required,
                limit,
            })
        } else {
            Ok(())
        }
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(u128::from(n - i)) {
            Some(v) => v / u128::from(i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(16, 8), 12870);
        assert_eq!(binomial(8, 3), 56);
        assert_eq!(binomial(5, 7), 0);
        assert_eq!(binomial(64, 0), 1);
        assert_eq!(binomial(63, 3), 39711);
    }

    #[test]
    fn ensure_reports_numbers() {
        assert!(Budget::ensure("x", 5, 5).is_ok());
        assert_eq!(
            Budget::ensure("x", 6, 5),
            Err(Error::Budget { what: "x", required: 6, limit: 5 })
        );
    }
}
