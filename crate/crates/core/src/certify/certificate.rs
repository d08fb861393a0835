use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::Extended;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Nonexistence,
    ExistenceSubcritical,
    Inconclusive,
}

/// One named hypothesis check as recorded in a certificate.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckRecord {
    pub pass: bool,
    pub samples_checked: usize,
    pub failures: usize,
    pub tolerance: f64,
    /// Up to a handful of offending points with the failing quantity.
    pub witnesses: Vec<CheckWitness>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckWitness {
    pub condition: String,
    pub point: Vec<f64>,
    pub value: f64,
}

pub(crate) const MAX_RECORDED_WITNESSES: usize = 8;

impl CheckRecord {
    pub fn passed(detail: impl Into<String>) -> Self {
        Self {
            pass: true,
            samples_checked: 0,
            failures: 0,
            tolerance: 0.0,
            witnesses: vec![],
            detail: detail.into(),
        }
    }

    pub fn failed(detail: impl Into<String>) -> Self {
        Self {
            pass: false,
            failures: 1,
            ..Self::passed(detail)
        }
    }
}

/// Exponent ranges a certificate distinguishes: nonexistence from
/// `nonexistence_from` on (inclusive), existence strictly between 2 and
/// `existence_below`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExponentRanges {
    pub nonexistence_from: Extended<f64>,
    pub existence_below: Extended<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Certificate {
    pub verdict: Verdict,
    /// Which result the verdict instantiates.
    pub theorem: String,
    /// Class of solutions the verdict speaks about.
    pub scope: String,
    pub exponent: f64,
    pub threshold_exponent: Extended<f64>,
    /// The threshold as an exact fraction.
    pub threshold_exact: String,
    pub ranges: ExponentRanges,
    pub checks: BTreeMap<String, CheckRecord>,
    pub failed_checks: Vec<String>,
    pub parameters: serde_json::Value,
}

/// The verdict as a pure function of the check outcomes and the exponent.
///
/// Any failed hypothesis check forces `INCONCLUSIVE`; otherwise the
/// exponent is placed in the nonexistence range, the existence range, or the
/// gap between them.
pub fn decide(checks: &BTreeMap<String, CheckRecord>, p: f64, ranges: &ExponentRanges) -> Verdict {
    if checks.values().any(|c| !c.pass) || !p.is_finite() {
        return Verdict::Inconclusive;
    }
    if let Extended::Finite(t) = ranges.nonexistence_from {
        if p >= t {
            return Verdict::Nonexistence;
        }
    }
    if p > 2.0 && ranges.existence_below.exceeds(&p) {
        return Verdict::ExistenceSubcritical;
    }
    Verdict::Inconclusive
}

impl Certificate {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        theorem: &str,
        scope: &str,
        p: f64,
        threshold: Extended<f64>,
        threshold_exact: String,
        ranges: ExponentRanges,
        checks: BTreeMap<String, CheckRecord>,
        parameters: serde_json::Value,
    ) -> Self {
        let verdict = decide(&checks, p, &ranges);
        let failed_checks = checks.iter().filter(|(_, c)| !c.pass).map(|(k, _)| k.clone()).collect();
        Self {
            verdict,
            theorem: theorem.into(),
            scope: scope.into(),
            exponent: p,
            threshold_exponent: threshold,
            threshold_exact,
            ranges,
            checks,
            failed_checks,
            parameters,
        }
    }

    /// Recomputes the verdict from the recorded checks.
    pub fn recomputed_verdict(&self) -> Verdict {
        decide(&self.checks, self.exponent, &self.ranges)
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_stable_string(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ranges(t: f64) -> ExponentRanges {
        ExponentRanges {
            nonexistence_from: Extended::Finite(t),
            existence_below: Extended::Finite(t),
        }
    }

    fn all_pass() -> BTreeMap<String, CheckRecord> {
        ["a", "b", "c"]
            .iter()
            .map(|k| (k.to_string(), CheckRecord::passed("")))
            .collect()
    }

    #[test]
    fn verdict_table() {
        let c = all_pass();
        assert_eq!(decide(&c, 6.0, &ranges(6.0)), Verdict::Nonexistence);
        assert_eq!(decide(&c, 7.0, &ranges(6.0)), Verdict::Nonexistence);
        assert_eq!(decide(&c, 4.0, &ranges(6.0)), Verdict::ExistenceSubcritical);
        assert_eq!(decide(&c, 2.0, &ranges(6.0)), Verdict::Inconclusive);
        let gap = ExponentRanges {
            nonexistence_from: Extended::Finite(8.0),
            existence_below: Extended::Finite(6.0),
        };
        assert_eq!(decide(&c, 7.0, &gap), Verdict::Inconclusive);
        let open = ExponentRanges {
            nonexistence_from: Extended::PosInfinity,
            existence_below: Extended::PosInfinity,
        };
        assert_eq!(decide(&c, 1e6, &open), Verdict::ExistenceSubcritical);
    }

    #[test]
    fn any_failed_check_blocks_nonexistence() {
        for key in ["a", "b", "c"] {
            let mut c = all_pass();
            c.insert(key.into(), CheckRecord::failed("injected"));
            for p in [3.0, 6.0, 9.0] {
                assert_eq!(decide(&c, p, &ranges(6.0)), Verdict::Inconclusive);
            }
        }
    }
}
