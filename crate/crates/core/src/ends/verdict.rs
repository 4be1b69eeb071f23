//! Tri-state verdicts for finite approximations of limit conditions.
//!
//! Every relation in this library quantifies over infinite tails; a finite
//! prefix can only certify so much. A `ScaleVerdict` is therefore either
//! EQUIVALENT at a scale, DISTINGUISHED with an independently checkable
//! witness, or INCONCLUSIVE with the consumed budget. INCONCLUSIVE is a
//! first-class outcome, not a failure.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status")]
pub enum ScaleVerdict {
    Equivalent {
        /// Scale at which equivalence is certified (bound M, cleared
        /// threshold, or deepest agreeing radius, per relation kind).
        scale: f64,
        evidence: String,
    },
    Distinguished {
        #[serde(skip_serializing_if = "Option::is_none")]
        witness_index: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness_radius: Option<f64>,
        /// The violating quantity at the witness.
        quantity: f64,
        evidence: String,
    },
    Inconclusive {
        budget_consumed: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    Equivalent,
    Distinguished,
    Inconclusive,
}

impl ScaleVerdict {
    pub fn status(&self) -> VerdictStatus {
        match self {
            ScaleVerdict::Equivalent { .. } => VerdictStatus::Equivalent,
            ScaleVerdict::Distinguished { .. } => VerdictStatus::Distinguished,
            ScaleVerdict::Inconclusive { .. } => VerdictStatus::Inconclusive,
        }
    }

    pub fn is_equivalent(&self) -> bool {
        self.status() == VerdictStatus::Equivalent
    }

    pub fn is_distinguished(&self) -> bool {
        self.status() == VerdictStatus::Distinguished
    }

    pub fn equivalent(scale: f64, evidence: impl Into<String>) -> ScaleVerdict {
        ScaleVerdict::Equivalent {
            scale,
            evidence: evidence.into(),
        }
    }

    pub fn distinguished_at_index(
        index: usize,
        quantity: f64,
        evidence: impl Into<String>,
    ) -> ScaleVerdict {
        ScaleVerdict::Distinguished {
            witness_index: Some(index),
            witness_radius: None,
            quantity,
            evidence: evidence.into(),
        }
    }

    pub fn distinguished_at_radius(
        radius: f64,
        quantity: f64,
        evidence: impl Into<String>,
    ) -> ScaleVerdict {
        ScaleVerdict::Distinguished {
            witness_index: None,
            witness_radius: Some(radius),
            quantity,
            evidence: evidence.into(),
        }
    }

    pub fn inconclusive(budget: impl Into<String>) -> ScaleVerdict {
        ScaleVerdict::Inconclusive {
            budget_consumed: budget.into(),
        }
    }

    /// Conjunction over sub-checks: DISTINGUISHED dominates, then
    /// INCONCLUSIVE, then EQUIVALENT. The EQUIVALENT scale is the max of
    /// the member scales; vacuous conjunctions are EQUIVALENT.
    pub fn conjoin(verdicts: impl IntoIterator<Item = ScaleVerdict>) -> ScaleVerdict {
        let mut inconclusive: Option<ScaleVerdict> = None;
        let mut scale = 0.0f64;
        let mut count = 0usize;
        for v in verdicts {
            match &v {
                ScaleVerdict::Distinguished { .. } => return v,
                ScaleVerdict::Inconclusive { .. } => {
                    if inconclusive.is_none() {
                        inconclusive = Some(v);
                    }
                }
                ScaleVerdict::Equivalent { scale: s, .. } => {
                    scale = scale.max(*s);
                    count += 1;
                }
            }
        }
        if let Some(v) = inconclusive {
            return v;
        }
        ScaleVerdict::equivalent(scale, format!("conjunction of {count} checks"))
    }
}

/// Finite-approximation budget: a cap on the scale of certified bounds and
/// a decreasing tolerance schedule for limit conditions.
#[derive(Debug, Clone, Serialize)]
pub struct Budget {
    pub max_scale: f64,
    /// Strictly positive, non-increasing tolerances, e.g. 1, 1/2, 1/4, ...
    pub tolerances: Vec<f64>,
}

impl Budget {
    pub fn new(max_scale: f64, tolerances: Vec<f64>) -> crate::error::Result<Budget> {
        if tolerances.is_empty() {
            return Err(crate::error::Error::EmptySchedule);
        }
        Ok(Budget {
            max_scale,
            tolerances,
        })
    }

    /// Default for a prefix of the given length: cap at half the prefix,
    /// geometric tolerances 1, 1/2, ..., 1/16. The second half of the
    /// prefix is left as the tail tranche for stability checks.
    pub fn for_prefix(len: usize) -> Budget {
        Budget {
            max_scale: (len as f64 / 2.0).max(1.0),
            tolerances: vec![1.0, 0.5, 0.25, 0.125, 0.0625],
        }
    }

    /// Divergence thresholds paired with the tolerance schedule (1/ε).
    pub fn thresholds(&self) -> Vec<f64> {
        self.tolerances.iter().map(|e| 1.0 / e).collect()
    }

    /// Radii 1, 2, 4, ... up to max_scale, for component comparisons.
    pub fn radii(&self) -> Vec<u64> {
        let mut out = Vec::new();
        let mut r = 1u64;
        while (r as f64) <= self.max_scale {
            out.push(r);
            r *= 2;
        }
        if out.is_empty() {
            out.push(1);
        }
        out
    }

    pub fn describe(&self) -> String {
        format!(
            "max_scale={}, tolerances={:?}",
            self.max_scale, self.tolerances
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conjunction_priorities() {
        let d = ScaleVerdict::distinguished_at_index(3, 9.0, "w");
        let e = ScaleVerdict::equivalent(2.0, "ok");
        let i = ScaleVerdict::inconclusive("short");
        assert!(ScaleVerdict::conjoin([e.clone(), d.clone()]).is_distinguished());
        assert!(matches!(
            ScaleVerdict::conjoin([e.clone(), i.clone()]),
            ScaleVerdict::Inconclusive { .. }
        ));
        assert!(ScaleVerdict::conjoin([e.clone()]).is_equivalent());
        assert!(ScaleVerdict::conjoin([]).is_equivalent());
        assert!(ScaleVerdict::conjoin([i, d]).is_distinguished());
    }

    #[test]
    fn budget_schedules() {
        let b = Budget::for_prefix(100);
        assert_eq!(b.max_scale, 50.0);
        assert_eq!(b.radii(), vec![1, 2, 4, 8, 16, 32]);
        assert_eq!(b.thresholds()[0], 1.0);
        assert!(Budget::new(10.0, vec![]).is_err());
    }
}
