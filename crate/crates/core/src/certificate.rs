//! The embedding decision and its replayable certificate.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blowup::{epsilon_supremum, forward_periods, period_forward, EpsilonValue, PeriodVector3};
use crate::cone::{ball_form_conditions, BallCondition};
use crate::error::{Error, Result};
use crate::rational::{serde_rational, serde_rational_vec};

pub const ENGINE: &str = concat!("rp2-core/", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    #[serde(with = "serde_rational")]
    pub epsilon: BigRational,
    #[serde(with = "serde_rational_vec")]
    pub mu_tilde: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub verdict: Verdict,
    #[serde(with = "serde_rational_vec")]
    pub mu: Vec<BigRational>,
    #[serde(with = "serde_rational")]
    pub epsilon_sup: BigRational,
    pub attained: bool,
    pub witness: Option<Witness>,
    pub violation: Option<String>,
    pub engine: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("certificate carries {0} sizes, expected 3")]
    Arity(usize),
    #[error("YES certificate without a witness")]
    MissingWitness,
    #[error("witness ε = {0} is not in (0, ε_sup)")]
    WitnessOutOfRange(String),
    #[error("witness periods differ from the recomputed ones")]
    WitnessMismatch,
    #[error("witness periods are invalid: {0}")]
    InvalidWitness(String),
    #[error("NO certificate without a recognizable violation")]
    MissingViolation,
    #[error("named inequality `{0}` actually holds")]
    ViolationHolds(String),
    #[error("inconsistent fields: {0}")]
    Inconsistent(String),
}

/// Decides whether `B_3(μ_1, μ_2, μ_3)` contains a Lagrangian RP².
///
/// Errors when the ball itself is not well defined (volume or
/// effectivity fails). Otherwise the answer is YES exactly when all three
/// strict triangle inequalities hold, cross-checked against `ε_sup > 0`.
pub fn admits_lagrangian_rp2(mu: &[BigRational; 3]) -> Result<Certificate> {
    let check = ball_form_conditions(mu);
    if let Some(bad) = check.domain_failures().next() {
        return Err(Error::Domain(bad.to_string()));
    }
    let p = PeriodVector3::new(mu.clone())?;
    let sup = epsilon_supremum(&p)?;
    let triangle_failure = check.failures.first().cloned();

    match (triangle_failure, sup.is_empty()) {
        (None, false) => {
            let half = &sup.value / BigRational::from_integer(BigInt::from(2));
            let q = period_forward(&p, &EpsilonValue::new(half.clone())?);
            if !q.is_valid() {
                return Err(Error::Domain(format!(
                    "internal: midpoint witness invalid ({})",
                    q.failures[0]
                )));
            }
            Ok(Certificate {
                verdict: Verdict::Yes,
                mu: mu.to_vec(),
                epsilon_sup: sup.value,
                attained: sup.attained,
                witness: Some(Witness {
                    epsilon: half,
                    mu_tilde: q.mu_tilde.to_vec(),
                }),
                violation: None,
                engine: ENGINE.to_string(),
            })
        }
        (Some(cond), true) => Ok(Certificate {
            verdict: Verdict::No,
            mu: mu.to_vec(),
            epsilon_sup: sup.value,
            attained: false,
            witness: None,
            violation: Some(cond.to_string()),
            engine: ENGINE.to_string(),
        }),
        (cond, empty) => Err(Error::Domain(format!(
            "internal: triangle check ({cond:?}) disagrees with ε_sup emptiness ({empty})"
        ))),
    }
}

impl Certificate {
    fn mu_array(&self) -> std::result::Result<[BigRational; 3], ReplayError> {
        <[BigRational; 3]>::try_from(self.mu.clone()).map_err(|v| ReplayError::Arity(v.len()))
    }

    /// Re-checks the certificate from its own fields.
    pub fn replay(&self) -> std::result::Result<(), ReplayError> {
        let mu = self.mu_array()?;
        if self.attained {
            return Err(ReplayError::Inconsistent("the supremum is never attained".into()));
        }
        match self.verdict {
            Verdict::Yes => {
                let w = self.witness.as_ref().ok_or(ReplayError::MissingWitness)?;
                if self.violation.is_some() {
                    return Err(ReplayError::Inconsistent("YES with a violation".into()));
                }
                let zero = BigRational::from_integer(BigInt::from(0));
                if w.epsilon <= zero || w.epsilon >= self.epsilon_sup {
                    return Err(ReplayError::WitnessOutOfRange(w.epsilon.to_string()));
                }
                let q = forward_periods(&mu, &w.epsilon);
                if q.mu_tilde[..] != w.mu_tilde[..] {
                    return Err(ReplayError::WitnessMismatch);
                }
                if let Some(f) = q.failures.first() {
                    return Err(ReplayError::InvalidWitness(f.to_string()));
                }
                Ok(())
            }
            Verdict::No => {
                if self.witness.is_some() {
                    return Err(ReplayError::Inconsistent("NO with a witness".into()));
                }
                let text = self.violation.as_deref().ok_or(ReplayError::MissingViolation)?;
                let cond = BallCondition::parse_triangle_violation(text)
                    .ok_or(ReplayError::MissingViolation)?;
                if cond.holds(&mu) {
                    return Err(ReplayError::ViolationHolds(text.to_string()));
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn mu(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> [BigRational; 3] {
        [ratio(a.0, a.1), ratio(b.0, b.1), ratio(c.0, c.1)]
    }

    #[test]
    fn yes_instance() {
        let c = admits_lagrangian_rp2(&mu((3, 10), (3, 10), (3, 10))).unwrap();
        assert_eq!(c.verdict, Verdict::Yes);
        assert_eq!(c.epsilon_sup, ratio(3, 20));
        assert_eq!(c.witness.as_ref().unwrap().epsilon, ratio(3, 40));
        c.replay().unwrap();
    }

    #[test]
    fn no_instances() {
        let c = admits_lagrangian_rp2(&mu((1, 5), (1, 5), (1, 2))).unwrap();
        assert_eq!(c.verdict, Verdict::No);
        assert_eq!(c.violation.as_deref(), Some("μ₁ + μ₂ < μ₃ fails"));
        c.replay().unwrap();
        let eq = admits_lagrangian_rp2(&mu((1, 5), (3, 10), (1, 2))).unwrap();
        assert_eq!(eq.verdict, Verdict::No);
        eq.replay().unwrap();
    }

    #[test]
    fn domain_errors() {
        let e = admits_lagrangian_rp2(&mu((3, 5), (3, 5), (1, 10))).unwrap_err();
        assert_eq!(e, Error::Domain("effectivity: μ₁ + μ₂ < 1 fails".into()));
        assert!(admits_lagrangian_rp2(&mu((-1, 5), (1, 5), (1, 5))).is_err());
    }

    #[test]
    fn tampered_certificates_fail_replay() {
        let good = admits_lagrangian_rp2(&mu((3, 10), (3, 10), (3, 10))).unwrap();
        let mut bad = good.clone();
        bad.witness.as_mut().unwrap().epsilon = ratio(3, 20);
        assert!(bad.replay().is_err());
        let mut bad = good.clone();
        bad.witness.as_mut().unwrap().mu_tilde[1] = ratio(1, 7);
        assert_eq!(bad.replay(), Err(ReplayError::WitnessMismatch));

        let mut no = admits_lagrangian_rp2(&mu((1, 5), (1, 5), (1, 2))).unwrap();
        no.violation = Some("μ₁ + μ₃ < μ₂ fails".into());
        assert!(matches!(no.replay(), Err(ReplayError::ViolationHolds(_))));
    }

    #[test]
    fn json_round_trip() {
        let c = admits_lagrangian_rp2(&mu((3, 10), (3, 10), (3, 10))).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains(r#""epsilon_sup":"3/20""#));
        assert!(s.contains(r#""verdict":"YES""#));
        let back: Certificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        back.replay().unwrap();
    }
}
