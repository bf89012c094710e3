//! Exact left/right sides and verdicts for one inequality instance.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Which way an inequality points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `lhs <= rhs`
    AtMost,
    /// `lhs >= rhs`
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InequalityReport {
    pub name: String,
    pub lhs: BigRational,
    pub rhs: BigRational,
    pub direction: Direction,
    pub holds: bool,
    /// Nonnegative exactly when the inequality holds.
    pub slack: BigRational,
    pub instance_digest: String,
}

impl InequalityReport {
    pub fn new(
        name: impl Into<String>,
        lhs: BigRational,
        rhs: BigRational,
        direction: Direction,
        instance_digest: impl Into<String>,
    ) -> Self {
        let slack = match direction {
            Direction::AtMost => &rhs - &lhs,
            Direction::AtLeast => &lhs - &rhs,
        };
        InequalityReport {
            name: name.into(),
            holds: !slack.is_negative(),
            lhs,
            rhs,
            direction,
            slack,
            instance_digest: instance_digest.into(),
        }
    }

    /// `lhs <= rhs` over integers.
    pub fn at_most(name: &str, lhs: impl Into<BigInt>, rhs: impl Into<BigInt>, digest: &str) -> Self {
        Self::new(name, int(lhs), int(rhs), Direction::AtMost, digest)
    }

    /// `lhs >= rhs` over integers.
    pub fn at_least(name: &str, lhs: impl Into<BigInt>, rhs: impl Into<BigInt>, digest: &str) -> Self {
        Self::new(name, int(lhs), int(rhs), Direction::AtLeast, digest)
    }

    pub fn is_equality(&self) -> bool {
        self.slack.is_zero()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "lhs": rational_json(&self.lhs),
            "rhs": rational_json(&self.rhs),
            "holds": self.holds,
            "slack": rational_json(&self.slack),
            "instance_digest": self.instance_digest,
        })
    }

    pub const CSV_HEADER: &'static str = "name,lhs_num,lhs_den,rhs_num,rhs_den,holds,slack_num,slack_den";

    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.name,
            self.lhs.numer(),
            self.lhs.denom(),
            self.rhs.numer(),
            self.rhs.denom(),
            self.holds,
            self.slack.numer(),
            self.slack.denom()
        )
    }
}

pub fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `[num, den]` as decimal strings.
pub fn rational_json(r: &BigRational) -> Value {
    json!([r.numer().to_string(), r.denom().to_string()])
}

/// Stable short digest of a JSON value (SHA-256 of its compact serialization).
pub fn digest(value: &Value) -> String {
    let bytes = serde_json::to_vec(value).expect("json values serialize");
    hex::encode(&Sha256::digest(&bytes)[..8])
}
