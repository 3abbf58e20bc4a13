//! Cross-method agreement reports and lossless JSON encoding of exact
//! numbers.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::poly::{rational_to_string, Rational};
use crate::{motive, quiver, tropical, vertex};

/// Integers as JSON numbers when they fit in 53 bits, else as strings.
pub fn int_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) if v.unsigned_abs() < (1u64 << 53) => Value::from(v),
        _ => Value::from(n.to_string()),
    }
}

/// Rationals as `"p/q"` strings (integers as `"p"`).
pub fn rational_json(r: &Rational) -> Value {
    Value::from(rational_to_string(r))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    /// Harder–Narasimhan recursion on `K(l₁, l₂)`.
    Hn,
    /// Refinement sum over stable spanning trees.
    Mps,
    /// Refinement sum over recursive tropical counts.
    Tropical,
    /// Refinement sum over vertex-group factorizations.
    Vertex,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Hn, Method::Mps, Method::Tropical, Method::Vertex];

    pub fn name(self) -> &'static str {
        match self {
            Method::Hn => "hn",
            Method::Mps => "mps",
            Method::Tropical => "tropical",
            Method::Vertex => "vertex",
        }
    }

    /// The Euler characteristic of the stable moduli of `K(l₁, l₂)` at
    /// `(P₁, P₂)` by this method.
    pub fn euler_char(self, p1: &[u32], p2: &[u32]) -> Result<BigInt> {
        match self {
            Method::Hn => tropical::bipartite_euler_char(p1, p2),
            Method::Mps => tropical::mps_euler(p1, p2),
            Method::Tropical => tropical::degeneration_total(p1, p2),
            Method::Vertex => vertex::vertex_total(p1, p2),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown method `{s}`")))
    }
}

/// Outcome of one method.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Value(BigInt),
    Failed(String),
    Skipped,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MethodResult {
    pub method: Method,
    pub outcome: Outcome,
    pub seconds: f64,
}

/// What was computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Input {
    Bipartite {
        p1: Vec<u32>,
        p2: Vec<u32>,
    },
    Quiver {
        quiver: Value,
        dim: Vec<u32>,
        theta: Vec<i64>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgreementReport {
    pub input: Input,
    pub results: Vec<MethodResult>,
}

impl AgreementReport {
    /// True iff every method that ran produced a value and all values are
    /// equal.
    pub fn agree(&self) -> bool {
        let mut values = Vec::new();
        for r in &self.results {
            match &r.outcome {
                Outcome::Value(v) => values.push(v),
                Outcome::Failed(_) => return false,
                Outcome::Skipped => {}
            }
        }
        !values.is_empty() && values.windows(2).all(|w| w[0] == w[1])
    }

    pub fn value(&self, m: Method) -> Option<&BigInt> {
        self.results
            .iter()
            .find(|r| r.method == m)
            .and_then(|r| match &r.outcome {
                Outcome::Value(v) => Some(v),
                _ => None,
            })
    }

    /// JSON report; wall-clock times only when `timings` is set, so the
    /// default output is byte-stable.
    pub fn to_json(&self, timings: bool) -> Value {
        let input = match &self.input {
            Input::Bipartite { p1, p2 } => json!({ "p1": p1, "p2": p2 }),
            Input::Quiver { quiver, dim, theta } => {
                json!({ "quiver": quiver, "dim": dim, "theta": theta })
            }
        };
        let mut methods = Map::new();
        for r in &self.results {
            let mut entry = Map::new();
            match &r.outcome {
                Outcome::Value(v) => {
                    entry.insert("status".into(), "ok".into());
                    entry.insert("value".into(), int_json(v));
                }
                Outcome::Failed(e) => {
                    entry.insert("status".into(), "error".into());
                    entry.insert("error".into(), e.clone().into());
                }
                Outcome::Skipped => {
                    entry.insert("status".into(), "skipped".into());
                }
            }
            if timings && r.outcome != Outcome::Skipped {
                entry.insert("seconds".into(), json!(r.seconds));
            }
            methods.insert(r.method.name().into(), Value::Object(entry));
        }
        json!({ "input": input, "methods": methods, "agree": self.agree() })
    }
}

fn timed(f: impl FnOnce() -> Result<BigInt>) -> (Outcome, f64) {
    let start = Instant::now();
    let outcome = match f() {
        Ok(v) => Outcome::Value(v),
        Err(e) => Outcome::Failed(e.to_string()),
    };
    (outcome, start.elapsed().as_secs_f64())
}

/// Runs the requested methods on `(P₁, P₂)`; the others are marked skipped.
pub fn bipartite_report(p1: &[u32], p2: &[u32], methods: &[Method]) -> Result<AgreementReport> {
    let (a, b): (u32, u32) = (p1.iter().sum(), p2.iter().sum());
    if p1.is_empty() || p2.is_empty() || p1.contains(&0) || p2.contains(&0) {
        return Err(Error::InvalidArgument(
            "partitions need positive parts".into(),
        ));
    }
    if num_integer::gcd(a, b) != 1 {
        return Err(Error::NotCoprimeSizes(a, b));
    }
    let results = Method::ALL
        .into_iter()
        .map(|m| {
            if methods.contains(&m) {
                let (outcome, seconds) = timed(|| m.euler_char(p1, p2));
                MethodResult {
                    method: m,
                    outcome,
                    seconds,
                }
            } else {
                MethodResult {
                    method: m,
                    outcome: Outcome::Skipped,
                    seconds: 0.0,
                }
            }
        })
        .collect();
    Ok(AgreementReport {
        input: Input::Bipartite {
            p1: p1.to_vec(),
            p2: p2.to_vec(),
        },
        results,
    })
}

/// The Harder–Narasimhan Euler characteristic for an arbitrary quiver;
/// the bipartite-only methods are marked skipped.
pub fn quiver_report(
    q: &quiver::Quiver,
    s: &quiver::Stability,
    d: &quiver::DimVector,
) -> Result<AgreementReport> {
    let (outcome, seconds) = timed(|| motive::euler_char(q, s, d));
    let mut results = vec![MethodResult {
        method: Method::Hn,
        outcome,
        seconds,
    }];
    for m in [Method::Mps, Method::Tropical, Method::Vertex] {
        results.push(MethodResult {
            method: m,
            outcome: Outcome::Skipped,
            seconds: 0.0,
        });
    }
    Ok(AgreementReport {
        input: Input::Quiver {
            quiver: q.to_json(),
            dim: d.as_slice().to_vec(),
            theta: s.theta.clone(),
        },
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_json_switches_to_strings() {
        assert_eq!(int_json(&BigInt::from(7)), json!(7));
        assert_eq!(int_json(&BigInt::from(-7)), json!(-7));
        let big = BigInt::from(1u64 << 53);
        assert_eq!(int_json(&big), json!("9007199254740992"));
        assert_eq!(
            int_json(&(BigInt::from(1u64 << 53) - 1)),
            json!(9007199254740991u64)
        );
    }

    #[test]
    fn report_examples() {
        let r = bipartite_report(&[2], &[1, 1, 1], &Method::ALL).unwrap();
        assert!(r.agree());
        for m in Method::ALL {
            assert_eq!(r.value(m), Some(&BigInt::from(1)));
        }
        let r = bipartite_report(&[1], &[1], &[Method::Hn, Method::Tropical]).unwrap();
        assert!(r.agree());
        let j = r.to_json(false);
        assert_eq!(j["methods"]["mps"]["status"], json!("skipped"));
        assert_eq!(j["methods"]["hn"]["value"], json!(1));
        assert!(j["methods"]["hn"].get("seconds").is_none());
        assert!(bipartite_report(&[2], &[2], &Method::ALL).is_err());
    }

    #[test]
    fn disagreement_and_failures() {
        let mut r = bipartite_report(&[1], &[1, 1], &Method::ALL).unwrap();
        assert!(r.agree());
        r.results[1].outcome = Outcome::Value(BigInt::from(2));
        assert!(!r.agree());
        r.results[1].outcome = Outcome::Failed("boom".into());
        assert!(!r.agree());
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }
}
