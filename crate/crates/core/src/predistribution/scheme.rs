use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::rates::{binomial, parse_rational, Rational};

/// Declarative description of a key pre-distribution scheme.
///
/// Canonical text forms (used in files and on the command line):
///
/// | kind | text |
/// |------|------|
/// | pairwise | `pairwise` |
/// | one key for everyone | `same` |
/// | every `a`-subset gets a group | `comb:a=3` |
/// | `m` groups from a regular design | `sampled:a=3,m=4` |
/// | per-bit probability `p` | `random:p=1/2` |
/// | storage split | `hybrid:lambda=1/2:pairwise\|comb:a=25` |
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SchemeSpec {
    Pairwise,
    Same,
    Combinational { a: u32 },
    SampledCombinational { a: u32, m: u32 },
    Random { p: Rational },
    /// `lambda` of each node's storage runs `first`, the rest runs `second`.
    Hybrid {
        lambda: Rational,
        first: Box<SchemeSpec>,
        second: Box<SchemeSpec>,
    },
}

impl SchemeSpec {
    pub fn hybrid(lambda: Rational, first: SchemeSpec, second: SchemeSpec) -> Self {
        SchemeSpec::Hybrid {
            lambda,
            first: Box::new(first),
            second: Box::new(second),
        }
    }

    pub fn validate(&self, n: u32) -> Result<()> {
        if n < 2 {
            return Err(Error::InvalidScheme(format!("need n >= 2, got {n}")));
        }
        match self {
            SchemeSpec::Pairwise | SchemeSpec::Same => Ok(()),
            SchemeSpec::Combinational { a } => check_a(*a, n),
            SchemeSpec::SampledCombinational { a, m } => {
                check_a(*a, n)?;
                if *m == 0 {
                    return Err(Error::InvalidScheme("m must be positive".into()));
                }
                if (*a as u64 * *m as u64) % n as u64 != 0 {
                    return Err(Error::InvalidScheme(format!(
                        "a*m = {} is not divisible by n = {n}",
                        a * m
                    )));
                }
                if binomial(n as i64, *a as i64) < (*m).into() {
                    return Err(Error::InvalidScheme(format!(
                        "m = {m} exceeds C({n}, {a})"
                    )));
                }
                Ok(())
            }
            SchemeSpec::Random { p } => {
                if !p.is_positive() || *p > Rational::one() {
                    return Err(Error::InvalidScheme(format!("p = {p} outside (0, 1]")));
                }
                Ok(())
            }
            SchemeSpec::Hybrid {
                lambda,
                first,
                second,
            } => {
                if lambda.is_negative() || *lambda > Rational::one() {
                    return Err(Error::InvalidScheme(format!(
                        "lambda = {lambda} outside [0, 1]"
                    )));
                }
                for child in [first, second] {
                    if matches!(**child, SchemeSpec::Hybrid { .. }) {
                        return Err(Error::InvalidScheme("hybrid children cannot be hybrid".into()));
                    }
                    child.validate(n)?;
                }
                Ok(())
            }
        }
    }

    /// Schemes whose distribution is invariant under node relabelling.
    pub fn is_symmetric(&self) -> bool {
        match self {
            SchemeSpec::Pairwise | SchemeSpec::Same | SchemeSpec::Combinational { .. } => true,
            SchemeSpec::SampledCombinational { .. } | SchemeSpec::Random { .. } => false,
            SchemeSpec::Hybrid { first, second, .. } => first.is_symmetric() && second.is_symmetric(),
        }
    }

    /// Group size `a` for the combinational family (pairwise is 2, same is n).
    pub fn group_size(&self, n: u32) -> Option<u32> {
        match self {
            SchemeSpec::Pairwise => Some(2),
            SchemeSpec::Same => Some(n),
            SchemeSpec::Combinational { a } | SchemeSpec::SampledCombinational { a, .. } => Some(*a),
            _ => None,
        }
    }

    /// Non-hybrid components with their storage fractions.
    pub fn components(&self) -> Vec<(Rational, &SchemeSpec)> {
        match self {
            SchemeSpec::Hybrid {
                lambda,
                first,
                second,
            } => vec![
                (lambda.clone(), first.as_ref()),
                (Rational::one() - lambda, second.as_ref()),
            ],
            other => vec![(Rational::one(), other)],
        }
    }

    /// Smallest per-node budget for which every group quota divides exactly,
    /// or `None` when the scheme has no fixed quota (random parts).
    pub fn exact_budget_unit(&self, n: u32) -> Option<u64> {
        let quota = |s: &SchemeSpec| -> Option<u64> {
            match s {
                SchemeSpec::SampledCombinational { a, m } => Some((*a as u64 * *m as u64) / n as u64),
                SchemeSpec::Random { .. } => None,
                other => {
                    let a = other.group_size(n)? as i64;
                    binomial(n as i64 - 1, a - 1).try_into().ok()
                }
            }
        };
        match self {
            SchemeSpec::Hybrid {
                lambda,
                first,
                second,
            } => {
                let den: u64 = lambda.denom().try_into().ok()?;
                let num: u64 = lambda.numer().try_into().ok()?;
                let q1 = if num == 0 { 1 } else { quota(first)? };
                let q2 = if num == den { 1 } else { quota(second)? };
                (1..=q1 * q2)
                    .map(|k| k * den)
                    .find(|l| (l / den * num) % q1 == 0 && (l - l / den * num) % q2 == 0)
            }
            other => quota(other),
        }
    }
}

fn check_a(a: u32, n: u32) -> Result<()> {
    if a < 2 || a > n {
        return Err(Error::InvalidScheme(format!(
            "group size a = {a} outside [2, {n}]"
        )));
    }
    Ok(())
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeSpec::Pairwise => f.write_str("pairwise"),
            SchemeSpec::Same => f.write_str("same"),
            SchemeSpec::Combinational { a } => write!(f, "comb:a={a}"),
            SchemeSpec::SampledCombinational { a, m } => write!(f, "sampled:a={a},m={m}"),
            SchemeSpec::Random { p } => write!(f, "random:p={p}"),
            SchemeSpec::Hybrid {
                lambda,
                first,
                second,
            } => write!(f, "hybrid:lambda={lambda}:{first}|{second}"),
        }
    }
}

fn parse_fields(body: &str) -> Result<Vec<(&str, &str)>> {
    body.split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::Format(format!("expected key=value, got {kv:?}")))
        })
        .collect()
}

fn field<'a>(fields: &[(&str, &'a str)], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::Format(format!("missing field {key:?}")))
}

fn parse_u32(s: &str) -> Result<u32> {
    s.parse()
        .map_err(|_| Error::Format(format!("bad integer {s:?}")))
}

impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, body) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "pairwise" => Ok(SchemeSpec::Pairwise),
            "same" => Ok(SchemeSpec::Same),
            "comb" | "combinational" => {
                let fields = parse_fields(body)?;
                Ok(SchemeSpec::Combinational {
                    a: parse_u32(field(&fields, "a")?)?,
                })
            }
            "sampled" => {
                let fields = parse_fields(body)?;
                Ok(SchemeSpec::SampledCombinational {
                    a: parse_u32(field(&fields, "a")?)?,
                    m: parse_u32(field(&fields, "m")?)?,
                })
            }
            "random" => {
                let fields = parse_fields(body)?;
                Ok(SchemeSpec::Random {
                    p: parse_rational(field(&fields, "p")?)?,
                })
            }
            "hybrid" => {
                let rest = body
                    .strip_prefix("lambda=")
                    .ok_or_else(|| Error::Format("hybrid needs lambda=".into()))?;
                let (lambda, children) = rest
                    .split_once(':')
                    .ok_or_else(|| Error::Format("hybrid needs ':' before its parts".into()))?;
                let (first, second) = children
                    .split_once('|')
                    .ok_or_else(|| Error::Format("hybrid needs two parts separated by '|'".into()))?;
                Ok(SchemeSpec::hybrid(
                    parse_rational(lambda)?,
                    first.parse()?,
                    second.parse()?,
                ))
            }
            other => Err(Error::Format(format!("unknown scheme kind {other:?}"))),
        }
    }
}
