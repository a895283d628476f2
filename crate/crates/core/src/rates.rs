//! Closed-form rate arithmetic: network and channel capacities, per-scheme
//! maximum rates, hybrid combination and the zero-hacked-node tradeoff.
//!
//! Everything is exact over big rationals. Conversion to `f64` only happens
//! when rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predistribution::SchemeSpec;

pub type Rational = BigRational;

/// Binomial coefficient, zero outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if n < 0 || k < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(v.into())
}

fn binomial_ratio(num: (i64, i64), den: (i64, i64)) -> Rational {
    Rational::new(binomial(num.0, num.1), binomial(den.0, den.1))
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Format(format!("bad rational {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let mag = whole.abs() * &scale + frac;
        let num = if negative { -mag } else { mag };
        return Ok(Rational::new(num, scale));
    }
    s.parse::<BigInt>()
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// `p/q (≈ d)` with the decimal rounded to 4 significant figures.
pub fn format_rational(r: &Rational) -> String {
    format!("{} (≈ {})", r, format_sig(to_f64(r), 4))
}

pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Network size and the hacked-node bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkParams {
    pub n: u32,
    pub t: u32,
}

impl NetworkParams {
    pub fn new(n: u32, t: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need n >= 2, got {n}")));
        }
        if t + 2 > n {
            return Err(Error::InvalidArgument(format!(
                "t = {t} leaves no secure channel among n = {n} nodes (need t <= n - 2)"
            )));
        }
        Ok(NetworkParams { n, t })
    }

    fn ni(&self) -> i64 {
        self.n as i64
    }

    fn ti(&self) -> i64 {
        self.t as i64
    }
}

/// Maximum network rate and maximum channel rate of a scheme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaxRates {
    pub net: Rational,
    pub channel: Rational,
}

/// Group size that maximises the channel rate: `ceil(n / (t + 1))`, clamped
/// into `[2, n - t]`.
pub fn optimal_group_size(params: NetworkParams) -> u32 {
    let a = params.n.div_ceil(params.t + 1);
    a.clamp(2, params.n - params.t)
}

/// Network capacity `n / 2` and channel capacity
/// `C(n-t-2, a-2) / C(n-1, a-1)` at the optimal group size.
pub fn capacity(params: NetworkParams) -> MaxRates {
    let a = optimal_group_size(params) as i64;
    let (n, t) = (params.ni(), params.ti());
    MaxRates {
        net: rational(n, 2),
        channel: binomial_ratio((n - t - 2, a - 2), (n - 1, a - 1)),
    }
}

fn check_group_size(params: NetworkParams, a: u32) -> Result<()> {
    if a < 2 || a > params.n {
        return Err(Error::InvalidArgument(format!(
            "group size a = {a} outside [2, {}]",
            params.n
        )));
    }
    Ok(())
}

/// `γ(t, a) = C(n-t-2, a-2) / C(n-2, a-2)`.
pub fn gamma(params: NetworkParams, a: u32) -> Result<Rational> {
    check_group_size(params, a)?;
    let (n, t, a) = (params.ni(), params.ti(), a as i64);
    Ok(binomial_ratio((n - t - 2, a - 2), (n - 2, a - 2)))
}

pub fn combinational_max_rates(params: NetworkParams, a: u32) -> Result<MaxRates> {
    let g = gamma(params, a)?;
    let (n, a) = (params.ni(), a as i64);
    Ok(MaxRates {
        net: rational(n, a) * &g,
        channel: rational(a - 1, n - 1) * g,
    })
}

pub(crate) fn check_probability(p: &Rational, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero {
        !p.is_negative()
    } else {
        p.is_positive()
    };
    if !ok || *p > Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "probability {p} outside {}",
            if allow_zero { "[0, 1]" } else { "(0, 1]" }
        )));
    }
    Ok(())
}

pub(crate) fn pow(base: &Rational, e: i64) -> Rational {
    if e < 0 {
        return Rational::zero();
    }
    num_traits::pow(base.clone(), e as usize)
}

/// `α(n) = 1 - (1-p)^n - n p (1-p)^(n-1)`: probability that a bit handed to
/// each of `n` nodes independently with probability `p` lands on at least two.
pub fn alpha(n: u32, p: &Rational) -> Result<Rational> {
    check_probability(p, true)?;
    Ok(alpha_unchecked(n as i64, p))
}

pub(crate) fn alpha_unchecked(n: i64, p: &Rational) -> Rational {
    if n < 2 {
        return Rational::zero();
    }
    let q = Rational::one() - p;
    Rational::one() - pow(&q, n) - int(n) * p * pow(&q, n - 1)
}

pub fn random_max_rates(params: NetworkParams, p: &Rational) -> Result<MaxRates> {
    check_probability(p, false)?;
    let (n, t) = (params.ni(), params.ti());
    let q = Rational::one() - p;
    let spread = pow(&q, t) - pow(&q, n) - int(n - t) * p * pow(&q, n - 1);
    Ok(MaxRates {
        net: p.recip() * binomial_ratio((n, 2), (n - t, 2)) * spread,
        channel: p * pow(&q, t),
    })
}

/// Weighted sum of component rates; weights must be non-negative and sum to 1.
pub fn hybrid_max_rates(parts: &[(Rational, MaxRates)]) -> Result<MaxRates> {
    if parts.iter().any(|(w, _)| w.is_negative()) {
        return Err(Error::InvalidArgument("negative hybrid weight".into()));
    }
    let total: Rational = parts.iter().map(|(w, _)| w.clone()).sum();
    if total != Rational::one() {
        return Err(Error::InvalidArgument(format!(
            "hybrid weights sum to {total}, not 1"
        )));
    }
    Ok(MaxRates {
        net: parts.iter().map(|(w, r)| w * &r.net).sum(),
        channel: parts.iter().map(|(w, r)| w * &r.channel).sum(),
    })
}

/// Closed-form maximum rates for a scheme, where one exists.
pub fn scheme_max_rates(spec: &SchemeSpec, params: NetworkParams) -> Result<MaxRates> {
    spec.validate(params.n)?;
    match spec {
        SchemeSpec::Pairwise => combinational_max_rates(params, 2),
        SchemeSpec::Same => combinational_max_rates(params, params.n),
        SchemeSpec::Combinational { a } => combinational_max_rates(params, *a),
        SchemeSpec::Random { p } => random_max_rates(params, p),
        SchemeSpec::SampledCombinational { .. } => Err(Error::InvalidScheme(
            "sampled designs are not symmetric; no closed-form maximum rates".into(),
        )),
        SchemeSpec::Hybrid {
            lambda,
            first,
            second,
        } => hybrid_max_rates(&[
            (lambda.clone(), scheme_max_rates(first, params)?),
            (Rational::one() - lambda, scheme_max_rates(second, params)?),
        ]),
    }
}

/// Outcome of the zero-hacked-node tradeoff inequality
/// `net * 2/(n+1) + channel * (n-1)/(n+1) <= 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tradeoff {
    pub holds: bool,
    /// `1 - lhs`; zero on the boundary.
    pub slack: Rational,
}

pub fn tradeoff_check(params: NetworkParams, rates: &MaxRates) -> Result<Tradeoff> {
    if params.t != 0 {
        return Err(Error::InvalidArgument(
            "the network/channel tradeoff is only established for t = 0".into(),
        ));
    }
    let n = params.ni();
    let lhs = &rates.net * rational(2, n + 1) + &rates.channel * rational(n - 1, n + 1);
    let slack = Rational::one() - lhs;
    Ok(Tradeoff {
        holds: !slack.is_negative(),
        slack,
    })
}

/// Rates of the scheme that spends fraction `lambda` of storage on one key
/// shared by all nodes and the rest on pairwise keys. Meets the tradeoff
/// with equality for every `lambda` in `[0, 1]`.
pub fn same_pairwise_hybrid(n: u32, lambda: &Rational) -> Result<MaxRates> {
    check_probability(lambda, true)?;
    let n = n as i64;
    let rest = Rational::one() - lambda;
    Ok(MaxRates {
        net: lambda + rational(n, 2) * &rest,
        channel: lambda + rational(1, n - 1) * rest,
    })
}

/// Least common multiple of a set of positive integers.
pub fn lcm_all<I: IntoIterator<Item = BigInt>>(values: I) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(&v))
}

/// Serde adapter writing rationals as `"p/q"` strings.
pub mod serde_rational {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::{parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}
