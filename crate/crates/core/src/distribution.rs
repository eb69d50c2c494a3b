//! Experiment parameters and exact coverage distributions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// One roving-agent experiment: `k` agents, each visiting `m` of `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct Params {
    n: u32,
    m: u32,
    k: u32,
}

#[derive(Deserialize)]
struct RawParams {
    n: u32,
    m: u32,
    k: u32,
}

impl TryFrom<RawParams> for Params {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        Params::new(raw.n, raw.m, raw.k)
    }
}

impl Params {
    pub fn new(n: u32, m: u32, k: u32) -> Result<Self> {
        let invalid = |reason| Error::InvalidParams {
            n: n.into(),
            m: m.into(),
            k: k.into(),
            reason,
        };
        if m == 0 {
            return Err(invalid("m must be at least 1"));
        }
        if m > n {
            return Err(invalid("m must not exceed n"));
        }
        if k == 0 {
            return Err(invalid("k must be at least 1"));
        }
        if m.checked_mul(k).is_none() {
            return Err(invalid("m*k overflows"));
        }
        Ok(Params { n, m, k })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// Total number of node visits, `m*k`.
    pub fn visits(&self) -> u32 {
        self.m * self.k
    }

    /// Largest possible union size, `min(k*m, n)`.
    pub fn max_coverage(&self) -> u32 {
        self.visits().min(self.n)
    }

    pub fn with_k(&self, k: u32) -> Result<Self> {
        Params::new(self.n, self.m, k)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(n={}, m={}, k={})", self.n, self.m, self.k)
    }
}

/// Allocation scheme under which a distribution was derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Each agent picks a uniform `m`-subset.
    Subset,
    /// Each agent makes `m` independent uniform single-node draws.
    Multinomial,
}

impl Scheme {
    pub fn support_lo(&self, params: &Params) -> u32 {
        match self {
            Scheme::Subset => params.m(),
            Scheme::Multinomial => 1,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Scheme::Subset => "subset",
            Scheme::Multinomial => "multinomial",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subset" => Ok(Scheme::Subset),
            "multinomial" => Ok(Scheme::Multinomial),
            other => Err(Error::InvalidArgument(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Exact probability mass function of the covered-node count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageDistribution {
    params: Params,
    scheme: Scheme,
    support_lo: u32,
    support_hi: u32,
    pmf: Vec<Rational>,
}

impl CoverageDistribution {
    /// `pmf[i]` is the probability of `support_lo + i` covered nodes.
    pub(crate) fn from_parts(params: Params, scheme: Scheme, pmf: Vec<Rational>) -> Self {
        let support_lo = scheme.support_lo(&params);
        let support_hi = params.max_coverage();
        debug_assert_eq!(pmf.len(), (support_hi - support_lo + 1) as usize);
        CoverageDistribution {
            params,
            scheme,
            support_lo,
            support_hi,
            pmf,
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn support_lo(&self) -> u32 {
        self.support_lo
    }

    pub fn support_hi(&self) -> u32 {
        self.support_hi
    }

    /// Probability of exactly `t` covered nodes; zero outside the support.
    pub fn pmf(&self, t: u32) -> Rational {
        if t < self.support_lo || t > self.support_hi {
            return Rational::zero();
        }
        self.pmf[(t - self.support_lo) as usize].clone()
    }

    /// `(t, Pr(t))` in ascending `t`.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &Rational)> + '_ {
        (self.support_lo..).zip(self.pmf.iter())
    }

    pub fn total(&self) -> Rational {
        self.pmf.iter().sum()
    }

    pub fn mean(&self) -> Rational {
        self.iter().map(|(t, p)| p * &Rational::from(t as u64)).sum()
    }

    /// `Pr(coverage >= tau)`.
    pub fn tail(&self, tau: i64) -> Rational {
        if tau <= self.support_lo as i64 {
            return Rational::one();
        }
        if tau > self.support_hi as i64 {
            return Rational::zero();
        }
        self.iter()
            .filter(|(t, _)| *t as i64 >= tau)
            .map(|(_, p)| p)
            .sum()
    }
}

#[derive(Serialize, Deserialize)]
pub(crate) struct PmfEntry {
    pub t: u32,
    #[serde(flatten)]
    pub p: Rational,
}

#[derive(Serialize, Deserialize)]
struct DistributionRepr {
    scheme: Scheme,
    n: u32,
    m: u32,
    k: u32,
    pmf: Vec<PmfEntry>,
}

impl Serialize for CoverageDistribution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DistributionRepr {
            scheme: self.scheme,
            n: self.params.n(),
            m: self.params.m(),
            k: self.params.k(),
            pmf: self.iter().map(|(t, p)| PmfEntry { t, p: p.clone() }).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoverageDistribution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = DistributionRepr::deserialize(deserializer)?;
        let params = Params::new(repr.n, repr.m, repr.k).map_err(D::Error::custom)?;
        let lo = repr.scheme.support_lo(&params);
        let hi = params.max_coverage();
        let mut pmf = vec![Rational::zero(); (hi - lo + 1) as usize];
        for entry in repr.pmf {
            if entry.t < lo || entry.t > hi {
                return Err(D::Error::custom(format!("t={} outside support [{lo}, {hi}]", entry.t)));
            }
            pmf[(entry.t - lo) as usize] = entry.p;
        }
        Ok(CoverageDistribution::from_parts(params, repr.scheme, pmf))
    }
}
