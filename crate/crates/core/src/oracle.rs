//! Exhaustive enumeration of both allocation schemes for small parameters.
//!
//! Every outcome is visited in a fixed lexicographic order (agents in order,
//! subsets by their sorted element lists, draws by node index), so counts are
//! reproducible. Nothing is sampled: either every outcome fits in the budget
//! or the enumeration is refused up front.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::combinatorics::binomial;
use crate::distribution::{CoverageDistribution, Params, Scheme};
use crate::error::{Error, Result};
use crate::rational::Rational;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub params: Params,
    pub scheme: Scheme,
    pub union_size_counts: BTreeMap<u32, BigUint>,
    pub total_outcomes: BigUint,
    /// Multinomial only: outcomes in which every stage drew `m` distinct nodes.
    pub conditional_distinct_counts: Option<BTreeMap<u32, BigUint>>,
}

impl OracleResult {
    /// Counts normalized by the total number of outcomes.
    pub fn distribution(&self) -> CoverageDistribution {
        normalize(&self.params, self.scheme, &self.union_size_counts, &self.total_outcomes)
    }

    /// The per-stage-distinct outcomes, normalized among themselves. Comparable
    /// with the subset-scheme distribution.
    pub fn conditional_distribution(&self) -> Option<CoverageDistribution> {
        let counts = self.conditional_distinct_counts.as_ref()?;
        let total: BigUint = counts.values().sum();
        if total.is_zero() {
            return None;
        }
        Some(normalize(&self.params, Scheme::Subset, counts, &total))
    }
}

fn normalize(
    params: &Params,
    scheme: Scheme,
    counts: &BTreeMap<u32, BigUint>,
    total: &BigUint,
) -> CoverageDistribution {
    let lo = scheme.support_lo(params);
    let hi = params.max_coverage();
    let total = BigInt::from(total.clone());
    let pmf = (lo..=hi)
        .map(|t| {
            let c = counts.get(&t).cloned().unwrap_or_default();
            Rational::new(BigInt::from(c), total.clone())
        })
        .collect();
    CoverageDistribution::from_parts(*params, scheme, pmf)
}

fn check_budget(outcomes: &BigInt, budget: u64, what: &'static str) -> Result<u64> {
    match outcomes.to_u64() {
        Some(count) if count <= budget => Ok(count),
        _ => Err(Error::BudgetExceeded {
            what,
            required: outcomes.to_string(),
            budget,
        }),
    }
}

/// Fixed-width node set.
type Bits = Vec<u64>;

fn words_for(n: u32) -> usize {
    (n as usize).div_ceil(64).max(1)
}

/// All `m`-subsets of `{0..n}` in lexicographic order of sorted elements.
fn all_subsets(n: u32, m: u32) -> Vec<Bits> {
    let words = words_for(n);
    let mut out = Vec::new();
    let mut idx: Vec<u32> = (0..m).collect();
    loop {
        let mut bits = vec![0u64; words];
        for &i in &idx {
            bits[(i / 64) as usize] |= 1 << (i % 64);
        }
        out.push(bits);
        // advance to the next combination
        let mut pos = m as usize;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if idx[pos] < n - m + pos as u32 {
                break;
            }
        }
        idx[pos] += 1;
        for j in pos + 1..m as usize {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Union sizes over every ordered `k`-tuple of `m`-subsets.
pub fn enumerate_subset_scheme(params: &Params, budget: u64) -> Result<OracleResult> {
    let (n, m, k) = (params.n(), params.m(), params.k());
    let outcomes = num_traits::pow(binomial(n as u64, m as i64), k as usize);
    let total = check_budget(&outcomes, budget, "subset-scheme enumeration outcomes")?;

    let subsets = all_subsets(n, m);
    let words = words_for(n);
    let mut counts = vec![0u64; n as usize + 1];
    // unions[j] = union of the first j agents' subsets
    let mut unions: Vec<Bits> = vec![vec![0u64; words]; k as usize + 1];
    let mut choice = vec![0usize; k as usize];
    let mut depth = 0usize;
    loop {
        if depth == k as usize - 1 {
            let prefix = &unions[depth];
            for s in &subsets {
                let size: u32 = prefix.iter().zip(s).map(|(a, b)| (a | b).count_ones()).sum();
                counts[size as usize] += 1;
            }
            // backtrack
            loop {
                if depth == 0 {
                    return Ok(finish(params, Scheme::Subset, &counts, total, None));
                }
                depth -= 1;
                choice[depth] += 1;
                if choice[depth] < subsets.len() {
                    break;
                }
                choice[depth] = 0;
            }
        }
        let next: Bits = unions[depth]
            .iter()
            .zip(&subsets[choice[depth]])
            .map(|(a, b)| a | b)
            .collect();
        unions[depth + 1] = next;
        depth += 1;
    }
}

/// Distinct-node counts over every length-`mk` draw sequence, plus the counts
/// restricted to sequences in which no stage repeats a node.
pub fn enumerate_multinomial_scheme(params: &Params, budget: u64) -> Result<OracleResult> {
    let (n, m, k) = (params.n(), params.m(), params.k());
    let outcomes = num_traits::pow(BigInt::from(n), params.visits() as usize);
    let total = check_budget(&outcomes, budget, "multinomial-scheme enumeration outcomes")?;

    struct Walk {
        n: usize,
        m: usize,
        len: usize,
        node_hits: Vec<u32>,
        stage_hits: Vec<u32>,
        distinct: usize,
        repeats: usize,
        counts: Vec<u64>,
        conditional: Vec<u64>,
    }

    impl Walk {
        fn go(&mut self, pos: usize) {
            if pos == self.len {
                self.counts[self.distinct] += 1;
                if self.repeats == 0 {
                    self.conditional[self.distinct] += 1;
                }
                return;
            }
            let stage = pos / self.m;
            for v in 0..self.n {
                let slot = stage * self.n + v;
                self.node_hits[v] += 1;
                self.stage_hits[slot] += 1;
                let fresh = self.node_hits[v] == 1;
                let repeat = self.stage_hits[slot] > 1;
                self.distinct += fresh as usize;
                self.repeats += repeat as usize;
                self.go(pos + 1);
                self.distinct -= fresh as usize;
                self.repeats -= repeat as usize;
                self.node_hits[v] -= 1;
                self.stage_hits[slot] -= 1;
            }
        }
    }

    let mut walk = Walk {
        n: n as usize,
        m: m as usize,
        len: params.visits() as usize,
        node_hits: vec![0; n as usize],
        stage_hits: vec![0; n as usize * k as usize],
        distinct: 0,
        repeats: 0,
        counts: vec![0; n as usize + 1],
        conditional: vec![0; n as usize + 1],
    };
    walk.go(0);
    Ok(finish(
        params,
        Scheme::Multinomial,
        &walk.counts,
        total,
        Some(&walk.conditional),
    ))
}

fn finish(
    params: &Params,
    scheme: Scheme,
    counts: &[u64],
    total: u64,
    conditional: Option<&[u64]>,
) -> OracleResult {
    let lo = scheme.support_lo(params);
    let hi = params.max_coverage();
    let to_map = |c: &[u64], lo: u32| -> BTreeMap<u32, BigUint> {
        (lo..=hi).map(|t| (t, BigUint::from(c[t as usize]))).collect()
    };
    debug_assert_eq!(counts.iter().sum::<u64>(), total);
    OracleResult {
        params: *params,
        scheme,
        union_size_counts: to_map(counts, lo),
        total_outcomes: BigUint::from(total),
        conditional_distinct_counts: conditional.map(|c| to_map(c, params.m())),
    }
}

struct Counts<'a>(&'a BTreeMap<u32, BigUint>);

impl Serialize for Counts<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            t: u32,
            count: String,
        }
        serializer.collect_seq(self.0.iter().map(|(t, c)| Entry {
            t: *t,
            count: c.to_string(),
        }))
    }
}

impl Serialize for OracleResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let dist = self.distribution();
        let pmf: Vec<_> = dist
            .iter()
            .map(|(t, p)| crate::distribution::PmfEntry { t, p: p.clone() })
            .collect();
        let mut map = serializer.serialize_map(Some(8))?;
        map.serialize_entry("scheme", &self.scheme)?;
        map.serialize_entry("n", &self.params.n())?;
        map.serialize_entry("m", &self.params.m())?;
        map.serialize_entry("k", &self.params.k())?;
        map.serialize_entry("pmf", &pmf)?;
        map.serialize_entry("counts", &Counts(&self.union_size_counts))?;
        map.serialize_entry("total_outcomes", &self.total_outcomes.to_string())?;
        map.serialize_entry(
            "conditional_distinct_counts",
            &self.conditional_distinct_counts.as_ref().map(Counts),
        )?;
        map.end()
    }
}
