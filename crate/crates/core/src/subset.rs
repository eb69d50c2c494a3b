//! Coverage when every agent visits a uniformly chosen `m`-subset of nodes.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::combinatorics::{binomial, binomial_signed, BinomialTable};
use crate::distribution::{CoverageDistribution, Params, Scheme};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Number of `k x t` 0/1 matrices with exactly `m` ones per row and no empty
/// column, by inclusion-exclusion over the empty columns.
pub fn q_count(k: u32, m: u32, t: u32) -> BigInt {
    if t < m || t as u64 > k as u64 * m as u64 {
        return BigInt::zero();
    }
    let table = BinomialTable::new(t as u64);
    q_count_with(&table, m, t, &|j| num_traits::pow(table.get(j as u64, m as i64), k as usize))
}

fn q_count_with(
    table: &BinomialTable,
    m: u32,
    t: u32,
    row_choices: &dyn Fn(u32) -> BigInt,
) -> BigInt {
    let mut acc = BigInt::zero();
    for i in 0..=(t - m) {
        let term = table.get(t as u64, i as i64) * row_choices(t - i);
        if i % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Exact PMF of `|S_1 u ... u S_k|` over `t` in `[m, min(km, n)]`.
pub fn coverage_pmf(params: &Params) -> CoverageDistribution {
    let (n, m, k) = (params.n(), params.m(), params.k());
    let hi = params.max_coverage();
    let table = BinomialTable::new(n as u64);
    // C(j, m)^k for j in [m, hi]
    let powers: Vec<BigInt> = (m..=hi)
        .map(|j| num_traits::pow(table.get(j as u64, m as i64), k as usize))
        .collect();
    let row_choices = |j: u32| powers[(j - m) as usize].clone();
    let normalizer = num_traits::pow(table.get(n as u64, m as i64), k as usize);
    let pmf = (m..=hi)
        .map(|t| {
            let q = q_count_with(&table, m, t, &row_choices);
            Rational::new(table.get(n as u64, t as i64) * q, normalizer.clone())
        })
        .collect();
    CoverageDistribution::from_parts(*params, Scheme::Subset, pmf)
}

/// Number of summands the nested formula evaluates for `params`.
pub fn nested_term_count(params: &Params) -> BigInt {
    let support = (params.max_coverage() - params.m() + 1) as u64;
    let inner = params.k().saturating_sub(2) as usize;
    num_traits::pow(BigInt::from(params.m() as u64 + 1), inner) * support
}

/// The PMF evaluated term by term from the legacy nested-sum formula that
/// conditions on the first agent's subset and sums over the overlaps
/// `m_2, ..., m_{k-1}` of each subsequent agent with the running union.
///
/// Only defined for `k >= 4`. Exponential in `k`; refuses when the term count
/// exceeds `budget`.
pub fn coverage_pmf_nested(params: &Params, budget: u64) -> Result<CoverageDistribution> {
    let (n, m, k) = (params.n() as i64, params.m() as i64, params.k() as i64);
    if k < 4 {
        return Err(Error::NestedNeedsFourAgents(params.k()));
    }
    let terms = nested_term_count(params);
    if terms > BigInt::from(budget) {
        return Err(Error::BudgetExceeded {
            what: "nested-sum formula terms",
            required: terms.to_string(),
            budget,
        });
    }
    let lo = m;
    let hi = params.max_coverage() as i64;
    let mut sums = vec![BigInt::zero(); (hi - lo + 1) as usize];

    // Depth-first over m_2..m_{k-1}; `overlap_sum` is m_2 + ... + m_{j-1}.
    fn descend(
        j: i64,
        overlap_sum: i64,
        prefix: BigInt,
        ctx: &NestedCtx,
        sums: &mut [BigInt],
    ) {
        let NestedCtx { n, m, k, lo, hi } = *ctx;
        if j == k {
            let covered = (k - 1) * m - overlap_sum;
            for t in lo..=hi {
                let last = binomial_signed(covered, k * m - t - overlap_sum)
                    * binomial_signed(n - covered, t - covered);
                if !last.is_zero() {
                    sums[(t - lo) as usize] += &prefix * last;
                }
            }
            return;
        }
        let covered = (j - 1) * m - overlap_sum;
        for mj in 0..=m {
            let factor = binomial_signed(covered, mj) * binomial_signed(n - covered, m - mj);
            if factor.is_zero() {
                continue;
            }
            descend(j + 1, overlap_sum + mj, &prefix * factor, ctx, sums);
        }
    }

    let ctx = NestedCtx { n, m, k, lo, hi };
    descend(2, 0, BigInt::from(1), &ctx, &mut sums);

    let normalizer = num_traits::pow(binomial(n as u64, m), (k - 1) as usize);
    let pmf = sums
        .into_iter()
        .map(|s| Rational::new(s, normalizer.clone()))
        .collect();
    Ok(CoverageDistribution::from_parts(*params, Scheme::Subset, pmf))
}

#[derive(Clone, Copy)]
struct NestedCtx {
    n: i64,
    m: i64,
    k: i64,
    lo: i64,
    hi: i64,
}

/// Expected number of covered nodes, summed over the exact PMF.
pub fn mean_coverage(params: &Params) -> Rational {
    coverage_pmf(params).mean()
}

/// `n (1 - ((n-m)/n)^k)`, the same mean by linearity of expectation.
pub fn mean_coverage_closed_form(params: &Params) -> Rational {
    let n = params.n() as u64;
    let miss = Rational::new(n - params.m() as u64, n);
    Rational::from(n) * (Rational::one() - miss.pow(params.k()))
}

/// `Pr(coverage >= tau)`.
pub fn tail_probability(params: &Params, tau: i64) -> Rational {
    coverage_pmf(params).tail(tau)
}
