//! Exact integer combinatorics: binomials, falling factorials and Stirling
//! numbers of the second kind.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// `C(n, k)`, zero when `k < 0` or `k > n`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial extended to a signed top argument: zero whenever `n < 0`.
pub(crate) fn binomial_signed(n: i64, k: i64) -> BigInt {
    if n < 0 {
        BigInt::zero()
    } else {
        binomial(n as u64, k)
    }
}

/// `n (n-1) ... (n-m+1)`; 1 for `m = 0`, 0 for `m > n`.
pub fn falling_factorial(n: u64, m: u64) -> BigInt {
    if m > n {
        return BigInt::zero();
    }
    (0..m).fold(BigInt::one(), |acc, i| acc * (n - i))
}

pub fn factorial(n: u64) -> BigInt {
    falling_factorial(n, n)
}

/// `S(N, K)` via the alternating sum `(1/K!) sum_j (-1)^j C(K,j) (K-j)^N`.
///
/// The integer sum is formed first and then divided by `K!`; the division is
/// checked to be exact.
pub fn stirling2(big_n: u32, big_k: u32) -> BigInt {
    if big_k > big_n {
        return BigInt::zero();
    }
    if big_k == 0 {
        return if big_n == 0 { BigInt::one() } else { BigInt::zero() };
    }
    let mut sum = BigInt::zero();
    for j in 0..=big_k {
        let term = binomial(big_k as u64, j as i64) * num_traits::pow(BigInt::from(big_k - j), big_n as usize);
        if j % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let (quot, rem) = sum.div_rem(&factorial(big_k as u64));
    assert!(rem.is_zero(), "Stirling sum S({big_n},{big_k}) not divisible by K!");
    quot
}

/// `S(N, K)` via `S(N,K) = K S(N-1,K) + S(N-1,K-1)`.
pub fn stirling2_recurrence(big_n: u32, big_k: u32) -> BigInt {
    if big_k > big_n {
        return BigInt::zero();
    }
    Stirling2Table::new(big_n).get(big_n, big_k).clone()
}

/// Pascal triangle `C(i, j)` for `0 <= j <= i <= max_n`. Immutable once built.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    rows: Vec<Vec<BigInt>>,
}

impl BinomialTable {
    pub fn new(max_n: u64) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_n as usize + 1);
        rows.push(vec![BigInt::one()]);
        for i in 1..=max_n as usize {
            let prev = &rows[i - 1];
            let mut row = Vec::with_capacity(i + 1);
            row.push(BigInt::one());
            for j in 1..i {
                row.push(&prev[j - 1] + &prev[j]);
            }
            row.push(BigInt::one());
            rows.push(row);
        }
        BinomialTable { rows }
    }

    pub fn max_n(&self) -> u64 {
        self.rows.len() as u64 - 1
    }

    /// Falls back to direct computation beyond the table bound.
    pub fn get(&self, n: u64, k: i64) -> BigInt {
        if k < 0 || k as u64 > n {
            return BigInt::zero();
        }
        match self.rows.get(n as usize) {
            Some(row) => row[k as usize].clone(),
            None => binomial(n, k),
        }
    }
}

/// Triangle of `S(i, j)` for `0 <= j <= i <= max_n`, built by recurrence.
#[derive(Debug, Clone)]
pub struct Stirling2Table {
    rows: Vec<Vec<BigInt>>,
}

impl Stirling2Table {
    pub fn new(max_n: u32) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_n as usize + 1);
        rows.push(vec![BigInt::one()]);
        for i in 1..=max_n as usize {
            let prev = &rows[i - 1];
            let mut row = vec![BigInt::zero(); i + 1];
            for j in 1..=i {
                let stay = if j < i { &prev[j] * j } else { BigInt::zero() };
                row[j] = stay + &prev[j - 1];
            }
            rows.push(row);
        }
        Stirling2Table { rows }
    }

    pub fn get(&self, big_n: u32, big_k: u32) -> &BigInt {
        &self.rows[big_n as usize][big_k as usize]
    }
}
