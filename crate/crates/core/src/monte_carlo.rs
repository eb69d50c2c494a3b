//! Sampling verifier for parameters too large to enumerate.
//!
//! Trial `i` draws all of its randomness from a ChaCha8 stream keyed by the
//! seed and selected by `i`, so the result depends only on `(seed, trials)`
//! and never on how trials are split across worker threads.

use std::collections::BTreeMap;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::distribution::{CoverageDistribution, Params, Scheme};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimulationConfig {
    pub params: Params,
    pub trials: u64,
    pub seed: u64,
    pub scheme: Scheme,
    pub workers: u32,
}

impl SimulationConfig {
    pub fn new(params: Params, scheme: Scheme, trials: u64, seed: u64) -> Self {
        SimulationConfig {
            params,
            trials,
            seed,
            scheme,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: u32) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidArgument("workers must be at least 1".into()));
        }
        Ok(())
    }
}

/// Frequency table of covered-node counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalDistribution {
    pub config: SimulationConfig,
    /// One entry per `t` in the scheme's support, zeros included.
    pub counts: BTreeMap<u32, u64>,
    /// Multinomial only: trials in which some stage drew a node twice.
    pub repetition_event_count: Option<u64>,
    pub total_trials: u64,
}

impl EmpiricalDistribution {
    pub fn frequency(&self, t: u32) -> f64 {
        self.counts.get(&t).copied().unwrap_or(0) as f64 / self.total_trials as f64
    }

    pub fn repetition_frequency(&self) -> Option<f64> {
        self.repetition_event_count
            .map(|c| c as f64 / self.total_trials as f64)
    }
}

/// The generator for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(stream_key(seed));
    rng.set_stream(trial);
    rng
}

fn stream_key(seed: u64) -> [u8; 32] {
    ChaCha8Rng::seed_from_u64(seed).get_seed()
}

/// Generation-stamped membership set over `0..n`, cleared in O(1).
#[derive(Debug, Clone)]
pub struct Marker {
    stamps: Vec<u32>,
    current: u32,
}

impl Marker {
    pub fn new(n: u32) -> Self {
        Marker {
            stamps: vec![0; n as usize],
            current: 1,
        }
    }

    pub fn clear(&mut self) {
        self.current = self.current.wrapping_add(1);
        if self.current == 0 {
            self.stamps.fill(0);
            self.current = 1;
        }
    }

    /// Returns true if `v` was not yet present.
    pub fn insert(&mut self, v: u32) -> bool {
        let slot = &mut self.stamps[v as usize];
        let fresh = *slot != self.current;
        *slot = self.current;
        fresh
    }

    pub fn contains(&self, v: u32) -> bool {
        self.stamps[v as usize] == self.current
    }
}

/// Uniform `m`-subset of `0..n` by Floyd's algorithm. `seen` must be a marker
/// over `n` nodes; it is cleared first and left holding the sample.
pub fn sample_subset<R: Rng + ?Sized>(rng: &mut R, n: u32, m: u32, seen: &mut Marker, out: &mut Vec<u32>) {
    out.clear();
    seen.clear();
    for j in (n - m)..n {
        let t = rng.gen_range(0..=j);
        let pick = if seen.contains(t) { j } else { t };
        seen.insert(pick);
        out.push(pick);
    }
}

struct Tally {
    counts: Vec<u64>,
    repetitions: u64,
}

fn run_range(config: &SimulationConfig, key: [u8; 32], range: std::ops::Range<u64>) -> Tally {
    let p = &config.params;
    let (n, m, k) = (p.n(), p.m(), p.k());
    let mut tally = Tally {
        counts: vec![0; n as usize + 1],
        repetitions: 0,
    };
    let mut covered = Marker::new(n);
    let mut stage = Marker::new(n);
    let mut sample = Vec::with_capacity(m as usize);
    for trial in range {
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(trial);
        covered.clear();
        let mut size = 0usize;
        match config.scheme {
            Scheme::Subset => {
                for _ in 0..k {
                    sample_subset(&mut rng, n, m, &mut stage, &mut sample);
                    for &v in &sample {
                        size += covered.insert(v) as usize;
                    }
                }
            }
            Scheme::Multinomial => {
                let mut repeated = false;
                for _ in 0..k {
                    stage.clear();
                    for _ in 0..m {
                        let v = rng.gen_range(0..n);
                        repeated |= !stage.insert(v);
                        size += covered.insert(v) as usize;
                    }
                }
                tally.repetitions += repeated as u64;
            }
        }
        tally.counts[size] += 1;
    }
    tally
}

pub fn simulate(config: &SimulationConfig) -> Result<EmpiricalDistribution> {
    config.validate()?;
    let key = stream_key(config.seed);
    let workers = (config.workers as u64).min(config.trials);
    let chunk = config.trials.div_ceil(workers);
    let ranges: Vec<_> = (0..workers)
        .map(|w| (w * chunk).min(config.trials)..((w + 1) * chunk).min(config.trials))
        .collect();
    let tallies: Vec<Tally> = if workers == 1 {
        vec![run_range(config, key, 0..config.trials)]
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .into_iter()
                .map(|r| scope.spawn(move || run_range(config, key, r)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("simulation worker panicked"))
                .collect()
        })
    };

    let p = &config.params;
    let mut merged = vec![0u64; p.n() as usize + 1];
    let mut repetitions = 0;
    for t in &tallies {
        for (acc, c) in merged.iter_mut().zip(&t.counts) {
            *acc += c;
        }
        repetitions += t.repetitions;
    }
    let lo = config.scheme.support_lo(p);
    let counts = (lo..=p.max_coverage()).map(|t| (t, merged[t as usize])).collect();
    Ok(EmpiricalDistribution {
        config: *config,
        counts,
        repetition_event_count: (config.scheme == Scheme::Multinomial).then_some(repetitions),
        total_trials: config.trials,
    })
}

impl Serialize for EmpiricalDistribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            t: u32,
            count: u64,
            frequency: f64,
        }
        let c = &self.config;
        let entries: Vec<Entry> = self
            .counts
            .iter()
            .map(|(&t, &count)| Entry {
                t,
                count,
                frequency: count as f64 / self.total_trials as f64,
            })
            .collect();
        // no worker count: output is independent of it
        let mut map = serializer.serialize_map(Some(9))?;
        map.serialize_entry("scheme", &c.scheme)?;
        map.serialize_entry("n", &c.params.n())?;
        map.serialize_entry("m", &c.params.m())?;
        map.serialize_entry("k", &c.params.k())?;
        map.serialize_entry("seed", &c.seed)?;
        map.serialize_entry("total_trials", &self.total_trials)?;
        map.serialize_entry("repetition_event_count", &self.repetition_event_count)?;
        map.serialize_entry("counts", &entries)?;
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub total_variation_distance: f64,
    pub chi_square_statistic: f64,
    pub degrees_of_freedom: u32,
    pub max_abs_deviation: f64,
}

/// Compares sampled frequencies with an exact PMF for the same experiment.
///
/// The chi-square statistic pools adjacent support points (ascending `t`)
/// until each pooled bin expects at least 5 trials; a short trailing bin
/// is merged into its predecessor.
pub fn compare(emp: &EmpiricalDistribution, exact: &CoverageDistribution) -> Result<ComparisonReport> {
    if emp.config.params != *exact.params() || emp.config.scheme != exact.scheme() {
        return Err(Error::Mismatch(format!(
            "empirical {} {} vs exact {} {}",
            emp.config.scheme,
            emp.config.params,
            exact.scheme(),
            exact.params()
        )));
    }
    let trials = emp.total_trials as f64;
    let hi = exact.params().max_coverage();
    let mut tv = 0.0;
    let mut max_dev = 0.0f64;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let mut pending = (0.0, 0.0);
    for t in 1..=hi {
        let observed = emp.counts.get(&t).copied().unwrap_or(0) as f64;
        let p = exact.pmf(t).approx();
        let dev = (observed / trials - p).abs();
        tv += dev;
        max_dev = max_dev.max(dev);
        pending.0 += observed;
        pending.1 += p * trials;
        if pending.1 >= 5.0 {
            bins.push(pending);
            pending = (0.0, 0.0);
        }
    }
    if pending.0 > 0.0 || pending.1 > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += pending.0;
                last.1 += pending.1;
            }
            None => bins.push(pending),
        }
    }
    let chi_square_statistic = bins
        .iter()
        .map(|&(o, e)| {
            if e > 0.0 {
                (o - e) * (o - e) / e
            } else if o > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        })
        .sum();
    Ok(ComparisonReport {
        total_variation_distance: (tv / 2.0).min(1.0),
        chi_square_statistic,
        degrees_of_freedom: bins.len().saturating_sub(1) as u32,
        max_abs_deviation: max_dev,
    })
}
