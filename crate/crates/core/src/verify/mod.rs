//! Round trips enumerate -> realize -> extract, and the soundness sweep:
//! every arrangement extracted from a random polynomial must be admissible.

pub mod sample;

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::admissibility::{enumerate_admissible_with, is_admissible_with, AdmissibilityError, CondCMode};
use crate::arrangement::{extract_with, Arrangement, ExtractOptions};
use crate::config::SolverConfig;
use crate::poly::Polynomial;
use crate::realizer::{realize, RealizationResult, RealizeError};

/// Samples per independently seeded chunk of the sweep.
pub const CHUNK: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SoundnessViolation {
    pub arrangement: String,
    pub polynomial: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SoundnessReport {
    pub n: u32,
    pub s: u32,
    pub samples: u64,
    /// Samples with `n - 2m - s < 0`, where admissibility is not defined;
    /// they are counted but not checked.
    pub out_of_domain: u64,
    /// Arrangement text to number of samples that produced it.
    pub observed: BTreeMap<String, u64>,
    pub violations: Vec<SoundnessViolation>,
}

impl SoundnessReport {
    fn empty(n: u32, s: u32) -> Self {
        SoundnessReport {
            n,
            s,
            samples: 0,
            out_of_domain: 0,
            observed: BTreeMap::new(),
            violations: Vec::new(),
        }
    }

    /// Associative merge of two partial reports for the same `(n, s)`.
    pub fn merge(mut self, other: SoundnessReport) -> Self {
        self.samples += other.samples;
        self.out_of_domain += other.out_of_domain;
        for (k, v) in other.observed {
            *self.observed.entry(k).or_default() += v;
        }
        self.violations.extend(other.violations);
        self
    }
}

fn derived_seed(parts: &str) -> u64 {
    let digest = Sha256::digest(parts.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Run `f(0..count)` on up to `jobs` threads, results in index order.
pub fn map_jobs<T, F>(count: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(|| (0..count).into_par_iter().map(&f).collect());
        }
    }
    let _ = jobs;
    (0..count).map(f).collect()
}

fn sweep_chunk(n: u32, s: u32, chunk: u64, count: u64, seed: u64, mode: CondCMode) -> SoundnessReport {
    let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(&format!("{seed}:{n}:{s}:{chunk}")));
    let mut report = SoundnessReport::empty(n, s);
    let mut verdicts: HashMap<String, bool> = HashMap::new();
    for _ in 0..count {
        let p = Polynomial::Exact(sample::sample_polynomial(&mut rng, n as usize, s as usize));
        let ex = extract_with(&p, s, &ExtractOptions::default()).expect("exact extraction");
        let text = ex.arrangement.to_string();
        report.samples += 1;
        if ex.arrangement.rolle_count() < 0 {
            report.out_of_domain += 1;
            continue;
        }
        let ok = *verdicts
            .entry(text.clone())
            .or_insert_with(|| is_admissible_with(&ex.arrangement, mode).verdict);
        if !ok {
            report.violations.push(SoundnessViolation {
                arrangement: format!("{text} (m = {}, m' = {})", ex.arrangement.m, ex.arrangement.m_prime),
                polynomial: p.to_string(),
            });
        }
        *report.observed.entry(text).or_default() += 1;
    }
    report
}

/// Extract `samples` seeded random polynomials of degree `n` at order `s`
/// and check every arrangement for admissibility. The result depends only
/// on the seed, not on `jobs`.
pub fn soundness_sweep(n: u32, s: u32, samples: u64, seed: u64, mode: CondCMode, jobs: usize) -> SoundnessReport {
    let chunks = samples.div_ceil(CHUNK);
    map_jobs(chunks as usize, jobs, |c| {
        let c = c as u64;
        let count = CHUNK.min(samples - c * CHUNK);
        sweep_chunk(n, s, c, count, seed, mode)
    })
    .into_iter()
    .fold(SoundnessReport::empty(n, s), SoundnessReport::merge)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Realized,
    Failed,
}

#[derive(Debug, Clone)]
pub struct RoundtripRow {
    pub target: Arrangement,
    pub status: RowStatus,
    /// The witness on success, the best attempt on failure when there was one.
    pub result: Option<RealizationResult>,
    /// Arrangement of the witness, extracted again independently.
    pub reextracted: Option<String>,
    pub error: Option<String>,
    pub wall: Duration,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub n: u32,
    pub s: u32,
    pub m: u32,
    pub rows: Vec<RoundtripRow>,
    pub soundness: Option<SoundnessReport>,
}

impl VerificationReport {
    pub fn realized(&self) -> usize {
        self.rows.iter().filter(|r| r.status == RowStatus::Realized).count()
    }

    pub fn all_realized(&self) -> bool {
        self.realized() == self.rows.len()
    }

    pub fn soundness_violations(&self) -> usize {
        self.soundness.as_ref().map_or(0, |s| s.violations.len())
    }
}

/// Realize one target and re-extract its witness.
pub fn roundtrip_one(target: &Arrangement, cfg: &SolverConfig) -> RoundtripRow {
    let start = Instant::now();
    let outcome = realize(target, cfg);
    let wall = start.elapsed();
    let (result, error) = match outcome {
        Ok(r) => (Some(r), None),
        Err(RealizeError::MaxRestartsExceeded { best, .. }) if best.is_some() => {
            let msg = format!("no witness; best attempt achieved {}", best.as_ref().unwrap().achieved);
            (best.map(|b| *b), Some(msg))
        }
        Err(e) => (None, Some(e.to_string())),
    };
    let reextracted = result.as_ref().and_then(|r| {
        let opts = ExtractOptions {
            allow_ambiguity: !r.witness.is_exact(),
            refine_to: cfg.refine_to,
            cluster_tol: cfg.cluster_tol,
            eq_tol: cfg.eps_eq,
        };
        extract_with(&r.witness, target.s, &opts)
            .ok()
            .map(|e| e.arrangement.to_string())
    });
    let target_text = target.to_string();
    let status = match &result {
        Some(r) if r.success && reextracted.as_deref() == Some(target_text.as_str()) => RowStatus::Realized,
        _ => RowStatus::Failed,
    };
    RoundtripRow {
        target: target.clone(),
        status,
        result,
        reextracted,
        error,
        wall,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Random polynomials for the soundness sweep; 0 skips it.
    pub samples: u64,
    pub jobs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { samples: 0, jobs: 1 }
    }
}

/// Enumerate the admissible chains of `(n, s, m)`, realize each one and
/// re-extract the witness, then run the soundness sweep for `(n, s)`.
pub fn verify_roundtrip(
    n: u32,
    s: u32,
    m: u32,
    cfg: &SolverConfig,
    opts: VerifyOptions,
) -> Result<VerificationReport, AdmissibilityError> {
    let targets = enumerate_admissible_with(n, s, m, cfg.cond_c)?;
    let rows = map_jobs(targets.len(), opts.jobs, |i| roundtrip_one(&targets[i], cfg));
    let soundness =
        (opts.samples > 0).then(|| soundness_sweep(n, s, opts.samples, cfg.seed, cfg.cond_c, opts.jobs));
    Ok(VerificationReport {
        n,
        s,
        m,
        rows,
        soundness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_is_independent_of_jobs() {
        let a = soundness_sweep(4, 2, 2500, 9, CondCMode::HyperbolicOnly, 1);
        let b = soundness_sweep(4, 2, 2500, 9, CondCMode::HyperbolicOnly, 3);
        assert_eq!(a, b);
        assert_eq!(a.samples, 2500);
        assert!(a.violations.is_empty(), "{:?}", a.violations);
    }

    #[test]
    fn quadratic_roundtrip() {
        let report = verify_roundtrip(2, 1, 0, &SolverConfig::default(), VerifyOptions::default()).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert!(report.all_realized());
    }
}
