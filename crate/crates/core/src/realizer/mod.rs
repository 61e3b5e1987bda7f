//! Numerical realization of an admissible arrangement.
//!
//! The target fixes a role for every root of `P` and `Q`. A point of the
//! search domain gives a polynomial of the family
//! `prod (x - w_j)^{m_j} prod ((x - g_p)^2 + t_p^2)`, and `tau` moves the
//! point towards one whose roots sit where the target wants them. Fixed
//! points are found by damped iteration and Nelder-Mead, continued in the
//! shift `b` and the far height `v`, and every candidate is snapped onto
//! the pinned equalities and certified by exact extraction.

pub mod antiderivative;
pub mod pinned;
pub mod plan;
pub mod solve;
pub mod tau;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::admissibility::{is_admissible_with, AdmissibilityReport};
use crate::arrangement::{extract_with, Arrangement, ExtractOptions, RolleAssignment};
use crate::config::SolverConfig;
use crate::poly::{FloatPoly, Polynomial, RatPoly};
use antiderivative::antiderivative_candidate;

pub use pinned::PinnedSystem;
pub use plan::RealizationPlan;
pub use solve::{fixed_point_search, FixedPoint};
pub use tau::{build_family_polynomial, tau_map, SearchDomain, TauOutput};

#[derive(Debug, thiserror::Error)]
pub enum RealizeError {
    #[error("target {target} is not admissible")]
    Inadmissible {
        target: String,
        report: AdmissibilityReport,
    },
    #[error("fixed-point solve needs a hyperbolic derivative (m' = 0), got m' = {0}")]
    NeedsHyperbolicDerivative(u32),
    #[error("no witness for {target} after {attempts} attempts, {rejected} of them rejected in floating point ({schedule}); best achieved {best_achieved}")]
    MaxRestartsExceeded {
        target: String,
        attempts: u32,
        rejected: u32,
        schedule: String,
        best_achieved: String,
        best: Option<Box<RealizationResult>>,
    },
}

/// Which stage of the search produced the witness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RealizationPath {
    FixedPoint,
    Continuation,
    Split,
    Multistart,
    Antiderivative,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceEvent {
    pub stage: &'static str,
    pub b: f64,
    pub v: Option<f64>,
    pub fixed_point_residual: f64,
    pub t_max: f64,
    pub evaluations: u32,
    pub achieved: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RealizationResult {
    pub target: Arrangement,
    pub witness: Polynomial,
    pub achieved: Arrangement,
    /// Max violation of the pinned equalities by the witness; zero for an
    /// exactly certified witness.
    pub residual: f64,
    /// Max-norm of `tau(x) - x` at the domain point the witness came from;
    /// absent for witnesses built from the derivative side.
    pub fixed_point_residual: Option<f64>,
    /// Smallest distance between consecutive positions of the witness.
    pub min_gap: f64,
    pub b: f64,
    pub v: Option<f64>,
    pub path: RealizationPath,
    pub trace: Vec<TraceEvent>,
    pub success: bool,
}

impl RealizationResult {
    /// Coefficients leading first, 17 significant digits.
    pub fn witness_decimals(&self) -> Vec<String> {
        self.witness
            .coeffs_leading_f64()
            .iter()
            .map(|c| format!("{c:.16e}"))
            .collect()
    }
}

struct Candidate {
    witness: Polynomial,
    achieved: Arrangement,
    residual: f64,
    min_gap: f64,
}

struct Search<'a> {
    plan: RealizationPlan,
    system: PinnedSystem,
    cfg: &'a SolverConfig,
    opts: ExtractOptions,
    trace: Vec<TraceEvent>,
    attempts: u32,
    /// Candidates turned away by the float reading before certification.
    rejected: u32,
    best: Option<RealizationResult>,
}

/// Seed for one target, independent of the order targets are processed in.
pub fn target_seed(seed: u64, target: &Arrangement) -> u64 {
    let digest = Sha256::digest(target.to_string().as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    seed ^ u64::from_le_bytes(bytes)
}

impl<'a> Search<'a> {
    fn new(target: &Arrangement, assign: &RolleAssignment, cfg: &'a SolverConfig) -> Self {
        Search {
            plan: RealizationPlan::new(target, assign),
            system: PinnedSystem::new(target),
            cfg,
            opts: ExtractOptions {
                refine_to: cfg.refine_to,
                cluster_tol: cfg.cluster_tol,
                eq_tol: cfg.eps_eq,
                allow_ambiguity: false,
            },
            trace: Vec::new(),
            attempts: 0,
            rejected: 0,
            best: None,
        }
    }

    fn initial_locations(&self, dom: &SearchDomain, v: Option<f64>) -> Vec<f64> {
        let xi = tau_map(&self.plan, dom, 0.0, v).xi;
        self.system
            .pins
            .iter()
            .map(|pin| {
                if let Some(j) = self.plan.w_positions.iter().position(|&p| p == pin.position) {
                    return dom.h[self.plan.w_index(j)];
                }
                let at: Vec<f64> = self
                    .plan
                    .slots
                    .iter()
                    .enumerate()
                    .filter(|(_, r)| r.position == pin.position)
                    .filter_map(|(k, _)| xi.get(k).copied())
                    .collect();
                if at.is_empty() {
                    0.5
                } else {
                    at.iter().sum::<f64>() / at.len() as f64
                }
            })
            .collect()
    }

    fn candidate(&mut self, dom: &SearchDomain, v: Option<f64>) -> Option<Candidate> {
        let family = build_family_polynomial(&self.plan, dom, v);
        let guess = if self.system.is_empty() {
            Vec::new()
        } else {
            self.initial_locations(dom, v)
        };
        self.candidate_from(&family, &guess)
    }

    /// Snap `start` onto the pinned equalities from the pin locations
    /// `guess`, certify and extract.
    fn candidate_from(&mut self, start: &FloatPoly, guess: &[f64]) -> Option<Candidate> {
        self.attempts += 1;
        let s = self.plan.target.s;
        let lower = pinned::monic_lower(start);
        let (c, locs, res) = if self.system.is_empty() {
            (lower, Vec::new(), 0.0)
        } else {
            self.system.project(&lower, guess)
        };
        if !(res < 1e-9) || c.iter().any(|x| !x.is_finite()) {
            return None;
        }
        if let Some(chain) = self.system.float_chain(&c, &locs) {
            if chain.as_slice() != self.plan.target.positions() {
                self.rejected += 1;
                let t = &self.plan.target;
                let p_total: u32 = chain.iter().map(|x| x.p).sum();
                let q_total: u32 = chain.iter().map(|x| x.q).sum();
                let achieved = Arrangement::unchecked(
                    t.n,
                    t.s,
                    (t.n - p_total) / 2,
                    (t.n - t.s - q_total) / 2,
                    chain,
                );
                let mut coeffs = c;
                coeffs.push(1.0);
                return Some(Candidate {
                    witness: Polynomial::Float(FloatPoly::from_ascending(coeffs)),
                    achieved,
                    residual: res,
                    min_gap: 0.0,
                });
            }
        }
        if let Some(exact) = self.system.certify(&c, &locs) {
            let residual = self.exact_residual(&exact, &locs);
            let witness = Polynomial::Exact(exact);
            if let Ok(ex) = extract_with(&witness, s, &self.opts) {
                return Some(Candidate {
                    min_gap: min_gap(&ex.locations),
                    witness,
                    achieved: ex.arrangement,
                    residual,
                });
            }
        }
        let mut coeffs = c;
        coeffs.push(1.0);
        let witness = Polynomial::Float(FloatPoly::from_ascending(coeffs));
        let opts = ExtractOptions {
            allow_ambiguity: true,
            ..self.opts
        };
        let ex = extract_with(&witness, s, &opts).ok()?;
        Some(Candidate {
            min_gap: min_gap(&ex.locations),
            witness,
            achieved: ex.arrangement,
            residual: res,
        })
    }

    fn exact_residual(&self, p: &RatPoly, locs: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (pin, &a) in self.system.pins.iter().zip(locs) {
            let a = crate::poly::dyadic(a, 44);
            for &i in &pin.orders {
                let d = p.nth_derivative(i).expect("order below degree");
                worst = worst.max(crate::poly::rational_to_f64(&d.eval(&a)).abs());
            }
        }
        worst
    }

    /// Try the polynomial of `dom`; keeps the best failure for diagnostics.
    fn try_point(
        &mut self,
        dom: &SearchDomain,
        b: f64,
        v: Option<f64>,
        path: RealizationPath,
    ) -> Option<RealizationResult> {
        let cand = self.candidate(dom, v)?;
        let fpr = tau_map(&self.plan, dom, b, v).residual(dom);
        self.judge(cand, Some(fpr), b, v, path)
    }

    /// Try a polynomial built from the derivative side.
    fn try_antiderivative<R: Rng>(&mut self, rng: &mut R) -> Option<RealizationResult> {
        let (start, locs) = antiderivative_candidate(&self.plan.target, self.cfg.n_box, rng);
        let guess: Vec<f64> = self.system.pins.iter().map(|pin| locs[pin.position]).collect();
        let cand = self.candidate_from(&start, &guess)?;
        self.judge(cand, None, 0.0, None, RealizationPath::Antiderivative)
    }

    fn judge(
        &mut self,
        cand: Candidate,
        fpr: Option<f64>,
        b: f64,
        v: Option<f64>,
        path: RealizationPath,
    ) -> Option<RealizationResult> {
        let success = cand.achieved == self.plan.target
            && cand.residual < self.cfg.eps_fp
            && cand.min_gap > self.cfg.eps_eq;
        let result = RealizationResult {
            target: self.plan.target.clone(),
            witness: cand.witness,
            achieved: cand.achieved,
            residual: cand.residual,
            fixed_point_residual: fpr,
            min_gap: cand.min_gap,
            b,
            v,
            path,
            trace: Vec::new(),
            success,
        };
        if success {
            return Some(result);
        }
        if self.best.as_ref().is_none_or(|b| result.residual < b.residual) {
            self.best = Some(result);
        }
        None
    }

    fn finish(mut self, mut result: RealizationResult) -> RealizationResult {
        result.trace = std::mem::take(&mut self.trace);
        result
    }

    fn log(&mut self, stage: &'static str, b: f64, v: Option<f64>, fp: &FixedPoint) {
        self.trace.push(TraceEvent {
            stage,
            b,
            v,
            fixed_point_residual: fp.residual,
            t_max: fp.t_max(),
            evaluations: fp.evaluations,
            achieved: None,
        });
    }

    fn fail(mut self, schedule: String) -> RealizeError {
        let target = self.plan.target.to_string();
        let best_achieved = self
            .best
            .as_ref()
            .map_or_else(|| "none".to_string(), |b| b.achieved.to_string());
        let best = self.best.take().map(|mut b| {
            b.trace = std::mem::take(&mut self.trace);
            Box::new(b)
        });
        RealizeError::MaxRestartsExceeded {
            target,
            attempts: self.attempts,
            rejected: self.rejected,
            schedule,
            best_achieved,
            best,
        }
    }
}

fn min_gap(locations: &[f64]) -> f64 {
    locations
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min)
}

fn admissible_assignment(target: &Arrangement, cfg: &SolverConfig) -> Result<RolleAssignment, RealizeError> {
    let report = is_admissible_with(target, cfg.cond_c);
    match report.rolle_witness.clone() {
        Some(a) if report.verdict => Ok(a),
        _ => Err(RealizeError::Inadmissible {
            target: target.to_string(),
            report,
        }),
    }
}

/// Fixed point of `tau` for a target whose derivative is hyperbolic
/// (`m' = 0`), at `b = 0` when least generic and at the first scheduled
/// shift otherwise, snapped onto the pinned equalities.
pub fn solve_fixed_point(
    target: &Arrangement,
    assign: &RolleAssignment,
    cfg: &SolverConfig,
) -> Result<RealizationResult, RealizeError> {
    if target.m_prime > 0 {
        return Err(RealizeError::NeedsHyperbolicDerivative(target.m_prime));
    }
    let mut search = Search::new(target, assign, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(target_seed(cfg.seed, target));
    let b = if search.plan.least_generic {
        0.0
    } else {
        cfg.b_schedule.first().copied().unwrap_or(0.0)
    };
    let start = SearchDomain::centered(&search.plan, cfg.n_box);
    let fp = fixed_point_search(&search.plan, cfg, b, None, start, cfg.multistart, &mut rng);
    search.log("fixed-point", b, None, &fp);
    match search.try_point(&fp.domain, b, None, RealizationPath::FixedPoint) {
        Some(r) => Ok(search.finish(r)),
        None => Err(search.fail(format!("b = {b}"))),
    }
}

/// Find a polynomial whose arrangement is `target`.
///
/// Far pairs are handled outermost (each `v` of the schedule), then the
/// shift `b` for chains that are not least generic, then the imaginary
/// parts are reopened when the fixed point collapses onto `t = 0`, and
/// last random restarts.
pub fn realize(target: &Arrangement, cfg: &SolverConfig) -> Result<RealizationResult, RealizeError> {
    let assign = admissible_assignment(target, cfg)?;
    let mut search = Search::new(target, &assign, cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(target_seed(cfg.seed, target));
    let vs: Vec<Option<f64>> = if search.plan.far_pairs > 0 {
        cfg.v_schedule.iter().map(|k| Some(k * cfg.n_box)).collect()
    } else {
        vec![None]
    };
    let bs: Vec<f64> = if search.plan.least_generic || cfg.b_schedule.is_empty() {
        vec![0.0]
    } else {
        cfg.b_schedule.clone()
    };

    let mut warm = SearchDomain::centered(&search.plan, cfg.n_box);
    let mut first = true;
    for &v in &vs {
        for &b in &bs {
            let starts = if first { cfg.multistart.min(8) } else { 1 };
            first = false;
            let fp = fixed_point_search(&search.plan, cfg, b, v, warm.clone(), starts, &mut rng);
            let stage = if bs.len() > 1 || vs.len() > 1 { "continuation" } else { "fixed-point" };
            search.log(stage, b, v, &fp);
            warm = fp.domain.clone();
            let path = if stage == "continuation" {
                RealizationPath::Continuation
            } else {
                RealizationPath::FixedPoint
            };
            if let Some(r) = search.try_point(&fp.domain, b, v, path) {
                return Ok(search.finish(r));
            }
            if search.plan.free_pairs > 0 && fp.t_max() <= cfg.t_floor.max(1e-3) {
                for &t0 in &cfg.split_schedule {
                    let mut dom = fp.domain.clone();
                    for t in dom.t.iter_mut() {
                        *t = t.max(t0);
                    }
                    if let Some(r) = search.try_point(&dom, b, v, RealizationPath::Split) {
                        return Ok(search.finish(r));
                    }
                }
            }
        }
    }

    for _ in 0..cfg.restarts {
        let mut dom = SearchDomain::random(&search.plan, cfg.n_box, &mut rng);
        for t in dom.t.iter_mut() {
            *t = 10f64.powf(rng.gen_range(-3.0..0.0));
        }
        let free = SearchDomain::random_free(&search.plan, cfg.n_box, &mut rng);
        for &v in &vs {
            for d in [&dom, &free] {
                if let Some(r) = search.try_point(d, bs[0], v, RealizationPath::Multistart) {
                    return Ok(search.finish(r));
                }
            }
        }
        for _ in 0..3 {
            if let Some(r) = search.try_antiderivative(&mut rng) {
                return Ok(search.finish(r));
            }
        }
    }

    let schedule = format!(
        "v = {:?}, b = {:?}, split = {:?}, restarts = {}",
        vs.iter().flatten().collect::<Vec<_>>(),
        bs,
        cfg.split_schedule,
        cfg.restarts
    );
    Err(search.fail(schedule))
}
