//! Fixed points of `tau`: damped iteration with re-projection, then
//! Nelder-Mead on `|tau(x) - x|^2` from several starts when it stalls.

use rand::Rng;
use serde::Serialize;

use super::plan::RealizationPlan;
use super::tau::{tau_map, SearchDomain};
use crate::config::SolverConfig;

#[derive(Debug, Clone, Serialize)]
pub struct FixedPoint {
    pub domain: SearchDomain,
    pub residual: f64,
    pub iterations: u32,
    pub evaluations: u32,
    pub stalled: bool,
}

impl FixedPoint {
    pub fn t_max(&self) -> f64 {
        self.domain.t_max()
    }
}

struct Objective<'a> {
    plan: &'a RealizationPlan,
    b: f64,
    v: Option<f64>,
    evals: u32,
}

impl Objective<'_> {
    fn step(&mut self, dom: &SearchDomain, damping: f64) -> (SearchDomain, f64) {
        self.evals += 1;
        let out = tau_map(self.plan, dom, self.b, self.v);
        let res = out.residual(dom);
        let mix = |x: &[f64], y: &[f64]| -> Vec<f64> {
            x.iter().zip(y).map(|(a, b)| (1.0 - damping) * a + damping * b).collect()
        };
        let mut next = SearchDomain {
            h: mix(&dom.h, &out.eta),
            t: mix(&dom.t, &out.zeta),
            n_box: dom.n_box,
        };
        next.project();
        (next, res)
    }

    fn value(&mut self, template: &SearchDomain, x: &[f64]) -> f64 {
        self.evals += 1;
        let dom = template.from_vec(x);
        let out = tau_map(self.plan, &dom, self.b, self.v);
        let dh = out.eta.iter().zip(&dom.h).map(|(a, b)| (a - b).powi(2));
        let dt = out.zeta.iter().zip(&dom.t).map(|(a, b)| (a - b).powi(2));
        // distance to the box counts, so the minimizer cannot hide outside it
        let outside: f64 = x.iter().zip(dom.to_vec()).map(|(a, b)| (a - b).powi(2)).sum();
        dh.chain(dt).sum::<f64>() + outside
    }

    fn residual(&mut self, dom: &SearchDomain) -> f64 {
        self.evals += 1;
        tau_map(self.plan, dom, self.b, self.v).residual(dom)
    }
}

fn damped(obj: &mut Objective, start: SearchDomain, cfg: &SolverConfig) -> (SearchDomain, f64, u32, bool) {
    let mut x = start;
    let mut best = (x.clone(), f64::INFINITY);
    let mut checkpoint = f64::INFINITY;
    for it in 0..cfg.max_iter {
        let (next, res) = obj.step(&x, cfg.damping);
        if res < best.1 {
            best = (x.clone(), res);
        }
        if res < cfg.eps_fp {
            return (best.0, best.1, it + 1, false);
        }
        if it % 50 == 49 {
            if best.1 > 0.5 * checkpoint {
                return (best.0, best.1, it + 1, true);
            }
            checkpoint = best.1;
        }
        x = next;
    }
    (best.0, best.1, cfg.max_iter, true)
}

/// Minimize `f` from `x0` with the Nelder-Mead simplex method.
pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    max_evals: u32,
    ftol: f64,
) -> (Vec<f64>, f64) {
    let d = x0.len();
    if d == 0 {
        let v = f(x0);
        return (Vec::new(), v);
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    let f0 = f(x0);
    simplex.push((x0.to_vec(), f0));
    for i in 0..d {
        let mut x = x0.to_vec();
        x[i] += if x[i] + step <= 1.0 { step } else { -step };
        let v = f(&x);
        simplex.push((x, v));
    }
    let mut evals = (d + 1) as u32;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if simplex[0].1 < ftol || (simplex[d].1 - simplex[0].1).abs() <= 1e-16 * simplex[0].1.abs() + 1e-300 {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|j| simplex[..d].iter().map(|p| p.0[j]).sum::<f64>() / d as f64)
            .collect();
        let along = |k: f64, worst: &[f64]| -> Vec<f64> {
            centroid.iter().zip(worst).map(|(c, w)| c + k * (c - w)).collect()
        };
        let worst = simplex[d].0.clone();
        let xr = along(1.0, &worst);
        let fr = f(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = along(2.0, &worst);
            let fe = f(&xe);
            evals += 1;
            simplex[d] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[d].1 {
                let xc = along(0.5, &worst);
                let fc = f(&xc);
                (xc, fc)
            } else {
                let xc = along(-0.5, &worst);
                let fc = f(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < simplex[d].1.min(fr) {
                simplex[d] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    p.0 = best.iter().zip(&p.0).map(|(b, x)| b + 0.5 * (x - b)).collect();
                    p.1 = f(&p.0);
                }
                evals += d as u32;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}

/// Search for a fixed point of `tau` at shift `b` starting from `start`;
/// `starts` random restarts are spent on Nelder-Mead once iteration stalls.
pub fn fixed_point_search<R: Rng>(
    plan: &RealizationPlan,
    cfg: &SolverConfig,
    b: f64,
    v: Option<f64>,
    start: SearchDomain,
    starts: u32,
    rng: &mut R,
) -> FixedPoint {
    let mut obj = Objective {
        plan,
        b,
        v,
        evals: 0,
    };
    let (dom, res, iterations, stalled) = damped(&mut obj, start, cfg);
    let mut best = (dom, res);
    if best.1 >= cfg.eps_fp {
        let ftol = cfg.eps_fp * cfg.eps_fp;
        for k in 0..starts.max(1) {
            let seed = if k == 0 {
                best.0.clone()
            } else {
                SearchDomain::random(plan, cfg.n_box, rng)
            };
            let template = seed.clone();
            let (x, _) = nelder_mead(
                |x| obj.value(&template, x),
                &seed.to_vec(),
                0.05,
                cfg.nm_max_evals,
                ftol,
            );
            let cand = template.from_vec(&x);
            // a few damped steps to settle onto the fixed point
            let (cand, cres, _, _) = damped(
                &mut obj,
                cand,
                &SolverConfig {
                    max_iter: 100,
                    ..cfg.clone()
                },
            );
            if cres < best.1 {
                best = (cand, cres);
            }
            if best.1 < cfg.eps_fp {
                break;
            }
        }
    }
    let residual = obj.residual(&best.0);
    FixedPoint {
        domain: best.0,
        residual,
        iterations,
        evaluations: obj.evals,
        stalled,
    }
}
