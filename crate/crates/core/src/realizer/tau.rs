//! The search domain, the family of polynomials it parametrizes and the
//! self-map `tau` whose fixed points realize the target.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::plan::{Anchor, EtaRule, HVar, PhiRef, RealizationPlan};
use crate::poly::{roots_complex, ComplexRoot, FloatPoly};

/// A point `(h, t)`: `h` in the ordered unit simplex, `t` in `[0, N]^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchDomain {
    pub h: Vec<f64>,
    pub t: Vec<f64>,
    pub n_box: f64,
}

impl SearchDomain {
    /// Evenly spaced `h`, every `t_i = 1`.
    pub fn centered(plan: &RealizationPlan, n_box: f64) -> Self {
        let k = plan.h_len();
        SearchDomain {
            h: (0..k).map(|i| (i + 1) as f64 / (k + 1) as f64).collect(),
            t: vec![1.0; plan.free_pairs],
            n_box,
        }
    }

    /// Uniform on the domain.
    pub fn random<R: Rng>(plan: &RealizationPlan, n_box: f64, rng: &mut R) -> Self {
        let mut h: Vec<f64> = (0..plan.h_len()).map(|_| rng.gen::<f64>()).collect();
        h.sort_by(f64::total_cmp);
        SearchDomain {
            h,
            t: (0..plan.free_pairs).map(|_| rng.gen::<f64>() * n_box).collect(),
            n_box,
        }
    }

    /// Random point without the interleaving of the `g` among the `w`:
    /// the `w` stay sorted, every `g` is uniform on `[0, 1]` and every `t`
    /// log-uniform on `[1e-3, N]`. Not a point of the simplex, so it must
    /// not be projected.
    pub fn random_free<R: Rng>(plan: &RealizationPlan, n_box: f64, rng: &mut R) -> Self {
        let mut ws: Vec<f64> = (0..plan.w_count()).map(|_| rng.gen::<f64>()).collect();
        ws.sort_by(f64::total_cmp);
        let h = plan
            .layout
            .iter()
            .map(|var| match *var {
                HVar::W(j) => ws[j],
                HVar::G(_) => rng.gen::<f64>(),
            })
            .collect();
        let hi = n_box.log10();
        SearchDomain {
            h,
            t: (0..plan.free_pairs).map(|_| 10f64.powf(rng.gen_range(-3.0..hi))).collect(),
            n_box,
        }
    }

    /// Sort-and-clamp back into the domain.
    pub fn project(&mut self) {
        for x in &mut self.h {
            *x = if x.is_nan() { 0.5 } else { x.clamp(0.0, 1.0) };
        }
        self.h.sort_by(f64::total_cmp);
        for x in &mut self.t {
            *x = if x.is_nan() { 1.0 } else { x.clamp(0.0, self.n_box) };
        }
    }

    pub fn t_max(&self) -> f64 {
        self.t.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.h.iter().chain(&self.t).copied().collect()
    }

    pub fn from_vec(&self, x: &[f64]) -> Self {
        let k = self.h.len();
        let mut d = SearchDomain {
            h: x[..k].to_vec(),
            t: x[k..].to_vec(),
            n_box: self.n_box,
        };
        d.project();
        d
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TauOutput {
    pub eta: Vec<f64>,
    pub zeta: Vec<f64>,
    /// Sorted real parts of the roots of `Q` left after removing the far pairs.
    pub xi: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: f64,
    /// `t_i - zeta_i` before the absolute value, per component.
    pub subtrahend: Vec<f64>,
    /// How far a root of `Q` sits outside the convex hull of the roots of `P`.
    pub hull_excess: f64,
}

impl TauOutput {
    /// Max-norm of `tau(x) - x`.
    pub fn residual(&self, dom: &SearchDomain) -> f64 {
        let dh = self.eta.iter().zip(&dom.h).map(|(a, b)| (a - b).abs());
        let dt = self.zeta.iter().zip(&dom.t).map(|(a, b)| (a - b).abs());
        dh.chain(dt).fold(0.0, f64::max)
    }
}

/// `prod (x - w_j)^{m_j} * prod ((x - g_p)^2 + t_p^2) * (x^2 + v^2)^{m'}`,
/// monic. Without `v` the far pairs are left out.
pub fn build_family_polynomial(plan: &RealizationPlan, dom: &SearchDomain, v: Option<f64>) -> FloatPoly {
    let mut acc = FloatPoly::constant(1.0);
    for (k, var) in plan.layout.iter().enumerate() {
        let h = dom.h[k];
        let factor = match *var {
            HVar::W(j) => FloatPoly::linear_root(h).pow(plan.w_mults[j]),
            HVar::G(p) => {
                let t = dom.t[p];
                FloatPoly::from_ascending(vec![h * h + t * t, -2.0 * h, 1.0])
            }
        };
        acc = &acc * &factor;
    }
    if let Some(v) = v {
        let far = FloatPoly::from_ascending(vec![v * v, 0.0, 1.0]).pow(plan.far_pairs as u32);
        acc = &acc * &far;
    }
    acc
}

/// Roots of `P^(s)`, with the known roots `w_j` of multiplicity above `s`
/// divided out first so they come back exact.
fn derivative_roots(plan: &RealizationPlan, dom: &SearchDomain, v: Option<f64>) -> Vec<ComplexRoot> {
    let s = plan.target.s as usize;
    let p = build_family_polynomial(plan, dom, v);
    let mut q = p.nth_derivative(s).expect("s below degree");
    let mut known = Vec::new();
    for (j, &mult) in plan.w_mults.iter().enumerate() {
        if mult as usize > s {
            let w = dom.h[plan.w_index(j)];
            for _ in 0..(mult as usize - s) {
                q = q.div_rem(&FloatPoly::linear_root(w)).0;
                known.push(ComplexRoot { re: w, im: 0.0 });
            }
        }
    }
    let mut roots = roots_complex(&q);
    roots.extend(known);
    roots
}

/// Evaluate `tau` at `dom` with shift `b`, and with the far pairs at height
/// `v` when the target has any.
pub fn tau_map(plan: &RealizationPlan, dom: &SearchDomain, b: f64, v: Option<f64>) -> TauOutput {
    let mut roots = derivative_roots(plan, dom, v);
    let far = if v.is_some() { plan.far_pairs } else { 0 };
    if far > 0 {
        roots.sort_by(|a, b| b.im.abs().total_cmp(&a.im.abs()));
        roots.drain(..2 * far);
    }
    let mut xi: Vec<f64> = roots.iter().map(|r| r.re).collect();
    xi.sort_by(f64::total_cmp);
    let mut ims: Vec<f64> = roots.iter().filter(|r| r.im >= 0.0).map(|r| r.im).collect();
    ims.sort_by(|a, b| b.total_cmp(a));
    let mf = plan.free_pairs;
    let mut theta: Vec<f64> = ims.into_iter().take(mf).collect();
    theta.resize(mf, 0.0);
    theta.sort_by(f64::total_cmp);

    let mut lo = dom.h.iter().copied().fold(f64::INFINITY, f64::min);
    let mut hi = dom.h.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if far > 0 {
        lo = lo.min(0.0);
        hi = hi.max(0.0);
    }
    let mut hull_excess = xi
        .iter()
        .map(|x| (lo - x).max(x - hi))
        .fold(0.0, f64::max);
    if far == 0 {
        hull_excess = hull_excess.max(theta.iter().copied().fold(0.0, f64::max) - dom.t_max());
    }

    let slot_value = |k: usize| xi.get(k).copied().unwrap_or(0.5);
    let anchor = |a: Anchor| match a {
        Anchor::Zero => 0.0,
        Anchor::One => 1.0,
        Anchor::Slot(k) => slot_value(k),
    };
    let mut eta: Vec<f64> = plan
        .eta_rules
        .iter()
        .map(|rule| match *rule {
            EtaRule::Slot(k) => slot_value(k),
            EtaRule::Spaced {
                left,
                right,
                index,
                count,
            } => {
                let (a, c) = (anchor(left), anchor(right));
                a + (index + 1) as f64 * (c - a) / count as f64
            }
        })
        .map(|x| x.clamp(0.0, 1.0))
        .collect();
    eta.sort_by(f64::total_cmp);

    let phi: f64 = plan
        .phi_terms
        .iter()
        .map(|term| {
            let r = match term.reference {
                PhiRef::Slot(k) => slot_value(k),
                PhiRef::W(j) => dom.h[plan.w_index(j)],
            };
            (slot_value(term.slot) - r - term.sign * b).abs()
        })
        .sum();

    let (zeta, subtrahend) = if mf == 0 {
        (Vec::new(), Vec::new())
    } else {
        let m = mf as f64;
        let prod: f64 = dom.t.iter().product();
        let theta_term = theta.iter().sum::<f64>() / (3.0 * m);
        let box_term = (prod - 1.0).abs() / (3.0 * (dom.n_box + 1.0).powi(mf as i32));
        let phi_term = phi / (12.0 * m);
        let sub: Vec<f64> = dom
            .t
            .iter()
            .map(|&t| theta_term + t * box_term + t * phi_term)
            .collect();
        let zeta = dom.t.iter().zip(&sub).map(|(t, s)| (t - s).abs()).collect();
        (zeta, sub)
    };

    TauOutput {
        eta,
        zeta,
        xi,
        theta,
        phi,
        subtrahend,
        hull_excess,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrangement::{parse_arrangement, rolle_assignments, Shape};

    fn plan(text: &str, n: u32, s: u32, m: u32, mp: u32) -> RealizationPlan {
        let arr = parse_arrangement(text, &Shape::full(n, s, m, mp)).unwrap();
        let assign = rolle_assignments(&arr).into_iter().next().unwrap();
        RealizationPlan::new(&arr, &assign)
    }

    #[test]
    fn family_product() {
        // x (x - 1) ((x - 1/2)^2 + 1)
        let p = plan("P < Q < Q < Q < P", 4, 1, 1, 0);
        let dom = SearchDomain {
            h: vec![0.0, 0.5, 1.0],
            t: vec![1.0],
            n_box: 2.0,
        };
        let f = build_family_polynomial(&p, &dom, None);
        let expect = [0.0, -1.25, 2.25, -2.0, 1.0];
        for (a, b) in f.coeffs().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15, "{f}");
        }
    }

    #[test]
    fn quadratic_fixed_point() {
        let p = plan("P < Q < P", 2, 1, 0, 0);
        let dom = SearchDomain {
            h: vec![0.25, 0.75],
            t: vec![],
            n_box: 2.0,
        };
        let out = tau_map(&p, &dom, 0.0, None);
        assert!(out.residual(&dom) < 1e-15);
        assert!(out.zeta.is_empty());
    }

    #[test]
    fn double_root_fixed_point() {
        let p = plan("P^2Q", 2, 1, 0, 0);
        let dom = SearchDomain {
            h: vec![0.5],
            t: vec![],
            n_box: 2.0,
        };
        assert_eq!(tau_map(&p, &dom, 0.0, None).residual(&dom), 0.0);
    }

    #[test]
    fn range_on_random_points() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let p = plan("P < Q < Q", 3, 1, 1, 0);
        for _ in 0..500 {
            let dom = SearchDomain::random(&p, 2.0, &mut rng);
            let out = tau_map(&p, &dom, 0.0, None);
            assert!(out.eta.windows(2).all(|w| w[0] <= w[1]));
            assert!(out.eta.iter().all(|x| (0.0..=1.0).contains(x)));
            assert!(out.zeta.iter().all(|z| (0.0..=2.0).contains(z)));
            assert!(out.hull_excess < 1e-9);
            assert!(out.phi <= 4.0);
        }
    }
}
