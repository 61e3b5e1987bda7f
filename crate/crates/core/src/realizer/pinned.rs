//! Equalities a witness must satisfy exactly: at every position holding a
//! multiple root of `P` or `Q`, or a common root, the derivatives
//! `P^(i)` vanish for the pinned orders `i`. They are linear in the
//! coefficients once the locations are fixed, which is what makes exact
//! certification possible.

use nalgebra::{DMatrix, DVector};
use num_traits::{One, Signed, Zero};

use crate::arrangement::{Arrangement, Position};
use crate::poly::{dyadic, rational_to_f64, roots_complex, FloatPoly, RatPoly, Rational};

/// Bits of the dyadic grid that locations and free coefficients are rounded to.
const GRID_BITS: u32 = 44;

#[derive(Debug, Clone)]
pub struct Pin {
    pub position: usize,
    pub p: u32,
    pub q: u32,
    pub orders: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct PinnedSystem {
    n: usize,
    s: usize,
    pub pins: Vec<Pin>,
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn binom_exact(n: usize, k: usize) -> Rational {
    let mut acc = Rational::one();
    for i in 0..k {
        acc = acc * Rational::from_integer(((n - i) as i64).into()) / Rational::from_integer(((i + 1) as i64).into());
    }
    acc
}

impl PinnedSystem {
    pub fn new(target: &Arrangement) -> Self {
        let s = target.s as usize;
        let pins = target
            .positions()
            .iter()
            .enumerate()
            .filter(|(_, pos)| pos.p >= 2 || pos.q >= 2 || (pos.p >= 1 && pos.q >= 1))
            .map(|(i, pos)| {
                let mut orders: Vec<usize> = (0..pos.p as usize).chain(s..s + pos.q as usize).collect();
                orders.sort_unstable();
                orders.dedup();
                Pin {
                    position: i,
                    p: pos.p,
                    q: pos.q,
                    orders,
                }
            })
            .collect();
        PinnedSystem {
            n: target.n as usize,
            s,
            pins,
        }
    }

    pub fn equation_count(&self) -> usize {
        self.pins.iter().map(|p| p.orders.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.pins.is_empty()
    }

    /// `P^(i)(a) / i!` for monic `P` with lower coefficients `c`.
    fn scaled_derivative(&self, c: &[f64], i: usize, a: f64) -> f64 {
        let n = self.n;
        let mut acc = binom(n, i);
        for j in (i..n).rev() {
            acc = acc * a + binom(j, i) * c[j];
        }
        acc
    }

    pub fn residuals(&self, c: &[f64], locs: &[f64]) -> Vec<f64> {
        self.pins
            .iter()
            .zip(locs)
            .flat_map(|(pin, &a)| pin.orders.iter().map(move |&i| self.scaled_derivative(c, i, a)))
            .collect()
    }

    fn jacobian(&self, c: &[f64], locs: &[f64]) -> DMatrix<f64> {
        let rows = self.equation_count();
        let k = self.pins.len();
        let mut jac = DMatrix::zeros(rows, self.n + k);
        let mut r = 0;
        for (pk, (pin, &a)) in self.pins.iter().zip(locs).enumerate() {
            for &i in &pin.orders {
                for j in i..self.n {
                    jac[(r, j)] = binom(j, i) * a.powi((j - i) as i32);
                }
                jac[(r, self.n + pk)] = (i + 1) as f64 * self.scaled_derivative(c, i + 1, a);
                r += 1;
            }
        }
        jac
    }

    /// Gauss-Newton with minimum-norm steps from `(c, locs)`; returns the
    /// final point and its max residual.
    pub fn project(&self, c: &[f64], locs: &[f64]) -> (Vec<f64>, Vec<f64>, f64) {
        let mut c = c.to_vec();
        let mut locs = locs.to_vec();
        let norm = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut res = norm(&self.residuals(&c, &locs));
        for _ in 0..60 {
            if res < 1e-15 {
                break;
            }
            let e = DVector::from_vec(self.residuals(&c, &locs));
            let jac = self.jacobian(&c, &locs);
            let svd = jac.svd(true, true);
            let Ok(delta) = svd.solve(&e, 1e-13) else { break };
            let mut alpha = 1.0;
            let mut improved = false;
            while alpha > 1e-4 {
                let nc: Vec<f64> = c.iter().enumerate().map(|(j, x)| x - alpha * delta[j]).collect();
                let nl: Vec<f64> = locs
                    .iter()
                    .enumerate()
                    .map(|(k, x)| x - alpha * delta[self.n + k])
                    .collect();
                let nr = norm(&self.residuals(&nc, &nl));
                if nr < res {
                    c = nc;
                    locs = nl;
                    res = nr;
                    improved = true;
                    break;
                }
                alpha *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (c, locs, res)
    }

    /// Chain of the monic polynomial with lower coefficients `c`, read in
    /// floating point with the pinned roots divided out first, so that only
    /// simple roots are located numerically. A cheap filter ahead of
    /// [`PinnedSystem::certify`]; `None` when the cofactors have nonreal
    /// looking or colliding roots that make the reading unreliable.
    pub fn float_chain(&self, c: &[f64], locs: &[f64]) -> Option<Vec<Position>> {
        let mut coeffs = c.to_vec();
        coeffs.push(1.0);
        let p = FloatPoly::from_ascending(coeffs);
        let mut q = p.nth_derivative(self.s).ok()?;
        let mut pc = p;
        for (pin, &a) in self.pins.iter().zip(locs) {
            let lin = FloatPoly::linear_root(a);
            for _ in 0..pin.p {
                pc = pc.div_rem(&lin).0;
            }
            for _ in 0..pin.q {
                q = q.div_rem(&lin).0;
            }
        }
        let real = |f: &FloatPoly| -> Vec<f64> {
            roots_complex(f).into_iter().filter(|r| r.im == 0.0).map(|r| r.re).collect()
        };
        let mut points: Vec<(f64, Position)> = self
            .pins
            .iter()
            .zip(locs)
            .map(|(pin, &a)| (a, Position::new(pin.p, pin.q)))
            .collect();
        points.extend(real(&pc).into_iter().map(|x| (x, Position::new(1, 0))));
        points.extend(real(&q).into_iter().map(|x| (x, Position::new(0, 1))));
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        let scale = points.iter().map(|(x, _)| x.abs()).fold(1.0, f64::max);
        if points.windows(2).any(|w| w[1].0 - w[0].0 < 1e-9 * scale) {
            return None;
        }
        Some(points.into_iter().map(|(_, pos)| pos).collect())
    }

    /// Round the locations to a dyadic grid and solve the pinned equations
    /// exactly for the coefficients, keeping the free ones at their rounded
    /// float values. `None` when the rounded system is inconsistent.
    pub fn certify(&self, c: &[f64], locs: &[f64]) -> Option<RatPoly> {
        let n = self.n;
        let exact_locs: Vec<Rational> = locs.iter().map(|&a| dyadic(a, GRID_BITS)).collect();
        // rows [A | rhs] of A c = rhs
        let mut rows: Vec<(Vec<Rational>, Rational)> = Vec::new();
        for (pin, a) in self.pins.iter().zip(&exact_locs) {
            let powers: Vec<Rational> = std::iter::successors(Some(Rational::one()), |x| Some(x * a))
                .take(n + 1)
                .collect();
            for &i in &pin.orders {
                let coeffs = (0..n)
                    .map(|j| {
                        if j < i {
                            Rational::zero()
                        } else {
                            binom_exact(j, i) * &powers[j - i]
                        }
                    })
                    .collect();
                rows.push((coeffs, -(binom_exact(n, i) * &powers[n - i])));
            }
        }
        let mut pivots: Vec<(usize, Vec<Rational>, Rational)> = Vec::new();
        for (mut row, mut rhs) in rows {
            let scale = row.iter().map(|x| rational_to_f64(&x.abs())).fold(0.0, f64::max);
            for (col, prow, prhs) in &pivots {
                if !row[*col].is_zero() {
                    let f = row[*col].clone();
                    for j in 0..n {
                        row[j] -= &f * &prow[j];
                    }
                    rhs -= &f * prhs;
                }
            }
            let best = (0..n)
                .filter(|j| !row[*j].is_zero())
                .max_by(|&x, &y| rational_to_f64(&row[x].abs()).total_cmp(&rational_to_f64(&row[y].abs())));
            let Some(col) = best else {
                if rhs.is_zero() {
                    continue;
                }
                return None;
            };
            let piv = row[col].clone();
            if rational_to_f64(&piv.abs()) < 1e-9 * scale {
                // dependent in floats but not exactly: the locations are not on the grid
                return None;
            }
            for x in row.iter_mut() {
                *x /= &piv;
            }
            rhs /= &piv;
            for (_, prow, prhs) in pivots.iter_mut() {
                if !prow[col].is_zero() {
                    let f = prow[col].clone();
                    for j in 0..n {
                        prow[j] -= &f * &row[j];
                    }
                    *prhs -= &f * &rhs;
                }
            }
            pivots.push((col, row, rhs));
        }
        let mut coeffs: Vec<Rational> = c.iter().map(|&x| dyadic(x, GRID_BITS)).collect();
        for (col, _, _) in &pivots {
            coeffs[*col] = Rational::zero();
        }
        for (col, prow, prhs) in &pivots {
            let mut v = prhs.clone();
            for j in 0..n {
                if j != *col && !prow[j].is_zero() {
                    v -= &prow[j] * &coeffs[j];
                }
            }
            coeffs[*col] = v;
        }
        coeffs.push(Rational::one());
        Some(RatPoly::from_ascending(coeffs))
    }
}

/// Lower coefficients of a monic float polynomial.
pub fn monic_lower(p: &FloatPoly) -> Vec<f64> {
    let lead = p.leading();
    let n = p.degree();
    p.coeffs()[..n].iter().map(|c| c / lead).collect()
}
