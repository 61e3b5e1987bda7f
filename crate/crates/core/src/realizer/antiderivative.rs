//! Candidates built from the derivative side: `Q` is laid out with the
//! target's multiplicities at random sorted locations, integrated `s`
//! times, and the integration constants are chosen so that `P` vanishes
//! at as many of the target's `P` positions as they can reach.
//! Chains whose structure sits mostly on `Q` (repeated roots of `Q`,
//! coincidences) are far easier to hit this way than through the family
//! of `tau`.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::arrangement::Arrangement;
use crate::poly::FloatPoly;

/// `j! / (j - i)!`
fn falling(j: usize, i: usize) -> f64 {
    (j - i + 1..=j).map(|k| k as f64).product()
}

/// Monic degree-`n` polynomial with the target's `Q` structure, and the
/// location drawn for every position of the chain.
pub fn antiderivative_candidate<R: Rng>(target: &Arrangement, n_box: f64, rng: &mut R) -> (FloatPoly, Vec<f64>) {
    let n = target.n as usize;
    let s = target.s as usize;
    let positions = target.positions();
    let mut locs: Vec<f64> = (0..positions.len()).map(|_| rng.gen::<f64>()).collect();
    locs.sort_by(f64::total_cmp);

    let mut q = FloatPoly::constant(1.0);
    for (pos, &a) in positions.iter().zip(&locs) {
        if pos.q > 0 {
            q = &q * &FloatPoly::linear_root(a).pow(pos.q);
        }
    }
    for _ in 0..target.m_prime {
        let re = rng.gen::<f64>();
        let im = 10f64.powf(rng.gen_range(-2.0..n_box.log10()));
        q = &q * &FloatPoly::from_ascending(vec![re * re + im * im, -2.0 * re, 1.0]);
    }

    // s-fold antiderivative scaled to be monic, lower s coefficients zero
    let mut high = vec![0.0; n + 1];
    let lead = falling(n, s);
    for (k, c) in q.coeffs().iter().enumerate() {
        high[k + s] = c * lead / falling(k + s, s);
    }

    // P^(i)(a) = 0 for i < min(p, s), coincidences first
    let mut conditions: Vec<(f64, usize)> = Vec::new();
    let mut order: Vec<usize> = (0..positions.len()).filter(|&i| positions[i].p > 0).collect();
    order.sort_by_key(|&i| (positions[i].q == 0, std::cmp::Reverse(positions[i].p)));
    for i in order {
        let reach = (positions[i].p as usize).min(s);
        if conditions.len() + reach > s {
            continue;
        }
        conditions.extend((0..reach).map(|d| (locs[i], d)));
    }

    let mut lower: Vec<f64> = (0..s).map(|_| rng.gen_range(-0.1..0.1)).collect();
    if !conditions.is_empty() {
        let rows = conditions.len();
        let mut a = DMatrix::zeros(rows, s);
        let mut r = DVector::zeros(rows);
        for (row, &(x, d)) in conditions.iter().enumerate() {
            let mut value = 0.0;
            for (j, c) in high.iter().enumerate().skip(d.max(s)) {
                value += c * falling(j, d) * x.powi((j - d) as i32);
            }
            for j in d..s {
                let coef = falling(j, d) * x.powi((j - d) as i32);
                a[(row, j)] = coef;
                value += coef * lower[j];
            }
            r[row] = -value;
        }
        if let Ok(delta) = a.svd(true, true).solve(&r, 1e-13) {
            for j in 0..s {
                lower[j] += delta[j];
            }
        }
    }
    high[..s].copy_from_slice(&lower);
    (FloatPoly::from_ascending(high), locs)
}
