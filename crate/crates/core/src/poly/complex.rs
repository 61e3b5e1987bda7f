//! All complex roots of a float polynomial via companion-matrix eigenvalues,
//! Newton polishing, and conjugate pairing.

use nalgebra::{Complex, DMatrix, Schur};
use serde::{Deserialize, Serialize};

use super::FloatPoly;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexRoot {
    pub re: f64,
    pub im: f64,
}

impl ComplexRoot {
    fn dist(&self, other: &ComplexRoot) -> f64 {
        (self.re - other.re).hypot(self.im - other.im)
    }
}

fn horner_complex(coeffs: &[f64], z: Complex<f64>) -> (Complex<f64>, Complex<f64>) {
    // value and derivative
    let mut p = Complex::new(0.0, 0.0);
    let mut dp = Complex::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + Complex::new(c, 0.0);
    }
    (p, dp)
}

fn polish(coeffs: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    let (mut pz, _) = horner_complex(coeffs, z);
    for _ in 0..6 {
        let (_, dpz) = horner_complex(coeffs, z);
        if dpz.norm() == 0.0 || pz.norm() == 0.0 {
            break;
        }
        let cand = z - pz / dpz;
        let (pc, _) = horner_complex(coeffs, cand);
        if !(pc.norm() < pz.norm()) {
            break;
        }
        z = cand;
        pz = pc;
    }
    z
}

/// Every complex root (with multiplicity, `degree` of them), conjugate
/// symmetric: non-real roots come in exact `re ± i·im` pairs.
/// Sorted by real part, then imaginary part.
pub fn roots_complex(p: &FloatPoly) -> Vec<ComplexRoot> {
    let n = p.degree();
    if n == 0 {
        return Vec::new();
    }
    let mut coeffs: Vec<f64> = p.coeffs().to_vec();
    // Roots at zero are peeled off exactly.
    let zeros = coeffs.iter().take_while(|c| **c == 0.0).count();
    coeffs.drain(..zeros);
    let mut out: Vec<ComplexRoot> = (0..zeros)
        .map(|_| ComplexRoot { re: 0.0, im: 0.0 })
        .collect();
    let d = coeffs.len() - 1;
    if d > 0 {
        let lc = coeffs[d];
        let monic: Vec<f64> = coeffs.iter().map(|c| c / lc).collect();
        // Scale x -> k y so the coefficients of the companion matrix are O(1).
        let k = (0..d)
            .map(|i| monic[i].abs().powf(1.0 / (d - i) as f64))
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let scaled: Vec<f64> = (0..=d).map(|i| monic[i] / k.powi((d - i) as i32)).collect();
        let eig = scaled_eigenvalues(&scaled);
        let mut raw: Vec<Complex<f64>> = eig
            .iter()
            .map(|z| polish(&coeffs, z * k))
            .collect();
        conjugate_pair(&mut raw);
        out.extend(raw.into_iter().map(|z| ComplexRoot { re: z.re, im: z.im }));
    }
    out.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    out
}

fn companion(monic: &[f64]) -> DMatrix<f64> {
    let d = monic.len() - 1;
    let mut m = DMatrix::<f64>::zeros(d, d);
    for j in 0..d {
        m[(0, j)] = -monic[d - 1 - j];
    }
    for i in 1..d {
        m[(i, i - 1)] = 1.0;
    }
    m
}

/// Coefficients of `p(y + c)`, ascending.
fn shifted(monic: &[f64], c: f64) -> Vec<f64> {
    let mut out = vec![0.0; monic.len()];
    for &a in monic.iter().rev() {
        for i in (1..out.len()).rev() {
            out[i] = out[i] * c + out[i - 1];
        }
        out[0] = out[0] * c + a;
    }
    out
}

/// Eigenvalues of the companion matrix of a monic polynomial with O(1)
/// coefficients. Unshifted QR can cycle forever on symmetric root sets
/// such as `x^4 - 4.5x^2 - 8`, so iterations are bounded and a failed
/// attempt is retried on `p(y + c)`.
fn scaled_eigenvalues(monic: &[f64]) -> Vec<Complex<f64>> {
    const SHIFTS: [f64; 4] = [0.0, 0.1234567, -0.3141593, 0.7213475];
    for c in SHIFTS {
        let m = companion(&shifted(monic, c));
        if let Some(schur) = Schur::try_new(m, f64::EPSILON, 10_000) {
            return schur
                .complex_eigenvalues()
                .iter()
                .map(|z| z + Complex::new(c, 0.0))
                .collect();
        }
    }
    aberth(monic)
}

/// Aberth-Ehrlich iteration, the last resort when QR does not converge.
fn aberth(monic: &[f64]) -> Vec<Complex<f64>> {
    let d = monic.len() - 1;
    let mut z: Vec<Complex<f64>> = (0..d)
        .map(|j| Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / d as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (p, dp) = horner_complex(monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex<f64> = (0..d).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex::new(1.0, 0.0) - ratio * sum);
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn conjugate_pair(roots: &mut [Complex<f64>]) {
    let scale = roots.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
    let tiny = 1e-15 * scale;
    for z in roots.iter_mut() {
        if z.im.abs() <= tiny {
            z.im = 0.0;
        }
    }
    let mut paired = vec![false; roots.len()];
    for i in 0..roots.len() {
        if paired[i] || roots[i].im <= 0.0 {
            continue;
        }
        let target = roots[i].conj();
        let partner = (0..roots.len())
            .filter(|&j| !paired[j] && j != i && roots[j].im < 0.0)
            .min_by(|&a, &b| {
                (roots[a] - target)
                    .norm()
                    .partial_cmp(&(roots[b] - target).norm())
                    .unwrap()
            });
        if let Some(j) = partner {
            let re = 0.5 * (roots[i].re + roots[j].re);
            let im = 0.5 * (roots[i].im - roots[j].im);
            roots[i] = Complex::new(re, im);
            roots[j] = Complex::new(re, -im);
            paired[i] = true;
            paired[j] = true;
        }
    }
    for (i, z) in roots.iter_mut().enumerate() {
        if !paired[i] {
            z.im = 0.0;
        }
    }
}

/// Single-linkage clustering of roots closer than `tol`. Returns each
/// cluster's centroid and size, plus whether any merge happened. A cluster
/// that is symmetric about the real axis gets an exactly real centroid.
pub fn cluster_roots(roots: &[ComplexRoot], tol: f64) -> (Vec<(ComplexRoot, u32)>, bool) {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        parent[i] = r;
        r
    }
    let mut merged = false;
    for i in 0..n {
        for j in (i + 1)..n {
            if roots[i].dist(&roots[j]) < tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[b] = a;
                }
                merged = true;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(i),
            None => groups.push((r, vec![i])),
        }
    }
    let mut out: Vec<(ComplexRoot, u32)> = groups
        .into_iter()
        .map(|(_, members)| {
            let k = members.len() as f64;
            let re = members.iter().map(|&i| roots[i].re).sum::<f64>() / k;
            let mut im = members.iter().map(|&i| roots[i].im).sum::<f64>() / k;
            if im.abs() < tol {
                im = 0.0;
            }
            (ComplexRoot { re, im }, members.len() as u32)
        })
        .collect();
    out.sort_by(|a, b| {
        a.0.re
            .partial_cmp(&b.0.re)
            .unwrap()
            .then(a.0.im.partial_cmp(&b.0.im).unwrap())
    });
    (out, merged)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    fn roots_of(text: &str) -> Vec<ComplexRoot> {
        roots_complex(&parse_polynomial(text).unwrap().map_to_f64())
    }

    #[test]
    fn derivative_of_example_has_two_real_pairs() {
        let r = roots_of("6x^5 - 2x");
        let a = (1.0f64 / 3.0).powf(0.25);
        assert_eq!(r.len(), 5);
        let reals: Vec<f64> = r.iter().filter(|z| z.im == 0.0).map(|z| z.re).collect();
        assert_eq!(reals.len(), 3);
        assert!((reals[0] + a).abs() < 1e-12 && reals[1].abs() < 1e-12);
        assert!((reals[2] - a).abs() < 1e-12);
        let imag: Vec<&ComplexRoot> = r.iter().filter(|z| z.im != 0.0).collect();
        assert_eq!(imag.len(), 2);
        assert!(imag.iter().all(|z| z.re.abs() < 1e-12 && (z.im.abs() - a).abs() < 1e-12));
        assert_eq!(imag[0].im, -imag[1].im);
    }

    #[test]
    fn symmetric_quartic_terminates() {
        // x^4 - 4.5x^2 - 8 = (x^2 - 5.7...)(x^2 + 1.2...)
        let r = roots_of("1/4*x^4 - 9/8*x^2 - 2");
        let a2 = (4.5 + (4.5f64 * 4.5 + 32.0).sqrt()) / 2.0;
        let b2 = a2 - 4.5;
        assert_eq!(r.len(), 4);
        assert!((r[0].re + a2.sqrt()).abs() < 1e-12 && r[0].im == 0.0);
        assert!((r[3].re - a2.sqrt()).abs() < 1e-12 && r[3].im == 0.0);
        assert!(r[1].re.abs() < 1e-12 && (r[2].im - b2.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn aberth_agrees_with_qr() {
        let monic = [-6.0, 11.0, -6.0, 1.0];
        let mut z: Vec<f64> = aberth(&monic).iter().map(|z| z.re).collect();
        z.sort_by(f64::total_cmp);
        for (a, b) in z.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn unit_imaginary_pair() {
        let r = roots_of("x^2 + 1");
        assert_eq!(r.len(), 2);
        assert!(r[0].re.abs() < 1e-14 && (r[0].im + 1.0).abs() < 1e-14);
        assert_eq!(r[0].im, -r[1].im);
    }

    #[test]
    fn triple_zero() {
        let r = roots_of("x^3");
        assert_eq!(r, vec![ComplexRoot { re: 0.0, im: 0.0 }; 3]);
    }

    #[test]
    fn clustering_merges_a_split_double_root() {
        let roots = vec![
            ComplexRoot { re: 1.0, im: 3e-9 },
            ComplexRoot { re: 1.0, im: -3e-9 },
            ComplexRoot { re: 2.0, im: 0.0 },
        ];
        let (clusters, merged) = cluster_roots(&roots, 1e-7);
        assert!(merged);
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters[0], (ComplexRoot { re: 1.0, im: 0.0 }, 2));
    }
}
