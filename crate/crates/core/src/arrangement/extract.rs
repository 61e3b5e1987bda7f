//! Read off the arrangement of a concrete polynomial.
//!
//! Exact inputs go through square-free decompositions of `P` and `Q`, a
//! coprime basis of all their factors and interval isolation of the basis
//! roots, so coincidences are decided exactly. Float inputs are clustered
//! within tolerances and report whether any decision relied on them.

use serde::Serialize;

use super::{Arrangement, Position};
use crate::poly::{
    cluster_roots, coprime_basis_tagged, isolate_family, roots_complex, yun, ComplexRoot,
    PolyError, Polynomial, RatPoly, RealRoot, RootProfile,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// Width to which isolating intervals are refined (exact path).
    pub refine_to: f64,
    /// Distance under which float roots of one polynomial are merged.
    pub cluster_tol: f64,
    /// Distance under which a float root of `P` and one of `Q` coincide.
    pub eq_tol: f64,
    /// Return a float result even when tolerances decided something.
    pub allow_ambiguity: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions {
            refine_to: 1e-12,
            cluster_tol: 1e-7,
            eq_tol: 1e-7,
            allow_ambiguity: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Extraction {
    #[serde(skip)]
    pub arrangement: Arrangement,
    pub p_profile: RootProfile,
    pub q_profile: RootProfile,
    /// Approximate location of each position of the chain.
    pub locations: Vec<f64>,
    pub exact: bool,
    /// Float path only: some clustering or coincidence was decided by a
    /// tolerance rather than proven.
    pub ambiguous: bool,
}

/// Arrangement of `p` and its `s`-th derivative with default options.
pub fn extract(p: &Polynomial, s: u32) -> Result<Extraction, PolyError> {
    extract_with(p, s, &ExtractOptions::default())
}

pub fn extract_with(p: &Polynomial, s: u32, opts: &ExtractOptions) -> Result<Extraction, PolyError> {
    let n = p.degree();
    if s == 0 || s as usize >= n {
        return Err(PolyError::InvalidOrder {
            order: s as usize,
            degree: n,
        });
    }
    for tol in [opts.refine_to, opts.cluster_tol, opts.eq_tol] {
        if !(tol > 0.0) {
            return Err(PolyError::InvalidTolerance(tol));
        }
    }
    let ext = match p {
        Polynomial::Exact(f) => extract_exact(f, s, opts.refine_to),
        Polynomial::Float(_) => extract_float(p, s, opts)?,
    };
    if ext.ambiguous && !opts.allow_ambiguity {
        return Err(PolyError::ClusterAmbiguity);
    }
    Ok(ext)
}

fn extract_exact(f: &RatPoly, s: u32, refine_to: f64) -> Extraction {
    let n = f.degree() as u32;
    let q = f.nth_derivative(s as usize).expect("order checked");
    let fp = yun(f);
    let fq = yun(&q);
    let inputs: Vec<RatPoly> = fp.iter().chain(fq.iter()).map(|(g, _)| g.clone()).collect();
    let tagged = coprime_basis_tagged(&inputs);
    let exps: Vec<(u32, u32)> = tagged
        .iter()
        .map(|(_, tags)| {
            let ep = tags.iter().filter(|&&t| t < fp.len()).map(|&t| fp[t].1).sum();
            let eq = tags.iter().filter(|&&t| t >= fp.len()).map(|&t| fq[t - fp.len()].1).sum();
            (ep, eq)
        })
        .collect();
    let basis: Vec<RatPoly> = tagged.into_iter().map(|(b, _)| b).collect();
    let roots = isolate_family(&basis, refine_to);
    let mut positions = Vec::with_capacity(roots.len());
    let mut locations = Vec::with_capacity(roots.len());
    let mut pr = Vec::new();
    let mut qr = Vec::new();
    for (root, i) in &roots {
        let (ep, eq) = exps[*i];
        positions.push(Position::new(ep, eq));
        locations.push(root.approx);
        if ep > 0 {
            pr.push(RealRoot {
                location: root.approx,
                multiplicity: ep,
            });
        }
        if eq > 0 {
            qr.push(RealRoot {
                location: root.approx,
                multiplicity: eq,
            });
        }
    }
    let p_profile = profile(pr, n, true, false);
    let q_profile = profile(qr, n - s, true, false);
    let arrangement = Arrangement::new(n, s, p_profile.complex_pairs, q_profile.complex_pairs, positions)
        .expect("exact root counts are consistent");
    Extraction {
        arrangement,
        p_profile,
        q_profile,
        locations,
        exact: true,
        ambiguous: false,
    }
}

fn profile(real_roots: Vec<RealRoot>, degree: u32, exact: bool, ambiguity: bool) -> RootProfile {
    let real: u32 = real_roots.iter().map(|r| r.multiplicity).sum();
    RootProfile {
        real_roots,
        complex_pairs: (degree - real) / 2,
        exact,
        cluster_ambiguity: ambiguity,
    }
}

fn real_clusters(roots: &[ComplexRoot], tol: f64) -> (Vec<RealRoot>, bool) {
    let (clusters, merged) = cluster_roots(roots, tol);
    let reals = clusters
        .into_iter()
        .filter(|(z, _)| z.im == 0.0)
        .map(|(z, k)| RealRoot {
            location: z.re,
            multiplicity: k,
        })
        .collect();
    (reals, merged)
}

fn extract_float(p: &Polynomial, s: u32, opts: &ExtractOptions) -> Result<Extraction, PolyError> {
    let n = p.degree() as u32;
    let fp = p.to_float();
    let fq = fp.nth_derivative(s as usize)?;
    let (pr, pm) = real_clusters(&roots_complex(&fp), opts.cluster_tol);
    let (qr, qm) = real_clusters(&roots_complex(&fq), opts.cluster_tol);
    let mut ambiguous = pm || qm;

    // merge the two sorted lists, pairing a P root with a Q root when close
    let mut positions = Vec::new();
    let mut locations = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < pr.len() || j < qr.len() {
        let take_both = i < pr.len()
            && j < qr.len()
            && (pr[i].location - qr[j].location).abs() < opts.eq_tol;
        if take_both {
            if pr[i].location != qr[j].location {
                ambiguous = true;
            }
            positions.push(Position::new(pr[i].multiplicity, qr[j].multiplicity));
            locations.push(0.5 * (pr[i].location + qr[j].location));
            i += 1;
            j += 1;
        } else if j >= qr.len() || (i < pr.len() && pr[i].location < qr[j].location) {
            positions.push(Position::new(pr[i].multiplicity, 0));
            locations.push(pr[i].location);
            i += 1;
        } else {
            positions.push(Position::new(0, qr[j].multiplicity));
            locations.push(qr[j].location);
            j += 1;
        }
    }
    let p_profile = profile(pr, n, false, pm);
    let q_profile = profile(qr, n - s, false, qm);
    let arrangement = Arrangement::new(n, s, p_profile.complex_pairs, q_profile.complex_pairs, positions)
        .map_err(|_| PolyError::ClusterAmbiguity)?;
    Ok(Extraction {
        arrangement,
        p_profile,
        q_profile,
        locations,
        exact: false,
        ambiguous,
    })
}
