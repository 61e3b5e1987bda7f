use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rootchain::admissibility::{enumerate_admissible, is_admissible};
use rootchain::arrangement::{extract, parse_arrangement, rolle_assignments, Shape};
use rootchain::config::SolverConfig;
use rootchain::poly::{from_roots, isolate_roots, parse_polynomial, ratio, rational_to_f64, roots_complex, Polynomial, RatPoly, Rational};
use rootchain::realizer::{tau_map, RealizationPlan, SearchDomain};
use rootchain::verify::sample::sample_polynomial;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-20i64..=20, 1i64..=6).prop_map(|(n, d)| ratio(n, d))
}

fn rat_poly(max_degree: usize) -> impl Strategy<Value = RatPoly> {
    prop::collection::vec(small_rational(), 1..=max_degree + 1).prop_map(RatPoly::from_ascending)
}

/// Real roots with multiplicities, and complex pairs `a ± bi`.
type RootData = (Vec<(Rational, u32)>, Vec<(Rational, Rational)>);

/// Distinct grid roots with multiplicities, and a number of complex pairs.
fn root_data() -> impl Strategy<Value = RootData> {
    let real = prop::collection::btree_map(-8i64..=8, 1u32..=3, 0..=3)
        .prop_map(|m| m.into_iter().map(|(r, k)| (ratio(r, 2), k)).collect::<Vec<_>>());
    let pairs = prop::collection::vec((-4i64..=4, 1i64..=3), 0..=2)
        .prop_map(|v| v.into_iter().map(|(a, b)| (ratio(a, 2), ratio(b, 2))).collect::<Vec<_>>());
    (real, pairs).prop_filter("degree 2..=7", |(r, c)| {
        let d: u32 = r.iter().map(|x| x.1).sum::<u32>() + 2 * c.len() as u32;
        (2..=7).contains(&d)
    })
}

fn build(real: &[(Rational, u32)], pairs: &[(Rational, Rational)]) -> RatPoly {
    pairs.iter().fold(from_roots(real), |acc, (a, b)| {
        let q = RatPoly::from_ascending(vec![a * a + b * b, -(a + a), Rational::from_integer(1.into())]);
        &acc * &q
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn polynomial_text_round_trips(p in rat_poly(7)) {
        let text = p.to_string();
        let back = parse_polynomial(&text).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn extraction_recovers_planted_roots((real, pairs) in root_data(), s_seed in 0u32..8) {
        let p = build(&real, &pairs);
        let n = p.degree() as u32;
        let s = 1 + s_seed % (n - 1);
        let ex = extract(&Polynomial::Exact(p), s).unwrap();
        let got: Vec<(f64, u32)> = ex.p_profile.real_roots.iter().map(|r| (r.location, r.multiplicity)).collect();
        let want: Vec<(f64, u32)> = real.iter().map(|(r, k)| (rational_to_f64(r), *k)).collect();
        prop_assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g.0 - w.0).abs() < 1e-9 && g.1 == w.1, "{:?} vs {:?}", got, want);
        }
        prop_assert_eq!(ex.arrangement.m as usize, pairs.len());
    }

    #[test]
    fn root_counts_add_up((real, pairs) in root_data(), s_seed in 0u32..8) {
        let p = build(&real, &pairs);
        let n = p.degree() as u32;
        let s = 1 + s_seed % (n - 1);
        let a = extract(&Polynomial::Exact(p), s).unwrap().arrangement;
        prop_assert_eq!(a.p_total() + 2 * a.m, n);
        prop_assert_eq!(a.q_total() + 2 * a.m_prime, n - s);
        // a root of P of multiplicity p > s is a root of P^(s) of multiplicity p - s
        for pos in a.positions() {
            if pos.p > s {
                prop_assert_eq!(pos.q, pos.p - s);
            }
        }
    }

    #[test]
    fn arrangement_text_round_trips((real, pairs) in root_data(), s_seed in 0u32..8) {
        let p = build(&real, &pairs);
        let n = p.degree() as u32;
        let s = 1 + s_seed % (n - 1);
        let a = extract(&Polynomial::Exact(p), s).unwrap().arrangement;
        let back = parse_arrangement(&a.to_string(), &Shape::full(n, s, a.m, a.m_prime)).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn extracted_arrangements_are_admissible((real, pairs) in root_data(), s_seed in 0u32..8) {
        let p = build(&real, &pairs);
        let n = p.degree() as u32;
        let s = 1 + s_seed % (n - 1);
        let a = extract(&Polynomial::Exact(p.clone()), s).unwrap().arrangement;
        prop_assume!(a.rolle_count() >= 0);
        prop_assert!(is_admissible(&a).verdict, "{} from {}", a, p);
        // some Rolle marking interlaces
        prop_assert!(!rolle_assignments(&a).is_empty());
    }

    #[test]
    fn derivative_separates_distinct_roots(roots in prop::collection::vec(-40i64..=40, 2..=7)) {
        let planted: Vec<(Rational, u32)> = roots.iter().map(|&r| (ratio(r, 8), 1)).collect();
        let p = from_roots(&planted);
        let real = isolate_roots(&Polynomial::Exact(p.clone()), 1e-12).unwrap().real_roots;
        let crit = isolate_roots(&Polynomial::Exact(p.derivative()), 1e-12).unwrap().real_roots;
        for w in real.windows(2) {
            prop_assert!(
                crit.iter().any(|c| w[0].location < c.location && c.location < w[1].location),
                "no root of P' in ({}, {}) for {}", w[0].location, w[1].location, p
            );
        }
    }

    #[test]
    fn derivative_root_sum(p in rat_poly(7), s_seed in 0usize..8) {
        prop_assume!(p.degree() >= 2);
        let n = p.degree();
        let s = 1 + s_seed % (n - 1);
        let q = p.nth_derivative(s).unwrap();
        let sum = |f: &RatPoly| roots_complex(&f.map_to_f64()).iter().map(|z| z.re).sum::<f64>();
        // both sums are -a_{n-1}/a_n up to the factor (n - s)/n
        let exact = -rational_to_f64(&(p.coeff(n - 1) / p.coeff(n)));
        let scale = 1.0 + exact.abs();
        prop_assert!((sum(&p) - exact).abs() < 1e-6 * scale);
        prop_assert!((sum(&q) - exact * (n - s) as f64 / n as f64).abs() < 1e-6 * scale);
    }

    #[test]
    fn sampled_polynomials_have_full_degree(seed in any::<u64>(), n in 2usize..=6, s_seed in 0usize..5) {
        let s = 1 + s_seed % (n - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = sample_polynomial(&mut rng, n, s);
        prop_assert_eq!(p.degree(), n);
        prop_assert!(!p.leading().is_zero());
    }
}

/// A few plans with complex pairs of `P` and a hyperbolic `P^(s)`.
fn plans() -> Vec<RealizationPlan> {
    let mut out = Vec::new();
    for (n, s, m) in [(4, 1, 1), (5, 2, 1), (6, 1, 2), (6, 2, 1), (3, 1, 1)] {
        let all = enumerate_admissible(n, s, m).unwrap();
        let a = all.iter().find(|a| a.m_prime == 0).expect("a hyperbolic target");
        let assign = rolle_assignments(a).into_iter().next().expect("admissible");
        out.push(RealizationPlan::new(a, &assign));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn tau_maps_the_domain_into_itself(which in 0usize..5, seed in any::<u64>(), b in 0.0f64..0.1) {
        let plan = &plans()[which];
        let n_box = SolverConfig::default().n_box;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dom = SearchDomain::random(plan, n_box, &mut rng);
        let out = tau_map(plan, &dom, b, None);
        prop_assert!(out.eta.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(out.eta.iter().all(|x| (0.0..=1.0).contains(x)));
        prop_assert!(out.zeta.iter().all(|z| (0.0..=n_box).contains(z)));
        prop_assert!(out.hull_excess <= 1e-9, "excess {} at {:?}", out.hull_excess, dom);
        let t_max = dom.t_max();
        if t_max > 1e-6 {
            let i0 = dom.t.iter().position(|&t| t == t_max).unwrap();
            prop_assert!(out.subtrahend[i0] < dom.t[i0]);
        }
    }
}

/// Near-degenerate `t` clusters the roots of the family, and floating-point
/// root finding then places roots of `P^(s)` slightly outside the hull.
/// The excess stays well below the tolerances the realizer works with.
#[test]
fn hull_excess_at_tiny_t_is_bounded() {
    let n_box = SolverConfig::default().n_box;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst: f64 = 0.0;
    for plan in plans().iter().filter(|p| p.free_pairs > 0) {
        for _ in 0..20_000 {
            let mut dom = SearchDomain::random(plan, n_box, &mut rng);
            for t in &mut dom.t {
                *t = 10f64.powf(rand::Rng::gen_range(&mut rng, -7.0..-3.0));
            }
            let out = tau_map(plan, &dom, 0.0, None);
            worst = worst.max(out.hull_excess);
        }
    }
    assert!(worst <= 1e-4, "worst hull excess {worst}");
}
