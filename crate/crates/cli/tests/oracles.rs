mod support;

use std::collections::BTreeSet;
use std::process::Command;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rootchain::admissibility::{enumerate_admissible, is_admissible, CondCMode};
use rootchain::arrangement::{closure_of, parse_arrangement, Arrangement, Shape};
use rootchain::config::SolverConfig;
use rootchain::verify::{soundness_sweep, verify_roundtrip, RowStatus, VerifyOptions};
use support::{cubic_oracle, depressed_cubic, depressed_quartic, first_derivative_obstruction, hyperbolic_cubic, observe};

fn arr(text: &str, n: u32, m: u32, mp: u32) -> Arrangement {
    parse_arrangement(text, &Shape::full(n, 1, m, mp)).unwrap()
}

#[test]
fn sign_test_rejects_the_cubic_counterexample() {
    assert!(first_derivative_obstruction(&arr("Q < P < Q", 3, 1, 0)).is_some());
}

#[test]
fn sign_test_accepts_known_chains() {
    for (text, n, m, mp) in [
        ("P < Q < P", 2, 0, 0),
        ("P^2Q", 2, 0, 0),
        ("P < Q < P^2Q < Q < P", 6, 1, 1),
        ("P < Q < P < Q < P", 3, 0, 0),
        ("P", 3, 1, 1),
    ] {
        assert_eq!(first_derivative_obstruction(&arr(text, n, m, mp)), None, "{text}");
    }
}

#[test]
fn sign_test_accepts_everything_observed() {
    for n in 2..=5 {
        let report = soundness_sweep(n, 1, 20_000, 17, CondCMode::HyperbolicOnly, 1);
        for text in report.observed.keys() {
            let shape = Shape {
                n: Some(n),
                s: Some(1),
                ..Shape::default()
            };
            // m, m' follow from the sums once n and s are known
            let a = (0..=n / 2)
                .flat_map(|m| (0..=m).map(move |mp| (m, mp)))
                .find_map(|(m, mp)| parse_arrangement(text, &Shape { m: Some(m), m_prime: Some(mp), ..shape }).ok())
                .unwrap();
            assert_eq!(first_derivative_obstruction(&a), None, "{text}");
        }
    }
}

#[test]
fn cubic_oracle_sees_only_unobstructed_chains() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let seen = cubic_oracle(&mut rng, 20_000);
    for (m, set) in &seen {
        for text in set {
            let mp = if *m == 0 { 0 } else { u32::from(!text.contains('Q')) };
            let a = parse_arrangement(text, &Shape::full(3, 1, *m, mp)).unwrap();
            assert_eq!(first_derivative_obstruction(&a), None, "{text}");
        }
    }
    assert!(seen[&0].contains("P < Q < P < Q < P"));
    assert!(seen[&1].contains("P < Q < Q"));
}

fn texts(list: &[Arrangement]) -> BTreeSet<String> {
    list.iter().map(|a| a.to_string()).collect()
}

/// Observed chains together with their admissible degenerations.
fn admissible_closure(observed: &BTreeSet<String>, shape: &Shape) -> BTreeSet<String> {
    observed
        .iter()
        .flat_map(|t| closure_of(&parse_arrangement(t, shape).unwrap()))
        .filter(|a| is_admissible(a).verdict)
        .map(|a| a.to_string())
        .collect()
}

#[test]
fn hyperbolic_cubics_match_the_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let seen = observe(&mut rng, 1_000_000, 1, hyperbolic_cubic);
    assert_eq!(seen.keys().copied().collect::<Vec<_>>(), vec![0]);
    let closed = admissible_closure(&seen[&0], &Shape::full(3, 1, 0, 0));
    let enumerated = texts(&enumerate_admissible(3, 1, 0).unwrap());
    assert_eq!(closed, enumerated);
    assert_eq!(seen[&0], enumerated, "every admissible hyperbolic cubic chain occurs");

    let cli = Command::new(env!("CARGO_BIN_EXE_rootchain"))
        .args(["enumerate", "--n", "3", "--s", "1", "--m", "0", "--count-only"])
        .env_remove("ROOTCHAIN_CONFIG")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(cli.stdout).unwrap().trim(), closed.len().to_string());
}

#[test]
fn depressed_cubics_with_one_real_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let seen = observe(&mut rng, 200_000, 1, depressed_cubic);
    let enumerated = enumerate_admissible(3, 1, 1).unwrap();
    for a in &enumerated {
        assert!(is_admissible(a).verdict);
    }
    let enumerated = texts(&enumerated);
    let observed = &seen[&1];
    assert!(observed.is_subset(&enumerated), "{observed:?}");
    for text in ["P", "P < Q < Q", "Q < Q < P", "P < Q^2", "Q^2 < P"] {
        assert!(observed.contains(text), "{text} not observed");
    }
    // the one chain never seen is ruled out by the sign argument
    let missing: Vec<_> = enumerated.difference(observed).collect();
    assert_eq!(missing, vec!["Q < P < Q"]);
}

#[test]
fn depressed_quartics_at_second_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let seen = observe(&mut rng, 1_000_000, 2, depressed_quartic);
    let observed = &seen[&1];
    let enumerated = texts(&enumerate_admissible(4, 2, 1).unwrap());
    assert!(observed.is_subset(&enumerated), "{:?}", observed.difference(&enumerated).collect::<Vec<_>>());

    let cfg = SolverConfig::default();
    let report = verify_roundtrip(4, 2, 1, &cfg, VerifyOptions { samples: 0, jobs: 1 }).unwrap();
    let realized: BTreeSet<String> = report
        .rows
        .iter()
        .filter(|r| r.status == RowStatus::Realized)
        .map(|r| r.target.to_string())
        .collect();
    println!(
        "(4,2,1): {} enumerated, {} observed in the depressed quartic family, {} realized",
        enumerated.len(),
        observed.len(),
        realized.len()
    );
    // the realizer reaches at least every chain that actually occurs
    assert!(observed.is_subset(&realized), "{:?}", observed.difference(&realized).collect::<Vec<_>>());
}
