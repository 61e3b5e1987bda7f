//! Everything the front ends report about one concrete polynomial.

use serde::Serialize;

use crate::admissibility::{is_admissible_with, AdmissibilityReport, CondCMode};
use crate::arrangement::{extract_with, rolle_assignments, ArrangementJson, ExtractOptions, RolleAssignment};
use crate::poly::{PolyError, Polynomial, RootProfile};

#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub polynomial: String,
    pub derivative: String,
    pub s: u32,
    pub arrangement: String,
    pub shape: ArrangementJson,
    pub p_profile: RootProfile,
    pub q_profile: RootProfile,
    /// Approximate location of each position of the chain.
    pub locations: Vec<f64>,
    pub exact: bool,
    pub ambiguous: bool,
    /// `n - 2m - s`; negative when admissibility is undefined.
    pub rolle_count: i64,
    pub rolle_assignments: Vec<RolleAssignment>,
    /// Rolle root locations under each assignment, in chain order.
    pub rolle_roots: Vec<Vec<f64>>,
    pub admissibility: Option<AdmissibilityReport>,
}

pub fn analyze(p: &Polynomial, s: u32, opts: &ExtractOptions, mode: CondCMode) -> Result<Analysis, PolyError> {
    let ext = extract_with(p, s, opts)?;
    let arr = &ext.arrangement;
    let assignments = if arr.rolle_count() >= 0 {
        rolle_assignments(arr)
    } else {
        Vec::new()
    };
    let rolle_roots = assignments
        .iter()
        .map(|a| a.slots().into_iter().map(|i| ext.locations[i]).collect())
        .collect();
    let admissibility = (arr.rolle_count() >= 0).then(|| is_admissible_with(arr, mode));
    Ok(Analysis {
        polynomial: p.to_string(),
        derivative: p.derivative(s as usize)?.to_string(),
        s,
        arrangement: arr.to_string(),
        shape: arr.to_json(None),
        p_profile: ext.p_profile.clone(),
        q_profile: ext.q_profile.clone(),
        locations: ext.locations.clone(),
        exact: ext.exact,
        ambiguous: ext.ambiguous,
        rolle_count: arr.rolle_count(),
        rolle_assignments: assignments,
        rolle_roots,
        admissibility,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_polynomial;

    #[test]
    fn sextic_rolle_roots() {
        let p = Polynomial::Exact(parse_polynomial("x^6 - x^2").unwrap());
        let a = analyze(&p, 1, &ExtractOptions::default(), CondCMode::HyperbolicOnly).unwrap();
        assert_eq!(a.arrangement, "P < Q < P^2Q < Q < P");
        assert_eq!(a.rolle_roots.len(), 1);
        let r = 3f64.powf(-0.25);
        let want = [-r, 0.0, r];
        for (got, want) in a.rolle_roots[0].iter().zip(want) {
            assert!((got - want).abs() < 1e-9);
        }
        assert!(a.admissibility.unwrap().verdict);
    }
}
