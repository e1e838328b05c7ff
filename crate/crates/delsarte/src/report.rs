//! The assembled analysis: one call from polynomial to a serializable
//! report covering weights, symmetry groups, the Lefschetz number, the
//! Newton polytope, and the rationality verdict.
//!
//! Reports serialize unbounded integers as decimal strings so that JSON
//! consumers in any language read them losslessly; bounded counts stay
//! native numbers.  Field order is fixed, so serialized output is
//! byte-stable except for the timing block.

use std::time::Instant;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::characters::{
    character_set, gamma_group, lefschetz, SingularityAssumption, DEFAULT_CHARACTER_CAP,
};
use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::newton::{classify_hollow_given, fine_interior, newton_polytope};
use crate::poly::DelsartePolynomial;
use crate::weights::{check_well_formed, derive_weight_system, smoothness_verdict};

/// Version tag embedded in every report.
pub const SCHEMA_VERSION: &str = "1";

/// Knobs for [`analyze`].
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    /// Refuse to enumerate character groups larger than this.
    pub character_cap: u64,
    /// Skip the Newton polytope block (and the Fine-interior rationality
    /// rung that depends on it).
    pub skip_newton: bool,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            character_cap: DEFAULT_CHARACTER_CAP,
            skip_newton: false,
        }
    }
}

/// One stratum that failed the quasismoothness test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumRecord {
    pub variables: Vec<usize>,
    pub reason: String,
}

/// Sizes of the character space and its slices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterCounts {
    pub total: u64,
    pub interior: u64,
    pub slices: [u64; 3],
    /// Interior characters whose whole unit orbit stays in the middle slice.
    pub stable_middle: u64,
}

/// Newton polytope block of the report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NewtonRecord {
    pub interior_count: u64,
    pub hollow: bool,
    /// Dimension of the Fine interior; `-1` when empty.
    pub fine_dim: i64,
    pub kodaira: String,
    /// ID in the hollow simplex table, when matched.
    pub hollow_table_match: Option<u32>,
    /// Invariant factors of `Z^3` modulo the edge lattice.
    pub vertex_quotient: Option<Vec<String>>,
}

/// Final rationality verdict with the rule that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalityRecord {
    /// One of `"rational"`, `"not-rational"`, `"undetermined"`.
    pub verdict: String,
    pub reason: String,
}

/// Wall-clock timings for the pipeline stages, microseconds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Timings {
    pub weights_us: u64,
    pub characters_us: u64,
    pub lefschetz_us: u64,
    pub newton_us: u64,
    pub total_us: u64,
}

/// Everything the analysis produces for one surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceReport {
    pub schema_version: String,
    /// Canonical polynomial text.
    pub input: String,
    /// Exponent matrix, row-major decimal strings.
    pub matrix: Vec<Vec<String>>,
    pub charges: Vec<String>,
    pub weights: Vec<String>,
    /// Weighted degree `m`.
    pub weighted_degree: String,
    /// Fermat quotient degree `d`.
    pub fermat_degree: String,
    pub well_formed: bool,
    pub quasismooth: bool,
    pub failing_strata: Vec<StratumRecord>,
    pub singularity_assumption: String,
    /// Invariant factors of the symmetry group of the polynomial.
    pub aut_tor_polynomial: Vec<String>,
    /// Invariant factors of the symmetry group of the surface.
    pub aut_tor_surface: Vec<String>,
    pub group_exponent: String,
    /// Invariant factors of the covering quotient group.
    pub gamma: Vec<String>,
    pub character_counts: CharacterCounts,
    /// Generators of the character group, one residue 4-tuple each.
    pub generators: Vec<[u64; 4]>,
    pub lambda: u64,
    pub geometric_genus: u64,
    pub maximal_picard: bool,
    pub criterion: String,
    pub newton: Option<NewtonRecord>,
    pub rationality: RationalityRecord,
    pub timings: Timings,
}

fn strings_of_group(g: &AbelianGroup) -> Vec<String> {
    g.factors().iter().map(|f| f.to_string()).collect()
}

/// Run the full pipeline.  Surfaces that are not well-formed are rejected;
/// failing quasismoothness merely switches the singularity assumption.
pub fn analyze(p: &DelsartePolynomial, opts: &AnalyzeOptions) -> Result<SurfaceReport> {
    let t_total = Instant::now();

    let t = Instant::now();
    let ws = derive_weight_system(p)?;
    let smooth = smoothness_verdict(p, &ws);
    if !smooth.well_formed {
        let reasons = check_well_formed(p, &ws)
            .failures
            .into_iter()
            .map(|f| f.reason)
            .collect();
        return Err(Error::NotWellFormed(reasons));
    }
    let weights_us = t.elapsed().as_micros() as u64;

    let assumption = if smooth.quasismooth {
        SingularityAssumption::QuasismoothVerified
    } else {
        SingularityAssumption::QuotientSingularitiesAssumed
    };

    let t = Instant::now();
    let cs = character_set(p, &ws, opts.character_cap)?;
    let characters_us = t.elapsed().as_micros() as u64;
    debug_assert_eq!(cs.group(), &crate::weights::aut_tor_x(p));

    let t = Instant::now();
    let lef = lefschetz(&cs, assumption);
    let lefschetz_us = t.elapsed().as_micros() as u64;

    let gamma = gamma_group(p, &ws)?;

    let t = Instant::now();
    let newton = if opts.skip_newton {
        None
    } else {
        let np = newton_polytope(p, &ws)?;
        let interior = np.interior_points()?;
        let fi = fine_interior(&np)?;
        let cls = classify_hollow_given(&np, interior.is_empty(), !fi.is_empty())?;
        Some(NewtonRecord {
            interior_count: interior.len() as u64,
            hollow: cls.is_hollow,
            fine_dim: fi.dim,
            kodaira: fi.kodaira.to_string(),
            hollow_table_match: cls.table_match,
            vertex_quotient: cls.quotient_group.as_ref().map(strings_of_group),
        })
    };
    let newton_us = t.elapsed().as_micros() as u64;

    let rationality = rationality_verdict(&lef.exponent_e, smooth.quasismooth, lef.p_g, &newton);

    Ok(SurfaceReport {
        schema_version: SCHEMA_VERSION.to_string(),
        input: p.canonical_text(),
        matrix: (0..4)
            .map(|i| (0..4).map(|j| p.matrix()[(i, j)].to_string()).collect())
            .collect(),
        charges: ws.charges.iter().map(|q| q.to_string()).collect(),
        weights: ws.weights.iter().map(|w| w.to_string()).collect(),
        weighted_degree: ws.m.to_string(),
        fermat_degree: ws.d.to_string(),
        well_formed: smooth.well_formed,
        quasismooth: smooth.quasismooth,
        failing_strata: smooth
            .failing_strata
            .iter()
            .map(|f| StratumRecord {
                variables: f.variables.clone(),
                reason: f.reason.clone(),
            })
            .collect(),
        singularity_assumption: assumption.to_string(),
        aut_tor_polynomial: strings_of_group(&crate::weights::aut_tor_f(p)),
        aut_tor_surface: strings_of_group(cs.group()),
        group_exponent: cs.group().exponent().to_string(),
        gamma: strings_of_group(&gamma),
        character_counts: CharacterCounts {
            total: cs.elements().len() as u64,
            interior: cs.interior().len() as u64,
            slices: [cs.slice_size(0), cs.slice_size(1), cs.slice_size(2)],
            stable_middle: lef.stable_middle,
        },
        generators: cs.generators().to_vec(),
        lambda: lef.lambda,
        geometric_genus: lef.p_g,
        maximal_picard: lef.max_picard,
        criterion: lef.criterion_used.to_string(),
        newton,
        rationality,
        timings: Timings {
            weights_us,
            characters_us,
            lefschetz_us,
            newton_us,
            total_us: t_total.elapsed().as_micros() as u64,
        },
    })
}

/// The decision ladder for rationality.  Rules fire in order; the Fine
/// interior rung is skipped when the Newton block was not computed.
fn rationality_verdict(
    exponent: &BigInt,
    quasismooth: bool,
    p_g: u64,
    newton: &Option<NewtonRecord>,
) -> RationalityRecord {
    if exponent <= &BigInt::from(3) {
        return RationalityRecord {
            verdict: "rational".into(),
            reason: "symmetry group has exponent at most 3, forcing Lefschetz number 0".into(),
        };
    }
    if quasismooth && p_g == 0 {
        return RationalityRecord {
            verdict: "rational".into(),
            reason: "quasismooth with geometric genus 0".into(),
        };
    }
    if let Some(n) = newton {
        if quasismooth && n.fine_dim < 0 {
            return RationalityRecord {
                verdict: "rational".into(),
                reason: "empty Fine interior (Kodaira dimension -infinity)".into(),
            };
        }
    }
    if p_g > 0 {
        return RationalityRecord {
            verdict: "not-rational".into(),
            reason: "positive geometric genus".into(),
        };
    }
    RationalityRecord {
        verdict: "undetermined".into(),
        reason: "no rationality criterion applies".into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::named_example;
    use crate::mat::IntMat;

    fn report(id: &str) -> SurfaceReport {
        analyze(&named_example(id).unwrap(), &AnalyzeOptions::default()).unwrap()
    }

    #[test]
    fn degree_30_report() {
        let r = report("X30");
        assert_eq!(r.weights, vec!["6", "5", "5", "4"]);
        assert_eq!(r.weighted_degree, "30");
        assert_eq!(r.fermat_degree, "30");
        assert!(r.well_formed && r.quasismooth);
        assert_eq!(r.singularity_assumption, "quasismooth-verified");
        assert_eq!(r.aut_tor_surface, vec!["6", "6"]);
        assert_eq!(r.group_exponent, "6");
        assert_eq!(r.lambda, 8);
        assert_eq!(r.geometric_genus, 4);
        assert!(r.maximal_picard);
        assert_eq!(r.criterion, "exponent-fast-path");
        let newton = r.newton.unwrap();
        assert_eq!(newton.interior_count, 4);
        assert_eq!(r.rationality.verdict, "not-rational");
    }

    #[test]
    fn weighted_k3_report_keeps_quotient_assumption() {
        let r = report("X12");
        assert!(r.well_formed);
        assert!(!r.quasismooth);
        assert_eq!(r.singularity_assumption, "quotient-singularities-assumed");
        assert_eq!(r.failing_strata.len(), 1);
        assert_eq!(r.failing_strata[0].variables, vec![3]);
        assert_eq!(r.aut_tor_surface, vec!["3", "6"]);
        assert_eq!(r.lambda, 2);
        assert_eq!(r.geometric_genus, 1);
        assert!(r.maximal_picard);
        // Gamma has order 96 = 2^5 * 3.
        let order: u64 = r.gamma.iter().map(|f| f.parse::<u64>().unwrap()).product();
        assert_eq!(order, 96);
        assert_eq!(r.rationality.verdict, "not-rational");
    }

    #[test]
    fn cyclic_quintic_report_is_rational() {
        let r = report("X119");
        assert_eq!(r.weights, vec!["43", "33", "20", "19"]);
        assert_eq!(r.fermat_degree, "119");
        assert!(r.aut_tor_surface.is_empty());
        assert_eq!(r.group_exponent, "1");
        assert_eq!(r.lambda, 0);
        assert_eq!(r.geometric_genus, 0);
        assert!(r.maximal_picard);
        let newton = r.newton.as_ref().unwrap();
        assert_eq!(newton.interior_count, 0);
        assert!(newton.hollow);
        assert_eq!(newton.fine_dim, -1);
        assert_eq!(newton.kodaira, "-infinity");
        assert_eq!(newton.hollow_table_match, None);
        assert_eq!(r.rationality.verdict, "rational");
    }

    #[test]
    fn fermat_quintic_report_not_maximal() {
        let p = crate::family::fermat(5).unwrap();
        let r = analyze(&p, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.aut_tor_surface, vec!["5", "5", "5"]);
        assert_eq!(r.character_counts.total, 125);
        assert_eq!(r.character_counts.interior, 52);
        assert_eq!(r.character_counts.slices, [4, 44, 4]);
        assert_eq!(r.lambda, 16);
        assert_eq!(r.geometric_genus, 4);
        assert!(!r.maximal_picard);
        assert_eq!(r.criterion, "galois-orbit");
        assert_eq!(r.rationality.verdict, "not-rational");
    }

    #[test]
    fn skip_newton_omits_block() {
        let r = analyze(
            &named_example("X30").unwrap(),
            &AnalyzeOptions {
                skip_newton: true,
                ..AnalyzeOptions::default()
            },
        )
        .unwrap();
        assert!(r.newton.is_none());
        // The ladder still decides via the genus.
        assert_eq!(r.rationality.verdict, "not-rational");
    }

    #[test]
    fn ill_formed_surface_rejected() {
        let p = DelsartePolynomial::from_matrix(IntMat::from_i64s([
            [2, 0, 1, 0],
            [0, 2, 1, 0],
            [0, 0, 4, 0],
            [0, 0, 0, 2],
        ]))
        .unwrap();
        let err = analyze(&p, &AnalyzeOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotWellFormed(_)));
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        let r = report("X30");
        let text = serde_json::to_string_pretty(&r).unwrap();
        let back: SurfaceReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);

        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v.as_object_mut()
            .unwrap()
            .insert("surprise".into(), serde_json::Value::Null);
        let bad = serde_json::from_value::<SurfaceReport>(v);
        assert!(bad.is_err());
    }

    #[test]
    fn family_reports_match_closed_forms() {
        for s in 1..=3u64 {
            let inst = crate::family::elliptic_family(s).unwrap();
            let r = analyze(&inst.polynomial, &AnalyzeOptions::default()).unwrap();
            let want: Vec<String> = inst
                .expected
                .weights
                .iter()
                .map(|w| w.to_string())
                .collect();
            assert_eq!(r.weights, want, "s = {s}");
            assert_eq!(r.weighted_degree, inst.expected.degree.to_string());
            assert_eq!(
                r.aut_tor_surface,
                strings_of_group(&inst.expected.group),
                "s = {s}"
            );
            assert_eq!(
                BigInt::from(r.geometric_genus),
                inst.expected.geometric_genus
            );
            assert_eq!(BigInt::from(r.lambda), inst.expected.lefschetz);
            assert!(r.maximal_picard, "s = {s}");
        }
    }
}
