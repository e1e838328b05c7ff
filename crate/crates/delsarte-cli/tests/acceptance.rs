//! The go/no-go gate: ten numbered criteria covering the worked examples,
//! the family sweep, the hollow-simplex table, and the oracle and property
//! suites.  Each criterion prints exactly one PASS/FAIL line (visible
//! under `cargo test -- --nocapture`); the test fails if any criterion
//! misses its expected values or its wall-clock budget.

use std::process::Command;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use delsarte::characters::{
    bottom_slice_avoids_middle, character_set, fermat_report, middle_slice_galois_stable,
    oracle_character_set, stable_middle_via_exponent_units, stable_middle_via_full_units,
    CriterionUsed, SingularityAssumption, DEFAULT_CHARACTER_CAP,
};
use delsarte::family::{elliptic_family, family_fiber_polygon};
use delsarte::mat::IntMat;
use delsarte::newton::{classify_hollow, Pt3, HOLLOW_TABLE};
use delsarte::weights::{derive_weight_system, smoothness_verdict};
use delsarte::{
    analyze, fermat, lefschetz, named_example, newton_polytope, AnalyzeOptions, DelsartePolynomial,
    LatticePolytope,
};
use delsarte_cli::oracle::{run_oracle_check, OracleConfig};

/// Record `msg` as a problem when `cond` fails.
macro_rules! ck {
    ($problems:expr, $cond:expr, $($msg:tt)+) => {
        if !$cond {
            $problems.push(format!($($msg)+));
        }
    };
}

fn opts() -> AnalyzeOptions {
    AnalyzeOptions::default()
}

fn skip_newton() -> AnalyzeOptions {
    AnalyzeOptions {
        skip_newton: true,
        ..AnalyzeOptions::default()
    }
}

/// Draw a random exponent matrix with entries in `0..=3`; `None` when the
/// draw is not a valid surface.
fn random_surface(rng: &mut ChaCha8Rng) -> Option<DelsartePolynomial> {
    let rows: Vec<Vec<BigInt>> = (0..4)
        .map(|_| {
            (0..4)
                .map(|_| BigInt::from(rng.gen_range(0i64..=3)))
                .collect()
        })
        .collect();
    DelsartePolynomial::from_matrix(IntMat::from_rows(rows)).ok()
}

// ---------------------------------------------------------------------------
// The ten criteria.  Each returns the list of problems it found.
// ---------------------------------------------------------------------------

/// Criterion 1: the degree-5 Fermat surface through the CLI: the classical Hodge
/// numbers of the quintic, exactly.
fn c01_fermat_quintic_cli(problems: &mut Vec<String>) {
    let out = Command::new(env!("CARGO_BIN_EXE_delsarte"))
        .args(["fermat", "--d", "5", "--json"])
        .output()
        .expect("binary runs");
    ck!(
        problems,
        out.status.code() == Some(0),
        "exit code {:?}",
        out.status.code()
    );
    let v: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("fermat --json emits JSON");
    for (field, want) in [
        ("lambda", 16),
        ("rho", 37),
        ("b2", 53),
        ("h20", 4),
        ("h11_prim", 44),
    ] {
        ck!(
            problems,
            v[field] == want,
            "{field}: got {}, want {want}",
            v[field]
        );
    }
}

/// Criterion 2: the small-exponent fast path settles Fermat degrees 1, 2, 3, 4, 6.
fn c02_fermat_fast_path(problems: &mut Vec<String>) {
    for d in [1u64, 2, 3, 4, 6] {
        let r = fermat_report(d, DEFAULT_CHARACTER_CAP).expect("small Fermat degree");
        ck!(problems, r.max_picard, "d={d}: not maximal");
        ck!(
            problems,
            r.criterion_used == CriterionUsed::ExponentFastPath,
            "d={d}: decided by {} instead of the fast path",
            r.criterion_used
        );
        if d == 4 {
            ck!(problems, r.lambda == 2, "d=4: lambda {}", r.lambda);
            ck!(problems, r.h20 == 1, "d=4: p_g {}", r.h20);
        }
    }
}

/// Criterion 3: the degree-119 surface: trivial toric group, vanishing invariants,
/// and a rational verdict.
fn c03_degree_119(problems: &mut Vec<String>) {
    let r = analyze(&named_example("X119").unwrap(), &opts()).expect("analysis runs");
    ck!(
        problems,
        r.weights == ["43", "33", "20", "19"],
        "weights {:?}",
        r.weights
    );
    ck!(
        problems,
        r.weighted_degree == "119",
        "m {}",
        r.weighted_degree
    );
    ck!(problems, r.fermat_degree == "119", "d {}", r.fermat_degree);
    ck!(
        problems,
        r.aut_tor_surface.is_empty(),
        "group {:?}",
        r.aut_tor_surface
    );
    ck!(problems, r.quasismooth, "not quasismooth");
    ck!(problems, r.well_formed, "not well-formed");
    ck!(problems, r.lambda == 0, "lambda {}", r.lambda);
    ck!(
        problems,
        r.geometric_genus == 0,
        "p_g {}",
        r.geometric_genus
    );
    ck!(
        problems,
        r.rationality.verdict == "rational",
        "verdict {} ({})",
        r.rationality.verdict,
        r.rationality.reason
    );
}

/// Criterion 4: the degree-12 surface: a non-quasismooth maximal example with group
/// Z/3 + Z/6 and exponent 6.
fn c04_degree_12(problems: &mut Vec<String>) {
    let r = analyze(&named_example("X12").unwrap(), &opts()).expect("analysis runs");
    ck!(
        problems,
        r.weights == ["4", "4", "3", "1"],
        "weights {:?}",
        r.weights
    );
    ck!(
        problems,
        r.weighted_degree == "12",
        "m {}",
        r.weighted_degree
    );
    ck!(problems, r.fermat_degree == "12", "d {}", r.fermat_degree);
    ck!(
        problems,
        r.aut_tor_surface == ["3", "6"],
        "group {:?}",
        r.aut_tor_surface
    );
    ck!(
        problems,
        r.group_exponent == "6",
        "exponent {}",
        r.group_exponent
    );
    ck!(problems, !r.quasismooth, "unexpectedly quasismooth");
    ck!(problems, r.maximal_picard, "not maximal");
    ck!(
        problems,
        r.geometric_genus == 1,
        "p_g {}",
        r.geometric_genus
    );
    ck!(problems, r.lambda == 2, "lambda {}", r.lambda);
}

/// Criterion 5: the degree-30 surface: quasismooth, group Z/6 + Z/6, maximal with
/// p_g = 4.
fn c05_degree_30(problems: &mut Vec<String>) {
    let r = analyze(&named_example("X30").unwrap(), &opts()).expect("analysis runs");
    ck!(
        problems,
        r.weights == ["6", "5", "5", "4"],
        "weights {:?}",
        r.weights
    );
    ck!(
        problems,
        r.weighted_degree == "30",
        "m {}",
        r.weighted_degree
    );
    ck!(
        problems,
        r.aut_tor_surface == ["6", "6"],
        "group {:?}",
        r.aut_tor_surface
    );
    ck!(
        problems,
        r.geometric_genus == 4,
        "p_g {}",
        r.geometric_genus
    );
    ck!(problems, r.lambda == 8, "lambda {}", r.lambda);
    ck!(problems, r.maximal_picard, "not maximal");
    ck!(problems, r.quasismooth, "not quasismooth");
}

/// Criterion 6: the family sweep s = 1..10 matches its closed forms: weights,
/// degree, group Z/4s with the claimed generator in the bottom slice,
/// p_g = s, lambda = 2s, maximal throughout.
fn c06_family_sweep(problems: &mut Vec<String>) {
    for s in 1..=10u64 {
        let inst = elliptic_family(s).expect("family member");
        let r = analyze(&inst.polynomial, &skip_newton()).expect("analysis runs");
        let want_weights: Vec<String> = inst
            .expected
            .weights
            .iter()
            .map(|w| w.to_string())
            .collect();
        ck!(
            problems,
            r.weights == want_weights,
            "s={s}: weights {:?}",
            r.weights
        );
        let want_degree = inst.expected.degree.to_string();
        ck!(
            problems,
            r.weighted_degree == want_degree,
            "s={s}: m {}",
            r.weighted_degree
        );
        ck!(
            problems,
            r.fermat_degree == want_degree,
            "s={s}: d {}",
            r.fermat_degree
        );
        let want_group = vec![(4 * s).to_string()];
        ck!(
            problems,
            r.aut_tor_surface == want_group,
            "s={s}: group {:?}",
            r.aut_tor_surface
        );
        ck!(
            problems,
            r.geometric_genus == s,
            "s={s}: p_g {}",
            r.geometric_genus
        );
        ck!(problems, r.lambda == 2 * s, "s={s}: lambda {}", r.lambda);
        ck!(problems, r.maximal_picard, "s={s}: not maximal");
        ck!(problems, r.quasismooth, "s={s}: not quasismooth");
        ck!(problems, r.well_formed, "s={s}: not well-formed");

        // The closed-form generator really lies in the bottom slice.
        let ws = derive_weight_system(&inst.polynomial).unwrap();
        let cs = character_set(&inst.polynomial, &ws, DEFAULT_CHARACTER_CAP).unwrap();
        ck!(
            problems,
            cs.group() == &inst.expected.group,
            "s={s}: group mismatch"
        );
        let d = BigInt::from(cs.d());
        let w: [u64; 4] = std::array::from_fn(|i| {
            u64::try_from(&inst.expected.generator[i].mod_floor(&d)).unwrap()
        });
        ck!(
            problems,
            cs.slice(0).any(|a| *a == w),
            "s={s}: generator {w:?} not in the bottom slice"
        );
    }
}

/// Criterion 7: the four hollow simplices with nonempty Fine interior classify
/// against the table with the right vertex quotients, and the verdicts
/// survive random unimodular changes of coordinates.
fn c07_hollow_table(problems: &mut Vec<String>) {
    let expected_quotients: [(u32, [i64; 2]); 4] =
        [(4, [4, 8]), (5, [4, 4]), (9, [3, 9]), (12, [5, 5])];
    let mut rng = ChaCha8Rng::seed_from_u64(0x7AB1E);

    for (entry, (id, quotient)) in HOLLOW_TABLE.iter().zip(expected_quotients) {
        assert_eq!(entry.id, id, "table order is fixed");
        let want: Vec<BigInt> = quotient.iter().map(|&f| BigInt::from(f)).collect();

        for trial in 0..21 {
            // Trial 0 is the table entry verbatim; the rest apply a random
            // unimodular map plus a translation.
            let (t, shift) = if trial == 0 {
                ([[1, 0, 0], [0, 1, 0], [0, 0, 1]], [0i64; 3])
            } else {
                (
                    random_unimodular(&mut rng),
                    std::array::from_fn(|_| rng.gen_range(-4i64..=4)),
                )
            };
            let points: Vec<Pt3> = entry
                .vertices
                .iter()
                .map(|v| {
                    std::array::from_fn(|i| {
                        BigInt::from(t[i][0] * v[0] + t[i][1] * v[1] + t[i][2] * v[2] + shift[i])
                    })
                })
                .collect();
            let poly = LatticePolytope::from_points(&points).expect("simplex builds");
            let c = classify_hollow(&poly).expect("classification runs");
            ck!(
                problems,
                c.is_hollow,
                "simplex {id}, trial {trial}: not hollow"
            );
            ck!(
                problems,
                c.fine_nonempty,
                "simplex {id}, trial {trial}: empty Fine interior"
            );
            ck!(
                problems,
                c.table_match == Some(id),
                "simplex {id}, trial {trial}: matched {:?}",
                c.table_match
            );
            let got = c.quotient_group.as_ref().map(|g| g.factors().to_vec());
            ck!(
                problems,
                got.as_deref() == Some(&want[..]),
                "simplex {id}, trial {trial}: quotient {got:?}"
            );
        }
    }
}

/// A random product of four elementary shears: always determinant one.
fn random_unimodular(rng: &mut ChaCha8Rng) -> [[i64; 3]; 3] {
    let mut t = [[1i64, 0, 0], [0, 1, 0], [0, 0, 1]];
    for _ in 0..4 {
        let i = rng.gen_range(0usize..3);
        let j = (i + rng.gen_range(1usize..3)) % 3;
        let c = rng.gen_range(-2i64..=2);
        // t <- E t where E is the shear with entry c at (i, j).
        let row: [i64; 3] = std::array::from_fn(|k| t[i][k] + c * t[j][k]);
        t[i] = row;
    }
    t
}

/// Criterion 8: the fiber polygon of the family has genus one for s = 1..5.
fn c08_fiber_polygon(problems: &mut Vec<String>) {
    for s in 1..=5u64 {
        let polygon = family_fiber_polygon(s).expect("fiber polygon builds");
        let interior = polygon
            .interior_points()
            .expect("interior enumerates")
            .len();
        ck!(problems, interior == 1, "s={s}: {interior} interior points");
    }
}

/// Criterion 9: the brute-force oracles agree with the production code: character
/// sets and both cokernel computations, over the fixtures with degree at
/// most 12 and fifty seeded random surfaces.
fn c09_oracle_agreement(problems: &mut Vec<String>) {
    let cfg = OracleConfig {
        d_max: 12,
        random_count: 50,
        seed: 2024,
        ..OracleConfig::default()
    };
    let out = run_oracle_check(&cfg).expect("oracle harness runs");
    ck!(
        problems,
        out.mismatches.is_empty(),
        "{} oracle disagreement(s): {:?}",
        out.mismatches.len(),
        out.mismatches
    );
    ck!(
        problems,
        out.surfaces_checked >= 61,
        "only {} surfaces checked",
        out.surfaces_checked
    );

    // The harness caps its Fermat sweep at degree 10; cover 11 and 12 too.
    for d in [11u64, 12] {
        let p = fermat(d).unwrap();
        let ws = derive_weight_system(&p).unwrap();
        let cs = character_set(&p, &ws, DEFAULT_CHARACTER_CAP).unwrap();
        let oracle = oracle_character_set(&p, &ws, 12).expect("within the oracle bound");
        ck!(
            problems,
            cs.elements() == oracle,
            "fermat d={d}: character sets differ"
        );
    }
}

/// Criterion 10: the structural invariants hold across a mixed corpus: the Lefschetz
/// bound, slice symmetry, equivalence of the two stability conditions, the
/// unit-group reduction, and the interior-point count of the Newton
/// polytope on quasismooth surfaces.
fn c10_property_corpus(problems: &mut Vec<String>) {
    let mut corpus: Vec<(String, DelsartePolynomial)> = Vec::new();
    for id in delsarte::family::NAMED_EXAMPLES {
        corpus.push((id.to_string(), named_example(id).unwrap()));
    }
    for d in 1..=8u64 {
        corpus.push((format!("fermat-{d}"), fermat(d).unwrap()));
    }
    for s in 1..=3u64 {
        corpus.push((
            format!("family-{s}"),
            elliptic_family(s).unwrap().polynomial,
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0DE);
    let mut drawn = 0;
    while drawn < 50 {
        let Some(p) = random_surface(&mut rng) else {
            continue;
        };
        if derive_weight_system(&p).is_err() {
            continue;
        }
        corpus.push((format!("random-{drawn}"), p));
        drawn += 1;
    }

    for (name, p) in &corpus {
        let ws = derive_weight_system(p).unwrap();
        let cs = character_set(p, &ws, DEFAULT_CHARACTER_CAP).unwrap();
        let lef = lefschetz(&cs, SingularityAssumption::QuasismoothVerified);
        ck!(
            problems,
            lef.lambda >= 2 * lef.p_g,
            "{name}: lambda {} below 2 p_g {}",
            lef.lambda,
            lef.p_g
        );
        ck!(
            problems,
            cs.slice_size(0) == cs.slice_size(2),
            "{name}: |S_0| = {} but |S_2| = {}",
            cs.slice_size(0),
            cs.slice_size(2)
        );
        ck!(
            problems,
            middle_slice_galois_stable(&cs) == bottom_slice_avoids_middle(&cs),
            "{name}: stability conditions disagree"
        );
        ck!(
            problems,
            lef.max_picard == (lef.lambda == 2 * lef.p_g),
            "{name}: maximality flag inconsistent"
        );
    }

    // The reduced unit scan equals the full one on fifty more draws.
    let mut reduced_checked = 0;
    while reduced_checked < 50 {
        let Some(p) = random_surface(&mut rng) else {
            continue;
        };
        let Ok(ws) = derive_weight_system(&p) else {
            continue;
        };
        if u64::try_from(&ws.d).map_or(true, |d| d > 30) {
            continue;
        }
        let cs = character_set(&p, &ws, DEFAULT_CHARACTER_CAP).unwrap();
        let full = stable_middle_via_full_units(&cs).expect("d is small");
        let reduced = stable_middle_via_exponent_units(&cs);
        ck!(
            problems,
            full == reduced,
            "d={}: full unit scan {} vs reduced {}",
            cs.d(),
            full,
            reduced
        );
        reduced_checked += 1;
    }

    // Interior lattice points of the Newton polytope count the bottom
    // slice on every quasismooth fixture.
    for (name, p) in &corpus {
        let ws = derive_weight_system(p).unwrap();
        if !smoothness_verdict(p, &ws).quasismooth {
            continue;
        }
        let cs = character_set(p, &ws, DEFAULT_CHARACTER_CAP).unwrap();
        let poly = newton_polytope(p, &ws).expect("polytope builds");
        let interior = poly.interior_points().expect("interior enumerates").len() as u64;
        ck!(
            problems,
            interior == cs.slice_size(0),
            "{name}: {interior} interior points but |S_0| = {}",
            cs.slice_size(0)
        );
    }
}

// ---------------------------------------------------------------------------
// The gate.
// ---------------------------------------------------------------------------

/// A criterion: display label, wall-clock budget in milliseconds, body.
type Criterion = (&'static str, u128, fn(&mut Vec<String>));

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("fermat quintic via the CLI", 1_000, c01_fermat_quintic_cli),
        ("small-exponent fast path", 1_000, c02_fermat_fast_path),
        ("degree-119 rational surface", 1_000, c03_degree_119),
        ("degree-12 non-quasismooth surface", 1_000, c04_degree_12),
        ("degree-30 quasismooth surface", 1_000, c05_degree_30),
        ("family sweep s = 1..10", 5_000, c06_family_sweep),
        ("hollow simplex table", 5_000, c07_hollow_table),
        ("family fiber polygon", 1_000, c08_fiber_polygon),
        ("oracle agreement", 60_000, c09_oracle_agreement),
        ("property corpus", 60_000, c10_property_corpus),
    ];

    let mut failed = 0;
    for (i, (label, budget_ms, body)) in criteria.iter().enumerate() {
        let mut problems = Vec::new();
        let start = Instant::now();
        body(&mut problems);
        let elapsed = start.elapsed();
        if elapsed.as_millis() > *budget_ms {
            problems.push(format!(
                "took {} ms, budget {} ms",
                elapsed.as_millis(),
                budget_ms
            ));
        }
        let verdict = if problems.is_empty() { "PASS" } else { "FAIL" };
        println!(
            "criterion {:02} {} ({:>5} ms)  {}",
            i + 1,
            verdict,
            elapsed.as_millis(),
            label
        );
        for problem in &problems {
            println!("    - {problem}");
            failed += 1;
        }
    }
    assert_eq!(
        failed, 0,
        "{failed} acceptance problem(s); see the list above"
    );
}
