//! The `oracle-check` harness: recompute invariants of a corpus of small
//! surfaces with the slow, independent oracles and compare.
//!
//! Two oracles are exercised.  The character oracle enumerates the full
//! residue cube `(Z/d)^4` and closes over the rows of `d A^{-1}` directly;
//! the group oracle reads off the abelian structure of a cokernel by
//! counting element orders.  Both are exponential-ish in `d`, hence the
//! hard ceiling on `--d-max`.

use delsarte::characters::{character_set, oracle_character_set};
use delsarte::group::{cokernel, group_structure_by_counting};
use delsarte::weights::derive_weight_system;
use delsarte::{named_example, DelsartePolynomial, Error, IntMat, Result};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Largest Fermat degree the oracles will enumerate: `d^4` residues.
pub const D_MAX_CEILING: u64 = 30;

/// Element bound handed to the order-counting group oracle.
const COUNTING_BOUND: u64 = 200_000;

#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Skip any surface whose Fermat degree exceeds this (cap 30).
    pub d_max: u64,
    /// Number of random matrices to draw on top of the fixtures.
    pub random_count: u64,
    pub seed: u64,
    pub character_cap: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            d_max: 12,
            random_count: 25,
            seed: 0,
            character_cap: delsarte::characters::DEFAULT_CHARACTER_CAP,
        }
    }
}

/// Result of a full oracle run.
#[derive(Debug, Clone, Default)]
pub struct OracleOutcome {
    /// Surfaces whose character sets were compared.
    pub surfaces_checked: u64,
    /// Cokernels whose group structure was compared.
    pub groups_checked: u64,
    /// Fixtures or draws skipped because their degree exceeds `d_max`.
    pub skipped: u64,
    /// Human-readable descriptions of any disagreements.
    pub mismatches: Vec<String>,
}

fn check_surface(label: &str, p: &DelsartePolynomial, cfg: &OracleConfig, out: &mut OracleOutcome) {
    let ws = match derive_weight_system(p) {
        Ok(ws) => ws,
        Err(e) => {
            out.mismatches
                .push(format!("{label}: weight derivation failed: {e}"));
            return;
        }
    };
    if ws.d > BigInt::from(cfg.d_max) {
        out.skipped += 1;
        return;
    }

    // Character sets: fast enumeration against the residue-cube oracle.
    let fast = match character_set(p, &ws, cfg.character_cap) {
        Ok(cs) => cs,
        Err(e) => {
            out.mismatches.push(format!("{label}: character set: {e}"));
            return;
        }
    };
    let slow = match oracle_character_set(p, &ws, cfg.d_max) {
        Ok(v) => v,
        Err(e) => {
            out.mismatches.push(format!("{label}: oracle: {e}"));
            return;
        }
    };
    let mut fast_elements = fast.elements().to_vec();
    fast_elements.sort();
    if fast_elements != slow {
        out.mismatches.push(format!(
            "{label}: character sets disagree ({} fast vs {} oracle)",
            fast_elements.len(),
            slow.len()
        ));
    }
    out.surfaces_checked += 1;

    // Group structures: Smith form against order counting, for both the
    // polynomial and surface symmetry groups.
    let a = p.matrix().clone();
    let ones: Vec<BigInt> = vec![BigInt::from(1); 4];
    for (tag, m) in [
        ("coker A", a.clone()),
        ("coker [A|1]", a.augment_col(&ones)),
    ] {
        match (
            cokernel(&m),
            group_structure_by_counting(&m, COUNTING_BOUND),
        ) {
            (Ok(lhs), Ok(rhs)) => {
                if lhs != rhs {
                    out.mismatches.push(format!(
                        "{label}: {tag}: smith form {:?} vs counted {:?}",
                        lhs.factors(),
                        rhs.factors()
                    ));
                }
                out.groups_checked += 1;
            }
            (Err(e), _) | (_, Err(e)) => {
                out.mismatches.push(format!("{label}: {tag}: {e}"));
            }
        }
    }
}

/// Run the harness: named fixtures, Fermat surfaces, then seeded random
/// matrices, all filtered to `d <= d_max`.
pub fn run_oracle_check(cfg: &OracleConfig) -> Result<OracleOutcome> {
    if cfg.d_max == 0 || cfg.d_max > D_MAX_CEILING {
        return Err(Error::InvalidParameter(format!(
            "--d-max must be between 1 and {D_MAX_CEILING}"
        )));
    }
    let mut out = OracleOutcome::default();

    for id in delsarte::family::NAMED_EXAMPLES {
        let p = named_example(id)?;
        check_surface(id, &p, cfg, &mut out);
    }
    for d in 1..=cfg.d_max.min(10) {
        let p = delsarte::fermat(d)?;
        check_surface(&format!("fermat-{d}"), &p, cfg, &mut out);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut accepted = 0u64;
    let mut attempts = 0u64;
    while accepted < cfg.random_count {
        attempts += 1;
        if attempts > 2_000_000 {
            return Err(Error::Unsupported(
                "random corpus generation stalled".into(),
            ));
        }
        let rows: Vec<Vec<BigInt>> = (0..4)
            .map(|_| {
                (0..4)
                    .map(|_| BigInt::from(rng.gen_range(0i64..=3)))
                    .collect()
            })
            .collect();
        let Ok(p) = DelsartePolynomial::from_matrix(IntMat::from_rows(rows)) else {
            continue;
        };
        let Ok(ws) = derive_weight_system(&p) else {
            continue;
        };
        if ws.d > BigInt::from(cfg.d_max) {
            continue;
        }
        let d = u64::try_from(&ws.d).expect("d fits after the bound check");
        check_surface(&format!("random-{accepted}-d{d}"), &p, cfg, &mut out);
        accepted += 1;
    }
    Ok(out)
}
