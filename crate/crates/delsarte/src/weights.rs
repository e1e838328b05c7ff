//! Weight systems of Delsarte polynomials, well-formedness and
//! quasismoothness checks, and the toric automorphism groups.
//!
//! For an exponent matrix `A`, the charge vector is `q = A^-1 * 1`; the
//! weight system is the least integer multiple `a = m q` with integral
//! entries (which forces `gcd(a) = 1`), and the polynomial is then
//! weighted-homogeneous of degree `m` for the weights `a`.  The Fermat
//! degree `d` is the least common denominator of all entries of `A^-1`:
//! the surface is covered by the Fermat surface of degree `d`, and `m | d`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{cokernel, AbelianGroup};
#[cfg(test)]
use crate::mat::IntMat;
use crate::poly::DelsartePolynomial;

/// Charges, weights, and the two degrees attached to a Delsarte polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightSystem {
    /// `q = A^-1 * 1`, as exact rationals.
    pub charges: [BigRational; 4],
    /// `a = m * q`, positive integers with `gcd = 1`.
    pub weights: [BigInt; 4],
    /// Weighted-homogeneous degree `m` (least common denominator of `q`).
    pub m: BigInt,
    /// Fermat cover degree `d` (least common denominator of all of `A^-1`).
    pub d: BigInt,
}

pub fn derive_weight_system(p: &DelsartePolynomial) -> Result<WeightSystem> {
    let inv = p.matrix().rational_inverse()?;
    let charges: [BigRational; 4] = std::array::from_fn(|i| inv.row_sum(i));

    let m = charges.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let weights: [BigInt; 4] = std::array::from_fn(|i| {
        let w = &charges[i] * BigRational::from_integer(m.clone());
        debug_assert!(w.is_integer());
        w.to_integer()
    });
    for (i, w) in weights.iter().enumerate() {
        if !w.is_positive() {
            return Err(Error::NonPositiveWeight {
                index: i,
                value: w.clone(),
            });
        }
    }

    let mut d = BigInt::one();
    for i in 0..4 {
        for j in 0..4 {
            d = d.lcm(inv[(i, j)].denom());
        }
    }

    // Structural invariants: m divides d, A * a = m * 1, gcd(a) = 1.
    debug_assert!(d.mod_floor(&m).is_zero());
    debug_assert!(p.matrix().mul_vec(&weights).iter().all(|x| *x == m));
    debug_assert!(weights
        .iter()
        .fold(BigInt::zero(), |g, w| g.gcd(w))
        .is_one());

    Ok(WeightSystem {
        charges,
        weights,
        m,
        d,
    })
}

/// A coordinate stratum on which a smoothness or well-formedness condition
/// fails, with a human-readable reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StratumFailure {
    pub variables: Vec<usize>,
    pub reason: String,
}

/// Outcome of one of the two checks below.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub ok: bool,
    pub failures: Vec<StratumFailure>,
}

/// Combined verdict used by reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmoothnessVerdict {
    pub well_formed: bool,
    pub quasismooth: bool,
    pub failing_strata: Vec<StratumFailure>,
}

pub fn smoothness_verdict(p: &DelsartePolynomial, ws: &WeightSystem) -> SmoothnessVerdict {
    let wf = check_well_formed(p, ws);
    let qs = check_quasismooth(p);
    let mut failing_strata = wf.failures;
    failing_strata.extend(qs.failures);
    SmoothnessVerdict {
        well_formed: wf.ok,
        quasismooth: qs.ok,
        failing_strata,
    }
}

/// Well-formedness of the pair (ambient space, surface): every triple of
/// weights must be coprime, and for every coordinate pair with a common
/// weight factor the surface must meet the corresponding edge (some monomial
/// supported on that pair), so that the surface contains no singular edge
/// of the ambient space.
pub fn check_well_formed(p: &DelsartePolynomial, ws: &WeightSystem) -> CheckOutcome {
    let mut failures = Vec::new();
    let a = &ws.weights;
    for i in 0..4 {
        for j in i + 1..4 {
            for k in j + 1..4 {
                let g = a[i].gcd(&a[j]).gcd(&a[k]);
                if !g.is_one() {
                    failures.push(StratumFailure {
                        variables: vec![i, j, k],
                        reason: format!(
                            "weights (a{}, a{}, a{}) share the factor {}: \
                             ambient space is not well-formed",
                            i, j, k, g
                        ),
                    });
                }
            }
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let g = a[i].gcd(&a[j]);
            if g.is_one() {
                continue;
            }
            let met = (0..4).any(|r| p.support(r).iter().all(|&v| v == i || v == j));
            if !met {
                failures.push(StratumFailure {
                    variables: vec![i, j],
                    reason: format!(
                        "weights (a{}, a{}) share the factor {} but no monomial \
                         lies on that edge: the surface contains a singular line",
                        i, j, g
                    ),
                });
            }
        }
    }
    CheckOutcome {
        ok: failures.is_empty(),
        failures,
    }
}

/// Quasismoothness of the general member, checked stratum by stratum: for
/// every nonempty variable subset `I`, either some monomial involves only
/// variables of `I`, or there are at least `|I|` monomials of the shape
/// (monomial in `I`) * x_e with pairwise distinct `e` outside `I`.
pub fn check_quasismooth(p: &DelsartePolynomial) -> CheckOutcome {
    let mut failures = Vec::new();
    for mask in 1u32..16 {
        let subset: Vec<usize> = (0..4).filter(|&j| mask & (1 << j) != 0).collect();
        let internal = (0..4).any(|r| p.support(r).iter().all(|v| subset.contains(v)));
        if internal {
            continue;
        }
        let mut transversal: std::collections::BTreeSet<usize> = Default::default();
        for r in 0..4 {
            let outside: Vec<usize> = p
                .support(r)
                .into_iter()
                .filter(|v| !subset.contains(v))
                .collect();
            if let [e] = outside[..] {
                if p.monomial(r)[e].is_one() {
                    transversal.insert(e);
                }
            }
        }
        if transversal.len() < subset.len() {
            failures.push(StratumFailure {
                variables: subset.clone(),
                reason: format!(
                    "no monomial lies in {{{}}} and only {} transversal \
                     monomial(s) meet the stratum (need {})",
                    subset
                        .iter()
                        .map(|v| format!("x{}", v))
                        .collect::<Vec<_>>()
                        .join(", "),
                    transversal.len(),
                    subset.len()
                ),
            });
        }
    }
    CheckOutcome {
        ok: failures.is_empty(),
        failures,
    }
}

/// Diagonal (toric) automorphisms of the affine cone of `f`:
/// the cokernel of the exponent matrix itself, of order `|det A|`.
pub fn aut_tor_f(p: &DelsartePolynomial) -> AbelianGroup {
    cokernel(p.matrix()).expect("exponent matrix is nonsingular")
}

/// Toric automorphisms of the projective surface: the quotient of the cone
/// automorphisms by the scalar subgroup.  Scalars act through the image of
/// the all-ones vector, so this is the cokernel of the 4x5 matrix `[A | 1]`,
/// of order `|det A| / m`.
pub fn aut_tor_x(p: &DelsartePolynomial) -> AbelianGroup {
    let ones = vec![BigInt::one(); 4];
    cokernel(&p.matrix().augment_col(&ones)).expect("augmented exponent matrix has full row rank")
}
