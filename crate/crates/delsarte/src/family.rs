//! Generators for standard surfaces: Fermat surfaces, the worked examples,
//! and the one-parameter family of maximal surfaces fibered in elliptic
//! curves.

use num_bigint::BigInt;
use num_traits::One;

use crate::error::{Error, Result};
use crate::group::AbelianGroup;
use crate::mat::IntMat;
use crate::newton::{express_in_basis, LatticePolygon, Pt2};
use crate::poly::DelsartePolynomial;

/// The Fermat surface of degree `d`: `x0^d + x1^d + x2^d + x3^d`.
pub fn fermat(d: u64) -> Result<DelsartePolynomial> {
    if d == 0 {
        return Err(Error::InvalidParameter("degree must be positive".into()));
    }
    DelsartePolynomial::from_matrix(IntMat::scalar(4, &BigInt::from(d)))
}

/// IDs accepted by [`named_example`].
pub const NAMED_EXAMPLES: [&str; 4] = ["X119", "X12", "X30", "X36"];

/// Worked examples referred to by name throughout the test suite and CLI.
pub fn named_example(id: &str) -> Result<DelsartePolynomial> {
    let rows: [[i64; 4]; 4] = if id.eq_ignore_ascii_case("X119") {
        // Degree-119 cyclic quintic-like surface with trivial toric group.
        [[2, 1, 0, 0], [0, 3, 1, 0], [0, 0, 5, 1], [1, 0, 0, 4]]
    } else if id.eq_ignore_ascii_case("X12") {
        // Degree 12 in P(4, 4, 3, 1); fails quasismoothness on one stratum.
        [[3, 0, 0, 0], [0, 3, 0, 0], [0, 0, 4, 0], [0, 0, 2, 6]]
    } else if id.eq_ignore_ascii_case("X30") {
        // Degree 30 in P(6, 5, 5, 4); quasismooth, lambda = 8.
        [[5, 0, 0, 0], [0, 6, 0, 0], [0, 0, 6, 0], [1, 0, 0, 6]]
    } else if id.eq_ignore_ascii_case("X36") {
        // Degree 36 in P(9, 7, 8, 12); the s = 1 member of the family.
        [[4, 0, 0, 0], [0, 4, 1, 0], [0, 0, 3, 1], [0, 0, 0, 3]]
    } else {
        return Err(Error::UnknownExample(id.to_string()));
    };
    DelsartePolynomial::from_matrix(IntMat::from_i64s(rows))
}

/// Closed-form invariants of a family member, for cross-checking the
/// general machinery.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpectedInvariants {
    pub weights: [BigInt; 4],
    /// Weighted degree; equals the Fermat degree for this family.
    pub degree: BigInt,
    pub group: AbelianGroup,
    /// A character generating the group, listed by its four residues.
    pub generator: [BigInt; 4],
    pub geometric_genus: BigInt,
    pub lefschetz: BigInt,
}

/// A member of the family together with its closed-form invariants.
#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub s: u64,
    pub polynomial: DelsartePolynomial,
    pub expected: ExpectedInvariants,
}

/// The family member with parameter `s >= 1`:
///
/// ```text
/// x0^(4s) + x1^(4s) x2 + x2^(2s+1) x3 + x3^(2s+1)
/// ```
///
/// of degree `4s(2s+1)^2` in `P((2s+1)^2, 4s^2+2s+1, 8s^2, 4s(2s+1))`,
/// with toric group `Z/4s`, geometric genus `s`, and Lefschetz number `2s`.
pub fn elliptic_family(s: u64) -> Result<FamilyInstance> {
    if s == 0 {
        return Err(Error::InvalidParameter(
            "family parameter must be positive".into(),
        ));
    }
    let sb = BigInt::from(s);
    let t: BigInt = BigInt::from(2) * &sb + 1; // 2s + 1
    let rows = vec![
        vec![
            BigInt::from(4) * &sb,
            BigInt::from(0),
            BigInt::from(0),
            BigInt::from(0),
        ],
        vec![
            BigInt::from(0),
            BigInt::from(4) * &sb,
            BigInt::one(),
            BigInt::from(0),
        ],
        vec![BigInt::from(0), BigInt::from(0), t.clone(), BigInt::one()],
        vec![BigInt::from(0), BigInt::from(0), BigInt::from(0), t.clone()],
    ];
    let polynomial = DelsartePolynomial::from_matrix(IntMat::from_rows(rows))?;

    let t2 = &t * &t;
    let weights = [
        t2.clone(),
        BigInt::from(4) * &sb * &sb + BigInt::from(2) * &sb + 1,
        BigInt::from(8) * &sb * &sb,
        BigInt::from(4) * &sb * &t,
    ];
    let degree = BigInt::from(4) * &sb * &t2;
    let generator = [
        (BigInt::from(2) * &sb - 1) * &t2,
        t2.clone(),
        (BigInt::from(2) * &sb - 1) * &t2,
        t2.clone(),
    ];
    let expected = ExpectedInvariants {
        weights,
        degree,
        group: AbelianGroup::from_invariant_factors(vec![BigInt::from(4) * &sb]),
        generator,
        geometric_genus: sb.clone(),
        lefschetz: BigInt::from(2) * &sb,
    };
    Ok(FamilyInstance {
        s,
        polynomial,
        expected,
    })
}

/// The fiber polygon of the family member's elliptic fibration: translate
/// the exponent rows into the weight-orthogonal lattice and project along
/// the fibration direction `(2, -2, 1, -1)`.  The result has genus one for
/// every `s`, witnessing elliptic fibers.
pub fn family_fiber_polygon(s: u64) -> Result<LatticePolygon> {
    let inst = elliptic_family(s)?;
    let ws = crate::weights::derive_weight_system(&inst.polynomial)?;

    let a_row = IntMat::from_rows(vec![ws.weights.to_vec()]);
    let k = a_row.kernel_basis();

    // The fibration direction, expressed in the same basis of the
    // orthogonal lattice (it is orthogonal to the weights for every s).
    let u: Vec<BigInt> = [2i64, -2, 1, -1].iter().map(|&x| BigInt::from(x)).collect();
    let z = express_in_basis(&k, &u);

    // Complete z to a basis: a unimodular U with U z = +-e1 exists because
    // z is primitive; the projection drops the first coordinate.
    let zmat = IntMat::from_rows(vec![
        vec![z[0].clone()],
        vec![z[1].clone()],
        vec![z[2].clone()],
    ]);
    let snf = zmat.smith_normal_form();
    assert!(
        snf.diagonal()[0].is_one(),
        "fibration direction is primitive"
    );

    let matrix = inst.polynomial.matrix();
    let mut images: Vec<Pt2> = Vec::with_capacity(4);
    for i in 0..4 {
        let diff: Vec<BigInt> = (0..4).map(|j| &matrix[(i, j)] - &matrix[(0, j)]).collect();
        let x = express_in_basis(&k, &diff);
        let ux = snf.u.mul_vec(x.as_ref());
        images.push([ux[1].clone(), ux[2].clone()]);
    }
    LatticePolygon::from_points(&images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn fermat_matrix_is_scalar() {
        let p = fermat(5).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j {
                    BigInt::from(5)
                } else {
                    BigInt::zero()
                };
                assert_eq!(p.matrix()[(i, j)], want);
            }
        }
        assert!(matches!(fermat(0).unwrap_err(), Error::InvalidParameter(_)));
    }

    #[test]
    fn fermat_weight_system_is_trivial() {
        let ws = crate::weights::derive_weight_system(&fermat(7).unwrap()).unwrap();
        assert!(ws.weights.iter().all(|w| w.is_one()));
        assert_eq!(ws.m, BigInt::from(7));
        assert_eq!(ws.d, BigInt::from(7));
    }

    #[test]
    fn named_examples_parse_and_misses_error() {
        for id in NAMED_EXAMPLES {
            named_example(id).unwrap();
        }
        named_example("x30").unwrap();
        assert_eq!(
            named_example("X31").unwrap_err(),
            Error::UnknownExample("X31".into())
        );
    }

    #[test]
    fn family_one_is_the_degree_36_example() {
        let inst = elliptic_family(1).unwrap();
        assert_eq!(
            inst.polynomial.matrix(),
            named_example("X36").unwrap().matrix()
        );
        let w: Vec<i64> = vec![9, 7, 8, 12];
        for (got, want) in inst.expected.weights.iter().zip(w) {
            assert_eq!(got, &BigInt::from(want));
        }
        assert_eq!(inst.expected.degree, BigInt::from(36));
        assert_eq!(inst.expected.group, AbelianGroup::from_i64s(&[4]));
        assert_eq!(
            inst.expected.generator,
            [
                BigInt::from(9),
                BigInt::from(9),
                BigInt::from(9),
                BigInt::from(9)
            ]
        );
        assert!(matches!(
            elliptic_family(0).unwrap_err(),
            Error::InvalidParameter(_)
        ));
    }

    #[test]
    fn family_closed_forms_match_derivation() {
        for s in 1..=4u64 {
            let inst = elliptic_family(s).unwrap();
            let ws = crate::weights::derive_weight_system(&inst.polynomial).unwrap();
            assert_eq!(ws.weights, inst.expected.weights, "s = {s}");
            assert_eq!(ws.m, inst.expected.degree, "s = {s}");
            assert_eq!(ws.d, inst.expected.degree, "s = {s}");
            let g = crate::weights::aut_tor_x(&inst.polynomial);
            assert_eq!(g, inst.expected.group, "s = {s}");
        }
    }

    #[test]
    fn family_two_weights() {
        let inst = elliptic_family(2).unwrap();
        let w: Vec<i64> = vec![25, 21, 32, 40];
        for (got, want) in inst.expected.weights.iter().zip(w) {
            assert_eq!(got, &BigInt::from(want));
        }
        assert_eq!(inst.expected.degree, BigInt::from(200));
    }

    #[test]
    fn fiber_polygon_has_genus_one() {
        for s in 1..=3u64 {
            let polygon = family_fiber_polygon(s).unwrap();
            assert_eq!(polygon.genus().unwrap(), 1, "s = {s}");
        }
    }
}
