//! The character space of a Delsarte surface and the Lefschetz number of its
//! transcendental part.
//!
//! For a surface with exponent matrix `A` and Fermat degree `d`, put
//! `B = d A^-1`.  Inside `(Z/d)^4` the relevant characters are
//!
//! ```text
//! A = { alpha in (rows of B) + d Z^4  :  alpha_0 + ... + alpha_3 = 0 mod d } / d Z^4,
//! ```
//!
//! a finite abelian group isomorphic to the toric automorphism group of the
//! surface.  Characters with all coordinates nonzero (the interior `A°`)
//! carry the primitive cohomology of the quotient; their coordinate sum is
//! `d`, `2d` or `3d`, which splits `A°` into slices `S_0, S_1, S_2` with
//! `|S_0| = |S_2|` (conjugation).  `S_0` computes the geometric genus, and
//! the count of middle-slice characters whose whole Galois orbit stays in
//! the middle computes the Lefschetz number
//!
//! ```text
//! lambda = |A°| - #{ alpha in A° : t*alpha in S_1 for all units t }.
//! ```
//!
//! The surface has maximal Picard number exactly when `lambda = 2 p_g`,
//! equivalently when no unit multiple of an `S_0` character lands in `S_1`.
//! Because the unit action on `A` factors through `(Z/e)*` for `e` the
//! exponent of the group, orbits are scanned over lifted units of `Z/e`,
//! and for `e` in {1, 2, 3, 4, 6} — where `(Z/e)*` is generated by `-1` —
//! maximality holds with no scan at all.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{cokernel, AbelianGroup};
use crate::mat::{ColumnLattice, IntMat};
use crate::poly::DelsartePolynomial;
use crate::weights::WeightSystem;

/// Default bound on `|A|` before `character_set` refuses to enumerate.
pub const DEFAULT_CHARACTER_CAP: u64 = 10_000_000;

/// A character: a vector in `(Z/d)^4` with coordinates reduced to `[0, d)`.
pub type CharVec = [u64; 4];

/// The fully enumerated character space of a surface.
#[derive(Debug, Clone)]
pub struct CharacterSet {
    d: u64,
    group: AbelianGroup,
    /// One generator per invariant factor, in matching order.
    generators: Vec<CharVec>,
    /// All of `A`, sorted.
    elements: Vec<CharVec>,
    /// The interior `A°` (no zero coordinate), sorted.
    interior: Vec<CharVec>,
    slice_sizes: [u64; 3],
}

impl CharacterSet {
    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn generators(&self) -> &[CharVec] {
        &self.generators
    }

    pub fn elements(&self) -> &[CharVec] {
        &self.elements
    }

    pub fn interior(&self) -> &[CharVec] {
        &self.interior
    }

    /// `|S_p|` for `p` in 0..3.
    pub fn slice_size(&self, p: usize) -> u64 {
        self.slice_sizes[p]
    }

    /// The slice `S_p`: interior characters with coordinate sum `(p+1) d`.
    pub fn slice(&self, p: usize) -> impl Iterator<Item = &CharVec> {
        let target = (p as u64 + 1) * self.d;
        self.interior.iter().filter(move |a| coord_sum(a) == target)
    }
}

fn coord_sum(a: &CharVec) -> u64 {
    a.iter().sum()
}

fn add_mod(a: &CharVec, b: &CharVec, d: u64) -> CharVec {
    std::array::from_fn(|i| {
        let s = a[i] + b[i];
        if s >= d {
            s - d
        } else {
            s
        }
    })
}

fn scale_mod(t: u64, a: &CharVec, d: u64) -> CharVec {
    std::array::from_fn(|i| ((t as u128 * a[i] as u128) % d as u128) as u64)
}

fn downcast_d(d: &BigInt) -> Result<u64> {
    d.to_u64()
        .filter(|&d| d <= 1 << 62)
        .ok_or_else(|| Error::Unsupported(format!("Fermat degree {} too large to enumerate", d)))
}

/// Construct the character space.  Errors with `CapExceeded` — before any
/// enumeration — when `|A|` exceeds `cap`.
pub fn character_set(p: &DelsartePolynomial, ws: &WeightSystem, cap: u64) -> Result<CharacterSet> {
    let d_small = downcast_d(&ws.d)?;
    let d = &ws.d;

    // B = d A^-1 is integral by the choice of d.
    let b = p
        .matrix()
        .rational_inverse()?
        .scale(&num_rational::BigRational::from_integer(d.clone()))
        .to_int_checked()
        .expect("d clears all denominators of A^-1");

    // Lattice L0 = (columns of B^T) + d Z^4, i.e. the characters of the
    // quotient group before the degree condition, as a Hermite basis.
    let bt_di = b.transpose().hstack(&IntMat::scalar(4, d));
    let h = ColumnLattice::new(&bt_di)?.basis();

    // Degree condition: an element H y of L0 is a surface character iff its
    // coordinate sum c . y is divisible by d.  The solution lattice of
    // c . y = 0 mod d is spanned by the first four rows of the kernel basis
    // of the 1x5 system [c | d].
    let c: Vec<BigInt> = (0..4)
        .map(|j| (0..4).map(|i| h[(i, j)].clone()).sum())
        .collect();
    let mut cd = IntMat::zero(1, 5);
    for (j, cj) in c.iter().enumerate() {
        cd[(0, j)] = cj.clone();
    }
    cd[(0, 4)] = d.clone();
    let k5 = cd.kernel_basis();
    debug_assert_eq!((k5.rows(), k5.cols()), (5, 4));
    let mut ky = IntMat::zero(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            ky[(i, j)] = k5[(i, j)].clone();
        }
    }

    // L = H K_y is a basis of the character lattice; the group is
    // A = L / d Z^4 = Z^4 / W Z^4 for W = L^-1 (d I), which is integral
    // because d Z^4 lies inside L.
    let l = h.mul(&ky);
    let w = l
        .rational_inverse()?
        .mul_int(&IntMat::scalar(4, d))
        .to_int_checked()
        .expect("d Z^4 is contained in the character lattice");

    let snf = w.smith_normal_form();
    let diag = snf.diagonal();
    let order: BigInt = diag.iter().product();
    debug_assert!(!order.is_zero());
    if order > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            order,
            cap: BigInt::from(cap),
        });
    }
    let group = AbelianGroup::from_invariant_factors(diag.clone());

    // Generators: the cyclic factor Z/diag[i] of Z^4 / W Z^4 is generated by
    // U^-1 e_i, which maps to the character L U^-1 e_i mod d.
    let uinv = snf
        .u
        .rational_inverse()?
        .to_int_checked()
        .expect("U is unimodular");
    let gmat = l.mul(&uinv);
    let reduce = |col: usize| -> CharVec {
        std::array::from_fn(|i| gmat[(i, col)].mod_floor(d).to_u64().expect("reduced mod d"))
    };
    let all_gens: Vec<CharVec> = (0..4).map(reduce).collect();
    let generators: Vec<CharVec> = (0..4)
        .filter(|&i| !diag[i].is_one())
        .map(|i| all_gens[i])
        .collect();

    // Mixed-radix enumeration: alpha = sum k_i g_i with 0 <= k_i < diag[i].
    let radices: Vec<u64> = diag
        .iter()
        .map(|x| x.to_u64().expect("bounded by cap"))
        .collect();
    let mut elements = Vec::with_capacity(order.to_usize().unwrap_or(0));
    let mut digits = [0u64; 4];
    let mut current = [0u64; 4];
    loop {
        elements.push(current);
        let mut i = 0;
        while i < 4 {
            digits[i] += 1;
            if digits[i] < radices[i] {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == 4 {
            break;
        }
        if i == 0 {
            current = add_mod(&current, &all_gens[0], d_small);
        } else {
            // Carry reset: recompute from digits (rare; cost is fine).
            current = [0, 0, 0, 0];
            for (j, &k) in digits.iter().enumerate() {
                let s = scale_mod(k, &all_gens[j], d_small);
                current = add_mod(&current, &s, d_small);
            }
        }
    }
    debug_assert_eq!(BigInt::from(elements.len()), order);
    elements.sort_unstable();
    debug_assert!(
        elements.windows(2).all(|w| w[0] != w[1]),
        "duplicate characters"
    );

    let interior: Vec<CharVec> = elements
        .iter()
        .copied()
        .filter(|a| a.iter().all(|&x| x != 0))
        .collect();
    let mut slice_sizes = [0u64; 3];
    for a in &interior {
        let s = coord_sum(a);
        debug_assert!(s.is_multiple_of(d_small) && (1..=3).contains(&(s / d_small)));
        slice_sizes[(s / d_small - 1) as usize] += 1;
    }

    Ok(CharacterSet {
        d: d_small,
        group,
        generators,
        elements,
        interior,
        slice_sizes,
    })
}

/// Unit group of `Z/e`, as representatives in `[1, e]` (for `e = 1` this is
/// just `{1}`).
pub fn units_modulo(e: u64) -> Vec<u64> {
    assert!(e >= 1);
    (1..=e).filter(|&u| u.gcd(&e) == 1).collect()
}

/// Lift a unit of `Z/e` to a unit of `Z/d` in the same class mod `e`
/// (requires `e | d`).  The walk `u, u+e, u+2e, ...` covers a full residue
/// system mod `d` within the class, so a coprime representative exists.
pub fn lift_unit(u: u64, e: u64, d: u64) -> u64 {
    debug_assert!(e >= 1 && d >= 1 && d.is_multiple_of(e));
    let mut t = u;
    while t.gcd(&d) != 1 {
        t += e;
        assert!(t <= u + d, "no coprime lift found");
    }
    t
}

/// How a surface's singularities were accounted for in a Lefschetz run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityAssumption {
    QuasismoothVerified,
    QuotientSingularitiesAssumed,
}

impl std::fmt::Display for SingularityAssumption {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::QuasismoothVerified => write!(f, "quasismooth-verified"),
            Self::QuotientSingularitiesAssumed => write!(f, "quotient-singularities-assumed"),
        }
    }
}

/// Which argument decided maximality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriterionUsed {
    ExponentFastPath,
    GaloisOrbit,
}

impl std::fmt::Display for CriterionUsed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::ExponentFastPath => write!(f, "exponent-fast-path"),
            Self::GaloisOrbit => write!(f, "galois-orbit"),
        }
    }
}

/// Verdict of the exponent shortcut: for `e <= 3` the surface is maximal
/// and rational; for `e` in {4, 6} maximal (rationality open); otherwise
/// the orbit scan must decide.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FastPathVerdict {
    MaxPicardAndRational,
    MaxPicard,
    NoConclusion,
}

pub fn exponent_fast_path(e: &BigInt) -> FastPathVerdict {
    match e.to_u64() {
        Some(1) | Some(2) | Some(3) => FastPathVerdict::MaxPicardAndRational,
        Some(4) | Some(6) => FastPathVerdict::MaxPicard,
        _ => FastPathVerdict::NoConclusion,
    }
}

/// Everything the Lefschetz computation produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LefschetzResult {
    pub lambda: u64,
    pub p_g: u64,
    pub interior_size: u64,
    /// Characters of `A°` whose whole unit orbit stays in the middle slice.
    pub stable_middle: u64,
    pub max_picard: bool,
    pub criterion_used: CriterionUsed,
    pub exponent_e: BigInt,
    pub assumption: SingularityAssumption,
}

/// Count interior characters whose whole orbit (under the given unit
/// multipliers mod `d`) stays in the middle slice.
fn stable_middle_count(cs: &CharacterSet, units: &[u64]) -> u64 {
    let d = cs.d;
    let two_d = 2 * d;
    cs.interior
        .iter()
        .filter(|a| {
            units
                .iter()
                .all(|&t| coord_sum(&scale_mod(t, a, d)) == two_d)
        })
        .count() as u64
}

/// Condition used for the maximality verdict: no unit multiple of a bottom
/// slice character may land in the middle slice.  (Unit multiples of
/// interior characters stay interior, so slices are read off coordinate
/// sums alone.)
fn bottom_orbits_avoid_middle(cs: &CharacterSet, units: &[u64]) -> bool {
    let d = cs.d;
    let two_d = 2 * d;
    cs.slice(0).all(|a| {
        units
            .iter()
            .all(|&t| coord_sum(&scale_mod(t, a, d)) != two_d)
    })
}

/// Units of `(Z/e)*` lifted to units mod `d`, for `e` the group exponent.
/// The unit action on characters factors through `Z/e`, so this reduced
/// list induces exactly the full orbit structure.
fn lifted_units(cs: &CharacterSet) -> Vec<u64> {
    let e = cs
        .group
        .exponent()
        .to_u64()
        .expect("exponent divides the enumerable d");
    units_modulo(e)
        .into_iter()
        .map(|u| lift_unit(u, e, cs.d))
        .collect()
}

/// The Lefschetz number of the transcendental lattice and the maximality
/// verdict.  `assumption` is carried through to the result unchanged.
pub fn lefschetz(cs: &CharacterSet, assumption: SingularityAssumption) -> LefschetzResult {
    let e = cs.group().exponent();
    let interior_size = cs.interior().len() as u64;
    let p_g = cs.slice_size(0);
    debug_assert_eq!(cs.slice_size(0), cs.slice_size(2));

    let fast = exponent_fast_path(&e);
    if fast != FastPathVerdict::NoConclusion {
        // (Z/e)* = {±1} acts by conjugation, swapping S_0 and S_2 and
        // preserving S_1: maximality is automatic and lambda = 2 p_g.
        return LefschetzResult {
            lambda: 2 * p_g,
            p_g,
            interior_size,
            stable_middle: cs.slice_size(1),
            max_picard: true,
            criterion_used: CriterionUsed::ExponentFastPath,
            exponent_e: e,
            assumption,
        };
    }

    let units = lifted_units(cs);
    let stable = stable_middle_count(cs, &units);
    let lambda = interior_size - stable;
    let max_picard = bottom_orbits_avoid_middle(cs, &units);
    debug_assert_eq!(max_picard, lambda == 2 * p_g);
    LefschetzResult {
        lambda,
        p_g,
        interior_size,
        stable_middle: stable,
        max_picard,
        criterion_used: CriterionUsed::GaloisOrbit,
        exponent_e: e,
        assumption,
    }
}

/// Orbit statistics computed with the full unit group of `Z/d` instead of
/// the reduced `(Z/e)*` list; must agree with the reduced scan.  Intended
/// for cross-checks; refuses unreasonably large `d`.
pub fn stable_middle_via_full_units(cs: &CharacterSet) -> Result<u64> {
    if cs.d > 1 << 20 {
        return Err(Error::Unsupported(format!(
            "full unit scan over d = {} refused",
            cs.d
        )));
    }
    let units = units_modulo(cs.d.max(1));
    Ok(stable_middle_count(cs, &units))
}

/// Reduced-scan counterpart of `stable_middle_via_full_units`.
pub fn stable_middle_via_exponent_units(cs: &CharacterSet) -> u64 {
    stable_middle_count(cs, &lifted_units(cs))
}

/// Condition (slice-stability of the middle): every middle character's
/// orbit stays in the middle.
pub fn middle_slice_galois_stable(cs: &CharacterSet) -> bool {
    stable_middle_via_exponent_units(cs) == cs.slice_size(1)
}

/// Condition (bottom avoids middle): no unit maps an `S_0` character into
/// `S_1`.  Equivalent to the middle being Galois-stable.
pub fn bottom_slice_avoids_middle(cs: &CharacterSet) -> bool {
    bottom_orbits_avoid_middle(cs, &lifted_units(cs))
}

/// The group Gamma = Z^4 / (columns of [B | a]): the covering group of the
/// surface by the degree-d Fermat surface.
pub fn gamma_group(p: &DelsartePolynomial, ws: &WeightSystem) -> Result<AbelianGroup> {
    let b = p
        .matrix()
        .rational_inverse()?
        .scale(&num_rational::BigRational::from_integer(ws.d.clone()))
        .to_int_checked()
        .expect("d clears all denominators of A^-1");
    let weights: Vec<BigInt> = ws.weights.to_vec();
    cokernel(&b.augment_col(&weights))
}

/// Invariants of the degree-d Fermat surface itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FermatReport {
    pub d: u64,
    pub b2: u64,
    pub lambda: u64,
    pub rho: u64,
    pub h20: u64,
    pub h11_prim: u64,
    pub max_picard: bool,
    pub criterion_used: CriterionUsed,
}

pub fn fermat_report(d: u64, cap: u64) -> Result<FermatReport> {
    if d == 0 {
        return Err(Error::InvalidParameter("Fermat degree must be >= 1".into()));
    }
    let p = crate::family::fermat(d)?;
    let ws = crate::weights::derive_weight_system(&p)?;
    let cs = character_set(&p, &ws, cap)?;
    let lef = lefschetz(&cs, SingularityAssumption::QuasismoothVerified);
    let b2 = cs.interior().len() as u64 + 1;
    Ok(FermatReport {
        d,
        b2,
        lambda: lef.lambda,
        rho: b2 - lef.lambda,
        h20: lef.p_g,
        h11_prim: cs.slice_size(1),
        max_picard: lef.max_picard,
        criterion_used: lef.criterion_used,
    })
}

/// Brute-force character enumeration straight from the definition: walk all
/// of `(Z/d)^4`, keep vectors in the mod-d span of the rows of `B` whose
/// coordinate sum vanishes mod d.  Exponential in nothing but `d^4`, hence
/// the bound.  Returns the sorted element list for comparison against
/// `character_set`.
pub fn oracle_character_set(
    p: &DelsartePolynomial,
    ws: &WeightSystem,
    bound: u64,
) -> Result<Vec<CharVec>> {
    let d = downcast_d(&ws.d)?;
    if d > bound {
        return Err(Error::OracleBoundExceeded {
            d: ws.d.clone(),
            bound,
        });
    }
    let b = p
        .matrix()
        .rational_inverse()?
        .scale(&num_rational::BigRational::from_integer(ws.d.clone()))
        .to_int_checked()
        .expect("d clears all denominators of A^-1");
    // Generators of the span: rows of B reduced mod d.
    let gens: Vec<CharVec> = (0..4)
        .map(|i| {
            std::array::from_fn(|j| b[(i, j)].mod_floor(&ws.d).to_u64().expect("reduced mod d"))
        })
        .collect();

    // Subgroup closure by breadth-first addition.
    let dn = d as usize;
    let size = dn * dn * dn * dn;
    let idx = |a: &CharVec| -> usize {
        (((a[0] as usize * dn) + a[1] as usize) * dn + a[2] as usize) * dn + a[3] as usize
    };
    let mut seen = vec![false; size];
    let mut queue = vec![[0u64; 4]];
    seen[0] = true;
    while let Some(x) = queue.pop() {
        for g in &gens {
            let y = add_mod(&x, g, d);
            if !seen[idx(&y)] {
                seen[idx(&y)] = true;
                queue.push(y);
            }
        }
    }

    let mut out = Vec::new();
    for a0 in 0..d {
        for a1 in 0..d {
            for a2 in 0..d {
                for a3 in 0..d {
                    let a = [a0, a1, a2, a3];
                    if seen[idx(&a)] && coord_sum(&a).is_multiple_of(d) {
                        out.push(a);
                    }
                }
            }
        }
    }
    Ok(out)
}
