//! Newton polytopes, lattice point counts, Fine interiors, and the hollow
//! simplex table.
//!
//! All geometry here is exact: hulls are computed by brute-force supporting
//! plane enumeration (inputs have a handful of points), interior points by a
//! bounding-box scan against facet inequalities, and the Fine interior
//!
//! ```text
//! F(P) = { x : <n, x> >= min_P <n, .> + 1  for every nonzero integer n }
//! ```
//!
//! by intersecting the shrunk constraints for the union of Hilbert bases of
//! the normal fan's maximal cones — a finite certificate for the infinite
//! intersection, since every integer functional is a nonnegative integer
//! combination of Hilbert elements minimized at a common vertex.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::{cokernel, AbelianGroup};
use crate::mat::IntMat;
use crate::poly::DelsartePolynomial;
use crate::weights::WeightSystem;

/// Scan guard for interior-point enumeration (bounding box cells).
const SCAN_CAP: u64 = 100_000_000;
/// Guard for parallelepiped enumeration inside one simplicial cone.
const CONE_CAP: u64 = 1_000_000;

pub type Pt3 = [BigInt; 3];
pub type Pt2 = [BigInt; 2];

fn pt3(x: i64, y: i64, z: i64) -> Pt3 {
    [BigInt::from(x), BigInt::from(y), BigInt::from(z)]
}

fn sub3(a: &Pt3, b: &Pt3) -> Pt3 {
    std::array::from_fn(|i| &a[i] - &b[i])
}

fn dot3(a: &Pt3, b: &Pt3) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cross3(a: &Pt3, b: &Pt3) -> Pt3 {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn is_zero3(a: &Pt3) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Divide out the gcd of the entries (zero vector stays zero).
fn primitive3(a: &Pt3) -> Pt3 {
    let g = a.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        return a.clone();
    }
    std::array::from_fn(|i| &a[i] / &g)
}

/// A supporting halfspace `<normal, x> >= offset` with primitive inward normal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Facet {
    pub normal: Pt3,
    pub offset: BigInt,
}

/// A full-dimensional lattice polytope in `Z^3`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    vertices: Vec<Pt3>,
    facets: Vec<Facet>,
}

impl LatticePolytope {
    /// Convex hull of a point set.  Errors with `DegeneratePolytope` unless
    /// the points affinely span all of `R^3`.
    pub fn from_points(points: &[Pt3]) -> Result<Self> {
        let mut pts: Vec<Pt3> = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        if affine_rank_int(&pts) < 3 {
            return Err(Error::DegeneratePolytope);
        }

        // Every hull facet contains three affinely independent input points,
        // so scanning all triples finds every facet (quartic in the input
        // size, which stays tiny here).
        let mut facets: std::collections::BTreeSet<Facet> = Default::default();
        let n_pts = pts.len();
        for i in 0..n_pts {
            for j in i + 1..n_pts {
                for k in j + 1..n_pts {
                    let n = cross3(&sub3(&pts[j], &pts[i]), &sub3(&pts[k], &pts[i]));
                    if is_zero3(&n) {
                        continue;
                    }
                    let n = primitive3(&n);
                    let base = dot3(&n, &pts[i]);
                    let mut lo = true;
                    let mut hi = true;
                    for p in &pts {
                        let v = dot3(&n, p);
                        if v < base {
                            lo = false;
                        }
                        if v > base {
                            hi = false;
                        }
                        if !lo && !hi {
                            break;
                        }
                    }
                    if lo {
                        facets.insert(Facet {
                            normal: n.clone(),
                            offset: base.clone(),
                        });
                    }
                    if hi {
                        facets.insert(Facet {
                            normal: std::array::from_fn(|t| -n[t].clone()),
                            offset: -base,
                        });
                    }
                }
            }
        }
        let facets: Vec<Facet> = facets.into_iter().collect();

        // A vertex is a point whose active facet normals span rank 3.
        let vertices: Vec<Pt3> = pts
            .iter()
            .filter(|p| {
                let active: Vec<Pt3> = facets
                    .iter()
                    .filter(|f| dot3(&f.normal, p) == f.offset)
                    .map(|f| f.normal.clone())
                    .collect();
                rank_of_rows(&active) == 3
            })
            .cloned()
            .collect();
        debug_assert!(vertices.len() >= 4);
        Ok(LatticePolytope { vertices, facets })
    }

    pub fn vertices(&self) -> &[Pt3] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn is_simplex(&self) -> bool {
        self.vertices.len() == 4
    }

    fn bbox(&self) -> ([BigInt; 3], [BigInt; 3]) {
        let min: [BigInt; 3] =
            std::array::from_fn(|i| self.vertices.iter().map(|v| v[i].clone()).min().unwrap());
        let max: [BigInt; 3] =
            std::array::from_fn(|i| self.vertices.iter().map(|v| v[i].clone()).max().unwrap());
        (min, max)
    }

    /// Strictly interior lattice points, sorted.  Errors with `CapExceeded`
    /// when the enumeration is too large.
    ///
    /// Simplices take a fast path: interior points biject with residues of
    /// `Z^3` modulo the edge lattice whose fractional barycentric
    /// coordinates are all positive and sum below one (each coordinate of
    /// an interior point lies in `(0, 1)`, so the integer parts vanish).
    /// The cost is the lattice index, not the bounding box volume.
    pub fn interior_points(&self) -> Result<Vec<Pt3>> {
        if self.is_simplex() {
            return self.interior_points_of_simplex();
        }
        self.interior_points_by_scan()
    }

    fn interior_points_of_simplex(&self) -> Result<Vec<Pt3>> {
        let v0 = &self.vertices[0];
        let e = edge_matrix(&self.vertices);
        let (dg, residues) = parallelepiped_residues(&e, SCAN_CAP)?;
        let mut out: Vec<Pt3> = residues
            .into_iter()
            .filter_map(|(w, lambda_num)| {
                let positive = lambda_num.iter().all(|l| l.is_positive());
                let sum: BigInt = lambda_num.iter().sum();
                if positive && sum < dg {
                    Some(std::array::from_fn(|i| &v0[i] + &w[i]))
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    fn interior_points_by_scan(&self) -> Result<Vec<Pt3>> {
        let (min, max) = self.bbox();
        let mut volume = BigInt::one();
        for i in 0..3 {
            volume *= &max[i] - &min[i] + 1;
        }
        if volume > BigInt::from(SCAN_CAP) {
            return Err(Error::CapExceeded {
                order: volume,
                cap: BigInt::from(SCAN_CAP),
            });
        }
        let mut out = Vec::new();
        let mut x = min[0].clone();
        while x <= max[0] {
            let mut y = min[1].clone();
            while y <= max[1] {
                let mut z = min[2].clone();
                while z <= max[2] {
                    let p = [x.clone(), y.clone(), z.clone()];
                    if self.facets.iter().all(|f| dot3(&f.normal, &p) > f.offset) {
                        out.push(p);
                    }
                    z += 1;
                }
                y += 1;
            }
            x += 1;
        }
        Ok(out)
    }

    /// Facet normals active at `v` (which must be a vertex): the extreme
    /// rays of the normal cone at `v`.
    fn normals_at(&self, v: &Pt3) -> Vec<Pt3> {
        self.facets
            .iter()
            .filter(|f| dot3(&f.normal, v) == f.offset)
            .map(|f| f.normal.clone())
            .collect()
    }

    /// Vertices lying on the facet with the given normal/offset.
    fn facet_vertices(&self, f: &Facet) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&i| dot3(&f.normal, &self.vertices[i]) == f.offset)
            .collect()
    }
}

fn affine_rank_int(pts: &[Pt3]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    let rows: Vec<Pt3> = pts[1..].iter().map(|p| sub3(p, &pts[0])).collect();
    rank_of_rows(&rows)
}

fn rank_of_rows(rows: &[Pt3]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let m = IntMat::from_rows(rows.iter().map(|r| r.to_vec()).collect());
    m.smith_normal_form().rank()
}

/// Kodaira dimension read off the Fine interior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KodairaDimension {
    MinusInfinity,
    Zero,
    One,
    Two,
}

impl std::fmt::Display for KodairaDimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::MinusInfinity => write!(f, "-infinity"),
            Self::Zero => write!(f, "0"),
            Self::One => write!(f, "1"),
            Self::Two => write!(f, "2"),
        }
    }
}

/// The Fine interior of a polytope: a rational polytope, possibly empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FineInterior {
    /// Vertices of the rational polytope, sorted; empty list iff empty set.
    pub vertices: Vec<[BigRational; 3]>,
    /// Affine dimension, `-1` when empty.
    pub dim: i64,
    pub kodaira: KodairaDimension,
}

impl FineInterior {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// Compute the Fine interior.  The constraint set is the union of Hilbert
/// bases of the normal cones at all vertices (each cone star-triangulated
/// into simplicial pieces); the resulting H-description is converted to
/// vertices by enumerating feasible rank-3 constraint triples.
pub fn fine_interior(p: &LatticePolytope) -> Result<FineInterior> {
    let mut normals: std::collections::BTreeSet<Pt3> = Default::default();
    for f in &p.facets {
        normals.insert(f.normal.clone());
    }
    for v in &p.vertices {
        let rays = p.normals_at(v);
        debug_assert!(rays.len() >= 3);
        for simplex in triangulate_cone(p, v, &rays) {
            for h in hilbert_basis_simplicial(&simplex)? {
                normals.insert(h);
            }
        }
    }

    // Shrunk constraints: <n, x> >= min_P <n, .> + 1.
    let constraints: Vec<(Pt3, BigInt)> = normals
        .into_iter()
        .map(|n| {
            let c = p
                .vertices
                .iter()
                .map(|v| dot3(&n, v))
                .min()
                .expect("polytope has vertices");
            (n, c + 1)
        })
        .collect();

    // Candidate vertices: solutions of rank-3 active triples that satisfy
    // everything.  The Fine interior is bounded (it sits inside P), so if it
    // is nonempty it has a vertex, and every vertex arises this way.
    let mut vertices = match vertices_via_i128(&constraints) {
        Some(v) => v,
        None => vertices_via_bigint(&constraints)?,
    };
    vertices.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    vertices.dedup();

    let dim = if vertices.is_empty() {
        -1
    } else {
        affine_rank_rational(&vertices) as i64
    };
    let kodaira = match dim {
        -1 => KodairaDimension::MinusInfinity,
        0 => KodairaDimension::Zero,
        1 => KodairaDimension::One,
        _ => KodairaDimension::Two,
    };
    Ok(FineInterior {
        vertices,
        dim,
        kodaira,
    })
}

/// Exact machine-integer path for the triple enumeration: sound whenever
/// normals fit in 20 bits and offsets in 40, which keeps every Cramer
/// determinant and feasibility product comfortably inside `i128`.
fn vertices_via_i128(constraints: &[(Pt3, BigInt)]) -> Option<Vec<[BigRational; 3]>> {
    const N_BOUND: i64 = 1 << 20;
    const C_BOUND: i64 = 1 << 40;
    let small: Vec<([i64; 3], i64)> = constraints
        .iter()
        .map(|(n, c)| {
            let n: Option<[i64; 3]> = n
                .iter()
                .map(|x| x.to_i64().filter(|v| v.abs() < N_BOUND))
                .collect::<Option<Vec<_>>>()
                .map(|v| [v[0], v[1], v[2]]);
            let c = c.to_i64().filter(|v| v.abs() < C_BOUND);
            n.zip(c)
        })
        .collect::<Option<Vec<_>>>()?;

    let dot = |n: &[i64; 3], x: &[i128; 3]| -> i128 {
        n.iter().zip(x).map(|(&a, &b)| a as i128 * b).sum()
    };
    let nc = small.len();
    let mut out = Vec::new();
    for i in 0..nc {
        for j in i + 1..nc {
            for k in j + 1..nc {
                let rows = [&small[i], &small[j], &small[k]];
                let n = |r: usize, c: usize| rows[r].0[c] as i128;
                let det = n(0, 0) * (n(1, 1) * n(2, 2) - n(1, 2) * n(2, 1))
                    - n(0, 1) * (n(1, 0) * n(2, 2) - n(1, 2) * n(2, 0))
                    + n(0, 2) * (n(1, 0) * n(2, 1) - n(1, 1) * n(2, 0));
                if det == 0 {
                    continue;
                }
                // Cramer: numerator l replaces column l with the offsets.
                let mut num = [0i128; 3];
                for (l, num_l) in num.iter_mut().enumerate() {
                    let col = |r: usize, c: usize| -> i128 {
                        if c == l {
                            rows[r].1 as i128
                        } else {
                            n(r, c)
                        }
                    };
                    *num_l = col(0, 0) * (col(1, 1) * col(2, 2) - col(1, 2) * col(2, 1))
                        - col(0, 1) * (col(1, 0) * col(2, 2) - col(1, 2) * col(2, 0))
                        + col(0, 2) * (col(1, 0) * col(2, 1) - col(1, 1) * col(2, 0));
                }
                let feasible = small.iter().all(|(nn, cc)| {
                    let lhs = dot(nn, &num);
                    let rhs = *cc as i128 * det;
                    if det > 0 {
                        lhs >= rhs
                    } else {
                        lhs <= rhs
                    }
                });
                if feasible {
                    out.push(std::array::from_fn(|l| {
                        BigRational::new(BigInt::from(num[l]), BigInt::from(det))
                    }));
                }
            }
        }
    }
    Some(out)
}

/// Arbitrary-precision fallback for the same enumeration.
fn vertices_via_bigint(constraints: &[(Pt3, BigInt)]) -> Result<Vec<[BigRational; 3]>> {
    let nc = constraints.len();
    let mut vertices: Vec<[BigRational; 3]> = Vec::new();
    for i in 0..nc {
        for j in i + 1..nc {
            for k in j + 1..nc {
                let m = IntMat::from_rows(vec![
                    constraints[i].0.to_vec(),
                    constraints[j].0.to_vec(),
                    constraints[k].0.to_vec(),
                ]);
                if m.det().is_zero() {
                    continue;
                }
                let rhs = vec![
                    constraints[i].1.clone(),
                    constraints[j].1.clone(),
                    constraints[k].1.clone(),
                ];
                let x = m.solve_exact(&rhs)?;
                let x: [BigRational; 3] = [x[0].clone(), x[1].clone(), x[2].clone()];
                let feasible = constraints.iter().all(|(n, c)| {
                    let lhs: BigRational = (0..3)
                        .map(|t| BigRational::from_integer(n[t].clone()) * &x[t])
                        .sum();
                    lhs >= BigRational::from_integer(c.clone())
                });
                if feasible {
                    vertices.push(x);
                }
            }
        }
    }
    Ok(vertices)
}

fn affine_rank_rational(pts: &[[BigRational; 3]]) -> usize {
    if pts.len() <= 1 {
        return 0;
    }
    // Clear denominators row by row; scaling rows preserves rank.
    let rows: Vec<Pt3> = pts[1..]
        .iter()
        .map(|p| {
            let diff: [BigRational; 3] = std::array::from_fn(|i| &p[i] - &pts[0][i]);
            let l = diff.iter().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
            std::array::from_fn(|i| (&diff[i] * BigRational::from_integer(l.clone())).to_integer())
        })
        .collect();
    rank_of_rows(&rows)
}

/// Star-triangulate the normal cone at `v` from its first ray: one simplex
/// per adjacent ray pair not involving the apex ray.  Two rays are adjacent
/// when their facets share an edge of the polytope, i.e. at least two
/// common vertices.
fn triangulate_cone(p: &LatticePolytope, v: &Pt3, rays: &[Pt3]) -> Vec<[Pt3; 3]> {
    if rays.len() == 3 {
        return vec![[rays[0].clone(), rays[1].clone(), rays[2].clone()]];
    }
    let facet_of = |n: &Pt3| -> Facet {
        Facet {
            normal: n.clone(),
            offset: dot3(n, v),
        }
    };
    let mut out = Vec::new();
    for i in 1..rays.len() {
        for j in i + 1..rays.len() {
            let vi = p.facet_vertices(&facet_of(&rays[i]));
            let vj = p.facet_vertices(&facet_of(&rays[j]));
            let shared = vi.iter().filter(|x| vj.contains(x)).count();
            if shared >= 2 {
                out.push([rays[0].clone(), rays[i].clone(), rays[j].clone()]);
            }
        }
    }
    out
}

/// `|det g|` together with one representative per residue class: the point
/// `w` and its scaled preimage coordinates `lambda_num`, where
/// `g^-1 w = lambda_num / |det g|` with each entry in `[0, |det g|)`.
type ResidueTable = (BigInt, Vec<(Pt3, [BigInt; 3])>);

/// Lattice points of the half-open parallelepiped spanned by the columns
/// of `g` (an invertible 3x3 matrix), one per residue class of
/// `Z^3 / g Z^3`.
fn parallelepiped_residues(g: &IntMat, cap: u64) -> Result<ResidueTable> {
    let det = g.det();
    assert!(
        !det.is_zero(),
        "parallelepiped spanned by dependent columns"
    );
    let dg = det.abs();
    if dg > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            order: dg,
            cap: BigInt::from(cap),
        });
    }

    // Scaled inverse: ginv = dg * g^-1 is integral.
    let ginv = g
        .rational_inverse()?
        .scale(&BigRational::from_integer(dg.clone()))
        .to_int_checked()
        .expect("dg * g^-1 is integral");

    // Enumerate Z^3 / g Z^3 via the Smith form (residues U^-1 k), then
    // reduce each to the parallelepiped: w = g * ((ginv r) mod dg) / dg.
    let snf = g.smith_normal_form();
    let uinv = snf
        .u
        .rational_inverse()?
        .to_int_checked()
        .expect("U unimodular");
    let radices: Vec<u64> = snf
        .diagonal()
        .iter()
        .map(|x| x.to_u64().expect("bounded by the cap"))
        .collect();

    let mut out = Vec::new();
    let mut k = [0u64; 3];
    loop {
        let kv: Vec<BigInt> = k.iter().map(|&x| BigInt::from(x)).collect();
        let r = uinv.mul_vec(&kv);
        let y = ginv.mul_vec(&r);
        let y_mod: [BigInt; 3] = std::array::from_fn(|i| y[i].mod_floor(&dg));
        let w_scaled = g.mul_vec(y_mod.as_ref());
        let w: Pt3 = std::array::from_fn(|i| {
            let (q, rem) = w_scaled[i].div_rem(&dg);
            debug_assert!(rem.is_zero());
            q
        });
        out.push((w, y_mod));
        // Odometer.
        let mut i = 0;
        while i < 3 {
            k[i] += 1;
            if k[i] < radices[i].max(1) {
                break;
            }
            k[i] = 0;
            i += 1;
        }
        if i == 3 {
            break;
        }
    }
    Ok((dg, out))
}

/// Hilbert basis of a simplicial cone spanned by three primitive,
/// linearly independent rays: the rays plus the irreducible lattice points
/// of the half-open fundamental parallelepiped.
fn hilbert_basis_simplicial(rays: &[Pt3; 3]) -> Result<Vec<Pt3>> {
    let g = IntMat::from_rows(rays.iter().map(|r| r.to_vec()).collect()).transpose();
    let (dg, residues) = parallelepiped_residues(&g, CONE_CAP)?;

    // Membership in the cone: all coordinates of dg * g^-1 * x nonnegative.
    let ginv = g
        .rational_inverse()?
        .scale(&BigRational::from_integer(dg))
        .to_int_checked()
        .expect("scaled inverse is integral");
    let in_cone = |x: &Pt3| -> bool { ginv.mul_vec(x.as_ref()).iter().all(|c| !c.is_negative()) };

    let mut candidates: std::collections::BTreeSet<Pt3> = Default::default();
    for r in rays {
        candidates.insert(r.clone());
    }
    for (w, _) in residues {
        if !is_zero3(&w) {
            candidates.insert(w);
        }
    }

    // Keep the irreducible candidates: h stays iff no other candidate c has
    // h - c inside the cone and nonzero.
    let list: Vec<Pt3> = candidates.iter().cloned().collect();
    let basis: Vec<Pt3> = list
        .iter()
        .filter(|h| {
            !list.iter().any(|c| {
                if c == *h {
                    return false;
                }
                let diff = sub3(h, c);
                !is_zero3(&diff) && in_cone(&diff)
            })
        })
        .cloned()
        .collect();
    Ok(basis)
}

/// One row of the hollow simplex table: an ID and a vertex list.
pub struct TableSimplex {
    pub id: u32,
    pub vertices: [[i64; 3]; 4],
}

/// The four hollow lattice simplices with nonempty Fine interior,
/// up to unimodular equivalence.
pub const HOLLOW_TABLE: [TableSimplex; 4] = [
    TableSimplex {
        id: 4,
        vertices: [[0, 0, 0], [4, 0, 0], [2, 4, 0], [3, 0, 2]],
    },
    TableSimplex {
        id: 5,
        vertices: [[0, 0, 0], [2, 2, 0], [1, 1, 2], [3, -1, 2]],
    },
    TableSimplex {
        id: 9,
        vertices: [[0, 0, 0], [3, 0, 0], [1, 3, 0], [2, 0, 3]],
    },
    TableSimplex {
        id: 12,
        vertices: [[-1, 0, 0], [0, 1, -2], [1, 2, 1], [2, -2, -1]],
    },
];

/// Outcome of the hollowness classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HollowClassification {
    pub is_hollow: bool,
    pub fine_nonempty: bool,
    /// Table ID when the polytope is a hollow simplex with nonempty Fine
    /// interior and matches a table entry up to unimodular equivalence.
    pub table_match: Option<u32>,
    /// `Z^3` modulo the edge lattice at a vertex; `None` unless a simplex.
    pub quotient_group: Option<AbelianGroup>,
}

/// Classify a polytope against the hollow table.  Errors with `NotSimplex`
/// when the polytope is hollow with nonempty Fine interior but has more
/// than four vertices (outside the table's scope).
pub fn classify_hollow(p: &LatticePolytope) -> Result<HollowClassification> {
    let is_hollow = p.interior_points()?.is_empty();
    let fi = fine_interior(p)?;
    classify_hollow_given(p, is_hollow, !fi.is_empty())
}

/// Same as [`classify_hollow`], with the interior-point and Fine-interior
/// facts supplied by the caller (who typically has both already).
pub fn classify_hollow_given(
    p: &LatticePolytope,
    is_hollow: bool,
    fine_nonempty: bool,
) -> Result<HollowClassification> {
    let quotient_group = if p.is_simplex() {
        let e = edge_matrix(p.vertices());
        Some(cokernel(&e).expect("simplex edges span"))
    } else {
        None
    };

    let table_match = if is_hollow && fine_nonempty {
        if !p.is_simplex() {
            return Err(Error::NotSimplex {
                vertices: p.vertices.len(),
            });
        }
        let mut found = None;
        for entry in &HOLLOW_TABLE {
            let target: Vec<Pt3> = entry
                .vertices
                .iter()
                .map(|v| pt3(v[0], v[1], v[2]))
                .collect();
            if simplices_unimodular_equivalent(p.vertices(), &target) {
                found = Some(entry.id);
                break;
            }
        }
        found
    } else {
        None
    };

    Ok(HollowClassification {
        is_hollow,
        fine_nonempty,
        table_match,
        quotient_group,
    })
}

/// Columns are the edges from the first vertex.  Different base vertices
/// give unimodularly equivalent columns, so the cokernel is well-defined.
fn edge_matrix(vertices: &[Pt3]) -> IntMat {
    assert_eq!(vertices.len(), 4, "edge matrix requires a simplex");
    let cols: Vec<Vec<BigInt>> = (1..4)
        .map(|i| sub3(&vertices[i], &vertices[0]).to_vec())
        .collect();
    IntMat::from_rows(cols).transpose()
}

/// Affine unimodular equivalence of two lattice simplices: some vertex
/// bijection must carry the edge basis of one to the edge basis of the
/// other by an integer matrix of determinant +-1.
pub fn simplices_unimodular_equivalent(a: &[Pt3], b: &[Pt3]) -> bool {
    assert!(a.len() == 4 && b.len() == 4, "simplices required");
    let eb = edge_matrix(b);
    for perm in permutations4() {
        let ordered: Vec<Pt3> = perm.iter().map(|&i| a[i].clone()).collect();
        let ea = edge_matrix(&ordered);
        if ea.det().is_zero() {
            continue;
        }
        // T = E_b * E_a^-1 must be integral with |det| = 1.
        let ea_inv = ea.rational_inverse().expect("nonzero determinant");
        let t = crate::mat::RatMat::from_int(&eb)
            .mul(&ea_inv)
            .to_int_checked();
        if let Some(t) = t {
            if t.det().abs().is_one() {
                return true;
            }
        }
    }
    false
}

fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let idx = [a, b, c, d];
                    let mut seen = [false; 4];
                    if idx.iter().all(|&i| !std::mem::replace(&mut seen[i], true)) {
                        out.push(idx);
                    }
                }
            }
        }
    }
    out
}

/// The Newton polytope of a Delsarte polynomial, as a lattice tetrahedron
/// in the degree hyperplane: exponent rows are translated by the first row
/// into the weight-orthogonal lattice and expressed in a saturated basis.
/// The result depends on the basis choice only up to unimodular equivalence.
pub fn newton_polytope(p: &DelsartePolynomial, ws: &WeightSystem) -> Result<LatticePolytope> {
    let a_row = IntMat::from_rows(vec![ws.weights.to_vec()]);
    let k = a_row.kernel_basis();
    debug_assert_eq!((k.rows(), k.cols()), (4, 3));

    let mut points = Vec::with_capacity(4);
    for i in 0..4 {
        let diff: Vec<BigInt> = (0..4)
            .map(|j| &p.matrix()[(i, j)] - &p.matrix()[(0, j)])
            .collect();
        points.push(express_in_basis(&k, &diff));
    }
    LatticePolytope::from_points(&points)
}

/// Solve `k z = v` for a 4x3 basis matrix `k` with full column rank and
/// `v` in the column span; the solution is integral because the basis is
/// saturated.
pub(crate) fn express_in_basis(k: &IntMat, v: &[BigInt]) -> Pt3 {
    // Find three rows of k forming an invertible 3x3 block.
    for r0 in 0..4 {
        for r1 in r0 + 1..4 {
            for r2 in r1 + 1..4 {
                let block = IntMat::from_rows(vec![
                    k.row(r0).to_vec(),
                    k.row(r1).to_vec(),
                    k.row(r2).to_vec(),
                ]);
                if block.det().is_zero() {
                    continue;
                }
                let rhs = vec![v[r0].clone(), v[r1].clone(), v[r2].clone()];
                let z = block.solve_exact(&rhs).expect("block invertible");
                assert!(z.iter().all(|q| q.is_integer()), "basis not saturated?");
                let z: Pt3 = std::array::from_fn(|i| z[i].to_integer());
                // Verify the remaining row.
                let kz = k.mul_vec(z.as_ref());
                assert_eq!(kz, v, "vector not in the span of the basis");
                return z;
            }
        }
    }
    unreachable!("basis has full column rank");
}

/// A full-dimensional lattice polygon in `Z^2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolygon {
    vertices: Vec<Pt2>,
    edges: Vec<(Pt2, BigInt)>,
}

impl LatticePolygon {
    pub fn from_points(points: &[Pt2]) -> Result<Self> {
        let mut pts: Vec<Pt2> = points.to_vec();
        pts.sort_unstable();
        pts.dedup();
        // Affine rank must be 2.
        let rank2 = pts.len() >= 3 && {
            let rows: Vec<Pt3> = pts[1..]
                .iter()
                .map(|p| [&p[0] - &pts[0][0], &p[1] - &pts[0][1], BigInt::zero()])
                .collect();
            rank_of_rows(&rows) == 2
        };
        if !rank2 {
            return Err(Error::DegeneratePolytope);
        }

        let mut edges: std::collections::BTreeSet<(Pt2, BigInt)> = Default::default();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let dx = &pts[j][0] - &pts[i][0];
                let dy = &pts[j][1] - &pts[i][1];
                let n = [-dy, dx];
                let g = n[0].gcd(&n[1]);
                if g.is_zero() {
                    continue;
                }
                let n = [&n[0] / &g, &n[1] / &g];
                let base = &n[0] * &pts[i][0] + &n[1] * &pts[i][1];
                let dots: Vec<BigInt> = pts.iter().map(|p| &n[0] * &p[0] + &n[1] * &p[1]).collect();
                if dots.iter().all(|v| v >= &base) {
                    edges.insert(([n[0].clone(), n[1].clone()], base.clone()));
                }
                if dots.iter().all(|v| v <= &base) {
                    edges.insert(([-n[0].clone(), -n[1].clone()], -base));
                }
            }
        }
        let edges: Vec<(Pt2, BigInt)> = edges.into_iter().collect();

        let vertices: Vec<Pt2> = pts
            .iter()
            .filter(|p| {
                let active: Vec<Pt2> = edges
                    .iter()
                    .filter(|(n, c)| &(&n[0] * &p[0] + &n[1] * &p[1]) == c)
                    .map(|(n, _)| n.clone())
                    .collect();
                active.len() >= 2 && {
                    let rows: Vec<Pt3> = active
                        .iter()
                        .map(|n| [n[0].clone(), n[1].clone(), BigInt::zero()])
                        .collect();
                    rank_of_rows(&rows) == 2
                }
            })
            .cloned()
            .collect();
        Ok(LatticePolygon { vertices, edges })
    }

    pub fn vertices(&self) -> &[Pt2] {
        &self.vertices
    }

    /// Strictly interior lattice points, sorted.
    pub fn interior_points(&self) -> Result<Vec<Pt2>> {
        let min: [BigInt; 2] =
            std::array::from_fn(|i| self.vertices.iter().map(|v| v[i].clone()).min().unwrap());
        let max: [BigInt; 2] =
            std::array::from_fn(|i| self.vertices.iter().map(|v| v[i].clone()).max().unwrap());
        let volume = (&max[0] - &min[0] + 1) * (&max[1] - &min[1] + 1);
        if volume > BigInt::from(SCAN_CAP) {
            return Err(Error::CapExceeded {
                order: volume,
                cap: BigInt::from(SCAN_CAP),
            });
        }
        let mut out = Vec::new();
        let mut x = min[0].clone();
        while x <= max[0] {
            let mut y = min[1].clone();
            while y <= max[1] {
                let p = [x.clone(), y.clone()];
                if self
                    .edges
                    .iter()
                    .all(|(n, c)| &(&n[0] * &p[0] + &n[1] * &p[1]) > c)
                {
                    out.push(p);
                }
                y += 1;
            }
            x += 1;
        }
        Ok(out)
    }

    /// Lattice-polygon genus: the number of interior lattice points.
    pub fn genus(&self) -> Result<u64> {
        Ok(self.interior_points()?.len() as u64)
    }
}
