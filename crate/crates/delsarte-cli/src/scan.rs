//! Randomized and exhaustive searches for maximal-Picard surfaces.
//!
//! A scan walks a space of candidate exponent matrices, computes the
//! invariant signature of every valid surface, and appends one JSON record
//! per *new* signature to an append-only store.  Design points:
//!
//! * **Determinism.**  Candidate `i` of a sampled scan depends only on
//!   `(seed, i)`: every candidate gets its own ChaCha stream.  Records are
//!   deduplicated by signature, keeping the lowest candidate index, so the
//!   output set is independent of the number of worker threads.
//! * **Idempotency.**  An existing store is reloaded first and its
//!   signatures are never re-appended; re-running a scan is a no-op.
//! * **Isolation.**  A candidate that fails (cap exceeded, arithmetic
//!   refused) is counted and skipped, never fatal to the scan.
//!
//! Candidates are screened by a machine-integer pipeline (determinant,
//! adjugate, charges, weights, well-formedness, character closure, orbit
//! scan) that mirrors the exact library; every surviving hit is then
//! recomputed with the exact library before being recorded, and the two
//! answers are required to agree.

use std::collections::{BTreeMap, HashSet};
use std::io::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use delsarte::{analyze, AnalyzeOptions, DelsartePolynomial, Error, IntMat, Result, SurfaceReport};
use num_bigint::BigInt;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Shape of the candidate space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Template {
    /// All 16 entries drawn uniformly from `0..=bound`.
    Uniform,
    /// Diagonal entries from `1..=bound` plus a cyclic superdiagonal
    /// (including the corner) from `0..=bound`.
    Cyclic,
    /// Diagonal entries from `1..=bound` plus at most one off-diagonal
    /// entry from `1..=bound`.  The only template small enough to
    /// enumerate exhaustively.
    NearDiagonal,
}

impl std::fmt::Display for Template {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Template::Uniform => write!(f, "uniform"),
            Template::Cyclic => write!(f, "cyclic"),
            Template::NearDiagonal => write!(f, "near-diagonal"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub template: Template,
    /// Inclusive upper bound on matrix entries.
    pub entry_bound: u64,
    /// Number of sampled candidates; ignored when `exhaustive` is set.
    pub count: u64,
    /// Record only surfaces with geometric genus at least this.
    pub min_pg: u64,
    pub seed: u64,
    pub threads: usize,
    /// Enumerate the whole template instead of sampling it.
    pub exhaustive: bool,
    /// Refuse character groups larger than this.
    pub character_cap: u64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            template: Template::NearDiagonal,
            entry_bound: 6,
            count: 10_000,
            min_pg: 1,
            seed: 0,
            threads: 1,
            exhaustive: false,
            character_cap: delsarte::characters::DEFAULT_CHARACTER_CAP,
        }
    }
}

/// One discovered surface, as stored in the JSONL scan output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanRecord {
    pub schema_version: String,
    /// Exponent matrix, row-major decimal strings.
    pub matrix: Vec<Vec<String>>,
    pub weights: Vec<String>,
    pub weighted_degree: String,
    pub fermat_degree: String,
    /// Invariant factors of the toric symmetry group of the surface.
    pub group: Vec<String>,
    pub geometric_genus: u64,
    pub lambda: u64,
    pub max_picard: bool,
    pub quasismooth: bool,
    /// Deduplication key: the invariant signature of the surface.
    pub signature: String,
    /// Unix timestamp of first discovery (excluded from deduplication).
    pub discovered_at_unix: u64,
}

/// Tallies for one scan run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScanSummary {
    /// Candidates drawn or enumerated.
    pub examined: u64,
    /// Not a surface at all: singular matrix, nonpositive charges, or an
    /// ill-formed weight system.
    pub rejected: u64,
    /// Valid surfaces that missed the filter (not maximal, or genus below
    /// the threshold).
    pub filtered: u64,
    /// Candidates refused because a cap would be exceeded.
    pub capped: u64,
    /// New signatures appended to the store.
    pub new_hits: u64,
    /// Hits whose signature was already in the store.
    pub known_hits: u64,
    /// Hits duplicating a signature first seen earlier in this same run.
    pub duplicate_hits: u64,
}

/// Off-diagonal positions of a 4x4 matrix, in row-major order.
const OFF_DIAGONAL: [(usize, usize); 12] = [
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 0),
    (1, 2),
    (1, 3),
    (2, 0),
    (2, 1),
    (2, 3),
    (3, 0),
    (3, 1),
    (3, 2),
];

/// Size of the exhaustive near-diagonal space at a given entry bound.
pub fn near_diagonal_space(bound: u64) -> u64 {
    bound.pow(4) * (12 * bound + 1)
}

/// Decode exhaustive candidate `index` into a near-diagonal matrix.
fn near_diagonal_candidate(bound: u64, index: u64) -> [[i64; 4]; 4] {
    let b = bound as i64;
    let mut mat = [[0i64; 4]; 4];
    let mut diag = index % bound.pow(4);
    for (i, row) in mat.iter_mut().enumerate() {
        row[i] = (diag % bound) as i64 + 1;
        diag /= bound;
    }
    let rest = index / bound.pow(4);
    if rest > 0 {
        let off = rest - 1;
        let (i, j) = OFF_DIAGONAL[(off / bound) as usize];
        mat[i][j] = (off % bound) as i64 + 1;
        debug_assert!(mat[i][j] <= b);
    }
    mat
}

/// Draw sampled candidate `index` from the configured template.
fn sampled_candidate(cfg: &ScanConfig, index: u64) -> [[i64; 4]; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let b = cfg.entry_bound as i64;
    let mut mat = [[0i64; 4]; 4];
    match cfg.template {
        Template::Uniform => {
            for row in &mut mat {
                for entry in row.iter_mut() {
                    *entry = rng.gen_range(0..=b);
                }
            }
        }
        Template::Cyclic => {
            for (i, row) in mat.iter_mut().enumerate() {
                row[i] = rng.gen_range(1..=b);
            }
            for (i, row) in mat.iter_mut().enumerate() {
                row[(i + 1) % 4] = rng.gen_range(0..=b);
            }
        }
        Template::NearDiagonal => {
            let space = near_diagonal_space(cfg.entry_bound);
            let k = rng.gen_range(0..space);
            return near_diagonal_candidate(cfg.entry_bound, k);
        }
    }
    mat
}

/// What the machine-integer screen concluded about one candidate.
enum Screen {
    Rejected,
    Capped,
    /// A valid surface; fields are (weights, m, d, group order, p_g,
    /// lambda, max_picard).
    Surface {
        weights: [i64; 4],
        m: i64,
        d: i64,
        order: i64,
        p_g: u64,
        lambda: u64,
        max_picard: bool,
    },
}

fn gcd4(a: i128, b: i128, c: i128, d: i128) -> i128 {
    a.gcd(&b).gcd(&c.gcd(&d))
}

/// 3x3 determinant of the minor omitting row `i` and column `j`.
fn minor3(m: &[[i64; 4]; 4], i: usize, j: usize) -> i128 {
    let mut r = [[0i128; 3]; 3];
    let mut ri = 0;
    for (a, row) in m.iter().enumerate() {
        if a == i {
            continue;
        }
        let mut rj = 0;
        for (b, &v) in row.iter().enumerate() {
            if b == j {
                continue;
            }
            r[ri][rj] = v as i128;
            rj += 1;
        }
        ri += 1;
    }
    r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
        - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
}

/// Largest `d` the packed character closure supports.
const SCREEN_D_LIMIT: i64 = 1 << 20;

/// Screen one candidate with exact machine-integer arithmetic.
///
/// Mirrors the library pipeline: charges and weights from the adjugate,
/// well-formedness from weight gcds and monomial supports, the character
/// group as the closure of the rows of `d A^{-1}` in `(Z/d)^4`, and the
/// Lefschetz count via the exponent fast path or the full unit loop.
/// Entries must stay below `2^16` so all products fit in `i128`.
fn screen(mat: &[[i64; 4]; 4], character_cap: u64) -> Screen {
    // Cofactor matrix; adj(A) = cof^T and A^{-1} = adj / det.
    let mut cof = [[0i128; 4]; 4];
    for (i, row) in cof.iter_mut().enumerate() {
        for (j, c) in row.iter_mut().enumerate() {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            *c = sign * minor3(mat, i, j);
        }
    }
    let det: i128 = (0..4).map(|j| mat[0][j] as i128 * cof[0][j]).sum();
    if det == 0 {
        return Screen::Rejected;
    }
    let sgn = det.signum();
    let dd = det.abs();

    // Charges q_j = (sum_k cof[k][j]) / det must all be positive.
    let mut c = [0i128; 4];
    for j in 0..4 {
        c[j] = sgn * (0..4).map(|k| cof[k][j]).sum::<i128>();
        if c[j] <= 0 {
            return Screen::Rejected;
        }
    }

    // Weights a_j = m q_j with m the least common denominator.
    let g = dd.gcd(&gcd4(c[0], c[1], c[2], c[3]));
    let m = dd / g;
    let weights = [c[0] / g, c[1] / g, c[2] / g, c[3] / g];

    // Fermat degree: least common denominator of all entries of A^{-1}.
    let mut g_all = dd;
    for row in &cof {
        for &v in row {
            g_all = g_all.gcd(&v);
        }
    }
    let d = dd / g_all;

    // Well-formedness: no common factor among any three weights, and every
    // pair sharing a factor must carry a monomial supported on that pair.
    for i in 0..4 {
        for j in i + 1..4 {
            for k in j + 1..4 {
                if weights[i].gcd(&weights[j]).gcd(&weights[k]) != 1 {
                    return Screen::Rejected;
                }
            }
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if weights[i].gcd(&weights[j]) == 1 {
                continue;
            }
            let met = (0..4).any(|r| (0..4).all(|v| v == i || v == j || mat[r][v] == 0));
            if !met {
                return Screen::Rejected;
            }
        }
    }

    if d > SCREEN_D_LIMIT as i128 {
        return Screen::Capped;
    }
    // The rows of B = d A^{-1} generate a closure of |det| residue vectors;
    // the character set is its coordinate-sum-zero subgroup, of index m.
    let order = g;
    if dd > character_cap as i128 {
        return Screen::Capped;
    }
    let d64 = d as i64;

    // Rows of B = d A^{-1}, reduced mod d: the generators of the character
    // group inside (Z/d)^4.
    let mut gens = [[0i64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let b = sgn * cof[j][i] / g_all;
            gens[i][j] = (b % d).rem_euclid(d) as i64;
        }
    }

    let pack = |v: &[i64; 4]| -> u128 {
        (v[0] as u128) | (v[1] as u128) << 32 | (v[2] as u128) << 64 | (v[3] as u128) << 96
    };
    let mut seen: HashSet<u128> = HashSet::with_capacity(dd as usize * 2);
    let mut closure: Vec<[i64; 4]> = Vec::with_capacity(dd as usize);
    let zero = [0i64; 4];
    seen.insert(pack(&zero));
    closure.push(zero);
    let mut head = 0;
    while head < closure.len() {
        let base = closure[head];
        head += 1;
        for gen in &gens {
            let mut next = [0i64; 4];
            for (t, (x, y)) in next.iter_mut().zip(base.iter().zip(gen.iter())) {
                *t = (x + y) % d64;
            }
            if seen.insert(pack(&next)) {
                closure.push(next);
            }
        }
    }
    assert_eq!(
        closure.len() as i128,
        dd,
        "row-span closure disagrees with |det| for {mat:?}"
    );

    // Characters: closure elements with vanishing coordinate sum.  The sum
    // map hits all of Z/m (the weights are coprime), so exactly |det|/m
    // survive.
    let mut interior: Vec<[i64; 4]> = Vec::new();
    let mut slices = [0u64; 3];
    let mut characters = 0i128;
    for el in &closure {
        let s = el.iter().sum::<i64>();
        if s % d64 != 0 {
            continue;
        }
        characters += 1;
        if el.iter().all(|&x| x != 0) {
            debug_assert!(s >= d64 && s <= 3 * d64);
            slices[(s / d64) as usize - 1] += 1;
            interior.push(*el);
        }
    }
    assert_eq!(
        characters, order,
        "character count disagrees with det/m for {mat:?}"
    );
    debug_assert_eq!(slices[0], slices[2]);
    let p_g = slices[0];
    let interior_size = interior.len() as u64;

    // Group exponent: lcm of the generator orders in (Z/d)^4.
    let mut e = 1i64;
    for gen in &gens {
        let content = gen.iter().fold(d64, |acc, &x| acc.gcd(&x));
        e = e.lcm(&(d64 / content));
    }
    if matches!(e, 1..=4 | 6) {
        // The unit action reduces to conjugation: maximal, lambda = 2 p_g.
        return Screen::Surface {
            weights: [
                weights[0] as i64,
                weights[1] as i64,
                weights[2] as i64,
                weights[3] as i64,
            ],
            m: m as i64,
            d: d64,
            order: order as i64,
            p_g,
            lambda: 2 * p_g,
            max_picard: true,
        };
    }

    // Full unit loop (equivalent to the reduced (Z/e)* scan).
    let units: Vec<i64> = (1..d64).filter(|t| t.gcd(&d64) == 1).collect();
    let two_d = 2 * d64;
    let stable = interior
        .iter()
        .filter(|a| {
            a.iter().sum::<i64>() == two_d
                && units
                    .iter()
                    .all(|&t| a.iter().map(|&x| t * x % d64).sum::<i64>() == two_d)
        })
        .count() as u64;
    let lambda = interior_size - stable;
    Screen::Surface {
        weights: [
            weights[0] as i64,
            weights[1] as i64,
            weights[2] as i64,
            weights[3] as i64,
        ],
        m: m as i64,
        d: d64,
        order: order as i64,
        p_g,
        lambda,
        max_picard: lambda == 2 * p_g,
    }
}

/// Invariant signature used as the deduplication key.  Weights are sorted
/// so that variable order does not split signatures.
fn signature_of(report: &SurfaceReport) -> String {
    let mut weights: Vec<BigInt> = report
        .weights
        .iter()
        .map(|w| w.parse::<BigInt>().expect("weights are decimal strings"))
        .collect();
    weights.sort();
    let ws: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
    format!(
        "w={};m={};d={};g={};pg={};lambda={};max={}",
        ws.join(","),
        report.weighted_degree,
        report.fermat_degree,
        report.aut_tor_surface.join("."),
        report.geometric_genus,
        report.lambda,
        report.maximal_picard,
    )
}

/// Recompute a screened hit with the exact library and build its record.
/// The screen and the library must agree; a discrepancy is a bug, not a
/// per-candidate failure.
fn confirm(mat: &[[i64; 4]; 4], screened: &Screen, character_cap: u64) -> Result<ScanRecord> {
    let Screen::Surface {
        weights,
        m,
        d,
        order,
        p_g,
        lambda,
        max_picard,
    } = screened
    else {
        unreachable!("only surfaces are confirmed");
    };
    let rows: Vec<Vec<BigInt>> = mat
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let p = DelsartePolynomial::from_matrix(IntMat::from_rows(rows))?;
    let report = analyze(
        &p,
        &AnalyzeOptions {
            character_cap,
            skip_newton: true,
        },
    )?;
    let lib_weights: Vec<String> = weights.iter().map(|w| w.to_string()).collect();
    assert_eq!(report.weights, lib_weights, "screen weights disagree");
    assert_eq!(report.weighted_degree, m.to_string(), "screen m disagrees");
    assert_eq!(report.fermat_degree, d.to_string(), "screen d disagrees");
    assert_eq!(
        report.character_counts.total, *order as u64,
        "screen group order disagrees"
    );
    assert_eq!(report.geometric_genus, *p_g, "screen p_g disagrees");
    assert_eq!(report.lambda, *lambda, "screen lambda disagrees");
    assert_eq!(
        report.maximal_picard, *max_picard,
        "screen verdict disagrees"
    );

    let signature = signature_of(&report);
    Ok(ScanRecord {
        schema_version: delsarte::report::SCHEMA_VERSION.to_string(),
        matrix: report.matrix.clone(),
        weights: report.weights.clone(),
        weighted_degree: report.weighted_degree.clone(),
        fermat_degree: report.fermat_degree.clone(),
        group: report.aut_tor_surface.clone(),
        geometric_genus: report.geometric_genus,
        lambda: report.lambda,
        max_picard: report.maximal_picard,
        quasismooth: report.quasismooth,
        signature,
        discovered_at_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|t| t.as_secs())
            .unwrap_or(0),
    })
}

/// Load an existing store; a missing file is an empty store.
pub fn load_store(path: &Path) -> Result<Vec<ScanRecord>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => {
            return Err(Error::Unsupported(format!(
                "cannot read scan store {}: {}",
                path.display(),
                e
            )))
        }
    };
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec: ScanRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
            position: lineno + 1,
            message: format!("bad scan record: {}", e),
        })?;
        records.push(rec);
    }
    Ok(records)
}

/// Outcome of screening candidate `index`, before deduplication.
enum WorkItem {
    Rejected,
    Capped,
    Filtered,
    Hit(Box<ScanRecord>),
}

fn candidate_matrix(cfg: &ScanConfig, index: u64) -> [[i64; 4]; 4] {
    if cfg.exhaustive {
        near_diagonal_candidate(cfg.entry_bound, index)
    } else {
        sampled_candidate(cfg, index)
    }
}

fn process(cfg: &ScanConfig, index: u64) -> WorkItem {
    let mat = candidate_matrix(cfg, index);
    let screened = screen(&mat, cfg.character_cap);
    match &screened {
        Screen::Rejected => WorkItem::Rejected,
        Screen::Capped => WorkItem::Capped,
        Screen::Surface {
            p_g, max_picard, ..
        } => {
            if !*max_picard || *p_g < cfg.min_pg {
                return WorkItem::Filtered;
            }
            match confirm(&mat, &screened, cfg.character_cap) {
                Ok(rec) => WorkItem::Hit(Box::new(rec)),
                // The library refused something the screen accepted (for
                // instance a cap raced); isolate, never abort the scan.
                Err(_) => WorkItem::Capped,
            }
        }
    }
}

/// Run a scan, appending new records to the store at `out`.
pub fn run_scan(cfg: &ScanConfig, out: &Path) -> Result<ScanSummary> {
    if cfg.entry_bound == 0 {
        return Err(Error::InvalidParameter("--entry-bound must be >= 1".into()));
    }
    if cfg.entry_bound >= 1 << 16 {
        return Err(Error::InvalidParameter(
            "--entry-bound must be below 65536".into(),
        ));
    }
    if cfg.threads == 0 {
        return Err(Error::InvalidParameter("--threads must be >= 1".into()));
    }
    if cfg.exhaustive && cfg.template != Template::NearDiagonal {
        return Err(Error::InvalidParameter(format!(
            "exhaustive enumeration is only supported for the near-diagonal \
             template, not {}",
            cfg.template
        )));
    }
    if cfg.exhaustive && cfg.entry_bound > 8 {
        return Err(Error::InvalidParameter(
            "exhaustive enumeration is limited to --entry-bound <= 8".into(),
        ));
    }
    let total = if cfg.exhaustive {
        near_diagonal_space(cfg.entry_bound)
    } else {
        cfg.count
    };

    let known: Vec<ScanRecord> = load_store(out)?;
    let known_signatures: HashSet<String> = known.iter().map(|r| r.signature.clone()).collect();

    let mut summary = ScanSummary {
        examined: total,
        ..ScanSummary::default()
    };
    // Workers take contiguous index ranges; results are merged by candidate
    // index afterwards, so the partition cannot influence the output.
    let threads = cfg.threads.min(total.max(1) as usize);
    let chunk = total.div_ceil(threads.max(1) as u64).max(1);
    let mut per_worker: Vec<(Vec<(u64, WorkItem)>,)> = Vec::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..threads {
            let lo = w as u64 * chunk;
            let hi = (lo + chunk).min(total);
            if lo >= hi {
                continue;
            }
            let cfg = cfg.clone();
            handles.push(scope.spawn(move || {
                let mut items = Vec::new();
                for i in lo..hi {
                    items.push((i, process(&cfg, i)));
                }
                (items,)
            }));
        }
        for h in handles {
            per_worker.push(h.join().expect("scan worker panicked"));
        }
    });

    // Deterministic merge: first occurrence (lowest index) of each new
    // signature wins.
    let mut fresh: BTreeMap<u64, ScanRecord> = BTreeMap::new();
    let mut claimed: HashSet<String> = HashSet::new();
    let mut all: Vec<(u64, WorkItem)> = per_worker.into_iter().flat_map(|(v,)| v).collect();
    all.sort_by_key(|(i, _)| *i);
    for (index, item) in all {
        match item {
            WorkItem::Rejected => summary.rejected += 1,
            WorkItem::Capped => summary.capped += 1,
            WorkItem::Filtered => summary.filtered += 1,
            WorkItem::Hit(rec) => {
                if known_signatures.contains(&rec.signature) {
                    summary.known_hits += 1;
                } else if claimed.insert(rec.signature.clone()) {
                    summary.new_hits += 1;
                    fresh.insert(index, *rec);
                } else {
                    summary.duplicate_hits += 1;
                }
            }
        }
    }

    if !fresh.is_empty() || !out.exists() {
        if let Some(parent) = out.parent() {
            if !parent.as_os_str().is_empty() {
                std::fs::create_dir_all(parent).map_err(|e| {
                    Error::Unsupported(format!("cannot create {}: {}", parent.display(), e))
                })?;
            }
        }
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(out)
            .map_err(|e| Error::Unsupported(format!("cannot open {}: {}", out.display(), e)))?;
        for rec in fresh.values() {
            let line = serde_json::to_string(rec).expect("records serialize");
            writeln!(file, "{}", line).map_err(|e| {
                Error::Unsupported(format!("cannot write {}: {}", out.display(), e))
            })?;
        }
    }
    Ok(summary)
}
