//! Support library for the `delsarte` binary.
//!
//! The binary itself is a thin clap frontend; everything that deserves a unit
//! test lives here.  Three concerns:
//!
//! * mapping library errors onto the documented process exit codes,
//! * parsing the plain-text vertex files accepted by the `polytope`
//!   subcommand,
//! * the search machinery behind `scan` and `oracle-check` (in the [`scan`]
//!   and [`oracle`] modules).

use delsarte::newton::{Pt2, Pt3};
use delsarte::{Error, Result};
use num_bigint::BigInt;

pub mod oracle;
pub mod scan;

/// Exit code for a library error.
///
/// `2` marks inputs the tool rejected (parse failures, degenerate or
/// ill-formed surfaces, bad parameters), `3` marks work refused because a
/// configured cap would be exceeded, and everything else is an internal
/// failure reported as `1`.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse { .. }
        | Error::NotDelsarte(_)
        | Error::SingularMatrix
        | Error::NonPositiveWeight { .. }
        | Error::NotWellFormed(_)
        | Error::InvalidParameter(_)
        | Error::UnknownExample(_)
        | Error::DegeneratePolytope
        | Error::NotSimplex { .. }
        | Error::Unsupported(_) => 2,
        Error::CapExceeded { .. } | Error::OracleBoundExceeded { .. } => 3,
    }
}

/// Vertices read from a `polytope` input file: one point per line,
/// comma-separated integer coordinates, all lines the same width.
#[derive(Debug)]
pub enum PointFile {
    Dim2(Vec<Pt2>),
    Dim3(Vec<Pt3>),
}

/// Parse a vertex file.  Blank lines and lines starting with `#` are
/// ignored; the first data line fixes the dimension (2 or 3).
pub fn parse_point_file(text: &str) -> Result<PointFile> {
    let mut rows: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut coords = Vec::new();
        for field in line.split(',') {
            let field = field.trim();
            match field.parse::<BigInt>() {
                Ok(v) => coords.push(v),
                Err(_) => {
                    return Err(Error::Parse {
                        position: lineno + 1,
                        message: format!("expected an integer coordinate, found {:?}", field),
                    })
                }
            }
        }
        rows.push((lineno + 1, coords));
    }
    let Some((_, first)) = rows.first() else {
        return Err(Error::DegeneratePolytope);
    };
    let dim = first.len();
    if dim != 2 && dim != 3 {
        return Err(Error::Parse {
            position: rows[0].0,
            message: format!("points must have 2 or 3 coordinates, found {}", dim),
        });
    }
    for (lineno, row) in &rows {
        if row.len() != dim {
            return Err(Error::Parse {
                position: *lineno,
                message: format!(
                    "inconsistent dimension: expected {} coordinates, found {}",
                    dim,
                    row.len()
                ),
            });
        }
    }
    if dim == 2 {
        let pts = rows
            .into_iter()
            .map(|(_, r)| {
                let mut it = r.into_iter();
                [it.next().unwrap(), it.next().unwrap()]
            })
            .collect();
        Ok(PointFile::Dim2(pts))
    } else {
        let pts = rows
            .into_iter()
            .map(|(_, r)| {
                let mut it = r.into_iter();
                [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()]
            })
            .collect();
        Ok(PointFile::Dim3(pts))
    }
}
