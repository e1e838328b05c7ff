//! Delsarte polynomials: four monomials in four variables, identified with
//! their 4x4 exponent matrix (rows are monomials, columns are variables).
//!
//! Input comes either as polynomial text like
//!
//! ```text
//! x0^3 + x1^3 + x2^4 + x2^2*x3^6
//! ```
//!
//! or as a matrix file with four rows of four integers.  Coefficients are
//! accepted in the text form and discarded: over an algebraically closed
//! field a coordinate rescaling normalizes all of them to 1, so only the
//! exponents matter for every invariant computed here.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::mat::IntMat;

/// A Delsarte surface polynomial, canonically its exponent matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelsartePolynomial {
    matrix: IntMat,
}

impl DelsartePolynomial {
    /// Wrap an exponent matrix.  Requires shape 4x4, nonnegative entries,
    /// nonzero determinant.
    pub fn from_matrix(matrix: IntMat) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(Error::NotDelsarte(format!(
                "exponent matrix must be 4x4, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        for i in 0..4 {
            for j in 0..4 {
                if matrix[(i, j)].is_negative() {
                    return Err(Error::NotDelsarte(format!(
                        "negative exponent {} for x{} in monomial {}",
                        matrix[(i, j)],
                        j,
                        i
                    )));
                }
            }
        }
        if matrix.det().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(DelsartePolynomial { matrix })
    }

    pub fn matrix(&self) -> &IntMat {
        &self.matrix
    }

    /// Exponent row of the `i`-th monomial.
    pub fn monomial(&self, i: usize) -> &[BigInt] {
        self.matrix.row(i)
    }

    /// Variable indices with positive exponent in monomial `i`.
    pub fn support(&self, i: usize) -> Vec<usize> {
        (0..4)
            .filter(|&j| self.matrix[(i, j)].is_positive())
            .collect()
    }

    /// Parse polynomial text.  Grammar:
    ///
    /// ```text
    /// poly   := term ('+' term)*
    /// term   := (INT '*'?)? factor ('*'? factor)*
    /// factor := 'x' INT ('^' INT)?
    /// ```
    ///
    /// Whitespace is insignificant.  A repeated variable within a term has
    /// its exponents summed.  Exactly four distinct monomials in variables
    /// `x0..x3` are required.
    pub fn parse(text: &str) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let rows = parser.poly()?;
        if rows.len() != 4 {
            return Err(Error::NotDelsarte(format!(
                "expected 4 monomials, found {}",
                rows.len()
            )));
        }
        for (i, r) in rows.iter().enumerate() {
            for (j, s) in rows.iter().enumerate().skip(i + 1) {
                if r == s {
                    return Err(Error::NotDelsarte(format!(
                        "monomials {} and {} coincide",
                        i, j
                    )));
                }
            }
        }
        DelsartePolynomial::from_matrix(IntMat::from_rows(rows))
    }

    /// Canonical text form; `parse(canonical_text(p)) == p`.
    pub fn canonical_text(&self) -> String {
        let terms: Vec<String> = (0..4)
            .map(|i| {
                let factors: Vec<String> = (0..4)
                    .filter(|&j| !self.matrix[(i, j)].is_zero())
                    .map(|j| {
                        if self.matrix[(i, j)].is_one() {
                            format!("x{}", j)
                        } else {
                            format!("x{}^{}", j, self.matrix[(i, j)])
                        }
                    })
                    .collect();
                factors.join("*")
            })
            .collect();
        terms.join(" + ")
    }

    /// Parse a matrix file: four data lines of four whitespace-separated
    /// integers; `#` starts a comment; blank lines are skipped.
    pub fn from_matrix_file(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let entries: Vec<BigInt> = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<BigInt>().map_err(|_| Error::Parse {
                        position: lineno + 1,
                        message: format!("line {}: bad integer {:?}", lineno + 1, tok),
                    })
                })
                .collect::<Result<_>>()?;
            if entries.len() != 4 {
                return Err(Error::Parse {
                    position: lineno + 1,
                    message: format!(
                        "line {}: expected 4 entries, found {}",
                        lineno + 1,
                        entries.len()
                    ),
                });
            }
            rows.push(entries);
        }
        if rows.len() != 4 {
            return Err(Error::Parse {
                position: 0,
                message: format!("expected 4 matrix rows, found {}", rows.len()),
            });
        }
        // Distinct-monomial check mirrors the text parser; equal rows would
        // otherwise surface as a less helpful SingularMatrix.
        for i in 0..4 {
            for j in i + 1..4 {
                if rows[i] == rows[j] {
                    return Err(Error::NotDelsarte(format!(
                        "matrix rows {} and {} coincide",
                        i, j
                    )));
                }
            }
        }
        DelsartePolynomial::from_matrix(IntMat::from_rows(rows))
    }
}

impl std::fmt::Display for DelsartePolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.canonical_text())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Star,
    Caret,
    Int(BigInt),
    Var(BigInt),
}

/// Token with its byte offset in the input (for error positions).
type Spanned = (Tok, usize);

fn tokenize(text: &str) -> Result<Vec<Spanned>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((Tok::Plus, i));
                i += 1;
            }
            '*' => {
                out.push((Tok::Star, i));
                i += 1;
            }
            '^' => {
                out.push((Tok::Caret, i));
                i += 1;
            }
            'x' => {
                let start = i;
                i += 1;
                let ds = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if ds == i {
                    return Err(Error::Parse {
                        position: start,
                        message: "variable name must be x followed by digits".into(),
                    });
                }
                out.push((Tok::Var(text[ds..i].parse().unwrap()), start));
            }
            d if d.is_ascii_digit() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(text[start..i].parse().unwrap()), start));
            }
            other => {
                return Err(Error::Parse {
                    position: i,
                    message: format!("unexpected character {:?}", other),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|&(_, o)| o)
            .unwrap_or_else(|| self.tokens.last().map(|&(_, o)| o + 1).unwrap_or(0))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn poly(&mut self) -> Result<Vec<Vec<BigInt>>> {
        let mut rows = vec![self.term()?];
        while let Some(Tok::Plus) = self.peek() {
            self.bump();
            rows.push(self.term()?);
        }
        if self.pos != self.tokens.len() {
            return Err(Error::Parse {
                position: self.offset(),
                message: "trailing input after polynomial".into(),
            });
        }
        Ok(rows)
    }

    fn term(&mut self) -> Result<Vec<BigInt>> {
        // Optional coefficient: accepted, checked nonzero, discarded.
        if let Some(Tok::Int(_)) = self.peek() {
            let off = self.offset();
            let Some(Tok::Int(c)) = self.bump() else {
                unreachable!()
            };
            if c.is_zero() {
                return Err(Error::Parse {
                    position: off,
                    message: "zero coefficient".into(),
                });
            }
            if let Some(Tok::Star) = self.peek() {
                self.bump();
            }
        }
        let mut row = vec![BigInt::zero(); 4];
        let mut saw_factor = false;
        while let Some(Tok::Var(_)) = self.peek() {
            self.factor(&mut row)?;
            saw_factor = true;
            if let Some(Tok::Star) = self.peek() {
                self.bump();
                // A star must be followed by another factor.
                if !matches!(self.peek(), Some(Tok::Var(_))) {
                    return Err(Error::Parse {
                        position: self.offset(),
                        message: "expected variable after '*'".into(),
                    });
                }
            }
        }
        if !saw_factor {
            return Err(Error::Parse {
                position: self.offset(),
                message: "term has no variables".into(),
            });
        }
        Ok(row)
    }

    fn factor(&mut self, row: &mut [BigInt]) -> Result<()> {
        let off = self.offset();
        let Some(Tok::Var(idx)) = self.bump() else {
            return Err(Error::Parse {
                position: off,
                message: "expected variable".into(),
            });
        };
        if idx > BigInt::from(3) {
            return Err(Error::NotDelsarte(format!(
                "variable x{} out of range (only x0..x3)",
                idx
            )));
        }
        let j = idx.to_usize().expect("index fits");
        let mut exp = BigInt::one();
        if let Some(Tok::Caret) = self.peek() {
            self.bump();
            let eoff = self.offset();
            let Some(Tok::Int(e)) = self.bump() else {
                return Err(Error::Parse {
                    position: eoff,
                    message: "expected integer exponent after '^'".into(),
                });
            };
            if e.is_zero() {
                return Err(Error::Parse {
                    position: eoff,
                    message: "exponent must be positive".into(),
                });
            }
            exp = e;
        }
        row[j] += exp;
        Ok(())
    }
}
