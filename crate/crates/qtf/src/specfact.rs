//! Signed spectral factorization of Hermitian Laurent-polynomial matrices:
//! `A = diag(kappa) + sum_l sign_l * scale_l * u_l u_l*` where every column
//! `u_l` has at most two nonzero monomial entries. The scalar variant writes a
//! Hermitian Laurent polynomial as a signed constant plus signed squares of
//! two-tap filters.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::filterbank::Sign;
use crate::lattice::lex_cmp;
use crate::laurent::{Exp, LaurentMatrix, RationalLaurent};
use crate::ratio::Rat;

/// One rank-one term `sign * scale_sq * u u*` of a factorization; `column`
/// holds the entries of `u` with the shared amplitude `sqrt(scale_sq)`
/// factored out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnTerm {
    pub scale_sq: Rat,
    pub column: Vec<RationalLaurent>,
    pub sign: Sign,
}

impl ColumnTerm {
    /// The matrix `sign * scale_sq * u u*` this term contributes.
    pub fn contribution(&self, dim: usize) -> LaurentMatrix {
        let r = self.column.len();
        let mut out = LaurentMatrix::zero(r, r, dim);
        let factor = self.sign.rat() * &self.scale_sq;
        for i in 0..r {
            for l in 0..r {
                let prod = self.column[i]
                    .try_mul(&self.column[l].adjoint())
                    .expect("column entries share the dimension");
                *out.get_mut(i, l) = prod.scale(&factor);
            }
        }
        out
    }
}

/// Result of [`factor_hermitian`]: constant diagonal plus rank-one terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermitianFactorization {
    pub kappa: Vec<Rat>,
    pub terms: Vec<ColumnTerm>,
}

impl HermitianFactorization {
    /// Rebuild the factored matrix; exact reconstruction is the defining
    /// property of the output.
    pub fn reconstruct(&self, dim: usize) -> LaurentMatrix {
        let r = self.kappa.len();
        let mut out = LaurentMatrix::zero(r, r, dim);
        let origin = vec![0i64; dim];
        for (j, k) in self.kappa.iter().enumerate() {
            out.get_mut(j, j).add_term(&origin, k);
        }
        for term in &self.terms {
            out = out
                .add(&term.contribution(dim))
                .expect("contribution shape matches");
        }
        out
    }
}

fn monomial(dim: usize, e: &[i64], c: Rat) -> RationalLaurent {
    let mut u = RationalLaurent::zero(dim);
    u.add_term(e, &c);
    u
}

/// Factor a Hermitian matrix `A` as `diag(kappa) + sum sign * scale * u u*`.
///
/// Elimination order is fixed (off-diagonal cells row-major, then diagonal
/// cells, terms in lexicographic exponent order), so the output is
/// deterministic. The diagonal constants `kappa_j` always equal the `j`-th
/// column sum of `A(0)`, which each rank-one term leaves unchanged.
pub fn factor_hermitian(a: &LaurentMatrix) -> Result<HermitianFactorization> {
    if a.rows() != a.cols() || !a.is_hermitian() {
        return Err(Error::NotHermitian);
    }
    let r = a.rows();
    let dim = a.dim();
    let zero = Rat::from_integer(0.into());
    let one = Rat::from_integer(1.into());
    let mut work = a.clone();
    let mut terms: Vec<ColumnTerm> = Vec::new();

    // Off-diagonal cells (j, k), j < k: each step removes the eliminated term
    // from (j, k) and its conjugate from (k, j), and shifts two diagonal
    // constants.
    for j in 0..r {
        for k in (j + 1)..r {
            let exponents: Vec<Exp> = work.get(j, k).terms().map(|(e, _)| e.clone()).collect();
            for gamma in exponents {
                let c = work.get(j, k).coeff(&gamma);
                if c == zero {
                    continue;
                }
                let mut column = vec![RationalLaurent::zero(dim); r];
                column[j] = monomial(dim, &vec![0i64; dim], one.clone());
                let neg_gamma: Vec<i64> = gamma.iter().map(|v| -v).collect();
                column[k] = monomial(dim, &neg_gamma, -one.clone());
                let sign = if c > zero { Sign::Minus } else { Sign::Plus };
                let term = ColumnTerm {
                    scale_sq: c.abs(),
                    column,
                    sign,
                };
                work = work.sub(&term.contribution(dim))?;
                terms.push(term);
            }
        }
    }

    // Diagonal cells: remove the strictly lex-positive exponents (the
    // conjugate-negative partner cancels in the same step).
    let origin = vec![0i64; dim];
    for j in 0..r {
        let exponents: Vec<Exp> = work
            .get(j, j)
            .terms()
            .filter(|(e, _)| lex_cmp(e, &origin) == std::cmp::Ordering::Greater)
            .map(|(e, _)| e.clone())
            .collect();
        for gamma in exponents {
            let c = work.get(j, j).coeff(&gamma);
            if c == zero {
                continue;
            }
            let mut column = vec![RationalLaurent::zero(dim); r];
            let mut entry = monomial(dim, &origin, one.clone());
            entry.add_term(&gamma, &-one.clone());
            column[j] = entry;
            let sign = if c > zero { Sign::Minus } else { Sign::Plus };
            let term = ColumnTerm {
                scale_sq: c.abs(),
                column,
                sign,
            };
            work = work.sub(&term.contribution(dim))?;
            terms.push(term);
        }
    }

    let mut kappa = Vec::with_capacity(r);
    for j in 0..r {
        for k in 0..r {
            if j != k && !work.get(j, k).is_zero() {
                return Err(Error::InternalResidue(format!(
                    "off-diagonal cell ({j}, {k}) nonzero after factorization"
                )));
            }
        }
        let cell = work.get(j, j);
        if cell.terms().any(|(e, _)| e.iter().any(|&v| v != 0)) {
            return Err(Error::InternalResidue(format!(
                "diagonal cell {j} not constant after factorization"
            )));
        }
        kappa.push(cell.coeff(&origin));
    }
    Ok(HermitianFactorization { kappa, terms })
}

/// Constant term plus signed two-tap squares `(scale_sq, base, sign)`.
pub type ScalarQuasiSos = (Rat, Vec<(Rat, RationalLaurent, Sign)>);

/// Write a Hermitian Laurent polynomial as
/// `u^ = kappa0 + sum sign * scale * |two-tap^|^2` with `kappa0 = u^(0)`.
///
/// Returns the constant and the list `(scale_sq, base, sign)` with each base
/// of the form `delta_0 - delta_gamma` for a lex-positive `gamma`.
pub fn scalar_quasi_sos(u: &RationalLaurent) -> Result<ScalarQuasiSos> {
    if u.adjoint() != *u {
        return Err(Error::NotHermitian);
    }
    let dim = u.dim();
    let origin = vec![0i64; dim];
    let zero = Rat::from_integer(0.into());
    let one = Rat::from_integer(1.into());
    let mut terms = Vec::new();
    for (gamma, c) in u.terms() {
        if lex_cmp(gamma, &origin) != std::cmp::Ordering::Greater {
            continue;
        }
        let mut base = monomial(dim, &origin, one.clone());
        base.add_term(gamma, &-one.clone());
        let sign = if c > &zero { Sign::Minus } else { Sign::Plus };
        terms.push((c.abs(), base, sign));
    }
    Ok((u.value_at_zero(), terms))
}
