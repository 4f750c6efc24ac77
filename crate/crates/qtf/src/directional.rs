//! Directional quasi-tight bank construction by stepwise elimination.
//!
//! Every produced high-pass filter is a two-tap difference `c (d_p - d_q)`
//! with both taps inside the support of the low-pass filter; each elimination
//! step removes one term of the working polyphase matrix, and the final
//! residual is checked to be exactly zero.

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::filterbank::{basic_sum_rule, build_na, coset_row, QtfBank, ScaledFilter, Sign};
use crate::lattice::{lex_cmp, DilationContext};
use crate::laurent::{Exp, LaurentMatrix, RationalLaurent};
use crate::ratio::Rat;

/// Options for [`construct_directional`].
#[derive(Debug, Clone, Default)]
pub struct DirectionalOpts {
    /// Merge proportional high-pass filters into one, combining their signed
    /// squared scales. Off by default; the raw elimination output is the
    /// canonical result.
    pub merge: bool,
}

fn two_tap(dim: usize, plus: &[i64], minus: &[i64]) -> RationalLaurent {
    let mut b = RationalLaurent::zero(dim);
    b.add_term(plus, &Rat::from_integer(1.into()));
    b.add_term(minus, &Rat::from_integer((-1).into()));
    b
}

/// Subtract the contribution `sign * dm * scale_sq * row* row` of one filter
/// from the working matrix, where `row` is the coset row of `base`.
fn subtract_contribution(
    ctx: &DilationContext,
    work: &mut LaurentMatrix,
    filter: &ScaledFilter,
    sign: Sign,
) -> Result<()> {
    let row = coset_row(ctx, filter.base());
    let gram = row.adjoint().mul(&row)?;
    let factor = sign.rat() * Rat::from_integer((ctx.dm() as i64).into()) * filter.scale_sq();
    *work = work.sub(&gram.scale(&factor))?;
    Ok(())
}

/// Build a directional quasi-tight bank for `a`.
///
/// Requires the basic sum rule (all coset sums equal `1/dm`); without it the
/// residual constants cannot cancel. The elimination order is fixed:
/// off-diagonal cells `(j, k)` with `j < k` in row-major order, then diagonal
/// cells, with terms taken in lexicographic exponent order, so the output is
/// deterministic. If the tightness condition holds, every sign is `+1`.
pub fn construct_directional(
    ctx: &DilationContext,
    a: &RationalLaurent,
    opts: &DirectionalOpts,
) -> Result<QtfBank> {
    if !basic_sum_rule(ctx, a) {
        return Err(Error::NoBasicSumRule);
    }
    let dm = ctx.dm();
    let cosets = a.coset_split(ctx);
    let mut work = build_na(ctx, a)?;
    let mut filters: Vec<(ScaledFilter, Sign)> = Vec::new();
    let dmr = Rat::from_integer((dm as i64).into());
    let zero = Rat::from_integer(0.into());

    // Off-diagonal pass: each step removes one term of cell (j, k) and only
    // touches the diagonal constants elsewhere.
    for j in 0..dm {
        for k in (j + 1)..dm {
            let exponents: Vec<Exp> = work.get(j, k).terms().map(|(e, _)| e.clone()).collect();
            for gamma in exponents {
                let c = work.get(j, k).coeff(&gamma);
                if c == zero {
                    continue;
                }
                let alpha = witness_pair(&cosets[j], &cosets[k], &gamma).ok_or_else(|| {
                    Error::InternalResidue(format!(
                        "off-diagonal term without a support witness in cell ({j}, {k})"
                    ))
                })?;
                let plus = tap(ctx, j, &alpha);
                let shifted: Vec<i64> = alpha.iter().zip(&gamma).map(|(x, g)| x + g).collect();
                let minus = tap(ctx, k, &shifted);
                let base = two_tap(ctx.dim(), &plus, &minus);
                let scale_sq = c.clone().abs() / dmr.clone();
                let sign = if c > zero { Sign::Minus } else { Sign::Plus };
                let filter = ScaledFilter::new(scale_sq, base)?;
                subtract_contribution(ctx, &mut work, &filter, sign)?;
                filters.push((filter, sign));
            }
        }
    }
    for j in 0..dm {
        for k in (j + 1)..dm {
            if !work.get(j, k).is_zero() || !work.get(k, j).is_zero() {
                return Err(Error::InternalResidue(format!(
                    "off-diagonal cell ({j}, {k}) nonzero after elimination"
                )));
            }
        }
    }

    // Diagonal pass: eliminate the strictly lex-positive exponents of each
    // diagonal cell; the conjugate-negative exponent goes with it.
    for (j, coset) in cosets.iter().enumerate() {
        let exponents: Vec<Exp> = work
            .get(j, j)
            .terms()
            .filter(|(e, _)| lex_cmp(e, &vec![0; ctx.dim()]) == std::cmp::Ordering::Greater)
            .map(|(e, _)| e.clone())
            .collect();
        for gamma in exponents {
            let c = work.get(j, j).coeff(&gamma);
            if c == zero {
                continue;
            }
            let alpha = witness_pair(coset, coset, &gamma).ok_or_else(|| {
                Error::InternalResidue(format!(
                    "diagonal term without a support witness in cell ({j}, {j})"
                ))
            })?;
            let plus = tap(ctx, j, &alpha);
            let shifted: Vec<i64> = alpha.iter().zip(&gamma).map(|(x, g)| x + g).collect();
            let minus = tap(ctx, j, &shifted);
            let base = two_tap(ctx.dim(), &plus, &minus);
            let scale_sq = c.clone().abs() / dmr.clone();
            let sign = if c > zero { Sign::Minus } else { Sign::Plus };
            let filter = ScaledFilter::new(scale_sq, base)?;
            subtract_contribution(ctx, &mut work, &filter, sign)?;
            filters.push((filter, sign));
        }
    }

    // After both passes every cell must be exactly zero: the nonconstant
    // parts cancel by construction and the basic sum rule forces the
    // remaining constants to zero.
    if !work.is_zero() {
        return Err(Error::InternalResidue(
            "nonzero constant residue after elimination".to_string(),
        ));
    }

    if opts.merge {
        filters = merge_proportional(filters);
    }

    QtfBank::new(ctx.clone(), a.clone(), filters, 1)
}

/// Original-coordinates tap `gamma_j + M alpha` of a coset-domain position.
fn tap(ctx: &DilationContext, j: usize, alpha: &[i64]) -> Vec<i64> {
    let m_alpha = ctx.apply(alpha);
    ctx.gamma()[j]
        .iter()
        .zip(&m_alpha)
        .map(|(g, v)| g + v)
        .collect()
}

/// Lexicographically smallest `alpha` with `u(alpha) != 0` and
/// `v(alpha + gamma) != 0`.
fn witness_pair(u: &RationalLaurent, v: &RationalLaurent, gamma: &[i64]) -> Option<Exp> {
    let zero = Rat::from_integer(0.into());
    u.terms().map(|(e, _)| e.clone()).find(|alpha| {
        let shifted: Vec<i64> = alpha.iter().zip(gamma).map(|(x, g)| x + g).collect();
        v.coeff(&shifted) != zero
    })
}

/// Merge filters whose bases are equal up to sign, summing the signed
/// squared scales; drops exact cancellations.
fn merge_proportional(filters: Vec<(ScaledFilter, Sign)>) -> Vec<(ScaledFilter, Sign)> {
    let zero = Rat::from_integer(0.into());
    let mut order: Vec<RationalLaurent> = Vec::new();
    let mut totals: Vec<Rat> = Vec::new();
    for (f, sign) in filters {
        let base = f.base().clone();
        let neg = base.scale(&Rat::from_integer((-1).into()));
        let idx = order.iter().position(|b| b == &base || b == &neg);
        let signed = sign.rat() * f.scale_sq();
        match idx {
            Some(i) => totals[i] += signed,
            None => {
                order.push(base);
                totals.push(signed);
            }
        }
    }
    let mut out = Vec::new();
    for (base, total) in order.into_iter().zip(totals) {
        if total == zero {
            continue;
        }
        let sign = if total > zero { Sign::Plus } else { Sign::Minus };
        let f = ScaledFilter::new(total.abs(), base).expect("nonnegative scale by construction");
        out.push((f, sign));
    }
    out
}

/// Canonical representative of a filter up to integer shifts and global sign:
/// the support is shifted so its lexicographically smallest point is the
/// origin, and the base is negated if the origin coefficient is negative.
pub fn canonical_shift_rep(f: &ScaledFilter) -> ScaledFilter {
    if f.is_zero() {
        return f.clone();
    }
    let lo = f
        .base()
        .terms()
        .map(|(e, _)| e.clone())
        .min_by(|a, b| lex_cmp(a, b))
        .expect("nonzero filter has support");
    let shift: Vec<i64> = lo.iter().map(|v| -v).collect();
    let mut base = f.base().shift(&shift);
    let origin = vec![0i64; base.dim()];
    if base.coeff(&origin) < Rat::from_integer(0.into()) {
        base = base.scale(&Rat::from_integer((-1).into()));
    }
    ScaledFilter::new(f.scale_sq().clone(), base).expect("scale unchanged")
}

/// Multiset comparison of two high-pass lists after canonicalization:
/// equal iff they contain the same `(scale_sq, canonical base, sign)` triples
/// with the same multiplicities.
pub fn same_bank_multiset(lhs: &[(ScaledFilter, Sign)], rhs: &[(ScaledFilter, Sign)]) -> bool {
    if lhs.len() != rhs.len() {
        return false;
    }
    let describe = |list: &[(ScaledFilter, Sign)]| -> Vec<(String, String, i64)> {
        let mut v: Vec<(String, String, i64)> = list
            .iter()
            .map(|(f, s)| {
                let c = canonical_shift_rep(f);
                (
                    format!("{:?}", c.scale_sq()),
                    format!("{:?}", c.base()),
                    s.value(),
                )
            })
            .collect();
        v.sort();
        v
    };
    describe(lhs) == describe(rhs)
}
