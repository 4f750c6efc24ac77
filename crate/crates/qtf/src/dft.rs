//! Discrete framelet transform: multi-level analysis and synthesis of
//! finitely supported rational arrays through a filter bank.
//!
//! Detail arrays are stored raw with respect to each filter's base; the
//! filter's `scale_sq` rides along so a consumer can form the effectively
//! scaled coefficients. Synthesis applies the single `det(M)` normalization,
//! so every intermediate stays rational and reconstruction is exact whenever
//! the bank verifies.

use crate::error::{Error, Result};
use crate::filterbank::QtfBank;
use crate::lattice::DilationContext;
use crate::laurent::RationalLaurent;
use crate::ratio::Rat;

/// A detail array together with the squared scale of the filter that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledArray {
    pub scale_sq: Rat,
    pub coeffs: RationalLaurent,
}

/// Output of `analyze`: the last approximation plus one vector of detail
/// arrays per level, finest level first.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub approx: RationalLaurent,
    pub details: Vec<Vec<ScaledArray>>,
}

/// `out(n) = sum_k v(k) u(k - Mn)`: transition of `v` by the filter `u`.
fn transition(
    ctx: &DilationContext,
    v: &RationalLaurent,
    u: &RationalLaurent,
) -> RationalLaurent {
    use num_traits::ToPrimitive;
    let mut out = RationalLaurent::zero(ctx.dim());
    for (k, vc) in v.terms() {
        for (p, uc) in u.terms() {
            let diff: Vec<i64> = k.iter().zip(p).map(|(a, b)| a - b).collect();
            let pre = ctx.apply_inv(&diff);
            if pre.iter().all(|r| r.is_integer()) {
                let n: Vec<i64> = pre
                    .iter()
                    .map(|r| r.to_integer().to_i64().expect("lattice point fits i64"))
                    .collect();
                out.add_term(&n, &(vc * uc));
            }
        }
    }
    out
}

/// `out(n) = sum_k w(k) u(n - Mk)`: subdivision of `w` by the filter `u`.
fn subdivision(
    ctx: &DilationContext,
    w: &RationalLaurent,
    u: &RationalLaurent,
) -> RationalLaurent {
    let mut out = RationalLaurent::zero(ctx.dim());
    for (k, wc) in w.terms() {
        let mk = ctx.apply(k);
        for (p, uc) in u.terms() {
            let n: Vec<i64> = mk.iter().zip(p).map(|(a, b)| a + b).collect();
            out.add_term(&n, &(wc * uc));
        }
    }
    out
}

/// Decompose `v` through `levels` rounds of the filter bank.
pub fn analyze(bank: &QtfBank, v: &RationalLaurent, levels: usize) -> Result<Decomposition> {
    if levels == 0 {
        return Err(Error::InvalidArg("levels must be at least 1".into()));
    }
    let ctx = bank.ctx();
    if v.dim() != ctx.dim() {
        return Err(Error::DimMismatch(format!(
            "input dimension {} does not match bank dimension {}",
            v.dim(),
            ctx.dim()
        )));
    }
    let mut approx = v.clone();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let level: Vec<ScaledArray> = bank
            .highpass()
            .iter()
            .map(|(f, _)| ScaledArray {
                scale_sq: f.scale_sq().clone(),
                coeffs: transition(ctx, &approx, f.base()),
            })
            .collect();
        let next = transition(ctx, &approx, bank.lowpass());
        details.push(level);
        approx = next;
    }
    Ok(Decomposition { approx, details })
}

/// Rebuild the array a decomposition came from. Exact inverse of `analyze`
/// whenever `verify_bank` passes for the same bank.
pub fn synthesize(bank: &QtfBank, dec: &Decomposition) -> Result<RationalLaurent> {
    let ctx = bank.ctx();
    let dm_rat = Rat::from_integer((ctx.dm() as i64).into());
    if dec.approx.dim() != ctx.dim() {
        return Err(Error::DimMismatch(format!(
            "approximation dimension {} does not match bank dimension {}",
            dec.approx.dim(),
            ctx.dim()
        )));
    }
    let mut approx = dec.approx.clone();
    for level in dec.details.iter().rev() {
        if level.len() != bank.highpass().len() {
            return Err(Error::DimMismatch(format!(
                "level holds {} detail arrays but the bank has {} high-pass filters",
                level.len(),
                bank.highpass().len()
            )));
        }
        let mut acc = subdivision(ctx, &approx, bank.lowpass());
        for ((f, sign), det) in bank.highpass().iter().zip(level) {
            if det.coeffs.dim() != ctx.dim() {
                return Err(Error::DimMismatch(
                    "detail array dimension does not match bank".into(),
                ));
            }
            let weight = sign.rat() * f.scale_sq();
            let term = subdivision(ctx, &det.coeffs, f.base()).scale(&weight);
            acc = acc.try_add(&term)?;
        }
        approx = acc.scale(&dm_rat);
    }
    Ok(approx)
}
