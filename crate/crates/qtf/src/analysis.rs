//! Structural analysis of a low-pass filter: sum-rule order, the vanishing-moment
//! ceiling, the tightness condition, and the predicted high-pass count.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::filterbank::basic_sum_rule;
use crate::lattice::DilationContext;
use crate::laurent::{multi_indices, RationalLaurent, Vmo};
use crate::ratio::Rat;

/// Summary of the structural properties that govern which constructions apply
/// to a low-pass filter and how many vanishing moments they can reach.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilterReport {
    /// Sum-rule order with respect to the dilation matrix.
    pub sr: usize,
    /// Vanishing-moment order of the deficit filter `u_a` (symbol `1 - |a^|^2`).
    pub vmo_ua: Vmo,
    /// `min(sr, floor(vmo_ua / 2))`: upper bound for the minimal vanishing
    /// moments of any quasi-tight bank with this low-pass filter.
    pub vm_ceiling: usize,
    /// Whether every coset of the filter sums to `1/dm`.
    pub basic_sum_rule: bool,
    /// Whether all coset cross-correlations have nonnegative coefficients,
    /// in which case the directional construction yields a tight bank.
    pub tightness_condition: bool,
    /// Number of high-pass filters the directional construction will produce.
    /// `None` when the basic sum rule fails (the construction does not apply).
    pub predicted_s: Option<usize>,
}

impl FilterReport {
    /// JSON form used by the CLI.
    pub fn to_value(&self) -> Value {
        let vmo_ua = match self.vmo_ua {
            Vmo::Finite(n) => json!(n),
            Vmo::Infinite => Value::Null,
        };
        json!({
            "sr": self.sr,
            "vmo_ua": vmo_ua,
            "vm_ceiling": self.vm_ceiling,
            "basic_sum_rule": self.basic_sum_rule,
            "tightness_condition": self.tightness_condition,
            "predicted_s": self.predicted_s,
        })
    }
}

/// Sum-rule order of `a` with respect to the dilation matrix: the largest `m`
/// such that for every total degree `t < m` and every multi-index `mu` with
/// `|mu| = t`, the coset moments `sum_k a(gamma + M k) (gamma + M k)^mu` agree
/// across all cosets `gamma`.
///
/// Moments are taken in the original coordinates, so no change of variables is
/// needed when comparing cosets. The result is capped at `spread(a) + 1`; a
/// nonzero filter whose coset moments agree up to that degree would have to be
/// zero (degree-`spread` polynomials interpolate arbitrary data on the support
/// box), so the cap is never the binding value for nonzero input.
pub fn sum_rule_order(ctx: &DilationContext, a: &RationalLaurent) -> usize {
    if a.is_zero() {
        return 0;
    }
    let cap = a.spread() + 1;
    for t in 0..cap {
        for mu in multi_indices(ctx.dim(), t) {
            let mut coset_moments = vec![Rat::from_integer(0.into()); ctx.dm()];
            for (k, c) in a.terms() {
                let (j, _) = ctx.reduce_to_coset(k);
                let mut w = c.clone();
                for (i, &e) in mu.iter().enumerate() {
                    for _ in 0..e {
                        w *= Rat::from_integer(k[i].into());
                    }
                }
                coset_moments[j] += w;
            }
            let first = coset_moments[0].clone();
            if coset_moments.iter().any(|m| m != &first) {
                return t;
            }
        }
    }
    cap
}

/// The deficit filter `u_a` with symbol `1 - |a^(xi)|^2`.
pub fn square_deficit(a: &RationalLaurent) -> RationalLaurent {
    let auto = a
        .adjoint()
        .try_mul(a)
        .expect("dimensions agree by construction");
    RationalLaurent::delta(a.dim())
        .try_sub(&auto)
        .expect("dimensions agree by construction")
}

/// The ceiling `min(sr, floor(vmo(u_a)/2))` on the minimal vanishing moments
/// of any quasi-tight bank for `a`, together with `u_a` itself.
///
/// When `u_a = 0` (so its vanishing-moment order is unbounded) the ceiling is
/// the sum-rule order alone.
pub fn vm_ceiling(ctx: &DilationContext, a: &RationalLaurent) -> (usize, RationalLaurent) {
    let ua = square_deficit(a);
    let sr = sum_rule_order(ctx, a);
    let ceiling = match ua.vmo() {
        Vmo::Finite(n) => sr.min(n / 2),
        Vmo::Infinite => sr,
    };
    (ceiling, ua)
}

/// True iff every coefficient of every coset cross-correlation
/// `adjoint(a^[gamma_j]) * a^[gamma_k]` is nonnegative. When this holds the
/// directional construction produces a tight bank (all signs `+1`).
pub fn tightness_condition(ctx: &DilationContext, a: &RationalLaurent) -> bool {
    let cosets = a.coset_split(ctx);
    let zero = Rat::from_integer(0.into());
    for j in 0..ctx.dm() {
        for k in j..ctx.dm() {
            let prod = cosets[j]
                .adjoint()
                .try_mul(&cosets[k])
                .expect("cosets share dimension");
            if prod.terms().any(|(_, c)| c < &zero) {
                return false;
            }
        }
    }
    true
}

/// Number of high-pass filters the directional construction produces:
/// one per nonzero term of each strict off-diagonal coset cross-correlation,
/// plus one per strictly positive exponent of each coset autocorrelation.
pub fn predicted_highpass_count(ctx: &DilationContext, a: &RationalLaurent) -> Result<usize> {
    if !basic_sum_rule(ctx, a) {
        return Err(Error::NoBasicSumRule);
    }
    let cosets = a.coset_split(ctx);
    let mut s = 0usize;
    for j in 0..ctx.dm() {
        for k in (j + 1)..ctx.dm() {
            let prod = cosets[j]
                .adjoint()
                .try_mul(&cosets[k])
                .expect("cosets share dimension");
            s += prod.num_terms();
        }
    }
    for coset in &cosets {
        let auto = coset
            .adjoint()
            .try_mul(coset)
            .expect("cosets share dimension");
        // The autocorrelation is Hermitian with a nonzero constant term
        // (each coset sums to 1/dm under the basic sum rule), so the count
        // of nonzero terms is odd and splits evenly into +/- exponent pairs.
        debug_assert!(auto.num_terms() % 2 == 1);
        s += (auto.num_terms() - 1) / 2;
    }
    Ok(s)
}

/// Full structural report for a low-pass filter.
pub fn analyze_filter(ctx: &DilationContext, a: &RationalLaurent) -> FilterReport {
    let sr = sum_rule_order(ctx, a);
    let (ceiling, ua) = vm_ceiling(ctx, a);
    let bsr = basic_sum_rule(ctx, a);
    let predicted_s = if bsr {
        Some(predicted_highpass_count(ctx, a).expect("basic sum rule checked"))
    } else {
        None
    };
    FilterReport {
        sr,
        vmo_ua: ua.vmo(),
        vm_ceiling: ceiling,
        basic_sum_rule: bsr,
        tightness_condition: tightness_condition(ctx, a),
        predicted_s,
    }
}
