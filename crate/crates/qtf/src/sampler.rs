//! Sampling of the refinable function and framelet functions on dyadic-style
//! lattices `M^{-n} Z^d`, via exact cascade iteration.
//!
//! The refinable samples are exact rationals: `phi(M^{-n} k) ~ det(M)^n a_n(k)`
//! with `a_{n+1} = a * (a_n upsampled by M)`. Framelet samples apply one more
//! subdivision step with a high-pass base and carry the irrational amplitude
//! `sqrt(scale_sq)` only at the final floating-point emission.

use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::filterbank::ScaledFilter;
use crate::lattice::{make_context, DilationContext};
use crate::laurent::RationalLaurent;
use crate::ratio::{rat_to_f64, Rat};

/// Exact samples of the refinable function at depth `depth`: the value at
/// lattice point `M^{-depth} k` is `values.coeff(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiSamples {
    pub matrix: Vec<Vec<i64>>,
    pub depth: usize,
    pub values: RationalLaurent,
}

/// Floating-point samples of one framelet function at depth `depth`; entries
/// are `(k, psi(M^{-depth} k))` in lexicographic order of `k`.
#[derive(Debug, Clone)]
pub struct PsiSamples {
    pub matrix: Vec<Vec<i64>>,
    pub depth: usize,
    pub values: Vec<(Vec<i64>, f64)>,
}

/// Sample the refinable function of `a` on `M^{-n} Z^d`.
pub fn sample_refinable(
    ctx: &DilationContext,
    a: &RationalLaurent,
    n: usize,
) -> Result<PhiSamples> {
    if ctx.dim() != a.dim() {
        return Err(Error::DimMismatch(format!(
            "filter dimension {} does not match dilation dimension {}",
            a.dim(),
            ctx.dim()
        )));
    }
    if !a.value_at_zero().is_one() {
        return Err(Error::NotNormalized);
    }
    if n == 0 {
        return Err(Error::InvalidArg("sampling depth must be at least 1".into()));
    }
    let dm_rat = Rat::from_integer((ctx.dm() as i64).into());
    let mut cascade = a.clone();
    let mut scale = dm_rat.clone();
    for _ in 1..n {
        cascade = a.try_mul(&cascade.dilate(ctx))?;
        scale *= &dm_rat;
    }
    Ok(PhiSamples {
        matrix: ctx.matrix().to_vec(),
        depth: n,
        values: cascade.scale(&scale),
    })
}

/// Sample a framelet function from refinable samples: one subdivision step by
/// the high-pass base at depth `phi.depth + 1`, scaled by the amplitude.
pub fn sample_framelet(
    ctx: &DilationContext,
    filter: &ScaledFilter,
    phi: &PhiSamples,
) -> Result<PsiSamples> {
    if phi.matrix != ctx.matrix() {
        return Err(Error::DepthMismatch(
            "refinable samples were taken for a different dilation matrix".into(),
        ));
    }
    if filter.dim() != ctx.dim() {
        return Err(Error::DimMismatch(
            "filter dimension does not match dilation context".into(),
        ));
    }
    let dm_rat = Rat::from_integer((ctx.dm() as i64).into());
    let mut mn = identity_i64(ctx.dim());
    for _ in 0..phi.depth {
        mn = mat_mul_i64(ctx.matrix(), &mn);
    }
    let mut exact = RationalLaurent::zero(ctx.dim());
    for (k, bc) in filter.base().terms() {
        let mnk = mat_vec_i64(&mn, k);
        for (j, pv) in phi.values.terms() {
            let target: Vec<i64> = j.iter().zip(&mnk).map(|(a, b)| a + b).collect();
            exact.add_term(&target, &(bc * pv));
        }
    }
    exact = exact.scale(&dm_rat);
    let amp = filter.amplitude();
    let values: Vec<(Vec<i64>, f64)> = exact
        .terms()
        .map(|(k, v)| (k.clone(), amp * rat_to_f64(v)))
        .collect();
    Ok(PsiSamples {
        matrix: ctx.matrix().to_vec(),
        depth: phi.depth + 1,
        values,
    })
}

fn identity_i64(d: usize) -> Vec<Vec<i64>> {
    (0..d)
        .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn mat_mul_i64(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn mat_vec_i64(a: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

fn lattice_point(ctx: &DilationContext, k: &[i64], depth: usize) -> Vec<f64> {
    let mut v: Vec<Rat> = k.iter().map(|&x| Rat::from_integer(x.into())).collect();
    for _ in 0..depth {
        let mut next = vec![Rat::zero(); v.len()];
        for (i, row) in ctx.inv().iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    next[i] += c * &v[j];
                }
            }
        }
        v = next;
    }
    v.iter().map(rat_to_f64).collect()
}

fn csv_header(d: usize) -> String {
    let mut s = String::new();
    for i in 1..=d {
        let _ = write!(s, "x{i},");
    }
    s.push_str("value\n");
    s
}

/// Render refinable samples as CSV with floating-point lattice coordinates.
pub fn phi_csv(phi: &PhiSamples) -> Result<String> {
    let ctx = make_context(&phi.matrix)?;
    let mut out = csv_header(ctx.dim());
    for (k, v) in phi.values.terms() {
        let point = lattice_point(&ctx, k, phi.depth);
        for x in &point {
            let _ = write!(out, "{x},");
        }
        let _ = writeln!(out, "{}", rat_to_f64(v));
    }
    Ok(out)
}

/// Render framelet samples as CSV with floating-point lattice coordinates.
pub fn psi_csv(psi: &PsiSamples) -> Result<String> {
    let ctx = make_context(&psi.matrix)?;
    let mut out = csv_header(ctx.dim());
    for (k, v) in &psi.values {
        let point = lattice_point(&ctx, k, psi.depth);
        for x in &point {
            let _ = write!(out, "{x},");
        }
        let _ = writeln!(out, "{v}");
    }
    Ok(out)
}
