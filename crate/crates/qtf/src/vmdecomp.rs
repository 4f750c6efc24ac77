//! Vanishing-moment decompositions: writing a filter with `m` vanishing
//! moments as a sum of difference-operator convolutions, and a Hermitian
//! filter with `2m` vanishing moments as a signed sum of Hermitian squares
//! whose factors all have at least `m` vanishing moments.

use std::collections::BTreeMap;

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::filterbank::{ScaledFilter, Sign};
use crate::laurent::{multi_indices, nabla_delta, RationalLaurent, Vmo};
use crate::ratio::Rat;
use crate::specfact::scalar_quasi_sos;

fn found_vmo(v: Vmo) -> usize {
    match v {
        Vmo::Finite(n) => n,
        Vmo::Infinite => usize::MAX,
    }
}

/// Decompose `u` with at least `m` vanishing moments as
/// `u = sum_{|nu| = m} nabla^nu delta * u_nu`.
///
/// The returned map only carries the nonzero `u_nu`. The construction shifts
/// the support into the nonnegative orthant, peels support shells of maximal
/// degree one point at a time (splitting each point `k` as `nu + j` with `nu`
/// the lexicographically largest multi-index below `k` of total degree `m`),
/// and shifts the pieces back, so it is deterministic.
pub fn nabla_decompose(
    u: &RationalLaurent,
    m: usize,
) -> Result<BTreeMap<Vec<usize>, RationalLaurent>> {
    if !u.vmo().at_least(m) {
        return Err(Error::InsufficientVM {
            need: m,
            found: found_vmo(u.vmo()),
        });
    }
    let dim = u.dim();
    let mut out: BTreeMap<Vec<usize>, RationalLaurent> = BTreeMap::new();
    if u.is_zero() {
        return Ok(out);
    }
    let (lo, _) = u.support_box().expect("nonzero filter has a support box");
    let neg_lo: Vec<i64> = lo.iter().map(|v| -v).collect();
    let mut work = u.shift(&neg_lo);
    let zero = Rat::from_integer(0.into());
    let minus_one_m = if m.is_multiple_of(2) {
        Rat::from_integer(1.into())
    } else {
        Rat::from_integer((-1).into())
    };

    let max_shell = work
        .terms()
        .map(|(k, _)| k.iter().sum::<i64>())
        .max()
        .unwrap_or(0);
    for shell in (m as i64..=max_shell).rev() {
        let points: Vec<Vec<i64>> = work
            .terms()
            .filter(|(k, _)| k.iter().sum::<i64>() == shell)
            .map(|(k, _)| k.clone())
            .collect();
        for k in points {
            let c = work.coeff(&k);
            if c == zero {
                continue;
            }
            // Greedy split k = nu + j with |nu| = m, nu lex-largest below k.
            let mut nu = vec![0usize; dim];
            let mut remaining = m;
            for i in 0..dim {
                let take = (k[i] as usize).min(remaining);
                nu[i] = take;
                remaining -= take;
            }
            debug_assert_eq!(remaining, 0);
            let j: Vec<i64> = k
                .iter()
                .zip(&nu)
                .map(|(ki, ni)| ki - *ni as i64)
                .collect();
            let w = c * &minus_one_m;
            out.entry(nu.clone())
                .or_insert_with(|| RationalLaurent::zero(dim))
                .add_term(&j, &w);
            let piece = nabla_delta(&nu).shift(&j).scale(&w);
            work = work.try_sub(&piece)?;
        }
    }
    if !work.is_zero() {
        // A filter supported in the simplex of degree < m with m vanishing
        // moments is zero, so a nonzero remainder means a bug.
        return Err(Error::InternalResidue(
            "nonzero remainder after difference-operator peeling".to_string(),
        ));
    }
    let mut shifted = BTreeMap::new();
    for (nu, part) in out {
        if part.is_zero() {
            continue;
        }
        shifted.insert(nu, part.shift(&lo));
    }
    Ok(shifted)
}

/// Rebuild `sum_nu nabla^nu delta * u_nu`; the exact inverse of
/// [`nabla_decompose`].
pub fn nabla_reconstruct(
    dim: usize,
    parts: &BTreeMap<Vec<usize>, RationalLaurent>,
) -> RationalLaurent {
    let mut acc = RationalLaurent::zero(dim);
    for (nu, part) in parts {
        let piece = nabla_delta(nu)
            .try_mul(part)
            .expect("parts share the dimension");
        acc = acc.try_add(&piece).expect("parts share the dimension");
    }
    acc
}

/// Write a Hermitian `u` with at least `2m` vanishing moments as
/// `u^ = sum_l sign_l * scale_l * |base_l^|^2` where every base has at least
/// `m` vanishing moments.
///
/// Each degree-`2m` piece of the difference-operator decomposition is handled
/// by one of two routes: a multi-index that is not twice another splits into a
/// cross term plus two subtracted squares, and a doubled multi-index reduces
/// to a scalar signed-squares problem for its (Hermitian) carrier.
pub fn signed_squares_vm(u: &RationalLaurent, m: usize) -> Result<Vec<(ScaledFilter, Sign)>> {
    if u.adjoint() != *u {
        return Err(Error::NotHermitian);
    }
    if !u.vmo().at_least(2 * m) {
        return Err(Error::InsufficientVM {
            need: 2 * m,
            found: found_vmo(u.vmo()),
        });
    }
    let dim = u.dim();
    let mut out: Vec<(ScaledFilter, Sign)> = Vec::new();
    if u.is_zero() {
        return Ok(out);
    }
    let half = Rat::new(1.into(), 2.into());
    let decomp = nabla_decompose(u, 2 * m)?;
    let one = Rat::from_integer(1.into());
    let mut push = |scale_sq: Rat, base: RationalLaurent, sign: Sign| -> Result<()> {
        if base.is_zero() || scale_sq == Rat::from_integer(0.into()) {
            return Ok(());
        }
        out.push((ScaledFilter::new(scale_sq, base)?, sign));
        Ok(())
    };

    for nu in multi_indices(dim, 2 * m) {
        let Some(part) = decomp.get(&nu) else {
            continue;
        };
        let carrier = part.scale(&half);
        if nu.iter().all(|v| v % 2 == 0) {
            // Doubled multi-index nu = 2 mu: the pair of conjugate pieces
            // collapses onto |nabla^mu delta^|^2 times a Hermitian carrier.
            let mu: Vec<usize> = nu.iter().map(|v| v / 2).collect();
            let mu_shift: Vec<i64> = mu.iter().map(|&v| v as i64).collect();
            let neg_mu_shift: Vec<i64> = mu.iter().map(|&v| -(v as i64)).collect();
            let mut eta = carrier
                .shift(&mu_shift)
                .try_add(&carrier.adjoint().shift(&neg_mu_shift))?;
            if m % 2 == 1 {
                eta = eta.scale(&Rat::from_integer((-1).into()));
            }
            debug_assert_eq!(eta.adjoint(), eta);
            let (kappa0, pairs) = scalar_quasi_sos(&eta)?;
            if kappa0 != Rat::from_integer(0.into()) {
                let sign = if kappa0 > Rat::from_integer(0.into()) {
                    Sign::Plus
                } else {
                    Sign::Minus
                };
                push(kappa0.abs(), nabla_delta(&mu), sign)?;
            }
            for (scale_sq, two_tap, sign) in pairs {
                let base = nabla_delta(&mu).try_mul(&two_tap)?;
                push(scale_sq, base, sign)?;
            }
        } else {
            // Split nu = alpha + beta with |alpha| = |beta| = m; the cross
            // term carrying the piece appears from one added square minus the
            // two pure squares.
            let mut alpha = vec![0usize; dim];
            let mut remaining = m;
            for i in 0..dim {
                let take = nu[i].min(remaining);
                alpha[i] = take;
                remaining -= take;
            }
            debug_assert_eq!(remaining, 0);
            let beta: Vec<usize> = nu.iter().zip(&alpha).map(|(n, a)| n - a).collect();
            let left = nabla_delta(&alpha).adjoint();
            let right = nabla_delta(&beta).try_mul(&carrier)?;
            push(one.clone(), left.try_add(&right)?, Sign::Plus)?;
            push(one.clone(), nabla_delta(&alpha), Sign::Minus)?;
            push(one.clone(), right, Sign::Minus)?;
        }
    }
    Ok(out)
}

/// Rebuild `sum_l sign_l * scale_l * adjoint(base_l) * base_l`; the exact
/// inverse of [`signed_squares_vm`].
pub fn squares_reconstruct(dim: usize, terms: &[(ScaledFilter, Sign)]) -> RationalLaurent {
    let mut acc = RationalLaurent::zero(dim);
    for (f, sign) in terms {
        let sq = f
            .base()
            .adjoint()
            .try_mul(f.base())
            .expect("base multiplies with its adjoint");
        let factor = sign.rat() * f.scale_sq();
        acc = acc
            .try_add(&sq.scale(&factor))
            .expect("terms share the dimension");
    }
    acc
}
