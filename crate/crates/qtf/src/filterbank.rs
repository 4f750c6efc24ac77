//! Filter banks built from a low-pass filter and signed high-pass filters.
//!
//! High-pass filters produced by the constructions carry an irrational
//! amplitude `sqrt(scale_sq)` times a rational filter. Storing the square of
//! the amplitude keeps every verification identity inside the rationals: the
//! bank identity only ever uses `scale_sq * base * base`.

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::lattice::DilationContext;
use crate::laurent::{LaurentMatrix, RationalLaurent, Vmo};
use crate::ratio::{rat_to_f64, Rat};

/// The sign `epsilon` attached to a high-pass filter; a bank is tight when
/// every sign is positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn of_rat(r: &Rat) -> Option<Sign> {
        if r.is_positive() {
            Some(Sign::Plus)
        } else if r.is_negative() {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn rat(self) -> Rat {
        Rat::from_integer(self.value().into())
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A filter `sqrt(scale_sq) * base` with `scale_sq` rational and nonnegative.
///
/// Canonical form: the base has content 1 (integer, coprime coefficients) with
/// all square rational factors absorbed into `scale_sq`; the zero filter is
/// `(1, 0)`. Equality of canonical forms is exact filter equality up to the
/// sign convention of the base.
#[derive(Clone, PartialEq, Eq)]
pub struct ScaledFilter {
    scale_sq: Rat,
    base: RationalLaurent,
}

impl ScaledFilter {
    pub fn new(scale_sq: Rat, base: RationalLaurent) -> Result<Self> {
        if scale_sq.is_negative() {
            return Err(Error::InvalidArg(format!(
                "scale_sq must be nonnegative, got {}",
                scale_sq
            )));
        }
        let mut f = ScaledFilter { scale_sq, base };
        f.canonicalize();
        Ok(f)
    }

    pub fn from_laurent(base: RationalLaurent) -> Self {
        Self::new(Rat::one(), base).expect("unit scale is nonnegative")
    }

    pub fn zero(dim: usize) -> Self {
        ScaledFilter {
            scale_sq: Rat::one(),
            base: RationalLaurent::zero(dim),
        }
    }

    fn canonicalize(&mut self) {
        if self.base.is_zero() || self.scale_sq.is_zero() {
            self.scale_sq = Rat::one();
            self.base = RationalLaurent::zero(self.base.dim());
            return;
        }
        let c = self.base.content();
        if !c.is_one() {
            self.base = self.base.scale(&(Rat::one() / c.clone()));
            self.scale_sq *= c.clone() * c;
        }
    }

    pub fn scale_sq(&self) -> &Rat {
        &self.scale_sq
    }

    pub fn base(&self) -> &RationalLaurent {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero()
    }

    /// Floating-point amplitude `sqrt(scale_sq)`.
    pub fn amplitude(&self) -> f64 {
        rat_to_f64(&self.scale_sq).sqrt()
    }

    /// Multiplies the represented filter by a rational factor.
    pub fn scale_by(&self, r: &Rat) -> Self {
        if r.is_zero() {
            return Self::zero(self.dim());
        }
        let base = if r.is_negative() {
            -&self.base
        } else {
            self.base.clone()
        };
        Self::new(self.scale_sq.clone() * r.clone() * r.clone(), base)
            .expect("square factor is nonnegative")
    }

    /// Convolves the base with a rational filter, keeping the amplitude.
    pub fn mul_laurent(&self, u: &RationalLaurent) -> Result<Self> {
        Self::new(self.scale_sq.clone(), self.base.try_mul(u)?)
    }

    pub fn shift(&self, k0: &[i64]) -> Self {
        ScaledFilter {
            scale_sq: self.scale_sq.clone(),
            base: self.base.shift(k0),
        }
    }

    pub fn adjoint(&self) -> Self {
        ScaledFilter {
            scale_sq: self.scale_sq.clone(),
            base: self.base.adjoint(),
        }
    }

    pub fn vmo(&self) -> Vmo {
        self.base.vmo()
    }

    /// Symbol value including the irrational amplitude.
    pub fn eval_complex(&self, xi: &[f64]) -> Complex64 {
        self.base.eval_complex(xi) * self.amplitude()
    }
}

impl fmt::Debug for ScaledFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "sqrt({})*{:?}",
            crate::ratio::format_rational(&self.scale_sq),
            self.base
        )
    }
}

/// Optional provenance carried in bank documents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BankMeta {
    pub name: Option<String>,
    pub source: Option<String>,
}

/// A quasi-tight filter bank `{a; b_1, ..., b_s}` with signs.
#[derive(Debug, Clone)]
pub struct QtfBank {
    ctx: DilationContext,
    lowpass: RationalLaurent,
    highpass: Vec<(ScaledFilter, Sign)>,
    claimed_vmo: usize,
    meta: BankMeta,
}

impl QtfBank {
    pub fn new(
        ctx: DilationContext,
        lowpass: RationalLaurent,
        highpass: Vec<(ScaledFilter, Sign)>,
        claimed_vmo: usize,
    ) -> Result<Self> {
        if lowpass.dim() != ctx.dim() {
            return Err(Error::DimMismatch(format!(
                "low-pass dimension {} vs dilation dimension {}",
                lowpass.dim(),
                ctx.dim()
            )));
        }
        for (i, (f, _)) in highpass.iter().enumerate() {
            if f.dim() != ctx.dim() {
                return Err(Error::DimMismatch(format!(
                    "high-pass {} has dimension {}, expected {}",
                    i,
                    f.dim(),
                    ctx.dim()
                )));
            }
        }
        Ok(QtfBank {
            ctx,
            lowpass,
            highpass,
            claimed_vmo,
            meta: BankMeta::default(),
        })
    }

    pub fn with_meta(mut self, meta: BankMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn ctx(&self) -> &DilationContext {
        &self.ctx
    }

    pub fn lowpass(&self) -> &RationalLaurent {
        &self.lowpass
    }

    pub fn highpass(&self) -> &[(ScaledFilter, Sign)] {
        &self.highpass
    }

    pub fn claimed_vmo(&self) -> usize {
        self.claimed_vmo
    }

    pub fn meta(&self) -> &BankMeta {
        &self.meta
    }

    pub fn is_tight(&self) -> bool {
        self.highpass.iter().all(|(_, s)| *s == Sign::Plus)
    }
}

/// Row vector of polyphase symbols `(a^[gamma_1]^, ..., a^[gamma_dm]^)`.
pub fn coset_row(ctx: &DilationContext, a: &RationalLaurent) -> LaurentMatrix {
    let parts = a.coset_split(ctx);
    LaurentMatrix::from_entries(1, ctx.dm(), parts).expect("coset parts share the dimension")
}

/// The normal matrix `N_a = I - dm * row(a)* row(a)` whose signed spectral
/// decomposition yields the high-pass filters.
pub fn build_na(ctx: &DilationContext, a: &RationalLaurent) -> Result<LaurentMatrix> {
    if a.dim() != ctx.dim() {
        return Err(Error::DimMismatch(format!(
            "filter dimension {} vs dilation dimension {}",
            a.dim(),
            ctx.dim()
        )));
    }
    let row = coset_row(ctx, a);
    let gram = row.adjoint().mul(&row)?;
    let dm = Rat::from_integer((ctx.dm() as i64).into());
    LaurentMatrix::identity(ctx.dm(), ctx.dim()).sub(&gram.scale(&dm))
}

/// Basic sum rule: every coset of `a` sums to `1/dm`.
pub fn basic_sum_rule(ctx: &DilationContext, a: &RationalLaurent) -> bool {
    if a.dim() != ctx.dim() {
        return false;
    }
    let target = Rat::new(1.into(), (ctx.dm() as i64).into());
    a.coset_split(ctx)
        .iter()
        .all(|part| part.value_at_zero() == target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_context;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn canonicalization_extracts_content() {
        // (1/2)(delta_0 - delta_1) with unit scale becomes scale_sq 1/4.
        let base = RationalLaurent::from_table_1d(0, &[r(1, 2), r(-1, 2)]);
        let f = ScaledFilter::new(Rat::one(), base).unwrap();
        assert_eq!(*f.scale_sq(), r(1, 4));
        assert_eq!(f.base().coeff(&[0]), r(1, 1));
        assert_eq!(f.base().coeff(&[1]), r(-1, 1));
    }

    #[test]
    fn zero_is_canonical() {
        let f = ScaledFilter::new(r(7, 3), RationalLaurent::zero(2)).unwrap();
        assert_eq!(*f.scale_sq(), Rat::one());
        assert!(f.is_zero());
        let g = ScaledFilter::new(Rat::zero(), RationalLaurent::delta(2)).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn negative_scale_rejected() {
        assert!(ScaledFilter::new(r(-1, 2), RationalLaurent::delta(1)).is_err());
    }

    #[test]
    fn scale_by_squares_the_factor() {
        let f = ScaledFilter::new(r(1, 8), RationalLaurent::from_table_1d(0, &[r(-1, 1), r(2, 1), r(-1, 1)]))
            .unwrap();
        let g = f.scale_by(&r(-3, 2));
        assert_eq!(*g.scale_sq(), r(9, 32));
        assert_eq!(g.base().coeff(&[0]), r(1, 1));
    }

    #[test]
    fn haar_normal_matrix() {
        let ctx = make_context(&[vec![2]]).unwrap();
        let a = RationalLaurent::from_table_1d(0, &[r(1, 2), r(1, 2)]);
        let n = build_na(&ctx, &a).unwrap();
        // N = [[1/2, -1/2], [-1/2, 1/2]].
        for (i, j, v) in [(0, 0, r(1, 2)), (0, 1, r(-1, 2)), (1, 0, r(-1, 2)), (1, 1, r(1, 2))] {
            assert_eq!(n.get(i, j).coeff(&[0]), v);
            assert_eq!(n.get(i, j).num_terms(), 1);
        }
        assert!(n.is_hermitian());
    }

    #[test]
    fn na_rows_sum_to_zero_at_zero_under_basic_sum_rule() {
        let ctx = make_context(&[vec![2]]).unwrap();
        let a = RationalLaurent::from_table_1d(
            -3,
            &[r(-1, 32), r(0, 1), r(9, 32), r(1, 2), r(9, 32), r(0, 1), r(-1, 32)],
        );
        assert!(basic_sum_rule(&ctx, &a));
        let n = build_na(&ctx, &a).unwrap();
        assert!(n.is_hermitian());
        for i in 0..2 {
            let mut acc = Rat::zero();
            for j in 0..2 {
                acc += n.get(i, j).value_at_zero();
            }
            assert!(acc.is_zero(), "row {i} of N_a(0) sums to {acc}");
        }
    }

    #[test]
    fn quincunx_na_determinant_identity() {
        // det N_a = 1 - dm * sum_j |a^[gamma_j]|^2 for dm = 2.
        let ctx = make_context(&[vec![1, 1], vec![1, -1]]).unwrap();
        let mut a = RationalLaurent::zero(2);
        a.add_term(&[0, 0], &r(1, 2));
        for k in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
            a.add_term(&k, &r(1, 8));
        }
        let n = build_na(&ctx, &a).unwrap();
        let det = n.det().unwrap();
        let parts = a.coset_split(&ctx);
        let mut gram = RationalLaurent::zero(2);
        for p in &parts {
            gram = gram.try_add(&p.adjoint().try_mul(p).unwrap()).unwrap();
        }
        let expect = RationalLaurent::delta(2)
            .try_sub(&gram.scale(&r(2, 1)))
            .unwrap();
        assert_eq!(det, expect);
    }

    #[test]
    fn basic_sum_rule_examples() {
        let ctx = make_context(&[vec![2]]).unwrap();
        let haar = RationalLaurent::from_table_1d(0, &[r(1, 2), r(1, 2)]);
        assert!(basic_sum_rule(&ctx, &haar));
        let skew = RationalLaurent::from_table_1d(0, &[r(2, 3), r(1, 3)]);
        assert!(!basic_sum_rule(&ctx, &skew));
    }

    #[test]
    fn bank_dim_checks() {
        let ctx = make_context(&[vec![2]]).unwrap();
        let a2 = RationalLaurent::delta(2);
        assert!(matches!(
            QtfBank::new(ctx, a2, vec![], 1),
            Err(Error::DimMismatch(_))
        ));
    }
}
