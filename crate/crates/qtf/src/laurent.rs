//! Multivariate Laurent polynomials with exact rational coefficients.
//!
//! A filter `u` is stored through its nonzero coefficients `u(k)`; its symbol
//! is `u^(xi) = sum_k u(k) e^{-i k.xi}`. All algebra is exact. The adjoint
//! negates exponents (coefficients are real), `dilate` maps `k -> M k` so the
//! symbol becomes `u^(M^T xi)`, and `coset_split` extracts the polyphase
//! components `u^[gamma](k) = u(gamma + M k)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::DilationContext;
use crate::ratio::{rat_to_f64, Rat};

pub type Exp = Vec<i64>;

/// Vanishing-moment order; the zero filter annihilates every moment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Vmo {
    Finite(usize),
    Infinite,
}

impl Vmo {
    pub fn finite(self) -> Option<usize> {
        match self {
            Vmo::Finite(n) => Some(n),
            Vmo::Infinite => None,
        }
    }

    pub fn at_least(self, m: usize) -> bool {
        match self {
            Vmo::Finite(n) => n >= m,
            Vmo::Infinite => true,
        }
    }
}

impl fmt::Display for Vmo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vmo::Finite(n) => write!(f, "{n}"),
            Vmo::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct RationalLaurent {
    dim: usize,
    terms: BTreeMap<Exp, Rat>,
}

impl RationalLaurent {
    pub fn zero(dim: usize) -> Self {
        RationalLaurent {
            dim,
            terms: BTreeMap::new(),
        }
    }

    /// The Kronecker delta at the origin.
    pub fn delta(dim: usize) -> Self {
        Self::monomial(vec![0; dim], Rat::one())
    }

    pub fn monomial(k: Exp, c: Rat) -> Self {
        let dim = k.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(k, c);
        }
        RationalLaurent { dim, terms }
    }

    pub fn from_terms(dim: usize, iter: impl IntoIterator<Item = (Exp, Rat)>) -> Result<Self> {
        let mut out = Self::zero(dim);
        for (k, c) in iter {
            if k.len() != dim {
                return Err(Error::DimMismatch(format!(
                    "exponent {:?} has length {}, expected {}",
                    k,
                    k.len(),
                    dim
                )));
            }
            out.add_term(&k, &c);
        }
        Ok(out)
    }

    /// Convenience constructor for 1-D filters from a contiguous table.
    pub fn from_table_1d(start: i64, coeffs: &[Rat]) -> Self {
        let mut out = Self::zero(1);
        for (i, c) in coeffs.iter().enumerate() {
            out.add_term(&[start + i as i64], c);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, k: &[i64]) -> Rat {
        self.terms.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn add_term(&mut self, k: &[i64], c: &Rat) {
        debug_assert_eq!(k.len(), self.dim);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(k) {
            Some(v) => {
                *v += c.clone();
                if v.is_zero() {
                    self.terms.remove(k);
                }
            }
            None => {
                self.terms.insert(k.to_vec(), c.clone());
            }
        }
    }

    fn dim_check(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch(format!(
                "operands have dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.dim_check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k, c);
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.dim_check(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k, &(-c.clone()));
        }
        Ok(out)
    }

    /// Convolution of coefficient sequences, i.e. product of symbols.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.dim_check(other)?;
        let mut out = Self::zero(self.dim);
        let (small, large) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        for (ka, ca) in &small.terms {
            for (kb, cb) in &large.terms {
                let k: Exp = ka.iter().zip(kb).map(|(&a, &b)| a + b).collect();
                out.add_term(&k, &(ca.clone() * cb.clone()));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rat) -> Self {
        if factor.is_zero() {
            return Self::zero(self.dim);
        }
        RationalLaurent {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.clone(), c.clone() * factor.clone()))
                .collect(),
        }
    }

    /// `adjoint(u)(k) = u(-k)`: conjugates the symbol on the torus.
    pub fn adjoint(&self) -> Self {
        RationalLaurent {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (k.iter().map(|&x| -x).collect(), c.clone()))
                .collect(),
        }
    }

    /// Shifts every exponent by `k0`, multiplying the symbol by `e^{-i k0.xi}`.
    pub fn shift(&self, k0: &[i64]) -> Self {
        debug_assert_eq!(k0.len(), self.dim);
        RationalLaurent {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| {
                    (
                        k.iter().zip(k0).map(|(&a, &b)| a + b).collect(),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    /// Upsampling `k -> M k`; the symbol becomes `u^(M^T xi)`.
    pub fn dilate(&self, ctx: &DilationContext) -> Self {
        RationalLaurent {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (ctx.apply(k), c.clone()))
                .collect(),
        }
    }

    /// Polyphase components indexed like `ctx.gamma()`.
    pub fn coset_split(&self, ctx: &DilationContext) -> Vec<RationalLaurent> {
        let mut out = vec![Self::zero(self.dim); ctx.dm()];
        for (k, c) in &self.terms {
            let (j, alpha) = ctx.reduce_to_coset(k);
            out[j].add_term(&alpha, c);
        }
        out
    }

    /// Inverse of [`coset_split`]: `u = sum_j shift(dilate(u_j), gamma_j)`.
    pub fn reassemble(ctx: &DilationContext, parts: &[RationalLaurent]) -> Result<Self> {
        if parts.len() != ctx.dm() {
            return Err(Error::DimMismatch(format!(
                "{} coset parts for |det M| = {}",
                parts.len(),
                ctx.dm()
            )));
        }
        let mut out = Self::zero(ctx.dim());
        for (j, part) in parts.iter().enumerate() {
            let placed = part.dilate(ctx).shift(&ctx.gamma()[j]);
            out = out.try_add(&placed)?;
        }
        Ok(out)
    }

    /// Sum of coefficients, i.e. the symbol value at `xi = 0`.
    pub fn value_at_zero(&self) -> Rat {
        self.terms.values().cloned().sum()
    }

    /// Exact moment `sum_k u(k) k^mu`.
    pub fn moment(&self, mu: &[usize]) -> Rat {
        debug_assert_eq!(mu.len(), self.dim);
        let mut acc = Rat::zero();
        for (k, c) in &self.terms {
            let mut p = BigInt::one();
            for (x, &e) in k.iter().zip(mu) {
                p *= BigInt::from(*x).pow(e as u32);
            }
            acc += c.clone() * Rat::from_integer(p);
        }
        acc
    }

    /// Largest `n` so every moment of total degree `< n` vanishes.
    pub fn vmo(&self) -> Vmo {
        if self.is_zero() {
            return Vmo::Infinite;
        }
        let cap = self.spread() + 1;
        for n in 0..=cap {
            for mu in multi_indices(self.dim, n) {
                if !self.moment(&mu).is_zero() {
                    return Vmo::Finite(n);
                }
            }
        }
        unreachable!("a nonzero filter has a nonzero moment of degree at most its spread");
    }

    /// Componentwise support bounds `(lo, hi)`, `None` for the zero filter.
    pub fn support_box(&self) -> Option<(Exp, Exp)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for k in it {
            for i in 0..self.dim {
                lo[i] = lo[i].min(k[i]);
                hi[i] = hi[i].max(k[i]);
            }
        }
        Some((lo, hi))
    }

    /// Sum of per-coordinate support widths.
    pub fn spread(&self) -> usize {
        match self.support_box() {
            Some((lo, hi)) => lo
                .iter()
                .zip(&hi)
                .map(|(&l, &h)| (h - l) as usize)
                .sum(),
            None => 0,
        }
    }

    /// Positive content (gcd of numerators over lcm of denominators).
    pub fn content(&self) -> Rat {
        crate::ratio::content(self.terms.values())
    }

    /// Symbol value `sum_k u(k) e^{-i k.xi}` at a real frequency.
    pub fn eval_complex(&self, xi: &[f64]) -> Complex64 {
        debug_assert_eq!(xi.len(), self.dim);
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in &self.terms {
            let phase: f64 = k.iter().zip(xi).map(|(&ki, &x)| ki as f64 * x).sum();
            acc += Complex64::from_polar(rat_to_f64(c), -phase);
        }
        acc
    }
}

impl fmt::Debug for RationalLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent{{d={}", self.dim)?;
        for (k, c) in &self.terms {
            write!(f, " {:?}:{}", k, crate::ratio::format_rational(c))?;
        }
        write!(f, "}}")
    }
}

impl std::ops::Add for &RationalLaurent {
    type Output = RationalLaurent;
    fn add(self, rhs: &RationalLaurent) -> RationalLaurent {
        self.try_add(rhs).expect("dimension mismatch")
    }
}

impl std::ops::Sub for &RationalLaurent {
    type Output = RationalLaurent;
    fn sub(self, rhs: &RationalLaurent) -> RationalLaurent {
        self.try_sub(rhs).expect("dimension mismatch")
    }
}

impl std::ops::Mul for &RationalLaurent {
    type Output = RationalLaurent;
    fn mul(self, rhs: &RationalLaurent) -> RationalLaurent {
        self.try_mul(rhs).expect("dimension mismatch")
    }
}

impl std::ops::Neg for &RationalLaurent {
    type Output = RationalLaurent;
    fn neg(self) -> RationalLaurent {
        self.scale(&-Rat::one())
    }
}

/// All multi-indices of the given total degree, in lexicographic order.
pub fn multi_indices(dim: usize, total: usize) -> Vec<Vec<usize>> {
    fn rec(dim: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if dim == 1 {
            prefix.push(total);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for first in 0..=total {
            prefix.push(first);
            rec(dim - 1, total - first, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(dim, total, &mut Vec::new(), &mut out);
    out
}

/// The backward-difference filter `nabla^nu delta`, with symbol
/// `prod_i (1 - e^{-i xi_i})^{nu_i}`.
pub fn nabla_delta(nu: &[usize]) -> RationalLaurent {
    let dim = nu.len();
    let mut out = RationalLaurent::delta(dim);
    for (i, &e) in nu.iter().enumerate() {
        let mut unit = vec![0i64; dim];
        unit[i] = 1;
        let step = RationalLaurent::from_terms(
            dim,
            [
                (vec![0; dim], Rat::one()),
                (unit, -Rat::one()),
            ],
        )
        .unwrap();
        for _ in 0..e {
            out = &out * &step;
        }
    }
    out
}

/// A matrix of Laurent polynomials sharing one lattice dimension.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentMatrix {
    rows: usize,
    cols: usize,
    dim: usize,
    entries: Vec<RationalLaurent>,
}

impl LaurentMatrix {
    pub fn zero(rows: usize, cols: usize, dim: usize) -> Self {
        LaurentMatrix {
            rows,
            cols,
            dim,
            entries: vec![RationalLaurent::zero(dim); rows * cols],
        }
    }

    pub fn identity(n: usize, dim: usize) -> Self {
        let mut out = Self::zero(n, n, dim);
        for i in 0..n {
            *out.get_mut(i, i) = RationalLaurent::delta(dim);
        }
        out
    }

    pub fn from_entries(rows: usize, cols: usize, entries: Vec<RationalLaurent>) -> Result<Self> {
        if entries.len() != rows * cols || entries.is_empty() {
            return Err(Error::DimMismatch(format!(
                "{} entries for a {}x{} matrix",
                entries.len(),
                rows,
                cols
            )));
        }
        let dim = entries[0].dim();
        if entries.iter().any(|e| e.dim() != dim) {
            return Err(Error::DimMismatch(
                "matrix entries must share one lattice dimension".into(),
            ));
        }
        Ok(LaurentMatrix {
            rows,
            cols,
            dim,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &RationalLaurent {
        &self.entries[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut RationalLaurent {
        &mut self.entries[r * self.cols + c]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols, self.dim) != (other.rows, other.cols, other.dim) {
            return Err(Error::DimMismatch("matrix shapes differ".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_add(b))
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(self.rows, self.cols, entries)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if (self.rows, self.cols, self.dim) != (other.rows, other.cols, other.dim) {
            return Err(Error::DimMismatch("matrix shapes differ".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.try_sub(b))
            .collect::<Result<Vec<_>>>()?;
        Self::from_entries(self.rows, self.cols, entries)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows || self.dim != other.dim {
            return Err(Error::DimMismatch("matrix product shapes differ".into()));
        }
        let mut out = Self::zero(self.rows, other.cols, self.dim);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = RationalLaurent::zero(self.dim);
                for k in 0..self.cols {
                    acc = acc.try_add(&self.get(i, k).try_mul(other.get(k, j))?)?;
                }
                *out.get_mut(i, j) = acc;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &Rat) -> Self {
        LaurentMatrix {
            rows: self.rows,
            cols: self.cols,
            dim: self.dim,
            entries: self.entries.iter().map(|e| e.scale(factor)).collect(),
        }
    }

    /// Conjugate transpose on the torus.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows, self.dim);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *out.get_mut(j, i) = self.get(i, j).adjoint();
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && *self == self.adjoint()
    }

    /// Determinant by Laplace expansion; intended for small matrices.
    pub fn det(&self) -> Result<RationalLaurent> {
        if self.rows != self.cols {
            return Err(Error::DimMismatch("determinant of non-square matrix".into()));
        }
        fn rec(m: &LaurentMatrix, rows: &[usize], cols: &[usize]) -> RationalLaurent {
            if rows.len() == 1 {
                return m.get(rows[0], cols[0]).clone();
            }
            let mut acc = RationalLaurent::zero(m.dim);
            for (i, &r) in rows.iter().enumerate() {
                let sub_rows: Vec<usize> = rows
                    .iter()
                    .copied()
                    .filter(|&x| x != r)
                    .collect();
                let minor = rec(m, &sub_rows, &cols[1..]);
                let signed = m.get(r, cols[0]).try_mul(&minor).unwrap();
                if i % 2 == 0 {
                    acc = acc.try_add(&signed).unwrap();
                } else {
                    acc = acc.try_sub(&signed).unwrap();
                }
            }
            acc
        }
        let idx: Vec<usize> = (0..self.rows).collect();
        Ok(rec(self, &idx, &idx))
    }

    pub fn eval_complex(&self, xi: &[f64]) -> Vec<Vec<Complex64>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self.get(i, j).eval_complex(xi)).collect())
            .collect()
    }
}

impl fmt::Debug for LaurentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "LaurentMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?}  ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
