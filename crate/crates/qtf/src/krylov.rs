//! Exact minimal dependence of a Krylov sequence.
//!
//! Exact Gaussian elimination on Krylov iterates suffers minor-sized
//! coefficient growth, so the linear dependence is found by elimination
//! modulo word-size primes instead. The dependence coefficients are then
//! recovered over the rationals by Chinese remaindering plus rational
//! reconstruction, and certified by one exact integer identity, so the
//! result is as trustworthy as a fully exact elimination at a fraction of
//! the cost. Primes are drawn from a fixed deterministic scan so runs are
//! reproducible.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ratio::{content, Rat};

/// Matrix-vector product that skips structural zeros on either side.
pub(crate) fn apply_matrix(t: &[Vec<Rat>], v: &[Rat]) -> Vec<Rat> {
    t.iter()
        .map(|row| {
            let mut acc = Rat::zero();
            for (c, x) in row.iter().zip(v) {
                if !c.is_zero() && !x.is_zero() {
                    acc += c * x;
                }
            }
            acc
        })
        .collect()
}

/// Divides out the content of `v`, leaving coprime integer entries; returns
/// the positive factor that was removed. The zero vector is passed through
/// with factor 1 so callers can keep chaining.
fn normalize_content(mut v: Vec<Rat>) -> (Rat, Vec<Rat>) {
    let c = content(v.iter());
    if c.is_zero() {
        return (Rat::one(), v);
    }
    for x in v.iter_mut() {
        if !x.is_zero() {
            *x = &*x / &c;
        }
    }
    (c, v)
}

/// Power iterates of a matrix with contents stripped at every step: `vs[j]`
/// is parallel to the j-th power applied to the seed, and the factor chain
/// satisfies `t * vs[j] = chain[j] * vs[j+1]` exactly. Keeping the iterates
/// primitive stops coefficient bit sizes from compounding across steps.
pub(crate) struct IterateStream<'a> {
    t: &'a [Vec<Rat>],
    pub(crate) vs: Vec<Vec<Rat>>,
    pub(crate) chain: Vec<Rat>,
}

impl<'a> IterateStream<'a> {
    pub(crate) fn new(t: &'a [Vec<Rat>], seed: Vec<Rat>) -> Self {
        let (_, v0) = normalize_content(seed);
        IterateStream {
            t,
            vs: vec![v0],
            chain: Vec::new(),
        }
    }

    pub(crate) fn ensure(&mut self, n: usize) {
        while self.vs.len() <= n {
            let u = apply_matrix(self.t, self.vs.last().expect("stream is never empty"));
            let (c, v) = normalize_content(u);
            self.chain.push(c);
            self.vs.push(v);
        }
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin, exact for all `u64` with this witness set.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for w in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(w, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Fixed scan of 62-bit primes; deterministic so every run picks the same
/// moduli in the same order.
struct PrimeScan {
    next: u64,
}

impl PrimeScan {
    fn new() -> Self {
        PrimeScan {
            next: (1u64 << 62) + 1,
        }
    }

    fn take(&mut self) -> u64 {
        loop {
            let c = self.next;
            self.next += 2;
            if is_prime_u64(c) {
                return c;
            }
        }
    }
}

/// Residue of a rational with denominator coprime to `p`; `None` otherwise.
fn rat_mod(x: &Rat, p: u64, p_big: &BigInt) -> Option<u64> {
    let n = x.numer().mod_floor(p_big).to_u64().expect("residue fits");
    let d = x.denom().mod_floor(p_big).to_u64().expect("residue fits");
    if d == 0 {
        return None;
    }
    Some(mul_mod(n, inv_mod(d, p), p))
}

/// Row-echelon accumulator over the prime field that remembers how each
/// stored row was formed, so a dependent insert directly yields its
/// expansion in the previously inserted vectors.
struct ModularEchelon {
    p: u64,
    /// `(pivot, vec, hist)`; rows are scaled so the pivot entry is 1.
    rows: Vec<(usize, Vec<u64>, Vec<u64>)>,
}

impl ModularEchelon {
    fn new(p: u64) -> Self {
        ModularEchelon { p, rows: Vec::new() }
    }

    /// `None` when `v` is independent (the basis grows); `Some(beta)` with
    /// `v = sum beta[i] * insert_i` in the prime field when dependent.
    fn insert(&mut self, v: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        let order = self.rows.len();
        let mut x = v.to_vec();
        let mut hist = vec![0u64; order + 1];
        hist[order] = 1;
        for (pivot, rvec, rhist) in &self.rows {
            let coeff = x[*pivot];
            if coeff == 0 {
                continue;
            }
            for (xi, ri) in x.iter_mut().zip(rvec) {
                *xi = (*xi + p - mul_mod(coeff, *ri, p)) % p;
            }
            for (hi, ri) in hist.iter_mut().zip(rhist) {
                *hi = (*hi + p - mul_mod(coeff, *ri, p)) % p;
            }
        }
        match x.iter().position(|&e| e != 0) {
            Some(pivot) => {
                let inv = inv_mod(x[pivot], p);
                for e in x.iter_mut().chain(hist.iter_mut()) {
                    *e = mul_mod(*e, inv, p);
                }
                self.rows.push((pivot, x, hist));
                None
            }
            None => {
                // 0 = sum hist[i] * insert_i and the newest coefficient is
                // nonzero, so v expands over the earlier inserts.
                let lead = inv_mod(hist[order], p);
                Some(
                    hist[..order]
                        .iter()
                        .map(|&h| mul_mod(p - h, lead, p) % p)
                        .collect(),
                )
            }
        }
    }
}

/// First linear dependence of the iterate stream modulo `p`: the degree and
/// the expansion of that iterate over the earlier ones. `None` when the
/// prime divides a denominator (cannot happen for primitive integer
/// iterates, but kept for safety).
fn dependence_mod_p(
    stream: &mut IterateStream,
    cap: usize,
    p: u64,
) -> Option<(usize, Vec<u64>)> {
    let p_big = BigInt::from(p);
    let mut ech = ModularEchelon::new(p);
    for j in 0..=cap {
        stream.ensure(j);
        let vj: Option<Vec<u64>> = stream.vs[j]
            .iter()
            .map(|x| rat_mod(x, p, &p_big))
            .collect();
        if let Some(beta) = ech.insert(&vj?) {
            return Some((j, beta));
        }
    }
    unreachable!("dependence must occur within the ambient dimension");
}

/// Solves `x ≡ value/denom (mod modulus)` for a fraction with numerator and
/// denominator below `sqrt(modulus/2)`, by the usual truncated extended
/// Euclidean algorithm. The caller must verify the candidate exactly.
fn rational_reconstruct(x: &BigInt, modulus: &BigInt) -> Option<Rat> {
    let bound = (modulus / BigInt::from(2)).sqrt();
    let mut r0 = modulus.clone();
    let mut r1 = x.mod_floor(modulus);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while r1 >= bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound {
        return None;
    }
    if t1.is_negative() {
        r1 = -r1;
        t1 = -t1;
    }
    Some(Rat::new(r1, t1))
}

fn crt_pair(x0: &BigInt, m0: &BigInt, r1: u64, p1: u64) -> BigInt {
    // x = x0 + m0 * ((r1 - x0) / m0 mod p1)
    let p_big = BigInt::from(p1);
    let x0_mod = x0.mod_floor(&p_big).to_u64().expect("residue fits");
    let m0_mod = m0.mod_floor(&p_big).to_u64().expect("residue fits");
    let delta = mul_mod((r1 + p1 - x0_mod) % p1, inv_mod(m0_mod, p1), p1);
    x0 + m0 * BigInt::from(delta)
}

/// Exact check of `vs[degree] = sum beta[i] * vs[i]`, done over the integers
/// after clearing denominators, with early exit on the first bad coordinate.
fn verify_dependence(stream: &IterateStream, degree: usize, beta: &[Rat]) -> bool {
    let lcm = beta
        .iter()
        .fold(BigInt::one(), |acc, b| acc.lcm(b.denom()));
    let scaled: Vec<BigInt> = beta
        .iter()
        .map(|b| b.numer() * (&lcm / b.denom()))
        .collect();
    let dim = stream.vs[0].len();
    for coord in 0..dim {
        let mut acc = stream.vs[degree][coord].numer() * &lcm;
        debug_assert!(stream.vs[degree][coord].denom().is_one());
        for (i, c) in scaled.iter().enumerate() {
            if !c.is_zero() {
                acc -= c * stream.vs[i][coord].numer();
            }
        }
        if !acc.is_zero() {
            return false;
        }
    }
    true
}

/// Degree and exact expansion coefficients of the first iterate that is a
/// rational combination of its predecessors: `vs[degree] = sum beta[i] vs[i]`.
/// The result is certified by an exact integer identity before returning.
pub(crate) fn minimal_dependence(stream: &mut IterateStream, cap: usize) -> (usize, Vec<Rat>) {
    if stream.vs[0].iter().all(|x| x.is_zero()) {
        return (0, Vec::new());
    }
    let mut scan = PrimeScan::new();
    let mut degree = 0usize;
    let mut primes: Vec<u64> = Vec::new();
    let mut residues: Vec<Vec<u64>> = Vec::new();
    let mut batch = 1usize;
    loop {
        for _ in 0..batch {
            let p = scan.take();
            let Some((deg_p, beta_p)) = dependence_mod_p(stream, cap, p) else {
                continue;
            };
            // A dependence over the rationals survives reduction mod p, so
            // an undersized degree marks an unlucky prime; the true degree
            // is the largest one seen.
            if deg_p > degree {
                degree = deg_p;
                primes.clear();
                residues.clear();
            }
            if deg_p == degree {
                primes.push(p);
                residues.push(beta_p);
            }
        }
        if let Some(beta) = reconstruct_all(degree, &primes, &residues) {
            if verify_dependence(stream, degree, &beta) {
                return (degree, beta);
            }
        }
        batch *= 2;
    }
}

fn reconstruct_all(degree: usize, primes: &[u64], residues: &[Vec<u64>]) -> Option<Vec<Rat>> {
    if primes.is_empty() {
        return None;
    }
    let mut beta = Vec::with_capacity(degree);
    for i in 0..degree {
        let mut x = BigInt::from(residues[0][i]);
        let mut modulus = BigInt::from(primes[0]);
        for (p, res) in primes.iter().zip(residues).skip(1) {
            x = crt_pair(&x, &modulus, res[i], *p);
            modulus *= BigInt::from(*p);
        }
        beta.push(rational_reconstruct(&x, &modulus)?);
    }
    Some(beta)
}
