//! Dilation matrices and their lattice cosets.
//!
//! For an expansive integer matrix `M` the coset representatives
//! `Gamma = M[0,1)^d ∩ Z^d` index the polyphase components of a filter, and
//! `Omega = (M^T)^{-1} Z^d ∩ [0,1)^d` indexes the aliasing frequencies
//! `2 pi omega`. Both sets have `|det M|` elements and are enumerated exactly.

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ratio::Rat;

/// An expansive integer dilation matrix together with its coset data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DilationContext {
    mat: Vec<Vec<i64>>,
    dim: usize,
    det: i64,
    dm: usize,
    gamma: Vec<Vec<i64>>,
    omega: Vec<Vec<Rat>>,
    inv: Vec<Vec<Rat>>,
    inv_t: Vec<Vec<Rat>>,
}

fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Exact inverse of a square rational matrix, or `None` if singular.
fn invert(mat: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = mat.len();
    let mut aug: Vec<Vec<Rat>> = mat
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, pivot);
        let p = aug[col][col].clone();
        for x in &mut aug[col] {
            *x /= p.clone();
        }
        let pivot_row = aug[col].clone();
        for (r, row) in aug.iter_mut().enumerate() {
            if r != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (cell, pv) in row.iter_mut().zip(&pivot_row) {
                    *cell -= f.clone() * pv.clone();
                }
            }
        }
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

fn det_rational(mat: &[Vec<i64>]) -> Rat {
    let n = mat.len();
    let mut work: Vec<Vec<Rat>> = mat
        .iter()
        .map(|row| row.iter().map(|&v| rat(v)).collect())
        .collect();
    let mut det = Rat::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !work[r][col].is_zero()) else {
            return Rat::zero();
        };
        if pivot != col {
            work.swap(col, pivot);
            det = -det;
        }
        let p = work[col][col].clone();
        det *= p.clone();
        let pivot_tail: Vec<Rat> = work[col][col..n].to_vec();
        for row in work.iter_mut().skip(col + 1) {
            if !row[col].is_zero() {
                let f = row[col].clone() / p.clone();
                for (cell, pv) in row[col..n].iter_mut().zip(&pivot_tail) {
                    *cell -= f.clone() * pv.clone();
                }
            }
        }
    }
    det
}

/// Lexicographic order on integer vectors.
pub fn lex_cmp(a: &[i64], b: &[i64]) -> std::cmp::Ordering {
    a.cmp(b)
}

fn sort_zero_first<T: Clone + Ord>(mut items: Vec<T>, zero: &T) -> Vec<T> {
    items.sort();
    if let Some(pos) = items.iter().position(|x| x == zero) {
        let z = items.remove(pos);
        items.insert(0, z);
    }
    items
}

/// Builds a [`DilationContext`] from a row-major integer matrix.
pub fn make_context(mat: &[Vec<i64>]) -> Result<DilationContext> {
    let dim = mat.len();
    if dim == 0 || mat.iter().any(|row| row.len() != dim) {
        return Err(Error::DimMismatch(format!(
            "dilation matrix must be square and nonempty, got {} rows",
            dim
        )));
    }
    let det_r = det_rational(mat);
    if det_r.is_zero() {
        return Err(Error::Singular);
    }
    let det = det_r.to_integer().to_i64().ok_or(Error::Singular)?;
    let dm = det.unsigned_abs() as usize;

    // Expansiveness: every eigenvalue modulus must exceed 1.
    let fm = nalgebra::DMatrix::from_fn(dim, dim, |i, j| mat[i][j] as f64);
    let eigs = fm.complex_eigenvalues();
    if eigs.iter().any(|l: &Complex64| l.norm() <= 1.0 + 1e-9) {
        return Err(Error::NotExpansive);
    }

    let rat_mat: Vec<Vec<Rat>> = mat
        .iter()
        .map(|row| row.iter().map(|&v| rat(v)).collect())
        .collect();
    let rat_mat_t: Vec<Vec<Rat>> = (0..dim)
        .map(|i| (0..dim).map(|j| rat(mat[j][i])).collect())
        .collect();
    let inv = invert(&rat_mat).ok_or(Error::Singular)?;
    let inv_t = invert(&rat_mat_t).ok_or(Error::Singular)?;

    let gamma = enumerate_cosets(mat, &inv)?;
    let omega_points = enumerate_dual(mat, &inv_t)?;
    if gamma.len() != dm || omega_points.len() != dm {
        return Err(Error::InternalResidue(format!(
            "coset enumeration found {} direct and {} dual representatives, expected {}",
            gamma.len(),
            omega_points.len(),
            dm
        )));
    }
    let zero_i = vec![0i64; dim];
    let zero_r = vec![Rat::zero(); dim];
    Ok(DilationContext {
        mat: mat.to_vec(),
        dim,
        det,
        dm,
        gamma: sort_zero_first(gamma, &zero_i),
        omega: sort_zero_first(omega_points, &zero_r),
        inv,
        inv_t,
    })
}

fn apply_int(mat: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    mat.iter()
        .map(|row| row.iter().zip(v).map(|(&m, &x)| m * x).sum())
        .collect()
}

fn apply_rat(mat: &[Vec<Rat>], v: &[i64]) -> Vec<Rat> {
    mat.iter()
        .map(|row| row.iter().zip(v).map(|(m, &x)| m.clone() * rat(x)).sum())
        .collect()
}

fn in_unit_box(x: &[Rat]) -> bool {
    x.iter().all(|c| !c.is_negative() && c < &Rat::one())
}

/// Integer points of `M [0,1)^d`, found by scanning the bounding box of the
/// parallelepiped's vertices and testing membership exactly.
fn enumerate_cosets(mat: &[Vec<i64>], inv: &[Vec<Rat>]) -> Result<Vec<Vec<i64>>> {
    let dim = mat.len();
    let mut lo = vec![i64::MAX; dim];
    let mut hi = vec![i64::MIN; dim];
    for mask in 0..(1u32 << dim) {
        let corner: Vec<i64> = (0..dim).map(|i| ((mask >> i) & 1) as i64).collect();
        let v = apply_int(mat, &corner);
        for i in 0..dim {
            lo[i] = lo[i].min(v[i]);
            hi[i] = hi[i].max(v[i]);
        }
    }
    let mut out = Vec::new();
    let mut point = lo.clone();
    loop {
        if in_unit_box(&apply_rat(inv, &point)) {
            out.push(point.clone());
        }
        let mut i = 0;
        loop {
            if i == dim {
                return Ok(out);
            }
            point[i] += 1;
            if point[i] <= hi[i] {
                break;
            }
            point[i] = lo[i];
            i += 1;
        }
    }
}

/// Points of `(M^T)^{-1} Z^d ∩ [0,1)^d`, via the integer points of
/// `M^T [0,1)^d` mapped back through the exact inverse.
fn enumerate_dual(mat: &[Vec<i64>], inv_t: &[Vec<Rat>]) -> Result<Vec<Vec<Rat>>> {
    let dim = mat.len();
    let mat_t: Vec<Vec<i64>> = (0..dim)
        .map(|i| (0..dim).map(|j| mat[j][i]).collect())
        .collect();
    let points = enumerate_cosets(&mat_t, inv_t)?;
    Ok(points.iter().map(|q| apply_rat(inv_t, q)).collect())
}

impl DilationContext {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Signed determinant of `M`.
    pub fn det(&self) -> i64 {
        self.det
    }

    /// `|det M|`, the number of cosets.
    pub fn dm(&self) -> usize {
        self.dm
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.mat
    }

    /// Coset representatives, zero first then lexicographic.
    pub fn gamma(&self) -> &[Vec<i64>] {
        &self.gamma
    }

    /// Dual representatives in `[0,1)^d`, zero first then lexicographic.
    pub fn omega(&self) -> &[Vec<Rat>] {
        &self.omega
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        apply_int(&self.mat, v)
    }

    pub fn apply_inv(&self, v: &[i64]) -> Vec<Rat> {
        apply_rat(&self.inv, v)
    }

    pub fn inv(&self) -> &[Vec<Rat>] {
        &self.inv
    }

    pub fn inv_t(&self) -> &[Vec<Rat>] {
        &self.inv_t
    }

    /// Writes `k = gamma_j + M alpha` and returns `(j, alpha)`.
    pub fn reduce_to_coset(&self, k: &[i64]) -> (usize, Vec<i64>) {
        for (j, g) in self.gamma.iter().enumerate() {
            let shifted: Vec<i64> = k.iter().zip(g).map(|(&a, &b)| a - b).collect();
            let x = apply_rat(&self.inv, &shifted);
            if x.iter().all(|c| c.is_integer()) {
                let alpha = x.iter().map(|c| c.to_integer().to_i64().unwrap()).collect();
                return (j, alpha);
            }
        }
        unreachable!("every lattice point lies in exactly one coset");
    }

    /// Spectral radius of `M` (floating point).
    pub fn spectral_radius(&self) -> f64 {
        let fm = nalgebra::DMatrix::from_fn(self.dim, self.dim, |i, j| self.mat[i][j] as f64);
        fm.complex_eigenvalues()
            .iter()
            .map(|l| l.norm())
            .fold(0.0, f64::max)
    }

    /// The unitary-up-to-scale coset matrix `U = (e^{-i gamma_j . 2 pi omega_k})`.
    pub fn coset_matrix(&self) -> Vec<Vec<Complex64>> {
        use crate::ratio::rat_to_f64;
        self.gamma
            .iter()
            .map(|g| {
                self.omega
                    .iter()
                    .map(|w| {
                        let dot: f64 = g
                            .iter()
                            .zip(w)
                            .map(|(&gi, wi)| gi as f64 * rat_to_f64(wi))
                            .sum();
                        Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * dot)
                    })
                    .collect()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(rows: &[&[i64]]) -> DilationContext {
        make_context(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn dyadic_1d() {
        let c = ctx(&[&[2]]);
        assert_eq!(c.dm(), 2);
        assert_eq!(c.gamma(), &[vec![0], vec![1]]);
        assert_eq!(c.omega(), &[vec![Rat::zero()], vec![Rat::new(1.into(), 2.into())]]);
    }

    #[test]
    fn quincunx() {
        let c = ctx(&[&[1, 1], &[1, -1]]);
        assert_eq!(c.dm(), 2);
        assert_eq!(c.gamma(), &[vec![0, 0], vec![1, 0]]);
        let half = Rat::new(1.into(), 2.into());
        assert_eq!(c.omega(), &[vec![Rat::zero(), Rat::zero()], vec![half.clone(), half]]);
    }

    #[test]
    fn dyadic_2d() {
        let c = ctx(&[&[2, 0], &[0, 2]]);
        assert_eq!(c.dm(), 4);
        assert_eq!(
            c.gamma(),
            &[vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
        assert_eq!(c.omega().len(), 4);
    }

    #[test]
    fn sqrt3_cosets() {
        let c = ctx(&[&[1, -2], &[2, -1]]);
        assert_eq!(c.dm(), 3);
        assert_eq!(c.gamma()[0], vec![0, 0]);
        assert_eq!(c.gamma().len(), 3);
        // All representatives reduce to themselves.
        for (j, g) in c.gamma().iter().enumerate() {
            let (jj, alpha) = c.reduce_to_coset(g);
            assert_eq!(jj, j);
            assert!(alpha.iter().all(|&x| x == 0));
        }
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(matches!(
            make_context(&[vec![1, 0], vec![0, 1]]),
            Err(Error::NotExpansive)
        ));
        assert!(matches!(
            make_context(&[vec![2, 2], vec![1, 1]]),
            Err(Error::Singular)
        ));
        assert!(matches!(
            make_context(&[vec![2, 0]]),
            Err(Error::DimMismatch(_))
        ));
        assert!(matches!(
            make_context(&[vec![2, 0], vec![0, 1]]),
            Err(Error::NotExpansive)
        ));
    }

    #[test]
    fn reduce_covers_box() {
        let c = ctx(&[&[1, 1], &[1, -1]]);
        for x in -4..=4 {
            for y in -4..=4 {
                let (j, alpha) = c.reduce_to_coset(&[x, y]);
                let g = &c.gamma()[j];
                let back = c.apply(&alpha);
                assert_eq!(vec![x, y], vec![g[0] + back[0], g[1] + back[1]]);
            }
        }
    }

    #[test]
    fn coset_matrix_is_unitary_up_to_scale() {
        for rows in [
            vec![vec![2i64]],
            vec![vec![1, 1], vec![1, -1]],
            vec![vec![1, -2], vec![2, -1]],
            vec![vec![2, 0], vec![0, 2]],
        ] {
            let c = make_context(&rows).unwrap();
            let u = c.coset_matrix();
            let n = c.dm();
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (x, y) in u[i].iter().zip(&u[j]) {
                        acc += x * y.conj();
                    }
                    let expect = if i == j { n as f64 } else { 0.0 };
                    assert!(
                        (acc - Complex64::new(expect, 0.0)).norm() < 1e-12,
                        "UU* deviates at ({i},{j}): {acc}"
                    );
                }
            }
        }
    }

    #[test]
    fn spectral_radius_values() {
        assert!((ctx(&[&[2]]).spectral_radius() - 2.0).abs() < 1e-12);
        assert!((ctx(&[&[1, 1], &[1, -1]]).spectral_radius() - 2f64.sqrt()).abs() < 1e-12);
        assert!((ctx(&[&[1, -2], &[2, -1]]).spectral_radius() - 3f64.sqrt()).abs() < 1e-12);
    }
}
