//! Constructions that force a prescribed number of vanishing moments on every
//! high-pass filter.
//!
//! Two routes are provided. `construct_vm_sos` rewrites the coset-square
//! deficit of the low-pass filter as an exact signed combination of squares
//! and lifts each square to a high-pass filter. `construct_vm_linear` instead
//! solves a linear coefficient-matching problem for a matrix factor supported
//! near the origin, then turns the factor into filters by completing squares;
//! with `diagonal_only` it restricts the ansatz to pure differencing terms.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::analysis::vm_ceiling;
use crate::error::{Error, Result};
use crate::filterbank::{basic_sum_rule, build_na, QtfBank, ScaledFilter, Sign};
use crate::lattice::DilationContext;
use crate::laurent::{multi_indices, nabla_delta, LaurentMatrix, RationalLaurent};
use crate::ratio::Rat;
use crate::solver::LinearSystem;
use crate::specfact::factor_hermitian;
use crate::vmdecomp::signed_squares_vm;

/// `delta - dm * sum_j adjoint(c_j) * c_j` over the cosets `c_j` of `a`,
/// expressed in the coset variable. Zero exactly when the bank generated by
/// `a` alone is tight on the diagonal.
pub fn coset_deficit(ctx: &DilationContext, a: &RationalLaurent) -> RationalLaurent {
    assert_eq!(ctx.dim(), a.dim(), "dimension mismatch");
    let dm_rat = Rat::from_integer((ctx.dm() as i64).into());
    let mut acc = RationalLaurent::zero(ctx.dim());
    for c in a.coset_split(ctx) {
        let sq = c.adjoint().try_mul(&c).expect("coset dims agree");
        acc = acc.try_add(&sq).expect("coset dims agree");
    }
    RationalLaurent::delta(ctx.dim())
        .try_sub(&acc.scale(&dm_rat))
        .expect("dims agree")
}

fn check_common_gates(ctx: &DilationContext, a: &RationalLaurent, m: usize) -> Result<()> {
    if ctx.dim() != a.dim() {
        return Err(Error::DimMismatch(format!(
            "filter dimension {} does not match dilation dimension {}",
            a.dim(),
            ctx.dim()
        )));
    }
    if !basic_sum_rule(ctx, a) {
        return Err(Error::NoBasicSumRule);
    }
    if m == 0 {
        return Err(Error::InvalidArg(
            "requested vanishing-moment order must be at least 1".into(),
        ));
    }
    let (ceiling, _) = vm_ceiling(ctx, a);
    if m > ceiling {
        return Err(Error::CeilingExceeded { m, ceiling });
    }
    Ok(())
}

/// Build a quasi-tight bank whose high-pass filters all have at least `m`
/// vanishing moments by decomposing the coset deficit into signed squares.
pub fn construct_vm_sos(
    ctx: &DilationContext,
    a: &RationalLaurent,
    m: usize,
) -> Result<QtfBank> {
    check_common_gates(ctx, a, m)?;
    let dm_rat = Rat::from_integer((ctx.dm() as i64).into());
    let deficit = coset_deficit(ctx, a);
    let mut highpass: Vec<(ScaledFilter, Sign)> = Vec::new();
    for (factor, sign) in signed_squares_vm(&deficit, m)? {
        let base = a.try_mul(&factor.base().dilate(ctx))?;
        let lifted = ScaledFilter::new(factor.scale_sq().clone(), base)?;
        if !lifted.is_zero() {
            highpass.push((lifted, sign));
        }
    }
    let inv_dm = Rat::one() / dm_rat.clone();
    for (j, cj) in a.coset_split(ctx).iter().enumerate() {
        let tail = a
            .try_mul(&cj.adjoint().dilate(ctx))?
            .scale(&dm_rat);
        let spike = RationalLaurent::monomial(ctx.gamma()[j].clone(), Rat::one());
        let filt = ScaledFilter::new(inv_dm.clone(), spike.try_sub(&tail)?)?;
        if !filt.is_zero() {
            highpass.push((filt, Sign::Plus));
        }
    }
    QtfBank::new(ctx.clone(), a.clone(), highpass, m)
}

/// The coset-transfer matrix of a filter `b` with modulation offset `beta`:
/// entry `(j, k)` holds the coset of `b` realigning coset `gamma_j` to
/// `gamma_k`, times a `+/-1` phase. `transpose(M) * beta` must be integral
/// and every phase must be a half-integer, otherwise `IrrationalPhase`.
pub fn build_e_matrix(
    ctx: &DilationContext,
    b: &RationalLaurent,
    beta: &[Rat],
) -> Result<LaurentMatrix> {
    if ctx.dim() != b.dim() || beta.len() != ctx.dim() {
        return Err(Error::DimMismatch(format!(
            "expected dimension {}, got filter {} and offset {}",
            ctx.dim(),
            b.dim(),
            beta.len()
        )));
    }
    let d = ctx.dim();
    for j in 0..d {
        let mut entry = Rat::zero();
        for (row, b_i) in ctx.matrix().iter().zip(beta) {
            entry += Rat::from_integer(row[j].into()) * b_i;
        }
        if !entry.is_integer() {
            return Err(Error::IrrationalPhase);
        }
    }
    let dm = ctx.dm();
    let gamma = ctx.gamma();
    let cosets = b.coset_split(ctx);
    let half = Rat::new(1.into(), 2.into());
    let mut entries = Vec::with_capacity(dm * dm);
    for j in 0..dm {
        for k in 0..dm {
            let diff: Vec<i64> = (0..d).map(|t| gamma[k][t] - gamma[j][t]).collect();
            let (p, alpha) = ctx.reduce_to_coset(&diff);
            let neg_alpha: Vec<i64> = alpha.iter().map(|x| -x).collect();
            let mut cell = cosets[p].shift(&neg_alpha);
            let mut t = Rat::zero();
            for i in 0..d {
                t += Rat::from_integer(gamma[k][i].into()) * &beta[i];
            }
            if t.is_integer() {
                // phase +1
            } else if (t - &half).is_integer() {
                cell = cell.scale(&-Rat::one());
            } else {
                return Err(Error::IrrationalPhase);
            }
            entries.push(cell);
        }
    }
    LaurentMatrix::from_entries(dm, dm, entries)
}

/// Options for `construct_vm_linear`.
#[derive(Debug, Clone)]
pub struct VmLinearOpts {
    /// How many times the initial coefficient support may be enlarged by one
    /// layer in every direction before giving up.
    pub max_expand: usize,
    /// Restrict the ansatz to diagonal difference pairs.
    pub diagonal_only: bool,
}

impl Default for VmLinearOpts {
    fn default() -> Self {
        VmLinearOpts {
            max_expand: 4,
            diagonal_only: false,
        }
    }
}

fn matrix_box(m: &LaurentMatrix) -> (Vec<i64>, Vec<i64>) {
    let d = m.dim();
    let mut lo: Option<Vec<i64>> = None;
    let mut hi: Option<Vec<i64>> = None;
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if let Some((cell_lo, cell_hi)) = m.get(r, c).support_box() {
                match (&mut lo, &mut hi) {
                    (Some(lo), Some(hi)) => {
                        for t in 0..d {
                            lo[t] = lo[t].min(cell_lo[t]);
                            hi[t] = hi[t].max(cell_hi[t]);
                        }
                    }
                    _ => {
                        lo = Some(cell_lo);
                        hi = Some(cell_hi);
                    }
                }
            }
        }
    }
    (lo.unwrap_or_else(|| vec![0; d]), hi.unwrap_or_else(|| vec![0; d]))
}

fn box_points(lo: &[i64], hi: &[i64]) -> Vec<Vec<i64>> {
    lo.iter()
        .zip(hi)
        .map(|(&l, &h)| l..=h)
        .multi_cartesian_product()
        .collect()
}

fn l1(t: &[i64]) -> i64 {
    t.iter().map(|x| x.abs()).sum()
}

/// Variable identity: (pair id, row, col, exponent). Diagonal pairs tie
/// `(p, q, t)` with `(q, p, -t)`; the canonical form is the smaller tuple.
type VarKey = (usize, usize, usize, Vec<i64>);

fn canonical_key(diagonal: bool, pid: usize, p: usize, q: usize, t: &[i64]) -> VarKey {
    let direct = (pid, p, q, t.to_vec());
    if !diagonal {
        return direct;
    }
    let mirrored = (pid, q, p, t.iter().map(|x| -x).collect::<Vec<i64>>());
    direct.min(mirrored)
}

struct StageOne {
    pairs: Vec<(usize, usize)>,
    a_mats: Vec<LaurentMatrix>,
}

fn solve_stage_one(
    ctx: &DilationContext,
    t_mat: &LaurentMatrix,
    e_mats: &[LaurentMatrix],
    pairs: &[(usize, usize)],
    attempt: usize,
) -> Option<Vec<LaurentMatrix>> {
    let d = ctx.dim();
    let dm = ctx.dm();
    let (lo_t, hi_t) = matrix_box(t_mat);
    let eboxes: Vec<(Vec<i64>, Vec<i64>)> = e_mats.iter().map(matrix_box).collect();

    // Coefficient support per pair: big enough that the sandwiched product can
    // reach every exponent of the target, symmetric for diagonal pairs, and
    // grown by `attempt` extra layers.
    let mut boxes: Vec<(Vec<i64>, Vec<i64>)> = Vec::with_capacity(pairs.len());
    for &(i, j) in pairs {
        let (ref lo_ei, ref hi_ei) = eboxes[i];
        let (ref lo_ej, ref hi_ej) = eboxes[j];
        let mut lo = vec![0i64; d];
        let mut hi = vec![0i64; d];
        for tdim in 0..d {
            // adjoint(E_i) occupies the negated-reversed box of E_i.
            let lo_star = -hi_ei[tdim];
            let hi_star = -lo_ei[tdim];
            let mut l = lo_t[tdim] - (lo_star + lo_ej[tdim]);
            let mut h = hi_t[tdim] - (hi_star + hi_ej[tdim]);
            if l > h {
                l = 0;
                h = 0;
            }
            l = l.min(0);
            h = h.max(0);
            if i == j {
                let (sl, sh) = (l.min(-h), h.max(-l));
                l = sl;
                h = sh;
            }
            lo[tdim] = l - attempt as i64;
            hi[tdim] = h + attempt as i64;
        }
        boxes.push((lo, hi));
    }

    // Products adjoint(E_i[p][r]) * E_j[q][c], for the ordered pairs needed.
    let mut needed: BTreeSet<(usize, usize)> = BTreeSet::new();
    for &(i, j) in pairs {
        needed.insert((i, j));
        if i != j {
            needed.insert((j, i));
        }
    }
    let idx4 = |p: usize, r: usize, q: usize, c: usize| ((p * dm + r) * dm + q) * dm + c;
    let mut gcache: BTreeMap<(usize, usize), Vec<RationalLaurent>> = BTreeMap::new();
    for &(i, j) in &needed {
        let mut table = Vec::with_capacity(dm * dm * dm * dm);
        for p in 0..dm {
            for r in 0..dm {
                for q in 0..dm {
                    for c in 0..dm {
                        let prod = e_mats[i]
                            .get(p, r)
                            .adjoint()
                            .try_mul(e_mats[j].get(q, c))
                            .expect("dims agree");
                        table.push(prod);
                    }
                }
            }
        }
        gcache.insert((i, j), table);
    }

    // Enumerate canonical variables, then order them so that exponents close
    // to the origin are eliminated first; free variables default to zero and
    // therefore land on the outer layers.
    let mut canon: BTreeSet<VarKey> = BTreeSet::new();
    let mut pair_points: Vec<Vec<Vec<i64>>> = Vec::with_capacity(pairs.len());
    for (pid, &(i, j)) in pairs.iter().enumerate() {
        let pts = box_points(&boxes[pid].0, &boxes[pid].1);
        for p in 0..dm {
            for q in 0..dm {
                for t in &pts {
                    canon.insert(canonical_key(i == j, pid, p, q, t));
                }
            }
        }
        pair_points.push(pts);
    }
    let mut ordered: Vec<VarKey> = canon.into_iter().collect();
    ordered.sort_by_key(|(pid, p, q, t)| (l1(t), t.clone(), *pid, *p, *q));
    let index: BTreeMap<VarKey, usize> = ordered
        .iter()
        .cloned()
        .enumerate()
        .map(|(n, k)| (k, n))
        .collect();

    // Equations indexed by upper-triangular cell and exponent.
    let mut eqs: BTreeMap<(usize, usize, Vec<i64>), BTreeMap<usize, Rat>> = BTreeMap::new();
    for r in 0..dm {
        for c in r..dm {
            for (e, _) in t_mat.get(r, c).terms() {
                eqs.entry((r, c, e.clone())).or_default();
            }
        }
    }
    let add = |eqs: &mut BTreeMap<(usize, usize, Vec<i64>), BTreeMap<usize, Rat>>,
                   r: usize,
                   c: usize,
                   e: Vec<i64>,
                   var: usize,
                   coeff: &Rat| {
        let col = eqs.entry((r, c, e)).or_default();
        let entry = col.entry(var).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            col.remove(&var);
        }
    };
    for (pid, &(i, j)) in pairs.iter().enumerate() {
        for p in 0..dm {
            for q in 0..dm {
                for t in &pair_points[pid] {
                    let var = index[&canonical_key(i == j, pid, p, q, t)];
                    for r in 0..dm {
                        for c in r..dm {
                            if i == j {
                                let g = &gcache[&(i, i)][idx4(p, r, q, c)];
                                for (ge, gc) in g.terms() {
                                    let e: Vec<i64> =
                                        ge.iter().zip(t).map(|(a, b)| a + b).collect();
                                    add(&mut eqs, r, c, e, var, gc);
                                }
                            } else {
                                let g1 = &gcache[&(i, j)][idx4(p, r, q, c)];
                                for (ge, gc) in g1.terms() {
                                    let e: Vec<i64> =
                                        ge.iter().zip(t).map(|(a, b)| a + b).collect();
                                    add(&mut eqs, r, c, e, var, gc);
                                }
                                let g2 = &gcache[&(j, i)][idx4(q, r, p, c)];
                                for (ge, gc) in g2.terms() {
                                    let e: Vec<i64> =
                                        ge.iter().zip(t).map(|(a, b)| a - b).collect();
                                    add(&mut eqs, r, c, e, var, gc);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    let mut sys = LinearSystem::new(ordered.len());
    for ((r, c, e), col) in &eqs {
        let rhs = t_mat.get(*r, *c).coeff(e);
        sys.add_equation(col.iter().map(|(v, x)| (*v, x.clone())), rhs);
    }
    let solution = sys.solve()?;

    let mut a_mats = Vec::with_capacity(pairs.len());
    for (pid, &(i, j)) in pairs.iter().enumerate() {
        let mut am = LaurentMatrix::zero(dm, dm, d);
        for p in 0..dm {
            for q in 0..dm {
                for t in &pair_points[pid] {
                    let x = &solution[index[&canonical_key(i == j, pid, p, q, t)]];
                    if !x.is_zero() {
                        am.get_mut(p, q).add_term(t, x);
                    }
                }
            }
        }
        debug_assert!(i != j || am.is_hermitian());
        a_mats.push(am);
    }
    Some(a_mats)
}

fn stage_one_residual(
    t_mat: &LaurentMatrix,
    e_mats: &[LaurentMatrix],
    stage: &StageOne,
) -> Result<LaurentMatrix> {
    let mut acc = LaurentMatrix::zero(t_mat.rows(), t_mat.cols(), t_mat.dim());
    for (pid, &(i, j)) in stage.pairs.iter().enumerate() {
        let am = &stage.a_mats[pid];
        let contrib = if i == j {
            e_mats[i].adjoint().mul(am)?.mul(&e_mats[i])?
        } else {
            let fwd = e_mats[i].adjoint().mul(am)?.mul(&e_mats[j])?;
            let bwd = e_mats[j].adjoint().mul(&am.adjoint())?.mul(&e_mats[i])?;
            fwd.add(&bwd)?
        };
        acc = acc.add(&contrib)?;
    }
    t_mat.sub(&acc)
}

/// Build a quasi-tight bank with `m` vanishing moments by solving for a
/// near-origin matrix factor and completing squares.
pub fn construct_vm_linear(
    ctx: &DilationContext,
    a: &RationalLaurent,
    m: usize,
    opts: &VmLinearOpts,
) -> Result<QtfBank> {
    check_common_gates(ctx, a, m)?;
    let d = ctx.dim();
    let dm = ctx.dm();
    let dm_rat = Rat::from_integer((dm as i64).into());
    let mus = multi_indices(d, m);
    let n_mu = mus.len();
    let zero_beta = vec![Rat::zero(); d];
    let e_mats: Vec<LaurentMatrix> = mus
        .iter()
        .map(|mu| build_e_matrix(ctx, &nabla_delta(mu), &zero_beta))
        .collect::<Result<_>>()?;
    let t_mat = build_na(ctx, a)?.scale(&(Rat::one() / dm_rat));

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..n_mu {
        for j in i..n_mu {
            if opts.diagonal_only && i != j {
                continue;
            }
            pairs.push((i, j));
        }
    }

    let mut stage: Option<StageOne> = None;
    for attempt in 0..=opts.max_expand {
        if let Some(a_mats) = solve_stage_one(ctx, &t_mat, &e_mats, &pairs, attempt) {
            stage = Some(StageOne {
                pairs: pairs.clone(),
                a_mats,
            });
            break;
        }
    }
    let stage = stage.ok_or_else(|| {
        Error::Infeasible(format!(
            "coefficient matching has no solution within {} support expansions; \
             try a larger moment budget or --max-expand",
            opts.max_expand
        ))
    })?;
    if !stage_one_residual(&t_mat, &e_mats, &stage)?.is_zero() {
        return Err(Error::InternalResidue(
            "stage-one factor does not reproduce the target exactly".into(),
        ));
    }

    let gamma = ctx.gamma();
    let mut filters: Vec<(ScaledFilter, Sign)> = Vec::new();
    let mut corrections: Vec<LaurentMatrix> = (0..n_mu)
        .map(|_| LaurentMatrix::zero(dm, dm, d))
        .collect();

    // Cross pairs: one completed square per coset, plus bookkeeping of what
    // the square over-counts on the two diagonals.
    for (pid, &(i, j)) in stage.pairs.iter().enumerate() {
        if i == j {
            continue;
        }
        let a2 = &stage.a_mats[pid];
        if a2.is_zero() {
            continue;
        }
        let nab_i = nabla_delta(&mus[i]);
        let nab_j = nabla_delta(&mus[j]);
        for p in 0..dm {
            let mut tail = RationalLaurent::zero(d);
            for (q, g) in gamma.iter().enumerate() {
                tail = tail.try_add(&a2.get(p, q).dilate(ctx).shift(g))?;
            }
            let base = nab_i
                .shift(&gamma[p])
                .try_add(&tail.try_mul(&nab_j)?)?;
            let filt = ScaledFilter::new(Rat::one(), base)?;
            if !filt.is_zero() {
                filters.push((filt, Sign::Plus));
            }
        }
        corrections[i] = corrections[i].add(&LaurentMatrix::identity(dm, d))?;
        corrections[j] = corrections[j].add(&a2.adjoint().mul(a2)?)?;
    }

    // Diagonal blocks: whatever is left after the cross squares is factored
    // exactly into signed column squares.
    for i in 0..n_mu {
        let pid = stage
            .pairs
            .iter()
            .position(|&(x, y)| x == i && y == i)
            .expect("diagonal pair always present");
        let d_tilde = stage.a_mats[pid].sub(&corrections[i])?;
        let nab_i = nabla_delta(&mus[i]);
        let fact = factor_hermitian(&d_tilde)?;
        for (j, kappa) in fact.kappa.iter().enumerate() {
            if let Some(sign) = Sign::of_rat(kappa) {
                let filt = ScaledFilter::new(kappa.abs(), nab_i.shift(&gamma[j]))?;
                if !filt.is_zero() {
                    filters.push((filt, sign));
                }
            }
        }
        for term in &fact.terms {
            let mut tail = RationalLaurent::zero(d);
            for (col, g) in term.column.iter().zip(gamma) {
                tail = tail.try_add(&col.adjoint().dilate(ctx).shift(g))?;
            }
            let filt = ScaledFilter::new(term.scale_sq.clone(), nab_i.try_mul(&tail)?)?;
            if !filt.is_zero() {
                filters.push((filt, term.sign));
            }
        }
    }

    QtfBank::new(ctx.clone(), a.clone(), filters, m)
}

/// `construct_vm_linear` restricted to pure differencing terms.
pub fn construct_differencing(
    ctx: &DilationContext,
    a: &RationalLaurent,
    m: usize,
) -> Result<QtfBank> {
    construct_vm_linear(
        ctx,
        a,
        m,
        &VmLinearOpts {
            diagonal_only: true,
            ..VmLinearOpts::default()
        },
    )
}
