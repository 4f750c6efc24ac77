//! Sparse exact rational linear solver used by the coefficient-matching step
//! of the high-vanishing-moment construction.
//!
//! Gauss-Jordan elimination over arbitrary-precision rationals with a fixed
//! pivot rule (first equation with a nonzero coefficient on the current
//! variable); free variables are set to zero so solutions stay sparse and
//! deterministic.

use std::collections::BTreeMap;

use crate::ratio::Rat;

/// A system of linear equations `sum_i c_i x_i = rhs` with sparse rows.
#[derive(Debug, Clone, Default)]
pub struct LinearSystem {
    n_vars: usize,
    rows: Vec<(BTreeMap<usize, Rat>, Rat)>,
}

impl LinearSystem {
    pub fn new(n_vars: usize) -> Self {
        LinearSystem {
            n_vars,
            rows: Vec::new(),
        }
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Add one equation; coefficients for the same variable are summed.
    pub fn add_equation(&mut self, coeffs: impl IntoIterator<Item = (usize, Rat)>, rhs: Rat) {
        let zero = Rat::from_integer(0.into());
        let mut row: BTreeMap<usize, Rat> = BTreeMap::new();
        for (idx, c) in coeffs {
            assert!(idx < self.n_vars, "variable index out of range");
            if c == zero {
                continue;
            }
            let entry = row.entry(idx).or_insert_with(|| zero.clone());
            *entry += c;
            if *entry == zero {
                row.remove(&idx);
            }
        }
        self.rows.push((row, rhs));
    }

    /// Solve the system exactly. Returns `None` if inconsistent; otherwise a
    /// full assignment with every free variable set to zero.
    pub fn solve(&self) -> Option<Vec<Rat>> {
        let zero = Rat::from_integer(0.into());
        let mut rows = self.rows.clone();
        // pivot_of_row[r] = variable eliminated by row r.
        let mut pivot_rows: Vec<(usize, usize)> = Vec::new(); // (var, row index)
        let mut used = vec![false; rows.len()];

        for var in 0..self.n_vars {
            let Some(r) = (0..rows.len())
                .find(|&r| !used[r] && rows[r].0.contains_key(&var)) else {
                continue;
            };
            used[r] = true;
            // Normalize the pivot row.
            let pivot_val = rows[r].0[&var].clone();
            if pivot_val != Rat::from_integer(1.into()) {
                let inv = Rat::from_integer(1.into()) / pivot_val;
                let (row, rhs) = &mut rows[r];
                for v in row.values_mut() {
                    *v *= inv.clone();
                }
                *rhs *= inv;
            }
            // Eliminate the variable from every other row.
            let pivot_row = rows[r].0.clone();
            let pivot_rhs = rows[r].1.clone();
            for (s, (row, rhs)) in rows.iter_mut().enumerate() {
                if s == r {
                    continue;
                }
                let factor = match row.get(&var) {
                    Some(f) => f.clone(),
                    None => continue,
                };
                for (v, c) in &pivot_row {
                    let entry = row.entry(*v).or_insert_with(|| zero.clone());
                    *entry -= factor.clone() * c;
                    if *entry == zero {
                        row.remove(v);
                    }
                }
                *rhs -= factor * &pivot_rhs;
            }
            pivot_rows.push((var, r));
        }

        // Consistency: any row reduced to 0 = rhs with rhs nonzero fails.
        for (row, rhs) in &rows {
            if row.is_empty() && *rhs != zero {
                return None;
            }
        }

        let mut solution = vec![zero.clone(); self.n_vars];
        for (var, r) in pivot_rows {
            // After full Gauss-Jordan the pivot row may still reference free
            // variables; those are zero, so the rhs is the value.
            let (row, rhs) = &rows[r];
            debug_assert!(row.contains_key(&var));
            solution[var] = rhs.clone();
        }
        Some(solution)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn solves_unique_system() {
        // x + y = 3, x - y = 1 -> x = 2, y = 1.
        let mut sys = LinearSystem::new(2);
        sys.add_equation([(0, r(1, 1)), (1, r(1, 1))], r(3, 1));
        sys.add_equation([(0, r(1, 1)), (1, r(-1, 1))], r(1, 1));
        let sol = sys.solve().unwrap();
        assert_eq!(sol, vec![r(2, 1), r(1, 1)]);
    }

    #[test]
    fn free_variables_are_zero() {
        // x + y = 5 with y free -> x = 5, y = 0.
        let mut sys = LinearSystem::new(2);
        sys.add_equation([(0, r(1, 1)), (1, r(1, 1))], r(5, 1));
        let sol = sys.solve().unwrap();
        assert_eq!(sol, vec![r(5, 1), r(0, 1)]);
    }

    #[test]
    fn detects_inconsistency() {
        let mut sys = LinearSystem::new(1);
        sys.add_equation([(0, r(1, 1))], r(1, 1));
        sys.add_equation([(0, r(1, 1))], r(2, 1));
        assert!(sys.solve().is_none());
    }

    #[test]
    fn empty_lhs_rows() {
        let mut sys = LinearSystem::new(1);
        sys.add_equation(Vec::new(), r(0, 1));
        assert!(sys.solve().is_some());
        sys.add_equation(Vec::new(), r(1, 1));
        assert!(sys.solve().is_none());
    }

    #[test]
    fn duplicate_coefficients_sum() {
        // (1 + 1) x = 4 -> x = 2.
        let mut sys = LinearSystem::new(1);
        sys.add_equation([(0, r(1, 1)), (0, r(1, 1))], r(4, 1));
        assert_eq!(sys.solve().unwrap(), vec![r(2, 1)]);
    }

    #[test]
    fn rational_arithmetic_is_exact() {
        // (1/3) x + (1/7) y = 1/21 * 10, x - y = 0 -> x = y = 1.
        let mut sys = LinearSystem::new(2);
        sys.add_equation([(0, r(1, 3)), (1, r(1, 7))], r(10, 21));
        sys.add_equation([(0, r(1, 1)), (1, r(-1, 1))], r(0, 1));
        let sol = sys.solve().unwrap();
        assert_eq!(sol, vec![r(1, 1), r(1, 1)]);
    }
}
