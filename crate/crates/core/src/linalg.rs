//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

/// Reduced row echelon form of an augmented system `[A | b]`.
pub struct Echelon {
    rows: Vec<Vec<Q>>,
    /// Pivot column of each leading row.
    pivots: Vec<usize>,
    cols: usize,
}

impl Echelon {
    /// Eliminates `matrix` (each row has `cols` coefficients followed by the
    /// right-hand side).
    pub fn new(mut rows: Vec<Vec<Q>>, cols: usize) -> Self {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..rows.len()).find(|&k| !rows[k][c].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = Q::one() / &rows[r][c];
            for v in rows[r].iter_mut() {
                if !v.is_zero() {
                    *v *= &inv;
                }
            }
            let pivot_row = rows[r].clone();
            let nonzero: Vec<usize> = (0..=cols).filter(|&k| !pivot_row[k].is_zero()).collect();
            for (k, row) in rows.iter_mut().enumerate() {
                if k == r || row[c].is_zero() {
                    continue;
                }
                let factor = row[c].clone();
                for &col in &nonzero {
                    let delta = &factor * &pivot_row[col];
                    row[col] -= delta;
                }
            }
            pivots.push(c);
            r += 1;
            if r == rows.len() {
                break;
            }
        }
        Echelon { rows, pivots, cols }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// True iff some row reads `0 = nonzero`.
    pub fn inconsistent(&self) -> bool {
        self.rows[self.rank()..]
            .iter()
            .any(|row| !row[self.cols].is_zero())
    }

    /// A solution with every free variable set to zero.
    pub fn particular_solution(&self) -> Option<Vec<Q>> {
        self.solution_with(|_| Q::zero())
    }

    /// The solution whose free variables take the values `free(column)`.
    pub fn solution_with(&self, mut free: impl FnMut(usize) -> Q) -> Option<Vec<Q>> {
        if self.inconsistent() {
            return None;
        }
        let mut is_pivot = vec![false; self.cols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        let mut x = vec![Q::zero(); self.cols];
        for c in (0..self.cols).filter(|&c| !is_pivot[c]) {
            x[c] = free(c);
        }
        for (r, &c) in self.pivots.iter().enumerate() {
            let row = &self.rows[r];
            let mut v = row[self.cols].clone();
            for (k, xk) in x.iter().enumerate() {
                if !is_pivot[k] && !xk.is_zero() && !row[k].is_zero() {
                    v -= &row[k] * xk;
                }
            }
            x[c] = v;
        }
        Some(x)
    }
}

/// Unique solution of `A x = b`; `rows` are `[A | b]`.
pub fn solve_unique(rows: Vec<Vec<Q>>, cols: usize) -> Result<Vec<Q>> {
    let e = Echelon::new(rows, cols);
    if e.inconsistent() {
        return Err(Error::Singular("system is inconsistent".into()));
    }
    if e.rank() < cols {
        return Err(Error::Singular(format!(
            "rank {} is below the {cols} unknowns",
            e.rank()
        )));
    }
    Ok(e.particular_solution().expect("consistent"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_variables_take_given_values() {
        // x + y = 3
        let e = Echelon::new(vec![vec![qi(1), qi(1), qi(3)]], 2);
        assert_eq!(e.solution_with(|_| qi(5)).unwrap(), vec![qi(-2), qi(5)]);
    }

    use crate::rational::{q, qi};

    #[test]
    fn solves_square_system() {
        // x + y = 3, x - y = 1
        let rows = vec![vec![qi(1), qi(1), qi(3)], vec![qi(1), qi(-1), qi(1)]];
        assert_eq!(solve_unique(rows, 2).unwrap(), vec![qi(2), qi(1)]);
    }

    #[test]
    fn overdetermined_consistent() {
        let rows = vec![
            vec![qi(2), qi(0), qi(1)],
            vec![qi(0), qi(3), qi(1)],
            vec![qi(2), qi(3), qi(2)],
        ];
        assert_eq!(solve_unique(rows, 2).unwrap(), vec![q(1, 2), q(1, 3)]);
    }

    #[test]
    fn reports_singular_and_inconsistent() {
        let rows = vec![vec![qi(1), qi(1), qi(1)], vec![qi(2), qi(2), qi(2)]];
        assert!(matches!(solve_unique(rows, 2), Err(Error::Singular(_))));
        let rows = vec![vec![qi(1), qi(1)], vec![qi(1), qi(2)]];
        assert!(matches!(solve_unique(rows, 1), Err(Error::Singular(_))));
    }
}
