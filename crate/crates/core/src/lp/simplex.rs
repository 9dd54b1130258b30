//! Two-phase primal simplex over exact rationals, in sparse dictionary form.
//!
//! Rows read `x_B(r) = beta_r + sum_k alpha_rk x_N(k)`; the objective row
//! `z = z0 + sum_k d_k x_N(k)` is maximized. Pivoting is Dantzig's rule with
//! lowest-index ties, falling back to Bland's rule for the rest of a phase
//! once a long run of degenerate pivots is seen.

use std::time::Instant;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// `sum coeffs  relation  rhs`, with sorted, nonzero, distinct coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Q)>,
    pub relation: Relation,
    pub rhs: Q,
}

impl Constraint {
    /// Merges repeated variables and drops zero coefficients.
    pub fn new(mut coeffs: Vec<(usize, Q)>, relation: Relation, rhs: Q) -> Self {
        coeffs.sort_by_key(|(v, _)| *v);
        let mut merged: Vec<(usize, Q)> = Vec::with_capacity(coeffs.len());
        for (v, c) in coeffs {
            match merged.last_mut() {
                Some((last, acc)) if *last == v => *acc += c,
                _ => merged.push((v, c)),
            }
        }
        merged.retain(|(_, c)| !c.is_zero());
        Constraint {
            coeffs: merged,
            relation,
            rhs,
        }
    }

    pub fn lhs(&self, x: &[Q]) -> Q {
        self.coeffs.iter().map(|(v, c)| c * &x[*v]).sum()
    }

    pub fn satisfied_by(&self, x: &[Q]) -> bool {
        let lhs = self.lhs(x);
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }

    /// True when no assignment can violate it.
    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty()
            && match self.relation {
                Relation::Le => !self.rhs.is_negative(),
                Relation::Ge => !self.rhs.is_positive(),
                Relation::Eq => self.rhs.is_zero(),
            }
    }
}

/// Multipliers `u_k` proving `{x >= 0 : constraints}` empty: `u_k >= 0` on
/// `<=` rows, `u_k <= 0` on `>=` rows, `sum u_k a_k >= 0` entrywise and
/// `sum u_k b_k < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FarkasCertificate {
    pub multipliers: Vec<(usize, Q)>,
}

impl FarkasCertificate {
    /// Exact re-check against `constraints` over `num_vars` nonnegative variables.
    pub fn verify(&self, constraints: &[Constraint], num_vars: usize) -> bool {
        let mut combo = vec![Q::zero(); num_vars];
        let mut constant = Q::zero();
        for (k, u) in &self.multipliers {
            let Some(c) = constraints.get(*k) else {
                return false;
            };
            let sign_ok = match c.relation {
                Relation::Le => !u.is_negative(),
                Relation::Ge => !u.is_positive(),
                Relation::Eq => true,
            };
            if !sign_ok {
                return false;
            }
            for (v, a) in &c.coeffs {
                if *v >= num_vars {
                    return false;
                }
                combo[*v] += u * a;
            }
            constant += u * &c.rhs;
        }
        combo.iter().all(|c| !c.is_negative()) && constant.is_negative()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub max_pivots: u64,
    pub deadline: Option<Instant>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_pivots: 1_000_000,
            deadline: None,
        }
    }
}

pub(super) const DEGENERATE_RUN: u32 = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Structural,
    /// Slack of row `row` with coefficient `sign` in the sign-normalized row.
    Slack {
        row: usize,
        sign: i8,
    },
    Artificial {
        row: usize,
    },
}

#[derive(Clone, Debug, Default)]
struct Row {
    beta: Q,
    /// `(position, alpha)` sorted by position, nonzero.
    coef: Vec<(usize, Q)>,
}

impl Row {
    fn get(&self, pos: usize) -> Option<&Q> {
        self.coef
            .binary_search_by_key(&pos, |(p, _)| *p)
            .ok()
            .map(|i| &self.coef[i].1)
    }

    /// `self += factor * pivot`, where `pivot` already describes the entering
    /// position `e` (whose old entry in `self` is replaced, not added).
    fn add_scaled(&mut self, factor: &Q, pivot: &Row, e: usize) {
        self.beta += factor * &pivot.beta;
        let mut out = Vec::with_capacity(self.coef.len() + pivot.coef.len());
        let (mut a, mut b) = (0, 0);
        let (left, right) = (&self.coef, &pivot.coef);
        while a < left.len() || b < right.len() {
            let pa = left.get(a).map_or(usize::MAX, |x| x.0);
            let pb = right.get(b).map_or(usize::MAX, |x| x.0);
            if pa < pb {
                if pa != e {
                    out.push(left[a].clone());
                }
                a += 1;
            } else if pb < pa {
                out.push((pb, factor * &right[b].1));
                b += 1;
            } else {
                let v = if pa == e {
                    factor * &right[b].1
                } else {
                    &left[a].1 + factor * &right[b].1
                };
                if !v.is_zero() {
                    out.push((pa, v));
                }
                a += 1;
                b += 1;
            }
        }
        self.coef = out;
    }
}

/// A simplex dictionary for `{x >= 0 : constraints}`.
#[derive(Clone, Debug)]
pub struct Simplex {
    num_structural: usize,
    /// Sign applied to each constraint to make its right-hand side nonnegative.
    row_sign: Vec<i8>,
    kinds: Vec<Kind>,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    rows: Vec<Row>,
    obj: Row,
    banned: Vec<bool>,
    pub pivots: u64,
}

pub enum Phase1 {
    Feasible,
    Infeasible(FarkasCertificate),
}

impl Simplex {
    pub fn new(num_structural: usize, constraints: &[Constraint]) -> Self {
        let mut kinds: Vec<Kind> = vec![Kind::Structural; num_structural];
        let mut basic = Vec::with_capacity(constraints.len());
        let mut nonbasic: Vec<usize> = (0..num_structural).collect();
        let mut rows = Vec::with_capacity(constraints.len());
        let mut row_sign = Vec::with_capacity(constraints.len());
        let mut artificial_rows = Vec::new();

        for (k, c) in constraints.iter().enumerate() {
            let flip = c.rhs.is_negative() || (c.rhs.is_zero() && c.relation == Relation::Ge);
            let sign: i8 = if flip { -1 } else { 1 };
            row_sign.push(sign);
            let s = Q::from_integer(sign.into());
            let slack_sign = match c.relation {
                Relation::Le => Some(sign),
                Relation::Ge => Some(-sign),
                Relation::Eq => None,
            };
            let mut row = Row {
                beta: &c.rhs * &s,
                coef: c.coeffs.iter().map(|(v, a)| (*v, -(a * &s))).collect(),
            };
            match slack_sign {
                Some(1) => {
                    kinds.push(Kind::Slack { row: k, sign: 1 });
                    basic.push(kinds.len() - 1);
                }
                other => {
                    if let Some(sg) = other {
                        kinds.push(Kind::Slack { row: k, sign: sg });
                        let pos = nonbasic.len();
                        nonbasic.push(kinds.len() - 1);
                        // artificial = b - a x - sg * slack
                        row.coef.push((pos, Q::from_integer((-sg).into())));
                    }
                    kinds.push(Kind::Artificial { row: k });
                    basic.push(kinds.len() - 1);
                    artificial_rows.push(k);
                }
            }
            row.coef.sort_by_key(|(p, _)| *p);
            rows.push(row);
        }

        // Phase 1 maximizes minus the sum of artificials.
        let mut obj = Row::default();
        let mut dense = vec![Q::zero(); nonbasic.len()];
        for &k in &artificial_rows {
            obj.beta -= &rows[k].beta;
            for (p, a) in &rows[k].coef {
                dense[*p] -= a;
            }
        }
        obj.coef = dense
            .into_iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .collect();
        let banned = vec![false; kinds.len()];
        Simplex {
            num_structural,
            row_sign,
            kinds,
            basic,
            nonbasic,
            rows,
            obj,
            banned,
            pivots: 0,
        }
    }

    fn is_artificial(&self, var: usize) -> bool {
        matches!(self.kinds[var], Kind::Artificial { .. })
    }

    fn pivot(&mut self, e: usize, l: usize) {
        let alpha = self.rows[l].get(e).expect("nonzero pivot").clone();
        let neg_inv = -(Q::one() / &alpha);
        let old = std::mem::take(&mut self.rows[l]);
        let mut pivot = Row {
            beta: &old.beta * &neg_inv,
            coef: old
                .coef
                .into_iter()
                .map(|(p, a)| {
                    if p == e {
                        (p, Q::one() / &alpha)
                    } else {
                        (p, a * &neg_inv)
                    }
                })
                .collect(),
        };
        pivot.coef.retain(|(_, a)| !a.is_zero());
        for r in 0..self.rows.len() {
            if r == l {
                continue;
            }
            if let Some(f) = self.rows[r].get(e).cloned() {
                self.rows[r].add_scaled(&f, &pivot, e);
            }
        }
        if let Some(f) = self.obj.get(e).cloned() {
            self.obj.add_scaled(&f, &pivot, e);
        }
        self.rows[l] = pivot;
        std::mem::swap(&mut self.basic[l], &mut self.nonbasic[e]);
        self.pivots += 1;
    }

    /// Runs pivots until optimal. Returns false if unbounded.
    fn optimize(&mut self, budget: &Budget) -> Result<bool> {
        let mut degenerate_run = 0u32;
        let mut bland = false;
        loop {
            if self.pivots >= budget.max_pivots {
                return Err(Error::Budget(format!(
                    "simplex exceeded {} pivots",
                    budget.max_pivots
                )));
            }
            if let Some(deadline) = budget.deadline {
                if self.pivots.is_multiple_of(16) && Instant::now() > deadline {
                    return Err(Error::Budget("simplex time limit reached".into()));
                }
            }
            let candidates = self
                .obj
                .coef
                .iter()
                .filter(|(p, d)| d.is_positive() && !self.banned[self.nonbasic[*p]]);
            let entering = if bland {
                candidates
                    .min_by_key(|(p, _)| self.nonbasic[*p])
                    .map(|(p, _)| *p)
            } else {
                candidates
                    .fold(None::<(usize, &Q)>, |best, (p, d)| match best {
                        Some((bp, bd))
                            if bd > d || (bd == d && self.nonbasic[bp] < self.nonbasic[*p]) =>
                        {
                            Some((bp, bd))
                        }
                        _ => Some((*p, d)),
                    })
                    .map(|(p, _)| p)
            };
            let Some(e) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, Q)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                let Some(a) = row.get(e) else { continue };
                if !a.is_negative() {
                    continue;
                }
                let ratio = &row.beta / -a;
                let better = match &leave {
                    None => true,
                    Some((lr, lv)) => {
                        ratio < *lv || (ratio == *lv && self.basic[r] < self.basic[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((l, ratio)) = leave else {
                return Ok(false);
            };
            if ratio.is_zero() {
                degenerate_run += 1;
                if degenerate_run >= DEGENERATE_RUN {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(e, l);
        }
    }

    /// Finds a feasible basis or a Farkas certificate for `constraints`.
    pub fn phase1(&mut self, constraints: &[Constraint], budget: &Budget) -> Result<Phase1> {
        let bounded = self.optimize(budget)?;
        debug_assert!(bounded, "phase 1 is bounded by zero");
        if self.obj.beta.is_negative() {
            let cert = self.farkas();
            if !cert.verify(constraints, self.num_structural) {
                return Err(Error::Precondition(
                    "internal error: Farkas certificate failed verification".into(),
                ));
            }
            return Ok(Phase1::Infeasible(cert));
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..self.rows.len() {
            if !self.is_artificial(self.basic[r]) {
                continue;
            }
            let pos = self.rows[r]
                .coef
                .iter()
                .map(|(p, _)| *p)
                .find(|&p| !self.is_artificial(self.nonbasic[p]));
            if let Some(e) = pos {
                self.pivot(e, r);
            }
        }
        for v in 0..self.kinds.len() {
            if self.is_artificial(v) {
                self.banned[v] = true;
            }
        }
        Ok(Phase1::Feasible)
    }

    fn reduced_cost(&self, var: usize) -> Q {
        match self.nonbasic.iter().position(|&v| v == var) {
            Some(p) => self.obj.get(p).cloned().unwrap_or_else(Q::zero),
            None => Q::zero(),
        }
    }

    fn farkas(&self) -> FarkasCertificate {
        let mut y = vec![None; self.rows.len()];
        for (v, kind) in self.kinds.iter().enumerate() {
            match *kind {
                Kind::Slack { row, sign } => {
                    y[row] = Some(-self.reduced_cost(v) * Q::from_integer(sign.into()));
                }
                Kind::Artificial { row } if y[row].is_none() => {
                    y[row] = Some(-Q::one() - self.reduced_cost(v));
                }
                _ => {}
            }
        }
        let multipliers = y
            .into_iter()
            .enumerate()
            .filter_map(|(k, yk)| {
                let u = yk.expect("every row has a slack or artificial")
                    * Q::from_integer(self.row_sign[k].into());
                (!u.is_zero()).then_some((k, u))
            })
            .collect();
        FarkasCertificate { multipliers }
    }

    /// Values of the structural variables at the current basis.
    pub fn solution(&self) -> Vec<Q> {
        let mut x = vec![Q::zero(); self.num_structural];
        for (r, &v) in self.basic.iter().enumerate() {
            if v < self.num_structural {
                x[v] = self.rows[r].beta.clone();
            }
        }
        x
    }

    /// Maximizes `sum c_j x_j` from a feasible basis (after [`Simplex::phase1`]).
    pub fn maximize(&mut self, objective: &[(usize, Q)], budget: &Budget) -> Result<Q> {
        let mut cost = vec![Q::zero(); self.kinds.len()];
        for (v, c) in objective {
            cost[*v] += c;
        }
        let mut beta = Q::zero();
        let mut dense = vec![Q::zero(); self.nonbasic.len()];
        for (p, &v) in self.nonbasic.iter().enumerate() {
            dense[p] = cost[v].clone();
        }
        for (r, &v) in self.basic.iter().enumerate() {
            if cost[v].is_zero() {
                continue;
            }
            beta += &cost[v] * &self.rows[r].beta;
            for (p, a) in &self.rows[r].coef {
                dense[*p] += &cost[v] * a;
            }
        }
        self.obj = Row {
            beta,
            coef: dense
                .into_iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        };
        if self.optimize(budget)? {
            Ok(self.obj.beta.clone())
        } else {
            Err(Error::Unbounded)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn c(coeffs: &[(usize, i64)], relation: Relation, rhs: i64) -> Constraint {
        Constraint::new(
            coeffs.iter().map(|&(v, a)| (v, qi(a))).collect(),
            relation,
            qi(rhs),
        )
    }

    #[test]
    fn small_optimum() {
        // max x + y s.t. x + 2y <= 4, 3x + y <= 6
        let cons = vec![
            c(&[(0, 1), (1, 2)], Relation::Le, 4),
            c(&[(0, 3), (1, 1)], Relation::Le, 6),
        ];
        let mut s = Simplex::new(2, &cons);
        assert!(matches!(
            s.phase1(&cons, &Budget::default()).unwrap(),
            Phase1::Feasible
        ));
        let best = s
            .maximize(&[(0, qi(1)), (1, qi(1))], &Budget::default())
            .unwrap();
        assert_eq!(best, q(14, 5));
        assert_eq!(s.solution(), vec![q(8, 5), q(6, 5)]);
    }

    #[test]
    fn equalities_and_lower_bounds() {
        // x + y = 1, x >= 1/2 written as 2x >= 1; min x = 1/2
        let cons = vec![
            c(&[(0, 1), (1, 1)], Relation::Eq, 1),
            c(&[(0, 2)], Relation::Ge, 1),
        ];
        let mut s = Simplex::new(2, &cons);
        assert!(matches!(
            s.phase1(&cons, &Budget::default()).unwrap(),
            Phase1::Feasible
        ));
        let x = s.solution();
        assert!(cons.iter().all(|k| k.satisfied_by(&x)));
        assert_eq!(
            s.maximize(&[(0, qi(-1))], &Budget::default()).unwrap(),
            q(-1, 2)
        );
    }

    #[test]
    fn infeasible_has_checked_certificate() {
        // x + y = 1, x >= 2
        let cons = vec![
            c(&[(0, 1), (1, 1)], Relation::Eq, 1),
            c(&[(0, 1)], Relation::Ge, 2),
        ];
        let mut s = Simplex::new(2, &cons);
        match s.phase1(&cons, &Budget::default()).unwrap() {
            Phase1::Infeasible(cert) => {
                assert!(cert.verify(&cons, 2));
                let forged = FarkasCertificate {
                    multipliers: vec![(1, qi(1))],
                };
                assert!(!forged.verify(&cons, 2));
            }
            Phase1::Feasible => panic!("should be infeasible"),
        }
    }

    #[test]
    fn negative_right_hand_sides() {
        // -x <= -3 (x >= 3), x <= 5; max x = 5
        let cons = vec![
            c(&[(0, -1)], Relation::Le, -3),
            c(&[(0, 1)], Relation::Le, 5),
        ];
        let mut s = Simplex::new(1, &cons);
        assert!(matches!(
            s.phase1(&cons, &Budget::default()).unwrap(),
            Phase1::Feasible
        ));
        assert_eq!(
            s.maximize(&[(0, qi(1))], &Budget::default()).unwrap(),
            qi(5)
        );
    }

    #[test]
    fn detects_unbounded() {
        let cons = vec![c(&[(0, 1), (1, -1)], Relation::Le, 1)];
        let mut s = Simplex::new(2, &cons);
        assert!(matches!(
            s.phase1(&cons, &Budget::default()).unwrap(),
            Phase1::Feasible
        ));
        assert_eq!(
            s.maximize(&[(1, qi(1))], &Budget::default()).unwrap_err(),
            Error::Unbounded
        );
    }

    #[test]
    fn pivot_budget() {
        let cons = vec![c(&[(0, 1), (1, 1)], Relation::Eq, 1)];
        let mut s = Simplex::new(2, &cons);
        let tight = Budget {
            max_pivots: 0,
            deadline: None,
        };
        assert!(matches!(s.phase1(&cons, &tight), Err(Error::Budget(_))));
    }
}
