//! Floating-point simplex used only to guess. Nothing it returns is trusted:
//! vertices are rebuilt exactly from their tight constraints, multipliers are
//! rebuilt exactly from their support, and both are checked before use.

use std::time::Instant;

use num_traits::{One, Signed, ToPrimitive, Zero};

use super::simplex::{Budget, Constraint, FarkasCertificate, Relation, DEGENERATE_RUN};
use crate::linalg::Echelon;
use crate::rational::Q;

const TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-7;
const REFACTOR_EVERY: u64 = 400;
const PERTURB: f64 = 1e-8;
/// Phase 2 keeps leftover artificials at zero with this cost.
const ARTIFICIAL_COST: f64 = 1e3;
/// Distance under which a float constraint or bound counts as tight.
const TIGHT: f64 = 1e-6;

#[derive(Clone)]
struct Tableau {
    width: usize,
    cells: Vec<f64>,
    basic: Vec<usize>,
    obj: Vec<f64>,
}

impl Tableau {
    fn pivot(&mut self, e: usize, l: usize) {
        let w = self.width;
        let inv = 1.0 / self.cells[l * w + e];
        for v in &mut self.cells[l * w..(l + 1) * w] {
            *v *= inv;
        }
        let pivot: Vec<(usize, f64)> = self.cells[l * w..(l + 1) * w]
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(c, v)| (c, *v))
            .collect();
        for r in 0..self.basic.len() {
            if r == l {
                continue;
            }
            let f = self.cells[r * w + e];
            if f == 0.0 {
                continue;
            }
            let row = &mut self.cells[r * w..(r + 1) * w];
            for &(c, v) in &pivot {
                row[c] -= f * v;
                if row[c].abs() < 1e-13 {
                    row[c] = 0.0;
                }
            }
            row[e] = 0.0;
        }
        let f = self.obj[e];
        if f != 0.0 {
            for &(c, v) in &pivot {
                self.obj[c] -= f * v;
            }
            self.obj[e] = 0.0;
        }
        self.basic[l] = e;
    }

    /// Recomputes the tableau and reduced costs for the current basis from
    /// the original rows, discarding accumulated rounding.
    fn refactor(&mut self, initial: &Tableau, cost: &[f64]) -> bool {
        let basis = std::mem::take(&mut self.basic);
        let m = basis.len();
        *self = initial.clone();
        let w = self.width;
        let mut assigned = vec![false; m];
        for col in basis {
            let Some(r) = (0..m).filter(|&r| !assigned[r]).max_by(|&a, &b| {
                self.cells[a * w + col]
                    .abs()
                    .total_cmp(&self.cells[b * w + col].abs())
            }) else {
                return false;
            };
            if self.cells[r * w + col].abs() < 1e-11 {
                return false;
            }
            self.pivot(col, r);
            assigned[r] = true;
        }
        for c in 0..w {
            let mut d = cost.get(c).copied().unwrap_or(0.0);
            for r in 0..m {
                d -= cost[self.basic[r]] * self.cells[r * w + c];
            }
            self.obj[c] = d;
        }
        for r in 0..m {
            self.obj[self.basic[r]] = 0.0;
            let rhs = &mut self.cells[r * w + w - 1];
            if rhs.abs() < TOL {
                *rhs = 0.0;
            }
        }
        true
    }
}

/// The sign-normalized system `A' x + slacks + artificials = b'`, `b' >= 0`.
struct Model {
    num_vars: usize,
    cols: usize,
    slack_col: Vec<Option<usize>>,
    art_col: Vec<Option<usize>>,
    signs: Vec<f64>,
    initial: Tableau,
}

impl Model {
    fn new(num_vars: usize, constraints: &[Constraint]) -> Option<Model> {
        let m = constraints.len();
        let mut slack_col = vec![None; m];
        let mut art_col = vec![None; m];
        let mut cols = num_vars;
        for (k, c) in constraints.iter().enumerate() {
            if c.relation != Relation::Eq {
                slack_col[k] = Some(cols);
                cols += 1;
            }
        }
        let mut signs = Vec::with_capacity(m);
        for (k, c) in constraints.iter().enumerate() {
            let flip = c.rhs.is_negative() || (c.rhs.is_zero() && c.relation == Relation::Ge);
            let sign = if flip { -1.0 } else { 1.0 };
            signs.push(sign);
            let slack = match c.relation {
                Relation::Le => sign,
                Relation::Ge => -sign,
                Relation::Eq => 0.0,
            };
            if slack != 1.0 {
                art_col[k] = Some(cols);
                cols += 1;
            }
        }
        let width = cols + 1;
        let mut t = Tableau {
            width,
            cells: vec![0.0; m * width],
            basic: vec![0; m],
            obj: vec![0.0; width],
        };
        for (k, c) in constraints.iter().enumerate() {
            let sign = signs[k];
            let row = &mut t.cells[k * width..(k + 1) * width];
            for (v, a) in &c.coeffs {
                row[*v] = sign * a.to_f64()?;
            }
            row[cols] = sign * c.rhs.to_f64()?;
            if let Some(s) = slack_col[k] {
                row[s] = if c.relation == Relation::Le {
                    sign
                } else {
                    -sign
                };
            }
            match art_col[k] {
                Some(a) => {
                    row[a] = 1.0;
                    t.basic[k] = a;
                }
                None => {
                    t.basic[k] = slack_col[k].unwrap();
                    if c.relation != Relation::Eq {
                        // Distinct tiny relaxations keep degenerate pivoting from cycling.
                        row[cols] += PERTURB * (1.0 + ((k * 7919) % 1009) as f64 / 1009.0);
                    }
                }
            }
        }
        Some(Model {
            num_vars,
            cols,
            slack_col,
            art_col,
            signs,
            initial: t,
        })
    }

    fn is_artificial(&self, c: usize) -> bool {
        c >= self.cols - self.art_col.iter().flatten().count() && c < self.cols
    }

    /// Minimizes `cost` from the current basis. `None` on trouble or when unbounded.
    fn run(
        &self,
        t: &mut Tableau,
        cost: &[f64],
        allow_artificial: bool,
        budget: &Budget,
    ) -> Option<()> {
        let m = t.basic.len();
        let (w, rhs) = (t.width, self.cols);
        if !t.refactor(&self.initial, cost) {
            return None;
        }
        let mut degenerate = 0u32;
        let mut pivots = 0u64;
        let mut since_refactor = 0u64;
        loop {
            if pivots >= budget.max_pivots {
                return None;
            }
            if pivots.is_multiple_of(64) && budget.deadline.is_some_and(|d| Instant::now() > d) {
                return None;
            }
            if since_refactor >= REFACTOR_EVERY {
                if !t.refactor(&self.initial, cost) {
                    return None;
                }
                since_refactor = 0;
            }
            let bland = degenerate >= DEGENERATE_RUN;
            let mut entering = None;
            let mut best = -TOL;
            for c in 0..self.cols {
                if t.obj[c] < best && (allow_artificial || !self.is_artificial(c)) {
                    entering = Some(c);
                    if bland {
                        break;
                    }
                    best = t.obj[c];
                }
            }
            let Some(e) = entering else {
                if since_refactor == 0 {
                    return Some(());
                }
                if !t.refactor(&self.initial, cost) {
                    return None;
                }
                since_refactor = 0;
                continue;
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..m {
                let a = t.cells[r * w + e];
                if a > PIVOT_TOL {
                    let ratio = t.cells[r * w + rhs].max(0.0) / a;
                    if leave.is_none_or(|(lr, lv)| {
                        ratio < lv - TOL || (ratio <= lv + TOL && t.basic[r] < t.basic[lr])
                    }) {
                        leave = Some((r, ratio));
                    }
                }
            }
            let (l, ratio) = leave?;
            degenerate = if ratio < TOL { degenerate + 1 } else { 0 };
            t.pivot(e, l);
            pivots += 1;
            since_refactor += 1;
        }
    }

    /// Multipliers `u` in the original orientation, read from reduced costs.
    fn multipliers(&self, t: &Tableau, cost: &[f64]) -> Vec<(usize, f64)> {
        (0..self.signs.len())
            .filter_map(|k| {
                // Row duals y of the normalized system: d_j = cost_j - y^T A'_j.
                let y = match (self.slack_col[k], self.art_col[k]) {
                    (Some(s), None) => -t.obj[s],
                    (Some(s), Some(_)) => t.obj[s],
                    (None, Some(a)) => cost[a] - t.obj[a],
                    (None, None) => unreachable!("every row has a slack or artificial"),
                };
                (y.abs() > TOL).then(|| (k, -y * self.signs[k]))
            })
            .collect()
    }

    fn point(&self, t: &Tableau) -> Vec<f64> {
        let mut x = vec![0.0; self.num_vars];
        for (r, &b) in t.basic.iter().enumerate() {
            if b < self.num_vars {
                x[b] = t.cells[r * t.width + self.cols];
            }
        }
        x
    }
}

pub(super) enum Guess {
    /// An exactly checked feasible vertex, with float multipliers proving
    /// optimality for the requested objective (unchecked).
    Vertex {
        x: Vec<Q>,
        duals: Vec<(usize, f64)>,
    },
    /// Float Farkas multipliers `(row, u)`, oriented like the exact ones. Unchecked.
    Infeasible(Vec<(usize, f64)>),
    Unknown,
}

/// Looks for an exactly feasible vertex of `{x >= 0 : constraints}` that
/// maximizes `objective` (pass an empty objective for plain feasibility).
pub(super) fn guess(
    num_vars: usize,
    constraints: &[Constraint],
    objective: &[(usize, Q)],
    budget: &Budget,
) -> Guess {
    try_guess(num_vars, constraints, objective, budget).unwrap_or(Guess::Unknown)
}

fn try_guess(
    num_vars: usize,
    constraints: &[Constraint],
    objective: &[(usize, Q)],
    budget: &Budget,
) -> Option<Guess> {
    let model = Model::new(num_vars, constraints)?;
    let mut cost = vec![0.0; model.cols];
    for a in model.art_col.iter().flatten() {
        cost[*a] = 1.0;
    }
    let mut t = model.initial.clone();
    model.run(&mut t, &cost, true, budget)?;
    if -t.obj[model.cols] > 1e-7 {
        return Some(Guess::Infeasible(model.multipliers(&t, &cost)));
    }
    let mut duals = Vec::new();
    if !objective.is_empty() {
        for a in model.art_col.iter().flatten() {
            cost[*a] = ARTIFICIAL_COST;
        }
        for (v, c) in objective {
            cost[*v] = -c.to_f64()?;
        }
        model.run(&mut t, &cost, false, budget)?;
        duals = model.multipliers(&t, &cost);
    }
    let approx = model.point(&t);
    // The face through the float point: equalities, tight inequalities and
    // variables at zero. An exact vertex near the point satisfies all of them.
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for c in constraints {
        let lhs: f64 = c
            .coeffs
            .iter()
            .map(|(v, a)| a.to_f64().unwrap_or(0.0) * approx[*v])
            .sum();
        if c.relation == Relation::Eq || (lhs - c.rhs.to_f64()?).abs() <= TIGHT {
            let mut row = vec![Q::zero(); num_vars + 1];
            for (v, a) in &c.coeffs {
                row[*v] = a.clone();
            }
            row[num_vars] = c.rhs.clone();
            rows.push(row);
        }
    }
    for v in (0..num_vars).filter(|&v| approx[v].abs() <= TIGHT) {
        let mut row = vec![Q::zero(); num_vars + 1];
        row[v] = Q::one();
        rows.push(row);
    }
    let x = Echelon::new(rows, num_vars).particular_solution()?;
    let ok = x.iter().all(|v| !v.is_negative()) && constraints.iter().all(|c| c.satisfied_by(&x));
    Some(if ok {
        Guess::Vertex { x, duals }
    } else {
        Guess::Unknown
    })
}

/// Denominators tried, in order, when rounding float multipliers; `None` is
/// the closest `i64` ratio.
const GRIDS: [Option<i64>; 2] = [Some(720_720), None];

fn approximate(v: f64, grid: Option<i64>) -> Q {
    if let Some(d) = grid {
        return Q::new(((v * d as f64).round() as i64).into(), d.into());
    }
    let r = num_rational::Ratio::<i64>::approximate_float(v).unwrap_or_default();
    Q::new((*r.numer()).into(), (*r.denom()).into())
}

/// Exact multipliers `u` on the support of `float_u` with `A^T u >= c`
/// entrywise, `b^T u = z` and the sign of each row respected.
///
/// Columns where the float combination meets `c` become equations; the
/// remaining freedom is fixed from the float values divided by `scale`.
fn exact_multipliers(
    num_vars: usize,
    constraints: &[Constraint],
    float_u: &[(usize, f64)],
    c: &[Q],
    z: &Q,
    scale: f64,
) -> Option<Vec<(usize, Q)>> {
    let mut combo = vec![0.0; num_vars];
    for &(k, u) in float_u {
        for (v, a) in &constraints[k].coeffs {
            combo[*v] += u * a.to_f64()? / scale;
        }
    }
    let unknowns = float_u.len();
    let mut col_rows: Vec<Vec<(usize, &Q)>> = vec![Vec::new(); num_vars];
    for (i, &(k, _)) in float_u.iter().enumerate() {
        for (v, a) in &constraints[k].coeffs {
            col_rows[*v].push((i, a));
        }
    }
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for v in 0..num_vars {
        if (combo[v] - c[v].to_f64()?).abs() <= TIGHT && !col_rows[v].is_empty() {
            let mut row = vec![Q::zero(); unknowns + 1];
            for (i, a) in &col_rows[v] {
                row[*i] = (*a).clone();
            }
            row[unknowns] = c[v].clone();
            rows.push(row);
        }
    }
    let mut norm = vec![Q::zero(); unknowns + 1];
    for (i, &(k, _)) in float_u.iter().enumerate() {
        norm[i] = constraints[k].rhs.clone();
    }
    norm[unknowns] = z.clone();
    rows.push(norm);
    let echelon = Echelon::new(rows, unknowns);
    GRIDS.into_iter().find_map(|grid| {
        let u = echelon.solution_with(|i| approximate(float_u[i].1 / scale, grid))?;
        check_multipliers(num_vars, constraints, float_u, c, z, u)
    })
}

fn check_multipliers(
    num_vars: usize,
    constraints: &[Constraint],
    float_u: &[(usize, f64)],
    c: &[Q],
    z: &Q,
    u: Vec<Q>,
) -> Option<Vec<(usize, Q)>> {
    let mut exact = vec![Q::zero(); num_vars];
    let mut value = Q::zero();
    for (i, &(k, _)) in float_u.iter().enumerate() {
        let con = &constraints[k];
        let sign_ok = match con.relation {
            Relation::Le => !u[i].is_negative(),
            Relation::Ge => !u[i].is_positive(),
            Relation::Eq => true,
        };
        if !sign_ok {
            return None;
        }
        for (v, a) in &con.coeffs {
            exact[*v] += &u[i] * a;
        }
        value += &u[i] * &con.rhs;
    }
    let ok = value == *z && exact.iter().zip(c).all(|(e, c)| e >= c);
    ok.then(|| {
        float_u
            .iter()
            .zip(u)
            .filter(|(_, u)| !u.is_zero())
            .map(|(&(k, _), u)| (k, u))
            .collect()
    })
}

/// An exact Farkas certificate rebuilt from float multipliers.
pub(super) fn farkas_certificate(
    num_vars: usize,
    constraints: &[Constraint],
    float_u: &[(usize, f64)],
) -> Option<FarkasCertificate> {
    let rhs: f64 = float_u
        .iter()
        .map(|&(k, u)| u * constraints[k].rhs.to_f64().unwrap_or(f64::NAN))
        .sum();
    if rhs.is_nan() || rhs >= -TOL {
        return None;
    }
    let zero = vec![Q::zero(); num_vars];
    let multipliers =
        exact_multipliers(num_vars, constraints, float_u, &zero, &-Q::one(), rhs.abs())?;
    let cert = FarkasCertificate { multipliers };
    cert.verify(constraints, num_vars).then_some(cert)
}

/// True when the float multipliers rebuild into an exact proof that no
/// feasible point beats `x` on `objective`.
pub(super) fn proves_optimal(
    num_vars: usize,
    constraints: &[Constraint],
    objective: &[(usize, Q)],
    x: &[Q],
    float_u: &[(usize, f64)],
) -> bool {
    let mut c = vec![Q::zero(); num_vars];
    for (v, a) in objective {
        c[*v] += a;
    }
    let z: Q = objective.iter().map(|(v, a)| a * &x[*v]).sum();
    exact_multipliers(num_vars, constraints, float_u, &c, &z, 1.0).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn small() -> Vec<Constraint> {
        vec![
            Constraint::new(vec![(0, qi(1)), (1, qi(1))], Relation::Eq, qi(1)),
            Constraint::new(vec![(0, qi(3)), (1, qi(-1))], Relation::Ge, qi(0)),
            Constraint::new(vec![(0, qi(1))], Relation::Le, q(2, 3)),
        ]
    }

    #[test]
    fn finds_exact_vertex() {
        let cons = small();
        let Guess::Vertex { x, .. } = guess(2, &cons, &[], &Budget::default()) else {
            panic!("no vertex");
        };
        assert_eq!(&x[0] + &x[1], qi(1));
        assert!(cons.iter().all(|c| c.satisfied_by(&x)));
    }

    #[test]
    fn proves_optimum() {
        let cons = small();
        for (objective, best) in [(vec![(0, qi(1))], q(2, 3)), (vec![(0, qi(-1))], q(-1, 4))] {
            let Guess::Vertex { x, duals } = guess(2, &cons, &objective, &Budget::default()) else {
                panic!("no vertex");
            };
            let value: Q = objective.iter().map(|(v, a)| a * &x[*v]).sum();
            assert_eq!(value, best);
            assert!(proves_optimal(2, &cons, &objective, &x, &duals));
            let worse = vec![qi(1) - &q(1, 2), q(1, 2)];
            assert!(!proves_optimal(2, &cons, &objective, &worse, &duals));
        }
    }

    #[test]
    fn certifies_infeasibility() {
        let cons = vec![
            Constraint::new(vec![(0, qi(1))], Relation::Ge, qi(2)),
            Constraint::new(vec![(0, qi(1))], Relation::Le, qi(1)),
        ];
        let Guess::Infeasible(u) = guess(1, &cons, &[], &Budget::default()) else {
            panic!("not infeasible");
        };
        let cert = farkas_certificate(1, &cons, &u).unwrap();
        assert_eq!(cert.multipliers, vec![(0, qi(-1)), (1, qi(1))]);
    }
}
