use std::fmt;

use num_traits::{One, Zero};

use super::simplex::{Phase1, Simplex};
use super::{
    build_lp, probe_forced_values, solve_feasibility, Budget, Constraint, LpOptions, LpOutcome,
    Relation,
};
use crate::canon::Classification;
use crate::error::{Error, Result};
use crate::rational::{format_vec, q, Q};
use crate::tournament::Tournament;

/// Published vertices of the allowed region for the strongly connected 4-tournament.
pub const T4_VERTICES: [[(i64, i64); 4]; 6] = [
    [(4, 9), (2, 9), (0, 1), (3, 9)],
    [(5, 9), (1, 9), (0, 1), (3, 9)],
    [(13, 33), (8, 33), (2, 33), (10, 33)],
    [(5, 12), (13, 48), (1, 48), (7, 24)],
    [(11, 21), (4, 21), (1, 21), (5, 21)],
    [(17, 39), (7, 39), (4, 39), (11, 39)],
];

fn vertices() -> Vec<Vec<Q>> {
    T4_VERTICES
        .iter()
        .map(|v| v.iter().map(|&(a, b)| q(a, b)).collect())
        .collect()
}

#[derive(Clone, Debug)]
pub struct LabelingCheck {
    /// Coordinate k of each vertex belongs to agent `perm[k]`.
    pub perm: Vec<usize>,
    pub vertex_feasible: Vec<bool>,
    /// Whether the solver's own entry lies in the hull under this labeling.
    pub solution_in_hull: bool,
}

#[derive(Clone, Debug)]
pub struct HullReport {
    pub tournament: Tournament,
    pub solution_entry: Vec<Q>,
    pub probes: Vec<(Q, Q)>,
    pub labelings: Vec<LabelingCheck>,
}

impl HullReport {
    /// Labelings under which every published vertex is feasible.
    pub fn matching(&self) -> impl Iterator<Item = &LabelingCheck> {
        self.labelings
            .iter()
            .filter(|l| l.vertex_feasible.iter().all(|&f| f))
    }
}

impl fmt::Display for HullReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "T4 = {}", self.tournament)?;
        writeln!(f, "solution entry: {}", format_vec(&self.solution_entry))?;
        for (a, (lo, hi)) in self.probes.iter().enumerate() {
            writeln!(f, "agent {}: min {lo} max {hi}", a + 1)?;
        }
        let mut any = false;
        for l in self.matching() {
            any = true;
            let perm: Vec<String> = l.perm.iter().map(|p| (p + 1).to_string()).collect();
            writeln!(
                f,
                "labeling {}: all vertices feasible, solution in hull: {}",
                perm.join(","),
                l.solution_in_hull
            )?;
        }
        if !any {
            let best = self
                .labelings
                .iter()
                .map(|l| l.vertex_feasible.iter().filter(|&&x| x).count())
                .max()
                .unwrap_or(0);
            writeln!(
                f,
                "no labeling makes all vertices feasible (best: {best} of 6)"
            )?;
        }
        Ok(())
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    fn go(k: usize, p: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == p.len() {
            out.push(p.clone());
            return;
        }
        for i in k..p.len() {
            p.swap(k, i);
            go(k + 1, p, out);
            p.swap(k, i);
        }
    }
    go(0, &mut p, &mut out);
    out.sort();
    out
}

fn in_hull(point: &[Q], verts: &[Vec<Q>], budget: &Budget) -> Result<bool> {
    let m = verts.len();
    let mut cons = vec![Constraint::new(
        (0..m).map(|v| (v, Q::one())).collect(),
        Relation::Eq,
        Q::one(),
    )];
    for (k, p) in point.iter().enumerate() {
        cons.push(Constraint::new(
            (0..m).map(|v| (v, verts[v][k].clone())).collect(),
            Relation::Eq,
            p.clone(),
        ));
    }
    let mut s = Simplex::new(m, &cons);
    Ok(matches!(s.phase1(&cons, budget)?, Phase1::Feasible))
}

/// Compares the strongly connected 4-tournament entry of the symmetric
/// `n = 4, λ = 1` program against the published vertex list under every labeling.
pub fn t4_hull_report(options: LpOptions, budget: &Budget) -> Result<HullReport> {
    let options = LpOptions {
        symmetric: true,
        ..options
    };
    let lambda = Q::one();
    let classes = Classification::new(4)?;
    let t4 = classes
        .classes
        .iter()
        .map(|c| c.canonical.clone())
        .find(|t| t.top_cycle().len() == 4)
        .ok_or_else(|| Error::Precondition("no strongly connected 4-tournament".into()))?;
    let base = build_lp(4, &lambda, options)?;
    let LpOutcome::Feasible { table, .. } = solve_feasibility(&base, budget)? else {
        return Err(Error::Infeasible);
    };
    let solution_entry = table.get(&t4).probs().to_vec();
    let probes = (0..4)
        .map(|a| probe_forced_values(&base, &t4, a, budget))
        .collect::<Result<Vec<_>>>()?;
    let verts = vertices();
    let mut labelings = Vec::new();
    for perm in permutations(4) {
        let mut vertex_feasible = Vec::new();
        let mut relabeled = Vec::new();
        for v in &verts {
            let mut lp = base.clone();
            let mut point = vec![Q::zero(); 4];
            for (k, value) in v.iter().enumerate() {
                point[perm[k]] = value.clone();
                lp.fix(&t4, perm[k], value.clone());
            }
            let mut s = Simplex::new(lp.variables().len(), lp.constraints());
            vertex_feasible.push(matches!(
                s.phase1(lp.constraints(), budget)?,
                Phase1::Feasible
            ));
            relabeled.push(point);
        }
        let solution_in_hull = in_hull(&solution_entry, &relabeled, budget)?;
        labelings.push(LabelingCheck {
            perm,
            vertex_feasible,
            solution_in_hull,
        });
    }
    Ok(HullReport {
        tournament: t4,
        solution_entry,
        probes,
        labelings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertices_are_distributions() {
        for v in vertices() {
            assert_eq!(v.iter().sum::<Q>(), Q::one());
        }
    }

    #[test]
    fn hull_membership() {
        let verts = vec![vec![Q::one(), Q::zero()], vec![Q::zero(), Q::one()]];
        let b = Budget::default();
        assert!(in_hull(&[q(1, 3), q(2, 3)], &verts, &b).unwrap());
        assert!(!in_hull(&[q(1, 3), q(1, 3)], &verts, &b).unwrap());
        assert_eq!(permutations(4).len(), 24);
    }
}
