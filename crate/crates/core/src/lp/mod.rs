//! The feasibility program for monotone, Condorcet-consistent, 2-NM_λ rule
//! tables, an exact solver for it, and auditing of arbitrary tables.
//!
//! Monotonicity plus the one-sided bound `r_i(T') - r_i(T) <= (λ + 1)(r_j(T) - r_j(T'))`
//! (for the new winner `i` and new loser `j` of each reversed match) is a
//! linear description of monotone 2-NM_λ rules, so the max in the 2-NM_λ
//! definition never enters the program.
//!
//! In symmetric mode there is one variable per automorphism orbit of each
//! isomorphism class. The constraints are equivariant and the feasible set is
//! convex, so averaging a feasible table over all relabelings gives an
//! equivariant feasible table: nothing is lost.

mod float;
mod hull;
mod simplex;

use std::collections::HashSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::analysis::{
    check_fairness_table, check_monotone_table, check_nm_lambda_table, check_one_sided_nm_table,
    Property, PropertyReport,
};
use crate::canon::Classification;
use crate::error::{Error, Result};
use crate::rational::{common_denominator, Q};
use crate::rules::WinDistribution;
use crate::table::RuleTable;
use crate::tournament::Tournament;

pub use hull::{t4_hull_report, HullReport, T4_VERTICES};
pub use simplex::{Budget, Constraint, FarkasCertificate, Relation};

/// Largest size built without symmetry reduction.
pub const UNSYMMETRIC_MAX_AGENTS: usize = 5;
/// Largest size built at all.
pub const LP_MAX_AGENTS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LpOptions {
    /// One variable per (isomorphism class, orbit) instead of per (tournament, agent).
    pub symmetric: bool,
    /// Include monotonicity; without it the program only relaxes 2-NM_λ.
    pub monotone: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            symmetric: false,
            monotone: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variable {
    Entry { code: u128, agent: usize },
    Orbit { class: usize, orbit: usize },
}

#[derive(Clone, Debug)]
pub struct LpInstance {
    pub n: usize,
    pub lambda: Q,
    pub options: LpOptions,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    /// Where each constraint came from, for certificates and exports.
    origins: Vec<String>,
    classes: Option<Classification>,
    class_offset: Vec<usize>,
}

struct Builder {
    seen: HashSet<Constraint>,
    constraints: Vec<Constraint>,
    origins: Vec<String>,
}

impl Builder {
    fn push(&mut self, c: Constraint, origin: impl FnOnce() -> String) {
        if c.is_trivial() || self.seen.contains(&c) {
            return;
        }
        self.seen.insert(c.clone());
        self.constraints.push(c);
        self.origins.push(origin());
    }
}

pub fn build_lp(n: usize, lambda: &Q, options: LpOptions) -> Result<LpInstance> {
    if !(2..=LP_MAX_AGENTS).contains(&n) {
        return Err(Error::Budget(format!(
            "the rule LP supports 2..={LP_MAX_AGENTS} agents, got {n}"
        )));
    }
    if !options.symmetric && n > UNSYMMETRIC_MAX_AGENTS {
        return Err(Error::Budget(format!(
            "without symmetry reduction the rule LP supports at most {UNSYMMETRIC_MAX_AGENTS} agents; use the symmetric instance"
        )));
    }
    if lambda.is_negative() {
        return Err(Error::Parameter(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    let mut lp = LpInstance {
        n,
        lambda: lambda.clone(),
        options,
        variables: Vec::new(),
        constraints: Vec::new(),
        origins: Vec::new(),
        classes: None,
        class_offset: Vec::new(),
    };
    let sources: Vec<Tournament> = if options.symmetric {
        let classes = Classification::new(n)?;
        for (c, class) in classes.classes.iter().enumerate() {
            lp.class_offset.push(lp.variables.len());
            for orbit in 0..class.orbits.len() {
                lp.variables.push(Variable::Orbit { class: c, orbit });
            }
        }
        let reps = classes
            .classes
            .iter()
            .map(|c| c.canonical.clone())
            .collect();
        lp.classes = Some(classes);
        reps
    } else {
        for code in 0..Tournament::count(n) {
            for agent in 0..n {
                lp.variables.push(Variable::Entry { code, agent });
            }
        }
        Tournament::all(n)?.collect()
    };

    let mut b = Builder {
        seen: HashSet::new(),
        constraints: Vec::new(),
        origins: Vec::new(),
    };
    let one = Q::one();
    let step = lambda + Q::one();
    for t in &sources {
        let var = |t: &Tournament, a| lp.var(t, a);
        b.push(
            Constraint::new(
                (0..n).map(|a| (var(t, a), one.clone())).collect(),
                Relation::Eq,
                one.clone(),
            ),
            || format!("simplex T={}", t.to_compact()),
        );
        if let Some(w) = t.condorcet_winner() {
            b.push(
                Constraint::new(vec![(var(t, w), one.clone())], Relation::Eq, one.clone()),
                || format!("condorcet T={} winner={}", t.to_compact(), w + 1),
            );
        }
        for a in 0..n {
            for c in a + 1..n {
                let flipped = t.flip(a, c)?;
                // i wins the reversed match, j loses it.
                let (i, j) = if t.beats(a, c) { (c, a) } else { (a, c) };
                let describe = |what: &str| {
                    format!(
                        "{what} T={} new_winner={} new_loser={}",
                        t.to_compact(),
                        i + 1,
                        j + 1
                    )
                };
                if options.monotone {
                    b.push(
                        Constraint::new(
                            vec![(var(t, j), one.clone()), (var(&flipped, j), -one.clone())],
                            Relation::Ge,
                            Q::zero(),
                        ),
                        || describe("monotone-loser"),
                    );
                    b.push(
                        Constraint::new(
                            vec![(var(&flipped, i), one.clone()), (var(t, i), -one.clone())],
                            Relation::Ge,
                            Q::zero(),
                        ),
                        || describe("monotone-winner"),
                    );
                }
                b.push(
                    Constraint::new(
                        vec![
                            (var(&flipped, i), one.clone()),
                            (var(t, i), -one.clone()),
                            (var(t, j), -step.clone()),
                            (var(&flipped, j), step.clone()),
                        ],
                        Relation::Le,
                        Q::zero(),
                    ),
                    || describe("one-sided"),
                );
            }
        }
    }
    lp.constraints = b.constraints;
    lp.origins = b.origins;
    Ok(lp)
}

impl LpInstance {
    /// Variable holding `r_agent(t)`.
    pub fn var(&self, t: &Tournament, agent: usize) -> usize {
        let code = t.code();
        match &self.classes {
            None => code as usize * self.n + agent,
            Some(classes) => {
                let class = classes.class_of[code as usize] as usize;
                let label = classes.relabeling[code as usize][agent] as usize;
                self.class_offset[class] + classes.classes[class].orbit_of(label)
            }
        }
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn origin(&self, k: usize) -> &str {
        &self.origins[k]
    }

    /// Number of isomorphism classes (symmetric mode) or labeled tournaments.
    pub fn tournament_count(&self) -> usize {
        match &self.classes {
            Some(c) => c.class_count(),
            None => Tournament::count(self.n) as usize,
        }
    }

    /// Adds `r_agent(t) = value`.
    pub fn fix(&mut self, t: &Tournament, agent: usize, value: Q) {
        let c = Constraint::new(vec![(self.var(t, agent), Q::one())], Relation::Eq, value);
        self.origins
            .push(format!("fixed T={} agent={}", t.to_compact(), agent + 1));
        self.constraints.push(c);
    }

    pub fn variable_name(&self, v: usize) -> String {
        match self.variables[v] {
            Variable::Entry { code, agent } => format!("r{code}_{}", agent + 1),
            Variable::Orbit { class, orbit } => format!("o{class}_{}", orbit + 1),
        }
    }

    /// Materializes the table encoded by a solution vector.
    pub fn rule_table(&self, x: &[Q]) -> Result<RuleTable> {
        RuleTable::from_fn(self.n, self.lambda.clone(), |t| {
            WinDistribution::new((0..self.n).map(|a| x[self.var(t, a)].clone()).collect())
        })
    }

    /// CPLEX LP text, each row scaled to integer coefficients.
    pub fn to_lp_format(&self) -> String {
        let mut out = format!(
            "\\ tournament rule LP: n={} lambda={} symmetric={} monotone={}\nMaximize\n obj: 0 {}\nSubject To\n",
            self.n,
            self.lambda,
            self.options.symmetric,
            self.options.monotone,
            self.variable_name(0)
        );
        for (k, c) in self.constraints.iter().enumerate() {
            let scale = Q::from_integer(common_denominator(
                c.coeffs
                    .iter()
                    .map(|(_, a)| a)
                    .chain(std::iter::once(&c.rhs)),
            ));
            let int = |v: &Q| -> BigInt { (v * &scale).to_integer() };
            write!(out, " c{k}:").unwrap();
            for (v, a) in &c.coeffs {
                let a = int(a);
                let sign = if a.is_negative() { '-' } else { '+' };
                write!(out, " {sign} {} {}", a.abs(), self.variable_name(*v)).unwrap();
            }
            if c.coeffs.is_empty() {
                write!(out, " 0 {}", self.variable_name(0)).unwrap();
            }
            writeln!(out, " {} {}", c.relation.symbol(), int(&c.rhs)).unwrap();
        }
        out.push_str("End\n");
        out
    }

    /// One line per nonzero multiplier: the multiplier and the constraint it scales.
    pub fn describe_certificate(&self, cert: &FarkasCertificate) -> String {
        let mut out = String::new();
        for (k, u) in &cert.multipliers {
            let c = &self.constraints[*k];
            let lhs: Vec<String> = c
                .coeffs
                .iter()
                .map(|(v, a)| format!("{a}*{}", self.variable_name(*v)))
                .collect();
            writeln!(
                out,
                "{u}\t[{}]\t{} {} {}",
                self.origins[*k],
                lhs.join(" + "),
                c.relation.symbol(),
                c.rhs
            )
            .unwrap();
        }
        out
    }
}

#[derive(Clone, Debug)]
pub enum LpOutcome {
    /// A verified table and the audit reports it passed.
    Feasible {
        table: RuleTable,
        reports: Vec<PropertyReport>,
    },
    Infeasible(FarkasCertificate),
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, LpOutcome::Feasible { .. })
    }
}

fn required_properties(lp: &LpInstance) -> Vec<Property> {
    let mut props = vec![Property::Cc];
    if lp.options.monotone {
        props.push(Property::Monotone);
    }
    if lp.lambda.is_positive() {
        props.push(Property::OneSided);
    }
    props.push(Property::NmLambda);
    props
}

/// Exact phase 1, optionally on a subsystem first: a certificate for a
/// subsystem certifies the whole system.
fn exact_phase1(
    lp: &LpInstance,
    rows: Option<&[usize]>,
    budget: &Budget,
) -> Result<std::result::Result<Vec<Q>, FarkasCertificate>> {
    if let Some(rows) = rows {
        let sub: Vec<Constraint> = rows.iter().map(|&k| lp.constraints[k].clone()).collect();
        let mut solver = simplex::Simplex::new(lp.variables.len(), &sub);
        if let simplex::Phase1::Infeasible(cert) = solver.phase1(&sub, budget)? {
            let cert = FarkasCertificate {
                multipliers: cert
                    .multipliers
                    .into_iter()
                    .map(|(k, u)| (rows[k], u))
                    .collect(),
            };
            if !cert.verify(&lp.constraints, lp.variables.len()) {
                return Err(Error::Precondition(
                    "internal error: lifted certificate failed verification".into(),
                ));
            }
            return Ok(Err(cert));
        }
    }
    let mut solver = simplex::Simplex::new(lp.variables.len(), &lp.constraints);
    Ok(match solver.phase1(&lp.constraints, budget)? {
        simplex::Phase1::Infeasible(cert) => Err(cert),
        simplex::Phase1::Feasible => Ok(solver.solution()),
    })
}

pub fn solve_feasibility(lp: &LpInstance, budget: &Budget) -> Result<LpOutcome> {
    let x = match float::guess(lp.variables.len(), &lp.constraints, &[], budget) {
        float::Guess::Vertex { x, .. } => x,
        float::Guess::Infeasible(u) => {
            if let Some(cert) = float::farkas_certificate(lp.variables.len(), &lp.constraints, &u) {
                return Ok(LpOutcome::Infeasible(cert));
            }
            let support: Vec<usize> = u.iter().map(|(k, _)| *k).collect();
            match exact_phase1(lp, Some(&support), budget)? {
                Ok(x) => x,
                Err(cert) => return Ok(LpOutcome::Infeasible(cert)),
            }
        }
        float::Guess::Unknown => match exact_phase1(lp, None, budget)? {
            Ok(x) => x,
            Err(cert) => return Ok(LpOutcome::Infeasible(cert)),
        },
    };
    if let Some(k) = lp.constraints.iter().position(|c| !c.satisfied_by(&x)) {
        return Err(Error::Precondition(format!(
            "internal error: solution violates constraint [{}]",
            lp.origins[k]
        )));
    }
    let table = lp.rule_table(&x)?;
    let reports = verify_rule_table(&table, &lp.lambda, &required_properties(lp))?;
    for r in &reports {
        let implied = r.property != Property::NmLambda || lp.options.monotone;
        if implied && !r.holds {
            return Err(Error::Precondition(format!(
                "internal error: LP table fails verification: {r}"
            )));
        }
    }
    Ok(LpOutcome::Feasible { table, reports })
}

/// Exact audit of `table` for each requested property. `NM_LAMBDA` is the
/// max-form definition, so tables from any source can be checked.
pub fn verify_rule_table(
    table: &RuleTable,
    lambda: &Q,
    require: &[Property],
) -> Result<Vec<PropertyReport>> {
    require
        .iter()
        .map(|&p| {
            let mut r = match p {
                Property::Cc | Property::Tcc | Property::Cover => check_fairness_table(table, p)?,
                Property::Monotone => check_monotone_table(table),
                Property::NmLambda => check_nm_lambda_table(table, lambda),
                Property::OneSided => check_one_sided_nm_table(table, lambda)?,
                other => {
                    return Err(Error::Parameter(format!(
                        "{other} is not a rule-table requirement"
                    )))
                }
            };
            if r.lambda.is_none() && matches!(p, Property::NmLambda | Property::OneSided) {
                r.lambda = Some(lambda.clone());
            }
            Ok(r)
        })
        .collect()
}

/// Exact optimum of `objective`: a float optimum whose vertex and dual both
/// check out exactly, or else the exact simplex.
fn maximize(lp: &LpInstance, objective: &[(usize, Q)], budget: &Budget) -> Result<Q> {
    let (n, cons) = (lp.variables.len(), &lp.constraints);
    if let float::Guess::Vertex { x, duals } = float::guess(n, cons, objective, budget) {
        if float::proves_optimal(n, cons, objective, &x, &duals) {
            return Ok(objective.iter().map(|(v, a)| a * &x[*v]).sum());
        }
    }
    let mut solver = simplex::Simplex::new(n, cons);
    if let simplex::Phase1::Infeasible(_) = solver.phase1(cons, budget)? {
        return Err(Error::Infeasible);
    }
    solver.maximize(objective, budget)
}

/// Exact minimum and maximum of `r_i(t)` over the feasible region.
pub fn probe_forced_values(
    lp: &LpInstance,
    t: &Tournament,
    i: usize,
    budget: &Budget,
) -> Result<(Q, Q)> {
    if t.n() != lp.n || i >= lp.n {
        return Err(Error::Parameter(format!(
            "probe needs a {}-agent tournament and an agent in range",
            lp.n
        )));
    }
    let v = lp.var(t, i);
    let min = -maximize(lp, &[(v, -Q::one())], budget)?;
    let max = maximize(lp, &[(v, Q::one())], budget)?;
    Ok((min, max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn symmetric() -> LpOptions {
        LpOptions {
            symmetric: true,
            ..LpOptions::default()
        }
    }

    #[test]
    fn instance_sizes_at_three() {
        let lp = build_lp(3, &qi(1), LpOptions::default()).unwrap();
        assert_eq!(lp.tournament_count(), 8);
        assert_eq!(lp.variables().len(), 24);
        let sym = build_lp(3, &qi(1), symmetric()).unwrap();
        assert_eq!(sym.tournament_count(), 2);
    }

    #[test]
    fn two_agents_are_forced() {
        let lp = build_lp(2, &qi(0), LpOptions::default()).unwrap();
        let t = Tournament::transitive(2).unwrap();
        assert_eq!(
            probe_forced_values(&lp, &t, 0, &Budget::default()).unwrap(),
            (qi(1), qi(1))
        );
    }

    #[test]
    fn threshold_at_three() {
        for lambda in [qi(0), q(1, 2), q(9, 10), q(99, 100)] {
            for options in [LpOptions::default(), symmetric()] {
                let lp = build_lp(3, &lambda, options).unwrap();
                match solve_feasibility(&lp, &Budget::default()).unwrap() {
                    LpOutcome::Infeasible(cert) => {
                        assert!(cert.verify(lp.constraints(), lp.variables().len()))
                    }
                    LpOutcome::Feasible { .. } => panic!("feasible at λ = {lambda}"),
                }
            }
        }
        let lp = build_lp(3, &qi(1), LpOptions::default()).unwrap();
        let outcome = solve_feasibility(&lp, &Budget::default()).unwrap();
        let LpOutcome::Feasible { table, reports } = outcome else {
            panic!("infeasible at λ = 1");
        };
        assert!(reports.iter().all(|r| r.holds));
        let cycle: Tournament = "3:101".parse().unwrap();
        assert_eq!(table.get(&cycle).to_string(), "1/3 1/3 1/3");
        assert_eq!(
            probe_forced_values(&lp, &cycle, 0, &Budget::default()).unwrap(),
            (q(1, 3), q(1, 3))
        );
    }

    #[test]
    fn export_scales_to_integers() {
        let lp = build_lp(3, &q(9, 10), LpOptions::default()).unwrap();
        let text = lp.to_lp_format();
        assert!(text.starts_with("\\ tournament rule LP: n=3 lambda=9/10"));
        assert!(text.contains("- 19 r"));
        assert!(!text.contains('/') || text.lines().next().unwrap().contains('/'));
        assert!(text.trim_end().ends_with("End"));
    }

    #[test]
    fn verifier_catches_tcr_at_four() {
        let table = RuleTable::from_rule(crate::RuleId::Tcr, 4).unwrap();
        let reports =
            verify_rule_table(&table, &qi(1), &[Property::Cc, Property::NmLambda]).unwrap();
        assert!(reports[0].holds);
        assert!(!reports[1].holds);
        assert!(reports[1].replay_table(&table).unwrap());
    }
}
