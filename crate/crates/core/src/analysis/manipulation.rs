use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use super::{check_budget, Property, PropertyReport, Witness};
use crate::canon::Classification;
use crate::error::{Error, Result};
use crate::rational::{max_q, Q};
use crate::rules::{evaluate, RuleId, WinDistribution};
use crate::table::RuleTable;
use crate::tournament::{pair_index, Tournament};

/// The effect of reversing the `(i, j)` match of `tournament`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManipulationWitness {
    pub tournament: Tournament,
    pub i: usize,
    pub j: usize,
    pub lambda: Q,
    /// `r_i(T') - r_i(T)`.
    pub gain_i: Q,
    pub gain_j: Q,
    pub joint_gain: Q,
    /// `max(r_i(T) - r_i(T'), r_j(T) - r_j(T'))`.
    pub max_loss: Q,
    /// `joint_gain - lambda * max_loss`.
    pub value: Q,
}

impl ManipulationWitness {
    pub fn from_distributions(
        t: &Tournament,
        i: usize,
        j: usize,
        lambda: Q,
        before: &WinDistribution,
        after: &WinDistribution,
    ) -> Self {
        let gain_i = after.prob(i) - before.prob(i);
        let gain_j = after.prob(j) - before.prob(j);
        let joint_gain = &gain_i + &gain_j;
        let max_loss = max_q(&-&gain_i, &-&gain_j).clone();
        let value = &joint_gain - &lambda * &max_loss;
        ManipulationWitness {
            tournament: t.clone(),
            i,
            j,
            lambda,
            gain_i,
            gain_j,
            joint_gain,
            max_loss,
            value,
        }
    }

    /// `T'`, the tournament after the reversal.
    pub fn flipped(&self) -> Tournament {
        self.tournament
            .flip(self.i, self.j)
            .expect("distinct agents")
    }

    /// Same accounting with the roles of `T` and `T'` swapped.
    fn key(&self) -> (u128, usize, usize) {
        (
            self.tournament.code(),
            self.i.min(self.j),
            self.i.max(self.j),
        )
    }
}

impl fmt::Display for ManipulationWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "T={} pair=({}, {}) gain_i={} gain_j={} joint_gain={} max_loss={} value={}",
            self.tournament.to_compact(),
            self.i + 1,
            self.j + 1,
            self.gain_i,
            self.gain_j,
            self.joint_gain,
            self.max_loss,
            self.value
        )
    }
}

/// Least λ making the rule 2-NM_λ at one size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinLambda {
    Finite(Q),
    Infinite,
}

impl fmt::Display for MinLambda {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MinLambda::Finite(q) => write!(f, "{q}"),
            MinLambda::Infinite => f.write_str("INFINITE"),
        }
    }
}

pub(crate) fn flip_code(n: usize, code: u128, i: usize, j: usize) -> u128 {
    code ^ (1u128 << pair_index(n, i.min(j), i.max(j)))
}

pub fn manipulation_value(
    rule: RuleId,
    t: &Tournament,
    i: usize,
    j: usize,
    lambda: &Q,
) -> Result<ManipulationWitness> {
    let flipped = t.flip(i, j)?;
    let before = evaluate(rule, t)?;
    let after = evaluate(rule, &flipped)?;
    Ok(ManipulationWitness::from_distributions(
        t,
        i,
        j,
        lambda.clone(),
        &before,
        &after,
    ))
}

pub(super) fn violates(property: Property, w: &ManipulationWitness) -> bool {
    let positive = |v: &Q| v.is_positive();
    match property {
        Property::Monotone => w.tournament.beats(w.i, w.j) && positive(&w.gain_i),
        Property::Pnm => {
            !w.gain_i.is_negative()
                && !w.gain_j.is_negative()
                && (positive(&w.gain_i) || positive(&w.gain_j))
        }
        Property::NmInfinity => positive(&w.joint_gain) && !positive(&w.max_loss),
        Property::Snm => positive(&w.joint_gain),
        Property::NmLambda => positive(&w.value),
        Property::OneSided => {
            w.tournament.beats(w.j, w.i) && w.gain_i > (&w.lambda + Q::one()) * -&w.gain_j
        }
        _ => false,
    }
}

/// Applies `per_flip` to every (tournament, pair) of the table and keeps
/// the `Some` results.
fn flips<'a, T, F>(table: &'a RuleTable, per_flip: &'a F) -> impl ParallelIterator<Item = T> + 'a
where
    T: Send + 'a,
    F: Fn(&Tournament, usize, usize, &'a WinDistribution, &'a WinDistribution) -> Option<T> + Sync,
{
    let n = table.n();
    (0..Tournament::count(n))
        .into_par_iter()
        .flat_map_iter(move |code| {
            let t = Tournament::from_code(n, code).expect("valid code");
            let mut out = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    let before = table.by_code(code);
                    let after = table.by_code(flip_code(n, code, i, j));
                    if let Some(v) = per_flip(&t, i, j, before, after) {
                        out.push(v);
                    }
                }
            }
            out.into_iter()
        })
}

/// Larger value first, then earlier in enumeration order.
fn better(a: ManipulationWitness, b: ManipulationWitness) -> ManipulationWitness {
    match a.value.cmp(&b.value) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if a.key() <= b.key() {
                a
            } else {
                b
            }
        }
    }
}

/// Worst slack over every ordered adjacent pair, floored at 0, with the
/// flip attaining the maximum value (`None` only for one agent).
pub fn worst_alpha_table(table: &RuleTable, lambda: &Q) -> (Q, Option<ManipulationWitness>) {
    let per_flip = |t: &Tournament, i, j, before, after| {
        Some(ManipulationWitness::from_distributions(
            t,
            i,
            j,
            lambda.clone(),
            before,
            after,
        ))
    };
    let best = flips(table, &per_flip).reduce_with(better);
    let alpha = best
        .as_ref()
        .map(|w| max_q(&w.value, &Q::zero()).clone())
        .unwrap_or_else(Q::zero);
    (alpha, best)
}

pub fn worst_alpha(rule: RuleId, n: usize, lambda: &Q) -> Result<(Q, Option<ManipulationWitness>)> {
    check_lambda(lambda)?;
    check_budget(n)?;
    Ok(worst_alpha_table(&RuleTable::from_rule(rule, n)?, lambda))
}

/// [`worst_alpha`] over one representative per isomorphism class, with all
/// of its internal pairs; equal to the full scan for label-equivariant rules.
pub fn worst_alpha_reduced(rule: RuleId, n: usize, lambda: &Q) -> Result<Q> {
    check_lambda(lambda)?;
    check_budget(n)?;
    let classes = Classification::new(n)?;
    let values = classes
        .classes
        .par_iter()
        .map(|class| {
            let t = &class.canonical;
            let before = evaluate(rule, t)?;
            let mut best = Q::zero();
            for i in 0..n {
                for j in i + 1..n {
                    let after = evaluate(rule, &t.flip(i, j)?)?;
                    let w = ManipulationWitness::from_distributions(
                        t,
                        i,
                        j,
                        lambda.clone(),
                        &before,
                        &after,
                    );
                    if w.value > best {
                        best = w.value;
                    }
                }
            }
            Ok(best)
        })
        .collect::<Result<Vec<Q>>>()?;
    Ok(values.into_iter().max().unwrap_or_else(Q::zero))
}

fn check_lambda(lambda: &Q) -> Result<()> {
    if lambda.is_negative() {
        return Err(Error::Parameter(format!(
            "lambda must be nonnegative, got {lambda}"
        )));
    }
    Ok(())
}

pub fn min_lambda(rule: RuleId, n: usize) -> Result<(MinLambda, Option<ManipulationWitness>)> {
    check_budget(n)?;
    Ok(min_lambda_table(&RuleTable::from_rule(rule, n)?))
}

/// Least λ >= 0 with zero worst slack: infinite iff some flip gains jointly
/// with nobody losing, otherwise the largest `joint_gain / max_loss`.
pub fn min_lambda_table(table: &RuleTable) -> (MinLambda, Option<ManipulationWitness>) {
    let zero = Q::zero();
    let per_flip = |t: &Tournament, i, j, before, after| {
        let w = ManipulationWitness::from_distributions(t, i, j, zero.clone(), before, after);
        if !w.joint_gain.is_positive() {
            return None;
        }
        let ratio = if w.max_loss.is_positive() {
            Some(&w.joint_gain / &w.max_loss)
        } else {
            None
        };
        Some((ratio, w))
    };
    let candidates = flips(table, &per_flip).reduce_with(|a, b| {
        let order = match (&a.0, &b.0) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(x), Some(y)) => x.cmp(y),
        };
        match order {
            Ordering::Greater => a,
            Ordering::Less => b,
            Ordering::Equal if a.1.key() <= b.1.key() => a,
            Ordering::Equal => b,
        }
    });
    match candidates {
        None => (MinLambda::Finite(Q::zero()), None),
        Some((None, w)) => (MinLambda::Infinite, Some(w)),
        Some((Some(ratio), w)) => {
            let w = ManipulationWitness {
                value: &w.joint_gain - &ratio * &w.max_loss,
                lambda: ratio.clone(),
                ..w
            };
            (MinLambda::Finite(ratio), Some(w))
        }
    }
}

/// First flip in enumeration order violating `property`.
fn first_violation(
    table: &RuleTable,
    property: Property,
    lambda: &Q,
) -> Option<ManipulationWitness> {
    let n = table.n();
    (0..Tournament::count(n))
        .into_par_iter()
        .find_map_first(|code| {
            let t = Tournament::from_code(n, code).expect("valid code");
            for i in 0..n {
                for j in i + 1..n {
                    let before = table.by_code(code);
                    let after = table.by_code(flip_code(n, code, i, j));
                    // One-sided constraints are stated for the new winner `i`.
                    let (a, b) = if property == Property::OneSided && t.beats(i, j) {
                        (j, i)
                    } else {
                        (i, j)
                    };
                    let w = ManipulationWitness::from_distributions(
                        &t,
                        a,
                        b,
                        lambda.clone(),
                        before,
                        after,
                    );
                    if violates(property, &w) {
                        return Some(w);
                    }
                }
            }
            None
        })
}

fn report(
    property: Property,
    rule: Option<RuleId>,
    n: usize,
    w: Option<ManipulationWitness>,
) -> PropertyReport {
    PropertyReport::new(property, rule, n, w.map(Witness::Flip))
}

/// 2-PNM straight from its two-case definition.
pub fn check_pnm_table(table: &RuleTable) -> PropertyReport {
    report(
        Property::Pnm,
        None,
        table.n(),
        first_violation(table, Property::Pnm, &Q::zero()),
    )
}

/// 2-NM∞: a joint gain must cost one of the pair something.
pub fn check_nm_infinity_table(table: &RuleTable) -> PropertyReport {
    report(
        Property::NmInfinity,
        None,
        table.n(),
        first_violation(table, Property::NmInfinity, &Q::zero()),
    )
}

/// True max-form 2-NM_λ check, with the worst slack as `alpha`.
pub fn check_nm_lambda_table(table: &RuleTable, lambda: &Q) -> PropertyReport {
    let (alpha, worst) = worst_alpha_table(table, lambda);
    let witness = worst.filter(|w| w.value.is_positive());
    let mut r = report(Property::NmLambda, None, table.n(), witness);
    r.lambda = Some(lambda.clone());
    r.alpha = Some(alpha);
    r
}

pub fn check_pnm(rule: RuleId, n: usize) -> Result<PropertyReport> {
    with_rule(rule, n, check_pnm_table)
}

pub fn check_nm_infinity(rule: RuleId, n: usize) -> Result<PropertyReport> {
    with_rule(rule, n, check_nm_infinity_table)
}

pub fn check_snm(rule: RuleId, n: usize) -> Result<PropertyReport> {
    with_rule(rule, n, |table| {
        let mut r = check_nm_lambda_table(table, &Q::zero());
        r.property = Property::Snm;
        r
    })
}

fn with_rule(
    rule: RuleId,
    n: usize,
    check: impl Fn(&RuleTable) -> PropertyReport,
) -> Result<PropertyReport> {
    check_budget(n)?;
    let mut r = check(&RuleTable::from_rule(rule, n)?);
    r.rule = Some(rule);
    Ok(r)
}

/// Statement 2 of the monotone characterization: the new winner `i` of a
/// reversed match gains at most `(λ + 1)` times the new loser's loss.
///
/// Whenever the table is also monotone, 2-NM_λ is re-checked directly and
/// must hold; a failure there is a bug and panics.
pub fn check_one_sided_nm_table(table: &RuleTable, lambda: &Q) -> Result<PropertyReport> {
    if !lambda.is_positive() {
        return Err(Error::Parameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    let witness = first_violation(table, Property::OneSided, lambda);
    if witness.is_none() && super::check_monotone_table(table).holds {
        let nm = check_nm_lambda_table(table, lambda);
        assert!(
            nm.holds,
            "monotone and one-sided but not 2-NM_λ: {}",
            nm.witness.unwrap()
        );
    }
    let mut r = report(Property::OneSided, None, table.n(), witness);
    r.lambda = Some(lambda.clone());
    Ok(r)
}

pub fn check_one_sided_nm(rule: RuleId, n: usize, lambda: &Q) -> Result<PropertyReport> {
    check_budget(n)?;
    let mut r = check_one_sided_nm_table(&RuleTable::from_rule(rule, n)?, lambda)?;
    r.rule = Some(rule);
    Ok(r)
}

/// True iff every pair inside `t` has the same manipulation accounting in
/// `t` and in `pad(t, k)`.
pub fn dstc_gain_invariance(rule: RuleId, t: &Tournament, k: usize, lambda: &Q) -> Result<bool> {
    if k < t.n() {
        return Err(Error::Precondition(format!(
            "padding size {k} is below the tournament size {}",
            t.n()
        )));
    }
    let padded = t.pad(k)?;
    let (small, large) = (evaluate(rule, t)?, evaluate(rule, &padded)?);
    for i in 0..t.n() {
        for j in i + 1..t.n() {
            let a = ManipulationWitness::from_distributions(
                t,
                i,
                j,
                lambda.clone(),
                &small,
                &evaluate(rule, &t.flip(i, j)?)?,
            );
            let b = ManipulationWitness::from_distributions(
                &padded,
                i,
                j,
                lambda.clone(),
                &large,
                &evaluate(rule, &padded.flip(i, j)?)?,
            );
            let same = a.gain_i == b.gain_i
                && a.gain_j == b.gain_j
                && a.joint_gain == b.joint_gain
                && a.max_loss == b.max_loss
                && a.value == b.value;
            if !same {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{rkoth_gadget, superman_kryptonite};
    use crate::rational::{q, qi};

    #[test]
    fn rseb_on_superman_kryptonite() {
        let t = superman_kryptonite(4).unwrap();
        for lambda in [qi(0), qi(3)] {
            let w = manipulation_value(RuleId::Rseb, &t, 0, 3, &lambda).unwrap();
            assert_eq!((w.joint_gain.clone(), w.max_loss.clone()), (q(1, 3), qi(0)));
            assert_eq!(w.value, q(1, 3));
        }
    }

    #[test]
    fn rkoth_gadget_gain() {
        let w = manipulation_value(RuleId::Rkoth, &rkoth_gadget().unwrap(), 0, 4, &qi(0)).unwrap();
        assert_eq!(w.joint_gain, q(1, 10));
        assert_eq!(w.max_loss, qi(0));
    }

    #[test]
    fn reversing_negates_gains() {
        let t = superman_kryptonite(4).unwrap();
        let w = manipulation_value(RuleId::Icr, &t, 1, 3, &qi(1)).unwrap();
        let back = manipulation_value(RuleId::Icr, &w.flipped(), 1, 3, &qi(1)).unwrap();
        assert_eq!(back.gain_i, -w.gain_i);
        assert_eq!(back.gain_j, -w.gain_j);
    }

    #[test]
    fn worst_alpha_small_cases() {
        let (alpha, w) = worst_alpha(RuleId::Rseb, 3, &qi(0)).unwrap();
        assert_eq!(alpha, q(1, 3));
        let w = w.unwrap();
        assert!(w.flipped().condorcet_winner().is_some());
        assert_eq!(worst_alpha(RuleId::Tcr, 3, &qi(0)).unwrap().0, q(1, 3));
        for rule in RuleId::ALL {
            assert_eq!(worst_alpha(rule, 2, &qi(5)).unwrap().0, qi(0));
        }
    }

    #[test]
    fn min_lambda_examples() {
        assert_eq!(min_lambda(RuleId::Rseb, 4).unwrap().0, MinLambda::Infinite);
        assert_eq!(
            min_lambda(RuleId::Tcr, 3).unwrap().0,
            MinLambda::Finite(qi(1))
        );
        assert_eq!(
            min_lambda(RuleId::Tcr, 4).unwrap().0,
            MinLambda::Finite(qi(2))
        );
    }

    #[test]
    fn one_sided_examples() {
        assert!(check_one_sided_nm(RuleId::Tcr, 3, &qi(1)).unwrap().holds);
        let r = check_one_sided_nm(RuleId::Tcr, 4, &qi(1)).unwrap();
        assert!(!r.holds);
        assert!(r.replay_rule(RuleId::Tcr).unwrap());
        for rule in RuleId::ALL {
            assert!(check_one_sided_nm(rule, 2, &q(1, 7)).unwrap().holds);
        }
    }

    #[test]
    fn pnm_examples() {
        assert!(check_pnm(RuleId::Tcr, 4).unwrap().holds);
        assert!(check_pnm(RuleId::Icr, 4).unwrap().holds);
    }

    #[test]
    fn gain_invariance_examples() {
        let cycle: Tournament = "3:101".parse().unwrap();
        assert!(dstc_gain_invariance(RuleId::Tcr, &cycle, 5, &qi(0)).unwrap());
        assert!(dstc_gain_invariance(RuleId::Tcr, &cycle, 2, &qi(0)).is_err());
    }
}
