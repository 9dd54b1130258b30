//! Closed forms behind the lower-bound constructions, and their comparison
//! with the exact rule implementations.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::analysis::manipulation_value;
use crate::construct::{construct, Family};
use crate::error::{Error, Result};
use crate::rational::{binomial, q, qi, Q};
use crate::rules::{evaluate, RuleId};
use crate::tournament::Tournament;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    pub rule: RuleId,
    pub family: Family,
    pub n: usize,
    /// Bracket size exponent for the padded RSEB forms.
    pub m: Option<usize>,
    pub alpha: Q,
    pub quantities: Vec<(&'static str, Q)>,
}

impl ClosedForm {
    pub fn get(&self, name: &str) -> Option<&Q> {
        self.quantities
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| v)
    }

    fn new(rule: RuleId, family: Family, n: usize, alpha: &Q) -> Self {
        ClosedForm {
            rule,
            family,
            n,
            m: None,
            alpha: alpha.clone(),
            quantities: Vec::new(),
        }
    }

    fn with(mut self, name: &'static str, value: Q) -> Self {
        self.quantities.push((name, value));
        self
    }
}

fn uncovered(rule: RuleId, family: Family, n: usize) -> Error {
    Error::Parameter(format!(
        "no closed form for {rule} on {family} with n = {n}"
    ))
}

fn log2_exact(n: usize) -> Option<usize> {
    (n.is_power_of_two() && n >= 2).then(|| n.trailing_zeros() as usize)
}

fn ratio(num: BigInt, den: BigInt) -> Q {
    Q::new(num, den)
}

/// `(1 - gainer - α) / loser - 1`: the smallest λ that keeps the flip from paying.
fn implied_lambda(gainer: &Q, loser: &Q, alpha: &Q) -> Q {
    (Q::one() - gainer - alpha) / loser - Q::one()
}

/// The printed formulas at size `n`. Rules without a finite λ bound carry an
/// `alpha_bound` instead of a `lambda_bound`.
pub fn closed_form(rule: RuleId, family: Family, n: usize, alpha: &Q) -> Result<ClosedForm> {
    let nq = qi(n as i64);
    let one = Q::one();
    let two = qi(2);
    let pairs = &nq * (&nq - &one);
    let base = ClosedForm::new(rule, family, n, alpha);
    let sk = family == Family::SupermanKryptonite;
    let form = match rule {
        _ if sk && n < 3 => return Err(uncovered(rule, family, n)),
        RuleId::Icr if sk => base
            .with("r_superman", q(1, 2) - &one / &pairs)
            .with("r_kryptonite", &two / &pairs)
            .with("lambda_bound", (q(1, 4) - alpha / &two) * &pairs - q(1, 2)),
        RuleId::Rdm if sk => base
            .with("r_superman", &one - &two / &nq)
            .with("r_kryptonite", &two / &pairs)
            .with(
                "lambda_bound",
                (&one - &nq * alpha / &two) * (&nq - &one) - &one,
            ),
        RuleId::Rvc if sk => base
            .with("r_superman", q(1, 2) - &one / &pairs)
            .with("r_kryptonite", &one / &nq)
            .with(
                "lambda_bound",
                (q(1, 2) - alpha) * &nq - (&nq - &two) / (&nq - &one),
            ),
        RuleId::Tcr if sk => base
            .with("r_superman", &one / &nq)
            .with("r_kryptonite", &one / &nq)
            .with("lambda_bound", (&one - alpha) * &nq - &two),
        RuleId::Rseb if sk => {
            let h = log2_exact(n)
                .filter(|&h| h >= 2)
                .ok_or_else(|| uncovered(rule, family, n))?;
            return rseb_padded_form(h, h, alpha);
        }
        RuleId::Pr if sk && n == 4 => base
            .with("r_superman", q(4, 13))
            .with("r_kryptonite", q(4, 13))
            .with("alpha_bound", q(1, 13)),
        RuleId::Rkoth if family == Family::RkothGadget && n == 5 => {
            base.with("alpha_bound", q(1, 10))
        }
        RuleId::Prsl if family == Family::PrslCycle && n >= 5 && n % 2 == 1 => {
            let d = &two * (&nq - &two) / (&nq - &one)
                + (&nq - &two) * (&nq + &one) / (&two * (&nq - &one))
                + &one;
            let cycle = (&nq + &one) / (&two * (&nq - &one)) / &d;
            let top = &two * (&nq - &two) / (&nq - &one) / &d;
            let bottom = &one / &d;
            let exact = implied_lambda(&top, &bottom, alpha);
            base.with("r_cycle", cycle)
                .with("r_top", top)
                .with("r_bottom", bottom)
                .with("lambda_bound_exact", exact)
                .with(
                    "lambda_bound",
                    (&one - alpha) * (&nq - &two) * (&nq + &one) / (&two * (&nq - &one))
                        - qi(3) * alpha,
                )
        }
        _ => return Err(uncovered(rule, family, n)),
    };
    Ok(form)
}

/// RSEB on the superman-kryptonite tournament with `2^h` agents, padded with
/// losers to a bracket of `2^m`.
pub fn rseb_padded_form(h: usize, m: usize, alpha: &Q) -> Result<ClosedForm> {
    let loss = rseb_superman_loss(h, m)?;
    let kryptonite = rseb_kryptonite_prob(h, m)?;
    let mut form = ClosedForm::new(RuleId::Rseb, Family::SupermanKryptonite, 1 << h, alpha);
    form.m = Some(m);
    Ok(form
        .with("r_superman", Q::one() - &loss)
        .with("alpha_bound", &loss - &kryptonite)
        .with("r_kryptonite", kryptonite))
}

fn check_hm(h: usize, m: usize) -> Result<()> {
    if h < 1 || m < h || m > 12 {
        return Err(Error::Parameter(format!(
            "need 1 <= h <= m <= 12, got h = {h}, m = {m}"
        )));
    }
    Ok(())
}

/// Probability that the kryptonite of the `2^h`-agent tournament wins a
/// bracket of `2^m` padded with losers.
pub fn rseb_kryptonite_prob(h: usize, m: usize) -> Result<Q> {
    check_hm(h, m)?;
    let n = 1u64 << h;
    let mut r = Q::zero();
    for level in h + 1..=m {
        let size = 1u64 << level;
        let half = size / 2;
        let direct = binomial(size - n, half - 1);
        let nested = if half >= n {
            binomial(size - n, half - n)
        } else {
            BigInt::zero()
        };
        r = (Q::from_integer(direct) + Q::from_integer(nested) * &r) * qi(2)
            / Q::from_integer(binomial(size, half));
    }
    Ok(r)
}

/// `1 - r_1` for the superman in the same padded bracket.
pub fn rseb_superman_loss(h: usize, m: usize) -> Result<Q> {
    check_hm(h, m)?;
    if h < 2 {
        return Err(Error::Parameter(
            "the superman-kryptonite bracket needs h >= 2".into(),
        ));
    }
    let size = 1u64 << m;
    let n = 1u64 << h;
    Ok((0..m)
        .map(|k| {
            let block = 1u64 << k;
            ratio(binomial(size - n, block - 1), binomial(size - 1, block))
        })
        .sum())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSum {
    pub sum: Q,
    /// Least `ℓ` whose partial sum reaches `1 / (3n)`.
    pub least_ell: usize,
}

const SERIES_SEARCH_LIMIT: usize = 4096;

fn series_term(n: usize, k: usize) -> Q {
    let half = Q::new(BigInt::one(), BigInt::one() << k);
    num_traits::pow(Q::one() - &half, n - 2) * half
}

/// `Σ_{k=1}^{ℓ} (1 - 2^{-k})^{n-2} 2^{-k}` for `n` a power of two.
pub fn series_partial_sum(n: usize, ell: usize) -> Result<SeriesSum> {
    if log2_exact(n).is_none() || ell == 0 {
        return Err(Error::Parameter(format!(
            "need n a power of two >= 2 and ell >= 1, got n = {n}, ell = {ell}"
        )));
    }
    let sum = (1..=ell).map(|k| series_term(n, k)).sum();
    let target = Q::new(BigInt::one(), BigInt::from(3 * n));
    let mut acc = Q::zero();
    let least_ell = (1..=SERIES_SEARCH_LIMIT)
        .find(|&k| {
            acc += series_term(n, k);
            acc >= target
        })
        .ok_or_else(|| Error::Budget(format!("no ell <= {SERIES_SEARCH_LIMIT} reaches 1/(3n)")))?;
    Ok(SeriesSum { sum, least_ell })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tradeoff {
    /// Every `2-NM_λ-α` guarantee needs at least this λ.
    Lambda(Q),
    /// Manipulable regardless of λ unless α is at least this.
    Alpha(Q),
}

impl fmt::Display for Tradeoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tradeoff::Lambda(v) => write!(f, "lambda >= {v}"),
            Tradeoff::Alpha(v) => write!(f, "alpha >= {v}"),
        }
    }
}

pub fn lambda_alpha_tradeoff(rule: RuleId, n: usize, alpha: &Q) -> Result<Tradeoff> {
    let range = |ok: bool| {
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "the {rule} bound does not cover n = {n}"
            )))
        }
    };
    match rule {
        RuleId::Icr | RuleId::Rdm | RuleId::Rvc | RuleId::Tcr => {
            let form = closed_form(rule, Family::SupermanKryptonite, n, alpha)?;
            Ok(Tradeoff::Lambda(form.get("lambda_bound").unwrap().clone()))
        }
        RuleId::Prsl => {
            range(n >= 5 && n % 2 == 1)?;
            let form = closed_form(rule, Family::PrslCycle, n, alpha)?;
            Ok(Tradeoff::Lambda(form.get("lambda_bound").unwrap().clone()))
        }
        RuleId::Rseb => {
            range(log2_exact(n).is_some_and(|h| h >= 2))?;
            Ok(Tradeoff::Alpha(Q::new(BigInt::one(), BigInt::from(n - 1))))
        }
        RuleId::Rkoth => {
            range(n >= 5)?;
            Ok(Tradeoff::Alpha(q(1, 10)))
        }
        RuleId::Pr => {
            range(n >= 4)?;
            Ok(Tradeoff::Alpha(q(1, 13)))
        }
    }
}

/// One closed-form quantity next to the value the exact rule produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub rule: RuleId,
    pub family: Family,
    pub n: usize,
    pub m: Option<usize>,
    pub quantity: &'static str,
    pub oracle: Q,
    pub implementation: Q,
    /// The oracle is a printed relaxation, so it only has to stay below.
    pub lower_bound: bool,
}

impl BoundRow {
    pub const CSV_HEADER: [&'static str; 7] = [
        "rule",
        "family",
        "n",
        "quantity",
        "oracle",
        "implementation",
        "match",
    ];

    pub fn matches(&self) -> bool {
        if self.lower_bound {
            self.oracle <= self.implementation
        } else {
            self.oracle == self.implementation
        }
    }

    pub fn csv_record(&self) -> [String; 7] {
        let n = match self.m {
            Some(m) => format!("{} (bracket {})", self.n, 1usize << m),
            None => self.n.to_string(),
        };
        [
            self.rule.to_string(),
            self.family.to_string(),
            n,
            self.quantity.to_string(),
            self.oracle.to_string(),
            self.implementation.to_string(),
            self.matches().to_string(),
        ]
    }
}

/// The tournament a form describes, and the manipulating pair (gainer first).
fn instance(form: &ClosedForm) -> Result<(Tournament, usize, usize)> {
    let param = if form.family == Family::PrslCycle {
        (form.n - 1) / 2
    } else {
        form.n
    };
    let mut t = construct(form.family, param)?;
    if let Some(m) = form.m {
        t = t.pad(1 << m)?;
    }
    let n = form.n;
    let pair = match (form.rule, form.family) {
        (RuleId::Pr, _) => (2, 0),
        (RuleId::Rkoth, _) => (0, 4),
        (_, Family::PrslCycle) => (n - 2, n - 1),
        _ => (0, n - 1),
    };
    Ok((t, pair.0, pair.1))
}

/// Recomputes every quantity of `form` from the exact rule implementation.
pub fn cross_check(form: &ClosedForm) -> Result<Vec<BoundRow>> {
    let (t, gainer, loser) = instance(form)?;
    let dist = evaluate(form.rule, &t)?;
    let n = form.n;
    let w = manipulation_value(form.rule, &t, gainer, loser, &Q::zero())?;
    form.quantities
        .iter()
        .map(|(name, oracle)| {
            let implementation = match *name {
                "r_superman" => dist.prob(0).clone(),
                "r_kryptonite" => dist.prob(n - 1).clone(),
                "r_cycle" => dist.prob(0).clone(),
                "r_top" => dist.prob(n - 2).clone(),
                "r_bottom" => dist.prob(n - 1).clone(),
                "alpha_bound" => w.joint_gain.clone(),
                "lambda_bound" | "lambda_bound_exact" => {
                    implied_lambda(dist.prob(gainer), dist.prob(loser), &form.alpha)
                }
                other => unreachable!("unknown quantity {other}"),
            };
            Ok(BoundRow {
                rule: form.rule,
                family: form.family,
                n,
                m: form.m,
                quantity: name,
                oracle: oracle.clone(),
                implementation,
                lower_bound: form.rule == RuleId::Prsl && *name == "lambda_bound",
            })
        })
        .collect()
}

/// Every covered form up to six agents (RSEB brackets up to sixteen), at `α`.
pub fn reproduction_forms(alpha: &Q) -> Result<Vec<ClosedForm>> {
    let mut forms = Vec::new();
    for rule in [RuleId::Icr, RuleId::Rdm, RuleId::Rvc, RuleId::Tcr] {
        for n in 3..=6 {
            forms.push(closed_form(rule, Family::SupermanKryptonite, n, alpha)?);
        }
    }
    forms.push(closed_form(RuleId::Prsl, Family::PrslCycle, 5, alpha)?);
    forms.push(closed_form(
        RuleId::Pr,
        Family::SupermanKryptonite,
        4,
        alpha,
    )?);
    forms.push(closed_form(RuleId::Rkoth, Family::RkothGadget, 5, alpha)?);
    for m in 2..=4 {
        forms.push(rseb_padded_form(2, m, alpha)?);
    }
    Ok(forms)
}

pub fn reproduction_rows(alpha: &Q) -> Result<Vec<BoundRow>> {
    let mut rows = Vec::new();
    for form in reproduction_forms(alpha)? {
        rows.extend(cross_check(&form)?);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    #[test]
    fn icr_at_four() {
        let f = closed_form(RuleId::Icr, Family::SupermanKryptonite, 4, &Q::zero()).unwrap();
        assert_eq!(f.get("r_superman"), Some(&q(5, 12)));
        assert_eq!(f.get("r_kryptonite"), Some(&q(1, 6)));
        assert_eq!(f.get("lambda_bound"), Some(&q(5, 2)));
    }

    #[test]
    fn tcr_general() {
        for n in 3..10 {
            let f = closed_form(RuleId::Tcr, Family::SupermanKryptonite, n, &Q::zero()).unwrap();
            assert_eq!(f.get("r_superman"), Some(&q(1, n as i64)));
            assert_eq!(f.get("lambda_bound"), Some(&qi(n as i64 - 2)));
        }
    }

    #[test]
    fn prsl_at_five() {
        let f = closed_form(RuleId::Prsl, Family::PrslCycle, 5, &Q::zero()).unwrap();
        assert_eq!(f.get("r_cycle"), Some(&q(3, 19)));
        assert_eq!(f.get("r_top"), Some(&q(6, 19)));
        assert_eq!(f.get("r_bottom"), Some(&q(4, 19)));
        assert!(f.get("lambda_bound_exact").unwrap() >= f.get("lambda_bound").unwrap());
    }

    #[test]
    fn printed_lambda_matches_ratio() {
        let alpha = q(1, 20);
        for rule in [RuleId::Icr, RuleId::Rdm, RuleId::Rvc, RuleId::Tcr] {
            for n in 3..9 {
                let f = closed_form(rule, Family::SupermanKryptonite, n, &alpha).unwrap();
                let ratio = implied_lambda(
                    f.get("r_superman").unwrap(),
                    f.get("r_kryptonite").unwrap(),
                    &alpha,
                );
                assert_eq!(f.get("lambda_bound"), Some(&ratio), "{rule} n={n}");
            }
        }
    }

    #[test]
    fn uncovered_pairs() {
        assert!(closed_form(RuleId::Icr, Family::RkothGadget, 5, &Q::zero()).is_err());
        assert!(closed_form(RuleId::Prsl, Family::PrslCycle, 6, &Q::zero()).is_err());
        assert!(closed_form(RuleId::Rseb, Family::SupermanKryptonite, 6, &Q::zero()).is_err());
        assert!(closed_form(RuleId::Tcr, Family::SupermanKryptonite, 2, &Q::zero()).is_err());
    }

    #[test]
    fn kryptonite_recurrence() {
        assert_eq!(rseb_kryptonite_prob(2, 2).unwrap(), Q::zero());
        assert_eq!(rseb_kryptonite_prob(2, 3).unwrap(), q(4, 35));
        for m in 2..=5 {
            assert!(rseb_kryptonite_prob(2, m).unwrap() <= q(1, 7));
        }
        assert!(rseb_kryptonite_prob(3, 2).is_err());
    }

    #[test]
    fn superman_loss() {
        assert_eq!(rseb_superman_loss(2, 2).unwrap(), q(1, 3));
        let v = rseb_superman_loss(2, 3).unwrap();
        assert!(v.is_positive() && v < Q::one());
        assert!(rseb_superman_loss(1, 1).is_err());
    }

    #[test]
    fn series() {
        let s = series_partial_sum(4, 1).unwrap();
        assert_eq!((s.sum, s.least_ell), (q(1, 8), 1));
        assert_eq!(series_partial_sum(4, 3).unwrap().sum, q(185, 512));
        let s8 = series_partial_sum(8, 1).unwrap();
        let reached: Q = (1..=s8.least_ell).map(|k| series_term(8, k)).sum();
        assert!(reached >= q(1, 24));
        assert!(series_partial_sum(6, 1).is_err());
    }

    #[test]
    fn tradeoffs() {
        assert_eq!(
            lambda_alpha_tradeoff(RuleId::Rkoth, 7, &Q::zero()).unwrap(),
            Tradeoff::Alpha(q(1, 10))
        );
        assert_eq!(
            lambda_alpha_tradeoff(RuleId::Pr, 4, &Q::zero()).unwrap(),
            Tradeoff::Alpha(q(1, 13))
        );
        let alpha = q(1, 100);
        let n = 7;
        let expected = (Q::one() - qi(n) * &alpha / qi(2)) * qi(n - 1) - Q::one();
        assert_eq!(
            lambda_alpha_tradeoff(RuleId::Rdm, n as usize, &alpha).unwrap(),
            Tradeoff::Lambda(expected)
        );
        assert!(lambda_alpha_tradeoff(RuleId::Rkoth, 4, &Q::zero()).is_err());
    }

    #[test]
    fn oracles_agree_with_rules() {
        for row in reproduction_rows(&Q::zero()).unwrap() {
            assert!(row.matches(), "{:?}", row.csv_record());
        }
    }
}
