//! Explicit rules on every labeled tournament of one size.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{parse_q, Q};
use crate::rules::{evaluate, RuleId, WinDistribution};
use crate::tournament::Tournament;

/// Largest size for which a full table is materialized.
pub const TABLE_MAX_AGENTS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleTable {
    n: usize,
    lambda: Q,
    /// Indexed by [`Tournament::code`].
    entries: Vec<WinDistribution>,
}

fn check_table_size(n: usize) -> Result<()> {
    if n == 0 || n > TABLE_MAX_AGENTS {
        return Err(Error::Budget(format!(
            "rule tables support 1..={TABLE_MAX_AGENTS} agents, got {n}"
        )));
    }
    Ok(())
}

impl RuleTable {
    pub fn new(n: usize, lambda: Q, entries: Vec<WinDistribution>) -> Result<Self> {
        check_table_size(n)?;
        if entries.len() as u128 != Tournament::count(n) {
            return Err(Error::Table(format!(
                "expected {} entries, got {}",
                Tournament::count(n),
                entries.len()
            )));
        }
        if let Some(d) = entries.iter().find(|d| d.n() != n) {
            return Err(Error::Table(format!(
                "distribution over {} agents in a table for {n}",
                d.n()
            )));
        }
        Ok(RuleTable { n, lambda, entries })
    }

    /// Evaluates `f` on every labeled tournament, in parallel.
    pub fn from_fn<F>(n: usize, lambda: Q, f: F) -> Result<Self>
    where
        F: Fn(&Tournament) -> Result<WinDistribution> + Sync,
    {
        check_table_size(n)?;
        let entries = (0..Tournament::count(n))
            .into_par_iter()
            .map(|code| f(&Tournament::from_code(n, code)?))
            .collect::<Result<Vec<_>>>()?;
        RuleTable::new(n, lambda, entries)
    }

    /// The rule materialized on all tournaments of size `n`, with λ = 0.
    pub fn from_rule(rule: RuleId, n: usize) -> Result<Self> {
        Self::from_fn(n, Q::from_integer(0.into()), |t| evaluate(rule, t))
    }

    pub fn with_lambda(mut self, lambda: Q) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> &Q {
        &self.lambda
    }

    pub fn get(&self, t: &Tournament) -> &WinDistribution {
        assert_eq!(t.n(), self.n, "tournament size does not match the table");
        &self.entries[t.code() as usize]
    }

    pub fn by_code(&self, code: u128) -> &WinDistribution {
        &self.entries[code as usize]
    }

    pub fn entries(&self) -> &[WinDistribution] {
        &self.entries
    }

    /// Text form: a `n=.. λ=p/q` header, then `compact distribution` per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("n={} λ={}\n", self.n, self.lambda);
        for (code, d) in self.entries.iter().enumerate() {
            let t = Tournament::from_code(self.n, code as u128).expect("valid code");
            writeln!(out, "{} {}", t.to_compact(), d).unwrap();
        }
        out
    }

    /// Parses [`RuleTable::to_text`] output. Lines may come in any order, but
    /// every tournament must appear exactly once.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::MalformedHeader("empty rule table".into()))?;
        let (n, lambda) = parse_header(header)?;
        check_table_size(n)?;
        let mut entries: Vec<Option<WinDistribution>> = vec![None; Tournament::count(n) as usize];
        for line in lines {
            let (compact, dist) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| Error::Table(format!("line {line:?} has no distribution")))?;
            let t: Tournament = compact.parse()?;
            if t.n() != n {
                return Err(Error::Table(format!("{compact} does not have {n} agents")));
            }
            let d: WinDistribution = dist.parse()?;
            if d.n() != n {
                return Err(Error::Table(format!(
                    "{compact} has {} probabilities, expected {n}",
                    d.n()
                )));
            }
            let slot = &mut entries[t.code() as usize];
            if slot.is_some() {
                return Err(Error::Table(format!("{compact} appears twice")));
            }
            *slot = Some(d);
        }
        let entries = entries
            .into_iter()
            .enumerate()
            .map(|(code, d)| {
                d.ok_or_else(|| {
                    let t = Tournament::from_code(n, code as u128).expect("valid code");
                    Error::Table(format!("missing tournament {}", t.to_compact()))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        RuleTable::new(n, lambda, entries)
    }
}

fn parse_header(header: &str) -> Result<(usize, Q)> {
    let bad = || Error::MalformedHeader(header.to_string());
    let mut n = None;
    let mut lambda = None;
    for field in header.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(bad)?;
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|_| bad())?),
            "λ" | "lambda" => lambda = Some(parse_q(value)?),
            _ => return Err(bad()),
        }
    }
    Ok((n.ok_or_else(bad)?, lambda.ok_or_else(bad)?))
}
