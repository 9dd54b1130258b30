//! Tournaments as packed orientation matrices.
//!
//! Agents are 0-based internally. Text formats and `Display` impls print
//! them 1-based.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::MAX_AGENTS;

/// A subset of agents stored as a bitmask (bit `a` set iff agent `a` is a member).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentSet(u32);

impl AgentSet {
    pub const EMPTY: AgentSet = AgentSet(0);

    pub fn from_bits(bits: u32) -> Self {
        AgentSet(bits)
    }

    pub fn full(n: usize) -> Self {
        AgentSet(if n >= 32 { u32::MAX } else { (1u32 << n) - 1 })
    }

    pub fn singleton(a: usize) -> Self {
        AgentSet(1 << a)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn contains(self, a: usize) -> bool {
        self.0 >> a & 1 == 1
    }

    pub fn insert(&mut self, a: usize) {
        self.0 |= 1 << a;
    }

    pub fn remove(&mut self, a: usize) {
        self.0 &= !(1 << a);
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: AgentSet) -> AgentSet {
        AgentSet(self.0 | other.0)
    }

    pub fn intersection(self, other: AgentSet) -> AgentSet {
        AgentSet(self.0 & other.0)
    }

    pub fn difference(self, other: AgentSet) -> AgentSet {
        AgentSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: AgentSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let a = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(a)
            }
        })
    }
}

impl FromIterator<usize> for AgentSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut set = AgentSet::EMPTY;
        for a in iter {
            set.insert(a);
        }
        set
    }
}

impl fmt::Display for AgentSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|a| (a + 1).to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// Index of the unordered pair `(i, j)`, `i < j`, in row-major upper-triangle order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// A complete asymmetric relation on `n` agents. `rows[i]` has bit `j`
/// set iff `i` beats `j`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Tournament {
    n: usize,
    rows: Vec<u32>,
}

impl Tournament {
    /// Transitive tournament in which lower indices beat higher ones.
    pub fn transitive(n: usize) -> Result<Self> {
        Self::from_fn(n, |_, _| true)
    }

    /// Builds a tournament from `wins(i, j)` for every `i < j`
    /// (true iff `i` beats `j`).
    pub fn from_fn(n: usize, mut wins: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        check_size(n)?;
        let mut rows = vec![0u32; n];
        for i in 0..n {
            for j in i + 1..n {
                if wins(i, j) {
                    rows[i] |= 1 << j;
                } else {
                    rows[j] |= 1 << i;
                }
            }
        }
        Ok(Tournament { n, rows })
    }

    /// Builds the tournament whose upper-triangle bits are the binary counter
    /// value `code` (bit `pair_index(i, j)` set iff `i` beats `j`).
    pub fn from_code(n: usize, code: u128) -> Result<Self> {
        check_size(n)?;
        let pairs = pair_count(n);
        if pairs < 128 && code >> pairs != 0 {
            return Err(Error::Parameter(format!(
                "code {code} has more than {pairs} bits"
            )));
        }
        let mut k = 0;
        Self::from_fn(n, |_, _| {
            let bit = code >> k & 1 == 1;
            k += 1;
            bit
        })
    }

    /// Builds a tournament from a full boolean matrix, validating both invariants.
    pub fn from_matrix(matrix: &[Vec<bool>]) -> Result<Self> {
        let n = matrix.len();
        check_size(n)?;
        for (row, line) in matrix.iter().enumerate() {
            if line.len() != n {
                return Err(Error::RowLength {
                    row,
                    found: line.len(),
                    expected: n,
                });
            }
        }
        for i in 0..n {
            if matrix[i][i] {
                return Err(Error::Diagonal(i));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if matrix[i][j] == matrix[j][i] {
                    return Err(Error::Asymmetry(i, j));
                }
            }
        }
        Self::from_fn(n, |i, j| matrix[i][j])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beats(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    /// Agents beaten by `i`.
    pub fn victims(&self, i: usize) -> AgentSet {
        AgentSet(self.rows[i])
    }

    /// Agents that beat `i`.
    pub fn conquerors(&self, i: usize) -> AgentSet {
        AgentSet(
            (0..self.n)
                .filter(|&k| self.beats(k, i))
                .fold(0, |acc, k| acc | 1 << k),
        )
    }

    pub fn score(&self, i: usize) -> usize {
        self.rows[i].count_ones() as usize
    }

    pub fn agents(&self) -> AgentSet {
        AgentSet::full(self.n)
    }

    /// Winner of the match between `i` and `j`.
    pub fn winner(&self, i: usize, j: usize) -> usize {
        if self.beats(i, j) {
            i
        } else {
            j
        }
    }

    /// Upper-triangle encoding; inverse of [`Tournament::from_code`].
    pub fn code(&self) -> u128 {
        let mut code = 0u128;
        let mut k = 0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.beats(i, j) {
                    code |= 1 << k;
                }
                k += 1;
            }
        }
        code
    }

    /// Number of labeled tournaments on `n` agents.
    pub fn count(n: usize) -> u128 {
        1u128 << pair_count(n)
    }

    /// Every labeled tournament on `n` agents, ordered by [`Tournament::code`].
    pub fn all(n: usize) -> Result<impl Iterator<Item = Tournament>> {
        check_size(n)?;
        Ok((0..Self::count(n))
            .map(move |code| Tournament::from_code(n, code).expect("code within range")))
    }

    fn check_agent(&self, a: usize) -> Result<()> {
        if a < self.n {
            Ok(())
        } else {
            Err(Error::AgentOutOfRange {
                agent: a,
                n: self.n,
            })
        }
    }

    /// The unique distinct `{i, j}`-adjacent tournament: the `(i, j)` match reversed.
    pub fn flip(&self, i: usize, j: usize) -> Result<Tournament> {
        self.check_agent(i)?;
        self.check_agent(j)?;
        if i == j {
            return Err(Error::SameAgent(i));
        }
        let mut rows = self.rows.clone();
        rows[i] ^= 1 << j;
        rows[j] ^= 1 << i;
        Ok(Tournament { n: self.n, rows })
    }

    /// `T|_S`, with the members of `S` relabeled `0..|S|` in increasing order.
    pub fn restrict(&self, set: AgentSet) -> Tournament {
        let members: Vec<usize> = set.iter().filter(|&a| a < self.n).collect();
        let m = members.len();
        let mut rows = vec![0u32; m];
        for (x, &a) in members.iter().enumerate() {
            for (y, &b) in members.iter().enumerate() {
                if self.beats(a, b) {
                    rows[x] |= 1 << y;
                }
            }
        }
        Tournament { n: m, rows }
    }

    /// Embeds `self` as a dominant sub-tournament of a `k`-agent tournament.
    /// Added agents lose to every original agent and are ordered
    /// transitively by index among themselves.
    pub fn pad(&self, k: usize) -> Result<Tournament> {
        if k < self.n {
            return Err(Error::PadTooSmall { n: self.n, k });
        }
        check_size(k)?;
        let n = self.n;
        Tournament::from_fn(k, |i, j| if j < n { self.beats(i, j) } else { true })
    }

    /// Relabels agents: agent `a` becomes agent `perm[a]`.
    pub fn relabel(&self, perm: &[usize]) -> Tournament {
        debug_assert_eq!(perm.len(), self.n);
        let mut rows = vec![0u32; self.n];
        for a in 0..self.n {
            for b in self.victims(a).iter() {
                rows[perm[a]] |= 1 << perm[b];
            }
        }
        Tournament { n: self.n, rows }
    }

    /// The agent beating everybody else, if any.
    pub fn condorcet_winner(&self) -> Option<usize> {
        (0..self.n).find(|&i| self.score(i) == self.n - 1)
    }

    /// Agents sorted by decreasing score, ties by index.
    fn by_score(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n).collect();
        order.sort_by_key(|&a| (std::cmp::Reverse(self.score(a)), a));
        order
    }

    /// Nonempty proper dominant subsets, smallest first.
    ///
    /// A set of size `k` is dominant iff its score total equals
    /// `C(k,2) + k(n-k)`; dominant sets are prefixes of the score order,
    /// which are the unions of the leading strongly connected components.
    pub fn dominant_subsets(&self) -> Vec<AgentSet> {
        let order = self.by_score();
        let n = self.n;
        let mut out = Vec::new();
        let mut set = AgentSet::EMPTY;
        let mut total = 0;
        for (idx, &a) in order.iter().enumerate().take(n.saturating_sub(1)) {
            set.insert(a);
            total += self.score(a);
            let k = idx + 1;
            if total == k * (k - 1) / 2 + k * (n - k) {
                out.push(set);
            }
        }
        out
    }

    /// The minimal dominant set of agents.
    pub fn top_cycle(&self) -> AgentSet {
        self.dominant_subsets()
            .into_iter()
            .next()
            .unwrap_or_else(|| self.agents())
    }

    /// True iff every member of `set` beats every non-member.
    pub fn is_dominant(&self, set: AgentSet) -> bool {
        let outside = self.agents().difference(set);
        set.iter().all(|a| outside.is_subset(self.victims(a)))
    }

    /// True iff `i` covers `j`: `i` beats `j` and everyone `j` beats.
    pub fn covers(&self, i: usize, j: usize) -> bool {
        i != j && self.beats(i, j) && self.victims(j).is_subset(self.victims(i))
    }

    pub fn covered_agents(&self) -> AgentSet {
        (0..self.n)
            .filter(|&j| (0..self.n).any(|i| self.covers(i, j)))
            .collect()
    }

    /// True iff `T|_set` is strongly connected.
    pub fn is_strongly_connected_on(&self, set: AgentSet) -> bool {
        let Some(start) = set.iter().next() else {
            return true;
        };
        let reach = |forward: bool| {
            let mut seen = AgentSet::singleton(start);
            let mut stack = vec![start];
            while let Some(a) = stack.pop() {
                let next = if forward {
                    self.victims(a)
                } else {
                    self.conquerors(a)
                };
                for b in next.intersection(set).difference(seen).iter() {
                    seen.insert(b);
                    stack.push(b);
                }
            }
            seen
        };
        reach(true) == set && reach(false) == set
    }

    /// Compact one-line form: `n:` followed by the upper-triangle bits.
    pub fn to_compact(&self) -> String {
        let mut s = format!("{}:", self.n);
        for i in 0..self.n {
            for j in i + 1..self.n {
                s.push(if self.beats(i, j) { '1' } else { '0' });
            }
        }
        s
    }

    /// Matrix file form: the agent count, then one `0`/`1` row per agent.
    pub fn to_matrix_string(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                s.push(if self.beats(i, j) { '1' } else { '0' });
            }
            s.push('\n');
        }
        s
    }

    /// Parses the matrix form or the compact form.
    pub fn parse(text: &str) -> Result<Tournament> {
        let text = text.trim();
        let first_line = text.lines().next().unwrap_or("").trim();
        if let Some((head, bits)) = first_line.split_once(':') {
            if text.lines().filter(|l| !l.trim().is_empty()).count() != 1 {
                return Err(Error::MalformedHeader(
                    "compact form must be a single line".into(),
                ));
            }
            return parse_compact(head.trim(), bits.trim());
        }
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().unwrap_or("");
        let n: usize = header
            .parse()
            .map_err(|_| Error::MalformedHeader(header.to_string()))?;
        check_size(n)?;
        let rows: Vec<&str> = lines.collect();
        if rows.len() != n {
            return Err(Error::MalformedHeader(format!(
                "expected {n} rows, found {}",
                rows.len()
            )));
        }
        let mut matrix = vec![vec![false; n]; n];
        for (i, row) in rows.iter().enumerate() {
            let chars: Vec<char> = row.chars().collect();
            if chars.len() != n {
                return Err(Error::RowLength {
                    row: i,
                    found: chars.len(),
                    expected: n,
                });
            }
            for (j, &ch) in chars.iter().enumerate() {
                matrix[i][j] = match ch {
                    '0' => false,
                    '1' => true,
                    _ => return Err(Error::BadChar { row: i, col: j, ch }),
                };
            }
        }
        Tournament::from_matrix(&matrix)
    }
}

fn parse_compact(head: &str, bits: &str) -> Result<Tournament> {
    let n: usize = head
        .parse()
        .map_err(|_| Error::MalformedHeader(head.to_string()))?;
    check_size(n)?;
    let chars: Vec<char> = bits.chars().collect();
    let expected = pair_count(n);
    if chars.len() != expected {
        return Err(Error::MalformedHeader(format!(
            "compact form for {n} agents needs {expected} bits, found {}",
            chars.len()
        )));
    }
    for (k, &ch) in chars.iter().enumerate() {
        if ch != '0' && ch != '1' {
            return Err(Error::MalformedHeader(format!(
                "bit {} is {ch:?}, expected 0 or 1",
                k + 1
            )));
        }
    }
    Tournament::from_fn(n, |i, j| chars[pair_index(n, i, j)] == '1')
}

fn check_size(n: usize) -> Result<()> {
    if (1..=MAX_AGENTS).contains(&n) {
        Ok(())
    } else {
        Err(Error::Size(n))
    }
}

impl FromStr for Tournament {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Tournament::parse(s)
    }
}

impl fmt::Display for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

impl fmt::Debug for Tournament {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tournament({})", self.to_compact())
    }
}
