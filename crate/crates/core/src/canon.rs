//! Canonical labeling of small tournaments by exhaustive relabeling search.
//!
//! The canonical tournament is the relabeling whose key is lexicographically
//! smallest, where the key lists `beats(i, j)` for `j = 1..n`, `i = 0..j`.
//! Assigning canonical positions in increasing order fixes the key one
//! column at a time, so the search prunes any branch whose prefix is already
//! larger than the best found.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::tournament::Tournament;

/// Largest size accepted by [`canonical_form`].
pub const MAX_CANONICAL_AGENTS: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub canonical: Tournament,
    /// `relabeling[a]` is the canonical label of input agent `a`.
    pub relabeling: Vec<usize>,
    /// Automorphism orbits of `canonical`, each sorted, ordered by least member.
    pub orbits: Vec<Vec<usize>>,
}

impl CanonicalForm {
    /// Orbit index of canonical agent `a`.
    pub fn orbit_of(&self, a: usize) -> usize {
        self.orbits
            .iter()
            .position(|o| o.contains(&a))
            .expect("orbits partition the agents")
    }
}

struct Search<'a> {
    t: &'a Tournament,
    n: usize,
    best: Vec<u32>,
    assigned: Vec<usize>,
    used: u32,
    /// Each entry maps canonical position -> input agent.
    winners: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn column(&self, agent: usize) -> u32 {
        let p = self.assigned.len();
        let mut chunk = 0u32;
        for (i, &a) in self.assigned.iter().enumerate() {
            if self.t.beats(a, agent) {
                chunk |= 1 << (p - 1 - i);
            }
        }
        chunk
    }

    fn run(&mut self) {
        let p = self.assigned.len();
        if p == self.n {
            self.winners.push(self.assigned.clone());
            return;
        }
        for agent in 0..self.n {
            if self.used >> agent & 1 == 1 {
                continue;
            }
            let chunk = self.column(agent);
            if chunk > self.best[p] {
                continue;
            }
            if chunk < self.best[p] {
                self.best[p] = chunk;
                for b in &mut self.best[p + 1..] {
                    *b = u32::MAX;
                }
                self.winners.clear();
            }
            self.assigned.push(agent);
            self.used |= 1 << agent;
            self.run();
            self.used &= !(1 << agent);
            self.assigned.pop();
        }
    }
}

/// Canonical form with automorphism orbits.
pub fn canonical_form(t: &Tournament) -> Result<CanonicalForm> {
    let n = t.n();
    if n > MAX_CANONICAL_AGENTS {
        return Err(Error::Budget(format!(
            "canonical labeling supports at most {MAX_CANONICAL_AGENTS} agents, got {n}"
        )));
    }
    let mut search = Search {
        t,
        n,
        best: vec![u32::MAX; n],
        assigned: Vec::with_capacity(n),
        used: 0,
        winners: Vec::new(),
    };
    search.run();
    let winners = search.winners;
    let first = &winners[0];
    let mut relabeling = vec![0; n];
    for (pos, &agent) in first.iter().enumerate() {
        relabeling[agent] = pos;
    }
    let canonical = t.relabel(&relabeling);

    // Every other optimal labeling differs from the first by an automorphism
    // of the canonical tournament: position p -> relabeling[other[p]].
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for other in &winners[1..] {
        for (pos, &agent) in other.iter().enumerate() {
            let (a, b) = (find(&mut parent, pos), find(&mut parent, relabeling[agent]));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for a in 0..n {
        let r = find(&mut parent, a);
        groups.entry(r).or_default().push(a);
    }
    let mut orbits: Vec<Vec<usize>> = groups.into_values().collect();
    orbits.sort();
    Ok(CanonicalForm {
        canonical,
        relabeling,
        orbits,
    })
}

/// Isomorphism classes of every labeled tournament on `n` agents.
#[derive(Clone, Debug)]
pub struct Classification {
    pub n: usize,
    /// Canonical forms of the class representatives, in order of first appearance.
    pub classes: Vec<CanonicalForm>,
    /// Class index of each labeled tournament, indexed by code.
    pub class_of: Vec<u32>,
    /// Relabeling into the canonical representative, indexed by code.
    pub relabeling: Vec<Vec<u8>>,
}

impl Classification {
    pub fn new(n: usize) -> Result<Self> {
        if n > 7 {
            return Err(Error::Budget(format!(
                "classifying all labeled tournaments supports at most 7 agents, got {n}"
            )));
        }
        let mut index: HashMap<u128, u32> = HashMap::new();
        let mut classes = Vec::new();
        let total = Tournament::count(n) as usize;
        let mut class_of = Vec::with_capacity(total);
        let mut relabeling = Vec::with_capacity(total);
        for t in Tournament::all(n)? {
            let cf = canonical_form(&t)?;
            let key = cf.canonical.code();
            let id = *index.entry(key).or_insert_with(|| {
                classes.push(CanonicalForm {
                    canonical: cf.canonical.clone(),
                    relabeling: (0..n).collect(),
                    orbits: cf.orbits.clone(),
                });
                (classes.len() - 1) as u32
            });
            class_of.push(id);
            relabeling.push(cf.relabeling.iter().map(|&x| x as u8).collect());
        }
        Ok(Classification {
            n,
            classes,
            class_of,
            relabeling,
        })
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_cycle_is_vertex_transitive() {
        let c: Tournament = "3\n010\n001\n100".parse().unwrap();
        let cf = canonical_form(&c).unwrap();
        assert_eq!(cf.orbits, vec![vec![0, 1, 2]]);
        assert_eq!(c.relabel(&cf.relabeling), cf.canonical);
    }

    #[test]
    fn transitive_is_rigid() {
        let t = Tournament::transitive(3).unwrap();
        let cf = canonical_form(&t).unwrap();
        assert_eq!(cf.orbits, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn class_counts_match_enumeration() {
        // Brute force: distinct minimal relabelings over all permutations.
        fn brute(n: usize) -> usize {
            let mut perms = vec![];
            permutations(n, &mut vec![], &mut perms);
            let mut seen = std::collections::HashSet::new();
            for t in Tournament::all(n).unwrap() {
                let min = perms.iter().map(|p| t.relabel(p).code()).min().unwrap();
                seen.insert(min);
            }
            seen.len()
        }
        fn permutations(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == n {
                out.push(cur.clone());
                return;
            }
            for a in 0..n {
                if !cur.contains(&a) {
                    cur.push(a);
                    permutations(n, cur, out);
                    cur.pop();
                }
            }
        }
        for n in 1..=5 {
            let expected = brute(n);
            assert_eq!(Classification::new(n).unwrap().class_count(), expected);
        }
        assert_eq!(Classification::new(4).unwrap().class_count(), 4);
    }

    #[test]
    fn rejects_large_inputs() {
        let t = Tournament::transitive(10).unwrap();
        assert!(matches!(canonical_form(&t), Err(Error::Budget(_))));
    }
}
