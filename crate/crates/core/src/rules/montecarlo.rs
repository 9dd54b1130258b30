//! Seeded simulation of each rule's random procedure.
//!
//! Trials are split into fixed-size chunks; chunk `c` draws from a ChaCha8
//! stream keyed by `(seed, c)`, so the result does not depend on how many
//! threads run the chunks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::bracket::{bracket_winner, rseb_bracket_size};
use super::{RuleId, WinDistribution};
use crate::error::{Error, Result};
use crate::rational::q_u128;
use crate::tournament::{AgentSet, Tournament};

const CHUNK: u64 = 1 << 15;

/// Empirical winning frequencies over `trials` simulated runs.
pub fn monte_carlo(
    rule: RuleId,
    t: &Tournament,
    trials: u64,
    seed: u64,
) -> Result<WinDistribution> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be positive".into()));
    }
    let sim = Simulator::new(rule, t)?;
    let chunks = trials.div_ceil(CHUNK);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let len = CHUNK.min(trials - c * CHUNK);
            let mut counts = vec![0u64; t.n()];
            let mut scratch = Vec::with_capacity(16);
            for _ in 0..len {
                counts[sim.run(&mut rng, &mut scratch)] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; t.n()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    WinDistribution::new(
        counts
            .iter()
            .map(|&c| q_u128(c as u128, trials as u128))
            .collect(),
    )
}

struct Simulator<'t> {
    rule: RuleId,
    t: &'t Tournament,
    padded: Option<Tournament>,
    top: Vec<usize>,
    /// Walk targets per top-cycle position, as positions.
    moves: Vec<Vec<usize>>,
}

impl<'t> Simulator<'t> {
    fn new(rule: RuleId, t: &'t Tournament) -> Result<Self> {
        let top: Vec<usize> = t.top_cycle().iter().collect();
        let mut moves = Vec::new();
        if matches!(rule, RuleId::Pr | RuleId::Prsl) {
            for &j in &top {
                let mut targets: Vec<usize> = top
                    .iter()
                    .enumerate()
                    .filter(|&(_, &i)| t.beats(i, j) || (rule == RuleId::Prsl && i == j))
                    .map(|(x, _)| x)
                    .collect();
                if targets.is_empty() {
                    targets.push(moves.len());
                }
                moves.push(targets);
            }
        }
        let padded = match rule {
            RuleId::Rseb => Some(t.pad(rseb_bracket_size(t.n()))?),
            _ => None,
        };
        Ok(Simulator {
            rule,
            t,
            padded,
            top,
            moves,
        })
    }

    fn run(&self, rng: &mut ChaCha8Rng, scratch: &mut Vec<usize>) -> usize {
        let t = self.t;
        match self.rule {
            RuleId::Tcr => self.top[rng.gen_range(0..self.top.len())],
            RuleId::Icr => {
                let mut set = t.agents();
                loop {
                    if let Some(w) = undefeated(t, set) {
                        return w;
                    }
                    set.remove(pick(set, rng));
                }
            }
            RuleId::Rkoth => {
                let mut set = t.agents();
                loop {
                    if let Some(w) = undefeated(t, set) {
                        return w;
                    }
                    let a = pick(set, rng);
                    set = set.difference(t.victims(a));
                    set.remove(a);
                }
            }
            RuleId::Rdm => {
                scratch.clear();
                scratch.extend(t.agents().iter());
                while scratch.len() > 1 {
                    let x = rng.gen_range(0..scratch.len());
                    let mut y = rng.gen_range(0..scratch.len() - 1);
                    if y >= x {
                        y += 1;
                    }
                    let loser = if t.beats(scratch[x], scratch[y]) {
                        y
                    } else {
                        x
                    };
                    scratch.swap_remove(loser);
                }
                scratch[0]
            }
            RuleId::Rvc => {
                scratch.clear();
                scratch.extend(t.agents().iter());
                scratch.shuffle(rng);
                scratch[1..]
                    .iter()
                    .fold(scratch[0], |champ, &next| t.winner(champ, next))
            }
            RuleId::Rseb => {
                let padded = self.padded.as_ref().expect("padded for RSEB");
                scratch.clear();
                scratch.extend(0..padded.n());
                scratch.shuffle(rng);
                bracket_winner(padded, scratch)
            }
            RuleId::Pr | RuleId::Prsl => self.top[self.coupled_from_the_past(rng)],
        }
    }

    /// Exact draw from the stationary distribution of the lazy walk: compose
    /// independent random maps further and further into the past until the
    /// composition is constant.
    fn coupled_from_the_past(&self, rng: &mut ChaCha8Rng) -> usize {
        let m = self.moves.len();
        if m == 1 {
            return 0;
        }
        let mut map: Vec<usize> = (0..m).collect();
        let mut step = vec![0usize; m];
        loop {
            for (x, s) in step.iter_mut().enumerate() {
                *s = if rng.gen::<bool>() {
                    x
                } else {
                    let targets = &self.moves[x];
                    targets[rng.gen_range(0..targets.len())]
                };
            }
            // The new step happens before every earlier-drawn one.
            for s in step.iter_mut() {
                *s = map[*s];
            }
            std::mem::swap(&mut map, &mut step);
            if map.iter().all(|&v| v == map[0]) {
                return map[0];
            }
        }
    }
}

fn undefeated(t: &Tournament, set: AgentSet) -> Option<usize> {
    set.iter().find(|&a| {
        let mut others = set;
        others.remove(a);
        others.is_subset(t.victims(a))
    })
}

fn pick(set: AgentSet, rng: &mut ChaCha8Rng) -> usize {
    let k = rng.gen_range(0..set.len());
    set.iter().nth(k).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::superman_kryptonite;
    use crate::rational::to_f64;

    #[test]
    fn reproducible_for_a_seed() {
        let t = superman_kryptonite(4).unwrap();
        let a = monte_carlo(RuleId::Rdm, &t, 50_000, 7).unwrap();
        let b = monte_carlo(RuleId::Rdm, &t, 50_000, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, monte_carlo(RuleId::Rdm, &t, 50_000, 8).unwrap());
    }

    #[test]
    fn kryptonite_never_wins_a_bracket() {
        let t = superman_kryptonite(4).unwrap();
        let d = monte_carlo(RuleId::Rseb, &t, 100_000, 1).unwrap();
        assert_eq!(to_f64(d.prob(3)), 0.0);
    }

    #[test]
    fn pagerank_sampler_is_close() {
        let t = superman_kryptonite(4).unwrap();
        let d = monte_carlo(RuleId::Pr, &t, 200_000, 3).unwrap();
        for (p, exact) in d.probs().iter().zip([4.0, 3.0, 2.0, 4.0]) {
            assert!((to_f64(p) - exact / 13.0).abs() < 0.01);
        }
    }

    #[test]
    fn zero_trials_rejected() {
        let t = Tournament::transitive(3).unwrap();
        assert!(monte_carlo(RuleId::Tcr, &t, 0, 0).is_err());
    }
}
