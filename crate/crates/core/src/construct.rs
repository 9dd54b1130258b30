//! Named tournaments used by the lower-bound and fairness arguments.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tournament::Tournament;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Agent 1 beats everyone but agent `n`; `n` loses to everyone but 1;
    /// otherwise lower indices win.
    SupermanKryptonite,
    /// Five agents, lower indices win except 4 and 5 both beat 1.
    RkothGadget,
    /// `2k + 1` agents: a regular cycle on the first `2k - 1`, all beaten by
    /// agent `2k`, who loses to agent `2k + 1`, who loses to the cycle.
    PrslCycle,
    /// Eight agents: 1>2>3>4>1, 1>3, 2>4, the first four beat the last four,
    /// and the last four are transitive.
    RsebDstcGadget,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::SupermanKryptonite,
        Family::RkothGadget,
        Family::PrslCycle,
        Family::RsebDstcGadget,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::SupermanKryptonite => "superman_kryptonite",
            Family::RkothGadget => "rkoth_gadget",
            Family::PrslCycle => "prsl_cycle",
            Family::RsebDstcGadget => "rseb_dstc_gadget",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Family::ALL
            .into_iter()
            .find(|f| f.name() == key)
            .ok_or_else(|| Error::Unknown {
                kind: "family",
                name: s.to_string(),
            })
    }
}

/// Builds the named construction. `parameter` is `n` for the
/// superman-kryptonite tournament, `k` for the PRSL cycle and ignored for the
/// fixed gadgets.
pub fn construct(family: Family, parameter: usize) -> Result<Tournament> {
    match family {
        Family::SupermanKryptonite => superman_kryptonite(parameter),
        Family::RkothGadget => rkoth_gadget(),
        Family::PrslCycle => prsl_cycle(parameter),
        Family::RsebDstcGadget => rseb_dstc_gadget(),
    }
}

pub fn superman_kryptonite(n: usize) -> Result<Tournament> {
    if n < 3 {
        return Err(Error::Parameter(format!(
            "superman_kryptonite needs n >= 3, got {n}"
        )));
    }
    Tournament::from_fn(n, |i, j| !(i == 0 && j == n - 1))
}

pub fn rkoth_gadget() -> Result<Tournament> {
    Tournament::from_fn(5, |i, j| !(i == 0 && (j == 3 || j == 4)))
}

/// Team `t` of the construction (0-indexed) is agent `t`.
pub fn prsl_cycle(k: usize) -> Result<Tournament> {
    if k < 2 {
        return Err(Error::Parameter(format!(
            "prsl_cycle needs k >= 2, got {k}"
        )));
    }
    let n = 2 * k + 1;
    if n > crate::MAX_AGENTS {
        return Err(Error::Parameter(format!(
            "prsl_cycle with k = {k} exceeds {} agents",
            crate::MAX_AGENTS
        )));
    }
    let cycle = n - 2;
    let (top, bottom) = (n - 2, n - 1);
    Tournament::from_fn(n, |i, j| {
        if j == top || (i == top && j == bottom) {
            false
        } else if j == bottom {
            true
        } else {
            // i, j both in the cycle: i beats the next k - 1 teams.
            let ahead = (j + cycle - i) % cycle;
            (1..k).contains(&ahead)
        }
    })
}

pub fn rseb_dstc_gadget() -> Result<Tournament> {
    // Among the first four: 1>2, 1>3, 2>3, 2>4, 3>4, 4>1.
    Tournament::from_fn(8, |i, j| (i, j) != (0, 3))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beats(t: &Tournament, i: usize, j: usize) -> bool {
        t.beats(i - 1, j - 1)
    }

    #[test]
    fn superman_kryptonite_four() {
        let t = superman_kryptonite(4).unwrap();
        for (i, j) in [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4), (4, 1)] {
            assert!(beats(&t, i, j), "{i} should beat {j}");
        }
        assert_eq!(t.top_cycle().len(), 4);
        let f = t.flip(0, 3).unwrap();
        assert_eq!(f.condorcet_winner(), Some(0));
    }

    #[test]
    fn rkoth_gadget_matches_definition() {
        let t = rkoth_gadget().unwrap();
        assert!(beats(&t, 4, 1) && beats(&t, 5, 1));
        assert!(beats(&t, 1, 2) && beats(&t, 1, 3) && beats(&t, 4, 5));
        assert!(t.covers(3, 4));
    }

    #[test]
    fn prsl_cycle_two() {
        let t = prsl_cycle(2).unwrap();
        assert_eq!(t.n(), 5);
        assert!(t.beats(4, 3));
        for c in 0..3 {
            assert!(t.beats(3, c) && t.beats(c, 4));
        }
        assert!(t.beats(0, 1) && t.beats(1, 2) && t.beats(2, 0));
        assert!(t.is_strongly_connected_on(t.agents()));
    }

    #[test]
    fn prsl_cycle_is_regular_on_the_cycle() {
        for k in 2..=5 {
            let t = prsl_cycle(k).unwrap();
            for c in 0..2 * k - 1 {
                // k - 1 cycle victims plus the last agent.
                assert_eq!(t.score(c), k);
            }
        }
    }

    #[test]
    fn rseb_gadget_structure() {
        let t = rseb_dstc_gadget().unwrap();
        for (i, j) in [(1, 2), (2, 3), (3, 4), (4, 1), (1, 3), (2, 4)] {
            assert!(beats(&t, i, j));
        }
        let first_four = crate::AgentSet::full(4);
        assert!(t.dominant_subsets().contains(&first_four));
        assert!(t.covers(1, 2));
    }

    #[test]
    fn family_names_parse() {
        assert_eq!(
            "superman-kryptonite".parse::<Family>().unwrap(),
            Family::SupermanKryptonite
        );
        assert!("nope".parse::<Family>().is_err());
        assert!(construct(Family::SupermanKryptonite, 2).is_err());
        assert!(construct(Family::PrslCycle, 1).is_err());
    }
}
