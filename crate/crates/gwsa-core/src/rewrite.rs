//! Path words over a quiver and length-bounded rewriting.
//!
//! Words compose left-to-right (the product of α: 1→2 and β: 2→3 is the word
//! αβ). The monomial order is length-first, then lexicographic on arrow
//! indices; arrow indices are assigned in lexicographic id order by the
//! quiver builder, so index comparison is id comparison.
//!
//! A rewrite system carries a hard length bound `bound`: any word that grows
//! beyond it is treated as zero. In `truncate` mode (ribbon orders) that is
//! the intended semantics; otherwise the caller checks, after basis
//! construction, that no normal-form word comes near the bound, and aborts
//! with `LengthBoundExceeded` if the presentation fails to close.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::quiver::Quiver2Reg;
use crate::ring::{Coeff, CoeffRing};

/// A path in the quiver; `arrows` empty means the idempotent at `source`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PathWord {
    pub source: u32,
    pub arrows: Vec<u32>,
}

impl PathWord {
    pub fn idempotent(v: usize) -> Self {
        PathWord {
            source: v as u32,
            arrows: Vec::new(),
        }
    }

    pub fn from_arrows(q: &Quiver2Reg, arrows: &[usize]) -> Result<Self, RewriteError> {
        assert!(!arrows.is_empty());
        for w in arrows.windows(2) {
            if q.tgt[w[0]] != q.src[w[1]] {
                return Err(RewriteError::NonComposableWord {
                    detail: alloc::format!(
                        "{} then {}",
                        q.arrow_ids[w[0]],
                        q.arrow_ids[w[1]]
                    ),
                });
            }
        }
        Ok(PathWord {
            source: q.src[arrows[0]] as u32,
            arrows: arrows.iter().map(|&a| a as u32).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.arrows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrows.is_empty()
    }

    pub fn target(&self, q: &Quiver2Reg) -> usize {
        match self.arrows.last() {
            Some(&a) => q.tgt[a as usize],
            None => self.source as usize,
        }
    }

    pub fn label(&self, q: &Quiver2Reg) -> String {
        if self.arrows.is_empty() {
            alloc::format!("e_{}", q.vertex_ids[self.source as usize])
        } else {
            let parts: Vec<&str> = self
                .arrows
                .iter()
                .map(|&a| q.arrow_ids[a as usize].as_str())
                .collect();
            parts.join("*")
        }
    }
}

impl Ord for PathWord {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.arrows
            .len()
            .cmp(&other.arrows.len())
            .then_with(|| self.arrows.cmp(&other.arrows))
            .then_with(|| self.source.cmp(&other.source))
    }
}

impl PartialOrd for PathWord {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse element of the path algebra quotient: word -> coefficient.
pub type Element = BTreeMap<PathWord, Coeff>;

pub fn elem_add_term(ring: &CoeffRing, elem: &mut Element, w: PathWord, c: Coeff) {
    if ring.is_zero(&c) {
        return;
    }
    match elem.get_mut(&w) {
        Some(existing) => {
            *existing = ring.add(existing, &c);
            if ring.is_zero(existing) {
                elem.remove(&w);
            }
        }
        None => {
            elem.insert(w, c);
        }
    }
}

pub fn elem_add(ring: &CoeffRing, a: &Element, b: &Element) -> Element {
    let mut out = a.clone();
    for (w, c) in b {
        elem_add_term(ring, &mut out, w.clone(), c.clone());
    }
    out
}

pub fn elem_scale(ring: &CoeffRing, a: &Element, c: &Coeff) -> Element {
    let mut out = Element::new();
    for (w, x) in a {
        elem_add_term(ring, &mut out, w.clone(), ring.mul(x, c));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RewriteError {
    NonComposableWord { detail: String },
    LengthBoundExceeded { detail: String },
}

impl core::fmt::Display for RewriteError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            RewriteError::NonComposableWord { detail } => {
                write!(f, "non-composable word: {detail}")
            }
            RewriteError::LengthBoundExceeded { detail } => {
                write!(f, "length bound exceeded: {detail}")
            }
        }
    }
}

/// One rule: the word `lhs` rewrites to the linear combination `rhs`. All rhs
/// words share the endpoints of `lhs` (an empty rhs word stands for the
/// idempotent at those endpoints).
#[derive(Clone, Debug)]
pub struct Rule {
    pub lhs: Vec<u32>,
    pub rhs: Vec<(Coeff, Vec<u32>)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
}

#[derive(Clone, Debug)]
pub struct RewriteSystem {
    pub ring: CoeffRing,
    pub rules: Vec<Rule>,
    /// Words longer than this are zero.
    pub bound: usize,
    /// Ribbon-order mode: truncation at `bound` is intended semantics rather
    /// than a closure failure.
    pub truncate: bool,
    /// Safety valve for the rewriting loop.
    pub max_steps: usize,
}

impl RewriteSystem {
    pub fn new(ring: CoeffRing, rules: Vec<Rule>, bound: usize, truncate: bool) -> Self {
        RewriteSystem {
            ring,
            rules,
            bound,
            truncate,
            max_steps: 1_000_000,
        }
    }

    /// First match under the given strategy: (position, rule index).
    fn find_match(&self, arrows: &[u32], strategy: Strategy) -> Option<(usize, usize)> {
        let n = arrows.len();
        match strategy {
            Strategy::LeftmostOutermost => {
                for pos in 0..n {
                    for (ri, rule) in self.rules.iter().enumerate() {
                        let l = rule.lhs.len();
                        if pos + l <= n && arrows[pos..pos + l] == rule.lhs[..] {
                            return Some((pos, ri));
                        }
                    }
                }
                None
            }
            Strategy::RightmostInnermost => {
                for pos in (0..n).rev() {
                    for (ri, rule) in self.rules.iter().enumerate().rev() {
                        let l = rule.lhs.len();
                        if pos + l <= n && arrows[pos..pos + l] == rule.lhs[..] {
                            return Some((pos, ri));
                        }
                    }
                }
                None
            }
        }
    }

    pub fn is_normal(&self, w: &PathWord) -> bool {
        w.len() <= self.bound
            && self
                .find_match(&w.arrows, Strategy::LeftmostOutermost)
                .is_none()
    }

    /// Rewrite to normal form. Returns the element and whether any word was
    /// dropped at the length bound.
    pub fn normalize(
        &self,
        input: &Element,
        strategy: Strategy,
    ) -> Result<(Element, bool), RewriteError> {
        let ring = &self.ring;
        let mut truncated = false;
        let mut out = Element::new();
        // Worklist of (word, coeff) terms still to be reduced.
        let mut work: Vec<(PathWord, Coeff)> =
            input.iter().map(|(w, c)| (w.clone(), c.clone())).collect();
        let mut steps = 0usize;
        while let Some((w, c)) = work.pop() {
            if ring.is_zero(&c) {
                continue;
            }
            if w.len() > self.bound {
                truncated = true;
                continue;
            }
            match self.find_match(&w.arrows, strategy) {
                None => elem_add_term(ring, &mut out, w, c),
                Some((pos, ri)) => {
                    steps += 1;
                    if steps > self.max_steps {
                        return Err(RewriteError::LengthBoundExceeded {
                            detail: alloc::format!(
                                "rewriting did not terminate within {} steps",
                                self.max_steps
                            ),
                        });
                    }
                    let rule = &self.rules[ri];
                    let l = rule.lhs.len();
                    for (rc, rw) in &rule.rhs {
                        let mut arrows =
                            Vec::with_capacity(w.arrows.len() - l + rw.len());
                        arrows.extend_from_slice(&w.arrows[..pos]);
                        arrows.extend_from_slice(rw);
                        arrows.extend_from_slice(&w.arrows[pos + l..]);
                        let nw = PathWord {
                            source: w.source,
                            arrows,
                        };
                        work.push((nw, ring.mul(&c, rc)));
                    }
                }
            }
        }
        Ok((out, truncated))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::fixtures::q_k;

    fn one(r: &CoeffRing) -> Coeff {
        r.one()
    }

    #[test]
    fn monomial_order_is_length_then_lex() {
        let a = PathWord {
            source: 0,
            arrows: alloc::vec![2],
        };
        let b = PathWord {
            source: 0,
            arrows: alloc::vec![0, 1],
        };
        assert!(a < b);
        let c = PathWord {
            source: 0,
            arrows: alloc::vec![0, 2],
        };
        assert!(b < c);
    }

    #[test]
    fn monomial_rule_kills_word() {
        // Over Q_K with rule a1 a2 -> 0.
        let q = q_k();
        let ring = CoeffRing::field(2);
        let a = |s: &str| q.arrow_ids.iter().position(|x| x == s).unwrap() as u32;
        let rs = RewriteSystem::new(
            ring,
            alloc::vec![Rule {
                lhs: alloc::vec![a("a1"), a("a2")],
                rhs: alloc::vec![],
            }],
            10,
            false,
        );
        let w = PathWord::from_arrows(&q, &[0, 1]).unwrap(); // a1 a2
        let mut e = Element::new();
        elem_add_term(&ring, &mut e, w, one(&ring));
        let (nf, tr) = rs.normalize(&e, Strategy::LeftmostOutermost).unwrap();
        assert!(nf.is_empty());
        assert!(!tr);
    }

    #[test]
    fn strategies_agree_on_confluent_system() {
        let q = q_k();
        let ring = CoeffRing::field(3);
        let a = |s: &str| q.arrow_ids.iter().position(|x| x == s).unwrap() as u32;
        // a1 b2 -> 2·b1 a3? Not composable; use two monomial rules instead.
        let rs = RewriteSystem::new(
            ring,
            alloc::vec![
                Rule {
                    lhs: alloc::vec![a("a1"), a("a2")],
                    rhs: alloc::vec![],
                },
                Rule {
                    lhs: alloc::vec![a("a2"), a("a3")],
                    rhs: alloc::vec![],
                },
            ],
            10,
            false,
        );
        let w = PathWord::from_arrows(
            &q,
            &[a("a1") as usize, a("a2") as usize, a("a3") as usize],
        )
        .unwrap();
        let mut e = Element::new();
        elem_add_term(&ring, &mut e, w, one(&ring));
        let (n1, _) = rs.normalize(&e, Strategy::LeftmostOutermost).unwrap();
        let (n2, _) = rs.normalize(&e, Strategy::RightmostInnermost).unwrap();
        assert_eq!(n1, n2);
        assert!(n1.is_empty());
    }

    #[test]
    fn non_composable_word_rejected() {
        let q = q_k();
        assert!(PathWord::from_arrows(&q, &[0, 0]).is_err());
    }
}
