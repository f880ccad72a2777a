//! Isomorphism of Hasse diagrams (finite digraphs): colour refinement to
//! prune, then backtracking with an explicit branch-step budget so a hard
//! instance degrades to an honest "inconclusive" instead of hanging.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoVerdict {
    /// Mapping from vertices of the first diagram to the second.
    Isomorphic(Vec<usize>),
    NotIsomorphic,
    /// The branch budget ran out before a decision.
    Inconclusive,
}

struct Digraph {
    n: usize,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    edge_set: Vec<(usize, usize)>,
}

impl Digraph {
    fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        let mut edge_set: Vec<(usize, usize)> = edges.to_vec();
        edge_set.sort_unstable();
        edge_set.dedup();
        for &(a, b) in &edge_set {
            out[a].push(b);
            inn[b].push(a);
        }
        Digraph {
            n,
            out,
            inn,
            edge_set,
        }
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_set.binary_search(&(a, b)).is_ok()
    }
}

/// One joint refinement round; colours are shared between both graphs so the
/// class histograms stay comparable.
fn refine(gs: [&Digraph; 2], colors: &mut [Vec<usize>; 2]) -> bool {
    let mut sig_ids: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    let mut next = [Vec::new(), Vec::new()];
    for gi in 0..2 {
        let g = gs[gi];
        for v in 0..g.n {
            let mut sig = vec![colors[gi][v]];
            let mut outs: Vec<usize> = g.out[v].iter().map(|&w| colors[gi][w]).collect();
            outs.sort_unstable();
            let mut ins: Vec<usize> = g.inn[v].iter().map(|&w| colors[gi][w]).collect();
            ins.sort_unstable();
            sig.push(usize::MAX);
            sig.extend(outs);
            sig.push(usize::MAX);
            sig.extend(ins);
            let id = {
                let n_ids = sig_ids.len();
                *sig_ids.entry(sig).or_insert(n_ids)
            };
            next[gi].push(id);
        }
    }
    let changed = next != *colors;
    *colors = next;
    changed
}

/// Decide whether two digraphs are isomorphic, spending at most `cap`
/// branch steps in the backtracking phase.
pub fn compare_posets(
    n_a: usize,
    edges_a: &[(usize, usize)],
    n_b: usize,
    edges_b: &[(usize, usize)],
    cap: u64,
) -> IsoVerdict {
    let a = Digraph::new(n_a, edges_a);
    let b = Digraph::new(n_b, edges_b);
    if a.n != b.n || a.edge_set.len() != b.edge_set.len() {
        return IsoVerdict::NotIsomorphic;
    }
    if a.n == 0 {
        return IsoVerdict::Isomorphic(Vec::new());
    }
    let mut colors = [vec![0usize; a.n], vec![0usize; b.n]];
    while refine([&a, &b], &mut colors) {}
    let hist = |c: &[usize]| -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &x in c {
            *h.entry(x).or_insert(0) += 1;
        }
        h
    };
    if hist(&colors[0]) != hist(&colors[1]) {
        return IsoVerdict::NotIsomorphic;
    }

    // Match vertices in order of ascending colour-class size.
    let h0 = hist(&colors[0]);
    let mut order: Vec<usize> = (0..a.n).collect();
    order.sort_by_key(|&v| (h0[&colors[0][v]], colors[0][v], v));

    let mut mapping = vec![usize::MAX; a.n];
    let mut used = vec![false; b.n];
    let mut steps = 0u64;

    fn assign(
        a: &Digraph,
        b: &Digraph,
        colors: &[Vec<usize>; 2],
        order: &[usize],
        depth: usize,
        mapping: &mut Vec<usize>,
        used: &mut Vec<bool>,
        steps: &mut u64,
        cap: u64,
    ) -> Option<bool> {
        if depth == order.len() {
            return Some(true);
        }
        let v = order[depth];
        for w in 0..b.n {
            if used[w] || colors[1][w] != colors[0][v] {
                continue;
            }
            *steps += 1;
            if *steps > cap {
                return None;
            }
            let ok = order[..depth].iter().all(|&u| {
                let mu = mapping[u];
                a.has_edge(u, v) == b.has_edge(mu, w) && a.has_edge(v, u) == b.has_edge(w, mu)
            });
            if !ok {
                continue;
            }
            mapping[v] = w;
            used[w] = true;
            match assign(a, b, colors, order, depth + 1, mapping, used, steps, cap) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => return None,
            }
            mapping[v] = usize::MAX;
            used[w] = false;
        }
        Some(false)
    }

    match assign(
        &a, &b, &colors, &order, 0, &mut mapping, &mut used, &mut steps, cap,
    ) {
        Some(true) => IsoVerdict::Isomorphic(mapping),
        Some(false) => IsoVerdict::NotIsomorphic,
        None => IsoVerdict::Inconclusive,
    }
}

/// Default branch budget: ten million steps.
pub const DEFAULT_BRANCH_CAP: u64 = 10_000_000;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permuted_diamond_is_isomorphic() {
        // Diamond: 0 → {1,2} → 3, relabelled on the other side.
        let ea = [(0, 1), (0, 2), (1, 3), (2, 3)];
        let eb = [(3, 2), (3, 0), (2, 1), (0, 1)];
        let IsoVerdict::Isomorphic(map) = compare_posets(4, &ea, 4, &eb, DEFAULT_BRANCH_CAP)
        else {
            panic!("expected isomorphism");
        };
        for &(x, y) in &ea {
            assert!(eb.contains(&(map[x], map[y])));
        }
    }

    #[test]
    fn chain_vs_fork_not_isomorphic() {
        let ea = [(0, 1), (1, 2)];
        let eb = [(0, 1), (0, 2)];
        assert_eq!(
            compare_posets(3, &ea, 3, &eb, DEFAULT_BRANCH_CAP),
            IsoVerdict::NotIsomorphic
        );
    }

    #[test]
    fn size_mismatch_short_circuits() {
        assert_eq!(
            compare_posets(2, &[(0, 1)], 3, &[(0, 1)], DEFAULT_BRANCH_CAP),
            IsoVerdict::NotIsomorphic
        );
    }

    #[test]
    fn tiny_budget_reports_inconclusive() {
        // Two disjoint 4-cycles vs an 8-cycle both refine to one colour
        // class; with a one-step budget the search cannot decide.
        let ea = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)];
        let eb = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 0)];
        assert_eq!(compare_posets(8, &ea, 8, &eb, 1), IsoVerdict::Inconclusive);
        assert_eq!(
            compare_posets(8, &ea, 8, &eb, DEFAULT_BRANCH_CAP),
            IsoVerdict::NotIsomorphic
        );
    }
}
