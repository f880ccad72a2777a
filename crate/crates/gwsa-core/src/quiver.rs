//! 2-regular quivers (Q, f), the derived permutations bar and g, g-orbit
//! data, and the associated Brauer graph.
//!
//! A quiver is 2-regular when every vertex has in-degree 2 and out-degree 2
//! (loops counting once on each side). `f` is a permutation of the arrows
//! with target(α) = source(f(α)); `bar` swaps the two arrows sourced at a
//! vertex; `g = bar ∘ f` drives the Brauer graph's half-edge cyclic orders.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuiverError {
    NotTwoRegular { vertex: String },
    FNotCompatible { arrow: String },
    MalformedPermutation { detail: String },
}

impl core::fmt::Display for QuiverError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            QuiverError::NotTwoRegular { vertex } => {
                write!(f, "vertex {vertex} does not have in-degree 2 and out-degree 2")
            }
            QuiverError::FNotCompatible { arrow } => {
                write!(f, "target of {arrow} is not the source of f({arrow})")
            }
            QuiverError::MalformedPermutation { detail } => {
                write!(f, "malformed permutation: {detail}")
            }
        }
    }
}

/// A validated 2-regular quiver with its permutation data. Arrows are indexed
/// in lexicographic order of their ids, so index order is the monomial
/// tie-break order used by the rewriting layer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver2Reg {
    pub vertex_ids: Vec<String>,
    pub arrow_ids: Vec<String>,
    pub src: Vec<usize>,
    pub tgt: Vec<usize>,
    pub bar: Vec<usize>,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
}

/// g-orbit bookkeeping: orbits listed from their lexicographically least
/// arrow, sorted by that representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitData {
    /// Each orbit as a cyclic list of arrow indices starting at the
    /// representative.
    pub orbits: Vec<Vec<usize>>,
    /// Arrow index -> orbit index.
    pub orbit_of: Vec<usize>,
    /// Arrow index -> position within its orbit.
    pub pos_in_orbit: Vec<usize>,
}

impl OrbitData {
    pub fn n_of(&self, arrow: usize) -> usize {
        self.orbits[self.orbit_of[arrow]].len()
    }
}

/// Brauer graph: one graph vertex per g-orbit, one edge per quiver vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BrauerGraph {
    /// Number of graph vertices (= number of g-orbits).
    pub n_vertices: usize,
    /// Edge list indexed by quiver vertex: the g-orbits of the two arrows
    /// sourced there.
    pub edges: Vec<(usize, usize)>,
    /// Per graph vertex, the cyclic order of half-edges as (quiver vertex,
    /// arrow) pairs; successor of (e, α) is (source(g(α)), g(α)).
    pub cyclic_orders: Vec<Vec<(usize, usize)>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphPredicates {
    pub bipartite: bool,
    pub simple: bool,
    pub connected: bool,
}

/// Raw textual input for a quiver: vertex ids, arrows as (id, src, tgt), and
/// f as disjoint cycles of arrow ids (fixed points must be listed).
pub fn build_quiver(
    vertices: &[String],
    arrows: &[(String, String, String)],
    f_cycles: &[Vec<String>],
) -> Result<Quiver2Reg, QuiverError> {
    let mut vertex_ids: Vec<String> = vertices.to_vec();
    vertex_ids.sort();
    if vertex_ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(QuiverError::MalformedPermutation {
            detail: "duplicate vertex id".to_string(),
        });
    }
    let vidx: BTreeMap<&str, usize> = vertex_ids
        .iter()
        .enumerate()
        .map(|(i, v)| (v.as_str(), i))
        .collect();

    let mut sorted: Vec<&(String, String, String)> = arrows.iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    if sorted.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(QuiverError::MalformedPermutation {
            detail: "duplicate arrow id".to_string(),
        });
    }
    let arrow_ids: Vec<String> = sorted.iter().map(|a| a.0.clone()).collect();
    let aidx: BTreeMap<&str, usize> = arrow_ids
        .iter()
        .enumerate()
        .map(|(i, a)| (a.as_str(), i))
        .collect();
    let mut src = Vec::with_capacity(sorted.len());
    let mut tgt = Vec::with_capacity(sorted.len());
    for (id, s, t) in sorted.iter() {
        let s = *vidx.get(s.as_str()).ok_or_else(|| QuiverError::MalformedPermutation {
            detail: alloc::format!("arrow {id} uses unknown vertex {s}"),
        })?;
        let t = *vidx.get(t.as_str()).ok_or_else(|| QuiverError::MalformedPermutation {
            detail: alloc::format!("arrow {id} uses unknown vertex {t}"),
        })?;
        src.push(s);
        tgt.push(t);
    }

    // 2-regularity: every vertex sources exactly 2 arrows and receives
    // exactly 2 (loops contribute one to each count).
    for (v, vid) in vertex_ids.iter().enumerate() {
        let out = src.iter().filter(|&&s| s == v).count();
        let inn = tgt.iter().filter(|&&t| t == v).count();
        if out != 2 || inn != 2 {
            return Err(QuiverError::NotTwoRegular { vertex: vid.clone() });
        }
    }

    // f from disjoint cycles; every arrow must appear exactly once.
    let mut f = vec![usize::MAX; arrow_ids.len()];
    let mut seen = vec![false; arrow_ids.len()];
    for cycle in f_cycles {
        if cycle.is_empty() {
            return Err(QuiverError::MalformedPermutation {
                detail: "empty cycle".to_string(),
            });
        }
        let idxs: Vec<usize> = cycle
            .iter()
            .map(|id| {
                aidx.get(id.as_str()).copied().ok_or_else(|| QuiverError::MalformedPermutation {
                    detail: alloc::format!("unknown arrow {id} in f"),
                })
            })
            .collect::<Result<_, _>>()?;
        for &i in &idxs {
            if seen[i] {
                return Err(QuiverError::MalformedPermutation {
                    detail: alloc::format!("arrow {} appears twice in f", arrow_ids[i]),
                });
            }
            seen[i] = true;
        }
        for k in 0..idxs.len() {
            f[idxs[k]] = idxs[(k + 1) % idxs.len()];
        }
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(QuiverError::MalformedPermutation {
            detail: alloc::format!(
                "arrow {} missing from f (fixed points must be listed)",
                arrow_ids[i]
            ),
        });
    }
    for (a, &fa) in f.iter().enumerate() {
        if tgt[a] != src[fa] {
            return Err(QuiverError::FNotCompatible {
                arrow: arrow_ids[a].clone(),
            });
        }
    }

    // bar: the other arrow with the same source.
    let mut bar = vec![usize::MAX; arrow_ids.len()];
    for v in 0..vertex_ids.len() {
        let out: Vec<usize> = (0..arrow_ids.len()).filter(|&a| src[a] == v).collect();
        debug_assert_eq!(out.len(), 2);
        bar[out[0]] = out[1];
        bar[out[1]] = out[0];
    }
    let g: Vec<usize> = f.iter().map(|&fa| bar[fa]).collect();

    Ok(Quiver2Reg {
        vertex_ids,
        arrow_ids,
        src,
        tgt,
        bar,
        f,
        g,
    })
}

impl Quiver2Reg {
    pub fn n_vertices(&self) -> usize {
        self.vertex_ids.len()
    }

    pub fn n_arrows(&self) -> usize {
        self.arrow_ids.len()
    }

    pub fn orbit_data(&self) -> OrbitData {
        let n = self.n_arrows();
        let mut orbit_of = vec![usize::MAX; n];
        let mut pos_in_orbit = vec![0usize; n];
        let mut orbits = Vec::new();
        for start in 0..n {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let mut orbit = vec![start];
            let mut a = self.g[start];
            while a != start {
                orbit.push(a);
                a = self.g[a];
            }
            // Arrows are indexed lexicographically, so the least index is the
            // representative; `start` is minimal because we scan in order.
            let id = orbits.len();
            for (k, &x) in orbit.iter().enumerate() {
                orbit_of[x] = id;
                pos_in_orbit[x] = k;
            }
            orbits.push(orbit);
        }
        OrbitData {
            orbits,
            orbit_of,
            pos_in_orbit,
        }
    }

    /// The arrow g^k(a).
    pub fn g_pow(&self, a: usize, k: usize) -> usize {
        let mut x = a;
        for _ in 0..k {
            x = self.g[x];
        }
        x
    }
}

pub fn brauer_graph(q: &Quiver2Reg) -> BrauerGraph {
    let od = q.orbit_data();
    let edges: Vec<(usize, usize)> = (0..q.n_vertices())
        .map(|v| {
            let out: Vec<usize> = (0..q.n_arrows()).filter(|&a| q.src[a] == v).collect();
            (od.orbit_of[out[0]], od.orbit_of[out[1]])
        })
        .collect();
    let cyclic_orders: Vec<Vec<(usize, usize)>> = od
        .orbits
        .iter()
        .map(|orbit| orbit.iter().map(|&a| (q.src[a], a)).collect())
        .collect();
    BrauerGraph {
        n_vertices: od.orbits.len(),
        edges,
        cyclic_orders,
    }
}

pub fn graph_predicates(bg: &BrauerGraph) -> GraphPredicates {
    let n = bg.n_vertices;
    // Simplicity: no loops, no repeated vertex pairs.
    let mut simple = true;
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in &bg.edges {
        if a == b {
            simple = false;
        }
        let key = (a.min(b), a.max(b));
        if pairs.contains(&key) {
            simple = false;
        }
        pairs.push(key);
    }
    // Connectivity and bipartiteness by BFS 2-coloring.
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in &bg.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut color = vec![-1i8; n];
    let mut connected = true;
    let mut bipartite = true;
    let mut components = 0;
    for start in 0..n {
        if color[start] != -1 {
            continue;
        }
        components += 1;
        color[start] = 0;
        let mut queue = vec![start];
        while let Some(v) = queue.pop() {
            for &w in &adj[v] {
                if color[w] == -1 {
                    color[w] = 1 - color[v];
                    queue.push(w);
                } else if color[w] == color[v] {
                    bipartite = false;
                }
            }
        }
    }
    if components > 1 {
        connected = false;
    }
    // A loop edge forces non-bipartite even though BFS over the collapsed
    // adjacency may miss it.
    if bg.edges.iter().any(|&(a, b)| a == b) {
        bipartite = false;
    }
    GraphPredicates {
        bipartite,
        simple,
        connected,
    }
}

#[cfg(test)]
pub mod fixtures {
    use super::*;

    /// The triangle quiver: vertices 1,2,3; arrows a1:1→2, a2:2→3, a3:3→1,
    /// b1:1→3, b2:2→1, b3:3→2; f = (a1 a2 a3)(b3 b2 b1).
    pub fn q_k() -> Quiver2Reg {
        build_quiver(
            &ids(&["1", "2", "3"]),
            &arrows(&[
                ("a1", "1", "2"),
                ("a2", "2", "3"),
                ("a3", "3", "1"),
                ("b1", "1", "3"),
                ("b2", "2", "1"),
                ("b3", "3", "2"),
            ]),
            &cycles(&[&["a1", "a2", "a3"], &["b3", "b2", "b1"]]),
        )
        .unwrap()
    }

    pub fn ids(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    pub fn arrows(v: &[(&str, &str, &str)]) -> Vec<(String, String, String)> {
        v.iter()
            .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
            .collect()
    }

    pub fn cycles(v: &[&[&str]]) -> Vec<Vec<String>> {
        v.iter()
            .map(|c| c.iter().map(|s| s.to_string()).collect())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn q_k_orbits_are_three_pairs() {
        let q = q_k();
        let od = q.orbit_data();
        assert_eq!(od.orbits.len(), 3);
        assert!(od.orbits.iter().all(|o| o.len() == 2));
        // g = (a1 b2)(a2 b3)(a3 b1).
        let a = |s: &str| q.arrow_ids.iter().position(|x| x == s).unwrap();
        assert_eq!(q.g[a("a1")], a("b2"));
        assert_eq!(q.g[a("b2")], a("a1"));
        assert_eq!(q.g[a("a2")], a("b3"));
        assert_eq!(q.g[a("a3")], a("b1"));
    }

    #[test]
    fn q_k_brauer_graph_is_triangle() {
        let q = q_k();
        let bg = brauer_graph(&q);
        assert_eq!(bg.n_vertices, 3);
        assert_eq!(bg.edges.len(), 3);
        let preds = graph_predicates(&bg);
        assert!(preds.simple && preds.connected && !preds.bipartite);
        // Half-edge successor rule: successor of (e, α) is (src(g(α)), g(α)).
        for orbit in &bg.cyclic_orders {
            for k in 0..orbit.len() {
                let (_, arrow) = orbit[k];
                let (e2, a2) = orbit[(k + 1) % orbit.len()];
                assert_eq!(a2, q.g[arrow]);
                assert_eq!(e2, q.src[a2]);
            }
        }
    }

    #[test]
    fn single_vertex_two_loops() {
        let verts = ids(&["1"]);
        let arrs = arrows(&[("a", "1", "1"), ("b", "1", "1")]);
        // f = (a)(b) -> g = (a b): one orbit of size 2.
        let q = build_quiver(&verts, &arrs, &cycles(&[&["a"], &["b"]])).unwrap();
        assert_eq!(q.orbit_data().orbits.len(), 1);
        // f = (a b) -> g = (a)(b): two orbits of size 1.
        let q2 = build_quiver(&verts, &arrs, &cycles(&[&["a", "b"]])).unwrap();
        let od = q2.orbit_data();
        assert_eq!(od.orbits.len(), 2);
        let bg = brauer_graph(&q2);
        assert_eq!(bg.n_vertices, 2);
        assert_eq!(bg.edges, alloc::vec![(0, 1)]);
        let preds = graph_predicates(&bg);
        assert!(preds.simple && preds.connected && preds.bipartite);
    }

    #[test]
    fn loop_fixed_by_f_gives_nonsimple_graph() {
        // 2 vertices; loop l1 at 1, arrows a:1→2, b:2→1, loop l2 at 2.
        // f = (l1 a b)(l2): g(l1)=bar(a)=l1? bar(l1)=a at vertex 1.
        let q = build_quiver(
            &ids(&["1", "2"]),
            &arrows(&[("a", "1", "2"), ("b", "2", "1"), ("l1", "1", "1"), ("l2", "2", "2")]),
            &cycles(&[&["l1", "a", "b"], &["l2"]]),
        )
        .unwrap();
        let bg = brauer_graph(&q);
        let preds = graph_predicates(&bg);
        assert!(!preds.simple);
    }

    #[test]
    fn rejects_bad_input() {
        let verts = ids(&["1"]);
        let arrs = arrows(&[("a", "1", "1"), ("b", "1", "1")]);
        // Missing fixed point.
        assert!(matches!(
            build_quiver(&verts, &arrs, &cycles(&[&["a"]])),
            Err(QuiverError::MalformedPermutation { .. })
        ));
        // Not 2-regular.
        assert!(matches!(
            build_quiver(
                &ids(&["1", "2"]),
                &arrows(&[("a", "1", "2"), ("b", "2", "1")]),
                &cycles(&[&["a", "b"]])
            ),
            Err(QuiverError::NotTwoRegular { .. })
        ));
        // f incompatible with sources/targets.
        assert!(matches!(
            build_quiver(
                &ids(&["1", "2"]),
                &arrows(&[
                    ("a", "1", "2"),
                    ("b", "2", "1"),
                    ("c", "1", "2"),
                    ("d", "2", "1")
                ]),
                &cycles(&[&["a", "c"], &["b", "d"]])
            ),
            Err(QuiverError::FNotCompatible { .. })
        ));
    }
}
