//! JSON and DOT output. Everything written as JSON round-trips through the
//! same serde structures; `to_json_checked` enforces that on every emit.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use gwsa_core::algebra::{SVec, TableAlgebra};
use gwsa_core::homotopy::{AMat, ProjComplex};
use gwsa_core::quiver::BrauerGraph;
use gwsa_core::silting::SiltingPoset;

/// Serialize, then parse the result back and insist it agrees.
pub fn to_json_checked<T>(v: &T) -> String
where
    T: Serialize + DeserializeOwned + PartialEq,
{
    let text = serde_json::to_string_pretty(v).expect("serialization cannot fail");
    let back: T = serde_json::from_str(&text).expect("emitted JSON must parse");
    assert!(back == *v, "emitted JSON did not round-trip");
    text
}

/// Write via a temporary file in the same directory, then rename into place,
/// so readers never see a half-written file.
pub fn atomic_write(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Complexes and posets.

/// One matrix entry as label -> coefficient over the algebra basis.
pub type EntryJson = BTreeMap<String, u64>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    /// Lowest cohomological degree.
    pub lo: i32,
    /// Projective summands per degree, as vertex ids.
    pub terms: Vec<Vec<String>>,
    /// diffs[k] maps degree lo+k to lo+k+1; rows index the target summands,
    /// columns the source summands.
    pub diffs: Vec<Vec<Vec<EntryJson>>>,
}

fn sv_to_json(t: &TableAlgebra, v: &SVec) -> EntryJson {
    v.iter()
        .map(|&(i, c)| (t.labels[i as usize].clone(), c))
        .collect()
}

#[allow(dead_code)] // used by the round-trip tests
fn sv_from_json(t: &TableAlgebra, e: &EntryJson) -> Result<SVec, String> {
    let mut out: SVec = Vec::new();
    for (label, &c) in e {
        let i = t
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| format!("unknown basis label '{label}'"))?;
        out.push((i as u32, c));
    }
    out.sort_unstable();
    Ok(out)
}

pub fn complex_to_json(t: &TableAlgebra, vertex_ids: &[String], x: &ProjComplex) -> ComplexJson {
    ComplexJson {
        lo: x.lo,
        terms: x
            .terms
            .iter()
            .map(|vs| vs.iter().map(|&v| vertex_ids[v].clone()).collect())
            .collect(),
        diffs: x
            .diffs
            .iter()
            .map(|d| {
                (0..d.rows)
                    .map(|r| (0..d.cols).map(|c| sv_to_json(t, d.get(r, c))).collect())
                    .collect()
            })
            .collect(),
    }
}

#[allow(dead_code)] // used by the round-trip tests
pub fn complex_from_json(
    t: &TableAlgebra,
    vertex_ids: &[String],
    j: &ComplexJson,
) -> Result<ProjComplex, String> {
    let mut terms = Vec::new();
    for vs in &j.terms {
        let mut row = Vec::new();
        for id in vs {
            let v = vertex_ids
                .iter()
                .position(|w| w == id)
                .ok_or_else(|| format!("unknown vertex id '{id}'"))?;
            row.push(v);
        }
        terms.push(row);
    }
    let mut diffs = Vec::new();
    for (k, d) in j.diffs.iter().enumerate() {
        let rows = terms[k + 1].len();
        let cols = terms[k].len();
        if d.len() != rows || d.iter().any(|r| r.len() != cols) {
            return Err(format!("differential {k} has the wrong shape"));
        }
        let mut m = AMat::zero(rows, cols);
        for (r, row) in d.iter().enumerate() {
            for (c, e) in row.iter().enumerate() {
                m.set(r, c, sv_from_json(t, e)?);
            }
        }
        diffs.push(m);
    }
    Ok(ProjComplex {
        lo: j.lo,
        terms,
        diffs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeJson {
    pub key: Vec<i64>,
    pub summands: Vec<ComplexJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PosetJson {
    pub seed: u64,
    pub prime: u64,
    pub multiplicities: Vec<u64>,
    pub nodes: Vec<NodeJson>,
    /// Left-mutation edges (source index, target index).
    pub edges: Vec<(usize, usize)>,
}

pub fn poset_to_json(
    t: &TableAlgebra,
    vertex_ids: &[String],
    poset: &SiltingPoset,
    seed: u64,
    multiplicities: &[u64],
) -> PosetJson {
    PosetJson {
        seed,
        prime: t.p,
        multiplicities: multiplicities.to_vec(),
        nodes: poset
            .nodes
            .iter()
            .map(|n| NodeJson {
                key: n.key.clone(),
                summands: n
                    .summands
                    .iter()
                    .map(|s| complex_to_json(t, vertex_ids, s))
                    .collect(),
            })
            .collect(),
        edges: poset.hasse.clone(),
    }
}

pub fn poset_dot(poset: &SiltingPoset, name: &str) -> String {
    let mut out = format!("digraph {name} {{\n");
    for (i, n) in poset.nodes.iter().enumerate() {
        // A short digest of the key keeps the labels readable.
        let digest: i64 = n
            .key
            .iter()
            .fold(0i64, |acc, &x| acc.wrapping_mul(31).wrapping_add(x));
        out.push_str(&format!("  n{i} [label=\"{i}\\n{digest:x}\"];\n"));
    }
    for &(a, b) in &poset.hasse {
        out.push_str(&format!("  n{a} -> n{b};\n"));
    }
    out.push_str("}\n");
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportPairJson {
    pub from_node: usize,
    pub to_node: usize,
    pub transported: Vec<ComplexJson>,
    pub round_trip_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportJson {
    pub seed: u64,
    pub prime: u64,
    pub m_from: Vec<u64>,
    pub m_to: Vec<u64>,
    pub pairs: Vec<TransportPairJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleJson {
    pub seed: u64,
    pub prime: u64,
    pub mode: String,
    pub m: Vec<u64>,
    pub m2: Vec<u64>,
    pub verdict: String,
    pub node_counts: (usize, usize),
    pub edge_counts: (usize, usize),
    pub transport_total: bool,
    pub files: Vec<String>,
}

// ---------------------------------------------------------------------------
// Validation and inspection reports.

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SocleJson {
    pub arrow: String,
    pub e_min: u64,
    pub e_max: u64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidateJson {
    pub seed: u64,
    pub prime: u64,
    pub dim_expected: u64,
    pub dim_actual: u64,
    pub dim_exact: bool,
    pub dim_ok: bool,
    pub basis_words: u64,
    pub socle: Vec<SocleJson>,
    pub socle_ok: bool,
    pub sufficient: Option<String>,
    pub connected: bool,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub seed: u64,
    pub prime: u64,
    pub what: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dim: Option<DimJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<u64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centre: Option<CentreJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomp: Option<DecompJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimJson {
    pub expected: u64,
    pub actual: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentreJson {
    pub rank: usize,
    pub basis: Vec<EntryJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub bipartite: bool,
    pub simple: bool,
    pub connected: bool,
    pub dot: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompJson {
    pub d: Vec<Vec<u64>>,
    pub diag: Vec<u64>,
    pub gram: Vec<Vec<u64>>,
}

pub fn centre_json(t: &TableAlgebra) -> CentreJson {
    let basis = t.centre();
    CentreJson {
        rank: basis.len(),
        basis: basis
            .iter()
            .map(|v| {
                v.iter()
                    .enumerate()
                    .filter(|&(_, &c)| c != 0)
                    .map(|(i, &c)| (t.labels[i].clone(), c))
                    .collect()
            })
            .collect(),
    }
}

pub fn brauer_graph_dot(bg: &BrauerGraph) -> String {
    let mut out = String::from("graph brauer {\n");
    for v in 0..bg.n_vertices {
        out.push_str(&format!("  v{v};\n"));
    }
    for (e, &(a, b)) in bg.edges.iter().enumerate() {
        out.push_str(&format!("  v{a} -- v{b} [label=\"e{e}\"];\n"));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use gwsa_core::gwsa::{make_twisted_bga, quiver_k};
    use gwsa_core::homotopy::is_isomorphic;
    use gwsa_core::ring::CoeffRing;
    use gwsa_core::silting::enumerate_two_term;

    #[test]
    fn poset_json_round_trips_complexes() {
        let alg = make_twisted_bga(&quiver_k(), &[1, 1, 1], CoeffRing::field(2)).unwrap();
        let t = alg.to_table();
        let vids = alg.quiver.vertex_ids.clone();
        let poset = enumerate_two_term(&t, 100).unwrap();
        let pj = poset_to_json(&t, &vids, &poset, 0, &[1, 1, 1]);
        let text = to_json_checked(&pj);
        let back: PosetJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, pj);
        for (n, nj) in poset.nodes.iter().zip(&back.nodes) {
            for (s, sj) in n.summands.iter().zip(&nj.summands) {
                let rebuilt = complex_from_json(&t, &vids, sj).unwrap();
                assert_eq!(rebuilt.lo, s.lo);
                assert_eq!(rebuilt.terms, s.terms);
                assert!(is_isomorphic(&t, &rebuilt, s));
            }
        }
    }

    #[test]
    fn dot_mentions_every_node_and_edge() {
        let alg = make_twisted_bga(&quiver_k(), &[1, 1, 1], CoeffRing::field(2)).unwrap();
        let poset = enumerate_two_term(&alg.to_table(), 100).unwrap();
        let dot = poset_dot(&poset, "p");
        for i in 0..poset.nodes.len() {
            assert!(dot.contains(&format!("n{i} [")));
        }
        for &(a, b) in &poset.hasse {
            assert!(dot.contains(&format!("n{a} -> n{b};")));
        }
    }
}
