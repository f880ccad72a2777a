//! Command-line front end: validate algebra descriptions, print structural
//! reports, and compare two-term mutation posets across multiplicity changes.

mod emit;
mod input;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gwsa_core::gwsa::{make_gwsa, validate_gwsa, GWSAData};
use gwsa_core::orders::{
    central_z, decomposition_matrix, default_truncation, lift_central_xi, make_gamma0,
    make_ribbon_order, reduce_mod, Reduction, TruncOrder,
};
use gwsa_core::posetiso::{compare_posets, IsoVerdict, DEFAULT_BRANCH_CAP};
use gwsa_core::quiver::{brauer_graph, graph_predicates};
use gwsa_core::ring::CoeffRing;
use gwsa_core::silting::{enumerate_two_term, same_node, transport, SiltingError};

#[derive(Parser)]
#[command(name = "gwsa", version, about = "weighted surface algebra toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an algebra description and check its structural invariants.
    Validate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        prime: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Print a structural report: dim, cartan, centre, graph, or decomp.
    Report {
        what: String,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        prime: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Enumerate the two-term mutation posets of two reductions of the same
    /// order and compare them through transport.
    Bijection {
        #[arg(long)]
        input: PathBuf,
        /// Multiplicities for the first reduction, one per g-orbit,
        /// comma-separated in orbit order (orbits sorted by their
        /// lexicographically least arrow).
        #[arg(long)]
        m: String,
        /// Multiplicities for the second reduction.
        #[arg(long)]
        m2: String,
        /// "ribbon" (plain Brauer graph data, any positive multiplicities) or
        /// "gamma0" (full seed data, multiplicities above the input's).
        #[arg(long, default_value = "ribbon")]
        mode: String,
        #[arg(long, default_value_t = 2)]
        prime: u64,
        /// X-adic truncation for gamma0 mode (default derived from the data).
        #[arg(long)]
        trunc_n: Option<usize>,
        /// Path-length truncation (default derived from the data).
        #[arg(long)]
        trunc_l: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        node_cap: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "gwsa-out")]
        out_dir: PathBuf,
    },
}

/// Failures sorted by exit code: input errors exit 2, failed checks exit 1,
/// exhausted resource caps exit 3.
enum Failure {
    Input(String),
    Check(String),
    Cap(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (tag, msg, code) = match self {
            Failure::Input(m) => ("input error", m, 2),
            Failure::Check(m) => ("check failed", m, 1),
            Failure::Cap(m) => ("resource cap", m, 3),
        };
        eprintln!("gwsa: {tag}: {msg}");
        ExitCode::from(code)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Validate {
            input,
            prime,
            seed,
            out_dir,
        } => cmd_validate(&input, prime, seed, out_dir.as_deref()),
        Cmd::Report {
            what,
            input,
            prime,
            seed,
            out_dir,
        } => cmd_report(&what, &input, prime, seed, out_dir.as_deref()),
        Cmd::Bijection {
            input,
            m,
            m2,
            mode,
            prime,
            trunc_n,
            trunc_l,
            node_cap,
            seed,
            out_dir,
        } => cmd_bijection(
            &input, &m, &m2, &mode, prime, trunc_n, trunc_l, node_cap, seed, &out_dir,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}

fn load_input(path: &Path) -> Result<GWSAData, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    input::parse_input(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn parse_mult_list(s: &str, n_orbits: usize, flag: &str) -> Result<Vec<u64>, Failure> {
    let vals: Result<Vec<u64>, _> = s.split(',').map(|t| t.trim().parse::<u64>()).collect();
    let vals = vals.map_err(|_| Failure::Input(format!("--{flag} wants integers like 3,2,1")))?;
    if vals.len() != n_orbits {
        return Err(Failure::Input(format!(
            "--{flag} must list one multiplicity per g-orbit ({n_orbits} expected, {} given)",
            vals.len()
        )));
    }
    if vals.iter().any(|&v| v == 0) {
        return Err(Failure::Input(format!("--{flag} multiplicities must be positive")));
    }
    Ok(vals)
}

fn emit_report(json: &str, out_dir: Option<&Path>, name: &str) -> Result<(), Failure> {
    println!("{json}");
    if let Some(dir) = out_dir {
        emit::atomic_write(&dir.join(name), json)
            .map_err(|e| Failure::Input(format!("cannot write {name}: {e}")))?;
    }
    Ok(())
}

fn cmd_validate(
    path: &Path,
    prime: u64,
    seed: u64,
    out_dir: Option<&Path>,
) -> Result<(), Failure> {
    let data = load_input(path)?;
    let alg = make_gwsa(&data, CoeffRing::field(prime))
        .map_err(|e| Failure::Check(format!("algebra construction rejected: {e}")))?;
    let rep = validate_gwsa(&alg, &data)
        .map_err(|e| Failure::Check(format!("validation aborted: {e}")))?;
    let ok = rep.dim_ok && rep.socle_ok && rep.connected;
    let json = emit::to_json_checked(&emit::ValidateJson {
        seed,
        prime,
        dim_expected: rep.dim_expected,
        dim_actual: rep.dim_actual,
        dim_exact: rep.dim_exact,
        dim_ok: rep.dim_ok,
        basis_words: rep.basis_words,
        socle: rep
            .socle
            .iter()
            .map(|s| emit::SocleJson {
                arrow: s.arrow.clone(),
                e_min: s.e_min,
                e_max: s.e_max,
                ok: s.ok,
            })
            .collect(),
        socle_ok: rep.socle_ok,
        sufficient: rep.sufficient.map(|r| format!("{r:?}")),
        connected: rep.connected,
        ok,
    });
    emit_report(&json, out_dir, "validate.json")?;
    if ok {
        Ok(())
    } else {
        Err(Failure::Check("structural checks did not all pass".into()))
    }
}

fn cmd_report(
    what: &str,
    path: &Path,
    prime: u64,
    seed: u64,
    out_dir: Option<&Path>,
) -> Result<(), Failure> {
    let data = load_input(path)?;
    let mut rep = emit::ReportJson {
        seed,
        prime,
        what: what.to_string(),
        dim: None,
        matrix: None,
        centre: None,
        graph: None,
        decomp: None,
    };
    let build = |data: &GWSAData| {
        make_gwsa(data, CoeffRing::field(prime))
            .map_err(|e| Failure::Check(format!("algebra construction rejected: {e}")))
    };
    match what {
        "dim" => {
            let alg = build(&data)?;
            rep.dim = Some(emit::DimJson {
                expected: data.expected_dim(),
                actual: alg.to_table().dim as u64,
            });
        }
        "cartan" => {
            rep.matrix = Some(build(&data)?.to_table().cartan_matrix());
        }
        "centre" => {
            rep.centre = Some(emit::centre_json(&build(&data)?.to_table()));
        }
        "graph" => {
            let bg = brauer_graph(&data.quiver);
            let pred = graph_predicates(&bg);
            rep.graph = Some(emit::GraphJson {
                n_vertices: bg.n_vertices,
                edges: bg.edges.clone(),
                bipartite: pred.bipartite,
                simple: pred.simple,
                connected: pred.connected,
                dot: emit::brauer_graph_dot(&bg),
            });
        }
        "decomp" => {
            let dd = decomposition_matrix(&data.quiver, &data.m);
            rep.decomp = Some(emit::DecompJson {
                gram: dd.gram_product(),
                d: dd.d,
                diag: dd.diag,
            });
        }
        other => {
            return Err(Failure::Input(format!(
                "unknown report '{other}' (expected dim, cartan, centre, graph, or decomp)"
            )))
        }
    }
    emit_report(&emit::to_json_checked(&rep), out_dir, "report.json")
}

fn map_silting_err(e: SiltingError) -> Failure {
    match e {
        SiltingError::NodeCapExceeded { cap } => {
            Failure::Cap(format!("poset enumeration exceeded the node cap {cap}"))
        }
        other => Failure::Check(format!("{other}")),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bijection(
    path: &Path,
    m_arg: &str,
    m2_arg: &str,
    mode: &str,
    prime: u64,
    trunc_n: Option<usize>,
    trunc_l: Option<usize>,
    node_cap: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<(), Failure> {
    let data = load_input(path)?;
    let n_orb = data.orbits.orbits.len();
    let m1 = parse_mult_list(m_arg, n_orb, "m")?;
    let m2 = parse_mult_list(m2_arg, n_orb, "m2")?;

    let (order, w1, w2) = match mode {
        "ribbon" => {
            if data.t0.iter().any(|&v| v != 0)
                || data.t1.iter().any(|&v| v != 0)
                || !data.z.is_empty()
            {
                return Err(Failure::Input(
                    "ribbon mode takes plain Brauer graph data: [t0], [t1], and [Z] must be absent"
                        .into(),
                ));
            }
            let cycle = |m: &[u64]| {
                data.orbits
                    .orbits
                    .iter()
                    .enumerate()
                    .map(|(o, orb)| m[o] as usize * orb.len())
                    .max()
                    .unwrap_or(1)
            };
            let l = trunc_l.unwrap_or(2 * cycle(&m1).max(cycle(&m2)));
            let mut order = make_ribbon_order(&data.quiver, prime, l)
                .map_err(|e| Failure::Input(format!("{e}")))?;
            let w1 = central_z(&mut order, &m1).map_err(|e| Failure::Input(format!("{e}")))?;
            let w2 = central_z(&mut order, &m2).map_err(|e| Failure::Input(format!("{e}")))?;
            (order, w1, w2)
        }
        "gamma0" => {
            for (o, (&a, &b)) in m1.iter().zip(&m2).enumerate() {
                for (flag, v) in [("m", a), ("m2", b)] {
                    if v <= data.m[o] {
                        return Err(Failure::Input(format!(
                            "gamma0 mode requires m'_o > m_o on every g-orbit; \
                             --{flag} gives {v} <= {} on orbit {o}",
                            data.m[o]
                        )));
                    }
                }
            }
            let top: Vec<u64> = m1.iter().zip(&m2).map(|(&a, &b)| a.max(b)).collect();
            let (dn, dl) = default_truncation(&data, &top);
            let n = trunc_n.unwrap_or(dn);
            let l = trunc_l.unwrap_or(dl);
            let mut order =
                make_gamma0(&data, prime, n, l).map_err(|e| Failure::Input(format!("{e}")))?;
            let w1 =
                lift_central_xi(&mut order, &m1).map_err(|e| Failure::Input(format!("{e}")))?;
            let w2 =
                lift_central_xi(&mut order, &m2).map_err(|e| Failure::Input(format!("{e}")))?;
            (order, w1, w2)
        }
        other => {
            return Err(Failure::Input(format!(
                "unknown mode '{other}' (expected ribbon or gamma0)"
            )))
        }
    };

    let red1 = reduce_mod(&order, w1).map_err(|e| Failure::Input(format!("{e}")))?;
    let red2 = reduce_mod(&order, w2).map_err(|e| Failure::Input(format!("{e}")))?;
    run_bijection(
        &data, &order, w1, &red1, &m1, w2, &red2, &m2, mode, node_cap, seed, out_dir,
    )
}

#[allow(clippy::too_many_arguments)]
fn run_bijection(
    data: &GWSAData,
    order: &TruncOrder,
    w1: usize,
    red1: &Reduction,
    m1: &[u64],
    w2: usize,
    red2: &Reduction,
    m2: &[u64],
    mode: &str,
    node_cap: usize,
    seed: u64,
    out_dir: &Path,
) -> Result<(), Failure> {
    let poset1 = enumerate_two_term(&red1.table, node_cap).map_err(map_silting_err)?;
    let poset2 = enumerate_two_term(&red2.table, node_cap).map_err(map_silting_err)?;
    let vids = &data.quiver.vertex_ids;

    // Transport every node of the first poset into the second and match it
    // against the enumerated nodes there; then pull it back and compare.
    let mut pairs = Vec::new();
    let mut total = true;
    for (i, node) in poset1.nodes.iter().enumerate() {
        let mut over = Vec::new();
        let mut back = Vec::new();
        for s in &node.summands {
            let y = transport(order, (w1, red1), (w2, red2), s).map_err(map_silting_err)?;
            back.push(transport(order, (w2, red2), (w1, red1), &y).map_err(map_silting_err)?);
            over.push(y);
        }
        let to_node = poset2
            .nodes
            .iter()
            .position(|n| same_node(&red2.table, &over, &n.summands));
        let round_trip_ok = same_node(&red1.table, &back, &node.summands);
        let Some(j) = to_node else {
            total = false;
            continue;
        };
        total &= round_trip_ok;
        pairs.push(emit::TransportPairJson {
            from_node: i,
            to_node: j,
            transported: over
                .iter()
                .map(|c| emit::complex_to_json(&red2.table, vids, c))
                .collect(),
            round_trip_ok,
        });
    }
    // A total transport must also be injective on nodes.
    {
        let mut targets: Vec<usize> = pairs.iter().map(|p| p.to_node).collect();
        targets.sort_unstable();
        targets.dedup();
        total &= pairs.len() == poset1.nodes.len() && targets.len() == pairs.len();
    }

    let verdict = compare_posets(
        poset1.nodes.len(),
        &poset1.hasse,
        poset2.nodes.len(),
        &poset2.hasse,
        DEFAULT_BRANCH_CAP,
    );
    let verdict_name = match &verdict {
        IsoVerdict::Isomorphic(_) => "isomorphic",
        IsoVerdict::NotIsomorphic => "not-isomorphic",
        IsoVerdict::Inconclusive => "inconclusive",
    };

    let files = [
        (
            "poset1.json",
            emit::to_json_checked(&emit::poset_to_json(&red1.table, vids, &poset1, seed, m1)),
        ),
        (
            "poset2.json",
            emit::to_json_checked(&emit::poset_to_json(&red2.table, vids, &poset2, seed, m2)),
        ),
        ("poset1.dot", emit::poset_dot(&poset1, "poset1")),
        ("poset2.dot", emit::poset_dot(&poset2, "poset2")),
        (
            "transport.json",
            emit::to_json_checked(&emit::TransportJson {
                seed,
                prime: red1.table.p,
                m_from: m1.to_vec(),
                m_to: m2.to_vec(),
                pairs,
            }),
        ),
    ];
    let mut names: Vec<String> = files.iter().map(|(n, _)| n.to_string()).collect();
    names.push("bundle.json".to_string());
    let bundle = emit::to_json_checked(&emit::BundleJson {
        seed,
        prime: red1.table.p,
        mode: mode.to_string(),
        m: m1.to_vec(),
        m2: m2.to_vec(),
        verdict: verdict_name.to_string(),
        node_counts: (poset1.nodes.len(), poset2.nodes.len()),
        edge_counts: (poset1.hasse.len(), poset2.hasse.len()),
        transport_total: total,
        files: names,
    });
    for (name, text) in files.iter().chain([("bundle.json", bundle.clone())].iter()) {
        emit::atomic_write(&out_dir.join(name), text)
            .map_err(|e| Failure::Input(format!("cannot write {name}: {e}")))?;
    }
    println!("{bundle}");

    match verdict {
        IsoVerdict::Inconclusive => Err(Failure::Cap(
            "poset comparison ran out of branch budget".into(),
        )),
        IsoVerdict::NotIsomorphic => Err(Failure::Check("posets are not isomorphic".into())),
        IsoVerdict::Isomorphic(_) if !total => Err(Failure::Check(
            "transport did not give a bijection on nodes".into(),
        )),
        IsoVerdict::Isomorphic(_) => Ok(()),
    }
}
