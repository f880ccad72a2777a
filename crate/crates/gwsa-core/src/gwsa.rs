//! Weighted surface algebra data and builders.
//!
//! The data (Q, f, m, c, t, Z) determines a quotient of the path algebra by
//! three kinds of relations:
//!
//! * αf(α) = c_ᾱ·A_ᾱ·t_α for every arrow α, where t_α = t_{α,0} + t_{α,1}·α;
//! * c_α·B_α = c_ᾱ·B_ᾱ (or B_α = −B_ᾱ in the twisted variant) for the two
//!   arrows sourced at each vertex;
//! * the words of Z.
//!
//! Here B_α = α g(α) ⋯ g^{n_α m_α − 1}(α) and A_α is B_α without its last
//! arrow. The rewrite orientation sends the larger word of each pair to the
//! smaller; one derived rule per vertex handles the orbit continuation
//! B_small·σ (σ the starting arrow), which no primary rule reaches but which
//! the relations force into the R1 shape. With those rules every normal-form
//! word is an initial subword of some B_α, so the length bound 2·max(mn)+2 is
//! never hit by the basis.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{build_basis, multiply, FDAlgebra, SVec, TableAlgebra};
use crate::linalg::{FpMat, RowSpace};
use crate::quiver::{
    brauer_graph, build_quiver, graph_predicates, OrbitData, Quiver2Reg,
};
use crate::rewrite::{elem_add, PathWord, RewriteError, Rule, RewriteSystem};
use crate::ring::{inv_mod, pow_mod, Coeff, CoeffRing};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GwsaError {
    InvalidTData { detail: String },
    DimensionMismatch { detail: String },
    ParameterOutOfRange { detail: String },
    Build(RewriteError),
}

impl core::fmt::Display for GwsaError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GwsaError::InvalidTData { detail } => write!(f, "invalid t data: {detail}"),
            GwsaError::DimensionMismatch { detail } => {
                write!(f, "dimension mismatch: {detail}")
            }
            GwsaError::ParameterOutOfRange { detail } => {
                write!(f, "parameter out of range: {detail}")
            }
            GwsaError::Build(e) => write!(f, "{e}"),
        }
    }
}

impl From<RewriteError> for GwsaError {
    fn from(e: RewriteError) -> Self {
        GwsaError::Build(e)
    }
}

/// Input data for a weighted surface algebra. `m` and `c` are indexed by
/// g-orbit (in the order of `orbits`); `t0`/`t1` are per arrow, expanded from
/// the underlying function on f-orbits; `z` holds extra relation words as
/// arrow-index sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GWSAData {
    pub quiver: Quiver2Reg,
    pub orbits: OrbitData,
    pub m: Vec<u64>,
    pub c: Vec<u64>,
    pub t0: Vec<u64>,
    pub t1: Vec<u64>,
    pub z: Vec<Vec<usize>>,
}

impl GWSAData {
    pub fn new(
        quiver: Quiver2Reg,
        m: Vec<u64>,
        c: Vec<u64>,
        t0: Vec<u64>,
        t1: Vec<u64>,
        z: Vec<Vec<usize>>,
    ) -> Self {
        let orbits = quiver.orbit_data();
        GWSAData {
            quiver,
            orbits,
            m,
            c,
            t0,
            t1,
            z,
        }
    }

    /// m_α·n_α for an arrow.
    pub fn mn(&self, a: usize) -> u64 {
        let o = self.orbits.orbit_of[a];
        self.m[o] * self.orbits.orbits[o].len() as u64
    }

    pub fn expected_dim(&self) -> u64 {
        self.orbits
            .orbits
            .iter()
            .zip(&self.m)
            .map(|(o, m)| m * (o.len() as u64) * (o.len() as u64))
            .sum()
    }

    /// Check the structural invariants against a prime p (for c and t1
    /// nonzero-ness).
    pub fn validate(&self, p: u64) -> Result<(), GwsaError> {
        let q = &self.quiver;
        let n_orb = self.orbits.orbits.len();
        if self.m.len() != n_orb || self.c.len() != n_orb {
            return Err(GwsaError::InvalidTData {
                detail: "m and c must assign one value per g-orbit".to_string(),
            });
        }
        if self.m.iter().any(|&m| m == 0) {
            return Err(GwsaError::ParameterOutOfRange {
                detail: "multiplicities must be positive".to_string(),
            });
        }
        if self.c.iter().any(|&c| c % p == 0) {
            return Err(GwsaError::ParameterOutOfRange {
                detail: "c must be nonzero on every g-orbit".to_string(),
            });
        }
        if self.t0.len() != q.n_arrows() || self.t1.len() != q.n_arrows() {
            return Err(GwsaError::InvalidTData {
                detail: "t0 and t1 must assign one value per arrow".to_string(),
            });
        }
        for a in 0..q.n_arrows() {
            let id = &q.arrow_ids[a];
            if self.t0[a] > 1 {
                return Err(GwsaError::InvalidTData {
                    detail: alloc::format!("t0 must be 0 or 1 (arrow {id})"),
                });
            }
            if self.t0[a] != self.t0[q.f[a]] {
                return Err(GwsaError::InvalidTData {
                    detail: alloc::format!("t0 is not constant on the f-orbit of {id}"),
                });
            }
            let bar = q.bar[a];
            if self.t0[a] == 1 {
                let f3 = q.f[q.f[q.f[a]]];
                if f3 != a || self.mn(bar) < 2 {
                    return Err(GwsaError::InvalidTData {
                        detail: alloc::format!(
                            "t0 = 1 at {id} requires f^3 fixed and m·n >= 2 on the other arrow"
                        ),
                    });
                }
            }
            if self.t1[a] % p != 0 && (q.f[a] != a || self.mn(bar) < 3) {
                return Err(GwsaError::InvalidTData {
                    detail: alloc::format!(
                        "t1 != 0 at {id} requires f-fixed loop and m·n >= 3 on the other arrow"
                    ),
                });
            }
        }
        for w in &self.z {
            if !self.z_shape_ok(w) {
                return Err(GwsaError::InvalidTData {
                    detail: alloc::format!("Z word {:?} has an inadmissible shape", w),
                });
            }
        }
        Ok(())
    }

    fn z_shape_ok(&self, w: &[usize]) -> bool {
        let q = &self.quiver;
        if w.len() != 3 || w.iter().any(|&a| a >= q.n_arrows()) {
            return false;
        }
        let (x, y, z) = (w[0], w[1], w[2]);
        (y == q.g[x] && z == q.f[y]) || (y == q.f[x] && z == q.g[y])
    }
}

/// The orbit path a, g(a), ..., of the given length.
pub fn orbit_path(q: &Quiver2Reg, a: usize, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    let mut x = a;
    for _ in 0..len {
        out.push(x as u32);
        x = q.g[x];
    }
    out
}

/// B_α as an arrow-index word.
pub fn b_word(data: &GWSAData, a: usize) -> Vec<u32> {
    orbit_path(&data.quiver, a, data.mn(a) as usize)
}

/// A_α (B_α without its last arrow; empty when m·n = 1).
pub fn a_word(data: &GWSAData, a: usize) -> Vec<u32> {
    let mut w = b_word(data, a);
    w.pop();
    w
}

fn word_cmp(a: &[u32], b: &[u32]) -> core::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// The right-hand side of the relation αf(α) = c_ᾱ·A_ᾱ·t_α, as rewrite terms.
/// With `x_factor` the whole right-hand side is multiplied by X (the lifted
/// relation used for orders over GF(p)[X]/(X^N)).
fn r1_terms(data: &GWSAData, ring: &CoeffRing, x_factor: bool, a: usize) -> Vec<(Coeff, Vec<u32>)> {
    let q = &data.quiver;
    let bar = q.bar[a];
    let c = data.c[data.orbits.orbit_of[bar]];
    let base = if x_factor {
        ring.mul(&ring.x(), &ring.scalar(c))
    } else {
        ring.scalar(c)
    };
    let aw = a_word(data, bar);
    let mut out = Vec::new();
    if data.t0[a] == 1 {
        out.push((base.clone(), aw.clone()));
    }
    let t1 = data.t1[a] % ring.p;
    if t1 != 0 {
        let mut w = aw;
        w.push(a as u32);
        out.push((ring.scale(&base, t1), w));
    }
    out
}

/// The full rewrite rule set for the data. `twisted` flips the sign in the
/// B-relations (B_α = −B_ᾱ); `x_factor` lifts the αf(α)-relations by one
/// power of X.
pub fn gwsa_rules(
    data: &GWSAData,
    ring: &CoeffRing,
    x_factor: bool,
    twisted: bool,
) -> Vec<Rule> {
    let q = &data.quiver;
    let mut rules = Vec::new();
    for w in &data.z {
        rules.push(Rule {
            lhs: w.iter().map(|&a| a as u32).collect(),
            rhs: vec![],
        });
    }
    for a in 0..q.n_arrows() {
        rules.push(Rule {
            lhs: vec![a as u32, q.f[a] as u32],
            rhs: r1_terms(data, ring, x_factor, a),
        });
    }
    let sign = if twisted { ring.p - 1 } else { 1 };
    for v in 0..q.n_vertices() {
        let out: Vec<usize> = (0..q.n_arrows()).filter(|&a| q.src[a] == v).collect();
        let (x, y) = (out[0], out[1]);
        let (bx, by) = (b_word(data, x), b_word(data, y));
        let ((big, bw_big), (small, bw_small)) = if word_cmp(&bx, &by) == core::cmp::Ordering::Greater
        {
            ((x, bx), (y, by))
        } else {
            ((y, by), (x, bx))
        };
        let c_big = data.c[data.orbits.orbit_of[big]];
        let c_small = data.c[data.orbits.orbit_of[small]];
        // c_big·B_big = sign·c_small·B_small, oriented big → small.
        let ratio = sign * c_small % ring.p * inv_mod(c_big, ring.p) % ring.p;
        rules.push(Rule {
            lhs: bw_big.clone(),
            rhs: vec![(ring.scalar(ratio), bw_small.clone())],
        });
        // Orbit continuation of the kept word: B_small·σ. The relations give
        // B_small·σ = sign·(c_big/c_small)·A_big·(δ f(δ)) with δ the last
        // arrow of B_big, since f(δ) = σ.
        let delta = *bw_big.last().unwrap() as usize;
        debug_assert_eq!(q.f[delta], small);
        let factor = sign * c_big % ring.p * inv_mod(c_small, ring.p) % ring.p;
        let mut lhs = bw_small;
        lhs.push(small as u32);
        let a_big = &bw_big[..bw_big.len() - 1];
        let rhs = r1_terms(data, ring, x_factor, delta)
            .into_iter()
            .map(|(co, w)| {
                let mut full = a_big.to_vec();
                full.extend_from_slice(&w);
                (ring.scale(&co, factor), full)
            })
            .collect();
        rules.push(Rule { lhs, rhs });
    }
    rules
}

/// Length bound enclosing every normal-form word with room to spare.
pub fn default_bound(data: &GWSAData) -> usize {
    let max_mn = (0..data.quiver.n_arrows())
        .map(|a| data.mn(a))
        .max()
        .unwrap_or(1) as usize;
    2 * max_mn + 2
}

pub fn make_gwsa(data: &GWSAData, ring: CoeffRing) -> Result<FDAlgebra, GwsaError> {
    data.validate(ring.p)?;
    let rules = gwsa_rules(data, &ring, false, false);
    let rs = RewriteSystem::new(ring, rules, default_bound(data), false);
    Ok(build_basis(&data.quiver, rs)?)
}

/// kQ/(αf(α), B_α + B_ᾱ) with the given per-orbit multiplicities.
pub fn make_twisted_bga(
    q: &Quiver2Reg,
    m: &[u64],
    ring: CoeffRing,
) -> Result<FDAlgebra, GwsaError> {
    let n_orb = q.orbit_data().orbits.len();
    let data = GWSAData::new(
        q.clone(),
        m.to_vec(),
        vec![1; n_orb],
        vec![0; q.n_arrows()],
        vec![0; q.n_arrows()],
        vec![],
    );
    data.validate(ring.p)?;
    let rules = gwsa_rules(&data, &ring, false, true);
    let rs = RewriteSystem::new(ring, rules, default_bound(&data), false);
    Ok(build_basis(q, rs)?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SocleCheck {
    pub arrow: String,
    pub e_min: u64,
    pub e_max: u64,
    pub ok: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SufficientRoute {
    /// Z contains αf(α)g(f(α)) for every arrow and m·n ≥ 3 wherever the other
    /// arrow has t ≡ 1.
    FullZAndThree,
    /// m·n ≥ 4 wherever the other arrow has t ≡ 1 (any admissible Z).
    FourWhereQuaternion,
}

#[derive(Clone, Debug)]
pub struct GwsaReport {
    pub dim_expected: u64,
    pub dim_actual: u64,
    /// Whether dim_actual came from the exact truncated-ideal rank (rather
    /// than the normal-form word count, which cannot see coefficient
    /// inconsistencies).
    pub dim_exact: bool,
    pub dim_ok: bool,
    pub basis_words: u64,
    pub socle: Vec<SocleCheck>,
    pub socle_ok: bool,
    pub sufficient: Option<SufficientRoute>,
    pub connected: bool,
}

/// Dimension oracle independent of the rewriting system: the rank of the
/// relation-instance span inside the space of all paths of length ≤ max(mn),
/// where longer paths are zero (they lie beyond the socle stratum). Returns
/// (number of words, rank), or None if the word count is impractical.
fn truncated_quotient_dim(data: &GWSAData, ring: &CoeffRing) -> Option<(usize, usize)> {
    const WORD_CAP: usize = 20_000;
    let q = &data.quiver;
    let b = (0..q.n_arrows()).map(|a| data.mn(a)).max()? as usize;
    let mut words: Vec<PathWord> = (0..q.n_vertices()).map(PathWord::idempotent).collect();
    let mut frontier = words.clone();
    for _ in 0..b {
        let mut next = Vec::new();
        for w in &frontier {
            let t = w.target(q);
            for a in 0..q.n_arrows() {
                if q.src[a] == t {
                    let mut arrows = w.arrows.clone();
                    arrows.push(a as u32);
                    next.push(PathWord {
                        source: w.source,
                        arrows,
                    });
                }
            }
        }
        words.extend(next.iter().cloned());
        if words.len() > WORD_CAP {
            return None;
        }
        frontier = next;
    }
    let index: BTreeMap<&PathWord, usize> =
        words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let rules = gwsa_rules(data, ring, false, false);
    let mut span = RowSpace::new(ring.p, words.len());
    for (wi, w) in words.iter().enumerate() {
        for rule in &rules {
            let l = rule.lhs.len();
            if w.len() < l {
                continue;
            }
            for pos in 0..=w.len() - l {
                if w.arrows[pos..pos + l] != rule.lhs[..] {
                    continue;
                }
                let mut v = vec![0u64; words.len()];
                v[wi] = 1;
                for (co, rw) in &rule.rhs {
                    let mut arrows = Vec::with_capacity(w.len() - l + rw.len());
                    arrows.extend_from_slice(&w.arrows[..pos]);
                    arrows.extend_from_slice(rw);
                    arrows.extend_from_slice(&w.arrows[pos + l..]);
                    if arrows.len() > b {
                        continue;
                    }
                    let spliced = PathWord {
                        source: w.source,
                        arrows,
                    };
                    let j = *index.get(&spliced).expect("spliced word in range");
                    v[j] = (v[j] + ring.p - co.0[0] % ring.p) % ring.p;
                }
                span.insert(v);
            }
        }
    }
    Some((words.len(), span.dim()))
}

/// Check the defining conditions against a built algebra: the dimension
/// formula, the socle relations, the sufficient-condition hypotheses, and
/// connectivity of the underlying graph.
pub fn validate_gwsa(alg: &FDAlgebra, data: &GWSAData) -> Result<GwsaReport, GwsaError> {
    let q = &data.quiver;
    let ring = &alg.ring;
    let dim_expected = data.expected_dim();
    let basis_words = alg.dim_words() as u64;
    let (dim_actual, dim_exact) = match truncated_quotient_dim(data, ring) {
        Some((n, rank)) => ((n - rank) as u64, true),
        None => (basis_words, false),
    };
    let dim_ok = dim_actual == dim_expected;

    let mut socle = Vec::new();
    let mut socle_ok = true;
    for a in 0..q.n_arrows() {
        if data.mn(a) < 2 {
            continue;
        }
        let bar = q.bar[a];
        let n_a = data.orbits.n_of(a) as u64;
        let n_bar = data.orbits.n_of(bar) as u64;
        let m_a = data.m[data.orbits.orbit_of[a]];
        let e_min = if n_a == 1 { 2 } else { 1 };
        let e_max = m_a + 1;
        let mut ok = true;
        let aw: Vec<usize> = a_word(data, a).iter().map(|&x| x as usize).collect();
        let a_elem = alg.word_elem(&aw)?;
        for e in e_min..=e_max {
            let w1: Vec<usize> = orbit_path(q, a, (e * n_a) as usize)
                .iter()
                .map(|&x| x as usize)
                .collect();
            let w2: Vec<usize> = orbit_path(q, bar, (e * n_bar) as usize)
                .iter()
                .map(|&x| x as usize)
                .collect();
            let s = elem_add(ring, &alg.word_elem(&w1)?, &alg.word_elem(&w2)?);
            let prod = multiply(&s, &a_elem, alg)?;
            if !prod.is_empty() {
                ok = false;
            }
        }
        if !ok {
            socle_ok = false;
        }
        socle.push(SocleCheck {
            arrow: q.arrow_ids[a].clone(),
            e_min,
            e_max,
            ok,
        });
    }

    let quaternion_min = |threshold: u64| {
        (0..q.n_arrows()).all(|a| data.t0[q.bar[a]] == 0 || data.mn(a) >= threshold)
    };
    let full_z = (0..q.n_arrows()).all(|a| {
        let w = vec![a, q.f[a], q.g[q.f[a]]];
        data.z.contains(&w)
    });
    let sufficient = if full_z && quaternion_min(3) {
        Some(SufficientRoute::FullZAndThree)
    } else if quaternion_min(4) {
        Some(SufficientRoute::FourWhereQuaternion)
    } else {
        None
    };

    let connected = graph_predicates(&brauer_graph(q)).connected;

    Ok(GwsaReport {
        dim_expected,
        dim_actual,
        dim_exact,
        dim_ok,
        basis_words,
        socle,
        socle_ok,
        sufficient,
        connected,
    })
}

/// Verify that the given generator images define an algebra isomorphism from
/// a word-presented algebra (over a prime field) onto a structure-constant
/// algebra: the induced linear map must be bijective and multiplicative on
/// all basis pairs.
pub fn verify_hom(
    src: &FDAlgebra,
    tgt: &TableAlgebra,
    idem_images: &[Vec<u64>],
    arrow_images: &[Vec<u64>],
) -> Result<bool, GwsaError> {
    if src.ring.n != 0 || src.ring.p != tgt.p {
        return Err(GwsaError::DimensionMismatch {
            detail: "source must be over the same prime field as the target".to_string(),
        });
    }
    if src.dim_flat() != tgt.dim {
        return Err(GwsaError::DimensionMismatch {
            detail: alloc::format!("source dim {} != target dim {}", src.dim_flat(), tgt.dim),
        });
    }
    let q = &src.quiver;
    if idem_images.len() != q.n_vertices() || arrow_images.len() != q.n_arrows() {
        return Err(GwsaError::DimensionMismatch {
            detail: "one image per vertex and per arrow required".to_string(),
        });
    }
    let p = tgt.p;
    let sv = |v: &[u64]| -> SVec {
        v.iter()
            .enumerate()
            .filter(|(_, x)| **x % p != 0)
            .map(|(i, x)| (i as u32, *x % p))
            .collect()
    };
    // Images of basis words via prefix products (the basis is sorted by
    // length, so prefixes are already computed).
    let mut images: Vec<SVec> = Vec::with_capacity(src.basis.len());
    for (i, w) in src.basis.iter().enumerate() {
        let img = if w.is_empty() {
            sv(&idem_images[w.source as usize])
        } else {
            let prefix = PathWord {
                source: w.source,
                arrows: w.arrows[..w.len() - 1].to_vec(),
            };
            let pi = *src.index.get(&prefix).expect("prefix of a basis word");
            debug_assert!(pi < i);
            tgt.mul(&images[pi], &sv(&arrow_images[*w.arrows.last().unwrap() as usize]))
        };
        images.push(img);
    }
    // Bijectivity.
    let mut mat = FpMat::zero(p, tgt.dim, src.basis.len());
    for (j, img) in images.iter().enumerate() {
        for &(r, x) in img {
            mat.set(r as usize, j, x);
        }
    }
    if mat.rank() != tgt.dim {
        return Ok(false);
    }
    // Multiplicativity on all basis pairs.
    for i in 0..src.basis.len() {
        let ti = src.basis[i].target(q);
        for j in 0..src.basis.len() {
            let lhs = if src.basis[j].source as usize == ti {
                let mut ei = crate::rewrite::Element::new();
                crate::rewrite::elem_add_term(
                    &src.ring,
                    &mut ei,
                    src.basis[i].clone(),
                    src.ring.one(),
                );
                let mut ej = crate::rewrite::Element::new();
                crate::rewrite::elem_add_term(
                    &src.ring,
                    &mut ej,
                    src.basis[j].clone(),
                    src.ring.one(),
                );
                let prod = multiply(&ei, &ej, src)?;
                let mut acc: BTreeMap<u32, u64> = BTreeMap::new();
                for (w, co) in &prod {
                    let k = *src.index.get(w).unwrap();
                    for &(r, x) in &images[k] {
                        let e = acc.entry(r).or_insert(0);
                        *e = (*e + co.0[0] % p * x) % p;
                    }
                }
                acc.into_iter().filter(|&(_, v)| v != 0).collect::<SVec>()
            } else {
                SVec::new()
            };
            if tgt.mul(&images[i], &images[j]) != lhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn arrs(v: &[(&str, &str, &str)]) -> Vec<(String, String, String)> {
    v.iter()
        .map(|(a, b, c)| (a.to_string(), b.to_string(), c.to_string()))
        .collect()
}

fn cycs(v: &[&[&str]]) -> Vec<Vec<String>> {
    v.iter()
        .map(|c| c.iter().map(|s| s.to_string()).collect())
        .collect()
}

/// Triangle quiver: a1:1→2, a2:2→3, a3:3→1, b1:1→3, b2:2→1, b3:3→2 with
/// f = (a1 a2 a3)(b3 b2 b1). The g-orbits are {a1,b2}, {a2,b3}, {a3,b1}.
pub fn quiver_k() -> Quiver2Reg {
    build_quiver(
        &strs(&["1", "2", "3"]),
        &arrs(&[
            ("a1", "1", "2"),
            ("a2", "2", "3"),
            ("a3", "3", "1"),
            ("b1", "1", "3"),
            ("b2", "2", "1"),
            ("b3", "3", "2"),
        ]),
        &cycs(&[&["a1", "a2", "a3"], &["b3", "b2", "b1"]]),
    )
    .expect("triangle quiver is valid")
}

/// Two-vertex quiver with loops: a1:1→2, a2:2→1, loops b1 at 1 and b2 at 2,
/// f = (a1 b2 a2)(b1). The g-orbits are {a1,a2,b1} and {b2}.
pub fn quiver_b() -> Quiver2Reg {
    build_quiver(
        &strs(&["1", "2"]),
        &arrs(&[
            ("a1", "1", "2"),
            ("a2", "2", "1"),
            ("b1", "1", "1"),
            ("b2", "2", "2"),
        ]),
        &cycs(&[&["a1", "b2", "a2"], &["b1"]]),
    )
    .expect("two-vertex loop quiver is valid")
}

/// Three-vertex quiver with loops: a1:1→2, a2:2→3, a3:3→1 and loops b1, b2,
/// b3, f = (a1 b2 a2 b3 a3 b1). The g-orbits are {a1,a2,a3}, {b1}, {b2}, {b3}.
pub fn quiver_r() -> Quiver2Reg {
    build_quiver(
        &strs(&["1", "2", "3"]),
        &arrs(&[
            ("a1", "1", "2"),
            ("a2", "2", "3"),
            ("a3", "3", "1"),
            ("b1", "1", "1"),
            ("b2", "2", "2"),
            ("b3", "3", "3"),
        ]),
        &cycs(&[&["a1", "b2", "a2", "b3", "a3", "b1"]]),
    )
    .expect("three-vertex loop quiver is valid")
}

fn range_err(detail: &str) -> GwsaError {
    GwsaError::ParameterOutOfRange {
        detail: detail.to_string(),
    }
}

/// Build the data of one of the named families. `a` holds the integer
/// parameters in the order of the family's superscripts; `u` and `v` are the
/// scalar parameters (ignored by families that have none); `p` is the prime
/// used to interpret scalars.
pub fn preset(name: &str, a: &[u64], u: u64, v: u64, p: u64) -> Result<GWSAData, GwsaError> {
    let check_v01 = |v: u64| -> Result<(), GwsaError> {
        if v > 1 {
            Err(range_err("v must be 0 or 1"))
        } else {
            Ok(())
        }
    };
    let data = match name {
        "D(2B)" => {
            let [a1, a2] = params::<2>(a)?;
            if !(a1 >= a2 && a2 >= 1) {
                return Err(range_err("D(2B) requires a1 >= a2 >= 1"));
            }
            check_v01(v)?;
            let q = quiver_b();
            // Arrows a1,a2,b1,b2; orbit 0 = {a1,a2,b1}, orbit 1 = {b2}.
            let mut t1 = vec![0; 4];
            t1[2] = v;
            GWSAData::new(q, vec![a1, a2], vec![1, 1], vec![0; 4], t1, vec![])
        }
        "D(3K)" => {
            let [a1, a2, a3] = params::<3>(a)?;
            if !(a1 >= a2 && a2 >= a3 && a3 >= 1) {
                return Err(range_err("D(3K) requires a1 >= a2 >= a3 >= 1"));
            }
            let q = quiver_k();
            GWSAData::new(q, vec![a1, a2, a3], vec![1; 3], vec![0; 6], vec![0; 6], vec![])
        }
        "D(3R)" => {
            let [a1, b1, b2, b3] = params::<4>(a)?;
            if !(b1 >= b2 && b2 >= b3 && b3 >= a1 && a1 >= 1) {
                return Err(range_err("D(3R) requires b1 >= b2 >= b3 >= a1 >= 1"));
            }
            if b2 < 2 {
                return Err(range_err("D(3R) requires b2 >= 2"));
            }
            let q = quiver_r();
            // Orbit 0 = {a1,a2,a3}; orbits 1,2,3 = the loops b1,b2,b3.
            GWSAData::new(q, vec![a1, b1, b2, b3], vec![1; 4], vec![0; 6], vec![0; 6], vec![])
        }
        "SD(2B)1" => {
            let [a1, a2] = params::<2>(a)?;
            if a1 < 1 || a2 < 1 {
                return Err(range_err("SD(2B)1 requires a1, a2 >= 1"));
            }
            if (a1, a2) == (1, 1) {
                return Err(range_err("SD(2B)1 requires (a1, a2) != (1, 1)"));
            }
            check_v01(v)?;
            let q = quiver_b();
            let mut t0 = vec![0; 4];
            t0[2] = 1;
            let mut t1 = vec![0; 4];
            t1[2] = v;
            GWSAData::new(q, vec![a1, a2], vec![1, 1], t0, t1, vec![])
        }
        "SD(2B)2" => {
            let [a1, a2] = params::<2>(a)?;
            if !(a1 >= 1 && a2 >= 2 && a1 + a2 >= 4) {
                return Err(range_err("SD(2B)2 requires a1 >= 1, a2 >= 2, a1 + a2 >= 4"));
            }
            check_v01(v)?;
            let q = quiver_b();
            // t = 1 on the f-orbit (a1 b2 a2), t1 = v on the fixed loop b1.
            let t0 = vec![1, 1, 0, 1];
            let mut t1 = vec![0; 4];
            t1[2] = v;
            // Z = {a1·b2·b2, b2·b2·a2}.
            let z = vec![vec![0, 3, 3], vec![3, 3, 1]];
            GWSAData::new(q, vec![a1, a2], vec![1, 1], t0, t1, z)
        }
        "SD(3K)" => {
            let [a1, a2, a3] = params::<3>(a)?;
            if !(a1 >= a2 && a2 >= a3 && a3 >= 1) {
                return Err(range_err("SD(3K) requires a1 >= a2 >= a3 >= 1"));
            }
            if a1 < 2 {
                return Err(range_err("SD(3K) requires a1 >= 2"));
            }
            let q = quiver_k();
            // t = 1 on the f-orbit (a1 a2 a3), 0 on (b3 b2 b1).
            let t0 = vec![1, 1, 1, 0, 0, 0];
            GWSAData::new(q, vec![a1, a2, a3], vec![1; 3], t0, vec![0; 6], vec![])
        }
        "Q(2B)1" => {
            let [a1, a2] = params::<2>(a)?;
            if !(a1 >= 1 && a2 >= 3) {
                return Err(range_err("Q(2B)1 requires a1 >= 1, a2 >= 3"));
            }
            if u % p == 0 {
                return Err(range_err("Q(2B)1 requires u nonzero"));
            }
            let q = quiver_b();
            // c = u on the orbit of b1, u^{1-a2} on the orbit of b2.
            let c2 = pow_mod(inv_mod(u % p, p), a2 - 1, p);
            let t0 = vec![1, 1, 1, 1];
            let mut t1 = vec![0; 4];
            t1[2] = v % p;
            // Z = {b1·b1·a1, a2·b1·b1}.
            let z = vec![vec![2, 2, 0], vec![1, 2, 2]];
            GWSAData::new(q, vec![a1, a2], vec![u % p, c2], t0, t1, z)
        }
        "Q(3K)" => {
            let [a1, a2, a3] = params::<3>(a)?;
            if !(a1 >= a2 && a2 >= a3 && a3 >= 1) {
                return Err(range_err("Q(3K) requires a1 >= a2 >= a3 >= 1"));
            }
            if a2 < 2 {
                return Err(range_err("Q(3K) requires a2 >= 2"));
            }
            if (a1, a2, a3) == (2, 2, 1) {
                return Err(range_err("Q(3K) requires (a1, a2, a3) != (2, 2, 1)"));
            }
            let q = quiver_k();
            // Z = {b2·a1·a2, a2·b3·b2, a3·b1·b3}.
            let z = vec![vec![4, 0, 1], vec![1, 5, 4], vec![2, 3, 5]];
            GWSAData::new(
                q,
                vec![a1, a2, a3],
                vec![1; 3],
                vec![1; 6],
                vec![0; 6],
                z,
            )
        }
        other => {
            return Err(range_err(&alloc::format!("unknown family {other}")));
        }
    };
    data.validate(p)?;
    Ok(data)
}

fn params<const N: usize>(a: &[u64]) -> Result<[u64; N], GwsaError> {
    a.try_into().map_err(|_| GwsaError::ParameterOutOfRange {
        detail: alloc::format!("expected {N} integer parameters, got {}", a.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::sv_from_dense;

    #[test]
    fn d3k_111_dimension_and_cartan() {
        let data = preset("D(3K)", &[1, 1, 1], 0, 0, 2).unwrap();
        let alg = make_gwsa(&data, CoeffRing::field(2)).unwrap();
        assert_eq!(alg.dim_words(), 12);
        assert_eq!(
            alg.cartan_matrix(),
            vec![vec![2, 1, 1], vec![1, 2, 1], vec![1, 1, 2]]
        );
        let rep = validate_gwsa(&alg, &data).unwrap();
        assert!(rep.dim_ok && rep.dim_exact && rep.socle_ok && rep.connected);
        // t = 0 everywhere, so the quaternion thresholds are vacuous.
        assert_eq!(rep.sufficient, Some(SufficientRoute::FourWhereQuaternion));
    }

    #[test]
    fn twisted_matches_plain_over_gf2() {
        let q = quiver_k();
        let tw = make_twisted_bga(&q, &[1, 1, 1], CoeffRing::field(2)).unwrap();
        let data = preset("D(3K)", &[1, 1, 1], 0, 0, 2).unwrap();
        let plain = make_gwsa(&data, CoeffRing::field(2)).unwrap();
        assert_eq!(tw.basis, plain.basis);
        assert_eq!(tw.to_table().table, plain.to_table().table);
    }

    #[test]
    fn twisted_small_quivers() {
        // Single edge: one vertex, two loops, f = (a b), orbits {a}, {b}.
        let q = build_quiver(
            &strs(&["1"]),
            &arrs(&[("a", "1", "1"), ("b", "1", "1")]),
            &cycs(&[&["a", "b"]]),
        )
        .unwrap();
        let alg = make_twisted_bga(&q, &[1, 1], CoeffRing::field(3)).unwrap();
        assert_eq!(alg.dim_words(), 2);
        // Two-edge tree: a 2-cycle a, b with loops c at 1 and d at 2;
        // f = (a d b c) makes the g-orbits {a,b}, {c}, {d}.
        let q2 = build_quiver(
            &strs(&["1", "2"]),
            &arrs(&[("a", "1", "2"), ("b", "2", "1"), ("c", "1", "1"), ("d", "2", "2")]),
            &cycs(&[&["a", "d", "b", "c"]]),
        )
        .unwrap();
        let od = q2.orbit_data();
        assert_eq!(
            od.orbits.iter().map(|o| o.len()).collect::<Vec<_>>(),
            vec![2, 1, 1]
        );
        let alg2 = make_twisted_bga(&q2, &[1, 1, 1], CoeffRing::field(3)).unwrap();
        assert_eq!(alg2.dim_words(), 6);
    }

    #[test]
    fn q3k_222_dimension_and_validation() {
        let data = preset("Q(3K)", &[2, 2, 2], 0, 0, 2).unwrap();
        let alg = make_gwsa(&data, CoeffRing::field(2)).unwrap();
        assert_eq!(alg.dim_words(), 24);
        let rep = validate_gwsa(&alg, &data).unwrap();
        assert!(rep.dim_ok && rep.dim_exact);
        assert!(rep.socle_ok);
        assert_eq!(rep.sufficient, Some(SufficientRoute::FourWhereQuaternion));
    }

    #[test]
    fn q3k_321_collapses_below_threshold() {
        // With the smallest multiplicity equal to 1 the cubic zero relation
        // β₂α₁α₂ combines with α₁α₂ = β₁ (a length-1 A-word) to force
        // β₂β₁ = 0 and hence α₂β₃α₂ = 0, so the quotient drops below the
        // orbit-sum dimension. The rewriting basis still counts 24 words; the
        // exact rank computation detects the collapse.
        let data = preset("Q(3K)", &[3, 2, 1], 0, 0, 2).unwrap();
        assert_eq!(data.expected_dim(), 24);
        let alg = make_gwsa(&data, CoeffRing::field(2)).unwrap();
        assert_eq!(alg.dim_words(), 24);
        let rep = validate_gwsa(&alg, &data).unwrap();
        assert!(rep.dim_exact);
        assert_eq!(rep.dim_actual, 19);
        assert!(!rep.dim_ok);
        assert_eq!(rep.sufficient, None);
    }

    #[test]
    fn q3k_111_shape_without_sufficient_route() {
        // (Q_K, m=1, c=1, t=1, Z=∅) over GF(2): dimension 12 but outside the
        // sufficient thresholds.
        let q = quiver_k();
        let data = GWSAData::new(q, vec![1; 3], vec![1; 3], vec![1; 6], vec![0; 6], vec![]);
        let alg = make_gwsa(&data, CoeffRing::field(2)).unwrap();
        assert_eq!(alg.dim_words(), 12);
        let rep = validate_gwsa(&alg, &data).unwrap();
        assert!(rep.dim_ok && rep.dim_exact);
        assert_eq!(rep.sufficient, None);
    }

    /// k³ ⊕ M₃(k): basis E1, E2, E3 then the matrix units E(i,j).
    fn split_semisimple_target(p: u64) -> TableAlgebra {
        let dim = 12;
        let unit = |i: usize, j: usize| 3 + 3 * i + j;
        let mut table = vec![Vec::new(); dim * dim];
        for i in 0..3 {
            table[i * dim + i] = vec![(i as u32, 1)];
        }
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        if j == k {
                            table[unit(i, j) * dim + unit(k, l)] =
                                vec![(unit(i, l) as u32, 1)];
                        }
                    }
                }
            }
        }
        let idems: Vec<SVec> = (0..3)
            .map(|i| vec![(i as u32, 1), (unit(i, i) as u32, 1)])
            .collect();
        let corner: Vec<(u32, u32)> = (0..3)
            .map(|i| (i as u32, i as u32))
            .chain((0..3).flat_map(|i| (0..3).map(move |j| (i as u32, j as u32))))
            .collect();
        let labels = (0..dim).map(|i| alloc::format!("s{i}")).collect();
        TableAlgebra {
            p,
            dim,
            n_idem: 3,
            idems,
            corner,
            labels,
            table,
        }
    }

    #[test]
    fn split_semisimple_isomorphism_over_gf2() {
        let q = quiver_k();
        let data = GWSAData::new(q, vec![1; 3], vec![1; 3], vec![1; 6], vec![0; 6], vec![]);
        let alg = make_gwsa(&data, CoeffRing::field(2)).unwrap();
        let tgt = split_semisimple_target(2);
        let unit = |i: usize, j: usize| 3 + 3 * i + j;
        let mut idem_images = vec![vec![0u64; 12]; 3];
        for i in 0..3 {
            idem_images[i][i] = 1;
            idem_images[i][unit(i, i)] = 1;
        }
        // a_i: i → i+1 maps to E(i, i+1); b_i: i → i-1 maps to E(i, i-1).
        let mut arrow_images = vec![vec![0u64; 12]; 6];
        for i in 0..3 {
            arrow_images[i][unit(i, (i + 1) % 3)] = 1;
            arrow_images[3 + i][unit(i, (i + 2) % 3)] = 1;
        }
        assert_eq!(verify_hom(&alg, &tgt, &idem_images, &arrow_images), Ok(true));
        // Corrupt one entry: the map is no longer multiplicative.
        let mut bad = arrow_images.clone();
        bad[0][unit(0, 2)] = 1;
        assert_eq!(verify_hom(&alg, &tgt, &idem_images, &bad), Ok(false));
        // Centre of the target has rank 4 (three scalars plus the identity of
        // the matrix block).
        assert_eq!(tgt.centre().len(), 4);
        let _ = sv_from_dense(2, &idem_images[0]);
    }

    #[test]
    fn identity_map_verifies() {
        let data = preset("D(3K)", &[1, 1, 1], 0, 0, 2).unwrap();
        let alg = make_gwsa(&data, CoeffRing::field(2)).unwrap();
        let t = alg.to_table();
        let idem_images: Vec<Vec<u64>> = (0..3)
            .map(|v| {
                let mut e = crate::rewrite::Element::new();
                crate::rewrite::elem_add_term(
                    &alg.ring,
                    &mut e,
                    PathWord::idempotent(v),
                    alg.ring.one(),
                );
                alg.elem_to_flat(&e)
            })
            .collect();
        let arrow_images: Vec<Vec<u64>> = (0..6)
            .map(|a| alg.elem_to_flat(&alg.arrow_elem(a)))
            .collect();
        assert_eq!(verify_hom(&alg, &t, &idem_images, &arrow_images), Ok(true));
    }

    #[test]
    fn preset_dimensions() {
        let cases: &[(&str, &[u64], u64, u64, u64, u64)] = &[
            // (family, params, u, v, p, expected dim)
            ("D(2B)", &[2, 1], 0, 0, 2, 19),
            ("D(2B)", &[2, 2], 0, 1, 2, 20),
            ("D(3K)", &[2, 2, 1], 0, 0, 2, 20),
            ("D(3R)", &[1, 2, 2, 2], 0, 0, 2, 15),
            ("SD(2B)1", &[2, 1], 0, 0, 2, 19),
            ("SD(2B)1", &[1, 2], 0, 1, 2, 11),
            ("SD(2B)2", &[2, 2], 0, 1, 2, 20),
            ("SD(3K)", &[2, 1, 1], 0, 0, 2, 16),
            ("Q(2B)1", &[1, 3], 2, 0, 3, 12),
            ("Q(2B)1", &[2, 4], 2, 1, 3, 22),
            ("Q(3K)", &[2, 2, 2], 0, 0, 2, 24),
            ("Q(3K)", &[3, 3, 3], 0, 0, 2, 36),
        ];
        for &(name, a, u, v, p, dim) in cases {
            let data = preset(name, a, u, v, p).unwrap();
            assert_eq!(data.expected_dim(), dim, "{name} expected dim");
            let alg = make_gwsa(&data, CoeffRing::field(p)).unwrap();
            assert_eq!(alg.dim_words() as u64, dim, "{name} basis count");
            let rep = validate_gwsa(&alg, &data).unwrap();
            assert!(rep.dim_ok, "{name} dim check");
            assert!(rep.socle_ok, "{name} socle check");
        }
    }

    #[test]
    fn preset_range_errors() {
        assert!(matches!(
            preset("Q(3K)", &[2, 2, 1], 0, 0, 2),
            Err(GwsaError::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            preset("SD(2B)1", &[1, 1], 0, 0, 2),
            Err(GwsaError::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            preset("D(3R)", &[2, 2, 2, 1], 0, 0, 2),
            Err(GwsaError::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            preset("Q(2B)1", &[1, 3], 0, 0, 2),
            Err(GwsaError::ParameterOutOfRange { .. })
        ));
        assert!(matches!(
            preset("nope", &[], 0, 0, 2),
            Err(GwsaError::ParameterOutOfRange { .. })
        ));
    }

    #[test]
    fn invalid_t_data_rejected() {
        // t1 != 0 on a non-loop arrow.
        let q = quiver_k();
        let mut t1 = vec![0; 6];
        t1[0] = 1;
        let data = GWSAData::new(q, vec![1; 3], vec![1; 3], vec![0; 6], t1, vec![]);
        assert!(matches!(
            data.validate(2),
            Err(GwsaError::InvalidTData { .. })
        ));
    }
}
