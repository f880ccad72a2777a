//! Two-term silting complexes: a brute-force enumeration oracle, irreducible
//! mutation, poset construction, lifts to truncated orders, and transport of
//! complexes between two reductions of one order.
//!
//! Two-term complexes live in degrees {-1, 0}. For a minimal such complex
//! (radical differential) no vertex can appear in both degrees of a
//! presilting complex: an identity component Q_v → P_v would give a chain
//! map X → X[1] that cannot be null-homotopic, because boundaries factor
//! through the radical differential. The brute-force search below leans on
//! this to enumerate shapes with disjoint degree supports only.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{sv_add, sv_scale, sv_to_dense, SVec, TableAlgebra};
use crate::homotopy::{
    compose_maps, cone, decompose, fingerprint, hom_dim, hom_frame, hom_space, is_isomorphic,
    is_presilting, minimize, AMat, ChainMap, HomotopyError, ProjComplex,
};
use crate::linalg::{FpMat, RowSpace};
use crate::orders::{ideal_of, Reduction, TruncOrder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SiltingError {
    ApproximationNotFound { detail: String },
    ResultNotPresilting { detail: String },
    NodeCapExceeded { cap: usize },
    CorrectionUnsolvable { detail: String },
    NotPresiltingInput { detail: String },
    Homotopy(HomotopyError),
}

impl core::fmt::Display for SiltingError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            SiltingError::ApproximationNotFound { detail } => {
                write!(f, "approximation not found: {detail}")
            }
            SiltingError::ResultNotPresilting { detail } => {
                write!(f, "mutation result fails presilting: {detail}")
            }
            SiltingError::NodeCapExceeded { cap } => write!(f, "node cap {cap} exceeded"),
            SiltingError::CorrectionUnsolvable { detail } => {
                write!(f, "lift correction unsolvable: {detail}")
            }
            SiltingError::NotPresiltingInput { detail } => {
                write!(f, "input is not presilting: {detail}")
            }
            SiltingError::Homotopy(e) => write!(f, "{e}"),
        }
    }
}

impl From<HomotopyError> for SiltingError {
    fn from(e: HomotopyError) -> Self {
        SiltingError::Homotopy(e)
    }
}

/// Build the two-term complex (Q at degree -1 → P at degree 0).
pub fn two_term(q: Vec<usize>, p: Vec<usize>, d: AMat) -> ProjComplex {
    if q.is_empty() {
        return ProjComplex {
            lo: 0,
            terms: vec![p],
            diffs: vec![],
        };
    }
    if p.is_empty() {
        return ProjComplex {
            lo: -1,
            terms: vec![q],
            diffs: vec![],
        };
    }
    ProjComplex {
        lo: -1,
        terms: vec![q, p],
        diffs: vec![d],
    }
}

/// The regular algebra as a stalk complex in degree 0.
pub fn regular_complex(t: &TableAlgebra) -> ProjComplex {
    ProjComplex {
        lo: 0,
        terms: vec![(0..t.n_idem).collect()],
        diffs: vec![],
    }
}

/// dim Hom(X, Y[1]) in the homotopy category for complexes in degrees
/// {-1, 0}: maps Q_X → P_Y modulo boundaries h₀∘d_X + d_Y∘h₋₁. A fast
/// special case of `hom_space`, used by the brute-force oracle.
pub fn two_term_hom1(t: &TableAlgebra, x: &ProjComplex, y: &ProjComplex) -> usize {
    debug_assert!(x.lo >= -1 && x.hi() <= 0 && y.lo >= -1 && y.hi() <= 0);
    let qx = x.term(-1).to_vec();
    let px = x.term(0).to_vec();
    let qy = y.term(-1).to_vec();
    let py = y.term(0).to_vec();
    if qx.is_empty() || py.is_empty() {
        return 0;
    }
    // Coordinates for Hom_A(Q_X, P_Y).
    let mut slots: Vec<(usize, usize, usize)> = Vec::new();
    for (c, &u) in qx.iter().enumerate() {
        for (r, &w) in py.iter().enumerate() {
            for coord in t.corner_basis(u, w) {
                slots.push((r, c, coord));
            }
        }
    }
    if slots.is_empty() {
        return 0;
    }
    let project = |m: &AMat| -> Vec<u64> {
        slots
            .iter()
            .map(|&(r, c, coord)| {
                m.get(r, c)
                    .iter()
                    .find(|&&(i, _)| i as usize == coord)
                    .map_or(0, |&(_, v)| v)
            })
            .collect()
    };
    let mut boundaries = RowSpace::new(t.p, slots.len());
    // h₀: P_X → P_Y, boundary h₀∘d_X.
    if let Some(dx) = x.diff(-1) {
        for (c, &u) in px.iter().enumerate() {
            for (r, &w) in py.iter().enumerate() {
                for coord in t.corner_basis(u, w) {
                    let mut h = AMat::zero(py.len(), px.len());
                    h.set(r, c, vec![(coord as u32, 1)]);
                    boundaries.insert(project(&h.compose(t, dx)));
                }
            }
        }
    }
    // h₋₁: Q_X → Q_Y, boundary d_Y∘h₋₁.
    if let Some(dy) = y.diff(-1) {
        for (c, &u) in qx.iter().enumerate() {
            for (r, &w) in qy.iter().enumerate() {
                for coord in t.corner_basis(u, w) {
                    let mut h = AMat::zero(qy.len(), qx.len());
                    h.set(r, c, vec![(coord as u32, 1)]);
                    boundaries.insert(project(&dy.compose(t, &h)));
                }
            }
        }
    }
    slots.len() - boundaries.dim()
}

/// Radical part of each corner, as sparse basis vectors grouped by corner.
/// Radical row-space rows stay corner-homogeneous because coordinates of
/// distinct corners are disjoint.
fn radical_corner_bases(t: &TableAlgebra) -> Vec<Vec<Vec<SVec>>> {
    let rad = t.radical();
    let mut out = vec![vec![Vec::new(); t.n_idem]; t.n_idem];
    for row in rad.basis() {
        let sv: SVec = row
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(i, &v)| (i as u32, v))
            .collect();
        let (i, j) = t.corner[sv[0].0 as usize];
        debug_assert!(sv.iter().all(|&(k, _)| t.corner[k as usize] == (i, j)));
        out[i as usize][j as usize].push(sv);
    }
    out
}

/// Result of the exhaustive two-term search: the indecomposable presilting
/// complexes found (up to isomorphism) and the index sets that form silting
/// complexes (pairwise Hom-vanishing, full summand count, unimodular K₀).
pub struct BruteForce {
    pub indecomposables: Vec<ProjComplex>,
    pub silting_sets: Vec<Vec<usize>>,
}

/// Exhaustive enumeration of two-term silting complexes, independent of the
/// mutation machinery. `max_mult` bounds the per-vertex summand multiplicity
/// in each degree; `dim_cap` skips differential spaces larger than p^cap
/// (none of the algebras in scope come close). Shapes keep the two degree
/// supports disjoint (see the module notes).
pub fn brute_force_two_term(t: &TableAlgebra, max_mult: usize, dim_cap: usize) -> BruteForce {
    let n = t.n_idem;
    let rad_corners = radical_corner_bases(t);
    let mut found: Vec<(Vec<i64>, ProjComplex)> = Vec::new();

    // Iterate over (q_mults, p_mults) with disjoint supports: per vertex,
    // one of {absent, q-side 1..max, p-side 1..max}.
    let options = 1 + 2 * max_mult;
    let mut shape = vec![0usize; n];
    loop {
        let mut q = Vec::new();
        let mut p = Vec::new();
        for (v, &s) in shape.iter().enumerate() {
            if s == 0 {
                continue;
            }
            let side_q = s <= max_mult;
            let mult = if side_q { s } else { s - max_mult };
            for _ in 0..mult {
                if side_q {
                    q.push(v);
                } else {
                    p.push(v);
                }
            }
        }
        if !(q.is_empty() && p.is_empty()) {
            scan_shape(t, &rad_corners, &q, &p, dim_cap, &mut found);
        }
        // Next shape.
        let mut i = 0;
        while i < n {
            shape[i] += 1;
            if shape[i] < options {
                break;
            }
            shape[i] = 0;
            i += 1;
        }
        if i == n {
            break;
        }
    }

    let indecomposables: Vec<ProjComplex> = found.into_iter().map(|(_, x)| x).collect();

    // Pairwise compatibility and silting sets.
    let k = indecomposables.len();
    let mut compat = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            compat[i][j] =
                two_term_hom1(t, &indecomposables[i], &indecomposables[j]) == 0;
        }
    }
    let mut silting_sets = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn cliques(
        k: usize,
        n: usize,
        compat: &[Vec<bool>],
        indecs: &[ProjComplex],
        current: &mut Vec<usize>,
        start: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == n {
            // Unimodular K₀ basis.
            let mat: Vec<Vec<i64>> = current.iter().map(|&i| indecs[i].k0(n)).collect();
            if det_i64(&mat).abs() == 1 {
                out.push(current.clone());
            }
            return;
        }
        for cand in start..k {
            if current
                .iter()
                .all(|&i| compat[i][cand] && compat[cand][i])
            {
                current.push(cand);
                cliques(k, n, compat, indecs, current, cand + 1, out);
                current.pop();
            }
        }
    }
    cliques(
        k,
        n,
        &compat,
        &indecomposables,
        &mut current,
        0,
        &mut silting_sets,
    );
    BruteForce {
        indecomposables,
        silting_sets,
    }
}

fn det_i64(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    if n == 1 {
        return m[0][0];
    }
    let mut det = 0i64;
    for c in 0..n {
        let minor: Vec<Vec<i64>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(j, _)| j != c)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect();
        let s = if c % 2 == 0 { 1 } else { -1 };
        det += s * m[0][c] * det_i64(&minor);
    }
    det
}

/// Enumerate all differentials of one shape over the radical corner bases,
/// keep the presilting ones, and record new indecomposables up to
/// isomorphism.
fn scan_shape(
    t: &TableAlgebra,
    rad_corners: &[Vec<Vec<SVec>>],
    q: &[usize],
    p: &[usize],
    dim_cap: usize,
    found: &mut Vec<(Vec<i64>, ProjComplex)>,
) {
    // Differential coordinate slots.
    let mut slots: Vec<(usize, usize, &SVec)> = Vec::new();
    for (c, &u) in q.iter().enumerate() {
        for (r, &w) in p.iter().enumerate() {
            for b in &rad_corners[u][w] {
                slots.push((r, c, b));
            }
        }
    }
    if slots.len() > dim_cap {
        return;
    }
    let mut counter = vec![0u64; slots.len()];
    loop {
        let mut d = AMat::zero(p.len(), q.len());
        for (&(r, c, b), &x) in slots.iter().zip(&counter) {
            if x != 0 {
                let e = sv_add(t.p, d.get(r, c), &sv_scale(t.p, b, x));
                d.set(r, c, e);
            }
        }
        // Candidates with a zero row or column, or with equal columns (rows)
        // at summands of the same vertex, are decomposable after a change of
        // basis; their indecomposable parts show up at smaller shapes.
        if mixed_shape_reduced(&d, q, p) {
            consider_candidate(t, q, p, d, found);
        }
        // Next counter value; stalks (no slots) run exactly once.
        let mut i = 0;
        while i < counter.len() {
            counter[i] += 1;
            if counter[i] < t.p {
                break;
            }
            counter[i] = 0;
            i += 1;
        }
        if i == counter.len() {
            break;
        }
    }
}

/// Cheap indecomposability pre-filter for shapes with both degrees present:
/// every row and column of d nonzero, and columns (rows) within a block of
/// same-vertex summands strictly increasing.
fn mixed_shape_reduced(d: &AMat, q: &[usize], p: &[usize]) -> bool {
    if q.is_empty() || p.is_empty() {
        return true;
    }
    let col = |c: usize| -> Vec<&SVec> { (0..p.len()).map(|r| d.get(r, c)).collect() };
    let row = |r: usize| -> Vec<&SVec> { (0..q.len()).map(|c| d.get(r, c)).collect() };
    for c in 0..q.len() {
        if col(c).iter().all(|e| e.is_empty()) {
            return false;
        }
        if c + 1 < q.len() && q[c] == q[c + 1] && col(c) >= col(c + 1) {
            return false;
        }
    }
    for r in 0..p.len() {
        if row(r).iter().all(|e| e.is_empty()) {
            return false;
        }
        if r + 1 < p.len() && p[r] == p[r + 1] && row(r) >= row(r + 1) {
            return false;
        }
    }
    true
}

fn consider_candidate(
    t: &TableAlgebra,
    q: &[usize],
    p: &[usize],
    d: AMat,
    found: &mut Vec<(Vec<i64>, ProjComplex)>,
) {
    let x = two_term(q.to_vec(), p.to_vec(), d);
    if two_term_hom1(t, &x, &x) != 0 {
        return;
    }
    // Only indecomposables enter the list; summands of decomposable hits
    // are found at smaller shapes.
    let Ok(parts) = decompose(t, &x) else {
        return;
    };
    if parts.len() != 1 || parts[0].1 != 1 {
        return;
    }
    let rep = parts[0].0.clone();
    let key = fingerprint(t, &rep);
    for (k2, r2) in found.iter() {
        if *k2 == key && is_isomorphic(t, r2, &rep) {
            return;
        }
    }
    found.push((key, rep));
}

/// T ≥ U in the silting order: no nonzero maps T → U[i] for i > 0. Shifts
/// past the degree overlap have empty chain-map frames and cost nothing, so
/// the scan stops there.
pub fn order_geq(t: &TableAlgebra, upper: &ProjComplex, lower: &ProjComplex) -> bool {
    let max = lower.hi() - upper.lo;
    for i in 1..=max {
        if hom_dim(t, upper, lower, i) != 0 {
            return false;
        }
    }
    true
}

/// Deterministic processing order for the complement summands: by
/// fingerprint, ties by position.
fn rest_order(t: &TableAlgebra, summands: &[ProjComplex], at: usize) -> Vec<usize> {
    let mut rest: Vec<(Vec<i64>, usize)> = (0..summands.len())
        .filter(|&j| j != at)
        .map(|j| (fingerprint(t, &summands[j]), j))
        .collect();
    rest.sort();
    rest.into_iter().map(|(_, j)| j).collect()
}

/// Greedily delete approximation copies while the factorisation property
/// survives; returns the kept flags. `composites[c][ji]` holds, for copy c
/// and complement index ji, the Hom-frame coordinates of everything copy c
/// can reach in Hom(·, R_j) (left case) or Hom(R_j, ·) (right case).
fn prune_copies(
    p: u64,
    frames: &[crate::homotopy::HomFrame],
    composites: &[Vec<Vec<Vec<u64>>>],
) -> Result<Vec<bool>, SiltingError> {
    let n_copies = composites.len();
    let covered = |keep: &[bool]| -> bool {
        for (ji, fr) in frames.iter().enumerate() {
            let mut rs = fr.boundaries.clone();
            let base = rs.dim();
            let mut gain = 0usize;
            for c in 0..n_copies {
                if !keep[c] {
                    continue;
                }
                for v in &composites[c][ji] {
                    if rs.insert(v.clone()) {
                        gain += 1;
                    }
                }
            }
            debug_assert_eq!(rs.dim(), base + gain);
            if gain < fr.dim {
                return false;
            }
        }
        true
    };
    let _ = p;
    let mut keep = vec![true; n_copies];
    if !covered(&keep) {
        return Err(SiltingError::ApproximationNotFound {
            detail: String::from("hom-basis family does not cover the hom-space"),
        });
    }
    for c in 0..n_copies {
        keep[c] = false;
        if !covered(&keep) {
            keep[c] = true;
        }
    }
    Ok(keep)
}

fn replace_at(
    summands: &[ProjComplex],
    at: usize,
    parts: Vec<(ProjComplex, usize)>,
) -> Vec<ProjComplex> {
    let mut out = Vec::with_capacity(summands.len());
    for (j, s) in summands.iter().enumerate() {
        if j == at {
            for (part, mult) in &parts {
                for _ in 0..*mult {
                    out.push(part.clone());
                }
            }
        } else {
            out.push(s.clone());
        }
    }
    out
}

/// Left mutation at summand `at`: cone over a minimal left approximation
/// X → R' into the additive closure of the other summands.
pub fn left_mutation(
    t: &TableAlgebra,
    summands: &[ProjComplex],
    at: usize,
) -> Result<Vec<ProjComplex>, SiltingError> {
    let x = &summands[at];
    let rest = rest_order(t, summands, at);
    // One copy of R_j per Hom(X, R_j) basis class.
    let mut copies: Vec<(usize, ChainMap)> = Vec::new();
    for &j in &rest {
        for f in hom_space(t, x, &summands[j], 0).basis {
            copies.push((j, f));
        }
    }
    if !copies.is_empty() {
        let frames: Vec<_> = rest
            .iter()
            .map(|&j| hom_frame(t, x, &summands[j], 0))
            .collect();
        let mut composites = Vec::with_capacity(copies.len());
        for &(jc, ref f) in &copies {
            let mut per_target = Vec::with_capacity(rest.len());
            for (ji, &j) in rest.iter().enumerate() {
                let mut vecs = Vec::new();
                for psi in hom_space(t, &summands[jc], &summands[j], 0).basis {
                    let comp = compose_maps(t, x, &summands[jc], &summands[j], f, &psi);
                    vecs.push(frames[ji].coords(&comp));
                }
                per_target.push(vecs);
            }
            composites.push(per_target);
        }
        let keep = prune_copies(t.p, &frames, &composites)?;
        copies = copies
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(c, _)| c)
            .collect();
    }
    if copies.is_empty() {
        // Approximation target is zero; the cone is the shift.
        return Ok(replace_at(summands, at, vec![(x.shift(1), 1)]));
    }
    // Assemble R' and the stacked approximation map.
    let mut rprime = summands[copies[0].0].clone();
    for &(j, _) in &copies[1..] {
        rprime = rprime.direct_sum(t, &summands[j]);
    }
    let mut phi = ChainMap::zero(x, &rprime, 0);
    for k in 0..x.terms.len() {
        let d = x.lo + k as i32;
        let mut offset = 0usize;
        for &(j, ref f) in &copies {
            let rows = summands[j].term(d).len();
            for r in 0..rows {
                for c in 0..x.terms[k].len() {
                    let e = f.maps[k].get(r, c);
                    if !e.is_empty() {
                        phi.maps[k].set(offset + r, c, e.clone());
                    }
                }
            }
            offset += rows;
        }
    }
    debug_assert!(phi.defect(t, x, &rprime).iter().all(|m| m.is_zero()));
    let cn = minimize(t, &cone(t, &phi, x, &rprime));
    let parts = decompose(t, &cn)?;
    Ok(replace_at(summands, at, parts))
}

/// Right mutation at summand `at`: co-cone of a minimal right approximation
/// R' → X from the additive closure of the other summands.
pub fn right_mutation(
    t: &TableAlgebra,
    summands: &[ProjComplex],
    at: usize,
) -> Result<Vec<ProjComplex>, SiltingError> {
    let x = &summands[at];
    let rest = rest_order(t, summands, at);
    let mut copies: Vec<(usize, ChainMap)> = Vec::new();
    for &j in &rest {
        for f in hom_space(t, &summands[j], x, 0).basis {
            copies.push((j, f));
        }
    }
    if !copies.is_empty() {
        let frames: Vec<_> = rest
            .iter()
            .map(|&j| hom_frame(t, &summands[j], x, 0))
            .collect();
        let mut composites = Vec::with_capacity(copies.len());
        for &(jc, ref f) in &copies {
            let mut per_source = Vec::with_capacity(rest.len());
            for (ji, &j) in rest.iter().enumerate() {
                let mut vecs = Vec::new();
                for eta in hom_space(t, &summands[j], &summands[jc], 0).basis {
                    let comp = compose_maps(t, &summands[j], &summands[jc], x, &eta, f);
                    vecs.push(frames[ji].coords(&comp));
                }
                per_source.push(vecs);
            }
            composites.push(per_source);
        }
        let keep = prune_copies(t.p, &frames, &composites)?;
        copies = copies
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(c, _)| c)
            .collect();
    }
    if copies.is_empty() {
        return Ok(replace_at(summands, at, vec![(x.shift(-1), 1)]));
    }
    let mut rprime = summands[copies[0].0].clone();
    for &(j, _) in &copies[1..] {
        rprime = rprime.direct_sum(t, &summands[j]);
    }
    let mut psi = ChainMap::zero(&rprime, x, 0);
    for k in 0..rprime.terms.len() {
        let d = rprime.lo + k as i32;
        let rows = x.term(d).len();
        let mut offset = 0usize;
        for &(j, ref f) in &copies {
            let cols = summands[j].term(d).len();
            let fk = d - summands[j].lo;
            if fk >= 0 && (fk as usize) < f.maps.len() {
                let fm = &f.maps[fk as usize];
                for r in 0..rows {
                    for c in 0..cols {
                        let e = fm.get(r, c);
                        if !e.is_empty() {
                            psi.maps[k].set(r, offset + c, e.clone());
                        }
                    }
                }
            }
            offset += cols;
        }
    }
    debug_assert!(psi.defect(t, &rprime, x).iter().all(|m| m.is_zero()));
    let cn = minimize(t, &cone(t, &psi, &rprime, x).shift(-1));
    let parts = decompose(t, &cn)?;
    Ok(replace_at(summands, at, parts))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Criterion {
    /// Two-term: full summand count and the K₀ classes form a unimodular
    /// basis.
    TwoTermUnimodularBasis,
    /// Reached from the regular complex by this many irreducible mutations.
    MutationProvenance { steps: usize },
    /// Neither criterion applies; nothing beyond presilting is asserted.
    Uncertified,
}

#[derive(Clone, Debug)]
pub struct SiltingCertificate {
    pub presilting: bool,
    pub summand_count: usize,
    pub criterion: Criterion,
    pub ok: bool,
}

fn total_complex(t: &TableAlgebra, summands: &[ProjComplex]) -> ProjComplex {
    let mut total = summands[0].clone();
    for s in &summands[1..] {
        total = total.direct_sum(t, s);
    }
    total
}

fn k0_unimodular(summands: &[ProjComplex], n: usize) -> bool {
    if summands.len() != n {
        return false;
    }
    let mat: Vec<Vec<i64>> = summands.iter().map(|s| s.k0(n)).collect();
    det_i64(&mat).abs() == 1
}

/// Certify that a basic presilting collection is silting. Two-term
/// collections use the K₀-basis criterion; otherwise a mutation path from
/// the regular complex must be supplied. The certificate records which
/// criterion was applied.
pub fn certify_silting(
    t: &TableAlgebra,
    summands: &[ProjComplex],
    mutation_steps: Option<usize>,
) -> SiltingCertificate {
    let total = total_complex(t, summands);
    let presilting = is_presilting(t, &total).ok;
    let count_ok = summands.len() == t.n_idem;
    let two_term = summands.iter().all(|s| s.lo >= -1 && s.hi() <= 0);
    let (criterion, ok) = if two_term {
        (
            Criterion::TwoTermUnimodularBasis,
            presilting && count_ok && k0_unimodular(summands, t.n_idem),
        )
    } else if let Some(steps) = mutation_steps {
        (
            Criterion::MutationProvenance { steps },
            presilting && count_ok,
        )
    } else {
        (Criterion::Uncertified, false)
    };
    SiltingCertificate {
        presilting,
        summand_count: summands.len(),
        criterion,
        ok,
    }
}

#[derive(Clone, Debug)]
pub struct SiltingNode {
    pub summands: Vec<ProjComplex>,
    /// Sorted, length-prefixed summand fingerprints; equal keys still go
    /// through the explicit isomorphism check before identification.
    pub key: Vec<i64>,
    /// (parent node, mutated position) for BFS-discovered nodes.
    pub provenance: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct SiltingPoset {
    pub nodes: Vec<SiltingNode>,
    /// Left-mutation edges (source, target); source > target in the order.
    pub hasse: Vec<(usize, usize)>,
}

pub fn node_key(t: &TableAlgebra, summands: &[ProjComplex]) -> Vec<i64> {
    let mut fps: Vec<Vec<i64>> = summands.iter().map(|s| fingerprint(t, s)).collect();
    fps.sort();
    let mut out = Vec::new();
    for fp in fps {
        out.push(fp.len() as i64);
        out.extend(fp);
    }
    out
}

/// Multiset equality of summand lists up to isomorphism. Greedy matching is
/// sound because isomorphism is an equivalence.
pub fn same_node(t: &TableAlgebra, a: &[ProjComplex], b: &[ProjComplex]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for s in a {
        let mut hit = false;
        for (j, u) in b.iter().enumerate() {
            if !used[j] && is_isomorphic(t, s, u) {
                used[j] = true;
                hit = true;
                break;
            }
        }
        if !hit {
            return false;
        }
    }
    true
}

/// BFS over irreducible left mutations inside the two-term window
/// [Λ[1], Λ], starting at the regular complex. Every discovered node is
/// certified (presilting, full summand count, unimodular K₀); mutations
/// whose cone leaves the window are discarded.
pub fn enumerate_two_term(
    t: &TableAlgebra,
    node_cap: usize,
) -> Result<SiltingPoset, SiltingError> {
    let start: Vec<ProjComplex> = (0..t.n_idem).map(|v| ProjComplex::stalk(v, 0)).collect();
    let mut nodes = vec![SiltingNode {
        key: node_key(t, &start),
        summands: start,
        provenance: None,
    }];
    let mut by_key: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    by_key.insert(nodes[0].key.clone(), vec![0]);
    let mut hasse: Vec<(usize, usize)> = Vec::new();
    let mut head = 0usize;
    while head < nodes.len() {
        let parent = head;
        head += 1;
        for pos in 0..nodes[parent].summands.len() {
            let summands = nodes[parent].summands.clone();
            let mutated = left_mutation(t, &summands, pos)?;
            if !mutated.iter().all(|s| s.lo >= -1 && s.hi() <= 0) {
                continue;
            }
            let cert = certify_silting(t, &mutated, None);
            if !cert.ok {
                return Err(SiltingError::ResultNotPresilting {
                    detail: format!(
                        "mutation of node {parent} at position {pos}: presilting={} count={}",
                        cert.presilting, cert.summand_count
                    ),
                });
            }
            let key = node_key(t, &mutated);
            let mut target = None;
            if let Some(cands) = by_key.get(&key) {
                for &c in cands {
                    if same_node(t, &nodes[c].summands, &mutated) {
                        target = Some(c);
                        break;
                    }
                }
            }
            let target = match target {
                Some(c) => c,
                None => {
                    if nodes.len() >= node_cap {
                        return Err(SiltingError::NodeCapExceeded { cap: node_cap });
                    }
                    nodes.push(SiltingNode {
                        key: key.clone(),
                        summands: mutated,
                        provenance: Some((parent, pos)),
                    });
                    by_key.entry(key).or_default().push(nodes.len() - 1);
                    nodes.len() - 1
                }
            };
            if !hasse.contains(&(parent, target)) {
                hasse.push((parent, target));
            }
        }
    }
    Ok(SiltingPoset { nodes, hasse })
}

/// Project a complex over the order to the quotient: terms are kept, entries
/// are pushed through the reduction.
pub fn reduce_complex(parent: &TableAlgebra, red: &Reduction, x: &ProjComplex) -> ProjComplex {
    let mut out = x.clone();
    for d in &mut out.diffs {
        let mut m = AMat::zero(d.rows, d.cols);
        for r in 0..d.rows {
            for c in 0..d.cols {
                let e = d.get(r, c);
                if !e.is_empty() {
                    m.set(r, c, red.project(parent.dim, e));
                }
            }
        }
        *d = m;
    }
    out
}

fn lift_entries(red: &Reduction, x: &ProjComplex) -> ProjComplex {
    let mut out = x.clone();
    for d in &mut out.diffs {
        let mut m = AMat::zero(d.rows, d.cols);
        for r in 0..d.rows {
            for c in 0..d.cols {
                let e = d.get(r, c);
                if !e.is_empty() {
                    m.set(r, c, red.lift(e));
                }
            }
        }
        *d = m;
    }
    out
}

/// Lift a presilting complex over the reduction `red` = order/(z) back to
/// the order. Terms lift verbatim; the differential starts as the
/// coordinate-section lift and is corrected z-adically: at stage s the
/// defect d² lies in z^s·Γ, and a degree-+1 correction h with
/// (d + z^s·h)² ∈ z^{s+1}·Γ is found by solving a linear system over GF(p).
/// The loop ends with d² = 0 exactly (z is nilpotent in the truncation).
pub fn lift_complex(
    order: &TruncOrder,
    which: usize,
    red: &Reduction,
    x: &ProjComplex,
) -> Result<ProjComplex, SiltingError> {
    let rep = is_presilting(&red.table, x);
    if !rep.ok {
        return Err(SiltingError::NotPresiltingInput {
            detail: format!("nonzero self-extension at shift {:?}", rep.witness.map(|w| w.0)),
        });
    }
    let t = &order.table;
    let z = &order.central[which].1;
    let mut out = lift_entries(red, x);
    if out.diffs.len() < 2 {
        return Ok(out);
    }
    let mut zs = z.clone();
    let mut s = 1usize;
    loop {
        let defects: Vec<AMat> = (0..out.diffs.len() - 1)
            .map(|k| out.diffs[k + 1].compose(t, &out.diffs[k]))
            .collect();
        if defects.iter().all(|m| m.is_zero()) {
            break;
        }
        if s > order.l + 2 {
            return Err(SiltingError::CorrectionUnsolvable {
                detail: format!("correction did not terminate by stage {s}"),
            });
        }
        let j = ideal_of(t, &t.mul(&zs, z));
        // Unknowns: entries of h_k: X^k → X^{k+1} over the lifted quotient
        // corner bases (h only matters modulo z).
        let mut slots: Vec<(usize, usize, usize, SVec)> = Vec::new();
        for k in 0..out.diffs.len() {
            for (c, &u) in out.terms[k].iter().enumerate() {
                for (r, &w) in out.terms[k + 1].iter().enumerate() {
                    for coord in red.table.corner_basis(u, w) {
                        slots.push((k, r, c, red.lift(&vec![(coord as u32, 1)])));
                    }
                }
            }
        }
        // Equations: each defect entry, reduced modulo the ideal (z^{s+1}).
        let reduce_defects = |ds: &[AMat]| -> Vec<u64> {
            let mut v = Vec::new();
            for m in ds {
                for r in 0..m.rows {
                    for c in 0..m.cols {
                        let red_e = j.reduce(sv_to_dense(t.dim, m.get(r, c)));
                        v.extend(red_e.iter().map(|&x| x % t.p));
                    }
                }
            }
            v
        };
        let rhs: Vec<u64> = reduce_defects(&defects)
            .iter()
            .map(|&x| (t.p - x % t.p) % t.p)
            .collect();
        let mut sys = FpMat::zero(t.p, rhs.len(), slots.len());
        for (col, &(k, r, c, ref b)) in slots.iter().enumerate() {
            let mut h: Vec<AMat> = out
                .diffs
                .iter()
                .map(|d| AMat::zero(d.rows, d.cols))
                .collect();
            h[k].set(r, c, t.mul(&zs, b));
            let delta: Vec<AMat> = (0..out.diffs.len() - 1)
                .map(|kk| {
                    out.diffs[kk + 1]
                        .compose(t, &h[kk])
                        .add(t.p, &h[kk + 1].compose(t, &out.diffs[kk]))
                })
                .collect();
            for (row, &x) in reduce_defects(&delta).iter().enumerate() {
                sys.set(row, col, x);
            }
        }
        let Some(sol) = sys.solve(&rhs) else {
            return Err(SiltingError::CorrectionUnsolvable {
                detail: format!("no correction at stage {s}"),
            });
        };
        for (col, &(k, r, c, ref b)) in slots.iter().enumerate() {
            if sol[col] % t.p != 0 {
                let add = sv_scale(t.p, &t.mul(&zs, b), sol[col]);
                let e = sv_add(t.p, out.diffs[k].get(r, c), &add);
                out.diffs[k].set(r, c, e);
            }
        }
        zs = t.mul(&zs, z);
        s += 1;
    }
    debug_assert!(out.validate(t).is_ok());
    Ok(out)
}

/// Transport a presilting complex from one reduction of the order to
/// another: lift along the first central element, reduce modulo the second,
/// and minimize.
pub fn transport(
    order: &TruncOrder,
    from: (usize, &Reduction),
    to: (usize, &Reduction),
    x: &ProjComplex,
) -> Result<ProjComplex, SiltingError> {
    let _ = to.0;
    let lifted = lift_complex(order, from.0, from.1, x)?;
    Ok(minimize(&to.1.table, &reduce_complex(&order.table, to.1, &lifted)))
}
