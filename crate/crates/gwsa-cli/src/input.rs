//! Text format for algebra definitions.
//!
//! One document per algebra, made of sections:
//!
//! ```text
//! # comments run to end of line
//! [vertices]
//! 1 2 3
//! [arrows]
//! a1 1 2          # id source target
//! [f]
//! (a1 a2 a3) (b3 b2 b1)
//! [m]
//! a1 2            # one line per g-orbit: any member arrow, multiplicity
//! [c]
//! a1 1            # optional, defaults to 1 per orbit
//! [t0]
//! a1 1            # optional per-arrow values, default 0
//! [t1]
//! b1 1            # optional per-arrow values, default 0
//! [Z]
//! a1 a2 a3        # optional: one generator word per line
//! ```
//!
//! Sections may appear in any order; the serializer emits them in the order
//! above. Parse → serialize → parse is the identity on the data.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use gwsa_core::gwsa::GWSAData;
use gwsa_core::quiver::build_quiver;

#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        col,
        message: message.into(),
    }
}

/// Token with its 1-based line and column.
fn tokens(line: &str, line_no: usize) -> Vec<(usize, usize, &str)> {
    let body = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut out = Vec::new();
    let mut col = 1;
    for piece in body.split_whitespace() {
        // Column of this occurrence, scanning from where we left off.
        let start = body[col - 1..].find(piece).unwrap() + col - 1;
        out.push((line_no, start + 1, piece));
        col = start + piece.len() + 1;
    }
    out
}

const SECTIONS: [&str; 8] = ["vertices", "arrows", "f", "m", "c", "t0", "t1", "Z"];

pub fn parse_input(text: &str) -> Result<GWSAData, ParseError> {
    let mut sections: BTreeMap<&str, Vec<Vec<(usize, usize, &str)>>> = BTreeMap::new();
    let mut current: Option<&str> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let toks = tokens(raw, line_no);
        if toks.is_empty() {
            continue;
        }
        let (l0, c0, t0) = toks[0];
        if t0.starts_with('[') {
            if toks.len() != 1 || !t0.ends_with(']') {
                return Err(err(l0, c0, "malformed section header"));
            }
            let name = &t0[1..t0.len() - 1];
            let Some(&canon) = SECTIONS.iter().find(|&&s| s == name) else {
                return Err(err(l0, c0, format!("unknown section [{name}]")));
            };
            if sections.contains_key(canon) {
                return Err(err(l0, c0, format!("duplicate section [{name}]")));
            }
            sections.insert(canon, Vec::new());
            current = Some(canon);
            continue;
        }
        let Some(cur) = current else {
            return Err(err(l0, c0, "content before the first section header"));
        };
        sections.get_mut(cur).unwrap().push(toks);
    }

    let need = |name: &str| -> Result<&Vec<Vec<(usize, usize, &str)>>, ParseError> {
        sections
            .get(name)
            .ok_or_else(|| err(1, 1, format!("missing required section [{name}]")))
    };

    // Vertices: whitespace-separated ids across any number of lines.
    let mut vertices: Vec<String> = Vec::new();
    for line in need("vertices")? {
        for &(_, _, t) in line {
            vertices.push(t.to_string());
        }
    }

    // Arrows: id source target per line.
    let mut arrows: Vec<(String, String, String)> = Vec::new();
    for line in need("arrows")? {
        if line.len() != 3 {
            let (l, c, _) = line[0];
            return Err(err(l, c, "arrow lines are: id source target"));
        }
        arrows.push((
            line[0].2.to_string(),
            line[1].2.to_string(),
            line[2].2.to_string(),
        ));
    }

    // f: parenthesised cycles of arrow ids, possibly spread over lines.
    let mut cycles: Vec<Vec<String>> = Vec::new();
    let mut open: Option<(usize, usize, Vec<String>)> = None;
    for line in need("f")? {
        for &(l, c, tok) in line {
            let mut tok = tok;
            while let Some(rest) = tok.strip_prefix('(') {
                if open.is_some() {
                    return Err(err(l, c, "nested '(' in f cycles"));
                }
                open = Some((l, c, Vec::new()));
                tok = rest;
            }
            let mut closes = 0;
            while let Some(rest) = tok.strip_suffix(')') {
                closes += 1;
                tok = rest;
            }
            if !tok.is_empty() {
                match &mut open {
                    Some((_, _, cyc)) => cyc.push(tok.to_string()),
                    None => return Err(err(l, c, "arrow id outside a cycle in [f]")),
                }
            }
            for _ in 0..closes {
                match open.take() {
                    Some((_, _, cyc)) => cycles.push(cyc),
                    None => return Err(err(l, c, "unmatched ')' in [f]")),
                }
            }
        }
    }
    if let Some((l, c, _)) = open {
        return Err(err(l, c, "unclosed '(' in [f]"));
    }

    let quiver = build_quiver(&vertices, &arrows, &cycles)
        .map_err(|e| err(1, 1, format!("quiver data rejected: {e}")))?;
    let orbits = quiver.orbit_data();
    let n_orb = orbits.orbits.len();
    let arrow_index = |l: usize, c: usize, id: &str| -> Result<usize, ParseError> {
        quiver
            .arrow_ids
            .iter()
            .position(|a| a == id)
            .ok_or_else(|| err(l, c, format!("unknown arrow id '{id}'")))
    };

    // Per-orbit sections: any member arrow names the orbit.
    let per_orbit = |name: &str,
                     required: bool,
                     default: u64,
                     sections: &BTreeMap<&str, Vec<Vec<(usize, usize, &str)>>>|
     -> Result<Vec<u64>, ParseError> {
        let mut vals: Vec<Option<u64>> = vec![None; n_orb];
        if let Some(lines) = sections.get(name) {
            for line in lines {
                if line.len() != 2 {
                    let (l, c, _) = line[0];
                    return Err(err(l, c, format!("[{name}] lines are: arrow value")));
                }
                let (l, c, id) = line[0];
                let o = orbits.orbit_of[arrow_index(l, c, id)?];
                let (lv, cv, v) = line[1];
                let v: u64 = v
                    .parse()
                    .map_err(|_| err(lv, cv, format!("bad integer '{v}'")))?;
                if vals[o].is_some() {
                    return Err(err(l, c, format!("orbit of '{id}' set twice in [{name}]")));
                }
                vals[o] = Some(v);
            }
        } else if required {
            return Err(err(1, 1, format!("missing required section [{name}]")));
        }
        if required {
            for (o, v) in vals.iter().enumerate() {
                if v.is_none() {
                    let rep = &quiver.arrow_ids[orbits.orbits[o][0]];
                    return Err(err(1, 1, format!("[{name}] misses the orbit of '{rep}'")));
                }
            }
        }
        Ok(vals.into_iter().map(|v| v.unwrap_or(default)).collect())
    };

    let m = per_orbit("m", true, 0, &sections)?;
    let c = per_orbit("c", false, 1, &sections)?;

    // Per-arrow sections, default 0.
    let per_arrow = |name: &str| -> Result<Vec<u64>, ParseError> {
        let mut vals = vec![0u64; quiver.n_arrows()];
        if let Some(lines) = sections.get(name) {
            for line in lines {
                if line.len() != 2 {
                    let (l, c, _) = line[0];
                    return Err(err(l, c, format!("[{name}] lines are: arrow value")));
                }
                let (l, cc, id) = line[0];
                let a = arrow_index(l, cc, id)?;
                let (lv, cv, v) = line[1];
                vals[a] = v
                    .parse()
                    .map_err(|_| err(lv, cv, format!("bad integer '{v}'")))?;
            }
        }
        Ok(vals)
    };
    let t0 = per_arrow("t0")?;
    let t1 = per_arrow("t1")?;

    let mut z: Vec<Vec<usize>> = Vec::new();
    if let Some(lines) = sections.get("Z") {
        for line in lines {
            let mut word = Vec::new();
            for &(l, c, id) in line {
                word.push(arrow_index(l, c, id)?);
            }
            z.push(word);
        }
    }

    Ok(GWSAData::new(quiver, m, c, t0, t1, z))
}

#[allow(dead_code)] // used by the round-trip tests
pub fn serialize_input(data: &GWSAData) -> String {
    let q = &data.quiver;
    let mut out = String::new();
    out.push_str("[vertices]\n");
    out.push_str(&q.vertex_ids.join(" "));
    out.push('\n');
    out.push_str("[arrows]\n");
    for a in 0..q.n_arrows() {
        let _ = writeln!(
            out,
            "{} {} {}",
            q.arrow_ids[a], q.vertex_ids[q.src[a]], q.vertex_ids[q.tgt[a]]
        );
    }
    out.push_str("[f]\n");
    let mut seen = vec![false; q.n_arrows()];
    let mut cycles = Vec::new();
    for start in 0..q.n_arrows() {
        if seen[start] {
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut a = q.f[start];
        while a != start {
            seen[a] = true;
            cyc.push(a);
            a = q.f[a];
        }
        cycles.push(cyc);
    }
    let cyc_text: Vec<String> = cycles
        .iter()
        .map(|cyc| {
            let ids: Vec<&str> = cyc.iter().map(|&a| q.arrow_ids[a].as_str()).collect();
            format!("({})", ids.join(" "))
        })
        .collect();
    out.push_str(&cyc_text.join(" "));
    out.push('\n');
    out.push_str("[m]\n");
    for (o, orbit) in data.orbits.orbits.iter().enumerate() {
        let _ = writeln!(out, "{} {}", q.arrow_ids[orbit[0]], data.m[o]);
    }
    out.push_str("[c]\n");
    for (o, orbit) in data.orbits.orbits.iter().enumerate() {
        let _ = writeln!(out, "{} {}", q.arrow_ids[orbit[0]], data.c[o]);
    }
    if data.t0.iter().any(|&v| v != 0) {
        out.push_str("[t0]\n");
        for a in 0..q.n_arrows() {
            if data.t0[a] != 0 {
                let _ = writeln!(out, "{} {}", q.arrow_ids[a], data.t0[a]);
            }
        }
    }
    if data.t1.iter().any(|&v| v != 0) {
        out.push_str("[t1]\n");
        for a in 0..q.n_arrows() {
            if data.t1[a] != 0 {
                let _ = writeln!(out, "{} {}", q.arrow_ids[a], data.t1[a]);
            }
        }
    }
    if !data.z.is_empty() {
        out.push_str("[Z]\n");
        for word in &data.z {
            let ids: Vec<&str> = word.iter().map(|&a| q.arrow_ids[a].as_str()).collect();
            let _ = writeln!(out, "{}", ids.join(" "));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TRIANGLE: &str = "\
# triangle quiver with full seed data
[vertices]
1 2 3
[arrows]
a1 1 2
a2 2 3
a3 3 1
b1 1 3
b2 2 1
b3 3 2
[f]
(a1 a2 a3) (b3 b2 b1)
[m]
a1 1
a2 1
a3 1
[c]
a1 1
a2 1
a3 1
[t0]
a1 1
a2 1
a3 1
b1 1
b2 1
b3 1
[Z]
b2 a1 a2
a2 b3 b2
a3 b1 b3
";

    #[test]
    fn parse_and_round_trip() {
        let d = parse_input(TRIANGLE).unwrap();
        assert_eq!(d.quiver.n_vertices(), 3);
        assert_eq!(d.quiver.n_arrows(), 6);
        assert_eq!(d.m, vec![1, 1, 1]);
        assert_eq!(d.t0, vec![1; 6]);
        assert_eq!(d.z.len(), 3);
        let text = serialize_input(&d);
        let d2 = parse_input(&text).unwrap();
        assert_eq!(d, d2);
        assert_eq!(text, serialize_input(&d2));
    }

    #[test]
    fn errors_carry_line_and_column() {
        let bad = "[vertices]\n1 2\n[arrows]\na 1 2\nb 2 1\n[f]\n(a b\n[m]\na 1\n";
        let e = parse_input(bad).unwrap_err();
        assert_eq!((e.line, e.col), (7, 1));
        assert!(e.message.contains("unclosed"));

        let bad2 = "[vertices]\n1\n[arrows]\na 1 1\nb 1 1\n[f]\n(a b)\n[m]\nq 7\n";
        let e2 = parse_input(bad2).unwrap_err();
        assert_eq!((e2.line, e2.col), (9, 1));
        assert!(e2.message.contains("unknown arrow"));
    }
}
