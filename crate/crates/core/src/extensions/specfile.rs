//! Reader for bundle spec files.
//!
//! A spec file is a list of `[section]` blocks; `#` starts a comment.
//!
//! ```text
//! [base]              presentation of the base group
//! [fibre]             `torus <m>` or `kb`
//! [action]            `<gen>: <row> ; <row> ...`  or  `<gen>: x -> <word>, y -> <word>`
//! [cocycle]           `<gen>: <integers>`         or  `<gen>: <word in x, y>`
//! [offset]            one line per base relator: `<integers>` or `<word in x, y>`
//! ```
//!
//! Alternatively `[group]` holds a presentation of the total group and
//! `[fibre]` names the fibre generators (`torus a b` or `kb x y`); the base,
//! action and offset are then read off the relators.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{spec_from_group, BundleSpec, FibreModel, KbBundleSpec, TorusBundleSpec};
use crate::error::{Error, Result};
use crate::fpgroups::{parse_presentation, parse_word, Presentation};
use crate::groupring::{AffineRep, KbAffine, KbAut, KbElement};
use crate::zlinalg::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFile {
    pub bundle: BundleSpec,
    /// Present when the file gave the total group.
    pub group: Option<Presentation>,
    /// Indices of the fibre generators in `group`.
    pub fibre_generators: Vec<usize>,
}

struct Line {
    number: usize,
    text: String,
}

struct Section {
    name: String,
    header_line: usize,
    lines: Vec<Line>,
}

impl Section {
    fn joined(&self) -> String {
        self.lines.iter().map(|l| l.text.as_str()).collect::<Vec<_>>().join("\n")
    }

    fn first_line(&self) -> usize {
        self.lines.first().map_or(self.header_line, |l| l.number)
    }
}

fn malformed(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::MalformedSpec(format!("line {line}: {msg}"))
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column,
        message: message.into(),
    }
}

/// Moves line numbers of an error raised on a section body to file lines.
fn relocate(e: Error, first_line: usize) -> Error {
    match e {
        Error::Parse { line, column, message } => Error::Parse {
            line: line + first_line - 1,
            column,
            message,
        },
        other => other,
    }
}

/// `[name]` with an alphabetic name; anything else starting with `[` is a
/// commutator.
fn section_name(line: &str) -> Option<&str> {
    let inner = line.strip_prefix('[')?.strip_suffix(']')?.trim();
    (!inner.is_empty() && inner.chars().all(|c| c.is_ascii_alphabetic())).then_some(inner)
}

fn split_sections(text: &str) -> Result<Vec<Section>> {
    let mut sections: Vec<Section> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = section_name(content) {
            let name = name.to_ascii_lowercase();
            if !matches!(name.as_str(), "base" | "group" | "fibre" | "fiber" | "action" | "cocycle" | "offset") {
                return Err(malformed(number, format!("unknown section [{name}]")));
            }
            let name = if name == "fiber" { "fibre".to_string() } else { name };
            if sections.iter().any(|s| s.name == name) {
                return Err(malformed(number, format!("duplicate section [{name}]")));
            }
            sections.push(Section {
                name,
                header_line: number,
                lines: Vec::new(),
            });
            continue;
        }
        match sections.last_mut() {
            Some(s) => s.lines.push(Line {
                number,
                text: content.to_string(),
            }),
            None => return Err(malformed(number, "content before the first section")),
        }
    }
    Ok(sections)
}

enum Fibre {
    Torus(usize),
    Kb,
    NamedTorus(Vec<String>),
    NamedKb(String, String),
}

fn parse_fibre(sec: &Section) -> Result<Fibre> {
    let [line] = sec.lines.as_slice() else {
        return Err(malformed(sec.header_line, "[fibre] takes exactly one line"));
    };
    let words: Vec<&str> = line.text.split_whitespace().collect();
    match words.as_slice() {
        ["kb"] => Ok(Fibre::Kb),
        ["kb", x, y] => Ok(Fibre::NamedKb(x.to_string(), y.to_string())),
        ["torus", m] if m.parse::<usize>().is_ok() => {
            let m: usize = m.parse().unwrap();
            if m == 0 {
                return Err(malformed(line.number, "torus rank must be positive"));
            }
            Ok(Fibre::Torus(m))
        }
        ["torus", names @ ..] if !names.is_empty() => Ok(Fibre::NamedTorus(names.iter().map(|s| s.to_string()).collect())),
        _ => Err(malformed(line.number, format!("unrecognised fibre `{}`", line.text))),
    }
}

/// Splits `gen: body` lines and checks each generator once.
fn assignments<'a>(sec: &'a Section, base: &Presentation) -> Result<Vec<(usize, &'a Line, &'a str)>> {
    let mut seen = vec![false; base.num_generators()];
    let mut out = Vec::new();
    for line in &sec.lines {
        let (name, body) = line
            .text
            .split_once(':')
            .ok_or_else(|| parse_error(line.number, 1, "expected `<generator>: ...`"))?;
        let name = name.trim();
        let g = base
            .generator_index(name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        if seen[g] {
            return Err(malformed(line.number, format!("generator `{name}` assigned twice")));
        }
        seen[g] = true;
        out.push((g, line, body.trim()));
    }
    Ok(out)
}

fn integers(line: &Line, text: &str) -> Result<Vec<BigInt>> {
    text.split_whitespace()
        .map(|tok| {
            tok.parse::<BigInt>().map_err(|_| {
                let col = line.text.find(tok).map_or(1, |c| c + 1);
                parse_error(line.number, col, format!("expected an integer, found `{tok}`"))
            })
        })
        .collect()
}

fn parse_matrix(line: &Line, body: &str, m: usize) -> Result<IntMatrix> {
    let rows: Vec<Vec<BigInt>> = body.split(';').map(|r| integers(line, r)).collect::<Result<_>>()?;
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(malformed(line.number, format!("expected a {m}x{m} matrix")));
    }
    let cols: Vec<Vec<BigInt>> = (0..m).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
    IntMatrix::from_columns(m, &cols)
}

fn xy() -> Vec<String> {
    vec!["x".to_string(), "y".to_string()]
}

fn kb_word(line: &Line, text: &str) -> Result<KbElement> {
    let w = parse_word(text, &xy()).map_err(|e| match e {
        Error::Parse { column, message, .. } => parse_error(line.number, column, message),
        other => other,
    })?;
    KbElement::from_word(&w, 0, 1)
}

fn parse_kb_aut(line: &Line, body: &str) -> Result<KbAut> {
    let mut ix = None;
    let mut iy = None;
    for part in body.split(',') {
        let (lhs, rhs) = part
            .split_once("->")
            .ok_or_else(|| malformed(line.number, "expected `x -> <word>, y -> <word>`"))?;
        let image = kb_word(line, rhs.trim())?;
        match lhs.trim() {
            "x" if ix.is_none() => ix = Some(image),
            "y" if iy.is_none() => iy = Some(image),
            other => return Err(malformed(line.number, format!("unexpected image of `{other}`"))),
        }
    }
    match (ix, iy) {
        (Some(x), Some(y)) => KbAut::new(x, y),
        _ => Err(malformed(line.number, "both x and y need an image")),
    }
}

pub fn parse_spec_file(text: &str) -> Result<SpecFile> {
    let sections = split_sections(text)?;
    let get = |name: &str| sections.iter().find(|s| s.name == name);
    let fibre_sec = get("fibre").ok_or_else(|| Error::MalformedSpec("missing [fibre] section".into()))?;
    let fibre = parse_fibre(fibre_sec)?;

    if let Some(group_sec) = get("group") {
        for other in ["base", "action", "cocycle", "offset"] {
            if let Some(s) = get(other) {
                return Err(malformed(s.header_line, format!("[{other}] cannot be combined with [group]")));
            }
        }
        let pi = parse_presentation(&group_sec.joined()).map_err(|e| relocate(e, group_sec.first_line()))?;
        let model = match fibre {
            Fibre::NamedTorus(names) => FibreModel::Torus(names),
            Fibre::NamedKb(x, y) => FibreModel::Kb { x, y },
            _ => {
                return Err(malformed(
                    fibre_sec.header_line,
                    "with [group], [fibre] must name the fibre generators",
                ))
            }
        };
        let names: Vec<&String> = match &model {
            FibreModel::Torus(v) => v.iter().collect(),
            FibreModel::Kb { x, y } => vec![x, y],
        };
        let fibre_generators = names
            .iter()
            .map(|n| pi.generator_index(n).ok_or_else(|| Error::UnknownGenerator(n.to_string())))
            .collect::<Result<_>>()?;
        let bundle = spec_from_group(&pi, &model)?;
        return Ok(SpecFile {
            bundle,
            group: Some(pi),
            fibre_generators,
        });
    }

    let base_sec = get("base").ok_or_else(|| Error::MalformedSpec("missing [base] or [group] section".into()))?;
    let base = parse_presentation(&base_sec.joined()).map_err(|e| relocate(e, base_sec.first_line()))?;
    let nrel = base.relators().len();
    let bundle = match fibre {
        Fibre::Torus(m) => BundleSpec::Torus(torus_spec(base, m, get("action"), get("cocycle"), get("offset"), nrel)?),
        Fibre::Kb => BundleSpec::Kb(kb_spec(base, get("action"), get("cocycle"), get("offset"))?),
        _ => {
            return Err(malformed(
                fibre_sec.header_line,
                "named fibre generators require a [group] section",
            ))
        }
    };
    Ok(SpecFile {
        bundle,
        group: None,
        fibre_generators: Vec::new(),
    })
}

fn torus_spec(
    base: Presentation,
    m: usize,
    action: Option<&Section>,
    cocycle: Option<&Section>,
    offset: Option<&Section>,
    nrel: usize,
) -> Result<TorusBundleSpec> {
    let action = action.ok_or_else(|| Error::MalformedSpec("missing [action] section".into()))?;
    let mut mats: Vec<Option<IntMatrix>> = vec![None; base.num_generators()];
    for (g, line, body) in assignments(action, &base)? {
        mats[g] = Some(parse_matrix(line, body, m)?);
    }
    let mut trans = vec![vec![BigInt::zero(); m]; base.num_generators()];
    if let Some(sec) = cocycle {
        for (g, line, body) in assignments(sec, &base)? {
            let v = integers(line, body)?;
            if v.len() != m {
                return Err(malformed(line.number, format!("expected {m} integers")));
            }
            trans[g] = v;
        }
    }
    let mut maps = Vec::new();
    for (g, mat) in mats.into_iter().enumerate() {
        let mat = mat.ok_or_else(|| Error::Unassigned(base.generators()[g].clone()))?;
        maps.push((mat, trans[g].clone()));
    }
    let rep = AffineRep::full(m, maps)?;
    let offsets = match offset {
        None => vec![vec![BigInt::zero(); m]; nrel],
        Some(sec) => {
            if sec.lines.len() != nrel {
                return Err(malformed(sec.header_line, format!("expected {nrel} offset lines, one per relator")));
            }
            let mut out = Vec::new();
            for line in &sec.lines {
                let v = integers(line, &line.text)?;
                if v.len() != m {
                    return Err(malformed(line.number, format!("expected {m} integers")));
                }
                out.push(v);
            }
            out
        }
    };
    TorusBundleSpec::new(base, rep, offsets)
}

fn kb_spec(
    base: Presentation,
    action: Option<&Section>,
    cocycle: Option<&Section>,
    offset: Option<&Section>,
) -> Result<KbBundleSpec> {
    let action = action.ok_or_else(|| Error::MalformedSpec("missing [action] section".into()))?;
    let mut auts: Vec<Option<KbAut>> = vec![None; base.num_generators()];
    for (g, line, body) in assignments(action, &base)? {
        auts[g] = Some(parse_kb_aut(line, body)?);
    }
    let mut elements = vec![KbElement::IDENTITY; base.num_generators()];
    if let Some(sec) = cocycle {
        for (g, line, body) in assignments(sec, &base)? {
            elements[g] = kb_word(line, body)?;
        }
    }
    let mut data = Vec::new();
    for (g, aut) in auts.into_iter().enumerate() {
        let aut = aut.ok_or_else(|| Error::Unassigned(base.generators()[g].clone()))?;
        data.push(KbAffine {
            aut,
            element: elements[g],
        });
    }
    let off = match offset {
        None => KbElement::IDENTITY,
        Some(sec) => match sec.lines.as_slice() {
            [line] => kb_word(line, &line.text)?,
            _ => return Err(malformed(sec.header_line, "[offset] takes one word for a Klein-bottle fibre")),
        },
    };
    KbBundleSpec::new(base, data, off)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extensions::{obstruction_class, Verdict};

    const HEIS: &str = "
# Heisenberg nilmanifold as a torus bundle over the torus
[base]
<u, v | [u,v]>
[fibre]
torus 2
[action]
u: 1 0 ; 0 1
v: 1 0 ; 0 1
[offset]
1 0
";

    #[test]
    fn reads_torus_spec() {
        let spec = parse_spec_file(HEIS).unwrap();
        let rep = obstruction_class(&spec.bundle).unwrap();
        assert_eq!(rep.verdict, Verdict::NoSection);
    }

    #[test]
    fn reads_kb_spec() {
        let text = "[base]\n<u,v | [u,v]>\n[fibre]\nkb\n[action]\nu: x -> x, y -> y\nv: x -> x^-1, y -> y\n[offset]\nx^2\n";
        let spec = parse_spec_file(text).unwrap();
        let rep = obstruction_class(&spec.bundle).unwrap();
        assert_eq!(rep.quotient.to_string(), "Z/2");
        assert_eq!(rep.verdict, Verdict::NoSection);
    }

    #[test]
    fn reads_group_spec() {
        let text = "[group]\n<u,v,x,y | comm(u v ; x y), [u,v] = x^2, x y x^-1 = y^-1>\n[fibre]\nkb x y\n";
        let spec = parse_spec_file(text).unwrap();
        assert_eq!(spec.fibre_generators, vec![2, 3]);
        assert_eq!(obstruction_class(&spec.bundle).unwrap().quotient.to_string(), "Z");
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_spec_file("[base]\n<u | u>\n"), Err(Error::MalformedSpec(_))));
        let missing = HEIS.replace("v: 1 0 ; 0 1\n", "");
        assert_eq!(parse_spec_file(&missing), Err(Error::Unassigned("v".into())));
        let bad = HEIS.replace("[u,v]>", "[u,v>");
        assert!(matches!(parse_spec_file(&bad), Err(Error::Parse { line: 4, .. })));
        let bad_int = HEIS.replace("1 0\n", "1 z\n");
        assert!(matches!(parse_spec_file(&bad_int), Err(Error::Parse { line: 11, .. })));
        assert!(matches!(parse_spec_file("[wat]\n"), Err(Error::MalformedSpec(_))));
    }
}
