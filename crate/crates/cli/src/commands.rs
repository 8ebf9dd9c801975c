use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use bundlesec_core::extensions::{parse_spec_file, SpecFile};
use bundlesec_core::groupring::LinearRep;
use bundlesec_core::mcg::{endo_report, kb_base_variant};
use bundlesec_core::transgression::{transgress as zig_zag, xi_star};
use bundlesec_core::zlinalg::IntMatrix;
use bundlesec_core::{abelianization, h1_h2_base, lemma2_check, obstruction_class, parse_presentation, BundleSpec, Error, Presentation};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Number;
use sha2::{Digest, Sha256};

use crate::report::{matrix, matrix_text, num, nums, vector_text, Group, Input, Report, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

const EXIT_NOT_FOUND: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_MALFORMED: u8 = 4;

fn core_error(path: Option<&Path>, e: Error) -> CliError {
    let code = match e {
        Error::Parse { .. } | Error::UnknownGenerator(_) | Error::Orientation(_) => EXIT_PARSE,
        _ => EXIT_MALFORMED,
    };
    let message = match path {
        Some(p) => format!("{}: {e}", p.display()),
        None => e.to_string(),
    };
    CliError { code, message }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: 1,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<(String, Input), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError {
        code: if e.kind() == std::io::ErrorKind::NotFound { EXIT_NOT_FOUND } else { 1 },
        message: format!("{}: {e}", path.display()),
    })?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes).map_err(|_| CliError {
        code: EXIT_PARSE,
        message: format!("{}: not valid UTF-8", path.display()),
    })?;
    Ok((
        text,
        Input {
            path: path.display().to_string(),
            sha256,
        },
    ))
}

fn render<T: Serialize>(report: &Report<T>, format: Format, text: String) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(report).expect("reports serialize") + "\n",
        Format::Text => text,
    }
}

fn is_spec_file(text: &str) -> bool {
    text.lines().any(|l| {
        let l = l.split('#').next().unwrap_or("").trim();
        l.len() > 2 && l.starts_with('[') && l.ends_with(']') && l[1..l.len() - 1].chars().all(|c| c.is_ascii_alphabetic())
    })
}

#[derive(Serialize)]
struct AbelianizeResult {
    generators: Vec<String>,
    relators: usize,
    abelianization: Group,
}

pub fn abelianize(path: &Path, format: Format) -> Result<String, CliError> {
    let (text, input) = read(path)?;
    let p: Presentation = if is_spec_file(&text) {
        let spec = parse_spec_file(&text).map_err(|e| core_error(Some(path), e))?;
        spec.group.unwrap_or_else(|| spec.bundle.base().clone())
    } else {
        parse_presentation(&text).map_err(|e| core_error(Some(path), e))?
    };
    let ab = abelianization(&p);
    let mut out = String::new();
    let _ = writeln!(out, "presentation: {p}");
    let _ = writeln!(out, "abelianization: {ab}");
    let _ = writeln!(out, "rank: {}", ab.rank());
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "abelianize",
        inputs: vec![input],
        result: AbelianizeResult {
            generators: p.generators().to_vec(),
            relators: p.relators().len(),
            abelianization: Group::from(&ab),
        },
        verdict: "OK".into(),
    };
    Ok(render(&report, format, out))
}

#[derive(Serialize)]
struct Lemma2Result {
    group_abelianization: Group,
    fibre_coinvariants: Group,
    base_abelianization: Group,
    expected: Group,
    isomorphic: bool,
}

#[derive(Serialize)]
struct SplitCheckResult {
    fibre: String,
    base: String,
    action_lifts: bool,
    s_of_r: Vec<Number>,
    jw_generators: Vec<Vec<Number>>,
    quotient: Group,
    class: Vec<Number>,
    nonstandard: bool,
    abelianization_test: Option<Lemma2Result>,
}

/// Action of the base on `Z^{fibre}` for the abelianization test.
fn fibre_action(spec: &BundleSpec) -> LinearRep {
    match spec {
        BundleSpec::Torus(t) => t.action(),
        BundleSpec::Kb(k) => {
            let mats = k
                .cocycle
                .iter()
                .map(|c| {
                    let (ix, iy) = (c.aut.image_x(), c.aut.image_y());
                    IntMatrix::from_rows(&[vec![ix.a, iy.a], vec![ix.b, iy.b]])
                })
                .collect();
            LinearRep::full(2, mats).expect("automorphisms abelianize to unimodular matrices")
        }
    }
}

fn split_check_one(path: &Path) -> Result<(Report<SplitCheckResult>, String), CliError> {
    let (text, input) = read(path)?;
    let SpecFile {
        bundle,
        group,
        fibre_generators,
    } = parse_spec_file(&text).map_err(|e| core_error(Some(path), e))?;
    let rep = obstruction_class(&bundle).map_err(|e| core_error(Some(path), e))?;
    let fibre = match &bundle {
        BundleSpec::Torus(t) => format!("torus {}", t.fibre_rank),
        BundleSpec::Kb(_) => "kb".to_string(),
    };
    let lemma2 = match &group {
        Some(pi) => {
            let l = lemma2_check(pi, &fibre_generators, bundle.base(), &fibre_action(&bundle))
                .map_err(|e| core_error(Some(path), e))?;
            Some(Lemma2Result {
                group_abelianization: Group::from(&l.group_ab),
                fibre_coinvariants: Group::from(&l.fibre_coinvariants),
                base_abelianization: Group::from(&l.base_ab),
                expected: Group::from(&l.expected),
                isomorphic: l.isomorphic,
            })
        }
        None => None,
    };

    let mut out = String::new();
    let _ = writeln!(out, "file: {}", input.path);
    let _ = writeln!(out, "fibre: {fibre}");
    let _ = writeln!(out, "base: {}", bundle.base());
    let _ = writeln!(out, "action lifts: {}", if rep.lifted { "yes" } else { "no" });
    let _ = writeln!(out, "s(r) = {}", vector_text(&rep.s_of_r));
    let _ = writeln!(out, "quotient: {}", rep.quotient);
    let _ = writeln!(out, "class: {}", vector_text(&rep.class));
    if rep.nonstandard {
        let _ = writeln!(out, "note: several base relators; the class is taken in the full second cohomology");
    }
    if let Some(l) = &lemma2 {
        let _ = writeln!(
            out,
            "abelianization: {} vs {} -> {}",
            l.group_abelianization.description,
            l.expected.description,
            if l.isomorphic { "isomorphic" } else { "not isomorphic" }
        );
    }
    let _ = writeln!(out, "verdict: {}", rep.verdict);

    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "split-check",
        inputs: vec![input],
        result: SplitCheckResult {
            fibre,
            base: bundle.base().to_string(),
            action_lifts: rep.lifted,
            s_of_r: nums(&rep.s_of_r),
            jw_generators: rep.jw.iter().map(|v| nums(v)).collect(),
            quotient: Group::from(&rep.quotient),
            class: nums(&rep.class),
            nonstandard: rep.nonstandard,
            abelianization_test: lemma2,
        },
        verdict: rep.verdict.to_string(),
    };
    Ok((report, out))
}

pub fn split_check(paths: &[std::path::PathBuf], jobs: usize, format: Format) -> Result<String, CliError> {
    if jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| usage(e.to_string()))?;
    let results: Vec<_> = pool.install(|| paths.par_iter().map(|p| split_check_one(p)).collect());
    let mut reports = Vec::new();
    let mut texts = Vec::new();
    for r in results {
        let (report, text) = r?;
        reports.push(report);
        texts.push(text);
    }
    Ok(match format {
        Format::Text => texts.join("\n"),
        Format::Json if reports.len() == 1 => serde_json::to_string_pretty(&reports[0]).expect("serializable") + "\n",
        Format::Json => serde_json::to_string_pretty(&reports).expect("serializable") + "\n",
    })
}

#[derive(Serialize)]
struct CohomologyResult {
    base: String,
    module_rank: usize,
    h1: Group,
    h2: Group,
}

pub fn cohomology(path: &Path, format: Format) -> Result<String, CliError> {
    let (text, input) = read(path)?;
    let spec = parse_spec_file(&text).map_err(|e| core_error(Some(path), e))?;
    let module = match &spec.bundle {
        BundleSpec::Torus(t) => t.action(),
        BundleSpec::Kb(k) => k.center_action(),
    };
    let base = spec.bundle.base();
    let (h1, h2) = h1_h2_base(base, &module).map_err(|e| core_error(Some(path), e))?;
    let mut out = String::new();
    let _ = writeln!(out, "base: {base}");
    let _ = writeln!(out, "module rank: {}", module.dim());
    let _ = writeln!(out, "H^1 = {h1}");
    let _ = writeln!(out, "H^2 = {h2}");
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "cohomology",
        inputs: vec![input],
        result: CohomologyResult {
            base: base.to_string(),
            module_rank: module.dim(),
            h1: Group::from(&h1),
            h2: Group::from(&h2),
        },
        verdict: "OK".into(),
    };
    Ok(render(&report, format, out))
}

#[derive(Serialize)]
struct TransgressEntry {
    k: i64,
    d2: Number,
    xi_star: Number,
    agree: bool,
    dz: Vec<String>,
}

#[derive(Serialize)]
struct TransgressResult {
    entries: Vec<TransgressEntry>,
}

fn parse_range(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || usage(format!("invalid range `{s}`, expected a..b"));
    let (a, b) = s.split_once("..").ok_or_else(bad)?;
    let a: i64 = a.trim().parse().map_err(|_| bad())?;
    let b: i64 = b.trim().parse().map_err(|_| bad())?;
    if a > b {
        return Err(bad());
    }
    Ok((a, b))
}

pub fn transgress(k: Option<i64>, range: Option<&str>, format: Format) -> Result<String, CliError> {
    let (lo, hi) = match (k, range) {
        (Some(k), None) => (k, k),
        (None, Some(r)) => parse_range(r)?,
        _ => return Err(usage("give exactly one of --k or --range")),
    };
    let mut entries = Vec::new();
    let mut out = String::new();
    for k in lo..=hi {
        let rep = zig_zag(k).map_err(|e| core_error(None, e))?;
        let xi: BigInt = xi_star(k, 1).map_err(|e| core_error(None, e))?;
        let agree = rep.value == xi;
        let _ = writeln!(
            out,
            "k = {k}: d2([z]) = {}, xi_*([z]) = {xi}  {}",
            rep.value,
            if agree { "AGREE" } else { "DISAGREE" }
        );
        entries.push(TransgressEntry {
            k,
            d2: num(&rep.value),
            xi_star: num(&xi),
            agree,
            dz: rep.dz.iter().map(ToString::to_string).collect(),
        });
    }
    let all = entries.iter().all(|e| e.agree);
    let verdict = if all { "AGREE" } else { "DISAGREE" };
    let _ = writeln!(out, "verdict: {verdict}");
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "transgress",
        inputs: Vec::new(),
        result: TransgressResult { entries },
        verdict: verdict.into(),
    };
    Ok(render(&report, format, out))
}

#[derive(Serialize)]
struct Monodromy {
    generator: &'static str,
    matrix: Vec<Vec<Number>>,
}

#[derive(Serialize)]
struct PullbackResult {
    coinvariants: Group,
    class: Vec<Number>,
    note: &'static str,
}

#[derive(Serialize)]
struct KbVariantResult {
    relation: bool,
    coinvariants: Group,
    class: Vec<Number>,
    verdict: String,
    torus_pullback: PullbackResult,
}

#[derive(Serialize)]
struct EndoResult {
    monodromy: Vec<Monodromy>,
    lantern: bool,
    relation: bool,
    coinvariants: Group,
    class: Vec<Number>,
    kb_base_variant: KbVariantResult,
}

const PULLBACK_NOTE: &str = "homology criterion only; the bundle itself is not adjudicated";

pub fn endo(format: Format) -> Result<String, CliError> {
    let rep = endo_report().map_err(|e| core_error(None, e))?;
    let kb = kb_base_variant().map_err(|e| core_error(None, e))?;
    let names = ["a1", "b1", "a2", "b2", "a3", "b3"];
    let mut out = String::new();
    for (n, m) in names.iter().zip(&rep.data.monodromy) {
        let _ = writeln!(out, "{n}:");
        out.push_str(&matrix_text(&m.matrix, "  "));
    }
    let yes = |b: bool| if b { "holds" } else { "FAILS" };
    let _ = writeln!(out, "lantern relation: {}", yes(rep.lantern));
    let _ = writeln!(out, "surface relation: {}", yes(rep.relation));
    let _ = writeln!(out, "coinvariants: {}", rep.coinvariants);
    let _ = writeln!(out, "class of b1: {}", vector_text(&rep.class));
    let _ = writeln!(out, "verdict: {}", rep.verdict);
    let _ = writeln!(out);
    let _ = writeln!(out, "Klein-bottle base:");
    let _ = writeln!(out, "  relation: {}", yes(kb.relation));
    let _ = writeln!(out, "  coinvariants: {}", kb.coinvariants);
    let _ = writeln!(out, "  class of b1: {}", vector_text(&kb.class));
    let _ = writeln!(out, "  verdict: {}", kb.verdict);
    let _ = writeln!(
        out,
        "  torus pullback: coinvariants {}, class {} ({PULLBACK_NOTE})",
        kb.torus_pullback.0,
        vector_text(&kb.torus_pullback.1)
    );
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: "endo",
        inputs: Vec::new(),
        result: EndoResult {
            monodromy: names
                .iter()
                .zip(&rep.data.monodromy)
                .map(|(n, m)| Monodromy {
                    generator: n,
                    matrix: matrix(&m.matrix),
                })
                .collect(),
            lantern: rep.lantern,
            relation: rep.relation,
            coinvariants: Group::from(&rep.coinvariants),
            class: nums(&rep.class),
            kb_base_variant: KbVariantResult {
                relation: kb.relation,
                coinvariants: Group::from(&kb.coinvariants),
                class: nums(&kb.class),
                verdict: kb.verdict.to_string(),
                torus_pullback: PullbackResult {
                    coinvariants: Group::from(&kb.torus_pullback.0),
                    class: nums(&kb.torus_pullback.1),
                    note: PULLBACK_NOTE,
                },
            },
        },
        verdict: rep.verdict.to_string(),
    };
    Ok(render(&report, format, out))
}
