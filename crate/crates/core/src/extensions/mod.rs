//! Splitting of extensions `1 → φ → π → β → 1` with flat fibre.
//!
//! An extension is described by data on the free group `F(X)` of a base
//! presentation `<X | r>`: for every base generator an automorphism of the
//! fibre (the action lifted to `Aut(φ)`) and a fibre element (the choice of
//! set-theoretic lift), plus the fibre value `g` of the relator in `π`
//! (so `π = (φ ⋊ F(X)) / <<r g^-1>>`). Evaluating `r` through this data gives
//! `s(r)`, and its class modulo the submodule spanned by the evaluated Fox
//! derivatives `θ(∂_x r)` is the splitting obstruction.

mod specfile;

use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fpgroups::{abelianization, Presentation, Word};
use crate::groupring::{evaluate_kb, evaluate_linear, fox_derivative, AffineRep, KbAffine, KbAut, KbElement, LinearRep};
use crate::zlinalg::{cokernel, kernel_basis, submodule_membership, AbelianGroup, IntMatrix};

pub use specfile::{parse_spec_file, SpecFile};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Splits,
    NoSection,
    /// Nonzero class for inputs outside the one-relator setting, where the
    /// bundle-level statement is not claimed.
    NoSplitting,
    ActionDoesNotLift,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Splits => "SPLITS",
            Verdict::NoSection => "NO_SECTION",
            Verdict::NoSplitting => "NO_SPLITTING",
            Verdict::ActionDoesNotLift => "ACTION_DOES_NOT_LIFT",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Torus fibre `φ = Z^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusBundleSpec {
    pub base: Presentation,
    pub fibre_rank: usize,
    /// Matrix parts: the action on generators. Translation parts: the lifts.
    pub cocycle: AffineRep,
    /// Fibre value of each base relator in `π`.
    pub offsets: Vec<Vec<BigInt>>,
}

impl TorusBundleSpec {
    pub fn new(base: Presentation, cocycle: AffineRep, offsets: Vec<Vec<BigInt>>) -> Result<Self> {
        let m = cocycle.dim();
        if base.relators().is_empty() {
            return Err(Error::MalformedSpec("base presentation has no relator".into()));
        }
        if cocycle.num_generators() != base.num_generators() {
            return Err(Error::MalformedSpec(format!(
                "action assigns {} generators, base has {}",
                cocycle.num_generators(),
                base.num_generators()
            )));
        }
        for g in 0..base.num_generators() {
            cocycle
                .map(g)
                .map_err(|_| Error::Unassigned(base.generators()[g].clone()))?;
        }
        if offsets.len() != base.relators().len() {
            return Err(Error::MalformedSpec(format!(
                "{} relator offsets for {} relators",
                offsets.len(),
                base.relators().len()
            )));
        }
        for o in &offsets {
            if o.len() != m {
                return Err(Error::DimensionMismatch {
                    expected: m,
                    found: o.len(),
                });
            }
        }
        Ok(TorusBundleSpec {
            base,
            fibre_rank: m,
            cocycle,
            offsets,
        })
    }

    /// Zero offsets.
    pub fn semidirect(base: Presentation, cocycle: AffineRep) -> Result<Self> {
        let offsets = vec![vec![BigInt::zero(); cocycle.dim()]; base.relators().len()];
        Self::new(base, cocycle, offsets)
    }

    pub fn action(&self) -> LinearRep {
        self.cocycle.linear_part().expect("validated at construction")
    }
}

/// Klein-bottle fibre `φ = κ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KbBundleSpec {
    pub base: Presentation,
    /// Per base generator: the automorphism it induces and the lift offset.
    pub cocycle: Vec<KbAffine>,
    /// Fibre value of the single base relator in `π`.
    pub offset: KbElement,
}

impl KbBundleSpec {
    pub fn new(base: Presentation, cocycle: Vec<KbAffine>, offset: KbElement) -> Result<Self> {
        if base.relators().len() != 1 {
            return Err(Error::MalformedSpec(format!(
                "Klein-bottle bundles need a one-relator base, found {} relators",
                base.relators().len()
            )));
        }
        if cocycle.len() != base.num_generators() {
            return Err(Error::MalformedSpec(format!(
                "action assigns {} generators, base has {}",
                cocycle.len(),
                base.num_generators()
            )));
        }
        Ok(KbBundleSpec { base, cocycle, offset })
    }

    /// The action on `ζκ ≅ Z`.
    pub fn center_action(&self) -> LinearRep {
        LinearRep::full(
            1,
            self.cocycle.iter().map(|c| IntMatrix::scalar(1, c.aut.center_sign())).collect(),
        )
        .expect("±1 is unimodular")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BundleSpec {
    Torus(TorusBundleSpec),
    Kb(KbBundleSpec),
}

impl BundleSpec {
    pub fn base(&self) -> &Presentation {
        match self {
            BundleSpec::Torus(t) => &t.base,
            BundleSpec::Kb(k) => &k.base,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionReport {
    pub lifted: bool,
    /// `s(r)` in fibre coordinates (one block of `m` per relator); for a
    /// Klein-bottle fibre, the single `ζκ` coordinate.
    pub s_of_r: Vec<BigInt>,
    /// Generators of the submodule the class is taken modulo.
    pub jw: Vec<Vec<BigInt>>,
    pub quotient: AbelianGroup,
    pub class: Vec<BigInt>,
    pub verdict: Verdict,
    /// Set for multi-relator bases, where the quotient is `φ^R / im δ²`.
    pub nonstandard: bool,
}

/// Full affine value of each relator: `(matrix part, s(r))` where `s(r)` is
/// the translation part plus the relator's offset.
pub fn s_of_r(spec: &TorusBundleSpec) -> Result<Vec<(IntMatrix, Vec<BigInt>)>> {
    spec.base
        .relators()
        .iter()
        .zip(&spec.offsets)
        .map(|(r, off)| {
            let a = spec.cocycle.evaluate(r)?;
            let s = a.translation.iter().zip(off).map(|(t, o)| t + o).collect();
            Ok((a.matrix, s))
        })
        .collect()
}

/// `θ(∂_x r) e_j` for every generator `x` and fibre basis vector `e_j`,
/// one relator at a time.
pub fn jw_submodule(base: &Presentation, action: &LinearRep) -> Result<Vec<Vec<BigInt>>> {
    let mut gens = Vec::new();
    for r in base.relators() {
        gens.extend(relator_jw(r, base.num_generators(), action)?);
    }
    Ok(gens)
}

fn relator_jw(r: &Word, ngens: usize, action: &LinearRep) -> Result<Vec<Vec<BigInt>>> {
    let mut out = Vec::new();
    for x in 0..ngens {
        let d = evaluate_linear(&fox_derivative(r, x), action)?;
        out.extend(d.columns());
    }
    Ok(out)
}

/// `δ²: φ^X → φ^R`, `(a_x) ↦ (Σ_x θ(∂_x r) a_x)_r`.
fn coboundary2(base: &Presentation, action: &LinearRep) -> Result<IntMatrix> {
    let m = action.dim();
    let nx = base.num_generators();
    let nr = base.relators().len();
    let mut d = IntMatrix::zeros(m * nr, m * nx);
    for (ri, r) in base.relators().iter().enumerate() {
        for x in 0..nx {
            let block = evaluate_linear(&fox_derivative(r, x), action)?;
            for i in 0..m {
                for j in 0..m {
                    d.set(ri * m + i, x * m + j, block.get(i, j).clone());
                }
            }
        }
    }
    Ok(d)
}

/// `δ¹: φ → φ^X`, `a ↦ ((θ(x) - I) a)_x`.
fn coboundary1(base: &Presentation, action: &LinearRep) -> Result<IntMatrix> {
    let m = action.dim();
    let nx = base.num_generators();
    let mut d = IntMatrix::zeros(m * nx, m);
    let id = IntMatrix::identity(m);
    for x in 0..nx {
        let block = action.matrix(x)?.sub(&id)?;
        for i in 0..m {
            for j in 0..m {
                d.set(x * m + i, j, block.get(i, j).clone());
            }
        }
    }
    Ok(d)
}

pub fn obstruction_class(spec: &BundleSpec) -> Result<ObstructionReport> {
    match spec {
        BundleSpec::Torus(t) => torus_obstruction(t),
        BundleSpec::Kb(k) => kb_obstruction(k),
    }
}

fn torus_obstruction(spec: &TorusBundleSpec) -> Result<ObstructionReport> {
    let values = s_of_r(spec)?;
    let lifted = values.iter().all(|(m, _)| m.is_identity());
    let action = spec.action();
    let s: Vec<BigInt> = values.into_iter().flat_map(|(_, s)| s).collect();
    let nonstandard = spec.base.relators().len() != 1;
    let jw = if nonstandard {
        coboundary2(&spec.base, &action)?.columns()
    } else {
        jw_submodule(&spec.base, &action)?
    };
    finish(s, jw, lifted, nonstandard)
}

fn kb_obstruction(spec: &KbBundleSpec) -> Result<ObstructionReport> {
    let r = &spec.base.relators()[0];
    let value = evaluate_kb(r, &spec.cocycle)?;
    // In π the relator equals the offset g, so the action of r must be c_g.
    let consistent = value.aut == KbAut::inner(spec.offset);
    let s = value.element.mul(spec.offset);
    let lifted = consistent && s.is_central();
    let action = spec.center_action();
    let jw = jw_submodule(&spec.base, &action)?;
    let coord = if s.is_central() {
        s.center_component()?
    } else {
        0
    };
    finish(vec![BigInt::from(coord)], jw, lifted, false)
}

fn finish(s: Vec<BigInt>, jw: Vec<Vec<BigInt>>, lifted: bool, nonstandard: bool) -> Result<ObstructionReport> {
    let quotient = cokernel(&IntMatrix::from_columns(s.len(), &jw)?);
    let class = quotient.coordinates(&s)?;
    let zero = class.iter().all(Zero::is_zero);
    let verdict = match (lifted, zero, nonstandard) {
        (false, _, _) => Verdict::ActionDoesNotLift,
        (true, true, _) => Verdict::Splits,
        (true, false, false) => Verdict::NoSection,
        (true, false, true) => Verdict::NoSplitting,
    };
    Ok(ObstructionReport {
        lifted,
        s_of_r: s,
        jw,
        quotient,
        class,
        verdict,
        nonstandard,
    })
}

/// `A / [G, A]`: cokernel of all columns `(M_i - I) e_j`.
pub fn coinvariants(m: usize, mats: &[IntMatrix]) -> Result<AbelianGroup> {
    Ok(cokernel(&coinvariant_relations(m, mats)?))
}

pub fn coinvariant_relations(m: usize, mats: &[IntMatrix]) -> Result<IntMatrix> {
    let id = IntMatrix::identity(m);
    let mut cols = Vec::new();
    for mat in mats {
        if mat.rows() != m || mat.cols() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: mat.rows().max(mat.cols()),
            });
        }
        cols.extend(mat.sub(&id)?.columns());
    }
    IntMatrix::from_columns(m, &cols)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma2Report {
    pub group_ab: AbelianGroup,
    pub fibre_coinvariants: AbelianGroup,
    pub base_ab: AbelianGroup,
    /// `A/[G,A] ⊕ β^{ab}`
    pub expected: AbelianGroup,
    pub isomorphic: bool,
}

/// Compares `G^{ab}` with `A/[G,A] ⊕ β^{ab}`.
///
/// `A^{ab}` is presented by the fibre generators subject to the relators of
/// `pi` that involve fibre generators only; `action` gives the matrices by
/// which the base generators act on `Z^{fibre}`.
pub fn lemma2_check(
    pi: &Presentation,
    fibre_gens: &[usize],
    base: &Presentation,
    action: &LinearRep,
) -> Result<Lemma2Report> {
    for &f in fibre_gens {
        if f >= pi.num_generators() {
            return Err(Error::UnknownGenerator(format!("#{f}")));
        }
    }
    let m = fibre_gens.len();
    if action.dim() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: action.dim(),
        });
    }
    let mut cols = Vec::new();
    for r in pi.relators() {
        if r.letters().iter().all(|l| fibre_gens.contains(&l.gen)) {
            cols.push(fibre_gens.iter().map(|&f| BigInt::from(r.exponent_sum(f))).collect());
        }
    }
    let mut mats = Vec::new();
    for x in 0..base.num_generators() {
        mats.push(action.matrix(x)?.clone());
    }
    let rel = IntMatrix::from_columns(m, &cols)?.hcat(&coinvariant_relations(m, &mats)?)?;
    let fibre_coinvariants = cokernel(&rel);
    let base_ab = abelianization(base);
    let expected = fibre_coinvariants.direct_sum(&base_ab);
    let group_ab = abelianization(pi);
    let isomorphic = group_ab.is_isomorphic(&expected);
    Ok(Lemma2Report {
        group_ab,
        fibre_coinvariants,
        base_ab,
        expected,
        isomorphic,
    })
}

/// `H^1(β; A)` and `H^2(β; A)` from the Fox–Lyndon cochain complex
/// `A → A^X → A^R`.
pub fn h1_h2_base(base: &Presentation, module: &LinearRep) -> Result<(AbelianGroup, AbelianGroup)> {
    let d1 = coboundary1(base, module)?;
    let d2 = coboundary2(base, module)?;
    debug_assert!(d2.mul(&d1).map(|p| p.is_zero()).unwrap_or(true) || base.relators().is_empty());
    let h2 = cokernel(&d2);
    let kernel = kernel_basis(&d2);
    let k = kernel.len();
    let mut coords = Vec::with_capacity(d1.cols());
    for col in d1.columns() {
        let c = submodule_membership(&kernel, &col)?
            .ok_or_else(|| Error::NotAComplex("image of δ¹ not inside ker δ²".into()))?;
        coords.push(c);
    }
    let h1 = cokernel(&IntMatrix::from_columns(k, &coords)?);
    Ok((h1, h2))
}

/// Description of which generators of a group presentation span the fibre.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FibreModel {
    Torus(Vec<String>),
    Kb { x: String, y: String },
}

/// Reads a bundle spec off a presentation of `π` in the standard shape:
/// fibre-only relators, action relators `b f b^-1 w` (cyclic rotations and
/// inverses accepted) with `w` a fibre word, and base relators of the form
/// `(base word)(fibre word)`.
pub fn spec_from_group(pi: &Presentation, fibre: &FibreModel) -> Result<BundleSpec> {
    let names = pi.generators();
    let lookup = |n: &str| pi.generator_index(n).ok_or_else(|| Error::UnknownGenerator(n.to_string()));
    let fibre_idx: Vec<usize> = match fibre {
        FibreModel::Torus(v) => v.iter().map(|n| lookup(n)).collect::<Result<_>>()?,
        FibreModel::Kb { x, y } => vec![lookup(x)?, lookup(y)?],
    };
    let base_idx: Vec<usize> = (0..pi.num_generators()).filter(|g| !fibre_idx.contains(g)).collect();
    if base_idx.is_empty() {
        return Err(Error::MalformedSpec("no base generators".into()));
    }
    let base_pos = |g: usize| base_idx.iter().position(|&b| b == g);
    let is_fibre = |g: usize| fibre_idx.contains(&g);

    let mut images: Vec<Vec<Option<Word>>> = vec![vec![None; fibre_idx.len()]; base_idx.len()];
    let mut base_relators = Vec::new();
    let mut base_offsets = Vec::new();
    for r in pi.relators() {
        let nbase = r.letters().iter().filter(|l| !is_fibre(l.gen)).count();
        if nbase == 0 {
            check_fibre_relator(r, &fibre_idx, fibre)?;
            continue;
        }
        if let Some((b, f, img)) = match_action_relator(r, &is_fibre) {
            let bi = base_pos(b).expect("base letter");
            let fi = fibre_idx.iter().position(|&x| x == f).expect("fibre letter");
            if images[bi][fi].as_ref().is_some_and(|w| *w != img) {
                return Err(Error::MalformedSpec(format!(
                    "conflicting action of {} on {}",
                    names[b], names[f]
                )));
            }
            images[bi][fi] = Some(img);
            continue;
        }
        match split_base_relator(r, &is_fibre) {
            Some((bw, fw)) => {
                let reindexed = Word::reduce(bw.letters().iter().map(|l| crate::fpgroups::Letter::new(base_pos(l.gen).unwrap(), l.inverse)));
                base_relators.push(reindexed);
                // r_base · w = 1 in π, so r_base = w^-1
                base_offsets.push(fw.inverse());
            }
            None => {
                return Err(Error::MalformedSpec(format!(
                    "relator {} is not of a recognised shape",
                    r.display(names)
                )))
            }
        }
    }
    let base_names: Vec<String> = base_idx.iter().map(|&g| names[g].clone()).collect();
    let base = Presentation::new(base_names.clone(), base_relators)?;
    let missing = |bi: usize, fi: usize| {
        Error::MalformedSpec(format!(
            "no relator gives the action of {} on {}",
            base_names[bi], names[fibre_idx[fi]]
        ))
    };
    match fibre {
        FibreModel::Torus(_) => {
            let m = fibre_idx.len();
            let vec_of = |w: &Word| -> Vec<BigInt> { fibre_idx.iter().map(|&f| BigInt::from(w.exponent_sum(f))).collect() };
            let mut maps = Vec::new();
            for (bi, row) in images.iter().enumerate() {
                let mut cols = Vec::new();
                for (fi, img) in row.iter().enumerate() {
                    cols.push(vec_of(img.as_ref().ok_or_else(|| missing(bi, fi))?));
                }
                maps.push((IntMatrix::from_columns(m, &cols)?, vec![BigInt::zero(); m]));
            }
            let cocycle = AffineRep::full(m, maps)?;
            let offsets = base_offsets.iter().map(vec_of).collect();
            Ok(BundleSpec::Torus(TorusBundleSpec::new(base, cocycle, offsets)?))
        }
        FibreModel::Kb { .. } => {
            let (x, y) = (fibre_idx[0], fibre_idx[1]);
            let mut cocycle = Vec::new();
            for (bi, row) in images.iter().enumerate() {
                let ix = KbElement::from_word(row[0].as_ref().ok_or_else(|| missing(bi, 0))?, x, y)?;
                let iy = KbElement::from_word(row[1].as_ref().ok_or_else(|| missing(bi, 1))?, x, y)?;
                cocycle.push(KbAffine {
                    aut: KbAut::new(ix, iy)?,
                    element: KbElement::IDENTITY,
                });
            }
            if base_offsets.len() != 1 {
                return Err(Error::MalformedSpec(format!(
                    "Klein-bottle bundles need exactly one base relator, found {}",
                    base_offsets.len()
                )));
            }
            let offset = KbElement::from_word(&base_offsets[0], x, y)?;
            Ok(BundleSpec::Kb(KbBundleSpec::new(base, cocycle, offset)?))
        }
    }
}

fn check_fibre_relator(r: &Word, fibre_idx: &[usize], fibre: &FibreModel) -> Result<()> {
    let ok = match fibre {
        FibreModel::Torus(_) => fibre_idx.iter().all(|&f| r.exponent_sum(f) == 0),
        FibreModel::Kb { .. } => KbElement::from_word(r, fibre_idx[0], fibre_idx[1])? == KbElement::IDENTITY,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::MalformedSpec("fibre relator does not hold in the fibre group".into()))
    }
}

/// Matches a cyclic rotation of `r` or `r^-1` against `b f b^-1 w` with `b`
/// a base generator, `f` a single fibre letter and `w` a fibre word.
/// Returns `(b, f, image of f under conjugation by b)`.
fn match_action_relator(r: &Word, is_fibre: &dyn Fn(usize) -> bool) -> Option<(usize, usize, Word)> {
    for cand in [r.clone(), r.inverse()] {
        let ls = cand.letters();
        let n = ls.len();
        for start in 0..n {
            let rot: Vec<_> = ls[start..].iter().chain(&ls[..start]).copied().collect();
            if n < 3 {
                continue;
            }
            let (b, f, bi) = (rot[0], rot[1], rot[2]);
            if b.inverse || is_fibre(b.gen) || !is_fibre(f.gen) || bi != b.inv() {
                continue;
            }
            if !rot[3..].iter().all(|l| is_fibre(l.gen)) {
                continue;
            }
            let w = Word::reduce(rot[3..].iter().copied());
            // b f^e b^-1 = w^-1
            let img = if f.inverse { w } else { w.inverse() };
            return Some((b.gen, f.gen, img));
        }
    }
    None
}

/// Splits a cyclic rotation of `r` as (base word)(fibre word).
fn split_base_relator(r: &Word, is_fibre: &dyn Fn(usize) -> bool) -> Option<(Word, Word)> {
    let ls = r.letters();
    let n = ls.len();
    for start in 0..n {
        let rot: Vec<_> = ls[start..].iter().chain(&ls[..start]).copied().collect();
        let k = rot.iter().take_while(|l| !is_fibre(l.gen)).count();
        if k > 0 && rot[k..].iter().all(|l| is_fibre(l.gen)) {
            return Some((Word::reduce(rot[..k].iter().copied()), Word::reduce(rot[k..].iter().copied())));
        }
    }
    None
}
