//! Integral group rings of free groups, Fox derivatives, and evaluation of
//! words and ring elements under representations.
//!
//! Nothing here reduces words modulo a group's relations. Every consumer
//! evaluates through a representation (integer matrices, affine maps, or the
//! normal form of the Klein-bottle group), which sidesteps the word problem.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::fpgroups::{Letter, Word};
use crate::zlinalg::IntMatrix;

/// A finite integer combination of reduced words, an element of `Z[F(X)]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FreeRingElement {
    terms: BTreeMap<Word, i64>,
}

impl FreeRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_word(Word::identity())
    }

    pub fn from_word(w: Word) -> Self {
        Self::from_term(w, 1)
    }

    pub fn from_term(w: Word, c: i64) -> Self {
        let mut e = Self::zero();
        e.add_term(w, c);
        e
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &Word) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn add_term(&mut self, w: Word, c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(w).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in other.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            out.add_term(w.clone(), c * k);
        }
        out
    }

    /// `u · e`: left-multiplies every word term by `u`.
    pub fn left_mul_word(&self, u: &Word) -> Self {
        let mut out = Self::zero();
        for (w, c) in self.terms() {
            out.add_term(u.mul(w), c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (a, ca) in self.terms() {
            for (b, cb) in other.terms() {
                out.add_term(a.mul(b), ca * cb);
            }
        }
        out
    }

    /// Augmentation: sum of coefficients.
    pub fn augmentation(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> RingDisplay<'a> {
        RingDisplay { e: self, names }
    }
}

pub struct RingDisplay<'a> {
    e: &'a FreeRingElement,
    names: &'a [String],
}

impl fmt::Display for RingDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e.is_zero() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.e.terms().enumerate() {
            let sign = if c < 0 { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                write!(f, " ")?;
            }
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}{}", w.display(self.names))?;
            } else {
                write!(f, "{sign}{mag}·{}", w.display(self.names))?;
            }
        }
        Ok(())
    }
}

/// Fox derivative `∂_g r`: the sum over occurrences `x_i = g` of
/// `η(i) · I_i(r) x_i^{δ(i)}`, with `δ = 0` for positive letters and
/// `δ = -1` for inverse letters.
pub fn fox_derivative(r: &Word, g: usize) -> FreeRingElement {
    let mut out = FreeRingElement::zero();
    let letters = r.letters();
    for (i, l) in letters.iter().enumerate() {
        if l.gen != g {
            continue;
        }
        let prefix = Word::reduce(letters[..i].iter().copied());
        if l.inverse {
            out.add_term(prefix.mul(&Word::reduce([*l])), -1);
        } else {
            out.add_term(prefix, 1);
        }
    }
    out
}

/// Assignment of an invertible `m × m` integer matrix to each generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearRep {
    dim: usize,
    matrices: Vec<Option<(IntMatrix, IntMatrix)>>,
}

impl LinearRep {
    pub fn new(dim: usize, matrices: Vec<Option<IntMatrix>>) -> Result<Self> {
        let mut out = Vec::with_capacity(matrices.len());
        for m in matrices {
            match m {
                None => out.push(None),
                Some(m) => {
                    if m.rows() != dim || m.cols() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: m.rows().max(m.cols()),
                        });
                    }
                    let inv = m.inverse_unimodular()?;
                    out.push(Some((m, inv)));
                }
            }
        }
        Ok(LinearRep { dim, matrices: out })
    }

    /// Every generator assigned.
    pub fn full(dim: usize, matrices: Vec<IntMatrix>) -> Result<Self> {
        Self::new(dim, matrices.into_iter().map(Some).collect())
    }

    pub fn trivial(dim: usize, ngens: usize) -> Self {
        Self::full(dim, vec![IntMatrix::identity(dim); ngens]).expect("identity is unimodular")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_generators(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrix(&self, gen: usize) -> Result<&IntMatrix> {
        self.pair(gen).map(|p| &p.0)
    }

    fn pair(&self, gen: usize) -> Result<&(IntMatrix, IntMatrix)> {
        self.matrices
            .get(gen)
            .and_then(Option::as_ref)
            .ok_or_else(|| Error::Unassigned(format!("#{gen}")))
    }

    fn letter(&self, l: Letter) -> Result<&IntMatrix> {
        let (m, inv) = self.pair(l.gen)?;
        Ok(if l.inverse { inv } else { m })
    }

    pub fn evaluate_word(&self, w: &Word) -> Result<IntMatrix> {
        let mut acc = IntMatrix::identity(self.dim);
        for &l in w.letters() {
            acc = acc.mul(self.letter(l)?)?;
        }
        Ok(acc)
    }
}

/// `Σ c · ρ(w)` over the terms of `e`; the empty word maps to the identity.
pub fn evaluate_linear(e: &FreeRingElement, rep: &LinearRep) -> Result<IntMatrix> {
    let mut acc = IntMatrix::zeros(rep.dim, rep.dim);
    for (w, c) in e.terms() {
        acc = acc.add(&rep.evaluate_word(w)?.scale(&BigInt::from(c)))?;
    }
    Ok(acc)
}

/// An affine transformation `v ↦ A v + t` of `Z^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    pub matrix: IntMatrix,
    pub translation: Vec<BigInt>,
}

impl Affine {
    pub fn identity(dim: usize) -> Self {
        Affine {
            matrix: IntMatrix::identity(dim),
            translation: vec![BigInt::zero(); dim],
        }
    }

    /// `(A,t)·(B,s) = (AB, t + A s)`
    pub fn compose(&self, other: &Affine) -> Result<Affine> {
        let shifted = self.matrix.mul_vec(&other.translation)?;
        Ok(Affine {
            matrix: self.matrix.mul(&other.matrix)?,
            translation: self.translation.iter().zip(shifted).map(|(a, b)| a + b).collect(),
        })
    }

    /// `(A,t)^{-1} = (A^{-1}, -A^{-1} t)`
    pub fn inverse(&self) -> Result<Affine> {
        let inv = self.matrix.inverse_unimodular()?;
        let t = inv.mul_vec(&self.translation)?;
        Ok(Affine {
            matrix: inv,
            translation: t.into_iter().map(|x| -x).collect(),
        })
    }
}

/// Assignment of an affine map to each generator, modelling `Z^m ⋊ F(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineRep {
    dim: usize,
    maps: Vec<Option<(Affine, Affine)>>,
}

impl AffineRep {
    pub fn new(dim: usize, maps: Vec<Option<(IntMatrix, Vec<BigInt>)>>) -> Result<Self> {
        let mut out = Vec::with_capacity(maps.len());
        for m in maps {
            match m {
                None => out.push(None),
                Some((matrix, translation)) => {
                    if matrix.rows() != dim || matrix.cols() != dim || translation.len() != dim {
                        return Err(Error::DimensionMismatch {
                            expected: dim,
                            found: translation.len().max(matrix.rows()),
                        });
                    }
                    let a = Affine { matrix, translation };
                    let inv = a.inverse()?;
                    out.push(Some((a, inv)));
                }
            }
        }
        Ok(AffineRep { dim, maps: out })
    }

    pub fn full(dim: usize, maps: Vec<(IntMatrix, Vec<BigInt>)>) -> Result<Self> {
        Self::new(dim, maps.into_iter().map(Some).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_generators(&self) -> usize {
        self.maps.len()
    }

    pub fn map(&self, gen: usize) -> Result<&Affine> {
        self.maps
            .get(gen)
            .and_then(Option::as_ref)
            .map(|p| &p.0)
            .ok_or_else(|| Error::Unassigned(format!("#{gen}")))
    }

    /// The matrix parts as a linear representation.
    pub fn linear_part(&self) -> Result<LinearRep> {
        LinearRep::new(
            self.dim,
            self.maps.iter().map(|m| m.as_ref().map(|p| p.0.matrix.clone())).collect(),
        )
    }

    /// Replaces translation parts by `t_x + shift_x`.
    pub fn shifted(&self, shifts: &[Vec<BigInt>]) -> Result<AffineRep> {
        let maps = self
            .maps
            .iter()
            .enumerate()
            .map(|(g, m)| {
                m.as_ref().map(|(a, _)| {
                    let t = match shifts.get(g) {
                        Some(s) => a.translation.iter().zip(s).map(|(x, y)| x + y).collect(),
                        None => a.translation.clone(),
                    };
                    (a.matrix.clone(), t)
                })
            })
            .collect();
        AffineRep::new(self.dim, maps)
    }

    pub fn evaluate(&self, w: &Word) -> Result<Affine> {
        let mut acc = Affine::identity(self.dim);
        for &l in w.letters() {
            let (a, inv) = self
                .maps
                .get(l.gen)
                .and_then(Option::as_ref)
                .ok_or_else(|| Error::Unassigned(format!("#{}", l.gen)))?;
            acc = acc.compose(if l.inverse { inv } else { a })?;
        }
        Ok(acc)
    }
}

/// Left-to-right product of the affine maps along `w`.
pub fn evaluate_affine(w: &Word, rep: &AffineRep) -> Result<(IntMatrix, Vec<BigInt>)> {
    let a = rep.evaluate(w)?;
    Ok((a.matrix, a.translation))
}

/// `x^a y^b` in `κ = <x, y | x y x^-1 = y^-1>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KbElement {
    pub a: i64,
    pub b: i64,
}

impl KbElement {
    pub const IDENTITY: KbElement = KbElement { a: 0, b: 0 };
    pub const X: KbElement = KbElement { a: 1, b: 0 };
    pub const Y: KbElement = KbElement { a: 0, b: 1 };

    pub fn new(a: i64, b: i64) -> Self {
        KbElement { a, b }
    }

    /// `x^a y^b · x^c y^d = x^{a+c} y^{(-1)^c b + d}`
    #[allow(clippy::should_implement_trait)]
    pub fn mul(self, q: KbElement) -> KbElement {
        let sign = if q.a.rem_euclid(2) == 0 { 1 } else { -1 };
        KbElement {
            a: self.a + q.a,
            b: sign * self.b + q.b,
        }
    }

    pub fn inverse(self) -> KbElement {
        KbElement::new(0, -self.b).mul(KbElement::new(-self.a, 0))
    }

    pub fn pow(self, n: i64) -> KbElement {
        let base = if n < 0 { self.inverse() } else { self };
        (0..n.unsigned_abs()).fold(KbElement::IDENTITY, |acc, _| acc.mul(base))
    }

    pub fn is_central(self) -> bool {
        self.b == 0 && self.a.rem_euclid(2) == 0
    }

    /// Coordinate in `ζκ = <x^2> ≅ Z`.
    pub fn center_component(self) -> Result<i64> {
        if self.is_central() {
            Ok(self.a / 2)
        } else {
            Err(Error::NotCentral(self.a, self.b))
        }
    }

    /// Evaluates a word in which `x_gen`, `y_gen` name the two generators and
    /// no other generator occurs.
    pub fn from_word(w: &Word, x_gen: usize, y_gen: usize) -> Result<KbElement> {
        let mut acc = KbElement::IDENTITY;
        for l in w.letters() {
            let g = if l.gen == x_gen {
                KbElement::X
            } else if l.gen == y_gen {
                KbElement::Y
            } else {
                return Err(Error::MalformedSpec(format!(
                    "generator #{} is not a Klein-bottle generator",
                    l.gen
                )));
            };
            acc = acc.mul(if l.inverse { g.inverse() } else { g });
        }
        Ok(acc)
    }
}

impl fmt::Display for KbElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a, self.b) {
            (0, 0) => write!(f, "1"),
            (a, 0) => write!(f, "x^{a}"),
            (0, b) => write!(f, "y^{b}"),
            (a, b) => write!(f, "x^{a} y^{b}"),
        }
    }
}

/// An automorphism of `κ`, stored by the images of `x` and `y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct KbAut {
    image_x: KbElement,
    image_y: KbElement,
}

impl KbAut {
    /// `image_y` must be `y^{±1}` and `image_x` must have `x`-exponent `±1`;
    /// every such pair respects `x y x^-1 = y^-1` and is bijective.
    pub fn new(image_x: KbElement, image_y: KbElement) -> Result<Self> {
        if image_y.a != 0 || image_y.b.abs() != 1 {
            return Err(Error::InvalidKbAut(format!("image of y is {image_y}, expected y^±1")));
        }
        if image_x.a.abs() != 1 {
            return Err(Error::InvalidKbAut(format!(
                "image of x is {image_x}, expected x-exponent ±1"
            )));
        }
        let f = KbAut { image_x, image_y };
        debug_assert_eq!(
            f.apply(KbElement::X).mul(f.apply(KbElement::Y)).mul(f.apply(KbElement::X).inverse()),
            f.apply(KbElement::Y).inverse()
        );
        Ok(f)
    }

    pub fn identity() -> Self {
        KbAut {
            image_x: KbElement::X,
            image_y: KbElement::Y,
        }
    }

    /// `x ↦ x^-1, y ↦ y`
    pub fn alpha() -> Self {
        KbAut {
            image_x: KbElement::new(-1, 0),
            image_y: KbElement::Y,
        }
    }

    /// `x ↦ x y, y ↦ y`
    pub fn gamma() -> Self {
        KbAut {
            image_x: KbElement::new(1, 1),
            image_y: KbElement::Y,
        }
    }

    /// `h ↦ g h g^-1`
    pub fn inner(g: KbElement) -> Self {
        let gi = g.inverse();
        KbAut {
            image_x: g.mul(KbElement::X).mul(gi),
            image_y: g.mul(KbElement::Y).mul(gi),
        }
    }

    pub fn image_x(&self) -> KbElement {
        self.image_x
    }

    pub fn image_y(&self) -> KbElement {
        self.image_y
    }

    pub fn apply(&self, p: KbElement) -> KbElement {
        self.image_x.pow(p.a).mul(self.image_y.pow(p.b))
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &KbAut) -> KbAut {
        KbAut {
            image_x: self.apply(other.image_x),
            image_y: self.apply(other.image_y),
        }
    }

    pub fn inverse(&self) -> KbAut {
        // image_x = x^ε y^m, image_y = y^δ
        let eps = self.image_x.a;
        let m = self.image_x.b;
        let delta = self.image_y.b;
        let y_pre = KbElement::new(0, delta);
        // f^-1(y) = y^δ and f^-1(x) = (x y^{-δm})^ε
        let xe = KbElement::X.mul(y_pre.pow(-m));
        let x_pre = xe.pow(eps);
        let inv = KbAut {
            image_x: x_pre,
            image_y: y_pre,
        };
        debug_assert_eq!(self.compose(&inv), KbAut::identity());
        inv
    }

    /// Sign by which the automorphism acts on `ζκ ≅ Z`.
    pub fn center_sign(&self) -> i64 {
        self.image_x.a.signum()
    }

    pub fn is_inner_by(&self, g: KbElement) -> bool {
        *self == KbAut::inner(g)
    }
}

impl fmt::Display for KbAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x -> {}, y -> {}", self.image_x, self.image_y)
    }
}

/// An element `k · s` of a Klein-bottle extension of a free group, where `s`
/// acts on `κ` by the automorphism. Products follow
/// `(α, k)(β, l) = (α∘β, k·α(l))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KbAffine {
    pub aut: KbAut,
    pub element: KbElement,
}

impl KbAffine {
    pub fn identity() -> Self {
        KbAffine {
            aut: KbAut::identity(),
            element: KbElement::IDENTITY,
        }
    }

    pub fn compose(&self, other: &KbAffine) -> KbAffine {
        KbAffine {
            aut: self.aut.compose(&other.aut),
            element: self.element.mul(self.aut.apply(other.element)),
        }
    }

    pub fn inverse(&self) -> KbAffine {
        let ai = self.aut.inverse();
        KbAffine {
            aut: ai,
            element: ai.apply(self.element.inverse()),
        }
    }
}

/// Evaluates a word under per-generator `(automorphism, fibre element)` data.
pub fn evaluate_kb(w: &Word, data: &[KbAffine]) -> Result<KbAffine> {
    let mut acc = KbAffine::identity();
    for l in w.letters() {
        let g = data
            .get(l.gen)
            .ok_or_else(|| Error::Unassigned(format!("#{}", l.gen)))?;
        acc = acc.compose(&if l.inverse { g.inverse() } else { *g });
    }
    Ok(acc)
}
