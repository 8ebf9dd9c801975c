//! The transgression `d²₂,₀` of a central extension of `Z²` by `Z`, computed
//! on the double complex `C_*(β) ⊗_Λ P̄_*` by a single zig-zag, against the
//! evaluation `ξ_*` of the extension class.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::extensions::{spec_from_group, BundleSpec, FibreModel};
use crate::fpgroups::{Presentation, Word};
use crate::groupring::{fox_derivative, FreeRingElement};
use crate::zlinalg::{cokernel, IntMatrix};

/// Element of `Λ = Z[x^±1, y^±1]`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LaurentElement {
    terms: BTreeMap<(i64, i64), i64>,
}

impl LaurentElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0, 0)
    }

    pub fn monomial(c: i64, a: i64, b: i64) -> Self {
        let mut e = Self::zero();
        e.add_term((a, b), c);
        e
    }

    pub fn x() -> Self {
        Self::monomial(1, 1, 0)
    }

    pub fn y() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), i64)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, key: (i64, i64), c: i64) {
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(key).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero();
        for (key, c) in self.terms() {
            out.add_term(key, c * k);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((a, b), c) in self.terms() {
            for ((a2, b2), c2) in other.terms() {
                out.add_term((a + a2, b + b2), c * c2);
            }
        }
        out
    }

    /// `ε`: sum of coefficients.
    pub fn augment(&self) -> i64 {
        self.terms.values().sum()
    }

    /// Exact quotient by `1 - y`, if it exists.
    pub fn div_one_minus_y(&self) -> Option<Self> {
        // Per power of x: (1 - y) g = f  gives  g_j = Σ_{i ≤ j} f_i.
        let mut out = Self::zero();
        let mut slices: BTreeMap<i64, Vec<(i64, i64)>> = BTreeMap::new();
        for ((a, b), c) in self.terms() {
            slices.entry(a).or_default().push((b, c));
        }
        for (a, slice) in slices {
            let lo = slice[0].0;
            let hi = slice[slice.len() - 1].0;
            let coeff: BTreeMap<i64, i64> = slice.into_iter().collect();
            let mut acc = 0;
            for j in lo..=hi {
                acc += coeff.get(&j).copied().unwrap_or(0);
                out.add_term((a, j), acc);
            }
            if acc != 0 {
                return None;
            }
        }
        debug_assert_eq!(out.mul(&Self::one().sub(&Self::y())), *self);
        Some(out)
    }

    /// Writes an element of the augmentation ideal as `a (x-1) + b (y-1)`.
    pub fn lift_to_generators(&self) -> Option<(Self, Self)> {
        if self.augment() != 0 {
            return None;
        }
        let mut a = Self::zero();
        let mut b = Self::zero();
        // x^i y^j - 1 = y^j (x^i - 1) + (y^j - 1)
        for ((i, j), c) in self.terms() {
            a = a.add(&geometric(i, 1, 0).mul(&Self::monomial(c, 0, j)));
            b = b.add(&geometric(j, 0, 1).scale(c));
        }
        Some((a, b))
    }
}

/// `q` with `t^n - 1 = (t - 1) q` for `t = x^dx y^dy`.
fn geometric(n: i64, dx: i64, dy: i64) -> LaurentElement {
    let mut q = LaurentElement::zero();
    if n >= 0 {
        for t in 0..n {
            q.add_term((t * dx, t * dy), 1);
        }
    } else {
        for t in n..0 {
            q.add_term((t * dx, t * dy), -1);
        }
    }
    q
}

impl fmt::Display for LaurentElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for ((a, b), c) in self.terms() {
            let mono = match (a, b) {
                (0, 0) => String::new(),
                (a, 0) => pow_str("x", a),
                (0, b) => pow_str("y", b),
                (a, b) => format!("{}{}", pow_str("x", a), pow_str("y", b)),
            };
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            let sep = if first { "" } else { " " };
            let space = if first || sign.is_empty() { "" } else { " " };
            if mono.is_empty() {
                write!(f, "{sep}{sign}{space}{mag}")?;
            } else if mag == 1 {
                write!(f, "{sep}{sign}{space}{mono}")?;
            } else {
                write!(f, "{sep}{sign}{space}{mag}{mono}")?;
            }
            first = false;
        }
        Ok(())
    }
}

fn pow_str(v: &str, e: i64) -> String {
    if e == 1 {
        v.to_string()
    } else {
        format!("{v}^{e}")
    }
}

/// Image in `Λ` of an element of `Z[F]`, with generator `g` sent to the
/// monomial `weights[g]`.
fn push(e: &FreeRingElement, weights: &[(i64, i64)]) -> LaurentElement {
    let mut out = LaurentElement::zero();
    for (w, c) in e.terms() {
        let (mut a, mut b) = (0, 0);
        for l in w.letters() {
            a += l.sign() * weights[l.gen].0;
            b += l.sign() * weights[l.gen].1;
        }
        out.add_term((a, b), c);
    }
    out
}

type Vector = Vec<LaurentElement>;

fn vec_is_zero(v: &[LaurentElement]) -> bool {
    v.iter().all(LaurentElement::is_zero)
}

/// `Σ_i coeffs[i] · rows[i]`.
fn combine(coeffs: &[LaurentElement], rows: &[Vector]) -> Vector {
    let n = rows.first().map_or(0, Vec::len);
    let mut out = vec![LaurentElement::zero(); n];
    for (c, row) in coeffs.iter().zip(rows) {
        for (o, r) in out.iter_mut().zip(row) {
            *o = o.add(&c.mul(r));
        }
    }
    out
}

/// Fox–Lyndon complex `Λ^R → Λ^X → Λ` of a presentation of `Z²`.
/// `d2[r]` is the row `(∂_x r)_x`, `d1[x] = x - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlComplex {
    pub d1: Vector,
    pub d2: Vec<Vector>,
}

impl FlComplex {
    /// Both differentials after `x, y ↦ 1`.
    pub fn augmented(&self) -> (IntMatrix, IntMatrix) {
        let d1 = IntMatrix::from_rows(&[self.d1.iter().map(LaurentElement::augment).collect()]);
        let d2 = IntMatrix::from_rows(&self.d2.iter().map(|r| r.iter().map(LaurentElement::augment).collect()).collect::<Vec<_>>());
        (d1, d2)
    }
}

fn check_zero(label: &str, v: &[LaurentElement]) -> Result<()> {
    if vec_is_zero(v) {
        Ok(())
    } else {
        Err(Error::NotAComplex(format!("{label} is not zero")))
    }
}

/// Accepts `<x, y | [x,y]>` or `<x, y | [y,x]>` under any generator names.
pub fn build_fl_complex(base: &Presentation) -> Result<FlComplex> {
    let unsupported = || Error::UnsupportedBase("only the free abelian group of rank 2 on a single commutator relator is supported".into());
    if base.num_generators() != 2 || base.relators().len() != 1 {
        return Err(unsupported());
    }
    let r = &base.relators()[0];
    let (x, y) = (Word::generator(0), Word::generator(1));
    if *r != Word::commutator(&x, &y) && *r != Word::commutator(&y, &x) {
        return Err(unsupported());
    }
    let weights = [(1, 0), (0, 1)];
    let d1 = vec![LaurentElement::x().sub(&LaurentElement::one()), LaurentElement::y().sub(&LaurentElement::one())];
    let d2 = vec![(0..2).map(|g| push(&fox_derivative(r, g), &weights)).collect::<Vector>()];
    for row in &d2 {
        check_zero("d1 ∘ d2", &[combine(row, &d1.iter().map(|e| vec![e.clone()]).collect::<Vec<_>>())[0].clone()])?;
    }
    Ok(FlComplex { d1, d2 })
}

/// `P̄_*` for `π_k = <u, x, y | u^k r, [u,x], [u,y]>`, generators ordered
/// `(u, x, y)`, relators ordered as listed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialResolution {
    pub k: i64,
    pub presentation: Presentation,
    pub d1: Vector,
    pub d2: Vec<Vector>,
}

impl PartialResolution {
    pub fn new(base: &Presentation, k: i64) -> Result<Self> {
        build_fl_complex(base)?;
        let names = base.generators();
        let mut u = "u".to_string();
        while names.contains(&u) {
            u.push('\'');
        }
        let all = vec![u, names[0].clone(), names[1].clone()];
        let shift = |w: &Word| Word::reduce(w.letters().iter().map(|l| crate::fpgroups::Letter::new(l.gen + 1, l.inverse)));
        let (uw, xw, yw) = (Word::generator(0), Word::generator(1), Word::generator(2));
        let relators = vec![
            uw.pow(k).mul(&shift(&base.relators()[0])),
            Word::commutator(&uw, &xw),
            Word::commutator(&uw, &yw),
        ];
        let presentation = Presentation::new(all, relators)?;
        let weights = [(0, 0), (1, 0), (0, 1)];
        let one = LaurentElement::one();
        let d1 = vec![LaurentElement::zero(), LaurentElement::x().sub(&one), LaurentElement::y().sub(&one)];
        let d2: Vec<Vector> = presentation
            .relators()
            .iter()
            .map(|r| (0..3).map(|g| push(&fox_derivative(r, g), &weights)).collect())
            .collect();
        let cols: Vec<Vector> = d1.iter().map(|e| vec![e.clone()]).collect();
        for row in &d2 {
            check_zero("∂'' ∘ ∂''", &combine(row, &cols))?;
        }
        Ok(PartialResolution { k, presentation, d1, d2 })
    }

    fn boundary1(&self, v: &[LaurentElement]) -> LaurentElement {
        combine(v, &self.d1.iter().map(|e| vec![e.clone()]).collect::<Vec<_>>())[0].clone()
    }

    /// Coordinates `(a, h)` of a 1-cycle `a p_u + h ((1-y) p_x + (x-1) p_y)`.
    pub fn cycle_coordinates(&self, v: &[LaurentElement]) -> Result<(LaurentElement, LaurentElement)> {
        if !self.boundary1(v).is_zero() {
            return Err(Error::NotAComplex("chain in P̄_1 is not a cycle".into()));
        }
        let h = v[1]
            .div_one_minus_y()
            .ok_or_else(|| Error::NotAComplex("cycle outside the expected basis".into()))?;
        let x1 = LaurentElement::x().sub(&LaurentElement::one());
        if v[2] != x1.mul(&h) {
            return Err(Error::NotAComplex("cycle outside the expected basis".into()));
        }
        Ok((v[0].clone(), h))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransgressionReport {
    pub k: i64,
    pub fl: FlComplex,
    pub resolution: PartialResolution,
    /// `P_1`-components of `z ∈ K_{2,0} ⊕ K_{1,1}`: `z_x`, `z_y` with
    /// `z = c_2 ⊗ 1 + c_1^x ⊗ z_x + c_1^y ⊗ z_y`.
    pub z: [Vector; 2],
    /// `K_{1,0}` component of `dz`; zero when `z` is a cycle modulo `F_0`.
    pub dz_filtration1: [LaurentElement; 2],
    /// `K_{0,1}` component of `dz`.
    pub dz: Vector,
    /// `ε` of the cycle coordinates of `dz`.
    pub cycle_class: (i64, i64),
    /// Coefficient of `[p_1^u]` in `H_0(β; H_1(P̄)) ≅ Z`.
    pub value: BigInt,
}

/// Zig-zag for `π_k = <u, x, y | u^k [x,y], [u,x], [u,y]>`.
pub fn transgress(k: i64) -> Result<TransgressionReport> {
    transgress_over(&standard_base(), k)
}

pub fn standard_base() -> Presentation {
    let (x, y) = (Word::generator(0), Word::generator(1));
    Presentation::new(vec!["x".into(), "y".into()], vec![Word::commutator(&x, &y)]).expect("valid")
}

pub fn transgress_over(base: &Presentation, k: i64) -> Result<TransgressionReport> {
    let fl = build_fl_complex(base)?;
    let res = PartialResolution::new(base, k)?;
    let boundary = &fl.d2[0];

    // ∂'' z_g = D_g, where ∂' c_2 = Σ_g D_g c_1^g
    let mut z: [Vector; 2] = Default::default();
    for g in 0..2 {
        let (a, b) = boundary[g]
            .lift_to_generators()
            .ok_or_else(|| Error::NotAComplex("boundary coefficient outside the augmentation ideal".into()))?;
        z[g] = vec![LaurentElement::zero(), a, b];
    }

    // d = ∂' ⊗ 1 + (-1)^p 1 ⊗ ∂''
    let dz_filtration1 = [
        boundary[0].sub(&res.boundary1(&z[0])),
        boundary[1].sub(&res.boundary1(&z[1])),
    ];
    let dz = combine(&fl.d1, &[z[0].clone(), z[1].clone()]);

    let (a, h) = res.cycle_coordinates(&dz)?;
    let cycle_class = (a.augment(), h.augment());

    // H_0(β; H_1(P̄)) = Z^2 / ε(∂'' P̄_2) in the basis (e_u, e_k)
    let mut rels = Vec::new();
    for row in &res.d2 {
        let (ra, rh) = res.cycle_coordinates(row)?;
        rels.push(vec![BigInt::from(ra.augment()), BigInt::from(rh.augment())]);
    }
    let quotient = cokernel(&IntMatrix::from_columns(2, &rels)?);
    if quotient.rank() != 1 || !quotient.torsion().is_empty() {
        return Err(Error::NotAComplex(format!("H_0(β; H_1) is {quotient}, expected Z")));
    }
    let eu = quotient.coordinates(&[BigInt::one(), BigInt::zero()])?;
    let cls = quotient.coordinates(&[BigInt::from(cycle_class.0), BigInt::from(cycle_class.1)])?;
    // e_u generates, so its coordinate is ±1
    let value = &cls[0] * &eu[0];
    Ok(TransgressionReport {
        k,
        fl,
        resolution: res,
        z,
        dz_filtration1,
        dz,
        cycle_class,
        value,
    })
}

/// `ξ_*` on `n` times the fundamental class of the base.
///
/// The extension is read off the presentation of `π_k` as a rank-one torus
/// bundle with zero lifts; `r^n` is evaluated affinely and `n` copies of the
/// relator's fibre value are added. The fibre is identified with `Z` so
/// that `k = 1` gives `+1`, which is `-s(r^n)` in the literal convention.
pub fn xi_star(k: i64, n: i64) -> Result<BigInt> {
    let res = PartialResolution::new(&standard_base(), k)?;
    let u = res.presentation.generators()[0].clone();
    let BundleSpec::Torus(spec) = spec_from_group(&res.presentation, &FibreModel::Torus(vec![u]))? else {
        unreachable!("torus fibre requested")
    };
    let r = &spec.base.relators()[0];
    let value = spec.cocycle.evaluate(&r.pow(n))?;
    if !value.matrix.is_identity() {
        return Err(Error::NotAComplex("central extension with nontrivial action".into()));
    }
    let s = &value.translation[0] + BigInt::from(n) * &spec.offsets[0][0];
    Ok(-s)
}

/// `transgress(k) = ξ_*(k, 1)` for every `k` in the range.
pub fn verify_theorem5(range: std::ops::RangeInclusive<i64>) -> Result<bool> {
    for k in range {
        if transgress(k)?.value != xi_star(k, 1)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Convenience: the transgression value as `i64`.
pub fn transgress_value(k: i64) -> Result<i64> {
    transgress(k)?
        .value
        .to_i64()
        .ok_or_else(|| Error::NotAComplex("value out of range".into()))
}
