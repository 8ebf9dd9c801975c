//! Mapping classes of the genus-3 double `T_3 = Σ_0 ∪ Σ_1` acting on `H_1`.
//!
//! Basis `(a1, a2, a3, b1, b2, b3)` with `⟨a_i, b_j⟩ = δ_ij`. The `b_i` are the
//! boundary curves of the four-holed sphere `Σ_0` (with `b4 = -(b1+b2+b3)`)
//! and `a_i` crosses from `Σ_0` to `Σ_1` through `b_i` and back through `b4`.
//! The coordinates are reproduced from a cellular model in the test suite.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::extensions::{coinvariants, Verdict};
use crate::zlinalg::{AbelianGroup, IntMatrix};

pub const RANK: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticSpace {
    pub pairing: IntMatrix,
}

impl SymplecticSpace {
    /// `J = [0 I; -I 0]` on `Z^{2g}`.
    pub fn standard(genus: usize) -> Self {
        let n = 2 * genus;
        let mut j = IntMatrix::zeros(n, n);
        for i in 0..genus {
            j.set(i, genus + i, BigInt::from(1));
            j.set(genus + i, i, BigInt::from(-1));
        }
        SymplecticSpace { pairing: j }
    }

    pub fn rank(&self) -> usize {
        self.pairing.rows()
    }

    pub fn pair(&self, v: &[BigInt], w: &[BigInt]) -> BigInt {
        let jw = self.pairing.mul_vec(w).expect("dimension checked by caller");
        v.iter().zip(&jw).map(|(a, b)| a * b).sum()
    }

    pub fn is_unimodular_skew(&self) -> bool {
        self.pairing.transpose() == self.pairing.neg() && self.pairing.is_unimodular()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveClass {
    pub name: String,
    pub vector: Vec<BigInt>,
}

/// An automorphism of `H_1`, with the sign by which it scales the pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappingClass {
    pub matrix: IntMatrix,
    pub orientation: i8,
}

impl MappingClass {
    pub fn identity() -> Self {
        MappingClass {
            matrix: IntMatrix::identity(RANK),
            orientation: 1,
        }
    }

    /// `M^T J M = ±J`; the sign is recorded.
    pub fn new(matrix: IntMatrix, space: &SymplecticSpace) -> Result<Self> {
        let n = space.rank();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.rows(),
            });
        }
        let pulled = matrix.transpose().mul(&space.pairing)?.mul(&matrix)?;
        let orientation = if pulled == space.pairing {
            1
        } else if pulled == space.pairing.neg() {
            -1
        } else {
            return Err(Error::MalformedSpec("matrix does not preserve the intersection pairing up to sign".into()));
        };
        Ok(MappingClass { matrix, orientation })
    }

    pub fn compose(&self, other: &MappingClass) -> MappingClass {
        MappingClass {
            matrix: self.matrix.mul(&other.matrix).expect("same rank"),
            orientation: self.orientation * other.orientation,
        }
    }

    pub fn inverse(&self) -> MappingClass {
        MappingClass {
            matrix: self.matrix.inverse_unimodular().expect("automorphism"),
            orientation: self.orientation,
        }
    }

    pub fn commutator(&self, other: &MappingClass) -> MappingClass {
        self.compose(other).compose(&self.inverse()).compose(&other.inverse())
    }

    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(v).expect("same rank")
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleModel {
    pub space: SymplecticSpace,
    pub curves: Vec<CurveClass>,
}

impl DoubleModel {
    pub fn curve(&self, name: &str) -> Result<&[BigInt]> {
        self.curves
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.vector.as_slice())
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn twist(&self, name: &str) -> Result<MappingClass> {
        Ok(transvection(&self.space, self.curve(name)?))
    }
}

fn v(coords: [i64; RANK]) -> Vec<BigInt> {
    coords.iter().map(|&c| BigInt::from(c)).collect()
}

pub fn build_double_model() -> DoubleModel {
    let b = [
        [0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 0, 0, 0, 0, 1],
        [0, 0, 0, -1, -1, -1],
    ];
    let mut curves = Vec::new();
    let mut push = |name: String, c: [i64; RANK]| curves.push(CurveClass { name, vector: v(c) });
    for (i, bi) in b.iter().enumerate() {
        push(format!("b{}", i + 1), *bi);
        push(format!("d{}0", i + 1), *bi);
        push(format!("d{}1", i + 1), *bi);
    }
    let x0 = [0, 0, 0, 1, 1, 0];
    let y0 = [0, 0, 0, 0, 1, 1];
    let z0 = [0, 0, 0, 1, 0, 1];
    let neg = |c: [i64; RANK]| c.map(|e| -e);
    push("x0".into(), x0);
    push("y0".into(), y0);
    push("z0".into(), z0);
    push("x1".into(), neg(x0));
    push("y1".into(), neg(y0));
    push("z1".into(), neg(z0));
    for i in 0..3 {
        let mut a = [0; RANK];
        a[i] = 1;
        push(format!("a{}", i + 1), a);
    }
    DoubleModel {
        space: SymplecticSpace::standard(3),
        curves,
    }
}

/// `T_c(v) = v + ⟨v, c⟩ c`
pub fn transvection(space: &SymplecticSpace, c: &[BigInt]) -> MappingClass {
    let n = space.rank();
    let mut m = IntMatrix::identity(n);
    for j in 0..n {
        let mut e = vec![BigInt::zero(); n];
        e[j] = BigInt::from(1);
        let p = space.pair(&e, c);
        for (i, ci) in c.iter().enumerate() {
            let val = m.get(i, j) + &p * ci;
            m.set(i, j, val);
        }
    }
    MappingClass {
        matrix: m,
        orientation: 1,
    }
}

/// The hyperelliptic involution exchanging the two halves: `-I`.
pub fn hyperelliptic() -> MappingClass {
    MappingClass {
        matrix: IntMatrix::scalar(RANK, -1),
        orientation: 1,
    }
}

/// The mirror of the double fixing `Σ_0 ∩ Σ_1`; orientation reversing.
pub fn mirror() -> MappingClass {
    let mut m = IntMatrix::identity(RANK);
    for i in 0..3 {
        m.set(i, i, BigInt::from(-1));
    }
    MappingClass {
        matrix: m,
        orientation: -1,
    }
}

fn product(ms: &[MappingClass]) -> MappingClass {
    ms.iter().fold(MappingClass::identity(), |acc, m| acc.compose(m))
}

/// `t_x t_y t_z = t_{d1} t_{d2} t_{d3} t_{d4}` on `H_1`, with the given class for `z`.
pub fn lantern_check_with(model: &DoubleModel, z: &[BigInt]) -> Result<bool> {
    let lhs = product(&[model.twist("x0")?, model.twist("y0")?, transvection(&model.space, z)]);
    let rhs = product(&[
        model.twist("d10")?,
        model.twist("d20")?,
        model.twist("d30")?,
        model.twist("d40")?,
    ]);
    Ok(lhs == rhs)
}

pub fn lantern_check(model: &DoubleModel) -> Result<bool> {
    lantern_check_with(model, model.curve("z0")?)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoData {
    pub monodromy: [MappingClass; 6],
    pub g_class: Vec<BigInt>,
}

/// Images of the standard genus-3 generators:
/// `t_x, t_y t_z f, t_y, t_z f, t_z, f t_y` (curves in `Σ_0`), and `g = [b1]`.
pub fn endo_data(model: &DoubleModel) -> Result<EndoData> {
    let (tx, ty, tz, f) = (model.twist("x0")?, model.twist("y0")?, model.twist("z0")?, hyperelliptic());
    Ok(EndoData {
        monodromy: [
            tx,
            product(&[ty.clone(), tz.clone(), f.clone()]),
            ty.clone(),
            tz.compose(&f),
            tz,
            f.compose(&ty),
        ],
        g_class: model.curve("b1")?.to_vec(),
    })
}

/// `[A1,A2][A3,A4][A5,A6] = I`, the image of the surface relator.
pub fn endo_relation_check(d: &EndoData) -> bool {
    let m = &d.monodromy;
    product(&[m[0].commutator(&m[1]), m[2].commutator(&m[3]), m[4].commutator(&m[5])]).is_identity()
}

/// Coinvariants `Z^6 / <(M - I) v>` and the class of `g` in them.
pub fn jacobian_obstruction(monodromy: &[MappingClass], g: &[BigInt]) -> Result<(AbelianGroup, Vec<BigInt>)> {
    let mats: Vec<IntMatrix> = monodromy.iter().map(|m| m.matrix.clone()).collect();
    let group = coinvariants(g.len(), &mats)?;
    let class = group.coordinates(g)?;
    Ok((group, class))
}

fn verdict_for(class: &[BigInt]) -> Verdict {
    if class.iter().all(Zero::is_zero) {
        Verdict::Splits
    } else {
        Verdict::NoSection
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EndoReport {
    pub data: EndoData,
    pub lantern: bool,
    pub relation: bool,
    pub coinvariants: AbelianGroup,
    pub class: Vec<BigInt>,
    pub verdict: Verdict,
}

pub fn endo_report() -> Result<EndoReport> {
    let model = build_double_model();
    let data = endo_data(&model)?;
    let gens = [model.twist("x0")?, model.twist("y0")?, model.twist("z0")?, hyperelliptic()];
    let (coinvariants, class) = jacobian_obstruction(&gens, &data.g_class)?;
    Ok(EndoReport {
        lantern: lantern_check(&model)?,
        relation: endo_relation_check(&data),
        verdict: verdict_for(&class),
        coinvariants,
        class,
        data,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KbVariantReport {
    pub relation: bool,
    pub coinvariants: AbelianGroup,
    pub class: Vec<BigInt>,
    pub verdict: Verdict,
    /// Homology criterion for the pullback to the orientation double cover
    /// of the Klein bottle; informational only.
    pub torus_pullback: (AbelianGroup, Vec<BigInt>),
}

/// Base `<a, b | b a b a^-1>` with `b ↦ t_x t_y t_z`, `a ↦ ρ`.
pub fn kb_base_variant() -> Result<KbVariantReport> {
    let model = build_double_model();
    let t = product(&[model.twist("x0")?, model.twist("y0")?, model.twist("z0")?]);
    let rho = mirror();
    let relation = product(&[t.clone(), rho.clone(), t.clone(), rho.inverse()]).is_identity();
    let g = model.curve("b1")?;
    let (coinvariants, class) = jacobian_obstruction(&[t.clone(), rho.clone()], g)?;
    // the double cover has fundamental group <a^2, b>
    let torus_pullback = jacobian_obstruction(&[t, rho.compose(&rho)], g)?;
    Ok(KbVariantReport {
        relation,
        verdict: verdict_for(&class),
        coinvariants,
        class,
        torus_pullback,
    })
}
