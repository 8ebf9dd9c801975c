//! Splitting obstructions for group extensions coming from surface bundles.
//!
//! The crate is organised bottom-up:
//!
//! * [`zlinalg`]: exact integer matrices, Smith normal form, cokernels.
//! * [`fpgroups`]: free-group words, the presentation language, abelianization.
//! * [`groupring`]: Fox derivatives and evaluation under linear and affine
//!   representations, plus the Klein-bottle group and its automorphisms.
//! * [`extensions`]: the obstruction class `[s(r)]`, the abelianization
//!   splitting test and low-degree cohomology of one-relator bases.
//! * [`transgression`]: the chain-level check that the transgression equals
//!   evaluation of the extension class over `Z^2`.
//! * [`mcg`]: mapping classes of the genus-3 double acting on homology.

pub mod error;
pub mod extensions;
pub mod fpgroups;
pub mod groupring;
pub mod mcg;
pub mod transgression;
pub mod zlinalg;

pub use error::{Error, Result};
pub use extensions::{
    coinvariants, h1_h2_base, jw_submodule, lemma2_check, obstruction_class, s_of_r,
    BundleSpec, KbBundleSpec, Lemma2Report, ObstructionReport, TorusBundleSpec, Verdict,
};
pub use fpgroups::{abelianization, parse_presentation, Letter, Presentation, Word};
pub use groupring::{AffineRep, FreeRingElement, KbAut, KbElement, LinearRep};
pub use zlinalg::{cokernel, smith_normal_form, AbelianGroup, IntMatrix, SmithDecomposition};
