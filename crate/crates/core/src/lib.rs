//! Exact zero-sum computations over finite abelian groups of small order.
//!
//! Computes Davenport constants, enumerates minimal zero-sum sequences of
//! maximal length, and classifies them against the two parametric families
//! that describe them for groups `C_m ⊕ C_{mn}`.

pub mod error;
pub mod group;
pub mod report;
pub mod search;
pub mod sequence;
pub mod structure;
pub mod verify;

pub use error::{Error, Result};
pub use group::{automorphisms, inductive_quotient, projection, Axis, GroupElement, GroupSpec, Homomorphism};
pub use search::{
    canonicalize, count_ml_mzss, davenport, enumerate_ml_mzss, ml_mzss, Caps, DavenportResult, EnumerationReport,
    SearchConfig,
};
pub use sequence::{Sequence, SumSet};
pub use structure::{
    classify, find_admissible_factorization, gen_struc1, gen_struc2, gen_type1, gen_type2, ClassificationResult,
    Struc1Witness, Struc2Witness, Type1Witness, Type2Witness,
};
pub use verify::{
    check_cyclic_inverse, check_property_b, egz_property, soundness_sweep, tm1_structure_check, verify_theorem,
    VerificationReport,
};
