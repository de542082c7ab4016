//! Exact construction of PBW generators for positive quantum Borel algebras
//! of types A, C and D inside the braided shuffle algebra, together with
//! checks of their structure constants and coproduct formulas.

pub mod coeffring;
pub mod datum;
pub mod error;
pub mod freeword;
pub mod pbwgen;
pub mod shuffle;
pub mod verify;

pub use coeffring::{
    lp_eval, parse_poly, Assignment, CoeffError, LaurentPoly, Monomial, Numeric, Scalar,
    ScalarDomain, Symbolic, VarSet,
};
pub use datum::{make_datum, numeric_datum, QuantumDatum, Series, Specialization};
pub use error::{Error, Result};
pub use freeword::{
    make_word, Algebra, Arrangement, Direction, FreeElem, Letters, Multidegree, Word, WordKind,
};
pub use pbwgen::{
    alpha, closed_form_image, epsilon, pbw_generators, tau_table, GeneratorId, StructureConstants,
};
pub use shuffle::{BraidedTensor, ShuffleElem, Side};
pub use verify::{
    coproduct_formula, run_suite, verify_an_no_exceptions, verify_identity_suite,
    verify_pbw_independence, verify_vanishing_top_pair, Arith, CaseResult, CoproductFormula,
    CoproductMode, CoproductTerm, Identity, Suite, SuiteOptions, VerificationReport,
};
