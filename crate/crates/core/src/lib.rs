//! Character-group arithmetic for rank-one solenoids, characteristic
//! functions given in closed form, a verifier for the Skitovich-Darmois
//! functional equation on finite test boxes, and a brute-force oracle on
//! finite abelian groups.
//!
//! Everything here is `no_std` with `alloc`. File formats and the command
//! line live in the `sdlab` crate.

#![no_std]

extern crate alloc;

pub mod arith;
pub mod boxes;
pub mod charfn;
pub mod constructions;
pub mod error;
pub mod finite;
pub mod solenoid;
pub mod value;
pub mod verifier;

pub use arith::Rational;
pub use boxes::TestBox;
pub use charfn::{product, CharFn, EvalContext, PhaseChar};
pub use error::{Error, Result};
pub use solenoid::{
    fg_generator, CosetLabel, FgSubgroup, HElement, Height, Multiplier, RationalSubgroup, SolenoidCase,
    SolenoidClass, SupernaturalSpec,
};
pub use value::Value;
pub use verifier::{
    derived_identities_check, halving_solve, nonvanishing_solution_is_character, residual_at, support_group_n,
    verify_on_box, FormsMatrix, Residual, SupportReport, VerifyConfig, VerifyReport,
};
pub use constructions::{
    build_lemma37_case1, build_thm41_part2, lemma_compgr_conditions, obstruction_check, ClassExclusion,
    CompGrConditions, ConstructionManifest, Expected, Obstruction,
};
