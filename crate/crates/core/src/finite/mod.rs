//! Brute-force ground truth on finite abelian groups.

pub mod cyclotomic;
pub mod dist;
pub mod group;
pub mod oracle;

pub use dist::{idempotent_classify, random_dist, Dist, IdempotentClass, Profile};
pub use group::{AutMatrix, Element, FiniteGroup, MAX_ORDER};
pub use oracle::{
    char_fn, char_fn_exact, equivalence_test, joint_independence_check, random_instance, random_non_idempotent,
    sd_equation_check, Equivalence, Exactness, FiniteForms, Instance, DEFAULT_TUPLE_CAP,
};
