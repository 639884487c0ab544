//! Functional equivalence toolkit for single-hidden-layer tanh networks.
//!
//! A parameter assigns each hidden unit an outgoing weight vector, an
//! incoming weight vector, and a bias, plus an output bias vector; it
//! implements the function `f(x) = d + sum_i a_i * tanh(b_i . x + c_i)`.
//! This crate canonicalises such parameters, detects and removes structural
//! redundancy among hidden units, decides functional equivalence, describes
//! the full equivalence class of a parameter, and constructs verified
//! piecewise-linear paths of equal-function parameters.

pub mod canonical;
pub mod error;
pub mod generate;
pub mod lex;
pub mod membership;
pub mod param;
pub mod paths;
pub mod reducibility;
mod sampling;
pub mod transform;

pub use canonical::{canonicalize, equivalent, CanonicalizationRecord};
pub use error::{Error, Result};
pub use generate::{plant_redundancy, random_parameter, random_with_rank};
pub use lex::{lex_compare, lex_sign};
pub use membership::{
    enumerate_traces, in_class_bruteforce, in_class_bruteforce_with_cap, random_trace,
    sample_class_member, sample_class_member_with, trace_membership, CanonicalizationTrace,
    UnitFate, DEFAULT_TRACE_ENUMERATION_CAP,
};
pub use param::{functions_equal, HiddenUnit, Parameter, Shape, ToleranceConfig};
pub use paths::{
    blank_exchange_path, connect, negation_path, path_to_canonical, reduction_subpath,
    seven_segment_path, transposition_path, verify_path, PathFile, PathVerificationReport,
    PiecewiseLinearPath,
};
pub use reducibility::{
    find_redundancy, rank, reduce_in_place, reduce_once, reduce_to_minimal, stage1_fixpoint,
    ConditionKind, ReducibilityWitness,
};
pub use transform::{
    apply_all, exchange_units, negate_unit, random_transforms, UnitTransform,
};
