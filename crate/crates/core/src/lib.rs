//! A computational laboratory for finite general linear groups over truncated
//! valuation rings, their maximal tori, and the characters induced from
//! extended torus data.
//!
//! The group under study is GL_n over F_q[pi]/pi^r, realized inside the
//! corresponding group over F_{q^d} as the fixed points of a Frobenius twisted
//! by a permutation matrix. Modules build up from finite field towers through
//! truncated polynomial rings, explicit group enumeration, torus character
//! theory, induction and inner products in the cyclotomic field, to a Lie
//! algebra model at level two.

pub mod chars;
pub mod clfun;
pub mod cyclo;
pub mod error;
pub mod fieldtower;
pub mod liealg;
pub mod perm;
pub mod torus;
pub mod truncring;
pub mod twistgroup;
pub mod workbench;

pub use chars::{genericity_report, AbelianDual, GenericityReport, LevelData, TorusChars};
pub use clfun::{
    double_cosets, dual_inner_product, induce, induce_naive, inner_product,
    inner_product_numeric, mackey_data, mackey_inner_product, mackey_inner_product_numeric,
    restricted_inner_product, restricted_inner_product_numeric, ClassFunction, DoubleCosets,
    DualPairing, MackeyData, Subgroup,
};
pub use cyclo::CycloValue;
pub use error::{LabError, Result};
pub use fieldtower::{embedding, Fe, FieldSpec, TraceTarget};
pub use liealg::{
    classify_beta, invariant_characters, letellier_pairing, letellier_pairing_numeric,
    split_algebra, verify_letellier, BetaClassType, ClassLabel, InvariantCharacter,
    LetellierReport, LetellierRow, LieModel, PairingOutcome, SplitAlgebra,
};
pub use perm::Perm;
pub use torus::TorusTable;
pub use truncring::{RingSpec, Rt, MAX_LEVEL, RT_ZERO};
pub use twistgroup::{closed_form_order, GroupSpec, Mat};
pub use workbench::{
    compare_conditions, mackey_check, structural_checks, verify_main, verify_main_selected,
    ConditionsReport, Lab, LabConfig, MackeyCheckReport, MackeyCheckRow, MainReport,
    StructuralReport, ThetaRow,
};
