pub mod automorphism;
pub mod conditions;
pub mod intmat;
pub mod poly;

pub use automorphism::{
    eigen_coordinates, norm_form_2d, norm_form_numeric, verify_norm_form, Eigenframe,
    NormFormReport, ToralAutomorphism,
};
pub use conditions::{check_conditions, kronecker_classify, sl2_kronecker_scan, ConditionReport, Kronecker, KroneckerScan};
pub use intmat::IntMatrix;
pub use poly::{char_poly, cyclotomic, IntPoly};
