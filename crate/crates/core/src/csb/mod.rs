//! The Cantor-Schroeder-Bernstein pipeline for convexly biembeddable shuffles.

pub mod branches;
pub mod embedding;
pub mod instance;
pub mod phi;
pub mod side;
pub mod strata;
pub mod tree;

pub use branches::{
    branch_class_rep, build_gamma, class_member_between, class_tag, extended_color, synthetic_elem, BranchClass,
    ClassTag, ExtColor, Gamma, SyntheticOracle,
};
pub use embedding::{Classified, Embedding, Pres, Step, Val};
pub use instance::{scenario, BranchOracle, CsbInstance, InstanceSpec, Tag, SCENARIOS};
pub use side::{Side, SideElem, Sign};
pub use strata::{Peel, StratumResult};
pub use tree::{NodeColor, SideTree};
pub use phi::{build_phi, front_order, front_structure, run_csb, CsbConfig, CsbReport, Phi};
