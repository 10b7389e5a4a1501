//! The guide's chapters, compiled so that `cargo test` runs every listing.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/state-space.md")]
pub mod state_space {}
#[doc = include_str!("../../../book/src/propagators.md")]
pub mod propagators {}
#[doc = include_str!("../../../book/src/zeno-products.md")]
pub mod zeno_products {}
#[doc = include_str!("../../../book/src/soft-measurors.md")]
pub mod soft_measurors {}
#[doc = include_str!("../../../book/src/domain-calculus.md")]
pub mod domain_calculus {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
