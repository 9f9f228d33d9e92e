// Dense numerics index several arrays per loop, and `!(a > b)` deliberately rejects NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod fixtures;
pub mod generate;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod oracle;
pub mod regularizer;
pub mod report;
pub mod sampling;
pub mod sip;
