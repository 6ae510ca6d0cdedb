//! Numerical laboratory for completely positive maps on balls of real
//! seminormed involutive algebras: enveloping C*-realizations, positivity
//! certificates, GNS-style dilations on finite sample sets, homogeneous
//! component expansions, and lifting of components to symmetric powers.

// Index loops here typically drive several parallel matrices at once, and
// guards written as `!(x < y)` deliberately reject NaN; both read better
// than the clippy-preferred forms in kernel-assembly code.
#![allow(clippy::needless_range_loop)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::type_complexity)]

pub mod algebra;
pub mod catalog;
pub mod config;
pub mod driver;
pub mod envelope;
pub mod error;
pub mod expand;
pub mod factorize;
pub mod gns;
pub mod linalg;
pub mod positivity;
pub mod report;
pub mod rng;
pub mod semigroup;

pub use error::{Error, Result};
