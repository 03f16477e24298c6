#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod arthurs_kelly;
pub mod causal;
pub mod composite;
pub mod error;
pub mod figure;
pub mod numerics;
pub mod quantum;
pub mod states;

pub use error::{Error, Result};
