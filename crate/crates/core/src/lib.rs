//! Computational functor homology over prime fields.

pub mod abgrp;
pub mod addcat;
pub mod doldpuppe;
pub mod error;
pub mod functor;
pub mod grpalg;
pub mod homalg;
pub mod koszul;
pub mod linalg;
pub mod polyfilt;

pub use error::{Error, Result};
