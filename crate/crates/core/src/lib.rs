#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle;
pub mod error;
pub mod linalg;
pub mod poly;
pub mod specfact;
pub mod random;
pub mod cert;
pub mod curvature;
pub mod dirichlet;
pub mod meanvalue;
pub mod harnack;
pub mod io;
pub mod selftest;
pub mod cli;
