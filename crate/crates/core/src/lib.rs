//! Numerical laboratory for the concentration of sample covariance matrices
//! of heavy-tailed isotropic distributions.
//!
//! The library provides:
//!
//! * samplers for centered isotropic families with controlled projection
//!   moments ([`dist`]),
//! * Gram/covariance computations and extreme singular values ([`matrix`]),
//! * order-statistic operators and closed-form tail bounds ([`order_stats`]),
//! * Hoeffding/Kesten bound evaluators and an empirical Lévy concentration
//!   function ([`concentration`]),
//! * the threshold-graph coloring of a sample and its chromatic tail bound
//!   ([`coloring`]),
//! * a randomized sparsifying projection with verifiable certificates
//!   ([`sparsify`]),
//! * support-preserving nets and brute-force quadratic-form oracles
//!   ([`nets`], [`quadforms`]),
//! * scaling experiments, bound validators and their CSV reports
//!   ([`experiments`], [`suites`]).
//!
//! The `htcov` binary exposes all experiments as CLI subcommands; see the
//! repository README.

pub mod coloring;
mod combi;
pub mod concentration;
pub mod dist;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod nets;
pub mod order_stats;
pub mod quadforms;
pub mod rng;
pub mod sparsify;
pub mod suites;

pub use error::{Error, Result};
