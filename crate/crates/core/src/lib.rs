//! Pricing simulation for a monopoly operator selling data to socially
//! connected users.
//!
//! Users gain from their own consumption, from the consumption of their
//! social ties (network effect), and lose from aggregate load (congestion
//! effect). On top of that demand system the crate implements three pricing
//! schemes — one-shot static, multi-period sequential, and finite-horizon
//! simultaneous — together with a seeded Monte-Carlo harness that compares
//! them across parameter sweeps.
//!
//! Entry points: [`market_model::build_matrices`] assembles the operators,
//! [`static_pricing::solve_static`], [`sequential_pricing::run_sequential`]
//! and [`simultaneous_pricing::solve_simultaneous`] solve the schemes, and
//! [`experiments::Experiment`] drives seeded comparison runs. The `socialmarket`
//! binary exposes all of it on the command line.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod market_model;
pub mod numerics;
pub mod rng;
pub mod sequential_pricing;
pub mod simultaneous_pricing;
pub mod social_graph;
pub mod static_pricing;

pub use error::{Error, Result};
