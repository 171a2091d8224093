//! Bilateral and funded valuation adjustments by Monte Carlo.
//!
//! Collateralizing a trade and funding each side's collateral with a margin loan from the
//! counterparty moves the counterparty risk into the loans. The expected loss on those loans
//! has the same form as the uncollateralized BCVA/BDVA but is driven by asset-swap rather than
//! CDS default probabilities. This crate prices both sets of adjustments on shared paths,
//! solves the fair loan spreads, and replays every loan's cashflows path by path to check that
//! their present value equals minus the realized funded loss.
//!
//! Modelling assumptions: perfect collateralization (zero threshold and minimum transfer,
//! no gap risk), risk-free close-out, deterministic discounting, Gaussian-copula default
//! times independent of the exposure, defaults observed on the margining grid.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exposure;
pub mod ledger;
pub mod market;
pub mod oracle;
mod rng;
pub mod scenario;
pub mod stats;
pub mod xva;

pub use error::{Error, Result};
