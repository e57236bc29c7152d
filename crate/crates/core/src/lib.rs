//! Fast channel estimation for IRS-assisted OFDM.
//!
//! Two training schemes are implemented end to end:
//!
//! - **Scheme 1** shortens the OFDM training symbols to `N0 >= L` subcarriers
//!   and switches the IRS reflections once per short symbol
//!   ([`scheme1`]). Works for arbitrary frequency-selective links.
//! - **Scheme 2** keeps a single full-length OFDM symbol and switches the IRS
//!   reflections every sample ([`scheme2`]). Exact when the IRS to user link
//!   has a single tap.
//!
//! [`training`] builds the jointly optimal pilot/reflection designs (and the
//! random-phase benchmarks), [`channel`] draws multipath realizations, and
//! [`experiment`] runs seeded Monte-Carlo sweeps of the normalized MSE.

pub mod channel;
pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod experiment;
pub mod numerics;
pub mod scenario;
pub mod scheme1;
pub mod scheme2;
pub mod training;

pub use config::SystemConfig;
pub use error::{Error, Result};
pub use exec::Execution;
pub use numerics::ComplexMatrix;
