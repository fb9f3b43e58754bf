//! Complete positivity and CHSH nonlocality of qubit channels through their
//! Choi states.

pub mod channel;
pub mod circulant;
pub mod cli;
pub mod error;
pub mod families;
pub mod grid;
pub mod nonlocality;
pub mod numerics;
pub mod parallel;
pub mod sweep;

pub use channel::{BlochState, ChoiMatrix, QubitChannel, XState};
pub use error::{Error, Result};
pub use nonlocality::{classify, Classification};
pub use parallel::Execution;
pub use sweep::{region_summary, run_sweep, RegionSummary, SweepMode, SweepRequest, SweepRow};
