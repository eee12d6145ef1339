//! Computing OR, MAX, SEARCH and SORT when every query passes through a
//! binary symmetric channel.
//!
//! The crate contains the query oracle ([`oracle`]), closed-form bounds and
//! exact analyses ([`bounds`]), adaptive and non-adaptive algorithms
//! ([`adaptive`], [`nonadaptive`]), a seeded Monte Carlo engine
//! ([`harness`]) and the acceptance checks built on top of it ([`verify`]).
//!
//! ```
//! use noisy_compute::{adaptive, BitInstance, Delta, NoiseModel, OracleSession};
//!
//! let mut session = OracleSession::new(BitInstance::single_one(32, 5)?, NoiseModel::new(0.1)?, 42);
//! let result = adaptive::or_tournament_variable(&mut session, Delta::new(0.05)?)?;
//! assert_eq!(result.queries, session.queries_used());
//! # Ok::<(), noisy_compute::Error>(())
//! ```

pub mod adaptive;
pub mod bounds;
pub mod channel;
pub mod error;
pub mod harness;
pub mod instance;
pub mod nonadaptive;
pub mod oracle;
pub mod reference;
pub mod verify;

pub use channel::{Delta, NoiseModel};
pub use error::{Error, Result};
pub use instance::{
    BitInstance, Instance, InstanceDoc, InstanceKind, RankInstance, SearchInstance,
};
pub use oracle::{AlgorithmResult, OracleSession, Query};
