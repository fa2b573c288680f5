//! Exact, participant-side analysis of differentially private mechanisms.
//!
//! A mechanism is a finite conditional probability table (or the analytic
//! threshold-Laplace family). On top of it the crate answers the questions a
//! prospective participant cares about:
//!
//! - how private is it? ([`audit`]: tightest pure ε, tight δ at any ε)
//! - how much can my answer move my expected utility? ([`bounds`])
//! - am I better off opting out, and what would it take to change that?
//!   ([`participation`])
//!
//! Arithmetic is exact throughout. Probabilities are rationals, Laplace
//! probabilities are finite sums `Σ cᵢ·e^{xᵢ}` ([`Real`]) and utilities may be
//! unlimited or infinitesimal ([`Hyperreal`]).
//!
//! ```
//! use dp_participation::{audit, Epsilon};
//! use dp_participation::mechanism::example1_mechanism;
//!
//! let m = example1_mechanism(&"ln(2)".parse::<Epsilon>().unwrap()).unwrap();
//! let a = audit::tightest_epsilon(&m);
//! assert_eq!(a.epsilon.to_string(), "ln(2)");
//! ```

pub mod audit;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod hyperreal;
pub mod io;
pub mod mechanism;
pub mod params;
pub mod participation;
pub mod rational;
pub mod real;
pub mod scenarios;
pub mod utility;

pub use error::{Error, Result};
pub use hyperreal::{Class, Hyperreal};
pub use mechanism::{ConsequenceMechanism, InputSpace, PostProcessed, PostProcessor, TableMechanism, OPT_OUT};
pub use params::Epsilon;
pub use rational::Rational;
pub use real::Real;
pub use utility::{PreferenceOrdering, UtilityFunction};
