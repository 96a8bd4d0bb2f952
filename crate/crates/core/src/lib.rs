//! Simulation and exact analysis of the self-organizing network coloring game.
//!
//! * [`graph`]: conflict networks, colorings, Erdős–Rényi generation.
//! * [`game`]: the greedy/selfish round engine and play to convergence.
//! * [`amc`]: exact absorbing-chain oracle (fundamental matrix, absorption
//!   time moments) over all color configurations of a small graph.
//! * [`convergence`]: seeded sweeps and scaling/tail statistics of the
//!   conflict-resolution time.
//! * [`borda`]: Borda welfare, network reduction and the local-optimum driver.
//! * [`samplers`]: Metropolis–Hastings over improving proper colorings and
//!   simulated annealing over welfare.
//!
//! The exact solver is generic over [`Scalar`]; the aliases below fix the
//! common instantiations.

pub mod amc;
pub mod borda;
pub mod convergence;
pub mod error;
pub mod game;
pub mod graph;
pub mod linalg;
pub mod rng;
pub mod samplers;
pub mod scalar;
pub mod stats;

pub use error::{Error, Result, RoundStats};
pub use borda::{AvailableColorLists, PreferenceProfile};
pub use graph::{Coloring, Graph};
pub use scalar::Scalar;

/// Exact rational field for the chain solver.
pub type Rational = num_rational::BigRational;

pub type Chain<T = f64> = amc::CanonicalChain<T>;
pub type ExactChain = amc::CanonicalChain<Rational>;
pub type Chain32 = amc::CanonicalChain<f32>;

pub type DenseMatrix<T = f64> = linalg::Matrix<T>;
pub type ExactMatrix = linalg::Matrix<Rational>;

pub type Absorption<T = f64> = amc::AbsorptionSummary<T>;
pub type ExactAbsorption = amc::AbsorptionSummary<Rational>;

pub type Schedule = samplers::TemperatureSchedule<f64>;
pub type Schedule32 = samplers::TemperatureSchedule<f32>;
pub type Trace = samplers::SaTrace<f64>;
pub type Trace32 = samplers::SaTrace<f32>;
