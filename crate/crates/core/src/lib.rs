//! Simulator and verification toolkit for geometric preferential attachment
//! with fitness on the sphere.
//!
//! Every numeric type is generic over [`Real`]; the aliases at the crate
//! root fix the scalar to `f64`, which is what the CLI and the acceptance
//! suite use.

pub mod coupling;
pub mod graphstats;
pub mod io;
pub mod kernel;
pub mod process;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod sphere;
pub mod theory;

pub use scalar::Real;

pub type SpherePoint = sphere::SpherePoint<f64>;
pub type FitnessKernel = kernel::FitnessKernel<f64>;
pub type KernelReport = kernel::KernelReport<f64>;
pub type ProcessParams = process::ProcessParams<f64>;
pub type Model = process::Model<f64>;
pub type GraphState = process::GraphState<f64>;
pub type Process = process::Process<f64>;
pub type RunOutput = process::RunOutput<f64>;
pub type Snapshot = process::Snapshot<f64>;
pub type StepRecord = process::StepRecord<f64>;
pub type LimitLaw = theory::LimitLaw<f64>;
pub type TheoryPrediction = theory::TheoryPrediction<f64>;
pub type Ball = coupling::Ball<f64>;
pub type UrnPair = coupling::UrnPair<f64>;
pub type CoupledRun = coupling::CoupledRun<f64>;
