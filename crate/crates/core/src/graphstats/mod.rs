//! Measurements on generated graphs.

mod compare;
mod fit;
mod graph;
mod histogram;

pub use compare::{compare_empirical_theory, exceedance_fraction, CompareError, Comparison, ComparisonRow};
pub use fit::{fit_weighted, linear_fit, tail_exponent_fit, FitError, LinearFit, TailFit, GOF_LEVEL, MIN_TAIL};
pub use graph::{
    components_of, connected_components, diameter, Components, DiameterError, DiameterMethod,
    DiameterReport, UndirectedGraph, EXACT_DIAMETER_LIMIT,
};
pub use histogram::{DegreeHistogram, HistogramError};
