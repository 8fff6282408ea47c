use serde::{Deserialize, Serialize};

use super::ProcessError;
use crate::kernel::FitnessKernel;
use crate::scalar::Real;

/// Model parameters of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessParams<T> {
    /// Final number of vertices.
    pub n: usize,
    /// Edges emanating from every new vertex.
    pub m: usize,
    /// Self-loop bias.
    pub alpha: T,
    /// Initial attractiveness, `δ > -m`.
    pub delta: T,
    pub kernel: FitnessKernel<T>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamWarning {
    /// The degree-sequence guarantee needs `α > 2`.
    AlphaAtMostTwo,
}

impl std::fmt::Display for ParamWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParamWarning::AlphaAtMostTwo => {
                write!(f, "alpha <= 2: the power-law degree result assumes alpha > 2")
            }
        }
    }
}

impl<T: Real> ProcessParams<T> {
    pub fn new(n: usize, m: usize, alpha: T, delta: T, kernel: FitnessKernel<T>, seed: u64) -> Self {
        Self {
            n,
            m,
            alpha,
            delta,
            kernel,
            seed,
        }
    }

    /// `Θ = (2m + δ) / 2`.
    pub fn theta(&self) -> T {
        (T::from_usize(2 * self.m).unwrap() + self.delta) / T::lit(2.0)
    }

    /// Degree-growth exponent `a = m / (αΘ)`.
    pub fn growth_exponent(&self) -> T {
        T::from_usize(self.m).unwrap() / (self.alpha * self.theta())
    }

    pub fn validate(&self) -> Result<Vec<ParamWarning>, ProcessError> {
        if self.n < 1 {
            return Err(ProcessError::InvalidParams("n must be at least 1".into()));
        }
        if self.m < 1 {
            return Err(ProcessError::InvalidParams("m must be at least 1".into()));
        }
        if !(self.alpha > T::zero()) || !self.alpha.is_finite() {
            return Err(ProcessError::InvalidParams(format!(
                "alpha = {} violates alpha > 0",
                self.alpha
            )));
        }
        let m = T::from_usize(self.m).unwrap();
        if !(self.delta > -m) || !self.delta.is_finite() {
            return Err(ProcessError::InvalidParams(format!(
                "delta = {} violates δ > -m (m = {})",
                self.delta, self.m
            )));
        }
        self.kernel.validate()?;
        let mut warnings = Vec::new();
        if self.alpha <= T::lit(2.0) {
            warnings.push(ParamWarning::AlphaAtMostTwo);
        }
        Ok(warnings)
    }
}

/// Parameters together with the kernel-derived constants every step needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<T> {
    pub params: ProcessParams<T>,
    /// `I_n`.
    pub i_n: T,
    /// `Θ`.
    pub theta: T,
    /// `sup F`.
    pub f_max: T,
    pub warnings: Vec<ParamWarning>,
}

impl<T: Real> Model<T> {
    pub fn new(params: ProcessParams<T>) -> Result<Self, ProcessError> {
        let warnings = params.validate()?;
        let i_n = params.kernel.attractiveness_integral()?;
        if !(i_n > T::zero()) {
            return Err(crate::kernel::KernelError::Zero.into());
        }
        Ok(Self {
            theta: params.theta(),
            f_max: params.kernel.max_value(),
            i_n,
            params,
            warnings,
        })
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.params.m
    }

    #[inline]
    pub fn delta(&self) -> T {
        self.params.delta
    }

    #[inline]
    pub fn kernel(&self) -> &FitnessKernel<T> {
        &self.params.kernel
    }

    /// `αΘ I_n σ`, the lower branch of the normalizer.
    #[inline]
    pub fn floor_mass(&self, sigma: usize) -> T {
        self.params.alpha * self.theta * self.i_n * T::from_usize(sigma).unwrap()
    }

    /// Expected acceptance rate of the rejection sampler, `I_n / F_max`.
    pub fn expected_acceptance(&self) -> T {
        self.i_n / self.f_max
    }
}
