//! Fitness kernels `F_n`, the attractiveness integral `I_n`, the effective
//! radius `ρ_n`, and checkers for the regularity conditions.

use serde::{Deserialize, Serialize};

use crate::quadrature::{integrate, QuadratureError};
use crate::scalar::Real;
use crate::sphere::cap_area_unchecked;

/// Absolute tolerance for every kernel integral.
pub const QUAD_TOL: f64 = 1e-10;
/// Grid size used for the monotonicity and lower-bound checks.
pub const CHECK_GRID: usize = 10_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum KernelError {
    #[error("angle {0} outside [0, π]")]
    AngleOutOfRange(f64),
    #[error("invalid kernel parameter: {0}")]
    InvalidParameter(String),
    #[error("mu = {0} outside (0, 1]")]
    MuOutOfRange(f64),
    #[error("kernel is identically zero")]
    Zero,
    #[error("n = {0} must be at least 2")]
    SizeTooSmall(u64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Attraction between two vertices as a function of their angular distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum FitnessKernel<T> {
    /// `F ≡ 1`; geometry is ignored.
    Constant,
    /// `F(u) = 1{u ≤ r_n}`.
    RangeIndicator { r_n: T },
    /// `F(u) = max(n^{-ψ}, u)^{-β}`.
    PowerLaw { beta: T, psi: T, n: u64 },
    /// Piecewise-linear through `(angle, value)` knots, clamped outside.
    Tabulated { knots: Vec<(T, T)> },
}

impl<T: Real> FitnessKernel<T> {
    pub fn validate(&self) -> Result<(), KernelError> {
        let bad = |s: String| Err(KernelError::InvalidParameter(s));
        match self {
            FitnessKernel::Constant => Ok(()),
            FitnessKernel::RangeIndicator { r_n } => {
                if !(*r_n > T::zero() && *r_n <= T::PI()) {
                    return bad(format!("r_n = {r_n} must lie in (0, π]"));
                }
                Ok(())
            }
            FitnessKernel::PowerLaw { beta, psi, n } => {
                if !(*beta > T::zero()) || !beta.is_finite() {
                    return bad(format!("beta = {beta} must be > 0"));
                }
                if *beta == T::lit(2.0) {
                    return bad("beta must differ from 2 (β ∈ (0,2) ∪ (2,∞))".into());
                }
                if !(*psi < T::lit(0.5)) || !psi.is_finite() {
                    return bad(format!("psi = {psi} must be < 1/2"));
                }
                if *n < 1 {
                    return bad("n must be at least 1".into());
                }
                Ok(())
            }
            FitnessKernel::Tabulated { knots } => {
                if knots.is_empty() {
                    return bad("tabulated kernel needs at least one knot".into());
                }
                for w in knots.windows(2) {
                    if !(w[1].0 > w[0].0) {
                        return bad("knot angles must be strictly increasing".into());
                    }
                }
                for &(u, v) in knots {
                    if !(u >= T::zero() && u <= T::PI()) {
                        return bad(format!("knot angle {u} outside [0, π]"));
                    }
                    if !(v >= T::zero()) || !v.is_finite() {
                        return bad(format!("knot value {v} must be finite and ≥ 0"));
                    }
                }
                Ok(())
            }
        }
    }

    /// `F(u)` for `u ∈ [0, π]`.
    pub fn evaluate(&self, u: T) -> Result<T, KernelError> {
        if !(u >= T::zero() && u <= T::PI()) {
            return Err(KernelError::AngleOutOfRange(u.as_f64()));
        }
        Ok(self.at(u))
    }

    /// `F(u)` without the range check. Outside `[0, π]` the defining
    /// formula is extended (tabulated kernels clamp).
    #[inline]
    pub fn at(&self, u: T) -> T {
        match self {
            FitnessKernel::Constant => T::one(),
            FitnessKernel::RangeIndicator { r_n } => {
                if u.abs() <= *r_n {
                    T::one()
                } else {
                    T::zero()
                }
            }
            FitnessKernel::PowerLaw { beta, psi, n } => {
                let floor = T::from_u64(*n).unwrap().powf(-*psi);
                floor.max(u.abs()).powf(-*beta)
            }
            FitnessKernel::Tabulated { knots } => interpolate(knots, u),
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            FitnessKernel::Constant => true,
            FitnessKernel::Tabulated { knots } => knots.iter().all(|k| k.1 == knots[0].1),
            _ => false,
        }
    }

    /// Supremum of `F` over `[0, π]`.
    pub fn max_value(&self) -> T {
        match self {
            FitnessKernel::Tabulated { knots } => knots
                .iter()
                .map(|k| k.1)
                .fold(T::zero(), |a, b| a.max(b)),
            _ => self.at(T::zero()),
        }
    }

    /// Angle beyond which `F` vanishes, if smaller than π.
    pub fn support_radius(&self) -> Option<T> {
        match self {
            FitnessKernel::RangeIndicator { r_n } if *r_n < T::PI() => Some(*r_n),
            FitnessKernel::Tabulated { knots } => {
                let last_positive = knots.iter().rposition(|k| k.1 > T::zero())?;
                if last_positive + 1 < knots.len() {
                    let r = knots[last_positive + 1].0;
                    (r < T::PI()).then_some(r)
                } else {
                    None
                }
            }
            _ => None,
        }
    }

    /// Points where `F` is not smooth.
    pub fn breakpoints(&self) -> Vec<T> {
        match self {
            FitnessKernel::Constant => vec![],
            FitnessKernel::RangeIndicator { r_n } => vec![*r_n],
            FitnessKernel::PowerLaw { psi, n, .. } => {
                vec![T::from_u64(*n).unwrap().powf(-*psi)]
            }
            FitnessKernel::Tabulated { knots } => knots.iter().map(|k| k.0).collect(),
        }
    }

    /// `I_n = ½ ∫_0^π F(x) sin x dx`.
    pub fn attractiveness_integral(&self) -> Result<T, KernelError> {
        self.partial_integral(T::PI())
    }

    /// `½ ∫_0^rho F(x) sin x dx`.
    pub fn partial_integral(&self, rho: T) -> Result<T, KernelError> {
        if !(rho >= T::zero() && rho <= T::PI()) {
            return Err(KernelError::AngleOutOfRange(rho.as_f64()));
        }
                match self {
            FitnessKernel::Constant => Ok(cap_area_unchecked(rho)),
            FitnessKernel::RangeIndicator { r_n } => Ok(cap_area_unchecked(rho.min(*r_n))),
            _ => {
                let r = integrate(
                    |x| self.at(x) * x.sin(),
                    T::zero(),
                    rho,
                    &self.breakpoints(),
                    T::lit(QUAD_TOL),
                )?;
                Ok(T::lit(0.5) * r.value)
            }
        }
    }

    /// `J = ∫_0^π F(x)^2 sin x dx` (no ½ factor).
    pub fn squared_integral(&self) -> Result<T, KernelError> {
        match self {
            FitnessKernel::Constant => Ok(T::lit(2.0)),
            FitnessKernel::RangeIndicator { r_n } => Ok(T::lit(2.0) * cap_area_unchecked(*r_n)),
            _ => Ok(integrate(
                |x| {
                    let f = self.at(x);
                    f * f * x.sin()
                },
                T::zero(),
                T::PI(),
                &self.breakpoints(),
                T::lit(QUAD_TOL),
            )?
            .value),
        }
    }

    /// Smallest `ρ` with `partial_integral(ρ) = μ I_n`, by bisection.
    pub fn solve_rho(&self, mu: T) -> Result<T, KernelError> {
        if !(mu > T::zero() && mu <= T::one()) {
            return Err(KernelError::MuOutOfRange(mu.as_f64()));
        }
        let total = self.attractiveness_integral()?;
        if total <= T::zero() {
            return Err(KernelError::Zero);
        }
        let target = mu * total;
        if matches!(
            self,
            FitnessKernel::Constant | FitnessKernel::RangeIndicator { .. }
        ) {
            // partial_integral(ρ) = sin²(ρ/2) on the support
            return Ok(T::lit(2.0) * target.sqrt().min(T::one()).asin());
        }
        let (mut lo, mut hi) = (T::zero(), T::PI());
        for _ in 0..200 {
            let mid = (lo + hi) / T::lit(2.0);
            if mid <= lo || mid >= hi {
                break;
            }
            let v = self.partial_integral(mid)?;
            if v >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(hi)
    }

    /// Measures the exponent θ in `J = O(n^θ I_n²)`.
    pub fn check_condition_f(&self, n: u64) -> Result<ConditionF<T>, KernelError> {
        if n < 2 {
            return Err(KernelError::SizeTooSmall(n));
        }
        let i_n = self.attractiveness_integral()?;
        if i_n <= T::zero() {
            return Err(KernelError::Zero);
        }
        let j = self.squared_integral()?;
        let ratio = j / (i_n * i_n);
        let theta = ratio.ln() / T::from_u64(n).unwrap().ln();
        Ok(ConditionF {
            j,
            ratio,
            theta_estimate: theta,
            pass: theta < T::one(),
        })
    }

    /// Conditions S1–S3 for a given `μ`, with thresholds `l` (for S2) and
    /// `c3_min` (for S3).
    pub fn check_smooth(
        &self,
        n: u64,
        mu: T,
        l: T,
        c3_min: T,
    ) -> Result<SmoothReport<T>, KernelError> {
        if n < 2 {
            return Err(KernelError::SizeTooSmall(n));
        }
        let s1 = self.is_non_increasing_on_grid();
        let rho_n = self.solve_rho(mu)?;
        let i_n = self.attractiveness_integral()?;
        let nf = T::from_u64(n).unwrap();
        let s2_lhs = nf * rho_n * rho_n;
        let s2_rhs = l * nf.ln();
        let c3 = rho_n * rho_n * self.at(T::lit(2.0) * rho_n) / i_n;
        Ok(SmoothReport {
            mu,
            rho_n,
            s1,
            s2: s2_lhs >= s2_rhs,
            s2_lhs,
            s2_rhs,
            s3: c3 > T::zero() && c3 >= c3_min,
            c3,
        })
    }

    /// Conditions T1–T2.
    pub fn check_tame(&self) -> Result<TameReport<T>, KernelError> {
        let c1 = grid(CHECK_GRID)
            .map(|u| self.at(u))
            .fold(T::infinity(), |a, b| a.min(b));
        let c2 = self.attractiveness_integral()?;
        Ok(TameReport {
            c1,
            c2,
            tame: c1 > T::zero() && c2.is_finite(),
        })
    }

    /// Full regularity report.
    pub fn report(&self, n: u64, mu: T, l: T, c3_min: T) -> Result<KernelReport<T>, KernelError> {
        let i_n = self.attractiveness_integral()?;
        let condition_f = self.check_condition_f(n)?;
        let smooth = self.check_smooth(n, mu, l, c3_min)?;
        let tame = self.check_tame()?;
        Ok(KernelReport {
            i_n,
            rho_n: smooth.rho_n,
            smooth,
            tame,
            condition_f,
        })
    }

    fn is_non_increasing_on_grid(&self) -> bool {
        let slack = T::epsilon() * T::lit(8.0);
        let mut prev = self.at(T::zero());
        for u in grid(CHECK_GRID).skip(1) {
            let v = self.at(u);
            if v > prev + slack * prev.abs().max(T::one()) {
                return false;
            }
            prev = v;
        }
        true
    }
}

fn grid<T: Real>(points: usize) -> impl Iterator<Item = T> {
    let step = T::PI() / T::from_usize(points - 1).unwrap();
    (0..points).map(move |i| {
        if i + 1 == points {
            T::PI()
        } else {
            step * T::from_usize(i).unwrap()
        }
    })
}

fn interpolate<T: Real>(knots: &[(T, T)], u: T) -> T {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if u <= first.0 {
        return first.1;
    }
    if u >= last.0 {
        return last.1;
    }
    let i = knots.partition_point(|k| k.0 <= u);
    let (u0, v0) = knots[i - 1];
    let (u1, v1) = knots[i];
    v0 + (v1 - v0) * (u - u0) / (u1 - u0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionF<T> {
    pub j: T,
    pub ratio: T,
    pub theta_estimate: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothReport<T> {
    pub mu: T,
    pub rho_n: T,
    pub s1: bool,
    pub s2: bool,
    pub s2_lhs: T,
    pub s2_rhs: T,
    pub s3: bool,
    pub c3: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TameReport<T> {
    pub c1: T,
    pub c2: T,
    pub tame: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelReport<T> {
    pub i_n: T,
    pub rho_n: T,
    pub smooth: SmoothReport<T>,
    pub tame: TameReport<T>,
    pub condition_f: ConditionF<T>,
}
