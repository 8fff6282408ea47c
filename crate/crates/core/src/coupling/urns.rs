use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::CouplingError;
use crate::process::{total_attraction, GraphState, Model};
use crate::scalar::{unit, Real};
use crate::sphere::{angular_distance, SpherePoint};

/// Relative gap below which `T` and `T̂` are treated as equal when sizing
/// the green and blue balls.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BallColor {
    /// One per edge whose head is not the perturbed vertex.
    White,
    /// One per vertex other than the perturbed one.
    Red,
    /// The perturbed vertex in `U`.
    Purple,
    /// The perturbed vertex in `Û`.
    Orange,
    /// Self-loop mass shared by both urns.
    Green,
    /// Extra self-loop mass of `U`.
    Blue,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball<T> {
    pub color: BallColor,
    /// Vertex the ball points to (0-based; the new vertex for green/blue).
    pub number: usize,
    pub weight: T,
}

/// The two urns of one coupled step, labelled so that `‖U‖ ≤ ‖Û‖`, with the
/// partition into common balls `C`, balls only in `U` (`R`) and balls only in
/// `Û` (`L`). Balls are compared by colour and number with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct UrnPair<T> {
    pub u: Vec<Ball<T>>,
    pub u_hat: Vec<Ball<T>>,
    /// `partner[i]`: index in `u_hat` of the common copy of `u[i]`, if any.
    pub partner: Vec<Option<usize>>,
    /// `R` as indices into `u`.
    pub only_u: Vec<usize>,
    /// `L` as indices into `u_hat`.
    pub only_hat: Vec<usize>,
    /// True when `U` was built from the second state.
    pub swapped: bool,
    /// `T` for `U` and `Û`.
    pub total: T,
    pub total_hat: T,
}

fn weight_sum<T: Real>(balls: &[Ball<T>], idx: impl Iterator<Item = usize>) -> T {
    idx.map(|i| balls[i].weight).sum()
}

impl<T: Real> UrnPair<T> {
    pub fn norm_u(&self) -> T {
        weight_sum(&self.u, 0..self.u.len())
    }

    pub fn norm_hat(&self) -> T {
        weight_sum(&self.u_hat, 0..self.u_hat.len())
    }

    pub fn norm_c(&self) -> T {
        weight_sum(&self.u, (0..self.u.len()).filter(|&i| self.partner[i].is_some()))
    }

    pub fn norm_r(&self) -> T {
        weight_sum(&self.u, self.only_u.iter().copied())
    }

    pub fn norm_l(&self) -> T {
        weight_sum(&self.u_hat, self.only_hat.iter().copied())
    }

    /// `P(b ≠ b̂) = ‖L‖ / ‖Û‖`.
    pub fn mismatch_probability(&self) -> T {
        self.norm_l() / self.norm_hat()
    }

    /// Probability that a common ball is kept, `‖U‖/‖Û‖` (1 when `L` is empty).
    pub fn keep_probability(&self) -> T {
        if self.only_hat.is_empty() {
            T::one()
        } else {
            (self.norm_u() / self.norm_hat()).min(T::one())
        }
    }

    /// Checks the colour restrictions on `C`, `R`, `L` and the weight
    /// identities `‖C‖+‖R‖ = ‖U‖`, `‖C‖+‖L‖ = ‖Û‖` to relative `tol`.
    pub fn check(&self, tol: T) -> Result<(), CouplingError> {
        use BallColor::*;
        let bad = |what: &str| Err(CouplingError::UrnInvariant(what.to_string()));
        if self.only_u.iter().any(|&i| !matches!(self.u[i].color, White | Purple | Blue)) {
            return bad("R holds a ball that is not white, purple or blue");
        }
        if self.only_hat.iter().any(|&i| !matches!(self.u_hat[i].color, White | Orange)) {
            return bad("L holds a ball that is not white or orange");
        }
        let identical = self.only_u.is_empty() && self.only_hat.is_empty();
        for (i, p) in self.partner.iter().enumerate() {
            if p.is_some() && !identical && !matches!(self.u[i].color, White | Red | Green) {
                return bad("C holds a ball that is not white, red or green");
            }
        }
        let (u, h, c) = (self.norm_u(), self.norm_hat(), self.norm_c());
        let scale = tol * h.max(T::one());
        if (c + self.norm_r() - u).abs() > scale || (c + self.norm_l() - h).abs() > scale {
            return bad("weight identities fail");
        }
        Ok(())
    }

    fn draw_from_l<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.norm_l();
        assert!(total > T::zero(), "redistribution from an empty L");
        let r = unit::<T, _>(rng) * total;
        let mut acc = T::zero();
        for &j in &self.only_hat {
            acc += self.u_hat[j].weight;
            if r < acc {
                return j;
            }
        }
        *self.only_hat.last().unwrap()
    }
}

/// Result of [`joint_draw`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JointDraw {
    /// Index into `u`.
    pub ball: usize,
    /// Index into `u_hat`.
    pub ball_hat: usize,
    /// False on a mismatch.
    pub matched: bool,
}

/// Draws a ball from `U` by weight, then its partner: the common copy with
/// probability `‖U‖/‖Û‖` when the ball is in `C`, otherwise a ball of `L`
/// by weight.
pub fn joint_draw<T: Real, R: Rng + ?Sized>(pair: &UrnPair<T>, rng: &mut R) -> JointDraw {
    let r = unit::<T, _>(rng) * pair.norm_u();
    let mut acc = T::zero();
    let mut ball = pair.u.len() - 1;
    for (i, b) in pair.u.iter().enumerate() {
        acc += b.weight;
        if r < acc {
            ball = i;
            break;
        }
    }
    if let Some(j) = pair.partner[ball] {
        if unit::<T, _>(rng) < pair.keep_probability() {
            return JointDraw {
                ball,
                ball_hat: j,
                matched: true,
            };
        }
    }
    JointDraw {
        ball,
        ball_hat: pair.draw_from_l(rng),
        matched: false,
    }
}

/// Exact joint law of [`joint_draw`] as `(ball, ball_hat, probability)`
/// entries with positive mass.
pub fn joint_law<T: Real>(pair: &UrnPair<T>) -> Vec<(usize, usize, T)> {
    let nu = pair.norm_u();
    let nl = pair.norm_l();
    let keep = pair.keep_probability();
    let mut out = Vec::new();
    for (i, b) in pair.u.iter().enumerate() {
        let p = b.weight / nu;
        if p <= T::zero() {
            continue;
        }
        let redistributed = match pair.partner[i] {
            Some(j) => {
                out.push((i, j, p * keep));
                p * (T::one() - keep)
            }
            None => p,
        };
        if redistributed > T::zero() {
            for &j in &pair.only_hat {
                out.push((i, j, redistributed * pair.u_hat[j].weight / nl));
            }
        }
    }
    out
}

/// Builds the urns for a pair of states that share history before vertex
/// `perturbed` and every position except that vertex's, for the next vertex
/// at `x`.
pub fn build_urns<T: Real>(
    state: &GraphState<T>,
    state_hat: &GraphState<T>,
    x: &SpherePoint<T>,
    perturbed: usize,
    model: &Model<T>,
) -> Result<UrnPair<T>, CouplingError> {
    let sigma = state.sigma();
    let m = model.m();
    if state_hat.sigma() != sigma || state.m() != m || state_hat.m() != m {
        return Err(CouplingError::InconsistentHistory("sizes differ".into()));
    }
    if perturbed >= sigma {
        return Err(CouplingError::InconsistentHistory(format!(
            "perturbed vertex {perturbed} not in a graph of {sigma} vertices"
        )));
    }
    if (0..sigma).any(|v| v != perturbed && state.position(v) != state_hat.position(v)) {
        return Err(CouplingError::InconsistentHistory("positions differ away from the perturbed vertex".into()));
    }
    if state.heads()[..perturbed * m] != state_hat.heads()[..perturbed * m] {
        return Err(CouplingError::InconsistentHistory("edges before the perturbation differ".into()));
    }
    let identical = state == state_hat;

    let kernel = model.kernel();
    let delta = model.delta();
    let t0 = total_attraction(state, x, kernel, delta);
    let t1 = total_attraction(state_hat, x, kernel, delta);
    let swapped = t0 > t1;
    let (lo, hi, t_lo, t_hi) = if swapped {
        (state_hat, state, t1, t0)
    } else {
        (state, state_hat, t0, t1)
    };
    let k = model.floor_mass(sigma);
    let scale = t_hi.max(k).max(T::one());
    let t_hi_eff = if t_hi - t_lo <= T::lit(TIE_TOLERANCE) * scale { t_lo } else { t_hi };
    let green = (k - t_hi_eff).max(T::zero());
    let blue = ((k - t_lo).max(T::zero()) - green).max(T::zero());

    let a = |g: &GraphState<T>, v: usize| kernel.at(angular_distance(g.position(v), x));
    let mdelta = T::from_usize(m).unwrap() + delta;
    let urn = |g: &GraphState<T>, tau_color: BallColor| {
        let mut balls = Vec::new();
        let mut heads: Vec<usize> = g.heads().iter().copied().filter(|&h| h != perturbed).collect();
        heads.sort_unstable();
        for h in heads {
            balls.push(Ball {
                color: BallColor::White,
                number: h,
                weight: a(g, h),
            });
        }
        for v in (0..sigma).filter(|&v| v != perturbed) {
            balls.push(Ball {
                color: BallColor::Red,
                number: v,
                weight: mdelta * a(g, v),
            });
        }
        balls.push(Ball {
            color: tau_color,
            number: perturbed,
            weight: (T::from_count(g.degree(perturbed)) + delta) * a(g, perturbed),
        });
        balls.push(Ball {
            color: BallColor::Green,
            number: sigma,
            weight: green,
        });
        balls
    };
    let mut u = urn(lo, BallColor::Purple);
    let u_hat = urn(hi, BallColor::Orange);
    u.push(Ball {
        color: BallColor::Blue,
        number: sigma,
        weight: blue,
    });

    let mut groups: BTreeMap<(BallColor, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    let key = |b: &Ball<T>| {
        // with no perturbation the two τ balls coincide
        let color = if identical && b.color == BallColor::Orange {
            BallColor::Purple
        } else {
            b.color
        };
        (color, b.number)
    };
    for (i, b) in u.iter().enumerate() {
        groups.entry(key(b)).or_default().0.push(i);
    }
    for (j, b) in u_hat.iter().enumerate() {
        groups.entry(key(b)).or_default().1.push(j);
    }
    let mut partner = vec![None; u.len()];
    let mut only_u = Vec::new();
    let mut only_hat = Vec::new();
    for (is, js) in groups.values() {
        let common = is.len().min(js.len());
        for (&i, &j) in is.iter().zip(js) {
            partner[i] = Some(j);
        }
        only_u.extend_from_slice(&is[common..]);
        only_hat.extend_from_slice(&js[common..]);
    }
    // zero-weight balls never get drawn; drop them from R and L
    only_u.retain(|&i| u[i].weight > T::zero());
    only_hat.retain(|&j| u_hat[j].weight > T::zero());
    let pair = UrnPair {
        u,
        u_hat,
        partner,
        only_u,
        only_hat,
        swapped,
        total: t_lo,
        total_hat: t_hi,
    };
    pair.check(T::lit(1e-9))?;
    Ok(pair)
}
