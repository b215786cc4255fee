//! Changes of variables between the awareness rate `κ`, the die-out diagonal
//! `y` and the homogenizing pair `(u, w)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sais::SaisParams;

/// The rates of one node that the transforms depend on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRates {
    pub beta: f64,
    pub delta: f64,
    pub r: f64,
}

impl NodeRates {
    pub fn of(params: &SaisParams, i: usize) -> Self {
        Self {
            beta: params.beta[i],
            delta: params.delta[i],
            r: params.r[i],
        }
    }

    /// `y(κ) = (r δ + κ δ / β) / (r β + r κ)`; strictly increasing from
    /// `δ / β` at `κ = 0` toward `δ / (r β)`.
    pub fn y_from_kappa(&self, kappa: f64) -> f64 {
        let Self { beta, delta, r } = *self;
        (delta / beta) * ((r * beta + kappa) / (r * (beta + kappa)))
    }

    /// Attainable `y` for `κ ≥ 0`: `[δ / β, δ / (r β))`.
    pub fn y_range(&self) -> (f64, f64) {
        (self.delta / self.beta, self.delta / (self.r * self.beta))
    }

    /// Inverse of [`y_from_kappa`](Self::y_from_kappa):
    /// `κ = (y r β - r δ) / (δ / β - y r)`.
    pub fn kappa_from_y(&self, y: f64) -> Result<f64> {
        let Self { beta, delta, r } = *self;
        let (lower, upper) = self.y_range();
        let denominator = delta / beta - y * r;
        if !(y >= lower && y < upper && denominator > 0.0) {
            return Err(Error::InfeasibleTarget { y, lower, upper });
        }
        // r β (y - δ / β) is exactly zero at the lower end
        Ok((r * beta * (y - lower) / denominator).max(0.0))
    }

    /// `(u, w) = (κ, 1) / (r β + r κ)`.
    pub fn charnes_cooper(&self, kappa: f64) -> Result<(f64, f64)> {
        let denominator = self.r * self.beta + self.r * kappa;
        if !(denominator > 0.0) {
            return Err(Error::SingularTransform { w: f64::INFINITY });
        }
        let w = 1.0 / denominator;
        Ok((kappa * w, w))
    }

    /// `r β w + r u`, identically one on the image of the transform.
    pub fn normalization(&self, u: f64, w: f64) -> f64 {
        self.r * self.beta * w + self.r * u
    }

    /// Inverse of [`charnes_cooper`](Self::charnes_cooper) on the reduced
    /// form, where `w` is eliminated by the normalization row.
    pub fn w_from_u(&self, u: f64) -> f64 {
        (1.0 - self.r * u) / (self.r * self.beta)
    }

    /// Die-out diagonal as an affine function of `u` once `w` is eliminated:
    /// `(δ / β)(1 + (1 - r) u)`.
    pub fn y_from_u(&self, u: f64) -> f64 {
        (self.delta / self.beta) * (1.0 + (1.0 - self.r) * u)
    }

    pub fn u_from_kappa(&self, kappa: f64) -> f64 {
        kappa / (self.r * (self.beta + kappa))
    }
}

/// `κ = u / w`.
pub fn recover_kappa(u: f64, w: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::SingularTransform { w });
    }
    Ok(u / w)
}
