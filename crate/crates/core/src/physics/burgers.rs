//! Burgers' equation with the square entropy.
//!
//! `f(u) = u^2/2`, `U = u^2/2`, `v = u`, `F = u^3/3`, `psi = u^3/6`. The
//! two-point flux `(u_L^2 + u_L u_R + u_R^2)/6` recovers the split form of
//! the equation under flux differencing.

use super::PhysicsModel;
use crate::error::Result;
use crate::util::SplitMix;

#[derive(Debug, Clone, Copy, Default)]
pub struct Burgers;

/// The split-form two-point flux. Terms are grouped so the result is
/// bit-identical under argument swapping.
#[inline]
pub fn burgers_flux(ul: f64, ur: f64) -> f64 {
    ((ul * ul + ur * ur) + ul * ur) / 6.0
}

impl PhysicsModel for Burgers {
    const NF: usize = 1;
    const DIM: usize = 1;

    fn name(&self) -> &'static str {
        "burgers"
    }

    fn flux(&self, u: &[f64], _dir: usize, out: &mut [f64]) {
        out[0] = 0.5 * u[0] * u[0];
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        0.5 * u[0] * u[0]
    }

    fn entropy_flux(&self, u: &[f64], _dir: usize) -> f64 {
        u[0] * u[0] * u[0] / 3.0
    }

    fn entropy_vars(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }

    fn conservative_from_entropy(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = v[0];
        Ok(())
    }

    fn entropy_potential(&self, u: &[f64], _dir: usize) -> f64 {
        u[0] * u[0] * u[0] / 6.0
    }

    fn ec_flux(&self, ul: &[f64], ur: &[f64], fs: &mut [f64]) {
        fs[0] = burgers_flux(ul[0], ur[0]);
    }

    fn max_wavespeed_normal(&self, ul: &[f64], ur: &[f64], _n: &[f64]) -> f64 {
        ul[0].abs().max(ur[0].abs())
    }

    fn is_admissible(&self, u: &[f64]) -> bool {
        u[0].is_finite()
    }

    fn sample_admissible(&self, rng: &mut SplitMix, out: &mut [f64]) {
        out[0] = rng.next_in(-3.0, 3.0);
    }
}
