//! Conservation-law models behind one contract: fluxes, entropy maps,
//! entropy-conservative two-point fluxes, wavespeed estimates, and the
//! logarithmic mean.
//!
//! The models provided are Burgers' equation and the compressible Euler
//! equations in one and two dimensions. Entropy-conservative fluxes satisfy
//! the Tadmor condition `(v_L - v_R)^T f_S = psi_L - psi_R`, which
//! [`tadmor_check`] measures directly.

pub mod burgers;
pub mod euler;

pub use burgers::Burgers;
pub use euler::{Euler1D, Euler2D};

use crate::error::{Error, Result};
pub use crate::util::SplitMix;

/// Default switch tolerance for the logarithmic mean.
pub const DEFAULT_LOG_EPS: f64 = 1e-4;

/// Logarithmic mean `(a - b) / (ln a - ln b)` of two positive reals.
///
/// Near equal arguments the direct quotient is replaced by the Ismail-Roe
/// even series in `f = (zeta - 1)/(zeta + 1)`, `zeta = a/b`; the switch
/// fires when `f^2 < eps`, so `eps` directly controls the worst-case
/// truncation error of the series (about `eps^4 / 9` relative). The direct
/// branch evaluates the denominator through `ln_1p` of the relative
/// difference, so it stays accurate arbitrarily close to the switch.
pub fn log_mean(a: f64, b: f64, eps: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidState(format!(
            "log_mean requires positive arguments, got ({a}, {b})"
        )));
    }
    Ok(log_mean_raw(a, b, eps))
}

/// Unchecked logarithmic mean; callers guarantee `a, b > 0`. Arguments are
/// sorted first so the result is bit-identical under swapping, which lets
/// interface fluxes evaluated from both sides of a face cancel exactly.
#[inline]
pub(crate) fn log_mean_raw(a: f64, b: f64, eps: f64) -> f64 {
    if a == b {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    let f = (hi - lo) / (hi + lo);
    let u = f * f;
    if u < eps {
        let series = 1.0 + u * (1.0 / 3.0 + u * (1.0 / 5.0 + u * (1.0 / 7.0)));
        (hi + lo) / (2.0 * series)
    } else {
        let d = hi - lo;
        d / (d / lo).ln_1p()
    }
}

/// Flux coupling used at element interfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxMode {
    /// Entropy-conservative two-point flux only.
    EntropyConservative,
    /// Entropy-conservative flux plus local Lax-Friedrichs penalization.
    EntropyStableLf,
}

impl FluxMode {
    pub fn label(&self) -> &'static str {
        match self {
            FluxMode::EntropyConservative => "ec",
            FluxMode::EntropyStableLf => "eclf",
        }
    }
}

impl std::str::FromStr for FluxMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ec" => Ok(FluxMode::EntropyConservative),
            "eclf" | "lf" => Ok(FluxMode::EntropyStableLf),
            other => Err(Error::Config(format!("unknown flux mode `{other}`"))),
        }
    }
}

/// The conservation-law contract.
///
/// Slices are sized by `NF` (conserved fields); multi-direction outputs are
/// direction-major of length `DIM * NF`. The entropy pair `(U, v)` and the
/// potentials `psi_i` are mutually consistent: `v = U'(u)` and
/// `psi_i = v . f_i - F_i`, which is what the Tadmor condition rests on.
pub trait PhysicsModel: Sync {
    const NF: usize;
    const DIM: usize;

    fn name(&self) -> &'static str;

    /// Exact flux `f_dir(u)`.
    fn flux(&self, u: &[f64], dir: usize, out: &mut [f64]);

    /// Convex entropy `U(u)`.
    fn entropy(&self, u: &[f64]) -> f64;

    /// Entropy flux `F_dir(u)`.
    fn entropy_flux(&self, u: &[f64], dir: usize) -> f64;

    /// Entropy variables `v(u)`. Caller ensures admissibility.
    fn entropy_vars(&self, u: &[f64], out: &mut [f64]);

    /// Inverse map `u(v)`; errors when `v` leaves the admissible cone.
    fn conservative_from_entropy(&self, v: &[f64], out: &mut [f64]) -> Result<()>;

    /// Entropy potential `psi_dir(u)`.
    fn entropy_potential(&self, u: &[f64], dir: usize) -> f64;

    /// Entropy-conservative two-point flux, all directions at once:
    /// `fs[dir * NF + c]`. Caller ensures both states are admissible.
    fn ec_flux(&self, ul: &[f64], ur: &[f64], fs: &mut [f64]);

    /// Wavespeed estimate along the unit direction `n` for Lax-Friedrichs
    /// dissipation.
    fn max_wavespeed_normal(&self, ul: &[f64], ur: &[f64], n: &[f64]) -> f64;

    /// Whether `u` is inside the admissible set.
    fn is_admissible(&self, u: &[f64]) -> bool;

    /// Draw a random admissible state for certification sweeps.
    fn sample_admissible(&self, rng: &mut SplitMix, out: &mut [f64]);

    /// The quantities whose positivity the diagnostics track: `(density,
    /// pressure)` for gas dynamics, `(u, 0)` for scalar laws.
    fn density_pressure(&self, u: &[f64]) -> (f64, f64) {
        (u[0], 0.0)
    }
}

/// Local Lax-Friedrichs penalization `-(lambda/2) (u_R - u_L)` on the jump
/// of the entropy-projected conservative variables.
pub fn lax_friedrichs_penalty(ul: &[f64], ur: &[f64], lambda: f64, out: &mut [f64]) {
    for ((o, &l), &r) in out.iter_mut().zip(ul).zip(ur) {
        *o = -0.5 * lambda * (r - l);
    }
}

/// Maximum relative Tadmor residual of the model's EC flux over `trials`
/// random admissible pairs and all coordinate directions:
/// `|(v_L - v_R)^T f_S - (psi_L - psi_R)| / (1 + |psi_L| + |psi_R|)`.
pub fn tadmor_check<P: PhysicsModel>(model: &P, trials: usize, seed: u64) -> f64 {
    let nf = P::NF;
    let dim = P::DIM;
    let mut rng = SplitMix::new(seed);
    let mut ul = vec![0.0; nf];
    let mut ur = vec![0.0; nf];
    let mut vl = vec![0.0; nf];
    let mut vr = vec![0.0; nf];
    let mut fs = vec![0.0; dim * nf];
    let mut worst = 0.0f64;
    for _ in 0..trials {
        model.sample_admissible(&mut rng, &mut ul);
        model.sample_admissible(&mut rng, &mut ur);
        model.entropy_vars(&ul, &mut vl);
        model.entropy_vars(&ur, &mut vr);
        model.ec_flux(&ul, &ur, &mut fs);
        for i in 0..dim {
            let psi_l = model.entropy_potential(&ul, i);
            let psi_r = model.entropy_potential(&ur, i);
            let mut lhs = 0.0;
            for c in 0..nf {
                lhs += (vl[c] - vr[c]) * fs[i * nf + c];
            }
            let resid = (lhs - (psi_l - psi_r)).abs() / (1.0 + psi_l.abs() + psi_r.abs());
            worst = worst.max(resid);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn log_mean_equal_arguments() {
        assert_eq!(log_mean(2.0, 2.0, DEFAULT_LOG_EPS).unwrap(), 2.0);
    }

    #[test]
    fn log_mean_of_one_and_e() {
        let v = log_mean(1.0, std::f64::consts::E, DEFAULT_LOG_EPS).unwrap();
        assert!((v - 1.71828182845904523536).abs() < 1e-15);
    }

    #[test]
    fn log_mean_at_switch_boundary() {
        // high-precision reference of the defining formula
        let v = log_mean(1.0, 1.0 + 1e-8, DEFAULT_LOG_EPS).unwrap();
        let exact = 1.000000004999999991667;
        assert!((v - exact).abs() / exact < 1e-13);
    }

    #[test]
    fn log_mean_just_above_switch_uses_direct_formula_accurately() {
        // 2e-4 relative gap with eps = 1e-4 takes the direct branch
        let a = 1.0;
        let b = 1.0 + 2e-4;
        let v = log_mean(a, b, DEFAULT_LOG_EPS).unwrap();
        let exact = (a - b) / ((a / b) as f64).ln();
        assert!((v - exact).abs() / exact < 1e-13);
    }

    #[test]
    fn log_mean_rejects_nonpositive() {
        assert!(log_mean(-1.0, 2.0, DEFAULT_LOG_EPS).is_err());
        assert!(log_mean(1.0, 0.0, DEFAULT_LOG_EPS).is_err());
    }

    proptest! {
        #[test]
        fn log_mean_symmetric_and_bounded(a in 1e-3..1e3f64, b in 1e-3..1e3f64) {
            let ab = log_mean(a, b, DEFAULT_LOG_EPS).unwrap();
            let ba = log_mean(b, a, DEFAULT_LOG_EPS).unwrap();
            prop_assert!((ab - ba).abs() <= 1e-13 * ab.abs());
            prop_assert!(ab >= a.min(b) - 1e-12 && ab <= a.max(b) + 1e-12);
        }

        #[test]
        fn log_mean_homogeneous_degree_one(a in 0.1..10f64, b in 0.1..10f64, t in 0.1..10f64) {
            let lhs = log_mean(t * a, t * b, DEFAULT_LOG_EPS).unwrap();
            let rhs = t * log_mean(a, b, DEFAULT_LOG_EPS).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.abs());
        }
    }

    #[test]
    fn lf_penalty_zero_jump() {
        let u = [1.0, 2.0, 3.0];
        let mut out = [0.0; 3];
        lax_friedrichs_penalty(&u, &u, 2.5, &mut out);
        assert_eq!(out, [0.0; 3]);
    }

    #[test]
    fn lf_penalty_opposes_jump() {
        let ul = [1.0];
        let ur = [3.0];
        let mut out = [0.0];
        lax_friedrichs_penalty(&ul, &ur, 2.0, &mut out);
        assert_eq!(out[0], -2.0);
    }
}
