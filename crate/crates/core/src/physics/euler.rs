//! Compressible Euler equations in one and two dimensions.
//!
//! The entropy pair follows the two-dimensional sign convention for the
//! entropy variables in both dimensions, with `U = -rho s` as the matching
//! antiderivative (so that `v = U'(u)` holds exactly) and entropy potentials
//! `psi_i = (gamma - 1) rho u_i`, fixed by `psi = v . f - F` with
//! `F_i = u_i U`. The entropy-conservative two-point flux is the
//! Chandrashekar kinetic-energy-preserving flux built on logarithmic means
//! of density and inverse temperature.

use super::{log_mean_raw, PhysicsModel, DEFAULT_LOG_EPS};
use crate::error::{Error, Result};
use crate::util::SplitMix;

/// Ratio of specific heats for a diatomic gas.
pub const GAMMA: f64 = 1.4;

/// Conserved Euler state with derived thermodynamic quantities.
///
/// The second momentum component is ignored in one dimension.
#[derive(Debug, Clone, Copy)]
pub struct EulerState {
    pub rho: f64,
    pub mom: [f64; 2],
    pub energy: f64,
    pub dim: usize,
}

impl EulerState {
    pub fn from_conserved(u: &[f64], dim: usize) -> Self {
        match dim {
            1 => EulerState {
                rho: u[0],
                mom: [u[1], 0.0],
                energy: u[2],
                dim,
            },
            2 => EulerState {
                rho: u[0],
                mom: [u[1], u[2]],
                energy: u[3],
                dim,
            },
            _ => unreachable!("dim must be 1 or 2"),
        }
    }

    pub fn from_primitive(rho: f64, vel: [f64; 2], p: f64, dim: usize) -> Self {
        let ke = 0.5 * rho * (vel[0] * vel[0] + vel[1] * vel[1]);
        EulerState {
            rho,
            mom: [rho * vel[0], rho * vel[1]],
            energy: p / (GAMMA - 1.0) + ke,
            dim,
        }
    }

    pub fn write_conserved(&self, out: &mut [f64]) {
        out[0] = self.rho;
        out[1] = self.mom[0];
        if self.dim == 2 {
            out[2] = self.mom[1];
            out[3] = self.energy;
        } else {
            out[2] = self.energy;
        }
    }

    pub fn velocity(&self) -> [f64; 2] {
        [self.mom[0] / self.rho, self.mom[1] / self.rho]
    }

    /// Internal energy density `rho e = E - |m|^2 / (2 rho)`.
    pub fn internal_energy(&self) -> f64 {
        self.energy - 0.5 * (self.mom[0] * self.mom[0] + self.mom[1] * self.mom[1]) / self.rho
    }

    pub fn pressure(&self) -> f64 {
        (GAMMA - 1.0) * self.internal_energy()
    }

    /// Physical specific entropy `s = ln(p / rho^gamma)`.
    pub fn entropy_s(&self) -> f64 {
        self.pressure().ln() - GAMMA * self.rho.ln()
    }

    /// Inverse temperature `beta = rho / (2 p)`.
    pub fn beta(&self) -> f64 {
        self.rho / (2.0 * self.pressure())
    }

    pub fn sound_speed(&self) -> f64 {
        (GAMMA * self.pressure() / self.rho).sqrt()
    }

    pub fn is_admissible(&self) -> bool {
        self.rho > 0.0 && self.internal_energy() > 0.0 && self.energy.is_finite()
    }
}

#[inline]
fn admissible(u: &[f64], dim: usize) -> bool {
    let rho = u[0];
    if !(rho > 0.0) || !rho.is_finite() {
        return false;
    }
    let (ke, e) = match dim {
        1 => (0.5 * u[1] * u[1] / rho, u[2]),
        _ => (0.5 * (u[1] * u[1] + u[2] * u[2]) / rho, u[3]),
    };
    e.is_finite() && e - ke > 0.0
}

#[inline]
fn entropy_vars_impl(u: &[f64], dim: usize, out: &mut [f64]) {
    let rho = u[0];
    let nf = dim + 2;
    let e = u[nf - 1];
    let mut ke = 0.0;
    for i in 0..dim {
        ke += u[1 + i] * u[1 + i];
    }
    ke *= 0.5 / rho;
    let rho_e = e - ke;
    let s = ((GAMMA - 1.0) * rho_e).ln() - GAMMA * rho.ln();
    out[0] = (rho_e * (GAMMA + 1.0 - s) - e) / rho_e;
    for i in 0..dim {
        out[1 + i] = u[1 + i] / rho_e;
    }
    out[nf - 1] = -rho / rho_e;
}

#[inline]
fn conservative_from_entropy_impl(v: &[f64], dim: usize, out: &mut [f64]) -> Result<()> {
    let nf = dim + 2;
    let v_last = v[nf - 1];
    if !(v_last < 0.0) {
        return Err(Error::InvalidState(format!(
            "entropy variables outside the admissible cone: v_last = {v_last}"
        )));
    }
    let mut vsq = 0.0;
    for i in 0..dim {
        vsq += v[1 + i] * v[1 + i];
    }
    let s = GAMMA - v[0] + vsq / (2.0 * v_last);
    let rho_e = ((GAMMA - 1.0) / (-v_last).powf(GAMMA)).powf(1.0 / (GAMMA - 1.0))
        * (-s / (GAMMA - 1.0)).exp();
    if !rho_e.is_finite() || rho_e <= 0.0 {
        return Err(Error::InvalidState(format!(
            "inverse entropy map produced rho_e = {rho_e}"
        )));
    }
    out[0] = -rho_e * v_last;
    for i in 0..dim {
        out[1 + i] = rho_e * v[1 + i];
    }
    out[nf - 1] = rho_e * (1.0 - vsq / (2.0 * v_last));
    if !admissible(out, dim) {
        return Err(Error::InvalidState(
            "inverse entropy map produced an inadmissible state".into(),
        ));
    }
    Ok(())
}

#[inline]
fn entropy_impl(u: &[f64], dim: usize) -> f64 {
    let st = EulerState::from_conserved(u, dim);
    -st.rho * st.entropy_s()
}

fn sample_impl(rng: &mut SplitMix, dim: usize, out: &mut [f64]) {
    let rho = rng.next_in(0.1, 10.0);
    let p = rng.next_in(0.1, 10.0);
    let mut vel = [0.0f64; 2];
    for v in vel.iter_mut().take(dim) {
        *v = rng.next_in(-3.0, 3.0);
    }
    EulerState::from_primitive(rho, vel, p, dim).write_conserved(out);
}

#[inline]
fn wavespeed_normal_impl(ul: &[f64], ur: &[f64], n: &[f64], dim: usize) -> f64 {
    let mut lambda = 0.0f64;
    for u in [ul, ur] {
        let st = EulerState::from_conserved(u, dim);
        let vel = st.velocity();
        let mut un = 0.0;
        for i in 0..dim {
            un += vel[i] * n[i];
        }
        lambda = lambda.max(un.abs() + st.sound_speed());
    }
    lambda
}

/// One-dimensional compressible Euler equations.
#[derive(Debug, Clone, Copy)]
pub struct Euler1D {
    /// Switch tolerance for the logarithmic mean.
    pub log_eps: f64,
}

impl Default for Euler1D {
    fn default() -> Self {
        Euler1D {
            log_eps: DEFAULT_LOG_EPS,
        }
    }
}

impl Euler1D {
    pub fn with_log_eps(log_eps: f64) -> Self {
        Euler1D { log_eps }
    }
}

/// Chandrashekar entropy-conservative flux, one dimension.
#[inline]
pub fn euler_ec_flux_1d(ul: &[f64], ur: &[f64], eps: f64, fs: &mut [f64]) {
    let l = EulerState::from_conserved(ul, 1);
    let r = EulerState::from_conserved(ur, 1);
    let (ul1, ur1) = (l.velocity()[0], r.velocity()[0]);
    let rho_log = log_mean_raw(l.rho, r.rho, eps);
    let rho_avg = 0.5 * (l.rho + r.rho);
    let beta_l = l.beta();
    let beta_r = r.beta();
    let beta_avg = 0.5 * (beta_l + beta_r);
    let beta_log = log_mean_raw(beta_l, beta_r, eps);
    let u_avg = 0.5 * (ul1 + ur1);
    let u2_avg = 0.5 * (ul1 * ul1 + ur1 * ur1);

    let f1 = rho_log * u_avg;
    let f2 = rho_avg / (2.0 * beta_avg) + u_avg * f1;
    let f3 = f1 * (1.0 / (2.0 * (GAMMA - 1.0) * beta_log) - 0.5 * u2_avg) + u_avg * f2;
    fs[0] = f1;
    fs[1] = f2;
    fs[2] = f3;
}

impl PhysicsModel for Euler1D {
    const NF: usize = 3;
    const DIM: usize = 1;

    fn name(&self) -> &'static str {
        "euler1d"
    }

    fn flux(&self, u: &[f64], _dir: usize, out: &mut [f64]) {
        let st = EulerState::from_conserved(u, 1);
        let vel = st.velocity()[0];
        let p = st.pressure();
        out[0] = u[1];
        out[1] = u[1] * vel + p;
        out[2] = vel * (st.energy + p);
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        entropy_impl(u, 1)
    }

    fn entropy_flux(&self, u: &[f64], _dir: usize) -> f64 {
        let st = EulerState::from_conserved(u, 1);
        -st.rho * st.velocity()[0] * st.entropy_s()
    }

    fn entropy_vars(&self, u: &[f64], out: &mut [f64]) {
        entropy_vars_impl(u, 1, out);
    }

    fn conservative_from_entropy(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        conservative_from_entropy_impl(v, 1, out)
    }

    fn entropy_potential(&self, u: &[f64], _dir: usize) -> f64 {
        (GAMMA - 1.0) * u[1]
    }

    fn ec_flux(&self, ul: &[f64], ur: &[f64], fs: &mut [f64]) {
        euler_ec_flux_1d(ul, ur, self.log_eps, fs);
    }

    fn max_wavespeed_normal(&self, ul: &[f64], ur: &[f64], n: &[f64]) -> f64 {
        wavespeed_normal_impl(ul, ur, n, 1)
    }

    fn is_admissible(&self, u: &[f64]) -> bool {
        admissible(u, 1)
    }

    fn sample_admissible(&self, rng: &mut SplitMix, out: &mut [f64]) {
        sample_impl(rng, 1, out);
    }

    fn density_pressure(&self, u: &[f64]) -> (f64, f64) {
        let st = EulerState::from_conserved(u, 1);
        (st.rho, st.pressure())
    }
}

/// Two-dimensional compressible Euler equations.
#[derive(Debug, Clone, Copy)]
pub struct Euler2D {
    pub log_eps: f64,
}

impl Default for Euler2D {
    fn default() -> Self {
        Euler2D {
            log_eps: DEFAULT_LOG_EPS,
        }
    }
}

impl Euler2D {
    pub fn with_log_eps(log_eps: f64) -> Self {
        Euler2D { log_eps }
    }
}

/// Chandrashekar entropy-conservative flux, two dimensions; writes the x
/// and y fluxes into `fs[0..4]` and `fs[4..8]`.
#[inline]
pub fn euler_ec_flux_2d(ul: &[f64], ur: &[f64], eps: f64, fs: &mut [f64]) {
    let l = EulerState::from_conserved(ul, 2);
    let r = EulerState::from_conserved(ur, 2);
    let vl = l.velocity();
    let vr = r.velocity();
    let rho_log = log_mean_raw(l.rho, r.rho, eps);
    let rho_avg = 0.5 * (l.rho + r.rho);
    let beta_l = l.beta();
    let beta_r = r.beta();
    let beta_avg = 0.5 * (beta_l + beta_r);
    let beta_log = log_mean_raw(beta_l, beta_r, eps);
    let u_avg = 0.5 * (vl[0] + vr[0]);
    let v_avg = 0.5 * (vl[1] + vr[1]);
    let vel2_avg = 0.5 * (vl[0] * vl[0] + vr[0] * vr[0]) + 0.5 * (vl[1] * vl[1] + vr[1] * vr[1]);
    let p_avg = rho_avg / (2.0 * beta_avg);
    let e_term = 1.0 / (2.0 * (GAMMA - 1.0) * beta_log) - 0.5 * vel2_avg;

    // the cross-momentum component is shared between the two directions
    let cross = rho_log * u_avg * v_avg;

    // x direction
    let g1 = rho_log * u_avg;
    let g2 = g1 * u_avg + p_avg;
    let g3 = cross;
    let g4 = g1 * e_term + u_avg * g2 + v_avg * g3;
    fs[0] = g1;
    fs[1] = g2;
    fs[2] = g3;
    fs[3] = g4;

    // y direction
    let h1 = rho_log * v_avg;
    let h2 = cross;
    let h3 = h1 * v_avg + p_avg;
    let h4 = h1 * e_term + u_avg * h2 + v_avg * h3;
    fs[4] = h1;
    fs[5] = h2;
    fs[6] = h3;
    fs[7] = h4;
}

impl PhysicsModel for Euler2D {
    const NF: usize = 4;
    const DIM: usize = 2;

    fn name(&self) -> &'static str {
        "euler2d"
    }

    fn flux(&self, u: &[f64], dir: usize, out: &mut [f64]) {
        let st = EulerState::from_conserved(u, 2);
        let vel = st.velocity();
        let p = st.pressure();
        let vn = vel[dir];
        out[0] = u[0] * vn;
        out[1] = u[1] * vn;
        out[2] = u[2] * vn;
        out[3] = vn * (st.energy + p);
        out[1 + dir] += p;
    }

    fn entropy(&self, u: &[f64]) -> f64 {
        entropy_impl(u, 2)
    }

    fn entropy_flux(&self, u: &[f64], dir: usize) -> f64 {
        let st = EulerState::from_conserved(u, 2);
        -st.rho * st.velocity()[dir] * st.entropy_s()
    }

    fn entropy_vars(&self, u: &[f64], out: &mut [f64]) {
        entropy_vars_impl(u, 2, out);
    }

    fn conservative_from_entropy(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        conservative_from_entropy_impl(v, 2, out)
    }

    fn entropy_potential(&self, u: &[f64], dir: usize) -> f64 {
        (GAMMA - 1.0) * u[1 + dir]
    }

    fn ec_flux(&self, ul: &[f64], ur: &[f64], fs: &mut [f64]) {
        euler_ec_flux_2d(ul, ur, self.log_eps, fs);
    }

    fn max_wavespeed_normal(&self, ul: &[f64], ur: &[f64], n: &[f64]) -> f64 {
        wavespeed_normal_impl(ul, ur, n, 2)
    }

    fn is_admissible(&self, u: &[f64]) -> bool {
        admissible(u, 2)
    }

    fn sample_admissible(&self, rng: &mut SplitMix, out: &mut [f64]) {
        sample_impl(rng, 2, out);
    }

    fn density_pressure(&self, u: &[f64]) -> (f64, f64) {
        let st = EulerState::from_conserved(u, 2);
        (st.rho, st.pressure())
    }
}
