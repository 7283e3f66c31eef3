//! Semi-discrete entropy conservative / entropy stable DG right-hand side
//! and time integration.
//!
//! Each right-hand side evaluation runs in two phases. First every element
//! projects its entropy variables and evaluates the entropy-projected
//! conservative variables at the combined volume+surface quadrature points.
//! Then every element assembles its flux-differencing volume term (a
//! Hadamard-style pair loop over the decoupled operator, never
//! materializing the dense two-point flux matrix) and couples to its
//! neighbors' traces through entropy-conservative interface fluxes, with
//! optional local Lax-Friedrichs penalization on the jump of the
//! entropy-projected variables.
//!
//! Elements are processed independently in both phases, so parallel
//! execution is bit-identical to serial execution.

use crate::error::{Error, Result};
use crate::mesh::{Conn, Mesh};
use crate::physics::{FluxMode, PhysicsModel};
use crate::refelem::{OperatorSet, QuadMode};
use rayon::prelude::*;
use std::collections::HashMap;

/// Maximum number of conserved fields across the supported models.
pub const MAX_NF: usize = 4;

/// Run parameters of a single solve.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub quad: QuadMode,
    pub cfl: f64,
    pub final_time: f64,
    pub flux_mode: FluxMode,
    pub log_eps: f64,
    /// Diagnostics cadence in steps (1 = every step).
    pub output_every: usize,
}

impl RunConfig {
    /// Timestep `CFL * h / C_N` with the trace-inequality constant
    /// `C_N = (N+1)^2 / 2`.
    pub fn dt(&self, h: f64) -> f64 {
        let cn = ((self.n + 1) * (self.n + 1)) as f64 / 2.0;
        self.cfl * h / cn
    }
}

/// Per-element modal coefficients of the conserved fields.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub t: f64,
    /// Layout: `[(element * nf + field) * np + mode]`.
    pub coeffs: Vec<f64>,
    pub np: usize,
    pub nf: usize,
}

impl SolverState {
    pub fn zeros(n_elements: usize, np: usize, nf: usize) -> Self {
        SolverState {
            t: 0.0,
            coeffs: vec![0.0; n_elements * np * nf],
            np,
            nf,
        }
    }

    pub fn n_elements(&self) -> usize {
        self.coeffs.len() / (self.np * self.nf)
    }

    #[inline]
    pub fn block(&self, k: usize, field: usize) -> &[f64] {
        let start = (k * self.nf + field) * self.np;
        &self.coeffs[start..start + self.np]
    }

    /// Quadrature-based L2 projection of pointwise initial data.
    pub fn project<P: PhysicsModel>(
        ops: &OperatorSet,
        mesh: &Mesh,
        _model: &P,
        t: f64,
        f: impl Fn([f64; 2]) -> [f64; MAX_NF],
    ) -> Self {
        let nf = P::NF;
        let np = ops.np();
        let nq = ops.nq();
        let mut state = SolverState::zeros(mesh.n_elements(), np, nf);
        state.t = t;
        for k in 0..mesh.n_elements() {
            let geo = &mesh.geoms[k];
            // values at volume quadrature points, field-major
            let mut vals = vec![0.0; nq * nf];
            for (i, &pt) in ops.elem.volume.points.iter().enumerate() {
                let x = geo.map(pt);
                let u = f(x);
                for c in 0..nf {
                    vals[c * nq + i] = u[c];
                }
            }
            for c in 0..nf {
                let start = (k * nf + c) * np;
                for m in 0..np {
                    let mut s = 0.0;
                    for i in 0..nq {
                        s += ops.pq[(m, i)] * vals[c * nq + i];
                    }
                    state.coeffs[start + m] = s;
                }
            }
        }
        state
    }
}

/// Exterior states for Dirichlet-by-flux boundaries, frozen at setup.
#[derive(Debug, Clone, Default)]
pub struct BoundaryTable {
    states: HashMap<(usize, usize), [f64; MAX_NF]>,
}

impl BoundaryTable {
    /// Evaluate `f` at every boundary surface point of the mesh.
    pub fn from_fn(mesh: &Mesh, nf: usize, f: impl Fn([f64; 2]) -> [f64; MAX_NF]) -> Self {
        let mut states = HashMap::new();
        for (k, row) in mesh.conn.iter().enumerate() {
            for (p, c) in row.iter().enumerate() {
                if matches!(c, Conn::Boundary) {
                    let mut u = f(mesh.surface_points[k][p]);
                    for v in u.iter_mut().skip(nf) {
                        *v = 0.0;
                    }
                    states.insert((k, p), u);
                }
            }
        }
        BoundaryTable { states }
    }

    fn get(&self, k: usize, p: usize) -> Option<&[f64; MAX_NF]> {
        self.states.get(&(k, p))
    }
}

/// Which states feed the two-point fluxes. `RawConservative` skips the
/// entropy projection and is only there to demonstrate that doing so
/// destroys discrete entropy conservation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceSource {
    EntropyProjected,
    RawConservative,
}

/// Everything fixed over a run: operators, mesh, model, coupling choices.
pub struct Discretization<'a, P: PhysicsModel> {
    pub ops: &'a OperatorSet,
    pub mesh: &'a Mesh,
    pub model: &'a P,
    pub flux_mode: FluxMode,
    pub trace_source: TraceSource,
    pub bc: BoundaryTable,
    kern: Kernels,
}

/// Row-major copies of the hot matrices.
struct Kernels {
    nq: usize,
    nqf: usize,
    np: usize,
    vq: Vec<f64>,
    vf: Vec<f64>,
    pq: Vec<f64>,
    lq: Vec<f64>,
    /// Decoupled operators, row-major, one per reference direction.
    dn: Vec<Vec<f64>>,
    /// Reference surface weights (with the reference face Jacobian).
    wf: Vec<f64>,
}

impl Kernels {
    fn new(ops: &OperatorSet) -> Self {
        let (nq, nqf, np) = (ops.nq(), ops.nqf(), ops.np());
        let flat = |m: &nalgebra::DMatrix<f64>| -> Vec<f64> {
            let mut v = vec![0.0; m.nrows() * m.ncols()];
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    v[r * m.ncols() + c] = m[(r, c)];
                }
            }
            v
        };
        Kernels {
            nq,
            nqf,
            np,
            vq: flat(&ops.vq),
            vf: flat(&ops.vf),
            pq: flat(&ops.pq),
            lq: flat(&ops.lq),
            dn: ops.dn.iter().map(flat).collect(),
            wf: (0..nqf).map(|i| ops.wf[i]).collect(),
        }
    }
}

/// Entropy projection of one element: projected entropy-variable
/// coefficients and the entropy-projected conservative variables at the
/// combined volume+surface quadrature points.
#[derive(Debug, Clone)]
pub struct ElementTrace {
    /// Point-major: `util[pt * nf + field]`, volume points first.
    pub util: Vec<f64>,
    /// Field-major coefficients of the projected entropy variables.
    pub vh: Vec<f64>,
    /// Raw polynomial traces at surface points, point-major.
    pub raw_f: Vec<f64>,
}

/// Right-hand side plus the per-element interface bookkeeping used by the
/// conservation diagnostics.
#[derive(Debug, Clone)]
pub struct RhsOutput {
    /// `d u_h / d t`, same layout as `SolverState::coeffs`.
    pub dudt: Vec<f64>,
    /// Per element and field: the surface-weighted normal flux
    /// `sum_p w_p (sum_i n_i f*_i + penalty)_p` leaving the element.
    pub iface_outflux: Vec<[f64; MAX_NF]>,
}

impl<'a, P: PhysicsModel> Discretization<'a, P> {
    pub fn new(
        ops: &'a OperatorSet,
        mesh: &'a Mesh,
        model: &'a P,
        flux_mode: FluxMode,
        bc: BoundaryTable,
    ) -> Self {
        assert_eq!(ops.dim(), P::DIM, "operator/model dimension mismatch");
        Discretization {
            kern: Kernels::new(ops),
            ops,
            mesh,
            model,
            flux_mode,
            trace_source: TraceSource::EntropyProjected,
            bc,
        }
    }

    pub fn with_trace_source(mut self, source: TraceSource) -> Self {
        self.trace_source = source;
        self
    }

    /// Configured exterior state at a boundary surface point, if any.
    pub fn bc_state(&self, k: usize, p: usize) -> Option<[f64; MAX_NF]> {
        self.bc.get(k, p).copied()
    }

    /// Entropy projection (Eq. pipeline `u_q -> v_q -> v_h -> vtil -> util`)
    /// for one element.
    pub fn entropy_project(&self, state: &SolverState, k: usize) -> Result<ElementTrace> {
        let nf = P::NF;
        let kern = &self.kern;
        let (nq, nqf, np) = (kern.nq, kern.nqf, kern.np);
        let nt = nq + nqf;

        // u at volume points, point-major
        let mut uq = vec![0.0; nq * nf];
        for c in 0..nf {
            let coeff = state.block(k, c);
            for i in 0..nq {
                let row = &kern.vq[i * np..(i + 1) * np];
                let mut s = 0.0;
                for (m, &v) in row.iter().enumerate() {
                    s += v * coeff[m];
                }
                uq[i * nf + c] = s;
            }
        }

        let mut vh = vec![0.0; np * nf];
        let mut util = vec![0.0; nt * nf];

        match self.trace_source {
            TraceSource::EntropyProjected => {
                // v at volume points
                let mut vq_pts = vec![0.0; nq * nf];
                for i in 0..nq {
                    let u = &uq[i * nf..(i + 1) * nf];
                    if !self.model.is_admissible(u) {
                        return Err(self.blowup(state.t, k, i, u));
                    }
                    self.model
                        .entropy_vars(u, &mut vq_pts[i * nf..(i + 1) * nf]);
                }
                // v_h = P_q v_q
                for c in 0..nf {
                    for m in 0..np {
                        let row = &kern.pq[m * nq..(m + 1) * nq];
                        let mut s = 0.0;
                        for i in 0..nq {
                            s += row[i] * vq_pts[i * nf + c];
                        }
                        vh[c * np + m] = s;
                    }
                }
                // vtil at volume+surface points, then util = u(vtil)
                let mut vtil = [0.0f64; MAX_NF];
                for pt in 0..nt {
                    let row = if pt < nq {
                        &kern.vq[pt * np..(pt + 1) * np]
                    } else {
                        &kern.vf[(pt - nq) * np..(pt - nq + 1) * np]
                    };
                    for (c, vt) in vtil.iter_mut().enumerate().take(nf) {
                        let mut s = 0.0;
                        for m in 0..np {
                            s += row[m] * vh[c * np + m];
                        }
                        *vt = s;
                    }
                    self.model
                        .conservative_from_entropy(&vtil[..nf], &mut util[pt * nf..(pt + 1) * nf])
                        .map_err(|_| {
                            let u = &uq[(pt.min(nq - 1)) * nf..(pt.min(nq - 1) + 1) * nf];
                            self.blowup(state.t, k, pt, u)
                        })?;
                }
            }
            TraceSource::RawConservative => {
                // the negative control: feed raw conservative traces to the
                // fluxes (still projecting v for the delta diagnostic)
                let mut vq_pts = vec![0.0; nq * nf];
                for i in 0..nq {
                    let u = &uq[i * nf..(i + 1) * nf];
                    if !self.model.is_admissible(u) {
                        return Err(self.blowup(state.t, k, i, u));
                    }
                    self.model
                        .entropy_vars(u, &mut vq_pts[i * nf..(i + 1) * nf]);
                }
                for c in 0..nf {
                    for m in 0..np {
                        let row = &kern.pq[m * nq..(m + 1) * nq];
                        let mut s = 0.0;
                        for i in 0..nq {
                            s += row[i] * vq_pts[i * nf + c];
                        }
                        vh[c * np + m] = s;
                    }
                }
                util[..nq * nf].copy_from_slice(&uq);
                for p in 0..nqf {
                    let row = &kern.vf[p * np..(p + 1) * np];
                    for c in 0..nf {
                        let coeff = state.block(k, c);
                        let mut s = 0.0;
                        for m in 0..np {
                            s += row[m] * coeff[m];
                        }
                        util[(nq + p) * nf + c] = s;
                    }
                }
                for pt in 0..nt {
                    let u = &util[pt * nf..(pt + 1) * nf];
                    if !self.model.is_admissible(u) {
                        return Err(self.blowup(state.t, k, pt, u));
                    }
                }
            }
        }
        // raw polynomial surface traces (diagnostics and penalties)
        let mut raw_f = vec![0.0; nqf * nf];
        for p in 0..nqf {
            let row = &kern.vf[p * np..(p + 1) * np];
            for c in 0..nf {
                let coeff = state.block(k, c);
                let mut s = 0.0;
                for m in 0..np {
                    s += row[m] * coeff[m];
                }
                raw_f[p * nf + c] = s;
            }
        }
        Ok(ElementTrace { util, vh, raw_f })
    }

    fn blowup(&self, t: f64, element: usize, point: usize, u: &[f64]) -> Error {
        let rho = u[0];
        let nf = P::NF;
        let rho_e = if nf >= 3 {
            let mut ke = 0.0;
            for c in 1..nf - 1 {
                ke += u[c] * u[c];
            }
            u[nf - 1] - 0.5 * ke / rho
        } else {
            f64::NAN
        };
        Error::BlowUp {
            t,
            element,
            point,
            rho,
            rho_e,
        }
    }

    /// Project every element (phase one of an RHS evaluation).
    pub fn project_all(&self, state: &SolverState) -> Result<Vec<ElementTrace>> {
        (0..self.mesh.n_elements())
            .into_par_iter()
            .map(|k| self.entropy_project(state, k))
            .collect()
    }

    /// Volume flux-differencing contribution of one element, accumulated
    /// into `acc` (point-major over the combined point set).
    fn volume_accumulate(&self, k: usize, util: &[f64], acc: &mut [f64]) {
        let nf = P::NF;
        let dim = P::DIM;
        let kern = &self.kern;
        let (nq, nqf) = (kern.nq, kern.nqf);
        let nt = nq + nqf;
        let g = &self.mesh.geoms[k].g;

        let mut fs = [0.0f64; 2 * MAX_NF];
        for j in 0..nt {
            let uj = &util[j * nf..(j + 1) * nf];
            // diagonal: consistency collapses the two-point flux
            for i in 0..dim {
                let mut a_jj = 0.0;
                for (d, dnd) in kern.dn.iter().enumerate() {
                    a_jj += g[i][d] * dnd[j * nt + j];
                }
                if a_jj != 0.0 {
                    self.model.flux(uj, i, &mut fs[..nf]);
                    let c = 2.0 * a_jj;
                    for f in 0..nf {
                        acc[j * nf + f] += c * fs[f];
                    }
                }
            }
            // off-diagonal pairs; the surface-surface block is diagonal so
            // surface rows only pair with volume columns
            let lmax = if j < nq { nt } else { 0 };
            for l in (j + 1)..lmax {
                let mut coef_jl = [0.0f64; 2];
                let mut coef_lj = [0.0f64; 2];
                let mut nonzero = false;
                for i in 0..dim {
                    let mut a_jl = 0.0;
                    let mut a_lj = 0.0;
                    for (d, dnd) in kern.dn.iter().enumerate() {
                        a_jl += g[i][d] * dnd[j * nt + l];
                        a_lj += g[i][d] * dnd[l * nt + j];
                    }
                    coef_jl[i] = 2.0 * a_jl;
                    coef_lj[i] = 2.0 * a_lj;
                    nonzero |= a_jl != 0.0 || a_lj != 0.0;
                }
                if !nonzero {
                    continue;
                }
                let ul = &util[l * nf..(l + 1) * nf];
                self.model.ec_flux(uj, ul, &mut fs[..dim * nf]);
                for i in 0..dim {
                    let fsi = &fs[i * nf..(i + 1) * nf];
                    let (cjl, clj) = (coef_jl[i], coef_lj[i]);
                    for f in 0..nf {
                        acc[j * nf + f] += cjl * fsi[f];
                        acc[l * nf + f] += clj * fsi[f];
                    }
                }
            }
        }
    }

    /// Assemble `d u_h / d t` at the given state.
    pub fn assemble_rhs(&self, traces: &[ElementTrace]) -> RhsOutput {
        let nf = P::NF;
        let dim = P::DIM;
        let kern = &self.kern;
        let (nq, nqf, np) = (kern.nq, kern.nqf, kern.np);
        let nt = nq + nqf;
        let n_elem = self.mesh.n_elements();

        let per_elem: Vec<(Vec<f64>, [f64; MAX_NF])> = (0..n_elem)
            .into_par_iter()
            .map(|k| {
                let geo = &self.mesh.geoms[k];
                let util = &traces[k].util;
                let mut acc = vec![0.0; nt * nf];
                self.volume_accumulate(k, util, &mut acc);

                // interface contributions per surface point
                let mut iface = vec![0.0; nqf * nf]; // g_p, point-major
                let mut outflux = [0.0f64; MAX_NF];
                let mut fs = [0.0f64; 2 * MAX_NF];
                let mut fint = [0.0f64; MAX_NF];
                let mut uext_buf = [0.0f64; MAX_NF];
                for p in 0..nqf {
                    let uint = &util[(nq + p) * nf..(nq + p + 1) * nf];
                    let uext: &[f64] = match self.mesh.conn[k][p] {
                        Conn::Interior { elem, point } => {
                            &traces[elem].util[(nq + point) * nf..(nq + point + 1) * nf]
                        }
                        Conn::Boundary => match self.bc.get(k, p) {
                            Some(b) => &b[..nf],
                            None => {
                                // no boundary data configured: copy in the
                                // interior trace so f* collapses to f
                                uext_buf[..nf].copy_from_slice(uint);
                                &uext_buf[..nf]
                            }
                        },
                    };
                    self.model.ec_flux(uint, uext, &mut fs[..dim * nf]);
                    let n = &geo.normal[p];
                    let gp = &mut iface[p * nf..(p + 1) * nf];
                    for i in 0..dim {
                        self.model.flux(uint, i, &mut fint[..nf]);
                        for f in 0..nf {
                            gp[f] += n[i] * (fs[i * nf + f] - fint[f]);
                        }
                    }
                    if self.flux_mode == FluxMode::EntropyStableLf {
                        let lambda = self.model.max_wavespeed_normal(uint, uext, &n[..dim]);
                        for f in 0..nf {
                            gp[f] -= 0.5 * lambda * (uext[f] - uint[f]);
                        }
                    }
                    // bookkeeping for the conservation diagnostics:
                    // w_p (sum_i n_i f*_i + penalty) = w_p (g_p + sum_i n_i f_int,i)
                    let wsc = kern.wf[p] * geo.jf_scale[p];
                    for i in 0..dim {
                        self.model.flux(uint, i, &mut fint[..nf]);
                        for f in 0..nf {
                            outflux[f] += wsc * n[i] * fint[f];
                        }
                    }
                    for f in 0..nf {
                        outflux[f] += wsc * gp[f];
                    }
                }

                // dudt = -(P_q acc_vol + L_q acc_surf) - (1/J) L_q diag(jf_scale) iface
                let inv_j = 1.0 / geo.j;
                let mut dudt = vec![0.0; np * nf];
                for m in 0..np {
                    let prow = &kern.pq[m * nq..(m + 1) * nq];
                    let lrow = &kern.lq[m * nqf..(m + 1) * nqf];
                    for f in 0..nf {
                        let mut s = 0.0;
                        for i in 0..nq {
                            s += prow[i] * acc[i * nf + f];
                        }
                        for p in 0..nqf {
                            s += lrow[p]
                                * (acc[(nq + p) * nf + f]
                                    + inv_j * geo.jf_scale[p] * iface[p * nf + f]);
                        }
                        dudt[f * np + m] = -s;
                    }
                }
                (dudt, outflux)
            })
            .collect();

        let mut dudt = vec![0.0; n_elem * np * nf];
        let mut iface_outflux = Vec::with_capacity(n_elem);
        for (k, (d, o)) in per_elem.into_iter().enumerate() {
            dudt[k * np * nf..(k + 1) * np * nf].copy_from_slice(&d);
            iface_outflux.push(o);
        }
        RhsOutput {
            dudt,
            iface_outflux,
        }
    }

    /// Project and assemble in one call.
    pub fn rhs(&self, state: &SolverState) -> Result<RhsOutput> {
        let traces = self.project_all(state)?;
        Ok(self.assemble_rhs(&traces))
    }
}

/// Carpenter-Kennedy low-storage RK4(5) coefficients.
pub const LSRK45_A: [f64; 5] = [
    0.0,
    -567301805773.0 / 1357537059087.0,
    -2404267990393.0 / 2016746695238.0,
    -3550918686646.0 / 2091501179385.0,
    -1275806237668.0 / 842570457699.0,
];
pub const LSRK45_B: [f64; 5] = [
    1432997174477.0 / 9575080441755.0,
    5161836677717.0 / 13612068292357.0,
    1720146321549.0 / 2090206949498.0,
    3134564353537.0 / 4481467310338.0,
    2277821191437.0 / 14882151754819.0,
];
pub const LSRK45_C: [f64; 5] = [
    0.0,
    1432997174477.0 / 9575080441755.0,
    2526269341429.0 / 6820363962896.0,
    2006345519317.0 / 3224310063776.0,
    2802321613138.0 / 2924317926251.0,
];

/// One low-storage RK4(5) step of `du/dt = rhs(u, t)`.
///
/// `work` must have the same length as the coefficient vector and is
/// reused across steps.
pub fn lsrk45_step<E>(
    state: &mut SolverState,
    dt: f64,
    work: &mut Vec<f64>,
    mut rhs: impl FnMut(&SolverState) -> std::result::Result<Vec<f64>, E>,
) -> std::result::Result<(), E> {
    let t0 = state.t;
    work.clear();
    work.resize(state.coeffs.len(), 0.0);
    for s in 0..5 {
        state.t = t0 + LSRK45_C[s] * dt;
        let r = rhs(state)?;
        for (w, &ri) in work.iter_mut().zip(&r) {
            *w = LSRK45_A[s] * *w + dt * ri;
        }
        for (u, &w) in state.coeffs.iter_mut().zip(work.iter()) {
            *u += LSRK45_B[s] * w;
        }
    }
    state.t = t0 + dt;
    Ok(())
}

/// One diagnostics sample.
#[derive(Debug, Clone)]
pub struct DiagRow {
    pub t: f64,
    pub total_entropy: f64,
    pub delta_u: f64,
    /// Entropy residual of the assembled right-hand side.
    pub delta: f64,
    pub conservation_residual: f64,
    pub min_density: f64,
    pub min_pressure: f64,
}

/// Outcome of a run: sampled diagnostics plus the final state, or the
/// blow-up error with the partial diagnostics retained.
pub struct RunOutcome {
    pub rows: Vec<DiagRow>,
    pub result: Result<SolverState>,
}

impl RunOutcome {
    pub fn state(&self) -> Option<&SolverState> {
        self.result.as_ref().ok()
    }
}

/// Advance from `state.t` to `config.final_time`, sampling diagnostics at
/// the configured cadence (always including the initial and final states).
pub fn run<P: PhysicsModel>(
    disc: &Discretization<P>,
    mut state: SolverState,
    config: &RunConfig,
) -> RunOutcome {
    let dt_nominal = config.dt(disc.mesh.h_min);
    let mut rows = Vec::new();
    let mut work = Vec::new();

    let sample = |state: &SolverState, rows: &mut Vec<DiagRow>, u0: Option<f64>| -> Result<f64>
    {
        let traces = disc.project_all(state)?;
        let rhs = disc.assemble_rhs(&traces);
        let row = crate::diagnostics::sample_row(disc, state, &traces, &rhs, u0);
        let total = row.total_entropy;
        rows.push(row);
        Ok(total)
    };

    let u0 = match sample(&state, &mut rows, None) {
        Ok(u) => u,
        Err(e) => {
            return RunOutcome {
                rows,
                result: Err(e),
            }
        }
    };

    if config.final_time <= state.t {
        return RunOutcome {
            rows,
            result: Ok(state),
        };
    }

    let mut step = 0usize;
    loop {
        let remaining = config.final_time - state.t;
        if remaining <= dt_nominal * 1e-12 {
            break;
        }
        let dt = dt_nominal.min(remaining);
        let res = lsrk45_step(&mut state, dt, &mut work, |s| disc.rhs(s).map(|r| r.dudt));
        if let Err(e) = res {
            return RunOutcome {
                rows,
                result: Err(e),
            };
        }
        step += 1;
        let at_end = config.final_time - state.t <= dt_nominal * 1e-12;
        if step % config.output_every.max(1) == 0 || at_end {
            if let Err(e) = sample(&state, &mut rows, Some(u0)) {
                return RunOutcome {
                    rows,
                    result: Err(e),
                };
            }
        }
        if at_end {
            break;
        }
    }
    RunOutcome {
        rows,
        result: Ok(state),
    }
}

/// Simplified split-form right-hand side for Burgers' equation: the
/// `-1/3 (D P_q u_q^2 + P_q diag(u_q) D_q u_q)` volume term with its
/// boundary corrections and the energy-conserving interface flux. Must
/// agree with the Hadamard route to round-off on periodic meshes.
pub fn burgers_split_rhs(
    ops: &OperatorSet,
    mesh: &Mesh,
    state: &SolverState,
) -> Result<Vec<f64>> {
    use crate::physics::burgers::burgers_flux;
    let np = ops.np();
    let nq = ops.nq();
    let nqf = ops.nqf();
    let n_elem = mesh.n_elements();
    assert_eq!(state.nf, 1);

    // traces at surface points per element (polynomial trace; v = u)
    let mut uf_all = vec![0.0; n_elem * nqf];
    for k in 0..n_elem {
        let c = state.block(k, 0);
        for p in 0..nqf {
            let mut s = 0.0;
            for m in 0..np {
                s += ops.vf[(p, m)] * c[m];
            }
            uf_all[k * nqf + p] = s;
        }
    }

    let mut out = vec![0.0; n_elem * np];
    for k in 0..n_elem {
        let c = state.block(k, 0);
        let geo = &mesh.geoms[k];
        let inv_j = 1.0 / geo.j;
        let uq: Vec<f64> = (0..nq)
            .map(|i| (0..np).map(|m| ops.vq[(i, m)] * c[m]).sum())
            .collect();
        let uq2: Vec<f64> = uq.iter().map(|&u| u * u).collect();

        // volume: -(1/3)(D P_q u_q^2 + P_q diag(u_q) D_q u_q)
        let pq_u2: Vec<f64> = (0..np)
            .map(|m| (0..nq).map(|i| ops.pq[(m, i)] * uq2[i]).sum())
            .collect();
        let d_pq_u2: Vec<f64> = (0..np)
            .map(|m| (0..np).map(|j| ops.d[0][(m, j)] * pq_u2[j]).sum())
            .collect();
        let dq_u: Vec<f64> = (0..nq)
            .map(|i| (0..nq).map(|j| ops.dq[0][(i, j)] * uq[j]).sum())
            .collect();
        let u_dq_u: Vec<f64> = (0..nq).map(|i| uq[i] * dq_u[i]).collect();
        let pq_udu: Vec<f64> = (0..np)
            .map(|m| (0..nq).map(|i| ops.pq[(m, i)] * u_dq_u[i]).sum())
            .collect();

        // surface corrections: 1/6 (u_f u_f^+ + (u_f^+)^2) - 1/3 V_f P_q u_q^2
        let vfp_u2: Vec<f64> = (0..nqf)
            .map(|p| (0..np).map(|m| ops.vf[(p, m)] * pq_u2[m]).sum())
            .collect();
        let mut surf = vec![0.0; nqf];
        for p in 0..nqf {
            let uf = uf_all[k * nqf + p];
            let ufp = match mesh.conn[k][p] {
                Conn::Interior { elem, point } => uf_all[elem * nqf + point],
                Conn::Boundary => uf,
            };
            let n = geo.normal[p][0];
            surf[p] = n * ((uf * ufp + ufp * ufp) / 6.0 - vfp_u2[p] / 3.0) * geo.jf_scale[p];
            // the same interface flux the Hadamard form uses
            debug_assert!((burgers_flux(uf, ufp)
                - (uf * uf + uf * ufp + ufp * ufp) / 6.0)
                .abs()
                < 1e-14);
        }
        for m in 0..np {
            let mut s = (d_pq_u2[m] + pq_udu[m]) / 3.0;
            s *= inv_j;
            let mut lift = 0.0;
            for p in 0..nqf {
                lift += ops.lq[(m, p)] * surf[p];
            }
            out[k * np + m] = -(s + inv_j * lift);
        }
    }
    Ok(out)
}
