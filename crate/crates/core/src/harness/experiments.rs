//! Experiment drivers: each reproduces one study as CSV tables plus SVG
//! plots derived from them.

use super::config::{ExperimentId, ExperimentSpec};
use super::svg::{self, Series};
use crate::diagnostics::{
    cell_averages, exact_entropy_wave, exact_vortex, l2_error, sod_exact, sod_initial,
};
use crate::error::{Error, Result};
use crate::mesh::{build_mesh_1d, build_tri_mesh, Mesh};
use crate::physics::{
    euler::EulerState, tadmor_check, Burgers, Euler1D, Euler2D, FluxMode, PhysicsModel,
};
use crate::refelem::{build_operator_set, verify_sbp, OperatorSet, QuadMode, ReferenceElement};
use crate::solver::{
    burgers_split_rhs, run, BoundaryTable, DiagRow, Discretization, RunConfig, SolverState,
    MAX_NF,
};
use crate::util::SplitMix;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// Format a float for CSV output; fixed width keeps reruns byte-identical.
fn f(v: f64) -> String {
    format!("{v:.17e}")
}

struct Csv {
    path: PathBuf,
    text: String,
}

impl Csv {
    fn new(dir: &Path, name: &str, header: &str) -> Csv {
        Csv {
            path: dir.join(name),
            text: format!("{header}\n"),
        }
    }

    fn row(&mut self, fields: &[String]) {
        let _ = writeln!(self.text, "{}", fields.join(","));
    }

    fn finish(self) -> Result<PathBuf> {
        fs::write(&self.path, &self.text)?;
        Ok(self.path)
    }
}

fn write_ledger(dir: &Path, name: &str, rows: &[DiagRow]) -> Result<()> {
    let mut csv = Csv::new(
        dir,
        name,
        "t,total_entropy,delta_U,delta,conservation_residual,min_density,min_pressure",
    );
    for r in rows {
        csv.row(&[
            f(r.t),
            f(r.total_entropy),
            f(r.delta_u),
            f(r.delta),
            f(r.conservation_residual),
            f(r.min_density),
            f(r.min_pressure),
        ]);
    }
    csv.finish()?;
    Ok(())
}

/// Project initial data through an interior-point rule of the same degree,
/// so nodal volume rules never sample exactly on an initial discontinuity.
/// The modal basis is shared, so the coefficients transfer directly.
fn project_interior_1d<P: PhysicsModel>(
    n: usize,
    mesh_k: usize,
    interval: [f64; 2],
    periodic: bool,
    model: &P,
    ic: impl Fn([f64; 2]) -> [f64; MAX_NF],
) -> Result<SolverState> {
    let elem = ReferenceElement::interval(n, QuadMode::GaussNp2)?;
    let ops = build_operator_set(&elem)?;
    let mesh = build_mesh_1d(&elem, mesh_k, interval, periodic)?;
    Ok(SolverState::project(&ops, &mesh, model, 0.0, ic))
}

fn wave_ic(t: f64) -> impl Fn([f64; 2]) -> [f64; MAX_NF] {
    move |x| {
        let mut u = [0.0; MAX_NF];
        exact_entropy_wave(x[0], t).write_conserved(&mut u[..3]);
        u
    }
}

fn pulse1d_ic(x: [f64; 2]) -> [f64; MAX_NF] {
    let rho: f64 = if x[0].abs() < 0.5 { 3.0 } else { 2.0 };
    let mut u = [0.0; MAX_NF];
    EulerState::from_primitive(rho, [0.0, 0.0], rho.powf(1.4), 1).write_conserved(&mut u[..3]);
    u
}

fn pulse2d_ic(x: [f64; 2]) -> [f64; MAX_NF] {
    let rho: f64 = if x[0].abs() < 0.5 && x[1].abs() < 0.5 { 3.0 } else { 2.0 };
    let mut u = [0.0; MAX_NF];
    EulerState::from_primitive(rho, [0.0, 0.0], rho.powf(1.4), 2).write_conserved(&mut u);
    u
}

fn sod_ic(x: [f64; 2]) -> [f64; MAX_NF] {
    let mut u = [0.0; MAX_NF];
    sod_initial(x[0]).write_conserved(&mut u[..3]);
    u
}

fn sine_shock_ic(x: [f64; 2]) -> [f64; MAX_NF] {
    let (rho, vel, p) = if x[0] < -4.0 {
        (3.857143, 2.629369, 10.3333)
    } else {
        (1.0 + 0.2 * (5.0 * x[0]).sin(), 0.0, 1.0)
    };
    let mut u = [0.0; MAX_NF];
    EulerState::from_primitive(rho, [vel, 0.0], p, 1).write_conserved(&mut u[..3]);
    u
}

fn vortex_ic(t: f64) -> impl Fn([f64; 2]) -> [f64; MAX_NF] {
    move |x| {
        let mut u = [0.0; MAX_NF];
        exact_vortex(x[0], x[1], t).write_conserved(&mut u);
        u
    }
}

fn riemann2d_ic(x: [f64; 2]) -> [f64; MAX_NF] {
    // quadrant states on the enlarged periodic domain
    let (rho, u, v, p) = match (x[0] >= 0.0, x[1] >= 0.0) {
        (true, true) => (0.5313, 0.0, 0.0, 0.4),
        (false, true) => (1.0, 0.7276, 0.0, 1.0),
        (false, false) => (0.8, 0.0, 0.0, 1.0),
        (true, false) => (1.0, 0.0, 0.7276, 1.0),
    };
    let mut out = [0.0; MAX_NF];
    EulerState::from_primitive(rho, [u, v], p, 2).write_conserved(&mut out);
    out
}

/// Smooth data of the projection-accuracy study.
fn projection_data_1d(x: f64) -> [f64; MAX_NF] {
    let rho = 2.0 + (x / 2.0).exp() * (std::f64::consts::PI * x).sin();
    let m = (std::f64::consts::PI * x).sin();
    let e = 2.0 + 0.5 * m * m / rho;
    [rho, m, e, 0.0]
}

fn projection_data_2d(x: f64, y: f64) -> [f64; MAX_NF] {
    let pi = std::f64::consts::PI;
    let rho = 2.0 + ((x + y) / 2.0).exp() * (pi * x).sin() * (pi * y).sin();
    let m = (pi * x).sin() * (pi * y).sin();
    let e = 2.0 + 0.5 * (m * m + m * m) / rho;
    [rho, m, m, e]
}

struct Setup1d {
    ops: OperatorSet,
    mesh: Mesh,
}

fn setup_1d(n: usize, quad: QuadMode, k: usize, interval: [f64; 2], periodic: bool) -> Result<Setup1d> {
    let elem = ReferenceElement::interval(n, quad)?;
    let ops = build_operator_set(&elem)?;
    let mesh = build_mesh_1d(&elem, k, interval, periodic)?;
    Ok(Setup1d { ops, mesh })
}

fn setup_tri(n: usize, kx: usize, ky: usize, bbox: [[f64; 2]; 2], periodic: [bool; 2]) -> Result<Setup1d> {
    let elem = ReferenceElement::triangle(n)?;
    let ops = build_operator_set(&elem)?;
    let mesh = build_tri_mesh(&elem, kx, ky, bbox, periodic)?;
    Ok(Setup1d { ops, mesh })
}

fn run_config(spec: &ExperimentSpec, n: usize, quad: QuadMode, cfl: f64) -> RunConfig {
    RunConfig {
        n,
        quad,
        cfl,
        final_time: spec.t_final,
        flux_mode: spec.flux,
        log_eps: spec.eps_log,
        output_every: spec.output_every,
    }
}

/// Dispatch an experiment; artifacts land in `<out>/<experiment>/`.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<()> {
    let dir = spec.out_dir.join(spec.id.name());
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("config.echo"), spec.canonical())?;
    let result = match spec.id {
        ExperimentId::OpsCheck => ops_check(spec, &dir),
        ExperimentId::FluxCheck => flux_check(spec, &dir),
        ExperimentId::EntropyWave => entropy_wave(spec, &dir),
        ExperimentId::Pulse1d => pulse_1d(spec, &dir),
        ExperimentId::Sod => sod(spec, &dir),
        ExperimentId::SineShock => sine_shock(spec, &dir),
        ExperimentId::Pulse2d => pulse_2d(spec, &dir),
        ExperimentId::Vortex => vortex(spec, &dir),
        ExperimentId::Riemann2d => riemann_2d(spec, &dir),
        ExperimentId::ProjectionStudy => projection_study(spec, &dir),
        ExperimentId::BurgersEquivalence => burgers_equivalence(spec, &dir),
    };
    let status = match &result {
        Ok(()) => "completed".to_string(),
        Err(e) => format!("failed: {e}"),
    };
    fs::write(dir.join("run_status.txt"), format!("{status}\n"))?;
    result
}

fn ops_check(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let mut csv = Csv::new(dir, "residuals.csv", "element,n,quad,identity,residual");
    let mut worst = 0.0f64;
    let mut cases: Vec<(ReferenceElement, String)> = Vec::new();
    for n in 1..=5 {
        for quad in [QuadMode::Gll, QuadMode::GaussNp1, QuadMode::GaussNp2] {
            cases.push((ReferenceElement::interval(n, quad)?, quad.label().into()));
        }
    }
    for n in 1..=4 {
        cases.push((ReferenceElement::triangle(n)?, "tri2n".into()));
    }
    for (elem, quad) in &cases {
        let ops = build_operator_set(elem)?;
        let report = verify_sbp(&ops);
        let shape = match elem.element_type {
            crate::refelem::ElementType::Interval => "interval",
            crate::refelem::ElementType::Triangle => "triangle",
        };
        for (name, value) in report.rows() {
            csv.row(&[
                shape.into(),
                elem.n.to_string(),
                quad.clone(),
                name.into(),
                f(value),
            ]);
            worst = worst.max(value);
        }
        if spec.dump {
            dump_operators(&ops, dir, shape, elem.n, quad)?;
        }
    }
    csv.finish()?;
    if worst >= 1e-12 {
        return Err(Error::OracleFailure(format!(
            "operator identity residual {worst:.3e} exceeds 1e-12"
        )));
    }
    Ok(())
}

fn dump_operators(
    ops: &OperatorSet,
    dir: &Path,
    shape: &str,
    n: usize,
    quad: &str,
) -> Result<()> {
    let sub = dir.join(format!("dump_{shape}_n{n}_{quad}"));
    fs::create_dir_all(&sub)?;
    let write_mat = |name: &str, m: &nalgebra::DMatrix<f64>| -> Result<()> {
        let mut text = String::new();
        for r in 0..m.nrows() {
            let row: Vec<String> = (0..m.ncols()).map(|c| f(m[(r, c)])).collect();
            let _ = writeln!(text, "{}", row.join(","));
        }
        fs::write(sub.join(format!("{name}.csv")), text)?;
        Ok(())
    };
    write_mat("vq", &ops.vq)?;
    write_mat("vf", &ops.vf)?;
    write_mat("m", &ops.m)?;
    write_mat("pq", &ops.pq)?;
    write_mat("lq", &ops.lq)?;
    for (i, d) in ops.d.iter().enumerate() {
        write_mat(&format!("d{i}"), d)?;
    }
    for (i, d) in ops.dq.iter().enumerate() {
        write_mat(&format!("dq{i}"), d)?;
    }
    for (i, d) in ops.dn.iter().enumerate() {
        write_mat(&format!("dn{i}"), d)?;
    }
    for (i, d) in ops.qn.iter().enumerate() {
        write_mat(&format!("qn{i}"), d)?;
    }
    Ok(())
}

fn flux_check(_spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let mut csv = Csv::new(dir, "certificates.csv", "model,check,trials,value,threshold");
    let mut fail = None;
    let record = |csv: &mut Csv, model: &str, check: &str, trials: usize, value: f64, thr: f64| {
        csv.row(&[
            model.into(),
            check.into(),
            trials.to_string(),
            f(value),
            f(thr),
        ]);
        if value >= thr {
            return Some(format!("{model}/{check}: {value:.3e} >= {thr:.0e}"));
        }
        None
    };
    let burgers = Burgers;
    let e1 = Euler1D::default();
    let e2 = Euler2D::default();
    fail = fail.or(record(&mut csv, "burgers", "tadmor", 10_000, tadmor_check(&burgers, 10_000, 1), 1e-13));
    fail = fail.or(record(&mut csv, "euler1d", "tadmor", 1_000, tadmor_check(&e1, 1_000, 2), 1e-11));
    fail = fail.or(record(&mut csv, "euler2d", "tadmor", 1_000, tadmor_check(&e2, 1_000, 3), 1e-11));

    // round trips and gradient checks
    let mut rng = SplitMix::new(17);
    let mut worst_rt = 0.0f64;
    let mut worst_fd = 0.0f64;
    let mut u = [0.0f64; 4];
    let mut v = [0.0f64; 4];
    let mut back = [0.0f64; 4];
    for _ in 0..1000 {
        e1.sample_admissible(&mut rng, &mut u[..3]);
        e1.entropy_vars(&u[..3], &mut v[..3]);
        e1.conservative_from_entropy(&v[..3], &mut back[..3])?;
        for c in 0..3 {
            worst_rt = worst_rt.max((back[c] - u[c]).abs() / (1.0 + u[c].abs()));
        }
        e2.sample_admissible(&mut rng, &mut u);
        e2.entropy_vars(&u, &mut v);
        e2.conservative_from_entropy(&v, &mut back)?;
        for c in 0..4 {
            worst_rt = worst_rt.max((back[c] - u[c]).abs() / (1.0 + u[c].abs()));
        }
    }
    for _ in 0..100 {
        e1.sample_admissible(&mut rng, &mut u[..3]);
        e1.entropy_vars(&u[..3], &mut v[..3]);
        for c in 0..3 {
            let h = 1e-7 * (1.0 + u[c].abs());
            let mut up = [u[0], u[1], u[2]];
            let mut um = up;
            up[c] += h;
            um[c] -= h;
            let fd = (e1.entropy(&up) - e1.entropy(&um)) / (2.0 * h);
            worst_fd = worst_fd.max((fd - v[c]).abs() / (1.0 + v[c].abs()));
        }
    }
    fail = fail.or(record(&mut csv, "euler", "round_trip", 2000, worst_rt, 1e-10));
    fail = fail.or(record(&mut csv, "euler1d", "fd_gradient", 300, worst_fd, 1e-6));
    csv.finish()?;
    match fail {
        Some(msg) => Err(Error::OracleFailure(msg)),
        None => Ok(()),
    }
}

fn entropy_wave(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let mut csv = Csv::new(dir, "errors.csv", "N,quadrature,flux,h,L2_error,rate");
    let mut all_series = Vec::new();
    for &quad in &spec.quads {
        for &n in &spec.n_values {
            let model = Euler1D::with_log_eps(spec.eps_log);
            let mut pts = Vec::new();
            for &k in &spec.k_values {
                let s = setup_1d(n, quad, k, [-1.0, 1.0], true)?;
                let disc = Discretization::new(
                    &s.ops,
                    &s.mesh,
                    &model,
                    spec.flux,
                    BoundaryTable::default(),
                );
                let state = SolverState::project(&s.ops, &s.mesh, &model, 0.0, wave_ic(0.0));
                let cfg = run_config(spec, n, quad, spec.cfl_values[0]);
                let out = run(&disc, state, &cfg);
                let final_state = out.result?;
                let err = l2_error(&s.ops, &s.mesh, &model, &final_state, wave_ic(spec.t_final))?;
                let h = 2.0 / k as f64;
                let rate = pts
                    .last()
                    .map(|&(hp, ep): &(f64, f64)| ((ep / err) as f64).ln() / (hp / h).ln())
                    .unwrap_or(f64::NAN);
                csv.row(&[
                    n.to_string(),
                    quad.label().into(),
                    spec.flux.label().into(),
                    f(h),
                    f(err),
                    if rate.is_nan() { String::new() } else { f(rate) },
                ]);
                pts.push((h, err));
                // keep the ledger of the finest run
                if Some(&k) == spec.k_values.last() {
                    write_ledger(
                        dir,
                        &format!("entropy_n{n}_{}.csv", quad.label()),
                        &out.rows,
                    )?;
                }
            }
            all_series.push(Series {
                label: format!("N={n} {}", quad.label()),
                points: pts,
                annotate_slope: true,
                markers: true,
            });
        }
    }
    let path = csv.finish()?;
    let _ = path;
    let svg_text = svg::plot(
        "entropy wave: L2 error vs h",
        "h",
        "L2 error",
        true,
        true,
        &all_series,
    )?;
    fs::write(dir.join("convergence.svg"), svg_text)?;
    Ok(())
}

fn pulse_1d(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let n = *spec.n_values.first().unwrap();
    let k = *spec.k_values.first().unwrap();
    let quad = spec.quads[0];
    let model = Euler1D::with_log_eps(spec.eps_log);

    // CFL sweep for the fully discrete entropy drift
    let mut conv = Csv::new(dir, "du_convergence.csv", "cfl,dt,dU_final,delta_max");
    let mut series_t = Vec::new();
    let mut pts = Vec::new();
    for &cfl in &spec.cfl_values {
        let s = setup_1d(n, quad, k, [-1.0, 1.0], true)?;
        let disc = Discretization::new(&s.ops, &s.mesh, &model, spec.flux, BoundaryTable::default());
        let state = SolverState::project(&s.ops, &s.mesh, &model, 0.0, pulse1d_ic);
        let cfg = run_config(spec, n, quad, cfl);
        let out = run(&disc, state, &cfg);
        out.result?;
        let du = out.rows.last().map(|r| r.delta_u).unwrap_or(f64::NAN);
        let dmax = out.rows.iter().fold(0.0f64, |a, r| a.max(r.delta));
        let dt = cfg.dt(s.mesh.h_min);
        conv.row(&[f(cfl), f(dt), f(du), f(dmax)]);
        pts.push((dt, du));
        write_ledger(dir, &format!("entropy_cfl{cfl}.csv"), &out.rows)?;
        series_t.push(Series {
            label: format!("CFL {cfl}"),
            points: out.rows.iter().map(|r| (r.t, r.delta_u.max(1e-18))).collect(),
            annotate_slope: false,
            markers: false,
        });
    }
    conv.finish()?;

    // log-mean tolerance sweep of the semi-discrete residual
    let mut esweep = Csv::new(dir, "eps_sweep.csv", "eps,delta_max");
    for eps in [1e-2, 1e-3, 1e-4] {
        let model = Euler1D::with_log_eps(eps);
        let s = setup_1d(n, quad, k, [-1.0, 1.0], true)?;
        let disc = Discretization::new(
            &s.ops,
            &s.mesh,
            &model,
            FluxMode::EntropyConservative,
            BoundaryTable::default(),
        );
        let state = SolverState::project(&s.ops, &s.mesh, &model, 0.0, pulse1d_ic);
        let mut cfg = run_config(spec, n, quad, 0.5);
        cfg.final_time = 1.0;
        cfg.log_eps = eps;
        cfg.output_every = 1;
        let out = run(&disc, state, &cfg);
        out.result?;
        let dmax = out.rows.iter().fold(0.0f64, |a, r| a.max(r.delta));
        esweep.row(&[f(eps), f(dmax)]);
    }
    esweep.finish()?;

    fs::write(
        dir.join("du_timeseries.svg"),
        svg::plot("pulse: |U(t) - U(0)|", "t", "dU", false, true, &series_t)?,
    )?;
    fs::write(
        dir.join("du_convergence.svg"),
        svg::plot(
            "pulse: dU(T) vs dt",
            "dt",
            "dU(T)",
            true,
            true,
            &[Series {
                label: "dU(T)".into(),
                points: pts,
                annotate_slope: true,
                markers: true,
            }],
        )?,
    )?;
    Ok(())
}

fn snapshot_1d(
    dir: &Path,
    name: &str,
    ops: &OperatorSet,
    mesh: &Mesh,
    state: &SolverState,
    exact: Option<&dyn Fn(f64) -> EulerState>,
) -> Result<()> {
    let avgs = cell_averages(ops, mesh, state);
    let mut csv = Csv::new(
        dir,
        name,
        "x,rho_avg,momentum_avg,energy_avg,pressure_avg,rho_exact,pressure_exact",
    );
    for (k, avg) in avgs.iter().enumerate() {
        let xc = 0.5 * (mesh.verts[k][0][0] + mesh.verts[k][1][0]);
        let st = EulerState::from_conserved(&[avg[0], avg[1], avg[2]], 1);
        let (re, pe) = match exact {
            Some(fun) => {
                let e = fun(xc);
                (e.rho, e.pressure())
            }
            None => (f64::NAN, f64::NAN),
        };
        csv.row(&[f(xc), f(avg[0]), f(avg[1]), f(avg[2]), f(st.pressure()), f(re), f(pe)]);
    }
    csv.finish()?;

    // pointwise samples resolve the in-cell oscillations
    let mut pcsv = Csv::new(dir, &format!("points_{name}"), "x,rho,pressure");
    for k in 0..mesh.n_elements() {
        for (i, &pt) in ops.elem.volume.points.iter().enumerate() {
            let x = mesh.geoms[k].map(pt)[0];
            let mut u = [0.0; 3];
            for (c, uc) in u.iter_mut().enumerate() {
                let coeff = state.block(k, c);
                *uc = (0..ops.np()).map(|m| ops.vq[(i, m)] * coeff[m]).sum();
            }
            let st = EulerState::from_conserved(&u, 1);
            pcsv.row(&[f(x), f(st.rho), f(st.pressure())]);
        }
    }
    pcsv.finish()?;
    Ok(())
}

fn sod(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let n = *spec.n_values.first().unwrap();
    let k = *spec.k_values.first().unwrap();
    let quad = spec.quads[0];
    let model = Euler1D::with_log_eps(spec.eps_log);
    let s = setup_1d(n, quad, k, [-0.5, 0.5], false)?;
    let bc = BoundaryTable::from_fn(&s.mesh, 3, sod_ic);
    let disc = Discretization::new(&s.ops, &s.mesh, &model, spec.flux, bc);
    let state = project_interior_1d(n, k, [-0.5, 0.5], false, &model, sod_ic)?;
    let cfg = run_config(spec, n, quad, spec.cfl_values[0]);
    fs::write(dir.join("mesh.txt"), format!("{}\n", s.mesh.summary()))?;
    let out = run(&disc, state, &cfg);
    write_ledger(dir, "entropy.csv", &out.rows)?;
    let final_state = out.result?;
    let exact = |x: f64| sod_exact(x, spec.t_final).expect("sod oracle");
    snapshot_1d(dir, "snapshot_final.csv", &s.ops, &s.mesh, &final_state, Some(&exact))?;

    // cell-average L1 error against the exact solution
    let avgs = cell_averages(&s.ops, &s.mesh, &final_state);
    let mut l1 = 0.0;
    for (kk, avg) in avgs.iter().enumerate() {
        let xc = 0.5 * (s.mesh.verts[kk][0][0] + s.mesh.verts[kk][1][0]);
        let e = sod_exact(xc, spec.t_final)?;
        let mut ex = [0.0; 3];
        e.write_conserved(&mut ex);
        for c in 0..3 {
            l1 += (avg[c] - ex[c]).abs() * 2.0 * s.mesh.geoms[kk].j;
        }
    }
    let mut csv = Csv::new(dir, "l1.csv", "t,l1_cell_average_error");
    csv.row(&[f(spec.t_final), f(l1)]);
    csv.finish()?;

    // density snapshot plot with cell averages and the exact overlay
    let text = fs::read_to_string(dir.join("snapshot_final.csv"))?;
    let (names, cols) = svg::read_csv_columns(&text)?;
    let x = svg::column(&names, &cols, "x")?;
    let rho = svg::column(&names, &cols, "rho_avg")?;
    let rho_ex = svg::column(&names, &cols, "rho_exact")?;
    let series = vec![
        Series {
            label: "exact".into(),
            points: x.iter().copied().zip(rho_ex.iter().copied()).collect(),
            annotate_slope: false,
            markers: false,
        },
        Series {
            label: "cell averages".into(),
            points: x.iter().copied().zip(rho.iter().copied()).collect(),
            annotate_slope: false,
            markers: true,
        },
    ];
    fs::write(
        dir.join("snapshot.svg"),
        svg::plot("Sod density at T", "x", "rho", false, false, &series)?,
    )?;
    Ok(())
}

fn sine_shock(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let n = *spec.n_values.first().unwrap();
    let k = *spec.k_values.first().unwrap();
    let model = Euler1D::with_log_eps(spec.eps_log);
    let mut first_err: Option<Error> = None;
    for &quad in &spec.quads {
        for &cfl in &spec.cfl_values {
            let tag = format!("{}_cfl{}", quad.label(), cfl);
            let s = setup_1d(n, quad, k, [-5.0, 5.0], false)?;
            let bc = BoundaryTable::from_fn(&s.mesh, 3, sine_shock_ic);
            let disc = Discretization::new(&s.ops, &s.mesh, &model, spec.flux, bc);
            let state = project_interior_1d(n, k, [-5.0, 5.0], false, &model, sine_shock_ic)?;
            let cfg = run_config(spec, n, quad, cfl);
            let out = run(&disc, state, &cfg);
            write_ledger(dir, &format!("entropy_{tag}.csv"), &out.rows)?;
            match out.result {
                Ok(final_state) => {
                    snapshot_1d(
                        dir,
                        &format!("snapshot_{tag}.csv"),
                        &s.ops,
                        &s.mesh,
                        &final_state,
                        None,
                    )?;
                }
                Err(e) => {
                    fs::write(
                        dir.join(format!("snapshot_{tag}.BLOWUP")),
                        format!("{e}\n"),
                    )?;
                    if first_err.is_none() {
                        first_err = Some(e);
                    }
                }
            }
        }
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn pulse_2d(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let k = *spec.k_values.first().unwrap();
    let model = Euler2D::with_log_eps(spec.eps_log);
    for &n in &spec.n_values {
        let mut conv = Csv::new(
            dir,
            &format!("du_convergence_n{n}.csv"),
            "cfl,dt,dU_final,delta_max",
        );
        let mut pts = Vec::new();
        for &cfl in &spec.cfl_values {
            let s = setup_tri(n, k, k, [[-1.0, -1.0], [1.0, 1.0]], [true, true])?;
            let disc =
                Discretization::new(&s.ops, &s.mesh, &model, spec.flux, BoundaryTable::default());
            let state = SolverState::project(&s.ops, &s.mesh, &model, 0.0, pulse2d_ic);
            let cfg = run_config(spec, n, QuadMode::Tri2N, cfl);
            let out = run(&disc, state, &cfg);
            out.result?;
            let du = out.rows.last().map(|r| r.delta_u).unwrap_or(f64::NAN);
            let dmax = out.rows.iter().fold(0.0f64, |a, r| a.max(r.delta));
            let dt = cfg.dt(s.mesh.h_min);
            conv.row(&[f(cfl), f(dt), f(du), f(dmax)]);
            pts.push((dt, du));
            write_ledger(dir, &format!("entropy_n{n}_cfl{cfl}.csv"), &out.rows)?;
        }
        conv.finish()?;
        fs::write(
            dir.join(format!("du_convergence_n{n}.svg")),
            svg::plot(
                &format!("2D pulse: dU(T) vs dt, N={n}"),
                "dt",
                "dU(T)",
                true,
                true,
                &[Series {
                    label: "dU(T)".into(),
                    points: pts,
                    annotate_slope: true,
                    markers: true,
                }],
            )?,
        )?;
    }
    Ok(())
}

fn vortex(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let model = Euler2D::with_log_eps(spec.eps_log);
    let mut csv = Csv::new(dir, "errors.csv", "N,quadrature,flux,h,L2_error,rate");
    let mut all_series = Vec::new();
    for &n in &spec.n_values {
        let mut pts = Vec::new();
        for &ky in &spec.k_values {
            let kx = 2 * ky;
            let s = setup_tri(n, kx, ky, [[0.0, -5.0], [20.0, 5.0]], [true, true])?;
            let disc =
                Discretization::new(&s.ops, &s.mesh, &model, spec.flux, BoundaryTable::default());
            let state = SolverState::project(&s.ops, &s.mesh, &model, 0.0, vortex_ic(0.0));
            let cfg = run_config(spec, n, QuadMode::Tri2N, spec.cfl_values[0]);
            let out = run(&disc, state, &cfg);
            let final_state = out.result?;
            let err = l2_error(&s.ops, &s.mesh, &model, &final_state, vortex_ic(spec.t_final))?;
            let h = 20.0 / kx as f64;
            let rate = pts
                .last()
                .map(|&(hp, ep): &(f64, f64)| ((ep / err) as f64).ln() / (hp / h).ln())
                .unwrap_or(f64::NAN);
            csv.row(&[
                n.to_string(),
                "tri2n".into(),
                spec.flux.label().into(),
                f(h),
                f(err),
                if rate.is_nan() { String::new() } else { f(rate) },
            ]);
            pts.push((h, err));
            if Some(&ky) == spec.k_values.last() {
                write_ledger(dir, &format!("entropy_n{n}.csv"), &out.rows)?;
            }
        }
        all_series.push(Series {
            label: format!("N={n}"),
            points: pts,
            annotate_slope: true,
            markers: true,
        });
    }
    csv.finish()?;
    fs::write(
        dir.join("convergence.svg"),
        svg::plot("vortex: L2 error vs h", "h", "L2 error", true, true, &all_series)?,
    )?;
    Ok(())
}

fn riemann_2d(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let n = *spec.n_values.first().unwrap();
    let k = *spec.k_values.first().unwrap();
    let model = Euler2D::with_log_eps(spec.eps_log);
    let s = setup_tri(n, k, k, [[-1.0, -1.0], [1.0, 1.0]], [true, true])?;
    let disc = Discretization::new(&s.ops, &s.mesh, &model, spec.flux, BoundaryTable::default());
    let state = SolverState::project(&s.ops, &s.mesh, &model, 0.0, riemann2d_ic);
    let cfg = run_config(spec, n, QuadMode::Tri2N, spec.cfl_values[0]);
    fs::write(dir.join("mesh.txt"), format!("{}\n", s.mesh.summary()))?;
    let out = run(&disc, state, &cfg);
    write_ledger(dir, "entropy.csv", &out.rows)?;
    let final_state = out.result?;
    // cell averages over the physical subdomain
    let avgs = cell_averages(&s.ops, &s.mesh, &final_state);
    let mut csv = Csv::new(dir, "snapshot_final.csv", "x,y,rho_avg,pressure_avg,physical");
    for (kk, avg) in avgs.iter().enumerate() {
        let v = &s.mesh.verts[kk];
        let xc = (v[0][0] + v[1][0] + v[2][0]) / 3.0;
        let yc = (v[0][1] + v[1][1] + v[2][1]) / 3.0;
        let st = EulerState::from_conserved(avg, 2);
        let physical = (xc.abs() <= 0.5 && yc.abs() <= 0.5) as i32;
        csv.row(&[f(xc), f(yc), f(avg[0]), f(st.pressure()), physical.to_string()]);
    }
    csv.finish()?;
    Ok(())
}

fn projection_study(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let mut csv = Csv::new(dir, "errors.csv", "dim,N,h,L2_error,rate");
    let mut series = Vec::new();
    // one dimension: N in the sweep, K halvings on [-1, 1]
    for &n in &spec.n_values {
        let model = Euler1D::default();
        let mut pts = Vec::new();
        for &k in &spec.k_values {
            let s = setup_1d(n, QuadMode::GaussNp2, k, [-1.0, 1.0], true)?;
            let err = projection_error(&s.ops, &s.mesh, &model, |x| projection_data_1d(x[0]))?;
            let h = 2.0 / k as f64;
            let rate = pts
                .last()
                .map(|&(hp, ep): &(f64, f64)| ((ep / err) as f64).ln() / (hp / h).ln())
                .unwrap_or(f64::NAN);
            csv.row(&[
                "1".into(),
                n.to_string(),
                f(h),
                f(err),
                if rate.is_nan() { String::new() } else { f(rate) },
            ]);
            pts.push((h, err));
        }
        series.push(Series {
            label: format!("1D N={n}"),
            points: pts,
            annotate_slope: true,
            markers: true,
        });
    }
    // two dimensions: degrees capped at 4, meshes halved from the sweep
    for &n in spec.n_values.iter().filter(|&&n| n <= 4) {
        let model = Euler2D::default();
        let mut pts = Vec::new();
        for &k in spec.k_values.iter().filter(|&&k| k <= 32) {
            let s = setup_tri(n, k, k, [[-1.0, -1.0], [1.0, 1.0]], [true, true])?;
            let err = projection_error(&s.ops, &s.mesh, &model, |x| {
                projection_data_2d(x[0], x[1])
            })?;
            let h = 2.0 / k as f64;
            let rate = pts
                .last()
                .map(|&(hp, ep): &(f64, f64)| ((ep / err) as f64).ln() / (hp / h).ln())
                .unwrap_or(f64::NAN);
            csv.row(&[
                "2".into(),
                n.to_string(),
                f(h),
                f(err),
                if rate.is_nan() { String::new() } else { f(rate) },
            ]);
            pts.push((h, err));
        }
        series.push(Series {
            label: format!("2D N={n}"),
            points: pts,
            annotate_slope: true,
            markers: true,
        });
    }
    csv.finish()?;
    fs::write(
        dir.join("convergence.svg"),
        svg::plot(
            "entropy projection: ||u - u(Pi_N v)|| vs h",
            "h",
            "L2 error",
            true,
            true,
            &series,
        )?,
    )?;
    Ok(())
}

/// `||u_N - u(Pi_N v(u_N))||` where `u_N` is the quadrature L2 projection
/// of the smooth data, evaluated with a rule two degrees stronger.
pub fn projection_error<P: PhysicsModel>(
    ops: &OperatorSet,
    mesh: &Mesh,
    model: &P,
    data: impl Fn([f64; 2]) -> [f64; MAX_NF],
) -> Result<f64> {
    let nf = P::NF;
    let state = SolverState::project(ops, mesh, model, 0.0, &data);
    let disc = Discretization::new(
        ops,
        mesh,
        model,
        FluxMode::EntropyConservative,
        BoundaryTable::default(),
    );
    let fine = match ops.elem.element_type {
        crate::refelem::ElementType::Interval => {
            crate::refelem::gauss_legendre(ops.elem.volume.len() + 1)?
        }
        crate::refelem::ElementType::Triangle => {
            crate::refelem::triangle_quadrature((2 * ops.elem.n + 2).min(12))?
        }
    };
    let veval = ops.elem.basis_eval(&fine.points);
    let np = ops.np();
    let mut err2 = 0.0;
    for k in 0..mesh.n_elements() {
        let trace = disc.entropy_project(&state, k)?;
        let geo = &mesh.geoms[k];
        // v_h evaluated at the fine points, mapped back through u(v)
        let mut vt = [0.0f64; MAX_NF];
        let mut ut = [0.0f64; MAX_NF];
        for (i, _) in fine.points.iter().enumerate() {
            for (c, v) in vt.iter_mut().enumerate().take(nf) {
                *v = (0..np).map(|m| veval[(i, m)] * trace.vh[c * np + m]).sum();
            }
            model.conservative_from_entropy(&vt[..nf], &mut ut[..nf])?;
            for c in 0..nf {
                let coeff = state.block(k, c);
                let un: f64 = (0..np).map(|m| veval[(i, m)] * coeff[m]).sum();
                let d = un - ut[c];
                err2 += geo.j * fine.weights[i] * d * d;
            }
        }
    }
    Ok(err2.sqrt())
}

fn burgers_equivalence(spec: &ExperimentSpec, dir: &Path) -> Result<()> {
    let mut csv = Csv::new(dir, "equivalence.csv", "N,quad,states,max_abs_diff");
    let mut worst = 0.0f64;
    let mut rng = SplitMix::new(2024);
    for &n in &spec.n_values {
        for &quad in &spec.quads {
            let k = *spec.k_values.first().unwrap();
            let s = setup_1d(n, quad, k, [-1.0, 1.0], true)?;
            let model = Burgers;
            let disc = Discretization::new(
                &s.ops,
                &s.mesh,
                &model,
                FluxMode::EntropyConservative,
                BoundaryTable::default(),
            );
            let mut max_diff = 0.0f64;
            let states = 100;
            for _ in 0..states {
                let mut state = SolverState::zeros(k, s.ops.np(), 1);
                for c in state.coeffs.iter_mut() {
                    *c = rng.next_symmetric();
                }
                let had = disc.rhs(&state)?.dudt;
                let split = burgers_split_rhs(&s.ops, &s.mesh, &state)?;
                for (a, b) in had.iter().zip(&split) {
                    max_diff = max_diff.max((a - b).abs() / (1.0 + b.abs()));
                }
            }
            csv.row(&[
                n.to_string(),
                quad.label().into(),
                states.to_string(),
                f(max_diff),
            ]);
            worst = worst.max(max_diff);
        }
    }
    csv.finish()?;
    if worst >= 1e-12 {
        return Err(Error::OracleFailure(format!(
            "split-form equivalence residual {worst:.3e} exceeds 1e-12"
        )));
    }
    Ok(())
}
