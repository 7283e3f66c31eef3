//! Acceptance suite: every release criterion runs at its stated tolerance
//! and prints one PASS/FAIL line. Run with
//! `cargo test --release --test acceptance -- --nocapture`.

use entropy_dg::diagnostics::{
    self, exact_entropy_wave, exact_vortex, l2_error, ls_rate, sod_exact, sod_initial,
    total_conserved,
};
use entropy_dg::error::Error;
use entropy_dg::harness::experiments::projection_error;
use entropy_dg::mesh::{build_mesh_1d, build_tri_mesh};
use entropy_dg::physics::{
    euler::EulerState, tadmor_check, Burgers, Euler1D, Euler2D, FluxMode, PhysicsModel,
};
use entropy_dg::refelem::{build_operator_set, verify_sbp, QuadMode, ReferenceElement};
use entropy_dg::solver::{run, BoundaryTable, Discretization, RunConfig, SolverState, MAX_NF};

fn verdict(id: &str, pass: bool, details: &str) {
    println!(
        "ACCEPTANCE {id}: {} ({details})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "{id}: {details}");
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

fn config(n: usize, quad: QuadMode, cfl: f64, t: f64, flux: FluxMode, eps: f64) -> RunConfig {
    RunConfig {
        n,
        quad,
        cfl,
        final_time: t,
        flux_mode: flux,
        log_eps: eps,
        output_every: 1,
    }
}

/// Entropy-wave error at one resolution.
fn wave_error(n: usize, quad: QuadMode, flux: FluxMode, k: usize) -> f64 {
    let model = Euler1D::default();
    let elem = ReferenceElement::interval(n, quad).unwrap();
    let ops = build_operator_set(&elem).unwrap();
    let mesh = build_mesh_1d(&elem, k, [-1.0, 1.0], true).unwrap();
    let disc = Discretization::new(&ops, &mesh, &model, flux, BoundaryTable::default());
    let state = SolverState::project(&ops, &mesh, &model, 0.0, wave_ic(0.0));
    let mut cfg = config(n, quad, 0.125, 0.7, flux, 1e-4);
    cfg.output_every = 100_000;
    let out = run(&disc, state, &cfg);
    let final_state = out.result.expect("entropy wave run");
    l2_error(&ops, &mesh, &model, &final_state, wave_ic(0.7)).unwrap()
}

#[test]
fn c01_operator_identities() {
    let mut worst = 0.0f64;
    let mut what = String::new();
    for n in 1..=5 {
        for quad in [QuadMode::Gll, QuadMode::GaussNp1, QuadMode::GaussNp2] {
            let elem = ReferenceElement::interval(n, quad).unwrap();
            let ops = build_operator_set(&elem).unwrap();
            let r = verify_sbp(&ops).max();
            if r > worst {
                worst = r;
                what = format!("interval N={n} {}", quad.label());
            }
        }
    }
    for n in 1..=4 {
        let elem = ReferenceElement::triangle(n).unwrap();
        let ops = build_operator_set(&elem).unwrap();
        let r = verify_sbp(&ops).max();
        if r > worst {
            worst = r;
            what = format!("triangle N={n}");
        }
    }
    verdict(
        "1 operator identities",
        worst < 1e-12,
        &format!("max residual {worst:.3e} at {what}"),
    );
}

#[test]
fn c02_flux_certificates() {
    let burgers = tadmor_check(&Burgers, 10_000, 1);
    let e1 = tadmor_check(&Euler1D::default(), 1_000, 2);
    let e2 = tadmor_check(&Euler2D::default(), 1_000, 3);

    let model1 = Euler1D::default();
    let model2 = Euler2D::default();
    let mut rng = entropy_dg::physics::SplitMix::new(99);
    let mut round_trip = 0.0f64;
    let mut fd_grad = 0.0f64;
    let mut symmetry = 0.0f64;
    let mut consistency = 0.0f64;
    let (mut u, mut v, mut back) = ([0.0f64; 4], [0.0f64; 4], [0.0f64; 4]);
    let mut fs = [0.0f64; 8];
    let mut fs2 = [0.0f64; 8];
    let mut exact = [0.0f64; 4];
    for _ in 0..1000 {
        model1.sample_admissible(&mut rng, &mut u[..3]);
        model1.entropy_vars(&u[..3], &mut v[..3]);
        model1.conservative_from_entropy(&v[..3], &mut back[..3]).unwrap();
        for c in 0..3 {
            round_trip = round_trip.max((back[c] - u[c]).abs() / (1.0 + u[c].abs()));
        }
        model2.sample_admissible(&mut rng, &mut u);
        model2.entropy_vars(&u, &mut v);
        model2.conservative_from_entropy(&v, &mut back).unwrap();
        for c in 0..4 {
            round_trip = round_trip.max((back[c] - u[c]).abs() / (1.0 + u[c].abs()));
        }
        // symmetry and consistency to round-off
        let mut ur = [0.0f64; 4];
        model2.sample_admissible(&mut rng, &mut ur);
        model2.ec_flux(&u, &ur, &mut fs);
        model2.ec_flux(&ur, &u, &mut fs2);
        for c in 0..8 {
            symmetry = symmetry.max((fs[c] - fs2[c]).abs());
        }
        model2.ec_flux(&u, &u, &mut fs);
        for dir in 0..2 {
            model2.flux(&u, dir, &mut exact);
            for c in 0..4 {
                consistency = consistency
                    .max((fs[dir * 4 + c] - exact[c]).abs() / (1.0 + exact[c].abs()));
            }
        }
    }
    for _ in 0..100 {
        model1.sample_admissible(&mut rng, &mut u[..3]);
        model1.entropy_vars(&u[..3], &mut v[..3]);
        for c in 0..3 {
            let h = 1e-7 * (1.0 + u[c].abs());
            let mut up = [u[0], u[1], u[2]];
            let mut um = up;
            up[c] += h;
            um[c] -= h;
            let fd = (model1.entropy(&up) - model1.entropy(&um)) / (2.0 * h);
            fd_grad = fd_grad.max((fd - v[c]).abs() / (1.0 + v[c].abs()));
        }
    }
    let pass = burgers < 1e-13
        && e1 < 1e-11
        && e2 < 1e-11
        && round_trip < 1e-10
        && fd_grad < 1e-6
        && symmetry == 0.0
        && consistency < 1e-12;
    verdict(
        "2 flux certificates",
        pass,
        &format!(
            "tadmor burgers {burgers:.2e} / euler1d {e1:.2e} / euler2d {e2:.2e}, round trip {round_trip:.2e}, fd gradient {fd_grad:.2e}, symmetry {symmetry:.1e}, consistency {consistency:.2e}"
        ),
    );
}

#[test]
fn c03_split_form_equivalence() {
    let mut rng = entropy_dg::physics::SplitMix::new(2024);
    let mut worst = 0.0f64;
    for n in 1..=5 {
        for quad in [QuadMode::Gll, QuadMode::GaussNp1] {
            let elem = ReferenceElement::interval(n, quad).unwrap();
            let ops = build_operator_set(&elem).unwrap();
            let mesh = build_mesh_1d(&elem, 8, [-1.0, 1.0], true).unwrap();
            let model = Burgers;
            let disc = Discretization::new(
                &ops,
                &mesh,
                &model,
                FluxMode::EntropyConservative,
                BoundaryTable::default(),
            );
            for _ in 0..100 {
                let mut state = SolverState::zeros(8, ops.np(), 1);
                for c in state.coeffs.iter_mut() {
                    *c = rng.next_symmetric();
                }
                let had = disc.rhs(&state).unwrap().dudt;
                let split = entropy_dg::solver::burgers_split_rhs(&ops, &mesh, &state).unwrap();
                for (a, b) in had.iter().zip(&split) {
                    worst = worst.max((a - b).abs() / (1.0 + b.abs()));
                }
            }
        }
    }
    verdict(
        "3 split-form equivalence",
        worst < 1e-12,
        &format!("max relative difference {worst:.3e} over 100 states, N<=5, GLL and Gauss(N+1)"),
    );
}

fn pulse_delta_max(eps: f64) -> f64 {
    let model = Euler1D::with_log_eps(eps);
    let elem = ReferenceElement::interval(4, QuadMode::GaussNp2).unwrap();
    let ops = build_operator_set(&elem).unwrap();
    let mesh = build_mesh_1d(&elem, 16, [-1.0, 1.0], true).unwrap();
    let disc = Discretization::new(
        &ops,
        &mesh,
        &model,
        FluxMode::EntropyConservative,
        BoundaryTable::default(),
    );
    let state = SolverState::project(&ops, &mesh, &model, 0.0, pulse1d_ic);
    let cfg = config(4, QuadMode::GaussNp2, 0.5, 1.0, FluxMode::EntropyConservative, eps);
    let out = run(&disc, state, &cfg);
    out.result.expect("pulse run");
    out.rows.iter().fold(0.0f64, |a, r| a.max(r.delta))
}

#[test]
fn c04_semi_discrete_entropy_conservation() {
    let d4 = pulse_delta_max(1e-4);
    let d3 = pulse_delta_max(1e-3);
    let d2 = pulse_delta_max(1e-2);
    let decades = (d2 / d4).log10();
    let pass = d4 <= 1e-13 && decades >= 3.0;
    verdict(
        "4 semi-discrete entropy conservation",
        pass,
        &format!(
            "delta_max = {d4:.3e} at eps 1e-4 (<= 1e-13), sweep 1e-2/1e-3/1e-4 -> {d2:.2e}/{d3:.2e}/{d4:.2e} ({decades:.1} decades)"
        ),
    );
}

fn pulse_du(n: usize, cfl: f64, dim2: bool) -> (f64, f64) {
    if !dim2 {
        let model = Euler1D::default();
        let elem = ReferenceElement::interval(n, QuadMode::GaussNp2).unwrap();
        let ops = build_operator_set(&elem).unwrap();
        let mesh = build_mesh_1d(&elem, 16, [-1.0, 1.0], true).unwrap();
        let disc = Discretization::new(
            &ops,
            &mesh,
            &model,
            FluxMode::EntropyConservative,
            BoundaryTable::default(),
        );
        let state = SolverState::project(&ops, &mesh, &model, 0.0, pulse1d_ic);
        let mut cfg = config(n, QuadMode::GaussNp2, cfl, 2.0, FluxMode::EntropyConservative, 1e-4);
        cfg.output_every = 100_000;
        let out = run(&disc, state, &cfg);
        out.result.expect("1d pulse");
        (cfg.dt(mesh.h_min), out.rows.last().unwrap().delta_u)
    } else {
        let model = Euler2D::default();
        let elem = ReferenceElement::triangle(n).unwrap();
        let ops = build_operator_set(&elem).unwrap();
        let mesh = build_tri_mesh(&elem, 8, 8, [[-1.0, -1.0], [1.0, 1.0]], [true, true]).unwrap();
        let disc = Discretization::new(
            &ops,
            &mesh,
            &model,
            FluxMode::EntropyConservative,
            BoundaryTable::default(),
        );
        let state = SolverState::project(&ops, &mesh, &model, 0.0, pulse2d_ic);
        let mut cfg = config(n, QuadMode::Tri2N, cfl, 2.0, FluxMode::EntropyConservative, 1e-4);
        cfg.output_every = 100_000;
        let out = run(&disc, state, &cfg);
        out.result.expect("2d pulse");
        (cfg.dt(mesh.h_min), out.rows.last().unwrap().delta_u)
    }
}

#[test]
fn c05_fully_discrete_entropy_drift() {
    // one dimension: monotone decrease under CFL halving, order >= 3.5
    // (measured over the three finest steps)
    let mut pts1 = Vec::new();
    for cfl in [0.5, 0.25, 0.125, 0.0625] {
        pts1.push(pulse_du(4, cfl, false));
    }
    let monotone = pts1.windows(2).all(|w| w[1].1 < w[0].1);
    let order1 = ls_rate(&pts1[1..]);

    // two dimensions: order 4.0 +/- 0.5 for N = 3 and 4, least squares over
    // the full sweep (|dU| partially cancels at the coarsest step, and the
    // change in entropy has a jump feature near t = 1.86 that makes
    // individual intervals wobble). N = 3 measures ~4.8 in every window:
    // the same above-stepper-order superconvergence the 1D study shows at
    // 4.93, which the two-sided band around 4.0 does not admit. Asserted
    // as stated; the measured value is in the output.
    let mut orders2 = Vec::new();
    for n in [3usize, 4] {
        let mut pts = Vec::new();
        for cfl in [0.5, 0.25, 0.125, 0.0625] {
            pts.push(pulse_du(n, cfl, true));
        }
        orders2.push(ls_rate(&pts));
    }
    let pass = monotone
        && order1 >= 3.5
        && orders2.iter().all(|&o| (o - 4.0).abs() <= 0.5);
    verdict(
        "5 fully discrete entropy drift",
        pass,
        &format!(
            "1D dU monotone {monotone}, order {order1:.2} (>= 3.5); 2D orders N=3..4 {orders2:?} (4.0 +/- 0.5)"
        ),
    );
}

#[test]
fn c06_entropy_wave_rates() {
    // per-degree mesh windows keep the measurement asymptotic and above
    // the f64 round-off floor
    let gll_windows: [&[usize]; 5] = [
        &[64, 128, 256],
        &[64, 128, 256],
        &[32, 64, 128],
        &[32, 64, 128],
        &[16, 32, 64],
    ];
    let gq_windows: [&[usize]; 5] = [
        &[64, 128, 256],
        &[128, 256, 512],
        &[32, 64, 128],
        &[64, 128, 256],
        &[16, 32, 64],
    ];
    let gll_targets = [1.8887, 3.0164, 4.0241, 5.0650, 6.1095];
    let gq_targets = [1.9950, 3.0018, 3.9980, 5.0419, 6.0034];
    let mut details = String::new();
    let mut pass = true;
    for (quad, windows, targets) in [
        (QuadMode::Gll, &gll_windows, &gll_targets),
        (QuadMode::GaussNp2, &gq_windows, &gq_targets),
    ] {
        for n in 1..=5usize {
            let pts: Vec<(f64, f64)> = windows[n - 1]
                .iter()
                .map(|&k| (2.0 / k as f64, wave_error(n, quad, FluxMode::EntropyStableLf, k)))
                .collect();
            let rate = ls_rate(&pts);
            let target = targets[n - 1];
            let ok = (rate - target).abs() <= 0.25;
            pass &= ok;
            details.push_str(&format!(
                "{} N={n}: {rate:.2} vs {target} {}; ",
                quad.label(),
                if ok { "ok" } else { "OUT" }
            ));
        }
    }
    // entropy-conservative odd-degree degradation: N = 3 stays at reduced
    // order instead of recovering N+1
    let pts: Vec<(f64, f64)> = [32usize, 64, 128]
        .iter()
        .map(|&k| {
            (
                2.0 / k as f64,
                wave_error(3, QuadMode::GaussNp2, FluxMode::EntropyConservative, k),
            )
        })
        .collect();
    let ec_rate = ls_rate(&pts);
    let ec_ok = ec_rate <= 3.6;
    pass &= ec_ok;
    details.push_str(&format!("EC N=3: {ec_rate:.2} (<= 3.6)"));
    verdict("6 entropy-wave convergence rates", pass, &details);
}

#[test]
fn c06_entropy_wave_spot_value() {
    // pinned reference datum for N=2, GQ-(N+2), LF at h = 0.03125; the
    // implemented scheme (verified against every operator and entropy
    // identity, and matching the pinned fully-discrete entropy-drift data
    // to four digits) measures 2.04x the reference, just outside the
    // two-sided factor-of-two band; the alternative penalty-jump variant
    // measures 0.31x, also outside. Asserted as stated.
    let err = wave_error(2, QuadMode::GaussNp2, FluxMode::EntropyStableLf, 64);
    let reference = 3.55e-5;
    let pass = err >= reference / 2.0 && err <= reference * 2.0;
    verdict(
        "6 entropy-wave spot value",
        pass,
        &format!("L2 error {err:.4e}, band [{:.3e}, {:.3e}]", reference / 2.0, reference * 2.0),
    );
}

#[test]
fn c07_projection_accuracy() {
    let mut pass = true;
    let mut details = String::new();
    // one dimension, N = 1..5
    for n in 1..=5usize {
        let model = Euler1D::default();
        let mut pts = Vec::new();
        for k in [32usize, 64, 128] {
            let elem = ReferenceElement::interval(n, QuadMode::GaussNp2).unwrap();
            let ops = build_operator_set(&elem).unwrap();
            let mesh = build_mesh_1d(&elem, k, [-1.0, 1.0], true).unwrap();
            let err = projection_error(&ops, &mesh, &model, |x| {
                let rho = 2.0 + (x[0] / 2.0).exp() * (std::f64::consts::PI * x[0]).sin();
                let m = (std::f64::consts::PI * x[0]).sin();
                [rho, m, 2.0 + 0.5 * m * m / rho, 0.0]
            })
            .unwrap();
            pts.push((2.0 / k as f64, err));
        }
        let rate = ls_rate(&pts);
        let ok = (rate - (n as f64 + 1.0)).abs() <= 0.3;
        pass &= ok;
        details.push_str(&format!("1D N={n}: {rate:.2}; "));
    }
    // two dimensions, N = 1..4
    for n in 1..=4usize {
        let model = Euler2D::default();
        let mut pts = Vec::new();
        for k in [8usize, 16, 32] {
            let elem = ReferenceElement::triangle(n).unwrap();
            let ops = build_operator_set(&elem).unwrap();
            let mesh =
                build_tri_mesh(&elem, k, k, [[-1.0, -1.0], [1.0, 1.0]], [true, true]).unwrap();
            let err = projection_error(&ops, &mesh, &model, |x| {
                let pi = std::f64::consts::PI;
                let rho = 2.0 + ((x[0] + x[1]) / 2.0).exp() * (pi * x[0]).sin() * (pi * x[1]).sin();
                let m = (pi * x[0]).sin() * (pi * x[1]).sin();
                [rho, m, m, 2.0 + (m * m) / rho]
            })
            .unwrap();
            pts.push((2.0 / k as f64, err));
        }
        let rate = ls_rate(&pts);
        let ok = (rate - (n as f64 + 1.0)).abs() <= 0.3;
        pass &= ok;
        details.push_str(&format!("2D N={n}: {rate:.2}; "));
    }
    verdict("7 projection accuracy", pass, &details);
}

fn vortex_error(n: usize, ky: usize) -> f64 {
    let model = Euler2D::default();
    let elem = ReferenceElement::triangle(n).unwrap();
    let ops = build_operator_set(&elem).unwrap();
    let mesh = build_tri_mesh(&elem, 2 * ky, ky, [[0.0, -5.0], [20.0, 5.0]], [true, true]).unwrap();
    let disc = Discretization::new(
        &ops,
        &mesh,
        &model,
        FluxMode::EntropyStableLf,
        BoundaryTable::default(),
    );
    let ic = |x: [f64; 2]| {
        let mut u = [0.0; MAX_NF];
        exact_vortex(x[0], x[1], 0.0).write_conserved(&mut u);
        u
    };
    let state = SolverState::project(&ops, &mesh, &model, 0.0, ic);
    let mut cfg = config(n, QuadMode::Tri2N, 0.125, 5.0, FluxMode::EntropyStableLf, 1e-4);
    cfg.output_every = 100_000;
    let out = run(&disc, state, &cfg);
    let final_state = out.result.expect("vortex run");
    l2_error(&ops, &mesh, &model, &final_state, |x| {
        let mut u = [0.0; MAX_NF];
        exact_vortex(x[0], x[1], 5.0).write_conserved(&mut u);
        u
    })
    .unwrap()
}

#[test]
fn c08_vortex_convergence() {
    // N = 1 needs one extra refinement before the asymptotic regime
    let windows: [(usize, &[usize], f64); 2] = [(1, &[16, 32, 64], 1.9), (2, &[8, 16, 32], 2.9)];
    let mut pass = true;
    let mut details = String::new();
    for (n, kys, floor) in windows {
        let pts: Vec<(f64, f64)> = kys
            .iter()
            .map(|&ky| (10.0 / ky as f64, vortex_error(n, ky)))
            .collect();
        let rate = ls_rate(&pts);
        let ok = rate >= floor;
        pass &= ok;
        details.push_str(&format!("N={n}: rate {rate:.2} (>= {floor}); "));
    }
    verdict("8 vortex convergence", pass, &details);
}

#[test]
fn c09_sod_shock_tube() {
    let model = Euler1D::default();
    let elem = ReferenceElement::interval(4, QuadMode::GaussNp2).unwrap();
    let ops = build_operator_set(&elem).unwrap();
    let mesh = build_mesh_1d(&elem, 32, [-0.5, 0.5], false).unwrap();
    let bc = BoundaryTable::from_fn(&mesh, 3, sod_ic);

    // Lax-Friedrichs completes with positive density and pressure
    let disc = Discretization::new(&ops, &mesh, &model, FluxMode::EntropyStableLf, bc.clone());
    let state = SolverState::project(&ops, &mesh, &model, 0.0, sod_ic);
    let cfg = config(4, QuadMode::GaussNp2, 0.125, 0.2, FluxMode::EntropyStableLf, 1e-4);
    let out = run(&disc, state, &cfg);
    let min_rho = out.rows.iter().fold(f64::INFINITY, |a, r| a.min(r.min_density));
    let min_p = out.rows.iter().fold(f64::INFINITY, |a, r| a.min(r.min_pressure));
    let final_state = out.result.expect("sod LF run");
    let avgs = diagnostics::cell_averages(&ops, &mesh, &final_state);
    let mut l1 = 0.0;
    for (k, avg) in avgs.iter().enumerate() {
        let xc = 0.5 * (mesh.verts[k][0][0] + mesh.verts[k][1][0]);
        let e = sod_exact(xc, 0.2).unwrap();
        let mut ex = [0.0; 3];
        e.write_conserved(&mut ex);
        for c in 0..3 {
            l1 += (avg[c] - ex[c]).abs() * 2.0 * mesh.geoms[k].j;
        }
    }
    // threshold recorded during development: measured 1.347e-2
    let l1_threshold = 2e-2;

    // the entropy-conservative flux must terminate through the blow-up path
    let disc_ec =
        Discretization::new(&ops, &mesh, &model, FluxMode::EntropyConservative, bc);
    let state = SolverState::project(&ops, &mesh, &model, 0.0, sod_ic);
    let cfg_ec = config(4, QuadMode::GaussNp2, 0.125, 0.2, FluxMode::EntropyConservative, 1e-4);
    let out_ec = run(&disc_ec, state, &cfg_ec);
    let ec_blows_up = matches!(out_ec.result, Err(Error::BlowUp { .. }));

    let pass = min_rho > 0.0 && min_p > 0.0 && l1 < l1_threshold && ec_blows_up;
    verdict(
        "9 Sod shock tube",
        pass,
        &format!(
            "LF: min rho {min_rho:.3}, min p {min_p:.3}, L1 {l1:.3e} (< {l1_threshold:.0e}); EC blow-up {ec_blows_up}"
        ),
    );
}

fn sine_shock_completes(quad: QuadMode, cfl: f64) -> Result<(), f64> {
    let model = Euler1D::default();
    let elem = ReferenceElement::interval(4, quad).unwrap();
    let ops = build_operator_set(&elem).unwrap();
    let mesh = build_mesh_1d(&elem, 40, [-5.0, 5.0], false).unwrap();
    let bc = BoundaryTable::from_fn(&mesh, 3, sine_shock_ic);
    let disc = Discretization::new(&ops, &mesh, &model, FluxMode::EntropyStableLf, bc);
    // project through interior points so no sample sits on the jump
    let state = {
        let ielem = ReferenceElement::interval(4, QuadMode::GaussNp2).unwrap();
        let iops = build_operator_set(&ielem).unwrap();
        let imesh = build_mesh_1d(&ielem, 40, [-5.0, 5.0], false).unwrap();
        SolverState::project(&iops, &imesh, &model, 0.0, sine_shock_ic)
    };
    let mut cfg = config(4, quad, cfl, 1.8, FluxMode::EntropyStableLf, 1e-4);
    cfg.output_every = 100;
    let out = run(&disc, state, &cfg);
    match out.result {
        Ok(_) => Ok(()),
        Err(Error::BlowUp { t, .. }) => Err(t),
        Err(e) => panic!("unexpected error: {e}"),
    }
}

#[test]
fn c09_sine_shock_robustness() {
    // the stated margins: GQ-(N+2) at CFL 0.05 and GLL at CFL 0.125. With
    // the hard no-clipping admissibility policy the projected-state pole is
    // crossed during the startup transient of the x = -4 jump (the same
    // sensitivity the Gauss rules are documented to have), so these margins
    // are not met; the measured completing configuration is reported for
    // reference. Asserted as stated.
    let gq = sine_shock_completes(QuadMode::GaussNp2, 0.05);
    let gll = sine_shock_completes(QuadMode::Gll, 0.125);
    let gll_low = sine_shock_completes(QuadMode::Gll, 0.025);
    let describe = |r: &Result<(), f64>| match r {
        Ok(()) => "completed".to_string(),
        Err(t) => format!("blow-up at t = {t:.3}"),
    };
    let pass = gq.is_ok() && gll.is_ok();
    verdict(
        "9 sine-shock robustness",
        pass,
        &format!(
            "GQ-(N+2)@0.05: {}; GLL@0.125: {}; GLL@0.025 (measured margin): {}",
            describe(&gq),
            describe(&gll),
            describe(&gll_low)
        ),
    );
}

#[test]
fn c09_riemann_2d_smoke() {
    let model = Euler2D::default();
    let elem = ReferenceElement::triangle(3).unwrap();
    let ops = build_operator_set(&elem).unwrap();
    let mesh = build_tri_mesh(&elem, 32, 32, [[-1.0, -1.0], [1.0, 1.0]], [true, true]).unwrap();
    let disc = Discretization::new(
        &ops,
        &mesh,
        &model,
        FluxMode::EntropyStableLf,
        BoundaryTable::default(),
    );
    let ic = |x: [f64; 2]| {
        let (rho, u, v, p) = match (x[0] >= 0.0, x[1] >= 0.0) {
            (true, true) => (0.5313, 0.0, 0.0, 0.4),
            (false, true) => (1.0, 0.7276, 0.0, 1.0),
            (false, false) => (0.8, 0.0, 0.0, 1.0),
            (true, false) => (1.0, 0.0, 0.7276, 1.0),
        };
        let mut out = [0.0; MAX_NF];
        EulerState::from_primitive(rho, [u, v], p, 2).write_conserved(&mut out);
        out
    };
    let state = SolverState::project(&ops, &mesh, &model, 0.0, ic);
    let mut cfg = config(3, QuadMode::Tri2N, 0.0625, 0.25, FluxMode::EntropyStableLf, 1e-4);
    cfg.output_every = 50;
    let out = run(&disc, state, &cfg);
    let min_rho = out.rows.iter().fold(f64::INFINITY, |a, r| a.min(r.min_density));
    let min_p = out.rows.iter().fold(f64::INFINITY, |a, r| a.min(r.min_pressure));
    let ok = out.result.is_ok();
    verdict(
        "9 two-dimensional Riemann smoke",
        ok && min_rho > 0.0 && min_p > 0.0,
        &format!("completed {ok}, min rho {min_rho:.3}, min p {min_p:.3}"),
    );
}

#[test]
fn c10_conservation() {
    // local residuals on representative runs of both dimensions and both
    // flux modes, plus global conserved-variable drift on a periodic run
    let mut worst_local = 0.0f64;

    let model = Euler1D::default();
    let elem = ReferenceElement::interval(4, QuadMode::GaussNp2).unwrap();
    let ops = build_operator_set(&elem).unwrap();
    let mesh = build_mesh_1d(&elem, 16, [-1.0, 1.0], true).unwrap();
    let before;
    let after;
    {
        let disc = Discretization::new(
            &ops,
            &mesh,
            &model,
            FluxMode::EntropyConservative,
            BoundaryTable::default(),
        );
        let state = SolverState::project(&ops, &mesh, &model, 0.0, pulse1d_ic);
        before = total_conserved(&ops, &mesh, &model, &state);
        let cfg = config(4, QuadMode::GaussNp2, 0.5, 2.0, FluxMode::EntropyConservative, 1e-4);
        let out = run(&disc, state, &cfg);
        worst_local = out
            .rows
            .iter()
            .fold(worst_local, |a, r| a.max(r.conservation_residual));
        let final_state = out.result.expect("pulse run");
        after = total_conserved(&ops, &mesh, &model, &final_state);
    }
    let mut drift = 0.0f64;
    for c in 0..3 {
        drift = drift.max((after[c] - before[c]).abs() / (1.0 + before[c].abs()));
    }

    // a Lax-Friedrichs wave run and a 2D pulse stretch the same residual;
    // with interface dissipation the sampled total entropy must also be
    // non-increasing
    let mut lf_monotone = true;
    {
        let disc = Discretization::new(
            &ops,
            &mesh,
            &model,
            FluxMode::EntropyStableLf,
            BoundaryTable::default(),
        );
        let state = SolverState::project(&ops, &mesh, &model, 0.0, wave_ic(0.0));
        let cfg = config(4, QuadMode::GaussNp2, 0.125, 0.35, FluxMode::EntropyStableLf, 1e-4);
        let out = run(&disc, state, &cfg);
        worst_local = out
            .rows
            .iter()
            .fold(worst_local, |a, r| a.max(r.conservation_residual));
        lf_monotone &= out
            .rows
            .windows(2)
            .all(|w| w[1].total_entropy <= w[0].total_entropy + 1e-12);
        out.result.expect("wave run");
    }
    {
        let model2 = Euler2D::default();
        let elem2 = ReferenceElement::triangle(3).unwrap();
        let ops2 = build_operator_set(&elem2).unwrap();
        let mesh2 =
            build_tri_mesh(&elem2, 8, 8, [[-1.0, -1.0], [1.0, 1.0]], [true, true]).unwrap();
        let disc = Discretization::new(
            &ops2,
            &mesh2,
            &model2,
            FluxMode::EntropyStableLf,
            BoundaryTable::default(),
        );
        let state = SolverState::project(&ops2, &mesh2, &model2, 0.0, pulse2d_ic);
        let mut cfg = config(3, QuadMode::Tri2N, 0.25, 0.25, FluxMode::EntropyStableLf, 1e-4);
        cfg.output_every = 5;
        let out = run(&disc, state, &cfg);
        worst_local = out
            .rows
            .iter()
            .fold(worst_local, |a, r| a.max(r.conservation_residual));
        out.result.expect("2d pulse run");
    }

    let pass = worst_local < 1e-12 && drift < 1e-10 && lf_monotone;
    verdict(
        "10 conservation",
        pass,
        &format!("max local residual {worst_local:.3e} (< 1e-12), periodic global drift {drift:.3e} (< 1e-10), LF entropy non-increasing {lf_monotone}"),
    );
}
