//! The seven verification suites.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::config::{ChargeParams, CrossingParams, EjParams, EntropyParams, Params, ThermalMapParams, UnruhParams, ZfParams};
use super::{ExperimentId, Recorder, ScanSpec};
use crate::charge::{self, PartialChargeSpec, RowStatus, ScalarModel, WavePacket};
use crate::chiral::{self, ChiralKernel, TransportedSmearing, Weight};
use crate::crossing::{self, KmsGrid, Rule, StripGrid, TransformRule};
use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::gaussian::{self, Boundary, HarmonicLattice, Region};
use crate::smearing::{Smearing, SmearingFn};
use crate::table::Table;
use crate::wedge::{self, WedgeKernel, WedgeModel};
use crate::zf::{self, Packet, SMatrixModel, ZfOp, ZfSpace, ZfState};

pub fn run_suite(params: &Params, rec: &mut Recorder) -> Result<()> {
    match params {
        Params::ThermalMap(p) => thermal_map(p, rec),
        Params::EjFluct(p) => ej_fluct(p, rec),
        Params::EntropyScan(p) => entropy_scan(p, rec),
        Params::ChargeScaling(p) => charge_scaling(p, rec),
        Params::Unruh(p) => unruh(p, rec),
        Params::Crossing(p) => crossing_suite(p, rec),
        Params::ZfAlgebra(p) => zf_algebra(p, rec),
    }
}

fn scan(id: ExperimentId, table: &str, name: &str, x: &str, y: &str) -> ScanSpec {
    ScanSpec {
        name: name.to_string(),
        csv: format!("{id}_{table}.csv"),
        x: x.to_string(),
        y: y.to_string(),
        y_err: None,
        group: None,
        loglog: false,
    }
}

fn grouped(mut s: ScanSpec, group: &str) -> ScanSpec {
    s.group = Some(group.to_string());
    s
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

const IMAGES: usize = 200;

fn thermal_map(p: &ThermalMapParams, rec: &mut Recorder) -> Result<()> {
    let id = ExperimentId::ThermalMap;
    let mut kernel = Table::new(&["beta", "separation", "thermal", "transported", "rel_err"]);
    for &beta in &p.betas {
        let map = chiral::exp_map(beta, p.interval[0], p.interval[1])?;
        let grid = chiral::isomorphism_grid(&map, p.grid_points);
        rec.check(format!("isomorphism[beta={beta}]"), "isomorphism", chiral::verify_isomorphism(&map, &grid)?);

        let thermal = ChiralKernel::thermal(beta, 1.0)?;
        let vacuum = ChiralKernel::vacuum(1.0)?;
        let u0 = grid[0].0;
        for &(u, v) in grid.iter().filter(|g| g.0 == u0) {
            let th = thermal.at(Complex64::new(u - v, 0.0)).re;
            let tr = map.jacobian(u) * map.jacobian(v) * vacuum.at(Complex64::new(map.x(u) - map.x(v), 0.0)).re;
            kernel.push(vec![beta, v - u, th, tr, rel(th, tr)]);
        }

        let points: Vec<Complex64> = [(0.3, 0.25), (-0.7, 0.6), (1.3, 0.1), (0.05, 0.5)]
            .iter()
            .map(|&(x, y)| Complex64::new(x * beta, y * beta))
            .collect();
        rec.check(format!("kms[beta={beta}]"), "kms", wedge::kms_shift_check(&thermal, beta, &points)?);

        let regulated = ChiralKernel::thermal(beta, 1e-3)?;
        let worst = [0.1, 0.7, 1.9, -2.3]
            .iter()
            .map(|&du| {
                let z = regulated.regulated(du);
                let exact = regulated.at(z);
                (chiral::image_sum(beta, z, IMAGES, true) - exact).norm() / exact.norm()
            })
            .fold(0.0, f64::max);
        rec.check(format!("image_sum[beta={beta}]"), "image_sum", worst);
    }
    rec.table("kernel", kernel);
    rec.scan(grouped(scan(id, "kernel", "kernel_vs_separation", "separation", "thermal"), "beta"));
    rec.scan(grouped(scan(id, "kernel", "defect_vs_separation", "separation", "rel_err"), "beta"));
    rec.unverified(
        "mobius_rotation_law",
        "modular groups of intervals act as Moebius rotations after the exponential map; not reduced to a finite check",
    );
    Ok(())
}

fn ej_fluct(p: &EjParams, rec: &mut Recorder) -> Result<()> {
    let id = ExperimentId::EjFluct;
    let mut t = Table::new(&["geometry", "center", "plateau_halfwidth", "ramp_width", "thermal_var", "transported_vacuum_var", "rel_diff"]);
    let map = chiral::exp_map(p.beta, p.interval[0], p.interval[1])?;
    for (i, g) in p.geometries.iter().enumerate() {
        let f = SmearingFn::new(g.center, g.plateau_halfwidth, g.ramp_width, g.profile)?;
        let r = chiral::ej_compare(&f, p.beta, p.interval[0], p.interval[1])?;
        rec.check(format!("ej[geometry={i}]"), "ej", r.rel_diff);
        t.push(vec![i as f64, g.center, g.plateau_halfwidth, g.ramp_width, r.thermal_var, r.transported_vacuum_var, r.rel_diff]);

        let th = chiral::smeared_current_variance(&f, &ChiralKernel::thermal(p.beta, 1e-12)?)?;
        let h = TransportedSmearing {
            inner: &f,
            map,
            weight: Weight::Current,
        };
        let vac = chiral::smeared_current_variance(&h, &ChiralKernel::vacuum(1e-12)?)?;
        rec.check(format!("current_transport[geometry={i}]"), "current_transport", rel(th, vac));
        rec.measure(format!("current_variance[geometry={i}]"), th);
    }
    rec.table("variances", t);
    rec.scan(scan(id, "variances", "rel_diff_vs_geometry", "geometry", "rel_diff"));
    Ok(())
}

fn entropy_scan(p: &EntropyParams, rec: &mut Recorder) -> Result<()> {
    let id = ExperimentId::EntropyScan;
    let lat = HarmonicLattice::massless(p.n_sites, 1.0, Boundary::Periodic, p.ir_product / p.n_sites as f64)?;

    let vac = gaussian::build_vacuum_state(&lat)?;
    let s = gaussian::interval_entropies(&vac, &p.vacuum_lengths)?;
    let ln_l: Vec<f64> = p.vacuum_lengths.iter().map(|&l| (l as f64).ln()).collect();
    let fit = fit_line(&ln_l, &s, 4)?;
    rec.check("vacuum_log_fit_r2", "vacuum_log_r2", fit.r_squared);
    rec.measure("vacuum_log_slope", fit.slope);
    rec.measure("vacuum_log_intercept", fit.intercept);
    let mut t = Table::new(&["length", "ln_length", "entropy"]);
    for ((l, x), y) in p.vacuum_lengths.iter().zip(&ln_l).zip(&s) {
        t.push(vec![*l as f64, *x, *y]);
    }
    rec.table("vacuum", t);
    rec.scan(scan(id, "vacuum", "S_vs_lnL", "ln_length", "entropy"));

    let thermal = gaussian::build_thermal_state(&lat, p.thermal_beta)?;
    let st = gaussian::interval_entropies(&thermal, &p.thermal_lengths)?;
    let l: Vec<f64> = p.thermal_lengths.iter().map(|&l| l as f64).collect();
    let tfit = fit_line(&l, &st, 4)?;
    rec.check("thermal_linear_fit_r2", "thermal_linear_r2", tfit.r_squared);
    rec.measure("thermal_entropy_density", tfit.slope);
    let mut t = Table::new(&["length", "entropy"]);
    for (x, y) in l.iter().zip(&st) {
        t.push(vec![*x, *y]);
    }
    rec.table("thermal", t);
    rec.scan(scan(id, "thermal", "S_vs_L_thermal", "length", "entropy"));

    let pairs: Vec<(f64, f64)> = ln_l.iter().copied().zip(s.iter().copied()).collect();
    for row in charge::area_law_report(&[2, 3, 4], &pairs)? {
        let name = format!("area_law[n={}]", row.spacetime_dim);
        match row.status {
            RowStatus::Verified => rec.flag(name, true, row.prediction),
            RowStatus::Failed => rec.flag(name, false, row.prediction),
            RowStatus::UnverifiedByDesign => rec.unverified(name, format!("{}; alternative: {}", row.prediction, row.alternative)),
        }
    }

    let mut t = Table::new(&["sites", "entropy"]);
    for &n in &p.purity_sites {
        let lat = HarmonicLattice::new(n, p.purity_mass, 1.0, Boundary::Periodic)?;
        let state = gaussian::build_vacuum_state(&lat)?;
        let s = gaussian::region_entropy(&state, &Region::interval(0, n)?)?;
        rec.check(format!("vacuum_purity[sites={n}]"), "purity", s.abs());
        t.push(vec![n as f64, s]);
    }
    rec.table("purity", t);
    Ok(())
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn charge_scaling(p: &ChargeParams, rec: &mut Recorder) -> Result<()> {
    let id = ExperimentId::ChargeScaling;
    let ratios = log_spaced(p.ratio_min, p.ratio_max, p.ratio_points);
    let family = charge::scaling_family(p.radius, &ratios, p.tau, p.profile)?;
    let mut t = Table::new(&["dim", "ratio", "variance", "error"]);
    for &n in &p.dims {
        let model = ScalarModel::new(p.mass, n)?;
        let r = charge::scaling_fit(&model, &family)?;
        if n == 2 {
            rec.check("log_fit_r2[n=2]", "log_r2", r.r_squared);
            rec.check("log_exponent[n=2]", "log_exponent", r.fitted_exponent.abs());
        } else {
            rec.check(format!("exponent[n={n}]"), "exponent", (r.fitted_exponent - (n as f64 - 2.0)).abs());
        }
        for ((ratio, f), e) in r.samples.iter().zip(&r.errors) {
            t.push(vec![n as f64, *ratio, *f, *e]);
        }
        rec.measure(format!("scaling[n={n}]"), &r);
    }
    rec.table("scaling", t);
    let mut s = grouped(scan(id, "scaling", "variance_vs_ratio", "ratio", "variance"), "dim");
    s.loglog = true;
    rec.scan(s);

    let l = &p.lattice;
    let lattice = HarmonicLattice::new(l.sites, l.mass, l.spacing, Boundary::Periodic)?;
    let model = ScalarModel::new(l.mass, 2)?;
    let mut t = Table::new(&["radius", "ramp", "time_width", "continuum", "lattice", "rel_diff"]);
    for g in &l.geometries {
        let spec = PartialChargeSpec::new(g[0], g[1], g[2], l.profile)?;
        let f = spec.smearing();
        let lat = gaussian::lattice_charge_variance(&lattice, |x| f.value(x), g[2])?;
        let cont = charge::charge_variance(&model, &spec)?;
        let d = (cont - lat).abs() / lat.abs();
        rec.check(format!("lattice[R={},dR={},T={}]", g[0], g[1], g[2]), "lattice", d);
        t.push(vec![g[0], g[1], g[2], cont, lat, d]);
    }
    rec.table("lattice", t);

    let gp = &p.global;
    let packet = WavePacket { p_max: gp.p_max };
    let mut t = Table::new(&["dim", "radius", "deviation"]);
    for &n in &gp.dims {
        let model = ScalarModel::new(gp.mass, n)?;
        let r = charge::global_charge_limit(&model, packet, &gp.radii, gp.dr, gp.t_width, gp.time_shift)?;
        rec.check(format!("global_limit[n={n}]"), "global_limit", r.final_deviation);
        rec.check(format!("global_limit_shifted[n={n}]"), "global_limit", r.shifted_final_deviation);
        rec.flag(format!("global_limit_monotone[n={n}]"), r.monotone, "deviation decreases with R");
        let total = charge::packet_total_charge(&model, packet, gp.t_width)?;
        rec.check(format!("total_charge[n={n}]"), "total_charge", (total - 1.0).abs());
        for (radius, d) in r.radii.iter().zip(&r.deviations) {
            t.push(vec![n as f64, *radius, *d]);
        }
    }
    if !gp.dims.is_empty() {
        rec.table("global_limit", t);
        let mut s = grouped(scan(id, "global_limit", "deviation_vs_radius", "radius", "deviation"), "dim");
        s.loglog = true;
        rec.scan(s);
    }
    Ok(())
}

fn unruh(p: &UnruhParams, rec: &mut Recorder) -> Result<()> {
    let id = ExperimentId::Unruh;
    let model = WedgeModel::new(0.0, p.spacetime_dim)?;
    let mut t = Table::new(&["acceleration", "omega", "omega_over_a", "defect", "raw_defect", "control_defect"]);
    for &a in &p.accelerations {
        let (traj, eps) = wedge::default_trajectory(&model, a)?;
        let g = wedge::pullback(&model, &traj, eps)?;
        let band = wedge::balance_band(a, p.omega_points);
        let beta = 2.0 * PI / a;
        let ok = wedge::detailed_balance(&g, beta, &band)?;
        let bad = wedge::detailed_balance(&g, p.control_beta_factor * beta, &band)?;
        rec.check(format!("balance[a={a}]"), "balance", ok.max_defect);
        rec.check(format!("control[a={a}]"), "control", bad.max_defect);
        for (k, &w) in band.iter().enumerate() {
            t.push(vec![a, w, w / a, ok.defects[k], ok.raw_defects[k], bad.defects[k]]);
        }

        let kernel = WedgeKernel {
            spacetime_dim: p.spacetime_dim,
            acceleration: a,
        };
        let points: Vec<Complex64> = [(0.3, 0.25), (-0.7, 0.6), (1.3, 0.1)]
            .iter()
            .map(|&(x, y)| Complex64::new(x * beta, y * beta))
            .collect();
        rec.check(format!("kms[a={a}]"), "kms", wedge::kms_shift_check(&kernel, beta, &points)?);
        let grid: Vec<f64> = [-2.0, -0.7, 0.3, 1.1, 2.5].iter().map(|x| x / a).collect();
        rec.check(format!("boost[a={a}]"), "boost", wedge::boost_orbit_consistency(a, &grid)?.max_rel_deviation);
    }
    rec.table("balance", t);
    rec.scan(grouped(scan(id, "balance", "balance_defect_vs_omega", "omega_over_a", "defect"), "acceleration"));
    rec.scan(grouped(scan(id, "balance", "control_defect_vs_omega", "omega_over_a", "control_defect"), "acceleration"));
    Ok(())
}

fn crossing_suite(p: &CrossingParams, rec: &mut Recorder) -> Result<()> {
    let id = ExperimentId::Crossing;
    let grid = crossing::rapidity_grid(p.theta_max, p.grid_points);
    let strip = StripGrid {
        theta_max: p.strip.theta_max,
        n_theta: p.strip.n_theta,
        n_lambda: p.strip.n_lambda,
    };
    let mut t = Table::new(&["function", "theta1", "theta2", "abs_continued", "abs_crossed", "rel_defect"]);
    let mut first_defect = None;
    for (i, fp) in p.test_functions.iter().enumerate() {
        let f = fp.build()?;
        let r = crossing::mass_shell_restrict(&f, p.mass, &strip)?;
        rec.check(format!("cauchy_riemann[fn={i}]"), "cauchy_riemann", r.cr_residual);
        if let Some(d) = r.involution_defect {
            rec.check(format!("involution[fn={i}]"), "involution", d);
        }
        let ff = crossing::form_factor(&f, p.mass, &grid, &grid)?;
        let rep = ff.crossing_report();
        rec.check(format!("crossing[fn={i}]"), "crossing", rep.max_rel_defect);
        rec.check(
            format!("hermiticity[fn={i}]"),
            "hermiticity",
            rep.hermiticity_defect / rep.max_crossed.max(f64::MIN_POSITIVE),
        );
        first_defect.get_or_insert(rep.max_rel_defect);
        let floor = crossing::DEFECT_FLOOR * ff.l1_norm;
        for (a, t1) in grid.iter().enumerate() {
            for (b, t2) in grid.iter().enumerate() {
                let (c, x) = (ff.continued[a][b], ff.crossed[a][b]);
                t.push(vec![i as f64, *t1, *t2, c.norm(), x.norm(), (c - x).norm() / x.norm().max(floor)]);
            }
        }
    }
    rec.table("formfactor", t);
    rec.scan(grouped(scan(id, "formfactor", "crossing_defect_vs_theta", "theta2", "rel_defect"), "theta1"));

    let left = p.left_control.build()?;
    let refused = matches!(crossing::mass_shell_restrict(&left, p.mass, &strip), Err(Error::Domain(_)));
    let rule = TransformRule::new(&left, Rule::Cartesian);
    let diverged = matches!(
        crossing::continue_into_strip(&rule, p.mass, Complex64::new(0.0, 0.5 * PI)),
        Err(Error::Numeric(_))
    );
    rec.flag(
        "left_wedge_control",
        refused && diverged,
        "left-wedge support is refused and its strip continuation exceeds the L1 bound",
    );

    let g = p.test_functions[0].build()?;
    let (f1, f2) = (p.kms.f1.build()?, p.kms.f2.build()?);
    let kgrid = KmsGrid {
        theta_max: p.kms.theta_max,
        n: p.kms.points,
    };
    let k = crossing::kms_free_identity(&g, &f1, &f2, p.mass, &kgrid)?;
    let swapped = crossing::kms_free_identity(&g, &f2, &f1, p.mass, &kgrid)?;
    rec.check("kms_identity", "kms", k.rel_diff);
    rec.check("kms_identity_swapped", "kms", swapped.rel_diff);
    rec.check("kms_swap_symmetry", "kms_swap", (k.lhs - swapped.lhs).norm() / k.lhs.norm().max(f64::MIN_POSITIVE));
    rec.check(
        "crossing_kms_agreement",
        "crossing_kms_ratio",
        crossing::defect_ratio(first_defect.unwrap_or(0.0), k.rel_diff),
    );
    rec.measure("kms_lhs", [k.lhs.re, k.lhs.im]);
    rec.measure("kms_rhs", [k.rhs.re, k.rhs.im]);
    rec.unverified(
        "interacting_crossing",
        "crossing for interacting wedge generators rests on an unproven extension of the KMS identity; only free and integrable instances are checked",
    );
    Ok(())
}

fn zf_algebra(p: &ZfParams, rec: &mut Recorder) -> Result<()> {
    let id = ExperimentId::ZfAlgebra;
    let mut t = Table::new(&["coupling", "theta", "re_s", "im_s", "phase"]);
    for &b in &p.couplings {
        let model = SMatrixModel::sinh_gordon(b)?;
        let space = ZfSpace::new(model, p.theta_max, p.grid_points, p.k_max)?;
        let packets: Vec<Packet> = p
            .packets
            .iter()
            .map(|q| Packet::gaussian(&space, q.center, q.width, q.momentum))
            .collect();

        let real = space.theta().to_vec();
        let complex: Vec<Complex64> = real.iter().map(|&x| Complex64::new(x, 0.37 * x.cos())).collect();
        let props = zf::smatrix_properties(&model, &real, &complex);
        let at_zero = (model.at(0.0) + 1.0).norm();
        rec.check(format!("smatrix[b={b}]"), "smatrix", props.max_defect().max(at_zero));
        for x in crate::crossing::rapidity_grid(p.theta_max, 81) {
            let s = model.at(x);
            t.push(vec![b, x, s.re, s.im, s.arg()]);
        }

        let ex = zf::zf_exchange_check(&space, &packets[0], &packets[1])?;
        rec.check(format!("exchange[b={b}]"), "exchange", ex.defect);
        let coincident = zf::zf_exchange_check(&space, &packets[0], &packets[0])?;
        rec.check(format!("exchange_equal_packets[b={b}]"), "exchange", coincident.defect);
        let assoc = zf::zf_associativity_check(&space, &packets[0], &packets[1], &packets[2])?;
        rec.check(format!("associativity[b={b}]"), "associativity", assoc.path_defect.max(assoc.state_defect));
        rec.check(format!("double_exchange[b={b}]"), "double_exchange", assoc.double_exchange_defect);

        let sequence: Vec<&Packet> = (0..p.k_max).map(|i| &packets[i % packets.len()]).collect();
        let top = zf::create_product(&space, &sequence)?;
        let lowered = zf::zf_apply(ZfOp::Annihilate, &packets[1], &top, zf::TRUNCATION_TOLERANCE)?;
        let raised = zf::zf_apply(ZfOp::Create, &packets[2], &lowered, zf::TRUNCATION_TOLERANCE)?;
        rec.check(format!("truncation_leak[b={b}]"), "truncation", raised.leaked);
        rec.measure(format!("particle_weights[b={b}]"), raised.particle_number_weights());
        let overflow = zf::zf_apply(ZfOp::Create, &packets[0], &top, zf::TRUNCATION_TOLERANCE);
        let note = match &overflow {
            Err(Error::Truncation { leaked, .. }) => format!("creation on the k_max sector leaks {leaked:.3e}"),
            Err(e) => format!("unexpected error: {e}"),
            Ok(_) => "overflow beyond k_max went unreported".into(),
        };
        rec.flag(format!("overflow_reported[b={b}]"), matches!(overflow, Err(Error::Truncation { .. })), note);
    }
    rec.table("smatrix", t);
    rec.scan(grouped(scan(id, "smatrix", "phase_vs_theta", "theta", "phase"), "coupling"));

    let space = ZfSpace::new(SMatrixModel::Free, p.theta_max, p.grid_points, p.k_max.min(3))?;
    let f = Packet::gaussian(&space, p.packets[0].center, p.packets[0].width, p.packets[0].momentum);
    let g = Packet::gaussian(&space, p.packets[1].center, p.packets[1].width, p.packets[1].momentum);
    let phi = zf::create_product(&space, &[&g, &f])?;
    let tol = zf::TRUNCATION_TOLERANCE;
    let ag = zf::zf_apply(ZfOp::Create, &g, &zf::zf_apply(ZfOp::Annihilate, &f, &phi, tol)?, tol)?;
    let ga = zf::zf_apply(ZfOp::Annihilate, &f, &zf::zf_apply(ZfOp::Create, &g, &phi, tol)?, tol)?;
    let comm: ZfState = ga.plus(&ag, Complex64::new(-1.0, 0.0));
    rec.check("ccr[free]", "ccr", comm.max_abs_diff(&phi.scaled(f.inner(&g, &space))));
    Ok(())
}
