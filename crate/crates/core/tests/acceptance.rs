//! Acceptance criteria at their stated tolerances and runtime budgets.
//!
//! Runs without the libtest harness so the per-criterion lines always print.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use modloc_lab::bench::config::{ChargeParams, CrossingParams, EjParams, EntropyParams, ThermalMapParams, UnruhParams, ZfParams};
use modloc_lab::charge::{self, PartialChargeSpec, ScalarModel};
use modloc_lab::chiral;
use modloc_lab::crossing::{self, KmsGrid, Rule, StripGrid, TransformRule};
use modloc_lab::fit::fit_line;
use modloc_lab::gaussian::{self, Boundary, HarmonicLattice, Region};
use modloc_lab::smearing::{Smearing, SmearingFn};
use modloc_lab::wedge::{self, WedgeModel};
use modloc_lab::zf::{self, Packet, SMatrixModel, ZfOp, ZfSpace};
use modloc_lab::{Error, Result};

struct Outcome {
    held: bool,
    detail: String,
}

type Criterion = (&'static str, Duration, fn() -> Result<Outcome>);

fn outcome(held: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { held, detail })
}

fn thermal_isomorphism() -> Result<Outcome> {
    let p = ThermalMapParams::default();
    let mut worst: f64 = 0.0;
    for beta in [1.0, 2.0 * PI] {
        let map = chiral::exp_map(beta, p.interval[0], p.interval[1])?;
        let grid = chiral::isomorphism_grid(&map, 100);
        worst = worst.max(chiral::verify_isomorphism(&map, &grid)?);
    }
    outcome(worst < 1e-10, format!("max rel kernel defect {worst:.2e} < 1e-10"))
}

fn einstein_jordan() -> Result<Outcome> {
    let p = EjParams::default();
    let mut worst: f64 = 0.0;
    for g in &p.geometries {
        let f = SmearingFn::new(g.center, g.plateau_halfwidth, g.ramp_width, g.profile)?;
        worst = worst.max(chiral::ej_compare(&f, p.beta, p.interval[0], p.interval[1])?.rel_diff);
    }
    outcome(
        worst < 1e-6 && p.geometries.len() == 3,
        format!("{} geometries, max rel diff {worst:.2e} < 1e-6", p.geometries.len()),
    )
}

fn partial_charge_scaling() -> Result<Outcome> {
    let p = ChargeParams::default();
    let ratios: Vec<f64> = (0..p.ratio_points)
        .map(|i| 10f64.powf(i as f64 / (p.ratio_points - 1) as f64) * 10.0)
        .collect();
    let family = charge::scaling_family(p.radius, &ratios, p.tau, p.profile)?;
    let mut held = true;
    let mut parts = Vec::new();
    for n in [2u32, 3, 4] {
        let r = charge::scaling_fit(&ScalarModel::new(p.mass, n)?, &family)?;
        if n == 2 {
            held &= r.r_squared > 0.999 && r.fitted_exponent.abs() < 0.1;
            parts.push(format!("n=2 R2 {:.5} e {:+.3}", r.r_squared, r.fitted_exponent));
        } else {
            let target = n as f64 - 2.0;
            held &= (r.fitted_exponent - target).abs() < 0.1;
            parts.push(format!("n={n} e {:.3}", r.fitted_exponent));
        }
    }
    outcome(held, parts.join(", "))
}

fn entropy_scaling() -> Result<Outcome> {
    let p = EntropyParams::default();
    let lat = HarmonicLattice::massless(1000, 1.0, Boundary::Periodic, p.ir_product / 1000.0)?;
    let vac = gaussian::build_vacuum_state(&lat)?;
    let s = gaussian::interval_entropies(&vac, &p.vacuum_lengths)?;
    let ln_l: Vec<f64> = p.vacuum_lengths.iter().map(|&l| (l as f64).ln()).collect();
    let vf = fit_line(&ln_l, &s, 4)?;
    let thermal = gaussian::build_thermal_state(&lat, p.thermal_beta)?;
    let st = gaussian::interval_entropies(&thermal, &p.thermal_lengths)?;
    let l: Vec<f64> = p.thermal_lengths.iter().map(|&l| l as f64).collect();
    let tf = fit_line(&l, &st, 4)?;
    outcome(
        vf.r_squared > 0.995 && tf.r_squared > 0.99,
        format!(
            "vacuum R2 {:.5} (s = {:.4}), thermal R2 {:.7} (density {:.4})",
            vf.r_squared, vf.slope, tf.r_squared, tf.slope
        ),
    )
}

fn unruh_balance() -> Result<Outcome> {
    let p = UnruhParams::default();
    let model = WedgeModel::new(0.0, p.spacetime_dim)?;
    let (mut worst, mut weakest_control) = (0.0f64, f64::INFINITY);
    for a in [0.5, 1.0, 2.0] {
        let (traj, eps) = wedge::default_trajectory(&model, a)?;
        let g = wedge::pullback(&model, &traj, eps)?;
        let band = wedge::balance_band(a, p.omega_points);
        let lo = band.iter().copied().fold(f64::INFINITY, f64::min) / a;
        let hi = band.iter().copied().fold(0.0, f64::max) / a;
        assert!(lo <= 0.5 + 1e-12 && hi >= 3.0 - 1e-12, "band [{lo}, {hi}]·a");
        worst = worst.max(wedge::detailed_balance(&g, 2.0 * PI / a, &band)?.max_defect);
        weakest_control = weakest_control.min(wedge::detailed_balance(&g, PI / a, &band)?.max_defect);
    }
    outcome(
        worst < 1e-3 && weakest_control > 0.5,
        format!("defect {worst:.2e} < 1e-3, control at beta = pi/a {weakest_control:.3} > 0.5"),
    )
}

fn free_crossing() -> Result<Outcome> {
    let p = CrossingParams::default();
    let grid = crossing::rapidity_grid(p.theta_max, 20);
    let mut worst: f64 = 0.0;
    for fp in &p.test_functions {
        let r = crossing::free_crossing_check(&fp.build()?, p.mass, &grid, &grid)?;
        assert_eq!(r.grid_points, 400);
        worst = worst.max(r.max_rel_defect);
    }
    let left = p.left_control.build()?;
    let strip = StripGrid::default();
    let refused = matches!(crossing::mass_shell_restrict(&left, p.mass, &strip), Err(Error::Domain(_)));
    let diverged = matches!(
        crossing::continue_into_strip(&TransformRule::new(&left, Rule::Cartesian), p.mass, Complex64::new(0.0, 0.5 * PI)),
        Err(Error::Numeric(_))
    );
    let g = p.test_functions[0].build()?;
    let kms = crossing::kms_free_identity(&g, &p.kms.f1.build()?, &p.kms.f2.build()?, p.mass, &KmsGrid::default())?;
    outcome(
        worst < 1e-6 && refused && diverged,
        format!(
            "{} functions on 20x20, max rel defect {worst:.2e} < 1e-6; left wedge refused {refused}, strip bound broken {diverged}; kms {:.1e}",
            p.test_functions.len(),
            kms.rel_diff
        ),
    )
}

fn zf_algebra() -> Result<Outcome> {
    let p = ZfParams::default();
    let (mut exchange, mut double, mut smatrix, mut leak) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for &b in &p.couplings {
        let model = SMatrixModel::sinh_gordon(b)?;
        let space = ZfSpace::new(model, p.theta_max, p.grid_points, 4)?;
        let pk: Vec<Packet> = p
            .packets
            .iter()
            .map(|q| Packet::gaussian(&space, q.center, q.width, q.momentum))
            .collect();
        let real = space.theta().to_vec();
        let complex: Vec<Complex64> = real.iter().map(|&x| Complex64::new(x, 0.5)).collect();
        smatrix = smatrix.max(zf::smatrix_properties(&model, &real, &complex).max_defect());
        exchange = exchange.max(zf::zf_exchange_check(&space, &pk[0], &pk[1])?.defect);
        double = double.max(zf::zf_associativity_check(&space, &pk[0], &pk[1], &pk[2])?.double_exchange_defect);
        let top = zf::create_product(&space, &[&pk[0], &pk[1], &pk[2], &pk[0]])?;
        let down = zf::zf_apply(ZfOp::Annihilate, &pk[1], &top, 1e-8)?;
        leak = leak.max(zf::zf_apply(ZfOp::Create, &pk[2], &down, 1e-8)?.leaked);
    }
    outcome(
        exchange < 1e-10 && double < 1e-12 && smatrix < 1e-12 && leak < 1e-8,
        format!("exchange {exchange:.1e}, double exchange {double:.1e}, S-matrix {smatrix:.1e}, leak {leak:.1e} at k_max = 4"),
    )
}

fn gaussian_oracles() -> Result<Outcome> {
    let l = ChargeParams::default().lattice;
    let lattice = HarmonicLattice::new(l.sites, l.mass, l.spacing, Boundary::Periodic)?;
    let model = ScalarModel::new(l.mass, 2)?;
    let mut worst: f64 = 0.0;
    for g in &l.geometries {
        let spec = PartialChargeSpec::new(g[0], g[1], g[2], l.profile)?;
        let f = spec.smearing();
        let lat = gaussian::lattice_charge_variance(&lattice, |x| f.value(x), g[2])?;
        worst = worst.max((charge::charge_variance(&model, &spec)? - lat).abs() / lat);
    }
    let mut purity: f64 = 0.0;
    for n in [256, 1024, 2048] {
        let state = gaussian::build_vacuum_state(&HarmonicLattice::new(n, 1.0, 1.0, Boundary::Periodic)?)?;
        purity = purity.max(gaussian::region_entropy(&state, &Region::interval(0, n)?)?.abs());
    }
    outcome(
        worst < 0.03 && purity < 1e-8 && l.geometries.len() == 5,
        format!("{} geometries, max rel diff {:.2}% < 3%; purity entropy {purity:.1e} nats up to 2048 sites", l.geometries.len(), 100.0 * worst),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 thermal/vacuum isomorphism", Duration::from_secs(1), thermal_isomorphism),
        ("2 Einstein-Jordan fluctuations", Duration::from_secs(30), einstein_jordan),
        ("3 partial-charge scaling", Duration::from_secs(180), partial_charge_scaling),
        ("4 localization entropy", Duration::from_secs(120), entropy_scaling),
        ("5 Unruh detailed balance", Duration::from_secs(20), unruh_balance),
        ("6 free crossing from KMS", Duration::from_secs(60), free_crossing),
        ("7 ZF algebra", Duration::from_secs(30), zf_algebra),
        ("8 Gaussian-core oracles", Duration::from_secs(600), gaussian_oracles),
    ];
    let mut failed = Vec::new();
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let in_budget = elapsed <= budget;
        let (held, detail) = match result {
            Ok(o) => (o.held, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let pass = held && in_budget;
        println!(
            "[{}] {name}: {detail}; {:.2} s (budget {} s)",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if !pass {
            failed.push(name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
