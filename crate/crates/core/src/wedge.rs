//! Wightman functions pulled back to uniformly accelerated trajectories.
//!
//! The trajectory `x(τ) = (a⁻¹ sinh aτ, a⁻¹ cosh aτ, 0, 0)` is an orbit of
//! the boost that preserves the right wedge. Along it the invariant interval
//! is `σ² = (4/a²) sinh²(aΔτ/2)`, so the massless four-dimensional vacuum
//! two-point function becomes `−(a²/16π²)/sinh²(a(Δτ − iε)/2)`, the same
//! kernel as a chiral thermal state at `β = 2π/a`. In two dimensions the
//! proper-time derivative of the field is used, with kernel
//! `−(a²/8π)/sinh²(a(Δτ − iε)/2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::chiral::{csch2, ChiralKernel, KernelKind};
use crate::error::{Error, Result};
use crate::quad::{pairwise_sum, Quadrature};
use crate::smearing::Profile;

/// Free scalar for the pullback: massless in two or four dimensions, or
/// massive in four.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WedgeModel {
    pub mass: f64,
    pub spacetime_dim: u32,
}

impl WedgeModel {
    pub fn new(mass: f64, spacetime_dim: u32) -> Result<Self> {
        if !(mass >= 0.0) || !mass.is_finite() {
            return Err(Error::Config(format!("mass must be non-negative, got {mass}")));
        }
        if spacetime_dim != 2 && spacetime_dim != 4 {
            return Err(Error::Config(format!("spacetime dimension must be 2 or 4, got {spacetime_dim}")));
        }
        if spacetime_dim == 2 && mass > 0.0 {
            return Err(Error::Config("the two-dimensional pullback is only available massless".into()));
        }
        Ok(Self { mass, spacetime_dim })
    }
}

/// Uniformly accelerated observer with a proper-time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub acceleration: f64,
    pub spacetime_dim: u32,
    pub grid: Vec<f64>,
}

impl Trajectory {
    pub fn new(acceleration: f64, spacetime_dim: u32, grid: Vec<f64>) -> Result<Self> {
        if !(acceleration > 0.0) || !acceleration.is_finite() {
            return Err(Error::Config(format!("acceleration must be positive, got {acceleration}")));
        }
        if spacetime_dim != 2 && spacetime_dim != 4 {
            return Err(Error::Config(format!("spacetime dimension must be 2 or 4, got {spacetime_dim}")));
        }
        if grid.is_empty() || grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::Config("proper-time grid must be nonempty and finite".into()));
        }
        Ok(Self {
            acceleration,
            spacetime_dim,
            grid,
        })
    }

    /// Symmetric grid `τ = k·step`, `|τ| ≤ half_width`.
    pub fn uniform(acceleration: f64, spacetime_dim: u32, half_width: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) || !(half_width > step) {
            return Err(Error::Config(format!("need 0 < step < half_width, got {step}, {half_width}")));
        }
        let n = (half_width / step).floor() as i64;
        Self::new(acceleration, spacetime_dim, (-n..=n).map(|k| k as f64 * step).collect())
    }

    /// Minkowski coordinates `(t, x)` at proper time `τ`.
    pub fn position(&self, tau: f64) -> (f64, f64) {
        let a = self.acceleration;
        ((a * tau).sinh() / a, (a * tau).cosh() / a)
    }

    fn uniform_step(&self) -> Option<f64> {
        if self.grid.len() < 2 {
            return None;
        }
        let h = self.grid[1] - self.grid[0];
        let uniform = self
            .grid
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
        uniform.then_some(h)
    }
}

/// Closed-form massless kernel at complex proper-time separation `z`.
pub fn massless_kernel(spacetime_dim: u32, acceleration: f64, z: Complex64) -> Complex64 {
    let a = acceleration;
    let c = if spacetime_dim == 2 { a * a / (8.0 * PI) } else { a * a / (16.0 * PI * PI) };
    -c * csch2(0.5 * a * z)
}

/// Modified Bessel function `K₁(z)` for `Re z > 0`, from
/// `K₁(z) = z ∫₁^∞ e^{−zt} √(t² − 1) dt` with the path rotated onto
/// `t = 1 + u e^{−i arg z}`, which makes the exponential real.
pub fn bessel_k1(z: Complex64) -> Result<Complex64> {
    if !(z.re > 0.0) {
        return Err(Error::Domain(format!("K1 needs Re z > 0, got {z}")));
    }
    let r = z.norm();
    let rot = Complex64::from_polar(1.0, -z.arg());
    let q = Quadrature::new(1e-300, 1e-13);
    let est = q.integrate(
        |w| {
            let w2 = w * w;
            2.0 * w2 * (-w2).exp() * (2.0 * r + w2 * rot).sqrt()
        },
        0.0,
        9.0,
    )?;
    Ok(z * (-z).exp() * rot * rot.sqrt() * est.value / (r * r))
}

/// Four-dimensional vacuum two-point function of mass `m` as a function of
/// the complex interval `σ²` (positive for timelike separations).
pub fn invariant_kernel_4d(mass: f64, sigma2: Complex64) -> Result<Complex64> {
    let z = (-sigma2).sqrt();
    if mass == 0.0 {
        return Ok(-1.0 / (4.0 * PI * PI * sigma2));
    }
    Ok(mass * bessel_k1(mass * z)? / (4.0 * PI * PI * z))
}

/// Two-point function along the trajectory, `G(τ) = W(x(τ), x(0))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PullbackCorrelator {
    pub model: WedgeModel,
    pub trajectory: Trajectory,
    pub i_epsilon: f64,
    pub values: Vec<Complex64>,
}

impl PullbackCorrelator {
    pub fn tau(&self) -> &[f64] {
        &self.trajectory.grid
    }

    /// Largest hermiticity defect `|G(−τ) − conj G(τ)|` relative to `max |G|`,
    /// over grid points whose mirror is also on the grid.
    pub fn hermiticity_defect(&self) -> f64 {
        let tau = self.tau();
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let n = tau.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let j = n - 1 - i;
            if (tau[i] + tau[j]).abs() <= 1e-12 * (1.0 + tau[i].abs()) {
                worst = worst.max((self.values[j] - self.values[i].conj()).norm() / scale);
            }
        }
        worst
    }
}

fn pullback_value(model: &WedgeModel, a: f64, tau: f64, eps: f64) -> Result<Complex64> {
    let z = Complex64::new(tau, -eps);
    if model.mass == 0.0 {
        return Ok(massless_kernel(model.spacetime_dim, a, z));
    }
    let zeta = (0.5 * a * z).sinh() * (2.0 / a);
    invariant_kernel_4d(model.mass, zeta * zeta)
}

/// Pull the vacuum two-point function back to the trajectory.
pub fn pullback(model: &WedgeModel, trajectory: &Trajectory, i_epsilon: f64) -> Result<PullbackCorrelator> {
    if model.spacetime_dim != trajectory.spacetime_dim {
        return Err(Error::Config("model and trajectory dimensions differ".into()));
    }
    if !(i_epsilon > 0.0) || !i_epsilon.is_finite() {
        return Err(Error::Config(format!("i_epsilon must be positive, got {i_epsilon}")));
    }
    if let Some(h) = trajectory.uniform_step() {
        if h > 0.5 * i_epsilon {
            return Err(Error::Numeric(format!(
                "grid step {h:e} too coarse for i_epsilon {i_epsilon:e} (need step <= eps/2)"
            )));
        }
    }
    let a = trajectory.acceleration;
    let values = trajectory
        .grid
        .par_iter()
        .map(|&t| pullback_value(model, a, t, i_epsilon))
        .collect::<Result<Vec<_>>>()?;
    Ok(PullbackCorrelator {
        model: *model,
        trajectory: trajectory.clone(),
        i_epsilon,
        values,
    })
}

/// Standard desk-scale window for acceleration `a`: `ε = 0.05/a`,
/// step `ε/10`, grid half-width `80/a`.
pub fn default_trajectory(model: &WedgeModel, acceleration: f64) -> Result<(Trajectory, f64)> {
    let eps = 0.05 / acceleration;
    let traj = Trajectory::uniform(acceleration, model.spacetime_dim, 80.0 / acceleration, eps / 10.0)?;
    Ok((traj, eps))
}

/// Flat-top window: 1 on `|τ| ≤ flat`, smooth taper to 0 at `|τ| = half_width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralWindow {
    pub half_width: f64,
    pub flat: f64,
    pub step: f64,
    /// `max |G|` outside the flat region relative to `max |G|`.
    pub truncation: f64,
}

impl SpectralWindow {
    fn weight(&self, tau: f64) -> f64 {
        let d = tau.abs();
        if d <= self.flat {
            return 1.0;
        }
        Profile::SmoothBump.eval((self.half_width - d) / (self.half_width - self.flat)).0
    }
}

/// Windowed Fourier transform `G̃(ω) = ∫ G(τ) e^{iωτ} dτ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralFunction {
    pub omega: Vec<f64>,
    pub values: Vec<Complex64>,
    pub window: SpectralWindow,
}

/// Truncation level the window must reach before the taper starts.
pub const WINDOW_TRUNCATION_TOL: f64 = 1e-6;

pub fn spectral_function(corr: &PullbackCorrelator, omegas: &[f64]) -> Result<SpectralFunction> {
    let tau = corr.tau();
    let step = corr
        .trajectory
        .uniform_step()
        .ok_or_else(|| Error::Numeric("spectral transform needs a uniform proper-time grid".into()))?;
    let half_width = tau[tau.len() - 1].min(-tau[0]);
    let flat = 0.5 * half_width;
    let scale = corr.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let outside = tau
        .iter()
        .zip(&corr.values)
        .filter(|(t, _)| t.abs() > flat)
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    let window = SpectralWindow {
        half_width,
        flat,
        step,
        truncation: outside / scale,
    };
    if window.truncation > WINDOW_TRUNCATION_TOL {
        return Err(Error::Numeric(format!(
            "window truncation {:.3e} exceeds {WINDOW_TRUNCATION_TOL:e} (flat region |tau| <= {flat}, half width {half_width})",
            window.truncation
        )));
    }
    let weights: Vec<f64> = tau.iter().map(|t| window.weight(*t)).collect();
    let values = omegas
        .par_iter()
        .map(|&w| {
            let re: Vec<f64> = tau
                .iter()
                .zip(&corr.values)
                .zip(&weights)
                .map(|((t, g), win)| win * (g * Complex64::from_polar(1.0, w * t)).re)
                .collect();
            let im: Vec<f64> = tau
                .iter()
                .zip(&corr.values)
                .zip(&weights)
                .map(|((t, g), win)| win * (g * Complex64::from_polar(1.0, w * t)).im)
                .collect();
            Complex64::new(pairwise_sum(&re), pairwise_sum(&im)) * step
        })
        .collect();
    Ok(SpectralFunction {
        omega: omegas.to_vec(),
        values,
        window,
    })
}

/// Detailed-balance defects `|ln(G̃(−ω)/G̃(ω)) + βω|` on a frequency band.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceReport {
    pub beta: f64,
    pub omega: Vec<f64>,
    /// Richardson-extrapolated (`ε → 0`) defects.
    pub defects: Vec<f64>,
    /// Defects at the correlator's own `ε`.
    pub raw_defects: Vec<f64>,
    pub max_defect: f64,
    pub window: SpectralWindow,
}

fn log_ratios(corr: &PullbackCorrelator, omegas: &[f64]) -> Result<(Vec<f64>, SpectralWindow)> {
    let both: Vec<f64> = omegas.iter().flat_map(|w| [*w, -*w]).collect();
    let spec = spectral_function(corr, &both)?;
    let mut out = Vec::with_capacity(omegas.len());
    for (k, w) in omegas.iter().enumerate() {
        let plus = spec.values[2 * k];
        let minus = spec.values[2 * k + 1];
        if !(plus.re > 0.0) || !(minus.re > 0.0) {
            return Err(Error::Numeric(format!(
                "spectral leakage at omega = {w}: G(+w) = {plus:e}, G(-w) = {minus:e}; window half width {}, step {}, truncation {:.3e}",
                spec.window.half_width, spec.window.step, spec.window.truncation
            )));
        }
        out.push((minus.re / plus.re).ln());
    }
    Ok((out, spec.window))
}

/// Detailed balance at inverse temperature `beta`. The regulator shifts
/// `ln(G̃(−ω)/G̃(ω))` by `2εω`, which is removed by Richardson
/// extrapolation against a second pullback at `2ε`.
pub fn detailed_balance(corr: &PullbackCorrelator, beta: f64, omegas: &[f64]) -> Result<BalanceReport> {
    if !(beta > 0.0) {
        return Err(Error::Config(format!("beta must be positive, got {beta}")));
    }
    let coarse = pullback(&corr.model, &corr.trajectory, 2.0 * corr.i_epsilon)?;
    let (fine, window) = log_ratios(corr, omegas)?;
    let (rough, _) = log_ratios(&coarse, omegas)?;
    let raw_defects: Vec<f64> = fine.iter().zip(omegas).map(|(l, w)| (l + beta * w).abs()).collect();
    let defects: Vec<f64> = fine
        .iter()
        .zip(&rough)
        .zip(omegas)
        .map(|((f, r), w)| (2.0 * f - r + beta * w).abs())
        .collect();
    let max_defect = defects.iter().copied().fold(0.0, f64::max);
    Ok(BalanceReport {
        beta,
        omega: omegas.to_vec(),
        defects,
        raw_defects,
        max_defect,
        window,
    })
}

/// `n` equally spaced frequencies on `[0.5, 3]·a`.
pub fn balance_band(acceleration: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| acceleration * (0.5 + 2.5 * k as f64 / (n.max(2) - 1) as f64))
        .collect()
}

/// A two-point function known in closed form off the real axis.
pub trait AnalyticKernel {
    fn eval(&self, z: Complex64) -> Complex64;
    /// Distance from `z` to the nearest singularity.
    fn pole_distance(&self, z: Complex64) -> f64;
}

fn periodic_pole_distance(z: Complex64, period: f64) -> f64 {
    let n = (z.im / period).round();
    Complex64::new(z.re, z.im - n * period).norm()
}

impl AnalyticKernel for ChiralKernel {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.at(z)
    }

    fn pole_distance(&self, z: Complex64) -> f64 {
        match self.kind {
            KernelKind::Vacuum => z.norm(),
            KernelKind::Thermal { beta } => periodic_pole_distance(z, beta),
        }
    }
}

/// Massless pullback kernel as an analytic function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WedgeKernel {
    pub spacetime_dim: u32,
    pub acceleration: f64,
}

impl AnalyticKernel for WedgeKernel {
    fn eval(&self, z: Complex64) -> Complex64 {
        massless_kernel(self.spacetime_dim, self.acceleration, z)
    }

    fn pole_distance(&self, z: Complex64) -> f64 {
        periodic_pole_distance(z, 2.0 * PI / self.acceleration)
    }
}

/// Minimum distance to a singularity accepted by [`kms_shift_check`], in units of `beta`.
pub const KMS_POLE_MARGIN: f64 = 1e-3;

/// Largest relative defect of `G(τ − iβ) = G(−τ)` over the given points.
pub fn kms_shift_check(kernel: &dyn AnalyticKernel, beta: f64, points: &[Complex64]) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Config(format!("beta must be positive, got {beta}")));
    }
    let shift = Complex64::new(0.0, beta);
    let mut worst: f64 = 0.0;
    for &z in points {
        for w in [z, z - shift, -z] {
            if kernel.pole_distance(w) < KMS_POLE_MARGIN * beta {
                return Err(Error::Domain(format!("point {z} lies on a singularity of the strip")));
            }
        }
        let lhs = kernel.eval(z - shift);
        let rhs = kernel.eval(-z);
        worst = worst.max((lhs - rhs).norm() / rhs.norm());
    }
    Ok(worst)
}

/// Stationarity of the pullback along the boost orbit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoostOrbitReport {
    pub acceleration: f64,
    pub pairs: usize,
    pub max_rel_deviation: f64,
}

/// Massless four-dimensional two-point function between grid points,
/// computed from Minkowski coordinates, against the same quantity with
/// the second point moved to `τ = 0`.
pub fn boost_orbit_consistency(acceleration: f64, grid: &[f64]) -> Result<BoostOrbitReport> {
    let traj = Trajectory::new(acceleration, 4, grid.to_vec())?;
    let w = |t1: f64, t2: f64| {
        let (a0, a1) = traj.position(t1);
        let (b0, b1) = traj.position(t2);
        let sigma2 = (a0 - b0).powi(2) - (a1 - b1).powi(2);
        -1.0 / (4.0 * PI * PI * sigma2)
    };
    let mut pairs = 0;
    let mut worst: f64 = 0.0;
    for (i, &t1) in grid.iter().enumerate() {
        for (j, &t2) in grid.iter().enumerate() {
            if i == j {
                continue;
            }
            if t1 == t2 {
                return Err(Error::Domain(format!("coincident proper times {t1} on the diagonal")));
            }
            let g = w(t1, t2);
            let g0 = w(t1 - t2, 0.0);
            worst = worst.max(((g - g0) / g0).abs());
            pairs += 1;
        }
    }
    Ok(BoostOrbitReport {
        acceleration,
        pairs,
        max_rel_deviation: worst,
    })
}
