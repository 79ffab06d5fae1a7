//! Jordan's chiral current model on the light ray.
//!
//! The current two-point function is `−N/(Δu − iε)²` in the vacuum and
//! `−N (π/β)²/sinh²(π(Δu − iε)/β)` at inverse temperature `β`, with
//! `N = 1/4π²`. Both are derivatives of a simple primitive,
//! `K = N P'` with `P(z) = 1/z` or `P(z) = (π/β) coth(πz/β)`, and the
//! smeared variances are computed against `P` after integrating by parts in
//! the separation variable. This keeps every quadrature free of the
//! short-distance singularity.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::gaussian::{self, Boundary, HarmonicLattice, Region};
use crate::quad::Quadrature;
use crate::smearing::{Smearing, SmearingFn};

/// Two-point normalization `N = 1/4π²`.
pub const NORMALIZATION: f64 = 1.0 / (4.0 * PI * PI);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelKind {
    Vacuum,
    Thermal { beta: f64 },
}

/// Regulated current two-point function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiralKernel {
    pub kind: KernelKind,
    pub normalization: f64,
    pub i_epsilon: f64,
}

fn check_epsilon(i_epsilon: f64) -> Result<f64> {
    if !(i_epsilon > 0.0) || !i_epsilon.is_finite() {
        return Err(Error::Config(format!("i_epsilon must be positive, got {i_epsilon}")));
    }
    Ok(i_epsilon)
}

/// `coth w` without overflow for large `|Re w|`.
pub fn coth(w: Complex64) -> Complex64 {
    if w.re < 0.0 {
        return -coth(-w);
    }
    let e = (-2.0 * w).exp();
    (1.0 + e) / (1.0 - e)
}

/// `1/sinh² w` without overflow for large `|Re w|`.
pub fn csch2(w: Complex64) -> Complex64 {
    let w = if w.re < 0.0 { -w } else { w };
    let e = (-2.0 * w).exp();
    let d = 1.0 - e;
    4.0 * e / (d * d)
}

impl ChiralKernel {
    pub fn vacuum(i_epsilon: f64) -> Result<Self> {
        Ok(Self {
            kind: KernelKind::Vacuum,
            normalization: NORMALIZATION,
            i_epsilon: check_epsilon(i_epsilon)?,
        })
    }

    pub fn thermal(beta: f64, i_epsilon: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::Config(format!("beta must be finite and positive, got {beta}")));
        }
        Ok(Self {
            kind: KernelKind::Thermal { beta },
            normalization: NORMALIZATION,
            i_epsilon: check_epsilon(i_epsilon)?,
        })
    }

    pub fn beta(&self) -> Option<f64> {
        match self.kind {
            KernelKind::Vacuum => None,
            KernelKind::Thermal { beta } => Some(beta),
        }
    }

    /// Kernel at a complex separation `z`, no regulator applied.
    pub fn at(&self, z: Complex64) -> Complex64 {
        match self.kind {
            KernelKind::Vacuum => -self.normalization / (z * z),
            KernelKind::Thermal { beta } => {
                let k = PI / beta;
                -self.normalization * k * k * csch2(k * z)
            }
        }
    }

    /// Primitive `P` with `K = N P'`.
    pub fn primitive(&self, z: Complex64) -> Complex64 {
        match self.kind {
            KernelKind::Vacuum => 1.0 / z,
            KernelKind::Thermal { beta } => {
                let k = PI / beta;
                k * coth(k * z)
            }
        }
    }

    /// Separation with the `−iε` prescription applied.
    pub fn regulated(&self, du: f64) -> Complex64 {
        Complex64::new(du, -self.i_epsilon)
    }
}

/// `⟨j(u) j(u′)⟩` for the given kernel.
pub fn current_two_point(kernel: &ChiralKernel, u: f64, u_prime: f64) -> Complex64 {
    kernel.at(kernel.regulated(u - u_prime))
}

/// `⟨T(u) T(u′)⟩_c = 2 K(u, u′)²` for the Wick square `T = :j²:`.
pub fn energy_two_point(kernel: &ChiralKernel, u: f64, u_prime: f64) -> Complex64 {
    let k = current_two_point(kernel, u, u_prime);
    2.0 * k * k
}

/// Method-of-images sum `Σ_{n=−M..M} K_vac(z + inβ)` for the thermal kernel.
///
/// With `tail_correction` the omitted images `|n| > M` are added through
/// the midpoint Euler-Maclaurin formula: with `w = z/β`, `c = M + ½` and
/// `t(n) = 2(w² − n²)/(w² + n²)²` the tail is `∫_c^∞ t + t′(c)/24`, which
/// turns the `O(1/M)` truncation error into `O(1/M⁵)`.
pub fn image_sum(beta: f64, z: Complex64, images: usize, tail_correction: bool) -> Complex64 {
    let mut s = Complex64::new(0.0, 0.0);
    for n in -(images as i64)..=(images as i64) {
        let w = z + Complex64::new(0.0, n as f64 * beta);
        s += -NORMALIZATION / (w * w);
    }
    if tail_correction {
        let w = z / beta;
        let c = images as f64 + 0.5;
        let d = w * w + c * c;
        let dt = 4.0 * c * (c * c - 3.0 * w * w) / (d * d * d);
        let tail = -2.0 * c / d + dt / 24.0;
        s += -NORMALIZATION / (beta * beta) * tail;
    }
    s
}

fn quad_error(cell: &RefCell<Option<Error>>, r: Result<f64>) -> f64 {
    match r {
        Ok(v) => v,
        Err(e) => {
            cell.borrow_mut().get_or_insert(e);
            0.0
        }
    }
}

fn inner_quadrature() -> Quadrature {
    Quadrature::new(1e-15, 1e-12).with_max_panels(2000)
}

fn outer_quadrature() -> Quadrature {
    Quadrature::new(1e-15, 1e-11).with_max_panels(4000)
}

/// Breakpoints of `u ↦ a(u) b(u + s)` over the overlap of the two supports.
fn overlap_points(bp: &[f64], s: f64) -> Vec<f64> {
    let lo = bp[0].max(bp[0] - s);
    let hi = bp[bp.len() - 1].min(bp[bp.len() - 1] - s);
    if !(hi > lo) {
        return Vec::new();
    }
    let mut pts: Vec<f64> = bp
        .iter()
        .copied()
        .chain(bp.iter().map(|b| b - s))
        .filter(|p| *p > lo && *p < hi)
        .collect();
    pts.push(lo);
    pts.push(hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
    pts
}

/// `C′(s) = ∫ f(u) f′(u + s) du` for the autocorrelation `C` of `f`.
pub fn autocorrelation_d1(f: &dyn Smearing, s: f64) -> Result<f64> {
    let pts = overlap_points(&f.breakpoints(), s);
    Ok(inner_quadrature().integrate_breaks(|u| f.value(u) * f.d1(u + s), &pts)?.value)
}

/// `C‴(s) = −∫ f′(u) f″(u + s) du`.
pub fn autocorrelation_d3(f: &dyn Smearing, s: f64) -> Result<f64> {
    let pts = overlap_points(&f.breakpoints(), s);
    Ok(-inner_quadrature().integrate_breaks(|u| f.d1(u) * f.d2(u + s), &pts)?.value)
}

fn lag_breakpoints(f: &dyn Smearing) -> Vec<f64> {
    let bp = f.breakpoints();
    let width = bp[bp.len() - 1] - bp[0];
    let mut lags: Vec<f64> = vec![0.0, width];
    for a in &bp {
        for b in &bp {
            let d = a - b;
            if d > 0.0 && d < width {
                lags.push(d);
            }
        }
    }
    lags.sort_by(f64::total_cmp);
    lags.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    lags
}

/// `∫₀^S w(s) Re P(s − iε) ds` over the lag range of `f`.
fn lag_integral(f: &dyn Smearing, kernel: &ChiralKernel, weight: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let failure = RefCell::new(None);
    let lags = lag_breakpoints(f);
    let est = outer_quadrature().integrate_breaks(
        |s| {
            let w = quad_error(&failure, weight(s));
            if w == 0.0 {
                return 0.0;
            }
            w * kernel.primitive(kernel.regulated(s)).re
        },
        &lags,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(est.value)
}

/// `Var j(f) = ∬ f(u) f(u′) Re K(u − u′) du du′`.
pub fn smeared_current_variance(f: &dyn Smearing, kernel: &ChiralKernel) -> Result<f64> {
    let v = lag_integral(f, kernel, |s| autocorrelation_d1(f, s))?;
    Ok(-2.0 * kernel.normalization * v)
}

/// Connected variance of `T(f)` with `⟨T T⟩_c = 2K²`.
///
/// Uses `P′² = −P‴/6 + (2k²/3) P′` with `k = π/β` (zero in the vacuum), so
/// that after three integrations by parts only `C‴` and `C′` remain.
pub fn energy_variance(f: &dyn Smearing, kernel: &ChiralKernel) -> Result<f64> {
    let k = kernel.beta().map_or(0.0, |b| PI / b);
    let v = lag_integral(f, kernel, |s| {
        let d3 = autocorrelation_d3(f, s)?;
        if k == 0.0 {
            return Ok(d3);
        }
        Ok(d3 - 4.0 * k * k * autocorrelation_d1(f, s)?)
    })?;
    let n = kernel.normalization;
    Ok(2.0 * n * n / 3.0 * v)
}

/// The exponential map `x = exp(2πu/β)` restricted to `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntervalMap {
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    pub x_a: f64,
    pub x_b: f64,
}

impl IntervalMap {
    pub fn x(&self, u: f64) -> f64 {
        (2.0 * PI * u / self.beta).exp()
    }

    /// Inverse map `u = (β/2π) ln x`.
    pub fn u(&self, x: f64) -> f64 {
        self.beta / (2.0 * PI) * x.ln()
    }

    /// `dx/du = (2π/β) x(u)`.
    pub fn jacobian(&self, u: f64) -> f64 {
        2.0 * PI / self.beta * self.x(u)
    }
}

pub fn exp_map(beta: f64, a: f64, b: f64) -> Result<IntervalMap> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Config(format!("beta must be finite and positive, got {beta}")));
    }
    if !(a < b) {
        return Err(Error::Domain(format!("interval needs a < b, got ({a}, {b})")));
    }
    let mut m = IntervalMap { beta, a, b, x_a: 0.0, x_b: 0.0 };
    m.x_a = m.x(a);
    m.x_b = m.x(b);
    Ok(m)
}

/// `n` equally spaced interior points of `(a, b)` and all ordered pairs of
/// distinct points among them.
pub fn isomorphism_grid(map: &IntervalMap, n: usize) -> Vec<(f64, f64)> {
    let h = (map.b - map.a) / (n as f64 + 1.0);
    let pts: Vec<f64> = (1..=n).map(|i| map.a + h * i as f64).collect();
    let mut grid = Vec::with_capacity(n * n.saturating_sub(1));
    for (i, u) in pts.iter().enumerate() {
        for (j, v) in pts.iter().enumerate() {
            if i != j {
                grid.push((*u, *v));
            }
        }
    }
    grid
}

/// Largest relative defect of `K_β(u, u′) = J(u) J(u′) K_vac(x(u), x(u′))`
/// over the grid, evaluated at real separations.
pub fn verify_isomorphism(map: &IntervalMap, grid: &[(f64, f64)]) -> Result<f64> {
    let thermal = ChiralKernel::thermal(map.beta, 1.0)?;
    let vacuum = ChiralKernel::vacuum(1.0)?;
    let mut worst = 0.0f64;
    for &(u, v) in grid {
        if u == v {
            return Err(Error::Domain(format!("grid point ({u}, {v}) lies on the diagonal")));
        }
        if !(u > map.a && u < map.b && v > map.a && v < map.b) {
            return Err(Error::Domain(format!("grid point ({u}, {v}) outside the interval")));
        }
        let lhs = thermal.at(Complex64::new(u - v, 0.0)).re;
        let rhs = map.jacobian(u) * map.jacobian(v) * vacuum.at(Complex64::new(map.x(u) - map.x(v), 0.0)).re;
        worst = worst.max(((lhs - rhs) / lhs).abs());
    }
    Ok(worst)
}

/// Weight of a transported density: 1 for the current, 2 for the stress tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Weight {
    Current,
    Energy,
}

/// Smearing function carried from the thermal line to the vacuum half-line.
///
/// A density of weight `d` obeys `j_β(u) = J(u)^d j_vac(x(u))`, so
/// `∫ f j_β du = ∫ h j_vac dx` with `h(x) = f(u(x)) J(u(x))^{d−1}`.
#[derive(Debug, Clone, Copy)]
pub struct TransportedSmearing<'a, S: Smearing> {
    pub inner: &'a S,
    pub map: IntervalMap,
    pub weight: Weight,
}

impl<S: Smearing> TransportedSmearing<'_, S> {
    fn kappa(&self) -> f64 {
        self.map.beta / (2.0 * PI)
    }
}

impl<S: Smearing> Smearing for TransportedSmearing<'_, S> {
    fn value(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let l = self.map.u(x);
        match self.weight {
            Weight::Current => self.inner.value(l),
            Weight::Energy => x / self.kappa() * self.inner.value(l),
        }
    }

    fn d1(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let k = self.kappa();
        let l = self.map.u(x);
        match self.weight {
            Weight::Current => self.inner.d1(l) * k / x,
            Weight::Energy => self.inner.value(l) / k + self.inner.d1(l),
        }
    }

    fn d2(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let k = self.kappa();
        let l = self.map.u(x);
        match self.weight {
            Weight::Current => (k / x).powi(2) * self.inner.d2(l) - k / (x * x) * self.inner.d1(l),
            Weight::Energy => (self.inner.d1(l) + k * self.inner.d2(l)) / x,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.inner.breakpoints().iter().map(|u| self.map.x(*u)).collect()
    }
}

/// Outcome of the Einstein-Jordan comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EjComparison {
    pub thermal_var: f64,
    pub transported_vacuum_var: f64,
    pub rel_diff: f64,
}

/// Regulator used by [`ej_compare`], relative to the smallest ramp width.
pub const EJ_EPSILON_FRACTION: f64 = 1e-12;

/// Connected energy variance of `f` in the thermal state on the line versus
/// that of its weight-2 transport in the vacuum on the half-line.
pub fn ej_compare(f: &SmearingFn, beta: f64, a: f64, b: f64) -> Result<EjComparison> {
    let map = exp_map(beta, a, b)?;
    let (lo, hi) = f.support();
    if !(lo > a && hi < b) {
        return Err(Error::Domain(format!("support [{lo}, {hi}] not inside ({a}, {b})")));
    }
    let eps = EJ_EPSILON_FRACTION * f.ramp_width;
    let thermal_var = energy_variance(f, &ChiralKernel::thermal(beta, eps)?)?;
    let h = TransportedSmearing {
        inner: f,
        map,
        weight: Weight::Energy,
    };
    let eps_x = eps * map.jacobian(lo);
    let transported_vacuum_var = energy_variance(&h, &ChiralKernel::vacuum(eps_x)?)?;
    let scale = thermal_var.abs().max(transported_vacuum_var.abs());
    let rel_diff = if scale == 0.0 {
        0.0
    } else {
        (thermal_var - transported_vacuum_var).abs() / scale
    };
    Ok(EjComparison {
        thermal_var,
        transported_vacuum_var,
        rel_diff,
    })
}

/// Fit report relating heat-bath and localization entropies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyRelationReport {
    pub beta: f64,
    pub thermal_lengths: Vec<f64>,
    pub thermal_entropies: Vec<f64>,
    /// Entropy per unit length of the thermal chain.
    pub s1: f64,
    pub thermal_r_squared: f64,
    pub interval_length: f64,
    pub epsilons: Vec<f64>,
    pub localization_entropies: Vec<f64>,
    /// Coefficient of `ln(1/ε)`.
    pub s2: f64,
    pub localization_r_squared: f64,
    /// `s1 · β / s2`: the proportionality between `L·kT` and `ln(1/ε)` at
    /// which both entropies agree. Recorded only.
    pub calibration_ratio: f64,
}

/// Parameters of the two chains used by [`entropy_relation_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyRelationSetup {
    pub n_sites: usize,
    pub beta: f64,
    /// Product `m_IR · L_total` of the regulated chains.
    pub ir_product: f64,
    /// Physical length of the vacuum interval.
    pub interval_length: f64,
    /// Physical length of the vacuum chain.
    pub chain_length: f64,
}

impl Default for EntropyRelationSetup {
    fn default() -> Self {
        Self {
            n_sites: 1024,
            beta: 2.0 * PI,
            ir_product: 1e-3,
            interval_length: 1.0,
            chain_length: 8.0,
        }
    }
}

/// Thermal entropy of intervals of `l_values` sites on a heat-bath chain, and
/// vacuum entropy of a fixed interval as the cutoff `ε` runs over `eps_values`.
pub fn entropy_relation_check(l_values: &[usize], eps_values: &[f64], setup: &EntropyRelationSetup) -> Result<EntropyRelationReport> {
    if l_values.len() < 4 || eps_values.len() < 4 {
        return Err(Error::Fit("entropy relation needs at least 4 lengths and 4 cutoffs".into()));
    }
    let n = setup.n_sites;
    let lattice = HarmonicLattice::massless(n, 1.0, Boundary::Periodic, setup.ir_product / n as f64)?;
    let thermal = gaussian::build_thermal_state(&lattice, setup.beta)?;
    let thermal_entropies = gaussian::interval_entropies(&thermal, l_values)?;
    let thermal_lengths: Vec<f64> = l_values.iter().map(|l| *l as f64).collect();
    let tfit = fit_line(&thermal_lengths, &thermal_entropies, 4)?;

    let localization_entropies: Vec<f64> = eps_values
        .par_iter()
        .map(|&eps| -> Result<f64> {
            let sites = (setup.chain_length / eps).round() as usize;
            let lat = HarmonicLattice::massless(sites, eps, Boundary::Periodic, setup.ir_product / setup.chain_length)?;
            let vac = gaussian::build_vacuum_state(&lat)?;
            let l = (setup.interval_length / eps).round() as usize;
            gaussian::region_entropy(&vac, &Region::centered(sites, l)?)
        })
        .collect::<Result<_>>()?;
    let x: Vec<f64> = eps_values.iter().map(|e| (1.0 / e).ln()).collect();
    let lfit = fit_line(&x, &localization_entropies, 4)?;
    if tfit.slope == 0.0 || lfit.slope == 0.0 {
        return Err(Error::Fit("degenerate entropy fit (zero slope)".into()));
    }
    Ok(EntropyRelationReport {
        beta: setup.beta,
        thermal_lengths,
        thermal_entropies,
        s1: tfit.slope,
        thermal_r_squared: tfit.r_squared,
        interval_length: setup.interval_length,
        epsilons: eps_values.to_vec(),
        localization_entropies,
        s2: lfit.slope,
        localization_r_squared: lfit.r_squared,
        calibration_ratio: tfit.slope * setup.beta / lfit.slope,
    })
}
