//! Vacuum fluctuations of the partial charge `Q(f_{R,ΔR}, g_T)` of a free
//! complex scalar in `n = d + 1` spacetime dimensions.
//!
//! Only the particle-antiparticle sector contributes to `‖Q(f,g)Ω‖²`:
//!
//! `F = ∫ d^dp d^dp′/(2π)^{2d} |f̃(p+p′)|² |ĝ(E+E′)|² (E−E′)²/(4EE′)`.
//!
//! At fixed total momentum `K = p + p′` the pair integral is done in the
//! centre-of-mass frame, where `(E−E′)² = 4K²q₀² cos²θ/s` with pair mass
//! `√s` and relative momentum `q₀ = √(s/4 − m²)`. This leaves
//!
//! `F = S_d/(2π)^d ∫ K^{d−1} |f̃(K)|² I_d(K) dK`,
//! `I_d(K) = K² S_d/(d (2π)^d) ∫_{4m²}^∞ ds/(2W) |ĝ(W)|² q₀^d / s^{3/2}`,
//!
//! with `W = √(K² + s)` and `S_d` the area of the unit sphere in `d` dimensions.

use std::f64::consts::PI;

use num_complex::Complex64;
use puruspe::bessel::Jn;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_line, fit_power_law};
use crate::quad::{gauss_legendre, gauss_legendre_on, pairwise_sum, Estimate, Quadrature};
use crate::smearing::{Profile, SmearingFn};

/// Free complex scalar of positive mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarModel {
    pub mass: f64,
    pub spacetime_dim: u32,
}

impl ScalarModel {
    pub fn new(mass: f64, spacetime_dim: u32) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Config(format!("mass must be positive, got {mass}")));
        }
        if !(2..=4).contains(&spacetime_dim) {
            return Err(Error::Config(format!("spacetime dimension must be 2, 3 or 4, got {spacetime_dim}")));
        }
        Ok(Self { mass, spacetime_dim })
    }

    pub fn spatial_dim(&self) -> u32 {
        self.spacetime_dim - 1
    }
}

/// Area of the unit sphere in `d` dimensions (`S₁ = 2` counts two points).
pub fn sphere_area(d: u32) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => unreachable!("spatial dimension {d}"),
    }
}

/// Geometry of the smeared partial charge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialChargeSpec {
    pub r: f64,
    pub dr: f64,
    /// Width of the Gaussian time smearing `g_T`.
    pub t: f64,
    pub profile: Profile,
    /// Centre of `g_T` in time.
    pub time_shift: f64,
    pub amplitude: f64,
}

impl PartialChargeSpec {
    pub fn new(r: f64, dr: f64, t: f64, profile: Profile) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("R must be positive, got {r}")));
        }
        if !(dr > 0.0) || dr > r {
            return Err(Error::Domain(format!("need 0 < dR <= R, got dR = {dr}, R = {r}")));
        }
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("time width T must be positive, got {t}")));
        }
        Ok(Self {
            r,
            dr,
            t,
            profile,
            time_shift: 0.0,
            amplitude: 1.0,
        })
    }

    pub fn with_time_shift(mut self, t0: f64) -> Self {
        self.time_shift = t0;
        self
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.amplitude *= factor;
        self
    }

    /// Radial profile `f(r)`.
    pub fn smearing(&self) -> SmearingFn {
        SmearingFn {
            center: 0.0,
            plateau_halfwidth: self.r,
            ramp_width: self.dr,
            profile: self.profile,
            amplitude: self.amplitude,
        }
    }

    /// Fourier transform of the normalised Gaussian `g_T(t − t₀)`.
    pub fn g_hat(&self, omega: f64) -> Complex64 {
        let env = (-0.5 * omega * omega * self.t * self.t).exp();
        Complex64::from_polar(env, omega * self.time_shift)
    }
}

/// Angular integral `∫ dΩ e^{i k·x}` for `|k||x| = x`.
fn angular_kernel(d: u32, x: f64) -> f64 {
    match d {
        1 => 2.0 * x.cos(),
        2 => 2.0 * PI * Jn(0, x),
        3 => {
            if x.abs() < 1e-4 {
                4.0 * PI * (1.0 - x * x / 6.0)
            } else {
                4.0 * PI * x.sin() / x
            }
        }
        _ => unreachable!(),
    }
}

/// Fourier transform of the indicator of the ball of radius `r`.
fn ball_transform(d: u32, r: f64, k: f64) -> f64 {
    let x = k * r;
    match d {
        1 => {
            if x.abs() < 1e-8 {
                2.0 * r
            } else {
                2.0 * x.sin() / k
            }
        }
        2 => {
            if x.abs() < 1e-8 {
                PI * r * r
            } else {
                2.0 * PI * r * Jn(1, x) / k
            }
        }
        3 => {
            if x.abs() < 1e-3 {
                4.0 * PI * r.powi(3) / 3.0 * (1.0 - x * x / 10.0)
            } else {
                4.0 * PI * (x.sin() - x * x.cos()) / (k * k * k)
            }
        }
        _ => unreachable!(),
    }
}

/// Radial Fourier transform `f̃(K)` of the plateau profile in `d` dimensions.
pub fn radial_transform(d: u32, spec: &PartialChargeSpec, k: f64) -> Result<f64> {
    let f = spec.smearing();
    let plateau = spec.amplitude * ball_transform(d, spec.r, k);
    let q = Quadrature::new(1e-16, 1e-11);
    let ramp = q
        .integrate(
            |r| f.radial(r).0 * angular_kernel(d, k * r) * r.powi(d as i32 - 1),
            spec.r,
            spec.r + spec.dr,
        )?
        .value;
    Ok(plateau + ramp)
}

/// Pair-phase-space factor `I_d(K)`.
pub fn pair_factor(model: &ScalarModel, spec: &PartialChargeSpec, k: f64) -> Result<f64> {
    let d = model.spatial_dim();
    let m = model.mass;
    let sd = sphere_area(d);
    let pref = k * k * sd / (d as f64 * (2.0 * PI).powi(d as i32));
    // s = 4m² + v², so ds/(2W) = v dv / W and q₀ = v/2.
    let integrand = |v: f64| {
        let s = 4.0 * m * m + v * v;
        let w = (k * k + s).sqrt();
        let g2 = spec.g_hat(w).norm_sqr();
        if g2 == 0.0 {
            return 0.0;
        }
        v / w * g2 * (0.5 * v).powi(d as i32) / (s * s.sqrt())
    };
    let q = Quadrature::new(1e-300, 1e-11);
    let scale = (m.max(1.0 / spec.t)).max(k);
    let head = q.integrate(integrand, 0.0, scale)?.value;
    let tail = q.integrate_to_infinity(integrand, scale)?.value;
    Ok(pref * (head + tail))
}

/// `F = ‖Q(f, g)Ω‖²` with its quadrature error estimate.
pub fn charge_variance_estimate(model: &ScalarModel, spec: &PartialChargeSpec) -> Result<Estimate<f64>> {
    if spec.amplitude == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let d = model.spatial_dim();
    let sd = sphere_area(d);
    let norm = sd / (2.0 * PI).powi(d as i32);
    // |ĝ(W)|² ≤ exp(−K²T²) bounds the integrand beyond K_cut by e^{-42}.
    let k_cut = 6.5 / spec.t;
    let period = PI / (spec.r + spec.dr);
    let n_panels = (k_cut / period).ceil().max(8.0) as usize;
    let points: Vec<f64> = (0..=n_panels).map(|i| k_cut * i as f64 / n_panels as f64).collect();
    let failure = std::cell::RefCell::new(None);
    let integrand = |k: f64| -> f64 {
        let eval = || -> Result<f64> {
            let ft = radial_transform(d, spec, k)?;
            Ok(k.powi(d as i32 - 1) * ft * ft * pair_factor(model, spec, k)?)
        };
        match eval() {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                0.0
            }
        }
    };
    let q = Quadrature::new(1e-300, 1e-9).with_max_panels(200_000);
    let est = q.integrate_breaks(integrand, &points)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(Estimate {
        value: norm * est.value,
        error: norm * est.error,
        evaluations: est.evaluations,
    })
}

/// `F = ‖Q(f, g)Ω‖²`.
pub fn charge_variance(model: &ScalarModel, spec: &PartialChargeSpec) -> Result<f64> {
    Ok(charge_variance_estimate(model, spec)?.value)
}

/// Scan of `F` against `R/ΔR` with the fitted scaling law.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub spacetime_dim: u32,
    /// `(R/ΔR, F)` pairs in the order of the input family.
    pub samples: Vec<(f64, f64)>,
    pub errors: Vec<f64>,
    /// Power-law exponent. For `n = 2` this is the exponent of the
    /// increments `dF/d ln(R/ΔR)`, which vanishes for a pure log law.
    pub fitted_exponent: f64,
    pub fitted_log_flag: bool,
    /// R² of the primary fit: `F` vs `ln(R/ΔR)` for `n = 2`, `ln F` vs `ln(R/ΔR)` otherwise.
    pub r_squared: f64,
    /// Slope of the primary fit (`C₂` for `n = 2`).
    pub slope: f64,
    /// Plain log-log slope, recorded for every dimension.
    pub loglog_slope: f64,
    /// Successive increments of `F` per unit `ln(R/ΔR)`.
    pub increments: Vec<f64>,
}

/// Evaluate the family and fit the scaling law.
pub fn scaling_fit(model: &ScalarModel, family: &[PartialChargeSpec]) -> Result<ScalingReport> {
    if family.len() < 6 {
        return Err(Error::Fit(format!("scaling fit needs at least 6 samples, got {}", family.len())));
    }
    let ratios: Vec<f64> = family.iter().map(|s| s.r / s.dr).collect();
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    if hi / lo < 10.0 * (1.0 - 1e-12) {
        return Err(Error::Fit(format!("R/dR spans only a factor {:.3}, need a decade", hi / lo)));
    }
    let estimates: Vec<Estimate<f64>> = family
        .par_iter()
        .map(|s| charge_variance_estimate(model, s))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    let lx: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let mut order: Vec<usize> = (0..lx.len()).collect();
    order.sort_by(|a, b| lx[*a].total_cmp(&lx[*b]));
    let increments: Vec<f64> = order
        .windows(2)
        .map(|w| (values[w[1]] - values[w[0]]) / (lx[w[1]] - lx[w[0]]))
        .collect();
    let loglog = fit_power_law(&ratios, &values, 6)?;
    let (exponent, r2, slope, log_flag) = if model.spacetime_dim == 2 {
        let lin = fit_line(&lx, &values, 6)?;
        let mids: Vec<f64> = order.windows(2).map(|w| 0.5 * (lx[w[0]] + lx[w[1]])).collect();
        if increments.iter().any(|v| *v <= 0.0) {
            return Err(Error::Fit("non-increasing partial-charge variance".into()));
        }
        let inc_fit = fit_line(&mids, &increments.iter().map(|v| v.ln()).collect::<Vec<_>>(), 2)?;
        (inc_fit.slope, lin.r_squared, lin.slope, true)
    } else {
        (loglog.slope, loglog.r_squared, loglog.slope, false)
    };
    Ok(ScalingReport {
        spacetime_dim: model.spacetime_dim,
        samples: ratios.iter().copied().zip(values.iter().copied()).collect(),
        errors: estimates.iter().map(|e| e.error).collect(),
        fitted_exponent: exponent,
        fitted_log_flag: log_flag,
        r_squared: r2,
        slope,
        loglog_slope: loglog.slope,
        increments,
    })
}

/// Family with fixed `R`, ratios `R/ΔR` and time width `T = τ·ΔR`.
pub fn scaling_family(r: f64, ratios: &[f64], tau: f64, profile: Profile) -> Result<Vec<PartialChargeSpec>> {
    ratios.iter().map(|x| PartialChargeSpec::new(r, r / x, tau * r / x, profile)).collect()
}

/// Radially symmetric one-particle wave packet with compact momentum support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WavePacket {
    /// Momentum profile vanishes for `|p| ≥ p_max`.
    pub p_max: f64,
}

impl WavePacket {
    fn profile(&self, p: f64) -> f64 {
        let t = p / self.p_max;
        if t >= 1.0 {
            return 0.0;
        }
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }

    /// Localization width `1/p_max`.
    pub fn width(&self) -> f64 {
        1.0 / self.p_max
    }
}

/// Convergence of `Q(f_R)` to the global charge on a one-particle state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlobalLimitReport {
    pub radii: Vec<f64>,
    /// `|1 − ⟨ψ|Q(f_R, g)|ψ⟩|` per radius.
    pub deviations: Vec<f64>,
    pub monotone: bool,
    pub final_deviation: f64,
    /// Same deviation at the largest radius with `g_T` shifted in time.
    pub shifted_final_deviation: f64,
    /// `⟨Ω|Q(f)|Ω⟩`, zero for the normal-ordered current.
    pub vacuum_expectation: f64,
}

struct PacketEvaluator<'a> {
    model: &'a ScalarModel,
    packet: WavePacket,
    norm: f64,
    t_nodes: (Vec<f64>, Vec<f64>),
}

impl<'a> PacketEvaluator<'a> {
    fn new(model: &'a ScalarModel, packet: WavePacket) -> Result<Self> {
        let d = model.spatial_dim();
        let q = Quadrature::new(1e-300, 1e-13);
        let int = q
            .integrate(|p| sphere_area(d) * p.powi(d as i32 - 1) * packet.profile(p).powi(2), 0.0, packet.p_max)?
            .value
            / (2.0 * PI).powi(d as i32);
        Ok(Self {
            model,
            packet,
            norm: int.sqrt().recip(),
            t_nodes: gauss_legendre_on(48, -8.0, 8.0),
        })
    }

    /// Time-smeared charge density `∫ g_T(t − t₀) ρ(t, r) dt`, where
    /// `ρ = 2 Re(φ_a* φ_b)` with `φ_a` the positive-frequency wave function
    /// and `φ_b` its `i∂_t`, both carrying a `1/√2`.
    fn smeared_density(&self, r: f64, t_width: f64, t0: f64) -> f64 {
        let d = self.model.spatial_dim();
        let m = self.model.mass;
        let pm = self.packet.p_max;
        let panels = ((pm * (r + self.packet.width()) / PI).ceil() as usize).max(2);
        let (pn, pw) = gauss_legendre(16);
        let mut nodes = Vec::with_capacity(panels * pn.len());
        for k in 0..panels {
            let lo = pm * k as f64 / panels as f64;
            let h = pm / panels as f64;
            for (x, w) in pn.iter().zip(&pw) {
                let p = lo + 0.5 * h * (x + 1.0);
                let e = (p * p + m * m).sqrt();
                let amp = 0.5 * h * w * self.packet.profile(p) * angular_kernel(d, p * r) * p.powi(d as i32 - 1);
                nodes.push((e, amp));
            }
        }
        let c = self.norm / (2.0 * PI).powi(d as i32);
        let (tn, tw) = &self.t_nodes;
        let terms: Vec<f64> = tn
            .iter()
            .zip(tw)
            .map(|(x, w)| {
                let t = t0 + x * t_width;
                let mut a = Complex64::new(0.0, 0.0);
                let mut b = Complex64::new(0.0, 0.0);
                for &(e, amp) in &nodes {
                    let ph = Complex64::from_polar(1.0, -e * t);
                    a += ph * (amp / (2.0 * e).sqrt());
                    b += ph * (amp * (0.5 * e).sqrt());
                }
                let g = (-0.5 * x * x).exp() / (2.0 * PI).sqrt();
                w * g * 2.0 * c * c * (a.conj() * b).re
            })
            .collect();
        pairwise_sum(&terms)
    }

    fn radial_weight(&self, r: f64) -> f64 {
        sphere_area(self.model.spatial_dim()) * r.powi(self.model.spatial_dim() as i32 - 1)
    }

    /// `∫ (1 − f_R) ρ_g d^dx`.
    fn outside_charge(&self, spec: &PartialChargeSpec) -> Result<f64> {
        let f = spec.smearing();
        let weight = |r: f64| (1.0 - f.radial(r).0) * self.smeared_density(r, spec.t, spec.time_shift) * self.radial_weight(r);
        let q = Quadrature::new(1e-15, 1e-8);
        let ramp = q.integrate(weight, spec.r, spec.r + spec.dr)?.value;
        let tail = q.integrate_to_infinity(weight, spec.r + spec.dr)?.value;
        Ok(ramp + tail)
    }
}

/// Deviation of `⟨ψ|Q(f_R, g_T)|ψ⟩` from the global charge 1 on a one-particle
/// packet, for growing `R` at fixed `ΔR`.
pub fn global_charge_limit(
    model: &ScalarModel,
    packet: WavePacket,
    radii: &[f64],
    dr: f64,
    t_width: f64,
    time_shift: f64,
) -> Result<GlobalLimitReport> {
    if radii.is_empty() {
        return Err(Error::Domain("no radii given".into()));
    }
    let ev = PacketEvaluator::new(model, packet)?;
    let deviations: Vec<f64> = radii
        .par_iter()
        .map(|&r| {
            let spec = PartialChargeSpec::new(r, dr.min(r), t_width, Profile::RaisedCosine)?;
            Ok(ev.outside_charge(&spec)?.abs())
        })
        .collect::<Result<_>>()?;
    let last = *radii.last().expect("nonempty");
    let shifted = PartialChargeSpec::new(last, dr.min(last), t_width, Profile::RaisedCosine)?.with_time_shift(time_shift);
    let shifted_final_deviation = ev.outside_charge(&shifted)?.abs();
    let monotone = deviations.windows(2).all(|w| w[1] <= w[0]);
    Ok(GlobalLimitReport {
        radii: radii.to_vec(),
        final_deviation: *deviations.last().expect("nonempty"),
        deviations,
        monotone,
        shifted_final_deviation,
        vacuum_expectation: 0.0,
    })
}

/// Total one-particle charge `∫ ρ_g d^dx`, which must be 1.
pub fn packet_total_charge(model: &ScalarModel, packet: WavePacket, t_width: f64) -> Result<f64> {
    let ev = PacketEvaluator::new(model, packet)?;
    let w = |r: f64| ev.smeared_density(r, t_width, 0.0) * ev.radial_weight(r);
    let q = Quadrature::new(1e-15, 1e-10);
    let split = 10.0 * packet.width();
    Ok(q.integrate(w, 0.0, split)?.value + q.integrate_to_infinity(w, split)?.value)
}

/// Verdict class of an area-law row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Verified,
    Failed,
    UnverifiedByDesign,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AreaLawRow {
    pub spacetime_dim: u32,
    pub prediction: String,
    pub alternative: String,
    pub measured_slope: Option<f64>,
    pub measured_r_squared: Option<f64>,
    pub status: RowStatus,
    pub note: String,
}

/// Localization-entropy predictions next to the measured `n = 2` data.
///
/// `entropy_table` holds `(ln(L/ε), S)` pairs from a lattice scan; it is
/// used for the `n = 2` row only.
pub fn area_law_report(dims: &[u32], entropy_table: &[(f64, f64)]) -> Result<Vec<AreaLawRow>> {
    let mut rows = Vec::new();
    for &n in dims {
        if !(2..=4).contains(&n) {
            return Err(Error::Config(format!("spacetime dimension must be 2, 3 or 4, got {n}")));
        }
        if n == 2 {
            let x: Vec<f64> = entropy_table.iter().map(|p| p.0).collect();
            let y: Vec<f64> = entropy_table.iter().map(|p| p.1).collect();
            let fit = fit_line(&x, &y, 4)?;
            let ok = fit.r_squared > 0.995 && fit.slope > 0.0;
            rows.push(AreaLawRow {
                spacetime_dim: 2,
                prediction: "S ~ c ln(L/eps)".into(),
                alternative: "S ~ const (strict area law, zero-dimensional boundary)".into(),
                measured_slope: Some(fit.slope),
                measured_r_squared: Some(fit.r_squared),
                status: if ok { RowStatus::Verified } else { RowStatus::Failed },
                note: "lattice scan of the regulated harmonic chain".into(),
            });
        } else {
            let p = n - 2;
            rows.push(AreaLawRow {
                spacetime_dim: n,
                prediction: format!("S ~ (R/dR)^{p} ln(1/eps)"),
                alternative: format!("S ~ (R/dR)^{p} (strict area law, brick-wall cutoff)"),
                measured_slope: None,
                measured_r_squared: None,
                status: RowStatus::UnverifiedByDesign,
                note: "the formula is not derived for n > 2; printed, not tested".into(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{lattice_charge_variance, Boundary, HarmonicLattice};
    use crate::smearing::Smearing;
    use approx::assert_relative_eq;

    fn spec(r: f64, dr: f64, t: f64) -> PartialChargeSpec {
        PartialChargeSpec::new(r, dr, t, Profile::RaisedCosine).unwrap()
    }

    #[test]
    fn ball_transforms_match_quadrature() {
        let q = Quadrature::new(1e-15, 1e-12);
        for d in 1..=3u32 {
            for k in [0.0, 0.3, 2.0, 7.5] {
                let direct = q
                    .integrate(|r| angular_kernel(d, k * r) * r.powi(d as i32 - 1), 0.0, 1.3)
                    .unwrap()
                    .value;
                assert_relative_eq!(ball_transform(d, 1.3, k), direct, epsilon = 1e-11, max_relative = 1e-10);
            }
        }
    }

    /// `f̃(K)` tabulated from a plain Gauss-Legendre radial integral and
    /// linearly interpolated.
    struct Table {
        h: f64,
        values: Vec<f64>,
    }

    impl Table {
        fn new(d: u32, s: &PartialChargeSpec, k_max: f64) -> Self {
            let f = s.smearing();
            let (xs, ws) = crate::quad::gauss_legendre_on(400, 0.0, s.r + s.dr);
            let n = 40_000;
            let h = k_max / n as f64;
            let values = (0..=n + 1)
                .map(|i| {
                    let k = i as f64 * h;
                    xs.iter()
                        .zip(&ws)
                        .map(|(r, w)| w * f.radial(*r).0 * angular_kernel(d, k * r) * r.powi(d as i32 - 1))
                        .sum()
                })
                .collect();
            Self { h, values }
        }

        fn at(&self, k: f64) -> f64 {
            let x = k / self.h;
            let i = x.floor() as usize;
            let t = x - i as f64;
            self.values[i] * (1.0 - t) + self.values[i + 1] * t
        }
    }

    /// Brute-force pair integral over `(|p|, |p′|, angle)`, or `(p, p′)` for `d = 1`.
    fn direct_pairs(model: &ScalarModel, s: &PartialChargeSpec) -> f64 {
        let d = model.spatial_dim();
        let m = model.mass;
        let q = Quadrature::new(1e-13, 1e-7);
        let cut = 4.5 / s.t;
        let table = Table::new(d, s, 2.0 * cut);
        let energy = |p: f64| (p * p + m * m).sqrt();
        let pair = |p: f64, pp: f64| {
            let (e, ep) = (energy(p), energy(pp));
            s.g_hat(e + ep).norm_sqr() * (e - ep).powi(2) / (4.0 * e * ep)
        };
        if d == 1 {
            let breaks: Vec<f64> = (0..=60).map(|i| -cut + 2.0 * cut * i as f64 / 60.0).collect();
            let v = q
                .integrate_breaks(
                    |p| q.integrate_breaks(|pp| table.at((p + pp).abs()).powi(2) * pair(p, pp), &breaks).unwrap().value,
                    &breaks,
                )
                .unwrap()
                .value;
            return v / (2.0 * PI).powi(2);
        }
        let breaks: Vec<f64> = (0..=20).map(|i| cut * i as f64 / 20.0).collect();
        let v = q
            .integrate_breaks(
                |p| {
                    q.integrate_breaks(
                        |pp| {
                            let common = pair(p, pp);
                            if common == 0.0 {
                                return 0.0;
                            }
                            let ang = q
                                .integrate(
                                    |th| {
                                        let k = (p * p + pp * pp + 2.0 * p * pp * th.cos()).max(0.0).sqrt();
                                        let jac = if d == 2 { 1.0 } else { th.sin() };
                                        table.at(k).powi(2) * jac
                                    },
                                    0.0,
                                    PI,
                                )
                                .unwrap()
                                .value;
                            // Remaining angles of p′ relative to p: 2 for d = 2, 2π for d = 3.
                            let rest = if d == 2 { 2.0 } else { 2.0 * PI };
                            common * ang * rest * pp.powi(d as i32 - 1)
                        },
                        &breaks,
                    )
                    .unwrap()
                    .value
                        * sphere_area(d)
                        * p.powi(d as i32 - 1)
                },
                &breaks,
            )
            .unwrap()
            .value;
        v / (2.0 * PI).powi(2 * d as i32)
    }

    #[test]
    fn reduced_formula_matches_direct_pair_integral() {
        for n in [2, 3, 4] {
            let model = ScalarModel::new(1.0, n).unwrap();
            let s = spec(0.8, 0.4, 0.6);
            let reduced = charge_variance(&model, &s).unwrap();
            let direct = direct_pairs(&model, &s);
            assert_relative_eq!(reduced, direct, max_relative = 1e-4);
        }
    }

    #[test]
    fn continuum_matches_lattice_mode_sum() {
        let model = ScalarModel::new(1.0, 2).unwrap();
        for (r, dr, t) in [(4.0, 0.4, 0.2), (4.0, 0.8, 0.4), (3.0, 0.5, 0.25), (2.0, 1.0, 0.3), (4.0, 0.4, 0.1)] {
            let s = spec(r, dr, t);
            let lattice = HarmonicLattice::new(512, 1.0, 0.05, Boundary::Periodic).unwrap();
            let f = s.smearing();
            let lat = lattice_charge_variance(&lattice, |x| f.value(x), t).unwrap();
            let cont = charge_variance(&model, &s).unwrap();
            assert_relative_eq!(cont, lat, max_relative = 0.03);
        }
    }

    fn halving_drift(mass: f64) -> Vec<f64> {
        let model = ScalarModel::new(mass, 2).unwrap();
        let ratios: Vec<f64> = (0..5).map(|i| 10.0 * 2f64.powi(i)).collect();
        let fam = scaling_family(4.0, &ratios, 0.5, Profile::RaisedCosine).unwrap();
        let f: Vec<f64> = fam.iter().map(|s| charge_variance(&model, s).unwrap()).collect();
        let inc: Vec<f64> = f.windows(2).map(|w| w[1] - w[0]).collect();
        inc.windows(2).map(|w| w[1] / w[0] - 1.0).collect()
    }

    #[test]
    fn log_law_increments_in_two_dimensions() {
        // Increments per halving of dR grow like ln 2 / (ln(R/dR) + ln(1/mR)).
        let heavy = halving_drift(1e-3);
        let light = halving_drift(1e-9);
        for (h, l) in heavy.iter().zip(&light) {
            assert!(*l > 0.0 && l < h, "{heavy:?} {light:?}");
            assert!(*l < 0.05, "{light:?}");
        }
    }

    #[test]
    fn zero_smearing_bilinearity_and_time_shift() {
        let model = ScalarModel::new(1.0, 3).unwrap();
        let s = spec(2.0, 0.5, 0.25);
        assert_eq!(charge_variance(&model, &s.scaled(0.0)).unwrap(), 0.0);
        let f = charge_variance(&model, &s).unwrap();
        assert!(f > 0.0);
        assert_relative_eq!(charge_variance(&model, &s.scaled(2.0)).unwrap(), 4.0 * f, max_relative = 1e-9);
        assert_relative_eq!(charge_variance(&model, &s.with_time_shift(3.7)).unwrap(), f, max_relative = 1e-12);
    }

    #[test]
    fn heavier_matter_fluctuates_less() {
        let s = spec(2.0, 0.4, 0.2);
        let vals: Vec<f64> = [0.5, 1.0, 2.0]
            .iter()
            .map(|m| charge_variance(&ScalarModel::new(*m, 2).unwrap(), &s).unwrap())
            .collect();
        assert!(vals[0] > vals[1] && vals[1] > vals[2], "{vals:?}");
    }

    #[test]
    fn validation() {
        assert!(ScalarModel::new(0.0, 2).is_err());
        assert!(ScalarModel::new(1.0, 5).is_err());
        assert!(PartialChargeSpec::new(1.0, 2.0, 0.1, Profile::RaisedCosine).is_err());
        let model = ScalarModel::new(1.0, 2).unwrap();
        let few = scaling_family(4.0, &[10.0, 20.0, 40.0], 0.5, Profile::RaisedCosine).unwrap();
        assert!(matches!(scaling_fit(&model, &few), Err(Error::Fit(_))));
        let narrow = scaling_family(4.0, &[10.0, 11.0, 12.0, 13.0, 14.0, 15.0], 0.5, Profile::RaisedCosine).unwrap();
        assert!(matches!(scaling_fit(&model, &narrow), Err(Error::Fit(_))));
    }

    #[test]
    fn packet_carries_unit_charge() {
        let model = ScalarModel::new(1.0, 2).unwrap();
        let total = packet_total_charge(&model, WavePacket { p_max: 2.0 }, 0.1).unwrap();
        assert_relative_eq!(total, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn area_law_rows() {
        let table: Vec<(f64, f64)> = (1..8).map(|i| (i as f64, 0.33 * i as f64 + 0.1)).collect();
        let rows = area_law_report(&[2, 3, 4], &table).unwrap();
        assert_eq!(rows[0].status, RowStatus::Verified);
        assert_eq!(rows[2].status, RowStatus::UnverifiedByDesign);
        assert!(rows[2].prediction.contains("^2"));
    }
}
