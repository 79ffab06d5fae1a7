//! Wedge-localized test functions in 1+1 dimensions, their mass-shell
//! restrictions continued into the rapidity strip, and the free-field
//! crossing and KMS identities.
//!
//! Fourier transforms use `F(k) = ∫ f(x) e^{−i(k⁰x⁰ − k¹x¹)} d²x`, and the
//! mass-shell restriction is `f̂(θ) = F(p(θ))` with `p(θ) = m(cosh θ, sinh θ)`.
//! For `x` in the right wedge `x¹ > |x⁰|` and `θ = t + iλ`,
//! `|e^{−ip(θ)·x}| = e^{−m sin λ (x¹ cosh t − x⁰ sinh t)} ≤ 1` on `0 ≤ λ ≤ π`,
//! so `|f̂| ≤ ‖f‖₁` throughout the strip. Exceeding that bound is how a
//! support leak shows up.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{gauss_legendre, gauss_legendre_on};

/// Smooth bump supported on a disc, optionally modulated by `e^{iκx¹}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WedgeTestFn {
    /// `(x⁰, x¹)` of the disc centre.
    pub center: (f64, f64),
    pub radius: f64,
    pub amplitude: f64,
    pub modulation: f64,
}

fn bump(s: f64) -> f64 {
    if s >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - s * s)).exp()
    }
}

impl WedgeTestFn {
    pub fn new(center: (f64, f64), radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.0.is_finite() || !center.1.is_finite() {
            return Err(Error::Config(format!("invalid disc: center {center:?}, radius {radius}")));
        }
        Ok(Self {
            center,
            radius,
            amplitude: 1.0,
            modulation: 0.0,
        })
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.amplitude *= factor;
        self
    }

    pub fn modulated(mut self, kappa: f64) -> Self {
        self.modulation = kappa;
        self
    }

    pub fn translated(mut self, shift: (f64, f64)) -> Self {
        self.center = (self.center.0 + shift.0, self.center.1 + shift.1);
        self
    }

    pub fn is_real(&self) -> bool {
        self.modulation == 0.0
    }

    pub fn value(&self, x0: f64, x1: f64) -> Complex64 {
        let s = ((x0 - self.center.0).powi(2) + (x1 - self.center.1).powi(2)).sqrt() / self.radius;
        Complex64::from_polar(self.amplitude * bump(s), self.modulation * x1)
    }

    /// Closed support disc lies in the open right wedge.
    pub fn in_right_wedge(&self) -> bool {
        let (c0, c1) = self.center;
        c1 - c0.abs() > self.radius * 2f64.sqrt()
    }

    /// Closed support disc lies in the open left wedge `x¹ < −|x⁰|`.
    pub fn in_left_wedge(&self) -> bool {
        let (c0, c1) = self.center;
        -c1 - c0.abs() > self.radius * 2f64.sqrt()
    }
}

/// Quadrature nodes `(x⁰, x¹, weight·f)` for one test function.
#[derive(Debug, Clone)]
pub struct TransformRule {
    nodes: Vec<(f64, f64, Complex64)>,
    l1_norm: f64,
}

/// Which tensor rule to integrate the test function with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// Gauss-Legendre panels on the bounding square.
    Cartesian,
    /// Gauss-Legendre in the radius, trapezoid in the angle around the disc centre.
    Polar,
}

impl TransformRule {
    pub fn new(f: &WedgeTestFn, rule: Rule) -> Self {
        let (c0, c1) = f.center;
        let r = f.radius;
        let mut nodes = Vec::new();
        match rule {
            Rule::Cartesian => {
                let panels = 6;
                let (x, w) = gauss_legendre(24);
                let mut xs = Vec::new();
                for p in 0..panels {
                    let lo = -r + 2.0 * r * p as f64 / panels as f64;
                    let h = r / panels as f64;
                    for (t, wt) in x.iter().zip(&w) {
                        xs.push((lo + h * (t + 1.0), h * wt));
                    }
                }
                for &(a, wa) in &xs {
                    for &(b, wb) in &xs {
                        let v = f.value(c0 + a, c1 + b);
                        if v.norm() > 0.0 {
                            nodes.push((c0 + a, c1 + b, v * (wa * wb)));
                        }
                    }
                }
            }
            Rule::Polar => {
                let (rho, wr) = gauss_legendre_on(96, 0.0, r);
                let n_phi = 160;
                for (q, wq) in rho.iter().zip(&wr) {
                    for j in 0..n_phi {
                        let phi = 2.0 * PI * j as f64 / n_phi as f64;
                        let (a, b) = (q * phi.cos(), q * phi.sin());
                        let v = f.value(c0 + a, c1 + b);
                        nodes.push((c0 + a, c1 + b, v * (wq * q * 2.0 * PI / n_phi as f64)));
                    }
                }
            }
        }
        let l1_norm = nodes.iter().map(|n| n.2.norm()).sum();
        Self { nodes, l1_norm }
    }

    pub fn l1_norm(&self) -> f64 {
        self.l1_norm
    }

    /// `F(k)` at a complex two-momentum.
    pub fn transform(&self, k0: Complex64, k1: Complex64) -> Complex64 {
        let i = Complex64::i();
        self.nodes.iter().map(|&(x0, x1, w)| w * (-i * (k0 * x0 - k1 * x1)).exp()).sum()
    }
}

/// On-shell momentum `p(θ) = m(cosh θ, sinh θ)` at complex rapidity.
pub fn on_shell(mass: f64, theta: Complex64) -> (Complex64, Complex64) {
    (mass * theta.cosh(), mass * theta.sinh())
}

/// Relative slack allowed on `|f̂| ≤ ‖f‖₁` before a support leak is declared.
pub const LEAK_TOLERANCE: f64 = 1e-9;

/// `f̂(θ)` at complex rapidity, without checking the support. Fails with a
/// numeric error when the continuation grows beyond `‖f‖₁`.
pub fn continue_into_strip(rule: &TransformRule, mass: f64, theta: Complex64) -> Result<Complex64> {
    let (k0, k1) = on_shell(mass, theta);
    let v = rule.transform(k0, k1);
    if v.norm() > rule.l1_norm() * (1.0 + LEAK_TOLERANCE) {
        return Err(Error::Numeric(format!(
            "strip continuation diverges at theta = {theta}: |f| = {:.6e} > ||f||_1 = {:.6e} (support leak)",
            v.norm(),
            rule.l1_norm()
        )));
    }
    Ok(v)
}

/// Rapidity grid on the strip `[−Θ, Θ] × [0, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StripGrid {
    pub theta_max: f64,
    pub n_theta: usize,
    pub n_lambda: usize,
}

impl Default for StripGrid {
    fn default() -> Self {
        Self {
            theta_max: 2.0,
            n_theta: 21,
            n_lambda: 9,
        }
    }
}

/// `f̂` sampled on the strip with its analyticity diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RapidityFn {
    pub mass: f64,
    pub theta: Vec<f64>,
    pub lambda: Vec<f64>,
    /// `values[j][i] = f̂(theta[i] + i·lambda[j])`.
    pub values: Vec<Vec<Complex64>>,
    /// Largest `|∂_λ f̂ − i ∂_θ f̂|` over interior points, relative to `max |∂_θ f̂|`.
    pub cr_residual: f64,
    /// Largest `|f̂(θ + iπ) − conj f̂(θ)|` relative to `max |f̂|`; `None` for complex `f`.
    pub involution_defect: Option<f64>,
}

/// Step of the finite-difference Cauchy-Riemann stencil.
pub const CR_STEP: f64 = 1e-3;

fn derivative(g: impl Fn(Complex64) -> Result<Complex64>, z: Complex64, dir: Complex64) -> Result<Complex64> {
    let h = CR_STEP;
    Ok((g(z - 2.0 * h * dir)? - 8.0 * g(z - h * dir)? + 8.0 * g(z + h * dir)? - g(z + 2.0 * h * dir)?) / (12.0 * h))
}

/// Restrict a right-wedge test function to the mass shell and continue it
/// through the strip by direct quadrature.
pub fn mass_shell_restrict(f: &WedgeTestFn, mass: f64, grid: &StripGrid) -> Result<RapidityFn> {
    if !(mass > 0.0) {
        return Err(Error::Config(format!("mass must be positive, got {mass}")));
    }
    if !f.in_right_wedge() {
        return Err(Error::Domain(format!(
            "test function support (disc at {:?}, radius {}) is not inside the right wedge",
            f.center, f.radius
        )));
    }
    if grid.n_theta < 3 || grid.n_lambda < 3 {
        return Err(Error::Config("strip grid needs at least 3 points per direction".into()));
    }
    let rule = TransformRule::new(f, Rule::Cartesian);
    let theta: Vec<f64> = (0..grid.n_theta)
        .map(|i| -grid.theta_max + 2.0 * grid.theta_max * i as f64 / (grid.n_theta - 1) as f64)
        .collect();
    let lambda: Vec<f64> = (0..grid.n_lambda).map(|j| PI * j as f64 / (grid.n_lambda - 1) as f64).collect();
    let g = |z: Complex64| continue_into_strip(&rule, mass, z);
    let values = lambda
        .par_iter()
        .map(|&l| theta.iter().map(|&t| g(Complex64::new(t, l))).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let interior: Vec<Complex64> = lambda[1..lambda.len() - 1]
        .iter()
        .flat_map(|&l| theta[1..theta.len() - 1].iter().map(move |&t| Complex64::new(t, l)))
        .collect();
    let pairs = interior
        .par_iter()
        .map(|&z| {
            let dt = derivative(g, z, Complex64::new(1.0, 0.0))?;
            let dl = derivative(g, z, Complex64::new(0.0, 1.0))?;
            Ok(((dl - Complex64::i() * dt).norm(), dt.norm()))
        })
        .collect::<Result<Vec<_>>>()?;
    let scale = pairs.iter().map(|p| p.1).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let cr_residual = pairs.iter().map(|p| p.0).fold(0.0, f64::max) / scale;
    let involution_defect = f.is_real().then(|| {
        let top = &values[values.len() - 1];
        let bottom = &values[0];
        let scale = values.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        top.iter().zip(bottom).map(|(a, b)| (a - b.conj()).norm()).fold(0.0, f64::max) / scale
    });
    Ok(RapidityFn {
        mass,
        theta,
        lambda,
        values,
        cr_residual,
        involution_defect,
    })
}

/// Relative difference with a floor: values below `floor` compare absolutely.
fn rel_defect(a: Complex64, b: Complex64, floor: f64) -> f64 {
    (a - b).norm() / b.norm().max(floor).max(f64::MIN_POSITIVE)
}

/// Floor of the relative defects, as a fraction of `‖g‖₁`.
pub const DEFECT_FLOOR: f64 = 1e-6;

/// Matrix elements of `B = :φ²:(g)` on a rapidity grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormFactor {
    pub mass: f64,
    pub theta1: Vec<f64>,
    pub theta2: Vec<f64>,
    /// `⟨0|B|θ₁ + iπ, θ₂⟩ = 2ĝ(p(θ₁ + iπ) + p(θ₂))`, polar rule.
    pub continued: Vec<Vec<Complex64>>,
    /// `⟨θ₁|B|θ₂⟩ = 2ĝ(p(θ₂) − p(θ₁))`, Cartesian rule.
    pub crossed: Vec<Vec<Complex64>>,
    /// `max |⟨θ₁|B|θ₂⟩ − conj ⟨θ₂|B*|θ₁⟩|`, with `B* = :φ²:(ḡ)`.
    pub hermiticity_defect: f64,
    pub l1_norm: f64,
}

/// Sample the continued vacuum element and the crossed element of `:φ²:(g)`.
pub fn form_factor(g: &WedgeTestFn, mass: f64, theta1: &[f64], theta2: &[f64]) -> Result<FormFactor> {
    if !(mass > 0.0) {
        return Err(Error::Config(format!("mass must be positive, got {mass}")));
    }
    if !g.in_right_wedge() {
        return Err(Error::Domain("crossing needs a right-wedge test function".into()));
    }
    let polar = TransformRule::new(g, Rule::Polar);
    let cart = TransformRule::new(g, Rule::Cartesian);
    let adjoint = TransformRule::new(&g.modulated(-g.modulation), Rule::Cartesian);
    let real = |t: f64| on_shell(mass, Complex64::new(t, 0.0));
    let rows = theta1
        .par_iter()
        .map(|&t1| {
            let (a0, a1) = on_shell(mass, Complex64::new(t1, PI));
            let p1 = real(t1);
            let mut continued = Vec::with_capacity(theta2.len());
            let mut crossed = Vec::with_capacity(theta2.len());
            let mut herm: f64 = 0.0;
            for &t2 in theta2 {
                let p2 = real(t2);
                let c = 2.0 * polar.transform(a0 + p2.0, a1 + p2.1);
                if c.norm() > 2.0 * polar.l1_norm() * (1.0 + LEAK_TOLERANCE) {
                    return Err(Error::Domain(format!("continuation leaves the strip bound at ({t1}, {t2})")));
                }
                let x = 2.0 * cart.transform(p2.0 - p1.0, p2.1 - p1.1);
                let y = 2.0 * adjoint.transform(p1.0 - p2.0, p1.1 - p2.1);
                herm = herm.max((x - y.conj()).norm());
                continued.push(c);
                crossed.push(x);
            }
            Ok((continued, crossed, herm))
        })
        .collect::<Result<Vec<_>>>()?;
    let hermiticity_defect = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    let (continued, crossed) = rows.into_iter().map(|r| (r.0, r.1)).unzip();
    Ok(FormFactor {
        mass,
        theta1: theta1.to_vec(),
        theta2: theta2.to_vec(),
        continued,
        crossed,
        hermiticity_defect,
        l1_norm: cart.l1_norm(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub mass: f64,
    pub grid_points: usize,
    pub max_rel_defect: f64,
    /// Largest crossed matrix element on the grid.
    pub max_crossed: f64,
    pub hermiticity_defect: f64,
}

impl FormFactor {
    /// Pointwise relative defect between the continued and crossed elements,
    /// compared absolutely below `DEFECT_FLOOR · ‖g‖₁`.
    pub fn crossing_report(&self) -> CrossingReport {
        let floor = DEFECT_FLOOR * self.l1_norm;
        let pairs = self.continued.iter().flatten().zip(self.crossed.iter().flatten());
        let (mut worst, mut biggest): (f64, f64) = (0.0, 0.0);
        for (c, x) in pairs {
            worst = worst.max(rel_defect(*c, *x, floor));
            biggest = biggest.max(x.norm());
        }
        CrossingReport {
            mass: self.mass,
            grid_points: self.theta1.len() * self.theta2.len(),
            max_rel_defect: worst,
            max_crossed: biggest,
            hermiticity_defect: self.hermiticity_defect,
        }
    }
}

/// `⟨0|:φ²:(g)|θ₁, θ₂⟩ = 2ĝ(p₁ + p₂)` continued to `θ₁ + iπ` (polar rule)
/// against `⟨θ₁|:φ²:(g)|θ₂⟩ = 2ĝ(p₂ − p₁)` (Cartesian rule).
pub fn free_crossing_check(g: &WedgeTestFn, mass: f64, theta1: &[f64], theta2: &[f64]) -> Result<CrossingReport> {
    Ok(form_factor(g, mass, theta1, theta2)?.crossing_report())
}

/// `n` equally spaced rapidities on `[−Θ, Θ]`.
pub fn rapidity_grid(theta_max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| -theta_max + 2.0 * theta_max * i as f64 / (n.max(2) - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KmsReport {
    /// `⟨Ω| :φ²:(g) φ(f₁) φ(f₂) |Ω⟩` from the vacuum form factor.
    pub lhs: Complex64,
    /// `⟨Δ^{1/2} φ(f₂)Ω, Δ^{1/2} :φ²:(g) φ(f₁)Ω⟩` from the crossed form factor.
    pub rhs: Complex64,
    pub rel_diff: f64,
}

/// Rapidity quadrature for [`kms_free_identity`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KmsGrid {
    pub theta_max: f64,
    pub n: usize,
}

impl Default for KmsGrid {
    fn default() -> Self {
        Self { theta_max: 3.0, n: 49 }
    }
}

/// Free KMS identity for `B = :φ²:(g)` and two wedge-localized fields.
///
/// The left side pairs the creation wave functions `f̃ᵢ(θ) = Fᵢ(−p(θ))` with
/// the vacuum form factor `2ĝ(p₁ + p₂)` (polar rule). The right side uses
/// the modular continuation `θ → θ − iπ` on the one-particle wave functions
/// `f̃₂` and `χ(θ) = ∫ dμ₁ f̃₁ 2ĝ(p₁ − p(θ))` (Cartesian rule, complex
/// rapidities). Both integrals are truncated to the same rapidity window,
/// on which the identity holds pointwise.
pub fn kms_free_identity(g: &WedgeTestFn, f1: &WedgeTestFn, f2: &WedgeTestFn, mass: f64, grid: &KmsGrid) -> Result<KmsReport> {
    for (name, f) in [("g", g), ("f1", f1), ("f2", f2)] {
        if !f.in_right_wedge() {
            return Err(Error::Domain(format!("{name} is not supported in the right wedge")));
        }
    }
    if !(mass > 0.0) {
        return Err(Error::Config(format!("mass must be positive, got {mass}")));
    }
    let theta = rapidity_grid(grid.theta_max, grid.n);
    let h = 2.0 * grid.theta_max / (grid.n - 1) as f64;
    // Trapezoid weights including the invariant measure dθ/4π.
    let w: Vec<f64> = (0..grid.n)
        .map(|i| if i == 0 || i == grid.n - 1 { 0.5 * h } else { h } / (4.0 * PI))
        .collect();
    let real = |t: f64| Complex64::new(t, 0.0);

    let (gp, f1p, f2p) = (
        TransformRule::new(g, Rule::Polar),
        TransformRule::new(f1, Rule::Polar),
        TransformRule::new(f2, Rule::Polar),
    );
    let create = |rule: &TransformRule, t: Complex64| {
        let (k0, k1) = on_shell(mass, t);
        rule.transform(-k0, -k1)
    };
    let a1: Vec<Complex64> = theta.iter().map(|t| create(&f1p, real(*t))).collect();
    let a2: Vec<Complex64> = theta.iter().map(|t| create(&f2p, real(*t))).collect();
    let lhs_rows: Vec<Complex64> = (0..grid.n)
        .into_par_iter()
        .map(|i| {
            let p1 = on_shell(mass, real(theta[i]));
            (0..grid.n)
                .map(|j| {
                    let p2 = on_shell(mass, real(theta[j]));
                    w[i] * w[j] * a1[i] * a2[j] * 2.0 * gp.transform(p1.0 + p2.0, p1.1 + p2.1)
                })
                .sum()
        })
        .collect();
    let lhs: Complex64 = lhs_rows.iter().sum();

    let (gc, f1c, f2c) = (
        TransformRule::new(g, Rule::Cartesian),
        TransformRule::new(f1, Rule::Cartesian),
        TransformRule::new(f2, Rule::Cartesian),
    );
    let b1: Vec<Complex64> = theta.iter().map(|t| create(&f1c, real(*t))).collect();
    let rhs_terms = (0..grid.n)
        .into_par_iter()
        .map(|j| {
            let shifted = Complex64::new(theta[j], -PI);
            let d2 = create(&f2c, shifted);
            if d2.norm() > f2c.l1_norm() * (1.0 + LEAK_TOLERANCE) {
                return Err(Error::Numeric(format!("modular continuation of f2 diverges at {shifted}")));
            }
            let q = on_shell(mass, shifted);
            let chi: Complex64 = (0..grid.n)
                .map(|i| {
                    let p1 = on_shell(mass, real(theta[i]));
                    w[i] * b1[i] * 2.0 * gc.transform(p1.0 - q.0, p1.1 - q.1)
                })
                .sum();
            Ok(w[j] * d2.conj() * chi)
        })
        .collect::<Result<Vec<_>>>()?;
    let rhs: Complex64 = rhs_terms.iter().sum();
    let rel_diff = if lhs.norm() == 0.0 && rhs.norm() == 0.0 {
        0.0
    } else {
        (lhs - rhs).norm() / lhs.norm().max(rhs.norm())
    };
    Ok(KmsReport { lhs, rhs, rel_diff })
}

/// Defects below this level are quadrature round-off and compare as equal.
pub const AGREEMENT_FLOOR: f64 = 1e-9;

/// `max(a, b) / max(min(a, b), AGREEMENT_FLOOR)`: how far apart two defect
/// measurements of the same identity are.
pub fn defect_ratio(a: f64, b: f64) -> f64 {
    a.max(b) / a.min(b).max(AGREEMENT_FLOOR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn g() -> WedgeTestFn {
        WedgeTestFn::new((0.2, 2.0), 0.8).unwrap()
    }

    #[test]
    fn rules_agree_and_match_closed_form_at_zero_momentum() {
        let f = g();
        let a = TransformRule::new(&f, Rule::Cartesian);
        let b = TransformRule::new(&f, Rule::Polar);
        // ∫ bump(|x|/r) d²x = 2π r² ∫₀¹ s e^{1 − 1/(1 − s²)} ds.
        let q = crate::quad::Quadrature::new(1e-16, 1e-14);
        let radial = q.integrate(|s| s * bump(s), 0.0, 1.0).unwrap().value;
        let exact = 2.0 * PI * 0.64 * radial;
        let zero = Complex64::new(0.0, 0.0);
        assert_relative_eq!(a.transform(zero, zero).re, exact, max_relative = 1e-11);
        assert_relative_eq!(b.transform(zero, zero).re, exact, max_relative = 1e-11);
        for k in [(1.0, 0.3), (-2.0, 4.0), (5.0, -1.0)] {
            let k0 = Complex64::new(k.0, 0.1);
            let k1 = Complex64::new(k.1, -0.2);
            assert_relative_eq!((a.transform(k0, k1) - b.transform(k0, k1)).norm(), 0.0, epsilon = 1e-11);
        }
    }

    #[test]
    fn strip_analyticity_and_involution() {
        let r = mass_shell_restrict(&g(), 1.0, &StripGrid::default()).unwrap();
        assert!(r.cr_residual < 1e-8, "{}", r.cr_residual);
        assert!(r.involution_defect.unwrap() < 1e-8);
        let norm = TransformRule::new(&g(), Rule::Cartesian).l1_norm();
        assert!(r.values.iter().flatten().all(|v| v.norm() <= norm));
        let complex = g().modulated(1.5);
        let c = mass_shell_restrict(&complex, 1.0, &StripGrid::default()).unwrap();
        assert!(c.involution_defect.is_none());
        assert!(c.cr_residual < 1e-8);
    }

    #[test]
    fn left_wedge_fails_to_continue() {
        let left = WedgeTestFn::new((0.2, -2.0), 0.8).unwrap();
        assert!(left.in_left_wedge());
        assert!(matches!(mass_shell_restrict(&left, 1.0, &StripGrid::default()), Err(Error::Domain(_))));
        let rule = TransformRule::new(&left, Rule::Cartesian);
        let r = continue_into_strip(&rule, 1.0, Complex64::new(0.0, 0.5 * PI));
        assert!(matches!(r, Err(Error::Numeric(_))));
        assert!(continue_into_strip(&rule, 1.0, Complex64::new(0.3, 0.0)).is_ok());
    }

    #[test]
    fn edge_translation_changes_only_the_phase() {
        let f = g();
        let c = 0.7;
        // Translation along the wedge edge direction (1, 1).
        let moved = f.translated((c, c));
        let a = TransformRule::new(&f, Rule::Cartesian);
        let b = TransformRule::new(&moved, Rule::Cartesian);
        for t in [-1.0, 0.0, 1.3] {
            let z = Complex64::new(t, 0.0);
            let va = continue_into_strip(&a, 1.0, z).unwrap();
            let vb = continue_into_strip(&b, 1.0, z).unwrap();
            assert_relative_eq!(va.norm(), vb.norm(), max_relative = 1e-11);
            let (p0, p1) = on_shell(1.0, z);
            let phase = (-Complex64::i() * (p0 * c - p1 * c)).exp();
            assert_relative_eq!((vb - va * phase).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn crossing_on_rapidity_grid() {
        let grid = rapidity_grid(2.0, 20);
        for f in [g(), WedgeTestFn::new((-0.5, 3.0), 1.0).unwrap(), WedgeTestFn::new((0.0, 1.5), 0.4).unwrap()] {
            let rep = free_crossing_check(&f, 1.0, &grid, &grid).unwrap();
            assert!(rep.max_rel_defect < 1e-6, "{rep:?}");
            assert!(rep.hermiticity_defect < 1e-12 * rep.max_crossed.max(1.0));
            assert_eq!(rep.grid_points, 400);
        }
        let complex = free_crossing_check(&g().modulated(0.8), 1.0, &grid, &grid).unwrap();
        assert!(complex.max_rel_defect < 1e-6 && complex.hermiticity_defect < 1e-12);
        let zero = free_crossing_check(&g().scaled(0.0), 1.0, &grid, &grid).unwrap();
        assert_eq!(zero.max_rel_defect, 0.0);
        assert_eq!(zero.max_crossed, 0.0);
    }

    #[test]
    fn kms_identity_and_swap() {
        let f1 = WedgeTestFn::new((0.0, 2.5), 0.6).unwrap();
        let f2 = WedgeTestFn::new((0.3, 3.0), 0.6).unwrap();
        let grid = KmsGrid { theta_max: 3.0, n: 31 };
        let a = kms_free_identity(&g(), &f1, &f2, 1.0, &grid).unwrap();
        assert!(a.rel_diff < 1e-6, "{a:?}");
        assert!(a.lhs.norm() > 1e-6);
        let b = kms_free_identity(&g(), &f2, &f1, 1.0, &grid).unwrap();
        assert!(b.rel_diff < 1e-6);
        assert_relative_eq!((a.lhs - b.lhs).norm(), 0.0, epsilon = 1e-10 * a.lhs.norm());
    }

    #[test]
    fn kms_sides_decay_together() {
        let f1 = WedgeTestFn::new((0.0, 2.5), 0.6).unwrap();
        let grid = KmsGrid { theta_max: 3.0, n: 31 };
        let mut previous = f64::INFINITY;
        for shift in [0.0, 2.0, 4.0] {
            let f2 = WedgeTestFn::new((0.3, 3.0 + shift), 0.6).unwrap();
            let r = kms_free_identity(&g(), &f1, &f2, 1.0, &grid).unwrap();
            assert!(r.rel_diff < 1e-6);
            assert!(r.lhs.norm() < previous && r.rhs.norm() < previous);
            previous = r.lhs.norm().max(r.rhs.norm());
        }
    }
}
