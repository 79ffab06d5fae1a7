//! Plateau smearing functions `f_{R,ΔR}` and the generic interface the
//! variance engines integrate against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the ramp joining the plateau to zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// `ψ(t) = ½[1 + tanh(½(1/(1−t) − 1/t))]`, smooth to all orders.
    SmoothBump,
    /// `ψ(t) = ½(1 − cos πt)`, C¹ with jumps in the second derivative.
    RaisedCosine,
}

impl Profile {
    /// `(ψ, ψ', ψ'')` at `t`, clamped to the constant pieces outside `(0, 1)`.
    pub fn eval(self, t: f64) -> (f64, f64, f64) {
        if t <= 0.0 {
            return (0.0, 0.0, 0.0);
        }
        if t >= 1.0 {
            return (1.0, 0.0, 0.0);
        }
        match self {
            Profile::RaisedCosine => {
                let pt = std::f64::consts::PI * t;
                let pi = std::f64::consts::PI;
                (0.5 * (1.0 - pt.cos()), 0.5 * pi * pt.sin(), 0.5 * pi * pi * pt.cos())
            }
            Profile::SmoothBump => {
                let s = 1.0 - t;
                let g = 0.5 * (1.0 / s - 1.0 / t);
                if g.abs() > 350.0 {
                    return (if g > 0.0 { 1.0 } else { 0.0 }, 0.0, 0.0);
                }
                let g1 = 0.5 * (1.0 / (s * s) + 1.0 / (t * t));
                let g2 = 1.0 / (s * s * s) - 1.0 / (t * t * t);
                let e = (-2.0 * g.abs()).exp();
                let th = g.signum() * (1.0 - e) / (1.0 + e);
                let sech2 = 4.0 * e / ((1.0 + e) * (1.0 + e));
                // ½(1 + tanh g) written to keep precision on the lower tail.
                let psi = if g < 0.0 { e / (1.0 + e) } else { 1.0 / (1.0 + e) };
                (psi, 0.5 * sech2 * g1, 0.5 * sech2 * (g2 - 2.0 * th * g1 * g1))
            }
        }
    }
}

/// A real test function on the line with two continuous derivatives almost
/// everywhere and compact support.
pub trait Smearing: Sync {
    fn value(&self, u: f64) -> f64;
    fn d1(&self, u: f64) -> f64;
    fn d2(&self, u: f64) -> f64;
    /// Sorted points where the function may fail to be smooth, starting and
    /// ending with the support boundary.
    fn breakpoints(&self) -> Vec<f64>;

    fn support(&self) -> (f64, f64) {
        let b = self.breakpoints();
        (b[0], b[b.len() - 1])
    }
}

/// `f(u) = A·ψ((R + ΔR − |u − c|)/ΔR)`: equal to `A` on the plateau
/// `|u − c| ≤ R` and zero beyond `R + ΔR`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmearingFn {
    pub center: f64,
    pub plateau_halfwidth: f64,
    pub ramp_width: f64,
    pub profile: Profile,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl SmearingFn {
    pub fn new(center: f64, plateau_halfwidth: f64, ramp_width: f64, profile: Profile) -> Result<Self> {
        if !(plateau_halfwidth > 0.0) || !plateau_halfwidth.is_finite() {
            return Err(Error::Domain(format!("plateau half-width must be positive, got {plateau_halfwidth}")));
        }
        if !(ramp_width > 0.0) || !ramp_width.is_finite() {
            return Err(Error::Domain(format!("ramp width must be positive, got {ramp_width}")));
        }
        if !center.is_finite() {
            return Err(Error::Domain("center must be finite".into()));
        }
        Ok(Self {
            center,
            plateau_halfwidth,
            ramp_width,
            profile,
            amplitude: 1.0,
        })
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.amplitude *= factor;
        self
    }

    pub fn translated(mut self, shift: f64) -> Self {
        self.center += shift;
        self
    }

    /// `u ↦ f(λu)`.
    pub fn dilated(mut self, lambda: f64) -> Self {
        self.center /= lambda;
        self.plateau_halfwidth /= lambda;
        self.ramp_width /= lambda;
        self
    }

    /// Outer radius `R + ΔR`.
    pub fn outer(&self) -> f64 {
        self.plateau_halfwidth + self.ramp_width
    }

    /// Radial profile at distance `r ≥ 0` from the centre, with derivatives in `r`.
    pub fn radial(&self, r: f64) -> (f64, f64, f64) {
        let t = (self.outer() - r) / self.ramp_width;
        let (p, p1, p2) = self.profile.eval(t);
        let dr = self.ramp_width;
        (self.amplitude * p, -self.amplitude * p1 / dr, self.amplitude * p2 / (dr * dr))
    }
}

impl Smearing for SmearingFn {
    fn value(&self, u: f64) -> f64 {
        self.radial((u - self.center).abs()).0
    }

    fn d1(&self, u: f64) -> f64 {
        let d = u - self.center;
        let (_, f1, _) = self.radial(d.abs());
        if d >= 0.0 {
            f1
        } else {
            -f1
        }
    }

    fn d2(&self, u: f64) -> f64 {
        self.radial((u - self.center).abs()).2
    }

    fn breakpoints(&self) -> Vec<f64> {
        let c = self.center;
        let r = self.plateau_halfwidth;
        let o = self.outer();
        vec![c - o, c - r, c + r, c + o]
    }
}
