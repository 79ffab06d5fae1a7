//! Gaussian states of a free lattice scalar.
//!
//! The lattice Hamiltonian is
//! `H = ½ Σ πᵢ² + ½ Σ ((φᵢ₊₁ − φᵢ)²/a² + m² φᵢ²)`, i.e. `H = ½ πᵀπ + ½ φᵀ K φ`
//! with stiffness matrix `K`. Vacuum covariances are `⟨φφ⟩ = ½ K^{-1/2}` and
//! `⟨ππ⟩ = ½ K^{1/2}`; the Gibbs state multiplies both by `coth(βω/2)` mode by
//! mode. For the two built-in boundary conditions the normal modes are known
//! in closed form, so the covariances are assembled in `O(N²)` without a
//! dense eigensolve.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_line, LineFit};
use crate::quad::pairwise_sum;

/// Boundary condition of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Periodic,
    /// Free ends (Neumann): the end sites have a single neighbour.
    Open,
}

/// A one-dimensional harmonic chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HarmonicLattice {
    n_sites: usize,
    mass: f64,
    spacing: f64,
    boundary: Boundary,
    ir_regulator: Option<f64>,
}

/// Allowed range for `m_IR · (n_sites · spacing)` on a massless chain.
pub const IR_REGULATOR_RANGE: (f64, f64) = (1e-4, 1e-2);

impl HarmonicLattice {
    /// A massive chain. A zero mass is rejected here; use [`HarmonicLattice::massless`].
    pub fn new(n_sites: usize, mass: f64, spacing: f64, boundary: Boundary) -> Result<Self> {
        if n_sites < 2 {
            return Err(Error::Config(format!("n_sites must be at least 2, got {n_sites}")));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::Config(format!("spacing must be positive, got {spacing}")));
        }
        if mass == 0.0 {
            return Err(Error::Config(
                "mass = 0 needs an explicit infrared regulator (HarmonicLattice::massless)".into(),
            ));
        }
        if !(mass > 0.0) || !mass.is_finite() {
            return Err(Error::Config(format!("mass must be positive, got {mass}")));
        }
        Ok(Self {
            n_sites,
            mass,
            spacing,
            boundary,
            ir_regulator: None,
        })
    }

    /// A massless chain regulated by `m_ir`, which must satisfy
    /// `m_ir · n_sites · spacing ∈ [1e-4, 1e-2]`.
    pub fn massless(n_sites: usize, spacing: f64, boundary: Boundary, m_ir: f64) -> Result<Self> {
        let mut lattice = Self::new(n_sites, 1.0, spacing, boundary)?;
        let product = m_ir * n_sites as f64 * spacing;
        if !(product >= IR_REGULATOR_RANGE.0 && product <= IR_REGULATOR_RANGE.1) {
            return Err(Error::Config(format!(
                "infrared regulator m_IR * L = {product:e} outside [{:e}, {:e}]",
                IR_REGULATOR_RANGE.0, IR_REGULATOR_RANGE.1
            )));
        }
        lattice.mass = 0.0;
        lattice.ir_regulator = Some(m_ir);
        Ok(lattice)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn ir_regulator(&self) -> Option<f64> {
        self.ir_regulator
    }

    /// Mass entering the dynamics: the physical mass, or the regulator.
    pub fn effective_mass(&self) -> f64 {
        self.ir_regulator.unwrap_or(self.mass)
    }

    /// Physical length `n_sites · spacing`.
    pub fn length(&self) -> f64 {
        self.n_sites as f64 * self.spacing
    }

    /// Normal-mode frequencies in the order of the closed-form mode index.
    pub fn mode_frequencies(&self) -> Vec<f64> {
        let n = self.n_sites as f64;
        let m2 = self.effective_mass().powi(2);
        let a2 = self.spacing * self.spacing;
        (0..self.n_sites)
            .map(|j| {
                let s = match self.boundary {
                    Boundary::Periodic => (PI * j as f64 / n).sin(),
                    Boundary::Open => (PI * j as f64 / (2.0 * n)).sin(),
                };
                (m2 + 4.0 * s * s / a2).sqrt()
            })
            .collect()
    }

    /// Dense stiffness matrix `K` with `H = ½πᵀπ + ½φᵀKφ`.
    pub fn stiffness(&self) -> DMatrix<f64> {
        let n = self.n_sites;
        let inv_a2 = 1.0 / (self.spacing * self.spacing);
        let m2 = self.effective_mass().powi(2);
        let mut k = DMatrix::zeros(n, n);
        let mut bond = |i: usize, j: usize| {
            k[(i, i)] += inv_a2;
            k[(j, j)] += inv_a2;
            k[(i, j)] -= inv_a2;
            k[(j, i)] -= inv_a2;
        };
        for i in 0..n - 1 {
            bond(i, i + 1);
        }
        if self.boundary == Boundary::Periodic {
            bond(n - 1, 0);
        }
        for i in 0..n {
            k[(i, i)] += m2;
        }
        k
    }
}

/// Which global state a covariance set descends from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StateKind {
    Vacuum,
    Thermal { beta: f64 },
}

/// Covariance data of a Gaussian state with zero first moments.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    pub phi_phi: DMatrix<f64>,
    pub pi_pi: DMatrix<f64>,
    pub phi_pi: DMatrix<f64>,
    pub kind: StateKind,
    /// Number of sites of the state this one was restricted from.
    pub parent_sites: usize,
}

impl GaussianState {
    /// Assemble a state from its blocks, checking shapes and symmetry.
    pub fn new(phi_phi: DMatrix<f64>, pi_pi: DMatrix<f64>, phi_pi: DMatrix<f64>, kind: StateKind) -> Result<Self> {
        let n = phi_phi.nrows();
        for (name, m) in [("phi_phi", &phi_phi), ("pi_pi", &pi_pi), ("phi_pi", &phi_pi)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::Domain(format!("{name} has shape {}x{}, expected {n}x{n}", m.nrows(), m.ncols())));
            }
        }
        if n == 0 {
            return Err(Error::Domain("empty covariance matrix".into()));
        }
        for (name, m) in [("phi_phi", &phi_phi), ("pi_pi", &pi_pi)] {
            let scale = m.amax().max(f64::MIN_POSITIVE);
            if (m - m.transpose()).amax() > 1e-12 * scale {
                return Err(Error::Domain(format!("{name} is not symmetric")));
            }
        }
        Ok(Self {
            phi_phi,
            pi_pi,
            phi_pi,
            kind,
            parent_sites: n,
        })
    }

    /// Ground or Gibbs state of `H = ½πᵀπ + ½φᵀKφ` for an arbitrary
    /// symmetric stiffness matrix, through a dense eigendecomposition.
    pub fn from_stiffness(k: &DMatrix<f64>, kind: StateKind) -> Result<Self> {
        let n = k.nrows();
        if n == 0 || k.ncols() != n {
            return Err(Error::Config("stiffness matrix must be square and nonempty".into()));
        }
        let eig = SymmetricEigen::new(k.clone());
        let min = eig.eigenvalues.min();
        if !(min > 0.0) {
            return Err(Error::Config(format!(
                "dynamical matrix is not positive definite (smallest eigenvalue {min:e})"
            )));
        }
        let beta = match kind {
            StateKind::Vacuum => None,
            StateKind::Thermal { beta } => Some(check_beta(beta)?),
        };
        let omegas: Vec<f64> = eig.eigenvalues.iter().map(|l| l.sqrt()).collect();
        let occ: Vec<f64> = omegas.iter().map(|w| occupancy_factor(*w, beta)).collect();
        let v = &eig.eigenvectors;
        let mut x = DMatrix::zeros(n, n);
        let mut p = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sx = 0.0;
                let mut sp = 0.0;
                for (l, w) in omegas.iter().enumerate() {
                    let vv = v[(i, l)] * v[(j, l)] * occ[l];
                    sx += vv / (2.0 * w);
                    sp += vv * w / 2.0;
                }
                x[(i, j)] = sx;
                x[(j, i)] = sx;
                p[(i, j)] = sp;
                p[(j, i)] = sp;
            }
        }
        Self::new(x, p, DMatrix::zeros(n, n), kind)
    }

    pub fn n_modes(&self) -> usize {
        self.phi_phi.nrows()
    }

    /// Full `2n × 2n` covariance `Γ = [[⟨φφ⟩, ⟨½{φ,π}⟩], [·ᵀ, ⟨ππ⟩]]`.
    pub fn covariance(&self) -> DMatrix<f64> {
        let n = self.n_modes();
        let mut g = DMatrix::zeros(2 * n, 2 * n);
        g.view_mut((0, 0), (n, n)).copy_from(&self.phi_phi);
        g.view_mut((n, n), (n, n)).copy_from(&self.pi_pi);
        g.view_mut((0, n), (n, n)).copy_from(&self.phi_pi);
        g.view_mut((n, 0), (n, n)).copy_from(&self.phi_pi.transpose());
        g
    }

    /// Largest entrywise difference over all three blocks.
    pub fn max_abs_diff(&self, other: &GaussianState) -> f64 {
        (&self.phi_phi - &other.phi_phi)
            .amax()
            .max((&self.pi_pi - &other.pi_pi).amax())
            .max((&self.phi_pi - &other.phi_pi).amax())
    }
}

fn check_beta(beta: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Config(format!("beta must be finite and positive, got {beta}")));
    }
    Ok(beta)
}

/// `coth(βω/2)`, or 1 for the vacuum.
fn occupancy_factor(omega: f64, beta: Option<f64>) -> f64 {
    match beta {
        None => 1.0,
        Some(b) => {
            let x = b * omega;
            if x > 40.0 {
                1.0 + 2.0 * (-x).exp()
            } else {
                1.0 / (0.5 * x).tanh()
            }
        }
    }
}

fn closed_form_state(lattice: &HarmonicLattice, beta: Option<f64>) -> Result<GaussianState> {
    let n = lattice.n_sites;
    let omegas = lattice.mode_frequencies();
    if omegas.iter().any(|w| !(*w > 0.0)) {
        return Err(Error::Config("dynamical matrix is not positive definite".into()));
    }
    let nf = n as f64;
    let gx: Vec<f64> = omegas.iter().map(|w| occupancy_factor(*w, beta) / (2.0 * w)).collect();
    let gp: Vec<f64> = omegas.iter().map(|w| occupancy_factor(*w, beta) * w / 2.0).collect();
    let mut x = DMatrix::zeros(n, n);
    let mut p = DMatrix::zeros(n, n);
    match lattice.boundary {
        Boundary::Periodic => {
            // Translation invariant: X_ij = (1/N) Σ_j cos(2π j r / N) g_j with r = i − j.
            let profile = |g: &[f64]| -> Vec<f64> {
                (0..n)
                    .into_par_iter()
                    .map(|r| {
                        let mut s = 0.0;
                        for (j, gj) in g.iter().enumerate() {
                            let phase = ((j * r) % n) as f64 * 2.0 * PI / nf;
                            s += phase.cos() * gj;
                        }
                        s / nf
                    })
                    .collect()
            };
            let tx = profile(&gx);
            let tp = profile(&gp);
            for i in 0..n {
                for j in 0..n {
                    let r = (i + n - j) % n;
                    x[(i, j)] = tx[r];
                    p[(i, j)] = tp[r];
                }
            }
        }
        Boundary::Open => {
            // Modes c_j cos(π j (i+½)/N); the product of two cosines splits
            // into a Toeplitz part in i−k and a Hankel part in i+k+1.
            let profile = |g: &[f64]| -> Vec<f64> {
                (0..2 * n)
                    .into_par_iter()
                    .map(|r| {
                        let mut s = 0.0;
                        for (j, gj) in g.iter().enumerate() {
                            let c2 = if j == 0 { 1.0 / nf } else { 2.0 / nf };
                            let phase = ((j * r) % (2 * n)) as f64 * PI / nf;
                            s += c2 * gj * phase.cos();
                        }
                        0.5 * s
                    })
                    .collect()
            };
            let tx = profile(&gx);
            let tp = profile(&gp);
            for i in 0..n {
                for k in 0..n {
                    let d = i.abs_diff(k);
                    let s = i + k + 1;
                    x[(i, k)] = tx[d] + tx[s];
                    p[(i, k)] = tp[d] + tp[s];
                }
            }
        }
    }
    let kind = match beta {
        None => StateKind::Vacuum,
        Some(beta) => StateKind::Thermal { beta },
    };
    GaussianState::new(x, p, DMatrix::zeros(n, n), kind)
}

/// Ground state of the chain.
pub fn build_vacuum_state(lattice: &HarmonicLattice) -> Result<GaussianState> {
    closed_form_state(lattice, None)
}

/// Gibbs state of the chain at inverse temperature `beta`.
pub fn build_thermal_state(lattice: &HarmonicLattice, beta: f64) -> Result<GaussianState> {
    closed_form_state(lattice, Some(check_beta(beta)?))
}

/// A set of lattice sites, kept in increasing order without repeats.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Region {
    site_indices: Vec<usize>,
}

impl Region {
    pub fn new(mut sites: Vec<usize>) -> Result<Self> {
        sites.sort_unstable();
        sites.dedup();
        if sites.is_empty() {
            return Err(Error::Domain("region is empty".into()));
        }
        Ok(Self { site_indices: sites })
    }

    /// Contiguous interval `[start, start + len)`.
    pub fn interval(start: usize, len: usize) -> Result<Self> {
        Self::new((start..start + len).collect())
    }

    /// Interval of `len` sites centred in a chain of `n_sites`.
    pub fn centered(n_sites: usize, len: usize) -> Result<Self> {
        if len > n_sites {
            return Err(Error::Domain(format!("interval of {len} sites exceeds chain of {n_sites}")));
        }
        Self::interval((n_sites - len) / 2, len)
    }

    pub fn sites(&self) -> &[usize] {
        &self.site_indices
    }

    pub fn len(&self) -> usize {
        self.site_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.site_indices.is_empty()
    }
}

/// Restrict every covariance block to the sites of `region`.
pub fn reduce(state: &GaussianState, region: &Region) -> Result<GaussianState> {
    let n = state.n_modes();
    if let Some(&bad) = region.sites().iter().find(|&&s| s >= n) {
        return Err(Error::Domain(format!("site {bad} outside lattice of {n} sites")));
    }
    let idx = region.sites();
    let pick = |m: &DMatrix<f64>| DMatrix::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])]);
    Ok(GaussianState {
        phi_phi: pick(&state.phi_phi),
        pi_pi: pick(&state.pi_pi),
        phi_pi: pick(&state.phi_pi),
        kind: state.kind,
        parent_sites: state.parent_sites,
    })
}

/// Symplectic eigenvalues of a reduced or full state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModularSpectrum {
    /// Sorted in descending order.
    pub nus: Vec<f64>,
    pub region_size: usize,
}

/// Tolerance below ½ accepted before a spectrum is declared unphysical.
pub const UNCERTAINTY_TOL: f64 = 1e-9;

fn cholesky_or_spectral(m: DMatrix<f64>, what: &str) -> Result<DMatrix<f64>> {
    match m.clone().cholesky() {
        Some(c) => Ok(c.l()),
        None => {
            let min = SymmetricEigen::new(m).eigenvalues.min();
            Err(Error::Spectral {
                message: format!("{what} is not positive definite"),
                eigenvalue: min,
            })
        }
    }
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Symplectic spectrum, i.e. the moduli of the eigenvalues of `iσΓ`.
///
/// With `Γ = LLᵀ` the matrix `σΓ` is similar to the antisymmetric `LᵀσL`,
/// whose singular values are the `ν_k` (each twice). When the mixed block
/// vanishes this reduces to `ν² = eig(LₓᵀPLₓ)` with `⟨φφ⟩ = LₓLₓᵀ`.
pub fn symplectic_spectrum(state: &GaussianState) -> Result<ModularSpectrum> {
    let n = state.n_modes();
    let mut nu2: Vec<f64> = if state.phi_pi.amax() == 0.0 {
        let l = cholesky_or_spectral(state.phi_phi.clone(), "phi_phi block")?;
        let mut m = l.transpose() * &state.pi_pi * &l;
        symmetrize(&mut m);
        SymmetricEigen::new(m).eigenvalues.iter().copied().collect()
    } else {
        let l = cholesky_or_spectral(state.covariance(), "covariance matrix")?;
        let mut omega = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            omega[(i, n + i)] = 1.0;
            omega[(n + i, i)] = -1.0;
        }
        let a = l.transpose() * omega * &l;
        let mut m = a.transpose() * &a;
        symmetrize(&mut m);
        let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        ev.sort_by(|x, y| y.total_cmp(x));
        ev.chunks(2).map(|c| 0.5 * (c[0] + c[c.len() - 1])).collect()
    };
    if let Some(bad) = nu2.iter().copied().find(|v| !(v.is_finite())) {
        return Err(Error::Spectral {
            message: "non-finite symplectic eigenvalue".into(),
            eigenvalue: bad,
        });
    }
    nu2.sort_by(|x, y| y.total_cmp(x));
    let nus: Vec<f64> = nu2.iter().map(|v| v.max(0.0).sqrt()).collect();
    if let Some(&low) = nus.last() {
        if low < 0.5 - UNCERTAINTY_TOL {
            return Err(Error::Spectral {
                message: "symplectic eigenvalue violates the uncertainty bound".into(),
                eigenvalue: low,
            });
        }
    }
    Ok(ModularSpectrum { nus, region_size: n })
}

/// Linear fit attached to a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitMetadata {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl From<LineFit> for FitMetadata {
    fn from(f: LineFit) -> Self {
        Self {
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyResult {
    /// Von Neumann entropy in nats.
    pub entropy: f64,
    pub region_size: usize,
    pub fit_metadata: Option<FitMetadata>,
}

/// Entropy contribution of one symplectic eigenvalue.
pub fn mode_entropy(nu: f64) -> f64 {
    let x = nu - 0.5;
    if x <= 0.0 {
        return 0.0;
    }
    (1.0 + x) * x.ln_1p() - x * x.ln()
}

/// `S = Σ (ν+½)ln(ν+½) − (ν−½)ln(ν−½)`, with `0·ln 0 = 0`.
pub fn entanglement_entropy(spectrum: &ModularSpectrum) -> Result<EntropyResult> {
    if let Some(&bad) = spectrum.nus.iter().find(|&&v| v < 0.5 - UNCERTAINTY_TOL || !v.is_finite()) {
        return Err(Error::Spectral {
            message: "symplectic eigenvalue below 1/2".into(),
            eigenvalue: bad,
        });
    }
    // Sum smallest contributions first.
    let mut terms: Vec<f64> = spectrum.nus.iter().map(|v| mode_entropy(*v)).collect();
    terms.sort_by(f64::total_cmp);
    Ok(EntropyResult {
        entropy: terms.iter().sum(),
        region_size: spectrum.region_size,
        fit_metadata: None,
    })
}

/// Entropy of `state` restricted to `region`.
pub fn region_entropy(state: &GaussianState, region: &Region) -> Result<f64> {
    Ok(entanglement_entropy(&symplectic_spectrum(&reduce(state, region)?)?)?.entropy)
}

/// One row of an entropy scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanPoint {
    /// Physical interval length.
    pub length: f64,
    /// Attenuation length proxy `w · spacing`.
    pub epsilon: f64,
    pub sites: usize,
    pub entropy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyScan {
    pub points: Vec<ScanPoint>,
    /// Fit of `S` against `ln(L/ε)`.
    pub fit: FitMetadata,
    pub results: Vec<EntropyResult>,
}

/// Entropy of centred intervals for every `(L, ε)` pair.
///
/// `template` fixes the physical chain length, the mass (or regulator
/// product) and the boundary. The attenuation length is represented by the
/// lattice cutoff: for each `ε` the chain is rebuilt with spacing `ε / w`,
/// so `w` counts the sites per attenuation length. Lengths must form a nested
/// family, i.e. be given in increasing order.
pub fn entropy_scan(template: &HarmonicLattice, lengths: &[f64], eps_family: &[f64], w: f64) -> Result<EntropyScan> {
    if lengths.len() * eps_family.len() < 4 {
        return Err(Error::Fit(format!(
            "entropy scan needs at least 4 (L, eps) points, got {}",
            lengths.len() * eps_family.len()
        )));
    }
    if lengths.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::Domain("interval lengths must be strictly increasing (nested family)".into()));
    }
    if !(w > 0.0) {
        return Err(Error::Config(format!("ramp width w must be positive, got {w}")));
    }
    let total = template.length();
    let mut points = Vec::new();
    for &eps in eps_family {
        let spacing = eps / w;
        let n = (total / spacing).round() as usize;
        let lattice = match template.ir_regulator() {
            Some(m_ir) => {
                let product = m_ir * template.length();
                HarmonicLattice::massless(n, spacing, template.boundary(), product / (n as f64 * spacing))?
            }
            None => HarmonicLattice::new(n, template.mass(), spacing, template.boundary())?,
        };
        let state = build_vacuum_state(&lattice)?;
        let rows: Vec<Result<ScanPoint>> = lengths
            .par_iter()
            .map(|&len| {
                let sites = (len / spacing).round() as usize;
                if sites == 0 || sites >= n {
                    return Err(Error::Domain(format!("interval of {sites} sites does not fit a chain of {n}")));
                }
                let entropy = region_entropy(&state, &Region::centered(n, sites)?)?;
                Ok(ScanPoint {
                    length: len,
                    epsilon: eps,
                    sites,
                    entropy,
                })
            })
            .collect();
        for r in rows {
            points.push(r?);
        }
    }
    let x: Vec<f64> = points.iter().map(|p| (p.length / p.epsilon).ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.entropy).collect();
    let fit: FitMetadata = fit_line(&x, &y, 4)?.into();
    let results = points
        .iter()
        .map(|p| EntropyResult {
            entropy: p.entropy,
            region_size: p.sites,
            fit_metadata: Some(fit),
        })
        .collect();
    Ok(EntropyScan { points, fit, results })
}

/// Entropies of centred intervals of the given site counts in one state.
pub fn interval_entropies(state: &GaussianState, sizes: &[usize]) -> Result<Vec<f64>> {
    let n = state.n_modes();
    sizes
        .par_iter()
        .map(|&l| region_entropy(state, &Region::centered(n, l)?))
        .collect()
}

/// Vacuum variance of the lattice partial charge of a complex scalar on a
/// periodic chain, by direct summation over particle-antiparticle modes.
///
/// `profile` is the spatial smearing in coordinates centred on the chain, and
/// time smearing is the unit-normalised Gaussian of width `t_width`.
pub fn lattice_charge_variance(lattice: &HarmonicLattice, profile: impl Fn(f64) -> f64, t_width: f64) -> Result<f64> {
    if lattice.boundary() != Boundary::Periodic {
        return Err(Error::Domain("lattice charge variance needs a periodic chain".into()));
    }
    if !(t_width > 0.0) {
        return Err(Error::Domain(format!("time width must be positive, got {t_width}")));
    }
    let n = lattice.n_sites();
    let a = lattice.spacing();
    let omega = lattice.mode_frequencies();
    let samples: Vec<f64> = (0..n).map(|j| profile((j as f64 - 0.5 * n as f64) * a)).collect();
    // |f̃(k_j)|² for every total momentum index j.
    let ft2: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut re = 0.0;
            let mut im = 0.0;
            for (s, f) in samples.iter().enumerate() {
                let phase = -2.0 * PI * ((j * s) % n) as f64 / n as f64;
                re += f * phase.cos();
                im += f * phase.sin();
            }
            a * a * (re * re + im * im)
        })
        .collect();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|j| {
            let w = omega[j];
            let terms: Vec<f64> = (0..n)
                .map(|jp| {
                    let wp = omega[jp];
                    let g2 = (-(w + wp).powi(2) * t_width * t_width).exp();
                    ft2[(j + jp) % n] * (w - wp).powi(2) / (4.0 * w * wp) * g2
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let len = lattice.length();
    Ok(pairwise_sum(&rows) / (len * len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn coth(x: f64) -> f64 {
        1.0 / x.tanh()
    }

    #[test]
    fn single_decoupled_oscillator() {
        let k = DMatrix::from_element(1, 1, 1.0);
        let s = GaussianState::from_stiffness(&k, StateKind::Vacuum).unwrap();
        assert_relative_eq!(s.phi_phi[(0, 0)], 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.pi_pi[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn two_site_periodic_matches_hand_diagonalization() {
        // Both periodic bonds join sites 0 and 1: K = [[3, -2], [-2, 3]].
        // Modes (1,1)/√2 with ω² = 1 and (1,-1)/√2 with ω² = 5.
        let lat = HarmonicLattice::new(2, 1.0, 1.0, Boundary::Periodic).unwrap();
        let s = build_vacuum_state(&lat).unwrap();
        let w_plus: f64 = 1.0;
        let w_minus: f64 = (1.0f64 + 4.0).sqrt();
        let diag_x = 0.25 * (1.0 / (2.0 * w_plus) + 1.0 / (2.0 * w_minus)) * 2.0;
        let off_x = 0.25 * (1.0 / (2.0 * w_plus) - 1.0 / (2.0 * w_minus)) * 2.0;
        assert_relative_eq!(s.phi_phi[(0, 0)], diag_x, epsilon = 1e-14);
        assert_relative_eq!(s.phi_phi[(0, 1)], off_x, epsilon = 1e-14);
        let diag_p = 0.5 * (w_plus / 2.0 + w_minus / 2.0);
        assert_relative_eq!(s.pi_pi[(1, 1)], diag_p, epsilon = 1e-14);
    }

    #[test]
    fn closed_form_agrees_with_dense_eigensolve() {
        for boundary in [Boundary::Periodic, Boundary::Open] {
            let lat = HarmonicLattice::new(17, 0.3, 0.7, boundary).unwrap();
            let fast = build_thermal_state(&lat, 2.5).unwrap();
            let slow = GaussianState::from_stiffness(&lat.stiffness(), StateKind::Thermal { beta: 2.5 }).unwrap();
            assert!(fast.max_abs_diff(&slow) < 1e-12, "{boundary:?}");
        }
    }

    #[test]
    fn vacuum_is_pure() {
        for boundary in [Boundary::Periodic, Boundary::Open] {
            let lat = HarmonicLattice::new(64, 0.5, 1.0, boundary).unwrap();
            let spec = symplectic_spectrum(&build_vacuum_state(&lat).unwrap()).unwrap();
            assert!(spec.nus.iter().all(|v| (v - 0.5).abs() < 1e-10));
            assert!(entanglement_entropy(&spec).unwrap().entropy < 1e-8);
        }
    }

    #[test]
    fn thermal_single_mode_matches_bose_occupancy() {
        let k = DMatrix::from_element(1, 1, 1.0);
        let s = GaussianState::from_stiffness(&k, StateKind::Thermal { beta: 1.0 }).unwrap();
        let nu = symplectic_spectrum(&s).unwrap().nus[0];
        let nbar = 1.0 / (1.0f64.exp() - 1.0);
        assert_relative_eq!(nu, nbar + 0.5, epsilon = 1e-13);
        assert_relative_eq!(nu, 1.0819767068693265, epsilon = 1e-12);
        let entropy = entanglement_entropy(&symplectic_spectrum(&s).unwrap()).unwrap().entropy;
        // S = (n̄+1)ln(n̄+1) − n̄ ln n̄ for a thermal oscillator.
        let oracle = (nbar + 1.0) * (nbar + 1.0).ln() - nbar * nbar.ln();
        assert_relative_eq!(entropy, oracle, epsilon = 1e-12);
        assert!((entropy - 1.041).abs() < 1e-3);
    }

    #[test]
    fn thermal_state_has_impure_modes_and_vacuum_limit() {
        let lat = HarmonicLattice::new(32, 1.0, 1.0, Boundary::Periodic).unwrap();
        let th = build_thermal_state(&lat, 3.0).unwrap();
        let nus = symplectic_spectrum(&th).unwrap().nus;
        assert!(nus.iter().all(|v| *v > 0.5));
        let omegas = lat.mode_frequencies();
        let mut expect: Vec<f64> = omegas.iter().map(|w| 0.5 * coth(1.5 * w)).collect();
        expect.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in nus.iter().zip(&expect) {
            assert_relative_eq!(a, b, epsilon = 1e-11);
        }
        let cold = build_thermal_state(&lat, 1e6).unwrap();
        assert!(cold.max_abs_diff(&build_vacuum_state(&lat).unwrap()) < 1e-6);
    }

    #[test]
    fn reduction_behaviour() {
        let lat = HarmonicLattice::new(2, 1.0, 1.0, Boundary::Open).unwrap();
        let vac = build_vacuum_state(&lat).unwrap();
        let all = Region::new(vec![1, 0]).unwrap();
        assert_eq!(reduce(&vac, &all).unwrap(), vac);

        // Coupled pair, keep site 0: ν = ½ sqrt(X₀₀ P₀₀) · 2 by the 2-site closed form.
        let w1: f64 = 1.0;
        let w2: f64 = (1.0f64 + 2.0).sqrt();
        let x00 = 0.5 * (1.0 / (2.0 * w1) + 1.0 / (2.0 * w2));
        let p00 = 0.5 * (w1 / 2.0 + w2 / 2.0);
        let nu = symplectic_spectrum(&reduce(&vac, &Region::new(vec![0]).unwrap()).unwrap()).unwrap().nus[0];
        assert_relative_eq!(nu, (x00 * p00).sqrt(), epsilon = 1e-14);
        assert!(nu > 0.5 + 1e-3);

        let decoupled = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 4.0]));
        let prod = GaussianState::from_stiffness(&decoupled, StateKind::Vacuum).unwrap();
        let nu = symplectic_spectrum(&reduce(&prod, &Region::new(vec![0]).unwrap()).unwrap()).unwrap().nus[0];
        assert_relative_eq!(nu, 0.5, epsilon = 1e-14);

        assert!(matches!(Region::new(vec![]), Err(Error::Domain(_))));
        assert!(matches!(reduce(&vac, &Region::new(vec![5]).unwrap()), Err(Error::Domain(_))));
    }

    #[test]
    fn entropy_additive_over_uncoupled_blocks() {
        let k = DMatrix::from_row_slice(4, 4, &[
            3.0, -1.0, 0.0, 0.0, //
            -1.0, 3.0, 0.0, 0.0, //
            0.0, 0.0, 2.0, -0.5, //
            0.0, 0.0, -0.5, 2.0,
        ]);
        let th = GaussianState::from_stiffness(&k, StateKind::Thermal { beta: 0.7 }).unwrap();
        let s = |sites: Vec<usize>| region_entropy(&th, &Region::new(sites).unwrap()).unwrap();
        assert_relative_eq!(s(vec![0, 1, 2, 3]), s(vec![0, 1]) + s(vec![2, 3]), epsilon = 1e-12);
    }

    #[test]
    fn mode_entropy_values() {
        assert_eq!(mode_entropy(0.5), 0.0);
        let nu: f64 = 1.0820;
        let direct = (nu + 0.5) * (nu + 0.5).ln() - (nu - 0.5) * (nu - 0.5).ln();
        assert_relative_eq!(mode_entropy(nu), direct, epsilon = 1e-14);
        assert!(matches!(
            entanglement_entropy(&ModularSpectrum { nus: vec![0.4], region_size: 1 }),
            Err(Error::Spectral { .. })
        ));
    }

    #[test]
    fn indefinite_covariance_reports_eigenvalue() {
        let bad = GaussianState::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]),
            DMatrix::identity(2, 2),
            DMatrix::zeros(2, 2),
            StateKind::Vacuum,
        )
        .unwrap();
        match symplectic_spectrum(&bad) {
            Err(Error::Spectral { eigenvalue, .. }) => assert_relative_eq!(eigenvalue, -1.0, epsilon = 1e-12),
            other => panic!("expected spectral error, got {other:?}"),
        }
    }

    #[test]
    fn general_path_matches_fast_path() {
        let lat = HarmonicLattice::new(12, 0.8, 1.0, Boundary::Open).unwrap();
        let th = build_thermal_state(&lat, 1.3).unwrap();
        let fast = symplectic_spectrum(&th).unwrap();
        // A symplectic shear φ → φ, π → π + cφ keeps the spectrum and fills the mixed block.
        let c = 0.3;
        let x = th.phi_phi.clone();
        let p = &th.pi_pi + &x * (c * c);
        let xp = &x * c;
        let sheared = GaussianState::new(x, p, xp, th.kind).unwrap();
        let general = symplectic_spectrum(&sheared).unwrap();
        for (a, b) in fast.nus.iter().zip(&general.nus) {
            assert_relative_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn massless_chain_requires_regulator_in_range() {
        assert!(matches!(
            HarmonicLattice::new(10, 0.0, 1.0, Boundary::Open),
            Err(Error::Config(_))
        ));
        assert!(HarmonicLattice::massless(1000, 1.0, Boundary::Open, 1e-6).is_ok());
        assert!(HarmonicLattice::massless(1000, 1.0, Boundary::Open, 1e-3).is_err());
        assert!(HarmonicLattice::new(1, 1.0, 1.0, Boundary::Open).is_err());
        assert!(build_thermal_state(&HarmonicLattice::new(4, 1.0, 1.0, Boundary::Open).unwrap(), 0.0).is_err());
    }

    #[test]
    fn interval_entropy_grows_with_length() {
        let lat = HarmonicLattice::massless(400, 1.0, Boundary::Periodic, 1e-5).unwrap();
        let vac = build_vacuum_state(&lat).unwrap();
        let s = interval_entropies(&vac, &[4, 8, 16, 32]).unwrap();
        assert!(s.windows(2).all(|p| p[1] > p[0]));
        assert!(s.iter().all(|v| *v > 1e-6));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn spectrum_invariant_under_relabeling(seed in 0u64..1000) {
            let lat = HarmonicLattice::new(10, 0.6, 1.0, Boundary::Open).unwrap();
            let vac = build_vacuum_state(&lat).unwrap();
            let mut perm: Vec<usize> = (0..5).collect();
            let mut s = seed;
            for i in (1..perm.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let base = reduce(&vac, &Region::interval(2, 5).unwrap()).unwrap();
            let pick = |m: &DMatrix<f64>| DMatrix::from_fn(5, 5, |i, j| m[(perm[i], perm[j])]);
            let relabeled = GaussianState::new(pick(&base.phi_phi), pick(&base.pi_pi), pick(&base.phi_pi), base.kind).unwrap();
            let a = symplectic_spectrum(&base).unwrap().nus;
            let b = symplectic_spectrum(&relabeled).unwrap().nus;
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }

        #[test]
        fn uncertainty_bound_holds(n in 2usize..40, mass in 0.05f64..3.0, beta in 0.1f64..20.0, start in 0usize..20, len in 1usize..20) {
            let lat = HarmonicLattice::new(n, mass, 1.0, Boundary::Periodic).unwrap();
            let st = build_thermal_state(&lat, beta).unwrap();
            let s = start % n;
            let l = len.min(n - s);
            let spec = symplectic_spectrum(&reduce(&st, &Region::interval(s, l).unwrap()).unwrap()).unwrap();
            prop_assert!(spec.nus.iter().all(|v| *v >= 0.5 - UNCERTAINTY_TOL));
        }
    }
}
