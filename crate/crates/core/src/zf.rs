//! Scalar two-particle S-matrices and a truncated rapidity Fock space
//! realizing the Zamolodchikov-Faddeev algebra
//! `Z*(θ₁)Z*(θ₂) = S(θ₁ − θ₂) Z*(θ₂)Z*(θ₁)`.
//!
//! A k-particle vector is stored by its values on ordered grid tuples
//! `θ₁ ≥ θ₂ ≥ … ≥ θ_k`. The full function on arbitrary tuples follows from
//! `Φ(…, b, a, …) = S(a − b) Φ(…, a, b, …)`, and the inner product is the
//! grid sum over all tuples, i.e. ordered tuples weighted by their number of
//! distinct permutations.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SMatrixModel {
    /// `S ≡ 1`.
    Free,
    /// `S(θ) = (sinh θ − i sin b)/(sinh θ + i sin b)`.
    SinhGordon { coupling: f64 },
}

impl SMatrixModel {
    pub fn sinh_gordon(coupling: f64) -> Result<Self> {
        if !(coupling > 0.0 && coupling < PI) {
            return Err(Error::Config(format!("coupling b must lie in (0, pi), got {coupling}")));
        }
        Ok(Self::SinhGordon { coupling })
    }

    pub fn eval(&self, theta: Complex64) -> Complex64 {
        match *self {
            Self::Free => Complex64::new(1.0, 0.0),
            Self::SinhGordon { coupling } => {
                let s = theta.sinh();
                let c = Complex64::new(0.0, coupling.sin());
                (s - c) / (s + c)
            }
        }
    }

    pub fn at(&self, theta: f64) -> Complex64 {
        self.eval(Complex64::new(theta, 0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SMatrixReport {
    pub model: SMatrixModel,
    /// `max |  |S(θ)| − 1 |` over real points.
    pub unitarity: f64,
    /// `max |S(θ)S(−θ) − 1|`.
    pub inversion: f64,
    /// `max |S(iπ − θ) − S(θ)|`.
    pub crossing: f64,
    pub points: usize,
}

impl SMatrixReport {
    pub fn max_defect(&self) -> f64 {
        self.unitarity.max(self.inversion).max(self.crossing)
    }
}

/// Unitarity on `real`, inversion and crossing symmetry on `real` and `complex`.
pub fn smatrix_properties(model: &SMatrixModel, real: &[f64], complex: &[Complex64]) -> SMatrixReport {
    let mut unitarity: f64 = 0.0;
    for &t in real {
        unitarity = unitarity.max((model.at(t).norm() - 1.0).abs());
    }
    let all: Vec<Complex64> = real.iter().map(|&t| Complex64::new(t, 0.0)).chain(complex.iter().copied()).collect();
    let (mut inversion, mut crossing): (f64, f64) = (0.0, 0.0);
    let ipi = Complex64::new(0.0, PI);
    for &z in &all {
        let s = model.eval(z);
        inversion = inversion.max((s * model.eval(-z) - 1.0).norm());
        crossing = crossing.max((model.eval(ipi - z) - s).norm());
    }
    SMatrixReport {
        model: *model,
        unitarity,
        inversion,
        crossing,
        points: all.len(),
    }
}

/// Rapidity grid, S-matrix table and ordered-tuple index tables up to `k_max + 1`.
#[derive(Debug)]
pub struct ZfSpace {
    model: SMatrixModel,
    theta: Vec<f64>,
    step: f64,
    k_max: usize,
    smat: Vec<Complex64>,
    binom: Vec<Vec<usize>>,
    tuples: Vec<Vec<u16>>,
    mult: Vec<Vec<f64>>,
}

fn binomials(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut b = vec![vec![0usize; r + 1]; n + 1];
    for i in 0..=n {
        b[i][0] = 1;
        for j in 1..=r.min(i) {
            b[i][j] = b[i - 1][j - 1] + if j < i { b[i - 1][j] } else { 0 };
        }
    }
    b
}

fn multiplicity(tuple: &[u16]) -> f64 {
    let k = tuple.len();
    let mut m: f64 = (1..=k).map(|i| i as f64).product();
    let mut run = 1;
    for i in 1..=k {
        if i < k && tuple[i] == tuple[i - 1] {
            run += 1;
        } else {
            m /= (1..=run).map(|i| i as f64).product::<f64>();
            run = 1;
        }
    }
    m
}

impl ZfSpace {
    /// `n_grid` midpoints on `[−Θ, Θ]`.
    pub fn new(model: SMatrixModel, theta_max: f64, n_grid: usize, k_max: usize) -> Result<Arc<Self>> {
        if !(theta_max > 0.0) || n_grid < 2 || n_grid > u16::MAX as usize {
            return Err(Error::Config(format!("invalid rapidity grid: theta_max {theta_max}, {n_grid} points")));
        }
        if k_max == 0 || k_max > 6 {
            return Err(Error::Config(format!("k_max must be in 1..=6, got {k_max}")));
        }
        let step = 2.0 * theta_max / n_grid as f64;
        let theta: Vec<f64> = (0..n_grid).map(|i| -theta_max + (i as f64 + 0.5) * step).collect();
        let mut smat = Vec::with_capacity(n_grid * n_grid);
        for a in &theta {
            for b in &theta {
                smat.push(model.at(a - b));
            }
        }
        let binom = binomials(n_grid + k_max + 1, k_max + 1);
        let mut space = Self {
            model,
            theta,
            step,
            k_max,
            smat,
            binom,
            tuples: Vec::new(),
            mult: Vec::new(),
        };
        for k in 0..=k_max + 1 {
            let count = space.sector_len(k);
            let mut flat = vec![0u16; count * k];
            let mut mult = vec![0.0; count];
            let mut cur = vec![0u16; k];
            space.fill(k, 0, n_grid as u16, &mut cur, &mut flat, &mut mult);
            space.tuples.push(flat);
            space.mult.push(mult);
        }
        Ok(Arc::new(space))
    }

    fn fill(&self, k: usize, pos: usize, bound: u16, cur: &mut Vec<u16>, flat: &mut [u16], mult: &mut [f64]) {
        if pos == k {
            let r = self.rank(cur);
            flat[r * k..(r + 1) * k].copy_from_slice(cur);
            mult[r] = multiplicity(cur);
            return;
        }
        for i in 0..bound {
            cur[pos] = i;
            self.fill(k, pos + 1, i + 1, cur, flat, mult);
        }
    }

    pub fn model(&self) -> SMatrixModel {
        self.model
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// Number of ordered k-tuples, `C(M + k − 1, k)`.
    pub fn sector_len(&self, k: usize) -> usize {
        self.binom[(self.theta.len() + k).saturating_sub(1)][k]
    }

    /// Position of a non-increasing index tuple in its sector.
    pub fn rank(&self, tuple: &[u16]) -> usize {
        let k = tuple.len();
        tuple
            .iter()
            .enumerate()
            .map(|(l, &i)| self.binom[i as usize + k - 1 - l][k - l])
            .sum()
    }

    pub fn tuple(&self, k: usize, rank: usize) -> &[u16] {
        &self.tuples[k][rank * k..(rank + 1) * k]
    }

    /// `S(θ_a − θ_b)` on grid indices.
    pub fn s(&self, a: u16, b: u16) -> Complex64 {
        self.smat[a as usize * self.theta.len() + b as usize]
    }
}

/// Wave packet sampled on the rapidity grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Packet {
    pub values: Vec<Complex64>,
}

impl Packet {
    pub fn from_fn(space: &ZfSpace, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            values: space.theta.iter().map(|&t| f(t)).collect(),
        }
    }

    pub fn gaussian(space: &ZfSpace, center: f64, width: f64, momentum: f64) -> Self {
        Self::from_fn(space, |t| {
            Complex64::from_polar((-(t - center).powi(2) / (2.0 * width * width)).exp(), momentum * t)
        })
    }

    /// Compact bump `exp(1 − 1/(1 − s²))`, `s = (θ − c)/w`.
    pub fn bump(space: &ZfSpace, center: f64, half_width: f64) -> Self {
        Self::from_fn(space, |t| {
            let s = (t - center) / half_width;
            Complex64::new(if s.abs() < 1.0 { (1.0 - 1.0 / (1.0 - s * s)).exp() } else { 0.0 }, 0.0)
        })
    }

    /// Grid inner product `Σ h conj(f) g`.
    pub fn inner(&self, other: &Packet, space: &ZfSpace) -> Complex64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.conj() * b).sum::<Complex64>() * space.step
    }

    fn support(&self) -> Option<(usize, usize)> {
        let lo = self.values.iter().position(|v| v.norm() > 0.0)?;
        let hi = self.values.iter().rposition(|v| v.norm() > 0.0)?;
        Some((lo, hi))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZfOp {
    Create,
    Annihilate,
}

/// Leaked norm above which truncation is an error.
pub const TRUNCATION_TOLERANCE: f64 = 1e-8;

/// Particle-number-truncated vector; operations return new states.
#[derive(Debug, Clone)]
pub struct ZfState {
    space: Arc<ZfSpace>,
    sectors: Vec<Vec<Complex64>>,
    /// Norm dropped into `k_max + 1` along the history of this state.
    pub leaked: f64,
}

impl ZfState {
    pub fn zero(space: &Arc<ZfSpace>) -> Self {
        let sectors = (0..=space.k_max).map(|k| vec![Complex64::new(0.0, 0.0); space.sector_len(k)]).collect();
        Self {
            space: Arc::clone(space),
            sectors,
            leaked: 0.0,
        }
    }

    pub fn vacuum(space: &Arc<ZfSpace>) -> Self {
        let mut s = Self::zero(space);
        s.sectors[0][0] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn space(&self) -> &Arc<ZfSpace> {
        &self.space
    }

    pub fn sector(&self, k: usize) -> &[Complex64] {
        &self.sectors[k]
    }

    /// Value on an ordered index tuple.
    pub fn value(&self, tuple: &[u16]) -> Complex64 {
        self.sectors[tuple.len()][self.space.rank(tuple)]
    }

    /// Value of the full S-symmetric function on an arbitrary index tuple.
    pub fn full_value(&self, tuple: &[u16]) -> Complex64 {
        let mut t = tuple.to_vec();
        let mut phase = Complex64::new(1.0, 0.0);
        // Bubble sort into non-increasing order, one adjacent swap at a time.
        for i in 0..t.len() {
            for j in 0..t.len() - 1 - i {
                if t[j] < t[j + 1] {
                    phase *= self.space.s(t[j + 1], t[j]);
                    t.swap(j, j + 1);
                }
            }
        }
        phase * self.value(&t)
    }

    pub fn inner(&self, other: &ZfState) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for k in 0..self.sectors.len() {
            let hk = self.space.step.powi(k as i32);
            total += self.sectors[k]
                .iter()
                .zip(&other.sectors[k])
                .zip(&self.space.mult[k])
                .map(|((a, b), m)| a.conj() * b * m)
                .sum::<Complex64>()
                * hk;
        }
        total
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn particle_number_weights(&self) -> Vec<f64> {
        (0..self.sectors.len())
            .map(|k| {
                let hk = self.space.step.powi(k as i32);
                self.sectors[k].iter().zip(&self.space.mult[k]).map(|(a, m)| a.norm_sqr() * m).sum::<f64>() * hk
            })
            .collect()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut s = self.clone();
        s.sectors.iter_mut().flatten().for_each(|v| *v *= c);
        s
    }

    pub fn plus(&self, other: &ZfState, c: Complex64) -> Self {
        let mut s = self.clone();
        for (a, b) in s.sectors.iter_mut().flatten().zip(other.sectors.iter().flatten()) {
            *a += c * b;
        }
        s.leaked = self.leaked + other.leaked;
        s
    }

    /// `max |Φ − Ψ|` over all ordered tuples of all sectors.
    pub fn max_abs_diff(&self, other: &ZfState) -> f64 {
        self.sectors
            .iter()
            .flatten()
            .zip(other.sectors.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.sectors.iter().flatten().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

fn create_sector(space: &ZfSpace, f: &Packet, phi: &[Complex64], k: usize) -> Vec<Complex64> {
    let norm = 1.0 / ((k + 1) as f64).sqrt();
    (0..space.sector_len(k + 1))
        .into_par_iter()
        .map(|r| {
            let target = space.tuple(k + 1, r);
            let mut rest = vec![0u16; k];
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..=k {
                let fj = f.values[target[j] as usize];
                if fj == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut t = fj;
                for l in 0..j {
                    t *= space.s(target[j], target[l]);
                }
                rest[..j].copy_from_slice(&target[..j]);
                rest[j..].copy_from_slice(&target[j + 1..]);
                acc += t * phi[space.rank(&rest)];
            }
            acc * norm
        })
        .collect()
}

fn annihilate_sector(space: &ZfSpace, f: &Packet, phi: &[Complex64], k: usize) -> Vec<Complex64> {
    let norm = (k as f64).sqrt() * space.step;
    let support = f.support();
    (0..space.sector_len(k - 1))
        .into_par_iter()
        .map(|r| {
            let Some((lo, hi)) = support else {
                return Complex64::new(0.0, 0.0);
            };
            let base = space.tuple(k - 1, r);
            let mut full = vec![0u16; k];
            let mut acc = Complex64::new(0.0, 0.0);
            for a in lo..=hi {
                let fa = f.values[a].conj();
                let a = a as u16;
                let slot = base.iter().position(|&b| b <= a).unwrap_or(k - 1);
                let mut t = fa;
                for &b in &base[..slot] {
                    t *= space.s(b, a);
                }
                full[..slot].copy_from_slice(&base[..slot]);
                full[slot] = a;
                full[slot + 1..].copy_from_slice(&base[slot..]);
                acc += t * phi[space.rank(&full)];
            }
            acc * norm
        })
        .collect()
}

/// Apply `Z*(f)` or `Z(f)` to a state.
///
/// Creation on the top sector computes the overflow into `k_max + 1`; its
/// norm is added to `leaked` and must stay below `tolerance`.
pub fn zf_apply(op: ZfOp, packet: &Packet, state: &ZfState, tolerance: f64) -> Result<ZfState> {
    let space = &state.space;
    if packet.values.len() != space.theta.len() {
        return Err(Error::Config(format!(
            "packet has {} samples, rapidity grid has {}",
            packet.values.len(),
            space.theta.len()
        )));
    }
    let mut out = ZfState::zero(space);
    out.leaked = state.leaked;
    let k_max = space.k_max;
    match op {
        ZfOp::Create => {
            let sectors: Vec<(usize, Vec<Complex64>)> = (0..k_max)
                .into_par_iter()
                .map(|k| (k + 1, create_sector(space, packet, &state.sectors[k], k)))
                .collect();
            for (k, v) in sectors {
                out.sectors[k] = v;
            }
            if state.sectors[k_max].iter().any(|v| v.norm() > 0.0) {
                let top = create_sector(space, packet, &state.sectors[k_max], k_max);
                let hk = space.step.powi(k_max as i32 + 1);
                let leaked = (top.iter().zip(&space.mult[k_max + 1]).map(|(a, m)| a.norm_sqr() * m).sum::<f64>() * hk).sqrt();
                out.leaked += leaked;
            }
            if out.leaked > tolerance {
                return Err(Error::Truncation {
                    leaked: out.leaked,
                    tolerance,
                });
            }
        }
        ZfOp::Annihilate => {
            for k in 1..=k_max {
                out.sectors[k - 1] = annihilate_sector(space, packet, &state.sectors[k], k);
            }
        }
    }
    Ok(out)
}

/// `Z*(f₁) ⋯ Z*(f_n) Ω`.
pub fn create_product(space: &Arc<ZfSpace>, packets: &[&Packet]) -> Result<ZfState> {
    let mut s = ZfState::vacuum(space);
    for p in packets.iter().rev() {
        s = zf_apply(ZfOp::Create, p, &s, TRUNCATION_TOLERANCE)?;
    }
    Ok(s)
}

/// Kernel on the full `M^k` grid, row-major in `(β₁, …, β_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    pub k: usize,
    pub n_grid: usize,
    pub values: Vec<Complex64>,
}

impl Kernel {
    pub fn product(packets: &[&Packet]) -> Self {
        let n = packets[0].values.len();
        let k = packets.len();
        let values = (0..n.pow(k as u32))
            .map(|idx| {
                let mut rem = idx;
                let mut v = Complex64::new(1.0, 0.0);
                for p in packets.iter().rev() {
                    v *= p.values[rem % n];
                    rem /= n;
                }
                v
            })
            .collect();
        Self { k, n_grid: n, values }
    }

    fn index(&self, beta: &[u16]) -> usize {
        beta.iter().fold(0, |acc, &b| acc * self.n_grid + b as usize)
    }

    fn decode(&self, mut idx: usize) -> Vec<u16> {
        let mut beta = vec![0u16; self.k];
        for i in (0..self.k).rev() {
            beta[i] = (idx % self.n_grid) as u16;
            idx /= self.n_grid;
        }
        beta
    }

    pub fn at(&self, beta: &[u16]) -> Complex64 {
        self.values[self.index(beta)]
    }

    /// Rewrite `∫K Z*(β₁)⋯Z*(β_k)` after exchanging the operators at
    /// positions `i`, `i + 1`: `K′(β) = K(swap_i β) S(β_{i+1} − β_i)`.
    pub fn exchange(&self, space: &ZfSpace, i: usize) -> Result<Self> {
        if i + 1 >= self.k {
            return Err(Error::Config(format!("cannot exchange positions {i}, {} of a {}-kernel", i + 1, self.k)));
        }
        let values = (0..self.values.len())
            .into_par_iter()
            .map(|idx| {
                let mut beta = self.decode(idx);
                let s = space.s(beta[i + 1], beta[i]);
                beta.swap(i, i + 1);
                self.at(&beta) * s
            })
            .collect();
        Ok(Self {
            k: self.k,
            n_grid: self.n_grid,
            values,
        })
    }

    pub fn max_abs_diff(&self, other: &Kernel) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// The state `∫K Z*(β₁)⋯Z*(β_k) Ω`, built from the kernel directly:
/// `Φ(θ) = (1/√k!) Σ_σ K(θ_σ) ∏ S(θ_q − θ_p)` over the pairs `p < q`
/// that σ puts in reverse order.
pub fn state_from_kernel(space: &Arc<ZfSpace>, kernel: &Kernel) -> Result<ZfState> {
    let k = kernel.k;
    if k > space.k_max {
        return Err(Error::Config(format!("kernel rank {k} exceeds k_max {}", space.k_max)));
    }
    if kernel.n_grid != space.theta.len() {
        return Err(Error::Config("kernel grid does not match the Fock space grid".into()));
    }
    let perms = permutations(k);
    let norm = 1.0 / (1..=k).map(|i| i as f64).product::<f64>().sqrt();
    let values: Vec<Complex64> = (0..space.sector_len(k))
        .into_par_iter()
        .map(|r| {
            let theta = space.tuple(k, r);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut arg = vec![0u16; k];
            for sigma in &perms {
                let mut phase = Complex64::new(1.0, 0.0);
                for (slot, &p) in sigma.iter().enumerate() {
                    arg[slot] = theta[p];
                    for &q in &sigma[slot + 1..] {
                        if q < p {
                            phase *= space.s(theta[p], theta[q]);
                        }
                    }
                }
                acc += phase * kernel.at(&arg);
            }
            acc * norm
        })
        .collect();
    let mut s = ZfState::zero(space);
    s.sectors[k] = values;
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExchangeReport {
    pub model: SMatrixModel,
    /// `max |Z*(f)Z*(g)Ω − ∫S(β₂−β₁) g(β₁)f(β₂) Z*(β₁)Z*(β₂)Ω|` on ordered pairs.
    pub defect: f64,
    pub scale: f64,
}

/// Exchange relation on two packets, operator path against the S-twisted kernel.
pub fn zf_exchange_check(space: &Arc<ZfSpace>, f: &Packet, g: &Packet) -> Result<ExchangeReport> {
    let direct = create_product(space, &[f, g])?;
    let twisted = Kernel::product(&[f, g]).exchange(space, 0)?;
    let other = state_from_kernel(space, &twisted)?;
    Ok(ExchangeReport {
        model: space.model,
        defect: direct.max_abs_diff(&other),
        scale: direct.max_abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociativityReport {
    /// Kernels of the two transposition paths from `(f, g, h)` to `(h, g, f)`.
    pub path_defect: f64,
    /// Operator-built `Z*(f)Z*(g)Z*(h)Ω` against the state of either path.
    pub state_defect: f64,
    /// Exchange applied twice against the original kernel and state.
    pub double_exchange_defect: f64,
}

pub fn zf_associativity_check(space: &Arc<ZfSpace>, f: &Packet, g: &Packet, h: &Packet) -> Result<AssociativityReport> {
    let k0 = Kernel::product(&[f, g, h]);
    let a = k0.exchange(space, 0)?.exchange(space, 1)?.exchange(space, 0)?;
    let b = k0.exchange(space, 1)?.exchange(space, 0)?.exchange(space, 1)?;
    let direct = create_product(space, &[f, g, h])?;
    let sa = state_from_kernel(space, &a)?;
    let sb = state_from_kernel(space, &b)?;
    let s0 = state_from_kernel(space, &k0)?;
    let twice = k0.exchange(space, 0)?.exchange(space, 0)?;
    let s_twice = state_from_kernel(space, &twice)?;
    Ok(AssociativityReport {
        path_defect: a.max_abs_diff(&b),
        state_defect: direct.max_abs_diff(&sa).max(direct.max_abs_diff(&sb)).max(direct.max_abs_diff(&s0)),
        double_exchange_defect: twice.max_abs_diff(&k0).max(s_twice.max_abs_diff(&s0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn space(model: SMatrixModel, k_max: usize) -> Arc<ZfSpace> {
        ZfSpace::new(model, 4.0, 24, k_max).unwrap()
    }

    #[test]
    fn sinh_gordon_properties() {
        let real: Vec<f64> = (0..81).map(|i| -4.0 + 0.1 * i as f64).collect();
        let complex: Vec<Complex64> = real.iter().map(|&t| Complex64::new(t, 0.37 * t.cos())).collect();
        for b in [0.3, 1.0, 2.5] {
            let m = SMatrixModel::sinh_gordon(b).unwrap();
            assert!(smatrix_properties(&m, &real, &complex).max_defect() < 1e-12);
            assert_relative_eq!((m.at(0.0) + 1.0).norm(), 0.0, epsilon = 1e-15);
        }
        let weak = SMatrixModel::sinh_gordon(1e-9).unwrap();
        for t in [0.5, -1.0, 3.0] {
            assert!((weak.at(t) - 1.0).norm() < 1e-8);
        }
        assert!(SMatrixModel::sinh_gordon(0.0).is_err());
        assert!(SMatrixModel::sinh_gordon(PI).is_err());
    }

    #[test]
    fn tuple_tables_round_trip() {
        let s = space(SMatrixModel::Free, 3);
        for k in 0..=4 {
            for r in 0..s.sector_len(k) {
                let t = s.tuple(k, r);
                assert!(t.windows(2).all(|w| w[0] >= w[1]));
                assert_eq!(s.rank(t), r);
            }
        }
        assert_eq!(s.sector_len(3), 2600);
        assert_eq!(multiplicity(&[5, 5, 2]), 3.0);
    }

    #[test]
    fn creation_and_annihilation_are_adjoint() {
        let s = space(SMatrixModel::sinh_gordon(1.0).unwrap(), 3);
        let f = Packet::gaussian(&s, 0.3, 0.7, 0.4);
        let g = Packet::gaussian(&s, -0.5, 0.5, -1.0);
        let h = Packet::gaussian(&s, 1.0, 0.6, 0.0);
        let phi = create_product(&s, &[&g, &h]).unwrap().plus(&ZfState::vacuum(&s), Complex64::new(0.2, 0.1));
        let psi = create_product(&s, &[&h, &f, &g]).unwrap();
        let lhs = zf_apply(ZfOp::Create, &f, &phi, TRUNCATION_TOLERANCE).unwrap().inner(&psi);
        let rhs = phi.inner(&zf_apply(ZfOp::Annihilate, &f, &psi, TRUNCATION_TOLERANCE).unwrap());
        assert_relative_eq!((lhs - rhs).norm(), 0.0, epsilon = 1e-12 * lhs.norm().max(1.0));
    }

    #[test]
    fn free_model_has_canonical_commutators() {
        let s = space(SMatrixModel::Free, 3);
        let f = Packet::gaussian(&s, 0.3, 0.7, 0.4);
        let g = Packet::gaussian(&s, -0.5, 0.5, -1.0);
        let phi = create_product(&s, &[&g, &f]).unwrap();
        let ag = zf_apply(ZfOp::Create, &g, &zf_apply(ZfOp::Annihilate, &f, &phi, 1e-8).unwrap(), 1e-8).unwrap();
        let ga = zf_apply(ZfOp::Annihilate, &f, &zf_apply(ZfOp::Create, &g, &phi, 1e-8).unwrap(), 1e-8).unwrap();
        let comm = ga.plus(&ag, Complex64::new(-1.0, 0.0));
        let expected = phi.scaled(f.inner(&g, &s));
        assert!(comm.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn one_particle_contraction_for_any_s() {
        let s = space(SMatrixModel::sinh_gordon(2.5).unwrap(), 2);
        let f = Packet::gaussian(&s, 0.3, 0.7, 0.4);
        let g = Packet::gaussian(&s, -0.5, 0.5, -1.0);
        let one = create_product(&s, &[&g]).unwrap();
        let back = zf_apply(ZfOp::Annihilate, &f, &one, 1e-8).unwrap();
        assert_relative_eq!((back.sector(0)[0] - f.inner(&g, &s)).norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(one.norm(), g.inner(&g, &s).re.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn exchange_relation_across_couplings() {
        for b in [0.3, 1.0, 2.5] {
            let s = space(SMatrixModel::sinh_gordon(b).unwrap(), 2);
            let f = Packet::gaussian(&s, 0.2, 0.8, 0.0);
            let g = Packet::gaussian(&s, -0.3, 0.6, 1.5);
            let r = zf_exchange_check(&s, &f, &g).unwrap();
            assert!(r.defect < 1e-10 && r.scale > 0.1, "{r:?}");
        }
    }

    #[test]
    fn equal_packets_vanish_at_coincidence() {
        let s = space(SMatrixModel::sinh_gordon(1.0).unwrap(), 2);
        let f = Packet::gaussian(&s, 0.0, 1.0, 0.0);
        let st = create_product(&s, &[&f, &f]).unwrap();
        for i in 0..24u16 {
            assert!(st.value(&[i, i]).norm() < 1e-15);
        }
        let free = space(SMatrixModel::Free, 2);
        let ff = Packet::gaussian(&free, 0.0, 1.0, 0.0);
        assert!(create_product(&free, &[&ff, &ff]).unwrap().value(&[12, 12]).norm() > 0.1);
    }

    #[test]
    fn associativity_and_double_exchange() {
        let s = space(SMatrixModel::sinh_gordon(1.0).unwrap(), 3);
        let f = Packet::gaussian(&s, 0.5, 0.6, 0.0);
        let g = Packet::gaussian(&s, -0.2, 0.8, 0.7);
        let h = Packet::gaussian(&s, 0.1, 0.5, -0.4);
        let r = zf_associativity_check(&s, &f, &g, &h).unwrap();
        assert!(r.path_defect < 1e-10, "{r:?}");
        assert!(r.state_defect < 1e-10, "{r:?}");
        assert!(r.double_exchange_defect < 1e-12, "{r:?}");
    }

    #[test]
    fn full_function_is_s_symmetric() {
        let s = space(SMatrixModel::sinh_gordon(1.0).unwrap(), 3);
        let f = Packet::gaussian(&s, 0.5, 0.6, 0.0);
        let g = Packet::gaussian(&s, -0.2, 0.8, 0.7);
        let st = create_product(&s, &[&f, &g]).unwrap();
        let (a, b) = (15u16, 7u16);
        assert_relative_eq!((st.full_value(&[b, a]) - s.s(a, b) * st.full_value(&[a, b])).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn disjoint_leading_packet_appends_without_s_factor() {
        let s = space(SMatrixModel::sinh_gordon(1.0).unwrap(), 3);
        let low = Packet::bump(&s, -1.5, 1.2);
        let low2 = Packet::bump(&s, -1.0, 1.5);
        let high = Packet::bump(&s, 2.2, 1.0);
        let phi = create_product(&s, &[&low, &low2]).unwrap();
        let out = zf_apply(ZfOp::Create, &high, &phi, 1e-8).unwrap();
        for r in 0..s.sector_len(3) {
            let t = s.tuple(3, r);
            let expected = high.values[t[0] as usize] * phi.value(&t[1..]) / 3f64.sqrt();
            assert!((out.sector(3)[r] - expected).norm() < 1e-15);
        }
        let gone = zf_apply(ZfOp::Annihilate, &high, &phi, 1e-8).unwrap();
        assert_eq!(gone.max_abs(), 0.0);
    }

    #[test]
    fn truncation_overflow_is_reported() {
        let s = space(SMatrixModel::sinh_gordon(1.0).unwrap(), 2);
        let f = Packet::gaussian(&s, 0.0, 0.6, 0.0);
        let two = create_product(&s, &[&f, &f.clone()]).unwrap();
        let g = Packet::gaussian(&s, 1.0, 0.6, 0.0);
        let two = create_product(&s, &[&g, &f]).unwrap().plus(&two, Complex64::new(1.0, 0.0));
        match zf_apply(ZfOp::Create, &f, &two, TRUNCATION_TOLERANCE) {
            Err(Error::Truncation { leaked, tolerance }) => {
                assert!(leaked > 0.1);
                assert_eq!(tolerance, TRUNCATION_TOLERANCE);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
        let lowered = zf_apply(ZfOp::Annihilate, &g, &two, TRUNCATION_TOLERANCE).unwrap();
        let again = zf_apply(ZfOp::Create, &f, &lowered, TRUNCATION_TOLERANCE).unwrap();
        assert_eq!(again.leaked, 0.0);
        assert!(zf_apply(ZfOp::Create, &f, &two, f64::INFINITY).unwrap().leaked > 0.1);
    }
}
