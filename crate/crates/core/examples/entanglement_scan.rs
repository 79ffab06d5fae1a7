// Interval entropies on a harmonic chain: logarithmic growth in the vacuum,
// extensive growth at finite temperature.

use modloc_lab::fit::fit_line;
use modloc_lab::gaussian::{self, Boundary, HarmonicLattice, Region};
use modloc_lab::Result;

pub fn main() -> Result<()> {
    let n = 600;
    let lattice = HarmonicLattice::massless(n, 1.0, Boundary::Periodic, 1e-3 / n as f64)?;

    let vacuum = gaussian::build_vacuum_state(&lattice)?;
    let lengths = [8, 16, 32, 64, 128];
    let s = gaussian::interval_entropies(&vacuum, &lengths)?;
    let ln_l: Vec<f64> = lengths.iter().map(|&l| (l as f64).ln()).collect();
    let fit = fit_line(&ln_l, &s, 3)?;
    for (l, s) in lengths.iter().zip(&s) {
        println!("vacuum  L = {l:>4}  S = {s:.6}");
    }
    println!("S = {:.4} ln L + {:.4}, R2 = {:.6}", fit.slope, fit.intercept, fit.r_squared);

    let thermal = gaussian::build_thermal_state(&lattice, 5.0)?;
    let lengths = [40, 80, 120, 160, 200];
    let s = gaussian::interval_entropies(&thermal, &lengths)?;
    let l: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let fit = fit_line(&l, &s, 3)?;
    println!("thermal entropy density {:.5} per site, R2 = {:.8}", fit.slope, fit.r_squared);

    let region = Region::interval(0, 16)?;
    let spectrum = gaussian::symplectic_spectrum(&gaussian::reduce(&vacuum, &region)?)?;
    println!("largest symplectic eigenvalues: {:?}", &spectrum.nus[..4]);

    let massive = gaussian::build_vacuum_state(&HarmonicLattice::new(256, 1.0, 1.0, Boundary::Periodic)?)?;
    let whole = gaussian::region_entropy(&massive, &Region::interval(0, 256)?)?;
    println!("entropy of the full chain {whole:.1e} nats");
    Ok(())
}
