// Vacuum fluctuations of a partial charge grow like (R/ΔR)^(n-2), and
// logarithmically in two dimensions.

use modloc_lab::charge::{self, PartialChargeSpec, ScalarModel, WavePacket};
use modloc_lab::gaussian::{self, Boundary, HarmonicLattice};
use modloc_lab::smearing::{Profile, Smearing};
use modloc_lab::Result;

pub fn main() -> Result<()> {
    let ratios: Vec<f64> = (0..6).map(|i| 10f64 * 10f64.powf(i as f64 / 5.0)).collect();
    let family = charge::scaling_family(4.0, &ratios, 0.5, Profile::SmoothBump)?;
    for n in [2, 3, 4] {
        let r = charge::scaling_fit(&ScalarModel::new(1e-6, n)?, &family)?;
        println!(
            "n = {n}: exponent {:.3}, log slope {:.4}, R2 {:.5}",
            r.fitted_exponent, r.slope, r.r_squared
        );
        for (ratio, f) in r.samples.iter().step_by(2) {
            println!("    R/dR = {ratio:>7.2}  <Q^2> = {f:.5e}");
        }
    }

    // Continuum quadrature against a lattice mode sum.
    let lattice = HarmonicLattice::new(512, 1.0, 0.05, Boundary::Periodic)?;
    let spec = PartialChargeSpec::new(4.0, 0.8, 0.4, Profile::RaisedCosine)?;
    let f = spec.smearing();
    let lat = gaussian::lattice_charge_variance(&lattice, |x| f.value(x), 0.4)?;
    let cont = charge::charge_variance(&ScalarModel::new(1.0, 2)?, &spec)?;
    println!("continuum {cont:.6e}, lattice {lat:.6e}");

    let model = ScalarModel::new(1.0, 2)?;
    let limit = charge::global_charge_limit(&model, WavePacket { p_max: 2.0 }, &[2.0, 4.0, 8.0, 16.0], 0.5, 0.1, 0.5)?;
    for (r, d) in limit.radii.iter().zip(&limit.deviations) {
        println!("R = {r:>4}: |1 - <Q>| = {d:.2e}");
    }
    Ok(())
}
