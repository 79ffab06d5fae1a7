// A uniformly accelerated observer sees the vacuum as a thermal state at
// beta = 2 pi / a; the wrong temperature breaks detailed balance.

use std::f64::consts::PI;

use num_complex::Complex64;

use modloc_lab::wedge::{self, WedgeKernel, WedgeModel};
use modloc_lab::Result;

pub fn main() -> Result<()> {
    let model = WedgeModel::new(0.0, 4)?;
    for a in [0.5, 1.0, 2.0] {
        let (trajectory, eps) = wedge::default_trajectory(&model, a)?;
        let g = wedge::pullback(&model, &trajectory, eps)?;
        let band = wedge::balance_band(a, 6);
        let unruh = wedge::detailed_balance(&g, 2.0 * PI / a, &band)?;
        let hot = wedge::detailed_balance(&g, PI / a, &band)?;
        println!("a = {a}: balance defect {:.1e}, at beta = pi/a {:.2}", unruh.max_defect, hot.max_defect);
        for ((w, d), raw) in band.iter().zip(&unruh.defects).zip(&unruh.raw_defects) {
            println!("    omega/a = {:.2}  defect {d:.1e}  (before extrapolation {raw:.1e})", w / a);
        }

        let beta = 2.0 * PI / a;
        let kernel = WedgeKernel { spacetime_dim: 4, acceleration: a };
        let points = [Complex64::new(0.3, 0.25 * beta), Complex64::new(-0.7, 0.6 * beta)];
        println!("    KMS shift {:.1e}", wedge::kms_shift_check(&kernel, beta, &points)?);
    }
    Ok(())
}
