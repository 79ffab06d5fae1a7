// The exponential map carries the thermal chiral kernel on an interval to
// the vacuum kernel on the positive half-line.
//
// ```text
// cargo run --release --example thermal_vacuum_map
// ```

use std::f64::consts::PI;

use num_complex::Complex64;

use modloc_lab::chiral::{self, ChiralKernel};
use modloc_lab::Result;

pub fn main() -> Result<()> {
    let vacuum = ChiralKernel::vacuum(1.0)?;
    for beta in [1.0, 2.0 * PI] {
        let map = chiral::exp_map(beta, -1.0, 2.0)?;
        let grid = chiral::isomorphism_grid(&map, 100);
        let defect = chiral::verify_isomorphism(&map, &grid)?;
        println!("beta = {beta:.4}: ({}, {}) -> ({:.4}, {:.4}), max rel defect {defect:.2e}", map.a, map.b, map.x_a, map.x_b);

        let thermal = ChiralKernel::thermal(beta, 1.0)?;
        println!("  {:>6} {:>14} {:>14}", "du", "thermal", "transported");
        for du in [0.25, 0.5, 1.0, 2.0] {
            let (u, v) = (-0.5, -0.5 + du);
            let th = thermal.at(Complex64::new(u - v, 0.0)).re;
            let tr = map.jacobian(u) * map.jacobian(v) * vacuum.at(Complex64::new(map.x(u) - map.x(v), 0.0)).re;
            println!("  {du:>6} {th:>14.6e} {tr:>14.6e}");
        }

        let regulated = ChiralKernel::thermal(beta, 1e-3)?;
        let z = regulated.regulated(0.7);
        let exact = regulated.at(z);
        for images in [10, 50, 200] {
            let raw = chiral::image_sum(beta, z, images, false);
            let corrected = chiral::image_sum(beta, z, images, true);
            println!(
                "  {images:>3} images: raw {:.1e}, tail-corrected {:.1e}",
                (raw - exact).norm() / exact.norm(),
                (corrected - exact).norm() / exact.norm()
            );
        }
    }
    Ok(())
}
