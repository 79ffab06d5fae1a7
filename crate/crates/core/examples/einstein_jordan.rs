// Energy fluctuations of a smeared stress tensor in a thermal state agree
// with those of the transported smearing in the vacuum.

use std::f64::consts::PI;

use modloc_lab::chiral::{self, ChiralKernel, TransportedSmearing, Weight};
use modloc_lab::smearing::{Profile, SmearingFn};
use modloc_lab::Result;

pub fn main() -> Result<()> {
    let beta = 2.0 * PI;
    let (a, b) = (-1.0, 2.0);
    println!("{:>7} {:>6} {:>6} {:>14} {:>14} {:>9}", "center", "plat", "ramp", "thermal", "vacuum", "rel");
    for profile in [Profile::SmoothBump, Profile::RaisedCosine] {
        for (c, h, r) in [(0.5, 0.5, 0.3), (0.5, 0.25, 0.15), (0.0, 0.3, 0.2)] {
            let f = SmearingFn::new(c, h, r, profile)?;
            let ej = chiral::ej_compare(&f, beta, a, b)?;
            println!(
                "{c:>7} {h:>6} {r:>6} {:>14.8e} {:>14.8e} {:>9.1e}",
                ej.thermal_var, ej.transported_vacuum_var, ej.rel_diff
            );
        }
    }

    // The current transforms with one power of the jacobian.
    let f = SmearingFn::new(0.5, 0.5, 0.3, Profile::SmoothBump)?;
    let map = chiral::exp_map(beta, a, b)?;
    let th = chiral::smeared_current_variance(&f, &ChiralKernel::thermal(beta, 1e-12)?)?;
    let h = TransportedSmearing { inner: &f, map, weight: Weight::Current };
    let vac = chiral::smeared_current_variance(&h, &ChiralKernel::vacuum(1e-12)?)?;
    println!("current: thermal {th:.10e}, transported vacuum {vac:.10e}");
    Ok(())
}
