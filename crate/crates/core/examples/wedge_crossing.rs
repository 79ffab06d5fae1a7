// Free-field crossing: the two-particle form factor of a wedge-localized
// operator, continued to theta + i pi, equals the crossed matrix element.

use std::f64::consts::PI;

use num_complex::Complex64;

use modloc_lab::crossing::{self, KmsGrid, Rule, StripGrid, TransformRule, WedgeTestFn};
use modloc_lab::Result;

pub fn main() -> Result<()> {
    let mass = 1.0;
    let g = WedgeTestFn::new((0.2, 2.0), 0.8)?;
    let strip = crossing::mass_shell_restrict(&g, mass, &StripGrid::default())?;
    println!(
        "strip: Cauchy-Riemann residual {:.1e}, involution defect {:.1e}",
        strip.cr_residual,
        strip.involution_defect.unwrap_or(f64::NAN)
    );

    let rule = TransformRule::new(&g, Rule::Polar);
    for lambda in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
        let v = crossing::continue_into_strip(&rule, mass, Complex64::new(0.3, lambda))?;
        println!("    |f(0.3 + {lambda} i)| = {:.6e}  (bound {:.6e})", v.norm(), rule.l1_norm());
    }

    let grid = crossing::rapidity_grid(2.0, 20);
    for (c, r, kappa) in [((0.2, 2.0), 0.8, 0.0), ((-0.5, 3.0), 1.0, 0.0), ((0.0, 2.5), 0.8, 1.5)] {
        let f = WedgeTestFn::new(c, r)?.modulated(kappa);
        let report = crossing::free_crossing_check(&f, mass, &grid, &grid)?;
        println!(
            "center {c:?}, radius {r}, modulation {kappa}: crossing defect {:.1e} on {} points, hermiticity {:.1e}",
            report.max_rel_defect, report.grid_points, report.hermiticity_defect
        );
    }

    let left = WedgeTestFn::new((0.2, -2.0), 0.8)?;
    match crossing::continue_into_strip(&TransformRule::new(&left, Rule::Cartesian), mass, Complex64::new(0.0, 0.5 * PI)) {
        Ok(v) => println!("left wedge continued to {v}"),
        Err(e) => println!("left wedge: {e}"),
    }

    let kms = crossing::kms_free_identity(&g, &WedgeTestFn::new((0.0, 2.5), 0.6)?, &WedgeTestFn::new((0.3, 3.0), 0.6)?, mass, &KmsGrid::default())?;
    println!("KMS: lhs {:.10e}, rhs {:.10e}, rel diff {:.1e}", kms.lhs, kms.rhs, kms.rel_diff);
    Ok(())
}
