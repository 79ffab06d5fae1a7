// Zamolodchikov-Faddeev operators with the sinh-Gordon S-matrix on a
// truncated rapidity grid.

use num_complex::Complex64;

use modloc_lab::zf::{self, Packet, SMatrixModel, ZfOp, ZfSpace, ZfState, TRUNCATION_TOLERANCE};
use modloc_lab::Result;

pub fn main() -> Result<()> {
    let model = SMatrixModel::sinh_gordon(1.0)?;
    for theta in [0.0, 0.5, 1.0, 2.0, 4.0] {
        let s = model.at(theta);
        println!("S({theta}) = {:+.6} {:+.6}i", s.re, s.im);
    }

    let space = ZfSpace::new(model, 4.0, 24, 4)?;
    println!("sector sizes: {:?}", (0..=4).map(|k| space.sector_len(k)).collect::<Vec<_>>());
    let f = Packet::gaussian(&space, 0.2, 0.8, 0.0);
    let g = Packet::gaussian(&space, -0.3, 0.6, 1.5);
    let h = Packet::bump(&space, 0.5, 1.2);

    let ex = zf::zf_exchange_check(&space, &f, &g)?;
    let assoc = zf::zf_associativity_check(&space, &f, &g, &h)?;
    println!("exchange defect {:.1e} (scale {:.2e})", ex.defect, ex.scale);
    println!(
        "associativity: paths {:.1e}, states {:.1e}, double exchange {:.1e}",
        assoc.path_defect, assoc.state_defect, assoc.double_exchange_defect
    );

    let mut state = ZfState::vacuum(&space);
    for p in [&f, &g, &h, &f] {
        state = zf::zf_apply(ZfOp::Create, p, &state, TRUNCATION_TOLERANCE)?;
    }
    println!("four particles: norm {:.6}, weights {:?}", state.norm(), state.particle_number_weights());
    let lowered = zf::zf_apply(ZfOp::Annihilate, &g, &state, TRUNCATION_TOLERANCE)?;
    println!("after one annihilation: norm {:.6}, leaked {:.1e}", lowered.norm(), lowered.leaked);
    match zf::zf_apply(ZfOp::Create, &f, &state, TRUNCATION_TOLERANCE) {
        Ok(_) => println!("fifth particle fit"),
        Err(e) => println!("fifth particle: {e}"),
    }

    let free = ZfSpace::new(SMatrixModel::Free, 4.0, 24, 3)?;
    let (f, g) = (Packet::gaussian(&free, 0.2, 0.8, 0.0), Packet::gaussian(&free, -0.3, 0.6, 1.5));
    let phi = zf::create_product(&free, &[&g])?;
    let ag = zf::zf_apply(ZfOp::Create, &g, &zf::zf_apply(ZfOp::Annihilate, &f, &phi, 1e-8)?, 1e-8)?;
    let ga = zf::zf_apply(ZfOp::Annihilate, &f, &zf::zf_apply(ZfOp::Create, &g, &phi, 1e-8)?, 1e-8)?;
    let ccr = ga.plus(&ag, Complex64::new(-1.0, 0.0)).max_abs_diff(&phi.scaled(f.inner(&g, &free)));
    println!("free commutator [Z(f), Z*(g)] - <f, g> = {ccr:.1e}");
    Ok(())
}
