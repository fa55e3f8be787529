//! Hybrid solver against the fully kinetic one: same trajectory at small
//! eps, fewer kinetic cells, exact mass.

use std::time::Instant;

use vpbgk::hybrid::{hybrid_propagate, HybridParams, HybridState, PartitionMode};
use vpbgk::init::initial_state;
use vpbgk::kinetic::KineticStepParams;
use vpbgk::{build_mesh, MeshSpec};

fn main() -> vpbgk::Result<()> {
    let mesh = build_mesh(MeshSpec::default())?;
    let (s0, g0) = initial_state(&mesh)?;
    let m0 = s0.mass(&mesh);
    for eps in [1e-1, 1e-2, 1e-4] {
        let p = KineticStepParams::stable(eps, 1.5 * s0.max_abs_field(), &mesh);
        let mut out = Vec::new();
        for mode in [PartitionMode::AllKinetic, PartitionMode::Adaptive] {
            let t0 = Instant::now();
            let st = hybrid_propagate(
                &HybridState::new(s0.clone(), g0.clone()),
                1.0,
                &HybridParams::new(p, mode),
                &mesh,
            )?;
            out.push((st, t0.elapsed().as_secs_f64()));
        }
        let (kin, hyb) = (&out[0], &out[1]);
        let diff = kin
            .0
            .macro_state
            .rho
            .iter()
            .zip(&hyb.0.macro_state.rho)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        println!(
            "eps {eps:<6e} kinetic {:.3} s, hybrid {:.3} s (mean kinetic fraction {:.2}), |diff| {diff:.2e}, hybrid mass drift {:.1e}",
            kin.1,
            hyb.1,
            hyb.0.mean_kinetic_fraction(),
            (hyb.0.macro_state.mass(&mesh) - m0) / m0
        );
    }
    Ok(())
}
