//! Builds the default phase mesh and prints its discrete Maxwellian moments.

use vpbgk::{build_mesh, MeshSpec};

fn main() -> vpbgk::Result<()> {
    let mesh = build_mesh(MeshSpec::default())?;
    let vg = &mesh.velocity;
    println!(
        "cells {}, velocity nodes {}, dx {:.6}",
        mesh.nx(),
        mesh.nv(),
        mesh.dx
    );
    println!(
        "dv = ({:.4}, {:.4}, {:.4}), dv3 = {:.6}",
        vg.dvx, vg.dvy, vg.dvz, vg.dv3
    );
    println!("<M> = {:.17}", vg.bracket(&vg.maxwellian));
    println!("<xi^2 M> = m2 = {:.17}", vg.m2);
    // odd moments vanish exactly by the mirror pairing
    println!("<xi M> = {:e}", vg.bracket_xi(&vg.maxwellian));
    Ok(())
}
