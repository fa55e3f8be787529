//! Indicators and kinetic/fluid labels along a hybrid run at small eps.
//!
//! `cargo run --release --example domain_adaptation [eps]`

use vpbgk::adaptation::{perturbation_indicator, remainder_indicator, update_labels_with, Label, LabelRule};
use vpbgk::hybrid::{hybrid_propagate, HybridParams, HybridState, PartitionMode};
use vpbgk::init::initial_state;
use vpbgk::kinetic::KineticStepParams;
use vpbgk::{build_mesh, MeshSpec};

fn render(cells: &[Label]) -> String {
    cells
        .iter()
        .map(|l| if *l == Label::Kinetic { 'K' } else { '.' })
        .collect()
}

fn main() -> vpbgk::Result<()> {
    let eps: f64 = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(1e-4);
    let mesh = build_mesh(MeshSpec::default())?;
    let (s0, g0) = initial_state(&mesh)?;

    let r = remainder_indicator(&s0.rho, &s0.e, &s0.e, 0.0, s0.rho_bar, &mesh)?;
    let gn = perturbation_indicator(&g0, &mesh)?;
    let labels = update_labels_with(&r, &gn, &LabelRule::default(), eps);
    println!(
        "initial max |R| = {:.3e}, max |g| = {:.3e}",
        r.iter().fold(0.0f64, |a, v| a.max(v.abs())),
        gn.iter().fold(0.0f64, |a, v| a.max(*v))
    );
    println!("t = 0      {}", render(&labels.cells));

    let p = KineticStepParams::stable(eps, 1.5 * s0.max_abs_field(), &mesh);
    let hp = HybridParams::new(p, PartitionMode::Adaptive);
    let mut st = HybridState::new(s0, g0);
    for t in [0.01, 0.05, 0.1, 0.2, 0.5, 1.0] {
        st = hybrid_propagate(&st, t, &hp, &mesh)?;
        println!(
            "t = {t:<6} {}  kinetic {:>5.1}%",
            render(&st.labels.cells),
            100.0 * st.labels.kinetic_fraction()
        );
    }
    Ok(())
}
