//! The deformation ω̄ = ω + fθ∧Jθ of the Hopf structure keeps the lcK
//! condition and a holomorphic Lee field but is not Vaisman: |θ̄| varies and
//! θ̄ is not co-closed.

use std::f64::consts::PI;

use lck_workbench::engine::Engine;
use lck_workbench::lck::LocalGeometry;
use lck_workbench::models::{diagonal_point, ModelDescriptor, ModelKind};
use lck_workbench::suite::{hypotheses, run_suite, SuiteOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = (2.0 * PI).exp();
    let engine = Engine::AutoDiff;
    let model = ModelDescriptor::new(ModelKind::HopfDeformed, 2, a)
        .with_amplitude(0.5)
        .build(&engine)?;

    let report = run_suite(&model, &SuiteOptions::default())?;
    for id in ["id_lck", "id_deform_lck", "id_holo", "id_killing_JT", "id_norm_T"] {
        let c = report.check(id).expect("registered");
        println!("{id:<15} holds     max residual {:.2e}", c.max_residual);
    }
    for id in &report.expected_failures {
        let c = report.check(id).expect("registered");
        println!("{id:<15} fails     max residual {:.3}", c.max_residual);
    }
    println!("suite contract met: {}", report.overall_pass);

    let samples = model.samples(256, 42)?;
    let h = hypotheses(&model, &engine, &samples)?;
    println!(
        "holomorphic T: {}, |θ̄| spread {:.3}, max |δθ̄| {:.3}, Vaisman: {}",
        h.holomorphic, h.lee_norm_spread, h.max_codifferential, h.vaisman
    );

    // ḡ(T̄, T̄) = 1 + f and f = ½ sin(2π ln r / ln a) peaks at r = a^{1/4}
    let p = diagonal_point(4, a.powf(0.25))?;
    let loc = LocalGeometry::new(&model.structure, &engine, &p)?;
    println!("|θ̄|² at r = a^(1/4): {:.12}", loc.theta_norm_sq().value);
    Ok(())
}
