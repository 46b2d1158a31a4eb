//! Run every registered identity on the Hopf structure for a few complex
//! dimensions and dilation factors.

use std::f64::consts::PI;
use std::time::Instant;

use lck_workbench::engine::Engine;
use lck_workbench::models::{ModelDescriptor, ModelKind};
use lck_workbench::report::{render_suite, Format};
use lck_workbench::suite::{run_suite, SuiteOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (n, a) in [(2, 2.0), (3, 2.0), (2, (2.0 * PI).exp()), (3, (2.0 * PI).exp())] {
        let model = ModelDescriptor::new(ModelKind::Hopf, n, a).build(&Engine::AutoDiff)?;
        let start = Instant::now();
        let report = run_suite(&model, &SuiteOptions::default())?;
        let worst = report.checks.iter().max_by(|x, y| x.max_residual.total_cmp(&y.max_residual));
        println!(
            "n = {n}, a = {a:.6}: {} checks, overall {}, worst {} at {:.2e}, {:.0?}",
            report.checks.len(),
            if report.overall_pass { "pass" } else { "FAIL" },
            worst.map_or("-", |c| c.id.as_str()),
            worst.map_or(0.0, |c| c.max_residual),
            start.elapsed()
        );
    }

    let model = ModelDescriptor::new(ModelKind::Hopf, 2, 2.0).build(&Engine::AutoDiff)?;
    let report = run_suite(
        &model,
        &SuiteOptions {
            samples: 32,
            ..SuiteOptions::default()
        },
    )?;
    print!("\n{}", render_suite(&report, Format::Text)?);
    Ok(())
}
