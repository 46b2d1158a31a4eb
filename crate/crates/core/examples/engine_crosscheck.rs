//! Run the suite with automatic differentiation and with central finite
//! differences and compare verdicts and residuals check by check.

use lck_workbench::engine::{Engine, FiniteDifference, StencilOrder};
use lck_workbench::models::{ModelDescriptor, ModelKind};
use lck_workbench::suite::{run_suite, SuiteOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let fd = Engine::finite_difference();
    for kind in ModelKind::ALL {
        let descriptor = ModelDescriptor::new(kind, 2, 2.0);
        let run = |engine: Engine| -> lck_workbench::error::Result<_> {
            let model = descriptor.build(&engine)?;
            run_suite(
                &model,
                &SuiteOptions {
                    engine,
                    samples: 64,
                    ..SuiteOptions::default()
                },
            )
        };
        let (ad_report, fd_report) = (run(Engine::AutoDiff)?, run(fd)?);
        println!("{kind}");
        for (x, y) in ad_report.checks.iter().zip(&fd_report.checks) {
            println!(
                "  {:<15} ad {:>9.2e} {:<5} fd {:>9.2e} {:<5} |Δ| {:.1e}",
                x.id,
                x.max_residual,
                x.pass,
                y.max_residual,
                y.pass,
                (x.max_residual - y.max_residual).abs()
            );
        }
    }

    // shrinking the step lowers the error of a second-derivative identity
    let model = ModelDescriptor::new(ModelKind::Hopf, 2, 2.0).build(&Engine::AutoDiff)?;
    println!("id_cinci under the second-order stencil");
    for step_scale in [1e-2, 5e-3, 2.5e-3, 1.25e-3] {
        let engine = Engine::FiniteDifference(FiniteDifference {
            step_scale,
            order: StencilOrder::Second,
        });
        let report = run_suite(
            &model,
            &SuiteOptions {
                engine,
                samples: 16,
                only: vec!["id_cinci".into()],
                ..SuiteOptions::default()
            },
        )?;
        println!("  h = {step_scale:.2e}: {:.3e}", report.checks[0].max_residual);
    }
    Ok(())
}
