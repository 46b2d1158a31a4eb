//! Second-order jets: evaluate a function once and read off its value,
//! gradient and Hessian, then do the same for a component of the Hopf metric.

use lck_workbench::anchors::p0;
use lck_workbench::engine::Engine;
use lck_workbench::jet::{Jet2, Scalar};
use lck_workbench::models::hopf_structure;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // h(x, y) = sin(xy) + y³ at (0.5, 2)
    let x = Jet2::seed(&[0.5, 2.0]);
    let h = (x[0] * x[1]).sin() + x[1] * x[1] * x[1];
    println!("h        = {:.12}", h.value);
    println!("∂h       = ({:.12}, {:.12})", h.grad[0], h.grad[1]);
    println!("∂²h      = [[{:.12}, {:.12}], [_, {:.12}]]", h.hess(0, 0), h.hess(0, 1), h.hess(1, 1));
    let c = 1.0f64.cos();
    let s = 1.0f64.sin();
    println!("by hand  : ∂x h = {:.12}, ∂x∂y h = {:.12}", 2.0 * c, c - s);

    // g₁₁ = 4/r² on the Hopf model: 4 at p₀, ∂₁g₁₁ = −8, ∂₁²g₁₁ = 24
    let hopf = hopf_structure(2, 2.0)?;
    for engine in [Engine::AutoDiff, Engine::finite_difference()] {
        let g = engine.jets(hopf.metric().as_field(), &p0())?;
        println!(
            "{}: g11 = {:.10}  ∂1 g11 = {:.10}  ∂1² g11 = {:.10}",
            engine.name(),
            g[0].value,
            g[0].grad[0],
            g[0].hess(0, 0)
        );
    }
    Ok(())
}
