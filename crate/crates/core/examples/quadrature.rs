//! Integrals over the fundamental domain 1 ≤ r ≤ a: the Hopf volume 32π² ln a,
//! its convergence under angular refinement, and the Stokes identities on the
//! deformed model.

use lck_workbench::engine::Engine;
use lck_workbench::models::{ModelDescriptor, ModelKind};
use lck_workbench::quadrature::{
    check_integral_identities, hopf_volume, integrate, observed_orders, QuadratureGrid, Quantity,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = 2.0;
    let engine = Engine::AutoDiff;
    let hopf = ModelDescriptor::new(ModelKind::Hopf, 2, a).build(&engine)?;
    let exact = hopf_volume(a);
    let mut errors = Vec::new();
    for n_ang in [2, 4, 8] {
        let grid = QuadratureGrid::periodic(a, 4, n_ang)?;
        let v = integrate(&hopf, Quantity::Volume, &grid, &engine)?;
        errors.push(v - exact);
        println!("grid (4, {n_ang}³): vol = {v:.12}  error {:.2e}", v - exact);
    }
    println!("observed orders {:?}", observed_orders(&errors, 1e-12 * exact));

    let deformed = ModelDescriptor::new(ModelKind::HopfDeformed, 2, a).build(&engine)?;
    for n in [4, 8] {
        let grid = QuadratureGrid::periodic(a, 2 * n, n)?;
        println!("deformed, grid ({}, {n}³)", 2 * n);
        for c in check_integral_identities(&deformed, &grid, &engine)? {
            println!(
                "  {:<15} {:>+.6e}  residual {:.2e}  tol {:.2e}  {}",
                c.quantity.name(),
                c.value,
                c.verdict.max_residual,
                c.verdict.tolerance,
                if c.verdict.pass { "pass" } else { "FAIL" }
            );
        }
    }
    Ok(())
}
