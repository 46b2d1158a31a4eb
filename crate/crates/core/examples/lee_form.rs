//! Recover the Lee form of the Hopf structure from dω alone and compare it
//! with θ = −2 dr/r.

use lck_workbench::engine::Engine;
use lck_workbench::field::ChartPoint;
use lck_workbench::lck::{lee_form, LocalGeometry};
use lck_workbench::models::hopf_structure;
use lck_workbench::tensor::values;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for n in [2, 3] {
        let hopf = hopf_structure(n, 2.0)?;
        let mut coords: Vec<f64> = (0..2 * n).map(|k| 0.3 + 0.17 * k as f64).collect();
        coords[1] = -coords[1];
        let p = ChartPoint::new(coords)?;
        let recovered = lee_form(&hopf, &Engine::AutoDiff, &p)?;
        let loc = LocalGeometry::new(&hopf, &Engine::AutoDiff, &p)?;
        let theta = values(&loc.theta);
        let r2 = p.radius().powi(2);
        println!("n = {n}, p = {:?}", p.coords());
        for (k, (t, x)) in recovered.iter().zip(p.coords()).enumerate() {
            println!("  θ_{k} recovered {t:+.15}  −2x/r² {:+.15}  model {:+.15}", -2.0 * x / r2, theta[k]);
        }
        println!("  |θ|_g = {:.15}", loc.norm_oneform(&recovered));
    }
    Ok(())
}
