//! Residual traces of the outer loop for b ∈ {4, 6, 8, 10} at λ = 1.
//! Usage: `convergence_trace [out_dir]` (default `results/convergence`).

use std::path::PathBuf;

use rsma_jrc::experiments::{run_convergence, ExperimentSpec};
use rsma_jrc::SystemConfig;

fn main() -> rsma_jrc::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| "results/convergence".into());
    let spec = ExperimentSpec::convergence(SystemConfig::default(), &out);
    for path in run_convergence(&spec)? {
        let text = std::fs::read_to_string(&path)?;
        let rows: Vec<&str> = text.lines().skip(1).collect();
        let show = |line: &str| {
            let f: Vec<&str> = line.split(',').collect();
            format!("iter {:>3}  r {:>9}  q {:>9}", f[0], f[1], f[2])
        };
        println!("{}", path.display());
        if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
            println!("  {}", show(first));
            println!("  {}", show(last));
        }
    }
    Ok(())
}
