//! NMSE against sum-rate as λ sweeps 10^-2…10^2, for one bit value.
//! Usage: `tradeoff_frontier [bits] [out_dir]` (defaults 6, `results/tradeoff`).

use std::path::PathBuf;

use rsma_jrc::experiments::{run_tradeoff_sweep, ExperimentSpec};
use rsma_jrc::{Mode, SystemConfig};

fn main() -> rsma_jrc::Result<()> {
    let mut args = std::env::args().skip(1);
    let bits: u32 = args.next().and_then(|s| s.parse().ok()).unwrap_or(6);
    let out = args
        .next()
        .map(PathBuf::from)
        .unwrap_or_else(|| "results/tradeoff".into());
    let mut spec = ExperimentSpec::tradeoff(SystemConfig::default(), &out);
    spec.bits = vec![bits];
    let rows = run_tradeoff_sweep(&spec)?;
    for mode in [Mode::Sdma, Mode::Rsma] {
        println!("{mode} (b = {bits})\n  lambda     sum_rate  NMSE dB");
        for r in rows.iter().filter(|r| r.mode == mode) {
            let flag = if r.converged { "" } else { "  not converged" };
            println!(
                "  {:>9.3e}  {:>8.4}  {:>7.3}{flag}",
                r.lambda, r.sum_rate, r.nmse_db
            );
        }
    }
    Ok(())
}
