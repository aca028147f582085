//! RSMA and SDMA at λ = 10 for b = 4…11. Takes about a minute.
//! Usage: `bit_sweep [out_dir]` (default `results/bitsweep`).

use std::path::PathBuf;

use rsma_jrc::experiments::{run_bit_sweep, ExperimentSpec};
use rsma_jrc::SystemConfig;

fn main() -> rsma_jrc::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| "results/bitsweep".into());
    let spec = ExperimentSpec::bit_sweep(SystemConfig::default(), &out);
    let rows = run_bit_sweep(&spec)?;
    println!("mode   b  sum_rate    NMSE   NMSE dB  precoder W  DAC W");
    for r in &rows {
        println!(
            "{}  {:>2}  {:>8.4}  {:.4}  {:>7.3}  {:.6}    {:.6}",
            r.mode, r.bits, r.sum_rate, r.nmse, r.nmse_db, r.precoder_power, r.dac_power
        );
    }
    print!(
        "\n{}",
        std::fs::read_to_string(out.join("bitsweep_summary.txt"))?
    );
    Ok(())
}
