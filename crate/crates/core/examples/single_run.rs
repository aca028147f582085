//! Reference scenario (K = 2, N_t = 4, 8-bit DACs, λ = 1): SDMA first, then RSMA
//! warm started from it.

use rsma_jrc::admm::{self, Problem};
use rsma_jrc::scenario::generate_rayleigh_channels;
use rsma_jrc::SystemConfig;

fn main() -> rsma_jrc::Result<()> {
    let cfg = SystemConfig::default();
    let channels = generate_rayleigh_channels(&cfg)?;
    let (sdma, rsma) = admm::run_both(&cfg, &channels)?;

    for sol in [&sdma, &rsma] {
        let m = &sol.metrics;
        println!(
            "{}: {} after {} iterations",
            sol.mode,
            if sol.converged {
                "converged"
            } else {
                "stopped"
            },
            sol.iterations
        );
        println!("  sum-rate   {:.4} bits/s/Hz", m.sum_rate);
        println!("  common     {:?}", m.c);
        println!("  private    {:?}", m.private_rates);
        println!(
            "  NMSE       {:.4} ({:.2} dB)",
            m.nmse,
            10.0 * m.nmse.log10()
        );
        println!("  alpha      {:.4}", sol.alpha);
        println!("  objective  {:.4}", m.objective);
    }

    let problem = Problem::new(&cfg, channels)?;
    let again = admm::evaluate(&rsma, &problem)?;
    println!("re-evaluated RSMA sum-rate {:.12}", again.sum_rate);
    Ok(())
}
