//! The sum-rate block on its own. It carries no power constraint; the
//! consensus penalty `(ρ/2)‖P − P_u‖²` is what keeps it near the
//! power-feasible precoders `P_u`. Smaller ρ lets the step move further and
//! gain more rate.

use rsma_jrc::admm::{Problem, Stacked};
use rsma_jrc::comms::stream_rates;
use rsma_jrc::linalg::RVector;
use rsma_jrc::scenario::generate_rayleigh_channels;
use rsma_jrc::wmmse::{matched_filter_init, solve_v_update, Penalty, WmmseOptions};
use rsma_jrc::{Mode, SystemConfig};

fn main() -> rsma_jrc::Result<()> {
    let cfg = SystemConfig::default();
    let problem = Problem::new(&cfg, generate_rayleigh_channels(&cfg)?)?;
    let link = problem.link();
    for mode in [Mode::Sdma, Mode::Rsma] {
        let pu = matched_filter_init(&problem.channels, &problem.budget, mode, 0.1);
        let base = stream_rates(&pu, &problem.channels, &problem.model, cfg.noise_power)?;
        println!(
            "{mode}: matched filter sum-rate {:.4}",
            base.private.iter().sum::<f64>()
                + if mode == Mode::Rsma {
                    base.common_capacity()
                } else {
                    0.0
                }
        );
        let u = Stacked {
            alpha: 1.0,
            c: vec![0.0; cfg.users],
            p: pu.clone(),
        };
        let y = RVector::zeros(problem.ops.dual_len());
        for rho in [3000.0, 300.0, 30.0] {
            let penalty = Penalty::new(&u, &y, rho, &problem.ops);
            let opts = WmmseOptions {
                tol: 1e-10,
                max_iter: 500,
                mode,
            };
            let out = solve_v_update(&u, &penalty, &link, &pu, &opts)?;
            let rates = stream_rates(&out.v.p, &problem.channels, &problem.model, cfg.noise_power)?;
            let sum_rate = out.v.c.iter().sum::<f64>() + rates.private.iter().sum::<f64>();
            println!(
                "  rho {rho:>6}: {:>3} AO iterations, objective {:.4} -> {:.4}, sum-rate {sum_rate:.4}, |P - P_u| {:.4}",
                out.iterations,
                out.objectives[0],
                out.objectives.last().unwrap(),
                (&out.v.p.p - &pu.p).norm()
            );
        }
    }
    Ok(())
}
