//! The beampattern block alone: with ρ = 0 and y = 0 the u-update is the
//! radar-only design problem. Prints the relaxation bound, the recovered
//! rank-one design and the gap between them.

use rsma_jrc::admm::{Problem, Stacked};
use rsma_jrc::linalg::RVector;
use rsma_jrc::radar::BeampatternReport;
use rsma_jrc::scenario::generate_rayleigh_channels;
use rsma_jrc::sdr::{solve_u_update, UUpdateOptions};
use rsma_jrc::wmmse::matched_filter_init;
use rsma_jrc::{Mode, SystemConfig};

fn main() -> rsma_jrc::Result<()> {
    for bits in [4, 8, 10] {
        let cfg = SystemConfig {
            bits,
            lambda: 1.0,
            ..Default::default()
        };
        let problem = Problem::new(&cfg, generate_rayleigh_channels(&cfg)?)?;
        let p0 = matched_filter_init(&problem.channels, &problem.budget, Mode::Rsma, 0.1);
        let v = Stacked {
            alpha: 1.0,
            c: vec![0.0; cfg.users],
            p: p0,
        };
        let y = RVector::zeros(problem.ops.dual_len());
        let opts = UUpdateOptions {
            tol: 1e-8,
            max_iter: 50_000,
            randomization: 32,
            refine_iter: 500,
            mode: Mode::Rsma,
        };
        let up = solve_u_update(
            &v,
            &y,
            0.0,
            &problem.ops,
            &problem.model,
            &problem.grid,
            &problem.budget,
            1.0,
            &opts,
            None,
            None,
        )?;
        let bp = BeampatternReport::evaluate(
            &up.u.p,
            problem.model.delta,
            problem.model.noise_var,
            &problem.grid,
            None,
        )?;
        println!(
            "b = {bits:>2}: bound {:.5}, recovered {:.5} via {:?}, rank gap {:.2e}, NMSE {:.4}, {} SDP iterations",
            up.relaxation_objective, up.objective, up.source, up.rank_gap, bp.nmse, up.sdp_iterations
        );
    }
    Ok(())
}
