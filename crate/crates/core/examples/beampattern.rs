//! Solves the reference scenario for a few λ and draws the transmit beampattern
//! against the scaled desired pattern as text.

use rsma_jrc::admm;
use rsma_jrc::quantization::QuantizationModel;
use rsma_jrc::radar::achieved_pattern;
use rsma_jrc::scenario::{generate_rayleigh_channels, AngleGrid};
use rsma_jrc::SystemConfig;

fn main() -> rsma_jrc::Result<()> {
    let width = 60usize;
    for lambda in [0.01, 1.0, 10.0] {
        let cfg = SystemConfig {
            lambda,
            ..Default::default()
        };
        let sol = admm::run(&cfg, &generate_rayleigh_channels(&cfg)?)?;
        let model = QuantizationModel::new(cfg.bits, cfg.p_dac, cfg.noise_var_formula)?;
        let grid = AngleGrid::from_config(&cfg)?;
        let pattern = achieved_pattern(&sol.p, model.delta, model.noise_var, &grid);
        let peak = pattern.iter().copied().fold(sol.alpha, f64::max);

        println!(
            "λ = {lambda}: sum-rate {:.3}, NMSE {:.4}, alpha {:.3} ('#' achieved, '|' desired)",
            sol.metrics.sum_rate, sol.metrics.nmse, sol.alpha
        );
        for (i, theta) in grid.thetas.iter().enumerate().step_by(6) {
            let bar = ((pattern[i] / peak) * width as f64).round() as usize;
            let mut line: Vec<char> = "#"
                .repeat(bar)
                .chars()
                .chain(" ".repeat(width + 1 - bar.min(width)).chars())
                .collect();
            let want = ((sol.alpha * grid.desired[i] / peak) * width as f64).round() as usize;
            if grid.desired[i] > 0.0 {
                line[want.min(width)] = '|';
            }
            println!("{theta:>6.0}° {}", line.iter().collect::<String>());
        }
        println!();
    }
    Ok(())
}
