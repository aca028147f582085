//! SINRs, rates and beampattern of matched-filter precoders on the
//! reference scenario, with and without a common stream.

use rsma_jrc::comms::{common_sinr, effective_noise_variance, private_sinr, stream_rates};
use rsma_jrc::quantization::{precoder_power_budget, QuantizationModel};
use rsma_jrc::radar::BeampatternReport;
use rsma_jrc::scenario::{generate_rayleigh_channels, AngleGrid};
use rsma_jrc::wmmse::matched_filter_init;
use rsma_jrc::{Mode, SystemConfig};

fn main() -> rsma_jrc::Result<()> {
    let cfg = SystemConfig::default();
    let channels = generate_rayleigh_channels(&cfg)?;
    let model = QuantizationModel::new(cfg.bits, cfg.p_dac, cfg.noise_var_formula)?;
    let budget = precoder_power_budget(cfg.p_total, cfg.antennas, cfg.bits, cfg.p_dac)?;
    let grid = AngleGrid::from_config(&cfg)?;

    for (mode, share) in [(Mode::Sdma, 0.0), (Mode::Rsma, 0.1), (Mode::Rsma, 0.5)] {
        let p = matched_filter_init(&channels, &budget, mode, share);
        println!("{mode} with {:.0}% common power", share * 100.0);
        for k in 0..cfg.users {
            let h = channels.row(k);
            let eff = effective_noise_variance(&h, model.noise_var, cfg.noise_power);
            println!(
                "  user {k}: |h|^2 {:.3}, common SINR {:.3e}, private SINR {:.3e}",
                channels.gain(k),
                common_sinr(&p, &h, model.delta, eff)?,
                private_sinr(&p, &h, k, model.delta, eff)?
            );
        }
        let rates = stream_rates(&p, &channels, &model, cfg.noise_power)?;
        println!(
            "  common capacity {:.3}, private sum {:.3}",
            rates.common_capacity(),
            rates.private.iter().sum::<f64>()
        );
        let bp = BeampatternReport::evaluate(&p, model.delta, model.noise_var, &grid, None)?;
        println!(
            "  beampattern NMSE {:.4} ({:.2} dB), alpha {:.4}",
            bp.nmse,
            bp.nmse_db(),
            bp.alpha
        );
    }
    Ok(())
}
