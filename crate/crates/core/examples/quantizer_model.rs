//! Linear DAC model against bit count: resolution factor, quantization noise
//! variance, DAC power and what is left for the precoders. Then a short
//! Monte-Carlo check of the model against a real uniform quantizer.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rsma_jrc::quantization::{
    apply_uniform_quantizer, bussgang_estimate, complex_gaussian, default_step,
    precoder_power_budget, QuantizationModel,
};
use rsma_jrc::{NoiseVarFormula, SystemConfig};

fn main() -> rsma_jrc::Result<()> {
    let cfg = SystemConfig::default();
    println!(" b    delta      sigma_e^2   P_DAC(b) W   precoder budget W");
    for b in 1..=12 {
        let model = QuantizationModel::new(b, cfg.p_dac, NoiseVarFormula::Squared)?;
        match precoder_power_budget(cfg.p_total, cfg.antennas, b, cfg.p_dac) {
            Ok(budget) => println!(
                "{b:>2}  {:.6}  {:.4e}  {:.4e}   {:.6}",
                model.delta, model.noise_var, model.dac_power, budget.total
            ),
            Err(e) => println!(
                "{b:>2}  {:.6}  {:.4e}  {:.4e}   {e}",
                model.delta, model.noise_var, model.dac_power
            ),
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<_> = (0..200_000)
        .map(|_| complex_gaussian(&mut rng, 1.0))
        .collect();
    println!("\n b  fitted gain  model delta  corr(e, x)");
    for b in [1, 2, 3, 4, 6, 8] {
        let q = apply_uniform_quantizer(&x, b, default_step(b, 0.5f64.sqrt()));
        let est = bussgang_estimate(&x, &q);
        let model = QuantizationModel::new(b, cfg.p_dac, NoiseVarFormula::Squared)?;
        println!(
            "{b:>2}  {:.6}     {:.6}     {:.2e}",
            est.gain.re, model.delta, est.correlation
        );
    }
    Ok(())
}
