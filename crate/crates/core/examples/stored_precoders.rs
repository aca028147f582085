//! Writes a solved design to disk, reads it back and re-evaluates it from
//! the stored config alone.

use rsma_jrc::admm;
use rsma_jrc::experiments::StoredPrecoder;
use rsma_jrc::scenario::generate_rayleigh_channels;
use rsma_jrc::SystemConfig;

fn main() -> rsma_jrc::Result<()> {
    let cfg = SystemConfig {
        bits: 6,
        lambda: 3.0,
        ..Default::default()
    };
    let sol = admm::run(&cfg, &generate_rayleigh_channels(&cfg)?)?;
    let dir = std::env::temp_dir().join("rsma-jrc-example");
    let path = dir.join("design.txt");
    StoredPrecoder::from_solution(&cfg, &sol).save(&path)?;

    let text = std::fs::read_to_string(&path)?;
    for line in text
        .lines()
        .filter(|l| !l.starts_with("# ") || l.contains("alpha") || l.contains("bits"))
        .take(8)
    {
        println!("{line}");
    }
    let back = StoredPrecoder::load(&path)?;
    let m = back.reevaluate()?;
    println!(
        "stored sum-rate {:.15}\nrecomputed      {:.15}",
        back.sum_rate, m.sum_rate
    );
    println!(
        "stored NMSE     {:.15}\nrecomputed      {:.15}",
        back.nmse, m.nmse
    );
    Ok(())
}
