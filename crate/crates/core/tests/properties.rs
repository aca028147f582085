use num_complex::Complex64;
use proptest::prelude::*;

use rsma_jrc::comms::{sinr_normalized_form, sinr_received_form, stream_rates, PrecoderMatrix};
use rsma_jrc::experiments::StoredPrecoder;
use rsma_jrc::linalg::CMatrix;
use rsma_jrc::quantization::{
    dac_power, precoder_power_budget, resolution_delta, QuantizationModel,
};
use rsma_jrc::radar::{alpha_from_pattern, error_from_pattern};
use rsma_jrc::scenario::{generate_rayleigh_channels, ChannelSet};
use rsma_jrc::wmmse::project_rows;
use rsma_jrc::{NoiseVarFormula, SystemConfig};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), rows * cols).prop_map(move |v| {
        CMatrix::from_iterator(rows, cols, v.into_iter().map(|(a, b)| Complex64::new(a, b)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    // above ~25 bits δ rounds to 1.0
    #[test]
    fn delta_grows_with_bits(b in 1u32..20) {
        let (lo, hi) = (resolution_delta(b).unwrap(), resolution_delta(b + 1).unwrap());
        prop_assert!(lo > 0.0 && lo < hi && hi <= 1.0);
    }

    #[test]
    fn budget_splits_total_power(b in 1u32..12, antennas in 1usize..9, p_dac in 1e-6f64..1e-4) {
        let p_total = 1.0;
        match precoder_power_budget(p_total, antennas, b, p_dac) {
            Ok(budget) => {
                let dacs = antennas as f64 * dac_power(b, p_dac).unwrap();
                prop_assert!((budget.total + dacs - p_total).abs() < 1e-12);
                prop_assert!((budget.per_antenna * antennas as f64 - budget.total).abs() < 1e-12);
            }
            Err(_) => prop_assert!(antennas as f64 * 2f64.powi(b as i32) * p_dac >= p_total),
        }
    }

    #[test]
    fn row_projection_meets_per_antenna_budget(p in matrix(4, 3), per in 0.01f64..2.0) {
        prop_assume!(p.row_iter().all(|r| r.norm() > 1e-3));
        let mut p = PrecoderMatrix::new(p).unwrap();
        project_rows(&mut p, per);
        for pw in p.per_antenna_power() {
            prop_assert!((pw - per).abs() < 1e-12 * per.max(1.0));
        }
    }

    #[test]
    fn sinr_forms_agree(s in 0.0f64..10.0, i in 0.0f64..10.0, d in 0.05f64..1.0, n in 1e-6f64..1.0) {
        let a = sinr_received_form(s, i, d, n);
        let b = sinr_normalized_form(s, i, d, n);
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }

    #[test]
    fn rates_are_nonnegative(p in matrix(4, 3), seed in 0u64..1000, b in 1u32..10) {
        let cfg = SystemConfig { seed, ..Default::default() };
        let ch: ChannelSet = generate_rayleigh_channels(&cfg).unwrap();
        let model = QuantizationModel::new(b, cfg.p_dac, NoiseVarFormula::Squared).unwrap();
        let r = stream_rates(&PrecoderMatrix::new(p).unwrap(), &ch, &model, cfg.noise_power).unwrap();
        prop_assert!(r.common.iter().chain(&r.private).all(|x| *x >= 0.0 && x.is_finite()));
    }

    #[test]
    fn least_squares_alpha_minimizes_error(achieved in prop::collection::vec(0.0f64..5.0, 9), t in -0.5f64..0.5) {
        let desired = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0];
        let alpha = alpha_from_pattern(&desired, &achieved).unwrap();
        let best = error_from_pattern(alpha, &desired, &achieved);
        prop_assert!(error_from_pattern((alpha + t).max(1e-9), &desired, &achieved) >= best - 1e-12);
    }

    #[test]
    fn stored_precoders_round_trip(p in matrix(4, 3), alpha in 1e-6f64..1e3, c0 in 0.0f64..5.0) {
        let cfg = SystemConfig::default();
        let stored = StoredPrecoder {
            cfg,
            p: PrecoderMatrix::new(p).unwrap(),
            c: vec![c0, c0 / 3.0],
            alpha,
            sum_rate: c0 * 7.0,
            nmse: alpha.sqrt(),
        };
        let back = StoredPrecoder::parse(&stored.to_text()).unwrap();
        prop_assert_eq!(back.p, stored.p);
        prop_assert_eq!(back.c, stored.c);
        prop_assert_eq!(back.alpha, stored.alpha);
    }
}
