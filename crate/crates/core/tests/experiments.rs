use rsma_jrc::experiments::{
    run_convergence, run_tradeoff_sweep, ExperimentSpec, Modes, StoredPrecoder,
};
use rsma_jrc::{Mode, SystemConfig};

#[test]
fn convergence_traces_are_deterministic() {
    let base = SystemConfig {
        admm_max_iter: 6,
        ..Default::default()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::convergence(base, a.path());
    spec.bits = vec![4, 8];
    let first = run_convergence(&spec).unwrap();
    spec.out_dir = b.path().to_path_buf();
    let second = run_convergence(&spec).unwrap();
    assert_eq!(first.len(), 2);
    for (x, y) in first.iter().zip(&second) {
        let tx = std::fs::read_to_string(x).unwrap();
        assert_eq!(tx, std::fs::read_to_string(y).unwrap());
        assert!(tx.starts_with("iter,primal_residual,dual_residual,lagrangian,sum_rate,nmse\n"));
        assert_eq!(tx.lines().count(), 7);
    }
}

#[test]
fn tradeoff_moves_along_the_frontier() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::tradeoff(SystemConfig::default(), dir.path());
    spec.bits = vec![6];
    spec.lambdas = vec![0.1, 1.0, 10.0];
    spec.modes = Modes::Rsma;
    let rows = run_tradeoff_sweep(&spec).unwrap();
    assert!(dir.path().join("tradeoff_b6.csv").exists());
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.mode == Mode::Rsma && r.converged));
    for w in rows.windows(2) {
        assert!(
            w[1].sum_rate <= w[0].sum_rate + 1e-3,
            "{} then {}",
            w[0].sum_rate,
            w[1].sum_rate
        );
        assert!(
            w[1].nmse <= w[0].nmse + 1e-3,
            "{} then {}",
            w[0].nmse,
            w[1].nmse
        );
    }
    for r in &rows {
        let stored = StoredPrecoder::load(&dir.path().join(&r.precoder_file)).unwrap();
        let m = stored.reevaluate().unwrap();
        assert!((m.sum_rate - r.sum_rate).abs() <= 1e-9 * r.sum_rate);
        assert!((m.nmse - r.nmse).abs() <= 1e-9 * r.nmse);
    }
}
