//! Closed-form model functions against fresh simulation sweeps, fit
//! recovery of the model constants, and the Grover baseline.

use qwalk_core::collapsed;
use qwalk_core::fit::{
    critical_samples, fit_pmax_constant, fit_topt_constants, FittedConstants, PmaxSample,
    SweepObservation, ToptSample,
};
use qwalk_core::grover::{default_grover_budget, grover_gap, grover_run, grover_run_with_state};
use qwalk_core::model::{
    self, critical_scale, default_step_budget, gap_models, grover_gap_model, grover_pmax_model,
    p0, p_max_model, p_model, t_opt_model, ModelParams,
};
use qwalk_core::{Trajectory, WalkConfig};

fn cfg(m: u32, delta: f64) -> WalkConfig {
    WalkConfig::new(m, delta).unwrap()
}

fn walk(m: u32, delta: f64) -> Trajectory {
    collapsed::evolve(&cfg(m, delta), default_step_budget(m))
}

#[test]
fn model_peak_location_tracks_simulation() {
    // the modeled optimal iteration count lands within one step of the
    // simulated first peak across the sweep grid
    let params = ModelParams::default();
    for m in 4..=14u32 {
        for &delta in &[0.0, 0.01, 0.05] {
            let traj = walk(m, delta);
            let first = traj.first_peak().unwrap().t as f64;
            let modeled = t_opt_model(m, delta, &params);
            assert!(
                (modeled - first).abs() <= 1.0 + 0.05 * first,
                "m={m} delta={delta}: model {modeled:.2} vs simulated {first}"
            );
        }
    }
}

#[test]
fn model_peak_height_tracks_simulation() {
    let params = ModelParams::default();
    for &m in &[4u32, 6, 8, 10, 12, 14] {
        for &delta in &[0.0, 0.01, 0.05] {
            let sim = walk(m, delta).peak().unwrap().p_success;
            let modeled = p_max_model(m, delta, &params).unwrap();
            assert!(
                (sim - modeled).abs() < 0.06,
                "m={m} delta={delta}: sim {sim:.4} vs model {modeled:.4}"
            );
        }
    }
}

#[test]
fn model_curve_follows_simulation_within_twice_its_band() {
    // pointwise agreement: measured worst deviation is just under 0.2
    // (peak-height offset plus slow phase drift of the sine model)
    let params = ModelParams::default();
    let mut worst: f64 = 0.0;
    for &m in &[6u32, 8, 10, 12] {
        for &delta in &[0.0, 0.01, 0.05] {
            let t_estimate = t_opt_model(m, delta, &params);
            let budget = (2.0 * t_estimate).ceil() as u32;
            let traj = collapsed::evolve(&cfg(m, delta), budget);
            for pt in traj.points() {
                let modeled = p_model(m, delta, pt.t as f64, &params).unwrap();
                worst = worst.max((modeled - pt.p_success).abs());
            }
        }
    }
    assert!(worst < 0.2, "worst pointwise deviation {worst:.3}");
}

#[test]
fn peak_success_constant_recovered_from_simulation() {
    // sweep m = 6..14, recover the saturation constant from fresh runs
    let mut samples = Vec::new();
    for m in 6..=14u32 {
        let p0_obs = walk(m, 0.0).peak().unwrap().p_success;
        for &delta in &[1e-4, 1e-3, 1e-2] {
            let p_max = walk(m, delta).peak().unwrap().p_success;
            samples.push(PmaxSample {
                m,
                delta,
                p_max,
                p0: p0_obs,
            });
        }
    }
    let fit = fit_pmax_constant(&samples).unwrap();
    match fit.constants {
        FittedConstants::PeakSuccess { pmax_const } => {
            assert!(
                (3.0..=4.6).contains(&pmax_const),
                "fitted constant {pmax_const:.3} outside [3.0, 4.6]"
            );
        }
        _ => panic!("wrong fit kind"),
    }
}

#[test]
fn iteration_constants_recovered_from_simulation() {
    // identifying grid: plateau-sensitive errors included so both
    // constants are observable
    let mut samples = Vec::new();
    for m in 8..=14u32 {
        for &delta in &[0.0, 0.005, 0.01, 0.02, 0.05] {
            let traj = walk(m, delta);
            samples.push(ToptSample {
                m,
                delta,
                t_opt: traj.first_peak().unwrap().t as f64,
            });
        }
    }
    let fit = fit_topt_constants(&samples).unwrap();
    match fit.constants {
        FittedConstants::IterationCount { inner, delta_coeff } => {
            assert!(
                (inner - 16.0).abs() / 16.0 <= 0.25,
                "inner constant {inner:.3} not within 25% of 16"
            );
            assert!(
                (delta_coeff - 4.0).abs() / 4.0 <= 0.25,
                "error coefficient {delta_coeff:.3} not within 25% of 4"
            );
        }
        _ => panic!("wrong fit kind"),
    }
}

#[test]
fn critical_scale_matches_simulated_onset() {
    // where the delta = 0.01 peak first drops more than 5% relative
    let mut obs = Vec::new();
    for m in 6..=14u32 {
        let p0_obs = walk(m, 0.0).peak().unwrap().p_success;
        for &delta in &[1e-3, 1e-2] {
            obs.push(SweepObservation {
                m,
                delta,
                p_max: walk(m, delta).peak().unwrap().p_success,
                p0_observed: p0_obs,
            });
        }
    }
    let crit = critical_samples(&obs, 0.05);
    // delta = 1e-3 never drops 5% by m = 14: censored; delta = 1e-2 does
    assert_eq!(crit.len(), 1);
    assert_eq!(crit[0].delta, 1e-2);
    let formula = critical_scale(1e-2, &ModelParams::default()).unwrap();
    assert!(
        (crit[0].critical_db_exponent - formula).abs() <= 1.0,
        "measured critical database exponent {} vs formula {formula:.2}",
        crit[0].critical_db_exponent
    );
}

#[test]
fn almost_unaffected_below_critical_dimension() {
    // within the critical dimension the peak stays within 5% relative
    let params = ModelParams::default();
    for &delta in &[1e-3, 1e-2] {
        let m_crit = model::critical_dimension(delta, &params).unwrap().floor() as u32;
        for m in 6..=m_crit.min(14) {
            let base = walk(m, 0.0).peak().unwrap().p_success;
            let with_err = walk(m, delta).peak().unwrap().p_success;
            assert!(
                with_err >= 0.95 * base,
                "delta={delta} m={m}: {with_err:.4} vs {base:.4}"
            );
        }
    }
}

#[test]
fn grover_simulation_matches_its_closed_form() {
    for &n_db in &[8u32, 10, 12] {
        for &delta in &[0.0, 0.001, 0.01, 0.05] {
            let traj = grover_run(n_db, delta, default_grover_budget(n_db)).unwrap();
            let sim = traj.peak().unwrap().p_success;
            let modeled = grover_pmax_model(n_db, delta);
            assert!(
                (sim - modeled).abs() < 0.03,
                "n_db={n_db} delta={delta}: sim {sim:.5} vs model {modeled:.5}"
            );
        }
    }
}

#[test]
fn grover_gap_equals_uniform_rest_identity() {
    for &n_db in &[8u32, 10] {
        for &delta in &[0.0, 0.01, 0.0625] {
            let budget = default_grover_budget(n_db);
            let traj = grover_run(n_db, delta, budget).unwrap();
            let peak = traj.peak().unwrap();
            let identity = grover_gap_model(peak.p_success, (1u64 << n_db) as f64);
            let sim_gap = grover_gap(n_db, delta).unwrap();
            assert!(
                (sim_gap - identity).abs() < 1e-6,
                "n_db={n_db} delta={delta}: {sim_gap} vs {identity}"
            );
        }
    }
}

#[test]
fn grover_unmarked_register_stays_uniform() {
    let (_, state) = grover_run_with_state(10, 0.05, 40).unwrap();
    assert!(state.unmarked_spread() < 1e-12);
}

#[test]
fn walk_gap_is_large_without_error() {
    let comparison = gap_models(&cfg(8, 0.0), default_step_budget(8));
    assert!(comparison.walk_gap > 0.8, "gap {}", comparison.walk_gap);
    // error-free difference against Grover is slightly negative: the walk
    // peak saturates at 1/c^2 < 1 while Grover reaches 1
    assert!(comparison.difference <= 0.0);
    assert!(comparison.difference > -0.25);
}

#[test]
fn gap_difference_grows_with_dimension_at_fixed_error() {
    // vertex-count pairing: the deficit shrinks monotonically with m
    let mut prev = f64::NEG_INFINITY;
    for m in (8..=14u32).step_by(2) {
        let cmp = gap_models(&cfg(m, 0.01), default_step_budget(m));
        assert!(
            cmp.difference_vertex_paired > prev,
            "m={m}: {} after {prev}",
            cmp.difference_vertex_paired
        );
        prev = cmp.difference_vertex_paired;
    }
}

#[test]
fn walk_gap_decreases_with_error_at_fixed_dimension() {
    let gaps: Vec<f64> = [0.0, 0.01, 0.05, 0.1]
        .iter()
        .map(|&d| gap_models(&cfg(10, d), default_step_budget(10)).walk_gap)
        .collect();
    for pair in gaps.windows(2) {
        assert!(pair[1] < pair[0], "{gaps:?}");
    }
}

#[test]
fn iteration_count_plateau_approached_at_large_error() {
    // at delta = 0.1 the plateau pi/(2 delta) ~ 15.7 is nearly reached by
    // m = 14
    let params = ModelParams::default();
    let plateau = std::f64::consts::PI / 0.2;
    let t14 = walk(14, 0.1).first_peak().unwrap().t as f64;
    assert!((t14 - plateau).abs() / plateau < 0.15, "t {t14} vs plateau {plateau:.2}");
    assert!((t_opt_model(14, 0.1, &params) - plateau).abs() / plateau < 0.05);
}

#[test]
fn observed_error_free_peak_tracks_success_floor() {
    // the simulated error-free peak exceeds the closed-form floor by a
    // finite-size margin below 0.06
    for m in [4u32, 6, 8, 10, 12, 14] {
        let sim = walk(m, 0.0).peak().unwrap().p_success;
        let floor = p0(m).unwrap();
        assert!(sim >= floor - 1e-9, "m={m}");
        assert!(sim - floor < 0.06, "m={m}: sim {sim:.4} floor {floor:.4}");
    }
}
