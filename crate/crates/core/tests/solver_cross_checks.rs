//! Cross-solver consistency: every scheme solver against the brute-force
//! oracle and against the analytical relationships between the schemes.
//!
//! Bound structure: the polished solvers dominate the oracle at the matched
//! lattice (containment, tight at 1e-9), never exceed exact relaxation
//! bounds, and stay within a measured quantization slack of a denser oracle
//! lattice (drift alarm; lattice oracles trail the continuum optimum by
//! O(spacing^2), or O(spacing) when an energy constraint is active).

use swipt_core::ideal::{solve_ideal, verify_structure};
use swipt_core::model::{EnergyTarget, Receiver};
use swipt_core::oracle::{
    brute_force_best, random_instance, reference_realization, OracleConfig, OracleConstraints,
    OracleObjective, ReferenceChannel, ScaleProfile,
};
use swipt_core::search::SearchControl;
use swipt_core::tdma_a::{solve_min_time, solve_slot2_sum_rate, solve_tdma_a};
use swipt_core::tdma_b::{deliverable_power, closed_form_condition, solve_slot, SlotProblem};

const SOLVER_GRID: usize = 16;
const DENSE_ORACLE_GRID: usize = 128;
/// Observed lattice-to-continuum gap ceiling for the dense oracle grid.
const QUANTIZATION_SLACK: f64 = 2e-2;

fn interference_free_bound(
    ch: &swipt_core::model::ChannelSet,
    budget: &swipt_core::model::PowerBudget,
) -> (f64, f64) {
    (
        (1.0 + budget.p1 * ch.h11.norm_sq() / ch.sigma1_sq).log2(),
        (1.0 + budget.p2 * ch.h22.norm_sq() / ch.sigma2_sq).log2(),
    )
}

#[test]
fn ideal_solver_dominates_equal_grid_oracle_and_respects_bounds() {
    let control = SearchControl::with_grid(SOLVER_GRID);
    for seed in 0..5u64 {
        let (ch, budget, tgt) = random_instance(seed, 2, &ScaleProfile::noise_limited());
        let sol = solve_ideal(&ch, &budget, &tgt, &control).unwrap();
        if !sol.feasible {
            continue;
        }
        let (e1, e2) = tgt.effective();
        let constraints = OracleConstraints {
            min_rx1_power: (e1 > 0.0).then_some(e1),
            min_rx2_power: (e2 > 0.0).then_some(e2),
        };
        if let Ok((_, equal_val)) = brute_force_best(
            &ch,
            &budget,
            OracleObjective::SumRate,
            constraints,
            &OracleConfig::with_grid(SOLVER_GRID),
        ) {
            assert!(
                sol.objective >= equal_val - 1e-9,
                "seed {seed}: solver {} below equal-grid oracle {equal_val}",
                sol.objective
            );
        }
        // Exact relaxation: interference-free single-user rates.
        let (b1, b2) = interference_free_bound(&ch, &budget);
        assert!(sol.objective <= b1 + b2 + 1e-9);
        // Drift alarm against a dense lattice.
        let (_, dense) = brute_force_best(
            &ch,
            &budget,
            OracleObjective::SumRate,
            constraints,
            &OracleConfig::with_grid(DENSE_ORACLE_GRID),
        )
        .unwrap();
        assert!(
            (sol.objective - dense).abs() <= QUANTIZATION_SLACK,
            "seed {seed}: solver {} vs dense oracle {dense}",
            sol.objective
        );
        assert!(sol.objective >= dense - 5e-3, "seed {seed}: basin miss vs dense oracle");
    }
}

#[test]
fn min_time_beta_matches_pruned_dense_oracle() {
    // The eigen closed form attains the max-min optimum. The min-scaled-
    // energy oracle is dominance-pruned, so a very dense lattice is cheap;
    // its kink-limited error at 768 points per angle sits well under 1e-3.
    let (ch, budget) = reference_realization(ReferenceChannel::One);
    let tgt = EnergyTarget::new(0.3, 0.55);
    let sol = solve_min_time(&ch, &budget, &tgt, 1e-9).unwrap();
    let (e1, e2) = tgt.effective();
    let (_, oracle_val) = brute_force_best(
        &ch,
        &budget,
        OracleObjective::MinScaledEnergy { e1, e2 },
        OracleConstraints::default(),
        &OracleConfig::with_grid(768),
    )
    .unwrap();
    assert!(sol.beta_star >= oracle_val - 1e-9);
    assert!(
        (sol.beta_star - oracle_val).abs() < 1e-3,
        "beta* {} vs oracle {oracle_val}",
        sol.beta_star
    );
    // Exact upper bound: each curve is capped by full maximum-ratio delivery.
    let (d1, d2) = deliverable_power(&ch, &budget);
    assert!(sol.beta_star <= (d1 / e1).min(d2 / e2) + 1e-12);
}

#[test]
fn slot2_solver_matches_oracle_on_random_instances() {
    let control = SearchControl::with_grid(SOLVER_GRID);
    for seed in 10..14u64 {
        let (ch, budget, _) = random_instance(seed, 2, &ScaleProfile::noise_limited());
        let sol = solve_slot2_sum_rate(&ch, &budget, &control).unwrap();
        let got = sol.r1 + sol.r2;
        let (_, equal_val) = brute_force_best(
            &ch,
            &budget,
            OracleObjective::SumRate,
            OracleConstraints::default(),
            &OracleConfig::with_grid(SOLVER_GRID),
        )
        .unwrap();
        assert!(got >= equal_val - 1e-9, "seed {seed}: {got} vs equal oracle {equal_val}");
        let (b1, b2) = interference_free_bound(&ch, &budget);
        assert!(got <= b1 + b2 + 1e-9, "seed {seed}: {got} above exact bound");
        let (_, dense) = brute_force_best(
            &ch,
            &budget,
            OracleObjective::SumRate,
            OracleConstraints::default(),
            &OracleConfig::with_grid(DENSE_ORACLE_GRID),
        )
        .unwrap();
        assert!(
            (got - dense).abs() <= QUANTIZATION_SLACK,
            "seed {seed}: {got} vs dense oracle {dense}"
        );
        assert!(got >= dense - 5e-3, "seed {seed}: basin miss vs dense oracle");
    }
}

#[test]
fn constrained_slot_matches_oracle_when_closed_form_inapplicable() {
    let control = SearchControl::with_grid(SOLVER_GRID);
    let mut exercised = 0;
    for seed in 20..40u64 {
        let (ch, budget, tgt) = random_instance(seed, 2, &ScaleProfile::noise_limited());
        let (_, e2) = tgt.effective();
        if e2 <= 0.0 {
            continue;
        }
        // Push the effective slot target high enough to defeat the closed form.
        let alpha = (e2 / (budget.p1 * ch.h12.norm_sq() + budget.p2 * ch.h22.norm_sq())).max(0.4);
        let sp = SlotProblem {
            id_receiver: Receiver::One,
            alpha_weight: alpha,
            energy_target_effective: e2 / alpha,
        };
        if closed_form_condition(&sp, &ch, &budget) {
            continue;
        }
        exercised += 1;
        let sol = solve_slot(&sp, &ch, &budget, &control).unwrap();
        assert!(!sol.used_closed_form);
        let constraints = OracleConstraints {
            min_rx1_power: None,
            min_rx2_power: Some(sp.energy_target_effective),
        };
        if let Ok((_, equal_val)) = brute_force_best(
            &ch,
            &budget,
            OracleObjective::Rate1,
            constraints,
            &OracleConfig::with_grid(SOLVER_GRID),
        ) {
            assert!(
                sol.rate >= equal_val - 1e-9,
                "seed {seed}: {} vs equal oracle {equal_val}",
                sol.rate
            );
        }
        // Exact bound: the unconstrained interference-free rate.
        let cap = (1.0 + budget.p1 * ch.h11.norm_sq() / ch.sigma1_sq).log2();
        assert!(sol.rate <= cap + 1e-9);
        // Active energy floors thin the feasible lattice set, so the dense
        // oracle can trail the solver by O(spacing) or find no feasible cell
        // at all when the target sits on the boundary; alarm only on gross
        // disagreement.
        if let Ok((_, dense)) = brute_force_best(
            &ch,
            &budget,
            OracleObjective::Rate1,
            constraints,
            &OracleConfig::with_grid(DENSE_ORACLE_GRID),
        ) {
            assert!(
                (sol.rate - dense).abs() <= QUANTIZATION_SLACK,
                "seed {seed}: {} vs dense oracle {dense}",
                sol.rate
            );
            assert!(sol.rate >= dense - 5e-3, "seed {seed}: basin miss vs dense oracle");
        }
    }
    assert!(exercised >= 3, "only {exercised} instances defeated the closed form");
}

#[test]
fn scheme_a_never_beats_ideal_on_noise_limited_reference() {
    // With moderate noise the simultaneous scheme dominates the two-phase
    // scheme at every operating point.
    let (ch, budget) = reference_realization(ReferenceChannel::One);
    let control = SearchControl::with_grid(16);
    for (e1, e2) in [(0.1, 0.1), (0.3, 0.4), (0.5, 0.8), (0.6, 1.0)] {
        let tgt = EnergyTarget::new(e1, e2);
        let ideal = solve_ideal(&ch, &budget, &tgt, &control).unwrap();
        let scheme_a = solve_tdma_a(&ch, &budget, &tgt, &control).unwrap();
        if !ideal.feasible || !scheme_a.feasible() {
            continue;
        }
        assert!(
            ideal.objective >= scheme_a.overall_sum_rate - 1e-4,
            "ideal {} vs scheme A {} at ({e1},{e2})",
            ideal.objective,
            scheme_a.overall_sum_rate
        );
        // Strictly better at interior operating points: the two-phase scheme
        // spends part of the interval not transmitting information.
        if e1 >= 0.3 {
            assert!(
                ideal.objective > scheme_a.overall_sum_rate + 0.01,
                "expected a strict gap at ({e1},{e2})"
            );
        }
    }
}

#[test]
fn random_sampled_grid_never_beats_ideal_solver_materially() {
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use swipt_core::linalg::HermitianMatrix;
    use swipt_core::model::{sum_rate, CovariancePair};

    let control = SearchControl::with_grid(SOLVER_GRID);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5a11);
    for seed in [2u64, 7, 31] {
        let (ch, budget, tgt) = random_instance(seed, 2, &ScaleProfile::noise_limited());
        let sol = solve_ideal(&ch, &budget, &tgt, &control).unwrap();
        if !sol.feasible {
            continue;
        }
        let (e1, e2) = tgt.effective();
        let bases = [
            swipt_core::linalg::orthonormal_span_basis(&ch.h11, &ch.h12),
            swipt_core::linalg::orthonormal_span_basis(&ch.h21, &ch.h22),
        ];
        // Ten times the solver's coarse cell count, sampled uniformly over
        // the four angles and evaluated through explicit covariances.
        let samples = 10 * (SOLVER_GRID + 1).pow(2) * SOLVER_GRID.pow(2);
        for _ in 0..samples {
            let mut covs = Vec::with_capacity(2);
            for (tx, basis) in bases.iter().enumerate() {
                let theta = rng.gen::<f64>() * std::f64::consts::FRAC_PI_2;
                let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                let dir = basis
                    .u1
                    .scale(Complex64::new(theta.cos(), 0.0))
                    .add(&basis.u2.as_ref().unwrap().scale(Complex64::from_polar(theta.sin(), phi)));
                covs.push(HermitianMatrix::scaled_outer(budget.power(tx + 1), &dir));
            }
            let pair = CovariancePair { s1: covs.remove(0), s2: covs.remove(0) };
            let q_rx1 = swipt_core::linalg::quadratic_form(&ch.h11, &pair.s1).unwrap()
                + swipt_core::linalg::quadratic_form(&ch.h21, &pair.s2).unwrap();
            let q_rx2 = swipt_core::linalg::quadratic_form(&ch.h12, &pair.s1).unwrap()
                + swipt_core::linalg::quadratic_form(&ch.h22, &pair.s2).unwrap();
            if q_rx1 < e1 - 1e-9 || q_rx2 < e2 - 1e-9 {
                continue;
            }
            let value = sum_rate(&pair, &ch).unwrap();
            assert!(
                value <= sol.objective + 1e-3,
                "seed {seed}: sampled point {value} beats solver {} by more than 1e-3",
                sol.objective
            );
        }
    }
}

#[test]
fn structure_verifier_accepts_feasible_random_instances() {
    let control = SearchControl::with_grid(10);
    for seed in 50..60u64 {
        let (ch, budget, tgt) = random_instance(seed, 2, &ScaleProfile::interference_limited());
        let sol = solve_ideal(&ch, &budget, &tgt, &control).unwrap();
        if !sol.feasible {
            continue;
        }
        let report = verify_structure(&sol, &ch, &budget).unwrap();
        assert!(report.all_pass(), "seed {seed}: {:?}", report.failed_clauses());
    }
}
