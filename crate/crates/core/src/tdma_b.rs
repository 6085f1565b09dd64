//! TDMA scheme B: in each slot one receiver decodes while the other harvests.
//!
//! Slot 1 maximizes receiver 1's rate subject to receiver 2 harvesting
//! `E2 / alpha`; slot 2 mirrors the roles with target `E1 / (1 - alpha)`.
//! Feasibility of the whole scheme has the closed form
//! `E1 / D1 + E2 / D2 <= 1` with `D_i` the per-receiver deliverable-power
//! maxima, which also yields the interval of admissible slot fractions.
//!
//! Each slot problem is quasi-convex; when the channel geometry favors the
//! harvesting receiver a closed form applies (maximum-ratio beam for the
//! decoding link, interference-free complement beam for the harvesting-side
//! transmitter). Otherwise the slot is solved by the constrained rank-one
//! search. The Charnes-Cooper change of variables that turns a slot problem
//! into a convex program is implemented and property-checked as the
//! equivalence artifact; it is not used as a solution path.

use crate::error::{Error, Result};
use crate::linalg::{complement_projector, quadratic_form, CVector, HermitianMatrix};
use crate::model::{
    beamformer_to_covariance, rate_1, Beamformer, ChannelSet, CovariancePair, EnergyTarget,
    PowerBudget, Receiver, ENERGY_SLACK,
};
use crate::search::{
    golden_max, EnergyFloor, PairObjective, PairSearch, SearchControl, TxFamily,
};

/// One slot's problem data: which receiver decodes, the slot's share of the
/// interval, and the effective received-power target for the harvesting
/// receiver (`E2 / alpha` or `E1 / (1 - alpha)`).
#[derive(Debug, Clone, Copy)]
pub struct SlotProblem {
    pub id_receiver: Receiver,
    pub alpha_weight: f64,
    pub energy_target_effective: f64,
}

/// Closed-form feasibility test for the whole scheme:
/// `E1 / (P1 |h11|^2 + P2 |h21|^2) + E2 / (P1 |h12|^2 + P2 |h22|^2) <= 1`.
pub fn feasible_tdma_b(ch: &ChannelSet, budget: &PowerBudget, tgt: &EnergyTarget) -> bool {
    let (e1, e2) = tgt.effective();
    let (d1, d2) = deliverable_power(ch, budget);
    e1 / d1 + e2 / d2 <= 1.0 + ENERGY_SLACK
}

/// Maximum received power deliverable to each receiver under full power:
/// `D1 = P1 |h11|^2 + P2 |h21|^2`, `D2 = P1 |h12|^2 + P2 |h22|^2`.
pub fn deliverable_power(ch: &ChannelSet, budget: &PowerBudget) -> (f64, f64) {
    (
        budget.p1 * ch.h11.norm_sq() + budget.p2 * ch.h21.norm_sq(),
        budget.p1 * ch.h12.norm_sq() + budget.p2 * ch.h22.norm_sq(),
    )
}

/// Interval of slot fractions under which both slots are individually
/// feasible: `alpha_min = E2 / D2`, `alpha_max = 1 - E1 / D1`.
pub fn alpha_bounds(
    ch: &ChannelSet,
    budget: &PowerBudget,
    tgt: &EnergyTarget,
) -> Result<(f64, f64)> {
    if !feasible_tdma_b(ch, budget, tgt) {
        return Err(Error::TimeShareInfeasible);
    }
    let (e1, e2) = tgt.effective();
    let (d1, d2) = deliverable_power(ch, budget);
    let lo = e2 / d2;
    let hi = 1.0 - e1 / d1;
    if lo > hi {
        // Inside the feasibility slack; collapse to the single admissible point.
        let mid = 0.5 * (lo + hi);
        return Ok((mid, mid));
    }
    Ok((lo, hi))
}

/// Closed-form beams for a receiver-1-ID slot: maximum-ratio transmission on
/// the decoding link and the interference-free complement direction on the
/// harvesting-side transmitter. Returns `(v1, v2, delivered_power_at_rx2)`;
/// the second beam handles the parallel-channel degeneracy by dropping its
/// energy contribution.
fn closed_form_beams(ch: &ChannelSet) -> (CVector, CVector, f64) {
    let v1 = ch.h11.normalized().expect("direct channel is nonzero");
    let v2 = interference_free_direction(ch);
    let delivered = ch.h12.inner(&v1).norm_sqr(); // per unit P1
    (v1, v2, delivered)
}

/// Direction for transmitter 2 that is orthogonal to its cross link `h21`
/// while maximizing delivery to `h22`; falls back to any unit vector of the
/// complement when `h22` is parallel to `h21`.
fn interference_free_direction(ch: &ChannelSet) -> CVector {
    let pc = complement_projector(&[ch.h21.clone()]).expect("cross channel is nonzero");
    if let Some(dir) = pc.mul_vec(&ch.h22).normalized() {
        return dir;
    }
    for k in 0..ch.nt {
        if let Some(dir) = pc.mul_vec(&CVector::standard_basis(ch.nt, k)).normalized() {
            return dir;
        }
    }
    // nt = 1 leaves no orthogonal direction; transmit nothing meaningful.
    CVector::standard_basis(ch.nt, 0)
}

/// Whether the closed form meets the slot's energy requirement:
/// `P1 |h12^H v1|^2 + P2 |h22^H v2|^2 >= target` with `v1` the
/// maximum-ratio beam and `v2` the interference-free complement beam.
/// The mirrored test applies for a receiver-2-ID slot.
pub fn closed_form_condition(sp: &SlotProblem, ch: &ChannelSet, budget: &PowerBudget) -> bool {
    match sp.id_receiver {
        Receiver::One => {
            let (v1, v2, _) = closed_form_beams(ch);
            let lhs = budget.p1 * ch.h12.inner(&v1).norm_sqr()
                + budget.p2 * ch.h22.inner(&v2).norm_sqr();
            lhs >= sp.energy_target_effective - ENERGY_SLACK
        }
        Receiver::Two => {
            let mirrored = SlotProblem { id_receiver: Receiver::One, ..*sp };
            closed_form_condition(&mirrored, &ch.swapped(), &swap_budget(budget))
        }
    }
}

fn swap_budget(budget: &PowerBudget) -> PowerBudget {
    PowerBudget { p1: budget.p2, p2: budget.p1 }
}

/// One slot's transmit strategy and the decoding receiver's rate.
#[derive(Debug, Clone)]
pub struct SlotSolution {
    pub cov: CovariancePair,
    pub beams: (Beamformer, Beamformer),
    pub rate: f64,
    pub used_closed_form: bool,
}

/// Solves one slot problem: the closed form when its condition holds, the
/// constrained rank-one search otherwise. Targets beyond the deliverable
/// maximum are an [`Error::InfeasibleSlot`].
pub fn solve_slot(
    sp: &SlotProblem,
    ch: &ChannelSet,
    budget: &PowerBudget,
    control: &SearchControl,
) -> Result<SlotSolution> {
    match sp.id_receiver {
        Receiver::One => solve_slot_rx1(sp, ch, budget, control),
        Receiver::Two => {
            let mirrored = SlotProblem { id_receiver: Receiver::One, ..*sp };
            let sol = solve_slot_rx1(&mirrored, &ch.swapped(), &swap_budget(budget), control)?;
            Ok(SlotSolution {
                cov: CovariancePair { s1: sol.cov.s2.clone(), s2: sol.cov.s1.clone() },
                beams: (sol.beams.1.clone(), sol.beams.0.clone()),
                rate: sol.rate,
                used_closed_form: sol.used_closed_form,
            })
        }
    }
}

fn solve_slot_rx1(
    sp: &SlotProblem,
    ch: &ChannelSet,
    budget: &PowerBudget,
    control: &SearchControl,
) -> Result<SlotSolution> {
    let target = sp.energy_target_effective;
    let (_, d2) = deliverable_power(ch, budget);
    if target > d2 + ENERGY_SLACK {
        return Err(Error::InfeasibleSlot { required: target, attainable: d2 });
    }

    if closed_form_condition(sp, ch, budget) {
        let (v1, v2, _) = closed_form_beams(ch);
        let b1 = Beamformer::new(v1, budget.p1);
        let b2 = Beamformer::new(v2, budget.p2);
        let cov = CovariancePair {
            s1: beamformer_to_covariance(&b1),
            s2: beamformer_to_covariance(&b2),
        };
        let rate = rate_1(&cov, ch)?;
        return Ok(SlotSolution { cov, beams: (b1, b2), rate, used_closed_form: true });
    }

    // Constrained search; parallel channels fall back to sweeping the power
    // level, since with a one-dimensional span the interference/energy
    // trade-off runs through the transmit power.
    let tx1 = TxFamily::new(ch, budget, 1, true);
    let tx2 = TxFamily::new(ch, budget, 2, true);
    let floor = EnergyFloor { rx1: None, rx2: Some(target) };

    // The maximum-energy pair delivers d2, the only guaranteed-feasible
    // strategy when the target sits on the slot's boundary.
    let seeds = vec![(
        tx1.params_of_unit(&ch.h12.normalized().expect("cross channel is nonzero")),
        tx2.params_of_unit(&ch.h22.normalized().expect("direct channel is nonzero")),
    )];

    let outcome = PairSearch {
        tx1: &tx1,
        tx2: &tx2,
        objective: PairObjective::RateRx1 { noise1: ch.sigma1_sq },
        floor,
        control,
        seeds,
    }
    .run()
    .ok_or(Error::InfeasibleSlot { required: target, attainable: d2 })?;

    let (b1, b2) = outcome.beams(&tx1, &tx2);
    let cov = outcome.covariances(&tx1, &tx2);
    let rate = rate_1(&cov, ch)?;
    Ok(SlotSolution { cov, beams: (b1, b2), rate, used_closed_form: false })
}

/// Charnes-Cooper image of a covariance pair for the receiver-1-ID slot:
/// `y = 1 / (h21^H S2 h21 + sigma1^2)`, `X_i = y S_i`. The normalization
/// `h21^H X2 h21 + y sigma1^2 = 1` holds by construction.
#[derive(Debug, Clone)]
pub struct CharnesCooperForm {
    pub x1: HermitianMatrix,
    pub x2: HermitianMatrix,
    pub y: f64,
}

pub fn charnes_cooper_transform(cov: &CovariancePair, ch: &ChannelSet) -> Result<CharnesCooperForm> {
    let denom = quadratic_form(&ch.h21, &cov.s2)? + ch.sigma1_sq;
    let y = 1.0 / denom;
    Ok(CharnesCooperForm { x1: cov.s1.scale(y), x2: cov.s2.scale(y), y })
}

impl CharnesCooperForm {
    /// Inverse map `S_i = X_i / y`.
    pub fn inverse(&self) -> CovariancePair {
        let inv = 1.0 / self.y;
        CovariancePair { s1: self.x1.scale(inv), s2: self.x2.scale(inv) }
    }

    /// Residual of the normalization constraint `h21^H X2 h21 + y sigma1^2 = 1`.
    pub fn normalization_residual(&self, ch: &ChannelSet) -> f64 {
        let q = quadratic_form(&ch.h21, &self.x2).expect("dims match");
        (q + self.y * ch.sigma1_sq - 1.0).abs()
    }

    /// Objective of the transformed program, `alpha * log2(1 + h11^H X1 h11)`;
    /// equals the slot objective `alpha * r1` at the pre-image.
    pub fn objective_value(&self, ch: &ChannelSet, alpha: f64) -> f64 {
        let q = quadratic_form(&ch.h11, &self.x1).expect("dims match");
        alpha * (1.0 + q).log2()
    }

    /// All transformed-program constraints for the receiver-1-ID slot with
    /// effective target `target`: normalization, scaled energy floor, scaled
    /// power budgets, positive semidefiniteness, positive `y`.
    pub fn constraints_satisfied(
        &self,
        ch: &ChannelSet,
        budget: &PowerBudget,
        target: f64,
    ) -> bool {
        if self.y <= 0.0 {
            return false;
        }
        let scale = self.y.max(1.0);
        if self.normalization_residual(ch) > 1e-9 * scale {
            return false;
        }
        let energy = quadratic_form(&ch.h12, &self.x1).expect("dims match")
            + quadratic_form(&ch.h22, &self.x2).expect("dims match");
        if energy < self.y * target - ENERGY_SLACK * scale {
            return false;
        }
        if self.x1.trace() > self.y * budget.p1 + ENERGY_SLACK * scale
            || self.x2.trace() > self.y * budget.p2 + ENERGY_SLACK * scale
        {
            return false;
        }
        self.x1.eigenvalues()[0] >= -1e-10 * scale && self.x2.eigenvalues()[0] >= -1e-10 * scale
    }
}

/// Feasibility of a covariance pair for the receiver-1-ID slot problem with
/// effective target `target` (energy floor, power budgets, PSD).
pub fn slot1_constraints_satisfied(
    cov: &CovariancePair,
    ch: &ChannelSet,
    budget: &PowerBudget,
    target: f64,
) -> bool {
    let energy = quadratic_form(&ch.h12, &cov.s1).expect("dims match")
        + quadratic_form(&ch.h22, &cov.s2).expect("dims match");
    if energy < target - ENERGY_SLACK {
        return false;
    }
    if cov.s1.trace() > budget.p1 + ENERGY_SLACK || cov.s2.trace() > budget.p2 + ENERGY_SLACK {
        return false;
    }
    cov.s1.eigenvalues()[0] >= -1e-10 && cov.s2.eigenvalues()[0] >= -1e-10
}

/// Composite scheme-B solution.
#[derive(Debug, Clone)]
pub struct SchemeBSolution {
    pub alpha: f64,
    pub slot1: SlotSolution,
    pub slot2: SlotSolution,
    /// `alpha * r1 + (1 - alpha) * r2`; negative infinity when infeasible.
    pub overall_sum_rate: f64,
    pub feasible: bool,
    pub used_closed_form: (bool, bool),
}

/// Searches the slot fraction over its admissible interval: a grid of
/// `alpha_steps` points, each solving both slots, followed by a
/// golden-section refinement inside the winning cell.
pub fn solve_tdma_b(
    ch: &ChannelSet,
    budget: &PowerBudget,
    tgt: &EnergyTarget,
    alpha_steps: usize,
    control: &SearchControl,
) -> Result<SchemeBSolution> {
    if !feasible_tdma_b(ch, budget, tgt) {
        let empty = SlotSolution {
            cov: CovariancePair::zeros(ch.nt),
            beams: (
                Beamformer::new(CVector::standard_basis(ch.nt, 0), 0.0),
                Beamformer::new(CVector::standard_basis(ch.nt, 0), 0.0),
            ),
            rate: 0.0,
            used_closed_form: false,
        };
        return Ok(SchemeBSolution {
            alpha: 0.0,
            slot1: empty.clone(),
            slot2: empty,
            overall_sum_rate: f64::NEG_INFINITY,
            feasible: false,
            used_closed_form: (false, false),
        });
    }

    let (e1, e2) = tgt.effective();
    let (d1, d2) = deliverable_power(ch, budget);
    // Targets on the admissible alpha interval are attainable by
    // construction; the clamp only strips the cancellation noise of
    // `1 - alpha` near the interval ends.
    let solve_both = |alpha: f64| -> Result<(SlotSolution, SlotSolution, f64)> {
        let t1 = if e2 > 0.0 { (e2 / alpha).min(d2) } else { 0.0 };
        let t2 = if e1 > 0.0 { (e1 / (1.0 - alpha)).min(d1) } else { 0.0 };
        let s1 = solve_slot(
            &SlotProblem {
                id_receiver: Receiver::One,
                alpha_weight: alpha,
                energy_target_effective: t1,
            },
            ch,
            budget,
            control,
        )?;
        let s2 = solve_slot(
            &SlotProblem {
                id_receiver: Receiver::Two,
                alpha_weight: alpha,
                energy_target_effective: t2,
            },
            ch,
            budget,
            control,
        )?;
        let objective = alpha * s1.rate + (1.0 - alpha) * s2.rate;
        Ok((s1, s2, objective))
    };

    // No coupling at all: the better single-user endpoint wins.
    if e1 <= 0.0 && e2 <= 0.0 {
        let (s1_full, s2_full, _) = solve_both(0.5)?;
        let (alpha, overall) = if s1_full.rate >= s2_full.rate {
            (1.0, s1_full.rate)
        } else {
            (0.0, s2_full.rate)
        };
        let used = (s1_full.used_closed_form, s2_full.used_closed_form);
        return Ok(SchemeBSolution {
            alpha,
            slot1: s1_full,
            slot2: s2_full,
            overall_sum_rate: overall,
            feasible: true,
            used_closed_form: used,
        });
    }

    let (lo, hi) = alpha_bounds(ch, budget, tgt)?;
    let steps = alpha_steps.max(2);

    // Endpoint-degenerate interval: single admissible fraction.
    if hi - lo < 1e-12 {
        let alpha = 0.5 * (lo + hi);
        let (s1, s2, objective) = solve_both(alpha)?;
        let used = (s1.used_closed_form, s2.used_closed_form);
        return Ok(SchemeBSolution {
            alpha,
            slot1: s1,
            slot2: s2,
            overall_sum_rate: objective,
            feasible: true,
            used_closed_form: used,
        });
    }

    // Keep the grid strictly inside (0, 1): a zero-length slot carries no
    // rate, and the endpoints are admissible only when a target is zero.
    let glo = lo.max(f64::MIN_POSITIVE);
    let ghi = hi.min(1.0 - 1e-15);
    let mut best: Option<(f64, f64)> = None; // (objective, alpha)
    for k in 0..steps {
        let alpha = glo + (ghi - glo) * k as f64 / (steps - 1) as f64;
        let (_, _, objective) = solve_both(alpha)?;
        if best.map_or(true, |(bo, _)| objective > bo) {
            best = Some((objective, alpha));
        }
    }
    let (_, alpha_grid) = best.expect("grid is nonempty");

    // Golden refinement inside the winning cell.
    let cell = (ghi - glo) / (steps - 1) as f64;
    let ref_lo = (alpha_grid - cell).max(glo);
    let ref_hi = (alpha_grid + cell).min(ghi);
    let eval = |alpha: f64| -> f64 {
        solve_both(alpha.clamp(glo, ghi))
            .map(|(_, _, o)| o)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (alpha_star, _) = golden_max(&eval, ref_lo, ref_hi, 40);
    let alpha_star = alpha_star.clamp(glo, ghi);

    let (s1, s2, objective) = solve_both(alpha_star)?;
    let used = (s1.used_closed_form, s2.used_closed_form);
    Ok(SchemeBSolution {
        alpha: alpha_star,
        slot1: s1,
        slot2: s2,
        overall_sum_rate: objective,
        feasible: true,
        used_closed_form: used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::rate_2;
    use crate::oracle::{reference_realization, ReferenceChannel};
    use num_complex::Complex64;

    fn realization_one() -> (ChannelSet, PowerBudget) {
        reference_realization(ReferenceChannel::One)
    }

    #[test]
    fn feasibility_closed_form_on_reference_norms() {
        let (ch, budget) = realization_one();
        let (d1, d2) = deliverable_power(&ch, &budget);
        assert!((d1 - 0.7562).abs() < 1e-4);
        assert!((d2 - 1.4564).abs() < 1e-4);
        assert!(feasible_tdma_b(&ch, &budget, &EnergyTarget::new(0.0, 0.0)));
        // E1/D1 + E2/D2 = 1 boundary.
        assert!(feasible_tdma_b(&ch, &budget, &EnergyTarget::new(d1, 0.0)));
        assert!(!feasible_tdma_b(&ch, &budget, &EnergyTarget::new(d1 + 0.01, 0.0)));
        assert!(feasible_tdma_b(&ch, &budget, &EnergyTarget::new(0.4 * d1, 0.6 * d2 - 1e-9)));
        assert!(!feasible_tdma_b(&ch, &budget, &EnergyTarget::new(0.4 * d1, 0.6 * d2 + 1e-6)));
    }

    #[test]
    fn alpha_bounds_reference_values() {
        let (ch, budget) = realization_one();
        let (lo, hi) = alpha_bounds(&ch, &budget, &EnergyTarget::new(0.37, 0.72)).unwrap();
        assert!((lo - 0.4944).abs() < 2e-4, "lo = {lo}");
        assert!((hi - 0.5107).abs() < 2e-4, "hi = {hi}");
        let (lo0, hi0) = alpha_bounds(&ch, &budget, &EnergyTarget::new(0.0, 0.0)).unwrap();
        assert_eq!((lo0, hi0), (0.0, 1.0));
        assert!(matches!(
            alpha_bounds(&ch, &budget, &EnergyTarget::new(10.0, 10.0)),
            Err(Error::TimeShareInfeasible)
        ));
    }

    #[test]
    fn alpha_bounds_collapse_at_feasibility_equality() {
        let (ch, budget) = realization_one();
        let (d1, d2) = deliverable_power(&ch, &budget);
        let tgt = EnergyTarget::new(0.3 * d1, 0.7 * d2);
        let (lo, hi) = alpha_bounds(&ch, &budget, &tgt).unwrap();
        assert!((lo - hi).abs() < 1e-12, "lo {lo}, hi {hi}");
    }

    #[test]
    fn closed_form_condition_zero_target_always_holds() {
        let (ch, budget) = realization_one();
        for rx in [Receiver::One, Receiver::Two] {
            let sp = SlotProblem {
                id_receiver: rx,
                alpha_weight: 0.5,
                energy_target_effective: 0.0,
            };
            assert!(closed_form_condition(&sp, &ch, &budget));
        }
    }

    #[test]
    fn closed_form_condition_orthogonal_parallel_construction_fails_for_positive_target() {
        // h12 orthogonal to h11 and h22 parallel to h21: the left side is
        // exactly zero, so any positive requirement fails.
        let e1 = CVector::standard_basis(2, 0);
        let e2 = CVector::standard_basis(2, 1);
        let ch = ChannelSet::new(
            e1.scale(Complex64::new(0.9, 0.0)),          // h11
            e2.scale(Complex64::new(0.7, 0.0)),          // h12 ⊥ h11
            e2.scale(Complex64::new(0.6, 0.0)),          // h21
            e2.scale(Complex64::new(-0.4, 0.3)),         // h22 ∥ h21
            0.1,
            0.1,
        )
        .unwrap();
        let budget = PowerBudget::new(1.0, 1.0).unwrap();
        let sp = SlotProblem {
            id_receiver: Receiver::One,
            alpha_weight: 0.5,
            energy_target_effective: 1e-6,
        };
        assert!(!closed_form_condition(&sp, &ch, &budget));
        let sp0 = SlotProblem { energy_target_effective: 0.0, ..sp };
        assert!(closed_form_condition(&sp0, &ch, &budget));
    }

    #[test]
    fn closed_form_condition_numeric_cross_check_at_half() {
        let (ch, budget) = realization_one();
        // Direct inner-product arithmetic for the left side.
        let v1 = ch.h11.normalized().unwrap();
        let pc = complement_projector(&[ch.h21.clone()]).unwrap();
        let v2 = pc.mul_vec(&ch.h22).normalized().unwrap();
        let lhs = ch.h12.inner(&v1).norm_sqr() + ch.h22.inner(&v2).norm_sqr();
        let sp_hold = SlotProblem {
            id_receiver: Receiver::One,
            alpha_weight: 0.5,
            energy_target_effective: lhs - 1e-6,
        };
        let sp_fail = SlotProblem {
            id_receiver: Receiver::One,
            alpha_weight: 0.5,
            energy_target_effective: lhs + 1e-6,
        };
        assert!(closed_form_condition(&sp_hold, &ch, &budget));
        assert!(!closed_form_condition(&sp_fail, &ch, &budget));
    }

    #[test]
    fn slot_zero_target_closed_form_is_interference_free_mrt() {
        let (ch, budget) = realization_one();
        let sp = SlotProblem {
            id_receiver: Receiver::One,
            alpha_weight: 0.5,
            energy_target_effective: 0.0,
        };
        let sol = solve_slot(&sp, &ch, &budget, &SearchControl::with_grid(8)).unwrap();
        assert!(sol.used_closed_form);
        let expect = (1.0 + budget.p1 * ch.h11.norm_sq() / ch.sigma1_sq).log2();
        assert!((sol.rate - expect).abs() < 1e-10, "{} vs {expect}", sol.rate);
        // No interference leaks into the decoding receiver.
        let interference = quadratic_form(&ch.h21, &sol.cov.s2).unwrap();
        assert!(interference < 1e-12);
    }

    #[test]
    fn closed_form_and_search_agree_when_condition_holds() {
        let (ch, budget) = realization_one();
        let sp = SlotProblem {
            id_receiver: Receiver::One,
            alpha_weight: 0.6,
            energy_target_effective: 0.05,
        };
        assert!(closed_form_condition(&sp, &ch, &budget));
        let closed = solve_slot(&sp, &ch, &budget, &SearchControl::with_grid(16)).unwrap();
        assert!(closed.used_closed_form);

        // Force the parameterized search on the same instance.
        let tx1 = TxFamily::new(&ch, &budget, 1, true);
        let tx2 = TxFamily::new(&ch, &budget, 2, true);
        let searched = PairSearch {
            tx1: &tx1,
            tx2: &tx2,
            objective: PairObjective::RateRx1 { noise1: ch.sigma1_sq },
            floor: EnergyFloor { rx1: None, rx2: Some(sp.energy_target_effective) },
            control: &SearchControl::with_grid(16),
            seeds: vec![],
        }
        .run()
        .unwrap();
        assert!(
            (closed.rate - searched.value).abs() < 1e-4,
            "closed {} vs searched {}",
            closed.rate,
            searched.value
        );
        // The closed form can only be better.
        assert!(closed.rate >= searched.value - 1e-6);
    }

    #[test]
    fn constrained_slot_meets_energy_floor() {
        let (ch, budget) = realization_one();
        let (_, d2) = deliverable_power(&ch, &budget);
        let target = 0.9 * d2; // hard enough that the closed form fails
        let sp = SlotProblem {
            id_receiver: Receiver::One,
            alpha_weight: 0.5,
            energy_target_effective: target,
        };
        assert!(!closed_form_condition(&sp, &ch, &budget));
        let sol = solve_slot(&sp, &ch, &budget, &SearchControl::with_grid(16)).unwrap();
        assert!(!sol.used_closed_form);
        let delivered = quadratic_form(&ch.h12, &sol.cov.s1).unwrap()
            + quadratic_form(&ch.h22, &sol.cov.s2).unwrap();
        assert!(delivered >= target - 1e-6);
        // Infeasible beyond the deliverable maximum.
        let sp_bad = SlotProblem { energy_target_effective: d2 + 0.01, ..sp };
        assert!(matches!(
            solve_slot(&sp_bad, &ch, &budget, &SearchControl::with_grid(8)),
            Err(Error::InfeasibleSlot { .. })
        ));
    }

    #[test]
    fn mirrored_slot_matches_swapped_instance() {
        let (ch, budget) = realization_one();
        let sp = SlotProblem {
            id_receiver: Receiver::Two,
            alpha_weight: 0.5,
            energy_target_effective: 0.2,
        };
        let sol = solve_slot(&sp, &ch, &budget, &SearchControl::with_grid(12)).unwrap();
        // The rate it reports is receiver 2's rate on the original instance.
        let r2 = rate_2(&sol.cov, &ch).unwrap();
        assert!((sol.rate - r2).abs() < 1e-9);
        // Energy lands at receiver 1.
        let delivered = quadratic_form(&ch.h11, &sol.cov.s1).unwrap()
            + quadratic_form(&ch.h21, &sol.cov.s2).unwrap();
        assert!(delivered >= 0.2 - 1e-6);
    }

    #[test]
    fn degenerate_interferer_falls_back_to_power_sweep() {
        // h22 parallel to h21: transmitter 2's span is one-dimensional and
        // only its power level trades interference against delivered energy.
        let h21 = CVector::from_pairs(&[(-0.42, -0.31), (-0.40, -0.05)]);
        let h22 = h21.scale(Complex64::new(0.7, -0.6));
        let ch = ChannelSet::new(
            CVector::from_pairs(&[(0.0608, -0.1896), (-0.4942, -0.1212)]),
            CVector::from_pairs(&[(0.7306, -0.6496), (-0.0369, -0.1672)]),
            h21,
            h22,
            0.1,
            0.1,
        )
        .unwrap();
        let budget = PowerBudget::new(1.0, 1.0).unwrap();
        // Closed form drops the transmitter-2 energy term; pick a target it
        // cannot cover so the search (with power sweep) runs.
        let v1 = ch.h11.normalized().unwrap();
        let closed_form_energy = ch.h12.inner(&v1).norm_sqr();
        let (_, d2) = deliverable_power(&ch, &budget);
        let target = 0.5 * (closed_form_energy + d2);
        let sp = SlotProblem {
            id_receiver: Receiver::One,
            alpha_weight: 0.5,
            energy_target_effective: target,
        };
        assert!(!closed_form_condition(&sp, &ch, &budget));
        let sol = solve_slot(&sp, &ch, &budget, &SearchControl::with_grid(12)).unwrap();
        assert!(!sol.used_closed_form);
        let delivered = quadratic_form(&ch.h12, &sol.cov.s1).unwrap()
            + quadratic_form(&ch.h22, &sol.cov.s2).unwrap();
        assert!(delivered >= target - 1e-6);
        assert!(sol.rate.is_finite() && sol.rate > 0.0);
        // Transmitter 2 may shed power in the degenerate case.
        assert!(sol.cov.s2.trace() <= budget.p2 + 1e-9);
    }

    #[test]
    fn charnes_cooper_normalization_and_round_trip() {
        let (ch, budget) = realization_one();
        let d1 = ch.h11.normalized().unwrap();
        let d2 = ch.h22.normalized().unwrap();
        let cov = CovariancePair {
            s1: HermitianMatrix::scaled_outer(0.8 * budget.p1, &d1),
            s2: HermitianMatrix::scaled_outer(0.9 * budget.p2, &d2),
        };
        let cc = charnes_cooper_transform(&cov, &ch).unwrap();
        assert!(cc.y > 0.0);
        assert!(cc.normalization_residual(&ch) < 1e-12);
        let back = cc.inverse();
        assert!(back.s1.sub(&cov.s1).frobenius_norm() < 1e-12);
        assert!(back.s2.sub(&cov.s2).frobenius_norm() < 1e-12);
    }

    #[test]
    fn charnes_cooper_zero_interferer() {
        let (ch, _) = realization_one();
        let cov = CovariancePair {
            s1: HermitianMatrix::identity(2).scale(0.3),
            s2: HermitianMatrix::zeros(2),
        };
        let cc = charnes_cooper_transform(&cov, &ch).unwrap();
        assert!((cc.y - 1.0 / ch.sigma1_sq).abs() < 1e-12);
        assert!(cc.x1.sub(&cov.s1.scale(1.0 / ch.sigma1_sq)).frobenius_norm() < 1e-12);
    }

    #[test]
    fn charnes_cooper_preserves_objective_and_feasibility() {
        let (ch, budget) = realization_one();
        let alpha = 0.55;
        let target = 0.4;
        // A feasible slot-1 point.
        let sol = solve_slot(
            &SlotProblem {
                id_receiver: Receiver::One,
                alpha_weight: alpha,
                energy_target_effective: target,
            },
            &ch,
            &budget,
            &SearchControl::with_grid(12),
        )
        .unwrap();
        assert!(slot1_constraints_satisfied(&sol.cov, &ch, &budget, target));
        let cc = charnes_cooper_transform(&sol.cov, &ch).unwrap();
        assert!(cc.constraints_satisfied(&ch, &budget, target));
        let direct = alpha * sol.rate;
        assert!((cc.objective_value(&ch, alpha) - direct).abs() < 1e-12);
    }

    #[test]
    fn scheme_b_zero_targets_pick_better_single_user_endpoint() {
        let (ch, budget) = realization_one();
        let sol = solve_tdma_b(
            &ch,
            &budget,
            &EnergyTarget::new(0.0, 0.0),
            11,
            &SearchControl::with_grid(8),
        )
        .unwrap();
        assert!(sol.feasible);
        let r1_max = (1.0 + budget.p1 * ch.h11.norm_sq() / ch.sigma1_sq).log2();
        let r2_max = (1.0 + budget.p2 * ch.h22.norm_sq() / ch.sigma2_sq).log2();
        assert!((sol.overall_sum_rate - r1_max.max(r2_max)).abs() < 1e-9);
        assert_eq!(sol.alpha, if r1_max >= r2_max { 1.0 } else { 0.0 });
    }

    #[test]
    fn scheme_b_objective_matches_denser_alpha_scan() {
        let (ch, budget) = realization_one();
        let tgt = EnergyTarget::new(0.2, 0.5);
        // Slot-solve resolution sets the noise floor of the alpha objective;
        // 16 points per angle keeps it below the comparison tolerance.
        let control = SearchControl::with_grid(16);
        let sol = solve_tdma_b(&ch, &budget, &tgt, 21, &control).unwrap();
        assert!(sol.feasible);
        let denser = solve_tdma_b(&ch, &budget, &tgt, 201, &control).unwrap();
        assert!(
            (sol.overall_sum_rate - denser.overall_sum_rate).abs() < 1e-4,
            "{} vs {}",
            sol.overall_sum_rate,
            denser.overall_sum_rate
        );
    }

    #[test]
    fn scheme_b_invariants_on_feasible_solution() {
        let (ch, budget) = realization_one();
        let tgt = EnergyTarget::new(0.25, 0.45);
        let sol = solve_tdma_b(&ch, &budget, &tgt, 21, &SearchControl::with_grid(10)).unwrap();
        assert!(sol.feasible);
        // Objective decomposition.
        let direct = sol.alpha * sol.slot1.rate + (1.0 - sol.alpha) * sol.slot2.rate;
        assert!((sol.overall_sum_rate - direct).abs() < 1e-9);
        // Per-slot energies with the effective targets.
        let e2_delivered = quadratic_form(&ch.h12, &sol.slot1.cov.s1).unwrap()
            + quadratic_form(&ch.h22, &sol.slot1.cov.s2).unwrap();
        assert!(e2_delivered >= tgt.e2 / sol.alpha - 1e-6);
        let e1_delivered = quadratic_form(&ch.h11, &sol.slot2.cov.s1).unwrap()
            + quadratic_form(&ch.h21, &sol.slot2.cov.s2).unwrap();
        assert!(e1_delivered >= tgt.e1 / (1.0 - sol.alpha) - 1e-6);
    }

    #[test]
    fn scheme_b_infeasible_is_flagged() {
        let (ch, budget) = realization_one();
        let sol = solve_tdma_b(
            &ch,
            &budget,
            &EnergyTarget::new(5.0, 5.0),
            11,
            &SearchControl::with_grid(8),
        )
        .unwrap();
        assert!(!sol.feasible);
        assert!(sol.overall_sum_rate.is_infinite() && sol.overall_sum_rate < 0.0);
    }
}

#[cfg(test)]
mod probe {
    use super::*;
    use crate::oracle::{reference_realization, ReferenceChannel};
    #[test]
    fn probe_slot_rates() {
        let (ch, budget) = reference_realization(ReferenceChannel::One);
        let (_, d2) = deliverable_power(&ch, &budget);
        for frac in [0.9, 0.5] {
            let sp = SlotProblem {
                id_receiver: Receiver::One,
                alpha_weight: 0.5,
                energy_target_effective: frac * d2,
            };
            let sol = solve_slot(&sp, &ch, &budget, &SearchControl::with_grid(24)).unwrap();
            println!("frac {frac}: rate {} closed_form {}", sol.rate, sol.used_closed_form);
        }
    }
}
