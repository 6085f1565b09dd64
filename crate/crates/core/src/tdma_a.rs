//! TDMA scheme A: both receivers harvest in slot 1 and decode in slot 2.
//!
//! Slot 1 is made as short as possible. The minimum-time problem reduces to a
//! one-dimensional max-min over a weight `w`: for each `w`, the optimal
//! harvesting beams are the principal eigenvectors of the target-weighted
//! channel outer products, and `beta(w) = min(beta1(w), beta2(w))` is the
//! largest common scaling of both energy requirements. `beta* >= 1` means the
//! requirements fit into the symbol interval and the scheme is feasible with
//! slot-1 fraction `alpha = 1/beta*`. Slot 2 carries the classical
//! unconstrained sum-rate-optimal transmission.

use crate::error::Result;
use crate::linalg::{principal_eig, CVector, HermitianMatrix};
use crate::model::{
    beamformer_to_covariance, rate_1, rate_2, Beamformer, ChannelSet, CovariancePair,
    EnergyTarget, PowerBudget,
};
use crate::search::{
    golden_max, EnergyFloor, PairObjective, PairSearch, SearchControl, TxFamily,
};

/// Feasibility margin on `beta*`: the scheme is declared feasible when
/// `beta* >= 1 - BETA_FEAS_TOL`.
pub const BETA_FEAS_TOL: f64 = 1e-9;

/// The two energy-scaling curves and their harvesting beam directions at one
/// weight `w`.
#[derive(Debug, Clone)]
pub struct BetaPoint {
    pub beta1: f64,
    pub beta2: f64,
    pub v1: CVector,
    pub v2: CVector,
}

/// Evaluates `beta1(w)`, `beta2(w)` and the harvesting directions
/// `v_i(w)` = principal eigenvector of
/// `w h_i1 h_i1^H / E1 + (1-w) h_i2 h_i2^H / E2`.
///
/// A zero target makes the corresponding curve infinite; with both targets
/// zero the designated result has both curves infinite and maximum-ratio
/// directions toward receiver 1.
pub fn beta_curves(
    w: f64,
    ch: &ChannelSet,
    budget: &PowerBudget,
    tgt: &EnergyTarget,
) -> Result<BetaPoint> {
    let (e1, e2) = tgt.effective();
    let (v1, v2) = eh_directions(w, ch, e1, e2)?;
    Ok(beta_at(&v1, &v2, ch, budget, e1, e2))
}

fn beta_at(
    v1: &CVector,
    v2: &CVector,
    ch: &ChannelSet,
    budget: &PowerBudget,
    e1: f64,
    e2: f64,
) -> BetaPoint {
    let q11 = budget.p1 * ch.h11.inner(v1).norm_sqr();
    let q12 = budget.p1 * ch.h12.inner(v1).norm_sqr();
    let q21 = budget.p2 * ch.h21.inner(v2).norm_sqr();
    let q22 = budget.p2 * ch.h22.inner(v2).norm_sqr();
    let beta1 = if e1 > 0.0 { (q11 + q21) / e1 } else { f64::INFINITY };
    let beta2 = if e2 > 0.0 { (q12 + q22) / e2 } else { f64::INFINITY };
    BetaPoint { beta1, beta2, v1: v1.clone(), v2: v2.clone() }
}

/// Harvesting directions at weight `w`. Zero targets are handled as limits:
/// the curve with a zero target drops out and the directions come from the
/// surviving term alone.
fn eh_directions(w: f64, ch: &ChannelSet, e1: f64, e2: f64) -> Result<(CVector, CVector)> {
    let mrt = |h: &CVector| h.normalized().expect("channel vectors are nonzero");
    if e1 <= 0.0 && e2 <= 0.0 {
        return Ok((mrt(&ch.h11), mrt(&ch.h21)));
    }
    if e1 <= 0.0 {
        // beta1 is infinite; only the E2 terms shape the directions unless w
        // puts all weight on the vanished side.
        return Ok(if w > 0.0 {
            (mrt(&ch.h11), mrt(&ch.h21))
        } else {
            (mrt(&ch.h12), mrt(&ch.h22))
        });
    }
    if e2 <= 0.0 {
        return Ok(if w < 1.0 {
            (mrt(&ch.h12), mrt(&ch.h22))
        } else {
            (mrt(&ch.h11), mrt(&ch.h21))
        });
    }
    let m1 = HermitianMatrix::scaled_outer(w / e1, &ch.h11)
        .add(&HermitianMatrix::scaled_outer((1.0 - w) / e2, &ch.h12));
    let m2 = HermitianMatrix::scaled_outer(w / e1, &ch.h21)
        .add(&HermitianMatrix::scaled_outer((1.0 - w) / e2, &ch.h22));
    Ok((principal_eig(&m1)?.vector, principal_eig(&m2)?.vector))
}

/// Minimum-EH-time solution: the maximizing weight, the common scaling
/// `beta*`, the slot-1 fraction, and the full-power harvesting beams.
#[derive(Debug, Clone)]
pub struct MinTimeSolution {
    pub w_star: f64,
    pub beta_star: f64,
    /// Slot-1 fraction `1/beta*`, clamped into `[0, 1]`; zero when both
    /// targets are zero (the harvesting slot is skipped).
    pub alpha: f64,
    pub eh_beams: (Beamformer, Beamformer),
    pub eh_cov: CovariancePair,
    pub feasible: bool,
}

/// Maximizes `min(beta1(w), beta2(w))` over `w in [0, 1]` by a bracketed
/// golden-section search with tolerance `tol` on `w`.
pub fn solve_min_time(
    ch: &ChannelSet,
    budget: &PowerBudget,
    tgt: &EnergyTarget,
    tol: f64,
) -> Result<MinTimeSolution> {
    let (e1, e2) = tgt.effective();

    // Zero targets snap the weight to the endpoint of the active side (both
    // zero defaults to the receiver-1 endpoint; the slot is skipped anyway).
    if e1 <= 0.0 || e2 <= 0.0 {
        let w_star = if e2 <= 0.0 { 1.0 } else { 0.0 };
        let point = beta_curves(w_star, ch, budget, tgt)?;
        return Ok(assemble(w_star, point, budget));
    }

    let eval = |w: f64| -> f64 {
        let p = beta_curves(w.clamp(0.0, 1.0), ch, budget, tgt)
            .expect("positive targets evaluate everywhere");
        p.beta1.min(p.beta2)
    };

    // Coarse bracket, then golden section inside the winning cell. The
    // max-min curve is unimodal, so the bracket is a safety net rather than a
    // requirement.
    const BRACKET: usize = 64;
    let mut best_k = 0usize;
    let mut best_v = f64::NEG_INFINITY;
    for k in 0..=BRACKET {
        let v = eval(k as f64 / BRACKET as f64);
        if v > best_v {
            best_v = v;
            best_k = k;
        }
    }
    let lo = (best_k.saturating_sub(1)) as f64 / BRACKET as f64;
    let hi = ((best_k + 1).min(BRACKET)) as f64 / BRACKET as f64;
    let width = hi - lo;
    let tol = tol.max(1e-15);
    let iters = ((width / tol).ln() / (1.0f64 / 0.618_033_988_749_894_9).ln())
        .ceil()
        .clamp(1.0, 200.0) as usize;
    let (w_star, _) = golden_max(&eval, lo, hi, iters);
    let w_star = w_star.clamp(0.0, 1.0);

    let point = beta_curves(w_star, ch, budget, tgt)?;
    Ok(assemble(w_star, point, budget))
}

fn assemble(w_star: f64, point: BetaPoint, budget: &PowerBudget) -> MinTimeSolution {
    let beta_star = point.beta1.min(point.beta2);
    let feasible = beta_star >= 1.0 - BETA_FEAS_TOL;
    let alpha = if beta_star.is_infinite() { 0.0 } else { (1.0 / beta_star).min(1.0) };
    let b1 = Beamformer::new(point.v1.clone(), budget.p1);
    let b2 = Beamformer::new(point.v2.clone(), budget.p2);
    let eh_cov = CovariancePair {
        s1: beamformer_to_covariance(&b1),
        s2: beamformer_to_covariance(&b2),
    };
    MinTimeSolution { w_star, beta_star, alpha, eh_beams: (b1, b2), eh_cov, feasible }
}

/// Slot-2 solution of the classical MISO-IFC sum-rate problem.
#[derive(Debug, Clone)]
pub struct Slot2Solution {
    pub cov: CovariancePair,
    pub beams: (Beamformer, Beamformer),
    pub r1: f64,
    pub r2: f64,
}

/// Maximizes `r1 + r2` over full-power rank-one strategies on each
/// transmitter's own two-channel span (no energy constraint).
pub fn solve_slot2_sum_rate(
    ch: &ChannelSet,
    budget: &PowerBudget,
    control: &SearchControl,
) -> Result<Slot2Solution> {
    let tx1 = TxFamily::new(ch, budget, 1, false);
    let tx2 = TxFamily::new(ch, budget, 2, false);

    // Classical candidates seed the grid: maximum-ratio beams and the
    // interference-free (zero-forcing) beams.
    let mut seeds = Vec::new();
    let mrt = (
        tx1.params_of_unit(&ch.h11.normalized().unwrap()),
        tx2.params_of_unit(&ch.h22.normalized().unwrap()),
    );
    seeds.push(mrt);
    if let (Some(z1), Some(z2)) = (zf_direction(&ch.h11, &ch.h12), zf_direction(&ch.h22, &ch.h21))
    {
        seeds.push((tx1.params_of_unit(&z1), tx2.params_of_unit(&z2)));
    }

    let outcome = PairSearch {
        tx1: &tx1,
        tx2: &tx2,
        objective: PairObjective::SumRate { noise1: ch.sigma1_sq, noise2: ch.sigma2_sq },
        floor: EnergyFloor::default(),
        control,
        seeds,
    }
    .run()
    .expect("unconstrained search always has candidates");

    let (b1, b2) = outcome.beams(&tx1, &tx2);
    let cov = outcome.covariances(&tx1, &tx2);
    let r1 = rate_1(&cov, ch)?;
    let r2 = rate_2(&cov, ch)?;
    Ok(Slot2Solution { cov, beams: (b1, b2), r1, r2 })
}

/// Direction maximizing received power at `own` subject to zero leakage into
/// `cross`; `None` when the channels are parallel.
fn zf_direction(own: &CVector, cross: &CVector) -> Option<CVector> {
    let pc = crate::linalg::complement_projector(&[cross.clone()]).ok()?;
    pc.mul_vec(own).normalized()
}

/// Composite scheme-A solution.
#[derive(Debug, Clone)]
pub struct SchemeASolution {
    pub min_time: MinTimeSolution,
    pub id_cov: CovariancePair,
    pub id_beams: (Beamformer, Beamformer),
    pub slot2_rates: (f64, f64),
    /// `(1 - alpha) * (r1 + r2)`; negative infinity when infeasible.
    pub overall_sum_rate: f64,
}

impl SchemeASolution {
    pub fn feasible(&self) -> bool {
        self.min_time.feasible
    }
}

/// Composes the minimum-time harvesting slot with the slot-2 sum-rate
/// transmission.
pub fn solve_tdma_a(
    ch: &ChannelSet,
    budget: &PowerBudget,
    tgt: &EnergyTarget,
    control: &SearchControl,
) -> Result<SchemeASolution> {
    let min_time = solve_min_time(ch, budget, tgt, 1e-9)?;
    let slot2 = solve_slot2_sum_rate(ch, budget, control)?;
    let overall = if min_time.feasible {
        (1.0 - min_time.alpha) * (slot2.r1 + slot2.r2)
    } else {
        f64::NEG_INFINITY
    };
    Ok(SchemeASolution {
        min_time,
        id_cov: slot2.cov,
        id_beams: slot2.beams,
        slot2_rates: (slot2.r1, slot2.r2),
        overall_sum_rate: overall,
    })
}
