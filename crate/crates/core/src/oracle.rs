//! Independent brute-force validators and seeded instance generators.
//!
//! [`brute_force_best`] enumerates the full-power rank-one family on both
//! transmitters' channel spans by explicitly materializing every candidate
//! covariance matrix and evaluating the objective through the model's
//! quadratic forms. It shares nothing with the scheme solvers' fast path
//! (inner-product tables, refinement passes, coordinate descent), so it can
//! certify them. Its trust boundary is the rank-one parameterization itself,
//! which the structure verifier covers separately.
//!
//! [`random_instance`] draws reproducible complex-Gaussian channels and
//! energy targets inside the time-sharing feasibility region, scaled by a
//! configurable feasibility factor.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exec;
use crate::linalg::{orthonormal_span_basis, quadratic_form, CVector, HermitianMatrix};
use crate::model::{ChannelSet, CovariancePair, EnergyTarget, PowerBudget, ENERGY_SLACK};
use crate::search::{full_phi_lattice, full_theta_lattice};

/// Validator resolution and reproducibility knobs.
#[derive(Debug, Clone)]
pub struct OracleConfig {
    /// Grid points per angle coordinate; at least 8.
    pub grid_points_per_angle: usize,
    /// Seed recorded with (and driving) any randomized use of the oracle.
    pub seed: u64,
    /// Number of instances drawn by randomized validation campaigns.
    pub instance_count: usize,
    /// Evaluate grid rows on the rayon pool when available.
    pub parallel: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            grid_points_per_angle: 32,
            seed: 0x5eed_cafe,
            instance_count: 100,
            parallel: cfg!(feature = "parallel"),
        }
    }
}

impl OracleConfig {
    pub fn with_grid(grid_points_per_angle: usize) -> Self {
        Self { grid_points_per_angle, ..Self::default() }
    }

    /// Same configuration at `factor` times the grid density. Lattices nest,
    /// so the densified oracle can only report an equal or larger objective.
    pub fn denser(&self, factor: usize) -> Self {
        Self {
            grid_points_per_angle: self.grid_points_per_angle * factor,
            ..self.clone()
        }
    }
}

/// Objective maximized by [`brute_force_best`].
#[derive(Debug, Clone, Copy)]
pub enum OracleObjective {
    /// `r1 + r2` in bits.
    SumRate,
    /// Rate of receiver 1 in bits.
    Rate1,
    /// Rate of receiver 2 in bits.
    Rate2,
    /// `min(received power at rx1 / e1, received power at rx2 / e2)`.
    MinScaledEnergy { e1: f64, e2: f64 },
}

/// Minimum received-power constraints at the two receivers (absent entries
/// are unconstrained); the per-transmitter power budgets are built into the
/// full-power family.
#[derive(Debug, Clone, Copy, Default)]
pub struct OracleConstraints {
    pub min_rx1_power: Option<f64>,
    pub min_rx2_power: Option<f64>,
}

struct OracleCell {
    cov: HermitianMatrix,
    /// Quadratic forms toward (receiver 1, receiver 2).
    q: (f64, f64),
}

/// Candidate covariances for one transmitter: every full-power rank-one
/// strategy on the lattice, each materialized as an explicit matrix with its
/// two quadratic forms evaluated through the model kernel.
fn tx_cells(ch: &ChannelSet, budget: &PowerBudget, tx: usize, n: usize) -> Vec<OracleCell> {
    let (to_rx1, to_rx2) = match tx {
        1 => (&ch.h11, &ch.h12),
        2 => (&ch.h21, &ch.h22),
        _ => panic!("transmitter index must be 1 or 2"),
    };
    let basis = orthonormal_span_basis(to_rx1, to_rx2);
    let power = budget.power(tx);
    let mut cells = Vec::new();
    match basis.u2 {
        None => {
            let cov = HermitianMatrix::scaled_outer(power, &basis.u1);
            let q = (
                quadratic_form(to_rx1, &cov).expect("dims match"),
                quadratic_form(to_rx2, &cov).expect("dims match"),
            );
            cells.push(OracleCell { cov, q });
        }
        Some(u2) => {
            for &theta in &full_theta_lattice(n) {
                let (st, ct) = theta.sin_cos();
                for &phi in &full_phi_lattice(n) {
                    let dir = basis
                        .u1
                        .scale(Complex64::new(ct, 0.0))
                        .add(&u2.scale(Complex64::from_polar(st, phi)));
                    let cov = HermitianMatrix::scaled_outer(power, &dir);
                    let q = (
                        quadratic_form(to_rx1, &cov).expect("dims match"),
                        quadratic_form(to_rx2, &cov).expect("dims match"),
                    );
                    cells.push(OracleCell { cov, q });
                }
            }
        }
    }
    cells
}

/// Keeps only cells whose quadratic-form pair is not dominated by an earlier
/// or later cell. Exact for objectives and constraints that are monotone
/// nondecreasing in both forms (the scaled-energy family): a dominated cell
/// can never beat its dominator against any partner cell.
fn pareto_max_filter(cells: Vec<OracleCell>) -> Vec<OracleCell> {
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by(|&a, &b| {
        cells[b]
            .q
            .0
            .partial_cmp(&cells[a].q.0)
            .unwrap()
            .then(cells[b].q.1.partial_cmp(&cells[a].q.1).unwrap())
            .then(a.cmp(&b))
    });
    let mut keep = vec![false; cells.len()];
    let mut best_qb = f64::NEG_INFINITY;
    for &i in &order {
        if cells[i].q.1 > best_qb {
            keep[i] = true;
            best_qb = cells[i].q.1;
        }
    }
    let mut keep_iter = keep.into_iter();
    cells.into_iter().filter(|_| keep_iter.next().unwrap()).collect()
}

/// Exhaustive maximization of `objective` over the rank-one family, keeping
/// only cells that satisfy `constraints`. Returns the best covariance pair
/// and the achieved objective, or [`Error::EmptyFeasibleSet`] when no lattice
/// cell is feasible.
pub fn brute_force_best(
    ch: &ChannelSet,
    budget: &PowerBudget,
    objective: OracleObjective,
    constraints: OracleConstraints,
    cfg: &OracleConfig,
) -> Result<(CovariancePair, f64)> {
    assert!(cfg.grid_points_per_angle >= 8, "oracle grid must have at least 8 points per angle");
    let n = cfg.grid_points_per_angle;
    let mut cells1 = tx_cells(ch, budget, 1, n);
    let mut cells2 = tx_cells(ch, budget, 2, n);
    if matches!(objective, OracleObjective::MinScaledEnergy { .. }) {
        cells1 = pareto_max_filter(cells1);
        cells2 = pareto_max_filter(cells2);
    }
    let (cells1, cells2) = (cells1, cells2);
    let (noise1, noise2) = (ch.sigma1_sq, ch.sigma2_sq);

    // Keys are monotone transforms of the objective (products / SINRs instead
    // of logs); the reported value is converted once at the end.
    let key_of = move |q1: (f64, f64), q2: (f64, f64)| -> f64 {
        match objective {
            OracleObjective::SumRate => {
                let d1 = q2.0 + noise1;
                let d2 = q1.1 + noise2;
                ((d1 + q1.0) / d1) * ((d2 + q2.1) / d2)
            }
            OracleObjective::Rate1 => q1.0 / (q2.0 + noise1),
            OracleObjective::Rate2 => q2.1 / (q1.1 + noise2),
            OracleObjective::MinScaledEnergy { e1, e2 } => {
                let b1 = if e1 > 0.0 { (q1.0 + q2.0) / e1 } else { f64::INFINITY };
                let b2 = if e2 > 0.0 { (q1.1 + q2.1) / e2 } else { f64::INFINITY };
                b1.min(b2)
            }
        }
    };
    let feasible = move |q1: (f64, f64), q2: (f64, f64)| -> bool {
        constraints.min_rx1_power.map_or(true, |e| q1.0 + q2.0 >= e - ENERGY_SLACK)
            && constraints.min_rx2_power.map_or(true, |e| q1.1 + q2.1 >= e - ENERGY_SLACK)
    };

    let best = exec::argmax_rows(cells1.len(), cfg.parallel, |i| {
        let qi = cells1[i].q;
        let mut local: Option<(usize, f64)> = None;
        for (j, cell) in cells2.iter().enumerate() {
            if !feasible(qi, cell.q) {
                continue;
            }
            let key = key_of(qi, cell.q);
            if local.map_or(true, |(_, bk)| key > bk) {
                local = Some((j, key));
            }
        }
        local
    });

    let (i, j, key) = best.ok_or(Error::EmptyFeasibleSet)?;
    let value = match objective {
        OracleObjective::SumRate => key.log2(),
        OracleObjective::Rate1 | OracleObjective::Rate2 => (1.0 + key).log2(),
        OracleObjective::MinScaledEnergy { .. } => key,
    };
    let cov = CovariancePair { s1: cells1[i].cov.clone(), s2: cells2[j].cov.clone() };
    Ok((cov, value))
}

/// Noise regime of a generated instance, mirroring the two reference setups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseRegime {
    /// `sigma^2 = 0.1`.
    NoiseLimited,
    /// `sigma^2 = 0.001`.
    InterferenceLimited,
}

impl NoiseRegime {
    pub fn sigma_sq(&self) -> f64 {
        match self {
            NoiseRegime::NoiseLimited => 0.1,
            NoiseRegime::InterferenceLimited => 0.001,
        }
    }
}

/// Shape of generated instances: noise regime plus the range the
/// energy-target feasibility factor is drawn from. A factor below 1 lands
/// strictly inside the time-sharing feasibility region.
#[derive(Debug, Clone, Copy)]
pub struct ScaleProfile {
    pub noise: NoiseRegime,
    pub feasibility_factor: (f64, f64),
}

impl ScaleProfile {
    pub fn noise_limited() -> Self {
        Self { noise: NoiseRegime::NoiseLimited, feasibility_factor: (0.05, 0.95) }
    }

    pub fn interference_limited() -> Self {
        Self { noise: NoiseRegime::InterferenceLimited, feasibility_factor: (0.05, 0.95) }
    }

    pub fn with_factor_range(mut self, lo: f64, hi: f64) -> Self {
        self.feasibility_factor = (lo, hi);
        self
    }
}

/// Deterministic-from-seed instance: complex Gaussian channels, unit power
/// budgets, and energy targets `E1 = f u D1`, `E2 = f (1-u) D2` where `D_i`
/// are the per-receiver deliverable-power maxima, `u` is a uniform split and
/// `f` is drawn from the profile's feasibility range.
pub fn random_instance(
    seed: u64,
    nt: usize,
    profile: &ScaleProfile,
) -> (ChannelSet, PowerBudget, EnergyTarget) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cvec = |rng: &mut ChaCha8Rng| -> CVector {
        CVector::new(
            (0..nt)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
                })
                .collect(),
        )
    };
    let h11 = cvec(&mut rng);
    let h12 = cvec(&mut rng);
    let h21 = cvec(&mut rng);
    let h22 = cvec(&mut rng);
    let sigma = profile.noise.sigma_sq();
    let ch = ChannelSet::new(h11, h12, h21, h22, sigma, sigma).expect("generated channels are valid");
    let budget = PowerBudget::new(1.0, 1.0).unwrap();

    let d1 = budget.p1 * ch.h11.norm_sq() + budget.p2 * ch.h21.norm_sq();
    let d2 = budget.p1 * ch.h12.norm_sq() + budget.p2 * ch.h22.norm_sq();
    let split: f64 = rng.gen();
    let (flo, fhi) = profile.feasibility_factor;
    let factor = flo + (fhi - flo) * rng.gen::<f64>();
    let tgt = EnergyTarget::new(factor * split * d1, factor * (1.0 - split) * d2);
    (ch, budget, tgt)
}

/// Which bundled channel realization to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceChannel {
    /// Noise-limited setup, `sigma^2 = 0.1`.
    One,
    /// Interference-limited setup, `sigma^2 = 0.001`, with stronger
    /// cross links.
    Two,
}

/// The two fixed channel realizations every cross-check runs against; also
/// shipped as instance files for the command-line tool.
pub fn reference_realization(which: ReferenceChannel) -> (ChannelSet, PowerBudget) {
    let h11 = CVector::from_pairs(&[(0.0608, -0.1896), (-0.4942, -0.1212)]);
    let h22 = CVector::from_pairs(&[(0.5634, 0.2935), (-0.0672, -0.2515)]);
    let (h12, h21, sigma) = match which {
        ReferenceChannel::One => (
            CVector::from_pairs(&[(0.7306, -0.6496), (-0.0369, -0.1672)]),
            CVector::from_pairs(&[(-0.4320, -0.3112), (-0.4142, -0.0515)]),
            0.1,
        ),
        ReferenceChannel::Two => (
            CVector::from_pairs(&[(0.8948, -0.7956), (-0.0452, -0.2047)]),
            CVector::from_pairs(&[(-0.5291, -0.3811), (-0.5073, -0.0630)]),
            0.001,
        ),
    };
    let ch = ChannelSet::new(h11, h12, h21, h22, sigma, sigma).unwrap();
    (ch, PowerBudget::new(1.0, 1.0).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rate_from_powers, sum_rate};
    use crate::tdma_b::feasible_tdma_b;

    #[test]
    fn same_seed_same_instance() {
        let profile = ScaleProfile::noise_limited();
        let (a, _, ta) = random_instance(42, 2, &profile);
        let (b, _, tb) = random_instance(42, 2, &profile);
        assert_eq!(a.h11.entries(), b.h11.entries());
        assert_eq!(a.h22.entries(), b.h22.entries());
        assert_eq!(ta.e1, tb.e1);
        assert_eq!(ta.e2, tb.e2);
    }

    #[test]
    fn generated_targets_stay_inside_feasibility_region() {
        let profile = ScaleProfile::interference_limited().with_factor_range(0.05, 0.99);
        for seed in 0..50 {
            let (ch, budget, tgt) = random_instance(seed, 2, &profile);
            assert!(feasible_tdma_b(&ch, &budget, &tgt));
        }
    }

    #[test]
    fn profile_noise_levels() {
        assert_eq!(NoiseRegime::NoiseLimited.sigma_sq(), 0.1);
        assert_eq!(NoiseRegime::InterferenceLimited.sigma_sq(), 0.001);
        let (ch, _, _) = random_instance(7, 2, &ScaleProfile::interference_limited());
        assert_eq!(ch.sigma1_sq, 0.001);
    }

    #[test]
    fn reference_realization_norms() {
        let (ch1, _) = reference_realization(ReferenceChannel::One);
        assert!((ch1.h11.norm() - 0.5464).abs() < 5e-5);
        assert!((ch1.h12.norm() - 0.9925).abs() < 5e-5);
        assert!((ch1.h21.norm() - 0.6765).abs() < 5e-5);
        assert!((ch1.h22.norm() - 0.6865).abs() < 5e-5);
        let (ch2, _) = reference_realization(ReferenceChannel::Two);
        assert!((ch2.h12.norm() - 1.2156).abs() < 5e-5);
        assert!((ch2.h21.norm() - 0.8286).abs() < 5e-5);
    }

    #[test]
    fn decoupled_construction_reaches_mrt_sum_rate() {
        // Orthogonal cross channels: optimum is MRT for both transmitters;
        // the grid value is within quantization of the exact sum.
        let e1 = CVector::standard_basis(2, 0);
        let e2 = CVector::standard_basis(2, 1);
        let ch = ChannelSet::new(
            e1.scale(Complex64::new(0.9, 0.0)),
            e2.scale(Complex64::new(0.7, 0.0)),
            e2.scale(Complex64::new(0.6, 0.0)),
            e1.scale(Complex64::new(0.8, 0.0)),
            0.1,
            0.1,
        )
        .unwrap();
        let budget = PowerBudget::new(1.0, 1.0).unwrap();
        let cfg = OracleConfig::with_grid(128);
        let (cov, val) = brute_force_best(
            &ch,
            &budget,
            OracleObjective::SumRate,
            OracleConstraints::default(),
            &cfg,
        )
        .unwrap();
        let exact = rate_from_powers(0.81, 0.0, 0.1) + rate_from_powers(0.64, 0.0, 0.1);
        assert!(val <= exact + 1e-9);
        assert!(val >= exact - 0.01, "grid value {val} vs exact {exact}");
        // The reported value re-evaluates from the returned covariances.
        let re = sum_rate(&cov, &ch).unwrap();
        assert!((re - val).abs() < 1e-9);
    }

    #[test]
    fn densifying_the_grid_never_decreases_the_objective() {
        let (ch, budget, tgt) = random_instance(11, 2, &ScaleProfile::noise_limited());
        let (e1, e2) = tgt.effective();
        let objective = OracleObjective::MinScaledEnergy { e1, e2 };
        let mut prev = f64::NEG_INFINITY;
        for n in [8, 16, 32] {
            let (_, val) = brute_force_best(
                &ch,
                &budget,
                objective,
                OracleConstraints::default(),
                &OracleConfig::with_grid(n),
            )
            .unwrap();
            assert!(val >= prev - 1e-12, "grid {n}: {val} < {prev}");
            prev = val;
        }
    }

    #[test]
    fn infeasible_constraints_report_empty_set() {
        let (ch, budget) = reference_realization(ReferenceChannel::One);
        let too_much = ch.h11.norm_sq() + ch.h21.norm_sq() + 1.0;
        let res = brute_force_best(
            &ch,
            &budget,
            OracleObjective::SumRate,
            OracleConstraints { min_rx1_power: Some(too_much), min_rx2_power: None },
            &OracleConfig::with_grid(8),
        );
        assert!(matches!(res, Err(Error::EmptyFeasibleSet)));
    }

    #[cfg(feature = "parallel")]
    #[test]
    fn parallel_and_sequential_agree_exactly() {
        let (ch, budget, tgt) = random_instance(3, 2, &ScaleProfile::noise_limited());
        let constraints = OracleConstraints {
            min_rx1_power: Some(tgt.e1),
            min_rx2_power: Some(tgt.e2),
        };
        let mut cfg = OracleConfig::with_grid(16);
        cfg.parallel = true;
        let (_, par) =
            brute_force_best(&ch, &budget, OracleObjective::SumRate, constraints, &cfg).unwrap();
        cfg.parallel = false;
        let (_, seq) =
            brute_force_best(&ch, &budget, OracleObjective::SumRate, constraints, &cfg).unwrap();
        assert_eq!(par.to_bits(), seq.to_bits());
    }
}
