//! Rank-one beam search shared by the scheme solvers.
//!
//! Optimal strategies for every problem in this crate are full-power rank-one
//! covariances whose directions lie in the span of the two channels each
//! transmitter sees, so a transmit strategy reduces to two angles per
//! transmitter: `v = cos(theta) u1 + sin(theta) e^{i phi} u2` over the
//! orthonormal span basis `(u1, u2)`. The search runs a coarse grid over
//! `(theta1, phi1, theta2, phi2)`, window-shrinking refinement passes, and a
//! coordinate-descent polish, with energy floors applied as hard filters.
//!
//! Grid evaluation is embarrassingly parallel over cells; reductions break
//! ties toward lexicographically smaller parameters, so results do not depend
//! on worker count.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::exec;
use crate::linalg::{orthonormal_span_basis, principal_eig, CVector, HermitianMatrix};
use crate::model::{
    beamformer_to_covariance, Beamformer, ChannelSet, CovariancePair, PowerBudget, ENERGY_SLACK,
};

/// Resolution and execution knobs for the grid searches.
#[derive(Debug, Clone)]
pub struct SearchControl {
    /// Grid points per angle coordinate in each pass.
    pub grid_points: usize,
    /// Refinement passes after the coarse pass; each shrinks the window 8x.
    pub refine_passes: usize,
    /// Stationarity tolerance (objective units) for the coordinate polish.
    pub descent_tol: f64,
    /// Evaluate grid cells on the rayon pool when the `parallel` feature is
    /// enabled; ignored (sequential) otherwise.
    pub parallel: bool,
}

impl Default for SearchControl {
    fn default() -> Self {
        Self {
            grid_points: 64,
            refine_passes: 2,
            descent_tol: 1e-7,
            parallel: cfg!(feature = "parallel"),
        }
    }
}

impl SearchControl {
    pub fn with_grid(grid_points: usize) -> Self {
        Self { grid_points, ..Self::default() }
    }

    pub fn sequential(mut self) -> Self {
        self.parallel = false;
        self
    }
}

/// How a transmitter is parameterized.
#[derive(Debug, Clone, Copy, PartialEq)]
enum TxMode {
    /// Two angles over the orthonormal span basis, full power.
    Angles,
    /// Parallel channels and the direction is forced; nothing to search.
    Fixed,
    /// Parallel channels with a power-level sweep `t in [0, 1]`.
    PowerSweep,
}

/// Search-space coordinates of one transmitter. For [`TxMode::Angles`],
/// `x = theta in [0, pi/2]`, `y = phi in [0, 2 pi)`; for
/// [`TxMode::PowerSweep`], `x = power fraction`, `y` unused.
#[derive(Debug, Clone, Copy)]
pub struct TxParams {
    pub x: f64,
    pub y: f64,
}

impl TxParams {
    const ORIGIN: TxParams = TxParams { x: 0.0, y: 0.0 };
}

/// One transmitter's rank-one family together with the inner products needed
/// to evaluate the two quadratic forms its strategy feeds.
#[derive(Debug, Clone)]
pub struct TxFamily {
    u1: CVector,
    u2: Option<CVector>,
    power: f64,
    /// (h_to_rx1^H u1, h_to_rx1^H u2)
    ca: (Complex64, Complex64),
    /// (h_to_rx2^H u1, h_to_rx2^H u2)
    cb: (Complex64, Complex64),
    mode: TxMode,
}

impl TxFamily {
    /// Family for transmitter `tx` (1 or 2) over the span of the two channels
    /// it sees. `power_sweep_when_degenerate` selects the fallback used when
    /// the two channels are parallel.
    pub fn new(
        ch: &ChannelSet,
        budget: &PowerBudget,
        tx: usize,
        power_sweep_when_degenerate: bool,
    ) -> Self {
        let (to_rx1, to_rx2) = match tx {
            1 => (&ch.h11, &ch.h12),
            2 => (&ch.h21, &ch.h22),
            _ => panic!("transmitter index must be 1 or 2"),
        };
        let basis = orthonormal_span_basis(to_rx1, to_rx2);
        let power = budget.power(tx);
        let zero = Complex64::ZERO;
        match basis.u2 {
            Some(u2) => TxFamily {
                ca: (basis.u1.inner(to_rx1).conj(), u2.inner(to_rx1).conj()),
                cb: (basis.u1.inner(to_rx2).conj(), u2.inner(to_rx2).conj()),
                u1: basis.u1,
                u2: Some(u2),
                power,
                mode: TxMode::Angles,
            },
            None => TxFamily {
                ca: (basis.u1.inner(to_rx1).conj(), zero),
                cb: (basis.u1.inner(to_rx2).conj(), zero),
                u1: basis.u1,
                u2: None,
                power,
                mode: if power_sweep_when_degenerate {
                    TxMode::PowerSweep
                } else {
                    TxMode::Fixed
                },
            },
        }
    }

    /// Quadratic forms `(h_to_rx1^H S h_to_rx1, h_to_rx2^H S h_to_rx2)` for
    /// the strategy at `p`.
    pub fn quad_forms(&self, p: TxParams) -> (f64, f64) {
        match self.mode {
            TxMode::Angles => {
                let (st, ct) = p.x.sin_cos();
                let phase = Complex64::from_polar(st, p.y);
                let qa = (self.ca.0 * ct + self.ca.1 * phase).norm_sqr();
                let qb = (self.cb.0 * ct + self.cb.1 * phase).norm_sqr();
                (self.power * qa, self.power * qb)
            }
            TxMode::Fixed => {
                (self.power * self.ca.0.norm_sqr(), self.power * self.cb.0.norm_sqr())
            }
            TxMode::PowerSweep => {
                let s = self.power * p.x;
                (s * self.ca.0.norm_sqr(), s * self.cb.0.norm_sqr())
            }
        }
    }

    /// Beamformer realizing the strategy at `p`.
    pub fn beam(&self, p: TxParams) -> Beamformer {
        match self.mode {
            TxMode::Angles => {
                let (st, ct) = p.x.sin_cos();
                let b = Complex64::from_polar(st, p.y);
                let u2 = self.u2.as_ref().expect("angle mode has a second basis vector");
                let dir = self.u1.scale(Complex64::new(ct, 0.0)).add(&u2.scale(b));
                Beamformer::new(dir, self.power).with_span_coords(Complex64::new(ct, 0.0), b)
            }
            TxMode::Fixed => Beamformer::new(self.u1.clone(), self.power)
                .with_span_coords(Complex64::ONE, Complex64::ZERO),
            TxMode::PowerSweep => Beamformer::new(self.u1.clone(), self.power * p.x)
                .with_span_coords(Complex64::ONE, Complex64::ZERO),
        }
    }

    /// Coordinates of a unit vector lying in this family's span; used to seed
    /// the search with analytically known strategies.
    pub fn params_of_unit(&self, v: &CVector) -> TxParams {
        match self.mode {
            TxMode::Angles => {
                let a = self.u1.inner(v);
                let b = self.u2.as_ref().unwrap().inner(v);
                let theta = b.norm().atan2(a.norm());
                let phi = if a.norm() < 1e-12 || b.norm() < 1e-12 {
                    0.0
                } else {
                    (b.arg() - a.arg()).rem_euclid(2.0 * PI)
                };
                TxParams { x: theta, y: phi }
            }
            TxMode::Fixed => TxParams::ORIGIN,
            TxMode::PowerSweep => TxParams { x: 1.0, y: 0.0 },
        }
    }

    /// Lattice of parameter cells for a pass. Pass 0 covers the full ranges;
    /// later passes cover a window around `center` shrunk 8x per pass.
    fn lattice(&self, n: usize, pass: usize, center: TxParams) -> Vec<TxParams> {
        let shrink = 8f64.powi(pass as i32);
        match self.mode {
            TxMode::Fixed => vec![TxParams::ORIGIN],
            TxMode::PowerSweep => {
                let w = 1.0 / shrink;
                let (lo, hi) = if pass == 0 {
                    (0.0, 1.0)
                } else {
                    ((center.x - 0.5 * w).max(0.0), (center.x + 0.5 * w).min(1.0))
                };
                let points = if pass == 0 { n + 1 } else { n };
                linspace(lo, hi, points).into_iter().map(|x| TxParams { x, y: 0.0 }).collect()
            }
            TxMode::Angles => {
                let thetas = if pass == 0 {
                    full_theta_lattice(n)
                } else {
                    let tw = 0.5 * PI / shrink;
                    linspace(
                        (center.x - 0.5 * tw).max(0.0),
                        (center.x + 0.5 * tw).min(0.5 * PI),
                        n,
                    )
                };
                let phis: Vec<f64> = if pass == 0 {
                    full_phi_lattice(n)
                } else {
                    let pw = 2.0 * PI / shrink;
                    linspace(center.y - 0.5 * pw, center.y + 0.5 * pw, n)
                        .into_iter()
                        .map(|p| p.rem_euclid(2.0 * PI))
                        .collect()
                };
                let mut cells = Vec::with_capacity(thetas.len() * phis.len());
                for &t in &thetas {
                    for &p in &phis {
                        cells.push(TxParams { x: t, y: p });
                    }
                }
                cells
            }
        }
    }

    /// Descent coordinates: (index into {x, y}, initial half-window, wraps).
    fn descent_coords(&self, control: &SearchControl) -> Vec<(usize, f64, bool)> {
        let n = control.grid_points.max(2) as f64;
        let shrink = 8f64.powi(control.refine_passes as i32);
        match self.mode {
            TxMode::Fixed => vec![],
            TxMode::PowerSweep => vec![(0, 1.0 / shrink / (n - 1.0), false)],
            TxMode::Angles => vec![
                (0, 0.5 * PI / shrink / (n - 1.0), false),
                (1, 2.0 * PI / shrink / n, true),
            ],
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || hi <= lo {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

/// Directions tracing one transmitter's trade-off frontier between its two
/// quadratic forms: principal eigenvectors of
/// `cos(a) own own^H + sin(a) cross cross^H` as the mixing angle sweeps from
/// interference-suppressing (`a = -pi/2`, the complement direction) through
/// maximum-ratio (`a = 0`) to energy-boosting (`a = pi/2`, the cross
/// channel). Every mix keeps a nonnegative top eigenvalue.
fn trade_frontier(own: &CVector, cross: &CVector, points: usize) -> Vec<CVector> {
    let own_outer = HermitianMatrix::scaled_outer(1.0, own);
    let cross_outer = HermitianMatrix::scaled_outer(1.0, cross);
    let mut dirs = Vec::with_capacity(points);
    for k in 0..points {
        let a = -0.5 * PI + PI * k as f64 / (points - 1) as f64;
        let m = own_outer.scale(a.cos()).add(&cross_outer.scale(a.sin()));
        if let Ok(e) = principal_eig(&m) {
            dirs.push(e.vector);
        }
    }
    dirs
}

/// Seed pairs covering both transmitters' trade frontiers. Optimal beams of
/// every problem here balance the own-channel gain against the cross-channel
/// gain, so the optimum lies on (or near) this product manifold; seeding it
/// lets the polish start next to active-constraint boundaries the lattice
/// undersamples.
pub fn frontier_seed_pairs(
    ch: &ChannelSet,
    tx1: &TxFamily,
    tx2: &TxFamily,
    points: usize,
) -> Vec<(TxParams, TxParams)> {
    let dirs1 = trade_frontier(&ch.h11, &ch.h12, points);
    let dirs2 = trade_frontier(&ch.h22, &ch.h21, points);
    let p1: Vec<TxParams> = dirs1.iter().map(|v| tx1.params_of_unit(v)).collect();
    let p2: Vec<TxParams> = dirs2.iter().map(|v| tx2.params_of_unit(v)).collect();
    let mut seeds = Vec::with_capacity(p1.len() * p2.len());
    for &a in &p1 {
        for &b in &p2 {
            seeds.push((a, b));
        }
    }
    seeds
}

/// `n + 1` evenly spaced points covering `[0, pi/2]` inclusive. Lattices for
/// `n` and any integer multiple of `n` nest, so denser grids can only improve
/// a grid maximum.
pub(crate) fn full_theta_lattice(n: usize) -> Vec<f64> {
    (0..=n).map(|k| 0.5 * PI * k as f64 / n as f64).collect()
}

/// `n` evenly spaced points covering `[0, 2 pi)` half-open; nests the same way.
pub(crate) fn full_phi_lattice(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// Objective evaluated on the four quadratic forms
/// `(q1 = tx1 forms at (rx1, rx2), q2 = tx2 forms at (rx1, rx2))`.
///
/// Keys are monotone transforms of the reported objective so the hot loop
/// avoids logarithms; [`PairObjective::value`] converts a key back to
/// objective units (bits for the rate objectives).
#[derive(Debug, Clone, Copy)]
pub enum PairObjective {
    /// `r1 + r2`; key is the product of the two `(1 + SINR)` factors.
    SumRate { noise1: f64, noise2: f64 },
    /// Rate of receiver 1; key is its SINR.
    RateRx1 { noise1: f64 },
    /// Rate of receiver 2; key is its SINR.
    RateRx2 { noise2: f64 },
    /// `min(received power at rx1 / e1, received power at rx2 / e2)`.
    MinScaledEnergy { e1: f64, e2: f64 },
}

impl PairObjective {
    #[inline]
    pub fn key(&self, q1: (f64, f64), q2: (f64, f64)) -> f64 {
        match *self {
            PairObjective::SumRate { noise1, noise2 } => {
                let d1 = q2.0 + noise1;
                let d2 = q1.1 + noise2;
                ((d1 + q1.0) / d1) * ((d2 + q2.1) / d2)
            }
            PairObjective::RateRx1 { noise1 } => q1.0 / (q2.0 + noise1),
            PairObjective::RateRx2 { noise2 } => q2.1 / (q1.1 + noise2),
            PairObjective::MinScaledEnergy { e1, e2 } => {
                let b1 = if e1 > 0.0 { (q1.0 + q2.0) / e1 } else { f64::INFINITY };
                let b2 = if e2 > 0.0 { (q1.1 + q2.1) / e2 } else { f64::INFINITY };
                b1.min(b2)
            }
        }
    }

    pub fn value(&self, key: f64) -> f64 {
        match self {
            PairObjective::SumRate { .. } => key.log2(),
            PairObjective::RateRx1 { .. } | PairObjective::RateRx2 { .. } => (1.0 + key).log2(),
            PairObjective::MinScaledEnergy { .. } => key,
        }
    }
}

/// Minimum received-power floors (effective energy targets) at each receiver,
/// applied with [`ENERGY_SLACK`].
#[derive(Debug, Clone, Copy, Default)]
pub struct EnergyFloor {
    pub rx1: Option<f64>,
    pub rx2: Option<f64>,
}

impl EnergyFloor {
    #[inline]
    pub fn satisfied(&self, q1: (f64, f64), q2: (f64, f64)) -> bool {
        self.rx1.map_or(true, |e| q1.0 + q2.0 >= e - ENERGY_SLACK)
            && self.rx2.map_or(true, |e| q1.1 + q2.1 >= e - ENERGY_SLACK)
    }
}

/// Best point found by a pair search.
#[derive(Debug, Clone)]
pub struct PairOutcome {
    pub p1: TxParams,
    pub p2: TxParams,
    pub q1: (f64, f64),
    pub q2: (f64, f64),
    pub key: f64,
    /// Objective in output units (bits for rates).
    pub value: f64,
}

impl PairOutcome {
    pub fn beams(&self, tx1: &TxFamily, tx2: &TxFamily) -> (Beamformer, Beamformer) {
        (tx1.beam(self.p1), tx2.beam(self.p2))
    }

    pub fn covariances(&self, tx1: &TxFamily, tx2: &TxFamily) -> CovariancePair {
        let (b1, b2) = self.beams(tx1, tx2);
        CovariancePair {
            s1: beamformer_to_covariance(&b1),
            s2: beamformer_to_covariance(&b2),
        }
    }
}

/// Grid-plus-refinement search over a pair of transmitter families.
pub struct PairSearch<'a> {
    pub tx1: &'a TxFamily,
    pub tx2: &'a TxFamily,
    pub objective: PairObjective,
    pub floor: EnergyFloor,
    pub control: &'a SearchControl,
    /// Analytically known candidates merged with the coarse grid.
    pub seeds: Vec<(TxParams, TxParams)>,
}

impl<'a> PairSearch<'a> {
    /// Coarse refinement candidates kept besides the best cell; the sum-rate
    /// landscape is multimodal and the runner-up basin sometimes polishes
    /// higher.
    const TOP_CANDIDATES: usize = 2;

    pub fn run(&self) -> Option<PairOutcome> {
        let n = self.control.grid_points.max(2);

        // Coarse pass: per-row best cells over the full lattices.
        let cells1 = self.tx1.lattice(n, 0, TxParams::ORIGIN);
        let cells2 = self.tx2.lattice(n, 0, TxParams::ORIGIN);
        let q2: Vec<(f64, f64)> = cells2.iter().map(|&p| self.tx2.quad_forms(p)).collect();
        let objective = self.objective;
        let floor = self.floor;
        let row_bests: Vec<Option<(usize, f64)>> = {
            let scan = |i: usize| -> Option<(usize, f64)> {
                let qi = self.tx1.quad_forms(cells1[i]);
                let mut local: Option<(usize, f64)> = None;
                for (j, &qj) in q2.iter().enumerate() {
                    if !floor.satisfied(qi, qj) {
                        continue;
                    }
                    let key = objective.key(qi, qj);
                    if local.map_or(true, |(_, bk)| key > bk) {
                        local = Some((j, key));
                    }
                }
                local
            };
            #[cfg(feature = "parallel")]
            {
                if self.control.parallel {
                    use rayon::prelude::*;
                    (0..cells1.len()).into_par_iter().map(scan).collect()
                } else {
                    (0..cells1.len()).map(scan).collect()
                }
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..cells1.len()).map(scan).collect()
            }
        };

        // Candidates: the top coarse cells plus the top feasible seeds, each
        // refined and polished independently; the best polished point wins.
        let mut ranked: Vec<(f64, usize, usize)> = row_bests
            .iter()
            .enumerate()
            .filter_map(|(i, rb)| rb.map(|(j, key)| (key, i, j)))
            .collect();
        ranked.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let mut candidates: Vec<(TxParams, TxParams, f64)> = ranked
            .into_iter()
            .take(Self::TOP_CANDIDATES)
            .map(|(key, i, j)| (cells1[i], cells2[j], key))
            .collect();
        let mut seed_keys: Vec<(f64, usize)> = self
            .seeds
            .iter()
            .enumerate()
            .filter_map(|(k, &(p1, p2))| {
                let key = self.eval(p1, p2);
                (key > f64::NEG_INFINITY).then_some((key, k))
            })
            .collect();
        seed_keys.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        for &(key, k) in seed_keys.iter().take(Self::TOP_CANDIDATES) {
            let (p1, p2) = self.seeds[k];
            candidates.push((p1, p2, key));
        }
        if candidates.is_empty() {
            return None;
        }

        let mut best: Option<PairOutcome> = None;
        for &(p1, p2, key) in &candidates {
            let refined = self.refine(n, p1, p2, key);
            let polished = self.descend(refined.0, refined.1, refined.2);
            if best.as_ref().map_or(true, |b| polished.key > b.key) {
                best = Some(polished);
            }
        }
        best
    }

    /// Window-shrinking grid passes around one candidate.
    fn refine(&self, n: usize, p1: TxParams, p2: TxParams, key: f64) -> (TxParams, TxParams, f64) {
        let mut best = (p1, p2, key);
        for pass in 1..=self.control.refine_passes {
            let cells1 = self.tx1.lattice(n, pass, best.0);
            let cells2 = self.tx2.lattice(n, pass, best.1);
            let q1: Vec<(f64, f64)> = cells1.iter().map(|&p| self.tx1.quad_forms(p)).collect();
            let q2: Vec<(f64, f64)> = cells2.iter().map(|&p| self.tx2.quad_forms(p)).collect();
            let objective = self.objective;
            let floor = self.floor;
            let row_best = exec::argmax_rows(cells1.len(), self.control.parallel, |i| {
                let qi = q1[i];
                let mut local: Option<(usize, f64)> = None;
                for (j, &qj) in q2.iter().enumerate() {
                    if !floor.satisfied(qi, qj) {
                        continue;
                    }
                    let key = objective.key(qi, qj);
                    if local.map_or(true, |(_, bk)| key > bk) {
                        local = Some((j, key));
                    }
                }
                local
            });
            if let Some((i, j, key)) = row_best {
                if key > best.2 {
                    best = (cells1[i], cells2[j], key);
                }
            }
        }
        best
    }

    fn eval(&self, p1: TxParams, p2: TxParams) -> f64 {
        let q1 = self.tx1.quad_forms(p1);
        let q2 = self.tx2.quad_forms(p2);
        if !self.floor.satisfied(q1, q2) {
            return f64::NEG_INFINITY;
        }
        self.objective.key(q1, q2)
    }

    /// Coordinate-descent polish: golden-section line searches per coordinate
    /// until a full round improves the objective by less than `descent_tol`.
    fn descend(&self, p1: TxParams, p2: TxParams, key: f64) -> PairOutcome {
        let mut cur = (p1, p2);
        let mut cur_key = key;
        let coords: Vec<(usize, usize, f64, bool)> = self
            .tx1
            .descent_coords(self.control)
            .into_iter()
            .map(|(c, w, wrap)| (0usize, c, w, wrap))
            .chain(
                self.tx2
                    .descent_coords(self.control)
                    .into_iter()
                    .map(|(c, w, wrap)| (1usize, c, w, wrap)),
            )
            .collect();
        if !coords.is_empty() {
            for _round in 0..60 {
                let round_start = self.objective.value(cur_key);
                for &(tx, c, w, wrap) in &coords {
                    let base = cur;
                    let with = move |v: f64| -> (TxParams, TxParams) {
                        let mut out = base;
                        let p = if tx == 0 { &mut out.0 } else { &mut out.1 };
                        if c == 0 {
                            p.x = v;
                        } else {
                            p.y = if wrap { v.rem_euclid(2.0 * PI) } else { v };
                        }
                        out
                    };
                    let x0 = {
                        let p = if tx == 0 { base.0 } else { base.1 };
                        if c == 0 { p.x } else { p.y }
                    };
                    let f = |v: f64| {
                        let pair = with(v);
                        self.eval(pair.0, pair.1)
                    };
                    let (xb, fb) = golden_max(&f, x0 - w, x0 + w, 48);
                    if fb > cur_key {
                        cur = with(xb);
                        cur_key = fb;
                    }
                }
                let round_gain = self.objective.value(cur_key) - round_start;
                if round_gain < self.control.descent_tol {
                    break;
                }
            }
        }
        let q1 = self.tx1.quad_forms(cur.0);
        let q2 = self.tx2.quad_forms(cur.1);
        PairOutcome {
            p1: cur.0,
            p2: cur.1,
            q1,
            q2,
            key: cur_key,
            value: self.objective.value(cur_key),
        }
    }
}

/// Golden-section maximization of `f` on `[lo, hi]`. Returns the best point
/// probed (including the endpoints).
pub(crate) fn golden_max<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut best = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    for edge in [a, b] {
        let fe = f(edge);
        if fe > best.1 {
            best = (edge, fe);
        }
    }
    for _ in 0..iters {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
        let (xc, fc) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
        if fc > best.1 {
            best = (xc, fc);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ChannelSet;

    fn instance() -> (ChannelSet, PowerBudget) {
        let ch = ChannelSet::new(
            CVector::from_pairs(&[(0.0608, -0.1896), (-0.4942, -0.1212)]),
            CVector::from_pairs(&[(0.7306, -0.6496), (-0.0369, -0.1672)]),
            CVector::from_pairs(&[(-0.4320, -0.3112), (-0.4142, -0.0515)]),
            CVector::from_pairs(&[(0.5634, 0.2935), (-0.0672, -0.2515)]),
            0.1,
            0.1,
        )
        .unwrap();
        (ch, PowerBudget::new(1.0, 1.0).unwrap())
    }

    #[test]
    fn quad_forms_match_explicit_covariance() {
        let (ch, budget) = instance();
        let tx1 = TxFamily::new(&ch, &budget, 1, false);
        let p = TxParams { x: 0.7, y: 2.1 };
        let (qa, qb) = tx1.quad_forms(p);
        let cov = beamformer_to_covariance(&tx1.beam(p));
        let qa_m = crate::linalg::quadratic_form(&ch.h11, &cov).unwrap();
        let qb_m = crate::linalg::quadratic_form(&ch.h12, &cov).unwrap();
        assert!((qa - qa_m).abs() < 1e-12);
        assert!((qb - qb_m).abs() < 1e-12);
    }

    #[test]
    fn params_round_trip_through_unit_vector() {
        let (ch, budget) = instance();
        let tx2 = TxFamily::new(&ch, &budget, 2, false);
        let p = TxParams { x: 1.1, y: 4.9 };
        let beam = tx2.beam(p);
        let back = tx2.params_of_unit(&beam.direction);
        let (qa, qb) = tx2.quad_forms(p);
        let (qa2, qb2) = tx2.quad_forms(back);
        assert!((qa - qa2).abs() < 1e-12);
        assert!((qb - qb2).abs() < 1e-12);
    }

    #[test]
    fn mrt_seed_maximizes_own_quadratic_form() {
        let (ch, budget) = instance();
        let tx1 = TxFamily::new(&ch, &budget, 1, false);
        let mrt = tx1.params_of_unit(&ch.h11.normalized().unwrap());
        let (qa, _) = tx1.quad_forms(mrt);
        assert!((qa - ch.h11.norm_sq()).abs() < 1e-12);
    }

    #[test]
    fn unconstrained_sum_rate_search_improves_with_descent() {
        let (ch, budget) = instance();
        let tx1 = TxFamily::new(&ch, &budget, 1, false);
        let tx2 = TxFamily::new(&ch, &budget, 2, false);
        let coarse_only = SearchControl {
            grid_points: 8,
            refine_passes: 0,
            descent_tol: f64::INFINITY,
            parallel: false,
        };
        let full = SearchControl {
            grid_points: 8,
            refine_passes: 2,
            descent_tol: 1e-9,
            parallel: false,
        };
        let objective = PairObjective::SumRate { noise1: 0.1, noise2: 0.1 };
        let run = |control: &SearchControl| {
            PairSearch {
                tx1: &tx1,
                tx2: &tx2,
                objective,
                floor: EnergyFloor::default(),
                control,
                seeds: vec![],
            }
            .run()
            .unwrap()
        };
        let coarse = run(&coarse_only);
        let fine = run(&full);
        assert!(fine.value >= coarse.value - 1e-12);
    }

    #[test]
    fn energy_floor_filters_infeasible_cells() {
        let (ch, budget) = instance();
        let tx1 = TxFamily::new(&ch, &budget, 1, false);
        let tx2 = TxFamily::new(&ch, &budget, 2, false);
        // Demand more receiver-1 power than any strategy can deliver.
        let impossible = ch.h11.norm_sq() + ch.h21.norm_sq() + 1.0;
        let search = PairSearch {
            tx1: &tx1,
            tx2: &tx2,
            objective: PairObjective::SumRate { noise1: 0.1, noise2: 0.1 },
            floor: EnergyFloor { rx1: Some(impossible), rx2: None },
            control: &SearchControl::with_grid(8).sequential(),
            seeds: vec![],
        };
        assert!(search.run().is_none());
    }

    #[test]
    fn golden_max_finds_quadratic_peak() {
        let f = |x: f64| -(x - 0.3) * (x - 0.3);
        let (x, _) = golden_max(&f, -1.0, 1.0, 64);
        assert!((x - 0.3).abs() < 1e-9);
    }
}
