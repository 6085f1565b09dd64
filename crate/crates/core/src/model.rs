//! Problem-instance data model and the physical quantities everything is
//! optimized over: per-receiver achievable rates, harvested energy, power
//! budgets, and energy targets.
//!
//! Rates are reported in bits per channel use (base-2 logarithm throughout).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{principal_eig, quadratic_form, CVector, HermitianMatrix};

/// Additive slack used whenever an energy constraint is evaluated, absorbing
/// floating-point noise at active constraints.
pub const ENERGY_SLACK: f64 = 1e-9;

/// The four complex channel vectors and noise powers of a two-transmitter,
/// two-receiver instance. `h_ik` runs from transmitter `i` to receiver `k`.
#[derive(Debug, Clone)]
pub struct ChannelSet {
    pub h11: CVector,
    pub h12: CVector,
    pub h21: CVector,
    pub h22: CVector,
    pub sigma1_sq: f64,
    pub sigma2_sq: f64,
    pub nt: usize,
}

impl ChannelSet {
    pub fn new(
        h11: CVector,
        h12: CVector,
        h21: CVector,
        h22: CVector,
        sigma1_sq: f64,
        sigma2_sq: f64,
    ) -> Result<Self> {
        let nt = h11.dim();
        for (name, h) in [("h12", &h12), ("h21", &h21), ("h22", &h22)] {
            if h.dim() != nt {
                let _ = name;
                return Err(Error::DimensionMismatch {
                    context: "ChannelSet",
                    expected: nt,
                    found: h.dim(),
                });
            }
        }
        if sigma1_sq <= 0.0 || sigma2_sq <= 0.0 {
            return Err(Error::InvalidParameter(
                "noise powers must be positive".into(),
            ));
        }
        Ok(Self { h11, h12, h21, h22, sigma1_sq, sigma2_sq, nt })
    }

    /// Channels seen by transmitter `i`: (direct to its own receiver,
    /// cross to the other receiver).
    pub fn tx_channels(&self, tx: usize) -> (&CVector, &CVector) {
        match tx {
            1 => (&self.h11, &self.h12),
            2 => (&self.h22, &self.h21),
            _ => panic!("transmitter index must be 1 or 2"),
        }
    }

    /// Instance with receiver roles 1 and 2 exchanged.
    pub fn swapped(&self) -> ChannelSet {
        ChannelSet {
            h11: self.h22.clone(),
            h12: self.h21.clone(),
            h21: self.h12.clone(),
            h22: self.h11.clone(),
            sigma1_sq: self.sigma2_sq,
            sigma2_sq: self.sigma1_sq,
            nt: self.nt,
        }
    }
}

/// Per-transmitter power limits in watts.
#[derive(Debug, Clone, Copy)]
pub struct PowerBudget {
    pub p1: f64,
    pub p2: f64,
}

impl PowerBudget {
    pub fn new(p1: f64, p2: f64) -> Result<Self> {
        if p1 <= 0.0 || p2 <= 0.0 {
            return Err(Error::InvalidParameter("power budgets must be positive".into()));
        }
        Ok(Self { p1, p2 })
    }

    pub fn power(&self, tx: usize) -> f64 {
        match tx {
            1 => self.p1,
            2 => self.p2,
            _ => panic!("transmitter index must be 1 or 2"),
        }
    }
}

/// Minimum harvested-energy requirements, with the conversion efficiency
/// `gamma` and symbol duration `delta` carried explicitly (both default 1).
/// Solvers work with the effective targets `e_i / (gamma * delta)`.
#[derive(Debug, Clone, Copy)]
pub struct EnergyTarget {
    pub e1: f64,
    pub e2: f64,
    pub gamma: f64,
    pub delta: f64,
}

impl EnergyTarget {
    pub fn new(e1: f64, e2: f64) -> Self {
        Self { e1, e2, gamma: 1.0, delta: 1.0 }
    }

    pub fn with_conversion(e1: f64, e2: f64, gamma: f64, delta: f64) -> Result<Self> {
        if e1 < 0.0 || e2 < 0.0 {
            return Err(Error::InvalidParameter("energy targets must be nonnegative".into()));
        }
        if gamma <= 0.0 || delta <= 0.0 {
            return Err(Error::InvalidParameter("gamma and delta must be positive".into()));
        }
        Ok(Self { e1, e2, gamma, delta })
    }

    /// Targets divided by `gamma * delta`, the scale on which all solvers
    /// compare received power sums.
    pub fn effective(&self) -> (f64, f64) {
        let gd = self.gamma * self.delta;
        (self.e1 / gd, self.e2 / gd)
    }
}

/// Pair of Hermitian PSD transmit covariance matrices.
#[derive(Debug, Clone)]
pub struct CovariancePair {
    pub s1: HermitianMatrix,
    pub s2: HermitianMatrix,
}

impl CovariancePair {
    pub fn zeros(nt: usize) -> Self {
        Self { s1: HermitianMatrix::zeros(nt), s2: HermitianMatrix::zeros(nt) }
    }

    /// Checks PSD-ness (min eigenvalue >= -1e-10) and the trace budgets
    /// (trace <= p_i + 1e-9).
    pub fn validate(&self, budget: &PowerBudget) -> Result<()> {
        for (s, p) in [(&self.s1, budget.p1), (&self.s2, budget.p2)] {
            let min_eig = s.eigenvalues()[0];
            if min_eig < -1e-10 {
                return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min_eig });
            }
            if s.trace() > p + 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "trace {:.9} exceeds budget {:.9}",
                    s.trace(),
                    p
                )));
            }
        }
        Ok(())
    }
}

/// Rank-one transmit strategy: unit direction and transmit power, with the
/// direction's coordinates in a channel-span basis kept alongside when known.
#[derive(Debug, Clone)]
pub struct Beamformer {
    pub direction: CVector,
    pub power: f64,
    pub span_coords: Option<(Complex64, Complex64)>,
}

impl Beamformer {
    pub fn new(direction: CVector, power: f64) -> Self {
        debug_assert!((direction.norm() - 1.0).abs() < 1e-10);
        debug_assert!(power >= 0.0);
        Self { direction, power, span_coords: None }
    }

    pub fn with_span_coords(mut self, a: Complex64, b: Complex64) -> Self {
        self.span_coords = Some((a, b));
        self
    }
}

/// Covariance matrix `power * direction * direction^H` of a beamformer.
/// Rank <= 1 and trace equal to the power by construction.
pub fn beamformer_to_covariance(b: &Beamformer) -> HermitianMatrix {
    HermitianMatrix::scaled_outer(b.power, &b.direction)
}

/// Receiver index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    One,
    Two,
}

/// Rate of receiver 1: `log2(1 + h11^H S1 h11 / (h21^H S2 h21 + sigma1^2))`.
pub fn rate_1(cov: &CovariancePair, ch: &ChannelSet) -> Result<f64> {
    let signal = quadratic_form(&ch.h11, &cov.s1)?;
    let interference = quadratic_form(&ch.h21, &cov.s2)?;
    Ok(rate_from_powers(signal, interference, ch.sigma1_sq))
}

/// Rate of receiver 2, the index-swapped mirror of [`rate_1`].
pub fn rate_2(cov: &CovariancePair, ch: &ChannelSet) -> Result<f64> {
    let signal = quadratic_form(&ch.h22, &cov.s2)?;
    let interference = quadratic_form(&ch.h12, &cov.s1)?;
    Ok(rate_from_powers(signal, interference, ch.sigma2_sq))
}

/// Shannon rate in bits for given signal and interference powers.
pub fn rate_from_powers(signal: f64, interference: f64, noise: f64) -> f64 {
    (1.0 + signal.max(0.0) / (interference.max(0.0) + noise)).log2()
}

pub fn sum_rate(cov: &CovariancePair, ch: &ChannelSet) -> Result<f64> {
    Ok(rate_1(cov, ch)? + rate_2(cov, ch)?)
}

/// Energy harvested by `receiver` over one symbol interval:
/// `gamma * delta * (h_{1i}^H S1 h_{1i} + h_{2i}^H S2 h_{2i})`.
pub fn harvested_energy(
    receiver: Receiver,
    cov: &CovariancePair,
    ch: &ChannelSet,
    tgt: &EnergyTarget,
) -> Result<f64> {
    let (from_tx1, from_tx2) = match receiver {
        Receiver::One => (
            quadratic_form(&ch.h11, &cov.s1)?,
            quadratic_form(&ch.h21, &cov.s2)?,
        ),
        Receiver::Two => (
            quadratic_form(&ch.h12, &cov.s1)?,
            quadratic_form(&ch.h22, &cov.s2)?,
        ),
    };
    Ok(tgt.gamma * tgt.delta * (from_tx1 + from_tx2))
}

/// Round-trips a covariance matrix back to a beamformer through its
/// principal eigenpair. Meaningful for (numerically) rank-one matrices.
pub fn covariance_to_beamformer(s: &HermitianMatrix) -> Result<Beamformer> {
    let trace = s.trace();
    if trace <= 1e-15 {
        return Ok(Beamformer::new(CVector::standard_basis(s.dim(), 0), 0.0));
    }
    let eig = principal_eig(s)?;
    Ok(Beamformer::new(eig.vector, eig.value))
}
