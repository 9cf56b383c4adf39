use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::CoherentAmplitude;

/// Pure state over Fock levels `0..dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    amps: Vec<Complex64>,
}

impl FockState {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidParameter {
                name: "dim",
                value: 0.0,
                reason: "Fock dimension must be at least 1",
            });
        }
        Ok(Self { amps })
    }

    pub fn number(n: usize, dim: usize) -> Self {
        assert!(n < dim, "level {n} outside Fock dimension {dim}");
        let mut amps = vec![Complex64::default(); dim];
        amps[n] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn vacuum(dim: usize) -> Self {
        Self::number(0, dim)
    }

    /// Truncated coherent state; amplitudes beyond `dim` are dropped, not
    /// renormalised.
    pub fn coherent(alpha: CoherentAmplitude, dim: usize) -> Self {
        let a = alpha.alpha();
        let mut amps = Vec::with_capacity(dim);
        let mut c = Complex64::new((-0.5 * a.norm_sqr()).exp(), 0.0);
        for n in 0..dim {
            amps.push(c);
            c = c * a / ((n + 1) as f64).sqrt();
        }
        Self { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// ⟨a⟩
    pub fn mean_a(&self) -> Complex64 {
        self.amps
            .windows(2)
            .enumerate()
            .map(|(n, w)| w[0].conj() * w[1] * ((n + 1) as f64).sqrt())
            .sum()
    }

    pub fn top_population(&self) -> f64 {
        self.amps.last().map_or(0.0, |c| c.norm_sqr())
    }

    pub fn to_vector(&self) -> DVector<Complex64> {
        DVector::from_column_slice(&self.amps)
    }
}

/// Density matrix over Fock levels `0..dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    rho: DMatrix<Complex64>,
}

impl DensityState {
    /// Accepts a matrix that is Hermitian within 1e-10, has unit trace
    /// within 1e-8 and no eigenvalue below −1e-8.
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        let d = Self { rho };
        d.validate()?;
        Ok(d)
    }

    pub(crate) fn from_matrix_unchecked(rho: DMatrix<Complex64>) -> Self {
        Self { rho }
    }

    pub fn pure(psi: &FockState) -> Self {
        let v = psi.to_vector();
        Self {
            rho: &v * v.adjoint(),
        }
    }

    /// Diagonal state from (unnormalised) populations.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if weights.is_empty() || total <= 0.0 || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidParameter {
                name: "weights",
                value: total,
                reason: "populations must be non-negative with positive sum",
            });
        }
        let diag = DVector::from_iterator(
            weights.len(),
            weights.iter().map(|w| Complex64::new(w / total, 0.0)),
        );
        Ok(Self {
            rho: DMatrix::from_diagonal(&diag),
        })
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|c| c.re).sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().min()
    }

    pub fn mean_a(&self) -> Complex64 {
        // tr(ρ a) = Σ_n √(n+1) ρ_{n+1,n}
        (0..self.dim().saturating_sub(1))
            .map(|n| self.rho[(n + 1, n)] * ((n + 1) as f64).sqrt())
            .sum()
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho.nrows() != self.rho.ncols() || self.rho.nrows() == 0 {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: self.rho.nrows() as f64,
                reason: "density matrix must be square and non-empty",
            });
        }
        let herm = self.hermiticity_defect();
        if herm > 1e-10 {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: herm,
                reason: "density matrix is not Hermitian",
            });
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: tr,
                reason: "density matrix trace differs from 1",
            });
        }
        let ev = self.min_eigenvalue();
        if ev < -1e-8 {
            return Err(Error::InvalidParameter {
                name: "rho",
                value: ev,
                reason: "density matrix has a negative eigenvalue",
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PhononStats {
    pub mean: f64,
    pub distribution: Vec<f64>,
}

impl PhononStats {
    fn from_distribution(distribution: Vec<f64>) -> Self {
        let mean = distribution.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        Self { mean, distribution }
    }
}

/// Anything with a phonon-number distribution.
pub trait PhononSource {
    fn phonon_stats(&self) -> PhononStats;
}

impl PhononSource for FockState {
    fn phonon_stats(&self) -> PhononStats {
        PhononStats::from_distribution(self.amps.iter().map(|c| c.norm_sqr()).collect())
    }
}

impl PhononSource for DensityState {
    fn phonon_stats(&self) -> PhononStats {
        PhononStats::from_distribution(self.rho.diagonal().iter().map(|c| c.re).collect())
    }
}

/// A coherent amplitude paired with the number of levels to report.
impl PhononSource for (CoherentAmplitude, usize) {
    fn phonon_stats(&self) -> PhononStats {
        let (alpha, dim) = *self;
        // the mean is exactly |α|², whatever the cut
        PhononStats {
            mean: alpha.phonons(),
            distribution: FockState::coherent(alpha, dim).phonon_stats().distribution,
        }
    }
}

pub fn phonon_stats<S: PhononSource + ?Sized>(state: &S) -> PhononStats {
    state.phonon_stats()
}
