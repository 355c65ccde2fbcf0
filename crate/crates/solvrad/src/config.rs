//! Tunables and tolerances, gathered in one place.
//!
//! The relative tolerances come in two flavors keyed by working precision;
//! everything that compares values on a grid scales by the magnitude of the
//! data, never by absolute thresholds.

use crate::num::Real;

/// Working floating precision of a pipeline run.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Precision {
    /// IEEE double, 53-bit mantissa.
    F64,
    /// Double-double, ~106-bit mantissa.
    Dd,
}

impl Precision {
    /// Map a requested bit count onto an available precision.
    pub fn from_bits(bits: u32) -> Precision {
        if bits <= 53 {
            Precision::F64
        } else {
            Precision::Dd
        }
    }
    pub fn bits(self) -> u32 {
        match self {
            Precision::F64 => 53,
            Precision::Dd => 106,
        }
    }
}

/// Per-precision relative tolerances.
#[derive(Copy, Clone, Debug)]
pub struct Tols {
    /// Backward-relative residual a root must satisfy.
    pub root_tol: f64,
    /// Newton displacement treated as converged, relative to 1+|z|.
    pub newton_tol: f64,
    /// Max relative residual allowed when validating a rational fit.
    pub fit_tol: f64,
    /// Continued-fraction rounding window for fitted coefficients.
    pub round_tol: f64,
    /// Final tower-vs-tracked-root agreement.
    pub verify_tol: f64,
    /// Monodromy-invariance test threshold.
    pub invariance_tol: f64,
    /// Resolvent component eigenvector check.
    pub eigen_tol: f64,
    /// Character-sum reassembly check.
    pub reassembly_tol: f64,
}

pub const TOLS_F64: Tols = Tols {
    root_tol: 1e-10,
    newton_tol: 3e-14,
    fit_tol: 1e-8,
    round_tol: 1e-6,
    verify_tol: 1e-6,
    invariance_tol: 1e-8,
    eigen_tol: 1e-8,
    reassembly_tol: 1e-10,
};

pub const TOLS_DD: Tols = Tols {
    root_tol: 1e-24,
    newton_tol: 1e-29,
    fit_tol: 1e-22,
    round_tol: 1e-18,
    verify_tol: 1e-20,
    invariance_tol: 1e-20,
    eigen_tol: 1e-20,
    reassembly_tol: 1e-24,
};

pub fn tols_for<T: Real>() -> Tols {
    if T::MANTISSA_BITS > 53 {
        TOLS_DD
    } else {
        TOLS_F64
    }
}

/// Everything an analysis run can tune.
#[derive(Clone, Debug)]
pub struct Settings {
    pub seed: u64,
    pub precision: Precision,
    /// Cap on numerator+denominator degree in rational reconstruction.
    pub degree_cap: usize,
    /// Cap on permutation-group enumeration.
    pub group_cap: usize,
    /// Grid sample count; 0 means `2*degree_cap + 8`.
    pub samples: usize,
    /// Segments per tracked circle.
    pub k_seg: usize,
    /// Bisection floor, as a fraction of total path length.
    pub min_step_frac: f64,
    /// Newton iterations per corrector step.
    pub newton_iters: u32,
    /// Root-finder iteration cap.
    pub aberth_iters: u32,
    /// Separation tolerance factor: sep_tol = factor * (1 + max |root|).
    pub sep_tol_factor: f64,
    /// Branch-point clustering radius factor.
    pub cluster_tol_factor: f64,
    /// Relative magnitude below which a resolvent component is dropped.
    pub drop_tol: f64,
    /// Relative leading-coefficient threshold for degenerate evaluation.
    pub degenerate_tol: f64,
    /// Local monodromy: slice offset as a fraction of the ball radius.
    pub offset_frac: f64,
    /// Local monodromy: maximum radius halvings before giving up.
    pub max_shrinks: u32,
    /// Retries for slice selection and base-point selection.
    pub max_retries: u32,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            seed: 0,
            precision: Precision::F64,
            degree_cap: 24,
            group_cap: 1_000_000,
            samples: 0,
            k_seg: 32,
            min_step_frac: 1e-12,
            newton_iters: 16,
            aberth_iters: 300,
            sep_tol_factor: 1e-6,
            cluster_tol_factor: 1e-8,
            drop_tol: 1e-9,
            degenerate_tol: 1e-12,
            offset_frac: 0.1,
            max_shrinks: 6,
            max_retries: 32,
        }
    }
}

impl Settings {
    pub fn grid_samples(&self) -> usize {
        if self.samples == 0 {
            2 * self.degree_cap + 8
        } else {
            self.samples
        }
    }
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
    pub fn with_precision(mut self, p: Precision) -> Self {
        self.precision = p;
        self
    }
}
