//! Scenario files: JSON descriptions of one inequality sweep.

use serde::{Deserialize, Serialize};

fn default_cells() -> usize {
    512
}
fn default_seed() -> u64 {
    0
}
fn one() -> f64 {
    1.0
}

/// One configured inequality sweep. The `check` tag selects the operation;
/// the remaining fields are its parameter block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(flatten)]
    pub check: Check,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Check {
    /// Luxemburg norm against the closed-form constant-exponent L^p norm.
    LuxemburgConsistency {
        trials: usize,
        exponents: Vec<f64>,
        #[serde(default = "default_cells")]
        cells: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// modular(f / ||f||) stays within 1e-4 of 1 for p(x) = 2 + sin x.
    UnitBall {
        trials: usize,
        #[serde(default = "default_cells")]
        cells: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Two-function Hölder with the explicit r_p constant.
    Holder {
        trials: usize,
        #[serde(default)]
        variable_p: bool,
        #[serde(default = "default_cells")]
        cells: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Duality sandwich: ||f|| - tol <= sup_g |int f g| <= r_p ||f|| + tol.
    Duality {
        trials: usize,
        #[serde(default)]
        variable_p: bool,
        #[serde(default = "default_cells")]
        cells: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Generalized Hölder (m factors) with refinement drift control.
    GeneralizedHolder {
        trials: usize,
        m: usize,
        resolutions: Vec<usize>,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Vector-valued Fefferman-Stein inequality for M_alpha.
    FeffermanStein {
        families: usize,
        family_size: usize,
        lq: f64,
        alphas: Vec<f64>,
        resolutions: Vec<usize>,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Pointwise kernel-tail domination by M_alpha of a cube indicator.
    Claim {
        trials: usize,
        alpha: f64,
        r_factors: Vec<f64>,
        #[serde(default = "default_cells")]
        cells: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Finite-difference check of the kernel derivative bound.
    KernelDerivative {
        m: usize,
        n: usize,
        alpha: f64,
        beta: Vec<usize>,
        samples: usize,
        dilations: Vec<f64>,
        /// When set, ratios must equal this value to 1e-6 relative.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect: Option<f64>,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Decay estimate for atom tuples on E_A, plain or b-weighted.
    Decay {
        m: usize,
        alpha: f64,
        d_values: Vec<i64>,
        #[serde(default)]
        weighted: bool,
        trials: usize,
        dilations: Vec<f64>,
        #[serde(default = "default_cells")]
        cells: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Main boundedness ratio sweep for I_alpha on atomic inputs.
    Theorem {
        m: usize,
        alpha: f64,
        #[serde(default)]
        sine_p: bool,
        trials: usize,
        scales: Vec<f64>,
        translations: Vec<f64>,
        #[serde(default = "default_cells")]
        cells: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Commutator boundedness sweep with b(x) = sin x, plus the exact
    /// vanishing check for constant b.
    CommutatorTheorem {
        m: usize,
        alpha: f64,
        #[serde(default)]
        sine_p: bool,
        trials: usize,
        scales: Vec<f64>,
        translations: Vec<f64>,
        #[serde(default = "default_cells")]
        cells: usize,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Log-Hölder classifier on a constant field or the jump fixture.
    LhValidate {
        #[serde(default)]
        jump: bool,
        resolutions: Vec<usize>,
        #[serde(default = "one")]
        threshold_scale: f64,
    },
    /// Certificate verification for freshly constructed atoms.
    AtomCertificates {
        count: usize,
        d_values: Vec<i64>,
        #[serde(default)]
        weighted: bool,
        #[serde(default = "default_seed")]
        seed: u64,
    },
    /// Analytic Riesz-potential value at two resolutions.
    RieszOracle {},
}
