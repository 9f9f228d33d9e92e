//! Tolerances and run configuration.
//!
//! Every numerical threshold used by the pipeline lives here so a run can
//! echo the exact values it used into its report.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by all modules.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Simplex-membership and row-feasibility slack.
    pub feas: f64,
    /// Coordinates above this are in the positive support `P_+(t)`.
    pub support: f64,
    /// Pivot threshold for rank tests.
    pub rank: f64,
    /// `min t'Dt >= -cop` declares `D` copositive.
    pub cop: f64,
    /// `min t'Dt > strict` declares `D` strictly copositive.
    pub strict: f64,
    /// LP optimality / feasibility tolerance.
    pub lp: f64,
    /// LP multipliers at or below this magnitude are treated as zero.
    pub mult: f64,
    /// Stationarity residual allowed in a dual certificate.
    pub cert: f64,
    /// `|mu*| <= zero` classifies a master optimum as zero.
    pub zero: f64,
    /// `mu* <= -neg` classifies a master optimum as negative.
    pub neg: f64,
    /// Boundary band excluded from feasibility-equivalence sampling.
    pub band: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            feas: 1e-9,
            support: 1e-7,
            rank: 1e-10,
            cop: 1e-9,
            strict: 1e-9,
            lp: 1e-9,
            mult: 1e-7,
            cert: 1e-7,
            zero: 1e-7,
            neg: 1e-6,
            band: 1e-6,
        }
    }
}

impl Tolerances {
    fn as_pairs(&self) -> [(&'static str, f64); 11] {
        [
            ("feas", self.feas),
            ("support", self.support),
            ("rank", self.rank),
            ("cop", self.cop),
            ("strict", self.strict),
            ("lp", self.lp),
            ("mult", self.mult),
            ("cert", self.cert),
            ("zero", self.zero),
            ("neg", self.neg),
            ("band", self.band),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.as_pairs() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::input(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }
}

/// Knobs of the semi-infinite subproblem solver and the driver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub tol: Tolerances,
    /// Grid resolution for the Ω oracle; the grid denominator is `ceil(1/h)`.
    pub h: f64,
    /// Upper limit on stored Ω-grid points; coarsens `h` for large `p`.
    pub max_grid_points: usize,
    /// Largest `p` accepted by the exact support-enumeration oracle.
    pub p_max: usize,
    /// Initial box `|x_j| <= box_r` of cutting-plane masters.
    pub box_r: f64,
    /// Largest box tried; the box grows tenfold up to this value.
    pub box_r_max: f64,
    /// Cutting-plane rounds per master solve.
    pub max_cuts: usize,
    /// Grid halvings tried when a subproblem lands in the undecided band.
    pub refine_rounds: usize,
    /// Iteration cap of the driver; `None` means `2n + 2`.
    pub iteration_cap: Option<usize>,
    /// Assert that `(x, mu) = (0, 0)` is master-feasible (requires copositive `A_0`).
    pub a0_copositive: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: Tolerances::default(),
            h: 1.0 / 128.0,
            max_grid_points: 400_000,
            p_max: 14,
            box_r: 1.0,
            box_r_max: 1e3,
            max_cuts: 400,
            refine_rounds: 4,
            iteration_cap: None,
            a0_copositive: false,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        self.tol.validate()?;
        if !(self.h > 0.0 && self.h <= 0.25) {
            return Err(Error::input(format!("grid resolution h must lie in (0, 1/4], got {}", self.h)));
        }
        if !(self.box_r > 0.0 && self.box_r_max >= self.box_r) {
            return Err(Error::input("box radius must be positive and not exceed box_r_max"));
        }
        if self.iteration_cap == Some(0) {
            return Err(Error::input("iteration cap must be at least 1"));
        }
        if self.max_cuts == 0 {
            return Err(Error::input("max_cuts must be at least 1"));
        }
        Ok(())
    }

    pub fn cap_for(&self, n: usize) -> usize {
        self.iteration_cap.unwrap_or(2 * n + 2)
    }
}

/// Full configuration of a CLI run: solver knobs plus I/O and sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub solver: SolverOptions,
    pub seed: u64,
    pub samples: usize,
    /// Half-width of the sampling box around the witness.
    pub sample_radius: f64,
    pub out: Option<String>,
    pub verbosity: u8,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            solver: SolverOptions::default(),
            seed: 0,
            samples: 1000,
            sample_radius: 2.0,
            out: None,
            verbosity: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.solver.validate()?;
        if !(self.sample_radius > 0.0) {
            return Err(Error::input("sample_radius must be positive"));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::parse(format!("line {} column {}", e.line(), e.column()), e.to_string()))
    }
}
