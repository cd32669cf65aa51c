use serde::{Deserialize, Serialize};

use super::SketchError;

/// Accuracy target, distortion parameter and the constants that turn the
/// asymptotic sketch sizes into concrete dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SketchPlan {
    pub epsilon: f64,
    /// Subspace-embedding distortion; the pipelines size for 1/2.
    pub epsilon0: f64,
    /// Failure probability target. Reporting only; never sizes a sketch.
    pub delta: f64,
    pub c_embed: f64,
    pub c_prod: f64,
    pub c_log: f64,
    pub seed: u64,
}

impl SketchPlan {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        SketchPlan { epsilon, epsilon0: 0.5, delta: 0.1, c_embed: 4.0, c_prod: 4.0, c_log: 2.0, seed }
    }

    pub fn validate(&self) -> Result<(), SketchError> {
        let in_unit = |v: f64| v > 0.0 && v < 1.0;
        if !in_unit(self.epsilon) {
            return Err(SketchError::InvalidPlan(format!("epsilon {} not in (0, 1)", self.epsilon)));
        }
        if !in_unit(self.epsilon0) {
            return Err(SketchError::InvalidPlan(format!("epsilon0 {} not in (0, 1)", self.epsilon0)));
        }
        for (name, c) in [("c_embed", self.c_embed), ("c_prod", self.c_prod), ("c_log", self.c_log)] {
            if !c.is_finite() || c < 1.0 {
                return Err(SketchError::InvalidPlan(format!("{name} = {c} must be at least 1")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    SparseGaussian,
    Leverage,
}

/// Sketch sizes for both sides. `t` and `t_prime` are the intermediate sparse
/// embedding sizes of the composed pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SketchDims {
    pub s_c: usize,
    pub s_r: usize,
    pub t: Option<usize>,
    pub t_prime: Option<usize>,
}

/// Composed pipeline: `t = ⌈c_embed·(c/ε + c²)⌉`, `s_c = ⌈c_prod·c/ε⌉`.
/// Leverage pipeline: `s_c = ⌈c_prod·c/ε + c_log·c·ln(c+1)⌉`.
/// Every output dimension is at least `c + 1` (resp. `r + 1`), and `t ≥ s_c`.
pub fn plan_dims(plan: &SketchPlan, c: usize, r: usize, pipeline: Pipeline) -> SketchDims {
    let eps = plan.epsilon;
    let clamp = |s: f64, d: usize| (s.ceil() as usize).max(d + 1);
    match pipeline {
        Pipeline::SparseGaussian => {
            let side = |d: usize| {
                let df = d as f64;
                let s = clamp(plan.c_prod * df / eps, d);
                let t = clamp(plan.c_embed * (df / eps + df * df), d).max(s);
                (s, t)
            };
            let (s_c, t) = side(c);
            let (s_r, t_prime) = side(r);
            SketchDims { s_c, s_r, t: Some(t), t_prime: Some(t_prime) }
        }
        Pipeline::Leverage => {
            let side = |d: usize| {
                let df = d as f64;
                clamp(plan.c_prod * df / eps + plan.c_log * df * (df + 1.0).ln(), d)
            };
            SketchDims { s_c: side(c), s_r: side(r), t: None, t_prime: None }
        }
    }
}
