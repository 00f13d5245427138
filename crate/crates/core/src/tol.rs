use serde::{Deserialize, Serialize};

/// Thresholds shared by every module. Inputs are expected at unit scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Geometric predicates: point coincidence, point-on-segment, residual norms.
    pub eps_geom: f64,
    /// Comparison of form coefficients.
    pub eps_form: f64,
    /// Singular-value cutoff, relative to the largest singular value.
    pub eps_rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_geom: 1e-9,
            eps_form: 1e-8,
            eps_rank: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn new(eps_geom: f64, eps_form: f64, eps_rank: f64) -> Option<Self> {
        let ok = [eps_geom, eps_form, eps_rank]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        ok.then_some(Self {
            eps_geom,
            eps_form,
            eps_rank,
        })
    }
}
