use serde::{Deserialize, Serialize};

/// Relative tolerance used by every "vanishes" verdict.
///
/// A residual is first divided by the scale of the tensor under test,
/// `max(1, max |component|)`, and then compared against `rel`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub rel: f64,
}

impl Tolerance {
    pub const DEFAULT_REL: f64 = 1e-9;

    pub fn new(rel: f64) -> Self {
        assert!(rel > 0.0 && rel.is_finite(), "tolerance must be positive");
        Self { rel }
    }

    /// Scale factor for a tensor whose largest absolute component is `max_abs`.
    pub fn scale(max_abs: f64) -> f64 {
        max_abs.max(1.0)
    }

    /// Whether an already scaled residual passes.
    pub fn accepts(&self, scaled_residual: f64) -> bool {
        scaled_residual <= self.rel
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self::new(Self::DEFAULT_REL)
    }
}
