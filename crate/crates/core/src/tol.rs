//! Tolerance configuration shared by every numeric predicate in the crate.

/// How sign predicates on polyline data are decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PredicateMode {
    /// Floating point with an `eps_geom` uncertainty margin (default).
    /// Predicates inside the margin report a non-generic input.
    #[default]
    Float,
    /// Exact rational arithmetic on the (exactly representable) f64 inputs.
    /// Only a true zero reports a non-generic input.
    Exact,
}

/// The two tolerances used throughout: `eps_geom` for sign predicates
/// (relative) and `eps_root` for root refinement (absolute in parameter).
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub eps_geom: f64,
    pub eps_root: f64,
    pub predicate_mode: PredicateMode,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_geom: 1e-9,
            eps_root: 1e-12,
            predicate_mode: PredicateMode::Float,
        }
    }
}

impl Tolerances {
    pub fn with_eps_geom(mut self, eps: f64) -> Self {
        self.eps_geom = eps;
        self
    }

    pub fn with_eps_root(mut self, eps: f64) -> Self {
        self.eps_root = eps;
        self
    }

    pub fn exact(mut self) -> Self {
        self.predicate_mode = PredicateMode::Exact;
        self
    }
}
