//! Process-wide numerical tolerances.

use std::sync::RwLock;

/// Tolerance set used throughout the library.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Absolute tolerance for algebraic identities.
    pub algebraic: f64,
    /// Tolerance applied after transcendental functions.
    pub transcendental: f64,
    /// Below this `|Im q|` a quaternion is treated as real by `exp`/`ln`.
    pub real_axis: f64,
    /// Regressivity threshold on `|1 + mu p|` and `pdet(I + mu A)`.
    pub regressive: f64,
    /// Time-scale membership snapping tolerance.
    pub membership: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        algebraic: 1e-12,
        transcendental: 1e-10,
        real_axis: 1e-14,
        regressive: 1e-12,
        membership: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

static GLOBAL: RwLock<Tolerances> = RwLock::new(Tolerances::DEFAULT);

/// Current global tolerances.
pub fn get() -> Tolerances {
    *GLOBAL.read().unwrap_or_else(|e| e.into_inner())
}

/// Replace the global tolerances.
pub fn set(tol: Tolerances) {
    *GLOBAL.write().unwrap_or_else(|e| e.into_inner()) = tol;
}
