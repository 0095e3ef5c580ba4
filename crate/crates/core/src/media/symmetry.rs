use std::fmt;

use super::CorrelationModel;
use crate::geometry::Vec3;
use crate::scalar::Scalar;

pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryKind {
    Classic,
    Pt,
    /// Real, parity-even correlation: satisfies both conditions.
    Both,
    Neither,
}

impl SymmetryKind {
    fn from_flags(classic: bool, pt: bool) -> Self {
        match (classic, pt) {
            (true, true) => SymmetryKind::Both,
            (true, false) => SymmetryKind::Classic,
            (false, true) => SymmetryKind::Pt,
            (false, false) => SymmetryKind::Neither,
        }
    }

    pub fn is_classic(self) -> bool {
        matches!(self, SymmetryKind::Classic | SymmetryKind::Both)
    }

    pub fn is_pt(self) -> bool {
        matches!(self, SymmetryKind::Pt | SymmetryKind::Both)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryLevel {
    Correlation,
    Realization,
    Both,
}

/// Outcome of probing the parity conditions on a correlation.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub correlation: SymmetryKind,
    /// Largest `|C(-r1,-r2) - C(r1,r2)| / |C(r1,r2)|` seen.
    pub classic_residual: f64,
    /// Largest `|C*(-r1,-r2) - C(r1,r2)| / |C(r1,r2)|` seen.
    pub pt_residual: f64,
    /// Filled in by the oracle when a realization sampler exists.
    pub realization: Option<SymmetryKind>,
}

impl SymmetryReport {
    /// Level at which `kind` holds, if any.
    pub fn level_of(&self, kind: SymmetryKind) -> Option<SymmetryLevel> {
        let has = |k: SymmetryKind| match kind {
            SymmetryKind::Classic => k.is_classic(),
            SymmetryKind::Pt => k.is_pt(),
            SymmetryKind::Both => k == SymmetryKind::Both,
            SymmetryKind::Neither => k == SymmetryKind::Neither,
        };
        let c = has(self.correlation);
        let r = self.realization.map(has).unwrap_or(false);
        match (c, r) {
            (true, true) => Some(SymmetryLevel::Both),
            (true, false) => Some(SymmetryLevel::Correlation),
            (false, true) => Some(SymmetryLevel::Realization),
            (false, false) => None,
        }
    }

    pub fn with_realization(mut self, kind: SymmetryKind) -> Self {
        self.realization = Some(kind);
        self
    }
}

impl fmt::Display for SymmetryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "correlation: {:?}", self.correlation)?;
        if let Some(r) = self.realization {
            write!(f, ", realization: {r:?}")?;
        }
        write!(f, " (classic residual {:.3e}, PT residual {:.3e})", self.classic_residual, self.pt_residual)
    }
}

/// Probes the correlation-level classic and PT conditions on the given point pairs.
///
/// Each residual is relative to `|C(r1, r2)|`; a pair with an exactly vanishing
/// correlation only passes if the mirrored value vanishes too.
pub fn classify_symmetry<T: Scalar, M: CorrelationModel<T> + ?Sized>(
    model: &M,
    probes: &[(Vec3<T>, Vec3<T>)],
    tol: f64,
) -> SymmetryReport {
    assert!(!probes.is_empty(), "probe set must be nonempty");
    let mut classic_ok = true;
    let mut pt_ok = true;
    let mut classic_residual = 0.0f64;
    let mut pt_residual = 0.0f64;
    for &(r1, r2) in probes {
        let c = model.correlate(r1, r2);
        let m = model.correlate(-r1, -r2);
        let scale = c.norm().to_f64_lossy();
        let dc = (m - c).norm().to_f64_lossy();
        let dp = (m.conj() - c).norm().to_f64_lossy();
        classic_ok &= dc <= tol * scale;
        pt_ok &= dp <= tol * scale;
        let rel = |d: f64| {
            if scale > 0.0 {
                d / scale
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        };
        classic_residual = classic_residual.max(rel(dc));
        pt_residual = pt_residual.max(rel(dp));
    }
    SymmetryReport {
        correlation: SymmetryKind::from_flags(classic_ok, pt_ok),
        classic_residual,
        pt_residual,
        realization: None,
    }
}
