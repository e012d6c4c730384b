//! Numerical tolerances shared across the crate.
//!
//! The defaults assume f64 dense eigensolvers at desk scale (matrices up to
//! 64 x 64). Everything here can be overridden per call through
//! [`Tolerances`].

/// Max permitted |m - m^H| entry for matrices treated as Hermitian.
pub const HERMITICITY: f64 = 1e-12;

/// Max permitted |tr(rho) - 1| for density matrices.
pub const TRACE_ONE: f64 = 1e-12;

/// Magnitude of the most negative eigenvalue accepted from a density matrix.
/// Eigenvalues in [-PSD_SLACK, 0) are treated as rounded zeros.
pub const PSD_SLACK: f64 = 1e-10;

/// Eigenvalues of the reference state below this are treated as its kernel
/// when evaluating relative entropy.
pub const SUPPORT_EIGENVALUE: f64 = 1e-12;

/// Mass allowed to leak into the reference kernel before the relative
/// entropy is reported as +infinity.
pub const SUPPORT_LEAK: f64 = 1e-9;

/// Unitarity check threshold: max |U^H U - I| entry.
pub const UNITARITY: f64 = 1e-10;

/// Signal probabilities must sum to one within this.
pub const PROBABILITY_SUM: f64 = 1e-12;

/// Slack for the capacity comparison chi <= chi* in randomized audits.
/// Looser than the algebraic checks to absorb eigensolver error accumulated
/// across many signals.
pub const AUDIT_CHI: f64 = 1e-7;

/// Per-trial residual allowed in the decomposition chi* = chi + S(avg||avg*).
pub const AUDIT_DECOMPOSITION: f64 = 1e-8;

/// Two capacity formulas that are algebraically equal must agree within this.
pub const CROSS_CHECK: f64 = 1e-10;

/// Tolerance thresholds for state validation and relative entropy support
/// handling, overridable from the command line.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub hermiticity: f64,
    pub trace_one: f64,
    pub psd_slack: f64,
    pub support_eigenvalue: f64,
    pub support_leak: f64,
    pub unitarity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            hermiticity: HERMITICITY,
            trace_one: TRACE_ONE,
            psd_slack: PSD_SLACK,
            support_eigenvalue: SUPPORT_EIGENVALUE,
            support_leak: SUPPORT_LEAK,
            unitarity: UNITARITY,
        }
    }
}

static CONFIGURED: std::sync::OnceLock<Tolerances> = std::sync::OnceLock::new();

/// Process-wide tolerance overrides, set at most once before any
/// computation starts (command-line front ends call this from their flag
/// handling). Everything reads the built-in defaults until then.
pub fn configure(tols: Tolerances) -> crate::Result<()> {
    tols.validate()?;
    CONFIGURED
        .set(tols)
        .map_err(|_| crate::Error::InvalidParameter("tolerances already configured".into()))
}

/// The active tolerance set: the configured overrides if any, otherwise the
/// defaults.
pub fn active() -> Tolerances {
    CONFIGURED.get().copied().unwrap_or_default()
}

impl Tolerances {
    pub fn validate(&self) -> crate::Result<()> {
        let entries = [
            ("hermiticity", self.hermiticity),
            ("trace_one", self.trace_one),
            ("psd_slack", self.psd_slack),
            ("support_eigenvalue", self.support_eigenvalue),
            ("support_leak", self.support_leak),
            ("unitarity", self.unitarity),
        ];
        for (name, value) in entries {
            if !value.is_finite() || value <= 0.0 {
                return Err(crate::Error::InvalidParameter(format!(
                    "tolerance {name} must be a positive finite number, got {value}"
                )));
            }
        }
        Ok(())
    }
}
