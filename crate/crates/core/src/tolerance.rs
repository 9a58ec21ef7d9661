/// Numerical thresholds shared by every decision in the crate.
///
/// All thresholds are relative. They are multiplied by the largest absolute
/// entry of the matrix at hand (raised to the polynomial degree for
/// determinants) before use, so instances with large integer entries behave
/// like their rescaled counterparts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Gram eigenvalue threshold for PSD and rank decisions.
    pub eig: f64,
    /// Cayley-Menger sign/vanishing threshold.
    pub cm: f64,
    /// Realization residual bound on `|‖p_i − p_j‖² − m_ij|`.
    pub real: f64,
    /// Atom slack for the numerical existential backend.
    pub atom: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eig: 1e-9,
            cm: 1e-9,
            real: 1e-7,
            atom: 1e-8,
        }
    }
}

impl Tolerances {
    /// Absolute eigenvalue threshold for a matrix whose largest entry is `scale`.
    pub fn eig_abs(&self, scale: f64) -> f64 {
        self.eig * unit_scale(scale)
    }

    /// Absolute residual bound for a matrix whose largest entry is `scale`.
    pub fn real_abs(&self, scale: f64) -> f64 {
        self.real * unit_scale(scale)
    }

    /// Absolute Cayley-Menger threshold for a determinant on `points` points.
    pub fn cm_abs(&self, scale: f64, points: usize) -> f64 {
        self.cm * libm::pow(unit_scale(scale), points.saturating_sub(1) as f64)
    }
}

/// Scale used to normalise thresholds; an all-zero matrix behaves like scale 1.
pub fn unit_scale(scale: f64) -> f64 {
    if scale > 0.0 && scale.is_finite() {
        scale
    } else {
        1.0
    }
}
