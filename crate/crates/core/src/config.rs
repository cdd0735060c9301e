//! The single tuning surface: every tolerance used by the pipelines lives here.

/// Tolerance bundle for fitting, enumeration, and recovery.
///
/// The defaults are tuned for noiseless double-precision data. For noisy runs
/// loosen the matching tolerances (`fit_residual`, `exponential_residual`,
/// `support_truncation`, `frequency_lattice`) to sit above the noise floor;
/// [`Tolerances::for_noise`] does this from a relative noise level.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Relative tolerance for trivial-equivalence and candidate matching.
    pub equivalence: f64,
    /// Relative threshold when reading a support length off fitted coefficients.
    pub support_truncation: f64,
    /// Relative magnitude below which a Fourier value counts as vanishing.
    pub vanishing_intensity: f64,
    /// Relative path-minimum required of the phase-chaining start point.
    pub path_minimum: f64,
    /// Required distance of q*mu/(2*pi) from the integers, q up to N-1.
    pub mu_margin: f64,
    /// |sin(alpha1 - alpha2)| below this is a degenerate rotation pair.
    pub rotation_pair: f64,
    /// Relative residual allowed when fitting trigonometric polynomials.
    pub fit_residual: f64,
    /// Relative coefficient discard threshold in exponential-sum recovery.
    pub coefficient_discard: f64,
    /// Relative residual allowed when reproducing exponential-sum samples.
    pub exponential_residual: f64,
    /// Relative coefficient mismatch allowed for enumerated representatives.
    pub intensity_match: f64,
    /// How close |root| must be to 1 to count as a unit-circle zero.
    pub unimodular: f64,
    /// Minimum distance between the two zero sets in the unknown-reference case.
    pub disjoint_zeros: f64,
    /// Angular tolerance when snapping recovered frequencies to the mu-lattice.
    pub frequency_lattice: f64,
    /// Relative magnitude a reference spectrum needs at a working node.
    pub reference_floor: f64,
    /// Maximum support length accepted by the ambiguity enumeration.
    pub enumeration_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            equivalence: 1e-6,
            support_truncation: 1e-8,
            vanishing_intensity: 1e-9,
            path_minimum: 1e-6,
            mu_margin: 1e-6,
            rotation_pair: 1e-8,
            fit_residual: 1e-6,
            coefficient_discard: 1e-8,
            exponential_residual: 1e-6,
            intensity_match: 1e-8,
            unimodular: 1e-6,
            disjoint_zeros: 1e-6,
            frequency_lattice: 1e-6,
            reference_floor: 1e-6,
            enumeration_cap: 22,
        }
    }
}

impl Tolerances {
    /// Defaults with the matching tolerances raised to sit above a relative
    /// noise level `sigma` on the measured magnitudes.
    pub fn for_noise(sigma: f64) -> Self {
        let mut t = Tolerances::default();
        if sigma > 0.0 {
            let floor = (sigma * 1e3).max(1e-8);
            t.fit_residual = t.fit_residual.max(floor);
            t.exponential_residual = t.exponential_residual.max(floor);
            t.support_truncation = t.support_truncation.max(floor);
            t.frequency_lattice = t.frequency_lattice.max((sigma * 1e4).min(1e-2));
            t.equivalence = t.equivalence.max(floor);
            t.intensity_match = t.intensity_match.max(floor);
        }
        t
    }

    /// Defaults, with the matching tolerances overridden by the
    /// `INTERFERO_TOL` environment variable when it is set to a float.
    pub fn from_env() -> Self {
        let mut t = Tolerances::default();
        if let Ok(raw) = std::env::var("INTERFERO_TOL") {
            if let Ok(v) = raw.trim().parse::<f64>() {
                if v.is_finite() && v > 0.0 {
                    t.equivalence = v;
                    t.fit_residual = v;
                    t.exponential_residual = v;
                    t.intensity_match = v;
                    t.frequency_lattice = v;
                }
            }
        }
        t
    }
}
