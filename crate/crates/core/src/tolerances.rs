//! Every threshold used by the verification suites and the acceptance
//! targets lives here. The CLI prints [`describe`] under `--help`.
//!
//! | Group | Basis |
//! |-------|-------|
//! | machine precision | exact stencil algebra and exact-transport updates |
//! | quadrature | Gauss–Legendre panels against 1D oracles |
//! | composed solvers | calibration runs of the cut-off decomposition |
//! | conventions | finite-horizon surrogates for sup-in-time bounds |

// Machine precision

/// Radial exact-transport scheme against the method-of-images oracle
/// (absolute, O(1) data amplitude).
pub const IMAGES_ABS: f64 = 1e-12;

/// Relative drift of the scheme-conserved discrete energy over a linear run.
pub const ENERGY_DRIFT_REL: f64 = 1e-10;

/// Discrete commutator `[Z, box_c]` residual on polynomial fields. Centered
/// differences commute with the 7-point Laplacian exactly; what remains
/// is rounding of O(1e2) magnitude values.
pub const COMMUTATOR_ABS: f64 = 1e-9;

/// Scale invariance of the Klainerman–Sobolev ratio.
pub const KS_SCALE_REL: f64 = 1e-10;

// Quadrature

/// Kirchhoff spherical means against the radial d'Alembert oracle
/// (relative sup error over the probe set).
pub const KIRCHHOFF_REL: f64 = 1e-6;

/// Successive Duhamel refinements must agree to this (relative to max(1, |value|)).
pub const DUHAMEL_AGREE: f64 = 1e-8;

/// Maximum number of Duhamel panel doublings.
pub const DUHAMEL_MAX_DOUBLINGS: u32 = 4;

// Composed solvers

/// Calibrated composed-solver tolerance for the cut-off decomposition at the
/// default resolution (dr = 0.01, 16 x 32 sphere nodes, 64 Duhamel nodes
/// per unit time, 24 probes with t <= 5 and r <= 5). Calibration: the
/// verify suite's sample data and source gave a largest probe residual of
/// 2.28e-7 (homogeneous) and 2.44e-7 (inhomogeneous). Both shrink at
/// roughly fourth order under refinement, since the exterior solves are
/// exact away from the diamond quadrature of their sources. The constant
/// is the larger value rounded up.
pub const DECOMPOSITION_TOL: f64 = 3e-7;

/// Acceptance multiplier on [`DECOMPOSITION_TOL`].
pub const DECOMPOSITION_FACTOR: f64 = 5.0;

/// Required observed refinement order for composed residuals.
pub const DECOMPOSITION_MIN_ORDER: f64 = 1.0;

/// Minimum observed order of the Q0 radial/tangential identity residual.
/// Both sides are second-order differences, so the observed order tends to
/// 2 from either side (1.99996 on the default study); an exact threshold
/// of 2 would turn that rounding of the asymptote into a failure.
pub const NULLFORM_MIN_ORDER: f64 = 1.9;

// Conventions

/// Blow-up gate: |u| above this (or non-finite) ends the run.
pub const BLOWUP_AMPLITUDE: f64 = 1e6;

/// Boundedness verdict: the running sup may grow by less than this fraction
/// over the second half of the window.
pub const BOUNDED_GROWTH: f64 = 0.10;

/// Local energies at or below this fraction of the initial total energy are
/// treated as underflow and excluded from decay fits.
pub const ENERGY_FLOOR_REL: f64 = 1e-24;

/// Minimum coefficient of determination for the local energy decay fit.
pub const LOCAL_DECAY_GOODNESS: f64 = 0.9;

/// Upper bound on the fitted exponent of |D+ u| / |du| along outgoing rays.
pub const DPLUS_EXPONENT_MAX: f64 = -0.8;

/// Minimum correlation of log T against 1/eps in lifespan sweeps.
pub const LIFESPAN_CORRELATION: f64 = 0.9;

/// Minimum number of blow-up points for a lifespan regression.
pub const LIFESPAN_MIN_POINTS: usize = 3;

/// Null-form runs must keep sup|u| below this multiple of eps.
pub const NULL_SUP_FACTOR: f64 = 10.0;

/// Empirical Klainerman–Sobolev constant: every member of the test family
/// must have sup<|x|>|phi| / sum ||Z^a phi|| at or below this value.
/// Calibration: over the ten truncated Gaussians of the default family
/// the largest ratio is 0.0231 (center radius 3, width 1); the bound
/// leaves roughly a factor of two.
pub const KS_RATIO_BOUND: f64 = 0.05;

/// Human-readable table for `--help`.
pub fn describe() -> String {
    let rows: [(&str, String); 20] = [
        ("IMAGES_ABS", format!("{IMAGES_ABS:e}")),
        ("ENERGY_DRIFT_REL", format!("{ENERGY_DRIFT_REL:e}")),
        ("COMMUTATOR_ABS", format!("{COMMUTATOR_ABS:e}")),
        ("KS_SCALE_REL", format!("{KS_SCALE_REL:e}")),
        ("KIRCHHOFF_REL", format!("{KIRCHHOFF_REL:e}")),
        ("DUHAMEL_AGREE", format!("{DUHAMEL_AGREE:e}")),
        ("DUHAMEL_MAX_DOUBLINGS", DUHAMEL_MAX_DOUBLINGS.to_string()),
        ("DECOMPOSITION_TOL", format!("{DECOMPOSITION_TOL:e}")),
        ("DECOMPOSITION_FACTOR", format!("{DECOMPOSITION_FACTOR}")),
        ("DECOMPOSITION_MIN_ORDER", format!("{DECOMPOSITION_MIN_ORDER}")),
        ("NULLFORM_MIN_ORDER", format!("{NULLFORM_MIN_ORDER}")),
        ("BLOWUP_AMPLITUDE", format!("{BLOWUP_AMPLITUDE:e}")),
        ("BOUNDED_GROWTH", format!("{BOUNDED_GROWTH}")),
        ("ENERGY_FLOOR_REL", format!("{ENERGY_FLOOR_REL:e}")),
        ("LOCAL_DECAY_GOODNESS", format!("{LOCAL_DECAY_GOODNESS}")),
        ("DPLUS_EXPONENT_MAX", format!("{DPLUS_EXPONENT_MAX}")),
        ("LIFESPAN_CORRELATION", format!("{LIFESPAN_CORRELATION}")),
        ("LIFESPAN_MIN_POINTS", LIFESPAN_MIN_POINTS.to_string()),
        ("NULL_SUP_FACTOR", format!("{NULL_SUP_FACTOR}")),
        ("KS_RATIO_BOUND", format!("{KS_RATIO_BOUND}")),
    ];
    let mut out = String::from("Tolerances:\n");
    for (name, value) in &rows {
        out.push_str(&format!("  {name:<24} {value}\n"));
    }
    out
}
