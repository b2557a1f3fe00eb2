use super::multipliers::MultiplierData;
use super::profile::CoefficientProfile;
use super::rho::RhoData;

const RELAXED_SIGN_SAMPLES: usize = 20001;

/// Scalar forms of g + r2(0) f >= 0 and g + (a(0) - rho'(0)) f >= 0 for data sharing one shape.
pub fn check_data_conditions(
    f0: f64,
    g0: f64,
    multipliers: &MultiplierData,
    rho: &RhoData,
    a0: f64,
) -> (bool, bool) {
    data_conditions_scalar(f0, g0, multipliers.r2_at_0, rho.drho_at_0, a0)
}

pub fn data_conditions_scalar(f0: f64, g0: f64, r2_at_0: f64, drho_at_0: f64, a0: f64) -> (bool, bool) {
    (g0 + r2_at_0 * f0 >= 0.0, g0 + (a0 - drho_at_0) * f0 >= 0.0)
}

/// Whether a'/2 + a^2/4 - b < 0 throughout the trailing half of [0, horizon].
pub fn check_relaxed_sign(profile: &CoefficientProfile, horizon: f64) -> bool {
    let lo = 0.5 * horizon;
    let dt = (horizon - lo) / (RELAXED_SIGN_SAMPLES - 1) as f64;
    (0..RELAXED_SIGN_SAMPLES).all(|i| {
        let t = lo + i as f64 * dt;
        let a = profile.a(t);
        0.5 * profile.da(t) + 0.25 * a * a - profile.b(t) < 0.0
    })
}
