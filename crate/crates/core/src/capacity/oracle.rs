//! Capacity by direct quadrature of `(1/k) E[ln(λ/μ); λ > μ]`, sharing no
//! code with the Meijer-G closed forms.

use super::constraint::solve_threshold_quadrature;
use super::{check_positive, CapacityError, CapacityPoint, DetectionScheme, Method};
use crate::channel::{gg_scale, ln_pdf_gg, ChannelModel};
use crate::numerics::{integrate_semi_infinite_scaled, ToleranceSpec};

/// Oracle capacity: `μ` from the quadrature constraint, then the capacity
/// integral by quadrature to 1e-12 relative.
pub fn capacity_oracle(model: &ChannelModel, scheme: DetectionScheme, snr: f64) -> Result<CapacityPoint, CapacityError> {
    check_positive("snr", snr)?;
    scheme.check_validity(snr)?;
    let mu = solve_threshold_quadrature(model, snr)?;
    let c = capacity_integral_quadrature(model, mu, ToleranceSpec::relative(1e-12))?;
    Ok(CapacityPoint {
        snr,
        threshold: mu,
        capacity: c / scheme.k(),
        method: Method::Oracle,
        scheme,
    })
}

/// `E[ln(λ/μ); λ > μ]` (nats, no `1/k`). The pointing loss
/// `I_p = A₀U^{1/ξ²}` is integrated analytically: with `y = A₀I_a/μ`,
/// `E[ln(λ/μ)⁺ | I_a] = ln y - (1 - y^{-ξ²})/ξ²` for `y > 1`.
pub fn capacity_integral_quadrature(model: &ChannelModel, mu: f64, tol: ToleranceSpec) -> Result<f64, CapacityError> {
    check_positive("mu", mu)?;
    let (a, b) = (model.a(), model.b());
    let lower = mu / model.peak_gain();
    let xi2 = model.xi().map(|x| x * x);
    let integrand = |x: f64| -> f64 {
        let f = match ln_pdf_gg(x, a, b) {
            Ok(l) => l.exp(),
            Err(_) => return f64::NAN,
        };
        let l = (x / lower).ln();
        let conditional = match xi2 {
            Some(xi2) => l + (-xi2 * l).exp_m1() / xi2,
            None => l,
        };
        conditional * f
    };
    let r = integrate_semi_infinite_scaled(integrand, lower, gg_scale(lower, a, b), tol)?;
    Ok(r.value)
}
