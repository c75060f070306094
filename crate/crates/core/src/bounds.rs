//! Fisher information of the phase law itself.
//!
//! Any probe only sees the signal through the random phase it imprints, so
//! the Fisher information of that Gaussian phase law upper-bounds every
//! probe's quantum Fisher information. The bound is available three ways:
//! the generic Gaussian formula, direct quadrature of the score, and the
//! protocol-specific closed forms.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::phase_model::{
    one_minus_cos, phase_distribution, PhaseDistribution, Protocol, SignalSpec, Theta,
    ZERO_INFORMATION_RTOL,
};
use crate::quadrature::GaussLegendre;

/// Node count of the default Gauss–Legendre rule used by [`quadrature_fisher`].
pub const QUADRATURE_NODES: usize = 2000;
/// Half-width of the quadrature window in units of the phase standard deviation.
pub const QUADRATURE_HALF_WIDTH: f64 = 10.0;
/// Below this ω_r t the separation bound is flagged as near its divergence.
pub const SMALL_SEPARATION: f64 = 0.1;

/// How a Fisher information value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    ClosedForm,
    Quadrature,
    Sld,
    FidelityFd,
    MonteCarlo,
    /// Classical Fisher information of a fixed measurement.
    ClassicalFisher,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::Quadrature => "quadrature",
            Method::Sld => "sld",
            Method::FidelityFd => "fidelity_fd",
            Method::MonteCarlo => "monte_carlo",
            Method::ClassicalFisher => "classical_fisher",
        }
    }
}

/// A Fisher information value with the numerical settings that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QfiReport {
    pub value: f64,
    pub method: Method,
    pub parameter: Option<Theta>,
    /// Step sizes, node counts, floors and residuals, keyed by name.
    pub diagnostics: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl QfiReport {
    pub fn new(value: f64, method: Method, parameter: Option<Theta>) -> Self {
        Self {
            value,
            method,
            parameter,
            diagnostics: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn with_diagnostic(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_owned(), value);
        self
    }

    pub fn diagnostic(&self, key: &str) -> Option<f64> {
        self.diagnostics.get(key).copied()
    }

    /// Relative deviation |value/reference − 1|.
    pub fn relative_to(&self, reference: f64) -> f64 {
        (self.value / reference - 1.0).abs()
    }
}

fn zero_information(what: &str) -> Error {
    Error::ZeroInformation(format!("{what}: the phase variance vanishes"))
}

/// (v′)²/(2v²), the Fisher information of a zero-mean Gaussian in its variance parameter.
pub fn gaussian_fisher(dist: &PhaseDistribution) -> Result<QfiReport> {
    if dist.is_zero_information() {
        return Err(zero_information("gaussian_fisher"));
    }
    let ratio = dist.dvariance_dtheta() / dist.variance();
    Ok(QfiReport::new(0.5 * ratio * ratio, Method::ClosedForm, Some(dist.theta())))
}

/// ∫ P(φ)(∂_θ log P)² dφ over ±10√v with the default 2000-node rule.
pub fn quadrature_fisher(dist: &PhaseDistribution) -> Result<QfiReport> {
    quadrature_fisher_with(dist, QUADRATURE_NODES)
}

pub fn quadrature_fisher_with(dist: &PhaseDistribution, nodes: usize) -> Result<QfiReport> {
    if dist.is_zero_information() {
        return Err(zero_information("quadrature_fisher"));
    }
    if nodes == 0 {
        return Err(invalid("nodes", "must be positive"));
    }
    let half = QUADRATURE_HALF_WIDTH * dist.variance().sqrt();
    let rule = GaussLegendre::cached(nodes);
    let value = rule.integrate(-half, half, |phi| {
        let s = dist.score(phi);
        dist.density(phi) * s * s
    });
    Ok(QfiReport::new(value, Method::Quadrature, Some(dist.theta()))
        .with_diagnostic("nodes", nodes as f64)
        .with_diagnostic("half_width", half))
}

/// Fisher information of the phase law for `spec` under `protocol`.
pub fn environment_bound(
    spec: &SignalSpec,
    protocol: Protocol,
    t: f64,
    theta: Theta,
) -> Result<QfiReport> {
    gaussian_fisher(&phase_distribution(spec, protocol, t, theta)?)
}

fn check_nonnegative(name: &'static str, value: f64) -> Result<()> {
    ensure_finite(name, value)?;
    if value < 0.0 {
        return Err(invalid(name, "must be non-negative"));
    }
    Ok(())
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    ensure_finite(name, value)?;
    if value <= 0.0 {
        return Err(invalid(name, "must be positive"));
    }
    Ok(())
}

/// Single-frequency bound
/// 2√2 sin⁵(ωt/2)(ωt sin ωt + 2cos ωt − 2)² / (ω²(1 − cos ωt)^{9/2}),
/// evaluated in the equivalent form (ωt sin ωt + 2cos ωt − 2)²/(2ω²(1 − cos ωt)²).
/// `sigma` is validated but cancels.
pub fn bound_single_freq(omega: f64, t: f64, sigma: f64) -> Result<QfiReport> {
    check_positive("omega", omega)?;
    check_nonnegative("t", t)?;
    check_nonnegative("sigma", sigma)?;
    let x = omega * t;
    let omc = one_minus_cos(x);
    if omc <= 0.5 * ZERO_INFORMATION_RTOL * x * x || x == 0.0 {
        return Err(zero_information("bound_single_freq"));
    }
    let num = x * x.sin() - 2.0 * omc;
    let value = num * num / (2.0 * omega * omega * omc * omc);
    Ok(QfiReport::new(value, Method::ClosedForm, Some(Theta::Omega))
        .with_diagnostic("asymptote", omega * omega * t.powi(4) / 72.0)
        .with_diagnostic("omega_t", x))
}

/// Centroid bound
/// (cos ω_r t (ω_s t sin ω_s t + 2cos ω_s t) − 2)² / (2ω_s²(cos ω_r t cos ω_s t − 1)²).
/// Accepts ω_r = 0, where it coincides with [`bound_single_freq`] at ω_s.
pub fn bound_centroid(omega_s: f64, omega_r: f64, t: f64, sigma: f64) -> Result<QfiReport> {
    check_positive("omega_s", omega_s)?;
    check_nonnegative("omega_r", omega_r)?;
    check_nonnegative("t", t)?;
    check_nonnegative("sigma", sigma)?;
    let (xs, xr) = (omega_s * t, omega_r * t);
    let (ar, as_) = (one_minus_cos(xr), one_minus_cos(xs));
    let k = ar + as_ - ar * as_;
    if k <= 0.5 * ZERO_INFORMATION_RTOL * xs * xs || xs == 0.0 {
        return Err(zero_information("bound_centroid"));
    }
    let num = xr.cos() * xs * xs.sin() - 2.0 * k;
    let value = num * num / (2.0 * omega_s * omega_s * k * k);
    Ok(QfiReport::new(value, Method::ClosedForm, Some(Theta::OmegaS))
        .with_diagnostic("asymptote", omega_s * omega_s * t.powi(4) / 72.0)
        .with_diagnostic("omega_s_t", xs)
        .with_diagnostic("omega_r_t", xr))
}

/// Separation bound t²/(2 tan²(ω_r t/2)), valid for 0 < ω_r t < 2π.
/// Independent of σ. Near ω_r t = 0 the value grows like 2/ω_r²; a warning
/// is attached below [`SMALL_SEPARATION`].
pub fn bound_separation(omega_r: f64, t: f64) -> Result<QfiReport> {
    check_positive("omega_r", omega_r)?;
    check_positive("t", t)?;
    let x = omega_r * t;
    if x >= 2.0 * PI {
        return Err(Error::OutOfRange(format!("omega_r·t = {x} must lie in (0, 2π)")));
    }
    let (s, c) = (0.5 * x).sin_cos();
    let value = t * t * c * c / (2.0 * s * s);
    let mut report = QfiReport::new(value, Method::ClosedForm, Some(Theta::OmegaR))
        .with_diagnostic("asymptote", 2.0 / (omega_r * omega_r))
        .with_diagnostic("omega_r_t", x);
    if x < SMALL_SEPARATION {
        report
            .warnings
            .push(format!("small-separation divergence: omega_r·t = {x:.3e}, bound ≈ 2/omega_r²"));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_model::{CentroidBranch, SeparationBranch};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn prefactor_cancels() {
        let a = PhaseDistribution::new(2.0, 0.6, Theta::Omega).unwrap();
        let b = PhaseDistribution::new(2.0e3, 0.6e3, Theta::Omega).unwrap();
        assert!(rel(gaussian_fisher(&a).unwrap().value, gaussian_fisher(&b).unwrap().value) < 1e-15);
    }

    #[test]
    fn single_small_time_asymptote() {
        let spec = SignalSpec::single(1.0, 1.0).unwrap();
        let dist = phase_distribution(&spec, Protocol::Free, 0.01, Theta::Omega).unwrap();
        let f = gaussian_fisher(&dist).unwrap();
        assert!(f.relative_to(1e-8 / 72.0) < 1e-3);
    }

    #[test]
    fn single_bound_at_half_period() {
        for omega in [0.5, 1.0, 3.0] {
            let b = bound_single_freq(omega, PI / omega, 1.0).unwrap();
            assert!(rel(b.value, 2.0 / (omega * omega)) < 1e-12);
        }
    }

    #[test]
    fn literal_single_bound_agrees_where_defined() {
        for x in [0.1f64, 0.7, 2.0, 3.0, 5.5] {
            let omega = 1.3;
            let t = x / omega;
            let h = (0.5 * x).sin();
            let literal = 2.0 * 2f64.sqrt() * h.powi(5) * (x * x.sin() + 2.0 * x.cos() - 2.0).powi(2)
                / (omega * omega * (1.0 - x.cos()).powf(4.5));
            let b = bound_single_freq(omega, t, 1.0).unwrap().value;
            assert!(rel(b, literal) < 1e-9, "x={x}");
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn single_bound_zero_information_at_full_period() {
        assert!(matches!(bound_single_freq(1.0, 2.0 * PI, 1.0), Err(Error::ZeroInformation(_))));
        assert!(matches!(bound_single_freq(1.0, 6.2832, 1.0), Err(Error::ZeroInformation(_))));
        assert!(matches!(bound_single_freq(1.0, 0.0, 1.0), Err(Error::ZeroInformation(_))));
    }

    #[test]
    fn centroid_reduces_to_single_at_zero_separation() {
        for t in [0.05, 0.7, 2.0] {
            let c = bound_centroid(1.0, 0.0, t, 1.0).unwrap().value;
            let s = bound_single_freq(1.0, t, 1.0).unwrap().value;
            assert!(rel(c, s) < 1e-12);
        }
    }

    #[test]
    fn separation_bound_properties() {
        let b = bound_separation(0.01, 1.0).unwrap();
        assert!((b.value * 1e-4 / 2.0 - 1.0).abs() < 3e-3);
        assert!(!b.warnings.is_empty());
        assert!(bound_separation(1.0, PI).unwrap().value < 1e-30);
        assert!(matches!(bound_separation(1.0, 7.0), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn separation_bound_sigma_invariance_and_branch_limit() {
        let t = 0.7;
        let want = bound_separation(0.7, t).unwrap().value;
        for sigma in [0.1, 1.0, 10.0] {
            let spec = SignalSpec::from_centroid(5.0, 0.7, sigma).unwrap();
            let got = environment_bound(&spec, Protocol::SeparationControlled(SeparationBranch::FirstOrder), t, Theta::OmegaR).unwrap();
            assert!(rel(got.value, want) < 1e-12);
        }
        // The exact branch agrees only as ω_r t → 0.
        let spec = SignalSpec::from_centroid(5.0, 1e-4, 1.0).unwrap();
        let exact = environment_bound(&spec, Protocol::SeparationControlled(SeparationBranch::Exact), t, Theta::OmegaR).unwrap();
        assert!(rel(exact.value, bound_separation(1e-4, t).unwrap().value) < 1e-6);
    }

    #[test]
    fn quadrature_converges_and_odd_moment_vanishes() {
        let spec = SignalSpec::single(1.0, 0.8).unwrap();
        let dist = phase_distribution(&spec, Protocol::Free, 0.9, Theta::Omega).unwrap();
        let a = quadrature_fisher_with(&dist, 2000).unwrap().value;
        let b = quadrature_fisher_with(&dist, 4000).unwrap().value;
        assert!(rel(a, b) < 1e-9);
        let half = 10.0 * dist.variance().sqrt();
        let odd = GaussLegendre::cached(2000).integrate(-half, half, |p| dist.density(p) * dist.score(p) * p);
        assert!(odd.abs() < 1e-12);
    }

    #[test]
    fn free_separation_matches_its_gaussian_form() {
        let spec = SignalSpec::from_centroid(6.0, 0.3, 1.0).unwrap();
        let t = 0.7;
        let x: f64 = 0.3 * t;
        let got = environment_bound(&spec, Protocol::SeparationFree, t, Theta::OmegaR).unwrap().value;
        assert!(rel(got, 2.0 * t * t / x.tan().powi(2)) < 1e-12);
    }

    proptest! {
        #[test]
        fn closed_forms_equal_gaussian_fisher(omega in 0.05f64..5.0, t in 0.01f64..3.0, sigma in 0.01f64..5.0) {
            prop_assume!(one_minus_cos(omega * t) > 1e-6);
            let spec = SignalSpec::single(omega, sigma).unwrap();
            let g = environment_bound(&spec, Protocol::Free, t, Theta::Omega).unwrap().value;
            let c = bound_single_freq(omega, t, sigma).unwrap().value;
            prop_assert!(rel(g, c) < 1e-12 || (g - c).abs() < 1e-300);
        }

        #[test]
        fn centroid_closed_form_equals_gaussian_fisher(ws in 1.0f64..5.0, frac in 0.01f64..0.9, t in 0.01f64..2.0) {
            let wr = frac * ws;
            let spec = SignalSpec::from_centroid(ws, wr, 1.0).unwrap();
            let dist = phase_distribution(&spec, Protocol::CentroidFree(CentroidBranch::Approximate), t, Theta::OmegaS).unwrap();
            prop_assume!(!dist.is_zero_information());
            let g = gaussian_fisher(&dist).unwrap().value;
            let c = bound_centroid(ws, wr, t, 1.0).unwrap().value;
            prop_assert!(rel(g, c) < 1e-12 || g < 1e-200);
        }

        #[test]
        fn bounds_are_nonnegative(omega in 0.01f64..10.0, t in 0.01f64..6.0) {
            if let Ok(b) = bound_single_freq(omega, t, 1.0) {
                prop_assert!(b.value >= 0.0 && b.value.is_finite());
            }
            if omega * t < 2.0 * PI {
                let b = bound_separation(omega, t).unwrap();
                prop_assert!(b.value >= 0.0 && b.value.is_finite());
            }
        }
    }
}
