//! Accumulated phase of a probe driven by a stochastic AC field.
//!
//! A field `[A cos(ωt) + B sin(ωt)] σ_z` with Gaussian amplitudes imprints a
//! phase that is linear in the amplitudes, so the phase itself is a zero-mean
//! Gaussian. This module provides the exact phase for one amplitude draw and
//! the variance law (with its parameter derivative) over draws.

mod pulse;

pub use pulse::{
    phase_pulse_bi, phase_pulse_effective, phase_pulse_exact, separation_phase, tone_pulse_phase,
    toggled_phase_quadrature, ControlSpec, Detuning,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};

/// Relative threshold on `variance / variance_scale` below which a phase law
/// is treated as carrying no information (e.g. ωt on a multiple of 2π).
pub const ZERO_INFORMATION_RTOL: f64 = 1e-10;

/// Parameter being estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Theta {
    /// Frequency of a single-tone signal.
    Omega,
    /// Centroid (ω₁ + ω₂)/2 of a two-tone signal.
    OmegaS,
    /// Half-separation (ω₁ − ω₂)/2 of a two-tone signal.
    OmegaR,
}

impl Theta {
    pub fn name(self) -> &'static str {
        match self {
            Theta::Omega => "omega",
            Theta::OmegaS => "omega_s",
            Theta::OmegaR => "omega_r",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignalKind {
    SingleFreq,
    BiFreq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
enum Frequencies {
    Single { omega: f64 },
    /// Centroid and half-separation: ω₁ = ω_s + ω_r, ω₂ = ω_s − ω_r.
    Bi { omega_s: f64, omega_r: f64 },
}

/// Frequencies and amplitude-noise strength of a stochastic AC field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    frequencies: Frequencies,
    sigma: f64,
}

impl SignalSpec {
    pub fn single(omega: f64, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        check_positive("omega", omega)?;
        Ok(Self {
            frequencies: Frequencies::Single { omega },
            sigma,
        })
    }

    /// Two tones with ω₁ > ω₂ > 0.
    pub fn bi(omega1: f64, omega2: f64, sigma: f64) -> Result<Self> {
        ensure_finite("omega1", omega1)?;
        ensure_finite("omega2", omega2)?;
        if omega1 <= omega2 {
            return Err(invalid("omega1", "must exceed omega2"));
        }
        Self::from_centroid(0.5 * (omega1 + omega2), 0.5 * (omega1 - omega2), sigma)
    }

    pub fn from_centroid(omega_s: f64, omega_r: f64, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        check_positive("omega_r", omega_r)?;
        check_positive("omega_s", omega_s)?;
        if omega_s - omega_r <= 0.0 {
            return Err(invalid("omega_r", "must be smaller than omega_s so that omega2 > 0"));
        }
        Ok(Self {
            frequencies: Frequencies::Bi { omega_s, omega_r },
            sigma,
        })
    }

    pub fn kind(&self) -> SignalKind {
        match self.frequencies {
            Frequencies::Single { .. } => SignalKind::SingleFreq,
            Frequencies::Bi { .. } => SignalKind::BiFreq,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Single-tone frequency; for a two-tone signal this is the centroid.
    pub fn omega(&self) -> f64 {
        match self.frequencies {
            Frequencies::Single { omega } => omega,
            Frequencies::Bi { omega_s, .. } => omega_s,
        }
    }

    pub fn omega_s(&self) -> f64 {
        self.omega()
    }

    /// Half-separation; zero for a single tone.
    pub fn omega_r(&self) -> f64 {
        match self.frequencies {
            Frequencies::Single { .. } => 0.0,
            Frequencies::Bi { omega_r, .. } => omega_r,
        }
    }

    pub fn omega1(&self) -> f64 {
        self.omega_s() + self.omega_r()
    }

    pub fn omega2(&self) -> f64 {
        self.omega_s() - self.omega_r()
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self { sigma, ..*self })
    }

    /// Copy of this spec with the estimated parameter set to `value`; the
    /// other frequency coordinate is held fixed.
    pub fn with_parameter(&self, theta: Theta, value: f64) -> Result<Self> {
        match (self.frequencies, theta) {
            (Frequencies::Single { .. }, Theta::Omega) => Self::single(value, self.sigma),
            (Frequencies::Bi { omega_r, .. }, Theta::OmegaS) => {
                Self::from_centroid(value, omega_r, self.sigma)
            }
            (Frequencies::Bi { omega_s, .. }, Theta::OmegaR) => {
                Self::from_centroid(omega_s, value, self.sigma)
            }
            _ => Err(invalid("theta", format!("{} does not apply to a {:?} signal", theta.name(), self.kind()))),
        }
    }

    pub fn parameter(&self, theta: Theta) -> Result<f64> {
        match (self.kind(), theta) {
            (SignalKind::SingleFreq, Theta::Omega) => Ok(self.omega()),
            (SignalKind::BiFreq, Theta::OmegaS) => Ok(self.omega_s()),
            (SignalKind::BiFreq, Theta::OmegaR) => Ok(self.omega_r()),
            _ => Err(invalid("theta", format!("{} does not apply to a {:?} signal", theta.name(), self.kind()))),
        }
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    ensure_finite("sigma", sigma)?;
    if sigma < 0.0 {
        return Err(invalid("sigma", "must be non-negative"));
    }
    Ok(())
}

fn check_positive(name: &'static str, value: f64) -> Result<()> {
    ensure_finite(name, value)?;
    if value <= 0.0 {
        return Err(invalid(name, format!("must be positive, got {value}")));
    }
    Ok(())
}

/// One realisation of the Gaussian amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AmplitudeDraw {
    Single { a: f64, b: f64 },
    Bi { a1: f64, b1: f64, a2: f64, b2: f64 },
}

impl AmplitudeDraw {
    fn expect_single(&self) -> Result<(f64, f64)> {
        match *self {
            AmplitudeDraw::Single { a, b } => Ok((a, b)),
            AmplitudeDraw::Bi { .. } => Err(invalid("draw", "single-tone signal needs one (A, B) pair")),
        }
    }

    fn expect_bi(&self) -> Result<(f64, f64, f64, f64)> {
        match *self {
            AmplitudeDraw::Bi { a1, b1, a2, b2 } => Ok((a1, b1, a2, b2)),
            AmplitudeDraw::Single { .. } => Err(invalid("draw", "two-tone signal needs two (A, B) pairs")),
        }
    }

    /// Exchanges the roles of the cosine and sine amplitudes.
    pub fn swapped(&self) -> Self {
        match *self {
            AmplitudeDraw::Single { a, b } => AmplitudeDraw::Single { a: b, b: a },
            AmplitudeDraw::Bi { a1, b1, a2, b2 } => AmplitudeDraw::Bi {
                a1: b1,
                b1: a1,
                a2: b2,
                b2: a2,
            },
        }
    }
}

/// ∫₀ᵗ [A cos(ωt′) + B sin(ωt′)] dt′.
fn tone_phase(omega: f64, a: f64, b: f64, t: f64) -> f64 {
    let x = omega * t;
    (a * x.sin() + b * one_minus_cos(x)) / omega
}

/// 1 − cos x without cancellation near x = 0.
pub(crate) fn one_minus_cos(x: f64) -> f64 {
    let s = (0.5 * x).sin();
    2.0 * s * s
}

/// Phase from a single-tone field with no control.
pub fn phase_exact_single(spec: &SignalSpec, draw: &AmplitudeDraw, t: f64) -> Result<f64> {
    if spec.kind() != SignalKind::SingleFreq {
        return Err(invalid("spec", "phase_exact_single needs a single-tone signal"));
    }
    check_time(t)?;
    let (a, b) = draw.expect_single()?;
    Ok(tone_phase(spec.omega(), a, b, t))
}

/// Phase from a two-tone field with no control: the sum of both tones.
pub fn phase_exact_bi_free(spec: &SignalSpec, draw: &AmplitudeDraw, t: f64) -> Result<f64> {
    if spec.kind() != SignalKind::BiFreq {
        return Err(invalid("spec", "phase_exact_bi_free needs a two-tone signal"));
    }
    check_time(t)?;
    let (a1, b1, a2, b2) = draw.expect_bi()?;
    Ok(tone_phase(spec.omega1(), a1, b1, t) + tone_phase(spec.omega2(), a2, b2, t))
}

/// Two-tone free phase with both denominators replaced by ω_s, the small
/// separation form whose variance is the approximate centroid law.
pub fn phase_bi_free_common_denominator(
    spec: &SignalSpec,
    draw: &AmplitudeDraw,
    t: f64,
) -> Result<f64> {
    if spec.kind() != SignalKind::BiFreq {
        return Err(invalid("spec", "needs a two-tone signal"));
    }
    check_time(t)?;
    let (a1, b1, a2, b2) = draw.expect_bi()?;
    let (x1, x2) = (spec.omega1() * t, spec.omega2() * t);
    Ok((a1 * x1.sin() + b1 * one_minus_cos(x1) + a2 * x2.sin() + b2 * one_minus_cos(x2)) / spec.omega_s())
}

/// Uncontrolled two-tone phase at ω_s t = 2πn, keeping only the leading
/// separation term: (A₁ − A₂) sin(ω_r t)/ω_s.
pub fn phase_separation_free(spec: &SignalSpec, draw: &AmplitudeDraw, t: f64) -> Result<f64> {
    if spec.kind() != SignalKind::BiFreq {
        return Err(invalid("spec", "needs a two-tone signal"));
    }
    check_time(t)?;
    let (a1, _, a2, _) = draw.expect_bi()?;
    Ok((a1 - a2) * (spec.omega_r() * t).sin() / spec.omega_s())
}

fn check_time(t: f64) -> Result<()> {
    ensure_finite("t", t)?;
    if t < 0.0 {
        return Err(invalid("t", "must be non-negative"));
    }
    Ok(())
}

/// Which variance law to use for the uncontrolled two-tone centroid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum CentroidBranch {
    /// 2σ²[(1 − cos ω₁t)/ω₁² + (1 − cos ω₂t)/ω₂²].
    Exact,
    /// (4σ²/ω_s²)(1 − cos ω_r t · cos ω_s t).
    #[default]
    Approximate,
}

/// Which variance law to use for the pulse-controlled separation protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SeparationBranch {
    /// Full effective-Hamiltonian phase with δ_s t = 2π.
    Exact,
    /// First order in δ_r/δ_s: 8σ²t² sin²(ω_r t/2)/π⁴.
    #[default]
    FirstOrder,
    /// Only the (A₂ − A₁) t sin(ω_r t)/π² term: 2σ²t² sin²(ω_r t)/π⁴.
    Leading,
}

/// Measurement protocol that determines how the phase depends on the signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Protocol {
    /// Single tone, free evolution.
    Free,
    /// Two tones, free evolution.
    CentroidFree(CentroidBranch),
    /// Two tones under a π-pulse train at ω_s + δ_s with δ_s t = 2π.
    SeparationControlled(SeparationBranch),
    /// Two tones, free evolution at ω_s t = 2πn, leading separation term only.
    SeparationFree,
}

impl Protocol {
    pub fn signal_kind(self) -> SignalKind {
        match self {
            Protocol::Free => SignalKind::SingleFreq,
            _ => SignalKind::BiFreq,
        }
    }

    fn accepts(self, theta: Theta) -> bool {
        matches!(
            (self, theta),
            (Protocol::Free, Theta::Omega)
                | (Protocol::CentroidFree(_), Theta::OmegaS | Theta::OmegaR)
                | (Protocol::SeparationControlled(_), Theta::OmegaR)
                | (Protocol::SeparationFree, Theta::OmegaR)
        )
    }
}

/// Zero-mean Gaussian law of the accumulated phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseDistribution {
    variance: f64,
    dvariance: f64,
    theta: Theta,
    /// Natural magnitude of the variance for these inputs; the reference for
    /// deciding that the variance has cancelled to zero.
    scale: f64,
}

impl PhaseDistribution {
    pub fn new(variance: f64, dvariance_dtheta: f64, theta: Theta) -> Result<Self> {
        ensure_finite("variance", variance)?;
        ensure_finite("dvariance_dtheta", dvariance_dtheta)?;
        if variance < 0.0 {
            return Err(invalid("variance", "must be non-negative"));
        }
        Ok(Self {
            variance,
            dvariance: dvariance_dtheta,
            theta,
            scale: variance,
        })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn dvariance_dtheta(&self) -> f64 {
        self.dvariance
    }

    pub fn theta(&self) -> Theta {
        self.theta
    }

    /// True when the variance vanishes (no evolution, no noise, or an exact
    /// cancellation such as ωt = 2πk).
    pub fn is_zero_information(&self) -> bool {
        self.variance == 0.0 || self.variance <= ZERO_INFORMATION_RTOL * self.scale
    }

    /// Gaussian density of the phase and ∂_θ of its logarithm.
    pub fn density(&self, phi: f64) -> f64 {
        let v = self.variance;
        (-0.5 * phi * phi / v).exp() / (2.0 * PI * v).sqrt()
    }

    pub fn score(&self, phi: f64) -> f64 {
        let v = self.variance;
        0.5 * self.dvariance / v * (phi * phi / v - 1.0)
    }
}

/// Variance of the accumulated phase and its derivative with respect to `theta`.
pub fn phase_distribution(
    spec: &SignalSpec,
    protocol: Protocol,
    t: f64,
    theta: Theta,
) -> Result<PhaseDistribution> {
    check_time(t)?;
    if spec.kind() != protocol.signal_kind() {
        return Err(invalid("protocol", format!("{protocol:?} does not match a {:?} signal", spec.kind())));
    }
    if !protocol.accepts(theta) {
        return Err(invalid("theta", format!("{} is not estimable under {protocol:?}", theta.name())));
    }
    let s2 = spec.sigma() * spec.sigma();
    let (variance, dvariance, scale) = match protocol {
        Protocol::Free => {
            let (g, dg) = free_kernel(spec.omega(), t);
            (2.0 * s2 * g, 2.0 * s2 * dg, s2 * t * t)
        }
        Protocol::CentroidFree(CentroidBranch::Exact) => {
            let (g1, dg1) = free_kernel(spec.omega1(), t);
            let (g2, dg2) = free_kernel(spec.omega2(), t);
            let dv = match theta {
                Theta::OmegaS => dg1 + dg2,
                _ => dg1 - dg2,
            };
            (2.0 * s2 * (g1 + g2), 2.0 * s2 * dv, 2.0 * s2 * t * t)
        }
        Protocol::CentroidFree(CentroidBranch::Approximate) => {
            centroid_approx(spec.omega_s(), spec.omega_r(), t, spec.sigma(), theta)
        }
        Protocol::SeparationControlled(branch) => {
            let (v, dv) = separation_controlled(spec.omega_r(), t, spec.sigma(), branch)?;
            (v, dv, 8.0 * s2 * t * t / PI.powi(4))
        }
        Protocol::SeparationFree => {
            let x = spec.omega_r() * t;
            let ws2 = spec.omega_s() * spec.omega_s();
            let v = 2.0 * s2 * x.sin().powi(2) / ws2;
            let dv = 2.0 * s2 * t * (2.0 * x).sin() / ws2;
            (v, dv, 2.0 * s2 / ws2)
        }
    };
    Ok(PhaseDistribution {
        variance: variance.max(0.0),
        dvariance,
        theta,
        scale,
    })
}

/// (1 − cos ωt)/ω² and its ω-derivative.
fn free_kernel(omega: f64, t: f64) -> (f64, f64) {
    let x = omega * t;
    let omc = one_minus_cos(x);
    let g = omc / (omega * omega);
    let dg = (x * x.sin() - 2.0 * omc) / omega.powi(3);
    (g, dg)
}

/// Approximate centroid variance (4σ²/ω_s²)(1 − cos ω_r t cos ω_s t).
/// Valid for ω_r ≥ 0, including the coincident-tone limit ω_r = 0.
pub(crate) fn centroid_approx(
    omega_s: f64,
    omega_r: f64,
    t: f64,
    sigma: f64,
    theta: Theta,
) -> (f64, f64, f64) {
    let s2 = sigma * sigma;
    let (xs, xr) = (omega_s * t, omega_r * t);
    let (cs, cr) = (xs.cos(), xr.cos());
    // 1 − cr·cs = (1 − cr) + (1 − cs) − (1 − cr)(1 − cs)
    let (ar, as_) = (one_minus_cos(xr), one_minus_cos(xs));
    let k = ar + as_ - ar * as_;
    let ws2 = omega_s * omega_s;
    let v = 4.0 * s2 * k / ws2;
    let dv = match theta {
        Theta::OmegaR => 4.0 * s2 * cs * t * xr.sin() / ws2,
        _ => 4.0 * s2 * (cr * xs * xs.sin() - 2.0 * k) / omega_s.powi(3),
    };
    (v, dv, 2.0 * s2 * t * t)
}

fn separation_controlled(
    omega_r: f64,
    t: f64,
    sigma: f64,
    branch: SeparationBranch,
) -> Result<(f64, f64)> {
    let s2 = sigma * sigma;
    let x = omega_r * t;
    let pi4 = PI.powi(4);
    match branch {
        SeparationBranch::FirstOrder => {
            let h = (0.5 * x).sin();
            Ok((8.0 * s2 * t * t * h * h / pi4, 4.0 * s2 * t.powi(3) * x.sin() / pi4))
        }
        SeparationBranch::Leading => Ok((
            2.0 * s2 * t * t * x.sin().powi(2) / pi4,
            2.0 * s2 * t.powi(3) * (2.0 * x).sin() / pi4,
        )),
        SeparationBranch::Exact => {
            let four_pi2 = 4.0 * PI * PI;
            let d = x * x - four_pi2;
            if d.abs() <= 1e-12 * four_pi2 {
                return Err(Error::DegenerateDetuning);
            }
            let h = (0.5 * x).sin();
            let num = x * x + four_pi2;
            let g = num * h * h / (d * d);
            let dg = (2.0 * x * h * h + num * h * (0.5 * x).cos()) / (d * d)
                - 4.0 * x * num * h * h / (d * d * d);
            let pref = 32.0 * s2 * t * t / (PI * PI);
            Ok((pref * g, pref * t * dg))
        }
    }
}

/// Central finite difference of the variance in θ, for checking the
/// analytic derivative. Step defaults to 1e-5·|θ| (1e-8 when θ ≈ 0).
pub fn finite_difference_dvariance(
    spec: &SignalSpec,
    protocol: Protocol,
    t: f64,
    theta: Theta,
    step: Option<f64>,
) -> Result<f64> {
    let x0 = spec.parameter(theta)?;
    let h = step.unwrap_or(if x0.abs() > 1e-3 { 1e-5 * x0.abs() } else { 1e-8 });
    let plus = phase_distribution(&spec.with_parameter(theta, x0 + h)?, protocol, t, theta)?;
    let minus = phase_distribution(&spec.with_parameter(theta, x0 - h)?, protocol, t, theta)?;
    Ok((plus.variance() - minus.variance()) / (2.0 * h))
}
