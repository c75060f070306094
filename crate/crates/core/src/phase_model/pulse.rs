//! Phase under a train of instantaneous π pulses.
//!
//! Pulses at spacing τ = π/ω_c flip the sign of the coupling, which in a
//! frame co-rotating with the control frequency ω_c turns a tone at ω into a
//! slow tone at the detuning δ = ω_c − ω. Here the field is written as
//! `[A sin(ωt) + B cos(ωt)] h(t)` with h the ±1 toggling function.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{one_minus_cos, AmplitudeDraw, SeparationBranch, SignalKind, SignalSpec};
use crate::error::{ensure_finite, invalid, Error, Result};
use crate::quadrature::GaussLegendre;

/// Threshold on |cos(ωτ/2)| below which the per-tone pulse phase is treated
/// as resonant.
const RESONANCE_TOL: f64 = 1e-12;

/// A train of `n_pulses` equally spaced π pulses at `control_freq`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSpec {
    control_freq: f64,
    n_pulses: u32,
}

impl ControlSpec {
    pub fn new(control_freq: f64, n_pulses: u32) -> Result<Self> {
        ensure_finite("control_freq", control_freq)?;
        if control_freq <= 0.0 {
            return Err(invalid("control_freq", "must be positive"));
        }
        if n_pulses == 0 {
            return Err(invalid("n_pulses", "must be at least 1"));
        }
        Ok(Self { control_freq, n_pulses })
    }

    /// Control for a single tone at `omega` with detuning `delta`.
    pub fn detuned(omega: f64, delta: f64, n_pulses: u32) -> Result<Self> {
        Self::new(omega + delta, n_pulses)
    }

    /// Control for the separation protocol on `spec`: the train duration t
    /// and centroid detuning δ_s satisfy δ_s t = 2π·`cycles`, which fixes
    /// t = (N_p − 2·cycles)π/ω_s.
    pub fn separation(spec: &SignalSpec, n_pulses: u32, cycles: u32) -> Result<Self> {
        if spec.kind() != SignalKind::BiFreq {
            return Err(invalid("spec", "separation control needs a two-tone signal"));
        }
        if cycles == 0 {
            return Err(invalid("cycles", "must be at least 1"));
        }
        if n_pulses <= 2 * cycles {
            return Err(invalid("n_pulses", format!("must exceed 2·cycles = {}", 2 * cycles)));
        }
        let t = f64::from(n_pulses - 2 * cycles) * PI / spec.omega_s();
        let delta_s = 2.0 * PI * f64::from(cycles) / t;
        Self::new(spec.omega_s() + delta_s, n_pulses)
    }

    pub fn control_freq(&self) -> f64 {
        self.control_freq
    }

    pub fn n_pulses(&self) -> u32 {
        self.n_pulses
    }

    /// Pulse spacing π/ω_c.
    pub fn tau(&self) -> f64 {
        PI / self.control_freq
    }

    /// Total evolution time N_p τ.
    pub fn duration(&self) -> f64 {
        f64::from(self.n_pulses) * self.tau()
    }

    pub fn detuning(&self, omega: f64) -> Detuning {
        Detuning {
            omega,
            delta: self.control_freq - omega,
        }
    }

    /// Toggling function h(t′) = (−1)ⁿ on [nτ, (n+1)τ).
    pub fn toggle(&self, t: f64) -> f64 {
        let n = (t / self.tau()).floor() as i64;
        if n.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// A tone frequency together with its detuning from the control.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detuning {
    pub omega: f64,
    pub delta: f64,
}

impl Detuning {
    /// δ/ω, the small parameter of the effective description.
    pub fn relative(&self) -> f64 {
        self.delta / self.omega
    }
}

/// Exact phase of a single-tone signal under the pulse train:
/// [A sin δt + B(1 − cos δt)]·tan(ωτ/2)/ω.
pub fn phase_pulse_exact(spec: &SignalSpec, control: &ControlSpec, draw: &AmplitudeDraw) -> Result<f64> {
    if spec.kind() != SignalKind::SingleFreq {
        return Err(invalid("spec", "phase_pulse_exact needs a single-tone signal"));
    }
    let AmplitudeDraw::Single { a, b } = *draw else {
        return Err(invalid("draw", "single-tone signal needs one (A, B) pair"));
    };
    tone_pulse_phase(spec.omega(), a, b, control)
}

/// Per-tone form of [`phase_pulse_exact`].
pub fn tone_pulse_phase(omega: f64, a: f64, b: f64, control: &ControlSpec) -> Result<f64> {
    ensure_finite("omega", omega)?;
    if omega <= 0.0 {
        return Err(invalid("omega", "must be positive"));
    }
    let half = 0.5 * omega * control.tau();
    if half.cos().abs() < RESONANCE_TOL {
        return Err(Error::ResonantDivergence);
    }
    let t = control.duration();
    let delta = control.control_freq - omega;
    let x = delta * t;
    Ok((a * x.sin() + b * one_minus_cos(x)) * half.tan() / omega)
}

/// Effective phase of one tone: tan(ωτ/2)/ω replaced by 2/(πδ), accurate to
/// first order in δ/ω.
pub fn phase_pulse_effective(delta: f64, a: f64, b: f64, t: f64) -> Result<f64> {
    ensure_finite("delta", delta)?;
    if delta == 0.0 {
        return Err(Error::ResonantDivergence);
    }
    let x = delta * t;
    Ok(2.0 / (PI * delta) * (a * x.sin() + b * one_minus_cos(x)))
}

/// Direct quadrature of ∫₀ᵗ h(t′)[A sin ωt′ + B cos ωt′] dt′, one
/// Gauss–Legendre panel per pulse interval.
pub fn toggled_phase_quadrature(omega: f64, a: f64, b: f64, control: &ControlSpec) -> f64 {
    let rule = GaussLegendre::cached(32);
    let tau = control.tau();
    (0..control.n_pulses)
        .map(|n| {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let lo = f64::from(n) * tau;
            sign * rule.integrate(lo, lo + tau, |s| a * (omega * s).sin() + b * (omega * s).cos())
        })
        .sum()
}

/// Phase of a two-tone signal under the pulse train, in the effective
/// description with detunings δ_s ± δ_r (δ_r = −ω_r).
pub fn phase_pulse_bi(
    spec: &SignalSpec,
    control: &ControlSpec,
    draw: &AmplitudeDraw,
    branch: SeparationBranch,
) -> Result<f64> {
    let t = control.duration();
    let delta_s = control.control_freq - spec.omega_s();
    separation_phase_with(spec, draw, t, delta_s, branch)
}

/// Separation-protocol phase at duration `t` with δ_s = 2π/t.
pub fn separation_phase(
    spec: &SignalSpec,
    draw: &AmplitudeDraw,
    t: f64,
    branch: SeparationBranch,
) -> Result<f64> {
    ensure_finite("t", t)?;
    if t <= 0.0 {
        return Err(invalid("t", "must be positive"));
    }
    separation_phase_with(spec, draw, t, 2.0 * PI / t, branch)
}

fn separation_phase_with(
    spec: &SignalSpec,
    draw: &AmplitudeDraw,
    t: f64,
    delta_s: f64,
    branch: SeparationBranch,
) -> Result<f64> {
    if spec.kind() != SignalKind::BiFreq {
        return Err(invalid("spec", "needs a two-tone signal"));
    }
    let AmplitudeDraw::Bi { a1, b1, a2, b2 } = *draw else {
        return Err(invalid("draw", "two-tone signal needs two (A, B) pairs"));
    };
    if delta_s == 0.0 {
        return Err(Error::ResonantDivergence);
    }
    let delta_r = -spec.omega_r();
    let xr = delta_r * t;
    let pref = 2.0 / (PI * delta_s);
    match branch {
        SeparationBranch::Exact => {
            let d1 = delta_s + delta_r;
            let d2 = delta_s - delta_r;
            if d1.abs() <= 1e-12 * delta_s.abs() || d2.abs() <= 1e-12 * delta_s.abs() {
                return Err(Error::DegenerateDetuning);
            }
            Ok(phase_pulse_effective(d1, a1, b1, t)? + phase_pulse_effective(d2, a2, b2, t)?)
        }
        SeparationBranch::FirstOrder => {
            Ok(pref * ((a1 - a2) * xr.sin() + (b1 + b2) * one_minus_cos(xr)))
        }
        SeparationBranch::Leading => Ok(pref * (a1 - a2) * xr.sin()),
    }
}
