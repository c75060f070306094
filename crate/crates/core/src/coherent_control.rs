//! Optimal-control QFI for coherent (deterministic-amplitude) signals.
//!
//! With full control the QFI is bounded by the square of the time-integrated
//! spread between the largest and smallest eigenvalue of ∂_θ H(t). The spread
//! is available analytically and from numerical eigenvalues of the collective
//! spin generator; the time integral has closed forms below ω_r T = π.

use std::cell::Cell;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bounds::{Method, QfiReport};
use crate::error::{ensure_finite, invalid, Error, Result};
use crate::phase_model::Theta;
use crate::quadrature::integrate_adaptive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoherentKind {
    SingleFreq,
    Centroid,
    Separation,
}

impl CoherentKind {
    pub fn theta(self) -> Theta {
        match self {
            CoherentKind::SingleFreq => Theta::Omega,
            CoherentKind::Centroid => Theta::OmegaS,
            CoherentKind::Separation => Theta::OmegaR,
        }
    }
}

/// Field amplitude, duration, frequencies and probe size for a coherent signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentFieldSpec {
    pub b_field: f64,
    pub total_time: f64,
    /// Single-tone frequency, or the centroid ω_s.
    pub omega: f64,
    /// Half-separation ω_r; zero for a single tone.
    pub omega_r: f64,
    pub n_qubits: usize,
}

impl CoherentFieldSpec {
    pub fn single(b_field: f64, total_time: f64, omega: f64, n_qubits: usize) -> Result<Self> {
        Self::bi(b_field, total_time, omega, 0.0, n_qubits)
    }

    pub fn bi(b_field: f64, total_time: f64, omega_s: f64, omega_r: f64, n_qubits: usize) -> Result<Self> {
        for (name, v) in [("b_field", b_field), ("omega", omega_s), ("omega_r", omega_r)] {
            ensure_finite(name, v)?;
            if v < 0.0 {
                return Err(invalid(name, "must be non-negative"));
            }
        }
        ensure_finite("total_time", total_time)?;
        if total_time <= 0.0 {
            return Err(invalid("total_time", "must be positive"));
        }
        if n_qubits == 0 {
            return Err(invalid("n_qubits", "must be at least 1"));
        }
        Ok(Self {
            b_field,
            total_time,
            omega: omega_s,
            omega_r,
            n_qubits,
        })
    }

    fn omega1(&self) -> f64 {
        self.omega + self.omega_r
    }

    fn omega2(&self) -> f64 {
        self.omega - self.omega_r
    }
}

/// [∫₀ᵀ spread(t) dt]² by adaptive Gauss–Legendre integration.
pub fn spread_integral_qfi<F: Fn(f64) -> f64>(spread: F, total_time: f64) -> Result<QfiReport> {
    ensure_finite("total_time", total_time)?;
    if total_time <= 0.0 {
        return Err(invalid("total_time", "must be positive"));
    }
    let worst = Cell::new(0.0f64);
    let est = integrate_adaptive(0.0, total_time, 1e-13, 48, |t| {
        let s = spread(t);
        if s < worst.get() || s.is_nan() {
            worst.set(if s.is_nan() { f64::NEG_INFINITY } else { s });
        }
        s
    });
    if worst.get() < 0.0 {
        return Err(Error::Domain(format!("spread takes the negative value {}", worst.get())));
    }
    Ok(QfiReport::new(est.value * est.value, Method::Quadrature, None)
        .with_diagnostic("intervals", est.intervals as f64)
        .with_diagnostic("integral_error_estimate", est.error_estimate))
}

/// μ_max − μ_min of ∂_θ H(t) in closed form: 2NBt, 4NBt|cos ω_r t| or 4NBt|sin ω_r t|.
pub fn analytic_spread(kind: CoherentKind, spec: &CoherentFieldSpec, t: f64) -> f64 {
    let nb = spec.n_qubits as f64 * spec.b_field * t;
    match kind {
        CoherentKind::SingleFreq => 2.0 * nb,
        CoherentKind::Centroid => 4.0 * nb * (spec.omega_r * t).cos().abs(),
        CoherentKind::Separation => 4.0 * nb * (spec.omega_r * t).sin().abs(),
    }
}

/// Matrices of 2J_x and 2J_z for spin N/2, in the basis m = N/2, …, −N/2.
fn collective_pauli(n_qubits: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let dim = n_qubits + 1;
    let j = 0.5 * n_qubits as f64;
    let mut jx = DMatrix::zeros(dim, dim);
    let mut jz = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let m = j - i as f64;
        jz[(i, i)] = 2.0 * m;
        if i + 1 < dim {
            // ⟨m|J₊|m−1⟩ = √(j(j+1) − m(m−1))
            let c = (j * (j + 1.0) - m * (m - 1.0)).sqrt();
            jx[(i, i + 1)] = c;
            jx[(i + 1, i)] = c;
        }
    }
    (jx, jz)
}

/// Spread of ∂_θ H(t) from the numerical eigenvalues of the collective generator
/// Bt(c_x·2J_x + c_z·2J_z).
pub fn spread_from_hamiltonian(kind: CoherentKind, spec: &CoherentFieldSpec, t: f64) -> f64 {
    let (s1, c1) = (spec.omega1() * t).sin_cos();
    let (s2, c2) = (spec.omega2() * t).sin_cos();
    let (cx, cz) = match kind {
        CoherentKind::SingleFreq => {
            let (s, c) = (spec.omega * t).sin_cos();
            (s, -c)
        }
        CoherentKind::Centroid => (s1 + s2, -c1 - c2),
        CoherentKind::Separation => (s1 - s2, -c1 + c2),
    };
    let (jx, jz) = collective_pauli(spec.n_qubits);
    let generator = (jx * cx + jz * cz) * (spec.b_field * t);
    let eig = generator.symmetric_eigenvalues();
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    max - min
}

/// ∫₀ᵀ t|cos ω_r t| dt for ω_r T < π.
fn centroid_time_integral(omega_r: f64, total_time: f64) -> f64 {
    let x = omega_r * total_time;
    let t2 = total_time * total_time;
    if x < 0.1 {
        // T² Σ (−1)^{k+1}(2k−1)x^{2k−2}/(2k)!
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut fact = 2.0;
        for k in 1..=12 {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * (2.0 * kf - 1.0) * pow / fact;
            pow *= x * x;
            fact *= (2.0 * kf + 1.0) * (2.0 * kf + 2.0);
        }
        return t2 * sum;
    }
    let w2 = omega_r * omega_r;
    let h = (0.5 * x).sin();
    if x <= 0.5 * PI {
        (x * x.sin() - 2.0 * h * h) / w2
    } else {
        (PI - 1.0 - x.cos() - x * x.sin()) / w2
    }
}

/// ∫₀ᵀ t sin(ω_r t) dt for ω_r T < π.
fn separation_time_integral(omega_r: f64, total_time: f64) -> f64 {
    let x = omega_r * total_time;
    let t2 = total_time * total_time;
    if x < 0.1 {
        // T² Σ (−1)^{k+1} 2k x^{2k−1}/(2k+1)!
        let mut sum = 0.0;
        let mut pow = x;
        let mut fact = 6.0;
        for k in 1..=12 {
            let kf = k as f64;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sum += sign * 2.0 * kf * pow / fact;
            pow *= x * x;
            fact *= (2.0 * kf + 2.0) * (2.0 * kf + 3.0);
        }
        return t2 * sum;
    }
    (x.sin() - x * x.cos()) / (omega_r * omega_r)
}

/// Closed-form coherent bound; requires ω_r T < π for the two-tone kinds.
pub fn coherent_bound(kind: CoherentKind, spec: &CoherentFieldSpec) -> Result<QfiReport> {
    let (b, tt, n) = (spec.b_field, spec.total_time, spec.n_qubits as f64);
    let x = spec.omega_r * tt;
    if kind != CoherentKind::SingleFreq && x >= PI {
        return Err(Error::OutOfRange(format!(
            "omega_r·T = {x} must be below π for the closed-form coherent bound"
        )));
    }
    let integral = match kind {
        CoherentKind::SingleFreq => n * b * tt * tt,
        CoherentKind::Centroid => 4.0 * n * b * centroid_time_integral(spec.omega_r, tt),
        CoherentKind::Separation => 4.0 * n * b * separation_time_integral(spec.omega_r, tt),
    };
    Ok(QfiReport::new(integral * integral, Method::ClosedForm, Some(kind.theta()))
        .with_diagnostic("asymptote", coherent_asymptote(kind, spec)))
}

/// Small-ω_r T limits: N²B²T⁴, 4N²B²T⁴ and (16/9)N²B²T⁶ω_r².
pub fn coherent_asymptote(kind: CoherentKind, spec: &CoherentFieldSpec) -> f64 {
    let n2 = (spec.n_qubits * spec.n_qubits) as f64;
    let b2t4 = spec.b_field.powi(2) * spec.total_time.powi(4);
    match kind {
        CoherentKind::SingleFreq => n2 * b2t4,
        CoherentKind::Centroid => 4.0 * n2 * b2t4,
        CoherentKind::Separation => 16.0 / 9.0 * n2 * b2t4 * spec.total_time.powi(2) * spec.omega_r.powi(2),
    }
}
