//! Quantum Fisher information of probe states, three ways, plus the classical
//! Fisher information of a Fourier-basis measurement.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::bounds::{Method, QfiReport};
use crate::error::{ensure_finite, invalid, Error, Result};
use crate::probe_states::{BasisTag, SymmetricDensity};

/// Pairs with λ_j + λ_k at or below this are skipped in the SLD sum.
pub const EIG_FLOOR: f64 = 1e-12;
/// Fourier outcomes with probability at or below this contribute nothing.
pub const P_FLOOR: f64 = 1e-15;
/// Relative Richardson residual above which a fidelity step warning is raised.
pub const RICHARDSON_WARN: f64 = 1e-3;
/// Default fidelity step relative to max(|θ|, 1).
pub const FIDELITY_REL_STEP: f64 = 1e-2;
/// Default fidelity step for 2×2 states, relative to max(|θ|, 1).
pub const FIDELITY_QUBIT_REL_STEP: f64 = 1e-4;

/// Eigendecomposition of a real symmetric matrix, eigenvalues in nonincreasing order.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
    /// max |VΛVᵀ − ρ| over entries.
    pub reconstruction_error: f64,
}

impl EigenSystem {
    pub fn new(matrix: &DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(invalid("matrix", "must be square"));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("matrix has non-finite entries".into()));
        }
        let eig = SymmetricEigen::new(matrix.clone());
        let n = matrix.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
        let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        let rebuilt = &eigenvectors * DMatrix::from_diagonal(&eigenvalues) * eigenvectors.transpose();
        let reconstruction_error = (rebuilt - matrix).amax();
        let scale = matrix.amax().max(1.0);
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(reconstruction_error <= 1e-10 * scale) {
            return Err(Error::Numeric(format!(
                "eigendecomposition of a {n}×{n} matrix failed: reconstruction error {reconstruction_error:e}"
            )));
        }
        Ok(Self {
            eigenvalues,
            eigenvectors,
            reconstruction_error,
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// V diag(√max(λ, 0)) Vᵀ.
    pub fn sqrt_psd(&self) -> DMatrix<f64> {
        let roots = self.eigenvalues.map(|l| l.max(0.0).sqrt());
        &self.eigenvectors * DMatrix::from_diagonal(&roots) * self.eigenvectors.transpose()
    }
}

/// (dγ)²/(1 − γ²) for the state ½[[1, γ], [γ, 1]].
pub fn two_level_qfi(gamma: f64, dgamma: f64) -> Result<QfiReport> {
    ensure_finite("gamma", gamma)?;
    ensure_finite("dgamma", dgamma)?;
    let value = if gamma.abs() < 1.0 {
        // 1 − γ² = (1 − γ)(1 + γ)
        dgamma * dgamma / ((1.0 - gamma) * (1.0 + gamma))
    } else if dgamma == 0.0 {
        0.0
    } else {
        return Err(Error::CoherenceOverflow { gamma, dgamma });
    };
    Ok(QfiReport::new(value, Method::ClosedForm, None))
}

/// Σ_{λ_j+λ_k > floor} 2|⟨j|ρ′|k⟩|²/(λ_j + λ_k) with the default floor.
pub fn sld_qfi(state: &SymmetricDensity) -> Result<QfiReport> {
    sld_qfi_with_floor(state, EIG_FLOOR)
}

pub fn sld_qfi_with_floor(state: &SymmetricDensity, eig_floor: f64) -> Result<QfiReport> {
    let d = state
        .d_entries()
        .ok_or_else(|| invalid("state", "sld_qfi needs the state derivative"))?;
    let eig = EigenSystem::new(state.entries())?;
    let rotated = eig.eigenvectors.transpose() * d * &eig.eigenvectors;
    let lam = &eig.eigenvalues;
    let n = lam.len();
    let (mut value, mut coarse, mut excluded) = (0.0, 0.0, 0usize);
    let coarse_floor = eig_floor * 1e3;
    for j in 0..n {
        for k in 0..n {
            let s = lam[j] + lam[k];
            if s > eig_floor {
                let term = 2.0 * rotated[(j, k)] * rotated[(j, k)] / s;
                value += term;
                if s > coarse_floor {
                    coarse += term;
                }
            } else {
                excluded += 1;
            }
        }
    }
    let mut report = QfiReport::new(value, Method::Sld, state.parameter())
        .with_diagnostic("eig_floor", eig_floor)
        .with_diagnostic("min_eigenvalue", eig.min_eigenvalue())
        .with_diagnostic("reconstruction_error", eig.reconstruction_error)
        .with_diagnostic("excluded_pairs", excluded as f64)
        .with_diagnostic(
            "floor_sensitivity",
            if value > 0.0 { (value - coarse).abs() / value } else { 0.0 },
        );
    if eig.min_eigenvalue() < -1e-12 {
        report
            .warnings
            .push(format!("state has eigenvalue {:e} below −1e-12", eig.min_eigenvalue()));
    }
    Ok(report)
}

/// Tr|√ρ_a √ρ_b|, not clamped, for use in finite differences.
fn fidelity_raw(a: &SymmetricDensity, b: &SymmetricDensity) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(invalid("state_b", format!("dimension {} differs from {}", b.dim(), a.dim())));
    }
    let ea = EigenSystem::new(a.entries())?;
    let eb = EigenSystem::new(b.entries())?;
    for e in [&ea, &eb] {
        if e.min_eigenvalue() < -1e-10 {
            return Err(Error::Domain(format!(
                "fidelity needs positive semidefinite input, found eigenvalue {:e}",
                e.min_eigenvalue()
            )));
        }
    }
    let product = ea.sqrt_psd() * eb.sqrt_psd();
    Ok(product.singular_values().sum())
}

/// 1 − F for two 2×2 states from their Bloch vectors r, s. The squared-fidelity
/// complement x = ½(|s − r|² − |r × (s − r)|²) / (1 − r·s + √((1 − |r|²)(1 − |s|²)))
/// gives 1 − F = x / (1 + √(1 − x)).
fn qubit_infidelity(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    let bloch = |m: &DMatrix<f64>| (2.0 * m[(0, 1)], m[(0, 0)] - m[(1, 1)]);
    let mixedness = |m: &DMatrix<f64>| 4.0 * (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(0, 1)]);
    let (ma, mb) = (mixedness(a), mixedness(b));
    if ma < -1e-10 || mb < -1e-10 {
        return Err(Error::Domain(format!(
            "fidelity needs positive semidefinite input, found 1 − |r|² = {:e}",
            ma.min(mb)
        )));
    }
    let (ma, mb) = (ma.max(0.0), mb.max(0.0));
    let r = bloch(a);
    let s = bloch(b);
    let d = (s.0 - r.0, s.1 - r.1);
    let d2 = d.0 * d.0 + d.1 * d.1;
    let cross = r.0 * d.1 - r.1 * d.0;
    let numerator = (d2 - cross * cross).max(0.0);
    if numerator == 0.0 {
        return Ok(0.0);
    }
    let denominator = 0.5 * (ma + mb + d2) + (ma * mb).sqrt();
    let x = (0.5 * numerator / denominator).min(1.0);
    Ok(x / (1.0 + (1.0 - x).sqrt()))
}

/// 1 − F(ρ_a, ρ_b). Exact without cancellation for 2×2 states; otherwise 1 − [`fidelity`].
pub fn infidelity(a: &SymmetricDensity, b: &SymmetricDensity) -> Result<f64> {
    if a.dim() == 2 && b.dim() == 2 {
        qubit_infidelity(a.entries(), b.entries())
    } else {
        fidelity_raw(a, b).map(|f| 1.0 - f)
    }
}

/// Uhlmann fidelity Tr√(√ρ_a ρ_b √ρ_a), computed as the trace norm of √ρ_a √ρ_b.
pub fn fidelity(a: &SymmetricDensity, b: &SymmetricDensity) -> Result<f64> {
    if a.dim() == 2 && b.dim() == 2 {
        return infidelity(a, b).map(|x| (1.0 - x).clamp(0.0, 1.0));
    }
    fidelity_raw(a, b).map(|f| f.clamp(0.0, 1.0))
}

/// Fidelity-based QFI 8(1 − F(ρ_{θ−δ/2}, ρ_{θ+δ/2}))/δ², Richardson-extrapolated
/// from steps δ and δ/2. `delta` defaults to 1e-2·max(|θ|, 1), or 1e-4·max(|θ|, 1)
/// for 2×2 states where the infidelity is evaluated without cancellation.
pub fn fidelity_qfi<F>(builder: F, theta: f64, delta: Option<f64>) -> Result<QfiReport>
where
    F: Fn(f64) -> Result<SymmetricDensity>,
{
    ensure_finite("theta", theta)?;
    let centre = builder(theta)?;
    let rel_step = if centre.dim() == 2 {
        FIDELITY_QUBIT_REL_STEP
    } else {
        FIDELITY_REL_STEP
    };
    let delta = delta.unwrap_or(rel_step * theta.abs().max(1.0));
    ensure_finite("delta", delta)?;
    if delta <= 0.0 {
        return Err(invalid("delta", "must be positive"));
    }
    let estimate = |h: f64| -> Result<f64> {
        let lo = builder(theta - 0.5 * h)?;
        let hi = builder(theta + 0.5 * h)?;
        Ok(8.0 * infidelity(&lo, &hi)? / (h * h))
    };
    let coarse = estimate(delta)?;
    let fine = estimate(0.5 * delta)?;
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    let residual = if extrapolated.abs() > 0.0 {
        (extrapolated - fine).abs() / extrapolated.abs()
    } else {
        0.0
    };
    let parameter = centre.parameter();
    let mut report = QfiReport::new(extrapolated.max(0.0), Method::FidelityFd, parameter)
        .with_diagnostic("delta", delta)
        .with_diagnostic("estimate_delta", coarse)
        .with_diagnostic("estimate_half_delta", fine)
        .with_diagnostic("richardson_residual", residual);
    if residual > RICHARDSON_WARN {
        report
            .warnings
            .push(format!("fidelity step {delta:e} leaves Richardson residual {residual:.2e}"));
    }
    Ok(report)
}

/// Outcome probabilities and their derivatives for the Fourier basis
/// |u_k⟩ = (N+1)^{-1/2} Σ_n e^{−2πikn/(N+1)} |D_n⟩.
pub fn fourier_probabilities(state: &SymmetricDensity) -> Result<(Vec<f64>, Vec<f64>)> {
    if state.basis() != BasisTag::Dicke {
        return Err(Error::Unsupported("the Fourier measurement acts on Dicke-basis states".into()));
    }
    let d = state
        .d_entries()
        .ok_or_else(|| invalid("state", "fourier_cfi needs the state derivative"))?;
    let dim = state.dim();
    let diag_sums = |m: &DMatrix<f64>| -> Vec<f64> {
        // entry l holds Σ_{n−m=l} ρ_nm + Σ_{m−n=l} ρ_nm for l > 0
        (0..dim)
            .map(|l| (0..dim - l).map(|i| m[(i + l, i)] + if l > 0 { m[(i, i + l)] } else { 0.0 }).sum())
            .collect()
    };
    let (s, ds) = (diag_sums(state.entries()), diag_sums(d));
    let norm = 1.0 / dim as f64;
    let project = |sums: &[f64], k: usize| -> f64 {
        let step = 2.0 * PI * k as f64 / dim as f64;
        norm * sums
            .iter()
            .enumerate()
            .map(|(l, &x)| x * (step * l as f64).cos())
            .sum::<f64>()
    };
    let p: Vec<f64> = (0..dim).map(|k| project(&s, k)).collect();
    let dp: Vec<f64> = (0..dim).map(|k| project(&ds, k)).collect();
    Ok((p, dp))
}

/// Classical Fisher information Σ (p_k′)²/p_k of the Fourier-basis measurement.
pub fn fourier_cfi(state: &SymmetricDensity) -> Result<QfiReport> {
    let (p, dp) = fourier_probabilities(state)?;
    if let Some(bad) = p.iter().copied().find(|&x| x < -1e-12) {
        return Err(Error::Numeric(format!("Fourier outcome probability {bad:e} is negative")));
    }
    let value: f64 = p
        .iter()
        .zip(&dp)
        .filter(|(&pk, _)| pk > P_FLOOR)
        .map(|(&pk, &dk)| dk * dk / pk)
        .sum();
    let total: f64 = p.iter().sum();
    Ok(QfiReport::new(value, Method::ClassicalFisher, state.parameter())
        .with_diagnostic("p_floor", P_FLOOR)
        .with_diagnostic("probability_sum_error", (total - 1.0).abs()))
}
