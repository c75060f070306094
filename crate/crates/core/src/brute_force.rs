//! Full 2^N-dimensional GHZ simulations, used as oracles for the effective
//! two-level descriptions in [`crate::probe_states`].

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::probe_states::NoiseSpec;

/// Largest qubit count accepted by the brute-force routines.
pub const MAX_BRUTE_FORCE_QUBITS: usize = 6;

type CMatrix = DMatrix<Complex64>;

fn check_size(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 {
        return Err(invalid("n_qubits", "must be at least 1"));
    }
    if n_qubits > MAX_BRUTE_FORCE_QUBITS {
        return Err(Error::Size {
            requested: n_qubits,
            max: MAX_BRUTE_FORCE_QUBITS,
        });
    }
    Ok(())
}

/// ½(|0…0⟩⟨0…0| + γ|0…0⟩⟨1…1| + γ|1…1⟩⟨0…0| + |1…1⟩⟨1…1|) in the computational basis.
pub fn ghz_density(n_qubits: usize, coherence: f64) -> Result<CMatrix> {
    check_size(n_qubits)?;
    let dim = 1usize << n_qubits;
    let last = dim - 1;
    let mut rho = CMatrix::zeros(dim, dim);
    rho[(0, 0)] = Complex64::new(0.5, 0.0);
    rho[(last, last)] = Complex64::new(0.5, 0.0);
    rho[(0, last)] = Complex64::new(0.5 * coherence, 0.0);
    rho[(last, 0)] = Complex64::new(0.5 * coherence, 0.0);
    Ok(rho)
}

/// Diagonal of U_φ^{⊗N} with U_φ = diag(e^{−iφ}, e^{iφ}).
pub fn product_phase_diagonal(n_qubits: usize, phi: f64) -> Vec<Complex64> {
    (0..1usize << n_qubits)
        .map(|x| {
            let ones = x.count_ones() as f64;
            Complex64::from_polar(1.0, -phi * (n_qubits as f64 - 2.0 * ones))
        })
        .collect()
}

/// U ρ U† for a diagonal unitary U.
pub fn conjugate_diagonal(rho: &CMatrix, diag: &[Complex64]) -> CMatrix {
    CMatrix::from_fn(rho.nrows(), rho.ncols(), |a, b| diag[a] * rho[(a, b)] * diag[b].conj())
}

fn embed(op: &Matrix2<Complex64>, qubit: usize, n_qubits: usize) -> CMatrix {
    let dim = 1usize << n_qubits;
    // qubit 0 is the most significant bit
    let shift = n_qubits - 1 - qubit;
    CMatrix::from_fn(dim, dim, |a, b| {
        let rest = !(1usize << shift);
        if a & rest != b & rest {
            Complex64::new(0.0, 0.0)
        } else {
            op[((a >> shift) & 1, (b >> shift) & 1)]
        }
    })
}

/// Applies Σ_k K_k ρ K_k† with each single-qubit Kraus operator acting on `qubit`.
pub fn apply_single_qubit_channel(rho: &CMatrix, kraus: &[Matrix2<Complex64>], qubit: usize, n_qubits: usize) -> CMatrix {
    kraus.iter().fold(CMatrix::zeros(rho.nrows(), rho.ncols()), |acc, k| {
        let full = embed(k, qubit, n_qubits);
        acc + &full * rho * full.adjoint()
    })
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Kraus operators of ρ ↦ (1 − p)ρ + pZρZ with p = (1 − e^{−Γt})/2.
pub fn dephasing_kraus(gamma_rate: f64, t: f64) -> [Matrix2<Complex64>; 2] {
    let p = 0.5 * (1.0 - (-gamma_rate * t).exp());
    let a = (1.0 - p).sqrt();
    let b = p.sqrt();
    [
        Matrix2::new(c(a, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(a, 0.0)),
        Matrix2::new(c(b, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-b, 0.0)),
    ]
}

/// Kraus operators of ρ ↦ (1 − λ)ρ + λI/2.
pub fn depolarizing_kraus(lambda: f64) -> [Matrix2<Complex64>; 4] {
    let a = (1.0 - 0.75 * lambda).sqrt();
    let b = (0.25 * lambda).sqrt();
    let z = c(0.0, 0.0);
    [
        Matrix2::new(c(a, 0.0), z, z, c(a, 0.0)),
        Matrix2::new(z, c(b, 0.0), c(b, 0.0), z),
        Matrix2::new(z, c(0.0, -b), c(0.0, b), z),
        Matrix2::new(c(b, 0.0), z, z, c(-b, 0.0)),
    ]
}

/// Corner coherence ⟨0…0|ρ|1…1⟩ after local dephasing and depolarizing on
/// every qubit of a GHZ state whose initial coherence is `coherence`/2.
pub fn noisy_ghz_coherence(n_qubits: usize, coherence: f64, noise: &NoiseSpec, t: f64) -> Result<Complex64> {
    let mut rho = ghz_density(n_qubits, coherence)?;
    let deph = dephasing_kraus(noise.gamma_rate(), t);
    let depol = depolarizing_kraus(noise.lambda_depol());
    for q in 0..n_qubits {
        rho = apply_single_qubit_channel(&rho, &deph, q, n_qubits);
        rho = apply_single_qubit_channel(&rho, &depol, q, n_qubits);
    }
    Ok(rho[(0, rho.ncols() - 1)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_model::{PhaseDistribution, Theta};
    use crate::probe_states::{apply_added_noise, ghz_state};

    #[test]
    fn channels_preserve_trace() {
        let rho = ghz_density(3, 0.8).unwrap();
        let out = apply_single_qubit_channel(&rho, &depolarizing_kraus(0.3), 1, 3);
        assert!((out.trace().re - 1.0).abs() < 1e-15);
        let out = apply_single_qubit_channel(&out, &dephasing_kraus(0.7, 1.0), 2, 3);
        assert!((out.trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kraus_oracle_matches_effective_noise() {
        let law = PhaseDistribution::new(0.01, 0.002, Theta::Omega).unwrap();
        for n in 1..=MAX_BRUTE_FORCE_QUBITS {
            for (g, l) in [(0.0, 0.0), (0.2, 0.0), (0.0, 0.1), (0.2, 0.1), (1.5, 0.6)] {
                let noise = NoiseSpec::new(g, l).unwrap();
                let state = ghz_state(n, &law).unwrap();
                let effective = apply_added_noise(&state, &noise, 1.0).unwrap().coherence();
                let brute = noisy_ghz_coherence(n, 2.0 * state.coherence(), &noise, 1.0).unwrap();
                assert!((brute.re - effective).abs() < 1e-10, "n={n} Γ={g} λ={l}");
                assert!(brute.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn conjugation_phases_corner_by_order_n() {
        let rho = ghz_density(4, 1.0).unwrap();
        let out = conjugate_diagonal(&rho, &product_phase_diagonal(4, 0.3));
        let want = Complex64::from_polar(0.5, -2.0 * 4.0 * 0.3);
        assert!((out[(0, 15)] - want).norm() < 1e-15);
        assert!(ghz_density(7, 1.0).is_err());
    }
}
