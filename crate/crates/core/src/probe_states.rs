//! Probe density matrices after the global dephasing channel.
//!
//! The random phase φ acts identically on every qubit, so a state in the
//! symmetric subspace keeps its Dicke-basis structure and each coherence
//! |D_n⟩⟨D_m| is multiplied by E[e^{2i(n−m)φ}] = exp(−2(n−m)²v). Because the
//! phase law is even, every matrix here is real symmetric.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, invalid, Error, Result};
use crate::phase_model::{PhaseDistribution, Theta};

/// Default largest N accepted by [`dicke_superposition_state`].
pub const DEFAULT_MAX_DICKE: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisTag {
    /// (N+1)-dimensional Dicke basis |D_0⟩ … |D_N⟩.
    Dicke,
    /// Two-dimensional span of |0…0⟩ and |1…1⟩.
    GhzEffective,
}

/// Real symmetric probe state and its derivative in the estimated parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricDensity {
    n_qubits: usize,
    entries: DMatrix<f64>,
    d_entries: Option<DMatrix<f64>>,
    basis: BasisTag,
    parameter: Option<Theta>,
}

impl SymmetricDensity {
    /// Effective GHZ-type state ½[[1, γ], [γ, 1]] with derivative ½[[0, dγ], [dγ, 0]].
    pub fn ghz_effective(n_qubits: usize, gamma: f64, dgamma: f64, parameter: Option<Theta>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(invalid("n_qubits", "must be at least 1"));
        }
        ensure_finite("gamma", gamma)?;
        ensure_finite("dgamma", dgamma)?;
        if gamma.abs() > 1.0 {
            return Err(Error::Domain(format!("coherence {gamma} exceeds 1 in magnitude")));
        }
        let entries = DMatrix::from_row_slice(2, 2, &[0.5, 0.5 * gamma, 0.5 * gamma, 0.5]);
        let d_entries = DMatrix::from_row_slice(2, 2, &[0.0, 0.5 * dgamma, 0.5 * dgamma, 0.0]);
        Ok(Self {
            n_qubits,
            entries,
            d_entries: Some(d_entries),
            basis: BasisTag::GhzEffective,
            parameter,
        })
    }

    /// Wraps an arbitrary real symmetric matrix; symmetry is enforced by
    /// averaging with the transpose.
    pub fn from_matrix(
        n_qubits: usize,
        basis: BasisTag,
        entries: DMatrix<f64>,
        d_entries: Option<DMatrix<f64>>,
        parameter: Option<Theta>,
    ) -> Result<Self> {
        if !entries.is_square() {
            return Err(invalid("entries", "must be square"));
        }
        let want = match basis {
            BasisTag::Dicke => n_qubits + 1,
            BasisTag::GhzEffective => 2,
        };
        if entries.nrows() != want {
            return Err(invalid("entries", format!("dimension {} does not match {want}", entries.nrows())));
        }
        if let Some(d) = &d_entries {
            if d.shape() != entries.shape() {
                return Err(invalid("d_entries", "shape differs from entries"));
            }
        }
        let sym = |m: DMatrix<f64>| (&m + m.transpose()) * 0.5;
        Ok(Self {
            n_qubits,
            entries: sym(entries),
            d_entries: d_entries.map(sym),
            basis,
            parameter,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn d_entries(&self) -> Option<&DMatrix<f64>> {
        self.d_entries.as_ref()
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn parameter(&self) -> Option<Theta> {
        self.parameter
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    /// The (0, 1) entry; for a GHZ-type state this is γ/2.
    pub fn coherence(&self) -> f64 {
        self.entries[(0, 1)]
    }

    /// Checks symmetry, unit trace and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        let asym = (&self.entries - self.entries.transpose()).amax();
        if asym != 0.0 {
            return Err(Error::Domain(format!("matrix is not symmetric (max deviation {asym:e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > 1e-14 * self.dim() as f64 {
            return Err(Error::Domain(format!("trace {tr} differs from 1")));
        }
        let min = self
            .entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < -1e-12 {
            return Err(Error::Domain(format!("minimum eigenvalue {min:e} is negative")));
        }
        Ok(())
    }
}

/// Dephasing-rate Γ and depolarizing strength λ acting on each qubit.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSpec {
    gamma_rate: f64,
    lambda_depol: f64,
}

impl NoiseSpec {
    pub fn new(gamma_rate: f64, lambda_depol: f64) -> Result<Self> {
        ensure_finite("gamma_rate", gamma_rate)?;
        ensure_finite("lambda_depol", lambda_depol)?;
        if gamma_rate < 0.0 {
            return Err(invalid("gamma_rate", "must be non-negative"));
        }
        if !(0.0..=1.0).contains(&lambda_depol) {
            return Err(invalid("lambda_depol", "must lie in [0, 1]"));
        }
        Ok(Self { gamma_rate, lambda_depol })
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn gamma_rate(&self) -> f64 {
        self.gamma_rate
    }

    pub fn lambda_depol(&self) -> f64 {
        self.lambda_depol
    }

    /// Factor e^{−NΓt}(1 − λ)^N applied to an N-qubit GHZ coherence.
    pub fn coherence_factor(&self, n_qubits: usize, t: f64) -> f64 {
        let n = n_qubits as f64;
        (-n * self.gamma_rate * t).exp() * (1.0 - self.lambda_depol).powf(n)
    }
}

/// γ_k = E[e^{2ikφ}] = exp(−2k²v) and its θ-derivative.
pub fn dephasing_factor(k: u32, dist: &PhaseDistribution) -> (f64, f64) {
    let k2 = f64::from(k) * f64::from(k);
    let gamma = (-2.0 * k2 * dist.variance()).exp();
    (gamma, -2.0 * k2 * dist.dvariance_dtheta() * gamma)
}

/// Single qubit prepared in |+⟩ after dephasing.
pub fn qubit_state(dist: &PhaseDistribution) -> SymmetricDensity {
    ghz_state(1, dist).expect("one qubit is always valid")
}

/// N-qubit GHZ state after dephasing, in its two-dimensional effective form.
pub fn ghz_state(n_qubits: usize, dist: &PhaseDistribution) -> Result<SymmetricDensity> {
    if n_qubits == 0 {
        return Err(invalid("n_qubits", "must be at least 1"));
    }
    let k = u32::try_from(n_qubits).map_err(|_| Error::Size { requested: n_qubits, max: u32::MAX as usize })?;
    let (gamma, dgamma) = dephasing_factor(k, dist);
    SymmetricDensity::ghz_effective(n_qubits, gamma, dgamma, Some(dist.theta()))
}

/// Uniform superposition of |D_0⟩ … |D_N⟩ after dephasing, with the default size limit.
pub fn dicke_superposition_state(n_qubits: usize, dist: &PhaseDistribution) -> Result<SymmetricDensity> {
    dicke_superposition_state_with_max(n_qubits, dist, DEFAULT_MAX_DICKE)
}

/// Toeplitz matrix exp(−2(n−m)²v)/(N+1) and its derivative.
pub fn dicke_superposition_state_with_max(
    n_qubits: usize,
    dist: &PhaseDistribution,
    max_n: usize,
) -> Result<SymmetricDensity> {
    if n_qubits == 0 {
        return Err(invalid("n_qubits", "must be at least 1"));
    }
    if n_qubits > max_n {
        return Err(Error::Size { requested: n_qubits, max: max_n });
    }
    let dim = n_qubits + 1;
    let norm = 1.0 / dim as f64;
    let bands: Vec<(f64, f64)> = (0..dim as u32).map(|k| dephasing_factor(k, dist)).collect();
    let entries = DMatrix::from_fn(dim, dim, |i, j| bands[i.abs_diff(j)].0 * norm);
    let d_entries = DMatrix::from_fn(dim, dim, |i, j| bands[i.abs_diff(j)].1 * norm);
    Ok(SymmetricDensity {
        n_qubits,
        entries,
        d_entries: Some(d_entries),
        basis: BasisTag::Dicke,
        parameter: Some(dist.theta()),
    })
}

/// Multiplies the GHZ coherence (and its derivative) by e^{−NΓt}(1 − λ)^N.
pub fn apply_added_noise(state: &SymmetricDensity, noise: &NoiseSpec, t: f64) -> Result<SymmetricDensity> {
    if state.basis != BasisTag::GhzEffective {
        return Err(Error::Unsupported(
            "added local noise is only defined for qubit and GHZ states".into(),
        ));
    }
    ensure_finite("t", t)?;
    if t < 0.0 {
        return Err(invalid("t", "must be non-negative"));
    }
    let f = noise.coherence_factor(state.n_qubits, t);
    let mut out = state.clone();
    for (i, j) in [(0, 1), (1, 0)] {
        out.entries[(i, j)] *= f;
        if let Some(d) = out.d_entries.as_mut() {
            d[(i, j)] *= f;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_model::{phase_distribution, finite_difference_dvariance, Protocol, SignalSpec};
    use proptest::prelude::*;

    fn law(v: f64) -> PhaseDistribution {
        PhaseDistribution::new(v, 0.3 * v, Theta::Omega).unwrap()
    }

    #[test]
    fn dephasing_factor_values() {
        let d = law(0.2);
        assert_eq!(dephasing_factor(0, &d), (1.0, 0.0));
        let (g, _) = dephasing_factor(3, &d);
        assert!((g - (-3.6f64).exp()).abs() < 1e-16);
        assert!((g - 0.027_32).abs() < 1e-5);

        let spec = SignalSpec::single(1.2, 0.6).unwrap();
        let t = 0.9;
        let dist = phase_distribution(&spec, Protocol::Free, t, Theta::Omega).unwrap();
        let (g1, _) = dephasing_factor(1, &dist);
        let want = (-4.0 * 0.36 * (1.0 - (1.2f64 * t).cos()) / 1.44).exp();
        assert!((g1 - want).abs() < 1e-15);
    }

    #[test]
    fn qubit_limits() {
        let pure = qubit_state(&law(0.0));
        assert_eq!(pure.entries(), &DMatrix::from_element(2, 2, 0.5));
        let mixed = qubit_state(&law(1e3));
        assert_eq!(mixed.coherence(), 0.0);
        let q = qubit_state(&law(0.1));
        assert!((q.coherence() - 0.5 * (-0.2f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn ghz_reduces_to_qubit_and_decays_with_n() {
        let d = law(0.01);
        assert_eq!(ghz_state(1, &d).unwrap(), qubit_state(&d));
        let mut prev = 1.0;
        for n in 1..=50 {
            let c = ghz_state(n, &d).unwrap().coherence();
            assert!(c < prev);
            prev = c;
        }
        let spec = SignalSpec::single(1.0, 0.3).unwrap();
        let dist = phase_distribution(&spec, Protocol::Free, 0.5, Theta::Omega).unwrap();
        let c = ghz_state(5, &dist).unwrap().coherence();
        let want = 0.5 * (-100.0 * 0.09 * (1.0 - 0.5f64.cos())).exp();
        assert!((c - want).abs() < 1e-15);
    }

    #[test]
    fn dicke_small_case() {
        let s = dicke_superposition_state(2, &law(0.1)).unwrap();
        assert!((s.entries()[(0, 1)] - (-0.2f64).exp() / 3.0).abs() < 1e-16);
        assert!((s.entries()[(0, 2)] - (-0.8f64).exp() / 3.0).abs() < 1e-16);
        let sum: f64 = s.entries().clone().symmetric_eigenvalues().iter().sum();
        assert!((sum - 1.0).abs() < 1e-14);
        s.validate().unwrap();
    }

    #[test]
    fn dicke_limits_and_size_limit() {
        let pure = dicke_superposition_state(4, &law(0.0)).unwrap();
        assert!(pure.entries().iter().all(|&x| (x - 0.2).abs() < 1e-16));
        let mixed = dicke_superposition_state(4, &law(1e4)).unwrap();
        assert_eq!(mixed.entries(), &(DMatrix::identity(5, 5) * 0.2));
        assert_eq!(
            dicke_superposition_state(513, &law(0.1)),
            Err(Error::Size { requested: 513, max: 512 })
        );
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let spec = SignalSpec::single(1.0, 1.0).unwrap();
        let t = 0.7;
        let h = 1e-5;
        let build = |w: f64| {
            let s = spec.with_parameter(Theta::Omega, w).unwrap();
            dicke_superposition_state(6, &phase_distribution(&s, Protocol::Free, t, Theta::Omega).unwrap()).unwrap()
        };
        let fd = (build(1.0 + h).entries() - build(1.0 - h).entries()) / (2.0 * h);
        let an = build(1.0).d_entries().unwrap().clone();
        for (a, f) in an.iter().zip(fd.iter()) {
            assert!((a - f).abs() <= 1e-6 * a.abs().max(1e-12), "{a} vs {f}");
        }
        let dv = finite_difference_dvariance(&spec, Protocol::Free, t, Theta::Omega, None).unwrap();
        assert!(dv.is_finite());
    }

    #[test]
    fn noise_reductions() {
        let q = qubit_state(&law(0.05));
        assert_eq!(apply_added_noise(&q, &NoiseSpec::none(), 3.0).unwrap(), q);
        let halved = apply_added_noise(&q, &NoiseSpec::new(2f64.ln(), 0.0).unwrap(), 1.0).unwrap();
        assert!((halved.coherence() - 0.5 * q.coherence()).abs() < 1e-16);
        let g = ghz_state(3, &law(0.05)).unwrap();
        let noisy = apply_added_noise(&g, &NoiseSpec::new(0.2, 0.1).unwrap(), 1.0).unwrap();
        let want = g.coherence() * (-0.6f64).exp() * 0.9f64.powi(3);
        assert!((noisy.coherence() - want).abs() < 1e-16);
        let dicke = dicke_superposition_state(3, &law(0.05)).unwrap();
        assert!(matches!(apply_added_noise(&dicke, &NoiseSpec::none(), 1.0), Err(Error::Unsupported(_))));
        assert!(NoiseSpec::new(-1.0, 0.0).is_err());
        assert!(NoiseSpec::new(0.0, 1.5).is_err());
    }

    proptest! {
        #[test]
        fn dicke_states_are_valid_toeplitz(n in 1usize..40, v in 0.0f64..5.0) {
            let s = dicke_superposition_state(n, &law(v)).unwrap();
            s.validate().unwrap();
            let m = s.entries();
            for i in 1..=n {
                for j in 1..=n {
                    prop_assert_eq!(m[(i, j)], m[(i - 1, j - 1)]);
                }
                prop_assert!(m[(0, i)] <= m[(0, i - 1)]);
            }
        }

        #[test]
        fn ghz_states_are_valid(n in 1usize..200, v in 0.0f64..5.0) {
            ghz_state(n, &law(v)).unwrap().validate().unwrap();
        }
    }
}
