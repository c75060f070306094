//! Seeded Monte Carlo over amplitude draws.
//!
//! Samples are generated in fixed-size batches. Batch `b` draws from a
//! ChaCha8 stream seeded with `seed` on stream number `b`, and each batch
//! reduces to partial sums that are folded in batch order. Results are
//! therefore bit-identical for a given configuration, whether batches run on
//! one thread or many.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::brute_force::{conjugate_diagonal, ghz_density, product_phase_diagonal, MAX_BRUTE_FORCE_QUBITS};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::phase_model::{
    phase_bi_free_common_denominator, phase_exact_bi_free, phase_exact_single, phase_separation_free,
    separation_phase, AmplitudeDraw, CentroidBranch, Protocol, SignalKind, SignalSpec,
};
use crate::probe_states::{BasisTag, SymmetricDensity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub sample_count: u64,
    pub seed: u64,
    pub batch_size: u64,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            sample_count: 1_000_000,
            seed: 0,
            batch_size: 10_000,
            execution: Execution::default(),
        }
    }
}

impl McConfig {
    pub fn new(sample_count: u64, seed: u64) -> Result<Self> {
        let cfg = Self {
            sample_count,
            seed,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_batch_size(mut self, batch_size: u64) -> Result<Self> {
        self.batch_size = batch_size;
        self.validate()?;
        Ok(self)
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count == 0 {
            return Err(invalid("sample_count", "must be positive"));
        }
        if self.batch_size == 0 {
            return Err(invalid("batch_size", "must be positive"));
        }
        Ok(())
    }

    pub fn batch_count(&self) -> u64 {
        self.sample_count.div_ceil(self.batch_size)
    }

    fn batch_len(&self, batch: u64) -> u64 {
        let start = batch * self.batch_size;
        self.batch_size.min(self.sample_count - start)
    }

    fn rng(&self, batch: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(batch);
        rng
    }
}

/// Maps one amplitude draw to the phase for a given signal, protocol and time.
#[derive(Debug, Clone, Copy)]
pub struct PhaseSampler {
    spec: SignalSpec,
    protocol: Protocol,
    t: f64,
}

impl PhaseSampler {
    pub fn new(spec: SignalSpec, protocol: Protocol, t: f64) -> Result<Self> {
        if spec.kind() != protocol.signal_kind() {
            return Err(invalid("protocol", format!("{protocol:?} does not match a {:?} signal", spec.kind())));
        }
        let sampler = Self { spec, protocol, t };
        sampler.phase(&sampler.zero_draw())?;
        Ok(sampler)
    }

    fn zero_draw(&self) -> AmplitudeDraw {
        match self.spec.kind() {
            SignalKind::SingleFreq => AmplitudeDraw::Single { a: 0.0, b: 0.0 },
            SignalKind::BiFreq => AmplitudeDraw::Bi { a1: 0.0, b1: 0.0, a2: 0.0, b2: 0.0 },
        }
    }

    /// Draws A, B (or A₁, B₁, A₂, B₂ in that order) from N(0, σ²).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> AmplitudeDraw {
        let s = self.spec.sigma();
        let mut next = || s * rng.sample::<f64, _>(StandardNormal);
        match self.spec.kind() {
            SignalKind::SingleFreq => AmplitudeDraw::Single { a: next(), b: next() },
            SignalKind::BiFreq => AmplitudeDraw::Bi {
                a1: next(),
                b1: next(),
                a2: next(),
                b2: next(),
            },
        }
    }

    pub fn phase(&self, draw: &AmplitudeDraw) -> Result<f64> {
        let (spec, t) = (&self.spec, self.t);
        match self.protocol {
            Protocol::Free => phase_exact_single(spec, draw, t),
            Protocol::CentroidFree(CentroidBranch::Exact) => phase_exact_bi_free(spec, draw, t),
            Protocol::CentroidFree(CentroidBranch::Approximate) => phase_bi_free_common_denominator(spec, draw, t),
            Protocol::SeparationControlled(branch) => separation_phase(spec, draw, t, branch),
            Protocol::SeparationFree => phase_separation_free(spec, draw, t),
        }
    }

    fn batch(&self, cfg: &McConfig, batch: u64) -> Vec<f64> {
        let mut rng = cfg.rng(batch);
        (0..cfg.batch_len(batch))
            .map(|_| {
                let d = self.draw(&mut rng);
                self.phase(&d).expect("sampler parameters were validated")
            })
            .collect()
    }
}

/// Runs `reduce` on every batch of phases and returns the per-batch results in batch order.
pub fn map_batches<R, F>(sampler: &PhaseSampler, cfg: &McConfig, reduce: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(&[f64]) -> R + Sync + Send,
{
    cfg.validate()?;
    let n = usize::try_from(cfg.batch_count()).map_err(|_| invalid("sample_count", "too many batches"))?;
    Ok(cfg.execution.map_range(n, |b| reduce(&sampler.batch(cfg, b as u64))))
}

/// All sampled phases, in generation order.
pub fn sample_phases(spec: &SignalSpec, protocol: Protocol, t: f64, cfg: &McConfig) -> Result<Vec<f64>> {
    let sampler = PhaseSampler::new(*spec, protocol, t)?;
    Ok(map_batches(&sampler, cfg, <[f64]>::to_vec)?.concat())
}

/// Moment estimates of a zero-mean phase sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseMoments {
    pub samples: u64,
    pub mean: f64,
    pub mean_se: f64,
    /// Second moment about the known zero mean.
    pub variance: f64,
    /// √((m₄ − m₂²)/n).
    pub variance_se: f64,
}

impl PhaseMoments {
    pub fn z_variance(&self, analytic: f64) -> f64 {
        if self.variance_se == 0.0 {
            if self.variance == analytic { 0.0 } else { f64::INFINITY }
        } else {
            (self.variance - analytic) / self.variance_se
        }
    }
}

pub fn moments(spec: &SignalSpec, protocol: Protocol, t: f64, cfg: &McConfig) -> Result<PhaseMoments> {
    let sampler = PhaseSampler::new(*spec, protocol, t)?;
    let partial = map_batches(&sampler, cfg, |phis| {
        phis.iter().fold([0.0; 3], |[s1, s2, s4], &p| {
            let p2 = p * p;
            [s1 + p, s2 + p2, s4 + p2 * p2]
        })
    })?;
    let [s1, s2, s4] = partial
        .iter()
        .fold([0.0; 3], |acc, s| [acc[0] + s[0], acc[1] + s[1], acc[2] + s[2]]);
    let n = cfg.sample_count as f64;
    let (m1, m2, m4) = (s1 / n, s2 / n, s4 / n);
    Ok(PhaseMoments {
        samples: cfg.sample_count,
        mean: m1,
        mean_se: (m2 / n).sqrt(),
        variance: m2,
        variance_se: ((m4 - m2 * m2).max(0.0) / n).sqrt(),
    })
}

/// Estimate of E[e^{2ikφ}] with delete-one-batch jackknife standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharEstimate {
    pub k: u32,
    pub re: f64,
    pub im: f64,
    pub re_se: f64,
    pub im_se: f64,
}

impl CharEstimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    pub fn z_re(&self, analytic: f64) -> f64 {
        z_score(self.re - analytic, self.re_se)
    }

    pub fn z_im(&self) -> f64 {
        z_score(self.im, self.im_se)
    }
}

fn z_score(diff: f64, se: f64) -> f64 {
    if se == 0.0 {
        if diff == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        diff / se
    }
}

/// Shifted power sums of cos(2kφ) − 1 = −2 sin²(kφ) and sin(2kφ) for one k.
#[derive(Debug, Clone, Copy, Default)]
struct CharSums {
    re: f64,
    re2: f64,
    im: f64,
    im2: f64,
}

/// Delete-one jackknife standard error of a sample mean from Σx and Σx²,
/// which reduces exactly to √(Σ(x − x̄)² / (n(n − 1))).
fn jackknife_se(sum: f64, sum_sq: f64, n: f64) -> f64 {
    if n < 2.0 {
        return f64::INFINITY;
    }
    let ss = (sum_sq - sum * sum / n).max(0.0);
    (ss / (n * (n - 1.0))).sqrt()
}

/// E[e^{2ikφ}] for every k in 0..=k_max from one shared sample.
pub fn empirical_char_all(
    spec: &SignalSpec,
    protocol: Protocol,
    t: f64,
    k_max: u32,
    cfg: &McConfig,
) -> Result<Vec<CharEstimate>> {
    let sampler = PhaseSampler::new(*spec, protocol, t)?;
    let kn = k_max as usize + 1;
    let partial = map_batches(&sampler, cfg, |phis| {
        let mut sums = vec![CharSums::default(); kn];
        for &p in phis {
            for (k, s) in sums.iter_mut().enumerate().skip(1) {
                let half = k as f64 * p;
                let d = -2.0 * half.sin().powi(2);
                let im = (2.0 * half).sin();
                s.re += d;
                s.re2 += d * d;
                s.im += im;
                s.im2 += im * im;
            }
        }
        sums
    })?;
    let n = cfg.sample_count as f64;
    Ok((0..kn)
        .map(|k| {
            if k == 0 {
                return CharEstimate { k: 0, re: 1.0, im: 0.0, re_se: 0.0, im_se: 0.0 };
            }
            let tot = partial.iter().fold(CharSums::default(), |acc, b| CharSums {
                re: acc.re + b[k].re,
                re2: acc.re2 + b[k].re2,
                im: acc.im + b[k].im,
                im2: acc.im2 + b[k].im2,
            });
            CharEstimate {
                k: k as u32,
                re: 1.0 + tot.re / n,
                im: tot.im / n,
                re_se: jackknife_se(tot.re, tot.re2, n),
                im_se: jackknife_se(tot.im, tot.im2, n),
            }
        })
        .collect())
}

pub fn empirical_char(spec: &SignalSpec, protocol: Protocol, t: f64, k: u32, cfg: &McConfig) -> Result<CharEstimate> {
    Ok(empirical_char_all(spec, protocol, t, k, cfg)?[k as usize])
}

/// Phase-averaged GHZ state from the full 2^N simulation.
#[derive(Debug, Clone)]
pub struct AveragedGhz {
    pub state: SymmetricDensity,
    /// Standard error of the full coherence γ (twice the corner entry).
    pub coherence_se: f64,
    /// Largest imaginary part found anywhere in the averaged matrix.
    pub max_imag: f64,
}

/// Averages U_φ^{⊗N} ρ_GHZ U_φ^{†⊗N} over sampled phases for N ≤ 6 and
/// reads off the |0…0⟩, |1…1⟩ block.
pub fn averaged_ghz_small_n(
    n_qubits: usize,
    spec: &SignalSpec,
    protocol: Protocol,
    t: f64,
    cfg: &McConfig,
) -> Result<AveragedGhz> {
    if n_qubits > MAX_BRUTE_FORCE_QUBITS {
        return Err(Error::Size { requested: n_qubits, max: MAX_BRUTE_FORCE_QUBITS });
    }
    let rho = ghz_density(n_qubits, 1.0)?;
    let sampler = PhaseSampler::new(*spec, protocol, t)?;
    let dim = rho.nrows();
    let last = dim - 1;
    let partial = map_batches(&sampler, cfg, |phis| {
        let mut acc = nalgebra::DMatrix::<Complex64>::zeros(dim, dim);
        let mut sq = 0.0;
        for &p in phis {
            let conj = conjugate_diagonal(&rho, &product_phase_diagonal(n_qubits, p));
            sq += (2.0 * conj[(0, last)].re).powi(2);
            acc += conj;
        }
        (acc, sq)
    })?;
    let n = cfg.sample_count as f64;
    let (sum, sq) = partial
        .into_iter()
        .fold((nalgebra::DMatrix::<Complex64>::zeros(dim, dim), 0.0), |(a, s), (m, q)| (a + m, s + q));
    let avg = sum / Complex64::new(n, 0.0);
    let gamma = 2.0 * avg[(0, last)].re;
    let coherence_se = ((sq / n - gamma * gamma).max(0.0) / n).sqrt();
    let max_imag = avg.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let block = nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[avg[(0, 0)].re, avg[(0, last)].re, avg[(last, 0)].re, avg[(last, last)].re],
    );
    let state = SymmetricDensity::from_matrix(n_qubits, BasisTag::GhzEffective, block, None, None)?;
    Ok(AveragedGhz { state, coherence_se, max_imag })
}
