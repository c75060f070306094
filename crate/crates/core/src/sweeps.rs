//! Reproduction sweeps: small-parameter asymptotics, probe QFI versus probe
//! size, Monte Carlo consistency and pulse-sequence verification.
//!
//! Every sweep evaluates independent grid points through [`Execution::map`]
//! and returns rows in a fixed order.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::bounds::{bound_centroid, bound_separation, bound_single_freq, environment_bound, QfiReport};
use crate::coherent_control::{
    analytic_spread, coherent_asymptote, coherent_bound, spread_integral_qfi, CoherentFieldSpec, CoherentKind,
};
use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::montecarlo::{empirical_char_all, moments, McConfig};
use crate::phase_model::{
    phase_distribution, phase_pulse_effective, tone_pulse_phase, toggled_phase_quadrature, CentroidBranch,
    ControlSpec, PhaseDistribution, Protocol, SeparationBranch, SignalSpec, Theta,
};
use crate::probe_states::{dephasing_factor, dicke_superposition_state};
use crate::qfi_engine::{fidelity_qfi, fourier_cfi, sld_qfi, two_level_qfi};

/// QFI of a GHZ-type state (N = 1 is the single qubit) through the two-level formula.
pub fn ghz_qfi(n_qubits: usize, dist: &PhaseDistribution) -> Result<QfiReport> {
    let k = u32::try_from(n_qubits).map_err(|_| invalid("n_qubits", "too large"))?;
    let (g, dg) = dephasing_factor(k, dist);
    let mut r = two_level_qfi(g, dg)?;
    r.parameter = Some(dist.theta());
    Ok(r)
}

/// Row of the small-parameter summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Table1Row {
    SingleFreq,
    Centroid,
    Separation,
}

impl Table1Row {
    pub const ALL: [Table1Row; 3] = [Table1Row::SingleFreq, Table1Row::Centroid, Table1Row::Separation];

    pub fn label(self) -> &'static str {
        match self {
            Table1Row::SingleFreq => "single",
            Table1Row::Centroid => "centroid",
            Table1Row::Separation => "separation",
        }
    }

    fn coherent_kind(self) -> CoherentKind {
        match self {
            Table1Row::SingleFreq => CoherentKind::SingleFreq,
            Table1Row::Centroid => CoherentKind::Centroid,
            Table1Row::Separation => CoherentKind::Separation,
        }
    }
}

/// Parameters for the small-parameter summary.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Table1Config {
    /// The common small product ωt = ω_s t = ω_r t.
    pub phase_product: f64,
    /// Frequency ω (and ω_s); sets t = phase_product/ω.
    pub omega: f64,
    pub sigma: f64,
    pub n_ghz: usize,
    /// ω_r/ω_s for the centroid row; the centroid asymptotes hold as this → 0.
    pub centroid_separation_ratio: f64,
    /// ω_s/ω_r for the separation row (the controlled phase law does not depend on it).
    pub separation_centroid_ratio: f64,
    pub separation_branch: SeparationBranch,
    pub b_field: f64,
    pub total_time: f64,
}

impl Default for Table1Config {
    fn default() -> Self {
        Self {
            phase_product: 0.02,
            omega: 10.0,
            sigma: 1.0,
            n_ghz: 10,
            centroid_separation_ratio: 1e-4,
            separation_centroid_ratio: 10.0,
            separation_branch: SeparationBranch::FirstOrder,
            b_field: 1.0,
            total_time: 1.0,
        }
    }
}

impl Table1Config {
    pub fn t(&self) -> f64 {
        self.phase_product / self.omega
    }

    /// Signal, protocol and parameter for one row.
    pub fn row_setup(&self, row: Table1Row) -> Result<(SignalSpec, Protocol, Theta)> {
        let w = self.omega;
        Ok(match row {
            Table1Row::SingleFreq => (SignalSpec::single(w, self.sigma)?, Protocol::Free, Theta::Omega),
            Table1Row::Centroid => (
                SignalSpec::from_centroid(w, self.centroid_separation_ratio * w, self.sigma)?,
                Protocol::CentroidFree(CentroidBranch::Approximate),
                Theta::OmegaS,
            ),
            Table1Row::Separation => (
                SignalSpec::from_centroid(self.separation_centroid_ratio * w, w, self.sigma)?,
                Protocol::SeparationControlled(self.separation_branch),
                Theta::OmegaR,
            ),
        })
    }

    pub fn row_distribution(&self, row: Table1Row) -> Result<PhaseDistribution> {
        let (spec, protocol, theta) = self.row_setup(row)?;
        phase_distribution(&spec, protocol, self.t(), theta)
    }

    fn coherent_spec(&self, n: usize) -> Result<CoherentFieldSpec> {
        let omega_r = self.phase_product / self.total_time;
        CoherentFieldSpec::bi(self.b_field, self.total_time, 10.0 * omega_r.max(1.0), omega_r, n)
    }
}

/// One entry of the summary: full expression, asymptotic prediction and deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Entry {
    pub formula_id: String,
    pub row: Table1Row,
    pub column: String,
    pub value: f64,
    pub asymptote: f64,
    pub relative_deviation: f64,
    /// For coherent entries: the time-integrated spread evaluated by quadrature.
    pub quadrature: Option<f64>,
}

fn entry(row: Table1Row, column: &str, value: f64, asymptote: f64, quadrature: Option<f64>) -> Table1Entry {
    Table1Entry {
        formula_id: format!("{}.{}", row.label(), column),
        row,
        column: column.to_owned(),
        value,
        asymptote,
        relative_deviation: (value / asymptote - 1.0).abs(),
        quadrature,
    }
}

/// Stochastic probe QFI, incoherent bounds and coherent bounds for all three rows.
pub fn table1(cfg: &Table1Config) -> Result<Vec<Table1Entry>> {
    let t = cfg.t();
    let s2 = cfg.sigma * cfg.sigma;
    let n2 = (cfg.n_ghz * cfg.n_ghz) as f64;
    let mut out = Vec::new();
    for row in Table1Row::ALL {
        let (spec, _, _) = cfg.row_setup(row)?;
        let dist = cfg.row_distribution(row)?;
        let qubit = ghz_qfi(1, &dist)?.value;
        let ghz = ghz_qfi(cfg.n_ghz, &dist)?.value;
        let (qubit_asym, bound, bound_asym) = match row {
            Table1Row::SingleFreq => {
                let w = spec.omega();
                (
                    s2 * t.powi(6) * w * w / 36.0,
                    bound_single_freq(w, t, cfg.sigma)?.value,
                    w * w * t.powi(4) / 72.0,
                )
            }
            Table1Row::Centroid => {
                let w = spec.omega_s();
                (
                    s2 * t.powi(6) * w * w / 18.0,
                    bound_centroid(w, spec.omega_r(), t, cfg.sigma)?.value,
                    w * w * t.powi(4) / 72.0,
                )
            }
            Table1Row::Separation => {
                let wr = spec.omega_r();
                let bound = match cfg.separation_branch {
                    SeparationBranch::FirstOrder => bound_separation(wr, t)?.value,
                    _ => environment_bound(&spec, Protocol::SeparationControlled(cfg.separation_branch), t, Theta::OmegaR)?.value,
                };
                (8.0 * s2 * t.powi(4) / PI.powi(4), bound, 2.0 / (wr * wr))
            }
        };
        out.push(entry(row, "qubit", qubit, qubit_asym, None));
        out.push(entry(row, "ghz", ghz, n2 * qubit_asym, None));
        out.push(entry(row, "bound", bound, bound_asym, None));
        for (column, n) in [("coherent_qubit", 1), ("coherent_ghz", cfg.n_ghz)] {
            let cspec = cfg.coherent_spec(n)?;
            let kind = row.coherent_kind();
            let closed = coherent_bound(kind, &cspec)?.value;
            let quad = spread_integral_qfi(|s| analytic_spread(kind, &cspec, s), cspec.total_time)?.value;
            out.push(entry(row, column, closed, coherent_asymptote(kind, &cspec), Some(quad)));
        }
    }
    Ok(out)
}

/// J(GHZ, N)/J(qubit) for one summary row.
pub fn heisenberg_ratio(cfg: &Table1Config, row: Table1Row, n_qubits: usize) -> Result<f64> {
    let dist = cfg.row_distribution(row)?;
    Ok(ghz_qfi(n_qubits, &dist)?.value / ghz_qfi(1, &dist)?.value)
}

/// Which probe-size sweep to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Figure {
    /// Single frequency, estimating ω.
    SingleFreq,
    /// Controlled separation, estimating ω_r.
    Separation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigConfig {
    pub figure: Figure,
    pub t: f64,
    /// ω for the single-frequency sweep, ω_r for the separation sweep.
    pub omega: f64,
    /// ω_s for the separation sweep.
    pub omega_s: f64,
    pub sigmas: Vec<f64>,
    pub n_max: usize,
    pub separation_branch: SeparationBranch,
    /// Also compute the fidelity-based QFI for Dicke rows.
    pub fidelity_check: bool,
    /// Fidelity step; `None` uses the engine default.
    pub fidelity_delta: Option<f64>,
    #[serde(skip)]
    pub execution: Execution,
}

impl FigConfig {
    pub fn single_freq() -> Self {
        Self {
            figure: Figure::SingleFreq,
            t: 0.7,
            omega: 1.0,
            omega_s: 1.0,
            sigmas: vec![0.25, 0.5, 1.0, 2.0],
            n_max: 100,
            separation_branch: SeparationBranch::FirstOrder,
            fidelity_check: true,
            fidelity_delta: None,
            execution: Execution::default(),
        }
    }

    pub fn separation() -> Self {
        Self {
            figure: Figure::Separation,
            omega: 0.7,
            omega_s: 7.0,
            ..Self::single_freq()
        }
    }

    pub fn theta(&self) -> Theta {
        match self.figure {
            Figure::SingleFreq => Theta::Omega,
            Figure::Separation => Theta::OmegaR,
        }
    }

    fn protocol(&self) -> Protocol {
        match self.figure {
            Figure::SingleFreq => Protocol::Free,
            Figure::Separation => Protocol::SeparationControlled(self.separation_branch),
        }
    }

    pub fn spec(&self, sigma: f64) -> Result<SignalSpec> {
        match self.figure {
            Figure::SingleFreq => SignalSpec::single(self.omega, sigma),
            Figure::Separation => SignalSpec::from_centroid(self.omega_s, self.omega, sigma),
        }
    }

    /// Phase law at parameter value `theta_value` (other inputs fixed).
    pub fn distribution_at(&self, sigma: f64, theta_value: f64) -> Result<PhaseDistribution> {
        let spec = self.spec(sigma)?.with_parameter(self.theta(), theta_value)?;
        phase_distribution(&spec, self.protocol(), self.t, self.theta())
    }

    /// Fisher information of the phase law itself, the ceiling for every probe.
    pub fn bound(&self, sigma: f64) -> Result<f64> {
        match (self.figure, self.separation_branch) {
            (Figure::SingleFreq, _) => Ok(bound_single_freq(self.omega, self.t, sigma)?.value),
            (Figure::Separation, SeparationBranch::FirstOrder) => Ok(bound_separation(self.omega, self.t)?.value),
            (Figure::Separation, _) => {
                Ok(environment_bound(&self.spec(sigma)?, self.protocol(), self.t, self.theta())?.value)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProbeKind {
    DickeSuperposition,
    Ghz,
}

impl ProbeKind {
    pub fn label(self) -> &'static str {
        match self {
            ProbeKind::DickeSuperposition => "dicke_superposition",
            ProbeKind::Ghz => "ghz",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigRow {
    pub n: usize,
    pub sigma: f64,
    pub state: ProbeKind,
    pub qfi_method: String,
    pub qfi_value: f64,
    pub bound_value: f64,
    pub fidelity_qfi: Option<f64>,
    pub fourier_cfi: Option<f64>,
    pub status: String,
}

impl FigRow {
    fn failed(n: usize, sigma: f64, state: ProbeKind, status: String) -> Self {
        Self {
            n,
            sigma,
            state,
            qfi_method: String::new(),
            qfi_value: f64::NAN,
            bound_value: f64::NAN,
            fidelity_qfi: None,
            fourier_cfi: None,
            status,
        }
    }
}

fn fig_point(cfg: &FigConfig, sigma: f64, n: usize, state: ProbeKind) -> Result<FigRow> {
    let theta0 = cfg.spec(sigma)?.parameter(cfg.theta())?;
    let dist = cfg.distribution_at(sigma, theta0)?;
    let bound_value = cfg.bound(sigma)?;
    let mut row = FigRow {
        n,
        sigma,
        state,
        qfi_method: String::new(),
        qfi_value: 0.0,
        bound_value,
        fidelity_qfi: None,
        fourier_cfi: None,
        status: "ok".into(),
    };
    match state {
        ProbeKind::Ghz => {
            let r = ghz_qfi(n, &dist)?;
            row.qfi_method = r.method.label().into();
            row.qfi_value = r.value;
        }
        ProbeKind::DickeSuperposition => {
            let rho = dicke_superposition_state(n, &dist)?;
            let r = sld_qfi(&rho)?;
            row.qfi_method = r.method.label().into();
            row.qfi_value = r.value;
            row.fourier_cfi = Some(fourier_cfi(&rho)?.value);
            if cfg.fidelity_check {
                let build = |x: f64| dicke_superposition_state(n, &cfg.distribution_at(sigma, x)?);
                let f = fidelity_qfi(build, theta0, cfg.fidelity_delta)?;
                if !f.warnings.is_empty() {
                    row.status = "fidelity-step-warning".into();
                }
                row.fidelity_qfi = Some(f.value);
            }
        }
    }
    Ok(row)
}

/// QFI of Dicke-superposition and GHZ probes for N = 1..=n_max at every σ.
/// Rows are ordered by σ, then probe kind, then N; failures are recorded in `status`.
pub fn probe_sweep(cfg: &FigConfig) -> Vec<FigRow> {
    let mut points = Vec::new();
    for &sigma in &cfg.sigmas {
        for state in [ProbeKind::DickeSuperposition, ProbeKind::Ghz] {
            for n in 1..=cfg.n_max {
                points.push((sigma, state, n));
            }
        }
    }
    cfg.execution.map(&points, |&(sigma, state, n)| {
        fig_point(cfg, sigma, n, state).unwrap_or_else(|e| FigRow::failed(n, sigma, state, format!("error: {e}")))
    })
}

/// Rows whose QFI exceeds the bound by more than `rel_slack`, or is NaN.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn bound_violations(rows: &[FigRow], rel_slack: f64) -> Vec<&FigRow> {
    rows.iter()
        .filter(|r| !(r.qfi_value <= r.bound_value * (1.0 + rel_slack)))
        .collect()
}

/// N maximising GHZ QFI at the given σ.
pub fn ghz_argmax(rows: &[FigRow], sigma: f64) -> Option<usize> {
    rows.iter()
        .filter(|r| r.state == ProbeKind::Ghz && r.sigma == sigma && r.qfi_value.is_finite())
        .max_by(|a, b| a.qfi_value.total_cmp(&b.qfi_value))
        .map(|r| r.n)
}

/// Largest Fourier-CFI/QFI ratio over Dicke rows, with its (N, σ).
pub fn best_fourier_ratio(rows: &[FigRow]) -> Option<(f64, usize, f64)> {
    rows.iter()
        .filter(|r| r.state == ProbeKind::DickeSuperposition && r.qfi_value > 0.0)
        .filter_map(|r| r.fourier_cfi.map(|c| (c / r.qfi_value, r.n, r.sigma)))
        .max_by(|a, b| a.0.total_cmp(&b.0))
}

/// A point of the Monte Carlo consistency grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McGridPoint {
    pub label: &'static str,
    pub spec: SignalSpec,
    pub protocol: Protocol,
    pub t: f64,
    pub theta: Theta,
}

/// One point per protocol and branch.
pub fn default_mc_grid() -> Vec<McGridPoint> {
    let single = SignalSpec::single(1.0, 0.5).expect("valid");
    let single_b = SignalSpec::single(2.0, 1.0).expect("valid");
    let bi = SignalSpec::bi(1.3, 0.9, 0.5).expect("valid");
    let sep = SignalSpec::from_centroid(7.0, 0.7, 1.0).expect("valid");
    vec![
        McGridPoint { label: "single_a", spec: single, protocol: Protocol::Free, t: 0.7, theta: Theta::Omega },
        McGridPoint { label: "single_b", spec: single_b, protocol: Protocol::Free, t: 1.3, theta: Theta::Omega },
        McGridPoint {
            label: "centroid_exact",
            spec: bi,
            protocol: Protocol::CentroidFree(CentroidBranch::Exact),
            t: 0.7,
            theta: Theta::OmegaS,
        },
        McGridPoint {
            label: "centroid_approximate",
            spec: bi,
            protocol: Protocol::CentroidFree(CentroidBranch::Approximate),
            t: 0.7,
            theta: Theta::OmegaS,
        },
        McGridPoint {
            label: "separation_exact",
            spec: sep,
            protocol: Protocol::SeparationControlled(SeparationBranch::Exact),
            t: 0.7,
            theta: Theta::OmegaR,
        },
        McGridPoint {
            label: "separation_first_order",
            spec: sep,
            protocol: Protocol::SeparationControlled(SeparationBranch::FirstOrder),
            t: 0.7,
            theta: Theta::OmegaR,
        },
        McGridPoint {
            label: "separation_leading",
            spec: sep,
            protocol: Protocol::SeparationControlled(SeparationBranch::Leading),
            t: 0.7,
            theta: Theta::OmegaR,
        },
        McGridPoint {
            label: "separation_free",
            spec: sep,
            protocol: Protocol::SeparationFree,
            t: 0.7,
            theta: Theta::OmegaR,
        },
    ]
}

/// Analytic versus empirical value of one Monte Carlo quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRow {
    pub point: String,
    pub quantity: String,
    pub analytic: f64,
    pub empirical: f64,
    pub standard_error: f64,
    pub z: f64,
}

/// Phase variance and Re/Im of E[e^{2ikφ}] for k = 1..=k_max at each grid point.
pub fn mc_consistency(grid: &[McGridPoint], k_max: u32, cfg: &McConfig) -> Result<Vec<McRow>> {
    let mut rows = Vec::new();
    for p in grid {
        let dist = phase_distribution(&p.spec, p.protocol, p.t, p.theta)?;
        let m = moments(&p.spec, p.protocol, p.t, cfg)?;
        rows.push(McRow {
            point: p.label.into(),
            quantity: "variance".into(),
            analytic: dist.variance(),
            empirical: m.variance,
            standard_error: m.variance_se,
            z: m.z_variance(dist.variance()),
        });
        for c in empirical_char_all(&p.spec, p.protocol, p.t, k_max, cfg)?.into_iter().skip(1) {
            let (g, _) = dephasing_factor(c.k, &dist);
            rows.push(McRow {
                point: p.label.into(),
                quantity: format!("char_re_k{}", c.k),
                analytic: g,
                empirical: c.re,
                standard_error: c.re_se,
                z: c.z_re(g),
            });
            rows.push(McRow {
                point: p.label.into(),
                quantity: format!("char_im_k{}", c.k),
                analytic: 0.0,
                empirical: c.im,
                standard_error: c.im_se,
                z: c.z_im(),
            });
        }
    }
    Ok(rows)
}

/// Grid for pulse verification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseGrid {
    pub omega: f64,
    pub detuning_ratios: Vec<f64>,
    pub pulse_counts: Vec<u32>,
    pub draws: Vec<(f64, f64)>,
}

impl Default for PulseGrid {
    fn default() -> Self {
        let ratios = (0..=12).map(|i| 1e-3 * 300f64.powf(f64::from(i) / 12.0)).collect();
        Self {
            omega: 1.0,
            detuning_ratios: ratios,
            pulse_counts: vec![1, 2, 3, 5, 10, 20, 50, 100, 200],
            draws: vec![(1.0, 0.0), (0.0, 1.0), (0.37, -0.82)],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseRow {
    pub delta_over_omega: f64,
    pub n_pulses: u32,
    pub a: f64,
    pub b: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    /// |closed − quadrature| / max(|quadrature|, scale), with scale the
    /// integral of |A sin| + |B cos| over one pulse interval.
    pub residual: f64,
}

/// Closed-form pulse phase against toggled-sign quadrature on the grid.
pub fn pulse_verify(grid: &PulseGrid, execution: Execution) -> Result<Vec<PulseRow>> {
    let mut points = Vec::new();
    for &x in &grid.detuning_ratios {
        for &np in &grid.pulse_counts {
            for &(a, b) in &grid.draws {
                points.push((x, np, a, b));
            }
        }
    }
    execution
        .map(&points, |&(x, np, a, b)| {
            let control = ControlSpec::detuned(grid.omega, x * grid.omega, np)?;
            let closed = tone_pulse_phase(grid.omega, a, b, &control)?;
            let quad = toggled_phase_quadrature(grid.omega, a, b, &control);
            let scale = (a.abs() + b.abs()) * control.tau() * 1e-3;
            Ok(PulseRow {
                delta_over_omega: x,
                n_pulses: np,
                a,
                b,
                closed_form: closed,
                quadrature: quad,
                residual: (closed - quad).abs() / quad.abs().max(scale),
            })
        })
        .into_iter()
        .collect()
}

/// Relative error of the 2/(πδ) effective phase at each δ/ω.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveErrorFit {
    pub ratios: Vec<f64>,
    pub errors: Vec<f64>,
    /// Least-squares slope of log(error) against log(δ/ω).
    pub slope: f64,
}

pub fn effective_error_fit(omega: f64, ratios: &[f64], n_pulses: u32) -> Result<EffectiveErrorFit> {
    let mut errors = Vec::with_capacity(ratios.len());
    for &x in ratios {
        let control = ControlSpec::detuned(omega, x * omega, n_pulses)?;
        let exact = tone_pulse_phase(omega, 1.0, 1.0, &control)?;
        let eff = phase_pulse_effective(x * omega, 1.0, 1.0, control.duration())?;
        errors.push(((eff - exact) / exact).abs());
    }
    let lx: Vec<f64> = ratios.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(EffectiveErrorFit {
        ratios: ratios.to_vec(),
        errors,
        slope: sxy / sxx,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_entries_are_close_to_asymptotes() {
        let entries = table1(&Table1Config::default()).unwrap();
        assert_eq!(entries.len(), 15);
        for e in &entries {
            assert!(e.relative_deviation < 1e-2, "{}: {}", e.formula_id, e.relative_deviation);
        }
    }

    #[test]
    fn ghz_n1_equals_qubit_closed_form() {
        let cfg = FigConfig { sigmas: vec![1.0], n_max: 3, fidelity_check: false, ..FigConfig::single_freq() };
        let rows = probe_sweep(&cfg);
        let ghz1 = rows.iter().find(|r| r.state == ProbeKind::Ghz && r.n == 1).unwrap();
        let v = 2.0 * (1.0 - 0.7f64.cos());
        let dv = 2.0 * (0.7 * 0.7f64.sin() - 2.0 * (1.0 - 0.7f64.cos()));
        let g = (-2.0 * v).exp();
        let want = (2.0 * dv * g).powi(2) / (1.0 - g * g);
        assert!((ghz1.qfi_value - want).abs() < 1e-12 * want);
    }

    #[test]
    fn pulse_grid_passes_and_slope_is_one() {
        let rows = pulse_verify(&PulseGrid { pulse_counts: vec![1, 7, 40], ..PulseGrid::default() }, Execution::Sequential).unwrap();
        assert!(rows.iter().all(|r| r.residual < 1e-9));
        let fit = effective_error_fit(1.0, &PulseGrid::default().detuning_ratios, 50).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.1, "{fit:?}");
    }
}
