//! One function per subcommand. Each returns a document plus whether a
//! tolerance check failed.

use acfreq_core::bounds::{bound_centroid, bound_separation, bound_single_freq, environment_bound, QfiReport};
use acfreq_core::coherent_control::{
    analytic_spread, coherent_bound, spread_from_hamiltonian, spread_integral_qfi, CoherentFieldSpec, CoherentKind,
};
use acfreq_core::montecarlo::McConfig;
use acfreq_core::phase_model::{phase_distribution, CentroidBranch, Protocol, SeparationBranch, SignalSpec, Theta};
use acfreq_core::probe_states::{dicke_superposition_state, ghz_state, SymmetricDensity};
use acfreq_core::qfi_engine::{fidelity_qfi, fourier_cfi, sld_qfi, two_level_qfi};
use acfreq_core::sweeps::{
    bound_violations, default_mc_grid, effective_error_fit, mc_consistency, probe_sweep, pulse_verify, table1,
    FigConfig, PulseGrid, Table1Config,
};
use acfreq_core::{Error, Execution};

use crate::config::{Kind, RunConfig, StateKind};
use crate::output::{Cell, Document};
use crate::CliError;

pub struct Outcome {
    pub doc: Document,
    /// Set when a tolerance check failed; the document is still written.
    pub failure: Option<String>,
}

impl Outcome {
    fn ok(doc: Document) -> Self {
        Self { doc, failure: None }
    }
}

/// Maps singular-point errors to a row status; parameter errors become usage errors.
fn status_of(err: Error) -> Result<String, CliError> {
    match err {
        Error::InvalidParameter { .. } | Error::Size { .. } => Err(CliError::Usage(err.to_string())),
        Error::ZeroInformation(_) => Ok("zero-information".into()),
        Error::OutOfRange(_) => Ok("out-of-range".into()),
        Error::ResonantDivergence => Ok("resonant-divergence".into()),
        Error::DegenerateDetuning => Ok("degenerate-detuning".into()),
        other => Ok(format!("failed: {other}")),
    }
}

fn core<T>(r: acfreq_core::Result<T>) -> Result<T, CliError> {
    r.map_err(|e| match e {
        Error::InvalidParameter { .. } | Error::Size { .. } => CliError::Usage(e.to_string()),
        other => CliError::Runtime(other.into()),
    })
}

fn theta_of(kind: Kind) -> Theta {
    match kind {
        Kind::Single => Theta::Omega,
        Kind::Centroid => Theta::OmegaS,
        Kind::Separation => Theta::OmegaR,
    }
}

pub fn bound(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let kind = cfg.kind.unwrap_or(Kind::Single);
    let t = cfg.t.unwrap_or(0.7);
    let sigma = cfg.sigma_scalar(1.0)?;
    let (omega, omega_s, omega_r) = match kind {
        Kind::Single => (cfg.omega.unwrap_or(1.0), None, None),
        Kind::Centroid => (f64::NAN, Some(cfg.omega_s.unwrap_or(1.0)), Some(cfg.omega_r.unwrap_or(0.1))),
        Kind::Separation => (f64::NAN, None, Some(cfg.omega_r.unwrap_or(0.7))),
    };
    let result = match kind {
        Kind::Single => bound_single_freq(omega, t, sigma),
        Kind::Centroid => bound_centroid(omega_s.unwrap(), omega_r.unwrap(), t, sigma),
        Kind::Separation => bound_separation(omega_r.unwrap(), t),
    };
    let mut doc = Document::new(
        "bound",
        &["theta", "omega", "omega_s", "omega_r", "t", "sigma", "bound_value", "asymptote", "ratio", "status", "note"],
    );
    doc.param("kind", kind).param_f("t", t).param_f("sigma", sigma);
    match kind {
        Kind::Single => doc.param_f("omega", omega),
        Kind::Centroid => doc.param_f("omega_s", omega_s.unwrap()).param_f("omega_r", omega_r.unwrap()),
        Kind::Separation => doc.param_f("omega_r", omega_r.unwrap()),
    };
    let omega_cell = if kind == Kind::Single { Cell::Float(omega) } else { Cell::Empty };
    let prefix = vec![
        theta_of(kind).name().into(),
        omega_cell,
        omega_s.into(),
        omega_r.into(),
        t.into(),
        if kind == Kind::Separation { Cell::Empty } else { sigma.into() },
    ];
    let tail = match result {
        Ok(report) => {
            let asym = report.diagnostic("asymptote");
            vec![
                report.value.into(),
                asym.into(),
                asym.map(|a| report.value / a).into(),
                "ok".into(),
                report.warnings.join("; ").into(),
            ]
        }
        Err(e) => vec![Cell::Empty, Cell::Empty, Cell::Empty, status_of(e)?.into(), Cell::Empty],
    };
    doc.push(prefix.into_iter().chain(tail).collect());
    Ok(Outcome::ok(doc))
}

struct Setup {
    spec: SignalSpec,
    protocol: Protocol,
    theta: Theta,
}

fn probe_setup(cfg: &RunConfig, kind: Kind, sigma: f64) -> Result<Setup, CliError> {
    Ok(match kind {
        Kind::Single => Setup {
            spec: core(SignalSpec::single(cfg.omega.unwrap_or(1.0), sigma))?,
            protocol: Protocol::Free,
            theta: Theta::Omega,
        },
        Kind::Centroid => Setup {
            spec: core(SignalSpec::from_centroid(
                cfg.omega_s.unwrap_or(1.0),
                cfg.omega_r.unwrap_or(0.1),
                sigma,
            ))?,
            protocol: Protocol::CentroidFree(CentroidBranch::Approximate),
            theta: Theta::OmegaS,
        },
        Kind::Separation => Setup {
            spec: core(SignalSpec::from_centroid(
                cfg.omega_s.unwrap_or(7.0),
                cfg.omega_r.unwrap_or(0.7),
                sigma,
            ))?,
            protocol: Protocol::SeparationControlled(SeparationBranch::FirstOrder),
            theta: Theta::OmegaR,
        },
    })
}

pub fn probe_qfi(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let kind = cfg.kind.unwrap_or(Kind::Single);
    let state_kind = cfg.state.unwrap_or(StateKind::Dicke);
    let n = cfg.n_qubits.unwrap_or(10);
    let t = cfg.t.unwrap_or(0.7);
    let sigma = cfg.sigma_scalar(1.0)?;
    let setup = probe_setup(cfg, kind, sigma)?;
    let mut doc = Document::new(
        "probe-qfi",
        &[
            "state", "N", "theta", "variance", "sld_qfi", "fidelity_qfi", "two_level_qfi", "fourier_cfi", "bound_value",
            "status",
        ],
    );
    doc.param("kind", kind)
        .param("state", state_kind)
        .param("n_qubits", n)
        .param_f("t", t)
        .param_f("sigma", sigma)
        .param_f("omega", setup.spec.omega())
        .param_f("omega_s", setup.spec.omega_s())
        .param_f("omega_r", setup.spec.omega_r())
        .param("protocol", format!("{:?}", setup.protocol));
    let build = |x: f64| -> acfreq_core::Result<SymmetricDensity> {
        let spec = setup.spec.with_parameter(setup.theta, x)?;
        let dist = phase_distribution(&spec, setup.protocol, t, setup.theta)?;
        match state_kind {
            StateKind::Dicke => dicke_superposition_state(n, &dist),
            StateKind::Ghz => ghz_state(n, &dist),
        }
    };
    let theta0 = core(setup.spec.parameter(setup.theta))?;
    let dist = core(phase_distribution(&setup.spec, setup.protocol, t, setup.theta))?;
    let state = core(build(theta0))?;
    let sld = core(sld_qfi(&state))?;
    let fid = core(fidelity_qfi(build, theta0, None))?;
    let two_level = match state_kind {
        StateKind::Ghz => {
            let d = state.d_entries().map_or(0.0, |d| 2.0 * d[(0, 1)]);
            Some(core(two_level_qfi(2.0 * state.coherence(), d))?.value)
        }
        StateKind::Dicke => None,
    };
    let fourier = match state_kind {
        StateKind::Dicke => Some(core(fourier_cfi(&state))?.value),
        StateKind::Ghz => None,
    };
    let bound = environment_bound(&setup.spec, setup.protocol, t, setup.theta).map(|r: QfiReport| r.value);
    let (bound_cell, status) = match bound {
        Ok(b) if dist.is_zero_information() => (Cell::Float(b), "zero-information".to_owned()),
        Ok(b) => (Cell::Float(b), "ok".to_owned()),
        Err(e) => (Cell::Empty, status_of(e)?),
    };
    doc.push(vec![
        state_kind.to_string().into(),
        n.into(),
        setup.theta.name().into(),
        dist.variance().into(),
        sld.value.into(),
        fid.value.into(),
        two_level.into(),
        fourier.into(),
        bound_cell,
        status.into(),
    ]);
    Ok(Outcome::ok(doc))
}

pub fn table1_cmd(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut t1 = Table1Config::default();
    if let Some(w) = cfg.omega {
        t1.omega = w;
    }
    if let Some(t) = cfg.t {
        t1.phase_product = t1.omega * t;
    }
    t1.sigma = cfg.sigma_scalar(t1.sigma)?;
    if let Some(n) = cfg.n_qubits {
        t1.n_ghz = n;
    }
    if let Some(b) = cfg.b_field {
        t1.b_field = b;
    }
    let entries = core(table1(&t1))?;
    let mut doc = Document::new(
        "table1",
        &["formula_id", "row", "column", "value", "asymptote", "relative_deviation", "quadrature"],
    );
    doc.param_f("phase_product", t1.phase_product)
        .param_f("omega", t1.omega)
        .param_f("t", t1.t())
        .param_f("sigma", t1.sigma)
        .param("n_ghz", t1.n_ghz)
        .param_f("centroid_separation_ratio", t1.centroid_separation_ratio)
        .param_f("separation_centroid_ratio", t1.separation_centroid_ratio)
        .param("separation_branch", format!("{:?}", t1.separation_branch))
        .param_f("b_field", t1.b_field)
        .param_f("total_time", t1.total_time);
    for e in entries {
        doc.push(vec![
            e.formula_id.into(),
            e.row.label().into(),
            e.column.into(),
            e.value.into(),
            e.asymptote.into(),
            e.relative_deviation.into(),
            e.quadrature.into(),
        ]);
    }
    Ok(Outcome::ok(doc))
}

pub fn fig(cfg: &RunConfig, separation: bool) -> Result<Outcome, CliError> {
    let mut fc = if separation { FigConfig::separation() } else { FigConfig::single_freq() };
    if let Some(t) = cfg.t {
        fc.t = t;
    }
    let theta_flag = if separation { cfg.omega_r } else { cfg.omega };
    if let Some(w) = theta_flag {
        fc.omega = w;
    }
    if let (true, Some(ws)) = (separation, cfg.omega_s) {
        fc.omega_s = ws;
    }
    if let Some(s) = &cfg.sigma {
        fc.sigmas.clone_from(s);
    }
    if let Some(n) = cfg.n_max {
        fc.n_max = n;
    }
    if fc.n_max == 0 || fc.sigmas.is_empty() {
        return Err(CliError::Usage("n_max and the sigma list must be non-empty".into()));
    }
    let name = if separation { "fig3" } else { "fig2" };
    let rows = probe_sweep(&fc);
    let mut doc = Document::new(
        name,
        &["N", "sigma", "state", "qfi_method", "qfi_value", "bound_value", "fidelity_qfi", "fourier_cfi", "status"],
    );
    doc.param("theta", fc.theta().name()).param_f("t", fc.t);
    if separation {
        doc.param_f("omega_r", fc.omega).param_f("omega_s", fc.omega_s);
    } else {
        doc.param_f("omega", fc.omega);
    }
    doc.param(
        "sigma",
        fc.sigmas.iter().map(|s| crate::output::render_float(*s)).collect::<Vec<_>>().join(";"),
    )
    .param("n_max", fc.n_max)
    .param("separation_branch", format!("{:?}", fc.separation_branch))
    .param("fidelity_check", fc.fidelity_check);
    let violations = bound_violations(&rows, 1e-9).len();
    for r in &rows {
        doc.push(vec![
            r.n.into(),
            r.sigma.into(),
            r.state.label().into(),
            r.qfi_method.as_str().into(),
            r.qfi_value.into(),
            r.bound_value.into(),
            r.fidelity_qfi.into(),
            r.fourier_cfi.into(),
            r.status.as_str().into(),
        ]);
    }
    let failure = (violations > 0).then(|| format!("{violations} rows exceed the environment bound"));
    Ok(Outcome { doc, failure })
}

pub fn montecarlo(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let seed = cfg
        .seed
        .ok_or_else(|| CliError::Usage("montecarlo requires --seed (or `seed` in the config file)".into()))?;
    let samples = cfg.samples.unwrap_or(1_000_000);
    let k_max = cfg.k_max.unwrap_or(10);
    let tolerance = cfg.tolerance.unwrap_or(4.0);
    let mc = core(McConfig::new(samples, seed))?;
    let grid = default_mc_grid();
    let rows = core(mc_consistency(&grid, k_max, &mc))?;
    let mut doc = Document::new("montecarlo", &["point", "quantity", "analytic", "empirical", "standard_error", "z"]);
    doc.param("samples", samples)
        .param("batch_size", mc.batch_size)
        .param("k_max", k_max)
        .param_f("tolerance", tolerance)
        .param("grid", grid.iter().map(|p| p.label).collect::<Vec<_>>().join(";"));
    doc.seed = Some(seed);
    let mut worst = 0.0f64;
    for r in rows {
        worst = worst.max(r.z.abs());
        doc.push(vec![
            r.point.into(),
            r.quantity.into(),
            r.analytic.into(),
            r.empirical.into(),
            r.standard_error.into(),
            r.z.into(),
        ]);
    }
    let failure = (worst >= tolerance).then(|| format!("largest |z| = {worst} reaches the tolerance {tolerance}"));
    Ok(Outcome { doc, failure })
}

pub fn pulse(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut grid = PulseGrid::default();
    if let Some(w) = cfg.omega {
        grid.omega = w;
    }
    let tolerance = cfg.tolerance.unwrap_or(1e-9);
    let rows = core(pulse_verify(&grid, Execution::default()))?;
    let fit = core(effective_error_fit(grid.omega, &grid.detuning_ratios, 50))?;
    let mut doc = Document::new(
        "pulse-verify",
        &["delta_over_omega", "n_pulses", "a", "b", "closed_form", "quadrature", "residual"],
    );
    doc.param_f("omega", grid.omega)
        .param("detuning_ratios", grid.detuning_ratios.len())
        .param(
            "pulse_counts",
            grid.pulse_counts.iter().map(u32::to_string).collect::<Vec<_>>().join(";"),
        )
        .param_f("tolerance", tolerance)
        .param_f("effective_error_slope", fit.slope);
    let mut worst = 0.0f64;
    for r in rows {
        worst = worst.max(r.residual);
        doc.push(vec![
            r.delta_over_omega.into(),
            r.n_pulses.into(),
            r.a.into(),
            r.b.into(),
            r.closed_form.into(),
            r.quadrature.into(),
            r.residual.into(),
        ]);
    }
    let failure = (worst > tolerance).then(|| format!("largest residual {worst:e} exceeds {tolerance:e}"));
    Ok(Outcome { doc, failure })
}

pub fn coherent(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let kind = cfg.kind.unwrap_or(Kind::Single);
    let b = cfg.b_field.unwrap_or(1.0);
    let total = cfg.t.unwrap_or(1.0);
    let n = cfg.n_qubits.unwrap_or(1);
    let (ck, spec) = match kind {
        Kind::Single => (CoherentKind::SingleFreq, core(CoherentFieldSpec::single(b, total, cfg.omega.unwrap_or(1.0), n))?),
        Kind::Centroid | Kind::Separation => {
            let ck = if kind == Kind::Centroid { CoherentKind::Centroid } else { CoherentKind::Separation };
            let spec = core(CoherentFieldSpec::bi(
                b,
                total,
                cfg.omega_s.unwrap_or(1.0),
                cfg.omega_r.unwrap_or(0.02),
                n,
            ))?;
            (ck, spec)
        }
    };
    let mut doc = Document::new(
        "coherent",
        &[
            "theta",
            "N",
            "value",
            "spread_quadrature",
            "hamiltonian_quadrature",
            "asymptote",
            "relative_deviation",
            "status",
        ],
    );
    doc.param("kind", kind)
        .param_f("b_field", b)
        .param_f("total_time", total)
        .param("n_qubits", n)
        .param_f("omega", spec.omega)
        .param_f("omega_r", spec.omega_r);
    let theta = ck.theta().name();
    match coherent_bound(ck, &spec) {
        Ok(report) => {
            let quad = core(spread_integral_qfi(|s| analytic_spread(ck, &spec, s), total))?.value;
            let ham = core(spread_integral_qfi(|s| spread_from_hamiltonian(ck, &spec, s), total))?.value;
            let asym = report.diagnostic("asymptote").unwrap_or(f64::NAN);
            doc.push(vec![
                theta.into(),
                n.into(),
                report.value.into(),
                quad.into(),
                ham.into(),
                asym.into(),
                ((report.value - asym).abs() / asym).into(),
                "ok".into(),
            ]);
        }
        Err(e) => {
            let status = status_of(e)?;
            doc.push(vec![
                theta.into(),
                n.into(),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                status.into(),
            ]);
        }
    }
    Ok(Outcome::ok(doc))
}
