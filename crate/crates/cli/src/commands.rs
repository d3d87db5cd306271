use std::f64::consts::PI;
use std::fs;
use std::path::PathBuf;

use transverse_core::dns::{evolve_and_fit, EvolutionConfig, GrowthMeasurement, Scheme, Seed};
use transverse_core::hill::{
    build_block, build_hill, check_propositions, grid_doubling_deltas, spectrum, BlockKind, HillKind,
    PropositionReport, SpectrumSummary, GRID_DOUBLING_COUNT, GRID_DOUBLING_TOLERANCE,
};
use transverse_core::io::{
    describe_checks, growth_csv, read_record, scan_csv, spectrum_csv, write_record, DnsSummary, PipelineReport,
    Record, ScanSummary, WaveSummary,
};
use transverse_core::scanner::{
    scan_kappa, verify_hypotheses, HypothesisReport, Sector, StabilityScan, K_MARGIN,
};
use transverse_core::spectral::{BasisKind, Parity, ParityBasis};
use transverse_core::wave::{solve_wave, tau_for_amplitude, ProblemParams, SolverConfig, WaveProfile};

use crate::options::{Format, Options, TauSpec};
use crate::CliError;

/// Largest relative gap between the DNS rate and the scanner λ that counts
/// as agreement.
const DNS_AGREEMENT: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Spectrum,
    Verify,
    Scan,
    Dns,
    Pipeline,
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: ProblemParams,
    pub tau: TauSpec,
    pub modes: usize,
    pub zero_tolerance: Option<f64>,
    pub kappa_min: Option<f64>,
    pub kappa_max: Option<f64>,
    pub kappa_steps: usize,
    pub sector: Option<Sector>,
    pub kappa: Option<f64>,
    pub dt: Option<f64>,
    pub final_time: Option<f64>,
    pub scheme: Scheme,
    pub seed: Option<u64>,
    pub wave: Option<PathBuf>,
    pub out: PathBuf,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(command: Command, o: Options) -> Result<RunConfig, CliError> {
        let tau = o.tau.unwrap_or(TauSpec::Value(1.0));
        let tau_value = match tau {
            TauSpec::Value(v) => v,
            TauSpec::Amplitude(_) => 1.0,
        };
        let parity: Parity = o.parity.map_or(Parity::Even, Parity::from);
        let params = ProblemParams::new(
            o.alpha.unwrap_or(2.0),
            o.omega.unwrap_or(1.0),
            o.period.unwrap_or(2.0 * PI),
            tau_value,
            parity,
        )?;
        let modes = o.modes.unwrap_or(128);
        if modes < 8 || !modes.is_multiple_of(2) {
            return Err(CliError::Usage(format!("--modes must be an even number >= 8, got {modes}")));
        }
        if let Some(path) = &o.wave {
            if !path.is_file() {
                return Err(CliError::Usage(format!("wave file {} does not exist", path.display())));
            }
        }
        let out = o.out.unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&out)
            .map_err(|e| CliError::Usage(format!("output directory {} is not writable: {e}", out.display())))?;
        Ok(RunConfig {
            command,
            params,
            tau,
            modes,
            zero_tolerance: o.zero_tolerance,
            kappa_min: o.kappa_min,
            kappa_max: o.kappa_max,
            kappa_steps: o.kappa_steps.unwrap_or(60),
            sector: o.sector.map(Sector::from),
            kappa: o.kappa,
            dt: o.dt,
            final_time: o.final_time,
            scheme: o.scheme.map_or(Scheme::ExplicitRk4, Scheme::from),
            seed: o.seed,
            wave: o.wave,
            out,
            format: o.format.unwrap_or(Format::Json),
        })
    }

    fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    fn write_json<T: Record>(&self, name: &str, record: &T) -> Result<(), CliError> {
        if self.format.json() {
            write_record(&self.path(name), record)?;
        }
        Ok(())
    }

    fn write_csv(&self, name: &str, text: &str) -> Result<(), CliError> {
        if self.format.csv() {
            fs::write(self.path(name), text).map_err(transverse_core::Error::from)?;
        }
        Ok(())
    }
}

/// Outcome of a run: `true` when every scientific assertion held.
pub fn run(config: &RunConfig) -> Result<bool, CliError> {
    match config.command {
        Command::Solve => {
            let wave = solve(config)?;
            write_record(&config.path("wave.json"), &wave)?;
            print_wave(&wave);
            Ok(true)
        }
        Command::Spectrum => {
            let wave = load_wave(config)?;
            for s in spectra(&wave, config)? {
                println!("{}: n = {}, z = {}{}", s.operator, s.n_negative, s.kernel_dimension, ambiguity(&s));
            }
            Ok(true)
        }
        Command::Verify => {
            let wave = load_wave(config)?;
            let props = propositions(&wave, config)?;
            let hyps = hypotheses(&wave, config)?;
            Ok(props.passed() && hyps.verdict)
        }
        Command::Scan => {
            let wave = load_wave(config)?;
            let scan = scan(&wave, config)?;
            print_scan(&scan);
            Ok(true)
        }
        Command::Dns => {
            let wave = load_wave(config)?;
            let (kappa, lambda) = match config.kappa {
                Some(k) => (k, None),
                None => {
                    let s = scan(&wave, config)?;
                    if !s.transversally_unstable {
                        return Err(CliError::Usage("no unstable kappa in the scanned range; pass --kappa".into()));
                    }
                    (s.kappa_at_max_growth, Some(s.max_growth_rate))
                }
            };
            let m = dns(&wave, kappa, lambda, config)?;
            Ok(dns_agrees(&m))
        }
        Command::Pipeline => pipeline(config),
    }
}

fn solve(config: &RunConfig) -> Result<WaveProfile, CliError> {
    let solver = SolverConfig::for_parity(config.params.parity).with_modes(config.modes);
    let params = match config.tau {
        TauSpec::Value(_) => config.params,
        TauSpec::Amplitude(a) => {
            let tau = tau_for_amplitude(&config.params, &solver, a)?;
            eprintln!("tau = {tau:.10e} for amplitude {a}");
            config.params.with_tau(tau)
        }
    };
    Ok(solve_wave(&params, &solver)?)
}

fn load_wave(config: &RunConfig) -> Result<WaveProfile, CliError> {
    match &config.wave {
        Some(path) => Ok(read_record(path)?),
        None => solve(config),
    }
}

fn default_sector(wave: &WaveProfile, config: &RunConfig) -> Sector {
    config.sector.unwrap_or(match wave.params.parity {
        Parity::Odd => Sector::Odd,
        _ => Sector::Full,
    })
}

fn spectra(wave: &WaveProfile, config: &RunConfig) -> Result<Vec<SpectrumSummary>, CliError> {
    let basis = ParityBasis::new(BasisKind::FullFourier, *wave.phi.grid());
    let ops = [
        ("l1", build_hill(wave, HillKind::L1, &basis)?),
        ("l2", build_hill(wave, HillKind::L2, &basis)?),
        ("lcal", build_block(wave, BlockKind::Lcal, 0.0, &basis)?),
    ];
    let mut out = Vec::new();
    for (name, op) in ops {
        let s = spectrum(&op, config.zero_tolerance)?;
        config.write_json(&format!("spectrum_{name}.json"), &s)?;
        config.write_csv(&format!("spectrum_{name}.csv"), &spectrum_csv(&s))?;
        out.push(s);
    }
    Ok(out)
}

fn ambiguity(s: &SpectrumSummary) -> &'static str {
    if s.ambiguous {
        " (ambiguous under tolerance doubling)"
    } else {
        ""
    }
}

fn propositions(wave: &WaveProfile, config: &RunConfig) -> Result<PropositionReport, CliError> {
    let report = check_propositions(wave)?;
    config.write_json("propositions.json", &report)?;
    if let Some(note) = &report.note {
        println!("note: {note}");
    }
    print!("{}", describe_checks(&report));
    println!("propositions: {}", if report.passed() { "pass" } else { "FAIL" });
    Ok(report)
}

fn hypotheses(wave: &WaveProfile, config: &RunConfig) -> Result<HypothesisReport, CliError> {
    let report = verify_hypotheses(wave, default_sector(wave, config))?;
    config.write_json("hypotheses.json", &report)?;
    for (name, pass, details) in [
        ("H0", report.h0.pass, &report.h0.details),
        ("H1", report.h1.pass, &report.h1.details),
        ("H2", report.h2.pass, &report.h2.details),
        ("H3", report.h3.pass, &report.h3.details),
        ("H4", report.h4.pass, &report.h4.details),
    ] {
        println!("{} {name}: {details}", if pass { "ok  " } else { "FAIL" });
    }
    println!("hypotheses: {}", if report.verdict { "pass" } else { "FAIL" });
    Ok(report)
}

/// κ above which S(κ) is positive: the square root of minus its lowest
/// eigenvalue at κ = 0.
fn coercivity_kappa(wave: &WaveProfile, sector: Sector) -> Result<f64, CliError> {
    let basis = ParityBasis::new(sector.basis_kind(), *wave.phi.grid());
    let s0 = spectrum(&build_block(wave, BlockKind::SKappa, 0.0, &basis)?, None)?;
    Ok((-s0.eigenvalues[0]).max(0.0).sqrt() * (1.0 + K_MARGIN))
}

fn scan(wave: &WaveProfile, config: &RunConfig) -> Result<StabilityScan, CliError> {
    let sector = default_sector(wave, config);
    let kappa_max = match config.kappa_max {
        Some(k) => k,
        None => (1.5 * coercivity_kappa(wave, sector)?).max(0.5),
    };
    let kappa_min = config.kappa_min.unwrap_or(kappa_max / (2.0 * config.kappa_steps as f64));
    let scan = scan_kappa(wave, kappa_min, kappa_max, config.kappa_steps, sector)?;
    config.write_json("scan.json", &scan)?;
    config.write_csv("scan.csv", &scan_csv(&scan))?;
    Ok(scan)
}

fn print_scan(scan: &StabilityScan) {
    println!(
        "scan: {} kappa points, max growth {:.10e} at kappa {:.10e}, band edges {:?}",
        scan.kappa_values.len(),
        scan.max_growth_rate,
        scan.kappa_at_max_growth,
        scan.band_edges
    );
    println!("{}", if scan.transversally_unstable { "transversally unstable" } else { "no transverse instability detected" });
}

fn print_wave(wave: &WaveProfile) {
    let d = wave.diagnostics();
    println!(
        "wave {}: N = {}, max|phi| = {:.10e}, min phi = {:.10e}, residual {:.3e}, sign changes {}{}",
        wave.id(),
        wave.modes(),
        d.max_abs,
        d.min_value,
        wave.ode_residual_norm,
        d.sign_changes,
        if wave.is_constant() { ", constant" } else { "" }
    );
}

/// RK4 step at a safe fraction of its stability bound, estimated from the
/// largest Fourier symbol plus the potential. Splitting is unconditionally
/// stable and only needs accuracy.
fn default_time_step(wave: &WaveProfile, kappa: f64, scheme: Scheme) -> f64 {
    let xi = wave.phi.grid().max_wavenumber();
    let q = (wave.params.alpha + 1.0) * wave.phi.max_abs().powf(wave.params.alpha);
    let radius = xi * xi + wave.params.omega + kappa * kappa + q;
    match scheme {
        Scheme::ExplicitRk4 => 2.0 / radius,
        Scheme::SplittingOrder2 => 2e-4,
    }
}

fn dns(wave: &WaveProfile, kappa: f64, lambda: Option<f64>, config: &RunConfig) -> Result<GrowthMeasurement, CliError> {
    let dt = config.dt.unwrap_or_else(|| default_time_step(wave, kappa, config.scheme));
    let final_time = config.final_time.unwrap_or(match lambda {
        Some(l) if l > 1e-6 => 40.0 / l,
        _ => 40.0,
    });
    let seed = config.seed.map_or(Seed::LeadingEigenvector, |seed| Seed::Random { seed });
    let evolution = EvolutionConfig::new(dt, final_time, config.scheme, seed).with_sector(default_sector(wave, config));
    let m = evolve_and_fit(wave, kappa, &evolution)?;
    config.write_json("dns.json", &DnsSummary::from(&m))?;
    config.write_csv("growth.csv", &growth_csv(&m))?;
    println!(
        "dns at kappa {:.10e}: fitted rate {:.10e}, scanner {:.10e}, fit residual {:.3e}, gap {}",
        kappa,
        m.fitted_rate,
        m.scanner_lambda,
        m.fit_residual,
        m.relative_gap.map_or("n/a".into(), |g| format!("{g:.3e}"))
    );
    Ok(m)
}

fn dns_agrees(m: &GrowthMeasurement) -> bool {
    m.accepted() && m.relative_gap.is_none_or(|g| g <= DNS_AGREEMENT)
}

fn pipeline(config: &RunConfig) -> Result<bool, CliError> {
    let wave = load_wave(config)?;
    if config.wave.is_none() {
        write_record(&config.path("wave.json"), &wave)?;
    }
    print_wave(&wave);
    let spectra = spectra(&wave, config)?;
    let props = propositions(&wave, config)?;
    let deltas = grid_doubling_deltas(&wave, BasisKind::FullFourier, GRID_DOUBLING_COUNT)?;
    let worst = deltas.iter().fold(0.0_f64, |m, d| m.max(*d));
    println!("grid doubling: largest change of the {} lowest eigenvalues {worst:.3e}", deltas.len());
    let hyps = hypotheses(&wave, config)?;
    let scan = scan(&wave, config)?;
    print_scan(&scan);
    let dns_result = if scan.transversally_unstable {
        Some(dns(&wave, scan.kappa_at_max_growth, Some(scan.max_growth_rate), config)?)
    } else {
        None
    };

    let verdict = match (scan.transversally_unstable, hyps.verdict) {
        (true, true) => "transversally unstable",
        (true, false) => "unstable modes found, hypotheses not verified",
        (false, _) => "no transverse instability detected",
    };
    let passed = props.passed()
        && hyps.verdict
        && worst <= GRID_DOUBLING_TOLERANCE
        && dns_result.as_ref().is_none_or(dns_agrees);
    let report = PipelineReport {
        wave: WaveSummary::from(&wave),
        spectra,
        propositions: props,
        grid_doubling_deltas: deltas,
        hypotheses: hyps,
        scan_summary: ScanSummary::from(&scan),
        dns: dns_result.as_ref().map(DnsSummary::from),
        verdict: verdict.into(),
        passed,
    };
    write_record(&config.path("pipeline.json"), &report)?;
    println!("verdict: {verdict}");
    Ok(passed)
}
