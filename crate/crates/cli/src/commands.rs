use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dirac_qwalk::circuits::DiracCircuitBuilder;
use dirac_qwalk::classical::ClassicalSolver;
use dirac_qwalk::lattice::{snapshot, Axis, LatticeSpec, Potentials, SpinorField};
use dirac_qwalk::qcore::RegisterLayout;
use dirac_qwalk::resources::{
    fit_quadratic, lower_to_fundamental, scaling_study, CostModel, GridSynth, RotationSynthesizer,
    StudyConfig,
};
use dirac_qwalk::spectral::{
    autocorrelation_classical, autocorrelation_quantum, dispersion, feit_fleck_filter,
    spectral_density, success_probability_bound, FilterPlan, MeasurementMode, Window,
};
use dirac_qwalk::splitting::{search_rational_splittings, SplittingScheme};
use dirac_qwalk::stateprep::{prepare_state, rotation_count};

use crate::config::RunConfig;

/// Statevector runs above this many wires are refused.
const MAX_SIMULATED_QUBITS: usize = 26;

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

/// `<prefix>_<suffix>`, keeping the prefix's directory.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(format!("_{suffix}"));
    prefix.with_file_name(name)
}

fn write_snapshot(field: &SpinorField, path: &Path) -> Result<()> {
    let mut out = create(path)?;
    snapshot::write_csv(field, &mut out)?;
    out.flush()?;
    Ok(())
}

struct SeriesWriter {
    out: BufWriter<File>,
}

impl SeriesWriter {
    fn new(path: &Path, header: &str) -> Result<Self> {
        let mut out = create(path)?;
        out.write_all(header.as_bytes())?;
        writeln!(out, "step,t,norm,x,y,z")?;
        Ok(SeriesWriter { out })
    }

    fn row(&mut self, step: usize, t: f64, field: &SpinorField) -> Result<()> {
        let [x, y, z] = field.mean_position();
        writeln!(self.out, "{step},{t},{},{x},{y},{z}", field.norm())?;
        Ok(())
    }

    fn finish(mut self) -> Result<()> {
        self.out.flush()?;
        Ok(())
    }
}

fn check_simulable(width: usize) -> Result<()> {
    if width > MAX_SIMULATED_QUBITS {
        bail!("the circuit needs {width} qubits; statevector simulation is limited to {MAX_SIMULATED_QUBITS}");
    }
    Ok(())
}

fn run_header(cfg: &RunConfig, extra: &[(&str, String)]) -> String {
    let mut h = cfg.header();
    for (k, v) in extra {
        h.push_str(&format!("# {k}={v}\n"));
    }
    h
}

pub fn evolve(cfg: &RunConfig, steps: usize, out: &Path) -> Result<()> {
    let spec = cfg.spec()?;
    let solver = ClassicalSolver::new(spec.clone(), cfg.potentials(), cfg.scheme()?)?;
    let mut field = cfg.initial_field()?;
    write_snapshot(&field, &with_suffix(out, "initial.csv"))?;
    let header = run_header(
        cfg,
        &[("command", "evolve".into()), ("steps", steps.to_string())],
    );
    let mut series = SeriesWriter::new(&with_suffix(out, "series.csv"), &header)?;
    series.row(0, 0.0, &field)?;
    let mut failure = None;
    solver.evolve(&mut field, 0.0, steps, |k, t, f| {
        if failure.is_none() {
            failure = series.row(k, t, f).err();
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    series.finish()?;
    write_snapshot(&field, &with_suffix(out, "final.csv"))?;
    println!(
        "evolve: {steps} steps of dt={} on {} sites, final norm {}",
        spec.dt(),
        spec.sites(),
        field.norm()
    );
    Ok(())
}

pub fn qevolve(cfg: &RunConfig, steps: usize, out: &Path) -> Result<()> {
    let spec = cfg.spec()?;
    let scheme = cfg.scheme()?;
    let builder = DiracCircuitBuilder::new(spec.clone(), cfg.potentials())?;
    let width = builder.layout().n_qubits();
    check_simulable(width)?;
    let first = builder.time_step(&scheme, 0.0)?;
    let mut dump = create(&with_suffix(out, "circuit.txt"))?;
    dump.write_all(first.to_text().as_bytes())?;
    dump.flush()?;

    let initial = cfg.initial_field()?;
    write_snapshot(&initial, &with_suffix(out, "initial.csv"))?;
    let header = run_header(
        cfg,
        &[("command", "qevolve".into()), ("steps", steps.to_string())],
    );
    let mut series = SeriesWriter::new(&with_suffix(out, "series.csv"), &header)?;
    series.row(0, 0.0, &initial)?;
    let mut state = builder.encode(&initial)?;
    let dt = spec.dt();
    for k in 0..steps {
        let t = k as f64 * dt;
        if cfg.time_dependent() && k > 0 {
            builder.time_step(&scheme, t)?.apply(&mut state)?;
        } else {
            first.apply(&mut state)?;
        }
        series.row(k + 1, (k + 1) as f64 * dt, &builder.decode(&state)?)?;
    }
    series.finish()?;
    let field = builder.decode(&state)?;
    write_snapshot(&field, &with_suffix(out, "final.csv"))?;
    println!(
        "qevolve: {steps} steps on {width} qubits ({} instructions per step), final norm {}",
        first.len(),
        field.norm()
    );
    Ok(())
}

pub fn prepare(field_path: &Path, emit: &Path) -> Result<()> {
    let file =
        File::open(field_path).with_context(|| format!("opening {}", field_path.display()))?;
    let field = snapshot::read_csv(BufReader::new(file))
        .with_context(|| format!("reading {}", field_path.display()))?;
    let field = field.normalized().context("snapshot has zero norm")?;
    let layout = RegisterLayout::standard(field.spec())?;
    let circuit = prepare_state(&field, &layout)?;
    let mut out = create(emit)?;
    out.write_all(circuit.to_text().as_bytes())?;
    out.flush()?;
    print!(
        "prepare: {} qubits, {} instructions, {} rotations",
        circuit.n_qubits(),
        circuit.len(),
        rotation_count(&circuit)
    );
    if circuit.n_qubits() <= MAX_SIMULATED_QUBITS {
        let mut state = dirac_qwalk::qcore::QuantumState::zero(circuit.n_qubits())?;
        circuit.apply(&mut state)?;
        let decoded = dirac_qwalk::qcore::decode_field(&state, &layout, field.spec())?;
        print!(", fidelity {:.12}", decoded.fidelity(&field)?);
    }
    println!();
    Ok(())
}

pub struct FeitFleckArgs {
    pub energy: f64,
    pub tf: f64,
    pub window: Window,
    pub points: usize,
    pub threshold: f64,
    pub quantum_autocorr: bool,
    pub sampled: bool,
}

pub fn feit_fleck(cfg: &RunConfig, args: &FeitFleckArgs, out: &Path) -> Result<()> {
    let spec = cfg.spec()?;
    let scheme = cfg.scheme()?;
    let potentials = cfg.potentials();
    let dt = spec.dt();
    if !(args.tf > 0.0) {
        bail!("--tf must be positive, got {}", args.tf);
    }
    let steps = (args.tf / dt).round() as usize;
    if steps < 1 {
        bail!("--tf {} is shorter than one time step ({dt})", args.tf);
    }
    let trial = cfg.initial_field()?;
    let header = run_header(
        cfg,
        &[
            ("command", "feit-fleck".into()),
            ("energy", args.energy.to_string()),
            ("steps", steps.to_string()),
            ("t_f", (steps as f64 * dt).to_string()),
            ("window", args.window.name().into()),
        ],
    );

    let series = if args.quantum_autocorr {
        check_simulable(RegisterLayout::standard(&spec)?.n_qubits() + 1)?;
        autocorrelation_quantum(&trial, &potentials, &scheme, steps)?
    } else {
        let solver = ClassicalSolver::new(spec.clone(), potentials.clone(), scheme.clone())?;
        autocorrelation_classical(&trial, &solver, steps)?
    };
    let mut w = create(&with_suffix(out, "autocorr.csv"))?;
    w.write_all(header.as_bytes())?;
    writeln!(w, "step,t,re,im,abs")?;
    for (k, c) in series.iter().enumerate() {
        writeln!(w, "{k},{},{},{},{}", k as f64 * dt, c.re, c.im, c.norm())?;
    }
    w.flush()?;

    let density = spectral_density(&series, dt, args.window, args.points)?;
    let mut w = create(&with_suffix(out, "spectrum.csv"))?;
    w.write_all(header.as_bytes())?;
    writeln!(w, "energy,abs,re,im")?;
    for (e, v) in density.energies.iter().zip(&density.values) {
        writeln!(w, "{e},{},{},{}", v.norm(), v.re, v.im)?;
    }
    w.flush()?;

    let peaks = density.peaks(args.threshold);
    let mut w = create(&with_suffix(out, "peaks.csv"))?;
    w.write_all(header.as_bytes())?;
    writeln!(w, "energy,magnitude")?;
    for p in &peaks {
        writeln!(w, "{},{}", p.energy, p.magnitude)?;
    }
    w.flush()?;

    check_simulable(RegisterLayout::standard(&spec)?.n_qubits() + 2)?;
    let plan = FilterPlan::new(args.energy, dt, steps, args.window)?;
    let mode = if args.sampled {
        MeasurementMode::Sampled {
            seed: cfg.seed,
            max_attempts: 10_000,
        }
    } else {
        MeasurementMode::Deterministic
    };
    let outcome = feit_fleck_filter(&trial, &potentials, &scheme, &plan, mode)?;
    let mut w = create(&with_suffix(out, "filter.csv"))?;
    w.write_all(header.as_bytes())?;
    writeln!(w, "# attempts={}", outcome.attempts)?;
    writeln!(w, "# branch_probability={}", outcome.branch_probability)?;
    writeln!(w, "# bound={}", success_probability_bound(steps))?;
    writeln!(w, "step,t,step_prob,success_prob")?;
    let mut cumulative = 1.0;
    for (k, p) in outcome.step_probabilities.iter().enumerate() {
        cumulative *= p;
        writeln!(w, "{k},{},{p},{cumulative}", k as f64 * dt)?;
    }
    w.flush()?;
    write_snapshot(&outcome.field, &with_suffix(out, "filtered.csv"))?;

    let listed: Vec<String> = peaks.iter().map(|p| format!("{:.6}", p.energy)).collect();
    println!(
        "feit-fleck: {steps} steps, resolution {:.6}, peaks [{}]",
        density.resolution(),
        listed.join(", ")
    );
    println!(
        "feit-fleck: success probability {:.6} (bound {:.6}), overlap with trial {:.6}",
        outcome.success_probability,
        success_probability_bound(steps),
        outcome.field.fidelity(&trial)?
    );
    Ok(())
}

pub fn dispersion_scan(
    n_star: f64,
    axis: Axis,
    mass: f64,
    ell: f64,
    order: u32,
    points: usize,
    out: Option<&Path>,
) -> Result<()> {
    let mut qubits = [0; 3];
    qubits[axis.index()] = 1;
    let spec = LatticeSpec::new(qubits, ell, n_star)?;
    let scheme = SplittingScheme::by_order(order)?;
    let d = dispersion(&scheme, &spec, mass, axis, points)?;
    let mut text = String::new();
    text.push_str(&format!(
        "# n_star={n_star}\n# axis={}\n# mass={mass}\n# ell={ell}\n# order={order}\n# points={points}\n",
        axis.name()
    ));
    text.push_str(&format!("# modulus_defect={}\n", d.modulus_defect));
    let doublers: Vec<String> = d.doublers.iter().map(f64::to_string).collect();
    text.push_str(&format!("# doublers={}\n", doublers.join(",")));
    text.push_str("p,E1,E2,E3,E4\n");
    for (p, e) in d.momenta.iter().zip(&d.energies) {
        text.push_str(&format!("{p},{},{},{},{}\n", e[0], e[1], e[2], e[3]));
    }
    emit(&text, out)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => {
            let mut w = create(path)?;
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn search_splittings(m: u32, rs: &[u32], p_max: i64, out: Option<&Path>) -> Result<()> {
    if m < 1 {
        bail!("--m must be at least 1");
    }
    if p_max < 1 {
        bail!("--pmax must be at least 1");
    }
    let mut text = String::new();
    let mut found = 0;
    for &r in rs {
        for s in search_rational_splittings(m, r as usize, p_max) {
            text.push_str(&format!("{s}\n"));
            found += 1;
        }
    }
    emit(&text, out)?;
    eprintln!("search-splittings: {found} solutions");
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SynthChoice {
    /// Number-theoretic Clifford+T synthesis.
    Gridsynth,
    /// Calibrated `a + b log2(1/eps)` counts, no gate words.
    Model,
}

fn synthesizer(choice: SynthChoice) -> Result<Box<dyn RotationSynthesizer>> {
    let grid = GridSynth::default();
    Ok(match choice {
        SynthChoice::Gridsynth => Box::new(grid),
        SynthChoice::Model => {
            let angles: Vec<f64> = (1..=8).map(|k| 0.37 * k as f64).collect();
            Box::new(CostModel::calibrate(
                &grid,
                &[1e-3, 1e-5, 1e-7, 1e-9],
                &angles,
            )?)
        }
    })
}

pub struct ResourcesArgs {
    pub dims: u32,
    pub ns: Vec<u32>,
    pub epsilon: f64,
    pub order: u32,
    pub synth: SynthChoice,
    pub example: PathBuf,
}

pub fn resources(args: &ResourcesArgs, out: &Path) -> Result<()> {
    if !(1..=3).contains(&args.dims) {
        bail!("--dims must be 1, 2 or 3, got {}", args.dims);
    }
    if args.dims == 1 && args.ns.iter().any(|&n| n < 2) {
        bail!("the reduced 1-D encoding needs at least 2 qubits per axis");
    }
    let synth = synthesizer(args.synth)?;
    let mut config = StudyConfig::new(args.dims, args.ns.clone());
    config.epsilon = args.epsilon;
    config.scheme = SplittingScheme::by_order(args.order)?;
    if args.order == 3 {
        config.n_star = 2.0;
    }
    let rows = scaling_study(&config, synth.as_ref())?;

    let mut w = create(out)?;
    writeln!(
        w,
        "# dims={}\n# epsilon={}\n# order={}\n# synthesizer={}",
        args.dims,
        args.epsilon,
        args.order,
        synth.name()
    )?;
    writeln!(w, "n,H,S,T,CNOT,total,width")?;
    for r in &rows {
        let c = r.counts;
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.n,
            c.h,
            c.s,
            c.t,
            c.cnot,
            c.total(),
            r.width
        )?;
    }
    w.flush()?;
    if rows.len() >= 3 {
        let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
        let totals: Vec<f64> = rows.iter().map(|r| r.counts.total() as f64).collect();
        let fit = fit_quadratic(&ns, &totals)?;
        println!(
            "resources: total ~ {:.3} n^2 + {:.3} n + {:.3} (R^2 {:.6}, log-log slope {:.3})",
            fit.c2, fit.c1, fit.c0, fit.r_squared, fit.exponent
        );
    }

    let grid = GridSynth::default();
    let spec = LatticeSpec::new([0, 0, 3], 1.0, 1.0)?;
    let step = DiracCircuitBuilder::reduced_1d(spec, Potentials::free(1.0), &[])?
        .time_step(&SplittingScheme::second_order(), 0.0)?;
    let (lowered, report) = lower_to_fundamental(&step, &grid, args.epsilon)?;
    let mut w = create(&args.example)?;
    w.write_all(lowered.to_text().as_bytes())?;
    w.flush()?;
    println!(
        "resources: 1-D massive n_z=3 step: {} on {} qubits",
        report.counts, report.width
    );
    Ok(())
}

/// Inclusive `a..b`, `a..b:step` or a single value.
pub fn parse_range(s: &str) -> Result<Vec<u32>, String> {
    let bad = || format!("expected N, A..B or A..B:STEP, got '{s}'");
    let (span, step) = match s.split_once(':') {
        Some((span, step)) => (span, step.parse::<u32>().map_err(|_| bad())?),
        None => (s, 1),
    };
    if step == 0 {
        return Err(bad());
    }
    let (a, b) = match span.split_once("..") {
        Some((a, b)) => (
            a.parse::<u32>().map_err(|_| bad())?,
            b.trim_start_matches('=')
                .parse::<u32>()
                .map_err(|_| bad())?,
        ),
        None => {
            let a = span.parse::<u32>().map_err(|_| bad())?;
            (a, a)
        }
    };
    if a > b {
        return Err(format!("empty range '{s}'"));
    }
    Ok((a..=b).step_by(step as usize).collect())
}

pub fn parse_axis(s: &str) -> Result<Axis, String> {
    match s {
        "x" => Ok(Axis::X),
        "y" => Ok(Axis::Y),
        "z" => Ok(Axis::Z),
        _ => Err(format!("expected x, y or z, got '{s}'")),
    }
}

pub fn parse_window(s: &str) -> Result<Window, String> {
    Window::parse(s).map_err(|e| e.to_string())
}
