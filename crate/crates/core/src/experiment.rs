//! Batch experiments: configuration, gate- and pulse-level runs, sweeps over
//! all six permutations, gate compilation, and the files they leave behind.
//!
//! Every output is a pure function of the configuration and seed, so two runs
//! with the same inputs write byte-identical files. Wall time is reported on
//! the log only.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compiler::{compile, compile_named, inverse_sequence, CompileReport, CompiledSequence, GateName, GateSpec};
use crate::error::{Error, Result};
use crate::linalg::Operator3;
use crate::oracle::{parity_by_counting, run_parity_algorithm, AlgorithmTrace, Parity, PermutationMap};
use crate::spectro::{
    classify_spectrum, pick_peaks, synthesize_fid, transform, Acquisition, Fid, ReadoutResult, Spectrum,
    DEFAULT_DETECTION_FLIP_DEG, DEFAULT_PEAK_THRESHOLD,
};
use crate::spin::{
    pseudopure_preparation, run_pulse_program, thermal_deviation, Event, HamiltonianParams, Pulse,
    RelaxationParams, MEASURED_T1_S, MEASURED_T2_S,
};

/// Default output directory when neither the command line nor the config
/// names one.
pub const OUTPUT_DIR_ENV: &str = "QUTRIT_PARITY_OUTPUT_DIR";
pub const FALLBACK_OUTPUT_DIR: &str = "qutrit-parity-out";
pub const DEFAULT_LAMBDA_Q_HZ: f64 = 156.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Ideal state-vector algorithm.
    Gate,
    /// Full pulse program, detection and spectrum.
    #[default]
    Pulse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    /// Standard deviation of the Gaussian error added to every pulse flip.
    pub pulse_angle_sigma_deg: f64,
    pub seed: u64,
    /// Sweep repetitions.
    pub repetitions: usize,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            pulse_angle_sigma_deg: 0.0,
            seed: 0,
            repetitions: 1,
        }
    }
}

/// Run configuration. Parsed from TOML; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    /// Standard name (`f1`…`f6`) or two-row Cauchy text.
    pub permutation: Option<String>,
    /// Λ/2π.
    pub lambda_q_hz: f64,
    pub t1_s: f64,
    pub t2_s: f64,
    pub detection_flip_deg: f64,
    pub acquisition: Acquisition,
    pub noise: NoiseConfig,
    /// Kept out of run records so the record does not depend on where it is
    /// written.
    #[serde(skip_serializing)]
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mode: Mode::default(),
            permutation: None,
            lambda_q_hz: DEFAULT_LAMBDA_Q_HZ,
            t1_s: MEASURED_T1_S,
            t2_s: MEASURED_T2_S,
            detection_flip_deg: DEFAULT_DETECTION_FLIP_DEG,
            acquisition: Acquisition::default(),
            noise: NoiseConfig::default(),
            output_dir: None,
        }
    }
}

/// Physics derived from a validated [`RunConfig`].
#[derive(Debug, Clone, Copy)]
pub struct Setup {
    pub params: HamiltonianParams,
    pub relaxation: RelaxationParams,
    pub acquisition: Acquisition,
    pub detection_flip_deg: f64,
    pub sigma_deg: f64,
    pub seed: u64,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn setup(&self) -> Result<Setup> {
        if !(self.lambda_q_hz.is_finite() && self.lambda_q_hz != 0.0) {
            return Err(Error::Config(format!("lambda_q_hz must be finite and nonzero, got {}", self.lambda_q_hz)));
        }
        if !(0.0..=360.0).contains(&self.detection_flip_deg) {
            return Err(Error::Config(format!(
                "detection_flip_deg {} outside [0, 360]",
                self.detection_flip_deg
            )));
        }
        let sigma = self.noise.pulse_angle_sigma_deg;
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::Config(format!("pulse_angle_sigma_deg must be >= 0, got {sigma}")));
        }
        if self.noise.repetitions == 0 {
            return Err(Error::Config("repetitions must be >= 1".into()));
        }
        let setup = Setup {
            params: HamiltonianParams::from_lambda_hz(self.lambda_q_hz)?,
            relaxation: RelaxationParams::new(self.t1_s, self.t2_s)?,
            acquisition: self.acquisition,
            detection_flip_deg: self.detection_flip_deg,
            sigma_deg: sigma,
            seed: self.noise.seed,
        };
        if self.mode == Mode::Gate {
            self.warn_ignored_for_gate_mode();
        }
        Ok(setup)
    }

    fn warn_ignored_for_gate_mode(&self) {
        let d = RunConfig::default();
        let ignored = [
            ("lambda_q_hz", self.lambda_q_hz != d.lambda_q_hz),
            ("t1_s", self.t1_s != d.t1_s),
            ("t2_s", self.t2_s != d.t2_s),
            ("detection_flip_deg", self.detection_flip_deg != d.detection_flip_deg),
            ("acquisition", self.acquisition != d.acquisition),
            ("noise.pulse_angle_sigma_deg", self.noise.pulse_angle_sigma_deg != 0.0),
        ];
        for (name, set) in ignored {
            if set {
                log::warn!("{name} has no effect in gate mode");
            }
        }
    }

    pub fn permutation(&self) -> Result<PermutationMap> {
        let text = self
            .permutation
            .as_deref()
            .ok_or_else(|| Error::Config("no permutation given".into()))?;
        PermutationMap::from_name_or_cauchy(text)
    }

    /// Command line, then config file, then [`OUTPUT_DIR_ENV`], then
    /// [`FALLBACK_OUTPUT_DIR`].
    pub fn resolved_output_dir(&self) -> PathBuf {
        self.output_dir
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(FALLBACK_OUTPUT_DIR))
    }
}

/// Process exit status of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Classified,
    Unclassifiable,
}

impl Status {
    /// 0 classified, 2 unclassifiable. Configuration and usage errors
    /// surface as `Err` and map to 1.
    pub fn code(self) -> i32 {
        match self {
            Status::Classified => 0,
            Status::Unclassifiable => 2,
        }
    }
}

/// Preparation, `F`, the oracle, `F⁻¹`: everything before detection.
pub fn algorithm_program(p: &PermutationMap) -> Result<Vec<Event>> {
    let f = compile(&GateSpec::named(GateName::F)?)?;
    let oracle = compile(&GateSpec::named(GateName::oracle(p))?)?;
    let mut events = pseudopure_preparation();
    events.extend(f.events.iter().cloned());
    events.extend(oracle.events);
    events.extend(inverse_sequence(&f.events)?);
    Ok(events)
}

/// Crusher `g2` then the non-selective detection pulse about +y.
pub fn detection_program(flip_deg: f64) -> Result<Vec<Event>> {
    let mut events = vec![Event::gradient("g2")];
    if flip_deg > 0.0 {
        events.push(Event::pulse(Pulse::nonselective(flip_deg, 90.0)?));
    }
    Ok(events)
}

/// Adds an independent N(0, σ²) error to every pulse flip angle. The stream
/// is fixed by `(seed, stream)` so each sweep cell draws the same numbers
/// regardless of scheduling.
pub fn perturb_flips(events: &[Event], sigma_deg: f64, seed: u64, stream: u64) -> Result<Vec<Event>> {
    if sigma_deg == 0.0 {
        return Ok(events.to_vec());
    }
    let normal = Normal::new(0.0, sigma_deg).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    events
        .iter()
        .map(|e| match e {
            Event::Pulse(p) => Ok(Event::Pulse(p.with_flip_error(rng.sample(normal))?)),
            other => Ok(other.clone()),
        })
        .collect()
}

fn noise_stream(repetition: usize, p: &PermutationMap) -> u64 {
    (repetition * 6 + p.index()) as u64
}

/// One pulse-level experiment.
#[derive(Debug, Clone)]
pub struct PulseRun {
    pub program: Vec<Event>,
    /// Deviation just before the crusher and detection pulse.
    pub pre_detection: Operator3,
    pub fid: Fid,
    pub spectrum: Spectrum,
    pub line12: f64,
    pub line23: f64,
    pub readout: Option<ReadoutResult>,
}

pub fn simulate_pulse(setup: &Setup, p: &PermutationMap, repetition: usize) -> Result<PulseRun> {
    let algorithm = algorithm_program(p)?;
    let n_algorithm = algorithm.len();
    let mut ideal = algorithm;
    ideal.extend(detection_program(setup.detection_flip_deg)?);
    let program = perturb_flips(&ideal, setup.sigma_deg, setup.seed, noise_stream(repetition, p))?;

    let pre = run_pulse_program(&thermal_deviation(), &program[..n_algorithm], &setup.params)?;
    let detected = run_pulse_program(&pre, &program[n_algorithm..], &setup.params)?;
    let acq = setup.acquisition;
    let fid = synthesize_fid(&detected, &setup.params, &setup.relaxation, acq.n, acq.dwell_s)?;
    let spectrum = transform(&fid);
    let peaks = pick_peaks(&spectrum, DEFAULT_PEAK_THRESHOLD)?;
    let (readout, line12, line23) = match classify_spectrum(&peaks, &setup.params) {
        Ok(r) => (Some(r), r.line12, r.line23),
        Err(Error::UnclassifiableSpectrum { line12, line23 }) => (None, line12, line23),
        Err(e) => return Err(e),
    };
    Ok(PulseRun {
        program,
        pre_detection: *pre.entries(),
        fid,
        spectrum,
        line12,
        line23,
        readout,
    })
}

/// Readout as exported; `verdict` and `confidence` are null when the
/// spectrum cannot be classified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReadoutRecord {
    pub verdict: Option<Parity>,
    pub line12: f64,
    pub line23: f64,
    pub confidence: Option<f64>,
}

impl From<&PulseRun> for ReadoutRecord {
    fn from(r: &PulseRun) -> Self {
        Self {
            verdict: r.readout.map(|x| x.verdict),
            line12: r.line12,
            line23: r.line23,
            confidence: r.readout.map(|x| x.confidence),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: RunConfig,
    pub permutation: String,
    pub cauchy: String,
    /// Parity by counting inversions.
    pub expected: Parity,
    pub verdict: Option<Parity>,
    pub trace: Option<AlgorithmTrace>,
    pub pulse_program: Option<Vec<Event>>,
    pub pre_detection_deviation: Option<Operator3>,
    pub readout: Option<ReadoutRecord>,
    #[serde(skip)]
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub record: RunRecord,
    pub status: Status,
    pub files: Vec<PathBuf>,
}

/// Writes `contents` through a temporary file in the same directory and
/// renames it into place.
fn write_atomic(path: &Path, contents: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut w = BufWriter::new(tmp.as_file_mut());
        contents(&mut w)?;
        w.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    write_atomic(path, |w| writeln!(w, "{text}"))
}

pub fn cmd_run(config: &RunConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    let setup = config.setup()?;
    let p = config.permutation()?;
    let dir = config.resolved_output_dir();
    let mut files = Vec::new();
    let mut record = RunRecord {
        config: config.clone(),
        permutation: p.tag().to_string(),
        cauchy: p.to_string(),
        expected: parity_by_counting(&p),
        verdict: None,
        trace: None,
        pulse_program: None,
        pre_detection_deviation: None,
        readout: None,
        wall_time_s: 0.0,
    };
    match config.mode {
        Mode::Gate => {
            let trace = run_parity_algorithm(&p);
            record.verdict = Some(trace.verdict);
            record.trace = Some(trace);
            files.push(dir.join("trace.json"));
            write_json(&files[0], &trace)?;
        }
        Mode::Pulse => {
            let run = simulate_pulse(&setup, &p, 0)?;
            let readout = ReadoutRecord::from(&run);
            let program = dir.join("pulse_program.json");
            write_json(&program, &run.program)?;
            let fid = dir.join("fid.tsv");
            write_atomic(&fid, |w| run.fid.write_tsv(w))?;
            let spectrum = dir.join("spectrum.tsv");
            write_atomic(&spectrum, |w| run.spectrum.write_tsv(w))?;
            let readout_path = dir.join("readout.json");
            write_json(&readout_path, &readout)?;
            files.extend([program, fid, spectrum, readout_path]);
            record.verdict = readout.verdict;
            record.pulse_program = Some(run.program);
            record.pre_detection_deviation = Some(run.pre_detection);
            record.readout = Some(readout);
        }
    }
    let record_path = dir.join("run_record.json");
    write_json(&record_path, &record)?;
    files.push(record_path);
    record.wall_time_s = start.elapsed().as_secs_f64();
    log::info!("run {} finished in {:.3} s", record.permutation, record.wall_time_s);
    let status = if record.verdict.is_some() {
        Status::Classified
    } else {
        Status::Unclassifiable
    };
    Ok(RunOutcome { record, status, files })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub repetition: usize,
    pub permutation: String,
    pub expected: Parity,
    pub gate_verdict: Parity,
    pub verdict: Option<Parity>,
    pub line12: Option<f64>,
    pub line23: Option<f64>,
    /// Verdict equals the counting parity.
    pub correct: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub config: RunConfig,
    pub rows: Vec<SweepRow>,
    pub correct: usize,
    pub unclassifiable: usize,
    pub total: usize,
    pub accuracy: f64,
    /// Gate- and pulse-level verdicts coincide on every row.
    pub modes_agree: bool,
}

impl SweepSummary {
    pub fn status(&self) -> Status {
        if self.unclassifiable == 0 {
            Status::Classified
        } else {
            Status::Unclassifiable
        }
    }

    pub fn write_tsv<W: Write + ?Sized>(&self, w: &mut W) -> std::io::Result<()> {
        let opt = |v: Option<f64>| v.map_or(String::new(), |x| x.to_string());
        writeln!(w, "repetition\tpermutation\texpected\tverdict\tline12\tline23\tcorrect")?;
        for r in &self.rows {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.repetition,
                r.permutation,
                r.expected,
                r.verdict.map_or("unclassifiable", Parity::as_str),
                opt(r.line12),
                opt(r.line23),
                r.correct
            )?;
        }
        writeln!(w, "# accuracy\t{}/{}\t{}", self.correct, self.total, self.accuracy)
    }
}

/// All six permutations, `noise.repetitions` times each. Spectra of the
/// first repetition go to `spectra/<name>.tsv`.
pub fn cmd_sweep(config: &RunConfig) -> Result<SweepSummary> {
    let start = Instant::now();
    let setup = config.setup()?;
    if config.permutation.is_some() {
        log::warn!("permutation is ignored by sweep");
    }
    let dir = config.resolved_output_dir();
    let reps = match config.mode {
        Mode::Gate => 1,
        Mode::Pulse => config.noise.repetitions,
    };
    let cells: Vec<(usize, PermutationMap)> = (0..reps)
        .flat_map(|r| PermutationMap::all().into_iter().map(move |p| (r, p)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|(rep, p)| -> Result<SweepRow> {
            let expected = parity_by_counting(p);
            let gate_verdict = run_parity_algorithm(p).verdict;
            let (verdict, line12, line23) = match config.mode {
                Mode::Gate => (Some(gate_verdict), None, None),
                Mode::Pulse => {
                    let run = simulate_pulse(&setup, p, *rep)?;
                    if *rep == 0 {
                        let path = dir.join("spectra").join(format!("{}.tsv", p.tag()));
                        write_atomic(&path, |w| run.spectrum.write_tsv(w))?;
                    }
                    (run.readout.map(|r| r.verdict), Some(run.line12), Some(run.line23))
                }
            };
            Ok(SweepRow {
                repetition: *rep,
                permutation: p.tag().to_string(),
                expected,
                gate_verdict,
                verdict,
                line12,
                line23,
                correct: verdict == Some(expected),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let total = rows.len();
    let correct = rows.iter().filter(|r| r.correct).count();
    let summary = SweepSummary {
        config: config.clone(),
        correct,
        unclassifiable: rows.iter().filter(|r| r.verdict.is_none()).count(),
        total,
        accuracy: correct as f64 / total as f64,
        modes_agree: rows.iter().all(|r| r.verdict == Some(r.gate_verdict)),
        rows,
    };
    write_atomic(&dir.join("summary.tsv"), |w| summary.write_tsv(w))?;
    write_json(&dir.join("summary.json"), &summary)?;
    log::info!(
        "sweep: {}/{} correct in {:.3} s",
        summary.correct,
        summary.total,
        start.elapsed().as_secs_f64()
    );
    Ok(summary)
}

/// Writes `<gate>.program.json` and `<gate>.report.json`.
pub fn cmd_compile(gate: &str, output_dir: &Path) -> Result<(CompiledSequence, Vec<PathBuf>)> {
    let seq = compile_named(gate)?;
    let name = seq.gate.name.as_str();
    let program = output_dir.join(format!("{name}.program.json"));
    let report = output_dir.join(format!("{name}.report.json"));
    write_json(&program, &seq.events)?;
    write_json::<CompileReport>(&report, &seq.report())?;
    Ok((seq, vec![program, report]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compiler::sequence_propagator;
    use crate::linalg::Level;
    use crate::oracle::{fourier3, unitary_of};

    fn cfg(dir: &Path) -> RunConfig {
        RunConfig {
            output_dir: Some(dir.to_path_buf()),
            ..Default::default()
        }
    }

    #[test]
    fn toml_defaults_and_sections() {
        let c = RunConfig::from_toml_str("").unwrap();
        assert_eq!(c, RunConfig::default());
        let c = RunConfig::from_toml_str(
            "mode = \"gate\"\npermutation = \"(1 0 -1 / 0 1 -1)\"\nlambda_q_hz = 200.0\n\
             [acquisition]\nn = 1024\n[noise]\npulse_angle_sigma_deg = 2.5\nseed = 7\n",
        )
        .unwrap();
        assert_eq!(c.mode, Mode::Gate);
        assert_eq!(c.acquisition.n, 1024);
        assert_eq!(c.acquisition.dwell_s, Acquisition::default().dwell_s);
        assert_eq!((c.noise.seed, c.noise.repetitions), (7, 1));
        assert_eq!(c.permutation().unwrap().tag(), "f4");
        assert!(RunConfig::from_toml_str("bogus = 1").is_err());
        assert!(RunConfig::from_toml_str("mode = \"analog\"").is_err());
    }

    #[test]
    fn invalid_physics_rejected() {
        for text in ["t2_s = 1.0", "t1_s = -1.0", "lambda_q_hz = 0.0", "[noise]\npulse_angle_sigma_deg = -1.0"] {
            assert!(RunConfig::from_toml_str(text).unwrap().setup().is_err(), "{text}");
        }
        assert!(RunConfig::default().permutation().is_err());
    }

    #[test]
    fn algorithm_program_realizes_circuit() {
        // Preparation pulse then g1, then F·U·F⁻¹ with no further gradients.
        for p in PermutationMap::all() {
            let events = algorithm_program(&p).unwrap();
            let tail = &events[2..];
            assert!(tail.iter().all(|e| !matches!(e, Event::Gradient(_))));
            let u = sequence_propagator(tail).unwrap();
            let want = fourier3().dagger() * unitary_of(&p) * fourier3();
            assert!(crate::compiler::fidelity(&want, &u) > 1.0 - 1e-9, "{}", p.tag());
        }
    }

    #[test]
    fn pulse_level_populations_match_gate_level() {
        let setup = RunConfig::default().setup().unwrap();
        for p in PermutationMap::all() {
            let run = simulate_pulse(&setup, &p, 0).unwrap();
            let landing = match parity_by_counting(&p) {
                Parity::Even => Level::Minus,
                Parity::Odd => Level::Zero,
            };
            let mut want = [0.5; 3];
            want[landing.index()] = -1.0;
            for (i, w) in want.iter().enumerate() {
                assert!((run.pre_detection.get(i, i).re - w).abs() < 1e-9, "{}", p.tag());
            }
            assert_eq!(run.readout.unwrap().verdict, parity_by_counting(&p));
        }
    }

    #[test]
    fn noise_streams_are_reproducible_and_distinct() {
        let events = algorithm_program(&PermutationMap::identity()).unwrap();
        let a = perturb_flips(&events, 5.0, 11, 3).unwrap();
        assert_eq!(a, perturb_flips(&events, 5.0, 11, 3).unwrap());
        assert_ne!(a, perturb_flips(&events, 5.0, 11, 4).unwrap());
        assert_ne!(a, events);
        assert_eq!(perturb_flips(&events, 0.0, 11, 3).unwrap(), events);
    }

    #[test]
    fn run_writes_expected_files() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = cfg(tmp.path());
        c.permutation = Some("f4".into());
        let out = cmd_run(&c).unwrap();
        assert_eq!(out.status, Status::Classified);
        assert_eq!(out.record.verdict, Some(Parity::Odd));
        for f in ["pulse_program.json", "fid.tsv", "spectrum.tsv", "readout.json", "run_record.json"] {
            assert!(tmp.path().join(f).is_file(), "{f}");
        }
        let spectrum = fs::read_to_string(tmp.path().join("spectrum.tsv")).unwrap();
        assert!(spectrum.starts_with("frequency_hz\treal\timag\tmagnitude\n"));
        assert_eq!(spectrum.lines().count(), 1 + c.acquisition.n);
        let program: Vec<Event> =
            serde_json::from_str(&fs::read_to_string(tmp.path().join("pulse_program.json")).unwrap()).unwrap();
        assert_eq!(Some(program), out.record.pulse_program);
    }

    #[test]
    fn gate_run_writes_trace() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = cfg(tmp.path());
        c.mode = Mode::Gate;
        c.permutation = Some("f5".into());
        let out = cmd_run(&c).unwrap();
        let trace: AlgorithmTrace =
            serde_json::from_str(&fs::read_to_string(tmp.path().join("trace.json")).unwrap()).unwrap();
        assert_eq!(trace.verdict, Parity::Odd);
        assert_eq!(Some(trace), out.record.trace);
    }

    #[test]
    fn zero_flip_detection_is_unclassifiable() {
        let tmp = tempfile::tempdir().unwrap();
        let mut c = cfg(tmp.path());
        c.permutation = Some("f1".into());
        c.detection_flip_deg = 0.0;
        assert_eq!(cmd_run(&c).unwrap().status, Status::Unclassifiable);
    }

    #[test]
    fn ideal_sweep_is_perfect() {
        let tmp = tempfile::tempdir().unwrap();
        let s = cmd_sweep(&cfg(tmp.path())).unwrap();
        assert_eq!((s.correct, s.total), (6, 6));
        assert!(s.modes_agree);
        assert_eq!(s.status(), Status::Classified);
        let tsv = fs::read_to_string(tmp.path().join("summary.tsv")).unwrap();
        assert_eq!(tsv.lines().count(), 8);
        assert!(tmp.path().join("spectra/f6.tsv").is_file());
    }

    #[test]
    fn compile_writes_program_and_report() {
        let tmp = tempfile::tempdir().unwrap();
        let (seq, files) = cmd_compile("S13", tmp.path()).unwrap();
        assert!(seq.phase_exact);
        let report: CompileReport = serde_json::from_str(&fs::read_to_string(&files[1]).unwrap()).unwrap();
        assert_eq!(report, seq.report());
        let (id, _) = cmd_compile("I", tmp.path()).unwrap();
        assert!(id.events.is_empty());
        assert!(matches!(cmd_compile("U9", tmp.path()), Err(Error::UnknownGate(_))));
    }
}
