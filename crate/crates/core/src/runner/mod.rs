//! Config-driven experiments: spectra, cross fields, degree tables and the
//! ferro/antiferro comparison, each persisted as CSV/JSON/SVG plus a
//! [`RunRecord`].

mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use config::{BoundarySpec, ExperimentConfig, FreeTag, OneOrMany, PRESETS};

use crate::boundary::{boundary_angles, BoundaryCondition};
use crate::degree::{
    analytic_field, circle_points, contour_field, convergence_study, degree_estimate, DegreeEstimate, DegreeForm,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{assemble_with, AssemblyOptions, BlockHamiltonian};
use crate::lattice::Lattice;
use crate::render::{render_crosses, render_idos, render_records, LengthMode, RenderOptions};
use crate::spectral::{diagonalize, gibbs, idos_curve, symmetry_defect, uniform_grid, SpectralData};
use crate::vorticity::{decay_profile, vorticity_field, FieldRecord, TraceSlot, VorticityField};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Largest per-site deviation accepted between `±β` fields on a free lattice.
pub const FREE_ANTIFERRO_TOLERANCE: f64 = 1e-10;

/// Largest oracle error accepted at 200 contour points.
pub const ORACLE_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Spectrum,
    Vorticity,
    Degree,
    Table1,
    Antiferro,
    Oracle { degrees: Vec<i32>, counts: Vec<usize> },
    Render { input: PathBuf },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Vorticity => "vorticity",
            Command::Degree => "degree",
            Command::Table1 => "table1",
            Command::Antiferro => "antiferro",
            Command::Oracle { .. } => "oracle",
            Command::Render { .. } => "render",
        }
    }

    /// Preset used when neither a config nor a preset is given.
    pub fn default_preset(&self) -> Option<&'static str> {
        match self {
            Command::Spectrum => Some("fig1a"),
            Command::Vorticity => Some("fig3"),
            Command::Degree | Command::Table1 => Some("table1"),
            Command::Antiferro => Some("antiferro"),
            Command::Oracle { .. } | Command::Render { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub k: f64,
    pub degree: Option<i32>,
    pub dim: usize,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    pub kernel_count: usize,
    pub symmetry_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeReport {
    pub d_prescribed: i32,
    pub k: f64,
    pub beta: f64,
    pub contour_m: usize,
    pub form: DegreeForm,
    pub estimate: Option<f64>,
    pub degenerate_steps: usize,
    pub contour_len: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AntiferroReport {
    pub k: f64,
    pub degree: Option<i32>,
    pub beta: f64,
    pub free: bool,
    pub max_deviation: f64,
    pub mean_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCase {
    pub degree: i32,
    pub points: usize,
    pub estimate: f64,
    pub reversed: f64,
    pub convergence: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub preset: Option<String>,
    pub config: Option<ExperimentConfig>,
    pub version: String,
    pub trace_slot: Option<TraceSlot>,
    pub spectra: Vec<SpectralSummary>,
    pub degrees: Vec<DegreeReport>,
    pub antiferro: Vec<AntiferroReport>,
    pub oracle: Vec<OracleCase>,
    pub outputs: Vec<String>,
    pub status: String,
    pub error: Option<String>,
    pub elapsed_seconds: f64,
}

impl RunRecord {
    pub const FILE: &'static str = "run_record.json";

    fn new(command: &Command, preset: Option<String>, config: Option<ExperimentConfig>) -> Self {
        Self {
            command: command.name().into(),
            preset,
            trace_slot: config.as_ref().map(|c| c.trace_slot),
            config,
            version: VERSION.into(),
            spectra: Vec::new(),
            degrees: Vec::new(),
            antiferro: Vec::new(),
            oracle: Vec::new(),
            outputs: Vec::new(),
            status: "running".into(),
            error: None,
            elapsed_seconds: 0.0,
        }
    }
}

/// One row of the degree table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub d: i32,
    pub k: f64,
    pub contour_m: usize,
    pub form: DegreeForm,
    pub estimate: Option<f64>,
    pub degenerate_steps: usize,
    pub contour_len: usize,
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct EigenRow {
    index: usize,
    eigenvalue: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdosRow {
    pub lambda: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct ProfileRow {
    ring: usize,
    max_magnitude: f64,
}

/// Everything a command needs besides its own arguments.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: Option<ExperimentConfig>,
    pub preset: Option<String>,
    pub out_dir: PathBuf,
    /// Restricts cross plots to one length mode; both are drawn otherwise.
    pub mode: Option<LengthMode>,
    /// Overrides the configured degree form.
    pub form: Option<DegreeForm>,
}

impl RunOptions {
    /// Resolves `--config`/`--preset` for `command`; the config wins if both are given.
    pub fn resolve(
        command: &Command,
        config_path: Option<&Path>,
        preset: Option<&str>,
        out_dir: Option<&Path>,
    ) -> Result<Self> {
        let (config, preset) = match (config_path, preset.or(command.default_preset())) {
            (Some(path), _) => (Some(ExperimentConfig::load(path)?), None),
            (None, Some(name)) => (Some(ExperimentConfig::preset(name)?), Some(name.to_string())),
            (None, None) => (None, None),
        };
        let out_dir = match (out_dir, &config) {
            (Some(dir), _) => dir.to_path_buf(),
            (None, Some(c)) => c.outputs.clone(),
            (None, None) => PathBuf::from("out").join(command.name()),
        };
        Ok(Self { config, preset, out_dir, mode: None, form: None })
    }
}

/// Runs `command` and always writes `run_record.json` into the output
/// directory, including the error cause on failure.
pub fn execute(command: &Command, options: &RunOptions) -> (RunRecord, Result<()>) {
    let start = Instant::now();
    let mut run = Run {
        record: RunRecord::new(command, options.preset.clone(), options.config.clone()),
        out_dir: options.out_dir.clone(),
        mode: options.mode,
        form: options.form,
    };
    let result = run.dispatch(command, options.config.as_ref());
    run.record.elapsed_seconds = start.elapsed().as_secs_f64();
    match &result {
        Ok(()) => run.record.status = "ok".into(),
        Err(e) => {
            run.record.status = "error".into();
            run.record.error = Some(e.to_string());
        }
    }
    let json = serde_json::to_string_pretty(&run.record).expect("record serializes");
    let written = std::fs::create_dir_all(&run.out_dir)
        .and_then(|_| write_atomic(&run.out_dir.join(RunRecord::FILE), json.as_bytes()))
        .map_err(Error::from);
    let result = result.and(written);
    (run.record, result)
}

/// Record for a run that failed before its config could be resolved.
pub fn record_failure(command: &Command, out_dir: &Path, error: &Error) -> Result<RunRecord> {
    let mut record = RunRecord::new(command, None, None);
    record.status = "error".into();
    record.error = Some(error.to_string());
    std::fs::create_dir_all(out_dir)?;
    let json = serde_json::to_string_pretty(&record).expect("record serializes");
    write_atomic(&out_dir.join(RunRecord::FILE), json.as_bytes())?;
    Ok(record)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)
}

/// Compact, filename-safe rendering of a parameter value.
fn fmt_num(x: f64) -> String {
    format!("{x}").replace('-', "m")
}

fn case_tag(k: f64, degree: Option<i32>) -> String {
    match degree {
        Some(d) => format!("k{}_d{}", fmt_num(k), fmt_num(d as f64)),
        None => format!("k{}_free", fmt_num(k)),
    }
}

struct Case {
    lattice: Lattice,
    spectral: SpectralData<f64>,
}

struct CaseField {
    k: f64,
    degree: Option<i32>,
    lattice: Lattice,
    field: VorticityField<f64>,
}

struct Run {
    record: RunRecord,
    out_dir: PathBuf,
    mode: Option<LengthMode>,
    form: Option<DegreeForm>,
}

impl Run {
    fn dispatch(&mut self, command: &Command, config: Option<&ExperimentConfig>) -> Result<()> {
        let needs_config = || config.ok_or_else(|| Error::Config("a config or preset is required".into()));
        if let Some(c) = config {
            c.validate()?;
        }
        std::fs::create_dir_all(&self.out_dir)?;
        match command {
            Command::Spectrum => self.spectrum(needs_config()?),
            Command::Vorticity => self.vorticity(needs_config()?),
            Command::Degree => self.degree(needs_config()?),
            Command::Table1 => self.table1(needs_config()?),
            Command::Antiferro => self.antiferro(needs_config()?),
            Command::Oracle { degrees, counts } => self.oracle(degrees, counts),
            Command::Render { input } => self.render(input),
        }
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.out_dir.join(name), bytes)?;
        self.record.outputs.push(name.to_string());
        Ok(())
    }

    fn write_csv<S: Serialize>(&mut self, name: &str, rows: &[S]) -> Result<()> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row).map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        self.write(name, &bytes)
    }

    fn write_json<S: Serialize>(&mut self, name: &str, value: &S) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    fn modes(&self) -> Vec<LengthMode> {
        match self.mode {
            Some(m) => vec![m],
            None => vec![LengthMode::LogScale, LengthMode::Equal],
        }
    }

    fn form(&self, config: &ExperimentConfig) -> DegreeForm {
        self.form.unwrap_or(config.degree_form)
    }

    fn solve(&mut self, config: &ExperimentConfig, k: f64, degree: Option<i32>) -> Result<Case> {
        let lattice = Lattice::new(config.lattice)?;
        let bc: Option<BoundaryCondition<f64>> = match degree {
            Some(d) => Some(boundary_angles(&lattice, d, config.boundary.phase())?),
            None => None,
        };
        let h: BlockHamiltonian<f64> =
            assemble_with(&lattice, &config.params(k)?, bc.as_ref(), AssemblyOptions { max_sites: config.max_sites })?;
        let spectral = diagonalize(&h)?;
        let eig = spectral.eigenvalues();
        self.record.spectra.push(SpectralSummary {
            k,
            degree,
            dim: spectral.dim(),
            min_eigenvalue: eig.first().copied().unwrap_or(0.0),
            max_eigenvalue: eig.last().copied().unwrap_or(0.0),
            kernel_count: spectral.kernel_count(config.kernel_tol),
            symmetry_defect: symmetry_defect(eig),
        });
        Ok(Case { lattice, spectral })
    }

    fn field(&self, config: &ExperimentConfig, case: &Case, beta: f64) -> Result<VorticityField<f64>> {
        let g = gibbs(&case.spectral, beta, config.gibbs_sign)?;
        vorticity_field(&g, &case.lattice, config.trace_slot)
    }

    fn cases(config: &ExperimentConfig) -> Vec<(f64, Option<i32>)> {
        config.ks().into_iter().flat_map(|k| config.boundary.degrees().into_iter().map(move |d| (k, d))).collect()
    }

    fn spectrum(&mut self, config: &ExperimentConfig) -> Result<()> {
        for (k, d) in Self::cases(config) {
            let case = self.solve(config, k, d)?;
            let tag = case_tag(k, d);
            let eig = case.spectral.eigenvalues();
            let rows: Vec<EigenRow> =
                eig.iter().enumerate().map(|(index, &eigenvalue)| EigenRow { index, eigenvalue }).collect();
            self.write_csv(&format!("eigenvalues_{tag}.csv"), &rows)?;
            let lo = (-2.5f64).min(eig[0] - 0.05);
            let hi = 2.5f64.max(eig[eig.len() - 1] + 0.05);
            let curve = idos_curve(eig, &uniform_grid(lo, hi, config.idos_points));
            let rows: Vec<IdosRow> = curve.iter().map(|&(lambda, count)| IdosRow { lambda, count }).collect();
            self.write_csv(&format!("idos_{tag}.csv"), &rows)?;
            self.write(&format!("idos_{tag}.svg"), render_idos(&curve)?.as_bytes())?;
        }
        Ok(())
    }

    fn vorticity(&mut self, config: &ExperimentConfig) -> Result<()> {
        if config.boundary.is_free() {
            return Err(Error::Config("`boundary`: vorticity needs a winding boundary".into()));
        }
        for (k, d) in Self::cases(config) {
            let case = self.solve(config, k, d)?;
            for beta in config.betas() {
                let field = self.field(config, &case, beta)?;
                let tag = format!("{}_b{}", case_tag(k, d), fmt_num(beta));
                self.write_json(&format!("field_{tag}.json"), &field.records(&case.lattice))?;
                let profile: Vec<ProfileRow> = decay_profile(&field, &case.lattice)
                    .into_iter()
                    .map(|(ring, max_magnitude)| ProfileRow { ring, max_magnitude })
                    .collect();
                self.write_csv(&format!("profile_{tag}.csv"), &profile)?;
                for mode in self.modes() {
                    let svg = render_crosses(&field, &case.lattice, &RenderOptions::with_mode(mode))?;
                    self.write(&format!("crosses_{tag}_{}.svg", mode_name(mode)), svg.as_bytes())?;
                }
            }
        }
        Ok(())
    }

    fn estimate(
        case: &Case,
        field: &VorticityField<f64>,
        m: usize,
        form: DegreeForm,
    ) -> (usize, Result<DegreeEstimate<f64>>) {
        match case.lattice.contour_at(m) {
            Ok(contour) => (contour.len(), degree_estimate(&contour_field(field, &contour), form)),
            Err(e) => (0, Err(e)),
        }
    }

    /// Degree reports for every cell, plus the first-β field of each `(k, d)` case.
    fn degree_reports(&mut self, config: &ExperimentConfig) -> Result<(Vec<DegreeReport>, Vec<CaseField>)> {
        if config.boundary.is_free() {
            return Err(Error::Config("`boundary`: degree estimates need a winding boundary".into()));
        }
        let form = self.form(config);
        let mut reports = Vec::new();
        let mut fields = Vec::new();
        for (k, d) in Self::cases(config) {
            let case = self.solve(config, k, d)?;
            for beta in config.betas() {
                let field = self.field(config, &case, beta)?;
                for &m in &config.contour_m {
                    let (len, est) = Self::estimate(&case, &field, m, form);
                    reports.push(DegreeReport {
                        d_prescribed: d.unwrap_or(0),
                        k,
                        beta,
                        contour_m: m,
                        form,
                        estimate: est.as_ref().ok().map(|e| e.value),
                        degenerate_steps: est.as_ref().map_or(0, |e| e.degenerate_steps),
                        contour_len: len,
                        error: est.err().map(|e| e.to_string()),
                    });
                }
                if fields.iter().all(|c: &CaseField| (c.k, c.degree) != (k, d)) {
                    fields.push(CaseField { k, degree: d, lattice: case.lattice.clone(), field });
                }
            }
        }
        self.record.degrees.extend(reports.iter().cloned());
        Ok((reports, fields))
    }

    fn degree(&mut self, config: &ExperimentConfig) -> Result<()> {
        let (reports, _) = self.degree_reports(config)?;
        self.write_json("degree.json", &reports)?;
        let failed: Vec<String> = reports
            .iter()
            .filter_map(|r| {
                r.error
                    .as_ref()
                    .map(|e| format!("d={}, k={}, beta={}, m={}: {e}", r.d_prescribed, r.k, r.beta, r.contour_m))
            })
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Error::Numerical(failed.join("; ")))
        }
    }

    fn table1(&mut self, config: &ExperimentConfig) -> Result<()> {
        let (reports, fields) = self.degree_reports(config)?;
        let rows: Vec<TableRow> = reports
            .iter()
            .map(|r| TableRow {
                d: r.d_prescribed,
                k: r.k,
                contour_m: r.contour_m,
                form: r.form,
                estimate: r.estimate,
                degenerate_steps: r.degenerate_steps,
                contour_len: r.contour_len,
                error: r.error.clone(),
            })
            .collect();
        self.write_csv("table1.csv", &rows)?;
        self.write("table1.txt", format_table(&rows, config).as_bytes())?;
        for case in &fields {
            let svg = render_crosses(&case.field, &case.lattice, &RenderOptions::with_mode(LengthMode::LogScale))?;
            self.write(&format!("crosses_{}_log.svg", case_tag(case.k, case.degree)), svg.as_bytes())?;
        }
        Ok(())
    }

    fn antiferro(&mut self, config: &ExperimentConfig) -> Result<()> {
        let mut reports = Vec::new();
        for (k, d) in Self::cases(config) {
            let case = self.solve(config, k, d)?;
            for beta in config.betas() {
                let plus = self.field(config, &case, beta)?;
                let minus = self.field(config, &case, -beta)?;
                let dev = plus.relative_deviation(&minus);
                let max = dev.iter().copied().fold(0.0, f64::max);
                let mean = if dev.is_empty() { 0.0 } else { dev.iter().sum::<f64>() / dev.len() as f64 };
                reports.push(AntiferroReport {
                    k,
                    degree: d,
                    beta,
                    free: d.is_none(),
                    max_deviation: max,
                    mean_deviation: mean,
                });
            }
        }
        self.record.antiferro.extend(reports.iter().cloned());
        self.write_json("antiferro.json", &reports)?;
        if let Some(r) = reports.iter().find(|r| r.free && !(r.max_deviation <= FREE_ANTIFERRO_TOLERANCE)) {
            return Err(Error::Calibration(format!(
                "free lattice fields at ±β differ by {:e} (k={}, β={})",
                r.max_deviation, r.k, r.beta
            )));
        }
        Ok(())
    }

    fn oracle(&mut self, degrees: &[i32], counts: &[usize]) -> Result<()> {
        let mut cases = Vec::new();
        let mut failures = Vec::new();
        let points = circle_points(200, 1.0);
        for &d in degrees {
            let field = analytic_field(&points, d, 0.0)?;
            let estimate = degree_estimate(&field, DegreeForm::Symmetrized)?.value;
            let reversed = degree_estimate(&field.reversed(), DegreeForm::Symmetrized)?.value;
            let convergence = convergence_study(d, counts, DegreeForm::Symmetrized)?;
            if !((estimate - d as f64).abs() < ORACLE_TOLERANCE) {
                failures.push(format!("d={d}: estimate {estimate} misses by more than {ORACLE_TOLERANCE}"));
            }
            if !((estimate + reversed).abs() < 1e-9) {
                failures.push(format!("d={d}: reversed contour gives {reversed}, expected {}", -estimate));
            }
            if d != 0 && convergence.windows(2).any(|w| !(w[1].1 < w[0].1)) {
                failures.push(format!("d={d}: error does not decrease with resolution: {convergence:?}"));
            }
            cases.push(OracleCase { degree: d, points: points.len(), estimate, reversed, convergence });
        }
        self.record.oracle.extend(cases.iter().cloned());
        self.write_json("oracle.json", &cases)?;
        if failures.is_empty() {
            Ok(())
        } else {
            Err(Error::Calibration(failures.join("; ")))
        }
    }

    fn render(&mut self, input: &Path) -> Result<()> {
        let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("figure").to_string();
        let ext = input.extension().and_then(|s| s.to_str()).unwrap_or("");
        match ext {
            "json" => {
                let text = std::fs::read_to_string(input)?;
                let records: Vec<FieldRecord> = serde_json::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: line {}: {e}", input.display(), e.line())))?;
                let width = records.iter().map(|r| r.coords[0] + 1).max().unwrap_or(0);
                let height = records.iter().map(|r| r.coords[1] + 1).max().unwrap_or(0);
                for mode in self.modes() {
                    let svg = render_records(&records, width, height, &RenderOptions::with_mode(mode))?;
                    self.write(&format!("{stem}_{}.svg", mode_name(mode)), svg.as_bytes())?;
                }
                Ok(())
            }
            "csv" => {
                let mut reader =
                    csv::Reader::from_path(input).map_err(|e| Error::Config(format!("{}: {e}", input.display())))?;
                let curve = reader
                    .deserialize::<IdosRow>()
                    .map(|row| row.map(|r| (r.lambda, r.count)))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|e| Error::Config(format!("{}: {e}", input.display())))?;
                let svg = render_idos(&curve)?;
                self.write(&format!("{stem}.svg"), svg.as_bytes())
            }
            other => {
                Err(Error::Config(format!("cannot render `.{other}` input; expected a field .json or an IDOS .csv")))
            }
        }
    }
}

fn mode_name(mode: LengthMode) -> &'static str {
    match mode {
        LengthMode::LogScale => "log",
        LengthMode::Equal => "equal",
    }
}

/// Text layout with one row per prescribed degree and one column per
/// `(contour, k)` pair, the contour varying slowest.
pub fn format_table(rows: &[TableRow], config: &ExperimentConfig) -> String {
    let ks = config.ks();
    let ms = &config.contour_m;
    let mut degrees: Vec<i32> = rows.iter().map(|r| r.d).collect();
    degrees.sort_unstable();
    degrees.dedup();
    let ordinal = |m: usize| match m {
        1 => "1st".to_string(),
        2 => "2nd".to_string(),
        3 => "3rd".to_string(),
        m => format!("{m}th"),
    };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "Degree estimates, {}x{} sites, {} boundary layers, beta = {}",
        config.lattice.total_width(),
        config.lattice.total_height(),
        config.lattice.boundary_layers,
        config.betas().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(", ")
    );
    let _ = write!(out, "{:<8}", "given");
    for &m in ms {
        for &k in &ks {
            let _ = write!(out, "{:>16}", format!("k={k} {} nbr", ordinal(m)));
        }
    }
    out.push('\n');
    for d in degrees {
        let _ = write!(out, "{d:<8}");
        for &m in ms {
            for &k in &ks {
                let cell = rows
                    .iter()
                    .find(|r| r.d == d && r.k == k && r.contour_m == m)
                    .map(|r| match r.estimate {
                        Some(v) => format!("{v:.2}"),
                        None => "degenerate".into(),
                    })
                    .unwrap_or_else(|| "-".into());
                let _ = write!(out, "{cell:>16}");
            }
        }
        out.push('\n');
    }
    out
}
