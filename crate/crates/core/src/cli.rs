//! Command-line surface: `evolve`, `events`, `sweep` and `verify`.
//!
//! Settings come from an optional `key=value` config file and are overridden
//! by flags. Exit codes: 0 success, 1 check failure, 2 usage error, 3 I/O error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analytic::{self, PairClass};
use crate::detect::{self, EventRecord, Trajectory, DEFAULT_COARSE_DT};
use crate::dynamics::time_grid;
use crate::error::{Error, Result};
use crate::measures::{pair_concurrence, total_spin_expectation, two_point_correlation};
use crate::model::{CouplingGraph, ModelParams};
use crate::output::{Cell, Format, Table};
use crate::state::{all_pairs, site_pair, Axis, Site};
use crate::verify::{self, VerifyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "laddyn", version, about = "Entanglement dynamics on a four-qubit DM spin ladder")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time series of concurrences, correlations and total spin for one D.
    Evolve(Flags),
    /// Detected transfer and W-state events for one D.
    Events(Flags),
    /// Observables over a D grid, plus the closed-form W-time curves.
    Sweep(Flags),
    /// Invariant and oracle report; exit 1 if any check fails.
    Verify(Flags),
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Config file of key=value lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub d: Option<f64>,
    /// start:stop:step, inclusive.
    #[arg(long = "d-grid")]
    pub d_grid: Option<String>,
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Site pairs such as 1-2,3-4 (default all six).
    #[arg(long)]
    pub pairs: Option<String>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Bond list replacing the default ladder.
    #[arg(long)]
    pub topology: Option<PathBuf>,
    /// Highest n in the W-time curves file.
    #[arg(long = "n-max")]
    pub n_max: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DGrid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl DGrid {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::validation(format!("D grid '{s}' must be start:stop:step")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::validation(format!("bad number '{p}' in D grid '{s}'")))
        };
        let g = DGrid {
            start: num(parts[0])?,
            stop: num(parts[1])?,
            step: num(parts[2])?,
        };
        if !(g.step > 0.0 && g.start.is_finite() && g.stop >= g.start) {
            return Err(Error::validation(format!("D grid '{s}' needs step > 0 and stop ≥ start")));
        }
        Ok(g)
    }

    pub fn values(&self) -> Vec<f64> {
        let steps = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=steps).map(|k| self.start + k as f64 * self.step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub d: f64,
    pub j: f64,
    pub t_max: f64,
    pub dt: f64,
    pub pairs: Vec<(Site, Site)>,
    pub tolerance: f64,
    /// None writes to stdout.
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub topology: Option<PathBuf>,
    pub d_grid: Option<DGrid>,
    pub n_max: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            d: 0.6,
            j: 1.0,
            t_max: 30.0,
            dt: 0.01,
            pairs: all_pairs(),
            tolerance: 1e-9,
            output_path: None,
            format: Format::Csv,
            topology: None,
            d_grid: None,
            n_max: 9,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse()
        .map_err(|_| Error::validation(format!("{key}: '{v}' is not a number")))
}

fn parse_pairs(v: &str) -> Result<Vec<(Site, Site)>> {
    v.split(',')
        .map(|item| {
            let (a, b) = item
                .trim()
                .split_once('-')
                .ok_or_else(|| Error::validation(format!("pair '{item}' must look like 1-2")))?;
            let p = a.trim().parse().map_err(|_| Error::validation(format!("bad site in '{item}'")))?;
            let q = b.trim().parse().map_err(|_| Error::validation(format!("bad site in '{item}'")))?;
            site_pair(p, q)
        })
        .collect()
}

impl RunConfig {
    /// Applies one `key=value` setting. Keys match the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "d" => self.d = parse_f64("d", value)?,
            "j" => self.j = parse_f64("j", value)?,
            "t-max" | "t_max" => self.t_max = parse_f64("t_max", value)?,
            "dt" => self.dt = parse_f64("dt", value)?,
            "tolerance" => self.tolerance = parse_f64("tolerance", value)?,
            "pairs" => self.pairs = parse_pairs(value)?,
            "output" | "output_path" => self.output_path = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            "topology" => self.topology = Some(PathBuf::from(value)),
            "d-grid" | "d_grid" => self.d_grid = Some(DGrid::parse(value)?),
            "n-max" | "n_max" => {
                self.n_max = value
                    .parse()
                    .map_err(|_| Error::validation(format!("n_max: '{value}' is not a count")))?
            }
            other => return Err(Error::validation(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    pub fn parse_file_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::validation(format!("config line {}: expected key=value, got '{raw}'", lineno + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_flags(flags: &Flags) -> Result<Self> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &flags.config {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            cfg.parse_file_text(&text)?;
        }
        if let Some(d) = flags.d {
            cfg.d = d;
        }
        if let Some(g) = &flags.d_grid {
            cfg.d_grid = Some(DGrid::parse(g)?);
        }
        if let Some(t) = flags.t_max {
            cfg.t_max = t;
        }
        if let Some(dt) = flags.dt {
            cfg.dt = dt;
        }
        if let Some(tol) = flags.tolerance {
            cfg.tolerance = tol;
        }
        if let Some(p) = &flags.pairs {
            cfg.pairs = parse_pairs(p)?;
        }
        if let Some(o) = &flags.output {
            cfg.output_path = Some(o.clone());
        }
        if let Some(f) = &flags.format {
            cfg.format = f.parse()?;
        }
        if let Some(t) = &flags.topology {
            cfg.topology = Some(t.clone());
        }
        if let Some(n) = flags.n_max {
            cfg.n_max = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return Err(Error::validation(format!("d = {} must be finite and ≥ 0", self.d)));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::validation(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::validation(format!("t_max = {} must be positive", self.t_max)));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::validation("tolerance must be positive"));
        }
        if self.pairs.is_empty() {
            return Err(Error::validation("at least one pair is required"));
        }
        Ok(())
    }

    pub fn graph(&self) -> Result<CouplingGraph> {
        match &self.topology {
            Some(p) => CouplingGraph::load(p),
            None => Ok(CouplingGraph::ladder()),
        }
    }

    /// Closed-form columns exist only for the reference model (D > 0, J = 1, default bonds).
    fn analytic_available(&self) -> bool {
        self.d > 0.0 && self.j == 1.0
    }
}

fn pair_tag(p: Site, q: Site) -> String {
    format!("{}{}", p.index(), q.index())
}

pub fn evolve_table(cfg: &RunConfig) -> Result<Table> {
    let graph = cfg.graph()?;
    let params = ModelParams::with_exchange(cfg.j, cfg.d)?;
    let h = crate::model::build_hamiltonian(&params, &graph)?;
    let prop = crate::dynamics::Propagator::new(&h, &crate::model::initial_state())?;
    let analytic_cols = cfg.analytic_available();

    let mut columns = vec!["t".to_string()];
    columns.extend(cfg.pairs.iter().map(|&(p, q)| format!("c_{}", pair_tag(p, q))));
    if analytic_cols {
        columns.extend(cfg.pairs.iter().map(|&(p, q)| format!("ca_{}", pair_tag(p, q))));
    }
    for pc in PairClass::ALL {
        for axis in Axis::ALL {
            columns.push(format!("chi_{0}{0}_{1}", axis.label(), pc.label()));
        }
    }
    columns.extend(["sx_tot", "sy_tot", "sz_tot"].map(String::from));
    if analytic_cols {
        columns.push("max_discrepancy".into());
    }
    let mut table = Table::new(columns);

    for (t, psi) in &prop.evolve_series(0.0, cfg.t_max, cfg.dt)? {
        let (t, psi) = (*t, psi);
        let mut row: Vec<Cell> = vec![t.into()];
        let mut numeric = Vec::with_capacity(cfg.pairs.len());
        for &(p, q) in &cfg.pairs {
            let c = pair_concurrence(psi, p.index(), q.index())?;
            numeric.push(c);
            row.push(c.into());
        }
        let mut worst = 0.0f64;
        if analytic_cols {
            for (&(p, q), c) in cfg.pairs.iter().zip(&numeric) {
                let ca = analytic::concurrence_formula(PairClass::of(p, q)?, t, cfg.d)?;
                worst = worst.max((c - ca).abs());
                row.push(ca.into());
            }
        }
        for pc in PairClass::ALL {
            let (p, q) = pc.representative();
            for axis in Axis::ALL {
                row.push(two_point_correlation(psi, p, q, axis, axis)?.into());
            }
        }
        for axis in Axis::ALL {
            row.push(total_spin_expectation(psi, axis).into());
        }
        if analytic_cols {
            row.push(worst.into());
        }
        table.push(row);
    }
    Ok(table)
}

pub fn events_table(cfg: &RunConfig) -> Result<Table> {
    if cfg.d <= 0.0 {
        return Err(Error::validation("events need d > 0"));
    }
    let traj = Trajectory::new(cfg.d, &cfg.graph()?)?;
    let mut events: Vec<EventRecord> = traj.find_transfer_events(cfg.t_max, DEFAULT_COARSE_DT, cfg.tolerance)?;
    events.extend(traj.find_w_events(cfg.t_max, DEFAULT_COARSE_DT, cfg.tolerance)?);
    events.sort_by(|a, b| a.t_detected.total_cmp(&b.t_detected));
    let mut table = Table::new(["kind", "n", "t_predicted", "t_detected", "residual"]);
    for e in events {
        table.push(vec![
            e.kind.label().into(),
            e.n.into(),
            e.t_predicted.into(),
            e.t_detected.into(),
            e.residual.into(),
        ]);
    }
    Ok(table)
}

/// Sweep rows and the W-time curves as two tables.
pub fn sweep_tables(cfg: &RunConfig) -> Result<(Table, Table)> {
    let ds = match &cfg.d_grid {
        Some(g) => g.values(),
        None => vec![cfg.d],
    };
    let ts = time_grid(0.0, cfg.t_max, cfg.dt)?;
    let rows = detect::sweep(&ds, &ts)?;
    let mut sweep = Table::new([
        "d", "t", "c_first", "c_last", "c_leg", "chi_xx_first", "chi_yy_first", "chi_zz_first",
        "chi_xx_last", "chi_yy_last", "chi_zz_last", "chi_xx_leg", "chi_yy_leg", "chi_zz_leg", "s_tot_z",
    ]);
    for r in rows {
        let mut row: Vec<Cell> = vec![r.d.into(), r.t.into(), r.c_first.into(), r.c_last.into(), r.c_leg.into()];
        for chi in [r.chi_first, r.chi_last, r.chi_leg] {
            row.extend(chi.map(Cell::from));
        }
        row.push(r.s_tot_z.into());
        sweep.push(row);
    }

    let curves = detect::w_time_curves(&detect::dedup_d_grid(&ds), cfg.n_max)?;
    let mut columns = vec!["d".to_string()];
    columns.extend((0..=cfg.n_max).map(|n| format!("t_w_{n}")));
    let mut wt = Table::new(columns);
    for (i, &d) in curves.d.iter().enumerate() {
        let mut row: Vec<Cell> = vec![d.into()];
        row.extend(curves.curves.iter().map(|c| Cell::from(c[i])));
        wt.push(row);
    }
    Ok((sweep, wt))
}

/// `<stem>_wtimes.<ext>` next to the sweep output.
pub fn wtimes_path(output: &Path, format: Format) -> PathBuf {
    let stem = output.file_stem().and_then(|s| s.to_str()).unwrap_or("sweep");
    output.with_file_name(format!("{stem}_wtimes.{}", format.extension()))
}

pub fn verify_config(cfg: &RunConfig) -> Result<VerifyConfig> {
    Ok(VerifyConfig {
        graph: cfg.graph()?,
        tolerance: cfg.tolerance,
        ..VerifyConfig::default()
    })
}

fn emit(table: &Table, cfg: &RunConfig) -> Result<()> {
    match &cfg.output_path {
        Some(p) => table.write(p, cfg.format),
        None => {
            print!("{}", table.render(cfg.format));
            Ok(())
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("LADDYN_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::validation(format!("LADDYN_THREADS='{v}' is not a count")))?;
    // 0 keeps rayon's automatic choice; a second build in the same process is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(command: &Command) -> Result<i32> {
    configure_threads()?;
    match command {
        Command::Evolve(f) => {
            let cfg = RunConfig::from_flags(f)?;
            emit(&evolve_table(&cfg)?, &cfg)?;
        }
        Command::Events(f) => {
            let cfg = RunConfig::from_flags(f)?;
            emit(&events_table(&cfg)?, &cfg)?;
        }
        Command::Sweep(f) => {
            let cfg = RunConfig::from_flags(f)?;
            let (sweep, wt) = sweep_tables(&cfg)?;
            match &cfg.output_path {
                Some(p) => {
                    sweep.write(p, cfg.format)?;
                    wt.write(&wtimes_path(p, cfg.format), cfg.format)?;
                }
                None => {
                    print!("{}", sweep.render(cfg.format));
                    print!("{}", wt.render(cfg.format));
                }
            }
        }
        Command::Verify(f) => {
            let cfg = RunConfig::from_flags(f)?;
            let report = verify::run(&verify_config(&cfg)?)?;
            let text = report.render();
            match &cfg.output_path {
                Some(p) => std::fs::write(p, &text).map_err(|e| Error::io(p, e))?,
                None => print!("{text}"),
            }
            if !report.all_passed() {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
    }
    Ok(EXIT_OK)
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => EXIT_IO,
        Error::Validation(_) | Error::Domain(_) => EXIT_USAGE,
        Error::SectorLeakage { .. } | Error::NumericalFailure(_) => EXIT_CHECK_FAILED,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("laddyn: {e}");
            exit_code(&e)
        }
    }
}
