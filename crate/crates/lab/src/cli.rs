//! Argument parsing and the subcommands.
//!
//! Every command is a pure function of its flags and input files. Data files
//! start with a `#` header carrying the tool version and a hash of the flags.

use std::fmt::Write as _;
use std::fs;
use std::io::{ErrorKind, Write as _};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use superbroad_core::analysis::{LineStatus, DEFAULT_THRESHOLD};
use superbroad_core::dynamics::{
    default_substeps, propagate, propagate_schedule, propagate_schedule_trajectory, QubitState,
};
use superbroad_core::frames::{diagnose, midpoint_asymptotic};
use superbroad_core::hardware::{apply_readout_error, t2_limited_linewidth_khz, HardwareProfile};
use superbroad_core::landscape::{Axis, Integrator, LandscapeSpec};
use superbroad_core::lindblad::{propagate_lindblad, DensityMatrix};
use superbroad_core::noise::{add_shot_noise, measured};
use superbroad_core::shapes::{unit_area, Family, PulseShape};
use superbroad_core::units::{mhz_to_rad_per_ns, rad_per_ns_to_mhz, HARDWARE_DT_NS};

use crate::exit::{Exit, LabError};
use crate::grid_io::{config_hash, header_line, read_grid_csv, sig9, write_grid_csv, Sidecar, TOOL, VERSION};
use crate::profile_io::load_profile;
use crate::render::heatmap_svg;
use crate::report::{compare, linewidth, linewidth_table, SliceWindow};
use crate::shape_spec::{default_duration, parse_area, ShapeSpec};
use crate::sweep::sweep;

/// Seed used by the shot-noise emulation unless `--seed` is given.
pub const DEFAULT_SEED: u64 = 20_240_611;

/// Preset used when `--day` is given without `--profile`.
pub const DEFAULT_PROFILE: &str = "sherbrooke-q46";

#[derive(Debug, Parser)]
#[command(name = "superbroad", version, about = "Pulse-shape linewidth laboratory for a driven two-level system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sampled envelopes Ω(t)/2π for a list of family parameters
    Shapes(ShapesArgs),
    /// Pulse area of a shape, or the amplitude needed for a target area
    Area(AreaArgs),
    /// Final populations after one pulse at one detuning
    Propagate(PropagateArgs),
    /// Excitation landscape over (detuning, amplitude)
    Sweep(SweepArgs),
    /// Operational linewidth of a fixed-area slice
    Linewidth(LinewidthArgs),
    /// Widths and broadening factors across a parameter list
    Compare(CompareArgs),
    /// Adiabatic and superadiabatic frame quantities over the pulse
    Diagnose(DiagnoseArgs),
    /// Heatmap SVG from a grid CSV
    Render(RenderArgs),
}

/// Inline shape flags; `--shape-file` supplies the same fields as JSON and
/// inline flags override it.
#[derive(Debug, Clone, Default, Args, Serialize)]
pub struct ShapeArgs {
    /// JSON shape file
    #[arg(long)]
    #[serde(skip)]
    pub shape_file: Option<PathBuf>,
    /// rectangular | quadratic | powerlaw | gaussian | sech
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub sigma_ns: Option<f64>,
    #[arg(long)]
    pub tau_ns: Option<f64>,
    /// Peak Rabi amplitude Ω₀/2π
    #[arg(long, allow_negative_numbers = true)]
    pub omega0_mhz: Option<f64>,
    /// Pulse area: pi, 3pi, 0.5pi or radians
    #[arg(long, value_parser = parse_area)]
    pub area: Option<f64>,
    #[arg(long)]
    pub duration_ns: Option<f64>,
}

impl ShapeArgs {
    pub fn spec(&self) -> Result<ShapeSpec, LabError> {
        let mut spec = match &self.shape_file {
            Some(path) => ShapeSpec::from_json(&read(path)?)?,
            None => ShapeSpec::default(),
        };
        if let Some(f) = &self.family {
            spec.family = f.clone();
        }
        if spec.family.is_empty() {
            return Err(LabError::Usage("give --family or --shape-file".into()));
        }
        macro_rules! over {
            ($($f:ident),*) => { $( if self.$f.is_some() { spec.$f = self.$f; } )* };
        }
        over!(beta, p, sigma_ns, tau_ns, duration_ns);
        // inline amplitude flags replace whatever the file fixed
        if self.omega0_mhz.is_some() || self.area.is_some() {
            spec.omega0_mhz = self.omega0_mhz;
            spec.area = self.area;
        }
        Ok(spec)
    }

    /// Like [`ShapeArgs::spec`], with the amplitude defaulting to area `default_area`.
    fn spec_or_area(&self, default_area: f64) -> Result<ShapeSpec, LabError> {
        let mut spec = self.spec()?;
        if spec.omega0_mhz.is_none() && spec.area.is_none() {
            spec.area = Some(default_area);
        }
        Ok(spec)
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ShapesArgs {
    #[arg(long)]
    pub family: String,
    /// Comma-separated β values
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub beta: Vec<f64>,
    /// Comma-separated exponents
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    pub sigma_ns: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub tau_ns: Vec<f64>,
    /// Every envelope is scaled to this area unless --omega0-mhz is given
    #[arg(long, value_parser = parse_area, default_value = "pi")]
    pub area: f64,
    #[arg(long)]
    pub omega0_mhz: Option<f64>,
    #[arg(long)]
    pub duration_ns: Option<f64>,
    /// Sample spacing; samples sit at slot midpoints
    #[arg(long, default_value_t = HARDWARE_DT_NS)]
    pub step_ns: f64,
    #[arg(long, short)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AreaArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    /// Report the amplitude that reaches this area instead
    #[arg(long, value_parser = parse_area)]
    pub target: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub delta_mhz: f64,
    /// Sub-intervals over the pulse for continuous propagation
    #[arg(long)]
    pub substeps: Option<usize>,
    /// Preset name or profile JSON; propagates the sampled device waveform
    #[arg(long)]
    pub profile: Option<String>,
    /// Calibration day of the profile; adds the open-system result
    #[arg(long)]
    pub day: Option<String>,
    /// CSV of the state after every clock slot
    #[arg(long)]
    #[serde(skip)]
    pub trajectory_out: Option<PathBuf>,
    #[arg(long, short)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

/// `lo,hi` in MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

fn parse_range(text: &str) -> Result<Range, String> {
    let (a, b) = text.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(Range { lo, hi })
    } else {
        Err(format!("need lo < hi, got {text}"))
    }
}

fn parse_shots(text: &str) -> Result<u32, String> {
    let v = text.strip_prefix("shots=").unwrap_or(text);
    match v.parse::<u32>() {
        Ok(n) if n > 0 => Ok(n),
        _ => Err(format!("expected shots=N with N >= 1, got {text}")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum RenderFormat {
    Svg,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub delta_range: Option<Range>,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub amp_range: Option<Range>,
    /// Detuning points
    #[arg(long)]
    pub nx: Option<usize>,
    /// Amplitude points
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long)]
    pub substeps: Option<usize>,
    /// Worker threads; 0 uses every core. The grid does not depend on it.
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub workers: usize,
    /// Sample on the profile clock and enforce its amplitude limit
    #[arg(long)]
    pub profile: Option<String>,
    #[arg(long)]
    pub day: Option<String>,
    /// Replace P₂ with k/shots, k ~ Binomial(shots, P₂)
    #[arg(long)]
    pub shots: Option<u32>,
    /// Readout error of --day, then shot noise: `shots=200`
    #[arg(long, value_parser = parse_shots)]
    pub with_noise: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, short)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// JSON metadata next to the grid
    #[arg(long)]
    #[serde(skip)]
    pub sidecar: Option<PathBuf>,
    /// Record the wall-clock time in the sidecar
    #[arg(long)]
    #[serde(skip)]
    pub timestamp: bool,
    /// Heatmap written next to --out (or to --render-out)
    #[arg(long, value_enum)]
    #[serde(skip)]
    pub render: Option<RenderFormat>,
    #[arg(long)]
    #[serde(skip)]
    pub render_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum ReportFormat {
    Json,
    Table,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WindowArgs {
    /// Fraction of the slice maximum that defines the line edges
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
    /// Detuning window of the slice; defaults to the family's landscape range
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub span_mhz: Option<Range>,
    #[arg(long, default_value_t = crate::report::DEFAULT_SLICE_STEP_MHZ)]
    pub step_mhz: f64,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    #[serde(skip)]
    pub format: ReportFormat,
    #[arg(long, short)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

impl WindowArgs {
    fn window(&self, family: &Family) -> SliceWindow {
        let mut w = SliceWindow::for_family(family);
        if let Some(r) = self.span_mhz {
            w.lo = r.lo;
            w.hi = r.hi;
        }
        w.step = self.step_mhz;
        w
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LinewidthArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CompareArgs {
    /// quadratic or powerlaw
    #[arg(long)]
    pub family: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub beta: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<u32>,
    /// Defaults to 3pi for quadratic and pi for power laws
    #[arg(long, value_parser = parse_area)]
    pub area: Option<f64>,
    #[arg(long)]
    pub duration_ns: Option<f64>,
    #[command(flatten)]
    pub window: WindowArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DiagnoseArgs {
    #[command(flatten)]
    pub shape: ShapeArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub delta_mhz: f64,
    #[arg(long, default_value_t = 801)]
    pub points: usize,
    #[arg(long, short)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RenderArgs {
    /// Grid CSV written by `sweep`
    #[arg(long)]
    #[serde(skip)]
    pub grid: PathBuf,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long, short)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, LabError> {
    fs::read_to_string(path).map_err(|e| LabError::io(format!("reading {}", path.display()), e))
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), LabError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| LabError::io(format!("writing {}", p.display()), e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
                // a closed pipe (`| head`) is not an error for us
                Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|e| LabError::io("writing stdout", e)),
            }
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    s
}

fn hash_of<T: Serialize>(command: &str, args: &T) -> String {
    config_hash(&(command, args))
}

pub fn run(cli: &Cli) -> Result<Exit, LabError> {
    match &cli.command {
        Command::Shapes(a) => cmd_shapes(a),
        Command::Area(a) => cmd_area(a),
        Command::Propagate(a) => cmd_propagate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Linewidth(a) => cmd_linewidth(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Diagnose(a) => cmd_diagnose(a),
        Command::Render(a) => cmd_render(a),
    }
}

fn family_list(family: &str, beta: &[f64], p: &[u32], sigma: &[f64], tau: &[f64]) -> Result<Vec<Family>, LabError> {
    let empty = |what: &str| LabError::Usage(format!("family '{family}' needs a non-empty --{what} list"));
    let list: Vec<Family> = match family.to_ascii_lowercase().as_str() {
        "rectangular" | "rect" => vec![Family::Rectangular],
        "quadratic" => beta.iter().map(|&beta| Family::Quadratic { beta }).collect(),
        "powerlaw" | "power-law" => p.iter().map(|&p| Family::PowerLaw { p }).collect(),
        "gaussian" => sigma.iter().map(|&sigma| Family::Gaussian { sigma }).collect(),
        "sech" => tau.iter().map(|&tau| Family::Sech { tau }).collect(),
        other => return Err(LabError::Usage(format!("unknown family '{other}'"))),
    };
    if list.is_empty() {
        let what = match family.to_ascii_lowercase().as_str() {
            "quadratic" => "beta",
            "gaussian" => "sigma-ns",
            "sech" => "tau-ns",
            _ => "p",
        };
        return Err(empty(what));
    }
    Ok(list)
}

fn cmd_shapes(a: &ShapesArgs) -> Result<Exit, LabError> {
    let families = family_list(&a.family, &a.beta, &a.p, &a.sigma_ns, &a.tau_ns)?;
    let mut shapes = Vec::with_capacity(families.len());
    for f in families {
        let duration = a.duration_ns.unwrap_or_else(|| default_duration(&f));
        let shape = match a.omega0_mhz {
            Some(mhz) => PulseShape::new(f, mhz_to_rad_per_ns(mhz), duration)?,
            None => PulseShape::with_area(f, duration, a.area)?,
        };
        shapes.push(shape);
    }
    if a.step_ns.is_nan() || a.step_ns <= 0.0 {
        return Err(LabError::Usage(format!("--step-ns must be positive, got {}", a.step_ns)));
    }
    let longest = shapes.iter().map(PulseShape::duration).fold(0.0, f64::max);
    let n = (longest / a.step_ns).round().max(1.0) as usize;
    let mut out = header_line(&hash_of("shapes", a), &[("units", "MHz".into())]);
    out.push('\n');
    out.push_str("t_ns");
    for s in &shapes {
        let _ = write!(out, ",{}", s.id());
    }
    out.push('\n');
    for k in 0..n {
        let t = (k as f64 + 0.5) * a.step_ns;
        out.push_str(&sig9(t));
        for s in &shapes {
            let w = if t < s.duration() { s.envelope(t) } else { 0.0 };
            let _ = write!(out, ",{}", sig9(rad_per_ns_to_mhz(w)));
        }
        out.push('\n');
    }
    write_to(a.out.as_deref(), &out)?;
    Ok(Exit::Success)
}

#[derive(Serialize)]
struct AreaReport {
    shape: String,
    duration_ns: f64,
    omega0_mhz: f64,
    area_rad: f64,
    area_over_pi: f64,
}

fn cmd_area(a: &AreaArgs) -> Result<Exit, LabError> {
    let spec = a.shape.spec()?;
    let shape = match a.target {
        Some(area) => {
            let mut s = spec.clone();
            s.omega0_mhz = None;
            s.area = Some(area);
            s.build()?
        }
        None => spec.build()?,
    };
    let area = match a.target {
        Some(t) => t,
        None => shape.omega0() * unit_area(shape.family(), shape.duration()),
    };
    let report = AreaReport {
        shape: shape.id(),
        duration_ns: shape.duration(),
        omega0_mhz: rad_per_ns_to_mhz(shape.omega0()),
        area_rad: area,
        area_over_pi: area / std::f64::consts::PI,
    };
    write_to(None, &json(&report))?;
    Ok(Exit::Success)
}

#[derive(Serialize)]
struct OpenSystem {
    day: String,
    t1_us: f64,
    t2_us: f64,
    p2: f64,
    decoherence_impact: f64,
    readout_error: f64,
    p2_measured: f64,
    t2_linewidth_khz: f64,
}

#[derive(Serialize)]
struct PropagateReport {
    shape: String,
    duration_ns: f64,
    omega0_mhz: f64,
    delta_mhz: f64,
    method: &'static str,
    substeps: Option<usize>,
    clock_ns: Option<f64>,
    p1: f64,
    p2: f64,
    c1: [f64; 2],
    c2: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    open_system: Option<OpenSystem>,
}

fn profile_for(profile: Option<&str>, day: Option<&str>) -> Result<Option<HardwareProfile>, LabError> {
    match (profile, day) {
        (Some(p), _) => Ok(Some(load_profile(p)?)),
        (None, Some(_)) => Ok(Some(load_profile(DEFAULT_PROFILE)?)),
        (None, None) => Ok(None),
    }
}

fn cmd_propagate(a: &PropagateArgs) -> Result<Exit, LabError> {
    let shape = a.shape.spec()?.build()?;
    let delta = mhz_to_rad_per_ns(a.delta_mhz);
    let profile = profile_for(a.profile.as_deref(), a.day.as_deref())?;
    let ground = QubitState::ground();

    let clock = profile.as_ref().map_or(HARDWARE_DT_NS, |p| p.dt_ns);
    let schedule = match &profile {
        Some(p) => p.clamp_and_discretize(&shape)?,
        None => shape.sample(clock)?,
    }
    .with_constant_detuning(delta);

    let (state, method, substeps) = if profile.is_some() {
        (propagate_schedule(&schedule, ground)?, "clock", None)
    } else {
        let n = a.substeps.unwrap_or_else(|| default_substeps(shape.duration()));
        (propagate(&shape, delta, ground, n)?, "magnus", Some(n))
    };

    let open_system = match (&profile, &a.day) {
        (Some(p), Some(label)) => {
            let day = p.day(label)?;
            let rho = propagate_lindblad(&schedule, day.coherence()?, DensityMatrix::ground())?;
            Some(OpenSystem {
                day: day.label.clone(),
                t1_us: day.t1_us,
                t2_us: day.t2_us,
                p2: rho.rho22,
                decoherence_impact: (rho.rho22 - state.p2()).abs(),
                readout_error: day.readout_error,
                p2_measured: apply_readout_error(rho.rho22, day.readout_error)?,
                t2_linewidth_khz: t2_limited_linewidth_khz(day.t2_us),
            })
        }
        _ => None,
    };

    if let Some(path) = &a.trajectory_out {
        let traj = propagate_schedule_trajectory(&schedule, ground)?;
        let mut csv = header_line(
            &hash_of("propagate", a),
            &[("shape", shape.id()), ("clock_ns", sig9(clock))],
        );
        csv.push_str("\nt_ns,p1,p2,re_c2,im_c2\n");
        for pt in traj {
            let _ = writeln!(
                csv,
                "{},{},{},{},{}",
                sig9(pt.t),
                sig9(pt.state.p1()),
                sig9(pt.state.p2()),
                sig9(pt.state.c2.re),
                sig9(pt.state.c2.im)
            );
        }
        write_to(Some(path), &csv)?;
    }

    let report = PropagateReport {
        shape: shape.id(),
        duration_ns: shape.duration(),
        omega0_mhz: rad_per_ns_to_mhz(shape.omega0()),
        delta_mhz: a.delta_mhz,
        method,
        substeps,
        clock_ns: profile.as_ref().map(|_| clock),
        p1: state.p1(),
        p2: state.p2(),
        c1: [state.c1.re, state.c1.im],
        c2: [state.c2.re, state.c2.im],
        open_system,
    };
    write_to(a.out.as_deref(), &json(&report))?;
    Ok(Exit::Success)
}

fn sweep_spec(a: &SweepArgs, profile: Option<&HardwareProfile>) -> Result<LandscapeSpec, LabError> {
    let template = a.shape.spec()?.template()?;
    let (d, w, nx, ny) = match template.family() {
        Family::PowerLaw { .. } => ((-35.0, 35.0), (0.0, 40.0), 141, 81),
        _ => ((-60.0, 60.0), (0.0, 25.0), 241, 101),
    };
    let d = a.delta_range.map_or(d, |r| (r.lo, r.hi));
    let w = a.amp_range.map_or(w, |r| (r.lo, r.hi));
    let detunings = Axis::new(d.0, d.1, a.nx.unwrap_or(nx))?;
    let amplitudes = Axis::new(w.0, w.1, a.ny.unwrap_or(ny))?;
    let integrator = match (profile, a.substeps) {
        (Some(p), _) => Integrator::Clock { step: p.dt_ns },
        (None, Some(n)) => Integrator::Magnus { substeps: n },
        (None, None) => Integrator::Magnus {
            substeps: default_substeps(template.duration()),
        },
    };
    Ok(LandscapeSpec::with_integrator(template, detunings, amplitudes, integrator)?)
}

fn cmd_sweep(a: &SweepArgs) -> Result<Exit, LabError> {
    if a.with_noise.is_some() && a.day.is_none() {
        return Err(LabError::Usage("--with-noise needs --day for the readout error".into()));
    }
    if a.with_noise.is_some() && a.shots.is_some() {
        return Err(LabError::Usage("give --shots or --with-noise, not both".into()));
    }
    if a.render.is_some() && a.out.is_none() && a.render_out.is_none() {
        return Err(LabError::Usage("--render needs --out or --render-out".into()));
    }
    let profile = profile_for(a.profile.as_deref(), a.day.as_deref())?;
    let spec = sweep_spec(a, profile.as_ref())?;
    if let Some(p) = &profile {
        // the largest amplitude of the grid decides whether the whole sweep fits the device
        let peak = spec.template().with_amplitude(mhz_to_rad_per_ns(spec.amplitudes().hi))?;
        p.clamp_and_discretize(&peak)?;
    }
    let mut grid = sweep(&spec, a.workers)?;
    let mut fields = vec![
        ("shape", grid.shape_id.clone()),
        ("duration_ns", sig9(grid.duration)),
    ];
    if let Some(shots) = a.with_noise {
        let day = profile.as_ref().expect("profile set with --day").day(a.day.as_deref().unwrap_or_default())?;
        grid = measured(&grid, shots, a.seed, day.readout_error)?;
        fields.push(("shots", shots.to_string()));
        fields.push(("readout_error", sig9(day.readout_error)));
        fields.push(("seed", a.seed.to_string()));
    } else if let Some(shots) = a.shots {
        grid = add_shot_noise(&grid, shots, a.seed)?;
        fields.push(("shots", shots.to_string()));
        fields.push(("seed", a.seed.to_string()));
    }
    let hash = hash_of("sweep", a);
    let header = header_line(&hash, &fields);
    write_to(a.out.as_deref(), &write_grid_csv(&grid, &header))?;

    if let Some(path) = &a.sidecar {
        let generated_unix = if a.timestamp {
            SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs())
        } else {
            None
        };
        let sidecar = Sidecar {
            tool: TOOL,
            version: VERSION,
            config_hash: &hash,
            shape: &grid.shape_id,
            duration_ns: grid.duration,
            rows: grid.rows(),
            cols: grid.cols(),
            config: a,
            generated_unix,
        };
        write_to(Some(path), &json(&sidecar))?;
    }
    if a.render.is_some() {
        let path = match (&a.render_out, &a.out) {
            (Some(p), _) => p.clone(),
            (None, Some(out)) => out.with_extension("svg"),
            (None, None) => unreachable!("checked above"),
        };
        write_to(Some(&path), &heatmap_svg(&grid, &grid.shape_id))?;
    }
    Ok(Exit::Success)
}

#[derive(Serialize)]
struct LinewidthOutput<'a> {
    #[serde(flatten)]
    report: &'a superbroad_core::analysis::LinewidthReport,
    window: SliceWindow,
}

fn cmd_linewidth(a: &LinewidthArgs) -> Result<Exit, LabError> {
    let mut spec = a.shape.spec()?;
    let area = spec.area.unwrap_or(3.0 * std::f64::consts::PI);
    if spec.omega0_mhz.is_some() {
        return Err(LabError::Usage("linewidth fixes the area; use --area instead of --omega0-mhz".into()));
    }
    spec.area = None;
    let template = spec.template()?;
    let window = a.window.window(template.family());
    let report = linewidth(&template, area, a.window.threshold, window)?;
    let text = match a.window.format {
        ReportFormat::Json => json(&LinewidthOutput { report: &report, window }),
        ReportFormat::Table => linewidth_table(&report),
    };
    write_to(a.window.out.as_deref(), &text)?;
    Ok(if report.status == LineStatus::Clipped {
        Exit::Clipped
    } else {
        Exit::Success
    })
}

fn cmd_compare(a: &CompareArgs) -> Result<Exit, LabError> {
    let quadratic = match a.family.to_ascii_lowercase().as_str() {
        "quadratic" => true,
        "powerlaw" | "power-law" => false,
        other => return Err(LabError::Usage(format!("compare supports quadratic and powerlaw, not '{other}'"))),
    };
    let families: Vec<Family> = if quadratic {
        let betas = if a.beta.is_empty() { vec![-1.0, 0.0, 0.25, 0.5, 0.75, 1.0] } else { a.beta.clone() };
        betas.into_iter().map(|beta| Family::Quadratic { beta }).collect()
    } else {
        let ps = if a.p.is_empty() { vec![0, 1, 2, 3] } else { a.p.clone() };
        ps.into_iter().map(|p| Family::PowerLaw { p }).collect()
    };
    let baseline = if quadratic {
        Family::Quadratic { beta: 0.0 }
    } else {
        Family::PowerLaw { p: 0 }
    };
    let area = a.area.unwrap_or(if quadratic { 3.0 * std::f64::consts::PI } else { std::f64::consts::PI });
    let duration = a.duration_ns.unwrap_or_else(|| default_duration(&baseline));
    let window = a.window.window(&baseline);
    let table = compare(&families, &baseline, duration, area, a.window.threshold, window)?;
    let text = match a.window.format {
        ReportFormat::Json => json(&table),
        ReportFormat::Table => table.to_text(),
    };
    write_to(a.window.out.as_deref(), &text)?;
    Ok(if table.any_bound() { Exit::Clipped } else { Exit::Success })
}

fn cmd_diagnose(a: &DiagnoseArgs) -> Result<Exit, LabError> {
    let shape = a.shape.spec_or_area(3.0 * std::f64::consts::PI)?.build()?;
    let delta = mhz_to_rad_per_ns(a.delta_mhz);
    let d = diagnose(&shape, delta, a.points)?;
    let mut fields = vec![
        ("shape", shape.id()),
        ("omega0_mhz", sig9(rad_per_ns_to_mhz(shape.omega0()))),
        ("delta_mhz", sig9(a.delta_mhz)),
        ("units", "rad/ns".to_string()),
        ("max_abs_theta2_dot", sig9(d.max_abs_theta2_dot())),
    ];
    if let Ok(m) = midpoint_asymptotic(&shape, delta) {
        fields.push(("midpoint_theta2_dot_asymptotic", sig9(m.theta2_dot)));
        fields.push(("midpoint_asymptotic_valid", (!m.outside_validity).to_string()));
    }
    if d.edge_discontinuity {
        fields.push(("edge_discontinuity", "true".into()));
    }
    let mut out = header_line(&hash_of("diagnose", a), &fields);
    out.push_str("\nt_ns,eps1,eps2,theta1,theta1_dot,theta2_dot,gamma1\n");
    for k in 0..d.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            sig9(d.t[k]),
            sig9(d.eps1[k]),
            sig9(d.eps2[k]),
            sig9(d.theta1[k]),
            sig9(d.theta1_dot[k]),
            sig9(d.theta2_dot[k]),
            sig9(d.gamma1[k])
        );
    }
    write_to(a.out.as_deref(), &out)?;
    Ok(Exit::Success)
}

fn cmd_render(a: &RenderArgs) -> Result<Exit, LabError> {
    let grid = read_grid_csv(&read(&a.grid)?)?;
    let title = a.title.clone().unwrap_or_else(|| grid.shape_id.clone());
    write_to(a.out.as_deref(), &heatmap_svg(&grid, &title))?;
    Ok(Exit::Success)
}
