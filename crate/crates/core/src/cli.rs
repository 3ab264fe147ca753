//! Command-line front-end.
//!
//! Exit codes: 0 success, 2 usage, 3 validation or I/O, 4 numerical.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::aperture::{self, BeamMetrics, Component, CrossPolReport, FarField, PatternCut};
use crate::design::{DesignSpec, Handedness};
use crate::hologram::{self, RadiatedFieldModel, TensorImpedanceField};
use crate::layout::{self, ClampPolicy, Layout, LayoutFormat};
use crate::svg;
use crate::unitcell::{self, DispersionTable, MonotonePolicy, SyntheticSweep, ZgCurve};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(
    name = "janus-holo",
    version,
    about = "Janus tensor-impedance holographic antenna toolkit"
)]
pub struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the reactance-versus-gap curve from an eigenmode sweep.
    Ingest(IngestArgs),
    /// Synthesize the impedance field of a design.
    Synth(SynthArgs),
    /// Far-field patterns and beam metrics of a synthesized field.
    Radiate(RadiateArgs),
    /// Co-/cross-polar comparison of two single-beam syntheses.
    Compare(CompareArgs),
    /// Slotted-patch layout of a synthesized field.
    Layout(LayoutArgs),
    /// Full pipeline: synth, radiate over the band, layout.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Dispersion CSV (`g_mm,freq_ghz,phi_x_rad,phi_y_rad`).
    #[arg(long)]
    pub input: PathBuf,
    /// Lattice period; defaults to the `<input>.json` sidecar.
    #[arg(long)]
    pub p_mm: Option<f64>,
    /// Sweep frequency to extract; optional when the file holds one.
    #[arg(long)]
    pub freq: Option<f64>,
    /// Fit a decreasing curve to non-monotone data instead of rejecting it.
    #[arg(long)]
    pub force_monotone: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Cut used for the metrics, degrees.
    #[arg(long, default_value_t = 0.0)]
    pub cut: f64,
    /// θ step of the pattern cuts, degrees.
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    /// Points per axis of the u-v map; 0 disables the map.
    #[arg(long, default_value_t = 201)]
    pub uv_points: usize,
}

#[derive(Debug, Args)]
pub struct RadiateArgs {
    /// Impedance field CSV written by `synth`.
    #[arg(long)]
    pub field: PathBuf,
    /// Design spec supplying the band reactance model and beam angles.
    #[arg(long)]
    pub spec: PathBuf,
    /// Comma-separated frequencies in GHz; defaults to the band center.
    #[arg(long)]
    pub freq: Option<String>,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Baseline radiated-field model (proposed, transverse).
    #[arg(long, default_value = "transverse")]
    pub baseline: String,
    /// Model under test.
    #[arg(long, default_value = "proposed")]
    pub proposed: String,
    /// Beam elevation, degrees.
    #[arg(long, default_value_t = 45.0)]
    pub theta: f64,
    /// Single frequency in GHz; defaults to the band center.
    #[arg(long)]
    pub freq: Option<String>,
    #[arg(long, default_value_t = 0.0)]
    pub cut: f64,
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LayoutArgs {
    #[arg(long)]
    pub field: PathBuf,
    /// Curve CSV written by `ingest`.
    #[arg(long)]
    pub curve: PathBuf,
    /// Comma-separated subset of json, csv, svg.
    #[arg(long, default_value = "json,csv,svg")]
    pub format: String,
    /// Fail on reactances outside the curve instead of clamping.
    #[arg(long)]
    pub strict: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Curve CSV; without it a synthetic placeholder curve is used.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// Comma-separated frequencies; defaults to the band edges and center.
    #[arg(long)]
    pub freq: Option<String>,
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub sampling: SamplingArgs,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .try_init();
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: &Command) -> Result<()> {
    match command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::Synth(a) => cmd_synth(a).map(|_| ()),
        Command::Radiate(a) => cmd_radiate(a),
        Command::Compare(a) => cmd_compare(a).map(|_| ()),
        Command::Layout(a) => cmd_layout(a).map(|_| ()),
        Command::Report(a) => cmd_report(a),
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    write(path, text + "\n")
}

/// Parses `GHZ[,GHZ...]`.
pub fn parse_freqs(list: &str) -> Result<Vec<f64>> {
    let freqs = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .ok()
                .filter(|f| f.is_finite() && *f > 0.0)
                .ok_or_else(|| Error::Usage(format!("invalid frequency `{s}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if freqs.is_empty() {
        return Err(Error::Usage("frequency list is empty".into()));
    }
    Ok(freqs)
}

fn freq_tag(f: f64) -> String {
    format!("{f:.3}GHz")
}

#[derive(Debug, Serialize)]
struct IngestSummary {
    source: String,
    period_mm: f64,
    freq_ghz: f64,
    policy: &'static str,
    rows: usize,
    knots: usize,
    gap_range_mm: (f64, f64),
    reactance_range_ohm: (f64, f64),
}

pub fn cmd_ingest(a: &IngestArgs) -> Result<()> {
    let table = DispersionTable::read(&a.input, a.p_mm)?;
    let mut freqs: Vec<f64> = table.rows().iter().map(|r| r.freq_ghz).collect();
    freqs.sort_by(f64::total_cmp);
    freqs.dedup();
    let freq = match (a.freq, freqs.as_slice()) {
        (Some(f), _) => f,
        (None, [f]) => *f,
        (None, _) => {
            return Err(Error::Usage(format!(
                "sweep holds {} frequencies; choose one with --freq",
                freqs.len()
            )))
        }
    };
    let policy = if a.force_monotone {
        MonotonePolicy::Isotonic
    } else {
        MonotonePolicy::Reject
    };
    let curve = unitcell::build_zg_curve(&table, freq, policy)?;
    create_dir(&a.out)?;
    write(&a.out.join("zg_curve.csv"), curve.to_csv())?;
    write_json(
        &a.out.join("ingest_summary.json"),
        &IngestSummary {
            source: a.input.display().to_string(),
            period_mm: table.period_mm(),
            freq_ghz: freq,
            policy: if a.force_monotone {
                "isotonic"
            } else {
                "reject"
            },
            rows: table.rows().len(),
            knots: curve.knots().len(),
            gap_range_mm: curve.gap_range(),
            reactance_range_ohm: curve.reactance_range(),
        },
    )
}

/// The five impedance maps written by `synth`: `(file stem, title, unit, value)`.
#[allow(clippy::type_complexity)]
const MAPS: [(&str, &str, &str, fn(&hologram::ImpedanceCell) -> f64); 5] = [
    ("map_zxx", "Zxx", "ohm", |c| c.z.xx),
    ("map_zxy", "Zxy", "ohm", |c| c.z.xy),
    ("map_zyy", "Zyy", "ohm", |c| c.z.yy),
    ("map_xeffmax", "X_eff-max", "ohm", |c| c.x_eff_max),
    ("map_angle", "max-impedance angle", "deg", |c| {
        c.direction_rad.to_degrees()
    }),
];

fn write_field(field: &TensorImpedanceField, out: &Path) -> Result<()> {
    write(&out.join("field.csv"), field.to_csv())?;
    let n = field.n_cells();
    for (stem, title, unit, f) in MAPS {
        let values: Vec<Option<f64>> = field.cells().iter().map(|c| Some(f(c))).collect();
        let range = (stem == "map_angle").then_some((0.0, 180.0));
        write(
            &out.join(format!("{stem}.svg")),
            svg::heatmap(title, unit, n, n, &values, range),
        )?;
    }
    Ok(())
}

pub fn cmd_synth(a: &SynthArgs) -> Result<TensorImpedanceField> {
    let spec = DesignSpec::read(&a.spec)?;
    let field = hologram::synthesize_field(&spec)?;
    create_dir(&a.out)?;
    write_field(&field, &a.out)?;
    Ok(field)
}

#[derive(Debug, Serialize)]
struct RadiateMetrics {
    design: String,
    cut_phi_deg: f64,
    theta_cp_deg: f64,
    theta_lp_deg: f64,
    frequencies: Vec<BeamMetrics>,
}

fn check_sampling(s: &SamplingArgs) -> Result<()> {
    if !(s.step > 0.0 && s.step <= 10.0) {
        return Err(Error::Usage(format!(
            "--step must be in (0, 10] deg, got {}",
            s.step
        )));
    }
    Ok(())
}

fn radiate_field(
    field: &TensorImpedanceField,
    spec: &DesignSpec,
    freqs: &[f64],
    sampling: &SamplingArgs,
    out: &Path,
) -> Result<RadiateMetrics> {
    check_sampling(sampling)?;
    let mut cuts = vec![0.0, 90.0];
    if !cuts.contains(&sampling.cut) {
        cuts.push(sampling.cut);
    }
    let directions = aperture::cut_directions(&cuts, sampling.step);
    let mut frequencies = Vec::with_capacity(freqs.len());
    for &f in freqs {
        let tag = freq_tag(f);
        let ap = aperture::aperture_fields(field, f)?;
        let ff = FarField::compute(&ap, &field.name, &directions)?;
        write(&out.join(format!("farfield_{tag}.csv")), ff.to_csv())?;
        for &phi in &cuts {
            let cut = aperture::pattern_cut(&ff, phi)?;
            write(&out.join(format!("cut_phi{phi}_{tag}.csv")), cut.to_csv())?;
        }
        if sampling.uv_points > 0 {
            write_uv_map(&ap, &field.name, sampling.uv_points, &tag, out)?;
        }
        let cut = aperture::pattern_cut(&ff, sampling.cut)?;
        let m = aperture::beam_metrics(
            &cut,
            &field.name,
            spec.handedness,
            spec.theta_cp_deg,
            spec.theta_lp_deg,
        )?;
        log::info!(
            "{tag}: CP peak {:+.1} deg (AR {:.2} dB), LP peak {:+.1} deg",
            m.cp_peak_deg,
            m.ar_cp_peak_db,
            m.lp_peak_deg
        );
        frequencies.push(m);
    }
    Ok(RadiateMetrics {
        design: field.name.clone(),
        cut_phi_deg: sampling.cut,
        theta_cp_deg: spec.theta_cp_deg,
        theta_lp_deg: spec.theta_lp_deg,
        frequencies,
    })
}

fn write_uv_map(
    ap: &aperture::ApertureField,
    name: &str,
    n: usize,
    tag: &str,
    out: &Path,
) -> Result<()> {
    let ff = FarField::compute_uv_grid(ap, name, n)?;
    write(&out.join(format!("uv_{tag}.csv")), ff.to_uv_csv())?;
    let reference = ff.reference_magnitude().max(f64::MIN_POSITIVE);
    let step = if n > 1 { 2.0 / (n - 1) as f64 } else { 1.0 };
    let index = |c: f64| (((c + 1.0) / step).round() as usize).min(n - 1);
    for comp in Component::ALL {
        let mut values = vec![None; n * n];
        for s in &ff.samples {
            let e = match comp {
                Component::Lhcp => s.e_lhcp,
                Component::Rhcp => s.e_rhcp,
                Component::ETheta => s.e_theta,
                Component::EPhi => s.e_phi,
            };
            values[index(s.v) * n + index(s.u)] =
                Some(aperture::to_db(e.norm() / reference).max(-40.0));
        }
        let label = match comp {
            Component::Lhcp => "elhcp",
            Component::Rhcp => "erhcp",
            Component::ETheta => "etheta",
            Component::EPhi => "ephi",
        };
        let svg = svg::heatmap(
            &format!("|{label}| over u-v"),
            "dB",
            n,
            n,
            &values,
            Some((-40.0, 0.0)),
        );
        write(&out.join(format!("uv_{label}_{tag}.svg")), svg)?;
    }
    Ok(())
}

pub fn cmd_radiate(a: &RadiateArgs) -> Result<()> {
    let spec = DesignSpec::read(&a.spec)?;
    let freqs = match &a.freq {
        Some(list) => parse_freqs(list)?,
        None => vec![spec.center_freq_ghz()],
    };
    check_sampling(&a.sampling)?;
    let field = TensorImpedanceField::read(&a.field)?.with_band(spec.band());
    let mut field = field;
    field.name = spec.name.clone();
    create_dir(&a.out)?;
    let metrics = radiate_field(&field, &spec, &freqs, &a.sampling, &a.out)?;
    write_json(&a.out.join("metrics.json"), &metrics)
}

fn comparison_csv(a: &PatternCut, b: &PatternCut, co: Handedness) -> String {
    let co_c = Component::co_pol(co);
    let cross_c = Component::co_pol(co.opposite());
    let reference = a.reference.max(b.reference);
    let rescale = |cut: &PatternCut, c: Component| -> Vec<f64> {
        let shift = 20.0 * (cut.reference / reference).log10();
        cut.db(c).into_iter().map(|v| v + shift).collect()
    };
    let (pa, xa, pb, xb) = (
        rescale(a, co_c),
        rescale(a, cross_c),
        rescale(b, co_c),
        rescale(b, cross_c),
    );
    let mut out = String::from(
        "theta_deg,proposed_co_db,proposed_cross_db,baseline_co_db,baseline_cross_db\n",
    );
    for (k, p) in a.points.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.theta_deg, pa[k], xa[k], pb[k], xb[k]
        ));
    }
    out
}

pub fn cmd_compare(a: &CompareArgs) -> Result<CrossPolReport> {
    let baseline_model = RadiatedFieldModel::from_name(&a.baseline)?;
    let proposed_model = RadiatedFieldModel::from_name(&a.proposed)?;
    if !(a.step > 0.0 && a.step <= 10.0) {
        return Err(Error::Usage(format!(
            "--step must be in (0, 10] deg, got {}",
            a.step
        )));
    }
    let spec = DesignSpec::read(&a.spec)?;
    let freq = match &a.freq {
        Some(list) => match parse_freqs(list)?.as_slice() {
            [f] => *f,
            _ => return Err(Error::Usage("compare takes a single frequency".into())),
        },
        None => spec.center_freq_ghz(),
    };
    let theta = a.theta.to_radians();
    let directions = aperture::cut_directions(&[a.cut], a.step);
    let far = |model: RadiatedFieldModel, label: &str| -> Result<FarField> {
        let field = hologram::synthesize_single_beam(&spec, theta, spec.handedness, model)?;
        let ap = aperture::aperture_fields(&field, freq)?;
        FarField::compute(&ap, label, &directions)
    };
    let fa = far(proposed_model, &a.proposed)?;
    let fb = far(baseline_model, &a.baseline)?;
    let report = aperture::crosspol_report(&fa, &fb, a.cut, spec.handedness)?;
    create_dir(&a.out)?;
    let csv = comparison_csv(
        &aperture::pattern_cut(&fa, a.cut)?,
        &aperture::pattern_cut(&fb, a.cut)?,
        spec.handedness,
    );
    write(&a.out.join("comparison.csv"), csv)?;
    write_json(&a.out.join("comparison.json"), &report)?;
    Ok(report)
}

pub fn parse_formats(list: &str) -> Result<Vec<LayoutFormat>> {
    let mut formats = Vec::new();
    for s in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let f: LayoutFormat = s.parse()?;
        if !formats.contains(&f) {
            formats.push(f);
        }
    }
    if formats.is_empty() {
        return Err(Error::Usage("no layout format given".into()));
    }
    Ok(formats)
}

pub fn cmd_layout(a: &LayoutArgs) -> Result<Layout> {
    let formats = parse_formats(&a.format)?;
    let curve = ZgCurve::read(&a.curve)?;
    let field = TensorImpedanceField::read(&a.field)?;
    let policy = if a.strict {
        ClampPolicy::Strict
    } else {
        ClampPolicy::Clamp
    };
    let layout = layout::realize_layout(&field, &curve, policy)?;
    create_dir(&a.out)?;
    layout.write_all(&a.out, &formats)?;
    Ok(layout)
}

#[derive(Debug, Serialize)]
struct LayoutSummary {
    n_cells: usize,
    pitch_mm: f64,
    extent_mm: f64,
    gap_range_mm: (f64, f64),
    clamped_cells: usize,
    degenerate_cells: usize,
    curve: String,
}

#[derive(Debug, Serialize)]
struct Report {
    spec: DesignSpec,
    radiation: RadiateMetrics,
    layout: LayoutSummary,
}

pub fn cmd_report(a: &ReportArgs) -> Result<()> {
    check_sampling(&a.sampling)?;
    let spec = DesignSpec::read(&a.spec)?;
    let freqs = match &a.freq {
        Some(list) => parse_freqs(list)?,
        None => vec![spec.f_lower_ghz, spec.center_freq_ghz(), spec.f_upper_ghz],
    };
    let (curve, curve_label) = match &a.curve {
        Some(path) => (ZgCurve::read(path)?, path.display().to_string()),
        None => {
            log::warn!("no --curve given; using the synthetic placeholder curve");
            let sweep = SyntheticSweep {
                period_mm: spec.lattice_p_mm,
                ..SyntheticSweep::default()
            };
            let f = spec.center_freq_ghz();
            let curve = unitcell::build_zg_curve(&sweep.table(&[f])?, f, MonotonePolicy::Reject)?;
            (curve, "synthetic".to_string())
        }
    };
    let field = hologram::synthesize_field(&spec)?;
    create_dir(&a.out)?;
    write(&a.out.join("spec.json"), spec.to_json())?;
    write_field(&field, &a.out)?;
    write(&a.out.join("zg_curve.csv"), curve.to_csv())?;
    let radiation = radiate_field(&field, &spec, &freqs, &a.sampling, &a.out)?;
    write_json(&a.out.join("metrics.json"), &radiation)?;
    let policy = if a.strict {
        ClampPolicy::Strict
    } else {
        ClampPolicy::Clamp
    };
    let layout = layout::realize_layout(&field, &curve, policy)?;
    layout.write_all(&a.out, &LayoutFormat::ALL)?;
    let gaps = layout
        .cells
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            (lo.min(c.gap_mm), hi.max(c.gap_mm))
        });
    let report = Report {
        spec,
        radiation,
        layout: LayoutSummary {
            n_cells: layout.n_cells,
            pitch_mm: layout.pitch_mm,
            extent_mm: layout.extent_mm(),
            gap_range_mm: gaps,
            clamped_cells: layout.cells.iter().filter(|c| c.clamped).count(),
            degenerate_cells: layout.cells.iter().filter(|c| c.degenerate).count(),
            curve: curve_label,
        },
    };
    write_json(&a.out.join("report.json"), &report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frequency_lists() {
        assert_eq!(
            parse_freqs("11.5, 11.75,12").unwrap(),
            vec![11.5, 11.75, 12.0]
        );
        assert!(matches!(parse_freqs(""), Err(Error::Usage(_))));
        assert!(matches!(parse_freqs(" , "), Err(Error::Usage(_))));
        assert!(matches!(parse_freqs("12,abc"), Err(Error::Usage(_))));
        assert!(matches!(parse_freqs("-1"), Err(Error::Usage(_))));
    }

    #[test]
    fn format_lists() {
        assert_eq!(
            parse_formats("svg,json,svg").unwrap(),
            vec![LayoutFormat::Svg, LayoutFormat::Json]
        );
        let e = parse_formats("dxf").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn usage_errors_exit_with_two() {
        assert_eq!(run(["janus-holo", "frobnicate"]), 2);
        assert_eq!(run(["janus-holo", "synth"]), 2);
        assert_eq!(run(["janus-holo", "--help"]), 0);
    }
}
