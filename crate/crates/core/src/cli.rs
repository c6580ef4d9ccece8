//! Command-line front end. `run` is the whole program minus process exit, so
//! tests drive it with in-memory streams.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::canonical::to_canonical_string;
use crate::filters::{ela_map, lga_map, noise_map, pca_basis, pca_map, ElaParams, FilterError, LgaParams, NoiseParams, PcaMode};
use crate::hash::compute_hash;
use crate::map::AnalysisMap;
use crate::metadata::summarize;
use crate::metrology::{run_metrology, AnnotationSet, MetrologyOptions};
use crate::raster::{load_image, Channel, RasterImage};
use crate::report::{self, Attachment, Clock, ReportConfig, ReportError, DEFAULT_FIXED_TIME};

pub const THREADS_ENV: &str = "PRINTPROOF_THREADS";

#[derive(Parser, Debug)]
#[command(name = "printproof", version, about = "Forensic image analysis: metadata, tamper maps, single-view metrology")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List JPEG container metadata (JFIF, EXIF, IPTC, ICC, SOF, DQT).
    Meta {
        file: PathBuf,
        /// Canonical JSON instead of the listing.
        #[arg(long)]
        json: bool,
    },
    /// Error level analysis map.
    Ela {
        file: PathBuf,
        /// Recompression quality.
        #[arg(long, default_value_t = 75, value_parser = clap::value_parser!(u8).range(1..=100))]
        quality: u8,
        /// Amplification: differences are multiplied by scale/10.
        #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u8).range(0..=100))]
        scale: u8,
        /// Contrast stretch: clip at the (100 - contrast)th percentile.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u8).range(0..=100))]
        contrast: u8,
        #[command(flatten)]
        out: MapOut,
    },
    /// Principal component projection or distance map.
    Pca {
        file: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
        component: u8,
        /// projection | distance
        #[arg(long, default_value = "projection", value_parser = parse_pca_mode)]
        mode: PcaMode,
        #[command(flatten)]
        out: MapOut,
    },
    /// Luminance gradient map.
    Lga {
        file: PathBuf,
        /// Gradient gain in percent.
        #[arg(long, default_value_t = 95, value_parser = clap::value_parser!(u8).range(0..=100))]
        intensity: u8,
        /// red | green | blue | luminance
        #[arg(long, default_value = "blue", value_parser = parse_channel)]
        channel: Channel,
        /// Scale by the peak gradient (true) or a fixed gain (false).
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        normalized: bool,
        #[command(flatten)]
        out: MapOut,
    },
    /// Noise residual against a local median.
    Noise {
        file: PathBuf,
        /// Median window radius; the window is (2r+1)^2.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=32))]
        radius: u32,
        #[arg(long, default_value_t = 8.0)]
        gain: f64,
        #[command(flatten)]
        out: MapOut,
    },
    /// Vanishing points, tilt, distortion and heights from annotations.
    Metrology {
        file: PathBuf,
        #[arg(long)]
        annotations: PathBuf,
        #[command(flatten)]
        geo: GeoArgs,
        #[arg(long)]
        json: bool,
    },
    /// Full pipeline into a verifiable report directory.
    Report {
        file: PathBuf,
        #[arg(long)]
        annotations: Option<PathBuf>,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        #[command(flatten)]
        geo: GeoArgs,
        /// Stamp every audit entry with this time (default 1970-01-01T00:00:00Z).
        #[arg(long, num_args = 0..=1, default_missing_value = DEFAULT_FIXED_TIME)]
        fixed_time: Option<String>,
        /// Also write report.html.
        #[arg(long)]
        html: bool,
        /// Record an externally produced artifact as LABEL=FILE.
        #[arg(long = "attach", value_name = "LABEL=FILE")]
        attach: Vec<String>,
    },
    /// Recompute every hash in a report directory.
    Verify { dir: PathBuf },
    /// HTTP API and examiner UI.
    Serve {
        #[arg(long, default_value_t = 8745)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
        /// Working directory for uploads, maps and annotations.
        #[arg(long, default_value = "printproof-work")]
        dir: PathBuf,
        /// Static UI bundle served at /.
        #[arg(long)]
        ui: Option<PathBuf>,
        /// Per-request timeout in seconds.
        #[arg(long, default_value_t = 30)]
        timeout: u64,
    },
}

#[derive(Args, Debug)]
pub struct MapOut {
    /// Write the map PNG here ("-" for stdout). Without it only statistics are printed.
    #[arg(short = 'o', long = "output")]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct GeoArgs {
    /// Seed for the random perturbation draws.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Endpoint perturbation for height intervals, in pixels.
    #[arg(long, default_value_t = 2.0)]
    pub perturbation: f64,
    /// Tilt verdict threshold on the length ratio.
    #[arg(long, default_value_t = 0.01)]
    pub tilt_tau: f64,
}

impl GeoArgs {
    fn options(&self) -> Result<MetrologyOptions, Failure> {
        if !(self.perturbation >= 0.0 && self.perturbation.is_finite()) {
            return Err(Failure::flag("perturbation must be a finite number >= 0"));
        }
        if !(self.tilt_tau > 0.0 && self.tilt_tau < 1.0) {
            return Err(Failure::flag("tilt-tau must lie in (0, 1)"));
        }
        Ok(MetrologyOptions { seed: self.seed, perturbation_px: self.perturbation, tilt_tau: self.tilt_tau })
    }
}

fn parse_pca_mode(s: &str) -> Result<PcaMode, String> {
    s.parse()
}

fn parse_channel(s: &str) -> Result<Channel, String> {
    s.parse()
}

/// Exit status plus the `error[CODE]` line.
#[derive(Debug)]
pub struct Failure {
    pub exit: i32,
    pub code: String,
    pub message: String,
    pub details: Vec<String>,
}

impl Failure {
    fn input(code: &str, message: impl Into<String>) -> Self {
        Self { exit: 1, code: code.into(), message: message.into(), details: vec![] }
    }

    fn flag(message: impl Into<String>) -> Self {
        Self { exit: 2, code: "BAD_FLAG".into(), message: message.into(), details: vec![] }
    }
}

impl From<FilterError> for Failure {
    fn from(e: FilterError) -> Self {
        let exit = if matches!(e, FilterError::InvalidParam { .. }) { 2 } else { 1 };
        Self { exit, code: e.code().into(), message: e.to_string(), details: vec![] }
    }
}

impl From<ReportError> for Failure {
    fn from(e: ReportError) -> Self {
        let details = match &e {
            ReportError::Verification(p) => p.clone(),
            ReportError::InvalidAnnotations(v) => v.iter().map(|v| format!("{}: {}", v.field, v.message)).collect(),
            _ => vec![],
        };
        let message = match &e {
            ReportError::Verification(p) => format!("{} problem(s) found", p.len()),
            other => other.to_string(),
        };
        Self { exit: 1, code: e.code().into(), message, details }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::input("IO", format!("{}: {e}", path.display()))
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Failure::input("NO_INPUT", format!("{}: no such file", path.display())),
        _ => Failure::input("NO_INPUT", format!("{}: {e}", path.display())),
    })
}

fn load(path: &Path) -> Result<(Vec<u8>, RasterImage), Failure> {
    let bytes = read_input(path)?;
    let img = load_image(&bytes).map_err(|e| Failure::input(e.code(), format!("{}: {e}", path.display())))?;
    Ok((bytes, img))
}

fn thread_count() -> Result<usize, Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map_err(|_| Failure::flag(format!("{THREADS_ENV}={v:?} is not a non-negative integer"))),
        _ => Ok(0),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Data goes to `stdout`, diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{}", e.render());
                return 0;
            }
            let text = e.render().to_string();
            let mut lines = text.lines();
            let first = lines.next().unwrap_or("").trim_start_matches("error: ");
            let _ = writeln!(stderr, "error[BAD_FLAG]: {first}");
            for l in lines.filter(|l| !l.trim().is_empty()) {
                let _ = writeln!(stderr, "  {l}");
            }
            return 2;
        }
    };
    let result = thread_count().and_then(|n| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure::input("THREADS", e.to_string()))?;
        pool.install(|| dispatch(cli.command, stdout, stderr))
    });
    match result {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(stderr, "error[{}]: {}", f.code, f.message);
            for d in &f.details {
                let _ = writeln!(stderr, "  {d}");
            }
            f.exit
        }
    }
}

fn out_err(e: std::io::Error) -> Failure {
    Failure::input("IO", format!("writing output: {e}"))
}

fn emit_map(map: &AnalysisMap, out: &MapOut, stdout: &mut (dyn Write + Send)) -> Result<(), Failure> {
    let png = map.to_png();
    let target = match &out.output {
        Some(p) if p.as_os_str() == "-" => {
            stdout.write_all(&png).map_err(out_err)?;
            return Ok(());
        }
        Some(p) => {
            report::pipeline::write_atomic(p, &png).map_err(Failure::from)?;
            Some(p.display().to_string())
        }
        None => None,
    };
    let s = map.stats();
    if out.json {
        let doc = json!({
            "kind": map.kind.as_str(),
            "params": map.params,
            "params_digest": map.params_digest,
            "width": map.width,
            "height": map.height,
            "channels": map.channels,
            "summary_stats": s,
            "map_hash": compute_hash(&png),
            "output": target,
        });
        writeln!(stdout, "{}", to_canonical_string(&doc).expect("serializable")).map_err(out_err)?;
    } else {
        writeln!(stdout, "{:<14}: {}", "Analysis", map.kind.as_str()).map_err(out_err)?;
        writeln!(stdout, "{:<14}: {}", "Parameters", map.params).map_err(out_err)?;
        writeln!(stdout, "{:<14}: {}", "Params digest", map.params_digest).map_err(out_err)?;
        writeln!(stdout, "{:<14}: {}x{}x{}", "Size", map.width, map.height, map.channels).map_err(out_err)?;
        writeln!(stdout, "{:<14}: mean {:.6}, p95 {:.6}, max {:.6}", "Values", s.mean, s.p95, s.max).map_err(out_err)?;
        if let Some(t) = target {
            writeln!(stdout, "{:<14}: {t}", "Written").map_err(out_err)?;
        }
    }
    Ok(())
}

fn print_json(stdout: &mut (dyn Write + Send), v: &Value) -> Result<(), Failure> {
    writeln!(stdout, "{}", to_canonical_string(v).expect("serializable")).map_err(out_err)
}

fn dispatch(cmd: Command, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> Result<(), Failure> {
    match cmd {
        Command::Meta { file, json } => {
            let bytes = read_input(&file)?;
            let s = summarize(&bytes).map_err(|e| Failure::input(e.code(), format!("{}: {e}", file.display())))?;
            if json {
                print_json(stdout, &s.to_json())
            } else {
                stdout.write_all(s.listing().as_bytes()).map_err(out_err)
            }
        }
        Command::Ela { file, quality, scale, contrast, out } => {
            let (_, img) = load(&file)?;
            let map = ela_map(&img, &ElaParams { quality, scale, contrast })?;
            if img.source_format() != crate::raster::SourceFormat::Jpeg {
                let _ = writeln!(stderr, "warning: {}", crate::filters::PNG_ELA_CAVEAT);
            }
            emit_map(&map, &out, stdout)
        }
        Command::Pca { file, component, mode, out } => {
            let (_, img) = load(&file)?;
            let map = pca_map(&img, &pca_basis(&img), component, mode)?;
            emit_map(&map, &out, stdout)
        }
        Command::Lga { file, intensity, channel, normalized, out } => {
            let (_, img) = load(&file)?;
            let map = lga_map(&img, &LgaParams { intensity, channel, normalized })?;
            emit_map(&map, &out, stdout)
        }
        Command::Noise { file, radius, gain, out } => {
            let p = NoiseParams { radius, gain };
            p.validate()?;
            let (_, img) = load(&file)?;
            emit_map(&noise_map(&img, &p)?, &out, stdout)
        }
        Command::Metrology { file, annotations, geo, json } => {
            let opts = geo.options()?;
            let (_, img) = load(&file)?;
            let ann_bytes = read_input(&annotations)?;
            let ann = AnnotationSet::from_json(&ann_bytes)
                .map_err(|e| Failure::input("BAD_ANNOTATIONS", format!("{}: {e}", annotations.display())))?;
            if ann.image_hash != *img.source_hash() {
                return Err(ReportError::HashMismatch {
                    what: "annotations".into(),
                    expected: img.source_hash().clone(),
                    found: ann.image_hash,
                }
                .into());
            }
            let r = run_metrology(&ann, (img.width(), img.height()), &opts).map_err(ReportError::InvalidAnnotations)?;
            if json {
                return print_json(stdout, &r.to_json());
            }
            write_metrology_text(stdout, &r).map_err(out_err)
        }
        Command::Report { file, annotations, output, geo, fixed_time, html, attach } => {
            let opts = geo.options()?;
            let mut attachments = Vec::new();
            for a in &attach {
                let (label, path) = a.split_once('=').ok_or_else(|| Failure::flag(format!("--attach {a:?}: expected LABEL=FILE")))?;
                let bytes = read_input(Path::new(path))?;
                attachments.push(Attachment { label: label.to_string(), file_hash: compute_hash(&bytes) });
            }
            let bytes = read_input(&file)?;
            let ann = annotations.as_deref().map(read_input).transpose()?;
            let cfg = ReportConfig {
                metrology: opts,
                clock: fixed_time.map_or(Clock::System, Clock::Fixed),
                attachments,
                ..Default::default()
            };
            let bundle = report::run_report(&bytes, ann.as_deref(), &cfg).map_err(|e| match e {
                ReportError::Decode(d) => Failure::input(d.code(), format!("{}: {d}", file.display())),
                other => other.into(),
            })?;
            report::write_report_dir(&bundle, &output, html)?;
            writeln!(
                stdout,
                "report {} written to {} ({} analyses, {} audit entries)",
                bundle.report.digest.as_ref().map(|d| d.to_hex()).unwrap_or_default(),
                output.display(),
                bundle.report.analyses.len(),
                bundle.report.audit.len()
            )
            .map_err(out_err)
        }
        Command::Verify { dir } => {
            if !dir.join(report::REPORT_FILE).is_file() {
                return Err(Failure::input("NO_INPUT", format!("{}: no {} found", dir.display(), report::REPORT_FILE)));
            }
            let ok = report::verify_report_dir(&dir)?;
            writeln!(stdout, "ok: {} files, {} audit entries verified", ok.files_checked, ok.audit_entries).map_err(out_err)
        }
        Command::Serve { port, host, dir, ui, timeout } => {
            std::fs::create_dir_all(&dir).map_err(|e| io_failure(&dir, e))?;
            let cfg = crate::server::ServeConfig {
                addr: std::net::SocketAddr::new(host, port),
                dir,
                ui,
                timeout: std::time::Duration::from_secs(timeout),
            };
            let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::input("IO", e.to_string()))?;
            let _ = writeln!(stderr, "listening on http://{}", cfg.addr);
            rt.block_on(crate::server::serve(cfg)).map_err(|e| Failure::input("IO", e.to_string()))
        }
    }
}

fn write_metrology_text(w: &mut (dyn Write + Send), r: &crate::metrology::MetrologyReport) -> std::io::Result<()> {
    for (axis, vp) in &r.vanishing_points {
        match vp.finite_point() {
            Some([x, y]) => writeln!(w, "VP {axis:<10}: ({x:.2}, {y:.2}) px, rms {:.3} px, {} segments", vp.rms_residual, vp.support)?,
            None => writeln!(w, "VP {axis:<10}: at infinity, direction ({:.5}, {:.5}), {} segments", vp.point[0], vp.point[1], vp.support)?,
        }
    }
    if let Some(h) = r.horizon {
        writeln!(w, "Horizon      : {:.6} x + {:.6} y + {:.3} = 0", h[0], h[1], h[2])?;
    }
    if let Some(t) = &r.tilt {
        writeln!(w, "Tilt         : L/R {:.4}, T/B {:.4}, {:?}", t.lr_ratio, t.tb_ratio, t.verdict)?;
    }
    for (name, d) in &r.distortion {
        writeln!(w, "Chain {name:<7}: sagitta {:.3} px ({:.5} of length), {:?}", d.max_sagitta_px, d.normalized_sagitta, d.sign)?;
    }
    for h in &r.heights {
        writeln!(w, "Height {:<6}: {:.1} cm (interval {:.1} to {:.1} cm)", h.target_id, h.height_cm, h.interval_cm.0, h.interval_cm.1)?;
    }
    for e in &r.errors {
        writeln!(w, "Error {}: {} ({})", e.stage, e.code, e.message)?;
    }
    writeln!(w, "Uncertainty  : {}", r.uncertainty_policy)
}
