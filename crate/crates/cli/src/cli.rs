use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use streetweave::pipeline::prepare;
use streetweave::render::Viewport;
use streetweave::Error;

use crate::config::Config;
use crate::geocoder::Geocoder;
use crate::{render_document, OutputFormat, RenderSettings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_SPEC: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "streetweave", version, about = "Render street network visualization specs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render a spec to a plan (JSON) or SVG.
    Render {
        #[arg(long)]
        spec: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = OutputFormat::Plan)]
        format: OutputFormat,
        /// Current map zoom, used for layer visibility.
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=22))]
        zoom: Option<u8>,
        #[arg(long, default_value_t = 800.0)]
        width: f64,
        #[arg(long, default_value_t = 800.0)]
        height: f64,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=22))]
        nominal_zoom: Option<u8>,
        #[arg(long)]
        geocoder_url: Option<String>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Check a spec and print diagnostics.
    Validate {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Run the HTTP service.
    Serve {
        #[arg(long)]
        port: Option<u16>,
        /// Directory of UI files served at `/`.
        #[arg(long)]
        static_dir: Option<PathBuf>,
        /// Directory that data paths in posted specs resolve against.
        #[arg(long)]
        data_dir: Option<PathBuf>,
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        #[arg(long)]
        geocoder_url: Option<String>,
        #[arg(long, value_parser = clap::value_parser!(u8).range(0..=22))]
        nominal_zoom: Option<u8>,
    },
}

fn print_diagnostics(err: &mut impl Write, diags: &[streetweave::Diagnostic]) {
    for d in diags {
        let _ = writeln!(err, "{}", d.to_json_line());
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Spec(_) => EXIT_SPEC,
        _ => EXIT_IO,
    }
}

fn read_spec(path: &Path, err: &mut impl Write) -> Option<String> {
    match std::fs::read_to_string(path) {
        Ok(t) => Some(t),
        Err(e) => {
            let _ = writeln!(err, "{}", Error::Io { path: path.to_path_buf(), source: e });
            None
        }
    }
}

fn runtime() -> tokio::runtime::Runtime {
    tokio::runtime::Builder::new_multi_thread().enable_all().build().expect("tokio runtime")
}

/// Run the command line; returns the process exit code.
pub fn run(args: impl IntoIterator<Item = impl Into<OsString> + Clone>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_SPEC } else { EXIT_OK };
        }
    };
    let mut config = match Config::from_env() {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return EXIT_IO;
        }
    };
    let stdout = &mut std::io::stdout();
    let stderr = &mut std::io::stderr();
    match cli.command {
        Command::Validate { spec } => {
            let Some(text) = read_spec(&spec, stderr) else { return EXIT_IO };
            match prepare(&text) {
                Ok(p) => {
                    print_diagnostics(stderr, &p.warnings);
                    let _ = writeln!(stdout, "OK");
                    EXIT_OK
                }
                Err(e) => {
                    print_diagnostics(stderr, &e.diagnostics());
                    exit_code(&e)
                }
            }
        }
        Command::Render { spec, out, format, zoom, width, height, nominal_zoom, geocoder_url, cache_dir } => {
            let Some(text) = read_spec(&spec, stderr) else { return EXIT_IO };
            if let Some(z) = nominal_zoom {
                config.nominal_zoom = z;
            }
            if geocoder_url.is_some() {
                config.geocoder_url = geocoder_url;
            }
            if let Some(d) = cache_dir {
                config.cache_dir = d;
            }
            let settings = RenderSettings {
                format,
                zoom: zoom.unwrap_or(config.nominal_zoom),
                nominal_zoom: config.nominal_zoom,
                viewport: Viewport { width, height },
                base_dir: spec.parent().map(Path::to_path_buf).unwrap_or_default(),
                overrides: Default::default(),
            };
            let geocoder = Geocoder::new(config.geocoder_url.clone(), config.cache_dir.clone());
            let result = runtime().block_on(render_document(&text, &settings, &geocoder));
            match result {
                Ok(body) => {
                    if let Ok(p) = prepare(&text) {
                        print_diagnostics(stderr, &p.warnings);
                    }
                    let written = match &out {
                        Some(path) => std::fs::write(path, &body).map_err(|e| Error::Io { path: path.clone(), source: e }),
                        None => stdout.write_all(body.as_bytes()).map_err(|e| Error::Io { path: "<stdout>".into(), source: e }),
                    };
                    match written {
                        Ok(()) => EXIT_OK,
                        Err(e) => {
                            let _ = writeln!(stderr, "{e}");
                            EXIT_IO
                        }
                    }
                }
                Err(e) => {
                    print_diagnostics(stderr, &e.diagnostics());
                    exit_code(&e)
                }
            }
        }
        Command::Serve { port, static_dir, data_dir, cache_dir, geocoder_url, nominal_zoom } => {
            if let Some(p) = port {
                config.port = p;
            }
            config.static_dir = static_dir;
            if let Some(d) = data_dir {
                config.data_dir = d;
            }
            if let Some(d) = cache_dir {
                config.cache_dir = d;
            }
            if geocoder_url.is_some() {
                config.geocoder_url = geocoder_url;
            }
            if let Some(z) = nominal_zoom {
                config.nominal_zoom = z;
            }
            match runtime().block_on(crate::service::serve(config)) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("serve: {e}");
                    EXIT_IO
                }
            }
        }
    }
}
