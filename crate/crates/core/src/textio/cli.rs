//! The `nv` command line.
//!
//! Exit codes: 0 on success, 1 for domain errors (invalid patterns, points
//! not fixed, unreadable files), 2 for syntax and usage errors.

use std::fs;
use std::io::Write;

use clap::{Parser, Subcommand};

use crate::dynamics::{orbit, Period};
use crate::element::{random_element, Element};
use crate::error::Error;
use crate::geometry::Point;
use crate::germ::{germ_generator, germ_signature, rank_report, Direction};
use crate::textio::{parse_dimension, parse_element, parse_point, render_element, render_point};

#[derive(Parser, Debug)]
#[command(name = "nv", about = "Exact computation in the Brin-Thompson groups nV")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a file describes a valid element.
    Validate { file: String },
    /// Print `f ∘ g`: apply the element in <G> first, then the one in <F>.
    Compose {
        f: String,
        g: String,
        #[arg(long)]
        reduce: bool,
    },
    Invert { file: String },
    /// Image of a point, e.g. "[01(10), (1)]".
    Apply { file: String, point: String },
    /// Orbit of a point, one point per line, then `period=<k>` or `truncated`.
    Orbit {
        file: String,
        point: String,
        #[arg(long = "max")]
        max_steps: usize,
    },
    Fixes { file: String, point: String },
    /// Germ signature at a fixed point, as `i:±k` pairs.
    Germ { file: String, point: String },
    /// Generator of the germ group at a coordinate of the point.
    GermGen {
        point: String,
        #[arg(long = "dim")]
        index: usize,
        #[arg(long, allow_hyphen_values = true)]
        sign: i64,
    },
    /// Compare the germ ranks of mV and nV.
    RankReport {
        #[arg(long)]
        m: String,
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        json: bool,
    },
    /// A seeded random element.
    Random {
        #[arg(long)]
        dim: String,
        #[arg(long)]
        cells: usize,
        #[arg(long)]
        seed: u64,
    },
}

enum Failure {
    Domain(String),
    Syntax(String),
}

impl Failure {
    fn from_error(context: &str, e: Error) -> Self {
        let message = if context.is_empty() {
            e.to_string()
        } else {
            format!("{context}: {e}")
        };
        if e.is_syntax() {
            Failure::Syntax(message)
        } else {
            Failure::Domain(message)
        }
    }
}

fn load_element(path: &str) -> Result<Element, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Domain(format!("{path}: {e}")))?;
    parse_element(&text).map_err(|e| Failure::from_error(path, e))
}

fn load_point(text: &str) -> Result<Point, Failure> {
    parse_point(text).map_err(|e| Failure::from_error("point", e))
}

fn domain(e: Error) -> Failure {
    Failure::from_error("", e)
}

fn execute(command: Command, out: &mut String) -> Result<(), Failure> {
    use std::fmt::Write as _;
    match command {
        Command::Validate { file } => {
            let f = load_element(&file)?;
            writeln!(out, "valid: nv {}, {} cells", f.dim(), f.len()).unwrap();
        }
        Command::Compose { f, g, reduce } => {
            let (f, g) = (load_element(&f)?, load_element(&g)?);
            let mut h = f.compose(&g).map_err(domain)?;
            if reduce {
                h = h.reduce();
            }
            out.push_str(&render_element(&h));
        }
        Command::Invert { file } => {
            out.push_str(&render_element(&load_element(&file)?.invert()));
        }
        Command::Apply { file, point } => {
            let (f, x) = (load_element(&file)?, load_point(&point)?);
            writeln!(out, "{}", render_point(&f.apply(&x).map_err(domain)?)).unwrap();
        }
        Command::Orbit {
            file,
            point,
            max_steps,
        } => {
            let (f, x) = (load_element(&file)?, load_point(&point)?);
            let o = orbit(&f, &x, max_steps).map_err(domain)?;
            for p in &o.points {
                writeln!(out, "{}", render_point(p)).unwrap();
            }
            match o.period {
                Period::Exact(k) if o.preperiod == 0 => writeln!(out, "period={k}").unwrap(),
                Period::Exact(k) => writeln!(out, "preperiod={} period={k}", o.preperiod).unwrap(),
                Period::Truncated(_) => writeln!(out, "truncated").unwrap(),
            }
        }
        Command::Fixes { file, point } => {
            let (f, x) = (load_element(&file)?, load_point(&point)?);
            let fixed = crate::germ::fixes(&f, &x).map_err(domain)?;
            writeln!(out, "{fixed}").unwrap();
        }
        Command::Germ { file, point } => {
            let (f, x) = (load_element(&file)?, load_point(&point)?);
            writeln!(out, "{}", germ_signature(&f, &x).map_err(domain)?).unwrap();
        }
        Command::GermGen { point, index, sign } => {
            let x = load_point(&point)?;
            let direction = Direction::from_sign(sign)
                .ok_or_else(|| Failure::Syntax(format!("--sign must be +1 or -1, got {sign}")))?;
            out.push_str(&render_element(&germ_generator(&x, index, direction).map_err(domain)?));
        }
        Command::RankReport { m, n, k, json } => {
            let m = parse_dimension(&m).map_err(|e| Failure::from_error("--m", e))?;
            let n = parse_dimension(&n).map_err(|e| Failure::from_error("--n", e))?;
            if k == 0 {
                return Err(Failure::Syntax("--k must be positive".into()));
            }
            let report = rank_report(m, n, k).map_err(domain)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable")).unwrap();
            } else {
                write!(out, "{report}").unwrap();
            }
        }
        Command::Random { dim, cells, seed } => {
            let dim = parse_dimension(&dim).map_err(|e| Failure::from_error("--dim", e))?;
            if cells == 0 {
                return Err(Failure::Syntax("--cells must be positive".into()));
            }
            out.push_str(&render_element(&random_element(dim, cells, seed)));
        }
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = stdout.write_all(text.as_bytes());
            } else {
                let _ = stderr.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let mut out = String::new();
    match execute(cli.command, &mut out) {
        Ok(()) => {
            let _ = stdout.write_all(out.as_bytes());
            0
        }
        Err(Failure::Domain(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            1
        }
        Err(Failure::Syntax(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            2
        }
    }
}
