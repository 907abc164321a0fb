use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use diffk::report::describe;
use diffk::{run, Command, RunConfig};

/// Differential K-character evaluations, certificates and the acceptance suite.
#[derive(Parser, Debug)]
#[command(name = "diffk", version)]
struct Cli {
    /// Command to run; may come from the config file instead.
    #[arg(value_enum)]
    command: Option<Command>,
    /// TOML run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Catalog geometry, e.g. `disk2_flat(0.25)` or `hopf`.
    #[arg(long)]
    catalog: Option<String>,
    /// Geometry config file.
    #[arg(long)]
    geometry: Option<PathBuf>,
    /// Two connection names of the geometry, for `cs-check`.
    #[arg(long, num_args = 2, value_names = ["FROM", "TO"])]
    connections: Option<Vec<String>>,
    /// Nodes per axis; defaults to $DIFFK_RESOLUTION, then per dimension.
    #[arg(long)]
    resolution: Option<usize>,
    /// Tolerance override, `key=value`; repeatable.
    #[arg(long = "tol", value_name = "KEY=VALUE")]
    tolerances: Vec<String>,
    /// Directory for `<command>.jsonl` and `<command>.summary.txt`.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Holonomy parameters; repeatable or comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    a: Vec<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    k: Option<i64>,
    #[arg(long)]
    lmax: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    /// Suite criteria to run; all by default.
    #[arg(long, value_delimiter = ',')]
    only: Vec<usize>,
    /// Run every suite criterion (the default).
    #[arg(long)]
    all: bool,
    /// Add the APS comparison to `eta`.
    #[arg(long)]
    aps: bool,
}

impl Cli {
    fn into_config(self) -> Result<RunConfig, diffk::Error> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        c.command = self.command.or(c.command);
        c.catalog = self.catalog.or(c.catalog);
        c.geometry = self.geometry.or(c.geometry);
        if let Some(v) = self.connections {
            c.connections = Some([v[0].clone(), v[1].clone()]);
        }
        c.resolution = self.resolution.or(c.resolution);
        for t in &self.tolerances {
            let (key, value) = t.split_once('=').ok_or_else(|| field("tol", format!("expected key=value, got `{t}`")))?;
            let value = value.trim().parse().map_err(|_| field(&format!("tolerances.{key}"), format!("not a number: `{value}`")))?;
            c.tolerances.insert(key.trim().to_string(), value);
        }
        c.output = self.output.or(c.output);
        c.seed = self.seed.unwrap_or(c.seed);
        if !self.a.is_empty() {
            c.a = self.a;
        }
        c.n = self.n.or(c.n);
        c.k = self.k.or(c.k);
        c.lmax = self.lmax.or(c.lmax);
        c.steps = self.steps.or(c.steps);
        if self.all {
            c.only.clear();
        } else if !self.only.is_empty() {
            c.only = self.only;
        }
        c.aps |= self.aps;
        Ok(c)
    }
}

fn field(path: &str, message: String) -> diffk::Error {
    diffk::Error::Field { path: path.into(), message }
}

fn main() -> ExitCode {
    let result = Cli::parse().into_config().and_then(|c| run(&c));
    let report = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    for r in report.records() {
        println!("{} {} {}", if r.pass { "ok  " } else { "FAIL" }, r.key, describe(r));
    }
    for t in report.timings() {
        println!("{} {} {}", if t.pass { "ok  " } else { "FAIL" }, t.key, describe(t));
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        eprintln!("failing checks: {}", report.failures().join(", "));
        ExitCode::from(1)
    }
}
