use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use microvasc::config::RunConfig;
use microvasc::runner;

#[derive(Parser)]
#[command(version, about = "Coupled blood flow and oxygen transport with microvascular network growth")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flow and oxygen on a fixed network.
    Solve(RunArgs),
    /// Grow a network through the three phases.
    Generate {
        #[command(flatten)]
        run: RunArgs,
        /// Run every gamma × m0 combination of the sweep table.
        #[arg(long)]
        sweep: bool,
    },
    /// Repeated seeded growth runs and running means.
    Stats {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, short = 'n')]
        repetitions: Option<usize>,
    },
    /// Convert a DGF network to legacy VTK.
    ExportVtk { input: PathBuf, output: PathBuf },
    /// Length, area, volume and segment count of a DGF network.
    Characteristics {
        input: PathBuf,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print the full default configuration.
    Config,
}

#[derive(Args)]
struct RunArgs {
    /// TOML configuration; missing keys take their defaults.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long, short)]
    input: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, num_args = 3, value_names = ["NX", "NY", "NZ"])]
    cells: Option<Vec<usize>>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Maximal oxygen consumption, mmHg/s.
    #[arg(long)]
    m0: Option<f64>,
}

impl RunArgs {
    fn resolve(self) -> microvasc::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(i) = self.input {
            cfg.input = Some(i);
        }
        if let Some(o) = self.output {
            cfg.output = o;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(c) = self.cells {
            cfg.cells = [c[0], c[1], c[2]];
        }
        if let Some(g) = self.gamma {
            cfg.growth.gamma = g;
        }
        if let Some(m) = self.m0 {
            cfg.model.oxygen.max_consumption = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> microvasc::Result<()> {
    match cli.command {
        Command::Solve(args) => {
            let s = runner::cmd_solve(&args.resolve()?)?;
            println!("PO2_roi  {:.6} mmHg", s.tissue.po2_roi);
            println!("p_t_roi  {:.6} mmHg", s.tissue.p_t_roi);
            println!("F_tv     {:.6e} ug/s", s.tissue.f_tv);
        }
        Command::Generate { run, sweep } => {
            for s in runner::cmd_generate(&run.resolve()?, sweep)? {
                let st = s.statistics;
                println!(
                    "{}: N_seg {} L {:.4e} m PO2_roi {:.4} mmHg p_t_roi {:.4} mmHg F_tv {:.4e} ug/s N_it {}",
                    s.label, st.segments, st.length, st.po2_roi, st.p_t_roi, st.f_tv, st.iterations
                );
            }
        }
        Command::Stats { run, repetitions } => {
            let cfg = run.resolve()?;
            let n = repetitions.unwrap_or(cfg.repetitions);
            let out = runner::cmd_stats(&cfg, n)?;
            let last = out.means.rows.last().expect("at least one row");
            println!("{} runs ({} resumed)", out.runs.len(), out.resumed);
            for (name, v) in microvasc::statistics::QUANTITY_NAMES.iter().zip(last) {
                println!("{name:8} {v:.6e}");
            }
        }
        Command::ExportVtk { input, output } => runner::cmd_export_vtk(&input, &output)?,
        Command::Characteristics { input, csv } => {
            let c = runner::cmd_characteristics(&input, csv.as_deref())?;
            println!("L      {:.6e} m", c.length);
            println!("A      {:.6e} m^2", c.area);
            println!("V      {:.6e} m^3", c.volume);
            println!("N_seg  {}", c.segments);
        }
        Command::Config => print!("{}", RunConfig::default().to_toml()?),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let report = serde_json::json!({ "status": "error", "kind": e.kind(), "message": e.to_string() });
            eprintln!("{report}");
            ExitCode::FAILURE
        }
    }
}
