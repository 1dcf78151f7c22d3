//! End-to-end commands: coupled solve, network generation, repeated runs,
//! VTK export and network characteristics. Each writes its artifacts into
//! the configured output directory and returns a summary.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Provenance, RunConfig};
use crate::error::{Error, Result};
use crate::growth::{desk_starter, GrowthOutcome, GrowthRun, GrowthSetup, StepRecord};
use crate::model::{solve_coupled, CoupledSolution};
use crate::network::{read_dgf, write_dgf, VascularNetwork};
use crate::statistics::{
    characteristics_csv, network_characteristics, running_means, running_means_csv, statistics_csv, table_csv,
    tissue_averages, trace_csv, NetworkCharacteristics, RunStatistics, RunningMeans, TissueAverages,
};
use crate::tissue_grid::TissueGrid;
use crate::vtk::{grid_vtk, network_vtk, ScalarField};

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn load_network(cfg: &RunConfig) -> Result<VascularNetwork> {
    match &cfg.input {
        Some(p) => read_dgf(p),
        None => desk_starter(&cfg.starter),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveSummary {
    pub provenance: Provenance,
    pub tissue: TissueAverages,
    pub flow_iterations: usize,
    pub oxygen_iterations: usize,
    pub clamped_samples: usize,
    pub config: RunConfig,
}

/// Classification, flow and oxygen on the input network.
pub fn cmd_solve(cfg: &RunConfig) -> Result<SolveSummary> {
    cfg.validate()?;
    let prov = cfg.provenance()?;
    let mut net = load_network(cfg)?;
    let (roi, domain) = cfg.regions(&net)?;
    let grid = TissueGrid::new(domain, cfg.cells)?;
    let sol = solve_coupled(&mut net, &grid, &cfg.model, None)?;
    let tissue = tissue_averages(&grid, &sol.flow, &sol.oxygen, &roi);
    write_fields(cfg, &prov, &cfg.output, &net, &grid, &sol)?;
    let summary = SolveSummary {
        provenance: prov,
        tissue,
        flow_iterations: sol.flow.iterations,
        oxygen_iterations: sol.oxygen.iterations,
        clamped_samples: sol.coupling.clamped_samples,
        config: cfg.clone(),
    };
    write(&cfg.output.join("summary.json"), &serde_json::to_string_pretty(&summary)?)?;
    Ok(summary)
}

fn write_fields(
    cfg: &RunConfig,
    prov: &Provenance,
    dir: &Path,
    net: &VascularNetwork,
    grid: &TissueGrid,
    sol: &CoupledSolution,
) -> Result<()> {
    if cfg.export.vtk {
        let nodes = [
            ScalarField { name: "pressure", values: &sol.flow.p_v },
            ScalarField { name: "po2", values: &sol.oxygen.po2_v },
        ];
        write(&dir.join("network.vtk"), &network_vtk(net, &nodes, &prov.line())?)?;
        let cells = [
            ScalarField { name: "pressure", values: &sol.flow.p_t },
            ScalarField { name: "po2", values: &sol.oxygen.po2_t },
        ];
        let vel = [("velocity", sol.flow.u_t.as_slice())];
        write(&dir.join("tissue.vtk"), &grid_vtk(grid, &cells, &vel, &prov.line())?)?;
    }
    if cfg.export.csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["node", "x", "y", "z", "pressure", "po2"]).map_err(std::io::Error::other)?;
        for n in net.nodes() {
            let p = n.position;
            w.write_record([
                n.id.to_string(),
                format!("{:e}", p[0]),
                format!("{:e}", p[1]),
                format!("{:e}", p[2]),
                format!("{:e}", sol.flow.p_v[n.id]),
                format!("{:e}", sol.oxygen.po2_v[n.id]),
            ])
            .map_err(std::io::Error::other)?;
        }
        let body = String::from_utf8(w.into_inner().map_err(|e| Error::Io(e.into_error()))?).expect("utf-8");
        write(&dir.join("nodes.csv"), &(prov.csv_comment() + &body))?;
    }
    Ok(())
}

/// JSON companion of a DGF file: the full network including vascular PO2
/// boundary values, which DGF cannot carry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkSidecar {
    pub provenance: Provenance,
    pub network: crate::network::NetworkSnapshot,
    pub step: Option<StepRecord>,
    pub po2_trace: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerateSummary {
    pub label: String,
    pub seed: u64,
    pub statistics: RunStatistics,
    pub phase_iterations: [usize; 3],
    pub provenance: Provenance,
}

/// One growth run with the configuration's parameters and `seed`, writing
/// into `dir`.
pub fn generate_into(cfg: &RunConfig, seed: u64, dir: &Path) -> Result<(GenerateSummary, GrowthOutcome)> {
    let prov = cfg.provenance()?.with_seed(seed);
    let net = load_network(cfg)?;
    let (roi, domain) = cfg.regions(&net)?;
    let setup = GrowthSetup {
        domain,
        roi,
        cells: cfg.cells,
        model: cfg.model,
        growth: cfg.growth,
        seed,
    };
    let checkpoints = cfg.export.checkpoints;
    let mut trace: Vec<f64> = Vec::new();
    let ckpt_dir = dir.join("checkpoints");
    let ckpt_prov = prov.clone();
    let observer = Box::new(move |step: &StepRecord, net: &VascularNetwork| -> Result<()> {
        if let Some(p) = step.po2_roi {
            trace.push(p);
        }
        if checkpoints {
            let stem = ckpt_dir.join(format!("phase{}_{:03}", step.phase, step.iteration));
            write(&stem.with_extension("dgf"), &write_dgf(net, &[ckpt_prov.line()]))?;
            let side = NetworkSidecar {
                provenance: ckpt_prov.clone(),
                network: net.snapshot(),
                step: Some(step.clone()),
                po2_trace: trace.clone(),
            };
            write(&stem.with_extension("json"), &serde_json::to_string(&side)?)?;
        }
        Ok(())
    });
    let mut run = GrowthRun::new(setup, net)?.with_observer(observer);
    for &phase in &cfg.phases {
        match phase {
            1 => run.run_phase1()?,
            2 => run.run_phase2()?,
            _ => run.run_phase3()?,
        }
    }
    let out = run.finish()?;
    let tissue = TissueAverages { po2_roi: out.po2_roi, p_t_roi: out.pressure_roi, f_tv: out.exchange_rate };
    let stats = RunStatistics::new(&out.network, tissue, out.report.total_iterations());
    let summary = GenerateSummary {
        label: format!("seed{seed}"),
        seed,
        statistics: stats,
        phase_iterations: out.report.phase_iterations,
        provenance: prov.clone(),
    };

    if cfg.export.dgf {
        write(&dir.join("network.dgf"), &write_dgf(&out.network, &[prov.line()]))?;
        let side = NetworkSidecar {
            provenance: prov.clone(),
            network: out.network.snapshot(),
            step: None,
            po2_trace: out.report.steps.iter().filter_map(|s| s.po2_roi).collect(),
        };
        write(&dir.join("network.json"), &serde_json::to_string(&side)?)?;
    }
    if cfg.export.vtk {
        write(&dir.join("network.vtk"), &network_vtk(&out.network, &[], &prov.line())?)?;
        let cells = [
            ScalarField { name: "pressure", values: &out.solution.flow.p_t },
            ScalarField { name: "po2", values: &out.solution.oxygen.po2_t },
        ];
        write(&dir.join("tissue.vtk"), &grid_vtk(&out.grid, &cells, &[], &prov.line())?)?;
    }
    if cfg.export.csv {
        write(&dir.join("trace.csv"), &(prov.csv_comment() + &trace_csv(&out.report.steps)?))?;
        let row = [(summary.label.clone(), stats)];
        write(&dir.join("statistics.csv"), &(prov.csv_comment() + &statistics_csv(&row)?))?;
    }
    write(&dir.join("summary.json"), &serde_json::to_string_pretty(&summary)?)?;
    Ok((summary, out))
}

/// Growth with the master seed, or over the γ × m0 grid when `sweep` is set.
pub fn cmd_generate(cfg: &RunConfig, sweep: bool) -> Result<Vec<GenerateSummary>> {
    cfg.validate()?;
    if !sweep {
        return Ok(vec![generate_into(cfg, cfg.seed, &cfg.output)?.0]);
    }
    let mut rows = Vec::new();
    for &gamma in &cfg.sweep.gamma {
        for &m0 in &cfg.sweep.max_consumption {
            let mut c = cfg.clone();
            c.growth.gamma = gamma;
            c.model.oxygen.max_consumption = m0;
            let label = format!("gamma={gamma} m0={m0}");
            let dir = cfg.output.join(format!("gamma{gamma}_m0{m0}"));
            let (mut s, _) = generate_into(&c, cfg.seed, &dir)?;
            s.label = label;
            rows.push(s);
        }
    }
    let prov = cfg.provenance()?;
    let cols: Vec<_> = rows.iter().map(|r| (r.label.clone(), r.statistics)).collect();
    write(&cfg.output.join("table.csv"), &(prov.csv_comment() + &table_csv(&cols)?))?;
    write(&cfg.output.join("statistics.csv"), &(prov.csv_comment() + &statistics_csv(&cols)?))?;
    Ok(rows)
}

fn repetition_dir(cfg: &RunConfig, n: usize) -> PathBuf {
    cfg.output.join(format!("rep{n:03}"))
}

/// Summary of a finished repetition with matching provenance, if present.
fn finished_repetition(dir: &Path, prov: &Provenance) -> Option<GenerateSummary> {
    let text = std::fs::read_to_string(dir.join("summary.json")).ok()?;
    let s: GenerateSummary = serde_json::from_str(&text).ok()?;
    (s.provenance == *prov).then_some(s)
}

#[derive(Debug, Clone)]
pub struct StatsOutcome {
    pub runs: Vec<GenerateSummary>,
    pub means: RunningMeans,
    /// Repetitions taken from an earlier, interrupted invocation.
    pub resumed: usize,
}

/// `repetitions` seeded runs (seed + n) in parallel, then prefix means.
/// Repetitions already finished in the output directory are reused.
pub fn cmd_stats(cfg: &RunConfig, repetitions: usize) -> Result<StatsOutcome> {
    cfg.validate()?;
    if repetitions == 0 {
        return Err(Error::Config("repetitions must be at least 1".into()));
    }
    let base = cfg.provenance()?;
    let results: Vec<Result<(GenerateSummary, bool)>> = (0..repetitions)
        .into_par_iter()
        .map(|n| {
            let seed = cfg.seed + n as u64;
            let dir = repetition_dir(cfg, n);
            if let Some(s) = finished_repetition(&dir, &base.with_seed(seed)) {
                return Ok((s, true));
            }
            generate_into(cfg, seed, &dir).map(|(s, _)| (s, false))
        })
        .collect();
    let mut runs = Vec::with_capacity(repetitions);
    let mut resumed = 0;
    for r in results {
        let (s, old) = r?;
        resumed += old as usize;
        runs.push(s);
    }
    let stats: Vec<_> = runs.iter().map(|r| r.statistics).collect();
    let means = running_means(&stats)?;
    let rows: Vec<_> = runs.iter().map(|r| (r.label.clone(), r.statistics)).collect();
    write(&cfg.output.join("runs.csv"), &(base.csv_comment() + &statistics_csv(&rows)?))?;
    write(&cfg.output.join("running_means.csv"), &(base.csv_comment() + &running_means_csv(&means)?))?;
    Ok(StatsOutcome { runs, means, resumed })
}

/// Network in `input` (DGF) as a VTK poly-line file.
pub fn cmd_export_vtk(input: &Path, output: &Path) -> Result<()> {
    let net = read_dgf(input)?;
    let pressure: Vec<f64> = net.nodes().iter().map(|n| n.boundary.map_or(0.0, |b| b.pressure)).collect();
    let header = format!("microvasc {} network from {}", env!("CARGO_PKG_VERSION"), input.display());
    let text = network_vtk(&net, &[ScalarField { name: "boundary_pressure", values: &pressure }], &header)?;
    write(output, &text)
}

/// Total length, area, volume and segment count of a DGF network; writes a
/// CSV when `output` is given.
pub fn cmd_characteristics(input: &Path, output: Option<&Path>) -> Result<NetworkCharacteristics> {
    let net = read_dgf(input)?;
    let c = network_characteristics(&net);
    if let Some(out) = output {
        write(out, &characteristics_csv(&c)?)?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config(dir: &Path) -> RunConfig {
        let mut cfg = RunConfig { output: dir.to_path_buf(), cells: [6, 6, 6], ..Default::default() };
        cfg.starter.roi_edge = 0.3e-3;
        cfg.growth.max_iter_p1 = 2;
        cfg.growth.max_iter_p2 = 2;
        cfg.growth.max_iter_p3 = 2;
        cfg
    }

    #[test]
    fn missing_input_reported() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig { input: Some(dir.path().join("nope.dgf")), output: dir.path().into(), ..Default::default() };
        let err = cmd_solve(&cfg).unwrap_err();
        assert_eq!(err.kind(), "input_not_found");
        assert!(err.to_string().contains("input not found"));
    }

    #[test]
    fn solve_two_node_network() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("net.dgf");
        std::fs::write(&input, "DGF\nVertex\nparameters 1\n0 5e-5 5e-5 8000\n1e-4 5e-5 5e-5 4000\n#\nSIMPLEX\nparameters 1\n0 1 5e-6\n#\n").unwrap();
        let cfg = RunConfig {
            input: Some(input),
            output: dir.path().join("out"),
            cells: [6, 6, 6],
            roi: Some(crate::config::RegionConfig { lower: [0.0; 3], upper: [1e-4; 3] }),
            ..Default::default()
        };
        let s = cmd_solve(&cfg).unwrap();
        assert!(s.tissue.po2_roi >= 0.0);
        let json = std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap();
        assert!(json.contains("\"half_consumption_po2\": 1.0"));
        assert!(json.contains(&s.provenance.config_sha256));
        assert!(dir.path().join("out/tissue.vtk").exists());
        assert!(std::fs::read_to_string(dir.path().join("out/nodes.csv")).unwrap().starts_with("# microvasc"));
    }

    #[test]
    fn stats_resume() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = small_config(dir.path());
        cfg.export.checkpoints = false;
        let first = cmd_stats(&cfg, 2).unwrap();
        assert_eq!(first.resumed, 0);
        assert_eq!(first.means.rows.len(), 2);
        std::fs::remove_dir_all(dir.path().join("rep001")).unwrap();
        let second = cmd_stats(&cfg, 3).unwrap();
        assert_eq!(second.resumed, 1);
        assert_eq!(second.runs[1].statistics, first.runs[1].statistics);
        let csv = std::fs::read_to_string(dir.path().join("running_means.csv")).unwrap();
        assert_eq!(csv.lines().count(), 1 + 1 + 3);
    }
}
