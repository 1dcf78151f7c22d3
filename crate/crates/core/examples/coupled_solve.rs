//! Flow and oxygen on the synthetic four-vessel network, with tissue
//! averages and VTK output of both compartments.

use microvasc::growth::{desk_starter, StarterSpec};
use microvasc::model::{solve_coupled, ModelParameters};
use microvasc::statistics::tissue_averages;
use microvasc::tissue_grid::TissueGrid;
use microvasc::vtk::{grid_vtk, network_vtk, ScalarField};

fn main() -> microvasc::Result<()> {
    let spec = StarterSpec { segments_per_vessel: 12, ..Default::default() };
    let mut net = desk_starter(&spec)?;
    let grid = TissueGrid::new(spec.domain()?, [20, 20, 20])?;
    let params = ModelParameters::default();
    let sol = solve_coupled(&mut net, &grid, &params, None)?;

    let (sum, abs) = sol.flow.boundary_balance();
    println!("flow: {} PCG iterations, boundary imbalance {:.2e} of {:.2e} m^3/s", sol.flow.iterations, sum, abs);
    println!("oxygen: {} fixed-point iterations, last update {:.2e}", sol.oxygen.iterations, sol.oxygen.last_update);
    let avg = tissue_averages(&grid, &sol.flow, &sol.oxygen, &spec.roi()?);
    println!("PO2_roi {:.4} mmHg  p_t_roi {:.4} mmHg  F_tv {:.4e} ug/s", avg.po2_roi, avg.p_t_roi, avg.f_tv);

    let dir = std::env::temp_dir().join("microvasc_coupled");
    std::fs::create_dir_all(&dir)?;
    let nodes = [
        ScalarField { name: "pressure", values: &sol.flow.p_v },
        ScalarField { name: "po2", values: &sol.oxygen.po2_v },
    ];
    std::fs::write(dir.join("network.vtk"), network_vtk(&net, &nodes, "coupled solve")?)?;
    let cells = [
        ScalarField { name: "pressure", values: &sol.flow.p_t },
        ScalarField { name: "po2", values: &sol.oxygen.po2_t },
    ];
    let vel = [("velocity", sol.flow.u_t.as_slice())];
    std::fs::write(dir.join("tissue.vtk"), grid_vtk(&grid, &cells, &vel, "coupled solve")?)?;
    println!("wrote {}", dir.display());
    Ok(())
}
