//! Tissue oxygenation for increasing maximal consumption rates.

use microvasc::growth::{desk_starter, StarterSpec};
use microvasc::model::{solve_coupled, ModelParameters};
use microvasc::oxygen::michaelis_menten;
use microvasc::tissue_grid::TissueGrid;

fn main() -> microvasc::Result<()> {
    let spec = StarterSpec { segments_per_vessel: 12, ..Default::default() };
    let grid = TissueGrid::new(spec.domain()?, [16, 16, 16])?;
    let roi = spec.roi()?;
    for m0 in [0.0, 1.0, 3.0, 4.0] {
        let mut params = ModelParameters::default();
        params.oxygen.max_consumption = m0;
        let mut net = desk_starter(&spec)?;
        let sol = solve_coupled(&mut net, &grid, &params, None)?;
        let po2 = grid.region_average(&sol.oxygen.po2_t, &roi);
        let lo = sol.oxygen.po2_t.iter().cloned().fold(f64::INFINITY, f64::min);
        let rate = michaelis_menten(po2, &params.oxygen)?;
        println!(
            "m0 {m0:3.1}: PO2_roi {po2:8.4} mmHg  min {lo:8.4}  consumption at mean {rate:.4} mmHg/s  ({} iterations)",
            sol.oxygen.iterations
        );
    }
    Ok(())
}
