//! Grows a network from the synthetic four-vessel starter and prints the
//! phase history and final tissue statistics.
//!
//!     cargo run --release --example grow_network -- [seed] [cells]

use microvasc::growth::{desk_starter, generate, GrowthParameters, GrowthSetup, StarterSpec};
use microvasc::model::ModelParameters;

fn main() -> microvasc::Result<()> {
    env_logger::init();
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let cells: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(16);

    let spec = StarterSpec::default();
    let net = desk_starter(&spec)?;
    let setup = GrowthSetup {
        domain: spec.domain()?,
        roi: spec.roi()?,
        cells: [cells; 3],
        model: ModelParameters::default(),
        growth: GrowthParameters::default(),
        seed,
    };
    let t = std::time::Instant::now();
    let out = generate(setup, net)?;
    for s in &out.report.steps {
        println!(
            "phase {} it {:2}  po2 {:>7}  grown {:3}  links {:3}  removed {:3}  terminals {:4}  segments {:5}",
            s.phase,
            s.iteration,
            s.po2_roi.map_or("-".into(), |p| format!("{p:.3}")), s.grown, s.links, s.removed, s.terminals, s.segments
        );
    }
    println!("iterations  {:?}", out.report.phase_iterations);
    println!("po2_roi     {:.3} mmHg", out.po2_roi);
    println!("p_t roi     {:.3} mmHg", out.pressure_roi);
    println!("F_tv        {:.4e} ug/s", out.exchange_rate);
    println!("segments    {} (clipped), {} (full)", out.network.segment_count(), out.full_network.segment_count());
    println!("elapsed     {:.2?}", t.elapsed());
    Ok(())
}
