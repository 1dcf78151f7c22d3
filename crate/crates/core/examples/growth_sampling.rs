//! Draws from the growth samplers and bins them like the radius and length
//! histograms of a generated network.

use microvasc::growth::{
    bifurcation_probability, murray_branch_radii, sample_length_ratio, sample_small_radius, GrowthParameters,
};
use microvasc::statistics::{histogram, histogram_csv};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> microvasc::Result<()> {
    let params = GrowthParameters::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ratios: Vec<f64> = (0..10_000).map(|_| sample_length_ratio(&mut rng, &params)).collect();
    let bifurcating = ratios.iter().filter(|&&r| bifurcation_probability(r, &params) > params.p_th).count();
    let h = histogram(&ratios, 1.0)?;
    println!("length ratio: mean {:.3}, std {:.3}, bifurcating {:.1}%", h.mean, h.std, bifurcating as f64 / 100.0);

    let small: Vec<f64> = (0..10_000).map(|_| sample_small_radius(4e-6, &mut rng, &params).1 * 1e6).collect();
    let h = histogram(&small, 0.25)?;
    println!("capillary radius (µm): mean {:.3}, std {:.3}", h.mean, h.std);
    print!("{}", histogram_csv(&h)?);

    let (r1, r2) = murray_branch_radii(8e-6, &mut rng, &params);
    println!("branch radii of an 8 µm parent: {:.3} µm, {:.3} µm", r1 * 1e6, r2 * 1e6);
    Ok(())
}
