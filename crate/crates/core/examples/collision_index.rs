//! Octant-indexed collision checks against a random network, compared with
//! the pairwise scan.

use microvasc::geometry::{DomainBox, Point3};
use microvasc::growth::{collides_brute_force, Candidate, Endpoint, OctantIndex};
use microvasc::network::VascularNetwork;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> microvasc::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let domain = DomainBox::cube(0.0, 1e-3)?;
    let point = |rng: &mut ChaCha8Rng| Point3::from_fn(|_, _| rng.random_range(0.0..1e-3));
    let mut net = VascularNetwork::new();
    for _ in 0..500 {
        let a = point(&mut rng);
        let b = a + Point3::from_fn(|_, _| rng.random_range(-6e-5..6e-5));
        let na = net.add_node(a, None);
        let nb = net.add_node(b, None);
        net.add_segment(na, nb, rng.random_range(2e-6..6e-6))?;
    }
    let index = OctantIndex::build(&net, &domain);
    println!("octant sizes {:?}", index.octant_sizes());

    let (mut hits, mut agree) = (0, 0);
    let t = std::time::Instant::now();
    for _ in 0..1000 {
        let from = rng.random_range(0..net.node_count());
        let to = net.position(from) + Point3::from_fn(|_, _| rng.random_range(-8e-5..8e-5));
        let cand = Candidate { from, to: Endpoint::Point(to), radius: rng.random_range(2e-6..5e-6) };
        let fast = index.collides(&net, &cand);
        hits += fast as usize;
        agree += (fast == collides_brute_force(&net, &cand)) as usize;
    }
    println!("{hits} of 1000 candidates collide; octant and pairwise agree on {agree}; {:.2?}", t.elapsed());
    Ok(())
}
