use microvasc::geometry::{DomainBox, Point3};
use microvasc::network::{classify_arterial_venous, parse_dgf, write_dgf, BoundaryData, VascularNetwork};
use microvasc::flow::{solve_flow, FlowParameters};
use microvasc::rheology::RheologyParameters;
use microvasc::tissue_grid::{build_surface_coupling, SurfaceSampling, TissueGrid};
use proptest::prelude::*;

/// Random tree in the 200 µm cube: node i > 0 hangs off an earlier node.
/// The root and every leaf get Dirichlet pressures.
fn tree() -> impl Strategy<Value = VascularNetwork> {
    (3usize..14)
        .prop_flat_map(|n| {
            (
                prop::collection::vec((10e-6f64..190e-6, 10e-6f64..190e-6, 10e-6f64..190e-6), n),
                prop::collection::vec(0.0f64..1.0, n),
                prop::collection::vec(2.5e-6f64..8e-6, n),
                prop::collection::vec(2000.0f64..9000.0, n),
            )
        })
        .prop_map(|(pos, parent, radii, pressures)| {
            let mut net = VascularNetwork::new();
            for p in &pos {
                net.add_node(Point3::new(p.0, p.1, p.2), None);
            }
            for i in 1..pos.len() {
                let p = ((parent[i] * i as f64) as usize).min(i - 1);
                net.add_segment(p, i, radii[i]).unwrap();
            }
            for i in 0..pos.len() {
                if i == 0 || net.degree(i) == 1 {
                    net.set_boundary(i, Some(BoundaryData { pressure: pressures[i], po2: None }));
                }
            }
            net
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_sum_is_twice_segment_count(net in tree()) {
        let sum: usize = (0..net.node_count()).map(|n| net.degree(n)).sum();
        prop_assert_eq!(sum, 2 * net.segment_count());
        prop_assert!(net.check_adjacency());
    }

    #[test]
    fn terminals_have_degree_one(net in tree(), lo in 0.0f64..100e-6, hi in 100e-6f64..200e-6) {
        let region = DomainBox::cube(lo, hi).unwrap();
        for n in net.terminal_nodes(&region) {
            prop_assert_eq!(net.degree(n), 1);
        }
    }

    #[test]
    fn dgf_round_trip(net in tree()) {
        let back = parse_dgf(&write_dgf(&net, &[])).unwrap();
        prop_assert_eq!(back, net);
    }

    #[test]
    fn classification_assigns_two_levels(mut net in tree()) {
        let grid = TissueGrid::new(DomainBox::cube(0.0, 200e-6).unwrap(), [4, 4, 4]).unwrap();
        let sc = build_surface_coupling(&grid, &net, SurfaceSampling::default()).unwrap();
        let flow = solve_flow(&net, &grid, &sc, &RheologyParameters::default(), &FlowParameters::default(), 1e-12).unwrap();
        classify_arterial_venous(&mut net, Some(&flow)).unwrap();
        for n in net.boundary_nodes() {
            let po2 = n.boundary.unwrap().po2.unwrap();
            prop_assert!(po2 == 38.0 || po2 == 75.0);
        }
    }

    #[test]
    fn decoupled_pressures_obey_maximum_principle(net in tree()) {
        let grid = TissueGrid::new(DomainBox::cube(0.0, 200e-6).unwrap(), [4, 4, 4]).unwrap();
        let sc = build_surface_coupling(&grid, &net, SurfaceSampling::default()).unwrap();
        let params = FlowParameters { wall_conductivity: 0.0, ..Default::default() };
        let flow = solve_flow(&net, &grid, &sc, &RheologyParameters::default(), &params, 1e-13).unwrap();
        let bc: Vec<f64> = net.boundary_nodes().map(|n| n.boundary.unwrap().pressure).collect();
        let lo = bc.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = bc.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        for p in &flow.p_v {
            prop_assert!(*p >= lo - 1e-8 * hi && *p <= hi + 1e-8 * hi, "{} outside [{}, {}]", p, lo, hi);
        }
    }

    #[test]
    fn coupled_flow_balances(net in tree()) {
        let grid = TissueGrid::new(DomainBox::cube(0.0, 200e-6).unwrap(), [5, 5, 5]).unwrap();
        let sc = build_surface_coupling(&grid, &net, SurfaceSampling::default()).unwrap();
        let flow = solve_flow(&net, &grid, &sc, &RheologyParameters::default(), &FlowParameters::default(), 1e-13).unwrap();
        let (sum, abs) = flow.boundary_balance();
        prop_assert!(sum.abs() <= 1e-8 * abs, "imbalance {} of {}", sum, abs);
        let d = (flow.filtration_tissue_side - flow.filtration_vessel_side).abs();
        prop_assert!(d <= 1e-12 * flow.filtration_gross.max(f64::MIN_POSITIVE));
    }
}
