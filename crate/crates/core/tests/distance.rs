mod common;

use common::*;
use eld::eld::{axis_distances, embedding_for, AxisMeasures};
use eld::generators::{cycle, erdos_renyi, wheel, WeightDist};
use eld::io::{format_edge_list, parse_edge_list};
use eld::{
    distance_matrix, distance_matrix_sequential, eld_distance, AxisOrientation, EldParams, Graph,
    MemoryStore,
};
use rand::Rng;

#[test]
fn pseudometric_on_a_small_mixed_sample() {
    let mut rng = rng(101);
    let graphs: Vec<Graph> = (0..15)
        .map(|_| random_family_graph(5, 30, &mut rng))
        .collect();
    let params = EldParams::new(4, 1.0);
    let dm = distance_matrix(&graphs, &params, None).unwrap();
    let n = graphs.len();
    for i in 0..n {
        assert_eq!(dm.get(i, i), 0.0);
        for j in 0..n {
            assert_eq!(dm.get(i, j).to_bits(), dm.get(j, i).to_bits());
            assert!(dm.get(i, j) >= 0.0);
            for l in 0..n {
                assert!(dm.get(i, l) <= dm.get(i, j) + dm.get(j, l) + 1e-9);
            }
        }
    }
    // Direct evaluation agrees with the matrix.
    let d = eld_distance(&graphs[0], &graphs[1], &params).unwrap();
    assert_eq!(d.to_bits(), dm.get(0, 1).to_bits());
    assert_eq!(eld_distance(&graphs[2], &graphs[2], &params).unwrap(), 0.0);
}

#[test]
fn relabelled_graphs_are_at_distance_zero() {
    let mut rng = rng(7);
    let mut checked = 0;
    while checked < 10 {
        let g = random_family_graph(6, 50, &mut rng);
        let k = 4.min(g.n());
        // Inside a repeated eigenvalue the basis is arbitrary.
        if !has_simple_low_spectrum(&g, k, 1e-6) {
            continue;
        }
        checked += 1;
        let sigma = random_permutation(g.n(), &mut rng);
        let d = eld_distance(&g, &g.permute(&sigma).unwrap(), &EldParams::new(k, 1.0)).unwrap();
        assert!(d <= 1e-8, "{d} for {g}");
    }
    let g = erdos_renyi(40, 0.3, 9, WeightDist::Exponential { scale: 20.0 }).unwrap();
    let sigma = random_permutation(40, &mut rng);
    let d = eld_distance(&g, &g.permute(&sigma).unwrap(), &EldParams::new(4, 2.0)).unwrap();
    assert!(d <= 1e-8);
}

#[test]
fn stored_sign_orientation_depends_on_labelling() {
    // The Fiedler vector of a weighted path has an asymmetric value multiset,
    // so reversing the vertex order flips the stored sign of the measure.
    let g = Graph::new(4, [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 5.0)]).unwrap();
    let rev = g.permute(&[3, 2, 1, 0]).unwrap();
    let mut params = EldParams::new(2, 1.0);
    assert!(eld_distance(&g, &rev, &params).unwrap() <= 1e-10);
    params.orientation = AxisOrientation::Embedding;
    assert!(eld_distance(&g, &rev, &params).unwrap() > 1e-3);
}

#[test]
fn constant_axis_contributes_nothing_on_connected_graphs() {
    let mut rng = rng(17);
    for _ in 0..10 {
        let a = connected_weighted_er(rng.gen_range(5..40), 0.5, &mut rng);
        let b = random_family_graph(5, 40, &mut rng);
        if !b.is_connected() {
            continue;
        }
        let params = EldParams::new(3, 1.0);
        let ea = embedding_for(&a, &params, None).unwrap();
        let eb = embedding_for(&b, &params, None).unwrap();
        let ma = AxisMeasures::from_embedding(&ea, params.orientation).unwrap();
        let mb = AxisMeasures::from_embedding(&eb, params.orientation).unwrap();
        let terms = axis_distances(&ma, &mb, 1.0).unwrap();
        assert!(terms[0] <= 1e-10);
        assert!(eld_distance(&a, &b, &EldParams::new(1, 1.0)).unwrap() <= 1e-10);
    }
}

#[test]
fn serialization_round_trip_preserves_distance() {
    let mut rng = rng(23);
    for _ in 0..10 {
        let g = random_family_graph(5, 40, &mut rng);
        let back = parse_edge_list(&format_edge_list(&g)).unwrap();
        let k = 4.min(g.n());
        assert_eq!(
            eld_distance(&g, &back, &EldParams::new(k, 1.0)).unwrap(),
            0.0
        );
    }
}

#[test]
fn parallel_sequential_and_cached_matrices_agree_bitwise() {
    let graphs = vec![
        cycle(30).unwrap(),
        wheel(30).unwrap(),
        erdos_renyi(50, 0.2, 4, WeightDist::Exponential { scale: 3.0 }).unwrap(),
        cycle(30).unwrap(),
    ];
    let params = EldParams::new(5, 1.0);
    let a = distance_matrix(&graphs, &params, None).unwrap();
    let b = distance_matrix_sequential(&graphs, &params, None).unwrap();
    let store = MemoryStore::new();
    let c = distance_matrix(&graphs, &params, Some(&store)).unwrap();
    let d = distance_matrix(&graphs, &params, Some(&store)).unwrap();
    assert_eq!(store.len(), 3);
    for m in [&b, &c, &d] {
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(a.get(i, j).to_bits(), m.get(i, j).to_bits());
            }
        }
    }
    assert_eq!(a.get(0, 3), 0.0);
}

#[test]
fn sparse_path_gives_the_same_distances() {
    let g = erdos_renyi(300, 0.05, 2, WeightDist::Unit).unwrap();
    let h = erdos_renyi(250, 0.08, 3, WeightDist::Unit).unwrap();
    let mut params = EldParams::new(4, 1.0);
    let dense = eld_distance(&g, &h, &params).unwrap();
    params.solver.sparse_threshold = 10;
    let sparse = eld_distance(&g, &h, &params).unwrap();
    assert!((dense - sparse).abs() <= 1e-6, "{dense} vs {sparse}");
}
