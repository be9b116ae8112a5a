use crvr_core::crvr::flag_simplex_count;
use crvr_core::diagram::{classify_structure, extract_features};
use crvr_core::netgen::{
    generate_block_network, generate_noisy_block_network, strong_block_pair, BlockSpec, Structure,
};
use crvr_core::network::{parse_network, write_network, NetworkFormat};
use crvr_core::persistence::{betti_oracle, compute_persistence_exhaustive, Reduction};
use crvr_core::{
    build_flag_filtration, compute_persistence, crvr_distance, Bars, FlagFiltration, Network, Network32, Spec,
};
use proptest::prelude::*;

fn barcode(net: &Network, max_dim: usize) -> Bars {
    let d = crvr_distance(net, 0.1).unwrap();
    compute_persistence(&build_flag_filtration(&d, max_dim).unwrap()).unwrap()
}

#[test]
fn strict_weights_follow_the_block_layout() {
    for s in Structure::ALL {
        let net = generate_block_network(&Spec::strict(s, 9)).unwrap();
        let labels = net.planted_labels().unwrap();
        for i in 0..40 {
            for j in i + 1..40 {
                let w = net.weight(i, j);
                if strong_block_pair(s, labels[i], labels[j], 4) {
                    assert!((1.0..10.0).contains(&w), "{s} strong pair ({i}, {j}) = {w}");
                } else {
                    assert!((0.0..1.0).contains(&w), "{s} weak pair ({i}, {j}) = {w}");
                }
            }
        }
    }
}

#[test]
fn full_flag_filtration_size() {
    let net = generate_block_network(&Spec::strict(Structure::Ordered, 0)).unwrap();
    let f = build_flag_filtration(&crvr_distance(&net, 0.1).unwrap(), 3).unwrap();
    assert_eq!(f.len(), 40 + 780 + 9880 + 91390);
    assert_eq!(f.len() as u128, flag_simplex_count(40, 3));
}

#[test]
fn text_round_trips_keep_the_barcode() {
    let net = generate_block_network(&Spec::strict(Structure::CorePeriphery, 4)).unwrap();
    let back: Network = parse_network(&write_network(&net, NetworkFormat::EdgeList), NetworkFormat::EdgeList).unwrap();
    assert_eq!(back.weights(), net.weights());
    let dense: Network = parse_network(&write_network(&net, NetworkFormat::Dense), NetworkFormat::Dense).unwrap();
    assert_eq!(dense.weights(), net.weights());

    let small = generate_block_network(&BlockSpec::<f64> {
        group_size: 3,
        ..Spec::strict(Structure::Assortative, 1)
    })
    .unwrap();
    let f = build_flag_filtration(&crvr_distance(&small, 0.1).unwrap(), 3).unwrap();
    let parsed = FlagFiltration::parse(&f.to_text()).unwrap();
    assert_eq!(compute_persistence(&parsed).unwrap(), compute_persistence(&f).unwrap());
}

#[test]
fn single_precision_agrees_on_counts() {
    let spec64 = Spec::strict(Structure::Assortative, 2);
    let spec32 = BlockSpec::<f32>::strict(Structure::Assortative, 2);
    let b64 = barcode(&generate_block_network(&spec64).unwrap(), 2);
    let net32: Network32 = generate_block_network(&spec32).unwrap();
    let d = crvr_distance(&net32, 0.1f32).unwrap();
    let b32 = compute_persistence(&build_flag_filtration(&d, 2).unwrap()).unwrap();
    for k in 0..2 {
        assert_eq!(b64.in_dim(k).count(), b32.in_dim(k).count());
        assert_eq!(b64.betti_at(k, 1.0), b32.betti_at(k, 1.0f32));
    }
}

#[test]
fn strict_structures_are_labelled() {
    for s in Structure::ALL {
        for seed in 100..103 {
            let b = barcode(&generate_block_network(&Spec::strict(s, seed)).unwrap(), 3);
            let f = extract_features(&b, 1.0, 10.0).unwrap();
            assert_eq!(classify_structure(&f).label, s, "seed {seed}");
        }
    }
}

#[test]
fn late_h2_bars_grow_with_weak_tie_density() {
    let count = |q: f64, seed: u64| {
        let net = generate_noisy_block_network(&Spec::noisy(Structure::Assortative, 0.7, q, seed)).unwrap();
        extract_features(&barcode(&net, 3), 1.0, 10.0).unwrap().dim(2).born_after
    };
    let total = |q: f64| (0..4).map(|s| count(q, s)).sum::<usize>();
    let (low, high) = (total(0.1), total(0.9));
    assert!(low <= high, "{low} > {high}");
}

fn small_network(n: usize, ws: &[f64]) -> Network {
    let mut net = Network::empty(n).unwrap();
    let mut k = 0;
    for i in 0..n {
        for j in i + 1..n {
            net.set_weight(i, j, ws[k]).unwrap();
            k += 1;
        }
    }
    net
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn persistence_matches_the_oracle(
        n in 1usize..8,
        ws in proptest::collection::vec(prop_oneof![Just(0.05), 0.1f64..10.0], 28),
    ) {
        let net = small_network(n, &ws);
        let f = build_flag_filtration(&crvr_distance(&net, 0.1).unwrap(), 3).unwrap();
        let b = compute_persistence(&f).unwrap();
        prop_assert_eq!(&b, &compute_persistence_exhaustive(&f, Reduction::Clearing).unwrap());
        for v in f.values() {
            for k in 0..3 {
                prop_assert_eq!(b.betti_at(k, v), betti_oracle(&f, v, k));
            }
        }
    }

    #[test]
    fn h0_has_one_bar_per_vertex(n in 1usize..8, ws in proptest::collection::vec(0.0f64..10.0, 28)) {
        let b = barcode(&small_network(n, &ws), 1);
        prop_assert_eq!(b.in_dim(0).count(), n);
        prop_assert_eq!(b.in_dim(0).filter(|iv| iv.is_infinite()).count(), 1);
    }
}
