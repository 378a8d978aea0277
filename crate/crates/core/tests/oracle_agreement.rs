//! Cross-checks the incremental production code against independent
//! brute-force reimplementations: Floyd-Warshall distances, matrix-power
//! path counts, full-recompute importance scores, DFS path enumeration, and
//! rotation-matrix orbital positions.

use dwrosn_core::las;
use dwrosn_core::orbital::{self, ConstellationSpec};
use dwrosn_core::rwa::{self, DEFAULT_PROCESSING_DELAY_MS};
use dwrosn_core::topology::NodeSet;
use dwrosn_core::StreamSeed;
use dwrosn_testkit as oracle;

#[test]
fn hop_and_count_matrices_match_brute_force() {
    let master = StreamSeed::new(101);
    for trial in 0..40u64 {
        let mut rng = master.child(trial).rng();
        let n = 4 + (trial as usize % 7);
        let edges = oracle::random_graph(&mut rng, n, 0.35);
        let snap = oracle::snapshot_from_edges(n, &edges);
        let hops = las::hop_matrix(&snap);
        let counts = las::shortest_path_counts(&snap);
        let want_h = oracle::floyd_warshall_hops(n, &edges);
        let want_k = oracle::matrix_power_path_counts(n, &edges, &want_h);
        for s in 0..n {
            for t in 0..n {
                assert_eq!(hops.get(s, t), want_h[s * n + t], "hops ({s},{t}) trial {trial}");
                assert_eq!(counts.get(s, t), want_k[s * n + t], "counts ({s},{t}) trial {trial}");
            }
        }
    }
}

#[test]
fn importance_scores_match_full_recompute() {
    let master = StreamSeed::new(55);
    for trial in 0..60u64 {
        let mut rng = master.child(trial).rng();
        let n = 4 + (trial as usize % 8);
        let established = oracle::random_graph(&mut rng, n, 0.25);
        let snap = oracle::snapshot_from_edges(n, &established);
        let (l, nodes) = oracle::random_instance(&mut rng, n, 0.5, 4);
        let got = las::importance_matrices(&snap, &nodes, &l).unwrap();
        let (want_a, want_b) = oracle::brute_importance(&snap, &nodes, &l);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(
                    got.hop_gain.get(i, j),
                    want_a[i * n + j],
                    "hop gain ({i},{j}) trial {trial}"
                );
                assert_eq!(
                    got.path_gain.get(i, j),
                    want_b[i * n + j],
                    "path gain ({i},{j}) trial {trial}"
                );
            }
        }
    }
}

#[test]
fn candidate_paths_match_exhaustive_enumeration() {
    let spec = ConstellationSpec::reference();
    let master = StreamSeed::new(77);
    for trial in 0..25u64 {
        let mut rng = master.child(trial).rng();
        let n = 5 + (trial as usize % 4);
        let edges = oracle::random_graph(&mut rng, n, 0.45);
        let snap = oracle::snapshot_from_edges(n, &edges);
        let sats = (0..n).map(|i| spec.satellite(i).unwrap()).collect();
        let nodes = NodeSet::new(sats, vec![8; n]).unwrap();
        let max_hops = 4u32;

        let delay = |u: usize, v: usize| {
            let a = orbital::position(&spec, nodes.sat(u), 0.0).unwrap();
            let b = orbital::position(&spec, nodes.sat(v), 0.0).unwrap();
            a.distance_km(&b) / rwa::SPEED_OF_LIGHT_KM_S * 1e3 + DEFAULT_PROCESSING_DELAY_MS
        };
        for target in 1..n {
            let got = rwa::enumerate_candidate_paths(
                &spec, &nodes, &snap, 0, target, max_hops, usize::MAX, 0.0,
            )
            .unwrap();
            let want = oracle::enumerated_candidate_paths(
                n,
                &edges,
                0,
                target,
                max_hops as usize,
                usize::MAX,
                &delay,
            );
            assert_eq!(got.len(), want.len(), "path count 0->{target} trial {trial}");
            for (g, (w_nodes, w_delay)) in got.iter().zip(&want) {
                assert_eq!(&g.nodes, w_nodes, "order 0->{target} trial {trial}");
                assert!(
                    (g.delay_ms - w_delay).abs() <= 1e-9 * w_delay.max(1.0),
                    "delay mismatch {} vs {w_delay}",
                    g.delay_ms
                );
            }
        }
    }
}

#[test]
fn positions_match_rotation_matrix_construction() {
    let spec = ConstellationSpec::reference();
    let master = StreamSeed::new(3);
    let mut rng = master.rng();
    use rand::Rng;
    for _ in 0..200 {
        let flat = rng.gen_range(0..spec.total_sats());
        let sat = spec.satellite(flat).unwrap();
        let t = rng.gen_range(0.0..90000.0);
        let got = orbital::position(&spec, sat, t).unwrap();
        let layer = &spec.layers[sat.layer];
        let want = oracle::rotated_circular_position(
            layer.orbit_radius_km(spec.earth_radius_km),
            layer.inclination_deg.to_radians(),
            core::f64::consts::TAU * f64::from(sat.plane) / f64::from(layer.planes),
            layer.angular_velocity_rad_s() * t
                + core::f64::consts::TAU
                    * (f64::from(sat.slot) / f64::from(layer.sats_per_plane())
                        + f64::from(sat.plane) * f64::from(layer.phase_factor)
                            / (f64::from(layer.planes) * f64::from(layer.sats_per_plane()))),
        );
        let err = ((got.x_km - want.0).powi(2)
            + (got.y_km - want.1).powi(2)
            + (got.z_km - want.2).powi(2))
        .sqrt();
        assert!(err < 1e-6, "position error {err} km for {sat:?} at t={t}");
    }
}
