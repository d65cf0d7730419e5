use netfilter_core::bloch::bloch_matrix;
use netfilter_core::linalg::norm;
use netfilter_core::matrix::c;
use netfilter_core::*;
use proptest::prelude::*;

/// `G G† / Tr` for a complex Ginibre matrix `G` built from 32 reals.
fn random_state(raw: &[f64]) -> DensityMatrix4 {
    let g =
        ComplexMatrix::new(4, (0..16).map(|k| c(raw[2 * k], raw[2 * k + 1])).collect()).unwrap();
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    validate_density(m.scale_real(1.0 / t)).unwrap()
}

fn state() -> impl Strategy<Value = DensityMatrix4> {
    prop::collection::vec(-1.0..1.0f64, 32)
        .prop_filter("non-degenerate", |v| v.iter().any(|x| x.abs() > 1e-3))
        .prop_map(|v| random_state(&v))
}

fn eps() -> impl Strategy<Value = f64> {
    0.05..=1.0f64
}

fn unit_vector() -> impl Strategy<Value = [f64; 3]> {
    (0.0..std::f64::consts::PI, 0.0..std::f64::consts::TAU)
        .prop_map(|(t, p)| [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()])
}

fn bloch_vector() -> impl Strategy<Value = [f64; 3]> {
    (unit_vector(), 0.0..=1.0f64).prop_map(|(u, r)| u.map(|x| x * r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bloch_round_trip(rho in state()) {
        let bf = bloch_decompose(&rho);
        let again = bloch_decompose(&from_bloch(&bf).unwrap());
        for i in 0..3 {
            prop_assert!((bf.local_a[i] - again.local_a[i]).abs() < 1e-12);
            prop_assert!((bf.local_b[i] - again.local_b[i]).abs() < 1e-12);
            for j in 0..3 {
                prop_assert!((bf.correlation[i][j] - again.correlation[i][j]).abs() < 1e-12);
            }
        }
        prop_assert!(bloch_matrix(&bf).max_abs_diff(rho.matrix()) < 1e-12);
        prop_assert!(norm(&bf.local_a) <= 1.0 + 1e-9 && norm(&bf.local_b) <= 1.0 + 1e-9);
    }

    #[test]
    fn singular_values_are_sorted_and_bounded(rho in state()) {
        let s = correlation_singular_values(&rho).0;
        prop_assert!(s[0] >= s[1] && s[1] >= s[2] && s[2] >= 0.0);
        prop_assert!(s[0] <= 1.0 + 1e-9);
    }

    #[test]
    fn canonical_frame_preserves_spectrum(rho in state()) {
        let before = correlation_singular_values(&rho).0;
        let (canon, bf) = canonical_frame(&rho).unwrap();
        let after = correlation_singular_values(&canon).0;
        for k in 0..3 {
            prop_assert!((before[k] - after[k]).abs() < 1e-12);
        }
        let w = bf.correlation;
        prop_assert!(w[2][2] >= 0.0 && w[0][0] >= 0.0);
        prop_assert!(w[2][2] >= w[0][0].abs() - 1e-12 && w[0][0] >= w[1][1].abs() - 1e-12);
        prop_assert!((w[2][2] - before[0]).abs() < 1e-12 && (w[0][0] - before[1]).abs() < 1e-12);
    }

    #[test]
    fn product_states_have_rank_one_correlations(m in bloch_vector(), n in bloch_vector()) {
        let rho = product_state(&ProductParams::new(m, n).unwrap());
        let bf = bloch_decompose(&rho);
        for (row, mi) in bf.correlation.iter().zip(m) {
            for (wij, nj) in row.iter().zip(n) {
                prop_assert!((wij - mi * nj).abs() < 1e-12);
            }
        }
        let s = correlation_singular_values(&rho).0;
        prop_assert!(s[1] < 1e-12 && s[2] < 1e-12);
    }

    #[test]
    fn filtered_links_are_states(rho in state(), l in eps(), r in eps()) {
        let out = apply_link_filter(&rho, &LinkFilter::new(l, r).unwrap()).unwrap();
        prop_assert!(out.success_prob > 0.0 && out.success_prob <= 1.0 + 1e-12);
        prop_assert!(validate_density(out.state.matrix().clone()).is_ok());
    }

    #[test]
    fn channels_preserve_states(rho in state(), p in 0.0..=1.0f64) {
        for ch in [bit_flip(p).unwrap(), amplitude_damping(p).unwrap()] {
            let out = apply_channel_both_qubits(&rho, &ch);
            prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-10);
            prop_assert!(validate_density(out.matrix().clone()).is_ok());
        }
    }

    #[test]
    fn explicit_settings_never_beat_the_bound(
        a in state(), b in state(),
        e in prop::array::uniform4(eps()),
        dirs in prop::array::uniform4(unit_vector()),
    ) {
        let spec = NetworkSpec::new(
            vec![a, b],
            NetworkFilterSpec::new(e[0], e[1], vec![(e[2], e[3])]).unwrap(),
        ).unwrap();
        let ms = MeasurementSettings::new(dirs[0], dirs[1], dirs[2], dirs[3]).unwrap();
        let r = evaluate(&spec, Some(&ms)).unwrap();
        prop_assert!(r.lhs_at_settings.unwrap() <= r.b_seq + 1e-8);
        prop_assert_eq!(r.violation, r.b_seq > 1.0);
    }

    #[test]
    fn oracle_agrees_with_factorized_form(
        links in prop::collection::vec(state(), 2..=3),
        e in prop::collection::vec(eps(), 6),
        dirs in prop::array::uniform4(unit_vector()),
    ) {
        let n = links.len();
        let middle = (0..n - 1).map(|j| (e[2 + 2 * j], e[3 + 2 * j])).collect();
        let spec = NetworkSpec::new(links, NetworkFilterSpec::new(e[0], e[1], middle).unwrap()).unwrap();
        let ms = MeasurementSettings::new(dirs[0], dirs[1], dirs[2], dirs[3]).unwrap();
        let r = born_oracle(&spec, &ms).unwrap();
        prop_assert!((r.lhs - lhs_at_settings(&spec, &ms).unwrap()).abs() <= 1e-10);
        for p in r.probability_sums {
            prop_assert!((p - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn identity_filters_are_exact(links in prop::collection::vec(state(), 2..=4)) {
        let spec = NetworkSpec::unfiltered(links).unwrap();
        prop_assert_eq!(b_seq(&spec).unwrap(), (b_lin(spec.links()), 1.0));
    }

    #[test]
    fn product_link_caps_the_filtered_bound(
        others in prop::collection::vec(state(), 1..=3),
        m in bloch_vector(), n in bloch_vector(),
        position in 0usize..4,
        e in prop::collection::vec(eps(), 8),
    ) {
        let mut links = others;
        let at = position.min(links.len());
        links.insert(at, product_state(&ProductParams::new(m, n).unwrap()));
        let k = links.len();
        let middle = (0..k - 1).map(|j| (e[2 + 2 * j], e[3 + 2 * j])).collect();
        let spec = NetworkSpec::new(links, NetworkFilterSpec::new(e[0], e[1], middle).unwrap()).unwrap();
        prop_assert!(b_seq(&spec).unwrap().0 <= 1.0 + 1e-9);
    }
}

#[test]
fn maximizer_attains_the_bound_on_random_filtered_pairs() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let raw: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let links = vec![random_state(&raw[..32]), random_state(&raw[32..])];
        let e: Vec<f64> = (0..4).map(|_| rng.gen_range(0.1..=1.0)).collect();
        let spec = NetworkSpec::new(
            links,
            NetworkFilterSpec::new(e[0], e[1], vec![(e[2], e[3])]).unwrap(),
        )
        .unwrap();
        let (bound, _) = b_seq(&spec).unwrap();
        let best = maximize_lhs(&spec, &MaximizeOptions::default()).unwrap();
        assert!(
            (best.value - bound).abs() < 1e-6,
            "{} vs {bound}",
            best.value
        );
    }
}
