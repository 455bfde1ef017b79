use std::f64::consts::PI;

use proptest::prelude::*;

use qfoam::channel::{exact_lambda, GainPath, Link, PropagationParams};
use qfoam::geometry::{
    admissible_elem_counts, build_layout, closed_form_sharing_tangent, overlapped_ratios,
    sharing_matrix, superpose_operators, GeometricCase, Layout,
};
use qfoam::linalg::{
    bessel_j, circulant_eigenvalues, circulant_from_first_row, diagonalize_circulant, idft_matrix,
    max_abs_diff, ComplexMatrix, C64,
};
use qfoam::metrics::{se_qf, se_single_loop_uca, Budget};
use qfoam::scenario::{noise_variance_for_snr, Scenario};
use qfoam::txrx::{tom_logical, tom_logical_matrix, NoiseModel, SymbolGrid};

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn layout_case() -> impl Strategy<Value = (usize, usize, f64)> {
    (3usize..=8, 0usize..3, any::<prop::sample::Index>()).prop_filter_map(
        "no admissible count",
        |(n, case, pick)| {
            let mut all = Vec::new();
            match case {
                0 => {
                    for v in admissible_elem_counts(n, GeometricCase::Tangent, 16).ok()? {
                        all.push((n, v, (PI / n as f64).sin()));
                    }
                }
                1 => {
                    for v in admissible_elem_counts(n, GeometricCase::ThroughCenter, 16).ok()? {
                        all.push((n, v, 1.0));
                    }
                }
                _ => {
                    for v in admissible_elem_counts(n, GeometricCase::Overlapped, 16).ok()? {
                        for r in overlapped_ratios(n, v).ok()? {
                            all.push((n, v, r));
                        }
                    }
                }
            }
            (!all.is_empty()).then(|| all[pick.index(all.len())])
        },
    )
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn small_link(d: f64) -> Link {
    let layout = build_layout(4, 4, 1.0, 1.0).unwrap();
    Link::new(
        layout.clone(),
        layout,
        PropagationParams::from_frequency(d, 5.8e9, 1.0).unwrap(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn idft_is_unitary(n in 1usize..=64) {
        let w = idft_matrix(n).unwrap();
        let e = w.matmul(&w.conj_transpose()).unwrap().sub(&ComplexMatrix::identity(n)).unwrap().max_abs();
        prop_assert!(e < 1e-12);
    }

    #[test]
    fn idft_columns_are_periodic(n in 1usize..=32, a in 0usize..32, l in 0usize..32) {
        let (a, l) = (a % n, l % n);
        let direct = |col: usize| C64::from_polar(1.0 / (n as f64).sqrt(), 2.0 * PI * (a * col) as f64 / n as f64);
        let w = idft_matrix(n).unwrap();
        prop_assert!((w[(a, l)] - direct(l + n)).norm() < 1e-12);
    }

    #[test]
    fn circulant_diagonalisation_matches_closed_form(row in prop::collection::vec(complex(), 1..=24)) {
        let c = circulant_from_first_row(&row).unwrap();
        let a = diagonalize_circulant(&c).unwrap();
        let b = circulant_eigenvalues(&row).unwrap();
        prop_assert!(max_abs_diff(&a, &b) < 1e-10);
    }

    #[test]
    fn bessel_recurrence(l in -20i32..=40, x in 0.5f64..50.0) {
        let lhs = bessel_j(l - 1, x).unwrap() + bessel_j(l + 1, x).unwrap();
        let rhs = 2.0 * l as f64 / x * bessel_j(l, x).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-8);
    }

    #[test]
    fn counting_identity((n, v, ratio) in layout_case(), rq in 0.1f64..10.0) {
        let layout = build_layout(n, v, ratio, rq).unwrap();
        let l = sharing_matrix(&layout);
        let m = l.diag().iter().fold(1u64, |acc, &x| acc / gcd(acc, x as u64) * x as u64);
        let rhs: u64 = n as u64 * l.diag().iter().map(|&x| m / x as u64).sum::<u64>();
        prop_assert_eq!(layout.n_physical() as u64 * m, rhs);
        prop_assert!(l.diag().iter().all(|&x| x >= 1 && x as usize <= n));
    }

    #[test]
    fn tangent_sharing_matches_closed_form(n in 3usize..=8, pick in any::<prop::sample::Index>()) {
        let vs = admissible_elem_counts(n, GeometricCase::Tangent, 16).unwrap();
        prop_assume!(!vs.is_empty());
        let v = vs[pick.index(vs.len())];
        let layout = build_layout(n, v, (PI / n as f64).sin(), 1.0).unwrap();
        let mut closed = closed_form_sharing_tangent(n, v).unwrap();
        closed.sort_unstable();
        prop_assert_eq!(sharing_matrix(&layout).sorted(), closed);
    }

    #[test]
    fn adjacent_pairs_share_equally((n, v, ratio) in layout_case()) {
        let layout = build_layout(n, v, ratio, 1.0).unwrap();
        let first = layout.shared_between(0, 1);
        for a in 1..n {
            prop_assert_eq!(layout.shared_between(a, (a + 1) % n), first);
        }
    }

    #[test]
    fn positions_round_trip((n, v, ratio) in layout_case(), rq in 0.1f64..10.0) {
        let layout = build_layout(n, v, ratio, rq).unwrap();
        let r = layout.cell_radius();
        for c in 0..n {
            for e in 0..v {
                let t = layout.cell_azimuth(c);
                let a = layout.elem_azimuth(e) + t;
                let x = rq * t.cos() + r * a.cos();
                let y = rq * t.sin() + r * a.sin();
                let p = layout.position(c, e);
                prop_assert!((p[0] - x).abs() < 1e-12 * rq && (p[1] - y).abs() < 1e-12 * rq);
            }
        }
    }

    #[test]
    fn transmit_superposition_twice_scales_by_group_size(
        (n, v, ratio) in layout_case(),
        seed in prop::collection::vec(complex(), 128),
    ) {
        let layout = build_layout(n, v, ratio, 1.0).unwrap();
        let (t, r) = superpose_operators(&layout);
        let x = &seed[..layout.n_slots()];
        let once = t.apply(x).unwrap();
        let twice = t.apply(&once).unwrap();
        let sizes = layout.group_sizes();
        for (s, &g) in layout.slot_groups().iter().enumerate() {
            prop_assert!((twice[s] - once[s] * sizes[g] as f64).norm() < 1e-12);
        }
        let phys = &seed[..layout.n_physical()];
        let dup = r.apply(phys).unwrap();
        let back: Vec<C64> = (0..layout.n_physical())
            .map(|g| dup[layout.slot_groups().iter().position(|&h| h == g).unwrap()])
            .collect();
        prop_assert_eq!(back, phys.to_vec());
    }

    #[test]
    fn modulation_preserves_energy_and_paths_agree(
        (n, k) in (1usize..=6, 1usize..=8),
        seed in prop::collection::vec(complex(), 48),
    ) {
        let data = seed[..n * k].to_vec();
        let grid = SymbolGrid::new(n, k, data, vec![1.0; n * k]).unwrap();
        let x = tom_logical(&grid);
        let e_in: f64 = grid.symbols().iter().map(|s| s.norm_sqr()).sum();
        let e_out: f64 = x.iter().map(|s| s.norm_sqr()).sum();
        prop_assert!((e_in - e_out).abs() < 1e-12 * e_in.max(1.0));
        prop_assert!(max_abs_diff(&x, &tom_logical_matrix(&grid).unwrap()) < 1e-12);
    }

    #[test]
    fn signed_modes_cover_grid_once(n in 1usize..=9, k in 1usize..=9) {
        let grid = SymbolGrid::new(n, k, vec![C64::new(0.0, 0.0); n * k], vec![0.0; n * k]).unwrap();
        let mut seen = vec![false; n * k];
        for p in grid.p_range() {
            for l in grid.l_range() {
                let i = grid.index(p, l).unwrap();
                prop_assert!(!seen[i]);
                seen[i] = true;
            }
        }
        prop_assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn mode_gains_alias_under_full_period(p in -2i64..=2, l in -2i64..=2, m in 0usize..4, v in 0usize..4) {
        let link = small_link(100.0);
        let a = link.equivalent_mode_gain(m, p, v, l, GainPath::Exact).unwrap();
        let b = link.equivalent_mode_gain(m, p + 4, v, l + 4, GainPath::Exact).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-30));
    }

    #[test]
    fn removing_power_never_increases_se(
        gains in prop::collection::vec(complex(), 12),
        noise in prop::collection::vec(0.01f64..2.0, 12),
        powers in prop::collection::vec(0.0f64..1.0, 12),
        drop in 0usize..12,
    ) {
        let lambda = ComplexMatrix::from_row_major(3, 4, gains).unwrap();
        let noise: Vec<Vec<f64>> = noise.chunks(4).map(<[f64]>::to_vec).collect();
        let full = se_qf(&lambda, &powers, &noise).unwrap();
        let mut less = powers.clone();
        less[drop] = 0.0;
        let reduced = se_qf(&lambda, &less, &noise).unwrap();
        prop_assert!(reduced <= full + 1e-12);
        prop_assert!(reduced >= 0.0);
    }

    #[test]
    fn single_loop_se_is_single_cell_case(n in 3usize..=16, radius in 0.2f64..3.0, snr_db in -5.0f64..25.0) {
        let params = PropagationParams::from_frequency(100.0, 5.8e9, 1.0).unwrap();
        let budget = Budget { params, total_power: 1.0, noise_variance: noise_variance_for_snr(1.0, &params, snr_db) };
        let ring = Layout::single_ring(n, radius).unwrap();
        let link = Link::new(ring.clone(), ring, params).unwrap();
        let lambda = exact_lambda(&link.build_block_channel().unwrap()).unwrap();
        let noise = NoiseModel::new(budget.noise_variance, 0).unwrap().per_mode_variance(link.rx()).unwrap();
        let direct = se_qf(&lambda, &vec![1.0 / n as f64; n], &noise).unwrap();
        prop_assert_eq!(se_single_loop_uca(n, radius, &budget).unwrap(), direct);
    }

    #[test]
    fn scenario_round_trip(
        d in 0.5f64..1e4,
        f in 1e8f64..1e11,
        snr in -30.0f64..60.0,
        rq in 0.01f64..20.0,
        seed in any::<u64>(),
        constellation in prop::sample::select(vec!["bpsk", "qpsk", "qam16"]),
    ) {
        let sc = Scenario {
            distance_m: d,
            freq_hz: f,
            snr_db: snr,
            qf_radius_m: rq,
            seed,
            constellation: constellation.to_string(),
            ..Scenario::default()
        };
        let back = Scenario::parse(&sc.serialize()).unwrap();
        prop_assert_eq!(&back, &sc);
        prop_assert_eq!(back.serialize(), sc.serialize());
    }
}
