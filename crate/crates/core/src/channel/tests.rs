use std::f64::consts::PI;

use super::*;
use crate::geometry::{build_layout, rotation_shift, Layout};
use crate::linalg::{
    circulant_eigenvalues, diagonalize_circulant, max_abs_diff, ComplexMatrix, C64,
};

fn qf_link(elems: usize, ratio: f64, distance: f64) -> Link {
    let layout = build_layout(4, elems, ratio, 1.0).unwrap();
    let params = PropagationParams::from_frequency(distance, 5.8e9, 1.0).unwrap();
    Link::new(layout.clone(), layout, params).unwrap()
}

#[test]
fn aligned_and_opposite_distances() {
    let link = qf_link(4, 0.5, 100.0);
    assert_eq!(link.exact_distance(0, 1, 1).unwrap(), 100.0);
    let want = (100.0f64.powi(2) + 4.0 * 0.25).sqrt();
    assert!((link.exact_distance(0, 0, 2).unwrap() - want).abs() < 1e-12);
    assert!(link.exact_distance(4, 0, 0).is_err());
    assert!(link.exact_distance(0, 4, 0).is_err());
}

#[test]
fn distance_matches_rotated_trig_form() {
    // Trigonometric form with azimuths measured from the tangential axis.
    let link = qf_link(4, 0.7, 30.0);
    let (rt, rr, d) = (0.7, 0.7, 30.0);
    for q in 0..4 {
        let rs = rotation_shift(q, 4, 1.0).unwrap();
        for v in 0..4 {
            for k in 0..4 {
                let phi_v = link.rx().elem_azimuth(v) + PI / 2.0;
                let psi_k = link.tx().elem_azimuth(k) + PI / 2.0;
                let x = rr * phi_v.cos() - rt * (psi_k + rs.angle).cos() - rs.a;
                let y = rr * phi_v.sin() - rt * (psi_k + rs.angle).sin() - rs.b;
                let oracle = (d * d + x * x + y * y).sqrt();
                let got = link.exact_distance(q, v, k).unwrap();
                assert!((got - oracle).abs() < 1e-12 * oracle, "q={q} v={v} k={k}");
            }
        }
    }
}

#[test]
fn fresnel_terms_at_zero_offset() {
    let link = qf_link(4, 0.5, 100.0);
    for v in 0..4 {
        let t = link.fresnel_terms(0, v).unwrap();
        assert!((t.b - 0.25 / 100.0).abs() < 1e-15);
        assert!(t.alpha.abs() < 1e-12);
        assert!(!t.degenerate);
    }
}

fn max_fresnel_error(distance: f64) -> f64 {
    let link = qf_link(4, 0.5, distance);
    let mut worst: f64 = 0.0;
    for q in 0..4 {
        for v in 0..4 {
            for k in 0..4 {
                let e = link.exact_distance(q, v, k).unwrap();
                let a = link.approx_distance(q, v, k).unwrap().distance;
                worst = worst.max((e - a).abs());
            }
        }
    }
    worst
}

#[test]
fn fresnel_error_small_and_shrinking() {
    let lam = SPEED_OF_LIGHT / 5.8e9;
    assert!(max_fresnel_error(100.0) < lam / 100.0);
    assert!(max_fresnel_error(200.0) < max_fresnel_error(50.0));
    // Brute-force value frozen from an independent evaluation.
    assert!((max_fresnel_error(100.0) - 1.0120446317499199e-05).abs() < 1e-9);
}

#[test]
fn degenerate_offset_is_flagged() {
    // Six cells of unit ratio: rx cell 0 passes through tx cell 1's centre.
    let layout = build_layout(6, 6, 1.0, 1.0).unwrap();
    let params = PropagationParams::from_frequency(100.0, 5.8e9, 1.0).unwrap();
    let link = Link::new(layout.clone(), layout, params).unwrap();
    let flagged: Vec<_> = (0..6)
        .filter(|&v| link.fresnel_terms(1, v).unwrap().degenerate)
        .collect();
    assert_eq!(flagged.len(), 1);
    assert_eq!(link.fresnel_terms(1, flagged[0]).unwrap().alpha, 0.0);
}

#[test]
fn unit_wavelength_gain() {
    let layout = build_layout(4, 4, 0.5, 1.0).unwrap();
    let params = PropagationParams::new(1.0, 1.0, 1.0).unwrap();
    let link = Link::new(layout.clone(), layout, params).unwrap();
    let h = link.element_gain(0, 0, 0, GainModel::Exact).unwrap();
    assert!((h - C64::new(1.0 / (4.0 * PI), 0.0)).norm() < 1e-15);
}

#[test]
fn shared_element_gain_is_halved() {
    let link = qf_link(4, 1.0, 100.0);
    let v = (0..4).find(|&v| link.sharing().diag()[v] == 2).unwrap();
    let h = link.element_gain(1, v, 3, GainModel::Exact).unwrap();
    let raw = link.physical_gain(0, v, 1, 3).unwrap();
    assert!((h * 2.0 - raw).norm() < 1e-18);
}

#[test]
fn gains_close_to_far_field() {
    for model in [GainModel::Exact, GainModel::Fresnel] {
        let link = qf_link(4, 1.0, 100.0);
        let ff = link.params().far_field_gain();
        for q in 0..4 {
            for v in 0..4 {
                let l = link.sharing().diag()[v] as f64;
                for k in 0..4 {
                    let g = link.element_gain(q, v, k, model).unwrap().norm() * l / ff;
                    assert!((0.9..=1.1).contains(&g), "{model:?} q={q} v={v} k={k}: {g}");
                }
            }
        }
    }
}

#[test]
fn mismatched_cell_counts_rejected() {
    let a = build_layout(4, 4, 1.0, 1.0).unwrap();
    let b = build_layout(5, 4, 1.0, 1.0).unwrap();
    let params = PropagationParams::from_frequency(100.0, 5.8e9, 1.0).unwrap();
    assert!(matches!(
        Link::new(a, b, params),
        Err(crate::Error::UnsupportedConfiguration(_))
    ));
}

#[test]
fn single_ring_has_one_block() {
    let ring = Layout::single_ring(8, 0.5).unwrap();
    let params = PropagationParams::from_frequency(100.0, 5.8e9, 1.0).unwrap();
    let link = Link::new(ring.clone(), ring, params).unwrap();
    let ch = link.build_block_channel().unwrap();
    assert_eq!(ch.n_cells(), 1);
    assert_eq!(ch.assembled().flatten(), ch.subchannel(0).clone());
}

#[test]
fn blocks_match_raw_slot_gains() {
    let link = qf_link(4, 1.0, 50.0);
    let ch = link.build_block_channel().unwrap();
    for m in 0..4 {
        for n in 0..4 {
            assert_eq!(ch.block(m, n), ch.subchannel((n + 4 - m) % 4));
            for v in 0..4 {
                let l = link.sharing().diag()[v] as f64;
                for k in 0..4 {
                    let raw = link.physical_gain(m, v, n, k).unwrap() / l;
                    let got = ch.block(m, n)[(v, k)];
                    assert!((raw - got).norm() < 1e-12 * raw.norm());
                }
            }
        }
    }
}

fn aligned_l_h0(link: &Link) -> ComplexMatrix {
    let ch = link.build_block_channel().unwrap();
    ch.subchannel(0).scale_rows(ch.sharing()).unwrap()
}

#[test]
fn aligned_block_is_symmetric_circulant() {
    for elems in [4, 8] {
        let link = qf_link(elems, 1.0, 100.0);
        let c = aligned_l_h0(&link);
        let scale = c.max_abs();
        let row = c.row(0).to_vec();
        for k in 1..elems {
            assert!((row[k] - row[elems - k]).norm() < 1e-10 * scale);
        }
        let eig = diagonalize_circulant(&c).unwrap();
        let closed = circulant_eigenvalues(&row).unwrap();
        assert!(max_abs_diff(&eig, &closed) < 1e-10 * scale);
        let w = crate::linalg::idft_matrix(elems).unwrap();
        let t = w.conj_transpose().matmul(&c.matmul(&w).unwrap()).unwrap();
        assert!(t.off_diagonal_sqr() <= 1e-10 * t.frobenius_sqr());
    }
}

#[test]
fn exact_mode_gain_is_periodic_in_l() {
    let link = qf_link(4, 1.0, 100.0);
    for l in -2..2 {
        let a = link
            .equivalent_mode_gain(1, 1, 2, l, GainPath::Exact)
            .unwrap();
        let b = link
            .equivalent_mode_gain(1, 1, 2, l + 4, GainPath::Exact)
            .unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm().max(1e-30));
    }
}

fn mode_gain_deviation(elems: usize) -> f64 {
    let link = qf_link(elems, 1.0, 100.0);
    let (mut num, mut den): (f64, f64) = (0.0, 0.0);
    for p in 0..4 {
        for v in 0..elems {
            for li in 0..elems {
                let l = signed_mode(li, elems);
                let e = link
                    .equivalent_mode_gain(0, p, v, l, GainPath::Exact)
                    .unwrap();
                let b = link
                    .equivalent_mode_gain(0, p, v, l, GainPath::Bessel)
                    .unwrap();
                num = num.max((e - b).norm());
                den = den.max(e.norm());
            }
        }
    }
    num / den
}

#[test]
fn bessel_mode_gain_converges_with_elements() {
    let d16 = mode_gain_deviation(16);
    assert!(d16 < 1e-3, "{d16}");
    assert!(mode_gain_deviation(32) < mode_gain_deviation(8));
}

#[test]
fn approx_blocks_are_diagonal() {
    let link = qf_link(8, 1.0, 100.0);
    let b = link
        .diag_approx_block(1, 2, &ApproxOptions::default())
        .unwrap();
    assert_eq!(b.off_diagonal_sqr(), 0.0);
    let bad = Link::new(
        build_layout(4, 4, 1.0, 1.0).unwrap(),
        build_layout(4, 8, 1.0, 1.0).unwrap(),
        *link.params(),
    )
    .unwrap();
    assert!(bad
        .diag_approx_block(0, 0, &ApproxOptions::default())
        .is_err());
}

#[test]
fn zero_offset_block_tracks_circulant_eigenvalues() {
    let link = qf_link(8, 1.0, 100.0);
    let c = aligned_l_h0(&link);
    let eig = diagonalize_circulant(&c).unwrap();
    let approx = link
        .diag_approx_block(0, 0, &ApproxOptions::default())
        .unwrap()
        .diag();
    let rel = max_abs_diff(&eig, &approx) / crate::linalg::max_abs(&eig);
    assert!(rel < 1e-2, "{rel}");
}

#[test]
fn approx_entry_matches_double_integral() {
    // Both ring integrals evaluated numerically, with the cosine amplitude of
    // the expanded distance frozen at its ring RMS value.
    let link = qf_link(8, 1.0, 100.0);
    let (q, p) = (1, 0);
    let lam = link.params().wavelength();
    let d = link.params().distance();
    let (rt, rr) = (1.0, 1.0);
    let s = link.centre_offset(q);
    let rms = (s.norm_sqr() + rr * rr).sqrt();
    let phi_q = 2.0 * PI * q as f64 / 4.0;
    let approx = link
        .diag_approx_block(p, q, &ApproxOptions::default())
        .unwrap();
    let m = 256;
    let scale = link.params().far_field_gain() * 8.0;
    for li in [0usize, 1, 3, 7] {
        let l = signed_mode(li, 8) as f64;
        let mut acc = C64::new(0.0, 0.0);
        for a in 0..m {
            let phi = 2.0 * PI * a as f64 / m as f64;
            let w = C64::from_polar(rr, phi) + s;
            let base = d + (w.norm_sqr() + rt * rt) / (2.0 * d);
            for b in 0..m {
                let psi = 2.0 * PI * b as f64 / m as f64;
                let dist = base - rt * rms / d * (psi + phi_q - w.arg()).cos();
                let ph = -2.0 * PI * (dist / lam - (d / lam).trunc())
                    - l * (phi - link.rx().elem_phase())
                    + l * (psi - link.tx().elem_phase());
                acc += C64::from_polar(1.0, ph);
            }
        }
        let oracle = acc / (m * m) as f64 * scale;
        let got = approx[(li, li)];
        assert!(
            (oracle - got).norm() < 1e-9 * scale,
            "l={l}: {oracle} vs {got}"
        );
    }
}

#[test]
fn gap_of_identical_matrices_is_zero() {
    let link = qf_link(4, 1.0, 100.0);
    let g = link.build_block_channel().unwrap().transformed(1).unwrap();
    assert_eq!(matrix_gap(&g, &g).unwrap(), 0.0);
    assert!(matches!(
        matrix_gap(&ComplexMatrix::zeros(2, 2), &g.clone()),
        Err(crate::Error::InvalidDimension(_))
    ));
    let z = ComplexMatrix::zeros(4, 4);
    assert!(matches!(
        matrix_gap(&z, &z),
        Err(crate::Error::DegenerateChannel(_))
    ));
}

#[test]
fn gap_scopes_are_consistent() {
    let link = qf_link(4, 1.0, 100.0);
    let opts = ApproxOptions::default();
    let mc = link.detection_coeffs(LambdaPath::Exact, &opts).unwrap();
    let total = link.approx_gap(GapScope::Total, &opts).unwrap();
    assert!((total - mc.total_gap).abs() < 1e-12);
    for p in 0..4 {
        let e = link.approx_gap(GapScope::Mode(p), &opts).unwrap();
        assert!((e - mc.gap[p]).abs() < 1e-12);
        assert!(e >= 0.0);
    }
    assert!(link.approx_gap(GapScope::Block(0, 4), &opts).is_err());
}

#[test]
fn single_ring_lambda_is_block_diagonal() {
    let ring = Layout::single_ring(8, 0.5).unwrap();
    let params = PropagationParams::from_frequency(100.0, 5.8e9, 1.0).unwrap();
    let link = Link::new(ring.clone(), ring, params).unwrap();
    let mc = link
        .detection_coeffs(LambdaPath::Exact, &ApproxOptions::default())
        .unwrap();
    let h00 = link
        .build_block_channel()
        .unwrap()
        .transformed_subchannel(0)
        .unwrap();
    for l in 0..8 {
        assert_eq!(mc.lambda[(0, l)], h00[(l, l)]);
    }
}

#[test]
fn zero_channel_has_zero_lambda() {
    let sharing = crate::geometry::SharingMatrix::identity(4);
    let ch = BlockChannel::from_subchannels(vec![ComplexMatrix::zeros(4, 4); 4], &sharing).unwrap();
    assert_eq!(exact_lambda(&ch).unwrap().max_abs(), 0.0);
}

#[test]
fn csv_exports() {
    let link = qf_link(4, 1.0, 100.0);
    let mut buf = Vec::new();
    write_channel_csv(&link.build_block_channel().unwrap(), &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 1 + 256);
    assert!(text.starts_with("m,n,v,k,re,im\n"));
    let mut buf = Vec::new();
    let rows = [
        GapRow {
            distance: 100.0,
            elems: 4,
            mode: Some(0),
            epsilon: 0.5,
        },
        GapRow {
            distance: 100.0,
            elems: 4,
            mode: None,
            epsilon: 0.25,
        },
    ];
    write_gap_csv(&rows, &mut buf).unwrap();
    assert_eq!(
        String::from_utf8(buf).unwrap(),
        "D_m,K,p,epsilon\n100,4,0,0.5\n100,4,all,0.25\n"
    );
}
