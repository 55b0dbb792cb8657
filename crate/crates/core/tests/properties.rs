mod common;

use cc_lab::builders::{from_design, from_graph, DesignMode, Graph, IncidenceStructure};
use cc_lab::numerics::round_sig;
use cc_lab::parameters::eigenmatrices;
use cc_lab::polynomial::{interpolate_degree, minimal_interpolant, Poly};
use cc_lab::spectral::build_spectral_basis;
use cc_lab::structureconsts::{intersection_oracle, row_sum_residual};
use cc_lab::{Matrix, Tolerance};
use proptest::prelude::*;

proptest! {
    #[test]
    fn rounding_is_idempotent(x in -1e12_f64..1e12) {
        let once = round_sig(x, 12);
        prop_assert_eq!(round_sig(once, 12), once);
        prop_assert!((once - x).abs() <= x.abs() * 1e-11 + f64::MIN_POSITIVE);
    }

    #[test]
    fn interpolation_recovers_polynomials(
        coeffs in prop::collection::vec(-5i32..=5, 1..5),
        shift in -3i32..3,
    ) {
        let p = Poly::new(coeffs.iter().map(|&c| c as f64).collect());
        let xs: Vec<f64> = (0..6).map(|k| (k + shift) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| p.eval(x)).collect();
        let (q, d) = minimal_interpolant(&xs, &ys, 1e-8);
        prop_assert_eq!(d, p.degree());
        for (a, b) in q.coeffs().iter().zip(p.coeffs()) {
            prop_assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn padded_interpolants_keep_values(ys in prop::collection::vec(-4.0_f64..4.0, 1..4), extra in 0usize..3) {
        let xs: Vec<f64> = (0..ys.len()).map(|k| k as f64 * 1.5 - 1.0).collect();
        let h = ys.len() + extra;
        let (p, padded) = interpolate_degree(&xs, &ys, h, 1e-9).unwrap();
        prop_assert!(padded);
        prop_assert_eq!(p.degree(), h);
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert!((p.eval(*x) - y).abs() < 1e-8);
        }
    }

    /// Flipping one entry of a valid configuration always breaks A1 or A2
    /// exactly at that entry.
    #[test]
    fn single_flips_are_located(k in 0usize..6, r in 0usize..3, c in 0usize..3) {
        let cc = common::config("k23.bgr");
        let mut rels = cc.relations().to_vec();
        let k = k % rels.len();
        let m = &mut rels[k].matrix;
        let (r, c) = (r % m.rows(), c % m.cols());
        m.set(r, c, 1.0 - m.get(r, c));
        let broken = cc_lab::relations::CoherentConfig::new(cc.fibres().sizes().to_vec(), rels).unwrap();
        let report = broken.verify_axioms().unwrap();
        let hit = report.failures().any(|f| matches!(
            &f.witness,
            Some(cc_lab::report::Witness::Entry { row, col, .. }) if (*row, *col) == (r, c)
        ));
        prop_assert!(hit);
    }

    /// Cycles are distance-regular, so their distance partitions verify.
    #[test]
    fn cycles_verify(n in 3usize..12) {
        let g = Graph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect()).unwrap();
        let cc = from_graph(&g).unwrap();
        prop_assert!(cc.verify_axioms().unwrap().passed());
        prop_assert_eq!(cc.relations().len(), n / 2 + 1);
    }
}

/// Row-sum identities of intersection numbers on the designs of all
/// k-subsets of a v-set.
#[test]
fn row_sums_on_complete_designs() {
    let mut verified = 0;
    for (v, k) in [(4, 2), (5, 2), (6, 2)] {
        let mut blocks = Vec::new();
        for mask in 0u32..(1 << v) {
            if mask.count_ones() as usize == k {
                blocks.push((0..v).filter(|i| mask & (1 << i) != 0).collect());
            }
        }
        let bc = from_design(&IncidenceStructure::new(v, blocks).unwrap(), DesignMode::Auto).unwrap();
        if !bc.verify_bcc().unwrap().passed() {
            continue;
        }
        verified += 1;
        let oracle = intersection_oracle(&bc).unwrap();
        assert!(row_sum_residual(&bc, &oracle) < 1e-9, "({v},{k})");
        let sb = build_spectral_basis(&bc, Tolerance::default()).unwrap();
        let es = eigenmatrices(&bc, &sb, Tolerance::default()).unwrap();
        let n = es.p_bg.rows();
        let s = ((bc.beta_size() * bc.gamma_size()) as f64).sqrt();
        assert!(es.p_bg.matmul(&es.q_bg).max_abs_diff(&Matrix::identity(n).scale(s)) < 1e-9);
    }
    assert!(verified > 0);
}
