use nalgebra::DMatrix;
use proptest::prelude::*;
use sawcount::connconst::{gelfand_bound, spectral_bound, CsrMatrix};

fn dense_radius(rows: &[Vec<f64>]) -> f64 {
    let k = rows.len();
    let m = DMatrix::from_fn(k, k, |i, j| rows[i][j]);
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn matrix(k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    // about a third of the entries are zero; the diagonal stays positive
    // so every matrix is aperiodic
    prop::collection::vec(prop::collection::vec((0.0..1.0f64, 0..3u8), k), k).prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(j, (x, keep))| if i == j || keep > 0 { 0.05 + x } else { 0.0 })
                    .collect()
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_dense_eigensolver(rows in (1usize..=8).prop_flat_map(matrix)) {
        let m = CsrMatrix::from_dense(&rows).unwrap();
        let r = spectral_bound(&m, 1e-14).unwrap();
        prop_assert!(r.converged);
        let want = dense_radius(&rows);
        prop_assert!((r.eigenvalue - want).abs() <= 1e-8 * want.max(1.0),
            "power {} dense {}", r.eigenvalue, want);
        for &(l, g) in &r.gelfand {
            prop_assert!(g >= want - 1e-9, "gelfand at {} is {}", l, g);
        }
    }
}

#[test]
fn nilpotent_matrix_has_zero_gelfand_bound() {
    let m = CsrMatrix::from_dense(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
    assert_eq!(gelfand_bound(&m, 4), 0.0);
    // a Jordan block converges only like 1/k under the power method
    assert!(spectral_bound(&m, 1e-9).unwrap().eigenvalue.abs() < 1e-3);
}

#[test]
fn rejects_bad_input() {
    let empty = CsrMatrix::from_triples(0, Vec::new()).unwrap();
    assert!(spectral_bound(&empty, 1e-9).is_err());
    let one = CsrMatrix::from_dense(&[vec![2.0]]).unwrap();
    assert!(spectral_bound(&one, 0.0).is_err());
    assert!(CsrMatrix::from_dense(&[vec![1.0, 2.0]]).is_err());
}
