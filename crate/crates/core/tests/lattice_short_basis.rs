use compass_core::lattice_short_basis::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn lattice_from(a: [i64; 4]) -> Option<Lattice> {
    if a[0] * a[3] - a[1] * a[2] == 0 {
        return None;
    }
    Lattice::new(vec![vec![a[0] as f64, a[1] as f64], vec![a[2] as f64, a[3] as f64]]).ok()
}

#[test]
fn square_and_hexagonal() {
    let sb = short_basis(&Lattice::integer(2).unwrap());
    assert_eq!(sb.lengths, vec![1.0, 1.0]);
    assert!(count_vs_bound(&sb, 2).unwrap().passed);
    let hex = short_basis(&Lattice::hexagonal());
    let v = &hex.vectors;
    let a = ((v[0][0] * v[1][0] + v[0][1] * v[1][1]) / (hex.lengths[0] * hex.lengths[1])).acos();
    assert!((a - PI / 3.0).abs() <= 1e-12);
    assert!(verify_geometry(&hex, 1e-12).passed);
}

#[test]
fn cube_torus_diameter() {
    let d = torus_diameter(&Lattice::integer(3).unwrap(), 16).unwrap();
    let exact = 3f64.sqrt() / 2.0;
    assert!(d.estimate <= exact + 1e-12 && exact <= d.upper() + 1e-12);
}

#[test]
fn rank_four_filtration_is_refused() {
    assert!(filtration_check(&Lattice::integer(4).unwrap(), 1.0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn random_planar_lattices(a in prop::array::uniform4(-6i64..7)) {
        let Some(lat) = lattice_from(a) else { return Ok(()); };
        let sb = short_basis(&lat);
        prop_assert!(verify_geometry(&sb, 1e-12).passed);
        prop_assert!(count_vs_bound(&sb, 2).unwrap().passed);
        let diam = torus_diameter(&lat, 16).unwrap();
        for l in &sb.lengths {
            prop_assert!(*l <= 2.0 * diam.upper() + 1e-9);
        }
        let top = *sb.lengths.last().unwrap();
        for r in [0.5 * sb.lengths[0], sb.lengths[0], 0.5 * (sb.lengths[0] + top), top, 2.0 * top] {
            prop_assert!(filtration_check(&lat, r).unwrap().passed);
        }
    }

    #[test]
    fn length_spectrum_ignores_the_basis(a in prop::array::uniform4(-5i64..6), u in 0usize..4) {
        let Some(lat) = lattice_from(a) else { return Ok(()); };
        let b = lat.basis();
        // unimodular changes of basis
        let moves: [[i64; 4]; 4] = [[1, 1, 0, 1], [0, 1, 1, 0], [1, 0, -2, 1], [2, 1, 1, 1]];
        let m = moves[u];
        let rows = vec![
            vec![m[0] as f64 * b[0][0] + m[1] as f64 * b[1][0], m[0] as f64 * b[0][1] + m[1] as f64 * b[1][1]],
            vec![m[2] as f64 * b[0][0] + m[3] as f64 * b[1][0], m[2] as f64 * b[0][1] + m[3] as f64 * b[1][1]],
        ];
        let other = Lattice::new(rows).unwrap();
        let (x, y) = (short_basis(&lat), short_basis(&other));
        prop_assert_eq!(x.lengths.len(), y.lengths.len());
        for (p, q) in x.lengths.iter().zip(&y.lengths) {
            prop_assert!((p - q).abs() <= 1e-9 * p);
        }
    }
}
