use std::collections::BTreeSet;
use std::sync::Arc;

use adlv_core::context::{derive_context, OPoint};
use adlv_core::enumeration::{enumerate_hodge_semimodules, EnumerationWindow};
use adlv_core::harness::{lattice_check, sample_tuples, solve_fibers, CaseSpec, Selector};
use adlv_core::lattice::{
    default_precision, normalized_basis, recover_coordinates, solve_stratum_fiber,
    stratum_membership, Coordinates, GaloisField,
};
use adlv_core::semimodule::{validate_semimodule, Coweight};
use adlv_core::strata::index_sets;
use proptest::prelude::*;

/// Over F_4, the strata of (4,1,2) cut out pairwise distinct lattices,
/// and each lattice remembers its semi-module.
#[test]
fn strata_are_disjoint() {
    let ctx = derive_context(4, 1, 2, 2).unwrap();
    let mu = Coweight::from_counts(4, &[2]).unwrap();
    let list =
        enumerate_hodge_semimodules(&ctx, &mu, EnumerationWindow::default_for(&ctx)).unwrap();
    let precision = list.iter().map(default_precision).max().unwrap();
    let field = Arc::new(GaloisField::new(2, 2).unwrap());
    let elements = field.subfield(2).unwrap();
    let mut seen = BTreeSet::new();
    let mut total = 0;
    for a in &list {
        let v = index_sets(a, 0).unwrap().v().to_vec();
        for sample in sample_tuples(4, v.len(), usize::MAX) {
            let coords: Coordinates = v
                .iter()
                .zip(&sample)
                .map(|(&p, &k)| (p, elements[k]))
                .collect();
            for x in solve_stratum_fiber(a, 0, &coords, &field, precision).unwrap() {
                let lat = normalized_basis(a, 0, &x, &field, precision)
                    .unwrap()
                    .lattice(&field)
                    .unwrap();
                assert_eq!(&lat.a_of_lattice().unwrap(), a);
                let key = lat.with_window(80).unwrap().to_json().unwrap();
                assert!(seen.insert(key), "lattice repeated in {a}");
                total += 1;
            }
        }
    }
    assert!(total > list.len());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Random V-coordinates over F_4 for the stratum {1,3,8,10}.
    #[test]
    fn random_points_of_r1(v in any::<u8>(), pick in any::<u16>()) {
        let ctx = derive_context(4, 1, 2, 2).unwrap();
        let a = validate_semimodule(&ctx, [1, 3, 8, 10].map(|i| OPoint::new(0, i))).unwrap();
        let sample = vec![(v % 2) as usize];
        let (field, solved) = solve_fibers(&a, 0, &[sample], 16).unwrap();
        let fiber = &solved[0].1;
        prop_assert_eq!(fiber.len(), 16);
        let x = &fiber[pick as usize % fiber.len()];
        prop_assert!(stratum_membership(&a, 0, x, &field, 16).unwrap());
        let lat = normalized_basis(&a, 0, x, &field, 16).unwrap().lattice(&field).unwrap();
        prop_assert_eq!(&recover_coordinates(&lat, 0).unwrap(), x);
        prop_assert_eq!(lat.hodge_position().unwrap(), vec![vec![1, 1, 0, 0]]);
    }
}

/// In odd characteristic an unsplit Artin-Schreier step needs an extension
/// of degree p, not 2.
#[test]
fn odd_characteristic_fibres_split() {
    let mut spec = CaseSpec::from_counts(2, &[1, 1]);
    spec.q = 3;
    let r = lattice_check(&spec, &Selector::Index(0), Some(0), 3, &|_| {}).unwrap();
    assert!(r.pass, "{r:?}");
    let row = &r.rows[0];
    assert_eq!((row.w, row.expected_fiber, row.field_degree), (1, 9, 6));
    assert!(row.samples.iter().all(|s| s.fiber == 9));
}
