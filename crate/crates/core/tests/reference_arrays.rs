use std::fs;
use std::path::PathBuf;

use mixoa::constructions::{construct_recipe, REFERENCE_TABLE};
use mixoa::{select_recipe_with, FactorSpec, LastRowRule, OrthogonalArray, RecipeOptions};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(format!("{name}.txt"));
    fs::read_to_string(path).unwrap()
}

fn build(orders: &[u64], last_row: LastRowRule) -> OrthogonalArray {
    let spec = FactorSpec::new(orders.to_vec()).unwrap();
    let recipe = select_recipe_with(&spec, RecipeOptions { last_row, ..Default::default() }).unwrap();
    construct_recipe(&recipe).unwrap()
}

const REFERENCE: [(&str, &[u64]); 5] = [
    ("reference_6x2x2x2", &[6, 2, 2, 2]),
    ("reference_8x2x2", &[8, 2, 2]),
    ("reference_10x2x2", &[10, 2, 2]),
    ("reference_8x4x4", &[8, 4, 4]),
    ("reference_6x3x3", &[6, 3, 3]),
];

#[test]
fn alternating_rule_reproduces_reference_matrices() {
    for (name, orders) in REFERENCE {
        assert_eq!(build(orders, LastRowRule::Alternating).to_text(), fixture(name), "{name}");
    }
}

#[test]
fn digit_sum_rule_agrees_where_reference_matrices_are_valid() {
    for (name, orders) in REFERENCE {
        let reference = OrthogonalArray::parse_text(&fixture(name)).unwrap();
        let k = orders.len();
        let valid = reference.verify_strength(k - 1).unwrap().holds;
        let ours = build(orders, LastRowRule::DigitSum);
        assert_eq!(ours.to_text() == fixture(name), valid, "{name}");
        assert_eq!(ours.max_strength(), k - 1, "{name}");
        assert!(ours.verify_conjugacy_tags().unwrap().holds, "{name}");
    }
}

#[test]
fn two_reference_matrices_fall_short_of_strength_k_minus_1() {
    let a = OrthogonalArray::parse_text(&fixture("reference_6x2x2x2")).unwrap();
    let report = a.verify_strength(3).unwrap();
    assert!(!report.holds);
    assert_eq!(a.max_strength(), 2);
    let w = report.witness.clone().unwrap();
    assert_eq!(w.subset, vec![0, 2, 3]);
    assert!(report.describe(&a).contains("(e,0,0)"), "{}", report.describe(&a));

    let b = OrthogonalArray::parse_text(&fixture("reference_8x4x4")).unwrap();
    assert!(!b.verify_strength(2).unwrap().holds);
    assert_eq!(b.max_strength(), 1);
    // e meets only two of the four symbols of the last factor
    let seen = (0..b.size()).filter(|&j| b.entry(0, j) == 0).map(|j| b.entry(2, j)).collect::<Vec<_>>();
    assert_eq!(seen, vec![0, 3, 0, 3]);

    for name in ["reference_8x2x2", "reference_10x2x2", "reference_6x3x3"] {
        let c = OrthogonalArray::parse_text(&fixture(name)).unwrap();
        assert_eq!(c.max_strength(), 2, "{name}");
        assert!(c.verify_conjugacy_tags().unwrap().holds, "{name}");
    }
}

#[test]
fn alternating_rule_strength_over_the_table() {
    let short = REFERENCE_TABLE
        .iter()
        .filter_map(|row| {
            let a = build(row.orders, LastRowRule::Alternating);
            let k = row.orders.len();
            (a.max_strength() != k - 1).then(|| (row.orders.to_vec(), a.max_strength()))
        })
        .collect::<Vec<_>>();
    let expected: Vec<(Vec<u64>, usize)> = vec![
        (vec![6, 2, 2, 2], 2),
        (vec![6, 4, 4, 4], 2),
        (vec![8, 2, 2, 2], 2),
        (vec![8, 2, 2, 2, 2], 2),
        (vec![8, 2, 2, 2, 2, 2], 2),
        (vec![8, 6, 6, 6], 2),
        (vec![10, 2, 2, 2], 2),
        (vec![10, 4, 4, 4], 2),
        (vec![10, 6, 6, 6], 2),
        (vec![8, 4, 4], 1),
        (vec![8, 4, 4, 4], 1),
        (vec![6, 6, 6, 6], 2),
        (vec![6, 3, 3, 3], 2),
    ];
    assert_eq!(short, expected);
}

#[test]
fn gcd3_arrays_need_repeated_runs() {
    // Each (i, j) cell of the two Z3 factors holds 4 runs, and a union of
    // S3 classes of total size 4 is {e} + {a,b,c}; then x and y never occur
    // and strength 1 fails. So no repetition-free array of this kind exists.
    let a = build(&[6, 3, 3], LastRowRule::DigitSum);
    assert!(a.has_repeats());
    assert!(!a.is_proper_fraction());
    assert_eq!(a.max_strength(), 2);
    assert!(a.verify_conjugacy_tags().unwrap().holds);
}

#[test]
fn uniqueness_array() {
    let a = OrthogonalArray::parse_text(&fixture("uniqueness_3x2x2")).unwrap();
    let report = a.verify_strength(2).unwrap();
    assert!(report.holds);
    assert_eq!(report.lambda_of(&[0, 1]), Some(2));
    assert_eq!(report.lambda_of(&[0, 2]), Some(2));
    assert_eq!(report.lambda_of(&[1, 2]), Some(3));
    assert!(!a.verify_strength(3).unwrap().holds);
    assert!(a.has_repeats());
    assert!(!a.is_proper_fraction());
    assert_eq!(a.size() as u128 % mixoa::compute_l(a.spec(), 2).unwrap(), 0);
}
