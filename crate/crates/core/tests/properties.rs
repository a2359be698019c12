use std::collections::BTreeMap;

use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fcmult::algebra::{check_algebra, check_direct, Bounds};
use fcmult::chain::{CochainComplex, EndX, GradedBasis, MultiMap};
use fcmult::fixtures::{lift_dga, one_loop_graph, random_algebra, random_complex, random_map};
use fcmult::format::{to_json, AlgebraFile, PresetSpec};
use fcmult::free::{build_ainf_operad, Generator};
use fcmult::label::{add, decompose, LabelMonoid, MonoidElem};
use fcmult::scalar::{self, Scalar};

type Table = Vec<(usize, usize, usize, i64)>;

/// Structure constants of a two-dimensional algebra: either `k[x]/(x² - ax - b)`
/// in the basis `1, x` (always associative) or an arbitrary table.
fn tables() -> impl Strategy<Value = Table> {
    let quotient = (-2i64..=2, -2i64..=2)
        .prop_map(|(a, b)| vec![(0, 0, 0, 1), (0, 1, 1, 1), (1, 0, 1, 1), (1, 1, 1, a), (1, 1, 0, b)]);
    let arbitrary = proptest::collection::vec((0usize..2, 0usize..2, 0usize..2, -1i64..=1), 0..8);
    prop_oneof![quotient, arbitrary]
}

fn associative(t: &Table) -> bool {
    let mut m = [[[0i64; 2]; 2]; 2];
    for &(x, y, z, c) in t {
        m[x][y][z] += c;
    }
    (0..2).all(|x| {
        (0..2).all(|y| {
            (0..2).all(|z| {
                (0..2).all(|w| {
                    let left: i64 = (0..2).map(|u| m[x][y][u] * m[u][z][w]).sum();
                    let right: i64 = (0..2).map(|u| m[y][z][u] * m[x][u][w]).sum();
                    left == right
                })
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifted_tables_pass_iff_associative(t in tables()) {
        let fc = build_ainf_operad(LabelMonoid::trivial());
        let basis = GradedBasis::new(vec![("1".into(), 0), ("x".into(), 0)]).unwrap();
        let entries = t.iter().map(|&(x, y, z, c)| (x, y, z, scalar::int(c))).collect();
        let a = lift_dga(&fc, CochainComplex::trivial(basis), entries).unwrap();
        let b = Bounds { arity: 4, labels: 0 };
        let g = check_algebra(&fc, &a, b).unwrap();
        let d = check_direct(&fc, &a, b).unwrap();
        prop_assert_eq!(g.pass, associative(&t));
        prop_assert_eq!(d.pass, g.pass);
        if !g.pass {
            prop_assert_eq!(g.lowest_failing_arity, Some(3));
        }
    }

    #[test]
    fn hat_d_squares_to_zero_on_random_maps(seed in any::<u64>(), arity in 0usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = EndX::uniform(one_loop_graph(), random_complex(&mut rng, 3));
        let m = random_map(&x, &vec![0; arity], 0, 0.5, &mut rng);
        let h = x.hat_d(&m).unwrap();
        prop_assert!(x.hat_d(&h).unwrap().is_zero());
    }

    #[test]
    fn label_addition_and_decomposition(a in proptest::collection::vec(0u32..4, 2), b in proptest::collection::vec(0u32..4, 2)) {
        let (a, b) = (MonoidElem(a), MonoidElem(b));
        let s = add(&a, &b).unwrap();
        prop_assert_eq!(&s, &add(&b, &a).unwrap());
        let parts = decompose(&s);
        let expected: u32 = s.0.iter().map(|c| c + 1).product();
        prop_assert_eq!(parts.len() as u32, expected);
        prop_assert!(parts.contains(&(a.clone(), b.clone())));
        for (p, q) in parts {
            prop_assert_eq!(&add(&p, &q).unwrap(), &s);
        }
    }

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let q = Scalar::new(n.into(), d.into());
        prop_assert_eq!(scalar::parse(&scalar::format(&q)).unwrap(), q);
    }

    #[test]
    fn algebra_files_round_trip(seed in 0u64..200) {
        let preset = PresetSpec::named("ainf");
        let fc = preset.build().unwrap();
        let a = random_algebra(&fc, Bounds { arity: 3, labels: 0 }, 3, seed).unwrap();
        let text = to_json(&AlgebraFile::from_algebra(preset, &fc, &a));
        let (_, back) = AlgebraFile::parse(&text).unwrap().build().unwrap();
        let nonzero = |m: &BTreeMap<Generator, MultiMap>| -> Vec<(Generator, MultiMap)> {
            m.iter().filter(|(_, v)| !v.is_zero()).map(|(k, v)| (k.clone(), v.clone())).collect()
        };
        prop_assert_eq!(nonzero(back.assignment()), nonzero(a.assignment()));
        prop_assert_eq!(back.x.complexes(), a.x.complexes());
    }
}

#[test]
fn zero_scalar_formats_as_zero() {
    assert_eq!(scalar::format(&Scalar::zero()), "0");
}
