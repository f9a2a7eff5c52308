use proptest::prelude::*;
use qtwist::cartan::{builtin_cartan, q_i, CartanDatum, WeightLabel, SUPPORTED_TYPES};
use qtwist::qnum::{q_binomial, q_factorial, q_int, QScalar};
use qtwist::Error;

fn q(s: &str) -> QScalar {
    s.parse().unwrap()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Checks the three Cartan invariants by brute force.
fn invariants_hold(c: &CartanDatum) -> bool {
    let n = c.rank();
    let diag = (0..n).all(|i| c.a[i][i] == 2);
    let off = (0..n).all(|i| (0..n).all(|j| i == j || (c.a[i][j] <= 0 && ((c.a[i][j] == 0) == (c.a[j][i] == 0)))));
    let sym = (0..n).all(|i| (0..n).all(|j| c.d[i] * c.a[i][j] == c.d[j] * c.a[j][i]));
    let coprime = c.d.iter().fold(0, |g, &x| gcd(g, x)) == 1;
    diag && off && sym && coprime
}

#[test]
fn builtin_types_satisfy_invariants() {
    for label in SUPPORTED_TYPES {
        let c = builtin_cartan(label).unwrap();
        assert!(invariants_hold(&c), "{label}");
        assert!(c.validate().is_ok());
    }
}

#[test]
fn builtin_tables() {
    let a1 = builtin_cartan("A1").unwrap();
    assert_eq!((a1.rank(), a1.a.clone(), a1.d.clone()), (1, vec![vec![2]], vec![1]));
    let a2 = builtin_cartan("A2").unwrap();
    assert_eq!(a2.a, vec![vec![2, -1], vec![-1, 2]]);
    assert_eq!(a2.d, vec![1, 1]);
    let b2 = builtin_cartan("B2").unwrap();
    assert_eq!(b2.a, vec![vec![2, -1], vec![-2, 2]]);
    assert_eq!(b2.d, vec![2, 1]);
    let a4 = builtin_cartan("A4").unwrap();
    assert_eq!(a4.rank(), 4);
}

#[test]
fn unknown_label_lists_supported() {
    match builtin_cartan("E8") {
        Err(Error::UnknownCartanType { supported, .. }) => assert_eq!(supported, SUPPORTED_TYPES.to_vec()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn invalid_data_rejected() {
    assert!(CartanDatum::new("x", vec![vec![2, -1], vec![0, 2]], vec![1, 1]).is_err());
    assert!(CartanDatum::new("x", vec![vec![2, -1], vec![-2, 2]], vec![1, 1]).is_err());
    assert!(CartanDatum::new("x", vec![vec![2]], vec![2]).is_err());
    assert!(CartanDatum::new("x", vec![vec![1]], vec![1]).is_err());
}

#[test]
fn cartan_json_shape() {
    let v: serde_json::Value = serde_json::to_value(builtin_cartan("A2").unwrap()).unwrap();
    assert_eq!(
        v,
        serde_json::json!({"label": "A2", "a": [[2, -1], [-1, 2]], "d": [1, 1]})
    );
    let back: CartanDatum = serde_json::from_value(v).unwrap();
    assert_eq!(back.a, vec![vec![2, -1], vec![-1, 2]]);
}

#[test]
fn weight_labels() {
    assert!(WeightLabel::new(vec![0, 3]).dominant());
    assert!(!WeightLabel::new(vec![1, -1]).dominant());
}

#[test]
fn q_i_examples() {
    assert_eq!(q_i(&builtin_cartan("A1").unwrap(), &q("2/3"), 1).unwrap(), q("2/3"));
    assert_eq!(q_i(&builtin_cartan("B2").unwrap(), &q("2"), 1).unwrap(), q("4"));
    assert_eq!(q_i(&builtin_cartan("A2").unwrap(), &q("1/2"), 2).unwrap(), q("1/2"));
    assert!(q_i(&builtin_cartan("A1").unwrap(), &q("-1/2"), 1).is_err());
    assert!(q_i(&builtin_cartan("A1").unwrap(), &q("0"), 1).is_err());
    assert!(q_i(&builtin_cartan("A1").unwrap(), &q("1/2"), 2).is_err());
}

#[test]
fn rationals_are_reduced() {
    assert_eq!(QScalar::new(2, 4).unwrap().to_string(), "1/2");
    assert_eq!(QScalar::new(3, -6).unwrap().to_string(), "-1/2");
    assert_eq!(q("-6/2").to_string(), "-3/1");
    assert_eq!(q("5/2").to_string(), "5/2");
    assert!(QScalar::new(1, 0).is_err());
    assert!("1/0".parse::<QScalar>().is_err());
    assert!("abc".parse::<QScalar>().is_err());
}

#[test]
fn q_int_examples() {
    for qs in ["1/2", "2/3", "3", "7/5"] {
        assert_eq!(q_int(1, &q(qs)).unwrap(), QScalar::one());
        let qv = q(qs);
        assert_eq!(q_int(2, &qv).unwrap(), &qv + &qv.recip().unwrap());
    }
    assert_eq!(q_int(2, &q("2")).unwrap(), q("5/2"));
    assert_eq!(q_int(3, &q("1/2")).unwrap(), q("21/4"));
    assert!(matches!(q_int(2, &q("1")), Err(Error::UnsupportedParameter(_))));
}

/// `[n+1] = [2][n] - [n-1]` from `[0] = 0`, `[1] = 1`.
fn q_int_recurrence(n: i64, qv: &QScalar) -> QScalar {
    let two = qv + &qv.recip().unwrap();
    let (mut prev, mut cur) = (QScalar::zero(), QScalar::one());
    if n == 0 {
        return prev;
    }
    for _ in 1..n {
        let next = &(&two * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// q-Pascal table built from the recurrence alone.
fn pascal(n: usize, qv: &QScalar) -> Vec<Vec<QScalar>> {
    let mut rows: Vec<Vec<QScalar>> = vec![vec![QScalar::one()]];
    for m in 1..=n {
        let prev = &rows[m - 1];
        let row = (0..=m)
            .map(|k| {
                let left = if k < m {
                    &qv.pow(-(k as i64)) * &prev[k]
                } else {
                    QScalar::zero()
                };
                let right = if k > 0 {
                    &qv.pow((m - k) as i64) * &prev[k - 1]
                } else {
                    QScalar::zero()
                };
                &left + &right
            })
            .collect();
        rows.push(row);
    }
    rows
}

#[test]
fn q_int_matches_recurrence() {
    for qs in ["1/2", "2/3", "3"] {
        let qv = q(qs);
        for n in 0..=15 {
            assert_eq!(q_int(n, &qv).unwrap(), q_int_recurrence(n, &qv), "n={n} q={qs}");
        }
    }
}

#[test]
fn q_binomial_examples() {
    let qv = q("1/2");
    assert_eq!(q_binomial(5, 0, &qv).unwrap(), QScalar::one());
    assert_eq!(q_binomial(2, 1, &qv).unwrap(), q_int(2, &qv).unwrap());
    assert_eq!(q_binomial(4, 2, &qv).unwrap(), pascal(4, &qv)[4][2]);
    assert_eq!(q_factorial(3, &qv).unwrap(), q("5/2") * q("21/4"));
    assert!(q_binomial(3, 4, &qv).is_err());
    assert!(q_binomial(3, -1, &qv).is_err());
}

#[test]
fn q_binomial_symmetry_and_pascal() {
    for qs in ["1/2", "2/3", "3"] {
        let qv = q(qs);
        let table = pascal(12, &qv);
        for n in 0..=12i64 {
            for k in 0..=n {
                let c = q_binomial(n, k, &qv).unwrap();
                assert_eq!(c, q_binomial(n, n - k, &qv).unwrap(), "n={n} k={k} q={qs}");
                assert_eq!(c, table[n as usize][k as usize], "n={n} k={k} q={qs}");
            }
        }
    }
}

fn rational() -> impl Strategy<Value = QScalar> {
    (-50i64..=50, 1i64..=30).prop_map(|(n, d)| QScalar::new(n, d).unwrap())
}

fn positive_q() -> impl Strategy<Value = QScalar> {
    (1i64..=30, 1i64..=30)
        .prop_filter("q != 1", |(n, d)| n != d)
        .prop_map(|(n, d)| QScalar::new(n, d).unwrap())
}

proptest! {
    #[test]
    fn field_axioms(a in rational(), b in rational(), c in rational()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a - &a, QScalar::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.recip().unwrap(), QScalar::one());
        }
        let back: QScalar = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn q_int_symmetries(n in -12i64..=12, qv in positive_q()) {
        let inv = qv.recip().unwrap();
        prop_assert_eq!(q_int(n, &qv).unwrap(), q_int(n, &inv).unwrap());
        prop_assert_eq!(q_int(-n, &qv).unwrap(), -q_int(n, &qv).unwrap());
        if n >= 1 {
            prop_assert!(q_int(n, &qv).unwrap().is_positive());
        }
    }

    #[test]
    fn q_i_inverse(qv in positive_q(), label in prop::sample::select(SUPPORTED_TYPES.to_vec())) {
        let c = builtin_cartan(label).unwrap();
        let inv = qv.recip().unwrap();
        for i in 1..=c.rank() {
            prop_assert_eq!(&q_i(&c, &qv, i).unwrap() * &q_i(&c, &inv, i).unwrap(), QScalar::one());
        }
    }
}
