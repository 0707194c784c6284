//! Property checks over randomized inputs: exact arithmetic round trips,
//! determinant route agreement, solver correctness, degree linearity,
//! and decomposition certificates on generated models.

use foliation_core::corpus;
use foliation_core::divisor::QDivisor;
use foliation_core::linalg::SymMatrix;
use foliation_core::zariski;
use foliation_core::Rat;
use proptest::prelude::*;

fn small_rat() -> impl Strategy<Value = Rat> {
    (-200i64..=200, 1i64..=40).prop_map(|(p, q)| Rat::new(p, q))
}

fn symmetric_rows(n: usize) -> impl Strategy<Value = Vec<Vec<Rat>>> {
    proptest::collection::vec(proptest::collection::vec(-6i64..=6, n), n).prop_map(move |raw| {
        let mut rows = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for j in 0..=i {
                let v = Rat::int(raw[i][j]);
                rows[i][j] = v.clone();
                rows[j][i] = v;
            }
        }
        rows
    })
}

fn laplace_det(rows: &[Vec<Rat>]) -> Rat {
    let n = rows.len();
    if n == 0 {
        return Rat::one();
    }
    if n == 1 {
        return rows[0][0].clone();
    }
    let mut acc = Rat::zero();
    for (j, lead) in rows[0].iter().enumerate() {
        if lead.is_zero() {
            continue;
        }
        let minor: Vec<Vec<Rat>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = lead * &laplace_det(&minor);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc = acc - term;
        }
    }
    acc
}

proptest! {
    #[test]
    fn printing_and_parsing_round_trip(r in small_rat()) {
        let text = r.to_string();
        prop_assert_eq!(text.parse::<Rat>().unwrap(), r);
    }

    #[test]
    fn addition_and_subtraction_cancel(a in small_rat(), b in small_rat()) {
        prop_assert_eq!(&(&a + &b) - &b, a);
    }

    #[test]
    fn multiplication_and_division_cancel(a in small_rat(), b in small_rat()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!(&(&a * &b) / &b, a);
    }

    #[test]
    fn fraction_free_determinant_matches_cofactor_expansion(
        rows in (1usize..=4).prop_flat_map(symmetric_rows)
    ) {
        let expected = laplace_det(&rows);
        let m = SymMatrix::from_rows(rows).unwrap();
        prop_assert_eq!(m.determinant(), expected);
    }

    #[test]
    fn solve_satisfies_the_linear_system(
        (rows, rhs) in (1usize..=4).prop_flat_map(|n| {
            (symmetric_rows(n), proptest::collection::vec(-9i64..=9, n))
        })
    ) {
        let m = SymMatrix::from_rows(rows).unwrap();
        prop_assume!(!m.determinant().is_zero());
        let b: Vec<Rat> = rhs.into_iter().map(Rat::int).collect();
        let x = m.solve(&b).unwrap();
        prop_assert_eq!(m.row_mul(&x).unwrap(), b);
    }

    #[test]
    fn negated_gram_matrices_are_negative_definite(
        lower in (1usize..=4).prop_flat_map(|n| {
            proptest::collection::vec(proptest::collection::vec(-4i64..=4, n), n)
                .prop_map(move |raw| {
                    let mut l = vec![vec![Rat::zero(); n]; n];
                    for i in 0..n {
                        for j in 0..i {
                            l[i][j] = Rat::int(raw[i][j]);
                        }
                        let d = raw[i][i].abs().max(1);
                        l[i][i] = Rat::int(d);
                    }
                    l
                })
        })
    ) {
        let n = lower.len();
        let mut gram = vec![vec![Rat::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = Rat::zero();
                for (a, b) in lower[i].iter().zip(&lower[j]) {
                    s += a * b;
                }
                gram[i][j] = s;
            }
        }
        let pos = SymMatrix::from_rows(gram).unwrap();
        prop_assert!(pos.negated().is_negative_definite());
        prop_assert!(!pos.is_negative_definite());
    }

    #[test]
    fn tridiagonal_continuant_matches_elimination(
        diag in proptest::collection::vec(-5i64..=-2, 1..=6)
    ) {
        let n = diag.len();
        let mut m = SymMatrix::zero(n);
        for (i, a) in diag.iter().enumerate() {
            m.set(i, i, Rat::int(*a));
            if i + 1 < n {
                m.set(i, i + 1, Rat::one());
            }
        }
        let mut prev = Rat::one();
        let mut cur = Rat::int(-diag[0]);
        for a in &diag[1..] {
            let next = &(&Rat::int(-a) * &cur) - &prev;
            prev = cur;
            cur = next;
        }
        prop_assert_eq!(m.negated().determinant(), cur);
    }

    #[test]
    fn degree_against_a_curve_is_linear(
        seed in 0u64..400,
        a in small_rat(),
        b in small_rat(),
    ) {
        let m = corpus::random_model(seed);
        let ids: Vec<_> = m.curves().iter().map(|c| c.id.clone()).collect();
        prop_assume!(ids.len() >= 2);
        let d1 = QDivisor::single(ids[0].clone(), Rat::one());
        let d2 = QDivisor::single(ids[1].clone(), Rat::one());
        let mut combo = d1.scale(&a);
        combo.add_term(ids[1].clone(), b.clone());
        for c in &ids {
            let lhs = combo.dot_curve(&m, c).unwrap();
            let rhs = &(&a * &d1.dot_curve(&m, c).unwrap()) + &(&b * &d2.dot_curve(&m, c).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn decomposition_certificates_hold_on_generated_models(seed in 0u64..400) {
        let m = corpus::random_model(seed);
        let delta = QDivisor::zero();
        if let Ok(res) = zariski::zariski_adjoint(&m, &delta) {
            prop_assert!(res.n.is_effective());
            let support = res.n.support();
            prop_assert_eq!(&support, &res.support);
            for c in m.curves() {
                let p = res.p_dot(&c.id).unwrap();
                prop_assert!(!p.is_negative(), "P.{} = {p}", c.id);
                if support.contains(&c.id) {
                    prop_assert!(p.is_zero(), "P.{} = {p} on the support", c.id);
                }
            }
        }
    }
}
