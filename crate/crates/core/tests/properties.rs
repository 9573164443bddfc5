use proptest::prelude::*;

use mulbasis::basis::Mode;
use mulbasis::classify::{lower_sets, steps_of_space, MorphismKind};
use mulbasis::pipeline::{analyze, normalize, Final};
use mulbasis::presentation::Presentation;
use mulbasis::{Field, Matrix};

fn two_step(field: &str, lambda: &str) -> String {
    format!(
        r#"{{"field": {field}, "objects": [{{"name": "a", "dim": 2}}, {{"name": "b", "dim": 2}}],
        "rad": [{{"from": "a", "to": "a", "matrices": [[[0, 0], [1, 0]]]}},
                {{"from": "b", "to": "b", "matrices": [[[0, 0], [1, 0]]]}},
                {{"from": "a", "to": "b", "matrices": [[["1", "0"], ["0", "{lambda}"]], [[0, 0], [1, 0]]]}}]}}"#
    )
}

/// The three-doubles corpus entry with g = e11 + λ e22, h = e11 + μ e22 and e11 + ν e33 in M(a,c).
fn three_doubles(l: i64, m: i64, n: i64) -> String {
    let lower = "[[0,0,0],[1,0,0],[0,0,0]], [[0,0,0],[0,0,0],[1,0,0]], [[0,0,0],[0,0,0],[0,1,0]]";
    let lm = l * m;
    format!(
        r#"{{"field": "Q", "objects": [{{"name": "a", "dim": 3}}, {{"name": "b", "dim": 2}}, {{"name": "c", "dim": 3}}],
        "rad": [
          {{"from": "a", "to": "a", "matrices": [{lower}]}},
          {{"from": "b", "to": "b", "matrices": [[[0,0],[1,0]]]}},
          {{"from": "c", "to": "c", "matrices": [{lower}]}},
          {{"from": "a", "to": "b", "matrices": [[[1,0,0],[0,{l},0]], [[0,0,0],[1,0,0]]]}},
          {{"from": "b", "to": "c", "matrices": [[[1,0],[0,{m}],[0,0]], [[0,0],[1,0],[0,0]], [[0,0],[0,0],[1,0]], [[0,0],[0,0],[0,1]]]}},
          {{"from": "a", "to": "c", "matrices": [[[1,0,0],[0,{lm},0],[0,0,0]], [[1,0,0],[0,0,0],[0,0,{n}]], {lower}]}},
          {{"from": "b", "to": "a", "matrices": [[[0,0],[1,0],[0,0]], [[0,0],[0,0],[1,0]], [[0,0],[0,0],[0,1]]]}},
          {{"from": "c", "to": "a", "matrices": [{lower}]}},
          {{"from": "c", "to": "b", "matrices": [[[0,0,0],[1,0,0]]]}}
        ]}}"#
    )
}

fn basis_rank(text: &str, mode: Mode) -> usize {
    let p = Presentation::parse(text).unwrap();
    let r = normalize(&p, mode);
    assert_eq!(r.exit_code(), 0, "{}", r.to_json());
    match r.final_ {
        Some(Final::Basis(b)) => {
            assert!(b.verification.accepted);
            assert!(b.verification.conditions.all_pass());
            b.basis.rank
        }
        _ => panic!("no basis"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn two_step_normalizes_over_q(num in 1i64..50, den in 1i64..50, neg in any::<bool>()) {
        let lambda = format!("{}{num}/{den}", if neg { "-" } else { "" });
        prop_assert_eq!(basis_rank(&two_step("\"Q\"", &lambda), Mode::Numeric), 2);
    }

    #[test]
    fn two_step_normalizes_over_f7(lambda in 1i64..7) {
        prop_assert_eq!(basis_rank(&two_step("{\"Fp\": 7}", &lambda.to_string()), Mode::Numeric), 2);
    }

    #[test]
    fn three_doubles_invariants(l in 1i64..6, m in 1i64..6, n in -5i64..-1) {
        let text = three_doubles(l, m, n);
        let p = Presentation::parse(&text).unwrap();
        prop_assume!(p.validate().is_valid());
        let a = analyze(&p, Mode::Numeric);
        prop_assert!(a.violations.is_empty(), "{:?}", a.violations);
        let b = a.basis.unwrap();
        let q = &b.presentation;
        for x in 0..q.len() {
            for y in 0..q.len() {
                let count = b.double_count(x, y);
                prop_assert!([0, 1, 3].contains(&count));
                // S(x,y) ⊆ M(x,y)
                let (rows, cols) = (q.dim(y), q.dim(x));
                let span = q.span(x, y);
                let (s, _) = lower_sets(&steps_of_space(&span, rows, cols), rows, cols);
                for u in s {
                    prop_assert!(span.contains(Matrix::unit(q.field, rows, cols, u.row, u.col).as_vec()));
                }
            }
        }
        // every long double is a product of two basis doubles
        for (_, d) in b.doubles().filter(|(_, d)| !d.base.short) {
            let found = b.doubles().any(|(_, g)| {
                b.doubles().any(|(_, h)| g.to() == h.from() && g.from() == d.from() && h.to() == d.to()
                    && h.base.matrix.mul(&g.base.matrix) == d.base.matrix)
            });
            prop_assert!(found);
        }
        let ranks_ok = b.morphisms.iter().all(|f| f.rank() == if f.kind() == MorphismKind::Double { 2 } else { 1 });
        prop_assert!(ranks_ok);
        prop_assert_eq!(basis_rank(&text, Mode::Numeric), 2);
        prop_assert_eq!(basis_rank(&text, Mode::Symbolic), 2);
    }

    #[test]
    fn d3_double_any_parameter(lambda in 1i64..30) {
        let text = format!(
            r#"{{"field": "Q", "objects": [{{"name": "a", "dim": 3}}],
            "rad": [{{"from": "a", "to": "a", "matrices": [[[0,0,0],[1,0,0],[0,{lambda},0]], [[0,0,0],[0,0,0],[1,0,0]]]}}]}}"#
        );
        prop_assert_eq!(basis_rank(&text, Mode::Numeric), 2);
    }
}

#[test]
fn negative_parameter_over_q() {
    // sign survives as a unit monomial
    assert_eq!(basis_rank(&two_step("\"Q\"", "-1"), Mode::Numeric), 2);
    assert_eq!(Field::Rational.parse_entry("-1").unwrap().entry_string(), "-1");
}
