use proptest::prelude::*;
use rug::{Float, Rational};
use subweyl::rigor::{bits_for_digits, Enclosure};

fn rat(n: i64, d: u32) -> Rational {
    Rational::from((n, d))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn ring_ops_contain_exact_rationals(
        a_n in -1_000_000i64..1_000_000,
        a_d in 1u32..1_000_000,
        b_n in -1_000_000i64..1_000_000,
        b_d in 1u32..1_000_000,
    ) {
        let bits = bits_for_digits(60);
        let (qa, qb) = (rat(a_n, a_d), rat(b_n, b_d));
        let ea = Enclosure::from_rational(&qa, bits);
        let eb = Enclosure::from_rational(&qb, bits);

        let sum = ea.add(&eb);
        let exact = Rational::from(&qa + &qb);
        prop_assert!(*sum.lo() <= exact && exact <= *sum.hi());

        let diff = ea.sub(&eb);
        let exact = Rational::from(&qa - &qb);
        prop_assert!(*diff.lo() <= exact && exact <= *diff.hi());

        let prod = ea.mul(&eb);
        let exact = Rational::from(&qa * &qb);
        prop_assert!(*prod.lo() <= exact && exact <= *prod.hi());
    }

    #[test]
    fn quotient_contains_exact_rational(
        a_n in -1_000_000i64..1_000_000,
        a_d in 1u32..1_000_000,
        b_n in 1i64..1_000_000,
        b_d in 1u32..1_000_000,
        negate in any::<bool>(),
    ) {
        let bits = bits_for_digits(60);
        let qa = rat(a_n, a_d);
        let mut qb = rat(b_n, b_d);
        if negate {
            qb = -qb;
        }
        let ea = Enclosure::from_rational(&qa, bits);
        let eb = Enclosure::from_rational(&qb, bits);
        let quot = ea.div(&eb).unwrap();
        let exact = Rational::from(&qa / &qb);
        prop_assert!(*quot.lo() <= exact && exact <= *quot.hi());
    }

    #[test]
    fn sqrt_square_contains_argument(n in 1i64..1_000_000, d in 1u32..1_000_000) {
        let bits = bits_for_digits(60);
        let q = rat(n, d);
        let r = Enclosure::from_rational(&q, bits).sqrt().unwrap();
        let sq = r.mul(&r);
        prop_assert!(*sq.lo() <= q && q <= *sq.hi());
    }

    #[test]
    fn exp_ln_roundtrip_contains_argument(n in 1i64..1_000_000, d in 1u32..1_000_000) {
        let bits = bits_for_digits(60);
        let q = rat(n, d);
        let e = Enclosure::from_rational(&q, bits).ln().unwrap().exp();
        prop_assert!(*e.lo() <= q && q <= *e.hi());
        prop_assert!(e.rel_width() < 1e-55);
    }

    #[test]
    fn powi_contains_exact_cube(n in -1_000i64..1_000, d in 1u32..1_000) {
        prop_assume!(n != 0);
        let bits = bits_for_digits(60);
        let q = rat(n, d);
        let e = Enclosure::from_rational(&q, bits).powi(3).unwrap();
        let exact = Rational::from(&q * &q) * &q;
        prop_assert!(*e.lo() <= exact && exact <= *e.hi());
    }

    // Doubling the working precision must refine the enclosure in place:
    // the fine interval nests inside the coarse one and is no wider.
    #[test]
    fn refinement_nests_under_precision_doubling(n in 1i64..1_000_000, d in 1u32..1_000_000) {
        let q = rat(n, d);
        let eval = |digits: u32| -> Enclosure {
            let bits = bits_for_digits(digits);
            let e = Enclosure::from_rational(&q, bits);
            let one = Enclosure::from_i64(1, bits);
            one.add(&e)
                .ln()
                .unwrap()
                .exp()
                .mul(&e.sqrt().unwrap())
        };
        let coarse = eval(60);
        let fine = eval(120);
        prop_assert!(coarse.contains(&fine));
        prop_assert!(fine.width() <= coarse.width());
    }

    // Directed extraction: lower bound below upper bound, and the rendered
    // decimals bracket the enclosure from the correct sides.
    #[test]
    fn directed_decimals_bracket_the_enclosure(n in 1i64..1_000_000, d in 1u32..1_000_000) {
        let bits = bits_for_digits(60);
        let e = Enclosure::from_rational(&rat(n, d), bits).sqrt().unwrap();
        let up = e.upper(60);
        let dn = e.lower(60);
        prop_assert!(dn.value <= up.value);
        let fu = Float::with_val(400, Float::parse(up.decimal(17)).unwrap());
        let fd = Float::with_val(400, Float::parse(dn.decimal(17)).unwrap());
        prop_assert!(fd <= fu);
        prop_assert!(fu >= *e.lo());
        prop_assert!(fd <= *e.hi());
    }
}
