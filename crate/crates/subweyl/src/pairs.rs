//! Exact van der Corput exponent-pair algebra and the explicit constants
//! of the k-th derivative test.
//!
//! Exponent pairs are exact rationals; the A and B process maps are exact.
//! The derivative-test constants A_k, B_k are analytic expressions in eta
//! and h evaluated as enclosures.

use rug::Rational;

use crate::rigor::Enclosure;
use crate::{Error, Result};

/// An exponent pair (k, l) with the word of processes that produced it.
/// The word is written leftmost-last: `"AB"` means B applied first, then A.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentPair {
    k: Rational,
    l: Rational,
    derivation: String,
}

impl ExponentPair {
    /// Validates the classical constraints 0 <= k <= 1/2 <= l <= 1.
    pub fn new(k: Rational, l: Rational, derivation: impl Into<String>) -> Result<Self> {
        let half = Rational::from((1, 2));
        if k < 0 || k > half || l < half || l > 1 {
            return Err(Error::InvariantViolation(format!(
                "({}, {}) is not an exponent pair",
                k, l
            )));
        }
        Ok(ExponentPair {
            k,
            l,
            derivation: derivation.into(),
        })
    }

    /// The trivial pair (0, 1).
    pub fn initial() -> Self {
        ExponentPair {
            k: Rational::new(),
            l: Rational::from(1),
            derivation: String::new(),
        }
    }

    pub fn k(&self) -> &Rational {
        &self.k
    }

    pub fn l(&self) -> &Rational {
        &self.l
    }

    pub fn derivation(&self) -> &str {
        &self.derivation
    }

    /// A-process: (k, l) -> (k/(2k+2), (k+l+1)/(2k+2)).
    pub fn apply_a(&self) -> Result<Self> {
        let two_k_two = Rational::from(2) * self.k.clone() + Rational::from(2);
        let k = self.k.clone() / two_k_two.clone();
        let l = (self.k.clone() + self.l.clone() + Rational::from(1)) / two_k_two;
        ExponentPair::new(k, l, format!("A{}", self.derivation))
    }

    /// B-process: (k, l) -> (l - 1/2, k + 1/2). An involution.
    pub fn apply_b(&self) -> Result<Self> {
        let half = Rational::from((1, 2));
        let k = self.l.clone() - half.clone();
        let l = self.k.clone() + half;
        ExponentPair::new(k, l, format!("B{}", self.derivation))
    }

    /// Applies a word over {A, B}, rightmost character first.
    pub fn apply_word(&self, word: &str) -> Result<Self> {
        let mut p = self.clone();
        for c in word.chars().rev() {
            p = match c {
                'A' => p.apply_a()?,
                'B' => p.apply_b()?,
                other => {
                    return Err(Error::PreconditionFailed(format!(
                        "process word may only contain A and B, found {other:?}"
                    )))
                }
            };
        }
        Ok(p)
    }

    /// The critical-line exponent (2k + 2l - 1)/4 obtained from this pair.
    /// Requires k + 2l >= 3/2.
    pub fn zeta_exponent(&self) -> Result<Rational> {
        let lhs = self.k.clone() + Rational::from(2) * self.l.clone();
        if lhs < Rational::from((3, 2)) {
            return Err(Error::PreconditionFailed(format!(
                "zeta exponent needs k + 2l >= 3/2, got {}",
                lhs
            )));
        }
        Ok((Rational::from(2) * self.k.clone() + Rational::from(2) * self.l.clone()
            - Rational::from(1))
            / Rational::from(4))
    }
}

/// Explicit constants of the k-th derivative test: the exponential sum
/// S_f(a, N) with lambda_k <= |f^(k)| <= h * lambda_k on the range obeys
/// |S_f| <= A_k h^(2/K) N lambda_k^(1/(2K-2)) + B_k N^(1-2/K) lambda_k^(-1/(2K-2)),
/// where K = 2^(k-1).
#[derive(Debug, Clone)]
pub struct DerivTestConstants {
    pub k: u32,
    pub a_k: Enclosure,
    pub b_k: Enclosure,
    pub lambda0: Enclosure,
    /// Base-case delta followed by the recursion multipliers, one per level.
    pub delta_chain: Vec<Enclosure>,
}

/// Computes (A_k, B_k) for k >= 3 by the explicit third-derivative base case
/// and the level-raising recursion. `eta` must be positive and `h` must
/// exceed 1 (directed bounds prove both).
pub fn derivative_test_constants(
    k: u32,
    eta: &Enclosure,
    h: &Enclosure,
) -> Result<DerivTestConstants> {
    if k < 3 {
        return Err(Error::PreconditionFailed(
            "derivative test constants are defined for k >= 3".into(),
        ));
    }
    if k > 16 {
        return Err(Error::SizeExceeded(
            "derivative test level above 16 is not supported".into(),
        ));
    }
    if !eta.is_strictly_positive() {
        return Err(Error::Domain("eta must be provably positive".into()));
    }
    if !h.proves_gt(&Rational::from(1)) {
        return Err(Error::Domain("h must provably exceed 1".into()));
    }

    let bits = eta.prec().max(h.prec());
    let one = Enclosure::from_i64(1, bits);
    let pi = Enclosure::pi(bits);
    let sqrt_pi = pi.sqrt()?;

    // lambda0 = (1/eta + 32 sqrt(eta) h / (15 sqrt(pi)))^-3
    let lambda0 = eta
        .recip()?
        .add(
            &Enclosure::from_i64(32, bits)
                .mul(&eta.sqrt()?)
                .mul(h)
                .div(&Enclosure::from_i64(15, bits).mul(&sqrt_pi))?,
        )
        .powi(-3)?;

    // delta3 = sqrt(1/2 + sqrt(1 + (3/8) sqrt(pi) eta^(3/2)) / 2)
    let eta_32 = eta.pow_rat(&Rational::from((3, 2)))?;
    let half = Enclosure::from_rational(&Rational::from((1, 2)), bits);
    let delta3 = half
        .add(
            &one.add(&Enclosure::from_rational(&Rational::from((3, 8)), bits)
                .mul(&sqrt_pi)
                .mul(&eta_32))
            .sqrt()?
            .mul(&half),
        )
        .sqrt()?;

    // A3 = delta3 * sqrt(1/(eta h) + 32/(15 sqrt(pi)) sqrt(eta + lambda0^(1/3))
    //                    + (eta + lambda0^(1/3)) lambda0^(1/3) / 3)
    let lam013 = lambda0.pow_rat(&Rational::from((1, 3)))?;
    let eta_lam = eta.add(&lam013);
    let mut a = eta
        .mul(h)
        .recip()?
        .add(
            &Enclosure::from_i64(32, bits)
                .div(&Enclosure::from_i64(15, bits).mul(&sqrt_pi))?
                .mul(&eta_lam.sqrt()?),
        )
        .add(&eta_lam.mul(&lam013).div(&Enclosure::from_i64(3, bits))?)
        .sqrt()?
        .mul(&delta3);

    // B3 = delta3 * sqrt(32) / (sqrt(3) pi^(1/4) eta^(1/4))
    let quarter = Rational::from((1, 4));
    let mut b = delta3.mul(&Enclosure::from_i64(32, bits).sqrt()?).div(
        &Enclosure::from_i64(3, bits)
            .sqrt()?
            .mul(&pi.pow_rat(&quarter)?)
            .mul(&eta.pow_rat(&quarter)?),
    )?;

    let mut chain = vec![delta3];

    // Raise the level: for source level j with K = 2^(j-1),
    //   delta_j = sqrt(1 + 2/2337^(1-2/K) * ((9 pi / 1024) eta)^(1/K)),
    //   A_{j+1} = delta_j (h^(-1/K) + 2^(19/12)(K-1)/sqrt((2K-1)(4K-3)) A_j^(1/2)),
    //   B_{j+1} = delta_j * 2^(3/2)(K-1)/sqrt((2K-3)(4K-5)) * B_j^(1/2).
    for j in 3..k {
        let kk: i64 = 1i64 << (j - 1);
        let inv_k = Rational::from((1, kk));
        let delta = one
            .add(
                &Enclosure::from_i64(2, bits)
                    .div(
                        &Enclosure::from_i64(2337, bits)
                            .pow_rat(&(Rational::from(1) - Rational::from((2, kk))))?,
                    )?
                    .mul(
                        &Enclosure::from_rational(&Rational::from((9, 1024)), bits)
                            .mul(&pi)
                            .mul(eta)
                            .pow_rat(&inv_k)?,
                    ),
            )
            .sqrt()?;
        let a_factor = Enclosure::from_i64(2, bits)
            .pow_rat(&Rational::from((19, 12)))?
            .mul(&Enclosure::from_i64(kk - 1, bits))
            .div(
                &Enclosure::from_i64(2 * kk - 1, bits)
                    .mul(&Enclosure::from_i64(4 * kk - 3, bits))
                    .sqrt()?,
            )?;
        let b_factor = Enclosure::from_i64(2, bits)
            .pow_rat(&Rational::from((3, 2)))?
            .mul(&Enclosure::from_i64(kk - 1, bits))
            .div(
                &Enclosure::from_i64(2 * kk - 3, bits)
                    .mul(&Enclosure::from_i64(4 * kk - 5, bits))
                    .sqrt()?,
            )?;
        a = delta.mul(
            &h.pow_rat(&-inv_k.clone())?
                .add(&a_factor.mul(&a.sqrt()?)),
        );
        b = delta.mul(&b_factor).mul(&b.sqrt()?);
        chain.push(delta);
    }

    Ok(DerivTestConstants {
        k,
        a_k: a,
        b_k: b,
        lambda0,
        delta_chain: chain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigor::bits_for_digits;

    fn rat(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn b_is_an_involution() {
        let p = ExponentPair::initial();
        let bb = p.apply_b().unwrap().apply_b().unwrap();
        assert_eq!(bb.k(), p.k());
        assert_eq!(bb.l(), p.l());
    }

    #[test]
    fn a_fixes_the_initial_pair() {
        let p = ExponentPair::initial().apply_a().unwrap();
        assert_eq!(*p.k(), rat(0, 1));
        assert_eq!(*p.l(), rat(1, 1));
    }

    #[test]
    fn classical_words() {
        let p = ExponentPair::initial();
        let b = p.apply_b().unwrap();
        assert_eq!((b.k(), b.l()), (&rat(1, 2), &rat(1, 2)));

        let ab = p.apply_word("AB").unwrap();
        assert_eq!((ab.k(), ab.l()), (&rat(1, 6), &rat(2, 3)));
        assert_eq!(ab.zeta_exponent().unwrap(), rat(1, 6));

        let a3b = p.apply_word("AAAB").unwrap();
        assert_eq!((a3b.k(), a3b.l()), (&rat(1, 30), &rat(13, 15)));

        let ba3b = a3b.apply_b().unwrap();
        assert_eq!((ba3b.k(), ba3b.l()), (&rat(11, 30), &rat(8, 15)));

        let word = p.apply_word("ABAAAB").unwrap();
        assert_eq!((word.k(), word.l()), (&rat(11, 82), &rat(57, 82)));
        assert_eq!(word.zeta_exponent().unwrap(), rat(27, 164));
        assert_eq!(word.derivation(), "ABAAAB");
    }

    #[test]
    fn zeta_exponent_of_initial_pair() {
        assert_eq!(
            ExponentPair::initial().zeta_exponent().unwrap(),
            rat(1, 4)
        );
    }

    #[test]
    fn zeta_exponent_precondition() {
        // (1/2, 1/2) has k + 2l = 3/2 exactly: allowed.
        let b = ExponentPair::initial().apply_b().unwrap();
        assert_eq!(b.zeta_exponent().unwrap(), rat(1, 4));
    }

    #[test]
    fn invalid_pair_is_rejected() {
        assert!(ExponentPair::new(rat(2, 3), rat(2, 3), "").is_err());
        assert!(ExponentPair::new(rat(1, 6), rat(1, 3), "").is_err());
    }

    #[test]
    fn delta3_matches_oracle_at_eta_one() {
        let bits = bits_for_digits(60);
        let eta = Enclosure::from_i64(1, bits);
        let h = Enclosure::from_rational(&rat(3, 2), bits);
        let c = derivative_test_constants(3, &eta, &h).unwrap();
        // Independent 220-digit evaluation of the closed form. The decimal
        // is rounded at 40 digits, so allow one unit in its last digit.
        let oracle = "1.070098356818839344527673359831205981292";
        let v = rug::Float::with_val(300, rug::Float::parse(oracle).unwrap());
        let slack = rug::Float::with_val(300, v.abs_ref()) * 1e-39f64;
        let lo = rug::Float::with_val(300, c.delta_chain[0].lo() - &slack);
        let hi = rug::Float::with_val(300, c.delta_chain[0].hi() + &slack);
        assert!(lo <= v && v <= hi);
    }

    #[test]
    fn deltas_are_at_least_one() {
        let bits = bits_for_digits(40);
        for (eta_n, eta_d, h_n, h_d) in
            [(1i64, 10i64, 101i64, 100i64), (3, 1, 2, 1), (828895, 1000000, 11, 10)]
        {
            let eta = Enclosure::from_rational(&rat(eta_n, eta_d), bits);
            let h = Enclosure::from_rational(&rat(h_n, h_d), bits);
            let c = derivative_test_constants(6, &eta, &h).unwrap();
            for d in &c.delta_chain {
                assert!(*d.hi() >= 1, "delta below 1 for eta={eta_n}/{eta_d}");
            }
        }
    }

    #[test]
    fn preconditions_are_enforced() {
        let bits = bits_for_digits(30);
        let eta = Enclosure::from_i64(1, bits);
        let h_bad = Enclosure::from_i64(1, bits);
        assert!(matches!(
            derivative_test_constants(3, &eta, &h_bad),
            Err(Error::Domain(_))
        ));
        let eta_bad = Enclosure::from_i64(0, bits);
        let h = Enclosure::from_i64(2, bits);
        assert!(matches!(
            derivative_test_constants(3, &eta_bad, &h),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            derivative_test_constants(2, &eta, &h),
            Err(Error::PreconditionFailed(_))
        ));
    }
}
