//! Coefficient pipeline certifying |zeta(1/2+it)| <= A * t^(27/164) on
//! a range t0 <= t <= t1 (t1 possibly infinite).
//!
//! The critical-line sum is cut at n ~ sqrt(t/2pi) and split into a head
//! (n below theta3 * t^(27/82)), a middle region of geometric blocks down
//! from theta2 * t^(7/17) (bounded through the 4th derivative test), and a
//! top region of geometric blocks bounded through a Weyl differencing step
//! followed by the 5th derivative test. Every coefficient is evaluated as
//! an enclosure; the certified constant is the upper endpoint.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::pairs::derivative_test_constants;
use crate::rigor::{bits_for_digits, with_precision_escalation, Direction, Enclosure, UpperScalar};
use crate::{Error, Result};

/// Which power of h3 feeds the level-4 derivative test constants in the
/// middle region. `Proof` (the default) uses h3^4, forced by the ratio of
/// the 4th derivative envelope across a geometric block; `Statement` uses
/// h3 as literally displayed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum H3Convention {
    #[default]
    Proof,
    Statement,
}

/// Which theta appears in the inflation h0 = h1 / (1 - theta * t0^(-7/17))
/// of the top-region block ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum H0Convention {
    #[default]
    Theta1,
    Theta2,
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub digits: u32,
    pub h3: H3Convention,
    pub h0: H0Convention,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            digits: crate::rigor::DEFAULT_DIGITS,
            h3: H3Convention::default(),
            h0: H0Convention::default(),
        }
    }
}

impl PipelineConfig {
    pub fn with_digits(digits: u32) -> Self {
        PipelineConfig {
            digits,
            ..Default::default()
        }
    }
}

/// Exact parameters of one certified row. `log_t0`/`log_t1` are natural
/// logarithms of the range endpoints, kept in log form so astronomically
/// large t never needs to be materialized.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    pub log_t0: Rational,
    pub log_t1: Option<Rational>,
    pub h1: Rational,
    pub h2: Rational,
    pub eta1: Rational,
    pub eta2: Rational,
    pub theta1: Rational,
    pub theta2: Rational,
    pub theta3: Rational,
}

/// Parses a decimal literal (optional sign, fraction, exponent) to an
/// exact rational.
pub fn rational_from_decimal(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Malformed("empty decimal literal".into()));
    }
    let (mant, exp10) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..]
                .parse()
                .map_err(|_| Error::Malformed(format!("bad exponent in {t:?}")))?;
            (&t[..i], e)
        }
        None => (t, 0i64),
    };
    let (sign, digits) = match mant.strip_prefix('-') {
        Some(r) => (-1i64, r),
        None => (1i64, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = match digits.find('.') {
        Some(i) => (&digits[..i], &digits[i + 1..]),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Malformed(format!("no digits in {t:?}")));
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(Error::Malformed(format!("bad decimal literal {t:?}")));
    }
    let joined = format!("{int_part}{frac_part}");
    let numer = Integer::from_str_radix(if joined.is_empty() { "0" } else { &joined }, 10)
        .map_err(|_| Error::Malformed(format!("bad decimal literal {t:?}")))?;
    let shift = exp10 - frac_part.len() as i64;
    let mut q = Rational::from(numer) * Rational::from(sign);
    if shift >= 0 {
        q *= Rational::from(Integer::from(10).pow(shift as u32));
    } else {
        q /= Rational::from(Integer::from(10).pow((-shift) as u32));
    }
    Ok(q)
}

impl ParamSet {
    #[allow(clippy::too_many_arguments)]
    pub fn from_decimal_strs(
        log_t0: &str,
        log_t1: Option<&str>,
        h1: &str,
        h2: &str,
        eta1: &str,
        eta2: &str,
        theta1: &str,
        theta2: &str,
        theta3: &str,
    ) -> Result<Self> {
        Ok(ParamSet {
            log_t0: rational_from_decimal(log_t0)?,
            log_t1: log_t1.map(rational_from_decimal).transpose()?,
            h1: rational_from_decimal(h1)?,
            h2: rational_from_decimal(h2)?,
            eta1: rational_from_decimal(eta1)?,
            eta2: rational_from_decimal(eta2)?,
            theta1: rational_from_decimal(theta1)?,
            theta2: rational_from_decimal(theta2)?,
            theta3: rational_from_decimal(theta3)?,
        })
    }
}

/// Evaluation context: exact parameters lifted to enclosures.
struct Ctx {
    bits: u32,
    h1: Enclosure,
    h2: Enclosure,
    eta1: Enclosure,
    eta2: Enclosure,
    th1: Enclosure,
    th2: Enclosure,
    th3: Enclosure,
    log_t0: Enclosure,
    log_t1: Option<Enclosure>,
    pi: Enclosure,
}

impl Ctx {
    fn new(p: &ParamSet, digits: u32) -> Ctx {
        let bits = bits_for_digits(digits);
        Ctx {
            bits,
            h1: Enclosure::from_rational(&p.h1, bits),
            h2: Enclosure::from_rational(&p.h2, bits),
            eta1: Enclosure::from_rational(&p.eta1, bits),
            eta2: Enclosure::from_rational(&p.eta2, bits),
            th1: Enclosure::from_rational(&p.theta1, bits),
            th2: Enclosure::from_rational(&p.theta2, bits),
            th3: Enclosure::from_rational(&p.theta3, bits),
            log_t0: Enclosure::from_rational(&p.log_t0, bits),
            log_t1: p
                .log_t1
                .as_ref()
                .map(|l| Enclosure::from_rational(l, bits)),
            pi: Enclosure::pi(bits),
        }
    }

    fn int(&self, v: i64) -> Enclosure {
        Enclosure::from_i64(v, self.bits)
    }

    fn rat(&self, n: i64, d: i64) -> Enclosure {
        Enclosure::from_rational(&Rational::from((n, d)), self.bits)
    }

    /// t0^(n/d) computed as exp((n/d) * log t0).
    fn t0pow(&self, n: i64, d: i64) -> Enclosure {
        self.log_t0.mul(&self.rat(n, d)).exp()
    }

    fn two_pi(&self) -> Enclosure {
        self.pi.mul(&self.int(2))
    }

    fn sqrt_two_pi(&self) -> Result<Enclosure> {
        self.two_pi().sqrt()
    }
}

/// Number of geometric blocks with ratio h1 between theta2 * t^(7/17) and
/// sqrt(t/2pi): ceil of ((3/34) log t - log(theta2 sqrt(2pi))) / log h1,
/// clamped at zero.
pub fn count_top_blocks(
    log_t: &Enclosure,
    theta2: &Enclosure,
    ln_h1: &Enclosure,
) -> Result<u64> {
    let bits = log_t.prec();
    let sqrt_2pi = Enclosure::pi(bits).mul(&Enclosure::from_i64(2, bits)).sqrt()?;
    let arg = log_t
        .mul(&Enclosure::from_rational(&Rational::from((3, 34)), bits))
        .sub(&theta2.mul(&sqrt_2pi).ln()?)
        .div(ln_h1)?;
    clamp_ceil(&arg)
}

/// Number of geometric blocks with ratio h2 between theta3 * t^(27/82) and
/// theta2 * t^(7/17): ceil of ((115/1394) log t - log(theta3/theta2)) /
/// log h2, clamped at zero.
pub fn count_middle_blocks(
    log_t: &Enclosure,
    theta2: &Enclosure,
    theta3: &Enclosure,
    ln_h2: &Enclosure,
) -> Result<u64> {
    let bits = log_t.prec();
    let arg = log_t
        .mul(&Enclosure::from_rational(
            &Rational::from((115, 1394)),
            bits,
        ))
        .sub(&theta3.div(theta2)?.ln()?)
        .div(ln_h2)?;
    clamp_ceil(&arg)
}

fn clamp_ceil(arg: &Enclosure) -> Result<u64> {
    if arg.hi() <= &0 {
        return Ok(0);
    }
    let c = arg.ceil_int()?;
    if c <= 0 {
        return Ok(0);
    }
    c.to_u64().ok_or_else(|| {
        Error::SizeExceeded(format!("block count {c} does not fit in a machine word"))
    })
}

/// Checks every admissibility predicate, naming the first violated one.
/// Predicates using transcendental quantities are proved with directed
/// bounds; an unprovable predicate counts as violated.
pub fn admissibility(p: &ParamSet, cfg: &PipelineConfig) -> Result<()> {
    let fail = |name: &str| -> Result<()> {
        Err(Error::Inadmissible {
            predicate: name.into(),
        })
    };
    for (name, value, floor) in [
        ("h1 > 1", &p.h1, 1i64),
        ("h2 > 1", &p.h2, 1i64),
    ] {
        if *value <= Rational::from(floor) {
            return fail(name);
        }
    }
    for (name, value) in [
        ("eta1 > 0", &p.eta1),
        ("eta2 > 0", &p.eta2),
        ("theta1 > 0", &p.theta1),
        ("theta2 > 0", &p.theta2),
        ("theta3 > 0", &p.theta3),
    ] {
        if *value <= Rational::from(0) {
            return fail(name);
        }
    }

    let ctx = Ctx::new(p, cfg.digits);
    // t0 >= 200 via log t0 >= log 200.
    let ln200 = ctx.int(200).ln()?;
    if !(p.log_t0 >= *ln200.hi()) {
        return fail("t0 >= 200");
    }
    if let Some(l1) = &p.log_t1 {
        if *l1 < p.log_t0 {
            return fail("log_t1 >= log_t0");
        }
    }

    // q0 = theta1 theta2^(7/17) t0^(65/697) >= 2.
    let q0 = q0(&ctx)?;
    if !q0.proves_gt(&Rational::from(2)) && !(q0.lo() >= &2) {
        return fail("q0 >= 2");
    }

    // h0 = h1 / (1 - theta t0^(-7/17)) must land in (1, 2].
    let h0 = match h0(&ctx, cfg.h0) {
        Ok(v) => v,
        Err(_) => return fail("h0 in (1, 2]"),
    };
    if !(h0.is_strictly_positive() && h0.lo() > &1 && h0.hi() <= &2) {
        return fail("h0 in (1, 2]");
    }

    // 1 - h1/(theta2 t0^(7/17)) > 0.
    let dep = one_minus_h1_over_theta2_t0(&ctx)?;
    if !dep.is_strictly_positive() {
        return fail("1 - h1/(theta2 t0^(7/17)) > 0");
    }

    // 1 - (h2/theta2) t0^(-27/82) > 0.
    let d2 = ctx
        .int(1)
        .sub(&ctx.h2.div(&ctx.th2)?.mul(&ctx.t0pow(-27, 82)));
    if !d2.is_strictly_positive() {
        return fail("1 - (h2/theta2) t0^(-27/82) > 0");
    }

    // theta1 - 1/(theta2 t0^(100/697)) > 0.
    let d3 = ctx
        .th1
        .sub(&ctx.th2.mul(&ctx.t0pow(100, 697)).recip()?);
    if !d3.is_strictly_positive() {
        return fail("theta1 - 1/(theta2 t0^(100/697)) > 0");
    }

    Ok(())
}

fn q0(ctx: &Ctx) -> Result<Enclosure> {
    Ok(ctx
        .th1
        .mul(&ctx.th2.pow_rat(&Rational::from((7, 17)))?)
        .mul(&ctx.t0pow(65, 697)))
}

fn h0(ctx: &Ctx, convention: H0Convention) -> Result<Enclosure> {
    let theta = match convention {
        H0Convention::Theta1 => &ctx.th1,
        H0Convention::Theta2 => &ctx.th2,
    };
    let denom = ctx.int(1).sub(&theta.mul(&ctx.t0pow(-7, 17)));
    if !denom.is_strictly_positive() {
        return Err(Error::Inadmissible {
            predicate: "h0 in (1, 2]".into(),
        });
    }
    ctx.h1.div(&denom)
}

fn one_minus_h1_over_theta2_t0(ctx: &Ctx) -> Result<Enclosure> {
    Ok(ctx
        .int(1)
        .sub(&ctx.h1.div(&ctx.th2.mul(&ctx.t0pow(7, 17)))?))
}

/// Head coefficient: the first sqrt(theta3 t^(27/82))-many terms are
/// bounded trivially, giving |S1| <= C0 t^(27/164) with
/// C0 = 2 sqrt(theta3 (1 + 1/(2 t0^(27/82)))).
pub fn coeff_s1(p: &ParamSet, cfg: &PipelineConfig) -> Result<Enclosure> {
    let ctx = Ctx::new(p, cfg.digits);
    ctx.th3
        .mul(
            &ctx.int(1)
                .add(&ctx.int(2).mul(&ctx.t0pow(27, 82)).recip()?),
        )
        .sqrt()?
        .mul(&ctx.int(2))
        .powi(1)
}

/// Middle-region coefficients: |S2| <= D3 t^(19/119) + D4 t^(71/476).
#[derive(Debug, Clone)]
pub struct S2Coeffs {
    pub d3: Enclosure,
    pub d4: Enclosure,
    pub h3: Enclosure,
    pub a4: Enclosure,
    pub b4: Enclosure,
    /// Block count at t1; `None` when t1 is infinite and the geometric
    /// factors are replaced by their suprema.
    pub r_t1: Option<u64>,
}

pub fn coeff_s2(p: &ParamSet, cfg: &PipelineConfig) -> Result<S2Coeffs> {
    let ctx = Ctx::new(p, cfg.digits);
    let one = ctx.int(1);

    // h3 inflates h2 for the loss of rounding block endpoints down.
    let h3 = ctx
        .h2
        .div(&one.sub(&ctx.h2.div(&ctx.th2)?.mul(&ctx.t0pow(-27, 82))))?;
    if !h3.proves_gt(&Rational::from(1)) {
        return Err(Error::Inadmissible {
            predicate: "1 - (h2/theta2) t0^(-27/82) > 0".into(),
        });
    }

    let h_arg = match cfg.h3 {
        H3Convention::Proof => h3.powi(4)?,
        H3Convention::Statement => h3.clone(),
    };
    let dc = derivative_test_constants(4, &ctx.eta2, &h_arg)?;

    let (f3, f15, r_t1) = match &ctx.log_t1 {
        None => {
            let f3 = ctx.h2.pow_rat(&Rational::from((3, 14)))?.sub(&one).recip()?;
            let f15 = ctx
                .h2
                .pow_rat(&Rational::from((15, 28)))?
                .sub(&one)
                .recip()?;
            (f3, f15, None)
        }
        Some(log_t1) => {
            let r = count_middle_blocks(log_t1, &ctx.th2, &ctx.th3, &ctx.h2.ln()?)?;
            let ri = i64::try_from(r)
                .map_err(|_| Error::SizeExceeded("middle block count exceeds i64".into()))?;
            let f3 = one
                .sub(&ctx.h2.pow_rat(&Rational::from((-3 * ri, 14)))?)
                .clamp_nonneg()
                .div(&ctx.h2.pow_rat(&Rational::from((3, 14)))?.sub(&one))?;
            let f15 = one
                .sub(&ctx.h2.pow_rat(&Rational::from((-15 * ri, 28)))?)
                .clamp_nonneg()
                .div(&ctx.h2.pow_rat(&Rational::from((15, 28)))?.sub(&one))?;
            (f3, f15, Some(r))
        }
    };

    let h3m1 = h3.sub(&one);
    let d3 = ctx
        .int(3)
        .div(&ctx.pi)?
        .pow_rat(&Rational::from((1, 14)))?
        .mul(&dc.a_k)
        .mul(&h3.pow_rat(&Rational::from((5, 7)))?)
        .mul(&h3m1)
        .mul(&ctx.th2.pow_rat(&Rational::from((3, 14)))?)
        .mul(&f3);
    let d4 = ctx
        .pi
        .div(&ctx.int(3))?
        .pow_rat(&Rational::from((1, 14)))?
        .mul(&dc.b_k)
        .mul(&h3.pow_rat(&Rational::from((2, 7)))?)
        .mul(&h3m1.pow_rat(&Rational::from((3, 4)))?)
        .mul(&ctx.th2.pow_rat(&Rational::from((15, 28)))?)
        .mul(&f15);

    Ok(S2Coeffs {
        d3,
        d4,
        h3,
        a4: dc.a_k,
        b4: dc.b_k,
        r_t1,
    })
}

/// Per-block coefficients of the top region at block ratio h0.
#[derive(Debug, Clone)]
pub struct S3Block {
    pub c1: Enclosure,
    pub c2: Enclosure,
    pub e1: Enclosure,
    pub e2: Enclosure,
    pub e3: Enclosure,
    pub alpha: Enclosure,
    pub q0: Enclosure,
    pub h5: Enclosure,
    pub a5: Enclosure,
    pub b5: Enclosure,
}

pub fn coeff_s3_block(p: &ParamSet, cfg: &PipelineConfig, h0: &Enclosure) -> Result<S3Block> {
    let ctx = Ctx::new(p, cfg.digits);
    let one = ctx.int(1);
    let q0 = q0(&ctx)?;
    if !(q0.lo() >= &2) {
        return Err(Error::Inadmissible {
            predicate: "q0 >= 2".into(),
        });
    }

    // alpha = sqrt(h0 - 1 + theta1 / (theta2^(5/41) t0^(222/697)))
    let alpha = h0
        .sub(&one)
        .add(
            &ctx.th1.div(
                &ctx.th2
                    .pow_rat(&Rational::from((5, 41)))?
                    .mul(&ctx.t0pow(222, 697)),
            )?,
        )
        .sqrt()?;

    // h5 = (76545 sqrt(2) / 107264) h0^9 feeds the 5th derivative test.
    let h5 = ctx
        .int(76545)
        .mul(&ctx.int(2).sqrt()?)
        .div(&ctx.int(107264))?
        .mul(&h0.powi(9)?);
    let dc = derivative_test_constants(5, &ctx.eta1, &h5)?;

    let h0m1 = h0.sub(&one);

    // c1: Weyl differencing main term plus the 5th-derivative A-term.
    let c1 = alpha.mul(
        &h0m1
            .div(&ctx.th1.mul(&one.sub(&q0.recip()?)))?
            .add(
                &ctx.rat(4750, 10000)
                    .mul(&ctx.th1.pow_rat(&Rational::from((11, 30)))?)
                    .mul(&dc.a_k)
                    .mul(&h0.pow_rat(&Rational::from((21, 8)))?)
                    .mul(&h0m1),
            )
            .sqrt()?,
    );

    // c2: the 5th-derivative B-term.
    let c2 = alpha.mul(
        &ctx.rat(2531, 10000)
            .mul(&ctx.th1.pow_rat(&Rational::from((61, 120)))?)
            .mul(&dc.b_k)
            .mul(&h0.pow_rat(&Rational::from((3, 2)))?)
            .mul(&h0m1.pow_rat(&Rational::from((7, 8)))?)
            .sqrt()?,
    );

    // e1, e2, e3: endpoint and residual losses of the differencing step.
    let e1 = alpha
        .mul(&ctx.rat(12496, 1000).mul(&ctx.pi.sqrt()?).sqrt()?)
        .mul(&h0.pow_rat(&Rational::from((3, 4)))?)
        .mul(
            &ctx.th1
                .sub(&ctx.th2.mul(&ctx.t0pow(100, 697)).recip()?)
                .pow_rat(&Rational::from((-1, 4)))?,
        );
    let e2 = alpha.mul(
        &ctx.rat(9, 14)
            .mul(&ctx.th1.pow_rat(&Rational::from((1, 3)))?)
            .mul(
                &ctx.rat(4465, 1000)
                    .mul(&h0m1.pow_rat(&Rational::from((1, 3)))?)
                    .div(
                        &ctx.pi
                            .pow_rat(&Rational::from((4, 3)))?
                            .mul(&ctx.th2.pow_rat(&Rational::from((1, 3)))?)
                            .mul(&ctx.t0pow(7, 51)),
                    )?
                    .add(
                        &ctx.int(6)
                            .div(&ctx.pi)?
                            .mul(&h0.powi(3)?)
                            .mul(&h0m1),
                    ),
            )
            .sqrt()?,
    );
    let e3 = alpha.mul(
        &ctx.int(6)
            .add(&ctx.int(5).mul(&ctx.int(2).ln()?).div(&ctx.pi)?)
            .sqrt()?,
    );

    Ok(S3Block {
        c1,
        c2,
        e1,
        e2,
        e3,
        alpha,
        q0,
        h5,
        a5: dc.a_k,
        b5: dc.b_k,
    })
}

/// Top-region coefficient: |S3| <= C t^(27/164), summing the block bounds
/// over the K(t1) blocks (finite range) or over all blocks (infinite tail).
#[derive(Debug, Clone)]
pub struct S3Coeffs {
    pub c45: Enclosure,
    pub h0: Enclosure,
    pub block: S3Block,
    pub mu: Vec<(String, Enclosure)>,
    pub k_t1: Option<u64>,
}

pub fn coeff_s3(p: &ParamSet, cfg: &PipelineConfig) -> Result<S3Coeffs> {
    let ctx = Ctx::new(p, cfg.digits);
    let one = ctx.int(1);
    let h0v = h0(&ctx, cfg.h0)?;
    if !(h0v.lo() > &1 && h0v.hi() <= &2) {
        return Err(Error::Inadmissible {
            predicate: "h0 in (1, 2]".into(),
        });
    }
    let block = coeff_s3_block(p, cfg, &h0v)?;

    let dep = one_minus_h1_over_theta2_t0(&ctx)?;
    if !dep.is_strictly_positive() {
        return Err(Error::Inadmissible {
            predicate: "1 - h1/(theta2 t0^(7/17)) > 0".into(),
        });
    }

    let frac = |n: i64, d: i64| Rational::from((n, d));
    let mut mu: Vec<(String, Enclosure)> = Vec::new();

    let c45;
    let k_t1;
    match &ctx.log_t1 {
        Some(log_t1) => {
            let k = count_top_blocks(log_t1, &ctx.th2, &ctx.h1.ln()?)?;
            k_t1 = Some(k);
            let ki = i64::try_from(k)
                .map_err(|_| Error::SizeExceeded("top block count exceeds i64".into()))?;
            let mu1 = |a: Rational| -> Result<Enclosure> {
                let neg = -(a.clone() * Rational::from(ki));
                Ok(ctx
                    .two_pi()
                    .pow_rat(&(a.clone() / Rational::from(-2)))?
                    .mul(
                        &one.sub(&ctx.h1.pow_rat(&neg)?)
                            .clamp_nonneg()
                            .div(&ctx.h1.pow_rat(&a)?.sub(&one))?,
                    ))
            };
            let mu2 = |a: Rational| -> Result<Enclosure> {
                Ok(mu1(a.clone())?.mul(&dep.pow_rat(&-a)?))
            };
            let m1a = mu1(frac(5, 82))?;
            let m2b = mu2(frac(17, 328))?;
            let m1c = mu1(frac(87, 164))?;
            let m2d = mu2(frac(5, 246))?;
            mu.push(("mu1(5/82)".into(), m1a.clone()));
            mu.push(("mu2(17/328)".into(), m2b.clone()));
            mu.push(("mu1(87/164)".into(), m1c.clone()));
            mu.push(("mu2(5/246)".into(), m2d.clone()));
            c45 = block
                .c1
                .mul(&m1a)
                .add(
                    &block
                        .c2
                        .mul(&m2b)
                        .mul(&ctx.h1.pow_rat(&frac(17 * ki, 328))?)
                        .mul(&ctx.t0pow(-3, 656)),
                )
                .add(&block.e1.mul(&m1c).mul(&ctx.t0pow(-27, 328)))
                .add(
                    &block
                        .e2
                        .mul(&m2d)
                        .mul(&ctx.h1.pow_rat(&frac(5 * ki, 246))?)
                        .mul(&ctx.t0pow(-13, 246)),
                )
                .add(
                    &block
                        .e3
                        .mul(&Enclosure::from_u64(k, ctx.bits))
                        .mul(&ctx.t0pow(-27, 164)),
                );
        }
        None => {
            k_t1 = None;
            let mu3 = |a: Rational| -> Result<Enclosure> {
                Ok(ctx
                    .two_pi()
                    .pow_rat(&(a.clone() / Rational::from(-2)))?
                    .div(&ctx.h1.pow_rat(&a)?.sub(&one))?)
            };
            let mu4 = |a: Rational| -> Result<Enclosure> {
                let lead = dep.pow_rat(&-a.clone())?;
                let num = ctx
                    .h1
                    .div(&ctx.th2)?
                    .pow_rat(&a)?
                    .sub(&ctx.sqrt_two_pi()?.mul(&ctx.t0pow(-3, 34)));
                let den = one.sub(&ctx.h1.pow_rat(&-a)?);
                // An empty block range shows up as a negative value; the
                // sum it bounds is empty, so clamp at zero.
                Ok(lead.mul(&num.div(&den)?).clamp_nonneg())
            };
            let m3a = mu3(frac(5, 82))?;
            let m4b = mu4(frac(17, 328))?;
            let m3c = mu3(frac(87, 164))?;
            let m4d = mu4(frac(5, 246))?;
            mu.push(("mu3(5/82)".into(), m3a.clone()));
            mu.push(("mu4(17/328)".into(), m4b.clone()));
            mu.push(("mu3(87/164)".into(), m3c.clone()));
            mu.push(("mu4(5/246)".into(), m4d.clone()));
            // Surrogate for the block count, valid for every t >= t0.
            let ksur = ctx
                .log_t0
                .mul(&ctx.rat(3, 34))
                .sub(&ctx.th2.mul(&ctx.sqrt_two_pi()?).ln()?)
                .div(&ctx.h1.ln()?)?
                .add(&one)
                .clamp_nonneg();
            mu.push(("K_surrogate".into(), ksur.clone()));
            c45 = block
                .c1
                .mul(&m3a)
                .add(&block.c2.mul(&m4b))
                .add(&block.e1.mul(&m3c).mul(&ctx.t0pow(-27, 328)))
                .add(&block.e2.mul(&m4d).mul(&ctx.t0pow(-427, 8364)))
                .add(&block.e3.mul(&ksur).mul(&ctx.t0pow(-27, 164)));
        }
    }

    Ok(S3Coeffs {
        c45,
        h0: h0v,
        block,
        mu,
        k_t1,
    })
}

/// Certified coefficient report for one parameter row.
#[derive(Debug, Clone)]
pub struct CoefficientReport {
    pub params: ParamSet,
    pub digits: u32,
    pub h3_convention: H3Convention,
    pub h0_convention: H0Convention,
    pub k_t1: Option<u64>,
    pub r_t1: Option<u64>,
    pub h3: UpperScalar,
    pub h5: UpperScalar,
    pub h0: UpperScalar,
    pub a4: UpperScalar,
    pub b4: UpperScalar,
    pub a5: UpperScalar,
    pub b5: UpperScalar,
    pub c0: UpperScalar,
    pub d3: UpperScalar,
    pub d4: UpperScalar,
    pub c1: UpperScalar,
    pub c2: UpperScalar,
    pub e1: UpperScalar,
    pub e2: UpperScalar,
    pub e3: UpperScalar,
    pub c45: UpperScalar,
    pub mu: Vec<(String, UpperScalar)>,
    /// Sub-bounds normalized to multiples of t^(27/164) at t = t0.
    pub sub_s1: UpperScalar,
    pub sub_s2: UpperScalar,
    pub sub_s3: UpperScalar,
    pub sub_smooth: UpperScalar,
    pub a_total: UpperScalar,
    pub a_total_lower: UpperScalar,
}

impl CoefficientReport {
    pub fn a_total_f64(&self) -> f64 {
        self.a_total.to_f64()
    }
}

/// Assembles the full certificate at the configured precision:
/// A = 2 (C0 + D3 t0^(-97/19516) + D4 t0^(-151/9758) + C) + smooth terms,
/// where C is C4 (finite t1) or C5 (infinite tail) and the smooth terms are
/// 1.48 t0^(-17/41) + 0.127 t0^(-75/82).
pub fn assemble(p: &ParamSet, cfg: &PipelineConfig) -> Result<CoefficientReport> {
    admissibility(p, cfg)?;
    let ctx = Ctx::new(p, cfg.digits);
    let c0 = coeff_s1(p, cfg)?;
    let s2 = coeff_s2(p, cfg)?;
    let s3 = coeff_s3(p, cfg)?;

    let two = ctx.int(2);
    let d3_term = s2.d3.mul(&ctx.t0pow(-97, 19516));
    let d4_term = s2.d4.mul(&ctx.t0pow(-151, 9758));
    let smooth = ctx
        .rat(148, 100)
        .mul(&ctx.t0pow(-17, 41))
        .add(&ctx.rat(127, 1000).mul(&ctx.t0pow(-75, 82)));
    let a_total = two
        .mul(&c0.add(&d3_term).add(&d4_term).add(&s3.c45))
        .add(&smooth);

    let d = cfg.digits;
    let up = |e: &Enclosure| e.upper(d);
    Ok(CoefficientReport {
        params: p.clone(),
        digits: d,
        h3_convention: cfg.h3,
        h0_convention: cfg.h0,
        k_t1: s3.k_t1,
        r_t1: s2.r_t1,
        h3: up(&s2.h3),
        h5: up(&s3.block.h5),
        h0: up(&s3.h0),
        a4: up(&s2.a4),
        b4: up(&s2.b4),
        a5: up(&s3.block.a5),
        b5: up(&s3.block.b5),
        c0: up(&c0),
        d3: up(&s2.d3),
        d4: up(&s2.d4),
        c1: up(&s3.block.c1),
        c2: up(&s3.block.c2),
        e1: up(&s3.block.e1),
        e2: up(&s3.block.e2),
        e3: up(&s3.block.e3),
        c45: up(&s3.c45),
        mu: s3.mu.iter().map(|(n, e)| (n.clone(), up(e))).collect(),
        sub_s1: up(&two.mul(&c0)),
        sub_s2: up(&two.mul(&d3_term.add(&d4_term))),
        sub_s3: up(&two.mul(&s3.c45)),
        sub_smooth: up(&smooth),
        a_total: up(&a_total),
        a_total_lower: a_total.lower(d),
    })
}

/// [`assemble`] with automatic precision escalation whenever a block-count
/// ceiling straddles an integer at the current precision.
pub fn assemble_certified(p: &ParamSet, cfg: &PipelineConfig) -> Result<CoefficientReport> {
    let base = cfg.clone();
    with_precision_escalation(cfg.digits, move |digits| {
        let mut c = base.clone();
        c.digits = digits;
        assemble(p, &c)
    })
}

/// Upper bound of the certified constant as an [`UpperScalar`].
pub fn certify_constant(p: &ParamSet, cfg: &PipelineConfig) -> Result<UpperScalar> {
    Ok(assemble_certified(p, cfg)?.a_total)
}

/// Convenience: UP-directed decimal rendering of the certified constant.
pub fn certify_decimal(p: &ParamSet, cfg: &PipelineConfig, sig: usize) -> Result<String> {
    Ok(certify_constant(p, cfg)?.decimal(sig))
}

/// The direction tag every certified constant carries.
pub fn certified_direction() -> Direction {
    Direction::Up
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Float;

    pub(crate) fn published_row() -> ParamSet {
        ParamSet::from_decimal_strs(
            "875",
            None,
            "1.01563",
            "1.00270",
            "1.59875",
            "0.828895",
            "1.14283",
            "261658",
            "2.53087e-11",
        )
        .unwrap()
    }

    // The reference decimal is itself rounded at its printed width, so the
    // containment check allows one unit in its last significant digit.
    fn assert_contains(e: &Enclosure, oracle: &str) {
        let v = Float::with_val(700, Float::parse(oracle).unwrap());
        let mant: String = oracle
            .split(['e', 'E'])
            .next()
            .unwrap()
            .chars()
            .filter(|c| c.is_ascii_digit())
            .collect();
        let sig = mant.trim_start_matches('0').len() as i32;
        let slack = Float::with_val(700, v.abs_ref()) * Float::with_val(64, 1 - sig).exp10();
        let lo = Float::with_val(700, e.lo() - &slack);
        let hi = Float::with_val(700, e.hi() + &slack);
        assert!(
            lo <= v && v <= hi,
            "oracle {oracle} outside [{}, {}]",
            e.lo().to_f64(),
            e.hi().to_f64()
        );
    }

    fn assert_scalar(u: &UpperScalar, oracle: &str, tol: f64) {
        let v = Float::with_val(700, Float::parse(oracle).unwrap());
        let diff = Float::with_val(700, &u.value - &v).abs().to_f64();
        assert!(
            diff <= tol * v.to_f64().abs().max(1e-300),
            "scalar {} vs oracle {oracle}",
            u.value.to_f64()
        );
    }

    #[test]
    fn decimal_parsing_is_exact() {
        assert_eq!(
            rational_from_decimal("1.01563").unwrap(),
            Rational::from((101563, 100000))
        );
        assert_eq!(
            rational_from_decimal("2.53087e-11").unwrap(),
            Rational::from((253087, 1)) / Rational::from(Integer::from(10).pow(16))
        );
        assert_eq!(rational_from_decimal("875").unwrap(), Rational::from(875));
        assert_eq!(
            rational_from_decimal("-3.5e2").unwrap(),
            Rational::from(-350)
        );
        assert!(rational_from_decimal("abc").is_err());
        assert!(rational_from_decimal("").is_err());
    }

    #[test]
    fn published_row_is_admissible() {
        admissibility(&published_row(), &PipelineConfig::default()).unwrap();
    }

    #[test]
    fn admissibility_names_first_violation() {
        let mut p = published_row();
        p.h1 = Rational::from(1);
        match admissibility(&p, &PipelineConfig::default()) {
            Err(Error::Inadmissible { predicate }) => assert_eq!(predicate, "h1 > 1"),
            other => panic!("expected inadmissible, got {other:?}"),
        }

        let mut p = published_row();
        p.log_t0 = Rational::from(5); // e^5 < 200
        match admissibility(&p, &PipelineConfig::default()) {
            Err(Error::Inadmissible { predicate }) => assert_eq!(predicate, "t0 >= 200"),
            other => panic!("expected inadmissible, got {other:?}"),
        }

        let mut p = published_row();
        p.h1 = Rational::from((5, 2)); // h0 > 2
        match admissibility(&p, &PipelineConfig::default()) {
            Err(Error::Inadmissible { predicate }) => {
                assert_eq!(predicate, "h0 in (1, 2]")
            }
            other => panic!("expected inadmissible, got {other:?}"),
        }
    }

    #[test]
    fn head_coefficient_matches_oracle() {
        let c0 = coeff_s1(&published_row(), &PipelineConfig::default()).unwrap();
        assert_contains(&c0, "1.006155057632768648202303791557760417150e-5");
        assert!(c0.rel_width() < 1e-40);
    }

    #[test]
    fn middle_coefficients_match_oracle() {
        let s2 = coeff_s2(&published_row(), &PipelineConfig::default()).unwrap();
        assert_contains(&s2.d3, "152.6640159078795278458972172708094957836");
        assert_contains(&s2.d4, "12480.07446923156948124751595010249449376");
        assert_contains(&s2.a4, "2.259024323217897353372051568899354016440");
        assert_contains(&s2.b4, "1.899313732717808356244022173602262635678");
        assert!(s2.r_t1.is_none());
    }

    #[test]
    fn top_coefficients_match_oracle() {
        let s3 = coeff_s3(&published_row(), &PipelineConfig::default()).unwrap();
        assert_contains(&s3.c45, "31.32319069459284269195608848505155648600");
        assert_contains(&s3.block.c1, "0.02302733822395390106152244909756325349915");
        assert_contains(&s3.block.c2, "0.01273742012228525778333990755098217750847");
        assert_contains(&s3.block.e1, "0.5757165283838989983667605236762440761253");
        assert_contains(&s3.block.e2, "0.01812524101638579148346192221099786487763");
        assert_contains(&s3.block.e3, "0.3332006484866584439942275098143549314672");
        assert_contains(&s3.block.h5, "1.160372755504385866742542516232927111871");
        assert_contains(&s3.block.b5, "1.424362202609091260998433232519529717136");
        let mu: std::collections::BTreeMap<_, _> = s3.mu.iter().cloned().collect();
        assert_contains(&mu["mu3(5/82)"], "999.3482664737619233559701988758934356114");
        assert_contains(&mu["mu4(17/328)"], "652.4759393339724618314466843138112386541");
        assert_contains(&mu["mu3(87/164)"], "74.34257617464150490281344806460495725081");
        assert_contains(&mu["mu4(5/246)"], "2463.014916680422138535471139507336205438");
        assert_contains(&mu["K_surrogate"], "4115.494763131947596888726689886575476028");
    }

    #[test]
    fn fifth_level_constant_matches_200_digit_oracle() {
        let s3 = coeff_s3(&published_row(), &PipelineConfig::with_digits(80)).unwrap();
        // Frozen from an independent 220-digit evaluation of the recursion.
        let oracle = "2.4935178132536010694722208460013501865567979039713782955367249295\
                      127033177432690093198769923477283850050467303539293394152928720728\
                      698239668488040815765155550392970562870726117928755898228514013595168";
        assert_contains(&s3.block.a5, oracle);
        // At 80 digits the enclosure must agree with the oracle to at
        // least 10 significant digits.
        assert!(s3.block.a5.rel_width() < 1e-10);
    }

    #[test]
    fn certified_constant_matches_oracle_and_threshold() {
        let rep = assemble(&published_row(), &PipelineConfig::default()).unwrap();
        assert_scalar(&rep.a_total, "66.62404487956387307884626609190636792869", 1e-35);
        assert!(rep.a_total.to_f64() <= 66.7);
        assert_eq!(rep.k_t1, None);
        assert_eq!(rep.r_t1, None);
    }

    #[test]
    fn finite_range_uses_block_counts() {
        let mut p = published_row();
        p.log_t1 = Some(Rational::from(1000));
        let rep = assemble_certified(&p, &PipelineConfig::default()).unwrap();
        assert_eq!(rep.k_t1, Some(4826));
        assert_eq!(rep.r_t1, Some(44272));
        assert_scalar(&rep.a_total, "75.69990163698391706452772820670582502309", 1e-30);
    }

    #[test]
    fn statement_convention_differs_and_still_certifies() {
        let cfg = PipelineConfig {
            h3: H3Convention::Statement,
            ..Default::default()
        };
        let rep = assemble(&published_row(), &cfg).unwrap();
        assert_scalar(&rep.a_total, "66.62991017075126134785619043214162146471", 1e-30);
    }

    #[test]
    fn report_parts_resum_to_total() {
        let rep = assemble(&published_row(), &PipelineConfig::default()).unwrap();
        let sum = rep.sub_s1.to_f64() + rep.sub_s2.to_f64() + rep.sub_s3.to_f64()
            + rep.sub_smooth.to_f64();
        let rel = (sum - rep.a_total.to_f64()).abs() / rep.a_total.to_f64();
        assert!(rel < 1e-14, "parts re-sum off by {rel}");
    }

    #[test]
    fn doubled_precision_tightens_the_certificate() {
        let p = published_row();
        let a60 = assemble(&p, &PipelineConfig::with_digits(60)).unwrap();
        let a120 = assemble(&p, &PipelineConfig::with_digits(120)).unwrap();
        assert!(a120.a_total.value <= a60.a_total.value);
        assert!(a120.a_total_lower.value >= a60.a_total_lower.value);
    }

    #[test]
    fn block_count_formula_at_exact_point() {
        // theta2 = 1, log h1 = 1 (h1 = e), log t1 = 34:
        // (3 - log sqrt(2 pi)) / 1 = 2.081..., so three blocks.
        let bits = bits_for_digits(40);
        let log_t = Enclosure::from_i64(34, bits);
        let th2 = Enclosure::from_i64(1, bits);
        let ln_h1 = Enclosure::from_i64(1, bits);
        assert_eq!(count_top_blocks(&log_t, &th2, &ln_h1).unwrap(), 3);
    }

    #[test]
    fn block_counts_clamp_at_zero() {
        let bits = bits_for_digits(40);
        let log_t = Enclosure::from_i64(6, bits);
        let th2 = Enclosure::from_i64(1000000, bits);
        let ln_h1 = Enclosure::from_rational(&Rational::from((1, 100)), bits);
        assert_eq!(count_top_blocks(&log_t, &th2, &ln_h1).unwrap(), 0);
        // theta3/theta2 = 1000 makes the numerator negative at log t = 6.
        let th3 = Enclosure::from_i64(1_000_000_000, bits);
        assert_eq!(
            count_middle_blocks(&log_t, &th2, &th3, &ln_h1).unwrap(),
            0
        );
    }

    #[test]
    fn degenerate_range_finite_bound_not_above_infinite() {
        let mut p = published_row();
        p.log_t1 = Some(p.log_t0.clone());
        let fin = assemble_certified(&p, &PipelineConfig::default()).unwrap();
        let inf = assemble(&published_row(), &PipelineConfig::default()).unwrap();
        assert!(
            fin.a_total.to_f64() <= inf.a_total.to_f64() + 1e-12,
            "degenerate-range constant {} exceeds tail constant {}",
            fin.a_total.to_f64(),
            inf.a_total.to_f64()
        );
    }
}
