//! Empirical verification lab: brute-force exponential sums, numeric
//! checks of every inequality the certification chain relies on, and an
//! independent zeta oracle for end-to-end sanity checks.
//!
//! Checks certify inequality instances: the reported left side is an upper
//! bound including all numeric error, the right side a lower bound, so
//! `pass` means the instance provably holds.

use rug::float::Constant;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pairs::derivative_test_constants;
use crate::rigor::{bits_for_digits, Direction, Enclosure, UpperScalar};
use crate::{Error, Result};

/// Phase functions whose exponential sums the lab can evaluate. All take
/// the sum over integer arguments in (a, a+N].
#[derive(Debug, Clone, Copy)]
pub enum PhaseSpec {
    /// f(x) = -(t/2pi) log x, the partial-sum phase of zeta on the
    /// critical line.
    LogZeta { t: f64 },
    /// g_r(x) = f(x+r) - f(x) = -(t/2pi) log(1 + r/x), the r-differenced
    /// phase produced by Weyl differencing.
    Differenced { t: f64, r: i64 },
}

impl PhaseSpec {
    pub fn t(&self) -> f64 {
        match self {
            PhaseSpec::LogZeta { t } | PhaseSpec::Differenced { t, .. } => *t,
        }
    }

    /// Round-to-nearest phase value at integer x.
    fn eval_phase(&self, x: i64, p: u32) -> Float {
        let pi2 = Float::with_val(p, Constant::Pi) * 2i32;
        match self {
            PhaseSpec::LogZeta { t } => {
                let c = Float::with_val(p, *t) / pi2;
                -(c * Float::with_val(p, x).ln())
            }
            PhaseSpec::Differenced { t, r } => {
                let c = Float::with_val(p, *t) / pi2;
                let d = Float::with_val(p, x + r).ln() - Float::with_val(p, x).ln();
                -(c * d)
            }
        }
    }

    /// Phase in f64, for quadrature integrands.
    fn phase_f64(&self, x: f64) -> f64 {
        match self {
            PhaseSpec::LogZeta { t } => -t / (2.0 * std::f64::consts::PI) * x.ln(),
            PhaseSpec::Differenced { t, r } => {
                -t / (2.0 * std::f64::consts::PI) * (*r as f64 / x).ln_1p()
            }
        }
    }

    /// Enclosure of |f^(k)(x)| at integer x. Both phase families have
    /// |f^(k)| strictly decreasing on x > 0.
    pub fn deriv_abs(&self, k: u32, x: i64, bits: u32) -> Result<Enclosure> {
        if k == 0 {
            return Err(Error::PreconditionFailed(
                "derivative order must be at least 1".into(),
            ));
        }
        let mut fact = 1i64;
        for j in 1..k as i64 {
            fact *= j;
        }
        let two_pi = Enclosure::pi(bits).add(&Enclosure::pi(bits));
        let t_enc = Enclosure::from_f64(self.t(), bits)?;
        let c = t_enc.div(&two_pi)?.mul(&Enclosure::from_i64(fact, bits));
        let xk = Enclosure::from_i64(x, bits).powi(k as i64)?;
        match self {
            PhaseSpec::LogZeta { .. } => c.div(&xk),
            PhaseSpec::Differenced { r, .. } => {
                let xrk = Enclosure::from_i64(x + r, bits).powi(k as i64)?;
                Ok(c.mul(&xk.recip()?.sub(&xrk.recip()?)))
            }
        }
    }

    /// Certified derivative envelope on [lo, hi]: returns point values
    /// (lambda, h) with lambda <= |f^(k)| <= h lambda on the interval.
    pub fn envelope(&self, k: u32, lo: i64, hi: i64, bits: u32) -> Result<Envelope> {
        if lo <= 0 || hi <= lo {
            return Err(Error::PreconditionFailed(
                "envelope interval must satisfy 0 < lo < hi".into(),
            ));
        }
        // |f^(k)| decreases, so the minimum sits at the right endpoint and
        // the supremum at the left.
        let lam_enc = self.deriv_abs(k, hi, bits)?;
        let sup_enc = self.deriv_abs(k, lo, bits)?;
        let lambda = Enclosure::from_parts(lam_enc.lo().clone(), lam_enc.lo().clone())?;
        let h_enc = sup_enc.div(&lambda)?;
        let h = Enclosure::from_parts(h_enc.hi().clone(), h_enc.hi().clone())?;
        Ok(Envelope { lambda, h })
    }
}

/// Point envelope for one derivative order: lambda is a certified lower
/// bound for |f^(k)| on the interval and h * lambda a certified upper one.
#[derive(Debug, Clone)]
pub struct Envelope {
    pub lambda: Enclosure,
    pub h: Enclosure,
}

/// An exponential sum evaluated term by term, with a certified bound on
/// the total floating-point error.
#[derive(Debug, Clone)]
pub struct SumValue {
    pub re: f64,
    pub im: f64,
    /// |S| for the full range.
    pub abs: f64,
    /// max over 1 <= L <= N of |S restricted to the first L terms|.
    pub max_abs: f64,
    /// Certified bound on the numeric error of all fields.
    pub err: f64,
}

/// Computes S = sum over a < n <= a+N of e(f(n)) in round-to-nearest MPFR
/// arithmetic, returning the value together with a certified error bound.
pub fn brute_sum(phase: &PhaseSpec, a: i64, n: i64, bits: u32) -> Result<SumValue> {
    if a < 1 || n < 1 {
        return Err(Error::PreconditionFailed(
            "sum range requires a >= 1 and N >= 1".into(),
        ));
    }
    let p = bits;
    let two_pi = Float::with_val(p, Constant::Pi) * 2i32;
    let mut re = Float::new(p);
    let mut im = Float::new(p);
    let mut max_abs: f64 = 0.0;
    for x in a + 1..=a + n {
        let ang = Float::with_val(p, &two_pi * &phase.eval_phase(x, p));
        let (s, c) = ang.sin_cos(Float::new(p));
        re += c;
        im += s;
        let m = re.to_f64().hypot(im.to_f64());
        if m > max_abs {
            max_abs = m;
        }
    }
    let abs = re.to_f64().hypot(im.to_f64());
    // Phase magnitude bound covers both families; each term contributes
    // O(phase * 2^-p) vector error, accumulation O(N * 2^-p) more.
    let pb = phase.t() / (2.0 * std::f64::consts::PI) * ((a + n) as f64).ln() + 1.0;
    let nf = n as f64;
    let err = (nf * ((6.3 * pb + 2.0) * 64.0 + 2.0 * nf) + 16.0) * 2f64.powi(1 - p as i32);
    Ok(SumValue {
        re: re.to_f64(),
        im: im.to_f64(),
        abs,
        max_abs,
        err,
    })
}

/// Outcome of one certified inequality instance.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub label: String,
    /// Left side plus all numeric error.
    pub lhs_upper: f64,
    /// Right side minus all numeric error.
    pub rhs_lower: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(label: String, lhs_upper: f64, rhs_lower: f64) -> CheckResult {
        CheckResult {
            label,
            lhs_upper,
            rhs_lower,
            pass: lhs_upper <= rhs_lower,
        }
    }

    pub fn margin(&self) -> f64 {
        self.rhs_lower - self.lhs_upper
    }
}

const RHS_F64_GUARD: f64 = 1.0 - 1e-12;

/// Checks one instance of the Weyl differencing inequality
/// |S_f(a,N)|^2 <= (N-1+q)(N/q + (2/q) sum_{r<q} (1-r/q)|S_{g_r}(a,N-r)|).
pub fn check_weyl(t: f64, a: i64, n: i64, q: i64, bits: u32) -> Result<CheckResult> {
    if q < 1 || q > n {
        return Err(Error::PreconditionFailed(
            "shift count q must satisfy 1 <= q <= N".into(),
        ));
    }
    let f = PhaseSpec::LogZeta { t };
    let s = brute_sum(&f, a, n, bits)?;
    let lhs_upper = (s.abs + s.err) * (s.abs + s.err);

    let qf = q as f64;
    let nf = n as f64;
    let mut inner = nf / qf;
    for r in 1..q {
        let g = PhaseSpec::Differenced { t, r };
        let sg = brute_sum(&g, a, n - r, bits)?;
        let weight = (q - r) as f64 / qf;
        inner += 2.0 / qf * weight * (sg.abs - sg.err).max(0.0);
    }
    let rhs_lower = (nf - 1.0 + qf) * inner * RHS_F64_GUARD;
    Ok(CheckResult::new(
        format!("weyl t={t:.3} a={a} N={n} q={q}"),
        lhs_upper,
        rhs_lower,
    ))
}

/// Checks one instance of the k-th derivative test
/// |S_f(a,N)| <= A_k h^(2/K) N lambda^(1/(2K-2)) + B_k N^(1-2/K) lambda^(-1/(2K-2)).
///
/// The left side is the running maximum over all prefix sums: each prefix
/// satisfies the same envelope on a subinterval, and the right side is
/// monotone in N, so the stronger check is still implied by the theorem.
pub fn check_kth_test(
    phase: &PhaseSpec,
    a: i64,
    n: i64,
    k: u32,
    eta: f64,
    bits: u32,
) -> Result<CheckResult> {
    let env = phase.envelope(k, a, a + n, bits)?;
    let eta_enc = Enclosure::from_f64(eta, bits)?;
    let consts = derivative_test_constants(k, &eta_enc, &env.h)?;

    let big_k = 1i64 << (k - 1);
    let e_h = Rational::from((2, big_k));
    let e_lam = Rational::from((1, 2 * big_k - 2));
    let e_lam_neg = Rational::from((-1, 2 * big_k - 2));
    let e_n = Rational::from((big_k - 2, big_k));

    let n_enc = Enclosure::from_i64(n, bits);
    let t1 = consts
        .a_k
        .mul(&env.h.pow_rat(&e_h)?)
        .mul(&n_enc)
        .mul(&env.lambda.pow_rat(&e_lam)?);
    let t2 = consts
        .b_k
        .mul(&n_enc.pow_rat(&e_n)?)
        .mul(&env.lambda.pow_rat(&e_lam_neg)?);
    let rhs = t1.add(&t2);

    let s = brute_sum(phase, a, n, bits)?;
    let label = match phase {
        PhaseSpec::LogZeta { t } => format!("kth k={k} t={t:.3} a={a} N={n} eta={eta:.4}"),
        PhaseSpec::Differenced { t, r } => {
            format!("kth k={k} t={t:.3} r={r} a={a} N={n} eta={eta:.4}")
        }
    };
    Ok(CheckResult::new(
        label,
        s.max_abs + s.err,
        rhs.to_f64_lo(),
    ))
}

/// e(x) integrand values for the oscillatory integral of a differenced
/// phase minus a linear term.
fn integrand(phase: &PhaseSpec, nu: i64, x: f64) -> (f64, f64) {
    let ang = 2.0 * std::f64::consts::PI * (phase.phase_f64(x) - nu as f64 * x);
    (ang.cos(), ang.sin())
}

fn simpson_panel(
    a: f64,
    b: f64,
    fa: (f64, f64),
    fm: (f64, f64),
    fb: (f64, f64),
) -> (f64, f64) {
    let h = (b - a) / 6.0;
    (
        h * (fa.0 + 4.0 * fm.0 + fb.0),
        h * (fa.1 + 4.0 * fm.1 + fb.1),
    )
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> (f64, f64),
    a: f64,
    b: f64,
    fa: (f64, f64),
    fm: (f64, f64),
    fb: (f64, f64),
    whole: (f64, f64),
    tol: f64,
    depth: u32,
    err_acc: &mut f64,
) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson_panel(a, m, fa, flm, fm);
    let right = simpson_panel(m, b, fm, frm, fb);
    let s2 = (left.0 + right.0, left.1 + right.1);
    let d = (s2.0 - whole.0, s2.1 - whole.1);
    let dn = d.0.hypot(d.1);
    if depth == 0 || dn <= 15.0 * tol {
        *err_acc += dn / 15.0 + 1e-17 * (b - a);
        return (s2.0 + d.0 / 15.0, s2.1 + d.1 / 15.0);
    }
    let l = simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, err_acc);
    let r = simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, err_acc);
    (l.0 + r.0, l.1 + r.1)
}

/// Adaptive Simpson quadrature of a unimodular oscillatory integrand,
/// pre-split so every initial panel resolves the oscillation.
fn oscillatory_integral(
    f: &dyn Fn(f64) -> (f64, f64),
    a: f64,
    b: f64,
    cycles: f64,
    tol: f64,
) -> ((f64, f64), f64) {
    let panels = ((4.0 * cycles).ceil() as usize).clamp(16, 4096);
    let step = (b - a) / panels as f64;
    let mut total = (0.0, 0.0);
    let mut err = 0.0;
    for i in 0..panels {
        let lo = a + i as f64 * step;
        let hi = lo + step;
        let mid = 0.5 * (lo + hi);
        let (fa, fm, fb) = (f(lo), f(mid), f(hi));
        let whole = simpson_panel(lo, hi, fa, fm, fb);
        let v = simpson_rec(
            f,
            lo,
            hi,
            fa,
            fm,
            fb,
            whole,
            tol / panels as f64,
            24,
            &mut err,
        );
        total.0 += v.0;
        total.1 += v.1;
    }
    (total, err)
}

/// Stationary point of g_r' = nu: the positive root of x(x+r) = tr/(2 pi nu).
fn stationary_point(t: f64, r: i64, nu: i64, p: u32) -> Float {
    let pi = Float::with_val(p, Constant::Pi);
    let rf = Float::with_val(p, r);
    let disc = Float::with_val(p, &rf * &rf)
        + Float::with_val(p, 2.0 * t) * &rf / (pi * Float::with_val(p, nu));
    disc.sqrt() / 2i32 - rf / 2i32
}

/// Main term of the stationary phase expansion at x_nu:
/// e(g(x_nu) - nu x_nu - 1/8) / |g''(x_nu)|^(1/2), plus phase and weight.
fn saddle_term(t: f64, r: i64, nu: i64, p: u32) -> (f64, f64) {
    let phase = PhaseSpec::Differenced { t, r };
    let x = stationary_point(t, r, nu, p);
    let pi2 = Float::with_val(p, Constant::Pi) * 2i32;
    let c = Float::with_val(p, t) / &pi2;

    let g = {
        let d = Float::with_val(p, &x + &Float::with_val(p, r)).ln()
            - x.clone().ln();
        -(c.clone() * d)
    };
    let mut phi = g - Float::with_val(p, nu) * &x;
    phi -= Float::with_val(p, &Rational::from((1, 8)));

    let rf = Float::with_val(p, r);
    let xr = Float::with_val(p, &x + &rf);
    let num = Float::with_val(p, &x * 2i32) + &rf;
    let den = Float::with_val(p, &x * &x) * Float::with_val(p, &xr * &xr);
    let g2 = c * &rf * num / den;
    let w = g2.sqrt().recip();

    let ang = Float::with_val(p, &pi2 * &phi);
    let (s, cgl) = ang.sin_cos(Float::new(p));
    let _ = phase;
    ((cgl * &w).to_f64(), (s * w).to_f64())
}

/// Blanket bound on the MPFR round-to-nearest error of one saddle term.
/// All inputs are exact and the evaluation chain is short, so the true
/// error is orders of magnitude below this.
const SADDLE_TERM_ERR: f64 = 1e-30;

/// Checks one instance of the stationary phase estimate for
/// f(x) = g_r(x) - nu x on [a, b], where nu is an interior value of g_r'.
pub fn check_stationary_phase(
    t: f64,
    a: i64,
    b: i64,
    r: i64,
    nu: i64,
    bits: u32,
) -> Result<CheckResult> {
    let phase = PhaseSpec::Differenced { t, r };
    let nu_enc = Enclosure::from_i64(nu, bits);
    let beta = phase.deriv_abs(1, a, bits)?;
    let alpha = phase.deriv_abs(1, b, bits)?;
    let fp_a = beta.sub(&nu_enc);
    let fp_b = nu_enc.sub(&alpha);
    if !fp_a.is_strictly_positive() || !fp_b.is_strictly_positive() {
        return Err(Error::PreconditionFailed(
            "stationary point must be interior: g'(b) < nu < g'(a)".into(),
        ));
    }

    let env2 = phase.envelope(2, a, b, bits)?;
    let env3 = phase.envelope(3, a, b, bits)?;

    let pi = Enclosure::pi(bits);
    let third = Rational::from((1, 3));
    let two_thirds = Rational::from((2, 3));
    let c_sp = Enclosure::from_i64(2, bits)
        .mul(&Enclosure::from_i64(3, bits).pow_rat(&two_thirds)?)
        .div(&pi.pow_rat(&two_thirds)?)?;
    let h3 = env3.h.mul(&env3.lambda); // upper bound scale for |f'''|
    let main = c_sp
        .mul(&env3.h.pow_rat(&third)?)
        .mul(&env2.lambda.recip()?)
        .mul(&env3.lambda.pow_rat(&third)?);
    let ends = fp_a
        .recip()?
        .add(&fp_b.recip()?)
        .div(&pi)?;
    let rhs = main.add(&ends);
    let _ = h3;

    // Oscillation count: |f'| <= max(beta - nu, nu - alpha) on [a, b].
    let slope = (beta.to_f64_hi() - nu as f64).max(nu as f64 - alpha.to_f64_lo());
    let cycles = slope * (b - a) as f64;
    let f = move |x: f64| integrand(&phase, nu, x);
    let (quad, qerr) = oscillatory_integral(&f, a as f64, b as f64, cycles, 1e-9);

    let (mre, mim) = saddle_term(t, r, nu, bits.max(192));
    let lhs = (quad.0 - mre).hypot(quad.1 - mim);
    // Pointwise integrand noise from f64 phase evaluation.
    let phase_mag = t / (2.0 * std::f64::consts::PI) * (r as f64 / a as f64)
        + nu as f64 * b as f64;
    let pt_err = (b - a) as f64 * (phase_mag + 2.0) * 2f64.powi(-50);
    let lhs_upper = lhs + 10.0 * qerr + pt_err + SADDLE_TERM_ERR;

    Ok(CheckResult::new(
        format!("stationary t={t:.1} a={a} b={b} r={r} nu={nu}"),
        lhs_upper,
        rhs.to_f64_lo() * RHS_F64_GUARD,
    ))
}

/// Outcome of one Poisson-summation (B-process) check: the transform
/// identity itself plus the stationary phase instances at sampled
/// interior frequencies.
#[derive(Debug, Clone, Serialize)]
pub struct BProcessReport {
    pub transform: CheckResult,
    pub stationary: Vec<CheckResult>,
}

/// Checks one instance of the saddle point transform for g_r on (a, b]:
/// the exponential sum equals the transformed sum over integer
/// frequencies in (g'(b), g'(a)] up to the stated explicit error.
pub fn check_b_process(t: f64, a: i64, b: i64, r: i64, bits: u32) -> Result<BProcessReport> {
    if b <= a + 1 {
        return Err(Error::PreconditionFailed(
            "transform range must contain at least two integers".into(),
        ));
    }
    let phase = PhaseSpec::Differenced { t, r };
    let beta = phase.deriv_abs(1, a, bits)?;
    let alpha = phase.deriv_abs(1, b, bits)?;

    let nu_lo = alpha
        .floor_int()?
        .to_i64()
        .ok_or_else(|| Error::SizeExceeded("frequency range start".into()))?
        + 1;
    let nu_hi = beta
        .floor_int()?
        .to_i64()
        .ok_or_else(|| Error::SizeExceeded("frequency range end".into()))?;

    let s = brute_sum(&phase, a, b - a, bits)?;
    let p = bits.max(192);
    let mut tre = 0.0f64;
    let mut tim = 0.0f64;
    let count = (nu_hi - nu_lo + 1).max(0) as f64;
    for nu in nu_lo..=nu_hi {
        let (re, im) = saddle_term(t, r, nu, p);
        tre += re;
        tim += im;
    }
    let lhs = (s.re - tre).hypot(s.im - tim);
    let lhs_upper = lhs + s.err + count * SADDLE_TERM_ERR;

    let env2 = phase.envelope(2, a, b, bits)?;
    let env3 = phase.envelope(3, a, b, bits)?;
    let pi = Enclosure::pi(bits);
    let third = Rational::from((1, 3));
    let two_thirds = Rational::from((2, 3));
    let c_sp = Enclosure::from_i64(2, bits)
        .mul(&Enclosure::from_i64(3, bits).pow_rat(&two_thirds)?)
        .div(&pi.pow_rat(&two_thirds)?)?;

    let t1 = Enclosure::from_rational(&Rational::from((4686, 1000)), bits)
        .div(&env2.lambda.sqrt()?)?;
    let t2 = c_sp
        .mul(&env2.h)
        .mul(&env3.h.pow_rat(&third)?)
        .mul(&Enclosure::from_i64(b - a, bits))
        .mul(&env3.lambda.pow_rat(&third)?);
    let spread = beta
        .sub(&alpha)
        .add(&Enclosure::from_i64(2, bits))
        .ln()?;
    let t3 = Enclosure::from_i64(5, bits).div(&pi)?.mul(&spread);
    let rhs = t1.add(&t2).add(&t3).add(&Enclosure::from_i64(6, bits));

    let transform = CheckResult::new(
        format!("b_process t={t:.1} a={a} b={b} r={r} nus={}", count as i64),
        lhs_upper,
        rhs.to_f64_lo() * RHS_F64_GUARD,
    );

    // Stationary phase spot checks at up to two interior frequencies.
    let mut stationary = Vec::new();
    if nu_hi >= nu_lo {
        let mut picks = vec![nu_lo];
        if nu_hi > nu_lo {
            picks.push(nu_hi);
        }
        for nu in picks {
            let nu_enc = Enclosure::from_i64(nu, bits);
            let interior = beta.sub(&nu_enc).is_strictly_positive()
                && nu_enc.sub(&alpha).is_strictly_positive();
            if interior {
                stationary.push(check_stationary_phase(t, a, b, r, nu, bits)?);
            }
        }
    }

    Ok(BProcessReport {
        transform,
        stationary,
    })
}

/// Certified upper bound for |zeta(1/2 + it)| by the partial-sum estimate
/// 2 |sum_{n <= floor(sqrt(t/2pi))} n^(-1/2-it)| + 1.48 t^(-1/4) + 0.127 t^(-3/4),
/// valid for t >= 200.
pub fn rs_upper(t: f64, digits: u32) -> Result<UpperScalar> {
    if !(t >= 200.0) {
        return Err(Error::PreconditionFailed(
            "partial-sum bound requires t >= 200".into(),
        ));
    }
    let bits = bits_for_digits(digits);
    let two_pi = Enclosure::pi(bits).add(&Enclosure::pi(bits));
    let n_max = Enclosure::from_f64(t, bits)?
        .div(&two_pi)?
        .sqrt()?
        .floor_int()?
        .to_i64()
        .ok_or_else(|| Error::SizeExceeded("partial sum length".into()))?;

    let p = bits.max(160);
    let tf = Float::with_val(p, t);
    let mut re = Float::new(p);
    let mut im = Float::new(p);
    for n in 1..=n_max {
        let lnn = Float::with_val(p, n).ln();
        let ang = Float::with_val(p, &tf * &lnn);
        let (sn, cn) = ang.sin_cos(Float::new(p));
        let w = Float::with_val(p, n).sqrt().recip();
        re += Float::with_val(p, &cn * &w);
        im -= Float::with_val(p, &sn * &w);
    }
    let nf = n_max as f64;
    let err = (nf * (t * (nf + 1.0).ln() + 8.0) * 16.0 + 2.0 * nf * nf + 16.0)
        * 2f64.powi(-(p as i32));

    let abs = Float::with_val(p, re.hypot_ref(&im));
    let t_enc = Enclosure::from_f64(t, bits)?;
    let q14 = t_enc.pow_rat(&Rational::from((-1, 4)))?;
    let q34 = t_enc.pow_rat(&Rational::from((-3, 4)))?;
    let mut total = abs * 2i32;
    total += Float::with_val(p, q14.hi()) * Float::with_val(p, &Rational::from((148, 100)));
    total += Float::with_val(p, q34.hi()) * Float::with_val(p, &Rational::from((127, 1000)));
    total += Float::with_val(p, err * 4.0);
    Ok(UpperScalar {
        value: total,
        direction: Direction::Up,
        precision_digits: digits,
    })
}

/// zeta(1/2 + it) with a certified absolute error bound, computed from the
/// alternating series with two Euler-Maclaurin tails:
///   eta(s) = sum_{n<2M} (-1)^(n-1) n^-s + T(2M) - 2^(1-s) T(M),
///   zeta(s) = eta(s) / (1 - 2^(1-s)),
/// where T(X) = sum_{n>=X} n^-s is evaluated by Euler-Maclaurin with the
/// classical remainder bound.
#[derive(Debug, Clone)]
pub struct ZetaValue {
    pub re: f64,
    pub im: f64,
    /// Certified absolute error of (re, im) as a complex value.
    pub err: f64,
}

impl ZetaValue {
    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

static BERNOULLI: OnceLock<Vec<Rational>> = OnceLock::new();
const EM_MAX_TERMS: usize = 80;

/// B_0 .. B_n by the defining recurrence, exact.
fn bernoulli_upto(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    b.push(Rational::from(1));
    for m in 1..=n {
        let mut acc = Rational::new();
        let mut binom = Integer::from(1); // C(m+1, 0)
        for (j, bj) in b.iter().enumerate().take(m) {
            acc += Rational::from(bj * &binom);
            binom *= (m + 1 - j) as u64;
            binom /= (j + 1) as u64;
        }
        acc /= Rational::from((m as u64 + 1, 1u64));
        b.push(-acc);
    }
    b
}

fn bernoulli(k: usize) -> &'static Rational {
    let table = BERNOULLI.get_or_init(|| bernoulli_upto(2 * EM_MAX_TERMS + 4));
    &table[k]
}

/// T(X) = sum_{n >= X} n^-s by Euler-Maclaurin, with a certified
/// remainder bound. Returns (value, remainder_bound).
fn em_tail(x: u64, t: f64, p: u32, tol: f64) -> Result<(Complex, f64)> {
    let xf = Float::with_val(p, x);
    let lnx = xf.clone().ln();
    // X^-s = exp(-s ln X), s = 1/2 + it.
    let xms = Complex::with_val(
        p,
        (
            Float::with_val(p, &lnx / &Float::with_val(p, -2)),
            Float::with_val(p, &lnx * &Float::with_val(p, -t)),
        ),
    )
    .exp();
    let s_minus_1 = Complex::with_val(p, (-0.5, t));

    // X^(1-s)/(s-1) + X^-s/2.
    let mut tail = Complex::with_val(p, &xms * &xf);
    tail /= &s_minus_1;
    let mut half = xms.clone();
    half /= 2i32;
    tail += &half;

    // Correction series: B_2k/(2k)! (s)_{2k-1} X^(-s-2k+1).
    let xr = Float::with_val(p, xf.recip_ref());
    let xr2 = Float::with_val(p, &xr * &xr);
    let mut poch = Complex::with_val(p, (0.5, t)); // (s)_1
    let mut xpow = xr.clone(); // X^-(2k-1)
    let mut k = 1usize;
    loop {
        let bfac = {
            let mut f = Integer::from(1u32);
            for j in 2..=2 * k {
                f *= j as u64;
            }
            let q = Rational::from(bernoulli(2 * k) / &Rational::from(f));
            Float::with_val(p, &q)
        };
        let mut term = Complex::with_val(p, &poch * &xms);
        term *= &xpow;
        term *= &bfac;
        tail += &term;

        // Advance to (s)_{2k+1} and X^-(2k+1), then bound the remainder by
        // the classical comparison with the first omitted term.
        let f1 = Complex::with_val(p, (0.5 + 2.0 * k as f64 - 1.0, t));
        let f2 = Complex::with_val(p, (0.5 + 2.0 * k as f64, t));
        poch *= &f1;
        poch *= &f2;
        xpow *= &xr2;

        let kn = k + 1;
        let next_fac = {
            let mut f = Integer::from(1u32);
            for j in 2..=2 * kn {
                f *= j as u64;
            }
            let q = Rational::from(bernoulli(2 * kn) / &Rational::from(f));
            Float::with_val(64, &q).abs()
        };
        // |(s)_{2k+1}| grows like t^(2k+1) and X^-(2k+1) shrinks in step,
        // so the remainder product must stay in MPFR; f64 overflows first.
        let poch_mag = Float::with_val(64, poch.real().hypot_ref(poch.imag()));
        let mut next_mag = next_fac;
        next_mag *= &poch_mag;
        next_mag *= &xpow;
        next_mag /= Float::with_val(64, x).sqrt();
        let ratio = (0.5 + 2.0 * kn as f64 + 1.0).hypot(t) / (0.5 + 2.0 * kn as f64 + 1.0);
        next_mag *= ratio;
        next_mag *= 1.000_000_000_001_f64; // absorbs nearest-rounding slack
        if next_mag <= tol {
            return Ok((tail, next_mag.to_f64()));
        }
        k += 1;
        if k > EM_MAX_TERMS {
            return Err(Error::ConvergenceFailure(format!(
                "Euler-Maclaurin tail at X={x} not below {tol:.1e} after {EM_MAX_TERMS} terms"
            )));
        }
    }
}

/// Above this t the alternating head runs in f64 with double-double phase
/// tracking; below it, fully in MPFR.
const FAST_HEAD_THRESHOLD: f64 = 2.0e5;

const TAU_HI: f64 = 6.283_185_307_179_586;
const TAU_LO: f64 = 2.449_293_598_294_706_4e-16;

fn kahan_add(sum: &mut f64, comp: &mut f64, x: f64) {
    let y = x - *comp;
    let v = *sum + y;
    *comp = (v - *sum) - y;
    *sum = v;
}

fn refreshed_ln(n: u64) -> (f64, f64) {
    let l = Float::with_val(96, n).ln();
    let hi = l.to_f64();
    let lo = Float::with_val(96, &l - &Float::with_val(96, hi)).to_f64();
    (hi, lo)
}

/// Alternating head sum_{n < 2m} (-1)^(n-1) n^(-1/2 - it) in f64. The phase
/// t ln n needs ~84 bits, so ln n is carried as a double-double, refreshed
/// from MPFR every step below n = 4096 and every 64 steps after; reduction
/// mod 2pi is Cody-Waite with fused multiply-adds. Returns the sum and an
/// absolute error bound accumulated per term.
fn fast_alternating_head(t: f64, m: u64, p: u32) -> (Complex, f64) {
    let (mut lhi, mut llo) = (0.0f64, 0.0f64);
    let mut last = 1u64;
    let (mut re, mut rec) = (0.0f64, 0.0f64);
    let (mut im, mut imc) = (0.0f64, 0.0f64);
    let mut err = 0.0f64;
    for n in 1..2 * m {
        if n > 1 {
            let gap = if n < 4096 { 1 } else { 64 };
            if n - last >= gap {
                let (h, l) = refreshed_ln(n);
                lhi = h;
                llo = l;
                last = n;
            } else {
                // ln n = ln(n-1) + ln1p(1/(n-1)); fast-two-sum is valid
                // because lhi >= ln 4096 dominates the increment.
                let inc = (1.0 / (n - 1) as f64).ln_1p();
                let s = lhi + inc;
                let z = s - lhi;
                let e = (lhi - (s - z)) + (inc - z);
                llo += e;
                let s2 = s + llo;
                llo -= s2 - s;
                lhi = s2;
            }
        }
        let p1 = t * lhi;
        let p1e = t.mul_add(lhi, -p1);
        let p2 = t * llo;
        let k = (p1 / TAU_HI).round();
        let m1 = k * TAU_HI;
        let m1e = k.mul_add(TAU_HI, -m1);
        let theta = (p1 - m1) + ((p1e + p2) - (m1e + k * TAU_LO));
        let w = (n as f64).sqrt().recip();
        let (sn, cn) = theta.sin_cos();
        if n % 2 == 1 {
            kahan_add(&mut re, &mut rec, cn * w);
            kahan_add(&mut im, &mut imc, -sn * w);
        } else {
            kahan_add(&mut re, &mut rec, -cn * w);
            kahan_add(&mut im, &mut imc, sn * w);
        }
        err += w * (t * 1.2e-16 * ((n - last) as f64) / (last as f64) + 6e-16);
    }
    (Complex::with_val(p, (re, im)), err)
}

/// Independent evaluation of zeta(1/2 + it) for t > 0.
pub fn zeta_half_line(t: f64, bits: u32) -> Result<ZetaValue> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::PreconditionFailed(
            "zeta oracle requires finite t > 0".into(),
        ));
    }
    let p = bits.max(128);
    let m = ((0.207 * t).ceil() as u64).max(48);
    let tol = 1e-14;

    let (head, head_err) = if t <= FAST_HEAD_THRESHOLD {
        let tf = Float::with_val(p, t);
        let mut re = Float::new(p);
        let mut im = Float::new(p);
        for n in 1..2 * m {
            let lnn = Float::with_val(p, n).ln();
            let ang = Float::with_val(p, &tf * &lnn);
            let (sn, cn) = ang.sin_cos(Float::new(p));
            let w = Float::with_val(p, n).sqrt().recip();
            if n % 2 == 1 {
                re += Float::with_val(p, &cn * &w);
                im -= Float::with_val(p, &sn * &w);
            } else {
                re -= Float::with_val(p, &cn * &w);
                im += Float::with_val(p, &sn * &w);
            }
        }
        let head_terms = (2 * m) as f64;
        let round_err = head_terms * (t * head_terms.ln() + 8.0) * 2f64.powi(4 - p as i32);
        (Complex::with_val(p, (re, im)), round_err)
    } else {
        fast_alternating_head(t, m, p)
    };

    let (tail_2m, r2m) = em_tail(2 * m, t, p, tol)?;
    let (tail_m, rm) = em_tail(m, t, p, tol)?;

    // 2^(1-s) = exp((1/2 - it) log 2).
    let ln2 = Float::with_val(p, Constant::Log2);
    let two_1ms = Complex::with_val(
        p,
        (
            Float::with_val(p, &ln2 / &Float::with_val(p, 2)),
            Float::with_val(p, &ln2 * &Float::with_val(p, -t)),
        ),
    )
    .exp();
    let two_mag = two_1ms.real().to_f64().hypot(two_1ms.imag().to_f64());

    let mut eta = head;
    eta += &tail_2m;
    let mut sub = Complex::with_val(p, &two_1ms * &tail_m);
    eta -= &sub;
    sub = Complex::with_val(p, 1);
    sub -= &two_1ms;
    let denom_mag = sub.real().to_f64().hypot(sub.imag().to_f64());
    if denom_mag < 0.4142 {
        return Err(Error::InvariantViolation(format!(
            "|1 - 2^(1-s)| = {denom_mag} below the sqrt(2)-1 floor"
        )));
    }
    let zeta = Complex::with_val(p, &eta / &sub);

    let err = (r2m + two_mag * rm + head_err) / denom_mag;
    Ok(ZetaValue {
        re: zeta.real().to_f64(),
        im: zeta.imag().to_f64(),
        err,
    })
}

/// Riemann-Siegel theta, asymptotic form; ample for locating low zeros.
fn rs_theta(t: f64) -> f64 {
    let half = t / 2.0;
    half * (t / (2.0 * std::f64::consts::PI)).ln() - half - std::f64::consts::PI / 8.0
        + 1.0 / (48.0 * t)
        + 7.0 / (5760.0 * t.powi(3))
}

/// Hardy Z at t: real, with the same zeros as zeta on the critical line.
fn hardy_z(t: f64, bits: u32) -> Result<f64> {
    let z = zeta_half_line(t, bits)?;
    let th = rs_theta(t);
    Ok(th.cos() * z.re - th.sin() * z.im)
}

/// Locates the first critical-line zero by sign bisection of Hardy Z.
pub fn first_zero(bits: u32) -> Result<f64> {
    let mut lo = 14.0;
    let mut hi = 14.25;
    let zlo = hardy_z(lo, bits)?;
    let zhi = hardy_z(hi, bits)?;
    if zlo * zhi >= 0.0 {
        return Err(Error::InvariantViolation(
            "Hardy Z does not change sign on [14, 14.25]".into(),
        ));
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        let zm = hardy_z(mid, bits)?;
        if (zm > 0.0) == (zlo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    let modulus = zeta_half_line(root, bits)?.abs();
    if modulus > 1e-4 {
        return Err(Error::InvariantViolation(format!(
            "|zeta| = {modulus:.2e} at the located zero"
        )));
    }
    Ok(root)
}

/// Aggregated outcome of the randomized lemma verification suite.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaSuite {
    pub weyl: Vec<CheckResult>,
    pub kth: Vec<CheckResult>,
    pub stationary: Vec<CheckResult>,
    pub b_process: Vec<CheckResult>,
    /// Stationary phase instances exercised inside transform checks.
    pub b_process_stationary: Vec<CheckResult>,
}

impl LemmaSuite {
    pub fn all(&self) -> impl Iterator<Item = &CheckResult> {
        self.weyl
            .iter()
            .chain(&self.kth)
            .chain(&self.stationary)
            .chain(&self.b_process)
            .chain(&self.b_process_stationary)
    }

    pub fn total(&self) -> usize {
        self.all().count()
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.all().filter(|c| !c.pass).collect()
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Distance to the nearest integer.
fn int_dist(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Runs `trials` randomized instances of every checked inequality.
/// Deterministic for a fixed seed.
pub fn run_lemma_suite(trials: u32, seed: u64, bits: u32) -> Result<LemmaSuite> {
    let mut weyl = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    for _ in 0..trials {
        let t = log_uniform(&mut rng, 1e3, 1e6);
        let a = rng.gen_range(50..=2000i64);
        let n = rng.gen_range(64..=1500i64);
        let q = rng.gen_range(1..=n.min(20));
        weyl.push(check_weyl(t, a, n, q, bits)?);
    }

    let mut kth = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    for i in 0..trials {
        let t = log_uniform(&mut rng, 1e3, 1e6);
        let a = rng.gen_range(100..=3000i64);
        let n = rng.gen_range(50..=2000i64);
        let eta = rng.gen_range(0.05..4.0);
        let k = [3u32, 4, 5][(i % 3) as usize];
        kth.push(check_kth_test(
            &PhaseSpec::LogZeta { t },
            a,
            n,
            k,
            eta,
            bits,
        )?);
    }

    let mut stationary = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    for _ in 0..trials {
        let a = rng.gen_range(80..=400i64);
        let w = rng.gen_range(10..=40i64);
        let r = rng.gen_range(2..=10i64);
        let nu = rng.gen_range(1..=8i64);
        let b = a + w;
        // Choose t so that g'(x) = nu at the window midpoint, putting the
        // stationary point safely interior.
        let xs = a as f64 + w as f64 / 2.0;
        let t = (2.0 * std::f64::consts::PI * nu as f64 * xs * (xs + r as f64) / r as f64)
            .round();
        stationary.push(check_stationary_phase(t, a, b, r, nu, bits)?);
    }

    let mut b_process = Vec::new();
    let mut b_process_stationary = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
    for _ in 0..trials {
        let (t, a, b, r) = loop {
            let t = log_uniform(&mut rng, 1e4, 1e6);
            let a = rng.gen_range(300..=1500i64);
            let w = rng.gen_range(10..=60i64);
            let r = rng.gen_range(1..=12i64);
            let b = a + w;
            let c = t / (2.0 * std::f64::consts::PI) * r as f64;
            let beta = c / (a as f64 * (a + r) as f64);
            let alpha = c / (b as f64 * (b + r) as f64);
            if int_dist(alpha) > 1e-6 && int_dist(beta) > 1e-6 {
                break (t, a, b, r);
            }
        };
        let rep = check_b_process(t, a, b, r, bits)?;
        b_process.push(rep.transform);
        b_process_stationary.extend(rep.stationary);
    }

    Ok(LemmaSuite {
        weyl,
        kth,
        stationary,
        b_process,
        b_process_stationary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEST_BITS: u32 = 160;

    #[test]
    fn brute_sum_matches_direct_f64() {
        let phase = PhaseSpec::LogZeta { t: 1000.0 };
        let s = brute_sum(&phase, 50, 30, TEST_BITS).unwrap();
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for x in 51..=80i64 {
            let ang = -1000.0 * (x as f64).ln();
            re += ang.cos();
            im += ang.sin();
        }
        assert!((s.re - re).abs() < 1e-9, "{} vs {re}", s.re);
        assert!((s.im - im).abs() < 1e-9, "{} vs {im}", s.im);
        assert!(s.max_abs >= s.abs);
        assert!(s.err < 1e-30);
    }

    #[test]
    fn logzeta_envelope_matches_closed_form() {
        let phase = PhaseSpec::LogZeta { t: 50000.0 };
        let env = phase.envelope(3, 100, 400, TEST_BITS).unwrap();
        let lam = 50000.0 / (2.0 * std::f64::consts::PI) * 2.0 / 400f64.powi(3);
        let h = 4f64.powi(3);
        assert!((env.lambda.to_f64_lo() / lam - 1.0).abs() < 1e-12);
        assert!((env.h.to_f64_hi() / h - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zeta_oracle_matches_reference_values() {
        let z3 = zeta_half_line(3.0, TEST_BITS).unwrap();
        assert!(z3.err < 1e-10);
        assert!(
            (z3.abs() - 0.5385471385417072).abs() < 1e-10,
            "|zeta(1/2+3i)| = {}",
            z3.abs()
        );
        let z1000 = zeta_half_line(1000.0, TEST_BITS).unwrap();
        assert!(
            (z1000.abs() - 0.9977946375215866).abs() < 1e-9,
            "|zeta(1/2+1000i)| = {}",
            z1000.abs()
        );
    }

    // t = 1e5 stays on the MPFR head, t = 1e6 exercises the f64 fast head;
    // both must agree with the 220-digit reference to well under its err.
    #[test]
    fn zeta_oracle_fast_head_matches_reference_values() {
        let z5 = zeta_half_line(1.0e5, TEST_BITS).unwrap();
        assert!(
            (z5.abs() - 5.879592468681765).abs() < 1e-8,
            "|zeta(1/2+1e5 i)| = {}",
            z5.abs()
        );
        let z6 = zeta_half_line(1.0e6, TEST_BITS).unwrap();
        assert!(z6.err < 1e-6, "fast head err = {}", z6.err);
        assert!(
            (z6.abs() - 2.806133878430698).abs() < 1e-7,
            "|zeta(1/2+1e6 i)| = {} err {}",
            z6.abs(),
            z6.err
        );
    }

    #[test]
    fn zeta_oracle_vanishes_at_first_zero() {
        let z = zeta_half_line(14.134725141734693, TEST_BITS).unwrap();
        assert!(z.abs() < 1e-10, "|zeta| = {}", z.abs());
    }

    #[test]
    fn first_zero_location() {
        let root = first_zero(TEST_BITS).unwrap();
        assert!(
            (root - 14.134725141734693).abs() < 1e-6,
            "first zero at {root}"
        );
    }

    #[test]
    fn partial_sum_bound_reference_value() {
        let rs = rs_upper(1000.0, 48).unwrap();
        let v = rs.to_f64();
        assert!(
            (v - 1.5583539801323273).abs() < 1e-9,
            "bound at t=1000 is {v}"
        );
        let z = zeta_half_line(1000.0, TEST_BITS).unwrap();
        assert!(v >= z.abs() - z.err);
    }

    #[test]
    fn weyl_instance_passes() {
        let c = check_weyl(12345.6, 100, 256, 8, TEST_BITS).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn kth_test_instances_pass() {
        for (k, eta) in [(3u32, 1.0f64), (4, 0.5), (5, 2.0)] {
            let c = check_kth_test(
                &PhaseSpec::LogZeta { t: 250000.0 },
                500,
                800,
                k,
                eta,
                TEST_BITS,
            )
            .unwrap();
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn stationary_phase_instance_passes() {
        // g' = 3 at the midpoint of [200, 220].
        let t = (2.0 * std::f64::consts::PI * 3.0 * 210.0 * 215.0 / 5.0).round();
        let c = check_stationary_phase(t, 200, 220, 5, 3, TEST_BITS).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn b_process_instance_passes() {
        let rep = check_b_process(1.0e6, 300, 360, 12, TEST_BITS).unwrap();
        assert!(rep.transform.pass, "{:?}", rep.transform);
        assert!(!rep.stationary.is_empty());
        for c in &rep.stationary {
            assert!(c.pass, "{c:?}");
        }
    }

    #[test]
    fn suite_is_deterministic_and_clean() {
        let s1 = run_lemma_suite(2, 7, TEST_BITS).unwrap();
        let s2 = run_lemma_suite(2, 7, TEST_BITS).unwrap();
        assert_eq!(s1.total(), s2.total());
        for (a, b) in s1.all().zip(s2.all()) {
            assert_eq!(a.label, b.label);
            assert_eq!(a.lhs_upper, b.lhs_upper);
            assert_eq!(a.pass, b.pass);
        }
        assert!(s1.failures().is_empty());
    }
}
