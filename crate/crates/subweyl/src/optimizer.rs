//! Deterministic parameter search, scheme construction, and crossover
//! location against reference bounds.
//!
//! The search is a seeded differential evolution over log-transformed
//! parameters. Objectives are certified upper bounds (never midpoints), so
//! the optimizer can only ever return a row whose constant is proven.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Rational;

use crate::pipeline::{
    admissibility, assemble_certified, rational_from_decimal, CoefficientReport, ParamSet,
    PipelineConfig,
};
use crate::rigor::UpperScalar;
use crate::{Error, Result};

/// One certified row of a piecewise scheme.
#[derive(Debug, Clone)]
pub struct SchemeRow {
    pub params: ParamSet,
    pub a: UpperScalar,
}

impl SchemeRow {
    pub fn a_f64(&self) -> f64 {
        self.a.to_f64()
    }
}

/// A piecewise-constant certified bound: consecutive rows tile
/// [t_start, infinity), the last row having no right endpoint.
#[derive(Debug, Clone)]
pub struct Scheme {
    pub rows: Vec<SchemeRow>,
}

impl Scheme {
    pub fn start_log(&self) -> &Rational {
        &self.rows[0].params.log_t0
    }

    /// Largest row constant; the scheme certifies this globally.
    pub fn global_a(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.a_f64())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn row_covering(&self, log_t: f64) -> Option<&SchemeRow> {
        for r in &self.rows {
            let lo = r.params.log_t0.to_f64();
            match &r.params.log_t1 {
                Some(l1) => {
                    if log_t >= lo && log_t < l1.to_f64() {
                        return Some(r);
                    }
                }
                None => {
                    if log_t >= lo {
                        return Some(r);
                    }
                }
            }
        }
        None
    }

    /// Structural validation: nonempty, contiguous tiling, strict widths,
    /// infinite final row, every row admissible.
    pub fn validate(&self, pcfg: &PipelineConfig) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::InvariantViolation("scheme has no rows".into()));
        }
        for (i, r) in self.rows.iter().enumerate() {
            let last = i + 1 == self.rows.len();
            match (&r.params.log_t1, last) {
                (None, false) => {
                    return Err(Error::InvariantViolation(format!(
                        "row {i} is unbounded but not last"
                    )))
                }
                (Some(l1), _) => {
                    if *l1 <= r.params.log_t0 {
                        return Err(Error::InvariantViolation(format!(
                            "row {i} is degenerate: log range [{}, {}]",
                            r.params.log_t0, l1
                        )));
                    }
                    if last {
                        return Err(Error::InvariantViolation(
                            "final row must extend to infinity".into(),
                        ));
                    }
                }
                (None, true) => {}
            }
            if i + 1 < self.rows.len()
                && r.params.log_t1.as_ref() != Some(&self.rows[i + 1].params.log_t0)
            {
                return Err(Error::InvariantViolation(format!(
                    "rows {i} and {} do not tile contiguously",
                    i + 1
                )));
            }
            admissibility(&r.params, pcfg)?;
        }
        Ok(())
    }

    /// Re-certifies every row from scratch, returning the full reports.
    pub fn certify(&self, pcfg: &PipelineConfig) -> Result<Vec<CoefficientReport>> {
        self.validate(pcfg)?;
        let mut out = Vec::with_capacity(self.rows.len());
        for r in &self.rows {
            out.push(assemble_certified(&r.params, pcfg)?);
        }
        Ok(out)
    }
}

/// Search configuration. `budget` caps certified objective evaluations.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub budget: u64,
    pub seed: u64,
    pub population: usize,
    pub stall_generations: u32,
    /// Decimal digits used for objective evaluations during the search;
    /// champions are re-certified at the pipeline precision.
    pub objective_digits: u32,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 20_000,
            seed: 1,
            population: 24,
            stall_generations: 40,
            objective_digits: 30,
        }
    }
}

/// Box constraints in search coordinates
/// [ln(h1-1), ln(h2-1), ln eta1, ln eta2, ln th1, ln th2, ln th3].
#[derive(Debug, Clone)]
pub struct SearchBox {
    pub lo: [f64; 7],
    pub hi: [f64; 7],
}

impl SearchBox {
    /// Scale-aware default: the top block boundary theta2 t^(7/17) must sit
    /// below sqrt(t/2pi), which caps useful theta2 near t0^(3/34).
    pub fn default_for(log_t0: f64) -> SearchBox {
        let th2_hi = (3.0 * log_t0 / 34.0 + 5.0).min(38.0);
        SearchBox {
            lo: [-9.0, -9.0, -3.0, -3.0, -3.0, -1.0, -28.0],
            hi: [0.45, 0.45, 2.0, 2.0, 3.0, th2_hi, 6.0],
        }
    }

    fn clamp(&self, v: &mut [f64; 7]) {
        for i in 0..7 {
            v[i] = v[i].clamp(self.lo[i], self.hi[i]);
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> [f64; 7] {
        let mut v = [0.0; 7];
        for i in 0..7 {
            v[i] = rng.gen_range(self.lo[i]..self.hi[i]);
        }
        v
    }
}

fn decode(v: &[f64; 7], log_t0: &Rational, log_t1: Option<&Rational>) -> Option<ParamSet> {
    let r = |x: f64| Rational::from_f64(x);
    Some(ParamSet {
        log_t0: log_t0.clone(),
        log_t1: log_t1.cloned(),
        h1: r(1.0 + v[0].exp())?,
        h2: r(1.0 + v[1].exp())?,
        eta1: r(v[2].exp())?,
        eta2: r(v[3].exp())?,
        theta1: r(v[4].exp())?,
        theta2: r(v[5].exp())?,
        theta3: r(v[6].exp())?,
    })
}

fn encode(p: &ParamSet) -> [f64; 7] {
    [
        (p.h1.to_f64() - 1.0).max(1e-12).ln(),
        (p.h2.to_f64() - 1.0).max(1e-12).ln(),
        p.eta1.to_f64().ln(),
        p.eta2.to_f64().ln(),
        p.theta1.to_f64().ln(),
        p.theta2.to_f64().ln(),
        p.theta3.to_f64().ln(),
    ]
}

/// Known-good tail parameters used to warm-start unbounded intervals.
fn tail_seed(log_t0: &Rational) -> ParamSet {
    ParamSet {
        log_t0: log_t0.clone(),
        log_t1: None,
        h1: rational_from_decimal("1.01563").unwrap(),
        h2: rational_from_decimal("1.00270").unwrap(),
        eta1: rational_from_decimal("1.59875").unwrap(),
        eta2: rational_from_decimal("0.828895").unwrap(),
        theta1: rational_from_decimal("1.14283").unwrap(),
        theta2: rational_from_decimal("261658").unwrap(),
        theta3: rational_from_decimal("2.53087e-11").unwrap(),
    }
}

/// Rounds an f64 to `sig` significant decimal digits as an exact rational.
fn round_sig(x: f64, sig: usize) -> Result<Rational> {
    rational_from_decimal(&format!("{:.*e}", sig.saturating_sub(1), x))
}

struct Objective<'a> {
    log_t0: &'a Rational,
    log_t1: Option<&'a Rational>,
    pcfg: PipelineConfig,
    evals: u64,
    budget: u64,
}

impl<'a> Objective<'a> {
    fn eval(&mut self, v: &[f64; 7]) -> f64 {
        if self.evals >= self.budget {
            return f64::INFINITY;
        }
        self.evals += 1;
        let Some(p) = decode(v, self.log_t0, self.log_t1) else {
            return f64::INFINITY;
        };
        match assemble_certified(&p, &self.pcfg) {
            Ok(rep) => {
                let a = rep.a_total.to_f64();
                if a.is_finite() {
                    a
                } else {
                    f64::INFINITY
                }
            }
            Err(_) => f64::INFINITY,
        }
    }
}

/// Differential evolution over one interval. Returns the certified row and
/// the number of objective evaluations consumed.
pub fn optimize_interval(
    log_t0: &Rational,
    log_t1: Option<&Rational>,
    warm: &[ParamSet],
    scfg: &SearchConfig,
    pcfg: &PipelineConfig,
) -> Result<(SchemeRow, u64)> {
    let bx = SearchBox::default_for(log_t0.to_f64());
    let mut rng = ChaCha8Rng::seed_from_u64(scfg.seed);
    let np = scfg.population.max(6);
    let mut obj = Objective {
        log_t0,
        log_t1,
        pcfg: PipelineConfig {
            digits: scfg.objective_digits,
            h3: pcfg.h3,
            h0: pcfg.h0,
        },
        evals: 0,
        budget: scfg.budget.max(1),
    };

    // Population: known-good tail parameters first (for unbounded
    // intervals), then caller-provided warm starts, then random samples.
    let mut pop: Vec<[f64; 7]> = Vec::with_capacity(np);
    if log_t1.is_none() {
        let mut v = encode(&tail_seed(log_t0));
        bx.clamp(&mut v);
        pop.push(v);
    }
    for w in warm {
        if pop.len() >= np {
            break;
        }
        let mut v = encode(w);
        bx.clamp(&mut v);
        pop.push(v);
    }
    while pop.len() < np {
        pop.push(bx.sample(&mut rng));
    }
    let mut score: Vec<f64> = pop.iter().map(|v| obj.eval(v)).collect();

    let mut best = 0usize;
    for i in 1..np {
        if score[i] < score[best] {
            best = i;
        }
    }

    let (f, cr) = (0.7, 0.9);
    let mut stall = 0u32;
    while obj.evals < obj.budget && stall < scfg.stall_generations {
        let mut improved = false;
        for i in 0..np {
            if obj.evals >= obj.budget {
                break;
            }
            let mut r1 = rng.gen_range(0..np);
            while r1 == i {
                r1 = rng.gen_range(0..np);
            }
            let mut r2 = rng.gen_range(0..np);
            while r2 == i || r2 == r1 {
                r2 = rng.gen_range(0..np);
            }
            let jr = rng.gen_range(0..7);
            let mut cand = pop[i];
            for j in 0..7 {
                if j == jr || rng.gen::<f64>() < cr {
                    cand[j] = pop[best][j] + f * (pop[r1][j] - pop[r2][j]);
                }
            }
            bx.clamp(&mut cand);
            let s = obj.eval(&cand);
            if s < score[i] {
                pop[i] = cand;
                score[i] = s;
                if s < score[best] {
                    best = i;
                    improved = true;
                }
            }
        }
        stall = if improved { 0 } else { stall + 1 };
    }

    if !score[best].is_finite() {
        return Err(Error::NoAdmissiblePoint);
    }

    // Certify the champion at full precision, then try to simplify its
    // decimals without giving up more than 0.1% of the constant.
    let raw = decode(&pop[best], log_t0, log_t1).ok_or(Error::NoAdmissiblePoint)?;
    let raw_rep = assemble_certified(&raw, pcfg)?;
    let raw_a = raw_rep.a_total.to_f64();
    for sig in [6usize, 9, 12] {
        let rounded = (|| -> Result<ParamSet> {
            Ok(ParamSet {
                log_t0: log_t0.clone(),
                log_t1: log_t1.cloned(),
                h1: round_sig(raw.h1.to_f64(), sig)?,
                h2: round_sig(raw.h2.to_f64(), sig)?,
                eta1: round_sig(raw.eta1.to_f64(), sig)?,
                eta2: round_sig(raw.eta2.to_f64(), sig)?,
                theta1: round_sig(raw.theta1.to_f64(), sig)?,
                theta2: round_sig(raw.theta2.to_f64(), sig)?,
                theta3: round_sig(raw.theta3.to_f64(), sig)?,
            })
        })();
        let Ok(rp) = rounded else { continue };
        if let Ok(rep) = assemble_certified(&rp, pcfg) {
            let a = rep.a_total.to_f64();
            if a <= raw_a * 1.001 {
                return Ok((
                    SchemeRow {
                        params: rp,
                        a: rep.a_total,
                    },
                    obj.evals,
                ));
            }
        }
    }
    Ok((
        SchemeRow {
            params: raw,
            a: raw_rep.a_total,
        },
        obj.evals,
    ))
}

/// Breakpoint policy for scheme construction.
#[derive(Debug, Clone)]
pub enum Breakpoints {
    /// Geometric seeding from the start, splitting rows that certify far
    /// above their neighbors or the tail.
    Auto,
    /// Explicit interior log-t breakpoints; the final entry starts the
    /// unbounded tail row.
    Explicit(Vec<Rational>),
}

/// Log-t start of the unbounded tail row used by automatic seeding.
const AUTO_TAIL_START: i64 = 875;
const MAX_ROWS: usize = 48;

/// Builds a certified piecewise scheme covering [exp(log start), infinity).
pub fn build_scheme(
    t_start_log: &Rational,
    bp: &Breakpoints,
    scfg: &SearchConfig,
    pcfg: &PipelineConfig,
) -> Result<Scheme> {
    let cuts: Vec<Rational> = match bp {
        Breakpoints::Explicit(inner) => {
            let mut v = vec![t_start_log.clone()];
            for c in inner {
                if *c <= *v.last().unwrap() {
                    return Err(Error::PreconditionFailed(
                        "breakpoints must increase strictly from the start".into(),
                    ));
                }
                v.push(c.clone());
            }
            v
        }
        Breakpoints::Auto => {
            let mut v = vec![t_start_log.clone()];
            let tail = Rational::from(AUTO_TAIL_START);
            let mut w = Rational::from((1, 2));
            while *v.last().unwrap() < tail {
                let next = v.last().unwrap().clone() + w.clone();
                if next >= tail {
                    break;
                }
                v.push(next);
                w *= Rational::from((8, 5));
            }
            if *t_start_log < tail {
                v.push(tail);
            }
            v
        }
    };
    if cuts.len() > MAX_ROWS {
        return Err(Error::SizeExceeded(format!(
            "{} breakpoints exceed the {MAX_ROWS}-row cap",
            cuts.len()
        )));
    }

    let n_rows = cuts.len(); // finite rows = n-1, plus the tail
    let per_row = (scfg.budget / (n_rows as u64 + 4)).max(1);
    let mut spent = 0u64;
    let row_cfg = |seed_offset: u64, budget: u64| SearchConfig {
        budget,
        seed: scfg.seed.wrapping_add(seed_offset),
        ..scfg.clone()
    };

    // Tail first: its constant anchors the refinement rule.
    let tail_start = cuts.last().unwrap().clone();
    let (tail_row, used) =
        optimize_interval(&tail_start, None, &[], &row_cfg(0, per_row), pcfg)?;
    spent += used;
    let tail_a = tail_row.a_f64();

    let mut rows: Vec<SchemeRow> = Vec::new();
    let mut warm: Vec<ParamSet> = Vec::new();
    for i in 0..cuts.len() - 1 {
        let budget = per_row.min(scfg.budget.saturating_sub(spent).max(1));
        let (row, used) = optimize_interval(
            &cuts[i],
            Some(&cuts[i + 1]),
            &warm,
            &row_cfg(1 + i as u64, budget),
            pcfg,
        )?;
        spent += used;
        warm = vec![row.params.clone()];
        rows.push(row);
    }

    // Refinement: split the worst finite row certifying above 1.05x the
    // tail constant; once every row sits within that band, split the higher
    // side of any remaining large adjacent jump. Worst offender first, so
    // wide late rows cannot starve behind small early jumps.
    if matches!(bp, Breakpoints::Auto) {
        let min_split_width = Rational::from((1, 2)); // children stay >= 1/4
        let mut pass = 0;
        while pass < 40 && rows.len() + 1 < MAX_ROWS && spent < scfg.budget {
            pass += 1;
            let splittable = |row: &SchemeRow| {
                row.params
                    .log_t1
                    .as_ref()
                    .map(|l1| Rational::from(l1 - &row.params.log_t0) >= min_split_width)
                    == Some(true)
            };
            let mut split_at: Option<(usize, f64)> = None;
            for (i, row) in rows.iter().enumerate() {
                let a_i = row.a_f64();
                if splittable(row)
                    && a_i > 1.05 * tail_a
                    && split_at.map(|(_, worst)| a_i > worst).unwrap_or(true)
                {
                    split_at = Some((i, a_i));
                }
            }
            if split_at.is_none() {
                for i in 0..rows.len().saturating_sub(1) {
                    let (a_i, a_n) = (rows[i].a_f64(), rows[i + 1].a_f64());
                    if (a_i - a_n).abs() / a_i.min(a_n) <= 0.10 {
                        continue;
                    }
                    let j = if a_i > a_n { i } else { i + 1 };
                    let a_j = rows[j].a_f64();
                    if splittable(&rows[j])
                        && split_at.map(|(_, worst)| a_j > worst).unwrap_or(true)
                    {
                        split_at = Some((j, a_j));
                    }
                }
            }
            let Some((i, _)) = split_at else { break };
            if rows[i].params.log_t1.is_none() {
                break;
            }
            let lo = rows[i].params.log_t0.clone();
            let hi = rows[i].params.log_t1.clone().unwrap();
            let mid = Rational::from(&lo + &hi) / Rational::from(2);
            let budget_left = scfg.budget.saturating_sub(spent).max(2);
            let warm_i = vec![rows[i].params.clone()];
            let (left, u1) = optimize_interval(
                &lo,
                Some(&mid),
                &warm_i,
                &row_cfg(1000 + 2 * i as u64, (budget_left / 2).max(1)),
                pcfg,
            )?;
            spent += u1;
            let (right, u2) = optimize_interval(
                &mid,
                Some(&hi),
                &warm_i,
                &row_cfg(1001 + 2 * i as u64, (budget_left / 2).max(1)),
                pcfg,
            )?;
            spent += u2;
            rows.splice(i..=i, [left, right]);
        }
    }

    rows.push(tail_row);
    let scheme = Scheme { rows };
    scheme.validate(pcfg)?;
    Ok(scheme)
}

/// Reference bounds to compare against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparator {
    /// 0.618 t^(1/6) log t, valid for t >= 3.
    Vdc0618,
    /// 0.478013 t^(1/6) log t + 3.853165 t^(1/6) - 2.914229, t >= 10^12.
    Hpy2022,
    /// 307.098 t^(27/164), valid for t >= 3.
    Patel307,
}

impl Comparator {
    pub fn parse(s: &str) -> Result<Comparator> {
        match s {
            "vdc_0618" => Ok(Comparator::Vdc0618),
            "hpy_2022" => Ok(Comparator::Hpy2022),
            "patel_307" => Ok(Comparator::Patel307),
            other => Err(Error::Malformed(format!("unknown comparator {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Comparator::Vdc0618 => "vdc_0618",
            Comparator::Hpy2022 => "hpy_2022",
            Comparator::Patel307 => "patel_307",
        }
    }

    pub fn domain_start_log(&self) -> f64 {
        match self {
            Comparator::Vdc0618 | Comparator::Patel307 => 3f64.ln(),
            Comparator::Hpy2022 => 1e12f64.ln(),
        }
    }

    /// log of the comparator bound at log t = l, in a form stable for
    /// very large l.
    pub fn log_value(&self, l: f64) -> f64 {
        match self {
            Comparator::Vdc0618 => 0.618f64.ln() + l / 6.0 + l.ln(),
            Comparator::Hpy2022 => {
                l / 6.0 + (0.478013 * l + 3.853165 - 2.914229 * (-l / 6.0).exp()).ln()
            }
            Comparator::Patel307 => 307.098f64.ln() + 27.0 * l / 164.0,
        }
    }

    /// True when both sides scale as t^(27/164), so their ratio is flat.
    fn same_exponent(&self) -> bool {
        matches!(self, Comparator::Patel307)
    }
}

/// The bound whose crossover is sought.
#[derive(Debug, Clone)]
pub enum BoundSpec<'a> {
    /// A t^(27/164) for a single constant A.
    Constant(f64),
    Scheme(&'a Scheme),
}

impl BoundSpec<'_> {
    fn log_value(&self, l: f64) -> Option<f64> {
        match self {
            BoundSpec::Constant(a) => Some(a.ln() + 27.0 * l / 164.0),
            BoundSpec::Scheme(s) => s.row_covering(l).map(|r| r.a_f64().ln() + 27.0 * l / 164.0),
        }
    }

    fn start_log(&self, against: Comparator) -> f64 {
        let comp = against.domain_start_log();
        match self {
            BoundSpec::Constant(_) => comp,
            BoundSpec::Scheme(s) => s.start_log().to_f64().max(comp),
        }
    }
}

const CROSSOVER_TOL: f64 = 1e-4;
const CROSSOVER_HORIZON: f64 = 4000.0;

/// Smallest log t from which the bound stays at or below the comparator.
/// Errors with `NoCrossover` when dominance never changes hands in a way
/// that admits such a point.
pub fn crossover(bound: &BoundSpec, against: Comparator) -> Result<f64> {
    if matches!(bound, BoundSpec::Constant(_)) && against.same_exponent() {
        return Err(Error::NoCrossover(format!(
            "both bounds scale as t^(27/164); against {}",
            against.name()
        )));
    }
    let start = bound.start_log(against);
    let d = |l: f64| -> f64 {
        match bound.log_value(l) {
            Some(v) => v - against.log_value(l),
            None => f64::NEG_INFINITY,
        }
    };

    // Walk the segments left to right, remembering the last point where the
    // bound was still above the comparator.
    let mut ans = start;
    let segments: Vec<(f64, Option<f64>)> = match bound {
        BoundSpec::Constant(_) => vec![(start, None)],
        BoundSpec::Scheme(s) => s
            .rows
            .iter()
            .map(|r| {
                (
                    r.params.log_t0.to_f64().max(start),
                    r.params.log_t1.as_ref().map(|l| l.to_f64()),
                )
            })
            .filter(|(lo, hi)| hi.map(|h| h > *lo) != Some(false))
            .collect(),
    };

    for (lo, hi) in segments {
        match hi {
            Some(hi) => {
                let eps = (hi - lo) * 1e-9;
                let (ds, de) = (d(lo), d(hi - eps));
                if ds > 0.0 && de > 0.0 {
                    ans = hi;
                } else if ds > 0.0 && de <= 0.0 {
                    ans = bisect(&d, lo, hi - eps);
                } else if ds <= 0.0 && de > 0.0 {
                    // Non-monotone segment; be conservative.
                    ans = hi;
                }
            }
            None => {
                if d(lo) > 0.0 {
                    let mut m = lo + 8.0;
                    while d(m) > 0.0 {
                        m += 64.0;
                        if m - lo > CROSSOVER_HORIZON {
                            return Err(Error::NoCrossover(format!(
                                "bound stays above {} beyond log t = {m:.1}",
                                against.name()
                            )));
                        }
                    }
                    ans = bisect(&d, lo, m);
                }
            }
        }
    }
    Ok(ans)
}

fn bisect(d: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    // Invariant: d(lo) > 0 >= d(hi).
    while hi - lo > CROSSOVER_TOL {
        let mid = 0.5 * (lo + hi);
        if d(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_crossovers_match_oracles() {
        let b = BoundSpec::Constant(66.7);
        let vdc = crossover(&b, Comparator::Vdc0618).unwrap();
        assert!(
            (vdc - 89.90382005703940).abs() < 5e-3,
            "vdc crossover {vdc}"
        );
        let hpy = crossover(&b, Comparator::Hpy2022).unwrap();
        assert!(
            (hpy - 104.72281717992132).abs() < 5e-3,
            "hpy crossover {hpy}"
        );
    }

    #[test]
    fn same_exponent_never_crosses() {
        let b = BoundSpec::Constant(66.7);
        assert!(matches!(
            crossover(&b, Comparator::Patel307),
            Err(Error::NoCrossover(_))
        ));
    }

    #[test]
    fn budget_one_returns_the_injected_tail_seed() {
        let scfg = SearchConfig {
            budget: 1,
            seed: 9,
            ..Default::default()
        };
        let pcfg = PipelineConfig::default();
        let log_t0 = Rational::from(875);
        let (row, used) = optimize_interval(&log_t0, None, &[], &scfg, &pcfg).unwrap();
        assert_eq!(used, 1);
        assert_eq!(row.params.h1, rational_from_decimal("1.01563").unwrap());
        assert_eq!(row.params.theta2, Rational::from(261658));
        assert!(row.a_f64() <= 66.7);
    }

    #[test]
    fn determinism_same_seed_same_champion() {
        let scfg = SearchConfig {
            budget: 600,
            seed: 4242,
            ..Default::default()
        };
        let pcfg = PipelineConfig::default();
        let log_t0 = Rational::from(60);
        let log_t1 = Rational::from((121, 2));
        let (r1, e1) =
            optimize_interval(&log_t0, Some(&log_t1), &[], &scfg, &pcfg).unwrap();
        let (r2, e2) =
            optimize_interval(&log_t0, Some(&log_t1), &[], &scfg, &pcfg).unwrap();
        assert_eq!(e1, e2);
        assert_eq!(r1.params, r2.params);
        assert_eq!(r1.a.value, r2.a.value);
    }

    #[test]
    fn degenerate_scheme_is_rejected() {
        let pcfg = PipelineConfig::default();
        let seed = tail_seed(&Rational::from(875));
        let mut bad = seed.clone();
        bad.log_t1 = Some(bad.log_t0.clone());
        let a = assemble_certified(&seed, &pcfg).unwrap().a_total;
        let scheme = Scheme {
            rows: vec![
                SchemeRow {
                    params: bad,
                    a: a.clone(),
                },
                SchemeRow { params: seed, a },
            ],
        };
        assert!(matches!(
            scheme.validate(&pcfg),
            Err(Error::InvariantViolation(_))
        ));
    }
}
