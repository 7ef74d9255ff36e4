//! Exact finite-size distributions read off generating functions, the
//! limit laws they approach, and distances between the two.
//!
//! The ratio `[t^k x^n] F / [x^n] F(1, x)` is the same for ordinary and
//! exponential generating functions, so nothing here needs to know which
//! kind of series it is given.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::catalog::{self, BalancedVariant, CatalogError, CompVariant, TreeVariant};
use crate::series::{factorial, rat, ratio, Context, Poly, PowerSeries, Rational, SeriesError};

#[derive(Debug, Error)]
pub enum MomentsError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("distribution undefined: no objects of size {0}")]
    Undefined(u32),
    #[error("{0} has no point masses")]
    NotDiscrete(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

pub type Result<T> = std::result::Result<T, MomentsError>;

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact distribution of one statistic at a fixed size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePmf {
    pub n: u32,
    pub support: BTreeMap<u32, Rational>,
}

impl FinitePmf {
    pub fn prob(&self, k: u32) -> Rational {
        self.support.get(&k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total(&self) -> Rational {
        self.support.values().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn moments(&self) -> MomentPair {
        let mut m1 = Rational::zero();
        let mut m2 = Rational::zero();
        for (&k, p) in &self.support {
            let k = rat(k as i64);
            m1 += &k * p;
            m2 += &k * &k * p;
        }
        MomentPair {
            variance: m2 - &m1 * &m1,
            mean: m1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentPair {
    pub mean: Rational,
    pub variance: Rational,
}

/// Exact joint distribution of two statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointPmf {
    pub n: u32,
    pub table: BTreeMap<(u32, u32), Rational>,
}

impl JointPmf {
    pub fn prob(&self, k: u32, l: u32) -> Rational {
        self.table
            .get(&(k, l))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn marginal(&self, which: usize) -> FinitePmf {
        let mut support: BTreeMap<u32, Rational> = BTreeMap::new();
        for (&(k, l), p) in &self.table {
            let key = if which == 0 { k } else { l };
            *support.entry(key).or_insert_with(Rational::zero) += p;
        }
        FinitePmf { n: self.n, support }
    }

    /// `max |P(k,l) - P(k) P(l)|` over all cells of the product support.
    pub fn independence_gap(&self) -> Rational {
        let (a, b) = (self.marginal(0), self.marginal(1));
        let mut worst = Rational::zero();
        for (k, pk) in &a.support {
            for (l, pl) in &b.support {
                let d = (self.prob(*k, *l) - pk * pl).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
        worst
    }
}

/// Distribution of one auxiliary variable inside a size slice; the other
/// auxiliary variables are summed out.
pub fn pmf_from_slice(
    ctx: &Arc<Context>,
    slice: &Poly,
    statvar: &str,
    n: u32,
) -> Result<FinitePmf> {
    let pos = ctx.aux_index(statvar)?;
    let mut counts: BTreeMap<u32, Rational> = BTreeMap::new();
    for (e, c) in slice.iter() {
        *counts.entry(e[pos]).or_insert_with(Rational::zero) += c;
    }
    counts.retain(|_, c| !c.is_zero());
    let total = slice.total();
    if total.is_zero() {
        return Err(MomentsError::Undefined(n));
    }
    Ok(FinitePmf {
        n,
        support: counts.into_iter().map(|(k, c)| (k, c / &total)).collect(),
    })
}

pub fn finite_pmf(gf: &PowerSeries, statvar: &str, n: u32) -> Result<FinitePmf> {
    pmf_from_slice(gf.context(), gf.slice(n)?, statvar, n)
}

pub fn joint_from_slice(
    ctx: &Arc<Context>,
    slice: &Poly,
    vars: (&str, &str),
    n: u32,
) -> Result<JointPmf> {
    let (p0, p1) = (ctx.aux_index(vars.0)?, ctx.aux_index(vars.1)?);
    let total = slice.total();
    if total.is_zero() {
        return Err(MomentsError::Undefined(n));
    }
    let mut table: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    for (e, c) in slice.iter() {
        *table.entry((e[p0], e[p1])).or_insert_with(Rational::zero) += c;
    }
    table.retain(|_, c| !c.is_zero());
    for v in table.values_mut() {
        *v /= &total;
    }
    Ok(JointPmf { n, table })
}

pub fn joint_pmf(gf: &PowerSeries, vars: (&str, &str), n: u32) -> Result<JointPmf> {
    joint_from_slice(gf.context(), gf.slice(n)?, vars, n)
}

/// Mean and variance from the first two derivatives in `statvar` at 1.
pub fn mean_variance(gf: &PowerSeries, statvar: &str, n: u32) -> Result<MomentPair> {
    let ones: Vec<(&str, Rational)> = gf
        .context()
        .aux_names()
        .into_iter()
        .map(|v| (v, Rational::one()))
        .collect();
    let at_one =
        |s: &PowerSeries| -> Result<Rational> { Ok(s.specialize(&ones)?.slice(n)?.total()) };
    let f = gf.truncate(n)?;
    let d1 = f.derivative(statvar)?;
    let d2 = d1.derivative(statvar)?;
    let total = at_one(&f)?;
    if total.is_zero() {
        return Err(MomentsError::Undefined(n));
    }
    let mean = at_one(&d1)? / &total;
    let second = at_one(&d2)? / &total;
    Ok(MomentPair {
        variance: second + &mean - &mean * &mean,
        mean,
    })
}

// ------------------------------------------------------------------ limit laws

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LimitLaw {
    /// Mean and variance growing linearly with the given slopes.
    Normal {
        mean_slope: String,
        variance_slope: String,
    },
    Binomial {
        trials: u32,
        p: String,
    },
    /// `1/2 C(2k,k) (3/16)^k`.
    DiscreteTree,
    Poisson {
        lambda: String,
    },
}

impl LimitLaw {
    pub fn normal(mean_slope: Rational, variance_slope: Rational) -> Self {
        Self::Normal {
            mean_slope: mean_slope.to_string(),
            variance_slope: variance_slope.to_string(),
        }
    }

    pub fn binomial(trials: u32, p: Rational) -> Result<Self> {
        if p.is_negative() || p > Rational::one() {
            return Err(MomentsError::BadParameter(format!(
                "p = {p} is not a probability"
            )));
        }
        Ok(Self::Binomial {
            trials,
            p: p.to_string(),
        })
    }

    pub fn poisson(lambda: Rational) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(MomentsError::BadParameter(format!(
                "lambda = {lambda} must be positive"
            )));
        }
        Ok(Self::Poisson {
            lambda: lambda.to_string(),
        })
    }

    fn parse(s: &str) -> Rational {
        s.parse().expect("stored by a validating constructor")
    }
}

/// A closed interval with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(x: Rational) -> Self {
        Self {
            lo: x.clone(),
            hi: x,
        }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn mid_f64(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / rat(2)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if a <= b {
            Self { lo: a, hi: b }
        } else {
            Self { lo: b, hi: a }
        }
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// `e^{-lambda}` enclosed between two consecutive partial sums of the
/// alternating Taylor series, once its terms decrease below `10^-digits`.
pub fn exp_neg_interval(lambda: &Rational, digits: u32) -> Interval {
    let tol = Rational::new(
        BigInt::one(),
        num_traits::pow(BigInt::from(10), digits as usize),
    );
    let mut sum = Rational::one();
    let mut term = Rational::one();
    let mut j = 0u32;
    loop {
        j += 1;
        term = -(&term * lambda) / rat(j as i64);
        let next = &sum + &term;
        // Terms decrease in absolute value once j > lambda; from there the
        // limit lies between consecutive partial sums.
        if rat(j as i64) > *lambda && term.abs() < tol {
            return if sum <= next {
                Interval { lo: sum, hi: next }
            } else {
                Interval { lo: next, hi: sum }
            };
        }
        sum = next;
    }
}

/// Digits used for Poisson masses unless the caller asks otherwise.
pub const DEFAULT_DIGITS: u32 = 30;

/// Point mass of a discrete limit law at `k`, exact where the law is
/// rational and an enclosing interval for Poisson laws.
pub fn limit_pmf(law: &LimitLaw, k: u32) -> Result<Interval> {
    limit_pmf_digits(law, k, DEFAULT_DIGITS)
}

pub fn limit_pmf_digits(law: &LimitLaw, k: u32, digits: u32) -> Result<Interval> {
    match law {
        LimitLaw::Normal { .. } => Err(MomentsError::NotDiscrete("a normal law".into())),
        LimitLaw::Binomial { trials, p } => {
            let p = LimitLaw::parse(p);
            if k > *trials {
                return Ok(Interval::point(Rational::zero()));
            }
            let c = Rational::from_integer(binomial(BigInt::from(*trials), BigInt::from(k)));
            let q = Rational::one() - &p;
            Ok(Interval::point(
                c * num_traits::pow(p, k as usize) * num_traits::pow(q, (*trials - k) as usize),
            ))
        }
        LimitLaw::DiscreteTree => {
            let c = Rational::from_integer(binomial(BigInt::from(2 * k), BigInt::from(k)));
            Ok(Interval::point(
                c * num_traits::pow(ratio(3, 16), k as usize) / rat(2),
            ))
        }
        LimitLaw::Poisson { lambda } => {
            let lambda = LimitLaw::parse(lambda);
            let base = exp_neg_interval(&lambda, digits + 2);
            let w = num_traits::pow(lambda, k as usize) / Rational::from_integer(factorial(k));
            Ok(base.scale(&w))
        }
    }
}

/// Total variation distance between a finite pmf and a discrete limit law,
/// enclosed in an interval. Mass of the law beyond the pmf's support is
/// accounted for by the exact complement of the enumerated mass.
pub fn tv_distance(pmf: &FinitePmf, law: &LimitLaw) -> Result<Interval> {
    let kmax = pmf.support.keys().next_back().copied().unwrap_or(0);
    let mut lo = Rational::zero();
    let mut hi = Rational::zero();
    let mut law_lo = Rational::zero();
    let mut law_hi = Rational::zero();
    for k in 0..=kmax {
        let p = pmf.prob(k);
        let l = limit_pmf(law, k)?;
        law_lo += &l.lo;
        law_hi += &l.hi;
        let a = (&p - &l.lo).abs();
        let b = (&p - &l.hi).abs();
        let upper = if a > b { a.clone() } else { b.clone() };
        let lower = if l.contains(&p) {
            Rational::zero()
        } else if a < b {
            a
        } else {
            b
        };
        lo += lower;
        hi += upper;
    }
    // Remaining law mass lies in [1 - law_hi, 1 - law_lo].
    let tail_lo = (Rational::one() - &law_hi).max(Rational::zero());
    let tail_hi = Rational::one() - &law_lo;
    Ok(Interval {
        lo: (lo + tail_lo) / rat(2),
        hi: (hi + tail_hi) / rat(2),
    })
}

// ------------------------------------------------------------ convergence data

/// Families with a limit statement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitFamily {
    Compositions,
    Balanced,
    Words { m: u32 },
    Trees,
    Matchings,
}

impl LimitFamily {
    pub fn parse(name: &str, m: Option<u32>) -> Result<Self> {
        Ok(match name {
            "compositions" | "comp" => Self::Compositions,
            "balanced" => Self::Balanced,
            "words" => Self::Words { m: m.unwrap_or(2) },
            "trees" => Self::Trees,
            "matchings" => Self::Matchings,
            other => {
                return Err(MomentsError::BadParameter(format!(
                    "no limit law recorded for `{other}` (expected compositions, balanced, words, trees, matchings)"
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Compositions => "compositions",
            Self::Balanced => "balanced",
            Self::Words { .. } => "words",
            Self::Trees => "trees",
            Self::Matchings => "matchings",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: u32,
    pub statistic: String,
    pub exact: String,
    pub exact_f64: f64,
    pub prediction: String,
    pub prediction_f64: f64,
    pub difference_f64: f64,
}

impl ConvergenceRow {
    fn new(n: u32, statistic: &str, exact: &Rational, prediction: &Rational) -> Self {
        Self::with_f64(
            n,
            statistic,
            exact,
            prediction.to_string(),
            to_f64(prediction),
        )
    }

    fn with_f64(n: u32, statistic: &str, exact: &Rational, prediction: String, pred: f64) -> Self {
        let e = to_f64(exact);
        Self {
            n,
            statistic: statistic.to_string(),
            exact: exact.to_string(),
            exact_f64: e,
            prediction,
            prediction_f64: pred,
            difference_f64: e - pred,
        }
    }
}

/// Significant digits of the decimal column in [`ConvergenceReport::to_csv`].
pub const CSV_DIGITS: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub family: String,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,statistic,exact,prediction,difference,digits\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.*e},{}\n",
                r.n,
                r.statistic,
                r.exact,
                r.prediction,
                CSV_DIGITS - 1,
                r.difference_f64,
                CSV_DIGITS
            ));
        }
        out
    }

    pub fn find(&self, n: u32, statistic: &str) -> Option<&ConvergenceRow> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.statistic == statistic)
    }
}

/// Distributions of the centered-arc and coupled-pair counts at size `n`,
/// jointly. Only the degree-n slice of `H(r,s,1,x)` is formed.
pub fn matchings_joint(n: u32) -> Result<JointPmf> {
    // Work with exponential counts so every product stays integral.
    let ctx = Context::new(&["r", "s", "x"], "x")?;
    let one = PowerSeries::one(&ctx, n);
    let x = PowerSeries::var(&ctx, n, "x")?;
    let r1 = PowerSeries::var(&ctx, n, "r")?.sub(&one)?;
    let s1 = PowerSeries::var(&ctx, n, "s")?.sub(&one)?;
    let a = r1.mul(&x)?.exp()?.egf_scaled();
    let b = s1.mul(&x)?.mul(&x)?.exp()?.egf_scaled();
    let c = one.sub(&x.scale(&rat(2)))?.inv_sqrt()?.egf_scaled();
    let bc = b.binomial_mul(&c)?;
    let slice = a.binomial_product_slice(&bc, n)?;
    joint_from_slice(&ctx, &slice, ("r", "s"), n)
}

/// Degree of symmetry of trees at size `n`.
///
/// Uses `Bbar = 1 + (1 - sqrt(1 + 4y)) / (2sx)` with `y = s h(x)` and
/// `h(x) = x(x - 1 + sqrt(1-4x))`. Since `[y^j] sqrt(1+4y) = (-1)^(j+1) 2 Cat(j-1)`,
/// `[s^k x^n] Bbar = (-1)^(k+1) Cat(k) [x^{n+1}] h^{k+1}` for `n >= 1`.
/// All integer arithmetic; agrees with the `Bbar` series.
pub fn trees_ds_pmf(n: u32) -> Result<FinitePmf> {
    if n == 0 {
        let b = catalog::trees_gf(TreeVariant::Bbar, 0)?;
        return finite_pmf(&b, "s", 0);
    }
    let len = n as usize + 2;
    // sqrt(1-4x) = 1 - sum_{k>=1} 2 Cat(k-1) x^k
    let two_cat: Vec<BigInt> = (0..len)
        .map(|k| {
            if k == 0 {
                BigInt::zero()
            } else {
                2 * catalog::catalan(k as u32 - 1)
            }
        })
        .collect();
    let mut h = vec![BigInt::zero(); len];
    h[2] = BigInt::from(-1);
    for k in 2..len - 1 {
        h[k + 1] -= &two_cat[k];
    }
    let mut power = h.clone();
    let mut support = BTreeMap::new();
    let total = catalog::catalan(n);
    let mut seen = BigInt::zero();
    for j in 1..len {
        // power = h^j; lowest degree 2j
        let c = catalog::catalan(j as u32 - 1) * &power[len - 1];
        if !c.is_zero() {
            let count = if j % 2 == 0 { c } else { -c };
            seen += &count;
            support.insert(j as u32 - 1, Rational::new(count, total.clone()));
        }
        if 2 * (j + 1) > len - 1 {
            break;
        }
        let mut next = vec![BigInt::zero(); len];
        for (i, a) in power.iter().enumerate().skip(2 * j) {
            if a.is_zero() {
                continue;
            }
            for (k, b) in h.iter().enumerate().take(len - i).skip(2) {
                if !b.is_zero() {
                    next[i + k] += a * b;
                }
            }
        }
        power = next;
    }
    if seen != total {
        return Err(MomentsError::BadParameter(format!(
            "symmetry counts at n = {n} sum to {seen}, expected Cat(n) = {total}"
        )));
    }
    Ok(FinitePmf { n, support })
}

pub fn convergence_report(family: LimitFamily, ns: &[u32]) -> Result<ConvergenceReport> {
    let nmax = ns.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::new();
    match family {
        LimitFamily::Compositions => {
            let k = catalog::compositions_gf(&CompVariant::Tz, nmax)?;
            for &n in ns {
                let m = mean_variance(&k, "t", n)?;
                rows.push(ConvergenceRow::new(n, "mean", &m.mean, &ratio(n as i64, 6)));
                rows.push(ConvergenceRow::new(
                    n,
                    "variance",
                    &m.variance,
                    &ratio(5 * n as i64, 108),
                ));
            }
        }
        LimitFamily::Balanced => {
            let g = catalog::balanced_gf(BalancedVariant::G, nmax)?;
            for &n in ns {
                let m = mean_variance(&g, "t", n)?;
                rows.push(ConvergenceRow::new(n, "mean", &m.mean, &ratio(n as i64, 2)));
                rows.push(ConvergenceRow::new(
                    n,
                    "variance",
                    &m.variance,
                    &ratio(n as i64, 4),
                ));
            }
        }
        LimitFamily::Words { m } => {
            let w = catalog::words_gf(m, nmax)?;
            let p = Rational::one() - ratio(1, m as i64);
            for &n in ns {
                let pmf = finite_pmf(&w, "t", n)?;
                let law = LimitLaw::binomial(n / 2, p.clone())?;
                let tv = tv_distance(&pmf, &law)?;
                rows.push(ConvergenceRow::new(
                    n,
                    "tv_binomial",
                    &tv.hi,
                    &Rational::zero(),
                ));
                let mom = pmf.moments();
                let half = rat((n / 2) as i64);
                rows.push(ConvergenceRow::new(n, "mean", &mom.mean, &(&p * &half)));
                rows.push(ConvergenceRow::new(
                    n,
                    "variance",
                    &mom.variance,
                    &(&p * (Rational::one() - &p) * &half),
                ));
            }
        }
        LimitFamily::Trees => {
            for &n in ns {
                let pmf = trees_ds_pmf(n)?;
                let tv = tv_distance(&pmf, &LimitLaw::DiscreteTree)?;
                rows.push(ConvergenceRow::new(
                    n,
                    "tv_discrete",
                    &tv.hi,
                    &Rational::zero(),
                ));
                rows.push(ConvergenceRow::new(n, "p0", &pmf.prob(0), &ratio(1, 2)));
                rows.push(ConvergenceRow::new(n, "p1", &pmf.prob(1), &ratio(3, 16)));
                let m = pmf.moments();
                rows.push(ConvergenceRow::new(n, "mean", &m.mean, &ratio(3, 2)));
                rows.push(ConvergenceRow::new(n, "variance", &m.variance, &rat(6)));
            }
        }
        LimitFamily::Matchings => {
            for &n in ns {
                let joint = matchings_joint(n)?;
                let c = joint.marginal(0);
                let p = joint.marginal(1);
                let tv_c = tv_distance(&c, &LimitLaw::poisson(ratio(1, 2))?)?;
                let tv_p = tv_distance(&p, &LimitLaw::poisson(ratio(1, 4))?)?;
                rows.push(ConvergenceRow::new(
                    n,
                    "tv_c_poisson",
                    &tv_c.hi,
                    &Rational::zero(),
                ));
                rows.push(ConvergenceRow::new(
                    n,
                    "tv_p_poisson",
                    &tv_p.hi,
                    &Rational::zero(),
                ));
                rows.push(ConvergenceRow::new(
                    n,
                    "independence_gap",
                    &joint.independence_gap(),
                    &Rational::zero(),
                ));
                let e = exp_neg_interval(&ratio(1, 2), 20);
                rows.push(ConvergenceRow::with_f64(
                    n,
                    "c0",
                    &c.prob(0),
                    "exp(-1/2)".to_string(),
                    e.mid_f64(),
                ));
            }
        }
    }
    Ok(ConvergenceReport {
        family: family.name().to_string(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{compositions_gf, words_gf, MatchingVariant};

    #[test]
    fn small_pmfs() {
        let k = compositions_gf(&CompVariant::Tz, 5).unwrap();
        let p = finite_pmf(&k, "t", 3).unwrap();
        assert_eq!(p.prob(0), ratio(1, 2));
        assert_eq!(p.prob(1), ratio(1, 2));
        let g = catalog::balanced_gf(BalancedVariant::G, 3).unwrap();
        let p = finite_pmf(&g, "t", 2).unwrap();
        assert_eq!(p.prob(0), ratio(1, 3));
        assert_eq!(p.prob(2), ratio(2, 3));
        let b = catalog::trees_gf(TreeVariant::Bbar, 3).unwrap();
        let p = finite_pmf(&b, "s", 3).unwrap();
        assert_eq!((p.prob(0), p.prob(1)), (ratio(4, 5), ratio(1, 5)));
    }

    #[test]
    fn moments_two_ways() {
        let k = compositions_gf(&CompVariant::Tz, 12).unwrap();
        assert_eq!(mean_variance(&k, "t", 4).unwrap().mean, ratio(1, 2));
        for n in 1..=12 {
            assert_eq!(
                mean_variance(&k, "t", n).unwrap(),
                finite_pmf(&k, "t", n).unwrap().moments()
            );
        }
        let w = words_gf(2, 12).unwrap();
        for n in 0..=6u32 {
            let m = mean_variance(&w, "t", 2 * n).unwrap();
            assert_eq!(m.mean, ratio(n as i64, 2));
            assert_eq!(m.variance, ratio(n as i64, 4));
        }
    }

    #[test]
    fn degenerate_distribution() {
        let c = Context::new(&["t", "x"], "x").unwrap();
        let s = PowerSeries::from_size_coeffs(&c, 4, &[rat(1), rat(3), rat(2)]);
        let m = mean_variance(&s, "t", 2).unwrap();
        assert_eq!((m.mean, m.variance), (Rational::zero(), Rational::zero()));
        assert!(matches!(
            finite_pmf(&s, "t", 4),
            Err(MomentsError::Undefined(4))
        ));
    }

    #[test]
    fn limit_values() {
        assert_eq!(
            limit_pmf(&LimitLaw::DiscreteTree, 0).unwrap().lo,
            ratio(1, 2)
        );
        assert_eq!(
            limit_pmf(&LimitLaw::DiscreteTree, 1).unwrap().lo,
            ratio(3, 16)
        );
        let mut total = Rational::zero();
        for k in 0..400 {
            total += limit_pmf(&LimitLaw::DiscreteTree, k).unwrap().lo;
        }
        assert!(
            Rational::one() - total
                < Rational::new(1.into(), num_traits::pow(BigInt::from(10), 12))
        );
        let p0 = limit_pmf(&LimitLaw::poisson(ratio(1, 2)).unwrap(), 0).unwrap();
        assert!((p0.mid_f64() - 0.606_530_659_712_633).abs() < 1e-12);
        assert!(p0.width() < Rational::new(1.into(), num_traits::pow(BigInt::from(10), 30)));
        assert!(limit_pmf(&LimitLaw::normal(ratio(1, 6), ratio(5, 108)), 0).is_err());
        assert!(LimitLaw::poisson(rat(0)).is_err());
    }

    #[test]
    fn words_pmf_is_binomial() {
        let w = words_gf(2, 12).unwrap();
        for n in 0..=12 {
            let pmf = finite_pmf(&w, "t", n).unwrap();
            let law = LimitLaw::binomial(n / 2, ratio(1, 2)).unwrap();
            assert_eq!(tv_distance(&pmf, &law).unwrap().hi, Rational::zero());
        }
    }

    #[test]
    fn small_matching_joint() {
        let j = matchings_joint(2).unwrap();
        assert_eq!(j.prob(2, 0), ratio(1, 3));
        assert_eq!(j.prob(0, 1), ratio(2, 3));
        let h = catalog::matchings_gf(MatchingVariant::Rs, 6).unwrap();
        for n in 0..=6 {
            let j = joint_pmf(&h, ("r", "s"), n).unwrap();
            assert_eq!(j, matchings_joint(n).unwrap());
            assert_eq!(j.marginal(0), finite_pmf(&h, "r", n).unwrap());
            assert_eq!(j.marginal(1), finite_pmf(&h, "s", n).unwrap());
        }
    }

    #[test]
    fn tree_symmetry_pmf_matches_series() {
        let b = catalog::trees_gf(TreeVariant::Bbar, 24).unwrap();
        for n in 0..=24 {
            assert_eq!(
                trees_ds_pmf(n).unwrap(),
                finite_pmf(&b, "s", n).unwrap(),
                "n = {n}"
            );
        }
    }
}
