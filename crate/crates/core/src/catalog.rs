//! Closed-form generating functions and counting formulas, expanded as
//! truncated series.
//!
//! Every constructor takes the truncation order in the size variable and
//! returns a series that is exact up to that order. Where a formula divides
//! by a formal variable the computation runs at a padded internal order.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::combinat::{Caps, CombinatError, Family, PartSet, Statistic};
use crate::series::{factorial, rat, Context, PowerSeries, Rational, SeriesError};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Combinat(#[from] CombinatError),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

pub type Result<T> = std::result::Result<T, CatalogError>;

/// Sum of `c * prod name^e` terms.
fn poly(ctx: &Arc<Context>, order: u32, terms: &[(i64, &[(&str, u32)])]) -> Result<PowerSeries> {
    let mut out = PowerSeries::zero(ctx, order);
    for (c, mono) in terms {
        let mut e = vec![0; ctx.len()];
        for (name, k) in mono.iter() {
            e[ctx.index(name)?] += k;
        }
        out = out.add(&PowerSeries::monomial(ctx, order, &e, rat(*c))?)?;
    }
    Ok(out)
}

fn exps(ctx: &Arc<Context>, mono: &[(&str, u32)]) -> Result<Vec<u32>> {
    let mut e = vec![0; ctx.len()];
    for (name, k) in mono {
        e[ctx.index(name)?] += k;
    }
    Ok(e)
}

fn ctx(names: &[&str], size: &str) -> Result<Arc<Context>> {
    Ok(Context::new(names, size)?)
}

/// `1/(1 - z^k)` in a univariate context.
fn geometric(ctx: &Arc<Context>, order: u32, k: u32) -> PowerSeries {
    let coeffs: Vec<Rational> = (0..=order)
        .map(|n| {
            if n % k == 0 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    PowerSeries::from_size_coeffs(ctx, order, &coeffs)
}

pub fn catalan(n: u32) -> BigInt {
    binomial(BigInt::from(2 * n), BigInt::from(n)) / BigInt::from(n + 1)
}

pub fn double_factorial_odd(n: u32) -> BigInt {
    // (2n-1)!!
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(2 * k - 1))
}

fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        BigInt::zero()
    } else {
        binomial(BigInt::from(n), BigInt::from(k))
    }
}

// ---------------------------------------------------------------- compositions

/// The part generating polynomial `R(z)`.
#[derive(Debug, Clone, PartialEq)]
pub enum PartsSpec {
    Set(PartSet),
    /// Coefficients of `R(z)` from `z^0`; the constant must vanish.
    Poly(Vec<Rational>),
}

impl PartsSpec {
    fn series(&self, ctx: &Arc<Context>, order: u32) -> Result<PowerSeries> {
        let coeffs: Vec<Rational> = match self {
            Self::Set(set) => (0..=order)
                .map(|k| {
                    if set.contains(k) {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
            Self::Poly(c) => {
                if c.first().is_some_and(|c0| !c0.is_zero()) {
                    return Err(CatalogError::Degenerate(
                        "R(z) must have zero constant term".into(),
                    ));
                }
                c.clone()
            }
        };
        let r = PowerSeries::from_size_coeffs(ctx, order, &coeffs);
        if r.is_zero() && order > 0 {
            return Err(CatalogError::Degenerate(
                "empty part set: the series is 1".into(),
            ));
        }
        Ok(r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CompVariant {
    /// `K(t,x,z)`, `x` marking parts.
    Full,
    /// `K(t,z) = K(t,1,z)`.
    Tz,
    /// `K_R(t,x,z)`.
    Restricted(PartsSpec),
    /// `K_R(1,x,z) = 1/(1 - x R(z))`.
    T1(PartsSpec),
    /// `K_R(0,x,z)`, palindromic compositions.
    T0(PartsSpec),
}

pub fn compositions_gf(variant: &CompVariant, order: u32) -> Result<PowerSeries> {
    match variant {
        CompVariant::Full => {
            let c = ctx(&["t", "x", "z"], "z")?;
            let num = poly(
                &c,
                order,
                &[(1, &[]), (-1, &[("z", 1)]), (1, &[("x", 1), ("z", 1)])],
            )?
            .mul(&poly(&c, order, &[(1, &[]), (-1, &[("z", 2)])])?)?;
            let den = poly(&c, order, &[(1, &[]), (-1, &[("z", 1)])])?
                .mul(&poly(
                    &c,
                    order,
                    &[(1, &[]), (-1, &[("z", 2)]), (-1, &[("x", 2), ("z", 2)])],
                )?)?
                .sub(&poly(&c, order, &[(2, &[("t", 1), ("x", 2), ("z", 3)])])?)?;
            Ok(num.mul(&den.invert()?)?)
        }
        CompVariant::Tz => {
            let c = ctx(&["t", "z"], "z")?;
            let num = poly(&c, order, &[(1, &[]), (-1, &[("z", 2)])])?;
            let den = poly(&c, order, &[(1, &[]), (-1, &[("z", 1)])])?
                .mul(&poly(&c, order, &[(1, &[]), (-2, &[("z", 2)])])?)?
                .sub(&poly(&c, order, &[(2, &[("t", 1), ("z", 3)])])?)?;
            Ok(num.mul(&den.invert()?)?)
        }
        CompVariant::Restricted(parts) | CompVariant::T1(parts) | CompVariant::T0(parts) => {
            let c = ctx(&["t", "x", "z"], "z")?;
            let r = parts.series(&c, order)?;
            let z2 = poly(&c, order, &[(1, &[("z", 2)])])?;
            let r2 = r.substitute("z", &z2)?;
            let x = PowerSeries::var(&c, order, "x")?;
            let x2 = x.mul(&x)?;
            let one = PowerSeries::one(&c, order);
            let xr = x.mul(&r)?;
            match variant {
                CompVariant::T1(_) => Ok(one.sub(&xr)?.invert()?),
                CompVariant::T0(_) => Ok(one.add(&xr)?.mul(&one.sub(&x2.mul(&r2)?)?.invert()?)?),
                _ => {
                    let t = PowerSeries::var(&c, order, "t")?;
                    let den = one
                        .sub(&x2.mul(&r2)?)?
                        .sub(&t.mul(&x2)?.mul(&r.mul(&r)?.sub(&r2)?)?)?;
                    Ok(one.add(&xr)?.mul(&den.invert()?)?)
                }
            }
        }
    }
}

// ----------------------------------------------------------------------- words

/// `W_m(t,x)` for m-ary words, `x` marking length.
pub fn words_gf(m: u32, order: u32) -> Result<PowerSeries> {
    if m == 0 {
        return Err(CatalogError::BadParameter(
            "alphabet size must be at least 1".into(),
        ));
    }
    let c = ctx(&["t", "x"], "x")?;
    let m = m as i64;
    let num = poly(&c, order, &[(1, &[]), (m, &[("x", 1)])])?;
    let den = poly(
        &c,
        order,
        &[
            (1, &[]),
            (-m, &[("x", 2)]),
            (-m * (m - 1), &[("t", 1), ("x", 2)]),
        ],
    )?;
    Ok(num.mul(&den.invert()?)?)
}

/// Number of m-ary words of length `n` with `k` asymmetric pairs.
pub fn words_count(m: u32, n: u32, k: i64) -> BigInt {
    let half = (n / 2) as i64;
    if k < 0 || k > half {
        return BigInt::zero();
    }
    let m = BigInt::from(m);
    num_traits::pow(m.clone(), n.div_ceil(2) as usize)
        * binom(half as u64, k as u64)
        * num_traits::pow(m - 1, k as usize)
}

// -------------------------------------------------------------- balanced words

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalancedVariant {
    /// `G(t,x)`, `t` marking da.
    G,
    /// Variables `x00, x11, x10, x01` marking pair occurrences at odd
    /// positions, plus `x` marking `n`.
    Multivar,
    /// `u` marking sz (equivalently o00 or occurrences of 001).
    Sz,
    /// `u` marking occurrences of 001, `v` occurrences of 01.
    Joint001_01,
    /// `v` marking a chosen subset of the occurrences of 001.
    Marked001,
}

pub fn balanced_gf(variant: BalancedVariant, order: u32) -> Result<PowerSeries> {
    let radicand = match variant {
        BalancedVariant::G => {
            let c = ctx(&["t", "x"], "x")?;
            poly(
                &c,
                order,
                &[
                    (1, &[]),
                    (-4, &[("t", 1), ("x", 1)]),
                    (4, &[("t", 2), ("x", 2)]),
                    (-4, &[("x", 2)]),
                ],
            )?
        }
        BalancedVariant::Multivar => {
            let c = ctx(&["x00", "x11", "x10", "x01", "x"], "x")?;
            let lin = poly(
                &c,
                order,
                &[
                    (1, &[]),
                    (-1, &[("x10", 1), ("x", 1)]),
                    (-1, &[("x01", 1), ("x", 1)]),
                ],
            )?;
            lin.mul(&lin)?.sub(&poly(
                &c,
                order,
                &[(4, &[("x00", 1), ("x11", 1), ("x", 2)])],
            )?)?
        }
        BalancedVariant::Sz => {
            let c = ctx(&["u", "x"], "x")?;
            poly(
                &c,
                order,
                &[
                    (1, &[]),
                    (-4, &[("x", 1)]),
                    (4, &[("x", 2)]),
                    (-4, &[("u", 1), ("x", 2)]),
                ],
            )?
        }
        BalancedVariant::Joint001_01 => {
            let c = ctx(&["u", "v", "x"], "x")?;
            let lin = poly(
                &c,
                order,
                &[(1, &[]), (-1, &[("x", 1)]), (-1, &[("v", 1), ("x", 1)])],
            )?;
            lin.mul(&lin)?
                .sub(&poly(&c, order, &[(4, &[("u", 1), ("v", 1), ("x", 2)])])?)?
        }
        BalancedVariant::Marked001 => {
            let c = ctx(&["v", "x"], "x")?;
            poly(
                &c,
                order,
                &[(1, &[]), (-4, &[("x", 1)]), (-4, &[("v", 1), ("x", 2)])],
            )?
        }
    };
    Ok(radicand.inv_sqrt()?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalancedCount {
    /// Words in `G_n` with `da = k`.
    Da { n: u32, k: u32 },
    /// Words in `G_n` with `k` occurrences of 001.
    Occ001 { n: u32, k: u32 },
    /// Words in `G_n` with `k` occurrences of 001 and `l` of 01.
    Occ001And01 { n: u32, k: u32, l: u32 },
}

pub fn balanced_counts(kind: BalancedCount) -> BigInt {
    match kind {
        BalancedCount::Da { n, k } => {
            if k > n || (n - k) % 2 == 1 {
                return BigInt::zero();
            }
            let (n, k) = (n as u64, k as u64);
            binom(n, k) * binom(n - k, (n - k) / 2) * (BigInt::one() << k)
        }
        BalancedCount::Occ001 { n, k } => {
            if 2 * k > n {
                return BigInt::zero();
            }
            let (n, k) = (n as u64, k as u64);
            binom(n, 2 * k) * binom(2 * k, k) * (BigInt::one() << (n - 2 * k))
        }
        BalancedCount::Occ001And01 { n, k, l } => {
            if l < k || k + l > n {
                return BigInt::zero();
            }
            let f = |a: u32| factorial(a);
            f(n) / (f(k) * f(k) * f(l - k) * f(n - k - l))
        }
    }
}

// ----------------------------------------------------------------------- trees

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeVariant {
    /// `B(t,x)`, `t` marking da.
    B,
    /// `D(t,x)` for pairs of trees, `t` marking unique nodes.
    D,
    /// `B̄(s,x)`, `s` marking ds.
    Bbar,
    /// `B(0,x)`, symmetric trees.
    BT0,
    /// `B̄(0,x)`.
    BbarS0,
}

/// `Cat(x) = (1 - sqrt(1-4x)) / (2x)`.
pub fn cat_gf(order: u32) -> Result<PowerSeries> {
    let c = ctx(&["x"], "x")?;
    let s = poly(&c, order + 1, &[(1, &[]), (-4, &[("x", 1)])])?.sqrt()?;
    let num = PowerSeries::one(&c, order + 1).sub(&s)?;
    Ok(num.divide_by_monomial(&[1], &rat(2))?)
}

pub fn trees_gf(variant: TreeVariant, order: u32) -> Result<PowerSeries> {
    match variant {
        TreeVariant::B => {
            let c = ctx(&["t", "x"], "x")?;
            let n = order + 1;
            let one = PowerSeries::one(&c, n);
            let s = poly(&c, n, &[(1, &[]), (-4, &[("t", 1), ("x", 1)])])?.sqrt()?;
            let inner = one
                .sub(&s)?
                .divide_by_monomial(&exps(&c, &[("t", 1)])?, &rat(1))?;
            let x = PowerSeries::var(&c, n, "x")?;
            let rad = one.add(&x.sub(&inner)?.mul(&x)?.scale(&rat(4)))?;
            let q = one
                .sub(&rad.sqrt()?)?
                .divide_by_monomial(&exps(&c, &[("x", 1)])?, &rat(2))?;
            Ok(PowerSeries::one(&c, order).add(&q)?)
        }
        TreeVariant::D => {
            let c = ctx(&["t", "x"], "x")?;
            let n = order + 2;
            let one = PowerSeries::one(&c, n + 1);
            let s = poly(&c, n + 1, &[(1, &[]), (-4, &[("t", 1), ("x", 1)])])?.sqrt()?;
            let cat = one
                .sub(&s)?
                .divide_by_monomial(&exps(&c, &[("t", 1), ("x", 1)])?, &rat(2))?;
            let one = PowerSeries::one(&c, n);
            let x2 = poly(&c, n, &[(4, &[("x", 2)])])?;
            let rad = one.add(&x2.mul(&one.sub(&cat.scale(&rat(2)))?)?)?;
            Ok(one
                .sub(&rad.sqrt()?)?
                .divide_by_monomial(&exps(&c, &[("x", 2)])?, &rat(2))?)
        }
        TreeVariant::Bbar => {
            let c = ctx(&["s", "x"], "x")?;
            let n = order + 1;
            let one = PowerSeries::one(&c, n);
            let sq = poly(&c, n, &[(1, &[]), (-4, &[("x", 1)])])?.sqrt()?;
            let inner = poly(&c, n, &[(1, &[("x", 1)]), (-1, &[])])?.add(&sq)?;
            let sx = poly(&c, n, &[(4, &[("s", 1), ("x", 1)])])?;
            let rad = one.add(&sx.mul(&inner)?)?;
            let q = one
                .sub(&rad.sqrt()?)?
                .divide_by_monomial(&exps(&c, &[("s", 1), ("x", 1)])?, &rat(2))?;
            Ok(PowerSeries::one(&c, order).add(&q)?)
        }
        TreeVariant::BT0 => {
            let c = ctx(&["x"], "x")?;
            let n = order + 1;
            let s = poly(&c, n, &[(1, &[]), (-4, &[("x", 2)])])?.sqrt()?;
            let q = PowerSeries::one(&c, n)
                .sub(&s)?
                .divide_by_monomial(&[1], &rat(2))?;
            Ok(PowerSeries::one(&c, order).add(&q)?)
        }
        TreeVariant::BbarS0 => {
            let c = ctx(&["x"], "x")?;
            let s = poly(&c, order, &[(1, &[]), (-4, &[("x", 1)])])?.sqrt()?;
            Ok(poly(&c, order, &[(2, &[]), (-1, &[("x", 1)])])?.sub(&s)?)
        }
    }
}

// ------------------------------------------------------------------- matchings

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingVariant {
    /// `H(r,s,t,x)`: centered arcs, coupled pairs, asymmetric arcs.
    H,
    /// `H(r,s,1,x)`.
    Rs,
    /// `H(1,1,0,x)`.
    Sym,
    /// `H(0,1,1,x)`.
    NoCentered,
    /// `H(0,0,1,x)`.
    FullyAsym,
    /// `H(1,0,1,x)`.
    NoCoupled,
}

/// EGF `e^{a x + b x^2} / sqrt(1 - 2 c x)` with `a`, `b`, `c` given as
/// polynomials in the auxiliary variables.
fn exp_over_sqrt(
    c: &Arc<Context>,
    order: u32,
    a: &[(i64, &[(&str, u32)])],
    b: &[(i64, &[(&str, u32)])],
    rad: &[(i64, &[(&str, u32)])],
) -> Result<PowerSeries> {
    let shift = |terms: &[(i64, &[(&str, u32)])], k: u32| -> Result<PowerSeries> {
        let mut out = PowerSeries::zero(c, order);
        for (coef, mono) in terms {
            let mut e = exps(c, mono)?;
            e[c.size_index()] += k;
            out = out.add(&PowerSeries::monomial(c, order, &e, rat(*coef))?)?;
        }
        Ok(out)
    };
    let arg = shift(a, 1)?.add(&shift(b, 2)?)?;
    let denom = PowerSeries::one(c, order).sub(&shift(rad, 1)?)?;
    Ok(arg.exp()?.mul(&denom.inv_sqrt()?)?)
}

pub fn matchings_gf(variant: MatchingVariant, order: u32) -> Result<PowerSeries> {
    match variant {
        MatchingVariant::H => {
            let c = ctx(&["r", "s", "t", "x"], "x")?;
            exp_over_sqrt(
                &c,
                order,
                &[(1, &[("r", 1)]), (-1, &[("t", 1)])],
                &[(1, &[("s", 1)]), (-1, &[("t", 2)])],
                &[(2, &[("t", 1)])],
            )
        }
        MatchingVariant::Rs => {
            let c = ctx(&["r", "s", "x"], "x")?;
            exp_over_sqrt(
                &c,
                order,
                &[(1, &[("r", 1)]), (-1, &[])],
                &[(1, &[("s", 1)]), (-1, &[])],
                &[(2, &[])],
            )
        }
        MatchingVariant::Sym => {
            let c = ctx(&["x"], "x")?;
            exp_over_sqrt(&c, order, &[(1, &[])], &[(1, &[])], &[])
        }
        MatchingVariant::NoCentered => {
            let c = ctx(&["x"], "x")?;
            exp_over_sqrt(&c, order, &[(-1, &[])], &[], &[(2, &[])])
        }
        MatchingVariant::FullyAsym => {
            let c = ctx(&["x"], "x")?;
            exp_over_sqrt(&c, order, &[(-1, &[])], &[(-1, &[])], &[(2, &[])])
        }
        MatchingVariant::NoCoupled => {
            let c = ctx(&["x"], "x")?;
            exp_over_sqrt(&c, order, &[], &[(-1, &[])], &[(2, &[])])
        }
    }
}

// ---------------------------------------------------------------- permutations

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermVariant {
    /// `P(r,s,t,x)`: fixed points, 2-cycles, da.
    P,
    /// `P(1,1,0,x)`.
    Involutions,
    /// `P(0,0,1,x)`.
    FullyAsym,
}

pub fn perms_gf(variant: PermVariant, order: u32) -> Result<PowerSeries> {
    // e^{a x + b x^2 / 2} / (1 - t x)
    type Terms<'a> = Vec<(i64, Vec<(&'a str, u32)>)>;
    let (c, a, b, t): (Arc<Context>, Terms, Terms, Terms) = match variant {
        PermVariant::P => (
            ctx(&["r", "s", "t", "x"], "x")?,
            vec![(1, vec![("r", 1)]), (-1, vec![("t", 1)])],
            vec![(1, vec![("s", 1)]), (-1, vec![("t", 2)])],
            vec![(1, vec![("t", 1)])],
        ),
        PermVariant::Involutions => (
            ctx(&["x"], "x")?,
            vec![(1, vec![])],
            vec![(1, vec![])],
            vec![],
        ),
        PermVariant::FullyAsym => (
            ctx(&["x"], "x")?,
            vec![(-1, vec![])],
            vec![(-1, vec![])],
            vec![(1, vec![])],
        ),
    };
    let build = |terms: &[(i64, Vec<(&str, u32)>)], k: u32| -> Result<PowerSeries> {
        let mut out = PowerSeries::zero(&c, order);
        for (coef, mono) in terms {
            let mut e = exps(&c, mono)?;
            e[c.size_index()] += k;
            out = out.add(&PowerSeries::monomial(&c, order, &e, rat(*coef))?)?;
        }
        Ok(out)
    };
    let arg = build(&a, 1)?.add(&build(&b, 2)?.scale(&Rational::new(1.into(), 2.into())))?;
    let den = PowerSeries::one(&c, order).sub(&build(&t, 1)?)?;
    Ok(arg.exp()?.mul(&den.invert()?)?)
}

// -------------------------------------------------------------------- unimodal

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnimodalVariant {
    /// Sum over the largest part.
    U1Sum,
    /// Sieve product form.
    U1Sieve,
    /// Palindromic, sum over the largest part.
    U0Sum,
    /// Palindromic, as partitions into all-odd or all-even parts.
    U0Partition,
    /// `sum t^da z^n` by enumeration.
    UtBruteforce,
}

/// Unimodal composition series. The sum forms start at a largest part of
/// at least 1, so the empty composition is not counted (constant term 0);
/// the brute-force series follows the same convention.
pub fn unimodal_gf(variant: UnimodalVariant, order: u32, caps: &Caps) -> Result<PowerSeries> {
    let c = ctx(&["z"], "z")?;
    let one = PowerSeries::one(&c, order);
    match variant {
        UnimodalVariant::U1Sum | UnimodalVariant::U0Sum => {
            let step = if variant == UnimodalVariant::U1Sum {
                1
            } else {
                2
            };
            let mut total = PowerSeries::zero(&c, order);
            let mut partitions = one.clone();
            for k in 1..=order {
                let zk = poly(&c, order, &[(1, &[("z", k)])])?;
                let lead = zk.mul(&geometric(&c, order, k))?;
                let mut term = lead.mul(&partitions)?;
                if variant == UnimodalVariant::U1Sum {
                    term = term.mul(&partitions)?;
                }
                total = total.add(&term)?;
                partitions = partitions.mul(&geometric(&c, order, step * k))?;
            }
            Ok(total)
        }
        UnimodalVariant::U1Sieve => {
            let mut theta = vec![Rational::zero(); order as usize + 1];
            let mut k = 1u32;
            while k * (k + 1) / 2 <= order {
                theta[(k * (k + 1) / 2) as usize] = if k % 2 == 1 { rat(1) } else { rat(-1) };
                k += 1;
            }
            let mut prod = PowerSeries::from_size_coeffs(&c, order, &theta);
            for k in 1..=order {
                let g = geometric(&c, order, k);
                prod = prod.mul(&g)?.mul(&g)?;
            }
            Ok(prod)
        }
        UnimodalVariant::U0Partition => {
            let mut even = one.clone();
            let mut odd = one.clone();
            for j in 1..=order {
                if 2 * j <= order {
                    even = even.mul(&geometric(&c, order, 2 * j))?;
                }
                if 2 * j - 1 <= order {
                    odd = odd.mul(&geometric(&c, order, 2 * j - 1))?;
                }
            }
            Ok(even.add(&odd)?.sub(&one.scale(&rat(2)))?)
        }
        UnimodalVariant::UtBruteforce => {
            let c = ctx(&["t", "z"], "z")?;
            let mut terms = Vec::new();
            for n in 1..=order as usize {
                let h = crate::combinat::histogram(
                    &Family::UnimodalCompositions { n },
                    &[Statistic::Da],
                    caps,
                )?;
                for (k, v) in h.counts {
                    terms.push((
                        vec![k[0], n as u32],
                        Rational::from_integer(BigInt::from(v)),
                    ));
                }
            }
            Ok(PowerSeries::from_terms(&c, order, terms)?)
        }
    }
}

// ---------------------------------------------------------------- named access

/// Whether coefficients are read as ordinary or exponential counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GfKind {
    Ogf,
    Egf,
}

/// A named catalog entry with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GfSpec {
    pub name: String,
    pub variables: Vec<String>,
    pub parameters: BTreeMap<String, String>,
    pub order: u32,
    pub kind: GfKind,
}

/// Family parameters for [`build`].
#[derive(Debug, Clone, Default)]
pub struct GfParams {
    /// Alphabet size for `words`.
    pub m: Option<u32>,
    /// Allowed parts for `comp-restricted` and friends.
    pub parts: Option<PartSet>,
    pub caps: Caps,
}

/// Stable entry names accepted by [`build`], with a one-line description.
pub const ENTRIES: &[(&str, &str)] = &[
    ("comp", "K(t,x,z): compositions, t=da, x=parts, z=sum"),
    ("comp-tz", "K(t,z)=K(t,1,z)"),
    ("comp-restricted", "K_R(t,x,z) with parts in --parts"),
    ("comp-restricted-t1", "K_R(1,x,z)=1/(1-xR(z))"),
    (
        "comp-palindromic",
        "K_R(0,x,z): palindromic compositions with parts in --parts",
    ),
    ("words", "W_m(t,x): m-ary words (--m), t=da, x=length"),
    ("balanced", "G(t,x): words with n zeros and n ones, t=da"),
    (
        "balanced-multivar",
        "pair occurrences x00,x11,x10,x01 at odd positions",
    ),
    (
        "balanced-sz",
        "u marks sz (also o00 and occurrences of 001)",
    ),
    ("balanced-001-01", "u marks occurrences of 001, v of 01"),
    (
        "balanced-marked001",
        "v marks a subset of the occurrences of 001",
    ),
    ("trees", "B(t,x): binary trees, t=da"),
    (
        "trees-pairs",
        "D(t,x): pairs of binary trees, t=unique nodes",
    ),
    ("trees-ds", "Bbar(s,x): binary trees, s=ds"),
    ("trees-sym", "B(0,x): symmetric binary trees"),
    ("trees-ds0", "Bbar(0,x): trees with ds=0"),
    ("cat", "Cat(x): Catalan numbers"),
    (
        "matchings",
        "H(r,s,t,x) EGF: r=centered, s=coupled pairs, t=da",
    ),
    ("matchings-rs", "H(r,s,1,x) EGF"),
    ("matchings-sym", "H(1,1,0,x) EGF: symmetric matchings"),
    ("matchings-no-centered", "H(0,1,1,x) EGF"),
    ("matchings-fully-asym", "H(0,0,1,x) EGF"),
    ("matchings-no-coupled", "H(1,0,1,x) EGF"),
    ("perms", "P(r,s,t,x) EGF: r=fixed points, s=2-cycles, t=da"),
    ("perms-involutions", "P(1,1,0,x) EGF"),
    ("perms-fully-asym", "P(0,0,1,x) EGF"),
    ("unimodal-t1-sum", "U(1,z), sum over the largest part"),
    ("unimodal-t1-sieve", "U(1,z), sieve product"),
    ("unimodal-t0-sum", "U(0,z), sum over the largest part"),
    (
        "unimodal-t0-partition",
        "U(0,z), all-odd or all-even partitions",
    ),
    ("unimodal-brute", "U(t,z) by enumeration, t=da"),
];

pub fn build(name: &str, params: &GfParams, order: u32) -> Result<(GfSpec, PowerSeries)> {
    let mut parameters = BTreeMap::new();
    let parts = || -> Result<PartsSpec> {
        params
            .parts
            .clone()
            .map(PartsSpec::Set)
            .ok_or_else(|| CatalogError::BadParameter(format!("`{name}` needs a part set")))
    };
    let mut kind = GfKind::Ogf;
    let s = match name {
        "comp" => compositions_gf(&CompVariant::Full, order)?,
        "comp-tz" => compositions_gf(&CompVariant::Tz, order)?,
        "comp-restricted" | "comp-restricted-t1" | "comp-palindromic" => {
            let p = parts()?;
            parameters.insert("parts".into(), params.parts.as_ref().unwrap().to_string());
            let v = match name {
                "comp-restricted" => CompVariant::Restricted(p),
                "comp-restricted-t1" => CompVariant::T1(p),
                _ => CompVariant::T0(p),
            };
            compositions_gf(&v, order)?
        }
        "words" => {
            let m = params.m.unwrap_or(2);
            parameters.insert("m".into(), m.to_string());
            words_gf(m, order)?
        }
        "balanced" => balanced_gf(BalancedVariant::G, order)?,
        "balanced-multivar" => balanced_gf(BalancedVariant::Multivar, order)?,
        "balanced-sz" => balanced_gf(BalancedVariant::Sz, order)?,
        "balanced-001-01" => balanced_gf(BalancedVariant::Joint001_01, order)?,
        "balanced-marked001" => balanced_gf(BalancedVariant::Marked001, order)?,
        "trees" => trees_gf(TreeVariant::B, order)?,
        "trees-pairs" => trees_gf(TreeVariant::D, order)?,
        "trees-ds" => trees_gf(TreeVariant::Bbar, order)?,
        "trees-sym" => trees_gf(TreeVariant::BT0, order)?,
        "trees-ds0" => trees_gf(TreeVariant::BbarS0, order)?,
        "cat" => cat_gf(order)?,
        "unimodal-t1-sum" => unimodal_gf(UnimodalVariant::U1Sum, order, &params.caps)?,
        "unimodal-t1-sieve" => unimodal_gf(UnimodalVariant::U1Sieve, order, &params.caps)?,
        "unimodal-t0-sum" => unimodal_gf(UnimodalVariant::U0Sum, order, &params.caps)?,
        "unimodal-t0-partition" => unimodal_gf(UnimodalVariant::U0Partition, order, &params.caps)?,
        "unimodal-brute" => unimodal_gf(UnimodalVariant::UtBruteforce, order, &params.caps)?,
        _ => {
            kind = GfKind::Egf;
            match name {
                "matchings" => matchings_gf(MatchingVariant::H, order)?,
                "matchings-rs" => matchings_gf(MatchingVariant::Rs, order)?,
                "matchings-sym" => matchings_gf(MatchingVariant::Sym, order)?,
                "matchings-no-centered" => matchings_gf(MatchingVariant::NoCentered, order)?,
                "matchings-fully-asym" => matchings_gf(MatchingVariant::FullyAsym, order)?,
                "matchings-no-coupled" => matchings_gf(MatchingVariant::NoCoupled, order)?,
                "perms" => perms_gf(PermVariant::P, order)?,
                "perms-involutions" => perms_gf(PermVariant::Involutions, order)?,
                "perms-fully-asym" => perms_gf(PermVariant::FullyAsym, order)?,
                other => return Err(CatalogError::UnknownEntry(other.to_string())),
            }
        }
    };
    let spec = GfSpec {
        name: name.to_string(),
        variables: s.context().names().to_vec(),
        parameters,
        order,
        kind,
    };
    Ok((spec, s))
}

impl fmt::Display for GfSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.name, self.variables.join(","))?;
        for (k, v) in &self.parameters {
            write!(f, " {k}={v}")?;
        }
        write!(f, " order={}", self.order)
    }
}

/// Counts `[size^n]` (times `n!` for EGFs) for `n = 0..=order`.
pub fn counts(kind: GfKind, s: &PowerSeries) -> Result<Vec<Rational>> {
    let ones: Vec<(String, Rational)> = s
        .context()
        .aux_names()
        .iter()
        .map(|v| (v.to_string(), Rational::one()))
        .collect();
    let vals: Vec<(&str, Rational)> = ones.iter().map(|(v, c)| (v.as_str(), c.clone())).collect();
    let total = s.specialize(&vals)?;
    Ok(match kind {
        GfKind::Ogf => total.size_coefficients(),
        GfKind::Egf => (0..=s.order())
            .map(|n| total.egf_count(n))
            .collect::<std::result::Result<_, _>>()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::to_u64;

    fn size_counts(s: &PowerSeries) -> Vec<u64> {
        counts(GfKind::Ogf, s)
            .unwrap()
            .iter()
            .map(|c| to_u64(c).unwrap())
            .collect()
    }

    fn egf_counts(s: &PowerSeries) -> Vec<u64> {
        counts(GfKind::Egf, s)
            .unwrap()
            .iter()
            .map(|c| to_u64(c).unwrap())
            .collect()
    }

    #[test]
    fn compositions_small() {
        let k = compositions_gf(&CompVariant::Tz, 8).unwrap();
        assert_eq!(k.coefficient_named(&[("z", 3)]).unwrap(), rat(2));
        assert_eq!(k.coefficient_named(&[("t", 1), ("z", 3)]).unwrap(), rat(2));
        assert_eq!(size_counts(&k)[1..], [1, 2, 4, 8, 16, 32, 64, 128]);
        let full = compositions_gf(&CompVariant::Full, 8).unwrap();
        let restricted =
            compositions_gf(&CompVariant::Restricted(PartsSpec::Set(PartSet::All)), 8).unwrap();
        assert_eq!(full, restricted);
    }

    #[test]
    fn palindromic_compositions() {
        let k0 = compositions_gf(&CompVariant::T0(PartsSpec::Set(PartSet::All)), 12).unwrap();
        let c = size_counts(&k0);
        for n in 0..=12u32 {
            assert_eq!(c[n as usize], 1 << (n / 2));
        }
        assert!(matches!(
            compositions_gf(&CompVariant::T1(PartsSpec::Set(PartSet::finite(&[]))), 5),
            Err(CatalogError::Degenerate(_))
        ));
    }

    #[test]
    fn word_counts() {
        assert_eq!(words_count(2, 4, 1), BigInt::from(8));
        assert_eq!(words_count(1, 7, 0), BigInt::one());
        assert_eq!(words_count(1, 7, 1), BigInt::zero());
        assert_eq!(words_count(3, 5, -1), BigInt::zero());
        for n in 0..8 {
            let total: BigInt = (0..=4).map(|k| words_count(3, n, k)).sum();
            assert_eq!(total, BigInt::from(3u64.pow(n)));
        }
        let w = words_gf(3, 8).unwrap();
        for n in 0..=8u32 {
            for k in 0..=4u32 {
                let c = w.coefficient_named(&[("t", k), ("x", n)]).unwrap();
                assert_eq!(c, Rational::from_integer(words_count(3, n, k as i64)));
            }
        }
    }

    #[test]
    fn balanced_series() {
        let g = balanced_gf(BalancedVariant::G, 6).unwrap();
        assert_eq!(g.coefficient_named(&[("x", 2)]).unwrap(), rat(2));
        assert_eq!(g.coefficient_named(&[("t", 2), ("x", 2)]).unwrap(), rat(4));
        assert_eq!(size_counts(&g), [1, 2, 6, 20, 70, 252, 924]);
        assert_eq!(
            balanced_counts(BalancedCount::Da { n: 3, k: 1 }),
            BigInt::from(12)
        );
        assert_eq!(
            balanced_counts(BalancedCount::Da { n: 3, k: 3 }),
            BigInt::from(8)
        );
        assert_eq!(
            balanced_counts(BalancedCount::Da { n: 3, k: 2 }),
            BigInt::zero()
        );
        assert_eq!(
            balanced_counts(BalancedCount::Occ001 { n: 3, k: 1 }),
            BigInt::from(12)
        );
        assert_eq!(
            balanced_counts(BalancedCount::Occ001 { n: 3, k: 0 }),
            BigInt::from(8)
        );
    }

    #[test]
    fn tree_series() {
        let b = trees_gf(TreeVariant::B, 12).unwrap();
        let cat: Vec<u64> = (0..=12)
            .map(|n| to_u64(&Rational::from_integer(catalan(n))).unwrap())
            .collect();
        assert_eq!(size_counts(&b), cat);
        assert_eq!(size_counts(&cat_gf(12).unwrap()), cat);
        assert_eq!(b.coefficient_named(&[("x", 3)]).unwrap(), rat(1));
        assert_eq!(b.coefficient_named(&[("t", 2), ("x", 3)]).unwrap(), rat(4));
        assert_eq!(
            size_counts(&trees_gf(TreeVariant::BT0, 9).unwrap()),
            [1, 1, 0, 1, 0, 2, 0, 5, 0, 14]
        );
        assert_eq!(
            size_counts(&trees_gf(TreeVariant::BbarS0, 5).unwrap()),
            [1, 1, 2, 4, 10, 28]
        );
        let bbar = trees_gf(TreeVariant::Bbar, 3).unwrap();
        assert_eq!(bbar.coefficient_named(&[("x", 3)]).unwrap(), rat(4));
        assert_eq!(
            bbar.coefficient_named(&[("s", 1), ("x", 3)]).unwrap(),
            rat(1)
        );
        let b0 = b.specialize(&[("t", Rational::zero())]).unwrap();
        assert_eq!(size_counts(&b0)[..10], [1, 1, 0, 1, 0, 2, 0, 5, 0, 14]);
    }

    #[test]
    fn tree_pairs_relation() {
        // B = 1 + x D
        let b = trees_gf(TreeVariant::B, 10).unwrap();
        let d = trees_gf(TreeVariant::D, 9).unwrap();
        for n in 0..=9u32 {
            for k in 0..=10u32 {
                assert_eq!(
                    b.coefficient_named(&[("t", k), ("x", n + 1)]).unwrap(),
                    d.coefficient_named(&[("t", k), ("x", n)]).unwrap()
                );
            }
        }
    }

    #[test]
    fn matching_sequences() {
        let fa = egf_counts(&matchings_gf(MatchingVariant::FullyAsym, 9).unwrap());
        assert_eq!(fa[1..], [0, 0, 8, 48, 384, 4480, 59520, 897792, 15368192]);
        let nc = egf_counts(&matchings_gf(MatchingVariant::NoCoupled, 9).unwrap());
        assert_eq!(nc[1..], [1, 1, 9, 81, 705, 7665, 100905, 1524705, 26022465]);
        let h = matchings_gf(MatchingVariant::H, 6).unwrap();
        let all = egf_counts(&h);
        for n in 0..=6u32 {
            assert_eq!(BigInt::from(all[n as usize]), double_factorial_odd(n));
        }
        assert_eq!(
            egf_counts(&matchings_gf(MatchingVariant::Sym, 5).unwrap()),
            [1, 1, 3, 7, 25, 81]
        );
        assert_eq!(
            egf_counts(&matchings_gf(MatchingVariant::NoCentered, 4).unwrap()),
            [1, 0, 2, 8, 60]
        );
    }

    #[test]
    fn permutation_series() {
        let p = perms_gf(PermVariant::P, 3).unwrap();
        let s3 = p.egf_slice(3).unwrap();
        let names = ["r", "s", "t"];
        let mut got = BTreeMap::new();
        for (e, c) in s3.iter() {
            let key: Vec<(&str, u32)> = names
                .iter()
                .copied()
                .zip(e.iter().copied())
                .filter(|(_, k)| *k > 0)
                .collect();
            got.insert(format!("{key:?}"), c.clone());
        }
        assert_eq!(got.len(), 3);
        assert_eq!(got[r#"[("r", 3)]"#], rat(1));
        assert_eq!(got[r#"[("r", 1), ("s", 1)]"#], rat(3));
        assert_eq!(got[r#"[("t", 3)]"#], rat(2));
        assert_eq!(
            egf_counts(&perms_gf(PermVariant::Involutions, 5).unwrap()),
            [1, 1, 2, 4, 10, 26]
        );
        assert_eq!(
            egf_counts(&perms_gf(PermVariant::FullyAsym, 6).unwrap()),
            [1, 0, 0, 2, 6, 24, 160]
        );
    }

    #[test]
    fn unimodal_series() {
        let caps = Caps::default();
        let u1 = size_counts(&unimodal_gf(UnimodalVariant::U1Sum, 10, &caps).unwrap());
        assert_eq!(u1, [0, 1, 2, 4, 8, 15, 27, 47, 79, 130, 209]);
        assert_eq!(
            size_counts(&unimodal_gf(UnimodalVariant::U1Sieve, 10, &caps).unwrap()),
            u1
        );
        let u0 = size_counts(&unimodal_gf(UnimodalVariant::U0Sum, 12, &caps).unwrap());
        assert_eq!(u0, [0, 1, 2, 2, 4, 3, 7, 5, 11, 8, 17, 12, 26]);
        assert_eq!(
            size_counts(&unimodal_gf(UnimodalVariant::U0Partition, 12, &caps).unwrap()),
            u0
        );
        let ut = unimodal_gf(UnimodalVariant::UtBruteforce, 10, &caps).unwrap();
        let ut1 = ut.specialize(&[("t", Rational::one())]).unwrap();
        assert_eq!(size_counts(&ut1), u1);
    }

    #[test]
    fn named_entries_build() {
        let params = GfParams {
            parts: Some(PartSet::finite(&[1, 2])),
            ..Default::default()
        };
        for (name, _) in ENTRIES {
            let (spec, s) = build(name, &params, 6).unwrap();
            assert_eq!(spec.order, 6);
            assert_eq!(s.order(), 6, "{name}");
        }
        assert!(matches!(
            build("nope", &params, 3),
            Err(CatalogError::UnknownEntry(_))
        ));
    }
}
