//! Exact truncated multivariate power series.
//!
//! A [`PowerSeries`] lives in a [`Context`]: an ordered list of variable
//! names, one of which is the designated *size* variable. Truncation is a
//! bound on the degree of the size variable only; every other (auxiliary)
//! variable is unbounded but finitely supported in each size slice.
//!
//! Internally the terms are stored graded by size degree: slice `n` is a
//! [`Poly`] in the auxiliary variables holding the coefficient of `x^n`.
//!
//! Invariants:
//! - no stored coefficient is zero
//! - `slices.len() == order + 1`, so every stored term respects the bound
//! - binary operations require equal contexts and use the smaller order

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact rational coefficient, always in lowest terms with positive denominator.
pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `num/den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

// num-rational renormalizes through a binary gcd, which is quadratic in the
// bit length even when one side is 1. These keep operands in lowest terms
// with Euclid and skip the gcd entirely for integers.

fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    if a < b {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_zero() {
        if b.is_one() {
            return b;
        }
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// Product of two reduced rationals.
pub fn rmul(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        return Rational::zero();
    }
    match (a.denom().is_one(), b.denom().is_one()) {
        (true, true) => Rational::new_raw(a.numer() * b.numer(), BigInt::one()),
        (true, false) => {
            let g = gcd(a.numer(), b.denom());
            Rational::new_raw(a.numer() / &g * b.numer(), b.denom() / g)
        }
        (false, true) => rmul(b, a),
        (false, false) => {
            let g1 = gcd(a.numer(), b.denom());
            let g2 = gcd(b.numer(), a.denom());
            Rational::new_raw(
                (a.numer() / &g1) * (b.numer() / &g2),
                (a.denom() / g2) * (b.denom() / g1),
            )
        }
    }
}

/// In-place sum of two reduced rationals.
pub fn radd_assign(a: &mut Rational, b: &Rational) {
    if b.is_zero() {
        return;
    }
    if a.is_zero() {
        *a = b.clone();
        return;
    }
    if a.denom().is_one() && b.denom().is_one() {
        *a = Rational::new_raw(a.numer() + b.numer(), BigInt::one());
        return;
    }
    let g = gcd(a.denom(), b.denom());
    let t = a.numer() * (b.denom() / &g) + b.numer() * (a.denom() / &g);
    if t.is_zero() {
        *a = Rational::zero();
        return;
    }
    let g2 = gcd(&t, &g);
    *a = Rational::new_raw(t / &g2, (a.denom() / &g) * (b.denom() / g2));
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("unsupported branch: {0}")]
    UnsupportedBranch(String),
    #[error("monomial {monomial:?} lies beyond truncation order {order}")]
    OutOfRange { monomial: Vec<u32>, order: u32 },
    #[error("contract violation: unknown variable `{0}`")]
    UnknownVariable(String),
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// Ordered variable names plus the index of the size variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Context {
    names: Vec<String>,
    size: usize,
}

impl Context {
    pub fn new(names: &[&str], size: &str) -> Result<Arc<Self>> {
        let mut seen = std::collections::BTreeSet::new();
        for n in names {
            if n.is_empty() || !seen.insert(*n) {
                return Err(SeriesError::Contract(format!(
                    "variable names must be unique and nonempty, got {names:?}"
                )));
            }
        }
        let size = names
            .iter()
            .position(|n| *n == size)
            .ok_or_else(|| SeriesError::UnknownVariable(size.to_string()))?;
        Ok(Arc::new(Self {
            names: names.iter().map(|s| s.to_string()).collect(),
            size,
        }))
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn size_index(&self) -> usize {
        self.size
    }

    pub fn size_name(&self) -> &str {
        &self.names[self.size]
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| SeriesError::UnknownVariable(name.to_string()))
    }

    /// Position of a non-size variable inside the auxiliary exponent vector.
    fn aux_position(&self, var: usize) -> Option<usize> {
        match var.cmp(&self.size) {
            std::cmp::Ordering::Less => Some(var),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(var - 1),
        }
    }

    /// Position of the named auxiliary variable in the exponent vectors of
    /// a [`Poly`] slice.
    pub fn aux_index(&self, name: &str) -> Result<usize> {
        let i = self.index(name)?;
        self.aux_position(i)
            .ok_or_else(|| SeriesError::Contract(format!("`{name}` is the size variable")))
    }

    /// Names of the auxiliary variables, in storage order.
    pub fn aux_names(&self) -> Vec<&str> {
        self.names
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.size)
            .map(|(_, n)| n.as_str())
            .collect()
    }

    fn naux(&self) -> usize {
        self.names.len() - 1
    }

    fn split(&self, full: &[u32]) -> (u32, Vec<u32>) {
        let mut aux = Vec::with_capacity(self.naux());
        for (i, e) in full.iter().enumerate() {
            if i != self.size {
                aux.push(*e);
            }
        }
        (full[self.size], aux)
    }

    fn join(&self, degree: u32, aux: &[u32]) -> Vec<u32> {
        let mut full = Vec::with_capacity(self.names.len());
        full.extend_from_slice(&aux[..self.size]);
        full.push(degree);
        full.extend_from_slice(&aux[self.size..]);
        full
    }
}

/// Finitely supported polynomial in the auxiliary variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(naux: usize, c: Rational) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert(vec![0; naux], c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn get(&self, exps: &[u32]) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    /// The value if this polynomial is a constant (possibly zero).
    pub fn as_scalar(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next()?;
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                radd_assign(o.get_mut(), &c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Poly, c: &Rational) {
        if c.is_zero() {
            return;
        }
        for (e, v) in &other.terms {
            self.add_term(e.clone(), rmul(v, c));
        }
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v.clone());
        }
    }

    pub fn scaled(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), rmul(v, c)))
                .collect(),
        }
    }

    /// Adds `a * b` into `self`.
    pub fn add_product(&mut self, a: &Poly, b: &Poly) {
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                self.add_term(e, rmul(ca, cb));
            }
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        out.add_product(self, other);
        out
    }

    /// Sum of all coefficients (every auxiliary variable set to 1).
    pub fn total(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, v| acc + v)
    }
}

/// One serialized term: full exponent vector plus exact coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exponents: Vec<u32>,
    pub numerator: String,
    pub denominator: String,
}

/// Truncated multivariate power series with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSeries {
    ctx: Arc<Context>,
    order: u32,
    slices: Vec<Poly>,
}

impl PowerSeries {
    pub fn zero(ctx: &Arc<Context>, order: u32) -> Self {
        Self {
            ctx: Arc::clone(ctx),
            order,
            slices: vec![Poly::zero(); order as usize + 1],
        }
    }

    pub fn constant(ctx: &Arc<Context>, order: u32, c: Rational) -> Self {
        let mut s = Self::zero(ctx, order);
        s.slices[0] = Poly::scalar(ctx.naux(), c);
        s
    }

    pub fn one(ctx: &Arc<Context>, order: u32) -> Self {
        Self::constant(ctx, order, Rational::one())
    }

    /// `c` times the monomial with the given full exponent vector.
    pub fn monomial(ctx: &Arc<Context>, order: u32, exps: &[u32], c: Rational) -> Result<Self> {
        if exps.len() != ctx.len() {
            return Err(SeriesError::Contract(format!(
                "exponent vector {exps:?} has wrong length for context {:?}",
                ctx.names
            )));
        }
        let mut s = Self::zero(ctx, order);
        let (deg, aux) = ctx.split(exps);
        if deg <= order {
            s.slices[deg as usize].add_term(aux, c);
        }
        Ok(s)
    }

    /// The series consisting of a single variable.
    pub fn var(ctx: &Arc<Context>, order: u32, name: &str) -> Result<Self> {
        let idx = ctx.index(name)?;
        let mut e = vec![0; ctx.len()];
        e[idx] = 1;
        Self::monomial(ctx, order, &e, Rational::one())
    }

    /// Builds a series from `(full exponents, coefficient)` pairs; terms beyond
    /// the truncation order are discarded.
    pub fn from_terms<I>(ctx: &Arc<Context>, order: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut s = Self::zero(ctx, order);
        for (e, c) in terms {
            if e.len() != ctx.len() {
                return Err(SeriesError::Contract(format!(
                    "exponent vector {e:?} has wrong length"
                )));
            }
            let (deg, aux) = ctx.split(&e);
            if deg <= order {
                s.slices[deg as usize].add_term(aux, c);
            }
        }
        Ok(s)
    }

    /// Univariate series in the size variable from its coefficient list.
    pub fn from_size_coeffs(ctx: &Arc<Context>, order: u32, coeffs: &[Rational]) -> Self {
        let mut s = Self::zero(ctx, order);
        for (n, c) in coeffs.iter().enumerate().take(order as usize + 1) {
            s.slices[n] = Poly::scalar(ctx.naux(), c.clone());
        }
        s
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficient of `x^n` (x the size variable) as a polynomial in the
    /// auxiliary variables.
    pub fn slice(&self, n: u32) -> Result<&Poly> {
        self.slices
            .get(n as usize)
            .ok_or_else(|| SeriesError::OutOfRange {
                monomial: self.ctx.join(n, &vec![0; self.ctx.naux()]),
                order: self.order,
            })
    }

    /// All nonzero terms as full exponent vectors, ordered by size degree.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<u32>, &Rational)> + '_ {
        self.slices.iter().enumerate().flat_map(move |(n, p)| {
            p.iter()
                .map(move |(aux, c)| (self.ctx.join(n as u32, aux), c))
        })
    }

    pub fn num_terms(&self) -> usize {
        self.slices.iter().map(Poly::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.slices.iter().all(Poly::is_zero)
    }

    /// Constant term (all exponents zero).
    pub fn constant_term(&self) -> Rational {
        self.slices[0].get(&vec![0; self.ctx.naux()])
    }

    /// Discards every term above `order` (which may not exceed the current order).
    pub fn truncate(&self, order: u32) -> Result<Self> {
        if order > self.order {
            return Err(SeriesError::Contract(format!(
                "cannot extend truncation from {} to {order}",
                self.order
            )));
        }
        Ok(Self {
            ctx: Arc::clone(&self.ctx),
            order,
            slices: self.slices[..=order as usize].to_vec(),
        })
    }

    fn check_ctx(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) || self.ctx == other.ctx {
            Ok(())
        } else {
            Err(SeriesError::Contract(format!(
                "context mismatch: {:?} vs {:?}",
                self.ctx.names, other.ctx.names
            )))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let order = self.order.min(other.order);
        let mut out = self.truncate(order)?;
        for (n, p) in other.slices.iter().take(order as usize + 1).enumerate() {
            out.slices[n].add_assign(p);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self {
            ctx: Arc::clone(&self.ctx),
            order: self.order,
            slices: self.slices.iter().map(|p| p.scaled(c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let order = self.order.min(other.order);
        let a_nz: Vec<usize> = nonzero_slices(&self.slices, order);
        let b_nz: Vec<usize> = nonzero_slices(&other.slices, order);
        let slices: Vec<Poly> = (0..=order as usize)
            .into_par_iter()
            .map(|n| {
                let mut acc = Poly::zero();
                for &i in &a_nz {
                    if i > n {
                        break;
                    }
                    let j = n - i;
                    if b_nz.binary_search(&j).is_ok() {
                        acc.add_product(&self.slices[i], &other.slices[j]);
                    }
                }
                acc
            })
            .collect();
        Ok(Self {
            ctx: Arc::clone(&self.ctx),
            order,
            slices,
        })
    }

    /// The size-degree-`n` slice of `self * other`, without forming the
    /// full product.
    pub fn product_slice(&self, other: &Self, n: u32) -> Result<Poly> {
        self.check_ctx(other)?;
        if n > self.order.min(other.order) {
            return Err(SeriesError::OutOfRange {
                monomial: self.ctx.join(n, &vec![0; self.ctx.naux()]),
                order: self.order.min(other.order),
            });
        }
        let n = n as usize;
        let parts: Vec<Poly> = (0..=n)
            .into_par_iter()
            .filter(|&i| !self.slices[i].is_zero() && !other.slices[n - i].is_zero())
            .map(|i| self.slices[i].mul(&other.slices[n - i]))
            .collect();
        let mut acc = Poly::zero();
        for p in &parts {
            acc.add_assign(p);
        }
        Ok(acc)
    }

    /// Slice `n` multiplied by `n!`: the EGF read as exponential counts.
    /// Integer-valued for most labelled classes, which keeps the binomial
    /// products below free of large denominators.
    pub fn egf_scaled(&self) -> Self {
        let slices = self
            .slices
            .iter()
            .enumerate()
            .map(|(n, p)| p.scaled(&Rational::from_integer(factorial(n as u32))))
            .collect();
        Self {
            ctx: Arc::clone(&self.ctx),
            order: self.order,
            slices,
        }
    }

    /// Binomial convolution `c_n = sum_i C(n,i) a_i b_{n-i}`: the product of
    /// two EGFs, both given as exponential counts.
    pub fn binomial_mul(&self, other: &Self) -> Result<Self> {
        self.check_ctx(other)?;
        let order = self.order.min(other.order);
        let slices: Vec<Poly> = (0..=order)
            .into_par_iter()
            .map(|n| self.binomial_slice_unchecked(other, n as usize))
            .collect();
        Ok(Self {
            ctx: Arc::clone(&self.ctx),
            order,
            slices,
        })
    }

    /// Slice `n` of [`PowerSeries::binomial_mul`].
    pub fn binomial_product_slice(&self, other: &Self, n: u32) -> Result<Poly> {
        self.check_ctx(other)?;
        if n > self.order.min(other.order) {
            return Err(SeriesError::OutOfRange {
                monomial: self.ctx.join(n, &vec![0; self.ctx.naux()]),
                order: self.order.min(other.order),
            });
        }
        let n = n as usize;
        let parts: Vec<Poly> = (0..=n)
            .into_par_iter()
            .filter(|&i| !self.slices[i].is_zero() && !other.slices[n - i].is_zero())
            .map(|i| {
                let c =
                    Rational::from_integer(num_integer::binomial(BigInt::from(n), BigInt::from(i)));
                self.slices[i].mul(&other.slices[n - i]).scaled(&c)
            })
            .collect();
        let mut acc = Poly::zero();
        for p in &parts {
            acc.add_assign(p);
        }
        Ok(acc)
    }

    fn binomial_slice_unchecked(&self, other: &Self, n: usize) -> Poly {
        let mut acc = Poly::zero();
        let mut c = BigInt::one();
        for i in 0..=n {
            if !self.slices[i].is_zero() && !other.slices[n - i].is_zero() {
                let w = Rational::from_integer(c.clone());
                acc.add_scaled(&self.slices[i].mul(&other.slices[n - i]), &w);
            }
            c = c * BigInt::from(n - i) / BigInt::from(i + 1);
        }
        acc
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut result = Self::one(&self.ctx, self.order);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base)?;
            }
        }
        Ok(result)
    }

    fn scalar_constant_slice(&self) -> Option<Rational> {
        self.slices[0].as_scalar()
    }

    /// `self^alpha` for rational `alpha` via the recurrence obtained from
    /// `a * b' = alpha * a' * b` in the size variable. The constant slice must
    /// be the scalar `c`, and `c^alpha` is taken as `leading`.
    fn power_recurrence(&self, alpha: &Rational, leading: Rational) -> Self {
        let c = self.scalar_constant_slice().expect("checked by caller");
        let order = self.order as usize;
        let nz: Vec<usize> = nonzero_slices(&self.slices, self.order)
            .into_iter()
            .filter(|&k| k > 0)
            .collect();
        let mut b: Vec<Poly> = Vec::with_capacity(order + 1);
        b.push(Poly::scalar(self.ctx.naux(), leading));
        for n in 1..=order {
            let ks: Vec<usize> = nz.iter().copied().take_while(|&k| k <= n).collect();
            let term = |k: usize| -> Poly {
                let w = alpha * rat(k as i64) - rat((n - k) as i64);
                if w.is_zero() || b[n - k].is_zero() {
                    return Poly::zero();
                }
                self.slices[k].mul(&b[n - k]).scaled(&w)
            };
            let mut acc = if ks.len() > 16 {
                let parts: Vec<Poly> = ks.par_iter().map(|&k| term(k)).collect();
                let mut acc = Poly::zero();
                for p in &parts {
                    acc.add_assign(p);
                }
                acc
            } else {
                let mut acc = Poly::zero();
                for &k in &ks {
                    acc.add_assign(&term(k));
                }
                acc
            };
            acc = acc.scaled(&(Rational::one() / (&c * rat(n as i64))));
            b.push(acc);
        }
        Self {
            ctx: Arc::clone(&self.ctx),
            order: self.order,
            slices: b,
        }
    }

    /// Multiplicative inverse; the constant slice must be a nonzero scalar.
    pub fn invert(&self) -> Result<Self> {
        match self.scalar_constant_slice() {
            Some(c) if !c.is_zero() => {
                let lead = Rational::one() / &c;
                Ok(self.power_recurrence(&-Rational::one(), lead))
            }
            Some(_) => Err(SeriesError::NotInvertible(
                "constant term is zero".to_string(),
            )),
            None => Err(SeriesError::NotInvertible(
                "size-degree-0 part involves auxiliary variables".to_string(),
            )),
        }
    }

    /// `self^alpha` for a series with constant term 1 (principal branch).
    pub fn pow_rational(&self, alpha: &Rational) -> Result<Self> {
        match self.scalar_constant_slice() {
            Some(c) if c.is_one() => Ok(self.power_recurrence(alpha, Rational::one())),
            _ => Err(SeriesError::UnsupportedBranch(
                "constant term must equal 1".to_string(),
            )),
        }
    }

    /// Square root with constant term 1.
    pub fn sqrt(&self) -> Result<Self> {
        self.pow_rational(&ratio(1, 2))
    }

    /// `1/sqrt(self)` with constant term 1.
    pub fn inv_sqrt(&self) -> Result<Self> {
        self.pow_rational(&ratio(-1, 2))
    }

    /// Formal exponential; the size-degree-0 part must vanish.
    pub fn exp(&self) -> Result<Self> {
        if !self.slices[0].is_zero() {
            return Err(SeriesError::Contract(
                "exp requires a series without a size-degree-0 part".to_string(),
            ));
        }
        let order = self.order as usize;
        let nz: Vec<usize> = nonzero_slices(&self.slices, self.order);
        let mut f: Vec<Poly> = Vec::with_capacity(order + 1);
        f.push(Poly::scalar(self.ctx.naux(), Rational::one()));
        for n in 1..=order {
            let mut acc = Poly::zero();
            for &k in nz.iter().take_while(|&&k| k <= n) {
                if f[n - k].is_zero() {
                    continue;
                }
                acc.add_scaled(&self.slices[k].mul(&f[n - k]), &rat(k as i64));
            }
            f.push(acc.scaled(&ratio(1, n as i64)));
        }
        Ok(Self {
            ctx: Arc::clone(&self.ctx),
            order: self.order,
            slices: f,
        })
    }

    /// Replaces every occurrence of `var` by the series `s`.
    ///
    /// Substituting into the size variable requires `s` to have no
    /// size-degree-0 part; auxiliary variables accept any `s`.
    pub fn substitute(&self, var: &str, s: &Self) -> Result<Self> {
        self.check_ctx(s)?;
        let idx = self.ctx.index(var)?;
        let order = self.order.min(s.order);
        match self.ctx.aux_position(idx) {
            None => {
                if !s.slices[0].is_zero() {
                    return Err(SeriesError::Contract(format!(
                        "ill-founded composition: substituend for size variable `{var}` has a nonzero size-degree-0 part"
                    )));
                }
                // Horner in s over the slices of self.
                let mut acc = Self::zero(&self.ctx, order);
                for n in (0..=order as usize).rev() {
                    acc = acc.mul(s)?;
                    acc.slices[0].add_assign(&self.slices[n]);
                }
                Ok(acc)
            }
            Some(pos) => {
                if let Some(c) = s
                    .scalar_constant_slice()
                    .filter(|_| s.slices.iter().skip(1).all(Poly::is_zero))
                {
                    return Ok(self.evaluate_aux(pos, &c, order));
                }
                // Group terms by the exponent of var.
                let mut groups: BTreeMap<u32, Self> = BTreeMap::new();
                for (n, p) in self.slices.iter().take(order as usize + 1).enumerate() {
                    for (aux, c) in p.iter() {
                        let e = aux[pos];
                        let mut rest = aux.clone();
                        rest[pos] = 0;
                        groups
                            .entry(e)
                            .or_insert_with(|| Self::zero(&self.ctx, order))
                            .slices[n]
                            .add_term(rest, c.clone());
                    }
                }
                let mut out = Self::zero(&self.ctx, order);
                let s = s.truncate(order)?;
                let mut power = Self::one(&self.ctx, order);
                let mut current = 0u32;
                for (e, g) in groups {
                    while current < e {
                        power = power.mul(&s)?;
                        current += 1;
                    }
                    out = out.add(&g.mul(&power)?)?;
                }
                Ok(out)
            }
        }
    }

    fn evaluate_aux(&self, pos: usize, c: &Rational, order: u32) -> Self {
        let mut out = Self::zero(&self.ctx, order);
        let mut powers: Vec<Rational> = vec![Rational::one()];
        for (n, p) in self.slices.iter().take(order as usize + 1).enumerate() {
            for (aux, v) in p.iter() {
                let e = aux[pos] as usize;
                while powers.len() <= e {
                    let next = powers.last().unwrap() * c;
                    powers.push(next);
                }
                let mut rest = aux.clone();
                rest[pos] = 0;
                out.slices[n].add_term(rest, rmul(v, &powers[e]));
            }
        }
        out
    }

    /// Sets each named auxiliary variable to a rational value.
    pub fn specialize(&self, values: &[(&str, Rational)]) -> Result<Self> {
        let mut out = self.clone();
        for (name, v) in values {
            let c = Self::constant(&self.ctx, self.order, v.clone());
            out = out.substitute(name, &c)?;
        }
        Ok(out)
    }

    /// Rewrites the series over another context with the same size variable.
    /// Variables absent from `target` must not occur in any term.
    pub fn reembed(&self, target: &Arc<Context>) -> Result<Self> {
        if target.size_name() != self.ctx.size_name() {
            return Err(SeriesError::Contract(format!(
                "size variable differs: `{}` vs `{}`",
                self.ctx.size_name(),
                target.size_name()
            )));
        }
        let map: Vec<Option<usize>> = self
            .ctx
            .names
            .iter()
            .map(|n| target.index(n).ok())
            .collect();
        let mut out = Self::zero(target, self.order);
        for (full, c) in self.terms() {
            let mut e = vec![0; target.len()];
            for (i, &x) in full.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                match map[i] {
                    Some(j) => e[j] = x,
                    None => {
                        return Err(SeriesError::Contract(format!(
                            "variable `{}` occurs but is missing from the target context",
                            self.ctx.names[i]
                        )))
                    }
                }
            }
            let (deg, aux) = target.split(&e);
            out.slices[deg as usize].add_term(aux, c.clone());
        }
        Ok(out)
    }

    /// Applies a monomial change of variables `v -> prod w^e` with integer
    /// (possibly negative) exponents. Unlisted variables map to themselves.
    /// The size variable must keep size degree 1 and auxiliary variables size
    /// degree 0, so truncation is preserved; a negative resulting exponent is
    /// a contract violation.
    pub fn monomial_substitution(&self, images: &[(&str, &[(&str, i64)])]) -> Result<Self> {
        let k = self.ctx.len();
        let mut matrix: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                let mut row = vec![0; k];
                row[i] = 1;
                row
            })
            .collect();
        for (v, image) in images {
            let i = self.ctx.index(v)?;
            let mut row = vec![0; k];
            for (w, e) in image.iter() {
                row[self.ctx.index(w)?] += e;
            }
            let expected = i64::from(i == self.ctx.size);
            if row[self.ctx.size] != expected {
                return Err(SeriesError::Contract(format!(
                    "image of `{v}` must have size degree {expected}"
                )));
            }
            matrix[i] = row;
        }
        let mut out = Self::zero(&self.ctx, self.order);
        for (full, c) in self.terms() {
            let mut new = vec![0i64; k];
            for (i, &e) in full.iter().enumerate() {
                for (j, m) in matrix[i].iter().enumerate() {
                    new[j] += e as i64 * m;
                }
            }
            if new.iter().any(|&e| e < 0) {
                return Err(SeriesError::Contract(format!(
                    "monomial substitution produced negative exponent from {full:?}"
                )));
            }
            let new: Vec<u32> = new.into_iter().map(|e| e as u32).collect();
            let (deg, aux) = self.ctx.split(&new);
            out.slices[deg as usize].add_term(aux, c.clone());
        }
        Ok(out)
    }

    /// Divides by a monomial that divides every term; the size exponent of
    /// the divisor lowers the truncation order by the same amount.
    pub fn divide_by_monomial(&self, exps: &[u32], c: &Rational) -> Result<Self> {
        if exps.len() != self.ctx.len() || c.is_zero() {
            return Err(SeriesError::Contract("bad monomial divisor".to_string()));
        }
        let (d, aux_d) = self.ctx.split(exps);
        if d > self.order {
            return Err(SeriesError::OutOfRange {
                monomial: exps.to_vec(),
                order: self.order,
            });
        }
        let inv = Rational::one() / c;
        let mut out = Self::zero(&self.ctx, self.order - d);
        for (n, p) in self.slices.iter().enumerate() {
            for (aux, v) in p.iter() {
                let divisible = (n as u32) >= d && aux.iter().zip(&aux_d).all(|(a, b)| a >= b);
                if !divisible {
                    return Err(SeriesError::Contract(format!(
                        "term {:?} not divisible by {exps:?}",
                        self.ctx.join(n as u32, aux)
                    )));
                }
                let q: Vec<u32> = aux.iter().zip(&aux_d).map(|(a, b)| a - b).collect();
                out.slices[n - d as usize].add_term(q, rmul(v, &inv));
            }
        }
        Ok(out)
    }

    /// Exact coefficient of the monomial with the given full exponent vector.
    pub fn coefficient(&self, exps: &[u32]) -> Result<Rational> {
        if exps.len() != self.ctx.len() {
            return Err(SeriesError::Contract(format!(
                "exponent vector {exps:?} has wrong length"
            )));
        }
        let (deg, aux) = self.ctx.split(exps);
        if deg > self.order {
            return Err(SeriesError::OutOfRange {
                monomial: exps.to_vec(),
                order: self.order,
            });
        }
        Ok(self.slices[deg as usize].get(&aux))
    }

    /// Coefficient addressed by `(name, exponent)` pairs; missing names are 0.
    pub fn coefficient_named(&self, exps: &[(&str, u32)]) -> Result<Rational> {
        let mut full = vec![0; self.ctx.len()];
        for (name, e) in exps {
            full[self.ctx.index(name)?] = *e;
        }
        self.coefficient(&full)
    }

    /// Formal partial derivative. Differentiating in the size variable lowers
    /// the known order by one; auxiliary derivatives keep it.
    pub fn derivative(&self, var: &str) -> Result<Self> {
        let idx = self.ctx.index(var)?;
        match self.ctx.aux_position(idx) {
            Some(pos) => {
                let mut out = Self::zero(&self.ctx, self.order);
                for (n, p) in self.slices.iter().enumerate() {
                    for (aux, v) in p.iter() {
                        if aux[pos] > 0 {
                            let mut e = aux.clone();
                            e[pos] -= 1;
                            out.slices[n].add_term(e, v * rat(aux[pos] as i64));
                        }
                    }
                }
                Ok(out)
            }
            None => {
                let order = self.order.saturating_sub(1);
                let mut out = Self::zero(&self.ctx, order);
                for n in 1..=self.order as usize {
                    out.slices[n - 1] = self.slices[n].scaled(&rat(n as i64));
                }
                Ok(out)
            }
        }
    }

    /// `n! * [x^n]` of the monomial with all auxiliary exponents zero.
    pub fn egf_count(&self, n: u32) -> Result<Rational> {
        let slice = self.slice(n)?;
        Ok(slice.get(&vec![0; self.ctx.naux()]) * factorial_rational(n))
    }

    /// `n! * [x^n]` as a polynomial in the auxiliary variables.
    pub fn egf_slice(&self, n: u32) -> Result<Poly> {
        Ok(self.slice(n)?.scaled(&factorial_rational(n)))
    }

    /// Whether every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.slices
            .iter()
            .all(|p| p.iter().all(|(_, c)| c.denom().is_one()))
    }

    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms()
            .map(|(exponents, c)| TermRecord {
                exponents,
                numerator: c.numer().to_string(),
                denominator: c.denom().to_string(),
            })
            .collect()
    }

    pub fn from_records(ctx: &Arc<Context>, order: u32, records: &[TermRecord]) -> Result<Self> {
        let parse = |s: &str| -> Result<BigInt> {
            s.parse::<BigInt>()
                .map_err(|e| SeriesError::Contract(format!("bad integer `{s}`: {e}")))
        };
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            let den = parse(&r.denominator)?;
            if !den.is_positive() {
                return Err(SeriesError::Contract("denominator must be positive".into()));
            }
            terms.push((
                r.exponents.clone(),
                Rational::new(parse(&r.numerator)?, den),
            ));
        }
        Self::from_terms(ctx, order, terms)
    }

    /// Coefficients of the pure size-variable monomials `x^0..x^order`.
    pub fn size_coefficients(&self) -> Vec<Rational> {
        let zero = vec![0; self.ctx.naux()];
        self.slices.iter().map(|p| p.get(&zero)).collect()
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (exps, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (name, e) in self.ctx.names.iter().zip(&exps) {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O({}^{})", self.ctx.size_name(), self.order + 1)
    }
}

fn nonzero_slices(slices: &[Poly], order: u32) -> Vec<usize> {
    slices
        .iter()
        .take(order as usize + 1)
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(i, _)| i)
        .collect()
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn factorial_rational(n: u32) -> Rational {
    Rational::from_integer(factorial(n))
}

/// Converts an integral rational to `u64` if it fits.
pub fn to_u64(r: &Rational) -> Option<u64> {
    if r.denom().is_one() {
        r.numer().to_u64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx_tx() -> Arc<Context> {
        Context::new(&["t", "x"], "x").unwrap()
    }

    fn poly(ctx: &Arc<Context>, order: u32, terms: &[(&[u32], i64)]) -> PowerSeries {
        PowerSeries::from_terms(ctx, order, terms.iter().map(|(e, c)| (e.to_vec(), rat(*c))))
            .unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let c = ctx_tx();
        let a = poly(&c, 6, &[(&[0, 0], 1), (&[0, 1], 1)]);
        let b = poly(&c, 6, &[(&[0, 0], 1), (&[0, 1], -1)]);
        assert_eq!(
            a.mul(&b).unwrap(),
            poly(&c, 6, &[(&[0, 0], 1), (&[0, 2], -1)])
        );
        assert_eq!(a.add(&PowerSeries::zero(&c, 6)).unwrap(), a);
    }

    #[test]
    fn squaring_binomial() {
        let c = ctx_tx();
        let a = poly(&c, 4, &[(&[0, 0], 1), (&[1, 1], 2)]);
        let expected = poly(&c, 4, &[(&[0, 0], 1), (&[1, 1], 4), (&[2, 2], 4)]);
        assert_eq!(a.mul(&a).unwrap(), expected);
    }

    #[test]
    fn context_mismatch_is_an_error() {
        let a = PowerSeries::one(&ctx_tx(), 3);
        let other = Context::new(&["u", "x"], "x").unwrap();
        let b = PowerSeries::one(&other, 3);
        assert!(matches!(a.mul(&b), Err(SeriesError::Contract(_))));
    }

    #[test]
    fn geometric_inverse() {
        let c = ctx_tx();
        let a = poly(&c, 10, &[(&[0, 0], 1), (&[0, 1], -2)]);
        let inv = a.invert().unwrap();
        for n in 0..=10u32 {
            assert_eq!(inv.coefficient(&[0, n]).unwrap(), rat(1i64 << n));
        }
        assert_eq!(inv.invert().unwrap(), a);
    }

    #[test]
    fn composition_total_count_denominator() {
        // (1 - z^2) / (1 - z - 2 z^2) has [z^n] = 2^{n-1} for n >= 1.
        let c = Context::new(&["z"], "z").unwrap();
        let den = PowerSeries::from_size_coeffs(&c, 12, &[rat(1), rat(-1), rat(-2)]);
        let num = PowerSeries::from_size_coeffs(&c, 12, &[rat(1), rat(0), rat(-1)]);
        let k = den.invert().unwrap().mul(&num).unwrap();
        assert_eq!(k.coefficient(&[0]).unwrap(), rat(1));
        for n in 1..=12u32 {
            assert_eq!(k.coefficient(&[n]).unwrap(), rat(1i64 << (n - 1)));
        }
    }

    #[test]
    fn zero_constant_term_not_invertible() {
        let c = ctx_tx();
        let a = poly(&c, 4, &[(&[0, 1], 1)]);
        assert!(matches!(a.invert(), Err(SeriesError::NotInvertible(_))));
        let b = poly(&c, 4, &[(&[0, 0], 1), (&[1, 0], 1)]);
        assert!(matches!(b.invert(), Err(SeriesError::NotInvertible(_))));
    }

    #[test]
    fn central_binomials_from_inverse_sqrt() {
        let c = ctx_tx();
        let a = poly(&c, 8, &[(&[0, 0], 1), (&[0, 1], -4)]);
        let g = a.sqrt().unwrap().invert().unwrap();
        let expected = [1, 2, 6, 20, 70, 252, 924, 3432, 12870];
        for (n, e) in expected.iter().enumerate() {
            assert_eq!(g.coefficient(&[0, n as u32]).unwrap(), rat(*e));
        }
        assert_eq!(g, a.inv_sqrt().unwrap());
        assert_eq!(
            PowerSeries::one(&c, 5).sqrt().unwrap(),
            PowerSeries::one(&c, 5)
        );
    }

    #[test]
    fn sqrt_needs_unit_constant() {
        let c = ctx_tx();
        let a = PowerSeries::constant(&c, 3, rat(4));
        assert!(matches!(a.sqrt(), Err(SeriesError::UnsupportedBranch(_))));
    }

    #[test]
    fn exp_counts_symmetric_matchings() {
        let c = ctx_tx();
        let a = poly(&c, 6, &[(&[0, 1], 1), (&[0, 2], 1)]);
        let e = a.exp().unwrap();
        let counts: Vec<Rational> = (0..=4).map(|n| e.egf_count(n).unwrap()).collect();
        assert_eq!(counts, vec![rat(1), rat(1), rat(3), rat(7), rat(25)]);
        assert_eq!(
            PowerSeries::zero(&c, 4).exp().unwrap(),
            PowerSeries::one(&c, 4)
        );
        assert!(PowerSeries::one(&c, 4).exp().is_err());
    }

    #[test]
    fn egf_of_double_factorials() {
        let c = ctx_tx();
        let a = poly(&c, 6, &[(&[0, 0], 1), (&[0, 1], -2)])
            .inv_sqrt()
            .unwrap();
        let counts: Vec<Rational> = (0..=4).map(|n| a.egf_count(n).unwrap()).collect();
        assert_eq!(counts, vec![rat(1), rat(1), rat(3), rat(15), rat(105)]);
    }

    #[test]
    fn derivative_basics() {
        let c = ctx_tx();
        let a = poly(&c, 4, &[(&[0, 0], 1), (&[1, 1], 2)]);
        assert_eq!(a.derivative("x").unwrap(), poly(&c, 3, &[(&[1, 0], 2)]));
        assert_eq!(a.derivative("t").unwrap(), poly(&c, 4, &[(&[0, 1], 2)]));
        assert!(PowerSeries::constant(&c, 4, rat(7))
            .derivative("t")
            .unwrap()
            .is_zero());
        assert!(matches!(
            a.derivative("q"),
            Err(SeriesError::UnknownVariable(_))
        ));
    }

    #[test]
    fn coefficient_out_of_range() {
        let c = ctx_tx();
        let a = PowerSeries::one(&c, 3);
        assert!(matches!(
            a.coefficient(&[0, 4]),
            Err(SeriesError::OutOfRange { .. })
        ));
        assert_eq!(a.coefficient(&[5, 0]).unwrap(), rat(0));
    }

    #[test]
    fn substitution_into_size_variable() {
        // 1/(1-x) with x -> x/(1-2x) equals (1-2x)/(1-3x).
        let c = ctx_tx();
        let n = 8;
        let geo = poly(&c, n, &[(&[0, 0], 1), (&[0, 1], -1)])
            .invert()
            .unwrap();
        let s = poly(&c, n, &[(&[0, 0], 1), (&[0, 1], -2)])
            .invert()
            .unwrap()
            .mul(&PowerSeries::var(&c, n, "x").unwrap())
            .unwrap();
        let lhs = geo.substitute("x", &s).unwrap();
        let rhs = poly(&c, n, &[(&[0, 0], 1), (&[0, 1], -3)])
            .invert()
            .unwrap()
            .mul(&poly(&c, n, &[(&[0, 0], 1), (&[0, 1], -2)]))
            .unwrap();
        assert_eq!(lhs, rhs);
        let bad = PowerSeries::one(&c, n);
        assert!(matches!(
            geo.substitute("x", &bad),
            Err(SeriesError::Contract(_))
        ));
    }

    #[test]
    fn substitution_into_aux_variable() {
        let c = ctx_tx();
        // (1 + t x)^2 with t -> 1 - x equals (1 + x - x^2)^2.
        let a = poly(&c, 6, &[(&[0, 0], 1), (&[1, 1], 2), (&[2, 2], 1)]);
        let s = poly(&c, 6, &[(&[0, 0], 1), (&[0, 1], -1)]);
        let b = poly(&c, 6, &[(&[0, 0], 1), (&[0, 1], 1), (&[0, 2], -1)]);
        assert_eq!(a.substitute("t", &s).unwrap(), b.mul(&b).unwrap());
        let v = a.specialize(&[("t", rat(3))]).unwrap();
        assert_eq!(v, poly(&c, 6, &[(&[0, 0], 1), (&[0, 1], 6), (&[0, 2], 9)]));
    }

    #[test]
    fn monomial_division() {
        let c = ctx_tx();
        let a = poly(&c, 5, &[(&[1, 1], 2), (&[2, 3], 4)]);
        let q = a.divide_by_monomial(&[1, 1], &rat(2)).unwrap();
        assert_eq!(q, poly(&c, 4, &[(&[0, 0], 1), (&[1, 2], 2)]));
        assert!(poly(&c, 5, &[(&[0, 0], 1)])
            .divide_by_monomial(&[0, 1], &rat(1))
            .is_err());
    }

    #[test]
    fn monomial_substitution_rejects_negative_exponents() {
        let c = Context::new(&["t", "x", "q"], "x").unwrap();
        let a = poly(&c, 3, &[(&[1, 0, 0], 1)]);
        let r = a.monomial_substitution(&[("t", &[("q", -1)])]);
        assert!(matches!(r, Err(SeriesError::Contract(_))));
    }

    #[test]
    fn records_round_trip() {
        let c = ctx_tx();
        let a = poly(&c, 5, &[(&[0, 0], 1), (&[1, 1], -3)]).scale(&ratio(2, 7));
        let rec = a.to_records();
        assert_eq!(rec[1].numerator, "-6");
        assert_eq!(rec[1].denominator, "7");
        assert_eq!(PowerSeries::from_records(&c, 5, &rec).unwrap(), a);
    }

    #[test]
    fn display_is_readable() {
        let c = ctx_tx();
        let a = poly(&c, 2, &[(&[0, 0], 1), (&[1, 1], 2)]);
        assert_eq!(a.to_string(), "1 + 2*t*x + O(x^3)");
    }
}
