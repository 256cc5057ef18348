//! Truncated multivariate power series in Chern and Pontryagin roots.
//!
//! A series lives in the polynomial ring over variables `(x, x_1, ..., x_r)`
//! where `x = c_1` is optional. Every variable has degree one and products
//! drop all monomials above the truncation order. Coefficients are generic:
//! exact rationals ([`num_rational::BigRational`]) for identity checks, or
//! `f64`.

use std::collections::BTreeMap;
use std::fmt::{self, Display};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{invalid, Error, Result};
use crate::report::{Status, ValidationReport};
use crate::scalar::Scalar;

pub const DEFAULT_ORDER: usize = 6;
pub const MAX_ORDER: usize = 10;
/// Coefficient tolerance for floating-point series comparisons.
pub const FLOAT_TOL: f64 = 1e-12;

pub trait Coefficient: Scalar + Display {
    /// Whether comparisons are exact.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_int(v: i64) -> Self {
        Self::from_ratio(v, 1)
    }
}

impl Coefficient for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
}

impl Coefficient for BigRational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

pub type Exponents = Vec<u8>;

#[derive(Debug, Clone, PartialEq)]
pub struct RootSeries<C> {
    has_c1: bool,
    nvars: usize,
    order: usize,
    terms: BTreeMap<Exponents, C>,
}

fn degree(e: &[u8]) -> usize {
    e.iter().map(|&k| k as usize).sum()
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

impl<C: Coefficient> RootSeries<C> {
    /// Zero series over `(x, x_1..x_r)` if `has_c1`, else over `(x_1..x_r)`.
    pub fn zero(has_c1: bool, num_roots: usize, order: usize) -> Self {
        Self {
            has_c1,
            nvars: has_c1 as usize + num_roots,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(has_c1: bool, num_roots: usize, order: usize, c: C) -> Self {
        let mut s = Self::zero(has_c1, num_roots, order);
        let e = vec![0; s.nvars];
        s.insert(e, c);
        s
    }

    pub fn one(has_c1: bool, num_roots: usize, order: usize) -> Self {
        Self::constant(has_c1, num_roots, order, C::one())
    }

    /// The series consisting of a single variable, by raw index.
    pub fn variable(has_c1: bool, num_roots: usize, order: usize, index: usize) -> Self {
        let mut s = Self::zero(has_c1, num_roots, order);
        assert!(index < s.nvars, "variable index out of range");
        if order >= 1 {
            let mut e = vec![0; s.nvars];
            e[index] = 1;
            s.insert(e, C::one());
        }
        s
    }

    /// `x = c_1`. Panics when the layout has no `c_1` variable.
    pub fn c1(num_roots: usize, order: usize) -> Self {
        Self::variable(true, num_roots, order, 0)
    }

    /// Root `x_j`, 1-based.
    pub fn root(has_c1: bool, num_roots: usize, order: usize, j: usize) -> Self {
        assert!((1..=num_roots).contains(&j), "root index out of range");
        Self::variable(has_c1, num_roots, order, has_c1 as usize + j - 1)
    }

    pub fn from_terms(
        has_c1: bool,
        num_roots: usize,
        order: usize,
        terms: impl IntoIterator<Item = (Exponents, C)>,
    ) -> Self {
        let mut s = Self::zero(has_c1, num_roots, order);
        for (e, c) in terms {
            assert_eq!(e.len(), s.nvars, "exponent vector length");
            if degree(&e) <= order {
                let cur = s.terms.remove(&e).unwrap_or_else(C::zero);
                s.insert(e, cur + c);
            }
        }
        s
    }

    fn insert(&mut self, e: Exponents, c: C) {
        if c.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, c);
        }
    }

    fn like(&self) -> Self {
        Self {
            has_c1: self.has_c1,
            nvars: self.nvars,
            order: self.order,
            terms: BTreeMap::new(),
        }
    }

    pub fn has_c1(&self) -> bool {
        self.has_c1
    }

    pub fn num_roots(&self) -> usize {
        self.nvars - self.has_c1 as usize
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, e: &[u8]) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Smallest total degree carrying a nonzero coefficient.
    pub fn lowest_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| degree(e)).min()
    }

    /// Homogeneous part of degree `d`.
    pub fn homogeneous_part(&self, d: usize) -> Self {
        let mut out = self.like();
        for (e, c) in &self.terms {
            if degree(e) == d {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    /// Drops every monomial above degree `order` and lowers the declared
    /// truncation order accordingly.
    pub fn truncate(&self, order: usize) -> Self {
        let mut out = self.like();
        out.order = order.min(self.order);
        for (e, c) in &self.terms {
            if degree(e) <= out.order {
                out.terms.insert(e.clone(), c.clone());
            }
        }
        out
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.has_c1 != other.has_c1 || self.nvars != other.nvars {
            return Err(Error::DimensionMismatch(format!(
                "series over {} variables (c1: {}) and {} variables (c1: {})",
                self.nvars, self.has_c1, other.nvars, other.has_c1
            )));
        }
        Ok(())
    }

    /// Sum, truncated to the smaller of the two orders.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let order = self.order.min(other.order);
        let mut out = self.truncate(order);
        for (e, c) in &other.terms {
            if degree(e) <= order {
                let cur = out.coefficient(e);
                out.insert(e.clone(), cur + c.clone());
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-C::one()))
    }

    /// Product, truncated to the smaller of the two orders.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let order = self.order.min(other.order);
        let mut acc: BTreeMap<Exponents, C> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            let da = degree(ea);
            if da > order {
                continue;
            }
            for (eb, cb) in &other.terms {
                if da + degree(eb) > order {
                    continue;
                }
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let entry = acc.entry(e).or_insert_with(C::zero);
                *entry = entry.clone() + ca.clone() * cb.clone();
            }
        }
        let mut out = self.like();
        out.order = order;
        for (e, c) in acc {
            out.insert(e, c);
        }
        Ok(out)
    }

    pub fn scale(&self, factor: &C) -> Self {
        let mut out = self.like();
        for (e, c) in &self.terms {
            out.insert(e.clone(), c.clone() * factor.clone());
        }
        out
    }

    /// Substitutes `x ↦ -x` and `x_j ↦ -x_j`: each monomial picks up the sign
    /// of its total degree.
    pub fn negate_variables(&self) -> Self {
        let mut out = self.like();
        for (e, c) in &self.terms {
            let v = if degree(e) % 2 == 1 { -c.clone() } else { c.clone() };
            out.insert(e.clone(), v);
        }
        out
    }

    /// `exp(s)` for a series without constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(invalid("series", "exp needs a vanishing constant term"));
        }
        let mut sum = Self::one(self.has_c1, self.num_roots(), self.order);
        let mut power = sum.clone();
        for k in 1..=self.order {
            power = power.mul(self)?;
            sum = sum.add(&power.scale(&C::from_ratio(1, factorial(k))))?;
        }
        Ok(sum)
    }

    /// Multiplicative inverse; the constant term must be invertible.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(invalid("series", "constant term is zero; not invertible"));
        }
        let inv_c0 = C::one() / c0.clone();
        // s = c0 (1 + u)  =>  1/s = (1/c0) Σ (-u)^k
        let one = Self::one(self.has_c1, self.num_roots(), self.order);
        let u = self.scale(&inv_c0).sub(&one)?;
        let minus_u = u.scale(&-C::one());
        let mut sum = one.clone();
        let mut power = one;
        for _ in 1..=self.order {
            power = power.mul(&minus_u)?;
            sum = sum.add(&power)?;
        }
        Ok(sum.scale(&inv_c0))
    }

    /// Composes with `images[i]` substituted for variable `i`. All images
    /// must live in one common target ring; the result is truncated at
    /// the minimum of the target order and this series' order.
    pub fn substitute(&self, images: &[RootSeries<C>]) -> Result<Self> {
        if images.len() != self.nvars {
            return Err(Error::DimensionMismatch(format!(
                "{} images for {} variables",
                images.len(),
                self.nvars
            )));
        }
        let Some(first) = images.first() else {
            return Ok(self.clone());
        };
        for img in images {
            first.check_compatible(img)?;
        }
        let order = images
            .iter()
            .map(|s| s.order)
            .min()
            .unwrap_or(self.order)
            .min(self.order);
        let one = RootSeries::one(first.has_c1, first.num_roots(), order);
        // powers[i][k] = images[i]^k
        let mut powers: Vec<Vec<RootSeries<C>>> = Vec::with_capacity(self.nvars);
        for img in images {
            let img = img.truncate(order);
            let mut p = vec![one.clone()];
            for k in 1..=order {
                let next = p[k - 1].mul(&img)?;
                p.push(next);
            }
            powers.push(p);
        }
        let mut out = RootSeries::zero(first.has_c1, first.num_roots(), order);
        for (e, c) in &self.terms {
            if degree(e) > order {
                continue;
            }
            let mut term = one.scale(c);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&powers[i][k as usize])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// Re-indexes the roots: root `j` of the result is root `perm[j]` of
    /// `self` (0-based permutation of the roots; `c_1` is untouched).
    pub fn permute_roots(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.num_roots(), "permutation length");
        let off = self.has_c1 as usize;
        let mut out = self.like();
        for (e, c) in &self.terms {
            let mut f = e.clone();
            for (j, &src) in perm.iter().enumerate() {
                f[off + j] = e[off + src];
            }
            out.insert(f, c.clone());
        }
        out
    }

    /// Divides by the monomial with exponents `m`; fails if some term is not
    /// divisible. The order drops by the degree of `m`.
    pub fn divide_by_monomial(&self, m: &[u8]) -> Result<Self> {
        assert_eq!(m.len(), self.nvars);
        let dm = degree(m);
        let mut out = self.like();
        out.order = self.order.saturating_sub(dm);
        for (e, c) in &self.terms {
            if e.iter().zip(m).any(|(a, b)| a < b) {
                return Err(invalid("series", format!("term {e:?} is not divisible by {m:?}")));
            }
            let q: Exponents = e.iter().zip(m).map(|(a, b)| a - b).collect();
            out.insert(q, c.clone());
        }
        Ok(out)
    }

    /// Largest coefficient difference (as `f64`) over the common order.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let order = self.order.min(other.order);
        let (a, b) = (self.truncate(order), other.truncate(order));
        let mut keys: Vec<&Exponents> = a.terms.keys().chain(b.terms.keys()).collect();
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|e| (a.coefficient(e) - b.coefficient(e)).to_f64_lossy().abs())
            .fold(0.0, f64::max)
    }

    /// Equality up to the common truncation order: exact for exact
    /// coefficients, within [`FLOAT_TOL`] otherwise.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.check_compatible(other).is_err() {
            return false;
        }
        let order = self.order.min(other.order);
        if C::EXACT {
            self.truncate(order).terms == other.truncate(order).terms
        } else {
            self.max_abs_diff(other) <= FLOAT_TOL
        }
    }

    fn variable_name(&self, i: usize) -> String {
        if self.has_c1 && i == 0 {
            "x".into()
        } else {
            format!("x{}", i + 1 - self.has_c1 as usize)
        }
    }

    /// One `monomial<TAB>coefficient` line per term, ordered by total degree
    /// and then by exponent vector.
    pub fn pretty_lines(&self) -> Vec<String> {
        let mut entries: Vec<(&Exponents, &C)> = self.terms.iter().collect();
        entries.sort_by(|(a, _), (b, _)| degree(a).cmp(&degree(b)).then_with(|| b.cmp(a)));
        entries
            .into_iter()
            .map(|(e, c)| {
                let mono: Vec<String> = e
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| {
                        if k == 1 {
                            self.variable_name(i)
                        } else {
                            format!("{}^{}", self.variable_name(i), k)
                        }
                    })
                    .collect();
                let mono = if mono.is_empty() {
                    "1".to_string()
                } else {
                    mono.join("*")
                };
                format!("{mono}\t{c}")
            })
            .collect()
    }
}

impl<C: Coefficient> Display for RootSeries<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for line in self.pretty_lines() {
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

fn check_order(order: usize) -> Result<()> {
    if order > MAX_ORDER {
        return Err(invalid(
            "order",
            format!("truncation order {order} exceeds cap {MAX_ORDER}"),
        ));
    }
    Ok(())
}

/// Single-variable series `Σ_k a_k v^k` placed on variable `index`.
fn univariate<C: Coefficient>(
    has_c1: bool,
    num_roots: usize,
    order: usize,
    index: usize,
    coeff: impl Fn(usize) -> C,
) -> RootSeries<C> {
    let mut s = RootSeries::zero(has_c1, num_roots, order);
    for k in 0..=order {
        let mut e = vec![0u8; s.nvars];
        e[index] = k as u8;
        s.insert(e, coeff(k));
    }
    s
}

/// `exp(a v)` with `a = num/den`.
fn exp_linear<C: Coefficient>(
    has_c1: bool,
    num_roots: usize,
    order: usize,
    index: usize,
    num: i64,
    den: i64,
) -> RootSeries<C> {
    univariate(has_c1, num_roots, order, index, |k| {
        C::from_ratio(num.pow(k as u32), den.pow(k as u32) * factorial(k))
    })
}

/// `e^{v/2} - e^{-v/2} = 2 sinh(v/2)`.
fn two_sinh_half<C: Coefficient>(has_c1: bool, num_roots: usize, order: usize, index: usize) -> RootSeries<C> {
    univariate(has_c1, num_roots, order, index, |k| {
        if k % 2 == 1 {
            C::from_ratio(2, 2i64.pow(k as u32) * factorial(k))
        } else {
            C::zero()
        }
    })
}

/// `(v/2) / sinh(v/2)`, by inverting `sinh(v/2) / (v/2) = Σ (v/2)^{2k} / (2k+1)!`.
fn a_hat_factor<C: Coefficient>(has_c1: bool, num_roots: usize, order: usize, index: usize) -> Result<RootSeries<C>> {
    univariate(has_c1, num_roots, order, index, |k| {
        if k % 2 == 0 {
            C::from_ratio(1, 2i64.pow(k as u32) * factorial(k + 1))
        } else {
            C::zero()
        }
    })
    .inverse()
}

/// `t = (-1)^r e^{x/2} Π_j (e^{x_j/2} - e^{-x_j/2})` over `(x, x_1..x_r)`.
pub fn t_class<C: Coefficient>(r: usize, order: usize) -> Result<RootSeries<C>> {
    check_order(order)?;
    if order < r {
        return Err(invalid(
            "order",
            format!("order {order} is below the leading degree {r}"),
        ));
    }
    let mut s = exp_linear(true, r, order, 0, 1, 2);
    for j in 1..=r {
        s = s.mul(&two_sinh_half(true, r, order, j))?;
    }
    Ok(if r % 2 == 1 { s.scale(&-C::one()) } else { s })
}

/// `Â = Π_j (x_j/2) / sinh(x_j/2)` over `(x, x_1..x_r)`.
pub fn a_hat_series<C: Coefficient>(r: usize, order: usize) -> Result<RootSeries<C>> {
    check_order(order)?;
    let mut s = RootSeries::one(true, r, order);
    for j in 1..=r {
        s = s.mul(&a_hat_factor(true, r, order, j)?)?;
    }
    Ok(s)
}

/// `Td = e^{x/2} Â` over `(x, x_1..x_r)`.
pub fn todd_series<C: Coefficient>(r: usize, order: usize) -> Result<RootSeries<C>> {
    exp_linear(true, r, order, 0, 1, 2).mul(&a_hat_series(r, order)?)
}

/// Euler class `χ = Π_j x_j`.
pub fn euler_class<C: Coefficient>(r: usize, order: usize) -> RootSeries<C> {
    let mut e = vec![1u8; r + 1];
    e[0] = 0;
    RootSeries::from_terms(true, r, order, [(e, C::one())])
}

/// `κ(ch(τ_F))`: the t-class with every root negated.
pub fn kappa_ch_thom<C: Coefficient>(r: usize, order: usize) -> Result<RootSeries<C>> {
    Ok(t_class::<C>(r, order)?.negate_variables())
}

/// `ch(L_1 ⊕ ... ⊕ L_k) = Σ e^{y_i}` over line-bundle roots `(y_1..y_k)`.
pub fn chern_character_lines<C: Coefficient>(k: usize, order: usize) -> Result<RootSeries<C>> {
    check_order(order)?;
    let mut s = RootSeries::zero(false, k, order);
    for i in 0..k {
        s = s.add(&exp_linear(false, k, order, i, 1, 1))?;
    }
    Ok(s)
}

fn record<C: Coefficient>(
    rep: &mut ValidationReport,
    id: String,
    desc: &str,
    lhs: &RootSeries<C>,
    rhs: &RootSeries<C>,
) {
    let ok = lhs.agrees_with(rhs);
    rep.push(id, desc, Status::from_bool(ok), Some(lhs.max_abs_diff(rhs)), None);
}

/// Checks `κ(ch(τ_F)) · Td(F) = χ(F)` and its fiber-integration consequence
/// `π_!(ch(τ_F)) = 1 / Td(F)`, obtained by dividing `κ(ch(τ_F))` by `χ(F)`.
pub fn verify_kappa_identity<C: Coefficient>(r: usize, order: usize) -> ValidationReport {
    let mut rep = ValidationReport::new("kappa");
    let pfx = format!("series.kappa.r{r}.order{order}");
    rep.set_config(format!("{pfx}.tolerance"), if C::EXACT { 0.0 } else { FLOAT_TOL });
    if order < r + 2 {
        rep.error(
            format!("{pfx}.precondition"),
            "order must be at least r + 2",
            &invalid("order", format!("{order} < {}", r + 2)),
        );
        return rep;
    }
    let mut run = || -> Result<()> {
        let kappa = kappa_ch_thom::<C>(r, order)?;
        let td = todd_series::<C>(r, order)?;
        let chi = euler_class::<C>(r, order);
        record(
            &mut rep,
            format!("{pfx}.product"),
            "κ(ch τ_F) · Td(F) = χ(F)",
            &kappa.mul(&td)?,
            &chi,
        );
        let mut m = vec![1u8; r + 1];
        m[0] = 0;
        match kappa.divide_by_monomial(&m) {
            Ok(q) => {
                let inv_td = td.inverse()?.truncate(q.order());
                record(
                    &mut rep,
                    format!("{pfx}.fiber_integral"),
                    "π_!(ch τ_F) = κ(ch τ_F) / χ(F) equals 1/Td(F)",
                    &q,
                    &inv_td,
                );
                let one = RootSeries::one(true, r, q.order());
                record(
                    &mut rep,
                    format!("{pfx}.fiber_integral_times_todd"),
                    "π_!(ch τ_F) · Td(F) = 1",
                    &q.mul(&td)?,
                    &one,
                );
            }
            Err(e) => {
                rep.error(format!("{pfx}.fiber_integral"), "κ(ch τ_F) divisible by χ(F)", &e);
            }
        }
        Ok(())
    };
    if let Err(e) = run() {
        rep.error(format!("{pfx}.evaluation"), "series evaluation", &e);
    }
    rep
}

/// Checks `Td(F_1 ⊕ F_2) = Td(F_1) Td(F_2)` in the ring over
/// `(x^(1), x^(2), roots of F_1, roots of F_2)` with `c_1(F_1 ⊕ F_2) = x^(1) + x^(2)`.
pub fn verify_todd_multiplicative<C: Coefficient>(r1: usize, r2: usize, order: usize) -> ValidationReport {
    let mut rep = ValidationReport::new("todd");
    let pfx = format!("series.todd.r{r1}_{r2}.order{order}");
    rep.set_config(format!("{pfx}.tolerance"), if C::EXACT { 0.0 } else { FLOAT_TOL });
    let mut run = || -> Result<()> {
        let total = 2 + r1 + r2;
        let var = |i: usize| RootSeries::<C>::variable(false, total, order, i);
        let x1 = var(0);
        let x2 = var(1);
        // Td(F1 ⊕ F2) over (x, roots1, roots2) with x ↦ x1 + x2
        let mut images = vec![x1.add(&x2)?];
        images.extend((0..r1 + r2).map(|j| var(2 + j)));
        let lhs = todd_series::<C>(r1 + r2, order)?.substitute(&images)?;
        let mut img1 = vec![x1.clone()];
        img1.extend((0..r1).map(|j| var(2 + j)));
        let mut img2 = vec![x2.clone()];
        img2.extend((0..r2).map(|j| var(2 + r1 + j)));
        let rhs = todd_series::<C>(r1, order)?
            .substitute(&img1)?
            .mul(&todd_series::<C>(r2, order)?.substitute(&img2)?)?;
        record(
            &mut rep,
            format!("{pfx}.product"),
            "Td(F1 ⊕ F2) = Td(F1) Td(F2)",
            &lhs,
            &rhs,
        );
        Ok(())
    };
    if let Err(e) = run() {
        rep.error(format!("{pfx}.evaluation"), "series evaluation", &e);
    }
    rep
}

/// Lowest-degree check of the t-class: the degree-`r` part equals
/// `(-1)^r Π x_j` and nothing of lower degree is present.
pub fn verify_t_class_leading<C: Coefficient>(r: usize, order: usize) -> ValidationReport {
    let mut rep = ValidationReport::new("tclass");
    let pfx = format!("series.tclass.r{r}");
    match t_class::<C>(r, order) {
        Ok(t) => {
            let expected = euler_class::<C>(r, order).scale(&if r % 2 == 1 { -C::one() } else { C::one() });
            let lead = t.homogeneous_part(r);
            let ok = t.lowest_degree() == Some(r) && lead.agrees_with(&expected);
            rep.push(
                format!("{pfx}.leading_term"),
                "t = (-1)^r Π x_j + higher order",
                Status::from_bool(ok),
                Some(lead.max_abs_diff(&expected)),
                None,
            );
        }
        Err(e) => {
            rep.error(format!("{pfx}.leading_term"), "t-class construction", &e);
        }
    }
    rep
}

pub type RationalSeries = RootSeries<BigRational>;
pub type FloatSeries = RootSeries<f64>;

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;
    use num_traits::{One, Zero};

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_ratio(n, d)
    }

    /// Brute-force series oracle: coefficients of a univariate product of
    /// truncated power series, computed by plain convolution on `Vec`s.
    fn convolve(a: &[Q], b: &[Q], order: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); order + 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j <= order {
                    out[i + j] += x * y;
                }
            }
        }
        out
    }

    /// Long division of univariate series (`b[0] != 0`).
    fn divide(a: &[Q], b: &[Q], order: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); order + 1];
        for k in 0..=order {
            let mut acc = a.get(k).cloned().unwrap_or_else(Q::zero);
            for j in 1..=k {
                acc -= b.get(j).cloned().unwrap_or_else(Q::zero) * out[k - j].clone();
            }
            out[k] = acc / b[0].clone();
        }
        out
    }

    fn exp_coeffs(a: Q, order: usize) -> Vec<Q> {
        (0..=order)
            .map(|k| num_traits::pow(a.clone(), k) / Q::from_int(factorial(k)))
            .collect()
    }

    #[test]
    fn multiplying_by_one_is_identity() {
        let s = todd_series::<Q>(2, 5).unwrap();
        let one = RationalSeries::one(true, 2, 5);
        assert_eq!(one.mul(&s).unwrap(), s);
    }

    #[test]
    fn negation_of_exp_half() {
        let s = exp_linear::<Q>(true, 0, 6, 0, 1, 2);
        assert_eq!(s.negate_variables(), exp_linear::<Q>(true, 0, 6, 0, -1, 2));
    }

    #[test]
    fn product_of_sinh_factors_flips_by_parity() {
        for r in 1..=3 {
            let mut p = RationalSeries::one(true, r, 4);
            for j in 1..=r {
                p = p.mul(&two_sinh_half(true, r, 4, j)).unwrap();
            }
            let sign = if r % 2 == 1 { -Q::one() } else { Q::one() };
            assert_eq!(p.negate_variables(), p.scale(&sign));
        }
    }

    #[test]
    fn t_class_r0_is_exp_half_c1() {
        let expected = RationalSeries::from_terms(
            true,
            0,
            4,
            exp_coeffs(q(1, 2), 4)
                .into_iter()
                .enumerate()
                .map(|(k, c)| (vec![k as u8], c)),
        );
        assert_eq!(t_class::<Q>(0, 4).unwrap(), expected);
    }

    #[test]
    fn t_class_r1_order3() {
        // -e^{x/2} (x1 + x1^3/24), expanded by convolution in x for each x1 power
        let t = t_class::<Q>(1, 3).unwrap();
        let ex = exp_coeffs(q(1, 2), 3);
        let mut expected = Vec::new();
        for (k, c) in ex.iter().enumerate() {
            if k < 3 {
                expected.push((vec![k as u8, 1], -c.clone()));
            }
            if k + 3 <= 3 {
                expected.push((vec![k as u8, 3], -c.clone() * q(1, 24)));
            }
        }
        assert_eq!(t, RationalSeries::from_terms(true, 1, 3, expected));
    }

    #[test]
    fn t_class_leading_terms() {
        for r in 1..=3 {
            assert!(verify_t_class_leading::<Q>(r, 6).passed());
        }
    }

    #[test]
    fn t_class_rejects_low_order() {
        assert!(t_class::<Q>(3, 2).is_err());
        assert!(t_class::<Q>(1, MAX_ORDER + 1).is_err());
    }

    #[test]
    fn todd_single_root() {
        // x = y, x1 = y: compare with y / (1 - e^{-y}) by series division
        let td = todd_series::<Q>(1, 6).unwrap();
        let y = RationalSeries::variable(false, 1, 6, 0);
        let sub = td.substitute(&[y.clone(), y]).unwrap();
        let one_minus_exp: Vec<Q> = exp_coeffs(q(-1, 1), 7)
            .into_iter()
            .enumerate()
            .map(|(k, c)| if k == 0 { Q::one() - c } else { -c })
            .collect();
        // y / (1 - e^{-y}) = 1 / ((1 - e^{-y}) / y)
        let shifted: Vec<Q> = one_minus_exp[1..].to_vec();
        let oracle = divide(&[Q::one()], &shifted, 6);
        for (k, c) in oracle.iter().enumerate() {
            assert_eq!(sub.coefficient(&[k as u8]), *c, "degree {k}");
        }
        assert_eq!(sub.coefficient(&[0]), Q::one());
        assert_eq!(sub.coefficient(&[1]), q(1, 2));
        assert_eq!(sub.coefficient(&[2]), q(1, 12));
        assert_eq!(sub.coefficient(&[3]), Q::zero());
        assert_eq!(sub.coefficient(&[4]), q(-1, 720));
    }

    #[test]
    fn a_hat_is_even() {
        let a = a_hat_series::<Q>(2, 6).unwrap();
        assert!(a.terms().all(|(e, _)| degree(e).is_multiple_of(2)));
        assert_eq!(a.constant_term(), Q::one());
        // (t/2)/sinh(t/2) = 1 - t^2/24 + 7 t^4/5760 - ...
        assert_eq!(a.coefficient(&[0, 2, 0]), q(-1, 24));
        assert_eq!(a.coefficient(&[0, 4, 0]), q(7, 5760));
        assert_eq!(a.coefficient(&[0, 2, 2]), q(1, 576));
    }

    #[test]
    fn order_zero_todd_is_one() {
        assert_eq!(todd_series::<Q>(3, 0).unwrap(), RationalSeries::one(true, 3, 0));
    }

    #[test]
    fn kappa_identity_small_cases() {
        assert!(verify_kappa_identity::<Q>(0, 2).passed());
        assert!(verify_kappa_identity::<Q>(1, 5).passed());
        assert!(verify_kappa_identity::<Q>(2, 6).passed());
        assert!(!verify_kappa_identity::<Q>(2, 3).passed());
    }

    #[test]
    fn kappa_identity_against_convolution_oracle() {
        // r = 1: κ(ch τ) = e^{-x/2} (e^{x1/2} - e^{-x1/2}), Td = e^{x/2} (x1/2)/sinh(x1/2).
        // The x-dependence cancels, leaving 2 sinh(x1/2) * (x1/2)/sinh(x1/2) = x1.
        let order = 5;
        let sinh: Vec<Q> = (0..=order)
            .map(|k| {
                if k % 2 == 1 {
                    q(2, 2i64.pow(k as u32) * factorial(k))
                } else {
                    Q::zero()
                }
            })
            .collect();
        let sinc: Vec<Q> = (0..=order)
            .map(|k| {
                if k % 2 == 0 {
                    q(1, 2i64.pow(k as u32) * factorial(k + 1))
                } else {
                    Q::zero()
                }
            })
            .collect();
        let prod = divide(&sinh, &sinc, order);
        assert_eq!(prod[1], Q::one());
        assert!(prod.iter().enumerate().all(|(k, c)| k == 1 || c.is_zero()));
        let lhs = kappa_ch_thom::<Q>(1, order)
            .unwrap()
            .mul(&todd_series::<Q>(1, order).unwrap())
            .unwrap();
        assert_eq!(lhs, euler_class::<Q>(1, order));
        assert_eq!(convolve(&prod, &sinc, order), sinh);
    }

    #[test]
    fn todd_multiplicativity_cases() {
        assert!(verify_todd_multiplicative::<Q>(1, 1, 4).passed());
        assert!(verify_todd_multiplicative::<Q>(2, 0, 4).passed());
        assert!(verify_todd_multiplicative::<Q>(2, 1, 5).passed());
        assert!(verify_todd_multiplicative::<f64>(1, 1, 4).passed());
    }

    #[test]
    fn todd_inverse_exact_and_float() {
        let td = todd_series::<Q>(2, 6).unwrap();
        let prod = td.mul(&td.inverse().unwrap()).unwrap();
        assert_eq!(prod, RationalSeries::one(true, 2, 6));
        let tdf = todd_series::<f64>(2, 6).unwrap();
        let prodf = tdf.mul(&tdf.inverse().unwrap()).unwrap();
        assert!(prodf.max_abs_diff(&FloatSeries::one(true, 2, 6)) < 1e-12);
    }

    #[test]
    fn series_are_symmetric_in_roots() {
        for s in [
            todd_series::<Q>(3, 5).unwrap(),
            a_hat_series::<Q>(3, 5).unwrap(),
            t_class::<Q>(3, 5).unwrap(),
        ] {
            for perm in (0..3).permutations(3) {
                assert_eq!(s.permute_roots(&perm), s);
            }
        }
    }

    #[test]
    fn chern_character_additive_and_multiplicative() {
        let order = 5;
        let ch2 = chern_character_lines::<Q>(2, order).unwrap();
        let v = |i| RationalSeries::variable(false, 2, order, i);
        let ch_a = exp_linear::<Q>(false, 1, order, 0, 1, 1).substitute(&[v(0)]).unwrap();
        let ch_b = exp_linear::<Q>(false, 1, order, 0, 1, 1).substitute(&[v(1)]).unwrap();
        assert_eq!(ch2, ch_a.add(&ch_b).unwrap());
        let tensor = exp_linear::<Q>(false, 1, order, 0, 1, 1)
            .substitute(&[v(0).add(&v(1)).unwrap()])
            .unwrap();
        assert_eq!(tensor, ch_a.mul(&ch_b).unwrap());
    }

    #[test]
    fn incompatible_shapes_are_errors() {
        let a = RationalSeries::one(true, 2, 4);
        let b = RationalSeries::one(true, 3, 4);
        assert!(a.mul(&b).is_err());
        assert!(a.add(&RationalSeries::one(false, 2, 4)).is_err());
        assert!(RationalSeries::zero(true, 1, 3).inverse().is_err());
    }

    #[test]
    fn pretty_printer_sorts_by_degree() {
        let td = todd_series::<Q>(1, 2).unwrap();
        let lines = td.pretty_lines();
        assert_eq!(lines[0], "1\t1");
        assert!(lines.iter().any(|l| l == "x\t1/2"));
        assert!(lines.iter().any(|l| l == "x1^2\t-1/24"));
    }
}
