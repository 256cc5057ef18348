//! Elements of the complexified Clifford algebra `C_n ⊗ C`.
//!
//! A basis monomial `e_{i_1} ... e_{i_p}` with `i_1 < ... < i_p` is stored as
//! a bitmask with bit `i - 1` set for each `e_i`; the empty mask is `1`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::modulus_f64;
use crate::scalar::Scalar;

/// Largest ambient dimension representable by the bitmask encoding.
pub const MAX_CLIFFORD_DIM: usize = 32;

pub type Monomial = u32;

#[derive(Debug, Clone, PartialEq)]
pub struct CliffordElement<T = f64> {
    n: usize,
    terms: BTreeMap<Monomial, Complex<T>>,
}

/// Sign and product mask of `e_a * e_b`: reordering into increasing index
/// order contributes one sign per transposition, and each repeated
/// generator contributes `e_i^2 = -1`.
pub fn monomial_product(a: Monomial, b: Monomial) -> (bool, Monomial) {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let i = rest.trailing_zeros();
        swaps += (a >> (i + 1)).count_ones();
        rest &= rest - 1;
    }
    let squares = (a & b).count_ones();
    ((swaps + squares) % 2 == 1, a ^ b)
}

/// Indices (1-based, increasing) of the generators in a monomial.
pub fn monomial_indices(m: Monomial) -> Vec<usize> {
    (0..32).filter(|i| m >> i & 1 == 1).map(|i| i as usize + 1).collect()
}

pub fn monomial_grade(m: Monomial) -> usize {
    m.count_ones() as usize
}

impl<T: Scalar> CliffordElement<T> {
    pub fn zero(n: usize) -> Self {
        assert!(n <= MAX_CLIFFORD_DIM, "ambient dimension {n} too large");
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, value: Complex<T>) -> Self {
        let mut out = Self::zero(n);
        out.insert(0, value);
        out
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, Complex::one())
    }

    /// The generator `e_i`, 1-based.
    pub fn generator(n: usize, i: usize) -> Self {
        assert!((1..=n).contains(&i), "generator index {i} out of range 1..={n}");
        let mut out = Self::zero(n);
        out.insert(1 << (i - 1), Complex::one());
        out
    }

    /// `coef * e_{i_1} e_{i_2} ...` for indices in any order; repeated and
    /// out-of-order indices are reduced with the Clifford relations.
    pub fn monomial(n: usize, indices: &[usize], coef: Complex<T>) -> Self {
        let mut mask: Monomial = 0;
        let mut negative = false;
        for &i in indices {
            assert!((1..=n).contains(&i), "generator index {i} out of range 1..={n}");
            let (neg, m) = monomial_product(mask, 1 << (i - 1));
            negative ^= neg;
            mask = m;
        }
        let mut out = Self::zero(n);
        out.insert(mask, if negative { -coef } else { coef });
        out
    }

    /// Real vector `Σ v_j e_j` in `Λ^1`.
    pub fn vector(v: &[T]) -> Self {
        let n = v.len();
        let mut out = Self::zero(n);
        for (j, x) in v.iter().enumerate() {
            out.insert(1 << j, Complex::new(x.clone(), T::zero()));
        }
        out
    }

    /// Bivector `Σ c_ij e_i e_j` from `(i, j, c_ij)` triples (1-based, `i != j`).
    pub fn bivector(n: usize, entries: &[(usize, usize, Complex<T>)]) -> Self {
        let mut out = Self::zero(n);
        for (i, j, c) in entries {
            assert_ne!(i, j, "bivector indices must differ");
            out = &out + &Self::monomial(n, &[*i, *j], c.clone());
        }
        out
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, Complex<T>)>) -> Self {
        let mut out = Self::zero(n);
        for (m, c) in terms {
            assert!(n == 32 || m >> n == 0, "monomial uses generators beyond n = {n}");
            let cur = out.terms.remove(&m).unwrap_or_else(Complex::zero);
            out.insert(m, cur + c);
        }
        out
    }

    fn insert(&mut self, m: Monomial, c: Complex<T>) {
        if c.is_zero() {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, c);
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &Complex<T>)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn coefficient(&self, m: Monomial) -> Complex<T> {
        self.terms.get(&m).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn scalar_part(&self) -> Complex<T> {
        self.coefficient(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Projection onto `Λ^p`.
    pub fn grade_part(&self, p: usize) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| monomial_grade(**m) == p)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Sum of coefficient moduli outside `Λ^p`.
    pub fn off_grade_weight(&self, p: usize) -> f64 {
        self.terms
            .iter()
            .filter(|(m, _)| monomial_grade(**m) != p)
            .map(|(_, c)| modulus_f64(c))
            .sum()
    }

    /// Sum of coefficient moduli; bounds the operator norm of the spin image.
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(modulus_f64).sum()
    }

    pub fn scale(&self, factor: &Complex<T>) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            out.insert(*m, c.clone() * factor.clone());
        }
        out
    }

    /// The transpose anti-automorphism: reverses the order of generators in
    /// every monomial, so a degree-`p` monomial picks up `(-1)^(p(p-1)/2)`.
    pub fn reverse(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (m, c) in &self.terms {
            let p = monomial_grade(*m);
            let flip = (p * p.saturating_sub(1) / 2) % 2 == 1;
            out.insert(*m, if flip { -c.clone() } else { c.clone() });
        }
        out
    }

    /// Commutator `[a, b] = ab - ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&clifford_mul(self, other)? - &clifford_mul(other, self)?)
    }

    /// Largest coefficient modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self - other).terms.values().map(modulus_f64).fold(0.0, f64::max)
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch(format!(
                "Clifford elements of C_{} and C_{}",
                self.n, other.n
            )))
        }
    }
}

/// Product in `C_n ⊗ C`.
pub fn clifford_mul<T: Scalar>(a: &CliffordElement<T>, b: &CliffordElement<T>) -> Result<CliffordElement<T>> {
    a.check_same_n(b)?;
    let mut acc: BTreeMap<Monomial, Complex<T>> = BTreeMap::new();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            let (negative, m) = monomial_product(*ma, *mb);
            let prod = ca.clone() * cb.clone();
            let entry = acc.entry(m).or_insert_with(Complex::zero);
            *entry = if negative {
                entry.clone() - prod
            } else {
                entry.clone() + prod
            };
        }
    }
    Ok(CliffordElement::from_terms(a.n, acc))
}

impl<T: Scalar> Add for &CliffordElement<T> {
    type Output = CliffordElement<T>;

    fn add(self, rhs: Self) -> CliffordElement<T> {
        assert_eq!(self.n, rhs.n, "ambient dimension mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            let cur = out.coefficient(*m);
            out.insert(*m, cur + c.clone());
        }
        out
    }
}

impl<T: Scalar> Sub for &CliffordElement<T> {
    type Output = CliffordElement<T>;

    fn sub(self, rhs: Self) -> CliffordElement<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Neg for &CliffordElement<T> {
    type Output = CliffordElement<T>;

    fn neg(self) -> CliffordElement<T> {
        CliffordElement {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

/// Panics on mismatched dimensions; use [`clifford_mul`] for the checked form.
impl<T: Scalar> Mul for &CliffordElement<T> {
    type Output = CliffordElement<T>;

    fn mul(self, rhs: Self) -> CliffordElement<T> {
        clifford_mul(self, rhs).expect("ambient dimension mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    type E = CliffordElement<Rational64>;

    fn one() -> Complex<Rational64> {
        Complex::one()
    }

    /// Reduces a word in the generators by bubble sort, counting
    /// transpositions, then cancelling adjacent equal pairs.
    fn brute_force_word(word: &[usize]) -> (bool, Vec<usize>) {
        let mut w = word.to_vec();
        let mut negative = false;
        loop {
            let mut changed = false;
            let mut i = 0;
            while i + 1 < w.len() {
                if w[i] > w[i + 1] {
                    w.swap(i, i + 1);
                    negative = !negative;
                    changed = true;
                } else if w[i] == w[i + 1] {
                    w.drain(i..i + 2);
                    negative = !negative;
                    changed = true;
                    continue;
                }
                i += 1;
            }
            if !changed {
                return (negative, w);
            }
        }
    }

    #[test]
    fn sign_rule_matches_brute_force_for_all_pairs_up_to_six() {
        for n in 1..=6u32 {
            for a in 0..(1u32 << n) {
                for b in 0..(1u32 << n) {
                    let mut word = monomial_indices(a);
                    word.extend(monomial_indices(b));
                    let (neg, w) = brute_force_word(&word);
                    let (neg2, m) = monomial_product(a, b);
                    assert_eq!(monomial_indices(m), w, "a={a:b} b={b:b}");
                    assert_eq!(neg, neg2, "a={a:b} b={b:b}");
                }
            }
        }
    }

    #[test]
    fn basic_products() {
        let e1 = E::generator(3, 1);
        let e2 = E::generator(3, 2);
        let e12 = E::monomial(3, &[1, 2], one());
        assert_eq!(clifford_mul(&e1, &e2).unwrap(), e12);
        assert_eq!(clifford_mul(&e1, &e1).unwrap(), -&E::one(3));
        assert_eq!(clifford_mul(&e2, &e1).unwrap(), -&e12);
    }

    #[test]
    fn associativity_on_monomials() {
        let n = 5;
        for a in 0..(1u32 << n) {
            for b in (0..(1u32 << n)).step_by(3) {
                for c in (0..(1u32 << n)).step_by(5) {
                    let x = E::from_terms(n, [(a, one())]);
                    let y = E::from_terms(n, [(b, one())]);
                    let z = E::from_terms(n, [(c, one())]);
                    assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
                }
            }
        }
    }

    #[test]
    fn mismatched_dimension_is_an_error() {
        let a = E::generator(2, 1);
        let b = E::generator(3, 1);
        assert!(matches!(clifford_mul(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn reverse_is_an_anti_automorphism() {
        let n = 4;
        for a in 0..16u32 {
            for b in 0..16u32 {
                let x = E::from_terms(n, [(a, one())]);
                let y = E::from_terms(n, [(b, one())]);
                assert_eq!((&x * &y).reverse(), &y.reverse() * &x.reverse());
            }
        }
    }

    #[test]
    fn unsorted_monomial_constructor_reduces() {
        let m = E::monomial(3, &[2, 1, 3, 1], one());
        // e2 e1 e3 e1 = -e1 e2 e3 e1 = -e1 e2 (e3 e1) = e1 e2 e1 e3 = -e1 e1 e2 e3 = e2 e3
        assert_eq!(m, E::monomial(3, &[2, 3], one()));
    }
}
