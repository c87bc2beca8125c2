//! Truncated Wirtinger jets.
//!
//! A [`Jet`] is the Taylor expansion of a smooth function of
//! `(z_1..z_n, z̄_1..z̄_n)` around a fixed base point, kept up to total
//! degree `order`. Coordinates are displacements from the base point, so the
//! constant coefficient is the value at the base point and differentiation is
//! exact on the stored coefficients: `∂/∂z_i` of an order-`R` jet is an
//! order-`R-1` jet.

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest supported complex dimension.
pub const MAX_DIM: usize = 12;
/// Largest supported truncation order of a non-constant jet.
pub const MAX_ORDER: u32 = 15;
/// Order of jets that are exact constants; differentiation never exhausts it.
pub const UNBOUNDED: u32 = u32::MAX;

const DEGREE_SHIFT: u32 = 120;
const ANTI_OFFSET: usize = MAX_DIM;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("jet dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("coordinate index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("dimension {0} exceeds the supported maximum {MAX_DIM}")]
    DimensionTooLarge(usize),
    #[error("jet order {0} exceeds the supported maximum {MAX_ORDER}")]
    OrderTooLarge(u32),
    #[error("jet has vanishing constant term and cannot be inverted")]
    Singular,
    #[error("logarithm needs a constant term with positive real part, got {0}")]
    LogDomain(C64),
    #[error("jet order exhausted: cannot differentiate an order-0 jet")]
    InsufficientJetOrder,
}

/// Holomorphic (`z_i`) or antiholomorphic (`z̄_i`) coordinate direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Holomorphic,
    Antiholomorphic,
}

/// Exponents `(alpha, beta)` of `z^alpha z̄^beta`, packed one nibble per
/// variable with the total degree in the top byte. Sorting by the packed key
/// sorts by total degree first.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(u128);

impl MultiIndex {
    pub const ONE: MultiIndex = MultiIndex(0);

    /// Builds an index from explicit exponent vectors (`alpha` for `z`,
    /// `beta` for `z̄`). Panics if a vector is longer than [`MAX_DIM`] or an
    /// exponent exceeds [`MAX_ORDER`].
    pub fn new(alpha: &[u32], beta: &[u32]) -> Self {
        assert!(alpha.len() <= MAX_DIM && beta.len() <= MAX_DIM);
        let mut m = MultiIndex::ONE;
        for (i, &e) in alpha.iter().enumerate() {
            m = m.with_exponent(i, e);
        }
        for (i, &e) in beta.iter().enumerate() {
            m = m.with_exponent(ANTI_OFFSET + i, e);
        }
        m
    }

    fn with_exponent(self, slot: usize, e: u32) -> Self {
        assert!(e <= MAX_ORDER, "exponent {e} exceeds {MAX_ORDER}");
        let old = self.slot(slot);
        let cleared = self.0 & !(0xF_u128 << (4 * slot));
        let deg = self.degree() - old + e;
        let body = (cleared | ((e as u128) << (4 * slot))) & ((1u128 << DEGREE_SHIFT) - 1);
        MultiIndex(body | ((deg as u128) << DEGREE_SHIFT))
    }

    fn unit(slot: usize) -> Self {
        MultiIndex((1u128 << (4 * slot)) | (1u128 << DEGREE_SHIFT))
    }

    #[inline]
    fn slot(self, slot: usize) -> u32 {
        ((self.0 >> (4 * slot)) & 0xF) as u32
    }

    /// Total degree `|alpha| + |beta|`.
    #[inline]
    pub fn degree(self) -> u32 {
        (self.0 >> DEGREE_SHIFT) as u32
    }

    /// Exponent of `z_i` (0-based `i`).
    pub fn alpha(self, i: usize) -> u32 {
        self.slot(i)
    }

    /// Exponent of `z̄_i` (0-based `i`).
    pub fn beta(self, i: usize) -> u32 {
        self.slot(ANTI_OFFSET + i)
    }

    pub fn exponent(self, i: usize, kind: Kind) -> u32 {
        match kind {
            Kind::Holomorphic => self.alpha(i),
            Kind::Antiholomorphic => self.beta(i),
        }
    }

    /// Whether any `z̄` exponent is nonzero.
    pub fn has_antiholomorphic(self) -> bool {
        let mask = ((1u128 << (4 * MAX_DIM)) - 1) << (4 * ANTI_OFFSET);
        self.0 & mask != 0
    }

    /// Swaps the roles of `z` and `z̄`.
    pub fn swapped(self) -> Self {
        let half = (1u128 << (4 * MAX_DIM)) - 1;
        let hol = self.0 & half;
        let anti = (self.0 >> (4 * ANTI_OFFSET)) & half;
        let deg = self.0 & !((1u128 << DEGREE_SHIFT) - 1);
        MultiIndex(deg | (hol << (4 * ANTI_OFFSET)) | anti)
    }

    /// Product of monomials; exponents must stay within [`MAX_ORDER`].
    #[inline]
    fn times(self, other: Self) -> Self {
        MultiIndex(self.0 + other.0)
    }

    fn slot_index(i: usize, kind: Kind) -> usize {
        match kind {
            Kind::Holomorphic => i,
            Kind::Antiholomorphic => ANTI_OFFSET + i,
        }
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alpha: Vec<u32> = (0..MAX_DIM).map(|i| self.alpha(i)).collect();
        let beta: Vec<u32> = (0..MAX_DIM).map(|i| self.beta(i)).collect();
        let last = |v: &[u32]| v.iter().rposition(|&e| e != 0).map_or(0, |p| p + 1);
        write!(f, "z{:?}zb{:?}", &alpha[..last(&alpha)], &beta[..last(&beta)])
    }
}

/// Truncated Taylor expansion in `z` and `z̄` around a base point.
///
/// Coefficients are kept sorted by [`MultiIndex`] with exact zeros removed.
/// Every stored index has degree `<= order`.
#[derive(Clone, PartialEq)]
pub struct Jet {
    n: usize,
    order: u32,
    terms: Vec<(MultiIndex, C64)>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(n={}, order=", self.n)?;
        if self.order == UNBOUNDED {
            write!(f, "∞")?;
        } else {
            write!(f, "{}", self.order)?;
        }
        write!(f, ") {{")?;
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m:?}: {c}")?;
        }
        write!(f, "}}")
    }
}

fn check_dim(n: usize) -> Result<(), JetError> {
    if n > MAX_DIM {
        Err(JetError::DimensionTooLarge(n))
    } else {
        Ok(())
    }
}

fn check_order(order: u32) -> Result<(), JetError> {
    if order > MAX_ORDER {
        Err(JetError::OrderTooLarge(order))
    } else {
        Ok(())
    }
}

impl Jet {
    /// Exact constant; its order is [`UNBOUNDED`].
    pub fn constant(n: usize, value: C64) -> Self {
        assert!(n <= MAX_DIM);
        let terms = if value == C64::new(0.0, 0.0) {
            Vec::new()
        } else {
            vec![(MultiIndex::ONE, value)]
        };
        Jet { n, order: UNBOUNDED, terms }
    }

    pub fn zero(n: usize) -> Self {
        Jet::constant(n, C64::new(0.0, 0.0))
    }

    pub fn one(n: usize) -> Self {
        Jet::constant(n, C64::new(1.0, 0.0))
    }

    /// Jet of the coordinate function `z_i` (or `z̄_i`) with 1-based `index`.
    pub fn var(index: usize, kind: Kind, base_value: C64, n: usize, order: u32) -> Result<Self, JetError> {
        check_dim(n)?;
        check_order(order)?;
        if index == 0 || index > n {
            return Err(JetError::IndexOutOfRange { index, n });
        }
        let mut terms = Vec::with_capacity(2);
        if base_value != C64::new(0.0, 0.0) {
            terms.push((MultiIndex::ONE, base_value));
        }
        if order >= 1 {
            terms.push((MultiIndex::unit(MultiIndex::slot_index(index - 1, kind)), C64::new(1.0, 0.0)));
        }
        Ok(Jet { n, order, terms })
    }

    /// Builds a jet from arbitrary coefficients, dropping indices above
    /// `order` and summing duplicates.
    pub fn from_terms(
        n: usize,
        order: u32,
        terms: impl IntoIterator<Item = (MultiIndex, C64)>,
    ) -> Result<Self, JetError> {
        check_dim(n)?;
        check_order(order)?;
        let mut v: Vec<(MultiIndex, C64)> = terms.into_iter().filter(|(m, _)| m.degree() <= order).collect();
        for (m, _) in &v {
            for i in n..MAX_DIM {
                if m.alpha(i) != 0 || m.beta(i) != 0 {
                    return Err(JetError::IndexOutOfRange { index: i + 1, n });
                }
            }
        }
        v.sort_by_key(|t| t.0);
        Ok(Jet { n, order, terms: merge_sorted(v) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
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

    pub fn terms(&self) -> &[(MultiIndex, C64)] {
        &self.terms
    }

    pub fn coeff(&self, m: MultiIndex) -> C64 {
        match self.terms.binary_search_by_key(&m, |t| t.0) {
            Ok(pos) => self.terms[pos].1,
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Value at the base point.
    pub fn constant_term(&self) -> C64 {
        self.coeff(MultiIndex::ONE)
    }

    /// Largest coefficient modulus.
    pub fn max_abs(&self) -> f64 {
        self.terms.iter().map(|t| t.1.norm()).fold(0.0, f64::max)
    }

    /// Whether no coefficient involves a `z̄` exponent.
    pub fn is_holomorphic(&self) -> bool {
        self.terms.iter().all(|(m, _)| !m.has_antiholomorphic())
    }

    /// Drops all coefficients of degree above `order` (no-op if `order` is
    /// not smaller than the current order).
    pub fn truncate(&self, order: u32) -> Jet {
        if order >= self.order {
            return self.clone();
        }
        Jet {
            n: self.n,
            order,
            terms: self.terms.iter().copied().filter(|(m, _)| m.degree() <= order).collect(),
        }
    }

    fn check_same_dim(&self, other: &Jet) -> Result<(), JetError> {
        if self.n != other.n {
            Err(JetError::DimensionMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_same_dim(other)?;
        Ok(self.combine(other, 1.0))
    }

    pub fn try_sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_same_dim(other)?;
        Ok(self.combine(other, -1.0))
    }

    fn combine(&self, other: &Jet, sign: f64) -> Jet {
        let order = self.order.min(other.order);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() || j < b.len() {
            let pick = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                (None, _) => std::cmp::Ordering::Greater,
            };
            let (m, c) = match pick {
                std::cmp::Ordering::Less => {
                    i += 1;
                    a[i - 1]
                }
                std::cmp::Ordering::Greater => {
                    j += 1;
                    (b[j - 1].0, b[j - 1].1 * sign)
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (a[i - 1].0, a[i - 1].1 + b[j - 1].1 * sign)
                }
            };
            if m.degree() <= order && c != C64::new(0.0, 0.0) {
                out.push((m, c));
            }
        }
        Jet { n: self.n, order, terms: out }
    }

    pub fn scale(&self, s: C64) -> Jet {
        if s == C64::new(0.0, 0.0) {
            return Jet { n: self.n, order: self.order, terms: Vec::new() };
        }
        Jet {
            n: self.n,
            order: self.order,
            terms: self.terms.iter().map(|&(m, c)| (m, c * s)).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Jet {
        self.scale(C64::new(s, 0.0))
    }

    /// Truncated Cauchy product; the result has the smaller of the two orders.
    pub fn try_mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_same_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Jet) -> Jet {
        let order = self.order.min(other.order);
        if self.terms.is_empty() || other.terms.is_empty() {
            return Jet { n: self.n, order, terms: Vec::new() };
        }
        let mut prods: Vec<(MultiIndex, C64)> = Vec::with_capacity(self.terms.len() * 2 + other.terms.len());
        for &(ma, ca) in &self.terms {
            let da = ma.degree();
            if da > order {
                break;
            }
            let budget = order - da;
            for &(mb, cb) in &other.terms {
                if mb.degree() > budget {
                    break;
                }
                prods.push((ma.times(mb), ca * cb));
            }
        }
        prods.sort_by_key(|t| t.0);
        Jet { n: self.n, order, terms: merge_sorted(prods) }
    }

    /// Appends the truncated pair products of `s·self·other` to `buf`
    /// without sorting; finish with [`Jet::from_products`].
    pub(crate) fn push_products(&self, other: &Jet, s: f64, order: u32, buf: &mut Vec<(MultiIndex, C64)>) {
        for &(ma, ca) in &self.terms {
            let da = ma.degree();
            if da > order {
                break;
            }
            let budget = order - da;
            let ca = ca * s;
            for &(mb, cb) in &other.terms {
                if mb.degree() > budget {
                    break;
                }
                buf.push((ma.times(mb), ca * cb));
            }
        }
    }

    pub(crate) fn from_products(n: usize, order: u32, mut buf: Vec<(MultiIndex, C64)>) -> Jet {
        buf.sort_by_key(|t| t.0);
        Jet { n, order, terms: merge_sorted(buf) }
    }

    fn split_constant(&self) -> (C64, Jet) {
        let c0 = self.constant_term();
        let rest = Jet {
            n: self.n,
            order: self.order,
            terms: self.terms.iter().copied().filter(|(m, _)| m.degree() > 0).collect(),
        };
        (c0, rest)
    }

    /// Horner evaluation of `sum_k coeffs[k] * u^k` for a jet `u` without
    /// constant term; `u` is nilpotent so `order + 1` coefficients suffice.
    fn nilpotent_series(u: &Jet, coeff: impl Fn(u32) -> C64) -> Jet {
        let n = u.n;
        if u.terms.is_empty() {
            return Jet { n, order: u.order, terms: Vec::new() }.plus_constant(coeff(0));
        }
        let top = u.order;
        let mut acc = Jet::constant(n, coeff(top)).truncate(u.order);
        for k in (0..top).rev() {
            acc = u.mul_unchecked(&acc).plus_constant(coeff(k));
        }
        acc
    }

    fn plus_constant(&self, c: C64) -> Jet {
        self.combine(&Jet::constant(self.n, c), 1.0)
    }

    /// Multiplicative inverse via the Neumann series of the nilpotent part.
    pub fn inverse(&self) -> Result<Jet, JetError> {
        let (c0, rest) = self.split_constant();
        if c0.norm() == 0.0 {
            return Err(JetError::Singular);
        }
        let inv0 = c0.inv();
        let u = rest.scale(inv0);
        let series = Jet::nilpotent_series(&u, |k| if k % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(-1.0, 0.0) });
        Ok(series.scale(inv0))
    }

    /// Principal logarithm; the constant term must have positive real part.
    pub fn log(&self) -> Result<Jet, JetError> {
        let (c0, rest) = self.split_constant();
        if !(c0.re > 0.0) {
            return Err(JetError::LogDomain(c0));
        }
        let u = rest.scale(c0.inv());
        let series = Jet::nilpotent_series(&u, |k| {
            if k == 0 {
                C64::new(0.0, 0.0)
            } else {
                let s = if k % 2 == 1 { 1.0 } else { -1.0 };
                C64::new(s / k as f64, 0.0)
            }
        });
        Ok(series.plus_constant(c0.ln()))
    }

    pub fn exp(&self) -> Jet {
        let (c0, rest) = self.split_constant();
        let mut fact = vec![1.0_f64];
        for k in 1..=rest.order.min(MAX_ORDER) {
            let prev = fact[k as usize - 1];
            fact.push(prev * k as f64);
        }
        let series = Jet::nilpotent_series(&rest, |k| C64::new(1.0 / fact[k as usize], 0.0));
        series.scale(c0.exp())
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, e: u32) -> Jet {
        let mut result = Jet::one(self.n);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// Formal partial derivative `∂/∂z_i` or `∂/∂z̄_i` (0-based `i`).
    pub fn derive(&self, i: usize, kind: Kind) -> Result<Jet, JetError> {
        if i >= self.n {
            return Err(JetError::IndexOutOfRange { index: i + 1, n: self.n });
        }
        if self.order == 0 {
            return Err(JetError::InsufficientJetOrder);
        }
        let order = if self.order == UNBOUNDED { UNBOUNDED } else { self.order - 1 };
        let slot = MultiIndex::slot_index(i, kind);
        let unit = MultiIndex::unit(slot);
        let mut terms: Vec<(MultiIndex, C64)> = self
            .terms
            .iter()
            .filter_map(|&(m, c)| {
                let e = m.slot(slot);
                (e > 0).then(|| (MultiIndex(m.0 - unit.0), c * e as f64))
            })
            .collect();
        terms.sort_by_key(|t| t.0);
        Ok(Jet { n: self.n, order, terms })
    }

    /// Complex conjugate of the underlying function: swaps `z` and `z̄`
    /// exponents and conjugates coefficients.
    pub fn conj(&self) -> Jet {
        let mut terms: Vec<(MultiIndex, C64)> = self.terms.iter().map(|&(m, c)| (m.swapped(), c.conj())).collect();
        terms.sort_by_key(|t| t.0);
        Jet { n: self.n, order: self.order, terms }
    }

    /// Sums the truncated series at displacement `dz` from the base point.
    pub fn eval_displacement(&self, dz: &[C64]) -> C64 {
        assert_eq!(dz.len(), self.n);
        let mut total = C64::new(0.0, 0.0);
        for &(m, c) in &self.terms {
            let mut v = c;
            for (i, d) in dz.iter().enumerate() {
                let a = m.alpha(i);
                let b = m.beta(i);
                if a > 0 {
                    v *= d.powu(a);
                }
                if b > 0 {
                    v *= d.conj().powu(b);
                }
            }
            total += v;
        }
        total
    }
}

fn merge_sorted(sorted: Vec<(MultiIndex, C64)>) -> Vec<(MultiIndex, C64)> {
    let mut out: Vec<(MultiIndex, C64)> = Vec::with_capacity(sorted.len());
    for (m, c) in sorted {
        match out.last_mut() {
            Some(last) if last.0 == m => last.1 += c,
            _ => out.push((m, c)),
        }
    }
    out.retain(|t| t.1 != C64::new(0.0, 0.0));
    out
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $imp:ident) => {
        impl std::ops::$tr<&Jet> for &Jet {
            type Output = Jet;
            fn $method(self, rhs: &Jet) -> Jet {
                self.$imp(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$tr<Jet> for Jet {
            type Output = Jet;
            fn $method(self, rhs: Jet) -> Jet {
                (&self).$imp(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl std::ops::Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale_real(-1.0)
    }
}

impl std::ops::Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale_real(-1.0)
    }
}
