//! Differential forms with jet coefficients on a polydisk, and square
//! matrices of them.
//!
//! Basis monomials are written in the canonical order
//! `dz_{i1}∧…∧dz_{ip}∧dz̄_{j1}∧…∧dz̄_{jq}` with increasing indices; every sign
//! below is the parity of the permutation that brings a product back to this
//! order. Matrix products are entrywise wedge products, so `AB` of matrix
//! forms means `A∧B`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::wjet::{Jet, JetError, Kind, MultiIndex, C64, UNBOUNDED};

/// Coefficients at or below this modulus are treated as exact zeros.
pub const PRUNE_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error("form dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("matrix ranks differ ({0} vs {1})")]
    RankMismatch(usize, usize),
    #[error(transparent)]
    Jet(#[from] JetError),
}

/// A basis element `dz_I ∧ dz̄_J`, stored as two index bitmasks (bit `i` is
/// coordinate `i+1`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Basis {
    pub hol: u16,
    pub anti: u16,
}

impl Basis {
    pub const ONE: Basis = Basis { hol: 0, anti: 0 };

    /// Basis element from 0-based holomorphic and antiholomorphic index lists.
    pub fn new(hol: &[usize], anti: &[usize]) -> Self {
        let mask = |v: &[usize]| v.iter().fold(0u16, |m, &i| m | (1 << i));
        Basis { hol: mask(hol), anti: mask(anti) }
    }

    pub fn p(self) -> u32 {
        self.hol.count_ones()
    }

    pub fn q(self) -> u32 {
        self.anti.count_ones()
    }

    pub fn degree(self) -> u32 {
        self.p() + self.q()
    }

    pub fn hol_indices(self) -> Vec<usize> {
        bits(self.hol)
    }

    pub fn anti_indices(self) -> Vec<usize> {
        bits(self.anti)
    }
}

fn bits(mask: u16) -> Vec<usize> {
    (0..16).filter(|i| mask & (1 << i) != 0).collect()
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.hol == 0 && self.anti == 0 {
            return write!(f, "1");
        }
        let mut parts = Vec::new();
        for i in self.hol_indices() {
            parts.push(format!("dz{}", i + 1));
        }
        for j in self.anti_indices() {
            parts.push(format!("dzb{}", j + 1));
        }
        write!(f, "{}", parts.join("^"))
    }
}

/// Number of pairs `(a, b)` with `a ∈ A`, `b ∈ B`, `a > b`, mod 2.
#[inline]
fn inversion_parity(a: u16, b: u16) -> u32 {
    let mut count = 0;
    let mut rest = b;
    while rest != 0 {
        let i = rest.trailing_zeros();
        count += (a as u32 >> (i + 1)).count_ones();
        rest &= rest - 1;
    }
    count & 1
}

/// Sign of `(dz_I dz̄_J) ∧ (dz_I' dz̄_J')` relative to the canonical basis,
/// or `None` when an index repeats.
#[inline]
pub fn wedge_sign(a: Basis, b: Basis) -> Option<f64> {
    if a.hol & b.hol != 0 || a.anti & b.anti != 0 {
        return None;
    }
    let parity = (a.q() * b.p()) & 1 ^ inversion_parity(a.hol, b.hol) ^ inversion_parity(a.anti, b.anti);
    Some(if parity == 0 { 1.0 } else { -1.0 })
}

/// A possibly mixed-degree form `Σ c_{I,J} dz_I ∧ dz̄_J` with jet
/// coefficients. All stored jets share the form's order.
#[derive(Clone, PartialEq)]
pub struct Form {
    n: usize,
    order: u32,
    terms: BTreeMap<Basis, Jet>,
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (b, c) in &self.terms {
            m.entry(b, c);
        }
        m.finish()
    }
}

impl Form {
    pub fn zero(n: usize) -> Self {
        Form { n, order: UNBOUNDED, terms: BTreeMap::new() }
    }

    /// The zero form carrying a finite order, so that differentiating it still
    /// consumes order.
    pub fn zero_with_order(n: usize, order: u32) -> Self {
        Form { n, order, terms: BTreeMap::new() }
    }

    pub fn scalar(c: Jet) -> Self {
        Form::monomial(Basis::ONE, c)
    }

    pub fn monomial(basis: Basis, c: Jet) -> Self {
        let n = c.n();
        assert!(
            (basis.hol | basis.anti) as usize >> n == 0,
            "basis index outside dimension {n}"
        );
        let order = c.order();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(basis, c);
        }
        Form { n, order, terms }
    }

    /// `dz_i` (0-based `i`) with unit coefficient.
    pub fn dz(n: usize, i: usize) -> Self {
        Form::monomial(Basis::new(&[i], &[]), Jet::one(n))
    }

    /// `dz̄_i` (0-based `i`) with unit coefficient.
    pub fn dzbar(n: usize, i: usize) -> Self {
        Form::monomial(Basis::new(&[], &[i]), Jet::one(n))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Basis, &Jet)> {
        self.terms.iter()
    }

    pub fn coeff(&self, basis: Basis) -> Option<&Jet> {
        self.terms.get(&basis)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest coefficient modulus over all basis terms and jet coefficients.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(Jet::max_abs).fold(0.0, f64::max)
    }

    /// The `(p, q)` buckets with nonzero support, in increasing order.
    pub fn degrees(&self) -> Vec<(u32, u32)> {
        let mut v: Vec<(u32, u32)> = self.terms.keys().map(|b| (b.p(), b.q())).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Whether every nonzero term has type `(p, q)`.
    pub fn is_homogeneous_of(&self, p: u32, q: u32) -> bool {
        self.terms.keys().all(|b| b.p() == p && b.q() == q)
    }

    pub fn truncate(&self, order: u32) -> Form {
        if order >= self.order {
            return self.clone();
        }
        let mut out = Form::zero_with_order(self.n, order);
        for (b, c) in &self.terms {
            out.insert(*b, c.truncate(order));
        }
        out
    }

    fn insert(&mut self, b: Basis, c: Jet) {
        if c.max_abs() > PRUNE_THRESHOLD {
            self.terms.insert(b, c);
        }
    }

    fn accumulate(acc: &mut BTreeMap<Basis, Jet>, b: Basis, c: Jet) {
        match acc.get_mut(&b) {
            Some(existing) => *existing = &*existing + &c,
            None => {
                acc.insert(b, c);
            }
        }
    }

    fn from_accumulated(n: usize, order: u32, acc: BTreeMap<Basis, Jet>) -> Form {
        let mut out = Form::zero_with_order(n, order);
        for (b, c) in acc {
            out.insert(b, c.truncate(order));
        }
        out
    }

    fn check_dim(&self, other: &Form) -> Result<(), FormError> {
        if self.n != other.n {
            Err(FormError::DimensionMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn try_add(&self, other: &Form) -> Result<Form, FormError> {
        self.check_dim(other)?;
        Ok(self.linear(other, 1.0))
    }

    pub fn try_sub(&self, other: &Form) -> Result<Form, FormError> {
        self.check_dim(other)?;
        Ok(self.linear(other, -1.0))
    }

    fn linear(&self, other: &Form, sign: f64) -> Form {
        let order = self.order.min(other.order);
        let mut acc = self.terms.clone();
        for (b, c) in &other.terms {
            Form::accumulate(&mut acc, *b, c.scale_real(sign));
        }
        Form::from_accumulated(self.n, order, acc)
    }

    pub fn scale(&self, s: C64) -> Form {
        let mut out = Form::zero_with_order(self.n, self.order);
        for (b, c) in &self.terms {
            out.insert(*b, c.scale(s));
        }
        out
    }

    pub fn scale_real(&self, s: f64) -> Form {
        self.scale(C64::new(s, 0.0))
    }

    /// Multiplies every coefficient by the jet `f`.
    pub fn mul_jet(&self, f: &Jet) -> Form {
        let order = self.order.min(f.order());
        let mut out = Form::zero_with_order(self.n, order);
        for (b, c) in &self.terms {
            out.insert(*b, c * f);
        }
        out
    }

    /// Wedge product with the canonical sign.
    pub fn try_wedge(&self, other: &Form) -> Result<Form, FormError> {
        self.check_dim(other)?;
        let order = self.order.min(other.order);
        // raw monomial products per basis element, merged once at the end
        let mut acc: BTreeMap<Basis, Vec<(MultiIndex, C64)>> = BTreeMap::new();
        for (ba, ca) in &self.terms {
            for (bb, cb) in &other.terms {
                if let Some(sign) = wedge_sign(*ba, *bb) {
                    let b = Basis { hol: ba.hol | bb.hol, anti: ba.anti | bb.anti };
                    ca.push_products(cb, sign, order, acc.entry(b).or_default());
                }
            }
        }
        let mut out = Form::zero_with_order(self.n, order);
        for (b, buf) in acc {
            out.insert(b, Jet::from_products(self.n, order, buf));
        }
        Ok(out)
    }

    fn lowered_order(&self) -> Result<u32, JetError> {
        match self.order {
            0 => Err(JetError::InsufficientJetOrder),
            UNBOUNDED => Ok(UNBOUNDED),
            o => Ok(o - 1),
        }
    }

    /// `∂`: adds `Σ_i ∂c/∂z_i dz_i ∧ (…)`.
    pub fn del(&self) -> Result<Form, FormError> {
        self.exterior_derivative(Kind::Holomorphic)
    }

    /// `∂̄`: adds `Σ_i ∂c/∂z̄_i dz̄_i ∧ (…)`.
    pub fn delbar(&self) -> Result<Form, FormError> {
        self.exterior_derivative(Kind::Antiholomorphic)
    }

    /// `d = ∂ + ∂̄`.
    pub fn d(&self) -> Result<Form, FormError> {
        Ok(&self.del()? + &self.delbar()?)
    }

    fn exterior_derivative(&self, kind: Kind) -> Result<Form, FormError> {
        let order = self.lowered_order()?;
        let mut acc = BTreeMap::new();
        for (b, c) in &self.terms {
            for i in 0..self.n {
                let bit = 1u16 << i;
                let (occupied, below) = match kind {
                    Kind::Holomorphic => (b.hol & bit != 0, (b.hol & (bit - 1)).count_ones()),
                    Kind::Antiholomorphic => (b.anti & bit != 0, b.p() + (b.anti & (bit - 1)).count_ones()),
                };
                if occupied {
                    continue;
                }
                let dc = c.derive(i, kind)?;
                if dc.is_zero() {
                    continue;
                }
                let nb = match kind {
                    Kind::Holomorphic => Basis { hol: b.hol | bit, anti: b.anti },
                    Kind::Antiholomorphic => Basis { hol: b.hol, anti: b.anti | bit },
                };
                Form::accumulate(&mut acc, nb, if below % 2 == 1 { -dc } else { dc });
            }
        }
        Ok(Form::from_accumulated(self.n, order, acc))
    }

    /// The `(p, q)` component.
    pub fn extract_degree(&self, p: u32, q: u32) -> Form {
        let mut out = Form::zero_with_order(self.n, self.order);
        for (b, c) in &self.terms {
            if b.p() == p && b.q() == q {
                out.terms.insert(*b, c.clone());
            }
        }
        out
    }

    /// Components of even (`true`) or odd total degree.
    pub fn parity_part(&self, even: bool) -> Form {
        let mut out = Form::zero_with_order(self.n, self.order);
        for (b, c) in &self.terms {
            if (b.degree() % 2 == 0) == even {
                out.terms.insert(*b, c.clone());
            }
        }
        out
    }

    /// Complex conjugation: `conj(c dz_I dz̄_J) = (-1)^{pq} c̄ dz_J dz̄_I`.
    pub fn conj(&self) -> Form {
        let mut out = Form::zero_with_order(self.n, self.order);
        for (b, c) in &self.terms {
            let sign = if (b.p() * b.q()) % 2 == 1 { -1.0 } else { 1.0 };
            out.terms.insert(Basis { hol: b.anti, anti: b.hol }, c.conj().scale_real(sign));
        }
        out
    }

    /// Coefficients at the base point (constant jet terms) per basis element.
    pub fn base_values(&self) -> Vec<(Basis, C64)> {
        self.terms
            .iter()
            .map(|(b, c)| (*b, c.constant_term()))
            .filter(|(_, v)| v.norm() > PRUNE_THRESHOLD)
            .collect()
    }
}

macro_rules! form_binop {
    ($ty:ty, $tr:ident, $method:ident, $imp:ident) => {
        impl std::ops::$tr<&$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                self.$imp(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$tr<$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                (&self).$imp(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$tr<&$ty> for $ty {
            type Output = $ty;
            fn $method(self, rhs: &$ty) -> $ty {
                (&self).$imp(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl std::ops::$tr<$ty> for &$ty {
            type Output = $ty;
            fn $method(self, rhs: $ty) -> $ty {
                self.$imp(&rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
    };
}

form_binop!(Form, Add, add, try_add);
form_binop!(Form, Sub, sub, try_sub);
form_binop!(Form, Mul, mul, try_wedge);

impl std::ops::Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale_real(-1.0)
    }
}

impl std::ops::Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        self.scale_real(-1.0)
    }
}

/// Square `r × r` matrix of forms over a common dimension `n`.
#[derive(Clone, PartialEq)]
pub struct MatrixForm {
    n: usize,
    r: usize,
    entries: Vec<Form>,
}

impl fmt::Debug for MatrixForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MatrixForm(r={}, n={})", self.r, self.n)?;
        for i in 0..self.r {
            for j in 0..self.r {
                writeln!(f, "  [{i}][{j}] = {:?}", self.get(i, j))?;
            }
        }
        Ok(())
    }
}

impl MatrixForm {
    pub fn zero(n: usize, r: usize) -> Self {
        MatrixForm { n, r, entries: vec![Form::zero(n); r * r] }
    }

    pub fn identity(n: usize, r: usize) -> Self {
        let mut m = MatrixForm::zero(n, r);
        for i in 0..r {
            m.entries[i * r + i] = Form::scalar(Jet::one(n));
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_entries(n: usize, r: usize, entries: Vec<Form>) -> Result<Self, FormError> {
        if entries.len() != r * r {
            return Err(FormError::RankMismatch(r * r, entries.len()));
        }
        if let Some(bad) = entries.iter().find(|e| e.n() != n) {
            return Err(FormError::DimensionMismatch(n, bad.n()));
        }
        Ok(MatrixForm { n, r, entries })
    }

    /// Matrix of 0-forms from row-major jets.
    pub fn from_jets(r: usize, jets: Vec<Jet>) -> Result<Self, FormError> {
        let n = jets.first().map_or(0, Jet::n);
        MatrixForm::from_entries(n, r, jets.into_iter().map(Form::scalar).collect())
    }

    /// Diagonal matrix of 0-forms.
    pub fn diagonal(diag: &[Jet]) -> Self {
        let r = diag.len();
        let n = diag.first().map_or(0, Jet::n);
        let mut m = MatrixForm::zero(n, r);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * r + i] = Form::scalar(d.clone());
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.r
    }

    pub fn get(&self, i: usize, j: usize) -> &Form {
        &self.entries[i * self.r + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: Form) {
        assert_eq!(f.n(), self.n);
        self.entries[i * self.r + j] = f;
    }

    pub fn entries(&self) -> &[Form] {
        &self.entries
    }

    pub fn order(&self) -> u32 {
        self.entries.iter().map(Form::order).min().unwrap_or(UNBOUNDED)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(Form::max_abs).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Form::is_zero)
    }

    pub fn map(&self, f: impl Fn(&Form) -> Form) -> MatrixForm {
        MatrixForm { n: self.n, r: self.r, entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Form) -> Result<Form, FormError>) -> Result<MatrixForm, FormError> {
        Ok(MatrixForm { n: self.n, r: self.r, entries: self.entries.iter().map(f).collect::<Result<_, _>>()? })
    }

    fn check_shape(&self, other: &MatrixForm) -> Result<(), FormError> {
        if self.r != other.r {
            return Err(FormError::RankMismatch(self.r, other.r));
        }
        if self.n != other.n {
            return Err(FormError::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MatrixForm) -> Result<MatrixForm, FormError> {
        self.check_shape(other)?;
        Ok(MatrixForm {
            n: self.n,
            r: self.r,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn try_sub(&self, other: &MatrixForm) -> Result<MatrixForm, FormError> {
        self.check_shape(other)?;
        Ok(MatrixForm {
            n: self.n,
            r: self.r,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scale(&self, s: C64) -> MatrixForm {
        self.map(|f| f.scale(s))
    }

    pub fn scale_real(&self, s: f64) -> MatrixForm {
        self.map(|f| f.scale_real(s))
    }

    /// Matrix product with entrywise wedge.
    pub fn try_wedge(&self, other: &MatrixForm) -> Result<MatrixForm, FormError> {
        self.check_shape(other)?;
        let r = self.r;
        let mut entries = Vec::with_capacity(r * r);
        for i in 0..r {
            for j in 0..r {
                let mut acc = Form::zero(self.n);
                for k in 0..r {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    let prod = if a.is_zero() || b.is_zero() {
                        Form::zero_with_order(self.n, a.order().min(b.order()))
                    } else {
                        a.try_wedge(b)?
                    };
                    acc = &acc + &prod;
                }
                entries.push(acc);
            }
        }
        Ok(MatrixForm { n: self.n, r, entries })
    }

    /// `self^k` (identity for `k = 0`).
    pub fn pow(&self, k: u32) -> MatrixForm {
        let mut out = MatrixForm::identity(self.n, self.r);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn del(&self) -> Result<MatrixForm, FormError> {
        self.try_map(Form::del)
    }

    pub fn delbar(&self) -> Result<MatrixForm, FormError> {
        self.try_map(Form::delbar)
    }

    pub fn d(&self) -> Result<MatrixForm, FormError> {
        self.try_map(Form::d)
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Form {
        (0..self.r).fold(Form::zero(self.n), |acc, i| &acc + self.get(i, i))
    }

    pub fn extract_degree(&self, p: u32, q: u32) -> MatrixForm {
        self.map(|f| f.extract_degree(p, q))
    }

    pub fn parity_part(&self, even: bool) -> MatrixForm {
        self.map(|f| f.parity_part(even))
    }

    /// Entrywise conjugation followed by transposition.
    pub fn conj_transpose(&self) -> MatrixForm {
        let r = self.r;
        let mut out = MatrixForm::zero(self.n, r);
        for i in 0..r {
            for j in 0..r {
                out.entries[i * r + j] = self.get(j, i).conj();
            }
        }
        out
    }

    /// Graded commutator `AB - (-1)^{|A||B|} BA`, extended bilinearly over
    /// the even and odd parts.
    pub fn commutator(&self, other: &MatrixForm) -> Result<MatrixForm, FormError> {
        self.check_shape(other)?;
        let mut out = MatrixForm::zero(self.n, self.r);
        for a_even in [true, false] {
            let a = self.parity_part(a_even);
            for b_even in [true, false] {
                let b = other.parity_part(b_even);
                let ab = a.try_wedge(&b)?;
                let ba = b.try_wedge(&a)?;
                let term = if !a_even && !b_even { &ab + &ba } else { &ab - &ba };
                out = &out + &term;
            }
        }
        Ok(out)
    }
}

form_binop!(MatrixForm, Add, add, try_add);
form_binop!(MatrixForm, Sub, sub, try_sub);
form_binop!(MatrixForm, Mul, mul, try_wedge);

impl std::ops::Neg for &MatrixForm {
    type Output = MatrixForm;
    fn neg(self) -> MatrixForm {
        self.scale_real(-1.0)
    }
}

impl std::ops::Neg for MatrixForm {
    type Output = MatrixForm;
    fn neg(self) -> MatrixForm {
        self.scale_real(-1.0)
    }
}
