//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Terms are kept in a `BTreeMap` keyed by [`Monomial`], whose derived order
//! is graded lexicographic with the first variable largest. Every operation
//! returns canonical form: merged terms, no stored zeros.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::{Assign, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalars::{ExactScalar, Ring};

/// Largest number of variables a polynomial may carry.
pub const MAX_VARS: usize = 12;

/// Exponent vector. Field order makes the derived `Ord` graded lexicographic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    deg: u32,
    exps: [u16; MAX_VARS],
}

impl Monomial {
    pub const ONE: Monomial = Monomial { deg: 0, exps: [0; MAX_VARS] };

    pub fn from_exponents(exps: &[u16]) -> Result<Self> {
        if exps.len() > MAX_VARS {
            return Err(Error::TooManyVariables(exps.len(), MAX_VARS));
        }
        let mut m = Monomial::ONE;
        m.exps[..exps.len()].copy_from_slice(exps);
        m.deg = exps.iter().map(|&e| e as u32).sum();
        Ok(m)
    }

    pub fn degree(&self) -> u32 {
        self.deg
    }

    pub fn exponent(&self, var: usize) -> u16 {
        self.exps[var]
    }

    pub fn exponents(&self, nvars: usize) -> &[u16] {
        &self.exps[..nvars]
    }

    fn checked_mul(&self, other: &Monomial) -> Result<Monomial> {
        let mut out = Monomial::ONE;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i].checked_add(other.exps[i]).ok_or(Error::ExponentOverflow)?;
        }
        out.deg = self.deg + other.deg;
        Ok(out)
    }

    fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    fn quotient(&self, divisor: &Monomial) -> Monomial {
        let mut out = Monomial::ONE;
        for i in 0..MAX_VARS {
            out.exps[i] = self.exps[i] - divisor.exps[i];
        }
        out.deg = self.deg - divisor.deg;
        out
    }

    fn with_exponent(&self, var: usize, e: u16) -> Monomial {
        let mut out = *self;
        out.deg = out.deg - out.exps[var] as u32 + e as u32;
        out.exps[var] = e;
        out
    }
}

/// Sparse polynomial over a named, ordered variable list.
#[derive(Clone, PartialEq, Eq)]
pub struct SparsePoly {
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, Rational>,
}

impl SparsePoly {
    pub fn zero(vars: &Arc<[String]>) -> Self {
        SparsePoly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &Arc<[String]>, c: &ExactScalar) -> Self {
        let mut p = SparsePoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::ONE, c.as_rational().clone());
        }
        p
    }

    /// Builds a variable list, checking the size limit and uniqueness.
    pub fn variables<S: AsRef<str>>(names: &[S]) -> Result<Arc<[String]>> {
        if names.len() > MAX_VARS {
            return Err(Error::TooManyVariables(names.len(), MAX_VARS));
        }
        let v: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in v.iter().enumerate() {
            if v[..i].contains(n) {
                return Err(Error::InvalidConfig(format!("duplicate variable `{n}`")));
            }
        }
        Ok(v.into())
    }

    pub fn var(vars: &Arc<[String]>, name: &str) -> Result<Self> {
        let idx = vars.iter().position(|v| v == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(SparsePoly::var_at(vars, idx))
    }

    fn var_at(vars: &Arc<[String]>, idx: usize) -> Self {
        let mut p = SparsePoly::zero(vars);
        p.terms.insert(Monomial::ONE.with_exponent(idx, 1), Rational::from(1));
        p
    }

    /// One polynomial per variable, in list order.
    pub fn generators(vars: &Arc<[String]>) -> Vec<SparsePoly> {
        (0..vars.len()).map(|i| SparsePoly::var_at(vars, i)).collect()
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs.
    pub fn from_terms<I>(vars: &Arc<[String]>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (ExactScalar, Vec<u16>)>,
    {
        let mut p = SparsePoly::zero(vars);
        for (c, e) in terms {
            if e.len() != vars.len() {
                return Err(Error::InvalidConfig(format!(
                    "exponent vector of length {} for {} variables",
                    e.len(),
                    vars.len()
                )));
            }
            p.add_term(Monomial::from_exponents(&e)?, c.as_rational());
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: &Rational) {
        if c.cmp0() == std::cmp::Ordering::Equal {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().cmp0() == std::cmp::Ordering::Equal {
                    o.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &Arc<[String]> {
        &self.vars
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

    /// Terms from the largest monomial down.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, ExactScalar)> + '_ {
        self.terms.iter().rev().map(|(m, c)| (m, ExactScalar::from_rational(c.clone())))
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.deg)
    }

    pub fn degree_in(&self, var: &str) -> Result<u32> {
        let idx = self.index_of(var)?;
        Ok(self.terms.keys().map(|m| m.exps[idx] as u32).max().unwrap_or(0))
    }

    /// The constant value, when the polynomial has no variable terms.
    pub fn as_constant(&self) -> Option<ExactScalar> {
        match self.terms.len() {
            0 => Some(ExactScalar::zero()),
            1 => self.terms.get(&Monomial::ONE).map(|c| ExactScalar::from_rational(c.clone())),
            _ => None,
        }
    }

    pub fn leading_term(&self) -> Option<(Monomial, ExactScalar)> {
        self.terms.iter().next_back().map(|(m, c)| (*m, ExactScalar::from_rational(c.clone())))
    }

    fn index_of(&self, var: &str) -> Result<usize> {
        self.vars.iter().position(|v| v == var).ok_or_else(|| Error::UnknownVariable(var.to_string()))
    }

    fn same_vars(&self, other: &SparsePoly) -> Result<()> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::VariableMismatch)
        }
    }

    pub fn checked_add(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.same_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.same_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, &Rational::from(-c));
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &SparsePoly) -> Result<SparsePoly> {
        self.same_vars(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(SparsePoly::zero(&self.vars));
        }
        let mut acc: HashMap<Monomial, Rational> = HashMap::with_capacity(self.terms.len() * other.terms.len() / 2 + 1);
        let mut tmp = Rational::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.checked_mul(mb)?;
                tmp.assign(ca * cb);
                acc.entry(m).and_modify(|v| *v += &tmp).or_insert_with(|| tmp.clone());
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| c.cmp0() != std::cmp::Ordering::Equal).collect();
        Ok(SparsePoly { vars: self.vars.clone(), terms })
    }

    pub fn scale(&self, c: &ExactScalar) -> SparsePoly {
        if c.is_zero() {
            return SparsePoly::zero(&self.vars);
        }
        SparsePoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, v)| (*m, Rational::from(v * c.as_rational()))).collect(),
        }
    }

    /// Exact quotient by trial division on leading terms (graded lex).
    pub fn divide_exact(&self, divisor: &SparsePoly) -> Result<SparsePoly> {
        self.same_vars(divisor)?;
        let (lm, lc) = match divisor.terms.iter().next_back() {
            Some((m, c)) => (*m, c.clone()),
            None => return Err(Error::DivisionByZero),
        };
        let tail: Vec<(Monomial, Rational)> =
            divisor.terms.iter().rev().skip(1).map(|(m, c)| (*m, c.clone())).collect();
        let mut rem = self.terms.clone();
        let mut quot: BTreeMap<Monomial, Rational> = BTreeMap::new();
        let mut tmp = Rational::new();
        while let Some((m, c)) = rem.pop_last() {
            if !lm.divides(&m) {
                return Err(Error::NotDivisible);
            }
            let qm = m.quotient(&lm);
            let qc = Rational::from(&c / &lc);
            for (tm, tc) in &tail {
                let prod = qm.checked_mul(tm)?;
                tmp.assign(&qc * tc);
                use std::collections::btree_map::Entry;
                match rem.entry(prod) {
                    Entry::Vacant(v) => {
                        v.insert(Rational::from(-&tmp));
                    }
                    Entry::Occupied(mut o) => {
                        *o.get_mut() -= &tmp;
                        if o.get().cmp0() == std::cmp::Ordering::Equal {
                            o.remove();
                        }
                    }
                }
            }
            quot.insert(qm, qc);
        }
        Ok(SparsePoly { vars: self.vars.clone(), terms: quot })
    }

    /// Evaluates at an assignment covering every variable.
    pub fn eval(&self, assignment: &HashMap<String, ExactScalar>) -> Result<ExactScalar> {
        let values = self
            .vars
            .iter()
            .map(|v| assignment.get(v).cloned().ok_or_else(|| Error::MissingVariable(v.clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.eval_in(&values, &ExactScalar::zero()))
    }

    /// Evaluates with values given in variable order, in any ring.
    /// `zero` fixes the target ring element (precision, variable list).
    pub fn eval_in<T: Ring>(&self, values: &[T], zero: &T) -> T {
        assert_eq!(values.len(), self.vars.len(), "one value per variable");
        let mut powers: Vec<Vec<T>> = values.iter().map(|v| vec![zero.one_like(), v.clone()]).collect();
        let mut acc = zero.zero_like();
        for (m, c) in &self.terms {
            let mut t = zero.constant_like(&ExactScalar::from_rational(c.clone()));
            for (i, pw) in powers.iter_mut().enumerate() {
                let e = m.exps[i] as usize;
                if e == 0 {
                    continue;
                }
                while pw.len() <= e {
                    let next = pw[pw.len() - 1].clone() * &pw[1];
                    pw.push(next);
                }
                t = t * &pw[e];
            }
            acc = acc + &t;
        }
        acc
    }

    /// Coefficients as polynomials in the other variables, indexed by the
    /// power of `var`.
    pub fn coefficients_in(&self, var: &str) -> Result<Vec<SparsePoly>> {
        let idx = self.index_of(var)?;
        let deg = self.degree_in(var)? as usize;
        let mut out = vec![SparsePoly::zero(&self.vars); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exps[idx] as usize;
            out[e].terms.insert(m.with_exponent(idx, 0), c.clone());
        }
        Ok(out)
    }

    /// Substitutes polynomials (over a common target variable list) for
    /// every variable.
    pub fn compose(&self, images: &[SparsePoly]) -> Result<SparsePoly> {
        if images.len() != self.vars.len() {
            return Err(Error::InvalidConfig(format!("{} images for {} variables", images.len(), self.vars.len())));
        }
        let zero = match images.first() {
            Some(p) => SparsePoly::zero(&p.vars),
            None => return Ok(self.clone()),
        };
        for p in images {
            p.same_vars(&zero)?;
        }
        Ok(self.eval_in(images, &zero))
    }

    pub fn parse(text: &str, vars: &Arc<[String]>) -> Result<SparsePoly> {
        let mut p = SparsePoly::zero(vars);
        let text: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if text.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut start = 0;
        let bytes = text.as_bytes();
        let mut pieces = Vec::new();
        for i in 1..=bytes.len() {
            if i == bytes.len() || ((bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^') {
                pieces.push(&text[start..i]);
                start = i;
            }
        }
        for piece in pieces {
            let (neg, body) = match piece.as_bytes()[0] {
                b'-' => (true, &piece[1..]),
                b'+' => (false, &piece[1..]),
                _ => (false, piece),
            };
            if body.is_empty() {
                return Err(Error::Parse(format!("dangling sign in `{text}`")));
            }
            let mut coeff = ExactScalar::one();
            let mut exps = vec![0u16; vars.len()];
            for factor in body.split('*') {
                if factor.is_empty() {
                    return Err(Error::Parse(format!("empty factor in `{piece}`")));
                }
                let first = factor.chars().next().unwrap_or('0');
                if first.is_ascii_digit() || first == '.' {
                    coeff = coeff * factor.parse::<ExactScalar>()?;
                    continue;
                }
                let (name, e) = match factor.split_once('^') {
                    Some((n, e)) => {
                        (n, e.parse::<u16>().map_err(|_| Error::Parse(format!("bad exponent in `{factor}`")))?)
                    }
                    None => (factor, 1),
                };
                let idx =
                    vars.iter().position(|v| v == name).ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
                exps[idx] = exps[idx].checked_add(e).ok_or(Error::ExponentOverflow)?;
            }
            if neg {
                coeff = -coeff;
            }
            p.add_term(Monomial::from_exponents(&exps)?, coeff.as_rational());
        }
        Ok(p)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.cmp0() == std::cmp::Ordering::Less;
            let mag = ExactScalar::from_rational(Rational::from(c.abs_ref()));
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let mut factors: Vec<String> = Vec::new();
            if m.deg == 0 || mag != ExactScalar::one() {
                factors.push(mag.to_string());
            }
            for (i, name) in self.vars.iter().enumerate() {
                match m.exps[i] {
                    0 => {}
                    1 => factors.push(name.clone()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePoly[{}]({self})", self.vars.join(","))
    }
}

impl Serialize for SparsePoly {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

macro_rules! poly_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr for SparsePoly {
            type Output = SparsePoly;
            /// Panics on mismatched variable lists; see the checked variant.
            fn $method(self, rhs: SparsePoly) -> SparsePoly {
                self.$checked(&rhs).expect("polynomial arithmetic")
            }
        }
        impl<'a> $tr<&'a SparsePoly> for SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: &'a SparsePoly) -> SparsePoly {
                self.$checked(rhs).expect("polynomial arithmetic")
            }
        }
        impl<'a, 'b> $tr<&'b SparsePoly> for &'a SparsePoly {
            type Output = SparsePoly;
            fn $method(self, rhs: &'b SparsePoly) -> SparsePoly {
                self.$checked(rhs).expect("polynomial arithmetic")
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(mut self) -> SparsePoly {
        for c in self.terms.values_mut() {
            *c = Rational::from(-&*c);
        }
        self
    }
}

impl Ring for SparsePoly {
    fn zero_like(&self) -> Self {
        SparsePoly::zero(&self.vars)
    }

    fn constant_like(&self, c: &ExactScalar) -> Self {
        SparsePoly::constant(&self.vars, c)
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn try_div(&self, divisor: &Self) -> Result<Self> {
        if let Some(c) = divisor.as_constant() {
            if c.is_zero() {
                return Err(Error::DivisionByZero);
            }
            self.same_vars(divisor)?;
            return Ok(self.scale(&c.recip()?));
        }
        self.divide_exact(divisor)
    }
}

/// Comparison mode for [`random_identity_test`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityMode {
    Equal,
    Proportional,
}

/// Outcome of a randomized identity test.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityVerdict {
    pub passed: bool,
    pub mode: IdentityMode,
    pub trials: usize,
    /// p/q for proportional tests that found a nonzero denominator.
    pub ratio: Option<ExactScalar>,
    /// The first failing point, as (variable, value) pairs.
    pub witness: Option<Vec<(String, ExactScalar)>>,
}

/// Default bound on random numerators and denominators.
pub const DEFAULT_SAMPLE_BOUND: u64 = 1_000_000;

/// Schwartz–Zippel style check at `trials` random rational points.
pub fn random_identity_test(
    p: &SparsePoly,
    q: &SparsePoly,
    mode: IdentityMode,
    trials: usize,
    seed: u64,
) -> Result<IdentityVerdict> {
    random_identity_test_bounded(p, q, mode, trials, seed, DEFAULT_SAMPLE_BOUND)
}

pub fn random_identity_test_bounded(
    p: &SparsePoly,
    q: &SparsePoly,
    mode: IdentityMode,
    trials: usize,
    seed: u64,
    bound: u64,
) -> Result<IdentityVerdict> {
    p.same_vars(q)?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let zero = ExactScalar::zero();
    let mut ratio: Option<ExactScalar> = None;
    for _ in 0..trials {
        let point: Vec<ExactScalar> = (0..p.vars.len()).map(|_| ExactScalar::random(&mut rng, bound)).collect();
        let pv = p.eval_in(&point, &zero);
        let qv = q.eval_in(&point, &zero);
        let ok = match mode {
            IdentityMode::Equal => pv == qv,
            IdentityMode::Proportional => {
                if qv.is_zero() {
                    pv.is_zero()
                } else {
                    let r = pv.checked_div(&qv)?;
                    match &ratio {
                        None => {
                            ratio = Some(r);
                            true
                        }
                        Some(r0) => *r0 == r,
                    }
                }
            }
        };
        if !ok {
            let witness = p.vars.iter().cloned().zip(point).collect();
            return Ok(IdentityVerdict { passed: false, mode, trials, ratio, witness: Some(witness) });
        }
    }
    Ok(IdentityVerdict { passed: true, mode, trials, ratio, witness: None })
}

/// Determinant by Laplace expansion along the first row, skipping zeros.
pub fn determinant<T: Ring>(m: &[Vec<T>]) -> T {
    let n = m.len();
    match n {
        0 => panic!("empty matrix"),
        1 => return m[0][0].clone(),
        2 => return m[0][0].clone() * &m[1][1] - m[0][1].clone() * &m[1][0],
        _ => {}
    }
    let mut acc = m[0][0].zero_like();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<T>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect())
            .collect();
        let term = m[0][j].clone() * &determinant(&minor);
        acc = if j % 2 == 0 { acc + &term } else { acc - &term };
    }
    acc
}

/// Resultant in `y` of two polynomials of degree exactly 2 in `y`, as the
/// determinant of the 4×4 Sylvester matrix.
pub fn resultant_in(y: &str, p: &SparsePoly, q: &SparsePoly) -> Result<SparsePoly> {
    p.same_vars(q)?;
    let pc = p.coefficients_in(y)?;
    let qc = q.coefficients_in(y)?;
    for c in [&pc, &qc] {
        if c.len() != 3 {
            return Err(Error::DegreeMismatch { var: y.to_string(), found: (c.len() - 1) as u32 });
        }
    }
    let z = SparsePoly::zero(&p.vars);
    let sylvester = vec![
        vec![pc[2].clone(), pc[1].clone(), pc[0].clone(), z.clone()],
        vec![z.clone(), pc[2].clone(), pc[1].clone(), pc[0].clone()],
        vec![qc[2].clone(), qc[1].clone(), qc[0].clone(), z.clone()],
        vec![z, qc[2].clone(), qc[1].clone(), qc[0].clone()],
    ];
    Ok(determinant(&sylvester))
}
