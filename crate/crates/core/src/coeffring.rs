//! Exact arithmetic in the Laurent ring `Z[q^±1, t_ij^±1]`.
//!
//! Every scalar that shows up in the construction lives here: `q`, the free
//! multiparameters `t_ij` (one for each pair `i < j`), and the structure
//! constants built from them. Coefficients are arbitrary-precision integers;
//! rationals only appear when a polynomial is evaluated at a point.
//!
//! Alongside [`LaurentPoly`] this module defines the [`Scalar`] /
//! [`ScalarDomain`] abstraction used by the free and shuffle algebras, so the
//! same code runs symbolically or at an exact rational point.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use smallvec::SmallVec;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoeffError {
    #[error("operands live over different variable sets (rank {0} vs rank {1})")]
    VarSetMismatch(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("no exact quotient exists in the Laurent ring")]
    NonDivisible,
    #[error("variable {0} has no assigned value")]
    MissingAssignment(String),
    #[error("variable {0} is assigned zero but must be invertible")]
    ZeroAssignment(String),
    #[error("polynomial syntax error at offset {offset}: {msg}")]
    Parse { offset: usize, msg: String },
}

/// The variables `q` and `t_ij` (`1 <= i < j <= n`) for a datum of rank `n`.
///
/// Index 0 is `q`; the `t_ij` follow in `(1,2), (1,3), .., (1,n), (2,3), ..`
/// order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarSet {
    rank: u32,
}

impl VarSet {
    pub fn new(rank: u32) -> Self {
        assert!(rank >= 1, "rank must be positive");
        VarSet { rank }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn len(&self) -> usize {
        let n = self.rank as usize;
        1 + n * (n - 1) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_index(&self, i: u32, j: u32) -> Option<usize> {
        let n = self.rank;
        if !(1 <= i && i < j && j <= n) {
            return None;
        }
        // pairs (a, b) with a < i come first: sum_{a<i} (n - a)
        let before: u32 = (1..i).map(|a| n - a).sum();
        Some(1 + (before + (j - i - 1)) as usize)
    }

    pub fn pair(&self, idx: usize) -> Option<(u32, u32)> {
        if idx == 0 || idx >= self.len() {
            return None;
        }
        let mut rest = (idx - 1) as u32;
        let n = self.rank;
        for i in 1..n {
            let row = n - i;
            if rest < row {
                return Some((i, i + 1 + rest));
            }
            rest -= row;
        }
        None
    }

    pub fn name(&self, idx: usize) -> String {
        match self.pair(idx) {
            None => "q".to_string(),
            Some((i, j)) => format!("t_{i}_{j}"),
        }
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        if name == "q" {
            return Some(0);
        }
        let rest = name.strip_prefix("t_")?;
        let (a, b) = rest.split_once('_')?;
        self.t_index(a.parse().ok()?, b.parse().ok()?)
    }
}

/// A Laurent monomial, stored as a dense exponent vector over its [`VarSet`].
///
/// Ordering is graded-lexicographic: total degree first, then exponents
/// compared left to right with `q` first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    degree: i64,
    exps: SmallVec<[i32; 12]>,
}

impl Monomial {
    pub fn one(vars: VarSet) -> Self {
        Monomial {
            degree: 0,
            exps: SmallVec::from_elem(0, vars.len()),
        }
    }

    pub fn from_exponents(exps: &[i32]) -> Self {
        Monomial {
            degree: exps.iter().map(|&e| e as i64).sum(),
            exps: SmallVec::from_slice(exps),
        }
    }

    pub fn exponents(&self) -> &[i32] {
        &self.exps
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let exps: SmallVec<[i32; 12]> = self
            .exps
            .iter()
            .zip(&other.exps)
            .map(|(a, b)| a + b)
            .collect();
        Monomial {
            degree: self.degree + other.degree,
            exps,
        }
    }

    pub fn inv(&self) -> Monomial {
        Monomial {
            degree: -self.degree,
            exps: self.exps.iter().map(|e| -e).collect(),
        }
    }

    pub fn pow(&self, e: i32) -> Monomial {
        Monomial {
            degree: self.degree * e as i64,
            exps: self.exps.iter().map(|x| x * e).collect(),
        }
    }

    /// Multiply in place by `var^e`.
    pub fn bump(&mut self, var: usize, e: i32) {
        self.exps[var] += e;
        self.degree += e as i64;
    }
}

/// An element of `Z[q^±1, t_ij^±1]` in canonical sparse form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    vars: VarSet,
    terms: BTreeMap<Monomial, BigInt>,
}

impl LaurentPoly {
    pub fn zero(vars: VarSet) -> Self {
        LaurentPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: VarSet) -> Self {
        Self::constant(vars, 1)
    }

    pub fn constant(vars: VarSet, c: impl Into<BigInt>) -> Self {
        Self::term(vars, Monomial::one(vars), c)
    }

    pub fn term(vars: VarSet, mono: Monomial, c: impl Into<BigInt>) -> Self {
        debug_assert_eq!(mono.exps.len(), vars.len());
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(mono, c);
        }
        LaurentPoly { vars, terms }
    }

    pub fn monomial(vars: VarSet, mono: Monomial) -> Self {
        Self::term(vars, mono, 1)
    }

    /// `var^e` for the variable with index `var`.
    pub fn var_pow(vars: VarSet, var: usize, e: i32) -> Self {
        let mut m = Monomial::one(vars);
        m.bump(var, e);
        Self::monomial(vars, m)
    }

    pub fn q(vars: VarSet) -> Self {
        Self::var_pow(vars, 0, 1)
    }

    pub fn q_pow(vars: VarSet, e: i32) -> Self {
        Self::var_pow(vars, 0, e)
    }

    pub fn t(vars: VarSet, i: u32, j: u32) -> Option<Self> {
        vars.t_index(i, j).map(|idx| Self::var_pow(vars, idx, 1))
    }

    pub fn vars(&self) -> VarSet {
        self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .next()
                .is_some_and(|(m, c)| m.is_one() && c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    /// The single monomial of a unit `±m`, if this is one.
    pub fn as_unit(&self) -> Option<(&Monomial, bool)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        if c.is_one() {
            Some((m, true))
        } else if (-c).is_one() {
            Some((m, false))
        } else {
            None
        }
    }

    /// Inverse of a unit `±m`; `None` for anything else.
    pub fn inv_unit(&self) -> Option<LaurentPoly> {
        let (m, positive) = self.as_unit()?;
        let c = if positive {
            BigInt::one()
        } else {
            -BigInt::one()
        };
        Some(Self::term(self.vars, m.inv(), c))
    }

    pub fn leading(&self) -> Option<(&Monomial, &BigInt)> {
        self.terms.iter().next_back()
    }

    fn check(&self, other: &Self) -> Result<(), CoeffError> {
        if self.vars == other.vars {
            Ok(())
        } else {
            Err(CoeffError::VarSetMismatch(self.vars.rank, other.vars.rank))
        }
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, CoeffError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, CoeffError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, CoeffError> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.vars));
        }
        // shifting by a single term keeps the order, so the map can be rebuilt directly
        if other.terms.len() == 1 {
            let (m, c) = other.terms.iter().next().unwrap();
            return Ok(self.mul_term(m, c));
        }
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            return Ok(other.mul_term(m, c));
        }
        let mut out = Self::zero(self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn mul_term(&self, m: &Monomial, c: &BigInt) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(ma, ca)| (ma.mul(m), ca * c))
            .collect();
        LaurentPoly {
            vars: self.vars,
            terms,
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars);
        }
        LaurentPoly {
            vars: self.vars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one(self.vars);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact quotient `self / divisor` in the Laurent ring.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, CoeffError> {
        self.check(divisor)?;
        if divisor.is_zero() {
            return Err(CoeffError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Self::zero(self.vars));
        }
        if divisor.terms.len() == 1 {
            let (mb, cb) = divisor.terms.iter().next().unwrap();
            let inv = mb.inv();
            let mut terms = BTreeMap::new();
            for (m, c) in &self.terms {
                let (quo, rem) = c.div_rem(cb);
                if !rem.is_zero() {
                    return Err(CoeffError::NonDivisible);
                }
                terms.insert(m.mul(&inv), quo);
            }
            return Ok(LaurentPoly {
                vars: self.vars,
                terms,
            });
        }
        // Clear denominators so both sides are polynomials with no monomial
        // content; the quotient is then itself a polynomial (Z[x] is a UFD and
        // no variable divides the normalised divisor).
        let (a, shift_a) = self.normalised();
        let (b, shift_b) = divisor.normalised();
        let (lm_b, lc_b) = b.leading().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let mut rem = a;
        let mut quot = Self::zero(self.vars);
        while let Some((lm_r, lc_r)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
            let e = lm_r.mul(&lm_b.inv());
            if e.exps.iter().any(|&x| x < 0) {
                return Err(CoeffError::NonDivisible);
            }
            let (c, r) = lc_r.div_rem(&lc_b);
            if !r.is_zero() {
                return Err(CoeffError::NonDivisible);
            }
            rem = &rem - &b.mul_term(&e, &c);
            quot.add_term(e, c);
        }
        Ok(quot.mul_term(&shift_a.mul(&shift_b.inv()), &BigInt::one()))
    }

    /// Split off the monomial content: `self = out * shift` with `out` a
    /// polynomial whose per-variable minimum exponent is zero.
    fn normalised(&self) -> (Self, Monomial) {
        let n = self.vars.len();
        let mut mins = vec![i32::MAX; n];
        for m in self.terms.keys() {
            for (lo, &e) in mins.iter_mut().zip(m.exps.iter()) {
                *lo = (*lo).min(e);
            }
        }
        let shift = Monomial::from_exponents(&mins);
        (self.mul_term(&shift.inv(), &BigInt::one()), shift)
    }

    pub fn eval(&self, point: &Assignment) -> Result<BigRational, CoeffError> {
        lp_eval(self, point)
    }

    /// Substitute `var -> value` (a Laurent polynomial) for every variable;
    /// `subs[idx] = None` leaves that variable alone.
    pub fn substitute(&self, target: VarSet, subs: &[Option<LaurentPoly>]) -> LaurentPoly {
        let mut out = LaurentPoly::zero(target);
        for (m, c) in &self.terms {
            let mut term = LaurentPoly::constant(target, c.clone());
            for (idx, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = match &subs[idx] {
                    Some(p) => p.clone(),
                    None => LaurentPoly::var_pow(target, idx, 1),
                };
                let factor = if e > 0 {
                    base.pow(e as u32)
                } else {
                    base.inv_unit()
                        .expect("only units may carry negative exponents")
                        .pow((-e) as u32)
                };
                term = &term * &factor;
            }
            out = &out + &term;
        }
        out
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl Add<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_add(rhs)
            .expect("Laurent polynomials over different variable sets")
    }
}

impl Sub<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_sub(rhs)
            .expect("Laurent polynomials over different variable sets")
    }
}

impl Mul<&LaurentPoly> for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        self.checked_mul(rhs)
            .expect("Laurent polynomials over different variable sets")
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            vars: self.vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        self.check(rhs)
            .expect("Laurent polynomials over different variable sets");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&LaurentPoly> for LaurentPoly {
    fn sub_assign(&mut self, rhs: &LaurentPoly) {
        self.check(rhs)
            .expect("Laurent polynomials over different variable sets");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

/// A rational value for (some of) the variables of a [`VarSet`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    vars: VarSet,
    values: Vec<Option<BigRational>>,
}

impl Assignment {
    pub fn new(vars: VarSet) -> Self {
        Assignment {
            vars,
            values: vec![None; vars.len()],
        }
    }

    pub fn vars(&self) -> VarSet {
        self.vars
    }

    pub fn set(&mut self, var: usize, value: BigRational) -> &mut Self {
        self.values[var] = Some(value);
        self
    }

    pub fn with(mut self, var: usize, value: impl Into<BigRational>) -> Self {
        self.values[var] = Some(value.into());
        self
    }

    pub fn get(&self, var: usize) -> Option<&BigRational> {
        self.values.get(var).and_then(|v| v.as_ref())
    }

    /// Every variable assigned and nonzero.
    pub fn check_complete(&self) -> Result<(), CoeffError> {
        for (idx, v) in self.values.iter().enumerate() {
            match v {
                None => return Err(CoeffError::MissingAssignment(self.vars.name(idx))),
                Some(x) if Zero::is_zero(x) => {
                    return Err(CoeffError::ZeroAssignment(self.vars.name(idx)))
                }
                _ => {}
            }
        }
        Ok(())
    }
}

pub fn lp_eval(a: &LaurentPoly, point: &Assignment) -> Result<BigRational, CoeffError> {
    if a.vars != point.vars {
        return Err(CoeffError::VarSetMismatch(a.vars.rank, point.vars.rank));
    }
    let mut total = BigRational::zero();
    for (m, c) in &a.terms {
        let mut term = BigRational::from_integer(c.clone());
        for (idx, &e) in m.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let v = point
                .get(idx)
                .ok_or_else(|| CoeffError::MissingAssignment(a.vars.name(idx)))?;
            if Zero::is_zero(v) {
                return Err(CoeffError::ZeroAssignment(a.vars.name(idx)));
            }
            term *= Pow::pow(v, e);
        }
        total += term;
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Scalars
// ---------------------------------------------------------------------------

/// Coefficient arithmetic shared by the free and shuffle algebras.
pub trait Scalar: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    fn is_zero(&self) -> bool;
    fn add_assign_ref(&mut self, rhs: &Self);
    fn sub_assign_ref(&mut self, rhs: &Self);
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn div_exact(&self, rhs: &Self) -> Result<Self, CoeffError>;
}

impl Scalar for LaurentPoly {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn sub_assign_ref(&mut self, rhs: &Self) {
        *self -= rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Result<Self, CoeffError> {
        LaurentPoly::div_exact(self, rhs)
    }
}

impl Scalar for BigRational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign_ref(&mut self, rhs: &Self) {
        *self += rhs;
    }
    fn sub_assign_ref(&mut self, rhs: &Self) {
        *self -= rhs;
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg_ref(&self) -> Self {
        -self
    }
    fn div_exact(&self, rhs: &Self) -> Result<Self, CoeffError> {
        if Zero::is_zero(rhs) {
            Err(CoeffError::DivisionByZero)
        } else {
            Ok(self / rhs)
        }
    }
}

/// Where scalars live: the symbolic Laurent ring, or `Q` at a fixed point.
pub trait ScalarDomain: Clone + Send + Sync {
    type Elem: Scalar;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    /// Image of a Laurent polynomial under the domain's specialisation.
    fn embed(&self, p: &LaurentPoly) -> Self::Elem;
}

#[derive(Clone, Debug)]
pub struct Symbolic {
    vars: VarSet,
}

impl Symbolic {
    pub fn new(vars: VarSet) -> Self {
        Symbolic { vars }
    }
}

impl ScalarDomain for Symbolic {
    type Elem = LaurentPoly;
    fn zero(&self) -> LaurentPoly {
        LaurentPoly::zero(self.vars)
    }
    fn one(&self) -> LaurentPoly {
        LaurentPoly::one(self.vars)
    }
    fn embed(&self, p: &LaurentPoly) -> LaurentPoly {
        assert_eq!(p.vars, self.vars, "polynomial over a foreign variable set");
        p.clone()
    }
}

#[derive(Clone, Debug)]
pub struct Numeric {
    point: Assignment,
}

impl Numeric {
    pub fn new(point: Assignment) -> Result<Self, CoeffError> {
        point.check_complete()?;
        Ok(Numeric { point })
    }

    pub fn point(&self) -> &Assignment {
        &self.point
    }
}

impl ScalarDomain for Numeric {
    type Elem = BigRational;
    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn embed(&self, p: &LaurentPoly) -> BigRational {
        lp_eval(p, &self.point).expect("numeric point is complete by construction")
    }
}

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

fn write_var_power(out: &mut String, vars: VarSet, idx: usize, e: i32) {
    out.push_str(&vars.name(idx));
    if e != 1 {
        out.push('^');
        out.push_str(&e.to_string());
    }
}

fn q_term_body(c: &BigInt, qe: i32, vars: VarSet) -> String {
    let abs = c.abs();
    let mut s = String::new();
    if qe == 0 {
        s.push_str(&abs.to_string());
    } else {
        if !abs.is_one() {
            s.push_str(&abs.to_string());
            s.push('*');
        }
        write_var_power(&mut s, vars, 0, qe);
    }
    s
}

impl fmt::Display for LaurentPoly {
    /// Terms grouped by their `t`-part, e.g. `(q^2-1)*t_1_2^-1 + q`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        // groups in order of their largest monomial (descending)
        type Group<'a> = (&'a [i32], Vec<(i32, &'a BigInt)>);
        let mut groups: Vec<Group> = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let tpart = &m.exps[1..];
            match groups.iter_mut().find(|(t, _)| *t == tpart) {
                Some((_, v)) => v.push((m.exps[0], c)),
                None => groups.push((tpart, vec![(m.exps[0], c)])),
            }
        }
        let mut pieces: Vec<(bool, String)> = Vec::new();
        for (tpart, qterms) in groups {
            let mut tstr = String::new();
            for (off, &e) in tpart.iter().enumerate() {
                if e != 0 {
                    if !tstr.is_empty() {
                        tstr.push('*');
                    }
                    write_var_power(&mut tstr, self.vars, off + 1, e);
                }
            }
            if tstr.is_empty() {
                for (qe, c) in qterms {
                    pieces.push((c.is_negative(), q_term_body(c, qe, self.vars)));
                }
            } else if qterms.len() == 1 {
                let (qe, c) = qterms[0];
                let abs = c.abs();
                let mut body = String::new();
                if !abs.is_one() {
                    body.push_str(&abs.to_string());
                    body.push('*');
                }
                if qe != 0 {
                    write_var_power(&mut body, self.vars, 0, qe);
                    body.push('*');
                }
                body.push_str(&tstr);
                pieces.push((c.is_negative(), body));
            } else {
                let mut inner = String::new();
                for (pos, (qe, c)) in qterms.iter().enumerate() {
                    if c.is_negative() {
                        inner.push('-');
                    } else if pos > 0 {
                        inner.push('+');
                    }
                    inner.push_str(&q_term_body(c, *qe, self.vars));
                }
                pieces.push((false, format!("({inner})*{tstr}")));
            }
        }
        for (pos, (neg, body)) in pieces.iter().enumerate() {
            match (pos, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => f.write_str(body)?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// Parse the text form produced by `Display` (and ordinary `+ - * ^ ( )`
/// arithmetic in `q` and `t_i_j`) back into a polynomial over `vars`.
pub fn parse_poly(text: &str, vars: VarSet) -> Result<LaurentPoly, CoeffError> {
    let mut p = PolyParser {
        src: text.as_bytes(),
        pos: 0,
        vars,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

struct PolyParser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: VarSet,
}

impl PolyParser<'_> {
    fn err(&self, msg: &str) -> CoeffError {
        CoeffError::Parse {
            offset: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<LaurentPoly, CoeffError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -&self.term()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<LaurentPoly, CoeffError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<LaurentPoly, CoeffError> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let neg = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let start = self.pos;
        let e: u32 = self.integer()?.try_into().map_err(|_| CoeffError::Parse {
            offset: start,
            msg: "exponent out of range".into(),
        })?;
        if neg {
            let inv = base.inv_unit().ok_or(CoeffError::Parse {
                offset: start,
                msg: "negative power of a non-unit".into(),
            })?;
            Ok(inv.pow(e))
        } else {
            Ok(base.pow(e))
        }
    }

    fn integer(&mut self) -> Result<BigInt, CoeffError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(BigInt::from_str(digits).unwrap())
    }

    fn atom(&mut self) -> Result<LaurentPoly, CoeffError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => Ok(LaurentPoly::constant(self.vars, self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let idx = self.vars.lookup(name).ok_or(CoeffError::Parse {
                    offset: start,
                    msg: format!("unknown variable '{name}'"),
                })?;
                Ok(LaurentPoly::var_pow(self.vars, idx, 1))
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }
}
