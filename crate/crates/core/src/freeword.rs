//! Words in folded letters, free-algebra elements and skew brackets.
//!
//! Letters come in two flavours. *Extended* letters `1 <= i < 2n` are what
//! the root words are written in; `x_i` and `x_{2n-i}` name the same
//! generator. *Physical* letters `1..=n` are what the algebra sees, and
//! every [`FreeElem`] is keyed on physical sequences.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::coeffring::{LaurentPoly, Numeric, Scalar, ScalarDomain, Symbolic};
use crate::datum::{QuantumDatum, Series};
use crate::error::{Error, Result};

pub type Letters = SmallVec<[u8; 16]>;
pub type Multidegree = Vec<u32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordKind {
    V,
    E,
    EPrime,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Ascending,
    Descending,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    pub extended: Letters,
    pub physical: Letters,
    pub multidegree: Multidegree,
}

impl Word {
    pub fn from_extended(d: &QuantumDatum, extended: Letters) -> Word {
        let physical = extended.iter().map(|&l| d.fold(l as u32) as u8).collect();
        let multidegree = d.multidegree(&extended);
        Word {
            extended,
            physical,
            multidegree,
        }
    }

    pub fn len(&self) -> usize {
        self.extended.len()
    }

    pub fn is_empty(&self) -> bool {
        self.extended.is_empty()
    }
}

/// `e(k,m)` (series D) contains the subword `x_n x_{n+1}` exactly when
/// `k < n < m`.
pub fn has_nn1(d: &QuantumDatum, k: u32, m: u32) -> bool {
    d.series == Series::D && k < d.rank && d.rank < m
}

fn e_letters(n: u32, k: u32, m: u32) -> Letters {
    let seq: Vec<u32> = if m < n || k > n {
        (k..=m).collect()
    } else if k + 1 < n && n - 1 < m {
        (k..=n - 2).chain(n..=m).collect()
    } else if k + 1 == n && n - 1 < m {
        (n..=m).collect()
    } else if k == n {
        std::iter::once(n).chain(n + 2..=m).collect()
    } else {
        unreachable!("e({k},{m}) for n = {n}")
    };
    seq.into_iter().map(|x| x as u8).collect()
}

/// Ascending extended letters of the root word of `(k,m)`.
pub fn root_letters(d: &QuantumDatum, k: u32, m: u32) -> Letters {
    match d.series {
        Series::A | Series::C => (k..=m).map(|x| x as u8).collect(),
        Series::D => e_letters(d.rank, k, m),
    }
}

pub fn make_word(d: &QuantumDatum, kind: WordKind, k: u32, m: u32, dir: Direction) -> Result<Word> {
    d.check_index(k, m)?;
    let n = d.rank;
    let mut letters = match (kind, d.series) {
        (WordKind::V, Series::A | Series::C) => (k..=m).map(|x| x as u8).collect(),
        (WordKind::E | WordKind::EPrime, Series::D) => e_letters(n, k, m),
        _ => {
            return Err(Error::IndexOutOfRange(format!(
                "word kind {kind:?} is not defined for series {}",
                d.series
            )))
        }
    };
    if kind == WordKind::EPrime {
        if let Some(pos) = letters
            .windows(2)
            .position(|w| w[0] as u32 == n && w[1] as u32 == n + 1)
        {
            letters[pos] = (n - 1) as u8;
            letters[pos + 1] = n as u8;
        }
    }
    if dir == Direction::Descending {
        letters.reverse();
    }
    Ok(Word::from_extended(d, letters))
}

/// Comparison in the PBW word order: `x_1 > x_2 > ...`, lexicographic, and
/// a proper beginning of a word is greater than the word.
pub fn word_order(u: &[u8], w: &[u8]) -> Ordering {
    for (a, b) in u.iter().zip(w) {
        if a != b {
            return b.cmp(a);
        }
    }
    w.len().cmp(&u.len())
}

/// Finite combination of words (physical letters) with scalar coefficients.
#[derive(Clone, PartialEq)]
pub struct FreeElem<C> {
    terms: BTreeMap<Letters, C>,
}

impl<C: Scalar> FreeElem<C> {
    pub fn zero() -> Self {
        FreeElem {
            terms: BTreeMap::new(),
        }
    }

    pub fn term(word: Letters, c: C) -> Self {
        let mut out = Self::zero();
        out.add_term(word, c);
        out
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

    pub fn terms(&self) -> impl Iterator<Item = (&Letters, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &[u8]) -> Option<&C> {
        self.terms.get(w)
    }

    pub fn add_term(&mut self, w: Letters, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_assign_ref(&c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.neg_ref());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a.mul_ref(c));
        }
        out
    }

    /// Concatenation product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, a.mul_ref(b));
            }
        }
        out
    }

    /// The common multidegree of all words, `None` for zero, error if mixed.
    pub fn multidegree(&self, rank: u32) -> Result<Option<Multidegree>> {
        let mut found: Option<Multidegree> = None;
        for w in self.terms.keys() {
            let mut deg = vec![0u32; rank as usize];
            for &l in w {
                deg[l as usize - 1] += 1;
            }
            match &found {
                None => found = Some(deg),
                Some(f) if *f != deg => return Err(Error::NonHomogeneousOperand),
                _ => {}
            }
        }
        Ok(found)
    }

    pub fn map_coefficients<D: Scalar>(&self, f: impl Fn(&C) -> D) -> FreeElem<D> {
        let mut out = FreeElem::zero();
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }
}

impl<C: Scalar> fmt::Display for FreeElem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (pos, (w, c)) in self.terms.iter().enumerate() {
            if pos > 0 {
                f.write_str(" + ")?;
            }
            let word: Vec<String> = w.iter().map(|l| format!("x{l}")).collect();
            write!(f, "({c})*{}", word.join(""))?;
        }
        Ok(())
    }
}

impl<C: Scalar> fmt::Debug for FreeElem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreeElem({self})")
    }
}

/// Which arrangement of brackets to put on a root word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arrangement {
    /// `[[y_1..y_s],[y_{s+1}..y_l]]` over the designated factor sequence,
    /// each half left-nested.
    Split(usize),
    /// The standard-bracketing recurrence for Lyndon-Shirshov root words.
    Recursion,
}

/// Scalars from a [`ScalarDomain`] bound to a datum: the arena in which free
/// and shuffle elements are built.
#[derive(Clone)]
pub struct Algebra<'a, D: ScalarDomain> {
    pub datum: &'a QuantumDatum,
    pub domain: D,
    p: Vec<Vec<D::Elem>>,
    p_inv: Vec<Vec<D::Elem>>,
    q: D::Elem,
    q_inv: D::Elem,
}

impl<'a> Algebra<'a, Symbolic> {
    pub fn symbolic(datum: &'a QuantumDatum) -> Self {
        Algebra::new(datum, Symbolic::new(datum.vars))
    }
}

impl<'a> Algebra<'a, Numeric> {
    /// Requires a datum carrying a rational point.
    pub fn numeric(datum: &'a QuantumDatum) -> Result<Self> {
        let pt = datum.point.clone().ok_or_else(|| {
            Error::NumericAssignmentHitsExcludedRoot("datum carries no rational point".into())
        })?;
        let dom = Numeric::new(pt)?;
        Ok(Algebra::new(datum, dom))
    }
}

impl<'a, D: ScalarDomain> Algebra<'a, D> {
    pub fn new(datum: &'a QuantumDatum, domain: D) -> Self {
        let n = datum.rank;
        let mut p = Vec::new();
        let mut p_inv = Vec::new();
        for i in 1..=n {
            let mut row = Vec::new();
            let mut row_inv = Vec::new();
            for j in 1..=n {
                let pij = datum.p(i, j);
                row.push(domain.embed(pij));
                row_inv.push(domain.embed(&pij.inv_unit().expect("p_ij is a monomial")));
            }
            p.push(row);
            p_inv.push(row_inv);
        }
        let q = domain.embed(&datum.q());
        let q_inv = domain.embed(&datum.q_pow(-1));
        Algebra {
            datum,
            domain,
            p,
            p_inv,
            q,
            q_inv,
        }
    }

    pub fn rank(&self) -> u32 {
        self.datum.rank
    }

    /// `p_ij` at physical indices.
    pub fn p(&self, i: u8, j: u8) -> &D::Elem {
        &self.p[i as usize - 1][j as usize - 1]
    }

    pub fn p_inv(&self, i: u8, j: u8) -> &D::Elem {
        &self.p_inv[i as usize - 1][j as usize - 1]
    }

    pub fn q(&self) -> &D::Elem {
        &self.q
    }

    pub fn q_inv(&self) -> &D::Elem {
        &self.q_inv
    }

    pub fn embed(&self, a: &LaurentPoly) -> D::Elem {
        self.domain.embed(a)
    }

    pub fn zero(&self) -> D::Elem {
        self.domain.zero()
    }

    pub fn one(&self) -> D::Elem {
        self.domain.one()
    }

    pub fn p_deg(&self, du: &[u32], dv: &[u32]) -> D::Elem {
        self.domain.embed(&self.datum.p_degrees(du, dv))
    }

    /// The generator `x_i` for an extended letter `i`.
    pub fn letter(&self, i: u32) -> Result<FreeElem<D::Elem>> {
        if i == 0 || i > self.datum.max_letter() {
            return Err(Error::IndexOutOfRange(format!(
                "letter x{i} outside 1..={} for {}{}",
                self.datum.max_letter(),
                self.datum.series,
                self.datum.rank
            )));
        }
        let phys = self.datum.fold(i) as u8;
        Ok(FreeElem::term(SmallVec::from_slice(&[phys]), self.one()))
    }

    pub fn constant(&self, c: D::Elem) -> FreeElem<D::Elem> {
        FreeElem::term(Letters::new(), c)
    }

    /// The word itself (extended letters) as a free element with coefficient 1.
    pub fn word(&self, extended: &[u8]) -> FreeElem<D::Elem> {
        let phys: Letters = extended
            .iter()
            .map(|&l| self.datum.fold(l as u32) as u8)
            .collect();
        FreeElem::term(phys, self.one())
    }

    fn bracket_with(
        &self,
        u: &FreeElem<D::Elem>,
        v: &FreeElem<D::Elem>,
        extra: Option<&D::Elem>,
    ) -> Result<FreeElem<D::Elem>> {
        let n = self.rank();
        let du = u.multidegree(n)?;
        let dv = v.multidegree(n)?;
        let (du, dv) = match (du, dv) {
            (Some(a), Some(b)) => (a, b),
            _ => return Ok(FreeElem::zero()),
        };
        let mut c = self.p_deg(&du, &dv);
        if let Some(x) = extra {
            c = c.mul_ref(x);
        }
        Ok(u.mul(v).sub(&v.mul(u).scale(&c)))
    }

    /// `[u,v] = uv - p(u,v) vu`
    pub fn skew_bracket(
        &self,
        u: &FreeElem<D::Elem>,
        v: &FreeElem<D::Elem>,
    ) -> Result<FreeElem<D::Elem>> {
        self.bracket_with(u, v, None)
    }

    /// `[[u,v]] = uv - q^-1 p(u,v) vu`
    pub fn qq_bracket(
        &self,
        u: &FreeElem<D::Elem>,
        v: &FreeElem<D::Elem>,
    ) -> Result<FreeElem<D::Elem>> {
        let qi = self.q_inv.clone();
        self.bracket_with(u, v, Some(&qi))
    }

    /// `p(u,v)` for homogeneous nonzero elements.
    pub fn p_elems(&self, u: &FreeElem<D::Elem>, v: &FreeElem<D::Elem>) -> Result<D::Elem> {
        let n = self.rank();
        match (u.multidegree(n)?, v.multidegree(n)?) {
            (Some(a), Some(b)) => Ok(self.p_deg(&a, &b)),
            _ => Err(Error::NonHomogeneousOperand),
        }
    }

    pub fn left_nested(&self, factors: &[FreeElem<D::Elem>]) -> Result<FreeElem<D::Elem>> {
        let mut it = factors.iter();
        let mut acc = it.next().cloned().unwrap_or_else(FreeElem::zero);
        for f in it {
            acc = self.skew_bracket(&acc, f)?;
        }
        Ok(acc)
    }

    pub fn right_nested(&self, factors: &[FreeElem<D::Elem>]) -> Result<FreeElem<D::Elem>> {
        let mut it = factors.iter().rev();
        let mut acc = it.next().cloned().unwrap_or_else(FreeElem::zero);
        for f in it {
            acc = self.skew_bracket(f, &acc)?;
        }
        Ok(acc)
    }

    fn letters_of(&self, k: u32, m: u32) -> Result<Vec<FreeElem<D::Elem>>> {
        let w = self.datum.root_word(k, m)?;
        w.iter().map(|&l| self.letter(l as u32)).collect()
    }

    /// `v[k,m]` (A, C) or `e[k,m]` (D) with the bracketing that defines the
    /// PBW generators.
    pub fn pbw_bracketing(&self, k: u32, m: u32) -> Result<FreeElem<D::Elem>> {
        let d = self.datum;
        d.check_index(k, m)?;
        let n = d.rank;
        if d.series == Series::D && k == n && m == n {
            // e[n,n] is defined as [[x_n, x_n]], which vanishes identically
            let x = self.letter(n)?;
            return self.qq_bracket(&x, &x);
        }
        let letters = self.letters_of(k, m)?;
        if letters.len() == 1 {
            return Ok(letters.into_iter().next().unwrap());
        }
        if d.series == Series::A {
            return self.left_nested(&letters);
        }
        let f = d.phi(k);
        match m.cmp(&f) {
            Ordering::Less => self.left_nested(&letters),
            Ordering::Greater => self.right_nested(&letters),
            Ordering::Equal => {
                let inner = self.pbw_bracketing(k, m - 1)?;
                self.qq_bracket(&inner, &self.letter(m)?)
            }
        }
    }

    /// The factor sequence whose bracketings are claimed to agree, or `None`
    /// when `(k,m)` lies outside every arrangement range.
    pub fn arrangement_factors(&self, k: u32, m: u32) -> Result<Option<Vec<FreeElem<D::Elem>>>> {
        let d = self.datum;
        d.check_index(k, m)?;
        let n = d.rank;
        if d.series == Series::D && k == n && m == n {
            return Ok(None);
        }
        if m <= n || k >= n || d.series == Series::A {
            return Ok(Some(self.letters_of(k, m)?));
        }
        let f = d.phi(k);
        let letters_range = |a: u32, b: u32| -> Result<Vec<FreeElem<D::Elem>>> {
            (a..=b).map(|i| self.letter(i)).collect()
        };
        let out = match d.series {
            Series::C if m < f => {
                let mut v = vec![self.pbw_bracketing(k, n - 1)?];
                v.extend(letters_range(n, m)?);
                v
            }
            Series::C if m > f => {
                let mut v = letters_range(k, n)?;
                v.push(self.pbw_bracketing(n + 1, m)?);
                v
            }
            Series::D if m < f => {
                let mut v = vec![self.pbw_bracketing(k, n)?];
                v.extend(letters_range(n + 1, m)?);
                v
            }
            Series::D if m > f => {
                let mut v = self.letters_of(k, n)?;
                v.push(self.pbw_bracketing(n + 1, m)?);
                v
            }
            _ => return Ok(None),
        };
        Ok(Some(out))
    }

    /// The standard-bracketing recurrence: left-nested when `m <= n`,
    /// otherwise `[x_k, rec(k+1,m)]` for `m < φ(k)-1` and `[rec(k,m-1), x_m]`
    /// for `m = φ(k)-1`. Defined for `k <= m < φ(k)`.
    pub fn recursion_bracketing(&self, k: u32, m: u32) -> Result<FreeElem<D::Elem>> {
        let d = self.datum;
        d.check_index(k, m)?;
        let n = d.rank;
        if d.series == Series::A || m <= n {
            return self.left_nested(&self.letters_of(k, m)?);
        }
        let f = d.phi(k);
        if m + 1 < f {
            self.skew_bracket(&self.letter(k)?, &self.recursion_bracketing(k + 1, m)?)
        } else if m + 1 == f {
            self.skew_bracket(&self.recursion_bracketing(k, m - 1)?, &self.letter(m)?)
        } else {
            Err(Error::IndexOutOfRange(format!(
                "recursion needs m < φ(k), got (k,m)=({k},{m})"
            )))
        }
    }

    pub fn bracketing_variant(
        &self,
        k: u32,
        m: u32,
        arrangement: Arrangement,
    ) -> Result<FreeElem<D::Elem>> {
        match arrangement {
            Arrangement::Recursion => self.recursion_bracketing(k, m),
            Arrangement::Split(s) => {
                let factors = self.arrangement_factors(k, m)?.ok_or_else(|| {
                    Error::IndexOutOfRange(format!("no designated factor sequence for ({k},{m})"))
                })?;
                if factors.len() == 1 {
                    return Ok(factors.into_iter().next().unwrap());
                }
                if s == 0 || s >= factors.len() {
                    return Err(Error::IndexOutOfRange(format!(
                        "split {s} outside 1..{} for ({k},{m})",
                        factors.len()
                    )));
                }
                let left = self.left_nested(&factors[..s])?;
                let right = self.left_nested(&factors[s..])?;
                self.skew_bracket(&left, &right)
            }
        }
    }

    /// Every full bracketing of the factor sequence (Catalan many).
    pub fn all_bracketings(&self, factors: &[FreeElem<D::Elem>]) -> Result<Vec<FreeElem<D::Elem>>> {
        if factors.len() == 1 {
            return Ok(vec![factors[0].clone()]);
        }
        let mut out = Vec::new();
        for s in 1..factors.len() {
            let lefts = self.all_bracketings(&factors[..s])?;
            let rights = self.all_bracketings(&factors[s..])?;
            for l in &lefts {
                for r in &rights {
                    out.push(self.skew_bracket(l, r)?);
                }
            }
        }
        Ok(out)
    }
}
