//! The braided shuffle algebra and the evaluation map `x_i -> (x_i)`.
//!
//! Comonomials are stored as physical letter sequences, so `(x_{n+1})` and
//! `(x_{n-1})` are one and the same comonomial.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::coeffring::{Scalar, ScalarDomain};
use crate::freeword::{Algebra, FreeElem, Letters, Multidegree};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Right,
    Left,
}

fn degree_of(rank: u32, w: &[u8]) -> Multidegree {
    let mut deg = vec![0u32; rank as usize];
    for &l in w {
        deg[l as usize - 1] += 1;
    }
    deg
}

fn comonomial(w: &[u8]) -> String {
    let parts: Vec<String> = w.iter().map(|l| format!("x{l}")).collect();
    format!("({})", parts.join(" "))
}

/// Coefficient text for `coef * (comonomial)`: wrapped in parentheses when
/// it has more than one top-level term.
pub fn coefficient_text<C: fmt::Display>(c: &C) -> String {
    let s = c.to_string();
    let body = s.strip_prefix('-').unwrap_or(&s);
    if body.contains(" + ") || body.contains(" - ") {
        format!("({s})")
    } else {
        s
    }
}

#[derive(Clone, PartialEq)]
pub struct ShuffleElem<C> {
    terms: BTreeMap<Letters, C>,
}

impl<C: Scalar> ShuffleElem<C> {
    pub fn zero() -> Self {
        ShuffleElem {
            terms: BTreeMap::new(),
        }
    }

    pub fn term(w: Letters, c: C) -> Self {
        let mut out = Self::zero();
        out.add_term(w, c);
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

    pub fn add_scaled(&mut self, other: &Self, c: Option<&C>) {
        for (w, a) in &other.terms {
            let v = match c {
                Some(c) => a.mul_ref(c),
                None => a.clone(),
            };
            self.add_term(w.clone(), v);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, None);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, a) in &other.terms {
            out.add_term(w.clone(), a.neg_ref());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, Some(c));
        out
    }

    pub fn multidegrees(&self, rank: u32) -> Vec<Multidegree> {
        let mut out: Vec<Multidegree> = self.terms.keys().map(|w| degree_of(rank, w)).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Deconcatenation `Σ (z_1..z_i) ⊗ (z_{i+1}..z_m)`; the reduced form
    /// drops the two extreme splits.
    pub fn braided_coproduct(&self, reduced: bool) -> BraidedTensor<C> {
        let mut out = BraidedTensor::zero();
        for (w, c) in &self.terms {
            let l = w.len();
            let range = if reduced { 1..l.max(1) } else { 0..l + 1 };
            for i in range {
                out.add_term(
                    Letters::from_slice(&w[..i]),
                    Letters::from_slice(&w[i..]),
                    c.clone(),
                );
            }
        }
        out
    }

    /// `self ⊗ other`, term by term.
    pub fn tensor_product(&self, other: &Self) -> BraidedTensor<C> {
        let mut out = BraidedTensor::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.clone(), v.clone(), a.mul_ref(b));
            }
        }
        out
    }

    /// First comonomial where the two elements differ, for witnesses.
    pub fn first_difference(&self, other: &Self) -> Option<String> {
        let diff = self.sub(other);
        let (w, _) = diff.terms.iter().next()?;
        let show = |c: Option<&C>| c.map(|c| c.to_string()).unwrap_or_else(|| "0".into());
        Some(format!(
            "comonomial {}: {} vs {}",
            comonomial(w),
            show(self.terms.get(w)),
            show(other.terms.get(w))
        ))
    }
}

impl<C: Scalar> fmt::Display for ShuffleElem<C> {
    /// `coef * (x2 x1) + ...`, comonomials in descending order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (pos, (w, c)) in self.terms.iter().rev().enumerate() {
            if pos > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{} * {}", coefficient_text(c), comonomial(w))?;
        }
        Ok(())
    }
}

impl<C: Scalar> fmt::Debug for ShuffleElem<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShuffleElem({self})")
    }
}

/// Canonical sum of `(left comonomial, right comonomial) -> coefficient`.
#[derive(Clone, PartialEq)]
pub struct BraidedTensor<C> {
    terms: BTreeMap<(Letters, Letters), C>,
}

impl<C: Scalar> BraidedTensor<C> {
    pub fn zero() -> Self {
        BraidedTensor {
            terms: BTreeMap::new(),
        }
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

    pub fn terms(&self) -> impl Iterator<Item = (&(Letters, Letters), &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, left: &[u8], right: &[u8]) -> Option<&C> {
        self.terms
            .get(&(Letters::from_slice(left), Letters::from_slice(right)))
    }

    pub fn add_term(&mut self, left: Letters, right: Letters, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((left, right)) {
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

    pub fn add_scaled(&mut self, other: &Self, c: &C) {
        for ((l, r), a) in &other.terms {
            self.add_term(l.clone(), r.clone(), a.mul_ref(c));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((l, r), a) in &other.terms {
            out.add_term(l.clone(), r.clone(), a.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((l, r), a) in &other.terms {
            out.add_term(l.clone(), r.clone(), a.neg_ref());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    /// Sub-sum of terms whose right component has multidegree `right_deg`.
    pub fn tensor_project(&self, rank: u32, right_deg: &[u32]) -> Self {
        let mut out = Self::zero();
        for ((l, r), c) in &self.terms {
            if degree_of(rank, r) == right_deg {
                out.terms.insert((l.clone(), r.clone()), c.clone());
            }
        }
        out
    }

    /// Distinct multidegrees of the right components.
    pub fn right_degrees(&self, rank: u32) -> Vec<Multidegree> {
        let mut out: Vec<Multidegree> =
            self.terms.keys().map(|(_, r)| degree_of(rank, r)).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn first_difference(&self, other: &Self) -> Option<String> {
        let diff = self.sub(other);
        let ((l, r), _) = diff.terms.iter().next()?;
        let key = (l.clone(), r.clone());
        let show = |c: Option<&C>| c.map(|c| c.to_string()).unwrap_or_else(|| "0".into());
        Some(format!(
            "tensor {} ⊗ {}: {} vs {}",
            comonomial(l),
            comonomial(r),
            show(self.terms.get(&key)),
            show(other.terms.get(&key))
        ))
    }
}

impl<C: Scalar> fmt::Display for BraidedTensor<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (pos, ((l, r), c)) in self.terms.iter().enumerate() {
            if pos > 0 {
                f.write_str(" + ")?;
            }
            let side = |w: &Letters| {
                if w.is_empty() {
                    "1".to_string()
                } else {
                    comonomial(w)
                }
            };
            write!(f, "{} * {} ⊗ {}", coefficient_text(c), side(l), side(r))?;
        }
        Ok(())
    }
}

impl<C: Scalar> fmt::Debug for BraidedTensor<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BraidedTensor({self})")
    }
}

impl<D: ScalarDomain> Algebra<'_, D> {
    /// `(w)(x_i) = Σ_{uv=w} p(x_i,v)^-1 (u x_i v)` or
    /// `(x_i)(w) = Σ_{uv=w} p(u,x_i)^-1 (u x_i v)`; `i` is an extended letter.
    pub fn shuffle_letter_mul(
        &self,
        side: Side,
        w: &ShuffleElem<D::Elem>,
        i: u32,
    ) -> ShuffleElem<D::Elem> {
        let x = self.datum.fold(i) as u8;
        let mut out = ShuffleElem::zero();
        for (z, c) in w.terms() {
            let l = z.len();
            let mut factor = c.clone();
            let mut emit = |j: usize, factor: &D::Elem| {
                let mut word = Letters::with_capacity(l + 1);
                word.extend_from_slice(&z[..j]);
                word.push(x);
                word.extend_from_slice(&z[j..]);
                out.add_term(word, factor.clone());
            };
            match side {
                Side::Right => {
                    for j in (0..=l).rev() {
                        if j < l {
                            factor = factor.mul_ref(self.p_inv(x, z[j]));
                        }
                        emit(j, &factor);
                    }
                }
                Side::Left => {
                    for j in 0..=l {
                        if j > 0 {
                            factor = factor.mul_ref(self.p_inv(z[j - 1], x));
                        }
                        emit(j, &factor);
                    }
                }
            }
        }
        out
    }

    /// The comonomial `()` times a scalar.
    pub fn shuffle_unit(&self) -> ShuffleElem<D::Elem> {
        ShuffleElem::term(Letters::new(), self.one())
    }

    /// Image of a free element under `x_i -> (x_i)`, each word built left to
    /// right with right letter products. Words sharing a prefix share work.
    pub fn eval_free(&self, f: &FreeElem<D::Elem>) -> ShuffleElem<D::Elem> {
        let mut constant = self.zero();
        let mut groups: BTreeMap<u8, FreeElem<D::Elem>> = BTreeMap::new();
        for (w, c) in f.terms() {
            match w.split_last() {
                None => constant.add_assign_ref(c),
                Some((&last, prefix)) => groups
                    .entry(last)
                    .or_insert_with(FreeElem::zero)
                    .add_term(Letters::from_slice(prefix), c.clone()),
            }
        }
        let parts: Vec<ShuffleElem<D::Elem>> = groups
            .into_par_iter()
            .map(|(last, prefix)| {
                self.shuffle_letter_mul(Side::Right, &self.eval_free(&prefix), last as u32)
            })
            .collect();
        let mut out = ShuffleElem::term(Letters::new(), constant);
        for p in &parts {
            out.add_scaled(p, None);
        }
        out
    }

    /// Image of one word built right to left with left letter products.
    pub fn eval_word_left(&self, word: &[u8]) -> ShuffleElem<D::Elem> {
        let mut acc = self.shuffle_unit();
        for &l in word.iter().rev() {
            acc = self.shuffle_letter_mul(Side::Left, &acc, l as u32);
        }
        acc
    }

    /// Image of one word built left to right with right letter products.
    pub fn eval_word_right(&self, word: &[u8]) -> ShuffleElem<D::Elem> {
        let mut acc = self.shuffle_unit();
        for &l in word {
            acc = self.shuffle_letter_mul(Side::Right, &acc, l as u32);
        }
        acc
    }

    /// A single comonomial `(z_1 .. z_m)` with coefficient one.
    pub fn comonomial(&self, extended: &[u8]) -> ShuffleElem<D::Elem> {
        let phys: Letters = extended
            .iter()
            .map(|&l| self.datum.fold(l as u32) as u8)
            .collect();
        ShuffleElem::term(phys, self.one())
    }
}
