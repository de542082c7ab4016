//! Theorem-level checks: Serre vanishing, shuffle images, arrangement
//! independence, coproduct formulas, PBW rank certificates and the bracket
//! identities.
//!
//! Every suite returns a [`VerificationReport`]; a failing case always
//! carries a witness.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::coeffring::{LaurentPoly, Monomial, Numeric, Scalar, ScalarDomain, Symbolic};
use crate::datum::{default_point, numeric_datum, QuantumDatum, Series};
use crate::error::{Error, Result};
use crate::freeword::{
    has_nn1, make_word, Algebra, Direction, FreeElem, Letters, Multidegree, WordKind,
};
use crate::pbwgen::{closed_form_image, in_pbw_set, pbw_generator_elems, tau_table, GeneratorId};
use crate::shuffle::BraidedTensor;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CaseResult {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CaseResult {
    pub fn pass(label: impl Into<String>) -> Self {
        CaseResult {
            label: label.into(),
            k: None,
            m: None,
            passed: true,
            witness: None,
            note: None,
        }
    }

    pub fn fail(label: impl Into<String>, witness: impl Into<String>) -> Self {
        CaseResult {
            label: label.into(),
            k: None,
            m: None,
            passed: false,
            witness: Some(witness.into()),
            note: None,
        }
    }

    /// Pass when `witness` is `None`.
    pub fn check(label: impl Into<String>, witness: Option<String>) -> Self {
        match witness {
            None => Self::pass(label),
            Some(w) => Self::fail(label, w),
        }
    }

    pub fn at(mut self, k: u32, m: u32) -> Self {
        self.k = Some(k);
        self.m = Some(m);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub series: Series,
    pub rank: u32,
    pub arithmetic: String,
    pub cases: Vec<CaseResult>,
    #[serde(serialize_with = "ser_duration")]
    pub wall_time: Duration,
}

fn ser_duration<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl VerificationReport {
    fn new(
        suite: &str,
        d: &QuantumDatum,
        arithmetic: &str,
        mut cases: Vec<CaseResult>,
        start: Instant,
    ) -> Self {
        cases.sort_by_key(|c| (c.k, c.m));
        VerificationReport {
            suite: suite.to_string(),
            series: d.series,
            rank: d.rank,
            arithmetic: arithmetic.to_string(),
            cases,
            wall_time: start.elapsed(),
        }
    }

    pub fn passed(&self) -> bool {
        self.cases.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseResult> {
        self.cases.iter().filter(|c| !c.passed)
    }

    pub fn pass_count(&self) -> usize {
        self.cases.iter().filter(|c| c.passed).count()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "suite {} on {}{} ({}): {}/{} cases pass in {:.3}s",
            self.suite,
            self.series,
            self.rank,
            self.arithmetic,
            self.pass_count(),
            self.cases.len(),
            self.wall_time.as_secs_f64()
        )?;
        for c in &self.cases {
            let status = if c.passed { "ok  " } else { "FAIL" };
            write!(f, "  {status} {}", c.label)?;
            if let Some(n) = &c.note {
                write!(f, "  [{n}]")?;
            }
            if let Some(w) = &c.witness {
                write!(f, "\n       witness: {w}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn all_pairs(d: &QuantumDatum) -> Vec<(u32, u32)> {
    let top = d.max_letter();
    (1..=top)
        .flat_map(|k| (k..=top).map(move |m| (k, m)))
        .collect()
}

fn root_label(d: &QuantumDatum, k: u32, m: u32) -> String {
    GeneratorId { k, m }.label(d.series)
}

// ---------------------------------------------------------------------------
// σ, μ and the extension pairing
// ---------------------------------------------------------------------------

/// Triples where the μ identity is not claimed: for series D the
/// concatenation of the split words differs from the root word there.
pub fn mu_exempt(d: &QuantumDatum, k: u32, m: u32, i: u32) -> bool {
    let n = d.rank;
    d.series == Series::D && ((k, m, i) == (n - 1, n, n - 1) || (k, m, i) == (n, n + 1, n))
}

pub fn sigma_exempt(d: &QuantumDatum, k: u32, m: u32) -> bool {
    d.series == Series::D && k == d.rank && m == d.rank
}

pub fn verify_sigma(d: &QuantumDatum) -> Result<VerificationReport> {
    let start = Instant::now();
    let n = d.rank;
    let mut cases = Vec::new();
    for (k, m) in all_pairs(d) {
        let s = d.sigma(k, m)?;
        let want = d.sigma_closed_form(k, m);
        let label = format!("sigma({k},{m}) = {s}");
        if sigma_exempt(d, k, m) {
            let note = format!("exempt: definitional value {s}, closed form {want}");
            cases.push(CaseResult::pass(label).at(k, m).with_note(note));
            continue;
        }
        let witness = (s != want).then(|| format!("definitional {s}, closed form {want}"));
        cases.push(CaseResult::check(label, witness).at(k, m));
        for i in k..m {
            let a = d.mu(k, m, i)?;
            let b = d.mu_from_sigma(k, m, i)?;
            let label = format!("mu({k},{m},{i})");
            if mu_exempt(d, k, m, i) {
                let note =
                    format!("exempt: split words do not concatenate to the root word ({a} vs {b})");
                cases.push(CaseResult::pass(label).at(k, m).with_note(note));
            } else {
                let witness = (a != b).then(|| format!("p-product {a}, sigma ratio {b}"));
                cases.push(CaseResult::check(label, witness).at(k, m));
            }
        }
        let in_range = match d.series {
            Series::A => false,
            Series::C => k < n && n <= m,
            Series::D => k < n && n <= m,
        };
        if in_range && m + 1 < 2 * n {
            let a = d.extension_pairing(k, m)?;
            let b = d.extension_pairing_closed_form(k, m);
            let witness = (a != b).then(|| format!("computed {a}, closed form {b}"));
            cases.push(
                CaseResult::check(format!("extension pairing ({k},{m}) = {a}"), witness).at(k, m),
            );
        }
    }
    Ok(VerificationReport::new(
        "sigma", d, "symbolic", cases, start,
    ))
}

// ---------------------------------------------------------------------------
// Shuffle images
// ---------------------------------------------------------------------------

pub fn verify_images<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    arithmetic: &str,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let d = alg.datum;
    let cases: Result<Vec<CaseResult>> = all_pairs(d)
        .into_par_iter()
        .map(|(k, m)| {
            let img = alg.eval_free(&alg.pbw_bracketing(k, m)?);
            let cf = closed_form_image(alg, k, m)?;
            let label = format!(
                "{} = closed form ({} comonomials)",
                root_label(d, k, m),
                cf.len()
            );
            let mut case = CaseResult::check(label, img.first_difference(&cf)).at(k, m);
            if d.series == Series::D && k == d.rank && m == d.rank {
                case = case.with_note("e[n,n] = 0");
                if !img.is_zero() {
                    case.passed = false;
                    case.witness = Some(format!("e[n,n] evaluates to {img}"));
                }
            }
            Ok(case)
        })
        .collect();
    Ok(VerificationReport::new(
        "images", d, arithmetic, cases?, start,
    ))
}

// ---------------------------------------------------------------------------
// Serre relations
// ---------------------------------------------------------------------------

/// Named left-hand sides of the defining relations.
pub fn serre_relations<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
) -> Result<Vec<(String, FreeElem<D::Elem>)>> {
    let d = alg.datum;
    let n = d.rank;
    let x = |i: u32| alg.letter(i);
    let mut out = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let copies = 1 - d.cartan[j as usize - 1][i as usize - 1];
            let mut acc = x(i)?;
            let mut label = format!("x{i}");
            for _ in 0..copies {
                acc = alg.skew_bracket(&acc, &x(j)?)?;
                label = format!("[{label},x{j}]");
            }
            out.push((label, acc));
        }
    }
    let sb = |a: &FreeElem<D::Elem>, b: &FreeElem<D::Elem>| alg.skew_bracket(a, b);
    match d.series {
        Series::C => {
            for i in 1..n.saturating_sub(1) {
                let b = sb(&x(i)?, &x(i + 1)?)?;
                out.push((format!("[x{i},[x{i},x{}]]", i + 1), sb(&x(i)?, &b)?));
                out.push((
                    format!("[[x{i},x{}],x{}]", i + 1, i + 1),
                    sb(&b, &x(i + 1)?)?,
                ));
            }
            let b = sb(&x(n - 1)?, &x(n)?)?;
            out.push((format!("[[x{},x{n}],x{n}]", n - 1), sb(&b, &x(n)?)?));
            let t = sb(&x(n - 1)?, &sb(&x(n - 1)?, &b)?)?;
            out.push((format!("[x{0},[x{0},[x{0},x{n}]]]", n - 1), t));
        }
        Series::D => {
            // x_{n-1} and x_n commute; the Cartan loop above already lists the pair
            let label = format!("[x{},x{n}]", n - 1);
            if !out.iter().any(|(l, _)| *l == label) {
                out.push((label, sb(&x(n - 1)?, &x(n)?)?));
            }
        }
        Series::A => {}
    }
    Ok(out)
}

pub fn verify_serre<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    arithmetic: &str,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let rels = serre_relations(alg)?;
    let cases: Vec<CaseResult> = rels
        .into_par_iter()
        .map(|(label, f)| {
            let img = alg.eval_free(&f);
            let witness = (!img.is_zero()).then(|| format!("image is {img}"));
            CaseResult::check(format!("{label} -> 0"), witness)
        })
        .collect();
    Ok(VerificationReport::new(
        "serre", alg.datum, arithmetic, cases, start,
    ))
}

// ---------------------------------------------------------------------------
// Arrangements
// ---------------------------------------------------------------------------

pub fn verify_arrangements<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    arithmetic: &str,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let d = alg.datum;
    let n = d.rank;
    let per_pair: Result<Vec<Vec<CaseResult>>> = all_pairs(d)
        .into_par_iter()
        .map(|(k, m)| {
            let mut cases = Vec::new();
            let target = alg.eval_free(&alg.pbw_bracketing(k, m)?);
            if let Some(factors) = alg.arrangement_factors(k, m)? {
                if factors.len() >= 2 {
                    let all = alg.all_bracketings(&factors)?;
                    let mut witness = None;
                    for (idx, b) in all.iter().enumerate() {
                        if let Some(w) = alg.eval_free(b).first_difference(&target) {
                            witness = Some(format!("arrangement #{idx}: {w}"));
                            break;
                        }
                    }
                    let kind = if m <= n || k >= n || d.series == Series::A {
                        "letters"
                    } else {
                        "block factors"
                    };
                    let label = format!(
                        "{}: {} arrangements of {} {kind} agree",
                        root_label(d, k, m),
                        all.len(),
                        factors.len()
                    );
                    cases.push(CaseResult::check(label, witness).at(k, m));
                }
            }
            let recursion_range = d.series != Series::A && k < n && n < m && m < d.phi(k);
            if recursion_range {
                let rec = alg.eval_free(&alg.recursion_bracketing(k, m)?);
                let label = format!(
                    "{}: recursion reproduces the bracketing",
                    root_label(d, k, m)
                );
                cases.push(CaseResult::check(label, rec.first_difference(&target)).at(k, m));
            }
            Ok(cases)
        })
        .collect();
    let cases = per_pair?.into_iter().flatten().collect();
    Ok(VerificationReport::new(
        "arrangements",
        d,
        arithmetic,
        cases,
        start,
    ))
}

// ---------------------------------------------------------------------------
// Coproducts
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoproductMode {
    /// Build the theorem's right-hand side and compare exactly.
    Assert,
    /// Recover each coefficient from the coproduct itself.
    Discover,
}

#[derive(Clone, Debug)]
pub struct CoproductTerm<C> {
    pub i: u32,
    pub tau: C,
    /// multidegree of the root word of `(k,i)`, standing in for `g_{ki}`
    pub grouplike: Multidegree,
    pub left: GeneratorId,
    pub right: GeneratorId,
    /// `γ_i`, the coefficient of `eval(left) ⊗ eval(right)` in `Δ^b_0`
    pub braided: C,
    /// `τ_i (1 - q^-1)`, the coefficient in the ordinary coproduct
    pub unbraided: C,
    /// the tensor `eval(left) ⊗ eval(right)` is zero
    pub vanishing: bool,
}

#[derive(Clone, Debug)]
pub struct CoproductFormula<C> {
    pub series: Series,
    pub rank: u32,
    pub k: u32,
    pub m: u32,
    pub in_pbw_set: bool,
    pub mode: CoproductMode,
    pub terms: Vec<CoproductTerm<C>>,
}

impl<C: Scalar> CoproductFormula<C> {
    /// Terms whose τ differs from `expected`.
    pub fn tau_mismatches(&self, expected: &BTreeMap<u32, C>) -> Vec<String> {
        self.terms
            .iter()
            .filter(|t| expected.get(&t.i) != Some(&t.tau))
            .map(|t| {
                let want = expected
                    .get(&t.i)
                    .map(|c| c.to_string())
                    .unwrap_or_else(|| "?".into());
                format!("tau_{} = {} but the theorem states {}", t.i, t.tau, want)
            })
            .collect()
    }
}

/// `Δ^b_0` of the image of the generator for `(k,m)`.
pub fn reduced_coproduct<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    k: u32,
    m: u32,
) -> Result<BraidedTensor<D::Elem>> {
    Ok(alg
        .eval_free(&alg.pbw_bracketing(k, m)?)
        .braided_coproduct(true))
}

pub fn coproduct_formula<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    k: u32,
    m: u32,
    mode: CoproductMode,
) -> Result<CoproductFormula<D::Elem>> {
    let d = alg.datum;
    d.check_index(k, m)?;
    let n = d.rank;
    let total = reduced_coproduct(alg, k, m)?;
    let one_minus_qinv = alg.embed(&(&d.one() - &d.q_pow(-1)));

    struct Part<C> {
        i: u32,
        grouplike: Multidegree,
        expected: BraidedTensor<C>,
        pairing: C,
    }
    let parts: Vec<Part<D::Elem>> = (k..m)
        .into_par_iter()
        .map(|i| {
            let left = alg.eval_free(&alg.pbw_bracketing(i + 1, m)?);
            let right = alg.eval_free(&alg.pbw_bracketing(k, i)?);
            let wl = d.root_word(i + 1, m)?;
            let wr = d.root_word(k, i)?;
            let pairing = alg.embed(&d.p_words(&wl, &wr));
            Ok(Part {
                i,
                grouplike: d.multidegree(&wr),
                expected: left.tensor_product(&right),
                pairing,
            })
        })
        .collect::<Result<_>>()?;

    let make_term = |p: &Part<D::Elem>, tau: D::Elem, braided: D::Elem| CoproductTerm {
        i: p.i,
        unbraided: tau.mul_ref(&one_minus_qinv),
        tau,
        grouplike: p.grouplike.clone(),
        left: GeneratorId { k: p.i + 1, m },
        right: GeneratorId { k, m: p.i },
        braided,
        vanishing: p.expected.is_zero(),
    };

    let mut terms = Vec::new();
    match mode {
        CoproductMode::Assert => {
            let taus = tau_table(d, k, m)?;
            let mut rhs = BraidedTensor::zero();
            for p in &parts {
                let tau = alg.embed(&taus[&p.i]);
                let gamma = tau.mul_ref(&one_minus_qinv).div_exact(&p.pairing)?;
                rhs.add_scaled(&p.expected, &gamma);
                terms.push(make_term(p, tau, gamma));
            }
            if let Some(w) = rhs.first_difference(&total) {
                return Err(Error::TheoremMismatch {
                    witness: format!("{} ({k},{m}): theorem side vs coproduct, {w}", d.series),
                });
            }
        }
        CoproductMode::Discover => {
            let mut accounted = BraidedTensor::zero();
            // group summands by the multidegree of their right factor
            let mut by_degree: BTreeMap<Multidegree, Vec<&Part<D::Elem>>> = BTreeMap::new();
            for p in &parts {
                by_degree.entry(p.grouplike.clone()).or_default().push(p);
            }
            for (deg, group) in &by_degree {
                let projected = total.tensor_project(n, deg);
                let live: Vec<&&Part<D::Elem>> =
                    group.iter().filter(|p| !p.expected.is_zero()).collect();
                if live.len() > 1 {
                    return Err(Error::TheoremMismatch {
                        witness: format!(
                            "({k},{m}): several nonzero summands share right multidegree {deg:?}"
                        ),
                    });
                }
                for p in group.iter().filter(|p| p.expected.is_zero()) {
                    terms.push(make_term(p, alg.zero(), alg.zero()));
                }
                let Some(p) = live.first() else {
                    if !projected.is_zero() {
                        return Err(Error::NonProportionalProjection {
                            k,
                            m,
                            i: group[0].i,
                            witness: format!(
                                "expected tensor vanishes but projection is {projected}"
                            ),
                        });
                    }
                    continue;
                };
                let ((l, r), c_exp) = p.expected.terms().next().expect("nonzero");
                let c_have = projected
                    .coefficient(l, r)
                    .cloned()
                    .unwrap_or_else(|| alg.zero());
                let gamma = c_have.div_exact(c_exp)?;
                if let Some(w) = p.expected.scale(&gamma).first_difference(&projected) {
                    return Err(Error::NonProportionalProjection {
                        k,
                        m,
                        i: p.i,
                        witness: w,
                    });
                }
                let tau = gamma.mul_ref(&p.pairing).div_exact(&one_minus_qinv)?;
                accounted = accounted.add(&projected);
                terms.push(make_term(p, tau, gamma));
            }
            if let Some(w) = accounted.first_difference(&total) {
                return Err(Error::TheoremMismatch {
                    witness: format!("({k},{m}): coproduct has terms outside every summand, {w}"),
                });
            }
        }
    }
    terms.sort_by_key(|t| t.i);
    Ok(CoproductFormula {
        series: d.series,
        rank: n,
        k,
        m,
        in_pbw_set: in_pbw_set(d, k, m),
        mode,
        terms,
    })
}

/// Assert and discover, compare the discovered τ with the theorem, and
/// check the bookkeeping identities of each term.
pub fn check_coproduct<D: ScalarDomain>(alg: &Algebra<'_, D>, k: u32, m: u32) -> Vec<CaseResult> {
    let d = alg.datum;
    let label = root_label(d, k, m);
    let mut cases = Vec::new();
    let note = (!in_pbw_set(d, k, m)).then_some("outside the PBW set");
    let tag = |c: CaseResult| match note {
        Some(n) => c.at(k, m).with_note(n),
        None => c.at(k, m),
    };
    match coproduct_formula(alg, k, m, CoproductMode::Assert) {
        Ok(_) => cases.push(tag(CaseResult::pass(format!(
            "{label}: theorem side equals the coproduct"
        )))),
        Err(e) => cases.push(tag(CaseResult::fail(
            format!("{label}: theorem side equals the coproduct"),
            e.to_string(),
        ))),
    }
    let found = match coproduct_formula(alg, k, m, CoproductMode::Discover) {
        Ok(f) => f,
        Err(e) => {
            cases.push(tag(CaseResult::fail(
                format!("{label}: discover"),
                e.to_string(),
            )));
            return cases;
        }
    };
    let expected: BTreeMap<u32, D::Elem> = match tau_table(d, k, m) {
        Ok(t) => t.iter().map(|(i, v)| (*i, alg.embed(v))).collect(),
        Err(e) => {
            cases.push(tag(CaseResult::fail(
                format!("{label}: tau table"),
                e.to_string(),
            )));
            return cases;
        }
    };
    let taus: Vec<String> = found
        .terms
        .iter()
        .map(|t| {
            format!(
                "tau_{}={}{}",
                t.i,
                t.tau,
                if t.vanishing { " (vanishing)" } else { "" }
            )
        })
        .collect();
    let mism = found.tau_mismatches(&expected);
    let witness = (!mism.is_empty()).then(|| mism.join("; "));
    cases.push(tag(CaseResult::check(
        format!("{label}: discovered {}", taus.join(", ")),
        witness,
    )));

    // bookkeeping: grouplikes, e/e' multidegrees, braided vs unbraided
    let mut problems = Vec::new();
    for t in &found.terms {
        let kind = if d.series == Series::D {
            WordKind::E
        } else {
            WordKind::V
        };
        match make_word(d, kind, k, t.i, Direction::Ascending) {
            Ok(w) if w.multidegree != t.grouplike => problems.push(format!(
                "grouplike of term {} is {:?}, word gives {:?}",
                t.i, t.grouplike, w.multidegree
            )),
            Err(e) => problems.push(e.to_string()),
            _ => {}
        }
        if !t.braided.is_zero() {
            let wl = d.root_word(t.i + 1, m).expect("valid");
            let wr = d.root_word(k, t.i).expect("valid");
            let pairing = alg.embed(&d.p_words(&wl, &wr));
            match t.unbraided.div_exact(&t.braided) {
                Ok(ratio) if ratio == pairing => {}
                Ok(ratio) => problems.push(format!(
                    "term {}: unbraided/braided = {ratio}, pairing {pairing}",
                    t.i
                )),
                Err(e) => problems.push(format!("term {}: {e}", t.i)),
            }
        }
    }
    if has_nn1(d, k, m) {
        let e = make_word(d, WordKind::E, k, m, Direction::Ascending);
        let ep = make_word(d, WordKind::EPrime, k, m, Direction::Ascending);
        if let (Ok(e), Ok(ep)) = (e, ep) {
            if e.multidegree != ep.multidegree {
                problems.push("e and e' have different multidegrees".into());
            }
        }
    }
    let witness = (!problems.is_empty()).then(|| problems.join("; "));
    cases.push(tag(CaseResult::check(
        format!("{label}: grouplike and braiding bookkeeping"),
        witness,
    )));
    cases
}

pub fn verify_coproducts<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    arithmetic: &str,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let cases: Vec<CaseResult> = all_pairs(alg.datum)
        .into_par_iter()
        .flat_map(|(k, m)| check_coproduct(alg, k, m))
        .collect();
    Ok(VerificationReport::new(
        "coproduct",
        alg.datum,
        arithmetic,
        cases,
        start,
    ))
}

/// Series A: every discovered τ equals one.
pub fn verify_an_no_exceptions<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    arithmetic: &str,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let d = alg.datum;
    if d.series != Series::A {
        return Err(Error::IndexOutOfRange(format!(
            "series A required, got {}",
            d.series
        )));
    }
    let one = alg.one();
    let cases: Vec<CaseResult> = all_pairs(d)
        .into_par_iter()
        .map(|(k, m)| {
            let label = format!("{}: all tau equal 1", root_label(d, k, m));
            match coproduct_formula(alg, k, m, CoproductMode::Discover) {
                Ok(f) => {
                    let bad: Vec<String> = f
                        .terms
                        .iter()
                        .filter(|t| t.tau != one)
                        .map(|t| format!("tau_{} = {}", t.i, t.tau))
                        .collect();
                    CaseResult::check(label, (!bad.is_empty()).then(|| bad.join(", "))).at(k, m)
                }
                Err(e) => CaseResult::fail(label, e.to_string()).at(k, m),
            }
        })
        .collect();
    Ok(VerificationReport::new(
        "a-no-exceptions",
        d,
        arithmetic,
        cases,
        start,
    ))
}

/// `e[n,n] = 0`, its coproduct vanishes, and every coproduct term built on
/// it is absent (vanishing tensor, τ = 0).
pub fn verify_vanishing_top_pair<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    arithmetic: &str,
) -> Result<VerificationReport> {
    let start = Instant::now();
    let d = alg.datum;
    if d.series != Series::D {
        return Err(Error::IndexOutOfRange(format!(
            "series D required, got {}",
            d.series
        )));
    }
    let n = d.rank;
    let mut cases = Vec::new();
    let f = alg.pbw_bracketing(n, n)?;
    let img = alg.eval_free(&f);
    cases.push(
        CaseResult::check(
            "e[n,n] is zero in the free algebra",
            (!f.is_zero()).then(|| format!("e[n,n] = {f}")),
        )
        .at(n, n),
    );
    cases.push(
        CaseResult::check(
            "e[n,n] has zero shuffle image",
            (!img.is_zero()).then(|| img.to_string()),
        )
        .at(n, n),
    );
    let cop = img.braided_coproduct(false);
    cases.push(
        CaseResult::check(
            "full coproduct of e[n,n] is zero",
            (!cop.is_zero()).then(|| cop.to_string()),
        )
        .at(n, n),
    );
    let per_pair: Vec<CaseResult> = all_pairs(d)
        .into_par_iter()
        .filter(|&(k, m)| k <= n && n <= m && (k, m) != (n, n))
        .map(|(k, m)| {
            let label = format!("{}: tensors through e[n,n] absent", root_label(d, k, m));
            match coproduct_formula(alg, k, m, CoproductMode::Discover) {
                Ok(fm) => {
                    let bad: Vec<String> = fm
                        .terms
                        .iter()
                        .filter(|t| {
                            t.left == GeneratorId { k: n, m: n }
                                || t.right == GeneratorId { k: n, m: n }
                        })
                        .filter(|t| !t.vanishing || !t.tau.is_zero() || !t.braided.is_zero())
                        .map(|t| format!("term {} has tau {} braided {}", t.i, t.tau, t.braided))
                        .collect();
                    CaseResult::check(label, (!bad.is_empty()).then(|| bad.join("; "))).at(k, m)
                }
                Err(e) => CaseResult::fail(label, e.to_string()).at(k, m),
            }
        })
        .collect();
    cases.extend(per_pair);
    Ok(VerificationReport::new(
        "vanishing-top-pair",
        d,
        arithmetic,
        cases,
        start,
    ))
}

// ---------------------------------------------------------------------------
// PBW independence
// ---------------------------------------------------------------------------

/// Exact rank of a sparse rational matrix.
pub fn exact_rank(rows: &[BTreeMap<usize, BigRational>]) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, BigRational>> = BTreeMap::new();
    for row in rows {
        let mut r = row.clone();
        r.retain(|_, v| !Zero::is_zero(v));
        while let Some((&lead, lv)) = r.iter().next() {
            let Some(p) = pivots.get(&lead) else {
                pivots.insert(lead, r);
                break;
            };
            let factor = lv / &p[&lead];
            for (c, v) in p {
                let e = r.entry(*c).or_insert_with(BigRational::zero);
                *e -= &factor * v;
                if Zero::is_zero(e) {
                    r.remove(c);
                }
            }
        }
    }
    pivots.len()
}

/// Exponent vectors `e` with `Σ e_j deg_j <= max_degree`, excluding zero.
pub fn enumerate_products(degrees: &[u32], max_degree: u32) -> Vec<Vec<u32>> {
    fn go(degrees: &[u32], left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == degrees.len() {
            if cur.iter().any(|&e| e > 0) {
                out.push(cur.clone());
            }
            return;
        }
        let d = degrees[cur.len()];
        let mut e = 0;
        while e * d <= left {
            cur.push(e);
            go(degrees, left - e * d, cur, out);
            cur.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    go(degrees, max_degree, &mut Vec::new(), &mut out);
    out
}

fn pbw_rank_at(
    d: &QuantumDatum,
    max_degree: u32,
) -> Result<(usize, Vec<CaseResult>, Option<String>)> {
    let alg = Algebra::numeric(d)?;
    let gens = pbw_generator_elems(&alg)?;
    let degrees: Vec<u32> = gens
        .iter()
        .map(|(g, _)| d.root_word(g.k, g.m).map(|w| w.len() as u32))
        .collect::<Result<_>>()?;
    let products = enumerate_products(&degrees, max_degree);
    let images: Vec<(Multidegree, crate::shuffle::ShuffleElem<BigRational>)> = products
        .par_iter()
        .map(|exps| {
            let mut f = alg.constant(alg.one());
            for (j, &e) in exps.iter().enumerate() {
                for _ in 0..e {
                    f = f.mul(&gens[j].1);
                }
            }
            let deg = f.multidegree(d.rank).ok().flatten().unwrap_or_default();
            (deg, alg.eval_free(&f))
        })
        .collect();
    let mut blocks: BTreeMap<Multidegree, Vec<usize>> = BTreeMap::new();
    for (idx, (deg, _)) in images.iter().enumerate() {
        blocks.entry(deg.clone()).or_default().push(idx);
    }
    let mut cases = Vec::new();
    let mut deficient = None;
    let mut total_rank = 0;
    for (deg, idxs) in &blocks {
        let mut columns: BTreeMap<Letters, usize> = BTreeMap::new();
        let rows: Vec<BTreeMap<usize, BigRational>> = idxs
            .iter()
            .map(|&i| {
                let mut row = BTreeMap::new();
                for (w, c) in images[i].1.terms() {
                    let next = columns.len();
                    let col = *columns.entry(w.clone()).or_insert(next);
                    row.insert(col, c.clone());
                }
                row
            })
            .collect();
        let rank = exact_rank(&rows);
        total_rank += rank;
        let label = format!("block {deg:?}: {} products, rank {rank}", idxs.len());
        let witness = (rank < idxs.len()).then(|| {
            let combos: Vec<String> = idxs
                .iter()
                .map(|&i| {
                    products[i]
                        .iter()
                        .enumerate()
                        .filter(|(_, &e)| e > 0)
                        .map(|(j, e)| format!("{}^{e}", gens[j].0.label(d.series)))
                        .collect::<Vec<_>>()
                        .join("*")
                })
                .collect();
            format!("rank deficiency among {}", combos.join(", "))
        });
        if deficient.is_none() {
            deficient = witness.clone();
        }
        cases.push(CaseResult::check(label, witness));
    }
    let label = format!(
        "{} ordered products of {} generators up to degree {max_degree}",
        products.len(),
        gens.len()
    );
    let witness = (total_rank != products.len())
        .then(|| format!("total rank {total_rank} < {}", products.len()));
    cases.push(CaseResult::check(label, witness));
    Ok((products.len(), cases, deficient))
}

/// Full-rank certificate at a rational point; a deficient first seed is
/// retried with a second before the point is declared degenerate.
pub fn verify_pbw_independence(
    d: &QuantumDatum,
    max_degree: u32,
    seed: u64,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if max_degree == 0 {
        return Err(Error::IndexOutOfRange(
            "max_degree must be at least 1".into(),
        ));
    }
    let seeds = [seed, seed.wrapping_add(0x9e37_79b9)];
    let mut last = None;
    for (attempt, s) in seeds.iter().enumerate() {
        let nd = match (&d.point, attempt) {
            (Some(pt), 0) => numeric_datum(d.series, d.rank, pt.clone())?,
            _ => numeric_datum(d.series, d.rank, default_point(d.vars, *s))?,
        };
        let (_, mut cases, deficient) = pbw_rank_at(&nd, max_degree)?;
        let point: Vec<String> = (0..nd.vars.len())
            .map(|i| {
                format!(
                    "{}={}",
                    nd.vars.name(i),
                    nd.point.as_ref().unwrap().get(i).unwrap()
                )
            })
            .collect();
        if deficient.is_none() {
            for c in cases.iter_mut() {
                c.note = Some(format!("point {}", point.join(" ")));
            }
            return Ok(VerificationReport::new("pbw", d, "numeric", cases, start));
        }
        last = Some(format!("seed {s}: {}", deficient.unwrap()));
    }
    Err(Error::DegenerateEvaluationPoint(last.unwrap_or_default()))
}

// ---------------------------------------------------------------------------
// Bracket identities
// ---------------------------------------------------------------------------

type Sym = LaurentPoly;

fn random_scalar(d: &QuantumDatum, rng: &mut ChaCha8Rng) -> Sym {
    let mut c: i64 = rng.gen_range(-3..=3);
    if c == 0 {
        c = 1;
    }
    let mut mono = Monomial::one(d.vars);
    mono.bump(0, rng.gen_range(-1..=1));
    if d.vars.len() > 1 {
        let t = rng.gen_range(1..d.vars.len());
        mono.bump(t, rng.gen_range(-1..=1));
    }
    LaurentPoly::term(d.vars, mono, BigInt::from(c))
}

/// A random homogeneous element: a few rearrangements of one random word.
fn random_homogeneous(
    alg: &Algebra<'_, Symbolic>,
    rng: &mut ChaCha8Rng,
    max_len: usize,
) -> FreeElem<Sym> {
    let d = alg.datum;
    let len = rng.gen_range(1..=max_len);
    let base: Vec<u8> = (0..len).map(|_| rng.gen_range(1..=d.rank) as u8).collect();
    let mut out = FreeElem::zero();
    let terms = rng.gen_range(1..=2);
    for _ in 0..terms {
        let mut w = base.clone();
        for i in (1..w.len()).rev() {
            w.swap(i, rng.gen_range(0..=i));
        }
        out.add_term(Letters::from_slice(&w), random_scalar(d, rng));
    }
    if out.is_zero() {
        out.add_term(Letters::from_slice(&base), alg.one());
    }
    out
}

/// Pairs `(a, b)` whose bracket `[a,b]` vanishes in the shuffle image.
pub fn commuting_pairs(alg: &Algebra<'_, Symbolic>) -> Result<Vec<(FreeElem<Sym>, FreeElem<Sym>)>> {
    let n = alg.rank();
    let x = |i: u32| alg.letter(i);
    let mut candidates = Vec::new();
    for i in 1..=n {
        for j in 1..=n {
            candidates.push((x(i)?, x(j)?));
            if i != j {
                let b = alg.skew_bracket(&x(i)?, &x(j)?)?;
                candidates.push((x(i)?, b.clone()));
                candidates.push((b.clone(), x(j)?));
                for l in 1..=n {
                    candidates.push((b.clone(), x(l)?));
                    candidates.push((x(l)?, b.clone()));
                }
            }
        }
    }
    let keep: Vec<bool> = candidates
        .par_iter()
        .map(|(a, b)| {
            alg.skew_bracket(a, b)
                .map(|c| alg.eval_free(&c).is_zero())
                .unwrap_or(false)
        })
        .collect();
    Ok(candidates
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(c, _)| c)
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Identity {
    /// `[[u,v],w] = [u,[v,w]] + p(w,v)^-1 [[u,w],v] + (p(v,w) - p(w,v)^-1) [u,w] v`
    Jacobi,
    /// `[u,v] = -p(u,v) [v,u] + (1 - p(u,v) p(v,u)) u v`
    Antisymmetry,
    /// `[[u,v],w] = [u,[v,w]]` provided `[u,w] = 0`
    GuardedJacobi,
    /// `[u,[v,w]] = -p(v,w) [[u,w],v] + p(u,v)(1 - p(v,w) p(w,v)) v [u,w]` provided `[u,v] = 0`
    GuardedSwap,
    /// `[uv,w] = p(v,w) [u,w] v + u [v,w]`
    ProductLeft,
    /// `[u,vw] = [u,v] w + p(u,v) v [u,w]`
    ProductRight,
}

impl Identity {
    pub const ALL: [Identity; 6] = [
        Identity::Jacobi,
        Identity::Antisymmetry,
        Identity::GuardedJacobi,
        Identity::GuardedSwap,
        Identity::ProductLeft,
        Identity::ProductRight,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::Jacobi => "jacobi",
            Identity::Antisymmetry => "antisymmetry",
            Identity::GuardedJacobi => "guarded-jacobi",
            Identity::GuardedSwap => "guarded-swap",
            Identity::ProductLeft => "product-left",
            Identity::ProductRight => "product-right",
        }
    }
}

/// Check one identity instance. Unconditional identities compare free
/// elements; the guarded ones compare shuffle images, where the guard
/// `[u,w] = 0` (resp. `[u,v] = 0`) holds.
pub fn check_identity(
    alg: &Algebra<'_, Symbolic>,
    id: Identity,
    u: &FreeElem<Sym>,
    v: &FreeElem<Sym>,
    w: &FreeElem<Sym>,
) -> Result<Option<String>> {
    let sb = |a: &FreeElem<Sym>, b: &FreeElem<Sym>| alg.skew_bracket(a, b);
    let p = |a: &FreeElem<Sym>, b: &FreeElem<Sym>| alg.p_elems(a, b);
    let one = alg.one();
    let (lhs, rhs, in_image) = match id {
        Identity::Jacobi => {
            let lhs = sb(&sb(u, v)?, w)?;
            let pwv_inv = p(w, v)?.inv_unit().expect("unit");
            let rhs = sb(u, &sb(v, w)?)?
                .add(&sb(&sb(u, w)?, v)?.scale(&pwv_inv))
                .add(&sb(u, w)?.mul(v).scale(&(&p(v, w)? - &pwv_inv)));
            (lhs, rhs, false)
        }
        Identity::Antisymmetry => {
            let puv = p(u, v)?;
            let lhs = sb(u, v)?;
            let rhs = sb(v, u)?
                .scale(&-&puv)
                .add(&u.mul(v).scale(&(&one - &(&puv * &p(v, u)?))));
            (lhs, rhs, false)
        }
        Identity::GuardedJacobi => (sb(&sb(u, v)?, w)?, sb(u, &sb(v, w)?)?, true),
        Identity::GuardedSwap => {
            let pvw = p(v, w)?;
            let lhs = sb(u, &sb(v, w)?)?;
            let rhs = sb(&sb(u, w)?, v)?.scale(&-&pvw).add(
                &v.mul(&sb(u, w)?)
                    .scale(&(&p(u, v)? * &(&one - &(&pvw * &p(w, v)?)))),
            );
            (lhs, rhs, true)
        }
        Identity::ProductLeft => {
            let lhs = sb(&u.mul(v), w)?;
            let rhs = sb(u, w)?.mul(v).scale(&p(v, w)?).add(&u.mul(&sb(v, w)?));
            (lhs, rhs, false)
        }
        Identity::ProductRight => {
            let lhs = sb(u, &v.mul(w))?;
            let rhs = sb(u, v)?.mul(w).add(&v.mul(&sb(u, w)?).scale(&p(u, v)?));
            (lhs, rhs, false)
        }
    };
    if in_image {
        Ok(alg.eval_free(&lhs).first_difference(&alg.eval_free(&rhs)))
    } else {
        let diff = lhs.sub(&rhs);
        Ok((!diff.is_zero()).then(|| format!("lhs - rhs = {diff}")))
    }
}

/// `count` random instances of each identity, reproducible from `seed`.
pub fn verify_identity_suite(
    d: &QuantumDatum,
    seed: u64,
    count: usize,
) -> Result<VerificationReport> {
    let start = Instant::now();
    if count == 0 {
        return Err(Error::IndexOutOfRange("count must be at least 1".into()));
    }
    let alg = Algebra::symbolic(d);
    let pool = commuting_pairs(&alg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::new();
    for id in Identity::ALL {
        for idx in 0..count {
            let (u, v, w) = match id {
                Identity::GuardedJacobi => {
                    let (a, b) = &pool[rng.gen_range(0..pool.len())];
                    let u = a.scale(&random_scalar(d, &mut rng));
                    let w = b.scale(&random_scalar(d, &mut rng));
                    (u, random_homogeneous(&alg, &mut rng, 2), w)
                }
                Identity::GuardedSwap => {
                    let (a, b) = &pool[rng.gen_range(0..pool.len())];
                    let u = a.scale(&random_scalar(d, &mut rng));
                    let v = b.scale(&random_scalar(d, &mut rng));
                    (u, v, random_homogeneous(&alg, &mut rng, 2))
                }
                _ => (
                    random_homogeneous(&alg, &mut rng, 3),
                    random_homogeneous(&alg, &mut rng, 3),
                    random_homogeneous(&alg, &mut rng, 3),
                ),
            };
            instances.push((id, idx, u, v, w));
        }
    }
    let cases: Vec<CaseResult> = instances
        .into_par_iter()
        .map(|(id, idx, u, v, w)| {
            let label = format!("{} #{idx}", id.name());
            match check_identity(&alg, id, &u, &v, &w) {
                Ok(witness) => {
                    CaseResult::check(label, witness.map(|x| format!("u={u}, v={v}, w={w}: {x}")))
                }
                Err(e) => CaseResult::fail(label, e.to_string()),
            }
        })
        .collect();
    let mut report = VerificationReport::new("identities", d, "symbolic", cases, start);
    report.cases.sort_by(|a, b| a.label.cmp(&b.label));
    Ok(report)
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Sigma,
    Images,
    Serre,
    Arrangements,
    Coproduct,
    Pbw,
    Identities,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Sigma,
        Suite::Images,
        Suite::Serre,
        Suite::Arrangements,
        Suite::Coproduct,
        Suite::Pbw,
        Suite::Identities,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Sigma => "sigma",
            Suite::Images => "images",
            Suite::Serre => "serre",
            Suite::Arrangements => "arrangements",
            Suite::Coproduct => "coproduct",
            Suite::Pbw => "pbw",
            Suite::Identities => "identities",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arith {
    Symbolic,
    Numeric,
}

#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub arith: Arith,
    pub seed: u64,
    pub max_degree: u32,
    pub identity_count: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            arith: Arith::Symbolic,
            seed: 0,
            max_degree: 4,
            identity_count: 100,
        }
    }
}

/// Run one suite on a (multiparameter) datum in the requested arithmetic.
pub fn run_suite(
    d: &QuantumDatum,
    suite: Suite,
    opts: &SuiteOptions,
) -> Result<VerificationReport> {
    match suite {
        Suite::Sigma => return verify_sigma(d),
        Suite::Pbw => return verify_pbw_independence(d, opts.max_degree, opts.seed),
        Suite::Identities => return verify_identity_suite(d, opts.seed, opts.identity_count),
        _ => {}
    }
    match opts.arith {
        Arith::Symbolic => {
            let alg = Algebra::new(d, Symbolic::new(d.vars));
            run_algebraic(&alg, suite, "symbolic")
        }
        Arith::Numeric => {
            let nd = match &d.point {
                Some(pt) => numeric_datum(d.series, d.rank, pt.clone())?,
                None => numeric_datum(d.series, d.rank, default_point(d.vars, opts.seed))?,
            };
            let alg: Algebra<'_, Numeric> = Algebra::numeric(&nd)?;
            let mut r = run_algebraic(&alg, suite, "numeric")?;
            r.series = d.series;
            Ok(r)
        }
    }
}

fn run_algebraic<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    suite: Suite,
    arith: &str,
) -> Result<VerificationReport> {
    match suite {
        Suite::Images => verify_images(alg, arith),
        Suite::Serre => verify_serre(alg, arith),
        Suite::Arrangements => verify_arrangements(alg, arith),
        Suite::Coproduct => {
            if alg.datum.series == Series::A {
                let mut r = verify_coproducts(alg, arith)?;
                let extra = verify_an_no_exceptions(alg, arith)?;
                r.cases.extend(extra.cases);
                r.cases.sort_by_key(|c| (c.k, c.m));
                Ok(r)
            } else {
                verify_coproducts(alg, arith)
            }
        }
        _ => unreachable!("handled by run_suite"),
    }
}
