//! Acceptance criteria. Runs without the libtest harness so each criterion
//! prints exactly one PASS/FAIL line; the process fails if any does.

use std::time::{Duration, Instant};

use qborel::coeffring::{LaurentPoly, ScalarDomain};
use qborel::datum::{
    default_point, make_datum, numeric_datum, QuantumDatum, Series, Specialization,
};
use qborel::freeword::{Algebra, Letters};
use qborel::pbwgen::alpha;
use qborel::shuffle::ShuffleElem;
use qborel::verify::{
    coproduct_formula, run_suite, verify_an_no_exceptions, verify_identity_suite,
    verify_pbw_independence, verify_vanishing_top_pair, Arith, CoproductMode, Suite, SuiteOptions,
    VerificationReport,
};

type Outcome = std::result::Result<String, String>;

fn dat(s: Series, n: u32) -> QuantumDatum {
    make_datum(s, n, Specialization::Multiparameter).unwrap()
}

fn numeric(s: Series, n: u32) -> QuantumDatum {
    let vars = dat(s, n).vars;
    numeric_datum(s, n, default_point(vars, 0)).unwrap()
}

fn pairs(d: &QuantumDatum) -> Vec<(u32, u32)> {
    let top = d.max_letter();
    (1..=top)
        .flat_map(|k| (k..=top).map(move |m| (k, m)))
        .collect()
}

fn within(start: Instant, limit: Duration) -> std::result::Result<(), String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!(
            "took {:.1}s, limit {}s",
            t.as_secs_f64(),
            limit.as_secs()
        ))
    } else {
        Ok(())
    }
}

fn require(r: &VerificationReport) -> std::result::Result<usize, String> {
    match r.failures().next() {
        None => Ok(r.cases.len()),
        Some(c) => Err(format!(
            "{}{} {}: {} ({})",
            r.series,
            r.rank,
            r.suite,
            c.label,
            c.witness.clone().unwrap_or_default()
        )),
    }
}

/// Root word in extended letters: `k..=m`, and for series D drop `n-1`
/// when the range reaches `n` from below, or `n+1` when it starts at `n`.
fn oracle_word(d: &QuantumDatum, k: u32, m: u32) -> Vec<u32> {
    let n = d.rank;
    (k..=m)
        .filter(|&x| {
            d.series != Series::D
                || !((x == n - 1 && k < n && m >= n) || (x == n + 1 && k == n && m > n))
        })
        .collect()
}

fn comonomial<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    extended_desc: &[u32],
) -> ShuffleElem<D::Elem> {
    let w: Letters = extended_desc
        .iter()
        .map(|&x| alg.datum.fold(x) as u8)
        .collect();
    ShuffleElem::term(w, alg.one())
}

/// `α (w(m,k))`, plus `p_{n-1,n} (w'(m,k))` when the word has `x_n x_{n+1}`.
fn oracle_image<D: ScalarDomain>(alg: &Algebra<'_, D>, k: u32, m: u32) -> ShuffleElem<D::Elem> {
    let d = alg.datum;
    let n = d.rank;
    let w = oracle_word(d, k, m);
    let mut desc = w.clone();
    desc.reverse();
    let mut out = comonomial(alg, &desc);
    if let Some(pos) = w
        .windows(2)
        .position(|p| p == [n, n + 1])
        .filter(|_| d.series == Series::D)
    {
        let mut wp = w.clone();
        wp[pos] = n - 1;
        wp[pos + 1] = n;
        wp.reverse();
        out.add_scaled(&comonomial(alg, &wp), Some(&alg.embed(d.p(n - 1, n))));
    }
    out.scale(&alg.embed(&alpha(d, k, m).unwrap()))
}

fn images_match<D: ScalarDomain>(alg: &Algebra<'_, D>) -> std::result::Result<usize, String> {
    let d = alg.datum;
    let mut count = 0;
    for (k, m) in pairs(d) {
        let img = alg.eval_free(&alg.pbw_bracketing(k, m).map_err(|e| e.to_string())?);
        if let Some(w) = img.first_difference(&oracle_image(alg, k, m)) {
            return Err(format!("{}{} ({k},{m}): {w}", d.series, d.rank));
        }
        count += 1;
    }
    Ok(count)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for (s, ranks) in [(Series::C, 2..=4), (Series::D, 3..=5)] {
        for n in ranks {
            let d = dat(s, n);
            for (k, m) in pairs(&d) {
                if s == Series::D && k == n && m == n {
                    continue;
                }
                let want = if m == d.phi(k) { d.q_pow(2) } else { d.q() };
                let got = d.sigma(k, m).map_err(|e| e.to_string())?;
                if got != want {
                    return Err(format!("{s}{n} sigma({k},{m}) = {got}, expected {want}"));
                }
                count += 1;
            }
        }
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!("{count} pairs, D (n,n) exempt"))
}

fn criterion_2() -> Outcome {
    let mut count = 0;
    for n in 2..=4 {
        let start = Instant::now();
        let d = dat(Series::C, n);
        count += images_match(&Algebra::symbolic(&d))?;
        within(start, Duration::from_secs(60))?;
    }
    Ok(format!(
        "{count} pairs (k,m) of C2..C4 match the closed form"
    ))
}

fn criterion_3() -> Outcome {
    let mut count = 0;
    for n in 3..=4 {
        let start = Instant::now();
        let d = dat(Series::D, n);
        count += images_match(&Algebra::symbolic(&d))?;
        within(start, Duration::from_secs(120))?;
    }
    let d5 = numeric(Series::D, 5);
    count += images_match(&Algebra::numeric(&d5).map_err(|e| e.to_string())?)?;
    Ok(format!(
        "{count} pairs (k,m) of D3, D4 (symbolic) and D5 (numeric) match"
    ))
}

/// τ_i from the closed-form coproduct coefficients, written out independently.
fn oracle_tau(d: &QuantumDatum, k: u32, m: u32, i: u32) -> LaurentPoly {
    let n = d.rank;
    match d.series {
        Series::C if (i == n - 1 && m == n) || (k == n && i == n) => &d.one() + &d.q_pow(-1),
        Series::D if (i == n - 1 && m == n) || (k == n && i == n) => d.zero(),
        Series::D if i == n - 1 => d.p(n, n - 1).clone(),
        _ => d.one(),
    }
}

fn criterion_4() -> Outcome {
    let mut count = 0;
    for (s, ranks) in [(Series::C, 2..=4), (Series::D, 3..=4)] {
        for n in ranks {
            let d = dat(s, n);
            let alg = Algebra::symbolic(&d);
            for (k, m) in pairs(&d) {
                let f = coproduct_formula(&alg, k, m, CoproductMode::Discover)
                    .map_err(|e| format!("{s}{n}: {e}"))?;
                coproduct_formula(&alg, k, m, CoproductMode::Assert)
                    .map_err(|e| format!("{s}{n}: {e}"))?;
                if f.terms.len() as u32 != m - k {
                    return Err(format!("{s}{n} ({k},{m}): {} terms", f.terms.len()));
                }
                for t in &f.terms {
                    let want = oracle_tau(&d, k, m, t.i);
                    if t.tau != want {
                        return Err(format!(
                            "{s}{n} ({k},{m}) tau_{} = {}, expected {want}",
                            t.i, t.tau
                        ));
                    }
                    count += 1;
                }
            }
        }
    }
    Ok(format!("{count} discovered coefficients match"))
}

fn criterion_5() -> Outcome {
    let mut count = 0;
    let sym = SuiteOptions::default();
    let num = SuiteOptions {
        arith: Arith::Numeric,
        ..SuiteOptions::default()
    };
    for (s, n, opts) in [
        (Series::C, 2, &sym),
        (Series::C, 3, &sym),
        (Series::C, 4, &sym),
        (Series::D, 3, &sym),
        (Series::D, 4, &sym),
        (Series::D, 5, &num),
        (Series::C, 5, &num),
    ] {
        count += require(&run_suite(&dat(s, n), Suite::Serre, opts).map_err(|e| e.to_string())?)?;
    }
    Ok(format!("{count} relations vanish"))
}

fn criterion_6() -> Outcome {
    let mut count = 0;
    for (s, n) in [
        (Series::C, 2),
        (Series::C, 3),
        (Series::C, 4),
        (Series::D, 3),
        (Series::D, 4),
    ] {
        let r = run_suite(&dat(s, n), Suite::Arrangements, &SuiteOptions::default())
            .map_err(|e| e.to_string())?;
        count += require(&r)?;
    }
    Ok(format!("{count} arrangement and recursion checks agree"))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut found = Vec::new();
    for (s, n) in [(Series::C, 2), (Series::D, 3)] {
        let r = verify_pbw_independence(&dat(s, n), 6, 0).map_err(|e| e.to_string())?;
        require(&r)?;
        let total = r.cases.last().map(|c| c.label.clone()).unwrap_or_default();
        found.push(format!(
            "{s}{n}: {}",
            total.split(" of ").next().unwrap_or("")
        ));
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("full rank up to degree 6 ({})", found.join(", ")))
}

fn criterion_8() -> Outcome {
    let mut count = 0;
    for s in [Series::C, Series::D] {
        count += require(&verify_identity_suite(&dat(s, 3), 0, 100).map_err(|e| e.to_string())?)?;
    }
    Ok(format!("{count} identity instances hold"))
}

fn criterion_9() -> Outcome {
    let mut count = 0;
    for n in 2..=4 {
        let d = dat(Series::A, n);
        let r = verify_an_no_exceptions(&Algebra::symbolic(&d), "symbolic")
            .map_err(|e| e.to_string())?;
        count += require(&r)?;
    }
    Ok(format!("{count} coproducts of A2..A4 have every tau = 1"))
}

fn criterion_10() -> Outcome {
    let mut count = 0;
    for n in 3..=5 {
        let d = dat(Series::D, n);
        let r = verify_vanishing_top_pair(&Algebra::symbolic(&d), "symbolic")
            .map_err(|e| e.to_string())?;
        count += require(&r)?;
    }
    Ok(format!(
        "e[n,n] = 0 and {count} checks of absent tensors in D3..D5"
    ))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("sigma closed form", criterion_1),
        ("series C generator images", criterion_2),
        ("series D generator images", criterion_3),
        ("coproduct coefficients", criterion_4),
        ("Serre vanishing", criterion_5),
        ("arrangement independence", criterion_6),
        ("PBW independence", criterion_7),
        ("bracket identities", criterion_8),
        ("series A has no exceptions", criterion_9),
        ("e[n,n] vanishes", criterion_10),
    ];
    let mut failed = 0;
    for (idx, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!(
                "PASS criterion {:>2} {name}: {detail} [{secs:.2}s]",
                idx + 1
            ),
            Err(witness) => {
                failed += 1;
                println!(
                    "FAIL criterion {:>2} {name}: {witness} [{secs:.2}s]",
                    idx + 1
                );
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
