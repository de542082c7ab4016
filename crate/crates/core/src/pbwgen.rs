//! Structure constants α, ε, τ and the closed-form shuffle images of the
//! PBW generators.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coeffring::{LaurentPoly, ScalarDomain};
use crate::datum::{QuantumDatum, Series};
use crate::error::Result;
use crate::freeword::{has_nn1, make_word, word_order, Algebra, Direction, FreeElem, WordKind};
use crate::shuffle::ShuffleElem;

/// ε_k^m for series C, ϵ_k^m for series D, 1 for series A.
pub fn epsilon(d: &QuantumDatum, k: u32, m: u32) -> Result<LaurentPoly> {
    d.check_index(k, m)?;
    let n = d.rank;
    let f = d.phi(k);
    Ok(match d.series {
        Series::A => d.one(),
        Series::C => {
            if k <= n && n <= m && m != f {
                &d.one() + &d.q()
            } else if m == f && m != n {
                &d.one() + &d.q_pow(-1)
            } else {
                d.one()
            }
        }
        Series::D => {
            if has_nn1(d, k, m) && m == f {
                d.q_pow(-1)
            } else {
                d.one()
            }
        }
    })
}

/// `Π p_ij` over `lo <= i < j <= hi` at extended indices, skipping `skip`.
fn p_product(d: &QuantumDatum, lo: u32, hi: u32, skip: Option<u32>) -> LaurentPoly {
    let mut mono = crate::coeffring::Monomial::one(d.vars);
    for i in lo..=hi {
        for j in i + 1..=hi {
            if Some(i) == skip || Some(j) == skip {
                continue;
            }
            mono = mono.mul(d.p_mono(d.fold(i), d.fold(j)));
        }
    }
    LaurentPoly::monomial(d.vars, mono)
}

fn q_minus_one_pow(d: &QuantumDatum, e: u32) -> LaurentPoly {
    (&d.q() - &d.one()).pow(e)
}

/// α_k^m, read off the index sets printed with each closed form.
///
/// Series D at `(n,n)` returns 0: `e[n,n]` vanishes, and the three-case
/// formula would otherwise ask for `(q-1)^{-1}`.
pub fn alpha(d: &QuantumDatum, k: u32, m: u32) -> Result<LaurentPoly> {
    let eps = epsilon(d, k, m)?;
    let n = d.rank;
    let out = match d.series {
        Series::A | Series::C => &eps * &(&q_minus_one_pow(d, m - k) * &p_product(d, k, m, None)),
        Series::D => {
            if k == n && m == n {
                d.zero()
            } else if m < n || k > n {
                &q_minus_one_pow(d, m - k) * &p_product(d, k, m, None)
            } else if k == n {
                &q_minus_one_pow(d, m - n - 1) * &p_product(d, n, m, Some(n + 1))
            } else if m == n {
                &q_minus_one_pow(d, n - k - 1) * &p_product(d, k, m, Some(n - 1))
            } else {
                &eps * &(&q_minus_one_pow(d, m - k - 1) * &p_product(d, k, m, Some(n - 1)))
            }
        }
    };
    Ok(out)
}

/// The same constant expressed through the root word `w` itself:
/// `ε (q-1)^{|w|-1} Π_{a<b} p(w_a, w_b)`. Used as an independent check of
/// the index conventions in [`alpha`].
pub fn alpha_from_word(d: &QuantumDatum, k: u32, m: u32) -> Result<LaurentPoly> {
    let w = d.root_word(k, m)?;
    let mut mono = crate::coeffring::Monomial::one(d.vars);
    for a in 0..w.len() {
        for b in a + 1..w.len() {
            mono = mono.mul(d.p_mono(d.fold(w[a] as u32), d.fold(w[b] as u32)));
        }
    }
    let scale = &epsilon(d, k, m)? * &q_minus_one_pow(d, w.len() as u32 - 1);
    Ok(&scale * &LaurentPoly::monomial(d.vars, mono))
}

/// τ_i for `k <= i < m` as stated by the coproduct theorems.
pub fn tau_table(d: &QuantumDatum, k: u32, m: u32) -> Result<BTreeMap<u32, LaurentPoly>> {
    d.check_index(k, m)?;
    let n = d.rank;
    let mut out = BTreeMap::new();
    for i in k..m {
        let t = match d.series {
            Series::A => d.one(),
            Series::C => {
                if (i + 1 == n && m == n) || (k == n && i == n) {
                    &d.one() + &d.q_pow(-1)
                } else {
                    d.one()
                }
            }
            Series::D => {
                if (i + 1 == n && m == n) || (i == n && k == n) {
                    d.zero()
                } else if i + 1 == n {
                    d.p(n, n - 1).clone()
                } else {
                    d.one()
                }
            }
        };
        out.insert(i, t);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    pub alpha: LaurentPoly,
    pub epsilon: LaurentPoly,
    pub tau: BTreeMap<u32, LaurentPoly>,
}

pub fn structure_constants(d: &QuantumDatum, k: u32, m: u32) -> Result<StructureConstants> {
    Ok(StructureConstants {
        alpha: alpha(d, k, m)?,
        epsilon: epsilon(d, k, m)?,
        tau: tau_table(d, k, m)?,
    })
}

/// `α (v(m,k))` for A and C; for D `α {(e(m,k)) + p_{n-1,n} (e'(m,k))}` when
/// `e(k,m)` contains `x_n x_{n+1}` and `α (e(m,k))` otherwise.
pub fn closed_form_image<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
    k: u32,
    m: u32,
) -> Result<ShuffleElem<D::Elem>> {
    let d = alg.datum;
    let a = alg.embed(&alpha(d, k, m)?);
    let kind = if d.series == Series::D {
        WordKind::E
    } else {
        WordKind::V
    };
    let w = make_word(d, kind, k, m, Direction::Descending)?;
    let mut out = alg.comonomial(&w.extended);
    if has_nn1(d, k, m) {
        let wp = make_word(d, WordKind::EPrime, k, m, Direction::Descending)?;
        let c = alg.embed(d.p(d.rank - 1, d.rank));
        out.add_scaled(&alg.comonomial(&wp.extended), Some(&c));
    }
    Ok(out.scale(&a))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorId {
    pub k: u32,
    pub m: u32,
}

impl GeneratorId {
    pub fn label(&self, series: Series) -> String {
        let letter = if series == Series::D { 'e' } else { 'v' };
        format!("{letter}[{},{}]", self.k, self.m)
    }
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.k, self.m)
    }
}

/// Whether `(k,m)` indexes a member of the PBW generating set.
pub fn in_pbw_set(d: &QuantumDatum, k: u32, m: u32) -> bool {
    if !(1 <= k && k <= m && m <= d.max_letter()) {
        return false;
    }
    match d.series {
        Series::A => true,
        Series::C => m <= d.phi(k),
        Series::D => m < d.phi(k),
    }
}

/// PBW generators in increasing word order.
pub fn pbw_generators(d: &QuantumDatum) -> Vec<GeneratorId> {
    let mut out = Vec::new();
    for k in 1..=d.rank {
        for m in k..=d.max_letter() {
            if in_pbw_set(d, k, m) {
                out.push(GeneratorId { k, m });
            }
        }
    }
    let phys = |g: &GeneratorId| -> Vec<u8> {
        d.root_word(g.k, g.m)
            .unwrap()
            .iter()
            .map(|&l| d.fold(l as u32) as u8)
            .collect()
    };
    out.sort_by(|a, b| word_order(&phys(a), &phys(b)));
    out
}

/// The generators together with their bracketed free elements.
pub fn pbw_generator_elems<D: ScalarDomain>(
    alg: &Algebra<'_, D>,
) -> Result<Vec<(GeneratorId, FreeElem<D::Elem>)>> {
    pbw_generators(alg.datum)
        .into_iter()
        .map(|g| Ok((g, alg.pbw_bracketing(g.k, g.m)?)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::parse_poly;
    use crate::datum::{make_datum, Specialization};

    fn dat(s: Series, n: u32) -> QuantumDatum {
        make_datum(s, n, Specialization::Multiparameter).unwrap()
    }

    #[test]
    fn alpha_examples() {
        let d = dat(Series::C, 2);
        assert_eq!(
            alpha(&d, 1, 2).unwrap(),
            parse_poly("(1+q)*(q-1)*t_1_2", d.vars).unwrap()
        );
        assert_eq!(
            alpha(&d, 1, 3).unwrap(),
            parse_poly("(1+q^-1)*(q-1)^2*q^-1", d.vars).unwrap()
        );
        for (s, n) in [(Series::A, 3), (Series::C, 3), (Series::D, 4)] {
            let d = dat(s, n);
            for k in 1..=d.max_letter() {
                if !(s == Series::D && k == n) {
                    assert!(alpha(&d, k, k).unwrap().is_one());
                }
            }
        }
    }

    #[test]
    fn alpha_index_sets_match_word_form() {
        for (s, n) in [
            (Series::A, 4),
            (Series::C, 2),
            (Series::C, 4),
            (Series::D, 3),
            (Series::D, 5),
        ] {
            let d = dat(s, n);
            for k in 1..=d.max_letter() {
                for m in k..=d.max_letter() {
                    if s == Series::D && k == n && m == n {
                        continue;
                    }
                    assert_eq!(
                        alpha(&d, k, m).unwrap(),
                        alpha_from_word(&d, k, m).unwrap(),
                        "{s}{n} ({k},{m})"
                    );
                }
            }
        }
    }

    #[test]
    fn alpha_has_the_expected_factors() {
        // dividing out the (q-1), (1+q), (1+q^-1) factors leaves a unit
        let d = dat(Series::C, 3);
        let qm1 = &d.q() - &d.one();
        for k in 1..=5 {
            for m in k..=5 {
                let mut a = alpha(&d, k, m).unwrap();
                for _ in k..m {
                    a = a.div_exact(&qm1).unwrap();
                }
                let e = epsilon(&d, k, m).unwrap();
                a = a.div_exact(&e).unwrap();
                assert!(a.as_unit().is_some(), "({k},{m})");
            }
        }
    }

    #[test]
    fn tau_examples() {
        let c3 = dat(Series::C, 3);
        let t = tau_table(&c3, 2, 3).unwrap();
        assert_eq!(t[&2], parse_poly("1+q^-1", c3.vars).unwrap());
        let c2 = dat(Series::C, 2);
        assert!(tau_table(&c2, 1, 3).unwrap().values().all(|v| v.is_one()));
        let d4 = dat(Series::D, 4);
        let t = tau_table(&d4, 1, 7).unwrap();
        assert_eq!(t[&3], d4.p(4, 3).clone());
        assert!(t.iter().filter(|(&i, _)| i != 3).all(|(_, v)| v.is_one()));
        assert!(tau_table(&d4, 1, 4).unwrap()[&3].is_zero());
        assert!(tau_table(&d4, 4, 6).unwrap()[&4].is_zero());
    }

    #[test]
    fn generator_sets() {
        let c2 = dat(Series::C, 2);
        let g = pbw_generators(&c2);
        let ids: Vec<(u32, u32)> = g.iter().map(|g| (g.k, g.m)).collect();
        assert_eq!(ids.len(), 4);
        for want in [(1, 1), (1, 2), (1, 3), (2, 2)] {
            assert!(ids.contains(&want));
        }
        assert_eq!(pbw_generators(&dat(Series::D, 3)).len(), 6);
        for n in 2..=5 {
            assert_eq!(pbw_generators(&dat(Series::C, n)).len() as u32, n * n);
            assert_eq!(
                pbw_generators(&dat(Series::A, n)).len() as u32,
                n * (n + 1) / 2
            );
        }
        for n in 3..=6 {
            assert_eq!(pbw_generators(&dat(Series::D, n)).len() as u32, n * (n - 1));
        }
        // a proper beginning is greater: v(1,2) < v(1,1)
        let pos = |k, m| ids.iter().position(|&x| x == (k, m)).unwrap();
        assert!(pos(1, 2) < pos(1, 1));
        assert!(pos(1, 3) < pos(1, 2));
        assert!(pos(2, 2) < pos(1, 3));
    }

    #[test]
    fn closed_form_shapes() {
        let d4 = dat(Series::D, 4);
        let alg = Algebra::symbolic(&d4);
        let img = closed_form_image(&alg, 1, 5).unwrap();
        assert_eq!(img.len(), 2);
        assert!(img.coefficient(&[3, 4, 2, 1]).is_some());
        assert!(img.coefficient(&[4, 3, 2, 1]).is_some());
        for k in 1..=7 {
            if k != 4 {
                assert_eq!(
                    closed_form_image(&alg, k, k).unwrap(),
                    alg.comonomial(&[k as u8])
                );
            }
        }
    }
}
