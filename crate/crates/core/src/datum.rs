//! Cartan data, bicharacter tables and the self-pairings σ, μ.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coeffring::{lp_eval, Assignment, LaurentPoly, Monomial, VarSet};
use crate::error::{Error, Result};
use crate::freeword::{root_letters, Letters};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    A,
    C,
    D,
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Series::A => "A",
            Series::C => "C",
            Series::D => "D",
        })
    }
}

impl std::str::FromStr for Series {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "A" | "a" => Ok(Series::A),
            "C" | "c" => Ok(Series::C),
            "D" | "d" => Ok(Series::D),
            other => Err(format!("unknown series '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Specialization {
    /// Free `t_ij`, with `p_ji` forced by the Cartan data.
    Multiparameter,
    /// `t_ij = q^{d_i a_ij}`, hence `p_ji = 1` for `i < j`.
    OneParameter,
    /// Multiparameter table plus a rational point drawn from `seed`.
    Numeric { seed: u64 },
}

#[derive(Clone, Debug)]
pub struct QuantumDatum {
    pub series: Series,
    pub rank: u32,
    /// `cartan[i-1][j-1] = a_ij`
    pub cartan: Vec<Vec<i32>>,
    pub symmetrizer: Vec<i32>,
    pub vars: VarSet,
    /// `p[i-1][j-1] = p_ij`, always a single Laurent monomial.
    p: Vec<Vec<LaurentPoly>>,
    /// exponent vectors of the `p_ij`, for fast products
    p_exps: Vec<Vec<Monomial>>,
    pub specialization: Specialization,
    pub point: Option<Assignment>,
}

fn cartan_matrix(series: Series, n: usize) -> (Vec<Vec<i32>>, Vec<i32>) {
    let mut a = vec![vec![0i32; n]; n];
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = 2;
    }
    let mut d = vec![1i32; n];
    match series {
        Series::A => {
            for i in 0..n - 1 {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
        }
        Series::C => {
            for i in 0..n - 1 {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
            a[n - 2][n - 1] = -2;
            d[n - 1] = 2;
        }
        Series::D => {
            for i in 0..n - 2 {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
            a[n - 3][n - 1] = -1;
            a[n - 1][n - 3] = -1;
        }
    }
    (a, d)
}

const PRIMES: [i64; 40] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173,
];

/// Rational point used in numeric mode.
///
/// Seed 0 is the documented default: `q = 5` and the `t_ij`, in variable
/// order, take the primes 7, 11, 13, ... Other seeds draw distinct primes.
pub fn default_point(vars: VarSet, seed: u64) -> Assignment {
    let count = vars.len();
    let values: Vec<i64> = if seed == 0 {
        std::iter::once(5)
            .chain(PRIMES.iter().copied().filter(|&p| p >= 7))
            .take(count)
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<i64> = PRIMES.iter().copied().filter(|&p| p >= 3).collect();
        pool.shuffle(&mut rng);
        pool.into_iter().take(count).collect()
    };
    let mut pt = Assignment::new(vars);
    for (idx, v) in values.into_iter().enumerate() {
        pt.set(idx, BigRational::from_integer(BigInt::from(v)));
    }
    pt
}

pub fn make_datum(series: Series, n: u32, mode: Specialization) -> Result<QuantumDatum> {
    let min = if series == Series::D { 3 } else { 2 };
    if n < min || n > 12 {
        return Err(Error::InvalidRank { series, rank: n });
    }
    let vars = VarSet::new(n);
    let (cartan, symmetrizer) = cartan_matrix(series, n as usize);
    let nu = n as usize;
    let mut p_exps = vec![vec![Monomial::one(vars); nu]; nu];
    for i in 0..nu {
        p_exps[i][i].bump(0, symmetrizer[i]);
        for j in i + 1..nu {
            let dij = symmetrizer[i] * cartan[i][j];
            match mode {
                Specialization::OneParameter => {
                    p_exps[i][j].bump(0, dij);
                }
                _ => {
                    let t = vars.t_index(i as u32 + 1, j as u32 + 1).unwrap();
                    p_exps[i][j].bump(t, 1);
                    p_exps[j][i].bump(0, dij);
                    p_exps[j][i].bump(t, -1);
                }
            }
        }
    }
    let p = p_exps
        .iter()
        .map(|row| {
            row.iter()
                .map(|m| LaurentPoly::monomial(vars, m.clone()))
                .collect()
        })
        .collect();
    let point = match mode {
        Specialization::Numeric { seed } => Some(default_point(vars, seed)),
        _ => None,
    };
    let datum = QuantumDatum {
        series,
        rank: n,
        cartan,
        symmetrizer,
        vars,
        p,
        p_exps,
        specialization: mode,
        point,
    };
    datum.check_invariants()?;
    if let Some(pt) = &datum.point {
        check_point(series, pt)?;
    }
    Ok(datum)
}

/// A multiparameter datum evaluated at an explicit rational point.
pub fn numeric_datum(series: Series, n: u32, point: Assignment) -> Result<QuantumDatum> {
    let mut d = make_datum(series, n, Specialization::Multiparameter)?;
    if point.vars() != d.vars {
        return Err(Error::Coeff(crate::coeffring::CoeffError::VarSetMismatch(
            point.vars().rank(),
            n,
        )));
    }
    check_point(series, &point)?;
    d.specialization = Specialization::Numeric { seed: u64::MAX };
    d.point = Some(point);
    Ok(d)
}

fn check_point(series: Series, pt: &Assignment) -> Result<()> {
    pt.check_complete()
        .map_err(|e| Error::NumericAssignmentHitsExcludedRoot(e.to_string()))?;
    let q = pt.get(0).unwrap();
    if q.abs().is_one() {
        return Err(Error::NumericAssignmentHitsExcludedRoot(format!(
            "q = {q} for series {series}"
        )));
    }
    // over Q the only cube root of unity is 1, already excluded above
    Ok(())
}

impl QuantumDatum {
    pub fn n(&self) -> u32 {
        self.rank
    }

    /// Largest extended letter index: `n` for A, `2n-1` otherwise.
    pub fn max_letter(&self) -> u32 {
        match self.series {
            Series::A => self.rank,
            _ => 2 * self.rank - 1,
        }
    }

    pub fn phi(&self, i: u32) -> u32 {
        2 * self.rank - i
    }

    /// Physical generator index of an extended letter.
    pub fn fold(&self, i: u32) -> u32 {
        if i <= self.rank {
            i
        } else {
            2 * self.rank - i
        }
    }

    pub fn check_index(&self, k: u32, m: u32) -> Result<()> {
        if 1 <= k && k <= m && m <= self.max_letter() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(format!(
                "(k,m)=({k},{m}) outside 1 <= k <= m <= {} for {}{}",
                self.max_letter(),
                self.series,
                self.rank
            )))
        }
    }

    pub fn is_numeric(&self) -> bool {
        self.point.is_some()
    }

    /// `p_ij` at physical indices.
    pub fn p(&self, i: u32, j: u32) -> &LaurentPoly {
        &self.p[i as usize - 1][j as usize - 1]
    }

    pub fn p_mono(&self, i: u32, j: u32) -> &Monomial {
        &self.p_exps[i as usize - 1][j as usize - 1]
    }

    /// `p` at two extended letters (folded first).
    pub fn p_letters(&self, i: u32, j: u32) -> &LaurentPoly {
        self.p(self.fold(i), self.fold(j))
    }

    /// Bimultiplicative extension of `p` to words given as extended letters.
    pub fn p_words(&self, u: &[u8], v: &[u8]) -> LaurentPoly {
        self.p_degrees(&self.multidegree(u), &self.multidegree(v))
    }

    pub fn multidegree(&self, w: &[u8]) -> Vec<u32> {
        let mut deg = vec![0u32; self.rank as usize];
        for &l in w {
            deg[self.fold(l as u32) as usize - 1] += 1;
        }
        deg
    }

    pub fn p_degrees_mono(&self, du: &[u32], dv: &[u32]) -> Monomial {
        let mut m = Monomial::one(self.vars);
        for (i, &a) in du.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in dv.iter().enumerate() {
                if b != 0 {
                    m = m.mul(&self.p_exps[i][j].pow((a * b) as i32));
                }
            }
        }
        m
    }

    pub fn p_degrees(&self, du: &[u32], dv: &[u32]) -> LaurentPoly {
        LaurentPoly::monomial(self.vars, self.p_degrees_mono(du, dv))
    }

    pub fn q(&self) -> LaurentPoly {
        LaurentPoly::q(self.vars)
    }

    pub fn q_pow(&self, e: i32) -> LaurentPoly {
        LaurentPoly::q_pow(self.vars, e)
    }

    pub fn one(&self) -> LaurentPoly {
        LaurentPoly::one(self.vars)
    }

    pub fn zero(&self) -> LaurentPoly {
        LaurentPoly::zero(self.vars)
    }

    /// The root word of `(k,m)`: `v(k,m)` for A and C, `e(k,m)` for D.
    pub fn root_word(&self, k: u32, m: u32) -> Result<Letters> {
        self.check_index(k, m)?;
        Ok(root_letters(self, k, m))
    }

    /// `σ_k^m = p(w, w)` for the root word `w` of `(k,m)`.
    pub fn sigma(&self, k: u32, m: u32) -> Result<LaurentPoly> {
        let w = self.root_word(k, m)?;
        Ok(self.p_words(&w, &w))
    }

    /// `q^2` when `m = φ(k)`, `q` otherwise.
    pub fn sigma_closed_form(&self, k: u32, m: u32) -> LaurentPoly {
        if self.series != Series::A && m == self.phi(k) {
            self.q_pow(2)
        } else {
            self.q()
        }
    }

    /// `μ_k^{m,i} = p(w1,w2) p(w2,w1)` with `w1`, `w2` the root words of
    /// `(k,i)` and `(i+1,m)`.
    pub fn mu(&self, k: u32, m: u32, i: u32) -> Result<LaurentPoly> {
        if !(k <= i && i < m) {
            return Err(Error::IndexOutOfRange(format!(
                "mu needs k <= i < m, got ({k},{m},{i})"
            )));
        }
        let w1 = self.root_word(k, i)?;
        let w2 = self.root_word(i + 1, m)?;
        Ok(&self.p_words(&w1, &w2) * &self.p_words(&w2, &w1))
    }

    /// `σ_k^m (σ_k^i σ_{i+1}^m)^{-1}`, from the definitional σ values.
    pub fn mu_from_sigma(&self, k: u32, m: u32, i: u32) -> Result<LaurentPoly> {
        let num = self.sigma(k, m)?;
        let den = &self.sigma(k, i)? * &self.sigma(i + 1, m)?;
        Ok(&num * &den.inv_unit().expect("sigma is a monomial"))
    }

    /// `p(w, x_{m+1}) p(x_{m+1}, w)` for the root word `w` of `(k,m)`.
    pub fn extension_pairing(&self, k: u32, m: u32) -> Result<LaurentPoly> {
        let w = self.root_word(k, m)?;
        let x = [(m + 1) as u8];
        Ok(&self.p_words(&w, &x) * &self.p_words(&x, &w))
    }

    /// Closed form of [`Self::extension_pairing`]: 1 if `k = φ(m)-1`,
    /// `q^-2` if `k = φ(m)`, `q^-1` otherwise.
    pub fn extension_pairing_closed_form(&self, k: u32, m: u32) -> LaurentPoly {
        let f = self.phi(m);
        if k + 1 == f {
            self.one()
        } else if k == f {
            self.q_pow(-2)
        } else {
            self.q_pow(-1)
        }
    }

    pub fn eval(&self, a: &LaurentPoly) -> Option<BigRational> {
        self.point
            .as_ref()
            .map(|pt| lp_eval(a, pt).expect("complete point"))
    }

    fn check_invariants(&self) -> Result<()> {
        let n = self.rank as usize;
        let fail = |msg: String| Err(Error::TheoremMismatch { witness: msg });
        for i in 0..n {
            for j in 0..n {
                if self.symmetrizer[i] * self.cartan[i][j]
                    != self.symmetrizer[j] * self.cartan[j][i]
                {
                    return fail(format!("d_i a_ij asymmetric at ({},{})", i + 1, j + 1));
                }
                let prod = self.p_exps[i][j].mul(&self.p_exps[j][i]);
                let mut want = Monomial::one(self.vars);
                want.bump(0, self.symmetrizer[i] * self.cartan[i][j]);
                if i == j {
                    let mut pii = Monomial::one(self.vars);
                    pii.bump(0, self.symmetrizer[i]);
                    if self.p_exps[i][i] != pii {
                        return fail(format!("p_ii != q^d_i at i={}", i + 1));
                    }
                } else if prod != want {
                    return fail(format!(
                        "p_ij p_ji != q^(d_i a_ij) at ({},{})",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::parse_poly;

    fn pp(d: &QuantumDatum, s: &str) -> LaurentPoly {
        parse_poly(s, d.vars).unwrap()
    }

    #[test]
    fn c2_table() {
        let d = make_datum(Series::C, 2, Specialization::Multiparameter).unwrap();
        assert_eq!(d.p(1, 1), &pp(&d, "q"));
        assert_eq!(d.p(2, 2), &pp(&d, "q^2"));
        assert_eq!(d.p(1, 2), &pp(&d, "t_1_2"));
        assert_eq!(d.p(2, 1), &pp(&d, "q^-2*t_1_2^-1"));
        assert_eq!(
            &d.p_words(&[1], &[2]) * &d.p_words(&[2], &[1]),
            pp(&d, "q^-2")
        );
        assert_eq!(d.p_words(&[1, 2], &[2]), pp(&d, "q^2*t_1_2"));
        assert!(d.p_words(&[], &[1, 2]).is_one());
    }

    #[test]
    fn c_relations() {
        for n in 2..=5 {
            let d = make_datum(Series::C, n, Specialization::Multiparameter).unwrap();
            for i in 1..=n {
                for j in 1..=n {
                    let prod = d.p(i, j) * d.p(j, i);
                    let want = if i == j {
                        if i == n {
                            d.q_pow(4)
                        } else {
                            d.q_pow(2)
                        }
                    } else if i.abs_diff(j) == 1 {
                        if i.max(j) == n {
                            d.q_pow(-2)
                        } else {
                            d.q_pow(-1)
                        }
                    } else {
                        d.one()
                    };
                    assert_eq!(prod, want, "C{n} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn d_relations() {
        for n in 3..=6 {
            let d = make_datum(Series::D, n, Specialization::Multiparameter).unwrap();
            for i in 1..=n {
                assert_eq!(d.p(i, i), &d.q());
            }
            assert_eq!(d.p(n - 2, n) * d.p(n, n - 2), d.q_pow(-1));
            assert!((d.p(n - 1, n) * d.p(n, n - 1)).is_one());
            for i in 2..n {
                assert_eq!(d.p(i, i - 1) * d.p(i - 1, i), d.q_pow(-1));
            }
        }
    }

    #[test]
    fn one_parameter_a3() {
        let d = make_datum(Series::A, 3, Specialization::OneParameter).unwrap();
        assert_eq!(d.p(1, 2), &d.q_pow(-1));
        assert!(d.p(2, 1).is_one());
        assert_eq!(d.p(2, 2), &d.q());
    }

    #[test]
    fn folding_lookup() {
        let d = make_datum(Series::C, 3, Specialization::Multiparameter).unwrap();
        assert_eq!(d.fold(5), 1);
        assert_eq!(d.p_letters(5, 2), &pp(&d, "t_1_2"));
        let d4 = make_datum(Series::D, 4, Specialization::Multiparameter).unwrap();
        assert!((d4.p_letters(3, 4) * d4.p_letters(4, 3)).is_one());
    }

    #[test]
    fn sigma_examples() {
        let d = make_datum(Series::C, 3, Specialization::Multiparameter).unwrap();
        assert_eq!(d.sigma(1, 5).unwrap(), d.q_pow(2));
        assert_eq!(d.sigma(2, 3).unwrap(), d.q());
        assert_eq!(d.sigma(3, 3).unwrap(), d.q_pow(2));
        assert!(d.sigma(0, 2).is_err());
        assert!(d.sigma(2, 6).is_err());
    }

    #[test]
    fn mu_examples() {
        let d = make_datum(Series::C, 2, Specialization::Multiparameter).unwrap();
        assert_eq!(d.mu(1, 2, 1).unwrap(), d.q_pow(-2));
        // x_2, x_3 are the last two nodes of C_3, so p_23 p_32 = q^-2
        let d3 = make_datum(Series::C, 3, Specialization::Multiparameter).unwrap();
        assert_eq!(d3.mu(1, 3, 2).unwrap(), d3.q_pow(-2));
        assert_eq!(d3.mu(1, 3, 2).unwrap(), d3.mu_from_sigma(1, 3, 2).unwrap());
        let d4 = make_datum(Series::C, 4, Specialization::Multiparameter).unwrap();
        assert_eq!(d4.mu(1, 3, 2).unwrap(), d4.q_pow(-1));
    }

    #[test]
    fn rank_limits() {
        assert!(make_datum(Series::D, 2, Specialization::Multiparameter).is_err());
        assert!(make_datum(Series::C, 1, Specialization::Multiparameter).is_err());
        assert!(make_datum(Series::A, 2, Specialization::Multiparameter).is_ok());
    }

    #[test]
    fn numeric_points() {
        let d = make_datum(Series::D, 5, Specialization::Numeric { seed: 0 }).unwrap();
        let pt = d.point.as_ref().unwrap();
        assert_eq!(pt.get(0).unwrap(), &BigRational::from_integer(5.into()));
        assert_eq!(pt.get(1).unwrap(), &BigRational::from_integer(7.into()));
        assert_eq!(pt.get(2).unwrap(), &BigRational::from_integer(11.into()));
        let bad = Assignment::new(VarSet::new(3))
            .with(0, BigRational::from_integer((-1).into()))
            .with(1, BigRational::one())
            .with(2, BigRational::one())
            .with(3, BigRational::one());
        assert!(matches!(
            numeric_datum(Series::C, 3, bad),
            Err(Error::NumericAssignmentHitsExcludedRoot(_))
        ));
        for seed in 1..20 {
            let d = make_datum(Series::C, 4, Specialization::Numeric { seed }).unwrap();
            assert!(!d.point.as_ref().unwrap().get(0).unwrap().abs().is_one());
        }
    }
}
