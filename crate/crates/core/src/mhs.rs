//! Mixed Tate Hodge structures given by period matrices.
//!
//! A structure of rank `r` is stored in the canonical split complex frame:
//! basis vectors are ordered by non-decreasing Tate twist (so by
//! non-increasing weight), and column `j` of the period matrix expresses the
//! `j`-th rational basis vector in that frame. The matrix is lower
//! triangular, entry `(i, j)` vanishes unless `twist(i) > twist(j)` or
//! `i == j`, and the diagonal entry is exactly `(2πi)^{twist(j)}`.
//!
//! For two-step objects `0 → Q(n) → E → Q(0) → 0` the normal form is
//!
//! ```text
//! [  1        0     ]
//! [ -s   (2πi)^n    ]
//! ```
//!
//! and `s` is the extension class in `C / (2πi)^n Q`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dd::{cabs, cdd, two_pi_i_pow, Cdd, Dd};
use crate::error::{Error, Result};
use crate::qlinalg::{Q, RationalMatrix};

/// Default tolerance for splitting tests.
pub const SPLIT_TOL: f64 = 1e-9;
/// Largest denominator accepted by rational reconstruction.
pub const MAX_DENOMINATOR: u64 = 1_000_000;

/// `Σ q_k (2πi)^k + remainder` with exact rational `q_k` and a floating
/// complex remainder. Exact iff the remainder is zero.
#[derive(Clone, PartialEq)]
pub struct CycloScalar {
    coeffs: BTreeMap<i32, Q>,
    remainder: Cdd,
}

fn czero() -> Cdd {
    Complex::new(Dd::ZERO, Dd::ZERO)
}

impl CycloScalar {
    pub fn zero() -> Self {
        CycloScalar {
            coeffs: BTreeMap::new(),
            remainder: czero(),
        }
    }

    pub fn one() -> Self {
        Self::term(Q::one(), 0)
    }

    /// `q · (2πi)^k`.
    pub fn term(q: Q, k: i32) -> Self {
        let mut coeffs = BTreeMap::new();
        if !q.is_zero() {
            coeffs.insert(k, q);
        }
        CycloScalar {
            coeffs,
            remainder: czero(),
        }
    }

    pub fn rational(q: Q) -> Self {
        Self::term(q, 0)
    }

    /// `(2πi)^k`.
    pub fn two_pi_i_pow(k: i32) -> Self {
        Self::term(Q::one(), k)
    }

    pub fn numeric(z: Cdd) -> Self {
        CycloScalar {
            coeffs: BTreeMap::new(),
            remainder: z,
        }
    }

    pub fn from_c64(re: f64, im: f64) -> Self {
        Self::numeric(cdd(re, im))
    }

    pub fn coeffs(&self) -> &BTreeMap<i32, Q> {
        &self.coeffs
    }

    pub fn coeff(&self, k: i32) -> Q {
        self.coeffs.get(&k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn remainder(&self) -> Cdd {
        self.remainder
    }

    pub fn is_exact(&self) -> bool {
        self.remainder.re.is_zero() && self.remainder.im.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.is_exact()
    }

    /// Exact and of the form `q·(2πi)^k`; returns `q`.
    pub fn as_single_term(&self, k: i32) -> Option<Q> {
        if !self.is_exact() {
            return None;
        }
        match self.coeffs.len() {
            0 => Some(Q::zero()),
            1 => self.coeffs.get(&k).cloned(),
            _ => None,
        }
    }

    pub fn value(&self) -> Cdd {
        self.coeffs
            .iter()
            .fold(self.remainder, |acc, (&k, q)| {
                let qd = Dd::from_rational(q);
                let p = two_pi_i_pow(k);
                acc + Complex::new(p.re * qd, p.im * qd)
            })
    }

    pub fn value_c64(&self) -> Complex<f64> {
        let v = self.value();
        Complex::new(v.re.to_f64(), v.im.to_f64())
    }

    fn exact_value(&self) -> Cdd {
        CycloScalar {
            coeffs: self.coeffs.clone(),
            remainder: czero(),
        }
        .value()
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        let sd = Dd::from_rational(s);
        CycloScalar {
            coeffs: self.coeffs.iter().map(|(&k, q)| (k, q * s)).collect(),
            remainder: Complex::new(self.remainder.re * sd, self.remainder.im * sd),
        }
    }

    /// Multiply by `(2πi)^m`.
    pub fn mul_power(&self, m: i32) -> Self {
        CycloScalar {
            coeffs: self.coeffs.iter().map(|(&k, q)| (k + m, q.clone())).collect(),
            remainder: self.remainder * two_pi_i_pow(m),
        }
    }

    /// Complex conjugate: `(2πi)^k` conjugates to `(-1)^k (2πi)^k`.
    pub fn conj(&self) -> Self {
        CycloScalar {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&k, q)| (k, if k.rem_euclid(2) == 1 { -q.clone() } else { q.clone() }))
                .collect(),
            remainder: self.remainder.conj(),
        }
    }

    /// Canonical coset representative modulo `(2πi)^n Q`: the exact
    /// `(2πi)^n`-coefficient is dropped.
    pub fn reduce_mod(&self, n: i32) -> Self {
        let mut r = self.clone();
        r.coeffs.remove(&n);
        r
    }

    /// Try to recognise the remainder as `q·(2πi)^k`; on success it moves into
    /// the exact part.
    pub fn promote(&self, k: i32, tol: f64) -> Self {
        if self.is_exact() {
            return self.clone();
        }
        match recognize_multiple(self.remainder, k, tol, MAX_DENOMINATOR) {
            Some(q) => {
                let mut r = self.clone();
                r.remainder = czero();
                r + CycloScalar::term(q, k)
            }
            None => self.clone(),
        }
    }

    fn normalized(mut self) -> Self {
        self.coeffs.retain(|_, q| !q.is_zero());
        self
    }
}

impl Add for CycloScalar {
    type Output = CycloScalar;
    fn add(self, rhs: CycloScalar) -> CycloScalar {
        let mut coeffs = self.coeffs;
        for (k, q) in rhs.coeffs {
            *coeffs.entry(k).or_insert_with(Q::zero) += q;
        }
        CycloScalar {
            coeffs,
            remainder: self.remainder + rhs.remainder,
        }
        .normalized()
    }
}

impl<'a> Add<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn add(self, rhs: &CycloScalar) -> CycloScalar {
        self.clone() + rhs.clone()
    }
}

impl Neg for CycloScalar {
    type Output = CycloScalar;
    fn neg(self) -> CycloScalar {
        CycloScalar {
            coeffs: self.coeffs.into_iter().map(|(k, q)| (k, -q)).collect(),
            remainder: -self.remainder,
        }
    }
}

impl Sub for CycloScalar {
    type Output = CycloScalar;
    fn sub(self, rhs: CycloScalar) -> CycloScalar {
        self + (-rhs)
    }
}

impl<'a> Sub<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn sub(self, rhs: &CycloScalar) -> CycloScalar {
        self.clone() - rhs.clone()
    }
}

impl<'a> Mul<&'a CycloScalar> for &'a CycloScalar {
    type Output = CycloScalar;
    fn mul(self, rhs: &CycloScalar) -> CycloScalar {
        let mut coeffs: BTreeMap<i32, Q> = BTreeMap::new();
        for (&a, p) in &self.coeffs {
            for (&b, q) in &rhs.coeffs {
                *coeffs.entry(a + b).or_insert_with(Q::zero) += p * q;
            }
        }
        let remainder = self.exact_value() * rhs.remainder
            + self.remainder * rhs.exact_value()
            + self.remainder * rhs.remainder;
        CycloScalar { coeffs, remainder }.normalized()
    }
}

impl Mul for CycloScalar {
    type Output = CycloScalar;
    fn mul(self, rhs: CycloScalar) -> CycloScalar {
        &self * &rhs
    }
}

impl fmt::Debug for CycloScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(k, q)| format!("({q})(2πi)^{k}"))
            .collect();
        if self.is_zero() {
            return write!(f, "0");
        }
        if !self.is_exact() || parts.is_empty() {
            let r = self.remainder;
            parts.push(format!("({:e}{:+e}i)", r.re.to_f64(), r.im.to_f64()));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Serialize, Deserialize)]
struct ScalarRepr {
    coeffs: BTreeMap<String, String>,
    re: f64,
    im: f64,
}

impl Serialize for CycloScalar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ScalarRepr {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, q)| (k.to_string(), q.to_string()))
                .collect(),
            re: self.remainder.re.to_f64(),
            im: self.remainder.im.to_f64(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloScalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = ScalarRepr::deserialize(d)?;
        let mut coeffs = BTreeMap::new();
        for (k, q) in r.coeffs {
            let k: i32 = k.parse().map_err(D::Error::custom)?;
            let q: Q = q.parse().map_err(|_| D::Error::custom(format!("bad rational {q}")))?;
            coeffs.insert(k, q);
        }
        Ok(CycloScalar {
            coeffs,
            remainder: cdd(r.re, r.im),
        }
        .normalized())
    }
}

/// Best rational approximation of `x` by continued-fraction convergents with
/// denominator at most `max_den`, returned as soon as `|x - p/q| <= tol`.
pub fn recognize_rational(x: Dd, tol: f64, max_den: u64) -> Option<Q> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        let ai = a.to_f64() as i128;
        let p2 = ai * p1 + p0;
        let q2 = ai * q1 + q0;
        if q2 as u128 > max_den as u128 || q2 <= 0 {
            return None;
        }
        let approx = Dd::from(p2 as f64) / Dd::from(q2 as f64);
        if (x - approx).abs().to_f64() <= tol {
            return Some(Q::new(p2.into(), q2.into()));
        }
        let frac = y - a;
        if frac.to_f64().abs() < 1e-300 {
            return None;
        }
        y = Dd::ONE / frac;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

/// Recognise `z ≈ q·(2πi)^k` with `|z - q(2πi)^k| <= tol`.
pub fn recognize_multiple(z: Cdd, k: i32, tol: f64, max_den: u64) -> Option<Q> {
    if cabs(z) <= tol {
        return Some(Q::zero());
    }
    let p = two_pi_i_pow(k);
    let scale = cabs(p);
    let y = z / p;
    if y.im.abs().to_f64() * scale > tol {
        return None;
    }
    recognize_rational(y.re, tol / scale, max_den)
}

/// If `x ≡ y mod (2πi)^n Q` within `tol`, the rational `q` with
/// `x - y ≈ q (2πi)^n` and the residual `|x - y - q (2πi)^n|`.
pub fn congruent_mod(x: &CycloScalar, y: &CycloScalar, n: i32, tol: f64) -> Option<(Q, f64)> {
    let diff = x - y;
    let exact_n = diff.coeff(n);
    let rest = diff.reduce_mod(n);
    if rest.is_zero() {
        return Some((exact_n, 0.0));
    }
    let rest = rest.value();
    let q = recognize_multiple(rest, n, tol, MAX_DENOMINATOR)?;
    let residual = cabs(rest - CycloScalar::term(q.clone(), n).value());
    Some((exact_n + q, residual))
}

/// Mixed Tate Hodge structure in split-frame normal form.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixedTateHS {
    twists: Vec<i32>,
    period: Vec<Vec<CycloScalar>>,
}

impl MixedTateHS {
    pub fn new(twists: Vec<i32>, period: Vec<Vec<CycloScalar>>) -> Result<Self> {
        let r = twists.len();
        if period.len() != r || period.iter().any(|row| row.len() != r) {
            return Err(Error::Shape(format!("period matrix must be {r}x{r}")));
        }
        if twists.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Shape("twists must be non-decreasing".into()));
        }
        for i in 0..r {
            for j in 0..r {
                let e = &period[i][j];
                if i == j {
                    if e.as_single_term(twists[j]) != Some(Q::one()) {
                        return Err(Error::Shape(format!(
                            "diagonal entry {j} must be exactly (2πi)^{}",
                            twists[j]
                        )));
                    }
                } else if twists[i] <= twists[j] && !e.is_zero() {
                    return Err(Error::Shape(format!(
                        "entry ({i},{j}) must vanish in the split normal form"
                    )));
                }
            }
        }
        Ok(MixedTateHS { twists, period })
    }

    /// The pure structure `Q(n)`.
    pub fn tate(n: i32) -> Self {
        MixedTateHS {
            twists: vec![n],
            period: vec![vec![CycloScalar::two_pi_i_pow(n)]],
        }
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    pub fn twists(&self) -> &[i32] {
        &self.twists
    }

    pub fn period(&self) -> &[Vec<CycloScalar>] {
        &self.period
    }

    pub fn entry(&self, i: usize, j: usize) -> &CycloScalar {
        &self.period[i][j]
    }

    /// Direct sum, re-sorted by twist (stable).
    pub fn direct_sum(&self, other: &MixedTateHS) -> MixedTateHS {
        let r1 = self.rank();
        let r = r1 + other.rank();
        let twists: Vec<i32> = self.twists.iter().chain(&other.twists).copied().collect();
        let mut order: Vec<usize> = (0..r).collect();
        order.sort_by_key(|&i| twists[i]);
        let get = |i: usize, j: usize| -> CycloScalar {
            match (i < r1, j < r1) {
                (true, true) => self.period[i][j].clone(),
                (false, false) => other.period[i - r1][j - r1].clone(),
                _ => CycloScalar::zero(),
            }
        };
        MixedTateHS {
            twists: order.iter().map(|&i| twists[i]).collect(),
            period: order
                .iter()
                .map(|&i| order.iter().map(|&j| get(i, j)).collect())
                .collect(),
        }
    }

    /// `period · u` for a rational change of rational basis `u`.
    pub fn rebase(&self, u: &RationalMatrix) -> Result<MixedTateHS> {
        let r = self.rank();
        if u.rows() != r || u.cols() != r {
            return Err(Error::Shape("base change has the wrong size".into()));
        }
        let period = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        (0..r).fold(CycloScalar::zero(), |acc, k| {
                            if u[(k, j)].is_zero() {
                                acc
                            } else {
                                acc + self.period[i][k].scale(&u[(k, j)])
                            }
                        })
                    })
                    .collect()
            })
            .collect();
        MixedTateHS::new(self.twists.clone(), period)
    }

    /// The structure on the basis vectors `idx` (rows and columns). Only
    /// meaningful when the selected span is a subquotient, e.g. after a
    /// splitting.
    pub fn restrict(&self, idx: &[usize]) -> Result<MixedTateHS> {
        MixedTateHS::new(
            idx.iter().map(|&i| self.twists[i]).collect(),
            idx.iter()
                .map(|&i| idx.iter().map(|&j| self.period[i][j].clone()).collect())
                .collect(),
        )
    }

    /// Rational unipotent base change `u` with `period · u` diagonal, if one
    /// exists. Exact parts are decided exactly; a remainder counts as zero
    /// when its modulus is below `tol`.
    pub fn splitting(&self, tol: f64) -> Option<RationalMatrix> {
        let r = self.rank();
        let mut u = RationalMatrix::identity(r);
        for j in 0..r {
            for i in j + 1..r {
                if self.twists[i] <= self.twists[j] {
                    continue;
                }
                let mut x = self.period[i][j].clone();
                for k in j + 1..i {
                    if !u[(k, j)].is_zero() && !self.period[i][k].is_zero() {
                        x = x + self.period[i][k].scale(&u[(k, j)]);
                    }
                }
                let n = self.twists[i];
                if cabs(x.remainder) > tol {
                    return None;
                }
                let exact = CycloScalar {
                    coeffs: x.coeffs,
                    remainder: czero(),
                };
                let qv = exact.as_single_term(n)?;
                u[(i, j)] = -qv;
            }
        }
        Some(u)
    }

    pub fn is_split(&self, tol: f64) -> bool {
        self.splitting(tol).is_some()
    }
}

pub fn make_kummer(s: &CycloScalar, n: i32) -> Result<MixedTateHS> {
    if n < 1 {
        return Err(Error::Domain(format!("Kummer structures need n >= 1, got {n}")));
    }
    MixedTateHS::new(
        vec![0, n],
        vec![
            vec![CycloScalar::one(), CycloScalar::zero()],
            vec![-s.clone(), CycloScalar::two_pi_i_pow(n)],
        ],
    )
}

fn kummer_shape(h: &MixedTateHS) -> Result<i32> {
    match h.twists.as_slice() {
        [0, n] if *n >= 1 => Ok(*n),
        t => Err(Error::Shape(format!(
            "expected an extension of Q(0) by Q(n), got twists {t:?}"
        ))),
    }
}

/// Extension class of `0 → Q(n) → h → Q(0) → 0`, reduced to the canonical
/// coset representative.
pub fn ext_class(h: &MixedTateHS) -> Result<CycloScalar> {
    let n = kummer_shape(h)?;
    Ok((-h.period[1][0].clone()).reduce_mod(n))
}

/// Baer sum: pull back along the diagonal of `Q(0)` and push out along the
/// sum map `Q(n) ⊕ Q(n) → Q(n)`.
pub fn baer_sum(h1: &MixedTateHS, h2: &MixedTateHS) -> Result<MixedTateHS> {
    let n1 = kummer_shape(h1)?;
    let n2 = kummer_shape(h2)?;
    if n1 != n2 {
        return Err(Error::Shape(format!("cannot add classes for Q({n1}) and Q({n2})")));
    }
    let n = n1;
    let z = CycloScalar::zero;
    let w = CycloScalar::two_pi_i_pow(n);
    // fibre product over Q(0): rational basis (lift, sub_1, sub_2)
    let fibre = MixedTateHS::new(
        vec![0, n, n],
        vec![
            vec![CycloScalar::one(), z(), z()],
            vec![h1.period[1][0].clone(), w.clone(), z()],
            vec![h2.period[1][0].clone(), z(), w.clone()],
        ],
    )?;
    // push out: frame and rational basis both map by (x, y1, y2) ↦ (x, y1 + y2)
    let sum_rows = [[1, 0, 0], [0, 1, 1]];
    let image_of = |col: usize| -> Vec<CycloScalar> {
        sum_rows
            .iter()
            .map(|row| {
                (0..3).fold(z(), |acc, k| {
                    if row[k] == 1 {
                        acc + fibre.period[k][col].clone()
                    } else {
                        acc
                    }
                })
            })
            .collect()
    };
    let c0 = image_of(0);
    let c1 = image_of(1);
    MixedTateHS::new(
        vec![0, n],
        vec![vec![c0[0].clone(), c1[0].clone()], vec![c0[1].clone(), c1[1].clone()]],
    )
}

/// Tate twist by `m`: all twists shift by `m` and every period entry is
/// multiplied by `(2πi)^m`.
pub fn twist(h: &MixedTateHS, m: i32) -> MixedTateHS {
    MixedTateHS {
        twists: h.twists.iter().map(|t| t + m).collect(),
        period: h
            .period
            .iter()
            .map(|row| row.iter().map(|e| e.mul_power(m)).collect())
            .collect(),
    }
}

pub fn is_split(h: &MixedTateHS, tol: f64) -> bool {
    h.is_split(tol)
}
