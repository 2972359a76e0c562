//! Values at roots of unity.
//!
//! At `ω = e^{2πi a/d}` the logarithm is a rational multiple of `2πi`, so
//! the fiber of `Log` splits exactly and the polylogarithmic extension
//! projects to a class in `C / (2πi)^j Q`. That class is computed twice:
//! from the period matrix continued to `ω`, and directly from `Li_j(ω)`
//! through Hurwitz zeta values.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dd::{cabs, cdd, root_of_unity, two_pi_i, Cdd, Dd};
use crate::error::{Error, Result};
use crate::mhs::{congruent_mod, ext_class, recognize_rational, CycloScalar, MixedTateHS};
use crate::periods::build_p;
use crate::polynum::{li_continue, li_principal, Path};
use crate::qlinalg::{q, qf, RationalMatrix, Q};

/// Tolerance for identifying a numeric difference as an exact element of
/// `(2πi)^j Q`. The acceptance tolerance is applied to the residual after
/// identification; see [`crate::polynum::reconstruction_tolerance`].
const RECOGNITION_TOL: f64 = 1e-18;

const BERNOULLI_CACHE: usize = 40;

fn bernoulli_table(upto: usize) -> Vec<Q> {
    let mut b = vec![Q::one()];
    for m in 1..=upto {
        let mut acc = Q::zero();
        let mut binom = BigInt::one(); // C(m+1, k)
        for (k, bk) in b.iter().enumerate() {
            acc += Q::from_integer(binom.clone()) * bk;
            binom = binom * BigInt::from(m + 1 - k) / BigInt::from(k + 1);
        }
        b.push(-acc / q(m as i64 + 1));
    }
    b
}

/// Bernoulli number `B_n` with `B_1 = -1/2`, exact.
pub fn bernoulli(n: usize) -> Q {
    static CACHE: OnceLock<Vec<Q>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| bernoulli_table(BERNOULLI_CACHE));
    if n <= BERNOULLI_CACHE {
        cache[n].clone()
    } else {
        bernoulli_table(n).pop().expect("non-empty")
    }
}

/// `B_{2k} / (2k)!` for `k = 1..=20`.
fn em_coefficients() -> &'static [Dd] {
    static C: OnceLock<Vec<Dd>> = OnceLock::new();
    C.get_or_init(|| {
        let mut fact = Q::one();
        let mut out = Vec::new();
        for k in 1..=BERNOULLI_CACHE / 2 {
            fact *= q((2 * k - 1) as i64) * q((2 * k) as i64);
            out.push(Dd::from_rational(&(bernoulli(2 * k) / &fact)));
        }
        out
    })
}

/// `ζ(j, x)` with an error bound, by Euler–Maclaurin.
pub fn hurwitz_zeta_bounded(j: u32, x: &Q, tol: f64) -> Result<(Dd, f64)> {
    if j < 2 {
        return Err(Error::Domain("Hurwitz zeta needs j >= 2".into()));
    }
    if !x.is_positive() || *x > Q::one() {
        return Err(Error::Domain(format!("Hurwitz zeta needs 0 < x <= 1, got {x}")));
    }
    let s = j as i32;
    let xd = Dd::from_rational(x);
    let target = tol.min(1e-30);
    let coef = em_coefficients();
    let mut n: u64 = 32;
    loop {
        let mut sum = Dd::ZERO;
        for m in (0..n).rev() {
            sum += Dd::ONE / (Dd::from(m) + xd).powi(s);
        }
        let a = Dd::from(n) + xd;
        let a_pow = a.powi(s);
        sum += a / (a_pow * Dd::from(s - 1)) + Dd::ONE / (a_pow * Dd::from(2i32));
        // T_k = B_{2k}/(2k)! · s(s+1)…(s+2k-2) · a^{-s-2k+1}
        let inv_a2 = Dd::ONE / (a * a);
        let mut rising = Dd::from(s);
        let mut pow = Dd::ONE / (a_pow / a) * inv_a2; // a^{-s-1}
        let mut bound = f64::INFINITY;
        for (k, c) in coef.iter().enumerate() {
            if k > 0 {
                let base = (s + 2 * k as i32) as f64;
                rising = rising * Dd::from(base - 1.0) * Dd::from(base);
                pow = pow * inv_a2;
            }
            let term = *c * rising * pow;
            let mag = term.abs().to_f64();
            if mag < target {
                bound = mag;
                break;
            }
            sum += term;
        }
        let rounding = 1e-31 * sum.abs().to_f64() * 4.0;
        if bound.is_finite() {
            return Ok((sum, bound + rounding));
        }
        if n > 1 << 20 {
            return Err(Error::NoConvergence(n as usize));
        }
        n *= 2;
    }
}

/// `ζ(j, x) = Σ_{m≥0} (m + x)^{-j}` for `j >= 2`, `0 < x <= 1`.
pub fn hurwitz_zeta(j: u32, x: &Q, tol: f64) -> Result<Dd> {
    hurwitz_zeta_bounded(j, x, tol).map(|(v, _)| v)
}

/// `ω = e^{2πi a/d}`, stored in lowest terms with `0 < a < d`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootOfUnity {
    a: i64,
    d: i64,
    /// The input before reduction, when it was not already primitive.
    #[serde(skip_serializing_if = "Option::is_none")]
    requested: Option<(i64, i64)>,
}

impl RootOfUnity {
    /// Primitive root: `0 < a < d`, `gcd(a, d) = 1`.
    pub fn new(a: i64, d: i64) -> Result<Self> {
        if d < 2 || a <= 0 || a >= d || a.gcd(&d) != 1 {
            return Err(Error::Domain(format!(
                "{a}/{d} is not a primitive root of unity other than 1"
            )));
        }
        Ok(RootOfUnity { a, d, requested: None })
    }

    /// Any `ω != 1`: `a` is reduced mod `d` and `a/d` to lowest terms; the
    /// original input is kept for reports.
    pub fn reduced(a: i64, d: i64) -> Result<Self> {
        if d < 1 {
            return Err(Error::Domain(format!("modulus {d} must be positive")));
        }
        let r = a.rem_euclid(d);
        if r == 0 {
            return Err(Error::Domain("ω = 1 is excluded".into()));
        }
        let g = r.gcd(&d);
        let mut w = Self::new(r / g, d / g)?;
        if g != 1 || r != a {
            w.requested = Some((a, d));
        }
        Ok(w)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn is_primitive_input(&self) -> bool {
        self.requested.is_none()
    }

    pub fn value(&self) -> Cdd {
        root_of_unity(self.a, self.d)
    }

    /// `log ω / 2πi` on the principal branch, in `(-1/2, 1/2]`.
    pub fn principal_l(&self) -> Q {
        let x = qf(self.a, self.d);
        if x > qf(1, 2) {
            x - Q::one()
        } else {
            x
        }
    }

    /// The principal `log ω`, exactly.
    pub fn branch_log(&self) -> CycloScalar {
        CycloScalar::term(self.principal_l(), 1)
    }
}

/// `Li_j(ω) = d^{-j} Σ_{m=1}^{d} ω^{am} ζ(j, m/d)`.
pub fn li_at_root(j: u32, w: &RootOfUnity, tol: f64) -> Result<Cdd> {
    li_at_root_bounded(j, w, tol).map(|(v, _)| v)
}

/// [`li_at_root`] with the accumulated Hurwitz error bound.
pub fn li_at_root_bounded(j: u32, w: &RootOfUnity, tol: f64) -> Result<(Cdd, f64)> {
    if j < 2 {
        return Err(Error::Domain("Li_j at a root of unity needs j >= 2".into()));
    }
    let d = w.d;
    let per = tol / d as f64;
    let terms: Vec<(Cdd, f64)> = (1..=d)
        .into_par_iter()
        .map(|m| {
            let (z, err) = hurwitz_zeta_bounded(j, &qf(m, d), per)?;
            let r = root_of_unity(w.a * m, d);
            Ok((Cdd::new(r.re * z, r.im * z), err))
        })
        .collect::<Result<_>>()?;
    let (sum, err) = terms
        .into_iter()
        .fold((Cdd::new(Dd::ZERO, Dd::ZERO), 0.0), |(acc, e), (t, te)| (acc + t, e + te));
    let scale = Dd::ONE / Dd::from(d).powi(j as i32);
    let bound = err * scale.to_f64();
    Ok((Cdd::new(sum.re * scale, sum.im * scale), bound))
}

/// The fiber of `Log^{(n)}` at `ω` for `log ω = 2πi·l`, together with the
/// rational unipotent matrix that splits it.
#[derive(Clone, Debug, Serialize)]
pub struct SplitFiber {
    pub l: String,
    pub hs: MixedTateHS,
    pub splitting: RationalMatrix,
}

/// Period matrix of the fiber: entry `(k+m, k)` is `(2πi)^{k+m} (-l)^m/m!`.
pub fn log_fiber(l: &Q, n: usize) -> Result<MixedTateHS> {
    let r = n + 1;
    let mut powers = vec![Q::one()];
    for m in 1..=n {
        powers.push(&powers[m - 1] * (-l) / q(m as i64));
    }
    let period = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    if i < j || powers[i - j].is_zero() {
                        CycloScalar::zero()
                    } else {
                        CycloScalar::term(powers[i - j].clone(), i as i32)
                    }
                })
                .collect()
        })
        .collect();
    MixedTateHS::new((0..=n as i32).collect(), period)
}

fn check_diagonal(h: &MixedTateHS, u: &RationalMatrix) -> Result<()> {
    let split = h.rebase(u)?;
    for i in 0..h.rank() {
        for j in 0..h.rank() {
            if i != j && !split.entry(i, j).is_zero() {
                return Err(Error::Consistency(format!("splitting leaves entry ({i},{j})")));
            }
        }
    }
    Ok(())
}

pub fn split_log_fiber_at(l: &Q, n: usize) -> Result<SplitFiber> {
    if n < 1 {
        return Err(Error::Domain("the Log fiber needs n >= 1".into()));
    }
    let hs = log_fiber(l, n)?;
    // exact entries carry no remainder, so a zero tolerance decides exactly
    let splitting = hs
        .splitting(0.0)
        .ok_or_else(|| Error::Consistency(format!("Log fiber at l = {l} does not split")))?;
    check_diagonal(&hs, &splitting)?;
    Ok(SplitFiber {
        l: l.to_string(),
        hs,
        splitting,
    })
}

/// The fiber of `Log^{(n)}` at `ω` on the principal branch, split exactly.
pub fn split_log_fiber(w: &RootOfUnity, n: usize) -> Result<SplitFiber> {
    split_log_fiber_at(&w.principal_l(), n)
}

/// Path from `1/2` along the circle of radius `1/2` to angle `2π l`, then
/// radially out to `ω`.
pub fn path_to_root(w: &RootOfUnity) -> Result<Path> {
    let l = Dd::from_rational(&w.principal_l()).to_f64();
    let theta = std::f64::consts::TAU * l;
    let steps = ((theta.abs() / (std::f64::consts::TAU / 64.0)).ceil() as usize).max(1);
    let mut pts: Vec<Cdd> = (1..=steps)
        .map(|k| {
            let a = theta * k as f64 / steps as f64;
            cdd(0.5 * a.cos(), 0.5 * a.sin())
        })
        .collect();
    pts.push(w.value());
    Path::from_base(pts)
}

/// The class obtained by continuing the period matrix along a path.
#[derive(Clone, Debug, Serialize)]
pub struct ContinuedClass {
    pub value: CycloScalar,
    /// `log ω / 2πi` on the branch reached.
    pub l: String,
    /// Largest deviation of the continued `Log` block from the exact fiber.
    pub log_block_residual: f64,
    /// Largest off-diagonal entry of the `Log` block after the exact
    /// splitting.
    pub split_residual: f64,
    pub continuation_err: f64,
}

/// Continue to `ω` along `path`, build `P(ω)`, split its `Log` block with
/// the exact rational splitting and read off the `Q(j)`-component of the
/// extension of `Q(0)`.
pub fn class_along(j: u32, w: &RootOfUnity, path: &Path, tol: f64) -> Result<ContinuedClass> {
    if j < 1 {
        return Err(Error::Domain("weight j must be >= 1".into()));
    }
    if path.end() != w.value() {
        return Err(Error::Domain("path does not end at ω".into()));
    }
    let n = j as usize;
    let state = li_continue(path, n, tol)?;
    let y = state.log() / two_pi_i();
    if y.im.abs().to_f64() > 1e-20 {
        return Err(Error::Consistency("|ω| != 1 along the continued branch".into()));
    }
    let l = recognize_rational(y.re, 1e-20, w.d as u64)
        .ok_or_else(|| Error::Consistency("log ω / 2πi is not a multiple of 1/d".into()))?;
    let fiber = split_log_fiber_at(&l, n)?;

    let hs = build_p(&state)?.to_mhs()?;
    let mut log_block_residual: f64 = 0.0;
    for i in 0..=n {
        for k in 0..=i {
            let num = hs.entry(i + 1, k + 1).value();
            let exact = fiber.hs.entry(i, k).value();
            log_block_residual = log_block_residual.max(cabs(num - exact));
        }
    }
    let mut u = RationalMatrix::identity(n + 2);
    for i in 0..=n {
        for k in 0..=n {
            u[(i + 1, k + 1)] = fiber.splitting[(i, k)].clone();
        }
    }
    let split = hs.rebase(&u)?;
    let mut split_residual: f64 = 0.0;
    for i in 1..n + 2 {
        for k in 1..i {
            split_residual = split_residual.max(cabs(split.entry(i, k).value()));
        }
    }
    let kummer = split.restrict(&[0, n + 1])?;
    // the Kummer structure has period entry -s below the diagonal
    let s = -kummer.entry(1, 0).clone();
    debug_assert_eq!(ext_class(&kummer)?.value(), s.value());
    Ok(ContinuedClass {
        value: s,
        l: l.to_string(),
        log_block_residual,
        split_residual,
        continuation_err: state.err(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CyclotomicClass {
    pub j: u32,
    pub root: RootOfUnity,
    /// From the continued period matrix.
    pub way1: ContinuedClass,
    /// `(-1)^j Li_j(ω)` from Hurwitz values.
    pub way2: CycloScalar,
    /// `q` with `way1 - way2 ≈ q (2πi)^j`, when identified.
    pub difference: Option<String>,
    pub residual: f64,
    pub agree: bool,
}

impl CyclotomicClass {
    pub fn value(&self) -> &CycloScalar {
        &self.way1.value
    }
}

fn sign(j: u32) -> Dd {
    if j % 2 == 0 {
        Dd::ONE
    } else {
        -Dd::ONE
    }
}

fn cscale(z: Cdd, s: Dd) -> Cdd {
    Cdd::new(z.re * s, z.im * s)
}

/// Compare two candidate classes modulo `(2πi)^j Q`.
pub fn compare_mod(x: &CycloScalar, y: &CycloScalar, j: u32, tol: f64) -> (Option<Q>, f64, bool) {
    match congruent_mod(x, y, j as i32, RECOGNITION_TOL) {
        Some((qv, r)) => (Some(qv), r, r < tol),
        None => (None, cabs(x.value() - y.value()), false),
    }
}

/// The class of the pulled-back polylogarithm in `C / (2πi)^j Q`, two ways.
pub fn cyclotomic_class(j: u32, w: &RootOfUnity, tol: f64) -> Result<CyclotomicClass> {
    if j < 2 {
        return Err(Error::Domain("cyclotomic classes need j >= 2".into()));
    }
    let way1 = class_along(j, w, &path_to_root(w)?, tol)?;
    if way1.log_block_residual >= tol || way1.split_residual >= tol {
        return Err(Error::Verification(format!(
            "continued Log block is off the exact fiber by {:e}",
            way1.log_block_residual.max(way1.split_residual)
        )));
    }
    let li = li_at_root(j, w, tol * 1e-3)?;
    let way2 = CycloScalar::numeric(cscale(li, sign(j)));
    let (diff, residual, agree) = compare_mod(&way1.value, &way2, j, tol);
    Ok(CyclotomicClass {
        j,
        root: w.clone(),
        way1,
        way2,
        difference: diff.map(|d| d.to_string()),
        residual,
        agree,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RegulatorEntry {
    pub a: i64,
    /// `(-1)^j Li_j(ω^a)`, the internal canonical normalization.
    pub class: CycloScalar,
    /// `-Li_j(ω^a)`.
    pub neg_li: CycloScalar,
    /// `(-1)^{j-1}/j!` times the class.
    pub epsilon: CycloScalar,
    pub residual_vs_direct: f64,
    pub agree: bool,
    /// Residual of `conj(class(a)) - class(d - a)` modulo `(2πi)^j Q`.
    pub plus_residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RegulatorVector {
    pub j: u32,
    pub d: i64,
    pub entries: Vec<RegulatorEntry>,
    pub symmetric: bool,
}

impl RegulatorVector {
    pub fn classes(&self) -> BTreeMap<i64, CycloScalar> {
        self.entries.iter().map(|e| (e.a, e.class.clone())).collect()
    }

    pub fn passed(&self) -> bool {
        self.symmetric && self.entries.iter().all(|e| e.agree)
    }
}

/// Plus-part tolerance: conjugation symmetry is checked far tighter than
/// the two-way agreement.
pub const PLUS_TOL: f64 = 1e-12;

pub fn epsilon_factor(j: u32) -> Q {
    let fact = (1..=j as i64).fold(Q::one(), |acc, k| acc * q(k));
    let s = if j % 2 == 1 { Q::one() } else { -Q::one() };
    s / fact
}

pub fn regulator_vector(j: u32, d: i64, tol: f64) -> Result<RegulatorVector> {
    if j < 2 {
        return Err(Error::Domain("regulator values need j >= 2".into()));
    }
    if d < 2 {
        return Err(Error::Domain("regulator values need d >= 2 (ω != 1)".into()));
    }
    let residues: Vec<i64> = (1..d).filter(|a| a.gcd(&d) == 1).collect();
    let classes: Vec<CyclotomicClass> = residues
        .par_iter()
        .map(|&a| cyclotomic_class(j, &RootOfUnity::new(a, d)?, tol))
        .collect::<Result<_>>()?;
    let by_a: BTreeMap<i64, &CyclotomicClass> = residues.iter().copied().zip(&classes).collect();
    let eps = epsilon_factor(j);
    let entries: Vec<RegulatorEntry> = classes
        .iter()
        .map(|c| {
            let a = c.root.a();
            let partner = by_a[&(d - a)];
            let (_, plus_residual, _) = compare_mod(&c.value().conj(), partner.value(), j, PLUS_TOL);
            let li = cscale(c.way2.value(), sign(j));
            RegulatorEntry {
                a,
                class: c.value().clone(),
                neg_li: CycloScalar::numeric(-li),
                epsilon: c.value().scale(&eps),
                residual_vs_direct: c.residual,
                agree: c.agree,
                plus_residual,
            }
        })
        .collect();
    let symmetric = entries.iter().all(|e| e.plus_residual < PLUS_TOL);
    Ok(RegulatorVector { j, d, entries, symmetric })
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsilonValue {
    pub j: u32,
    pub b: i64,
    pub d: i64,
    pub value: CycloScalar,
    pub class: CycloScalar,
    /// `value / class`
    pub factor: String,
    pub neg_li: CycloScalar,
    /// `value / neg_li`
    pub factor_vs_neg_li: String,
}

/// `(-1)^{j-1}/j!` times the class at `ω = e^{2πi b/d}`.
pub fn epsilon_value(j: u32, b: i64, d: i64, tol: f64) -> Result<EpsilonValue> {
    let w = RootOfUnity::new(b.rem_euclid(d.max(1)), d)?;
    let c = cyclotomic_class(j, &w, tol)?;
    if !c.agree {
        return Err(Error::Verification(format!(
            "two-way class disagreement {:e} at {b}/{d}",
            c.residual
        )));
    }
    let f = epsilon_factor(j);
    // -Li_j = (-1)^{j+1} class
    let to_neg_li = if j % 2 == 1 { Q::one() } else { -Q::one() };
    Ok(EpsilonValue {
        j,
        b,
        d,
        value: c.value().scale(&f),
        class: c.value().clone(),
        factor: f.to_string(),
        neg_li: c.value().scale(&to_neg_li),
        factor_vs_neg_li: (&f / &to_neg_li).to_string(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DistributionReport {
    pub j: u32,
    pub t: [f64; 2],
    pub m: u32,
    /// `Li_j(ζt)` for `ζ = e^{2πik/m}`, `k = 0..m`.
    pub terms: Vec<[f64; 2]>,
    /// `m^{1-j} Li_j(t^m)`
    pub rhs: [f64; 2],
    pub residual: f64,
    pub passed: bool,
}

/// `Σ_{ζ^m = 1} Li_j(ζ t) - m^{1-j} Li_j(t^m)`.
pub fn distribution_check(j: u32, t: Cdd, m: u32, tol: f64) -> Result<DistributionReport> {
    if j < 1 || m < 2 {
        return Err(Error::Domain("distribution relations need j >= 1 and m >= 2".into()));
    }
    let inner = (tol * 1e-3).min(1e-25);
    let terms: Vec<Cdd> = (0..m as i64)
        .map(|k| li_principal(j as usize, root_of_unity(k, m as i64) * t, inner).map(|e| e.value))
        .collect::<Result<_>>()?;
    let tm = (1..m).fold(t, |acc, _| acc * t);
    let scale = Dd::ONE / Dd::from(m as u64).powi(j as i32 - 1);
    let rhs = cscale(li_principal(j as usize, tm, inner)?.value, scale);
    let lhs = terms.iter().fold(Cdd::new(Dd::ZERO, Dd::ZERO), |acc, z| acc + *z);
    let residual = cabs(lhs - rhs);
    let pair = |z: &Cdd| [z.re.to_f64(), z.im.to_f64()];
    Ok(DistributionReport {
        j,
        t: pair(&t),
        m,
        terms: terms.iter().map(pair).collect(),
        rhs: pair(&rhs),
        residual,
        passed: residual < tol,
    })
}
