//! The period matrix of the polylogarithmic extension and its monodromy.
//!
//! `P` has rows indexed by the global frame `(f, e_0, …, e_n)` and columns
//! by the rational basis `(1, e^0, …, e^n)`. With `L = log t / 2πi`:
//!
//! ```text
//! column e^j, row e_{j+m}:  (-L)^m / m!
//! column 1,   row e_k:      c_k = -Σ_{i=1}^{k} Λ_i (-L)^{k-i}/(k-i)!   (= -Li_k/(-2πi)^k)
//! ```
//!
//! so `P · (1, 0, Λ_1, …, Λ_n)ᵀ = f`. Continuing around a loop replaces `P` by
//! `P` times a rational matrix; which rational matrix (and on which side)
//! is fixed once by [`calibrate`].

use std::sync::OnceLock;

use num_traits::Zero;
use serde::Serialize;

use crate::dd::{cabs, cdd, creal, two_pi_i, two_pi_i_pow, Cdd, Dd};
use crate::error::{Error, Result};
use crate::localsys::{format_word, parse_word, pol_rep, Generator, Word};
use crate::mhs::{CycloScalar, MixedTateHS};
use crate::polynum::{
    continue_along, frame_weight, function_frame, lambda_values, li_continue, monodromy_numeric,
    unitriangular_solve, ContinuationState, Path, StepControl, DEFAULT_RADIUS,
};
use crate::qlinalg::RationalMatrix;

pub type CMatrix = Vec<Vec<Cdd>>;
pub type CycloMatrix = Vec<Vec<CycloScalar>>;

#[derive(Clone, Debug)]
pub struct PeriodMatrixP {
    level: usize,
    at: ContinuationState,
    entries: CMatrix,
}

impl PeriodMatrixP {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn state(&self) -> &ContinuationState {
        &self.at
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Cdd {
        self.entries[i][j]
    }

    /// The structure in split-frame normal form: twists `(0, 0, 1, …, n)`
    /// and period `D·P` with `D = diag((2πi)^{twist})`. Entries known to be
    /// exact (diagonal and structural zeros) are exact.
    pub fn to_mhs(&self) -> Result<MixedTateHS> {
        let d = self.level + 2;
        let twists: Vec<i32> = (0..d).map(frame_weight).collect();
        let period = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| {
                        if i == j {
                            CycloScalar::two_pi_i_pow(twists[i])
                        } else if twists[i] <= twists[j] {
                            CycloScalar::zero()
                        } else {
                            CycloScalar::numeric(self.entries[i][j] * two_pi_i_pow(twists[i]))
                        }
                    })
                    .collect()
            })
            .collect();
        MixedTateHS::new(twists, period)
    }
}

/// Build `P` from a continuation state at level `n >= 1`; column 0 is
/// generated from the `Λ` values.
pub fn build_p(state: &ContinuationState) -> Result<PeriodMatrixP> {
    let n = state.level();
    if n < 1 {
        return Err(Error::Domain("the period matrix needs level n >= 1".into()));
    }
    let d = n + 2;
    let neg_l = -(state.log() / two_pi_i());
    let mut powers = vec![cdd(1.0, 0.0)];
    for p in 1..=n {
        powers.push(powers[p - 1] * neg_l * creal(Dd::ONE / Dd::from(p as u64)));
    }
    let mut m = vec![vec![Cdd::zero(); d]; d];
    m[0][0] = cdd(1.0, 0.0);
    for j in 0..=n {
        for k in 0..=(n - j) {
            m[j + k + 1][j + 1] = powers[k];
        }
    }
    let lambda = lambda_values(state);
    for k in 1..=n {
        let s = (1..=k).fold(Cdd::zero(), |acc, i| acc + lambda[i - 1] * powers[k - i]);
        m[k + 1][0] = -s;
    }
    Ok(PeriodMatrixP {
        level: n,
        at: state.clone(),
        entries: m,
    })
}

/// `D·ρ·D^{-1}` with `D = diag((2πi)^{w})`: entry `(i, j)` is
/// `ρ_ij (2πi)^{w_i - w_j}`.
pub fn conjugate_matrix(rho: &RationalMatrix) -> CycloMatrix {
    (0..rho.rows())
        .map(|i| {
            (0..rho.cols())
                .map(|j| {
                    let q = &rho[(i, j)];
                    if q.is_zero() {
                        CycloScalar::zero()
                    } else {
                        CycloScalar::term(q.clone(), frame_weight(i) - frame_weight(j))
                    }
                })
                .collect()
        })
        .collect()
}

/// Undo [`conjugate_matrix`]: read off the rational coefficient of the
/// expected power of `2πi` in each entry. `None` if any entry is not of
/// that shape.
pub fn strip_two_pi_i(m: &CycloMatrix) -> Option<RationalMatrix> {
    let d = m.len();
    let mut out = RationalMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let e = &m[i][j];
            if e.is_zero() {
                continue;
            }
            out[(i, j)] = e.as_single_term(frame_weight(i) - frame_weight(j))?;
        }
    }
    Some(out)
}

/// Monodromy of the generators on the `2πi`-free function frame, from the
/// exact polylogarithmic representation.
pub fn conjugate_of_rep(n: usize) -> Result<(CycloMatrix, CycloMatrix)> {
    let rep = pol_rep(n)?;
    Ok((
        conjugate_matrix(rep.rho(Generator::Alpha0)),
        conjugate_matrix(rep.rho(Generator::Alpha1)),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `P_after = P_before · M`
    Right,
    /// `P_after = M · P_before`
    Left,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// `M = ρ(w)`
    Direct,
    /// `M = ρ(w)^{-1}`
    Inverse,
}

#[derive(Clone, Debug, Serialize)]
pub struct CandidateResult {
    pub side: Side,
    pub orientation: Orientation,
    pub level: usize,
    pub max_residual: f64,
}

/// The action convention, fixed empirically.
#[derive(Clone, Debug, Serialize)]
pub struct Convention {
    pub side: Side,
    pub orientation: Orientation,
    pub calibration_loop: String,
    pub calibration_level: usize,
    pub tolerance: f64,
    pub frame: &'static str,
    pub candidates: Vec<CandidateResult>,
}

const FRAME: &str = "rows (f, e_0..e_n), columns (1, e^0..e^n), powers of 2πi removed";

/// Exact expected right or left factor for a word.
pub fn expected_factor(word: &[(Generator, i32)], n: usize, orientation: Orientation) -> Result<RationalMatrix> {
    let rho = pol_rep(n)?.rho_word(word);
    Ok(match orientation {
        Orientation::Direct => rho,
        Orientation::Inverse => rho.inverse().expect("unipotent"),
    })
}

fn cmat_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let d = a.len();
    let mut out = vec![vec![Cdd::zero(); b[0].len()]; d];
    for i in 0..d {
        for k in 0..a[i].len() {
            let x = a[i][k];
            if x.is_zero() {
                continue;
            }
            for j in 0..b[k].len() {
                out[i][j] = out[i][j] + x * b[k][j];
            }
        }
    }
    out
}

fn cidentity(d: usize) -> CMatrix {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { cdd(1.0, 0.0) } else { Cdd::zero() }).collect())
        .collect()
}

pub fn cyclo_values(m: &CycloMatrix) -> CMatrix {
    m.iter().map(|row| row.iter().map(CycloScalar::value).collect()).collect()
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> (f64, (usize, usize)) {
    let mut worst = (0.0, (0, 0));
    for (i, (ra, rb)) in a.iter().zip(b).enumerate() {
        for (j, (x, y)) in ra.iter().zip(rb).enumerate() {
            let d = cabs(*x - *y);
            if d > worst.0 || d.is_nan() {
                worst = (d, (i, j));
            }
        }
    }
    worst
}

/// The numeric factor `X` with `Φ_after = Φ_before·X` (right) or
/// `Φ_after = X·Φ_before` (left).
fn numeric_factor(before: &CMatrix, after: &CMatrix, side: Side) -> CMatrix {
    match side {
        Side::Right => unitriangular_solve(before, after),
        Side::Left => {
            let inv = unitriangular_solve(before, &cidentity(before.len()));
            cmat_mul(after, &inv)
        }
    }
}

fn continue_word(word: &[(Generator, i32)], n: usize, tol: f64) -> Result<(ContinuationState, ContinuationState)> {
    let path = Path::word(word, DEFAULT_RADIUS)?;
    let before = ContinuationState::initial(n);
    let after = li_continue(&path, n, tol)?;
    Ok((before, after))
}

/// Try every (side, orientation) pair on `α₁`, raising the level until
/// exactly one candidate reproduces the exact representation within `tol`.
pub fn calibrate(tol: f64) -> Result<Convention> {
    let word = vec![(Generator::Alpha1, 1)];
    let mut candidates = Vec::new();
    for n in 1..=4 {
        let (before, after) = continue_word(&word, n, tol)?;
        let (fb, fa) = (function_frame(&before), function_frame(&after));
        let mut passing = Vec::new();
        for side in [Side::Right, Side::Left] {
            let x = numeric_factor(&fb, &fa, side);
            for orientation in [Orientation::Direct, Orientation::Inverse] {
                let expect = cyclo_values(&conjugate_matrix(&expected_factor(&word, n, orientation)?));
                let (r, _) = max_diff(&x, &expect);
                candidates.push(CandidateResult {
                    side,
                    orientation,
                    level: n,
                    max_residual: r,
                });
                if r < tol {
                    passing.push((side, orientation));
                }
            }
        }
        match passing.as_slice() {
            [] => {
                return Err(Error::Verification(format!(
                    "no action convention reproduces alpha1 at n = {n}"
                )))
            }
            [(side, orientation)] => {
                return Ok(Convention {
                    side: *side,
                    orientation: *orientation,
                    calibration_loop: "alpha1".into(),
                    calibration_level: n,
                    tolerance: tol,
                    frame: FRAME,
                    candidates,
                })
            }
            _ => continue,
        }
    }
    Err(Error::Verification("action convention stays ambiguous up to n = 4".into()))
}

/// The convention calibrated at tolerance `1e-9`, computed once per process.
pub fn convention() -> Result<&'static Convention> {
    static CONV: OnceLock<std::result::Result<Convention, String>> = OnceLock::new();
    CONV.get_or_init(|| calibrate(1e-9).map_err(|e| e.to_string()))
        .as_ref()
        .map_err(|e| Error::Verification(e.clone()))
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivarianceReport {
    #[serde(rename = "loop")]
    pub loop_word: String,
    pub n: usize,
    pub max_residual: f64,
    pub worst_entry: (usize, usize),
    pub reconstructed: CycloMatrix,
    pub expected: CycloMatrix,
    pub exact_match: bool,
    pub unrecognized: Vec<(usize, usize)>,
    pub continuation_err: f64,
    pub convention: Convention,
    pub passed: bool,
}

/// Continue `P` around the loop of `word` and compare the change of frame
/// with the exact representation, before and after rational
/// reconstruction.
pub fn verify_equivariance(word: &[(Generator, i32)], n: usize, tol: f64) -> Result<EquivarianceReport> {
    let conv = convention()?.clone();
    let (before, after) = continue_word(word, n, tol)?;
    equivariance_from_states(word, &before, &after, tol, conv)
}

fn equivariance_from_states(
    word: &[(Generator, i32)],
    before: &ContinuationState,
    after: &ContinuationState,
    tol: f64,
    conv: Convention,
) -> Result<EquivarianceReport> {
    let n = before.level();
    let x = numeric_factor(&function_frame(before), &function_frame(after), conv.side);
    let expected = conjugate_matrix(&expected_factor(word, n, conv.orientation)?);
    let (max_residual, worst_entry) = max_diff(&x, &cyclo_values(&expected));

    let path = Path::word(word, DEFAULT_RADIUS)?;
    let reconstructed = if conv.side == Side::Right {
        monodromy_numeric(&path, n, tol)?
    } else {
        return Err(Error::Verification("left actions are not reconstructed".into()));
    };
    let exact_match = reconstructed.is_exact() && reconstructed.matrix == expected;
    Ok(EquivarianceReport {
        loop_word: format_word(word),
        n,
        max_residual,
        worst_entry,
        passed: max_residual < tol && exact_match,
        reconstructed: reconstructed.matrix,
        expected,
        exact_match,
        unrecognized: reconstructed.unrecognized,
        continuation_err: after.err(),
        convention: conv,
    })
}

/// Equivariance reports for every level `1..=max_n`, reusing one
/// continuation at the top level.
pub fn verify_equivariance_levels(word: &[(Generator, i32)], max_n: usize, tol: f64) -> Result<Vec<EquivarianceReport>> {
    let conv = convention()?.clone();
    let (before, after) = continue_word(word, max_n, tol)?;
    (1..=max_n)
        .map(|n| {
            equivariance_from_states(
                word,
                &truncate(&before, n)?,
                &truncate(&after, n)?,
                tol,
                conv.clone(),
            )
        })
        .collect()
}

fn truncate(s: &ContinuationState, n: usize) -> Result<ContinuationState> {
    ContinuationState::from_values(s.point(), s.values()[..=n].to_vec(), s.err())
}

#[derive(Clone, Debug, Serialize)]
pub struct FInvarianceReport {
    #[serde(rename = "loop")]
    pub loop_word: String,
    pub n: usize,
    /// Coefficients `(1, 0, Λ_1, …, Λ_n)` of `f` at the base point, as
    /// `[re, im]` pairs.
    pub before: Vec<[f64; 2]>,
    pub after: Vec<[f64; 2]>,
    pub max_residual: f64,
    pub convention: Convention,
    pub passed: bool,
}

fn f_coefficients(state: &ContinuationState) -> Vec<Cdd> {
    let mut c = vec![cdd(1.0, 0.0), Cdd::zero()];
    c.extend(lambda_values(state));
    c
}

/// Transport `f = 1 + Σ Λ_k e^k` around the loop of `word`: with the
/// `Λ_k` recomputed from the continued values and the rational basis
/// corrected by its monodromy, the coefficient vector must return to
/// itself.
pub fn verify_f_invariance(word: &[(Generator, i32)], n: usize, tol: f64) -> Result<FInvarianceReport> {
    let conv = convention()?.clone();
    if conv.side != Side::Right {
        return Err(Error::Verification("f-invariance is formulated for right actions".into()));
    }
    if n < 1 {
        return Err(Error::Domain("f-invariance needs n >= 1".into()));
    }
    let (before, after) = continue_word(word, n, tol)?;
    let cb = f_coefficients(&before);
    let ca = f_coefficients(&after);
    // P_after = P_before·R, and P·c = f for both, so c_after = R^{-1} c_before
    let r = expected_factor(word, n, conv.orientation)?;
    let rinv = r.inverse().expect("unipotent");
    let corrected: Vec<Cdd> = (0..n + 2)
        .map(|i| (0..n + 2).fold(Cdd::zero(), |acc, j| acc + creal(Dd::from_rational(&rinv[(i, j)])) * cb[j]))
        .collect();
    let max_residual = ca
        .iter()
        .zip(&corrected)
        .map(|(a, b)| cabs(*a - *b))
        .fold(0.0, f64::max);
    let pairs = |v: &[Cdd]| v.iter().map(|z| [z.re.to_f64(), z.im.to_f64()]).collect();
    Ok(FInvarianceReport {
        loop_word: format_word(word),
        n,
        before: pairs(&cb),
        after: pairs(&ca),
        max_residual,
        passed: max_residual < tol,
        convention: conv,
    })
}

/// Values at `target` along two paths: `direct`, and `via` which first runs
/// around the loop of `word`. Returns the residual of
/// `Φ_via = Φ_direct · X(word)` with `X` the exact reconstructed factor,
/// and the residual between the two paths themselves.
#[derive(Clone, Debug, Serialize)]
pub struct PathComparison {
    pub loop_word: String,
    pub n: usize,
    /// `max |Φ_via - Φ_direct·X|`
    pub residual_with_monodromy: f64,
    /// `max |Φ_via - Φ_direct|`; zero up to error for homotopic paths
    pub raw_difference: f64,
    pub combined_err: f64,
}

pub fn compare_paths(
    direct: &Path,
    via_loop: &[(Generator, i32)],
    tail: &Path,
    n: usize,
    tol: f64,
) -> Result<PathComparison> {
    let a = li_continue(direct, n, tol)?;
    let loop_path = Path::word(via_loop, DEFAULT_RADIUS)?;
    let around = li_continue(&loop_path, n, tol)?;
    let b = continue_along(&around, tail, StepControl::default())?;
    if a.point() != b.point() {
        return Err(Error::Domain("paths end at different points".into()));
    }
    let x = if via_loop.is_empty() {
        cidentity(n + 2)
    } else {
        let m = monodromy_numeric(&loop_path, n, tol)?;
        if !m.is_exact() {
            return Err(Error::Verification("loop monodromy was not recognized exactly".into()));
        }
        cyclo_values(&m.matrix)
    };
    let (fa, fb) = (function_frame(&a), function_frame(&b));
    let (residual_with_monodromy, _) = max_diff(&fb, &cmat_mul(&fa, &x));
    let (raw_difference, _) = max_diff(&fa, &fb);
    Ok(PathComparison {
        loop_word: format_word(via_loop),
        n,
        residual_with_monodromy,
        raw_difference,
        combined_err: a.err() + b.err(),
    })
}

/// Parse a loop specification (`alpha0`, `alpha1`, or a word) into a word.
pub fn loop_word(spec: &str) -> Result<Word> {
    parse_word(spec)
}

/// Complex matrix as `[re, im]` pairs for reports.
pub fn cmatrix_pairs(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    m.iter()
        .map(|row| row.iter().map(|z| [z.re.to_f64(), z.im.to_f64()]).collect())
        .collect()
}

/// Rational matrix promoted to complex.
pub fn rational_to_complex(m: &RationalMatrix) -> CMatrix {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| creal(Dd::from_rational(&m[(i, j)]))).collect())
        .collect()
}

/// `P_after - P_before·R` in the period frame, for tests of the frame
/// change between `P` and the function frame.
pub fn period_residual(before: &PeriodMatrixP, after: &PeriodMatrixP, r: &RationalMatrix) -> f64 {
    let pr = cmat_mul(before.entries(), &rational_to_complex(r));
    max_diff(after.entries(), &pr).0
}
