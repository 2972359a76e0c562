//! `log t` and `Li_1(t), …, Li_n(t)` as multivalued functions on `C \ {0,1}`.
//!
//! Values are transported along polygonal paths by integrating the flat
//! connection
//!
//! ```text
//! d log = dt/t,   d Li_1 = dt/(1-t),   d Li_{k+1} = Li_k dt/t
//! ```
//!
//! with adaptive-order Taylor steps in double-double arithmetic. The
//! starting branch at `1/2` is the principal one, where every value is real.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cyclotomic::hurwitz_zeta_bounded;
use crate::dd::{cabs, cdd, creal, two_pi_i_pow, Cdd, Dd};
use crate::error::{Error, Result};
use crate::localsys::{format_word, Generator};
use crate::mhs::{recognize_multiple, CycloScalar, MAX_DENOMINATOR};
use crate::qlinalg::Q;

/// Default radius of the generator loops.
pub const DEFAULT_RADIUS: f64 = 0.4;

/// Closest approach to 0 or 1 that the integrator accepts.
pub const MIN_DISTANCE: f64 = 1e-8;

/// Vertices of the polygons approximating the generator circles.
const LOOP_VERTICES: usize = 64;

const MAX_ORDER: usize = 400;

/// Relative size below which a Taylor coefficient is treated as negligible.
const TRUNCATION: f64 = 1e-31;

pub fn base_point() -> Cdd {
    cdd(0.5, 0.0)
}

fn dist_point_segment(z: Complex<f64>, p: Complex<f64>, q: Complex<f64>) -> f64 {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - p).norm();
    }
    let s = (((z - p) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p + d * s - z).norm()
}

fn c64(z: Cdd) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

/// A polygonal path in `C \ {0, 1}`.
#[derive(Clone, Debug)]
pub struct Path {
    start: Cdd,
    waypoints: Vec<Cdd>,
    label: Option<String>,
}

impl Path {
    pub fn new(start: Cdd, waypoints: Vec<Cdd>) -> Result<Self> {
        let p = Path {
            start,
            waypoints,
            label: None,
        };
        for (i, (a, b)) in p.segments().enumerate() {
            for s in [0.0, 1.0] {
                let d = dist_point_segment(Complex::new(s, 0.0), c64(a), c64(b));
                if d.is_nan() || d <= 0.0 {
                    return Err(Error::Domain(format!(
                        "segment {i} from {} to {} passes through {s}",
                        c64(a),
                        c64(b)
                    )));
                }
            }
        }
        Ok(p)
    }

    /// A path starting at the base point `1/2`.
    pub fn from_base(waypoints: Vec<Cdd>) -> Result<Self> {
        Self::new(base_point(), waypoints)
    }

    /// Same as [`Path::from_base`] with double precision waypoints.
    pub fn from_points(points: &[(f64, f64)]) -> Result<Self> {
        Self::from_base(points.iter().map(|&(x, y)| cdd(x, y)).collect())
    }

    pub fn constant(at: Cdd) -> Self {
        Path {
            start: at,
            waypoints: Vec::new(),
            label: Some("1".into()),
        }
    }

    /// Positive circle of the given radius around 0, reached from `1/2`
    /// along the real axis.
    pub fn loop_alpha0(radius: f64) -> Result<Self> {
        Self::generator_loop(0.0, radius, 0.0, "alpha0")
    }

    /// Positive circle of the given radius around 1, reached from `1/2`
    /// along the real axis.
    pub fn loop_alpha1(radius: f64) -> Result<Self> {
        Self::generator_loop(1.0, radius, std::f64::consts::PI, "alpha1")
    }

    fn generator_loop(center: f64, radius: f64, phase: f64, name: &str) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::Domain(format!("loop radius {radius} must lie in (0, 1)")));
        }
        let entry = cdd(center + radius * phase.cos(), 0.0);
        let mut pts = vec![entry];
        for k in 1..LOOP_VERTICES {
            let a = phase + std::f64::consts::TAU * k as f64 / LOOP_VERTICES as f64;
            pts.push(cdd(center + radius * a.cos(), radius * a.sin()));
        }
        pts.push(entry);
        pts.push(base_point());
        let mut p = Self::from_base(pts)?;
        p.label = Some(name.into());
        Ok(p)
    }

    /// The loop traversing a word in the generators, left to right.
    pub fn word(word: &[(Generator, i32)], radius: f64) -> Result<Self> {
        let mut out = Path::constant(base_point());
        for &(g, e) in word {
            let base = match g {
                Generator::Alpha0 => Self::loop_alpha0(radius)?,
                Generator::Alpha1 => Self::loop_alpha1(radius)?,
            };
            let piece = if e < 0 { base.reversed() } else { base };
            for _ in 0..e.unsigned_abs() {
                out = out.then(&piece)?;
            }
        }
        out.label = Some(format_word(word));
        Ok(out)
    }

    pub fn start(&self) -> Cdd {
        self.start
    }

    pub fn end(&self) -> Cdd {
        self.waypoints.last().copied().unwrap_or(self.start)
    }

    pub fn waypoints(&self) -> &[Cdd] {
        &self.waypoints
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn is_closed(&self) -> bool {
        self.end() == self.start
    }

    pub fn segments(&self) -> impl Iterator<Item = (Cdd, Cdd)> + '_ {
        std::iter::once(self.start)
            .chain(self.waypoints.iter().copied())
            .zip(self.waypoints.iter().copied())
    }

    /// Concatenation: `self` followed by `other`.
    pub fn then(&self, other: &Path) -> Result<Path> {
        if self.end() != other.start {
            return Err(Error::Domain("paths do not compose: endpoint mismatch".into()));
        }
        let mut waypoints = self.waypoints.clone();
        waypoints.extend_from_slice(&other.waypoints);
        Ok(Path {
            start: self.start,
            waypoints,
            label: None,
        })
    }

    pub fn reversed(&self) -> Path {
        let mut pts: Vec<Cdd> = std::iter::once(self.start)
            .chain(self.waypoints.iter().copied())
            .collect();
        pts.reverse();
        let start = pts.remove(0);
        Path {
            start,
            waypoints: pts,
            label: None,
        }
    }
}

/// Values `(log t, Li_1(t), …, Li_n(t))` at a point, on the branch reached
/// along the path travelled so far.
#[derive(Clone, Debug)]
pub struct ContinuationState {
    level: usize,
    point: Cdd,
    values: Vec<Cdd>,
    err: f64,
    steps: usize,
}

impl ContinuationState {
    /// Principal values at `1/2` from the defining series.
    pub fn initial(n: usize) -> Self {
        let half = base_point();
        let mut values = Vec::with_capacity(n + 1);
        let (li1, _) = li_series_bounded(1, half, 1e-31).expect("series at 1/2 converges");
        values.push(-li1);
        for k in 1..=n {
            let (v, _) = li_series_bounded(k, half, 1e-31).expect("series at 1/2 converges");
            values.push(v);
        }
        ContinuationState {
            level: n,
            point: half,
            values,
            err: 1e-30,
            steps: 0,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn point(&self) -> Cdd {
        self.point
    }

    /// `(log, Li_1, …, Li_n)`.
    pub fn values(&self) -> &[Cdd] {
        &self.values
    }

    pub fn log(&self) -> Cdd {
        self.values[0]
    }

    /// `Li_k` for `1 <= k <= n`.
    pub fn li(&self, k: usize) -> Cdd {
        assert!(k >= 1 && k <= self.level, "Li_{k} is not tracked at level {}", self.level);
        self.values[k]
    }

    pub fn err(&self) -> f64 {
        self.err
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// A state with the given values, for tests and chaining.
    pub fn from_values(point: Cdd, values: Vec<Cdd>, err: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Shape("need at least the log value".into()));
        }
        Ok(ContinuationState {
            level: values.len() - 1,
            point,
            values,
            err,
            steps: 0,
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    /// Step length as a fraction of the distance to `{0, 1}`.
    pub fraction: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { fraction: 0.5 }
    }
}

/// One Taylor step from `c` by `h`; returns the new values and the local
/// error estimate.
fn taylor_step(c: Cdd, h: Cdd, y: &[Cdd]) -> (Vec<Cdd>, f64) {
    let one = cdd(1.0, 0.0);
    let r = h / c;
    let s = h / (one - c);
    let k = y.len();
    let scale = y.iter().map(|v| cabs(*v)).fold(1.0, f64::max);
    // u[i] holds the current scaled coefficient of component i
    let mut u: Vec<Cdd> = y.to_vec();
    let mut sum: Vec<Cdd> = y.to_vec();
    let mut small_run = 0;
    let mut last = [0.0f64; 2];
    for m in 0..MAX_ORDER {
        let mf = Dd::from(m as u64);
        let inv = Dd::ONE / Dd::from((m + 1) as u64);
        let mut next = vec![Cdd::zero(); k];
        let delta = if m == 0 { one } else { Cdd::zero() };
        next[0] = (delta * r - r * u[0] * creal(mf)) * creal(inv);
        if k > 1 {
            next[1] = (delta * s + s * u[1] * creal(mf)) * creal(inv);
        }
        for i in 2..k {
            next[i] = (r * u[i - 1] - r * u[i] * creal(mf)) * creal(inv);
        }
        let mag = next.iter().map(|v| cabs(*v)).fold(0.0, f64::max);
        for (acc, v) in sum.iter_mut().zip(&next) {
            *acc = *acc + *v;
        }
        u = next;
        last = [last[1], mag];
        if mag < TRUNCATION * scale {
            small_run += 1;
            if small_run >= 2 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    // remaining tail is geometric with ratio at most the step fraction
    let local = 2.0 * (last[0] + last[1]) + f64::EPSILON * f64::EPSILON * scale * 4.0;
    (sum, local)
}

/// Transport `state` along `path` (which must start at the state's point).
pub fn continue_along(state: &ContinuationState, path: &Path, control: StepControl) -> Result<ContinuationState> {
    if path.start() != state.point {
        return Err(Error::Domain("path does not start at the state's point".into()));
    }
    let mut y = state.values.clone();
    let mut err = state.err;
    let mut steps = state.steps;
    let one = cdd(1.0, 0.0);
    for (seg, (a, b)) in path.segments().enumerate() {
        let mut c = a;
        loop {
            let rem = b - c;
            let rem_len = cabs(rem);
            if rem_len == 0.0 {
                break;
            }
            let dist = cabs(c).min(cabs(one - c));
            if dist < MIN_DISTANCE {
                return Err(Error::StepUnderflow {
                    segment: seg,
                    from: c64(a).to_string(),
                    to: c64(b).to_string(),
                    distance: dist,
                });
            }
            let max_len = control.fraction * dist;
            let (h, last) = if rem_len <= max_len {
                (rem, true)
            } else {
                let f = Dd::from(max_len) / Dd::from(rem_len);
                (Complex::new(rem.re * f, rem.im * f), false)
            };
            let (ny, local) = taylor_step(c, h, &y);
            err += local + err * cabs(h) / dist;
            y = ny;
            steps += 1;
            c = if last { b } else { c + h };
            if last {
                break;
            }
        }
    }
    Ok(ContinuationState {
        level: state.level,
        point: path.end(),
        values: y,
        err,
        steps,
    })
}

/// Continue the principal values at `1/2` along `path`, checking the
/// accumulated error against `tol` per step.
pub fn li_continue(path: &Path, n: usize, tol: f64) -> Result<ContinuationState> {
    li_continue_with(path, n, tol, StepControl::default())
}

pub fn li_continue_with(path: &Path, n: usize, tol: f64, control: StepControl) -> Result<ContinuationState> {
    let s = continue_along(&ContinuationState::initial(n), path, control)?;
    if s.err > tol * (s.steps.max(1) as f64) {
        return Err(Error::Verification(format!(
            "continuation error {:e} exceeds {tol:e} per step over {} steps",
            s.err, s.steps
        )));
    }
    Ok(s)
}

/// `Σ_{m≥1} t^m / m^k` with the tail bound used to stop; see [`li_series`].
pub fn li_series_bounded(k: usize, t: Cdd, tol: f64) -> Result<(Cdd, f64)> {
    const MAX_TERMS: u64 = 100_000_000;
    if k == 0 {
        return Err(Error::Domain("Li_k needs k >= 1".into()));
    }
    let abs_t = cabs(t);
    let on_circle = (abs_t - 1.0).abs() <= 1e-14;
    if abs_t > 1.0 && !on_circle {
        return Err(Error::Domain(format!("|t| = {abs_t} > 1 is outside the series domain")));
    }
    let gap = cabs(cdd(1.0, 0.0) - t);
    if gap == 0.0 {
        return Err(Error::Domain("t = 1 is a singular point".into()));
    }
    if on_circle && k == 1 {
        return Err(Error::Domain("Li_1 does not converge on |t| = 1".into()));
    }
    if abs_t == 0.0 {
        return Ok((Cdd::zero(), 0.0));
    }
    let mut sum = Cdd::zero();
    let mut pow = t;
    let mut m: u64 = 1;
    loop {
        let mk = Dd::from(m).powi(k as i32);
        sum = sum + Complex::new(pow.re / mk, pow.im / mk);
        // Abel summation bound, valid on the closed disc
        let mk1 = ((m + 1) as f64).powi(k as i32);
        let mut bound = 2.0 / (gap * mk1);
        if !on_circle {
            let geo = abs_t.powf((m + 1) as f64) / (mk1 * (1.0 - abs_t));
            bound = bound.min(geo);
        }
        if bound < tol {
            return Ok((sum, bound));
        }
        if m >= MAX_TERMS {
            return Err(Error::NoConvergence(m as usize));
        }
        pow = pow * t;
        m += 1;
    }
}

/// `Li_k(t)` from the defining series, for `|t| < 1`, or `|t| = 1` with
/// `k >= 2` and `t != 1`.
pub fn li_series(k: usize, t: Cdd, tol: f64) -> Result<Cdd> {
    li_series_bounded(k, t, tol).map(|(v, _)| v)
}

/// How a value was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Continuation,
    Hurwitz,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Evaluation {
    #[serde(serialize_with = "serialize_cdd")]
    pub value: Cdd,
    pub err: f64,
    pub method: Method,
}

pub(crate) fn serialize_cdd<S: serde::Serializer>(z: &Cdd, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re.to_f64(), z.im.to_f64()].serialize(s)
}

/// Radius below which [`li_principal`] sums the series directly.
pub const SERIES_RADIUS: f64 = 0.75;

/// Principal value of `Li_k(t)`: the series for `|t| ≤ 3/4`, `ζ(k)` at
/// `t = 1`, and otherwise continuation along the straight segment from
/// `1/2` (which never crosses the cut `[1, ∞)`). On the negative real axis
/// that segment would meet 0, so it bends through `i/2`; `Li_k` is analytic
/// at 0, so the detour does not change the branch.
pub fn li_principal(k: usize, t: Cdd, tol: f64) -> Result<Evaluation> {
    if k == 0 {
        return Err(Error::Domain("Li_k needs k >= 1".into()));
    }
    if cabs(t) <= SERIES_RADIUS {
        let (value, err) = li_series_bounded(k, t, tol)?;
        return Ok(Evaluation {
            value,
            err,
            method: Method::Series,
        });
    }
    if t == cdd(1.0, 0.0) {
        if k == 1 {
            return Err(Error::Domain("Li_1 has a pole at t = 1".into()));
        }
        let (z, err) = hurwitz_zeta_bounded(k as u32, &Q::one(), tol)?;
        return Ok(Evaluation {
            value: creal(z),
            err,
            method: Method::Hurwitz,
        });
    }
    let waypoints = if t.im.is_zero() && t.re < Dd::ZERO {
        vec![cdd(0.0, 0.5), t]
    } else {
        vec![t]
    };
    let s = li_continue(&Path::from_base(waypoints)?, k, tol)?;
    Ok(Evaluation {
        value: s.li(k),
        err: s.err(),
        method: Method::Continuation,
    })
}

/// `Λ_1, …, Λ_n` where
/// `Λ_k = (-2πi)^{-k} Σ_{m=1}^{k} (-log)^{k-m}/(k-m)! · Li_m`.
pub fn lambda_values(state: &ContinuationState) -> Vec<Cdd> {
    let n = state.level;
    let neg_log = -state.log();
    // (-log)^p / p!
    let mut powers = vec![cdd(1.0, 0.0)];
    for p in 1..n {
        let prev = powers[p - 1];
        let inv = Dd::ONE / Dd::from(p as u64);
        powers.push(prev * neg_log * creal(inv));
    }
    (1..=n)
        .map(|k| {
            let s = (1..=k).fold(Cdd::zero(), |acc, m| acc + powers[k - m] * state.li(m));
            let minus_two_pi_i_k = if k % 2 == 0 { two_pi_i_pow(k as i32) } else { -two_pi_i_pow(k as i32) };
            s / minus_two_pi_i_k
        })
        .collect()
}

/// The multivalued functions arranged as a unipotent lower triangular
/// matrix with rows `(f, e_0, …, e_n)` and columns `(1, e^0, …, e^n)`:
/// column 0 holds `(-1)^{k+1} Li_k` in row `e_k` (and 0 in row `e_0`),
/// column `e^j` holds `(-log)^m/m!` in row `e_{j+m}`. This is the period
/// matrix with every power of `2πi` removed, so its monodromy is rational
/// up to explicit powers of `2πi`.
pub fn function_frame(state: &ContinuationState) -> Vec<Vec<Cdd>> {
    let n = state.level;
    let d = n + 2;
    let mut m = vec![vec![Cdd::zero(); d]; d];
    m[0][0] = cdd(1.0, 0.0);
    for k in 1..=n {
        let li = state.li(k);
        m[k + 1][0] = if k % 2 == 1 { li } else { -li };
    }
    let neg_log = -state.log();
    let mut powers = vec![cdd(1.0, 0.0)];
    for p in 1..=n {
        let inv = Dd::ONE / Dd::from(p as u64);
        powers.push(powers[p - 1] * neg_log * creal(inv));
    }
    for j in 0..=n {
        for mm in 0..=(n - j) {
            m[j + mm + 1][j + 1] = powers[mm];
        }
    }
    m
}

/// `A^{-1} B` for unipotent lower triangular `A`, by forward substitution.
pub fn unitriangular_solve(a: &[Vec<Cdd>], b: &[Vec<Cdd>]) -> Vec<Vec<Cdd>> {
    let d = a.len();
    let mut x = b.to_vec();
    for i in 0..d {
        for k in 0..i {
            let f = a[i][k];
            if f.is_zero() {
                continue;
            }
            for j in 0..d {
                let t = x[k][j];
                x[i][j] = x[i][j] - f * t;
            }
        }
    }
    x
}

/// Monodromy of a closed loop recovered numerically, in the function frame
/// of [`function_frame`]: `Φ_after = Φ_before · matrix`.
#[derive(Clone, Debug, Serialize)]
pub struct NumericMonodromy {
    pub loop_label: String,
    pub level: usize,
    /// Entry `(i, j)` recognized as a rational multiple of
    /// `(2πi)^{w_i - w_j}`, or left numeric with its value as remainder.
    pub matrix: Vec<Vec<CycloScalar>>,
    /// Entries that could not be recognized.
    pub unrecognized: Vec<(usize, usize)>,
    /// Largest distance between the numeric entry and its recognized value.
    pub reconstruction_residual: f64,
    pub continuation_err: f64,
    #[serde(skip)]
    pub numeric: Vec<Vec<Cdd>>,
}

impl NumericMonodromy {
    pub fn is_exact(&self) -> bool {
        self.unrecognized.is_empty()
    }
}

/// Weight of index `i` in the `(f, e_0, …, e_n)` frame.
pub fn frame_weight(i: usize) -> i32 {
    if i == 0 {
        0
    } else {
        i as i32 - 1
    }
}

/// Tolerance for recognizing an entry as an exact rational multiple of a
/// power of `2πi`. Reconstruction with denominators up to `10^6` is only
/// meaningful far below `10^{-12}`, so this is tied to the integration
/// error, not to the acceptance tolerance.
pub fn reconstruction_tolerance(err: f64) -> f64 {
    (err * 100.0).max(1e-20)
}

/// Continue around a closed loop based at `1/2` and recover the monodromy
/// of the function frame.
pub fn monodromy_numeric(path: &Path, n: usize, tol: f64) -> Result<NumericMonodromy> {
    if !path.is_closed() || path.start() != base_point() {
        return Err(Error::Domain("monodromy needs a closed loop based at 1/2".into()));
    }
    let before = ContinuationState::initial(n);
    let after = li_continue(path, n, tol)?;
    let x = unitriangular_solve(&function_frame(&before), &function_frame(&after));
    let rtol = reconstruction_tolerance(after.err());
    let d = n + 2;
    let mut matrix = vec![vec![CycloScalar::zero(); d]; d];
    let mut unrecognized = Vec::new();
    let mut residual: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let z = x[i][j];
            let k = frame_weight(i) - frame_weight(j);
            // above the diagonal and between equal weights the entry is
            // still reconstructed; a nonzero there is a genuine finding
            let k = k.max(0);
            match recognize_multiple(z, k, rtol, MAX_DENOMINATOR) {
                Some(q) => {
                    let exact = CycloScalar::term(q, k);
                    residual = residual.max(cabs(z - exact.value()));
                    matrix[i][j] = exact;
                }
                None => {
                    unrecognized.push((i, j));
                    matrix[i][j] = CycloScalar::numeric(z);
                }
            }
        }
    }
    Ok(NumericMonodromy {
        loop_label: path.label().unwrap_or("loop").to_string(),
        level: n,
        matrix,
        unrecognized,
        reconstruction_residual: residual,
        continuation_err: after.err(),
        numeric: x,
    })
}
