//! Meijer-G function `G^{m,n}_{p,q}(x | a; b)` for real parameters and `x > 0`.
//!
//! Mellin–Barnes form used throughout:
//!
//! ```text
//! G(x) = (1/2πi) ∫_L F(s) ds,
//! F(s) = Π_{j<m} Γ(b_j - s) Π_{j<n} Γ(1 - a_j + s)
//!        / (Π_{j≥m} Γ(1 - b_j + s) Π_{j≥n} Γ(a_j - s)) · x^s
//! ```
//!
//! "Right" poles come from `Γ(b_j - s)` (`s = b_j + k`), "left" poles from
//! `Γ(1 - a_j + s)` (`s = a_j - 1 - k`). The contour keeps left poles on
//! its left.
//!
//! Evaluation paths:
//! * Slater's residue series over the right poles for small and moderate `x`;
//! * a vertical line moved to the real-axis saddle of `|F|` plus the residues
//!   of every pole it crosses, for large `x` or when the series loses too
//!   many digits to cancellation. Residues are taken numerically on small
//!   circles, which covers higher-order and partially cancelled poles;
//! * coincident right poles are resolved by a symmetric ±δ perturbation and
//!   Richardson extrapolation in δ.

use super::gamma::{gamma_signed, ln_gamma_complex};
use super::SpecialError;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;

/// `(m, n, p, q)` shapes accepted by [`meijer_g`] and [`meijer_g_remainder`].
pub const SUPPORTED_SHAPES: [(usize, usize, usize, usize); 6] = [
    (2, 0, 0, 2),
    (3, 0, 1, 3),
    (3, 1, 2, 4),
    (2, 2, 2, 4),
    (3, 2, 3, 5),
    (2, 1, 1, 3),
];

const DEGENERATE_TOL: f64 = 1e-7;
const PERTURBATION: f64 = 1e-3;
const PERTURBATION_AGREEMENT: f64 = 1e-10;
const SLATER_CONDITION_LIMIT: f64 = 1e4;
const PERTURBED_CONDITION_LIMIT: f64 = 1e10;
const SLATER_MAX_TERMS: usize = 5000;
const POLE_TOL: f64 = 1e-9;
const CIRCLE_NODES: usize = 64;
const GROUP_TOL: f64 = 1e-3;
const LINE_MAX_LEVELS: u32 = 14;
const LINE_MAX_EVALUATIONS: u64 = 400_000;

#[derive(Debug, Clone, PartialEq)]
pub struct MeijerGSpec {
    m: usize,
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl MeijerGSpec {
    /// `a` are the upper parameters (length p), `b` the lower (length q).
    pub fn new(m: usize, n: usize, a: Vec<f64>, b: Vec<f64>) -> Result<Self, SpecialError> {
        if m > b.len() || n > a.len() {
            return Err(SpecialError::InvalidSpec(format!(
                "m = {m}, n = {n} with p = {}, q = {}",
                a.len(),
                b.len()
            )));
        }
        if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(SpecialError::InvalidSpec("non-finite parameter".into()));
        }
        Ok(Self { m, n, a, b })
    }

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.m, self.n, self.a.len(), self.b.len())
    }

    pub fn upper(&self) -> &[f64] {
        &self.a
    }

    pub fn lower(&self) -> &[f64] {
        &self.b
    }

    pub fn is_supported(&self) -> bool {
        SUPPORTED_SHAPES.contains(&self.shape())
    }

    fn check_supported(&self) -> Result<(), SpecialError> {
        if self.is_supported() {
            Ok(())
        } else {
            Err(SpecialError::UnsupportedShape(self.shape()))
        }
    }

    fn q(&self) -> usize {
        self.b.len()
    }
}

impl fmt::Display for MeijerGSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, n, p, q) = self.shape();
        write!(f, "G^{{{m},{n}}}_{{{p},{q}}}(x | {:?}; {:?})", self.a, self.b)
    }
}

/// `G^{m,n}_{p,q}(x)` for one of the [`SUPPORTED_SHAPES`].
pub fn meijer_g(spec: &MeijerGSpec, x: f64) -> Result<f64, SpecialError> {
    spec.check_supported()?;
    check_argument(x)?;
    evaluate(spec, x)
}

/// `G(x)` minus the residues at all of its (finitely many) left poles: the
/// part of `G` that is not captured by its algebraic large-`x` expansion.
///
/// For the families used in capacity formulas the left-pole residues are
/// exactly the `log x` and constant terms that those formulas subtract, so
/// this evaluates such differences without cancellation.
pub fn meijer_g_remainder(spec: &MeijerGSpec, x: f64) -> Result<f64, SpecialError> {
    spec.check_supported()?;
    check_argument(x)?;
    let ln_x = x.ln();
    let left = all_left_poles(spec)?;
    if left.is_empty() {
        return evaluate(spec, x);
    }
    if let Ok(g) = evaluate_series(spec, x) {
        let neighbours = true_poles(spec, min_location(&left) - 2.0, max_location(&left) + 2.0)?;
        let (res, res_abs) = residue_sum(spec, ln_x, &left, &neighbours)?;
        let rem = g.value - res;
        let scale = g.value.abs() * g.condition + res_abs;
        if rem != 0.0 && scale / rem.abs() <= SLATER_CONDITION_LIMIT {
            return Ok(rem);
        }
    }
    let c = choose_abscissa(spec, x);
    let line = line_integral(spec, ln_x, c)?;
    let below: Vec<Pole> = true_poles(spec, c - 1e6f64.min(2.0 * c.abs() + 100.0), c)?
        .into_iter()
        .filter(|p| p.at < c)
        .collect();
    let neighbours = true_poles(spec, c - 2.0 * c.abs() - 102.0, c + 2.0)?;
    let (res, _) = residue_sum(spec, ln_x, &below, &neighbours)?;
    Ok(line - res)
}

/// `G(x)` from a single vertical line at `Re s = c` plus the residues of the
/// poles that lie on the wrong side of it. Any shape is accepted. This is
/// the fallback used by [`meijer_g`] and a direct way to cross-check it.
pub fn meijer_g_contour(spec: &MeijerGSpec, x: f64, c: f64) -> Result<f64, SpecialError> {
    check_argument(x)?;
    check_separable(spec)?;
    contour_at(spec, x.ln(), c)
}

fn check_argument(x: f64) -> Result<(), SpecialError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(super::domain("meijer_g", x, "x > 0"));
    }
    Ok(())
}

fn evaluate(spec: &MeijerGSpec, x: f64) -> Result<f64, SpecialError> {
    match evaluate_series(spec, x) {
        Ok(r) => Ok(r.value),
        Err(SeriesFailure::Fatal(e)) => Err(e),
        Err(SeriesFailure::Unreliable) => contour_auto(spec, x),
    }
}

struct SeriesValue {
    value: f64,
    condition: f64,
}

enum SeriesFailure {
    Unreliable,
    Fatal(SpecialError),
}

/// Series path (with perturbation for coincident right poles). Fails softly
/// when the contour should be used instead.
fn evaluate_series(spec: &MeijerGSpec, x: f64) -> Result<SeriesValue, SeriesFailure> {
    check_separable(spec).map_err(SeriesFailure::Fatal)?;
    let degenerate = degenerate_indices(spec);
    if degenerate.is_empty() {
        return match slater(spec, x) {
            Some(r) if r.condition <= SLATER_CONDITION_LIMIT => Ok(r),
            _ => Err(SeriesFailure::Unreliable),
        };
    }
    let offsets: Vec<(usize, f64)> = degenerate
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            let magnitude = (i / 2 + 1) as f64;
            (h, if i % 2 == 0 { magnitude } else { -magnitude })
        })
        .collect();
    let averaged = |delta: f64| -> Option<SeriesValue> {
        let mut total = 0.0;
        let mut condition = 0.0f64;
        for sign in [1.0, -1.0] {
            let mut b = spec.b.clone();
            for &(h, o) in &offsets {
                b[h] += sign * o * delta;
            }
            let shifted = MeijerGSpec { b, ..spec.clone() };
            if !degenerate_indices(&shifted).is_empty() {
                return None;
            }
            let r = slater(&shifted, x)?;
            if r.condition > PERTURBED_CONDITION_LIMIT {
                return None;
            }
            total += 0.5 * r.value;
            condition = condition.max(r.condition);
        }
        Some(SeriesValue { value: total, condition })
    };
    let (Some(g1), Some(g2), Some(g4)) = (
        averaged(PERTURBATION),
        averaged(2.0 * PERTURBATION),
        averaged(4.0 * PERTURBATION),
    ) else {
        return Err(SeriesFailure::Unreliable);
    };
    // The symmetric average is even in δ; one Richardson step removes the
    // δ² term, and the spread between two such steps bounds what is left.
    let fine = (4.0 * g1.value - g2.value) / 3.0;
    let coarse = (4.0 * g2.value - g4.value) / 3.0;
    // Conditioning relative to the unperturbed problem: the 1/δ growth of
    // the split coefficients is an artefact of the method.
    let condition = (g1.condition * PERTURBATION).max(1.0);
    let roundoff = g1.condition * f64::EPSILON;
    if (fine - coarse).abs() <= PERTURBATION_AGREEMENT * fine.abs() && roundoff <= PERTURBATION_AGREEMENT {
        return Ok(SeriesValue { value: fine, condition });
    }
    Err(SeriesFailure::Unreliable)
}

fn contour_auto(spec: &MeijerGSpec, x: f64) -> Result<f64, SpecialError> {
    let c = choose_abscissa(spec, x);
    contour_at(spec, x.ln(), c)
}

fn contour_at(spec: &MeijerGSpec, ln_x: f64, c: f64) -> Result<f64, SpecialError> {
    let line = line_integral(spec, ln_x, c)?;
    let (lo, hi) = pole_span(spec, c);
    let poles = true_poles(spec, lo, hi)?;
    let left: Vec<Pole> = poles.iter().copied().filter(|p| p.left && p.at > c).collect();
    let right: Vec<Pole> = poles.iter().copied().filter(|p| !p.left && p.at < c).collect();
    let neighbours = true_poles(spec, lo - 2.0, hi + 2.0)?;
    let (add, _) = residue_sum(spec, ln_x, &left, &neighbours)?;
    let (sub, _) = residue_sum(spec, ln_x, &right, &neighbours)?;
    Ok(line + add - sub)
}

/// Range covering every pole that a line at `c` can have on its wrong side.
fn pole_span(spec: &MeijerGSpec, c: f64) -> (f64, f64) {
    let max_left = spec.a[..spec.n].iter().map(|a| a - 1.0).fold(f64::NEG_INFINITY, f64::max);
    let min_right = spec.b[..spec.m].iter().copied().fold(f64::INFINITY, f64::min);
    let lo = c.min(min_right) - 0.5;
    let hi = c.max(max_left) + 0.5;
    (lo, hi)
}

// ---------------------------------------------------------------------------
// Slater series

/// Sum of residues over the right poles: for each `h < m`
/// `coef_h · x^{b_h} · pF_{q-1}(1 + b_h - a; 1 + b_h - b_{≠h}; (-1)^{p-m-n} x)`.
/// Returns `None` when a coefficient hits a pole or the series stalls.
fn slater(spec: &MeijerGSpec, x: f64) -> Option<SeriesValue> {
    let (m, n, p, q) = spec.shape();
    let z = if (p + m + n) % 2 == 0 { x } else { -x };
    let ln_x = x.ln();
    let mut parts: Vec<(f64, f64, f64)> = Vec::with_capacity(m);
    for h in 0..m {
        let bh = spec.b[h];
        let mut ln_c = bh * ln_x;
        let mut sign = 1.0;
        let mut vanishes = false;
        for j in 0..q {
            if j == h {
                continue;
            }
            let (lg, s) = if j < m {
                gamma_signed(spec.b[j] - bh)
            } else {
                let (lg, s) = gamma_signed(1.0 + bh - spec.b[j]);
                (-lg, s)
            };
            if s == 0.0 {
                // Pole in a numerator gamma: degenerate; reciprocal: zero
                // coefficient with a series that would divide by zero.
                return None;
            }
            ln_c += lg;
            sign *= s;
        }
        for j in 0..p {
            let (lg, s) = if j < n {
                gamma_signed(1.0 + bh - spec.a[j])
            } else {
                let (lg, s) = gamma_signed(spec.a[j] - bh);
                (-lg, s)
            };
            if s == 0.0 {
                if j < n {
                    return None;
                }
                vanishes = true;
                break;
            }
            ln_c += lg;
            sign *= s;
        }
        if vanishes {
            continue;
        }
        let alpha: Vec<f64> = spec.a.iter().map(|a| 1.0 + bh - a).collect();
        let beta: Vec<f64> = spec
            .b
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != h)
            .map(|(_, b)| 1.0 + bh - b)
            .collect();
        let mut term = 1.0f64;
        let mut sum = 1.0f64;
        let mut sum_abs = 1.0f64;
        let mut converged = false;
        for k in 0..SLATER_MAX_TERMS {
            let kf = k as f64;
            let mut ratio = z / (kf + 1.0);
            for al in &alpha {
                ratio *= al + kf;
            }
            for be in &beta {
                let d = be + kf;
                if d == 0.0 {
                    return None;
                }
                ratio /= d;
            }
            term *= ratio;
            sum += term;
            sum_abs += term.abs();
            if term == 0.0 || (term.abs() <= 1e-17 * sum.abs() && ratio.abs() < 0.5) {
                converged = true;
                break;
            }
            if !term.is_finite() {
                return None;
            }
        }
        if !converged || sum == 0.0 {
            if !converged {
                return None;
            }
            continue;
        }
        parts.push((ln_c + sum.abs().ln(), sign * sum.signum(), (sum_abs / sum.abs()).ln()));
    }
    if parts.is_empty() {
        return Some(SeriesValue {
            value: 0.0,
            condition: 1.0,
        });
    }
    let top = parts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let mut value = 0.0;
    let mut magnitude = 0.0;
    for (ln_mag, sign, ln_cond) in &parts {
        let w = (ln_mag - top).exp();
        value += sign * w;
        magnitude += w * ln_cond.exp();
    }
    if value == 0.0 {
        return None;
    }
    let condition = magnitude / value.abs();
    Some(SeriesValue {
        value: value * top.exp(),
        condition,
    })
}

/// Indices `h < m` whose right-pole family collides with another one (or
/// with a zero of a denominator gamma), so the series coefficients blow up.
fn degenerate_indices(spec: &MeijerGSpec) -> Vec<usize> {
    let m = spec.m;
    let mut marked = vec![false; m];
    for h in 0..m {
        for j in 0..spec.q() {
            if j == h {
                continue;
            }
            let d = spec.b[j] - spec.b[h];
            if j < m {
                if near_integer(d) {
                    marked[h] = true;
                    marked[j] = true;
                }
            } else if near_integer(d) && d.round() >= 1.0 {
                // 1 + b_h - b_j ∈ {0, -1, ...}
                marked[h] = true;
            }
        }
    }
    (0..m).filter(|&h| marked[h]).collect()
}

fn near_integer(d: f64) -> bool {
    (d - d.round()).abs() <= DEGENERATE_TOL * d.abs().max(1.0)
}

// ---------------------------------------------------------------------------
// Pole bookkeeping

#[derive(Debug, Clone, Copy)]
struct Pole {
    at: f64,
    left: bool,
}

fn same_point(x: f64, y: f64) -> bool {
    (x - y).abs() <= POLE_TOL * x.abs().max(1.0)
}

fn nonneg_integer(v: f64) -> bool {
    let r = v.round();
    r >= 0.0 && (v - r).abs() <= POLE_TOL * v.abs().max(1.0)
}

/// Multiplicities at `s`: (left numerator poles, right numerator poles,
/// denominator poles).
fn multiplicities(spec: &MeijerGSpec, s: f64) -> (i32, i32, i32) {
    let mut left = 0;
    let mut right = 0;
    let mut den = 0;
    for (j, &a) in spec.a.iter().enumerate() {
        if j < spec.n {
            left += nonneg_integer(a - 1.0 - s) as i32;
        } else {
            den += nonneg_integer(s - a) as i32;
        }
    }
    for (j, &b) in spec.b.iter().enumerate() {
        if j < spec.m {
            right += nonneg_integer(s - b) as i32;
        } else {
            den += nonneg_integer(b - 1.0 - s) as i32;
        }
    }
    (left, right, den)
}

/// Points in `[lo, hi]` where a numerator gamma has a pole.
fn numerator_points(spec: &MeijerGSpec, lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = Vec::new();
    for &a in &spec.a[..spec.n] {
        let top = a - 1.0;
        let k_min = (top - hi).ceil().max(0.0) as i64;
        let k_max = (top - lo).floor();
        if k_max < 0.0 {
            continue;
        }
        for k in k_min..=(k_max as i64) {
            pts.push(top - k as f64);
        }
    }
    for &b in &spec.b[..spec.m] {
        let k_min = (lo - b).ceil().max(0.0) as i64;
        let k_max = (hi - b).floor();
        if k_max < 0.0 {
            continue;
        }
        for k in k_min..=(k_max as i64) {
            pts.push(b + k as f64);
        }
    }
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| same_point(*x, *y));
    pts
}

/// Points in `[lo, hi]` where any gamma in `F` (numerator or denominator) is singular.
fn singular_points(spec: &MeijerGSpec, lo: f64, hi: f64) -> Vec<f64> {
    let mut pts = numerator_points(spec, lo, hi);
    for &a in &spec.a[spec.n..] {
        let k_min = (lo - a).ceil().max(0.0) as i64;
        let k_max = (hi - a).floor();
        if k_max >= 0.0 {
            for k in k_min..=(k_max as i64) {
                pts.push(a + k as f64);
            }
        }
    }
    for &b in &spec.b[spec.m..] {
        let top = b - 1.0;
        let k_min = (top - hi).ceil().max(0.0) as i64;
        let k_max = (top - lo).floor();
        if k_max >= 0.0 {
            for k in k_min..=(k_max as i64) {
                pts.push(top - k as f64);
            }
        }
    }
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts
}

/// Poles of `F` with positive net order in `[lo, hi]`.
fn true_poles(spec: &MeijerGSpec, lo: f64, hi: f64) -> Result<Vec<Pole>, SpecialError> {
    let mut out = Vec::new();
    for s in numerator_points(spec, lo, hi) {
        let (l, r, d) = multiplicities(spec, s);
        let order = l + r - d;
        if order <= 0 {
            continue;
        }
        if l > 0 && r > 0 {
            return Err(SpecialError::Inseparable(format!("{spec}: left and right poles meet at s = {s}")));
        }
        out.push(Pole {
            at: s,
            left: l > 0,
        });
    }
    Ok(out)
}

fn check_separable(spec: &MeijerGSpec) -> Result<(), SpecialError> {
    // A left pole a_i - 1 - k can only meet a right pole b_j + k' when
    // a_i - 1 - b_j is a non-negative integer.
    for &a in &spec.a[..spec.n] {
        for &b in &spec.b[..spec.m] {
            let gap = a - 1.0 - b;
            if nonneg_integer(gap) {
                let lo = b - 0.5;
                let hi = a - 0.5;
                true_poles(spec, lo, hi)?;
            }
        }
    }
    Ok(())
}

/// Every left pole with positive order, or an error if they do not stop.
fn all_left_poles(spec: &MeijerGSpec) -> Result<Vec<Pole>, SpecialError> {
    if spec.n == 0 {
        return Ok(Vec::new());
    }
    let top = spec.a[..spec.n].iter().map(|a| a - 1.0).fold(f64::NEG_INFINITY, f64::max);
    let poles: Vec<Pole> = true_poles(spec, top - 200.0, top + 0.5)?
        .into_iter()
        .filter(|p| p.left)
        .collect();
    if poles.iter().any(|p| p.at < top - 100.0) {
        return Err(SpecialError::InvalidSpec(format!(
            "{spec} has infinitely many left poles; no finite algebraic part"
        )));
    }
    Ok(poles)
}

fn min_location(poles: &[Pole]) -> f64 {
    poles.iter().map(|p| p.at).fold(f64::INFINITY, f64::min)
}

fn max_location(poles: &[Pole]) -> f64 {
    poles.iter().map(|p| p.at).fold(f64::NEG_INFINITY, f64::max)
}

// ---------------------------------------------------------------------------
// Integrand, residues and the line integral

fn ln_integrand(spec: &MeijerGSpec, s: Complex64, ln_x: f64) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    let mut acc = s * ln_x;
    for (j, &b) in spec.b.iter().enumerate() {
        if j < spec.m {
            acc += ln_gamma_complex(b - s);
        } else {
            acc -= ln_gamma_complex(one - b + s);
        }
    }
    for (j, &a) in spec.a.iter().enumerate() {
        if j < spec.n {
            acc += ln_gamma_complex(one - a + s);
        } else {
            acc -= ln_gamma_complex(a - s);
        }
    }
    acc
}

/// `(1/2πi)∮ F` on a circle; returns the real part (parameters are real).
fn circle_residue(spec: &MeijerGSpec, ln_x: f64, center: f64, radius: f64) -> f64 {
    let pts: Vec<Complex64> = (0..CIRCLE_NODES)
        .map(|k| {
            let theta = 2.0 * PI * (k as f64 + 0.5) / CIRCLE_NODES as f64;
            Complex64::from_polar(radius, theta)
        })
        .collect();
    let logs: Vec<Complex64> = pts.iter().map(|d| ln_integrand(spec, center + d, ln_x)).collect();
    let top = logs.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    let sum: Complex64 = logs.iter().zip(&pts).map(|(l, d)| (l - top).exp() * d).sum();
    (sum / CIRCLE_NODES as f64).re * top.exp()
}

/// Sum of residues at `poles`, grouping near-coincident ones into one
/// circle. `neighbours` limits the circle radii. Returns (sum, Σ|residue|).
fn residue_sum(spec: &MeijerGSpec, ln_x: f64, poles: &[Pole], neighbours: &[Pole]) -> Result<(f64, f64), SpecialError> {
    let mut sorted: Vec<Pole> = poles.to_vec();
    sorted.sort_by(|x, y| x.at.partial_cmp(&y.at).unwrap());
    let mut total = 0.0;
    let mut total_abs = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j].at - sorted[j - 1].at < GROUP_TOL && sorted[j].left == sorted[i].left {
            j += 1;
        }
        let lo = sorted[i].at;
        let hi = sorted[j - 1].at;
        let center = 0.5 * (lo + hi);
        let spread = 0.5 * (hi - lo);
        let gap = neighbours
            .iter()
            .filter(|p| p.at < lo - POLE_TOL * lo.abs().max(1.0) || p.at > hi + POLE_TOL * hi.abs().max(1.0))
            .map(|p| (p.at - center).abs())
            .fold(f64::INFINITY, f64::min);
        let radius = (0.5 * (gap - spread)).min(0.3).max(spread * 4.0);
        if radius >= gap - spread || radius <= 0.0 {
            return Err(SpecialError::NoConvergence {
                function: "meijer_g",
                detail: format!("{spec}: poles near s = {center} are too crowded for a residue circle"),
            });
        }
        let r = circle_residue(spec, ln_x, center, radius);
        if !r.is_finite() {
            return Err(SpecialError::NoConvergence {
                function: "meijer_g",
                detail: format!("{spec}: non-finite residue at s = {center}"),
            });
        }
        total += r;
        total_abs += r.abs();
        i = j;
    }
    Ok((total, total_abs))
}

/// `(1/π) ∫_0^∞ Re F(c + it) dt`, the Mellin–Barnes integral along `Re s = c`
/// (conjugate symmetry folds the lower half-line onto the upper one).
fn line_integral(spec: &MeijerGSpec, ln_x: f64, c: f64) -> Result<f64, SpecialError> {
    let singular = singular_points(spec, c - 3.0, c + 3.0);
    let d = singular.iter().map(|s| (s - c).abs()).fold(1.0f64, f64::min);
    if d < 1e-6 {
        return Err(SpecialError::NoConvergence {
            function: "meijer_g",
            detail: format!("{spec}: contour abscissa {c} sits on a pole"),
        });
    }
    let reference = ln_integrand(spec, Complex64::new(c, 0.0), ln_x).re;
    let value_at = |t: f64| -> Complex64 { (ln_integrand(spec, Complex64::new(c, t), ln_x) - reference).exp() };

    let mut h = (0.5 * d).min(0.25);
    let first = value_at(0.0);
    let mut sum = 0.5 * first.re;
    let mut abs_sum = 0.5 * first.re.abs();
    let mut peak = first.norm();
    let mut quiet = 0;
    let mut k = 0u64;
    loop {
        k += 1;
        let t = k as f64 * h;
        let v = value_at(t);
        if !v.re.is_finite() {
            return Err(SpecialError::NoConvergence {
                function: "meijer_g",
                detail: format!("{spec}: non-finite integrand at {c} + {t}i"),
            });
        }
        sum += v.re;
        abs_sum += v.re.abs();
        peak = peak.max(v.norm());
        if t > 1.0 && v.norm() < 1e-18 * peak {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        if t > 2000.0 {
            return Err(SpecialError::NoConvergence {
                function: "meijer_g",
                detail: format!("{spec}: integrand does not decay along Re s = {c}"),
            });
        }
    }
    let t_max = k as f64 * h;
    let mut estimate = h * sum;
    let abs_estimate = h * abs_sum;
    let mut evaluations = k;
    for _ in 0..LINE_MAX_LEVELS {
        h *= 0.5;
        evaluations += (t_max / (2.0 * h)) as u64;
        if evaluations > LINE_MAX_EVALUATIONS {
            break;
        }
        let mut fresh = 0.0;
        let mut t = h;
        while t < t_max {
            fresh += value_at(t).re;
            t += 2.0 * h;
        }
        let refined = 0.5 * estimate + h * fresh;
        let change = (refined - estimate).abs();
        estimate = refined;
        if change <= 1e-9 * estimate.abs() || change <= 1e-17 * abs_estimate {
            return Ok(estimate / PI * reference.exp());
        }
    }
    Err(SpecialError::NoConvergence {
        function: "meijer_g",
        detail: format!("{spec}: trapezoid along Re s = {c} did not settle"),
    })
}

fn scan_minimum(phi: &impl Fn(f64) -> f64, lo: f64, hi: f64, steps: usize) -> f64 {
    let step = (hi - lo) / steps as f64;
    let mut best = lo;
    let mut best_val = f64::INFINITY;
    for i in 0..=steps {
        let c = lo + i as f64 * step;
        let v = phi(c);
        if v < best_val {
            best_val = v;
            best = c;
        }
    }
    best
}

/// Abscissa near the real-axis minimum of `|F|` (the saddle that the
/// steepest-descent path crosses), nudged away from singular points.
fn choose_abscissa(spec: &MeijerGSpec, x: f64) -> f64 {
    let ln_x = x.ln();
    let max_left = spec.a[..spec.n].iter().map(|a| a - 1.0).fold(f64::NEG_INFINITY, f64::max);
    let min_right = spec.b[..spec.m].iter().copied().fold(f64::INFINITY, f64::min);
    let center = if max_left < min_right && max_left.is_finite() {
        0.5 * (max_left + min_right)
    } else {
        min_right - 0.5
    };
    let span_left = (2.5 * x.sqrt() + 6.0).min(5000.0);
    let span_right = (2.5 / x.sqrt() + 6.0).min(200.0);
    let phi = |c: f64| ln_integrand(spec, Complex64::new(c, 0.5), ln_x).re;
    let coarse = scan_minimum(&phi, center - span_left, center + span_right, 600);
    let width = (span_left + span_right) / 600.0;
    let best = scan_minimum(&phi, coarse - 2.0 * width, coarse + 2.0 * width, 200);
    let singular = singular_points(spec, best - 2.0, best + 2.0);
    let mut chosen = best;
    let mut score = f64::NEG_INFINITY;
    for i in -50..=50 {
        let c = best + i as f64 * 0.01;
        let d = singular.iter().map(|s| (s - c).abs()).fold(1.0f64, f64::min);
        let sc = d.min(0.25) - 0.05 * (c - best).abs();
        if sc > score {
            score = sc;
            chosen = c;
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::super::bessel::bessel_k;
    use super::super::gamma::{digamma, ln_gamma};
    use super::*;

    fn spec(m: usize, n: usize, a: &[f64], b: &[f64]) -> MeijerGSpec {
        MeijerGSpec::new(m, n, a.to_vec(), b.to_vec()).unwrap()
    }

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol * y.abs().max(1e-300)
    }

    #[test]
    fn bessel_reduction_generic_and_integer_orders() {
        for nu in [0.0, 0.5, 1.0, 1.7291, 3.0, 4.2] {
            for x in [0.01, 0.3, 2.0, 9.0, 50.0] {
                let g = meijer_g(&spec(2, 0, &[], &[nu / 2.0, -nu / 2.0]), x).unwrap();
                let k = 2.0 * bessel_k(nu, 2.0 * x.sqrt()).unwrap();
                assert!(close(g, k, 1e-9), "nu = {nu}, x = {x}: {g} vs {k}");
            }
        }
    }

    #[test]
    fn shape_and_argument_validation() {
        let bad = spec(1, 0, &[], &[0.5, 0.2]);
        assert!(matches!(meijer_g(&bad, 1.0), Err(SpecialError::UnsupportedShape(_))));
        assert!(MeijerGSpec::new(3, 0, vec![], vec![1.0, 2.0]).is_err());
        assert!(meijer_g(&spec(2, 0, &[], &[0.1, 0.3]), -1.0).is_err());
    }

    #[test]
    fn tail_family_limit_and_remainder() {
        let (a, b, xi2) = (4.8184, 1.1896, 1.0545);
        let g = spec(3, 1, &[1.0, xi2 + 1.0], &[xi2, a, b, 0.0]);
        let limit = (ln_gamma(a).unwrap() + ln_gamma(b).unwrap()).exp() / xi2;
        let v = meijer_g(&g, 1e4).unwrap();
        assert!(close(v, limit, 1e-10), "{v} vs {limit}");
        for x in [0.5, 5.0, 40.0, 300.0] {
            let full = meijer_g(&g, x).unwrap();
            let rem = meijer_g_remainder(&g, x).unwrap();
            assert!((full - rem - limit).abs() < 1e-9 * limit, "x = {x}");
        }
    }

    #[test]
    fn capacity_family_remainder_matches_analytic_residue() {
        let (a, b, xi2) = (3.9929, 1.7018, 0.3971);
        let g = spec(3, 2, &[1.0, 1.0, xi2 + 1.0], &[xi2, a, b, 0.0, 0.0]);
        let gg = (ln_gamma(a).unwrap() + ln_gamma(b).unwrap()).exp();
        for x in [0.2f64, 3.0, 20.0] {
            let res = gg / xi2 * (x.ln() + 1.0 / xi2 - digamma(a).unwrap() - digamma(b).unwrap());
            let full = meijer_g(&g, x).unwrap();
            let rem = meijer_g_remainder(&g, x).unwrap();
            assert!((full - rem - res).abs() < 1e-9 * res.abs().max(1.0), "x = {x}: {full} {rem} {res}");
        }
    }

    #[test]
    fn series_and_contour_agree_in_the_overlap() {
        let cases = [
            spec(3, 0, &[1.0545], &[0.0545, 3.8184, 0.1896]),
            spec(3, 1, &[1.0, 1.2294], &[0.2294, 4.7424, 3.0133, 0.0]),
            spec(2, 2, &[1.0, 1.0], &[3.9929, 1.7018, 0.0, 0.0]),
            spec(3, 2, &[1.0, 1.0, 2.0545], &[1.0545, 4.8184, 1.1896, 0.0, 0.0]),
            spec(2, 1, &[1.0], &[3.7424, 2.0133, 0.0]),
        ];
        for g in &cases {
            for x in [0.5, 2.0, 5.0] {
                let series = slater(g, x).unwrap();
                assert!(series.condition <= SLATER_CONDITION_LIMIT, "{g} at {x}");
                let series = series.value;
                let contour = contour_auto(g, x).unwrap();
                assert!(close(contour, series, 1e-10), "{g} at {x}: {series} vs {contour}");
            }
        }
    }

    #[test]
    fn equal_shape_parameters_use_perturbation() {
        // a = b: coincident right poles
        let g = spec(3, 2, &[1.0, 1.0, 1.64], &[0.64, 2.5, 2.5, 0.0, 0.0]);
        let x = 1.3;
        let via_series = meijer_g(&g, x).unwrap();
        let via_contour = contour_auto(&g, x).unwrap();
        assert!(close(via_series, via_contour, 1e-7), "{via_series} vs {via_contour}");
    }

    #[test]
    fn capacity_family_vanishes_at_origin() {
        let g = spec(3, 2, &[1.0, 1.0, 2.0545], &[1.0545, 4.8184, 1.1896, 0.0, 0.0]);
        assert!(meijer_g(&g, 1e-10).unwrap().abs() < 1e-8);
    }

    #[test]
    fn high_precision_reference_values() {
        // (m, n, a, b, x, value) computed at 40 digits
        let cases: [(usize, usize, &[f64], &[f64], f64, f64); 27] = [
            (3, 0, &[1.0545], &[0.0545, 3.8184, 0.1896], 1e-6, 12.634086829567976),
            (3, 0, &[1.0545], &[0.0545, 3.8184, 0.1896], 0.02, 11.698046679666481),
            (3, 0, &[1.0545], &[0.0545, 3.8184, 0.1896], 7.0, 0.40412205149386809),
            (3, 0, &[1.0545], &[0.0545, 3.8184, 0.1896], 120.0, 3.222777525359911e-7),
            (3, 0, &[1.0545], &[0.0545, 3.8184, 0.1896], 2500.0, 1.3128441114874196e-39),
            (3, 1, &[1.0, 1.2294], &[0.2294, 4.7424, 3.0133, 0.0], 1e-3, 17.508518372860323),
            (3, 1, &[1.0, 1.2294], &[0.2294, 4.7424, 3.0133, 0.0], 0.6, 75.938035831970529),
            (3, 1, &[1.0, 1.2294], &[0.2294, 4.7424, 3.0133, 0.0], 30.0, 144.0181526284433),
            (3, 1, &[1.0, 1.2294], &[0.2294, 4.7424, 3.0133, 0.0], 900.0, 144.793326684149),
            (2, 2, &[1.0, 1.0], &[3.9929, 1.7018, 0.0, 0.0], 1e-4, 6.2463067196297177e-8),
            (2, 2, &[1.0, 1.0], &[3.9929, 1.7018, 0.0, 0.0], 1.1, 0.36082815489708268),
            (2, 2, &[1.0, 1.0], &[3.9929, 1.7018, 0.0, 0.0], 60.0, 14.218349743667883),
            (2, 2, &[1.0, 1.0], &[3.9929, 1.7018, 0.0, 0.0], 5000.0, 38.125637260488597),
            (3, 2, &[1.0, 1.0, 2.0545], &[1.0545, 4.8184, 1.1896, 0.0, 0.0], 1e-5, 0.00012727974626728723),
            (3, 2, &[1.0, 1.0, 2.0545], &[1.0545, 4.8184, 1.1896, 0.0, 0.0], 0.9, 7.6021781786827461),
            (3, 2, &[1.0, 1.0, 2.0545], &[1.0545, 4.8184, 1.1896, 0.0, 0.0], 45.0, 57.492245529809112),
            (3, 2, &[1.0, 1.0, 2.0545], &[1.0545, 4.8184, 1.1896, 0.0, 0.0], 3000.0, 124.70601012145791),
            (2, 1, &[1.0], &[3.7424, 2.0133, 0.0], 1e-3, 4.1396997547239476e-7),
            (2, 1, &[1.0], &[3.7424, 2.0133, 0.0], 2.0, 0.72837402760390143),
            (2, 1, &[1.0], &[3.7424, 2.0133, 0.0], 80.0, 4.4079562039632145),
            (2, 1, &[1.0], &[3.7424, 2.0133, 0.0], 4000.0, 4.4084230235203239),
            (3, 2, &[1.0, 1.0, 1.64], &[0.64, 2.5, 2.5, 0.0, 0.0], 0.01, 0.11531091206528758),
            (3, 2, &[1.0, 1.0, 1.64], &[0.64, 2.5, 2.5, 0.0, 0.0], 1.3, 2.4783860834297974),
            (3, 2, &[1.0, 1.0, 1.64], &[0.64, 2.5, 2.5, 0.0, 0.0], 25.0, 9.3206660673578817),
            (3, 2, &[1.0, 1.0, 1.64], &[0.64, 2.5, 2.5, 0.0, 0.0], 700.0, 18.519873839415549),
            (3, 0, &[2.0], &[1.0, 3.0, 2.0], 0.05, 0.047713736165903951),
            (3, 0, &[2.0], &[1.0, 3.0, 2.0], 1.7, 0.60399796439298096),
        ];
        for (m, n, a, b, x, want) in cases {
            let g = spec(m, n, a, b);
            let got = meijer_g(&g, x).unwrap();
            assert!(close(got, want, 1e-9), "{g} at {x}: {got} vs {want}");
        }
        let g = spec(3, 0, &[2.0], &[1.0, 3.0, 2.0]);
        assert!(close(meijer_g(&g, 40.0).unwrap(), 0.004174959697872499, 1e-9));
    }
}
