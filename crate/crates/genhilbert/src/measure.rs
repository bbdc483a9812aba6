//! Positive Borel measures on [0,1): power-log densities, atoms and
//! mixtures, with moments, interval tails, Carleson-type ratio reports
//! and the weight transforms relating them.
//!
//! Densities are integrated after the substitution `t = 1 - exp(-u)`,
//! which turns the endpoint factor `(1-t)^{beta-1}` into the smooth
//! `exp(-beta u)` and the logarithm `log(e/(1-t))` into `1 + u`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::quad::{self, QuadValue};

/// Default relative tolerance for adaptive quadrature.
pub const DEFAULT_QUAD_REL_TOL: f64 = 1e-10;

/// Dyadic grid depth reported in a [`CarlesonReport`].
pub const DEFAULT_GRID_DEPTH: u32 = 40;

/// Depth of the extended dyadic grid backing the bounded/vanishing
/// verdicts. Tail ratios that decay only logarithmically need far deeper
/// radii than f64 can represent, so the decision grid works in the
/// exponent variable `u = j ln 2` directly.
pub const DECISION_GRID_DEPTH: u32 = 120;

const TRAILING_WINDOW: usize = 8;
const LEADING_WINDOW: usize = 8;
const BOUNDED_SLACK: f64 = 0.10;
const VANISHING_FRACTION: f64 = 0.05;
const SLOPE_BOUNDED_MAX: f64 = 0.02;
const SLOPE_VANISHING_MAX: f64 = -0.005;

const LN2: f64 = std::f64::consts::LN_2;

/// A value together with an absolute error bound.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
}

/// Density `scale * (1-t)^{beta-1} * log^gamma(e/(1-t)) dt` supported on
/// `[0, upper]` with `upper <= 1`. An `upper < 1` arises from [`Measure::truncate`].
#[derive(Clone, Debug, PartialEq)]
pub struct PowerLogDensity {
    pub scale: f64,
    pub beta: f64,
    pub gamma: f64,
    pub upper: f64,
}

/// A point mass strictly inside [0,1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Atom {
    pub t: f64,
    pub weight: f64,
}

/// Positive Borel measure on [0,1). Mixtures are flattened on
/// construction, so components are never themselves mixtures.
#[derive(Clone, Debug, PartialEq)]
pub enum Measure {
    PowerLog(PowerLogDensity),
    Atoms(Vec<Atom>),
    Mixture(Vec<Measure>),
}

impl PowerLogDensity {
    /// `u` coordinate of the support cutoff (`inf` when `upper == 1`).
    fn u_upper(&self) -> f64 {
        if self.upper >= 1.0 {
            f64::INFINITY
        } else {
            -(-self.upper).ln_1p()
        }
    }

    /// Truncation point beyond which the discarded tail is negligible
    /// relative to the integrand scale near `u_lower`.
    fn u_cut(&self, u_lower: f64, u_extra: f64) -> f64 {
        let beta = self.beta.max(1e-3);
        u_lower + u_extra + (55.0 + 5.0 * self.gamma.max(0.0)) / beta
    }
}

impl Measure {
    /// Lebesgue measure on [0,1).
    pub fn lebesgue() -> Measure {
        Measure::PowerLog(PowerLogDensity { scale: 1.0, beta: 1.0, gamma: 0.0, upper: 1.0 })
    }

    /// The zero measure.
    pub fn zero() -> Measure {
        Measure::PowerLog(PowerLogDensity { scale: 0.0, beta: 1.0, gamma: 0.0, upper: 1.0 })
    }

    /// `scale * (1-t)^{beta-1} log^gamma(e/(1-t)) dt`; requires `scale >= 0`
    /// and `beta > 0` so the total mass is finite.
    pub fn power_log(scale: f64, beta: f64, gamma: f64) -> Result<Measure> {
        if !(scale >= 0.0 && scale.is_finite()) {
            return Err(Error::InvalidMeasure(format!("scale must be finite and >= 0, got {scale}")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidMeasure(format!("beta must be > 0 for an integrable density, got {beta}")));
        }
        if !gamma.is_finite() {
            return Err(Error::InvalidMeasure(format!("gamma must be finite, got {gamma}")));
        }
        Ok(Measure::PowerLog(PowerLogDensity { scale, beta, gamma, upper: 1.0 }))
    }

    /// Point masses `(t_j, c_j)` with `0 <= t_j < 1` and `c_j > 0`.
    pub fn atoms(atoms: Vec<(f64, f64)>) -> Result<Measure> {
        let mut list = Vec::with_capacity(atoms.len());
        for (t, w) in atoms {
            if !(0.0..1.0).contains(&t) {
                return Err(Error::InvalidMeasure(format!("atom location {t} outside [0,1)")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidMeasure(format!("atom weight {w} must be finite and > 0")));
            }
            list.push(Atom { t, weight: w });
        }
        Ok(Measure::Atoms(list))
    }

    /// Sum of the component measures, flattened.
    pub fn mixture(components: Vec<Measure>) -> Measure {
        let mut flat = Vec::new();
        for c in components {
            match c {
                Measure::Mixture(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        Measure::Mixture(flat)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Measure::PowerLog(d) => d.scale == 0.0,
            Measure::Atoms(a) => a.is_empty(),
            Measure::Mixture(c) => c.iter().all(|m| m.is_zero()),
        }
    }

    /// `integral f(t) dmu(t)` over `[lower, upper-support]`, with an
    /// error estimate. `u_extra` widens the quadrature window for
    /// integrands peaking deep in the tail (pass `ln(n+1)` for `t^n`).
    pub(crate) fn integrate<T, F>(&self, f: &F, lower: f64, u_extra: f64, rel_tol: f64) -> Result<(T, f64)>
    where
        T: QuadValue,
        F: Fn(f64) -> T,
    {
        match self {
            Measure::PowerLog(d) => {
                if d.scale == 0.0 || lower >= d.upper {
                    return Ok((T::zero(), 0.0));
                }
                let u_lo = if lower <= 0.0 { 0.0 } else { -(-lower).ln_1p() };
                let u_hi = d.u_upper().min(d.u_cut(u_lo, u_extra));
                if u_hi <= u_lo {
                    return Ok((T::zero(), 0.0));
                }
                let g = |u: f64| {
                    let t = -(-u).exp_m1(); // 1 - e^{-u}, accurate near 0
                    f(t).scale(d.scale * (-d.beta * u).exp() * (1.0 + u).powf(d.gamma))
                };
                quad::integrate(g, u_lo, u_hi, rel_tol, 0.0, 4000)
            }
            Measure::Atoms(atoms) => {
                let mut acc = T::zero();
                for a in atoms {
                    if a.t >= lower {
                        acc = acc.add(f(a.t).scale(a.weight));
                    }
                }
                Ok((acc, 0.0))
            }
            Measure::Mixture(comps) => {
                let mut acc = T::zero();
                let mut err = 0.0;
                for c in comps {
                    let (v, e) = c.integrate(f, lower, u_extra, rel_tol)?;
                    acc = acc.add(v);
                    err += e;
                }
                Ok((acc, err))
            }
        }
    }

    /// Moment `mu_n = integral t^n dmu(t)`.
    pub fn moment(&self, n: i64) -> Result<Estimate> {
        self.moment_with_tol(n, DEFAULT_QUAD_REL_TOL)
    }

    pub fn moment_with_tol(&self, n: i64, rel_tol: f64) -> Result<Estimate> {
        if n < 0 {
            return Err(Error::Domain(format!("moment order must be >= 0, got {n}")));
        }
        let n = n as usize;
        match self {
            Measure::PowerLog(d) if d.gamma == 0.0 && d.upper >= 1.0 => Ok(closed_beta_moment(d, n)),
            Measure::PowerLog(_) => {
                let u_extra = ((n + 1) as f64).ln();
                let (v, e) = self.integrate(&|t: f64| pow_u(t, n), 0.0, u_extra, rel_tol)?;
                Ok(Estimate { value: v, abs_err: e })
            }
            Measure::Atoms(atoms) => {
                let v: f64 = atoms.iter().map(|a| a.weight * pow_u(a.t, n)).sum();
                Ok(Estimate { value: v, abs_err: v * f64::EPSILON * (atoms.len() as f64 + 2.0) })
            }
            Measure::Mixture(comps) => {
                let mut value = 0.0;
                let mut abs_err = 0.0;
                for c in comps {
                    let est = c.moment_with_tol(n as i64, rel_tol)?;
                    value += est.value;
                    abs_err += est.abs_err;
                }
                Ok(Estimate { value, abs_err })
            }
        }
    }

    /// Moments `mu_0..mu_{n_max}` as a batch.
    pub fn moment_table(&self, n_max: usize) -> Result<MomentTable> {
        self.moment_table_with_tol(n_max, DEFAULT_QUAD_REL_TOL)
    }

    pub fn moment_table_with_tol(&self, n_max: usize, rel_tol: f64) -> Result<MomentTable> {
        let count = n_max + 1;
        match self {
            Measure::PowerLog(d) if d.gamma == 0.0 && d.upper >= 1.0 => {
                let mut values = Vec::with_capacity(count);
                let mut errs = Vec::with_capacity(count);
                for n in 0..count {
                    let est = closed_beta_moment(d, n);
                    values.push(est.value);
                    errs.push(est.abs_err);
                }
                Ok(MomentTable { values, errs })
            }
            Measure::PowerLog(_) => {
                let results = par::par_map_range(count, |n| self.moment_with_tol(n as i64, rel_tol));
                let mut values = Vec::with_capacity(count);
                let mut errs = Vec::with_capacity(count);
                for r in results {
                    let est = r?;
                    values.push(est.value);
                    errs.push(est.abs_err);
                }
                Ok(MomentTable { values, errs })
            }
            Measure::Atoms(atoms) => {
                let mut values = vec![0.0; count];
                for a in atoms {
                    let mut p = 1.0;
                    for v in values.iter_mut() {
                        *v += a.weight * p;
                        p *= a.t;
                    }
                }
                let errs = values.iter().map(|v| v * f64::EPSILON * (count as f64)).collect();
                Ok(MomentTable { values, errs })
            }
            Measure::Mixture(comps) => {
                let mut values = vec![0.0; count];
                let mut errs = vec![0.0; count];
                for c in comps {
                    let t = c.moment_table_with_tol(n_max, rel_tol)?;
                    for n in 0..count {
                        values[n] += t.values[n];
                        errs[n] += t.errs[n];
                    }
                }
                Ok(MomentTable { values, errs })
            }
        }
    }

    /// `mu([r, 1))` for `0 <= r < 1`.
    pub fn tail_mass(&self, r: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::Domain(format!("tail radius must lie in [0,1), got {r}")));
        }
        match self {
            Measure::PowerLog(d) if d.gamma == 0.0 => {
                if d.scale == 0.0 || r >= d.upper {
                    return Ok(0.0);
                }
                // c * ((1-r)^beta - (1-upper)^beta) / beta
                let hi = if d.upper >= 1.0 { 0.0 } else { (1.0 - d.upper).powf(d.beta) };
                Ok(d.scale * ((1.0 - r).powf(d.beta) - hi) / d.beta)
            }
            Measure::PowerLog(_) => {
                let (v, _) = self.integrate(&|_t: f64| 1.0, r, 0.0, DEFAULT_QUAD_REL_TOL)?;
                Ok(v)
            }
            Measure::Atoms(atoms) => Ok(atoms.iter().filter(|a| a.t >= r).map(|a| a.weight).sum()),
            Measure::Mixture(comps) => {
                let mut v = 0.0;
                for c in comps {
                    v += c.tail_mass(r)?;
                }
                Ok(v)
            }
        }
    }

    /// Carleson-type ratio `mu([r_j,1)) log^q(e/(1-r_j)) / (1-r_j)^s` at
    /// the dyadic radius `1 - 2^{-j}`, computed in the exponent variable
    /// so it stays accurate at depths where the radius itself is not
    /// representable.
    pub fn dyadic_tail_ratio(&self, j: u32, s: f64, q: f64) -> Result<f64> {
        let u0 = j as f64 * LN2;
        match self {
            Measure::PowerLog(d) => {
                if d.scale == 0.0 {
                    return Ok(0.0);
                }
                let u_up = d.u_upper();
                if u_up <= u0 {
                    return Ok(0.0);
                }
                // ratio = c e^{(s-beta) u0} (1+u0)^q * int_0^W e^{-beta w} (1+u0+w)^gamma dw
                let w_max = (u_up - u0).min(d.u_cut(0.0, 0.0));
                let core = if d.gamma == 0.0 {
                    (-(-d.beta * w_max).exp_m1()) / d.beta
                } else {
                    let g = |w: f64| (-d.beta * w).exp() * (1.0 + u0 + w).powf(d.gamma);
                    let (v, _) = quad::integrate_real(g, 0.0, w_max, DEFAULT_QUAD_REL_TOL, 0.0)?;
                    v
                };
                Ok(d.scale * ((s - d.beta) * u0).exp() * (1.0 + u0).powf(q) * core)
            }
            Measure::Atoms(atoms) => {
                // Include atoms with 1 - t <= 2^{-j}.
                let thresh = (-u0).exp();
                let mass: f64 = atoms.iter().filter(|a| 1.0 - a.t <= thresh).map(|a| a.weight).sum();
                Ok(mass * (s * u0).exp() * (1.0 + u0).powf(q))
            }
            Measure::Mixture(comps) => {
                let mut v = 0.0;
                for c in comps {
                    v += c.dyadic_tail_ratio(j, s, q)?;
                }
                Ok(v)
            }
        }
    }

    /// Grid of Carleson ratios with boundedness and vanishing verdicts.
    pub fn carleson_report(&self, s: f64, log_exponent: f64, grid: &CarlesonGridSpec) -> Result<CarlesonReport> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("Carleson exponent s must be > 0, got {s}")));
        }
        if !(log_exponent >= 0.0) {
            return Err(Error::Domain(format!("log exponent q must be >= 0, got {log_exponent}")));
        }
        let depth = grid.depth.max(1);
        let decision_depth = grid.decision_depth.max(depth);

        let ext = par::par_map(
            (1..=decision_depth).collect(),
            |j| self.dyadic_tail_ratio(j, s, log_exponent),
        );
        let mut ext_ratios = Vec::with_capacity(decision_depth as usize);
        for r in ext {
            ext_ratios.push(r?);
        }

        let radii: Vec<f64> = (1..=depth).map(|j| 1.0 - (2.0f64).powi(-(j as i32))).collect();
        let ratios: Vec<f64> = ext_ratios[..depth as usize].to_vec();
        let sup_estimate = max_slice(&ratios);
        let trailing_start = ratios.len().saturating_sub(TRAILING_WINDOW);
        // `+ 0.0` normalizes a possible -0.0 from all-zero tails
        let tail_limsup_estimate = max_slice(&ratios[trailing_start..]) + 0.0;

        let decision = decide(&ext_ratios);
        Ok(CarlesonReport {
            s,
            log_exponent,
            grid: radii,
            ratios,
            sup_estimate,
            tail_limsup_estimate,
            verdict_bounded: decision.bounded,
            verdict_vanishing: decision.vanishing,
            decision,
        })
    }

    /// Weighted measure `dv = (1-t)^p log^q(e/(1-t)) dmu`.
    pub fn transform_weight(&self, p: f64, q: f64) -> Result<Measure> {
        match self {
            Measure::PowerLog(d) => {
                let beta = d.beta + p;
                if beta <= 0.0 && d.upper >= 1.0 {
                    return Err(Error::NonIntegrable(format!(
                        "power weight p = {p} drives beta to {beta} <= 0 on full support"
                    )));
                }
                Ok(Measure::PowerLog(PowerLogDensity {
                    scale: d.scale,
                    beta,
                    gamma: d.gamma + q,
                    upper: d.upper,
                }))
            }
            Measure::Atoms(atoms) => Ok(Measure::Atoms(
                atoms
                    .iter()
                    .map(|a| Atom {
                        t: a.t,
                        weight: a.weight * (1.0 - a.t).powf(p) * log_e_factor(a.t).powf(q),
                    })
                    .collect(),
            )),
            Measure::Mixture(comps) => {
                let mut out = Vec::with_capacity(comps.len());
                for c in comps {
                    out.push(c.transform_weight(p, q)?);
                }
                Ok(Measure::mixture(out))
            }
        }
    }

    /// Restriction `mu_r` of the measure to `[0, r]`.
    pub fn truncate(&self, r: f64) -> Result<Measure> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("truncation radius must lie in (0,1), got {r}")));
        }
        match self {
            Measure::PowerLog(d) => Ok(Measure::PowerLog(PowerLogDensity { upper: d.upper.min(r), ..d.clone() })),
            Measure::Atoms(atoms) => Ok(Measure::Atoms(atoms.iter().filter(|a| a.t <= r).copied().collect())),
            Measure::Mixture(comps) => {
                let mut out = Vec::with_capacity(comps.len());
                for c in comps {
                    out.push(c.truncate(r)?);
                }
                Ok(Measure::mixture(out))
            }
        }
    }

    /// Checks `sup_n mu_n n^alpha` over a dyadic-ish sample up to `n_max`
    /// and flags whether the running sup has stabilized.
    pub fn moment_decay_check(&self, alpha: f64, n_max: usize) -> Result<DecayReport> {
        let n_max = n_max.max(16);
        let mut lead = Vec::new();
        let mut k = 1usize;
        while k <= n_max / 2 {
            lead.push(k);
            k = (k * 3 / 2).max(k + 1);
        }
        let trail: Vec<usize> = (1..=8).map(|i| n_max / 2 + i * (n_max / 2) / 8).collect();

        let weighted = |n: usize| -> Result<f64> {
            Ok(self.moment(n as i64)?.value * (n as f64).powf(alpha))
        };
        let mut s_lead = 0.0f64;
        for &n in &lead {
            s_lead = s_lead.max(weighted(n)?);
        }
        let mut s_trail = 0.0f64;
        for &n in &trail {
            s_trail = s_trail.max(weighted(n)?);
        }
        let sup = s_lead.max(s_trail);
        let pass = s_trail <= 1.1 * s_lead + 1e-300;
        Ok(DecayReport { sup, leading_sup: s_lead, trailing_sup: s_trail, pass })
    }

    /// Total mass `mu([0,1))`.
    pub fn total_mass(&self) -> Result<f64> {
        Ok(self.moment(0)?.value)
    }
}

/// `t^n` by binary exponentiation (exact powers for atoms, no powf drift).
fn pow_u(t: f64, mut n: usize) -> f64 {
    let mut base = t;
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}

fn log_e_factor(t: f64) -> f64 {
    // log(e/(1-t)) = 1 - ln(1-t)
    1.0 - (1.0 - t).ln()
}

/// `scale * B(n+1, beta)` through the recurrence `B(n+1,b) = B(n,b) n/(n+b)`,
/// which avoids the precision loss of large log-gamma differences.
fn closed_beta_moment(d: &PowerLogDensity, n: usize) -> Estimate {
    if d.scale == 0.0 {
        return Estimate { value: 0.0, abs_err: 0.0 };
    }
    let value = if d.beta == 1.0 {
        d.scale / (n as f64 + 1.0)
    } else {
        let mut b = 1.0 / d.beta;
        for j in 1..=n {
            let jf = j as f64;
            b *= jf / (jf + d.beta);
        }
        d.scale * b
    };
    Estimate { value, abs_err: value * f64::EPSILON * (n as f64 + 2.0) }
}

fn max_slice(xs: &[f64]) -> f64 {
    xs.iter().fold(0.0f64, |a, &b| a.max(b))
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Least-squares slope of `ln(ratio)` against `u = j ln 2`.
fn log_slope(js: &[u32], ratios: &[f64]) -> Option<f64> {
    if ratios.iter().any(|&r| r <= 0.0) || ratios.len() < 2 {
        return None;
    }
    let n = ratios.len() as f64;
    let xs: Vec<f64> = js.iter().map(|&j| j as f64 * LN2).collect();
    let ys: Vec<f64> = ratios.iter().map(|&r| r.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Diagnostics behind the bounded/vanishing verdicts.
#[derive(Clone, Debug, Serialize)]
pub struct DecisionDiagnostics {
    pub depth: u32,
    pub global_max: f64,
    pub leading_median: f64,
    pub mid_window_max: f64,
    pub trailing_max: f64,
    pub trailing_slope: Option<f64>,
    pub bounded: bool,
    pub vanishing: bool,
}

fn decide(ext_ratios: &[f64]) -> DecisionDiagnostics {
    let depth = ext_ratios.len() as u32;
    let global_max = max_slice(ext_ratios);
    let lead_n = LEADING_WINDOW.min(ext_ratios.len());
    let leading_median = median(&ext_ratios[..lead_n]);
    let mid_end = ext_ratios.len() / 2;
    let mid_window_max = max_slice(&ext_ratios[mid_end.saturating_sub(TRAILING_WINDOW)..mid_end.max(1)]);
    let trail_start = ext_ratios.len().saturating_sub(TRAILING_WINDOW);
    let trailing = &ext_ratios[trail_start..];
    let trailing_max = max_slice(trailing);
    let trail_js: Vec<u32> = (trail_start as u32 + 1..=depth).collect();
    let trailing_slope = log_slope(&trail_js, trailing);

    // Bounded: the trailing window must not have grown past the middle
    // of the grid (ratios converging to a finite limit, possibly from
    // below, pass; slow log-type divergence doubles between the middle
    // and the end of the exponent grid and fails), and the trailing
    // trend in the exponent variable must be flat or decreasing.
    let all_trailing_zero = trailing.iter().all(|&r| r == 0.0);
    let bounded = if all_trailing_zero {
        true
    } else {
        trailing_max <= (1.0 + BOUNDED_SLACK) * mid_window_max + 1e-300
            && trailing_slope.is_none_or(|sl| sl <= SLOPE_BOUNDED_MAX)
    };
    let vanishing_raw = if global_max == 0.0 || all_trailing_zero {
        true
    } else {
        trailing_max < VANISHING_FRACTION * global_max
            && trailing_slope.is_some_and(|sl| sl < SLOPE_VANISHING_MAX)
    };
    DecisionDiagnostics {
        depth,
        global_max,
        leading_median,
        mid_window_max,
        trailing_max,
        trailing_slope,
        bounded,
        vanishing: vanishing_raw && bounded,
    }
}

/// Grid request for [`Measure::carleson_report`].
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CarlesonGridSpec {
    pub depth: u32,
    pub decision_depth: u32,
}

impl Default for CarlesonGridSpec {
    fn default() -> Self {
        CarlesonGridSpec { depth: DEFAULT_GRID_DEPTH, decision_depth: DECISION_GRID_DEPTH }
    }
}

/// Tail-ratio grid `mu([r_j,1)) log^q(e/(1-r_j)) / (1-r_j)^s` with verdicts.
#[derive(Clone, Debug, Serialize)]
pub struct CarlesonReport {
    pub s: f64,
    pub log_exponent: f64,
    pub grid: Vec<f64>,
    pub ratios: Vec<f64>,
    pub sup_estimate: f64,
    pub tail_limsup_estimate: f64,
    pub verdict_bounded: bool,
    pub verdict_vanishing: bool,
    pub decision: DecisionDiagnostics,
}

/// Batch of moments with per-entry absolute error bounds.
#[derive(Clone, Debug, Serialize)]
pub struct MomentTable {
    values: Vec<f64>,
    errs: Vec<f64>,
}

impl MomentTable {
    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }
    pub fn value(&self, n: usize) -> f64 {
        self.values[n]
    }
    pub fn err(&self, n: usize) -> f64 {
        self.errs[n]
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn errs(&self) -> &[f64] {
        &self.errs
    }
}

/// Result of [`Measure::moment_decay_check`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayReport {
    pub sup: f64,
    pub leading_sup: f64,
    pub trailing_sup: f64,
    pub pass: bool,
}

// ---------------------------------------------------------------------------
// Measure spec files and inline specs
// ---------------------------------------------------------------------------

/// On-disk measure description. Unknown fields are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atoms: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub components: Option<Vec<MeasureSpec>>,
}

impl MeasureSpec {
    pub fn build(&self) -> Result<Measure> {
        let no_density = || -> Result<()> {
            if self.scale.is_some() || self.beta.is_some() || self.gamma.is_some() {
                return Err(Error::Config(format!("kind '{}' takes no density fields", self.kind)));
            }
            Ok(())
        };
        match self.kind.as_str() {
            "lebesgue" => {
                no_density()?;
                Ok(Measure::lebesgue())
            }
            "zero" => {
                no_density()?;
                Ok(Measure::zero())
            }
            "power_log" => {
                if self.atoms.is_some() || self.components.is_some() {
                    return Err(Error::Config("power_log takes no atoms/components".into()));
                }
                Measure::power_log(
                    self.scale.unwrap_or(1.0),
                    self.beta.ok_or_else(|| Error::Config("power_log requires beta".into()))?,
                    self.gamma.unwrap_or(0.0),
                )
            }
            "atoms" => {
                no_density()?;
                let list = self
                    .atoms
                    .as_ref()
                    .ok_or_else(|| Error::Config("atoms requires an atoms list".into()))?;
                Measure::atoms(list.iter().map(|a| (a[0], a[1])).collect())
            }
            "mixture" => {
                no_density()?;
                let comps = self
                    .components
                    .as_ref()
                    .ok_or_else(|| Error::Config("mixture requires components".into()))?;
                let mut out = Vec::with_capacity(comps.len());
                for c in comps {
                    out.push(c.build()?);
                }
                Ok(Measure::mixture(out))
            }
            other => Err(Error::Config(format!("unknown measure kind '{other}'"))),
        }
    }
}

impl Measure {
    /// Parse a JSON measure spec (see [`MeasureSpec`]).
    pub fn from_spec_json(s: &str) -> Result<Measure> {
        let spec: MeasureSpec =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("measure spec: {e}")))?;
        spec.build()
    }

    /// Parse a compact inline spec:
    /// `lebesgue`, `zero`, `power_log beta=2 gamma=-2 c=1`,
    /// `atoms 0.5:1,0.8:2`, or components joined with ` + `.
    pub fn parse_inline(s: &str) -> Result<Measure> {
        let parts: Vec<&str> = s.split(" + ").map(str::trim).collect();
        if parts.len() > 1 {
            let mut comps = Vec::with_capacity(parts.len());
            for p in parts {
                comps.push(Measure::parse_inline(p)?);
            }
            return Ok(Measure::mixture(comps));
        }
        let s = s.trim();
        if s.starts_with('{') {
            return Measure::from_spec_json(s);
        }
        let mut tokens = s.split_whitespace();
        let head = tokens.next().ok_or_else(|| Error::Config("empty measure spec".into()))?;
        match head {
            "lebesgue" => Ok(Measure::lebesgue()),
            "zero" => Ok(Measure::zero()),
            "power_log" => {
                let mut scale = 1.0;
                let mut beta = None;
                let mut gamma = 0.0;
                for tok in tokens {
                    let (key, val) = tok
                        .split_once('=')
                        .ok_or_else(|| Error::Config(format!("expected key=value, got '{tok}'")))?;
                    let v: f64 = val
                        .parse()
                        .map_err(|_| Error::Config(format!("bad number '{val}' in measure spec")))?;
                    match key {
                        "c" | "scale" => scale = v,
                        "beta" => beta = Some(v),
                        "gamma" => gamma = v,
                        other => return Err(Error::Config(format!("unknown field '{other}' in power_log spec"))),
                    }
                }
                Measure::power_log(scale, beta.ok_or_else(|| Error::Config("power_log requires beta=".into()))?, gamma)
            }
            "atoms" => {
                let rest = tokens.collect::<Vec<_>>().join("");
                let mut list = Vec::new();
                for pair in rest.split(',').filter(|p| !p.is_empty()) {
                    let (t, c) = pair
                        .split_once(':')
                        .ok_or_else(|| Error::Config(format!("expected t:c atom, got '{pair}'")))?;
                    list.push((
                        t.parse().map_err(|_| Error::Config(format!("bad atom location '{t}'")))?,
                        c.parse().map_err(|_| Error::Config(format!("bad atom weight '{c}'")))?,
                    ));
                }
                if list.is_empty() {
                    return Err(Error::Config("atoms spec lists no atoms".into()));
                }
                Measure::atoms(list)
            }
            other => Err(Error::Config(format!("unknown measure spec '{other}'"))),
        }
    }
}
