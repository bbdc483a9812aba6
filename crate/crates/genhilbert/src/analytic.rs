//! Power-series model of analytic functions on the unit disk: Bloch-α,
//! H² and BMOA norm estimation on refinable sampling grids, dyadic block
//! machinery for coefficient sequences, and the structured test-function
//! families used by the operator witnesses.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par;

/// Number of boundary samples for circle means (H² inside BMOA).
pub const CIRCLE_SAMPLES: usize = 4096;

/// Sampling radius for circle means.
pub fn circle_radius() -> f64 {
    1.0 - (2.0f64).powi(-12)
}

/// Default truncation degree for test families.
pub const DEFAULT_TRUNC: usize = 4096;

const REFINE_REL_TOL: f64 = 1e-3;

/// Certifies `|a_k| <= c * k^{alpha-1} * lambda^k` for all `k >= 1`,
/// including beyond the truncation degree.
#[derive(Clone, Copy, Debug)]
pub struct GrowthTag {
    pub c: f64,
    pub alpha: f64,
    pub lambda: f64,
}

/// Exact evaluators attached to the structured families.
#[derive(Clone, Copy, Debug)]
pub enum ClosedForm {
    /// `scale / (1 - lambda z)^alpha`
    PowerKernel { scale: f64, lambda: f64, alpha: f64 },
    /// `scale * log^power(e / (1 - lambda z))`
    LogPow { scale: f64, lambda: f64, power: i32 },
}

impl ClosedForm {
    fn eval(&self, z: Complex64) -> Complex64 {
        match *self {
            ClosedForm::PowerKernel { scale, lambda, alpha } => {
                scale * (Complex64::new(1.0, 0.0) - lambda * z).powf(-alpha)
            }
            ClosedForm::LogPow { scale, lambda, power } => {
                let l = Complex64::new(1.0, 0.0) - (Complex64::new(1.0, 0.0) - lambda * z).ln();
                scale * l.powi(power)
            }
        }
    }

    fn eval_derivative(&self, z: Complex64) -> Complex64 {
        match *self {
            ClosedForm::PowerKernel { scale, lambda, alpha } => {
                scale * alpha * lambda * (Complex64::new(1.0, 0.0) - lambda * z).powf(-alpha - 1.0)
            }
            ClosedForm::LogPow { scale, lambda, power } => {
                let w = Complex64::new(1.0, 0.0) - lambda * z;
                let l = Complex64::new(1.0, 0.0) - w.ln();
                scale * (power as f64) * l.powi(power - 1) * lambda / w
            }
        }
    }
}

/// Truncated power series `a_0 + a_1 z + ... + a_N z^N`.
///
/// `exact` marks genuine polynomials (no truncation remainder); other
/// series certify their remainder through `growth_tag` or evaluate
/// through `closed_form`.
#[derive(Clone, Debug)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
    pub growth_tag: Option<GrowthTag>,
    pub closed_form: Option<ClosedForm>,
    pub exact: bool,
}

impl PowerSeries {
    /// Exact polynomial from real coefficients.
    pub fn polynomial(coeffs: &[f64]) -> PowerSeries {
        PowerSeries {
            coeffs: coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(),
            growth_tag: None,
            closed_form: None,
            exact: true,
        }
    }

    /// Exact polynomial from complex coefficients.
    pub fn polynomial_complex(coeffs: Vec<Complex64>) -> PowerSeries {
        PowerSeries { coeffs, growth_tag: None, closed_form: None, exact: true }
    }

    /// Truncated series with an optional growth certificate.
    pub fn from_coeffs(coeffs: Vec<Complex64>, growth_tag: Option<GrowthTag>) -> PowerSeries {
        PowerSeries { coeffs, growth_tag, closed_form: None, exact: false }
    }

    /// The constant function 1.
    pub fn one() -> PowerSeries {
        PowerSeries::polynomial(&[1.0])
    }

    /// Truncation of `1/(1-z)` (all coefficients 1), closed form attached.
    pub fn geometric(n: usize) -> PowerSeries {
        PowerSeries {
            coeffs: vec![Complex64::new(1.0, 0.0); n + 1],
            growth_tag: None,
            closed_form: Some(ClosedForm::PowerKernel { scale: 1.0, lambda: 1.0, alpha: 1.0 }),
            exact: false,
        }
    }

    /// Truncation of `log(e/(1-z))`, closed form attached.
    pub fn log_kernel(n: usize) -> PowerSeries {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for k in 1..=n {
            coeffs.push(Complex64::new(1.0 / k as f64, 0.0));
        }
        PowerSeries {
            coeffs,
            growth_tag: None,
            closed_form: Some(ClosedForm::LogPow { scale: 1.0, lambda: 1.0, power: 1 }),
            exact: false,
        }
    }

    pub fn trunc_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Remainder bound for the truncated series (or its derivative) at
    /// radius `r`. Zero for exact polynomials, infinite without a tag.
    fn tail_bound(&self, r: f64, derivative: bool) -> f64 {
        if self.exact {
            return 0.0;
        }
        let Some(g) = self.growth_tag else {
            return f64::INFINITY;
        };
        let n = self.coeffs.len(); // first index beyond the truncation
        let rho = g.lambda * r;
        if rho <= 0.0 {
            return 0.0;
        }
        if rho >= 1.0 {
            return f64::INFINITY;
        }
        // Sum_{k>=n} c k^p rho^k bounded by the first term over (1 - q),
        // q the worst consecutive-term ratio past n.
        let p = if derivative { g.alpha } else { g.alpha - 1.0 };
        let nf = n as f64;
        let q = rho * ((nf + 1.0) / nf).powf(p.max(0.0));
        if q >= 1.0 {
            return f64::INFINITY;
        }
        let first = g.c * nf.powf(p) * rho.powi(n as i32);
        let sum = first / (1.0 - q);
        if derivative {
            sum / r.max(0.5) // terms carry z^{k-1}; harmless for r < 1/2
        } else {
            sum
        }
    }

    /// Evaluate at `|z| < 1` (closed form when attached).
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        check_in_disk(z)?;
        if let Some(cf) = &self.closed_form {
            return Ok(cf.eval(z));
        }
        self.eval_series(z)
    }

    /// Evaluate through the truncated coefficients only, gated on the
    /// certified remainder bound.
    pub fn eval_series(&self, z: Complex64) -> Result<Complex64> {
        check_in_disk(z)?;
        let r = z.norm();
        let bound = self.tail_bound(r, false);
        if !(bound < 1e-10) {
            return Err(Error::TruncationInsufficient(format!(
                "series remainder bound {bound:.3e} at |z| = {r} exceeds 1e-10"
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            acc = acc * z + a;
        }
        Ok(acc)
    }

    /// Derivative at `|z| < 1`.
    pub fn eval_derivative(&self, z: Complex64) -> Result<Complex64> {
        check_in_disk(z)?;
        if let Some(cf) = &self.closed_form {
            return Ok(cf.eval_derivative(z));
        }
        let r = z.norm();
        let bound = self.tail_bound(r, true);
        if !(bound < 1e-10) {
            return Err(Error::TruncationInsufficient(format!(
                "derivative remainder bound {bound:.3e} at |z| = {r} exceeds 1e-10"
            )));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (1..self.coeffs.len()).rev() {
            acc = acc * z + (k as f64) * self.coeffs[k];
        }
        Ok(acc)
    }

    /// Dump as CSV lines `index,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,re,im\n");
        for (k, a) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{k},{:.16e},{:.16e}\n", a.re, a.im));
        }
        out
    }

    /// Load from the CSV produced by [`PowerSeries::to_csv`]; the result
    /// is treated as an exact polynomial.
    pub fn from_csv(s: &str) -> Result<PowerSeries> {
        let mut coeffs = Vec::new();
        for (i, line) in s.lines().enumerate() {
            if i == 0 && line.starts_with("index") {
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 3 {
                return Err(Error::Config(format!("bad series CSV line: '{line}'")));
            }
            let re: f64 = cols[1].trim().parse().map_err(|_| Error::Config(format!("bad re in '{line}'")))?;
            let im: f64 = cols[2].trim().parse().map_err(|_| Error::Config(format!("bad im in '{line}'")))?;
            coeffs.push(Complex64::new(re, im));
        }
        if coeffs.is_empty() {
            return Err(Error::Config("series CSV holds no coefficients".into()));
        }
        Ok(PowerSeries::polynomial_complex(coeffs))
    }
}

fn check_in_disk(z: Complex64) -> Result<()> {
    if z.norm() >= 1.0 {
        return Err(Error::Domain(format!("evaluation point |z| = {} outside the open disk", z.norm())));
    }
    Ok(())
}

/// Möbius involution `phi_a(z) = (a - z)/(1 - conj(a) z)`.
pub fn mobius(a: Complex64, z: Complex64) -> Complex64 {
    debug_assert!(a.norm() < 1.0 && z.norm() <= 1.0);
    (a - z) / (Complex64::new(1.0, 0.0) - a.conj() * z)
}

// ---------------------------------------------------------------------------
// Norm estimation on refinable grids
// ---------------------------------------------------------------------------

/// Which norm a [`NormEstimate`] reports.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub enum NormKind {
    BlochAlpha(f64),
    H2,
    Bmoa,
}

/// Grid-based norm estimate. `converged` means the value was stable
/// (relative 1e-3) under one grid refinement; refinement grids are
/// supersets, so sup-type estimates never decrease when refined.
#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct NormEstimate {
    pub kind: NormKind,
    pub value: f64,
    pub grid_points: usize,
    pub converged: bool,
}

/// Disk sampling grid. Level 2 is a strict superset of level 1: it keeps
/// every level-1 radius, angle and real-axis point and adds more. Radii
/// accumulate dyadically at 1; the dense real-axis band exploits that the
/// extremum sits on [0,1) for measures supported there.
pub fn disk_grid(level: u32) -> Vec<Complex64> {
    let (j_max, sub, angles, axis_sub, inner_sub) =
        if level <= 1 { (12u32, 8u32, 64usize, 32u32, 8u32) } else { (14, 16, 128, 64, 16) };

    let mut radii = Vec::new();
    for i in 0..=inner_sub {
        radii.push(0.5 * i as f64 / inner_sub as f64);
    }
    for j in 1..=j_max {
        for k in 0..sub {
            radii.push(1.0 - (2.0f64).powf(-(j as f64 + k as f64 / sub as f64)));
        }
    }

    let mut pts = Vec::new();
    for &r in &radii {
        if r == 0.0 {
            pts.push(Complex64::new(0.0, 0.0));
            continue;
        }
        for m in 0..angles {
            let th = 2.0 * std::f64::consts::PI * m as f64 / angles as f64;
            pts.push(Complex64::from_polar(r, th));
        }
    }
    // Dense real-axis refinement.
    for j in 1..=j_max {
        for k in 0..axis_sub {
            let r = 1.0 - (2.0f64).powf(-(j as f64 + k as f64 / axis_sub as f64));
            pts.push(Complex64::new(r, 0.0));
        }
    }
    pts
}

/// Sup of `g` over the two grid levels; returns (value, points, converged).
fn refine_sup<G>(g: G) -> Result<(f64, usize, bool)>
where
    G: Fn(Complex64) -> Result<f64> + Sync + Send,
{
    let mut levels = [0.0f64; 2];
    let mut points = 0;
    for (i, level) in [1u32, 2].iter().enumerate() {
        let grid = disk_grid(*level);
        points = grid.len();
        let vals = par::par_map(grid, |z| g(z));
        let mut sup = 0.0f64;
        for v in vals {
            sup = sup.max(v?);
        }
        levels[i] = sup;
    }
    let converged = (levels[1] - levels[0]).abs() <= REFINE_REL_TOL * levels[1].max(f64::MIN_POSITIVE);
    Ok((levels[1], points, converged))
}

/// Bloch-α seminorm `sup (1-|z|^2)^alpha |f'(z)|` on the refinable grid.
pub fn bloch_seminorm(f: &PowerSeries, alpha: f64) -> Result<NormEstimate> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("Bloch exponent must be > 0, got {alpha}")));
    }
    let (value, grid_points, converged) = refine_sup(|z| {
        let d = f.eval_derivative(z)?;
        Ok((1.0 - z.norm_sqr()).powf(alpha) * d.norm())
    })?;
    Ok(NormEstimate { kind: NormKind::BlochAlpha(alpha), value, grid_points, converged })
}

/// Full Bloch-α norm `|f(0)| + seminorm`.
pub fn bloch_norm(f: &PowerSeries, alpha: f64) -> Result<NormEstimate> {
    let semi = bloch_seminorm(f, alpha)?;
    Ok(NormEstimate {
        value: f.eval(Complex64::new(0.0, 0.0))?.norm() + semi.value,
        ..semi
    })
}

/// H² norm from the coefficients: `(sum |a_k|^2)^{1/2}`.
pub fn h2_norm(f: &PowerSeries) -> NormEstimate {
    let sum: f64 = f.coeffs.iter().map(|a| a.norm_sqr()).sum();
    let n = f.coeffs.len();
    let converged = if f.exact {
        true
    } else {
        // truncation-stability proxy: the last quarter contributes < 1e-3
        let tail: f64 = f.coeffs[n - n / 4..].iter().map(|a| a.norm_sqr()).sum();
        tail.sqrt() <= REFINE_REL_TOL * sum.sqrt().max(f64::MIN_POSITIVE)
    };
    NormEstimate { kind: NormKind::H2, value: sum.sqrt(), grid_points: n, converged }
}

/// Circle-mean H² norm of `g` at the sampling radius.
fn h2_boundary<G: Fn(Complex64) -> Result<Complex64>>(g: G) -> Result<f64> {
    let rho = circle_radius();
    let mut acc = 0.0;
    for m in 0..CIRCLE_SAMPLES {
        let th = 2.0 * std::f64::consts::PI * m as f64 / CIRCLE_SAMPLES as f64;
        acc += g(Complex64::from_polar(rho, th))?.norm_sqr();
    }
    Ok((acc / CIRCLE_SAMPLES as f64).sqrt())
}

/// BMOA sampling points. Level 2 is a superset of level 1.
fn bmoa_grid(level: u32) -> Vec<Complex64> {
    let mut pts = vec![Complex64::new(0.0, 0.0)];
    for j in 1..=20 {
        pts.push(Complex64::new(1.0 - (2.0f64).powi(-j), 0.0));
    }
    fn spots(pts: &mut Vec<Complex64>, radius: f64, offset: f64) {
        for m in 0..8 {
            let th = 2.0 * std::f64::consts::PI * (m as f64 + offset) / 8.0;
            pts.push(Complex64::from_polar(radius, th));
        }
    }
    spots(&mut pts, 0.6, 0.0);
    spots(&mut pts, 0.9, 0.5);
    if level >= 2 {
        for j in 1..=20 {
            pts.push(Complex64::new(1.0 - (2.0f64).powf(-(j as f64 + 0.5)), 0.0));
        }
        spots(&mut pts, 0.75, 0.25);
        spots(&mut pts, 0.95, 0.75);
    }
    pts
}

/// BMOA norm `|f(0)| + sup_a ||f o phi_a - f(a)||_{H^2}` by boundary
/// sampling over the spot grid.
pub fn bmoa_norm(f: &PowerSeries) -> Result<NormEstimate> {
    let f0 = f.eval(Complex64::new(0.0, 0.0))?.norm();
    let sup_level = |level: u32| -> Result<(f64, usize)> {
        let grid = bmoa_grid(level);
        let n = grid.len();
        let sups = par::par_map(grid, |a| -> Result<f64> {
            let fa = f.eval(a)?;
            h2_boundary(|z| Ok(f.eval(mobius(a, z))? - fa))
        });
        let mut sup = 0.0f64;
        for s in sups {
            sup = sup.max(s?);
        }
        Ok((sup, n))
    };
    let (v1, _) = sup_level(1)?;
    let (v2, grid_points) = sup_level(2)?;
    let converged = (v2 - v1).abs() <= REFINE_REL_TOL * v2.max(f64::MIN_POSITIVE);
    Ok(NormEstimate { kind: NormKind::Bmoa, value: f0 + v2, grid_points, converged })
}

/// Sup of `|f(z)| (1-|z|^2)^{alpha-1}` (plain sup `|f|` for `alpha < 1`),
/// the growth envelope of Bloch-α functions.
pub fn growth_envelope_check(f: &PowerSeries, alpha: f64) -> Result<EnvelopeReport> {
    let e = (alpha - 1.0).max(0.0);
    let (sup, _, pass) = refine_sup(|z| Ok(f.eval(z)?.norm() * (1.0 - z.norm_sqr()).powf(e)))?;
    Ok(EnvelopeReport { sup, pass })
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct EnvelopeReport {
    pub sup: f64,
    pub pass: bool,
}

// ---------------------------------------------------------------------------
// Coefficient machinery
// ---------------------------------------------------------------------------

/// `sup_n n a_n` for a nonnegative nonincreasing coefficient sequence,
/// with a stabilization verdict (Bloch membership criterion for such
/// series).
pub fn coeff_bloch_test(f: &PowerSeries) -> Result<CoeffBlochReport> {
    let n = f.coeffs.len();
    let mut prev = f64::INFINITY;
    let mut seq = Vec::with_capacity(n);
    for (k, a) in f.coeffs.iter().enumerate() {
        if a.im.abs() > 1e-13 || a.re < -1e-13 {
            return Err(Error::HypothesisViolated(format!(
                "coefficient a_{k} = {a} is not real nonnegative"
            )));
        }
        if a.re > prev * (1.0 + 1e-12) + 1e-15 {
            return Err(Error::HypothesisViolated(format!(
                "coefficients not nonincreasing at index {k}: {} > {prev}",
                a.re
            )));
        }
        prev = a.re;
        seq.push(a.re);
    }
    let weighted = |k: usize| k as f64 * seq[k];
    let mut head_sup = 0.0f64;
    for k in 1..=(n - 1) / 2 {
        head_sup = head_sup.max(weighted(k));
    }
    let mut sup = head_sup;
    for k in (n - 1) / 2 + 1..n {
        sup = sup.max(weighted(k));
    }
    let bounded = sup <= 1.1 * head_sup + 1e-300;
    Ok(CoeffBlochReport { sup, head_sup, bounded })
}

#[derive(Clone, Copy, Debug, serde::Serialize)]
pub struct CoeffBlochReport {
    pub sup: f64,
    pub head_sup: f64,
    pub bounded: bool,
}

/// Dyadic block seminorm of `{a_k / k^{alpha-1}}`: for block `n`, the
/// l2 norm over `k in (2^n, 2^{n+1}]`; returns the block sup. The index
/// k = 1 sits outside every block by the blocking convention.
pub fn dyadic_block_seminorm(f: &PowerSeries, alpha: f64) -> Result<BlockReport> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("block exponent must be > 0, got {alpha}")));
    }
    let coeffs = &f.coeffs;
    let n_max = coeffs.len() - 1;
    let mut block_l2 = Vec::new();
    let mut n = 0u32;
    loop {
        let lo = (1usize << n) + 1;
        let hi = 1usize << (n + 1);
        if lo > n_max {
            break;
        }
        let mut s = 0.0;
        for k in lo..=hi.min(n_max) {
            let lam = coeffs[k].norm() / (k as f64).powf(alpha - 1.0);
            s += lam * lam;
        }
        block_l2.push(s.sqrt());
        n += 1;
    }
    let sup = block_l2.iter().fold(0.0f64, |a, &b| a.max(b));
    let divergent = match (block_l2.first(), block_l2.last()) {
        (Some(&first), Some(&last)) => last >= 2.0 * first && last >= sup,
        _ => false,
    };
    Ok(BlockReport { block_l2, sup, divergent })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct BlockReport {
    pub block_l2: Vec<f64>,
    pub sup: f64,
    pub divergent: bool,
}

/// Multiplier criterion from l(2,inf) to l1: the sum of the dyadic block
/// l2 norms of `lambda_seq` (index 0 unused, blocks as above), with a
/// convergence verdict from the trailing increment ratio.
pub fn multiplier_l2inf_to_l1_check(lambda_seq: &[f64]) -> MultiplierReport {
    let n_max = lambda_seq.len().saturating_sub(1);
    let mut block_l2 = Vec::new();
    let mut n = 0u32;
    loop {
        let lo = (1usize << n) + 1;
        let hi = 1usize << (n + 1);
        if lo > n_max {
            break;
        }
        let mut s = 0.0;
        for k in lo..=hi.min(n_max) {
            s += lambda_seq[k] * lambda_seq[k];
        }
        block_l2.push(s.sqrt());
        n += 1;
    }
    let sum: f64 = block_l2.iter().sum();
    let finite = match block_l2.len() {
        0 | 1 => true,
        len => {
            let last = block_l2[len - 1];
            let prev = block_l2[len - 2];
            prev == 0.0 && last == 0.0 || (prev > 0.0 && last / prev < 0.9)
        }
    };
    MultiplierReport { block_l2, sum, finite }
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct MultiplierReport {
    pub block_l2: Vec<f64>,
    pub sum: f64,
    pub finite: bool,
}

// ---------------------------------------------------------------------------
// Test-function families
// ---------------------------------------------------------------------------

/// `f_lambda(z) = (1 - lambda^2) / (1 - lambda z)^alpha` with exact
/// generalized-binomial coefficients
/// `a_k = (1 - lambda^2) binom(k + alpha - 1, k) lambda^k`.
pub fn test_function_power(lambda: f64, alpha: f64, n: usize) -> Result<PowerSeries> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::Domain(format!("family parameter lambda must lie in [0,1), got {lambda}")));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("family exponent alpha must be > 0, got {alpha}")));
    }
    let scale = 1.0 - lambda * lambda;
    if lambda == 0.0 {
        let mut f = PowerSeries::polynomial(&[1.0]);
        f.closed_form = Some(ClosedForm::PowerKernel { scale, lambda, alpha });
        return Ok(f);
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(Complex64::new(scale, 0.0));
    let mut binom = 1.0; // binom(k + alpha - 1, k)
    let mut lam_pow = 1.0;
    let mut c_ratio = 0.0f64; // max binom / k^{alpha-1}
    for k in 1..=n {
        let kf = k as f64;
        binom *= (kf + alpha - 1.0) / kf;
        lam_pow *= lambda;
        coeffs.push(Complex64::new(scale * binom * lam_pow, 0.0));
        c_ratio = c_ratio.max(binom / kf.powf(alpha - 1.0));
    }
    Ok(PowerSeries {
        coeffs,
        growth_tag: Some(GrowthTag { c: scale * c_ratio * 1.01, alpha, lambda }),
        closed_form: Some(ClosedForm::PowerKernel { scale, lambda, alpha }),
        exact: false,
    })
}

/// `f_lambda(z) = beta_lambda log^2(e/(1 - lambda z))` with
/// `beta_lambda = 1 / log(e/(1 - lambda^2))`; coefficients from squaring
/// the log series `1 + sum_k w^k / k`.
pub fn test_function_log(lambda: f64, n: usize) -> Result<PowerSeries> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::Domain(format!("family parameter lambda must lie in (0,1), got {lambda}")));
    }
    let beta_lambda = 1.0 / (1.0 - (1.0 - lambda * lambda).ln());
    // s_k: coefficients of log^2(e/(1-w)) in w (lambda factored out to
    // avoid underflow in the convolution).
    let mut s = vec![0.0f64; n + 1];
    s[0] = 1.0;
    for (k, sk) in s.iter_mut().enumerate().skip(1) {
        let mut acc = 2.0 / k as f64; // cross terms with the constant 1
        for i in 1..k {
            acc += 1.0 / (i as f64 * (k - i) as f64);
        }
        *sk = acc;
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    let mut lam_pow = 1.0;
    let mut c_env = 0.0f64;
    for (k, &sk) in s.iter().enumerate() {
        coeffs.push(Complex64::new(beta_lambda * sk * lam_pow, 0.0));
        if k >= 1 {
            c_env = c_env.max(sk);
        }
        lam_pow *= lambda;
    }
    Ok(PowerSeries {
        coeffs,
        growth_tag: Some(GrowthTag { c: beta_lambda * c_env * 1.01, alpha: 1.0, lambda }),
        closed_form: Some(ClosedForm::LogPow { scale: beta_lambda, lambda, power: 2 }),
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_constant_and_rejections() {
        let f = PowerSeries::one();
        assert_eq!(f.eval(c(0.5, 0.0)).unwrap(), c(1.0, 0.0));
        assert!(f.eval(c(1.0, 0.0)).is_err());
        assert!(f.eval(c(0.8, 0.8)).is_err());
    }

    #[test]
    fn eval_hilbert_image_of_one() {
        // coefficients 1/(n+1): sum z^n/(n+1) = -log(1-z)/z
        let coeffs: Vec<f64> = (0..=4096).map(|n| 1.0 / (n as f64 + 1.0)).collect();
        let f = PowerSeries::polynomial(&coeffs);
        let v = f.eval(c(0.5, 0.0)).unwrap();
        assert!((v.re - 2.0 * (2.0f64).ln()).abs() < 1e-10);
    }

    #[test]
    fn power_family_basics() {
        let f = test_function_power(0.0, 2.0, 16).unwrap();
        assert_eq!(f.eval(c(0.3, 0.2)).unwrap(), c(1.0, 0.0));

        let lam = 0.5;
        let f = test_function_power(lam, 2.0, 512).unwrap();
        // a_k = (1 - lam^2)(k+1) lam^k at alpha = 2
        for k in [0usize, 1, 5, 20] {
            let want = (1.0 - lam * lam) * (k as f64 + 1.0) * lam.powi(k as i32);
            assert!((f.coeff(k).re - want).abs() < 1e-14, "k={k}");
        }
        // f(lam) = (1 - lam^2)^{1-alpha}
        let v = f.eval(c(lam, 0.0)).unwrap();
        assert!((v.re - (1.0 - lam * lam).powf(-1.0)).abs() < 1e-12);
        assert!(test_function_power(1.0, 2.0, 8).is_err());
    }

    #[test]
    fn series_closed_form_agreement() {
        for (f, tol) in [
            (test_function_power(0.9, 2.0, 4096).unwrap(), 1e-9),
            (test_function_log(0.9, 4096).unwrap(), 1e-9),
        ] {
            for z in [c(0.9, 0.0), c(0.0, 0.9), c(-0.6, 0.3), c(0.5, -0.5)] {
                let a = f.eval_series(z).unwrap();
                let b = f.eval(z).unwrap();
                assert!((a - b).norm() < tol, "z={z}, diff={}", (a - b).norm());
            }
        }
    }

    #[test]
    fn log_family_values() {
        let lam = 0.7;
        let f = test_function_log(lam, 2048).unwrap();
        let beta_lambda = 1.0 / (1.0 - (1.0 - lam * lam).ln());
        assert!((f.eval(c(0.0, 0.0)).unwrap().re - beta_lambda).abs() < 1e-14);
        // f(lam) = log(e/(1-lam^2))
        let want = 1.0 - (1.0 - lam * lam).ln();
        assert!((f.eval(c(lam, 0.0)).unwrap().re - want).abs() < 1e-12);
        assert!(test_function_log(0.0, 8).is_err());
    }

    #[test]
    fn mobius_involution() {
        let a = c(0.5, 0.0);
        assert!((mobius(a, a)).norm() < 1e-15);
        assert_eq!(mobius(c(0.0, 0.0), c(0.3, 0.1)), c(-0.3, -0.1));
        let z = c(0.2, -0.4);
        let back = mobius(a, mobius(a, z));
        assert!((back - z).norm() < 1e-14);
    }

    #[test]
    fn bloch_identity_function() {
        let f = PowerSeries::polynomial(&[0.0, 1.0]);
        let est = bloch_seminorm(&f, 1.0).unwrap();
        assert!((est.value - 1.0).abs() < 1e-12);
        assert!(est.converged);
    }

    #[test]
    fn bloch_log_kernel_is_two() {
        let f = PowerSeries::log_kernel(64);
        let est = bloch_seminorm(&f, 1.0).unwrap();
        assert!((est.value - 2.0).abs() < 1e-3, "got {}", est.value);
    }

    #[test]
    fn bloch_power_family_uniformly_bounded() {
        let mut vals = Vec::new();
        for lam in [0.9, 0.99, 0.999] {
            let f = test_function_power(lam, 2.0, 64).unwrap();
            vals.push(bloch_seminorm(&f, 2.0).unwrap().value);
        }
        let max = vals.iter().cloned().fold(0.0f64, f64::max);
        assert!(max < 10.0, "family norms {vals:?}");
    }

    #[test]
    fn log_family_bloch_uniformly_bounded() {
        for lam in [0.9, 0.99, 0.999] {
            let f = test_function_log(lam, 64).unwrap();
            let v = bloch_seminorm(&f, 1.0).unwrap().value;
            assert!(v < 10.0, "lambda={lam} value={v}");
        }
    }

    #[test]
    fn h2_norms() {
        assert!((h2_norm(&PowerSeries::polynomial(&[1.0, 1.0])).value - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(h2_norm(&PowerSeries::polynomial(&[0.0])).value, 0.0);
        let coeffs: Vec<f64> =
            std::iter::once(0.0).chain((1..=1024).map(|k| 1.0 / k as f64)).collect();
        let f = PowerSeries::polynomial(&coeffs);
        let want: f64 = (1..=1024).map(|k: i64| 1.0 / (k * k) as f64).sum::<f64>().sqrt();
        assert!((h2_norm(&f).value - want).abs() < 1e-14);
        assert!((want - 1.2824).abs() < 1e-3);
    }

    #[test]
    fn bmoa_constant_and_identity() {
        let est = bmoa_norm(&PowerSeries::polynomial(&[3.0])).unwrap();
        assert_eq!(est.value, 3.0);
        let est = bmoa_norm(&PowerSeries::polynomial(&[0.0, 1.0])).unwrap();
        assert!((est.value - 1.0).abs() < 1e-3, "got {}", est.value);
    }

    #[test]
    fn bmoa_log_family_bounded() {
        let f = test_function_log(0.99, 512).unwrap();
        let est = bmoa_norm(&f).unwrap();
        assert!(est.value.is_finite() && est.value < 10.0, "got {}", est.value);
    }

    #[test]
    fn coeff_bloch_cases() {
        let coeffs: Vec<f64> = (0..=2048).map(|n| 1.0 / (n as f64 + 1.0)).collect();
        let rep = coeff_bloch_test(&PowerSeries::polynomial(&coeffs)).unwrap();
        assert!(rep.sup < 1.0 && rep.bounded);

        let coeffs: Vec<f64> = (0..=4096).map(|n| 1.0 / (n as f64 + 1.0).sqrt()).collect();
        let rep = coeff_bloch_test(&PowerSeries::polynomial(&coeffs)).unwrap();
        assert!(!rep.bounded, "sqrt decay must look unbounded, sup={}", rep.sup);

        // hypothesis violations
        assert!(coeff_bloch_test(&PowerSeries::polynomial(&[0.0, 1.0])).is_err());
        assert!(coeff_bloch_test(&PowerSeries::polynomial(&[1.0, -0.5])).is_err());
    }

    #[test]
    fn dyadic_blocks() {
        // a_k = k^{alpha-1}: every block l2 ~ 2^{n/2}, divergent
        let alpha = 2.0;
        let coeffs: Vec<f64> = (0..=4096).map(|k| k as f64).collect();
        let rep = dyadic_block_seminorm(&PowerSeries::polynomial(&coeffs), alpha).unwrap();
        assert!(rep.divergent);

        // 1/(1-z): lambda_k = 1/k, first block (k=2 only) is the sup = 1/2
        let rep = dyadic_block_seminorm(&PowerSeries::geometric(4096), 2.0).unwrap();
        assert!((rep.sup - 0.5).abs() < 1e-12);
        assert!(!rep.divergent);

        let rep = dyadic_block_seminorm(&PowerSeries::polynomial(&[0.0, 0.0, 0.0]), 2.0).unwrap();
        assert_eq!(rep.sup, 0.0);
    }

    #[test]
    fn multiplier_check_cases() {
        let n = 1 << 14;
        let mk = |f: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..=n).map(|k| if k == 0 { 0.0 } else { f(k) }).collect() };
        let fin = multiplier_l2inf_to_l1_check(&mk(&|k| 1.0 / (k * k) as f64 * k as f64)); // 1/k
        assert!(fin.finite);
        let div = multiplier_l2inf_to_l1_check(&mk(&|k| 1.0 / (k as f64).sqrt()));
        assert!(!div.finite);
        // mu_k = 1/k^alpha against k^{alpha-1}: lambda_k = 1/k again
        let fin2 = multiplier_l2inf_to_l1_check(&mk(&|k| 1.0 / k as f64));
        assert!(fin2.finite);
    }

    #[test]
    fn growth_envelope_cases() {
        let rep = growth_envelope_check(&PowerSeries::one(), 0.5).unwrap();
        assert!((rep.sup - 1.0).abs() < 1e-12 && rep.pass);

        let rep = growth_envelope_check(&PowerSeries::geometric(64), 2.0).unwrap();
        assert!(rep.sup <= 2.0 + 1e-9 && rep.pass, "sup={}", rep.sup);

        let f = test_function_power(0.99, 2.0, 64).unwrap();
        let rep = growth_envelope_check(&f, 2.0).unwrap();
        assert!(rep.sup <= 4.0 + 1e-9, "sup={}", rep.sup);
    }

    #[test]
    fn refinement_monotone() {
        let f = PowerSeries::log_kernel(64);
        let sup_on = |level: u32| -> f64 {
            disk_grid(level)
                .into_iter()
                .map(|z| (1.0 - z.norm_sqr()) * f.eval_derivative(z).unwrap().norm())
                .fold(0.0f64, f64::max)
        };
        assert!(sup_on(2) >= sup_on(1));
    }

    #[test]
    fn csv_roundtrip() {
        let f = test_function_power(0.5, 2.0, 8).unwrap();
        let g = PowerSeries::from_csv(&f.to_csv()).unwrap();
        for k in 0..=8 {
            assert!((f.coeff(k) - g.coeff(k)).norm() < 1e-18);
        }
    }

    #[test]
    fn truncation_gate() {
        // growth-tagged series near the boundary: remainder certificate fails
        let f = test_function_power(0.999, 2.0, 64).unwrap();
        assert!(f.eval_series(c(0.999, 0.0)).is_err());
        // closed form still evaluates
        assert!(f.eval(c(0.999, 0.0)).is_ok());
    }
}
