//! The generalized Hilbert operator `H_mu`: Hankel moment matrices, the
//! coefficient action `b_n = sum_k mu_{n+k} a_k`, the integral action
//! `I_mu(f)(z) = int f(t)/(1-tz) dmu(t)`, the duality pairing, and
//! essential-norm brackets combining test-function witnesses with
//! tail-ratio formulas.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::analytic::PowerSeries;
use crate::error::{Error, Result};
use crate::measure::{CarlesonGridSpec, Measure, MomentTable, DEFAULT_QUAD_REL_TOL};
use crate::par;

/// Which essential-norm regime applies: `B^alpha -> B` with `alpha > 1`
/// (tail exponent `alpha`), or the logarithmic `B -> B` case (tail
/// exponent 1 with one log factor).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode")]
pub enum AlphaMode {
    Power { alpha: f64 },
    Log,
}

impl AlphaMode {
    /// Tail exponent `s` and log exponent `q` of the matching Carleson
    /// condition.
    pub fn s_q(self) -> (f64, f64) {
        match self {
            AlphaMode::Power { alpha } => (alpha, 0.0),
            AlphaMode::Log => (1.0, 1.0),
        }
    }

    pub fn validate(self) -> Result<()> {
        if let AlphaMode::Power { alpha } = self {
            if !(alpha > 1.0) {
                return Err(Error::Domain(format!("power mode requires alpha > 1, got {alpha}")));
            }
        }
        Ok(())
    }
}

/// `H_mu` truncated at degree `N`, with the moment table `mu_0..mu_{2N}`
/// cached so every Hankel entry `mu_{n+k}` is a lookup.
#[derive(Clone, Debug)]
pub struct HankelOperator {
    measure: Measure,
    moments: MomentTable,
    trunc_degree: usize,
}

impl HankelOperator {
    pub fn new(measure: Measure, trunc_degree: usize) -> Result<HankelOperator> {
        if trunc_degree == 0 {
            return Err(Error::Config("truncation degree must be >= 1".into()));
        }
        let moments = measure.moment_table(2 * trunc_degree)?;
        Ok(HankelOperator { measure, moments, trunc_degree })
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn moments(&self) -> &MomentTable {
        &self.moments
    }

    pub fn trunc_degree(&self) -> usize {
        self.trunc_degree
    }

    /// The `m x m` Hankel matrix with entries `mu_{n+k}`.
    pub fn hankel_matrix(&self, m: usize) -> Result<DMatrix<f64>> {
        if m == 0 || 2 * (m - 1) > self.moments.n_max() {
            return Err(Error::SizeExceeded { requested: m, available: self.moments.n_max() / 2 + 1 });
        }
        Ok(DMatrix::from_fn(m, m, |n, k| self.moments.value(n + k)))
    }

    /// Smallest eigenvalue of the `m x m` Hankel matrix (PSD check).
    pub fn hankel_min_eigenvalue(&self, m: usize) -> Result<f64> {
        let mat = self.hankel_matrix(m)?;
        let eig = mat.symmetric_eigen();
        Ok(eig.eigenvalues.iter().fold(f64::INFINITY, |a, &b| a.min(b)))
    }

    /// Coefficient action: `b_n = sum_k mu_{n+k} a_k` for `n <= N`, with
    /// the omitted-tail sum certified below 1e-8 (growth tag plus moment
    /// monotonicity). The image is returned as an exact polynomial.
    pub fn apply_coeff(&self, f: &PowerSeries) -> Result<PowerSeries> {
        let a = f.coeffs();
        let deg = a.len() - 1;
        if deg > self.trunc_degree {
            return Err(Error::SizeExceeded { requested: deg, available: self.trunc_degree });
        }

        if !f.exact {
            let Some(g) = f.growth_tag else {
                return Err(Error::OperatorUndefined(
                    "input series carries no growth certificate for the omitted tail".into(),
                ));
            };
            let rho = g.lambda;
            if rho >= 1.0 {
                return Err(Error::OperatorUndefined(format!(
                    "coefficient sum not certifiably convergent (growth factor {rho})"
                )));
            }
            // Sum the certified envelope c k^{alpha-1} rho^k past the
            // truncation numerically (it decays geometrically).
            let p = g.alpha - 1.0;
            let k0 = a.len();
            let mut sum = 0.0f64;
            let mut term = g.c * (k0 as f64).powf(p) * rho.powi(k0 as i32);
            let mut k = k0;
            let mut converged = false;
            for _ in 0..200_000 {
                sum += term;
                k += 1;
                term = g.c * (k as f64).powf(p) * rho.powi(k as i32);
                if term < 1e-20 * sum.max(1e-300) {
                    converged = true;
                    break;
                }
            }
            // mu_{n+k} <= mu_{k0} for every omitted k (moments nonincreasing)
            let mu_cap = self.moments.value(k0.min(self.moments.n_max()));
            let tail = mu_cap * sum;
            if !converged || !(tail <= 1e-8) {
                return Err(Error::TruncationInsufficient(format!(
                    "omitted coefficient tail bound {tail:.3e} exceeds 1e-8"
                )));
            }
        }

        let n_out = self.trunc_degree;
        let coeffs = par::par_map_range(n_out + 1, |n| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, &ak) in a.iter().enumerate() {
                acc += self.moments.value(n + k) * ak;
            }
            acc
        });
        Ok(PowerSeries::polynomial_complex(coeffs))
    }

    /// Integral action `I_mu(f)(z) = int f(t)/(1-tz) dmu(t)`.
    pub fn apply_integral(&self, f: &PowerSeries, z: Complex64) -> Result<Complex64> {
        if z.norm() >= 1.0 {
            return Err(Error::Domain(format!("evaluation point |z| = {} outside the disk", z.norm())));
        }
        // Integrability guard: inputs that genuinely grow like
        // (1-t)^{-(alpha-1)} toward t=1 (growth factor lambda = 1) need
        // int (1-t)^{1-alpha} dmu < infinity. Families with lambda < 1
        // are bounded on [0,1) and need no guard.
        if let Some(g) = f.growth_tag {
            if g.lambda >= 1.0 && g.alpha > 1.0 {
                self.measure.transform_weight(1.0 - g.alpha, 0.0).map_err(|e| {
                    Error::HypothesisViolated(format!(
                        "integral action undefined: int (1-t)^(1-alpha) dmu diverges ({e})"
                    ))
                })?;
            }
        }
        let u_extra = (-(1.0 - z.norm()).ln()).max(0.0);
        let kernel = |t: f64| -> Complex64 {
            // deep quadrature nodes can round t up to exactly 1.0
            let tc = t.min(1.0f64.next_down());
            let ft = f.eval(Complex64::new(tc, 0.0)).expect("t in [0,1)");
            ft / (Complex64::new(1.0, 0.0) - t * z)
        };
        let (v, _) = self.measure.integrate(&kernel, 0.0, u_extra, DEFAULT_QUAD_REL_TOL)?;
        Ok(v)
    }

    /// Max over `z_grid` of the discrepancy between the two routes.
    pub fn agreement_residual(&self, f: &PowerSeries, z_grid: &[Complex64]) -> Result<f64> {
        let image = self.apply_coeff(f)?;
        let residuals = par::par_map(z_grid.to_vec(), |z| -> Result<f64> {
            let series = image.eval(z)?;
            let integral = self.apply_integral(f, z)?;
            Ok((series - integral).norm())
        });
        let mut max = 0.0f64;
        for r in residuals {
            max = max.max(r?);
        }
        Ok(max)
    }

    /// Residual of the duality pairing at radius `r`:
    /// `(1/2pi) int I_mu(f)(r e^{i th}) conj(g(e^{i th})) d th
    ///  = int f(t) conj(g(rt)) dmu(t)` for polynomials `g`.
    pub fn pairing_residual(&self, f: &PowerSeries, g: &PowerSeries, r: f64) -> Result<f64> {
        if !(r > 0.0 && r < 1.0) {
            return Err(Error::Domain(format!("pairing radius must lie in (0,1), got {r}")));
        }
        if !g.exact {
            return Err(Error::Domain("pairing test function g must be a polynomial".into()));
        }
        let horner = |coeffs: &[Complex64], z: Complex64| {
            coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
        };

        let m = crate::analytic::CIRCLE_SAMPLES;
        let terms = par::par_map_range(m, |i| -> Result<Complex64> {
            let th = 2.0 * std::f64::consts::PI * i as f64 / m as f64;
            let boundary = Complex64::from_polar(1.0, th);
            let lhs_f = self.apply_integral(f, r * boundary)?;
            Ok(lhs_f * horner(g.coeffs(), boundary).conj())
        });
        let mut lhs = Complex64::new(0.0, 0.0);
        for t in terms {
            lhs += t?;
        }
        lhs /= m as f64;

        let integrand = |t: f64| -> Complex64 {
            let tc = t.min(1.0f64.next_down());
            let ft = f.eval(Complex64::new(tc, 0.0)).expect("t in [0,1)");
            ft * horner(g.coeffs(), Complex64::new(r * t, 0.0)).conj()
        };
        let (rhs, _) = self.measure.integrate(&integrand, 0.0, 0.0, DEFAULT_QUAD_REL_TOL)?;
        Ok((lhs - rhs).norm())
    }

    /// Test-function witness at parameter `lambda`, with the matching
    /// closed-form lower bound.
    ///
    /// Power mode: the Bloch seminorm of `H_mu f_lambda` for the kernel
    /// family `f_lambda = (1-lambda^2)/(1-lambda t)^alpha`, computed from
    /// the integral route on the real axis (the image has nonnegative
    /// coefficients, so the real axis is extremal); bound
    /// `mu([lambda,1)) / (e (1-lambda^2)^alpha)`.
    ///
    /// Log mode: the derivative-point witness
    /// `(1-lambda^2) |I_mu(f_lambda)'(lambda)|` for the log^2 family;
    /// bound `lambda log(e/(1-lambda^2)) mu([lambda,1)) / (1-lambda^2)`.
    pub fn witness_lower_bound(&self, mode: AlphaMode, lambda: f64) -> Result<WitnessValue> {
        mode.validate()?;
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Domain(format!("witness parameter lambda must lie in (0,1), got {lambda}")));
        }
        let tail = self.measure.tail_mass(lambda)?;
        let one_minus_l2 = (1.0 - lambda) * (1.0 + lambda);
        match mode {
            AlphaMode::Power { alpha } => {
                let scale = one_minus_l2;
                let fval = move |t: f64| scale * (1.0 - lambda * t).powf(-alpha);
                let witness = self.bloch_witness_sup(&fval)?;
                let bound = tail / (std::f64::consts::E * one_minus_l2.powf(alpha));
                Ok(WitnessValue { lambda, witness, closed_form_bound: bound })
            }
            AlphaMode::Log => {
                let beta_lambda = 1.0 / (1.0 - one_minus_l2.ln());
                let fval = move |t: f64| {
                    let l = 1.0 - (1.0 - lambda * t).ln();
                    beta_lambda * l * l
                };
                let deriv = self.weighted_derivative(&fval, lambda)?;
                let witness = one_minus_l2 * deriv.abs();
                let bound = lambda * (1.0 - one_minus_l2.ln()) * tail / one_minus_l2;
                Ok(WitnessValue { lambda, witness, closed_form_bound: bound })
            }
        }
    }

    /// Bloch witness `sup_r (1-r^2) I_mu(f_lambda)'(r)` for the power
    /// family at any exponent `alpha > 0` (used by the alpha < 1 suites,
    /// which have no essential-norm mode attached).
    pub fn power_family_witness(&self, lambda: f64, alpha: f64) -> Result<f64> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Domain(format!("witness parameter lambda must lie in (0,1), got {lambda}")));
        }
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("family exponent alpha must be > 0, got {alpha}")));
        }
        let scale = (1.0 - lambda) * (1.0 + lambda);
        let fval = move |t: f64| scale * (1.0 - lambda * t).powf(-alpha);
        self.bloch_witness_sup(&fval)
    }

    /// `I_mu(f)'(r) = int t f(t)/(1-tr)^2 dmu(t)` for real `r`.
    fn weighted_derivative(&self, fval: &(dyn Fn(f64) -> f64 + Sync), r: f64) -> Result<f64> {
        let u_extra = (-(1.0 - r).ln()).max(0.0);
        let integrand = |t: f64| {
            let d = 1.0 - t * r;
            t * fval(t) / (d * d)
        };
        let (v, _) = self.measure.integrate(&integrand, 0.0, u_extra, DEFAULT_QUAD_REL_TOL)?;
        Ok(v)
    }

    /// `sup_r (1-r^2) I_mu(f)'(r)` over the witness radius grid.
    fn bloch_witness_sup(&self, fval: &(dyn Fn(f64) -> f64 + Sync)) -> Result<f64> {
        let sups = par::par_map(witness_radius_grid(), |r| -> Result<f64> {
            Ok((1.0 - r * r) * self.weighted_derivative(fval, r)?.abs())
        });
        let mut sup = 0.0f64;
        for s in sups {
            sup = sup.max(s?);
        }
        Ok(sup)
    }
}

/// Radii for the Bloch witness sup: dyadic accumulation at 1 with 1/8
/// subdivisions, plus a coarse inner band.
pub fn witness_radius_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..9).map(|i| i as f64 / 16.0).collect();
    for j in 1..=30u32 {
        for k in 0..8u32 {
            grid.push(1.0 - (2.0f64).powf(-(j as f64 + k as f64 / 8.0)));
        }
    }
    grid
}

/// Default witness parameter grid `lambda_j = 1 - 2^{-j}`, j = 2..12.
pub fn default_lambda_grid() -> Vec<f64> {
    (2..=12).map(|j| 1.0 - (2.0f64).powi(-j)).collect()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct WitnessValue {
    pub lambda: f64,
    pub witness: f64,
    pub closed_form_bound: f64,
}

/// Trend of the tail-ratio sequence behind a formula value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Trend {
    Converged,
    Decreasing,
    Oscillating,
}

#[derive(Clone, Debug, Serialize)]
pub struct FormulaReport {
    pub value: f64,
    pub trend: Trend,
    pub vanishing: bool,
}

/// Tail-ratio limsup estimate: `limsup mu([r,1))/(1-r)^alpha` (power) or
/// `limsup mu([r,1)) log(e/(1-r))/(1-r)` (log), as the trailing-window
/// max on the dyadic grid. Errors when the matching boundedness verdict
/// fails (the formula is then meaningless).
pub fn essnorm_formula(m: &Measure, mode: AlphaMode) -> Result<FormulaReport> {
    mode.validate()?;
    let (s, q) = mode.s_q();
    let report = m.carleson_report(s, q, &CarlesonGridSpec::default())?;
    if !report.verdict_bounded {
        return Err(Error::HypothesisViolated(format!(
            "tail ratio unbounded in this mode (trailing max {:.3e} vs mid-grid max {:.3e})",
            report.decision.trailing_max, report.decision.mid_window_max
        )));
    }
    let trend = match report.decision.trailing_slope {
        _ if report.decision.trailing_max == 0.0 => Trend::Converged,
        Some(sl) if sl < -0.005 => Trend::Decreasing,
        Some(sl) if sl.abs() <= 0.02 => Trend::Converged,
        _ => Trend::Oscillating,
    };
    Ok(FormulaReport {
        value: report.tail_limsup_estimate,
        trend,
        vanishing: report.verdict_vanishing,
    })
}

/// Two-sided essential-norm estimate: witness lower bounds against the
/// tail-ratio formula, with the empirical comparability ratio.
#[derive(Clone, Debug, Serialize)]
pub struct EssNormBracket {
    #[serde(flatten)]
    pub mode: AlphaMode,
    pub lower_witness: f64,
    pub formula_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub lambda_grid: Vec<f64>,
    pub witnesses: Vec<f64>,
    pub closed_form_bounds: Vec<f64>,
    pub trend: Trend,
    pub collapses_to_zero: bool,
}

/// Compute the bracket over `lambda_grid` (default grid when empty).
pub fn essnorm_bracket(op: &HankelOperator, mode: AlphaMode, lambda_grid: &[f64]) -> Result<EssNormBracket> {
    let grid: Vec<f64> = if lambda_grid.is_empty() { default_lambda_grid() } else { lambda_grid.to_vec() };
    let formula = essnorm_formula(op.measure(), mode)?;

    let results = par::par_map(grid.clone(), |l| op.witness_lower_bound(mode, l));
    let mut witnesses = Vec::with_capacity(grid.len());
    let mut bounds = Vec::with_capacity(grid.len());
    for r in results {
        let w = r?;
        witnesses.push(w.witness);
        bounds.push(w.closed_form_bound);
    }
    let lower_witness = witnesses.iter().fold(0.0f64, |a, &b| a.max(b));
    let ratio = if formula.value > 1e-300 { Some(lower_witness / formula.value) } else { None };
    let first = witnesses.first().copied().unwrap_or(0.0);
    let last = witnesses.last().copied().unwrap_or(0.0);
    let collapses_to_zero = formula.vanishing && last <= first + 1e-12;
    Ok(EssNormBracket {
        mode,
        lower_witness,
        formula_value: formula.value,
        ratio,
        lambda_grid: grid,
        witnesses,
        closed_form_bounds: bounds,
        trend: formula.trend,
        collapses_to_zero,
    })
}
