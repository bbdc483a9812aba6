//! Scripted numerical suites: each turns one of the boundedness /
//! compactness theorems into a list of named checks over the default
//! measure family matrix, with verdicts that are deterministic (fixed
//! grids, fixed truncations, fixed reduction order).

use serde::Serialize;

use crate::analytic::{
    bloch_norm, bmoa_norm, coeff_bloch_test, dyadic_block_seminorm, multiplier_l2inf_to_l1_check,
    test_function_power, PowerSeries,
};
use crate::error::{Error, Result};
use crate::measure::{CarlesonGridSpec, Measure};
use crate::operator::{essnorm_bracket, essnorm_formula, AlphaMode, HankelOperator};

/// Witness sequence classification thresholds.
const DIVERGENT_FACTOR: f64 = 2.0;
const ZERO_FRACTION: f64 = 0.2;
/// Stability demanded of fitted comparability constants (factor 2 = the
/// paper's unspecified "~" constants must at least agree in order of
/// magnitude across families).
const COMPARABILITY_LN_BAND: f64 = std::f64::consts::LN_2;

/// One named check inside a suite. `expected` / `observed` are
/// pre-formatted strings so the JSON report is bit-stable.
#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub expected: String,
    pub observed: String,
    pub tolerance: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteVerdict {
    pub suite_id: String,
    pub params: String,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl SuiteVerdict {
    fn new(suite_id: &str, params: String) -> SuiteVerdict {
        SuiteVerdict { suite_id: suite_id.to_string(), params, checks: Vec::new(), pass: true }
    }

    fn record(&mut self, name: String, expected: String, observed: String, tolerance: &str, pass: bool) {
        self.pass &= pass;
        self.checks.push(CheckRecord { name, expected, observed, tolerance: tolerance.to_string(), pass });
    }

    fn check_bool(&mut self, name: String, expected: bool, observed: bool) {
        self.record(name, expected.to_string(), observed.to_string(), "exact", expected == observed);
    }

    fn check_le(&mut self, name: String, observed: f64, limit: f64) {
        self.record(name, format!("<= {}", fmt(limit)), fmt(observed), "bound", observed <= limit);
    }
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

// ---------------------------------------------------------------------------
// Family matrix and the analytic phase oracle
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub enum FamilyKind {
    PowerLog { beta: f64, gamma: f64 },
    Atom,
}

#[derive(Clone, Debug)]
pub struct Family {
    pub label: String,
    pub measure: Measure,
    pub kind: FamilyKind,
}

/// Default matrix: beta in {0.5, 1, 1.5, 2, 2.5, 3} x gamma in {-2, 0},
/// plus a single atom at 1/2.
pub fn default_families() -> Vec<Family> {
    let mut out = Vec::new();
    for &beta in &[0.5, 1.0, 1.5, 2.0, 2.5, 3.0] {
        for &gamma in &[-2.0, 0.0] {
            out.push(Family {
                label: format!("power_log beta={beta} gamma={gamma}"),
                measure: Measure::power_log(1.0, beta, gamma).expect("valid family"),
                kind: FamilyKind::PowerLog { beta, gamma },
            });
        }
    }
    out.push(Family {
        label: "atom t=0.5 c=1".to_string(),
        measure: Measure::atoms(vec![(0.5, 1.0)]).expect("valid atom"),
        kind: FamilyKind::Atom,
    });
    out
}

/// Exact phase classification of the tail ratio
/// `mu([r,1)) log^q(e/(1-r)) / (1-r)^s` for the family parameters:
/// the ratio behaves like `(1-r)^{beta-s} log^{gamma+q}(e/(1-r))`.
pub fn oracle_bounded(kind: FamilyKind, s: f64, q: f64) -> bool {
    match kind {
        FamilyKind::Atom => true,
        FamilyKind::PowerLog { beta, gamma } => beta > s || (beta == s && gamma + q <= 0.0),
    }
}

pub fn oracle_vanishing(kind: FamilyKind, s: f64, q: f64) -> bool {
    match kind {
        FamilyKind::Atom => true,
        FamilyKind::PowerLog { beta, gamma } => beta > s || (beta == s && gamma + q < 0.0),
    }
}

/// Classify a witness sequence along a deepening lambda grid.
fn classify_witnesses(ws: &[f64]) -> &'static str {
    let first = ws.first().copied().unwrap_or(0.0);
    let last = ws.last().copied().unwrap_or(0.0);
    let max = ws.iter().fold(0.0f64, |a, &b| a.max(b));
    if max == 0.0 || last <= ZERO_FRACTION * max {
        "zero"
    } else if last >= DIVERGENT_FACTOR * first && last >= max * (1.0 - 1e-12) {
        "divergent"
    } else {
        "bounded"
    }
}

/// Extended lambda grid for witness classification (the default bracket
/// grid is too shallow to separate slow divergence from a plateau).
fn classification_lambda_grid() -> Vec<f64> {
    (1..=10).map(|i| 1.0 - (2.0f64).powi(-2 * i)).collect()
}

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

/// Carleson measure <=> boundedness B^alpha -> BMOA (0 < alpha < 1):
/// verdicts against the phase oracle, BMOA/Bloch ratio stability on the
/// bounded gamma=0 families, compactness surrogate on deepening
/// witnesses, and the coefficient test on the non-Carleson families.
pub fn suite_t2_3(alpha: f64) -> Result<SuiteVerdict> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("suite T2.3 requires alpha in (0,1), got {alpha}")));
    }
    let mut v = SuiteVerdict::new("T2.3", format!("alpha={alpha}"));
    let grid = CarlesonGridSpec::default();

    for fam in default_families() {
        let rep = fam.measure.carleson_report(1.0, 0.0, &grid)?;
        let want = oracle_bounded(fam.kind, 1.0, 0.0);
        v.check_bool(format!("{}: carleson verdict", fam.label), want, rep.verdict_bounded);

        if want {
            // compactness surrogate: image witnesses on the weakly-null family
            let op = HankelOperator::new(fam.measure.clone(), 8)?;
            let ws: Vec<f64> = [0.5, 0.9, 0.99, 0.999]
                .iter()
                .map(|&l| op.power_family_witness(l, alpha))
                .collect::<Result<_>>()?;
            let max = ws.iter().fold(0.0f64, |a, &b| a.max(b));
            v.check_le(
                format!("{}: image witness decay (last/max)", fam.label),
                if max > 0.0 { ws[ws.len() - 1] / max } else { 0.0 },
                ZERO_FRACTION,
            );
        } else {
            // Theorem 2.3 failure route: sup n mu_n must look unbounded
            let table = fam.measure.moment_table(4096)?;
            let series = PowerSeries::polynomial(table.values());
            let rep = coeff_bloch_test(&series)?;
            v.check_bool(format!("{}: sup n*mu_n bounded", fam.label), false, rep.bounded);
        }
    }

    // BMOA/Bloch-alpha witness ratios on the bounded gamma = 0 families:
    // within one family the ratio must be stable in lambda (across
    // families it scales with the operator norm and is not comparable).
    let trunc = 512;
    for fam in default_families() {
        let keep = match fam.kind {
            FamilyKind::PowerLog { gamma, .. } => gamma == 0.0 && oracle_bounded(fam.kind, 1.0, 0.0),
            FamilyKind::Atom => true,
        };
        if !keep {
            continue;
        }
        let op = HankelOperator::new(fam.measure.clone(), trunc)?;
        let mut ratios = Vec::new();
        for lambda in [0.5, 0.9] {
            let f = test_function_power(lambda, alpha, trunc)?;
            let image = op.apply_coeff(&f)?;
            let num = bmoa_norm(&image)?.value;
            let den = bloch_norm(&f, alpha)?.value;
            ratios.push(num / den);
        }
        // bounded operator: the ratio must not grow as lambda deepens
        // (decay is fine; the witness family is weakly null)
        v.check_le(
            format!("{}: bmoa/bloch ratio non-growth (r2/r1)", fam.label),
            ratios[1] / ratios[0],
            1.1,
        );
    }
    Ok(v)
}

/// alpha-Carleson <=> boundedness B^alpha -> B (alpha > 1): verdicts,
/// witness classification, the integrability guard, and the multiplier
/// and moment-decay subchecks.
pub fn suite_t3_5(alpha: f64) -> Result<SuiteVerdict> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("suite T3.5 requires alpha > 1, got {alpha}")));
    }
    let mut v = SuiteVerdict::new("T3.5", format!("alpha={alpha}"));
    let grid = CarlesonGridSpec::default();

    for fam in default_families() {
        let rep = fam.measure.carleson_report(alpha, 0.0, &grid)?;
        let bounded = oracle_bounded(fam.kind, alpha, 0.0);
        let vanishing = oracle_vanishing(fam.kind, alpha, 0.0);
        v.check_bool(format!("{}: alpha-carleson verdict", fam.label), bounded, rep.verdict_bounded);

        // Witness classification along the deepening lambda grid.
        let op = HankelOperator::new(fam.measure.clone(), 8)?;
        let ws: Vec<f64> = classification_lambda_grid()
            .into_iter()
            .map(|l| Ok(op.witness_lower_bound(AlphaMode::Power { alpha }, l)?.witness))
            .collect::<Result<_>>()?;
        let expected = if !bounded {
            "divergent"
        } else if vanishing {
            "zero"
        } else {
            "bounded"
        };
        v.record(
            format!("{}: witness classification", fam.label),
            expected.to_string(),
            classify_witnesses(&ws).to_string(),
            "exact",
            classify_witnesses(&ws) == expected,
        );

        // Lemma 3.1 guard: int (1-t)^{1-alpha} dmu finite.
        let guard_ok = fam.measure.transform_weight(1.0 - alpha, 0.0).is_ok();
        let guard_want = match fam.kind {
            FamilyKind::Atom => true,
            FamilyKind::PowerLog { beta, .. } => beta > alpha - 1.0,
        };
        v.check_bool(format!("{}: lemma 3.1 integrability guard", fam.label), guard_want, guard_ok);

        // Multiplier criterion with lambda_k = mu_k k^{alpha-1}; the block
        // l2 norms scale like 2^{n(alpha - 1/2 - beta)} n^gamma.
        let n_mult = 1usize << 13;
        let table = fam.measure.moment_table(n_mult)?;
        let lam: Vec<f64> = (0..=n_mult)
            .map(|k| if k == 0 { 0.0 } else { table.value(k) * (k as f64).powf(alpha - 1.0) })
            .collect();
        let mult = multiplier_l2inf_to_l1_check(&lam);
        let mult_want = match fam.kind {
            FamilyKind::Atom => true,
            FamilyKind::PowerLog { beta, gamma } => {
                let e = alpha - 0.5 - beta;
                e < 0.0 || (e == 0.0 && gamma < -1.0)
            }
        };
        v.check_bool(format!("{}: multiplier criterion finite", fam.label), mult_want, mult.finite);

        // Moment decay mu_n <~ n^{-alpha}.
        let decay = fam.measure.moment_decay_check(alpha, 4096)?;
        let decay_want = match fam.kind {
            FamilyKind::Atom => true,
            FamilyKind::PowerLog { beta, gamma } => beta > alpha || (beta == alpha && gamma <= 0.0),
        };
        v.check_bool(format!("{}: moment decay n^alpha mu_n bounded", fam.label), decay_want, decay.pass);
    }
    Ok(v)
}

/// Essential norm bracket (alpha > 1): vanishing <=> bracket collapse on
/// the bounded families, hypothesis violation on the unbounded ones, and
/// comparability-constant stability across the critical families.
pub fn suite_t3_6_t3_7(alpha: f64) -> Result<SuiteVerdict> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("suite T3.6/T3.7 requires alpha > 1, got {alpha}")));
    }
    let mut v = SuiteVerdict::new("T3.6/T3.7", format!("alpha={alpha}"));
    let mode = AlphaMode::Power { alpha };

    for fam in default_families() {
        let bounded = oracle_bounded(fam.kind, alpha, 0.0);
        if bounded {
            let op = HankelOperator::new(fam.measure.clone(), 8)?;
            let bracket = essnorm_bracket(&op, mode, &[])?;
            let vanishing = oracle_vanishing(fam.kind, alpha, 0.0);
            v.check_bool(
                format!("{}: bracket collapses <=> vanishing", fam.label),
                vanishing,
                bracket.collapses_to_zero,
            );
            for (w, b) in bracket.witnesses.iter().zip(&bracket.closed_form_bounds) {
                if w < &(b - 1e-6) {
                    v.check_bool(format!("{}: witness >= closed-form bound", fam.label), true, false);
                }
            }
        } else {
            let violated = matches!(essnorm_formula(&fam.measure, mode), Err(Error::HypothesisViolated(_)));
            v.check_bool(format!("{}: formula reports hypothesis violation", fam.label), true, violated);
        }
    }

    // Comparability-constant stability across critical families
    // (beta = alpha' at alpha' in {alpha, 1.25 alpha}).
    let mut ratios = Vec::new();
    for a in [alpha, 1.25 * alpha] {
        let m = Measure::power_log(1.0, a, 0.0)?;
        let op = HankelOperator::new(m, 8)?;
        let bracket = essnorm_bracket(&op, AlphaMode::Power { alpha: a }, &[])?;
        let ratio = bracket.ratio.ok_or_else(|| {
            Error::HypothesisViolated("critical family has zero formula value".into())
        })?;
        ratios.push(ratio);
    }
    let spread = (ratios[0] / ratios[1]).ln().abs();
    v.record(
        "comparability constant stability |ln(c1/c2)|".to_string(),
        format!("<= {}", fmt(COMPARABILITY_LN_BAND)),
        fmt(spread),
        "bound",
        spread <= COMPARABILITY_LN_BAND,
    );
    Ok(v)
}

/// Logarithmic case: 1-log-1-Carleson verdicts, log-mode brackets, and
/// the Lemma 4.1 transform equivalence.
pub fn suite_t4_3() -> Result<SuiteVerdict> {
    let mut v = SuiteVerdict::new("T4.3", "log mode".to_string());
    let grid = CarlesonGridSpec::default();

    for fam in default_families() {
        let rep = fam.measure.carleson_report(1.0, 1.0, &grid)?;
        let bounded = oracle_bounded(fam.kind, 1.0, 1.0);
        v.check_bool(format!("{}: log-carleson verdict", fam.label), bounded, rep.verdict_bounded);

        if bounded {
            let op = HankelOperator::new(fam.measure.clone(), 8)?;
            let bracket = essnorm_bracket(&op, AlphaMode::Log, &[])?;
            let vanishing = oracle_vanishing(fam.kind, 1.0, 1.0);
            v.check_bool(
                format!("{}: log bracket collapses <=> vanishing", fam.label),
                vanishing,
                bracket.collapses_to_zero,
            );
        } else {
            let violated = matches!(essnorm_formula(&fam.measure, AlphaMode::Log), Err(Error::HypothesisViolated(_)));
            v.check_bool(format!("{}: log formula reports hypothesis violation", fam.label), true, violated);
        }

        // Lemma 4.1: mu is (1-log-1)-Carleson iff dv = log(e/(1-t)) dmu
        // is 1-Carleson.
        let transformed = fam.measure.transform_weight(0.0, 1.0)?;
        let trep = transformed.carleson_report(1.0, 0.0, &grid)?;
        v.check_bool(
            format!("{}: lemma 4.1 transform equivalence", fam.label),
            rep.verdict_bounded,
            trep.verdict_bounded,
        );
    }
    Ok(v)
}

/// Corollary 2.4 (0 < alpha < 1): on Carleson families the essential-norm
/// surrogate witnesses vanish along the weakly-null power family.
pub fn suite_c2_4(alpha: f64) -> Result<SuiteVerdict> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("suite C2.4 requires alpha in (0,1), got {alpha}")));
    }
    let mut v = SuiteVerdict::new("C2.4", format!("alpha={alpha}"));
    for fam in default_families() {
        if !oracle_bounded(fam.kind, 1.0, 0.0) {
            continue;
        }
        let op = HankelOperator::new(fam.measure.clone(), 8)?;
        let ws: Vec<f64> = [0.5, 0.9, 0.99, 0.999]
            .iter()
            .map(|&l| op.power_family_witness(l, alpha))
            .collect::<Result<_>>()?;
        let max = ws.iter().fold(0.0f64, |a, &b| a.max(b));
        v.check_le(
            format!("{}: witness decay (last/max)", fam.label),
            if max > 0.0 { ws[ws.len() - 1] / max } else { 0.0 },
            ZERO_FRACTION,
        );
    }
    Ok(v)
}

/// Lemma 3.2: mu alpha-Carleson <=> dv = (1-t)^{1-alpha} dmu 1-Carleson,
/// over beta in {alpha/2, alpha, 2 alpha}. A transform that fails the
/// integrability requirement is read as "v unbounded".
pub fn suite_l3_2(alpha: f64) -> Result<SuiteVerdict> {
    if !(alpha > 1.0) {
        return Err(Error::Domain(format!("suite L3.2 requires alpha > 1, got {alpha}")));
    }
    let mut v = SuiteVerdict::new("L3.2", format!("alpha={alpha}"));
    let grid = CarlesonGridSpec::default();
    for factor in [0.5, 1.0, 2.0] {
        let beta = factor * alpha;
        let m = Measure::power_log(1.0, beta, 0.0)?;
        let lhs = m.carleson_report(alpha, 0.0, &grid)?.verdict_bounded;
        let rhs = match m.transform_weight(1.0 - alpha, 0.0) {
            Ok(trans) => trans.carleson_report(1.0, 0.0, &grid)?.verdict_bounded,
            Err(Error::NonIntegrable(_)) => false,
            Err(e) => return Err(e),
        };
        v.check_bool(format!("beta={beta}: alpha-carleson <=> transformed carleson"), lhs, rhs);
    }
    Ok(v)
}

/// Lemma 3.3: dyadic block seminorm <= C * Bloch-alpha norm on the power
/// family, with the fitted C stable when the deepest lambda column is
/// added (the fit is dominated by moderate lambda).
pub fn suite_l3_3() -> Result<SuiteVerdict> {
    let mut v = SuiteVerdict::new("L3.3", "power family".to_string());
    let mut ratios = Vec::new();
    for &alpha in &[1.5, 2.0, 3.0] {
        for &lambda in &[0.5, 0.9, 0.99] {
            let f = test_function_power(lambda, alpha, 2048)?;
            let block = dyadic_block_seminorm(&f, alpha)?.sup;
            let bloch = bloch_norm(&f, alpha)?.value;
            ratios.push((lambda, alpha, block / bloch));
        }
    }
    let c_full = ratios.iter().map(|r| r.2).fold(0.0f64, f64::max);
    let c_sub = ratios.iter().filter(|r| r.0 < 0.99).map(|r| r.2).fold(0.0f64, f64::max);
    v.record(
        "fitted C stability under lambda-grid extension".to_string(),
        "<= 2.0e-1".to_string(),
        fmt((c_full - c_sub) / c_full),
        "relative",
        (c_full - c_sub) / c_full <= 0.2,
    );
    for (lambda, alpha, r) in &ratios {
        if *r > c_full {
            v.check_bool(format!("ratio lambda={lambda} alpha={alpha} within fit"), true, false);
        }
    }
    // explicit case: f = 1/(1-z) at alpha = 2 has block sup 1/2
    let rep = dyadic_block_seminorm(&PowerSeries::geometric(4096), 2.0)?;
    v.record(
        "block sup of 1/(1-z) at alpha=2".to_string(),
        fmt(0.5),
        fmt(rep.sup),
        "1e-12",
        (rep.sup - 0.5).abs() <= 1e-12,
    );
    Ok(v)
}

/// Lemma 4.1 equivalence over gamma in {-2, -1, 0} at beta = 1.
pub fn suite_l4_1() -> Result<SuiteVerdict> {
    let mut v = SuiteVerdict::new("L4.1", "beta=1".to_string());
    let grid = CarlesonGridSpec::default();
    for &gamma in &[-2.0, -1.0, 0.0] {
        let m = Measure::power_log(1.0, 1.0, gamma)?;
        let lhs = m.carleson_report(1.0, 1.0, &grid)?.verdict_bounded;
        let rhs = m.transform_weight(0.0, 1.0)?.carleson_report(1.0, 0.0, &grid)?.verdict_bounded;
        v.check_bool(format!("gamma={gamma}: log-carleson <=> transformed carleson"), lhs, rhs);
    }
    Ok(v)
}

/// Known suite identifiers, in report order.
pub const SUITE_IDS: [&str; 8] = ["T2.3", "T3.5", "T3.6/T3.7", "T4.3", "C2.4", "L3.2", "L3.3", "L4.1"];

/// Run one suite by id. `alpha` overrides the default mode parameter
/// (0.5 for the alpha < 1 suites, 2 for the alpha > 1 suites).
pub fn run_suite(id: &str, alpha: Option<f64>) -> Result<SuiteVerdict> {
    match id {
        "T2.3" => suite_t2_3(alpha.unwrap_or(0.5)),
        "T3.5" => suite_t3_5(alpha.unwrap_or(2.0)),
        "T3.6" | "T3.7" | "T3.6/T3.7" => suite_t3_6_t3_7(alpha.unwrap_or(2.0)),
        "T4.3" => suite_t4_3(),
        "C2.4" => suite_c2_4(alpha.unwrap_or(0.5)),
        "L3.2" => suite_l3_2(alpha.unwrap_or(2.0)),
        "L3.3" => suite_l3_3(),
        "L4.1" => suite_l4_1(),
        other => Err(Error::Config(format!("unknown suite id '{other}'"))),
    }
}

/// Run every suite with default parameters.
pub fn run_all() -> Result<Vec<SuiteVerdict>> {
    SUITE_IDS.iter().map(|id| run_suite(id, None)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_suite_passes(v: &SuiteVerdict) {
        for c in &v.checks {
            assert!(
                c.pass,
                "{} / {}: expected {}, observed {}",
                v.suite_id, c.name, c.expected, c.observed
            );
        }
        assert!(v.pass);
    }

    #[test]
    fn t3_5_passes() {
        assert_suite_passes(&suite_t3_5(2.0).unwrap());
    }

    #[test]
    fn t3_6_t3_7_passes() {
        assert_suite_passes(&suite_t3_6_t3_7(2.0).unwrap());
    }

    #[test]
    fn t4_3_passes() {
        assert_suite_passes(&suite_t4_3().unwrap());
    }

    #[test]
    fn c2_4_passes() {
        assert_suite_passes(&suite_c2_4(0.5).unwrap());
    }

    #[test]
    fn lemma_suites_pass() {
        assert_suite_passes(&suite_l3_2(2.0).unwrap());
        assert_suite_passes(&suite_l3_3().unwrap());
        assert_suite_passes(&suite_l4_1().unwrap());
    }

    #[test]
    fn unknown_suite_rejected() {
        assert!(run_suite("T9.9", None).is_err());
    }

    #[test]
    fn t2_3_passes() {
        assert_suite_passes(&suite_t2_3(0.5).unwrap());
    }

    #[test]
    fn verdict_json_deterministic() {
        let a = serde_json::to_string(&suite_l4_1().unwrap()).unwrap();
        let b = serde_json::to_string(&suite_l4_1().unwrap()).unwrap();
        assert_eq!(a, b);
    }
}
