//! Scalar bounds: the Erdős–Gallai edge bound, the closure size `m*`, the
//! quadratic form `g(x, y)`, the δ-condition with its case split, and the
//! lower bounds on the number of maximum matchings.
//!
//! Every branch condition is decided in exact integer or rational
//! arithmetic. In particular `ν ≤ 2/5 − 3/(5n)` is the integer test
//! `5s ≤ 2n − 3`.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::count::BigCount;
use crate::gallai_edmonds::{closure_size, stats, Decomposition};
use crate::graph::Graph;
use crate::rational::{ceil_i64, int, q, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, BoundsError> {
    Err(BoundsError::InvalidParameters(msg.into()))
}

fn c2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Which side of `ν = 2/5 − 3/(5n)` the pair `(n, s)` lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// `5s ≤ 2n − 3`: the bound is `s(n − s) + C(s, 2)`.
    Low,
    /// Otherwise: the bound is `C(2s + 1, 2)`.
    High,
}

pub fn branch(n: u64, s: u64) -> Branch {
    if 5 * s + 3 <= 2 * n {
        Branch::Low
    } else {
        Branch::High
    }
}

/// `m(n, ν)` with `νn = s`: the largest size of an `n`-vertex graph with
/// matching number `s`.
pub fn eg_max_size(n: u64, s: u64) -> Result<u64, BoundsError> {
    if 2 * s > n {
        return invalid(format!("2s = {} exceeds n = {n}", 2 * s));
    }
    Ok(match branch(n, s) {
        Branch::Low => s * (n - s) + c2(s),
        Branch::High => c2(2 * s + 1),
    })
}

/// False exactly when `2s = n ≥ 1`: then the formula gives `C(n + 1, 2)`,
/// more than any graph on `n` vertices has.
pub fn eg_bound_attained(n: u64, s: u64) -> bool {
    !(2 * s == n && n > 0)
}

/// `n (n − 1) ⋯ (n − k + 1)`.
pub fn falling_factorial(n: u64, k: u64) -> Result<BigCount, BoundsError> {
    if k > n {
        return invalid(format!("k = {k} exceeds n = {n}"));
    }
    Ok(BigCount::from((n - k + 1..=n).map(BigUint::from).product::<BigUint>()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtremalFamily {
    /// Complement of `K_{n−s} ∪ empty(s)`.
    I,
    /// `K_{2s+1} ∪ empty(n − 2s − 1)`.
    II,
}

/// Closed-form number of maximum matchings of an extremal graph.
pub fn extremal_count(family: ExtremalFamily, n: u64, s: u64) -> Result<BigCount, BoundsError> {
    match family {
        ExtremalFamily::I => {
            if 2 * s > n {
                return invalid(format!("family (i) needs 2s ≤ n, got n = {n}, s = {s}"));
            }
            falling_factorial(n - s, s)
        }
        ExtremalFamily::II => {
            if 2 * s + 1 > n {
                return invalid(format!("family (ii) needs 2s + 1 ≤ n, got n = {n}, s = {s}"));
            }
            // (2s + 1)! / (s! 2^s) = (2s + 1)(2s − 1)⋯3·1
            Ok(BigCount::from((0..=s).map(|i| BigUint::from(2 * i + 1)).product::<BigUint>()))
        }
    }
}

/// `C(d − k + 1, 2) + d·a + C(n − d, 2)`, the size of the densest graph
/// with `k` odd components spanning `d` vertices next to `a` vertices.
pub fn m_star(n: u64, d: u64, k: u64, a: u64) -> Result<u64, BoundsError> {
    if k > d || d + a > n {
        return invalid(format!("need k ≤ d ≤ n − a, got n = {n}, d = {d}, k = {k}, a = {a}"));
    }
    Ok(c2(d - k + 1) + d * a + c2(n - d))
}

fn g_raw(x: &Rational, y: &Rational, nu: &Rational, branch: Branch) -> Rational {
    let tail = y * (x * int(2) - y);
    match branch {
        Branch::Low => x * (int(1) - nu - x * q(3, 2)) + tail,
        Branch::High => (nu - x) * (nu * q(5, 2) + x * q(3, 2) - int(1)) + tail,
    }
}

/// `g(x, y)` on the requested branch, for `0 ≤ x ≤ ν` and `0 ≤ y ≤ 2x`.
pub fn g_value(x: &Rational, y: &Rational, nu: &Rational, branch: Branch) -> Result<Rational, BoundsError> {
    if x.is_negative() || x > nu || y.is_negative() || y > &(x * int(2)) {
        return invalid(format!("need 0 ≤ x ≤ ν and 0 ≤ y ≤ 2x, got x = {x}, y = {y}, ν = {nu}"));
    }
    Ok(g_raw(x, y, nu, branch))
}

/// Checks both quadratic identities behind `g` for the tuple `(n, s, a, d)`
/// with `k = n − 2s + a`:
///
/// ```text
/// s(n − s) + s²/2 − Q = g_low · n²,    2s² − Q = g_high · n²,
/// Q = (d − k)²/2 + d·a + (n − d)²/2.
/// ```
pub fn verify_lemma1_identity(n: u64, s: u64, a: u64, d: u64) -> Result<bool, BoundsError> {
    if n == 0 || 2 * s > n || a > s {
        return invalid(format!("need n ≥ 1, 2s ≤ n, a ≤ s; got n = {n}, s = {s}, a = {a}"));
    }
    let k = n - 2 * s + a;
    if k > d || d + a > n {
        return invalid(format!("need k ≤ d ≤ n − a with k = {k}; got d = {d}, a = {a}, n = {n}"));
    }
    let r = |v: u64| Rational::from_integer(BigInt::from(v));
    let (nr, sr, ar, dr, kr) = (r(n), r(s), r(a), r(d), r(k));
    let half = q(1, 2);
    let quad = (&dr - &kr) * (&dr - &kr) * &half + &dr * &ar + (&nr - &dr) * (&nr - &dr) * &half;
    let x = (&sr - &ar) / &nr;
    let y = (&dr - &kr) / &nr;
    let nu = &sr / &nr;
    let n2 = &nr * &nr;
    let low = &sr * (&nr - &sr) + &sr * &sr * &half - &quad == g_raw(&x, &y, &nu, Branch::Low) * &n2;
    let high = &sr * &sr * int(2) - &quad == g_raw(&x, &y, &nu, Branch::High) * &n2;
    Ok(low && high)
}

/// The case-split condition of the δ-lemma:
/// `(x ≥ δ ∨ ν ≥ 2/5 + 2δ/5) ∧ (x ≤ ν − δ ∨ ν ≤ 2/5 − 2δ/5 ∨ δ ≤ y ≤ 2ν − 3δ)`.
pub fn condition_e3_holds(x: &Rational, y: &Rational, nu: &Rational, delta: &Rational) -> Result<bool, BoundsError> {
    if !delta.is_positive() {
        return invalid(format!("δ must be positive, got {delta}"));
    }
    let two_fifths = q(2, 5);
    let shift = delta * q(2, 5);
    let first = x >= delta || nu >= &(&two_fifths + &shift);
    let second = x <= &(nu - delta)
        || nu <= &(&two_fifths - &shift)
        || (y >= delta && y <= &(nu * int(2) - delta * int(3)));
    Ok(first && second)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseLabel {
    /// The case-split condition holds.
    #[default]
    None,
    /// `x < δ` and `ν < 2/5 + 2δ/5`.
    Case1,
    /// `x > ν − δ`, `ν > 2/5 − 2δ/5` and `y < δ`.
    Case2,
    /// `x > ν − δ`, `ν > 2/5 − 2δ/5` and `y > 2ν − 3δ`.
    Case3,
}

/// Which case applies when the case-split condition fails; cases are tried in order.
pub fn classify_case(x: &Rational, y: &Rational, nu: &Rational, delta: &Rational) -> Result<CaseLabel, BoundsError> {
    if condition_e3_holds(x, y, nu, delta)? {
        return Ok(CaseLabel::None);
    }
    let shift = delta * q(2, 5);
    if x < delta && nu < &(q(2, 5) + &shift) {
        return Ok(CaseLabel::Case1);
    }
    let degenerate = x > &(nu - delta) && nu > &(q(2, 5) - &shift);
    if degenerate && y < delta {
        return Ok(CaseLabel::Case2);
    }
    if degenerate && y > &(nu * int(2) - delta * int(3)) {
        return Ok(CaseLabel::Case3);
    }
    unreachable!("the case-split condition fails at x = {x}, y = {y}, ν = {nu}, δ = {delta} but no case applies")
}

/// The largest admissible δ for the case analysis, `ν/25`.
pub fn default_delta(n: u64, s: u64) -> Option<Rational> {
    (n > 0 && s > 0).then(|| q(s as i64, 25 * n as i64))
}

/// Lower bound `⌈n/10⌉^{\underline{⌈s/10⌉}}` together with its hypothesis
/// `(ν/50)² n ≥ 1`, i.e. `s² ≥ 2500 n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem1Bound {
    pub applicable: bool,
    /// `⌊(ν/50)² n²⌋ = ⌊s²/2500⌋`: the deficiency the hypothesis allows.
    pub tolerance: u64,
    pub bound: BigCount,
    pub condition: String,
}

pub fn theorem1_bound(n: u64, s: u64) -> Result<Theorem1Bound, BoundsError> {
    if s == 0 || 2 * s > n {
        return invalid(format!("need 1 ≤ 2s ≤ n, got n = {n}, s = {s}"));
    }
    let applicable = s * s >= 2500 * n;
    Ok(Theorem1Bound {
        applicable,
        tolerance: s * s / 2500,
        bound: falling_factorial(n.div_ceil(10), s.div_ceil(10))?,
        condition: format!(
            "(ν/50)²n ≥ 1 ⇔ s² ≥ 2500n: {} {} {}",
            s * s,
            if applicable { "≥" } else { "<" },
            2500 * n
        ),
    })
}

/// Thresholds `h_ν(ε)` and `h_δ(ε, ν)` with the induced `γ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem2Params {
    #[serde(with = "crate::rational::json")]
    pub epsilon: Rational,
    #[serde(with = "crate::rational::json")]
    pub nu: Rational,
    #[serde(with = "crate::rational::json")]
    pub h_nu: Rational,
    #[serde(with = "crate::rational::json")]
    pub h_delta: Rational,
    #[serde(with = "crate::rational::json")]
    pub gamma: Rational,
}

fn check_epsilon(eps: &Rational) -> Result<(), BoundsError> {
    if !eps.is_positive() || eps >= &int(1) {
        return invalid(format!("ε must lie in (0, 1), got {eps}"));
    }
    Ok(())
}

/// `min{1/5, ε / (2(1 + (ε/2)(1 + ε/2)))}`.
pub fn h_nu(eps: &Rational) -> Result<Rational, BoundsError> {
    check_epsilon(eps)?;
    let e2 = eps * q(1, 2);
    let v = eps / (int(2) * (int(1) + &e2 * (int(1) + &e2)));
    Ok(v.min(q(1, 5)))
}

/// `t(ε) = 1 − ε/2 − (1 − ε)/(1 − ε/2)`; `√γ ≤ t` is the second
/// constraint on δ.
fn t_eps(eps: &Rational) -> Rational {
    let e2 = eps * q(1, 2);
    int(1) - &e2 - (int(1) - eps) / (int(1) - &e2)
}

/// `(1 − ε/2) ν (1 − (1 + ε/2) ν)`, so that `γ = δ / denom`.
fn gamma_denominator(eps: &Rational, nu: &Rational) -> Rational {
    let e2 = eps * q(1, 2);
    (int(1) - &e2) * nu * (int(1) - (int(1) + &e2) * nu)
}

/// `min{εν/8, t(ε)² (1 − ε/2) ν (1 − (1 + ε/2) ν)}`.
pub fn h_delta(eps: &Rational, nu: &Rational) -> Result<Rational, BoundsError> {
    check_epsilon(eps)?;
    if !nu.is_positive() || nu > &q(1, 2) {
        return invalid(format!("ν must lie in (0, 1/2], got {nu}"));
    }
    let t = t_eps(eps);
    Ok((eps * nu / int(8)).min(&t * &t * gamma_denominator(eps, nu)))
}

/// The constraint groups on `(ε, ν, δ)` needed by the proof, evaluated
/// exactly. Returns the name of the first violated constraint.
pub fn theorem2_constraints(eps: &Rational, nu: &Rational, delta: &Rational) -> Result<(), String> {
    let e2 = eps * q(1, 2);
    let cap = eps / (int(2) * (int(1) + &e2 * (int(1) + &e2)));
    if nu > &q(1, 5) || nu > &cap {
        return Err("ν ≤ min{1/5, ε/(2(1 + (ε/2)(1 + ε/2)))}".into());
    }
    if delta > &(eps * nu / int(8)) {
        return Err("δ ≤ εν/8".into());
    }
    if int(1) - (int(1) + &e2) * nu < int(1) - &e2 {
        return Err("1 − (1 + ε/2)ν ≥ 1 − ε/2".into());
    }
    // (1 − √γ − ε/2)(1 − ε/2) ≥ 1 − ε  ⇔  √γ ≤ t(ε).
    let denom = gamma_denominator(eps, nu);
    if !denom.is_positive() {
        return Err("(1 − ε/2)ν(1 − (1 + ε/2)ν) > 0".into());
    }
    let t = t_eps(eps);
    let gamma = delta / denom;
    if t.is_negative() || gamma > &t * &t {
        return Err("(1 − √γ − ε/2)(1 − ε/2) ≥ 1 − ε".into());
    }
    Ok(())
}

/// `h_ν(ε)`, `h_δ(ε, ν)` and `γ` for `ν < h_ν(ε)`. The returned δ is
/// checked against every constraint before it is handed out.
pub fn theorem2_thresholds(eps: &Rational, nu: &Rational) -> Result<Theorem2Params, BoundsError> {
    let hn = h_nu(eps)?;
    if !nu.is_positive() || nu >= &hn {
        return invalid(format!("need 0 < ν < h_ν(ε) = {hn}, got ν = {nu}"));
    }
    let hd = h_delta(eps, nu)?;
    if let Err(which) = theorem2_constraints(eps, nu, &hd) {
        panic!("h_δ({eps}, {nu}) = {hd} violates {which}");
    }
    let gamma = &hd / gamma_denominator(eps, nu);
    Ok(Theorem2Params { epsilon: eps.clone(), nu: nu.clone(), h_nu: hn, h_delta: hd, gamma })
}

/// `⌈(1 − ε)n⌉^{\underline{⌈(1 − ε)s⌉}}`.
pub fn theorem2_bound(n: u64, s: u64, eps: &Rational) -> Result<BigCount, BoundsError> {
    check_epsilon(eps)?;
    if 2 * s > n {
        return invalid(format!("2s = {} exceeds n = {n}", 2 * s));
    }
    let f = int(1) - eps;
    let top = ceil_i64(&(&f * int(n as i64))) as u64;
    let len = ceil_i64(&(&f * int(s as i64))) as u64;
    falling_factorial(top, len)
}

/// Every scalar attached to one graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u64,
    pub s: u64,
    pub m: u64,
    pub m_eg: u64,
    pub eg_attained: bool,
    pub branch: Branch,
    pub m_star: u64,
    pub m_closure: u64,
    /// `m_eg − m`.
    pub deficiency: i64,
    #[serde(with = "crate::rational::json")]
    pub x: Rational,
    #[serde(with = "crate::rational::json")]
    pub y: Rational,
    #[serde(with = "crate::rational::json::option")]
    pub delta: Option<Rational>,
    #[serde(with = "crate::rational::json")]
    pub g: Rational,
    /// `None` when δ is undefined (`s = 0`).
    pub case: Option<CaseLabel>,
    pub theorem1_applicable: bool,
    pub theorem1_tolerance: u64,
    pub theorem1_bound: BigCount,
}

/// Builds the report for `g` with its decomposition. `delta` defaults to
/// [`default_delta`].
pub fn bound_report(g: &Graph, dec: &Decomposition, delta: Option<Rational>) -> Result<BoundReport, BoundsError> {
    let st = stats(g, dec);
    let (n, s) = (st.n as u64, st.s as u64);
    let m_eg = eg_max_size(n, s)?;
    let br = branch(n, s);
    let nu = if n == 0 { Rational::zero() } else { q(s as i64, n as i64) };
    let delta = delta.or_else(|| default_delta(n, s));
    let case = match &delta {
        Some(dl) => Some(classify_case(&st.x, &st.y, &nu, dl)?),
        None => None,
    };
    let (t1_applicable, t1_tolerance, t1_bound) = match theorem1_bound(n, s) {
        Ok(t) => (t.applicable, t.tolerance, t.bound),
        Err(_) => (false, 0, BigCount::one()),
    };
    Ok(BoundReport {
        n,
        s,
        m: g.size() as u64,
        m_eg,
        eg_attained: eg_bound_attained(n, s),
        branch: br,
        m_star: m_star(n, st.d as u64, st.k as u64, st.a as u64)?,
        m_closure: closure_size(st.n, dec),
        deficiency: m_eg as i64 - g.size() as i64,
        g: g_value(&st.x, &st.y, &nu, br)?,
        x: st.x,
        y: st.y,
        delta,
        case,
        theorem1_applicable: t1_applicable,
        theorem1_tolerance: t1_tolerance,
        theorem1_bound: t1_bound,
    })
}

impl BoundReport {
    /// `m ≤ m(G*) ≤ m* ≤ m(n, ν)`.
    pub fn chain_holds(&self) -> bool {
        self.m <= self.m_closure && self.m_closure <= self.m_star && self.m_star <= self.m_eg
    }

    /// `m(n, ν) − m* ≥ g n² − n`.
    pub fn lemma1_holds(&self) -> bool {
        let n = int(self.n as i64);
        int(self.m_eg as i64 - self.m_star as i64) >= &self.g * &n * &n - n
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallai_edmonds::decompose;
    use crate::graph::{generate, GraphKind};
    use proptest::prelude::*;

    #[test]
    fn eg_examples() {
        assert_eq!(eg_max_size(10, 2), Ok(17));
        assert_eq!(eg_max_size(6, 2), Ok(10));
        assert_eq!(eg_max_size(7, 0), Ok(0));
        assert_eq!(eg_max_size(0, 0), Ok(0));
        assert!(eg_max_size(5, 3).is_err());
        assert!(eg_bound_attained(9, 2));
        assert!(!eg_bound_attained(6, 3));
        assert_eq!(eg_max_size(6, 3), Ok(21));
    }

    #[test]
    fn branches_agree_on_the_boundary() {
        for n in 0..500u64 {
            if n >= 2 && (2 * n - 3) % 5 == 0 {
                let s = (2 * n - 3) / 5;
                assert_eq!(s * (n - s) + c2(s), c2(2 * s + 1), "n = {n}");
                assert_eq!(branch(n, s), Branch::Low);
            }
        }
    }

    #[test]
    fn falling_factorials() {
        assert_eq!(falling_factorial(5, 2), Ok(20u64.into()));
        assert_eq!(falling_factorial(9, 0), Ok(1u64.into()));
        assert_eq!(falling_factorial(4, 4), Ok(24u64.into()));
        assert_eq!(falling_factorial(0, 0), Ok(1u64.into()));
        assert!(falling_factorial(3, 4).is_err());
    }

    #[test]
    fn extremal_counts() {
        assert_eq!(extremal_count(ExtremalFamily::I, 7, 2), Ok(20u64.into()));
        assert_eq!(extremal_count(ExtremalFamily::II, 3, 1), Ok(3u64.into()));
        assert_eq!(extremal_count(ExtremalFamily::II, 9, 1), Ok(3u64.into()));
        assert_eq!(extremal_count(ExtremalFamily::II, 5, 2), Ok(15u64.into()));
        assert!(extremal_count(ExtremalFamily::II, 4, 2).is_err());
        assert!(extremal_count(ExtremalFamily::I, 5, 3).is_err());
    }

    #[test]
    fn m_star_examples() {
        assert_eq!(m_star(5, 5, 1, 0), Ok(10));
        assert_eq!(m_star(3, 2, 2, 1), Ok(2));
        assert_eq!(m_star(4, 0, 0, 0), Ok(6));
        assert!(m_star(4, 1, 2, 0).is_err());
        assert!(m_star(4, 3, 1, 2).is_err());
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_value(&int(0), &int(0), &q(1, 3), Branch::Low), Ok(int(0)));
        assert_eq!(g_value(&q(1, 10), &q(1, 10), &q(1, 5), Branch::Low), Ok(q(3, 40)));
        assert_eq!(g_value(&q(2, 5), &q(1, 20), &q(9, 20), Branch::High), Ok(q(59, 800)));
        assert!(g_value(&q(1, 2), &int(0), &q(1, 5), Branch::Low).is_err());
        assert!(g_value(&q(1, 10), &q(1, 2), &q(1, 5), Branch::Low).is_err());
    }

    #[test]
    fn identity_examples() {
        assert_eq!(verify_lemma1_identity(10, 3, 2, 8), Ok(true));
        assert_eq!(verify_lemma1_identity(5, 2, 0, 5), Ok(true));
        assert!(verify_lemma1_identity(10, 3, 2, 5).is_err());
        assert!(verify_lemma1_identity(10, 3, 4, 8).is_err());
        // Both sides of the low identity at (10, 3, 2, 8) equal 11/2.
        let (x, y, nu) = (q(1, 10), q(1, 5), q(3, 10));
        assert_eq!(g_raw(&x, &y, &nu, Branch::Low) * int(100), q(11, 2));
    }

    #[test]
    fn condition_examples() {
        let d = q(1, 20);
        assert_eq!(condition_e3_holds(&q(1, 10), &q(1, 10), &q(1, 5), &d), Ok(true));
        assert_eq!(condition_e3_holds(&int(0), &int(0), &q(1, 5), &d), Ok(false));
        assert!(condition_e3_holds(&int(0), &int(0), &q(1, 5), &int(0)).is_err());
        assert!(condition_e3_holds(&int(0), &int(0), &q(1, 5), &q(-1, 5)).is_err());
    }

    #[test]
    fn case_examples() {
        assert_eq!(classify_case(&q(1, 100), &int(0), &q(1, 5), &q(1, 20)), Ok(CaseLabel::Case1));
        let (x, nu, d) = (q(9, 20), q(9, 20), q(1, 100));
        assert_eq!(classify_case(&x, &q(1, 200), &nu, &d), Ok(CaseLabel::Case2));
        assert_eq!(classify_case(&x, &q(22, 25), &nu, &d), Ok(CaseLabel::Case3));
        // At y = δ or y = 2ν − 3δ the case-split condition still holds.
        assert_eq!(classify_case(&x, &q(1, 100), &nu, &d), Ok(CaseLabel::None));
        assert_eq!(classify_case(&x, &q(87, 100), &nu, &d), Ok(CaseLabel::None));
        assert_eq!(classify_case(&q(1, 10), &q(1, 10), &q(1, 5), &q(1, 20)), Ok(CaseLabel::None));
    }

    #[test]
    fn theorem1_examples() {
        let t = theorem1_bound(100, 20).unwrap();
        assert_eq!(t.bound, 90u64.into());
        assert!(!t.applicable);
        let t = theorem1_bound(10, 1).unwrap();
        assert_eq!(t.bound, 1u64.into());
        assert!(!t.applicable);
        let t = theorem1_bound(10_000, 5_000).unwrap();
        assert!(t.applicable);
        assert_eq!(t.tolerance, 10_000);
        assert!(!theorem1_bound(10_002, 5_000).unwrap().applicable);
        assert!(theorem1_bound(10, 0).is_err());
    }

    #[test]
    fn theorem2_examples() {
        assert_eq!(h_nu(&q(1, 2)), Ok(q(4, 21)));
        assert_eq!(h_delta(&q(1, 2), &q(1, 10)), Ok(q(7, 15360)));
        let p = theorem2_thresholds(&q(1, 2), &q(1, 10)).unwrap();
        assert_eq!(p.h_delta, q(7, 15360));
        assert!(theorem2_constraints(&q(1, 2), &q(1, 10), &p.h_delta).is_ok());
        assert!(theorem2_constraints(&q(1, 2), &q(1, 10), &(&p.h_delta + q(1, 1_000_000))).is_err());
        assert_eq!(theorem2_bound(100, 10, &q(1, 2)), falling_factorial(50, 5));
        assert!(theorem2_thresholds(&q(1, 2), &q(1, 5)).is_err());
        assert!(h_nu(&int(1)).is_err());
        assert!(h_nu(&int(0)).is_err());
    }

    #[test]
    fn report_for_small_graphs() {
        let g = generate(GraphKind::ExtremalI { n: 9, s: 2 }).unwrap();
        let r = bound_report(&g, &decompose(&g), None).unwrap();
        assert_eq!((r.m, r.m_eg, r.deficiency), (15, 15, 0));
        assert!(r.chain_holds() && r.lemma1_holds());
        assert_eq!(r.delta, Some(q(2, 225)));
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["x"], serde_json::json!({"num": 0, "den": 1}));
        assert_eq!(json["theorem1_bound"], serde_json::json!("1"));
        let e = Graph::empty(4);
        let r = bound_report(&e, &decompose(&e), None).unwrap();
        assert_eq!(r.case, None);
    }

    proptest! {
        #[test]
        fn identities_hold(n in 1u64..400, s_raw in 0u64..200, a_raw in 0u64..200, d_raw in 0u64..400) {
            let s = s_raw % (n / 2 + 1);
            let a = a_raw % (s + 1);
            let k = n - 2 * s + a;
            prop_assume!(k + a <= n);
            let d = k + d_raw % (n - a - k + 1);
            prop_assert_eq!(verify_lemma1_identity(n, s, a, d), Ok(true));
        }

        #[test]
        fn theorem2_self_check(en in 1i64..100, nn in 1i64..1000) {
            let eps = q(en, 100);
            let hn = h_nu(&eps).unwrap();
            let nu = &hn * q(nn, 1000);
            let p = theorem2_thresholds(&eps, &nu).unwrap();
            prop_assert!(p.h_delta.is_positive());
            prop_assert!(theorem2_constraints(&eps, &nu, &p.h_delta).is_ok());
        }

        #[test]
        fn classification_is_total(xn in 0i64..50, yn in 0i64..100, nn in 1i64..50, dn in 1i64..20) {
            let (x, y, nu, dl) = (q(xn, 100), q(yn, 100), q(nn, 100), q(dn, 100));
            let label = classify_case(&x, &y, &nu, &dl).unwrap();
            prop_assert_eq!(label == CaseLabel::None, condition_e3_holds(&x, &y, &nu, &dl).unwrap());
        }
    }
}
