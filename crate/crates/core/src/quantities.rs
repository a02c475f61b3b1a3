//! Signal strength, ambiguity level, excess risk and signal transfer risk,
//! together with the closed-form ambiguity bounds they are checked against.

use crate::error::{domain, Error, Result};
use crate::model::{bayes_rule, plug_in, source_bayes_rule, DecisionRule, Label, Origin, ProblemParams, Scenario};
use crate::rng::rng_from_seed;
use crate::scalar::Scalar;

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub n: usize,
}

impl McEstimate {
    /// `estimate ± k·SE` contains `value`.
    pub fn covers(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.std_error
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct Welford {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Welford {
    #[inline]
    pub(crate) fn push(&mut self, v: f64) {
        self.n += 1;
        let delta = v - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (v - self.mean);
    }

    pub(crate) fn finish(&self) -> McEstimate {
        let var = if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        };
        McEstimate {
            estimate: self.mean,
            std_error: (var / self.n.max(1) as f64).sqrt(),
            n: self.n,
        }
    }
}

/// Average of `f(X)` over `n` draws of `X` from the covariate law of `origin`.
fn mc_mean<S, F>(scenario: &S, origin: Origin, n: usize, seed: u64, mut f: F) -> Result<McEstimate>
where
    S: Scenario + ?Sized,
    F: FnMut(&[f64]) -> f64,
{
    if n == 0 {
        return Err(domain("Monte-Carlo sample size must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let mut x = vec![0.0; scenario.dim()];
    let mut acc = Welford::default();
    for _ in 0..n {
        scenario.sample_covariate(origin, &mut rng, &mut x);
        acc.push(f(&x));
    }
    Ok(acc.finish())
}

/// Usable source signal at a point: `|eta_P - 1/2|` when `eta_P` lies on the
/// same side of `1/2` as `eta_Q` (with `sgn(0) = 0`), else `0`.
pub fn signal_strength<T: Scalar>(eta_q: T, eta_p: T) -> Result<T> {
    let unit = |v: T| v >= T::zero() && v <= T::one();
    if !unit(eta_q) || !unit(eta_p) {
        return Err(domain("regression values must lie in [0, 1]"));
    }
    Ok(signal_strength_unchecked(eta_q, eta_p))
}

#[inline]
pub(crate) fn signal_strength_unchecked<T: Scalar>(eta_q: T, eta_p: T) -> T {
    let h = T::half();
    let sign_q = if eta_q > h {
        T::one()
    } else if eta_q < h {
        -T::one()
    } else {
        T::zero()
    };
    if sign_q * (eta_p - h) >= T::zero() {
        (eta_p - h).abs()
    } else {
        T::zero()
    }
}

/// `2 E_Q[|eta_Q - 1/2| 1{rule(X) != f*_Q(X)}]` by Monte Carlo over `X ~ Q_X`.
pub fn excess_risk_mc<S, R>(rule: &R, scenario: &S, n: usize, seed: u64) -> Result<McEstimate>
where
    S: Scenario + ?Sized,
    R: DecisionRule<f64> + ?Sized,
{
    mc_mean(scenario, Origin::Target, n, seed, |x| {
        let eta = scenario.eta_q(x);
        if rule.predict(x) != plug_in(eta) {
            2.0 * (eta - 0.5).abs()
        } else {
            0.0
        }
    })
}

/// `Q(Y != rule(X)) - Q(Y != f*_Q(X))` estimated from sampled labels; an
/// independent route to the excess risk.
pub fn risk_difference_mc<S, R>(rule: &R, scenario: &S, n: usize, seed: u64) -> Result<McEstimate>
where
    S: Scenario + ?Sized,
    R: DecisionRule<f64> + ?Sized,
{
    use rand::Rng as _;
    let mut label_rng = rng_from_seed(seed ^ 0x5DEE_CE66_D1CE_4E5B);
    mc_mean(scenario, Origin::Target, n, seed, |x| {
        let eta = scenario.eta_q(x);
        let y: Label = Label::from(label_rng.random::<f64>() < eta);
        let rule_err = f64::from(u8::from(rule.predict(x) != y));
        let bayes_err = f64::from(u8::from(plug_in(eta) != y));
        rule_err - bayes_err
    })
}

/// Ambiguity level at `z`:
/// `E_Q[|eta_Q - 1/2| 1{s(X) <= C_gamma |eta_Q - 1/2|^gamma, |eta_Q - 1/2| <= z}]`.
pub fn ambiguity_level_mc<S>(
    scenario: &S,
    z: f64,
    gamma: f64,
    c_gamma: f64,
    n: usize,
    seed: u64,
) -> Result<McEstimate>
where
    S: Scenario + ?Sized,
{
    if !(0.0..=0.5).contains(&z) {
        return Err(domain(format!("z = {z} outside [0, 1/2]")));
    }
    mc_mean(scenario, Origin::Target, n, seed, |x| {
        let eq = scenario.eta_q(x);
        let margin = (eq - 0.5).abs();
        let s = signal_strength_unchecked(eq, scenario.eta_p(x));
        if margin <= z && s <= c_gamma * margin.powf(gamma) {
            margin
        } else {
            0.0
        }
    })
}

/// Signal transfer risk:
/// `E_Q[|eta_Q - 1/2| 1{rule(X) != f*_Q(X), s(X) >= C_gamma |eta_Q - 1/2|^gamma}]`.
pub fn signal_transfer_risk_mc<S, R>(
    source_rule: &R,
    scenario: &S,
    gamma: f64,
    c_gamma: f64,
    n: usize,
    seed: u64,
) -> Result<McEstimate>
where
    S: Scenario + ?Sized,
    R: DecisionRule<f64> + ?Sized,
{
    mc_mean(scenario, Origin::Target, n, seed, |x| {
        let eq = scenario.eta_q(x);
        let margin = (eq - 0.5).abs();
        if source_rule.predict(x) == plug_in(eq) {
            return 0.0;
        }
        let s = signal_strength_unchecked(eq, scenario.eta_p(x));
        if s >= c_gamma * margin.powf(gamma) {
            margin
        } else {
            0.0
        }
    })
}

/// Source excess risk `E_P[|eta_P - 1/2| 1{rule(X) != f*_P(X)}]` over `X ~ P_X`
/// (no factor 2).
pub fn source_excess_risk_mc<S, R>(source_rule: &R, scenario: &S, n: usize, seed: u64) -> Result<McEstimate>
where
    S: Scenario + ?Sized,
    R: DecisionRule<f64> + ?Sized,
{
    mc_mean(scenario, Origin::Source, n, seed, |x| {
        let ep = scenario.eta_p(x);
        if source_rule.predict(x) != plug_in(ep) {
            (ep - 0.5).abs()
        } else {
            0.0
        }
    })
}

/// Fraction of `X ~ Q_X` on which `rule` agrees with the target Bayes rule.
pub fn bayes_agreement_mc<S, R>(rule: &R, scenario: &S, n: usize, seed: u64) -> Result<McEstimate>
where
    S: Scenario + ?Sized,
    R: DecisionRule<f64> + ?Sized,
{
    let bayes = bayes_rule(scenario);
    mc_mean(scenario, Origin::Target, n, seed, |x| {
        f64::from(u8::from(rule.predict(x) == bayes.predict(x)))
    })
}

/// Fraction of `X ~ Q_X` where the target and source Bayes rules disagree.
pub fn bayes_disagreement_mc<S: Scenario + ?Sized>(scenario: &S, n: usize, seed: u64) -> Result<McEstimate> {
    let src = source_bayes_rule(scenario);
    let tgt = bayes_rule(scenario);
    mc_mean(scenario, Origin::Target, n, seed, |x| {
        f64::from(u8::from(src.predict(x) != tgt.predict(x)))
    })
}

/// Closed-form ambiguity level under band-like ambiguity with slack `delta`:
/// `(C_a z^(1+a)) ∧ (2^((1+a)/g) C_a C_g^(-(1+a)/g) delta^((1+a)/g))`.
///
/// The bound controls the ambiguity level evaluated with constant `C_g / 2`.
pub fn ambiguity_bound_bandlike<T: Scalar>(z: T, delta: T, params: &ProblemParams<T>) -> Result<T> {
    if z < T::zero() || z > T::half() {
        return Err(domain("z must lie in [0, 1/2]"));
    }
    if delta < T::zero() {
        return Err(domain("delta must be >= 0"));
    }
    let one = T::one();
    let two = one + one;
    let e = (one + params.alpha) / params.gamma;
    let margin_branch = params.c_alpha * z.powf(one + params.alpha);
    let band_branch = two.powf(e) * params.c_alpha * params.c_gamma.powf(-e) * delta.powf(e);
    Ok(margin_branch.min(band_branch))
}

/// Margin constant and transfer constant `(C_alpha, C_gamma)` for a logistic
/// pair with `L <= m ||beta_Q|| <= ||beta_P||`; both exponents equal one.
pub fn logistic_pair_constants<T: Scalar>(m: T, l_norm: T) -> Result<(T, T)> {
    if !(m > T::zero() && m <= T::one()) {
        return Err(domain("m must lie in (0, 1]"));
    }
    if !(l_norm > T::zero()) {
        return Err(domain("L must be positive"));
    }
    let c_alpha = (T::of(16.0) * m / ((T::of(2.0) * T::PI()).sqrt() * l_norm)).max(T::of(4.0));
    Ok((c_alpha, m / T::PI()))
}

/// Closed-form ambiguity level for a logistic pair with angle `delta`:
/// `((16m / (sqrt(2 pi) L) ∨ 4) z²) ∧ (sqrt(2) U / m · delta²)`.
pub fn ambiguity_bound_logistic<T: Scalar>(z: T, delta: T, m: T, l_norm: T, u_norm: T) -> Result<T> {
    if z < T::zero() {
        return Err(domain("z must be >= 0"));
    }
    if delta < T::zero() || delta > T::FRAC_PI_2() {
        return Err(domain("delta must lie in [0, pi/2]"));
    }
    if !(u_norm > T::zero()) {
        return Err(domain("U must be positive"));
    }
    let (c_alpha, _) = logistic_pair_constants(m, l_norm)?;
    let margin_branch = c_alpha * z * z;
    let angle_branch = T::SQRT_2() * u_norm / m * delta * delta;
    Ok(margin_branch.min(angle_branch))
}

/// Upper bound on the signal transfer risk of a source classifier in terms of its
/// source excess risk `eps_p`, with density-ratio bound `m_ratio`.
pub fn signal_transfer_bound<T: Scalar>(eps_p: T, m_ratio: T, params: &ProblemParams<T>) -> Result<T> {
    if eps_p < T::zero() || !(m_ratio > T::zero()) {
        return Err(Error::Domain("eps_p must be >= 0 and M > 0".into()));
    }
    let one = T::one();
    let two = one + one;
    let (a, g) = (params.alpha, params.gamma);
    if g >= one {
        let e = (one + a) / (g + a);
        Ok(two
            * m_ratio.powf(e)
            * params.c_alpha.powf((g - one) / (g + a))
            * params.c_gamma.powf(-e)
            * eps_p.powf(e))
    } else {
        Ok(two.powf(g - one) * m_ratio / params.c_gamma * eps_p)
    }
}
