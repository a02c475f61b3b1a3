//! The three simulation designs: band-like ambiguity and partially flipped
//! sines on the unit square, and a rotated sparse logistic pair in `R^d`.

use std::f64::consts::PI;

use rand::Rng as _;

use crate::error::{domain, Error, Result};
use crate::model::{CovariateLaw, Label, LabeledSample, Origin, Scenario};
use crate::quantities::signal_strength_unchecked;
use crate::rng::rng_from_seed;
use crate::scalar::sigmoid;

/// Default amplitude of the target sine.
pub const DEFAULT_AMP_Q: f64 = 0.1;
/// Default amplitude of the flipped source sine.
pub const DEFAULT_AMP_P: f64 = 0.2;
/// Default ambient dimension of the logistic design.
pub const DEFAULT_LOGISTIC_D: usize = 200;
/// Default sparsity of the logistic design.
pub const DEFAULT_LOGISTIC_S: usize = 10;

/// `1/2 + amp_q sin(2 pi (x_1 + x_2))`.
pub fn eta_q_nonparam(x: &[f64], amp_q: f64) -> f64 {
    (0.5 + amp_q * (2.0 * PI * (x[0] + x[1])).sin()).clamp(0.0, 1.0)
}

/// Band-like source built from the target value `eta_q`:
/// `1/2 ± gain |eta_q - 1/2|^gamma ∓ delta`, clipped to `[0, 1]`.
pub fn eta_p_bandlike_from(eta_q: f64, gamma: f64, delta: f64, gain: f64) -> f64 {
    let raw = if eta_q >= 0.5 {
        0.5 + gain * (eta_q - 0.5).powf(gamma) - delta
    } else {
        0.5 - gain * (0.5 - eta_q).powf(gamma) + delta
    };
    raw.clamp(0.0, 1.0)
}

/// Band-like source regression function at `x` with the default gain 2.
pub fn eta_p_bandlike(x: &[f64], gamma: f64, delta: f64, amp_q: f64) -> f64 {
    eta_p_bandlike_from(eta_q_nonparam(x, amp_q), gamma, delta, 2.0)
}

/// Partially flipped sine.
///
/// With `t = x_1 + x_2`, each half period of `sin(2 pi t)` is split at the
/// fraction `r`: on the first part the source sine has the opposite sign of
/// the target, on the rest it agrees. The curve equals `1/2` at every seam.
/// The half-period sign is taken from the parity of `floor(2t)`.
pub fn eta_p_flipped(x: &[f64], gamma: f64, ratio: f64, amp_p: f64) -> f64 {
    let t = x[0] + x[1];
    let two_t = 2.0 * t;
    let half = two_t.floor();
    let sign = if (half as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let u = two_t - half;
    let bump = |v: f64| v.sin().max(0.0).powf(gamma);
    let v = if u < ratio {
        0.5 - sign * amp_p * bump(PI * u / ratio)
    } else {
        0.5 + sign * amp_p * bump(PI * (u - ratio) / (1.0 - ratio))
    };
    v.clamp(0.0, 1.0)
}

/// Target and source coefficient vectors of the logistic design.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientPair {
    pub beta_q: Vec<f64>,
    pub beta_p: Vec<f64>,
}

impl CoefficientPair {
    pub fn angle(&self) -> Result<f64> {
        angle_between(&self.beta_q, &self.beta_p)
    }

    pub fn sparsity(&self) -> usize {
        self.beta_q.iter().filter(|b| **b != 0.0).count()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// `beta_Q = (0.5 1_s, 0)`, `beta_P = (1.5 1_s, ||beta_Q|| tan(delta) / sqrt(d - s) 1_{d-s})`.
///
/// The realised angle of this construction is `atan(|tan(delta)| / 3)`.
/// With `exact_angle`, `beta_P` is instead `3 beta_Q` rotated by `delta`
/// towards the tail direction `1_{d-s} / sqrt(d - s)`:
/// `beta_P = 3 cos(delta) beta_Q + 3 ||beta_Q|| sin(delta) 1_{d-s} / sqrt(d - s)`,
/// which makes the angle exactly `delta` for `delta` in `[0, pi]`.
pub fn make_logistic_coeffs(d: usize, s: usize, delta: f64, exact_angle: bool) -> Result<CoefficientPair> {
    if s == 0 || s >= d {
        return Err(domain(format!("need 0 < s < d, got s = {s}, d = {d}")));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(domain("delta must be finite and >= 0"));
    }
    let mut beta_q = vec![0.0; d];
    beta_q[..s].iter_mut().for_each(|b| *b = 0.5);
    let q_norm = norm(&beta_q);
    let root = ((d - s) as f64).sqrt();
    let (head, tail) = if exact_angle {
        if delta > PI {
            return Err(domain("an exact rotation angle must lie in [0, pi]"));
        }
        (1.5 * delta.cos(), 3.0 * q_norm * delta.sin() / root)
    } else {
        if delta.cos().abs() < 1e-12 {
            return Err(domain("tan(delta) diverges at odd multiples of pi/2"));
        }
        (1.5, q_norm / root * delta.tan())
    };
    let mut beta_p = vec![tail; d];
    beta_p[..s].iter_mut().for_each(|b| *b = head);
    Ok(CoefficientPair { beta_q, beta_p })
}

/// Angle in `[0, pi]` between two nonzero vectors.
pub fn angle_between(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::Dimension {
            expected: u.len(),
            got: v.len(),
        });
    }
    let (nu, nv) = (norm(u), norm(v));
    if nu == 0.0 || nv == 0.0 {
        return Err(domain("angle undefined for a zero vector"));
    }
    // 2 atan2(|u' - v'|, |u' + v'|) on the unit vectors stays accurate near 0 and pi
    let (mut diff, mut sum) = (0.0, 0.0);
    for (a, b) in u.iter().zip(v) {
        let (a, b) = (a / nu, b / nv);
        diff += (a - b) * (a - b);
        sum += (a + b) * (a + b);
    }
    Ok(2.0 * diff.sqrt().atan2(sum.sqrt()))
}

/// Kind-specific parameters of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    BandLike {
        gamma: f64,
        delta: f64,
        amp_q: f64,
        /// Multiplier of `|eta_Q - 1/2|^gamma` in the source (2 in the standard design).
        gain: f64,
    },
    FlippedSine {
        gamma: f64,
        ratio: f64,
        amp_q: f64,
        amp_p: f64,
    },
    LogisticRotation {
        d: usize,
        s: usize,
        delta: f64,
        exact_angle: bool,
    },
}

/// A fully analytic `(Q, P)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    kind: ScenarioKind,
    coeffs: Option<CoefficientPair>,
}

impl ScenarioSpec {
    pub fn band_like(gamma: f64, delta: f64) -> Result<Self> {
        Self::new(ScenarioKind::BandLike {
            gamma,
            delta,
            amp_q: DEFAULT_AMP_Q,
            gain: 2.0,
        })
    }

    pub fn flipped_sine(gamma: f64, ratio: f64) -> Result<Self> {
        Self::new(ScenarioKind::FlippedSine {
            gamma,
            ratio,
            amp_q: DEFAULT_AMP_Q,
            amp_p: DEFAULT_AMP_P,
        })
    }

    pub fn logistic_rotation(d: usize, s: usize, delta: f64) -> Result<Self> {
        Self::new(ScenarioKind::LogisticRotation {
            d,
            s,
            delta,
            exact_angle: false,
        })
    }

    pub fn new(kind: ScenarioKind) -> Result<Self> {
        let coeffs = match &kind {
            ScenarioKind::BandLike {
                gamma,
                delta,
                amp_q,
                gain,
            } => {
                check_amp(*amp_q)?;
                if !(*gamma > 0.0) || !(*delta >= 0.0) || !(*gain > 0.0) {
                    return Err(domain("band-like scenario needs gamma > 0, delta >= 0, gain > 0"));
                }
                None
            }
            ScenarioKind::FlippedSine {
                gamma,
                ratio,
                amp_q,
                amp_p,
            } => {
                check_amp(*amp_q)?;
                check_amp(*amp_p)?;
                if !(*gamma > 0.0) || !(0.0..1.0).contains(ratio) {
                    return Err(domain("flipped-sine scenario needs gamma > 0 and r in [0, 1)"));
                }
                None
            }
            ScenarioKind::LogisticRotation {
                d,
                s,
                delta,
                exact_angle,
            } => Some(make_logistic_coeffs(*d, *s, *delta, *exact_angle)?),
        };
        Ok(Self { kind, coeffs })
    }

    pub fn kind(&self) -> &ScenarioKind {
        &self.kind
    }

    pub fn coefficients(&self) -> Option<&CoefficientPair> {
        self.coeffs.as_ref()
    }

    pub fn is_logistic(&self) -> bool {
        self.coeffs.is_some()
    }

    /// Short identifier used in result files.
    pub fn id(&self) -> &'static str {
        match self.kind {
            ScenarioKind::BandLike { .. } => "band",
            ScenarioKind::FlippedSine { .. } => "flip",
            ScenarioKind::LogisticRotation { .. } => "logistic",
        }
    }

    /// Name and value of the parameter that indexes the figure grid.
    pub fn grid_param(&self) -> (&'static str, f64) {
        match self.kind {
            ScenarioKind::BandLike { delta, .. } => ("delta", delta),
            ScenarioKind::FlippedSine { ratio, .. } => ("r", ratio),
            ScenarioKind::LogisticRotation { delta, .. } => ("delta", delta),
        }
    }

    pub fn gamma(&self) -> Option<f64> {
        match self.kind {
            ScenarioKind::BandLike { gamma, .. } | ScenarioKind::FlippedSine { gamma, .. } => Some(gamma),
            ScenarioKind::LogisticRotation { .. } => None,
        }
    }

    /// Margin constants `(alpha, C_alpha)` of the target sine: the phase
    /// `2 pi (x_1 + x_2)` is uniform modulo `2 pi`, so
    /// `Q(|eta_Q - 1/2| <= t) = (2/pi) asin(t / amp) <= t / amp`.
    pub fn sine_margin_constants(&self) -> Option<(f64, f64)> {
        match self.kind {
            ScenarioKind::BandLike { amp_q, .. } | ScenarioKind::FlippedSine { amp_q, .. } => Some((1.0, 1.0 / amp_q)),
            ScenarioKind::LogisticRotation { .. } => None,
        }
    }

    /// Band constant `C_gamma` with `s(x) >= C_gamma |eta_Q - 1/2|^gamma - delta`
    /// everywhere, clipping included.
    pub fn band_constant(&self) -> Option<f64> {
        match self.kind {
            ScenarioKind::BandLike { gamma, amp_q, gain, .. } => Some(gain.min(0.5 / amp_q.powf(gamma)).min(1.0)),
            _ => None,
        }
    }
}

fn check_amp(a: f64) -> Result<()> {
    if a > 0.0 && a <= 0.5 {
        Ok(())
    } else {
        Err(domain("amplitudes must lie in (0, 1/2]"))
    }
}

impl Scenario for ScenarioSpec {
    fn dim(&self) -> usize {
        match self.kind {
            ScenarioKind::LogisticRotation { d, .. } => d,
            _ => 2,
        }
    }

    fn eta_q(&self, x: &[f64]) -> f64 {
        match (&self.kind, &self.coeffs) {
            (ScenarioKind::BandLike { amp_q, .. }, _) | (ScenarioKind::FlippedSine { amp_q, .. }, _) => {
                eta_q_nonparam(x, *amp_q)
            }
            (_, Some(c)) => sigmoid(dot(&c.beta_q, x)),
            _ => unreachable!("logistic scenario always carries coefficients"),
        }
    }

    fn eta_p(&self, x: &[f64]) -> f64 {
        match (&self.kind, &self.coeffs) {
            (
                ScenarioKind::BandLike {
                    gamma,
                    delta,
                    amp_q,
                    gain,
                },
                _,
            ) => eta_p_bandlike_from(eta_q_nonparam(x, *amp_q), *gamma, *delta, *gain),
            (
                ScenarioKind::FlippedSine {
                    gamma, ratio, amp_p, ..
                },
                _,
            ) => eta_p_flipped(x, *gamma, *ratio, *amp_p),
            (_, Some(c)) => sigmoid(dot(&c.beta_p, x)),
            _ => unreachable!("logistic scenario always carries coefficients"),
        }
    }

    fn covariate_law(&self, _origin: Origin) -> CovariateLaw {
        match self.kind {
            ScenarioKind::LogisticRotation { .. } => CovariateLaw::StandardNormal,
            _ => CovariateLaw::UniformCube,
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Signal strength of a scenario at `x`.
pub fn scenario_signal<S: Scenario + ?Sized>(scenario: &S, x: &[f64]) -> f64 {
    signal_strength_unchecked(scenario.eta_q(x), scenario.eta_p(x))
}

/// Draws `n` labeled pairs from `Q` or `P`: covariates from the scenario's
/// law, labels `1{U < eta(x)}` with `U` uniform.
pub fn sample<S: Scenario + ?Sized>(scenario: &S, which: Origin, n: usize, seed: u64) -> Result<LabeledSample<f64>> {
    let dim = scenario.dim();
    let mut rng = rng_from_seed(seed);
    let mut coords = vec![0.0; n * dim];
    let mut labels = Vec::with_capacity(n);
    for x in coords.chunks_exact_mut(dim) {
        scenario.sample_covariate(which, &mut rng, x);
        let eta = scenario.eta(which, x);
        labels.push(Label::from(rng.random::<f64>() < eta));
    }
    LabeledSample::from_flat(dim, coords, labels, which)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CustomScenario, RegressionSurface};

    #[test]
    fn target_sine_values() {
        assert!((eta_q_nonparam(&[0.0, 0.0], 0.1) - 0.5).abs() < 1e-15);
        assert!((eta_q_nonparam(&[0.125, 0.125], 0.1) - 0.6).abs() < 1e-15);
        assert!((eta_q_nonparam(&[0.375, 0.375], 0.1) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn band_like_values() {
        assert!((eta_p_bandlike_from(0.6, 1.0, 0.0, 2.0) - 0.7).abs() < 1e-12);
        assert!((eta_p_bandlike_from(0.6, 1.0, 0.3, 2.0) - 0.4).abs() < 1e-12);
        let raw = 0.5 + 2.0 * 0.1f64.sqrt();
        assert!((raw - 1.1325).abs() < 1e-4);
        assert_eq!(eta_p_bandlike_from(0.6, 0.5, 0.0, 2.0), 1.0);
        // x with eta_Q = 0.6 under the default amplitude
        assert!((eta_p_bandlike(&[0.125, 0.125], 1.0, 0.0, 0.1) - 0.7).abs() < 1e-12);
    }

    #[test]
    fn flipped_values() {
        // r = 0 agrees in sign with the target everywhere
        for i in 1..200 {
            let t = i as f64 / 100.0 + 0.003;
            let x = [t / 2.0, t / 2.0];
            let q = eta_q_nonparam(&x, 0.1) - 0.5;
            let p = eta_p_flipped(&x, 1.0, 0.0, 0.2) - 0.5;
            assert!(q * p >= 0.0, "t = {t}");
        }
        // seams
        for r in [0.2, 0.4] {
            for half in 0..4 {
                let base = half as f64 / 2.0;
                for u in [0.0, r] {
                    let t = base + u / 2.0;
                    assert!((eta_p_flipped(&[t, 0.0], 1.0, r, 0.2) - 0.5).abs() < 1e-12);
                }
            }
        }
        let v = eta_p_flipped(&[0.05, 0.0], 1.0, 0.4, 0.2);
        assert!((v - (0.5 - 0.2 * (PI / 4.0).sin())).abs() < 1e-12);
        assert!((v - 0.3586).abs() < 1e-4);
    }

    #[test]
    fn logistic_coefficients() {
        let c = make_logistic_coeffs(20, 10, 0.0, false).unwrap();
        let tripled: Vec<f64> = c.beta_q.iter().map(|b| 3.0 * b).collect();
        assert_eq!(c.beta_p, tripled);
        assert_eq!(c.angle().unwrap(), 0.0);
        let c = make_logistic_coeffs(20, 10, PI / 4.0, false).unwrap();
        assert!((c.beta_p[15] - 0.5).abs() < 1e-12);
        assert!((c.angle().unwrap() - (1.0f64 / 3.0).atan()).abs() < 1e-12);
        assert!((c.angle().unwrap() - 0.32175).abs() < 1e-5);
        let e = make_logistic_coeffs(20, 10, 0.7, true).unwrap();
        assert!((e.angle().unwrap() - 0.7).abs() < 1e-12);
        for delta in [0.0, 1.2, PI / 2.0, 1.75, PI] {
            let e = make_logistic_coeffs(30, 10, delta, true).unwrap();
            assert!((e.angle().unwrap() - delta).abs() < 1e-12);
            assert!((norm(&e.beta_p) - 3.0 * norm(&e.beta_q)).abs() < 1e-12);
        }
        // past pi/2 the displayed construction folds back
        let c = make_logistic_coeffs(20, 10, 1.75, false).unwrap();
        assert!((c.angle().unwrap() - (1.75f64.tan().abs() / 3.0).atan()).abs() < 1e-12);
        for delta in [0.0, 0.3, 1.2] {
            let c = make_logistic_coeffs(50, 7, delta, false).unwrap();
            assert!((norm(&c.beta_q) - 0.5 * 7f64.sqrt()).abs() < 1e-12);
            assert_eq!(c.sparsity(), 7);
        }
        assert!(make_logistic_coeffs(10, 10, 0.1, false).is_err());
        assert!(make_logistic_coeffs(10, 3, PI / 2.0, false).is_err());
    }

    #[test]
    fn angles() {
        assert_eq!(angle_between(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!((angle_between(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((angle_between(&[1.0, 0.0], &[1.0, 1.0]).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!(angle_between(&[0.0, 0.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn sampling_is_deterministic_and_respects_eta() {
        let s = ScenarioSpec::band_like(1.0, 0.2).unwrap();
        let a = sample(&s, Origin::Target, 500, 9).unwrap();
        let b = sample(&s, Origin::Target, 500, 9).unwrap();
        assert_eq!(a, b);
        let ones = CustomScenario {
            dim: 3,
            eta_q: RegressionSurface::constant(1.0),
            eta_p: RegressionSurface::constant(0.0),
            law: CovariateLaw::StandardNormal,
        };
        assert!(sample(&ones, Origin::Target, 300, 1).unwrap().labels().iter().all(|&y| y == 1));
        assert!(sample(&ones, Origin::Source, 300, 1).unwrap().labels().iter().all(|&y| y == 0));
    }

    #[test]
    fn band_constant_respects_clipping() {
        let s1 = ScenarioSpec::band_like(1.0, 0.0).unwrap();
        assert_eq!(s1.band_constant(), Some(1.0));
        let s2 = ScenarioSpec::band_like(0.5, 0.0).unwrap();
        assert_eq!(s2.band_constant(), Some(1.0));
    }
}
