//! Parametric simulated participant.
//!
//! Discrimination follows a same-different rule: the two noisy internal
//! samples are compared and "different" is reported when their difference
//! exceeds a criterion. Reproduction and gauge pointing add bias and noise.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal as NormalDist};

use crate::error::{Error, Result};
use crate::units::Angle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Modality {
    Position,
    Velocity,
    Torque,
}

/// Sensory noise and decision criterion for one modality, in stimulus units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    pub sigma: f64,
    pub criterion: f64,
}

/// Additive bias and Gaussian noise of an active reproduction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Reproduction {
    pub bias: f64,
    pub noise_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObserverModel {
    pub position: Sensitivity,
    pub velocity: Sensitivity,
    pub torque: Sensitivity,
    pub lapse_rate: f64,
    pub position_repro: Reproduction,
    pub velocity_repro: Reproduction,
    pub gauge_bias_deg: Angle,
    pub gauge_noise_sd: Angle,
    /// Random-walk drift of the held posture during torque trials, deg/√s.
    pub hold_noise_sd: Angle,
    pub rng_seed: u64,
}

impl Default for ObserverModel {
    fn default() -> Self {
        Self {
            position: Sensitivity { sigma: 2.5, criterion: 2.0 },
            velocity: Sensitivity { sigma: 6.0, criterion: 6.0 },
            torque: Sensitivity { sigma: 50.0, criterion: 40.0 },
            lapse_rate: 0.0,
            position_repro: Reproduction { bias: 0.0, noise_sd: 5.0 },
            velocity_repro: Reproduction { bias: 0.0, noise_sd: 15.0 },
            gauge_bias_deg: 0.0,
            gauge_noise_sd: 9.0,
            hold_noise_sd: 1.0,
            rng_seed: 0,
        }
    }
}

impl ObserverModel {
    /// An observer with no sensory, motor or pointing noise.
    pub fn noiseless() -> Self {
        let tiny = Sensitivity { sigma: 1e-9, criterion: 0.0 };
        Self {
            position: tiny,
            velocity: tiny,
            torque: tiny,
            lapse_rate: 0.0,
            position_repro: Reproduction::default(),
            velocity_repro: Reproduction::default(),
            gauge_bias_deg: 0.0,
            gauge_noise_sd: 0.0,
            hold_noise_sd: 0.0,
            rng_seed: 0,
        }
    }

    pub fn sensitivity(&self, m: Modality) -> Sensitivity {
        match m {
            Modality::Position => self.position,
            Modality::Velocity => self.velocity,
            Modality::Torque => self.torque,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for m in [Modality::Position, Modality::Velocity, Modality::Torque] {
            let s = self.sensitivity(m);
            if !(s.sigma > 0.0) || !(s.criterion >= 0.0) {
                return Err(Error::Domain(format!("{m:?}: sigma must be positive, criterion non-negative")));
            }
        }
        if !(0.0..0.5).contains(&self.lapse_rate) {
            return Err(Error::Domain(format!("lapse rate {} outside [0, 0.5)", self.lapse_rate)));
        }
        let sds = [self.position_repro.noise_sd, self.velocity_repro.noise_sd, self.gauge_noise_sd, self.hold_noise_sd];
        if sds.iter().any(|s| !(*s >= 0.0)) {
            return Err(Error::Domain("noise standard deviations must be non-negative".into()));
        }
        Ok(())
    }

    /// Probability of a "different" report for a stimulus difference `delta`.
    pub fn p_respond_different(&self, modality: Modality, delta: f64) -> f64 {
        let s = self.sensitivity(modality);
        p_respond_different(delta, s.sigma, s.criterion, self.lapse_rate)
    }

    /// Presents two stimuli in the given order; "different" scores correct.
    pub fn respond_2ifc<R: Rng + ?Sized>(&self, modality: Modality, first: f64, second: f64, rng: &mut R) -> bool {
        let s = self.sensitivity(modality);
        if self.lapse_rate > 0.0 && rng.random::<f64>() < self.lapse_rate {
            return rng.random::<bool>();
        }
        let noise = Normal::new(0.0, s.sigma).expect("validated sigma");
        let a = first + noise.sample(rng);
        let b = second + noise.sample(rng);
        (b - a).abs() > s.criterion
    }

    pub fn reproduce_value<R: Rng + ?Sized>(&self, target: f64, repro: Reproduction, rng: &mut R) -> f64 {
        target + repro.bias + gaussian(repro.noise_sd, rng)
    }

    /// Reads a presented angle off a protractor with whole-degree resolution.
    pub fn point_gauge<R: Rng + ?Sized>(&self, true_angle: Angle, rng: &mut R) -> Angle {
        (true_angle + self.gauge_bias_deg + gaussian(self.gauge_noise_sd, rng)).round()
    }
}

pub(crate) fn gaussian<R: Rng + ?Sized>(sd: f64, rng: &mut R) -> f64 {
    if sd > 0.0 {
        Normal::new(0.0, sd).expect("non-negative sd").sample(rng)
    } else {
        0.0
    }
}

fn std_normal_cdf(x: f64) -> f64 {
    NormalDist::standard().cdf(x)
}

/// `P(|D| > c)` with `D ~ N(delta, 2σ²)`, mixed with a lapse rate that
/// answers at random.
pub fn p_respond_different(delta: f64, sigma: f64, criterion: f64, lapse: f64) -> f64 {
    let sd = std::f64::consts::SQRT_2 * sigma;
    let p = std_normal_cdf((delta - criterion) / sd) + std_normal_cdf((-delta - criterion) / sd);
    0.5 * lapse + (1.0 - lapse) * p.min(1.0)
}

/// The stimulus difference at which the "different" rate reaches `target`,
/// by bisection on `[0, upper]`. Zero when the rate at no difference already
/// reaches `target`; `None` when `upper` does not.
pub fn solve_threshold(sigma: f64, criterion: f64, lapse: f64, target: f64, upper: f64) -> Option<f64> {
    let f = |d: f64| p_respond_different(d, sigma, criterion, lapse) - target;
    let (mut lo, mut hi) = (0.0, upper);
    if f(lo) >= 0.0 {
        return Some(0.0);
    }
    if f(hi) < 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Convergence level of an n-down-1-up track with equal steps: `0.5^(1/n)`.
pub fn convergence_level(n_down: u32) -> f64 {
    0.5f64.powf(1.0 / n_down as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn obs(sigma: f64, c: f64, lapse: f64) -> ObserverModel {
        ObserverModel { velocity: Sensitivity { sigma, criterion: c }, lapse_rate: lapse, ..ObserverModel::default() }
    }

    #[test]
    fn asymptotes() {
        assert!((p_respond_different(1e9, 3.0, 2.0, 0.1) - 0.95).abs() < 1e-12);
        assert!((p_respond_different(0.0, 3.0, 0.0, 0.1) - 0.95).abs() < 1e-12);
        assert!((p_respond_different(0.0, 3.0, 0.0, 0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_monte_carlo() {
        // delta = c, lapse 0; 10^6 draws of D ~ N(delta, 2 sigma^2)
        let (sigma, c) = (6.0, 6.0);
        let p = p_respond_different(c, sigma, c, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let d = Normal::new(c, std::f64::consts::SQRT_2 * sigma).unwrap();
        let n = 1_000_000;
        let hits = (0..n).filter(|_| d.sample(&mut rng).abs() > c).count();
        assert!((hits as f64 / n as f64 - p).abs() < 0.002);
    }

    #[test]
    fn monotone_in_delta() {
        let mut prev = 0.0;
        for k in 0..500 {
            let p = p_respond_different(k as f64 * 0.1, 2.0, 3.0, 0.05);
            assert!(p >= prev - 1e-15);
            prev = p;
        }
    }

    #[test]
    fn huge_delta_is_detected() {
        let o = obs(2.0, 2.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 10_000;
        let hits = (0..n).filter(|_| o.respond_2ifc(Modality::Velocity, 60.0, 160.0, &mut rng)).count();
        assert!(hits as f64 / n as f64 > 0.999);
    }

    #[test]
    fn sampling_matches_analytic_rate() {
        // delta near zero with criterion far above sigma: mostly lapse-driven
        let o = obs(1.0, 4.0, 0.2);
        let p = o.p_respond_different(Modality::Velocity, 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 20_000;
        let hits = (0..n).filter(|_| o.respond_2ifc(Modality::Velocity, 60.0, 60.0 + 1e-6, &mut rng)).count();
        let f = hits as f64 / n as f64;
        let ci = 4.0 * (p * (1.0 - p) / n as f64).sqrt();
        assert!((f - p).abs() < ci, "{f} vs {p}");
    }

    #[test]
    fn replay_is_deterministic() {
        let o = obs(3.0, 2.0, 0.05);
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..200)
                .map(|i| o.respond_2ifc(Modality::Velocity, 60.0, 60.0 + (i % 7) as f64, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
    }

    #[test]
    fn reproduction_bias_and_noise() {
        let o = ObserverModel::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(o.reproduce_value(30.0, Reproduction::default(), &mut rng), 30.0);
        assert_eq!(o.reproduce_value(30.0, Reproduction { bias: 2.0, noise_sd: 0.0 }, &mut rng), 32.0);
        let r = Reproduction { bias: 2.0, noise_sd: 3.0 };
        let n = 10_000;
        let mean = (0..n).map(|_| o.reproduce_value(30.0, r, &mut rng)).sum::<f64>() / n as f64;
        assert!((mean - 32.0).abs() < 3.0 * 3.0 / 100.0);
    }

    #[test]
    fn gauge_reports_whole_degrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let quiet = ObserverModel { gauge_noise_sd: 0.0, ..ObserverModel::default() };
        assert_eq!(quiet.point_gauge(33.27, &mut rng), 33.0);
        let noisy = ObserverModel { gauge_noise_sd: 9.0, ..ObserverModel::default() };
        let n = 10_000;
        let mut total = 0.0;
        for _ in 0..n {
            let r = noisy.point_gauge(33.27, &mut rng);
            assert_eq!(r, r.round());
            total += (r - 33.27).abs();
        }
        let expected = 9.0 * (2.0 / std::f64::consts::PI).sqrt();
        assert!(((total / n as f64) - expected).abs() < 0.05 * expected);
    }

    #[test]
    fn threshold_solver() {
        let target = convergence_level(3);
        assert!((target - 0.7937).abs() < 1e-4);
        let d = solve_threshold(6.0, 6.0, 0.0, target, 100.0).unwrap();
        assert!((p_respond_different(d, 6.0, 6.0, 0.0) - target).abs() < 1e-9);
        assert!(solve_threshold(6.0, 6.0, 0.5, 0.9, 100.0).is_none());
    }

    #[test]
    fn validation() {
        assert!(ObserverModel::default().validate().is_ok());
        assert!(ObserverModel { lapse_rate: 0.5, ..ObserverModel::default() }.validate().is_err());
        assert!(obs(0.0, 1.0, 0.0).validate().is_err());
    }
}
