//! Test orbits and a derivative-based Lyapunov exponent estimate.

use crate::error::{Error, Result};
use crate::series::{Series, TimeSeries, TimeSeries2D};
use crate::sum::CompensatedSum;
use crate::DIVERGENCE_BOUND;

/// Iterates discarded before recording by default.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Initial point used for the quadratic and exponential quadratic orbits.
pub const DEFAULT_X0: f64 = 0.123456789;

/// Initial pair used for the Hénon orbits.
pub const DEFAULT_HENON_START: (f64, f64) = (0.12, 0.22);

/// Logistic map `mu x (1 - x)`.
pub fn quadratic_step(x: f64, mu: f64) -> f64 {
    mu * x * (1.0 - x)
}

/// Logistic map damped by `exp(-k x)`.
pub fn exp_quadratic_step(x: f64, mu: f64, k: f64) -> f64 {
    mu * x * (1.0 - x) * (-k * x).exp()
}

/// Planar Hénon map `(1 + x2 - a x1^2, b x1)`.
pub fn henon_step(state: [f64; 2], a: f64, b: f64) -> [f64; 2] {
    let [x, y] = state;
    [1.0 + y - a * x * x, b * x]
}

/// Hénon map in delay form, `1 + b x_prev - a x_curr^2`, with the standard
/// parameters `a = 1.4`, `b = 0.3`.
pub fn henon_delay_step(x_prev: f64, x_curr: f64) -> f64 {
    henon_delay_step_with(x_prev, x_curr, 1.4, 0.3)
}

pub fn henon_delay_step_with(x_prev: f64, x_curr: f64, a: f64, b: f64) -> f64 {
    1.0 + b * x_prev - a * x_curr * x_curr
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MapKind {
    Quadratic { mu: f64 },
    ExpQuadratic { mu: f64, k: f64 },
    Henon2D { a: f64, b: f64 },
    HenonDelay { a: f64, b: f64 },
}

impl MapKind {
    pub fn name(&self) -> &'static str {
        match self {
            MapKind::Quadratic { .. } => "quadratic",
            MapKind::ExpQuadratic { .. } => "expquad",
            MapKind::Henon2D { .. } => "henon",
            MapKind::HenonDelay { .. } => "henon-delay",
        }
    }
}

/// Starting state. Scalar maps take one value; both Hénon forms take a pair,
/// `(x1, x2)` for the planar map and `(x_prev, x_curr)` for the delay form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState {
    Scalar(f64),
    Pair(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSpec {
    pub kind: MapKind,
    pub initial: InitialState,
    pub burn_in: usize,
    pub divergence_bound: f64,
}

impl MapSpec {
    pub fn quadratic(mu: f64, x0: f64) -> Self {
        Self::with_kind(MapKind::Quadratic { mu }, InitialState::Scalar(x0))
    }

    pub fn exp_quadratic(mu: f64, k: f64, x0: f64) -> Self {
        Self::with_kind(MapKind::ExpQuadratic { mu, k }, InitialState::Scalar(x0))
    }

    pub fn henon_2d(a: f64, b: f64, start: (f64, f64)) -> Self {
        Self::with_kind(
            MapKind::Henon2D { a, b },
            InitialState::Pair(start.0, start.1),
        )
    }

    pub fn henon_delay(a: f64, b: f64, start: (f64, f64)) -> Self {
        Self::with_kind(
            MapKind::HenonDelay { a, b },
            InitialState::Pair(start.0, start.1),
        )
    }

    fn with_kind(kind: MapKind, initial: InitialState) -> Self {
        Self {
            kind,
            initial,
            burn_in: DEFAULT_BURN_IN,
            divergence_bound: DIVERGENCE_BOUND,
        }
    }

    pub fn burn_in(mut self, burn_in: usize) -> Self {
        self.burn_in = burn_in;
        self
    }

    pub fn divergence_bound(mut self, bound: f64) -> Self {
        self.divergence_bound = bound;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self.kind {
            MapKind::Quadratic { mu } => {
                if !(mu > 0.0 && mu <= 4.0) {
                    return bad(format!("quadratic map needs mu in (0, 4], got {mu}"));
                }
            }
            MapKind::ExpQuadratic { mu, k } => {
                if !(mu > 0.0 && mu.is_finite() && k > 0.0 && k.is_finite()) {
                    return bad(format!(
                        "exponential quadratic map needs mu > 0 and k > 0, got mu={mu} k={k}"
                    ));
                }
            }
            MapKind::Henon2D { a, b } | MapKind::HenonDelay { a, b } => {
                if !(a.is_finite() && b.is_finite()) {
                    return bad(format!("Hénon parameters must be finite, got a={a} b={b}"));
                }
            }
        }
        match (self.kind, self.initial) {
            (MapKind::Quadratic { .. } | MapKind::ExpQuadratic { .. }, InitialState::Scalar(x))
                if x.is_finite() => {}
            (MapKind::Henon2D { .. } | MapKind::HenonDelay { .. }, InitialState::Pair(x, y))
                if x.is_finite() && y.is_finite() => {}
            (kind, initial) => {
                return bad(format!(
                    "initial state {initial:?} does not fit map {}",
                    kind.name()
                ))
            }
        }
        if !(self.divergence_bound > 0.0) {
            return bad("divergence bound must be positive".into());
        }
        Ok(())
    }

    /// True for the maps that produce a scalar series.
    pub fn is_scalar(&self) -> bool {
        !matches!(self.kind, MapKind::Henon2D { .. })
    }
}

fn check_bound(value: f64, bound: f64, step: usize) -> Result<()> {
    if value.is_finite() && value.abs() <= bound {
        Ok(())
    } else {
        Err(Error::DivergedOrbit { step, value })
    }
}

/// Iterates the map, drops `burn_in` iterates and returns the next `length`.
///
/// Iterate 0 is the initial state itself, so with no burn-in the output starts
/// at the initial point.
pub fn generate_orbit(spec: &MapSpec, length: usize) -> Result<Series> {
    spec.validate()?;
    if length == 0 {
        return Err(Error::InvalidParameter(
            "orbit length must be positive".into(),
        ));
    }
    let bound = spec.divergence_bound;
    let total = spec.burn_in + length;
    match (spec.kind, spec.initial) {
        (MapKind::Henon2D { a, b }, InitialState::Pair(x, y)) => {
            let mut state = [x, y];
            let mut out = Vec::with_capacity(length);
            for step in 0..total {
                check_bound(state[0], bound, step)?;
                check_bound(state[1], bound, step)?;
                if step >= spec.burn_in {
                    out.push(state);
                }
                state = henon_step(state, a, b);
            }
            Ok(Series::Planar(
                TimeSeries2D::new(out)?.with_label(spec.kind.name()),
            ))
        }
        (MapKind::HenonDelay { a, b }, InitialState::Pair(prev, curr)) => {
            let (mut prev, mut curr) = (prev, curr);
            let mut out = Vec::with_capacity(length);
            for step in 0..total {
                check_bound(curr, bound, step)?;
                if step >= spec.burn_in {
                    out.push(curr);
                }
                let next = henon_delay_step_with(prev, curr, a, b);
                prev = curr;
                curr = next;
            }
            Ok(Series::Scalar(
                TimeSeries::new(out)?.with_label(spec.kind.name()),
            ))
        }
        (kind, InitialState::Scalar(x0)) => {
            let step_fn = scalar_map(kind)?;
            let mut x = x0;
            let mut out = Vec::with_capacity(length);
            for step in 0..total {
                check_bound(x, bound, step)?;
                if step >= spec.burn_in {
                    out.push(x);
                }
                x = step_fn(x);
            }
            Ok(Series::Scalar(
                TimeSeries::new(out)?.with_label(kind.name()),
            ))
        }
        _ => unreachable!("validate() rejects mismatched initial states"),
    }
}

/// Shorthand for scalar maps.
pub fn generate_series(spec: &MapSpec, length: usize) -> Result<TimeSeries> {
    generate_orbit(spec, length)?.into_scalar()
}

/// Shorthand for the planar Hénon map.
pub fn generate_series_2d(spec: &MapSpec, length: usize) -> Result<TimeSeries2D> {
    generate_orbit(spec, length)?.into_planar()
}

fn scalar_map(kind: MapKind) -> Result<Box<dyn Fn(f64) -> f64>> {
    match kind {
        MapKind::Quadratic { mu } => Ok(Box::new(move |x| quadratic_step(x, mu))),
        MapKind::ExpQuadratic { mu, k } => Ok(Box::new(move |x| exp_quadratic_step(x, mu, k))),
        _ => Err(Error::InvalidParameter(format!(
            "{} is not a first-order scalar map",
            kind.name()
        ))),
    }
}

fn scalar_derivative(kind: MapKind) -> Result<Box<dyn Fn(f64) -> f64>> {
    match kind {
        MapKind::Quadratic { mu } => Ok(Box::new(move |x| mu * (1.0 - 2.0 * x))),
        MapKind::ExpQuadratic { mu, k } => Ok(Box::new(move |x| {
            mu * (-k * x).exp() * ((1.0 - 2.0 * x) - k * x * (1.0 - x))
        })),
        _ => Err(Error::InvalidParameter(format!(
            "Lyapunov estimate needs a scalar map with an analytic derivative, got {}",
            kind.name()
        ))),
    }
}

/// Mean of `ln |f'(x_j)|` over `n_iterates` points of the post-burn-in orbit.
pub fn lyapunov_estimate(spec: &MapSpec, n_iterates: usize) -> Result<f64> {
    spec.validate()?;
    if n_iterates == 0 {
        return Err(Error::InvalidParameter(
            "n_iterates must be positive".into(),
        ));
    }
    let step_fn = scalar_map(spec.kind)?;
    let derivative = scalar_derivative(spec.kind)?;
    let InitialState::Scalar(mut x) = spec.initial else {
        unreachable!("validated scalar map");
    };
    for step in 0..spec.burn_in {
        check_bound(x, spec.divergence_bound, step)?;
        x = step_fn(x);
    }
    let mut acc = CompensatedSum::default();
    for j in 0..n_iterates {
        check_bound(x, spec.divergence_bound, spec.burn_in + j)?;
        let d = derivative(x).abs();
        if !(d >= 1e-300) {
            return Err(Error::DerivativeVanished {
                step: spec.burn_in + j,
                x,
            });
        }
        acc.add(d.ln());
        x = step_fn(x);
    }
    Ok(acc.value() / n_iterates as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_step_values() {
        assert_eq!(quadratic_step(0.0, 3.8), 0.0);
        assert_eq!(quadratic_step(0.5, 4.0), 1.0);
        assert!((quadratic_step(0.123456789, 3.8) - 0.4112178).abs() < 1e-7);
    }

    #[test]
    fn exp_quadratic_step_values() {
        assert_eq!(exp_quadratic_step(0.0, 10.0, 2.51705), 0.0);
        assert_eq!(exp_quadratic_step(1.0, 10.0, 2.51705), 0.0);
        // 10 * x * (1 - x) * exp(-2.51705 x) at x = 0.123456789, evaluated by hand
        let v = exp_quadratic_step(0.123456789, 10.0, 2.51705);
        assert!((v - 0.7931085631521883).abs() < 1e-14);
    }

    #[test]
    fn henon_step_values() {
        assert_eq!(henon_step([0.0, 0.0], 1.4, 0.3), [1.0, 0.0]);
        let [x, y] = henon_step([1.0, 0.0], 1.4, 0.3);
        assert!((x + 0.4).abs() < 1e-15 && (y - 0.3).abs() < 1e-15);

        let xs = (-0.7 + 6.09f64.sqrt()) / 2.8;
        assert!((xs - 0.6313545).abs() < 1e-7);
        let fixed = [xs, 0.3 * xs];
        let next = henon_step(fixed, 1.4, 0.3);
        assert!((next[0] - fixed[0]).abs() < 1e-12);
        assert!((next[1] - 0.1894063).abs() < 1e-7);
    }

    #[test]
    fn henon_delay_step_values() {
        assert_eq!(henon_delay_step(0.0, 0.0), 1.0);
        assert!((henon_delay_step(0.0, 1.0) + 0.4).abs() < 1e-15);
        assert!((henon_delay_step(1.0, 0.0) - 1.3).abs() < 1e-15);
    }

    #[test]
    fn short_orbits() {
        let s = generate_series(&MapSpec::quadratic(3.8, DEFAULT_X0).burn_in(0), 2).unwrap();
        assert_eq!(s.values()[0], 0.123456789);
        assert!((s.values()[1] - 0.4112178).abs() < 1e-7);

        let s = generate_series(&MapSpec::quadratic(4.0, 0.5).burn_in(0), 3).unwrap();
        assert_eq!(s.values(), &[0.5, 1.0, 0.0]);

        let h =
            generate_series_2d(&MapSpec::henon_2d(1.4, 0.3, (0.12, 0.22)).burn_in(0), 2).unwrap();
        assert_eq!(h.values()[0], [0.12, 0.22]);
        assert!((h.values()[1][0] - 1.19984).abs() < 1e-14);
        assert!((h.values()[1][1] - 0.036).abs() < 1e-15);
    }

    #[test]
    fn parameter_validation() {
        assert!(generate_orbit(&MapSpec::quadratic(4.5, 0.1), 10).is_err());
        assert!(generate_orbit(&MapSpec::quadratic(0.0, 0.1), 10).is_err());
        assert!(generate_orbit(&MapSpec::exp_quadratic(10.0, -1.0, 0.1), 10).is_err());
        assert!(generate_orbit(&MapSpec::henon_2d(f64::NAN, 0.3, (0.0, 0.0)), 10).is_err());
        assert!(generate_orbit(&MapSpec::quadratic(3.8, 0.1), 0).is_err());
        let mut spec = MapSpec::quadratic(3.8, 0.1);
        spec.initial = InitialState::Pair(0.1, 0.2);
        assert!(spec.validate().is_err());
    }

    #[test]
    fn divergence_is_reported() {
        let spec = MapSpec::henon_2d(1.4, 0.3, (3.0, 0.0)).burn_in(0);
        match generate_orbit(&spec, 100) {
            Err(Error::DivergedOrbit { step, value }) => {
                assert!(step > 0 && step < 100);
                assert!(!(value.abs() <= DIVERGENCE_BOUND));
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn delay_form_matches_planar_form() {
        for &(prev, curr) in &[(0.12, 0.22), (-0.3, 0.5), (0.0, 0.9)] {
            let delay = generate_series(
                &MapSpec::henon_delay(1.4, 0.3, (prev, curr)).burn_in(0),
                500,
            )
            .unwrap();
            let planar = generate_series_2d(
                &MapSpec::henon_2d(1.4, 0.3, (curr, 0.3 * prev)).burn_in(0),
                500,
            )
            .unwrap();
            for (d, p) in delay.values().iter().zip(planar.values()) {
                assert!((d - p[0]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn quadratic_orbit_stays_in_unit_interval() {
        for &mu in &[0.5, 2.9, 3.57, 3.8, 4.0] {
            for &x0 in &[1e-6, 0.3, 0.5, 0.999] {
                let s = generate_series(&MapSpec::quadratic(mu, x0).burn_in(10), 2000).unwrap();
                assert!(s.values().iter().all(|&x| (0.0..=1.0).contains(&x)));
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let spec = MapSpec::exp_quadratic(10.0, 2.51705, DEFAULT_X0);
        let a = generate_orbit(&spec, 5000).unwrap();
        let b = generate_orbit(&spec, 5000).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn lyapunov_of_full_logistic_is_ln2() {
        let l = lyapunov_estimate(&MapSpec::quadratic(4.0, DEFAULT_X0), 100_000).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 0.01, "{l}");
    }

    #[test]
    fn lyapunov_at_3_8_is_positive_and_converged() {
        let spec = MapSpec::quadratic(3.8, DEFAULT_X0);
        let a = lyapunov_estimate(&spec, 100_000).unwrap();
        let b = lyapunov_estimate(&spec, 400_000).unwrap();
        assert!(a > 0.0);
        assert!((a - b).abs() < 0.005, "{a} vs {b}");
    }

    #[test]
    fn superstable_orbit_hits_vanishing_derivative() {
        match lyapunov_estimate(&MapSpec::quadratic(2.0, DEFAULT_X0), 1000) {
            Err(Error::DerivativeVanished { .. }) => {}
            Ok(v) => assert!(v < -5.0, "{v}"),
            Err(e) => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn lyapunov_rejects_planar_map() {
        assert!(lyapunov_estimate(&MapSpec::henon_2d(1.4, 0.3, (0.1, 0.1)), 10).is_err());
    }
}
