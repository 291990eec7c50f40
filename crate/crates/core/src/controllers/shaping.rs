//! Proportional shaping functions γ for the axis–angle law.
//!
//! A shaping function must vanish at the origin, be strictly increasing and
//! lie in the first and third quadrants (an extended class-K∞ function on the
//! domain of interest).

use core::f64::consts::{LN_2, TAU};

/// Shaping function with its derivative and antiderivative from zero.
pub trait GammaFunction {
    fn value(&self, theta: f64) -> f64;

    fn derivative(&self, theta: f64) -> f64;

    /// `∫₀^θ γ(φ) dφ`. Defaults to adaptive quadrature.
    fn integral(&self, theta: f64) -> f64 {
        integrate(|x| self.value(x), 0.0, theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum ShapingError {
    #[error("saturation angle must be positive and finite, got {0}")]
    BadSaturation(f64),
    #[error("rate parameter must be positive and finite, got {0}")]
    BadRate(f64),
    #[error("slope must be positive and finite, got {0}")]
    BadSlope(f64),
}

/// `γ(θ) = Θ_max (1 − e^{−ξθ/Θ_max}) / (1 + e^{−ξθ/Θ_max})`, evaluated as the
/// equivalent `Θ_max tanh(ξθ / 2Θ_max)`.
pub fn sigmoid_gamma(theta: f64, theta_max: f64, xi: f64) -> f64 {
    theta_max * libm::tanh(0.5 * xi * theta / theta_max)
}

/// `∂γ/∂θ = 2ξ e^{−ξ|θ|/Θ_max} / (1 + e^{−ξ|θ|/Θ_max})²`.
pub fn sigmoid_gamma_deriv(theta: f64, theta_max: f64, xi: f64) -> f64 {
    let e = libm::exp(-xi * theta.abs() / theta_max);
    let d = 1.0 + e;
    2.0 * xi * e / (d * d)
}

/// `ln cosh x` without overflow.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + libm::log1p(libm::exp(-2.0 * a)) - LN_2
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sigmoid {
    theta_max: f64,
    xi: f64,
}

impl Sigmoid {
    pub fn new(theta_max: f64, xi: f64) -> Result<Self, ShapingError> {
        if !(theta_max > 0.0 && theta_max.is_finite()) {
            return Err(ShapingError::BadSaturation(theta_max));
        }
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(ShapingError::BadRate(xi));
        }
        Ok(Self { theta_max, xi })
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

impl GammaFunction for Sigmoid {
    #[inline]
    fn value(&self, theta: f64) -> f64 {
        sigmoid_gamma(theta, self.theta_max, self.xi)
    }

    #[inline]
    fn derivative(&self, theta: f64) -> f64 {
        sigmoid_gamma_deriv(theta, self.theta_max, self.xi)
    }

    /// Closed form `(2Θ_max²/ξ) ln cosh(ξθ / 2Θ_max)`; checked against
    /// quadrature in the tests.
    fn integral(&self, theta: f64) -> f64 {
        let a = 0.5 * self.xi / self.theta_max;
        self.theta_max / a * ln_cosh(a * theta)
    }
}

/// `γ(θ) = kθ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    slope: f64,
}

impl Linear {
    pub fn new(slope: f64) -> Result<Self, ShapingError> {
        if !(slope > 0.0 && slope.is_finite()) {
            return Err(ShapingError::BadSlope(slope));
        }
        Ok(Self { slope })
    }

    pub fn slope(&self) -> f64 {
        self.slope
    }
}

impl GammaFunction for Linear {
    fn value(&self, theta: f64) -> f64 {
        self.slope * theta
    }

    fn derivative(&self, _theta: f64) -> f64 {
        self.slope
    }

    fn integral(&self, theta: f64) -> f64 {
        0.5 * self.slope * theta * theta
    }
}

/// Shaping functions selectable from configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gamma {
    Sigmoid(Sigmoid),
    Linear(Linear),
}

impl GammaFunction for Gamma {
    #[inline]
    fn value(&self, theta: f64) -> f64 {
        match self {
            Gamma::Sigmoid(g) => g.value(theta),
            Gamma::Linear(g) => g.value(theta),
        }
    }

    #[inline]
    fn derivative(&self, theta: f64) -> f64 {
        match self {
            Gamma::Sigmoid(g) => g.derivative(theta),
            Gamma::Linear(g) => g.derivative(theta),
        }
    }

    fn integral(&self, theta: f64) -> f64 {
        match self {
            Gamma::Sigmoid(g) => g.integral(theta),
            Gamma::Linear(g) => g.integral(theta),
        }
    }
}

impl From<Sigmoid> for Gamma {
    fn from(g: Sigmoid) -> Self {
        Gamma::Sigmoid(g)
    }
}

impl From<Linear> for Gamma {
    fn from(g: Linear) -> Self {
        Gamma::Linear(g)
    }
}

const PANELS: usize = 64;
const MAX_DEPTH: u32 = 40;

/// Adaptive Simpson quadrature over 64 equal panels.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let h = (b - a) / PANELS as f64;
    let tol = 1e-14 * (b - a).abs().max(1.0) / PANELS as f64;
    (0..PANELS)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == PANELS { b } else { lo + h };
            let mid = 0.5 * (lo + hi);
            let (flo, fmid, fhi) = (f(lo), f(mid), f(hi));
            let whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
            simpson_step(&f, lo, hi, flo, fmid, fhi, whole, tol, MAX_DEPTH)
        })
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Outcome of the class-K∞ property checks on a dense grid over `[−2π, 2π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapingReport {
    pub value_at_zero: f64,
    pub strictly_increasing: bool,
    pub sign_condition: bool,
    /// Largest relative mismatch between the reported derivative and a
    /// central difference of the value.
    pub max_derivative_error: f64,
    pub integral_nonnegative: bool,
}

impl ShapingReport {
    pub const DERIVATIVE_TOL: f64 = 1e-6;

    pub fn passed(&self) -> bool {
        self.value_at_zero == 0.0
            && self.strictly_increasing
            && self.sign_condition
            && self.max_derivative_error <= Self::DERIVATIVE_TOL
            && self.integral_nonnegative
    }
}

pub fn check_shaping<G: GammaFunction + ?Sized>(g: &G) -> ShapingReport {
    const N: usize = 4001;
    const H: f64 = 1e-5;
    let grid = |i: usize| -TAU + 2.0 * TAU * i as f64 / (N - 1) as f64;

    let mut strictly_increasing = true;
    let mut sign_condition = true;
    let mut max_derivative_error = 0.0f64;
    let mut prev = f64::NEG_INFINITY;
    for i in 0..N {
        let th = grid(i);
        let v = g.value(th);
        if v <= prev {
            strictly_increasing = false;
        }
        prev = v;
        if th != 0.0 && v.signum() != th.signum() {
            sign_condition = false;
        }
        let fd = (g.value(th + H) - g.value(th - H)) / (2.0 * H);
        let d = g.derivative(th);
        let err = (d - fd).abs() / d.abs().max(1e-12);
        max_derivative_error = max_derivative_error.max(err);
    }
    let integral_nonnegative = (0..=64).all(|i| g.integral(TAU * i as f64 / 64.0) >= 0.0);

    ShapingReport {
        value_at_zero: g.value(0.0),
        strictly_increasing,
        sign_condition,
        max_derivative_error,
        integral_nonnegative,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_sigmoid() -> Sigmoid {
        Sigmoid::new(1.0, 1.5).unwrap()
    }

    #[test]
    fn sigmoid_matches_exponential_form() {
        // Direct evaluation of the exponential ratio at (Θ_max, ξ, θ) = (1, 1.5, 1).
        let e = libm::exp(-1.5);
        let want = (1.0 - e) / (1.0 + e);
        assert!((sigmoid_gamma(1.0, 1.0, 1.5) - want).abs() < 1e-15);
        assert!((want - 0.635_148_952_387_287_3).abs() < 1e-15);
        assert_eq!(sigmoid_gamma(0.0, 1.0, 1.5), 0.0);
        for th in [0.1, 0.7, 2.5, 6.0] {
            assert_eq!(sigmoid_gamma(-th, 1.3, 0.4), -sigmoid_gamma(th, 1.3, 0.4));
            assert!(sigmoid_gamma(th, 1.3, 0.4).abs() < 1.3);
        }
    }

    #[test]
    fn slope_at_origin_is_half_xi() {
        let g = paper_sigmoid();
        assert_eq!(g.derivative(0.0), 0.75);
        let h = 1e-6;
        let slope = (g.value(h) - g.value(-h)) / (2.0 * h);
        assert!((slope - 0.75).abs() < 1e-6);
    }

    #[test]
    fn derivative_is_even_and_matches_finite_difference() {
        let g = Sigmoid::new(0.8, 2.3).unwrap();
        let h = 1e-5;
        for i in 0..=400 {
            let th = -TAU + 2.0 * TAU * i as f64 / 400.0;
            assert_eq!(g.derivative(th), g.derivative(-th));
            let fd = (g.value(th + h) - g.value(th - h)) / (2.0 * h);
            assert!((g.derivative(th) - fd).abs() < 1e-8, "θ={th}");
            assert!(g.derivative(th) > 0.0);
        }
    }

    #[test]
    fn integral_closed_form_agrees_with_quadrature() {
        let g = paper_sigmoid();
        assert_eq!(g.integral(0.0), 0.0);
        let mut prev = 0.0;
        for i in 1..=200 {
            let th = TAU * i as f64 / 200.0 - 1e-9;
            let closed = g.integral(th);
            let quad = integrate(|x| g.value(x), 0.0, th);
            assert!((closed - quad).abs() < 1e-9, "θ={th}: {closed} vs {quad}");
            assert!(closed > prev);
            prev = closed;
        }
    }

    #[test]
    fn linear_integral_is_analytic() {
        let g = Linear::new(1.0).unwrap();
        assert_eq!(g.integral(1.0), 0.5);
        assert!((integrate(|x| g.value(x), 0.0, 1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn parameter_validation() {
        assert_eq!(Sigmoid::new(0.0, 1.0), Err(ShapingError::BadSaturation(0.0)));
        assert_eq!(Sigmoid::new(1.0, -1.0), Err(ShapingError::BadRate(-1.0)));
        assert!(Linear::new(f64::INFINITY).is_err());
    }

    #[test]
    fn class_k_infinity_checks() {
        assert!(check_shaping(&paper_sigmoid()).passed());
        assert!(check_shaping(&Gamma::from(Linear::new(2.0).unwrap())).passed());

        struct Bad;
        impl GammaFunction for Bad {
            fn value(&self, t: f64) -> f64 {
                libm::sin(t)
            }
            fn derivative(&self, t: f64) -> f64 {
                libm::cos(t)
            }
        }
        let r = check_shaping(&Bad);
        assert!(!r.strictly_increasing && !r.sign_condition && !r.passed());
    }
}
