//! Even test functions `g` with compactly supported Fourier transforms.
//!
//! Convention: `ĝ(ξ) = ∫ g(x) e^{−2πixξ} dx`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::gl_integrate;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestFnKind {
    /// `ĝ(ξ) = max(0, 1 − |ξ|/σ)`, `g(x) = σ·sinc²(σx)`.
    Fejer,
    /// `ĝ = (tri ∗ tri)/(tri ∗ tri)(0)` with triangles of half-width `σ/2`;
    /// `g(x) = (3σ/4)·sinc⁴(σx/2)`. `ĝ` is C² at the support edge.
    FejerSquaredHat,
}

impl std::str::FromStr for TestFnKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fejer" => Ok(TestFnKind::Fejer),
            "fejer2" | "fejer-squared-hat" | "fejersquaredhat" | "hat2" => Ok(TestFnKind::FejerSquaredHat),
            other => Err(Error::Config(format!("unknown test function '{other}' (expected fejer|fejer2)"))),
        }
    }
}

impl std::fmt::Display for TestFnKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TestFnKind::Fejer => write!(f, "fejer"),
            TestFnKind::FejerSquaredHat => write!(f, "fejer2"),
        }
    }
}

/// `sin(πy)/(πy)`.
pub fn sinc(y: f64) -> f64 {
    if y.abs() < 1e-4 {
        let t = PI * y;
        1.0 - t * t / 6.0 + t.powi(4) / 120.0
    } else {
        (PI * y).sin() / (PI * y)
    }
}

/// Centered cubic B-spline on `[−2, 2]`, equal to `tri ∗ tri` for unit triangles.
fn cubic_bspline(u: f64) -> f64 {
    let a = u.abs();
    if a < 1.0 {
        2.0 / 3.0 - a * a + 0.5 * a * a * a
    } else if a < 2.0 {
        let b = 2.0 - a;
        b * b * b / 6.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestFunction {
    pub kind: TestFnKind,
    /// `supp ĝ = [−σ, σ]`.
    pub sigma: f64,
    /// Overall multiplier; `0` gives `g ≡ 0`.
    pub scale: f64,
}

pub fn make_fejer(sigma: f64) -> Result<TestFunction> {
    TestFunction::new(TestFnKind::Fejer, sigma)
}

impl TestFunction {
    pub fn new(kind: TestFnKind, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Domain(format!("sigma must be positive, got {sigma}")));
        }
        Ok(TestFunction { kind, sigma, scale: 1.0 })
    }

    /// `c·g`.
    pub fn scaled(&self, c: f64) -> Self {
        TestFunction { scale: self.scale * c, ..*self }
    }

    pub fn is_zero(&self) -> bool {
        self.scale == 0.0
    }

    pub fn g(&self, x: f64) -> f64 {
        let s = self.sigma;
        self.scale
            * match self.kind {
                TestFnKind::Fejer => s * sinc(s * x).powi(2),
                TestFnKind::FejerSquaredHat => 0.75 * s * sinc(0.5 * s * x).powi(4),
            }
    }

    pub fn g_hat(&self, xi: f64) -> f64 {
        let s = self.sigma;
        self.scale
            * match self.kind {
                TestFnKind::Fejer => (1.0 - xi.abs() / s).max(0.0),
                TestFnKind::FejerSquaredHat => 1.5 * cubic_bspline(2.0 * xi / s),
            }
    }

    /// `g(0) = ∫ĝ`.
    pub fn g0(&self) -> f64 {
        self.g(0.0)
    }

    /// Points in `(0, σ]` where `ĝ` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.kind {
            TestFnKind::Fejer => vec![self.sigma],
            TestFnKind::FejerSquaredHat => vec![0.5 * self.sigma, self.sigma],
        }
    }

    /// `∫_a^b ĝ(ξ) dξ` for `0 <= a <= b`, exact up to rounding (ĝ is piecewise polynomial).
    pub fn g_hat_integral(&self, a: f64, b: f64) -> f64 {
        let mut cuts = vec![a];
        cuts.extend(self.breakpoints().into_iter().filter(|&c| c > a && c < b));
        cuts.push(b);
        cuts.windows(2).map(|w| gl_integrate(|x| self.g_hat(x), w[0], w[1], 8)).sum()
    }

    pub fn tail_model(&self) -> TailModel {
        let s = self.sigma;
        match self.kind {
            TestFnKind::Fejer => TailModel {
                amplitude: self.scale / (2.0 * PI * PI * s),
                power: 2,
                constant: 1.0,
                waves: vec![(-1.0, 2.0 * PI * s)],
            },
            TestFnKind::FejerSquaredHat => {
                let h = 0.5 * s;
                TailModel {
                    amplitude: self.scale * 1.5 * h / (8.0 * (PI * h).powi(4)),
                    power: 4,
                    constant: 3.0,
                    waves: vec![(-4.0, 2.0 * PI * h), (1.0, 4.0 * PI * h)],
                }
            }
        }
    }
}

/// `∫ g(x)(1 − sin(2πx)/(2πx)) dx = ĝ(0) − ½∫_{−1}^{1} ĝ`.
pub fn usp_density_functional(f: &TestFunction) -> f64 {
    f.g_hat(0.0) - sinc_pairing_check(f)
}

/// `∫ g(x)·sin(2πx)/(2πx) dx = ½∫_{−1}^{1} ĝ`.
pub fn sinc_pairing_check(f: &TestFunction) -> f64 {
    f.g_hat_integral(0.0, f.sigma.min(1.0))
}

/// Exact representation `g(τ) = A τ^{−p}(c₀ + Σ c_k cos(ω_k τ))` valid for `τ ≠ 0`,
/// used to integrate `g` against slowly varying weights beyond a cutoff.
#[derive(Debug, Clone, PartialEq)]
pub struct TailModel {
    pub amplitude: f64,
    pub power: i32,
    pub constant: f64,
    /// `(c_k, ω_k)`.
    pub waves: Vec<(f64, f64)>,
}

impl TailModel {
    /// Upper bound for `|g(τ)|`, `τ > 0`.
    pub fn envelope(&self, t: f64) -> f64 {
        let c: f64 = self.constant.abs() + self.waves.iter().map(|w| w.0.abs()).sum::<f64>();
        self.amplitude.abs() * c / t.powi(self.power)
    }

    /// `∫_T^∞ g(τ)φ(τ) dτ` for a smooth, slowly varying (at most logarithmic)
    /// real weight `φ`. Returns `(estimate, error bound)`.
    pub fn tail_integral(&self, t: f64, phi: impl Fn(f64) -> f64) -> (f64, f64) {
        let p = self.power;
        // τ = T/u, then u = v³ to flatten the endpoint behaviour
        let body = |v: f64| {
            if v <= 0.0 {
                return 0.0;
            }
            let u = v * v * v;
            phi(t / u) * u.powi(p - 2) * 3.0 * v * v
        };
        let mean_a = gl_integrate(body, 0.0, 1.0, 48);
        let mean_b = gl_integrate(body, 0.0, 0.5, 32) + gl_integrate(body, 0.5, 1.0, 32);
        let scale = self.amplitude * t.powi(1 - p);
        let mut estimate = scale * self.constant * mean_a;
        let mut bound = (scale * self.constant * (mean_a - mean_b)).abs();
        // f = φ/τ^p and its first two derivatives at T by differences
        let f = |x: f64| phi(x) / x.powi(p);
        let h = 0.05 * t;
        let (fm, f0, fp) = (f(t - h), f(t), f(t + h));
        let d1 = (fp - fm) / (2.0 * h);
        let d1_half = (f(t + 0.5 * h) - f(t - 0.5 * h)) / h;
        let d2 = (fp - 2.0 * f0 + fm) / (h * h);
        for &(ck, w) in &self.waves {
            // two integrations by parts; the remainder is bounded by |f″(T)|/ω³
            let a = self.amplitude * ck;
            estimate -= a * ((w * t).sin() * f0 / w + (w * t).cos() * d1_half / (w * w));
            bound += a.abs() * (2.0 * d2.abs() / (w * w * w) + 2.0 * (d1 - d1_half).abs() / (w * w));
        }
        (estimate, bound)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fejer_examples() {
        let f = make_fejer(1.5).unwrap();
        assert_eq!(f.g0(), 1.5);
        assert_eq!(f.g_hat(1.5), 0.0);
        assert_eq!(f.g_hat(0.0), 1.0);
        assert!((f.g_hat(1.0) - 1.0 / 3.0).abs() < 1e-15);
        assert!(make_fejer(0.0).is_err());
        assert!(make_fejer(-1.0).is_err());
    }

    #[test]
    fn both_kinds_are_even_and_integrate_to_g0() {
        for kind in [TestFnKind::Fejer, TestFnKind::FejerSquaredHat] {
            for sigma in [0.3, 1.0, 1.7] {
                let f = TestFunction::new(kind, sigma).unwrap();
                for x in [0.1, 0.77, 3.0, 41.5] {
                    assert_eq!(f.g(x), f.g(-x));
                    assert_eq!(f.g_hat(x), f.g_hat(-x));
                }
                assert_eq!(f.g_hat(sigma), 0.0);
                assert_eq!(f.g_hat(sigma * 1.01), 0.0);
                assert!((f.g_hat(0.0) - 1.0).abs() < 1e-15);
                let int = 2.0 * f.g_hat_integral(0.0, sigma);
                assert!((int - f.g0()).abs() < 1e-13, "{kind} {sigma}");
            }
        }
    }

    #[test]
    fn squared_hat_matches_convolution() {
        // direct numeric tri ∗ tri, normalised at 0
        let sigma = 0.8;
        let h = sigma / 2.0;
        let tri = |x: f64| (1.0 - x.abs() / h).max(0.0);
        let conv = |xi: f64| {
            let lo = (xi - h).max(-h);
            let hi = (xi + h).min(h);
            if hi <= lo {
                return 0.0;
            }
            // both factors are linear between these cuts
            let mut cuts = vec![lo, hi, 0.0, xi];
            cuts.retain(|&x| x >= lo && x <= hi);
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            cuts.windows(2).map(|w| gl_integrate(|t| tri(t) * tri(xi - t), w[0], w[1], 8)).sum::<f64>()
        };
        let c0 = conv(0.0);
        let f = TestFunction::new(TestFnKind::FejerSquaredHat, sigma).unwrap();
        for xi in [0.0, 0.1, 0.25, 0.4, 0.55, 0.79] {
            assert!((f.g_hat(xi) - conv(xi) / c0).abs() < 1e-13, "xi={xi}");
        }
    }

    #[test]
    fn usp_functional_values() {
        let third = make_fejer(1.0 / 3.0).unwrap();
        assert!((usp_density_functional(&third) - 5.0 / 6.0).abs() < 1e-14);
        let two = make_fejer(2.0).unwrap();
        assert!((usp_density_functional(&two) - 0.25).abs() < 1e-14);
        assert!((usp_density_functional(&two.scaled(3.0)) - 0.75).abs() < 1e-14);
        assert_eq!(usp_density_functional(&two.scaled(0.0)), 0.0);
        for kind in [TestFnKind::Fejer, TestFnKind::FejerSquaredHat] {
            let f = TestFunction::new(kind, 0.9).unwrap();
            assert!((usp_density_functional(&f) - (f.g_hat(0.0) - f.g0() / 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn sinc_pairing_values() {
        assert!((sinc_pairing_check(&make_fejer(1.0 / 3.0).unwrap()) - 1.0 / 6.0).abs() < 1e-14);
        assert!((sinc_pairing_check(&make_fejer(2.0).unwrap()) - 0.75).abs() < 1e-14);
    }

    #[test]
    fn tail_model_reproduces_g() {
        for kind in [TestFnKind::Fejer, TestFnKind::FejerSquaredHat] {
            let f = TestFunction::new(kind, 0.7).unwrap().scaled(1.3);
            let m = f.tail_model();
            for t in [0.37f64, 2.0, 13.3, 250.0] {
                let rep = m.amplitude / t.powi(m.power)
                    * (m.constant + m.waves.iter().map(|&(c, w)| c * (w * t).cos()).sum::<f64>());
                assert!((rep - f.g(t)).abs() < 1e-12 * f.g0(), "{kind} t={t}");
                assert!(f.g(t).abs() <= m.envelope(t) * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn fejer_decay_bound() {
        let sigma = 0.3;
        let f = make_fejer(sigma).unwrap();
        for i in 1..2000 {
            let t = 0.05 * i as f64;
            assert!(f.g(t) <= 1.0 / (PI * PI * sigma * t * t) + 1e-15);
        }
    }

    #[test]
    fn tail_integral_against_direct_quadrature() {
        // compare with a long panel integral of g·φ on [T, T + 4·10⁴] plus the model beyond
        for kind in [TestFnKind::Fejer, TestFnKind::FejerSquaredHat] {
            let f = TestFunction::new(kind, 0.45).unwrap();
            let m = f.tail_model();
            let t = 60.0;
            let far = t + 40_000.0;
            let phi = |x: f64| (x / 3.0).ln();
            let mut direct = 0.0;
            let mut a = t;
            while a < far {
                direct += gl_integrate(|x| f.g(x) * phi(x), a, a + 0.5, 10);
                a += 0.5;
            }
            let (far_est, _) = m.tail_integral(far, phi);
            let (est, bound) = m.tail_integral(t, phi);
            let truth = direct + far_est;
            assert!((est - truth).abs() <= bound + 1e-12, "{kind}: est {est:e} truth {truth:e} bound {bound:e}");
            assert!(bound < 1e-3 * est.abs());
        }
    }
}
