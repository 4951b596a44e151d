//! Gauss–Legendre panel quadrature for even and principal-value integrals
//! over the real line, with explicit truncation tails.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&n) {
        return r.clone();
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache.lock().unwrap().insert(n, rule.clone());
    rule
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            dp = 1.0;
            z = 0.0;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `∫_a^b f` with an `n`-point Gauss–Legendre rule.
pub fn gl_integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let (x, w) = (&rule.0, &rule.1);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(w).map(|(&xi, &wi)| wi * f(mid + half * xi)).sum::<f64>() * half
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub truncation_t: f64,
    pub panels: usize,
    pub nodes_per_panel: usize,
    pub abs_tol: f64,
    /// Below this `|τ|` integrand assembly switches to cancellation-free forms.
    pub small_tau_radius: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            truncation_t: 1000.0,
            panels: 1000,
            nodes_per_panel: 12,
            abs_tol: 1e-8,
            small_tau_radius: 1e-3,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.truncation_t > 0.0 && self.truncation_t.is_finite()) {
            return Err(Error::Config(format!("quad.T must be positive, got {}", self.truncation_t)));
        }
        if self.panels == 0 || self.nodes_per_panel < 3 {
            return Err(Error::Config("quad.panels must be >= 1 and nodes per panel >= 3".into()));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::Config(format!("quad.tol must be positive, got {}", self.abs_tol)));
        }
        if !(self.small_tau_radius > 0.0) {
            return Err(Error::Config("small-tau radius must be positive".into()));
        }
        Ok(())
    }

    /// Same spec with panel count doubled (same `T`).
    pub fn refined(&self) -> Self {
        QuadratureSpec { panels: 2 * self.panels, ..*self }
    }

    /// Panel width fixed, `T` scaled by `factor`.
    pub fn extended(&self, factor: f64) -> Self {
        let panels = ((self.panels as f64) * factor).round().max(1.0) as usize;
        QuadratureSpec { truncation_t: self.truncation_t * factor, panels, ..*self }
    }
}

/// How the integral beyond `T` is accounted for. Values refer to the
/// half-line integrand actually summed (`h` for even integrals, the paired
/// `h(τ) + h(−τ)` for principal values).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Integrand vanishes beyond `T` (or is known negligible).
    None,
    /// Modelled tail with a rigorous-style error bound.
    Analytic { estimate: Complex64, bound: f64 },
    /// Mean-zero oscillatory integrand: no estimate; the spread of partial
    /// integrals over `[T/2, T]` enters the error budget.
    Oscillatory,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: Complex64,
    /// `|fine − coarse|` over all panels.
    pub discretization: f64,
    /// Tail contribution to the error budget.
    pub tail: f64,
    pub error_budget: f64,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult { value: Complex64::new(0.0, 0.0), discretization: 0.0, tail: 0.0, error_budget: 0.0 }
    }

    /// `c·self`.
    pub fn scale(&self, c: f64) -> Self {
        QuadResult {
            value: self.value * c,
            discretization: self.discretization * c.abs(),
            tail: self.tail * c.abs(),
            error_budget: self.error_budget * c.abs(),
        }
    }
}

/// Panel layout on `(0, T]`: a fine rule and a coarser companion rule
/// (two fewer nodes) on each panel for the discretization estimate.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub spec: QuadratureSpec,
    pub width: f64,
    /// Node offsets inside a panel and their weights, fine rule.
    pub fine_offsets: Vec<f64>,
    pub fine_weights: Vec<f64>,
    pub coarse_offsets: Vec<f64>,
    pub coarse_weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn new(spec: QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let width = spec.truncation_t / spec.panels as f64;
        let map = |n: usize| {
            let r = gauss_legendre(n);
            let off: Vec<f64> = r.0.iter().map(|&x| 0.5 * width * (x + 1.0)).collect();
            let wts: Vec<f64> = r.1.iter().map(|&w| 0.5 * width * w).collect();
            (off, wts)
        };
        let (fine_offsets, fine_weights) = map(spec.nodes_per_panel);
        let (coarse_offsets, coarse_weights) = map(spec.nodes_per_panel - 2);
        Ok(QuadratureRule { spec, width, fine_offsets, fine_weights, coarse_offsets, coarse_weights })
    }

    pub fn panel_start(&self, j: usize) -> f64 {
        j as f64 * self.width
    }

    /// Fine nodes in panel-major order.
    pub fn fine_nodes(&self) -> Vec<f64> {
        self.nodes(&self.fine_offsets)
    }

    pub fn coarse_nodes(&self) -> Vec<f64> {
        self.nodes(&self.coarse_offsets)
    }

    fn nodes(&self, offsets: &[f64]) -> Vec<f64> {
        (0..self.spec.panels)
            .flat_map(|j| offsets.iter().map(move |&o| self.panel_start(j) + o))
            .collect()
    }

    /// Integrates tabulated half-line values (panel-major, fine and coarse
    /// node sets) and applies `factor` (2 for even integrands, 1 for paired ones).
    pub fn integrate_values(&self, fine: &[Complex64], coarse: &[Complex64], tail: Tail, factor: f64) -> Result<QuadResult> {
        let nf = self.fine_offsets.len();
        let nc = self.coarse_offsets.len();
        let panels = self.spec.panels;
        assert_eq!(fine.len(), panels * nf, "fine value count");
        assert_eq!(coarse.len(), panels * nc, "coarse value count");
        let mut partial = Vec::with_capacity(panels + 1);
        let mut sum = Complex64::new(0.0, 0.0);
        let mut disc = 0.0;
        partial.push(sum);
        for j in 0..panels {
            let pf: Complex64 = fine[j * nf..(j + 1) * nf].iter().zip(&self.fine_weights).map(|(v, w)| v * w).sum();
            let pc: Complex64 = coarse[j * nc..(j + 1) * nc].iter().zip(&self.coarse_weights).map(|(v, w)| v * w).sum();
            sum += pf;
            disc += (pf - pc).norm();
            partial.push(sum);
        }
        let (tail_est, tail_err) = match tail {
            Tail::None => (Complex64::new(0.0, 0.0), 0.0),
            Tail::Analytic { estimate, bound } => {
                if factor.abs() * bound > self.spec.abs_tol {
                    return Err(Error::Truncation { tail: factor.abs() * bound, tol: self.spec.abs_tol, t: self.spec.truncation_t });
                }
                (estimate, bound)
            }
            Tail::Oscillatory => {
                let spread = partial[panels / 2..].iter().map(|s| (sum - s).norm()).fold(0.0, f64::max);
                (Complex64::new(0.0, 0.0), spread)
            }
        };
        let value = factor * (sum + tail_est);
        let discretization = factor.abs() * disc;
        let tail_err = factor.abs() * tail_err;
        Ok(QuadResult { value, discretization, tail: tail_err, error_budget: discretization + tail_err })
    }

    /// `∫_{−∞}^{∞} h` for even `h`, as `2∫_0^T h` plus the tail.
    pub fn integrate_even(&self, h: impl Fn(f64) -> Complex64 + Sync, tail: Tail) -> Result<QuadResult> {
        let (fine, coarse) = self.evaluate(&h);
        self.integrate_values(&fine, &coarse, tail, 2.0)
    }

    /// `lim_{δ→0} ∫_{|τ|>δ} h`, computed by integrating `h(τ) + h(−τ)` over
    /// `(0, T]`. Fails if the paired integrand still blows up at 0.
    pub fn principal_value_even(&self, h: impl Fn(f64) -> Complex64 + Sync, tail: Tail) -> Result<QuadResult> {
        let paired = |t: f64| h(t) + h(-t);
        check_removable(paired)?;
        let (fine, coarse) = self.evaluate(&paired);
        self.integrate_values(&fine, &coarse, tail, 1.0)
    }

    fn evaluate(&self, h: &(impl Fn(f64) -> Complex64 + Sync)) -> (Vec<Complex64>, Vec<Complex64>) {
        let fine_nodes = self.fine_nodes();
        let coarse_nodes = self.coarse_nodes();
        let fine = fine_nodes.par_iter().map(|&t| h(t)).collect();
        let coarse = coarse_nodes.par_iter().map(|&t| h(t)).collect();
        (fine, coarse)
    }
}

/// Rejects a paired integrand that grows like `1/τ` towards 0.
pub fn check_removable(paired: impl Fn(f64) -> Complex64) -> Result<()> {
    let a = paired(1e-4).norm();
    let b = paired(1e-6).norm();
    if !b.is_finite() || b > 10.0 * a + 1e-3 {
        return Err(Error::Structure(format!(
            "paired integrand grows towards 0 (|h| = {a:.3e} at 1e-4, {b:.3e} at 1e-6)"
        )));
    }
    Ok(())
}

pub fn integrate_even(h: impl Fn(f64) -> Complex64 + Sync, spec: QuadratureSpec, tail: Tail) -> Result<QuadResult> {
    QuadratureRule::new(spec)?.integrate_even(h, tail)
}

pub fn principal_value_even(h: impl Fn(f64) -> Complex64 + Sync, spec: QuadratureSpec, tail: Tail) -> Result<QuadResult> {
    QuadratureRule::new(spec)?.principal_value_even(h, tail)
}
