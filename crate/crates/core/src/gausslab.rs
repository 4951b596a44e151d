//! Poisson-summation lab for the odd prime sum: Gauss-type sums, the
//! truncated Möbius split of `μ(d)²`, a smooth plateau weight `Φ` on `(1, 2)`
//! with its transform, and a small-scale check of the smoothed-sum expansion.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{is_prime, is_squarefree, jacobi, kronecker};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::testfn::{sinc, TestFunction};

// ---------------------------------------------------------------------------
// Gauss-type sums

fn normalizer(k: u64) -> Complex64 {
    // (1+i)/2 + (−1|k)(1−i)/2
    if k % 4 == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        Complex64::new(0.0, 1.0)
    }
}

/// `G_m(k)` for odd `k`: the character sum `Σ_a (a|k) e(am/k)` divided by
/// `(1+i)/2 + (−1|k)(1−i)/2`.
pub fn gauss_sum(m: i64, k: u64) -> Result<Complex64> {
    if k.is_multiple_of(2) {
        return Err(Error::Domain(format!("G_m(k) needs odd k, got {k}")));
    }
    let r = m.rem_euclid(k as i64) as u64;
    let s: Complex64 = (0..k)
        .map(|a| {
            let j = jacobi(a, k);
            if j == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                let ph = 2.0 * PI * ((a * r) % k) as f64 / k as f64;
                j as f64 * Complex64::from_polar(1.0, ph)
            }
        })
        .sum();
    Ok(s / normalizer(k))
}

/// `G_m(k)` for all odd `k <= k_max` and `0 <= m <= m_max`.
#[derive(Debug, Clone)]
pub struct GaussSumTable {
    pub k_max: u64,
    pub m_max: u64,
    rows: Vec<Vec<Complex64>>,
}

impl GaussSumTable {
    pub fn build(k_max: u64, m_max: u64) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::Domain("k_max must be positive".into()));
        }
        let ks: Vec<u64> = (1..=k_max).step_by(2).collect();
        let rows = ks
            .par_iter()
            .map(|&k| {
                let chi: Vec<f64> = (0..k).map(|a| jacobi(a, k) as f64).collect();
                let roots: Vec<Complex64> = (0..k).map(|r| Complex64::from_polar(1.0, 2.0 * PI * r as f64 / k as f64)).collect();
                let eps = normalizer(k);
                // periodic in m, so only residues are summed
                let per: Vec<Complex64> = (0..k)
                    .map(|r| {
                        let s: Complex64 = (0..k).filter(|&a| chi[a as usize] != 0.0).map(|a| chi[a as usize] * roots[((a * r) % k) as usize]).sum();
                        s / eps
                    })
                    .collect();
                (0..=m_max).map(|m| per[(m % k) as usize]).collect()
            })
            .collect();
        Ok(GaussSumTable { k_max, m_max, rows })
    }

    pub fn get(&self, m: u64, k: u64) -> Option<Complex64> {
        if k.is_multiple_of(2) || k > self.k_max || m > self.m_max {
            return None;
        }
        Some(self.rows[(k / 2) as usize][m as usize])
    }

    /// Rows `k,m,re,im` in increasing `k` then `m`.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "k,m,re,im")?;
        for (i, row) in self.rows.iter().enumerate() {
            let k = 2 * i as u64 + 1;
            for (m, g) in row.iter().enumerate() {
                writeln!(w, "{k},{m},{:.15e},{:.15e}", g.re, g.im)?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Möbius split

fn mobius_small(mut n: u64) -> i64 {
    let mut mu = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

/// `(M_Z(d), R_Z(d))` with `M_Z = Σ_{ℓ²|d, ℓ<=Z} μ(ℓ)` and `R_Z = Σ_{ℓ²|d, ℓ>Z} μ(ℓ)`.
pub fn mz_rz(d: u64, z: u64) -> (i64, i64) {
    let (mut m, mut r) = (0, 0);
    let mut l = 1u64;
    while l * l <= d {
        if d.is_multiple_of(l * l) {
            let mu = mobius_small(l);
            if l <= z {
                m += mu;
            } else {
                r += mu;
            }
        }
        l += 1;
    }
    (m, r)
}

// ---------------------------------------------------------------------------
// Smoothstep and its derivatives via truncated Taylor series

fn jet_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len()).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
}

fn jet_recip(a: &[f64]) -> Vec<f64> {
    let mut b = vec![0.0; a.len()];
    b[0] = 1.0 / a[0];
    for k in 1..a.len() {
        b[k] = -b[0] * (1..=k).map(|i| a[i] * b[k - i]).sum::<f64>();
    }
    b
}

fn jet_exp(a: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; a.len()];
    e[0] = a[0].exp();
    for k in 1..a.len() {
        e[k] = (1..=k).map(|i| i as f64 * a[i] * e[k - i]).sum::<f64>() / k as f64;
    }
    e
}

/// Taylor coefficients of `ψ(x₀ + sε)`, `ψ(x) = e^{−1/x}`.
fn psi_jet(x0: f64, s: f64, n: usize) -> Vec<f64> {
    let mut lin = vec![0.0; n + 1];
    lin[0] = x0;
    if n > 0 {
        lin[1] = s;
    }
    let inv: Vec<f64> = jet_recip(&lin).into_iter().map(|c| -c).collect();
    jet_exp(&inv)
}

/// Taylor coefficients at `x` of `S(x) = ψ(x)/(ψ(x) + ψ(1−x))` up to order `n`.
fn smoothstep_jet(x: f64, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n + 1];
    // ψ below e^{−1000}: the jet is flat to machine precision
    if x <= 1e-3 {
        return out;
    }
    if x >= 1.0 - 1e-3 {
        out[0] = 1.0;
        return out;
    }
    let a = psi_jet(x, 1.0, n);
    let b = psi_jet(1.0 - x, -1.0, n);
    let sum: Vec<f64> = a.iter().zip(&b).map(|(p, q)| p + q).collect();
    jet_mul(&a, &jet_recip(&sum))
}

/// `S^{(j)}(x)` for `j = 0..=n`.
fn smoothstep_derivs(x: f64, n: usize) -> Vec<f64> {
    let mut fact = 1.0;
    smoothstep_jet(x, n)
        .into_iter()
        .enumerate()
        .map(|(k, c)| {
            if k > 0 {
                fact *= k as f64;
            }
            c * fact
        })
        .collect()
}

const RAMP_PANELS: usize = 128;
const RAMP_NODES: usize = 24;

fn ramp_nodes() -> (Vec<f64>, Vec<f64>) {
    let gl = gauss_legendre(RAMP_NODES);
    let h = 1.0 / RAMP_PANELS as f64;
    let mut xs = Vec::with_capacity(RAMP_PANELS * RAMP_NODES);
    let mut ws = Vec::with_capacity(RAMP_PANELS * RAMP_NODES);
    for j in 0..RAMP_PANELS {
        for (t, w) in gl.0.iter().zip(&gl.1) {
            xs.push(h * (j as f64 + 0.5 * (t + 1.0)));
            ws.push(0.5 * h * w);
        }
    }
    (xs, ws)
}

// ---------------------------------------------------------------------------
// Ramp transform b(η) = ∫₀¹ S′(x) cos(2πη(x − ½)) dx, tabulated

const B_ETA_MAX: f64 = 160.0;
const B_STEP: f64 = 0.02;
const B_GHOST: usize = 6;

struct RampTable {
    values: Vec<f64>,
    interp_error: f64,
}

struct RampQuad {
    xs: Vec<f64>,
    wd: Vec<f64>,
}

impl RampQuad {
    fn new() -> Self {
        let (xs, ws) = ramp_nodes();
        let wd = xs.iter().zip(&ws).map(|(&x, &w)| w * smoothstep_jet(x, 1)[1]).collect();
        RampQuad { xs, wd }
    }

    fn b(&self, eta: f64) -> f64 {
        self.xs.iter().zip(&self.wd).map(|(&x, &w)| w * (2.0 * PI * eta * (x - 0.5)).cos()).sum()
    }
}

fn ramp_table() -> &'static RampTable {
    static TABLE: OnceLock<RampTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let q = RampQuad::new();
        let n = (B_ETA_MAX / B_STEP).round() as usize + B_GHOST;
        let values: Vec<f64> = (0..=n).into_par_iter().map(|i| q.b(i as f64 * B_STEP)).collect();
        let mut t = RampTable { values, interp_error: 0.0 };
        let probes: Vec<f64> = (0..(n - B_GHOST)).step_by(13).map(|i| (i as f64 + 0.5) * B_STEP).collect();
        let err = probes.par_iter().map(|&e| (lagrange(&t.values, e) - q.b(e)).abs()).reduce(|| 0.0, f64::max);
        // measured interpolation error plus the quadrature floor
        t.interp_error = 2.0 * err + 1e-15;
        t
    })
}

/// Eight-point Lagrange interpolation on the uniform grid, using `b(−η) = b(η)`.
fn lagrange(values: &[f64], eta: f64) -> f64 {
    let s = eta.abs() / B_STEP;
    let i = s.floor() as i64;
    let frac = s - i as f64;
    let mut acc = 0.0;
    for a in -3..=4i64 {
        let mut w = 1.0;
        for b in -3..=4i64 {
            if a != b {
                w *= (frac - b as f64) / (a - b) as f64;
            }
        }
        let idx = (i + a).unsigned_abs() as usize;
        acc += w * values[idx];
    }
    acc
}

fn ramp_b(eta: f64) -> f64 {
    if eta.abs() > B_ETA_MAX {
        0.0
    } else {
        lagrange(&ramp_table().values, eta)
    }
}

// ---------------------------------------------------------------------------
// Smoothing weight

/// Plateau weight on `(1, 2)`: `Φ(t) = S((t−1)U)` on the left ramp,
/// `S((2−t)U)` on the right ramp, 1 in between.
#[derive(Debug, Clone)]
pub struct SmoothingPhi {
    pub u: f64,
    pub j_max: usize,
    /// Measured `max|S^{(j)}|`, so that `|Φ^{(j)}| <= c_j U^j`.
    pub c: Vec<f64>,
    /// Measured upper bounds for `∫₀¹ |S^{(j)}|`, `j = 0..=j_max`.
    pub l1: Vec<f64>,
}

pub fn make_phi(u: f64, j_max: usize) -> Result<SmoothingPhi> {
    if !(u >= 4.0) || !u.is_finite() {
        return Err(Error::Domain(format!("U must be at least 4, got {u}")));
    }
    if j_max < 2 {
        return Err(Error::Domain("j_max must be at least 2".into()));
    }
    let n = 20_000;
    let c = (0..=n)
        .into_par_iter()
        .map(|i| smoothstep_derivs(i as f64 / n as f64, j_max).into_iter().map(f64::abs).collect::<Vec<_>>())
        .reduce(|| vec![0.0; j_max + 1], |a, b| a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect());
    let (xs, ws) = ramp_nodes();
    let l1 = xs
        .par_iter()
        .zip(&ws)
        .map(|(&x, &w)| smoothstep_derivs(x, j_max).into_iter().map(|d| w * d.abs()).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .into_iter()
        .fold(vec![0.0; j_max + 1], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect());
    // quadrature of |·| across sign changes is only first-order accurate
    let l1 = l1.into_iter().map(|v| 1.05 * v).collect();
    Ok(SmoothingPhi { u, j_max, c, l1 })
}

impl SmoothingPhi {
    pub fn eval(&self, t: f64) -> f64 {
        if t <= 1.0 || t >= 2.0 {
            0.0
        } else if t < 1.0 + 1.0 / self.u {
            smoothstep_jet((t - 1.0) * self.u, 0)[0]
        } else if t > 2.0 - 1.0 / self.u {
            smoothstep_jet((2.0 - t) * self.u, 0)[0]
        } else {
            1.0
        }
    }

    /// `Φ^{(j)}(t)` for `j <= j_max`.
    pub fn derivative(&self, t: f64, j: usize) -> Result<f64> {
        if j > self.j_max {
            return Err(Error::Domain(format!("derivative order {j} above j_max = {}", self.j_max)));
        }
        if j == 0 {
            return Ok(self.eval(t));
        }
        Ok(if t <= 1.0 || t >= 2.0 {
            0.0
        } else if t < 1.0 + 1.0 / self.u {
            self.u.powi(j as i32) * smoothstep_derivs((t - 1.0) * self.u, j)[j]
        } else if t > 2.0 - 1.0 / self.u {
            (-self.u).powi(j as i32) * smoothstep_derivs((2.0 - t) * self.u, j)[j]
        } else {
            0.0
        })
    }

    /// `∫Φ = 1 − 1/U`.
    pub fn integral(&self) -> f64 {
        1.0 - 1.0 / self.u
    }

    /// `Φ̂(ξ) = ∫Φ(t) e^{−2πiξt} dt = b(ξ/U)·e^{−3πiξ}·(1 − 1/U)·sinc((1 − 1/U)ξ)`.
    pub fn hat(&self, xi: f64) -> Complex64 {
        let w = self.integral();
        let a = ramp_b(xi / self.u) * w * sinc(w * xi);
        Complex64::from_polar(a, -3.0 * PI * xi)
    }

    /// `Φ̃(ξ)` and `Φ̃(−ξ)`, both real since `Φ̂(−ξ)` is the conjugate of `Φ̂(ξ)`.
    fn tilde_pair(&self, xi: f64) -> (f64, f64) {
        let w = self.integral();
        let a = ramp_b(xi / self.u) * w * sinc(w * xi);
        let (s, c) = (3.0 * PI * xi).sin_cos();
        (a * (c + s), a * (c - s))
    }

    /// Bound `|b(η)| <= ∫|S^{(j+1)}| / (2π|η|)^j`, best over `j`.
    pub fn ramp_bound(&self, eta: f64) -> f64 {
        (1..self.j_max).map(|j| self.l1[j + 1] / (2.0 * PI * eta.abs()).powi(j as i32)).fold(1.0, f64::min)
    }
}

/// `Φ̃(ξ) = (1+i)/2·Φ̂(ξ) + (1−i)/2·Φ̂(−ξ)`.
pub fn phi_tilde(phi: &SmoothingPhi, xi: f64) -> Complex64 {
    let h = Complex64::new(0.5, 0.5);
    h * phi.hat(xi) + h.conj() * phi.hat(-xi)
}

/// `Φ̂(ξ)` by direct Gauss–Legendre quadrature of `Φ(t)e^{−2πiξt}` over `[1, 2]`.
pub fn phi_hat_quadrature(phi: &SmoothingPhi, xi: f64) -> Complex64 {
    let gl = gauss_legendre(16);
    let r = 1.0 / phi.u;
    let ramp_panels = 64 + (8.0 * xi.abs() * r) as usize;
    let mid_panels = 16 + (2.0 * xi.abs()) as usize;
    let pieces = [(1.0, 1.0 + r, ramp_panels), (1.0 + r, 2.0 - r, mid_panels), (2.0 - r, 2.0, ramp_panels)];
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b, n) in pieces {
        let h = (b - a) / n as f64;
        for j in 0..n {
            let lo = a + j as f64 * h;
            for (t, w) in gl.0.iter().zip(&gl.1) {
                let x = lo + 0.5 * h * (t + 1.0);
                acc += 0.5 * h * w * phi.eval(x) * Complex64::from_polar(1.0, -2.0 * PI * xi * x);
            }
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// Smoothed sum and its Poisson expansion

#[derive(Debug, Clone, Copy)]
pub struct LabOptions {
    /// Requested bound on the m-truncation tail of the Poisson route.
    pub tol: f64,
    pub j_max: usize,
    /// Hard cap on `|m|` per `(p, α)` pair.
    pub m_max: u64,
}

impl Default for LabOptions {
    fn default() -> Self {
        LabOptions { tol: 1e-6, j_max: 8, m_max: u64::MAX }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothedSumRecord {
    pub x: f64,
    pub y: f64,
    pub z: u64,
    pub u: f64,
    pub s_direct: f64,
    pub s_smoothed: f64,
    pub s_m_direct: f64,
    pub s_m_poisson: f64,
    /// `|S_direct − S_smoothed|`.
    pub smoothing_gap: f64,
    /// `Σ μ(d)²|P(d)|(1 − Φ(d/X))` over `X < d < 2X`, the triangle-inequality
    /// majorant of the smoothing gap.
    pub smoothing_majorant: f64,
    /// `X log⁷X / U`, the scale the smoothing gap is measured against.
    pub smoothing_scale: f64,
    /// `|S_M_direct − S_M_poisson|`.
    pub poisson_gap: f64,
    /// Certified bound on the m-truncation tail plus table interpolation error.
    pub poisson_budget: f64,
    /// Largest `|m|` used over all `(p, α)` pairs.
    pub max_m: u64,
    pub pairs: usize,
}

pub fn smoothed_sum_compare(x: f64, y: f64, z: u64, u: f64, f: &TestFunction) -> Result<SmoothedSumRecord> {
    smoothed_sum_compare_with(x, y, z, u, f, LabOptions::default())
}

pub fn smoothed_sum_compare_with(x: f64, y: f64, z: u64, u: f64, f: &TestFunction, opts: LabOptions) -> Result<SmoothedSumRecord> {
    if !(10.0..=1e4).contains(&x) || !(3.0..=1e3).contains(&y) {
        return Err(Error::Domain(format!("lab needs 10 <= X <= 1e4 and 3 <= Y <= 1e3, got X = {x}, Y = {y}")));
    }
    if z == 0 {
        return Err(Error::Domain("Z must be positive".into()));
    }
    let phi = make_phi(u, opts.j_max)?;
    let l = x.ln();
    let primes: Vec<(u64, f64)> = (3..y.ceil() as u64)
        .filter(|&p| is_prime(p) && (p as f64) < y)
        .map(|p| (p, (p as f64).ln() / (p as f64).sqrt() * f.g_hat((p as f64).ln() / l)))
        .filter(|&(_, w)| w != 0.0)
        .collect();

    let weight = |d: u64| -> f64 { primes.iter().map(|&(p, w)| w * kronecker(8 * d as i64, p) as f64).sum() };
    let (d_lo, d_hi) = (x.floor() as u64 + 1, (2.0 * x).ceil() as u64 - 1);
    let rows: Vec<(f64, f64, f64, f64)> = (d_lo..=d_hi)
        .into_par_iter()
        .filter(|d| d % 2 == 1)
        .map(|d| {
            let pw = weight(d);
            let sf = if is_squarefree(d) { 1.0 } else { 0.0 };
            let ph = phi.eval(d as f64 / x);
            let mz = mz_rz(d, z).0 as f64;
            let inside = (d as f64) > x && (d as f64) < 2.0 * x;
            let sharp = if inside { sf * pw } else { 0.0 };
            let major = if inside { sf * pw.abs() * (1.0 - ph) } else { 0.0 };
            (sharp, sf * pw * ph, mz * pw * ph, major)
        })
        .collect();
    let s_direct: f64 = rows.iter().map(|r| r.0).sum();
    let s_smoothed: f64 = rows.iter().map(|r| r.1).sum();
    let s_m_direct: f64 = rows.iter().map(|r| r.2).sum();
    let smoothing_majorant: f64 = rows.iter().map(|r| r.3).sum();

    let alphas: Vec<(u64, f64)> = (1..=z).step_by(2).filter(|&a| is_squarefree(a)).map(|a| (a, mobius_small(a) as f64)).collect();
    let mut pairs = Vec::new();
    for &(p, _) in &primes {
        for &(a, mu) in &alphas {
            if a % p != 0 {
                pairs.push((p, a, mu));
            }
        }
    }
    let share = opts.tol / pairs.len().max(1) as f64;
    let delta = ramp_table().interp_error;

    struct PairOut {
        value: f64,
        tail: f64,
        m_used: u64,
        m_needed: u64,
    }
    let outs: Vec<PairOut> = pairs
        .par_iter()
        .map(|&(p, a, mu)| {
            let pf = p as f64;
            let ghat = f.g_hat(pf.ln() / l);
            let pref = 0.5 * x * pf.ln() / pf.powf(1.5) * ghat * mu / (a * a) as f64;
            let c = x / (2.0 * (a * a) as f64 * pf);
            let tail_scale = pref.abs() * 2.0 * 2f64.sqrt() * pf.sqrt() / (PI * c);
            // Σ_{m>M} |b(mc/U)|/m  <=  Σ_j-bound
            let tail_at = |m: u64| -> f64 {
                (1..phi.j_max)
                    .map(|j| {
                        let k = phi.l1[j + 1] * (phi.u / (2.0 * PI * c)).powi(j as i32) / j as f64;
                        k / (m as f64).powi(j as i32)
                    })
                    .fold(f64::INFINITY, f64::min)
                    * tail_scale
            };
            let m_needed = (1..phi.j_max)
                .map(|j| {
                    let k = tail_scale * phi.l1[j + 1] * (phi.u / (2.0 * PI * c)).powi(j as i32) / j as f64;
                    (k / share).powf(1.0 / j as f64).ceil().max(1.0) as u64
                })
                .min()
                .unwrap_or(1);
            let m_table = (B_ETA_MAX * phi.u / c).floor().max(1.0) as u64;
            let m_used = m_needed.min(m_table).min(opts.m_max);
            let g: Vec<Complex64> = (0..p).map(|r| gauss_sum(r as i64, p).expect("odd prime")).collect();
            let mut acc = 0.0;
            for m in 1..=m_used {
                let (tp, tm) = phi.tilde_pair(m as f64 * c);
                let r = (m % p) as usize;
                let gp = g[r];
                let gm = g[(p as usize - r) % p as usize];
                let term = (gp * tp + gm * tm).re;
                acc += if m % 2 == 0 { term } else { -term };
            }
            let interp = tail_scale * delta * (1.0 + (m_used as f64).ln());
            PairOut { value: pref * acc, tail: tail_at(m_used) + interp, m_used, m_needed }
        })
        .collect();
    let s_m_poisson: f64 = outs.iter().map(|o| o.value).sum();
    let poisson_budget: f64 = outs.iter().map(|o| o.tail).sum();
    let max_m = outs.iter().map(|o| o.m_used).max().unwrap_or(0);
    if poisson_budget > opts.tol {
        let suggested = outs.iter().map(|o| o.m_needed).max().unwrap_or(0);
        return Err(Error::MTruncation { tail: poisson_budget, tol: opts.tol, suggested });
    }
    Ok(SmoothedSumRecord {
        x,
        y,
        z,
        u,
        s_direct,
        s_smoothed,
        s_m_direct,
        s_m_poisson,
        smoothing_gap: (s_direct - s_smoothed).abs(),
        smoothing_majorant,
        smoothing_scale: x * l.powi(7) / u,
        poisson_gap: (s_m_direct - s_m_poisson).abs(),
        poisson_budget,
        max_m,
        pairs: pairs.len(),
    })
}
