//! The ratios-recipe prediction for the one-level density.
//!
//! With `L = log X`, `w = 4πiτ/L`, `r = 2πiτ/L` the prediction is
//! `conductor + (2/L)∫ g(τ)F(τ) dτ` where
//! `F = ζ′/ζ(1+w) + A_D′(r) − E(τ)ζ(1−w)` and
//! `E(τ) = ⟨e^{−2πiτ log(d/π)/L}⟩_d · Γ(¼ − iπτ/L)/Γ(¼ + iπτ/L) · A_D(r)`.
//! The poles of `ζ′/ζ(1+w)` and `ζ(1−w)` cancel against each other, so `F`
//! is assembled as `ζ′/ζ(1+w) + 1/w + A_D′(r) − E·(ζ(1−w) + 1/w) + (E − 1)/w`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{disc_exp_sum, sieve_primes, DiscriminantFamily, PrimeTable, SumMode};
use crate::error::{Error, Result};
use crate::quadrature::{QuadResult, QuadratureRule, QuadratureSpec, Tail};
use crate::specfun::{a_d, a_d_prime_with, digamma, gamma_ratio, neg_log_deriv_zeta_2, ZetaKernel, EULER_GAMMA};
use crate::testfn::TestFunction;

/// Largest `X` for which the d-sum in `E(τ)` is computed exactly by default.
pub const EXACT_DSUM_MAX_X: u64 = 1_000_000;

/// Prime-table size used by default for `A_D′` inside integrands.
pub const DEFAULT_PRIME_CAP: u64 = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EMode {
    /// Literal family average.
    Exact,
    /// Closed-form main term of the d-sum.
    Asymptotic,
    /// `E ≡ 1`; structural test hook.
    Unit,
}

impl EMode {
    pub fn default_for(x: u64) -> Self {
        if x <= EXACT_DSUM_MAX_X {
            EMode::Exact
        } else {
            EMode::Asymptotic
        }
    }
}

fn ci(im: f64) -> Complex64 {
    Complex64::new(0.0, im)
}

/// `c = 1 − ψ(¼) + 2ζ′(2)/ζ(2) − 2γ + 2 log π`.
pub fn secondary_constant() -> f64 {
    let psi = digamma(Complex64::new(0.25, 0.0)).expect("digamma(1/4)").re;
    1.0 - psi - 2.0 * neg_log_deriv_zeta_2() - 2.0 * EULER_GAMMA + 2.0 * PI.ln()
}

/// `−g(0)/2 + c·ĝ(1)/log X`.
pub fn r_secondary_model(f: &TestFunction, x: f64) -> f64 {
    -f.g0() / 2.0 + secondary_constant() * f.g_hat(1.0) / x.ln()
}

/// Mean of `e^{−iβ_d τ}` over the family at a single `τ`.
fn dsum_mean(betas: &[f64], tau: f64) -> Complex64 {
    if betas.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let s: Complex64 = betas
        .par_chunks(8192)
        .map(|ch| ch.iter().map(|&b| Complex64::from_polar(1.0, -b * tau)).sum::<Complex64>())
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    s / betas.len() as f64
}

const LANES: usize = 8;

/// `Σ_d e^{−iβ_d(o + jh)}` for every offset `o` and panel `j`, laid out
/// `[offset][panel]`. Each phase is advanced by multiplying with `e^{−iβ_d h}`.
fn dsum_grid(betas: &[f64], offsets: &[f64], width: f64, panels: usize) -> Vec<Complex64> {
    let n_off = offsets.len();
    let parts: Vec<(Vec<f64>, Vec<f64>)> = betas
        .par_chunks(4096)
        .map(|chunk| {
            let mut re = vec![0.0; n_off * panels];
            let mut im = vec![0.0; n_off * panels];
            for group in chunk.chunks(LANES) {
                let mut sr = [1.0; LANES];
                let mut si = [0.0; LANES];
                for (k, &b) in group.iter().enumerate() {
                    let (s, c) = (-b * width).sin_cos();
                    sr[k] = c;
                    si[k] = s;
                }
                for (oi, &o) in offsets.iter().enumerate() {
                    let mut pr = [0.0; LANES];
                    let mut pi = [0.0; LANES];
                    for (k, &b) in group.iter().enumerate() {
                        let (s, c) = (-b * o).sin_cos();
                        pr[k] = c;
                        pi[k] = s;
                    }
                    let row_re = &mut re[oi * panels..(oi + 1) * panels];
                    let row_im = &mut im[oi * panels..(oi + 1) * panels];
                    for j in 0..panels {
                        row_re[j] += pr.iter().sum::<f64>();
                        row_im[j] += pi.iter().sum::<f64>();
                        for k in 0..LANES {
                            let nr = pr[k] * sr[k] - pi[k] * si[k];
                            let ni = pr[k] * si[k] + pi[k] * sr[k];
                            pr[k] = nr;
                            pi[k] = ni;
                        }
                    }
                }
            }
            (re, im)
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n_off * panels];
    for (re, im) in parts {
        for (o, (r, i)) in out.iter_mut().zip(re.iter().zip(&im)) {
            *o += Complex64::new(*r, *i);
        }
    }
    out
}

/// Reorders `[offset][panel]` into panel-major order.
fn panel_major(grid: &[Complex64], n_off: usize, panels: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(grid.len());
    for j in 0..panels {
        for oi in 0..n_off {
            out.push(grid[oi * panels + j]);
        }
    }
    out
}

/// `E(τ)` by direct summation over the family.
pub fn e_factor(family: &DiscriminantFamily, tau: f64) -> Result<Complex64> {
    e_factor_with(family, tau, EMode::Exact)
}

pub fn e_factor_with(family: &DiscriminantFamily, tau: f64, mode: EMode) -> Result<Complex64> {
    if family.is_empty() {
        return Err(Error::Domain("E factor of an empty family".into()));
    }
    let l = family.log_x();
    let betas = betas(family);
    e_from_dsum(l, tau, dsum_at(family, &betas, tau, mode)?)
}

fn betas(family: &DiscriminantFamily) -> Vec<f64> {
    let l = family.log_x();
    family.log_d_over_pi().into_iter().map(|x| 2.0 * PI * x / l).collect()
}

fn dsum_at(family: &DiscriminantFamily, betas: &[f64], tau: f64, mode: EMode) -> Result<Option<Complex64>> {
    match mode {
        EMode::Exact => Ok(Some(dsum_mean(betas, tau))),
        EMode::Asymptotic => {
            let s = disc_exp_sum(family, Complex64::new(tau, 0.0), SumMode::Asymptotic)?;
            Ok(Some(s / family.x_star as f64))
        }
        EMode::Unit => Ok(None),
    }
}

fn e_from_dsum(l: f64, tau: f64, dsum: Option<Complex64>) -> Result<Complex64> {
    match dsum {
        None => Ok(Complex64::new(1.0, 0.0)),
        Some(s) => Ok(s * gamma_ratio(PI * tau / l) * a_d(ci(2.0 * PI * tau / l))?),
    }
}

/// Shared state for all ratios-side integrals over one family and one
/// quadrature rule: the tabulated `E(τ)` at every node and its Taylor data at 0.
#[derive(Debug, Clone)]
pub struct RatiosEngine {
    pub family: Arc<DiscriminantFamily>,
    pub rule: QuadratureRule,
    pub mode: EMode,
    pub kernel: ZetaKernel,
    l: f64,
    betas: Vec<f64>,
    e_fine: Vec<Complex64>,
    e_coarse: Vec<Complex64>,
    /// `E^{(k)}(0)` for `k = 1..=4`.
    derivs: [Complex64; 4],
    primes: Arc<PrimeTable>,
}

impl RatiosEngine {
    pub fn new(family: Arc<DiscriminantFamily>, spec: QuadratureSpec, mode: EMode) -> Result<Self> {
        Self::with_prime_cap(family, spec, mode, DEFAULT_PRIME_CAP)
    }

    pub fn with_prime_cap(family: Arc<DiscriminantFamily>, spec: QuadratureSpec, mode: EMode, prime_cap: u64) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::Domain("ratios prediction needs a nonempty family".into()));
        }
        let rule = QuadratureRule::new(spec)?;
        let l = family.log_x();
        if !(l > 0.0) {
            return Err(Error::Domain(format!("log X must be positive, X = {}", family.spec.x_max)));
        }
        let betas = betas(&family);
        let primes = Arc::new(sieve_primes(prime_cap.max(2))?);
        let mut engine = RatiosEngine {
            family,
            rule,
            mode,
            kernel: ZetaKernel::default(),
            l,
            betas,
            e_fine: Vec::new(),
            e_coarse: Vec::new(),
            derivs: [Complex64::new(0.0, 0.0); 4],
            primes,
        };
        engine.tabulate()?;
        engine.derivs = engine.taylor_at_zero()?;
        Ok(engine)
    }

    pub fn log_x(&self) -> f64 {
        self.l
    }

    fn tabulate(&mut self) -> Result<()> {
        let fine_nodes = self.rule.fine_nodes();
        let coarse_nodes = self.rule.coarse_nodes();
        let panels = self.rule.spec.panels;
        let (dfine, dcoarse): (Vec<Option<Complex64>>, Vec<Option<Complex64>>) = match self.mode {
            EMode::Exact => {
                let mut offsets = self.rule.fine_offsets.clone();
                offsets.extend_from_slice(&self.rule.coarse_offsets);
                let grid = dsum_grid(&self.betas, &offsets, self.rule.width, panels);
                let nf = self.rule.fine_offsets.len();
                let inv = 1.0 / self.betas.len() as f64;
                let fine = panel_major(&grid[..nf * panels], nf, panels);
                let coarse = panel_major(&grid[nf * panels..], offsets.len() - nf, panels);
                (
                    fine.into_iter().map(|s| Some(s * inv)).collect(),
                    coarse.into_iter().map(|s| Some(s * inv)).collect(),
                )
            }
            EMode::Asymptotic => {
                let f = |t: &f64| dsum_at(&self.family, &self.betas, *t, EMode::Asymptotic);
                (
                    fine_nodes.iter().map(f).collect::<Result<_>>()?,
                    coarse_nodes.iter().map(f).collect::<Result<_>>()?,
                )
            }
            EMode::Unit => (vec![None; fine_nodes.len()], vec![None; coarse_nodes.len()]),
        };
        let l = self.l;
        self.e_fine = fine_nodes.par_iter().zip(dfine).map(|(&t, s)| e_from_dsum(l, t, s)).collect::<Result<_>>()?;
        self.e_coarse = coarse_nodes.par_iter().zip(dcoarse).map(|(&t, s)| e_from_dsum(l, t, s)).collect::<Result<_>>()?;
        Ok(())
    }

    /// `E(τ)` evaluated directly (not from the table).
    pub fn e_direct(&self, tau: f64) -> Result<Complex64> {
        e_from_dsum(self.l, tau, dsum_at(&self.family, &self.betas, tau, self.mode)?)
    }

    /// `E′(0)..E⁗(0)` from symmetric differences at steps `h` and `h/2`,
    /// combined by one Richardson step.
    fn taylor_at_zero(&self) -> Result<[Complex64; 4]> {
        let h = 5e-3;
        let e = |t: f64| self.e_direct(t);
        let (em2, em1, emh, e0, eph, ep1, ep2) = (e(-2.0 * h)?, e(-h)?, e(-0.5 * h)?, e(0.0)?, e(0.5 * h)?, e(h)?, e(2.0 * h)?);
        let rich = |coarse: Complex64, fine: Complex64| (4.0 * fine - coarse) / 3.0;
        let d1 = rich((ep1 - em1) / (2.0 * h), (eph - emh) / h);
        let d2 = rich((ep1 - 2.0 * e0 + em1) / (h * h), (eph - 2.0 * e0 + emh) / (0.25 * h * h));
        let d3 = rich(
            (ep2 - 2.0 * ep1 + 2.0 * em1 - em2) / (2.0 * h * h * h),
            (ep1 - 2.0 * eph + 2.0 * emh - em1) / (0.25 * h * h * h),
        );
        let d4 = rich(
            (ep2 - 4.0 * ep1 + 6.0 * e0 - 4.0 * em1 + em2) / h.powi(4),
            (ep1 - 4.0 * eph + 6.0 * e0 - 4.0 * emh + em1) / (h.powi(4) / 16.0),
        );
        Ok([d1, d2, d3, d4])
    }

    /// `(E(τ) − 1)/τ` by its Taylor series at 0.
    pub fn e_quotient_series(&self, tau: f64) -> Complex64 {
        let [d1, d2, d3, d4] = self.derivs;
        d1 + d2 * (tau / 2.0) + d3 * (tau * tau / 6.0) + d4 * (tau * tau * tau / 24.0)
    }

    fn e_quotient(&self, tau: f64, e: Complex64) -> Complex64 {
        if tau.abs() < self.rule.spec.small_tau_radius {
            self.e_quotient_series(tau)
        } else {
            (e - 1.0) / tau
        }
    }

    fn prime_limit_for(&self, f: &TestFunction) -> (u64, f64) {
        // terms with p^k >= X^{σ/2} integrate to zero against g
        let needed = (self.l * f.sigma / 2.0).exp().ceil() as u64 + 1;
        let cap = self.primes.limit;
        if needed <= cap {
            (needed, 0.0)
        } else {
            (cap, 1.0 / cap as f64)
        }
    }

    /// `F(τ)` given `E(τ)` and `(E(τ) − 1)/τ`.
    fn f_assembled(&self, tau: f64, e: Complex64, q: Complex64, plimit: u64) -> Result<Complex64> {
        let w = ci(4.0 * PI * tau / self.l);
        let r = ci(2.0 * PI * tau / self.l);
        let zlr = self.kernel.zeta_log_deriv_reg(w)?;
        let adp = a_d_prime_with(&self.primes, plimit, r);
        let z1 = self.kernel.zeta_reg(1.0 - w)?;
        Ok(zlr + adp - e * z1 + q * self.l / ci(4.0 * PI))
    }

    /// `F(τ)` with `E` evaluated directly and `(E − 1)/τ` formed literally.
    pub fn f_direct(&self, tau: f64, plimit: u64) -> Result<Complex64> {
        let e = self.e_direct(tau)?;
        self.f_assembled(tau, e, (e - 1.0) / tau, plimit)
    }

    /// `F(τ)` with `(E − 1)/τ` from the Taylor branch.
    pub fn f_branch(&self, tau: f64, plimit: u64) -> Result<Complex64> {
        let e = self.e_direct(tau)?;
        self.f_assembled(tau, e, self.e_quotient_series(tau), plimit)
    }

    /// Fails with an assembly error if the two forms of `F` disagree at the
    /// switch-over radius.
    pub fn check_assembly(&self, plimit: u64) -> Result<f64> {
        let rad = self.rule.spec.small_tau_radius;
        let mut gap: f64 = 0.0;
        for t in [rad, -rad] {
            gap = gap.max((self.f_direct(t, plimit)? - self.f_branch(t, plimit)?).norm());
        }
        let limit = 10.0 * self.rule.spec.abs_tol;
        if gap > limit {
            return Err(Error::Assembly { gap, limit });
        }
        Ok(gap)
    }

    fn node_values(&self, f: &TestFunction, h: impl Fn(f64, Complex64) -> Result<Complex64> + Sync) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
        let eval = |nodes: Vec<f64>, es: &[Complex64]| -> Result<Vec<Complex64>> {
            nodes.par_iter().zip(es.par_iter()).map(|(&t, &e)| Ok(f.g(t) * h(t, e)?)).collect()
        };
        Ok((eval(self.rule.fine_nodes(), &self.e_fine)?, eval(self.rule.coarse_nodes(), &self.e_coarse)?))
    }

    /// `(1/L)[ĝ(0)·⟨log(d/π)⟩ + ∫ g(τ)·Re ψ(¼ + iπτ/L) dτ]`.
    pub fn conductor_term(&self, f: &TestFunction) -> Result<QuadResult> {
        conductor_with_rule(&self.family, f, &self.rule)
    }

    /// `(2/L)∫ g(τ)F(τ) dτ`, integrated as `∫_0^∞ g(τ)(F(τ) + F(−τ))`.
    pub fn zeta_ad_r_term(&self, f: &TestFunction) -> Result<QuadResult> {
        if f.is_zero() {
            return Ok(QuadResult::zero());
        }
        let (plimit, adp_tail) = self.prime_limit_for(f);
        self.check_assembly(plimit)?;
        let paired = |t: f64, e: Complex64| -> Result<Complex64> {
            let em = e.conj();
            let a = self.f_assembled(t, e, self.e_quotient(t, e), plimit)?;
            let b = self.f_assembled(-t, em, self.e_quotient(-t, em), plimit)?;
            Ok(a + b)
        };
        let (fine, coarse) = self.node_values(f, paired)?;
        let mut res = self.rule.integrate_values(&fine, &coarse, Tail::Oscillatory, 1.0)?.scale(2.0 / self.l);
        // A_D′ truncated below X^{σ/2}: crude tail against ∫|g|
        res.error_budget += 2.0 / self.l * adp_tail * f.g_hat(0.0).abs() * 2.0;
        Ok(res)
    }

    /// Standalone `R(g; X) = −(2/L)·PV∫ g(τ)E(τ)ζ(1 − w) dτ`.
    pub fn r_term(&self, f: &TestFunction) -> Result<QuadResult> {
        if f.is_zero() {
            return Ok(QuadResult::zero());
        }
        let l = self.l;
        let paired = |t: f64, e: Complex64| -> Result<Complex64> {
            let em = e.conj();
            let w = ci(4.0 * PI * t / l);
            let zp = self.kernel.zeta_reg(1.0 - w)?;
            let zm = self.kernel.zeta_reg(1.0 + w)?;
            // pole parts: −(L/4πiτ)(E(τ) − E(−τ)) = −(L/4πi)(q(τ) + q(−τ))
            let q_sum = self.e_quotient(t, e) + self.e_quotient(-t, em);
            Ok(e * zp + em * zm - q_sum * l / ci(4.0 * PI))
        };
        let (fine, coarse) = self.node_values(f, paired)?;
        Ok(self.rule.integrate_values(&fine, &coarse, Tail::Oscillatory, 1.0)?.scale(-2.0 / l))
    }

    pub fn prediction(&self, f: &TestFunction) -> Result<RatiosBreakdown> {
        let cond = self.conductor_term(f)?;
        let zar = self.zeta_ad_r_term(f)?;
        let r = self.r_term(f)?;
        let conductor_term = cond.value.re;
        let zeta_ad_r_term = zar.value.re;
        Ok(RatiosBreakdown {
            conductor_term,
            zeta_ad_r_term,
            r_term_alone: r.value.re,
            secondary_model: if f.is_zero() { 0.0 } else { r_secondary_model(f, self.family.spec.x_max as f64) },
            total: conductor_term + zeta_ad_r_term,
            error_budget: cond.error_budget + zar.error_budget,
            max_imag: cond.value.im.abs().max(zar.value.im.abs()).max(r.value.im.abs()),
        })
    }
}

fn conductor_with_rule(family: &DiscriminantFamily, f: &TestFunction, rule: &QuadratureRule) -> Result<QuadResult> {
    if family.is_empty() {
        return Err(Error::Domain("conductor term of an empty family".into()));
    }
    if f.is_zero() {
        return Ok(QuadResult::zero());
    }
    let l = family.log_x();
    let mean_log = family.log_d_over_pi().iter().sum::<f64>() / family.x_star as f64;
    let phi = |t: f64| digamma(Complex64::new(0.25, PI * t / l)).map(|z| z.re).unwrap_or(f64::NAN);
    let t = rule.spec.truncation_t;
    let (est, bound) = f.tail_model().tail_integral(t, phi);
    let tail = Tail::Analytic { estimate: Complex64::new(est, 0.0), bound };
    let integral = rule.integrate_even(|tau| Complex64::new(f.g(tau) * phi(tau), 0.0), tail)?;
    let mut res = integral.scale(1.0 / l);
    res.value += f.g_hat(0.0) * mean_log / l;
    Ok(res)
}

/// Conductor term, shared by both sides of the comparison.
pub fn conductor_term(family: &DiscriminantFamily, f: &TestFunction, spec: QuadratureSpec) -> Result<QuadResult> {
    conductor_with_rule(family, f, &QuadratureRule::new(spec)?)
}

pub fn zeta_ad_r_term(family: &DiscriminantFamily, f: &TestFunction, spec: QuadratureSpec) -> Result<QuadResult> {
    RatiosEngine::new(Arc::new(family.clone()), spec, EMode::default_for(family.spec.x_max))?.zeta_ad_r_term(f)
}

pub fn r_term(family: &DiscriminantFamily, f: &TestFunction, spec: QuadratureSpec) -> Result<QuadResult> {
    RatiosEngine::new(Arc::new(family.clone()), spec, EMode::default_for(family.spec.x_max))?.r_term(f)
}

pub fn ratios_prediction(family: &DiscriminantFamily, f: &TestFunction, spec: QuadratureSpec) -> Result<RatiosBreakdown> {
    RatiosEngine::new(Arc::new(family.clone()), spec, EMode::default_for(family.spec.x_max))?.prediction(f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatiosBreakdown {
    pub conductor_term: f64,
    /// `(2/L)∫ g·F`, the combined ζ′/ζ, `A_D′` and R integrand.
    pub zeta_ad_r_term: f64,
    pub r_term_alone: f64,
    pub secondary_model: f64,
    pub total: f64,
    pub error_budget: f64,
    /// Largest imaginary part among the assembled integrals.
    pub max_imag: f64,
}
