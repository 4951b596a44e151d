//! Complex special functions: ζ and its regularised variants, digamma, the
//! Gamma ratio on the quarter line, and the Euler products `A_D`, `A_D'`.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::arith::{sieve_primes, PrimeTable};
use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `ζ(2) = π²/6`.
pub const ZETA_2: f64 = PI * PI / 6.0;

/// Real-part range of the ζ contract domain.
pub const ZETA_RE_RANGE: (f64, f64) = (0.5, 4.0);

/// Height bound of the ζ contract domain. Integrands probe
/// `ζ(1 − 4πiτ/log X)` for `τ` up to the truncation radius, which needs
/// heights in the thousands.
pub const ZETA_IM_MAX: f64 = 1.0e4;

const MAX_BERNOULLI: usize = 48;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `B_{2k}/(2k)!` for `k = 1..=MAX_BERNOULLI`, from
/// `B_{2k}/(2k)! = (−1)^{k+1}·2ζ(2k)/(2π)^{2k}`.
fn bernoulli_over_factorial() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=MAX_BERNOULLI)
            .map(|k| {
                let two_k = 2.0 * k as f64;
                let z = zeta_even_real(2 * k as u32);
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * 2.0 * z * (2.0 * PI).powf(-two_k)
            })
            .collect()
    })
}

/// `ζ(m)` for integer `m >= 2` by a direct sum with a short Euler–Maclaurin tail.
fn zeta_even_real(m: u32) -> f64 {
    let n = 1000.0f64;
    let s = m as f64;
    let mut sum = 0.0;
    for k in (1..1000u32).rev() {
        sum += (k as f64).powf(-s);
    }
    sum + n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s) + s / 12.0 * n.powf(-s - 1.0)
        - s * (s + 1.0) * (s + 2.0) / 720.0 * n.powf(-s - 3.0)
}

/// `φ1(u) = (e^u − 1)/u` and its derivative.
fn phi1(u: Complex64) -> (Complex64, Complex64) {
    if u.norm() < 0.5 {
        let mut v = c(0.0, 0.0);
        let mut d = c(0.0, 0.0);
        let mut pow = c(1.0, 0.0);
        let mut fact = 1.0; // (k+1)!
        for k in 0..24 {
            fact *= (k + 1) as f64;
            v += pow / fact;
            d += pow * ((k + 1) as f64) / (fact * (k + 2) as f64);
            pow *= u;
        }
        (v, d)
    } else {
        let e = u.exp();
        ((e - 1.0) / u, (e * (u - 1.0) + 1.0) / (u * u))
    }
}

/// Euler–Maclaurin evaluator for ζ and ζ′.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaKernel {
    /// Minimum direct-sum length `N`; raised automatically with `|s|`.
    pub em_cutoff: usize,
    /// Number `M` of Bernoulli correction terms.
    pub bernoulli_order: usize,
    pub target_abs_error: f64,
}

impl Default for ZetaKernel {
    fn default() -> Self {
        ZetaKernel { em_cutoff: 16, bernoulli_order: 20, target_abs_error: 1e-11 }
    }
}

impl ZetaKernel {
    pub fn doubled(&self) -> ZetaKernel {
        ZetaKernel {
            em_cutoff: 2 * self.em_cutoff,
            bernoulli_order: (2 * self.bernoulli_order).min(MAX_BERNOULLI),
            target_abs_error: self.target_abs_error,
        }
    }

    fn check_domain(s: Complex64) -> Result<()> {
        let (lo, hi) = ZETA_RE_RANGE;
        if !(s.re >= lo - 1e-12 && s.re <= hi + 1e-12 && s.im.abs() <= ZETA_IM_MAX) || !s.is_finite() {
            return Err(Error::Domain(format!(
                "zeta argument {s} outside Re in [{lo}, {hi}], |Im| <= {ZETA_IM_MAX}"
            )));
        }
        Ok(())
    }

    /// `(Z(s), Z′(s))` with `Z(s) = ζ(s) − 1/(s − 1)`, analytic at `s = 1`.
    pub fn zeta_reg_pair(&self, s: Complex64) -> Result<(Complex64, Complex64)> {
        Self::check_domain(s)?;
        let m = self.bernoulli_order.clamp(1, MAX_BERNOULLI);
        // successive correction terms shrink by ~ (|s|+2M)²/(2πN)² <= 1/4
        let n = self.em_cutoff.max(((s.norm() + 2.0 * m as f64) / PI).ceil() as usize).max(2);
        let mut z = c(0.0, 0.0);
        let mut zp = c(0.0, 0.0);
        for k in (1..n).rev() {
            let lk = (k as f64).ln();
            let t = (-s * lk).exp();
            z += t;
            zp -= t * lk;
        }
        let a = (n as f64).ln();
        let n_neg_s = (-s * a).exp();
        let (p1, p1d) = phi1((1.0 - s) * a);
        z += -a * p1 + 0.5 * n_neg_s;
        zp += a * a * p1d - 0.5 * a * n_neg_s;
        let coeffs = bernoulli_over_factorial();
        // (s)_{2k−1}·N^{1−2k} and its derivative, advanced two factors per k
        let nf = n as f64;
        let mut poch = s / nf;
        let mut poch_d = c(1.0 / nf, 0.0);
        for (k, &ck) in coeffs.iter().enumerate().take(m) {
            z += ck * poch * n_neg_s;
            zp += ck * n_neg_s * (poch_d - a * poch);
            let j1 = (s + (2 * k + 1) as f64) / nf;
            let j2 = (s + (2 * k + 2) as f64) / nf;
            poch_d = poch_d * j1 + poch / nf;
            poch *= j1;
            poch_d = poch_d * j2 + poch / nf;
            poch *= j2;
        }
        Ok((z, zp))
    }

    pub fn zeta_reg(&self, s: Complex64) -> Result<Complex64> {
        Ok(self.zeta_reg_pair(s)?.0)
    }

    pub fn zeta(&self, s: Complex64) -> Result<Complex64> {
        if (s - 1.0).norm() == 0.0 {
            return Err(Error::Pole("zeta has a simple pole at s = 1".into()));
        }
        Ok(self.zeta_reg(s)? + 1.0 / (s - 1.0))
    }

    pub fn zeta_prime(&self, s: Complex64) -> Result<Complex64> {
        if (s - 1.0).norm() == 0.0 {
            return Err(Error::Pole("zeta' has a double pole at s = 1".into()));
        }
        let d = s - 1.0;
        Ok(self.zeta_reg_pair(s)?.1 - 1.0 / (d * d))
    }

    /// `ζ′/ζ(1 + w) + 1/w`, analytic at `w = 0` with value γ.
    pub fn zeta_log_deriv_reg(&self, w: Complex64) -> Result<Complex64> {
        let (z, zp) = self.zeta_reg_pair(1.0 + w)?;
        Ok((w * zp + z) / (1.0 + w * z))
    }

    /// Largest change in `(ζ, ζ′)` when cutoff and order are doubled.
    pub fn self_check(&self, s: Complex64) -> Result<f64> {
        let (a, ap) = self.zeta_reg_pair(s)?;
        let (b, bp) = self.doubled().zeta_reg_pair(s)?;
        Ok((a - b).norm().max((ap - bp).norm()))
    }
}

/// Process-wide default kernel.
pub fn default_kernel() -> &'static ZetaKernel {
    static K: OnceLock<ZetaKernel> = OnceLock::new();
    K.get_or_init(ZetaKernel::default)
}

pub fn zeta(s: Complex64) -> Result<Complex64> {
    default_kernel().zeta(s)
}

pub fn zeta_prime(s: Complex64) -> Result<Complex64> {
    default_kernel().zeta_prime(s)
}

/// `ζ(s) − 1/(s − 1)`.
pub fn zeta_reg(s: Complex64) -> Result<Complex64> {
    default_kernel().zeta_reg(s)
}

/// `ζ′/ζ(1 + w) + 1/w`.
pub fn zeta_log_deriv_reg(w: Complex64) -> Result<Complex64> {
    default_kernel().zeta_log_deriv_reg(w)
}

/// `−ζ′(2)/ζ(2) = Σ Λ(n)/n²`.
pub fn neg_log_deriv_zeta_2() -> f64 {
    static V: OnceLock<f64> = OnceLock::new();
    *V.get_or_init(|| {
        let s = c(2.0, 0.0);
        -(zeta_prime(s).unwrap() / zeta(s).unwrap()).re
    })
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Complex digamma `ψ = Γ′/Γ`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    if !z.is_finite() {
        return Err(Error::Domain(format!("digamma of non-finite {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(format!("digamma pole at {}", z.re)));
    }
    if z.re < 0.0 {
        // ψ(z) = ψ(1 − z) − π cot(πz)
        let pz = PI * z;
        return Ok(digamma(1.0 - z)? - PI * pz.cos() / pz.sin());
    }
    let mut z = z;
    let mut acc = c(0.0, 0.0);
    while z.re < 10.0 && z.norm() < 20.0 {
        acc -= 1.0 / z;
        z += 1.0;
    }
    let coeffs = bernoulli_over_factorial();
    let inv2 = 1.0 / (z * z);
    let mut pow = inv2;
    let mut series = c(0.0, 0.0);
    // B_{2k}/(2k) = (2k−1)!·B_{2k}/(2k)!
    let mut fact = 1.0;
    for (k, &ck) in coeffs.iter().enumerate().take(12) {
        let kk = k + 1;
        if kk > 1 {
            fact *= ((2 * kk - 2) * (2 * kk - 1)) as f64;
        }
        series += ck * fact * pow;
        pow *= inv2;
    }
    Ok(acc + z.ln() - 0.5 / z - series)
}

/// `log Γ(z)` for `Re z > 0`, up to a multiple of `2πi`.
fn ln_gamma_mod_2pi(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut acc = c(0.0, 0.0);
    while z.re < 10.0 && z.norm() < 20.0 {
        acc -= z.ln();
        z += 1.0;
    }
    let coeffs = bernoulli_over_factorial();
    let inv2 = 1.0 / (z * z);
    let mut pow = 1.0 / z;
    let mut series = c(0.0, 0.0);
    let mut fact = 1.0; // (2k−2)!
    for (k, &ck) in coeffs.iter().enumerate().take(12) {
        let kk = k + 1;
        if kk > 1 {
            fact *= ((2 * kk - 3) * (2 * kk - 2)) as f64;
        }
        // B_{2k}/(2k(2k−1)) = (2k−2)!·B_{2k}/(2k)!
        series += ck * fact * pow;
        pow *= inv2;
    }
    acc + (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series
}

/// `Γ(1/4 − iθ)/Γ(1/4 + iθ) = exp(−2i·Im log Γ(1/4 + iθ))`.
pub fn gamma_ratio(theta: f64) -> Complex64 {
    if theta == 0.0 {
        return c(1.0, 0.0);
    }
    let phase = ln_gamma_mod_2pi(c(0.25, theta)).im;
    let phi = -2.0 * phase;
    c(phi.cos(), phi.sin())
}

/// `A_D(r) = ζ(2)/ζ(2 − 2r)`.
pub fn a_d(r: Complex64) -> Result<Complex64> {
    let s = 2.0 - 2.0 * r;
    Ok(ZETA_2 / zeta(s)?)
}

/// A truncated Euler product or prime sum with its crude tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated {
    pub value: Complex64,
    pub tail_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct EulerProductSpec {
    pub prime_limit: u64,
    /// Heuristic tail `~1/P` of `A_D′(0)`; per-call tails are in [`Truncated`].
    pub tail_estimate: f64,
    primes: Arc<PrimeTable>,
}

impl EulerProductSpec {
    pub fn new(prime_limit: u64) -> Result<Self> {
        let primes = Arc::new(sieve_primes(prime_limit.max(2))?);
        Ok(EulerProductSpec { prime_limit, tail_estimate: 1.0 / prime_limit as f64, primes })
    }

    pub fn primes(&self) -> &PrimeTable {
        &self.primes
    }

    /// `A_D(r)` as the truncated product over `p <= P` of
    /// `(1 − 1/((p+1)p^{1−2r}) − 1/(p+1))·(1 − 1/p)^{−1}`.
    pub fn a_d_euler_product(&self, r: Complex64) -> Result<Truncated> {
        let e = 2.0 - 2.0 * r.re;
        if e <= 1.0 {
            return Err(Error::Domain(format!("Euler product for A_D needs Re(2 - 2r) > 1, got r = {r}")));
        }
        let mut prod = c(1.0, 0.0);
        for (p, lp) in self.primes.up_to(self.prime_limit) {
            let pf = p as f64;
            let p_pow = (lp * (1.0 - 2.0 * r)).exp(); // p^{1−2r}
            let factor = (1.0 - 1.0 / ((pf + 1.0) * p_pow) - 1.0 / (pf + 1.0)) / (1.0 - 1.0 / pf);
            prod *= factor;
        }
        let pl = self.prime_limit as f64;
        let log_tail = pl.powf(1.0 - e) / ((e - 1.0) * pl.ln());
        Ok(Truncated { value: prod, tail_estimate: prod.norm() * log_tail.exp_m1() })
    }

    /// `A_D′(r) = Σ_{p<=P} log p/((p+1)(p^{1+2r} − 1))`.
    pub fn a_d_prime(&self, r: Complex64) -> Result<Truncated> {
        let e = 1.0 + 2.0 * r.re;
        if e <= 0.0 {
            return Err(Error::Domain(format!("A_D' sum needs Re(1 + 2r) > 0, got r = {r}")));
        }
        let mut sum = c(0.0, 0.0);
        for (p, lp) in self.primes.up_to(self.prime_limit) {
            let pf = p as f64;
            let pp = (lp * (1.0 + 2.0 * r)).exp();
            sum += lp / ((pf + 1.0) * (pp - 1.0));
        }
        let pl = self.prime_limit as f64;
        Ok(Truncated { value: sum, tail_estimate: pl.powf(-e) / e })
    }
}

/// `A_D′` over a shared prime table, for hot integrand loops.
pub fn a_d_prime_with(primes: &PrimeTable, limit: u64, r: Complex64) -> Complex64 {
    let two_r = 2.0 * r;
    primes
        .up_to(limit)
        .map(|(p, lp)| {
            let pf = p as f64;
            lp / ((pf + 1.0) * (pf * (lp * two_r).exp() - 1.0))
        })
        .sum()
}
