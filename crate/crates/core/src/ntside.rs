//! The explicit-formula side: prime sums over the family, their split into
//! even and odd prime powers, the closed forms of the even parts, and the
//! mean-square character-sum statistic.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::arith::{kronecker, sieve_primes, DiscriminantFamily, PrimeTable};
use crate::error::{Error, Result};
use crate::quadrature::{QuadResult, QuadratureRule, QuadratureSpec, Tail};
use crate::ratios::conductor_term;
use crate::specfun::{a_d_prime_with, default_kernel};
use crate::testfn::TestFunction;

/// Default ceiling for prime tables built by this module.
pub const DEFAULT_PRIME_LIMIT: u64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NTBreakdown {
    pub conductor_term: f64,
    pub s_even_direct: f64,
    pub s_even_1: f64,
    pub s_even_2: f64,
    pub s_odd: f64,
    pub total: f64,
    pub error_budget: f64,
}

fn check_family(family: &DiscriminantFamily) -> Result<()> {
    if family.is_empty() {
        return Err(Error::Domain("explicit formula needs a nonempty family".into()));
    }
    if family.spec.a_char != 0 {
        return Err(Error::Domain("only even families are supported".into()));
    }
    Ok(())
}

/// Primes up to `X^σ` (the largest support needed by any prime sum),
/// refusing tables beyond `prime_limit`.
pub fn primes_for(x: f64, f: &TestFunction, prime_limit: u64) -> Result<PrimeTable> {
    let need = support_bound(x, f.sigma);
    if need > prime_limit {
        return Err(Error::Capacity(format!(
            "prime sums need primes up to X^sigma = {need}, above the limit {prime_limit}; lower sigma or raise --prime-limit"
        )));
    }
    sieve_primes(need.max(2))
}

/// Smallest integer `>= x^σ`.
fn support_bound(x: f64, sigma: f64) -> u64 {
    (sigma * x.ln()).exp().ceil() as u64 + 1
}

/// `Σ_{p^ℓ} (log p/p^ℓ)·ĝ(2 log p^ℓ/L)` restricted to one prime.
fn even_weight(f: &TestFunction, p: u64, lp: f64, l: f64) -> f64 {
    let mut s = 0.0;
    let mut k = 1;
    loop {
        let xi = 2.0 * k as f64 * lp / l;
        if xi >= f.sigma {
            break;
        }
        s += lp / (p as f64).powi(k) * f.g_hat(xi);
        k += 1;
    }
    s
}

/// `Σ_ℓ (log p/p^{(2ℓ+1)/2})·ĝ((2ℓ+1) log p/L)`.
fn odd_weight(f: &TestFunction, p: u64, lp: f64, l: f64) -> f64 {
    let mut s = 0.0;
    let mut k = 1;
    loop {
        let xi = k as f64 * lp / l;
        if xi >= f.sigma {
            break;
        }
        s += lp / (p as f64).powf(k as f64 / 2.0) * f.g_hat(xi);
        k += 2;
    }
    s
}

/// `χ_d(p)` for all members, through a residue table mod `p` (mod 8 for `p = 2`).
fn chi_table(p: u64) -> (u64, Vec<i8>) {
    let m = if p == 2 { 8 } else { p };
    (m, (0..m).map(|a| kronecker(a as i64, p)).collect())
}

fn char_sum_at_prime(family: &DiscriminantFamily, p: u64) -> i64 {
    let (m, t) = chi_table(p);
    family.members.iter().map(|&d| t[(d % m) as usize] as i64).sum()
}

/// `−(2/X*) Σ_d Σ_ℓ Σ_p χ_d(p)² (log p/(p^ℓ L)) ĝ(2 log p^ℓ/L)`.
pub fn s_even_direct(family: &DiscriminantFamily, f: &TestFunction, primes: &PrimeTable) -> Result<f64> {
    check_family(family)?;
    let l = family.log_x();
    let bound = support_bound(family.spec.x_max as f64, f.sigma / 2.0);
    ensure_table(primes, bound)?;
    let terms: Vec<f64> = primes
        .up_to(bound)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(p, lp)| {
            let w = even_weight(f, p, lp, l);
            if w == 0.0 {
                return 0.0;
            }
            let (m, t) = chi_table(p);
            let coprime = family.members.iter().filter(|&&d| t[(d % m) as usize] != 0).count();
            w * coprime as f64
        })
        .collect();
    Ok(-2.0 / (family.x_star as f64 * l) * terms.iter().sum::<f64>())
}

/// `−(2/log X) Σ_n Λ(n)/n · ĝ(2 log n/log X)`.
pub fn s_even_1_prime_sum(f: &TestFunction, x: f64) -> Result<f64> {
    let l = x.ln();
    let bound = support_bound(x, f.sigma / 2.0);
    let primes = sieve_primes(bound.max(2))?;
    Ok(s_even_1_with(f, l, &primes, bound))
}

fn s_even_1_with(f: &TestFunction, l: f64, primes: &PrimeTable, bound: u64) -> f64 {
    let s: f64 = primes.up_to(bound).map(|(p, lp)| even_weight(f, p, lp, l)).sum();
    -2.0 / l * s
}

/// `(2/X*) Σ_d Σ_ℓ Σ_{p|d} (log p/(p^ℓ L)) ĝ(2 log p^ℓ/L)`.
pub fn s_even_2_direct(family: &DiscriminantFamily, f: &TestFunction, primes: &PrimeTable) -> Result<f64> {
    check_family(family)?;
    let l = family.log_x();
    let bound = support_bound(family.spec.x_max as f64, f.sigma / 2.0);
    ensure_table(primes, bound)?;
    let terms: Vec<f64> = primes
        .up_to(bound)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(p, lp)| {
            let w = even_weight(f, p, lp, l);
            if w == 0.0 {
                0.0
            } else {
                w * family.count_divisible(p) as f64
            }
        })
        .collect();
    Ok(2.0 / (family.x_star as f64 * l) * terms.iter().sum::<f64>())
}

/// `−(2/X*) Σ_d Σ_ℓ Σ_p χ_d(p)(log p/(p^{(2ℓ+1)/2} L)) ĝ((2ℓ+1) log p/L)`.
pub fn s_odd(family: &DiscriminantFamily, f: &TestFunction, primes: &PrimeTable) -> Result<f64> {
    check_family(family)?;
    let l = family.log_x();
    let bound = support_bound(family.spec.x_max as f64, f.sigma);
    ensure_table(primes, bound)?;
    let terms: Vec<f64> = primes
        .up_to(bound)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(p, lp)| {
            let w = odd_weight(f, p, lp, l);
            if w == 0.0 {
                0.0
            } else {
                w * char_sum_at_prime(family, p) as f64
            }
        })
        .collect();
    Ok(-2.0 / (family.x_star as f64 * l) * terms.iter().sum::<f64>())
}

fn ensure_table(primes: &PrimeTable, bound: u64) -> Result<()> {
    // primes above the support carry zero weight, so a table covering
    // every prime below `bound` is enough
    let covered = primes.limit >= bound || primes.primes.last().is_some_and(|&p| p >= bound);
    if !covered {
        return Err(Error::Capacity(format!("prime table to {} is below the needed {bound}", primes.limit)));
    }
    Ok(())
}

/// `−g(0)/2 + (2/L)·PV∫ g(τ) ζ′/ζ(1 + 4πiτ/L) dτ`.
pub fn s_even_1_closed(f: &TestFunction, x: f64, spec: QuadratureSpec) -> Result<QuadResult> {
    if f.is_zero() {
        return Ok(QuadResult::zero());
    }
    let l = x.ln();
    let rule = QuadratureRule::new(spec)?;
    let k = default_kernel();
    // paired: ζ′/ζ(1+w) + ζ′/ζ(1−w) with the ∓1/w poles cancelling
    let h = |t: f64| -> Result<Complex64> {
        let w = Complex64::new(0.0, 4.0 * PI * t / l);
        Ok(f.g(t) * (k.zeta_log_deriv_reg(w)? + k.zeta_log_deriv_reg(-w)?))
    };
    let fine = rule.fine_nodes().par_iter().map(|&t| h(t)).collect::<Result<Vec<_>>>()?;
    let coarse = rule.coarse_nodes().par_iter().map(|&t| h(t)).collect::<Result<Vec<_>>>()?;
    let mut r = rule.integrate_values(&fine, &coarse, Tail::Oscillatory, 1.0)?.scale(2.0 / l);
    r.value -= f.g0() / 2.0;
    Ok(r)
}

/// `(2/L) ∫ g(τ)·A_D′(2πiτ/L) dτ`.
pub fn s_even_2_closed(f: &TestFunction, x: f64, spec: QuadratureSpec) -> Result<QuadResult> {
    if f.is_zero() {
        return Ok(QuadResult::zero());
    }
    let l = x.ln();
    let bound = support_bound(x, f.sigma / 2.0);
    let primes = sieve_primes(bound.max(2))?;
    let rule = QuadratureRule::new(spec)?;
    let h = |t: f64| {
        let r = Complex64::new(0.0, 2.0 * PI * t / l);
        f.g(t) * (a_d_prime_with(&primes, bound, r) + a_d_prime_with(&primes, bound, -r))
    };
    let fine: Vec<Complex64> = rule.fine_nodes().par_iter().map(|&t| h(t)).collect();
    let coarse: Vec<Complex64> = rule.coarse_nodes().par_iter().map(|&t| h(t)).collect();
    Ok(rule.integrate_values(&fine, &coarse, Tail::Oscillatory, 1.0)?.scale(2.0 / l))
}

/// Full explicit-formula side with the conductor term shared with the ratios side.
pub fn explicit_formula_total(family: &DiscriminantFamily, f: &TestFunction, spec: QuadratureSpec) -> Result<NTBreakdown> {
    explicit_formula_with_limit(family, f, spec, DEFAULT_PRIME_LIMIT)
}

pub fn explicit_formula_with_limit(family: &DiscriminantFamily, f: &TestFunction, spec: QuadratureSpec, prime_limit: u64) -> Result<NTBreakdown> {
    check_family(family)?;
    if f.is_zero() {
        return Ok(NTBreakdown {
            conductor_term: 0.0,
            s_even_direct: 0.0,
            s_even_1: 0.0,
            s_even_2: 0.0,
            s_odd: 0.0,
            total: 0.0,
            error_budget: 0.0,
        });
    }
    let x = family.spec.x_max as f64;
    let primes = primes_for(x, f, prime_limit)?;
    let cond = conductor_term(family, f, spec)?;
    let se = s_even_direct(family, f, &primes)?;
    let s1 = s_even_1_with(f, family.log_x(), &primes, support_bound(x, f.sigma / 2.0));
    let s2 = s_even_2_direct(family, f, &primes)?;
    let so = s_odd(family, f, &primes)?;
    let conductor = cond.value.re;
    Ok(NTBreakdown {
        conductor_term: conductor,
        s_even_direct: se,
        s_even_1: s1,
        s_even_2: s2,
        s_odd: so,
        total: conductor + se + so,
        error_budget: cond.error_budget,
    })
}

/// Smallest-prime-factor table for `n <= limit`.
fn spf_table(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit + 1];
    for i in 2..=limit {
        if spf[i] == 0 {
            let mut j = i;
            while j <= limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn is_square(n: u64) -> bool {
    let r = (n as f64).sqrt().round() as u64;
    r * r == n
}

/// `Σ_{1<n<=N, n ≠ □} |Σ_{d∈F} χ_d(n)|² / (N·X·log¹⁰N)`.
pub fn jutila_ratio(family: &DiscriminantFamily, n_max: u64) -> Result<f64> {
    let (sum, _) = jutila_sum(family, n_max, false)?;
    let nf = n_max as f64;
    Ok(sum / (nf * family.spec.x_max as f64 * nf.ln().powi(10)))
}

/// The raw mean-square sum; `include_squares` admits square `n` for comparison.
/// Returns the sum and the number of `n` counted.
pub fn jutila_sum(family: &DiscriminantFamily, n_max: u64, include_squares: bool) -> Result<(f64, usize)> {
    if n_max < 2 {
        return Err(Error::Domain(format!("Jutila statistic needs N >= 2, got {n_max}")));
    }
    let n = n_max as usize;
    let spf = spf_table(n);
    let prime_list: Vec<usize> = (2..=n).filter(|&i| spf[i] as usize == i).collect();
    let keep: Vec<usize> = (2..=n).filter(|&i| include_squares || !is_square(i as u64)).collect();
    let tables: Vec<(u64, Vec<i8>)> = prime_list.iter().map(|&p| chi_table(p as u64)).collect();
    let mut prime_index = vec![usize::MAX; n + 1];
    for (k, &p) in prime_list.iter().enumerate() {
        prime_index[p] = k;
    }
    let partial: Vec<Vec<i64>> = family
        .members
        .par_chunks(2048)
        .map(|chunk| {
            let mut acc = vec![0i64; n + 1];
            let mut chi = vec![0i8; n + 1];
            for &d in chunk {
                chi[1] = 1;
                for i in 2..=n {
                    let p = spf[i] as usize;
                    let (m, t) = &tables[prime_index[p]];
                    chi[i] = t[(d % m) as usize] * chi[i / p];
                }
                for &i in &keep {
                    acc[i] += chi[i] as i64;
                }
            }
            acc
        })
        .collect();
    let mut totals = vec![0i64; n + 1];
    for acc in partial {
        for (t, a) in totals.iter_mut().zip(acc) {
            *t += a;
        }
    }
    let sum: f64 = keep.iter().map(|&i| (totals[i] as f64).powi(2)).sum();
    Ok((sum, keep.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{enumerate_family, is_prime, FamilySpec};
    use crate::testfn::make_fejer;

    #[test]
    fn prime_sum_small_case_by_hand() {
        // σ = 0.3, X = 10⁴: n < 10^0.6 ≈ 3.98, so n ∈ {2, 3}
        let f = make_fejer(0.3).unwrap();
        let x: f64 = 1e4;
        let l = x.ln();
        let hand = -2.0 / l
            * (2f64.ln() / 2.0 * f.g_hat(2.0 * 2f64.ln() / l) + 3f64.ln() / 3.0 * f.g_hat(2.0 * 3f64.ln() / l));
        assert!((s_even_1_prime_sum(&f, x).unwrap() - hand).abs() < 1e-15);
        assert_eq!(f.g_hat(2.0 * 4f64.ln() / l), 0.0);
        // support below 2 → empty sum
        let tiny = make_fejer(0.05).unwrap();
        assert_eq!(s_even_1_prime_sum(&tiny, x).unwrap(), 0.0);
    }

    #[test]
    fn even_split_is_exact() {
        let fam = enumerate_family(FamilySpec::even(50_000)).unwrap();
        for sigma in [0.3, 0.5, 0.9] {
            let f = make_fejer(sigma).unwrap();
            let primes = primes_for(5e4, &f, DEFAULT_PRIME_LIMIT).unwrap();
            let se = s_even_direct(&fam, &f, &primes).unwrap();
            let s1 = s_even_1_with(&f, fam.log_x(), &primes, support_bound(5e4, sigma / 2.0));
            let s2 = s_even_2_direct(&fam, &f, &primes).unwrap();
            assert!((se - (s1 + s2)).abs() <= 1e-12, "sigma {sigma}");
            assert!(s2 >= 0.0);
        }
    }

    #[test]
    fn tiny_families_by_hand() {
        let f = make_fejer(0.9).unwrap();
        let fam = DiscriminantFamily::from_members(FamilySpec::even(100), vec![5, 8]);
        let primes = sieve_primes(1000).unwrap();
        let l = 100f64.ln();
        // s_odd: primes p < 100^0.9 ≈ 63, χ_5(p) + χ_8(p), odd powers
        let mut hand = 0.0;
        for p in (2..64u64).filter(|&p| is_prime(p)) {
            let c = (kronecker(5, p) + kronecker(8, p)) as f64;
            let mut k = 1;
            while (k as f64) * (p as f64).ln() / l < 0.9 {
                hand += c * (p as f64).ln() / (p as f64).powf(k as f64 / 2.0) * f.g_hat(k as f64 * (p as f64).ln() / l);
                k += 2;
            }
        }
        hand *= -2.0 / (2.0 * l);
        assert!((s_odd(&fam, &f, &primes).unwrap() - hand).abs() < 1e-14);
        // s_even_2 on {5}: only p = 5 divides
        let one = DiscriminantFamily::from_members(FamilySpec::even(100), vec![5]);
        let w5 = 5f64.ln() / 5.0 * f.g_hat(2.0 * 5f64.ln() / l);
        let s2 = s_even_2_direct(&one, &f, &primes).unwrap();
        assert!((s2 - 2.0 / l * w5).abs() < 1e-15);
    }

    #[test]
    fn enlarging_prime_table_changes_nothing() {
        let fam = enumerate_family(FamilySpec::even(20_000)).unwrap();
        let f = make_fejer(0.5).unwrap();
        let small = primes_for(2e4, &f, DEFAULT_PRIME_LIMIT).unwrap();
        let big = sieve_primes(100_000).unwrap();
        assert_eq!(s_odd(&fam, &f, &small).unwrap(), s_odd(&fam, &f, &big).unwrap());
        assert_eq!(s_even_direct(&fam, &f, &small).unwrap(), s_even_direct(&fam, &f, &big).unwrap());
    }

    #[test]
    fn capacity_error_for_large_support() {
        let fam = enumerate_family(FamilySpec::even(10_000)).unwrap();
        let f = make_fejer(1.5).unwrap();
        let e = explicit_formula_with_limit(&fam, &f, QuadratureSpec::default(), 1000);
        assert!(matches!(e, Err(Error::Capacity(_))));
    }

    #[test]
    fn zero_function_zero_breakdown() {
        let fam = enumerate_family(FamilySpec::even(1000)).unwrap();
        let f = make_fejer(0.3).unwrap().scaled(0.0);
        let b = explicit_formula_total(&fam, &f, QuadratureSpec::default()).unwrap();
        assert_eq!(b.total, 0.0);
        assert_eq!(s_even_1_prime_sum(&f, 1e4).unwrap(), 0.0);
        assert_eq!(s_even_1_closed(&f, 1e4, QuadratureSpec::default()).unwrap().value.re, 0.0);
        assert_eq!(s_even_2_closed(&f, 1e4, QuadratureSpec::default()).unwrap().value.re, 0.0);
    }

    #[test]
    fn s_even_2_closed_matches_its_finite_expansion() {
        // ∫g·p^{−2kr} = ĝ(2k log p/L) term by term
        let f = make_fejer(0.5).unwrap();
        let x: f64 = 1e6;
        let l = x.ln();
        let mut finite = 0.0;
        for p in (2..1000u64).filter(|&p| is_prime(p)) {
            let lp = (p as f64).ln();
            let mut k = 1;
            while 2.0 * k as f64 * lp / l < 0.5 {
                finite += lp / ((p as f64 + 1.0) * (p as f64).powi(k)) * f.g_hat(2.0 * k as f64 * lp / l);
                k += 1;
            }
        }
        finite *= 2.0 / l;
        let spec = QuadratureSpec { truncation_t: 2000.0, panels: 2000, ..Default::default() };
        let q = s_even_2_closed(&f, x, spec).unwrap();
        assert!((q.value.re - finite).abs() < 1e-7, "{} vs {finite}", q.value.re);
    }

    #[test]
    fn jutila_excludes_squares() {
        let fam = enumerate_family(FamilySpec::even(10_000)).unwrap();
        let (without, k1) = jutila_sum(&fam, 1000, false).unwrap();
        let (with, k2) = jutila_sum(&fam, 1000, true).unwrap();
        assert_eq!(k2 - k1, 30); // squares 4..=961
        // χ_d(4) = 1 exactly when d is odd
        let odd = fam.members.iter().filter(|&&d| d % 2 == 1).count() as f64;
        assert!(with - without >= odd * odd);
        let r = jutila_ratio(&fam, 1000).unwrap();
        assert!(r.is_finite() && r < 10.0);
        assert!(jutila_ratio(&fam, 1).is_err());
    }

    #[test]
    fn multiplicative_characters_match_kronecker() {
        let fam = enumerate_family(FamilySpec::even(300)).unwrap();
        let n = 200;
        let (sum, _) = jutila_sum(&fam, n, true).unwrap();
        let mut direct = 0.0;
        for i in 2..=n {
            let s: i64 = fam.members.iter().map(|&d| kronecker(d as i64, i) as i64).sum();
            direct += (s as f64).powi(2);
        }
        assert_eq!(sum, direct);
    }
}
