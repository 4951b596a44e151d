//! Integer substrate: prime and Möbius sieves, fundamental discriminants,
//! Kronecker symbols, and the counting / exponential-sum checks over
//! discriminant families.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Default memory budget for sieves and tables, in bytes.
pub const DEFAULT_MEMORY_BUDGET: usize = 1 << 31;

const SEGMENT: u64 = 1 << 18;

#[derive(Debug, Clone)]
pub struct PrimeTable {
    pub limit: u64,
    pub primes: Vec<u64>,
    pub logs: Vec<f64>,
}

impl PrimeTable {
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Iterator over `(p, log p)` for primes not exceeding `bound`.
    pub fn up_to(&self, bound: u64) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.primes
            .iter()
            .zip(&self.logs)
            .take_while(move |(&p, _)| p <= bound)
            .map(|(&p, &l)| (p, l))
    }

    /// Prime powers `p^k <= bound` as `(p^k, p, k, log p)`; these carry the
    /// von Mangoldt weight `Λ(p^k) = log p`.
    pub fn prime_powers_up_to(&self, bound: u64) -> Result<Vec<(u64, u64, u32, f64)>> {
        if bound > self.limit {
            return Err(Error::Capacity(format!(
                "prime table limit {} below requested bound {bound}",
                self.limit
            )));
        }
        let mut out = Vec::new();
        for (p, lp) in self.up_to(bound) {
            let mut q = p;
            let mut k = 1;
            loop {
                out.push((q, p, k, lp));
                match q.checked_mul(p) {
                    Some(next) if next <= bound => {
                        q = next;
                        k += 1;
                    }
                    _ => break,
                }
            }
        }
        out.sort_unstable_by_key(|t| t.0);
        Ok(out)
    }
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    sieve_primes_with_budget(limit, DEFAULT_MEMORY_BUDGET)
}

/// Segmented sieve of Eratosthenes. The budget covers the output vectors
/// (estimated from `π(x) < 1.26 x / ln x`) plus one segment.
pub fn sieve_primes_with_budget(limit: u64, budget: usize) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::Domain(format!("sieve limit must be >= 2, got {limit}")));
    }
    let est_count = 1.26 * limit as f64 / (limit as f64).ln().max(1.0) + 10.0;
    let need = est_count * 16.0 + SEGMENT as f64;
    if need > budget as f64 {
        return Err(Error::Capacity(format!(
            "prime sieve to {limit} needs ~{need:.0} bytes, budget {budget}"
        )));
    }
    let root = isqrt(limit);
    let base = simple_sieve(root);
    let mut primes: Vec<u64> = base.clone();
    let mut lo = root + 1;
    let mut mark = vec![false; SEGMENT as usize];
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        mark[..len].iter_mut().for_each(|m| *m = false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            let mut start = lo.div_ceil(p) * p;
            if start < p * p {
                start = p * p;
            }
            let mut j = start;
            while j <= hi {
                mark[(j - lo) as usize] = true;
                j += p;
            }
        }
        primes.extend((0..len).filter(|&i| !mark[i]).map(|i| lo + i as u64));
        lo = hi + 1;
    }
    let logs = primes.iter().map(|&p| (p as f64).ln()).collect();
    Ok(PrimeTable { limit, primes, logs })
}

/// Deterministic primality by trial division; used for checks, not for bulk work.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[derive(Debug, Clone)]
pub struct MobiusTable {
    pub limit: u64,
    mu: Vec<i8>,
}

impl MobiusTable {
    /// μ(n); panics if `n` is 0 or beyond the table.
    pub fn mu(&self, n: u64) -> i8 {
        assert!(n >= 1 && n <= self.limit, "mobius index {n} outside 1..={}", self.limit);
        self.mu[n as usize]
    }
}

pub fn mobius_table(limit: u64) -> Result<MobiusTable> {
    mobius_table_with_budget(limit, DEFAULT_MEMORY_BUDGET)
}

/// Linear sieve for μ.
pub fn mobius_table_with_budget(limit: u64, budget: usize) -> Result<MobiusTable> {
    if limit < 1 {
        return Err(Error::Domain("mobius limit must be >= 1".into()));
    }
    let need = (limit as f64) * 1.0 + 1.26 * limit as f64 / (limit as f64).ln().max(1.0) * 4.0;
    if need > budget as f64 {
        return Err(Error::Capacity(format!(
            "mobius table to {limit} needs ~{need:.0} bytes, budget {budget}"
        )));
    }
    let n = limit as usize;
    let mut mu = vec![1i8; n + 1];
    let mut is_comp = vec![false; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    mu[0] = 0;
    for i in 2..=n {
        if !is_comp[i] {
            primes.push(i as u32);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p as usize;
            if ip > n {
                break;
            }
            is_comp[ip] = true;
            if i % p as usize == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    Ok(MobiusTable { limit, mu })
}

/// Square-free flags for `lo..=hi`.
fn squarefree_block(lo: u64, hi: u64, base: &[u64]) -> Vec<bool> {
    let len = (hi - lo + 1) as usize;
    let mut sf = vec![true; len];
    for &p in base {
        let q = p * p;
        if q > hi {
            break;
        }
        let mut j = lo.div_ceil(q) * q;
        while j <= hi {
            sf[(j - lo) as usize] = false;
            j += q;
        }
    }
    sf
}

/// Square-free test by trial division over p ≤ √n.
pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// The Kronecker symbol `(d/n)` for any integer `d` and `n >= 0`.
pub fn kronecker(d: i64, n: u64) -> i8 {
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut n = n;
    let mut result: i8 = 1;
    let twos = n.trailing_zeros();
    if twos > 0 {
        if d % 2 == 0 {
            return 0;
        }
        n >>= twos;
        // (d/2) = +1 for d ≡ ±1 (mod 8), −1 for d ≡ ±3 (mod 8)
        let r = d.rem_euclid(8);
        if (r == 3 || r == 5) && twos % 2 == 1 {
            result = -result;
        }
    }
    if n == 1 {
        return result;
    }
    let a = d.rem_euclid(n as i64) as u64;
    result * jacobi(a, n)
}

/// Jacobi symbol `(a/n)` for odd `n > 0`.
pub fn jacobi(a: u64, n: u64) -> i8 {
    debug_assert!(n % 2 == 1);
    let mut a = a % n;
    let mut n = n;
    let mut t: i8 = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        let r = n % 8;
        if tz % 2 == 1 && (r == 3 || r == 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyKind {
    /// Positive fundamental discriminants `d <= X`, excluding `d = 1`.
    EvenFundamental,
    /// `8d'` with `d' <= X` odd, positive and square-free.
    EightD,
}

impl std::str::FromStr for FamilyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "even" | "evenfundamental" | "even-fundamental" => Ok(FamilyKind::EvenFundamental),
            "8d" | "eightd" => Ok(FamilyKind::EightD),
            other => Err(Error::Config(format!("unknown family kind '{other}' (expected even|8d)"))),
        }
    }
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilyKind::EvenFundamental => write!(f, "even"),
            FamilyKind::EightD => write!(f, "8d"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub x_max: u64,
    /// Parity `a(χ_d)`; zero for both supported kinds.
    pub a_char: u8,
}

impl FamilySpec {
    pub fn new(kind: FamilyKind, x_max: u64) -> Self {
        FamilySpec { kind, x_max, a_char: 0 }
    }

    pub fn even(x_max: u64) -> Self {
        Self::new(FamilyKind::EvenFundamental, x_max)
    }
}

#[derive(Debug, Clone)]
pub struct DiscriminantFamily {
    pub spec: FamilySpec,
    pub members: Vec<u64>,
    pub x_star: usize,
}

impl DiscriminantFamily {
    /// Family with explicitly given members, for small hand-checked cases.
    /// `x_max` still sets the `log X` scale.
    pub fn from_members(spec: FamilySpec, mut members: Vec<u64>) -> Self {
        members.sort_unstable();
        members.dedup();
        let x_star = members.len();
        DiscriminantFamily { spec, members, x_star }
    }

    /// `log X`, the scale used to normalise zeros and prime sums.
    pub fn log_x(&self) -> f64 {
        (self.spec.x_max as f64).ln()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `log(d/π)` for every member, in member order.
    pub fn log_d_over_pi(&self) -> Vec<f64> {
        let lp = PI.ln();
        self.members.iter().map(|&d| (d as f64).ln() - lp).collect()
    }

    /// Number of members divisible by `p`.
    pub fn count_divisible(&self, p: u64) -> usize {
        self.members.iter().filter(|&&d| d % p == 0).count()
    }
}

pub fn is_even_fundamental(d: u64) -> bool {
    if d <= 1 {
        return false;
    }
    match d % 4 {
        1 => is_squarefree(d),
        0 => {
            let m = d / 4;
            (m % 4 == 2 || m % 4 == 3) && is_squarefree(m)
        }
        _ => false,
    }
}

pub fn enumerate_family(spec: FamilySpec) -> Result<DiscriminantFamily> {
    if spec.x_max < 1 {
        return Err(Error::Domain("family bound must be >= 1".into()));
    }
    if spec.a_char != 0 {
        return Err(Error::Domain("only even families (a_char = 0) are supported".into()));
    }
    let x = spec.x_max;
    let base = simple_sieve(isqrt(x) + 1);
    let starts: Vec<u64> = (0..x.div_ceil(SEGMENT)).map(|b| 1 + b * SEGMENT).collect();
    let blocks: Vec<Vec<u64>> = starts
        .par_iter()
        .map(|&lo| {
            let hi = (lo + SEGMENT - 1).min(x);
            let sf = squarefree_block(lo, hi, &base);
            let is_sf = |n: u64| sf[(n - lo) as usize];
            let mut out = Vec::new();
            match spec.kind {
                FamilyKind::EvenFundamental => {
                    for d in lo..=hi {
                        let ok = match d % 4 {
                            1 => d > 1 && is_sf(d),
                            // d/4 lies below lo for most d, so test it directly
                            0 => {
                                let m = d / 4;
                                (m % 4 == 2 || m % 4 == 3) && is_squarefree_small(m, &base)
                            }
                            _ => false,
                        };
                        if ok {
                            out.push(d);
                        }
                    }
                }
                FamilyKind::EightD => {
                    for d in lo..=hi {
                        if d % 2 == 1 && is_sf(d) {
                            out.push(8 * d);
                        }
                    }
                }
            }
            out
        })
        .collect();
    let members: Vec<u64> = blocks.into_iter().flatten().collect();
    let x_star = members.len();
    Ok(DiscriminantFamily { spec, members, x_star })
}

fn is_squarefree_small(m: u64, base: &[u64]) -> bool {
    for &p in base {
        let q = p * p;
        if q > m {
            break;
        }
        if m.is_multiple_of(q) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingCheck {
    pub x: u64,
    pub x_star: usize,
    pub predicted: f64,
    pub deviation: f64,
    /// `deviation / √X`.
    pub normalized: f64,
}

/// Compares `X*` with `3X/π²`.
pub fn check_counting(x: u64) -> Result<CountingCheck> {
    if x < 10 {
        return Err(Error::Domain(format!("counting check needs X >= 10, got {x}")));
    }
    let fam = enumerate_family(FamilySpec::even(x))?;
    let predicted = 3.0 * x as f64 / (PI * PI);
    let deviation = (fam.x_star as f64 - predicted).abs();
    Ok(CountingCheck {
        x,
        x_star: fam.x_star,
        predicted,
        deviation,
        normalized: deviation / (x as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivisibleCheck {
    pub x: u64,
    pub p: u64,
    pub count: usize,
    pub x_star: usize,
    /// `X*/(p+1)`.
    pub predicted: f64,
    pub deviation: f64,
    pub normalized: f64,
}

pub fn check_divisible_count(x: u64, p: u64) -> Result<DivisibleCheck> {
    let fam = enumerate_family(FamilySpec::even(x))?;
    divisible_count_in(&fam, p)
}

/// `#{d in family : p | d}` against `X*/(p+1)`, for prime `p <= √X`.
pub fn divisible_count_in(fam: &DiscriminantFamily, p: u64) -> Result<DivisibleCheck> {
    let x = fam.spec.x_max;
    if !is_prime(p) {
        return Err(Error::Domain(format!("{p} is not prime")));
    }
    if p * p > x {
        return Err(Error::Domain(format!("p = {p} exceeds sqrt(X) for X = {x}")));
    }
    let count = fam.count_divisible(p);
    let predicted = fam.x_star as f64 / (p as f64 + 1.0);
    let deviation = (count as f64 - predicted).abs();
    Ok(DivisibleCheck {
        x,
        p,
        count,
        x_star: fam.x_star,
        predicted,
        deviation,
        normalized: deviation / (x as f64).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumMode {
    /// Literal sum over the family.
    Exact,
    /// Closed-form main term from partial summation.
    Asymptotic,
}

/// `Σ_d exp(−2πi z log(d/π)/log X)` over the family.
///
/// The asymptotic mode requires `Im z = −w log X / 2π` with `w >= 1/2` or
/// `w = 0`, and fails at the pole `1 − 2πiz/log X = 0` of the closed form.
pub fn disc_exp_sum(fam: &DiscriminantFamily, z: Complex64, mode: SumMode) -> Result<Complex64> {
    let l = fam.log_x();
    match mode {
        SumMode::Exact => {
            let c = Complex64::new(0.0, -2.0 * PI) * z / l;
            let lp = PI.ln();
            let partial: Vec<Complex64> = fam
                .members
                .par_chunks(4096)
                .map(|chunk| {
                    chunk
                        .iter()
                        .map(|&d| (c * ((d as f64).ln() - lp)).exp())
                        .sum::<Complex64>()
                })
                .collect();
            Ok(partial.into_iter().sum())
        }
        SumMode::Asymptotic => {
            let w = -2.0 * PI * z.im / l;
            if w.abs() > 1e-12 && w < 0.5 - 1e-12 {
                return Err(Error::Domain(format!(
                    "asymptotic d-sum needs w >= 1/2 or w = 0, got w = {w}"
                )));
            }
            let denom = Complex64::new(1.0, 0.0) - Complex64::new(0.0, 2.0 * PI) * z / l;
            if denom.norm() < 1e-14 {
                return Err(Error::Pole("closed form of the d-sum at 1 - 2πiz/log X = 0".into()));
            }
            let phase = Complex64::new(0.0, -2.0 * PI * (1.0 - PI.ln() / l)) * z;
            Ok(fam.x_star as f64 * phase.exp() / denom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_criterion(d: i64, p: u64) -> i8 {
        let a = d.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        let mut r = 1u64;
        let mut b = a;
        let mut e = (p - 1) / 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        if r == 1 {
            1
        } else {
            -1
        }
    }

    fn trial_division_primes(limit: u64) -> Vec<u64> {
        (2..=limit).filter(|&n| is_prime(n)).collect()
    }

    #[test]
    fn small_sieves() {
        assert_eq!(sieve_primes(10).unwrap().primes, vec![2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap().primes, vec![2]);
        assert!(matches!(sieve_primes(1), Err(Error::Domain(_))));
        let t = sieve_primes(1000).unwrap();
        assert_eq!(t.primes, trial_division_primes(1000));
        assert!((t.logs[3] - 7f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn sieve_to_a_million_matches_trial_division_count() {
        let t = sieve_primes(1_000_000).unwrap();
        assert_eq!(t.len(), 78498);
        assert!(t.primes.windows(2).all(|w| w[0] < w[1]));
        // independent recount over a window crossing several segments
        let window: Vec<u64> = t.primes.iter().copied().filter(|&p| (250_000..300_000).contains(&p)).collect();
        let recount: Vec<u64> = (250_000..300_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(window, recount);
    }

    #[test]
    fn sieve_budget_is_enforced() {
        assert!(matches!(sieve_primes_with_budget(10_000_000, 1000), Err(Error::Capacity(_))));
        assert!(matches!(mobius_table_with_budget(10_000_000, 1000), Err(Error::Capacity(_))));
    }

    #[test]
    fn mobius_values() {
        let m = mobius_table(10_000).unwrap();
        assert_eq!(m.mu(1), 1);
        assert_eq!(m.mu(2), -1);
        assert_eq!(m.mu(4), 0);
        assert_eq!(m.mu(30), -1);
        let sq: usize = (1..=10_000u64).filter(|&n| m.mu(n) != 0).count();
        let direct = (1..=10_000u64).filter(|&n| is_squarefree(n)).count();
        assert_eq!(sq, direct);
        for a in 1..60u64 {
            for b in 1..60u64 {
                if gcd(a, b) == 1 {
                    assert_eq!(m.mu(a * b), m.mu(a) * m.mu(b));
                }
            }
        }
    }

    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(12, 3), 0);
        assert_eq!(kronecker(8, 3), -1);
        for d in [-7i64, 1, 5, 8, 12, 13, 1000] {
            assert_eq!(kronecker(d, 1), 1);
        }
        assert_eq!(kronecker(1, 0), 1);
        assert_eq!(kronecker(5, 0), 0);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        let primes = trial_division_primes(200);
        for &p in primes.iter().skip(1) {
            for d in -300i64..300 {
                assert_eq!(kronecker(d, p), euler_criterion(d, p), "d={d} p={p}");
            }
        }
    }

    #[test]
    fn family_examples() {
        let f = enumerate_family(FamilySpec::even(20)).unwrap();
        assert_eq!(f.members, vec![5, 8, 12, 13, 17]);
        assert_eq!(f.x_star, 5);
        assert!(enumerate_family(FamilySpec::even(4)).unwrap().members.is_empty());
        let g = enumerate_family(FamilySpec::new(FamilyKind::EightD, 10)).unwrap();
        assert_eq!(g.members, vec![8, 24, 40, 56]);
    }

    #[test]
    fn family_matches_brute_force_definition() {
        let x = 700_000;
        let f = enumerate_family(FamilySpec::even(x)).unwrap();
        let brute: Vec<u64> = (1..=x).filter(|&d| is_even_fundamental(d)).collect();
        assert_eq!(f.members, brute);
    }

    #[test]
    fn characters_on_family_members() {
        let f = enumerate_family(FamilySpec::even(2000)).unwrap();
        let primes = trial_division_primes(100);
        for &d in &f.members {
            for &p in primes.iter().skip(1) {
                let c = kronecker(d as i64, p);
                if d % p == 0 {
                    assert_eq!(c, 0);
                } else {
                    assert_eq!(c * c, 1);
                }
            }
            for m in 1..40u64 {
                for n in 1..40u64 {
                    assert_eq!(kronecker(d as i64, m * n), kronecker(d as i64, m) * kronecker(d as i64, n));
                }
            }
        }
    }

    #[test]
    fn counting_small_cases() {
        let c = check_counting(10).unwrap();
        assert_eq!(c.x_star, 2);
        let c = check_counting(10_000).unwrap();
        assert!((c.predicted - 3039.6355).abs() < 1e-3);
        assert!(c.deviation <= 10.0 * 100.0);
        assert!(check_counting(9).is_err());
    }

    #[test]
    fn divisible_count_small_case_and_domain() {
        let c = check_divisible_count(100, 7).unwrap();
        let brute = (1..=100u64).filter(|&d| is_even_fundamental(d) && d % 7 == 0).count();
        assert_eq!(c.count, brute);
        assert!(matches!(check_divisible_count(100, 11), Err(Error::Domain(_))));
        assert!(matches!(check_divisible_count(100, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn exp_sum_at_zero_is_cardinality() {
        let f = enumerate_family(FamilySpec::even(1000)).unwrap();
        let s = disc_exp_sum(&f, Complex64::new(0.0, 0.0), SumMode::Exact).unwrap();
        assert!((s.re - f.x_star as f64).abs() < 1e-9 && s.im.abs() < 1e-9);
    }

    #[test]
    fn exp_sum_asymptotic_domain() {
        let f = enumerate_family(FamilySpec::even(10_000)).unwrap();
        let l = f.log_x();
        let z = |tau: f64, w: f64| Complex64::new(tau, -w * l / (2.0 * PI));
        assert!(matches!(disc_exp_sum(&f, z(1.0, 0.25), SumMode::Asymptotic), Err(Error::Domain(_))));
        assert!(disc_exp_sum(&f, z(1.0, 0.0), SumMode::Asymptotic).is_ok());
        assert!(matches!(disc_exp_sum(&f, z(0.0, 1.0), SumMode::Asymptotic), Err(Error::Pole(_))));
        let exact = disc_exp_sum(&f, z(1.0, 2.0), SumMode::Exact).unwrap();
        let asym = disc_exp_sum(&f, z(1.0, 2.0), SumMode::Asymptotic).unwrap();
        assert!((exact - asym).norm() <= 5.0 * l);
    }

    #[test]
    fn prime_powers_carry_log_p() {
        let t = sieve_primes(100).unwrap();
        let pp = t.prime_powers_up_to(30).unwrap();
        let ns: Vec<u64> = pp.iter().map(|x| x.0).collect();
        assert_eq!(ns, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29]);
        assert!(t.prime_powers_up_to(1000).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn kronecker_completely_multiplicative(idx in 0usize..300, m in 1u64..5000, n in 1u64..5000) {
                let fam = enumerate_family(FamilySpec::even(2000)).unwrap();
                let d = fam.members[idx % fam.members.len()] as i64;
                prop_assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n));
            }

            #[test]
            fn kronecker_zero_iff_common_factor(d in 2i64..5000, n in 1u64..5000) {
                let g = gcd(d as u64, n);
                prop_assert_eq!(kronecker(d, n) == 0, g > 1);
            }
        }
    }
}
