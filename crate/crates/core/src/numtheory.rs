//! Exact integer arithmetic behind the size bounds of orthogonal arrays.
//!
//! For factor orders `s_1..s_k`, an array of strength `t` has a size that is a
//! multiple of `L_t`, the lcm over all `t`-subsets `I` of `prod_{i in I} s_i`.
//! With `e_I = gcd(s_i : i in I)` and `d = max{|I| : e_I > 1}` the sequence
//! satisfies `L_1 < ... < L_d = ... = L_k`.
//!
//! All arithmetic is done in `u128` with checked operations; an overflow is
//! reported as [`Error::Overflow`], never wrapped.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of factors accepted by [`FactorSpec::new`]. Subset
/// enumeration is exhaustive, so `2^k` must stay small.
pub const MAX_FACTORS: usize = 24;

/// Ordered factor orders `s_1..s_k`. Positions are factor identities, so
/// `[3, 2, 2]` and `[2, 3, 2]` are different specs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct FactorSpec {
    orders: Vec<u64>,
}

impl FactorSpec {
    pub fn new(orders: Vec<u64>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::Usage("a factor spec needs at least one factor".into()));
        }
        if orders.len() > MAX_FACTORS {
            return Err(Error::Usage(format!("at most {MAX_FACTORS} factors are supported, got {}", orders.len())));
        }
        if let Some((pos, &s)) = orders.iter().enumerate().find(|(_, &s)| s < 2) {
            return Err(Error::Usage(format!(
                "factor {} has order {s}; every factor needs at least 2 levels",
                pos + 1
            )));
        }
        Ok(FactorSpec { orders })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    /// Number of factors `k`.
    pub fn k(&self) -> usize {
        self.orders.len()
    }

    pub fn order(&self, i: usize) -> u64 {
        self.orders[i]
    }

    /// `s_1 * ... * s_k`, the size of the complete factorial.
    pub fn complete_size(&self) -> Result<u128> {
        checked_product(self.orders.iter().map(|&s| s as u128), "complete factorial size")
    }

    pub fn is_symmetric(&self) -> bool {
        self.orders.iter().all_equal()
    }

    /// `e_I`: gcd of the orders indexed by `subset` (0-based positions).
    pub fn gcd_of_subset(&self, subset: &[usize]) -> u64 {
        subset.iter().fold(0u64, |acc, &i| gcd(acc as u128, self.orders[i] as u128) as u64)
    }

    pub fn gcd_all(&self) -> u64 {
        self.orders.iter().fold(0u64, |acc, &s| gcd(acc as u128, s as u128) as u64)
    }

    fn check_strength(&self, t: usize) -> Result<()> {
        if t == 0 || t > self.k() {
            return Err(Error::Usage(format!(
                "strength {t} is out of range 1..={} for {} factors",
                self.k(),
                self.k()
            )));
        }
        Ok(())
    }
}

impl TryFrom<Vec<u64>> for FactorSpec {
    type Error = Error;

    fn try_from(orders: Vec<u64>) -> Result<Self> {
        FactorSpec::new(orders)
    }
}

impl From<FactorSpec> for Vec<u64> {
    fn from(spec: FactorSpec) -> Self {
        spec.orders
    }
}

impl fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.orders.iter().join("x"))
    }
}

/// `L_1..L_k` together with the threshold `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundProfile {
    /// `levels[t - 1]` is `L_t`.
    pub levels: Vec<u128>,
    pub d: usize,
}

impl BoundProfile {
    pub fn l(&self, t: usize) -> u128 {
        self.levels[t - 1]
    }

    /// Checks the divisibility chain and the strict/constant split at `d`.
    pub fn satisfies_chain(&self) -> bool {
        let k = self.levels.len();
        let divides = self.levels.windows(2).all(|w| w[1] % w[0] == 0);
        let strict_below = (1..self.d).all(|t| self.l(t) < self.l(t + 1));
        let flat_above = (self.d..k).all(|t| self.l(t) == self.l(t + 1));
        divides && strict_below && flat_above
    }
}

/// Exponent of a prime in an integer: `p^exponent | b` and `p^(exponent+1) ∤ b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeOrder {
    pub prime: u128,
    pub exponent: u32,
}

impl PrimeOrder {
    pub fn of(prime: u128, b: u128) -> Result<Self> {
        Ok(PrimeOrder { prime, exponent: ord_p(prime, b)? })
    }
}

pub fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u128, b: u128) -> Result<u128> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    (a / gcd(a, b)).checked_mul(b).ok_or(Error::Overflow("lcm"))
}

fn checked_product(values: impl IntoIterator<Item = u128>, what: &'static str) -> Result<u128> {
    values.into_iter().try_fold(1u128, |acc, v| acc.checked_mul(v)).ok_or(Error::Overflow(what))
}

/// Least common multiple of a nonempty list of positive integers.
pub fn lcm_set(values: &[u128]) -> Result<u128> {
    if values.is_empty() {
        return Err(Error::Usage("lcm of an empty list is undefined".into()));
    }
    if values.contains(&0) {
        return Err(Error::Usage("lcm_set expects positive integers".into()));
    }
    values.iter().try_fold(1u128, |acc, &v| lcm(acc, v))
}

pub fn gcd_set(values: &[u128]) -> u128 {
    values.iter().fold(0, |acc, &v| gcd(acc, v))
}

pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut f = 3u128;
    while f <= n / f {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// Largest `f` such that `p^f` divides `b`.
pub fn ord_p(p: u128, b: u128) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::Usage(format!("{p} is not a prime")));
    }
    if b == 0 {
        return Err(Error::Usage("ord_p is defined for positive integers only".into()));
    }
    let mut f = 0;
    let mut rest = b;
    while rest.is_multiple_of(p) {
        rest /= p;
        f += 1;
    }
    Ok(f)
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(mut n: u128) -> Vec<u128> {
    let mut primes = Vec::new();
    let mut f = 2u128;
    while f <= n / f {
        if n.is_multiple_of(f) {
            primes.push(f);
            while n.is_multiple_of(f) {
                n /= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if n > 1 {
        primes.push(n);
    }
    primes
}

/// lcm of the `n` products that leave one value out, computed directly.
pub fn leave_one_out_direct(values: &[u128]) -> Result<u128> {
    let products = (0..values.len())
        .map(|skip| {
            checked_product(
                values.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v),
                "leave-one-out product",
            )
        })
        .collect::<Result<Vec<_>>>()?;
    lcm_set(&products)
}

/// The same quantity as `(a_1 * ... * a_n) / gcd(a_1, ..., a_n)`.
pub fn leave_one_out_via_gcd(values: &[u128]) -> Result<u128> {
    let product = checked_product(values.iter().copied(), "product of values")?;
    Ok(product / gcd_set(values))
}

/// lcm of all `(n-1)`-fold products of `values`. Evaluated by both routes;
/// a disagreement is reported as an internal error.
pub fn lcm_of_leave_one_out_products(values: &[u128]) -> Result<u128> {
    if values.len() < 2 {
        return Err(Error::Usage(format!("leave-one-out products need at least 2 values, got {}", values.len())));
    }
    if values.contains(&0) {
        return Err(Error::Usage("values must be positive".into()));
    }
    let direct = leave_one_out_direct(values)?;
    let via_gcd = leave_one_out_via_gcd(values)?;
    if direct != via_gcd {
        return Err(Error::Internal(format!("leave-one-out lcm routes disagree: {direct} vs {via_gcd}")));
    }
    Ok(direct)
}

/// `L_t`: lcm over all `t`-subsets of the product of their orders.
pub fn compute_l(spec: &FactorSpec, t: usize) -> Result<u128> {
    spec.check_strength(t)?;
    (0..spec.k()).combinations(t).try_fold(1u128, |acc, subset| {
        let product = checked_product(subset.iter().map(|&i| spec.order(i) as u128), "L_t")?;
        lcm(acc, product)
    })
}

/// `L_t` computed prime by prime: the exponent of `p` in `L_t` is the sum of
/// the `t` largest exponents of `p` among the orders.
pub fn compute_l_prime_by_prime(spec: &FactorSpec, t: usize) -> Result<u128> {
    spec.check_strength(t)?;
    let primes = spec.orders().iter().flat_map(|&s| prime_divisors(s as u128)).sorted().dedup().collect::<Vec<_>>();
    let mut result = 1u128;
    for p in primes {
        let mut exps = spec.orders().iter().map(|&s| ord_p(p, s as u128)).collect::<Result<Vec<_>>>()?;
        exps.sort_unstable_by(|a, b| b.cmp(a));
        let e: u32 = exps.iter().take(t).sum();
        let factor = p.checked_pow(e).ok_or(Error::Overflow("L_t"))?;
        result = result.checked_mul(factor).ok_or(Error::Overflow("L_t"))?;
    }
    Ok(result)
}

/// `d = max{|I| : e_I > 1}`, scanning subset sizes from `k` downward.
pub fn compute_d(spec: &FactorSpec) -> usize {
    for size in (2..=spec.k()).rev() {
        if (0..spec.k()).combinations(size).any(|subset| spec.gcd_of_subset(&subset) > 1) {
            return size;
        }
    }
    // Every singleton has e_I = s_i >= 2.
    1
}

pub fn bound_profile(spec: &FactorSpec) -> Result<BoundProfile> {
    let levels = (1..=spec.k()).map(|t| compute_l(spec, t)).collect::<Result<Vec<_>>>()?;
    Ok(BoundProfile { levels, d: compute_d(spec) })
}

/// Whether a proper fraction of strength `t` can exist, i.e. `L_t < L_k`.
pub fn proper_fraction_feasible(spec: &FactorSpec, t: usize) -> Result<bool> {
    let lt = compute_l(spec, t)?;
    Ok(lt < spec.complete_size()?)
}
