//! `psi`-`lambda` Hodge integrals and the comparison with fiber evaluation.
//!
//! For `g >= 2` and `alpha_i >= 1` with `sum alpha_i = g - 2 + n`,
//!
//! ```text
//! int psi^alpha lambda_{g-1} lambda_g
//!   = (2g+n-3)! (2g-1)!! / ((2g-1)! prod (2 alpha_i - 1)!!) * F(g),
//! F(g) = |B_{2g}| / (2g * 2^{2g-1} (2g-1)!!).
//! ```

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{EngineConfig, GradedRing};
use crate::error::{Error, Result};
use crate::fm;
use crate::scalar::serialize_display;

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, x| acc * BigInt::from(x))
}

fn double_factorial(k: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut x = k;
    while x > 1 {
        acc *= BigInt::from(x);
        x -= 2;
    }
    acc
}

/// The Bernoulli numbers `B_0..=B_k` (with `B_1 = -1/2`) from
/// `sum_{j=0}^{m} C(m+1, j) B_j = 0`.
fn bernoulli_table(k: usize) -> Vec<BigRational> {
    let mut table: Vec<BigRational> = vec![BigRational::one()];
    for m in 1..=k {
        let acc = (0..m).fold(BigRational::zero(), |acc, j| {
            acc + BigRational::from_integer(binomial(BigInt::from(m + 1), BigInt::from(j)))
                * &table[j]
        });
        table.push(-acc / BigRational::from_integer(BigInt::from(m + 1)));
    }
    table
}

/// `B_k` for even `k >= 2`.
pub fn bernoulli(k: usize) -> Result<BigRational> {
    if k < 2 || k % 2 == 1 {
        return Err(Error::Invalid(format!("B_{k}: index must be even and at least 2")));
    }
    Ok(bernoulli_table(k).pop().expect("nonempty"))
}

/// `int_{M_{g,1}} psi^{g-1} lambda_{g-1} lambda_g`.
pub fn faber_constant(g: usize) -> Result<BigRational> {
    if g < 2 {
        return Err(Error::Invalid("the constant is defined for g >= 2".into()));
    }
    let b = bernoulli(2 * g)?.abs();
    let denom = BigInt::from(2 * g)
        * (BigInt::one() << (2 * g - 1))
        * double_factorial(2 * g as i64 - 1);
    Ok(b / BigRational::from_integer(denom))
}

/// A `psi`-monomial against `lambda_{g-1} lambda_g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HodgeQuery {
    pub g: usize,
    pub alphas: Vec<usize>,
}

impl HodgeQuery {
    pub fn new(g: usize, alphas: Vec<usize>) -> Result<Self> {
        let q = HodgeQuery { g, alphas };
        q.validate()?;
        Ok(q)
    }

    pub fn n(&self) -> usize {
        self.alphas.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.g < 2 {
            return Err(Error::Invalid("the formula needs g >= 2".into()));
        }
        if self.alphas.is_empty() {
            return Err(Error::Invalid("at least one marked point is needed".into()));
        }
        if self.alphas.contains(&0) {
            return Err(Error::Invalid(
                "the formula is stated for alpha_i >= 1 only".into(),
            ));
        }
        let total: usize = self.alphas.iter().sum();
        if total != self.g - 2 + self.n() {
            return Err(Error::Invalid(format!(
                "sum of alphas is {total}, the formula needs g - 2 + n = {}",
                self.g - 2 + self.n()
            )));
        }
        Ok(())
    }
}

pub fn hodge_psi_integral(q: &HodgeQuery) -> Result<BigRational> {
    q.validate()?;
    let (g, n) = (q.g, q.n());
    let num = factorial(2 * g + n - 3) * double_factorial(2 * g as i64 - 1);
    let den = q
        .alphas
        .iter()
        .fold(factorial(2 * g - 1), |acc, &a| acc * double_factorial(2 * a as i64 - 1));
    Ok(BigRational::new(num, den) * faber_constant(g)?)
}

/// Exponent vectors `alpha_i >= 1` with `sum = n`: in genus two only the
/// all-ones vector qualifies.
pub fn valid_alphas_genus_two(n: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let slots = n - cur.len() - 1;
        for x in 1..=left.saturating_sub(slots) {
            cur.push(x);
            rec(n, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Socle evaluation on `X[n]` of `prod psi_pullback(n, i)^{alpha_i}`.
///
/// The product is reduced after each factor so every intermediate class is a
/// normal form in its own degree.
pub fn fiber_eval(n: usize, alphas: &[usize], config: EngineConfig) -> Result<BigRational> {
    let ring = GradedRing::with_config(fm::fm_presentation::<BigRational>(n)?, config);
    fiber_eval_in(&ring, alphas)
}

pub fn fiber_eval_in(ring: &GradedRing<BigRational>, alphas: &[usize]) -> Result<BigRational> {
    let n = ring.n();
    if alphas.len() != n || alphas.iter().sum::<usize>() != n {
        return Err(Error::Invalid(format!(
            "need {n} exponents summing to {n}"
        )));
    }
    let mut acc = crate::poly::build::int::<BigRational>(1);
    for (k, &e) in alphas.iter().enumerate() {
        let psi = fm::psi_pullback::<BigRational>(n, k + 1)?;
        for _ in 0..e {
            acc = ring.multiply(&acc, &psi)?;
        }
    }
    ring.socle_eval(&acc)
}

/// The ratio between the moduli-side and fiber-side evaluations, fixed on
/// one marked point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BridgeConstant {
    #[serde(serialize_with = "serialize_display")]
    pub value: BigRational,
}

impl BridgeConstant {
    pub fn calibrate() -> Result<Self> {
        let lhs = hodge_psi_integral(&HodgeQuery::new(2, vec![1])?)?;
        let fiber = fiber_eval(1, &[1], EngineConfig::default())?;
        if fiber.is_zero() {
            return Err(Error::Invalid("calibration fiber value is zero".into()));
        }
        Ok(BridgeConstant { value: lhs / fiber })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BridgeReport {
    pub n: usize,
    pub alphas: Vec<usize>,
    #[serde(serialize_with = "serialize_display")]
    pub lhs: BigRational,
    #[serde(serialize_with = "serialize_display")]
    pub fiber: BigRational,
    #[serde(serialize_with = "serialize_display")]
    pub rhs: BigRational,
    pub verdict: bool,
}

pub fn bridge_check(n: usize, alphas: &[usize], config: EngineConfig) -> Result<BridgeReport> {
    let ring = GradedRing::with_config(fm::fm_presentation::<BigRational>(n)?, config);
    bridge_check_in(&ring, &BridgeConstant::calibrate()?, alphas)
}

pub fn bridge_check_in(
    ring: &GradedRing<BigRational>,
    constant: &BridgeConstant,
    alphas: &[usize],
) -> Result<BridgeReport> {
    let n = ring.n();
    let lhs = hodge_psi_integral(&HodgeQuery::new(2, alphas.to_vec())?)?;
    let fiber = fiber_eval_in(ring, alphas)?;
    let rhs = &constant.value * &fiber;
    Ok(BridgeReport {
        n,
        alphas: alphas.to_vec(),
        verdict: lhs == rhs,
        lhs,
        fiber,
        rhs,
    })
}
