//! Parameter schedules: the level function `f` and its inverse, the sampling
//! exponents `lambda_j`, the hierarchy depth `F`, and the analysis radii
//! `r_0..r_F` for each construction variant.
//!
//! Lambda values are kept as exact rationals; the half-bunch spanner variant
//! produces non-integer values and the depth-minimality test must not drift.

use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Hard cap on schedule length; a valid schedule reaches `k+1` in at most
/// `3(k+1)` terms since every lambda is at least 1/3.
const MAX_LEVELS: usize = 5_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LevelFunction {
    /// f(i) = k for i <= k (and i above, to keep f(i) >= i).
    Linear { k: u32 },
    /// f(i) = i.
    Identity,
    /// f(i) = floor(i/c)*c + c - 1.
    Interleaved { c: u32 },
    /// Explicit table, validated to be monotone with f(i) >= i.
    Custom { table: Vec<u32> },
}

impl LevelFunction {
    pub fn interleaved(c: u32) -> Result<LevelFunction> {
        if c == 0 {
            return Err(Error::invalid("interleaved block size c must be >= 1"));
        }
        Ok(LevelFunction::Interleaved { c })
    }

    pub fn custom(table: Vec<u32>) -> Result<LevelFunction> {
        for (i, &fi) in table.iter().enumerate() {
            if (fi as usize) < i {
                return Err(Error::invalid(format!(
                    "custom level function violates f(i) >= i at i={i} (f={fi})"
                )));
            }
            if i > 0 && fi < table[i - 1] {
                return Err(Error::invalid(format!(
                    "custom level function not monotone at i={i}"
                )));
            }
        }
        Ok(LevelFunction::Custom { table })
    }

    /// f(i).
    pub fn eval(&self, i: usize) -> Result<usize> {
        match self {
            LevelFunction::Linear { k } => Ok(if i <= *k as usize { *k as usize } else { i }),
            LevelFunction::Identity => Ok(i),
            LevelFunction::Interleaved { c } => {
                let c = *c as usize;
                Ok((i / c) * c + c - 1)
            }
            LevelFunction::Custom { table } => table.get(i).map(|&v| v as usize).ok_or_else(|| {
                Error::invalid(format!("custom level function not defined at i={i}"))
            }),
        }
    }

    /// f^{-1}(j) = min { i : f(i) >= j }.
    pub fn inverse(&self, j: usize) -> Result<usize> {
        match self {
            LevelFunction::Linear { k } => Ok(if j <= *k as usize { 0 } else { j }),
            LevelFunction::Identity => Ok(j),
            LevelFunction::Interleaved { c } => Ok((j / *c as usize) * *c as usize),
            LevelFunction::Custom { table } => {
                for (i, &fi) in table.iter().enumerate() {
                    if fi as usize >= j {
                        return Ok(i);
                    }
                }
                Err(Error::invalid(format!(
                    "level {j} exceeds the range of the custom level function"
                )))
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            LevelFunction::Linear { k } => format!("linear(k={k})"),
            LevelFunction::Identity => "identity".to_string(),
            LevelFunction::Interleaved { c } => format!("interleaved(c={c})"),
            LevelFunction::Custom { table } => format!("custom(len={})", table.len()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Hopset,
    SpannerTruncated,
    SpannerHalf,
}

impl Variant {
    fn lambda_base(self) -> Rational {
        match self {
            Variant::Hopset | Variant::SpannerTruncated => Rational::one(),
            Variant::SpannerHalf => Rational::new(1, 3),
        }
    }
}

/// Lambda sequence and minimal depth F for the variant recurrence:
/// hopset / truncated-spanner: lambda_j = 1 + sum_{l < f^{-1}(j)} lambda_l;
/// half-bunch spanner: one third of that. F is minimal with
/// sum_{l<F} lambda_l >= k+1.
pub fn compute_lambdas(
    k: u32,
    f: &LevelFunction,
    variant: Variant,
) -> Result<(Vec<Rational>, usize)> {
    if k < 1 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let target = Rational::from_integer(k as i128 + 1);
    let base = variant.lambda_base();
    let mut lambdas: Vec<Rational> = Vec::new();
    let mut prefix: Vec<Rational> = vec![Rational::zero()]; // prefix[j] = sum_{l<j}
    loop {
        let j = lambdas.len();
        if j >= MAX_LEVELS {
            return Err(Error::Infeasible(format!(
                "lambda sequence did not reach k+1 within {MAX_LEVELS} levels"
            )));
        }
        let inv = f.inverse(j)?;
        debug_assert!(inv <= j);
        let lam = base * (Rational::one() + prefix[inv]);
        let total = prefix[j] + lam;
        lambdas.push(lam);
        prefix.push(total);
        if total >= target {
            return Ok((lambdas, j + 1));
        }
    }
}

/// Radii r_0..r_F with r_0 = 1 and the per-variant recurrence, taken with
/// equality:
/// hopset:            r_i = (1+4/t) r_{i-1} + (2+4/t) r_{f^{-1}(i-1)}
/// truncated spanner: same + 2
/// half-bunch spanner: r_i = (2+8/t) r_{i-1} + (3+8/t) r_{f^{-1}(i-1)} + 4
pub fn compute_radii(f: &LevelFunction, t: f64, levels: usize, variant: Variant) -> Result<Vec<f64>> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::invalid(format!("t must be positive, got {t}")));
    }
    if levels < 1 {
        return Err(Error::invalid("need at least one level"));
    }
    let mut r = Vec::with_capacity(levels + 1);
    r.push(1.0);
    for i in 1..=levels {
        let prev = r[i - 1];
        let back = r[f.inverse(i - 1)?];
        let next = match variant {
            Variant::Hopset => (1.0 + 4.0 / t) * prev + (2.0 + 4.0 / t) * back,
            Variant::SpannerTruncated => (1.0 + 4.0 / t) * prev + (2.0 + 4.0 / t) * back + 2.0,
            Variant::SpannerHalf => (2.0 + 8.0 / t) * prev + (3.0 + 8.0 / t) * back + 4.0,
        };
        r.push(next);
    }
    Ok(r)
}

/// Radii used by the layered lower-bound instances: the hopset recurrence at
/// t = 4*alpha, i.e. r_{j+1} = (1+1/alpha) r_j + (2+1/alpha) r_{f^{-1}(j)}.
pub fn lower_bound_radii(f: &LevelFunction, alpha: f64, levels: usize) -> Result<Vec<f64>> {
    if alpha < 1.0 {
        return Err(Error::invalid(format!("alpha must be >= 1, got {alpha}")));
    }
    compute_radii(f, 4.0 * alpha, levels, Variant::Hopset)
}

/// Exact-rational version of [`lower_bound_radii`] for integer alpha; the
/// tower builder clears denominators from these.
pub fn lower_bound_radii_exact(f: &LevelFunction, alpha: u32, levels: usize) -> Result<Vec<Rational>> {
    if alpha < 1 {
        return Err(Error::invalid("alpha must be >= 1"));
    }
    let a = Rational::from_integer(alpha as i128);
    let inv_a = Rational::one() / a;
    let mut r: Vec<Rational> = vec![Rational::one()];
    for i in 1..=levels {
        let prev = r[i - 1];
        let back = r[f.inverse(i - 1)?];
        r.push((Rational::one() + inv_a) * prev + (Rational::from_integer(2) + inv_a) * back);
    }
    Ok(r)
}

/// Closed-form cap on r_F for the interleaved schedule at t = 4c:
/// 96 e^2 k^{1 + 2/ln c}.
pub fn rf_upper_bound(k: u32, c: u32) -> Result<f64> {
    if c < 2 {
        return Err(Error::invalid(format!(
            "the r_F bound needs c >= 2 (ln c in a denominator), got {c}"
        )));
    }
    if k < 1 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let e2 = std::f64::consts::E * std::f64::consts::E;
    Ok(96.0 * e2 * (k as f64).powf(1.0 + 2.0 / (c as f64).ln()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerMeanOutcome {
    Holds,
    Violated { x: f64, y: f64, lhs: f64, rhs: f64 },
    PreconditionUnmet { value: f64 },
}

/// Grid check of `a x^{1+1/d} + b y^{1+1/d} >= (x+y)^{1+1/d}` for x,y in
/// [0, max] on a `steps x steps` grid, valid whenever a^{-d} + b^{-d} <= 1.
pub fn power_mean_inequality_holds(
    a: f64,
    b: f64,
    d: f64,
    steps: usize,
    max: f64,
) -> PowerMeanOutcome {
    let pre = a.powf(-d) + b.powf(-d);
    if !(a > 1.0 && b > 1.0 && d > 0.0) || pre > 1.0 + 1e-12 {
        return PowerMeanOutcome::PreconditionUnmet { value: pre };
    }
    let expo = 1.0 + 1.0 / d;
    for ix in 0..steps {
        for iy in 0..steps {
            let x = max * ix as f64 / (steps - 1) as f64;
            let y = max * iy as f64 / (steps - 1) as f64;
            let lhs = a * x.powf(expo) + b * y.powf(expo);
            let rhs = (x + y).powf(expo);
            if lhs < rhs - 1e-9 * rhs.abs().max(1.0) {
                return PowerMeanOutcome::Violated { x, y, lhs, rhs };
            }
        }
    }
    PowerMeanOutcome::Holds
}

/// The full parameter bundle of one construction run.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSchedule {
    pub k: u32,
    pub f: LevelFunction,
    pub lambdas: Vec<Rational>,
    /// Depth F: the hierarchy is A_0 ⊇ ... ⊇ A_F.
    pub levels: usize,
    pub t: f64,
    /// r_0..r_F.
    pub radii: Vec<f64>,
    pub variant: Variant,
}

impl ParamSchedule {
    pub fn new(k: u32, f: LevelFunction, t: f64, variant: Variant) -> Result<ParamSchedule> {
        let (lambdas, levels) = compute_lambdas(k, &f, variant)?;
        let radii = compute_radii(&f, t, levels, variant)?;
        // builtin kinds are total; for custom tables this validates the
        // domain reaches F
        f.eval(levels)?;
        let sched = ParamSchedule {
            k,
            f,
            lambdas,
            levels,
            t,
            radii,
            variant,
        };
        sched.validate()?;
        Ok(sched)
    }

    /// Same lambdas and depth, radii recomputed for a different `t` (the
    /// hopset and half-bunch spanner guarantees hold for every t on one
    /// build).
    pub fn with_t(&self, t: f64) -> Result<ParamSchedule> {
        let radii = compute_radii(&self.f, t, self.levels, self.variant)?;
        Ok(ParamSchedule {
            t,
            radii,
            ..self.clone()
        })
    }

    pub fn f_inverse(&self, j: usize) -> usize {
        self.f.inverse(j).expect("validated domain")
    }

    pub fn f_eval(&self, i: usize) -> usize {
        self.f.eval(i).expect("validated domain")
    }

    /// Sampling probability n^{-lambda_j / k} of promotion from A_j to A_{j+1}.
    pub fn sampling_prob(&self, n: usize, j: usize) -> f64 {
        let lam = ratio_to_f64(self.lambdas[j]);
        (n.max(1) as f64).powf(-lam / self.k as f64)
    }

    pub fn r_top(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    /// Hop budget certified by the analysis: ceil(4 r_F) + 3.
    pub fn hop_budget(&self) -> u32 {
        (4.0 * self.r_top()).ceil() as u32 + 3
    }

    /// Claimed hopset stretch 2t+3.
    pub fn hopset_stretch(&self) -> f64 {
        2.0 * self.t + 3.0
    }

    /// Claimed spanner bound (t+3, 4 r_F).
    pub fn spanner_bounds(&self) -> (f64, f64) {
        (self.t + 3.0, 4.0 * self.r_top())
    }

    /// Re-check every schedule invariant; used when loading artifacts.
    pub fn validate(&self) -> Result<()> {
        if self.k < 1 {
            return Err(Error::Inconsistent("k must be >= 1".into()));
        }
        let (lambdas, levels) = compute_lambdas(self.k, &self.f, self.variant)?;
        if lambdas != self.lambdas || levels != self.levels {
            return Err(Error::Inconsistent(
                "lambda sequence does not satisfy the variant recurrence with minimal F".into(),
            ));
        }
        let radii = compute_radii(&self.f, self.t, self.levels, self.variant)?;
        if radii != self.radii {
            return Err(Error::Inconsistent(
                "radii do not satisfy the variant recurrence".into(),
            ));
        }
        for w in self.radii.windows(2) {
            if w[1] < w[0] {
                return Err(Error::Inconsistent("radii are not monotone".into()));
            }
        }
        match self.variant {
            Variant::Hopset | Variant::SpannerTruncated => {
                if self.levels > self.k as usize + 1 {
                    return Err(Error::Inconsistent("F exceeds k+1".into()));
                }
                for lam in &self.lambdas {
                    if !lam.is_integer() || !lam.is_positive() {
                        return Err(Error::Inconsistent(
                            "hopset-variant lambdas must be positive integers".into(),
                        ));
                    }
                }
            }
            Variant::SpannerHalf => {}
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!("k={},f={},t={}", self.k, self.f.label(), self.t)
    }
}

pub fn ratio_to_f64(r: Rational) -> f64 {
    r.to_f64().expect("rational fits f64")
}

// -- serialization: lambdas as exact `p/q` strings, radii as decimal strings

#[derive(Serialize, Deserialize)]
struct ScheduleRepr {
    k: u32,
    f: LevelFunction,
    lambdas: Vec<String>,
    levels: usize,
    t: f64,
    radii: Vec<String>,
    variant: Variant,
}

impl Serialize for ParamSchedule {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ScheduleRepr {
            k: self.k,
            f: self.f.clone(),
            lambdas: self.lambdas.iter().map(|l| l.to_string()).collect(),
            levels: self.levels,
            t: self.t,
            radii: self.radii.iter().map(|r| r.to_string()).collect(),
            variant: self.variant,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for ParamSchedule {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = ScheduleRepr::deserialize(de)?;
        let lambdas = repr
            .lambdas
            .iter()
            .map(|s| s.parse::<Rational>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let radii = repr
            .radii
            .iter()
            .map(|s| s.parse::<f64>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let sched = ParamSchedule {
            k: repr.k,
            f: repr.f,
            lambdas,
            levels: repr.levels,
            t: repr.t,
            radii,
            variant: repr.variant,
        };
        sched.validate().map_err(D::Error::custom)?;
        Ok(sched)
    }
}
