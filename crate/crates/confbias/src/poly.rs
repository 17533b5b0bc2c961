//! Exact polynomials in the link parameter delta.
//!
//! All worths, allocations and biases in this crate are carried symbolically
//! as `DeltaPoly` values with arbitrary-precision rational coefficients, and
//! are only evaluated to a number at the cheap-talk stage.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

pub type Rat = BigRational;

/// Rational `n/d` from machine integers.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses "p/q", an integer, or a plain decimal like "0.25".
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    if let Some(dot) = s.find('.') {
        let (int_part, frac_part) = (&s[..dot], &s[dot + 1..]);
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::BadRational(s.to_string()));
        }
        let negative = int_part.starts_with('-');
        let int_digits = int_part.trim_start_matches(['-', '+']);
        let int_val = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            BigInt::from_str(int_digits).map_err(|_| Error::BadRational(s.to_string()))?
        };
        let frac_val =
            BigInt::from_str(frac_part).map_err(|_| Error::BadRational(s.to_string()))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let mut v = Rat::new(int_val * &scale + frac_val, scale);
        if negative {
            v = -v;
        }
        Ok(v)
    } else {
        Rat::from_str(s).map_err(|_| Error::BadRational(s.to_string()))
    }
}

/// Renders a rational as "p/q" (or "p" when integral).
pub fn rat_string(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal rendering to 12 significant digits, for human-readable reports.
pub fn decimal12(r: &Rat) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let v = r.to_f64().unwrap_or(f64::NAN);
    if !v.is_finite() {
        return format!("{v}");
    }
    let mag = v.abs().log10().floor() as i32;
    if (-4..12).contains(&mag) {
        let prec = (11 - mag).max(0) as usize;
        let s = format!("{v:.prec$}");
        if s.contains('.') {
            let trimmed = s.trim_end_matches('0').trim_end_matches('.');
            trimmed.to_string()
        } else {
            s
        }
    } else {
        format!("{v:.11e}")
    }
}

/// A link-value parameter, constrained to the open interval (0,1).
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaValue(Rat);

impl DeltaValue {
    pub fn new(value: Rat) -> Result<Self> {
        if value <= Rat::zero() || value >= Rat::one() {
            return Err(Error::DeltaOutOfRange(rat_string(&value)));
        }
        Ok(DeltaValue(value))
    }

    pub fn parse(s: &str) -> Result<Self> {
        DeltaValue::new(parse_rat(s)?)
    }

    pub fn value(&self) -> &Rat {
        &self.0
    }
}

/// A polynomial in delta with exact rational coefficients.
///
/// Zero coefficients are never stored, so structural equality is exact
/// polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DeltaPoly {
    coeffs: BTreeMap<u32, Rat>,
}

impl DeltaPoly {
    pub fn zero() -> Self {
        DeltaPoly::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn term(power: u32, coeff: Rat) -> Self {
        let mut p = DeltaPoly::zero();
        p.add_term(power, &coeff);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (u32, Rat)>>(terms: I) -> Self {
        let mut p = DeltaPoly::zero();
        for (pow, c) in terms {
            p.add_term(pow, &c);
        }
        p
    }

    pub fn coeff(&self, power: u32) -> Rat {
        self.coeffs.get(&power).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Rat)> {
        self.coeffs.iter().map(|(p, c)| (*p, c))
    }

    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn add_term(&mut self, power: u32, coeff: &Rat) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(power).or_insert_with(Rat::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.coeffs.remove(&power);
        }
    }

    /// `self += factor * other`, coefficient-wise.
    pub fn add_scaled(&mut self, other: &DeltaPoly, factor: &Rat) {
        if factor.is_zero() {
            return;
        }
        for (pow, c) in &other.coeffs {
            self.add_term(*pow, &(c * factor));
        }
    }

    pub fn scale(&self, factor: &Rat) -> DeltaPoly {
        let mut out = DeltaPoly::zero();
        out.add_scaled(self, factor);
        out
    }

    /// Unchecked evaluation at an arbitrary rational point.
    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        let mut cur_pow: u32 = 0;
        let mut cur = Rat::one();
        for (pow, c) in &self.coeffs {
            while cur_pow < *pow {
                cur *= x;
                cur_pow += 1;
            }
            acc += c * &cur;
        }
        acc
    }

    /// Evaluation at a link parameter, which is guaranteed in (0,1).
    pub fn eval_at(&self, d: &DeltaValue) -> Rat {
        self.eval(d.value())
    }

    /// Sum of coefficients, i.e. the value at delta = 1.
    pub fn coeff_sum(&self) -> Rat {
        self.coeffs.values().fold(Rat::zero(), |a, c| a + c)
    }

    /// All coefficients nonnegative (used for dominance arguments on (0,1)).
    pub fn is_coefficientwise_nonnegative(&self) -> bool {
        self.coeffs.values().all(|c| !c.is_negative())
    }
}

impl Add for &DeltaPoly {
    type Output = DeltaPoly;
    fn add(self, rhs: &DeltaPoly) -> DeltaPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &Rat::one());
        out
    }
}

impl Sub for &DeltaPoly {
    type Output = DeltaPoly;
    fn sub(self, rhs: &DeltaPoly) -> DeltaPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Rat::one());
        out
    }
}

impl Add for DeltaPoly {
    type Output = DeltaPoly;
    fn add(self, rhs: DeltaPoly) -> DeltaPoly {
        &self + &rhs
    }
}

impl Sub for DeltaPoly {
    type Output = DeltaPoly;
    fn sub(self, rhs: DeltaPoly) -> DeltaPoly {
        &self - &rhs
    }
}

impl Neg for &DeltaPoly {
    type Output = DeltaPoly;
    fn neg(self) -> DeltaPoly {
        self.scale(&-Rat::one())
    }
}

impl fmt::Display for DeltaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (pow, c) in &self.coeffs {
            if first {
                first = false;
            } else {
                write!(f, " + ")?;
            }
            match pow {
                0 => write!(f, "{}", rat_string(c))?,
                1 => write!(f, "{}*d", rat_string(c))?,
                _ => write!(f, "{}*d^{}", rat_string(c), pow)?,
            }
        }
        Ok(())
    }
}

impl Serialize for DeltaPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            coeffs: BTreeMap<String, String>,
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(p, c)| (p.to_string(), rat_string(c)))
            .collect();
        Repr { coeffs }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DeltaPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            coeffs: BTreeMap<String, String>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let mut p = DeltaPoly::zero();
        for (pow, c) in repr.coeffs {
            let pow: u32 = pow
                .parse()
                .map_err(|_| D::Error::custom(format!("bad power {pow}")))?;
            let c = parse_rat(&c).map_err(|e| D::Error::custom(e.to_string()))?;
            p.add_term(pow, &c);
        }
        Ok(p)
    }
}

/// Result of a bisection root search on a bracket.
#[derive(Clone, Debug, PartialEq)]
pub enum SignChange {
    Root(Rat),
    NoSignChange,
}

/// Bisection root estimate for `p` on `[lo, hi]`, to within `tol`.
///
/// The caller supplies the bracket; if `p` does not change sign on it the
/// result is `NoSignChange` rather than an error.
pub fn sign_change(p: &DeltaPoly, lo: &Rat, hi: &Rat, tol: &Rat) -> SignChange {
    let mut lo = lo.clone();
    let mut hi = hi.clone();
    let mut f_lo = p.eval(&lo);
    let f_hi = p.eval(&hi);
    if f_lo.is_zero() {
        return SignChange::Root(lo);
    }
    if f_hi.is_zero() {
        return SignChange::Root(hi);
    }
    if f_lo.is_negative() == f_hi.is_negative() {
        return SignChange::NoSignChange;
    }
    let half = rat(1, 2);
    while (&hi - &lo) > *tol {
        let mid = (&lo + &hi) * &half;
        let f_mid = p.eval(&mid);
        if f_mid.is_zero() {
            return SignChange::Root(mid);
        }
        if f_mid.is_negative() == f_lo.is_negative() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    SignChange::Root((&lo + &hi) * half)
}
