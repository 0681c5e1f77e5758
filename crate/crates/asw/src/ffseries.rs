//! Exact arithmetic over F_p, over truncated Laurent series in k((t)), and over
//! truncated two-variable sums in π and T.
//!
//! Precision is always explicit: `None` stands for exact (infinite) precision.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The characteristic of the residue field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeChar {
    p: u32,
}

impl TryFrom<u32> for PrimeChar {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        PrimeChar::new(p)
    }
}

impl From<PrimeChar> for u32 {
    fn from(c: PrimeChar) -> u32 {
        c.p
    }
}

impl PrimeChar {
    pub fn new(p: u32) -> Result<Self> {
        if !(2..=46_337).contains(&p) || (2..p).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::NotPrime(p));
        }
        Ok(PrimeChar { p })
    }

    pub fn p(self) -> u32 {
        self.p
    }

    pub fn pi64(self) -> i64 {
        self.p as i64
    }

    pub fn reduce(self, c: i64) -> u32 {
        c.rem_euclid(self.p as i64) as u32
    }

    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64 % self.p as u64) % self.p as u64) as u32
    }

    pub fn neg(self, a: u32) -> u32 {
        self.sub(0, a)
    }

    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    /// Representative in (-p/2, p/2], used for printing.
    pub fn signed(self, a: u32) -> i64 {
        let a = a as i64;
        let p = self.p as i64;
        if a > p / 2 {
            a - p
        } else {
            a
        }
    }
}

pub(crate) fn pmin(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

pub(crate) fn padd(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x + y),
        _ => None,
    }
}

fn check_char(a: PrimeChar, b: PrimeChar) -> Result<()> {
    if a != b {
        return Err(Error::CharMismatch(a.p, b.p));
    }
    Ok(())
}

/// Operations shared by the coefficient domains of Witt vectors.
pub trait Coeff: Clone + fmt::Debug + PartialEq {
    fn prime(&self) -> PrimeChar;
    fn zero_like(&self) -> Self;
    fn is_exact_zero(&self) -> bool;
    fn try_add(&self, other: &Self) -> Result<Self>;
    fn try_mul(&self, other: &Self) -> Result<Self>;
    fn neg(&self) -> Self;
    fn scale(&self, c: i64) -> Self;
    /// Multiply by π^k.
    fn pi_shift(&self, k: i64) -> Result<Self>;

    fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    fn try_pow(&self, n: u32) -> Result<Self> {
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut e = n;
        if n == 0 {
            return Err(Error::InvalidInput("zeroth power of a coefficient".into()));
        }
        while e > 0 {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.try_mul(&base)?,
                });
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base)?;
            }
        }
        Ok(acc.expect("n > 0"))
    }
}

// ---------------------------------------------------------------------------
// ResidueSeries
// ---------------------------------------------------------------------------

/// A Laurent series over F_p in t, known modulo t^prec (`prec = None`: exact).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson", into = "SeriesJson")]
pub struct ResidueSeries {
    p: PrimeChar,
    coeffs: BTreeMap<i64, u32>,
    prec: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    p: u32,
    #[serde(default = "default_t")]
    var: String,
    #[serde(default)]
    prec: Option<i64>,
    terms: Vec<(i64, i64)>,
}

fn default_t() -> String {
    "t".into()
}

impl TryFrom<SeriesJson> for ResidueSeries {
    type Error = Error;
    fn try_from(j: SeriesJson) -> Result<Self> {
        Ok(ResidueSeries::new(PrimeChar::new(j.p)?, j.terms, j.prec))
    }
}

impl From<ResidueSeries> for SeriesJson {
    fn from(s: ResidueSeries) -> Self {
        SeriesJson {
            p: s.p.p,
            var: "t".into(),
            prec: s.prec,
            terms: s.coeffs.iter().map(|(&e, &c)| (e, c as i64)).collect(),
        }
    }
}

impl ResidueSeries {
    /// Builds a series from `(exponent, coefficient)` pairs; repeated exponents are summed.
    pub fn new(p: PrimeChar, terms: impl IntoIterator<Item = (i64, i64)>, prec: Option<i64>) -> Self {
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            if prec.is_some_and(|q| e >= q) {
                continue;
            }
            let entry = coeffs.entry(e).or_insert(0u32);
            *entry = p.add(*entry, p.reduce(c));
        }
        coeffs.retain(|_, c| *c != 0);
        ResidueSeries { p, coeffs, prec }
    }

    fn from_map(p: PrimeChar, mut coeffs: BTreeMap<i64, u32>, prec: Option<i64>) -> Self {
        coeffs.retain(|e, c| *c != 0 && prec.is_none_or(|q| *e < q));
        ResidueSeries { p, coeffs, prec }
    }

    pub fn zero(p: PrimeChar) -> Self {
        ResidueSeries { p, coeffs: BTreeMap::new(), prec: None }
    }

    /// Zero known only modulo t^prec.
    pub fn zero_mod(p: PrimeChar, prec: i64) -> Self {
        ResidueSeries { p, coeffs: BTreeMap::new(), prec: Some(prec) }
    }

    pub fn monomial(p: PrimeChar, c: i64, e: i64) -> Self {
        ResidueSeries::new(p, [(e, c)], None)
    }

    pub fn constant(p: PrimeChar, c: i64) -> Self {
        ResidueSeries::monomial(p, c, 0)
    }

    pub fn prime(&self) -> PrimeChar {
        self.p
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn coeffs(&self) -> &BTreeMap<i64, u32> {
        &self.coeffs
    }

    pub fn coeff(&self, e: i64) -> u32 {
        self.coeffs.get(&e).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// `None` when exact zero; error when zero only up to a finite precision.
    pub fn valuation(&self) -> Result<Option<i64>> {
        match (self.coeffs.keys().next(), self.prec) {
            (Some(&e), _) => Ok(Some(e)),
            (None, None) => Ok(None),
            (None, Some(q)) => Err(Error::IndeterminateAtPrecision(format!("series is O(t^{q})"))),
        }
    }

    /// Largest known lower bound on the valuation (`None` for exact zero).
    pub fn val_lower(&self) -> Option<i64> {
        match self.coeffs.keys().next() {
            Some(&e) => Some(e),
            None => self.prec,
        }
    }

    pub fn leading(&self) -> Option<(i64, u32)> {
        self.coeffs.iter().next().map(|(&e, &c)| (e, c))
    }

    pub fn degree(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, u32)> + '_ {
        self.coeffs.iter().map(|(&e, &c)| (e, c))
    }

    pub fn truncate(&self, prec: Option<i64>) -> Self {
        let prec = pmin(self.prec, prec);
        ResidueSeries::from_map(self.p, self.coeffs.clone(), prec)
    }

    /// The same terms read as an exact polynomial.
    pub fn to_polynomial(&self) -> Self {
        ResidueSeries { p: self.p, coeffs: self.coeffs.clone(), prec: None }
    }

    /// Keeps only the terms selected by `keep`, preserving precision.
    pub fn filter(&self, keep: impl Fn(i64) -> bool) -> Self {
        let coeffs = self.coeffs.iter().filter(|(e, _)| keep(**e)).map(|(&e, &c)| (e, c)).collect();
        ResidueSeries { p: self.p, coeffs, prec: self.prec }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_char(self.p, other.p)?;
        let prec = pmin(self.prec, other.prec);
        let mut coeffs = self.coeffs.clone();
        for (&e, &c) in &other.coeffs {
            let entry = coeffs.entry(e).or_insert(0);
            *entry = self.p.add(*entry, c);
        }
        Ok(ResidueSeries::from_map(self.p, coeffs, prec))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.negate())
    }

    pub fn negate(&self) -> Self {
        self.scalar(-1)
    }

    pub fn scalar(&self, c: i64) -> Self {
        let c = self.p.reduce(c);
        let coeffs = self.coeffs.iter().map(|(&e, &a)| (e, self.p.mul(a, c))).collect();
        let prec = if c == 0 { None } else { self.prec };
        ResidueSeries::from_map(self.p, coeffs, prec)
    }

    /// Multiply by t^k.
    pub fn shift(&self, k: i64) -> Self {
        ResidueSeries {
            p: self.p,
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e + k, c)).collect(),
            prec: self.prec.map(|q| q + k),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        check_char(self.p, other.p)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(ResidueSeries::zero(self.p));
        }
        let prec = pmin(padd(self.prec, other.val_lower()), padd(other.prec, self.val_lower()));
        let mut coeffs = BTreeMap::new();
        for (&e1, &c1) in &self.coeffs {
            for (&e2, &c2) in &other.coeffs {
                let e = e1 + e2;
                if prec.is_some_and(|q| e >= q) {
                    continue;
                }
                let entry = coeffs.entry(e).or_insert(0);
                *entry = self.p.add(*entry, self.p.mul(c1, c2));
            }
        }
        Ok(ResidueSeries::from_map(self.p, coeffs, prec))
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Ok(ResidueSeries::constant(self.p, 1));
        }
        self.try_pow(n)
    }

    /// The p-th power, computed as the Frobenius t^e -> t^{pe} (coefficients are fixed over F_p).
    pub fn frobenius(&self) -> Self {
        let p = self.p.pi64();
        ResidueSeries {
            p: self.p,
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e * p, c)).collect(),
            prec: self.prec.map(|q| q * p),
        }
    }

    pub fn is_pth_power(&self) -> bool {
        let p = self.p.pi64();
        self.coeffs.keys().all(|e| e % p == 0)
    }

    pub fn pth_root(&self) -> Result<Self> {
        if !self.is_pth_power() {
            return Err(Error::NotPthPower);
        }
        let p = self.p.pi64();
        Ok(ResidueSeries {
            p: self.p,
            coeffs: self.coeffs.iter().map(|(&e, &c)| (e / p, c)).collect(),
            prec: self.prec.map(|q| q.div_euclid(p) + i64::from(q.rem_euclid(p) != 0)),
        })
    }

    /// Multiplicative inverse, computed to relative precision `cap` when `self` is exact.
    pub fn inverse(&self, cap: i64) -> Result<Self> {
        let (v, c) = self
            .leading()
            .ok_or_else(|| Error::IndeterminateAtPrecision("inverse of zero".into()))?;
        let unit = self.shift(-v).scalar(self.p.inv(c).expect("nonzero") as i64);
        let rel = match unit.prec {
            Some(q) => q.min(cap),
            None => cap,
        };
        // 1/(1 - h) = sum h^k with h = 1 - unit.
        let one = ResidueSeries::constant(self.p, 1);
        let h = one.sub(&unit)?.truncate(Some(rel));
        let mut acc = one.truncate(Some(rel));
        let mut power = one.truncate(Some(rel));
        for _ in 0..rel.max(0) {
            power = power.mul(&h)?.truncate(Some(rel));
            if power.is_empty() {
                break;
            }
            acc = acc.add(&power)?;
        }
        let inv_c = self.p.inv(c).expect("nonzero") as i64;
        let acc = ResidueSeries::from_map(self.p, acc.coeffs, Some(rel));
        Ok(acc.scalar(inv_c).shift(-v))
    }
}

impl Coeff for ResidueSeries {
    fn prime(&self) -> PrimeChar {
        self.p
    }
    fn zero_like(&self) -> Self {
        ResidueSeries::zero(self.p)
    }
    fn is_exact_zero(&self) -> bool {
        ResidueSeries::is_exact_zero(self)
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        self.add(other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        self.mul(other)
    }
    fn neg(&self) -> Self {
        self.negate()
    }
    fn scale(&self, c: i64) -> Self {
        self.scalar(c)
    }
    /// π acts as zero on the residue field.
    fn pi_shift(&self, k: i64) -> Result<Self> {
        match k {
            0 => Ok(self.clone()),
            k if k > 0 => Ok(ResidueSeries::zero(self.p)),
            k => Err(Error::ExponentUnderflow(format!("π^{k} in the residue field"))),
        }
    }
}

fn fmt_coeff(p: PrimeChar, c: u32, is_unit_monomial: bool, first: bool) -> (String, bool) {
    let s = p.signed(c);
    let neg = s < 0;
    let mag = s.abs();
    let sign = match (first, neg) {
        (true, true) => "-",
        (true, false) => "",
        (false, true) => " - ",
        (false, false) => " + ",
    };
    if mag == 1 && !is_unit_monomial {
        (sign.to_string(), false)
    } else {
        (format!("{sign}{mag}"), true)
    }
}

fn fmt_pow(var: &str, e: i64) -> String {
    match e {
        0 => String::new(),
        1 => var.to_string(),
        e => format!("{var}^{e}"),
    }
}

impl fmt::Display for ResidueSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (k, (&e, &c)) in self.coeffs.iter().enumerate() {
            let (cs, wrote) = fmt_coeff(self.p, c, e == 0, k == 0);
            let mono = fmt_pow("t", e);
            let sep = if wrote && !mono.is_empty() { "·" } else { "" };
            write!(f, "{cs}{sep}{mono}")?;
        }
        if let Some(q) = self.prec {
            write!(f, " + O(t^{q})")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// BiElement
// ---------------------------------------------------------------------------

/// A finite sum Σ c_{ij} π^i T^j over F_p.
///
/// Coefficients of π^i with i >= `pi_prec` are unknown, as are those of T^j with
/// j >= `t_prec` at every π-level. `t_window = Some(w)` marks a germ element of
/// R[[T]][1/π] whose T-exponents are all >= w.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "BiJson", into = "BiJson")]
pub struct BiElement {
    p: PrimeChar,
    terms: BTreeMap<(i64, i64), u32>,
    pi_prec: Option<i64>,
    t_prec: Option<i64>,
    t_window: Option<i64>,
}

#[derive(Serialize, Deserialize)]
struct BiJson {
    p: u32,
    #[serde(default = "default_pit")]
    var: String,
    #[serde(default)]
    pi_prec: Option<i64>,
    #[serde(default)]
    t_prec: Option<i64>,
    #[serde(default)]
    t_window: Option<i64>,
    terms: Vec<((i64, i64), i64)>,
}

fn default_pit() -> String {
    "pi,T".into()
}

impl TryFrom<BiJson> for BiElement {
    type Error = Error;
    fn try_from(j: BiJson) -> Result<Self> {
        let p = PrimeChar::new(j.p)?;
        BiElement::new(p, j.terms.into_iter().map(|((i, k), c)| (i, k, c)), j.pi_prec, j.t_prec, j.t_window)
    }
}

impl From<BiElement> for BiJson {
    fn from(b: BiElement) -> Self {
        BiJson {
            p: b.p.p,
            var: "pi,T".into(),
            pi_prec: b.pi_prec,
            t_prec: b.t_prec,
            t_window: b.t_window,
            terms: b.terms.iter().map(|(&(i, j), &c)| ((i, j), c as i64)).collect(),
        }
    }
}

impl BiElement {
    /// Builds an element from `(i, j, c)` triples meaning c·π^i·T^j.
    pub fn new(
        p: PrimeChar,
        terms: impl IntoIterator<Item = (i64, i64, i64)>,
        pi_prec: Option<i64>,
        t_prec: Option<i64>,
        t_window: Option<i64>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (i, j, c) in terms {
            if let Some(w) = t_window {
                if j < w {
                    return Err(Error::ContextMismatch(format!(
                        "germ element with T-exponent {j} below window {w}"
                    )));
                }
            }
            let entry = map.entry((i, j)).or_insert(0u32);
            *entry = p.add(*entry, p.reduce(c));
        }
        Ok(BiElement::from_map(p, map, pi_prec, t_prec, t_window))
    }

    /// Element of the boundary ring R[[T]]{T^{-1}}[1/π].
    pub fn boundary(p: PrimeChar, terms: impl IntoIterator<Item = (i64, i64, i64)>, pi_prec: Option<i64>) -> Self {
        BiElement::new(p, terms, pi_prec, None, None).expect("no window")
    }

    /// Element of the germ ring R[[T]][1/π].
    pub fn germ(p: PrimeChar, terms: impl IntoIterator<Item = (i64, i64, i64)>, pi_prec: Option<i64>) -> Result<Self> {
        BiElement::new(p, terms, pi_prec, None, Some(0))
    }

    fn from_map(
        p: PrimeChar,
        mut terms: BTreeMap<(i64, i64), u32>,
        pi_prec: Option<i64>,
        t_prec: Option<i64>,
        t_window: Option<i64>,
    ) -> Self {
        terms.retain(|&(i, j), c| {
            *c != 0 && pi_prec.is_none_or(|q| i < q) && t_prec.is_none_or(|q| j < q)
        });
        BiElement { p, terms, pi_prec, t_prec, t_window }
    }

    pub fn zero(p: PrimeChar, t_window: Option<i64>) -> Self {
        BiElement { p, terms: BTreeMap::new(), pi_prec: None, t_prec: None, t_window }
    }

    pub fn one(p: PrimeChar, t_window: Option<i64>) -> Self {
        BiElement::monomial(p, 1, 0, 0, t_window)
    }

    pub fn monomial(p: PrimeChar, c: i64, i: i64, j: i64, t_window: Option<i64>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((i, j), p.reduce(c));
        BiElement::from_map(p, terms, None, None, t_window)
    }

    /// Lift of a residue series placed at π-level `level`.
    pub fn from_residue(s: &ResidueSeries, level: i64, t_window: Option<i64>) -> Result<Self> {
        if let (Some(w), Some(v)) = (t_window, s.coeffs.keys().next()) {
            if *v < w {
                return Err(Error::ContextMismatch(format!("series with t-exponent {v} in a germ")));
            }
        }
        let terms = s.coeffs.iter().map(|(&j, &c)| ((level, j), c)).collect();
        Ok(BiElement::from_map(s.p, terms, None, s.prec, t_window))
    }

    pub fn prime(&self) -> PrimeChar {
        self.p
    }

    pub fn pi_prec(&self) -> Option<i64> {
        self.pi_prec
    }

    pub fn t_prec(&self) -> Option<i64> {
        self.t_prec
    }

    pub fn t_window(&self) -> Option<i64> {
        self.t_window
    }

    pub fn is_germ(&self) -> bool {
        self.t_window.is_some()
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), u32)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coeff(&self, i: i64, j: i64) -> u32 {
        self.terms.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.pi_prec.is_none()
    }

    pub fn with_precision(&self, pi_prec: Option<i64>, t_prec: Option<i64>) -> Self {
        BiElement::from_map(
            self.p,
            self.terms.clone(),
            pmin(self.pi_prec, pi_prec),
            pmin(self.t_prec, t_prec),
            self.t_window,
        )
    }

    /// Reinterprets a germ element as a boundary element.
    pub fn to_boundary(&self) -> Self {
        BiElement { t_window: None, ..self.clone() }
    }

    /// Minimal π-exponent; `None` for zero. Levels known to vanish modulo T^t_prec count as zero.
    pub fn gauss_valuation(&self) -> Result<Option<i64>> {
        match (self.terms.keys().next(), self.pi_prec) {
            (Some(&(i, _)), _) => Ok(Some(i)),
            (None, None) => Ok(None),
            (None, Some(q)) => Err(Error::IndeterminateAtPrecision(format!("element is O(π^{q})"))),
        }
    }

    fn pi_lower(&self) -> Option<i64> {
        match self.terms.keys().next() {
            Some(&(i, _)) => Some(self.pi_prec.map_or(i, |q| q.min(i))),
            None => self.pi_prec,
        }
    }

    fn t_lower(&self) -> Option<i64> {
        let known = self.terms.keys().map(|&(_, j)| j).min();
        let base = match known {
            Some(j) => Some(self.t_prec.map_or(j, |q| q.min(j))),
            None => self.t_prec,
        };
        match (base, self.t_window) {
            (Some(b), Some(w)) => Some(b.max(w)),
            (b, _) => b,
        }
    }

    pub fn min_t_exponent(&self) -> Option<i64> {
        self.terms.keys().map(|&(_, j)| j).min()
    }

    fn check_compat(&self, other: &Self) -> Result<()> {
        check_char(self.p, other.p)?;
        if self.t_window != other.t_window {
            return Err(Error::ContextMismatch(format!(
                "germ and boundary elements (windows {:?} and {:?})",
                self.t_window, other.t_window
            )));
        }
        Ok(())
    }

    /// The residue series of the π^i slice.
    pub fn level(&self, i: i64) -> Result<ResidueSeries> {
        if self.pi_prec.is_some_and(|q| i >= q) {
            return Err(Error::IndeterminateAtPrecision(format!("π-level {i} beyond precision")));
        }
        let coeffs = self.terms.range((i, i64::MIN)..=(i, i64::MAX)).map(|(&(_, j), &c)| (j, c)).collect();
        Ok(ResidueSeries::from_map(self.p, coeffs, self.t_prec))
    }

    pub fn reduce_mod_pi(&self) -> Result<ResidueSeries> {
        match self.gauss_valuation() {
            Ok(Some(v)) if v < 0 => Err(Error::NegativeValuation(v)),
            Err(e) if self.pi_prec.is_none_or(|q| q <= 0) => Err(e),
            _ => self.level(0),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compat(other)?;
        let mut terms = self.terms.clone();
        for (&k, &c) in &other.terms {
            let entry = terms.entry(k).or_insert(0);
            *entry = self.p.add(*entry, c);
        }
        Ok(BiElement::from_map(
            self.p,
            terms,
            pmin(self.pi_prec, other.pi_prec),
            pmin(self.t_prec, other.t_prec),
            self.t_window,
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.negate())
    }

    pub fn negate(&self) -> Self {
        self.scalar(-1)
    }

    pub fn scalar(&self, c: i64) -> Self {
        let c = self.p.reduce(c);
        if c == 0 {
            return BiElement::zero(self.p, self.t_window);
        }
        let terms = self.terms.iter().map(|(&k, &a)| (k, self.p.mul(a, c))).collect();
        BiElement::from_map(self.p, terms, self.pi_prec, self.t_prec, self.t_window)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compat(other)?;
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(BiElement::zero(self.p, self.t_window));
        }
        let pi_prec = pmin(padd(self.pi_prec, other.pi_lower()), padd(other.pi_prec, self.pi_lower()));
        let t_prec = pmin(padd(self.t_prec, other.t_lower()), padd(other.t_prec, self.t_lower()));
        let mut terms = BTreeMap::new();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &other.terms {
                let (i, j) = (i1 + i2, j1 + j2);
                if pi_prec.is_some_and(|q| i >= q) || t_prec.is_some_and(|q| j >= q) {
                    continue;
                }
                let entry = terms.entry((i, j)).or_insert(0);
                *entry = self.p.add(*entry, self.p.mul(c1, c2));
            }
        }
        Ok(BiElement::from_map(self.p, terms, pi_prec, t_prec, self.t_window))
    }

    pub fn pow(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Ok(BiElement::one(self.p, self.t_window));
        }
        self.try_pow(n)
    }

    /// The p-th power: π^i T^j -> π^{pi} T^{pj}.
    pub fn frobenius(&self) -> Self {
        let p = self.p.pi64();
        BiElement {
            p: self.p,
            terms: self.terms.iter().map(|(&(i, j), &c)| ((i * p, j * p), c)).collect(),
            pi_prec: self.pi_prec.map(|q| q * p),
            t_prec: self.t_prec.map(|q| q * p),
            t_window: self.t_window,
        }
    }

    pub fn shift(&self, di: i64, dj: i64) -> Result<Self> {
        let terms: BTreeMap<_, _> = self.terms.iter().map(|(&(i, j), &c)| ((i + di, j + dj), c)).collect();
        if let Some(w) = self.t_window {
            if terms.keys().any(|&(_, j)| j < w) {
                return Err(Error::ContextMismatch("negative T-exponent in a germ".into()));
            }
        }
        Ok(BiElement {
            p: self.p,
            terms,
            pi_prec: self.pi_prec.map(|q| q + di),
            t_prec: self.t_prec.map(|q| q + dj),
            t_window: self.t_window,
        })
    }

    /// Keeps the terms selected by `keep`, preserving precision.
    pub fn filter(&self, keep: impl Fn(i64, i64) -> bool) -> Self {
        let terms = self.terms.iter().filter(|(&(i, j), _)| keep(i, j)).map(|(&k, &c)| (k, c)).collect();
        BiElement { terms, ..self.clone() }
    }
}

impl Coeff for BiElement {
    fn prime(&self) -> PrimeChar {
        self.p
    }
    fn zero_like(&self) -> Self {
        BiElement::zero(self.p, self.t_window)
    }
    fn is_exact_zero(&self) -> bool {
        BiElement::is_exact_zero(self)
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        self.add(other)
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        self.mul(other)
    }
    fn neg(&self) -> Self {
        self.negate()
    }
    fn scale(&self, c: i64) -> Self {
        self.scalar(c)
    }
    fn pi_shift(&self, k: i64) -> Result<Self> {
        self.shift(k, 0)
    }
}

impl fmt::Display for BiElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (k, (&(i, j), &c)) in self.terms.iter().enumerate() {
            let (cs, wrote) = fmt_coeff(self.p, c, i == 0 && j == 0, k == 0);
            let mono: Vec<String> = [fmt_pow("π", i), fmt_pow("T", j)].into_iter().filter(|s| !s.is_empty()).collect();
            let mono = mono.join("·");
            let sep = if wrote && !mono.is_empty() { "·" } else { "" };
            write!(f, "{cs}{sep}{mono}")?;
        }
        match (self.pi_prec, self.t_prec) {
            (Some(q), Some(r)) => write!(f, " + O(π^{q}, T^{r})"),
            (Some(q), None) => write!(f, " + O(π^{q})"),
            (None, Some(r)) => write!(f, " + O(T^{r})"),
            (None, None) => Ok(()),
        }
    }
}

macro_rules! forward_ops {
    ($ty:ty) => {
        impl std::ops::Add for &$ty {
            type Output = $ty;
            fn add(self, rhs: Self) -> $ty {
                <$ty>::add(self, rhs).expect("incompatible operands")
            }
        }
        impl std::ops::Sub for &$ty {
            type Output = $ty;
            fn sub(self, rhs: Self) -> $ty {
                <$ty>::sub(self, rhs).expect("incompatible operands")
            }
        }
        impl std::ops::Mul for &$ty {
            type Output = $ty;
            fn mul(self, rhs: Self) -> $ty {
                <$ty>::mul(self, rhs).expect("incompatible operands")
            }
        }
        impl std::ops::Neg for &$ty {
            type Output = $ty;
            fn neg(self) -> $ty {
                self.negate()
            }
        }
    };
}

forward_ops!(ResidueSeries);
forward_ops!(BiElement);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u32) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    #[test]
    fn rejects_composites() {
        assert!(PrimeChar::new(4).is_err());
        assert!(PrimeChar::new(1).is_err());
        assert!(PrimeChar::new(7).is_ok());
    }

    #[test]
    fn additive_cancellation() {
        let p = f(5);
        let a = ResidueSeries::new(p, [(-1, 1), (1, 1)], None);
        let b = ResidueSeries::monomial(p, -1, 1);
        assert_eq!(&a + &b, ResidueSeries::monomial(p, 1, -1));
    }

    #[test]
    fn difference_of_squares() {
        let p = f(3);
        let a = ResidueSeries::new(p, [(0, 1), (1, 1)], Some(5));
        let b = ResidueSeries::new(p, [(0, 1), (1, -1)], Some(5));
        let prod = &a * &b;
        assert_eq!(prod, ResidueSeries::new(p, [(0, 1), (2, -1)], Some(5)));
    }

    #[test]
    fn bivariate_monomial_product() {
        let p = f(2);
        let a = BiElement::boundary(p, [(1, -1, 1)], Some(3));
        let prod = &a * &a;
        assert_eq!(prod.terms().collect::<Vec<_>>(), vec![((2, -2), 1)]);
    }

    #[test]
    fn valuations() {
        let p = f(3);
        let a = BiElement::boundary(p, [(-6, 2, 1), (-1, 0, 1)], None);
        assert_eq!(a.gauss_valuation().unwrap(), Some(-6));
        let g = ResidueSeries::new(p, [(-5, 1), (3, 1)], None);
        assert_eq!(g.valuation().unwrap(), Some(-5));
        let z = BiElement::boundary(p, [], Some(4));
        assert!(matches!(z.gauss_valuation(), Err(Error::IndeterminateAtPrecision(_))));
    }

    #[test]
    fn reductions() {
        let p = f(3);
        let a = BiElement::boundary(p, [(0, -3, 1), (1, -5, 1)], None);
        assert_eq!(a.reduce_mod_pi().unwrap(), ResidueSeries::monomial(p, 1, -3));
        let b = BiElement::boundary(p, [(2, 1, 1)], None);
        assert!(b.reduce_mod_pi().unwrap().is_exact_zero());
        let c = BiElement::boundary(p, [(0, 0, 1), (0, 1, 1), (1, 2, 1)], None);
        assert_eq!(c.reduce_mod_pi().unwrap(), ResidueSeries::new(p, [(0, 1), (1, 1)], None));
        let d = BiElement::boundary(p, [(-1, 0, 1)], None);
        assert_eq!(d.reduce_mod_pi(), Err(Error::NegativeValuation(-1)));
    }

    #[test]
    fn pth_powers() {
        let p = f(3);
        let g = ResidueSeries::new(p, [(-6, 1), (3, 2)], None);
        assert!(g.is_pth_power());
        assert_eq!(g.pth_root().unwrap(), ResidueSeries::new(p, [(-2, 1), (1, 2)], None));
        let h = ResidueSeries::new(f(2), [(-2, 1), (-1, 1)], None);
        assert!(!h.is_pth_power());
        let c = ResidueSeries::constant(f(5), 3);
        assert_eq!(c.pth_root().unwrap(), c);
        assert_eq!(f(5).pow(3, 5), 3);
    }

    #[test]
    fn germ_boundary_mixing_is_rejected() {
        let p = f(2);
        let a = BiElement::germ(p, [(0, 1, 1)], None).unwrap();
        let b = BiElement::boundary(p, [(0, 1, 1)], None);
        assert!(matches!(a.add(&b), Err(Error::ContextMismatch(_))));
    }

    #[test]
    fn inverse_of_unit() {
        let p = f(3);
        let a = ResidueSeries::new(p, [(-1, 1), (0, 1)], None);
        let inv = a.inverse(6).unwrap();
        let prod = a.mul(&inv).unwrap();
        assert_eq!(prod.coeffs().len(), 1);
        assert_eq!(prod.coeff(0), 1);
    }

    #[test]
    fn json_round_trip() {
        let p = f(3);
        let g = ResidueSeries::new(p, [(-5, 2), (1, 1)], Some(8));
        let s = serde_json::to_string(&g).unwrap();
        assert_eq!(s, r#"{"p":3,"var":"t","prec":8,"terms":[[-5,2],[1,1]]}"#);
        assert_eq!(serde_json::from_str::<ResidueSeries>(&s).unwrap(), g);
        let b = BiElement::boundary(p, [(-2, 3, 1)], Some(8));
        let s = serde_json::to_string(&b).unwrap();
        assert_eq!(serde_json::from_str::<BiElement>(&s).unwrap(), b);
    }

    fn series(p: PrimeChar) -> impl Strategy<Value = ResidueSeries> {
        (proptest::collection::vec((-4i64..6, 0i64..5), 0..6), proptest::option::of(6i64..12))
            .prop_map(move |(t, prec)| ResidueSeries::new(p, t, prec))
    }

    fn bi(p: PrimeChar) -> impl Strategy<Value = BiElement> {
        (proptest::collection::vec((-3i64..3, -3i64..4, 0i64..5), 0..6), proptest::option::of(3i64..6))
            .prop_map(move |(t, prec)| BiElement::boundary(p, t, prec))
    }

    fn ps() -> impl Strategy<Value = PrimeChar> {
        prop_oneof![Just(f(2)), Just(f(3)), Just(f(5))]
    }

    fn same_window(a: &ResidueSeries, b: &ResidueSeries) -> bool {
        a.truncate(b.prec()) == b.truncate(a.prec())
    }

    proptest! {
        #[test]
        fn series_ring_axioms((a, b, c) in ps().prop_flat_map(|p| (series(p), series(p), series(p)))) {
            prop_assert!(same_window(&(&a * &b), &(&b * &a)));
            prop_assert!(same_window(&(&(&a * &b) * &c), &(&a * &(&b * &c))));
            prop_assert!(same_window(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c))));
            prop_assert!(same_window(&(&a + &b), &(&b + &a)));
        }

        #[test]
        fn frobenius_round_trip(a in ps().prop_flat_map(series)) {
            let ap = a.pow(a.prime().p()).unwrap();
            prop_assert!(same_window(&ap, &a.frobenius()));
            prop_assert!(a.frobenius().is_pth_power());
            prop_assert_eq!(a.frobenius().pth_root().unwrap(), a);
        }

        #[test]
        fn reduction_is_multiplicative((a, b) in ps().prop_flat_map(|p| (bi(p), bi(p)))) {
            let ab = &a * &b;
            if let (Ok(x), Ok(y), Ok(z)) = (a.reduce_mod_pi(), b.reduce_mod_pi(), ab.reduce_mod_pi()) {
                prop_assert!(same_window(&z, &(&x * &y)));
            }
        }

        #[test]
        fn gauss_valuation_is_additive((a, b) in ps().prop_flat_map(|p| (bi(p), bi(p)))) {
            if let (Ok(Some(x)), Ok(Some(y))) = (a.gauss_valuation(), b.gauss_valuation()) {
                let a0 = BiElement::boundary(a.prime(), a.terms().map(|((i, j), c)| (i, j, c as i64)), None);
                let b0 = BiElement::boundary(b.prime(), b.terms().map(|((i, j), c)| (i, j, c as i64)), None);
                let exact = a0.mul(&b0).unwrap();
                prop_assert_eq!(exact.gauss_valuation().unwrap(), Some(x + y));
            }
        }
    }
}
