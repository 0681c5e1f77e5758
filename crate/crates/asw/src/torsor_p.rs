//! Degree-p Artin-Schreier equations: integral models, degeneration types,
//! conductors at points of P¹ and equivalence of α_p-torsors.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffseries::{BiElement, PrimeChar, ResidueSeries};
use crate::witt::{isogeny_phi_n, torsor_equations, EquationRecord, GroupSchemeTag};

/// Degeneration type (n, m); the conductor is −m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegTypeP {
    pub n: i64,
    pub m: i64,
    pub split: bool,
}

impl DegTypeP {
    pub fn new(n: i64, m: i64) -> Self {
        DegTypeP { n, m, split: false }
    }

    pub fn split() -> Self {
        DegTypeP { n: 0, m: 0, split: true }
    }

    pub fn conductor(&self) -> i64 {
        -self.m
    }

    pub fn different(&self, p: PrimeChar) -> i64 {
        self.n * (p.pi64() - 1)
    }

    pub fn is_etale(&self) -> bool {
        self.n == 0
    }
}

impl fmt::Display for DegTypeP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.split {
            write!(f, "split")
        } else {
            write!(f, "({}, {})", self.n, self.m)
        }
    }
}

/// Where the equation lives: over a formal boundary k((t)) or over a germ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingKind {
    Boundary,
    Germ,
}

/// Integral model X^p − π^{n(p−1)}X = a of a degree-p torsor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedPCover {
    pub deg_type: DegTypeP,
    pub integral_rhs: BiElement,
    pub special_fibre_rhs: ResidueSeries,
    pub group: GroupSchemeTag,
    /// Elements b with a_K replaced by a_K − (b^p − b), in order of use.
    pub gauge: Vec<BiElement>,
    /// The modified generic right-hand side, equal to π^{−np}·integral_rhs.
    pub generic_rhs: BiElement,
}

impl NormalizedPCover {
    pub fn delta(&self) -> i64 {
        self.deg_type.different(self.integral_rhs.prime())
    }

    pub fn equations(&self) -> Result<EquationRecord> {
        torsor_equations(GroupSchemeTag::Mn { n: self.deg_type.n }, std::slice::from_ref(&self.integral_rhs))
    }

    /// The reduction of the integral equation: X^p − X = ā or x^p = ā.
    pub fn special_fibre_equation(&self) -> String {
        let p = self.integral_rhs.prime().p();
        if self.deg_type.n == 0 {
            format!("x^{p} − x = {}", self.special_fibre_rhs)
        } else {
            format!("x^{p} = {}", self.special_fibre_rhs)
        }
    }
}

/// Default number of strip passes allowed before giving up.
pub fn default_budget(a: &BiElement) -> usize {
    match a.pi_prec() {
        Some(q) => 4 * (q.unsigned_abs() as usize).max(1) + 16,
        None => 4096,
    }
}

pub fn normalize_boundary_p(a_k: &BiElement) -> Result<NormalizedPCover> {
    if a_k.is_germ() {
        return Err(Error::ContextMismatch("germ element passed to the boundary normalizer".into()));
    }
    normalize_p(a_k, RingKind::Boundary, default_budget(a_k))
}

pub fn normalize_germ_p(a_k: &BiElement) -> Result<NormalizedPCover> {
    normalize_p(a_k, RingKind::Germ, default_budget(a_k))
}

/// The integral equation X^p − π^{n(p−1)}X = a, renormalized.
pub fn normalize_integral(n: i64, a: &BiElement, ring: RingKind) -> Result<NormalizedPCover> {
    let a_k = a.shift(-n * a.prime().pi64(), 0)?;
    normalize_p(&a_k, ring, default_budget(&a_k))
}

fn wp(a: &BiElement, b: &BiElement) -> Result<BiElement> {
    a.sub(&isogeny_phi_n(b, 0)?)
}

/// Runs the strip loop with an explicit pass budget.
pub fn normalize_p(a_k: &BiElement, ring: RingKind, budget: usize) -> Result<NormalizedPCover> {
    let p = a_k.prime();
    let pp = p.pi64();
    let window = a_k.t_window();
    let mut a = a_k.clone();
    let mut gauge = Vec::new();
    for _ in 0..budget {
        let v = match a.gauss_valuation()? {
            None => return Ok(split_cover(a, gauge)),
            Some(v) if v > 0 => return Ok(split_cover(a, gauge)),
            Some(v) => v,
        };
        if v == 0 {
            return etale_strip(a, ring, gauge);
        }
        let nu = -v;
        if nu % pp != 0 {
            return Err(Error::TotallyRamified { valuation: v, p: p.p() });
        }
        let n = nu / pp;
        let lead = a.level(v)?;
        let powers: Vec<(i64, u32)> = lead.terms().filter(|(e, _)| e % pp == 0).collect();
        if powers.is_empty() {
            let m = lead.leading().expect("nonempty level").0;
            let integral = a.shift(n * pp, 0)?;
            let special = integral.reduce_mod_pi()?;
            return Ok(NormalizedPCover {
                deg_type: DegTypeP::new(n, m),
                integral_rhs: integral,
                special_fibre_rhs: special,
                group: GroupSchemeTag::Mn { n },
                gauge,
                generic_rhs: a,
            });
        }
        let terms = powers.iter().map(|&(e, c)| (-n, e / pp, c as i64));
        let b = BiElement::new(p, terms, None, None, window)?;
        a = wp(&a, &b)?;
        gauge.push(b);
    }
    Err(Error::NonTerminatingBudget(budget))
}

fn split_cover(a: BiElement, gauge: Vec<BiElement>) -> NormalizedPCover {
    let p = a.prime();
    let special = a.reduce_mod_pi().unwrap_or_else(|_| ResidueSeries::zero(p));
    NormalizedPCover {
        deg_type: DegTypeP::split(),
        integral_rhs: a.clone(),
        special_fibre_rhs: special,
        group: GroupSchemeTag::EtaleZpZ,
        gauge,
        generic_rhs: a,
    }
}

/// Level-0 Artin-Schreier reduction. Over the boundary, constants and terms of
/// positive t-order lie in the image of ℘ and are removed; over a germ only the
/// constants are.
fn etale_strip(mut a: BiElement, ring: RingKind, mut gauge: Vec<BiElement>) -> Result<NormalizedPCover> {
    let p = a.prime();
    let pp = p.pi64();
    let window = a.t_window();
    let removable = |e: i64| match ring {
        RingKind::Boundary => e >= 0,
        RingKind::Germ => e == 0,
    };
    let drop: Vec<(i64, u32)> = a.level(0)?.terms().filter(|(e, _)| removable(*e)).collect();
    if !drop.is_empty() {
        let d = BiElement::new(p, drop.iter().map(|&(e, c)| (0, e, c as i64)), None, None, window)?;
        a = a.sub(&d)?;
    }
    loop {
        let lead = a.level(0)?;
        let next = lead.terms().find(|(e, _)| e % pp == 0 && !removable(*e));
        match next {
            None => break,
            Some((e, c)) => {
                let b = BiElement::monomial(p, c as i64, 0, e / pp, window);
                a = wp(&a, &b)?;
                gauge.push(b);
                let back: Vec<(i64, u32)> = a.level(0)?.terms().filter(|(e, _)| removable(*e)).collect();
                if !back.is_empty() {
                    let d = BiElement::new(p, back.iter().map(|&(e, c)| (0, e, c as i64)), None, None, window)?;
                    a = a.sub(&d)?;
                }
            }
        }
    }
    let special = a.level(0)?;
    match special.leading() {
        None => Ok(split_cover(a, gauge)),
        Some((m, _)) => Ok(NormalizedPCover {
            deg_type: DegTypeP::new(0, m),
            integral_rhs: a.clone(),
            special_fibre_rhs: special,
            group: GroupSchemeTag::EtaleZpZ,
            gauge,
            generic_rhs: a,
        }),
    }
}

/// A solution b of b^p − b = a for a of positive valuation, truncated at π^pi_prec.
pub fn split_witness(a: &BiElement, pi_prec: i64) -> Result<BiElement> {
    match a.gauss_valuation()? {
        Some(v) if v <= 0 => return Err(Error::HypothesisViolated(format!("valuation {v} is not positive"))),
        _ => {}
    }
    let a = a.with_precision(Some(pi_prec), None);
    let mut acc = BiElement::zero(a.prime(), a.t_window());
    let mut term = a.clone();
    while !term.is_empty() {
        acc = acc.sub(&term)?;
        term = term.frobenius().with_precision(Some(pi_prec), None);
    }
    Ok(acc.with_precision(Some(pi_prec), None))
}

/// Reduced equation attached to a point of P¹_k.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Finite(u32),
    Infinity,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(a) => write!(f, "{a}"),
            Point::Infinity => write!(f, "∞"),
        }
    }
}

/// Kind of degree-p torsor over the special fibre.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsorKind {
    Etale,
    AlphaP,
}

/// A rational function on P¹_{F_p}: a Laurent polynomial in x plus principal
/// parts c·(x − a)^{−j} at finite points a ≠ 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalFn {
    pub p: PrimeChar,
    /// Exponent to coefficient for the Laurent polynomial part.
    #[serde(with = "exponent_pairs")]
    pub poly: BTreeMap<i64, i64>,
    /// Triples (a, j, c) meaning c·(x − a)^{−j}, j ≥ 1.
    #[serde(default)]
    pub parts: Vec<(u32, i64, i64)>,
}

/// Serializes an exponent map as a list of [exponent, coefficient] pairs.
mod exponent_pairs {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(map: &BTreeMap<i64, i64>, s: S) -> Result<S::Ok, S::Error> {
        map.iter().map(|(&e, &c)| (e, c)).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<i64, i64>, D::Error> {
        let pairs = Vec::<(i64, i64)>::deserialize(d)?;
        let mut map = BTreeMap::new();
        for (e, c) in pairs {
            *map.entry(e).or_insert(0) += c;
        }
        Ok(map)
    }
}

impl RationalFn {
    pub fn laurent(p: PrimeChar, terms: impl IntoIterator<Item = (i64, i64)>) -> Self {
        let mut poly = BTreeMap::new();
        for (e, c) in terms {
            *poly.entry(e).or_insert(0) += c;
        }
        RationalFn { p, poly, parts: Vec::new() }
    }

    pub fn with_part(mut self, a: u32, j: i64, c: i64) -> Self {
        self.parts.push((a, j, c));
        self
    }

    /// Local expansion in the parameter u = x − b (or u = 1/x at ∞), modulo u^cap.
    pub fn expand_at(&self, point: Point, cap: i64) -> Result<ResidueSeries> {
        let p = self.p;
        let mut acc = ResidueSeries::zero(p);
        for (&k, &c) in &self.poly {
            let term = match point {
                Point::Infinity => ResidueSeries::monomial(p, 1, -k),
                Point::Finite(b) => shifted_power(p, b, 0, k, cap)?,
            };
            acc = acc.add(&term.scalar(c))?;
        }
        for &(a, j, c) in &self.parts {
            if j < 1 {
                return Err(Error::InvalidInput(format!("principal part exponent {j}")));
            }
            let term = match point {
                Point::Infinity => {
                    // (x − a)^{−j} = u^j (1 − a u)^{−j}
                    let base = ResidueSeries::new(p, [(0, 1), (1, -(a as i64))], None);
                    base.inverse(cap)?.pow(j as u32)?.shift(j)
                }
                Point::Finite(b) => shifted_power(p, b, a, -j, cap)?,
            };
            acc = acc.add(&term.scalar(c))?;
        }
        Ok(acc.truncate(Some(cap)))
    }

    /// Finite points carrying a pole, plus ∞ when the polynomial part has positive degree.
    pub fn poles(&self) -> Vec<Point> {
        let mut out = Vec::new();
        if self.poly.iter().any(|(&e, &c)| e < 0 && self.p.reduce(c) != 0) {
            out.push(Point::Finite(0));
        }
        for &(a, _, c) in &self.parts {
            let pt = Point::Finite(a % self.p.p());
            if self.p.reduce(c) != 0 && !out.contains(&pt) {
                out.push(pt);
            }
        }
        if self.poly.iter().any(|(&e, &c)| e > 0 && self.p.reduce(c) != 0) {
            out.push(Point::Infinity);
        }
        out.sort();
        out
    }
}

/// (u + (b − a))^k as a series in u.
fn shifted_power(p: PrimeChar, b: u32, a: u32, k: i64, cap: i64) -> Result<ResidueSeries> {
    let d = p.sub(b % p.p(), a % p.p());
    if d == 0 {
        return Ok(ResidueSeries::monomial(p, 1, k));
    }
    let base = ResidueSeries::new(p, [(0, d as i64), (1, 1)], None);
    if k >= 0 {
        base.pow(k as u32)
    } else {
        base.inverse(cap)?.pow((-k) as u32).map(|s| s.truncate(Some(cap)))
    }
}

/// Local expansion reduced modulo ℘ (étale) or modulo p-th powers (α_p).
pub fn strip_local(s: &ResidueSeries, kind: TorsorKind) -> Result<ResidueSeries> {
    let p = s.prime();
    let pp = p.pi64();
    match kind {
        TorsorKind::AlphaP => Ok(s.filter(|e| e % pp != 0)),
        TorsorKind::Etale => {
            let mut cur = s.filter(|e| e < 0);
            loop {
                let hit = cur.terms().find(|(e, _)| e % pp == 0);
                match hit {
                    None => return Ok(cur),
                    Some((e, c)) => {
                        let b = ResidueSeries::monomial(p, c as i64, e / pp);
                        cur = cur.sub(&b.frobenius())?.add(&b)?.filter(|e| e < 0);
                    }
                }
            }
        }
    }
}

/// Prime-to-p pole order of the reduced function at `point` (0 for an unramified étale point).
pub fn conductor_at_point(f: &RationalFn, point: Point, kind: TorsorKind) -> Result<i64> {
    let cap = 4 * f.p.pi64() + 8 + f.parts.iter().map(|&(_, j, _)| j).max().unwrap_or(0);
    let local = f.expand_at(point, cap)?;
    let stripped = strip_local(&local, kind)?;
    match (stripped.leading(), kind) {
        (Some((e, _)), TorsorKind::Etale) if e < 0 => Ok(-e),
        (_, TorsorKind::Etale) => Ok(0),
        (Some((e, _)), TorsorKind::AlphaP) => Ok(-e),
        (None, TorsorKind::AlphaP) => Err(Error::IndeterminateAtPrecision(format!(
            "no prime-to-p term at {point} below t^{cap}"
        ))),
    }
}

/// Polynomial in x and y over F_p.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct XyPoly {
    pub p: PrimeChar,
    /// (x-exponent, y-exponent) to coefficient.
    pub terms: BTreeMap<(u32, u32), u32>,
}

impl XyPoly {
    pub fn new(p: PrimeChar, terms: impl IntoIterator<Item = (u32, u32, i64)>) -> Self {
        let mut map = BTreeMap::new();
        for (i, j, c) in terms {
            let e = map.entry((i, j)).or_insert(0u32);
            *e = p.add(*e, p.reduce(c));
        }
        map.retain(|_, c| *c != 0);
        XyPoly { p, terms: map }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut t: Vec<(u32, u32, i64)> = self.terms.iter().map(|(&(i, j), &c)| (i, j, c as i64)).collect();
        t.extend(other.terms.iter().map(|(&(i, j), &c)| (i, j, -(c as i64))));
        XyPoly::new(self.p, t)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut t = Vec::new();
        for (&(i1, j1), &c1) in &self.terms {
            for (&(i2, j2), &c2) in &other.terms {
                t.push((i1 + i2, j1 + j2, self.p.mul(c1, c2) as i64));
            }
        }
        XyPoly::new(self.p, t)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = XyPoly::new(self.p, [(0, 0, 1)]);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

fn poly_mul(p: PrimeChar, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = p.add(out[i + j], p.mul(x, y));
        }
    }
    out
}

/// Reduce y^p to v(x); returns the components h_0..h_{p−1} as dense polynomials in x.
fn reduce_y(h: &XyPoly, v: &[u32]) -> Vec<Vec<u32>> {
    let p = h.p;
    let pp = p.p();
    let mut comps: Vec<Vec<u32>> = vec![Vec::new(); pp as usize];
    for (&(i, j), &c) in &h.terms {
        let (q, r) = (j / pp, j % pp);
        let mut poly = vec![0u32; i as usize + 1];
        poly[i as usize] = c;
        for _ in 0..q {
            poly = poly_mul(p, &poly, v);
        }
        let slot = &mut comps[r as usize];
        if slot.len() < poly.len() {
            slot.resize(poly.len(), 0);
        }
        for (k, &x) in poly.iter().enumerate() {
            slot[k] = p.add(slot[k], x);
        }
    }
    for c in comps.iter_mut() {
        while c.last() == Some(&0) {
            c.pop();
        }
    }
    comps
}

/// Solves A·w = b over F_p; returns whether a solution exists.
pub(crate) fn solvable(p: PrimeChar, mut rows: Vec<Vec<u32>>, mut rhs: Vec<u32>) -> bool {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivot_row = 0;
    for col in 0..ncols {
        let Some(r) = (pivot_row..rows.len()).find(|&r| rows[r][col] != 0) else { continue };
        rows.swap(pivot_row, r);
        rhs.swap(pivot_row, r);
        let inv = p.inv(rows[pivot_row][col]).expect("nonzero pivot");
        for x in rows[pivot_row].iter_mut() {
            *x = p.mul(*x, inv);
        }
        rhs[pivot_row] = p.mul(rhs[pivot_row], inv);
        for r2 in 0..rows.len() {
            if r2 != pivot_row && rows[r2][col] != 0 {
                let factor = rows[r2][col];
                let pivot = rows[pivot_row].clone();
                for (x, y) in rows[r2].iter_mut().zip(&pivot) {
                    *x = p.sub(*x, p.mul(factor, *y));
                }
                let sub = p.mul(factor, rhs[pivot_row]);
                rhs[r2] = p.sub(rhs[r2], sub);
            }
        }
        pivot_row += 1;
    }
    (pivot_row..rows.len()).all(|r| rhs[r] == 0)
}

/// Whether f − g is a p-th power in k[x][y]/(y^p − v).
pub fn alpha_p_equivalent(f: &XyPoly, g: &XyPoly, v: &ResidueSeries) -> Result<bool> {
    let p = f.p;
    let pp = p.p() as usize;
    if v.coeffs().keys().any(|&e| e < 0) || v.prec().is_some() {
        return Err(Error::InvalidInput("v must be an exact polynomial in x".into()));
    }
    if v.is_pth_power() {
        return Err(Error::InvalidInput("v is a p-th power".into()));
    }
    let dv = v.degree().unwrap_or(0) as usize;
    let mut vd = vec![0u32; dv + 1];
    for (e, c) in v.terms() {
        vd[e as usize] = c;
    }
    let comps = reduce_y(&f.sub(g), &vd);
    if comps[1..].iter().any(|c| !c.is_empty()) {
        return Ok(false);
    }
    let h0 = &comps[0];
    if h0.is_empty() {
        return Ok(true);
    }
    // h0 = Σ_r w_r(x)^p v^r with w_r(x)^p = w_r(x^p) over F_p.
    let bound = (h0.len() + pp * dv) / pp + dv + 2;
    let mut vpow: Vec<Vec<u32>> = vec![vec![1]];
    for _ in 1..pp {
        let next = poly_mul(p, vpow.last().expect("nonempty"), &vd);
        vpow.push(next);
    }
    let mut columns: Vec<Vec<u32>> = Vec::new();
    for vr in &vpow {
        for i in 0..bound {
            let mut col = vec![0u32; i * pp + vr.len()];
            for (k, &c) in vr.iter().enumerate() {
                col[i * pp + k] = c;
            }
            columns.push(col);
        }
    }
    let nrows = columns.iter().map(|c| c.len()).max().unwrap_or(0).max(h0.len());
    let rows: Vec<Vec<u32>> =
        (0..nrows).map(|r| columns.iter().map(|c| c.get(r).copied().unwrap_or(0)).collect()).collect();
    let rhs: Vec<u32> = (0..nrows).map(|r| h0.get(r).copied().unwrap_or(0)).collect();
    Ok(solvable(p, rows, rhs))
}

/// Monomial-wise lift of ā to X^p − π^{n(p−1)}X = a.
pub fn lift_p(abar: &ResidueSeries, n: i64, ring: RingKind) -> Result<(GroupSchemeTag, BiElement, BiElement)> {
    if n < 0 {
        return Err(Error::InvalidInput(format!("n = {n}")));
    }
    let window = match ring {
        RingKind::Boundary => None,
        RingKind::Germ => Some(0),
    };
    let a = BiElement::from_residue(abar, 0, window)?;
    let a_k = a.shift(-n * abar.prime().pi64(), 0)?;
    Ok((GroupSchemeTag::Mn { n }.canonical(), a, a_k))
}
