//! Degree-p² cyclic covers: the case analysis over germs, degeneration types over
//! formal boundaries, admissible pairs, and degeneration data with their lifts.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffseries::{pmin, BiElement, Coeff, PrimeChar, ResidueSeries};
use crate::torsor_p::{default_budget, lift_p, normalize_p, DegTypeP, NormalizedPCover, RingKind};
use crate::witt::{GroupSchemeTag, WittVec2};

// ---------------------------------------------------------------------------
// Types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitLevel {
    None,
    /// The second-level cover is trivial over the boundary.
    TopOnly,
    /// Already the first-level cover is trivial.
    Full,
}

/// Degeneration type {(n1, m1), (n2, m2)} of a p²-cyclic cover over a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegTypeP2 {
    pub first: DegTypeP,
    pub second: DegTypeP,
    pub split_level: SplitLevel,
}

impl DegTypeP2 {
    pub fn new(n1: i64, m1: i64, n2: i64, m2: i64) -> Self {
        DegTypeP2 { first: DegTypeP::new(n1, m1), second: DegTypeP::new(n2, m2), split_level: SplitLevel::None }
    }

    pub fn different(&self, p: PrimeChar) -> (i64, i64) {
        (self.first.different(p), self.second.different(p))
    }
}

impl fmt::Display for DegTypeP2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.first, self.second)
    }
}

/// Branch of the rank-p² case analysis over an affine germ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum P2Case {
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "c-1")]
    C1,
    #[serde(rename = "c-2")]
    C2,
    #[serde(rename = "c-3")]
    C3,
    #[serde(rename = "c-4")]
    C4,
    #[serde(rename = "c-5")]
    C5,
}

impl fmt::Display for P2Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            P2Case::A => "a",
            P2Case::B => "b",
            P2Case::C1 => "c-1",
            P2Case::C2 => "c-2",
            P2Case::C3 => "c-3",
            P2Case::C4 => "c-4",
            P2Case::C5 => "c-5",
        };
        f.write_str(s)
    }
}

/// Tuning knobs for the rank-p² engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct P2Options {
    /// T-exponents at or above this bound are discarded during the computation.
    pub t_cap: Option<i64>,
    pub budget: usize,
}

impl P2Options {
    pub fn for_inputs(a1: &BiElement, a2: &BiElement) -> Self {
        let p = a1.prime().pi64();
        let d = a1
            .terms()
            .chain(a2.terms())
            .map(|((_, j), _)| j.abs())
            .max()
            .unwrap_or(0);
        let cap = p * p * (d + 2) + 8;
        P2Options { t_cap: Some(cap), budget: default_budget(a1).max(default_budget(a2)).max(64) }
    }
}

// ---------------------------------------------------------------------------
// The ring B = A[X]/(X^p − π^e X − a1)
// ---------------------------------------------------------------------------

#[derive(Debug, PartialEq)]
struct ExtRing {
    p: PrimeChar,
    e: i64,
    a1: BiElement,
    t_cap: Option<i64>,
    window: Option<i64>,
}

/// Element Σ comps[j]·X^j of A[X]/(X^p − π^e X − a1).
#[derive(Debug, Clone, PartialEq)]
struct ExtElement {
    ring: Arc<ExtRing>,
    comps: Vec<BiElement>,
}

impl ExtRing {
    fn cap(&self, b: BiElement) -> BiElement {
        if self.t_cap.is_some() {
            b.with_precision(None, self.t_cap)
        } else {
            b
        }
    }

    fn zero_comp(&self) -> BiElement {
        BiElement::zero(self.p, self.window)
    }
}

impl ExtElement {
    fn from_poly(ring: &Arc<ExtRing>, mut poly: Vec<BiElement>) -> Result<Self> {
        let p = ring.p.p() as usize;
        while poly.len() > p {
            let c = poly.pop().expect("nonempty");
            if c.is_exact_zero() {
                continue;
            }
            let k = poly.len();
            poly[k - p + 1] = ring.cap(poly[k - p + 1].add(&c.shift(ring.e, 0)?)?);
            poly[k - p] = ring.cap(poly[k - p].add(&c.mul(&ring.a1)?)?);
        }
        while poly.len() < p {
            poly.push(ring.zero_comp());
        }
        let comps = poly.into_iter().map(|c| ring.cap(c)).collect();
        Ok(ExtElement { ring: ring.clone(), comps })
    }

    fn scalar(ring: &Arc<ExtRing>, s: BiElement) -> Result<Self> {
        ExtElement::from_poly(ring, vec![s])
    }

    fn x(ring: &Arc<ExtRing>) -> Result<Self> {
        ExtElement::from_poly(ring, vec![ring.zero_comp(), BiElement::one(ring.p, ring.window)])
    }

    fn frobenius(&self) -> Result<Self> {
        let p = self.ring.p.p() as usize;
        let mut poly = vec![self.ring.zero_comp(); p * (p - 1) + 1];
        for (j, c) in self.comps.iter().enumerate() {
            poly[p * j] = c.frobenius();
        }
        ExtElement::from_poly(&self.ring, poly)
    }

    /// Residue classes of the components after multiplying by π^k.
    fn reduce_scaled(&self, k: i64) -> Result<Vec<ResidueSeries>> {
        self.comps
            .iter()
            .map(|c| {
                let s = c.shift(k, 0)?;
                match s.gauss_valuation() {
                    Ok(Some(v)) if v < 0 => Err(Error::IndeterminateAtPrecision(format!(
                        "component of valuation {v} after scaling by π^{k}"
                    ))),
                    _ => s.level(0),
                }
            })
            .collect()
    }
}

impl Coeff for ExtElement {
    fn prime(&self) -> PrimeChar {
        self.ring.p
    }
    fn zero_like(&self) -> Self {
        let comps = vec![self.ring.zero_comp(); self.comps.len()];
        ExtElement { ring: self.ring.clone(), comps }
    }
    fn is_exact_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_exact_zero())
    }
    fn try_add(&self, other: &Self) -> Result<Self> {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| Ok(self.ring.cap(a.add(b)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtElement { ring: self.ring.clone(), comps })
    }
    fn try_mul(&self, other: &Self) -> Result<Self> {
        let p = self.ring.p.p() as usize;
        let mut poly = vec![self.ring.zero_comp(); 2 * p - 1];
        for (i, a) in self.comps.iter().enumerate() {
            if a.is_exact_zero() {
                continue;
            }
            for (j, b) in other.comps.iter().enumerate() {
                if b.is_exact_zero() {
                    continue;
                }
                poly[i + j] = self.ring.cap(poly[i + j].add(&a.mul(b)?)?);
            }
        }
        ExtElement::from_poly(&self.ring, poly)
    }
    fn neg(&self) -> Self {
        self.scale(-1)
    }
    fn scale(&self, c: i64) -> Self {
        let comps = self.comps.iter().map(|a| a.scalar(c)).collect();
        ExtElement { ring: self.ring.clone(), comps }
    }
    fn pi_shift(&self, k: i64) -> Result<Self> {
        let comps = self.comps.iter().map(|a| a.shift(k, 0)).collect::<Result<Vec<_>>>()?;
        Ok(ExtElement { ring: self.ring.clone(), comps })
    }
}

/// K(T1) = c(T1, −T1) − c(T1^p, −T1): the correction with T2^p − T2 = a2 − K(T1).
fn carry_correction(t1: &ExtElement) -> Result<ExtElement> {
    let zero = t1.zero_like();
    let t1p = t1.try_pow(t1.prime().p())?;
    let w = WittVec2::plain(t1p, zero.clone()).sub(&WittVec2::plain(t1.clone(), zero))?;
    Ok(w.x2)
}

// ---------------------------------------------------------------------------
// Decomposition over the p-basis 1, v, ..., v^{p−1}
// ---------------------------------------------------------------------------

/// Solves ū = Σ w_j^p v̄^j greedily by leading exponents; returns w_0..w_{p−1}.
///
/// Over a germ the w_j must be power series, and an unreachable exponent gives
/// `NotInSpan`. Terms at or above `cap` are ignored.
pub fn decompose_av_residue(
    u: &ResidueSeries,
    v: &ResidueSeries,
    ring: RingKind,
    cap: Option<i64>,
) -> Result<Vec<ResidueSeries>> {
    let p = u.prime();
    let pp = p.pi64();
    let mu = v.valuation()?.ok_or_else(|| Error::HypothesisViolated("v̄ is zero".into()))?;
    if mu.rem_euclid(pp) == 0 {
        return Err(Error::HypothesisViolated(format!("v̄ has valuation {mu}, divisible by p")));
    }
    let lc = v.leading().expect("nonzero").1;
    let prec = pmin(pmin(u.prec(), cap), v.prec().map(|q| q - mu + u.val_lower().unwrap_or(0).min(0)));
    let inv_mu = p.inv(p.reduce(mu)).expect("prime to p") as i64;
    let mut vpow = vec![ResidueSeries::constant(p, 1)];
    for _ in 1..pp {
        let next = vpow.last().expect("nonempty").mul(v)?.truncate(prec);
        vpow.push(next);
    }
    let mut coeffs: Vec<Vec<(i64, i64)>> = vec![Vec::new(); pp as usize];
    let mut work = u.truncate(prec);
    let mut guard = 0usize;
    while let Some((e, c)) = work.leading() {
        guard += 1;
        if guard > 1_000_000 {
            return Err(Error::IndeterminateAtPrecision("decomposition does not terminate".into()));
        }
        let j = (e.rem_euclid(pp) * inv_mu).rem_euclid(pp);
        let ep = (e - j * mu) / pp;
        if ring == RingKind::Germ && ep < 0 {
            return Err(Error::NotInSpan);
        }
        let scale = p.mul(c, p.inv(p.pow(lc, j as u64)).expect("unit"));
        coeffs[j as usize].push((ep, scale as i64));
        let sub = vpow[j as usize].shift(pp * ep).scalar(scale as i64).truncate(prec);
        work = work.sub(&sub)?.truncate(prec);
        if prec.is_none() && work.leading().is_some_and(|(e2, _)| e2 <= e) {
            return Err(Error::IndeterminateAtPrecision("decomposition stalled".into()));
        }
    }
    Ok(coeffs
        .into_iter()
        .enumerate()
        .map(|(j, t)| {
            let q = prec.map(|q| (q - j as i64 * mu).div_euclid(pp));
            ResidueSeries::new(p, t, q)
        })
        .collect())
}

/// u = (a_0^p + a_1^p v + ... + a_{p−1}^p v^{p−1}) + π^shift·u′.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AvDecomposition {
    pub f_coeffs: Vec<BiElement>,
    pub remainder: BiElement,
    pub shift: i64,
}

impl AvDecomposition {
    /// Σ a_j^p v^j.
    pub fn f_of(&self, v: &BiElement) -> Result<BiElement> {
        let mut acc = BiElement::zero(v.prime(), v.t_window());
        let mut vj = BiElement::one(v.prime(), v.t_window());
        for a in &self.f_coeffs {
            acc = acc.add(&a.frobenius().mul(&vj)?)?;
            vj = vj.mul(v)?;
        }
        Ok(acc)
    }
}

/// Integral form of the decomposition: residues are decomposed, the coefficients
/// lifted monomial-wise, and the difference divided by π.
pub fn decompose_av(u: &BiElement, v: &BiElement, ring: RingKind, cap: Option<i64>) -> Result<AvDecomposition> {
    let ubar = u.reduce_mod_pi()?;
    let vbar = v.reduce_mod_pi()?;
    if vbar.is_pth_power() {
        return Err(Error::HypothesisViolated("v̄ is a p-th power".into()));
    }
    let ws = decompose_av_residue(&ubar, &vbar, ring, cap)?;
    let f_coeffs = ws
        .iter()
        .map(|w| BiElement::from_residue(&w.to_polynomial(), 0, u.t_window()))
        .collect::<Result<Vec<_>>>()?;
    let mut d = AvDecomposition { f_coeffs, remainder: BiElement::zero(u.prime(), u.t_window()), shift: 1 };
    let diff = u.sub(&d.f_of(v)?)?;
    let diff = if cap.is_some() { diff.with_precision(None, cap) } else { diff };
    d.shift = match diff.gauss_valuation() {
        Ok(Some(s)) if s >= 1 => s,
        _ => 1,
    };
    d.remainder = diff.shift(-d.shift, 0)?;
    Ok(d)
}

/// The rewritten second-level term after adding β − β^p with β = π^{−m}Σ a_j T^j,
/// where T^p − π^{n(p−1)}T = v. Polynomials are listed by T-degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GTilde {
    pub beta: Vec<BiElement>,
    /// −Σ j a_j^p T^{p(j−1)+1}, to be multiplied by π^{−middle_exponent}.
    pub middle: Vec<BiElement>,
    pub middle_exponent: i64,
    /// h(T), to be multiplied by π^{−h_exponent}.
    pub h: Vec<BiElement>,
    pub h_exponent: i64,
    pub middle_not_pth_power: bool,
}

impl GTilde {
    /// β + π^{−middle_exponent}·middle + π^{−h_exponent}·h as one polynomial in T.
    pub fn total(&self) -> Result<Vec<BiElement>> {
        let len = self.beta.len().max(self.middle.len()).max(self.h.len());
        let mut out = Vec::with_capacity(len);
        for k in 0..len {
            let mut acc = self.beta.get(k).cloned().unwrap_or_else(|| self.beta[0].zero_like());
            if let Some(c) = self.middle.get(k) {
                acc = acc.add(&c.shift(-self.middle_exponent, 0)?)?;
            }
            if let Some(c) = self.h.get(k) {
                acc = acc.add(&c.shift(-self.h_exponent, 0)?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }
}

fn small_binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Expands π^{−pm}·Σ a_j^p (T^p − π^{n(p−1)}T)^j + β − β^p.
pub fn transform_g_tilde(decomp: &AvDecomposition, n: i64, m: i64) -> Result<GTilde> {
    let a = &decomp.f_coeffs;
    let first = a.first().ok_or_else(|| Error::InvalidInput("empty decomposition".into()))?;
    let p = first.prime();
    let pp = p.pi64();
    let e = n * (pp - 1);
    let middle_exponent = pp * m - e;
    if middle_exponent <= 0 {
        return Err(Error::ExponentUnderflow(format!("pm − n(p−1) = {middle_exponent}")));
    }
    let zero = first.zero_like();
    let deg = (pp * (pp - 1)) as usize + 1;
    let beta = a.iter().map(|c| c.shift(-m, 0)).collect::<Result<Vec<_>>>()?;
    let mut middle = vec![zero.clone(); deg];
    let mut h = vec![zero.clone(); deg];
    for (j, aj) in a.iter().enumerate().skip(1) {
        let ajp = aj.frobenius();
        let jj = j as i64;
        let k = (pp * (jj - 1) + 1) as usize;
        middle[k] = middle[k].add(&ajp.scalar(-jj))?;
        for i in 2..=jj {
            let coef = small_binomial(j as u64, i as u64) as i64 * if i % 2 == 0 { 1 } else { -1 };
            let k = (pp * (jj - i) + i) as usize;
            h[k] = h[k].add(&ajp.scalar(coef).shift((i - 2) * e, 0)?)?;
        }
    }
    let middle_not_pth_power = a.iter().skip(1).any(|c| c.reduce_mod_pi().is_ok_and(|r| !r.is_empty()));
    Ok(GTilde { beta, middle, middle_exponent, h, h_exponent: pp * m - 2 * e, middle_not_pth_power })
}

// ---------------------------------------------------------------------------
// Residue extension k((t))[t1]/(t1^p − ε t1 − ā1) over a boundary
// ---------------------------------------------------------------------------

/// Element of the residue ring of the first-level cover over a boundary, with the
/// valuation normalized by v(t) = p and v(t1) = v_t(ā1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidueExt {
    pub etale: bool,
    pub abar1: ResidueSeries,
    pub comps: Vec<ResidueSeries>,
}

impl ResidueExt {
    pub fn new(abar1: &ResidueSeries, etale: bool, comps: Vec<ResidueSeries>) -> Result<Self> {
        let p = abar1.prime();
        let mu = abar1.valuation()?.ok_or_else(|| Error::HypothesisViolated("ā1 is zero".into()))?;
        if mu.rem_euclid(p.pi64()) == 0 {
            return Err(Error::HypothesisViolated(format!("ā1 has valuation {mu}, divisible by p")));
        }
        let mut x = ResidueExt { etale, abar1: abar1.clone(), comps: Vec::new() };
        x.comps = x.reduce(comps)?;
        Ok(x)
    }

    fn mu(&self) -> i64 {
        self.abar1.valuation().ok().flatten().expect("checked at construction")
    }

    fn reduce(&self, mut poly: Vec<ResidueSeries>) -> Result<Vec<ResidueSeries>> {
        let p = self.abar1.prime();
        let pu = p.p() as usize;
        while poly.len() > pu {
            let c = poly.pop().expect("nonempty");
            let k = poly.len();
            if self.etale {
                poly[k - pu + 1] = poly[k - pu + 1].add(&c)?;
            }
            poly[k - pu] = poly[k - pu].add(&c.mul(&self.abar1)?)?;
        }
        while poly.len() < pu {
            poly.push(ResidueSeries::zero(p));
        }
        Ok(poly)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.add(b)).collect::<Result<Vec<_>>>()?;
        Ok(ResidueExt { comps, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a.sub(b)).collect::<Result<Vec<_>>>()?;
        Ok(ResidueExt { comps, ..self.clone() })
    }

    pub fn frobenius(&self) -> Result<Self> {
        let p = self.abar1.prime();
        let pu = p.p() as usize;
        let mut poly = vec![ResidueSeries::zero(p); pu * (pu - 1) + 1];
        for (j, c) in self.comps.iter().enumerate() {
            poly[pu * j] = c.frobenius();
        }
        Ok(ResidueExt { comps: self.reduce(poly)?, ..self.clone() })
    }

    /// Leading term as (component, t-exponent, coefficient, valuation).
    pub fn leading(&self) -> Result<Option<(usize, i64, u32, i64)>> {
        let pp = self.abar1.prime().pi64();
        let mu = self.mu();
        let mut best: Option<(usize, i64, u32, i64)> = None;
        let mut bound: Option<i64> = None;
        for (j, c) in self.comps.iter().enumerate() {
            let shift = j as i64 * mu;
            if let Some(q) = c.prec() {
                bound = pmin(bound, Some(pp * q + shift));
            }
            if let Some((e, coef)) = c.leading() {
                let w = pp * e + shift;
                if best.is_none_or(|b| w < b.3) {
                    best = Some((j, e, coef, w));
                }
            }
        }
        match (best, bound) {
            (Some(b), Some(q)) if b.3 >= q => {
                Err(Error::IndeterminateAtPrecision("leading term beyond the known range".into()))
            }
            (None, Some(_)) => Err(Error::IndeterminateAtPrecision("element is zero to known precision".into())),
            (b, _) => Ok(b),
        }
    }

    pub fn valuation(&self) -> Result<Option<i64>> {
        Ok(self.leading()?.map(|l| l.3))
    }

    /// The monomial c·t^b·t1^a of valuation w/p whose p-th power cancels the
    /// leading term of valuation w.
    fn root_monomial(&self, e: i64, c: u32) -> Result<Self> {
        let p = self.abar1.prime();
        let pp = p.pi64();
        let mu = self.mu();
        let inv_mu = p.inv(p.reduce(mu)).expect("prime to p") as i64;
        let a = (e.rem_euclid(pp) * inv_mu).rem_euclid(pp);
        let b = (e - a * mu) / pp;
        let lc = self.abar1.leading().expect("nonzero").1;
        let coef = p.mul(c, p.inv(p.pow(lc, a as u64)).expect("unit"));
        let mut comps = vec![ResidueSeries::zero(p); pp as usize];
        comps[a as usize] = ResidueSeries::monomial(p, coef as i64, b);
        Ok(ResidueExt { comps, ..self.clone() })
    }

    /// Removes p-th powers; returns the leading valuation of the remainder
    /// (prime to p), or `None` if nothing remains.
    pub fn radicial_conductor(&self) -> Result<Option<i64>> {
        let pp = self.abar1.prime().pi64();
        if !self.etale {
            // Every element of k((t)) is a p-th power in the purely inseparable extension.
            let mut x = self.clone();
            x.comps[0] = ResidueSeries::zero(self.abar1.prime());
            return x.valuation();
        }
        let mut x = self.clone();
        for _ in 0..100_000 {
            match x.leading()? {
                None => return Ok(None),
                Some((_, _, _, w)) if w.rem_euclid(pp) != 0 => return Ok(Some(w)),
                Some((j, e, c, _)) => {
                    debug_assert_eq!(j, 0);
                    let beta = x.root_monomial(e, c)?;
                    x = x.sub(&beta.frobenius()?)?;
                }
            }
        }
        Err(Error::NonTerminatingBudget(100_000))
    }

    /// Artin-Schreier reduction over the étale extension; `None` when the
    /// class is trivial.
    pub fn artin_schreier_conductor(&self) -> Result<Option<i64>> {
        let pp = self.abar1.prime().pi64();
        let mut x = self.clone();
        for _ in 0..100_000 {
            let lead = match x.leading() {
                Ok(l) => l,
                Err(Error::IndeterminateAtPrecision(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            match lead {
                None => return Ok(None),
                Some((_, _, _, w)) if w >= 0 => return Ok(None),
                Some((_, _, _, w)) if w.rem_euclid(pp) != 0 => return Ok(Some(w)),
                Some((_, e, c, _)) => {
                    let beta = x.root_monomial(e, c)?;
                    x = x.sub(&beta.frobenius()?.sub(&beta)?)?;
                }
            }
        }
        Err(Error::NonTerminatingBudget(100_000))
    }
}

// ---------------------------------------------------------------------------
// The engine
// ---------------------------------------------------------------------------

/// One decomposition round: at π-denominator `denominator`, the remaining term
/// was rewritten as Σ c_j^p a1^j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompRound {
    pub denominator: i64,
    pub coeffs: Vec<ResidueSeries>,
}

/// The three competing π-denominators of the radicial case: the middle term of
/// the first genuine decomposition, the carry marker, and the remaining term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub middle: Option<i64>,
    pub marker: i64,
    pub remainder: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondLevel {
    pub n: i64,
    pub group: GroupSchemeTag,
    /// Components of the integral right-hand side in the basis 1, T1, ..., T1^{p−1}.
    pub integral_rhs: Vec<BiElement>,
    /// Components of its reduction.
    pub special_fibre: Vec<ResidueSeries>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct P2Normalized {
    pub case: P2Case,
    pub tie: bool,
    pub h_torsor: bool,
    pub group: Option<GroupSchemeTag>,
    pub special_group: Option<GroupSchemeTag>,
    pub first: NormalizedPCover,
    pub second: SecondLevel,
    pub delta1: i64,
    pub delta2: i64,
    pub delta: i64,
    /// The Witt right-hand side after the first-level gauge.
    pub witt_rhs: (BiElement, BiElement),
    pub abar1: ResidueSeries,
    pub abar2: Option<ResidueSeries>,
    pub c_bar: Vec<ResidueSeries>,
    pub g_bar: Option<ResidueSeries>,
    pub marker: bool,
    pub rounds: Vec<DecompRound>,
    pub comparison: Option<Comparison>,
    pub special_fibre_equations: Vec<String>,
}

struct Prepared {
    p: PrimeChar,
    ring: RingKind,
    window: Option<i64>,
    first: NormalizedPCover,
    witt: WittVec2<BiElement>,
    opts: P2Options,
}

fn in_ring(a: &BiElement, ring: RingKind) -> Result<BiElement> {
    match ring {
        RingKind::Boundary => Ok(a.to_boundary()),
        RingKind::Germ if a.t_window() == Some(0) => Ok(a.clone()),
        RingKind::Germ => BiElement::new(
            a.prime(),
            a.terms().map(|((i, j), c)| (i, j, c as i64)),
            a.pi_prec(),
            a.t_prec(),
            Some(0),
        ),
    }
}

fn prepare(a1: &BiElement, a2: &BiElement, ring: RingKind, opts: P2Options) -> Result<Prepared> {
    let p = a1.prime();
    if a2.prime() != p {
        return Err(Error::CharMismatch(p.p(), a2.prime().p()));
    }
    let capped = |b: BiElement| if opts.t_cap.is_some() { b.with_precision(None, opts.t_cap) } else { b };
    let a1 = capped(in_ring(a1, ring)?);
    let a2 = capped(in_ring(a2, ring)?);
    let window = a1.t_window();
    let first = normalize_p(&a1, ring, opts.budget)?;
    let zero = BiElement::zero(p, window);
    let mut witt = WittVec2::plain(a1, a2);
    for b in &first.gauge {
        let fb = WittVec2::plain(b.frobenius(), zero.clone());
        let wb = WittVec2::plain(b.clone(), zero.clone());
        witt = witt.sub(&fb.sub(&wb)?)?;
        witt.x1 = capped(witt.x1);
        witt.x2 = capped(witt.x2);
    }
    witt.x1 = first.generic_rhs.clone();
    Ok(Prepared { p, ring, window, first, witt, opts })
}

struct EtaleRun {
    second: NormalizedPCover,
    n2: i64,
    h_integral: ExtElement,
    ubar: Vec<ResidueSeries>,
}

fn run_etale(prep: &Prepared) -> Result<EtaleRun> {
    let second = normalize_p(&prep.witt.x2, prep.ring, prep.opts.budget)?;
    let n2 = if second.deg_type.split { 0 } else { second.deg_type.n };
    let ring = Arc::new(ExtRing {
        p: prep.p,
        e: 0,
        a1: prep.first.integral_rhs.clone(),
        t_cap: prep.opts.t_cap,
        window: prep.window,
    });
    let x = ExtElement::x(&ring)?;
    let k = carry_correction(&x)?;
    let h = ExtElement::scalar(&ring, second.generic_rhs.clone())?.try_sub(&k)?;
    let h_integral = h.pi_shift(prep.p.pi64() * n2)?;
    let ubar = h_integral.reduce_scaled(0)?;
    Ok(EtaleRun { second, n2, h_integral, ubar })
}

struct RadicialRun {
    n1: i64,
    comparison: Comparison,
    m_top: i64,
    rounds: Vec<DecompRound>,
    c_bar: Vec<ResidueSeries>,
    g_bar: Option<ResidueSeries>,
    h_integral: ExtElement,
    ubar: Vec<ResidueSeries>,
}

fn lift_series(s: &ResidueSeries, window: Option<i64>) -> Result<BiElement> {
    BiElement::from_residue(&s.to_polynomial(), 0, window)
}

fn run_radicial(prep: &Prepared) -> Result<RadicialRun> {
    let p = prep.p;
    let pp = p.pi64();
    let n1 = prep.first.deg_type.n;
    let e = n1 * (pp - 1);
    let a1 = prep.first.integral_rhs.clone();
    let abar1 = prep.first.special_fibre_rhs.clone();
    let ring = Arc::new(ExtRing { p, e, a1: a1.clone(), t_cap: prep.opts.t_cap, window: prep.window });
    let t1 = ExtElement::x(&ring)?.pi_shift(-n1)?;
    let q = carry_correction(&t1)?.neg();
    let marker = n1 * (pp * pp - pp + 1);
    let mut g = prep.witt.x2.clone();
    let mut acc = ExtElement::scalar(&ring, BiElement::zero(p, prep.window))?;
    let mut middle: Option<i64> = None;
    let mut c_bar = vec![ResidueSeries::zero(p); pp as usize - 1];
    let mut rounds = Vec::new();
    let denominator = |g: &BiElement| -> Result<Option<i64>> { Ok(g.gauss_valuation()?.map(|v| -v)) };
    let mut steps = 0usize;
    loop {
        steps += 1;
        if steps > prep.opts.budget {
            return Err(Error::NonTerminatingBudget(prep.opts.budget));
        }
        let c = match denominator(&g)? {
            None => break,
            Some(c) => c,
        };
        if c <= marker || middle.is_some_and(|a| c < a) {
            break;
        }
        if c % pp != 0 {
            if middle == Some(c) {
                break;
            }
            return Err(Error::RamifiedAssumptionViolated(format!(
                "second-level denominator π^{c} is not divisible by p"
            )));
        }
        let gbar = g.level(-c)?;
        let ws = match decompose_av_residue(&gbar, &abar1, prep.ring, prep.opts.t_cap) {
            Ok(ws) => ws,
            Err(Error::NotInSpan) => break,
            Err(err) => return Err(err),
        };
        let lifts = ws.iter().map(|w| lift_series(w, prep.window)).collect::<Result<Vec<_>>>()?;
        let mut f = BiElement::zero(p, prep.window);
        let mut a1j = BiElement::one(p, prep.window);
        for l in &lifts {
            f = ring.cap(f.add(&l.frobenius().mul(&a1j)?)?);
            a1j = ring.cap(a1j.mul(&a1)?);
        }
        let f_k = f.shift(-c, 0)?;
        g = ring.cap(g.sub(&f_k)?);
        let beta = ExtElement::from_poly(&ring, lifts.clone())?.pi_shift(-c / pp)?;
        let wp_beta = beta.frobenius()?.try_sub(&beta)?;
        acc = acc.try_add(&ExtElement::scalar(&ring, f_k)?)?.try_sub(&wp_beta)?;
        let genuine = ws.iter().skip(1).any(|w| !w.is_empty());
        if middle.is_none() && genuine {
            middle = Some(c - e);
            c_bar = ws[1..].iter().map(|w| w.to_polynomial()).collect();
        }
        rounds.push(DecompRound { denominator: c, coeffs: ws });
        if denominator(&g)?.is_some_and(|c2| c2 >= c) {
            return Err(Error::IndeterminateAtPrecision("decomposition did not lower the denominator".into()));
        }
    }
    let remainder = denominator(&g)?.filter(|&c| c > 0);
    let comparison = Comparison { middle, marker, remainder };
    let m_top = [middle, Some(marker), remainder].into_iter().flatten().max().expect("marker present");
    if m_top % pp != 0 {
        return Err(Error::RamifiedAssumptionViolated(format!(
            "second-level denominator π^{m_top} is not divisible by p"
        )));
    }
    let g_bar = if remainder == Some(m_top) { Some(g.level(-m_top)?) } else { None };
    let h = ExtElement::scalar(&ring, g)?.try_add(&q)?.try_add(&acc)?;
    let h_integral = h.pi_shift(m_top)?;
    let ubar = h_integral.reduce_scaled(0)?;
    Ok(RadicialRun { n1, comparison, m_top, rounds, c_bar, g_bar, h_integral, ubar })
}

fn classify_case(cmp: &Comparison) -> (P2Case, bool) {
    let b = cmp.marker;
    let c = cmp.remainder;
    match cmp.middle {
        None => match c {
            Some(c) if c > b => (P2Case::C3, false),
            Some(c) if c == b => (P2Case::C1, true),
            _ => (P2Case::C1, false),
        },
        Some(a) => {
            let c = c.unwrap_or(i64::MIN);
            if a == b && b == c {
                (P2Case::C5, false)
            } else if a > b && a > c {
                (P2Case::C2, false)
            } else if a == b && a > c {
                (P2Case::C2, true)
            } else if c > a && c > b {
                (P2Case::C3, false)
            } else if c == a && a > b {
                (P2Case::C3, true)
            } else if b > a && b > c {
                (P2Case::C4, false)
            } else {
                (P2Case::C4, true)
            }
        }
    }
}

fn power_text(var: &str, e: i64) -> String {
    match e {
        0 => String::new(),
        1 => var.to_string(),
        e => format!("{var}^{e}"),
    }
}

fn ext_text(comps: &[ResidueSeries]) -> String {
    let parts: Vec<String> = comps
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_empty())
        .map(|(j, c)| match j {
            0 => format!("({c})"),
            j => format!("({c})·{}", power_text("t1", j as i64)),
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn radicial_text(p: i64, c_bar: &[ResidueSeries], marker: bool, g_bar: Option<&ResidueSeries>) -> String {
    let mut parts = Vec::new();
    for (idx, c) in c_bar.iter().enumerate() {
        if c.is_empty() {
            continue;
        }
        let j = idx as i64 + 1;
        let k = if j == 1 { String::new() } else { format!("{j}·") };
        parts.push(format!("− {k}({c})^{p}·{}", power_text("t1", p * (j - 1) + 1)));
    }
    if marker {
        parts.push(format!("− t1^{}", p * (p - 1) + 1));
    }
    if let Some(g) = g_bar {
        if !g.is_empty() {
            parts.push(format!("+ ({g})"));
        }
    }
    if parts.is_empty() {
        return "0".into();
    }
    let s = parts.join(" ");
    match s.strip_prefix("+ ") {
        Some(rest) => rest.to_string(),
        None => s,
    }
}

pub fn normalize_germ_p2(a1: &BiElement, a2: &BiElement) -> Result<P2Normalized> {
    normalize_germ_p2_with(a1, a2, P2Options::for_inputs(a1, a2))
}

/// The rank-p² case analysis over an affine germ.
pub fn normalize_germ_p2_with(a1: &BiElement, a2: &BiElement, opts: P2Options) -> Result<P2Normalized> {
    let prep = prepare(a1, a2, RingKind::Germ, opts)?;
    let p = prep.p;
    let pp = p.pi64();
    let first = prep.first.clone();
    if first.deg_type.split {
        return Err(Error::ReducibleSpecialFibre("the first-level cover is trivial".into()));
    }
    let abar1 = first.special_fibre_rhs.clone();
    let witt_rhs = (prep.witt.x1.clone(), prep.witt.x2.clone());
    let delta1 = first.delta();
    if first.deg_type.n == 0 {
        let run = run_etale(&prep)?;
        let abar2 = run.second.integral_rhs.reduce_mod_pi().unwrap_or_else(|_| ResidueSeries::zero(p));
        let n2 = run.n2;
        let (case, group, special_group, group2, eqs) = if n2 == 0 {
            (
                P2Case::A,
                GroupSchemeTag::EtaleZp2Z,
                GroupSchemeTag::EtaleZp2Z,
                GroupSchemeTag::EtaleZpZ,
                vec![format!("(t1^{pp}, t2^{pp}) − (t1, t2) = ({abar1}, {abar2})")],
            )
        } else {
            (
                P2Case::B,
                GroupSchemeTag::Wm1m2 { m1: 0, m2: n2 },
                GroupSchemeTag::Hk,
                GroupSchemeTag::Mn { n: n2 },
                vec![format!("t1^{pp} − t1 = {abar1}"), format!("t2^{pp} = {abar2}")],
            )
        };
        let delta2 = n2 * (pp - 1);
        return Ok(P2Normalized {
            case,
            tie: false,
            h_torsor: false,
            group: Some(group),
            special_group: Some(special_group),
            first,
            second: SecondLevel {
                n: n2,
                group: group2,
                integral_rhs: run.h_integral.comps.clone(),
                special_fibre: run.ubar.clone(),
            },
            delta1,
            delta2,
            delta: delta1 + delta2,
            witt_rhs,
            abar1,
            abar2: Some(abar2),
            c_bar: vec![ResidueSeries::zero(p); pp as usize - 1],
            g_bar: None,
            marker: false,
            rounds: Vec::new(),
            comparison: None,
            special_fibre_equations: eqs,
        });
    }
    let run = run_radicial(&prep)?;
    let (case, tie) = classify_case(&run.comparison);
    let n2 = run.m_top / pp;
    let delta2 = n2 * (pp - 1);
    let h_torsor = case == P2Case::C3 && run.comparison.middle.is_none();
    let marker = run.comparison.marker == run.m_top;
    let middle_on_top = run.comparison.middle == Some(run.m_top);
    let c_shown: Vec<ResidueSeries> = if middle_on_top {
        run.c_bar.clone()
    } else {
        vec![ResidueSeries::zero(p); pp as usize - 1]
    };
    let (group, special_group) = if h_torsor {
        (Some(GroupSchemeTag::Hm1m2 { m1: run.n1, m2: n2 }), Some(GroupSchemeTag::Gk))
    } else {
        (None, None)
    };
    let eqs = vec![
        format!("t1^{pp} = {abar1}"),
        format!("t2^{pp} = {}", radicial_text(pp, &c_shown, marker, run.g_bar.as_ref())),
        format!("t2^{pp} = {}", ext_text(&run.ubar)),
    ];
    Ok(P2Normalized {
        case,
        tie,
        h_torsor,
        group,
        special_group,
        first,
        second: SecondLevel {
            n: n2,
            group: GroupSchemeTag::Mn { n: n2 },
            integral_rhs: run.h_integral.comps.clone(),
            special_fibre: run.ubar.clone(),
        },
        delta1,
        delta2,
        delta: delta1 + delta2,
        witt_rhs,
        abar1,
        abar2: None,
        c_bar: run.c_bar,
        g_bar: run.g_bar,
        marker,
        rounds: run.rounds,
        comparison: Some(run.comparison),
        special_fibre_equations: eqs,
    })
}

pub fn classify_boundary_p2(a1: &BiElement, a2: &BiElement) -> Result<DegTypeP2> {
    classify_boundary_p2_with(a1, a2, P2Options::for_inputs(a1, a2))
}

/// Degeneration type of a p²-cyclic cover over a formal boundary.
pub fn classify_boundary_p2_with(a1: &BiElement, a2: &BiElement, opts: P2Options) -> Result<DegTypeP2> {
    let prep = prepare(a1, a2, RingKind::Boundary, opts)?;
    let pp = prep.p.pi64();
    let first = prep.first.deg_type;
    if first.split {
        return Ok(DegTypeP2 { first, second: DegTypeP::split(), split_level: SplitLevel::Full });
    }
    let abar1 = prep.first.special_fibre_rhs.clone();
    if first.n == 0 {
        let run = run_etale(&prep)?;
        let x = ResidueExt::new(&abar1, true, run.ubar)?;
        let m2 = if run.n2 == 0 { x.artin_schreier_conductor()? } else { x.radicial_conductor()? };
        return Ok(match m2 {
            Some(m2) => DegTypeP2 { first, second: DegTypeP::new(run.n2, m2), split_level: SplitLevel::None },
            None if run.n2 == 0 => DegTypeP2 { first, second: DegTypeP::split(), split_level: SplitLevel::TopOnly },
            None => {
                return Err(Error::IndeterminateAtPrecision("second-level reduction is a p-th power".into()))
            }
        });
    }
    let run = run_radicial(&prep)?;
    let x = ResidueExt::new(&abar1, false, run.ubar)?;
    let m2 = x
        .radicial_conductor()?
        .ok_or_else(|| Error::IndeterminateAtPrecision("second-level reduction is a p-th power".into()))?;
    Ok(DegTypeP2 { first, second: DegTypeP::new(run.m_top / pp, m2), split_level: SplitLevel::None })
}

// ---------------------------------------------------------------------------
// Admissible pairs
// ---------------------------------------------------------------------------

fn prime_to(x: i64, p: i64) -> bool {
    x.rem_euclid(p) != 0
}

/// The m2 with m̃2 = p·m2 + s, if it exists and is prime to p.
fn aux_m2(mt2: i64, s: i64, p: i64) -> Option<i64> {
    let d = mt2 - s;
    if d.rem_euclid(p) != 0 {
        return None;
    }
    let m2 = d / p;
    prime_to(m2, p).then_some(m2)
}

/// Sign with which m1(p−1) enters the étale branches: −1 for the reading that
/// agrees with the boundary classification, the printed signs otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignReading {
    Consistent,
    AsPrinted,
}

pub fn is_admissible_pair(p: PrimeChar, pair: &DegTypeP2) -> bool {
    is_admissible_pair_read(p, pair, SignReading::Consistent)
}

/// Admissibility of {(n1, m1), (ñ2, m̃2)}.
pub fn is_admissible_pair_read(p: PrimeChar, pair: &DegTypeP2, reading: SignReading) -> bool {
    if pair.split_level != SplitLevel::None || pair.first.split || pair.second.split {
        return false;
    }
    let pp = p.pi64();
    let q = pp * (pp - 1) + 1;
    let (n1, m1) = (pair.first.n, pair.first.m);
    let (n2, mt2) = (pair.second.n, pair.second.m);
    if n1 < 0 || n2 < 0 {
        return false;
    }
    let etale_second_sign = match reading {
        SignReading::Consistent => -1,
        SignReading::AsPrinted => 1,
    };
    if n1 == 0 && n2 == 0 {
        if m1 >= 0 || mt2 >= 0 {
            return false;
        }
        if mt2 == m1 * q {
            return true;
        }
        return matches!(aux_m2(mt2, -m1 * (pp - 1), pp), Some(m2) if m2 < 0 && mt2 <= m1 * q);
    }
    if n1 == 0 {
        return m1 <= -1 && aux_m2(mt2, etale_second_sign * m1 * (pp - 1), pp).is_some();
    }
    let lhs = pp * n2;
    let rhs = n1 * q;
    if lhs > rhs {
        aux_m2(mt2, -m1 * (pp - 1), pp).is_some()
    } else if lhs == rhs {
        mt2 == m1 * q || matches!(aux_m2(mt2, -m1 * (pp - 1), pp), Some(m2) if m2 < pp * m1)
    } else {
        false
    }
}

pub fn satisfies_condition_star(p: PrimeChar, pair: &DegTypeP2) -> bool {
    satisfies_condition_star_read(p, pair, SignReading::Consistent)
}

/// The numerical constraints on boundary types of p²-covers with smooth total space.
pub fn satisfies_condition_star_read(p: PrimeChar, pair: &DegTypeP2, reading: SignReading) -> bool {
    if !is_admissible_pair_read(p, pair, reading) {
        return false;
    }
    let pp = p.pi64();
    let q = pp * (pp - 1) + 1;
    let (n1, m1) = (pair.first.n, pair.first.m);
    let (n2, mt2) = (pair.second.n, pair.second.m);
    if m1 > -1 {
        return false;
    }
    let s = match reading {
        SignReading::Consistent => -m1 * (pp - 1),
        SignReading::AsPrinted => m1 * (pp - 1),
    };
    if n1 == 0 && n2 == 0 {
        return mt2 == m1 * q || matches!(aux_m2(mt2, s, pp), Some(m2) if m2 < 0 && mt2 <= m1 * q);
    }
    if n1 == 0 {
        return match (reading, aux_m2(mt2, s, pp)) {
            (SignReading::Consistent, Some(m2)) => m2 <= pp * m1,
            (SignReading::AsPrinted, Some(m2)) => -m2 >= pp * m1,
            (_, None) => false,
        };
    }
    if mt2 > -1 {
        return false;
    }
    let lhs = pp * n2;
    let rhs = n1 * q;
    if lhs > rhs {
        matches!(aux_m2(mt2, -m1 * (pp - 1), pp), Some(m2) if -m2 >= -pp * m1)
    } else if lhs == rhs {
        mt2 == m1 * q || matches!(aux_m2(mt2, -m1 * (pp - 1), pp), Some(m2) if m2 < pp * m1)
    } else {
        false
    }
}

// ---------------------------------------------------------------------------
// Degeneration data
// ---------------------------------------------------------------------------

/// Rank-p degeneration data over a germ: the reduced right-hand side, étale
/// (n = 0) or radicial.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenDataP {
    pub radicial: bool,
    pub abar: ResidueSeries,
}

pub fn extract_degen_data_p(cover: &NormalizedPCover) -> DegenDataP {
    DegenDataP { radicial: cover.deg_type.n > 0, abar: cover.special_fibre_rhs.to_polynomial() }
}

/// X^p − π^{n(p−1)}X = a lifting rank-p data; n = 0 for étale data.
pub fn lift_degen_data_p(data: &DegenDataP, n: i64) -> Result<(GroupSchemeTag, BiElement, BiElement)> {
    if data.radicial != (n > 0) {
        return Err(Error::InvalidInput(format!("n = {n} does not match the data kind")));
    }
    if data.radicial && data.abar.is_pth_power() {
        return Err(Error::NotPthPower);
    }
    lift_p(&data.abar, n, RingKind::Germ)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DegenDataP2 {
    /// Étale Z/p²Z class (ā1, ā2).
    A { abar1: ResidueSeries, abar2: ResidueSeries },
    /// Étale first level, α_p second level.
    B { abar1: ResidueSeries, abar2: ResidueSeries },
    /// α_p by α_p class (ā1, ḡ) and the coefficients c̄_1..c̄_{p−1}.
    C { abar1: ResidueSeries, gbar: ResidueSeries, cbar: Vec<ResidueSeries> },
}

fn artin_schreier_reduced(s: &ResidueSeries, p: i64) -> bool {
    s.coeffs().keys().all(|&e| e >= 1 && prime_to(e, p))
}

fn strip_pth_powers(s: &ResidueSeries, p: i64) -> ResidueSeries {
    s.filter(|e| prime_to(e, p))
}

impl DegenDataP2 {
    /// Whether the payload is a valid canonical representative over a germ.
    pub fn is_canonical(&self) -> bool {
        match self {
            DegenDataP2::A { abar1, abar2 } => {
                let p = abar1.prime().pi64();
                !abar1.is_empty() && artin_schreier_reduced(abar1, p) && artin_schreier_reduced(abar2, p)
            }
            DegenDataP2::B { abar1, abar2 } => {
                let p = abar1.prime().pi64();
                !abar1.is_empty()
                    && artin_schreier_reduced(abar1, p)
                    && !abar2.is_empty()
                    && abar2.coeffs().keys().all(|&e| e >= 0 && prime_to(e, p))
            }
            DegenDataP2::C { abar1, gbar, cbar } => {
                let p = abar1.prime().pi64();
                !abar1.is_empty()
                    && abar1.coeffs().keys().all(|&e| e >= 0 && prime_to(e, p))
                    && gbar.coeffs().keys().all(|&e| e >= 0 && prime_to(e, p))
                    && cbar.len() == p as usize - 1
                    && cbar.iter().all(|c| c.coeffs().keys().all(|&e| e >= 0))
            }
        }
    }
}

/// Degeneration data of a normalized germ cover, with ḡ reduced modulo p-th powers.
pub fn extract_degen_data(r: &P2Normalized) -> DegenDataP2 {
    let p = r.abar1.prime();
    let pp = p.pi64();
    let abar1 = r.abar1.to_polynomial();
    let abar2 = || r.abar2.as_ref().map_or_else(|| ResidueSeries::zero(p), |a| a.to_polynomial());
    match r.case {
        P2Case::A => DegenDataP2::A { abar1, abar2: abar2() },
        P2Case::B => DegenDataP2::B { abar1, abar2: abar2() },
        _ => {
            let gbar = r.g_bar.as_ref().map_or_else(|| ResidueSeries::zero(p), |g| strip_pth_powers(g, pp));
            let cbar = r.c_bar.iter().map(|c| c.to_polynomial()).collect();
            DegenDataP2::C { abar1, gbar: gbar.to_polynomial(), cbar }
        }
    }
}

/// Parameters selecting a lift of rank-p² degeneration data.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum LiftParams {
    /// Kind A: plain Witt-vector lift.
    Etale,
    /// Kind B: (a1, a2·π^{−p·n2}).
    Radicial { n2: i64 },
    /// Kind C: (a1·π^{−n′p}, f(a1)·π^{−p²n′} + g·π^{−p²n′+n′(p−1)}), with p | n′.
    Balanced { n_prime: i64 },
    /// Kind C with the ḡ term dominating: m with mp − n′(p−1) > n′(p(p−1)+1).
    Dominant { n_prime: i64, m: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedP2 {
    pub a1: BiElement,
    pub a2: BiElement,
    pub predicted_delta1: i64,
    pub predicted_delta2: i64,
}

/// A germ cover whose degeneration data is the given payload.
pub fn lift_degen_data(data: &DegenDataP2, params: LiftParams) -> Result<LiftedP2> {
    lift_degen_data_on(data, params, RingKind::Germ)
}

/// Lift parameters realizing the level pair (n1, n2) for the given data kind.
pub fn lift_params_for(data: &DegenDataP2, n1: i64, n2: i64) -> Result<LiftParams> {
    let p = match data {
        DegenDataP2::A { abar1, .. } | DegenDataP2::B { abar1, .. } | DegenDataP2::C { abar1, .. } => {
            abar1.prime().pi64()
        }
    };
    let q = p * (p - 1) + 1;
    match data {
        DegenDataP2::A { .. } if n1 == 0 && n2 == 0 => Ok(LiftParams::Etale),
        DegenDataP2::B { .. } if n1 == 0 && n2 > 0 => Ok(LiftParams::Radicial { n2 }),
        DegenDataP2::C { .. } if n1 > 0 && p * n2 == n1 * q => Ok(LiftParams::Balanced { n_prime: n1 }),
        DegenDataP2::C { .. } if n1 > 0 && p * n2 > n1 * q && (p * n2 + n1 * (p - 1)) % p == 0 => {
            Ok(LiftParams::Dominant { n_prime: n1, m: (p * n2 + n1 * (p - 1)) / p })
        }
        _ => Err(Error::InvalidInput(format!("levels ({n1}, {n2}) do not fit the data kind"))),
    }
}

/// Same as [`lift_degen_data`], over a germ or over a formal boundary.
pub fn lift_degen_data_on(data: &DegenDataP2, params: LiftParams, ring: RingKind) -> Result<LiftedP2> {
    let window = match ring {
        RingKind::Germ => Some(0),
        RingKind::Boundary => None,
    };
    match (data, params) {
        (DegenDataP2::A { abar1, abar2 }, LiftParams::Etale) => Ok(LiftedP2 {
            a1: lift_series(abar1, window)?,
            a2: lift_series(abar2, window)?,
            predicted_delta1: 0,
            predicted_delta2: 0,
        }),
        (DegenDataP2::B { abar1, abar2 }, LiftParams::Radicial { n2 }) => {
            if n2 <= 0 {
                return Err(Error::InvalidInput(format!("n2 = {n2} must be positive")));
            }
            if abar2.is_pth_power() {
                return Err(Error::NotPthPower);
            }
            let p = abar1.prime().pi64();
            Ok(LiftedP2 {
                a1: lift_series(abar1, window)?,
                a2: lift_series(abar2, window)?.shift(-p * n2, 0)?,
                predicted_delta1: 0,
                predicted_delta2: n2 * (p - 1),
            })
        }
        (DegenDataP2::C { abar1, gbar, cbar }, LiftParams::Balanced { n_prime })
        | (DegenDataP2::C { abar1, gbar, cbar }, LiftParams::Dominant { n_prime, .. }) => {
            let p = abar1.prime();
            let pp = p.pi64();
            if abar1.is_pth_power() {
                return Err(Error::NotPthPower);
            }
            if cbar.len() != pp as usize - 1 {
                return Err(Error::ArityMismatch { expected: pp as usize - 1, got: cbar.len() });
            }
            if n_prime <= 0 {
                return Err(Error::InvalidInput(format!("n′ = {n_prime} must be positive")));
            }
            let q = pp * (pp - 1) + 1;
            let (m, delta2) = match params {
                LiftParams::Dominant { m, .. } => {
                    let top = m * pp - n_prime * (pp - 1);
                    if top <= n_prime * q || top % pp != 0 {
                        return Err(Error::InvalidInput(format!(
                            "mp − n′(p−1) = {top} must exceed n′(p(p−1)+1) and be divisible by p"
                        )));
                    }
                    (m, top / pp * (pp - 1))
                }
                _ => {
                    if n_prime % pp != 0 {
                        return Err(Error::InvalidInput(format!("n′ = {n_prime} must be divisible by p")));
                    }
                    (n_prime * pp, n_prime / pp * q * (pp - 1))
                }
            };
            let a1 = lift_series(abar1, window)?;
            let mut f = BiElement::zero(p, window);
            let mut a1j = a1.clone();
            for c in cbar {
                f = f.add(&lift_series(c, window)?.frobenius().mul(&a1j)?)?;
                a1j = a1j.mul(&a1)?;
            }
            let a2 = f
                .shift(-pp * m, 0)?
                .add(&lift_series(gbar, window)?.shift(-pp * m + n_prime * (pp - 1), 0)?)?;
            Ok(LiftedP2 {
                a1: a1.shift(-n_prime * pp, 0)?,
                a2,
                predicted_delta1: n_prime * (pp - 1),
                predicted_delta2: delta2,
            })
        }
        _ => Err(Error::InvalidInput("lift parameters do not match the data kind".into())),
    }
}
