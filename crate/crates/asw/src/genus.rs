//! Vanishing-cycle bookkeeping: local Riemann-Hurwitz formulas, closed-form genera
//! at smooth and double germ points, and the variation of the different along a
//! double point.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffseries::PrimeChar;

/// The reduction of a cover above one boundary of a germ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryEntry {
    /// Rank-p torsor of type (n, m).
    P { n: i64, m: i64 },
    /// Rank-p² cover with irreducible special fibre, type {(n1, m1), (n2, m2)}.
    P2 { n1: i64, m1: i64, n2: i64, m2: i64 },
    /// Rank-p² cover with p components, each of rank-p type (n, m).
    PComponents { n: i64, m: i64 },
    /// Completely split.
    Split,
}

impl BoundaryEntry {
    fn check(&self, p: i64) -> Result<()> {
        let bad = |m: i64| m != 0 && m.rem_euclid(p) == 0;
        let ok = match *self {
            BoundaryEntry::P { n, m } | BoundaryEntry::PComponents { n, m } => n >= 0 && !bad(m),
            BoundaryEntry::P2 { n1, m1, n2, m2 } => n1 >= 0 && n2 >= 0 && !bad(m1) && !bad(m2),
            BoundaryEntry::Split => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("malformed boundary type {self:?}")))
        }
    }

    /// Number of special-fibre branches above this boundary.
    pub fn branches(&self, rank: Rank, p: i64) -> i64 {
        match (self, rank) {
            (BoundaryEntry::Split, Rank::P) => p,
            (BoundaryEntry::Split, Rank::P2) => p * p,
            (BoundaryEntry::PComponents { .. }, _) => p,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BoundaryProfile {
    pub entries: Vec<BoundaryEntry>,
}

pub(crate) fn halve(num: i64) -> Result<i64> {
    if num % 2 != 0 {
        return Err(Error::NonIntegralGenus(num));
    }
    if num < 0 {
        return Err(Error::NegativeGenus(num / 2));
    }
    Ok(num / 2)
}

/// 2g_y − 2 = p(2g_x − 2) + d_η − d_s for a rank-p cover.
pub fn local_rh_p(p: PrimeChar, g_x: i64, d_eta: i64, profile: &BoundaryProfile) -> Result<i64> {
    let pp = p.pi64();
    if g_x < 0 {
        return Err(Error::InvalidInput(format!("g_x = {g_x} is negative")));
    }
    let mut d_s = 0;
    for e in &profile.entries {
        e.check(pp)?;
        match *e {
            BoundaryEntry::P { n, m } if n != 0 || m != 0 => d_s += (-m - 1) * (pp - 1),
            BoundaryEntry::P { .. } | BoundaryEntry::Split => {}
            _ => return Err(Error::InvalidInput(format!("{e:?} is not a rank-p boundary type"))),
        }
    }
    halve(pp * (2 * g_x - 2) + d_eta - d_s + 2)
}

/// 2g_y − 2 = p²(2g_x − 2) + d_η − d_s for a rank-p² cover, with
/// d_η = p·d_η1 + d_η2 and d_s = p·d_s1 + d_s2.
pub fn local_rh_p2(p: PrimeChar, g_x: i64, d_eta1: i64, d_eta2: i64, profile: &BoundaryProfile) -> Result<i64> {
    let pp = p.pi64();
    if g_x < 0 {
        return Err(Error::InvalidInput(format!("g_x = {g_x} is negative")));
    }
    let (mut d_s1, mut d_s2) = (0, 0);
    for e in &profile.entries {
        e.check(pp)?;
        match *e {
            BoundaryEntry::P2 { m1, m2, .. } => {
                d_s1 += (-m1 - 1) * (pp - 1);
                d_s2 += (-m2 - 1) * (pp - 1);
            }
            BoundaryEntry::PComponents { m, .. } => d_s2 += (-m - 1) * (pp - 1),
            BoundaryEntry::Split => {}
            BoundaryEntry::P { .. } => {
                return Err(Error::InvalidInput(format!("{e:?} is not a rank-p² boundary type")))
            }
        }
    }
    let d_eta = pp * d_eta1 + d_eta2;
    halve(pp * pp * (2 * g_x - 2) + d_eta - (pp * d_s1 + d_s2) + 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rank {
    P,
    P2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum GermKind {
    Smooth,
    Double { thickness: i64 },
}

/// A cover of a smooth or double germ: d_η = r(p−1) and the boundary reductions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GermGenusQuery {
    pub p: u32,
    pub germ: GermKind,
    pub rank: Rank,
    pub r: i64,
    pub boundaries: Vec<BoundaryEntry>,
    /// Optional expected branch count, checked against the boundary data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branches: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Smooth,
    OrdinaryDouble,
    Singular,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Smooth => "smooth",
            Verdict::OrdinaryDouble => "ordinary double point",
            Verdict::Singular => "singular",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenusReport {
    pub g_y: i64,
    pub verdict: Verdict,
    pub branches: i64,
    /// The closed form used, as an expression in r, p and the boundary data.
    pub formula: String,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GenusOptions {
    /// Use the printed (r−2)(p−2)/2 for rank-p double points split on both sides,
    /// and require the printed equality for the p²+p branch case.
    pub strict_paper: bool,
}

fn closed_form(numerator: i64, factor: i64, bound: i64, name: &str) -> Result<i64> {
    if bound < 0 {
        return Err(Error::HypothesisViolated(format!("{name} = {bound} must be ≥ 0")));
    }
    halve(numerator * factor)
}

/// Genus of the closed point upstairs from the closed-form formulas.
pub fn germ_genus(q: &GermGenusQuery) -> Result<GenusReport> {
    germ_genus_with(q, GenusOptions::default())
}

pub fn germ_genus_with(q: &GermGenusQuery, opts: GenusOptions) -> Result<GenusReport> {
    use BoundaryEntry as B;
    let p = PrimeChar::new(q.p)?;
    let pp = p.pi64();
    let r = q.r;
    if r < 0 {
        return Err(Error::InvalidInput(format!("r = {r} is negative")));
    }
    for b in &q.boundaries {
        b.check(pp)?;
        let fits = matches!(
            (q.rank, b),
            (Rank::P, B::P { .. } | B::Split) | (Rank::P2, B::P2 { .. } | B::PComponents { .. } | B::Split)
        );
        if !fits {
            return Err(Error::InvalidInput(format!("{b:?} does not match the rank of the cover")));
        }
    }
    let expected = match q.germ {
        GermKind::Smooth => 1,
        GermKind::Double { .. } => 2,
    };
    if q.boundaries.len() != expected {
        return Err(Error::InvalidInput(format!(
            "{} boundaries given, the germ has {expected}",
            q.boundaries.len()
        )));
    }
    let branches: i64 = q.boundaries.iter().map(|b| b.branches(q.rank, pp)).sum();
    if let Some(b) = q.branches {
        if b != branches {
            return Err(Error::InvalidInput(format!("{b} branches given, the boundary data give {branches}")));
        }
    }
    let mut notes = Vec::new();
    let f = pp - 1;
    let (g_y, formula) = match (q.germ, q.rank) {
        (GermKind::Smooth, Rank::P) => match q.boundaries[0] {
            B::P { m, .. } => (closed_form(r + m - 1, f, r + m - 1, "r + m − 1")?, "(r+m−1)(p−1)/2"),
            _ => (closed_form(r - 2, f, r - 2, "r − 2")?, "(r−2)(p−1)/2"),
        },
        (GermKind::Smooth, Rank::P2) => match q.boundaries[0] {
            B::P2 { m1, m2, .. } => {
                let v = r + pp * m1 + m2 - pp - 1;
                (closed_form(v, f, v, "r + pm1 + m2 − p − 1")?, "(r+pm1+m2−p−1)(p−1)/2")
            }
            B::PComponents { m, .. } => {
                let v = r + pp * m - pp - 2;
                (closed_form(v, f, v, "r + pm − p − 2")?, "(r+pm−p−2)(p−1)/2")
            }
            _ => {
                let v = r - 2 * pp - 2;
                (closed_form(v, f, v, "r − 2p − 2")?, "(r−2p−2)(p−1)/2")
            }
        },
        (GermKind::Double { .. }, Rank::P) => {
            let (a, b) = order_split_first(q.boundaries[0], q.boundaries[1]);
            match (a, b) {
                (B::P { m: m1, .. }, B::P { m: m2, .. }) => {
                    let v = r + m1 + m2;
                    (closed_form(v, f, v, "r + m1 + m2")?, "(r+m1+m2)(p−1)/2")
                }
                (B::Split, B::P { m: m2, .. }) => {
                    let v = r + m2 - 1;
                    (closed_form(v, f, v, "r + m2 − 1")?, "(r+m2−1)(p−1)/2")
                }
                _ => {
                    if opts.strict_paper {
                        notes.push("printed factor (p−2) used instead of (p−1)".into());
                        (closed_form(r - 2, pp - 2, r - 2, "r − 2")?, "(r−2)(p−2)/2")
                    } else {
                        notes.push("the printed form of this case has the factor (p−2)".into());
                        (closed_form(r - 2, f, r - 2, "r − 2")?, "(r−2)(p−1)/2")
                    }
                }
            }
        }
        (GermKind::Double { .. }, Rank::P2) => {
            let (a, b) = order_split_first(q.boundaries[0], q.boundaries[1]);
            match (a, b) {
                (B::P2 { m1: m11, m2: m12, .. }, B::P2 { m1: m21, m2: m22, .. }) => {
                    let v = r + pp * m11 + pp * m21 + m12 + m22;
                    (closed_form(v, f, v, "r + pm11 + pm21 + m12 + m22")?, "(r+pm11+pm21+m12+m22)(p−1)/2")
                }
                (B::PComponents { m: m1, .. }, B::P2 { m1: m21, m2: m22, .. }) => {
                    let v = r + pp * m21 + pp + m1 + m22;
                    (closed_form(v, f, v, "r + pm21 + p + m1 + m22")?, "(r+pm21+p+m1+m22)(p−1)/2")
                }
                (B::PComponents { m: m21, .. }, B::PComponents { m: m22, .. }) => {
                    let v = r + m22 + m21 - 2 * pp;
                    (closed_form(v, f, v, "r + m22 + m21 − 2p")?, "(r+m22+m21−2p)(p−1)/2")
                }
                (B::Split, B::P2 { m1: m21, m2: m22, .. }) => {
                    let v = r + pp * m21 + m22 - pp - 1;
                    (closed_form(v, f, v, "r + pm21 + m22 − p − 1")?, "(r+pm21+m22−p−1)(p−1)/2")
                }
                (B::Split, B::PComponents { m: m22, .. }) => {
                    let v = r + m22 - 2 * pp - 1;
                    notes.push("this case is stated with r + m22 − 2p − 1 = 0 rather than ≥ 0".into());
                    if opts.strict_paper && v != 0 {
                        return Err(Error::HypothesisViolated(format!("r + m22 − 2p − 1 = {v} must be 0")));
                    }
                    (closed_form(v, f, v, "r + m22 − 2p − 1")?, "(r+m22−2p−1)(p−1)/2")
                }
                _ => {
                    let v = r - 2 * pp - 2;
                    (closed_form(v, f, v, "r − 2p − 2")?, "(r−2p−2)(p−1)/2")
                }
            }
        }
    };
    let verdict = match q.germ {
        GermKind::Smooth if g_y == 0 && branches == 1 => Verdict::Smooth,
        GermKind::Double { thickness } if g_y == 0 && branches == 2 => {
            let d = match q.rank {
                Rank::P => pp,
                Rank::P2 => pp * pp,
            };
            if thickness <= 0 || thickness % d != 0 {
                return Err(Error::HypothesisViolated(format!(
                    "g_y = 0 at a double point needs thickness divisible by {d}, got {thickness}"
                )));
            }
            Verdict::OrdinaryDouble
        }
        _ => Verdict::Singular,
    };
    Ok(GenusReport { g_y, verdict, branches, formula: formula.into(), notes })
}

fn order_split_first(a: BoundaryEntry, b: BoundaryEntry) -> (BoundaryEntry, BoundaryEntry) {
    let rank = |e: &BoundaryEntry| match e {
        BoundaryEntry::Split => 0,
        BoundaryEntry::PComponents { .. } => 1,
        _ => 2,
    };
    if rank(&b) < rank(&a) {
        (b, a)
    } else {
        (a, b)
    }
}

/// δ along the blow-up chain of a double point of thickness pt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferentProfile {
    pub p: u32,
    pub m: i64,
    /// δ(0), δ(1), ..., δ(t).
    pub values: Vec<i64>,
    pub increasing: bool,
}

impl DifferentProfile {
    pub fn at(&self, t: i64) -> Option<i64> {
        usize::try_from(t).ok().and_then(|i| self.values.get(i)).copied()
    }
}

/// δ(t′) = δ(0) + m(p−1)t′, checked against the given endpoint δ(t).
pub fn different_profile(p: PrimeChar, delta_0: i64, delta_t: i64, m: i64, t: i64) -> Result<DifferentProfile> {
    let pp = p.pi64();
    if m <= 0 {
        return Err(Error::InvalidInput(format!("m = {m} must be positive")));
    }
    if t < 0 || delta_0 < 0 {
        return Err(Error::InvalidInput(format!("need t ≥ 0 and δ(0) ≥ 0, got t = {t}, δ(0) = {delta_0}")));
    }
    if delta_t - delta_0 != m * (pp - 1) * t {
        return Err(Error::InvalidInput(format!(
            "δ(t) − δ(0) = {} differs from m(p−1)t = {}",
            delta_t - delta_0,
            m * (pp - 1) * t
        )));
    }
    let values: Vec<i64> = (0..=t).map(|s| delta_0 + m * (pp - 1) * s).collect();
    let increasing = values.windows(2).all(|w| w[0] < w[1]);
    Ok(DifferentProfile { p: p.p(), m, values, increasing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(p: u32) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    fn smooth(p: u32, rank: Rank, r: i64, b: BoundaryEntry) -> GermGenusQuery {
        GermGenusQuery { p, germ: GermKind::Smooth, rank, r, boundaries: vec![b], branches: None }
    }

    fn double(p: u32, rank: Rank, e: i64, r: i64, a: BoundaryEntry, b: BoundaryEntry) -> GermGenusQuery {
        GermGenusQuery { p, germ: GermKind::Double { thickness: e }, rank, r, boundaries: vec![a, b], branches: None }
    }

    fn profile(e: &[BoundaryEntry]) -> BoundaryProfile {
        BoundaryProfile { entries: e.to_vec() }
    }

    #[test]
    fn rh_p_examples() {
        for p in [2u32, 3, 5] {
            let pp = p as i64;
            for m in [1i64, 2, 4, 7] {
                if m % pp == 0 {
                    continue;
                }
                let prof = profile(&[BoundaryEntry::P { n: 0, m: -m }]);
                assert_eq!(local_rh_p(f(p), 0, (m + 1) * (pp - 1), &prof), Ok(0));
                let mp = m + 3;
                if mp % pp != 0 {
                    let g = local_rh_p(f(p), 0, (mp + 1) * (pp - 1), &prof).unwrap();
                    assert_eq!(2 * g, (mp - m) * (pp - 1));
                }
            }
            for r in (2..8).filter(|r| r * (pp - 1) % 2 == 0) {
                let g = local_rh_p(f(p), 0, r * (pp - 1), &profile(&[BoundaryEntry::Split])).unwrap();
                assert_eq!(2 * g - 2, -2 * pp + r * (pp - 1));
            }
        }
    }

    #[test]
    fn rh_errors() {
        let prof = profile(&[BoundaryEntry::P { n: 0, m: -1 }]);
        assert_eq!(local_rh_p(f(3), 0, 1, &prof), Err(Error::NonIntegralGenus(-3)));
        assert!(matches!(local_rh_p(f(3), 0, 0, &prof), Err(Error::NegativeGenus(_))));
    }

    #[test]
    fn rh_p2_examples() {
        for p in [2u32, 3, 5] {
            let pp = p as i64;
            let (m1, m2) = (-1i64, -7i64);
            let r = 31;
            let g = local_rh_p2(f(p), 0, 0, r * (pp - 1), &profile(&[BoundaryEntry::P2 { n1: 0, m1, n2: 0, m2 }]));
            let v = r + pp * m1 + m2 - pp - 1;
            if v * (pp - 1) % 2 == 0 {
                assert_eq!(g.unwrap() * 2, v * (pp - 1));
            }
            let r = 2 * pp + 2;
            assert_eq!(local_rh_p2(f(p), 0, 0, r * (pp - 1), &profile(&[BoundaryEntry::Split])), Ok(0));
            let r = 2 * pp + 6;
            let g = local_rh_p2(f(p), 0, 0, r * (pp - 1), &profile(&[BoundaryEntry::Split])).unwrap();
            assert_eq!(2 * g, (r - 2 * pp - 2) * (pp - 1));
        }
    }

    #[test]
    fn germ_genus_examples() {
        for p in [2u32, 3, 5] {
            let pp = p as i64;
            let rep = germ_genus(&smooth(p, Rank::P, 0, BoundaryEntry::P { n: 2, m: 1 })).unwrap();
            assert_eq!((rep.g_y, rep.verdict), (0, Verdict::Smooth));
            let rep = germ_genus(&double(
                p,
                Rank::P,
                pp * 3,
                0,
                BoundaryEntry::P { n: 0, m: -1 },
                BoundaryEntry::P { n: 3, m: 1 },
            ))
            .unwrap();
            assert_eq!((rep.g_y, rep.verdict), (0, Verdict::OrdinaryDouble));
            let rep =
                germ_genus(&smooth(p, Rank::P2, 0, BoundaryEntry::P2 { n1: pp, m1: 1, n2: pp * pp, m2: 1 })).unwrap();
            assert_eq!((rep.g_y, rep.verdict), (0, Verdict::Smooth));
            for m in [1i64, 3, 7] {
                if m % pp == 0 || p == 2 {
                    continue;
                }
                let rep = germ_genus(&smooth(p, Rank::P, m + 2, BoundaryEntry::P { n: 0, m: -m })).unwrap();
                assert_eq!(2 * rep.g_y, pp - 1);
                assert_eq!(rep.verdict, Verdict::Singular);
            }
        }
    }

    #[test]
    fn negative_bound_names_inequality() {
        let e = germ_genus(&smooth(3, Rank::P, 0, BoundaryEntry::P { n: 0, m: -2 })).unwrap_err();
        assert_eq!(e, Error::HypothesisViolated("r + m − 1 = -3 must be ≥ 0".into()));
    }

    #[test]
    fn double_split_variants() {
        let q = double(5, Rank::P, 5, 6, BoundaryEntry::Split, BoundaryEntry::Split);
        let rep = germ_genus(&q).unwrap();
        assert_eq!(rep.g_y, 8);
        assert_eq!(rep.branches, 10);
        assert!(!rep.notes.is_empty());
        let strict = germ_genus_with(&q, GenusOptions { strict_paper: true }).unwrap();
        assert_eq!(strict.g_y, 6);
        assert_eq!(local_rh_p(f(5), 0, 6 * 4, &profile(&[BoundaryEntry::Split, BoundaryEntry::Split])), Ok(8));
    }

    #[test]
    fn p2_double_remaining_cases() {
        let p = 3u32;
        let pp = 3i64;
        let q = double(p, Rank::P2, 9, 9, BoundaryEntry::Split, BoundaryEntry::PComponents { n: 0, m: -2 });
        let rep = germ_genus(&q).unwrap();
        assert_eq!(rep.g_y, 0);
        assert_eq!(rep.branches, pp * pp + pp);
        assert!(germ_genus_with(&q, GenusOptions { strict_paper: true }).is_ok());
        let q = double(p, Rank::P2, 9, 10, BoundaryEntry::Split, BoundaryEntry::PComponents { n: 0, m: -2 });
        assert!(germ_genus_with(&q, GenusOptions { strict_paper: true }).is_err());
        assert_eq!(germ_genus(&q).unwrap().g_y, 1);
        let both = double(p, Rank::P2, 9, 8, BoundaryEntry::Split, BoundaryEntry::Split);
        assert_eq!(germ_genus(&both).unwrap().g_y, 0);
        assert_eq!(germ_genus(&both).unwrap().branches, 2 * pp * pp);
    }

    #[test]
    fn thickness_divisibility() {
        let q = double(3, Rank::P, 4, 0, BoundaryEntry::P { n: 0, m: -1 }, BoundaryEntry::P { n: 1, m: 1 });
        assert!(matches!(germ_genus(&q), Err(Error::HypothesisViolated(_))));
    }

    #[test]
    fn branch_count_checked() {
        let mut q = smooth(3, Rank::P, 4, BoundaryEntry::Split);
        q.branches = Some(3);
        assert_eq!(germ_genus(&q).unwrap().g_y, 2);
        q.branches = Some(1);
        assert!(germ_genus(&q).is_err());
    }

    #[test]
    fn different_examples() {
        let d = different_profile(f(2), 0, 3, 1, 3).unwrap();
        assert_eq!(d.values, vec![0, 1, 2, 3]);
        assert!(d.increasing);
        let d = different_profile(f(3), 4, 8, 2, 1).unwrap();
        assert_eq!(d.values, vec![4, 8]);
        assert!(different_profile(f(3), 0, 5, 1, 2).is_err());
        assert_eq!(different_profile(f(3), 2, 2, 1, 0).unwrap().values, vec![2]);
    }

    proptest! {
        #[test]
        fn different_affine(p in prop_oneof![Just(2u32), Just(3), Just(5)], d0 in 0i64..20, m in 1i64..9, t in 0i64..12, t1 in 0i64..12, t2 in 0i64..12) {
            let pp = p as i64;
            let d = different_profile(f(p), d0, d0 + m * (pp - 1) * t, m, t).unwrap();
            let (a, b) = (t1.min(t2).min(t), t1.max(t2).min(t));
            prop_assert_eq!(d.at(b).unwrap(), d.at(a).unwrap() + m * (pp - 1) * (b - a));
            prop_assert!(d.at(a).unwrap() <= d.at(b).unwrap());
        }

        #[test]
        fn closed_forms_match_rh_rank_p(p in prop_oneof![Just(2u32), Just(3), Just(5)], r in 0i64..30, n1 in 0i64..4, m1 in -9i64..9, n2 in 0i64..4, m2 in -9i64..9) {
            let pp = p as i64;
            prop_assume!(m1 % pp != 0 && m2 % pp != 0);
            let a = BoundaryEntry::P { n: n1, m: m1 };
            let b = BoundaryEntry::P { n: n2, m: m2 };
            let q = smooth(p, Rank::P, r, a);
            let rh = local_rh_p(f(p), 0, r * (pp - 1), &profile(&[a]));
            match germ_genus(&q) {
                Ok(rep) => prop_assert_eq!(Ok(rep.g_y), rh),
                Err(_) => prop_assert!(rh.is_err()),
            }
            let q = double(p, Rank::P, pp * 7, r, a, b);
            let rh = local_rh_p(f(p), 0, r * (pp - 1), &profile(&[a, b]));
            match germ_genus(&q) {
                Ok(rep) => prop_assert_eq!(Ok(rep.g_y), rh),
                Err(Error::HypothesisViolated(_)) if rh == Ok(0) => {}
                Err(_) => prop_assert!(rh.is_err()),
            }
        }

        #[test]
        fn closed_forms_match_rh_rank_p2(p in prop_oneof![Just(2u32), Just(3)], r in 0i64..40, m11 in -5i64..5, m12 in -20i64..20, m21 in -5i64..5, m22 in -20i64..20) {
            let pp = p as i64;
            let bump = |m: i64| if m % pp == 0 { m + 1 } else { m };
            let (m11, m12, m21, m22) = (bump(m11), bump(m12), bump(m21), bump(m22));
            let a = BoundaryEntry::P2 { n1: 0, m1: m11, n2: 0, m2: m12 };
            let b = BoundaryEntry::P2 { n1: 1, m1: m21, n2: 2, m2: m22 };
            for (q, prof) in [
                (smooth(p, Rank::P2, r, a), profile(&[a])),
                (double(p, Rank::P2, pp * pp * 5, r, a, b), profile(&[a, b])),
                (double(p, Rank::P2, pp * pp * 5, r, BoundaryEntry::Split, b), profile(&[BoundaryEntry::Split, b])),
            ] {
                let rh = local_rh_p2(f(p), 0, 0, r * (pp - 1), &prof);
                match germ_genus(&q) {
                    Ok(rep) => prop_assert_eq!(Ok(rep.g_y), rh),
                    Err(_) => prop_assert!(rh.is_err()),
                }
            }
        }
    }
}
