//! Length-2 Witt vectors in characteristic p with twisted group laws, the
//! isogenies F - I, and the torsor equations they define.

use std::fmt;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffseries::{BiElement, Coeff, PrimeChar};

/// `C(p,k)/p mod p` for k = 1..p-1, computed exactly before reduction.
pub fn carry_coefficients(p: PrimeChar) -> Vec<u32> {
    let pu = p.p() as u64;
    let mut binom = BigUint::from(1u32);
    let mut out = Vec::with_capacity(p.p() as usize - 1);
    for k in 1..pu {
        binom = binom * BigUint::from(pu - k + 1) / BigUint::from(k);
        assert!((&binom % pu) == BigUint::from(0u32), "C(p,k) divisible by p");
        let q = (&binom / pu) % pu;
        out.push(q.to_u32_digits().first().copied().unwrap_or(0));
    }
    out
}

fn powers<C: Coeff>(x: &C, n: u32) -> Result<Vec<C>> {
    let mut out = Vec::with_capacity(n as usize + 1);
    out.push(x.clone());
    for _ in 1..n {
        let next = out.last().expect("nonempty").try_mul(x)?;
        out.push(next);
    }
    Ok(out)
}

/// Σ_{k=1}^{p-1} (C(p,k)/p) x^k y^{p-k}, multiplied by π^scale_exp.
pub fn witt_carry<C: Coeff>(x: &C, y: &C, scale_exp: i64) -> Result<C> {
    if scale_exp < 0 {
        return Err(Error::ExponentUnderflow(format!("carry scale π^{scale_exp}")));
    }
    let p = x.prime();
    let pp = p.p();
    let xs = powers(x, pp - 1)?;
    let ys = powers(y, pp - 1)?;
    let mut acc = x.zero_like();
    for (idx, &c) in carry_coefficients(p).iter().enumerate() {
        let k = idx + 1;
        if c == 0 {
            continue;
        }
        let term = xs[k - 1].try_mul(&ys[pp as usize - k - 1])?.scale(c as i64);
        acc = acc.try_add(&term)?;
    }
    acc.pi_shift(scale_exp)
}

/// A Witt vector of length two on the twisted scheme W_{m1,m2}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WittVec2<C> {
    pub x1: C,
    pub x2: C,
    pub twist: (i64, i64),
}

fn check_twist(p: PrimeChar, twist: (i64, i64)) -> Result<()> {
    let (m1, m2) = twist;
    if m1 < 0 || m2 < 0 || m2 - p.pi64() * m1 < 0 {
        return Err(Error::InvalidTwist(twist));
    }
    Ok(())
}

impl<C: Coeff> WittVec2<C> {
    pub fn new(x1: C, x2: C, twist: (i64, i64)) -> Result<Self> {
        if x1.prime() != x2.prime() {
            return Err(Error::CharMismatch(x1.prime().p(), x2.prime().p()));
        }
        check_twist(x1.prime(), twist)?;
        Ok(WittVec2 { x1, x2, twist })
    }

    /// Untwisted vector, twist (0, 0).
    pub fn plain(x1: C, x2: C) -> Self {
        WittVec2 { x1, x2, twist: (0, 0) }
    }

    pub fn zero_like(&self) -> Self {
        WittVec2 { x1: self.x1.zero_like(), x2: self.x1.zero_like(), twist: self.twist }
    }

    pub fn prime(&self) -> PrimeChar {
        self.x1.prime()
    }

    fn scale_exp(&self) -> i64 {
        self.twist.1 - self.prime().pi64() * self.twist.0
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.twist != other.twist {
            return Err(Error::TwistMismatch(self.twist, other.twist));
        }
        let carry = witt_carry(&self.x1, &other.x1, self.scale_exp())?;
        Ok(WittVec2 {
            x1: self.x1.try_add(&other.x1)?,
            x2: self.x2.try_add(&other.x2)?.try_sub(&carry)?,
            twist: self.twist,
        })
    }

    pub fn neg(&self) -> Result<Self> {
        let minus = self.x1.neg();
        let carry = witt_carry(&self.x1, &minus, self.scale_exp())?;
        Ok(WittVec2 { x1: minus, x2: self.x2.neg().try_add(&carry)?, twist: self.twist })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg()?)
    }

    /// The Verschiebung x -> (0, x).
    pub fn verschiebung(x: C, twist: (i64, i64)) -> Result<Self> {
        let zero = x.zero_like();
        WittVec2::new(zero, x, twist)
    }

    /// The projection (x1, x2) -> x1.
    pub fn restriction(&self) -> &C {
        &self.x1
    }

    /// F - I_{m1,m2}: W_{m1,m2} -> W_{p m1, p m2}.
    pub fn isogeny_phi_m1m2(&self) -> Result<Self> {
        let p = self.prime();
        let pp = p.pi64();
        let (m1, m2) = self.twist;
        let x1p = self.x1.try_pow(p.p())?;
        let y1 = x1p.try_sub(&self.x1.pi_shift(m1 * (pp - 1))?)?;
        let mut y2 = self.x2.try_pow(p.p())?.try_sub(&self.x2.pi_shift(m2 * (pp - 1))?)?;
        let minus = self.x1.neg();
        let minus_pows = powers(&minus, p.p() - 1)?;
        let x1p_pows = powers(&x1p, p.p() - 1)?;
        for (idx, &c) in carry_coefficients(p).iter().enumerate() {
            let k = idx as i64 + 1;
            if c == 0 {
                continue;
            }
            let e = m2 * pp - m1 * (pp * k + pp - k);
            if e < 0 {
                return Err(Error::ExponentUnderflow(format!("π^{e} in F - I")));
            }
            let term = x1p_pows[idx].try_mul(&minus_pows[(pp - k - 1) as usize])?.scale(c as i64).pi_shift(e)?;
            y2 = y2.try_sub(&term)?;
        }
        Ok(WittVec2 { x1: y1, x2: y2, twist: (pp * m1, pp * m2) })
    }
}

impl WittVec2<BiElement> {
    /// Generic-fibre coordinates (x1/π^m1, x2/π^m2) on the untwisted Witt scheme.
    pub fn to_generic(&self) -> Result<Self> {
        Ok(WittVec2 {
            x1: self.x1.pi_shift(-self.twist.0)?,
            x2: self.x2.pi_shift(-self.twist.1)?,
            twist: (0, 0),
        })
    }

    /// Inverse of [`WittVec2::to_generic`] for the twist (m1, m2).
    pub fn from_generic(&self, twist: (i64, i64)) -> Result<Self> {
        check_twist(self.prime(), twist)?;
        Ok(WittVec2 { x1: self.x1.pi_shift(twist.0)?, x2: self.x2.pi_shift(twist.1)?, twist })
    }
}

/// x^p - π^{(p-1)n} x.
pub fn isogeny_phi_n<C: Coeff>(x: &C, n: i64) -> Result<C> {
    if n < 0 {
        return Err(Error::InvalidInput(format!("φ_n with n = {n}")));
    }
    let p = x.prime();
    x.try_pow(p.p())?.try_sub(&x.pi_shift((p.pi64() - 1) * n)?)
}

/// Finite flat group schemes appearing as structure groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSchemeTag {
    Mn { n: i64 },
    Wm1m2 { m1: i64, m2: i64 },
    Hm1m2 { m1: i64, m2: i64 },
    EtaleZpZ,
    EtaleZp2Z,
    AlphaP,
    Hk,
    Gk,
}

impl GroupSchemeTag {
    /// M_0 is the constant group Z/pZ.
    pub fn canonical(self) -> Self {
        match self {
            GroupSchemeTag::Mn { n: 0 } => GroupSchemeTag::EtaleZpZ,
            other => other,
        }
    }

    pub fn rank_exponent(self) -> usize {
        match self {
            GroupSchemeTag::Mn { .. } | GroupSchemeTag::EtaleZpZ | GroupSchemeTag::AlphaP => 1,
            _ => 2,
        }
    }

    /// The special fibre of an R-group scheme.
    pub fn special_fibre(self) -> Self {
        match self.canonical() {
            GroupSchemeTag::Mn { .. } => GroupSchemeTag::AlphaP,
            GroupSchemeTag::Hm1m2 { m1: 0, m2: 0 } => GroupSchemeTag::EtaleZp2Z,
            GroupSchemeTag::Hm1m2 { m1: 0, .. } => GroupSchemeTag::Hk,
            GroupSchemeTag::Hm1m2 { .. } => GroupSchemeTag::Gk,
            other => other,
        }
    }
}

impl fmt::Display for GroupSchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.canonical() {
            GroupSchemeTag::Mn { n } => write!(f, "M_{n}"),
            GroupSchemeTag::Wm1m2 { m1, m2 } => write!(f, "W_{{{m1},{m2}}}"),
            GroupSchemeTag::Hm1m2 { m1, m2 } => write!(f, "H_{{{m1},{m2}}}"),
            GroupSchemeTag::EtaleZpZ => write!(f, "Z/pZ"),
            GroupSchemeTag::EtaleZp2Z => write!(f, "Z/p²Z"),
            GroupSchemeTag::AlphaP => write!(f, "α_p"),
            GroupSchemeTag::Hk => write!(f, "H_k"),
            GroupSchemeTag::Gk => write!(f, "G_k"),
        }
    }
}

/// One line X-side = rhs of a torsor presentation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equation {
    pub lhs: String,
    pub rhs: BiElement,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquationRecord {
    pub group: GroupSchemeTag,
    pub equations: Vec<Equation>,
}

impl fmt::Display for EquationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<&str> = self.equations.iter().map(|e| e.text.as_str()).collect();
        write!(f, "[{}] {}", self.group, lines.join("; "))
    }
}

fn pi_term(e: i64, var: &str) -> String {
    match e {
        0 => var.to_string(),
        1 => format!("π·{var}"),
        e => format!("π^{e}·{var}"),
    }
}

fn carry_text(p: i64, m1: i64, m2: i64) -> String {
    let terms: Vec<String> = (1..p)
        .map(|k| {
            let e = p * m2 - m1 * (p * k + p - k);
            let pi = if e == 0 { String::new() } else { format!("π^{e}·") };
            format!("C({p},{k})/{p}·{pi}T1^{}·(−T1)^{}", p * k, p - k)
        })
        .collect();
    terms.join(" + ")
}

/// The torsor equations attached to a structure group and right-hand sides.
pub fn torsor_equations(tag: GroupSchemeTag, rhs: &[BiElement]) -> Result<EquationRecord> {
    let tag = tag.canonical();
    let expected = match tag {
        GroupSchemeTag::Mn { .. } | GroupSchemeTag::EtaleZpZ | GroupSchemeTag::AlphaP => 1,
        _ => 2,
    };
    if rhs.len() != expected {
        return Err(Error::ArityMismatch { expected, got: rhs.len() });
    }
    let p = rhs[0].prime().pi64();
    let eq = |lhs: String, r: &BiElement| Equation { text: format!("{lhs} = {r}"), lhs, rhs: r.clone() };
    let equations = match tag {
        GroupSchemeTag::EtaleZpZ => vec![eq(format!("X^{p} − X"), &rhs[0])],
        GroupSchemeTag::Mn { n } => vec![eq(format!("X^{p} − {}", pi_term(n * (p - 1), "X")), &rhs[0])],
        GroupSchemeTag::AlphaP => vec![eq(format!("x^{p}"), &rhs[0])],
        GroupSchemeTag::Hk => vec![eq(format!("t1^{p} − t1"), &rhs[0]), eq(format!("t2^{p}"), &rhs[1])],
        GroupSchemeTag::Gk => vec![eq(format!("t1^{p}"), &rhs[0]), eq(format!("t2^{p}"), &rhs[1])],
        GroupSchemeTag::EtaleZp2Z => vec![
            eq(format!("T1^{p} − T1"), &rhs[0]),
            eq(format!("T2^{p} − T2 − ({})", carry_text(p, 0, 0)), &rhs[1]),
        ],
        GroupSchemeTag::Wm1m2 { m1, m2 } | GroupSchemeTag::Hm1m2 { m1, m2 } => vec![
            eq(format!("T1^{p} − {}", pi_term(m1 * (p - 1), "T1")), &rhs[0]),
            eq(
                format!("T2^{p} − {} − ({})", pi_term(m2 * (p - 1), "T2"), carry_text(p, m1, m2)),
                &rhs[1],
            ),
        ],
    };
    Ok(EquationRecord { group: tag, equations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ffseries::ResidueSeries;
    use proptest::prelude::*;

    fn f(p: u32) -> PrimeChar {
        PrimeChar::new(p).unwrap()
    }

    #[test]
    fn carry_tables() {
        assert_eq!(carry_coefficients(f(2)), vec![1]);
        assert_eq!(carry_coefficients(f(3)), vec![1, 1]);
        assert_eq!(carry_coefficients(f(5)), vec![1, 2, 2, 1]);
    }

    #[test]
    fn carry_p2_is_product() {
        let p = f(2);
        let x = ResidueSeries::monomial(p, 1, 1);
        let y = ResidueSeries::new(p, [(-1, 1), (2, 1)], None);
        assert_eq!(witt_carry(&x, &y, 0).unwrap(), &x * &y);
        assert!(witt_carry(&x, &y, -1).is_err());
    }

    #[test]
    fn doubling_in_char_two() {
        let p = f(2);
        let t = ResidueSeries::monomial(p, 1, 1);
        let u = WittVec2::plain(t.clone(), ResidueSeries::zero(p));
        let s = u.add(&u).unwrap();
        assert!(s.x1.is_exact_zero());
        assert_eq!(s.x2, ResidueSeries::monomial(p, 1, 2));
    }

    #[test]
    fn phi_n_examples() {
        let p = f(2);
        let x = BiElement::boundary(p, [(0, 1, 1)], None);
        assert_eq!(isogeny_phi_n(&x, 1).unwrap(), BiElement::boundary(p, [(0, 2, 1), (1, 1, -1)], None));
        let p3 = f(3);
        let y = BiElement::boundary(p3, [(0, -1, 1)], None);
        assert_eq!(isogeny_phi_n(&y, 0).unwrap(), BiElement::boundary(p3, [(0, -3, 1), (0, -1, -1)], None));
        assert!(isogeny_phi_n(&BiElement::zero(p3, None), 2).unwrap().is_exact_zero());
    }

    #[test]
    fn phi_m1m2_exponents_p2() {
        let p = f(2);
        let x1 = BiElement::boundary(p, [(0, 1, 1)], None);
        let x2 = BiElement::boundary(p, [(0, 3, 1)], None);
        let u = WittVec2::new(x1, x2, (0, 1)).unwrap();
        let v = u.isogeny_phi_m1m2().unwrap();
        assert_eq!(v.twist, (0, 2));
        // x2² − π x2 + π² x1² · x1 (signs collapse in characteristic 2)
        assert_eq!(v.x2, BiElement::boundary(p, [(0, 6, 1), (1, 3, 1), (2, 3, 1)], None));
    }

    #[test]
    fn torsor_equation_shapes() {
        let p = f(3);
        let a = BiElement::boundary(p, [(0, 1, 1)], None);
        let r = torsor_equations(GroupSchemeTag::Mn { n: 2 }, std::slice::from_ref(&a)).unwrap();
        assert_eq!(r.equations[0].lhs, "X^3 − π^4·X");
        let r = torsor_equations(GroupSchemeTag::Mn { n: 0 }, std::slice::from_ref(&a)).unwrap();
        assert_eq!(r.group, GroupSchemeTag::EtaleZpZ);
        assert_eq!(r.equations[0].lhs, "X^3 − X");
        let r = torsor_equations(GroupSchemeTag::Hm1m2 { m1: 1, m2: 4 }, &[a.clone(), a.clone()]).unwrap();
        assert_eq!(r.equations.len(), 2);
        assert!(r.equations[0].lhs.starts_with("T1^3 − π^2·T1"));
        assert!(torsor_equations(GroupSchemeTag::EtaleZpZ, &[a.clone(), a]).is_err());
    }

    #[test]
    fn special_fibre_tags() {
        assert_eq!(GroupSchemeTag::Hm1m2 { m1: 0, m2: 2 }.special_fibre(), GroupSchemeTag::Hk);
        assert_eq!(GroupSchemeTag::Hm1m2 { m1: 1, m2: 4 }.special_fibre(), GroupSchemeTag::Gk);
        assert_eq!(GroupSchemeTag::Mn { n: 3 }.special_fibre(), GroupSchemeTag::AlphaP);
    }

    fn series(p: PrimeChar) -> impl Strategy<Value = ResidueSeries> {
        proptest::collection::vec((-3i64..4, 0i64..5), 0..4).prop_map(move |t| ResidueSeries::new(p, t, None))
    }

    fn bi(p: PrimeChar) -> impl Strategy<Value = BiElement> {
        proptest::collection::vec((0i64..3, -2i64..3, 0i64..5), 0..3).prop_map(move |t| BiElement::boundary(p, t, None))
    }

    fn ps() -> impl Strategy<Value = PrimeChar> {
        prop_oneof![Just(f(2)), Just(f(3)), Just(f(5))]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn phi_is_homomorphism(
            (u1, u2, v1, v2, m1, extra) in ps().prop_flat_map(|p| (bi(p), bi(p), bi(p), bi(p), 0i64..2, 0i64..2))
        ) {
            let p = u1.prime().pi64();
            let twist = (m1, p * m1 + extra);
            let u = WittVec2::new(u1, u2, twist).unwrap();
            let v = WittVec2::new(v1, v2, twist).unwrap();
            let lhs = u.add(&v).unwrap().isogeny_phi_m1m2().unwrap();
            let rhs = u.isogeny_phi_m1m2().unwrap().add(&v.isogeny_phi_m1m2().unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn group_axioms_residue(
            (a, b, c, d, e, g) in ps().prop_flat_map(|p| (series(p), series(p), series(p), series(p), series(p), series(p)))
        ) {
            let u = WittVec2::plain(a, b);
            let v = WittVec2::plain(c, d);
            let w = WittVec2::plain(e, g);
            prop_assert_eq!(u.add(&v).unwrap(), v.add(&u).unwrap());
            prop_assert_eq!(u.add(&v).unwrap().add(&w).unwrap(), u.add(&v.add(&w).unwrap()).unwrap());
            prop_assert_eq!(u.add(&u.zero_like()).unwrap(), u.clone());
            let z = u.add(&u.neg().unwrap()).unwrap();
            prop_assert!(z.x1.is_exact_zero() && z.x2.is_exact_zero());
        }

        #[test]
        fn generic_coordinates_round_trip((a, b, m1, extra) in ps().prop_flat_map(|p| (bi(p), bi(p), 0i64..3, 0i64..3))) {
            let p = a.prime().pi64();
            let u = WittVec2::new(a, b, (m1, p * m1 + extra)).unwrap();
            let g = u.to_generic().unwrap();
            prop_assert_eq!(g.from_generic(u.twist).unwrap(), u);
        }
    }
}
