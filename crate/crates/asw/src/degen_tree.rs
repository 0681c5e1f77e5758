//! Trees of degeneration data: validation, genus, DOT export and realization
//! by local models glued along shared boundaries.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ffseries::{BiElement, PrimeChar, ResidueSeries};
use crate::genus::{halve, Rank};
use crate::torsor_p::{conductor_at_point, normalize_boundary_p, DegTypeP, Point, RationalFn, RingKind, TorsorKind};
use crate::torsor_p2::{
    classify_boundary_p2, is_admissible_pair, lift_degen_data_on, lift_params_for, satisfies_condition_star,
    DegTypeP2, DegenDataP2, SplitLevel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelType {
    pub n: i64,
    pub m: i64,
}

/// Data of the germ being degenerated: number of branch points and boundary type.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Header {
    pub r: i64,
    pub types: Vec<LevelType>,
}

/// Torsor over a vertex P¹, given by reduced functions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Etale { f: RationalFn },
    Radicial { f: RationalFn },
    /// Étale by étale: Witt vector (u1, u2).
    A { u1: RationalFn, u2: RationalFn },
    /// Étale by α_p.
    B { u1: RationalFn, u2: RationalFn },
    /// α_p by α_p: (u1, g) and c_1..c_{p−1}.
    C { u1: RationalFn, g: RationalFn, c: Vec<RationalFn> },
}

impl Payload {
    fn functions(&self) -> Vec<&RationalFn> {
        match self {
            Payload::Etale { f } | Payload::Radicial { f } => vec![f],
            Payload::A { u1, u2 } | Payload::B { u1, u2 } => vec![u1, u2],
            Payload::C { u1, g, c } => [u1, g].into_iter().chain(c.iter()).collect(),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Payload::Etale { .. } => "étale",
            Payload::Radicial { .. } => "radicial",
            Payload::A { .. } => "A",
            Payload::B { .. } => "B",
            Payload::C { .. } => "C",
        }
    }

    /// True when the first level is étale.
    fn etale_first(&self) -> bool {
        matches!(self, Payload::Etale { .. } | Payload::A { .. } | Payload::B { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub at: Point,
    pub m: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    #[serde(default)]
    pub origin: bool,
    pub n: Vec<i64>,
    pub payload: Payload,
    #[serde(default)]
    pub points: Vec<MarkedPoint>,
}

/// Double point joining `from` (closer to the origin) and `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub at_from: Point,
    pub at_to: Point,
    pub m_from: Vec<i64>,
    pub m_to: Vec<i64>,
    pub thickness: i64,
}

/// The marked point of the origin vertex that faces the germ boundary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Root {
    pub vertex: String,
    pub at: Point,
    pub m: Vec<i64>,
    pub thickness: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegenTree {
    pub p: PrimeChar,
    pub rank: Rank,
    pub header: Header,
    pub vertices: Vec<Vertex>,
    #[serde(default)]
    pub edges: Vec<Edge>,
    pub root: Root,
    /// Assume the covers of all components have irreducible special fibres.
    #[serde(default)]
    pub irreducible_fibres: bool,
}

impl DegenTree {
    fn levels(&self) -> usize {
        match self.rank {
            Rank::P => 1,
            Rank::P2 => 2,
        }
    }

    fn vertex(&self, id: &str) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    /// All points of a vertex that carry boundary data, with their stored types.
    fn attachments<'a>(&'a self, v: &'a Vertex) -> Vec<(Point, &'a [i64], Attachment)> {
        let mut out: Vec<(Point, &[i64], Attachment)> =
            v.points.iter().map(|mp| (mp.at, mp.m.as_slice(), Attachment::Smooth)).collect();
        if self.root.vertex == v.id {
            out.push((self.root.at, self.root.m.as_slice(), Attachment::Root));
        }
        for (k, e) in self.edges.iter().enumerate() {
            if e.from == v.id {
                out.push((e.at_from, e.m_from.as_slice(), Attachment::Edge(k)));
            }
            if e.to == v.id {
                out.push((e.at_to, e.m_to.as_slice(), Attachment::Edge(k)));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Attachment {
    Smooth,
    Root,
    Edge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub label: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
    pub header_genus: Option<i64>,
    pub tree_genus: Option<i64>,
    pub irreducible_fibres_assumed: bool,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn labels(&self) -> BTreeSet<String> {
        self.violations.iter().map(|v| v.label.clone()).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TreeOptions {
    /// Use the printed offset −2 for étale-by-étale vertices in the rank-p² genus sum.
    pub strict_paper: bool,
}

#[derive(Default)]
struct Checker {
    violations: Vec<Violation>,
    notes: Vec<String>,
}

impl Checker {
    fn fail(&mut self, label: &str, message: impl Into<String>) {
        self.violations.push(Violation { label: label.into(), message: message.into() });
    }

    fn has(&self, label: &str) -> bool {
        self.violations.iter().any(|v| v.label == label)
    }
}

fn prime_to(m: i64, p: i64) -> bool {
    m != 0 && m % p != 0
}

/// Validate a tree of either rank.
pub fn validate_degen(tree: &DegenTree) -> ValidationReport {
    validate_degen_with(tree, TreeOptions::default())
}

pub fn validate_degen_with(tree: &DegenTree, opts: TreeOptions) -> ValidationReport {
    match tree.rank {
        Rank::P => validate_degen_p(tree),
        Rank::P2 => validate_degen_p2_with(tree, opts),
    }
}

/// Checks the arities, the tree shape, the origin and the orientation of edges.
fn check_structure(tree: &DegenTree, ck: &mut Checker) -> bool {
    let k = tree.levels();
    let before = ck.violations.len();
    if tree.header.types.len() != k {
        ck.fail("Deg.1", format!("header has {} level types, expected {k}", tree.header.types.len()));
    }
    let mut ids = BTreeSet::new();
    for v in &tree.vertices {
        if !ids.insert(v.id.as_str()) {
            ck.fail("Deg.2", format!("duplicate vertex id {}", v.id));
        }
        if v.n.len() != k {
            ck.fail("Deg.2", format!("vertex {} has {} levels, expected {k}", v.id, v.n.len()));
        }
        for mp in &v.points {
            if mp.m.len() != k {
                ck.fail("Deg.2", format!("point {} of {} has {} types, expected {k}", mp.at, v.id, mp.m.len()));
            }
        }
    }
    let origins: Vec<&Vertex> = tree.vertices.iter().filter(|v| v.origin).collect();
    if origins.len() != 1 {
        ck.fail("Deg.2", format!("{} origin vertices, expected exactly one", origins.len()));
    } else if origins[0].id != tree.root.vertex {
        ck.fail("Deg.2", format!("root point lies on {}, not on the origin {}", tree.root.vertex, origins[0].id));
    }
    if tree.root.m.len() != k {
        ck.fail("Deg.2", format!("root has {} types, expected {k}", tree.root.m.len()));
    }
    for e in &tree.edges {
        for id in [&e.from, &e.to] {
            if !ids.contains(id.as_str()) {
                ck.fail("Deg.2", format!("edge refers to unknown vertex {id}"));
            }
        }
        if e.m_from.len() != k || e.m_to.len() != k {
            ck.fail("Deg.2", format!("edge {}–{} has the wrong number of types", e.from, e.to));
        }
    }
    if tree.edges.len() + 1 != tree.vertices.len() {
        ck.fail("Deg.2", format!("{} edges for {} vertices is not a tree", tree.edges.len(), tree.vertices.len()));
    }
    if ck.violations.len() > before {
        return false;
    }
    // Breadth-first from the origin; every edge must point away from it.
    let mut depth: BTreeMap<&str, usize> = BTreeMap::new();
    depth.insert(tree.root.vertex.as_str(), 0);
    let mut queue = VecDeque::from([tree.root.vertex.as_str()]);
    while let Some(cur) = queue.pop_front() {
        let d = depth[cur];
        for e in &tree.edges {
            let next = if e.from == cur {
                e.to.as_str()
            } else if e.to == cur {
                e.from.as_str()
            } else {
                continue;
            };
            if !depth.contains_key(next) {
                depth.insert(next, d + 1);
                queue.push_back(next);
            }
        }
    }
    if depth.len() != tree.vertices.len() {
        ck.fail("Deg.2", "the dual graph is not connected");
        return false;
    }
    for e in &tree.edges {
        if depth[e.from.as_str()] + 1 != depth[e.to.as_str()] {
            ck.fail("Deg.2", format!("edge {} → {} is not oriented away from the origin", e.from, e.to));
        }
    }
    for v in &tree.vertices {
        let mut seen = BTreeSet::new();
        for (at, _, _) in tree.attachments(v) {
            if !seen.insert(at) {
                ck.fail("Deg.3", format!("point {at} of {} is used twice", v.id));
            }
        }
        for f in v.payload.functions() {
            for pole in f.poles() {
                if !seen.contains(&pole) {
                    let label = if tree.rank == Rank::P { "Deg.4" } else { "Deg.3" };
                    ck.fail(label, format!("payload of {} has a pole at {pole}, which is not a marked point", v.id));
                }
            }
        }
    }
    ck.violations.len() == before
}

fn report(tree: &DegenTree, ck: Checker, header_genus: Option<i64>, tree_genus: Option<i64>) -> ValidationReport {
    ValidationReport {
        valid: ck.violations.is_empty(),
        violations: ck.violations,
        header_genus,
        tree_genus,
        irreducible_fibres_assumed: tree.irreducible_fibres,
        notes: ck.notes,
    }
}

/// Validate a rank-p tree.
pub fn validate_degen_p(tree: &DegenTree) -> ValidationReport {
    let mut ck = Checker::default();
    if tree.rank != Rank::P {
        ck.fail("Deg.1", "tree is not of rank p");
        return report(tree, ck, None, None);
    }
    if !check_structure(tree, &mut ck) {
        return report(tree, ck, None, None);
    }
    let p = tree.p.pi64();
    let LevelType { n: nh, m: mh } = tree.header.types[0];
    let r = tree.header.r;
    if nh < 0 || r < 0 {
        ck.fail("Deg.1", format!("header n = {nh} and r = {r} must be non-negative"));
    }
    if !prime_to(mh, p) {
        ck.fail("Deg.1", format!("header m = {mh} is not prime to p"));
    }
    if r + mh - 1 < 0 {
        ck.fail("Deg.1", format!("r + m − 1 = {} is negative", r + mh - 1));
    }

    for v in &tree.vertices {
        let n = v.n[0];
        let kind = match &v.payload {
            Payload::Etale { .. } => TorsorKind::Etale,
            Payload::Radicial { .. } => TorsorKind::AlphaP,
            other => {
                ck.fail("Deg.4", format!("vertex {} carries a {} payload in a rank-p tree", v.id, other.name()));
                continue;
            }
        };
        if n < 0 || (n == 0) != (kind == TorsorKind::Etale) {
            ck.fail("Deg.4", format!("vertex {} has n = {n} with a {} payload", v.id, v.payload.name()));
        }
        let f = v.payload.functions()[0];
        for (at, m, att) in tree.attachments(v) {
            let m = m[0];
            let label = if let Attachment::Edge(_) = att { "Deg.6" } else { "Deg.5" };
            match att {
                Attachment::Smooth => {
                    if !prime_to(m, p) {
                        ck.fail("Deg.5", format!("type {m} at {at} of {} is not prime to p", v.id));
                    }
                    if n > 0 && m > -1 {
                        ck.fail("Deg.5", format!("type {m} at {at} of radicial {} must be ≤ −1", v.id));
                    }
                }
                Attachment::Root => {
                    if m != -mh {
                        ck.fail("Deg.5", format!("root type {m} differs from −m = {}", -mh));
                    }
                }
                Attachment::Edge(_) => {}
            }
            match conductor_at_point(f, at, kind) {
                Ok(c) => {
                    let ok = match kind {
                        TorsorKind::Etale if m < 0 => c == -m,
                        TorsorKind::Etale => c == 0,
                        TorsorKind::AlphaP => m == -c,
                    };
                    if !ok {
                        ck.fail(label, format!("payload of {} has conductor {c} at {at}, stored type {m}", v.id));
                    }
                }
                Err(e) => ck.fail(label, format!("conductor of {} at {at}: {e}", v.id)),
            }
        }
    }

    for e in &tree.edges {
        let (vf, vt) = (tree.vertex(&e.from).unwrap(), tree.vertex(&e.to).unwrap());
        let (nf, nt) = (vf.n[0], vt.n[0]);
        let (mf, mt) = (e.m_from[0], e.m_to[0]);
        if nf > 0 && nt >= nf {
            ck.fail("Deg.4", format!("n does not decrease along {} → {} ({nf} → {nt})", e.from, e.to));
        }
        if mf + mt != 0 {
            ck.fail("Deg.6", format!("edge types {mf} and {mt} at {} → {} do not sum to 0", e.from, e.to));
        }
        let etale_pair = nf == 0 && nt == 0 && mf == 0 && mt == 0;
        if !etale_pair && (!prime_to(mf, p) || !prime_to(mt, p)) {
            ck.fail("Deg.6", format!("edge types {mf}, {mt} at {} → {} are not prime to p", e.from, e.to));
        }
        if e.thickness <= 0 || e.thickness % p != 0 {
            ck.fail("Deg.7", format!("thickness {} of {} → {} is not a positive multiple of p", e.thickness, e.from, e.to));
        } else if nf - nt != mf * (e.thickness / p) {
            ck.fail(
                "Deg.7",
                format!("n_i − n_i′ = {} but m·t = {} at {} → {}", nf - nt, mf * (e.thickness / p), e.from, e.to),
            );
        }
    }
    let origin = tree.vertex(&tree.root.vertex).unwrap();
    if tree.root.thickness < 0 || tree.root.thickness % p != 0 {
        ck.fail("Deg.7", format!("root thickness {} is not a non-negative multiple of p", tree.root.thickness));
    } else if nh - origin.n[0] != mh * (tree.root.thickness / p) {
        ck.fail(
            "Deg.7",
            format!("n − n_origin = {} but m·t = {} at the root", nh - origin.n[0], mh * (tree.root.thickness / p)),
        );
    }

    let lhs = r + mh - 1;
    let rhs = genus_sum_p(tree);
    if lhs != rhs {
        ck.fail("Deg.8", format!("r + m − 1 = {lhs} but the sum over étale vertices is {rhs}"));
    }
    let header_genus = halve(lhs * (p - 1)).ok();
    let tree_genus = halve(rhs * (p - 1)).ok();
    report(tree, ck, header_genus, tree_genus)
}

/// Σ over étale vertices of (−2 + Σ (−m + 1)) over non-root points and edge ends.
fn genus_sum_p(tree: &DegenTree) -> i64 {
    tree.vertices
        .iter()
        .filter(|v| matches!(v.payload, Payload::Etale { .. }))
        .map(|v| {
            -2 + tree
                .attachments(v)
                .into_iter()
                .filter(|(_, _, a)| *a != Attachment::Root)
                .map(|(_, m, _)| -m[0] + 1)
                .sum::<i64>()
        })
        .sum()
}

/// Contribution of a point of an étale-first vertex to the rank-p² genus sum.
fn different_term_p2(p: i64, etale_second: bool, m1: i64, m2: i64) -> i64 {
    let c1 = -m1;
    if !etale_second {
        return c1 + 1;
    }
    // Upper second jump recovered from the pair; it is max(p·c1, conductor of f).
    let u2 = (-m2 - (p - 1) * m1) / p;
    let c2 = u2;
    if p * c1 > c2 {
        (c1 + 1) + p * (p * c1 + 1)
    } else {
        (c1 + 1) + p * (c2 + 1)
    }
}

fn genus_sum_p2(tree: &DegenTree, opts: TreeOptions) -> i64 {
    let p = tree.p.pi64();
    tree.vertices
        .iter()
        .filter(|v| v.payload.etale_first())
        .map(|v| {
            let etale_second = matches!(v.payload, Payload::A { .. });
            let offset = if etale_second && !opts.strict_paper { -2 * (p + 1) } else { -2 };
            offset
                + tree
                    .attachments(v)
                    .into_iter()
                    .filter(|(_, _, a)| *a != Attachment::Root)
                    .map(|(_, m, _)| different_term_p2(p, etale_second, m[0], m[1]))
                    .sum::<i64>()
        })
        .sum()
}

/// Genus of the singularity computed from the tree.
pub fn tree_genus(tree: &DegenTree) -> Result<i64> {
    tree_genus_with(tree, TreeOptions::default())
}

pub fn tree_genus_with(tree: &DegenTree, opts: TreeOptions) -> Result<i64> {
    let p = tree.p.pi64();
    let sum = match tree.rank {
        Rank::P => genus_sum_p(tree),
        Rank::P2 => genus_sum_p2(tree, opts),
    };
    halve(sum * (p - 1))
}

fn stored_pair(p: PrimeChar, n: &[i64], m: &[i64]) -> DegTypeP2 {
    let _ = p;
    if n[0] == 0 && m[0] >= 0 {
        DegTypeP2 { first: DegTypeP::split(), second: DegTypeP::split(), split_level: SplitLevel::Full }
    } else if n[0] == 0 && n[1] == 0 && m[1] >= 0 {
        DegTypeP2 { first: DegTypeP::new(0, m[0]), second: DegTypeP::split(), split_level: SplitLevel::TopOnly }
    } else {
        DegTypeP2::new(n[0], m[0], n[1], m[1])
    }
}

fn stored_type(n: i64, m: i64) -> DegTypeP {
    if n == 0 && m >= 0 {
        DegTypeP::split()
    } else {
        DegTypeP::new(n, m)
    }
}

fn expansion_cap(p: i64, fs: &[&RationalFn]) -> i64 {
    let deg = fs
        .iter()
        .flat_map(|f| f.poly.keys().map(|e| e.abs()).chain(f.parts.iter().map(|&(_, j, _)| j)))
        .max()
        .unwrap_or(0);
    p * p * (deg + 2) + 8
}

/// Local data of a rank-p² payload at a point.
fn local_data(v: &Vertex, at: Point, p: i64) -> Result<DegenDataP2> {
    let cap = expansion_cap(p, &v.payload.functions());
    let ex = |f: &RationalFn| f.expand_at(at, cap);
    Ok(match &v.payload {
        Payload::A { u1, u2 } => DegenDataP2::A { abar1: ex(u1)?, abar2: ex(u2)? },
        Payload::B { u1, u2 } => DegenDataP2::B { abar1: ex(u1)?, abar2: ex(u2)? },
        Payload::C { u1, g, c } => DegenDataP2::C {
            abar1: ex(u1)?,
            gbar: ex(g)?,
            cbar: c.iter().map(ex).collect::<Result<Vec<ResidueSeries>>>()?,
        },
        other => return Err(Error::InvalidInput(format!("{} payload in a rank-p² tree", other.name()))),
    })
}

/// Degeneration type of the lifted vertex cover on the boundary at `at`.
pub fn vertex_boundary_p(v: &Vertex, at: Point, p: PrimeChar) -> Result<DegTypeP> {
    let f = v.payload.functions()[0];
    let cap = expansion_cap(p.pi64(), &[f]);
    let s = f.expand_at(at, cap)?;
    let a = BiElement::from_residue(&s, 0, None)?.shift(-p.pi64() * v.n[0], 0)?;
    Ok(normalize_boundary_p(&a)?.deg_type)
}

/// Pair of degeneration types of the lifted vertex cover on the boundary at `at`.
pub fn vertex_boundary_p2(v: &Vertex, at: Point, p: PrimeChar) -> Result<DegTypeP2> {
    let data = local_data(v, at, p.pi64())?;
    let lifted = lift_degen_data_on(&data, lift_params_for(&data, v.n[0], v.n[1])?, RingKind::Boundary)?;
    classify_boundary_p2(&lifted.a1, &lifted.a2)
}

/// Validate a rank-p² tree.
pub fn validate_degen_p2(tree: &DegenTree) -> ValidationReport {
    validate_degen_p2_with(tree, TreeOptions::default())
}

pub fn validate_degen_p2_with(tree: &DegenTree, opts: TreeOptions) -> ValidationReport {
    let mut ck = Checker::default();
    if tree.rank != Rank::P2 {
        ck.fail("Deg.1", "tree is not of rank p²");
        return report(tree, ck, None, None);
    }
    if !check_structure(tree, &mut ck) {
        return report(tree, ck, None, None);
    }
    let pc = tree.p;
    let p = pc.pi64();
    let q = p * (p - 1) + 1;
    let r = tree.header.r;
    let [h1, h2] = [tree.header.types[0], tree.header.types[1]];
    let header_pair = DegTypeP2::new(h1.n, h1.m, h2.n, h2.m);
    if r < 0 || h1.n < 0 || h2.n < 0 {
        ck.fail("Deg.1", "header r and n must be non-negative");
    }
    if p * h2.n < h1.n * q {
        ck.fail("Deg.1", format!("header n2 = {} is below n1(p²−p+1)/p", h2.n));
    }
    if r + p * h1.m + h2.m - p - 1 < 0 {
        ck.fail("Deg.1", format!("r + p·m1 + m2 − p − 1 = {} is negative", r + p * h1.m + h2.m - p - 1));
    }
    if !is_admissible_pair(pc, &header_pair) {
        ck.fail("Deg.1", format!("header pair {header_pair} is not admissible"));
    }

    let mut computed: BTreeMap<(String, Point), DegTypeP2> = BTreeMap::new();
    for v in &tree.vertices {
        let (n1, n2) = (v.n[0], v.n[1]);
        let kind_ok = match &v.payload {
            Payload::A { .. } => n1 == 0 && n2 == 0,
            Payload::B { .. } => n1 == 0 && n2 > 0,
            Payload::C { c, .. } => {
                if c.len() != p as usize - 1 {
                    ck.fail("Deg.3", format!("vertex {} has {} coefficients c_j, expected {}", v.id, c.len(), p - 1));
                }
                n1 > 0 && p * n2 >= n1 * q
            }
            other => {
                ck.fail("Deg.3", format!("vertex {} carries a {} payload in a rank-p² tree", v.id, other.name()));
                continue;
            }
        };
        if !kind_ok {
            ck.fail("Deg.3", format!("levels ({n1}, {n2}) of {} do not fit kind {}", v.id, v.payload.name()));
            continue;
        }
        for (at, m, att) in tree.attachments(v) {
            let stored = stored_pair(pc, &v.n, m);
            match att {
                Attachment::Smooth => {
                    if !satisfies_condition_star(pc, &stored) {
                        ck.fail("Deg.4", format!("pair {stored} at {at} of {} violates condition (*)", v.id));
                    }
                }
                Attachment::Root => {
                    if m[0] != -h1.m || m[1] != -h2.m {
                        ck.fail("Deg.4", format!("root types ({}, {}) differ from ({}, {})", m[0], m[1], -h1.m, -h2.m));
                    }
                }
                Attachment::Edge(_) => {}
            }
            match vertex_boundary_p2(v, at, pc) {
                Ok(found) => {
                    if found != stored {
                        ck.fail("Deg.3'", format!("lift of {} has type {found} at {at}, stored {stored}", v.id));
                    }
                    computed.insert((v.id.clone(), at), found);
                }
                Err(e) => ck.fail("Deg.3'", format!("lift of {} at {at}: {e}", v.id)),
            }
        }
    }

    for e in &tree.edges {
        let (vf, vt) = (tree.vertex(&e.from).unwrap(), tree.vertex(&e.to).unwrap());
        let from_pair = stored_pair(pc, &vf.n, &e.m_from);
        let to_pair = stored_pair(pc, &vt.n, &e.m_to);
        if vf.n[0] > 0 && (vt.n[0] > vf.n[0] || vt.n[1] > vf.n[1] || vt.n == vf.n) {
            ck.fail("Deg.3", format!("levels do not decrease along {} → {}", e.from, e.to));
        }
        for (pair, side) in [(from_pair, &e.from), (to_pair, &e.to)] {
            if !is_admissible_pair(pc, &pair) {
                ck.fail("Deg.5", format!("pair {pair} on the {side} side of {} → {} is not admissible", e.from, e.to));
            }
        }
        for l in 0..2 {
            if e.m_from[l] + e.m_to[l] != 0 {
                ck.fail("Deg.5", format!("level-{} types at {} → {} do not sum to 0", l + 1, e.from, e.to));
            }
            if !prime_to(e.m_from[l], p) {
                ck.fail("Deg.5", format!("level-{} type {} at {} → {} is not prime to p", l + 1, e.m_from[l], e.from, e.to));
            }
        }
        let e2 = p * p;
        if e.thickness <= 0 || e.thickness % e2 != 0 {
            ck.fail("Deg.6", format!("thickness {} of {} → {} is not a positive multiple of p²", e.thickness, e.from, e.to));
        } else {
            let t = e.thickness / e2;
            if vf.n[0] - vt.n[0] != p * t * e.m_from[0] || vf.n[1] - vt.n[1] != t * e.m_from[1] {
                ck.fail("Deg.6", format!("level differences along {} → {} do not match the thickness", e.from, e.to));
            }
        }
        if let (Some(a), Some(b)) =
            (computed.get(&(e.from.clone(), e.at_from)), computed.get(&(e.to.clone(), e.at_to)))
        {
            match double_point_model_p2(pc, a, e.thickness, Some(b)) {
                Ok((_, s_side)) if s_side == *b => {}
                Ok((_, s_side)) => ck.fail(
                    "Deg.8",
                    format!("lift across {} → {} gives {s_side}, the far side has {b}", e.from, e.to),
                ),
                Err(err) => ck.fail("Deg.8", format!("no double-point model for {} → {}: {err}", e.from, e.to)),
            }
        }
    }
    let origin = tree.vertex(&tree.root.vertex).unwrap();
    let e2 = p * p;
    if tree.root.thickness < 0 || tree.root.thickness % e2 != 0 {
        ck.fail("Deg.6", format!("root thickness {} is not a non-negative multiple of p²", tree.root.thickness));
    } else {
        let t = tree.root.thickness / e2;
        if h1.n - origin.n[0] != p * t * h1.m || h2.n - origin.n[1] != t * h2.m {
            ck.fail("Deg.6", "header levels and origin levels do not match the root thickness");
        }
        if t > 0 {
            if let Some(b) = computed.get(&(origin.id.clone(), tree.root.at)) {
                match double_point_model_p2(pc, &header_pair, tree.root.thickness, Some(b)) {
                    Ok((_, s_side)) if s_side == *b => {}
                    Ok((_, s_side)) => {
                        ck.fail("Deg.8", format!("lift across the root gives {s_side}, the origin has {b}"))
                    }
                    Err(err) => ck.fail("Deg.8", format!("no double-point model at the root: {err}")),
                }
            }
        }
    }

    let lhs = r + p * h1.m + h2.m - p - 1;
    let rhs = genus_sum_p2(tree, opts);
    if lhs != rhs {
        ck.fail("Deg.7", format!("r + p·m1 + m2 − p − 1 = {lhs} but the sum over étale vertices is {rhs}"));
    }
    if !tree.irreducible_fibres {
        ck.notes.push("irreducibility of the special fibres is not assumed; the genus identity may undercount".into());
    }
    if ck.has("Deg.3'") {
        ck.notes.push("recomputed types use lifts over formal boundaries".into());
    }
    let header_genus = halve(lhs * (p - 1)).ok();
    let tree_genus = halve(rhs * (p - 1)).ok();
    report(tree, ck, header_genus, tree_genus)
}

/// Substitute T = π^e / S.
fn across(a: &BiElement, e: i64) -> Result<BiElement> {
    let terms: Vec<(i64, i64, i64)> = a.terms().map(|((i, j), c)| (i + e * j, -j, c as i64)).collect();
    Ok(BiElement::boundary(a.prime(), terms, None))
}

fn mono(p: PrimeChar, i: i64, j: i64) -> BiElement {
    BiElement::boundary(p, [(i, j, 1)], None)
}

/// Catalogue equation X^p − X = a on the T side of a double point with the given type.
fn double_point_model_p(p: PrimeChar, t_side: DegTypeP) -> BiElement {
    if t_side.split {
        BiElement::zero(p, None)
    } else {
        mono(p, -p.pi64() * t_side.n, t_side.m)
    }
}

/// Witt-vector candidates on the T side realizing a pair of types.
fn pair_candidates(p: PrimeChar, pair: &DegTypeP2) -> Vec<(BiElement, BiElement)> {
    let pp = p.pi64();
    let zero = BiElement::zero(p, None);
    match pair.split_level {
        SplitLevel::Full => return vec![(zero.clone(), zero)],
        SplitLevel::TopOnly => return vec![(mono(p, 0, pair.first.m), zero)],
        SplitLevel::None => {}
    }
    let (n1, m1) = (pair.first.n, pair.first.m);
    let (n2, m2) = (pair.second.n, pair.second.m);
    let a1 = mono(p, -pp * n1, m1);
    let mut out = vec![(a1.clone(), zero)];
    let num = m2 + m1 * (pp - 1);
    let k_num = pp * n2 + n1 * (pp - 1);
    if num % pp == 0 && k_num % pp == 0 {
        out.push((a1, mono(p, -k_num, num / pp)));
    }
    out
}

/// A Witt-vector model across a double point of thickness `e` whose T side has type
/// `t_side`; returns the model and the type on the S side, preferring `target`.
fn double_point_model_p2(
    p: PrimeChar,
    t_side: &DegTypeP2,
    e: i64,
    target: Option<&DegTypeP2>,
) -> Result<((BiElement, BiElement), DegTypeP2)> {
    let mut found = None;
    for (a1, a2) in pair_candidates(p, t_side) {
        match classify_boundary_p2(&a1, &a2) {
            Ok(t) if t == *t_side => {}
            _ => continue,
        }
        let (s1, s2) = (across(&a1, e)?, across(&a2, e)?);
        let s_type = classify_boundary_p2(&s1, &s2)?;
        let hit = target.is_none_or(|t| *t == s_type);
        if found.is_none() || hit {
            found = Some(((a1, a2), s_type));
        }
        if hit {
            break;
        }
    }
    found.ok_or_else(|| Error::InvalidInput(format!("no catalogue equation realizes {t_side}")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Vertex,
    SmoothPoint,
    DoublePoint,
    Root,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySide {
    pub at: String,
    pub deg_type: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalModel {
    pub kind: ModelKind,
    pub location: String,
    pub equations: Vec<String>,
    pub thickness: Option<i64>,
    pub sides: Vec<BoundarySide>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundaryMatch {
    pub location: String,
    pub model: String,
    pub vertex: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub compatible: bool,
    pub checks: Vec<BoundaryMatch>,
    /// Ramification index of the base extension needed for the prescribed thicknesses.
    pub base_ramification_index: i64,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub models: Vec<LocalModel>,
    pub certificate: Certificate,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn fmt_rational(f: &RationalFn) -> String {
    let mut parts = Vec::new();
    for (&e, &c) in f.poly.iter().rev() {
        let c = f.p.reduce(c);
        if c == 0 {
            continue;
        }
        let coeff = if c == 1 && e != 0 { String::new() } else { format!("{c}·") };
        let coeff = if e == 0 { format!("{c}") } else { coeff };
        parts.push(match e {
            0 => coeff,
            1 => format!("{coeff}x"),
            _ => format!("{coeff}x^{e}"),
        });
    }
    for &(a, j, c) in &f.parts {
        parts.push(format!("{}·(x − {a})^−{j}", f.p.reduce(c)));
    }
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn power(base: &str, e: i64) -> String {
    if e == 1 {
        base.to_string()
    } else {
        format!("{base}^{e}")
    }
}

fn vertex_equations(v: &Vertex, p: i64) -> Vec<String> {
    let q = p * (p - 1) + 1;
    match &v.payload {
        Payload::Etale { f } => vec![format!("X^p − X = {}", fmt_rational(f))],
        Payload::Radicial { f } => {
            vec![format!("X^p − π^{}·X = {}", v.n[0] * (p - 1), fmt_rational(f))]
        }
        Payload::A { u1, u2 } => {
            vec![format!("F(X1, X2) − (X1, X2) = ({}, {})", fmt_rational(u1), fmt_rational(u2))]
        }
        Payload::B { u1, u2 } => vec![format!(
            "F(X1, X2) − (X1, X2) = ({}, π^{}·({}))",
            fmt_rational(u1),
            -p * v.n[1],
            fmt_rational(u2)
        )],
        Payload::C { u1, g, c } => {
            let (n1, n2) = (v.n[0], v.n[1]);
            let m = if p * n2 == n1 * q { n1 * p } else { (p * n2 + n1 * (p - 1)) / p };
            let f: Vec<String> =
                c.iter().enumerate().map(|(j, cj)| format!("({})^p·{}", fmt_rational(cj), power("a1", j as i64 + 1))).collect();
            let mut eqs = vec![format!(
                "F(X1, X2) − (X1, X2) = (a1·π^{}, π^{}·f(a1) + π^{}·({})), a1 = {}, f(a1) = {}",
                -p * n1,
                -p * m,
                -p * m + n1 * (p - 1),
                fmt_rational(g),
                fmt_rational(u1),
                if f.is_empty() { "0".into() } else { f.join(" + ") }
            )];
            eqs.push(format!("t1^p = {}", fmt_rational(u1)));
            let cs: Vec<String> =
                c.iter().enumerate().map(|(j, cj)| format!("({})^p·{}", fmt_rational(cj), power("t1", j as i64 + 1))).collect();
            let tail = if cs.is_empty() { String::new() } else { format!(" − {}", cs.join(" − ")) };
            if p * n2 == n1 * q {
                eqs.push(format!("t2^p = {}{tail} − {}·t1", fmt_rational(g), power(&format!("({})", fmt_rational(u1)), p - 1)));
            } else {
                eqs.push(format!("t2^p = {}", fmt_rational(g)));
            }
            eqs
        }
    }
}

fn boundary_of(tree: &DegenTree, v: &Vertex, at: Point) -> Result<String> {
    Ok(match tree.rank {
        Rank::P => vertex_boundary_p(v, at, tree.p)?.to_string(),
        Rank::P2 => vertex_boundary_p2(v, at, tree.p)?.to_string(),
    })
}

/// Build local models for every vertex, marked point and double point, and certify
/// that they agree on shared boundaries.
pub fn realize_degen(tree: &DegenTree) -> Result<Realization> {
    realize_degen_with(tree, TreeOptions::default())
}

/// A double point to model: kind, location, the inner side (vertex or the germ
/// header), its levels and types, the outer vertex and point, and the thickness.
type Joint<'a> = (ModelKind, String, Option<&'a Vertex>, Point, Vec<i64>, Vec<i64>, &'a Vertex, Point, i64);

pub fn realize_degen_with(tree: &DegenTree, opts: TreeOptions) -> Result<Realization> {
    let rep = validate_degen_with(tree, opts);
    let blocking: Vec<&Violation> = rep.violations.iter().filter(|v| v.label != "Deg.8").collect();
    if !blocking.is_empty() {
        let msg: Vec<String> = blocking.iter().map(|v| format!("{}: {}", v.label, v.message)).collect();
        return Err(Error::InvalidTree(msg.join("; ")));
    }
    let pc = tree.p;
    let p = pc.pi64();
    let mut models = Vec::new();
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let mut index = 1i64;

    for v in &tree.vertices {
        let mut sides = Vec::new();
        for (at, _, _) in tree.attachments(v) {
            sides.push(BoundarySide { at: format!("{} at {at}", v.id), deg_type: boundary_of(tree, v, at)? });
        }
        models.push(LocalModel {
            kind: ModelKind::Vertex,
            location: v.id.clone(),
            equations: vertex_equations(v, p),
            thickness: None,
            sides,
        });
        for mp in &v.points {
            let location = format!("{} at {}", v.id, mp.at);
            let vertex_side = boundary_of(tree, v, mp.at)?;
            let (equation, model_side) = match tree.rank {
                Rank::P => {
                    let a = double_point_model_p(pc, stored_type(v.n[0], mp.m[0]));
                    let t = normalize_boundary_p(&a)?.deg_type;
                    (format!("X^p − X = {a}"), t.to_string())
                }
                Rank::P2 => {
                    let pair = stored_pair(pc, &v.n, &mp.m);
                    let (a1, a2) = pair_candidates(pc, &pair)
                        .into_iter()
                        .find(|(a1, a2)| classify_boundary_p2(a1, a2) == Ok(pair))
                        .ok_or_else(|| Error::InvalidInput(format!("no catalogue equation realizes {pair}")))?;
                    (format!("F(X1, X2) − (X1, X2) = ({a1}, {a2})"), classify_boundary_p2(&a1, &a2)?.to_string())
                }
            };
            checks.push(BoundaryMatch {
                location: location.clone(),
                model: model_side.clone(),
                vertex: vertex_side.clone(),
                ok: model_side == vertex_side,
            });
            models.push(LocalModel {
                kind: ModelKind::SmoothPoint,
                location,
                equations: vec![equation],
                thickness: None,
                sides: vec![BoundarySide { at: "T".into(), deg_type: model_side }],
            });
        }
    }

    let mut joints: Vec<Joint> = Vec::new();
    let origin = tree.vertex(&tree.root.vertex).unwrap();
    if tree.root.thickness > 0 {
        let hn: Vec<i64> = tree.header.types.iter().map(|t| t.n).collect();
        let hm: Vec<i64> = tree.header.types.iter().map(|t| t.m).collect();
        joints.push((
            ModelKind::Root,
            format!("root of {}", origin.id),
            None,
            tree.root.at,
            hn,
            hm,
            origin,
            tree.root.at,
            tree.root.thickness,
        ));
    } else {
        notes.push("root thickness 0: the origin meets the germ boundary without a double point".into());
    }
    for e in &tree.edges {
        let vf = tree.vertex(&e.from).unwrap();
        let vt = tree.vertex(&e.to).unwrap();
        joints.push((
            ModelKind::DoublePoint,
            format!("{} → {}", e.from, e.to),
            Some(vf),
            e.at_from,
            vf.n.clone(),
            e.m_from.clone(),
            vt,
            e.at_to,
            e.thickness,
        ));
        if tree.rank == Rank::P && vf.n[0] == 0 && vt.n[0] == 0 && e.m_from[0] == 0 {
            notes.push(format!("{} → {}: split étale double point, the cover gains {} cycles", e.from, e.to, p - 1));
        }
    }
    for (kind, location, near, near_at, n, m, far, far_at, thick) in joints {
        index = index / gcd(index, thick) * thick;
        let far_side = boundary_of(tree, far, far_at)?;
        let near_side = match near {
            Some(v) => Some(boundary_of(tree, v, near_at)?),
            None => None,
        };
        let (equations, t_type, s_type) = match tree.rank {
            Rank::P => {
                let t_side = match near {
                    Some(v) => vertex_boundary_p(v, near_at, pc)?,
                    None => stored_type(n[0], m[0]),
                };
                let a = double_point_model_p(pc, t_side);
                let s = across(&a, thick)?;
                let s_type = normalize_boundary_p(&s)?.deg_type;
                let t_type = normalize_boundary_p(&a)?.deg_type;
                (vec![format!("X^p − X = {a}, T·S = π^{thick}")], t_type.to_string(), s_type.to_string())
            }
            Rank::P2 => {
                let t_side = match near {
                    Some(v) => vertex_boundary_p2(v, near_at, pc)?,
                    None => stored_pair(pc, &n, &m),
                };
                let target = vertex_boundary_p2(far, far_at, pc)?;
                let ((a1, a2), s_type) = double_point_model_p2(pc, &t_side, thick, Some(&target))?;
                (
                    vec![format!("F(X1, X2) − (X1, X2) = ({a1}, {a2}), T·S = π^{thick}")],
                    classify_boundary_p2(&a1, &a2)?.to_string(),
                    s_type.to_string(),
                )
            }
        };
        if let Some(ns) = near_side {
            checks.push(BoundaryMatch {
                location: format!("{location}, near side"),
                model: t_type.clone(),
                vertex: ns.clone(),
                ok: t_type == ns,
            });
        }
        checks.push(BoundaryMatch {
            location: format!("{location}, far side"),
            model: s_type.clone(),
            vertex: far_side.clone(),
            ok: s_type == far_side,
        });
        models.push(LocalModel {
            kind,
            location,
            equations,
            thickness: Some(thick),
            sides: vec![
                BoundarySide { at: "T".into(), deg_type: t_type },
                BoundarySide { at: "S".into(), deg_type: s_type },
            ],
        });
    }

    if let Some(bad) = checks.iter().find(|c| !c.ok) {
        return Err(Error::CompatibilityFailure {
            location: bad.location.clone(),
            left: bad.model.clone(),
            right: bad.vertex.clone(),
        });
    }
    if tree.rank == Rank::P2 && !tree.irreducible_fibres {
        notes.push("gluing assumes irreducible special fibres over every component".into());
    }
    Ok(Realization {
        models,
        certificate: Certificate { compatible: true, checks, base_ramification_index: index, notes },
    })
}

/// Graphviz rendering of the tree.
pub fn to_dot(tree: &DegenTree) -> String {
    let mut out = String::from("digraph degen {\n  node [shape=ellipse];\n");
    let header: Vec<String> = tree.header.types.iter().map(|t| format!("({}, {})", t.n, t.m)).collect();
    out.push_str(&format!("  header [shape=box, label=\"r = {}\\n{}\"];\n", tree.header.r, header.join(" ")));
    for v in &tree.vertices {
        let n: Vec<String> = v.n.iter().map(|x| x.to_string()).collect();
        let pts: Vec<String> = v
            .points
            .iter()
            .map(|mp| {
                let m: Vec<String> = mp.m.iter().map(|x| x.to_string()).collect();
                format!("{}: {}", mp.at, m.join(", "))
            })
            .collect();
        let mut label = format!("{}\\n{} n = ({})", v.id, v.payload.name(), n.join(", "));
        if !pts.is_empty() {
            label.push_str(&format!("\\n{}", pts.join("; ")));
        }
        out.push_str(&format!("  \"{}\" [label=\"{}\"];\n", v.id, label));
    }
    let rm: Vec<String> = tree.root.m.iter().map(|x| x.to_string()).collect();
    out.push_str(&format!(
        "  header -> \"{}\" [label=\"{} ({}) e = {}\"];\n",
        tree.root.vertex,
        tree.root.at,
        rm.join(", "),
        tree.root.thickness
    ));
    for e in &tree.edges {
        let mf: Vec<String> = e.m_from.iter().map(|x| x.to_string()).collect();
        let mt: Vec<String> = e.m_to.iter().map(|x| x.to_string()).collect();
        out.push_str(&format!(
            "  \"{}\" -> \"{}\" [label=\"({}) | ({}) e = {}\"];\n",
            e.from,
            e.to,
            mf.join(", "),
            mt.join(", "),
            e.thickness
        ));
    }
    out.push_str("}\n");
    out
}

/// Ready-made trees used by tests, the acceptance suite and the CLI.
pub mod samples {
    use super::*;

    fn laurent(p: PrimeChar, terms: &[(i64, i64)]) -> RationalFn {
        RationalFn::laurent(p, terms.iter().copied())
    }

    fn single(n: i64, m: i64) -> Vec<LevelType> {
        vec![LevelType { n, m }]
    }

    /// One étale component with a pole of order 2 at 0; the root sits at ∞ with type `m`.
    pub fn single_component(p: PrimeChar, m: i64) -> DegenTree {
        DegenTree {
            p,
            rank: Rank::P,
            header: Header { r: m + 2, types: single(0, -m) },
            vertices: vec![Vertex {
                id: "X1".into(),
                origin: true,
                n: vec![0],
                payload: Payload::Etale { f: laurent(p, &[(-2, 1)]) },
                points: vec![MarkedPoint { at: Point::Finite(0), m: vec![-2] }],
            }],
            edges: vec![],
            root: Root { vertex: "X1".into(), at: Point::Infinity, m: vec![m], thickness: 0 },
            irreducible_fibres: false,
        }
    }

    /// Two étale components joined by an unramified double point; the germ has
    /// boundary type (m·t, m) and the far component a pole of order `m2`.
    pub fn two_etale_components(p: PrimeChar, m: i64, m2: i64, t: i64) -> DegenTree {
        let pp = p.pi64();
        DegenTree {
            p,
            rank: Rank::P,
            header: Header { r: m2 - m, types: single(m * t, m) },
            vertices: vec![
                Vertex {
                    id: "X1".into(),
                    origin: true,
                    n: vec![0],
                    payload: Payload::Etale { f: laurent(p, &[(-m, 1)]) },
                    points: vec![],
                },
                Vertex {
                    id: "X2".into(),
                    origin: false,
                    n: vec![0],
                    payload: Payload::Etale { f: laurent(p, &[(-m2, 1)]) },
                    points: vec![MarkedPoint { at: Point::Finite(0), m: vec![-m2] }],
                },
            ],
            edges: vec![Edge {
                from: "X1".into(),
                to: "X2".into(),
                at_from: Point::Infinity,
                at_to: Point::Infinity,
                m_from: vec![0],
                m_to: vec![0],
                thickness: pp,
            }],
            root: Root { vertex: "X1".into(), at: Point::Finite(0), m: vec![-m], thickness: pp * t },
            irreducible_fibres: false,
        }
    }

    /// Two radicial components followed by an étale one, all joined by double
    /// points of thickness p.
    pub fn radicial_chain(p: PrimeChar) -> DegenTree {
        let pp = p.pi64();
        let x = laurent(p, &[(1, 1)]);
        DegenTree {
            p,
            rank: Rank::P,
            header: Header { r: 0, types: single(3, 1) },
            vertices: vec![
                Vertex { id: "X1".into(), origin: true, n: vec![2], payload: Payload::Radicial { f: x.clone() }, points: vec![] },
                Vertex { id: "X2".into(), origin: false, n: vec![1], payload: Payload::Radicial { f: x }, points: vec![] },
                Vertex {
                    id: "X3".into(),
                    origin: false,
                    n: vec![0],
                    payload: Payload::Etale { f: laurent(p, &[(-1, 1)]) },
                    points: vec![],
                },
            ],
            edges: vec![
                Edge {
                    from: "X1".into(),
                    to: "X2".into(),
                    at_from: Point::Finite(0),
                    at_to: Point::Infinity,
                    m_from: vec![1],
                    m_to: vec![-1],
                    thickness: pp,
                },
                Edge {
                    from: "X2".into(),
                    to: "X3".into(),
                    at_from: Point::Finite(0),
                    at_to: Point::Finite(0),
                    m_from: vec![1],
                    m_to: vec![-1],
                    thickness: pp,
                },
            ],
            root: Root { vertex: "X1".into(), at: Point::Infinity, m: vec![-1], thickness: pp },
            irreducible_fibres: false,
        }
    }

    /// A single α_p-by-α_p component with levels (p, p²−p+1) over a germ whose
    /// boundary is étale of type ((0, −1), (0, −(p²−p+1))).
    pub fn kind_c_single_vertex(p: PrimeChar) -> DegenTree {
        let pp = p.pi64();
        let q = pp * (pp - 1) + 1;
        let x = laurent(p, &[(1, 1)]);
        let mut c = vec![x.clone()];
        c.resize(pp as usize - 1, laurent(p, &[]));
        let payload = Payload::C { u1: x.clone(), g: x, c };
        let mut v = Vertex { id: "X1".into(), origin: true, n: vec![pp, q], payload, points: vec![] };
        let at_inf = vertex_boundary_p2(&v, Point::Infinity, p).expect("boundary type at ∞");
        v.points.push(MarkedPoint { at: Point::Infinity, m: vec![at_inf.first.m, at_inf.second.m] });
        DegenTree {
            p,
            rank: Rank::P2,
            header: Header {
                r: 2 * pp + q + 1,
                types: vec![LevelType { n: 0, m: -1 }, LevelType { n: 0, m: -q }],
            },
            vertices: vec![v],
            edges: vec![],
            root: Root { vertex: "X1".into(), at: Point::Finite(0), m: vec![1, q], thickness: pp * pp },
            irreducible_fibres: true,
        }
    }
    /// An α_p-by-α_p origin carrying the root, joined at ∞ to an étale-by-étale
    /// component; the origin also has a smooth marked point at 1.
    pub fn kind_c_with_etale_neighbour(p: PrimeChar) -> DegenTree {
        let pp = p.pi64();
        let q = pp * (pp - 1) + 1;
        let u1 = RationalFn::laurent(p, []).with_part(1, 1, 1).with_part(1, 2, 1);
        let payload = Payload::C { u1, g: laurent(p, &[]), c: vec![laurent(p, &[]); pp as usize - 1] };
        let mut v = Vertex { id: "X1".into(), origin: true, n: vec![pp, q], payload, points: vec![] };
        let at_one = vertex_boundary_p2(&v, Point::Finite(1), p).expect("boundary type at 1");
        v.points.push(MarkedPoint { at: Point::Finite(1), m: vec![at_one.first.m, at_one.second.m] });
        let w = Vertex {
            id: "X2".into(),
            origin: false,
            n: vec![0, 0],
            payload: Payload::A { u1: laurent(p, &[(1, 1)]), u2: laurent(p, &[]) },
            points: vec![],
        };
        let mut tree = DegenTree {
            p,
            rank: Rank::P2,
            header: Header { r: 0, types: vec![LevelType { n: 0, m: -1 }, LevelType { n: 0, m: -q }] },
            vertices: vec![v, w],
            edges: vec![Edge {
                from: "X1".into(),
                to: "X2".into(),
                at_from: Point::Infinity,
                at_to: Point::Infinity,
                m_from: vec![1, q],
                m_to: vec![-1, -q],
                thickness: pp * pp,
            }],
            root: Root { vertex: "X1".into(), at: Point::Finite(0), m: vec![1, q], thickness: pp * pp },
            irreducible_fibres: true,
        };
        let g = tree_genus(&tree).expect("tree genus");
        tree.header.r = 2 * pp + q + 1 + 2 * g / (pp - 1);
        tree
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "valid: {}", self.valid)?;
        for v in &self.violations {
            writeln!(f, "{}: {}", v.label, v.message)?;
        }
        if let Some(g) = self.header_genus {
            writeln!(f, "genus from header: {g}")?;
        }
        if let Some(g) = self.tree_genus {
            writeln!(f, "genus from tree: {g}")?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}
