//! Objects of the additive layer: boundary sequences, the registry of MOY
//! graphs, shifted graphs and formal direct sums of them.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::laurent::{quantum_int, LaurentPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    Up,
    Down,
}

/// A finite word in up/down strands: the objects of the category.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundarySeq(pub Vec<Orientation>);

impl BoundarySeq {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn ups(k: usize) -> Self {
        Self(vec![Orientation::Up; k])
    }

    pub fn from_slice(s: &[Orientation]) -> Self {
        Self(s.to_vec())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Concatenation, the tensor product of objects.
    pub fn concat(&self, other: &BoundarySeq) -> BoundarySeq {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BoundarySeq(v)
    }
}

impl fmt::Display for BoundarySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        for o in &self.0 {
            match o {
                Orientation::Up => write!(f, "↑")?,
                Orientation::Down => write!(f, "↓")?,
            }
        }
        Ok(())
    }
}

/// Names in the finite graph registry.
///
/// The first block is the 2-strand fragment used by the braid pipeline; the
/// second block holds the graphs that only appear in the relation catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GraphName {
    Empty,
    Id1,
    Id1Rev,
    Ev,
    Coev,
    EvRev,
    CoevRev,
    Id2,
    S,
    T,
    SS,
    Circle,
    TwoCircles,
    Theta,
    Digon,
    // catalog-only graphs
    CupCap,
    Id1Id1Rev,
    NuGraph,
    StrandDigon,
    StrandDigonRev,
    Coso,
    SId1,
    Zorro,
}

impl GraphName {
    pub const ALL: [GraphName; 23] = [
        GraphName::Empty,
        GraphName::Id1,
        GraphName::Id1Rev,
        GraphName::Ev,
        GraphName::Coev,
        GraphName::EvRev,
        GraphName::CoevRev,
        GraphName::Id2,
        GraphName::S,
        GraphName::T,
        GraphName::SS,
        GraphName::Circle,
        GraphName::TwoCircles,
        GraphName::Theta,
        GraphName::Digon,
        GraphName::CupCap,
        GraphName::Id1Id1Rev,
        GraphName::NuGraph,
        GraphName::StrandDigon,
        GraphName::StrandDigonRev,
        GraphName::Coso,
        GraphName::SId1,
        GraphName::Zorro,
    ];

    pub fn source(self) -> BoundarySeq {
        registry().info(self).source.clone()
    }

    pub fn target(self) -> BoundarySeq {
        registry().info(self).target.clone()
    }

    pub fn is_closed(self) -> bool {
        let info = registry().info(self);
        info.source.is_empty() && info.target.is_empty()
    }

    pub fn symbol(self) -> &'static str {
        use GraphName::*;
        match self {
            Empty => "∅",
            Id1 => "id1",
            Id1Rev => "id1'",
            Ev => "ev",
            Coev => "coev",
            EvRev => "ev'",
            CoevRev => "coev'",
            Id2 => "id2",
            S => "S",
            T => "T",
            SS => "S∘S",
            Circle => "O",
            TwoCircles => "OO",
            Theta => "Θ",
            Digon => "D",
            CupCap => "coev∘ev",
            Id1Id1Rev => "id1⊗id1'",
            NuGraph => "N",
            StrandDigon => "id1⊗D'",
            StrandDigonRev => "D⊗id1'",
            Coso => "(S⊗1)(1⊗S)(S⊗1)",
            SId1 => "S⊗id1",
            Zorro => "Z",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphInfo {
    pub source: BoundarySeq,
    pub target: BoundarySeq,
}

/// Boundary data plus the composition, tensor and closure tables.
#[derive(Clone, Debug)]
pub struct Registry {
    info: HashMap<GraphName, GraphInfo>,
    compose: HashMap<(GraphName, GraphName), GraphName>,
    tensor: HashMap<(GraphName, GraphName), GraphName>,
    closure: HashMap<GraphName, GraphName>,
}

pub fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(Registry::standard)
}

impl Registry {
    pub fn standard() -> Self {
        use GraphName::*;
        use Orientation::{Down as D, Up as U};

        let mut r =
            Registry { info: HashMap::new(), compose: HashMap::new(), tensor: HashMap::new(), closure: HashMap::new() };
        let entries: [(GraphName, &[Orientation], &[Orientation]); 23] = [
            (Empty, &[], &[]),
            (Id1, &[U], &[U]),
            (Id1Rev, &[D], &[D]),
            (Ev, &[U, D], &[]),
            (Coev, &[], &[U, D]),
            (EvRev, &[D, U], &[]),
            (CoevRev, &[], &[D, U]),
            (Id2, &[U, U], &[U, U]),
            (S, &[U, U], &[U, U]),
            (T, &[U, U, U], &[U, U, U]),
            (SS, &[U, U], &[U, U]),
            (Circle, &[], &[]),
            (TwoCircles, &[], &[]),
            (Theta, &[], &[]),
            (Digon, &[U], &[U]),
            (CupCap, &[U, D], &[U, D]),
            (Id1Id1Rev, &[U, D], &[U, D]),
            (NuGraph, &[U, D], &[U, D]),
            (StrandDigon, &[U, D], &[U, D]),
            (StrandDigonRev, &[U, D], &[U, D]),
            (Coso, &[U, U, U], &[U, U, U]),
            (SId1, &[U, U, U], &[U, U, U]),
            (Zorro, &[U, U, U], &[U, U, U]),
        ];
        for (name, s, t) in entries {
            r.register(name, BoundarySeq::from_slice(s), BoundarySeq::from_slice(t));
        }

        // identities absorb
        for name in GraphName::ALL {
            let info = r.info[&name].clone();
            if let Some(id) = identity_name(&info.target) {
                r.compose.insert((id, name), name);
            }
            if let Some(id) = identity_name(&info.source) {
                r.compose.insert((name, id), name);
            }
        }
        r.compose.insert((S, S), SS);
        r.compose.insert((Ev, Coev), Circle);

        for name in GraphName::ALL {
            r.tensor.insert((Empty, name), name);
            r.tensor.insert((name, Empty), name);
        }
        r.tensor.insert((Id1, Id1), Id2);
        r.tensor.insert((Id1, Id1Rev), Id1Id1Rev);
        r.tensor.insert((S, Id1), SId1);
        r.tensor.insert((Circle, Circle), TwoCircles);

        r.closure.insert(Id1, Circle);
        r.closure.insert(Id2, TwoCircles);
        r.closure.insert(S, Theta);
        r
    }

    pub fn register(&mut self, name: GraphName, source: BoundarySeq, target: BoundarySeq) {
        self.info.insert(name, GraphInfo { source, target });
    }

    pub fn register_composite(&mut self, top: GraphName, bottom: GraphName, result: GraphName) {
        self.compose.insert((top, bottom), result);
    }

    pub fn register_closure(&mut self, open: GraphName, closed: GraphName) {
        self.closure.insert(open, closed);
    }

    pub fn info(&self, name: GraphName) -> &GraphInfo {
        &self.info[&name]
    }

    /// `top ∘ bottom`: `bottom` is applied first, so its target must be the
    /// source of `top`.
    pub fn compose_names(&self, top: GraphName, bottom: GraphName) -> Result<GraphName> {
        let (ti, bi) = (self.info(top), self.info(bottom));
        if bi.target != ti.source {
            return Err(Error::BoundaryMismatch(format!(
                "{} ∘ {}: {} vs {}",
                top.symbol(),
                bottom.symbol(),
                ti.source,
                bi.target
            )));
        }
        self.compose.get(&(top, bottom)).copied().ok_or_else(|| {
            Error::CatalogIncomplete(format!("composite {} ∘ {} is not registered", top.symbol(), bottom.symbol()))
        })
    }

    pub fn tensor_names(&self, left: GraphName, right: GraphName) -> Result<GraphName> {
        self.tensor.get(&(left, right)).copied().ok_or_else(|| {
            Error::CatalogIncomplete(format!("tensor {} ⊗ {} is not registered", left.symbol(), right.symbol()))
        })
    }

    pub fn closure_name(&self, name: GraphName) -> Result<GraphName> {
        let info = self.info(name);
        if info.source != info.target {
            return Err(Error::BoundaryMismatch(format!("{} is not closable", name.symbol())));
        }
        self.closure
            .get(&name)
            .copied()
            .ok_or_else(|| Error::CatalogIncomplete(format!("closure of {} is not registered", name.symbol())))
    }

    pub fn compose_terms(&self, g: GraphTerm, h: GraphTerm) -> Result<GraphTerm> {
        Ok(GraphTerm::new(self.compose_names(g.name, h.name)?, g.shift + h.shift))
    }
}

fn identity_name(seq: &BoundarySeq) -> Option<GraphName> {
    use Orientation::*;
    match seq.0.as_slice() {
        [] => Some(GraphName::Empty),
        [Up] => Some(GraphName::Id1),
        [Down] => Some(GraphName::Id1Rev),
        [Up, Up] => Some(GraphName::Id2),
        [Up, Down] => Some(GraphName::Id1Id1Rev),
        _ => None,
    }
}

/// The identity graph on a boundary sequence, when it is registered.
pub fn identity_graph(seq: &BoundarySeq) -> Result<GraphName> {
    identity_name(seq).ok_or_else(|| Error::CatalogIncomplete(format!("no identity graph on {seq}")))
}

/// A graph together with its shift `{m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GraphTerm {
    pub name: GraphName,
    pub shift: i64,
}

impl GraphTerm {
    pub const fn new(name: GraphName, shift: i64) -> Self {
        Self { name, shift }
    }

    pub fn shifted(self, s: i64) -> Self {
        Self { name: self.name, shift: self.shift + s }
    }

    pub fn source(&self) -> BoundarySeq {
        self.name.source()
    }

    pub fn target(&self) -> BoundarySeq {
        self.name.target()
    }
}

impl fmt::Display for GraphTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.name.symbol())
        } else {
            write!(f, "{}{{{}}}", self.name.symbol(), self.shift)
        }
    }
}

/// `g ∘ h` with shifts adding.
pub fn compose_terms(g: GraphTerm, h: GraphTerm) -> Result<GraphTerm> {
    registry().compose_terms(g, h)
}

pub fn tensor_terms(g: GraphTerm, h: GraphTerm) -> Result<GraphTerm> {
    Ok(GraphTerm::new(registry().tensor_names(g.name, h.name)?, g.shift + h.shift))
}

/// A graded vector space `⊕ Q{m_i}`, kept as the multiset of its shifts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedVS {
    pub shifts: Vec<i64>,
}

impl GradedVS {
    pub fn new(mut shifts: Vec<i64>) -> Self {
        shifts.sort_unstable();
        Self { shifts }
    }

    /// `[m] = Q{1-m} ⊕ Q{3-m} ⊕ ... ⊕ Q{m-1}`
    pub fn quantum(m: usize) -> Self {
        let m = m as i64;
        Self::new((0..m).map(|j| 1 - m + 2 * j).collect())
    }

    pub fn shifted(&self, s: i64) -> Self {
        Self::new(self.shifts.iter().map(|x| x + s).collect())
    }

    pub fn tensor(&self, other: &GradedVS) -> Self {
        Self::new(self.shifts.iter().flat_map(|a| other.shifts.iter().map(move |b| a + b)).collect())
    }

    pub fn direct_sum(&self, other: &GradedVS) -> Self {
        let mut v = self.shifts.clone();
        v.extend_from_slice(&other.shifts);
        Self::new(v)
    }

    pub fn dim(&self) -> usize {
        self.shifts.len()
    }

    pub fn is_zero(&self) -> bool {
        self.shifts.is_empty()
    }

    pub fn dim_q(&self) -> LaurentPoly {
        LaurentPoly::from_q_terms(self.shifts.iter().map(|&s| (s, 1)))
    }
}

/// A formal direct sum of shifted graphs with common boundary data.
/// The empty sum is the zero object.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormalSum {
    source: BoundarySeq,
    target: BoundarySeq,
    terms: Vec<GraphTerm>,
}

impl FormalSum {
    pub fn zero(source: BoundarySeq, target: BoundarySeq) -> Self {
        Self { source, target, terms: Vec::new() }
    }

    pub fn single(term: GraphTerm) -> Self {
        Self { source: term.source(), target: term.target(), terms: vec![term] }
    }

    /// Fails when the terms disagree on boundary data.
    pub fn new(source: BoundarySeq, target: BoundarySeq, terms: Vec<GraphTerm>) -> Result<Self> {
        for t in &terms {
            if t.source() != source || t.target() != target {
                return Err(Error::BoundaryMismatch(format!(
                    "{t} has boundary {} -> {}, expected {source} -> {target}",
                    t.source(),
                    t.target()
                )));
            }
        }
        Ok(Self { source, target, terms })
    }

    /// Boundary data is read off the first term; panics on an empty list.
    pub fn from_terms(terms: Vec<GraphTerm>) -> Result<Self> {
        let first = terms.first().expect("from_terms needs at least one term; use FormalSum::zero");
        Self::new(first.source(), first.target(), terms)
    }

    pub fn source(&self) -> &BoundarySeq {
        &self.source
    }

    pub fn target(&self) -> &BoundarySeq {
        &self.target
    }

    pub fn terms(&self) -> &[GraphTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn same_boundary(&self, other: &FormalSum) -> bool {
        self.source == other.source && self.target == other.target
    }

    pub fn direct_sum(&self, other: &FormalSum) -> Result<FormalSum> {
        if !self.same_boundary(other) {
            return Err(Error::BoundaryMismatch(format!(
                "{} -> {} vs {} -> {}",
                self.source, self.target, other.source, other.target
            )));
        }
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(FormalSum { source: self.source.clone(), target: self.target.clone(), terms })
    }

    pub fn shifted(&self, s: i64) -> FormalSum {
        FormalSum {
            source: self.source.clone(),
            target: self.target.clone(),
            terms: self.terms.iter().map(|t| t.shifted(s)).collect(),
        }
    }

    /// Equality up to reordering of summands.
    pub fn equivalent(&self, other: &FormalSum) -> bool {
        let mut a = self.terms.clone();
        let mut b = other.terms.clone();
        a.sort();
        b.sort();
        self.same_boundary(other) && a == b
    }

    /// Replaces the term at `idx` by `parts`, keeping the order of the rest.
    pub fn splice(&self, idx: usize, parts: &[GraphTerm]) -> Result<FormalSum> {
        let mut terms = self.terms[..idx].to_vec();
        terms.extend_from_slice(parts);
        terms.extend_from_slice(&self.terms[idx + 1..]);
        FormalSum::new(self.source.clone(), self.target.clone(), terms)
    }

    pub fn remove(&self, idx: usize) -> FormalSum {
        let mut terms = self.terms.clone();
        terms.remove(idx);
        FormalSum { source: self.source.clone(), target: self.target.clone(), terms }
    }

    /// Reads the sum as a graded vector space when every term is `∅{m}`.
    pub fn as_graded_vs(&self) -> Option<GradedVS> {
        self.terms
            .iter()
            .map(|t| (t.name == GraphName::Empty).then_some(t.shift))
            .collect::<Option<Vec<_>>>()
            .map(GradedVS::new)
    }
}

impl fmt::Display for FormalSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

impl Serialize for FormalSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FormalSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let terms = Vec::<GraphTerm>::deserialize(d)?;
        if terms.is_empty() {
            return Ok(FormalSum::zero(BoundarySeq::empty(), BoundarySeq::empty()));
        }
        FormalSum::from_terms(terms).map_err(serde::de::Error::custom)
    }
}

/// `v ⊗ m`: every shift of `v` is added to every term of `m`.
pub fn tensor_vs(v: &GradedVS, m: &FormalSum) -> FormalSum {
    let terms = v.shifts.iter().flat_map(|&s| m.terms.iter().map(move |t| t.shifted(s))).collect();
    FormalSum { source: m.source.clone(), target: m.target.clone(), terms }
}

pub fn direct_sum(a: &FormalSum, b: &FormalSum) -> Result<FormalSum> {
    a.direct_sum(b)
}

/// Closes every term of a sum whose source equals its target.
pub fn closure(m: &FormalSum) -> Result<FormalSum> {
    if m.source != m.target {
        return Err(Error::BoundaryMismatch(format!("cannot close {} -> {}", m.source, m.target)));
    }
    let reg = registry();
    let terms =
        m.terms.iter().map(|t| Ok(GraphTerm::new(reg.closure_name(t.name)?, t.shift))).collect::<Result<Vec<_>>>()?;
    Ok(FormalSum { source: BoundarySeq::empty(), target: BoundarySeq::empty(), terms })
}

/// Graded dimension of `[m]` via the registry layer, for cross-checks.
pub fn quantum_dim(m: usize) -> LaurentPoly {
    GradedVS::quantum(m).dim_q()
}

#[doc(hidden)]
pub fn quantum_dim_matches(m: usize) -> bool {
    quantum_int(m as i64).map(|p| p == quantum_dim(m)).unwrap_or(false)
}
