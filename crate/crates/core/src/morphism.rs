//! Morphisms between formal sums: rational combinations of composition
//! words over the elementary alphabet, kept in normal form by a rewrite
//! system.
//!
//! Words are written the usual way for composites: the rightmost letter is
//! applied first. The empty word is the identity and the empty combination
//! is zero.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graphcat::{GraphName, GraphTerm};

/// Where a χ/α/γ letter acts.
///
/// `Upper` and `Lower` are the whiskered versions on a composite of two
/// 2-strand graphs, rendered `1∘x` and `x∘1`; `Closed` is the closure of the
/// bare letter. The last three sites only occur in the
/// relation catalog.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Bare,
    Upper,
    Lower,
    Closed,
    NuPair,
    Braid3,
    Zorro,
}

/// The families of distinguished isomorphisms, each splitting a composite
/// graph into a direct sum of parts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IsoKind {
    Phi,
    Psi,
    /// Reflected φ, acting with the roles of top and bottom exchanged.
    PhiR,
    PsiR,
    /// `λ⊗1` on two circles.
    LambdaOne,
    /// Digon removal on the theta graph.
    Mu,
    /// Circle removal.
    Lambda,
    /// Digon removal next to a reversed strand.
    MuStrand,
    MuStrandR,
    Nu,
    Eta,
}

impl IsoKind {
    pub const ALL: [IsoKind; 11] = [
        IsoKind::Phi,
        IsoKind::Psi,
        IsoKind::PhiR,
        IsoKind::PsiR,
        IsoKind::LambdaOne,
        IsoKind::Mu,
        IsoKind::Lambda,
        IsoKind::MuStrand,
        IsoKind::MuStrandR,
        IsoKind::Nu,
        IsoKind::Eta,
    ];

    fn depends_on_n(self) -> bool {
        !matches!(self, IsoKind::Phi | IsoKind::Psi | IsoKind::PhiR | IsoKind::PsiR | IsoKind::Eta)
    }

    pub fn composite(self) -> GraphName {
        use IsoKind::*;
        match self {
            Phi | Psi | PhiR | PsiR => GraphName::SS,
            LambdaOne => GraphName::TwoCircles,
            Mu => GraphName::Theta,
            Lambda => GraphName::Circle,
            MuStrand => GraphName::StrandDigon,
            MuStrandR => GraphName::StrandDigonRev,
            Nu => GraphName::NuGraph,
            Eta => GraphName::Coso,
        }
    }

    pub fn part_count(self, n: usize) -> usize {
        use IsoKind::*;
        match self {
            Phi | Psi | PhiR | PsiR | Eta => 2,
            LambdaOne | Lambda => n,
            Mu | MuStrand | MuStrandR | Nu => n - 1,
        }
    }

    pub fn part_name(self, part: usize) -> GraphName {
        use IsoKind::*;
        match self {
            Phi | Psi | PhiR | PsiR => GraphName::S,
            LambdaOne | Mu => GraphName::Circle,
            Lambda => GraphName::Empty,
            MuStrand | MuStrandR => GraphName::Id1Id1Rev,
            Nu if part == 0 => GraphName::CupCap,
            Nu => GraphName::Id1Id1Rev,
            Eta if part == 0 => GraphName::SId1,
            Eta => GraphName::T,
        }
    }

    /// Shift of part `part` relative to the composite.
    pub fn part_offset(self, part: usize, n: usize) -> i64 {
        use IsoKind::*;
        let (p, n) = (part as i64, n as i64);
        match self {
            Phi | Psi | PhiR | PsiR => 2 * p - 1,
            LambdaOne | Lambda => 1 - n + 2 * p,
            Mu | MuStrand | MuStrandR => 2 - n + 2 * p,
            Nu if part == 0 => 0,
            Nu => 1 - n + 2 * p,
            Eta => 0,
        }
    }

    /// Parts of the composite `{0}` as shifted graphs, in order.
    pub fn parts(self, n: usize) -> Vec<GraphTerm> {
        (0..self.part_count(n)).map(|p| GraphTerm::new(self.part_name(p), self.part_offset(p, n))).collect()
    }

    pub fn symbol(self) -> &'static str {
        use IsoKind::*;
        match self {
            Phi => "φ",
            Psi => "ψ",
            PhiR => "φʳ",
            PsiR => "ψʳ",
            LambdaOne => "λ⊗1",
            Mu => "μ",
            Lambda => "λ",
            MuStrand => "1⊗μ",
            MuStrandR => "μ⊗1",
            Nu => "ν",
            Eta => "η",
        }
    }
}

/// One component of an isomorphism (`X_p`, composite → part `p`) or of its
/// inverse (`X⁻¹_p`, part `p` → composite).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsoLetter {
    pub kind: IsoKind,
    pub part: u16,
    /// Level, recorded only for the families whose size depends on it.
    pub n: u16,
    pub inverse: bool,
}

impl IsoLetter {
    pub fn new(kind: IsoKind, part: usize, n: usize) -> Self {
        let n = if kind.depends_on_n() { n as u16 } else { 0 };
        Self { kind, part: part as u16, n, inverse: false }
    }

    pub fn inv(self) -> Self {
        Self { inverse: !self.inverse, ..self }
    }

    pub fn part_count(self) -> usize {
        self.kind.part_count(self.n as usize)
    }

    fn offset(self) -> i64 {
        self.kind.part_offset(self.part as usize, self.n as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Chi0(Site),
    Chi1(Site),
    Alpha(Site),
    Gamma(Site),
    /// `ε` on a circle, raising the shift by 2.
    Epsilon,
    Iso(IsoLetter),
}

impl Letter {
    pub fn iso(kind: IsoKind, part: usize, n: usize) -> Letter {
        Letter::Iso(IsoLetter::new(kind, part, n))
    }

    pub fn iso_inv(kind: IsoKind, part: usize, n: usize) -> Letter {
        Letter::Iso(IsoLetter::new(kind, part, n).inv())
    }

    pub fn is_iso(self) -> bool {
        matches!(self, Letter::Iso(_))
    }

    pub fn site(self) -> Option<Site> {
        match self {
            Letter::Chi0(s) | Letter::Chi1(s) | Letter::Alpha(s) | Letter::Gamma(s) => Some(s),
            _ => None,
        }
    }

    pub fn with_site(self, site: Site) -> Letter {
        match self {
            Letter::Chi0(_) => Letter::Chi0(site),
            Letter::Chi1(_) => Letter::Chi1(site),
            Letter::Alpha(_) => Letter::Alpha(site),
            Letter::Gamma(_) => Letter::Gamma(site),
            other => other,
        }
    }

    /// Source graph, target graph and shift increment.
    fn signature(self) -> Option<(GraphName, GraphName, i64)> {
        use GraphName::*;
        use Site::*;
        Some(match self {
            Letter::Chi0(site) => {
                let (s, t) = match site {
                    Bare => (Id2, S),
                    Upper | Lower => (S, SS),
                    Closed => (TwoCircles, Theta),
                    NuPair => (StrandDigon, NuGraph),
                    Braid3 => (GraphName::Zorro, Coso),
                    Site::Zorro => (SId1, GraphName::Zorro),
                };
                (s, t, 1)
            }
            Letter::Chi1(site) => {
                let (s, t) = match site {
                    Bare => (S, Id2),
                    Upper | Lower => (SS, S),
                    Closed => (Theta, TwoCircles),
                    NuPair => (NuGraph, StrandDigonRev),
                    Braid3 => (GraphName::Zorro, SId1),
                    Site::Zorro => return None,
                };
                (s, t, 1)
            }
            Letter::Alpha(site) | Letter::Gamma(site) => {
                let g = match site {
                    Bare => S,
                    Upper | Lower => SS,
                    Closed => Theta,
                    _ => return None,
                };
                (g, g, 2)
            }
            Letter::Epsilon => (Circle, Circle, 2),
            Letter::Iso(x) => {
                let (c, p, off) = (x.kind.composite(), x.kind.part_name(x.part as usize), x.offset());
                if x.inverse {
                    (p, c, -off)
                } else {
                    (c, p, off)
                }
            }
        })
    }

    pub fn source_name(self) -> Option<GraphName> {
        self.signature().map(|s| s.0)
    }

    /// The target of this letter applied to `src`.
    pub fn apply(self, src: GraphTerm) -> Result<GraphTerm> {
        let (s, t, d) =
            self.signature().ok_or_else(|| Error::InterfaceMismatch(format!("{self} is not a valid letter")))?;
        if let Letter::Iso(x) = self {
            if x.part as usize >= x.part_count() {
                return Err(Error::InterfaceMismatch(format!("{self}: part out of range")));
            }
        }
        if s != src.name {
            return Err(Error::InterfaceMismatch(format!("{self} expects {} but got {}", s.symbol(), src)));
        }
        Ok(GraphTerm::new(t, src.shift + d))
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = match self {
            Letter::Chi0(_) => "χ0",
            Letter::Chi1(_) => "χ1",
            Letter::Alpha(_) => "α",
            Letter::Gamma(_) => "γ",
            Letter::Epsilon => return write!(f, "ε"),
            Letter::Iso(x) => {
                let inv = if x.inverse { "⁻¹" } else { "" };
                return write!(f, "{}{}[{}]", x.kind.symbol(), inv, x.part);
            }
        };
        match self.site().unwrap_or(Site::Bare) {
            Site::Bare => write!(f, "{base}"),
            Site::Upper => write!(f, "(1∘{base})"),
            Site::Lower => write!(f, "({base}∘1)"),
            Site::Closed => write!(f, "cl({base})"),
            Site::NuPair => write!(f, "ν({base})"),
            Site::Braid3 => write!(f, "η({base})"),
            Site::Zorro => write!(f, "z({base})"),
        }
    }
}

/// A composable list of letters, leftmost applied last.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn has_iso(&self) -> bool {
        self.0.iter().any(|l| l.is_iso())
    }

    /// Target of the word applied to `src`.
    pub fn apply(&self, src: GraphTerm) -> Result<GraphTerm> {
        self.0.iter().rev().try_fold(src, |g, l| l.apply(g))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{}", parts.join("·"))
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

pub type Terms = BTreeMap<Word, BigRational>;

/// A rational combination of words between two shifted graphs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MorphExpr {
    source: GraphTerm,
    target: GraphTerm,
    terms: Terms,
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl MorphExpr {
    pub fn zero(source: GraphTerm, target: GraphTerm) -> Self {
        Self { source, target, terms: Terms::new() }
    }

    pub fn identity(term: GraphTerm) -> Self {
        Self::scalar(term, rat(1))
    }

    pub fn scalar(term: GraphTerm, c: BigRational) -> Self {
        let mut terms = Terms::new();
        if !c.is_zero() {
            terms.insert(Word::identity(), c);
        }
        Self { source: term, target: term, terms }
    }

    pub fn letter(l: Letter, source: GraphTerm) -> Result<Self> {
        Self::word(source, vec![l])
    }

    /// A single word with coefficient 1; the target is computed.
    pub fn word(source: GraphTerm, letters: Vec<Letter>) -> Result<Self> {
        let w = Word(letters);
        let target = w.apply(source)?;
        Self::from_terms(source, target, [(w, rat(1))])
    }

    /// Builds and normalizes a combination, checking every word's interface.
    pub fn from_terms<I>(source: GraphTerm, target: GraphTerm, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Word, BigRational)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        for (w, _) in &terms {
            let t = w.apply(source)?;
            if t != target {
                return Err(Error::InterfaceMismatch(format!("{w} maps {source} to {t}, expected {target}")));
            }
        }
        Ok(Self { source, target, terms: normalize_terms(terms, None) })
    }

    pub fn source(&self) -> GraphTerm {
        self.source
    }

    pub fn target(&self) -> GraphTerm {
        self.target
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_iso_letters(&self) -> bool {
        self.terms.keys().any(|w| w.has_iso())
    }

    /// The only term, if there is exactly one.
    pub fn single_term(&self) -> Option<(&Word, &BigRational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// `self ∘ g`: `g` is applied first.
    pub fn compose(&self, g: &MorphExpr) -> Result<MorphExpr> {
        self.compose_traced(g, None)
    }

    pub fn compose_traced(&self, g: &MorphExpr, tags: Option<&mut Vec<&'static str>>) -> Result<MorphExpr> {
        if g.target != self.source {
            return Err(Error::InterfaceMismatch(format!(
                "cannot compose {} -> {} after {} -> {}",
                self.source, self.target, g.source, g.target
            )));
        }
        if self.is_zero() || g.is_zero() {
            return Ok(MorphExpr::zero(g.source, self.target));
        }
        let mut out = Vec::with_capacity(self.terms.len() * g.terms.len());
        for (wf, cf) in &self.terms {
            for (wg, cg) in &g.terms {
                let mut w = wf.0.clone();
                w.extend_from_slice(&wg.0);
                out.push((Word(w), cf * cg));
            }
        }
        Ok(MorphExpr { source: g.source, target: self.target, terms: normalize_terms(out, tags) })
    }

    pub fn add(&self, other: &MorphExpr) -> Result<MorphExpr> {
        self.check_same_interface(other)?;
        let mut terms = self.terms.clone();
        for (w, c) in &other.terms {
            add_into(&mut terms, w.clone(), c.clone());
        }
        if collapse_partition_of_unity(&terms).is_some() {
            terms = normalize_terms(terms, None);
        }
        Ok(MorphExpr { source: self.source, target: self.target, terms })
    }

    pub fn sub(&self, other: &MorphExpr) -> Result<MorphExpr> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MorphExpr {
        self.scale(&rat(-1))
    }

    pub fn scale(&self, c: &BigRational) -> MorphExpr {
        if c.is_zero() {
            return MorphExpr::zero(self.source, self.target);
        }
        let terms = self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect();
        MorphExpr { source: self.source, target: self.target, terms }
    }

    pub fn shifted(&self, s: i64) -> MorphExpr {
        MorphExpr { source: self.source.shifted(s), target: self.target.shifted(s), terms: self.terms.clone() }
    }

    /// Same words between different endpoints; the caller guarantees the
    /// words still make sense there.
    pub(crate) fn retyped(&self, source: GraphTerm, target: GraphTerm) -> MorphExpr {
        MorphExpr { source, target, terms: self.terms.clone() }
    }

    /// Rewrites every letter with `f`, checking the new interface.
    pub fn map_letters<F>(&self, source: GraphTerm, target: GraphTerm, mut f: F) -> Result<MorphExpr>
    where
        F: FnMut(Letter) -> Result<Letter>,
    {
        let mut out = Vec::with_capacity(self.terms.len());
        for (w, c) in &self.terms {
            let letters = w.0.iter().map(|&l| f(l)).collect::<Result<Vec<_>>>()?;
            out.push((Word(letters), c.clone()));
        }
        MorphExpr::from_terms(source, target, out)
    }

    /// `c` when the expression is `c·1` with `c ≠ 0` on a single shifted graph.
    pub fn is_identity_pivot(&self) -> Option<BigRational> {
        if self.source != self.target {
            return None;
        }
        match self.single_term() {
            Some((w, c)) if w.is_identity() => Some(c.clone()),
            _ => None,
        }
    }

    fn check_same_interface(&self, other: &MorphExpr) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::InterfaceMismatch(format!(
                "{} -> {} vs {} -> {}",
                self.source, self.target, other.source, other.target
            )));
        }
        Ok(())
    }
}

fn add_into(terms: &mut Terms, w: Word, c: BigRational) {
    if c.is_zero() {
        return;
    }
    match terms.entry(w) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn fmt_coeff_word(f: &mut fmt::Formatter<'_>, c: &BigRational, w: &Word, first: bool) -> fmt::Result {
    let neg = c.is_negative();
    let a = c.abs();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else {
        write!(f, "{}", if neg { " - " } else { " + " })?;
    }
    if a.is_one() {
        write!(f, "{w}")
    } else if w.is_identity() {
        write!(f, "{a}")
    } else {
        write!(f, "{a}{w}")
    }
}

impl fmt::Display for MorphExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            fmt_coeff_word(f, c, w, i == 0)?;
        }
        Ok(())
    }
}

impl fmt::Debug for MorphExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : {} -> {}", self, self.source, self.target)
    }
}

impl Serialize for MorphExpr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

// ---------------------------------------------------------------------------
// Rewrite system

struct Rewrite {
    tag: &'static str,
    /// Replacement words with integer coefficients; empty means zero.
    out: Vec<(Vec<Letter>, i64)>,
}

fn rw(tag: &'static str, out: Vec<(Vec<Letter>, i64)>) -> Option<Rewrite> {
    Some(Rewrite { tag, out })
}

fn one() -> Vec<(Vec<Letter>, i64)> {
    vec![(Vec::new(), 1)]
}

fn nothing() -> Vec<(Vec<Letter>, i64)> {
    Vec::new()
}

fn just(ls: Vec<Letter>) -> Vec<(Vec<Letter>, i64)> {
    vec![(ls, 1)]
}

fn scalar_site(s: Site) -> bool {
    matches!(s, Site::Bare | Site::Upper | Site::Lower)
}

fn alpha_site(s: Site) -> bool {
    scalar_site(s) || s == Site::Closed
}

fn is_alpha_or_gamma(l: Letter, site: Site) -> bool {
    matches!(l, Letter::Alpha(s) | Letter::Gamma(s) if s == site)
}

fn single_rule(a: Letter) -> Option<Rewrite> {
    match a {
        Letter::Chi0(Site::Zorro) => rw("moyz", nothing()),
        _ => None,
    }
}

/// Rules on `(χ0∘1)·c` with `c` ending in χ0, where `(χ0∘1)·c = (1∘χ0)·c`.
fn triple_rule(a: Letter, b: Letter, c: Letter) -> Option<Rewrite> {
    use Letter::*;
    use Site::*;
    if b != Chi0(Lower) || !matches!(c, Chi0(Bare) | Alpha(Bare)) {
        return None;
    }
    match a {
        Iso(x) if x.kind == IsoKind::PsiR && !x.inverse => {
            rw("moy2c-r", if x.part == 0 { just(vec![c]) } else { just(vec![Gamma(Bare), c]) })
        }
        Gamma(Lower) => rw("interchange", just(vec![Chi0(Upper), Gamma(Bare), c])),
        _ => None,
    }
}

fn pair_rule(a: Letter, b: Letter) -> Option<Rewrite> {
    match (a, b) {
        (Letter::Iso(x), Letter::Iso(y)) => {
            if !x.inverse && y.inverse && x.kind == y.kind && x.n == y.n {
                rw("iso", if x.part == y.part { one() } else { nothing() })
            } else {
                None
            }
        }
        (Letter::Iso(x), _) if !x.inverse => iso_left(x, b),
        (_, Letter::Iso(y)) if y.inverse => iso_right(a, y),
        _ => scalar_rule(a, b),
    }
}

/// `X_p · b` for a forward iso component.
fn iso_left(x: IsoLetter, b: Letter) -> Option<Rewrite> {
    use IsoKind::*;
    use Letter::*;
    use Site::*;
    let p = x.part as usize;
    let n = x.n as usize;
    let first = p == 0;
    match (x.kind, b) {
        (Phi, Chi0(Upper)) => rw("moy2a", if first { one() } else { nothing() }),
        (Phi, Chi0(Lower)) => rw("moy2b", if first { one() } else { just(vec![Alpha(Bare)]) }),
        (Psi, Chi0(Lower)) => rw("moy2c", if first { one() } else { just(vec![Gamma(Bare)]) }),
        (Psi, Alpha(Upper)) => rw("shift1", if first { just(vec![Letter::iso(Phi, 1, 0)]) } else { nothing() }),
        (Phi, Gamma(Upper)) => rw("shift2", if first { just(vec![Letter::iso(Psi, 1, 0)]) } else { nothing() }),
        (Phi, Alpha(Upper)) if !first => rw("shift1", nothing()),
        (PhiR, Alpha(Lower)) if !first => rw("shift1-r", nothing()),
        (PhiR, Chi0(Lower)) => rw("moy2a-r", if first { one() } else { nothing() }),
        (PhiR, Chi0(Upper)) => rw("moy2b-r", if first { one() } else { just(vec![Alpha(Bare)]) }),
        (PsiR, Chi0(Upper)) => rw("moy2c-r", if first { one() } else { just(vec![Gamma(Bare)]) }),
        (PsiR, Alpha(Lower)) => rw("shift1-r", if first { just(vec![Letter::iso(PhiR, 1, 0)]) } else { nothing() }),
        (PhiR, Gamma(Lower)) => rw("shift2-r", if first { just(vec![Letter::iso(PsiR, 1, 0)]) } else { nothing() }),
        (Mu, Chi0(Closed)) => rw("moychi0", just(vec![Letter::iso(LambdaOne, p + 1, n)])),
        (LambdaOne, Chi1(Closed)) => {
            rw("moychi1", if p + 1 < n { just(vec![Letter::iso(Mu, p, n)]) } else { nothing() })
        }
        (Mu, Alpha(Closed)) => rw("moychi0a", nothing()),
        (Mu, Gamma(Closed)) => rw("moychi0b", just(vec![Epsilon, Letter::Iso(x)])),
        (Lambda, Epsilon) => {
            rw("moyepsilon", if p + 1 < n { just(vec![Letter::iso(Lambda, p + 1, n)]) } else { nothing() })
        }
        (Nu, Chi0(NuPair)) => rw("moynu1", if first { nothing() } else { just(vec![Letter::iso(MuStrand, p, n)]) }),
        (MuStrandR, Chi1(NuPair)) => {
            rw("moynu2", if p + 2 < n { just(vec![Letter::iso(Nu, p + 1, n)]) } else { nothing() })
        }
        (Eta, Chi0(Braid3)) => rw("moyeta", if first { just(vec![Chi1(Braid3)]) } else { nothing() }),
        _ => None,
    }
}

/// `a · X⁻¹_p` for an inverse iso component.
fn iso_right(a: Letter, y: IsoLetter) -> Option<Rewrite> {
    use IsoKind::*;
    use Letter::*;
    use Site::*;
    let first = y.part == 0;
    match (a, y.kind) {
        (Chi1(Upper), Phi) => rw("moy2d", if first { nothing() } else { one() }),
        (Chi1(Lower), PhiR) => rw("moy2d-r", if first { nothing() } else { one() }),
        _ => None,
    }
}

fn scalar_rule(a: Letter, b: Letter) -> Option<Rewrite> {
    use Letter::*;
    use Site::*;
    match (a, b) {
        (Chi1(s), Chi0(t)) if s == t && scalar_site(s) => rw("chi1chi0", nothing()),
        (Chi0(s), Chi1(t)) if s == t && scalar_site(s) => rw("alpha", just(vec![Alpha(s)])),
        (Chi1(s), Alpha(t)) if s == t && alpha_site(s) => rw("alpha", nothing()),
        (Alpha(s), Chi0(t)) if s == t && alpha_site(s) => rw("alpha", nothing()),
        (Alpha(s), Alpha(t)) if s == t && alpha_site(s) => rw("alpha", nothing()),
        (Gamma(s), Alpha(t)) if s == t && alpha_site(s) => rw("gamma-alpha", nothing()),
        (Alpha(s), Gamma(t)) if s == t && alpha_site(s) => rw("alpha-gamma", nothing()),
        // a whiskered letter on one factor commutes past χ0/χ1 on the other
        (x, Chi0(Lower)) if is_alpha_or_gamma(x, Upper) => {
            rw("interchange", just(vec![Chi0(Lower), x.with_site(Bare)]))
        }
        (x, Chi0(Upper)) if is_alpha_or_gamma(x, Lower) => {
            rw("interchange", just(vec![Chi0(Upper), x.with_site(Bare)]))
        }
        (Chi1(Upper), y) if is_alpha_or_gamma(y, Lower) => {
            rw("interchange", just(vec![y.with_site(Bare), Chi1(Upper)]))
        }
        (Chi1(Lower), y) if is_alpha_or_gamma(y, Upper) => {
            rw("interchange", just(vec![y.with_site(Bare), Chi1(Lower)]))
        }
        (Chi1(Upper), Chi0(Lower)) | (Chi1(Lower), Chi0(Upper)) => rw("alpha", just(vec![Alpha(Bare)])),
        (Chi0(Upper), Chi0(Bare)) => rw("interchange", just(vec![Chi0(Lower), Chi0(Bare)])),
        (Chi0(Upper), Alpha(Bare)) => rw("interchange", just(vec![Chi0(Lower), Alpha(Bare)])),
        (Chi1(Bare), Chi1(Lower)) => rw("interchange", just(vec![Chi1(Bare), Chi1(Upper)])),
        _ => None,
    }
}

const REWRITE_LIMIT: usize = 1_000_000;

fn rank(tag: &str) -> u8 {
    match tag {
        "interchange" => 1,
        t if t.starts_with("moy") || t.starts_with("shift") => 2,
        _ => 0,
    }
}

/// Leftmost redex of the most basic rule class present: scalar and inverse
/// pair rules first, then interchange, then transport.
fn find_redex(w: &[Letter]) -> Option<(usize, usize, Rewrite)> {
    let mut best: Option<(u8, usize, usize, Rewrite)> = None;
    for i in 0..w.len() {
        let found = single_rule(w[i])
            .map(|r| (1, r))
            .or_else(|| (i + 1 < w.len()).then(|| pair_rule(w[i], w[i + 1])).flatten().map(|r| (2, r)))
            .or_else(|| (i + 2 < w.len()).then(|| triple_rule(w[i], w[i + 1], w[i + 2])).flatten().map(|r| (3, r)));
        if let Some((len, r)) = found {
            let k = rank(r.tag);
            if k == 0 {
                return Some((i, len, r));
            }
            if best.as_ref().is_none_or(|b| k < b.0) {
                best = Some((k, i, len, r));
            }
        }
    }
    best.map(|(_, i, len, r)| (i, len, r))
}

fn rewrite_to_fixpoint<I>(input: I, mut tags: Option<&mut Vec<&'static str>>) -> Terms
where
    I: IntoIterator<Item = (Word, BigRational)>,
{
    let mut stack: Vec<(Vec<Letter>, BigRational)> = input.into_iter().map(|(w, c)| (w.0, c)).collect();
    let mut out = Terms::new();
    let mut steps = 0usize;
    while let Some((w, c)) = stack.pop() {
        if c.is_zero() {
            continue;
        }
        match find_redex(&w) {
            None => add_into(&mut out, Word(w), c),
            Some((i, len, r)) => {
                steps += 1;
                assert!(steps < REWRITE_LIMIT, "rewrite system did not terminate");
                if let Some(t) = tags.as_deref_mut() {
                    t.push(r.tag);
                }
                for (rep, k) in r.out {
                    let mut nw = Vec::with_capacity(w.len() - len + rep.len());
                    nw.extend_from_slice(&w[..i]);
                    nw.extend(rep);
                    nw.extend_from_slice(&w[i + len..]);
                    stack.push((nw, &c * rat(k)));
                }
            }
        }
    }
    out
}

/// Finds `Σ_p prefix·X⁻¹_p·X_p·suffix` over all parts with equal
/// coefficients and returns the collapsed combination.
fn collapse_partition_of_unity(terms: &Terms) -> Option<Terms> {
    type Key = (Vec<Letter>, Vec<Letter>, IsoKind, u16);
    let mut groups: BTreeMap<Key, Vec<(u16, Word)>> = BTreeMap::new();
    for w in terms.keys() {
        let l = &w.0;
        for i in 0..l.len().saturating_sub(1) {
            if let (Letter::Iso(a), Letter::Iso(b)) = (l[i], l[i + 1]) {
                if a.inverse && !b.inverse && a.kind == b.kind && a.n == b.n && a.part == b.part {
                    let key = (l[..i].to_vec(), l[i + 2..].to_vec(), a.kind, a.n);
                    groups.entry(key).or_default().push((a.part, w.clone()));
                }
            }
        }
    }
    for ((prefix, suffix, kind, n), members) in groups {
        let count = kind.part_count(n as usize);
        let parts: BTreeSet<u16> = members.iter().map(|m| m.0).collect();
        if parts.len() != count || members.len() != count {
            continue;
        }
        let c = &terms[&members[0].1];
        if members.iter().any(|(_, w)| &terms[w] != c) {
            continue;
        }
        let mut out = terms.clone();
        for (_, w) in &members {
            out.remove(w);
        }
        let mut joined = prefix;
        joined.extend(suffix);
        add_into(&mut out, Word(joined), c.clone());
        return Some(out);
    }
    None
}

/// Normal form of a combination of words.
pub fn normalize_terms<I>(input: I, mut tags: Option<&mut Vec<&'static str>>) -> Terms
where
    I: IntoIterator<Item = (Word, BigRational)>,
{
    let mut terms = rewrite_to_fixpoint(input, tags.as_deref_mut());
    while let Some(collapsed) = collapse_partition_of_unity(&terms) {
        if let Some(t) = tags.as_deref_mut() {
            t.push("iso-sum");
        }
        terms = rewrite_to_fixpoint(collapsed, tags.as_deref_mut());
    }
    terms
}

pub fn normalize(f: &MorphExpr) -> MorphExpr {
    MorphExpr { source: f.source, target: f.target, terms: normalize_terms(f.terms.clone(), None) }
}

pub fn compose(f: &MorphExpr, g: &MorphExpr) -> Result<MorphExpr> {
    f.compose(g)
}

pub fn is_identity_pivot(f: &MorphExpr) -> Option<BigRational> {
    f.is_identity_pivot()
}

// ---------------------------------------------------------------------------
// Matrices

/// A matrix of morphisms between two ordered lists of shifted graphs;
/// `entry(r, c)` maps `source[c]` to `target[r]`.
#[derive(Clone, PartialEq, Eq)]
pub struct MorphMatrix {
    source: Vec<GraphTerm>,
    target: Vec<GraphTerm>,
    entries: Vec<Vec<MorphExpr>>,
}

impl MorphMatrix {
    pub fn zero(source: Vec<GraphTerm>, target: Vec<GraphTerm>) -> Self {
        let entries = target.iter().map(|&t| source.iter().map(|&s| MorphExpr::zero(s, t)).collect()).collect();
        Self { source, target, entries }
    }

    pub fn identity(objects: Vec<GraphTerm>) -> Self {
        let mut m = Self::zero(objects.clone(), objects.clone());
        for (i, &g) in objects.iter().enumerate() {
            m.entries[i][i] = MorphExpr::identity(g);
        }
        m
    }

    /// Rows of entries; interfaces are read off and checked.
    pub fn from_entries(source: Vec<GraphTerm>, target: Vec<GraphTerm>, entries: Vec<Vec<MorphExpr>>) -> Result<Self> {
        if entries.len() != target.len() {
            return Err(Error::DimensionMismatch(format!("{} rows for {} targets", entries.len(), target.len())));
        }
        for (r, row) in entries.iter().enumerate() {
            if row.len() != source.len() {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries for {} sources",
                    row.len(),
                    source.len()
                )));
            }
            for (c, e) in row.iter().enumerate() {
                if e.source() != source[c] || e.target() != target[r] {
                    return Err(Error::InterfaceMismatch(format!(
                        "entry ({r}, {c}) is {:?}, expected {} -> {}",
                        e, source[c], target[r]
                    )));
                }
            }
        }
        Ok(Self { source, target, entries })
    }

    /// Matrix from nonempty rows; interfaces come from the entries.
    pub fn from_rows(entries: Vec<Vec<MorphExpr>>) -> Result<Self> {
        let target: Vec<GraphTerm> = entries.iter().map(|r| r[0].target()).collect();
        let source: Vec<GraphTerm> = entries[0].iter().map(|e| e.source()).collect();
        Self::from_entries(source, target, entries)
    }

    pub fn column(entries: Vec<MorphExpr>) -> Result<Self> {
        Self::from_rows(entries.into_iter().map(|e| vec![e]).collect())
    }

    pub fn row(entries: Vec<MorphExpr>) -> Result<Self> {
        Self::from_rows(vec![entries])
    }

    pub fn source(&self) -> &[GraphTerm] {
        &self.source
    }

    pub fn target(&self) -> &[GraphTerm] {
        &self.target
    }

    pub fn rows(&self) -> usize {
        self.target.len()
    }

    pub fn cols(&self) -> usize {
        self.source.len()
    }

    pub fn entry(&self, r: usize, c: usize) -> &MorphExpr {
        &self.entries[r][c]
    }

    pub fn entries(&self) -> &[Vec<MorphExpr>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|e| e.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.entries.iter().enumerate().all(|(r, row)| {
                row.iter().enumerate().all(|(c, e)| {
                    if r == c {
                        e.is_identity_pivot().is_some_and(|x| x.is_one())
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    pub fn has_iso_letters(&self) -> bool {
        self.entries.iter().flatten().any(|e| e.has_iso_letters())
    }

    /// `self ∘ other`: `other` is applied first.
    pub fn compose(&self, other: &MorphMatrix) -> Result<MorphMatrix> {
        self.compose_traced(other, None)
    }

    pub fn compose_traced(&self, other: &MorphMatrix, mut tags: Option<&mut Vec<&'static str>>) -> Result<MorphMatrix> {
        if self.source != other.target {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose matrices: [{}] vs [{}]",
                fmt_terms(&self.source),
                fmt_terms(&other.target)
            )));
        }
        let mut out = MorphMatrix::zero(other.source.clone(), self.target.clone());
        for r in 0..self.rows() {
            for k in 0..self.cols() {
                let a = &self.entries[r][k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols() {
                    let b = &other.entries[k][c];
                    if b.is_zero() {
                        continue;
                    }
                    let p = a.compose_traced(b, tags.as_deref_mut())?;
                    out.entries[r][c] = out.entries[r][c].add(&p)?;
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &MorphMatrix) -> Result<MorphMatrix> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::DimensionMismatch("matrix sum with different interfaces".into()));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.add(y)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(MorphMatrix { source: self.source.clone(), target: self.target.clone(), entries })
    }

    pub fn scale(&self, c: &BigRational) -> MorphMatrix {
        MorphMatrix {
            source: self.source.clone(),
            target: self.target.clone(),
            entries: self.entries.iter().map(|row| row.iter().map(|e| e.scale(c)).collect()).collect(),
        }
    }

    pub fn shifted(&self, s: i64) -> MorphMatrix {
        MorphMatrix {
            source: self.source.iter().map(|g| g.shifted(s)).collect(),
            target: self.target.iter().map(|g| g.shifted(s)).collect(),
            entries: self.entries.iter().map(|row| row.iter().map(|e| e.shifted(s)).collect()).collect(),
        }
    }

    pub(crate) fn remove_row(&mut self, r: usize) {
        self.target.remove(r);
        self.entries.remove(r);
    }

    pub(crate) fn remove_col(&mut self, c: usize) {
        self.source.remove(c);
        for row in &mut self.entries {
            row.remove(c);
        }
    }

    pub(crate) fn set(&mut self, r: usize, c: usize, e: MorphExpr) {
        debug_assert_eq!(e.source(), self.source[c]);
        debug_assert_eq!(e.target(), self.target[r]);
        self.entries[r][c] = e;
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.entries.iter().map(|row| row.iter().map(|e| e.to_string()).collect()).collect()
    }
}

fn fmt_terms(ts: &[GraphTerm]) -> String {
    ts.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(", ")
}

impl fmt::Display for MorphMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> =
            self.entries.iter().map(|row| row.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")).collect();
        write!(f, "({})", rows.join("; "))
    }
}

impl fmt::Debug for MorphMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : [{}] -> [{}]", self, fmt_terms(&self.source), fmt_terms(&self.target))
    }
}

pub fn matrix_compose(a: &MorphMatrix, b: &MorphMatrix) -> Result<MorphMatrix> {
    a.compose(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use GraphName::*;
    use Letter::*;
    use Site::*;

    fn g(name: GraphName, shift: i64) -> GraphTerm {
        GraphTerm::new(name, shift)
    }

    fn w(source: GraphTerm, letters: Vec<Letter>) -> MorphExpr {
        MorphExpr::word(source, letters).unwrap()
    }

    #[test]
    fn chi1_after_chi0_vanishes() {
        let chi0 = w(g(Id2, -1), vec![Chi0(Bare)]);
        let chi1 = w(g(S, 0), vec![Chi1(Bare)]);
        assert!(chi1.compose(&chi0).unwrap().is_zero());
    }

    #[test]
    fn identity_is_neutral() {
        let f = w(g(S, -1), vec![Alpha(Bare)]);
        let one = MorphExpr::identity(g(S, 1));
        assert_eq!(one.compose(&f).unwrap(), f);
        assert_eq!(f.compose(&MorphExpr::identity(g(S, -1))).unwrap(), f);
    }

    #[test]
    fn alpha_squared_vanishes() {
        let a1 = w(g(S, 0), vec![Alpha(Bare)]);
        let a2 = w(g(S, 2), vec![Alpha(Bare)]);
        assert!(a2.compose(&a1).unwrap().is_zero());
        // unfolded: χ0χ1χ0χ1 contains χ1χ0
        assert!(w(g(S, 0), vec![Chi0(Bare), Chi1(Bare), Chi0(Bare), Chi1(Bare)]).is_zero());
    }

    #[test]
    fn gamma_alpha_words_vanish() {
        assert!(w(g(S, 0), vec![Gamma(Bare), Alpha(Bare)]).is_zero());
        assert!(w(g(S, 0), vec![Alpha(Bare), Gamma(Bare)]).is_zero());
        assert!(w(g(Id2, -1), vec![Chi1(Bare), Alpha(Bare), Chi0(Bare)]).is_zero());
        assert!(!w(g(S, 0), vec![Gamma(Bare), Gamma(Bare)]).is_zero());
    }

    #[test]
    fn chi0_chi1_is_alpha() {
        let e = w(g(S, -1), vec![Chi0(Bare), Chi1(Bare)]);
        assert_eq!(e, w(g(S, -1), vec![Alpha(Bare)]));
        let whiskered = w(g(S, -1), vec![Chi1(Upper), Chi0(Lower)]);
        assert_eq!(whiskered, e);
    }

    #[test]
    fn iso_pairs() {
        let ss = g(SS, 0);
        for p in 0..2 {
            for q in 0..2 {
                let part = IsoKind::Phi.parts(0)[q].shifted(0);
                let e = w(part, vec![Letter::iso(IsoKind::Phi, p, 0), Letter::iso_inv(IsoKind::Phi, q, 0)]);
                if p == q {
                    assert_eq!(e.is_identity_pivot(), Some(rat(1)));
                } else {
                    assert!(e.is_zero());
                }
            }
        }
        // Σ φ⁻¹_p φ_p = 1
        let sum = w(ss, vec![Letter::iso_inv(IsoKind::Phi, 0, 0), Letter::iso(IsoKind::Phi, 0, 0)])
            .add(&w(ss, vec![Letter::iso_inv(IsoKind::Phi, 1, 0), Letter::iso(IsoKind::Phi, 1, 0)]))
            .unwrap();
        assert_eq!(sum, MorphExpr::identity(ss));
        let half = w(ss, vec![Letter::iso_inv(IsoKind::Phi, 0, 0), Letter::iso(IsoKind::Phi, 0, 0)]);
        assert!(half.is_identity_pivot().is_none());
    }

    #[test]
    fn pivots() {
        assert_eq!(MorphExpr::identity(g(S, 3)).is_identity_pivot(), Some(rat(1)));
        assert_eq!(MorphExpr::scalar(g(S, 3), rat(-1)).is_identity_pivot(), Some(rat(-1)));
        assert!(w(g(S, 1), vec![Alpha(Bare)]).is_identity_pivot().is_none());
        assert!(MorphExpr::zero(g(S, 1), g(S, 1)).is_identity_pivot().is_none());
    }

    #[test]
    fn interface_mismatch() {
        let a = w(g(S, 0), vec![Alpha(Bare)]);
        assert!(matches!(a.compose(&a), Err(Error::InterfaceMismatch(_))));
        assert!(MorphExpr::word(g(Id2, 0), vec![Alpha(Bare)]).is_err());
    }

    #[test]
    fn gamma_alpha_matrix_identity() {
        // (1; γ)·α = (0 1; 0 0)·(1; α) = (α; 0)
        let s = g(S, 1);
        let col_gamma = MorphMatrix::column(vec![MorphExpr::identity(g(S, 3)), w(g(S, 3), vec![Gamma(Bare)])]).unwrap();
        let alpha = MorphMatrix::column(vec![w(s, vec![Alpha(Bare)])]).unwrap();
        let lhs = col_gamma.compose(&alpha).unwrap();
        let shift = MorphMatrix::from_rows(vec![
            vec![MorphExpr::zero(g(S, 1), g(S, 3)), MorphExpr::identity(g(S, 3))],
            vec![MorphExpr::zero(g(S, 1), g(S, 5)), MorphExpr::zero(g(S, 3), g(S, 5))],
        ])
        .unwrap();
        let col_alpha = MorphMatrix::column(vec![MorphExpr::identity(s), w(s, vec![Alpha(Bare)])]).unwrap();
        let rhs = shift.compose(&col_alpha).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.to_strings(), vec![vec!["α".to_string()], vec!["0".to_string()]]);
    }

    #[test]
    fn matrix_identity_neutral() {
        let s = g(S, 1);
        let b = MorphMatrix::column(vec![MorphExpr::identity(s), w(s, vec![Alpha(Bare)])]).unwrap();
        let id = MorphMatrix::identity(b.target().to_vec());
        assert_eq!(id.compose(&b).unwrap(), b);
    }

    #[test]
    fn split_matrix_times_column() {
        // (0 1 1; 0 0 γ)·(1; -α; α) = (0; γα) = 0
        let m = MorphMatrix::from_rows(vec![
            vec![MorphExpr::zero(g(S, 1), g(S, 3)), MorphExpr::identity(g(S, 3)), MorphExpr::identity(g(S, 3))],
            vec![MorphExpr::zero(g(S, 1), g(S, 5)), MorphExpr::zero(g(S, 3), g(S, 5)), w(g(S, 3), vec![Gamma(Bare)])],
        ])
        .unwrap();
        let col = MorphMatrix::column(vec![
            MorphExpr::identity(g(S, 1)),
            w(g(S, 1), vec![Alpha(Bare)]).neg(),
            w(g(S, 1), vec![Alpha(Bare)]),
        ])
        .unwrap();
        assert!(m.compose(&col).unwrap().is_zero());
    }

    #[test]
    fn rendering() {
        let e = w(g(S, 1), vec![Alpha(Bare)]).sub(&w(g(S, 1), vec![Gamma(Bare)]).scale(&rat(2))).unwrap();
        assert_eq!(e.to_string(), "α - 2γ");
        assert_eq!(MorphExpr::scalar(g(S, 1), rat(-1)).to_string(), "-1");
        assert_eq!(w(g(S, 0), vec![Chi0(Lower)]).to_string(), "(χ0∘1)");
        assert_eq!(MorphExpr::zero(g(S, 0), g(S, 0)).to_string(), "0");
    }

    #[test]
    fn tags_are_collected() {
        let mut tags = Vec::new();
        let chi0 = w(g(Id2, -1), vec![Chi0(Bare)]);
        let chi1 = w(g(S, 0), vec![Chi1(Bare)]);
        chi1.compose_traced(&chi0, Some(&mut tags)).unwrap();
        assert_eq!(tags, vec!["chi1chi0"]);
    }
}
