//! Bounded formal complexes of formal sums, their totalized composition and
//! tensor product, and the moves that preserve the equivalence class:
//! change of basis and Gaussian elimination.

use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graphcat::{
    compose_terms, identity_graph, tensor_terms, BoundarySeq, FormalSum, GradedVS, GraphName, GraphTerm,
};
use crate::laurent::LaurentPoly;
use crate::morphism::{rat, Letter, MorphExpr, MorphMatrix, Site};

/// `M_min → M_min+1 → ⋯`, where `diffs[i]` maps `objects[i]` to
/// `objects[i + 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalComplex {
    min_degree: i64,
    source: BoundarySeq,
    target: BoundarySeq,
    objects: Vec<FormalSum>,
    diffs: Vec<MorphMatrix>,
}

/// A pivot candidate: `entry(row, col)` of the differential leaving `degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pivot {
    pub degree: i64,
    pub row: usize,
    pub col: usize,
    pub scalar: BigRational,
}

impl FormalComplex {
    /// Checks shapes and boundaries; d² is checked by [`validate`](Self::validate).
    pub fn new(min_degree: i64, objects: Vec<FormalSum>, diffs: Vec<MorphMatrix>) -> Result<Self> {
        let first =
            objects.first().ok_or_else(|| Error::DimensionMismatch("a complex needs at least one object".into()))?;
        let (source, target) = (first.source().clone(), first.target().clone());
        Self::with_boundary(min_degree, source, target, objects, diffs)
    }

    pub fn with_boundary(
        min_degree: i64,
        source: BoundarySeq,
        target: BoundarySeq,
        objects: Vec<FormalSum>,
        diffs: Vec<MorphMatrix>,
    ) -> Result<Self> {
        if diffs.len() + 1 != objects.len().max(1) {
            return Err(Error::DimensionMismatch(format!(
                "{} objects need {} differentials, got {}",
                objects.len(),
                objects.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (i, o) in objects.iter().enumerate() {
            if !o.is_empty() && (o.source() != &source || o.target() != &target) {
                return Err(Error::BoundaryMismatch(format!(
                    "object in degree {} has boundary {} -> {}, expected {source} -> {target}",
                    min_degree + i as i64,
                    o.source(),
                    o.target()
                )));
            }
        }
        for (i, d) in diffs.iter().enumerate() {
            if d.source() != objects[i].terms() || d.target() != objects[i + 1].terms() {
                return Err(Error::DimensionMismatch(format!(
                    "differential in degree {} does not match its objects",
                    min_degree + i as i64
                )));
            }
        }
        Ok(Self { min_degree, source, target, objects, diffs })
    }

    /// `term` alone in `degree`.
    pub fn single(term: GraphTerm, degree: i64) -> Self {
        Self {
            min_degree: degree,
            source: term.source(),
            target: term.target(),
            objects: vec![FormalSum::single(term)],
            diffs: Vec::new(),
        }
    }

    /// The zero complex, kept as one empty object in degree 0.
    pub fn zero(source: BoundarySeq, target: BoundarySeq) -> Self {
        Self {
            min_degree: 0,
            objects: vec![FormalSum::zero(source.clone(), target.clone())],
            source,
            target,
            diffs: Vec::new(),
        }
    }

    /// `g --f--> g'` with `g` in `degree`.
    pub fn arrow(f: MorphExpr, degree: i64) -> Result<Self> {
        let m = MorphMatrix::column(vec![f.clone()])?;
        Self::new(degree, vec![FormalSum::single(f.source()), FormalSum::single(f.target())], vec![m])
    }

    pub fn min_degree(&self) -> i64 {
        self.min_degree
    }

    pub fn max_degree(&self) -> i64 {
        self.min_degree + self.objects.len() as i64 - 1
    }

    pub fn source(&self) -> &BoundarySeq {
        &self.source
    }

    pub fn target(&self) -> &BoundarySeq {
        &self.target
    }

    pub fn objects(&self) -> &[FormalSum] {
        &self.objects
    }

    pub fn diffs(&self) -> &[MorphMatrix] {
        &self.diffs
    }

    fn index(&self, degree: i64) -> Option<usize> {
        let i = degree - self.min_degree;
        (0..self.objects.len() as i64).contains(&i).then_some(i as usize)
    }

    pub fn object(&self, degree: i64) -> Option<&FormalSum> {
        self.index(degree).map(|i| &self.objects[i])
    }

    /// The differential leaving `degree`.
    pub fn diff(&self, degree: i64) -> Option<&MorphMatrix> {
        self.index(degree).and_then(|i| self.diffs.get(i))
    }

    /// Total number of summands over all degrees.
    pub fn size(&self) -> usize {
        self.objects.iter().map(|o| o.len()).sum()
    }

    pub fn has_iso_letters(&self) -> bool {
        self.diffs.iter().any(|d| d.has_iso_letters())
    }

    /// Drops empty objects at both ends.
    pub fn trimmed(&self) -> Self {
        let lo = self.objects.iter().position(|o| !o.is_empty());
        let Some(lo) = lo else {
            return Self::zero(self.source.clone(), self.target.clone());
        };
        let hi = self.objects.iter().rposition(|o| !o.is_empty()).unwrap();
        Self {
            min_degree: self.min_degree + lo as i64,
            source: self.source.clone(),
            target: self.target.clone(),
            objects: self.objects[lo..=hi].to_vec(),
            diffs: self.diffs[lo..hi].to_vec(),
        }
    }

    /// Raises every q-shift by `s`.
    pub fn shifted(&self, s: i64) -> Self {
        Self {
            min_degree: self.min_degree,
            source: self.source.clone(),
            target: self.target.clone(),
            objects: self.objects.iter().map(|o| o.shifted(s)).collect(),
            diffs: self.diffs.iter().map(|d| d.shifted(s)).collect(),
        }
    }

    /// Checks `A_{d+1}·A_d = 0` everywhere.
    pub fn validate(&self) -> Result<()> {
        self.validate_range(self.min_degree, self.max_degree())
    }

    /// Checks `A_{d+1}·A_d = 0` for `lo ≤ d ≤ hi`.
    pub fn validate_range(&self, lo: i64, hi: i64) -> Result<()> {
        for d in lo.max(self.min_degree)..=hi.min(self.max_degree() - 2) {
            let i = (d - self.min_degree) as usize;
            let sq = self.diffs[i + 1].compose(&self.diffs[i])?;
            if !sq.is_zero() {
                return Err(Error::D2Violation {
                    degree: d,
                    detail: format!("{} · {} = {}", self.diffs[i + 1], self.diffs[i], sq),
                });
            }
        }
        Ok(())
    }

    /// Every identity-pivot entry, ordered by degree, row, column.
    pub fn pivots(&self) -> Vec<Pivot> {
        let mut out = Vec::new();
        for (i, d) in self.diffs.iter().enumerate() {
            for row in 0..d.rows() {
                for col in 0..d.cols() {
                    if let Some(scalar) = d.entry(row, col).is_identity_pivot() {
                        out.push(Pivot { degree: self.min_degree + i as i64, row, col, scalar });
                    }
                }
            }
        }
        out
    }

    /// Cancels the summand pair joined by an invertible scalar entry.
    pub fn gauss_eliminate(&self, degree: i64, row: usize, col: usize) -> Result<Self> {
        let not_a_pivot = || Error::NotAPivot { degree, row, col };
        let i = self.index(degree).filter(|&i| i < self.diffs.len()).ok_or_else(not_a_pivot)?;
        let a = &self.diffs[i];
        if row >= a.rows() || col >= a.cols() {
            return Err(not_a_pivot());
        }
        let c = a.entry(row, col).is_identity_pivot().ok_or_else(not_a_pivot)?;
        let c_inv = c.recip();

        let mut out = self.clone();
        let mut na = a.clone();
        for r in 0..a.rows() {
            let x = a.entry(r, col);
            if r == row || x.is_zero() {
                continue;
            }
            let x = x.scale(&c_inv);
            for s in 0..a.cols() {
                let y = a.entry(row, s);
                if s == col || y.is_zero() {
                    continue;
                }
                let e = a.entry(r, s).sub(&x.compose(y)?)?;
                na.set(r, s, e);
            }
        }
        na.remove_row(row);
        na.remove_col(col);
        out.diffs[i] = na;
        if i > 0 {
            out.diffs[i - 1].remove_row(col);
        }
        if i + 1 < out.diffs.len() {
            out.diffs[i + 1].remove_col(row);
        }
        out.objects[i] = out.objects[i].remove(col);
        out.objects[i + 1] = out.objects[i + 1].remove(row);
        if !out.has_iso_letters() {
            out.validate_range(degree - 2, degree + 1)?;
        }
        Ok(out)
    }

    /// Eliminates the first pivot until none is left.
    pub fn auto_reduce(&self) -> Result<Self> {
        self.auto_reduce_by(|_| 0)
    }

    /// Eliminates pivots until none is left; `pick` chooses which of the
    /// current candidates goes next.
    pub fn auto_reduce_by<F>(&self, mut pick: F) -> Result<Self>
    where
        F: FnMut(&[Pivot]) -> usize,
    {
        let mut c = self.clone();
        loop {
            let ps = c.pivots();
            if ps.is_empty() {
                return Ok(c);
            }
            let p = &ps[pick(&ps).min(ps.len() - 1)];
            c = c.gauss_eliminate(p.degree, p.row, p.col)?;
        }
    }

    /// Replaces the object in `degree` through `iso: M_d → M'_d` with inverse
    /// `iso_inv`, conjugating the adjacent differentials.
    pub fn change_basis(&self, degree: i64, iso: &MorphMatrix, iso_inv: &MorphMatrix) -> Result<Self> {
        self.change_basis_traced(degree, iso, iso_inv, None)
    }

    /// [`change_basis`](Self::change_basis), collecting the tags of the
    /// rewrite rules used on the conjugated entries.
    pub fn change_basis_traced(
        &self,
        degree: i64,
        iso: &MorphMatrix,
        iso_inv: &MorphMatrix,
        mut tags: Option<&mut Vec<&'static str>>,
    ) -> Result<Self> {
        let i = self.index(degree).ok_or_else(|| Error::DimensionMismatch(format!("no object in degree {degree}")))?;
        if iso.source() != self.objects[i].terms() || iso_inv.target() != self.objects[i].terms() {
            return Err(Error::DimensionMismatch(format!("basis change does not start at degree {degree}")));
        }
        if !iso.compose(iso_inv)?.is_identity() || !iso_inv.compose(iso)?.is_identity() {
            return Err(Error::NotInvertible(format!("{iso} and {iso_inv} are not mutually inverse")));
        }
        let new_obj = FormalSum::new(self.source.clone(), self.target.clone(), iso.target().to_vec())?;
        let mut out = self.clone();
        if i < self.diffs.len() {
            out.diffs[i] = self.diffs[i].compose_traced(iso_inv, tags.as_deref_mut())?;
        }
        if i > 0 {
            out.diffs[i - 1] = iso.compose_traced(&self.diffs[i - 1], tags)?;
        }
        out.objects[i] = new_obj;
        if !out.has_iso_letters() {
            out.validate_range(degree - 2, degree)?;
        }
        Ok(out)
    }

    /// Rescales summands so that the first nonzero single-term entry of each
    /// row of every differential has coefficient 1.
    pub fn make_monic(&self) -> Result<Self> {
        let mut c = self.clone();
        for i in 0..c.diffs.len() {
            let d = &c.diffs[i];
            let mut scales = vec![rat(1); d.rows()];
            for (r, s) in scales.iter_mut().enumerate() {
                let lead = (0..d.cols()).map(|k| d.entry(r, k)).find(|e| !e.is_zero());
                if let Some((_, x)) = lead.and_then(|e| e.single_term()) {
                    *s = x.recip();
                }
            }
            if scales.iter().all(|s| s.is_one()) {
                continue;
            }
            let terms = c.objects[i + 1].terms().to_vec();
            let diag = |f: &dyn Fn(&BigRational) -> BigRational| {
                let mut m = MorphMatrix::zero(terms.clone(), terms.clone());
                for (r, s) in scales.iter().enumerate() {
                    m.set(r, r, MorphExpr::scalar(terms[r], f(s)));
                }
                m
            };
            let iso = diag(&|s| s.clone());
            let iso_inv = diag(&|s| s.recip());
            c = c.change_basis(c.min_degree + i as i64 + 1, &iso, &iso_inv)?;
        }
        Ok(c)
    }

    /// Σ_i t^i·q^s over the summands `∅{s}` in degree `i`.
    pub fn poincare(&self) -> Result<LaurentPoly> {
        Ok(self.reduced()?.poincare())
    }

    /// The complex as graded vector spaces, once only `∅{s}` summands and
    /// zero differentials remain.
    pub fn reduced(&self) -> Result<ReducedComplex> {
        if let Some(d) = self.diffs.iter().position(|d| !d.is_zero()) {
            return Err(Error::NotReduced(format!("nonzero differential in degree {}", self.min_degree + d as i64)));
        }
        let spaces = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| {
                o.as_graded_vs()
                    .ok_or_else(|| Error::NotReduced(format!("degree {} holds {o}", self.min_degree + i as i64)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ReducedComplex { min_degree: self.min_degree, spaces })
    }

    /// Objects and rendered entries per degree.
    pub fn to_json(&self) -> Value {
        let degrees: Vec<Value> = self
            .objects
            .iter()
            .enumerate()
            .map(|(i, o)| {
                let mut v = json!({
                    "degree": self.min_degree + i as i64,
                    "object": o.terms().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                });
                if let Some(d) = self.diffs.get(i) {
                    v["differential"] = json!(d.to_strings());
                }
                v
            })
            .collect();
        json!({ "min_degree": self.min_degree, "degrees": degrees })
    }
}

impl fmt::Display for FormalComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, o) in self.objects.iter().enumerate() {
            let d = self.min_degree + i as i64;
            writeln!(f, "[{d}] {o}")?;
            if let Some(m) = self.diffs.get(i) {
                writeln!(f, "    A{d} = {m}")?;
            }
        }
        Ok(())
    }
}

pub fn validate(c: &FormalComplex) -> Result<()> {
    c.validate()
}

pub fn gauss_eliminate(c: &FormalComplex, degree: i64, row: usize, col: usize) -> Result<FormalComplex> {
    c.gauss_eliminate(degree, row, col)
}

pub fn auto_reduce(c: &FormalComplex) -> Result<FormalComplex> {
    c.auto_reduce()
}

pub fn change_basis(c: &FormalComplex, degree: i64, iso: &MorphMatrix, iso_inv: &MorphMatrix) -> Result<FormalComplex> {
    c.change_basis(degree, iso, iso_inv)
}

pub fn poincare(c: &FormalComplex) -> Result<LaurentPoly> {
    c.poincare()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Product {
    Compose,
    Tensor,
}

fn is_identity_name(g: GraphName) -> bool {
    identity_graph(&g.source()).is_ok_and(|id| id == g)
}

/// `e` acting on one factor of a product whose other factor is `other`.
/// `first` says whether `e` acts on the first factor (top for composition,
/// left for tensor).
fn whisker(e: &MorphExpr, other: GraphTerm, first: bool, product: Product) -> Result<MorphExpr> {
    let combine = |g: GraphTerm| -> Result<GraphTerm> {
        let (a, b) = if first { (g, other) } else { (other, g) };
        match product {
            Product::Compose => compose_terms(a, b),
            Product::Tensor => tensor_terms(a, b),
        }
    };
    let (src, tgt) = (combine(e.source())?, combine(e.target())?);
    if e.is_zero() {
        return Ok(MorphExpr::zero(src, tgt));
    }
    let transparent = match product {
        Product::Compose => is_identity_name(other.name),
        Product::Tensor => other.name == GraphName::Empty,
    };
    if transparent {
        return e.map_letters(src, tgt, Ok);
    }
    if product == Product::Compose && other.name == GraphName::S {
        let site = if first { Site::Upper } else { Site::Lower };
        return e.map_letters(src, tgt, |l| match l.site() {
            Some(Site::Bare) => Ok(l.with_site(site)),
            _ => Err(Error::CatalogIncomplete(format!("cannot whisker {l} with {other}"))),
        });
    }
    let words: Vec<Letter> = e.terms().keys().flat_map(|w| w.letters().to_vec()).collect();
    if words.is_empty() {
        return Ok(e.retyped(src, tgt));
    }
    Err(Error::CatalogIncomplete(format!("cannot extend {e} by {other}")))
}

fn totalize(m: &FormalComplex, n: &FormalComplex, product: Product) -> Result<FormalComplex> {
    let pair = |a: GraphTerm, b: GraphTerm| match product {
        Product::Compose => compose_terms(a, b),
        Product::Tensor => tensor_terms(a, b),
    };
    let (source, target) = match product {
        Product::Compose => {
            if n.target != m.source {
                return Err(Error::BoundaryMismatch(format!("cannot compose complexes: {} vs {}", n.target, m.source)));
            }
            (n.source.clone(), m.target.clone())
        }
        Product::Tensor => (m.source.concat(&n.source), m.target.concat(&n.target)),
    };
    let lo = m.min_degree + n.min_degree;
    let hi = m.max_degree() + n.max_degree();

    // summand layout: per total degree, blocks (i, j) with i ascending, each
    // block listing M_i terms major and N_j terms minor
    struct Block {
        i: i64,
        j: i64,
        offset: usize,
    }
    let mut layout: Vec<Vec<Block>> = Vec::new();
    let mut objects = Vec::new();
    for d in lo..=hi {
        let mut blocks = Vec::new();
        let mut terms = Vec::new();
        for i in m.min_degree..=m.max_degree() {
            let j = d - i;
            let Some(nj) = n.object(j) else { continue };
            let mi = m.object(i).unwrap();
            blocks.push(Block { i, j, offset: terms.len() });
            for &a in mi.terms() {
                for &t in nj.terms() {
                    terms.push(pair(a, t)?);
                }
            }
        }
        objects.push(FormalSum::new(source.clone(), target.clone(), terms)?);
        layout.push(blocks);
    }

    let mut diffs = Vec::new();
    for d in lo..hi {
        let k = (d - lo) as usize;
        let mut mat = MorphMatrix::zero(objects[k].terms().to_vec(), objects[k + 1].terms().to_vec());
        for from in &layout[k] {
            let (mi, nj) = (m.object(from.i).unwrap(), n.object(from.j).unwrap());
            let (na, nt) = (mi.len(), nj.len());
            // horizontal: A_i ⊗ 1 into (i + 1, j)
            if let (Some(a), Some(to)) =
                (m.diff(from.i), layout[k + 1].iter().find(|b| b.i == from.i + 1 && b.j == from.j))
            {
                for ai in 0..na {
                    for t in 0..nt {
                        for ar in 0..a.rows() {
                            let e = a.entry(ar, ai);
                            if e.is_zero() {
                                continue;
                            }
                            let w = whisker(e, nj.terms()[t], true, product)?;
                            mat.set(to.offset + ar * nt + t, from.offset + ai * nt + t, w);
                        }
                    }
                }
            }
            // vertical: (−1)^i 1 ⊗ B_j into (i, j + 1)
            if let (Some(b), Some(to)) =
                (n.diff(from.j), layout[k + 1].iter().find(|b| b.i == from.i && b.j == from.j + 1))
            {
                let sign = if from.i.rem_euclid(2) == 0 { rat(1) } else { rat(-1) };
                let nt2 = b.rows();
                for ai in 0..na {
                    for t in 0..nt {
                        for br in 0..nt2 {
                            let e = b.entry(br, t);
                            if e.is_zero() {
                                continue;
                            }
                            let w = whisker(e, mi.terms()[ai], false, product)?.scale(&sign);
                            mat.set(to.offset + ai * nt2 + br, from.offset + ai * nt + t, w);
                        }
                    }
                }
            }
        }
        diffs.push(mat);
    }
    let out = FormalComplex::with_boundary(lo, source, target, objects, diffs)?;
    if !out.has_iso_letters() {
        out.validate()?;
    }
    Ok(out)
}

/// `tot(M ∘ N)`: summand `M_i ∘ N_j` sits in degree `i + j`; the vertical
/// differential carries the sign `(−1)^i`.
pub fn compose_complexes(m: &FormalComplex, n: &FormalComplex) -> Result<FormalComplex> {
    totalize(m, n, Product::Compose)
}

/// `tot(M ⊗ N)`; only tensor products with `∅`-valued complexes are
/// registered.
pub fn tensor_complexes(m: &FormalComplex, n: &FormalComplex) -> Result<FormalComplex> {
    totalize(m, n, Product::Tensor)
}

/// A complex of graded vector spaces with zero differentials.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedComplex {
    pub min_degree: i64,
    pub spaces: Vec<GradedVS>,
}

impl ReducedComplex {
    pub fn space(&self, degree: i64) -> Option<&GradedVS> {
        let i = degree - self.min_degree;
        (i >= 0).then(|| self.spaces.get(i as usize)).flatten()
    }

    pub fn poincare(&self) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (i, v) in self.spaces.iter().enumerate() {
            p = p + v.dim_q().shift_t(self.min_degree + i as i64);
        }
        p
    }

    /// Drops zero spaces at both ends.
    pub fn trimmed(&self) -> Self {
        let Some(lo) = self.spaces.iter().position(|v| !v.is_zero()) else {
            return Self { min_degree: 0, spaces: Vec::new() };
        };
        let hi = self.spaces.iter().rposition(|v| !v.is_zero()).unwrap();
        Self { min_degree: self.min_degree + lo as i64, spaces: self.spaces[lo..=hi].to_vec() }
    }
}

impl fmt::Display for ReducedComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.spaces.iter().enumerate() {
            writeln!(f, "[{}] {}", self.min_degree + i as i64, v.dim_q())?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcat::GraphName::*;
    use crate::morphism::Letter::*;
    use crate::morphism::Site::Bare;

    fn g(name: GraphName, s: i64) -> GraphTerm {
        GraphTerm::new(name, s)
    }

    fn w(src: GraphTerm, letters: Vec<Letter>) -> MorphExpr {
        MorphExpr::word(src, letters).unwrap()
    }

    fn sigma_plus() -> FormalComplex {
        FormalComplex::arrow(w(g(Id2, 1), vec![Chi0(Bare)]), 0).unwrap()
    }

    /// S{1} → S{1}⊕S{3}⊕S{3} → S{5}⊕S{5} with the entries of the two-step
    /// totalization.
    fn two_step_complex(sign: i64) -> FormalComplex {
        let s = |m| g(S, m);
        let a1 = MorphMatrix::column(vec![
            MorphExpr::identity(s(1)),
            w(s(1), vec![Alpha(Bare)]).scale(&rat(-sign)),
            w(s(1), vec![Alpha(Bare)]),
        ])
        .unwrap();
        let a2 = MorphMatrix::from_rows(vec![
            vec![MorphExpr::zero(s(1), s(5)), w(s(3), vec![Gamma(Bare)]), w(s(3), vec![Gamma(Bare)])],
            vec![MorphExpr::zero(s(1), s(5)), MorphExpr::zero(s(3), s(5)), MorphExpr::zero(s(3), s(5))],
        ])
        .unwrap();
        let objs = vec![
            FormalSum::from_terms(vec![s(1)]).unwrap(),
            FormalSum::from_terms(vec![s(1), s(3), s(3)]).unwrap(),
            FormalSum::from_terms(vec![s(5), s(5)]).unwrap(),
        ];
        FormalComplex::new(0, objs, vec![a1, a2]).unwrap()
    }

    #[test]
    fn sigma_validates() {
        sigma_plus().validate().unwrap();
    }

    #[test]
    fn two_step_totalization_validates() {
        two_step_complex(1).validate().unwrap();
    }

    #[test]
    fn dropping_the_sign_breaks_d2() {
        let c = compose_complexes(&sigma_plus(), &sigma_plus()).unwrap();
        let a1 = c.diff(1).unwrap();
        let unsigned = MorphMatrix::row(vec![a1.entry(0, 0).clone(), a1.entry(0, 1).neg()]).unwrap();
        let bad = FormalComplex::new(0, c.objects().to_vec(), vec![c.diff(0).unwrap().clone(), unsigned]).unwrap();
        let err = bad.validate().unwrap_err();
        assert!(matches!(err, Error::D2Violation { degree: 0, .. }), "{err}");
    }

    #[test]
    fn eliminate_unit_pivot_of_split_column() {
        let c = two_step_complex(1).gauss_eliminate(0, 0, 0).unwrap();
        assert_eq!(c.object(0).unwrap().len(), 0);
        assert_eq!(c.diff(1).unwrap().to_strings(), vec![vec!["γ", "γ"], vec!["0", "0"]]);
    }

    #[test]
    fn eliminate_isomorphism_to_zero() {
        let c = FormalComplex::arrow(MorphExpr::identity(g(S, 2)), 3).unwrap();
        let r = c.auto_reduce().unwrap().trimmed();
        assert_eq!(r.size(), 0);
        assert!(matches!(c.gauss_eliminate(3, 1, 0), Err(Error::NotAPivot { .. })));
        assert!(matches!(sigma_plus().gauss_eliminate(0, 0, 0), Err(Error::NotAPivot { .. })));
    }

    #[test]
    fn elimination_subtracts_zigzag() {
        // (1 -1; 0 -α; 0 α) eliminated at its unit entry leaves (-α + α...) structure
        let s = |m| g(S, m);
        let a = MorphMatrix::from_rows(vec![
            vec![MorphExpr::identity(s(1)), MorphExpr::identity(s(1)).neg()],
            vec![MorphExpr::zero(s(1), s(3)), w(s(1), vec![Alpha(Bare)]).neg()],
            vec![MorphExpr::zero(s(1), s(3)), w(s(1), vec![Alpha(Bare)])],
        ])
        .unwrap();
        let objs = vec![
            FormalSum::from_terms(vec![s(1), s(1)]).unwrap(),
            FormalSum::from_terms(vec![s(1), s(3), s(3)]).unwrap(),
        ];
        let c = FormalComplex::new(0, objs, vec![a]).unwrap().gauss_eliminate(0, 0, 0).unwrap();
        assert_eq!(c.diff(0).unwrap().to_strings(), vec![vec!["-α"], vec!["α"]]);
    }

    #[test]
    fn compose_two_crossings() {
        let c = compose_complexes(&sigma_plus(), &sigma_plus()).unwrap();
        let objs: Vec<String> = c.objects().iter().map(|o| o.to_string()).collect();
        assert_eq!(objs, vec!["id2{2}", "S{3} ⊕ S{3}", "S∘S{4}"]);
        assert_eq!(c.diff(0).unwrap().to_strings(), vec![vec!["χ0"], vec!["χ0"]]);
        assert_eq!(c.diff(1).unwrap().to_strings(), vec![vec!["(1∘χ0)", "-(χ0∘1)"]]);
    }

    #[test]
    fn identity_complex_is_neutral() {
        let id = FormalComplex::single(g(Id2, 0), 0);
        let s = sigma_plus();
        assert_eq!(compose_complexes(&id, &s).unwrap(), s);
        assert_eq!(compose_complexes(&s, &id).unwrap(), s);
    }

    #[test]
    fn tensor_with_empty() {
        let e = |s, d| FormalComplex::single(g(Empty, s), d);
        let c = tensor_complexes(&e(2, 0), &e(3, 1)).unwrap();
        assert_eq!(c.min_degree(), 1);
        assert_eq!(c.objects()[0].terms(), &[g(Empty, 5)]);
        let s = sigma_plus();
        assert_eq!(tensor_complexes(&s, &e(0, 0)).unwrap(), s);
        assert!(matches!(tensor_complexes(&s, &s), Err(Error::CatalogIncomplete(_))));
    }

    #[test]
    fn change_basis_sign_flip_and_permutation() {
        let c = two_step_complex(1);
        let terms = c.object(2).unwrap().terms().to_vec();
        let id = MorphMatrix::identity(terms.clone());
        assert_eq!(c.change_basis(2, &id, &id).unwrap(), c);

        let mut flip = MorphMatrix::identity(terms.clone());
        flip.set(1, 1, MorphExpr::scalar(terms[1], rat(-1)));
        let f = c.change_basis(2, &flip, &flip).unwrap();
        f.validate().unwrap();

        let mid = c.object(1).unwrap().terms().to_vec();
        let mut perm = MorphMatrix::zero(mid.clone(), vec![mid[0], mid[2], mid[1]]);
        perm.set(0, 0, MorphExpr::identity(mid[0]));
        perm.set(1, 2, MorphExpr::identity(mid[2]));
        perm.set(2, 1, MorphExpr::identity(mid[1]));
        let mut perm_inv = MorphMatrix::zero(vec![mid[0], mid[2], mid[1]], mid.clone());
        perm_inv.set(0, 0, MorphExpr::identity(mid[0]));
        perm_inv.set(2, 1, MorphExpr::identity(mid[2]));
        perm_inv.set(1, 2, MorphExpr::identity(mid[1]));
        let p = c.change_basis(1, &perm, &perm_inv).unwrap();
        assert_eq!(p.diff(0).unwrap().to_strings(), vec![vec!["1"], vec!["α"], vec!["-α"]]);
        let id1 = MorphMatrix::identity(mid.clone());
        let mut scaled = id1.clone();
        scaled.set(0, 0, MorphExpr::scalar(mid[0], rat(2)));
        assert!(matches!(c.change_basis(1, &scaled, &id1), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn make_monic_rescales() {
        let c = FormalComplex::arrow(w(g(S, 0), vec![Alpha(Bare)]).scale(&rat(-3)), 0).unwrap();
        let m = c.make_monic().unwrap();
        assert_eq!(m.diff(0).unwrap().to_strings(), vec![vec!["α"]]);
    }

    #[test]
    fn poincare_of_vector_spaces() {
        let c = FormalComplex::single(g(Empty, 0), 0);
        assert_eq!(c.poincare().unwrap(), LaurentPoly::one());
        let objs = vec![FormalSum::from_terms(vec![g(Empty, -2), g(Empty, 0)]).unwrap()];
        let c = FormalComplex::new(0, objs, vec![]).unwrap();
        assert_eq!(c.poincare().unwrap().to_string(), "q^-2 + 1");
        assert!(matches!(sigma_plus().poincare(), Err(Error::NotReduced(_))));
    }

    #[test]
    fn json_dump_has_degrees() {
        let v = sigma_plus().to_json();
        assert_eq!(v["degrees"][0]["differential"][0][0], "χ0");
        assert_eq!(v["degrees"][1]["object"][0], "S{2}");
    }
}
