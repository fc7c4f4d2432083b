//! The 2-strand braid pipeline: powers of σ⁺, closure, graded dimensions, and
//! the closed-form Poincaré and Jones polynomials used to check it.

use num_rational::BigRational;
use serde::Serialize;

use crate::complex::{compose_complexes, FormalComplex, Pivot, ReducedComplex};
use crate::error::{Error, Result};
use crate::graphcat::{FormalSum, GradedVS, GraphName, GraphTerm};
use crate::laurent::{quantum_int, LaurentPoly};
use crate::morphism::{rat, Letter, MorphExpr, MorphMatrix, Site};
use crate::simplify::{close_complex_by, reduce_by, resolve_ss, Trace, TraceEvent};

/// A positive braid on two strands with `crossings` crossings, at level `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BraidSpec {
    pub n: usize,
    pub crossings: usize,
}

impl BraidSpec {
    pub fn new(n: usize, crossings: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidBraid(format!("level must be at least 2, got {n}")));
        }
        if crossings < 1 {
            return Err(Error::InvalidBraid("at least one crossing is needed".into()));
        }
        Ok(Self { n, crossings })
    }

    /// Odd crossing numbers close up to a knot.
    pub fn is_knot(&self) -> bool {
        self.crossings % 2 == 1
    }

    pub fn global_shift(&self) -> i64 {
        (self.n as i64 - 1) * self.crossings as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantResult {
    pub spec: BraidSpec,
    pub poincare: LaurentPoly,
    pub jones: LaurentPoly,
    pub reduced: ReducedComplex,
    pub trace: Vec<TraceEvent>,
}

fn g(name: GraphName, s: i64) -> GraphTerm {
    GraphTerm::new(name, s)
}

/// `id₂{n−1} → S{n}` in degrees 0 and 1.
pub fn sigma_plus(n: usize) -> Result<FormalComplex> {
    let n = n as i64;
    FormalComplex::arrow(MorphExpr::word(g(GraphName::Id2, n - 1), vec![Letter::Chi0(Site::Bare)])?, 0)
}

/// `S{−n} → id₂{1−n}` in degrees −1 and 0.
pub fn sigma_minus(n: usize) -> Result<FormalComplex> {
    let n = n as i64;
    FormalComplex::arrow(MorphExpr::word(g(GraphName::S, -n), vec![Letter::Chi1(Site::Bare)])?, -1)
}

type Picker<'a> = &'a mut dyn FnMut(&[Pivot]) -> usize;

fn tidy(c: &FormalComplex, trace: &mut Trace, pick: Picker<'_>) -> Result<FormalComplex> {
    let out = reduce_by(c, trace, pick)?.make_monic()?.trimmed();
    trace.step("monic", out.min_degree(), "leading entries made monic", &out);
    Ok(out)
}

pub fn compute_open_traced(spec: BraidSpec, trace: &mut Trace) -> Result<FormalComplex> {
    compute_open_by(spec, trace, &mut |_| 0)
}

/// [`compute_open`] with the elimination order chosen by `pick`.
pub fn compute_open_by(spec: BraidSpec, trace: &mut Trace, pick: Picker<'_>) -> Result<FormalComplex> {
    let sigma = sigma_plus(spec.n)?;
    let mut acc = sigma.clone();
    trace.step("sigma", 0, "crossing 1", &acc);
    for i in 2..=spec.crossings {
        let composed = compose_complexes(&acc, &sigma)?;
        composed.validate()?;
        trace.step("compose", composed.min_degree(), format!("crossing {i}"), &composed);
        let split = resolve_ss(&composed, trace)?;
        acc = tidy(&split, trace, pick)?;
    }
    Ok(acc)
}

/// The complex of `spec.crossings` composed copies of σ⁺, simplified after
/// every composition.
pub fn compute_open(spec: BraidSpec) -> Result<FormalComplex> {
    compute_open_traced(spec, &mut Trace::new())
}

/// `id₂ →χ0 S{1} →α S{3} →γ S{5} →α ⋯` up to degree `crossings`, shifted
/// by `(n−1)·crossings`.
pub fn open_normal_form(spec: BraidSpec) -> Result<FormalComplex> {
    let s = spec.global_shift();
    let k = spec.crossings as i64;
    let mut objects = vec![FormalSum::single(g(GraphName::Id2, s))];
    let mut diffs = Vec::new();
    for m in 1..=k {
        let src = objects.last().unwrap().terms()[0];
        let letter = match m {
            1 => Letter::Chi0(Site::Bare),
            _ if m % 2 == 0 => Letter::Alpha(Site::Bare),
            _ => Letter::Gamma(Site::Bare),
        };
        let e = MorphExpr::word(src, vec![letter])?;
        objects.push(FormalSum::single(e.target()));
        diffs.push(MorphMatrix::column(vec![e])?);
    }
    FormalComplex::new(0, objects, diffs)
}

pub fn compute_closed_traced(spec: BraidSpec, trace: &mut Trace) -> Result<InvariantResult> {
    compute_closed_by(spec, trace, &mut |_| 0)
}

/// [`compute_closed`] with the elimination order chosen by `pick`.
pub fn compute_closed_by(spec: BraidSpec, trace: &mut Trace, pick: Picker<'_>) -> Result<InvariantResult> {
    let open = compute_open_by(spec, trace, pick)?;
    let closed = close_complex_by(&open, spec.n, trace, pick)?;
    let reduced = closed.reduced()?.trimmed();
    let poincare = reduced.poincare();
    let jones = poincare.eval_t(&-rat(1))?;
    Ok(InvariantResult { spec, poincare, jones, reduced, trace: trace.events.clone() })
}

/// Runs the full pipeline and reads off the graded dimensions.
pub fn compute_closed(spec: BraidSpec) -> Result<InvariantResult> {
    compute_closed_traced(spec, &mut Trace::new())
}

/// Graded pieces of the closed complex predicted in closed form.
pub fn closed_normal_form(spec: BraidSpec) -> ReducedComplex {
    let n = spec.n;
    let k = spec.crossings as i64;
    let ni = n as i64;
    let qn = GradedVS::quantum(n);
    let qn1 = GradedVS::quantum(n - 1);
    let mut spaces = vec![qn.shifted(1 - ni), GradedVS::new(Vec::new())];
    let pairs = if k % 2 == 1 { (k - 1) / 2 } else { k / 2 - 1 };
    for j in 1..=pairs {
        spaces.push(qn1.shifted(4 * j - ni));
        spaces.push(qn1.shifted(4 * j + ni));
    }
    if k % 2 == 0 {
        spaces.push(qn.tensor(&qn1).shifted(2 * k - 1));
    }
    let s = spec.global_shift();
    let spaces: Vec<GradedVS> = spaces.iter().map(|v| v.shifted(s)).collect();
    ReducedComplex { min_degree: 0, spaces }.trimmed()
}

fn qi(m: usize) -> LaurentPoly {
    quantum_int(m as i64).expect("non-negative")
}

/// Closed-form Poincaré polynomial, expanded as a finite sum.
pub fn oracle(spec: BraidSpec) -> LaurentPoly {
    let n = spec.n as i64;
    let kp = spec.crossings as i64;
    let base = qi(spec.n).shift_q(1 - n);
    let pair = LaurentPoly::monomial(-n, 0, 1) + LaurentPoly::monomial(n, 1, 1);
    let top = if kp % 2 == 1 { (kp - 1) / 2 } else { kp / 2 - 1 };
    let geometric: LaurentPoly = (1..=top).map(|j| LaurentPoly::monomial(4 * j, 2 * j, 1)).sum();
    let mut inner = base + geometric * pair * qi(spec.n - 1);
    if kp % 2 == 0 {
        inner += &(qi(spec.n) * qi(spec.n - 1)).shift_q(2 * kp - 1).shift_t(kp);
    }
    inner.shift_q(spec.global_shift())
}

/// Closed-form Jones polynomial at level `n`.
pub fn jones_formula(spec: BraidSpec) -> LaurentPoly {
    let n = spec.n as i64;
    let kp = spec.crossings as i64;
    let base = qi(spec.n).shift_q(1 - n);
    let pair = LaurentPoly::monomial(-n, 0, 1) - LaurentPoly::monomial(n, 0, 1);
    let top = if kp % 2 == 1 { (kp - 1) / 2 } else { kp / 2 - 1 };
    let geometric: LaurentPoly = (1..=top).map(|j| LaurentPoly::monomial(4 * j, 0, 1)).sum();
    let mut inner = base + geometric * pair * qi(spec.n - 1);
    if kp % 2 == 0 {
        inner += &(qi(spec.n) * qi(spec.n - 1)).shift_q(2 * kp - 1);
    }
    inner.shift_q(spec.global_shift())
}

/// The pipeline's Poincaré polynomial at `t = −1`.
pub fn jones(spec: BraidSpec) -> Result<LaurentPoly> {
    Ok(compute_closed(spec)?.jones)
}

/// Evaluates a Poincaré polynomial at `t = t0`.
pub fn specialize(p: &LaurentPoly, t0: i64) -> Result<LaurentPoly> {
    Ok(p.eval_t(&BigRational::from_integer(t0.into()))?)
}
