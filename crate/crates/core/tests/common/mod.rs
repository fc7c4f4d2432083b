#![allow(dead_code)]

use moykr_core::graphcat::{GraphName, GraphTerm};
use moykr_core::morphism::{IsoKind, Letter, Site};
use rand::rngs::StdRng;
use rand::Rng;

// Whiskered χ1 is left out: only the catalog squares use it.
fn open_alphabet() -> Vec<Letter> {
    use Letter::*;
    use Site::*;
    let mut v = vec![Chi1(Bare)];
    for s in [Bare, Upper, Lower] {
        v.extend([Chi0(s), Alpha(s), Gamma(s)]);
    }
    for k in [IsoKind::Phi, IsoKind::Psi, IsoKind::PhiR, IsoKind::PsiR] {
        for p in 0..2 {
            v.push(Letter::iso(k, p, 0));
            v.push(Letter::iso_inv(k, p, 0));
        }
    }
    v
}

// Inverse closed-level components are left out: identities such as
// cl(χ0) = Σ μ⁻¹·λ⊗1 only hold as sums.
fn closed_alphabet(n: usize) -> Vec<Letter> {
    use Letter::*;
    use Site::*;
    let mut v = vec![Chi0(Closed), Chi1(Closed), Alpha(Closed), Gamma(Closed), Epsilon];
    for k in [IsoKind::LambdaOne, IsoKind::Mu, IsoKind::Lambda] {
        for p in 0..k.part_count(n) {
            v.push(Letter::iso(k, p, n));
        }
    }
    v
}

/// A random composable word of length `len`, built right to left; shorter
/// only when every start dead-ends.
pub fn random_word(rng: &mut StdRng, closed: bool, len: usize) -> (GraphTerm, Vec<Letter>) {
    let mut best = walk(rng, closed, len);
    for _ in 0..64 {
        if best.1.len() == len {
            break;
        }
        let w = walk(rng, closed, len);
        if w.1.len() > best.1.len() {
            best = w;
        }
    }
    best
}

fn walk(rng: &mut StdRng, closed: bool, len: usize) -> (GraphTerm, Vec<Letter>) {
    let (alphabet, starts) = if closed {
        let n = rng.random_range(2..5);
        (closed_alphabet(n), vec![GraphName::TwoCircles, GraphName::Theta, GraphName::Circle, GraphName::Empty])
    } else {
        (open_alphabet(), vec![GraphName::Id2, GraphName::S, GraphName::SS])
    };
    let src = GraphTerm::new(starts[rng.random_range(0..starts.len())], rng.random_range(-4..5));
    let mut word = Vec::new();
    let mut cur = src;
    for _ in 0..len {
        // X⁻¹·X only collapses as a full sum over parts
        let options: Vec<(Letter, GraphTerm)> = alphabet
            .iter()
            .filter(|&&l| !inverse_after_forward(l, word.first().copied()))
            .filter_map(|&l| l.apply(cur).ok().map(|t| (l, t)))
            .collect();
        if options.is_empty() {
            break;
        }
        let (l, t) = options[rng.random_range(0..options.len())];
        word.insert(0, l);
        cur = t;
    }
    (src, word)
}

fn inverse_after_forward(next: Letter, prev: Option<Letter>) -> bool {
    match (next, prev) {
        (Letter::Iso(a), Some(Letter::Iso(b))) => a.inverse && !b.inverse && a.kind == b.kind,
        _ => false,
    }
}
