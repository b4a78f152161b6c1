//! Noncommutative rewriting engine for coordinates, partial derivatives and
//! the scaling operator: normal ordering, products, conjugation, the ordering
//! transport map Û, and derivative actions via the counit procedure.
//!
//! Generators carry fixed ids: on the line `X0, X1, ∂0, ∂1`; in three
//! dimensions `X0, X+, X3, X−, ∂0, ∂+, ∂3, ∂−`. A monomial is an exponent
//! vector over these ids plus a power of Λ in half units; its position in a
//! word is fixed by an [`Ordering`].

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::error::{QError, QResult};
use crate::matrix::row_reduce;
use crate::qfunc::{fmt_power, fmt_term, join_terms, CFunction};
use crate::qscalar::QScalar;
use crate::rmatrix::standard_metric;
use crate::space::Space;

/// Exponents of the eight generator ids.
pub type Word = [u16; 8];

/// Which differential calculus the derivatives belong to. `Conj` is the
/// calculus obtained by conjugation (the hatted derivatives); its stored
/// generators are related to the hatted symbols by `∂̂ = q^s ∂` with
/// `s = 6` (3D), `s = 1` (line, `∂1`) and `s = 0` for the time derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Calculus {
    Std,
    Conj,
}

impl Calculus {
    pub fn flip(self) -> Calculus {
        match self {
            Calculus::Std => Calculus::Conj,
            Calculus::Conj => Calculus::Std,
        }
    }
}

/// Order of the spatial coordinates in normal-ordered words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CoordOrder {
    /// `X0 X+ X3 X−` (the map W).
    Std,
    /// `X0 X− X3 X+` (the map W̃).
    Rev,
}

/// Whether coordinates stand left or right of derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    /// coordinates, derivatives, Λ
    CoordFirst,
    /// Λ, derivatives, coordinates
    DerivFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Ordering {
    pub coords: CoordOrder,
    pub side: Side,
}

impl Ordering {
    pub const STD: Ordering = Ordering { coords: CoordOrder::Std, side: Side::CoordFirst };
    pub const REV: Ordering = Ordering { coords: CoordOrder::Rev, side: Side::CoordFirst };
    pub fn new(coords: CoordOrder, side: Side) -> Self {
        Ordering { coords, side }
    }
}

/// The four kinds of derivative action.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ActMode {
    /// `∂ ▷ f`
    Left,
    /// `∂̂ ▷̄ f̃`
    LeftHat,
    /// `f̃ ◁ ∂̂`
    Right,
    /// `f ◁̄ ∂`
    RightHat,
}

impl ActMode {
    pub const ALL: [ActMode; 4] = [ActMode::Left, ActMode::LeftHat, ActMode::Right, ActMode::RightHat];
    pub fn calculus(self) -> Calculus {
        match self {
            ActMode::Left | ActMode::Right => Calculus::Std,
            ActMode::LeftHat | ActMode::RightHat => Calculus::Conj,
        }
    }
    /// Ordering in which the acted-on function is read (W or W̃).
    pub fn coord_order(self) -> CoordOrder {
        match self {
            ActMode::Left | ActMode::RightHat => CoordOrder::Std,
            ActMode::LeftHat | ActMode::Right => CoordOrder::Rev,
        }
    }
    pub fn ordering(self) -> Ordering {
        let side = if self.is_left() { Side::CoordFirst } else { Side::DerivFirst };
        Ordering { coords: self.coord_order(), side }
    }
    pub fn is_left(self) -> bool {
        matches!(self, ActMode::Left | ActMode::LeftHat)
    }
    pub fn name(self) -> &'static str {
        match self {
            ActMode::Left => "left",
            ActMode::LeftHat => "left-hat",
            ActMode::Right => "right",
            ActMode::RightHat => "right-hat",
        }
    }
    pub fn parse(s: &str) -> Option<ActMode> {
        match s {
            "left" | "L" => Some(ActMode::Left),
            "left-hat" | "lefthat" | "Lbar" => Some(ActMode::LeftHat),
            "right" | "R" => Some(ActMode::Right),
            "right-hat" | "righthat" | "Rbar" => Some(ActMode::RightHat),
            _ => None,
        }
    }
}

/// A generator: coordinate `X(i)`, derivative `D(i)` (index in the space's
/// label order), or `Λ^{h/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    X(usize),
    D(usize),
    Lam(i32),
}

impl Gen {
    fn id(self, space: Space) -> Option<u8> {
        match self {
            Gen::X(i) if i < space.dim() => Some(i as u8),
            Gen::D(i) if i < space.dim() => Some((space.dim() + i) as u8),
            _ => None,
        }
    }
}

/// Normal-ordered monomial: generator exponents and Λ power (half units).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NcMono {
    pub word: Word,
    pub lam: i32,
}

impl NcMono {
    pub const ONE: NcMono = NcMono { word: [0; 8], lam: 0 };
}

// ---------------------------------------------------------------------------
// Relation data
// ---------------------------------------------------------------------------

type Rel = Vec<(QScalar, Vec<u8>)>;

/// Weight `w` in `Λ g = q^w g Λ`.
fn lambda_weight(space: Space, id: u8) -> i32 {
    let d = space.dim() as u8;
    let w = space.lambda_weight();
    if id == 0 || id == d {
        0
    } else if id < d {
        w
    } else {
        -w
    }
}

/// Hat exponent `s` with `∂̂ = q^s ∂` for derivative index `i`.
pub fn hat_power(space: Space, i: usize) -> i32 {
    if i == 0 {
        0
    } else {
        space.hat_power()
    }
}

fn coord_relations(space: Space) -> Vec<Rel> {
    let one = QScalar::one;
    let m = |c: QScalar| c;
    match space {
        Space::Line => vec![vec![(one(), vec![0, 1]), (-one(), vec![1, 0])]],
        Space::Euclid3 => {
            let (x0, xp, x3, xm) = (0u8, 1u8, 2u8, 3u8);
            let mut v: Vec<Rel> = [xp, x3, xm]
                .iter()
                .map(|&a| vec![(one(), vec![x0, a]), (-one(), vec![a, x0])])
                .collect();
            v.push(vec![(one(), vec![x3, xp]), (m(-QScalar::q_pow(2)), vec![xp, x3])]);
            v.push(vec![(one(), vec![xm, x3]), (m(-QScalar::q_pow(2)), vec![x3, xm])]);
            v.push(vec![(one(), vec![xm, xp]), (-one(), vec![xp, xm]), (-QScalar::lambda(), vec![x3, x3])]);
            v
        }
    }
}

fn deriv_relations(space: Space) -> Vec<Rel> {
    let one = QScalar::one;
    match space {
        Space::Line => vec![vec![(one(), vec![2, 3]), (-one(), vec![3, 2])]],
        Space::Euclid3 => {
            let (d0, dp, d3, dm) = (4u8, 5u8, 6u8, 7u8);
            let mut v: Vec<Rel> = [dp, d3, dm]
                .iter()
                .map(|&a| vec![(one(), vec![d0, a]), (-one(), vec![a, d0])])
                .collect();
            v.push(vec![(one(), vec![dp, d3]), (-QScalar::q_pow(2), vec![d3, dp])]);
            v.push(vec![(one(), vec![d3, dm]), (-QScalar::q_pow(2), vec![dm, d3])]);
            v.push(vec![(one(), vec![dp, dm]), (-one(), vec![dm, dp]), (-QScalar::lambda(), vec![d3, d3])]);
            v
        }
    }
}

/// A Leibniz rule `∂_a X^b = c₀ + Σ c (X ∂)` in hatted/unhatted symbols.
struct Leibniz {
    d: u8,
    x: u8,
    konst: QScalar,
    terms: Vec<(QScalar, u8, u8)>, // (coefficient, coordinate id, derivative id)
}

fn leibniz_data(space: Space, calc: Calculus) -> Vec<Leibniz> {
    let q = QScalar::q_pow;
    let ll = QScalar::lambda() * QScalar::lambda_plus();
    let l2l = QScalar::lambda() * QScalar::lambda() * QScalar::lambda_plus();
    let one = QScalar::one();
    let zero = QScalar::zero();
    let lz = |d: u8, x: u8, konst: &QScalar, terms: Vec<(QScalar, u8, u8)>| Leibniz { d, x, konst: konst.clone(), terms };
    match (space, calc) {
        (Space::Line, Calculus::Std) => vec![
            lz(2, 0, &one, vec![(one.clone(), 0, 2)]),
            lz(2, 1, &zero, vec![(one.clone(), 1, 2)]),
            lz(3, 0, &zero, vec![(one.clone(), 0, 3)]),
            lz(3, 1, &one, vec![(q(1), 1, 3)]),
        ],
        (Space::Line, Calculus::Conj) => vec![
            lz(2, 0, &one, vec![(one.clone(), 0, 2)]),
            lz(2, 1, &zero, vec![(one.clone(), 1, 2)]),
            lz(3, 0, &zero, vec![(one.clone(), 0, 3)]),
            lz(3, 1, &one, vec![(q(-1), 1, 3)]),
        ],
        (Space::Euclid3, Calculus::Std) => {
            let (x0, xp, x3, xm, d0, dp, d3, dm) = (0u8, 1u8, 2u8, 3u8, 4u8, 5u8, 6u8, 7u8);
            vec![
                lz(dp, x0, &zero, vec![(one.clone(), x0, dp)]),
                lz(dp, xp, &one, vec![(q(4), xp, dp)]),
                lz(dp, x3, &zero, vec![(q(2), x3, dp)]),
                lz(dp, xm, &zero, vec![(one.clone(), xm, dp)]),
                lz(d3, x0, &zero, vec![(one.clone(), x0, d3)]),
                lz(d3, xp, &zero, vec![(q(2), xp, d3)]),
                lz(d3, x3, &one, vec![(q(2), x3, d3), (q(2) * &ll, xp, dp)]),
                lz(d3, xm, &zero, vec![(q(2), xm, d3), (q(1) * &ll, x3, dp)]),
                lz(dm, x0, &zero, vec![(one.clone(), x0, dm)]),
                lz(dm, xp, &zero, vec![(one.clone(), xp, dm)]),
                lz(dm, x3, &zero, vec![(q(2), x3, dm), (q(1) * &ll, xp, d3)]),
                lz(dm, xm, &one, vec![(q(4), xm, dm), (q(2) * &ll, x3, d3), (q(1) * &l2l, xp, dp)]),
                lz(d0, x0, &one, vec![(one.clone(), x0, d0)]),
                lz(d0, xp, &zero, vec![(one.clone(), xp, d0)]),
                lz(d0, x3, &zero, vec![(one.clone(), x3, d0)]),
                lz(d0, xm, &zero, vec![(one.clone(), xm, d0)]),
            ]
        }
        (Space::Euclid3, Calculus::Conj) => {
            let (x0, xp, x3, xm, d0, dp, d3, dm) = (0u8, 1u8, 2u8, 3u8, 4u8, 5u8, 6u8, 7u8);
            vec![
                lz(dp, x0, &zero, vec![(one.clone(), x0, dp)]),
                lz(dp, xm, &zero, vec![(one.clone(), xm, dp)]),
                // The coefficient of X−∂̂3 is −q⁻¹λλ₊ (forced by conjugating the
                // ∂−X3 rule and by confluence).
                lz(dp, x3, &zero, vec![(q(-2), x3, dp), (-(q(-1) * &ll), xm, d3)]),
                lz(dp, xp, &one, vec![(q(-4), xp, dp), (-(q(-2) * &ll), x3, d3), (q(-1) * &l2l, xm, dm)]),
                lz(d3, x0, &zero, vec![(one.clone(), x0, d3)]),
                lz(d3, xm, &zero, vec![(q(-2), xm, d3)]),
                lz(d3, x3, &one, vec![(q(-2), x3, d3), (-(q(-2) * &ll), xm, dm)]),
                lz(d3, xp, &zero, vec![(q(-2), xp, d3), (-(q(-1) * &ll), x3, dm)]),
                lz(dm, x0, &zero, vec![(one.clone(), x0, dm)]),
                lz(dm, xp, &zero, vec![(one.clone(), xp, dm)]),
                lz(dm, x3, &zero, vec![(q(-2), x3, dm)]),
                lz(dm, xm, &one, vec![(q(-4), xm, dm)]),
                // Time derivative: central (the tabulated subscripts are typos).
                lz(d0, x0, &one, vec![(one.clone(), x0, d0)]),
                lz(d0, xp, &zero, vec![(one.clone(), xp, d0)]),
                lz(d0, x3, &zero, vec![(one.clone(), x3, d0)]),
                lz(d0, xm, &zero, vec![(one.clone(), xm, d0)]),
            ]
        }
    }
}

/// Note recorded by checks that rely on the hatted 3D Leibniz rules.
pub const HAT_TIME_NOTE: &str = "discrepancy: the last block of hatted 3D Leibniz rules reads dh0 X+ = X+ dh3 and dh0 X- = X- dh (missing subscript); implemented as time-centrality dh0 X^A = X^A dh0";
/// Note on the hatted ∂̂+X3 coefficient.
pub const HAT_COEFF_NOTE: &str = "discrepancy: the hatted rule dh+ X3 carries the tabulated coefficient -q lambda lambda_+ of X- dh3; conjugation of d- X3 and confluence force -q^-1 lambda lambda_+";

/// Leibniz relations in stored units: for the conjugate calculus the
/// constant term of `∂̂_a X^a` becomes `q^{-s}`.
fn deriv_coord_relations(space: Space, calc: Calculus) -> Vec<Rel> {
    let d = space.dim() as u8;
    leibniz_data(space, calc)
        .into_iter()
        .map(|l| {
            let mut rel: Rel = vec![(QScalar::one(), vec![l.d, l.x])];
            if !l.konst.is_zero() {
                let s = if calc == Calculus::Conj { hat_power(space, (l.d - d) as usize) } else { 0 };
                rel.push((-(&l.konst * QScalar::q_pow(-s)), vec![]));
            }
            for (c, x, dd) in l.terms {
                rel.push((-c, vec![x, dd]));
            }
            rel
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

type Rules = HashMap<(u8, u8), Vec<(QScalar, Vec<u8>)>>;
type Terms = Vec<(Word, QScalar)>;

struct Engine {
    ngen: usize,
    /// Normal-order position of each generator id.
    pos: [u8; 8],
    /// Generator ids in normal order.
    seq: Vec<u8>,
    rules: Rules,
    weights: [i32; 8],
    side: Side,
    cache: RefCell<HashMap<(u8, Word), Rc<Terms>>>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
struct EngineKey(Space, Calculus, Ordering);

thread_local! {
    static ENGINES: RefCell<HashMap<EngineKey, Rc<Engine>>> = RefCell::new(HashMap::new());
}

fn engine(space: Space, calc: Calculus, ord: Ordering) -> Rc<Engine> {
    ENGINES.with(|e| {
        e.borrow_mut()
            .entry(EngineKey(space, calc, ord))
            .or_insert_with(|| Rc::new(Engine::build(space, calc, ord)))
            .clone()
    })
}

fn gen_sequence(space: Space, ord: Ordering) -> Vec<u8> {
    let (coords, derivs): (Vec<u8>, Vec<u8>) = match (space, ord.coords) {
        (Space::Line, _) => (vec![0, 1], vec![2, 3]),
        (Space::Euclid3, CoordOrder::Std) => (vec![0, 1, 2, 3], vec![4, 7, 6, 5]),
        (Space::Euclid3, CoordOrder::Rev) => (vec![0, 3, 2, 1], vec![4, 5, 6, 7]),
    };
    match ord.side {
        Side::CoordFirst => coords.into_iter().chain(derivs).collect(),
        Side::DerivFirst => derivs.into_iter().chain(coords).collect(),
    }
}

/// Solves a class of two-letter relations for the out-of-order words.
fn orient(rels: &[Rel], pos: &[u8; 8], rules: &mut Rules) -> Result<(), String> {
    let mut cols: Vec<Vec<u8>> = Vec::new();
    for r in rels {
        for (_, w) in r {
            if !cols.contains(w) {
                cols.push(w.clone());
            }
        }
    }
    let bad = |w: &Vec<u8>| w.len() == 2 && pos[w[0] as usize] > pos[w[1] as usize];
    let nbad = cols.iter().filter(|w| bad(w)).count();
    let mut rows: Vec<Vec<QScalar>> = rels
        .iter()
        .map(|r| {
            let mut row = vec![QScalar::zero(); cols.len()];
            for (c, w) in r {
                let k = cols.iter().position(|x| x == w).unwrap();
                row[k] += c;
            }
            row
        })
        .collect();
    let mut pref: Vec<usize> = (0..cols.len()).filter(|&k| bad(&cols[k])).collect();
    pref.extend((0..cols.len()).filter(|&k| !bad(&cols[k])));
    let piv = row_reduce(&mut rows, &pref);
    let bad_pivots = piv.iter().filter(|(c, _)| bad(&cols[*c])).count();
    if bad_pivots != nbad {
        return Err(format!("relations determine {bad_pivots} of {nbad} out-of-order words"));
    }
    for (c, row) in piv {
        if !bad(&cols[c]) {
            return Err("relation among ordered words".into());
        }
        let rhs: Vec<(QScalar, Vec<u8>)> = (0..cols.len())
            .filter(|&k| k != c && !row[k].is_zero())
            .map(|k| (-&row[k], cols[k].clone()))
            .collect();
        if rhs.iter().any(|(_, w)| bad(w)) {
            return Err("unresolved out-of-order word".into());
        }
        rules.insert((cols[c][0], cols[c][1]), rhs);
    }
    Ok(())
}

impl Engine {
    fn build(space: Space, calc: Calculus, ord: Ordering) -> Engine {
        let seq = gen_sequence(space, ord);
        let mut pos = [u8::MAX; 8];
        for (k, &id) in seq.iter().enumerate() {
            pos[id as usize] = k as u8;
        }
        let mut rules = Rules::new();
        for class in [coord_relations(space), deriv_relations(space), deriv_coord_relations(space, calc)] {
            orient(&class, &pos, &mut rules).expect("inconsistent relation data");
        }
        let mut weights = [0; 8];
        for id in 0..2 * space.dim() {
            weights[id] = lambda_weight(space, id as u8);
        }
        Engine { ngen: 2 * space.dim(), pos, seq, rules, weights, side: ord.side, cache: RefCell::new(HashMap::new()) }
    }

    fn weight(&self, w: &Word) -> i32 {
        (0..self.ngen).map(|i| w[i] as i32 * self.weights[i]).sum()
    }

    /// `g · w` for an ordered word `w`, as ordered words.
    fn insert(&self, g: u8, w: &Word) -> Rc<Terms> {
        if let Some(r) = self.cache.borrow().get(&(g, *w)) {
            return r.clone();
        }
        let first = self.seq.iter().copied().find(|&id| w[id as usize] > 0);
        let res: Terms = match first {
            Some(f) if self.pos[g as usize] > self.pos[f as usize] => {
                let mut rest = *w;
                rest[f as usize] -= 1;
                let mut acc: HashMap<Word, QScalar> = HashMap::new();
                let rule = self.rules.get(&(g, f)).expect("missing rewrite rule");
                for (c, word) in rule {
                    match word.len() {
                        0 => *acc.entry(rest).or_insert_with(QScalar::zero) += c,
                        _ => {
                            let inner = self.insert(word[1], &rest);
                            for (w2, c2) in inner.iter() {
                                let outer = self.insert(word[0], w2);
                                let cc = c * c2;
                                for (w3, c3) in outer.iter() {
                                    *acc.entry(*w3).or_insert_with(QScalar::zero) += &(&cc * c3);
                                }
                            }
                        }
                    }
                }
                let mut v: Terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                v.sort_by(|a, b| a.0.cmp(&b.0));
                v
            }
            _ => {
                let mut w2 = *w;
                w2[g as usize] += 1;
                vec![(w2, QScalar::one())]
            }
        };
        let rc = Rc::new(res);
        self.cache.borrow_mut().insert((g, *w), rc.clone());
        rc
    }

    /// Letters of an ordered word, in order.
    fn letters(&self, w: &Word) -> Vec<u8> {
        let mut v = Vec::new();
        for &id in &self.seq {
            for _ in 0..w[id as usize] {
                v.push(id);
            }
        }
        v
    }

    /// Product of two ordered words.
    fn mul_words(&self, w1: &Word, w2: &Word) -> Terms {
        let mut acc: Vec<(Word, QScalar)> = vec![(*w2, QScalar::one())];
        for g in self.letters(w1).into_iter().rev() {
            let mut next: HashMap<Word, QScalar> = HashMap::new();
            for (w, c) in &acc {
                for (w3, c3) in self.insert(g, w).iter() {
                    *next.entry(*w3).or_insert_with(QScalar::zero) += &(c * c3);
                }
            }
            acc = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        }
        acc
    }

    /// Product of two monomials including Λ bookkeeping.
    fn mul_mono(&self, a: &NcMono, b: &NcMono) -> Vec<(NcMono, QScalar)> {
        let factor = match self.side {
            Side::CoordFirst => QScalar::q_half_pow(a.lam * self.weight(&b.word)),
            Side::DerivFirst => QScalar::q_half_pow(-b.lam * self.weight(&a.word)),
        };
        let lam = a.lam + b.lam;
        self.mul_words(&a.word, &b.word)
            .into_iter()
            .map(|(w, c)| (NcMono { word: w, lam }, c * &factor))
            .collect()
    }
}

// ---------------------------------------------------------------------------
// NCElement
// ---------------------------------------------------------------------------

/// Finite combination of normal-ordered monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NCElement {
    pub space: Space,
    pub calc: Calculus,
    pub ord: Ordering,
    terms: BTreeMap<NcMono, QScalar>,
}

impl NCElement {
    pub fn zero(space: Space, calc: Calculus, ord: Ordering) -> Self {
        NCElement { space, calc, ord, terms: BTreeMap::new() }
    }
    pub fn scalar(space: Space, calc: Calculus, ord: Ordering, c: QScalar) -> Self {
        let mut e = NCElement::zero(space, calc, ord);
        e.add_term(NcMono::ONE, c);
        e
    }
    pub fn one(space: Space, calc: Calculus, ord: Ordering) -> Self {
        NCElement::scalar(space, calc, ord, QScalar::one())
    }
    /// A single generator.
    pub fn gen(space: Space, calc: Calculus, ord: Ordering, g: Gen) -> QResult<Self> {
        let mut e = NCElement::zero(space, calc, ord);
        match g {
            Gen::Lam(h) => e.add_term(NcMono { word: [0; 8], lam: h }, QScalar::one()),
            _ => {
                let id = g.id(space).ok_or_else(|| QError::MixedSpace(format!("{g:?} is not a generator of {space}")))?;
                let mut w = [0u16; 8];
                w[id as usize] = 1;
                e.add_term(NcMono { word: w, lam: 0 }, QScalar::one());
            }
        }
        Ok(e)
    }
    /// Coordinate `X^i` in the standard ordering.
    pub fn x(space: Space, i: usize) -> Self {
        NCElement::gen(space, Calculus::Std, Ordering::STD, Gen::X(i)).expect("index in range")
    }
    /// Derivative `∂_i` of the given calculus in the standard ordering.
    pub fn d(space: Space, calc: Calculus, i: usize) -> Self {
        NCElement::gen(space, calc, Ordering::STD, Gen::D(i)).expect("index in range")
    }
    pub fn lam(space: Space, half: i32) -> Self {
        NCElement::gen(space, Calculus::Std, Ordering::STD, Gen::Lam(half)).unwrap()
    }
    pub fn add_term(&mut self, m: NcMono, c: QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }
    pub fn terms(&self) -> impl Iterator<Item = (&NcMono, &QScalar)> {
        self.terms.iter()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, m: &NcMono) -> QScalar {
        self.terms.get(m).cloned().unwrap_or_else(QScalar::zero)
    }
    fn dim(&self) -> usize {
        self.space.dim()
    }
    pub fn has_coords(&self) -> bool {
        let d = self.dim();
        self.terms.keys().any(|m| m.word[..d].iter().any(|&k| k > 0))
    }
    pub fn has_derivs(&self) -> bool {
        let d = self.dim();
        self.terms.keys().any(|m| m.word[d..2 * d].iter().any(|&k| k > 0))
    }
    pub fn has_lambda(&self) -> bool {
        self.terms.keys().any(|m| m.lam != 0)
    }
    /// Contains only coordinates (and scalars).
    pub fn is_pure_coord(&self) -> bool {
        !self.has_derivs() && !self.has_lambda()
    }
    /// Contains no coordinates.
    pub fn is_pure_deriv(&self) -> bool {
        !self.has_coords()
    }
    /// Time-free: no `X0` and no `∂0`.
    pub fn is_spatial(&self) -> bool {
        let d = self.dim();
        self.terms.keys().all(|m| m.word[0] == 0 && m.word[d] == 0)
    }
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.word.iter().map(|&k| k as u32).sum()).max().unwrap_or(0)
    }

    pub fn add(&self, o: &NCElement) -> QResult<NCElement> {
        let (a, b) = unify(self, o)?;
        let mut r = a;
        for (m, c) in b.terms {
            r.add_term(m, c);
        }
        Ok(r)
    }
    pub fn sub(&self, o: &NCElement) -> QResult<NCElement> {
        self.add(&o.neg())
    }
    pub fn neg(&self) -> NCElement {
        self.scale(&-QScalar::one())
    }
    pub fn scale(&self, s: &QScalar) -> NCElement {
        let mut r = NCElement::zero(self.space, self.calc, self.ord);
        for (m, c) in &self.terms {
            r.add_term(*m, c * s);
        }
        r
    }
    /// Relabels the calculus without changing stored coefficients.
    pub fn retag(&self, calc: Calculus) -> NCElement {
        NCElement { calc, ..self.clone() }
    }

    /// Normal-ordered product.
    pub fn mul(&self, o: &NCElement) -> QResult<NCElement> {
        let (a, b) = unify(self, o)?;
        let eng = engine(a.space, a.calc, a.ord);
        let mut r = NCElement::zero(a.space, a.calc, a.ord);
        for (m1, c1) in &a.terms {
            for (m2, c2) in &b.terms {
                let cc = c1 * c2;
                for (m, c) in eng.mul_mono(m1, m2) {
                    r.add_term(m, &cc * &c);
                }
            }
        }
        Ok(r)
    }
    pub fn pow(&self, n: u32) -> QResult<NCElement> {
        let mut r = NCElement::one(self.space, self.calc, self.ord);
        for _ in 0..n {
            r = r.mul(self)?;
        }
        Ok(r)
    }

    /// Generator sequence of a monomial in this element's ordering.
    fn mono_gens(&self, m: &NcMono) -> Vec<Gen> {
        let d = self.dim();
        let to_gen = |id: u8| if (id as usize) < d { Gen::X(id as usize) } else { Gen::D(id as usize - d) };
        let seq = gen_sequence(self.space, self.ord);
        let mut v: Vec<Gen> = Vec::new();
        for id in seq {
            for _ in 0..m.word[id as usize] {
                v.push(to_gen(id));
            }
        }
        if m.lam != 0 {
            match self.ord.side {
                Side::CoordFirst => v.push(Gen::Lam(m.lam)),
                Side::DerivFirst => v.insert(0, Gen::Lam(m.lam)),
            }
        }
        v
    }

    /// Re-expresses the element in another normal ordering.
    pub fn to_ordering(&self, ord: Ordering) -> NCElement {
        if ord == self.ord {
            return self.clone();
        }
        let mut r = NCElement::zero(self.space, self.calc, ord);
        for (m, c) in &self.terms {
            let gens = self.mono_gens(m);
            let e = normal_form(self.space, self.calc, ord, &gens, c.clone()).expect("generators of this space");
            for (m2, c2) in e.terms {
                r.add_term(m2, c2);
            }
        }
        r
    }

    /// Re-expresses the element in another calculus. Only allowed when no
    /// derivatives are present (coordinates and Λ do not depend on it).
    pub fn to_calculus(&self, calc: Calculus) -> QResult<NCElement> {
        if calc == self.calc {
            return Ok(self.clone());
        }
        if self.has_derivs() {
            return Err(QError::Invalid("derivatives of different calculi cannot be mixed".into()));
        }
        Ok(self.retag(calc))
    }

    /// `Λ`-free, derivative-free element → commutative function via W
    /// (standard coordinate order) or W̃ (reversed order).
    pub fn to_cfunction(&self) -> QResult<CFunction> {
        if !self.is_pure_coord() {
            return Err(QError::Impure("element contains derivatives or scaling operators".into()));
        }
        let mut f = CFunction::zero(self.space);
        for (m, c) in &self.terms {
            f.add_term(m.word, c.clone());
        }
        Ok(f)
    }

    /// Commutative function → coordinate element via W (coordinate order of `ord`).
    pub fn from_cfunction(f: &CFunction, calc: Calculus, ord: Ordering) -> NCElement {
        let mut e = NCElement::zero(f.space, calc, ord);
        for (m, c) in f.terms() {
            let mut w = [0u16; 8];
            w[..f.space.dim()].copy_from_slice(&m[..f.space.dim()]);
            e.add_term(NcMono { word: w, lam: 0 }, c.clone());
        }
        e
    }

    /// Antilinear, order-reversing conjugation.
    pub fn conjugate(&self) -> NCElement {
        let target = self.calc.flip();
        let mut r = NCElement::zero(self.space, target, self.ord);
        for (m, c) in &self.terms {
            let gens = self.mono_gens(m);
            let mut acc = NCElement::scalar(self.space, target, self.ord, c.conj());
            for g in gens.into_iter().rev() {
                let cg = conj_gen(self.space, self.calc, self.ord, g);
                acc = acc.mul(&cg).expect("same space");
            }
            for (m2, c2) in acc.terms {
                r.add_term(m2, c2);
            }
        }
        r
    }

    pub fn map_coeffs(&self, f: impl Fn(&QScalar) -> QScalar) -> NCElement {
        let mut r = NCElement::zero(self.space, self.calc, self.ord);
        for (m, c) in &self.terms {
            r.add_term(*m, f(c));
        }
        r
    }

    /// Name of a monomial in the tabulated convention (hatted names for the
    /// conjugate calculus) and the factor converting the stored coefficient.
    fn mono_display(&self, m: &NcMono) -> (String, QScalar) {
        let d = self.dim();
        let labels: Vec<&str> = match self.space {
            Space::Line => vec!["0", "1"],
            Space::Euclid3 => vec!["0", "p", "3", "m"],
        };
        let seq = gen_sequence(self.space, self.ord);
        let mut parts: Vec<String> = Vec::new();
        let mut factor = QScalar::one();
        let lam_str = if m.lam == 0 {
            None
        } else if m.lam % 2 == 0 {
            let k = m.lam / 2;
            Some(if k == 1 { "L".to_string() } else if k > 0 { format!("L^{k}") } else { format!("L^({k})") })
        } else {
            Some(format!("L^({}/2)", m.lam))
        };
        if let (Some(s), Side::DerivFirst) = (&lam_str, self.ord.side) {
            parts.push(s.clone());
        }
        for id in seq {
            let k = m.word[id as usize] as u32;
            if k == 0 {
                continue;
            }
            let id = id as usize;
            let name = if id < d {
                format!("X{}", labels[id])
            } else if self.calc == Calculus::Std {
                format!("d{}", labels[id - d])
            } else {
                factor = factor * QScalar::q_pow(-hat_power(self.space, id - d) * k as i32);
                format!("dh{}", labels[id - d])
            };
            parts.push(fmt_power(&name, k));
        }
        if let (Some(s), Side::CoordFirst) = (&lam_str, self.ord.side) {
            parts.push(s.clone());
        }
        (parts.join(" "), factor)
    }
}

impl NCElement {
    /// Terms in display order as (monomial name, coefficient of that name);
    /// hatted derivatives are named `dh…` and their coefficients adjusted.
    pub fn display_terms(&self) -> Vec<(String, QScalar)> {
        let mut keys: Vec<&NcMono> = self.terms.keys().collect();
        keys.sort_by_key(|m| (m.word.iter().map(|&k| k as u32).sum::<u32>(), std::cmp::Reverse(m.word), m.lam));
        keys.into_iter()
            .map(|m| {
                let (name, factor) = self.mono_display(m);
                (name, &self.terms[m] * &factor)
            })
            .collect()
    }
}

impl fmt::Display for NCElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts = self.display_terms().into_iter().map(|(name, c)| fmt_term(&c, &name)).collect();
        write!(f, "{}", join_terms(parts))
    }
}

/// Brings two elements to a common space, calculus and ordering.
fn unify(a: &NCElement, b: &NCElement) -> QResult<(NCElement, NCElement)> {
    if a.space != b.space {
        return Err(QError::MixedSpace(format!("{} and {}", a.space, b.space)));
    }
    let calc = if a.has_derivs() { a.calc } else if b.has_derivs() { b.calc } else { a.calc };
    let a2 = a.to_calculus(calc)?;
    let b2 = b.to_calculus(calc)?;
    let b2 = b2.to_ordering(a.ord);
    Ok((a2, b2))
}

/// Conjugate of a single generator (as an element of the flipped calculus).
fn conj_gen(space: Space, calc: Calculus, ord: Ordering, g: Gen) -> NCElement {
    let target = calc.flip();
    let metric = standard_metric();
    let mk = |g: Gen| NCElement::gen(space, target, ord, g).unwrap();
    match (space, g) {
        (_, Gen::Lam(h)) => mk(Gen::Lam(-h)),
        (_, Gen::X(0)) | (Space::Line, Gen::X(_)) => mk(g),
        (Space::Line, Gen::D(i)) | (Space::Euclid3, Gen::D(i @ 0)) => mk(Gen::D(i)).neg(),
        (Space::Euclid3, Gen::X(a)) => {
            let mut r = NCElement::zero(space, target, ord);
            for b in 1..4 {
                let c = metric.lower.get(a - 1, b - 1);
                if !c.is_zero() {
                    r = r.add(&mk(Gen::X(b)).scale(c)).unwrap();
                }
            }
            r
        }
        (Space::Euclid3, Gen::D(a)) => {
            // ∂_A ↦ −g^{AB} ∂'_B and ∂'_A ↦ −g_{AB} ∂_B
            let m = if calc == Calculus::Std { &metric.upper } else { &metric.lower };
            let mut r = NCElement::zero(space, target, ord);
            for b in 1..4 {
                let c = m.get(a - 1, b - 1);
                if !c.is_zero() {
                    r = r.add(&mk(Gen::D(b)).scale(&-c)).unwrap();
                }
            }
            r
        }
    }
}

/// Normal form of a word of generators times a coefficient.
pub fn normal_form(space: Space, calc: Calculus, ord: Ordering, word: &[Gen], coeff: QScalar) -> QResult<NCElement> {
    let mut acc = NCElement::scalar(space, calc, ord, coeff);
    for &g in word.iter().rev() {
        let ge = NCElement::gen(space, calc, ord, g)?;
        acc = ge.mul(&acc)?;
    }
    Ok(acc)
}

/// Rewrite strategy of the independent naive rewriter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    Leftmost,
    Rightmost,
}

const LAM_UP: u8 = 8;
const LAM_DOWN: u8 = 9;

/// Normal form by repeated rewriting of adjacent out-of-order pairs on raw
/// words (no memoization, no insertion); `Λ` letters stand for `Λ^{±1/2}`.
pub fn normal_form_naive(
    space: Space,
    calc: Calculus,
    ord: Ordering,
    word: &[Gen],
    strategy: Strategy,
) -> QResult<NCElement> {
    let seq = gen_sequence(space, ord);
    let mut pos = [0i32; 10];
    for (k, &id) in seq.iter().enumerate() {
        pos[id as usize] = k as i32 + 1;
    }
    let lam_pos = if ord.side == Side::CoordFirst { 100 } else { 0 };
    pos[LAM_UP as usize] = lam_pos;
    pos[LAM_DOWN as usize] = lam_pos;
    let eng = engine(space, calc, ord);
    let mut letters: Vec<u8> = Vec::new();
    for g in word {
        match *g {
            Gen::Lam(h) => {
                let l = if h > 0 { LAM_UP } else { LAM_DOWN };
                for _ in 0..h.abs() {
                    letters.push(l);
                }
            }
            g => letters.push(g.id(space).ok_or_else(|| QError::MixedSpace(format!("{g:?} not in {space}")))?),
        }
    }
    let is_lam = |l: u8| l >= LAM_UP;
    let bad = |a: u8, b: u8| {
        if is_lam(a) && is_lam(b) {
            a != b
        } else {
            pos[a as usize] > pos[b as usize]
        }
    };
    let mut out = NCElement::zero(space, calc, ord);
    let mut stack: Vec<(Vec<u8>, QScalar)> = vec![(letters, QScalar::one())];
    while let Some((w, c)) = stack.pop() {
        let idx: Vec<usize> = (0..w.len().saturating_sub(1)).filter(|&k| bad(w[k], w[k + 1])).collect();
        let k = match strategy {
            Strategy::Leftmost => idx.first().copied(),
            Strategy::Rightmost => idx.last().copied(),
        };
        let Some(k) = k else {
            let mut m = NcMono::ONE;
            for &l in &w {
                match l {
                    LAM_UP => m.lam += 1,
                    LAM_DOWN => m.lam -= 1,
                    id => m.word[id as usize] += 1,
                }
            }
            out.add_term(m, c);
            continue;
        };
        let (a, b) = (w[k], w[k + 1]);
        let splice = |mid: &[u8]| {
            let mut v = w[..k].to_vec();
            v.extend_from_slice(mid);
            v.extend_from_slice(&w[k + 2..]);
            v
        };
        if is_lam(a) && is_lam(b) {
            stack.push((splice(&[]), c));
        } else if is_lam(a) || is_lam(b) {
            // Coordinate-first: Λ^{±1/2} g → s^{±w} g Λ^{±1/2};
            // derivative-first: g Λ^{±1/2} → s^{∓w} Λ^{±1/2} g.
            let (l, g) = if is_lam(a) { (a, b) } else { (b, a) };
            let sign = if l == LAM_UP { 1 } else { -1 };
            let w8 = eng.weights[g as usize];
            let f = if is_lam(a) { QScalar::q_half_pow(sign * w8) } else { QScalar::q_half_pow(-sign * w8) };
            stack.push((splice(&[b, a]), c * f));
        } else {
            for (rc, rw) in eng.rules.get(&(a, b)).expect("missing rule") {
                stack.push((splice(rw), &c * rc));
            }
        }
    }
    Ok(out)
}

/// Counit procedure: commute the derivative element through `f` and apply
/// `ε(∂) = 0`, `ε(Λ) = 1` to the residual operators.
pub fn act(d: &NCElement, f: &NCElement, mode: ActMode) -> QResult<NCElement> {
    if d.has_coords() {
        return Err(QError::Impure("operator contains coordinates".into()));
    }
    if !f.is_pure_coord() {
        return Err(QError::Impure("function contains derivatives or scaling operators".into()));
    }
    if d.space != f.space {
        return Err(QError::MixedSpace(format!("{} and {}", d.space, f.space)));
    }
    let calc = mode.calculus();
    let ord = mode.ordering();
    if d.has_derivs() && d.calc != calc {
        return Err(QError::Invalid(format!("the {} action needs derivatives of the {:?} calculus", mode.name(), calc)));
    }
    let d2 = d.retag(calc).to_ordering(ord);
    let f2 = f.retag(calc).to_ordering(ord);
    let prod = if mode.is_left() { d2.mul(&f2)? } else { f2.mul(&d2)? };
    let dim = f.space.dim();
    let mut r = NCElement::zero(f.space, calc, ord);
    for (m, c) in prod.terms() {
        if m.word[dim..2 * dim].iter().all(|&k| k == 0) {
            r.add_term(NcMono { word: m.word, lam: 0 }, c.clone());
        }
    }
    Ok(r)
}

/// The derivative symbol of the given action, in stored units:
/// `∂_i` for ▷, `∂̂_i` for ▷̄ and ◁, `∂_i` for ◁̄.
///
/// Right actions use the normalization in which the right closed forms are
/// the transition-rule images of the left ones: in 3D `◁ ∂̂_A = q^{2+2A} ∂_A`
/// (`q⁴, q⁶, q⁸` for `+, 3, −`; a grading automorphism of the derivative
/// relations) and `◁̄ ∂_A = q^{2A−4} ∂'_A` (`q⁻², 1, q²`).
pub fn action_symbol(space: Space, mode: ActMode, i: usize) -> NCElement {
    let calc = mode.calculus();
    let base = NCElement::gen(space, calc, mode.ordering(), Gen::D(i)).expect("index in range");
    if i == 0 {
        return base;
    }
    let k = match (space, mode) {
        (_, ActMode::Left) => 0,
        (_, ActMode::LeftHat) => space.hat_power(),
        (Space::Line, ActMode::Right) => 1,
        (Space::Line, ActMode::RightHat) => 0,
        (Space::Euclid3, ActMode::Right) => 2 + 2 * i as i32,
        (Space::Euclid3, ActMode::RightHat) => 2 * i as i32 - 4,
    };
    base.scale(&QScalar::q_pow(k))
}

/// Product of action symbols `∂_{i₁}…∂_{iₙ}` for an action mode.
pub fn action_symbol_word(space: Space, mode: ActMode, idx: &[usize]) -> NCElement {
    let mut acc = NCElement::one(space, mode.calculus(), mode.ordering());
    for &i in idx {
        acc = acc.mul(&action_symbol(space, mode, i)).unwrap();
    }
    acc
}

/// Action on commutative functions, read through W or W̃ according to the mode.
pub fn act_cf(d: &NCElement, f: &CFunction, mode: ActMode) -> QResult<CFunction> {
    let fe = NCElement::from_cfunction(f, mode.calculus(), Ordering::new(mode.coord_order(), Side::CoordFirst));
    act(d, &fe, mode)?.to_ordering(Ordering::new(mode.coord_order(), Side::CoordFirst)).to_cfunction()
}

/// Direction of the ordering transport map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReorderDir {
    /// Û: standard-ordered function ↦ reversed-ordered function.
    ToReversed,
    /// Û⁻¹
    ToStandard,
}

/// `Û(f) = W̃⁻¹(W(f))` and its inverse.
pub fn reorder_transform(f: &CFunction, dir: ReorderDir) -> CFunction {
    let (from, to) = match dir {
        ReorderDir::ToReversed => (Ordering::STD, Ordering::REV),
        ReorderDir::ToStandard => (Ordering::REV, Ordering::STD),
    };
    NCElement::from_cfunction(f, Calculus::Std, from).to_ordering(to).to_cfunction().expect("coordinates only")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e3() -> Space {
        Space::Euclid3
    }
    fn nf(space: Space, calc: Calculus, w: &[Gen]) -> NCElement {
        normal_form(space, calc, Ordering::STD, w, QScalar::one()).unwrap()
    }

    #[test]
    fn coordinate_rules() {
        let r = nf(e3(), Calculus::Std, &[Gen::X(2), Gen::X(1)]);
        assert_eq!(r, NCElement::x(e3(), 1).mul(&NCElement::x(e3(), 2)).unwrap().scale(&QScalar::q_pow(2)));
        let r = nf(e3(), Calculus::Std, &[Gen::X(3), Gen::X(1)]);
        let want = nf(e3(), Calculus::Std, &[Gen::X(1), Gen::X(3)])
            .add(&nf(e3(), Calculus::Std, &[Gen::X(2), Gen::X(2)]).scale(&QScalar::lambda()))
            .unwrap();
        assert_eq!(r, want);
    }

    #[test]
    fn leibniz_examples() {
        let r = nf(e3(), Calculus::Std, &[Gen::D(1), Gen::X(1)]);
        assert_eq!(r.to_string(), "1 + q^4 Xp dp");
        let r = nf(e3(), Calculus::Std, &[Gen::D(2), Gen::X(2)]);
        let ll = QScalar::q_pow(2) * QScalar::lambda() * QScalar::lambda_plus();
        let want = NCElement::one(e3(), Calculus::Std, Ordering::STD)
            .add(&nf(e3(), Calculus::Std, &[Gen::X(2), Gen::D(2)]).scale(&QScalar::q_pow(2)))
            .unwrap()
            .add(&nf(e3(), Calculus::Std, &[Gen::X(1), Gen::D(1)]).scale(&ll))
            .unwrap();
        assert_eq!(r, want);
        let l = Space::Line;
        let r = nf(l, Calculus::Std, &[Gen::Lam(2), Gen::X(1)]);
        assert_eq!(r.to_string(), "q X1 L");
        let r = nf(l, Calculus::Std, &[Gen::D(1), Gen::D(1), Gen::X(1)]);
        assert_eq!(r.to_string(), "(q+1) d1 + q^2 X1 d1^2");
    }

    #[test]
    fn derivative_rules_are_rewrites() {
        let r = nf(e3(), Calculus::Std, &[Gen::D(1), Gen::D(2)]);
        assert_eq!(r, nf(e3(), Calculus::Std, &[Gen::D(2), Gen::D(1)]).scale(&QScalar::q_pow(2)));
        let r = nf(e3(), Calculus::Std, &[Gen::D(1), Gen::D(3)]);
        let want = nf(e3(), Calculus::Std, &[Gen::D(3), Gen::D(1)])
            .add(&nf(e3(), Calculus::Std, &[Gen::D(2), Gen::D(2)]).scale(&QScalar::lambda()))
            .unwrap();
        assert_eq!(r, want);
    }

    #[test]
    fn actions_basic() {
        let l = Space::Line;
        let x2 = NCElement::x(l, 1).pow(2).unwrap();
        let r = act(&NCElement::d(l, Calculus::Std, 1), &x2, ActMode::Left).unwrap();
        assert_eq!(r.to_string(), "(q+1) X1");
        let r = act(&NCElement::lam(l, 2), &NCElement::x(l, 1).pow(3).unwrap(), ActMode::Left).unwrap();
        assert_eq!(r.to_string(), "q^3 X1^3");
        let r = act(&NCElement::d(l, Calculus::Std, 0), &NCElement::x(l, 0), ActMode::Left).unwrap();
        assert!(r.to_string() == "1");
    }

    #[test]
    fn conjugation() {
        let c = NCElement::x(e3(), 1).conjugate();
        assert_eq!(c.to_string(), "-q Xm");
        for s in [Space::Line, e3()] {
            for i in 0..s.dim() {
                for calc in [Calculus::Std, Calculus::Conj] {
                    let d = NCElement::d(s, calc, i);
                    assert_eq!(d.conjugate().conjugate(), d);
                }
                let x = NCElement::x(s, i);
                assert_eq!(x.conjugate().conjugate(), x);
            }
        }
    }

    #[test]
    fn reorder() {
        let mut e = [0u16; 8];
        e[1] = 1;
        e[3] = 1;
        let f = CFunction::monomial(e3(), e, QScalar::one());
        let u = reorder_transform(&f, ReorderDir::ToReversed);
        let mut e33 = [0u16; 8];
        e33[2] = 2;
        assert_eq!(u, f.add(&CFunction::monomial(e3(), e33, -QScalar::lambda())));
        assert_eq!(reorder_transform(&u, ReorderDir::ToStandard), f);
    }
}
