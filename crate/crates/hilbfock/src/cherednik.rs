//! The N-particle arena: tensors of algebra colors with exponents of
//! x_1 … x_N, reflections, divided differences ∇_ij, Dunkl–Cherednik
//! operators with algebra-valued coupling, and the projection to F(H).
//!
//! Symmetric powers are taken non-unitally: a slot is either empty or holds
//! a color with an exponent ≥ 0, and (1_H, x⁰) is not the same as empty.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::fock::{FockMonomial, FockSpace, FockVector};
use crate::frobenius::{AlgElement, FrobeniusAlgebra};
use crate::report::CheckReport;
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CherednikError {
    #[error("state is not symmetric under the reflection ({0}, {1})")]
    Asymmetric(usize, usize),
    #[error("{needed} particles needed, {got} available")]
    TooFewParticles { needed: usize, got: usize },
    #[error("coefficient pattern is not symmetric")]
    NotSymmetricPattern,
}

/// Sparse algebra element as `(basis index, coefficient)` pairs.
pub type Elem<S> = Vec<(usize, S)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Empty,
    At { color: u16, exp: i32 },
}

pub type TensorMonomial = Vec<Slot>;

/// Structure constants of the slot algebra over the working scalar.
#[derive(Clone, Debug)]
pub struct SlotAlgebra<S> {
    parity: Vec<bool>,
    unit: Option<usize>,
    mul: Vec<Vec<Vec<(usize, S)>>>,
    delta: Vec<(usize, usize, S)>,
}

impl<S: Scalar> SlotAlgebra<S> {
    pub fn from_frobenius(alg: &FrobeniusAlgebra) -> Self {
        let n = alg.dim();
        let mul = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        alg.mul_basis(i, j)
                            .iter()
                            .map(|(k, c)| (*k, S::from_rational(c)))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let delta = alg
            .coproduct()
            .iter()
            .map(|(i, j, c)| (*i, *j, S::from_rational(c)))
            .collect();
        SlotAlgebra {
            parity: (0..n).map(|i| alg.is_odd(i)).collect(),
            unit: Some(alg.unit_index()),
            mul,
            delta,
        }
    }

    /// One-dimensional non-unital algebra b·b = t·b, with Δ = t·b⊗b.
    pub fn line(t: S) -> Self {
        SlotAlgebra {
            parity: vec![false],
            unit: None,
            mul: vec![vec![vec![(0, t.clone())]]],
            delta: vec![(0, 0, t)],
        }
    }

    /// Same algebra with Δ(1) replaced by −Δ(1).
    pub fn negated_coproduct(&self) -> Self {
        let mut o = self.clone();
        for d in o.delta.iter_mut() {
            d.2 = -d.2.clone();
        }
        o
    }

    pub fn dim(&self) -> usize {
        self.parity.len()
    }

    pub fn is_odd(&self, c: usize) -> bool {
        self.parity[c]
    }

    fn slot_odd(&self, s: &Slot) -> bool {
        match s {
            Slot::Empty => false,
            Slot::At { color, .. } => self.parity[*color as usize],
        }
    }

    fn unit(&self) -> usize {
        self.unit.expect("operation needs a unital slot algebra")
    }

    pub fn basis(&self, c: usize) -> Elem<S> {
        vec![(c, S::one())]
    }

    pub fn mul_elems(&self, a: &Elem<S>, b: &Elem<S>) -> Elem<S> {
        let mut acc: Vec<S> = vec![S::zero(); self.dim()];
        for (i, x) in a {
            for (j, y) in b {
                let xy = x.clone() * y;
                for (k, c) in &self.mul[*i][*j] {
                    let t = std::mem::replace(&mut acc[*k], S::zero());
                    acc[*k] = t + &(xy.clone() * c);
                }
            }
        }
        acc.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
    }
}

pub fn elem_of<S: Scalar>(a: &AlgElement<S>) -> Elem<S> {
    a.sparse()
}

/// Sparse element of the N-fold non-unital tensor power.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorState<S> {
    particles: usize,
    terms: HashMap<TensorMonomial, S>,
}

impl<S: Scalar> TensorState<S> {
    pub fn zero(particles: usize) -> Self {
        TensorState {
            particles,
            terms: HashMap::new(),
        }
    }

    /// All slots empty, coefficient 1.
    pub fn vacuum(particles: usize) -> Self {
        Self::monomial(vec![Slot::Empty; particles], S::one())
    }

    pub fn monomial(t: TensorMonomial, c: S) -> Self {
        let mut s = Self::zero(t.len());
        s.add_term(t, c);
        s
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn add_term(&mut self, t: TensorMonomial, c: S) {
        debug_assert_eq!(t.len(), self.particles);
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&t) {
            Some(old) => {
                let s = old + &c;
                if !s.is_zero() {
                    self.terms.insert(t, s);
                }
            }
            None => {
                self.terms.insert(t, c);
            }
        }
    }

    pub fn add_scaled(&mut self, o: &TensorState<S>, s: &S) {
        if s.is_zero() {
            return;
        }
        for (t, c) in &o.terms {
            self.add_term(t.clone(), c.clone() * s);
        }
    }

    pub fn add_assign(&mut self, o: &TensorState<S>) {
        for (t, c) in &o.terms {
            self.add_term(t.clone(), c.clone());
        }
    }

    pub fn sub(&self, o: &TensorState<S>) -> TensorState<S> {
        let mut r = self.clone();
        r.add_scaled(o, &-S::one());
        r
    }

    pub fn scale(&self, s: &S) -> TensorState<S> {
        let mut r = Self::zero(self.particles);
        r.add_scaled(self, s);
        r
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

    pub fn get(&self, t: &TensorMonomial) -> S {
        self.terms.get(t).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TensorMonomial, &S)> {
        self.terms.iter()
    }

    /// Terms in a deterministic order, for display.
    pub fn sorted_terms(&self) -> Vec<(TensorMonomial, S)> {
        let mut v: Vec<_> = self.terms.iter().map(|(t, c)| (t.clone(), c.clone())).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn display(&self) -> String {
        let terms = self.sorted_terms();
        if terms.is_empty() {
            return "0".into();
        }
        terms
            .iter()
            .map(|(t, c)| {
                let slots: Vec<String> = t
                    .iter()
                    .map(|s| match s {
                        Slot::Empty => "-".into(),
                        Slot::At { color, exp } => format!("{color}x^{exp}"),
                    })
                    .collect();
                format!("({c})[{}]", slots.join(" "))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

fn parity_before<S: Scalar>(alg: &SlotAlgebra<S>, t: &TensorMonomial, lo: usize, hi: usize) -> bool {
    t[lo..hi].iter().filter(|s| alg.slot_odd(s)).count() % 2 == 1
}

/// Left multiplication by (h x^shift)_i, with the Koszul sign of moving h past
/// slots 0..i. An empty slot becomes (h, x^shift).
pub fn lmul<S: Scalar>(alg: &SlotAlgebra<S>, i: usize, h: &Elem<S>, shift: i32, v: &TensorState<S>) -> TensorState<S> {
    let mut out = TensorState::zero(v.particles);
    for (t, c) in v.iter() {
        let before = parity_before(alg, t, 0, i);
        for (hc, hv) in h {
            let neg = alg.parity[*hc] && before;
            let base = if neg { -(hv.clone() * c) } else { hv.clone() * c };
            match t[i] {
                Slot::Empty => {
                    let mut nt = t.clone();
                    nt[i] = Slot::At {
                        color: *hc as u16,
                        exp: shift,
                    };
                    out.add_term(nt, base);
                }
                Slot::At { color, exp } => {
                    for (k, m) in &alg.mul[*hc][color as usize] {
                        let mut nt = t.clone();
                        nt[i] = Slot::At {
                            color: *k as u16,
                            exp: exp + shift,
                        };
                        out.add_term(nt, base.clone() * m);
                    }
                }
            }
        }
    }
    out
}

/// Multiplication by Δ_ij = Σ_t (a_t)_i (b_t)_j, or by (wΔ)_ij = Σ_t (w a_t)_i (b_t)_j.
pub fn lmul_delta<S: Scalar>(
    alg: &SlotAlgebra<S>,
    i: usize,
    j: usize,
    w: Option<&Elem<S>>,
    v: &TensorState<S>,
) -> TensorState<S> {
    let mut out = TensorState::zero(v.particles);
    for (a, b, c) in &alg.delta {
        let st = lmul(alg, j, &alg.basis(*b), 0, v);
        let left = match w {
            None => alg.basis(*a),
            Some(w) => alg.mul_elems(w, &alg.basis(*a)),
        };
        let st = lmul(alg, i, &left, 0, &st);
        out.add_scaled(&st, c);
    }
    out
}

/// Swap slots i < j with the Koszul sign (−1)^{p_i p_j + (p_i + p_j) p_mid}.
pub fn reflect<S: Scalar>(alg: &SlotAlgebra<S>, i: usize, j: usize, v: &TensorState<S>) -> TensorState<S> {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    let mut out = TensorState::zero(v.particles);
    for (t, c) in v.iter() {
        let (pi, pj) = (alg.slot_odd(&t[i]), alg.slot_odd(&t[j]));
        let pm = parity_before(alg, t, i + 1, j);
        let neg = (pi && pj) ^ ((pi ^ pj) && pm);
        let mut nt = t.clone();
        nt.swap(i, j);
        out.add_term(nt, if neg { -c.clone() } else { c.clone() });
    }
    out
}

/// Exponent pairs and signs of (x_i^a x_j^b − x_i^b x_j^a)/(1 − x_i x_j⁻¹).
fn geometric(a: i32, b: i32, corrupt: bool) -> Vec<((i32, i32), bool)> {
    if a > b {
        (0..a - b).map(|s| ((b + s, a - s), true)).collect()
    } else if a < b {
        (0..b - a).map(|s| ((a + s, b - s), corrupt)).collect()
    } else {
        Vec::new()
    }
}

fn nabla_impl<S: Scalar>(
    alg: &SlotAlgebra<S>,
    i: usize,
    j: usize,
    v: &TensorState<S>,
    corrupt: bool,
) -> TensorState<S> {
    let unit = alg.unit();
    let mut out = TensorState::zero(v.particles);
    let open = |s: Slot| match s {
        Slot::Empty => (unit, 0),
        Slot::At { color, exp } => (color as usize, exp),
    };
    for (t, c) in v.iter() {
        let (ci, a) = open(t[i]);
        let (cj, b) = open(t[j]);
        if a == b {
            continue;
        }
        let neg = alg.parity[cj] && parity_before(alg, t, i + 1, j);
        let g = geometric(a, b, corrupt);
        for (k, m) in &alg.mul[ci][cj] {
            let mut base = t.clone();
            base[i] = Slot::At {
                color: *k as u16,
                exp: 0,
            };
            base[j] = Slot::At {
                color: unit as u16,
                exp: 0,
            };
            let coef = if neg { -(m.clone() * c) } else { m.clone() * c };
            let d = lmul_delta(alg, i, j, None, &TensorState::monomial(base, coef));
            for (t2, c2) in d.iter() {
                let (Slot::At { color: gi, .. }, Slot::At { color: gj, .. }) = (t2[i], t2[j]) else {
                    unreachable!("slots i and j are occupied after the coproduct")
                };
                for ((ei, ej), minus) in &g {
                    let mut t3 = t2.clone();
                    t3[i] = Slot::At { color: gi, exp: *ei };
                    t3[j] = Slot::At { color: gj, exp: *ej };
                    out.add_term(t3, if *minus { -c2.clone() } else { c2.clone() });
                }
            }
        }
    }
    out
}

/// ∇_ij = Δ_ij (1 − r_ij)/(1 − x_i x_j⁻¹), evaluated through the closed
/// geometric sum; an empty slot is read as (1_H, x⁰).
pub fn nabla<S: Scalar>(alg: &SlotAlgebra<S>, i: usize, j: usize, v: &TensorState<S>) -> TensorState<S> {
    nabla_impl(alg, i, j, v, false)
}

/// Multiply by x_i^{di} x_j^{dj}; empty slots are read as (1_H, x⁰).
fn shift_exps<S: Scalar>(alg: &SlotAlgebra<S>, v: &TensorState<S>, moves: &[(usize, i32)]) -> TensorState<S> {
    let mut out = TensorState::zero(v.particles);
    for (t, c) in v.iter() {
        let mut nt = t.clone();
        for &(k, d) in moves {
            nt[k] = match nt[k] {
                Slot::Empty => Slot::At {
                    color: alg.unit() as u16,
                    exp: d,
                },
                Slot::At { color, exp } => Slot::At { color, exp: exp + d },
            };
        }
        out.add_term(nt, c.clone());
    }
    out
}

/// Slot permutation: the content of slot k moves to slot σ(k), with the sign of
/// the odd-odd transpositions involved.
pub fn permute<S: Scalar>(alg: &SlotAlgebra<S>, sigma: &[usize], v: &TensorState<S>) -> TensorState<S> {
    let mut out = TensorState::zero(v.particles);
    for (t, c) in v.iter() {
        let mut nt = t.clone();
        let mut neg = false;
        for k in 0..t.len() {
            nt[sigma[k]] = t[k];
            if alg.slot_odd(&t[k]) {
                for l in k + 1..t.len() {
                    if sigma[l] < sigma[k] && alg.slot_odd(&t[l]) {
                        neg = !neg;
                    }
                }
            }
        }
        out.add_term(nt, if neg { -c.clone() } else { c.clone() });
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                cur.push(k);
                rec(cur, used, out);
                cur.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Σ_σ σ·v (no normalisation).
pub fn symmetrize<S: Scalar>(alg: &SlotAlgebra<S>, v: &TensorState<S>) -> TensorState<S> {
    let mut out = TensorState::zero(v.particles);
    for s in permutations(v.particles) {
        out.add_assign(&permute(alg, &s, v));
    }
    out
}

pub fn check_symmetric<S: Scalar>(alg: &SlotAlgebra<S>, v: &TensorState<S>) -> Result<(), CherednikError> {
    for i in 0..v.particles.saturating_sub(1) {
        if reflect(alg, i, i + 1, v) != *v {
            return Err(CherednikError::Asymmetric(i, i + 1));
        }
    }
    Ok(())
}

/// Dunkl–Cherednik operators y_l(u) for coupling weight w = u⁻¹:
/// y_l = ∂_l − Σ_{i<j} ⟨α_ij, l⟩ (w∇)_ij + ½ Σ_{i<j} ⟨α_ij, l⟩ (wΔ)_ij.
#[derive(Clone, Debug)]
pub struct Dunkl<'a, S> {
    alg: &'a SlotAlgebra<S>,
    w: Elem<S>,
    particles: usize,
    literal: bool,
    corrupt: bool,
}

impl<'a, S: Scalar> Dunkl<'a, S> {
    pub fn new(alg: &'a SlotAlgebra<S>, w: Elem<S>, particles: usize) -> Self {
        Dunkl {
            alg,
            w,
            particles,
            literal: false,
            corrupt: false,
        }
    }

    /// Opposite signs on the ∇ and ρ̃ terms. This equals the working operator
    /// for the algebra with Δ(1) negated.
    pub fn with_literal_sign(mut self) -> Self {
        self.literal = true;
        self
    }

    /// Mutation hook: one branch of the geometric sum in ∇ gets the wrong sign.
    pub fn corrupted(mut self) -> Self {
        self.corrupt = true;
        self
    }

    pub fn alg(&self) -> &SlotAlgebra<S> {
        self.alg
    }

    pub fn weight(&self) -> &Elem<S> {
        &self.w
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn partial(&self, l: &[i64], v: &TensorState<S>) -> TensorState<S> {
        let mut out = TensorState::zero(v.particles);
        for (t, c) in v.iter() {
            let d: i64 = t
                .iter()
                .zip(l)
                .map(|(s, li)| match s {
                    Slot::Empty => 0,
                    Slot::At { exp, .. } => li * *exp as i64,
                })
                .sum();
            if d != 0 {
                out.add_term(t.clone(), c.clone() * &S::from_int(d));
            }
        }
        out
    }

    /// (w∇)_ij = w_i ∇_ij.
    pub fn weighted_nabla(&self, i: usize, j: usize, v: &TensorState<S>) -> TensorState<S> {
        lmul(self.alg, i, &self.w, 0, &nabla_impl(self.alg, i, j, v, self.corrupt))
    }

    /// (wΔ)_ij.
    pub fn coupling(&self, i: usize, j: usize, v: &TensorState<S>) -> TensorState<S> {
        lmul_delta(self.alg, i, j, Some(&self.w), v)
    }

    /// ⟨ρ̃(w), l⟩ = ½ Σ_{i<j} ⟨α_ij, l⟩ (wΔ)_ij.
    pub fn rho(&self, l: &[i64], v: &TensorState<S>) -> TensorState<S> {
        let half = S::from_rational(&Rational::new(1.into(), 2.into()));
        let mut out = TensorState::zero(v.particles);
        for i in 0..self.particles {
            for j in i + 1..self.particles {
                let al = l[i] - l[j];
                if al != 0 {
                    out.add_scaled(&self.coupling(i, j, v), &(half.clone() * &S::from_int(al)));
                }
            }
        }
        out
    }

    pub fn y(&self, l: &[i64], v: &TensorState<S>) -> TensorState<S> {
        let mut out = self.partial(l, v);
        let sign = if self.literal { S::one() } else { -S::one() };
        for i in 0..self.particles {
            for j in i + 1..self.particles {
                let al = l[i] - l[j];
                if al != 0 {
                    out.add_scaled(&self.weighted_nabla(i, j, v), &(sign.clone() * &S::from_int(al)));
                }
            }
        }
        out.add_scaled(&self.rho(l, v), &-sign);
        out
    }

    pub fn eps(&self, i: usize) -> Vec<i64> {
        (0..self.particles).map(|k| i64::from(k == i)).collect()
    }

    pub fn y_i(&self, i: usize, v: &TensorState<S>) -> TensorState<S> {
        self.y(&self.eps(i), v)
    }

    pub fn y_pow(&self, i: usize, k: u32, v: &TensorState<S>) -> TensorState<S> {
        (0..k).fold(v.clone(), |s, _| self.y_i(i, &s))
    }

    /// Σ_l ρ̃_l ρ̃_l, i.e. ⟨ρ̃, ρ̃⟩ as an operator.
    pub fn rho_square(&self, v: &TensorState<S>) -> TensorState<S> {
        self.weighted_rho_square(None, v)
    }

    /// Σ_l c_l ρ̃_l ρ̃_l with c_l the slot-l multiplication by `c` (or 1).
    pub fn weighted_rho_square(&self, c: Option<&Elem<S>>, v: &TensorState<S>) -> TensorState<S> {
        let mut out = TensorState::zero(v.particles);
        for l in 0..self.particles {
            let e = self.eps(l);
            let r = self.rho(&e, &self.rho(&e, v));
            match c {
                None => out.add_assign(&r),
                Some(c) => out.add_assign(&lmul(self.alg, l, c, 0, &r)),
            }
        }
        out
    }

    /// Σ_i h_i y_iᵏ on a symmetric state.
    pub fn spherical_apply(
        &self,
        poly: &[(Elem<S>, u32)],
        v: &TensorState<S>,
    ) -> Result<TensorState<S>, CherednikError> {
        check_symmetric(self.alg, v)?;
        let mut out = TensorState::zero(v.particles);
        for i in 0..self.particles {
            let mut powers = vec![v.clone()];
            for (h, k) in poly {
                while powers.len() <= *k as usize {
                    let next = self.y_i(i, powers.last().unwrap());
                    powers.push(next);
                }
                out.add_assign(&lmul(self.alg, i, h, 0, &powers[*k as usize]));
            }
        }
        check_symmetric(self.alg, &out)?;
        Ok(out)
    }
}

/// All tensor monomials with N slots and total exponent at most `degree`.
pub fn window_basis<S: Scalar>(alg: &SlotAlgebra<S>, particles: usize, degree: i32) -> Vec<TensorMonomial> {
    fn rec<S: Scalar>(alg: &SlotAlgebra<S>, n: usize, left: i32, cur: &mut Vec<Slot>, out: &mut Vec<TensorMonomial>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        cur.push(Slot::Empty);
        rec(alg, n, left, cur, out);
        cur.pop();
        for color in 0..alg.dim() {
            for exp in 0..=left {
                cur.push(Slot::At {
                    color: color as u16,
                    exp,
                });
                rec(alg, n, left - exp, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(alg, particles, degree, &mut Vec::new(), &mut out);
    out
}

/// Distinct nonzero symmetrizations of the window basis (up to scaling by the
/// canonical representative).
pub fn symmetric_window<S: Scalar>(alg: &SlotAlgebra<S>, particles: usize, degree: i32) -> Vec<TensorState<S>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for t in window_basis(alg, particles, degree) {
        let mut key = t.clone();
        key.sort();
        if !seen.insert(key) {
            continue;
        }
        let s = symmetrize(alg, &TensorState::monomial(t, S::one()));
        if !s.is_zero() {
            out.push(s);
        }
    }
    out
}

/// [y_i, y_j] = 0 on every window monomial, for all i < j.
pub fn dunkl_commutator_check<S: Scalar>(d: &Dunkl<'_, S>, degree: i32) -> CheckReport {
    let n = d.particles;
    let basis = window_basis(d.alg, n, degree);
    let reports: Vec<CheckReport> = basis
        .par_iter()
        .map(|t| {
            let mut rep = CheckReport::new("dunkl commutativity");
            let v = TensorState::monomial(t.clone(), S::one());
            for i in 0..n {
                for j in i + 1..n {
                    let c = d.y_i(i, &d.y_i(j, &v)).sub(&d.y_i(j, &d.y_i(i, &v)));
                    rep.record(c.is_zero(), || format!("[y{i},y{j}] on {t:?} = {}", c.display()));
                }
            }
            rep
        })
        .collect();
    fold_reports("dunkl commutativity", reports)
}

fn fold_reports(name: &str, reps: Vec<CheckReport>) -> CheckReport {
    let mut out = CheckReport::new(name);
    for r in reps {
        out.merge(r);
    }
    out
}

/// f r − r (ʳf) = (wΔ)_{i,i+1} · (f − ʳf)/(y_i − y_{i+1}) for f ∈ {y_i, y_i + y_{i+1}, y_i², y_i y_{i+1}}.
pub fn hecke_relation_check<S: Scalar>(d: &Dunkl<'_, S>, degree: i32) -> CheckReport {
    let n = d.particles;
    let alg = d.alg;
    let basis = window_basis(alg, n, degree);
    let reports: Vec<CheckReport> = basis
        .par_iter()
        .map(|t| {
            let mut rep = CheckReport::new("hecke relation");
            let v = TensorState::monomial(t.clone(), S::one());
            for i in 0..n.saturating_sub(1) {
                let j = i + 1;
                let r = |s: &TensorState<S>| reflect(alg, i, j, s);
                let yi = |s: &TensorState<S>| d.y_i(i, s);
                let yj = |s: &TensorState<S>| d.y_i(j, s);
                let c = |s: &TensorState<S>| d.coupling(i, j, s);
                // f = y_i: divided difference 1
                let lhs = yi(&r(&v)).sub(&r(&yj(&v)));
                rep.record(lhs == c(&v), || format!("f=y{i} on {t:?}"));
                // f = y_i + y_{i+1}: symmetric, both sides vanish
                let mut s1 = yi(&r(&v));
                s1.add_assign(&yj(&r(&v)));
                let mut s2 = r(&yi(&v));
                s2.add_assign(&r(&yj(&v)));
                rep.record(s1 == s2, || format!("f=y{i}+y{j} on {t:?}"));
                // f = y_i²: divided difference y_i + y_{i+1}, on either side of the coupling
                let lhs = yi(&yi(&r(&v))).sub(&r(&yj(&yj(&v))));
                let mut sum = yi(&v);
                sum.add_assign(&yj(&v));
                let right = c(&sum);
                let mut left = yi(&c(&v));
                left.add_assign(&yj(&c(&v)));
                rep.record(lhs == right && lhs == left, || format!("f=y{i}^2 on {t:?}"));
                // f = y_i y_{i+1}: symmetric
                let lhs = yi(&yj(&r(&v))).sub(&r(&yj(&yi(&v))));
                rep.record(lhs.is_zero(), || format!("f=y{i}y{j} on {t:?}"));
            }
            rep
        })
        .collect();
    fold_reports("hecke relation", reports)
}

/// Σ y_i = Σ ∂_i on every window monomial.
pub fn dunkl_sum_check<S: Scalar>(d: &Dunkl<'_, S>, degree: i32) -> CheckReport {
    let n = d.particles;
    let ones = vec![1i64; n];
    let basis = window_basis(d.alg, n, degree);
    let reports: Vec<CheckReport> = basis
        .par_iter()
        .map(|t| {
            let mut rep = CheckReport::new("sum of dunkl operators");
            let v = TensorState::monomial(t.clone(), S::one());
            let mut s = TensorState::zero(n);
            for i in 0..n {
                s.add_assign(&d.y_i(i, &v));
            }
            rep.record(s == d.partial(&ones, &v), || format!("on {t:?}"));
            rep
        })
        .collect();
    fold_reports("sum of dunkl operators", reports)
}

/// On symmetric f:
/// Σ y_i² f − ⟨ρ̃, ρ̃⟩ f = Σ ∂_i² f + Σ_{i<j} ((x_i + x_j)/(x_i − x_j)) (wΔ)_ij ∂_ij f,
/// with the middle term computed as −½ (1 + x_i/x_j) w_i ∇_ij(∂_ij f).
pub fn dunkl_square_check<S: Scalar>(d: &Dunkl<'_, S>, degree: i32) -> CheckReport {
    let n = d.particles;
    let alg = d.alg;
    let half = S::from_rational(&Rational::new(1.into(), 2.into()));
    let states = symmetric_window(alg, n, degree);
    let reports: Vec<CheckReport> = states
        .par_iter()
        .map(|f| {
            let mut rep = CheckReport::new("quadratic dunkl identity");
            let mut lhs = TensorState::zero(n);
            let mut rhs = TensorState::zero(n);
            for i in 0..n {
                lhs.add_assign(&d.y_pow(i, 2, f));
                let e = d.eps(i);
                rhs.add_assign(&d.partial(&e, &d.partial(&e, f)));
            }
            lhs = lhs.sub(&d.rho_square(f));
            for i in 0..n {
                for j in i + 1..n {
                    let mut l = vec![0i64; n];
                    l[i] = 1;
                    l[j] = -1;
                    let g = d.weighted_nabla(i, j, &d.partial(&l, f));
                    let mut m = g.clone();
                    m.add_assign(&shift_exps(alg, &g, &[(i, 1), (j, -1)]));
                    rhs.add_scaled(&m, &-half.clone());
                }
            }
            rep.record(lhs == rhs, || format!("on {}", f.display()));
            rep
        })
        .collect();
    fold_reports("quadratic dunkl identity", reports)
}

/// Embedding of a Fock monomial: Π P(b_c xᵐ) applied to the empty state, with
/// P(h xᵐ) = Σ_i (h xᵐ)_i.
pub fn embed<S: Scalar>(
    alg: &SlotAlgebra<S>,
    mono: &FockMonomial,
    particles: usize,
) -> Result<TensorState<S>, CherednikError> {
    if mono.len() > particles {
        return Err(CherednikError::TooFewParticles {
            needed: mono.len(),
            got: particles,
        });
    }
    let mut st = TensorState::vacuum(particles);
    for &(m, c) in mono.parts().iter().rev() {
        let mut next = TensorState::zero(particles);
        for i in 0..particles {
            next.add_assign(&lmul(alg, i, &alg.basis(c), m as i32, &st));
        }
        st = next;
    }
    Ok(st)
}

pub fn embed_vector<S: Scalar>(
    alg: &SlotAlgebra<S>,
    v: &FockVector<S>,
    particles: usize,
) -> Result<TensorState<S>, CherednikError> {
    let mut out = TensorState::zero(particles);
    for (m, c) in v.iter() {
        out.add_scaled(&embed(alg, m, particles)?, c);
    }
    Ok(out)
}

type DeltaKey = Vec<(usize, i32)>;

/// The algebra map χ from symmetric tensors to F(H), killing P(h x⁰).
/// A monomial with r occupied slots weighs (N−r)!/N! times χ of its δ_r.
pub struct Projector<'a, S> {
    space: &'a FockSpace,
    alg: &'a SlotAlgebra<S>,
    memo: Mutex<HashMap<DeltaKey, FockVector<S>>>,
}

impl<'a, S: Scalar> Projector<'a, S> {
    pub fn new(space: &'a FockSpace, alg: &'a SlotAlgebra<S>) -> Self {
        Projector {
            space,
            alg,
            memo: Mutex::new(HashMap::new()),
        }
    }

    fn chi_part(&self, c: usize, e: i32) -> FockVector<S> {
        if e <= 0 {
            return FockVector::zero();
        }
        FockVector::monomial(
            FockMonomial::new(self.space.alg(), vec![(e as u32, c)]).unwrap(),
            S::one(),
        )
    }

    /// χ(δ_r(a_1, …, a_r)) via
    /// δ_r(a, x) = δ_{r−1}(a)·P(x) − Σ_i (−1)^{|x| Σ_{k>i} |a_k|} δ_{r−1}(…, a_i x, …).
    pub fn chi_delta(&self, seq: &[(usize, i32)]) -> FockVector<S> {
        if seq.is_empty() {
            return FockVector::vacuum();
        }
        if let Some(v) = self.memo.lock().expect("projector cache poisoned").get(seq) {
            return v.clone();
        }
        let (&(xc, xe), a) = seq.split_last().unwrap();
        let mut out = self.space.mul_vec(&self.chi_delta(a), &self.chi_part(xc, xe));
        for i in 0..a.len() {
            let odd_after = a[i + 1..].iter().filter(|(c, _)| self.alg.is_odd(*c)).count() % 2 == 1;
            let neg = self.alg.is_odd(xc) && odd_after;
            for (k, m) in &self.alg.mul[a[i].0][xc] {
                let mut nseq = a.to_vec();
                nseq[i] = (*k, a[i].1 + xe);
                let coef = if neg { m.clone() } else { -m.clone() };
                out.add_scaled(&self.chi_delta(&nseq), &coef);
            }
        }
        self.memo
            .lock()
            .expect("projector cache poisoned")
            .insert(seq.to_vec(), out.clone());
        out
    }

    pub fn project(&self, v: &TensorState<S>) -> FockVector<S> {
        let n = v.particles;
        let mut weights = Vec::with_capacity(n + 1);
        for r in 0..=n {
            let num: BigInt = ((n - r + 1)..=n).fold(BigInt::from(1), |acc, k| acc * BigInt::from(k));
            weights.push(S::from_rational(&Rational::new(1.into(), num)));
        }
        let mut out = FockVector::zero();
        for (t, c) in v.iter() {
            let seq: DeltaKey = t
                .iter()
                .filter_map(|s| match s {
                    Slot::Empty => None,
                    Slot::At { color, exp } => Some((*color as usize, *exp)),
                })
                .collect();
            if seq.iter().any(|(_, e)| *e <= 0) && seq.len() == 1 {
                continue;
            }
            out.add_scaled(&self.chi_delta(&seq), &(c.clone() * &weights[seq.len()]));
        }
        out
    }
}

/// Coefficients of δ_1 … δ_p in x*x*⋯*x (p factors) for x = δ_1(b_color),
/// read off the N = p arena: a monomial with a occupied slots contributes its
/// coefficient divided by a!.
pub fn delta_power<S: Scalar>(alg: &SlotAlgebra<S>, color: usize, power: usize) -> Result<Vec<S>, CherednikError> {
    let mut st = TensorState::vacuum(power);
    for _ in 0..power {
        let mut next = TensorState::zero(power);
        for i in 0..power {
            next.add_assign(&lmul(alg, i, &alg.basis(color), 0, &st));
        }
        st = next;
    }
    let mut coeffs: Vec<Option<S>> = vec![None; power + 1];
    for (t, c) in st.iter() {
        let a = t.iter().filter(|s| **s != Slot::Empty).count();
        match &coeffs[a] {
            None => coeffs[a] = Some(c.clone()),
            Some(d) if d == c => {}
            Some(_) => return Err(CherednikError::NotSymmetricPattern),
        }
    }
    let mut fact = BigInt::from(1);
    let mut out = Vec::with_capacity(power);
    for (a, c) in coeffs.into_iter().enumerate().skip(1) {
        fact *= BigInt::from(a);
        let c = c.unwrap_or_else(S::zero);
        out.push(c.mul_rational(&Rational::new(1.into(), fact.clone())));
    }
    Ok(out)
}
