//! The Fock space F(H): supercommutative polynomials in the generators
//! P(b_c xᵐ), m ≥ 1, with a colored-partition basis per energy.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::frobenius::{AlgElement, FrobeniusAlgebra};
use crate::scalar::Scalar;

/// One generator P(b_c xᵐ): energy `m ≥ 1`, color `c`.
pub type Part = (u32, usize);

fn part_cmp(p: &Part, q: &Part) -> Ordering {
    q.0.cmp(&p.0).then(p.1.cmp(&q.1))
}

/// Product of parts in canonical order (energy descending, then color ascending).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FockMonomial(Vec<Part>);

impl FockMonomial {
    pub fn vacuum() -> Self {
        FockMonomial(Vec::new())
    }

    /// Checks canonical order and, for odd colors, the absence of repeats.
    pub fn new(alg: &FrobeniusAlgebra, parts: Vec<Part>) -> Option<Self> {
        for p in &parts {
            if p.0 == 0 || p.1 >= alg.dim() {
                return None;
            }
        }
        for w in parts.windows(2) {
            match part_cmp(&w[0], &w[1]) {
                Ordering::Greater => return None,
                Ordering::Equal if alg.is_odd(w[0].1) => return None,
                _ => {}
            }
        }
        Some(FockMonomial(parts))
    }

    /// No algebra at hand: the caller has checked the order already.
    pub fn from_parts_unchecked(parts: Vec<Part>) -> Self {
        FockMonomial(parts)
    }

    pub fn parts(&self) -> &[Part] {
        &self.0
    }

    pub fn energy(&self) -> u32 {
        self.0.iter().map(|p| p.0).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Splits off the canonical first part; `self = P(first)·rest` with sign +1.
    pub fn split_first(&self) -> Option<(Part, FockMonomial)> {
        let (&p, rest) = self.0.split_first()?;
        Some((p, FockMonomial(rest.to_vec())))
    }

    /// Splits off the last part: `self = ε·P(last)·rest` with sign ε = (−1)^{|last||rest|}
    /// returned as `negative`.
    pub fn split_last(&self, alg: &FrobeniusAlgebra) -> Option<(Part, FockMonomial, bool)> {
        let (&p, rest) = self.0.split_last()?;
        let rest = FockMonomial(rest.to_vec());
        let neg = alg.is_odd(p.1) && mono_parity(alg, &rest);
        Some((p, rest, neg))
    }
}

impl fmt::Display for FockMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (m, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "({m},{c})")?;
        }
        write!(f, "]")
    }
}

pub fn mono_parity(alg: &FrobeniusAlgebra, m: &FockMonomial) -> bool {
    m.0.iter().filter(|p| alg.is_odd(p.1)).count() % 2 == 1
}

/// Degree of a part (m, c) is deg(c) + 2(m − 1).
pub fn cohomological_degree(alg: &FrobeniusAlgebra, m: &FockMonomial) -> u32 {
    m.0.iter().map(|&(e, c)| alg.degree(c) + 2 * (e - 1)).sum()
}

/// Product `a·b`: the merged canonical monomial with the sign of the odd-odd
/// transpositions needed to sort it, or `None` when an odd part repeats.
/// The boolean is `true` for sign −1.
pub fn multiply(alg: &FrobeniusAlgebra, a: &FockMonomial, b: &FockMonomial) -> Option<(bool, FockMonomial)> {
    let (x, y) = (&a.0, &b.0);
    let mut out = Vec::with_capacity(x.len() + y.len());
    let mut neg = false;
    let (mut i, mut j) = (0, 0);
    // odd parts of `a` not yet emitted, needed to sign each odd part of `b`
    let mut odd_left = x.iter().filter(|p| alg.is_odd(p.1)).count();
    while i < x.len() || j < y.len() {
        let take_a = if i == x.len() {
            false
        } else if j == y.len() {
            true
        } else {
            match part_cmp(&x[i], &y[j]) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => {
                    if alg.is_odd(x[i].1) {
                        return None;
                    }
                    true
                }
            }
        };
        if take_a {
            if alg.is_odd(x[i].1) {
                odd_left -= 1;
            }
            out.push(x[i]);
            i += 1;
        } else {
            if alg.is_odd(y[j].1) && odd_left % 2 == 1 {
                neg = !neg;
            }
            out.push(y[j]);
            j += 1;
        }
    }
    Some((neg, FockMonomial(out)))
}

/// Sparse vector in F(H).
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<S> {
    terms: BTreeMap<FockMonomial, S>,
}

impl<S: Scalar> Default for FockVector<S> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<S: Scalar> FockVector<S> {
    pub fn zero() -> Self {
        FockVector { terms: BTreeMap::new() }
    }

    pub fn monomial(m: FockMonomial, c: S) -> Self {
        let mut v = Self::zero();
        v.add_term(m, c);
        v
    }

    pub fn vacuum() -> Self {
        Self::monomial(FockMonomial::vacuum(), S::one())
    }

    pub fn add_term(&mut self, m: FockMonomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + &c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add_scaled(&mut self, o: &FockVector<S>, s: &S) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone() * s);
        }
    }

    pub fn add_assign(&mut self, o: &FockVector<S>) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn scale(&self, s: &S) -> FockVector<S> {
        let mut v = Self::zero();
        v.add_scaled(self, s);
        v
    }

    pub fn neg(&self) -> FockVector<S> {
        FockVector {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, m: &FockMonomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockMonomial, &S)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Ordered basis of one energy weight space.
#[derive(Debug)]
pub struct Basis {
    monos: Vec<FockMonomial>,
    index: HashMap<FockMonomial, usize>,
}

impl Basis {
    pub fn monomials(&self) -> &[FockMonomial] {
        &self.monos
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn index_of(&self, m: &FockMonomial) -> Option<usize> {
        self.index.get(m).copied()
    }
}

/// F(H) for a fixed algebra, with a per-energy basis cache.
#[derive(Debug)]
pub struct FockSpace {
    alg: FrobeniusAlgebra,
    cache: RwLock<HashMap<u32, Arc<Basis>>>,
}

impl FockSpace {
    pub fn new(alg: FrobeniusAlgebra) -> Self {
        FockSpace {
            alg,
            cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn alg(&self) -> &FrobeniusAlgebra {
        &self.alg
    }

    /// Colored partitions of `n`, shapes in descending lexicographic order
    /// (so 4, 31, 22, 211, 1111), colors ascending within a shape.
    pub fn basis(&self, n: u32) -> Arc<Basis> {
        if let Some(b) = self.cache.read().expect("basis cache poisoned").get(&n) {
            return b.clone();
        }
        let monos = enumerate_basis(&self.alg, n);
        let index = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let b = Arc::new(Basis { monos, index });
        self.cache
            .write()
            .expect("basis cache poisoned")
            .entry(n)
            .or_insert(b)
            .clone()
    }

    pub fn dimension(&self, n: u32) -> usize {
        self.basis(n).len()
    }

    pub fn multiply(&self, a: &FockMonomial, b: &FockMonomial) -> Option<(bool, FockMonomial)> {
        multiply(&self.alg, a, b)
    }

    pub fn mul_vec<S: Scalar>(&self, a: &FockVector<S>, b: &FockVector<S>) -> FockVector<S> {
        let mut out = FockVector::zero();
        for (x, cx) in a.iter() {
            for (y, cy) in b.iter() {
                if let Some((neg, m)) = self.multiply(x, y) {
                    let c = cx.clone() * cy;
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        out
    }

    /// P(h xᵐ) as a vector; zero for m = 0 (the quotient by H·Sym H[x]).
    pub fn part_vector<S: Scalar>(&self, h: &AlgElement<S>, m: u32) -> FockVector<S> {
        let mut v = FockVector::zero();
        if m == 0 {
            return v;
        }
        for (c, x) in h.coeffs.iter().enumerate() {
            if !x.is_zero() {
                v.add_term(FockMonomial(vec![(m, c)]), x.clone());
            }
        }
        v
    }

    /// Coordinates of a vector supported in energy `n`.
    pub fn coords<S: Scalar>(&self, v: &FockVector<S>, n: u32) -> Vec<S> {
        let b = self.basis(n);
        let mut out = vec![S::zero(); b.len()];
        for (m, c) in v.iter() {
            let i = b
                .index_of(m)
                .unwrap_or_else(|| panic!("monomial {m} is not in energy {n}"));
            out[i] = c.clone();
        }
        out
    }

    pub fn from_coords<S: Scalar>(&self, x: &[S], n: u32) -> FockVector<S> {
        let b = self.basis(n);
        let mut v = FockVector::zero();
        for (m, c) in b.monomials().iter().zip(x) {
            v.add_term(m.clone(), c.clone());
        }
        v
    }

    pub fn parity(&self, m: &FockMonomial) -> bool {
        mono_parity(&self.alg, m)
    }

    pub fn degree(&self, m: &FockMonomial) -> u32 {
        cohomological_degree(&self.alg, m)
    }
}

pub fn enumerate_basis(alg: &FrobeniusAlgebra, n: u32) -> Vec<FockMonomial> {
    fn rec(alg: &FrobeniusAlgebra, rem: u32, max: Part, cur: &mut Vec<Part>, out: &mut Vec<FockMonomial>) {
        if rem == 0 {
            out.push(FockMonomial(cur.clone()));
            return;
        }
        for m in (1..=rem.min(max.0)).rev() {
            for c in 0..alg.dim() {
                if m == max.0 && c < max.1 {
                    continue;
                }
                if m == max.0 && c == max.1 && alg.is_odd(c) && !cur.is_empty() {
                    continue;
                }
                cur.push((m, c));
                rec(alg, rem - m, (m, c), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(alg, n, (n, 0), &mut Vec::new(), &mut out);
    out
}

/// Coefficient of qⁿ in Π_m (1+qᵐ)^{b_odd} / (1−qᵐ)^{b_even}.
pub fn dimension_gf(alg: &FrobeniusAlgebra, n: u32) -> u128 {
    let n = n as usize;
    let mut series = vec![0u128; n + 1];
    series[0] = 1;
    for m in 1..=n {
        for _ in 0..alg.even_count() {
            // multiply by 1/(1 − qᵐ)
            for k in m..=n {
                series[k] += series[k - m];
            }
        }
        for _ in 0..alg.odd_count() {
            // multiply by (1 + qᵐ)
            for k in (m..=n).rev() {
                series[k] += series[k - m];
            }
        }
    }
    series[n]
}
