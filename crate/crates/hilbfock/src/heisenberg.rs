//! Operators on F(H): creation operators P(h xᵐ), derivations P(h xᵃ∂),
//! the element Δ_*, the Lehn operator 𝔏(H, K), and super-commutators of
//! energy-graded operator families.

use rayon::prelude::*;
use thiserror::Error;

use crate::fock::{FockMonomial, FockSpace, FockVector};
use crate::frobenius::AlgElement;
use crate::linalg::{LinalgError, Matrix};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeisenbergError {
    #[error("operators cover different energy ranges ({0} and {1})")]
    RangeMismatch(u32, u32),
    #[error("operators have different energy shifts ({0} and {1})")]
    ShiftMismatch(u32, u32),
    #[error("operators have different parities")]
    ParityMismatch,
    #[error("element has mixed parity")]
    MixedParity,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Blocks Fⁿ → F^{n+shift} for every n with n + shift ≤ nmax.
#[derive(Clone, PartialEq)]
pub struct GradedOperator<S> {
    shift: u32,
    odd: bool,
    nmax: u32,
    blocks: Vec<Matrix<S>>,
}

impl<S: Scalar> std::fmt::Debug for GradedOperator<S> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GradedOperator")
            .field("shift", &self.shift)
            .field("odd", &self.odd)
            .field("nmax", &self.nmax)
            .field("blocks", &self.blocks)
            .finish()
    }
}

impl<S: Scalar> GradedOperator<S> {
    /// Assembles blocks column by column from the action on basis monomials.
    pub fn from_fn<F>(space: &FockSpace, shift: u32, odd: bool, nmax: u32, f: F) -> Self
    where
        F: Fn(&FockMonomial) -> FockVector<S> + Sync,
    {
        let mut blocks = Vec::new();
        if shift <= nmax {
            for n in 0..=nmax - shift {
                blocks.push(block_from_fn(space, n, n + shift, &f));
            }
        }
        GradedOperator {
            shift,
            odd,
            nmax,
            blocks,
        }
    }

    pub fn from_blocks(shift: u32, odd: bool, nmax: u32, blocks: Vec<Matrix<S>>) -> Self {
        assert_eq!(blocks.len() as u32, (nmax + 1).saturating_sub(shift), "block count");
        GradedOperator {
            shift,
            odd,
            nmax,
            blocks,
        }
    }

    pub fn identity(space: &FockSpace, nmax: u32) -> Self {
        let blocks = (0..=nmax).map(|n| Matrix::identity(space.dimension(n))).collect();
        GradedOperator {
            shift: 0,
            odd: false,
            nmax,
            blocks,
        }
    }

    pub fn zero(space: &FockSpace, shift: u32, odd: bool, nmax: u32) -> Self {
        Self::from_fn(space, shift, odd, nmax, |_| FockVector::zero())
    }

    pub fn shift(&self) -> u32 {
        self.shift
    }

    pub fn is_odd(&self) -> bool {
        self.odd
    }

    pub fn nmax(&self) -> u32 {
        self.nmax
    }

    /// Block on source energy `n`.
    pub fn block(&self, n: u32) -> Option<&Matrix<S>> {
        self.blocks.get(n as usize)
    }

    pub fn blocks(&self) -> &[Matrix<S>] {
        &self.blocks
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.iter().all(|b| b.is_zero())
    }

    /// Equal as maps; the parity label of a zero operator is ignored.
    pub fn same_action(&self, o: &Self) -> bool {
        self.shift == o.shift && self.nmax == o.nmax && self.blocks == o.blocks && (self.odd == o.odd || self.is_zero())
    }

    pub fn apply(&self, space: &FockSpace, v: &FockVector<S>, n: u32) -> FockVector<S> {
        let x = space.coords(v, n);
        space.from_coords(&self.blocks[n as usize].apply(&x), n + self.shift)
    }

    fn check_range(&self, o: &Self) -> Result<(), HeisenbergError> {
        if self.nmax != o.nmax {
            return Err(HeisenbergError::RangeMismatch(self.nmax, o.nmax));
        }
        Ok(())
    }

    /// `self ∘ o`.
    pub fn compose(&self, o: &Self) -> Result<Self, HeisenbergError> {
        self.check_range(o)?;
        let shift = self.shift + o.shift;
        let mut blocks = Vec::new();
        if shift <= self.nmax {
            for n in 0..=self.nmax - shift {
                blocks.push(self.blocks[(n + o.shift) as usize].mul(&o.blocks[n as usize])?);
            }
        }
        Ok(GradedOperator {
            shift,
            odd: self.odd ^ o.odd,
            nmax: self.nmax,
            blocks,
        })
    }

    fn combine(&self, o: &Self, sub: bool) -> Result<Self, HeisenbergError> {
        self.check_range(o)?;
        if self.shift != o.shift {
            return Err(HeisenbergError::ShiftMismatch(self.shift, o.shift));
        }
        if self.odd != o.odd && !self.is_zero() && !o.is_zero() {
            return Err(HeisenbergError::ParityMismatch);
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&o.blocks)
            .map(|(a, b)| if sub { a.sub(b) } else { a.add(b) })
            .collect::<Result<_, _>>()?;
        let odd = if self.is_zero() { o.odd } else { self.odd };
        Ok(GradedOperator {
            shift: self.shift,
            odd,
            nmax: self.nmax,
            blocks,
        })
    }

    pub fn add(&self, o: &Self) -> Result<Self, HeisenbergError> {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &Self) -> Result<Self, HeisenbergError> {
        self.combine(o, true)
    }

    pub fn scale(&self, s: &S) -> Self {
        GradedOperator {
            shift: self.shift,
            odd: self.odd,
            nmax: self.nmax,
            blocks: self.blocks.iter().map(|b| b.scale(s)).collect(),
        }
    }

    /// Super-commutator [A, B] = AB − (−1)^{|A||B|} BA.
    pub fn bracket(&self, o: &Self) -> Result<Self, HeisenbergError> {
        let ab = self.compose(o)?;
        let ba = o.compose(self)?;
        if self.odd && o.odd {
            ab.add(&ba)
        } else {
            ab.sub(&ba)
        }
    }
}

fn block_from_fn<S: Scalar, F>(space: &FockSpace, src: u32, dst: u32, f: &F) -> Matrix<S>
where
    F: Fn(&FockMonomial) -> FockVector<S> + Sync,
{
    let sb = space.basis(src);
    let tb = space.basis(dst);
    let columns: Vec<Vec<S>> = sb
        .monomials()
        .par_iter()
        .map(|m| {
            let v = f(m);
            let mut col = vec![S::zero(); tb.len()];
            for (k, c) in v.iter() {
                let i = tb.index_of(k).unwrap_or_else(|| panic!("{k} escapes energy {dst}"));
                col[i] = c.clone();
            }
            col
        })
        .collect();
    Matrix::from_columns(tb.len(), columns)
}

fn parity(space: &FockSpace, h: &AlgElement<impl Scalar>) -> Result<bool, HeisenbergError> {
    if h.is_zero() {
        return Ok(false);
    }
    space.alg().parity_of(h).ok_or(HeisenbergError::MixedParity)
}

/// P(h xᵐ)·v.
pub fn apply_mul<S: Scalar>(space: &FockSpace, h: &AlgElement<S>, m: u32, v: &FockVector<S>) -> FockVector<S> {
    space.mul_vec(&space.part_vector(h, m), v)
}

/// P(b_hc xᵃ∂) on a monomial, by D(P(b_c xᵐ)w) = m P(b_hc b_c x^{a+m}) w + (−1)^{|hc||c|} P(b_c xᵐ) D(w).
pub fn deriv_apply<S: Scalar>(space: &FockSpace, hc: usize, a: u32, mono: &FockMonomial) -> FockVector<S> {
    let Some(((m, c), rest)) = mono.split_first() else {
        return FockVector::zero();
    };
    let alg = space.alg();
    let rest_v = FockVector::monomial(rest.clone(), S::one());
    let hb: AlgElement<S> = alg.mul_elems(&alg.basis_element(hc), &alg.basis_element(c));
    let mut out = apply_mul(space, &hb, a + m, &rest_v).scale(&S::from_int(m as i64));
    let tail = deriv_apply::<S>(space, hc, a, &rest);
    let head = space.mul_vec(
        &FockVector::monomial(FockMonomial::new(alg, vec![(m, c)]).unwrap(), S::one()),
        &tail,
    );
    if alg.is_odd(hc) && alg.is_odd(c) {
        out.add_assign(&head.neg());
    } else {
        out.add_assign(&head);
    }
    out
}

/// Δ_*(h, n) = Σ_j Σ_{r=1}^{n−1} P(h a_j x^r) P(b_j x^{n−r}) for Δ(1) = Σ a_j ⊗ b_j.
/// The r = n term carries P(b_j x⁰), which is zero on F(H).
pub fn delta_star<S: Scalar>(space: &FockSpace, h: &AlgElement<S>, n: u32) -> FockVector<S> {
    let alg = space.alg();
    let mut out = FockVector::zero();
    for (i, j, c) in alg.coproduct() {
        let ha = alg.mul_elems(h, &alg.basis_element(*i));
        let b: AlgElement<S> = alg.basis_element(*j);
        let coef = S::from_rational(c);
        for r in 1..n {
            let t = space.mul_vec(&space.part_vector(&ha, r), &space.part_vector(&b, n - r));
            out.add_scaled(&t, &coef);
        }
    }
    out
}

/// 𝔏(H, K) on a monomial:
/// 𝔏(P(p)w) = 2m P(b_c xᵐ∂)w + m² P(K b_c xᵐ)w + m Δ_*(b_c, m)w + P(p)𝔏w.
pub fn lehn_apply<S: Scalar>(space: &FockSpace, k: &AlgElement<S>, mono: &FockMonomial) -> FockVector<S> {
    let Some(((m, c), rest)) = mono.split_first() else {
        return FockVector::zero();
    };
    let alg = space.alg();
    let rest_v = FockVector::monomial(rest.clone(), S::one());
    let bc: AlgElement<S> = alg.basis_element(c);
    let mm = S::from_int(m as i64);
    let mut out = deriv_apply::<S>(space, c, m, &rest).scale(&S::from_int(2 * m as i64));
    let kb = alg.mul_elems(k, &bc);
    out.add_scaled(&apply_mul(space, &kb, m, &rest_v), &(mm.clone() * &mm));
    out.add_scaled(&space.mul_vec(&delta_star(space, &bc, m), &rest_v), &mm);
    let part = FockVector::monomial(FockMonomial::new(alg, vec![(m, c)]).unwrap(), S::one());
    out.add_assign(&space.mul_vec(&part, &lehn_apply(space, k, &rest)));
    out
}

pub fn mul_op<S: Scalar>(
    space: &FockSpace,
    h: &AlgElement<S>,
    m: u32,
    nmax: u32,
) -> Result<GradedOperator<S>, HeisenbergError> {
    let odd = parity(space, h)?;
    Ok(GradedOperator::from_fn(space, m, odd, nmax, |mono| {
        apply_mul(space, h, m, &FockVector::monomial(mono.clone(), S::one()))
    }))
}

pub fn deriv_op<S: Scalar>(
    space: &FockSpace,
    h: &AlgElement<S>,
    a: u32,
    nmax: u32,
) -> Result<GradedOperator<S>, HeisenbergError> {
    let odd = parity(space, h)?;
    let terms = h.sparse();
    Ok(GradedOperator::from_fn(space, a, odd, nmax, |mono| {
        let mut v = FockVector::zero();
        for (hc, x) in &terms {
            v.add_scaled(&deriv_apply::<S>(space, *hc, a, mono), x);
        }
        v
    }))
}

pub fn lehn_op<S: Scalar>(space: &FockSpace, k: &AlgElement<S>, nmax: u32) -> GradedOperator<S> {
    GradedOperator::from_fn(space, 0, false, nmax, |mono| lehn_apply(space, k, mono))
}

/// 𝔏(H, K) with the algebra's own canonical class.
pub fn lehn_default(space: &FockSpace, nmax: u32) -> GradedOperator<Rational> {
    lehn_op(space, space.alg().canonical_class(), nmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::cohomological_degree;
    use crate::frobenius::FrobeniusAlgebra;
    use crate::scalar::rat;
    use num_traits::Zero;

    type Q = Rational;

    fn mono(space: &FockSpace, parts: Vec<(u32, usize)>) -> FockMonomial {
        FockMonomial::new(space.alg(), parts).unwrap()
    }

    fn el(v: &[i64]) -> AlgElement<Q> {
        AlgElement {
            coeffs: v.iter().map(|&x| rat(x, 1)).collect(),
        }
    }

    #[test]
    fn creation_examples() {
        let f = FockSpace::new(FrobeniusAlgebra::torus());
        let one: AlgElement<Q> = f.alg().unit_element();
        let vac = FockVector::<Q>::vacuum();
        assert_eq!(
            apply_mul(&f, &one, 1, &vac),
            FockVector::monomial(mono(&f, vec![(1, 0)]), rat(1, 1))
        );
        let a: AlgElement<Q> = f.alg().basis_element(1);
        assert!(apply_mul(&f, &a, 1, &apply_mul(&f, &a, 1, &vac)).is_zero());
        let v = apply_mul(&f, &one, 2, &apply_mul(&f, &one, 1, &vac));
        assert_eq!(v, FockVector::monomial(mono(&f, vec![(2, 0), (1, 0)]), rat(1, 1)));
    }

    #[test]
    fn derivation_examples() {
        let f = FockSpace::new(FrobeniusAlgebra::p2());
        let one = el(&[1, 0, 0]);
        let energy = deriv_op(&f, &one, 0, 4).unwrap();
        for n in 0..=4 {
            assert_eq!(
                energy.block(n).unwrap(),
                &Matrix::identity(f.dimension(n)).scale(&rat(n as i64, 1))
            );
        }
        let v = deriv_apply::<Q>(&f, 1, 0, &mono(&f, vec![(2, 1)]));
        assert_eq!(v, FockVector::monomial(mono(&f, vec![(2, 2)]), rat(2, 1)));
        let v = deriv_apply::<Q>(&f, 0, 1, &mono(&f, vec![(1, 0), (1, 0)]));
        assert_eq!(v, FockVector::monomial(mono(&f, vec![(2, 0), (1, 0)]), rat(2, 1)));
    }

    #[test]
    fn delta_star_examples() {
        let p = FockSpace::new(FrobeniusAlgebra::point());
        let one: AlgElement<Q> = p.alg().unit_element();
        assert_eq!(
            delta_star(&p, &one, 3),
            FockVector::monomial(mono(&p, vec![(2, 0), (1, 0)]), rat(2, 1))
        );
        assert!(delta_star(&p, &one, 1).is_zero());
        let f = FockSpace::new(FrobeniusAlgebra::p2());
        let one = el(&[1, 0, 0]);
        let mut expect = FockVector::zero();
        expect.add_term(mono(&f, vec![(1, 0), (1, 2)]), rat(2, 1));
        expect.add_term(mono(&f, vec![(1, 1), (1, 1)]), rat(1, 1));
        assert_eq!(delta_star(&f, &one, 2), expect);
    }

    #[test]
    fn lehn_hand_values() {
        let p = FockSpace::new(FrobeniusAlgebra::point());
        let l = lehn_op(&p, &el(&[0]), 2);
        let b2 = p.basis(2);
        assert_eq!(b2.monomials()[0], mono(&p, vec![(2, 0)]));
        let expect = Matrix::from_rows(vec![vec![rat(0, 1), rat(2, 1)], vec![rat(2, 1), rat(0, 1)]]).unwrap();
        assert_eq!(l.block(2).unwrap(), &expect);
        assert!(l.block(0).unwrap().is_zero());
        let f = FockSpace::new(FrobeniusAlgebra::p2());
        let v = lehn_apply(&f, f.alg().canonical_class(), &mono(&f, vec![(1, 0)]));
        assert_eq!(v, FockVector::monomial(mono(&f, vec![(1, 1)]), rat(-3, 1)));
    }

    #[test]
    fn brackets() {
        for alg in FrobeniusAlgebra::reference_algebras() {
            let f = FockSpace::new(alg);
            let nmax = if f.alg().dim() == 1 { 5 } else { 4 };
            let lehn = lehn_default(&f, nmax);
            let one: AlgElement<Q> = f.alg().unit_element();
            let energy = deriv_op(&f, &one, 0, nmax).unwrap();
            assert!(lehn.bracket(&energy).unwrap().is_zero());
            assert!(lehn.bracket(&lehn).unwrap().is_zero());
            let b = lehn.bracket(&mul_op(&f, &one, 1, nmax).unwrap()).unwrap();
            for c in 0..f.alg().dim() {
                let h: AlgElement<Q> = f.alg().basis_element(c);
                for m in 1..=2 {
                    let p = mul_op(&f, &h, m, nmax).unwrap();
                    assert_eq!(energy.bracket(&p).unwrap(), p.scale(&rat(m as i64, 1)));
                    let lhs = b.bracket(&p).unwrap();
                    let rhs = mul_op(&f, &h, m + 1, nmax).unwrap().scale(&rat(2 * m as i64, 1));
                    assert_eq!(lhs, rhs, "{} c={c} m={m}", f.alg().name());
                }
            }
        }
    }

    #[test]
    fn lehn_raises_degree_by_two() {
        for alg in [FrobeniusAlgebra::p2(), FrobeniusAlgebra::torus()] {
            let f = FockSpace::new(alg);
            let lehn = lehn_default(&f, 4);
            for n in 0..=4 {
                let b = f.basis(n);
                let m = lehn.block(n).unwrap();
                for r in 0..b.len() {
                    for c in 0..b.len() {
                        if !m.get(r, c).is_zero() {
                            let (dr, dc) = (
                                cohomological_degree(f.alg(), &b.monomials()[r]),
                                cohomological_degree(f.alg(), &b.monomials()[c]),
                            );
                            assert_eq!(dr, dc + 2);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn range_mismatch() {
        let f = FockSpace::new(FrobeniusAlgebra::point());
        let a = lehn_default(&f, 2);
        let b = lehn_default(&f, 3);
        assert_eq!(a.bracket(&b), Err(HeisenbergError::RangeMismatch(2, 3)));
    }
}
