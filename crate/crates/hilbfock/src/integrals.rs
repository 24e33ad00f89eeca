//! The two constructions of the multiplication algebra on Fⁿ.
//!
//! Chern route: operators ĉh_i(h) built from 𝔏 by a commutator recursion.
//! Dunkl route: the twisted spherical algebra Φ_u Sym H[y(u²)] Φ_u⁻¹ along a
//! degeneration direction u_λ, followed by its flat limit at λ = 0.

use std::collections::HashMap;

use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

use crate::cherednik::{embed_vector, CherednikError, Dunkl, Elem, Projector, SlotAlgebra, TensorState};
use crate::fock::{FockMonomial, FockSpace, FockVector};
use crate::frobenius::{AlgElement, AlgebraError, DegenerationDirection};
use crate::heisenberg::{apply_mul, lehn_op, mul_op, GradedOperator, HeisenbergError};
use crate::linalg::{Echelon, LinalgError, Matrix};
use crate::report::CheckReport;
use crate::scalar::{rat, Rational, RationalFunction, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntegralsError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Heisenberg(#[from] HeisenbergError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Cherednik(#[from] CherednikError),
    #[error("pole at lambda = 0: {0}")]
    Pole(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("chern recursion is inconsistent on {0}")]
    Inconsistent(String),
    #[error("flat limit did not converge within {0} valuation steps")]
    FlatLimitStuck(usize),
    #[error("generated algebra has dimension {got}, expected {expected}")]
    Dimension { got: usize, expected: usize },
}

/// Sample point for choosing words of the Dunkl-route algebra.
pub fn sample_point() -> Rational {
    rat(7, 3)
}

// ---------------------------------------------------------------------------
// Twisting

/// Φ_u on one monomial: every part P(b_c xᵐ) becomes P(u b_c xᵐ).
pub fn twist_apply<S: Scalar>(space: &FockSpace, u: &AlgElement<S>, mono: &FockMonomial) -> FockVector<S> {
    let alg = space.alg();
    let mut v = FockVector::vacuum();
    for &(m, c) in mono.parts().iter().rev() {
        let uc = alg.mul_elems(u, &alg.basis_element(c));
        v = apply_mul(space, &uc, m, &v);
    }
    v
}

pub fn twist_vector<S: Scalar>(space: &FockSpace, u: &AlgElement<S>, v: &FockVector<S>) -> FockVector<S> {
    let mut out = FockVector::zero();
    for (m, c) in v.iter() {
        out.add_scaled(&twist_apply(space, u, m), c);
    }
    out
}

pub fn twist_matrix<S: Scalar>(space: &FockSpace, u: &AlgElement<S>, n: u32) -> Matrix<S> {
    let basis = space.basis(n);
    let cols = basis
        .monomials()
        .iter()
        .map(|m| space.coords(&twist_apply(space, u, m), n))
        .collect();
    Matrix::from_columns(basis.len(), cols)
}

/// Φ_u M Φ_u⁻¹ on Fⁿ.
pub fn twist<S: Scalar>(
    space: &FockSpace,
    u: &AlgElement<S>,
    m: &Matrix<S>,
    n: u32,
) -> Result<Matrix<S>, IntegralsError> {
    let inv = space.alg().invert_even(u)?;
    let a = twist_matrix(space, u, n);
    let b = twist_matrix(space, &inv, n);
    Ok(a.mul(m)?.mul(&b)?)
}

fn flatten<S: Scalar>(m: &Matrix<S>) -> Vec<S> {
    m.entries().to_vec()
}

fn unflatten<S: Scalar>(d: usize, v: &[S]) -> Matrix<S> {
    Matrix::from_rows(v.chunks(d.max(1)).take(d).map(|r| r.to_vec()).collect()).expect("square shape")
}

// ---------------------------------------------------------------------------
// Dunkl route

/// Operators on Fⁿ obtained by transporting N-particle operators through
/// Φ_u⁻¹, embed, the operator, projection, Φ_u.
pub struct DunklRoute<'a, S> {
    space: &'a FockSpace,
    slot: SlotAlgebra<S>,
    u: AlgElement<S>,
    u_inv: AlgElement<S>,
    w: Elem<S>,
    particles: usize,
}

impl<'a, S: Scalar> DunklRoute<'a, S> {
    /// y(u²) operators on `particles` slots; the coupling weight is u⁻².
    pub fn new(space: &'a FockSpace, u: AlgElement<S>, particles: usize) -> Result<Self, IntegralsError> {
        let alg = space.alg();
        let u_inv = alg.invert_even(&u)?;
        let w = alg.mul_elems(&u_inv, &u_inv).sparse();
        Ok(DunklRoute {
            space,
            slot: SlotAlgebra::from_frobenius(alg),
            u,
            u_inv,
            w,
            particles,
        })
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn with_particles(&self, particles: usize) -> Self {
        DunklRoute {
            space: self.space,
            slot: self.slot.clone(),
            u: self.u.clone(),
            u_inv: self.u_inv.clone(),
            w: self.w.clone(),
            particles,
        }
    }

    pub fn dunkl(&self) -> Dunkl<'_, S> {
        Dunkl::new(&self.slot, self.w.clone(), self.particles)
    }

    /// Matrix on Fⁿ of Φ_u χ op embed Φ_u⁻¹.
    pub fn transport<F>(&self, n: u32, op: F) -> Result<Matrix<S>, IntegralsError>
    where
        F: Fn(&Dunkl<'_, S>, &TensorState<S>) -> Result<TensorState<S>, CherednikError> + Sync,
    {
        let basis = self.space.basis(n);
        let proj = Projector::new(self.space, &self.slot);
        let d = self.dunkl();
        let cols: Vec<Vec<S>> = basis
            .monomials()
            .par_iter()
            .map(|m| {
                let v = twist_apply(self.space, &self.u_inv, m);
                let st = embed_vector(&self.slot, &v, self.particles)?;
                let out = proj.project(&op(&d, &st)?);
                Ok(self.space.coords(&twist_vector(self.space, &self.u, &out), n))
            })
            .collect::<Result<_, IntegralsError>>()?;
        Ok(Matrix::from_columns(basis.len(), cols))
    }

    /// Twisted P(Σ h yᵏ) for a polynomial given as (h, k) pairs.
    pub fn spherical(&self, poly: &[(AlgElement<S>, u32)], n: u32) -> Result<Matrix<S>, IntegralsError> {
        let poly: Vec<(Elem<S>, u32)> = poly.iter().map(|(h, k)| (h.sparse(), *k)).collect();
        self.transport(n, |d, st| d.spherical_apply(&poly, st))
    }

    /// Twisted P(b_c yᵏ).
    pub fn generator(&self, c: usize, k: u32, n: u32) -> Result<Matrix<S>, IntegralsError> {
        self.spherical(&[(self.space.alg().basis_element(c), k)], n)
    }

    /// Twisted Σ_i h_i y_i² − Σ_l h_l ρ̃_l ρ̃_l. The subtracted term projects to
    /// zero once N ≥ n + 3, and removing it makes the operator stable from N = n + 1.
    pub fn corrected_square(&self, h: &AlgElement<S>, n: u32) -> Result<Matrix<S>, IntegralsError> {
        let h = h.sparse();
        self.transport(n, |d, st| {
            let mut out = d.spherical_apply(&[(h.clone(), 2)], st)?;
            out.add_scaled(&d.weighted_rho_square(Some(&h), st), &-S::one());
            Ok(out)
        })
    }

    /// Twisted Σ_i u_i y_i(u²)² − Σ_l u_l ρ̃_l(u⁻²)².
    pub fn cts_operator(&self, n: u32) -> Result<Matrix<S>, IntegralsError> {
        self.corrected_square(&self.u, n)
    }

    /// Twisted Σ_l u_l ρ̃_l ρ̃_l alone.
    pub fn rho_correction(&self, n: u32) -> Result<Matrix<S>, IntegralsError> {
        let u = self.u.sparse();
        self.transport(n, |d, st| Ok(d.weighted_rho_square(Some(&u), st)))
    }
}

/// 𝔏(H, u − e u⁻¹) on Fⁿ against the transported Calogero–Sutherland operator at N particles.
pub fn cts_cross_check<S: Scalar>(
    space: &FockSpace,
    u: &AlgElement<S>,
    n: u32,
    particles: usize,
) -> Result<CheckReport, IntegralsError> {
    let k = space.alg().k_of(u)?;
    let lehn = lehn_op(space, &k, n);
    let route = DunklRoute::new(space, u.clone(), particles)?;
    let m = route.cts_operator(n)?;
    let mut rep = CheckReport::new(format!("CS operator {} n={n} N={particles}", space.alg().name()));
    compare_matrices(&mut rep, lehn.block(n).expect("block n"), &m, space, n);
    Ok(rep)
}

fn compare_matrices<S: Scalar>(rep: &mut CheckReport, a: &Matrix<S>, b: &Matrix<S>, space: &FockSpace, n: u32) {
    let basis = space.basis(n);
    let mono = basis.monomials();
    for r in 0..a.rows() {
        for c in 0..a.cols() {
            let (x, y) = (a.get(r, c), b.get(r, c));
            rep.record(x == y, || format!("entry {} <- {}: {x} vs {y}", mono[r], mono[c]));
        }
    }
}

/// Entrywise λ → 0 of a twisted spherical operator; poles are errors.
pub fn im_spherical(
    space: &FockSpace,
    dir: &DegenerationDirection,
    poly: &[(AlgElement<RationalFunction>, u32)],
    n: u32,
    particles: usize,
) -> Result<Matrix<Rational>, IntegralsError> {
    let route = DunklRoute::new(space, dir.u.clone(), particles)?;
    let m = route.spherical(poly, n)?;
    m.limit_at_zero()
        .map_err(|_| IntegralsError::Pole(format!("spherical operator on F^{n}")))
}

/// Valuation-normalised elimination: the λ⁰ parts of the stored rows span the
/// flat limit of the Q(λ)-span of the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct FlatLimit {
    rows: Vec<(usize, Vec<RationalFunction>, Vec<Rational>)>,
}

const FLAT_STEPS: usize = 256;

impl FlatLimit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Returns false when `w` is zero.
    pub fn insert(&mut self, mut w: Vec<RationalFunction>) -> Result<bool, IntegralsError> {
        for _ in 0..FLAT_STEPS {
            let Some(v) = w.iter().filter_map(|x| x.valuation()).min() else {
                return Ok(false);
            };
            if v != 0 {
                w = w.iter().map(|x| x.times_lambda_pow(-v)).collect();
            }
            let mut lead: Vec<Rational> = w.iter().map(|x| x.limit_at_zero()).collect::<Result<_, _>>()?;
            for (p, row, lrow) in &self.rows {
                if lead[*p].is_zero() {
                    continue;
                }
                let c = lead[*p].clone() / &lrow[*p];
                let cf = RationalFunction::constant(c.clone());
                for (x, r) in w.iter_mut().zip(row) {
                    if !r.is_zero() {
                        *x = x.clone() - cf.clone() * r;
                    }
                }
                for (x, r) in lead.iter_mut().zip(lrow) {
                    if !r.is_zero() {
                        *x = x.clone() - c.clone() * r;
                    }
                }
            }
            if let Some(p) = lead.iter().position(|x| !x.is_zero()) {
                self.rows.push((p, w, lead));
                return Ok(true);
            }
        }
        Err(IntegralsError::FlatLimitStuck(FLAT_STEPS))
    }

    pub fn limit_vectors(&self) -> Vec<Vec<Rational>> {
        self.rows.iter().map(|(_, _, l)| l.clone()).collect()
    }
}

/// A subspace of End(Fⁿ) kept with an explicit basis and its echelon form.
#[derive(Clone, Debug)]
pub struct OperatorAlgebra {
    n: u32,
    size: usize,
    basis: Vec<Matrix<Rational>>,
    echelon: Echelon<Rational>,
}

impl OperatorAlgebra {
    pub fn from_basis(n: u32, size: usize, mats: Vec<Matrix<Rational>>) -> Self {
        let mut echelon = Echelon::new(size * size);
        let mut basis = Vec::new();
        for m in mats {
            if echelon.insert(&flatten(&m)) {
                basis.push(m);
            }
        }
        OperatorAlgebra {
            n,
            size,
            basis,
            echelon,
        }
    }

    /// Unital algebra generated by `gens`, by breadth-first products.
    pub fn generated(n: u32, size: usize, gens: &[Matrix<Rational>]) -> Result<Self, IntegralsError> {
        let (alg, _) = generate_words(size, gens)?;
        Ok(OperatorAlgebra::from_basis(n, size, alg))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Matrix<Rational>] {
        &self.basis
    }

    pub fn contains(&self, m: &Matrix<Rational>) -> bool {
        self.echelon.contains(&flatten(m))
    }

    pub fn same_span(&self, o: &OperatorAlgebra) -> bool {
        self.echelon.same_span(&o.echelon)
    }

    pub fn closure_report(&self) -> CheckReport {
        let mut rep = CheckReport::new("closed under products");
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let ok = a.mul(b).map(|p| self.contains(&p)).unwrap_or(false);
                rep.record(ok, || format!("basis {i} * basis {j}"));
            }
        }
        rep
    }

    /// Super-commutativity, with operators split by parity of the Fock basis.
    pub fn supercommutativity_report(&self, space: &FockSpace) -> CheckReport {
        let mut rep = CheckReport::new("supercommutative");
        let basis = space.basis(self.n);
        let par: Vec<bool> = basis.monomials().iter().map(|m| space.parity(m)).collect();
        let split = |m: &Matrix<Rational>| -> [Matrix<Rational>; 2] {
            let mut even = Matrix::zeros(m.rows(), m.cols());
            let mut odd = Matrix::zeros(m.rows(), m.cols());
            for r in 0..m.rows() {
                for c in 0..m.cols() {
                    let x = m.get(r, c);
                    if !x.is_zero() {
                        if par[r] == par[c] {
                            even.set(r, c, x.clone());
                        } else {
                            odd.set(r, c, x.clone());
                        }
                    }
                }
            }
            [even, odd]
        };
        let parts: Vec<[Matrix<Rational>; 2]> = self.basis.iter().map(split).collect();
        for (i, a) in parts.iter().enumerate() {
            for b in parts.iter().skip(i) {
                for (pa, ma) in a.iter().enumerate() {
                    for (pb, mb) in b.iter().enumerate() {
                        let ab = ma.mul(mb).expect("square");
                        let ba = mb.mul(ma).expect("square");
                        let c = if pa == 1 && pb == 1 { ab.add(&ba) } else { ab.sub(&ba) }.expect("square");
                        rep.record(c.is_zero(), || format!("basis {i} parts {pa}{pb}"));
                    }
                }
            }
        }
        rep
    }

    /// Whether {M v} spans Fⁿ.
    pub fn is_cyclic_on(&self, v: &[Rational]) -> bool {
        let mut e = Echelon::new(self.size);
        for m in &self.basis {
            e.insert(&m.apply(v));
        }
        e.rank() == self.size
    }
}

/// Last generator applied and the parent word; `None` is the identity.
type Word = Option<(usize, usize)>;
type Words = Vec<(Word, Matrix<Rational>)>;

/// Breadth-first closure of the identity under left multiplication by the
/// generators. Returns independent elements and their (generator, parent) words.
fn generate_words(
    size: usize,
    gens: &[Matrix<Rational>],
) -> Result<(Vec<Matrix<Rational>>, Vec<Word>), IntegralsError> {
    let mut echelon = Echelon::new(size * size);
    let mut found: Words = Vec::new();
    let id = Matrix::identity(size);
    echelon.insert(&flatten(&id));
    found.push((None, id));
    let mut frontier = vec![0usize];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &p in &frontier {
            for (g, gm) in gens.iter().enumerate() {
                let prod = gm.mul(&found[p].1)?;
                if echelon.insert(&flatten(&prod)) {
                    found.push((Some((g, p)), prod));
                    next.push(found.len() - 1);
                }
            }
        }
        frontier = next;
    }
    let words = found.iter().map(|(w, _)| *w).collect();
    Ok((found.into_iter().map(|(_, m)| m).collect(), words))
}

/// Twisted generators along a degeneration direction: P(b_c y) and the
/// corrected squares P(b_c y²) − Σ_l (b_c)_l ρ̃_l², for every basis class.
pub fn dunkl_generators<S: Scalar>(
    space: &FockSpace,
    u: &AlgElement<S>,
    n: u32,
    particles: usize,
) -> Result<Vec<Matrix<S>>, IntegralsError> {
    let route = DunklRoute::new(space, u.clone(), particles)?;
    let alg = space.alg();
    let mut out = Vec::new();
    for c in 0..alg.dim() {
        out.push(route.generator(c, 1, n)?);
    }
    for c in 0..alg.dim() {
        out.push(route.corrected_square(&alg.basis_element(c), n)?);
    }
    Ok(out)
}

/// Flat limit at λ = 0 of the algebra generated by the twisted Dunkl
/// generators. Words are chosen at a sample point, then multiplied out over Q(λ).
pub fn flat_limit_algebra(
    space: &FockSpace,
    gens: &[Matrix<RationalFunction>],
    n: u32,
) -> Result<OperatorAlgebra, IntegralsError> {
    let size = space.dimension(n);
    let at = sample_point();
    let sampled: Vec<Matrix<Rational>> = gens
        .iter()
        .map(|g| {
            g.eval(&at)
                .map_err(|_| IntegralsError::Pole(format!("generator at lambda = {at}")))
        })
        .collect::<Result<_, _>>()?;
    let (_, words) = generate_words(size, &sampled)?;
    let mut products: Vec<Matrix<RationalFunction>> = Vec::with_capacity(words.len());
    for w in &words {
        let m = match w {
            None => Matrix::identity(size),
            Some((g, p)) => gens[*g].mul(&products[*p])?,
        };
        products.push(m);
    }
    let mut flat = FlatLimit::new();
    for m in &products {
        flat.insert(flatten(m))?;
    }
    if flat.rank() != products.len() {
        return Err(IntegralsError::Dimension {
            got: flat.rank(),
            expected: products.len(),
        });
    }
    let mats = flat.limit_vectors().iter().map(|v| unflatten(size, v)).collect();
    Ok(OperatorAlgebra::from_basis(n, size, mats))
}

/// The Dunkl-route algebra 𝔗ℳ_K on Fⁿ.
pub fn dunkl_route_algebra(
    space: &FockSpace,
    dir: &DegenerationDirection,
    n: u32,
    particles: usize,
) -> Result<OperatorAlgebra, IntegralsError> {
    let gens = dunkl_generators(space, &dir.u, n, particles)?;
    flat_limit_algebra(space, &gens, n)
}

/// λ → 0 behaviour on Fⁿ along the default direction: every P(b_c y) has an
/// entrywise limit, the Calogero–Sutherland operator tends to 𝔏(K), and when a second
/// direction exists both give the same flat-limit algebra.
pub fn limit_reports(space: &FockSpace, n: u32, particles: usize) -> Result<Vec<CheckReport>, IntegralsError> {
    let alg = space.alg();
    let name = alg.name();
    let dir = alg.default_degeneration()?;
    let route = DunklRoute::new(space, dir.u.clone(), particles)?;
    let mut poles = CheckReport::new(format!("P(h y) has no pole ({name} n={n})"));
    for c in 0..alg.dim() {
        let ok = route.generator(c, 1, n)?.limit_at_zero().is_ok();
        poles.record(ok, || format!("P(b{c} y) on F^{n}"));
    }
    let mut cts = CheckReport::new(format!("CS operator limit is L(K) ({name} n={n})"));
    match route.cts_operator(n)?.limit_at_zero() {
        Ok(m) => {
            let lehn = lehn_op(space, alg.canonical_class(), n);
            compare_matrices(&mut cts, lehn.block(n).expect("block n"), &m, space, n);
        }
        Err(_) => cts.fail(format!("pole on F^{n}")),
    }
    let mut out = vec![poles, cts];
    if let Ok(second) = alg.second_degeneration() {
        let a = dunkl_route_algebra(space, &dir, n, particles)?;
        let b = dunkl_route_algebra(space, &second, n, particles)?;
        let mut same = CheckReport::new(format!("two directions agree ({name} n={n})"));
        same.record(a.same_span(&b), || {
            format!("flat limits differ on F^{n}: dims {} and {}", a.dim(), b.dim())
        });
        out.push(same);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Chern route

/// Shared data for the recursion: 𝔏 = 𝔏(H, K), B = [𝔏, P(x)].
pub struct ChernBuilder<'a> {
    space: &'a FockSpace,
    nmax: u32,
    lehn: GradedOperator<Rational>,
    b: GradedOperator<Rational>,
}

impl<'a> ChernBuilder<'a> {
    pub fn new(space: &'a FockSpace, k: &AlgElement<Rational>, nmax: u32) -> Result<Self, IntegralsError> {
        let lehn = lehn_op(space, k, nmax);
        let px = mul_op(space, &space.alg().unit_element(), 1, nmax)?;
        let b = lehn.bracket(&px)?;
        Ok(ChernBuilder { space, nmax, lehn, b })
    }

    pub fn lehn(&self) -> &GradedOperator<Rational> {
        &self.lehn
    }

    pub fn nmax(&self) -> u32 {
        self.nmax
    }

    /// (Ad 𝔏)ⁱ X.
    pub fn ad_pow(&self, x: &GradedOperator<Rational>, i: u32) -> Result<GradedOperator<Rational>, IntegralsError> {
        let mut y = x.clone();
        for _ in 0..i {
            y = self.lehn.bracket(&y)?;
        }
        Ok(y)
    }

    /// ĉh_i(h) on F⁰ … F^nmax.
    pub fn build(&self, i: u32, h: &AlgElement<Rational>) -> Result<GradedOperator<Rational>, IntegralsError> {
        let space = self.space;
        let alg = space.alg();
        let nmax = self.nmax;
        let odd = if h.is_zero() {
            false
        } else {
            alg.parity_of(h).ok_or(HeisenbergError::MixedParity)?
        };
        let db = self.ad_pow(&mul_op(space, h, 1, nmax)?, i + 1)?;
        // brackets[c][m-1] = [D, P(b_c x^m)]
        let brackets: Vec<Vec<GradedOperator<Rational>>> = (0..alg.dim())
            .into_par_iter()
            .map(|c| {
                let bc: AlgElement<Rational> = alg.basis_element(c);
                let mut list = Vec::new();
                if nmax == 0 {
                    return Ok(list);
                }
                list.push(self.ad_pow(&mul_op(space, &alg.mul_elems(h, &bc), 1, nmax)?, i)?);
                for m in 1..nmax {
                    let pm = mul_op(space, &bc, m, nmax)?;
                    let t = db.bracket(&pm)?.add(&self.b.bracket(&list[m as usize - 1])?)?;
                    list.push(t.scale(&rat(1, 2 * m as i64)));
                }
                Ok(list)
            })
            .collect::<Result<_, IntegralsError>>()?;
        let parity_of_color = |c: usize| alg.is_odd(c);
        let mut memo: HashMap<FockMonomial, FockVector<Rational>> = HashMap::new();
        memo.insert(FockMonomial::vacuum(), FockVector::zero());
        let mut blocks = Vec::new();
        blocks.push(Matrix::zeros(1, 1));
        for n in 1..=nmax {
            let basis = space.basis(n);
            let results: Vec<(FockMonomial, FockVector<Rational>)> = basis
                .monomials()
                .par_iter()
                .map(|mono| {
                    let ((m, c), rest) = mono.split_first().expect("nonempty");
                    let first = self.peel(&brackets, odd, parity_of_color(c), m, c, &rest, &memo);
                    let ((ml, cl), rest_l, neg) = mono.split_last(alg).expect("nonempty");
                    let mut second = self.peel(&brackets, odd, parity_of_color(cl), ml, cl, &rest_l, &memo);
                    if neg {
                        second = second.neg();
                    }
                    if first != second {
                        return Err(IntegralsError::Inconsistent(format!("ch_{i} on {mono}")));
                    }
                    Ok((mono.clone(), first))
                })
                .collect::<Result<_, _>>()?;
            let cols = results.iter().map(|(_, v)| space.coords(v, n)).collect();
            blocks.push(Matrix::from_columns(basis.len(), cols));
            memo.extend(results);
        }
        Ok(GradedOperator::from_blocks(0, odd, nmax, blocks))
    }

    /// C_m(b_c)(rest) + (−1)^{|h||c|} P(b_c xᵐ) D(rest).
    #[allow(clippy::too_many_arguments)]
    fn peel(
        &self,
        brackets: &[Vec<GradedOperator<Rational>>],
        odd: bool,
        odd_c: bool,
        m: u32,
        c: usize,
        rest: &FockMonomial,
        memo: &HashMap<FockMonomial, FockVector<Rational>>,
    ) -> FockVector<Rational> {
        let space = self.space;
        let rv = FockVector::monomial(rest.clone(), Rational::from_integer(1.into()));
        let mut out = brackets[c][m as usize - 1].apply(space, &rv, rest.energy());
        let part = FockVector::monomial(FockMonomial::new(space.alg(), vec![(m, c)]).expect("part"), rat(1, 1));
        let tail = space.mul_vec(&part, &memo[rest]);
        if odd && odd_c {
            out.add_scaled(&tail, &rat(-1, 1));
        } else {
            out.add_assign(&tail);
        }
        out
    }
}

/// ((i, c), ĉh_i(b_c)).
pub type ChernEntry = ((u32, usize), GradedOperator<Rational>);

/// ĉh_i(b_c) for 0 ≤ i ≤ imax and every basis class, on F⁰ … F^nmax.
pub fn chern_family(builder: &ChernBuilder<'_>, imax: u32) -> Result<Vec<ChernEntry>, IntegralsError> {
    let alg = builder.space.alg();
    let mut out = Vec::new();
    for i in 0..=imax {
        for c in 0..alg.dim() {
            out.push(((i, c), builder.build(i, &alg.basis_element(c))?));
        }
    }
    Ok(out)
}

/// The unital algebra on Fⁿ generated by ĉh_i(b_c), i ≤ n.
pub fn chern_route_algebra(
    space: &FockSpace,
    k: &AlgElement<Rational>,
    n: u32,
) -> Result<OperatorAlgebra, IntegralsError> {
    let builder = ChernBuilder::new(space, k, n)?;
    let fam = chern_family(&builder, n)?;
    let gens: Vec<Matrix<Rational>> = fam.iter().map(|(_, op)| op.block(n).expect("block").clone()).collect();
    OperatorAlgebra::generated(n, space.dimension(n), &gens)
}

/// Characterising properties of the ĉh family for i ≤ imax on F⁰ … F^nmax.
pub fn chern_property_reports(
    space: &FockSpace,
    k: &AlgElement<Rational>,
    nmax: u32,
    imax: u32,
) -> Result<Vec<CheckReport>, IntegralsError> {
    let builder = ChernBuilder::new(space, k, nmax)?;
    let alg = space.alg();
    let fam = chern_family(&builder, imax)?;
    let name = alg.name();
    let muls: Vec<Vec<GradedOperator<Rational>>> = (0..alg.dim())
        .map(|c| {
            (1..=nmax)
                .map(|m| mul_op(space, &alg.basis_element(c), m, nmax))
                .collect::<Result<_, _>>()
        })
        .collect::<Result<_, _>>()?;

    let mut lehn = CheckReport::new(format!("[ch, L] = 0 ({name})"));
    let mut vac = CheckReport::new(format!("ch(1) = 0 ({name})"));
    let mut defining = CheckReport::new(format!("[ch_i(h), P(h'x)] = ad^i P(hh'x) ({name})"));
    for ((i, c), op) in &fam {
        lehn.record(builder.lehn.bracket(op)?.is_zero(), || format!("ch_{i}(b{c})"));
        vac.record(op.block(0).is_none_or(|b| b.is_zero()), || format!("ch_{i}(b{c})"));
        for (c2, mc2) in muls.iter().enumerate() {
            let hh = alg.mul_elems(&alg.basis_element::<Rational>(*c), &alg.basis_element(c2));
            let lhs = op.bracket(&mc2[0])?;
            let rhs = builder.ad_pow(&mul_op(space, &hh, 1, nmax)?, *i)?;
            defining.record(lhs.same_action(&rhs), || format!("ch_{i}(b{c}) with b{c2}"));
        }
    }

    let mut pairwise = CheckReport::new(format!("[ch_i, ch_j] = 0 ({name})"));
    for (a, ((i, c), x)) in fam.iter().enumerate() {
        for ((j, d), y) in fam.iter().skip(a) {
            if i + j <= 4 {
                pairwise.record(x.bracket(y)?.is_zero(), || format!("ch_{i}(b{c}), ch_{j}(b{d})"));
            }
        }
    }

    let mut order = CheckReport::new(format!("differential order bound ({name})"));
    let mut symbol = CheckReport::new(format!("symbol of the (i+1)-fold commutator ({name})"));
    for ((i, c), op) in &fam {
        let h: AlgElement<Rational> = alg.basis_element(*c);
        let chains = part_chains(alg.dim(), nmax, *i as usize + 2);
        for chain in chains {
            let mut x = op.clone();
            let mut prod = h.clone();
            let mut weight = Rational::from_integer(1.into());
            let mut total = 0;
            for (step, &(cc, m)) in chain.iter().enumerate() {
                x = x.bracket(&muls[cc][m as usize - 1])?;
                prod = alg.mul_elems(&prod, &alg.basis_element(cc));
                weight *= Rational::from_integer(m.into());
                total += m;
                if step == *i as usize {
                    // (i+1)-fold: 2^i i! Π m_j P(h h_1 ⋯ x^{Σm})
                    let fact: i64 = (1..=*i as i64).product();
                    let coef = weight.clone() * rat(2i64.pow(*i) * fact, 1);
                    let expect = mul_op(space, &prod.scale(&coef), total, nmax)?;
                    let ok = x.same_action(&expect);
                    symbol.record(ok, || format!("ch_{i}(b{c}) chain {:?}", &chain[..=step]));
                }
            }
            order.record(x.is_zero(), || format!("ch_{i}(b{c}) chain {chain:?}"));
        }
    }
    Ok(vec![lehn, vac, defining, pairwise, order, symbol])
}

/// Sequences of (color, m) of the given length with Σm ≤ nmax.
fn part_chains(dim: usize, nmax: u32, len: usize) -> Vec<Vec<(usize, u32)>> {
    fn rec(dim: usize, left: u32, len: usize, cur: &mut Vec<(usize, u32)>, out: &mut Vec<Vec<(usize, u32)>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        let need = (len - cur.len() - 1) as u32;
        for m in 1..=left.saturating_sub(need) {
            for c in 0..dim {
                cur.push((c, m));
                rec(dim, left - m, len, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(dim, nmax, len, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::FrobeniusAlgebra;
    use crate::heisenberg::lehn_default;

    type Q = Rational;

    fn mono(space: &FockSpace, parts: Vec<(u32, usize)>) -> FockMonomial {
        FockMonomial::new(space.alg(), parts).unwrap()
    }

    #[test]
    fn twist_examples() {
        let space = FockSpace::new(FrobeniusAlgebra::p2());
        let alg = space.alg();
        let u: AlgElement<Q> = AlgElement {
            coeffs: vec![rat(2, 1), rat(1, 1), rat(0, 1)],
        };
        let v = twist_apply(&space, &u, &mono(&space, vec![(1, 1)]));
        let mut expect = FockVector::zero();
        expect.add_term(mono(&space, vec![(1, 1)]), rat(2, 1));
        expect.add_term(mono(&space, vec![(1, 2)]), rat(1, 1));
        assert_eq!(v, expect);
        let inv = alg.invert_even(&u).unwrap();
        let a = twist_matrix(&space, &u, 2);
        let b = twist_matrix(&space, &inv, 2);
        assert_eq!(a.mul(&b).unwrap(), Matrix::identity(space.dimension(2)));
        let one: AlgElement<Q> = alg.unit_element();
        let l = lehn_default(&space, 2);
        assert_eq!(
            &twist(&space, &one, l.block(2).unwrap(), 2).unwrap(),
            l.block(2).unwrap()
        );
    }

    #[test]
    fn twist_over_rational_functions() {
        let space = FockSpace::new(FrobeniusAlgebra::p2());
        let dir = space.alg().default_degeneration().unwrap();
        let inv = space.alg().invert_even(&dir.u).unwrap();
        let a = twist_matrix(&space, &dir.u, 2);
        let b = twist_matrix(&space, &inv, 2);
        assert_eq!(a.mul(&b).unwrap(), Matrix::identity(space.dimension(2)));
    }

    #[test]
    fn energy_operator_from_dunkl() {
        for alg in FrobeniusAlgebra::reference_algebras() {
            let space = FockSpace::new(alg);
            let dir = space.alg().default_degeneration().unwrap();
            for n in 1..=2u32 {
                let one = space.alg().unit_element();
                let m = im_spherical(&space, &dir, &[(one, 1)], n, n as usize + 1).unwrap();
                let d = space.dimension(n);
                assert_eq!(m, Matrix::identity(d).scale(&rat(n as i64, 1)));
            }
        }
    }

    #[test]
    fn point_f2_lehn_from_dunkl() {
        let space = FockSpace::new(FrobeniusAlgebra::point());
        let one: AlgElement<Q> = space.alg().unit_element();
        for particles in [3, 4] {
            let rep = cts_cross_check(&space, &one, 2, particles).unwrap();
            assert!(rep.passed(), "{}", rep.summary());
        }
        let l = lehn_default(&space, 2);
        assert_eq!(
            l.block(2).unwrap(),
            &Matrix::from_rows(vec![vec![rat(0, 1), rat(2, 1)], vec![rat(2, 1), rat(0, 1)]]).unwrap()
        );
    }

    #[test]
    fn cts_fails_at_n_particles() {
        let space = FockSpace::new(FrobeniusAlgebra::point());
        let one: AlgElement<Q> = space.alg().unit_element();
        let rep = cts_cross_check(&space, &one, 2, 2).unwrap();
        assert!(!rep.passed());
    }

    #[test]
    fn cts_torus_and_p2_small() {
        let torus = FockSpace::new(FrobeniusAlgebra::torus());
        let u: AlgElement<Q> = AlgElement {
            coeffs: vec![rat(2, 1), rat(0, 1), rat(0, 1), rat(1, 1)],
        };
        let rep = cts_cross_check(&torus, &u, 2, 3).unwrap();
        assert!(rep.passed(), "{}", rep.summary());
        let p2 = FockSpace::new(FrobeniusAlgebra::p2());
        let dir = p2.alg().default_degeneration().unwrap();
        let u = dir.u.eval(&rat(5, 2)).unwrap();
        let rep = cts_cross_check(&p2, &u, 2, 3).unwrap();
        assert!(rep.passed(), "{}", rep.summary());
    }

    #[test]
    fn flat_limit_simple() {
        let l = RationalFunction::lambda();
        let one = RationalFunction::constant(rat(1, 1));
        let zero = RationalFunction::constant(rat(0, 1));
        let mut f = FlatLimit::new();
        assert!(f.insert(vec![one.clone(), l.clone()]).unwrap());
        // (1, λ + λ²) − (1, λ) = (0, λ²) → limit (0, 1)
        assert!(f.insert(vec![one.clone(), l.clone() + l.clone() * l.clone()]).unwrap());
        assert_eq!(
            f.limit_vectors(),
            vec![vec![rat(1, 1), rat(0, 1)], vec![rat(0, 1), rat(1, 1)]]
        );
        assert!(!f.insert(vec![zero.clone(), zero]).unwrap());
    }

    #[test]
    fn chern_examples() {
        let space = FockSpace::new(FrobeniusAlgebra::p2());
        let alg = space.alg();
        let b = ChernBuilder::new(&space, alg.canonical_class(), 2).unwrap();
        let one: AlgElement<Q> = alg.unit_element();
        let ch1 = b.build(1, &one).unwrap();
        let v = FockVector::monomial(mono(&space, vec![(1, 0)]), rat(1, 1));
        let mut expect = FockVector::zero();
        expect.add_term(mono(&space, vec![(1, 1)]), rat(-3, 1));
        assert_eq!(ch1.apply(&space, &v, 1), expect);
        let h: AlgElement<Q> = alg.basis_element(1);
        let ch0 = b.build(0, &h).unwrap();
        let v = FockVector::monomial(mono(&space, vec![(1, 1)]), rat(1, 1));
        assert_eq!(
            ch0.apply(&space, &v, 1),
            FockVector::monomial(mono(&space, vec![(1, 2)]), rat(1, 1))
        );
    }

    #[test]
    fn chern_properties_small() {
        for alg in FrobeniusAlgebra::reference_algebras() {
            let space = FockSpace::new(alg);
            let k = space.alg().canonical_class().clone();
            for rep in chern_property_reports(&space, &k, 2, 1).unwrap() {
                assert!(rep.passed(), "{}", rep.summary());
            }
        }
    }

    #[test]
    fn span_examples() {
        let id = Matrix::<Q>::identity(3);
        let a = OperatorAlgebra::generated(1, 3, &[id]).unwrap();
        assert_eq!(a.dim(), 1);
        let space = FockSpace::new(FrobeniusAlgebra::p2());
        let k = space.alg().canonical_class().clone();
        let c = chern_route_algebra(&space, &k, 1).unwrap();
        assert_eq!(c.dim(), 3);
        assert!(c.supercommutativity_report(&space).passed());
    }

    #[test]
    fn generators_are_stable() {
        for alg in [FrobeniusAlgebra::p2(), FrobeniusAlgebra::torus()] {
            let space = FockSpace::new(alg);
            let u = space.alg().default_degeneration().unwrap().u.eval(&rat(3, 2)).unwrap();
            let a = dunkl_generators(&space, &u, 2, 3).unwrap();
            let b = dunkl_generators(&space, &u, 2, 4).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn corrected_square_matches_raw_square_at_large_n() {
        let space = FockSpace::new(FrobeniusAlgebra::p2());
        let u = space.alg().default_degeneration().unwrap().u.eval(&rat(3, 2)).unwrap();
        let small = DunklRoute::new(&space, u.clone(), 3).unwrap();
        let large = DunklRoute::new(&space, u, 5).unwrap();
        for c in 0..3 {
            let h: AlgElement<Q> = space.alg().basis_element(c);
            assert_eq!(
                small.corrected_square(&h, 2).unwrap(),
                large.generator(c, 2, 2).unwrap()
            );
            assert!(large
                .transport(2, |d, st| Ok(d.weighted_rho_square(Some(&h.sparse()), st)))
                .unwrap()
                .is_zero());
        }
    }

    #[test]
    fn two_routes_agree_point_f2() {
        let space = FockSpace::new(FrobeniusAlgebra::point());
        let k = space.alg().canonical_class().clone();
        let c = chern_route_algebra(&space, &k, 2).unwrap();
        let dir = space.alg().default_degeneration().unwrap();
        let d = dunkl_route_algebra(&space, &dir, 2, 3).unwrap();
        assert_eq!(c.dim(), 2);
        assert!(c.same_span(&d));
    }
}
