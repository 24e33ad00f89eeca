//! Graded supercommutative algebras with a coproduct element Δ(1), the
//! Euler class e = mΔ(1) and a canonical class K.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Deserialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::linalg::{self, LinalgError};
use crate::scalar::{parse_rational, Rational, RationalFunction, Scalar, ScalarError};

pub const POINT_JSON: &str = include_str!("../algebras/point.json");
pub const P2_JSON: &str = include_str!("../algebras/p2.json");
pub const TORUS_JSON: &str = include_str!("../algebras/torus.json");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("malformed algebra document: {0}")]
    Json(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error("supercommutativity fails for basis pair ({0}, {1})")]
    Supercommutativity(usize, usize),
    #[error("associativity fails for basis triple ({0}, {1}, {2})")]
    Associativity(usize, usize, usize),
    #[error("unit law fails for basis element {0}")]
    Unit(usize),
    #[error("parity of basis element {0} does not match its degree")]
    Parity(usize),
    #[error("product of basis elements ({0}, {1}) has a component in basis element {2} of the wrong degree")]
    Grading(usize, usize, usize),
    #[error("coproduct pair ({0}, {1}) is odd")]
    OddCoproduct(usize, usize),
    #[error("coproduct pair ({0}, {1}) does not have the socle degree")]
    Socle(usize, usize),
    #[error("bimodule condition (a x 1)D(1) = D(1)(1 x a) fails for basis element {0}")]
    Bimodule(usize),
    #[error("coproduct element is not supersymmetric at pair ({0}, {1})")]
    CoproductSymmetry(usize, usize),
    #[error("counit pairing is degenerate")]
    DegenerateCounit,
    #[error("element is not even")]
    NotEven,
    #[error("element is not invertible")]
    NotInvertible,
    #[error("unsupported degeneration: {0}")]
    UnsupportedDegeneration(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Dense element of H with coefficients in `S`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgElement<S> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> AlgElement<S> {
    pub fn zero(dim: usize) -> Self {
        AlgElement {
            coeffs: vec![S::zero(); dim],
        }
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut e = Self::zero(dim);
        e.coeffs[i] = S::one();
        e
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        AlgElement {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        AlgElement {
            coeffs: self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a.clone() - b).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        AlgElement {
            coeffs: self.coeffs.iter().map(|a| a.clone() * s).collect(),
        }
    }

    /// Nonzero `(index, coefficient)` pairs.
    pub fn sparse(&self) -> Vec<(usize, S)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i, c.clone()))
            .collect()
    }
}

impl AlgElement<Rational> {
    pub fn lift<S: Scalar>(&self) -> AlgElement<S> {
        AlgElement {
            coeffs: self.coeffs.iter().map(S::from_rational).collect(),
        }
    }
}

impl AlgElement<RationalFunction> {
    pub fn limit_at_zero(&self) -> Result<AlgElement<Rational>, ScalarError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.limit_at_zero())
            .collect::<Result<_, _>>()?;
        Ok(AlgElement { coeffs })
    }

    pub fn eval(&self, x: &Rational) -> Result<AlgElement<Rational>, ScalarError> {
        let coeffs = self.coeffs.iter().map(|c| c.eval(x)).collect::<Result<_, _>>()?;
        Ok(AlgElement { coeffs })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraDoc {
    name: String,
    dim: usize,
    labels: Vec<String>,
    degrees: Vec<u32>,
    #[serde(default)]
    parity: Option<Vec<u8>>,
    unit: usize,
    mul: Vec<(usize, usize, usize, String)>,
    #[serde(default)]
    coproduct: Option<Vec<(usize, usize, String)>>,
    #[serde(default)]
    counit: Option<Vec<String>>,
    #[serde(rename = "K")]
    k: Vec<String>,
    #[serde(default)]
    socle_degree: Option<u32>,
}

/// Largest dimension accepted by the loader.
pub const MAX_DIM: usize = 64;

#[derive(Clone, Debug)]
pub struct FrobeniusAlgebra {
    name: String,
    labels: Vec<String>,
    degrees: Vec<u32>,
    parity: Vec<bool>,
    unit: usize,
    /// `mul[i][j]` lists the nonzero `(k, c)` with b_i b_j = Σ c b_k.
    mul: Vec<Vec<Vec<(usize, Rational)>>>,
    coproduct: Vec<(usize, usize, Rational)>,
    k: AlgElement<Rational>,
    euler: AlgElement<Rational>,
    socle_degree: Option<u32>,
    digest: String,
}

fn parse_coeff(s: &str, what: &str) -> Result<Rational, AlgebraError> {
    parse_rational(s).map_err(|_| AlgebraError::Schema(format!("{what}: bad rational {s:?}")))
}

impl FrobeniusAlgebra {
    pub fn point() -> Self {
        Self::from_json(POINT_JSON).expect("shipped point algebra is valid")
    }

    pub fn p2() -> Self {
        Self::from_json(P2_JSON).expect("shipped P2 algebra is valid")
    }

    pub fn torus() -> Self {
        Self::from_json(TORUS_JSON).expect("shipped torus algebra is valid")
    }

    /// The three shipped reference algebras.
    pub fn reference_algebras() -> Vec<Self> {
        vec![Self::point(), Self::p2(), Self::torus()]
    }

    /// Parse and validate an algebra document.
    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        let doc: AlgebraDoc = serde_json::from_str(text).map_err(|e| AlgebraError::Json(e.to_string()))?;
        let n = doc.dim;
        if n == 0 || n > MAX_DIM {
            return Err(AlgebraError::Schema(format!("dim must be in 1..={MAX_DIM}, got {n}")));
        }
        if doc.labels.len() != n || doc.degrees.len() != n || doc.k.len() != n {
            return Err(AlgebraError::Schema(
                "labels, degrees and K must have length dim".into(),
            ));
        }
        if doc.unit >= n {
            return Err(AlgebraError::Schema("unit index out of range".into()));
        }
        if doc.degrees.iter().any(|&d| d > 1024) {
            return Err(AlgebraError::Schema("degree too large".into()));
        }
        let parity: Vec<bool> = doc.degrees.iter().map(|d| d % 2 == 1).collect();
        if let Some(p) = &doc.parity {
            if p.len() != n {
                return Err(AlgebraError::Schema("parity must have length dim".into()));
            }
            for (i, (&pi, &qi)) in p.iter().zip(&parity).enumerate() {
                if pi > 1 || (pi == 1) != qi {
                    return Err(AlgebraError::Parity(i));
                }
            }
        }
        let mut table: Vec<Vec<BTreeMap<usize, Rational>>> = vec![vec![BTreeMap::new(); n]; n];
        for (i, j, k, c) in &doc.mul {
            if *i >= n || *j >= n || *k >= n {
                return Err(AlgebraError::Schema(format!("mul entry [{i},{j},{k}] out of range")));
            }
            let c = parse_coeff(c, "mul")?;
            let e = table[*i][*j].entry(*k).or_insert_with(Rational::zero);
            *e += c;
        }
        let mul: Vec<Vec<Vec<(usize, Rational)>>> = table
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|m| m.into_iter().filter(|(_, c)| !c.is_zero()).collect())
                    .collect()
            })
            .collect();
        let k = AlgElement {
            coeffs: doc.k.iter().map(|s| parse_coeff(s, "K")).collect::<Result<_, _>>()?,
        };
        let mut alg = FrobeniusAlgebra {
            name: doc.name,
            labels: doc.labels,
            degrees: doc.degrees,
            parity,
            unit: doc.unit,
            mul,
            coproduct: Vec::new(),
            k,
            euler: AlgElement::zero(n),
            socle_degree: doc.socle_degree,
            digest: hex_digest(text.as_bytes()),
        };
        alg.check_table()?;
        alg.coproduct = match (&doc.coproduct, &doc.counit) {
            (Some(pairs), None) => {
                let mut acc: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
                for (i, j, c) in pairs {
                    if *i >= n || *j >= n {
                        return Err(AlgebraError::Schema(format!("coproduct pair ({i},{j}) out of range")));
                    }
                    *acc.entry((*i, *j)).or_insert_with(Rational::zero) += parse_coeff(c, "coproduct")?;
                }
                acc.into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|((i, j), c)| (i, j, c))
                    .collect()
            }
            (None, Some(eps)) => {
                if eps.len() != n {
                    return Err(AlgebraError::Schema("counit must have length dim".into()));
                }
                let eps: Vec<Rational> = eps.iter().map(|s| parse_coeff(s, "counit")).collect::<Result<_, _>>()?;
                alg.coproduct_from_counit(&eps)?
            }
            _ => {
                return Err(AlgebraError::Schema(
                    "exactly one of coproduct and counit must be given".into(),
                ))
            }
        };
        alg.check_coproduct()?;
        alg.euler = alg.compute_euler();
        Ok(alg)
    }

    fn check_table(&self) -> Result<(), AlgebraError> {
        let n = self.dim();
        for i in 0..n {
            if self.mul[self.unit][i] != vec![(i, Rational::one())]
                || self.mul[i][self.unit] != vec![(i, Rational::one())]
            {
                return Err(AlgebraError::Unit(i));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for (k, _) in &self.mul[i][j] {
                    if self.degrees[*k] != self.degrees[i] + self.degrees[j] {
                        return Err(AlgebraError::Grading(i, j, *k));
                    }
                }
                let sign = if self.parity[i] && self.parity[j] {
                    -Rational::one()
                } else {
                    Rational::one()
                };
                let flipped: Vec<(usize, Rational)> = self.mul[j][i].iter().map(|(k, c)| (*k, c * &sign)).collect();
                if self.mul[i][j] != flipped {
                    return Err(AlgebraError::Supercommutativity(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let bi: AlgElement<Rational> = self.basis_element(i);
                    let a = self.mul_elems(&self.mul_elems(&bi, &self.basis_element(j)), &self.basis_element(l));
                    let b = self.mul_elems(&bi, &self.mul_elems(&self.basis_element(j), &self.basis_element(l)));
                    if a != b {
                        return Err(AlgebraError::Associativity(i, j, l));
                    }
                }
            }
        }
        Ok(())
    }

    /// Δ(1) = Σ (G⁻¹)_{ij} b_i ⊗ b_j for the Gram matrix G_ij = ε(b_i b_j).
    fn coproduct_from_counit(&self, eps: &[Rational]) -> Result<Vec<(usize, usize, Rational)>, AlgebraError> {
        let n = self.dim();
        let eval = |i: usize, j: usize| -> Rational {
            self.mul[i][j]
                .iter()
                .fold(Rational::zero(), |acc, (k, c)| acc + c * &eps[*k])
        };
        let gram: Vec<Vec<Rational>> = (0..n).map(|j| (0..n).map(|i| eval(i, j)).collect()).collect();
        // Columns of G⁻¹ solve G x = e_j.
        let mut pairs = Vec::new();
        for j in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            let x = linalg::solve_unique(&gram, &e).map_err(|_| AlgebraError::DegenerateCounit)?;
            for (i, c) in x.into_iter().enumerate() {
                if !c.is_zero() {
                    pairs.push((i, j, c));
                }
            }
        }
        pairs.sort_by_key(|a| (a.0, a.1));
        Ok(pairs)
    }

    fn check_coproduct(&self) -> Result<(), AlgebraError> {
        for (i, j, _) in &self.coproduct {
            if self.parity[*i] != self.parity[*j] {
                return Err(AlgebraError::OddCoproduct(*i, *j));
            }
            if let Some(d) = self.socle_degree {
                if self.degrees[*i] + self.degrees[*j] != d {
                    return Err(AlgebraError::Socle(*i, *j));
                }
            }
        }
        // τΔ(1) = Δ(1) with τ(a⊗b) = (−1)^{|a||b|} b⊗a.
        let delta: BTreeMap<(usize, usize), Rational> =
            self.coproduct.iter().map(|(i, j, c)| ((*i, *j), c.clone())).collect();
        for ((i, j), c) in &delta {
            let s = if self.parity[*i] && self.parity[*j] {
                -c.clone()
            } else {
                c.clone()
            };
            if delta.get(&(*j, *i)) != Some(&s) {
                return Err(AlgebraError::CoproductSymmetry(*i, *j));
            }
        }
        // (a⊗1)Δ(1) = Δ(1)(1⊗a), i.e. Σ (a b_i)⊗b_j = Σ b_i⊗(b_j a).
        for a in 0..self.dim() {
            let mut left: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
            let mut right: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
            for (i, j, c) in &self.coproduct {
                for (k, m) in &self.mul[a][*i] {
                    *left.entry((*k, *j)).or_insert_with(Rational::zero) += c * m;
                }
                for (k, m) in &self.mul[*j][a] {
                    *right.entry((*i, *k)).or_insert_with(Rational::zero) += c * m;
                }
            }
            left.retain(|_, c| !c.is_zero());
            right.retain(|_, c| !c.is_zero());
            if left != right {
                return Err(AlgebraError::Bimodule(a));
            }
        }
        Ok(())
    }

    fn compute_euler(&self) -> AlgElement<Rational> {
        let mut e = AlgElement::zero(self.dim());
        for (i, j, c) in &self.coproduct {
            for (k, m) in &self.mul[*i][*j] {
                e.coeffs[*k] += c * m;
            }
        }
        e
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.degrees[i]
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.parity[i]
    }

    pub fn unit_index(&self) -> usize {
        self.unit
    }

    pub fn socle_degree(&self) -> Option<u32> {
        self.socle_degree
    }

    /// SHA-256 of the source document, hex encoded.
    pub fn digest(&self) -> &str {
        &self.digest
    }

    pub fn odd_count(&self) -> usize {
        self.parity.iter().filter(|p| **p).count()
    }

    pub fn even_count(&self) -> usize {
        self.dim() - self.odd_count()
    }

    pub fn mul_basis(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.mul[i][j]
    }

    pub fn coproduct(&self) -> &[(usize, usize, Rational)] {
        &self.coproduct
    }

    pub fn canonical_class(&self) -> &AlgElement<Rational> {
        &self.k
    }

    /// e = Σ coeff · b_i b_j over the coproduct pairs.
    pub fn euler_class(&self) -> &AlgElement<Rational> {
        &self.euler
    }

    /// Graded in the surface sense: socle degree 4 and K of degree 2 (or zero).
    pub fn is_surface_graded(&self) -> bool {
        self.socle_degree == Some(4) && self.k.sparse().iter().all(|(i, _)| self.degrees[*i] == 2)
    }

    pub fn basis_element<S: Scalar>(&self, i: usize) -> AlgElement<S> {
        AlgElement::basis(self.dim(), i)
    }

    pub fn unit_element<S: Scalar>(&self) -> AlgElement<S> {
        self.basis_element(self.unit)
    }

    pub fn mul_elems<S: Scalar>(&self, a: &AlgElement<S>, b: &AlgElement<S>) -> AlgElement<S> {
        let mut out = AlgElement::zero(self.dim());
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x.clone() * y;
                for (k, c) in &self.mul[i][j] {
                    let t = std::mem::replace(&mut out.coeffs[*k], S::zero());
                    out.coeffs[*k] = t + xy.mul_rational(c);
                }
            }
        }
        out
    }

    /// Parity of a homogeneous element; `None` for zero or mixed elements.
    pub fn parity_of<S: Scalar>(&self, a: &AlgElement<S>) -> Option<bool> {
        let mut p = None;
        for (i, c) in a.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match p {
                None => p = Some(self.parity[i]),
                Some(q) if q != self.parity[i] => return None,
                _ => {}
            }
        }
        p
    }

    pub fn is_even<S: Scalar>(&self, a: &AlgElement<S>) -> bool {
        a.coeffs.iter().enumerate().all(|(i, c)| c.is_zero() || !self.parity[i])
    }

    /// Inverse of an even element, by solving u·x = 1 with the multiplication-by-u matrix.
    pub fn invert_even<S: Scalar>(&self, u: &AlgElement<S>) -> Result<AlgElement<S>, AlgebraError> {
        if !self.is_even(u) {
            return Err(AlgebraError::NotEven);
        }
        let cols: Vec<Vec<S>> = (0..self.dim())
            .map(|j| self.mul_elems(u, &self.basis_element(j)).coeffs)
            .collect();
        let one: AlgElement<S> = self.unit_element();
        match linalg::solve_unique(&cols, &one.coeffs) {
            Ok(x) => Ok(AlgElement { coeffs: x }),
            Err(LinalgError::Scalar(e)) => Err(AlgebraError::Scalar(e)),
            Err(_) => Err(AlgebraError::NotInvertible),
        }
    }

    /// K_λ = u − e·u⁻¹.
    pub fn k_of<S: Scalar>(&self, u: &AlgElement<S>) -> Result<AlgElement<S>, AlgebraError> {
        let inv = self.invert_even(u)?;
        Ok(u.sub(&self.mul_elems(&self.euler.lift(), &inv)))
    }

    fn nilpotent_pair(&self) -> bool {
        let e = &self.euler;
        self.mul_elems(e, e).is_zero() && self.mul_elems(e, &self.k).is_zero()
    }

    /// (λ + K, λ + K + e/λ) when e² = 0 = eK; the constant root of u² − Ku − e
    /// for one-dimensional algebras.
    pub fn default_degeneration(&self) -> Result<DegenerationDirection, AlgebraError> {
        self.degeneration_with(1)
    }

    /// Second direction (λ² + K, λ² + K + e/λ²).
    pub fn second_degeneration(&self) -> Result<DegenerationDirection, AlgebraError> {
        self.degeneration_with(2)
    }

    fn degeneration_with(&self, power: i64) -> Result<DegenerationDirection, AlgebraError> {
        let n = self.dim();
        let lam = RationalFunction::lambda_pow(power);
        let k: AlgElement<RationalFunction> = self.k.lift();
        let (k_l, u) = if self.nilpotent_pair() {
            let one: AlgElement<RationalFunction> = self.unit_element();
            let k_l = k.add(&one.scale(&lam));
            let e_over = self
                .euler
                .lift::<RationalFunction>()
                .scale(&RationalFunction::lambda_pow(-power));
            (k_l.clone(), k_l.add(&e_over))
        } else if n == 1 {
            let kk = self.k.coeffs[0].clone();
            let e = self.euler.coeffs[0].clone();
            let disc = &kk * &kk + Rational::from_integer(4.into()) * &e;
            let root = rational_sqrt(&disc)
                .ok_or_else(|| AlgebraError::UnsupportedDegeneration("u^2 - Ku - e has no rational root".into()))?;
            let r = (kk + root) / Rational::from_integer(2.into());
            if r.is_zero() {
                return Err(AlgebraError::UnsupportedDegeneration("root u = 0".into()));
            }
            (
                k,
                AlgElement {
                    coeffs: vec![RationalFunction::constant(r)],
                },
            )
        } else {
            return Err(AlgebraError::UnsupportedDegeneration("e^2 and eK must vanish".into()));
        };
        let dir = DegenerationDirection { k: k_l, u };
        if self.k_of(&dir.u)? != dir.k || dir.k.limit_at_zero()? != self.k {
            return Err(AlgebraError::UnsupportedDegeneration("direction identity fails".into()));
        }
        Ok(dir)
    }
}

/// A curve (K_λ, u_λ) with u_λ − e·u_λ⁻¹ = K_λ and K_0 = K.
#[derive(Clone, Debug, PartialEq)]
pub struct DegenerationDirection {
    pub k: AlgElement<RationalFunction>,
    pub u: AlgElement<RationalFunction>,
}

fn rational_sqrt(q: &Rational) -> Option<Rational> {
    use num_traits::Signed;
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| Rational::new(n, d))
}

pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    let h = Sha256::digest(bytes);
    h.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    fn el(v: &[i64]) -> AlgElement<Rational> {
        AlgElement {
            coeffs: v.iter().map(|&x| rat(x, 1)).collect(),
        }
    }

    #[test]
    fn reference_algebras_load() {
        let p = FrobeniusAlgebra::point();
        assert_eq!(p.euler_class(), &el(&[1]));
        let p2 = FrobeniusAlgebra::p2();
        assert_eq!(p2.euler_class(), &el(&[0, 0, 3]));
        let t = FrobeniusAlgebra::torus();
        assert_eq!(t.euler_class(), &el(&[0, 0, 0, 0]));
        assert_eq!(t.odd_count(), 2);
    }

    #[test]
    fn table_checks() {
        let doc = r#"{"name":"bad","dim":2,"labels":["1","a"],"degrees":[0,2],"unit":0,
            "mul":[[0,0,0,"1"],[0,1,1,"1"],[1,0,1,"1"],[1,1,1,"1"]],
            "coproduct":[[0,0,"1"]],"K":["0","0"]}"#;
        // a·a = a breaks the grading before commutativity is even looked at
        assert!(matches!(
            FrobeniusAlgebra::from_json(doc),
            Err(AlgebraError::Grading(1, 1, 1))
        ));
        let doc = r#"{"name":"bad","dim":3,"labels":["1","a","w"],"degrees":[0,2,4],"unit":0,
            "mul":[[0,0,0,"1"],[0,1,1,"1"],[1,0,1,"1"],[0,2,2,"1"],[2,0,2,"1"],[1,1,2,"1"]],
            "coproduct":[[0,2,"1"],[2,0,"1"],[1,1,"1"]],"K":["0","0","0"]}"#;
        assert!(FrobeniusAlgebra::from_json(doc).is_ok());
        let doc = r#"{"name":"bad","dim":4,"labels":["1","a","b","w"],"degrees":[0,1,3,4],"unit":0,
            "mul":[[0,0,0,"1"],[0,1,1,"1"],[1,0,1,"1"],[0,2,2,"1"],[2,0,2,"1"],[0,3,3,"1"],[3,0,3,"1"],
                   [1,2,3,"1"],[2,1,3,"1"]],
            "coproduct":[[0,3,"1"]],"K":["0","0","0","0"]}"#;
        assert!(matches!(
            FrobeniusAlgebra::from_json(doc),
            Err(AlgebraError::Supercommutativity(1, 2))
        ));
    }

    #[test]
    fn schema_errors_carry_position() {
        let err = FrobeniusAlgebra::from_json("{\"name\": \"x\",\n \"dim\": }").unwrap_err();
        match err {
            AlgebraError::Json(m) => assert!(m.contains("line 2"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn counit_gives_dual_basis_coproduct() {
        let doc = r#"{"name":"P2 by counit","dim":3,"labels":["1","h","h2"],"degrees":[0,2,4],"unit":0,
            "mul":[[0,0,0,"1"],[0,1,1,"1"],[1,0,1,"1"],[0,2,2,"1"],[2,0,2,"1"],[1,1,2,"1"]],
            "counit":["0","0","1"],"K":["0","-3","0"],"socle_degree":4}"#;
        let a = FrobeniusAlgebra::from_json(doc).unwrap();
        let b = FrobeniusAlgebra::p2();
        assert_eq!(a.coproduct(), b.coproduct());
        assert_eq!(a.euler_class(), b.euler_class());
    }

    #[test]
    fn invert_examples() {
        let h = FrobeniusAlgebra::p2();
        let one: AlgElement<Rational> = h.unit_element();
        assert_eq!(h.invert_even(&one).unwrap(), one);
        assert_eq!(h.invert_even(&el(&[0, 1, 0])), Err(AlgebraError::NotInvertible));
        let dir = h.default_degeneration().unwrap();
        let l = |k| RationalFunction::lambda_pow(k);
        let expect_u = AlgElement {
            coeffs: vec![
                l(1),
                RationalFunction::constant(rat(-3, 1)),
                l(-1).mul_rational(&rat(3, 1)),
            ],
        };
        assert_eq!(dir.u, expect_u);
        let inv = h.invert_even(&dir.u).unwrap();
        let expect_inv = AlgElement {
            coeffs: vec![l(-1), l(-2).mul_rational(&rat(3, 1)), l(-3).mul_rational(&rat(6, 1))],
        };
        assert_eq!(inv, expect_inv);
        assert_eq!(h.mul_elems(&dir.u, &inv), h.unit_element());
        let e_inv = h.mul_elems(&h.euler_class().lift(), &inv);
        assert_eq!(
            e_inv,
            AlgElement {
                coeffs: vec![
                    RationalFunction::zero(),
                    RationalFunction::zero(),
                    l(-1).mul_rational(&rat(3, 1))
                ]
            }
        );
    }

    #[test]
    fn point_direction_is_constant() {
        let dir = FrobeniusAlgebra::point().default_degeneration().unwrap();
        assert_eq!(dir.u.coeffs, vec![RationalFunction::one()]);
        assert_eq!(dir.k.coeffs, vec![RationalFunction::zero()]);
    }

    #[test]
    fn unsupported_when_ek_nonzero() {
        // P2 with K = 1: eK = 3h² ≠ 0.
        let doc = P2_JSON.replace("\"K\": [\"0\", \"-3\", \"0\"]", "\"K\": [\"1\", \"0\", \"0\"]");
        let h = FrobeniusAlgebra::from_json(&doc).unwrap();
        assert!(matches!(
            h.default_degeneration(),
            Err(AlgebraError::UnsupportedDegeneration(_))
        ));
    }

    #[test]
    fn second_direction_satisfies_identity() {
        let h = FrobeniusAlgebra::p2();
        let d = h.second_degeneration().unwrap();
        assert_eq!(h.k_of(&d.u).unwrap(), d.k);
    }

    proptest! {
        #[test]
        fn double_inverse(a in -5i64..6, b in -5i64..6, c in -5i64..6) {
            prop_assume!(a != 0);
            let h = FrobeniusAlgebra::p2();
            let u = el(&[a, b, c]);
            let v = h.invert_even(&u).unwrap();
            prop_assert_eq!(h.invert_even(&v).unwrap(), u);
        }

        #[test]
        fn torus_even_inverse(a in 1i64..6, d in -5i64..6) {
            let h = FrobeniusAlgebra::torus();
            let u = el(&[a, 0, 0, d]);
            let v = h.invert_even(&u).unwrap();
            prop_assert_eq!(h.mul_elems(&u, &v), h.unit_element());
        }

        #[test]
        fn loader_never_panics(text in ".{0,200}") {
            let _ = FrobeniusAlgebra::from_json(&text);
        }

        #[test]
        fn loader_survives_corrupted_p2(pos in 0usize..320, byte in 32u8..127) {
            let mut doc = P2_JSON.as_bytes().to_vec();
            let pos = pos % doc.len();
            doc[pos] = byte;
            if let Ok(text) = std::str::from_utf8(&doc) {
                let _ = FrobeniusAlgebra::from_json(text);
            }
        }
    }
}
