//! Cup-product structure constants on Fⁿ, read off from a commutative
//! operator algebra with cyclic vector (1/n!)·P(x)ⁿ·1.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fock::{FockMonomial, FockSpace, FockVector};
use crate::frobenius::FrobeniusAlgebra;
use crate::heisenberg::apply_mul;
use crate::integrals::OperatorAlgebra;
use crate::linalg::{solve_unique, LinalgError, Matrix};
use crate::report::CheckReport;
use crate::scalar::{parse_rational, rat, Rational};

/// Largest basis a table document may declare.
pub const MAX_TABLE_DIM: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("operator algebra is not cyclic on the unit vector")]
    NotCyclic,
    #[error("multiplication operator for basis element {index}: {source}")]
    Extraction { index: usize, source: LinalgError },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid table json: {0}")]
    Json(String),
    #[error("invalid table: {0}")]
    Schema(String),
}

/// (1/n!)·P(1·x)ⁿ applied to the vacuum.
pub fn unit_vector(space: &FockSpace, n: u32) -> FockVector<Rational> {
    let one = space.alg().unit_element();
    let mut v = FockVector::vacuum();
    let mut fact = Rational::one();
    for k in 1..=n {
        v = apply_mul(space, &one, 1, &v);
        fact *= rat(k as i64, 1);
    }
    v.scale(&(Rational::one() / fact))
}

/// Exact cup-product table on one energy.
#[derive(Clone, Debug, PartialEq)]
pub struct RingTable {
    pub n: u32,
    pub basis: Vec<FockMonomial>,
    pub degrees: Vec<u32>,
    pub parities: Vec<bool>,
    pub unit: Vec<Rational>,
    /// constants[i][j][k]: coefficient of basis k in v_i · v_j.
    pub constants: Vec<Vec<Vec<Rational>>>,
}

/// The unique element of `alg` sending `unit` to `a`.
pub fn mult_matrix(alg: &OperatorAlgebra, unit: &[Rational], a: &[Rational]) -> Result<Matrix<Rational>, LinalgError> {
    let cols: Vec<Vec<Rational>> = alg.basis().iter().map(|m| m.apply(unit)).collect();
    let x = solve_unique(&cols, a)?;
    let mut out = Matrix::zeros(alg.size(), alg.size());
    for (c, m) in x.iter().zip(alg.basis()) {
        if !c.is_zero() {
            out = out.add(&m.scale(c))?;
        }
    }
    Ok(out)
}

/// Multiplication operators M_{v_i} for every basis vector, indexed like the Fock basis.
pub fn multiplication_operators(space: &FockSpace, alg: &OperatorAlgebra) -> Result<Vec<Matrix<Rational>>, RingError> {
    let n = alg.n();
    let unit = space.coords(&unit_vector(space, n), n);
    if !alg.is_cyclic_on(&unit) {
        return Err(RingError::NotCyclic);
    }
    let d = space.dimension(n);
    (0..d)
        .map(|i| {
            let mut e = vec![Rational::zero(); d];
            e[i] = Rational::one();
            mult_matrix(alg, &unit, &e).map_err(|source| RingError::Extraction { index: i, source })
        })
        .collect()
}

pub fn structure_constants(space: &FockSpace, alg: &OperatorAlgebra) -> Result<RingTable, RingError> {
    let n = alg.n();
    let basis = space.basis(n);
    let ops = multiplication_operators(space, alg)?;
    let d = basis.len();
    let constants = ops.iter().map(|m| (0..d).map(|j| m.column(j)).collect()).collect();
    Ok(RingTable {
        n,
        basis: basis.monomials().to_vec(),
        degrees: basis.monomials().iter().map(|m| space.degree(m)).collect(),
        parities: basis.monomials().iter().map(|m| space.parity(m)).collect(),
        unit: space.coords(&unit_vector(space, n), n),
        constants,
    })
}

impl RingTable {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn product(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let d = self.dim();
        let mut out = vec![Rational::zero(); d];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let xy = x * y;
                for (k, c) in self.constants[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &xy * c;
                    }
                }
            }
        }
        out
    }

    fn basis_vec(&self, i: usize) -> Vec<Rational> {
        let mut e = vec![Rational::zero(); self.dim()];
        e[i] = Rational::one();
        e
    }

    pub fn supercommutativity_report(&self) -> CheckReport {
        let mut rep = CheckReport::new("table supercommutative");
        for i in 0..self.dim() {
            for j in i..self.dim() {
                let sign = if self.parities[i] && self.parities[j] {
                    -Rational::one()
                } else {
                    Rational::one()
                };
                let ok = (0..self.dim()).all(|k| self.constants[i][j][k] == &sign * &self.constants[j][i][k]);
                rep.record(ok, || format!("{} * {}", self.basis[i], self.basis[j]));
            }
        }
        rep
    }

    pub fn associativity_report(&self) -> CheckReport {
        let mut rep = CheckReport::new("table associative");
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                let ij = self.constants[i][j].clone();
                for k in 0..d {
                    let left = self.product(&ij, &self.basis_vec(k));
                    let jk = &self.constants[j][k];
                    let right = self.product(&self.basis_vec(i), jk);
                    rep.record(left == right, || {
                        format!("({} {} {})", self.basis[i], self.basis[j], self.basis[k])
                    });
                }
            }
        }
        rep
    }

    pub fn unit_report(&self) -> CheckReport {
        let mut rep = CheckReport::new("table unital");
        for i in 0..self.dim() {
            let e = self.basis_vec(i);
            rep.record(self.product(&self.unit, &e) == e, || format!("1 * {}", self.basis[i]));
            rep.record(self.product(&e, &self.unit) == e, || format!("{} * 1", self.basis[i]));
        }
        rep
    }

    /// c[i][j][k] ≠ 0 ⟹ deg k = deg i + deg j, and the degree-0 piece is spanned by the unit.
    pub fn degree_report(&self) -> CheckReport {
        let mut rep = CheckReport::new("table degree-homogeneous");
        let d = self.dim();
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let c = &self.constants[i][j][k];
                    let ok = c.is_zero() || self.degrees[k] == self.degrees[i] + self.degrees[j];
                    rep.record(ok, || {
                        format!("{} * {} -> {}", self.basis[i], self.basis[j], self.basis[k])
                    });
                }
            }
        }
        let zero_deg = self.degrees.iter().filter(|&&g| g == 0).count();
        rep.record(zero_deg == 1, || format!("degree-0 piece has dimension {zero_deg}"));
        rep
    }

    /// For n = 1: P(b_i x)·P(b_j x) ↦ P(b_i b_j x), i.e. the input algebra's table.
    pub fn matches_algebra(&self, alg: &FrobeniusAlgebra) -> CheckReport {
        let mut rep = CheckReport::new("F^1 table equals the input algebra");
        if self.n != 1 || self.dim() != alg.dim() {
            rep.fail(format!("table has n = {} and dimension {}", self.n, self.dim()));
            return rep;
        }
        for i in 0..alg.dim() {
            for j in 0..alg.dim() {
                let mut want = vec![Rational::zero(); alg.dim()];
                for (k, c) in alg.mul_basis(i, j) {
                    want[*k] += c;
                }
                rep.record(self.constants[i][j] == want, || format!("b{i} * b{j}"));
            }
        }
        rep
    }

    pub fn invariant_reports(&self, graded: bool) -> Vec<CheckReport> {
        let mut out = vec![
            self.supercommutativity_report(),
            self.associativity_report(),
            self.unit_report(),
        ];
        if graded {
            out.push(self.degree_report());
        }
        out
    }
}

/// Lehn's operator is the multiplication by its own image of the unit.
pub fn lehn_multiplication_report(space: &FockSpace, alg: &OperatorAlgebra, lehn: &Matrix<Rational>) -> CheckReport {
    let mut rep = CheckReport::new("L = M_{L(1)}");
    let n = alg.n();
    let unit = space.coords(&unit_vector(space, n), n);
    match mult_matrix(alg, &unit, &lehn.apply(&unit)) {
        Ok(m) => rep.record(&m == lehn, || format!("mismatch on F^{n}")),
        Err(e) => rep.fail(format!("L(1) has no multiplication operator: {e}")),
    }
    rep
}

// ---------------------------------------------------------------------------
// JSON document

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableMetadata {
    pub algebra: String,
    pub algebra_digest: String,
    #[serde(rename = "K")]
    pub k: Vec<String>,
    pub route: String,
    pub routes_agree: Option<bool>,
    /// False when the algebra does not look like the cohomology of a projective
    /// surface; the table is then a statement about Fock operators only.
    pub surface_graded: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableDocument {
    pub metadata: TableMetadata,
    pub n: u32,
    pub basis: Vec<Vec<(u32, usize)>>,
    pub degrees: Vec<u32>,
    pub parities: Vec<bool>,
    pub unit: Vec<String>,
    pub constants: Vec<Vec<Vec<String>>>,
}

impl RingTable {
    pub fn to_document(&self, metadata: TableMetadata) -> TableDocument {
        let s = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        TableDocument {
            metadata,
            n: self.n,
            basis: self.basis.iter().map(|m| m.parts().to_vec()).collect(),
            degrees: self.degrees.clone(),
            parities: self.parities.clone(),
            unit: s(&self.unit),
            constants: self
                .constants
                .iter()
                .map(|row| row.iter().map(|c| s(c)).collect())
                .collect(),
        }
    }
}

/// Parses and validates a table document; returns the table and its metadata.
pub fn parse_table(text: &[u8]) -> Result<(RingTable, TableMetadata), RingError> {
    let doc: TableDocument = serde_json::from_slice(text).map_err(|e| RingError::Json(e.to_string()))?;
    table_from_document(doc)
}

pub fn table_from_document(doc: TableDocument) -> Result<(RingTable, TableMetadata), RingError> {
    let d = doc.basis.len();
    if d == 0 || d > MAX_TABLE_DIM {
        return Err(RingError::Schema(format!("basis size {d} outside 1..={MAX_TABLE_DIM}")));
    }
    if doc.degrees.len() != d || doc.parities.len() != d || doc.unit.len() != d {
        return Err(RingError::Schema(
            "degrees, parities and unit must match the basis size".into(),
        ));
    }
    if doc.constants.len() != d
        || doc
            .constants
            .iter()
            .any(|r| r.len() != d || r.iter().any(|c| c.len() != d))
    {
        return Err(RingError::Schema("constants must be a d x d x d array".into()));
    }
    let mut basis = Vec::with_capacity(d);
    for parts in &doc.basis {
        let energy: u64 = parts.iter().map(|p| u64::from(p.0)).sum();
        if energy != u64::from(doc.n) {
            return Err(RingError::Schema(format!(
                "basis monomial {parts:?} does not have energy {}",
                doc.n
            )));
        }
        if parts.iter().any(|p| p.0 == 0)
            || parts
                .windows(2)
                .any(|w| (w[1].0, std::cmp::Reverse(w[1].1)) > (w[0].0, std::cmp::Reverse(w[0].1)))
        {
            return Err(RingError::Schema(format!(
                "basis monomial {parts:?} is not in canonical order"
            )));
        }
        basis.push(FockMonomial::from_parts_unchecked(parts.clone()));
    }
    let mut seen = std::collections::HashSet::new();
    if !basis.iter().all(|m| seen.insert(m.clone())) {
        return Err(RingError::Schema("repeated basis monomial".into()));
    }
    let parse = |s: &String| parse_rational(s).map_err(|e| RingError::Schema(e.to_string()));
    let unit = doc.unit.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
    let constants = doc
        .constants
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| c.iter().map(parse).collect::<Result<Vec<_>, _>>())
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let table = RingTable {
        n: doc.n,
        basis,
        degrees: doc.degrees,
        parities: doc.parities,
        unit,
        constants,
    };
    Ok((table, doc.metadata))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::lehn_default;
    use crate::integrals::chern_route_algebra;
    use proptest::prelude::*;

    fn table(alg: FrobeniusAlgebra, n: u32) -> (FockSpace, OperatorAlgebra, RingTable) {
        let space = FockSpace::new(alg);
        let k = space.alg().canonical_class().clone();
        let a = chern_route_algebra(&space, &k, n).unwrap();
        let t = structure_constants(&space, &a).unwrap();
        (space, a, t)
    }

    fn meta() -> TableMetadata {
        TableMetadata {
            algebra: "x".into(),
            algebra_digest: "00".into(),
            k: vec!["0".into()],
            route: "chern".into(),
            routes_agree: None,
            surface_graded: false,
        }
    }

    #[test]
    fn unit_vector_examples() {
        let space = FockSpace::new(FrobeniusAlgebra::point());
        assert_eq!(unit_vector(&space, 0), FockVector::vacuum());
        let u2 = unit_vector(&space, 2);
        let m = FockMonomial::new(space.alg(), vec![(1, 0), (1, 0)]).unwrap();
        assert_eq!(u2, FockVector::monomial(m, rat(1, 2)));
    }

    #[test]
    fn f1_recovers_algebra() {
        for alg in FrobeniusAlgebra::reference_algebras() {
            let (space, _, t) = table(alg, 1);
            assert!(t.matches_algebra(space.alg()).passed());
        }
    }

    #[test]
    fn point_f2_table() {
        let (space, a, t) = table(FrobeniusAlgebra::point(), 2);
        assert_eq!(t.dim(), 2);
        for r in t.invariant_reports(false) {
            assert!(r.passed(), "{}", r.summary());
        }
        let l = lehn_default(&space, 2);
        assert!(lehn_multiplication_report(&space, &a, l.block(2).unwrap()).passed());
    }

    #[test]
    fn p2_f2_graded() {
        let (space, a, t) = table(FrobeniusAlgebra::p2(), 2);
        for r in t.invariant_reports(true) {
            assert!(r.passed(), "{}", r.summary());
        }
        let l = lehn_default(&space, 2);
        assert!(lehn_multiplication_report(&space, &a, l.block(2).unwrap()).passed());
    }

    #[test]
    fn json_round_trip() {
        let (_, _, t) = table(FrobeniusAlgebra::torus(), 2);
        let text = serde_json::to_vec(&t.to_document(meta())).unwrap();
        let (back, m) = parse_table(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(m, meta());
    }

    #[test]
    fn json_rejects_bad_shapes() {
        let (_, _, t) = table(FrobeniusAlgebra::point(), 2);
        let mut doc = t.to_document(meta());
        doc.constants[0].pop();
        assert!(matches!(table_from_document(doc), Err(RingError::Schema(_))));
        let mut doc = t.to_document(meta());
        doc.basis[0] = vec![(1, 0), (3, 0)];
        assert!(matches!(table_from_document(doc), Err(RingError::Schema(_))));
        let mut doc = t.to_document(meta());
        doc.unit[0] = "1/0".into();
        assert!(matches!(table_from_document(doc), Err(RingError::Schema(_))));
        assert!(matches!(parse_table(b"{"), Err(RingError::Json(_))));
    }

    #[test]
    fn broken_table_is_caught() {
        let (_, _, mut t) = table(FrobeniusAlgebra::p2(), 1);
        t.constants[1][1][2] = rat(2, 1);
        assert!(!t.associativity_report().passed() || !t.matches_algebra(&FrobeniusAlgebra::p2()).passed());
        assert!(!t.matches_algebra(&FrobeniusAlgebra::p2()).passed());
    }

    proptest! {
        #[test]
        fn multiplication_commutes(i in 0usize..9, j in 0usize..9) {
            let (space, a, _) = table(FrobeniusAlgebra::p2(), 2);
            let ops = multiplication_operators(&space, &a).unwrap();
            prop_assert_eq!(ops[i].mul(&ops[j]).unwrap(), ops[j].mul(&ops[i]).unwrap());
        }

        #[test]
        fn parser_never_panics(s in ".{0,200}") {
            let _ = parse_table(s.as_bytes());
        }
    }
}
