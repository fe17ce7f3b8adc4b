//! Quotient rings over Novikov-truncated (or Q-numeric) scalars: standard
//! monomial bases, multiplication operators, structure constants, and the
//! Nakayama-style rank gate.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::complex::Complex64;
use num::{One, Zero};
use serde::Serialize;

use crate::eigen;
use crate::error::{Error, Result};
use crate::groebner::{groebner_in, Limits, ReducedBasis};
use crate::order::MonomialOrder;
use crate::poly::{MultiPoly, Rat, Truncation};
use crate::present::{classical_whitney, Presentation, PresentationKind};
use crate::vars::{Mono, VarTable, VarTag};

/// Scalar ring of a quotient: formal Novikov variables truncated at a cap,
/// or Novikov variables specialized to exact rationals.
#[derive(Clone, Debug, PartialEq)]
pub enum ScalarMode {
    Formal { cap: u32 },
    Numeric { q: Vec<Rat> },
}

pub struct QuotientRing {
    pub shape: crate::flag::FlagShape,
    pub kind: PresentationKind,
    pub mode: ScalarMode,
    pub lambda: Vec<Rat>,
    table: Arc<VarTable>,
    basis: ReducedBasis,
    /// In formal mode this is the staircase of the relations mod Q, which
    /// lifts to a basis over the truncated Novikov scalars whenever the
    /// quotient is free; in numeric mode it is the plain staircase.
    std_monos: Vec<Mono>,
    full_dimension: usize,
    free_over_novikov: bool,
    relations_used: Vec<MultiPoly>,
}

impl QuotientRing {
    /// Materialize a presentation over the chosen scalars. Auxiliary ∧R
    /// generators are eliminated first; equivariant parameters are always
    /// specialized here (identity checks that need symbolic Λ run at the
    /// presentation level). The rank is computed but not enforced; use
    /// `build_ring` for the fail-loudly variant.
    pub fn build(
        pres: &Presentation,
        mode: &ScalarMode,
        lambda: &[Rat],
        limits: &Limits,
    ) -> Result<QuotientRing> {
        let shape = pres.shape.clone();
        let has_aux = pres
            .generators
            .iter()
            .any(|g| matches!(g, VarTag::WedgeR { .. }));
        let eliminated;
        let pres = if has_aux {
            eliminated = pres.eliminate_aux()?;
            &eliminated
        } else {
            pres
        };
        let pres = pres.specialize_lambda(lambda)?;
        let table = pres.table.clone();
        let (relations, trunc) = match mode {
            ScalarMode::Formal { cap } => (pres.relation_polys(), Truncation::at(*cap)),
            ScalarMode::Numeric { q } => {
                if q.len() != shape.levels() {
                    return Err(Error::Domain(format!(
                        "need {} Novikov values, got {}",
                        shape.levels(),
                        q.len()
                    )));
                }
                let mut assign = BTreeMap::new();
                for (i, val) in q.iter().enumerate() {
                    assign
                        .insert(table.var(VarTag::NovikovX { level: (i + 1) as u8 }), val.clone());
                }
                let rels = pres
                    .relations
                    .iter()
                    .map(|r| r.poly.specialize_vars(&assign))
                    .collect::<Result<Vec<_>>>()?;
                (rels, Truncation::none())
            }
        };
        let order = MonomialOrder::block(&table);
        let basis = groebner_in(&relations, &table, &order, &trunc, limits)?;
        let (std_monos, full_dimension, free_over_novikov) = match mode {
            ScalarMode::Numeric { .. } => {
                let std = basis.standard_monomials()?;
                let dim = std.len();
                (std, dim, true)
            }
            ScalarMode::Formal { cap } => {
                // basis over the Novikov scalars: the staircase of the
                // relations mod Q; freeness is the count identity
                // dim_Q(quotient) = rank * dim(truncated scalar ring)
                let mut qzero = BTreeMap::new();
                for v in 0..table.len() {
                    if table.tag(v).is_novikov() {
                        qzero.insert(v, Rat::zero());
                    }
                }
                let mod_q: Vec<MultiPoly> = relations
                    .iter()
                    .map(|r| r.specialize_vars(&qzero))
                    .collect::<Result<Vec<_>>>()?;
                let modq_basis =
                    groebner_in(&mod_q, &table, &order, &Truncation::none(), limits)?;
                let std = modq_basis.standard_monomials()?;
                let full = basis.standard_monomials_full()?.len();
                let novikov_count: usize = relations
                    .iter()
                    .flat_map(|r| r.vars_used())
                    .filter(|&v| table.tag(v).is_novikov())
                    .collect::<std::collections::BTreeSet<_>>()
                    .len();
                let scalar_dim = q_monomial_count(novikov_count, *cap as usize);
                let free = full == std.len() * scalar_dim;
                (std, full, free)
            }
        };
        Ok(QuotientRing {
            shape,
            kind: pres.kind,
            mode: mode.clone(),
            lambda: lambda.to_vec(),
            table,
            basis,
            std_monos,
            full_dimension,
            free_over_novikov,
            relations_used: relations,
        })
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn rank(&self) -> usize {
        self.std_monos.len()
    }

    pub fn expected_rank(&self) -> usize {
        self.shape.fixed_point_count_x()
    }

    pub fn standard_monomials(&self) -> &[Mono] {
        &self.std_monos
    }

    pub fn basis(&self) -> &ReducedBasis {
        &self.basis
    }

    pub fn normal_form(&self, p: &MultiPoly) -> Result<MultiPoly> {
        self.basis.normal_form(p)
    }

    /// Specialize the equivariant parameters of a presentation-level
    /// polynomial to this ring's values.
    pub fn specialize_scalars(&self, p: &MultiPoly) -> Result<MultiPoly> {
        let mut assign = BTreeMap::new();
        for (r, val) in self.lambda.iter().enumerate() {
            assign.insert(
                self.table.var(VarTag::EquivParam { index: (r + 1) as u8 }),
                val.clone(),
            );
        }
        if let ScalarMode::Numeric { q } = &self.mode {
            for (i, val) in q.iter().enumerate() {
                assign.insert(
                    self.table.var(VarTag::NovikovX { level: (i + 1) as u8 }),
                    val.clone(),
                );
            }
        }
        p.specialize_vars(&assign)
    }

    /// Product in the quotient: the normal form of the polynomial product.
    pub fn multiply(&self, a: &MultiPoly, b: &MultiPoly) -> Result<MultiPoly> {
        self.normal_form(&a.mul_trunc(b, self.basis.truncation()))
    }

    /// Coordinates of a normal form in the standard-monomial basis. In
    /// numeric mode the coefficients are rational scalars.
    fn coordinates(&self, nf: &MultiPoly) -> Result<Vec<Rat>> {
        let mut coords = vec![Rat::zero(); self.std_monos.len()];
        for (m, c) in nf.terms() {
            match self.std_monos.iter().position(|b| b == m) {
                Some(k) => coords[k] = c.clone(),
                None => {
                    return Err(Error::Internal(format!(
                        "normal form contains non-basis monomial {}",
                        m.display(&self.table)
                    )))
                }
            }
        }
        Ok(coords)
    }

    /// Matrix of multiplication by `class` in the standard basis
    /// (numeric scalar mode).
    pub fn mult_operator(&self, class: &MultiPoly) -> Result<Vec<Vec<Rat>>> {
        if !matches!(self.mode, ScalarMode::Numeric { .. }) {
            return Err(Error::Domain(
                "multiplication operators need numeric Novikov values".into(),
            ));
        }
        let class = self.specialize_scalars(class)?;
        let rank = self.rank();
        let mut cols = Vec::with_capacity(rank);
        for b in &self.std_monos {
            let basis_elem = MultiPoly::from_term(&self.table, b.clone(), Rat::one());
            let prod = self.multiply(&class, &basis_elem)?;
            cols.push(self.coordinates(&prod)?);
        }
        // transpose: entry [r][c] is the r-th coordinate of class · b_c
        let mut matrix = vec![vec![Rat::zero(); rank]; rank];
        for (c, col) in cols.iter().enumerate() {
            for (r, val) in col.iter().enumerate() {
                matrix[r][c] = val.clone();
            }
        }
        Ok(matrix)
    }

    /// Eigenvalues of the multiplication operator, via the exact
    /// characteristic polynomial.
    pub fn operator_eigenvalues(&self, class: &MultiPoly) -> Result<Vec<Complex64>> {
        let matrix = self.mult_operator(class)?;
        eigen::poly_roots(&eigen::char_poly(&matrix))
    }

    /// Structure constants c^k_{ij} with b_i * b_j = Σ_k c^k_{ij} b_k.
    /// In formal mode the entries are polynomials in the Novikov variables,
    /// obtained by an exact change of basis from the staircase to the
    /// Novikov-module basis b_k · Q^a (this requires freeness).
    pub fn structure_constants(&self) -> Result<Vec<Vec<Vec<MultiPoly>>>> {
        let rank = self.rank();
        let (full, module_basis) = match &self.mode {
            ScalarMode::Numeric { .. } => {
                (self.std_monos.clone(), self.std_monos.clone())
            }
            ScalarMode::Formal { cap } => {
                if !self.free_over_novikov {
                    return Err(Error::Rank(
                        "structure constants need a free quotient".into(),
                    ));
                }
                let full = self.basis.standard_monomials_full()?;
                let novikov: Vec<usize> = self
                    .relations_used
                    .iter()
                    .flat_map(|r| r.vars_used())
                    .filter(|&v| self.table.tag(v).is_novikov())
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .collect();
                let mut module_basis = Vec::new();
                for b in &self.std_monos {
                    for qm in monomials_up_to(&novikov, *cap as i64, self.table.len()) {
                        module_basis.push(b.mul(&qm));
                    }
                }
                (full, module_basis)
            }
        };
        let dim = full.len();
        if module_basis.len() != dim {
            return Err(Error::Internal("module basis and staircase size differ".into()));
        }
        // change of basis: column v of T holds nf(module_basis[v]) in
        // staircase coordinates
        let mut t = vec![vec![Rat::zero(); dim]; dim];
        for (v, mb) in module_basis.iter().enumerate() {
            let nf = self
                .normal_form(&MultiPoly::from_term(&self.table, mb.clone(), Rat::one()))?;
            for (m, c) in nf.terms() {
                let r = full.iter().position(|f| f == m).ok_or_else(|| {
                    Error::Internal("normal form outside the staircase".into())
                })?;
                t[r][v] = c.clone();
            }
        }
        let solver = RatLu::new(t)?;
        let novikov_all: Vec<usize> = (0..self.table.len())
            .filter(|&v| self.table.tag(v).is_novikov())
            .collect();
        let per_basis = dim / rank;
        let mut tensor = vec![vec![vec![MultiPoly::zero(&self.table); rank]; rank]; rank];
        for i in 0..rank {
            for j in i..rank {
                let bi = MultiPoly::from_term(&self.table, self.std_monos[i].clone(), Rat::one());
                let bj = MultiPoly::from_term(&self.table, self.std_monos[j].clone(), Rat::one());
                let prod = self.multiply(&bi, &bj)?;
                let mut rhs = vec![Rat::zero(); dim];
                for (m, c) in prod.terms() {
                    let r = full.iter().position(|f| f == m).ok_or_else(|| {
                        Error::Internal("product outside the staircase".into())
                    })?;
                    rhs[r] = c.clone();
                }
                let coords = solver.solve(&rhs)?;
                for k in 0..rank {
                    let mut entry = MultiPoly::zero(&self.table);
                    for a in 0..per_basis {
                        let coeff = coords[k * per_basis + a].clone();
                        if coeff.is_zero() {
                            continue;
                        }
                        // recover the Novikov part of module_basis[k*per_basis + a]
                        let mb = &module_basis[k * per_basis + a];
                        let mut qmono = Mono::one(self.table.len());
                        for &v in &novikov_all {
                            qmono.0[v] = mb.exp(v);
                        }
                        entry.add_term(qmono, coeff);
                    }
                    tensor[k][i][j] = entry.clone();
                    tensor[k][j][i] = entry;
                }
            }
        }
        Ok(tensor)
    }

    /// Freeness over the truncated Novikov scalars, established through the
    /// dimension count dim_Q(quotient) = rank * dim(scalar ring).
    pub fn is_free_over_novikov(&self) -> bool {
        self.free_over_novikov
    }

    /// Dimension of the quotient over the ground field (in formal mode the
    /// full staircase, Novikov monomials included).
    pub fn full_dimension(&self) -> usize {
        self.full_dimension
    }
}

/// Number of monomials of total degree <= cap in `vars` variables.
pub fn q_monomial_count(vars: usize, cap: usize) -> usize {
    // C(vars + cap, vars)
    let mut num = 1usize;
    let mut den = 1usize;
    for k in 1..=vars {
        num *= cap + k;
        den *= k;
    }
    num / den
}

/// All monomials over `vars` with total degree <= cap, ascending degree.
fn monomials_up_to(vars: &[usize], cap: i64, nvars: usize) -> Vec<Mono> {
    let mut out = vec![Mono::one(nvars)];
    if vars.is_empty() {
        return out;
    }
    let mut frontier = vec![Mono::one(nvars)];
    for _ in 0..cap {
        let mut next = Vec::new();
        for m in &frontier {
            // only extend at or after the last touched variable, to avoid
            // duplicates
            let last = vars
                .iter()
                .rposition(|&v| m.exp(v) > 0)
                .unwrap_or(0);
            for (pos, &v) in vars.iter().enumerate() {
                if pos < last {
                    continue;
                }
                let mut nm = m.clone();
                nm.0[v] += 1;
                next.push(nm);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Exact LU solver over the rationals with partial (nonzero) pivoting.
struct RatLu {
    lu: Vec<Vec<Rat>>,
    perm: Vec<usize>,
}

impl RatLu {
    fn new(mut a: Vec<Vec<Rat>>) -> Result<RatLu> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let pivot = (col..n)
                .find(|&r| !a[r][col].is_zero())
                .ok_or_else(|| Error::Internal("singular change-of-basis matrix".into()))?;
            a.swap(col, pivot);
            perm.swap(col, pivot);
            let inv = a[col][col].clone().recip();
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone() * inv.clone();
                a[r][col] = factor.clone();
                for c in col + 1..n {
                    let sub = factor.clone() * a[col][c].clone();
                    a[r][c] -= sub;
                }
            }
        }
        Ok(RatLu { lu: a, perm })
    }

    fn solve(&self, rhs: &[Rat]) -> Result<Vec<Rat>> {
        let n = self.lu.len();
        let mut b: Vec<Rat> = self.perm.iter().map(|&r| rhs[r].clone()).collect();
        for col in 0..n {
            for r in col + 1..n {
                if !self.lu[r][col].is_zero() {
                    let sub = self.lu[r][col].clone() * b[col].clone();
                    b[r] -= sub;
                }
            }
        }
        for row in (0..n).rev() {
            for c in row + 1..n {
                if !self.lu[row][c].is_zero() {
                    let sub = self.lu[row][c].clone() * b[c].clone();
                    b[row] -= sub;
                }
            }
            b[row] /= self.lu[row][row].clone();
        }
        Ok(b)
    }
}

/// Build a ring and fail loudly unless the rank matches the fixed-point
/// count of the shape.
pub fn build_ring(
    pres: &Presentation,
    mode: &ScalarMode,
    lambda: &[Rat],
    limits: &Limits,
) -> Result<QuotientRing> {
    let ring = QuotientRing::build(pres, mode, lambda, limits)?;
    if ring.rank() != ring.expected_rank() {
        return Err(Error::Rank(format!(
            "{}: quotient rank {} but {} fixed points",
            ring.shape,
            ring.rank(),
            ring.expected_rank()
        )));
    }
    Ok(ring)
}

#[derive(Debug, Serialize)]
pub struct RankGateReport {
    pub shape: String,
    pub expected_rank: usize,
    pub quantum_rank: usize,
    pub classical_rank: usize,
    pub free_over_novikov: bool,
    pub mod_q_equals_classical: bool,
    pub witnesses: Vec<String>,
    pub pass: bool,
}

/// The completeness gate: (a) the quantum quotient has the fixed-point
/// rank and is free over the truncated Novikov scalars, (b) the relations
/// mod Q generate the classical ideal, (c) the classical quotient has the
/// same rank.
pub fn rank_gate(ring: &QuotientRing, limits: &Limits) -> Result<RankGateReport> {
    let cap = match &ring.mode {
        ScalarMode::Formal { cap } => *cap,
        ScalarMode::Numeric { .. } => {
            return Err(Error::Domain("the rank gate runs in formal mode".into()))
        }
    };
    let shape = &ring.shape;
    let mut witnesses = Vec::new();
    let expected = shape.fixed_point_count_x();
    let quantum_rank = ring.rank();
    if quantum_rank != expected {
        witnesses.push(format!("quantum rank {quantum_rank} != expected {expected}"));
    }
    let free = ring.is_free_over_novikov();
    if !free {
        witnesses.push("quotient is not free over the truncated Novikov ring".into());
    }

    // classical side, at the same equivariant specialization
    let classical = classical_whitney(shape, true)?
        .eliminate_aux()?
        .specialize_lambda(&ring.lambda)?;
    let order = MonomialOrder::block(&ring.table);
    let classical_basis = groebner_in(
        &classical.relation_polys(),
        &ring.table,
        &order,
        &Truncation::at(cap),
        limits,
    )?;
    let classical_rank = classical_basis.standard_monomials()?.len();
    if classical_rank != expected {
        witnesses.push(format!("classical rank {classical_rank} != expected {expected}"));
    }

    // relations mod Q against the classical ideal, both directions
    let mut qzero = BTreeMap::new();
    for i in 1..=shape.levels() {
        qzero.insert(ring.table.var(VarTag::NovikovX { level: i as u8 }), Rat::zero());
    }
    let mod_q: Vec<MultiPoly> = ring
        .relations_used
        .iter()
        .map(|r| r.specialize_vars(&qzero))
        .collect::<Result<Vec<_>>>()?;
    let mod_q_basis =
        groebner_in(&mod_q, &ring.table, &order, &Truncation::at(cap), limits)?;
    let mut agree = true;
    for rel in &mod_q {
        if !classical_basis.reduces_to_zero(rel) {
            agree = false;
            witnesses.push("a mod-Q relation is not in the classical ideal".into());
            break;
        }
    }
    for rel in &classical.relation_polys() {
        if !mod_q_basis.reduces_to_zero(rel) {
            agree = false;
            witnesses.push("a classical relation is not generated mod Q".into());
            break;
        }
    }

    let pass = quantum_rank == expected && classical_rank == expected && free && agree;
    Ok(RankGateReport {
        shape: shape.to_string(),
        expected_rank: expected,
        quantum_rank,
        classical_rank,
        free_over_novikov: free,
        mod_q_equals_classical: agree,
        witnesses,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::FlagShape;
    use crate::poly::{rat, rat_int};
    use crate::present::quantum_whitney;

    fn lambdas(n: usize) -> Vec<Rat> {
        // small distinct dyadic rationals in (1, 2)
        (0..n).map(|k| rat_int(1) + rat(2 * k as i64 + 3, 64)).collect()
    }

    #[test]
    fn p1_ring_formal() {
        let shape = FlagShape::parse("1:2").unwrap();
        let pres = quantum_whitney(&shape).unwrap();
        let ring = build_ring(
            &pres,
            &ScalarMode::Formal { cap: 3 },
            &lambdas(2),
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(ring.rank(), 2);
        assert!(ring.is_free_over_novikov());
        let report = rank_gate(&ring, &Limits::default()).unwrap();
        assert!(report.pass, "{:?}", report.witnesses);
    }

    #[test]
    fn p1_mult_operator_and_eigenvalues() {
        // nonequivariant QK(P^1) at Q = 1/4: basis {1, S}, matrix of S is
        // [[0, Q-1], [1, 2]], eigenvalues 1/2 and 3/2
        let shape = FlagShape::parse("1:2").unwrap();
        let pres = quantum_whitney(&shape).unwrap();
        let ring = build_ring(
            &pres,
            &ScalarMode::Numeric { q: vec![rat(1, 4)] },
            &vec![Rat::one(), Rat::one()],
            &Limits::default(),
        )
        .unwrap();
        assert_eq!(ring.rank(), 2);
        let s = MultiPoly::var(ring.table(), VarTag::WedgeS { level: 1, degree: 1 });
        let m = ring.mult_operator(&s).unwrap();
        assert_eq!(m[0], vec![rat_int(0), rat(-3, 4)]);
        assert_eq!(m[1], vec![rat_int(1), rat_int(2)]);
        let eig = ring.operator_eigenvalues(&s).unwrap();
        assert!((eig[0].re - 0.5).abs() < 1e-13 && eig[0].im.abs() < 1e-13);
        assert!((eig[1].re - 1.5).abs() < 1e-13 && eig[1].im.abs() < 1e-13);
        // mult by 1 is the identity
        let id = ring.mult_operator(&MultiPoly::one(ring.table())).unwrap();
        for (r, row) in id.iter().enumerate() {
            for (c, val) in row.iter().enumerate() {
                assert_eq!(*val, if r == c { Rat::one() } else { Rat::zero() });
            }
        }
    }

    #[test]
    fn p1_structure_constants() {
        // P*P = (Q-1)·1 + 2·P in the {1, P} basis
        let shape = FlagShape::parse("1:2").unwrap();
        let pres = quantum_whitney(&shape).unwrap();
        let ring = build_ring(
            &pres,
            &ScalarMode::Formal { cap: 2 },
            &vec![Rat::one(), Rat::one()],
            &Limits::default(),
        )
        .unwrap();
        let c = ring.structure_constants().unwrap();
        let table = ring.table();
        let q = MultiPoly::var(table, VarTag::NovikovX { level: 1 });
        // identity row: 1 * b_j = b_j
        for j in 0..2 {
            for k in 0..2 {
                let expect = if j == k { MultiPoly::one(table) } else { MultiPoly::zero(table) };
                assert_eq!(c[k][0][j], expect);
            }
        }
        assert_eq!(c[0][1][1], q.sub(&MultiPoly::one(table)));
        assert_eq!(c[1][1][1], MultiPoly::int(table, 2));
    }

    #[test]
    fn weakened_relation_fails_gate() {
        // replace the top relation by a proper multiple: the ideal shrinks
        // and the quotient rank exceeds the fixed-point count
        let shape = FlagShape::parse("1:3").unwrap();
        let mut pres = quantum_whitney(&shape).unwrap();
        let last = pres.relations.last_mut().unwrap();
        let s = MultiPoly::var(&pres.table, VarTag::WedgeS { level: 1, degree: 1 });
        last.poly = last.poly.mul(&s);
        let ring = QuotientRing::build(
            &pres,
            &ScalarMode::Formal { cap: 2 },
            &lambdas(3),
            &Limits::default(),
        )
        .unwrap();
        assert!(ring.rank() > ring.expected_rank());
        let report = rank_gate(&ring, &Limits::default()).unwrap();
        assert!(!report.pass);
        assert!(build_ring(&pres, &ScalarMode::Formal { cap: 2 }, &lambdas(3), &Limits::default())
            .is_err());
    }

    #[test]
    fn missing_relation_leaves_infinite_staircase() {
        // dropping the S2-bounding relation of Gr(2,3) leaves one relation
        // in two generators
        let shape = FlagShape::parse("2:3").unwrap();
        let mut pres = quantum_whitney(&shape).unwrap();
        pres.relations.pop();
        let built = QuotientRing::build(
            &pres,
            &ScalarMode::Formal { cap: 2 },
            &lambdas(3),
            &Limits::default(),
        );
        assert!(matches!(built, Err(Error::Rank(_))));
    }

    #[test]
    fn rank_gate_shapes_small() {
        for (spec, rank) in [("1:2", 2), ("1:3", 3), ("2:3", 3)] {
            let shape = FlagShape::parse(spec).unwrap();
            let pres = quantum_whitney(&shape).unwrap();
            let ring = build_ring(
                &pres,
                &ScalarMode::Formal { cap: 3 },
                &lambdas(shape.ambient()),
                &Limits::default(),
            )
            .unwrap();
            assert_eq!(ring.rank(), rank, "{spec}");
            let report = rank_gate(&ring, &Limits::default()).unwrap();
            assert!(report.pass, "{spec}: {:?}", report.witnesses);
        }
    }
}
