//! Relation sets for the quantum K-ring: classical and quantum Whitney
//! presentations, the Coulomb-branch/Bethe equations in specialized and
//! root-parameter form, the Vieta symmetrization chain with its quantum
//! quotient classes, and the tridiagonal Wronskian matrix.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flag::FlagShape;
use crate::poly::{MultiPoly, Rat};
use crate::symfun;
use crate::vars::{VarTable, VarTag};

/// A relation polynomial together with the identity it instantiates.
#[derive(Clone, Debug)]
pub struct Relation {
    pub poly: MultiPoly,
    pub provenance: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PresentationKind {
    ClassicalWhitney,
    QuantumWhitney,
    Vieta,
    Wronskian,
}

/// Generators plus relations; the generators are wedge powers of the
/// tautological bundles (and possibly auxiliary quotient wedges).
#[derive(Clone, Debug)]
pub struct Presentation {
    pub shape: FlagShape,
    pub kind: PresentationKind,
    pub table: Arc<VarTable>,
    pub generators: Vec<VarTag>,
    pub relations: Vec<Relation>,
}

/// Λ_y(S_level) = Σ_ℓ y^ℓ ∧^ℓ S_level, with Λ_y(S_0) = 1 and
/// Λ_y(S_{n+1}) = Π_r (1 + y Λ_r).
pub fn lambda_y_s(table: &Arc<VarTable>, level: usize) -> MultiPoly {
    let y = MultiPoly::var(table, VarTag::Deformation);
    let top = if level == 0 { 0 } else { table.shape().v(level) };
    let mut acc = MultiPoly::one(table);
    for l in 1..=top as i64 {
        acc = acc.add(&y.pow(l as u32).mul(&symfun::wedge_s(table, level, l)));
    }
    acc
}

/// Λ_y(R_level) over the auxiliary wedge generators.
pub fn lambda_y_r(table: &Arc<VarTable>, level: usize) -> MultiPoly {
    let y = MultiPoly::var(table, VarTag::Deformation);
    let mut acc = MultiPoly::one(table);
    for l in 1..=table.shape().gap(level) as i64 {
        acc = acc.add(&y.pow(l as u32).mul(&symfun::wedge_r(table, level, l)));
    }
    acc
}

fn split_y(table: &Arc<VarTable>, p: &MultiPoly) -> BTreeMap<i32, MultiPoly> {
    p.split_by_var(table.var(VarTag::Deformation))
}

fn whitney_generators(table: &Arc<VarTable>, with_aux: bool) -> Vec<VarTag> {
    let shape = table.shape().clone();
    let mut gens = Vec::new();
    for i in 1..=shape.levels() {
        for d in 1..=shape.v(i) {
            gens.push(VarTag::WedgeS { level: i as u8, degree: d as u8 });
        }
    }
    if with_aux {
        for i in 1..=shape.levels() {
            for d in 1..=shape.gap(i) {
                gens.push(VarTag::WedgeR { level: i as u8, degree: d as u8 });
            }
        }
    }
    gens
}

/// The Whitney relations: y-degree parts of
/// Λ_y(S_i)·Λ_y(R_i) = Λ_y(S_{i+1}) for every level.
pub fn classical_whitney(shape: &FlagShape, equivariant: bool) -> Result<Presentation> {
    let table = VarTable::new(shape);
    let mut relations = Vec::new();
    for i in 1..=shape.levels() {
        let product = lambda_y_s(&table, i).mul(&lambda_y_r(&table, i));
        let rhs = lambda_y_s(&table, i + 1);
        let diff = product.sub(&rhs);
        for (l, part) in split_y(&table, &diff) {
            if part.is_zero() {
                continue;
            }
            relations.push(Relation {
                poly: part,
                provenance: format!("whit[i={i},l={l}]"),
            });
        }
    }
    let mut pres = Presentation {
        shape: shape.clone(),
        kind: PresentationKind::ClassicalWhitney,
        table,
        generators: whitney_generators(&VarTable::new(shape), true),
        relations,
    };
    if !equivariant {
        pres = pres.specialize_lambda_to_one()?;
    }
    Ok(pres)
}

/// The quantum Whitney relations, cleared of (1-Q_i) denominators.
///
/// For y-degree ℓ up to the rank of R_i the cleared relation carries an
/// exact (1-Q_i) factor which is divided out, so those relations coincide
/// with the classical ones; the quantum correction enters above that degree.
pub fn quantum_whitney(shape: &FlagShape) -> Result<Presentation> {
    let table = VarTable::new(shape);
    let one = MultiPoly::one(&table);
    let y = MultiPoly::var(&table, VarTag::Deformation);
    let mut relations = Vec::new();
    for i in 1..=shape.levels() {
        let m = shape.gap(i) as i64;
        let q = MultiPoly::var(&table, VarTag::NovikovX { level: i as u8 });
        let one_minus_q = one.sub(&q);
        let classical = lambda_y_s(&table, i).mul(&lambda_y_r(&table, i)).sub(&lambda_y_s(&table, i + 1));
        let correction = y
            .pow(m as u32)
            .mul(&q)
            .mul(&symfun::wedge_r(&table, i, m))
            .mul(&lambda_y_s(&table, i).sub(&lambda_y_s(&table, i - 1)));
        let cleared = one_minus_q.mul(&classical).add(&correction);
        for (l, part) in split_y(&table, &cleared) {
            if part.is_zero() {
                continue;
            }
            if (l as i64) <= m {
                // the low y-degrees carry an exact (1-Q_i) unit factor
                let reduced = part.div_exact(&one_minus_q).ok_or_else(|| {
                    Error::Internal(format!(
                        "expected (1-Q_{i}) factor in quantum Whitney at i={i}, l={l}"
                    ))
                })?;
                relations.push(Relation {
                    poly: reduced,
                    provenance: format!("whitney2[i={i},l={l}]/(1-Q{i})"),
                });
            } else {
                relations.push(Relation {
                    poly: part,
                    provenance: format!("whitney2[i={i},l={l}]*(1-Q{i})"),
                });
            }
        }
    }
    Ok(Presentation {
        shape: shape.clone(),
        kind: PresentationKind::QuantumWhitney,
        table,
        generators: whitney_generators(&VarTable::new(shape), true),
        relations,
    })
}

impl Presentation {
    /// Specialize the equivariant parameters to the given rationals.
    pub fn specialize_lambda(&self, values: &[Rat]) -> Result<Presentation> {
        if values.len() != self.shape.ambient() {
            return Err(Error::Domain(format!(
                "need {} equivariant values, got {}",
                self.shape.ambient(),
                values.len()
            )));
        }
        let mut assign = BTreeMap::new();
        for (r, val) in values.iter().enumerate() {
            assign.insert(self.table.var(VarTag::EquivParam { index: (r + 1) as u8 }), val.clone());
        }
        let relations = self
            .relations
            .iter()
            .map(|rel| {
                Ok(Relation {
                    poly: rel.poly.specialize_vars(&assign)?,
                    provenance: rel.provenance.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Presentation { relations, ..self.clone() })
    }

    pub fn specialize_lambda_to_one(&self) -> Result<Presentation> {
        self.specialize_lambda(&vec![Rat::one(); self.shape.ambient()])
    }

    /// Eliminate the auxiliary ∧R generators. The relations of y-degree up
    /// to rank(R_i) are linear in a new generator and define it; the higher
    /// ones become the relations of the quotient in the ∧S generators only.
    pub fn eliminate_aux(&self) -> Result<Presentation> {
        let table = &self.table;
        let shape = &self.shape;
        let mut subst: BTreeMap<usize, MultiPoly> = BTreeMap::new();
        for i in 1..=shape.levels() {
            let mut values: Vec<MultiPoly> = vec![MultiPoly::one(table)];
            for l in 1..=shape.gap(i) as i64 {
                let mut val = symfun::wedge_s(table, i + 1, l);
                for j in 1..=(l.min(shape.v(i) as i64)) {
                    val = val.sub(&symfun::wedge_s(table, i, j).mul(&values[(l - j) as usize]));
                }
                values.push(val);
            }
            for l in 1..=shape.gap(i) {
                subst.insert(
                    table.var(VarTag::WedgeR { level: i as u8, degree: l as u8 }),
                    values[l].clone(),
                );
            }
        }
        let mut relations = Vec::new();
        for rel in &self.relations {
            let poly = rel.poly.substitute(&subst)?;
            if poly.is_zero() {
                continue;
            }
            relations.push(Relation {
                poly,
                provenance: format!("{}[R eliminated]", rel.provenance),
            });
        }
        Ok(Presentation {
            shape: shape.clone(),
            kind: self.kind,
            table: table.clone(),
            generators: whitney_generators(table, false),
            relations,
        })
    }

    pub fn relation_polys(&self) -> Vec<MultiPoly> {
        self.relations.iter().map(|r| r.poly.clone()).collect()
    }
}

/// One Coulomb-branch/Bethe equation, kept in factored form so that the
/// root-parameter specialization can cancel ratio factors exactly.
#[derive(Clone, Debug)]
pub struct BetheEquation {
    pub level: usize,
    pub index: usize,
    /// factors of the left-hand side (product)
    pub lhs: Vec<MultiPoly>,
    /// factors of the right-hand side (product)
    pub rhs: Vec<MultiPoly>,
}

impl BetheEquation {
    /// The cleared polynomial Π lhs - Π rhs.
    pub fn polynomial(&self) -> MultiPoly {
        let mul_all = |fs: &[MultiPoly]| {
            fs.iter().fold(MultiPoly::one(self.lhs[0].table()), |acc, f| acc.mul(f))
        };
        mul_all(&self.lhs).sub(&mul_all(&self.rhs))
    }
}

/// P^{i}_j as a ring element, with the convention that level n+1 carries the
/// equivariant parameters.
fn p_or_lambda(table: &Arc<VarTable>, level: usize, index: usize) -> MultiPoly {
    if level == table.shape().levels() + 1 {
        MultiPoly::var(table, VarTag::EquivParam { index: index as u8 })
    } else {
        MultiPoly::var(table, VarTag::ChernRoot { level: level as u8, index: index as u8 })
    }
}

/// The Bethe Ansatz / Coulomb branch equations, one per (level, index).
///
/// `specialized = true` gives the form with Q^i_j already mapped to Q_i and
/// all root parameters set to 1; `false` keeps the λ-ratio factors and the
/// abelian Novikov variables.
pub fn bethe_equations(shape: &FlagShape, specialized: bool) -> Result<Vec<BetheEquation>> {
    let table = VarTable::new(shape);
    let mut out = Vec::new();
    for i in 1..=shape.levels() {
        let vi = shape.v(i);
        for j in 1..=vi {
            let pj = p_or_lambda(&table, i, j);
            let mut lhs: Vec<MultiPoly> = Vec::new();
            let mut rhs: Vec<MultiPoly> = Vec::new();
            for b in 1..=shape.v(i + 1) {
                lhs.push(p_or_lambda(&table, i + 1, b).sub(&pj));
                rhs.push(p_or_lambda(&table, i + 1, b));
            }
            for a in 1..=shape.v(i - 1) {
                rhs.push(pj.sub(&p_or_lambda(&table, i - 1, a)));
            }
            if specialized {
                // (-1)^{v_i-1} e_{v_i}(P^i) on the left,
                // Q_i (P^i_j)^{v_i - v_{i-1}} on the right
                let mut lead = MultiPoly::int(&table, if (vi - 1) % 2 == 0 { 1 } else { -1 });
                for k in 1..=vi {
                    lead = lead.mul(&p_or_lambda(&table, i, k));
                }
                lhs.push(lead);
                let q = MultiPoly::var(&table, VarTag::NovikovX { level: i as u8 });
                rhs.push(q.mul(&pj.pow((vi - shape.v(i - 1)) as u32)));
            } else {
                // λ-ratio factors, cleared: (P^i_j - λ^i_{k,j} P^i_k) on the
                // left against (P^i_k - λ^i_{j,k} P^i_j) on the right
                let mut lead = MultiPoly::one(&table);
                lead = lead.mul(&pj.pow(shape.v(i - 1) as u32));
                for k in 1..=vi {
                    if k != j {
                        lead = lead.mul(&p_or_lambda(&table, i, k));
                        let lam_kj = MultiPoly::root_param(&table, i as u8, k as u8, j as u8)?;
                        lhs.push(pj.sub(&lam_kj.mul(&p_or_lambda(&table, i, k))));
                        let lam_jk = MultiPoly::root_param(&table, i as u8, j as u8, k as u8)?;
                        rhs.push(p_or_lambda(&table, i, k).sub(&lam_jk.mul(&pj)));
                    }
                }
                lhs.push(lead);
                let q = MultiPoly::var(&table, VarTag::NovikovY { level: i as u8, index: j as u8 });
                rhs.push(q.mul(&pj.pow((vi - 1) as u32)));
            }
            out.push(BetheEquation { level: i, index: j, lhs, rhs });
        }
    }
    Ok(out)
}

/// Apply λ -> 1 and Q^i_j -> Q_i to an unspecialized equation, cancelling
/// the ratio factors via (1 - x/y)/(1 - y/x) = -x/y. The result equals the
/// `specialized = true` constructor output exactly.
pub fn specialize_bethe(eq: &BetheEquation) -> Result<BetheEquation> {
    let table = eq.lhs[0].table().clone();
    let shape = table.shape().clone();
    let (i, j) = (eq.level, eq.index);
    let vi = shape.v(i);
    let set_params = |p: &MultiPoly| -> Result<MultiPoly> {
        let mut out = p.clone();
        for v in p.vars_used() {
            match table.tag(v) {
                VarTag::RootParam { .. } => {
                    out = out.specialize_vars(&BTreeMap::from([(v, Rat::one())]))?;
                }
                VarTag::NovikovY { level, .. } => {
                    let to = table.var(VarTag::NovikovX { level });
                    out = out.substitute_monomial(
                        v,
                        &Rat::one(),
                        &crate::vars::Mono::var(table.len(), to, 1),
                    )?;
                }
                _ => {}
            }
        }
        Ok(out)
    };
    let mut lhs: Vec<MultiPoly> = eq.lhs.iter().map(|f| set_params(f)).collect::<Result<_>>()?;
    let mut rhs: Vec<MultiPoly> = eq.rhs.iter().map(|f| set_params(f)).collect::<Result<_>>()?;
    // cancel (P_j - P_k) on the left against (P_k - P_j) = -(P_j - P_k)
    // on the right, collecting one sign per k ≠ j
    let mut sign = Rat::one();
    for k in 1..=vi {
        if k == j {
            continue;
        }
        let pj = p_or_lambda(&table, i, j);
        let pk = p_or_lambda(&table, i, k);
        let diff = pj.sub(&pk);
        let li = lhs
            .iter()
            .position(|f| *f == diff)
            .ok_or_else(|| Error::Internal("missing cancelled lhs factor".into()))?;
        lhs.remove(li);
        let ri = rhs
            .iter()
            .position(|f| *f == diff.neg())
            .ok_or_else(|| Error::Internal("missing cancelled rhs factor".into()))?;
        rhs.remove(ri);
        sign = -sign;
    }
    // After the cancellations the equation reads lhs = sign · rhs. Multiply
    // through by sign · P_j^{1 - v_{i-1}}: the sign lands on the lhs lead
    // (sign^2 = 1 on the rhs), which matches the specialized constructor.
    let pj_var = table.var(VarTag::ChernRoot { level: i as u8, index: j as u8 });
    let shift = 1i32 - shape.v(i - 1) as i32;
    let adjust =
        |fs: &mut Vec<MultiPoly>, factor: &Rat| -> Result<()> {
            for f in fs.iter_mut() {
                if f.as_monomial().is_some() {
                    let mono = crate::vars::Mono::var(table.len(), pj_var, shift);
                    *f = f.mul_monomial(&mono, factor);
                    return Ok(());
                }
            }
            Err(Error::Internal("missing monomial factor to normalize".into()))
        };
    adjust(&mut lhs, &sign)?;
    adjust(&mut rhs, &Rat::one())?;
    Ok(BetheEquation { level: i, index: j, lhs, rhs })
}

/// The degree-v_{i+1} polynomial in t whose roots are the level-i Chern
/// roots together with the quantum quotient roots:
/// F_i(t) = Σ_k (-1)^k t^{v_{i+1}-k} [e_{v_i}(P^i) e_k(P^{i+1})
///          + Q_i e_{v_{i+1}}(P^{i+1}) e_{k-v_{i+1}+v_i}(P^{i-1})].
pub fn characteristic_poly(table: &Arc<VarTable>, i: usize) -> MultiPoly {
    let shape = table.shape().clone();
    let t = MultiPoly::var(table, VarTag::Auxiliary);
    let vi = shape.v(i) as i64;
    let vnext = shape.v(i + 1) as i64;
    let level_vars = |lvl: usize| -> Vec<VarTag> {
        if lvl == 0 {
            Vec::new()
        } else if lvl == shape.levels() + 1 {
            symfun::equiv_params(table)
        } else {
            symfun::chern_roots(table, lvl)
        }
    };
    let here = level_vars(i);
    let above = level_vars(i + 1);
    let below = level_vars(i - 1);
    let e_top_here = symfun::elementary_symmetric(table, &here, vi);
    let e_top_above = symfun::elementary_symmetric(table, &above, vnext);
    let q = MultiPoly::var(table, VarTag::NovikovX { level: i as u8 });
    let mut acc = MultiPoly::zero(table);
    for k in 0..=vnext {
        let mut coeff = e_top_here.mul(&symfun::elementary_symmetric(table, &above, k));
        coeff = coeff.add(&q.mul(&e_top_above).mul(&symfun::elementary_symmetric(
            table,
            &below,
            k - vnext + vi,
        )));
        let term = t.pow((vnext - k) as u32).mul(&coeff);
        if k % 2 == 0 {
            acc = acc.add(&term);
        } else {
            acc = acc.sub(&term);
        }
    }
    acc
}

/// ∧^ℓ R̂_level: numerator polynomial in the ∧S generators, divided by
/// (1 - Q_level) exactly at the top wedge.
#[derive(Clone, Debug)]
pub struct WedgeClass {
    pub numerator: MultiPoly,
    pub over_one_minus_q: bool,
}

/// The quantum quotient bundle at one level: its wedge classes 0..=rank.
#[derive(Clone, Debug)]
pub struct QuantumQuotientBundle {
    pub level: usize,
    pub wedges: Vec<WedgeClass>,
}

impl QuantumQuotientBundle {
    /// Cleared Λ_y class: (1-Q_i)·Λ_y(R̂_i) as a polynomial.
    pub fn cleared_lambda_y(&self, table: &Arc<VarTable>) -> MultiPoly {
        let y = MultiPoly::var(table, VarTag::Deformation);
        let q = MultiPoly::var(table, VarTag::NovikovX { level: self.level as u8 });
        let one_minus_q = MultiPoly::one(table).sub(&q);
        let mut acc = MultiPoly::zero(table);
        for (l, w) in self.wedges.iter().enumerate() {
            let mut term = y.pow(l as u32).mul(&w.numerator);
            if !w.over_one_minus_q {
                term = term.mul(&one_minus_q);
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Cleared determinant: (1-Q_i)·det(R̂_i).
    pub fn cleared_det(&self) -> MultiPoly {
        self.wedges.last().expect("rank >= 1").numerator.clone()
    }
}

/// Express the quotient-root symmetric functions through the Vieta chain:
/// e_ℓ(P̄^i) = Σ_j (-1)^j e_{ℓ-j}(P^{i+1}) h_j(P^i), with the top wedge
/// additionally divided by (1 - Q_i). Also assembles the level's relations
/// (the y-degree parts above the quotient rank; the lower parts vanish
/// identically and are asserted to do so).
pub fn vieta_symmetrize(
    table: &Arc<VarTable>,
    i: usize,
) -> Result<(QuantumQuotientBundle, Vec<Relation>)> {
    let shape = table.shape().clone();
    let m = shape.gap(i) as i64;
    let mut wedges = Vec::new();
    for l in 0..=m {
        let mut num = MultiPoly::zero(table);
        for j in 0..=l {
            let term = symfun::wedge_s(table, i + 1, l - j).mul(&symfun::h_in_wedges(table, i, j));
            if j % 2 == 0 {
                num = num.add(&term);
            } else {
                num = num.sub(&term);
            }
        }
        wedges.push(WedgeClass { numerator: num, over_one_minus_q: l == m });
    }
    let bundle = QuantumQuotientBundle { level: i, wedges };

    let y = MultiPoly::var(table, VarTag::Deformation);
    let q = MultiPoly::var(table, VarTag::NovikovX { level: i as u8 });
    let one_minus_q = MultiPoly::one(table).sub(&q);
    // (1-Q_i) · [ Λ_y(S_i) Λ_y(R̂_i) - Λ_y(S_{i+1}) - Q_i y^m det(R̂_i) Λ_y(S_{i-1}) ]
    let assembled = lambda_y_s(table, i)
        .mul(&bundle.cleared_lambda_y(table))
        .sub(&one_minus_q.mul(&lambda_y_s(table, i + 1)))
        .sub(&q.mul(&y.pow(m as u32)).mul(&bundle.cleared_det()).mul(&lambda_y_s(table, i - 1)));
    let mut relations = Vec::new();
    for (l, part) in split_y(table, &assembled) {
        if (l as i64) <= m {
            if !part.is_zero() {
                return Err(Error::Internal(format!(
                    "Vieta identity of y-degree {l} <= {m} did not vanish at level {i}"
                )));
            }
            continue;
        }
        if part.is_zero() {
            continue;
        }
        relations.push(Relation {
            poly: part,
            provenance: format!("vieta(a-f)/gamer[i={i},l={l}]*(1-Q{i})"),
        });
    }
    Ok((bundle, relations))
}

/// The Vieta-assembled presentation over the ∧S generators only.
pub fn vieta_presentation(shape: &FlagShape) -> Result<Presentation> {
    let table = VarTable::new(shape);
    let mut relations = Vec::new();
    for i in 1..=shape.levels() {
        let (_, mut rels) = vieta_symmetrize(&table, i)?;
        relations.append(&mut rels);
    }
    Ok(Presentation {
        shape: shape.clone(),
        kind: PresentationKind::Vieta,
        table: table.clone(),
        generators: whitney_generators(&table, false),
        relations,
    })
}

/// One entry of the Wronskian matrix: `num`, possibly divided by
/// (1 - Q_{denom_level}).
#[derive(Clone, Debug)]
pub struct WronskianEntry {
    pub num: MultiPoly,
    pub denom_level: Option<usize>,
}

/// Tridiagonal (n+1)×(n+1) matrix whose principal minors reduce to the
/// Λ_y classes of the tautological bundles. Row/column indices are 1-based;
/// column k >= 2 is the column of the quotient bundle R̂_{k-1}.
pub struct WronskianMatrix {
    pub shape: FlagShape,
    pub table: Arc<VarTable>,
    pub size: usize,
    entries: BTreeMap<(usize, usize), WronskianEntry>,
}

pub fn wronskian_matrix(shape: &FlagShape) -> Result<WronskianMatrix> {
    let table = VarTable::new(shape);
    let n = shape.levels();
    let y = MultiPoly::var(&table, VarTag::Deformation);
    let mut entries = BTreeMap::new();
    entries.insert(
        (1, 1),
        WronskianEntry { num: lambda_y_s(&table, 1), denom_level: None },
    );
    for k in 2..=n + 1 {
        let level = k - 1;
        let (bundle, _) = vieta_symmetrize(&table, level)?;
        let m = shape.gap(level);
        entries.insert(
            (k, k),
            WronskianEntry {
                num: bundle.cleared_lambda_y(&table),
                denom_level: Some(level),
            },
        );
        entries.insert(
            (k - 1, k),
            WronskianEntry {
                num: y.pow(m as u32).mul(&bundle.cleared_det()),
                denom_level: Some(level),
            },
        );
        entries.insert(
            (k, k - 1),
            WronskianEntry {
                num: MultiPoly::var(&table, VarTag::NovikovX { level: level as u8 }),
                denom_level: None,
            },
        );
    }
    Ok(WronskianMatrix { shape: shape.clone(), table, size: n + 1, entries })
}

impl WronskianMatrix {
    pub fn entry(&self, row: usize, col: usize) -> Option<&WronskianEntry> {
        self.entries.get(&(row, col))
    }

    /// The leading principal j×j minor with every column cleared of its
    /// (1-Q) denominator, together with the accumulated clearing factor.
    pub fn cleared_minor(&self, j: usize) -> Result<(MultiPoly, MultiPoly)> {
        if j == 0 || j > self.size {
            return Err(Error::Domain(format!("minor index {j} out of range")));
        }
        let one = MultiPoly::one(&self.table);
        let mut clearing = one.clone();
        let mut mat: Vec<Vec<MultiPoly>> =
            vec![vec![MultiPoly::zero(&self.table); j]; j];
        for col in 1..=j {
            let col_factor = if col >= 2 {
                let q = MultiPoly::var(&self.table, VarTag::NovikovX { level: (col - 1) as u8 });
                one.sub(&q)
            } else {
                one.clone()
            };
            if col >= 2 {
                clearing = clearing.mul(&col_factor);
            }
            for row in 1..=j {
                if let Some(e) = self.entries.get(&(row, col)) {
                    let cleared = match e.denom_level {
                        Some(lvl) => {
                            debug_assert_eq!(lvl, col - 1);
                            e.num.clone()
                        }
                        None => e.num.mul(&col_factor),
                    };
                    mat[row - 1][col - 1] = cleared;
                }
            }
        }
        Ok((det_laplace(&self.table, &mat), clearing))
    }
}

fn det_laplace(table: &Arc<VarTable>, mat: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = mat.len();
    if n == 0 {
        return MultiPoly::one(table);
    }
    if n == 1 {
        return mat[0][0].clone();
    }
    let mut acc = MultiPoly::zero(table);
    for (col, top) in mat[0].iter().enumerate() {
        if top.is_zero() {
            continue;
        }
        let minor: Vec<Vec<MultiPoly>> = mat[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != col)
                    .map(|(_, e)| e.clone())
                    .collect()
            })
            .collect();
        let sub = top.mul(&det_laplace(table, &minor));
        if col % 2 == 0 {
            acc = acc.add(&sub);
        } else {
            acc = acc.sub(&sub);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;
    use crate::symfun::{chern_roots, elementary_symmetric, equiv_params};

    #[test]
    fn classical_whitney_p1_shape() {
        let shape = FlagShape::parse("1:2").unwrap();
        let pres = classical_whitney(&shape, true).unwrap();
        // y-degrees 1 and 2 for the single level
        assert_eq!(pres.relations.len(), 2);
        // degree-0 part of every Whitney relation is vacuous: provenance
        // never mentions l=0
        assert!(pres.relations.iter().all(|r| !r.provenance.contains("l=0")));
    }

    #[test]
    fn projective_space_oracle_equivariant() {
        // Fl(1;N): eliminating the quotient wedges must leave exactly
        // Π_r (Λ_r - S) = Q e_N(Λ)
        for n_amb in 2..=4usize {
            let shape = FlagShape::new(vec![1], n_amb).unwrap();
            let pres = quantum_whitney(&shape).unwrap().eliminate_aux().unwrap();
            assert_eq!(pres.relations.len(), 1, "N={n_amb}");
            let table = &pres.table;
            let s = MultiPoly::var(table, VarTag::WedgeS { level: 1, degree: 1 });
            let q = MultiPoly::var(table, VarTag::NovikovX { level: 1 });
            let mut prod = MultiPoly::one(table);
            for r in 1..=n_amb {
                prod = prod
                    .mul(&MultiPoly::var(table, VarTag::EquivParam { index: r as u8 }).sub(&s));
            }
            let en = elementary_symmetric(table, &equiv_params(table), n_amb as i64);
            let expected = q.mul(&en).sub(&prod);
            let got = &pres.relations[0].poly;
            assert!(got == &expected || got == &expected.neg(), "N={n_amb}");
        }
    }

    #[test]
    fn quantum_whitney_mod_q_is_classical() {
        for spec in ["1:2", "1,2:3", "2:4"] {
            let shape = FlagShape::parse(spec).unwrap();
            let quantum = quantum_whitney(&shape).unwrap();
            let classical = classical_whitney(&shape, true).unwrap();
            let table = &quantum.table;
            let mut qzero = BTreeMap::new();
            for i in 1..=shape.levels() {
                qzero.insert(
                    table.var(VarTag::NovikovX { level: i as u8 }),
                    num::Zero::zero(),
                );
            }
            let reduced: Vec<MultiPoly> = quantum
                .relations
                .iter()
                .map(|r| r.poly.specialize_vars(&qzero).unwrap())
                .collect();
            assert_eq!(reduced.len(), classical.relations.len(), "{spec}");
            for (a, b) in reduced.iter().zip(classical.relations.iter()) {
                assert_eq!(a, &b.poly, "{spec}");
            }
        }
    }

    #[test]
    fn bethe_p1_is_quadratic_oracle() {
        // Fl(1;2): (Λ1 - P)(Λ2 - P) = Q Λ1 Λ2, after clearing
        let shape = FlagShape::parse("1:2").unwrap();
        let eqs = bethe_equations(&shape, true).unwrap();
        assert_eq!(eqs.len(), 1);
        let table = eqs[0].lhs[0].table().clone();
        let p = MultiPoly::var(&table, VarTag::ChernRoot { level: 1, index: 1 });
        let l1 = MultiPoly::var(&table, VarTag::EquivParam { index: 1 });
        let l2 = MultiPoly::var(&table, VarTag::EquivParam { index: 2 });
        let q = MultiPoly::var(&table, VarTag::NovikovX { level: 1 });
        let expected = p.mul(&l1.sub(&p)).mul(&l2.sub(&p)).sub(&q.mul(&p).mul(&l1).mul(&l2));
        assert_eq!(eqs[0].polynomial(), expected);
    }

    #[test]
    fn specialization_chain_is_exact() {
        for spec in ["1:2", "2:3", "1,2:3", "2:4"] {
            let shape = FlagShape::parse(spec).unwrap();
            let unspec = bethe_equations(&shape, false).unwrap();
            let spec_eqs = bethe_equations(&shape, true).unwrap();
            for (u, s) in unspec.iter().zip(spec_eqs.iter()) {
                let specialized = specialize_bethe(u).unwrap();
                assert_eq!(
                    specialized.polynomial(),
                    s.polynomial(),
                    "shape {spec} at ({}, {})",
                    u.level,
                    u.index
                );
            }
        }
    }

    #[test]
    fn ratio_factor_specializes_to_negative_ratio() {
        // (1 - λ x/y) / (1 - λ^{-1} y/x) at λ=1 equals -x/y; in cleared form
        // the lhs factor (x - λ^{-1} y)·(y/x cleared) pairs against -(x - y)
        let shape = FlagShape::parse("2:3").unwrap();
        let eqs = bethe_equations(&shape, false).unwrap();
        let table = eqs[0].lhs[0].table().clone();
        let p1 = MultiPoly::var(&table, VarTag::ChernRoot { level: 1, index: 1 });
        let p2 = MultiPoly::var(&table, VarTag::ChernRoot { level: 1, index: 2 });
        let lam = MultiPoly::root_param(&table, 1, 2, 1).unwrap();
        // equation (1,1) carries the cleared factor P1 - λ^1_{2,1} P2 on the lhs
        assert!(eqs[0].lhs.iter().any(|f| *f == p1.sub(&lam.mul(&p2))));
        let one = BTreeMap::from([(
            table.var(VarTag::RootParam { level: 1, lo: 1, hi: 2 }),
            Rat::one(),
        )]);
        let at_one = p1.sub(&lam.mul(&p2)).specialize_vars(&one).unwrap();
        assert_eq!(at_one, p1.sub(&p2));
    }

    #[test]
    fn characteristic_poly_contracts() {
        let shape = FlagShape::parse("1:2").unwrap();
        let table = VarTable::new(&shape);
        let f = characteristic_poly(&table, 1);
        let t = table.var(VarTag::Auxiliary);
        assert_eq!(f.max_degree_of(t), 2);
        // F_1(t) = P t^2 - (P(Λ1+Λ2) + QΛ1Λ2) t + PΛ1Λ2
        let p = MultiPoly::var(&table, VarTag::ChernRoot { level: 1, index: 1 });
        let tv = MultiPoly::var(&table, VarTag::Auxiliary);
        let l1 = MultiPoly::var(&table, VarTag::EquivParam { index: 1 });
        let l2 = MultiPoly::var(&table, VarTag::EquivParam { index: 2 });
        let q = MultiPoly::var(&table, VarTag::NovikovX { level: 1 });
        let expected = p
            .mul(&tv.pow(2))
            .sub(&tv.mul(&p.mul(&l1.add(&l2)).add(&q.mul(&l1).mul(&l2))))
            .add(&p.mul(&l1).mul(&l2));
        assert_eq!(f, expected);
        // Q = 0 limit is e_{v_i}(P^i) Π (t - Λ_b)
        let qv = table.var(VarTag::NovikovX { level: 1 });
        let f0 = f.specialize_vars(&BTreeMap::from([(qv, num::Zero::zero())])).unwrap();
        assert_eq!(f0, p.mul(&tv.sub(&l1)).mul(&tv.sub(&l2)));
    }

    #[test]
    fn vieta_det_for_p1() {
        // Fl(1;2): cleared det(R̂_1) = Λ1 + Λ2 - S
        let shape = FlagShape::parse("1:2").unwrap();
        let table = VarTable::new(&shape);
        let (bundle, rels) = vieta_symmetrize(&table, 1).unwrap();
        assert_eq!(bundle.wedges.len(), 2);
        assert_eq!(bundle.wedges[0].numerator, MultiPoly::one(&table));
        assert!(!bundle.wedges[0].over_one_minus_q);
        assert!(bundle.wedges[1].over_one_minus_q);
        let s = MultiPoly::var(&table, VarTag::WedgeS { level: 1, degree: 1 });
        let l1 = MultiPoly::var(&table, VarTag::EquivParam { index: 1 });
        let l2 = MultiPoly::var(&table, VarTag::EquivParam { index: 2 });
        assert_eq!(bundle.cleared_det(), l1.add(&l2).sub(&s));
        // one nontrivial relation at y-degree 2
        assert_eq!(rels.len(), 1);
        assert!(rels[0].provenance.contains("l=2"));
    }

    #[test]
    fn vieta_matches_eliminated_whitney_wedges() {
        // below the quotient rank, the Vieta classes equal the eliminated
        // ∧R generators of the Whitney presentation
        for spec in ["1:3", "1:4", "2:4", "1,2:3"] {
            let shape = FlagShape::parse(spec).unwrap();
            let table = VarTable::new(&shape);
            for i in 1..=shape.levels() {
                let (bundle, _) = vieta_symmetrize(&table, i).unwrap();
                let mut values: Vec<MultiPoly> = vec![MultiPoly::one(&table)];
                for l in 1..=shape.gap(i) as i64 {
                    let mut val = symfun::wedge_s(&table, i + 1, l);
                    for j in 1..=(l.min(shape.v(i) as i64)) {
                        val = val
                            .sub(&symfun::wedge_s(&table, i, j).mul(&values[(l - j) as usize]));
                    }
                    values.push(val);
                }
                for l in 0..=shape.gap(i) {
                    assert_eq!(
                        bundle.wedges[l].numerator, values[l],
                        "shape {spec}, level {i}, wedge {l}"
                    );
                }
            }
        }
    }

    #[test]
    fn wronskian_shape_and_entries() {
        let shape = FlagShape::parse("1,2:3").unwrap();
        let w = wronskian_matrix(&shape).unwrap();
        assert_eq!(w.size, 3);
        // top-left entry is Λ_y(S_1)
        assert_eq!(w.entry(1, 1).unwrap().num, lambda_y_s(&w.table, 1));
        // subdiagonal carries the Novikov variables
        for k in 2..=3 {
            let e = w.entry(k, k - 1).unwrap();
            assert_eq!(
                e.num,
                MultiPoly::var(&w.table, VarTag::NovikovX { level: (k - 1) as u8 })
            );
            assert!(e.denom_level.is_none());
        }
        // superdiagonal entry in column k is y^{v_k - v_{k-1}} · det(R̂_{k-1})
        for k in 2..=3usize {
            let e = w.entry(k - 1, k).unwrap();
            assert_eq!(e.denom_level, Some(k - 1));
            let y = w.table.var(VarTag::Deformation);
            assert!(e.num.terms().all(|(m, _)| m.exp(y) == (shape.gap(k - 1)) as i32));
        }
    }

    #[test]
    fn one_is_not_a_relation() {
        let shape = FlagShape::parse("1,2:3").unwrap();
        for pres in [
            classical_whitney(&shape, true).unwrap(),
            quantum_whitney(&shape).unwrap(),
            vieta_presentation(&shape).unwrap(),
        ] {
            for rel in &pres.relations {
                assert!(!rel.poly.is_zero());
                assert!(rel.poly.num_terms() > 1, "{}", rel.provenance);
            }
            let _ = rat_int(0);
        }
    }

    #[test]
    fn bethe_unspecialized_i1_has_no_below_factor() {
        // at i = 1 the right-hand side has no level-0 product
        let shape = FlagShape::parse("1,2:3").unwrap();
        let eqs = bethe_equations(&shape, true).unwrap();
        let eq = &eqs[0];
        assert_eq!((eq.level, eq.index), (1, 1));
        // rhs: the Q-monomial and the two level-2 clearing factors
        assert_eq!(eq.rhs.len(), 3);
    }

    #[test]
    fn characteristic_poly_vanishes_on_bethe_roots_numerically() {
        use num::complex::Complex64;
        // Fl(1;2) with Λ=(2,3), Q=1/10: F_1(P) = 0 at each Bethe root
        let shape = FlagShape::parse("1:2").unwrap();
        let table = VarTable::new(&shape);
        let f = characteristic_poly(&table, 1);
        let roots = [1.5780455542707113f64, 3.4219544457292887f64];
        for r in roots {
            let mut assign = BTreeMap::new();
            assign.insert(
                table.var(VarTag::ChernRoot { level: 1, index: 1 }),
                Complex64::new(r, 0.0),
            );
            assign.insert(table.var(VarTag::Auxiliary), Complex64::new(r, 0.0));
            assign.insert(table.var(VarTag::EquivParam { index: 1 }), Complex64::new(2.0, 0.0));
            assign.insert(table.var(VarTag::EquivParam { index: 2 }), Complex64::new(3.0, 0.0));
            assign.insert(table.var(VarTag::NovikovX { level: 1 }), Complex64::new(0.1, 0.0));
            let val = f.eval_complex(&assign).unwrap();
            assert!(val.norm() < 1e-12, "|F(root)| = {}", val.norm());
        }
        let _ = chern_roots(&table, 1);
    }
}
