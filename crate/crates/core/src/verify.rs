//! Structural verifications tying the presentations together: the projective
//! space oracle, the Wronskian determinant identity, equality of the Vieta
//! and Whitney ideals, the classical fixed-point audit, and the Bethe
//! specialization chain.

use std::collections::BTreeMap;

use num::One;
use serde::Serialize;

use crate::error::Result;
use crate::flag::{enumerate_fixed_points, FlagShape};
use crate::groebner::{groebner_in, Limits};
use crate::order::MonomialOrder;
use crate::poly::{MultiPoly, Rat, Truncation};
use crate::present::{
    bethe_equations, classical_whitney, lambda_y_s, quantum_whitney, specialize_bethe,
    vieta_presentation, wronskian_matrix,
};
use crate::ring::QuotientRing;
use crate::symfun;
use crate::vars::{VarTable, VarTag};

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn ok(name: impl Into<String>, detail: impl Into<String>) -> CheckResult {
        CheckResult { name: name.into(), pass: true, detail: detail.into() }
    }

    fn fail(name: impl Into<String>, detail: impl Into<String>) -> CheckResult {
        CheckResult { name: name.into(), pass: false, detail: detail.into() }
    }
}

/// Quantum Whitney for Fl(1;N) collapses to the single relation
/// Π_r (Λ_r - S) = Q e_N(Λ); nonequivariantly (1-S)^N = Q.
pub fn pn_oracle(ambient: usize) -> Result<CheckResult> {
    let shape = FlagShape::new(vec![1], ambient)?;
    let name = format!("pn_oracle[{shape}]");
    let pres = quantum_whitney(&shape)?.eliminate_aux()?;
    if pres.relations.len() != 1 {
        return Ok(CheckResult::fail(
            name,
            format!("expected a single relation, got {}", pres.relations.len()),
        ));
    }
    let table = &pres.table;
    let s = MultiPoly::var(table, VarTag::WedgeS { level: 1, degree: 1 });
    let q = MultiPoly::var(table, VarTag::NovikovX { level: 1 });
    let mut prod = MultiPoly::one(table);
    for r in 1..=ambient {
        prod = prod.mul(&MultiPoly::var(table, VarTag::EquivParam { index: r as u8 }).sub(&s));
    }
    let en = symfun::elementary_symmetric(table, &symfun::equiv_params(table), ambient as i64);
    let expected = prod.sub(&q.mul(&en));
    let got = &pres.relations[0].poly;
    let equivariant_ok = got == &expected || got == &expected.neg();

    let nonequiv = pres.specialize_lambda_to_one()?;
    let expected_ne = MultiPoly::one(table).sub(&s).pow(ambient as u32).sub(&q);
    let got_ne = &nonequiv.relations[0].poly;
    let nonequivariant_ok = got_ne == &expected_ne || got_ne == &expected_ne.neg();

    if equivariant_ok && nonequivariant_ok {
        Ok(CheckResult::ok(
            name,
            format!("Π(1 - S/Λ_r) = Q and (1-S)^{ambient} = Q hold symbolically"),
        ))
    } else {
        Ok(CheckResult::fail(
            name,
            format!("equivariant {equivariant_ok}, nonequivariant {nonequivariant_ok}"),
        ))
    }
}

/// det(M_j) reduces to Λ_y(S_j) in the quantum Whitney quotient, for every
/// leading principal minor; the last one gives Λ_y of the ambient space.
pub fn wronskian_det_check(ring: &QuotientRing) -> Result<Vec<CheckResult>> {
    let shape = ring.shape.clone();
    let w = wronskian_matrix(&shape)?;
    let mut out = Vec::new();
    for j in 1..=w.size {
        let (det, clearing) = w.cleared_minor(j)?;
        let expected = clearing.mul(&lambda_y_s(&w.table, j));
        let residual = ring.specialize_scalars(&det.sub(&expected))?;
        let y = w.table.var(VarTag::Deformation);
        let mut bad = Vec::new();
        for (l, part) in residual.split_by_var(y) {
            let nf = ring.normal_form(&part)?;
            if !nf.is_zero() {
                bad.push(format!("y^{l}: {nf}"));
            }
        }
        let name = format!("wronskian_det[{shape},j={j}]");
        if bad.is_empty() {
            out.push(CheckResult::ok(name, "det(M_j) = Λ_y(S_j) in the quotient"));
        } else {
            out.push(CheckResult::fail(name, bad.join("; ")));
        }
    }
    Ok(out)
}

/// Mutual normal-form membership of the Vieta-assembled ideal and the
/// quantum Whitney ideal (both with auxiliary generators eliminated).
pub fn vieta_whitney_equivalence(
    shape: &FlagShape,
    lambda: &[Rat],
    cap: u32,
    limits: &Limits,
) -> Result<CheckResult> {
    let name = format!("vieta_equals_whitney[{shape}]");
    let whitney = quantum_whitney(shape)?.eliminate_aux()?.specialize_lambda(lambda)?;
    let vieta = vieta_presentation(shape)?.specialize_lambda(lambda)?;
    let table = whitney.table.clone();
    let order = MonomialOrder::block(&table);
    let trunc = Truncation::at(cap);
    let wb = groebner_in(&whitney.relation_polys(), &table, &order, &trunc, limits)?;
    let vb = groebner_in(&vieta.relation_polys(), &table, &order, &trunc, limits)?;
    for rel in &vieta.relations {
        if !wb.reduces_to_zero(&rel.poly) {
            return Ok(CheckResult::fail(
                name,
                format!("{} is not in the Whitney ideal", rel.provenance),
            ));
        }
    }
    for rel in &whitney.relations {
        if !vb.reduces_to_zero(&rel.poly) {
            return Ok(CheckResult::fail(
                name,
                format!("{} is not in the Vieta ideal", rel.provenance),
            ));
        }
    }
    Ok(CheckResult::ok(name, "mutual normal-form membership"))
}

/// Every classical Whitney relation vanishes under every fixed-point
/// localization (symbolic equivariant parameters).
pub fn classical_localization_audit(shape: &FlagShape) -> Result<CheckResult> {
    let name = format!("classical_localization[{shape}]");
    let pres = classical_whitney(shape, true)?;
    let table = &pres.table;
    for fp in enumerate_fixed_points(shape) {
        let mut subst: BTreeMap<usize, MultiPoly> = BTreeMap::new();
        for i in 1..=shape.levels() {
            let (sub_roots, quot_roots) = fp.bundle_roots(shape, i);
            let sub_tags: Vec<VarTag> =
                sub_roots.iter().map(|&r| VarTag::EquivParam { index: r as u8 }).collect();
            let quot_tags: Vec<VarTag> =
                quot_roots.iter().map(|&r| VarTag::EquivParam { index: r as u8 }).collect();
            for l in 1..=shape.v(i) {
                subst.insert(
                    table.var(VarTag::WedgeS { level: i as u8, degree: l as u8 }),
                    symfun::elementary_symmetric(table, &sub_tags, l as i64),
                );
            }
            for l in 1..=shape.gap(i) {
                subst.insert(
                    table.var(VarTag::WedgeR { level: i as u8, degree: l as u8 }),
                    symfun::elementary_symmetric(table, &quot_tags, l as i64),
                );
            }
        }
        for rel in &pres.relations {
            let localized = rel.poly.substitute(&subst)?;
            if !localized.is_zero() {
                return Ok(CheckResult::fail(
                    name,
                    format!("{} does not vanish at {:?}", rel.provenance, fp),
                ));
            }
        }
    }
    Ok(CheckResult::ok(name, "all relations vanish at all fixed points"))
}

/// Setting λ -> 1 and Q^i_j -> Q_i in the root-parameter Bethe equations
/// reproduces the specialized ones exactly.
pub fn specialization_chain(shape: &FlagShape) -> Result<CheckResult> {
    let name = format!("bethe_specialization[{shape}]");
    let unspec = bethe_equations(shape, false)?;
    let spec = bethe_equations(shape, true)?;
    for (u, s) in unspec.iter().zip(spec.iter()) {
        let specialized = specialize_bethe(u)?;
        if specialized.polynomial() != s.polynomial() {
            return Ok(CheckResult::fail(
                name,
                format!("mismatch at (i,j) = ({}, {})", u.level, u.index),
            ));
        }
    }
    Ok(CheckResult::ok(name, "λ -> 1, Q^i_j -> Q_i chain is exact"))
}

/// The characteristic polynomial vanishes on the level's Chern roots
/// modulo the Bethe ideal (cleared polynomial form, specialized Λ).
pub fn characteristic_poly_check(
    shape: &FlagShape,
    lambda: &[Rat],
    limits: &Limits,
) -> Result<CheckResult> {
    let name = format!("characteristic_poly[{shape}]");
    let table = VarTable::new(shape);
    let mut lam_assign = BTreeMap::new();
    for (r, val) in lambda.iter().enumerate() {
        lam_assign.insert(table.var(VarTag::EquivParam { index: (r + 1) as u8 }), val.clone());
    }
    let relations: Vec<MultiPoly> = bethe_equations(shape, true)?
        .iter()
        .map(|eq| eq.polynomial().specialize_vars(&lam_assign))
        .collect::<Result<Vec<_>>>()?;
    let order = MonomialOrder::block(&table);
    let basis = groebner_in(&relations, &table, &order, &Truncation::none(), limits)?;
    for i in 1..=shape.levels() {
        let f = crate::present::characteristic_poly(&table, i).specialize_vars(&lam_assign)?;
        let tvar = table.var(VarTag::Auxiliary);
        for j in 1..=shape.v(i) {
            let p = MultiPoly::var(&table, VarTag::ChernRoot { level: i as u8, index: j as u8 });
            let mut at_root = MultiPoly::zero(&table);
            for (l, part) in f.split_by_var(tvar) {
                at_root = at_root.add(&part.mul(&p.pow(l as u32)));
            }
            if !basis.reduces_to_zero(&at_root) {
                return Ok(CheckResult::fail(
                    name,
                    format!("F_{i}(P^{i}_{j}) does not reduce to zero"),
                ));
            }
        }
    }
    Ok(CheckResult::ok(name, "F_i(P^i_j) = 0 mod the Bethe ideal"))
}

/// phi after symmetrization agrees with phi on W-invariant input.
pub fn phi_symmetrize_consistency(shape: &FlagShape) -> Result<CheckResult> {
    let name = format!("phi_symmetrize[{shape}]");
    let table = VarTable::new(shape);
    for i in 1..=shape.levels() {
        for l in 1..=shape.v(i) as i64 {
            let e = symfun::elementary_symmetric(&table, &symfun::chern_roots(&table, i), l);
            let direct = crate::flag::phi_map(&e)?;
            let symmetrized = crate::flag::phi_map(&crate::flag::weyl_symmetrize(&e))?;
            if direct != symmetrized {
                return Ok(CheckResult::fail(name, format!("level {i}, degree {l}")));
            }
            let expected = symfun::wedge_s(&table, i, l);
            if direct != expected {
                return Ok(CheckResult::fail(
                    name,
                    format!("e_{l}(P^{i}) did not map to the wedge generator"),
                ));
            }
        }
    }
    Ok(CheckResult::ok(name, "phi ∘ symmetrize = phi on invariants"))
}

pub fn default_lambdas(n: usize, seed: u64) -> Vec<Rat> {
    crate::config::draw_lambdas(n, seed)
}

/// The standard battery behind `verify`: rank gate, Wronskian, Vieta
/// equivalence, localization audit, specialization chain, characteristic
/// polynomial, phi consistency.
pub fn verify_shape(
    shape: &FlagShape,
    lambda: &[Rat],
    cap: u32,
    limits: &Limits,
) -> Result<Vec<CheckResult>> {
    let mut results = Vec::new();
    let pres = quantum_whitney(shape)?;
    let ring = QuotientRing::build(
        &pres,
        &crate::ring::ScalarMode::Formal { cap },
        lambda,
        limits,
    )?;
    let gate = crate::ring::rank_gate(&ring, limits)?;
    results.push(if gate.pass {
        CheckResult::ok(
            format!("rank_gate[{shape}]"),
            format!("rank {} free over truncated Novikov ring", gate.quantum_rank),
        )
    } else {
        CheckResult::fail(format!("rank_gate[{shape}]"), gate.witnesses.join("; "))
    });
    results.extend(wronskian_det_check(&ring)?);
    results.push(vieta_whitney_equivalence(shape, lambda, cap, limits)?);
    results.push(classical_localization_audit(shape)?);
    results.push(specialization_chain(shape)?);
    results.push(characteristic_poly_check(shape, lambda, limits)?);
    results.push(phi_symmetrize_consistency(shape)?);
    if shape.levels() == 1 && shape.v(1) == 1 {
        results.push(pn_oracle(shape.ambient())?);
    }
    Ok(results)
}

pub fn all_pass(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.pass)
}
