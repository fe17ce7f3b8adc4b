//! Elementary and complete homogeneous symmetric polynomials, plus the
//! level-by-level rewrite of symmetric Chern-root expressions into wedge
//! generators.

use std::sync::Arc;

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::poly::{MultiPoly, Rat};
use crate::vars::{Mono, VarTable, VarTag};

/// e_k of the listed variables; e_0 = 1 and e_k = 0 outside 0..=len.
pub fn elementary_symmetric(table: &Arc<VarTable>, vars: &[VarTag], k: i64) -> MultiPoly {
    if k < 0 || k as usize > vars.len() {
        return MultiPoly::zero(table);
    }
    if k == 0 {
        return MultiPoly::one(table);
    }
    let idx: Vec<usize> = vars.iter().map(|&t| table.var(t)).collect();
    let mut out = MultiPoly::zero(table);
    for combo in idx.iter().combinations(k as usize) {
        let mut m = Mono::one(table.len());
        for &&v in &combo {
            m.0[v] += 1;
        }
        out.add_term(m, Rat::from_integer(1.into()));
    }
    out
}

/// h_k of the listed variables; h_0 = 1 and h_k = 0 for k < 0.
pub fn complete_homogeneous(table: &Arc<VarTable>, vars: &[VarTag], k: i64) -> MultiPoly {
    if k < 0 {
        return MultiPoly::zero(table);
    }
    if k == 0 {
        return MultiPoly::one(table);
    }
    if vars.is_empty() {
        return MultiPoly::zero(table);
    }
    let idx: Vec<usize> = vars.iter().map(|&t| table.var(t)).collect();
    let mut out = MultiPoly::zero(table);
    for combo in idx.iter().combinations_with_replacement(k as usize) {
        let mut m = Mono::one(table.len());
        for &&v in &combo {
            m.0[v] += 1;
        }
        out.add_term(m, Rat::from_integer(1.into()));
    }
    out
}

/// The Chern-root variables P^level_1..P^level_{v_level}.
pub fn chern_roots(table: &Arc<VarTable>, level: usize) -> Vec<VarTag> {
    let v = table.shape().v(level);
    (1..=v).map(|j| VarTag::ChernRoot { level: level as u8, index: j as u8 }).collect()
}

/// The equivariant parameters Λ_1..Λ_N.
pub fn equiv_params(table: &Arc<VarTable>) -> Vec<VarTag> {
    (1..=table.shape().ambient()).map(|r| VarTag::EquivParam { index: r as u8 }).collect()
}

/// ∧^deg S_level as a ring element: a wedge generator for 1 <= level <= n,
/// the scalar e_deg(Λ) at level n+1, and rank-zero conventions at level 0.
pub fn wedge_s(table: &Arc<VarTable>, level: usize, deg: i64) -> MultiPoly {
    let shape = table.shape().clone();
    let n = shape.levels();
    if deg == 0 {
        return MultiPoly::one(table);
    }
    if deg < 0 || level == 0 || deg as usize > shape.v(level) {
        return MultiPoly::zero(table);
    }
    if level <= n {
        MultiPoly::var(table, VarTag::WedgeS { level: level as u8, degree: deg as u8 })
    } else {
        elementary_symmetric(table, &equiv_params(table), deg)
    }
}

/// ∧^deg R_level (auxiliary quotient generator), rank v_{level+1} - v_level.
pub fn wedge_r(table: &Arc<VarTable>, level: usize, deg: i64) -> MultiPoly {
    let shape = table.shape().clone();
    if deg == 0 {
        return MultiPoly::one(table);
    }
    if deg < 0 || deg as usize > shape.gap(level) {
        return MultiPoly::zero(table);
    }
    MultiPoly::var(table, VarTag::WedgeR { level: level as u8, degree: deg as u8 })
}

/// h_j of the Chern roots of S_level, written in the wedge generators via
/// h_j = Σ_{k>=1} (-1)^{k+1} ∧^k S_level · h_{j-k}.
pub fn h_in_wedges(table: &Arc<VarTable>, level: usize, j: i64) -> MultiPoly {
    if j < 0 {
        return MultiPoly::zero(table);
    }
    if j == 0 {
        return MultiPoly::one(table);
    }
    let v = table.shape().v(level);
    let mut h: Vec<MultiPoly> = vec![MultiPoly::one(table)];
    for m in 1..=j {
        let mut acc = MultiPoly::zero(table);
        for k in 1..=(m.min(v as i64)) {
            let term = wedge_s(table, level, k).mul(&h[(m - k) as usize]);
            if k % 2 == 1 {
                acc = acc.add(&term);
            } else {
                acc = acc.sub(&term);
            }
        }
        h.push(acc);
    }
    h.pop().unwrap()
}

/// Rewrite all dependence on level-`level` Chern roots through the
/// elementary symmetric polynomials of that level, mapping e_ℓ(P^level) to
/// ∧^ℓ S_level. Fails when some coefficient is not symmetric.
pub fn rewrite_level_in_wedges(p: &MultiPoly, level: usize) -> Result<MultiPoly> {
    let table = p.table().clone();
    let roots = chern_roots(&table, level);
    let idx: Vec<usize> = roots.iter().map(|&t| table.var(t)).collect();
    if idx.is_empty() {
        return Ok(p.clone());
    }
    // group terms by their exponents outside this level
    let mut groups: std::collections::BTreeMap<Mono, Vec<(Vec<i32>, Rat)>> =
        std::collections::BTreeMap::new();
    for (m, c) in p.terms() {
        let mut outer = m.clone();
        let mut inner = Vec::with_capacity(idx.len());
        for &v in &idx {
            inner.push(outer.0[v]);
            outer.0[v] = 0;
        }
        groups.entry(outer).or_default().push((inner, c.clone()));
    }
    let mut out = MultiPoly::zero(&table);
    for (outer, terms) in groups {
        let decomposition = decompose_symmetric(idx.len(), terms)?;
        for (epowers, coeff) in decomposition {
            let mut piece = MultiPoly::constant(&table, coeff);
            for (l, &e) in epowers.iter().enumerate() {
                if e > 0 {
                    piece = piece.mul(&wedge_s(&table, level, (l + 1) as i64).pow(e as u32));
                }
            }
            out = out.add(&piece.mul_monomial(&outer, &Rat::from_integer(1.into())));
        }
    }
    Ok(out)
}

/// Greedy leading-partition decomposition of a symmetric polynomial in the
/// given variables (exponents + rational coefficients). Returns products of
/// elementary symmetric polynomials: (multiplicity of e_1..e_m, coefficient).
fn decompose_symmetric(m: usize, terms: Vec<(Vec<i32>, Rat)>) -> Result<Vec<(Vec<u32>, Rat)>> {
    // local polynomial over exponent vectors of the level variables
    let mut f: std::collections::BTreeMap<Vec<i32>, Rat> = std::collections::BTreeMap::new();
    for (e, c) in terms {
        if e.iter().any(|&x| x < 0) {
            return Err(Error::Domain("negative Chern-root exponent in symmetric rewrite".into()));
        }
        *f.entry(e).or_insert_with(|| Rat::from_integer(0.into())) += c;
    }
    f.retain(|_, c| !num::Zero::is_zero(c));
    let elems: Vec<Vec<(Vec<i32>, Rat)>> = (1..=m)
        .map(|k| {
            let mut terms = Vec::new();
            for combo in (0..m).combinations(k) {
                let mut e = vec![0; m];
                for v in combo {
                    e[v] = 1;
                }
                terms.push((e, Rat::from_integer(1.into())));
            }
            terms
        })
        .collect();
    let mut out = Vec::new();
    let mut guard = 0usize;
    while let Some((lead, coeff)) = f.iter().next_back().map(|(e, c)| (e.clone(), c.clone())) {
        guard += 1;
        if guard > 200_000 {
            return Err(Error::Resource("symmetric decomposition did not terminate".into()));
        }
        if lead.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::Domain(
                "polynomial is not symmetric in the level variables".into(),
            ));
        }
        // exponent of e_l is lead[l-1] - lead[l]
        let mut epowers = vec![0u32; m];
        for l in 0..m {
            let next = if l + 1 < m { lead[l + 1] } else { 0 };
            epowers[l] = (lead[l] - next) as u32;
        }
        // expand the product of elementaries and subtract
        let mut prod: std::collections::BTreeMap<Vec<i32>, Rat> = std::collections::BTreeMap::new();
        prod.insert(vec![0; m], coeff.clone());
        for (l, &e) in epowers.iter().enumerate() {
            for _ in 0..e {
                let mut next: std::collections::BTreeMap<Vec<i32>, Rat> =
                    std::collections::BTreeMap::new();
                for (pe, pc) in &prod {
                    for (ee, ec) in &elems[l] {
                        let sum: Vec<i32> = pe.iter().zip(ee.iter()).map(|(a, b)| a + b).collect();
                        let entry = next.entry(sum).or_insert_with(|| Rat::from_integer(0.into()));
                        *entry += pc.clone() * ec.clone();
                    }
                }
                next.retain(|_, c| !num::Zero::is_zero(c));
                prod = next;
            }
        }
        for (pe, pc) in prod {
            let entry = f.entry(pe).or_insert_with(|| Rat::from_integer(0.into()));
            *entry -= pc;
        }
        f.retain(|_, c| !num::Zero::is_zero(c));
        out.push((epowers, coeff));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::FlagShape;
    use crate::poly::rat_int;

    fn table() -> Arc<VarTable> {
        VarTable::new(&FlagShape::parse("2,3:4").unwrap())
    }

    #[test]
    fn elementary_basics() {
        let t = table();
        let roots = chern_roots(&t, 2);
        assert_eq!(elementary_symmetric(&t, &roots, 0), MultiPoly::one(&t));
        assert!(elementary_symmetric(&t, &roots[..2], 3).is_zero());
        assert!(elementary_symmetric(&t, &roots, -1).is_zero());
        let e2 = elementary_symmetric(&t, &roots, 2);
        assert_eq!(e2.num_terms(), 3); // xy + xz + yz
        let e1 = elementary_symmetric(&t, &roots[..2], 1);
        let p1 = MultiPoly::var(&t, roots[0]);
        let p2 = MultiPoly::var(&t, roots[1]);
        assert_eq!(e1, p1.add(&p2));
    }

    #[test]
    fn complete_homogeneous_basics() {
        let t = table();
        let roots = chern_roots(&t, 2);
        let x = MultiPoly::var(&t, roots[0]);
        let y = MultiPoly::var(&t, roots[1]);
        // h_2(x, y) = x^2 + xy + y^2
        let h2 = complete_homogeneous(&t, &roots[..2], 2);
        assert_eq!(h2, x.mul(&x).add(&x.mul(&y)).add(&y.mul(&y)));
        assert_eq!(complete_homogeneous(&t, &roots[..1], 1), x);
        assert!(complete_homogeneous(&t, &roots, -2).is_zero());
    }

    #[test]
    fn newton_identities() {
        let t = table();
        for nvars in 1..=3usize {
            let roots = &chern_roots(&t, 2)[..nvars];
            for k in 1..=5i64 {
                let mut acc = MultiPoly::zero(&t);
                for j in 0..=k {
                    let term = elementary_symmetric(&t, roots, j)
                        .mul(&complete_homogeneous(&t, roots, k - j));
                    if j % 2 == 0 {
                        acc = acc.add(&term);
                    } else {
                        acc = acc.sub(&term);
                    }
                }
                assert!(acc.is_zero(), "newton identity failed at n={nvars}, k={k}");
            }
        }
    }

    #[test]
    fn h_in_wedges_matches_roots() {
        // compare h_j written in wedge generators against h_j of the roots
        // after substituting e_l(P) for the wedge generators
        let t = table();
        let roots = chern_roots(&t, 2);
        for j in 0..=4i64 {
            let in_wedges = h_in_wedges(&t, 2, j);
            let mut subst = std::collections::BTreeMap::new();
            for l in 1..=3i64 {
                let v = t.var(VarTag::WedgeS { level: 2, degree: l as u8 });
                subst.insert(v, elementary_symmetric(&t, &roots, l));
            }
            assert_eq!(
                in_wedges.substitute(&subst).unwrap(),
                complete_homogeneous(&t, &roots, j),
                "h_{j}"
            );
        }
    }

    #[test]
    fn rewrite_symmetric_in_wedges() {
        let t = table();
        let roots = chern_roots(&t, 2);
        let x = MultiPoly::var(&t, roots[0]);
        let y = MultiPoly::var(&t, roots[1]);
        let z = MultiPoly::var(&t, roots[2]);
        // power sum p_2 = e_1^2 - 2 e_2
        let p2 = x.mul(&x).add(&y.mul(&y)).add(&z.mul(&z));
        let rewritten = rewrite_level_in_wedges(&p2, 2).unwrap();
        let ws1 = MultiPoly::var(&t, VarTag::WedgeS { level: 2, degree: 1 });
        let ws2 = MultiPoly::var(&t, VarTag::WedgeS { level: 2, degree: 2 });
        assert_eq!(rewritten, ws1.mul(&ws1).sub(&ws2.scale(&rat_int(2))));
        // non-symmetric input is rejected
        assert!(rewrite_level_in_wedges(&x, 2).is_err());
    }
}
