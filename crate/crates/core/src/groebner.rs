//! Buchberger completion over exact rationals with Novikov truncation.
//!
//! The ideal that gets completed is always ⟨relations⟩ + ⟨all Novikov
//! monomials of degree cap+1⟩; arithmetic drops monomials beyond the cap, so
//! reductions stay inside the truncated ring and normal forms are unique.

use std::cmp::Ordering;
use std::sync::Arc;

use num::One;

use crate::error::{Error, Result};
use crate::order::MonomialOrder;
use crate::poly::{MultiPoly, Rat, Truncation};
use crate::vars::{Mono, VarTable};

#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_basis: usize,
    pub max_pairs: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { max_basis: 4000, max_pairs: 400_000 }
    }
}

/// Term list sorted descending under the active order.
#[derive(Clone, Debug)]
struct OrderedPoly {
    terms: Vec<(Mono, Rat)>,
}

impl OrderedPoly {
    fn from_poly(p: &MultiPoly, order: &MonomialOrder) -> OrderedPoly {
        let mut terms: Vec<(Mono, Rat)> =
            p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        OrderedPoly { terms }
    }

    fn to_poly(&self, table: &Arc<VarTable>) -> MultiPoly {
        let mut p = MultiPoly::zero(table);
        for (m, c) in &self.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lead(&self) -> &(Mono, Rat) {
        &self.terms[0]
    }

    fn make_monic(&mut self) {
        if let Some((_, c)) = self.terms.first().map(|(m, c)| (m.clone(), c.clone())) {
            if !c.is_one() {
                for (_, v) in self.terms.iter_mut() {
                    *v /= c.clone();
                }
            }
        }
    }
}

/// A confluent rewriting basis together with the data needed to reduce.
pub struct ReducedBasis {
    table: Arc<VarTable>,
    order: MonomialOrder,
    trunc: Truncation,
    ring_vars: Vec<usize>,
    elems: Vec<OrderedPoly>,
}

/// Complete `relations` (plus the degree cap+1 Novikov monomials of every
/// Novikov variable occurring in them) to a reduced Groebner basis.
pub fn groebner(
    relations: &[MultiPoly],
    order: &MonomialOrder,
    trunc: &Truncation,
    limits: &Limits,
) -> Result<ReducedBasis> {
    let table = match relations.first() {
        Some(p) => p.table().clone(),
        None => {
            return Err(Error::Domain("empty relation list needs an explicit ring".into()));
        }
    };
    groebner_in(relations, &table, order, trunc, limits)
}

/// Like `groebner`, with the ambient ring variables fixed even when the
/// relation list is empty.
pub fn groebner_in(
    relations: &[MultiPoly],
    table: &Arc<VarTable>,
    order: &MonomialOrder,
    trunc: &Truncation,
    limits: &Limits,
) -> Result<ReducedBasis> {
    let mut ring_vars: Vec<usize> = Vec::new();
    for p in relations {
        for (m, _) in p.terms() {
            if m.has_negative() {
                return Err(Error::Domain(
                    "Groebner input must be polynomial; clear Laurent denominators first".into(),
                ));
            }
        }
        for v in p.vars_used() {
            if !ring_vars.contains(&v) {
                ring_vars.push(v);
            }
        }
    }
    ring_vars.sort_unstable();

    let mut gens: Vec<MultiPoly> = relations.iter().filter(|p| !p.is_zero()).cloned().collect();
    // truncation ideal: all Novikov monomials of degree cap+1
    if let Some(cap) = trunc.cap {
        let novikov: Vec<usize> =
            ring_vars.iter().copied().filter(|&v| table.tag(v).is_novikov()).collect();
        if !novikov.is_empty() {
            for combo in monomials_of_degree(&novikov, cap as i64 + 1, table.len()) {
                gens.push(MultiPoly::from_term(table, combo, Rat::one()));
            }
        }
    }

    // Completion runs in the honest polynomial ring; the truncation ideal
    // participates through its monomial generators, so S-pairs against them
    // perform the degree-cap reduction instead of ad-hoc arithmetic drops.
    let mut basis: Vec<OrderedPoly> = Vec::new();
    for g in &gens {
        if g.is_zero() {
            continue;
        }
        let mut op = OrderedPoly::from_poly(g, order);
        op = reduce_full(&op, &basis, table, order);
        if !op.is_zero() {
            op.make_monic();
            basis.push(op);
        }
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for i in 0..basis.len() {
        for j in 0..i {
            pairs.push((j, i));
        }
    }
    let mut processed_pairs = 0usize;
    while let Some(pos) = select_pair(&pairs, &basis, order) {
        let (i, j) = pairs.swap_remove(pos);
        processed_pairs += 1;
        if processed_pairs > limits.max_pairs {
            return Err(Error::Resource(format!(
                "Groebner pair limit {} exceeded",
                limits.max_pairs
            )));
        }
        let (li, lj) = (&basis[i].lead().0, &basis[j].lead().0);
        // product criterion
        if li.lcm(lj) == li.mul(lj) {
            continue;
        }
        // chain criterion: both companion lcms must properly divide this one
        let lcm = li.lcm(lj);
        let mut skip = false;
        for (k, g) in basis.iter().enumerate() {
            if k == i || k == j {
                continue;
            }
            let lk = &g.lead().0;
            if lk.divides(&lcm)
                && li.lcm(lk) != lcm
                && lj.lcm(lk) != lcm
                && !pairs.contains(&(i.min(k), i.max(k)))
                && !pairs.contains(&(j.min(k), j.max(k)))
            {
                skip = true;
                break;
            }
        }
        if skip {
            continue;
        }
        let s = s_poly(&basis[i], &basis[j], table, order);
        let mut r = reduce_full(&s, &basis, table, order);
        if !r.is_zero() {
            r.make_monic();
            let new_idx = basis.len();
            basis.push(r);
            if basis.len() > limits.max_basis {
                return Err(Error::Resource(format!(
                    "Groebner basis size limit {} exceeded",
                    limits.max_basis
                )));
            }
            for k in 0..new_idx {
                pairs.push((k, new_idx));
            }
        }
    }

    // minimalize: drop elements whose lead is divisible by another lead
    let mut keep = vec![true; basis.len()];
    for i in 0..basis.len() {
        for j in 0..basis.len() {
            if i != j
                && keep[j]
                && keep[i]
                && basis[j].lead().0.divides(&basis[i].lead().0)
                && (basis[j].lead().0 != basis[i].lead().0 || j < i)
            {
                keep[i] = false;
            }
        }
    }
    let minimal: Vec<OrderedPoly> =
        basis.into_iter().zip(keep).filter(|(_, k)| *k).map(|(g, _)| g).collect();
    // inter-reduce tails
    let mut reduced = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<OrderedPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let mut r = reduce_full(&minimal[i], &others, table, order);
        if !r.is_zero() {
            r.make_monic();
            reduced.push(r);
        }
    }
    reduced.sort_by(|a, b| order.cmp(&b.lead().0, &a.lead().0));

    Ok(ReducedBasis {
        table: table.clone(),
        order: order.clone(),
        trunc: *trunc,
        ring_vars,
        elems: reduced,
    })
}

fn select_pair(
    pairs: &[(usize, usize)],
    basis: &[OrderedPoly],
    order: &MonomialOrder,
) -> Option<usize> {
    // normal strategy: smallest lcm first
    let mut best: Option<(usize, Mono, i64)> = None;
    for (pos, &(i, j)) in pairs.iter().enumerate() {
        let lcm = basis[i].lead().0.lcm(&basis[j].lead().0);
        let deg = lcm.total_degree();
        let better = match &best {
            None => true,
            Some((_, bm, bd)) => {
                deg < *bd || (deg == *bd && order.cmp(&lcm, bm) == Ordering::Less)
            }
        };
        if better {
            best = Some((pos, lcm, deg));
        }
    }
    best.map(|(pos, _, _)| pos)
}

fn s_poly(
    f: &OrderedPoly,
    g: &OrderedPoly,
    table: &Arc<VarTable>,
    order: &MonomialOrder,
) -> OrderedPoly {
    let (lf, cf) = f.lead();
    let (lg, cg) = g.lead();
    let lcm = lf.lcm(lg);
    let mf = lcm.checked_div(lf).expect("lcm divisible by lead");
    let mg = lcm.checked_div(lg).expect("lcm divisible by lead");
    let a = f.to_poly(table).mul_monomial(&mf, &(Rat::one() / cf.clone()));
    let b = g.to_poly(table).mul_monomial(&mg, &(Rat::one() / cg.clone()));
    OrderedPoly::from_poly(&a.sub(&b), order)
}

fn reduce_full(
    f: &OrderedPoly,
    basis: &[OrderedPoly],
    table: &Arc<VarTable>,
    order: &MonomialOrder,
) -> OrderedPoly {
    let mut work = f.to_poly(table);
    let mut out = MultiPoly::zero(table);
    'outer: while !work.is_zero() {
        let wp = OrderedPoly::from_poly(&work, order);
        let (wm, wc) = wp.lead();
        for g in basis {
            let (gm, gc) = g.lead();
            if gm.divides(wm) {
                let q = wm.checked_div(gm).unwrap();
                let factor = wc / gc;
                let sub = g.to_poly(table).mul_monomial(&q, &factor);
                work = work.sub(&sub);
                continue 'outer;
            }
        }
        // irreducible leading term moves to the output
        out.add_term(wm.clone(), wc.clone());
        let mut single = MultiPoly::zero(table);
        single.add_term(wm.clone(), wc.clone());
        work = work.sub(&single);
    }
    OrderedPoly::from_poly(&out, order)
}

/// All monomials of exactly `deg` in the given variables.
fn monomials_of_degree(vars: &[usize], deg: i64, nvars: usize) -> Vec<Mono> {
    let mut out = Vec::new();
    let mut current = Mono::one(nvars);
    fn rec(vars: &[usize], pos: usize, left: i64, current: &mut Mono, out: &mut Vec<Mono>) {
        if pos == vars.len() - 1 {
            current.0[vars[pos]] = left as i32;
            out.push(current.clone());
            current.0[vars[pos]] = 0;
            return;
        }
        for e in 0..=left {
            current.0[vars[pos]] = e as i32;
            rec(vars, pos + 1, left - e, current, out);
        }
        current.0[vars[pos]] = 0;
    }
    if !vars.is_empty() {
        rec(vars, 0, deg, &mut current, &mut out);
    }
    out
}

impl ReducedBasis {
    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    pub fn ring_vars(&self) -> &[usize] {
        &self.ring_vars
    }

    pub fn elements(&self) -> Vec<MultiPoly> {
        self.elems.iter().map(|g| g.to_poly(&self.table)).collect()
    }

    pub fn leading_monomials(&self) -> Vec<Mono> {
        self.elems.iter().map(|g| g.lead().0.clone()).collect()
    }

    /// Unique remainder modulo the basis; linear and idempotent.
    pub fn normal_form(&self, p: &MultiPoly) -> Result<MultiPoly> {
        for v in p.vars_used() {
            if !self.ring_vars.contains(&v) && !self.table.tag(v).is_novikov() {
                return Err(Error::Domain(format!(
                    "variable {} is not part of this quotient ring",
                    self.table.tag(v)
                )));
            }
        }
        if p.terms().any(|(m, _)| m.has_negative()) {
            return Err(Error::Domain("normal form input must be polynomial".into()));
        }
        Ok(reduce_full(
            &OrderedPoly::from_poly(&p.truncate(&self.trunc), &self.order),
            &self.elems,
            &self.table,
            &self.order,
        )
        .to_poly(&self.table))
    }

    pub fn reduces_to_zero(&self, p: &MultiPoly) -> bool {
        self.normal_form(p).map(|r| r.is_zero()).unwrap_or(false)
    }

    /// Monomials not divisible by any leading term, over the given subset of
    /// ring variables, considering only leads supported there. Fails when the
    /// staircase is infinite.
    fn staircase(&self, vars: &[usize]) -> Result<Vec<Mono>> {
        let leads: Vec<Mono> = self
            .leading_monomials()
            .into_iter()
            .filter(|m| {
                (0..self.table.len()).all(|v| m.exp(v) == 0 || vars.contains(&v))
            })
            .collect();
        // finiteness: every variable needs a pure-power leading term
        let mut bounds = Vec::with_capacity(vars.len());
        for &v in vars {
            let bound = leads
                .iter()
                .filter(|m| m.exp(v) > 0 && vars.iter().all(|&w| w == v || m.exp(w) == 0))
                .map(|m| m.exp(v))
                .min();
            match bound {
                Some(b) => bounds.push(b),
                None => {
                    return Err(Error::Rank(format!(
                        "no pure power of {} among the leading terms: the staircase is \
                         infinite, the relation set is incomplete",
                        self.table.tag(v)
                    )))
                }
            }
        }
        let mut out = vec![Mono::one(self.table.len())];
        for (pos, &v) in vars.iter().enumerate() {
            let mut next = Vec::new();
            for m in &out {
                for e in 0..=bounds[pos] {
                    let mut cand = m.clone();
                    cand.0[v] = e;
                    if !leads.iter().any(|l| l.divides(&cand)) {
                        next.push(cand);
                    }
                }
            }
            out = next;
        }
        out.sort_by(|a, b| self.order.cmp(a, b));
        Ok(out)
    }

    /// Standard monomials in the non-Novikov ring variables (the Novikov
    /// scalars act as coefficients).
    pub fn standard_monomials(&self) -> Result<Vec<Mono>> {
        let main_vars: Vec<usize> = self
            .ring_vars
            .iter()
            .copied()
            .filter(|&v| !self.table.tag(v).is_novikov())
            .collect();
        self.staircase(&main_vars)
    }

    /// The full staircase over every ring variable, Novikov included; its
    /// cardinality is the dimension over the ground field.
    pub fn standard_monomials_full(&self) -> Result<Vec<Mono>> {
        self.staircase(&self.ring_vars.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::FlagShape;
    use crate::poly::{rat_int, MultiPoly};
    use crate::vars::VarTag;

    fn setup() -> (Arc<VarTable>, MonomialOrder) {
        let table = VarTable::new(&FlagShape::parse("1:2").unwrap());
        let order = MonomialOrder::block(&table);
        (table, order)
    }

    /// (1-P)^2 - Q with P standing in for the wedge generator of S_1.
    fn p1_relation(table: &Arc<VarTable>) -> MultiPoly {
        let p = MultiPoly::var(table, VarTag::WedgeS { level: 1, degree: 1 });
        let q = MultiPoly::var(table, VarTag::NovikovX { level: 1 });
        MultiPoly::one(table).sub(&p).pow(2).sub(&q)
    }

    #[test]
    fn univariate_quantum_relation() {
        let (table, order) = setup();
        let rel = p1_relation(&table);
        let basis =
            groebner(&[rel], &order, &Truncation::at(2), &Limits::default()).unwrap();
        let p = table.var(VarTag::WedgeS { level: 1, degree: 1 });
        // leading term is P^2
        let leads = basis.leading_monomials();
        assert!(leads.iter().any(|m| m.exp(p) == 2 && m.total_degree() == 2));
        let std = basis.standard_monomials().unwrap();
        assert_eq!(std.len(), 2); // {1, P}
        assert!(std.iter().any(|m| m.is_one()));
        assert!(std.iter().any(|m| m.exp(p) == 1 && m.total_degree() == 1));
    }

    #[test]
    fn normal_form_of_p_squared() {
        // nf(P^2) = 2P - 1 + Q, by expanding (1-P)^2 = Q
        let (table, order) = setup();
        let rel = p1_relation(&table);
        let basis =
            groebner(&[rel], &order, &Truncation::at(3), &Limits::default()).unwrap();
        let p = MultiPoly::var(&table, VarTag::WedgeS { level: 1, degree: 1 });
        let q = MultiPoly::var(&table, VarTag::NovikovX { level: 1 });
        let expected = p.scale(&rat_int(2)).sub(&MultiPoly::one(&table)).add(&q);
        assert_eq!(basis.normal_form(&p.mul(&p)).unwrap(), expected);
        // idempotence and zero
        assert_eq!(basis.normal_form(&expected).unwrap(), expected);
        assert!(basis.normal_form(&MultiPoly::zero(&table)).unwrap().is_zero());
    }

    #[test]
    fn single_linear_relation() {
        let (table, order) = setup();
        let p = MultiPoly::var(&table, VarTag::WedgeS { level: 1, degree: 1 });
        let rel = p.sub(&MultiPoly::one(&table)); // x - 1
        let basis = groebner(&[rel], &order, &Truncation::none(), &Limits::default()).unwrap();
        assert_eq!(basis.normal_form(&p.pow(3)).unwrap(), MultiPoly::one(&table));
        let std = basis.standard_monomials().unwrap();
        assert_eq!(std.len(), 1);
    }

    #[test]
    fn empty_relations_yield_identity_normal_form() {
        let (table, order) = setup();
        let basis = groebner_in(&[], &table, &order, &Truncation::none(), &Limits::default())
            .unwrap();
        // nothing reduces, but only ring variables are accepted; constants pass
        let c = MultiPoly::int(&table, 7);
        assert_eq!(basis.normal_form(&c).unwrap(), c);
    }

    #[test]
    fn incomplete_relations_give_rank_error() {
        let table = VarTable::new(&FlagShape::parse("1,2:3").unwrap());
        let order = MonomialOrder::block(&table);
        let x = MultiPoly::var(&table, VarTag::WedgeS { level: 1, degree: 1 });
        let y = MultiPoly::var(&table, VarTag::WedgeS { level: 2, degree: 1 });
        // x*y alone leaves both variables unbounded
        let basis = groebner(&[x.mul(&y)], &order, &Truncation::none(), &Limits::default())
            .unwrap();
        assert!(matches!(basis.standard_monomials(), Err(Error::Rank(_))));
    }
}
