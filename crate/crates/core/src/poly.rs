//! Sparse exact-rational multivariate Laurent polynomials.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num::complex::Complex64;
use num::{BigRational, One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::vars::{Mono, VarTable, VarTag};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Discard-above-cap policy for total Novikov degree.
///
/// Arithmetic with a finite cap realizes the Novikov-truncated coefficient
/// ring: any monomial whose Q-degree exceeds the cap is dropped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub cap: Option<u32>,
}

impl Truncation {
    pub fn none() -> Truncation {
        Truncation { cap: None }
    }

    pub fn at(cap: u32) -> Truncation {
        Truncation { cap: Some(cap) }
    }

    pub fn keeps(&self, table: &VarTable, mono: &Mono) -> bool {
        match self.cap {
            None => true,
            Some(cap) => mono.novikov_degree(table) <= cap as i64,
        }
    }
}

/// Sparse polynomial: exponent vector -> nonzero rational coefficient.
#[derive(Clone)]
pub struct MultiPoly {
    table: Arc<VarTable>,
    terms: BTreeMap<Mono, Rat>,
}

impl MultiPoly {
    pub fn zero(table: &Arc<VarTable>) -> MultiPoly {
        MultiPoly { table: table.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(table: &Arc<VarTable>, c: Rat) -> MultiPoly {
        let mut p = MultiPoly::zero(table);
        if !c.is_zero() {
            p.terms.insert(Mono::one(table.len()), c);
        }
        p
    }

    pub fn one(table: &Arc<VarTable>) -> MultiPoly {
        MultiPoly::constant(table, Rat::one())
    }

    pub fn int(table: &Arc<VarTable>, n: i64) -> MultiPoly {
        MultiPoly::constant(table, rat_int(n))
    }

    /// Single variable with the given exponent. Negative exponents are only
    /// legal on Laurent variables.
    pub fn var_pow(table: &Arc<VarTable>, tag: VarTag, exp: i32) -> Result<MultiPoly> {
        if exp < 0 && !tag.is_laurent() {
            return Err(Error::Domain(format!("negative exponent on non-Laurent variable {tag}")));
        }
        let v = table.var(tag);
        let mut p = MultiPoly::zero(table);
        if exp == 0 {
            return Ok(MultiPoly::one(table));
        }
        p.terms.insert(Mono::var(table.len(), v, exp), Rat::one());
        Ok(p)
    }

    pub fn var(table: &Arc<VarTable>, tag: VarTag) -> MultiPoly {
        MultiPoly::var_pow(table, tag, 1).expect("exponent 1 is always legal")
    }

    /// λ^i_{j,k}; reversed index pairs are rewritten to the inverse of the
    /// canonical (lo < hi) parameter, so λ^i_{j,k}·λ^i_{k,j} = 1 holds by
    /// construction.
    pub fn root_param(table: &Arc<VarTable>, level: u8, j: u8, k: u8) -> Result<MultiPoly> {
        if j == k {
            return Err(Error::Domain(format!("root parameter lam{level}_{j}_{k} needs j != k")));
        }
        let (lo, hi, exp) = if j < k { (j, k, 1) } else { (k, j, -1) };
        MultiPoly::var_pow(table, VarTag::RootParam { level, lo, hi }, exp)
    }

    pub fn from_term(table: &Arc<VarTable>, mono: Mono, coeff: Rat) -> MultiPoly {
        let mut p = MultiPoly::zero(table);
        if !coeff.is_zero() {
            p.terms.insert(mono, coeff);
        }
        p
    }

    pub fn table(&self) -> &Arc<VarTable> {
        &self.table
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &Rat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, mono: &Mono) -> Rat {
        self.terms.get(mono).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&Mono::one(self.table.len()))
    }

    /// The polynomial is a single term `c * mono`; returns it if so.
    pub fn as_monomial(&self) -> Option<(Rat, Mono)> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next().unwrap();
            Some((c.clone(), m.clone()))
        } else {
            None
        }
    }

    pub fn add_term(&mut self, mono: Mono, coeff: Rat) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let sum = e.get().clone() + coeff;
                if sum.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        for (m, c) in other.terms.iter() {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.table);
        }
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    pub fn mul_monomial(&self, mono: &Mono, coeff: &Rat) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.table);
        if coeff.is_zero() {
            return out;
        }
        for (m, c) in self.terms.iter() {
            out.terms.insert(m.mul(mono), c * coeff);
        }
        out
    }

    pub fn mul_trunc(&self, other: &MultiPoly, trunc: &Truncation) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.table);
        let (small, big) =
            if self.terms.len() <= other.terms.len() { (self, other) } else { (other, self) };
        for (ms, cs) in small.terms.iter() {
            for (mb, cb) in big.terms.iter() {
                let m = ms.mul(mb);
                if trunc.keeps(&self.table, &m) {
                    out.add_term(m, cs * cb);
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.mul_trunc(other, &Truncation::none())
    }

    pub fn pow_trunc(&self, exp: u32, trunc: &Truncation) -> MultiPoly {
        let mut out = MultiPoly::one(&self.table);
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul_trunc(&base, trunc);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_trunc(&base, trunc);
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> MultiPoly {
        self.pow_trunc(exp, &Truncation::none())
    }

    pub fn truncate(&self, trunc: &Truncation) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.table);
        for (m, c) in self.terms.iter() {
            if trunc.keeps(&self.table, m) {
                out.terms.insert(m.clone(), c.clone());
            }
        }
        out
    }

    /// Exact division by another polynomial; `None` when not divisible.
    /// Used for clearing documented unit factors like (1 - Q_i).
    pub fn div_exact(&self, divisor: &MultiPoly) -> Option<MultiPoly> {
        if divisor.is_zero() {
            return None;
        }
        // divide under plain lex on exponent vectors (BTreeMap max key)
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(&self.table);
        let (dm, dc) = rem_lead(divisor)?;
        while !rem.is_zero() {
            let (rm, rc) = rem_lead(&rem)?;
            let qm = rm.checked_div(&dm).or_else(|| {
                // Laurent-safe quotient: allow negative entries on Laurent vars
                let diff = rm.mul(&dm.inv());
                let legal = diff
                    .0
                    .iter()
                    .enumerate()
                    .all(|(v, &e)| e >= 0 || self.table.tag(v).is_laurent());
                legal.then_some(diff)
            })?;
            let qc = rc / dc.clone();
            quot.add_term(qm.clone(), qc.clone());
            rem = rem.sub(&divisor.mul_monomial(&qm, &qc));
        }
        Some(quot)
    }

    /// Substitute whole polynomials for variables. Every substituted variable
    /// must occur with non-negative exponents.
    pub fn substitute(&self, map: &BTreeMap<usize, MultiPoly>) -> Result<MultiPoly> {
        let mut out = MultiPoly::zero(&self.table);
        for (m, c) in self.terms.iter() {
            let mut term = MultiPoly::constant(&self.table, c.clone());
            let mut rest = m.clone();
            for (&v, rep) in map.iter() {
                let e = rest.0[v];
                if e < 0 {
                    return Err(Error::Domain(format!(
                        "cannot substitute polynomial into negative power of {}",
                        self.table.tag(v)
                    )));
                }
                if e > 0 {
                    rest.0[v] = 0;
                    term = term.mul(&rep.pow(e as u32));
                }
            }
            out = out.add(&term.mul_monomial(&rest, &Rat::one()));
        }
        Ok(out)
    }

    /// Substitute an invertible monomial `c * mono` for a variable; legal for
    /// arbitrary (also negative) exponents of that variable.
    pub fn substitute_monomial(&self, v: usize, coeff: &Rat, mono: &Mono) -> Result<MultiPoly> {
        if coeff.is_zero() {
            return Err(Error::Domain("monomial substitution needs a unit".into()));
        }
        let mut out = MultiPoly::zero(&self.table);
        for (m, c) in self.terms.iter() {
            let e = m.exp(v);
            let mut nm = m.clone();
            nm.0[v] = 0;
            let mut nc = c.clone();
            if e != 0 {
                let mut powm = Mono::one(self.table.len());
                for (idx, &me) in mono.0.iter().enumerate() {
                    powm.0[idx] = me * e;
                }
                nm = nm.mul(&powm);
                nc *= pow_rat(coeff, e);
            }
            out.add_term(nm, nc);
        }
        Ok(out)
    }

    /// Set every listed variable to a rational constant.
    pub fn specialize_vars(&self, assign: &BTreeMap<usize, Rat>) -> Result<MultiPoly> {
        let mut out = self.clone();
        let trivial = Mono::one(self.table.len());
        for (&v, val) in assign.iter() {
            if val.is_zero() {
                if out.terms.keys().any(|m| m.exp(v) < 0) {
                    return Err(Error::Domain(format!(
                        "zero value for inverted variable {}",
                        self.table.tag(v)
                    )));
                }
                let mut dropped = MultiPoly::zero(&self.table);
                for (m, c) in out.terms.iter() {
                    if m.exp(v) == 0 {
                        dropped.terms.insert(m.clone(), c.clone());
                    }
                }
                out = dropped;
            } else {
                out = out.substitute_monomial(v, val, &trivial)?;
            }
        }
        Ok(out)
    }

    /// Exponent of `var` ranges over the returned keys; values are the
    /// coefficient polynomials. Splitting by the y-variable is the main use.
    pub fn split_by_var(&self, v: usize) -> BTreeMap<i32, MultiPoly> {
        let mut out: BTreeMap<i32, MultiPoly> = BTreeMap::new();
        for (m, c) in self.terms.iter() {
            let e = m.exp(v);
            let mut nm = m.clone();
            nm.0[v] = 0;
            out.entry(e).or_insert_with(|| MultiPoly::zero(&self.table)).add_term(nm, c.clone());
        }
        out
    }

    pub fn max_degree_of(&self, v: usize) -> i32 {
        self.terms.keys().map(|m| m.exp(v)).max().unwrap_or(0)
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|m| m.exp(v) != 0)
    }

    pub fn vars_used(&self) -> Vec<usize> {
        let mut used = vec![false; self.table.len()];
        for m in self.terms.keys() {
            for (v, &e) in m.0.iter().enumerate() {
                if e != 0 {
                    used[v] = true;
                }
            }
        }
        used.iter().enumerate().filter(|(_, &u)| u).map(|(v, _)| v).collect()
    }

    /// Evaluate at complex values; every variable that occurs must be
    /// assigned, and Laurent powers require a nonzero value.
    pub fn eval_complex(&self, assign: &BTreeMap<usize, Complex64>) -> Result<Complex64> {
        let mut total = Complex64::new(0.0, 0.0);
        for (m, c) in self.terms.iter() {
            let mut term = Complex64::new(
                c.numer().to_f64().ok_or_else(|| Error::Internal("coefficient overflow".into()))?,
                0.0,
            ) / c
                .denom()
                .to_f64()
                .ok_or_else(|| Error::Internal("coefficient overflow".into()))?;
            for (v, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let x = assign.get(&v).ok_or_else(|| {
                    Error::Domain(format!("unassigned variable {}", self.table.tag(v)))
                })?;
                if e < 0 && x.norm_sqr() == 0.0 {
                    return Err(Error::Degeneracy(format!(
                        "zero value for inverted variable {}",
                        self.table.tag(v)
                    )));
                }
                term *= x.powi(e);
            }
            total += term;
        }
        Ok(total)
    }

    /// Deterministic human-readable form, sorted by exponent vector.
    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (m, c) in self.terms.iter().rev() {
            let cs = if c.is_one() && !m.is_one() {
                String::new()
            } else if (-c.clone()).is_one() && !m.is_one() {
                "-".to_string()
            } else {
                format!("{c}")
            };
            let ms = if m.is_one() { String::new() } else { m.display(&self.table) };
            let term = match (cs.is_empty() || cs == "-", ms.is_empty()) {
                (_, true) => format!("{c}"),
                (true, false) => format!("{cs}{ms}"),
                (false, false) => format!("{cs}*{ms}"),
            };
            parts.push(term);
        }
        let mut out = String::new();
        for (k, t) in parts.iter().enumerate() {
            if k == 0 {
                out.push_str(t);
            } else if let Some(stripped) = t.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(stripped);
            } else {
                out.push_str(" + ");
                out.push_str(t);
            }
        }
        out
    }
}

fn rem_lead(p: &MultiPoly) -> Option<(Mono, Rat)> {
    p.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone()))
}

pub fn pow_rat(c: &Rat, e: i32) -> Rat {
    if e >= 0 {
        num::pow::pow(c.clone(), e as usize)
    } else {
        num::pow::pow(c.clone(), (-e) as usize).recip()
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for MultiPoly {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::FlagShape;

    fn table() -> Arc<VarTable> {
        VarTable::new(&FlagShape::parse("1,2:3").unwrap())
    }

    #[test]
    fn difference_of_squares() {
        let t = table();
        let p = MultiPoly::var(&t, VarTag::ChernRoot { level: 1, index: 1 });
        let one = MultiPoly::one(&t);
        let prod = one.sub(&p).mul(&one.add(&p));
        assert_eq!(prod, one.sub(&p.mul(&p)));
    }

    #[test]
    fn truncation_kills_high_novikov_powers() {
        let t = table();
        let q = MultiPoly::var(&t, VarTag::NovikovX { level: 1 });
        let q3 = q.pow(3);
        let trunc = Truncation::at(3);
        assert!(q3.mul_trunc(&q, &trunc).is_zero());
        assert_eq!(q3.mul_trunc(&MultiPoly::one(&t), &trunc), q3);
    }

    #[test]
    fn root_params_invert() {
        let t = table();
        let a = MultiPoly::root_param(&t, 2, 1, 2).unwrap();
        let b = MultiPoly::root_param(&t, 2, 2, 1).unwrap();
        assert_eq!(a.mul(&b), MultiPoly::one(&t));
    }

    #[test]
    fn negative_exponent_rejected_on_novikov() {
        let t = table();
        assert!(MultiPoly::var_pow(&t, VarTag::NovikovX { level: 1 }, -1).is_err());
        assert!(MultiPoly::var_pow(&t, VarTag::ChernRoot { level: 1, index: 1 }, -1).is_ok());
    }

    #[test]
    fn exact_division_by_unit_factor() {
        let t = table();
        let one = MultiPoly::one(&t);
        let q = MultiPoly::var(&t, VarTag::NovikovX { level: 1 });
        let s = MultiPoly::var(&t, VarTag::WedgeS { level: 1, degree: 1 });
        let f = one.sub(&q);
        let p = f.mul(&s.add(&one));
        assert_eq!(p.div_exact(&f).unwrap(), s.add(&one));
        assert!(s.div_exact(&f).is_none());
    }
}
