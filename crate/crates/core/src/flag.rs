//! Combinatorics of the partial flag variety and its abelianization:
//! fixed points as chains of injections, Weyl action, localization
//! substitutions, and the symmetrization map down to the flag side.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{MultiPoly, Rat};
use crate::symfun;
use crate::vars::{Mono, VarTable, VarTag};

/// Dimension vector v_1 < ... < v_n < N.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct FlagShape {
    dims: Vec<usize>,
    ambient: usize,
}

impl FlagShape {
    pub fn new(dims: Vec<usize>, ambient: usize) -> Result<FlagShape> {
        if dims.is_empty() {
            return Err(Error::Domain("shape needs at least one subspace dimension".into()));
        }
        if dims[0] == 0 || !dims.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain(format!(
                "dimensions must be strictly increasing and positive, got {dims:?}"
            )));
        }
        if *dims.last().unwrap() >= ambient {
            return Err(Error::Domain(format!(
                "ambient dimension {ambient} must exceed v_n = {}",
                dims.last().unwrap()
            )));
        }
        if ambient > 30 {
            return Err(Error::Domain("ambient dimensions above 30 are not supported".into()));
        }
        Ok(FlagShape { dims, ambient })
    }

    /// Parse the CLI syntax `v1,v2,...,vn:N`.
    pub fn parse(s: &str) -> Result<FlagShape> {
        let (dims_part, n_part) = s
            .split_once(':')
            .ok_or_else(|| Error::Domain(format!("shape `{s}` is not of the form v1,..,vn:N")))?;
        let dims = dims_part
            .split(',')
            .map(|d| d.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Domain(format!("bad dimension in `{s}`: {e}")))?;
        let ambient = n_part
            .trim()
            .parse::<usize>()
            .map_err(|e| Error::Domain(format!("bad ambient dimension in `{s}`: {e}")))?;
        FlagShape::new(dims, ambient)
    }

    pub fn levels(&self) -> usize {
        self.dims.len()
    }

    /// v_i with the conventions v_0 = 0 and v_{n+1} = N.
    pub fn v(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else if i <= self.dims.len() {
            self.dims[i - 1]
        } else if i == self.dims.len() + 1 {
            self.ambient
        } else {
            panic!("level {i} out of range for {self}")
        }
    }

    pub fn gap(&self, i: usize) -> usize {
        self.v(i + 1) - self.v(i)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of torus-fixed points of the flag variety itself
    /// (= rank of its K-ring): the multinomial over the gaps.
    pub fn fixed_point_count_x(&self) -> usize {
        let mut count = factorial(self.ambient);
        for i in 0..=self.levels() {
            count /= factorial(self.gap(i));
        }
        count
    }

    /// Number of torus-fixed points of the abelianization:
    /// one per tuple of injections, ∏ v_{i+1}!/(v_{i+1}-v_i)!.
    pub fn fixed_point_count_y(&self) -> usize {
        (1..=self.levels())
            .map(|i| factorial(self.v(i + 1)) / factorial(self.gap(i)))
            .product()
    }

    pub fn weyl_order(&self) -> usize {
        self.dims.iter().map(|&v| factorial(v)).product()
    }
}

impl fmt::Display for FlagShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Fl({};{})",
            self.dims.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","),
            self.ambient
        )
    }
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// A fixed point of the abelianization: one injection per level,
/// f_i : {1..v_i} -> {1..v_{i+1}} (values 1-based).
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
pub struct FixedPoint {
    maps: Vec<Vec<usize>>,
}

impl FixedPoint {
    pub fn new(shape: &FlagShape, maps: Vec<Vec<usize>>) -> Result<FixedPoint> {
        if maps.len() != shape.levels() {
            return Err(Error::Domain("one injection per level required".into()));
        }
        for (i, f) in maps.iter().enumerate() {
            let level = i + 1;
            if f.len() != shape.v(level) {
                return Err(Error::Domain(format!("injection at level {level} has wrong arity")));
            }
            if f.iter().any(|&x| x < 1 || x > shape.v(level + 1)) {
                return Err(Error::Domain(format!("injection value out of range at level {level}")));
            }
            if !f.iter().all_unique() {
                return Err(Error::Domain(format!("map at level {level} is not injective")));
            }
        }
        Ok(FixedPoint { maps })
    }

    /// The distinguished point with f_i(k) = k at every level.
    pub fn distinguished(shape: &FlagShape) -> FixedPoint {
        FixedPoint { maps: (1..=shape.levels()).map(|i| (1..=shape.v(i)).collect()).collect() }
    }

    pub fn is_distinguished(&self) -> bool {
        self.maps.iter().all(|f| f.iter().enumerate().all(|(k, &x)| x == k + 1))
    }

    pub fn map(&self, level: usize, j: usize) -> usize {
        self.maps[level - 1][j - 1]
    }

    /// Composite injection f_n ∘ ... ∘ f_i into {1..N}.
    pub fn composite(&self, level: usize) -> Vec<usize> {
        let n = self.maps.len();
        (1..=self.maps[level - 1].len())
            .map(|j| {
                let mut x = j;
                for i in level..=n {
                    x = self.map(i, x);
                }
                x
            })
            .collect()
    }

    /// Rays of the maximal secondary-fan cone this point corresponds to:
    /// p^i_j - p^{i+1}_{f_i(j)}, with p^{n+1} = 0.
    pub fn cone(&self, shape: &FlagShape) -> ConeDescriptor {
        let mut rays = Vec::new();
        for i in 1..=shape.levels() {
            for j in 1..=shape.v(i) {
                rays.push(ConeRay { level: i, from: j, to: self.map(i, j) });
            }
        }
        ConeDescriptor { rays }
    }

    /// Weyl-orbit invariant: the chain of sorted composite image sets.
    pub fn orbit_chain(&self) -> Vec<Vec<usize>> {
        (1..=self.maps.len())
            .map(|i| {
                let mut img = self.composite(i);
                img.sort_unstable();
                img
            })
            .collect()
    }

    /// Canonical orbit representative: the order-preserving injections
    /// realizing the orbit chain.
    pub fn canonical_rep(&self, shape: &FlagShape) -> FixedPoint {
        let chain = self.orbit_chain();
        let mut maps = Vec::new();
        for i in 1..=shape.levels() {
            let target: Vec<usize> = if i == shape.levels() {
                (1..=shape.ambient()).collect()
            } else {
                chain[i].clone()
            };
            let f = chain[i - 1]
                .iter()
                .map(|x| target.iter().position(|y| y == x).unwrap() + 1)
                .collect();
            maps.push(f);
        }
        FixedPoint { maps }
    }

    /// Classical localization: P^i_j restricts to Λ_{F_i(j)}.
    pub fn classical_assignment(&self, table: &Arc<VarTable>) -> BTreeMap<usize, (Rat, Mono)> {
        let shape = table.shape().clone();
        let mut out = BTreeMap::new();
        for i in 1..=shape.levels() {
            let comp = self.composite(i);
            for j in 1..=shape.v(i) {
                let p = table.var(VarTag::ChernRoot { level: i as u8, index: j as u8 });
                let lam = table.var(VarTag::EquivParam { index: comp[j - 1] as u8 });
                out.insert(p, (Rat::from_integer(1.into()), Mono::var(table.len(), lam, 1)));
            }
        }
        out
    }

    /// Large-torus localization: P^i_j restricts to the product of the
    /// Λ^s parameters collected along the chain of injections.
    pub fn tilde_assignment(&self, table: &Arc<VarTable>) -> BTreeMap<usize, (Rat, Mono)> {
        let shape = table.shape().clone();
        let n = shape.levels();
        let mut out = BTreeMap::new();
        for i in 1..=n {
            for j in 1..=shape.v(i) {
                let p = table.var(VarTag::ChernRoot { level: i as u8, index: j as u8 });
                let mut mono = Mono::one(table.len());
                let mut x = j;
                for s in i..=n {
                    x = self.map(s, x);
                    let v = table.var(VarTag::TildeParam { level: s as u8, index: x as u8 });
                    mono.0[v] += 1;
                }
                out.insert(p, (Rat::from_integer(1.into()), mono));
            }
        }
        out
    }

    /// Chern roots (as Λ-indices) of S_{level} and of the quotient
    /// R_{level} = S_{level+1}/S_{level} at this point.
    pub fn bundle_roots(&self, shape: &FlagShape, level: usize) -> (Vec<usize>, Vec<usize>) {
        let n = shape.levels();
        let sub: Vec<usize> = if level == 0 { Vec::new() } else { self.composite(level) };
        let sup: Vec<usize> =
            if level + 1 > n { (1..=shape.ambient()).collect() } else { self.composite(level + 1) };
        let rest = sup.iter().copied().filter(|x| !sub.contains(x)).collect();
        (sub, rest)
    }
}

/// Ray p^level_from - p^{level+1}_to of the secondary fan (to is ignored
/// at the top level where p^{n+1} = 0).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeRay {
    pub level: usize,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeDescriptor {
    pub rays: Vec<ConeRay>,
}

/// Enumerate all fixed points (tuples of injections).
pub fn enumerate_fixed_points(shape: &FlagShape) -> Vec<FixedPoint> {
    let n = shape.levels();
    let mut points: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for i in 1..=n {
        let injections: Vec<Vec<usize>> =
            (1..=shape.v(i + 1)).permutations(shape.v(i)).collect();
        points = points
            .into_iter()
            .cartesian_product(injections)
            .map(|(mut maps, f)| {
                maps.push(f);
                maps
            })
            .collect();
    }
    points.into_iter().map(|maps| FixedPoint { maps }).collect()
}

/// One permutation per level, acting on that level's indices (0-based).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct WeylElement {
    perms: Vec<Vec<usize>>,
}

impl WeylElement {
    pub fn identity(shape: &FlagShape) -> WeylElement {
        WeylElement { perms: (1..=shape.levels()).map(|i| (0..shape.v(i)).collect()).collect() }
    }

    pub fn new(shape: &FlagShape, perms: Vec<Vec<usize>>) -> Result<WeylElement> {
        if perms.len() != shape.levels() {
            return Err(Error::Domain("one permutation per level required".into()));
        }
        for (i, p) in perms.iter().enumerate() {
            let v = shape.v(i + 1);
            if p.len() != v || !p.iter().all_unique() || p.iter().any(|&x| x >= v) {
                return Err(Error::Domain(format!("invalid permutation at level {}", i + 1)));
            }
        }
        Ok(WeylElement { perms })
    }

    /// σ_level(index), 1-based.
    pub fn apply(&self, level: usize, index: usize) -> usize {
        self.perms[level - 1][index - 1] + 1
    }

    pub fn compose(&self, other: &WeylElement) -> WeylElement {
        let perms = self
            .perms
            .iter()
            .zip(other.perms.iter())
            .map(|(a, b)| b.iter().map(|&x| a[x]).collect())
            .collect();
        WeylElement { perms }
    }
}

pub fn enumerate_weyl(shape: &FlagShape) -> Vec<WeylElement> {
    let mut elems: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for i in 1..=shape.levels() {
        let perms: Vec<Vec<usize>> = (0..shape.v(i)).permutations(shape.v(i)).collect();
        elems = elems
            .into_iter()
            .cartesian_product(perms)
            .map(|(mut ps, p)| {
                ps.push(p);
                ps
            })
            .collect();
    }
    elems.into_iter().map(|perms| WeylElement { perms }).collect()
}

/// Permute Chern roots, abelian Novikov variables, and root parameters.
pub fn weyl_act(w: &WeylElement, p: &MultiPoly) -> MultiPoly {
    let table = p.table().clone();
    let mut out = MultiPoly::zero(&table);
    for (m, c) in p.terms() {
        let mut nm = Mono::one(table.len());
        for (v, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            match table.tag(v) {
                VarTag::ChernRoot { level, index } => {
                    let j = w.apply(level as usize, index as usize) as u8;
                    nm.0[table.var(VarTag::ChernRoot { level, index: j })] += e;
                }
                VarTag::NovikovY { level, index } => {
                    let j = w.apply(level as usize, index as usize) as u8;
                    nm.0[table.var(VarTag::NovikovY { level, index: j })] += e;
                }
                VarTag::RootParam { level, lo, hi } => {
                    let a = w.apply(level as usize, lo as usize) as u8;
                    let b = w.apply(level as usize, hi as usize) as u8;
                    if a < b {
                        nm.0[table.var(VarTag::RootParam { level, lo: a, hi: b })] += e;
                    } else {
                        nm.0[table.var(VarTag::RootParam { level, lo: b, hi: a })] -= e;
                    }
                }
                _ => nm.0[v] += e,
            }
        }
        out.add_term(nm, c.clone());
    }
    out
}

/// Group average |W|^{-1} Σ_w w·p.
pub fn weyl_symmetrize(p: &MultiPoly) -> MultiPoly {
    let shape = p.table().shape().clone();
    let elems = enumerate_weyl(&shape);
    let mut total = MultiPoly::zero(p.table());
    for w in &elems {
        total = total.add(&weyl_act(w, p));
    }
    total.scale(&Rat::new(1.into(), (elems.len() as i64).into()))
}

pub fn is_weyl_invariant(p: &MultiPoly) -> bool {
    let shape = p.table().shape().clone();
    // transpositions of adjacent indices per level generate the group
    for i in 1..=shape.levels() {
        for j in 1..shape.v(i) {
            let mut perms: Vec<Vec<usize>> = (1..=shape.levels()).map(|k| (0..shape.v(k)).collect()).collect();
            perms[i - 1].swap(j - 1, j);
            let w = WeylElement { perms };
            if &weyl_act(&w, p) != p {
                return false;
            }
        }
    }
    true
}

/// Rewrite a W-invariant polynomial on the abelianization as a polynomial in
/// the wedge generators of the flag side: e_ℓ(P^i) becomes ∧^ℓ S_i and
/// Q^i_j becomes Q_i.
pub fn phi_map(p: &MultiPoly) -> Result<MultiPoly> {
    let table = p.table().clone();
    let shape = table.shape().clone();
    for v in p.vars_used() {
        match table.tag(v) {
            VarTag::RootParam { .. } | VarTag::TildeParam { .. } => {
                return Err(Error::Domain(format!(
                    "phi is not defined on {}",
                    table.tag(v)
                )));
            }
            VarTag::ChernRoot { .. } => {
                if p.terms().any(|(m, _)| m.exp(v) < 0) {
                    return Err(Error::Domain(
                        "phi needs polynomial (non-Laurent) dependence on Chern roots".into(),
                    ));
                }
            }
            _ => {}
        }
    }
    if !is_weyl_invariant(p) {
        return Err(Error::Domain("phi is only defined on W-invariant classes".into()));
    }
    let mut out = p.clone();
    for i in 1..=shape.levels() {
        out = symfun::rewrite_level_in_wedges(&out, i)?;
    }
    // Novikov map Q^i_j -> Q_i
    let mut subst = BTreeMap::new();
    for i in 1..=shape.levels() {
        for j in 1..=shape.v(i) {
            let from = table.var(VarTag::NovikovY { level: i as u8, index: j as u8 });
            let to = table.var(VarTag::NovikovX { level: i as u8 });
            subst.insert(from, (Rat::from_integer(1.into()), Mono::var(table.len(), to, 1)));
        }
    }
    for (v, (c, m)) in subst {
        out = out.substitute_monomial(v, &c, &m)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;

    #[test]
    fn shape_parsing_and_counts() {
        let s = FlagShape::parse("1,2:3").unwrap();
        assert_eq!(s.levels(), 2);
        assert_eq!((s.v(0), s.v(1), s.v(2), s.v(3)), (0, 1, 2, 3));
        assert_eq!(s.fixed_point_count_x(), 6);
        assert_eq!(s.fixed_point_count_y(), 12);
        assert_eq!(s.weyl_order(), 2);
        assert!(FlagShape::parse("3,2:4").is_err());
        assert!(FlagShape::parse("2:2").is_err());
    }

    #[test]
    fn fixed_point_enumeration_counts() {
        for (spec, count) in
            [("1:2", 2), ("1,2:3", 12), ("2:4", 12), ("1,3:4", 72), ("1,2,3:4", 288)]
        {
            let shape = FlagShape::parse(spec).unwrap();
            let pts = enumerate_fixed_points(&shape);
            assert_eq!(pts.len(), count, "shape {spec}");
            assert_eq!(pts.len(), shape.fixed_point_count_y(), "shape {spec}");
            assert_eq!(pts.iter().filter(|p| p.is_distinguished()).count(), 1);
        }
    }

    #[test]
    fn orbit_chains_partition_into_x_count() {
        for spec in ["1:2", "2:4", "1,2:3", "1,3:4", "1,2,3:4"] {
            let shape = FlagShape::parse(spec).unwrap();
            let pts = enumerate_fixed_points(&shape);
            let orbits: std::collections::BTreeSet<_> =
                pts.iter().map(|p| p.orbit_chain()).collect();
            assert_eq!(orbits.len(), shape.fixed_point_count_x(), "shape {spec}");
            for p in &pts {
                let rep = p.canonical_rep(&shape);
                assert_eq!(rep.orbit_chain(), p.orbit_chain());
            }
        }
    }

    #[test]
    fn classical_assignment_composes_injections() {
        let shape = FlagShape::parse("1,2:3").unwrap();
        let table = VarTable::new(&shape);
        let fp = FixedPoint::new(&shape, vec![vec![2], vec![1, 2]]).unwrap();
        let assign = fp.classical_assignment(&table);
        let p11 = table.var(VarTag::ChernRoot { level: 1, index: 1 });
        let lam2 = table.var(VarTag::EquivParam { index: 2 });
        assert_eq!(assign[&p11].1, Mono::var(table.len(), lam2, 1));
    }

    #[test]
    fn localization_values_distinct_per_level() {
        for spec in ["1,2:3", "2:4", "1,3:4"] {
            let shape = FlagShape::parse(spec).unwrap();
            for fp in enumerate_fixed_points(&shape) {
                for i in 1..=shape.levels() {
                    assert!(fp.composite(i).iter().all_unique());
                }
            }
        }
    }

    #[test]
    fn weyl_act_on_roots_and_params() {
        let shape = FlagShape::parse("2:3").unwrap();
        let table = VarTable::new(&shape);
        let swap = WeylElement::new(&shape, vec![vec![1, 0]]).unwrap();
        let p1 = MultiPoly::var(&table, VarTag::ChernRoot { level: 1, index: 1 });
        let p2 = MultiPoly::var(&table, VarTag::ChernRoot { level: 1, index: 2 });
        assert_eq!(weyl_act(&swap, &p1), p2);
        let e1 = p1.add(&p2);
        assert_eq!(weyl_act(&swap, &e1), e1);
        let lam12 = MultiPoly::root_param(&table, 1, 1, 2).unwrap();
        let lam21 = MultiPoly::root_param(&table, 1, 2, 1).unwrap();
        assert_eq!(weyl_act(&swap, &lam12), lam21);
        assert_eq!(lam12.mul(&lam21), MultiPoly::one(&table));
    }

    #[test]
    fn symmetrize_projects() {
        let shape = FlagShape::parse("2:3").unwrap();
        let table = VarTable::new(&shape);
        let p1 = MultiPoly::var(&table, VarTag::ChernRoot { level: 1, index: 1 });
        let p2 = MultiPoly::var(&table, VarTag::ChernRoot { level: 1, index: 2 });
        let sym = weyl_symmetrize(&p1);
        assert_eq!(sym, p1.add(&p2).scale(&crate::poly::rat(1, 2)));
        assert_eq!(weyl_symmetrize(&sym), sym);
        for w in enumerate_weyl(&shape) {
            assert_eq!(weyl_symmetrize(&weyl_act(&w, &p1)), sym);
        }
    }

    #[test]
    fn phi_rewrites_elementaries_and_novikov() {
        let shape = FlagShape::parse("1,2:3").unwrap();
        let table = VarTable::new(&shape);
        let p21 = MultiPoly::var(&table, VarTag::ChernRoot { level: 2, index: 1 });
        let p22 = MultiPoly::var(&table, VarTag::ChernRoot { level: 2, index: 2 });
        let e2 = p21.mul(&p22);
        assert_eq!(
            phi_map(&e2).unwrap(),
            MultiPoly::var(&table, VarTag::WedgeS { level: 2, degree: 2 })
        );
        let q = MultiPoly::var(&table, VarTag::NovikovY { level: 1, index: 1 });
        assert_eq!(phi_map(&q).unwrap(), MultiPoly::var(&table, VarTag::NovikovX { level: 1 }));
        let q21 = MultiPoly::var(&table, VarTag::NovikovY { level: 2, index: 1 });
        let q22 = MultiPoly::var(&table, VarTag::NovikovY { level: 2, index: 2 });
        assert_eq!(
            phi_map(&q21.add(&q22)).unwrap(),
            MultiPoly::var(&table, VarTag::NovikovX { level: 2 }).scale(&rat_int(2))
        );
        assert!(phi_map(&p21).is_err());
    }
}
