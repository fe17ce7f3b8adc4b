//! Tagged variables and exponent vectors.
//!
//! Every polynomial in the workbench lives over one shared, per-shape table
//! of tagged variables: Chern roots of the abelianization, wedge-power
//! generators on the flag side, Novikov variables, equivariant and root
//! parameters, and the loop/deformation/auxiliary scalars.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::flag::FlagShape;

/// A tagged variable. Indices are 1-based, matching the usual notation.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize)]
pub enum VarTag {
    /// P^i_j, the j-th tautological line on level i of the abelianization.
    ChernRoot { level: u8, index: u8 },
    /// ∧^deg S_level on the flag variety.
    WedgeS { level: u8, degree: u8 },
    /// ∧^deg R_level, auxiliary quotient-bundle generator.
    WedgeR { level: u8, degree: u8 },
    /// t, the characteristic-polynomial variable.
    Auxiliary,
    /// y, tracking wedge degree in Λ_y classes.
    Deformation,
    /// q, the loop parameter.
    LoopParam,
    /// Λ_r, equivariant parameter of the ambient torus.
    EquivParam { index: u8 },
    /// Λ^level_index, large-torus parameter before the T-specialization.
    TildeParam { level: u8, index: u8 },
    /// λ^level_{lo,hi} with lo < hi; the reversed parameter is its inverse.
    RootParam { level: u8, lo: u8, hi: u8 },
    /// Q_i, Novikov variable on the flag variety.
    NovikovX { level: u8 },
    /// Q^i_j, Novikov variable on the abelianization.
    NovikovY { level: u8, index: u8 },
}

impl VarTag {
    /// Laurent variables may carry negative exponents.
    pub fn is_laurent(self) -> bool {
        matches!(
            self,
            VarTag::ChernRoot { .. }
                | VarTag::EquivParam { .. }
                | VarTag::TildeParam { .. }
                | VarTag::RootParam { .. }
                | VarTag::LoopParam
        )
    }

    pub fn is_novikov(self) -> bool {
        matches!(self, VarTag::NovikovX { .. } | VarTag::NovikovY { .. })
    }
}

impl fmt::Display for VarTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarTag::ChernRoot { level, index } => write!(f, "P{level}_{index}"),
            VarTag::WedgeS { level, degree } => write!(f, "wS{level}_{degree}"),
            VarTag::WedgeR { level, degree } => write!(f, "wR{level}_{degree}"),
            VarTag::Auxiliary => write!(f, "t"),
            VarTag::Deformation => write!(f, "y"),
            VarTag::LoopParam => write!(f, "q"),
            VarTag::EquivParam { index } => write!(f, "L{index}"),
            VarTag::TildeParam { level, index } => write!(f, "Lt{level}_{index}"),
            VarTag::RootParam { level, lo, hi } => write!(f, "lam{level}_{lo}_{hi}"),
            VarTag::NovikovX { level } => write!(f, "Q{level}"),
            VarTag::NovikovY { level, index } => write!(f, "Q{level}_{index}"),
        }
    }
}

/// The ordered variable table for one flag shape.
///
/// The construction order doubles as the default variable ranking for
/// monomial orders: elimination block (∧R) first, then the main generators,
/// then scalars, with Novikov variables last.
#[derive(Debug)]
pub struct VarTable {
    shape: FlagShape,
    tags: Vec<VarTag>,
    index: HashMap<VarTag, usize>,
}

impl VarTable {
    pub fn new(shape: &FlagShape) -> Arc<VarTable> {
        let n = shape.levels();
        let mut tags = Vec::new();
        // block 0: auxiliary quotient generators, eliminated first
        for i in 1..=n {
            for d in 1..=shape.gap(i) {
                tags.push(VarTag::WedgeR { level: i as u8, degree: d as u8 });
            }
        }
        // block 1: main generators
        for i in 1..=n {
            for d in 1..=shape.v(i) {
                tags.push(VarTag::WedgeS { level: i as u8, degree: d as u8 });
            }
        }
        for i in 1..=n {
            for j in 1..=shape.v(i) {
                tags.push(VarTag::ChernRoot { level: i as u8, index: j as u8 });
            }
        }
        tags.push(VarTag::Auxiliary);
        // block 2: scalar-like parameters
        tags.push(VarTag::Deformation);
        tags.push(VarTag::LoopParam);
        for r in 1..=shape.ambient() {
            tags.push(VarTag::EquivParam { index: r as u8 });
        }
        for i in 1..=n {
            for r in 1..=shape.v(i + 1) {
                tags.push(VarTag::TildeParam { level: i as u8, index: r as u8 });
            }
        }
        for i in 1..=n {
            for lo in 1..=shape.v(i) {
                for hi in (lo + 1)..=shape.v(i) {
                    tags.push(VarTag::RootParam { level: i as u8, lo: lo as u8, hi: hi as u8 });
                }
            }
        }
        // block 3: Novikov variables, always last
        for i in 1..=n {
            tags.push(VarTag::NovikovX { level: i as u8 });
        }
        for i in 1..=n {
            for j in 1..=shape.v(i) {
                tags.push(VarTag::NovikovY { level: i as u8, index: j as u8 });
            }
        }
        let index = tags.iter().enumerate().map(|(k, t)| (*t, k)).collect();
        Arc::new(VarTable { shape: shape.clone(), tags, index })
    }

    pub fn shape(&self) -> &FlagShape {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn tag(&self, var: usize) -> VarTag {
        self.tags[var]
    }

    pub fn tags(&self) -> &[VarTag] {
        &self.tags
    }

    pub fn var(&self, tag: VarTag) -> usize {
        *self
            .index
            .get(&tag)
            .unwrap_or_else(|| panic!("variable {tag} not in table for shape {}", self.shape))
    }

    pub fn try_var(&self, tag: VarTag) -> Option<usize> {
        self.index.get(&tag).copied()
    }
}

/// Exponent vector over a `VarTable`; negative entries are Laurent exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Mono(pub Box<[i32]>);

impl Mono {
    pub fn one(nvars: usize) -> Mono {
        Mono(vec![0; nvars].into_boxed_slice())
    }

    pub fn var(nvars: usize, v: usize, exp: i32) -> Mono {
        let mut e = vec![0; nvars];
        e[v] = exp;
        Mono(e.into_boxed_slice())
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    pub fn inv(&self) -> Mono {
        Mono(self.0.iter().map(|a| -a).collect())
    }

    /// Componentwise quotient; `None` unless `other` divides `self`
    /// in the non-negative sense (used only by the Groebner engine).
    pub fn checked_div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Mono(out.into_boxed_slice()))
    }

    pub fn divides(&self, other: &Mono) -> bool {
        self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn lcm(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn total_degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    pub fn degree_of(&self, vars: &[usize]) -> i64 {
        vars.iter().map(|&v| self.0[v] as i64).sum()
    }

    pub fn exp(&self, v: usize) -> i32 {
        self.0[v]
    }

    /// Total degree over the Novikov block.
    pub fn novikov_degree(&self, table: &VarTable) -> i64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(v, _)| table.tag(*v).is_novikov())
            .map(|(_, &e)| e as i64)
            .sum()
    }

    pub fn has_negative(&self) -> bool {
        self.0.iter().any(|&e| e < 0)
    }

    pub fn display(&self, table: &VarTable) -> String {
        let mut parts = Vec::new();
        for (v, &e) in self.0.iter().enumerate() {
            if e == 1 {
                parts.push(table.tag(v).to_string());
            } else if e != 0 {
                parts.push(format!("{}^{}", table.tag(v), e));
            }
        }
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}
