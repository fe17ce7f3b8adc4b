//! Monomial orders: degrevlex, lex, and the block order with Novikov
//! variables in the last (lowest) block.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::vars::{Mono, VarTable, VarTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderKind {
    DegRevLex,
    Lex,
    Block,
}

/// A total multiplicative order on monomials. The variable ranking is the
/// table order; `Block` compares block by block (degrevlex inside each),
/// with the Novikov block last so that Q-degree-0 leading data comes first.
#[derive(Clone, Debug)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    blocks: Vec<Vec<usize>>,
}

impl MonomialOrder {
    pub fn degrevlex(table: &Arc<VarTable>) -> MonomialOrder {
        MonomialOrder { kind: OrderKind::DegRevLex, blocks: vec![(0..table.len()).collect()] }
    }

    pub fn lex(table: &Arc<VarTable>) -> MonomialOrder {
        MonomialOrder { kind: OrderKind::Lex, blocks: vec![(0..table.len()).collect()] }
    }

    /// Default ring order: auxiliary ∧R generators first (eliminated),
    /// then main generators, then parameters, then all Novikov variables.
    pub fn block(table: &Arc<VarTable>) -> MonomialOrder {
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); 4];
        for v in 0..table.len() {
            let b = match table.tag(v) {
                VarTag::WedgeR { .. } => 0,
                VarTag::WedgeS { .. } | VarTag::ChernRoot { .. } | VarTag::Auxiliary => 1,
                VarTag::Deformation
                | VarTag::LoopParam
                | VarTag::EquivParam { .. }
                | VarTag::TildeParam { .. }
                | VarTag::RootParam { .. } => 2,
                VarTag::NovikovX { .. } | VarTag::NovikovY { .. } => 3,
            };
            blocks[b].push(v);
        }
        MonomialOrder { kind: OrderKind::Block, blocks }
    }

    pub fn cmp(&self, a: &Mono, b: &Mono) -> Ordering {
        match self.kind {
            OrderKind::Lex => {
                for block in &self.blocks {
                    for &v in block {
                        match a.exp(v).cmp(&b.exp(v)) {
                            Ordering::Equal => {}
                            ord => return ord,
                        }
                    }
                }
                Ordering::Equal
            }
            OrderKind::DegRevLex | OrderKind::Block => {
                for block in &self.blocks {
                    match degrevlex_in(block, a, b) {
                        Ordering::Equal => {}
                        ord => return ord,
                    }
                }
                Ordering::Equal
            }
        }
    }
}

fn degrevlex_in(vars: &[usize], a: &Mono, b: &Mono) -> Ordering {
    let da: i64 = vars.iter().map(|&v| a.exp(v) as i64).sum();
    let db: i64 = vars.iter().map(|&v| b.exp(v) as i64).sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        ord => return ord,
    }
    for &v in vars.iter().rev() {
        match a.exp(v).cmp(&b.exp(v)) {
            Ordering::Equal => {}
            // in degrevlex the monomial with the smaller trailing
            // exponent is the larger one
            ord => return ord.reverse(),
        }
    }
    Ordering::Equal
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flag::FlagShape;
    use crate::vars::VarTag;

    #[test]
    fn one_is_minimal_and_block_puts_novikov_last() {
        let table = VarTable::new(&FlagShape::parse("1:2").unwrap());
        let ord = MonomialOrder::block(&table);
        let one = Mono::one(table.len());
        let s = Mono::var(table.len(), table.var(VarTag::WedgeS { level: 1, degree: 1 }), 1);
        let q = Mono::var(table.len(), table.var(VarTag::NovikovX { level: 1 }), 1);
        let q5 = Mono::var(table.len(), table.var(VarTag::NovikovX { level: 1 }), 5);
        assert_eq!(ord.cmp(&s, &one), Ordering::Greater);
        assert_eq!(ord.cmp(&q, &one), Ordering::Greater);
        // any main-variable monomial dominates any pure Novikov monomial
        assert_eq!(ord.cmp(&s, &q5), Ordering::Greater);
        assert_eq!(ord.cmp(&q5, &q), Ordering::Greater);
    }

    #[test]
    fn multiplicative() {
        let table = VarTable::new(&FlagShape::parse("1,2:3").unwrap());
        let ord = MonomialOrder::block(&table);
        let a = Mono::var(table.len(), 0, 2);
        let b = Mono::var(table.len(), 1, 3);
        let c = Mono::var(table.len(), 2, 1);
        assert_eq!(ord.cmp(&a, &b), ord.cmp(&a.mul(&c), &b.mul(&c)));
    }
}
