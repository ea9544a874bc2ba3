//! Lookup tables for small fields, used by the exhaustive solvers.
//!
//! Elements are addressed by their base-p index (see
//! [`FieldSpec::from_index`]); index 0 is zero and index 1 is one.

use std::sync::Arc;

use super::{FieldElement, FieldSpec, GfError};

/// Largest field order for which tables are built.
pub const MAX_TABLE_ORDER: usize = 1 << 10;

#[derive(Debug, Clone)]
pub struct FieldTables {
    spec: Arc<FieldSpec>,
    q: usize,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl FieldTables {
    pub fn new(spec: &Arc<FieldSpec>) -> Result<Self, GfError> {
        let q = spec
            .order_u64()
            .map(|q| q as usize)
            .filter(|&q| q <= MAX_TABLE_ORDER)
            .ok_or_else(|| GfError::OrderTooLarge(format!("table limit {MAX_TABLE_ORDER}")))?;
        let elems: Vec<FieldElement> = spec.elements().collect();
        let idx = |e: FieldElement| e.to_index_u64().expect("small field") as u16;
        let mut add = Vec::with_capacity(q * q);
        let mut mul = Vec::with_capacity(q * q);
        for a in &elems {
            for b in &elems {
                add.push(idx(a + b));
                mul.push(idx(a * b));
            }
        }
        let neg = elems.iter().map(|a| idx(-a)).collect();
        let inv = elems.iter().map(|a| a.inv().map(idx).unwrap_or(0)).collect();
        Ok(Self { spec: Arc::clone(spec), q, add, mul, neg, inv })
    }

    pub fn spec(&self) -> &Arc<FieldSpec> {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b] as usize
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b] as usize
    }

    #[inline]
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }

    #[inline]
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `None` for zero.
    #[inline]
    pub fn inv(&self, a: usize) -> Option<usize> {
        (a != 0).then(|| self.inv[a] as usize)
    }

    pub fn element(&self, index: usize) -> FieldElement {
        self.spec.from_index_u64(index as u64).expect("index below order")
    }

    pub fn index_of(&self, e: &FieldElement) -> Result<usize, GfError> {
        if **e.spec() != *self.spec {
            return Err(GfError::SpecMismatch);
        }
        Ok(e.to_index_u64().expect("small field") as usize)
    }
}
