//! Packed matrix-group elements and closure enumeration.
//!
//! An n×n matrix is packed row-major into a `u128`, each entry taking
//! `bits = ⌈log2 q⌉` bits, little-endian. The packed integer is the hash key;
//! [`Codec::key_bytes`] gives its canonical byte string.

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use thiserror::Error;

use crate::gf::{Elem, Field};
use crate::linalg::Matrix;

/// Default element budget for enumeration and BFS.
pub const DEFAULT_ELEMENT_CAP: usize = 10_000_000;

const PAR_BATCH: usize = 1 << 14;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("{n}x{n} matrices over GF({q}) do not fit the 128-bit element encoding")]
    TooWide { n: usize, q: u32 },
    #[error("element budget {cap} exhausted (radius reached: {radius})")]
    CapExceeded { cap: usize, radius: usize },
    #[error("generator has wrong shape or field")]
    BadGenerator,
}

#[derive(Clone, Debug)]
pub struct Codec {
    field: Field,
    n: usize,
    bits: u32,
    entry_mask: u128,
    row_mask: u128,
    gf2: bool,
}

impl Codec {
    pub fn new(field: &Field, n: usize) -> Result<Codec, GroupError> {
        let q = field.order();
        let bits = 32 - (q - 1).leading_zeros();
        let bits = bits.max(1);
        if (n * n) as u32 * bits > 128 {
            return Err(GroupError::TooWide { n, q });
        }
        Ok(Codec {
            field: field.clone(),
            n,
            bits,
            entry_mask: (1u128 << bits) - 1,
            row_mask: if n == 0 { 0 } else { (1u128 << n) - 1 },
            gf2: q == 2,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn entry(&self, k: u128, idx: usize) -> u32 {
        ((k >> (idx as u32 * self.bits)) & self.entry_mask) as u32
    }

    pub fn pack(&self, m: &Matrix) -> u128 {
        assert_eq!(m.rows(), self.n);
        assert_eq!(m.cols(), self.n);
        m.data()
            .iter()
            .enumerate()
            .fold(0u128, |acc, (i, e)| acc | ((e.0 as u128) << (i as u32 * self.bits)))
    }

    pub fn unpack(&self, k: u128) -> Matrix {
        let nn = self.n * self.n;
        Matrix::from_data(
            &self.field,
            self.n,
            self.n,
            (0..nn).map(|i| Elem(self.entry(k, i))).collect(),
        )
    }

    pub fn identity(&self) -> u128 {
        (0..self.n).fold(0u128, |acc, i| acc | (1u128 << ((i * self.n + i) as u32 * self.bits)))
    }

    /// Canonical little-endian byte encoding of a packed element.
    pub fn key_bytes(&self, k: u128) -> Vec<u8> {
        let len = ((self.n * self.n) as u32 * self.bits).div_ceil(8) as usize;
        k.to_le_bytes()[..len].to_vec()
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        let n = self.n;
        if self.gf2 {
            let mut out = 0u128;
            for i in 0..n {
                let row = (a >> (i * n)) & self.row_mask;
                let mut acc = 0u128;
                let mut r = row;
                while r != 0 {
                    let j = r.trailing_zeros() as usize;
                    acc ^= (b >> (j * n)) & self.row_mask;
                    r &= r - 1;
                }
                out |= acc << (i * n);
            }
            return out;
        }
        let f = &self.field;
        let mut ea = [Elem::ZERO; 128];
        let mut eb = [Elem::ZERO; 128];
        for i in 0..n * n {
            ea[i] = Elem(self.entry(a, i));
            eb[i] = Elem(self.entry(b, i));
        }
        let mut out = 0u128;
        for i in 0..n {
            for j in 0..n {
                let mut s = Elem::ZERO;
                for k in 0..n {
                    let x = ea[i * n + k];
                    if !x.is_zero() {
                        let y = eb[k * n + j];
                        if !y.is_zero() {
                            s = f.add(s, f.mul(x, y));
                        }
                    }
                }
                out |= (s.0 as u128) << ((i * n + j) as u32 * self.bits);
            }
        }
        out
    }

    pub fn trace(&self, k: u128) -> Elem {
        let f = &self.field;
        (0..self.n).fold(Elem::ZERO, |s, i| f.add(s, Elem(self.entry(k, i * self.n + i))))
    }
}

/// Index of packed elements in discovery order.
#[derive(Clone, Debug, Default)]
pub struct ElementStore {
    elems: Vec<u128>,
    index: FxHashMap<u128, u32>,
}

impl ElementStore {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn get(&self, i: usize) -> u128 {
        self.elems[i]
    }

    pub fn position(&self, k: u128) -> Option<usize> {
        self.index.get(&k).map(|&i| i as usize)
    }

    pub fn contains(&self, k: u128) -> bool {
        self.index.contains_key(&k)
    }

    pub fn elements(&self) -> &[u128] {
        &self.elems
    }

    /// Appends if new; returns the index and whether it was inserted.
    pub fn insert(&mut self, k: u128) -> (usize, bool) {
        let next = self.elems.len() as u32;
        let e = self.index.entry(k).or_insert(next);
        if *e == next {
            self.elems.push(k);
            (next as usize, true)
        } else {
            (*e as usize, false)
        }
    }
}

/// Products `elems[i]·gens[j]` for i in `range`, j in `gen_range`, in (i, j) order.
fn products(
    codec: &Codec,
    elems: &[u128],
    gens: &[u128],
    range: std::ops::Range<usize>,
) -> Vec<u128> {
    let work = |i: usize| gens.iter().map(move |&g| codec.mul(elems[i], g));
    if range.len() * gens.len() >= PAR_BATCH {
        range
            .into_par_iter()
            .flat_map_iter(work)
            .collect()
    } else {
        range.flat_map(work).collect()
    }
}

/// The finite group generated by `gens`, by incremental right-multiplication closure.
///
/// Generators already in the closure are skipped, so the cost is about
/// |G| times the number of generators actually needed.
#[derive(Clone, Debug)]
pub struct Closure {
    pub codec: Codec,
    pub store: ElementStore,
    /// Positions in the input list of the generators that were used.
    pub used_generators: Vec<usize>,
    packed_used: Vec<u128>,
    inputs: usize,
}

impl Closure {
    pub fn trivial(field: &Field, n: usize) -> Result<Closure, GroupError> {
        let codec = Codec::new(field, n)?;
        let mut store = ElementStore::default();
        store.insert(codec.identity());
        Ok(Closure {
            codec,
            store,
            used_generators: Vec::new(),
            packed_used: Vec::new(),
            inputs: 0,
        })
    }

    pub fn order(&self) -> usize {
        self.store.len()
    }

    pub fn contains(&self, m: &Matrix) -> bool {
        self.store.contains(self.codec.pack(m))
    }

    pub fn matrices(&self) -> impl Iterator<Item = Matrix> + '_ {
        self.store.elements().iter().map(|&k| self.codec.unpack(k))
    }

    /// Adds one generator; returns whether the group grew. The generator is
    /// numbered by the count of generators offered so far.
    pub fn extend(&mut self, g: &Matrix, cap: usize) -> Result<bool, GroupError> {
        let n = self.codec.dim();
        if g.rows() != n || g.cols() != n || g.field() != self.codec.field() {
            return Err(GroupError::BadGenerator);
        }
        let gi = self.inputs;
        self.inputs += 1;
        let g = self.codec.pack(g);
        if self.store.contains(g) {
            return Ok(false);
        }
        let codec = &self.codec;
        let store = &mut self.store;
        let old_len = store.len();
        // old elements only need the new generator
        let mut pending: Vec<u128> = products(codec, store.elements(), &[g], 0..old_len);
        self.packed_used.push(g);
        self.used_generators.push(gi);
        let mut processed = old_len;
        loop {
            for k in pending.drain(..) {
                if store.insert(k).1 && store.len() > cap {
                    return Err(GroupError::CapExceeded { cap, radius: 0 });
                }
            }
            if processed == store.len() {
                break;
            }
            let end = (processed + PAR_BATCH).min(store.len());
            pending = products(codec, store.elements(), &self.packed_used, processed..end);
            processed = end;
        }
        Ok(true)
    }
}

pub fn closure(field: &Field, n: usize, gens: &[Matrix], cap: usize) -> Result<Closure, GroupError> {
    let mut c = Closure::trivial(field, n)?;
    for g in gens {
        c.extend(g, cap)?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pack_roundtrip_and_mul() {
        for (p, d, n) in [(2u64, 1u32, 5usize), (3, 1, 4), (2, 2, 4), (3, 2, 3), (7, 1, 3)] {
            let f = Field::new(p, d).unwrap();
            let c = Codec::new(&f, n).unwrap();
            let q = f.order();
            let a = Matrix::from_data(&f, n, n, (0..n * n).map(|i| Elem((i as u32 * 7 + 3) % q)).collect());
            let b = Matrix::from_data(&f, n, n, (0..n * n).map(|i| Elem((i as u32 * i as u32 + 1) % q)).collect());
            assert_eq!(c.unpack(c.pack(&a)), a);
            assert_eq!(c.unpack(c.mul(c.pack(&a), c.pack(&b))), a.mul(&b));
            assert_eq!(c.unpack(c.identity()), Matrix::identity(&f, n));
            assert_eq!(c.trace(c.pack(&a)), a.trace());
        }
        let f = Field::new(2, 2).unwrap();
        assert!(Codec::new(&f, 9).is_err());
    }

    #[test]
    fn sl2_2_order() {
        let f = Field::new(2, 1).unwrap();
        let a = Matrix::from_raw_rows(&f, &[vec![1, 1], vec![0, 1]]).unwrap();
        let b = Matrix::from_raw_rows(&f, &[vec![1, 0], vec![1, 1]]).unwrap();
        assert_eq!(closure(&f, 2, &[a.clone(), b], 100).unwrap().order(), 6);
        assert_eq!(closure(&f, 2, &[Matrix::identity(&f, 2)], 100).unwrap().order(), 1);
        assert!(matches!(
            closure(&f, 2, &[a.clone(), a.transpose()], 3),
            Err(GroupError::CapExceeded { .. })
        ));
    }

    #[test]
    fn redundant_generators_skipped() {
        let f = Field::new(3, 1).unwrap();
        let a = Matrix::from_raw_rows(&f, &[vec![1, 1], vec![0, 1]]).unwrap();
        let b = Matrix::from_raw_rows(&f, &[vec![1, 0], vec![1, 1]]).unwrap();
        let c = closure(&f, 2, &[a.clone(), a.mul(&a), b.clone(), a.mul(&b)], 1000).unwrap();
        assert_eq!(c.order(), 24);
        assert_eq!(c.used_generators, vec![0, 2]);
    }
}
