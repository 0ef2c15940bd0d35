//! Cayley graphs of matrix groups: layered BFS, word recovery, transvection
//! balls and word-length profiles.

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::Field;
use crate::group::{closure, Codec, ElementStore, GroupError};
use crate::linalg::Matrix;
use crate::transvection::Transvection;
use crate::word::{invert_word, Letter, Word};

pub const DEFAULT_CAYLEY_CAP: usize = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CayleyError {
    #[error("more than {cap} elements (BFS reached radius {radius})")]
    CapExceeded { cap: usize, radius: usize },
    #[error("element was not reached by the exploration")]
    NotExplored,
    #[error("generator {0} is not an invertible matrix of the right shape")]
    BadGenerator(usize),
    #[error("no generators")]
    NoGenerators,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Exact BFS over the Cayley graph of ⟨X⟩ with respect to X ∪ X⁻¹.
#[derive(Clone, Debug)]
pub struct CayleyExploration {
    pub codec: Codec,
    /// The symmetrized generators and the letter each one stands for.
    pub generators: Vec<(u128, Letter)>,
    /// Elements in BFS order; index 0 is the identity.
    pub elements: ElementStore,
    pub dist: Vec<u32>,
    /// (parent element, generator position) with g = parent · generator.
    pub parent: Vec<(u32, u32)>,
    pub diameter: usize,
    /// histogram[d] = number of elements at distance d.
    pub histogram: Vec<usize>,
    /// False when the search stopped at a radius limit.
    pub complete: bool,
}

impl CayleyExploration {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn distance(&self, g: &Matrix) -> Option<usize> {
        self.elements.position(self.codec.pack(g)).map(|i| self.dist[i] as usize)
    }

    /// Word of minimal length in X ∪ X⁻¹ for the element at `idx`.
    pub fn word_at(&self, mut idx: usize) -> Word {
        let mut w = Vec::with_capacity(self.dist[idx] as usize);
        while idx != 0 {
            let (p, s) = self.parent[idx];
            w.push(self.generators[s as usize].1);
            idx = p as usize;
        }
        w.reverse();
        w
    }

    pub fn word_recover(&self, g: &Matrix) -> Result<Word, CayleyError> {
        let idx = self.elements.position(self.codec.pack(g)).ok_or(CayleyError::NotExplored)?;
        Ok(self.word_at(idx))
    }
}

fn symmetrize(codec: &Codec, gens: &[Matrix]) -> Result<Vec<(u128, Letter)>, CayleyError> {
    let n = codec.dim();
    let mut out: Vec<(u128, Letter)> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if g.rows() != n || g.cols() != n || g.field() != codec.field() {
            return Err(CayleyError::BadGenerator(i));
        }
        let inv = g.inverse().map_err(|_| CayleyError::BadGenerator(i))?;
        for (m, l) in [(g, Letter::gen(i)), (&inv, Letter::inv(i))] {
            let k = codec.pack(m);
            if !out.iter().any(|(x, _)| *x == k) {
                out.push((k, l));
            }
        }
    }
    Ok(out)
}

/// BFS from the identity by right multiplication, layer by layer. Products of
/// a layer are computed in parallel and inserted in a fixed order, so the
/// result does not depend on the thread count.
pub fn bfs_explore(
    field: &Field,
    n: usize,
    gens: &[Matrix],
    cap: usize,
    max_radius: Option<usize>,
) -> Result<CayleyExploration, CayleyError> {
    if gens.is_empty() {
        return Err(CayleyError::NoGenerators);
    }
    let codec = Codec::new(field, n)?;
    let generators = symmetrize(&codec, gens)?;
    let gk: Vec<u128> = generators.iter().map(|g| g.0).collect();
    let mut elements = ElementStore::default();
    elements.insert(codec.identity());
    let mut dist = vec![0u32];
    let mut parent = vec![(0u32, 0u32)];
    let mut histogram = vec![1usize];
    let mut start = 0;
    let mut radius = 0;
    let mut complete = true;
    loop {
        let end = elements.len();
        if start == end {
            break;
        }
        if max_radius == Some(radius) {
            complete = false;
            break;
        }
        let layer: Vec<u128> = elements.elements()[start..end].to_vec();
        let cands: Vec<(u128, u32, u32)> = layer
            .par_iter()
            .enumerate()
            .flat_map_iter(|(i, &e)| {
                let codec = &codec;
                gk.iter()
                    .enumerate()
                    .map(move |(s, &g)| (codec.mul(e, g), (start + i) as u32, s as u32))
            })
            .collect();
        radius += 1;
        let mut count = 0;
        for (k, p, s) in cands {
            if elements.insert(k).1 {
                if elements.len() > cap {
                    return Err(CayleyError::CapExceeded { cap, radius });
                }
                dist.push(radius as u32);
                parent.push((p, s));
                count += 1;
            }
        }
        if count > 0 {
            histogram.push(count);
        }
        start = end;
    }
    Ok(CayleyExploration {
        codec,
        generators,
        elements,
        diameter: histogram.len() - 1,
        dist,
        parent,
        histogram,
        complete,
    })
}

/// ℓ_X(g) and a minimal word, by meet-in-the-middle search from 1 and from g.
/// Returns None if g is not in ⟨X⟩.
pub fn bidirectional_distance(
    field: &Field,
    n: usize,
    gens: &[Matrix],
    g: &Matrix,
    cap: usize,
) -> Result<Option<(usize, Word)>, CayleyError> {
    if gens.is_empty() {
        return Err(CayleyError::NoGenerators);
    }
    let codec = Codec::new(field, n)?;
    let sym = symmetrize(&codec, gens)?;
    let target = codec.pack(g);
    let id = codec.identity();
    if target == id {
        return Ok(Some((0, Vec::new())));
    }
    // side 0 stores x = 1·w, side 1 stores y = g·w; entries are (parent, letter, depth)
    let mut seen: [FxHashMap<u128, (u128, Option<Letter>, u32)>; 2] = [FxHashMap::default(), FxHashMap::default()];
    seen[0].insert(id, (id, None, 0));
    seen[1].insert(target, (target, None, 0));
    let mut frontier = [vec![id], vec![target]];
    let mut depth = [0u32; 2];
    let walk = |map: &FxHashMap<u128, (u128, Option<Letter>, u32)>, mut x: u128| -> Word {
        let mut w = Vec::new();
        while let Some(&(p, Some(l), _)) = map.get(&x) {
            w.push(l);
            x = p;
        }
        w.reverse();
        w
    };
    loop {
        if frontier[0].is_empty() || frontier[1].is_empty() {
            return Ok(None);
        }
        let side = if frontier[0].len() <= frontier[1].len() { 0 } else { 1 };
        depth[side] += 1;
        let mut next = Vec::new();
        let mut best: Option<(u32, u128)> = None;
        for &x in &frontier[side] {
            for &(s, l) in &sym {
                let y = codec.mul(x, s);
                if seen[side].contains_key(&y) {
                    continue;
                }
                seen[side].insert(y, (x, Some(l), depth[side]));
                next.push(y);
                if let Some(&(_, _, d)) = seen[1 - side].get(&y) {
                    let total = depth[side] + d;
                    if best.is_none_or(|(b, _)| total < b) {
                        best = Some((total, y));
                    }
                }
            }
        }
        if seen[0].len() + seen[1].len() > cap {
            return Err(CayleyError::CapExceeded {
                cap,
                radius: (depth[0] + depth[1]) as usize,
            });
        }
        if let Some((total, m)) = best {
            // m = w0 and m = g·w1, so g = w0·w1⁻¹
            let mut w = walk(&seen[0], m);
            w.extend(invert_word(&walk(&seen[1], m)));
            return Ok(Some((total as usize, w)));
        }
        frontier[side] = next;
    }
}

/// Transvections of T^r together with minimal words in T ∪ T⁻¹.
pub fn transvection_ball(t: &[Transvection], r: usize, cap: usize) -> Result<Vec<(Transvection, Word)>, CayleyError> {
    let first = t.first().ok_or(CayleyError::NoGenerators)?;
    let gens: Vec<Matrix> = t.iter().map(|x| x.matrix()).collect();
    let ex = bfs_explore(first.field(), first.dim(), &gens, cap, Some(r))?;
    Ok(transvections_in(&ex)
        .into_iter()
        .map(|(i, tv)| (tv, ex.word_at(i)))
        .collect())
}

/// Positions of the transvections among the explored elements.
fn transvections_in(ex: &CayleyExploration) -> Vec<(usize, Transvection)> {
    let els = ex.elements.elements();
    let found: Vec<Option<Transvection>> = els
        .par_iter()
        .map(|&k| Transvection::from_matrix(&ex.codec.unpack(k)).ok())
        .collect();
    found.into_iter().enumerate().filter_map(|(i, t)| t.map(|t| (i, t))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthProfile {
    pub order: usize,
    /// |G ∩ 𝔗|
    pub transvections: usize,
    pub max: usize,
    pub histogram: Vec<usize>,
}

/// Word lengths in G with respect to all of G ∩ 𝔗, where G = ⟨t⟩.
pub fn transvection_length_profile(t: &[Transvection], cap: usize) -> Result<LengthProfile, CayleyError> {
    let first = t.first().ok_or(CayleyError::NoGenerators)?;
    let (f, n) = (first.field().clone(), first.dim());
    let mats: Vec<Matrix> = t.iter().map(|x| x.matrix()).collect();
    let g = closure(&f, n, &mats, cap).map_err(|e| match e {
        GroupError::CapExceeded { cap, radius } => CayleyError::CapExceeded { cap, radius },
        e => e.into(),
    })?;
    let all: Vec<Matrix> = g
        .store
        .elements()
        .par_iter()
        .filter_map(|&k| {
            let m = g.codec.unpack(k);
            Transvection::from_matrix(&m).ok().map(|_| m)
        })
        .collect();
    let ex = bfs_explore(&f, n, &all, cap, None)?;
    Ok(LengthProfile {
        order: ex.order(),
        transvections: all.len(),
        max: ex.diameter,
        histogram: ex.histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::build_symmetric_rep;
    use crate::word::evaluate;

    fn sl2_2() -> (Field, Vec<Matrix>) {
        let f = Field::new(2, 1).unwrap();
        let a = Matrix::from_raw_rows(&f, &[vec![1, 1], vec![0, 1]]).unwrap();
        let b = Matrix::from_raw_rows(&f, &[vec![1, 0], vec![1, 1]]).unwrap();
        (f, vec![a, b])
    }

    #[test]
    fn sl2_2_diameter() {
        let (f, gens) = sl2_2();
        let ex = bfs_explore(&f, 2, &gens, 100, None).unwrap();
        assert_eq!(ex.order(), 6);
        assert_eq!(ex.diameter, 3);
        assert_eq!(ex.histogram, vec![1, 2, 2, 1]);
    }

    #[test]
    fn all_elements_give_diameter_one() {
        let (f, gens) = sl2_2();
        let ex = bfs_explore(&f, 2, &gens, 100, None).unwrap();
        let all: Vec<Matrix> = ex.elements.elements().iter().map(|&k| ex.codec.unpack(k)).collect();
        assert_eq!(bfs_explore(&f, 2, &all, 100, None).unwrap().diameter, 1);
    }

    #[test]
    fn words_replay() {
        let (f, gens) = sl2_2();
        let invs: Vec<Matrix> = gens.iter().map(|g| g.inverse().unwrap()).collect();
        let ex = bfs_explore(&f, 2, &gens, 100, None).unwrap();
        assert!(ex.word_recover(&Matrix::identity(&f, 2)).unwrap().is_empty());
        assert_eq!(ex.word_recover(&gens[1]).unwrap(), vec![Letter::gen(1)]);
        for i in 0..ex.order() {
            let g = ex.codec.unpack(ex.elements.get(i));
            let w = ex.word_recover(&g).unwrap();
            assert_eq!(w.len(), ex.dist[i] as usize);
            assert_eq!(evaluate(&f, 2, &gens, &invs, &w), g);
        }
    }

    #[test]
    fn cap_reports_radius() {
        let ts = build_symmetric_rep(6).unwrap();
        let gens: Vec<Matrix> = ts.iter().map(|t| t.matrix()).collect();
        match bfs_explore(ts[0].field(), 4, &gens, 50, None) {
            Err(CayleyError::CapExceeded { cap: 50, radius }) => assert!(radius >= 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bidirectional_matches_bfs() {
        let ts = build_symmetric_rep(6).unwrap();
        let f = ts[0].field().clone();
        let gens: Vec<Matrix> = ts.iter().map(|t| t.matrix()).collect();
        let invs: Vec<Matrix> = gens.iter().map(|g| g.inverse().unwrap()).collect();
        let ex = bfs_explore(&f, 4, &gens, 1000, None).unwrap();
        for i in (0..ex.order()).step_by(37) {
            let g = ex.codec.unpack(ex.elements.get(i));
            let (d, w) = bidirectional_distance(&f, 4, &gens, &g, 10_000).unwrap().unwrap();
            assert_eq!(d, ex.dist[i] as usize);
            assert_eq!(evaluate(&f, 4, &gens, &invs, &w), g);
        }
    }

    #[test]
    fn ball_examples() {
        let f = Field::new(2, 1).unwrap();
        let t = vec![
            Transvection::from_raw(&f, &[1, 0], &[0, 1]).unwrap(),
            Transvection::from_raw(&f, &[0, 1], &[1, 0]).unwrap(),
        ];
        let b1 = transvection_ball(&t, 1, 100).unwrap();
        assert_eq!(b1.len(), 2);
        let b3 = transvection_ball(&t, 3, 100).unwrap();
        assert_eq!(b3.len(), 3);
    }

    #[test]
    fn profile_sl2_2() {
        let f = Field::new(2, 1).unwrap();
        let t = vec![
            Transvection::from_raw(&f, &[1, 0], &[0, 1]).unwrap(),
            Transvection::from_raw(&f, &[0, 1], &[1, 0]).unwrap(),
        ];
        let p = transvection_length_profile(&t, 100).unwrap();
        assert_eq!(p.transvections, 3);
        // S3 with all transpositions: the 3-cycles need two
        assert_eq!(p.max, 2);
        assert_eq!(p.histogram, vec![1, 3, 2]);
    }
}
