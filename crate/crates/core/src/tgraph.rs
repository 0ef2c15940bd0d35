//! The transvection graph Γ(T) and the procedures built on it.
//!
//! Vertices are transvections; there is an edge t → s when φ_t(v_s) ≠ 0,
//! equivalently (t − 1)(s − 1) ≠ 0.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Field};
use crate::linalg::{projective_points, Covector, Matrix, Subspace, Vector};
use crate::transvection::Transvection;
use crate::word::{Letter, Word};

/// Default budget for enumerated closed walks.
pub const DEFAULT_WALK_BUDGET: usize = 1_000_000;
/// Default bound on q^n for projective scans.
pub const DEFAULT_PROJECTIVE_BUDGET: u64 = 1 << 20;
/// Hard cap on enumerated cycle length.
pub const MAX_CYCLE_LENGTH: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("empty transvection set")]
    Empty,
    #[error("transvections live in different spaces or fields")]
    FieldMismatch,
    #[error("budget exceeded: {0}")]
    CapExceeded(String),
    #[error("the generated group is not irreducible")]
    NotIrreducible,
    #[error("the transvection graph is not strongly connected")]
    NotStronglyConnected,
    #[error("the ambient set is not dense: no witness for ({v:?}, {phi:?})")]
    NotDense { v: Vec<u32>, phi: Vec<u32> },
    #[error("cycle length {0} above the cap of {MAX_CYCLE_LENGTH}")]
    CycleTooLong(usize),
    #[error("field has odd degree and no involution")]
    NoInvolution,
    #[error("section is zero-dimensional")]
    TrivialSection,
}

#[derive(Clone, Debug)]
pub struct TransvectionGraph {
    field: Field,
    n: usize,
    verts: Vec<Transvection>,
    /// pair[i * k + j] = φ_i(v_j)
    pair: Vec<Elem>,
    out: Vec<Vec<usize>>,
    inn: Vec<Vec<usize>>,
    v_space: Subspace,
    vstar_space: Subspace,
}

/// A closed walk in canonical rotation together with its weight.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub verts: Vec<usize>,
    pub weight: Elem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FailedCondition {
    /// V(T) ≠ V, so [V, G] is a proper invariant subspace.
    ImageNotFull,
    /// V*(T) ≠ V*, so V^G is a nonzero invariant subspace.
    CoimageNotFull,
    NotStronglyConnected,
}

#[derive(Clone, Debug)]
pub struct Irreducibility {
    pub irreducible: bool,
    pub failed: Option<FailedCondition>,
    /// Proper nonzero invariant subspace when reducible.
    pub invariant_subspace: Option<Subspace>,
    /// The source component S with U = V(S), for the connectivity failure.
    pub component: Option<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FieldStatus {
    /// Provably L(T): path ratios over a spanning tree, L_5 of a dense set,
    /// or the full field.
    Exact,
    /// All cycles up to the cap were enumerated and the subfield was stable.
    Stabilized,
    /// Enumeration stopped at the length cap before stabilizing.
    CapLimited,
}

#[derive(Clone, Debug)]
pub struct DefiningField {
    pub degree: u32,
    pub witnesses: Vec<CycleRecord>,
    pub status: FieldStatus,
}

#[derive(Clone, Debug)]
pub struct DensityCheck {
    pub dense: bool,
    pub counterexample: Option<(Vector, Covector)>,
}

/// Output of [`densify`]: the dense set and each element's word in the input.
#[derive(Clone, Debug)]
pub struct Densified {
    pub set: Vec<Transvection>,
    pub words: Vec<Word>,
}

#[derive(Clone, Debug)]
pub struct Augmented {
    pub set: Vec<Transvection>,
    /// Indices into the dense ambient set of the vertices that were added.
    pub added: Vec<usize>,
    /// Kernel dimensions (left, right) before each winkle step and at the end.
    pub kernel_dims: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct SectionRestriction {
    pub u: Subspace,
    pub w: Subspace,
    /// Vectors of U whose images form the basis of U/W.
    pub basis: Vec<Vector>,
    pub projected: Vec<Transvection>,
    /// index_map[i] is the position of t̄_i in `projected`.
    pub index_map: Vec<usize>,
}

impl TransvectionGraph {
    pub fn new(verts: Vec<Transvection>) -> Result<TransvectionGraph, GraphError> {
        let first = verts.first().ok_or(GraphError::Empty)?;
        let field = first.field().clone();
        let n = first.dim();
        if verts.iter().any(|t| t.field() != &field || t.dim() != n) {
            return Err(GraphError::FieldMismatch);
        }
        let k = verts.len();
        let mut pair = vec![Elem::ZERO; k * k];
        let mut out = vec![Vec::new(); k];
        let mut inn = vec![Vec::new(); k];
        for i in 0..k {
            for j in 0..k {
                let x = verts[i].pairing(&verts[j]);
                pair[i * k + j] = x;
                if !x.is_zero() {
                    out[i].push(j);
                    inn[j].push(i);
                }
            }
        }
        let vs: Vec<Vector> = verts.iter().map(|t| t.v().clone()).collect();
        let ps: Vec<Covector> = verts.iter().map(|t| t.phi().clone()).collect();
        Ok(TransvectionGraph {
            v_space: Subspace::span(&field, n, &vs),
            vstar_space: Subspace::span_covectors(&field, n, &ps),
            field,
            n,
            verts,
            pair,
            out,
            inn,
        })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn verts(&self) -> &[Transvection] {
        &self.verts
    }

    pub fn vert(&self, i: usize) -> &Transvection {
        &self.verts[i]
    }

    /// φ_i(v_j).
    #[inline]
    pub fn pairing(&self, i: usize, j: usize) -> Elem {
        self.pair[i * self.verts.len() + j]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        !self.pairing(i, j).is_zero()
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.inn[i]
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|o| o.len()).sum()
    }

    /// V(T) = span{v_t}.
    pub fn v_space(&self) -> &Subspace {
        &self.v_space
    }

    /// V*(T) = span{φ_t}, as coordinate rows.
    pub fn vstar_space(&self) -> &Subspace {
        &self.vstar_space
    }

    /// Strongly connected components, each sorted, ordered by first vertex.
    pub fn scc(&self) -> Vec<Vec<usize>> {
        let k = self.len();
        // Kosaraju with explicit stacks.
        let mut order = Vec::with_capacity(k);
        let mut seen = vec![false; k];
        for s in 0..k {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut stack = vec![(s, 0usize)];
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < self.out[v].len() {
                    let w = self.out[v][*next];
                    *next += 1;
                    if !seen[w] {
                        seen[w] = true;
                        stack.push((w, 0));
                    }
                } else {
                    order.push(v);
                    stack.pop();
                }
            }
        }
        let mut comp = vec![usize::MAX; k];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for &s in order.iter().rev() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = comps.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.inn[v] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        comps.sort_by_key(|c| c[0]);
        comps
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.scc().len() == 1
    }

    pub fn irreducibility(&self) -> Irreducibility {
        let f = &self.field;
        if !self.v_space.is_full() {
            return Irreducibility {
                irreducible: false,
                failed: Some(FailedCondition::ImageNotFull),
                invariant_subspace: Some(self.v_space.clone()),
                component: None,
            };
        }
        if !self.vstar_space.is_full() {
            return Irreducibility {
                irreducible: false,
                failed: Some(FailedCondition::CoimageNotFull),
                invariant_subspace: Some(self.vstar_space.perp()),
                component: None,
            };
        }
        let comps = self.scc();
        if comps.len() > 1 {
            let mut comp_of = vec![0; self.len()];
            for (c, members) in comps.iter().enumerate() {
                for &m in members {
                    comp_of[m] = c;
                }
            }
            let source = comps
                .iter()
                .enumerate()
                .find(|(c, members)| {
                    members
                        .iter()
                        .all(|&m| self.inn[m].iter().all(|&w| comp_of[w] == *c))
                })
                .map(|(_, m)| m.clone())
                .expect("a finite DAG has a source");
            let vs: Vec<Vector> = source.iter().map(|&i| self.verts[i].v().clone()).collect();
            return Irreducibility {
                irreducible: false,
                failed: Some(FailedCondition::NotStronglyConnected),
                invariant_subspace: Some(Subspace::span(f, self.n, &vs)),
                component: Some(source),
            };
        }
        Irreducibility {
            irreducible: true,
            failed: None,
            invariant_subspace: None,
            component: None,
        }
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducibility().irreducible
    }

    /// BFS distances and parents from `s` along edges (or reversed edges).
    pub fn bfs(&self, s: usize, reverse: bool) -> (Vec<Option<usize>>, Vec<Option<usize>>) {
        let k = self.len();
        let mut dist = vec![None; k];
        let mut parent = vec![None; k];
        dist[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            let nbrs = if reverse { &self.inn[v] } else { &self.out[v] };
            for &w in nbrs {
                if dist[w].is_none() {
                    dist[w] = Some(dist[v].unwrap() + 1);
                    parent[w] = Some(v);
                    queue.push_back(w);
                }
            }
        }
        (dist, parent)
    }

    /// Directed diameter, `None` when not strongly connected.
    pub fn diameter(&self) -> Option<usize> {
        let mut d = 0;
        for s in 0..self.len() {
            let (dist, _) = self.bfs(s, false);
            for x in dist {
                d = d.max(x?);
            }
        }
        Some(d)
    }

    /// w(t_1, …, t_k) = φ_1(v_2)φ_2(v_3)⋯φ_k(v_1).
    pub fn weight(&self, cycle: &[usize]) -> Elem {
        let f = &self.field;
        let k = cycle.len();
        if k == 0 {
            return Elem::ONE;
        }
        let mut w = Elem::ONE;
        for i in 0..k {
            w = f.mul(w, self.pairing(cycle[i], cycle[(i + 1) % k]));
            if w.is_zero() {
                break;
            }
        }
        w
    }

    /// d_s = w(t_1..t_k) − (−1)^k w(t_k..t_1).
    pub fn symplectic_defect(&self, cycle: &[usize]) -> Elem {
        let f = &self.field;
        let rev: Vec<usize> = cycle.iter().rev().copied().collect();
        let wr = self.weight(&rev);
        let signed = if cycle.len().is_multiple_of(2) { wr } else { f.neg(wr) };
        f.sub(self.weight(cycle), signed)
    }

    /// d_θ = w(t_1..t_k) − (−1)^k θ(w(t_k..t_1)).
    pub fn unitary_defect(&self, cycle: &[usize]) -> Result<Elem, GraphError> {
        let f = &self.field;
        let rev: Vec<usize> = cycle.iter().rev().copied().collect();
        let wr = f
            .involution(self.weight(&rev))
            .map_err(|_| GraphError::NoInvolution)?;
        let signed = if cycle.len().is_multiple_of(2) { wr } else { f.neg(wr) };
        Ok(f.sub(self.weight(cycle), signed))
    }

    /// All closed walks of length 2..=max_len with nonzero weight, one per rotation class.
    pub fn cycles_up_to(&self, max_len: usize, budget: usize) -> Result<Vec<CycleRecord>, GraphError> {
        if max_len > MAX_CYCLE_LENGTH {
            return Err(GraphError::CycleTooLong(max_len));
        }
        let f = &self.field;
        let mut out = Vec::new();
        let mut steps = 0usize;
        for s in 0..self.len() {
            let mut path = vec![s];
            let mut weights = vec![Elem::ONE];
            let mut iters = vec![0usize];
            while let Some(&v) = path.last() {
                let depth = path.len() - 1;
                let it = iters[depth];
                if it >= self.out[v].len() {
                    path.pop();
                    weights.pop();
                    iters.pop();
                    continue;
                }
                iters[depth] += 1;
                let w = self.out[v][it];
                if w < s {
                    continue;
                }
                steps += 1;
                if steps > budget {
                    return Err(GraphError::CapExceeded(format!(
                        "cycle enumeration exceeded {budget} walk steps"
                    )));
                }
                let wt = f.mul(weights[depth], self.pairing(v, w));
                if w == s {
                    if path.len() >= 2 && is_least_rotation(&path) {
                        out.push(CycleRecord {
                            verts: path.clone(),
                            weight: wt,
                        });
                    }
                    continue;
                }
                if path.len() < max_len {
                    path.push(w);
                    weights.push(wt);
                    iters.push(0);
                }
            }
        }
        out.sort_by(|a, b| (a.verts.len(), &a.verts).cmp(&(b.verts.len(), &b.verts)));
        Ok(out)
    }

    /// L_k(T) by enumeration: degree of the subfield generated by weights of cycles of length ≤ k.
    pub fn subfield_of_cycles(&self, max_len: usize, budget: usize) -> Result<u32, GraphError> {
        let cycles = self.cycles_up_to(max_len, budget)?;
        Ok(self.field.subfield_generated(cycles.iter().map(|c| c.weight)))
    }

    /// L(T) from enumerated cycles. With `dense_hint` the cycles of length ≤ 5
    /// suffice; otherwise k grows until L_k is unchanged for three consecutive k.
    pub fn defining_field(&self, dense_hint: bool, budget: usize) -> Result<DefiningField, GraphError> {
        let f = &self.field;
        let mut witnesses: Vec<CycleRecord> = Vec::new();
        let mut degree = 1;
        let mut stable = 0;
        let max_k = if dense_hint { 5 } else { MAX_CYCLE_LENGTH };
        for k in 2..=max_k {
            let before = degree;
            for c in self.cycles_up_to(k, budget)? {
                if c.verts.len() != k {
                    continue;
                }
                let d = crate::gf::lcm(degree, f.min_poly_degree(c.weight));
                if d != degree {
                    degree = d;
                    witnesses.push(c);
                }
            }
            stable = if degree == before { stable + 1 } else { 0 };
            if dense_hint {
                continue;
            }
            if degree == f.degree() {
                return Ok(DefiningField { degree, witnesses, status: FieldStatus::Exact });
            }
            if stable >= 3 {
                return Ok(DefiningField { degree, witnesses, status: FieldStatus::Stabilized });
            }
        }
        let status = if dense_hint || degree == f.degree() {
            FieldStatus::Exact
        } else {
            FieldStatus::CapLimited
        };
        Ok(DefiningField { degree, witnesses, status })
    }

    /// Defining field L(T) with witness cycles of length ≤ 2D + 1.
    ///
    /// With t_0 the first vertex, γ_t a shortest path t → t_0 and ρ_t a shortest
    /// path t_0 → t, every cycle weight is a product of the ratios
    /// w(t, s, γ_s, ρ_t) / w(γ_t, ρ_t) over edges t → s, and each ratio is a
    /// quotient of cycle weights. So these cycles generate L(T) exactly.
    pub fn exact_defining_field(&self) -> Result<DefiningField, GraphError> {
        let f = &self.field;
        let (to_root, from_root) = self.root_paths(0)?;
        let mut candidates: Vec<Vec<usize>> = Vec::new();
        for t in 0..self.len() {
            if t != 0 {
                let mut c = to_root[t].clone();
                c.extend_from_slice(&from_root[t][1..from_root[t].len() - 1]);
                candidates.push(c);
            }
            for &s in &self.out[t] {
                let mut walk = vec![t];
                walk.extend_from_slice(&to_root[s]);
                walk.extend_from_slice(&from_root[t][1..]);
                walk.pop();
                candidates.push(walk);
            }
        }
        let mut degree = 1;
        let mut witnesses = Vec::new();
        for c in candidates {
            let w = self.weight(&c);
            debug_assert!(!w.is_zero());
            let d = crate::gf::lcm(degree, f.min_poly_degree(w));
            if d != degree {
                degree = d;
                witnesses.push(CycleRecord {
                    verts: canonical_rotation(&c),
                    weight: self.weight(&canonical_rotation(&c)),
                });
            }
            if degree == f.degree() {
                break;
            }
        }
        Ok(DefiningField {
            degree,
            witnesses,
            status: FieldStatus::Exact,
        })
    }

    /// Shortest paths from each vertex to `root` and from `root` to each vertex.
    pub(crate) fn root_paths(&self, root: usize) -> Result<(Vec<Vec<usize>>, Vec<Vec<usize>>), GraphError> {
        let k = self.len();
        let (dr, pr) = self.bfs(root, true);
        let (df, pf) = self.bfs(root, false);
        if dr.iter().chain(&df).any(|d| d.is_none()) {
            return Err(GraphError::NotStronglyConnected);
        }
        let mut to_root = vec![Vec::new(); k];
        let mut from_root = vec![Vec::new(); k];
        for t in 0..k {
            let mut p = vec![t];
            let mut x = t;
            while let Some(y) = pr[x] {
                p.push(y);
                x = y;
            }
            to_root[t] = p;
            let mut p = vec![t];
            let mut x = t;
            while let Some(y) = pf[x] {
                p.push(y);
                x = y;
            }
            p.reverse();
            from_root[t] = p;
        }
        Ok((to_root, from_root))
    }

    /// V(T) ∩ V*(T)^⊥.
    pub fn left_kernel(&self) -> Subspace {
        self.v_space.intersect(&self.vstar_space.perp()).unwrap()
    }

    /// V(T)^⊥ ∩ V*(T).
    pub fn right_kernel(&self) -> Subspace {
        self.v_space.perp().intersect(&self.vstar_space).unwrap()
    }

    pub fn defect(&self) -> usize {
        self.left_kernel().dim().min(self.right_kernel().dim())
    }

    /// Span of {v_t : φ_t(x) ≠ 0}.
    fn reach_span(&self, x: &Vector) -> Subspace {
        let vs: Vec<Vector> = self
            .verts
            .iter()
            .filter(|t| !t.phi().eval(x).is_zero())
            .map(|t| t.v().clone())
            .collect();
        Subspace::span(&self.field, self.n, &vs)
    }

    /// Brute-force density check over projective points.
    ///
    /// For a point v the pairs (v, φ) without witness are exactly the nonzero φ
    /// annihilating span{v_t : φ_t(v) ≠ 0}, so one span per point suffices.
    pub fn is_dense(&self, budget: u64) -> Result<DensityCheck, GraphError> {
        check_projective_budget(&self.field, self.n, budget)?;
        for v in projective_points(&self.field, self.n) {
            let s = self.reach_span(&v);
            if !s.is_full() {
                let phi = s.perp().least_nonzero().unwrap().normalize().0.to_covector();
                return Ok(DensityCheck {
                    dense: false,
                    counterexample: Some((v, phi)),
                });
            }
        }
        Ok(DensityCheck {
            dense: true,
            counterexample: None,
        })
    }

    /// Conjugate t' of a shortest path φ → t_1 → ⋯ → t_m → v, with word
    /// t_1⋯t_{m−1} t_m t_{m−1}⁻¹⋯t_1⁻¹, so that φ → t' → v.
    pub fn shorten_path(&self, phi: &Covector, v: &Vector) -> Result<(Transvection, Word), GraphError> {
        let k = self.len();
        let is_target = |t: usize| !self.verts[t].phi().eval(v).is_zero();
        let mut parent: Vec<Option<usize>> = vec![None; k];
        let mut seen = vec![false; k];
        let mut queue = VecDeque::new();
        for t in 0..k {
            if !phi.eval(self.verts[t].v()).is_zero() {
                seen[t] = true;
                queue.push_back(t);
            }
        }
        let mut end = None;
        while let Some(t) = queue.pop_front() {
            if is_target(t) {
                end = Some(t);
                break;
            }
            for &s in &self.out[t] {
                if !seen[s] {
                    seen[s] = true;
                    parent[s] = Some(t);
                    queue.push_back(s);
                }
            }
        }
        let end = end.ok_or(GraphError::NotIrreducible)?;
        let mut path = vec![end];
        while let Some(p) = parent[*path.last().unwrap()] {
            path.push(p);
        }
        path.reverse();
        let m = path.len();
        let f = &self.field;
        let mut g = Matrix::identity(f, self.n);
        let mut ginv = Matrix::identity(f, self.n);
        for &t in &path[..m - 1] {
            g = g.mul(&self.verts[t].matrix());
            ginv = self.verts[t].inverse().matrix().mul(&ginv);
        }
        let tp = self.verts[path[m - 1]].conjugate_with(&g, &ginv);
        debug_assert!(!phi.eval(tp.v()).is_zero() && !tp.phi().eval(v).is_zero());
        let mut word: Word = path.iter().map(|&t| Letter::gen(t)).collect();
        word.extend(path[..m - 1].iter().rev().map(|&t| Letter::inv(t)));
        Ok((tp, word))
    }

    /// Lifts projected transvections back: the section onto U/W.
    pub fn restrict_to_section(&self) -> Result<SectionRestriction, GraphError> {
        if !self.is_strongly_connected() {
            return Err(GraphError::NotStronglyConnected);
        }
        let f = &self.field;
        let u = self.v_space.clone();
        let w = self.left_kernel();
        let mut chosen = w.basis();
        let mut basis = Vec::new();
        let mut acc = w.clone();
        for b in u.basis() {
            if !acc.contains(&b).unwrap() {
                acc = acc.sum(&Subspace::span(f, self.n, std::slice::from_ref(&b))).unwrap();
                chosen.push(b.clone());
                basis.push(b);
            }
        }
        let r = basis.len();
        if r == 0 {
            return Err(GraphError::TrivialSection);
        }
        let s = w.dim();
        let coords = Matrix::from_columns(f, self.n, &chosen);
        let mut projected: Vec<Transvection> = Vec::new();
        let mut index_map = Vec::with_capacity(self.len());
        for t in &self.verts {
            let (x, _) = coords.solve(t.v()).expect("v_t lies in V(T)");
            let vbar = Vector::new(f, x.entries()[s..].to_vec());
            let phibar = Covector::new(f, basis.iter().map(|b| t.phi().eval(b)).collect());
            let tb = Transvection::new(vbar, phibar).map_err(|_| GraphError::NotStronglyConnected)?;
            let pos = match projected.iter().position(|p| p == &tb) {
                Some(p) => p,
                None => {
                    projected.push(tb);
                    projected.len() - 1
                }
            };
            index_map.push(pos);
        }
        Ok(SectionRestriction {
            u,
            w,
            basis,
            projected,
            index_map,
        })
    }
}

fn check_projective_budget(field: &Field, n: usize, budget: u64) -> Result<(), GraphError> {
    let size = (field.order() as u128).pow(n as u32);
    if size > budget as u128 {
        return Err(GraphError::CapExceeded(format!(
            "q^n = {size} exceeds the projective budget {budget}"
        )));
    }
    Ok(())
}

fn is_least_rotation(c: &[usize]) -> bool {
    let k = c.len();
    (1..k).all(|r| {
        let rot = c[r..].iter().chain(&c[..r]);
        c.iter().le(rot)
    })
}

pub fn canonical_rotation(c: &[usize]) -> Vec<usize> {
    let k = c.len();
    (0..k)
        .map(|r| c[r..].iter().chain(&c[..r]).copied().collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// A dense set inside T^{2n−1} ∩ 𝔗: the input plus one shortened-path witness
/// for each projective pair lacking one.
pub fn densify(t: &[Transvection], budget: u64) -> Result<Densified, GraphError> {
    let g = TransvectionGraph::new(t.to_vec())?;
    if !g.is_irreducible() {
        return Err(GraphError::NotIrreducible);
    }
    check_projective_budget(g.field(), g.dim(), budget)?;
    let f = g.field().clone();
    let n = g.dim();
    let mut set: Vec<Transvection> = Vec::new();
    let mut words: Vec<Word> = Vec::new();
    for (i, x) in t.iter().enumerate() {
        if !set.contains(x) {
            set.push(x.clone());
            words.push(vec![Letter::gen(i)]);
        }
    }
    for v in projective_points(&f, n) {
        loop {
            let vs: Vec<Vector> = set
                .iter()
                .filter(|s| !s.phi().eval(&v).is_zero())
                .map(|s| s.v().clone())
                .collect();
            let span = Subspace::span(&f, n, &vs);
            if span.is_full() {
                break;
            }
            let phi = span.perp().least_nonzero().unwrap().normalize().0.to_covector();
            let (tp, word) = g.shorten_path(&phi, &v)?;
            debug_assert!(!set.contains(&tp));
            set.push(tp);
            words.push(word);
        }
    }
    Ok(Densified { set, words })
}

fn first_witness(dense: &[Transvection], psi: &Covector, u: &Vector) -> Option<usize> {
    dense
        .iter()
        .position(|t| !psi.eval(t.v()).is_zero() && !t.phi().eval(u).is_zero())
}

fn not_dense(u: &Vector, psi: &Covector) -> GraphError {
    GraphError::NotDense {
        v: u.raw(),
        phi: psi.raw(),
    }
}

/// Joins the components of Γ(T₀) into one using witnesses from a dense set:
/// t_i → t'_i → t_{i+1} for the component representatives t_1, …, t_k.
/// With an invariant symplectic or unitary form edges are two-way and the
/// closing witness t'_k is omitted.
pub fn connect_up(
    dense: &[Transvection],
    t0: &[Transvection],
    form_present: bool,
) -> Result<Augmented, GraphError> {
    let g0 = TransvectionGraph::new(t0.to_vec())?;
    let comps = g0.scc();
    let k = comps.len();
    let mut set = t0.to_vec();
    let mut added = Vec::new();
    if k > 1 {
        let reps: Vec<usize> = comps.iter().map(|c| c[0]).collect();
        let links = if form_present { k - 1 } else { k };
        for i in 0..links {
            let a = &t0[reps[i]];
            let b = &t0[reps[(i + 1) % k]];
            let idx = first_witness(dense, a.phi(), b.v()).ok_or_else(|| not_dense(b.v(), a.phi()))?;
            if !set.contains(&dense[idx]) {
                set.push(dense[idx].clone());
                added.push(idx);
            }
        }
    }
    Ok(Augmented {
        set,
        added,
        kernel_dims: Vec::new(),
    })
}

/// Adds density witnesses ψ → t → u for least kernel vectors u ∈ V(T)∩V*(T)^⊥
/// and ψ ∈ V(T)^⊥∩V*(T) until one kernel vanishes.
pub fn winkle(dense: &[Transvection], t0: &[Transvection]) -> Result<Augmented, GraphError> {
    let mut g = TransvectionGraph::new(t0.to_vec())?;
    if !g.is_strongly_connected() {
        return Err(GraphError::NotStronglyConnected);
    }
    let mut set = t0.to_vec();
    let mut added = Vec::new();
    let mut kernel_dims = Vec::new();
    loop {
        let kl = g.left_kernel();
        let kr = g.right_kernel();
        kernel_dims.push((kl.dim(), kr.dim()));
        if kl.is_zero() || kr.is_zero() {
            break;
        }
        let u = kl.least_nonzero().unwrap();
        let psi = kr.least_nonzero().unwrap().to_covector();
        let idx = first_witness(dense, &psi, &u).ok_or_else(|| not_dense(&u, &psi))?;
        set.push(dense[idx].clone());
        added.push(idx);
        g = TransvectionGraph::new(set.clone())?;
    }
    Ok(Augmented {
        set,
        added,
        kernel_dims,
    })
}
