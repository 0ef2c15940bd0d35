//! Invariant forms: detection from the transvection graph, quadratic forms in
//! characteristic 2, the relation form Q̃ and transvective vectors.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Field};
use crate::linalg::{Covector, Matrix, Subspace, Vector};
use crate::tgraph::{canonical_rotation, GraphError, TransvectionGraph, MAX_CYCLE_LENGTH};

/// Walk budget for looking up the first obstruction in enumeration order.
const OBSTRUCTION_SCAN_BUDGET: usize = 200_000;
/// Exhaustive search bound for [`solve_q_on_affine`].
const AFFINE_EXHAUSTIVE: u128 = 1 << 20;
const AFFINE_TRIALS: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormError {
    #[error("the generated group is not irreducible")]
    NotIrreducible,
    #[error("field has odd degree and no involution")]
    NoInvolution,
    #[error("quadratic forms need characteristic 2")]
    WrongCharacteristic,
    #[error("form is not an invariant symplectic form for the generators")]
    NotInvariantForm,
    #[error("coefficient vector has length {got}, expected {expected}")]
    IndexMismatch { expected: usize, got: usize },
    #[error("no transvective correction found")]
    NoWitness,
    #[error("no solution found on the affine subspace")]
    NotFound,
    #[error("form is degenerate")]
    Degenerate,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("graph: {0}")]
    Graph(#[from] GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Twist {
    Identity,
    Theta,
}

/// f(x, y) = xᵀ·gram·θ(y), with f(x, y) + θ(f(y, x)) = 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SesquiForm {
    gram: Matrix,
    twist: Twist,
    /// For θ-twisted forms, ε with θ(ε) = −ε; ε·f is hermitian.
    hermitian_scalar: Option<Elem>,
}

impl SesquiForm {
    pub fn new(gram: Matrix, twist: Twist) -> Result<SesquiForm, FormError> {
        let f = gram.field().clone();
        if !gram.is_square() {
            return Err(FormError::DimensionMismatch);
        }
        if twist == Twist::Theta && !f.has_involution() {
            return Err(FormError::NoInvolution);
        }
        let hermitian_scalar = match twist {
            Twist::Identity => None,
            Twist::Theta => f
                .nonzero_elements()
                .find(|&x| f.involution(x).unwrap() == f.neg(x)),
        };
        let form = SesquiForm {
            gram,
            twist,
            hermitian_scalar,
        };
        if form.gram.rank() < form.dim() {
            return Err(FormError::Degenerate);
        }
        if !form.is_antihermitian() {
            return Err(FormError::NotInvariantForm);
        }
        Ok(form)
    }

    pub fn field(&self) -> &Field {
        self.gram.field()
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn twist(&self) -> Twist {
        self.twist
    }

    pub fn hermitian_scalar(&self) -> Option<Elem> {
        self.hermitian_scalar
    }

    pub fn theta(&self, a: Elem) -> Elem {
        match self.twist {
            Twist::Identity => a,
            Twist::Theta => self.field().involution(a).unwrap(),
        }
    }

    fn twist_matrix(&self, m: &Matrix) -> Matrix {
        match self.twist {
            Twist::Identity => m.clone(),
            Twist::Theta => m.twist(),
        }
    }

    /// gram + θ(gram)ᵀ = 0, and alternating when the twist is trivial in characteristic 2.
    fn is_antihermitian(&self) -> bool {
        let f = self.field();
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                if f.add(self.gram.get(i, j), self.theta(self.gram.get(j, i))) != Elem::ZERO {
                    return false;
                }
            }
        }
        !(self.twist == Twist::Identity && f.p() == 2 && (0..n).any(|i| !self.gram.get(i, i).is_zero()))
    }

    pub fn eval(&self, x: &Vector, y: &Vector) -> Elem {
        self.dual(y).eval(x)
    }

    /// v* = f(·, v), i.e. gram·θ(v).
    pub fn dual(&self, v: &Vector) -> Covector {
        let f = self.field();
        let n = self.dim();
        let tv: Vec<Elem> = v.entries().iter().map(|&a| self.theta(a)).collect();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut s = Elem::ZERO;
            for (j, &y) in tv.iter().enumerate() {
                s = f.add(s, f.mul(self.gram.get(i, j), y));
            }
            out.push(s);
        }
        Covector::new(f, out)
    }

    /// mᵀ·gram·θ(m) = gram.
    pub fn is_preserved_by(&self, m: &Matrix) -> bool {
        m.transpose().mul(&self.gram).mul(&self.twist_matrix(m)) == self.gram
    }

    /// The form with gram c·F.
    pub fn scaled(&self, c: Elem) -> SesquiForm {
        SesquiForm {
            gram: self.gram.scale(c),
            ..self.clone()
        }
    }
}

/// Q(x) = Σ_{i≤j} coeffs[i][j]·x_i·x_j over a field of characteristic 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    coeffs: Matrix,
    polar: SesquiForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WittType {
    Plus,
    Minus,
}

impl QuadraticForm {
    /// Accepts any square matrix; entries below the diagonal are folded in.
    pub fn new(coeffs: &Matrix) -> Result<QuadraticForm, FormError> {
        let f = coeffs.field().clone();
        if f.p() != 2 {
            return Err(FormError::WrongCharacteristic);
        }
        if !coeffs.is_square() {
            return Err(FormError::DimensionMismatch);
        }
        let n = coeffs.rows();
        let mut upper = Matrix::zeros(&f, n, n);
        let mut gram = Matrix::zeros(&f, n, n);
        for i in 0..n {
            upper.set(i, i, coeffs.get(i, i));
            for j in i + 1..n {
                let c = f.add(coeffs.get(i, j), coeffs.get(j, i));
                upper.set(i, j, c);
                gram.set(i, j, c);
                gram.set(j, i, c);
            }
        }
        Ok(QuadraticForm {
            coeffs: upper,
            polar: SesquiForm::new(gram, Twist::Identity)?,
        })
    }

    /// x1x2 + x3x4 + ⋯ (plus type), with an anisotropic last plane for minus type.
    pub fn standard(field: &Field, n: usize, ty: WittType) -> Result<QuadraticForm, FormError> {
        if n % 2 == 1 || n == 0 {
            return Err(FormError::Degenerate);
        }
        let mut c = Matrix::zeros(field, n, n);
        for i in (0..n).step_by(2) {
            c.set(i, i + 1, Elem::ONE);
        }
        if ty == WittType::Minus {
            // x² + xy + αy² is anisotropic when abs_trace(α) = 1
            let alpha = field
                .elements()
                .find(|&a| field.abs_trace(a) == Elem::ONE)
                .ok_or(FormError::WrongCharacteristic)?;
            c.set(n - 2, n - 2, Elem::ONE);
            c.set(n - 1, n - 1, alpha);
        }
        QuadraticForm::new(&c)
    }

    pub fn field(&self) -> &Field {
        self.coeffs.field()
    }

    pub fn dim(&self) -> usize {
        self.coeffs.rows()
    }

    pub fn coeffs(&self) -> &Matrix {
        &self.coeffs
    }

    pub fn polar(&self) -> &SesquiForm {
        &self.polar
    }

    pub fn eval(&self, x: &Vector) -> Elem {
        let f = self.field();
        let n = self.dim();
        let mut s = Elem::ZERO;
        for i in 0..n {
            let xi = x.get(i);
            if xi.is_zero() {
                continue;
            }
            for j in i..n {
                let c = self.coeffs.get(i, j);
                if !c.is_zero() {
                    s = f.add(s, f.mul(c, f.mul(xi, x.get(j))));
                }
            }
        }
        s
    }

    pub fn is_preserved_by(&self, m: &Matrix) -> bool {
        self.polar.is_preserved_by(m)
            && (0..self.dim()).all(|i| {
                let e = Vector::unit(self.field(), self.dim(), i);
                self.eval(&m.mul_vec(&e)) == self.eval(&e)
            })
    }

    /// Arf invariant Σ Q(e_i)Q(f_i) over a symplectic basis.
    pub fn arf(&self) -> Elem {
        let f = self.field().clone();
        let b = &self.polar;
        let mut rest: Vec<Vector> = (0..self.dim()).map(|i| Vector::unit(&f, self.dim(), i)).collect();
        let mut arf = Elem::ZERO;
        while let Some(e) = rest.pop() {
            let pos = rest
                .iter()
                .position(|x| !b.eval(&e, x).is_zero())
                .expect("nondegenerate polar form");
            let x = rest.remove(pos);
            let fv = x.scale(f.inv(b.eval(&e, &x)).unwrap());
            arf = f.add(arf, f.mul(self.eval(&e), self.eval(&fv)));
            for y in rest.iter_mut() {
                let a = b.eval(y, &fv);
                let c = b.eval(y, &e);
                *y = y.add(&e.scale(a)).add(&fv.scale(c));
            }
        }
        arf
    }

    pub fn witt_type(&self) -> WittType {
        if self.field().abs_trace(self.arf()).is_zero() {
            WittType::Plus
        } else {
            WittType::Minus
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionCycle {
    pub verts: Vec<usize>,
    pub weight: Elem,
    pub defect: Elem,
}

#[derive(Clone, Debug)]
pub enum FormDetection {
    Form(SesquiForm),
    Obstruction(ObstructionCycle),
}

impl FormDetection {
    pub fn form(&self) -> Option<&SesquiForm> {
        match self {
            FormDetection::Form(f) => Some(f),
            FormDetection::Obstruction(_) => None,
        }
    }
}

fn defect(g: &TransvectionGraph, cycle: &[usize], twist: Twist) -> Elem {
    match twist {
        Twist::Identity => g.symplectic_defect(cycle),
        Twist::Theta => g.unitary_defect(cycle).unwrap(),
    }
}

fn obstruction(g: &TransvectionGraph, cycle: &[usize], twist: Twist) -> ObstructionCycle {
    let verts = canonical_rotation(cycle);
    ObstructionCycle {
        weight: g.weight(&verts),
        defect: defect(g, &verts, twist),
        verts,
    }
}

/// First nonconforming cycle of length ≤ `max_len` in enumeration order, within a small budget.
fn first_obstruction(g: &TransvectionGraph, max_len: usize, twist: Twist) -> Option<ObstructionCycle> {
    let cycles = g.cycles_up_to(max_len.min(MAX_CYCLE_LENGTH), OBSTRUCTION_SCAN_BUDGET).ok()?;
    cycles
        .into_iter()
        .find(|c| !defect(g, &c.verts, twist).is_zero())
        .map(|c| obstruction(g, &c.verts, twist))
}

/// Invariant form with f(x, y) + θ(f(y, x)) = 0 for an irreducible ⟨T⟩, or a
/// cycle of length ≤ 2D + 1 with nonzero defect.
///
/// Works over a BFS tree from vertex 0: v_t* = μ_t·φ_t where
/// μ_s = −μ_t·φ_t(v_s)/θ(φ_s(v_t)) along tree edges, then every edge is checked
/// for consistency. A failure yields the tree cycle through that edge.
pub fn detect_invariant_form(g: &TransvectionGraph, twist: Twist) -> Result<FormDetection, FormError> {
    let f = g.field().clone();
    if twist == Twist::Theta && !f.has_involution() {
        return Err(FormError::NoInvolution);
    }
    if !g.is_irreducible() {
        return Err(FormError::NotIrreducible);
    }
    let th = |a: Elem| match twist {
        Twist::Identity => a,
        Twist::Theta => f.involution(a).unwrap(),
    };
    match build_form(g, twist, &th) {
        Ok(form) => Ok(FormDetection::Form(form)),
        Err(Some(cycle)) => {
            let bound = g.diameter().map(|d| 2 * d + 1).unwrap_or(MAX_CYCLE_LENGTH);
            let obs = first_obstruction(g, bound.min(cycle.len()), twist)
                .unwrap_or_else(|| obstruction(g, &cycle, twist));
            debug_assert!(!obs.defect.is_zero());
            Ok(FormDetection::Obstruction(obs))
        }
        Err(None) => Err(FormError::NotInvariantForm),
    }
}

/// Err(Some(cycle)) for an obstruction, Err(None) if the assembled form fails verification.
fn build_form(
    g: &TransvectionGraph,
    twist: Twist,
    th: &dyn Fn(Elem) -> Elem,
) -> Result<SesquiForm, Option<Vec<usize>>> {
    let f = g.field();
    let k = g.len();
    let n = g.dim();
    // one-way edges
    for t in 0..k {
        for &s in g.out_neighbors(t) {
            if !g.has_edge(s, t) {
                let (_, parent) = g.bfs(s, false);
                let mut back = vec![t];
                let mut x = t;
                while x != s {
                    x = parent[x].expect("strongly connected");
                    back.push(x);
                }
                // back = t, …, s reversed path; cycle t → s → … → t
                back.reverse();
                let mut cycle = vec![t];
                cycle.extend_from_slice(&back[..back.len() - 1]);
                return Err(Some(cycle));
            }
        }
    }
    let mut mu: Vec<Option<Elem>> = vec![None; k];
    let mut parent: Vec<Option<usize>> = vec![None; k];
    mu[0] = Some(Elem::ONE);
    let tree_path = |parent: &[Option<usize>], s: usize| {
        let mut p = vec![s];
        let mut x = s;
        while let Some(y) = parent[x] {
            p.push(y);
            x = y;
        }
        p.reverse();
        p
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(t) = queue.pop_front() {
        let mt = mu[t].unwrap();
        for &s in g.out_neighbors(t) {
            if mu[s].is_some() {
                continue;
            }
            let ms = f.neg(f.div(f.mul(mt, g.pairing(t, s)), th(g.pairing(s, t))).unwrap());
            parent[s] = Some(t);
            if th(ms) != ms {
                let p = tree_path(&parent, s);
                let mut cycle = p.clone();
                cycle.extend(p[1..p.len() - 1].iter().rev());
                return Err(Some(cycle));
            }
            mu[s] = Some(ms);
            queue.push_back(s);
        }
    }
    let mu: Vec<Elem> = mu.into_iter().map(|m| m.expect("strongly connected")).collect();
    for t in 0..k {
        for s in t + 1..k {
            let lhs = f.add(f.mul(mu[t], g.pairing(t, s)), f.mul(mu[s], th(g.pairing(s, t))));
            if !lhs.is_zero() {
                let pt = tree_path(&parent, t);
                let ps = tree_path(&parent, s);
                let mut cycle = pt;
                cycle.extend(ps[1..].iter().rev());
                return Err(Some(cycle));
            }
        }
    }
    // gram columns e_j* = Σ θ(c_i)·μ_{b_i}·φ_{b_i} where e_j = Σ c_i v_{b_i}
    let mut basis_idx = Vec::new();
    let mut acc = Subspace::zero(f, n);
    for t in 0..k {
        let v = g.vert(t).v();
        if !acc.contains(v).unwrap() {
            acc = acc.sum(&Subspace::span(f, n, std::slice::from_ref(v))).unwrap();
            basis_idx.push(t);
        }
    }
    let cols: Vec<Vector> = basis_idx.iter().map(|&t| g.vert(t).v().clone()).collect();
    let bm = Matrix::from_columns(f, n, &cols);
    let mut gram = Matrix::zeros(f, n, n);
    for j in 0..n {
        let (c, _) = bm.solve(&Vector::unit(f, n, j)).map_err(|_| None)?;
        let mut col = Covector::zero(f, n);
        for (i, &b) in basis_idx.iter().enumerate() {
            let coef = f.mul(th(c.get(i)), mu[b]);
            if !coef.is_zero() {
                col = col.add(&g.vert(b).phi().scale(coef));
            }
        }
        for i in 0..n {
            gram.set(i, j, col.get(i));
        }
    }
    let form = SesquiForm::new(gram, twist).map_err(|_| None)?;
    if g.verts().iter().all(|t| form.is_preserved_by(&t.matrix())) {
        Ok(form)
    } else {
        Err(None)
    }
}

#[derive(Clone, Debug)]
pub enum QuadraticOutcome {
    Form {
        form: QuadraticForm,
        /// u_t with t = 1 + u_t ⊗ u_t*.
        scaled_vectors: Vec<Vector>,
    },
    /// Index of a generator t with Q(u_t) ≠ 1.
    Violating(usize),
}

/// The quadratic form polarizing to `form` with Q(u_t) = 1 on a basis of the u_t,
/// accepted iff Q(u_t) = 1 for every t.
pub fn recover_quadratic(g: &TransvectionGraph, form: &SesquiForm) -> Result<QuadraticOutcome, FormError> {
    let f = g.field().clone();
    let n = g.dim();
    if f.p() != 2 {
        return Err(FormError::WrongCharacteristic);
    }
    if form.twist() != Twist::Identity || form.dim() != n {
        return Err(FormError::NotInvariantForm);
    }
    if !g.is_irreducible() {
        return Err(FormError::NotIrreducible);
    }
    let mut us = Vec::with_capacity(g.len());
    for t in g.verts() {
        let vs = form.dual(t.v());
        let lead = vs.leading_index().ok_or(FormError::NotInvariantForm)?;
        let c = f.div(t.phi().get(lead), vs.get(lead)).unwrap();
        if vs.scale(c) != *t.phi() {
            return Err(FormError::NotInvariantForm);
        }
        us.push(t.v().scale(f.sqrt_char2(c)));
    }
    let mut basis: Vec<Vector> = Vec::new();
    let mut acc = Subspace::zero(&f, n);
    for u in &us {
        if !acc.contains(u).unwrap() {
            acc = acc.sum(&Subspace::span(&f, n, std::slice::from_ref(u))).unwrap();
            basis.push(u.clone());
        }
    }
    if basis.len() < n {
        return Err(FormError::NotIrreducible);
    }
    let bm = Matrix::from_columns(&f, n, &basis);
    let mut coeffs = Matrix::zeros(&f, n, n);
    for i in 0..n {
        let (c, _) = bm.solve(&Vector::unit(&f, n, i)).unwrap();
        // Q(Σ c_k u_k) = Σ c_k² + Σ_{k<l} c_k c_l f(u_k, u_l)
        let mut q = Elem::ZERO;
        for a in 0..n {
            q = f.add(q, f.mul(c.get(a), c.get(a)));
            for b in a + 1..n {
                let term = f.mul(f.mul(c.get(a), c.get(b)), form.eval(&basis[a], &basis[b]));
                q = f.add(q, term);
            }
        }
        coeffs.set(i, i, q);
        for j in i + 1..n {
            coeffs.set(i, j, form.gram().get(i, j));
        }
    }
    let qf = QuadraticForm::new(&coeffs)?;
    if let Some(bad) = us.iter().position(|u| qf.eval(u) != Elem::ONE) {
        return Ok(QuadraticOutcome::Violating(bad));
    }
    Ok(QuadraticOutcome::Form {
        form: qf,
        scaled_vectors: us,
    })
}

/// Q̃ and f̃ on coefficient vectors indexed by a list of vectors v_t.
#[derive(Clone, Debug)]
pub struct RelationForm {
    pub form: SesquiForm,
    pub vectors: Vec<Vector>,
}

impl RelationForm {
    fn check_len(&self, lambda: &[Elem]) -> Result<(), FormError> {
        if lambda.len() != self.vectors.len() {
            return Err(FormError::IndexMismatch {
                expected: self.vectors.len(),
                got: lambda.len(),
            });
        }
        Ok(())
    }

    /// Q̃(λ) = Σ λ_t² + Σ_{t<s} λ_t λ_s f(v_t, v_s).
    pub fn tilde_q(&self, lambda: &[Elem]) -> Result<Elem, FormError> {
        self.check_len(lambda)?;
        let f = self.form.field();
        let m = lambda.len();
        let mut s = Elem::ZERO;
        for t in 0..m {
            if lambda[t].is_zero() {
                continue;
            }
            s = f.add(s, f.mul(lambda[t], lambda[t]));
            for u in t + 1..m {
                if !lambda[u].is_zero() {
                    let c = f.mul(lambda[t], lambda[u]);
                    s = f.add(s, f.mul(c, self.form.eval(&self.vectors[t], &self.vectors[u])));
                }
            }
        }
        Ok(s)
    }

    /// f̃(λ, λ') = Σ_{t<s} (λ_t λ'_s + λ'_t λ_s) f(v_t, v_s).
    pub fn tilde_f(&self, a: &[Elem], b: &[Elem]) -> Result<Elem, FormError> {
        self.check_len(a)?;
        self.check_len(b)?;
        let f = self.form.field();
        let m = a.len();
        let mut s = Elem::ZERO;
        for t in 0..m {
            for u in t + 1..m {
                let c = f.add(f.mul(a[t], b[u]), f.mul(b[t], a[u]));
                if !c.is_zero() {
                    s = f.add(s, f.mul(c, self.form.eval(&self.vectors[t], &self.vectors[u])));
                }
            }
        }
        Ok(s)
    }

    /// Σ λ_t v_t = 0 implies Q̃(λ) = 0.
    pub fn relation_check(&self, lambda: &[Elem]) -> Result<bool, FormError> {
        self.check_len(lambda)?;
        let f = self.form.field();
        let n = self.form.dim();
        let sum = self
            .vectors
            .iter()
            .zip(lambda)
            .fold(Vector::zero(f, n), |acc, (v, &c)| acc.add(&v.scale(c)));
        if !sum.is_zero() {
            return Ok(true);
        }
        Ok(self.tilde_q(lambda)?.is_zero())
    }
}

/// The geometry in which transvective vectors are taken.
#[derive(Clone, Debug)]
pub enum ClassicalSpace {
    Linear,
    Symplectic(SesquiForm),
    Unitary(SesquiForm),
    Orthogonal(QuadraticForm),
}

pub fn is_transvective(v: &Vector, space: &ClassicalSpace) -> bool {
    if v.is_zero() {
        return false;
    }
    match space {
        ClassicalSpace::Linear | ClassicalSpace::Symplectic(_) => true,
        ClassicalSpace::Unitary(form) => form.eval(v, v).is_zero(),
        ClassicalSpace::Orthogonal(q) => !q.eval(v).is_zero(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixup {
    pub i: usize,
    pub j: usize,
    pub lambda: Elem,
    pub mu: Elem,
    pub result: Vector,
}

/// Indices i, j and scalars λ, μ with v − λ·parts[i] − μ·parts[j] transvective.
pub fn transvective_fixup(v: &Vector, parts: &[Vector], space: &ClassicalSpace) -> Result<Fixup, FormError> {
    if is_transvective(v, space) || parts.is_empty() {
        return if is_transvective(v, space) {
            Ok(Fixup {
                i: 0,
                j: 0,
                lambda: Elem::ZERO,
                mu: Elem::ZERO,
                result: v.clone(),
            })
        } else {
            Err(FormError::NoWitness)
        };
    }
    let f = v.field().clone();
    // one index, μ = 0
    for (i, p) in parts.iter().enumerate() {
        for lambda in f.nonzero_elements() {
            let w = v.sub(&p.scale(lambda));
            if is_transvective(&w, space) {
                return Ok(Fixup {
                    i,
                    j: i,
                    lambda,
                    mu: Elem::ZERO,
                    result: w,
                });
            }
        }
    }
    // two indices; the q = 2 orthogonal case needs λ = μ = 1
    let scalars: Vec<Elem> = if f.order() <= 16 {
        f.nonzero_elements().collect()
    } else {
        vec![Elem::ONE]
    };
    for i in 0..parts.len() {
        for j in i + 1..parts.len() {
            for &lambda in &scalars {
                for &mu in &scalars {
                    let w = v.sub(&parts[i].scale(lambda)).sub(&parts[j].scale(mu));
                    if is_transvective(&w, space) {
                        return Ok(Fixup {
                            i,
                            j,
                            lambda,
                            mu,
                            result: w,
                        });
                    }
                }
            }
        }
    }
    Err(FormError::NoWitness)
}

/// Writes a transvective v as a sum of at most four transvective vectors, each
/// of support ≤ s(v)/2 + 2 in `basis`. Zero summands are dropped.
pub fn transvective_split(v: &Vector, basis: &[Vector], space: &ClassicalSpace) -> Result<Vec<Vector>, FormError> {
    let f = v.field().clone();
    let n = v.dim();
    if basis.len() != n {
        return Err(FormError::DimensionMismatch);
    }
    let bm = Matrix::from_columns(&f, n, basis);
    let (x, _) = bm.solve(v).map_err(|_| FormError::DimensionMismatch)?;
    let support: Vec<usize> = (0..n).filter(|&i| !x.get(i).is_zero()).collect();
    let k = support.len();
    let half = k.div_ceil(2);
    let term = |i: usize, c: Elem| basis[i].scale(c);
    let coeffs_of = |idx: &[usize]| idx.iter().map(|&i| (i, x.get(i))).collect::<Vec<_>>();
    let combine = |terms: &[(usize, Elem)]| {
        terms
            .iter()
            .fold(Vector::zero(&f, n), |acc, &(i, c)| acc.add(&term(i, c)))
    };
    // u1 gets the larger half
    let t1 = coeffs_of(&support[..half]);
    let t2 = coeffs_of(&support[half..]);
    let u1 = combine(&t1);
    let parts1: Vec<Vector> = t1.iter().map(|&(i, c)| term(i, c)).collect();
    let fx1 = transvective_fixup(&u1, &parts1, space)?;
    let v1 = fx1.result.clone();
    // u2' = u2 + λ·part_i + μ·part_j, as terms on the basis
    let mut t2p = t2.clone();
    for (idx, s) in [(fx1.i, fx1.lambda), (fx1.j, fx1.mu)] {
        if s.is_zero() {
            continue;
        }
        let (bi, c) = t1[idx];
        let add = f.mul(s, c);
        match t2p.iter_mut().find(|(i, _)| *i == bi) {
            Some(e) => e.1 = f.add(e.1, add),
            None => t2p.push((bi, add)),
        }
    }
    t2p.retain(|&(_, c)| !c.is_zero());
    let u2p = combine(&t2p);
    let mut out = vec![v1];
    if !u2p.is_zero() {
        let parts2: Vec<Vector> = t2p.iter().map(|&(i, c)| term(i, c)).collect();
        let fx2 = transvective_fixup(&u2p, &parts2, space)?;
        out.push(fx2.result.clone());
        let v3 = parts2.get(fx2.i).map(|p| p.scale(fx2.lambda));
        let v4 = parts2.get(fx2.j).map(|p| p.scale(fx2.mu));
        out.extend([v3, v4].into_iter().flatten().filter(|w| !w.is_zero()));
    }
    debug_assert_eq!(out.iter().fold(Vector::zero(&f, n), |a, w| a.add(w)), *v);
    if out.iter().any(|w| !is_transvective(w, space)) {
        return Err(FormError::NoWitness);
    }
    Ok(out)
}

/// Some x ∈ w + H with Q(x) = c: exhaustive on small H, otherwise random trials.
pub fn solve_q_on_affine(
    q: &QuadraticForm,
    w: &Vector,
    h: &Subspace,
    c: Elem,
    seed: u64,
) -> Result<Vector, FormError> {
    if q.eval(w) == c {
        return Ok(w.clone());
    }
    let f = q.field().clone();
    let basis = h.basis();
    let size = (f.order() as u128).pow(basis.len() as u32);
    let point = |coefs: &[Elem]| {
        basis
            .iter()
            .zip(coefs)
            .fold(w.clone(), |acc, (b, &a)| acc.add(&b.scale(a)))
    };
    if size <= AFFINE_EXHAUSTIVE {
        let qo = f.order() as u128;
        for code in 0..size {
            let mut m = code;
            let coefs: Vec<Elem> = (0..basis.len())
                .map(|_| {
                    let e = Elem((m % qo) as u32);
                    m /= qo;
                    e
                })
                .collect();
            let x = point(&coefs);
            if q.eval(&x) == c {
                return Ok(x);
            }
        }
        return Err(FormError::NotFound);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..AFFINE_TRIALS {
        let coefs: Vec<Elem> = (0..basis.len()).map(|_| Elem(rng.gen_range(0..f.order()))).collect();
        let x = point(&coefs);
        if q.eval(&x) == c {
            return Ok(x);
        }
    }
    Err(FormError::NotFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transvection::{standard_full_field_set, FullFieldKind, Transvection};
    use proptest::prelude::*;

    fn gf(p: u64, f: u32) -> Field {
        Field::new(p, f).unwrap()
    }

    fn tv(f: &Field, v: &[u32], phi: &[u32]) -> Transvection {
        Transvection::from_raw(f, v, phi).unwrap()
    }

    /// All transvections preserving the alternating form with gram `j`.
    fn symplectic_transvections(f: &Field, j: &Matrix) -> Vec<Transvection> {
        let form = SesquiForm::new(j.clone(), Twist::Identity).unwrap();
        let n = j.rows();
        let mut out = Vec::new();
        for v in crate::linalg::projective_points(f, n) {
            for c in f.nonzero_elements() {
                out.push(Transvection::new(v.clone(), form.dual(&v).scale(c)).unwrap());
            }
        }
        out
    }

    fn hyperbolic(f: &Field, n: usize) -> Matrix {
        let mut j = Matrix::zeros(f, n, n);
        for i in (0..n).step_by(2) {
            j.set(i, i + 1, Elem::ONE);
            j.set(i + 1, i, f.neg(Elem::ONE));
        }
        j
    }

    #[test]
    fn sp4_2_form_recovered() {
        let f2 = gf(2, 1);
        let t = symplectic_transvections(&f2, &hyperbolic(&f2, 4));
        assert_eq!(t.len(), 15);
        let g = TransvectionGraph::new(t.clone()).unwrap();
        let form = match detect_invariant_form(&g, Twist::Identity).unwrap() {
            FormDetection::Form(form) => form,
            FormDetection::Obstruction(o) => panic!("unexpected obstruction {o:?}"),
        };
        for x in &t {
            assert!(form.is_preserved_by(&x.matrix()));
        }
        // the form is unique up to scalar, hence equal to the hyperbolic gram over GF(2)
        assert_eq!(form.gram(), &hyperbolic(&f2, 4));
    }

    #[test]
    fn su3_form_recovered() {
        for (p, d) in [(2, 2), (3, 2)] {
            let f = gf(p, d);
            let t = standard_full_field_set(FullFieldKind::SU3, &f, 3).unwrap();
            let g = TransvectionGraph::new(t.clone()).unwrap();
            let form = detect_invariant_form(&g, Twist::Theta).unwrap();
            let form = form.form().expect("unitary form");
            for x in &t {
                assert!(form.is_preserved_by(&x.matrix()));
            }
            let eps = form.hermitian_scalar().unwrap();
            assert_eq!(f.involution(eps).unwrap(), f.neg(eps));
        }
    }

    #[test]
    fn non_symplectic_cycle_obstruction() {
        // SL₃(4)-type: e1→e2→e3→e1 one-way triangle plus the λ = ω pair
        let f4 = gf(2, 2);
        let t = vec![
            tv(&f4, &[1, 0, 0], &[0, 2, 0]),
            tv(&f4, &[0, 1, 0], &[1, 0, 0]),
            tv(&f4, &[0, 0, 1], &[0, 1, 0]),
            tv(&f4, &[0, 1, 0], &[0, 0, 1]),
            tv(&f4, &[1, 0, 0], &[0, 0, 1]),
        ];
        let g = TransvectionGraph::new(t).unwrap();
        assert!(g.is_irreducible());
        match detect_invariant_form(&g, Twist::Identity).unwrap() {
            FormDetection::Obstruction(o) => {
                assert!(o.verts.len() <= 5);
                assert!(!o.defect.is_zero());
                assert_eq!(g.symplectic_defect(&o.verts), o.defect);
            }
            FormDetection::Form(_) => panic!("expected an obstruction"),
        }
    }

    #[test]
    fn unitary_twist_rejected_on_odd_degree() {
        let f2 = gf(2, 1);
        let g = TransvectionGraph::new(vec![tv(&f2, &[1, 0], &[0, 1]), tv(&f2, &[0, 1], &[1, 0])]).unwrap();
        assert_eq!(detect_invariant_form(&g, Twist::Theta).unwrap_err(), FormError::NoInvolution);
    }

    fn reflections(q: &QuadraticForm) -> Vec<Transvection> {
        crate::linalg::projective_points(q.field(), q.dim())
            .into_iter()
            .filter(|u| q.eval(u) == Elem::ONE)
            .map(|u| Transvection::new(u.clone(), q.polar().dual(&u)).unwrap())
            .collect()
    }

    #[test]
    fn quadratic_recovered_on_orthogonal_sets() {
        let f2 = gf(2, 1);
        for (n, ty, count) in [(4, WittType::Minus, 10), (6, WittType::Plus, 28), (6, WittType::Minus, 36)] {
            let q = QuadraticForm::standard(&f2, n, ty).unwrap();
            let t = reflections(&q);
            assert_eq!(t.len(), count);
            let g = TransvectionGraph::new(t).unwrap();
            assert!(g.is_irreducible());
            let form = detect_invariant_form(&g, Twist::Identity).unwrap().form().unwrap().clone();
            match recover_quadratic(&g, &form).unwrap() {
                QuadraticOutcome::Form { form, .. } => {
                    assert_eq!(form, q);
                    assert_eq!(form.witt_type(), ty);
                }
                QuadraticOutcome::Violating(i) => panic!("violating {i}"),
            }
        }
    }

    #[test]
    fn o4_plus_reflections_are_reducible() {
        let f2 = gf(2, 1);
        let q = QuadraticForm::standard(&f2, 4, WittType::Plus).unwrap();
        let g = TransvectionGraph::new(reflections(&q)).unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.scc().len(), 2);
        assert_eq!(
            detect_invariant_form(&g, Twist::Identity).unwrap_err(),
            FormError::NotIrreducible
        );
    }

    #[test]
    fn sp4_2_has_no_quadratic_form() {
        let f2 = gf(2, 1);
        let t = symplectic_transvections(&f2, &hyperbolic(&f2, 4));
        let g = TransvectionGraph::new(t).unwrap();
        let form = detect_invariant_form(&g, Twist::Identity).unwrap().form().unwrap().clone();
        assert!(matches!(recover_quadratic(&g, &form).unwrap(), QuadraticOutcome::Violating(_)));
    }

    #[test]
    fn witt_type_matches_singular_count() {
        for (p, d, n) in [(2u64, 1u32, 2usize), (2, 1, 4), (2, 1, 6), (2, 2, 2), (2, 2, 4)] {
            let f = gf(p, d);
            let qn = f.order() as i64;
            for ty in [WittType::Plus, WittType::Minus] {
                let q = QuadraticForm::standard(&f, n, ty).unwrap();
                assert_eq!(q.witt_type(), ty);
                let zeros = Subspace::full(&f, n).elements().iter().filter(|x| q.eval(x).is_zero()).count() as i64;
                let m = (n / 2) as u32;
                let sign = if ty == WittType::Plus { 1 } else { -1 };
                assert_eq!(zeros, qn.pow(n as u32 - 1) + sign * (qn.pow(m) - qn.pow(m - 1)));
            }
        }
    }

    #[test]
    fn relation_form_examples() {
        let f2 = gf(2, 1);
        let q = QuadraticForm::standard(&f2, 4, WittType::Plus).unwrap();
        let us: Vec<Vector> = crate::linalg::projective_points(&f2, 4)
            .into_iter()
            .filter(|u| q.eval(u) == Elem::ONE)
            .collect();
        let ctx = RelationForm {
            form: q.polar().clone(),
            vectors: us.clone(),
        };
        let m = us.len();
        assert_eq!(ctx.tilde_q(&vec![Elem::ZERO; m]).unwrap(), Elem::ZERO);
        let mut ind = vec![Elem::ZERO; m];
        ind[2] = Elem::ONE;
        assert_eq!(ctx.tilde_q(&ind).unwrap(), Elem::ONE);
        assert!(ctx.tilde_q(&[Elem::ONE]).is_err());
        // every kernel relation among the u's satisfies Q̃ = 0
        let vm = Matrix::from_columns(&f2, 4, &us);
        let ker = Subspace::span(&f2, m, &vm.kernel());
        for lambda in ker.elements() {
            assert!(ctx.relation_check(lambda.entries()).unwrap());
        }
    }

    #[test]
    fn transvective_examples() {
        let f2 = gf(2, 1);
        let q = QuadraticForm::standard(&f2, 4, WittType::Plus).unwrap();
        let orth = ClassicalSpace::Orthogonal(q.clone());
        assert!(!is_transvective(&Vector::unit(&f2, 4, 0), &orth));
        let sp = ClassicalSpace::Symplectic(q.polar().clone());
        assert!(is_transvective(&Vector::unit(&f2, 4, 0), &sp));

        let f4 = gf(2, 2);
        let mut u = Matrix::zeros(&f4, 2, 2);
        u.set(0, 1, Elem::ONE);
        u.set(1, 0, Elem::ONE);
        let uf = SesquiForm::new(u, Twist::Theta).unwrap();
        let un = ClassicalSpace::Unitary(uf.clone());
        let e1 = Vector::unit(&f4, 2, 0);
        let e2 = Vector::unit(&f4, 2, 1);
        assert!(is_transvective(&e1, &un));
        assert!(is_transvective(&e1.add(&e2), &un));
        let v = e1.add(&e2.scale(Elem(2)));
        assert!(!is_transvective(&v, &un));
        let fx = transvective_fixup(&v, &[e1.clone(), e2.clone()], &un).unwrap();
        assert_eq!(fx.mu, Elem::ZERO);
        let tr = f4.trace_to_half(f4.mul(fx.lambda, uf.eval(&[e1, e2][fx.i], &v))).unwrap();
        assert_eq!(tr, uf.eval(&v, &v));
        assert!(is_transvective(&fx.result, &un));
    }

    #[test]
    fn orthogonal_two_index_fixup() {
        // Q(v) = 0 and f(v, v_i) = 1 for every part: no single-index correction over GF(2)
        let f2 = gf(2, 1);
        let mut found = None;
        'search: for n in [4, 6] {
            let q = QuadraticForm::standard(&f2, n, WittType::Plus).unwrap();
            let nonsing: Vec<Vector> = crate::linalg::projective_points(&f2, n)
                .into_iter()
                .filter(|u| q.eval(u) == Elem::ONE)
                .collect();
            let m = nonsing.len();
            for a in 0..m {
                for b in a + 1..m {
                    for c in b + 1..m {
                        for d in c + 1..=m {
                            let mut parts = vec![nonsing[a].clone(), nonsing[b].clone(), nonsing[c].clone()];
                            if d < m {
                                parts.push(nonsing[d].clone());
                            }
                            let v = parts.iter().fold(Vector::zero(&f2, n), |x, p| x.add(p));
                            if !v.is_zero()
                                && q.eval(&v).is_zero()
                                && parts.iter().all(|p| q.polar().eval(&v, p) == Elem::ONE)
                            {
                                found = Some((q.clone(), v, parts));
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        let (q, v, parts) = found.expect("a configuration needing two indices");
        let space = ClassicalSpace::Orthogonal(q);
        for p in &parts {
            assert!(!is_transvective(&v.sub(p), &space));
        }
        let fx = transvective_fixup(&v, &parts, &space).unwrap();
        assert_ne!(fx.i, fx.j);
        assert!(is_transvective(&fx.result, &space));
    }

    #[test]
    fn split_orthogonal_six() {
        let f2 = gf(2, 1);
        let q = QuadraticForm::standard(&f2, 6, WittType::Plus).unwrap();
        let space = ClassicalSpace::Orthogonal(q.clone());
        let nonsing: Vec<Vector> = crate::linalg::projective_points(&f2, 6)
            .into_iter()
            .filter(|u| q.eval(u) == Elem::ONE)
            .collect();
        // greedy transvective bases from rotated starting points until Σ b_i is nonsingular
        let (basis, v) = (0..nonsing.len())
            .find_map(|start| {
                let mut basis: Vec<Vector> = Vec::new();
                for k in 0..nonsing.len() {
                    let u = &nonsing[(start + k) % nonsing.len()];
                    let mut trial = basis.clone();
                    trial.push(u.clone());
                    if Matrix::from_columns(&f2, 6, &trial).rank() == trial.len() {
                        basis = trial;
                    }
                }
                let v = basis.iter().fold(Vector::zero(&f2, 6), |a, b| a.add(b));
                (basis.len() == 6 && is_transvective(&v, &space)).then_some((basis, v))
            })
            .unwrap();
        let parts = transvective_split(&v, &basis, &space).unwrap();
        assert!(parts.len() <= 4);
        let bm = Matrix::from_columns(&f2, 6, &basis);
        for p in &parts {
            assert!(is_transvective(p, &space));
            assert!(bm.solve(p).unwrap().0.support() <= 5);
        }
        assert_eq!(parts.iter().fold(Vector::zero(&f2, 6), |a, b| a.add(b)), v);
    }

    #[test]
    fn affine_quadratic_solutions() {
        let f2 = gf(2, 1);
        let q = QuadraticForm::standard(&f2, 10, WittType::Plus).unwrap();
        let w = Vector::unit(&f2, 10, 0);
        // H = {x : x_0 = x_3 = 0}
        let h = Subspace::span(
            &f2,
            10,
            &[1, 2, 4, 5, 6, 7, 8, 9].map(|i| Vector::unit(&f2, 10, i)),
        );
        assert_eq!(solve_q_on_affine(&q, &w, &h, Elem::ZERO, 1).unwrap(), w);
        let x = solve_q_on_affine(&q, &w, &h, Elem::ONE, 1).unwrap();
        assert_eq!(q.eval(&x), Elem::ONE);
        assert!(h.contains(&x.sub(&w)).unwrap());
    }

    proptest! {
        #[test]
        fn polarization(entries in proptest::collection::vec(0u32..4, 16), x in proptest::collection::vec(0u32..4, 4), y in proptest::collection::vec(0u32..4, 4)) {
            let f4 = gf(2, 2);
            let mut c = Matrix::from_data(&f4, 4, 4, entries.into_iter().map(Elem).collect());
            // force a nondegenerate polar part
            for i in (0..4).step_by(2) {
                c.set(i, i + 1, Elem::ONE);
                c.set(i + 1, i, Elem::ZERO);
            }
            for i in 0..4 { for j in 0..i { c.set(i, j, Elem::ZERO); } }
            c.set(0, 2, Elem::ZERO); c.set(0, 3, Elem::ZERO); c.set(1, 2, Elem::ZERO); c.set(1, 3, Elem::ZERO);
            let q = QuadraticForm::new(&c).unwrap();
            let x = Vector::from_raw(&f4, &x);
            let y = Vector::from_raw(&f4, &y);
            let lhs = f4.sub(f4.sub(q.eval(&x.add(&y)), q.eval(&x)), q.eval(&y));
            prop_assert_eq!(lhs, q.polar().eval(&x, &y));
        }
    }
}
