//! Enumeration, type classification of irreducible transvection groups,
//! monomial and symmetric detectors, and certificates.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forms::{
    detect_invariant_form, recover_quadratic, FormDetection, FormError, ObstructionCycle, QuadraticForm,
    QuadraticOutcome, SesquiForm, Twist, WittType,
};
use crate::gf::{Elem, Field};
use crate::group::{closure, Closure, GroupError, DEFAULT_ELEMENT_CAP};
use crate::linalg::{projective_points, LinalgError, Covector, Matrix, Subspace, Vector};
use crate::tgraph::{
    connect_up, densify, winkle, CycleRecord, GraphError, TransvectionGraph, DEFAULT_PROJECTIVE_BUDGET,
};
use crate::transvection::{Transvection, TransvectionJson, TvError};
use crate::word::{evaluate, signed_word, Letter};

pub const DEFAULT_EXCLUSION_LIMIT: usize = 32;
pub const DEFAULT_CERTIFICATE_LIMIT: usize = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("the generated group is not irreducible")]
    NotIrreducible,
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("no order formula for {0}")]
    UnsupportedTag(String),
    #[error("GF(2) required (got GF({0}))")]
    WrongField(u32),
    #[error("budget exceeded: {0}")]
    CapExceeded(String),
    #[error("certificates need a classical tag (got {0})")]
    NotClassical(String),
    #[error("certificate has {0} elements, above the limit")]
    CertificateTooLarge(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Transvection(#[from] TvError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum GroupTypeTag {
    Linear,
    Unitary,
    Symplectic,
    OrthogonalPlus,
    OrthogonalMinus,
    Monomial(u64),
    SymmetricOdd,
    SymmetricEven,
    Exceptional(String),
    Undetermined,
}

impl GroupTypeTag {
    pub fn is_classical(&self) -> bool {
        matches!(
            self,
            GroupTypeTag::Linear
                | GroupTypeTag::Unitary
                | GroupTypeTag::Symplectic
                | GroupTypeTag::OrthogonalPlus
                | GroupTypeTag::OrthogonalMinus
        )
    }

    /// Position in the containment lattice; larger is more special.
    fn speciality(&self) -> u8 {
        match self {
            GroupTypeTag::Linear => 0,
            GroupTypeTag::Symplectic | GroupTypeTag::Unitary => 1,
            GroupTypeTag::OrthogonalPlus | GroupTypeTag::OrthogonalMinus => 2,
            GroupTypeTag::SymmetricEven | GroupTypeTag::Monomial(_) => 3,
            GroupTypeTag::SymmetricOdd => 4,
            GroupTypeTag::Exceptional(_) => 5,
            GroupTypeTag::Undetermined => 6,
        }
    }
}

impl fmt::Display for GroupTypeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupTypeTag::Monomial(a) => write!(f, "Monomial({a})"),
            GroupTypeTag::Exceptional(l) => write!(f, "Exceptional({l})"),
            other => write!(f, "{other:?}"),
        }
    }
}

impl FromStr for GroupTypeTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let inner = |pre: &str| s.strip_prefix(pre).and_then(|r| r.strip_suffix(')'));
        if let Some(a) = inner("Monomial(") {
            return a.parse().map(GroupTypeTag::Monomial).map_err(|e| format!("{s}: {e}"));
        }
        if let Some(l) = inner("Exceptional(") {
            return Ok(GroupTypeTag::Exceptional(l.to_string()));
        }
        Ok(match s {
            "Linear" => GroupTypeTag::Linear,
            "Unitary" => GroupTypeTag::Unitary,
            "Symplectic" => GroupTypeTag::Symplectic,
            "OrthogonalPlus" => GroupTypeTag::OrthogonalPlus,
            "OrthogonalMinus" => GroupTypeTag::OrthogonalMinus,
            "SymmetricOdd" => GroupTypeTag::SymmetricOdd,
            "SymmetricEven" => GroupTypeTag::SymmetricEven,
            "Undetermined" => GroupTypeTag::Undetermined,
            _ => return Err(format!("unknown tag {s:?}")),
        })
    }
}

impl From<GroupTypeTag> for String {
    fn from(t: GroupTypeTag) -> String {
        t.to_string()
    }
}

impl TryFrom<String> for GroupTypeTag {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

fn overflow() -> ClassifyError {
    ClassifyError::BadParameters("order does not fit in 128 bits".into())
}

fn factorial(k: usize) -> Result<u128, ClassifyError> {
    (1..=k as u128).try_fold(1u128, |acc, i| acc.checked_mul(i)).ok_or_else(overflow)
}

fn isqrt(q: u64) -> Option<u64> {
    let r = (q as f64).sqrt().round() as u64;
    (r.saturating_sub(1)..=r + 1).find(|&s| s * s == q)
}

/// Order of the group of the given type in dimension `n` over GF(q).
pub fn order_formula(tag: &GroupTypeTag, n: usize, q: u64) -> Result<u128, ClassifyError> {
    let qq = q as u128;
    let pow = |b: u128, e: usize| -> Result<u128, ClassifyError> {
        u32::try_from(e).ok().and_then(|e| b.checked_pow(e)).ok_or_else(overflow)
    };
    let mul = |a: u128, b: u128| a.checked_mul(b).ok_or_else(overflow);
    let even = |what: &str| -> Result<usize, ClassifyError> {
        if n == 0 || n % 2 == 1 {
            Err(ClassifyError::BadParameters(format!("{what} needs even n (got {n})")))
        } else {
            Ok(n / 2)
        }
    };
    if n == 0 {
        return Err(ClassifyError::BadParameters("n = 0".into()));
    }
    match tag {
        GroupTypeTag::Linear => {
            let mut o = pow(qq, n * (n - 1) / 2)?;
            for i in 2..=n {
                o = mul(o, pow(qq, i)? - 1)?;
            }
            Ok(o)
        }
        GroupTypeTag::Symplectic => {
            let m = even("Sp")?;
            let mut o = pow(qq, m * m)?;
            for i in 1..=m {
                o = mul(o, pow(qq, 2 * i)? - 1)?;
            }
            Ok(o)
        }
        GroupTypeTag::Unitary => {
            let q0 = isqrt(q).ok_or_else(|| ClassifyError::BadParameters(format!("q = {q} is not a square")))? as u128;
            let mut o = pow(q0, n * (n - 1) / 2)?;
            for i in 2..=n {
                let t = pow(q0, i)?;
                o = mul(o, if i % 2 == 0 { t - 1 } else { t + 1 })?;
            }
            Ok(o)
        }
        GroupTypeTag::OrthogonalPlus | GroupTypeTag::OrthogonalMinus => {
            let m = even("O")?;
            let qm = pow(qq, m)?;
            let mut o = mul(2, pow(qq, m * (m - 1))?)?;
            o = mul(o, if *tag == GroupTypeTag::OrthogonalPlus { qm - 1 } else { qm + 1 })?;
            for i in 1..m {
                o = mul(o, pow(qq, 2 * i)? - 1)?;
            }
            Ok(o)
        }
        GroupTypeTag::Monomial(a) => {
            let a = *a;
            if a < 2 || q < 2 || !(q - 1).is_multiple_of(a) {
                return Err(ClassifyError::BadParameters(format!("a = {a} must divide q - 1 = {}", q - 1)));
            }
            mul(pow(a as u128, n - 1)?, factorial(n)?)
        }
        GroupTypeTag::SymmetricOdd => factorial(n + 1),
        GroupTypeTag::SymmetricEven => factorial(n + 2),
        GroupTypeTag::Exceptional(_) | GroupTypeTag::Undetermined => Err(ClassifyError::UnsupportedTag(tag.to_string())),
    }
}

/// Closure of `gens` within `cap` elements.
pub fn enumerate_group(field: &Field, n: usize, gens: &[Matrix], cap: usize) -> Result<Closure, ClassifyError> {
    if gens.iter().any(|g| g.det().map(|d| d.is_zero()).unwrap_or(true)) {
        return Err(GroupError::BadGenerator.into());
    }
    Ok(closure(field, n, gens, cap)?)
}

/// Full transvection sets of the classical groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassicalKind {
    Linear,
    Symplectic,
    Unitary,
    OrthogonalPlus,
    OrthogonalMinus,
}

impl ClassicalKind {
    pub fn tag(self) -> GroupTypeTag {
        match self {
            ClassicalKind::Linear => GroupTypeTag::Linear,
            ClassicalKind::Symplectic => GroupTypeTag::Symplectic,
            ClassicalKind::Unitary => GroupTypeTag::Unitary,
            ClassicalKind::OrthogonalPlus => GroupTypeTag::OrthogonalPlus,
            ClassicalKind::OrthogonalMinus => GroupTypeTag::OrthogonalMinus,
        }
    }
}

/// Hyperbolic pairs (0,1), (2,3), …; for n odd the last coordinate is anisotropic.
fn hyperbolic_gram(field: &Field, n: usize, alternating: bool) -> Matrix {
    let mut g = Matrix::zeros(field, n, n);
    for i in (0..n - 1).step_by(2) {
        g.set(i, i + 1, Elem::ONE);
        g.set(i + 1, i, if alternating { field.neg(Elem::ONE) } else { Elem::ONE });
    }
    if n % 2 == 1 {
        g.set(n - 1, n - 1, Elem::ONE);
    }
    g
}

/// Every transvection of SL_n(q), Sp_n(q), SU_n(q₀) or O^±_n(q) (q even) for
/// the standard forms.
pub fn classical_transvections(kind: ClassicalKind, field: &Field, n: usize) -> Result<Vec<Transvection>, ClassifyError> {
    let f = field;
    let bad = |m: String| ClassifyError::BadParameters(m);
    if n < 2 {
        return Err(bad(format!("n = {n}")));
    }
    if (f.order() as u128).pow(n as u32) > DEFAULT_PROJECTIVE_BUDGET as u128 {
        return Err(ClassifyError::CapExceeded(format!("q^n for GF({})^{n}", f.order())));
    }
    let points = projective_points(f, n);
    let mut out = Vec::new();
    match kind {
        ClassicalKind::Linear => {
            let covs = Subspace::full(f, n).elements();
            for v in &points {
                for c in &covs {
                    let phi = c.to_covector();
                    if !phi.is_zero() && phi.eval(v).is_zero() {
                        out.push(Transvection::new(v.clone(), phi)?);
                    }
                }
            }
        }
        ClassicalKind::Symplectic | ClassicalKind::Unitary => {
            let twist = if kind == ClassicalKind::Symplectic { Twist::Identity } else { Twist::Theta };
            if twist == Twist::Identity && n % 2 == 1 {
                return Err(bad(format!("Sp needs even n (got {n})")));
            }
            if twist == Twist::Theta && !f.has_involution() {
                return Err(bad(format!("SU needs a field of even degree (got GF({}))", f.order())));
            }
            let (gram, scalars) = if twist == Twist::Identity {
                (hyperbolic_gram(f, n, true), f.nonzero_elements().collect::<Vec<_>>())
            } else {
                let th = |x| f.involution(x).unwrap();
                let eps = f.nonzero_elements().find(|&x| th(x) == f.neg(x)).unwrap();
                let fix: Vec<Elem> = f.nonzero_elements().filter(|&x| th(x) == x).collect();
                (hyperbolic_gram(f, n, false).scale(eps), fix)
            };
            let form = SesquiForm::new(gram, twist)?;
            for v in &points {
                if !form.eval(v, v).is_zero() {
                    continue;
                }
                let vs = form.dual(v);
                for &c in &scalars {
                    out.push(Transvection::new(v.clone(), vs.scale(c))?);
                }
            }
        }
        ClassicalKind::OrthogonalPlus | ClassicalKind::OrthogonalMinus => {
            if f.p() != 2 || n % 2 == 1 {
                return Err(bad(format!("orthogonal sets need p = 2 and even n (got p = {}, n = {n})", f.p())));
            }
            let ty = if kind == ClassicalKind::OrthogonalPlus { WittType::Plus } else { WittType::Minus };
            let qf = QuadraticForm::standard(f, n, ty)?;
            for v in &points {
                for c in f.nonzero_elements() {
                    let u = v.scale(c);
                    if qf.eval(&u) == Elem::ONE {
                        out.push(Transvection::new(u.clone(), qf.polar().dual(&u))?);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The generators of M_n(a): for each pair of axes i < j and each a-th root
/// of unity x, the transvection acting as [[0, x⁻¹], [x, 0]] on ⟨e_i, e_j⟩.
pub fn build_monomial_group(n: usize, a: u64, field: &Field) -> Result<Vec<Transvection>, ClassifyError> {
    let f = field;
    let q = f.order() as u64;
    if f.p() != 2 || a < 3 || a.is_multiple_of(2) || !(q - 1).is_multiple_of(a) || n < 2 {
        return Err(ClassifyError::BadParameters(format!(
            "M_n(a) needs p = 2, odd a > 1 dividing q - 1 and n >= 2 (got n = {n}, a = {a}, q = {q})"
        )));
    }
    let roots: Vec<Elem> = f.nonzero_elements().filter(|&x| f.pow(x, a) == Elem::ONE).collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for &x in &roots {
                let mut v = Vector::unit(f, n, i);
                v.set(j, x);
                let mut phi = Covector::unit(f, n, i);
                phi.set(j, f.inv(x).unwrap());
                out.push(Transvection::new(v, phi)?);
            }
        }
    }
    Ok(out)
}

fn symmetric_dim(m: usize) -> usize {
    m - if m.is_multiple_of(2) { 2 } else { 1 }
}

/// Coordinates of x ∈ H = {Σx = 0} ⊂ GF(2)^m in the basis h_k = e_k + e_{k+1},
/// reduced modulo the all-ones vector when m is even.
fn symmetric_coords(m: usize, x: &[u8]) -> Vec<u32> {
    let mut c: Vec<u32> = x[..m - 1]
        .iter()
        .scan(0u8, |s, &b| {
            *s ^= b;
            Some(*s as u32)
        })
        .collect();
    if m.is_multiple_of(2) {
        // the all-ones vector is Σ_{k even} h_k
        if c[m - 2] == 1 {
            for k in (0..m - 1).step_by(2) {
                c[k] ^= 1;
            }
        }
        c.truncate(m - 2);
    }
    c
}

fn check_symmetric_m(m: usize) -> Result<(), ClassifyError> {
    if m < 5 {
        return Err(ClassifyError::BadParameters(format!("m = {m} < 5")));
    }
    if m > 64 {
        return Err(ClassifyError::BadParameters(format!("m = {m} too large")));
    }
    Ok(())
}

/// The matrix of the permutation `perm` (i ↦ perm[i]) of S_m on
/// V = H/(⟨1⟩ ∩ H), of dimension m − gcd(m, 2).
pub fn symmetric_rep_matrix(m: usize, perm: &[usize]) -> Result<Matrix, ClassifyError> {
    check_symmetric_m(m)?;
    let mut seen = vec![false; m];
    if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
        return Err(ClassifyError::BadParameters(format!("not a permutation of {m} points")));
    }
    let f = Field::new(2, 1).unwrap();
    let n = symmetric_dim(m);
    let cols: Vec<Vector> = (0..n)
        .map(|k| {
            let mut x = vec![0u8; m];
            x[perm[k]] ^= 1;
            x[perm[k + 1]] ^= 1;
            Vector::from_raw(&f, &symmetric_coords(m, &x))
        })
        .collect();
    Ok(Matrix::from_columns(&f, n, &cols))
}

/// Images of the adjacent transpositions (i, i+1) of S_m.
pub fn build_symmetric_rep(m: usize) -> Result<Vec<Transvection>, ClassifyError> {
    check_symmetric_m(m)?;
    let f = Field::new(2, 1).unwrap();
    let n = symmetric_dim(m);
    let mut out = Vec::new();
    for i in 0..m - 1 {
        let mut h = vec![0u8; m];
        h[i] = 1;
        h[i + 1] = 1;
        let v = symmetric_coords(m, &h);
        // (x_i + x_{i+1}) evaluated on h_k
        let phi: Vec<u32> = (0..n).map(|k| ((k + 1 == i) as u32) ^ ((k == i + 1) as u32)).collect();
        out.push(Transvection::from_raw(&f, &v, &phi)?);
    }
    Ok(out)
}

fn irreducible_graph(gens: &[Transvection]) -> Result<TransvectionGraph, ClassifyError> {
    let g = TransvectionGraph::new(gens.to_vec())?;
    if !g.is_irreducible() {
        return Err(ClassifyError::NotIrreducible);
    }
    Ok(g)
}

fn bits(raw: &[u32]) -> u64 {
    raw.iter().enumerate().fold(0, |acc, (i, &x)| acc | ((x as u64 & 1) << i))
}

/// Every orbit of ⟨gens⟩ on GF(2)^n of size n+1 spanning V, in order of
/// least element.
pub fn symmetric_spanning_orbits(gens: &[Transvection], budget: u64) -> Result<Vec<Vec<Vector>>, ClassifyError> {
    let g = irreducible_graph(gens)?;
    let f = g.field().clone();
    if f.order() != 2 {
        return Err(ClassifyError::WrongField(f.order()));
    }
    let n = g.dim();
    if n >= 63 || (1u64 << n) > budget {
        return Err(ClassifyError::CapExceeded(format!("2^{n} vectors above the budget {budget}")));
    }
    let acts: Vec<(u64, u64)> = gens.iter().map(|t| (bits(&t.v().raw()), bits(&t.phi().raw()))).collect();
    let size = 1usize << n;
    let mut seen = vec![false; size];
    let mut found = Vec::new();
    for start in 1..size {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start as u64];
        let mut i = 0;
        while i < orbit.len() {
            let x = orbit[i];
            i += 1;
            for &(v, phi) in &acts {
                let y = if (x & phi).count_ones() % 2 == 1 { x ^ v } else { x };
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    orbit.push(y);
                }
            }
        }
        if orbit.len() == n + 1 {
            orbit.sort_unstable();
            let vs: Vec<Vector> = orbit
                .iter()
                .map(|&x| Vector::from_raw(&f, &(0..n).map(|k| ((x >> k) & 1) as u32).collect::<Vec<_>>()))
                .collect();
            if Subspace::span(&f, n, &vs).is_full() {
                found.push(vs);
            }
        }
    }
    Ok(found)
}

/// An invariant spanning set of size n+1, if one exists.
pub fn detect_symmetric_type(gens: &[Transvection], budget: u64) -> Result<Option<Vec<Vector>>, ClassifyError> {
    Ok(symmetric_spanning_orbits(gens, budget)?.into_iter().next())
}

/// n lines permuted by the group, with independent representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialStructure {
    pub lines: Vec<Vector>,
}

impl MonomialStructure {
    /// Exponent a such that the group is C_a^{n−1} ⋊ S_n after rescaling the
    /// line representatives, or None if some generator is not monomial in
    /// this basis.
    pub fn exponent(&self, gens: &[Transvection]) -> Option<u64> {
        let n = self.lines.len();
        let f = gens.first()?.field().clone();
        let b = Matrix::from_columns(&f, n, &self.lines);
        let binv = b.inverse().ok()?;
        // perms[t][i] = (j, x) with t·b_i = x·b_j
        let mut perms = Vec::new();
        for t in gens {
            let m = binv.mul(&t.matrix()).mul(&b);
            let mut p = Vec::with_capacity(n);
            for i in 0..n {
                let nz: Vec<usize> = (0..n).filter(|&j| !m.get(j, i).is_zero()).collect();
                if nz.len() != 1 {
                    return None;
                }
                p.push((nz[0], m.get(nz[0], i)));
            }
            perms.push(p);
        }
        let mut c: Vec<Option<Elem>> = vec![None; n];
        c[0] = Some(Elem::ONE);
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for p in &perms {
                let (j, x) = p[i];
                if c[j].is_none() {
                    c[j] = Some(f.mul(c[i].unwrap(), x));
                    queue.push_back(j);
                }
            }
        }
        let mut a = 1u32;
        for p in &perms {
            for (i, &(j, x)) in p.iter().enumerate() {
                let (ci, cj) = (c[i]?, c[j]?);
                let y = f.div(f.mul(x, ci), cj).ok()?;
                a = crate::gf::lcm(a, f.mult_order(y) as u32);
            }
        }
        Some(a as u64)
    }
}

/// A generator-invariant set of n lines with independent representatives.
///
/// For irreducible groups such a set is a single orbit (the span of a
/// sub-orbit would be invariant), so only orbits of size exactly n are tried.
pub fn detect_monomial_structure(gens: &[Transvection], budget: u64) -> Result<Option<MonomialStructure>, ClassifyError> {
    let g = irreducible_graph(gens)?;
    let f = g.field().clone();
    let n = g.dim();
    if (f.order() as u128).pow(n as u32) > budget as u128 {
        return Err(ClassifyError::CapExceeded(format!("q^n for GF({})^{n} above the budget {budget}", f.order())));
    }
    let points = projective_points(&f, n);
    let index: HashMap<Vec<u32>, usize> = points.iter().enumerate().map(|(i, p)| (p.raw(), i)).collect();
    let image = |i: usize, t: &Transvection| -> usize { index[&t.apply(&points[i]).normalize().0.raw()] };
    let mut seen = vec![false; points.len()];
    for start in 0..points.len() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut orbit = vec![start];
        let mut i = 0;
        while i < orbit.len() && orbit.len() <= n {
            let x = orbit[i];
            i += 1;
            for t in gens {
                let y = image(x, t);
                if !seen[y] {
                    seen[y] = true;
                    orbit.push(y);
                }
            }
        }
        if orbit.len() == n && i == n {
            orbit.sort_unstable();
            let lines: Vec<Vector> = orbit.iter().map(|&k| points[k].clone()).collect();
            if Subspace::span(&f, n, &lines).is_full() {
                return Ok(Some(MonomialStructure { lines }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    pub element_cap: usize,
    pub projective_budget: u64,
    pub exclusion_limit: usize,
    pub certificate_limit: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            element_cap: DEFAULT_ELEMENT_CAP,
            projective_budget: DEFAULT_PROJECTIVE_BUDGET,
            exclusion_limit: DEFAULT_EXCLUSION_LIMIT,
            certificate_limit: DEFAULT_CERTIFICATE_LIMIT,
        }
    }
}

/// Structures found on the generators. Matrices are raw rows.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witnesses {
    pub symplectic_gram: Option<Vec<Vec<u32>>>,
    pub symplectic_obstruction: Option<ObstructionCycle>,
    pub unitary_gram: Option<Vec<Vec<u32>>>,
    pub hermitian_scalar: Option<u32>,
    pub unitary_obstruction: Option<ObstructionCycle>,
    /// Upper triangular coefficients of Q.
    pub quadratic_coeffs: Option<Vec<Vec<u32>>>,
    pub witt_type: Option<WittType>,
    /// Generator t with Q(u_t) ≠ 1.
    pub quadratic_violating: Option<usize>,
    pub monomial_lines: Option<Vec<Vec<u32>>>,
    pub monomial_exponent: Option<u64>,
    pub symmetric_set: Option<Vec<Vec<u32>>>,
    /// Cycles whose weights generate the defining field.
    pub field_cycles: Vec<CycleRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub tag: GroupTypeTag,
    /// Other types whose structure was found and whose order also matches.
    pub coincident_tags: Vec<GroupTypeTag>,
    pub dim: usize,
    pub field_order: u32,
    /// Degree of L(T) over the prime field.
    pub field_degree: u32,
    /// Set when the witnesses refer to a conjugate over GF(p^field_degree).
    pub subfield: bool,
    pub subfield_basis: Option<Vec<Vec<u32>>>,
    pub witnesses: Witnesses,
    pub order_predicted: Option<u128>,
    pub order_enumerated: Option<u128>,
    pub notes: Vec<String>,
}

impl ClassificationReport {
    pub fn has_tag(&self, t: &GroupTypeTag) -> bool {
        &self.tag == t || self.coincident_tags.contains(t)
    }

    fn empty(dim: usize, field: &Field, degree: u32) -> Self {
        ClassificationReport {
            tag: GroupTypeTag::Undetermined,
            coincident_tags: Vec::new(),
            dim,
            field_order: field.order(),
            field_degree: degree,
            subfield: false,
            subfield_basis: None,
            witnesses: Witnesses::default(),
            order_predicted: None,
            order_enumerated: None,
            notes: Vec::new(),
        }
    }
}

/// The embedding GF(p^d) → `big`, as a table indexed by small-field elements.
fn subfield_embedding(big: &Field, small: &Field) -> Option<Vec<Elem>> {
    let d = small.degree();
    let m = small.modulus();
    let gamma = big.elements().filter(|&x| big.in_subfield(x, d)).find(|&x| {
        let val = m.iter().rev().fold(Elem::ZERO, |acc, &c| big.add(big.mul(acc, x), big.from_int(c as i64)));
        val.is_zero() && big.min_poly_degree(x) == d
    })?;
    Some(
        small
            .elements()
            .map(|e| {
                small
                    .digits(e)
                    .iter()
                    .rev()
                    .fold(Elem::ZERO, |acc, &c| big.add(big.mul(acc, gamma), big.from_int(c as i64)))
            })
            .collect(),
    )
}

/// A basis B in which every generator has entries in GF(p^d), and the
/// generators B⁻¹tB over GF(p^d). Basis vectors are rescaled v_s by the
/// weight of the path from s back to vertex 0.
pub fn subfield_conjugate(
    g: &TransvectionGraph,
    d: u32,
) -> Result<Option<(Matrix, Vec<Transvection>)>, ClassifyError> {
    let f = g.field().clone();
    let n = g.dim();
    let small = Field::new(f.p() as u64, d).map_err(|e| ClassifyError::BadParameters(e.to_string()))?;
    let Some(embed) = subfield_embedding(&f, &small) else {
        return Ok(None);
    };
    let back: HashMap<Elem, Elem> = embed.iter().enumerate().map(|(i, &e)| (e, Elem(i as u32))).collect();
    let (to_root, _) = g.root_paths(0)?;
    let mut basis: Vec<Vector> = Vec::new();
    let mut span = Subspace::zero(&f, n);
    for (s, path) in to_root.iter().enumerate() {
        let w = path.windows(2).fold(Elem::ONE, |acc, e| f.mul(acc, g.pairing(e[0], e[1])));
        let u = g.vert(s).v().scale(w);
        if !span.contains(&u)? {
            span = span.sum(&Subspace::span(&f, n, std::slice::from_ref(&u)))?;
            basis.push(u);
            if basis.len() == n {
                break;
            }
        }
    }
    if basis.len() < n {
        return Ok(None);
    }
    let b = Matrix::from_columns(&f, n, &basis);
    let binv = b.inverse().map_err(|e| ClassifyError::BadParameters(e.to_string()))?;
    let mut out = Vec::with_capacity(g.len());
    for t in g.verts() {
        let m = binv.mul(&t.matrix()).mul(&b);
        let mut data = Vec::with_capacity(n * n);
        for &x in m.data() {
            match back.get(&x) {
                Some(&y) => data.push(y),
                None => return Ok(None),
            }
        }
        out.push(Transvection::from_matrix(&Matrix::from_data(&small, n, n, data))?);
    }
    Ok(Some((b, out)))
}

fn exceptional_label(n: usize, q: u64, order: u128) -> Option<(&'static str, bool)> {
    match (n, q, order) {
        (2, 9, 120) => Some(("SL2(5)", true)),
        (3, 4, 1080) => Some(("3.A6", true)),
        (6, 4, _) => Some(("3.POmega6-(3)", false)),
        _ => None,
    }
}

/// Type of ⟨T⟩ for an irreducible transvection set T.
pub fn classify(t: &[Transvection], opts: &ClassifyOptions) -> Result<ClassificationReport, ClassifyError> {
    let g = irreducible_graph(t)?;
    let fld = g.exact_defining_field()?;
    let f = g.field().clone();
    if fld.degree == f.degree() {
        return classify_full(&g, opts, fld.witnesses);
    }
    let d = fld.degree;
    let note = format!("conjugate into a subfield subgroup over GF({}^{d})", f.p());
    match subfield_conjugate(&g, d)? {
        Some((b, small)) => {
            let mut r = classify(&small, opts)?;
            r.field_order = f.order();
            r.subfield = true;
            r.subfield_basis = Some(b.to_raw_rows());
            r.witnesses.field_cycles = fld.witnesses;
            r.notes.insert(0, note);
            Ok(r)
        }
        None => {
            let mut r = ClassificationReport::empty(g.dim(), &f, d);
            r.witnesses.field_cycles = fld.witnesses;
            r.notes.push(note);
            r.notes.push("base change into the subfield failed".into());
            Ok(r)
        }
    }
}

fn classify_full(
    g: &TransvectionGraph,
    opts: &ClassifyOptions,
    field_cycles: Vec<CycleRecord>,
) -> Result<ClassificationReport, ClassifyError> {
    let f = g.field().clone();
    let n = g.dim();
    let q = f.order() as u64;
    let gens = g.verts();
    let mut r = ClassificationReport::empty(n, &f, f.degree());
    let w = &mut r.witnesses;
    w.field_cycles = field_cycles;
    let mut compat = vec![GroupTypeTag::Linear];

    let symplectic = match detect_invariant_form(g, Twist::Identity)? {
        FormDetection::Form(s) => {
            w.symplectic_gram = Some(s.gram().to_raw_rows());
            compat.push(GroupTypeTag::Symplectic);
            if q == 2 {
                compat.push(GroupTypeTag::SymmetricEven);
            }
            Some(s)
        }
        FormDetection::Obstruction(o) => {
            w.symplectic_obstruction = Some(o);
            None
        }
    };
    if let Some(s) = &symplectic {
        if f.p() == 2 {
            match recover_quadratic(g, s)? {
                QuadraticOutcome::Form { form, .. } => {
                    let ty = form.witt_type();
                    w.quadratic_coeffs = Some(form.coeffs().to_raw_rows());
                    w.witt_type = Some(ty);
                    compat.push(match ty {
                        WittType::Plus => GroupTypeTag::OrthogonalPlus,
                        WittType::Minus => GroupTypeTag::OrthogonalMinus,
                    });
                }
                QuadraticOutcome::Violating(i) => w.quadratic_violating = Some(i),
            }
        }
    } else if f.has_involution() {
        match detect_invariant_form(g, Twist::Theta)? {
            FormDetection::Form(s) => {
                w.unitary_gram = Some(s.gram().to_raw_rows());
                w.hermitian_scalar = s.hermitian_scalar().map(|e| e.0);
                compat.push(GroupTypeTag::Unitary);
            }
            FormDetection::Obstruction(o) => w.unitary_obstruction = Some(o),
        }
    }
    if q == 2 && symplectic.is_some() {
        match detect_symmetric_type(gens, opts.projective_budget) {
            Ok(Some(b)) => {
                w.symmetric_set = Some(b.iter().map(|v| v.raw()).collect());
                compat.push(GroupTypeTag::SymmetricOdd);
            }
            Ok(None) => {}
            Err(ClassifyError::CapExceeded(m)) => r.notes.push(format!("symmetric detection skipped: {m}")),
            Err(e) => return Err(e),
        }
    }
    if symplectic.is_none() && f.p() == 2 {
        match detect_monomial_structure(gens, opts.projective_budget) {
            Ok(Some(ms)) => {
                let a = ms.exponent(gens);
                w.monomial_lines = Some(ms.lines.iter().map(|v| v.raw()).collect());
                w.monomial_exponent = a;
                if let Some(a) = a.filter(|&a| a > 1 && a % 2 == 1 && (q - 1).is_multiple_of(a)) {
                    compat.push(GroupTypeTag::Monomial(a));
                }
            }
            Ok(None) => {}
            Err(ClassifyError::CapExceeded(m)) => r.notes.push(format!("monomial detection skipped: {m}")),
            Err(e) => return Err(e),
        }
    }
    if w.unitary_gram.is_some() && w.monomial_lines.is_some() {
        r.notes
            .push("both a unitary form and a monomial structure are invariant; the order decides".into());
    }

    let mats: Vec<Matrix> = gens.iter().map(|t| t.matrix()).collect();
    let order = match closure(&f, n, &mats, opts.element_cap) {
        Ok(c) => Some(c.order() as u128),
        Err(GroupError::CapExceeded { cap, .. }) => {
            r.notes.push(format!("enumeration stopped at {cap} elements; tag from structure only"));
            None
        }
        Err(GroupError::TooWide { .. }) => {
            r.notes.push("elements too wide to enumerate; tag from structure only".into());
            None
        }
        Err(e) => return Err(e.into()),
    };
    r.order_enumerated = order;
    match order {
        Some(order) => {
            let mut cands: Vec<GroupTypeTag> = compat
                .iter()
                .filter(|t| order_formula(t, n, q).ok() == Some(order))
                .cloned()
                .collect();
            cands.sort_by_key(|t| t.speciality());
            if cands.is_empty() {
                match exceptional_label(n, q, order) {
                    Some((label, asserted)) => {
                        r.tag = GroupTypeTag::Exceptional(label.into());
                        if asserted {
                            r.order_predicted = Some(order);
                        } else {
                            r.notes.push(format!("candidate {label} by dimension and field; order not asserted"));
                        }
                    }
                    None => r.notes.push(format!("order {order} matches no detected structure")),
                }
            } else {
                r.tag = cands.remove(0);
                r.coincident_tags = cands;
                r.order_predicted = order_formula(&r.tag, n, q).ok();
            }
        }
        None => {
            let best = compat
                .iter()
                .filter(|t| **t != GroupTypeTag::SymmetricEven)
                .max_by_key(|t| t.speciality())
                .cloned()
                .unwrap_or(GroupTypeTag::Linear);
            r.order_predicted = order_formula(&best, n, q).ok();
            r.tag = best;
        }
    }
    Ok(r)
}

/// Classification of the section of Γ(T₁) onto V(T₁)/(V(T₁) ∩ V*(T₁)^⊥).
pub fn classify_section(t1: &[Transvection], opts: &ClassifyOptions) -> Result<ClassificationReport, ClassifyError> {
    let g = TransvectionGraph::new(t1.to_vec())?;
    let sec = g.restrict_to_section()?;
    classify(&sec.projected, opts)
}

/// The smallest set containing `t` and closed under conjugation by `t`.
pub fn conjugacy_closure(t: &[Transvection], cap: usize) -> Result<Vec<Transvection>, ClassifyError> {
    let mats: Vec<(Matrix, Matrix)> = t.iter().map(|s| (s.matrix(), s.inverse().matrix())).collect();
    let mut seen: HashSet<Transvection> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for x in t {
        if seen.insert(x.clone()) {
            out.push(x.clone());
            queue.push_back(x.clone());
        }
    }
    while let Some(x) = queue.pop_front() {
        for (m, mi) in &mats {
            let y = x.conjugate_with(m, mi);
            if seen.insert(y.clone()) {
                if out.len() >= cap {
                    return Err(ClassifyError::CapExceeded(format!("more than {cap} conjugates")));
                }
                out.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CertifiedFact {
    NonSymplecticCycle { verts: Vec<usize>, weight: Elem, defect: Elem },
    NonUnitaryCycle { verts: Vec<usize>, weight: Elem, defect: Elem },
    FieldWitness { verts: Vec<usize>, weight: Elem, degree: u32 },
    /// The section of the subset is irreducible and not of odd symmetric type.
    SymmetricExclusion { subset: Vec<usize> },
    /// Either the subset is weakly nondegenerate but degenerate, or its
    /// section is irreducible and neither monomial nor odd symmetric.
    MonomialExclusion { subset: Vec<usize>, degenerate: bool },
    /// The excluded type coincides with G, so no exclusion subset exists.
    CoincidentType { tag: GroupTypeTag },
    Nondegenerate { left_kernel: usize, right_kernel: usize, components: usize },
    GeneratesGroup { order: u128 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub tag: GroupTypeTag,
    pub field_order: u32,
    pub field_degree: u32,
    pub dim: usize,
    pub t0: Vec<TransvectionJson>,
    /// Words in T, letters signed as i or −(i+1) for inverses.
    pub words: Vec<Vec<i64>>,
    pub facts: Vec<CertifiedFact>,
    pub dense_size: usize,
    pub max_word_length: usize,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn transvections(&self, field: &Field) -> Result<Vec<Transvection>, ClassifyError> {
        Ok(self.t0.iter().map(|j| j.to_transvection(field)).collect::<Result<_, _>>()?)
    }
}

/// A small T₀ ⊆ ⟨T⟩ with words in T that pins down the type and defining field.
pub fn certify(t: &[Transvection], opts: &ClassifyOptions) -> Result<Certificate, ClassifyError> {
    let report = classify(t, opts)?;
    if !report.tag.is_classical() {
        return Err(ClassifyError::NotClassical(report.tag.to_string()));
    }
    if !report.subfield {
        return certify_full(t, &report, opts);
    }
    let g = TransvectionGraph::new(t.to_vec())?;
    let (_, small) = subfield_conjugate(&g, report.field_degree)?
        .ok_or_else(|| ClassifyError::NotClassical("subfield base change failed".into()))?;
    let mut cert = certify_full(&small, &report, opts)?;
    let f = g.field().clone();
    let n = g.dim();
    let gens: Vec<Matrix> = t.iter().map(|x| x.matrix()).collect();
    let invs: Vec<Matrix> = t.iter().map(|x| x.inverse().matrix()).collect();
    let t0: Vec<Transvection> = cert
        .words
        .iter()
        .map(|w| {
            let w: Vec<Letter> = w.iter().map(|&s| Letter::from_signed(s)).collect();
            Transvection::from_matrix(&evaluate(&f, n, &gens, &invs, &w))
        })
        .collect::<Result<_, _>>()?;
    let g0 = TransvectionGraph::new(t0.clone())?;
    for fact in &mut cert.facts {
        match fact {
            CertifiedFact::NonSymplecticCycle { verts, weight, defect } => {
                *weight = g0.weight(verts);
                *defect = g0.symplectic_defect(verts);
            }
            CertifiedFact::NonUnitaryCycle { verts, weight, defect } => {
                *weight = g0.weight(verts);
                *defect = g0.unitary_defect(verts)?;
            }
            CertifiedFact::FieldWitness { verts, weight, .. } => *weight = g0.weight(verts),
            _ => {}
        }
    }
    cert.t0 = t0.iter().map(TransvectionJson::from_transvection).collect();
    cert.field_order = f.order();
    cert.notes.push(format!(
        "built over GF({}^{}) and mapped back through the subfield basis",
        f.p(),
        report.field_degree
    ));
    Ok(cert)
}

enum CycleKind {
    NonSymplectic,
    NonUnitary,
    Field,
}

fn certify_full(t: &[Transvection], report: &ClassificationReport, opts: &ClassifyOptions) -> Result<Certificate, ClassifyError> {
    let dense = densify(t, opts.projective_budget)?;
    let gd = TransvectionGraph::new(dense.set.clone())?;
    let f = gd.field().clone();
    let n = gd.dim();
    let mut notes = Vec::new();
    let mut chosen: Vec<usize> = Vec::new();
    let push = |chosen: &mut Vec<usize>, i: usize| {
        if !chosen.contains(&i) {
            chosen.push(i);
        }
    };
    let mut cycles: Vec<(CycleKind, Vec<usize>)> = Vec::new();
    let symplectic = report.witnesses.symplectic_gram.is_some();
    let unitary = report.witnesses.unitary_gram.is_some();
    if !symplectic {
        if let FormDetection::Obstruction(o) = detect_invariant_form(&gd, Twist::Identity)? {
            cycles.push((CycleKind::NonSymplectic, o.verts));
        }
    }
    if f.has_involution() && !unitary {
        if let FormDetection::Obstruction(o) = detect_invariant_form(&gd, Twist::Theta)? {
            cycles.push((CycleKind::NonUnitary, o.verts));
        }
    }
    for c in gd.exact_defining_field()?.witnesses {
        cycles.push((CycleKind::Field, c.verts));
    }
    for (_, c) in &cycles {
        for &i in c {
            push(&mut chosen, i);
        }
    }
    if chosen.is_empty() {
        chosen.push(0);
    }

    let form_present = symplectic || unitary;
    let mut group = Closure::trivial(&f, n)?;
    let mut in_group = 0;
    loop {
        let set = |chosen: &[usize]| chosen.iter().map(|&i| dense.set[i].clone()).collect::<Vec<_>>();
        for i in connect_up(&dense.set, &set(&chosen), form_present)?.added {
            push(&mut chosen, i);
        }
        for i in winkle(&dense.set, &set(&chosen))?.added {
            push(&mut chosen, i);
        }
        let Some(order) = report.order_enumerated else {
            notes.push("group order unknown; T0 not augmented to generate G".into());
            break;
        };
        while in_group < chosen.len() {
            group.extend(&dense.set[chosen[in_group]].matrix(), opts.element_cap)?;
            in_group += 1;
        }
        if group.order() as u128 >= order {
            break;
        }
        let next = (0..dense.set.len())
            .find(|&i| !group.contains(&dense.set[i].matrix()))
            .expect("dense set generates G");
        push(&mut chosen, next);
    }
    if chosen.len() > opts.certificate_limit {
        return Err(ClassifyError::CertificateTooLarge(chosen.len()));
    }

    let t0: Vec<Transvection> = chosen.iter().map(|&i| dense.set[i].clone()).collect();
    let pos = |i: usize| chosen.iter().position(|&c| c == i).unwrap();
    let g0 = TransvectionGraph::new(t0.clone())?;
    let mut facts = Vec::new();
    for (kind, c) in cycles {
        let verts: Vec<usize> = c.iter().map(|&i| pos(i)).collect();
        let weight = g0.weight(&verts);
        facts.push(match kind {
            CycleKind::NonSymplectic => CertifiedFact::NonSymplecticCycle {
                defect: g0.symplectic_defect(&verts),
                verts,
                weight,
            },
            CycleKind::NonUnitary => CertifiedFact::NonUnitaryCycle {
                defect: g0.unitary_defect(&verts)?,
                verts,
                weight,
            },
            CycleKind::Field => CertifiedFact::FieldWitness {
                degree: f.min_poly_degree(weight),
                verts,
                weight,
            },
        });
    }
    if f.order() == 2 && symplectic {
        if report.has_tag(&GroupTypeTag::SymmetricOdd) {
            facts.push(CertifiedFact::CoincidentType {
                tag: GroupTypeTag::SymmetricOdd,
            });
        } else {
            match exclusion_subset(&t0, opts, false)? {
                Some((subset, _)) => facts.push(CertifiedFact::SymmetricExclusion { subset }),
                None => notes.push("no symmetric-exclusion subset within the limit".into()),
            }
        }
    }
    if !symplectic {
        if let Some(m) = report.coincident_tags.iter().chain([&report.tag]).find(|t| matches!(t, GroupTypeTag::Monomial(_))) {
            facts.push(CertifiedFact::CoincidentType { tag: m.clone() });
        } else {
            match exclusion_subset(&t0, opts, true)? {
                Some((subset, degenerate)) => facts.push(CertifiedFact::MonomialExclusion { subset, degenerate }),
                None => notes.push("no monomial-exclusion subset within the limit".into()),
            }
        }
    }
    facts.push(CertifiedFact::Nondegenerate {
        left_kernel: g0.left_kernel().dim(),
        right_kernel: g0.right_kernel().dim(),
        components: g0.scc().len(),
    });
    if let Some(order) = report.order_enumerated {
        facts.push(CertifiedFact::GeneratesGroup { order });
    }
    let words: Vec<Vec<i64>> = chosen.iter().map(|&i| signed_word(&dense.words[i])).collect();
    Ok(Certificate {
        tag: report.tag.clone(),
        field_order: f.order(),
        field_degree: report.field_degree,
        dim: n,
        t0: t0.iter().map(TransvectionJson::from_transvection).collect(),
        max_word_length: words.iter().map(|w| w.len()).max().unwrap_or(0),
        words,
        facts,
        dense_size: dense.set.len(),
        notes,
    })
}

/// Checks whether a subset witnesses the exclusion. Returns Some(degenerate).
fn excludes(s: &[Transvection], opts: &ClassifyOptions, monomial: bool) -> Result<Option<bool>, ClassifyError> {
    let g = TransvectionGraph::new(s.to_vec())?;
    if monomial {
        let (l, r) = (g.left_kernel().dim(), g.right_kernel().dim());
        if (l == 0) != (r == 0) {
            return Ok(Some(true));
        }
    }
    if !g.is_strongly_connected() {
        return Ok(None);
    }
    let Ok(sec) = g.restrict_to_section() else {
        return Ok(None);
    };
    let p = &sec.projected;
    let gp = TransvectionGraph::new(p.clone())?;
    if gp.dim() < 2 || !gp.is_irreducible() {
        return Ok(None);
    }
    let budget = opts.projective_budget;
    let symmetric = match gp.field().order() {
        2 => match detect_symmetric_type(p, budget) {
            Ok(b) => b.is_some(),
            Err(ClassifyError::CapExceeded(_)) => return Ok(None),
            Err(e) => return Err(e),
        },
        _ => false,
    };
    if symmetric {
        return Ok(None);
    }
    if monomial {
        match detect_monomial_structure(p, budget) {
            Ok(None) => {}
            Ok(Some(_)) | Err(ClassifyError::CapExceeded(_)) => return Ok(None),
            Err(e) => return Err(e),
        }
    }
    Ok(Some(false))
}

/// Greedy prefix growth over T₀ until the subset witnesses the exclusion.
fn exclusion_subset(
    t0: &[Transvection],
    opts: &ClassifyOptions,
    monomial: bool,
) -> Result<Option<(Vec<usize>, bool)>, ClassifyError> {
    let mut subset: Vec<usize> = Vec::new();
    for i in 0..t0.len() {
        if subset.len() >= opts.exclusion_limit {
            break;
        }
        subset.push(i);
        let s: Vec<Transvection> = subset.iter().map(|&k| t0[k].clone()).collect();
        if let Some(degenerate) = excludes(&s, opts, monomial)? {
            return Ok(Some((subset, degenerate)));
        }
    }
    Ok(None)
}

/// Replays a certificate against T. Returns the failed checks.
pub fn verify_certificate(t: &[Transvection], cert: &Certificate, opts: &ClassifyOptions) -> Result<Vec<String>, ClassifyError> {
    let g = TransvectionGraph::new(t.to_vec())?;
    let f = g.field().clone();
    let n = g.dim();
    let mut fails = Vec::new();
    let t0 = cert.transvections(&f)?;
    if t0.len() != cert.words.len() {
        fails.push(format!("{} elements but {} words", t0.len(), cert.words.len()));
        return Ok(fails);
    }
    let gens: Vec<Matrix> = t.iter().map(|x| x.matrix()).collect();
    let invs: Vec<Matrix> = t.iter().map(|x| x.inverse().matrix()).collect();
    for (i, (w, x)) in cert.words.iter().zip(&t0).enumerate() {
        if w.iter().any(|&s| Letter::from_signed(s).index >= t.len()) {
            fails.push(format!("word {i} uses a letter outside T"));
            continue;
        }
        let w: Vec<Letter> = w.iter().map(|&s| Letter::from_signed(s)).collect();
        if evaluate(&f, n, &gens, &invs, &w) != x.matrix() {
            fails.push(format!("word {i} does not evaluate to its element"));
        }
    }
    let g0 = TransvectionGraph::new(t0.clone())?;
    let in_range = |vs: &[usize]| vs.iter().all(|&v| v < t0.len());
    let mut field_weights = Vec::new();
    for fact in &cert.facts {
        match fact {
            CertifiedFact::NonSymplecticCycle { verts, weight, defect } => {
                if !in_range(verts) || g0.weight(verts) != *weight || g0.symplectic_defect(verts) != *defect || defect.is_zero() {
                    fails.push(format!("non-symplectic cycle {verts:?}"));
                }
            }
            CertifiedFact::NonUnitaryCycle { verts, weight, defect } => {
                let ok = in_range(verts)
                    && g0.weight(verts) == *weight
                    && g0.unitary_defect(verts).ok() == Some(*defect)
                    && !defect.is_zero();
                if !ok {
                    fails.push(format!("non-unitary cycle {verts:?}"));
                }
            }
            CertifiedFact::FieldWitness { verts, weight, .. } => {
                if !in_range(verts) || g0.weight(verts) != *weight {
                    fails.push(format!("field witness {verts:?}"));
                }
                field_weights.push(*weight);
            }
            CertifiedFact::SymmetricExclusion { subset } | CertifiedFact::MonomialExclusion { subset, .. } => {
                let monomial = matches!(fact, CertifiedFact::MonomialExclusion { .. });
                let s: Vec<Transvection> = subset.iter().filter_map(|&k| t0.get(k).cloned()).collect();
                if s.len() != subset.len() || excludes(&s, opts, monomial)?.is_none() {
                    fails.push(format!("exclusion subset {subset:?}"));
                }
            }
            CertifiedFact::CoincidentType { .. } => {}
            CertifiedFact::Nondegenerate {
                left_kernel,
                right_kernel,
                components,
            } => {
                if g0.left_kernel().dim() != *left_kernel
                    || g0.right_kernel().dim() != *right_kernel
                    || g0.scc().len() != *components
                {
                    fails.push("nondegeneracy data".into());
                }
            }
            CertifiedFact::GeneratesGroup { order } => {
                let mats: Vec<Matrix> = t0.iter().map(|x| x.matrix()).collect();
                let full: Vec<Matrix> = gens.clone();
                let a = closure(&f, n, &mats, opts.element_cap)?.order() as u128;
                let b = closure(&f, n, &full, opts.element_cap)?.order() as u128;
                if a != *order || b != *order {
                    fails.push(format!("T0 generates {a} elements, T generates {b}, certificate says {order}"));
                }
            }
        }
    }
    if f.subfield_generated(field_weights) != cert.field_degree {
        fails.push("field witnesses do not generate the defining field".into());
    }
    Ok(fails)
}
