//! Transvections t = 1 + v⊗φ with φ(v) = 0.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{Elem, Field};
use crate::linalg::{Covector, LinalgError, Matrix, Vector};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TvError {
    #[error("phi(v) is nonzero")]
    NotIsotropic,
    #[error("zero vector or covector")]
    ZeroVector,
    #[error("not a transvection: {0}")]
    NotTransvection(String),
    #[error("unsupported generator set: {0}")]
    UnsupportedKind(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Stored with the first nonzero entry of `v` equal to 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Transvection {
    v: Vector,
    phi: Covector,
}

impl fmt::Debug for Transvection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T(v={:?}, phi={:?})", self.v.raw(), self.phi.raw())
    }
}

impl Transvection {
    pub fn new(v: Vector, phi: Covector) -> Result<Transvection, TvError> {
        if v.dim() != phi.dim() {
            return Err(LinalgError::DimensionMismatch(format!("{} vs {}", v.dim(), phi.dim())).into());
        }
        if v.field() != phi.field() {
            return Err(LinalgError::FieldMismatch.into());
        }
        if v.is_zero() || phi.is_zero() {
            return Err(TvError::ZeroVector);
        }
        if !phi.eval(&v).is_zero() {
            return Err(TvError::NotIsotropic);
        }
        Ok(Self::canonical(v, phi))
    }

    fn canonical(v: Vector, phi: Covector) -> Transvection {
        let (v, c) = v.normalize();
        let phi = phi.scale(c);
        Transvection { v, phi }
    }

    pub fn from_raw(field: &Field, v: &[u32], phi: &[u32]) -> Result<Transvection, TvError> {
        Transvection::new(Vector::from_raw(field, v), Covector::from_raw(field, phi))
    }

    /// Recovers (v, φ) from a matrix with det 1 and rank(M − 1) = 1.
    pub fn from_matrix(m: &Matrix) -> Result<Transvection, TvError> {
        if !m.is_square() {
            return Err(TvError::NotTransvection("matrix is not square".into()));
        }
        let f = m.field();
        let n = m.rows();
        let d = m.sub(&Matrix::identity(f, n))?;
        let rank = d.rank();
        if rank != 1 {
            return Err(TvError::NotTransvection(format!("rank(M-1) = {rank}")));
        }
        let det = m.det()?;
        if det != Elem::ONE {
            return Err(TvError::NotTransvection(format!("det = {}", det.0)));
        }
        let r = (0..n).find(|&i| d.row(i).iter().any(|e| !e.is_zero())).unwrap();
        let phi = d.row_vector(r).to_covector();
        let c = phi.leading_index().unwrap();
        let inv = f.inv(phi.get(c)).unwrap();
        let v = Vector::new(f, (0..n).map(|i| f.mul(d.get(i, c), inv)).collect());
        Ok(Self::canonical(v, phi))
    }

    pub fn v(&self) -> &Vector {
        &self.v
    }

    pub fn phi(&self) -> &Covector {
        &self.phi
    }

    pub fn field(&self) -> &Field {
        self.v.field()
    }

    pub fn dim(&self) -> usize {
        self.v.dim()
    }

    /// v⊗φ = t − 1.
    pub fn minus_one(&self) -> Matrix {
        Matrix::outer(&self.v, &self.phi)
    }

    pub fn matrix(&self) -> Matrix {
        Matrix::identity(self.field(), self.dim())
            .add(&self.minus_one())
            .unwrap()
    }

    pub fn inverse(&self) -> Transvection {
        Transvection {
            v: self.v.clone(),
            phi: self.phi.neg(),
        }
    }

    /// g t g⁻¹ = 1 + (gv)⊗(φ∘g⁻¹).
    pub fn conjugate(&self, g: &Matrix) -> Result<Transvection, TvError> {
        let ginv = g.inverse()?;
        Ok(self.conjugate_with(g, &ginv))
    }

    pub fn conjugate_with(&self, g: &Matrix, ginv: &Matrix) -> Transvection {
        Self::canonical(g.mul_vec(&self.v), self.phi.mul_matrix(ginv))
    }

    /// t(x) = x + φ(x)v.
    pub fn apply(&self, x: &Vector) -> Vector {
        let c = self.phi.eval(x);
        if c.is_zero() {
            x.clone()
        } else {
            x.add(&self.v.scale(c))
        }
    }

    /// ψ∘t = ψ + ψ(v)φ.
    pub fn apply_covector(&self, psi: &Covector) -> Covector {
        let c = psi.eval(&self.v);
        if c.is_zero() {
            psi.clone()
        } else {
            psi.add(&self.phi.scale(c))
        }
    }

    /// φ_self(v_other): nonzero iff there is an edge self → other.
    pub fn pairing(&self, other: &Transvection) -> Elem {
        self.phi.eval(&other.v)
    }
}

/// Serialized forms accepted for a transvection.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TransvectionJson {
    Pair { v: Vec<u32>, phi: Vec<u32> },
    Matrix { matrix: Vec<Vec<u32>> },
}

impl TransvectionJson {
    pub fn from_transvection(t: &Transvection) -> Self {
        TransvectionJson::Pair {
            v: t.v().raw(),
            phi: t.phi().raw(),
        }
    }

    pub fn to_transvection(&self, field: &Field) -> Result<Transvection, TvError> {
        let check = |xs: &[u32]| -> Result<(), TvError> {
            match xs.iter().find(|&&x| x >= field.order()) {
                Some(x) => Err(TvError::NotTransvection(format!(
                    "entry {x} is not an element of GF({})",
                    field.order()
                ))),
                None => Ok(()),
            }
        };
        match self {
            TransvectionJson::Pair { v, phi } => {
                check(v)?;
                check(phi)?;
                Transvection::from_raw(field, v, phi)
            }
            TransvectionJson::Matrix { matrix } => {
                for row in matrix {
                    check(row)?;
                }
                Transvection::from_matrix(&Matrix::from_raw_rows(field, matrix)?)
            }
        }
    }
}

/// Generator families with weights generating the whole field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FullFieldKind {
    SL,
    SU3,
    SP,
    O,
}

/// The unitary form x1·θ(y2) + x2·θ(y1) + x3·θ(y3) in dimension n ≥ 3, as v ↦ v*.
fn su3_dual(f: &Field, n: usize, v: &Vector) -> Covector {
    let th = |x| f.involution(x).unwrap();
    let mut c = Covector::zero(f, n);
    c.set(0, th(v.get(1)));
    c.set(1, th(v.get(0)));
    c.set(2, th(v.get(2)));
    c
}

/// Q = x1x2 + x3x4 polarized: v* = (v2, v1, v4, v3, 0, …).
fn o4_dual(f: &Field, n: usize, v: &Vector) -> Covector {
    let mut c = Covector::zero(f, n);
    c.set(0, v.get(1));
    c.set(1, v.get(0));
    c.set(2, v.get(3));
    c.set(3, v.get(2));
    c
}

/// At most three transvections whose cycle weights generate GF(q).
pub fn standard_full_field_set(
    kind: FullFieldKind,
    field: &Field,
    n: usize,
) -> Result<Vec<Transvection>, TvError> {
    let f = field;
    let lambda = f.primitive_element();
    let e = |i| Vector::unit(f, n, i);
    let es = |i| Covector::unit(f, n, i);
    match kind {
        FullFieldKind::SL | FullFieldKind::SP => {
            if n < 2 || (kind == FullFieldKind::SP && n % 2 == 1) {
                return Err(TvError::UnsupportedKind(format!("{kind:?} in dimension {n}")));
            }
            Ok(vec![
                Transvection::new(e(0), es(1).scale(lambda))?,
                Transvection::new(e(1), es(0))?,
            ])
        }
        FullFieldKind::SU3 => {
            if n < 3 || !f.has_involution() {
                return Err(TvError::UnsupportedKind(format!(
                    "SU3 needs even degree and n >= 3 (got GF({}), n = {n})",
                    f.order()
                )));
            }
            let th = |x| f.involution(x).unwrap();
            let eps = f
                .nonzero_elements()
                .find(|&x| th(x) == f.neg(x))
                .ok_or_else(|| TvError::UnsupportedKind("no ε with θ(ε) = −ε".into()))?;
            let a = f.mul(f.inv(f.pow(eps, 3)).unwrap(), lambda);
            let target = f.neg(f.add(a, th(a)));
            let z = f
                .elements()
                .find(|&z| f.mul(z, th(z)) == target)
                .ok_or_else(|| TvError::UnsupportedKind("no z making v3 singular".into()))?;
            let mut v3 = Vector::zero(f, n);
            v3.set(0, a);
            v3.set(1, Elem::ONE);
            v3.set(2, z);
            [e(0), e(1), v3]
                .into_iter()
                .map(|v| {
                    let phi = su3_dual(f, n, &v).scale(eps);
                    Transvection::new(v, phi)
                })
                .collect()
        }
        FullFieldKind::O => {
            if f.p() != 2 || n < 4 {
                return Err(TvError::UnsupportedKind(format!(
                    "orthogonal set needs p = 2 and n >= 4 (got p = {}, n = {n})",
                    f.p()
                )));
            }
            let u = e(0).add(&e(1));
            let v = e(0).scale(lambda).add(&e(2)).add(&e(3));
            [u, v]
                .into_iter()
                .map(|x| {
                    let phi = o4_dual(f, n, &x);
                    Transvection::new(x, phi)
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gf(p: u64, f: u32) -> Field {
        Field::new(p, f).unwrap()
    }

    #[test]
    fn spec_examples() {
        let f2 = gf(2, 1);
        let t = Transvection::from_raw(&f2, &[1, 0], &[0, 1]).unwrap();
        assert_eq!(t.matrix().to_raw_rows(), vec![vec![1, 1], vec![0, 1]]);
        assert_eq!(
            Transvection::from_raw(&f2, &[1, 0], &[1, 0]).unwrap_err(),
            TvError::NotIsotropic
        );
        assert_eq!(
            Transvection::from_raw(&f2, &[0, 0], &[1, 0]).unwrap_err(),
            TvError::ZeroVector
        );
        let f3 = gf(3, 1);
        let t3 = Transvection::from_raw(&f3, &[2, 0], &[0, 1]).unwrap();
        assert_eq!(t3.v().raw(), vec![1, 0]);
        assert_eq!(t3.phi().raw(), vec![0, 2]);

        let m = Matrix::from_raw_rows(&f2, &[vec![1, 1], vec![0, 1]]).unwrap();
        assert_eq!(Transvection::from_matrix(&m).unwrap(), t);
        assert!(matches!(
            Transvection::from_matrix(&Matrix::identity(&f2, 2)),
            Err(TvError::NotTransvection(_))
        ));
        let swap = Matrix::from_raw_rows(&f3, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert!(matches!(Transvection::from_matrix(&swap), Err(TvError::NotTransvection(_))));

        assert_eq!(t.inverse(), t);
        assert_eq!(t.conjugate(&Matrix::identity(&f2, 2)).unwrap(), t);
        let t1 = Transvection::from_raw(&f3, &[1, 0], &[0, 1]).unwrap();
        let g = Matrix::from_raw_rows(&f3, &[vec![1, 0], vec![0, 2]]).unwrap();
        let c = t1.conjugate(&g).unwrap();
        // g t g⁻¹ computed directly
        let direct = g.mul(&t1.matrix()).mul(&g.inverse().unwrap());
        assert_eq!(c.matrix(), direct);
        assert_eq!(c.matrix().to_raw_rows(), vec![vec![1, 2], vec![0, 1]]);
    }

    fn weight(ts: &[Transvection]) -> Elem {
        let f = ts[0].field();
        (0..ts.len()).fold(Elem::ONE, |acc, i| {
            f.mul(acc, ts[i].pairing(&ts[(i + 1) % ts.len()]))
        })
    }

    #[test]
    fn full_field_weights() {
        for (p, d) in [(2, 1), (3, 1), (2, 2), (5, 1), (2, 3), (3, 2), (2, 4)] {
            let f = gf(p, d);
            let lambda = f.primitive_element();
            let sl = standard_full_field_set(FullFieldKind::SL, &f, 2).unwrap();
            assert_eq!(weight(&sl), lambda);
            assert_eq!(f.subfield_generated([weight(&sl)]), d);
            if d % 2 == 0 {
                let su = standard_full_field_set(FullFieldKind::SU3, &f, 3).unwrap();
                assert_eq!(weight(&su), lambda, "GF({p}^{d})");
                assert_eq!(f.subfield_generated([weight(&su)]), d);
                // the unitary form is preserved by each generator
                let gram = Matrix::from_raw_rows(&f, &[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
                for t in &su {
                    let m = t.matrix();
                    let lhs = m.transpose().mul(&gram).mul(&m.twist());
                    assert_eq!(lhs, gram);
                }
            }
            if p == 2 {
                let o = standard_full_field_set(FullFieldKind::O, &f, 4).unwrap();
                assert_eq!(weight(&o), f.mul(lambda, lambda));
                assert_eq!(f.subfield_generated([weight(&o)]), d);
            }
        }
        let f3 = gf(3, 1);
        assert!(standard_full_field_set(FullFieldKind::SU3, &f3, 3).is_err());
        assert!(standard_full_field_set(FullFieldKind::O, &f3, 4).is_err());
    }

    fn fields() -> impl Strategy<Value = Field> {
        prop::sample::select(vec![(2u64, 1u32), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)])
            .prop_map(|(p, f)| gf(p, f))
    }

    fn random_tv(f: &Field, n: usize, seed: &[u32]) -> Option<Transvection> {
        let q = f.order();
        let v = Vector::new(f, (0..n).map(|i| Elem(seed[i % seed.len()].wrapping_mul(31 + i as u32) % q)).collect());
        let lead = v.leading_index()?;
        // choose φ ⟂ v: random entries, then fix the coordinate at `lead`
        let mut phi = Covector::new(f, (0..n).map(|i| Elem(seed[(i + 3) % seed.len()].wrapping_mul(17 + i as u32) % q)).collect());
        phi.set(lead, Elem::ZERO);
        let s = phi.eval(&v);
        let fix = f.neg(f.div(s, v.get(lead)).unwrap());
        phi.set(lead, fix);
        Transvection::new(v, phi).ok()
    }

    proptest! {
        #[test]
        fn roundtrip_and_identities(f in fields(), n in 2usize..6,
                                    s in prop::collection::vec(any::<u32>(), 2..20),
                                    g in prop::collection::vec(any::<u32>(), 2..40)) {
            let Some(t) = random_tv(&f, n, &s) else { return Ok(()); };
            prop_assert_eq!(&Transvection::from_matrix(&t.matrix()).unwrap(), &t);
            let m1 = t.minus_one();
            prop_assert!(m1.mul(&m1).data().iter().all(|e| e.is_zero()));
            prop_assert!(t.matrix().mul(&t.inverse().matrix()).is_identity());
            let q = f.order();
            let gm = Matrix::from_data(&f, n, n, (0..n*n).map(|i| Elem(g[i % g.len()].wrapping_mul(i as u32 + 3) % q)).collect());
            let hm = Matrix::from_data(&f, n, n, (0..n*n).map(|i| Elem(g[(i + 1) % g.len()].wrapping_mul(i as u32 + 11) % q)).collect());
            if let (Ok(gi), Ok(_)) = (gm.inverse(), hm.inverse()) {
                let c = t.conjugate(&gm).unwrap();
                prop_assert_eq!(c.matrix(), gm.mul(&t.matrix()).mul(&gi));
                let lhs = c.conjugate(&hm).unwrap();
                let rhs = t.conjugate(&hm.mul(&gm)).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
