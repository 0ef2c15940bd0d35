//! Dense exact linear algebra over GF(q).
//!
//! Vectors are columns, covectors are rows acting by the dot product.
//! Subspaces are kept in reduced row-echelon form so that equal spaces
//! compare equal structurally.

use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::gf::{Elem, Field};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    Singular,
    #[error("linear system has no solution")]
    NoSolution,
    #[error("operands belong to different fields")]
    FieldMismatch,
}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.p().hash(state);
        self.degree().hash(state);
    }
}

fn dim_err(what: &str, a: usize, b: usize) -> LinalgError {
    LinalgError::DimensionMismatch(format!("{what}: {a} vs {b}"))
}

macro_rules! vec_like {
    ($name:ident) => {
        #[derive(Clone, PartialEq, Eq, Hash)]
        pub struct $name {
            field: Field,
            entries: Vec<Elem>,
        }

        impl $name {
            pub fn new(field: &Field, entries: Vec<Elem>) -> Self {
                Self {
                    field: field.clone(),
                    entries,
                }
            }

            pub fn zero(field: &Field, n: usize) -> Self {
                Self::new(field, vec![Elem::ZERO; n])
            }

            /// The i-th standard basis element.
            pub fn unit(field: &Field, n: usize, i: usize) -> Self {
                let mut e = vec![Elem::ZERO; n];
                e[i] = Elem::ONE;
                Self::new(field, e)
            }

            pub fn from_raw(field: &Field, raw: &[u32]) -> Self {
                Self::new(field, raw.iter().map(|&x| Elem(x)).collect())
            }

            pub fn field(&self) -> &Field {
                &self.field
            }

            pub fn dim(&self) -> usize {
                self.entries.len()
            }

            pub fn entries(&self) -> &[Elem] {
                &self.entries
            }

            pub fn get(&self, i: usize) -> Elem {
                self.entries[i]
            }

            pub fn set(&mut self, i: usize, x: Elem) {
                self.entries[i] = x;
            }

            pub fn raw(&self) -> Vec<u32> {
                self.entries.iter().map(|e| e.0).collect()
            }

            pub fn is_zero(&self) -> bool {
                self.entries.iter().all(|e| e.is_zero())
            }

            pub fn leading_index(&self) -> Option<usize> {
                self.entries.iter().position(|e| !e.is_zero())
            }

            /// Number of nonzero coordinates.
            pub fn support(&self) -> usize {
                self.entries.iter().filter(|e| !e.is_zero()).count()
            }

            pub fn add(&self, o: &Self) -> Self {
                assert_eq!(self.dim(), o.dim(), "dimension mismatch");
                let f = &self.field;
                Self::new(
                    f,
                    self.entries
                        .iter()
                        .zip(&o.entries)
                        .map(|(&a, &b)| f.add(a, b))
                        .collect(),
                )
            }

            pub fn sub(&self, o: &Self) -> Self {
                assert_eq!(self.dim(), o.dim(), "dimension mismatch");
                let f = &self.field;
                Self::new(
                    f,
                    self.entries
                        .iter()
                        .zip(&o.entries)
                        .map(|(&a, &b)| f.sub(a, b))
                        .collect(),
                )
            }

            pub fn scale(&self, c: Elem) -> Self {
                let f = &self.field;
                Self::new(f, self.entries.iter().map(|&a| f.mul(c, a)).collect())
            }

            pub fn neg(&self) -> Self {
                let f = &self.field;
                Self::new(f, self.entries.iter().map(|&a| f.neg(a)).collect())
            }

            /// Entrywise θ.
            pub fn twist(&self) -> Self {
                let f = &self.field;
                Self::new(
                    f,
                    self.entries
                        .iter()
                        .map(|&a| f.involution(a).expect("field has an involution"))
                        .collect(),
                )
            }

            /// Rescales so that the first nonzero entry is 1; returns the factor divided out.
            pub fn normalize(&self) -> (Self, Elem) {
                match self.leading_index() {
                    None => (self.clone(), Elem::ONE),
                    Some(i) => {
                        let c = self.entries[i];
                        let ci = self.field.inv(c).unwrap();
                        (self.scale(ci), c)
                    }
                }
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}{:?}", stringify!($name), self.raw())
            }
        }
    };
}

vec_like!(Vector);
vec_like!(Covector);

impl Covector {
    /// φ(v).
    pub fn eval(&self, v: &Vector) -> Elem {
        debug_assert_eq!(self.dim(), v.dim());
        dot(&self.field, &self.entries, &v.entries)
    }

    pub fn to_vector(&self) -> Vector {
        Vector::new(&self.field, self.entries.clone())
    }

    /// The covector x ↦ φ(Mx).
    pub fn mul_matrix(&self, m: &Matrix) -> Covector {
        assert_eq!(self.dim(), m.rows);
        let f = &self.field;
        let mut out = vec![Elem::ZERO; m.cols];
        for (i, &a) in self.entries.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = f.add(*o, f.mul(a, m.get(i, j)));
            }
        }
        Covector::new(f, out)
    }
}

impl Vector {
    pub fn to_covector(&self) -> Covector {
        Covector::new(&self.field, self.entries.clone())
    }
}

pub(crate) fn dot(f: &Field, a: &[Elem], b: &[Elem]) -> Elem {
    let mut s = Elem::ZERO;
    for (&x, &y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s = f.add(s, f.mul(x, y));
        }
    }
    s
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{:?}", self.to_raw_rows())
    }
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Matrix {
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![Elem::ZERO; rows * cols],
        }
    }

    pub fn identity(field: &Field, n: usize) -> Matrix {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = Elem::ONE;
        }
        m
    }

    pub fn from_data(field: &Field, rows: usize, cols: usize, data: Vec<Elem>) -> Matrix {
        assert_eq!(data.len(), rows * cols);
        Matrix {
            field: field.clone(),
            rows,
            cols,
            data,
        }
    }

    pub fn from_raw_rows(field: &Field, rows: &[Vec<u32>]) -> Result<Matrix, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(dim_err("ragged rows", row.len(), c));
            }
            data.extend(row.iter().map(|&x| Elem(x)));
        }
        Ok(Matrix::from_data(field, r, c, data))
    }

    /// Stacks vectors as rows.
    pub fn from_row_vectors(field: &Field, n: usize, rows: &[Vector]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * n);
        for r in rows {
            assert_eq!(r.dim(), n);
            data.extend_from_slice(r.entries());
        }
        Matrix::from_data(field, rows.len(), n, data)
    }

    /// Places vectors as columns.
    pub fn from_columns(field: &Field, n: usize, cols: &[Vector]) -> Matrix {
        let mut m = Matrix::zeros(field, n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.dim(), n);
            for i in 0..n {
                m.set(i, j, c.get(i));
            }
        }
        m
    }

    /// The rank-one map v⊗φ: x ↦ φ(x)v.
    pub fn outer(v: &Vector, phi: &Covector) -> Matrix {
        let f = v.field();
        let mut m = Matrix::zeros(f, v.dim(), phi.dim());
        for i in 0..v.dim() {
            for j in 0..phi.dim() {
                m.set(i, j, f.mul(v.get(i), phi.get(j)));
            }
        }
        m
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Elem) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vector(&self, i: usize) -> Vector {
        Vector::new(&self.field, self.row(i).to_vec())
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::new(&self.field, (0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn to_raw_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|e| e.0).collect())
            .collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j) == if i == j { Elem::ONE } else { Elem::ZERO })
            })
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// Entrywise θ.
    pub fn twist(&self) -> Matrix {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|&a| f.involution(a).expect("field has an involution"))
                .collect(),
        }
    }

    fn zip_with(&self, o: &Matrix, op: impl Fn(Elem, Elem) -> Elem) -> Result<Matrix, LinalgError> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(dim_err("elementwise", self.rows * self.cols, o.rows * o.cols));
        }
        Ok(Matrix {
            field: self.field.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| op(a, b)).collect(),
        })
    }

    pub fn add(&self, o: &Matrix) -> Result<Matrix, LinalgError> {
        let f = self.field.clone();
        self.zip_with(o, |a, b| f.add(a, b))
    }

    pub fn sub(&self, o: &Matrix) -> Result<Matrix, LinalgError> {
        let f = self.field.clone();
        self.zip_with(o, |a, b| f.sub(a, b))
    }

    pub fn scale(&self, c: Elem) -> Matrix {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(c, a)).collect(),
        }
    }

    pub fn matmul(&self, o: &Matrix) -> Result<Matrix, LinalgError> {
        if self.field != o.field {
            return Err(LinalgError::FieldMismatch);
        }
        if self.cols != o.rows {
            return Err(dim_err("matmul", self.cols, o.rows));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let idx = i * o.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Panicking product for internal use where shapes are known to agree.
    pub fn mul(&self, o: &Matrix) -> Matrix {
        self.matmul(o).expect("compatible shapes")
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.dim());
        let f = &self.field;
        Vector::new(f, (0..self.rows).map(|i| dot(f, self.row(i), v.entries())).collect())
    }

    pub fn trace(&self) -> Elem {
        let f = &self.field;
        (0..self.rows.min(self.cols)).fold(Elem::ZERO, |s, i| f.add(s, self.get(i, i)))
    }

    /// Reduced row-echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        if self.field.order() == 2 && self.cols <= 64 {
            return self.rref_gf2();
        }
        let f = &self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(pr) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            if pr != r {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, r * m.cols + j);
                }
            }
            let inv = f.inv(m.get(r, c)).unwrap();
            for j in c..m.cols {
                let x = m.get(r, j);
                m.set(r, j, f.mul(inv, x));
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor.is_zero() {
                    continue;
                }
                let nf = f.neg(factor);
                for j in c..m.cols {
                    let x = m.get(r, j);
                    if !x.is_zero() {
                        let y = m.get(i, j);
                        m.set(i, j, f.add(y, f.mul(nf, x)));
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Bit-packed elimination for GF(2): one u64 per row.
    fn rref_gf2(&self) -> (Matrix, Vec<usize>) {
        let mut rows: Vec<u64> = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, e)| acc | ((e.0 as u64) << j))
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == rows.len() {
                break;
            }
            let bit = 1u64 << c;
            let Some(pr) = (r..rows.len()).find(|&i| rows[i] & bit != 0) else {
                continue;
            };
            rows.swap(pr, r);
            let pivot_row = rows[r];
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && *row & bit != 0 {
                    *row ^= pivot_row;
                }
            }
            pivots.push(c);
            r += 1;
        }
        let mut m = Matrix::zeros(&self.field, self.rows, self.cols);
        for (i, row) in rows.iter().enumerate() {
            for j in 0..self.cols {
                if row >> j & 1 == 1 {
                    m.set(i, j, Elem::ONE);
                }
            }
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of {x : Mx = 0}, one vector per free column.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let f = &self.field;
        let mut is_pivot = vec![None; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            is_pivot[c] = Some(i);
        }
        let mut out = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free].is_some() {
                continue;
            }
            let mut x = vec![Elem::ZERO; self.cols];
            x[free] = Elem::ONE;
            for (i, &c) in pivots.iter().enumerate() {
                x[c] = f.neg(r.get(i, free));
            }
            out.push(Vector::new(f, x));
        }
        out
    }

    /// Column space.
    pub fn image(&self) -> Subspace {
        let cols: Vec<Vector> = (0..self.cols).map(|j| self.column(j)).collect();
        Subspace::span(&self.field, self.rows, &cols)
    }

    /// One solution of Mx = b together with a kernel basis.
    pub fn solve(&self, b: &Vector) -> Result<(Vector, Vec<Vector>), LinalgError> {
        if b.dim() != self.rows {
            return Err(dim_err("solve", b.dim(), self.rows));
        }
        let f = &self.field;
        let mut aug = Matrix::zeros(f, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, b.get(i));
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return Err(LinalgError::NoSolution);
        }
        let mut x = vec![Elem::ZERO; self.cols];
        for (i, &c) in pivots.iter().enumerate() {
            x[c] = r.get(i, self.cols);
        }
        Ok((Vector::new(f, x), self.kernel()))
    }

    pub fn det(&self) -> Result<Elem, LinalgError> {
        if !self.is_square() {
            return Err(dim_err("det of non-square", self.rows, self.cols));
        }
        let f = &self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Elem::ONE;
        for c in 0..n {
            let Some(pr) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(Elem::ZERO);
            };
            if pr != c {
                for j in 0..n {
                    m.data.swap(pr * n + j, c * n + j);
                }
                det = f.neg(det);
            }
            let p = m.get(c, c);
            det = f.mul(det, p);
            let inv = f.inv(p).unwrap();
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if factor.is_zero() {
                    continue;
                }
                let nf = f.neg(factor);
                for j in c..n {
                    let x = m.get(c, j);
                    let y = m.get(i, j);
                    m.set(i, j, f.add(y, f.mul(nf, x)));
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if !self.is_square() {
            return Err(dim_err("inverse of non-square", self.rows, self.cols));
        }
        let n = self.rows;
        let f = &self.field;
        let mut aug = Matrix::zeros(f, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, Elem::ONE);
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinalgError::Singular);
        }
        let mut inv = Matrix::zeros(f, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, r.get(i, n + j));
            }
        }
        Ok(inv)
    }
}

/// Subspace of K^n with a canonical RREF basis.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Matrix,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(n={}, {:?})", self.ambient, self.basis.to_raw_rows())
    }
}

impl Subspace {
    fn from_rows(m: &Matrix) -> Subspace {
        let (r, pivots) = m.rref();
        let k = pivots.len();
        let n = m.cols;
        Subspace {
            ambient: n,
            basis: Matrix::from_data(m.field(), k, n, r.data[..k * n].to_vec()),
        }
    }

    pub fn span(field: &Field, n: usize, vs: &[Vector]) -> Subspace {
        Subspace::from_rows(&Matrix::from_row_vectors(field, n, vs))
    }

    pub fn span_covectors(field: &Field, n: usize, cs: &[Covector]) -> Subspace {
        let vs: Vec<Vector> = cs.iter().map(|c| c.to_vector()).collect();
        Subspace::span(field, n, &vs)
    }

    pub fn zero(field: &Field, n: usize) -> Subspace {
        Subspace {
            ambient: n,
            basis: Matrix::zeros(field, 0, n),
        }
    }

    pub fn full(field: &Field, n: usize) -> Subspace {
        Subspace {
            ambient: n,
            basis: Matrix::identity(field, n),
        }
    }

    pub fn field(&self) -> &Field {
        self.basis.field()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Basis rows in RREF.
    pub fn basis_matrix(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis(&self) -> Vec<Vector> {
        (0..self.dim()).map(|i| self.basis.row_vector(i)).collect()
    }

    pub fn pivots(&self) -> Vec<usize> {
        (0..self.dim())
            .map(|i| self.basis.row(i).iter().position(|e| !e.is_zero()).unwrap())
            .collect()
    }

    fn check(&self, o: &Subspace) -> Result<(), LinalgError> {
        if self.ambient != o.ambient {
            Err(dim_err("ambient dimension", self.ambient, o.ambient))
        } else {
            Ok(())
        }
    }

    pub fn sum(&self, o: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(o)?;
        let mut vs = self.basis();
        vs.extend(o.basis());
        Ok(Subspace::span(self.field(), self.ambient, &vs))
    }

    /// Annihilator under the dot-product pairing.
    pub fn perp(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.field(), self.ambient);
        }
        Subspace::span(self.field(), self.ambient, &self.basis.kernel())
    }

    pub fn intersect(&self, o: &Subspace) -> Result<Subspace, LinalgError> {
        self.check(o)?;
        Ok(self.perp().sum(&o.perp())?.perp())
    }

    pub fn contains(&self, v: &Vector) -> Result<bool, LinalgError> {
        if v.dim() != self.ambient {
            return Err(dim_err("contains", v.dim(), self.ambient));
        }
        Ok(self.reduce(v).is_zero())
    }

    pub fn contains_space(&self, o: &Subspace) -> Result<bool, LinalgError> {
        self.check(o)?;
        Ok(o.basis().iter().all(|v| self.reduce(v).is_zero()))
    }

    /// Remainder of v after clearing the pivot columns of the basis.
    pub fn reduce(&self, v: &Vector) -> Vector {
        let f = self.field().clone();
        let mut x = v.entries().to_vec();
        for (i, c) in self.pivots().into_iter().enumerate() {
            let a = x[c];
            if a.is_zero() {
                continue;
            }
            let na = f.neg(a);
            for (j, e) in self.basis.row(i).iter().enumerate() {
                if !e.is_zero() {
                    x[j] = f.add(x[j], f.mul(na, *e));
                }
            }
        }
        Vector::new(&f, x)
    }

    /// Lexicographically least nonzero vector (the last RREF row), if any.
    pub fn least_nonzero(&self) -> Option<Vector> {
        (self.dim() > 0).then(|| self.basis.row_vector(self.dim() - 1))
    }

    /// All vectors of the subspace; only for small q^dim.
    pub fn elements(&self) -> Vec<Vector> {
        let f = self.field().clone();
        let q = f.order() as usize;
        let k = self.dim();
        let total = q.pow(k as u32);
        let basis = self.basis();
        (0..total)
            .map(|mut code| {
                let mut v = Vector::zero(&f, self.ambient);
                for b in &basis {
                    let c = Elem((code % q) as u32);
                    code /= q;
                    if !c.is_zero() {
                        v = v.add(&b.scale(c));
                    }
                }
                v
            })
            .collect()
    }
}

/// Projective points of K^n as leading-1 vectors, ordered by leading index
/// and then by the remaining coordinates read as a little-endian integer.
pub fn projective_points(field: &Field, n: usize) -> Vec<Vector> {
    let q = field.order() as u64;
    let mut out = Vec::new();
    for lead in 0..n {
        let tail = n - lead - 1;
        for mut code in 0..q.pow(tail as u32) {
            let mut e = vec![Elem::ZERO; n];
            e[lead] = Elem::ONE;
            for x in e.iter_mut().skip(lead + 1) {
                *x = Elem((code % q) as u32);
                code /= q;
            }
            out.push(Vector::new(field, e));
        }
    }
    out
}
