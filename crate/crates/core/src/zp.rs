//! Arithmetic and linear algebra over the prime field Z_p.
//!
//! Vectors are plain `Vec<u32>` with every entry reduced into `[0, p)`.
//! Subspaces are kept in reduced row echelon form, so two bases span the
//! same subspace exactly when they compare equal.

use rand::Rng;

use crate::error::{HspError, Result};

/// A vector over Z_p. Entries are always reduced.
pub type VecZp = Vec<u32>;

/// Largest modulus accepted by [`Fp::new`].
pub const MAX_MODULUS: u32 = 1 << 16;

/// The prime field Z_p.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    p: u32,
}

impl Fp {
    /// Validates primality by trial division.
    pub fn new(p: u32) -> Result<Self> {
        if p < 2 || p >= MAX_MODULUS || !is_prime(p) {
            return Err(HspError::NotPrime(p));
        }
        Ok(Fp { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(self, a: u32, mut e: u64) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(self, a: u32) -> Result<u32> {
        inv_mod(a, self)
    }

    /// `a / b`; panics on `b == 0`. Internal callers guarantee `b != 0`.
    pub(crate) fn div(self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b).expect("division by zero in Z_p"))
    }

    pub fn dot(self, a: &[u32], b: &[u32]) -> u32 {
        debug_assert_eq!(a.len(), b.len());
        let acc = a
            .iter()
            .zip(b)
            .fold(0u64, |acc, (&x, &y)| (acc + x as u64 * y as u64) % self.p as u64);
        acc as u32
    }

    pub fn add_vec(self, a: &[u32], b: &[u32]) -> VecZp {
        a.iter().zip(b).map(|(&x, &y)| self.add(x, y)).collect()
    }

    pub fn sub_vec(self, a: &[u32], b: &[u32]) -> VecZp {
        a.iter().zip(b).map(|(&x, &y)| self.sub(x, y)).collect()
    }

    pub fn scale_vec(self, c: u32, a: &[u32]) -> VecZp {
        a.iter().map(|&x| self.mul(c, x)).collect()
    }

    pub fn neg_vec(self, a: &[u32]) -> VecZp {
        a.iter().map(|&x| self.neg(x)).collect()
    }

    pub fn random_vec<R: Rng + ?Sized>(self, len: usize, rng: &mut R) -> VecZp {
        (0..len).map(|_| rng.gen_range(0..self.p)).collect()
    }
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Multiplicative inverse via the extended Euclidean algorithm.
pub fn inv_mod(a: u32, field: Fp) -> Result<u32> {
    let p = field.p as i64;
    let a = (a as i64).rem_euclid(p);
    if a == 0 {
        return Err(HspError::ZeroInverse(0, field.p));
    }
    let (mut r0, mut r1) = (p, a);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    Ok(t0.rem_euclid(p) as u32)
}

/// Smaller square root of `a`, or `None` for a non-residue.
///
/// Exhaustive search; moduli are below 2^16.
pub fn sqrt_mod(a: u32, field: Fp) -> Option<u32> {
    let a = a % field.p;
    (0..field.p).find(|&r| field.mul(r, r) == a)
}

/// Little-endian mixed-radix rank of a vector: `sum_i v_i p^i`.
pub fn vec_index(v: &[u32], p: u32) -> usize {
    v.iter().rev().fold(0usize, |acc, &x| acc * p as usize + x as usize)
}

/// Inverse of [`vec_index`].
pub fn vec_from_index(mut idx: usize, p: u32, len: usize) -> VecZp {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((idx % p as usize) as u32);
        idx /= p as usize;
    }
    out
}

/// Dense matrix over Z_p, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatZp {
    field: Fp,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl MatZp {
    pub fn zeros(field: Fp, rows: usize, cols: usize) -> Self {
        MatZp { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Fp, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows; entries are reduced mod p.
    pub fn from_rows(field: Fp, cols: usize, rows: &[VecZp]) -> Self {
        let mut m = Self::zeros(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v % field.p());
            }
        }
        m
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> MatZp {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[u32]) -> VecZp {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.field.dot(self.row(i), v)).collect()
    }

    pub fn mul_mat(&self, other: &MatZp) -> MatZp {
        assert_eq!(self.cols, other.rows);
        let f = self.field;
        let mut out = Self::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u32;
                for t in 0..self.cols {
                    acc = f.add(acc, f.mul(self.get(i, t), other.get(t, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (MatZp, Vec<usize>) {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(piv) = (r..m.rows).find(|&i| m.get(i, c) != 0) else {
                continue;
            };
            m.swap_rows(r, piv);
            let scale = f.inv(m.get(r, c)).expect("pivot is nonzero");
            for j in 0..m.cols {
                let v = f.mul(m.get(r, j), scale);
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let factor = m.get(i, c);
                if factor == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(r, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// One solution of `self * x = rhs`, or `None` if inconsistent.
    pub fn solve(&self, rhs: &[u32]) -> Option<VecZp> {
        assert_eq!(rhs.len(), self.rows);
        let mut aug = Self::zeros(self.field, self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, self.cols, rhs[i] % self.field.p());
        }
        let (red, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![0u32; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = red.get(r, self.cols);
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<MatZp> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = Self::zeros(self.field, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j));
            }
            aug.set(i, n + i, 1);
        }
        let (red, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Self::zeros(self.field, n, n);
        for i in 0..n {
            for j in 0..n {
                inv.set(i, j, red.get(i, n + j));
            }
        }
        Some(inv)
    }
}

/// Null space `{v : M v = 0}` as an echelon basis.
pub fn kernel_basis(m: &MatZp) -> SubspaceBasis {
    let f = m.field();
    let (red, pivots) = m.rref();
    let free: Vec<usize> = (0..m.cols()).filter(|c| !pivots.contains(c)).collect();
    let vectors: Vec<VecZp> = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0u32; m.cols()];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(red.get(r, fc));
            }
            v
        })
        .collect();
    SubspaceBasis::span(f, m.cols(), &vectors)
}

/// Bilinear forms on Z_p^dim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BilinearForm {
    /// `(x, y) . (x', y') = x.y' - y.x'` on Z_p^{2n}.
    Symplectic { n: usize },
    /// The standard dot product.
    Euclidean,
}

impl BilinearForm {
    pub fn eval(self, field: Fp, v: &[u32], w: &[u32]) -> u32 {
        let r = self.functional(field, v);
        field.dot(&r, w)
    }

    /// The row vector `r` with `r . w = form(v, w)` for all `w`.
    pub fn functional(self, field: Fp, v: &[u32]) -> VecZp {
        match self {
            BilinearForm::Euclidean => v.to_vec(),
            BilinearForm::Symplectic { n } => {
                assert_eq!(v.len(), 2 * n, "symplectic form needs even dimension 2n");
                let (x, y) = v.split_at(n);
                let mut r = field.neg_vec(y);
                r.extend_from_slice(x);
                r
            }
        }
    }
}

/// A subspace of Z_p^ambient in reduced row echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubspaceBasis {
    field: Fp,
    ambient: usize,
    rows: Vec<VecZp>,
    pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn empty(field: Fp, ambient: usize) -> Self {
        SubspaceBasis { field, ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(field: Fp, ambient: usize) -> Self {
        let rows: Vec<VecZp> = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        SubspaceBasis { field, ambient, rows, pivots: (0..ambient).collect() }
    }

    /// Span of arbitrary vectors.
    pub fn span(field: Fp, ambient: usize, vectors: &[VecZp]) -> Self {
        if vectors.is_empty() {
            return Self::empty(field, ambient);
        }
        let (red, pivots) = MatZp::from_rows(field, ambient, vectors).rref();
        let rows = (0..pivots.len()).map(|i| red.row(i).to_vec()).collect();
        SubspaceBasis { field, ambient, rows, pivots }
    }

    pub fn field(&self) -> Fp {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[VecZp] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Number of elements, `p^dim`.
    pub fn cardinality(&self) -> u64 {
        (self.field.p() as u64).pow(self.dim() as u32)
    }

    /// Eliminates the pivot coordinates of `v`; the result is the canonical
    /// representative of `v + self`.
    pub fn reduce(&self, v: &[u32]) -> VecZp {
        let f = self.field;
        let mut out = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = out[pc];
            if c != 0 {
                for (o, &r) in out.iter_mut().zip(row) {
                    *o = f.sub(*o, f.mul(c, r));
                }
            }
        }
        out
    }

    /// Coefficients of `v` in this basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[u32]) -> Option<Vec<u32>> {
        let coeffs: Vec<u32> = self.pivots.iter().map(|&pc| v[pc]).collect();
        if self.reduce(v).iter().all(|&x| x == 0) {
            Some(coeffs)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn combine(&self, coeffs: &[u32]) -> VecZp {
        let f = self.field;
        let mut out = vec![0u32; self.ambient];
        for (row, &c) in self.rows.iter().zip(coeffs) {
            for (o, &r) in out.iter_mut().zip(row) {
                *o = f.add(*o, f.mul(c, r));
            }
        }
        out
    }

    pub fn with_vector(&self, v: &[u32]) -> Self {
        let mut vs = self.rows.clone();
        vs.push(v.to_vec());
        Self::span(self.field, self.ambient, &vs)
    }

    pub fn is_subspace_of(&self, other: &SubspaceBasis) -> bool {
        self.rows.iter().all(|r| other.contains(r))
    }

    /// Orthogonal complement `{w : form(v, w) = 0 for all v in self}`.
    pub fn complement(&self, form: BilinearForm) -> SubspaceBasis {
        complement_basis(self, form)
    }

    pub fn is_isotropic(&self, n: usize) -> bool {
        let form = BilinearForm::Symplectic { n };
        self.rows.iter().enumerate().all(|(i, a)| {
            self.rows[i + 1..].iter().all(|b| form.eval(self.field, a, b) == 0)
        })
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> VecZp {
        let coeffs = self.field.random_vec(self.dim(), rng);
        self.combine(&coeffs)
    }

    /// All `p^dim` elements; only sensible for small subspaces.
    pub fn elements(&self) -> impl Iterator<Item = VecZp> + '_ {
        let p = self.field.p();
        let d = self.dim();
        (0..self.cardinality() as usize).map(move |i| self.combine(&vec_from_index(i, p, d)))
    }
}

pub fn complement_basis(s: &SubspaceBasis, form: BilinearForm) -> SubspaceBasis {
    let f = s.field();
    if s.dim() == 0 {
        return SubspaceBasis::full(f, s.ambient());
    }
    let rows: Vec<VecZp> = s.rows().iter().map(|r| form.functional(f, r)).collect();
    kernel_basis(&MatZp::from_rows(f, s.ambient(), &rows))
}

/// A random `d`-dimensional isotropic subspace of Z_p^{2n}.
///
/// Greedy extension: each new vector is drawn uniformly from the symplectic
/// complement of the current span and rejected if it already lies in it.
/// The procedure commutes with the symplectic group, which acts transitively
/// on isotropic subspaces of a given dimension, so the output is uniform.
pub fn random_isotropic<R: Rng + ?Sized>(field: Fp, n: usize, d: usize, rng: &mut R) -> SubspaceBasis {
    random_isotropic_with(field, n, d, rng, |_| true)
}

/// Like [`random_isotropic`], additionally requiring `x . y = 0` on every
/// basis vector. Over Z_2 that makes the quadratic form `x . y` vanish on
/// the whole subspace.
pub fn random_totally_singular<R: Rng + ?Sized>(
    field: Fp,
    n: usize,
    d: usize,
    rng: &mut R,
) -> SubspaceBasis {
    random_isotropic_with(field, n, d, rng, |v| field.dot(&v[..n], &v[n..]) == 0)
}

fn random_isotropic_with<R, F>(field: Fp, n: usize, d: usize, rng: &mut R, accept: F) -> SubspaceBasis
where
    R: Rng + ?Sized,
    F: Fn(&[u32]) -> bool,
{
    assert!(d <= n, "isotropic subspaces of Z_p^2n have dimension at most n");
    let form = BilinearForm::Symplectic { n };
    let mut s = SubspaceBasis::empty(field, 2 * n);
    while s.dim() < d {
        let perp = s.complement(form);
        let w = perp.random_element(rng);
        if !s.contains(&w) && accept(&w) {
            s = s.with_vector(&w);
        }
    }
    s
}

/// A uniformly random subspace of the given dimension (rejection on rank).
pub fn random_subspace<R: Rng + ?Sized>(field: Fp, ambient: usize, d: usize, rng: &mut R) -> SubspaceBasis {
    assert!(d <= ambient);
    let mut s = SubspaceBasis::empty(field, ambient);
    while s.dim() < d {
        let w = field.random_vec(ambient, rng);
        if !s.contains(&w) {
            s = s.with_vector(&w);
        }
    }
    s
}
