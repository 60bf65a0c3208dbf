//! Irreducible representations of the Weyl-Heisenberg group, the Plancherel
//! distribution of weak Fourier sampling and the dense Fourier transform.
//!
//! Basis ordering, used everywhere: column index `z·p^{2n} + idx(x)·p^n +
//! idx(y)` and row index `k·p^{2n} + idx(a)·p^n + idx(b)`, where the row block
//! `k = 0` holds the one-dimensional irreps `(a, b)` and a block `k ≠ 0` holds
//! the matrix entry `(a, b)` of `ρ_k`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HspError, Result};
use crate::group::{GroupElement, GroupParams, Subgroup};
use crate::zp::{vec_from_index, vec_index, BilinearForm, SubspaceBasis, VecZp};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Largest dimension for a dense matrix.
pub const DENSE_MATRIX_CAP: u64 = 1 << 12;

/// Powers of `ω_p = e^{2πi/p}`, each computed directly from its exponent.
#[derive(Debug, Clone)]
pub struct Omega {
    table: Vec<Complex64>,
}

impl Omega {
    pub fn new(p: u32) -> Self {
        let table = (0..p)
            .map(|e| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * e as f64 / p as f64))
            .collect();
        Omega { table }
    }

    #[inline]
    pub fn pow(&self, e: u32) -> Complex64 {
        self.table[e as usize % self.table.len()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IrrepLabel {
    OneDim { a: VecZp, b: VecZp },
    HighDim { k: u32 },
}

impl IrrepLabel {
    pub fn dim(&self, params: &GroupParams) -> u64 {
        match self {
            IrrepLabel::OneDim { .. } => 1,
            IrrepLabel::HighDim { .. } => params.pn(),
        }
    }

    pub fn is_high_dim(&self) -> bool {
        matches!(self, IrrepLabel::HighDim { .. })
    }

    /// Block-major position in the row layout.
    pub fn index(&self, params: &GroupParams) -> usize {
        match self {
            IrrepLabel::OneDim { a, b } => vec_index(a, params.p()) * params.pn() as usize + vec_index(b, params.p()),
            IrrepLabel::HighDim { k } => (params.pn() * params.pn()) as usize + *k as usize - 1,
        }
    }

    /// Every label, one-dimensional first.
    pub fn all(params: &GroupParams) -> Vec<IrrepLabel> {
        let pn = params.pn() as usize;
        let p = params.p();
        let mut out: Vec<IrrepLabel> = (0..pn * pn)
            .map(|i| IrrepLabel::OneDim {
                a: vec_from_index(i / pn, p, params.n()),
                b: vec_from_index(i % pn, p, params.n()),
            })
            .collect();
        out.extend((1..p).map(|k| IrrepLabel::HighDim { k }));
        out
    }
}

impl fmt::Display for IrrepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",");
        match self {
            IrrepLabel::OneDim { a, b } => write!(f, "chi({}|{})", join(a), join(b)),
            IrrepLabel::HighDim { k } => write!(f, "rho({k})"),
        }
    }
}

/// `χ_{a,b}(g) = ω^{a·x + b·y}`.
pub fn chi(params: &GroupParams, a: &[u32], b: &[u32], g: &GroupElement) -> Result<Complex64> {
    if a.len() != params.n() || b.len() != params.n() || g.x.len() != params.n() {
        return Err(HspError::ParamsMismatch);
    }
    let f = params.field();
    let e = f.add(f.dot(a, &g.x), f.dot(b, &g.y));
    Ok(Omega::new(params.p()).pow(e))
}

fn check_matrix_dim(dim: u64) -> Result<()> {
    if dim > DENSE_MATRIX_CAP {
        return Err(HspError::TooLarge { dim, cap: DENSE_MATRIX_CAP });
    }
    Ok(())
}

/// The Weyl operator `W(a, b) = Σ_u ω^{b·u} |u + a⟩⟨u|` on `(Z_p)^len`.
pub fn weyl_dense(p: u32, a: &[u32], b: &[u32], omega: &Omega) -> ComplexMatrix {
    let len = a.len();
    let d = (p as usize).pow(len as u32);
    let mut m = ComplexMatrix::zeros(d, d);
    for col in 0..d {
        let u = vec_from_index(col, p, len);
        let target: Vec<u32> = u.iter().zip(a).map(|(&x, &y)| (x + y) % p).collect();
        let e = u.iter().zip(b).fold(0u64, |acc, (&x, &y)| acc + x as u64 * y as u64) % p as u64;
        m[(vec_index(&target, p), col)] = omega.pow(e as u32);
    }
    m
}

/// `ρ_k(x, y, z) = Σ_u ω^{k(z + y·u)} |u + x⟩⟨u|`.
pub fn rho(params: &GroupParams, k: u32, g: &GroupElement) -> Result<ComplexMatrix> {
    let f = params.field();
    let k = k % params.p();
    if k == 0 {
        return Err(HspError::ZeroLabel);
    }
    check_matrix_dim(params.pn())?;
    let omega = Omega::new(params.p());
    let ky = f.scale_vec(k, &g.y);
    Ok(weyl_dense(params.p(), &g.x, &ky, &omega) * omega.pow(f.mul(k, g.z)))
}

/// `ω^{kz} X^x Z_k^y` with `X|u⟩ = |u+1⟩` and `Z_k|u⟩ = ω^{ku}|u⟩` per coordinate.
pub fn rho_pauli(params: &GroupParams, k: u32, g: &GroupElement) -> Result<ComplexMatrix> {
    let p = params.p();
    let n = params.n();
    let k = k % p;
    if k == 0 {
        return Err(HspError::ZeroLabel);
    }
    check_matrix_dim(params.pn())?;
    let omega = Omega::new(p);
    let mut x_gate = ComplexMatrix::zeros(p as usize, p as usize);
    let mut z_gate = ComplexMatrix::zeros(p as usize, p as usize);
    for u in 0..p as usize {
        x_gate[((u + 1) % p as usize, u)] = Complex64::new(1.0, 0.0);
        z_gate[(u, u)] = omega.pow((k * u as u32) % p);
    }
    // Coordinate 0 is the least significant digit of the index.
    let mut acc = ComplexMatrix::identity(1, 1);
    for i in (0..n).rev() {
        let factor = x_gate.pow(g.x[i]) * z_gate.pow(g.y[i]);
        acc = acc.kronecker(&factor);
    }
    Ok(acc * omega.pow(params.field().mul(k, g.z)))
}

/// Dense matrix of any irrep at `g`.
pub fn irrep_matrix(params: &GroupParams, label: &IrrepLabel, g: &GroupElement) -> Result<ComplexMatrix> {
    match label {
        IrrepLabel::OneDim { a, b } => Ok(ComplexMatrix::from_element(1, 1, chi(params, a, b, g)?)),
        IrrepLabel::HighDim { k } => rho(params, *k, g),
    }
}

/// `ρ(H) = (1/|H|) Σ_h ρ(h)`.
pub fn projector(label: &IrrepLabel, h: &Subgroup) -> Result<ComplexMatrix> {
    let params = h.params();
    let elems = h.elements()?;
    let d = label.dim(&params) as usize;
    check_matrix_dim(d as u64)?;
    let mut acc = ComplexMatrix::zeros(d, d);
    for e in &elems {
        acc += irrep_matrix(&params, label, e)?;
    }
    Ok(acc / Complex64::new(elems.len() as f64, 0.0))
}

/// `r_ρ(H)`, the rank of `ρ(H)`, in closed form.
///
/// A character is trivial on `H` iff `(a, b)` pairs to zero with all of
/// `S_H` under the dot product; `ρ_k(H)` is zero once `H` meets the center
/// and otherwise has rank `p^n/|H|`.
pub fn rank_closed_form(label: &IrrepLabel, h: &Subgroup) -> u64 {
    let params = h.params();
    match label {
        IrrepLabel::OneDim { a, b } => {
            let mut ab = a.clone();
            ab.extend_from_slice(b);
            let f = params.field();
            let trivial = h.s_basis().rows().iter().all(|r| f.dot(r, &ab) == 0);
            u64::from(trivial)
        }
        IrrepLabel::HighDim { .. } => {
            if h.contains_center() {
                0
            } else {
                params.pn() / h.order()
            }
        }
    }
}

/// Support of the one-dimensional part of the Plancherel measure.
pub fn one_dim_support(h: &Subgroup) -> SubspaceBasis {
    h.s_basis().complement(BilinearForm::Euclidean)
}

/// Exact label distribution of weak Fourier sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct PlancherelDist {
    pub entries: Vec<(IrrepLabel, Ratio<u64>)>,
}

impl PlancherelDist {
    pub fn mass(&self, label: &IrrepLabel) -> Ratio<u64> {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, m)| *m)
            .unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn total(&self) -> Ratio<u64> {
        self.entries.iter().fold(Ratio::from_integer(0), |acc, (_, m)| acc + m)
    }

    pub fn one_dim_total(&self) -> Ratio<u64> {
        self.entries
            .iter()
            .filter(|(l, _)| !l.is_high_dim())
            .fold(Ratio::from_integer(0), |acc, (_, m)| acc + m)
    }
}

/// `P(ρ) = d_ρ |H| r_ρ(H) / |G|` over every label.
pub fn plancherel(h: &Subgroup) -> PlancherelDist {
    let params = h.params();
    let entries = IrrepLabel::all(&params)
        .into_iter()
        .map(|l| {
            let num = l.dim(&params) * h.order() * rank_closed_form(&l, h);
            (l, Ratio::new(num, params.order()))
        })
        .collect();
    PlancherelDist { entries }
}

/// Exact sampler for the Plancherel measure that never lists all labels.
///
/// In units of `1/|G|`, each supported one-dimensional label weighs `|H|`
/// and each high-dimensional label `p^n |H| r_k(H)`.
#[derive(Debug, Clone)]
pub struct LabelSampler {
    params: GroupParams,
    support: SubspaceBasis,
    h_order: u64,
    high_weight: u64,
}

impl LabelSampler {
    pub fn new(h: &Subgroup) -> Self {
        let params = h.params();
        let high_weight = if h.contains_center() { 0 } else { params.pn() * params.pn() };
        LabelSampler { params, support: one_dim_support(h), h_order: h.order(), high_weight }
    }

    pub fn one_dim_weight(&self) -> u64 {
        self.h_order * self.support.cardinality()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> IrrepLabel {
        let total = self.params.order();
        debug_assert_eq!(self.one_dim_weight() + (self.params.p() as u64 - 1) * self.high_weight, total);
        let u = rng.gen_range(0..total);
        let one = self.one_dim_weight();
        if u < one {
            let idx = (u / self.h_order) as usize;
            let coeffs = vec_from_index(idx, self.params.p(), self.support.dim());
            let ab = self.support.combine(&coeffs);
            let n = self.params.n();
            IrrepLabel::OneDim { a: ab[..n].to_vec(), b: ab[n..].to_vec() }
        } else {
            IrrepLabel::HighDim { k: 1 + ((u - one) / self.high_weight) as u32 }
        }
    }
}

/// Amplitude `⟨k,a,b| QFT |z,x,y⟩`.
pub fn qft_entry(params: &GroupParams, omega: &Omega, row: usize, col: usize) -> Complex64 {
    let p = params.p();
    let n = params.n();
    let f = params.field();
    let pn = params.pn() as usize;
    let g = params.element_at(col);
    let k = (row / (pn * pn)) as u32;
    let a = vec_from_index((row / pn) % pn, p, n);
    let b = vec_from_index(row % pn, p, n);
    let order = params.order() as f64;
    if k == 0 {
        let e = f.add(f.dot(&a, &g.x), f.dot(&b, &g.y));
        omega.pow(e) / order.sqrt()
    } else {
        if f.sub_vec(&a, &b) != g.x {
            return Complex64::new(0.0, 0.0);
        }
        let e = f.mul(k, f.add(g.z, f.dot(&b, &g.y)));
        omega.pow(e) * (pn as f64 / order).sqrt()
    }
}

/// The `|G| × |G|` Fourier transform over `G`.
pub fn qft_dense(params: &GroupParams) -> Result<ComplexMatrix> {
    check_matrix_dim(params.order())?;
    let omega = Omega::new(params.p());
    let d = params.order() as usize;
    Ok(ComplexMatrix::from_fn(d, d, |r, c| qft_entry(params, &omega, r, c)))
}

/// Applies the Fourier transform to a vector supported on few basis states.
pub fn qft_apply_sparse(params: &GroupParams, support: &[(usize, Complex64)]) -> Vec<Complex64> {
    let omega = Omega::new(params.p());
    let d = params.order() as usize;
    (0..d)
        .map(|row| support.iter().map(|&(col, amp)| qft_entry(params, &omega, row, col) * amp).sum())
        .collect()
}

/// `max |A_ij − B_ij|`.
pub fn max_deviation(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
