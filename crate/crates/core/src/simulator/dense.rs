//! Dense complex-vector backend used to cross-check the exact pipeline.
//!
//! Each coset state is simulated as a pure-state trajectory: a uniformly
//! random coset `gH`, the Fourier transform, a measurement of the full row
//! `(k, a, b)` and the collapsed vector on the remaining column register.
//! Averaged over `g` and the measured row this reproduces the mixed-state
//! pipeline exactly.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{HspError, Result};
use crate::group::{GroupElement, GroupParams, Subgroup};
use crate::reps::{chi, max_deviation, qft_apply_sparse, qft_dense, rho, ComplexMatrix, IrrepLabel, Omega, DENSE_MATRIX_CAP};
use crate::simulator::structured::{multi_from_index, multi_index, two_register_map};
use crate::zp::{inv_mod, vec_from_index, Fp, MatZp};

/// Two-register dense objects are capped at `p^{2n} ≤ 2^12`.
pub const TWO_REGISTER_CAP: u64 = 1 << 12;

pub fn check_caps(params: &GroupParams) -> Result<()> {
    params.check_dense().map_err(|e| HspError::BackendCapExceeded(e.to_string()))?;
    let two = params.pn() * params.pn();
    if two > TWO_REGISTER_CAP {
        return Err(HspError::BackendCapExceeded(format!(
            "two-register dimension {two} exceeds {TWO_REGISTER_CAP}"
        )));
    }
    Ok(())
}

/// `|gH⟩` as sparse `(index, amplitude)` pairs.
pub fn coset_vector(h: &Subgroup, g: &GroupElement) -> Result<Vec<(usize, Complex64)>> {
    let pr = h.params();
    let elems = h.elements()?;
    let amp = Complex64::new((elems.len() as f64).sqrt().recip(), 0.0);
    Ok(elems.iter().map(|e| (pr.index_of(&pr.mul(g, e)), amp)).collect())
}

fn sample_weights<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last = i;
            if u < w {
                return i;
            }
            u -= w;
        }
    }
    last
}

/// Label of a Fourier row, with the block offset of the row inside it.
pub fn label_of_row(params: &GroupParams, row: usize) -> (IrrepLabel, usize) {
    let pn = params.pn() as usize;
    let k = row / (pn * pn);
    if k == 0 {
        let a = vec_from_index(row / pn, params.p(), params.n());
        let b = vec_from_index(row % pn, params.p(), params.n());
        (IrrepLabel::OneDim { a, b }, 0)
    } else {
        (IrrepLabel::HighDim { k: k as u32 }, row % (pn * pn))
    }
}

/// One trajectory of weak Fourier sampling on `|gH⟩`.
///
/// Returns the label and, for high-dimensional labels, the normalized
/// vector on the column register left after measuring the row index.
pub fn weak_fourier_trajectory<R: Rng + ?Sized>(
    h: &Subgroup,
    g: &GroupElement,
    rng: &mut R,
) -> Result<(IrrepLabel, Option<Vec<Complex64>>)> {
    let pr = h.params();
    pr.check_dense()?;
    let phi = qft_apply_sparse(&pr, &coset_vector(h, g)?);
    let weights: Vec<f64> = phi.iter().map(|a| a.norm_sqr()).collect();
    let row = sample_weights(&weights, rng);
    let (label, _) = label_of_row(&pr, row);
    if !label.is_high_dim() {
        return Ok((label, None));
    }
    let pn = pr.pn() as usize;
    let start = row - row % pn;
    let col: Vec<Complex64> = phi[start..start + pn].to_vec();
    let norm = col.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    Ok((label, Some(col.into_iter().map(|a| a / norm).collect())))
}

/// Column-register state after observing `label`, averaged over cosets and
/// row indices: the normalized block of `QFT σ QFT†` summed over rows.
pub fn collapsed_density(h: &Subgroup, k: u32) -> Result<ComplexMatrix> {
    let pr = h.params();
    let q = qft_dense(&pr)?;
    let d = pr.order() as usize;
    let mut sigma = ComplexMatrix::zeros(d, d);
    let weight = Complex64::new(1.0 / d as f64, 0.0);
    for g in pr.elements() {
        let v = coset_vector(h, &g)?;
        for &(i, a) in &v {
            for &(j, b) in &v {
                sigma[(i, j)] += weight * a * b.conj();
            }
        }
    }
    let rho = &q * sigma * q.adjoint();
    let pn = pr.pn() as usize;
    let base = k as usize * pn * pn;
    let mut out = ComplexMatrix::zeros(pn, pn);
    for a in 0..pn {
        for b in 0..pn {
            for b2 in 0..pn {
                out[(b, b2)] += rho[(base + a * pn + b, base + a * pn + b2)];
            }
        }
    }
    let tr = out.trace();
    if tr.norm() < 1e-12 {
        return Err(HspError::ZeroState);
    }
    Ok(out / tr)
}

/// Permutation `|u⟩ ↦ |Au⟩` over `regs` registers.
pub fn linear_dense(field: Fp, n: usize, regs: usize, a: &MatZp) -> Result<ComplexMatrix> {
    let d = (field.p() as u64).pow((n * regs) as u32);
    if d > DENSE_MATRIX_CAP {
        return Err(HspError::TooLarge { dim: d, cap: DENSE_MATRIX_CAP });
    }
    let d = d as usize;
    let mut m = ComplexMatrix::zeros(d, d);
    for col in 0..d {
        let u = multi_from_index(field.p(), n, regs, col);
        m[(multi_index(field.p(), n, &a.mul_vec(&u)), col)] = Complex64::new(1.0, 0.0);
    }
    Ok(m)
}

/// `F_c` on one register of a multi-register space.
pub fn fourier_dense(field: Fp, n: usize, regs: usize, register: usize, c: u32) -> Result<ComplexMatrix> {
    let p = field.p();
    let d = (p as u64).pow((n * regs) as u32);
    if d > DENSE_MATRIX_CAP {
        return Err(HspError::TooLarge { dim: d, cap: DENSE_MATRIX_CAP });
    }
    let d = d as usize;
    let omega = Omega::new(p);
    let norm = ((p as f64).powi(n as i32)).sqrt().recip();
    let range = register * n..(register + 1) * n;
    let mut m = ComplexMatrix::zeros(d, d);
    for col in 0..d {
        let u = multi_from_index(p, n, regs, col);
        for w in 0..(p as usize).pow(n as u32) {
            let wv = vec_from_index(w, p, n);
            let mut target = u.clone();
            target.splice(range.clone(), wv.iter().copied());
            let e = field.mul(c, field.dot(&u[range.clone()], &wv));
            m[(multi_index(p, n, &target), col)] += omega.pow(e) * norm;
        }
    }
    Ok(m)
}

pub fn u_alpha_dense(field: Fp, n: usize, regs: usize, alpha: u32) -> Result<ComplexMatrix> {
    if alpha % field.p() == 0 {
        return Err(HspError::ZeroAlpha);
    }
    let mut a = MatZp::identity(field, n * regs);
    for i in 0..n {
        a.set(i, i, alpha % field.p());
    }
    linear_dense(field, n, regs, &a)
}

/// Dense Clebsch-Gordan unitary for `ρ_k ⊗ ρ_l`.
pub fn cg_dense(field: Fp, n: usize, k: u32, l: u32) -> Result<ComplexMatrix> {
    let p = field.p();
    let (k, l) = (k % p, l % p);
    if k == 0 || l == 0 {
        return Err(HspError::ZeroLabel);
    }
    if p == 2 {
        let a = linear_dense(field, n, 2, &two_register_map(field, n, 1, 1, 0, 1))?;
        return Ok(fourier_dense(field, n, 2, 1, 1)? * a);
    }
    let s = field.add(k, l);
    if s == 0 {
        let a = linear_dense(field, n, 2, &two_register_map(field, n, 1, p - 1, 1, 1))?;
        Ok(fourier_dense(field, n, 2, 1, field.div(l, 2))? * a)
    } else {
        let sinv = inv_mod(s, field)?;
        linear_dense(field, n, 2, &two_register_map(field, n, 1, p - 1, field.mul(k, sinv), field.mul(l, sinv)))
    }
}

/// Deviation of `CG (ρ_k ⊗ ρ_l) CG†` from its predicted block form over all
/// of `G`: `I ⊗ ρ_{k+l}` when `k + l ≠ 0`, otherwise a diagonal carrying
/// every one-dimensional character exactly once. A missed or repeated
/// character reports deviation 1.
pub fn cg_block_deviation(params: &GroupParams, k: u32, l: u32) -> Result<f64> {
    let field = params.field();
    let n = params.n();
    let p = params.p();
    let u = cg_dense(field, n, k, l)?;
    let elems: Vec<GroupElement> = params.elements().collect();
    let conj: Vec<ComplexMatrix> = elems
        .iter()
        .map(|g| Ok(&u * rho(params, k, g)?.kronecker(&rho(params, l, g)?) * u.adjoint()))
        .collect::<Result<_>>()?;
    let s = field.add(k, l);
    let pn = params.pn() as usize;
    if s != 0 {
        let id = ComplexMatrix::identity(pn, pn);
        let mut worst: f64 = 0.0;
        for (g, m) in elems.iter().zip(&conj) {
            worst = worst.max(max_deviation(m, &id.kronecker(&rho(params, s, g)?)));
        }
        return Ok(worst);
    }
    let dim = pn * pn;
    let mut worst: f64 = 0.0;
    for m in &conj {
        for i in 0..dim {
            for j in 0..dim {
                if i != j {
                    worst = worst.max(m[(i, j)].norm());
                }
            }
        }
    }
    let mut seen = std::collections::HashSet::new();
    for i in 0..dim {
        let mut best = (f64::INFINITY, 0usize);
        for idx in 0..dim {
            let ab = vec_from_index(idx, p, 2 * n);
            let mut dev: f64 = 0.0;
            for (g, m) in elems.iter().zip(&conj) {
                dev = dev.max((m[(i, i)] - chi(params, &ab[..n], &ab[n..], g)?).norm());
            }
            if dev < best.0 {
                best = (dev, idx);
            }
        }
        worst = worst.max(best.0);
        seen.insert(best.1);
    }
    if seen.len() != dim {
        worst = worst.max(1.0);
    }
    Ok(worst)
}

/// Applies `U_α`, the transform for labels `(κ, −κ)` and a standard-basis
/// measurement to `v1 ⊗ v2`. Returns the flat outcome index.
pub fn measure_pair<R: Rng + ?Sized>(
    field: Fp,
    n: usize,
    v1: &[Complex64],
    v2: &[Complex64],
    alpha: u32,
    kappa: u32,
    rng: &mut R,
) -> Result<usize> {
    let psi: Vec<Complex64> = v1.iter().flat_map(|a| v2.iter().map(move |b| a * b)).collect();
    let psi = nalgebra::DVector::from_vec(psi);
    let u = cg_dense(field, n, kappa, field.neg(kappa))? * u_alpha_dense(field, n, 2, alpha)?;
    let out = u * psi;
    let weights: Vec<f64> = out.iter().map(|a| a.norm_sqr()).collect();
    Ok(sample_weights(&weights, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{random_subgroup, GroupAutomorphism, SubgroupClass};
    use crate::reps::{max_deviation, projector, rho};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gp(p: u32, n: usize) -> GroupParams {
        GroupParams::new(p, n).unwrap()
    }

    #[test]
    fn collapsed_state_is_conjugate_projector() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pr = gp(3, 1);
        for _ in 0..6 {
            let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, None, &mut rng);
            let r = (pr.pn() / h.order()) as f64;
            for k in 1..3 {
                let got = collapsed_density(&h, k).unwrap();
                let proj = projector(&IrrepLabel::HighDim { k }, &h).unwrap();
                let expect = proj.map(|c| c.conj()) / Complex64::new(r, 0.0);
                assert!(max_deviation(&got, &expect) < 1e-9);
            }
        }
    }

    #[test]
    fn trajectories_average_to_collapsed_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pr = gp(3, 1);
        let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, Some(1), &mut rng);
        let mut acc = ComplexMatrix::zeros(3, 3);
        let mut hits = 0usize;
        for _ in 0..6000 {
            let g = pr.random_element(&mut rng);
            if let (IrrepLabel::HighDim { k: 1 }, Some(v)) = weak_fourier_trajectory(&h, &g, &mut rng).unwrap() {
                let col = nalgebra::DVector::from_vec(v);
                acc += &col * col.adjoint();
                hits += 1;
            }
        }
        let avg = acc / Complex64::new(hits as f64, 0.0);
        let expect = collapsed_density(&h, 1).unwrap();
        assert!(max_deviation(&avg, &expect) < 0.05);
    }

    #[test]
    fn cg_sum_nonzero_gives_copies() {
        for p in [3u32, 5] {
            let f = Fp::new(p).unwrap();
            let pr = gp(p, 1);
            for k in 1..p {
                for l in 1..p {
                    if (k + l) % p == 0 {
                        continue;
                    }
                    let u = cg_dense(f, 1, k, l).unwrap();
                    for g in pr.elements() {
                        let t = rho(&pr, k, &g).unwrap().kronecker(&rho(&pr, l, &g).unwrap());
                        let expect = ComplexMatrix::identity(p as usize, p as usize)
                            .kronecker(&rho(&pr, (k + l) % p, &g).unwrap());
                        assert!(max_deviation(&(&u * t * u.adjoint()), &expect) < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn cg_block_structure_all_labels() {
        for (p, n) in [(2u32, 1usize), (3, 1), (5, 1), (2, 2)] {
            let pr = gp(p, n);
            for k in 1..p {
                for l in 1..p {
                    assert!(cg_block_deviation(&pr, k, l).unwrap() < 1e-9, "p={p} n={n} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn label_change_identity() {
        let f = Fp::new(5).unwrap();
        let pr = gp(5, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = random_subgroup(pr, SubgroupClass::AbelianNonCentral, Some(1), &mut rng);
        let u = u_alpha_dense(f, 1, 1, 2).unwrap();
        let lhs = &u * projector(&IrrepLabel::HighDim { k: 1 }, &h).unwrap() * u.adjoint();
        let phi = h.apply_phi_alpha(GroupAutomorphism::new(f, 2).unwrap());
        // k/α² = 1/4 = 4 = −1, the target label −l for l = 1.
        let rhs = projector(&IrrepLabel::HighDim { k: 4 }, &phi).unwrap();
        assert!(max_deviation(&lhs, &rhs) < 1e-9);
    }

    #[test]
    fn caps() {
        assert!(check_caps(&gp(3, 1)).is_ok());
        assert!(matches!(check_caps(&gp(3, 4)), Err(HspError::BackendCapExceeded(_))));
        assert!(matches!(check_caps(&gp(7, 3)), Err(HspError::BackendCapExceeded(_))));
    }
}
