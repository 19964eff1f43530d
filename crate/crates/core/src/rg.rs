//! Renormalization flow `Φ ↦ Φ∘Φ` on tensors, with compression of the blocked
//! physical space, and the zero-correlation-length fixed points
//! `F(x) = Tr[ρ x] 1`.

use nalgebra::DMatrix;

use crate::channel::{DensityOp, MpsTensor, QuantumChannel};
use crate::error::{Error, Result};
use crate::linalg::{left_singular, psd_sqrt, unvectorize, vectorize};
use crate::scalar::{real, to_f64, Real};

/// Result of a converged flow.
#[derive(Clone, Debug)]
pub struct FixedPointData<R: Real> {
    pub rho: DensityOp<R>,
    /// Physical dimension of the final compressed tensor (at most `D²`).
    pub phys_dim: usize,
    pub iterations: usize,
    /// Spectral-norm distance of the final transfer matrix from `x ↦ Tr[ρx] 1`.
    pub residual: R,
    pub tensor: MpsTensor<R>,
}

/// Two-site blocking: Kraus family `{T_i T_j}` with pair index `i·d + j`.
pub fn block<R: Real>(t: &MpsTensor<R>) -> MpsTensor<R> {
    let k = t.kraus();
    let kraus = k.iter().flat_map(|a| k.iter().map(move |b| a * b)).collect();
    MpsTensor::new(kraus).expect("products of square matrices of equal size")
}

/// Replaces the Kraus family by an orthogonal family spanning the same space
/// of matrices, discarding directions with singular value `≤ tol`.
///
/// Writing `K` for the `D²×d` matrix with columns `vec(T_i)`, `K = W Σ Y^†`,
/// the new Kraus matrices are the columns of `W Σ = K Y`, a unitary
/// recombination on the physical index. The channel depends only on `K K^†`,
/// so it is unchanged up to the discarded weight.
pub fn compress<R: Real>(t: &MpsTensor<R>, tol: R) -> Result<MpsTensor<R>> {
    let d = t.bond_dim();
    let cols: Vec<_> = t.kraus().iter().map(vectorize).collect();
    let k = DMatrix::from_columns(&cols);
    let (w, sv) = left_singular(&k);
    let kept: Vec<_> = sv
        .iter()
        .enumerate()
        .take_while(|(_, &s)| s > tol)
        .map(|(c, &s)| unvectorize(&(w.column(c) * real(s)), d))
        .collect();
    if kept.is_empty() {
        return Err(Error::RankZero);
    }
    MpsTensor::new(kept)
}

/// Kraus family `{e_ij ρ^{1/2}}`, index `i·D + j`; its channel is exactly
/// `F(x) = Tr[ρ x] 1` and `F^†(κ) = Tr[κ] ρ`.
pub fn fixed_tensor<R: Real>(rho: &DensityOp<R>, tol: R) -> Result<MpsTensor<R>> {
    if !rho.is_faithful(tol) {
        return Err(Error::NotFaithful(to_f64(rho.min_eigenvalue())));
    }
    let d = rho.dim();
    let sqrt = psd_sqrt(rho.matrix());
    let mut kraus = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut m = DMatrix::zeros(d, d);
            m.row_mut(i).copy_from(&sqrt.row(j));
            kraus.push(m);
        }
    }
    MpsTensor::new(kraus)
}

/// Parameters of [`rg_flow`].
#[derive(Clone, Copy, Debug)]
pub struct FlowOptions<R: Real> {
    /// Stop once the distance from the rank-one limit is at most this.
    pub tol: R,
    pub tol_spec: R,
    pub tol_compress: R,
    pub max_iter: usize,
}

impl Default for FlowOptions<f64> {
    fn default() -> Self {
        Self { tol: 1e-8, tol_spec: crate::TOL_SPEC, tol_compress: crate::TOL_COMPRESS, max_iter: 16 }
    }
}

/// Iterates `compress ∘ block` until the channel is within `tol` of
/// `x ↦ Tr[ρ x] 1`.
pub fn rg_flow<R: Real>(t: &MpsTensor<R>, opts: &FlowOptions<R>) -> Result<FixedPointData<R>> {
    QuantumChannel::from_tensor(t).stationary_state(opts.tol_spec)?;
    let mut current = t.clone();
    let mut residual = R::max_value().unwrap_or(R::one());
    for iteration in 1..=opts.max_iter {
        current = compress(&block(&current), opts.tol_compress)?;
        let channel = QuantumChannel::from_tensor(&current);
        let rho = channel.stationary_state(opts.tol_spec)?;
        residual = channel.distance_from_rank_one(&rho);
        if residual <= opts.tol {
            return Ok(FixedPointData {
                rho,
                phys_dim: current.phys_dim(),
                iterations: iteration,
                residual,
                tensor: current,
            });
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: to_f64(residual) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius, identity, random_gaussian};
    use crate::scalar::CMat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn channel_distance(a: &MpsTensor<f64>, b: &MpsTensor<f64>) -> f64 {
        let ea = QuantumChannel::from_tensor(a).transfer_matrix();
        let eb = QuantumChannel::from_tensor(b).transfer_matrix();
        frobenius(&(ea - eb))
    }

    #[test]
    fn block_of_trivial_is_trivial() {
        let b = block(&MpsTensor::<f64>::trivial());
        assert_eq!(b.phys_dim(), 1);
        assert_eq!(b, MpsTensor::trivial());
    }

    #[test]
    fn block_composes_channel() {
        let t = MpsTensor::<f64>::aklt();
        let b = block(&t);
        assert_eq!(b.phys_dim(), 9);
        let e = QuantumChannel::from_tensor(&t).transfer_matrix();
        let e2 = QuantumChannel::from_tensor(&b).transfer_matrix();
        assert!(frobenius(&(&e * &e - e2)) < 1e-12);
    }

    #[test]
    fn compressed_blocked_aklt_has_four_kraus() {
        let b = block(&MpsTensor::<f64>::aklt());
        let c = compress(&b, 1e-12).unwrap();
        assert_eq!(c.phys_dim(), 4);
        assert!(channel_distance(&b, &c) < 1e-12);
    }

    #[test]
    fn compress_removes_duplicates() {
        let t = MpsTensor::<f64>::aklt();
        let half = nalgebra::Complex::new(0.5f64.sqrt(), 0.0);
        let mut kraus: Vec<CMat<f64>> = t.kraus().to_vec();
        let last = kraus.pop().unwrap();
        kraus.push(&last * half);
        kraus.push(&last * half);
        let dup = MpsTensor::new(kraus).unwrap();
        assert_eq!(dup.phys_dim(), 4);
        let c = compress(&dup, 1e-12).unwrap();
        assert_eq!(c.phys_dim(), 3);
        assert!(channel_distance(&dup, &c) < 1e-12);
    }

    #[test]
    fn compress_orthonormal_family_keeps_channel() {
        let t = MpsTensor::<f64>::aklt();
        let c = compress(&t, 1e-12).unwrap();
        assert_eq!(c.phys_dim(), 3);
        assert!(channel_distance(&t, &c) < 1e-12);
    }

    #[test]
    fn compress_zero_tensor_fails() {
        let z = MpsTensor::<f64>::new(vec![CMat::<f64>::zeros(2, 2)]).unwrap();
        assert!(matches!(compress(&z, 1e-12), Err(Error::RankZero)));
    }

    #[test]
    fn fixed_tensor_trivial_and_maximally_mixed() {
        let t = fixed_tensor(&DensityOp::<f64>::maximally_mixed(1), 1e-12).unwrap();
        assert_eq!(t, MpsTensor::trivial());
        let t = fixed_tensor(&DensityOp::<f64>::maximally_mixed(2), 1e-12).unwrap();
        assert_eq!(t.phys_dim(), 4);
        let ch = QuantumChannel::from_tensor(&t);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let x = random_gaussian::<f64, _>(2, 2, &mut rng);
            let want = identity::<f64>(2) * (x.trace() * 0.5);
            assert!(frobenius(&(ch.apply(&x).unwrap() - want)) < 1e-12);
        }
    }

    #[test]
    fn fixed_tensor_rejects_non_faithful() {
        let mut m = CMat::<f64>::zeros(2, 2);
        m[(0, 0)] = nalgebra::Complex::new(1.0, 0.0);
        let rho = DensityOp::new(m, 1e-12).unwrap();
        assert!(matches!(fixed_tensor(&rho, 1e-12), Err(Error::NotFaithful(_))));
    }

    #[test]
    fn rg_flow_rejects_ad_u() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = crate::linalg::random_unitary::<f64, _>(2, &mut rng);
        let t = MpsTensor::unitary(u).unwrap();
        assert!(matches!(rg_flow(&t, &FlowOptions::default()), Err(Error::NotPrimitive(_))));
    }

    #[test]
    fn rg_flow_reports_no_convergence() {
        let opts = FlowOptions { max_iter: 2, ..FlowOptions::default() };
        assert!(matches!(
            rg_flow(&MpsTensor::<f64>::aklt(), &opts),
            Err(Error::NoConvergence { iterations: 2, .. })
        ));
    }

    #[test]
    fn rg_flow_in_single_precision() {
        let opts = FlowOptions::<f32> { tol: 1e-4, tol_spec: 1e-4, tol_compress: 1e-5, max_iter: 8 };
        let out = rg_flow(&MpsTensor::<f32>::aklt(), &opts).unwrap();
        assert_eq!(out.phys_dim, 4);
        let half = out.rho.matrix() - identity::<f32>(2) * nalgebra::Complex::new(0.5f32, 0.0);
        assert!(frobenius(&half) < 1e-4);
    }
}
