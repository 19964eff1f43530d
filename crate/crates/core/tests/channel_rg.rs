use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use hberry::channel::{injectivity_length, isometry_of, tensor_of, DensityOp, MpsTensor, QuantumChannel, Sfcs};
use hberry::linalg::{frobenius, identity, random_gaussian, random_hermitian, spectral_mismatch};
use hberry::rg::{block, compress, fixed_tensor, rg_flow, FlowOptions};
use hberry::C;

type T = MpsTensor<f64>;

fn c(x: f64) -> C<f64> {
    C::new(x, 0.0)
}

fn transfer(t: &T) -> DMatrix<C<f64>> {
    QuantumChannel::from_tensor(t).transfer_matrix()
}

#[test]
fn trivial_tensor() {
    let t = T::trivial();
    let ch = QuantumChannel::from_tensor(&t);
    assert_eq!(ch.unitality_residual(), 0.0);
    let rho = ch.stationary_state(1e-8).unwrap();
    assert_eq!(rho.matrix()[(0, 0)], c(1.0));
    let v = isometry_of(&t, 1e-10).unwrap();
    assert_eq!(v.matrix(), &identity::<f64>(1));
    assert_eq!(injectivity_length(&t, 4, 1e-10), Some(1));
    assert_eq!(block(&t), t);
}

#[test]
fn identity_channel_on_qubit() {
    let t = T::unitary(identity::<f64>(2)).unwrap();
    let ch = QuantumChannel::from_tensor(&t);
    let spec = ch.transfer_spectrum().unwrap();
    assert!(spectral_mismatch(&spec.eigenvalues, &[c(1.0); 4]) < 1e-12);
    assert!(spec.gap.abs() < 1e-12);
    let x = random_gaussian::<f64, _>(2, 2, &mut ChaCha8Rng::seed_from_u64(1));
    assert_eq!(ch.apply(&x).unwrap(), x);
}

#[test]
fn aklt_isometry_and_pairing() {
    let t = T::aklt();
    let v = isometry_of(&t, 1e-10).unwrap();
    assert!(frobenius(&(v.matrix().adjoint() * v.matrix() - identity::<f64>(2))) <= 1e-12);
    let ch = QuantumChannel::from_tensor(&t);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let x = random_gaussian::<f64, _>(2, 2, &mut rng);
        let k = random_gaussian::<f64, _>(2, 2, &mut rng);
        let lhs = (&k * ch.apply(&x).unwrap()).trace();
        let rhs = (ch.apply_adjoint(&k).unwrap() * &x).trace();
        assert!((lhs - rhs).norm() <= 1e-12);
    }
}

#[test]
fn normalization_of_expectations() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for t in [T::aklt(), T::random_unital(3, 4, &mut rng)] {
        let s = Sfcs::from_tensor(&t, 1e-8).unwrap();
        let id = identity::<f64>(t.phys_dim());
        assert!((s.expectation(&vec![id.clone(); 4]).unwrap() - c(1.0)).norm() < 1e-12);
        for r in 1..5 {
            assert!((s.two_point(&id, &id, r).unwrap() - c(1.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn aklt_correlation_ratio() {
    let s = Sfcs::from_tensor(&T::aklt(), 1e-8).unwrap();
    let sz = hberry::channel::spin_one_sz::<f64>();
    for r in 2..=10 {
        let a = s.connected_two_point(&sz, &sz, r).unwrap();
        let b = s.connected_two_point(&sz, &sz, r + 1).unwrap();
        assert!((b.re / a.re + 1.0 / 3.0).abs() <= 1e-8, "r = {r}");
    }
}

#[test]
fn fixed_point_tensor_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for d in 1..=4 {
        let rho = DensityOp::<f64>::random_faithful(d, &mut rng);
        let t = fixed_tensor(&rho, 1e-12).unwrap();
        let ch = QuantumChannel::from_tensor(&t);
        let spec = ch.transfer_spectrum().unwrap();
        let mut want = vec![c(0.0); d * d];
        want[0] = c(1.0);
        assert!(spectral_mismatch(&spec.eigenvalues, &want) < 1e-10);
        assert_eq!(injectivity_length(&t, 4, 1e-10), Some(1));
        let split = ch.check_split_purity(1, 1e-8).unwrap();
        assert!(split.distance.unwrap() < 1e-12);
        // blocking does not change the channel
        assert!(frobenius(&(transfer(&block(&t)) - transfer(&t))) < 1e-10);
        // nearest neighbours share a bond pair; beyond that nothing survives
        let s = Sfcs::from_tensor(&t, 1e-8).unwrap();
        for r in 2..6 {
            let a = random_hermitian::<f64, _>(d * d, &mut rng);
            let b = random_hermitian::<f64, _>(d * d, &mut rng);
            let v = s.connected_two_point(&a, &b, r).unwrap().norm();
            assert!(v < 1e-12 * frobenius(&a) * frobenius(&b), "{v:e}");
        }
        let fp = rg_flow(&t, &FlowOptions::default()).unwrap();
        assert_eq!(fp.iterations, 1);
        assert!(frobenius(&(fp.rho.matrix() - rho.matrix())) <= 1e-10);
    }
}

#[test]
fn maximally_mixed_fixed_tensor_is_scaled_matrix_units() {
    let t = fixed_tensor(&DensityOp::<f64>::maximally_mixed(2), 1e-12).unwrap();
    assert_eq!(t.phys_dim(), 4);
    let s = 0.5f64.sqrt();
    for i in 0..2 {
        for j in 0..2 {
            let k = &t.kraus()[i * 2 + j];
            let want = DMatrix::from_fn(2, 2, |a, b| if a == i && b == j { c(s) } else { c(0.0) });
            assert!(frobenius(&(k - want)) < 1e-12);
        }
    }
}

#[test]
fn split_distance_follows_second_eigenvalue() {
    let ch = QuantumChannel::from_tensor(&T::aklt());
    let mut last = f64::INFINITY;
    let mut consts = Vec::new();
    for n in 1..=10 {
        let d = ch.check_split_purity(n, 1e-8).unwrap().distance.unwrap();
        assert!(d <= last + 1e-15);
        last = d;
        consts.push(d / (1.0f64 / 3.0).powi(n as i32));
    }
    let (lo, hi) = consts.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &x| (l.min(x), h.max(x)));
    assert!(hi <= 10.0 && hi / lo < 1.0 + 1e-6, "{consts:?}");
}

#[test]
fn rg_flow_preserves_stationary_spectrum() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let t = T::random_unital(2, 3, &mut rng);
        let rho0 = QuantumChannel::from_tensor(&t).stationary_state(1e-8).unwrap();
        let fp = rg_flow(&t, &FlowOptions::default()).unwrap();
        assert!(fp.phys_dim <= 9);
        for (a, b) in rho0.spectrum().iter().zip(fp.rho.spectrum()) {
            assert!((a - b).abs() <= 1e-8);
        }
    }
}

#[test]
fn flow_residual_decays_doubly_exponentially() {
    // residual after k steps against |λ₂|^(2^k)
    let t = T::aklt();
    let mut cur = t.clone();
    for k in 1..=4 {
        cur = compress(&block(&cur), 1e-12).unwrap();
        assert!(cur.phys_dim() <= 4);
        let ch = QuantumChannel::from_tensor(&cur);
        let rho = ch.stationary_state(1e-8).unwrap();
        let res = ch.distance_from_rank_one(&rho);
        let bound = (1.0f64 / 3.0).powi(1 << k);
        assert!(res <= 2.0 * bound + 1e-14, "k = {k}: {res:e} vs {bound:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn channel_invariants(seed in any::<u64>(), p in 1usize..4, d in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = T::random_unital(p, d, &mut rng);
        let ch = QuantumChannel::from_tensor(&t);
        prop_assert!(ch.unitality_residual() <= 1e-10);
        let x = random_gaussian::<f64, _>(d, d, &mut rng);
        let k = random_gaussian::<f64, _>(d, d, &mut rng);
        let lhs = (&k * ch.apply(&x).unwrap()).trace();
        let rhs = (ch.apply_adjoint(&k).unwrap() * &x).trace();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * frobenius(&k) * frobenius(&x));
        let v = isometry_of(&t, 1e-10).unwrap();
        prop_assert!(frobenius(&(v.apply(&x) - ch.apply(&x).unwrap())) <= 1e-12 * (1.0 + frobenius(&x)));
        prop_assert_eq!(tensor_of(&v), t.clone());
        if let Ok(rho) = ch.stationary_state(1e-8) {
            prop_assert!(frobenius(&(ch.apply_adjoint(rho.matrix()).unwrap() - rho.matrix())) <= 1e-10);
        }
    }

    #[test]
    fn compression_preserves_channel(seed in any::<u64>(), p in 1usize..4, d in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = T::random_unital(p, d, &mut rng);
        let b = block(&t);
        let e = transfer(&t);
        prop_assert!(frobenius(&(&e * &e - transfer(&b))) <= 1e-12);
        let cpr = compress(&b, 1e-12).unwrap();
        prop_assert!(cpr.phys_dim() <= (p * p).min(d * d));
        prop_assert!(frobenius(&(transfer(&cpr) - transfer(&b))) <= 1e-10);
    }
}
