//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hberry::berry::{
    analyze, berry_class, berry_number, berry_number_with_cycle, family_phases, synthetic_family,
    BerryOptions, PhaseData, TensorFamily,
};
use hberry::channel::{injectivity_length, DensityOp, MpsTensor, QuantumChannel, Sfcs};
use hberry::cohomology::{
    bockstein_z2, bockstein_z2_with_lift, cohomology_group, nontrivial_bockstein_source, product_complex, snf,
    Cochain, IntMatrix, Ring, SimplicialComplex,
};
use hberry::linalg::{frobenius, identity, random_gaussian, random_hermitian, random_unitary, spectral_mismatch};
use hberry::rg::{fixed_tensor, rg_flow, FlowOptions};
use hberry::tduality::{tdualize, verify_duality, TDualPair};
use hberry::C;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c(x: f64) -> C<f64> {
    C::new(x, 0.0)
}

fn aklt_fixed_point() -> Check {
    let fp = rg_flow(&MpsTensor::<f64>::aklt(), &FlowOptions::default()).map_err(|e| e.to_string())?;
    let err = frobenius(&(fp.rho.matrix() - identity::<f64>(2) * c(0.5)));
    ensure(err <= 1e-8, || format!("‖ρ − 1/2‖ = {err:e}"))?;
    ensure(fp.phys_dim == 4, || format!("physical dimension {}", fp.phys_dim))?;
    ensure(fp.iterations <= 8, || format!("{} iterations", fp.iterations))
}

fn aklt_diagnostics() -> Check {
    let t = MpsTensor::<f64>::aklt();
    let ch = QuantumChannel::from_tensor(&t);
    let spec = ch.transfer_spectrum().map_err(|e| e.to_string())?;
    let expected = [c(1.0), c(-1.0 / 3.0), c(-1.0 / 3.0), c(-1.0 / 3.0)];
    let mismatch = spectral_mismatch(&spec.eigenvalues, &expected);
    ensure(mismatch <= 1e-10, || format!("spectrum {:?} off by {mismatch:e}", spec.eigenvalues))?;
    let len = injectivity_length(&t, 8, 1e-10);
    ensure(len == Some(2), || format!("injectivity length {len:?}"))?;
    let r = ch.check_split_purity(8, 1e-8).map_err(|e| e.to_string())?;
    let bound = 10.0 * (1.0f64 / 3.0).powi(8);
    match r.distance {
        Some(d) => ensure(d <= bound, || format!("‖Φ⁸ − P‖ = {d:e} > {bound:e}")),
        None => Err("channel reported as not primitive".into()),
    }
}

fn fixed_tensor_identities() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 0..20 {
        let d = 1 + n % 8;
        let rho = DensityOp::<f64>::random_faithful(d, &mut rng);
        let t = fixed_tensor(&rho, 1e-12).map_err(|e| e.to_string())?;
        let ch = QuantumChannel::from_tensor(&t);
        for _ in 0..3 {
            let x = random_gaussian::<f64, _>(d, d, &mut rng);
            let want = identity::<f64>(d) * (rho.matrix() * &x).trace();
            let err = frobenius(&(ch.apply(&x).unwrap() - want));
            ensure(err <= 1e-10, || format!("D={d}: F(x) off by {err:e}"))?;
            let k = random_gaussian::<f64, _>(d, d, &mut rng);
            let want = rho.matrix() * k.trace();
            let err = frobenius(&(ch.apply_adjoint(&k).unwrap() - want));
            ensure(err <= 1e-10, || format!("D={d}: F†(κ) off by {err:e}"))?;
        }
        let fp = rg_flow(&t, &FlowOptions::default()).map_err(|e| format!("D={d}: {e}"))?;
        ensure(fp.iterations == 1, || format!("D={d}: {} iterations", fp.iterations))?;
    }
    Ok(())
}

fn berry_quantization() -> Check {
    let k = SimplicialComplex::sphere(3);
    let opts = BerryOptions::<f64>::default();
    let cycle = k.fundamental_cycle().map_err(|e| e.to_string())?;
    for target in -2..=2 {
        let p = synthetic_family::<f64>(&k, target, 1e-9).map_err(|e| e.to_string())?;
        let (n, res) = berry_number(&p, &opts).map_err(|e| e.to_string())?;
        ensure(n == target && res <= 1e-6, || format!("target {target}: got {n}, residual {res:e}"))?;
        for seed in 0..100 {
            let (m, _) = berry_number(&p.perturbed(seed), &opts).map_err(|e| e.to_string())?;
            ensure(m == target, || format!("target {target}, perturbation seed {seed}: got {m}"))?;
        }
        let (r, _) = berry_number_with_cycle(&p, &cycle.reversed(), &opts).map_err(|e| e.to_string())?;
        ensure(r == -target, || format!("reversed orientation of {target}: got {r}"))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let fams = [
        TensorFamily::constant(k.clone(), MpsTensor::aklt(), 1e-10),
        TensorFamily::constant(k.clone(), MpsTensor::random_unital(3, 3, &mut rng), 1e-10),
    ];
    for fam in fams {
        let fam = fam.map_err(|e| e.to_string())?;
        let q: Vec<_> = (0..k.n_vertices()).map(|_| random_unitary::<f64, _>(fam.tensors()[0].bond_dim(), &mut rng)).collect();
        for f in [fam.clone(), fam.conjugated_per_vertex(&q)] {
            let p = family_phases(&f, &opts).map_err(|e| e.to_string())?;
            let (n, _) = berry_number(&p, &opts).map_err(|e| e.to_string())?;
            ensure(n == 0, || format!("constant family gave {n}"))?;
        }
    }
    Ok(())
}

fn torsion_detection() -> Check {
    let k = product_complex(&SimplicialComplex::rp2(), &SimplicialComplex::circle()).map_err(|e| e.to_string())?;
    let opts = BerryOptions::<f64>::default();
    let z = nontrivial_bockstein_source(&k, 2).map_err(|e| e.to_string())?.ok_or("no Bockstein source")?;
    let fixture = PhaseData::from_z2(k.clone(), &z).map_err(|e| e.to_string())?;
    let out = analyze(&fixture, &opts).map_err(|e| e.to_string())?;
    ensure(out.group.free_rank == 0 && out.group.torsion == vec![BigInt::from(2)], || {
        format!("H³ = {}", out.group.describe())
    })?;
    ensure(out.class.torsion == vec![BigInt::one()], || format!("class {:?}", out.class))?;
    ensure(out.number.is_none(), || "number reported on a non-orientable complex".into())?;
    let (doubled, _) = berry_class(&fixture.powered(2), &opts).map_err(|e| e.to_string())?;
    ensure(doubled.is_zero(), || format!("doubled class {doubled:?}"))?;
    let reference = bockstein_z2(&k, &z).map_err(|e| e.to_string())?;
    ensure(reference.class == out.class, || "pipeline and Bockstein disagree".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..10 {
        let values: Vec<BigInt> = z.values.iter().map(|v| v + 2 * rng.random_range(-3i64..=3)).collect();
        let lift = Cochain::new(&k, 2, Ring::Integers, values).map_err(|e| e.to_string())?;
        let b = bockstein_z2_with_lift(&k, &z, &lift).map_err(|e| e.to_string())?;
        ensure(b.class == out.class, || format!("lift {i}: class {:?}", b.class))?;
    }
    Ok(())
}

fn cohomology_engine() -> Check {
    let describe = |k: &SimplicialComplex, d: usize| cohomology_group(k, d, Ring::Integers).map(|g| g.describe());
    let s3 = SimplicialComplex::sphere(3);
    let got: Vec<String> = (0..4).map(|d| describe(&s3, d)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    ensure(got == ["Z", "0", "0", "Z"], || format!("H*(S³) = {got:?}"))?;
    let rp2 = describe(&SimplicialComplex::rp2(), 2).map_err(|e| e.to_string())?;
    ensure(rp2 == "Z/2", || format!("H²(RP²) = {rp2}"))?;
    let prod = product_complex(&SimplicialComplex::rp2(), &SimplicialComplex::circle()).map_err(|e| e.to_string())?;
    let h3 = describe(&prod, 3).map_err(|e| e.to_string())?;
    ensure(h3 == "Z/2", || format!("H³(RP²×S¹) = {h3}"))?;
    let t1 = describe(&SimplicialComplex::torus(), 1).map_err(|e| e.to_string())?;
    ensure(t1 == "Z^2", || format!("H¹(T²) = {t1}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..100 {
        let (m, n) = (rng.random_range(1..7), rng.random_range(1..7));
        let vals: Vec<i64> = (0..m * n).map(|_| rng.random_range(-9..=9)).collect();
        let a = IntMatrix::from_i64(m, n, &vals);
        let s = snf(&a);
        ensure(s.u.mul(&a).mul(&s.v) == s.s, || format!("matrix {i}: U·A·V ≠ S"))?;
        let unimodular = |x: &IntMatrix| x.determinant().magnitude().is_one();
        ensure(unimodular(&s.u) && unimodular(&s.v), || format!("matrix {i}: transform not unimodular"))?;
        for r in 0..m {
            for col in 0..n {
                if r != col {
                    ensure(s.s.get(r, col).is_zero(), || format!("matrix {i}: S not diagonal"))?;
                }
            }
        }
        let d = s.diagonal();
        ensure(d.windows(2).all(|w| (&w[1] % &w[0]).is_zero()), || format!("matrix {i}: {d:?} not a divisor chain"))?;
    }
    Ok(())
}

fn tduality_table() -> Check {
    let table = [((1, 1), (1, 1)), ((1, 0), (0, 1)), ((0, 0), (0, 0))];
    let mut pairs: Vec<((i64, i64), (i64, i64))> = table.to_vec();
    for n in 0..=5 {
        for m in 0..=5 {
            pairs.push(((n, m), (m, n)));
        }
    }
    let names = [("S³", 1), ("S²×S¹", 0)];
    for ((c1, h), want) in pairs {
        let p = TDualPair::sphere(c1, h);
        let d = tdualize(&p).map_err(|e| e.to_string())?;
        ensure(d.pair == TDualPair::sphere(want.0, want.1), || format!("({c1},{h}) ↦ {:?}", d.pair))?;
        ensure(!d.ambiguous_lift, || format!("({c1},{h}) flagged ambiguous"))?;
        let back = tdualize(&d.pair).map_err(|e| e.to_string())?;
        ensure(back.pair == p, || format!("({c1},{h}) is not an involution"))?;
        ensure(verify_duality(&p, &d.pair).holds(), || format!("({c1},{h}) does not verify"))?;
    }
    for (label, c1) in names {
        let got = TDualPair::sphere(c1, 0).total_space();
        ensure(got == label, || format!("c1={c1} named {got}"))?;
    }
    for n in 2..=5 {
        let got = TDualPair::sphere(n, 0).total_space();
        ensure(got == format!("L({n};1)"), || format!("c1={n} named {got}"))?;
    }
    Ok(())
}

fn gauge_covariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let mut fixtures = vec![MpsTensor::<f64>::aklt(), MpsTensor::trivial()];
    for d in 1..=3 {
        let rho = DensityOp::random_faithful(d, &mut rng);
        fixtures.push(fixed_tensor(&rho, 1e-12).map_err(|e| e.to_string())?);
        fixtures.push(MpsTensor::random_unital(2, d + 1, &mut rng));
    }
    for (i, t) in fixtures.iter().enumerate() {
        let d = t.bond_dim();
        let u = random_unitary::<f64, _>(d, &mut rng);
        let tu = t.conjugated(&u);
        let s0 = QuantumChannel::from_tensor(t).transfer_spectrum().map_err(|e| e.to_string())?;
        let s1 = QuantumChannel::from_tensor(&tu).transfer_spectrum().map_err(|e| e.to_string())?;
        let mm = spectral_mismatch(&s0.eigenvalues, &s1.eigenvalues);
        ensure(mm <= 1e-10, || format!("fixture {i}: spectrum moved by {mm:e}"))?;
        let (l0, l1) = (injectivity_length(t, 12, 1e-10), injectivity_length(&tu, 12, 1e-10));
        ensure(l0 == l1, || format!("fixture {i}: injectivity length {l0:?} vs {l1:?}"))?;
        let w0 = Sfcs::from_tensor(t, 1e-8).map_err(|e| e.to_string())?;
        let w1 = Sfcs::from_tensor(&tu, 1e-8).map_err(|e| e.to_string())?;
        for len in 1..=3 {
            let ops: Vec<DMatrix<C<f64>>> =
                (0..len).map(|_| random_hermitian::<f64, _>(t.phys_dim(), &mut rng)).collect();
            let (a, b) = (w0.expectation(&ops).unwrap(), w1.expectation(&ops).unwrap());
            ensure((a - b).norm() <= 1e-10, || format!("fixture {i}: expectation {a} vs {b}"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("1 AKLT fixed point", aklt_fixed_point),
        ("2 AKLT diagnostics", aklt_diagnostics),
        ("3 fixed-tensor identities", fixed_tensor_identities),
        ("4 higher Berry quantization and invariance", berry_quantization),
        ("5 torsion detection", torsion_detection),
        ("6 cohomology engine", cohomology_engine),
        ("7 T-duality table", tduality_table),
        ("8 gauge covariance", gauge_covariance),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("PASS  criterion {name} ({secs:.2}s)"),
            Err(msg) => {
                failed += 1;
                println!("FAIL  criterion {name} ({secs:.2}s): {msg}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
