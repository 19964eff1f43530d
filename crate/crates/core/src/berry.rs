//! Discrete higher Berry class of a family of tensors over a triangulated
//! three-dimensional parameter space.
//!
//! Vertices of the complex are patches, edges are double overlaps and
//! triangles triple overlaps. The pipeline is
//!
//! 1. edge gauges `U_uv` relating neighbouring tensors (leading eigen-matrix of
//!    the mixed transfer map, made unitary by polar decomposition),
//! 2. triangle phases `λ_uvw`, the scalar part of `U_uv U_vw U_wu`,
//! 3. tetrahedral fluxes `G_T = (δ Arg λ)_T` reduced into `(−π, π]`,
//! 4. the integer 3-cocycle `c = (δ Arg λ − G) / 2π`, whose class in
//!    `H³(K; Z)` is the higher Berry class and whose pairing with the
//!    fundamental cycle is the higher Berry number.
//!
//! Orientation and face-sign conventions are those of
//! [`crate::cohomology::complex`].

use std::f64::consts::PI;

use nalgebra::{ComplexField, DMatrix};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{injectivity_length, MpsTensor};
use crate::cohomology::{
    cohomology, evaluate, faces, solve_real_coboundary, AbelianGroup, ClassCoords, Cochain,
    FundamentalCycle, RealCochain, Ring, SimplicialComplex,
};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, frobenius, identity, null_vector, polar_unitary, unvectorize};
use crate::scalar::{cis, lit, real, to_f64, CMat, Real, C};

/// Thresholds of the pipeline.
#[derive(Clone, Copy, Debug)]
pub struct BerryOptions<R: Real> {
    /// Largest accepted `‖P − λ1‖/√D` for a triangle holonomy `P`.
    pub dev_max: R,
    /// Smallest accepted overlap `|μ|` between adjacent tensors.
    pub eta_min: R,
    pub tol_spec: R,
    pub tol_alg: R,
    /// Fluxes closer than this to `±π` are rejected.
    pub branch_margin: R,
    /// Largest accepted distance of the flux sum from `2πZ`.
    pub quantization_tol: R,
}

impl Default for BerryOptions<f64> {
    fn default() -> Self {
        Self {
            dev_max: crate::DEV_MAX,
            eta_min: crate::ETA_MIN,
            tol_spec: crate::TOL_SPEC,
            tol_alg: crate::TOL_ALG,
            branch_margin: 1e-6 * PI,
            quantization_tol: 1e-4,
        }
    }
}

impl Default for BerryOptions<f32> {
    fn default() -> Self {
        Self {
            dev_max: 0.3,
            eta_min: 0.5,
            tol_spec: 1e-4,
            tol_alg: 1e-4,
            branch_margin: 1e-4,
            quantization_tol: 1e-3,
        }
    }
}

/// Tensor per vertex of a complex.
#[derive(Clone, Debug)]
pub struct TensorFamily<R: Real> {
    complex: SimplicialComplex,
    tensors: Vec<MpsTensor<R>>,
}

impl<R: Real> TensorFamily<R> {
    /// Checks that every vertex has a tensor, dimensions agree and every
    /// tensor is injective.
    pub fn new(complex: SimplicialComplex, tensors: Vec<MpsTensor<R>>, tol: R) -> Result<Self> {
        if tensors.len() != complex.n_vertices() {
            return Err(Error::DimensionMismatch(format!(
                "{} tensors for {} vertices",
                tensors.len(),
                complex.n_vertices()
            )));
        }
        let (d, p) = (tensors[0].bond_dim(), tensors[0].phys_dim());
        for (v, t) in tensors.iter().enumerate() {
            if t.bond_dim() != d || t.phys_dim() != p {
                return Err(Error::DimensionMismatch(format!("tensor at vertex {v} has different dimensions")));
            }
            if injectivity_length(t, 2 * d * d, tol).is_none() {
                return Err(Error::InvalidInput(format!("tensor at vertex {v} is not injective")));
            }
        }
        Ok(Self { complex, tensors })
    }

    /// The same tensor at every vertex.
    pub fn constant(complex: SimplicialComplex, t: MpsTensor<R>, tol: R) -> Result<Self> {
        let tensors = vec![t; complex.n_vertices()];
        Self::new(complex, tensors, tol)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn tensors(&self) -> &[MpsTensor<R>] {
        &self.tensors
    }

    /// Replaces the tensor at `v` by its conjugate under `q[v]`.
    pub fn conjugated_per_vertex(&self, q: &[CMat<R>]) -> Self {
        let tensors = self.tensors.iter().zip(q).map(|(t, u)| t.conjugated(u)).collect();
        Self { complex: self.complex.clone(), tensors }
    }
}

/// Unitary per edge `u < v` (the complex's edge order), `U_vu = U_uv^†`.
#[derive(Clone, Debug)]
pub struct GaugeData<R: Real> {
    complex: SimplicialComplex,
    unitaries: Vec<CMat<R>>,
    /// Overlap modulus per edge; 1 for directly supplied gauges.
    overlaps: Vec<R>,
}

impl<R: Real> GaugeData<R> {
    pub fn new(complex: SimplicialComplex, unitaries: Vec<CMat<R>>, tol: R) -> Result<Self> {
        if unitaries.len() != complex.count(1) {
            return Err(Error::DimensionMismatch(format!(
                "{} gauges for {} edges",
                unitaries.len(),
                complex.count(1)
            )));
        }
        let d = unitaries.first().map(|u| u.nrows()).unwrap_or(1);
        for (e, u) in unitaries.iter().enumerate() {
            if u.nrows() != d || u.ncols() != d {
                return Err(Error::DimensionMismatch(format!("gauge on edge {e} has wrong shape")));
            }
            let res = frobenius(&(u.adjoint() * u - identity::<R>(d)));
            if res > tol {
                return Err(Error::InvalidInput(format!(
                    "gauge on edge {e} is not unitary (residual {:e})",
                    to_f64(res)
                )));
            }
        }
        let overlaps = vec![R::one(); unitaries.len()];
        Ok(Self { complex, unitaries, overlaps })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn overlaps(&self) -> &[R] {
        &self.overlaps
    }

    pub fn unitaries(&self) -> &[CMat<R>] {
        &self.unitaries
    }

    /// `U_uv` for either orientation of an edge.
    pub fn gauge(&self, u: usize, v: usize) -> Result<CMat<R>> {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let e = self
            .complex
            .index_of(&[a, b])
            .ok_or_else(|| Error::InvalidInput(format!("no edge ({u}, {v})")))?;
        Ok(if u < v { self.unitaries[e].clone() } else { self.unitaries[e].adjoint() })
    }

    /// Multiplies every edge gauge by a seeded random phase.
    pub fn perturbed(&self, seed: u64) -> Self {
        let theta = random_edge_phases::<R>(self.complex.count(1), seed);
        let unitaries = self.unitaries.iter().zip(&theta).map(|(u, &t)| u * cis(t)).collect();
        Self { complex: self.complex.clone(), unitaries, overlaps: self.overlaps.clone() }
    }
}

/// Unit complex number per triangle with its deviation from scalarity.
#[derive(Clone, Debug)]
pub struct PhaseData<R: Real> {
    complex: SimplicialComplex,
    lambda: Vec<C<R>>,
    dev: Vec<R>,
}

impl<R: Real> PhaseData<R> {
    /// Directly supplied exact phases (deviation 0). Each entry is normalized
    /// to unit modulus; zero entries are rejected.
    pub fn new(complex: SimplicialComplex, lambda: Vec<C<R>>) -> Result<Self> {
        if lambda.len() != complex.count(2) {
            return Err(Error::DimensionMismatch(format!(
                "{} phases for {} triangles",
                lambda.len(),
                complex.count(2)
            )));
        }
        let mut out = Vec::with_capacity(lambda.len());
        for (t, z) in lambda.into_iter().enumerate() {
            let m = z.modulus();
            if !(m > R::zero()) || !m.is_finite() {
                return Err(Error::InvalidInput(format!("phase on triangle {t} is not a nonzero number")));
            }
            out.push(z / real(m));
        }
        let dev = vec![R::zero(); out.len()];
        Ok(Self { complex, lambda: out, dev })
    }

    /// `λ_t = (−1)^{z_t}` for a mod-2 two-cochain `z`.
    pub fn from_z2(complex: SimplicialComplex, z: &Cochain) -> Result<Self> {
        if z.level != 2 || z.ring != Ring::ModP(2) {
            return Err(Error::InvalidInput("expected a mod-2 cochain on triangles".into()));
        }
        let lambda = z
            .values
            .iter()
            .map(|v| if v.is_zero() { real(R::one()) } else { real(-R::one()) })
            .collect();
        Self::new(complex, lambda)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn lambda(&self) -> &[C<R>] {
        &self.lambda
    }

    pub fn deviations(&self) -> &[R] {
        &self.dev
    }

    pub fn phase(&self, tri: &[usize]) -> Result<C<R>> {
        let i = self
            .complex
            .index_of(tri)
            .ok_or_else(|| Error::InvalidInput(format!("no triangle {tri:?}")))?;
        Ok(self.lambda[i])
    }

    /// Multiplies `λ` by the coboundary of seeded random edge phases.
    pub fn perturbed(&self, seed: u64) -> Self {
        let theta = random_edge_phases::<R>(self.complex.count(1), seed);
        let lambda = self
            .complex
            .simplices(2)
            .iter()
            .zip(&self.lambda)
            .map(|(tri, &l)| {
                let mut shift = R::zero();
                for (i, f) in faces(tri).enumerate() {
                    let e = self.complex.index_of(&f).expect("face of triangle");
                    shift += if i % 2 == 0 { theta[e] } else { -theta[e] };
                }
                l * cis(shift)
            })
            .collect();
        Self { complex: self.complex.clone(), lambda, dev: self.dev.clone() }
    }

    /// `λ^n` on every triangle.
    pub fn powered(&self, n: i32) -> Self {
        let lambda = self.lambda.iter().map(|l| cis(l.argument() * lit(n as f64))).collect();
        Self { complex: self.complex.clone(), lambda, dev: self.dev.clone() }
    }
}

fn random_edge_phases<R: Real>(n: usize, seed: u64) -> Vec<R> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| lit(rng.random_range(-PI..PI))).collect()
}

/// Overlap `η = |μ|` and gauge unitary `U` between two tensors, from the
/// leading eigenpair `(μ, M)` of `x ↦ Σ_i T_i^(u) x T_i^(v)†`. If
/// `t_v = Q t_u Q^†` then `U ∝ Q^†`; in general `U_uv ∝ Q_u Q_v^†` for
/// conjugates of a common tensor. The overall phase is fixed so that
/// `Tr U > 0` when the trace does not vanish.
pub fn edge_gauge<R: Real>(
    tu: &MpsTensor<R>,
    tv: &MpsTensor<R>,
    opts: &BerryOptions<R>,
) -> Result<(R, CMat<R>)> {
    edge_gauge_labeled(tu, tv, opts, (0, 1))
}

fn edge_gauge_labeled<R: Real>(
    tu: &MpsTensor<R>,
    tv: &MpsTensor<R>,
    opts: &BerryOptions<R>,
    edge: (usize, usize),
) -> Result<(R, CMat<R>)> {
    if tu.bond_dim() != tv.bond_dim() || tu.phys_dim() != tv.phys_dim() {
        return Err(Error::DimensionMismatch("tensors of different shape".into()));
    }
    let d = tu.bond_dim();
    let mut e = DMatrix::zeros(d * d, d * d);
    for (a, b) in tu.kraus().iter().zip(tv.kraus()) {
        for i in 0..d {
            for j in 0..d {
                let bc = b[(i, j)].conj();
                for k in 0..d {
                    for l in 0..d {
                        e[(i * d + k, j * d + l)] += bc * a[(k, l)];
                    }
                }
            }
        }
    }
    let spec = eigenvalues(&e)?;
    let mu = spec[0];
    let eta = mu.modulus();
    if eta < opts.eta_min {
        return Err(Error::PatchesTooFar { edge, eta: to_f64(eta), eta_min: to_f64(opts.eta_min) });
    }
    if spec.len() > 1 && eta - spec[1].modulus() <= opts.tol_spec {
        return Err(Error::AmbiguousGauge(edge));
    }
    let (v, _) = null_vector(&(e - identity::<R>(d * d) * mu));
    let m = unvectorize(&v, d);
    let mut u = polar_unitary(&m);
    let tr = u.trace();
    if tr.modulus() > lit::<R>(1e-6) {
        u *= tr.conj() / real(tr.modulus());
    }
    Ok((eta, u))
}

/// Edge gauges for every edge of the family's complex.
pub fn gauge_data<R: Real>(family: &TensorFamily<R>, opts: &BerryOptions<R>) -> Result<GaugeData<R>> {
    let k = &family.complex;
    let mut unitaries = Vec::with_capacity(k.count(1));
    let mut overlaps = Vec::with_capacity(k.count(1));
    for e in k.simplices(1) {
        let (eta, u) = edge_gauge_labeled(&family.tensors[e[0]], &family.tensors[e[1]], opts, (e[0], e[1]))?;
        unitaries.push(u);
        overlaps.push(eta);
    }
    Ok(GaugeData { complex: k.clone(), unitaries, overlaps })
}

/// Scalar part `λ = Tr P / |Tr P|` of `P = U_uv U_vw U_wu` and the deviation
/// `‖P − λ1‖_F / √D`.
pub fn triangle_phase<R: Real>(g: &GaugeData<R>, tri: &[usize]) -> Result<(C<R>, R)> {
    if tri.len() != 3 {
        return Err(Error::InvalidInput(format!("{tri:?} is not a triangle")));
    }
    let (u, v, w) = (tri[0], tri[1], tri[2]);
    let p = g.gauge(u, v)? * g.gauge(v, w)? * g.gauge(w, u)?;
    let d = p.nrows();
    let tr = p.trace();
    if tr.modulus() <= lit::<R>(1e-12) * lit(d as f64) {
        return Err(Error::NoScalarPart(tri.to_vec()));
    }
    let lambda = tr / real(tr.modulus());
    let dev = frobenius(&(p - identity::<R>(d) * lambda)) / lit::<R>(d as f64).sqrt();
    Ok((lambda, dev))
}

/// Triangle phases from gauges, rejecting triangles with deviation above
/// `dev_max`.
pub fn phase_data<R: Real>(g: &GaugeData<R>, opts: &BerryOptions<R>) -> Result<PhaseData<R>> {
    let mut lambda = Vec::with_capacity(g.complex.count(2));
    let mut dev = Vec::with_capacity(g.complex.count(2));
    for tri in g.complex.simplices(2) {
        let (l, d) = triangle_phase(g, tri)?;
        if d > opts.dev_max {
            return Err(Error::NotScalar { triangle: tri.clone(), dev: to_f64(d), dev_max: to_f64(opts.dev_max) });
        }
        lambda.push(l);
        dev.push(d);
    }
    Ok(PhaseData { complex: g.complex.clone(), lambda, dev })
}

/// Family → gauges → phases.
pub fn family_phases<R: Real>(family: &TensorFamily<R>, opts: &BerryOptions<R>) -> Result<PhaseData<R>> {
    phase_data(&gauge_data(family, opts)?, opts)
}

/// Reduces an angle into `(−π, π]`.
pub fn principal<R: Real>(x: R) -> R {
    let two_pi = R::two_pi();
    let mut y = x - two_pi * (x / two_pi).round();
    if y <= -R::pi() {
        y += two_pi;
    } else if y > R::pi() {
        y -= two_pi;
    }
    y
}

/// Unreduced `(δ Arg λ)_T` for a tetrahedron.
fn flux_bracket<R: Real>(p: &PhaseData<R>, tet: &[usize]) -> Result<R> {
    if tet.len() != 4 {
        return Err(Error::InvalidInput(format!("{tet:?} is not a tetrahedron")));
    }
    let mut acc = R::zero();
    for (i, f) in faces(tet).enumerate() {
        let a = p.phase(&f)?.argument();
        acc += if i % 2 == 0 { a } else { -a };
    }
    Ok(acc)
}

/// Flux `G_T ∈ (−π, π]`:
/// `Arg λ_vwx − Arg λ_uwx + Arg λ_uvx − Arg λ_uvw` reduced mod 2π.
pub fn tet_flux<R: Real>(p: &PhaseData<R>, tet: &[usize], opts: &BerryOptions<R>) -> Result<R> {
    let g = principal(flux_bracket(p, tet)?);
    if R::pi() - g.abs() < opts.branch_margin {
        return Err(Error::BranchCut(tet.to_vec()));
    }
    Ok(g)
}

fn require_three_dimensional(k: &SimplicialComplex) -> Result<()> {
    if k.dim() != 3 {
        return Err(Error::InvalidInput(format!(
            "parameter complex must be three-dimensional, got dimension {}",
            k.dim()
        )));
    }
    Ok(())
}

/// Fluxes on every tetrahedron, in the complex's order.
pub fn fluxes<R: Real>(p: &PhaseData<R>, opts: &BerryOptions<R>) -> Result<Vec<R>> {
    require_three_dimensional(&p.complex)?;
    p.complex.simplices(3).iter().map(|t| tet_flux(p, t, opts)).collect()
}

/// `n = round(−Σ_T sign(T) G_T / 2π)` and the distance of the sum from
/// `−2πn`, with signs from the complex's fundamental cycle.
pub fn berry_number<R: Real>(p: &PhaseData<R>, opts: &BerryOptions<R>) -> Result<(i64, R)> {
    require_three_dimensional(&p.complex)?;
    let cycle = p.complex.fundamental_cycle()?;
    berry_number_with_cycle(p, &cycle, opts)
}

/// As [`berry_number`] with an explicitly chosen orientation.
pub fn berry_number_with_cycle<R: Real>(
    p: &PhaseData<R>,
    cycle: &FundamentalCycle,
    opts: &BerryOptions<R>,
) -> Result<(i64, R)> {
    let g = fluxes(p, opts)?;
    if cycle.signs.len() != g.len() {
        return Err(Error::DimensionMismatch("cycle does not match complex".into()));
    }
    let sum = g.iter().zip(&cycle.signs).fold(R::zero(), |acc, (&f, &s)| acc + f * lit(s as f64));
    let n = (-sum / R::two_pi()).round();
    let residual = (sum + n * R::two_pi()).abs();
    if residual > opts.quantization_tol {
        return Err(Error::NotQuantized(to_f64(residual)));
    }
    let n = n.to_i64().ok_or_else(|| Error::Numerical("berry number out of range".into()))?;
    Ok((n, residual))
}

/// Integer 3-cocycle `c_T = ((δb)_T − G_T) / 2π` with `b = Arg λ`.
pub fn integer_cocycle<R: Real>(p: &PhaseData<R>, opts: &BerryOptions<R>) -> Result<(Vec<R>, Cochain)> {
    require_three_dimensional(&p.complex)?;
    for (t, &d) in p.dev.iter().enumerate() {
        if d > opts.dev_max {
            return Err(Error::NotScalar {
                triangle: p.complex.simplices(2)[t].clone(),
                dev: to_f64(d),
                dev_max: to_f64(opts.dev_max),
            });
        }
    }
    let mut flux = Vec::with_capacity(p.complex.count(3));
    let mut values = Vec::with_capacity(p.complex.count(3));
    for tet in p.complex.simplices(3) {
        let bracket = flux_bracket(p, tet)?;
        let g = tet_flux(p, tet, opts)?;
        let c = (bracket - g) / R::two_pi();
        let rounded = c.round();
        if (c - rounded).abs() > lit(1e-6) {
            return Err(Error::Inconsistent(format!("non-integral cocycle value {} on {tet:?}", to_f64(c))));
        }
        flux.push(g);
        values.push(BigInt::from(rounded.to_i64().expect("small integer")));
    }
    let c = Cochain::new(&p.complex, 3, Ring::Integers, values)?;
    Ok((flux, c))
}

/// Class of the integer cocycle in `H³(K; Z)`.
pub fn berry_class<R: Real>(p: &PhaseData<R>, opts: &BerryOptions<R>) -> Result<(ClassCoords, AbelianGroup)> {
    let (_, c) = integer_cocycle(p, opts)?;
    let h = cohomology(&p.complex, 3, Ring::Integers)?;
    Ok((h.classify(&p.complex, &c)?, h.group))
}

/// Everything the pipeline derives from phase data.
#[derive(Clone, Debug)]
pub struct BerryOutput<R: Real> {
    pub flux: Vec<R>,
    pub cocycle: Cochain,
    /// Number and quantization residual; `None` on non-orientable complexes.
    pub number: Option<(i64, R)>,
    pub class: ClassCoords,
    pub group: AbelianGroup,
}

pub fn analyze<R: Real>(p: &PhaseData<R>, opts: &BerryOptions<R>) -> Result<BerryOutput<R>> {
    let (flux, cocycle) = integer_cocycle(p, opts)?;
    let h = cohomology(&p.complex, 3, Ring::Integers)?;
    let class = h.classify(&p.complex, &cocycle)?;
    let number = match p.complex.fundamental_cycle() {
        Ok(cycle) => Some(berry_number_with_cycle(p, &cycle, opts)?),
        Err(Error::NonOrientable) | Err(Error::NotClosedManifold(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(BerryOutput { flux, cocycle, number, class, group: h.group })
}

/// Phase data whose higher Berry number is `target`.
///
/// Takes the integer generator `n` of `H³(K; Z)` evaluating to `+1` on the
/// fundamental cycle, spreads a flux `g_T = −2π·target·sign(T)/N` over the `N`
/// tetrahedra and solves `δb = g + 2π·target·n` over the reals. Requires
/// `2|target| < N` so that every flux stays inside `(−π, π)`.
pub fn synthetic_family<R: Real>(k: &SimplicialComplex, target: i64, tol: R) -> Result<PhaseData<R>> {
    require_three_dimensional(k)?;
    let cycle = k.fundamental_cycle()?;
    let h = cohomology(k, 3, Ring::Integers)?;
    if h.group.free_rank == 0 {
        return Err(Error::InvalidInput("H³(K; Z) has no free part".into()));
    }
    let t = h.group.torsion.len();
    let mut gen = h.generator(t);
    let e = evaluate(&gen, &cycle)?;
    if e == BigInt::from(-1) {
        gen = gen.scaled(-1);
    } else if e != BigInt::from(1) {
        return Err(Error::Inconsistent(format!("generator evaluates to {e}")));
    }
    let n_tets = k.count(3);
    if 2 * target.unsigned_abs() as usize >= n_tets {
        return Err(Error::InvalidInput(format!(
            "target {target} needs more than {} tetrahedra",
            2 * target.unsigned_abs()
        )));
    }
    let two_pi_target = R::two_pi() * lit(target as f64);
    let values: Vec<R> = cycle
        .signs
        .iter()
        .zip(&gen.values)
        .map(|(&s, n)| {
            let g = -two_pi_target * lit(s as f64) / lit(n_tets as f64);
            g + two_pi_target * lit(n.to_f64().expect("small"))
        })
        .collect();
    let rhs = RealCochain::new(k, 3, values)?;
    let b = solve_real_coboundary(k, &rhs, tol)?;
    let lambda = b.values.iter().map(|&x| cis(x)).collect();
    PhaseData::new(k.clone(), lambda)
}
