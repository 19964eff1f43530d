//! Generalized MPS tensors in finite dimensions and their transfer channels.
//!
//! Convention used throughout the crate: a tensor with Kraus matrices `T_i`
//! defines the channel `Φ(x) = Σ_i T_i x T_i^†` acting on bond operators; the
//! adjoint `Φ^†(κ) = Σ_i T_i^† κ T_i` acts on density operators. A tensor is
//! *unital* when `Φ(1) = 1`. The stationary state `ρ` satisfies `Φ^†(ρ) = ρ`.

use nalgebra::{ComplexField, DMatrix};
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, eigenvector, frobenius, hermitian_eigen, identity, left_singular, random_isometry,
    spectral_norm, unvectorize, vectorize,
};
use crate::scalar::{lit, real, to_f64, CMat, Real, C};

/// Finite-dimensional generalized MPS tensor: one `D×D` matrix per physical
/// basis vector.
#[derive(Clone, Debug, PartialEq)]
pub struct MpsTensor<R: Real> {
    kraus: Vec<CMat<R>>,
}

impl<R: Real> MpsTensor<R> {
    pub fn new(kraus: Vec<CMat<R>>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidInput("tensor needs at least one Kraus matrix".into()))?;
        let d = first.nrows();
        if d == 0 {
            return Err(Error::InvalidInput("bond dimension must be positive".into()));
        }
        for (i, k) in kraus.iter().enumerate() {
            if k.nrows() != d || k.ncols() != d {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus matrix {i} is {}x{}, expected {d}x{d}",
                    k.nrows(),
                    k.ncols()
                )));
            }
            if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::InvalidInput(format!("Kraus matrix {i} has non-finite entries")));
            }
        }
        Ok(Self { kraus })
    }

    pub fn phys_dim(&self) -> usize {
        self.kraus.len()
    }

    pub fn bond_dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn kraus(&self) -> &[CMat<R>] {
        &self.kraus
    }

    pub fn into_kraus(self) -> Vec<CMat<R>> {
        self.kraus
    }

    /// `‖Σ_i T_i T_i^† − 1‖_F`.
    pub fn unitality_residual(&self) -> R {
        let mut acc = DMatrix::zeros(self.bond_dim(), self.bond_dim());
        for t in &self.kraus {
            acc += t * t.adjoint();
        }
        frobenius(&(acc - identity::<R>(self.bond_dim())))
    }

    pub fn is_unital(&self, tol: R) -> bool {
        self.unitality_residual() <= tol
    }

    /// `T_i ↦ U T_i U^†`.
    pub fn conjugated(&self, u: &CMat<R>) -> Self {
        let kraus = self.kraus.iter().map(|t| u * t * u.adjoint()).collect();
        Self { kraus }
    }

    /// The spin-1 AKLT tensor, `d = 3`, `D = 2`:
    /// `{√(2/3) σ⁺, −√(1/3) σᶻ, −√(2/3) σ⁻}`. Physical index 0, 1, 2 carries
    /// `m = +1, 0, −1`.
    pub fn aklt() -> Self {
        let a = lit::<R>(2.0 / 3.0).sqrt();
        let b = lit::<R>(1.0 / 3.0).sqrt();
        let z = R::zero();
        let m = |e: [[R; 2]; 2]| DMatrix::from_fn(2, 2, |i, j| real(e[i][j]));
        Self {
            kraus: vec![m([[z, a], [z, z]]), m([[-b, z], [z, b]]), m([[z, z], [-a, z]])],
        }
    }

    /// The trivial tensor `d = D = 1`, Kraus `[[1]]`.
    pub fn trivial() -> Self {
        Self { kraus: vec![identity::<R>(1)] }
    }

    /// Single-Kraus tensor `{U}`; its channel is unitary conjugation `Ad_U`.
    pub fn unitary(u: CMat<R>) -> Result<Self> {
        Self::new(vec![u])
    }

    /// Random unital tensor built from a Haar-random `(dD)×D` isometry.
    pub fn random_unital<G: Rng + ?Sized>(phys_dim: usize, bond_dim: usize, rng: &mut G) -> Self {
        let v = random_isometry::<R, G>(phys_dim * bond_dim, bond_dim, rng);
        tensor_of(&Isometry { v })
    }
}

/// Spin-1 `S^z = diag(1, 0, −1)` in the AKLT physical basis.
pub fn spin_one_sz<R: Real>() -> CMat<R> {
    DMatrix::from_fn(3, 3, |i, j| if i == j { real(lit::<R>(1.0 - i as f64)) } else { real(R::zero()) })
}

/// Transfer channel `Φ(x) = Σ T_i x T_i^†` of a tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumChannel<R: Real> {
    kraus: Vec<CMat<R>>,
}

impl<R: Real> QuantumChannel<R> {
    /// Channel with the tensor's Kraus family. Unitality is not enforced here;
    /// see [`QuantumChannel::unitality_residual`].
    pub fn from_tensor(t: &MpsTensor<R>) -> Self {
        Self { kraus: t.kraus.clone() }
    }

    pub fn kraus(&self) -> &[CMat<R>] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].nrows()
    }

    pub fn unitality_residual(&self) -> R {
        frobenius(&(self.apply(&identity::<R>(self.dim())).expect("square") - identity::<R>(self.dim())))
    }

    fn check(&self, x: &CMat<R>) -> Result<()> {
        let d = self.dim();
        if x.nrows() != d || x.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, channel acts on {d}x{d}",
                x.nrows(),
                x.ncols()
            )));
        }
        Ok(())
    }

    /// `Σ T_i x T_i^†`.
    pub fn apply(&self, x: &CMat<R>) -> Result<CMat<R>> {
        self.check(x)?;
        let mut acc = DMatrix::zeros(self.dim(), self.dim());
        for t in &self.kraus {
            acc += t * x * t.adjoint();
        }
        Ok(acc)
    }

    /// `Σ T_i^† κ T_i`.
    pub fn apply_adjoint(&self, kappa: &CMat<R>) -> Result<CMat<R>> {
        self.check(kappa)?;
        let mut acc = DMatrix::zeros(self.dim(), self.dim());
        for t in &self.kraus {
            acc += t.adjoint() * kappa * t;
        }
        Ok(acc)
    }

    /// Natural `D²×D²` matrix of `Φ` on column-major vectorized operators:
    /// `Σ_i conj(T_i) ⊗ T_i`.
    pub fn transfer_matrix(&self) -> CMat<R> {
        let d = self.dim();
        let mut e = DMatrix::zeros(d * d, d * d);
        for t in &self.kraus {
            for a in 0..d {
                for b in 0..d {
                    let tc = t[(a, b)].conj();
                    if tc == C::new(R::zero(), R::zero()) {
                        continue;
                    }
                    for k in 0..d {
                        for l in 0..d {
                            e[(a * d + k, b * d + l)] += tc * t[(k, l)];
                        }
                    }
                }
            }
        }
        e
    }

    /// Eigenvalues of the transfer matrix, descending modulus, and the gap
    /// `1 − |λ₂|`.
    pub fn transfer_spectrum(&self) -> Result<Spectrum<R>> {
        let eigenvalues = eigenvalues(&self.transfer_matrix())?;
        let gap = if eigenvalues.len() > 1 { R::one() - eigenvalues[1].modulus() } else { R::one() };
        Ok(Spectrum { eigenvalues, gap })
    }

    /// Unique stationary density operator, `Φ^†(ρ) = ρ`, `Tr ρ = 1`.
    ///
    /// `tol_spec` decides which eigenvalues count as peripheral
    /// (`|λ| ≥ 1 − tol_spec`); more than one peripheral eigenvalue means the
    /// channel is not primitive.
    pub fn stationary_state(&self, tol_spec: R) -> Result<DensityOp<R>> {
        let spec = self.transfer_spectrum()?;
        let peripheral: Vec<_> =
            spec.eigenvalues.iter().filter(|z| z.modulus() >= R::one() - tol_spec).collect();
        if peripheral.len() != 1 {
            return Err(Error::NotPrimitive(format!(
                "{} peripheral eigenvalues",
                peripheral.len()
            )));
        }
        if (*peripheral[0] - real(R::one())).modulus() > tol_spec {
            return Err(Error::NotPrimitive(format!(
                "leading eigenvalue {} is not 1",
                to_f64(peripheral[0].modulus())
            )));
        }
        let adj = self.transfer_matrix().adjoint();
        let (v, _) = eigenvector(&adj, real(R::one()));
        let d = self.dim();
        let mut rho = unvectorize(&v, d);
        let tr = rho.trace();
        if tr.modulus() <= <R as Real>::epsilon() {
            return Err(Error::Numerical("stationary vector has zero trace".into()));
        }
        rho /= tr;
        let rho = (&rho + rho.adjoint()) * real(lit::<R>(0.5));
        let (vals, _) = hermitian_eigen(&rho);
        if vals[0] < -tol_spec {
            return Err(Error::Numerical(format!(
                "stationary operator not positive: smallest eigenvalue {:e}",
                to_f64(vals[0])
            )));
        }
        DensityOp::new(rho, tol_spec)
    }

    /// Matrix of the rank-one limit `x ↦ Tr[ρ x] 1`.
    pub fn rank_one_limit(rho: &DensityOp<R>) -> CMat<R> {
        let d = rho.dim();
        let one = vectorize(&identity::<R>(d));
        let rt = vectorize(&rho.matrix().transpose());
        &one * rt.transpose()
    }

    /// Spectral-norm distance of the transfer matrix from `x ↦ Tr[ρ x] 1`.
    pub fn distance_from_rank_one(&self, rho: &DensityOp<R>) -> R {
        spectral_norm(&(self.transfer_matrix() - Self::rank_one_limit(rho)))
    }

    /// Peripheral spectrum and convergence of `Φ^N` towards `x ↦ Tr[ρ x] 1`.
    pub fn check_split_purity(&self, n: u32, tol_spec: R) -> Result<SplitReport<R>> {
        let spec = self.transfer_spectrum()?;
        let peripheral: Vec<C<R>> = spec
            .eigenvalues
            .iter()
            .copied()
            .filter(|z| z.modulus() >= R::one() - tol_spec)
            .collect();
        let rho = match self.stationary_state(tol_spec) {
            Ok(rho) => rho,
            Err(Error::NotPrimitive(_)) => {
                return Ok(SplitReport { peripheral, distance: None, converges: false })
            }
            Err(e) => return Err(e),
        };
        let e = self.transfer_matrix();
        let en = matrix_power(&e, n);
        let distance = spectral_norm(&(en - Self::rank_one_limit(&rho)));
        Ok(SplitReport { peripheral, distance: Some(distance), converges: true })
    }
}

fn matrix_power<R: Real>(m: &CMat<R>, mut n: u32) -> CMat<R> {
    let mut result = identity::<R>(m.nrows());
    let mut base = m.clone();
    while n > 0 {
        if n & 1 == 1 {
            result = &result * &base;
        }
        base = &base * &base;
        n >>= 1;
    }
    result
}

#[derive(Clone, Debug)]
pub struct Spectrum<R: Real> {
    pub eigenvalues: Vec<C<R>>,
    pub gap: R,
}

#[derive(Clone, Debug)]
pub struct SplitReport<R: Real> {
    /// Eigenvalues on the unit circle (within `tol_spec`).
    pub peripheral: Vec<C<R>>,
    /// `‖E^N − P_ρ‖₂`; `None` when the channel is not primitive.
    pub distance: Option<R>,
    pub converges: bool,
}

/// Density operator on the bond space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOp<R: Real> {
    rho: CMat<R>,
    min_eigenvalue: R,
}

impl<R: Real> DensityOp<R> {
    /// Validates Hermiticity, unit trace and positivity within `tol`.
    pub fn new(rho: CMat<R>, tol: R) -> Result<Self> {
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::DimensionMismatch("density operator must be square".into()));
        }
        if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("density operator has non-finite entries".into()));
        }
        let herm = frobenius(&(&rho - rho.adjoint()));
        if herm > tol {
            return Err(Error::InvalidInput(format!("not Hermitian (residual {:e})", to_f64(herm))));
        }
        let tr = rho.trace();
        if (tr - real(R::one())).modulus() > tol {
            return Err(Error::InvalidInput(format!("trace {} is not 1", to_f64(tr.re))));
        }
        let (vals, _) = hermitian_eigen(&rho);
        if vals[0] < -tol {
            return Err(Error::InvalidInput(format!(
                "not positive semidefinite (eigenvalue {:e})",
                to_f64(vals[0])
            )));
        }
        Ok(Self { rho, min_eigenvalue: vals[0] })
    }

    /// `1/D`.
    pub fn maximally_mixed(d: usize) -> Self {
        let rho = identity::<R>(d) / real(lit::<R>(d as f64));
        Self { rho, min_eigenvalue: R::one() / lit::<R>(d as f64) }
    }

    pub fn random_faithful<G: Rng + ?Sized>(d: usize, rng: &mut G) -> Self {
        let rho = crate::linalg::random_density::<R, G>(d, rng);
        let (vals, _) = hermitian_eigen(&rho);
        Self { rho, min_eigenvalue: vals[0] }
    }

    pub fn matrix(&self) -> &CMat<R> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn min_eigenvalue(&self) -> R {
        self.min_eigenvalue
    }

    /// Smallest eigenvalue strictly above `tol`.
    pub fn is_faithful(&self, tol: R) -> bool {
        self.min_eigenvalue > tol
    }

    /// Ascending eigenvalues.
    pub fn spectrum(&self) -> Vec<R> {
        hermitian_eigen(&self.rho).0
    }
}

/// Translation-invariant state given by a channel and its stationary state.
#[derive(Clone, Debug)]
pub struct Sfcs<R: Real> {
    channel: QuantumChannel<R>,
    rho: DensityOp<R>,
}

impl<R: Real> Sfcs<R> {
    /// Checks `‖Φ^†(ρ) − ρ‖_F ≤ tol`.
    pub fn new(channel: QuantumChannel<R>, rho: DensityOp<R>, tol: R) -> Result<Self> {
        if rho.dim() != channel.dim() {
            return Err(Error::DimensionMismatch("ρ and channel act on different spaces".into()));
        }
        let res = frobenius(&(channel.apply_adjoint(rho.matrix())? - rho.matrix()));
        if res > tol {
            return Err(Error::NotStationary(to_f64(res)));
        }
        Ok(Self { channel, rho })
    }

    /// State of a primitive tensor with its unique stationary `ρ`.
    pub fn from_tensor(t: &MpsTensor<R>, tol_spec: R) -> Result<Self> {
        let channel = QuantumChannel::from_tensor(t);
        let rho = channel.stationary_state(tol_spec)?;
        Ok(Self { channel, rho })
    }

    pub fn channel(&self) -> &QuantumChannel<R> {
        &self.channel
    }

    pub fn rho(&self) -> &DensityOp<R> {
        &self.rho
    }

    pub fn phys_dim(&self) -> usize {
        self.channel.kraus.len()
    }

    /// Dressed transfer step `𝔼(O ⊗ x) = Σ_ij O_ij T_i x T_j^†`.
    pub fn dressed(&self, op: &CMat<R>, x: &CMat<R>) -> Result<CMat<R>> {
        let d = self.phys_dim();
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "local operator is {}x{}, physical dimension is {d}",
                op.nrows(),
                op.ncols()
            )));
        }
        self.channel.check(x)?;
        let k = &self.channel.kraus;
        let mut acc = DMatrix::zeros(self.channel.dim(), self.channel.dim());
        for j in 0..d {
            let xtj = x * k[j].adjoint();
            for i in 0..d {
                let o = op[(i, j)];
                if o == C::new(R::zero(), R::zero()) {
                    continue;
                }
                acc += (&k[i] * &xtj) * o;
            }
        }
        Ok(acc)
    }

    /// `ω(O₁ ⊗ … ⊗ O_n)` on consecutive sites.
    pub fn expectation(&self, ops: &[CMat<R>]) -> Result<C<R>> {
        let mut x = identity::<R>(self.channel.dim());
        for op in ops.iter().rev() {
            x = self.dressed(op, &x)?;
        }
        Ok((self.rho.matrix() * x).trace())
    }

    /// `ω(A ⊗ 1^{r−1} ⊗ B)`.
    pub fn two_point(&self, a: &CMat<R>, b: &CMat<R>, r: usize) -> Result<C<R>> {
        if r == 0 {
            return Err(Error::InvalidInput("separation must be at least 1".into()));
        }
        let mut x = self.dressed(b, &identity::<R>(self.channel.dim()))?;
        for _ in 1..r {
            x = self.channel.apply(&x)?;
        }
        x = self.dressed(a, &x)?;
        Ok((self.rho.matrix() * x).trace())
    }

    /// `ω(A ⊗ 1^{r−1} ⊗ B) − ω(A) ω(B)`.
    pub fn connected_two_point(&self, a: &CMat<R>, b: &CMat<R>, r: usize) -> Result<C<R>> {
        let ab = self.two_point(a, b, r)?;
        let ea = self.expectation(std::slice::from_ref(a))?;
        let eb = self.expectation(std::slice::from_ref(b))?;
        Ok(ab - ea * eb)
    }
}

/// Isometry `V: 𝒱 → 𝒫 ⊗ 𝒱` with `Φ(x) = V^† (1 ⊗ x) V`.
///
/// Block `i` (rows `iD..(i+1)D`) of `V` is `T_i^†`, so that `V^†V = Σ T_i T_i^†`.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry<R: Real> {
    v: CMat<R>,
}

impl<R: Real> Isometry<R> {
    pub fn new(v: CMat<R>, tol: R) -> Result<Self> {
        let d = v.ncols();
        if d == 0 || !v.nrows().is_multiple_of(d) {
            return Err(Error::DimensionMismatch(format!(
                "isometry shape {}x{} is not (dD)xD",
                v.nrows(),
                v.ncols()
            )));
        }
        let res = frobenius(&(v.adjoint() * &v - identity::<R>(d)));
        if res > tol {
            return Err(Error::NotIsometric { residual: to_f64(res), tol: to_f64(tol) });
        }
        Ok(Self { v })
    }

    pub fn matrix(&self) -> &CMat<R> {
        &self.v
    }

    /// `V^† (1 ⊗ x) V`.
    pub fn apply(&self, x: &CMat<R>) -> CMat<R> {
        let d = self.v.ncols();
        let p = self.v.nrows() / d;
        let lifted = crate::linalg::kron(&identity::<R>(p), x);
        self.v.adjoint() * lifted * &self.v
    }
}

pub fn isometry_of<R: Real>(t: &MpsTensor<R>, tol: R) -> Result<Isometry<R>> {
    let res = t.unitality_residual();
    if res > tol {
        return Err(Error::NotUnital { residual: to_f64(res), tol: to_f64(tol) });
    }
    let d = t.bond_dim();
    let p = t.phys_dim();
    let mut v = DMatrix::zeros(p * d, d);
    for (i, k) in t.kraus.iter().enumerate() {
        v.view_mut((i * d, 0), (d, d)).copy_from(&k.adjoint());
    }
    Ok(Isometry { v })
}

pub fn tensor_of<R: Real>(v: &Isometry<R>) -> MpsTensor<R> {
    let d = v.v.ncols();
    let p = v.v.nrows() / d;
    let kraus = (0..p).map(|i| v.v.view((i * d, 0), (d, d)).adjoint()).collect();
    MpsTensor { kraus }
}

/// Smallest `n` such that products of `n` Kraus matrices span all `D×D`
/// matrices; `None` if this does not happen up to `n_max`. `D = 1` gives 1.
///
/// Singular values count towards the rank when above `tol` times the largest.
pub fn injectivity_length<R: Real>(t: &MpsTensor<R>, n_max: usize, tol: R) -> Option<usize> {
    let d = t.bond_dim();
    if d == 1 {
        return Some(1);
    }
    let full = d * d;
    let mut basis = span_basis(t.kraus.iter().cloned(), d, tol);
    for n in 1..=n_max {
        if basis.len() == full {
            return Some(n);
        }
        if basis.is_empty() {
            return None;
        }
        let products: Vec<CMat<R>> =
            t.kraus.iter().flat_map(|k| basis.iter().map(move |b| k * b)).collect();
        basis = span_basis(products.into_iter(), d, tol);
    }
    None
}

/// Orthonormal basis (in Hilbert-Schmidt inner product) of the span of the
/// given matrices.
fn span_basis<R: Real>(mats: impl Iterator<Item = CMat<R>>, d: usize, tol: R) -> Vec<CMat<R>> {
    let cols: Vec<_> = mats.map(|m| vectorize(&m)).collect();
    if cols.is_empty() {
        return Vec::new();
    }
    let k = DMatrix::from_columns(&cols);
    let (u, sv) = left_singular(&k);
    let smax = sv.first().copied().unwrap_or(R::zero());
    if smax == R::zero() {
        return Vec::new();
    }
    sv.iter()
        .enumerate()
        .take_while(|(_, &s)| s > tol * smax)
        .map(|(c, _)| unvectorize(&u.column(c).into_owned(), d))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_density, random_hermitian, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type T = MpsTensor<f64>;

    fn close(a: C<f64>, b: C<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    /// `Σ Π O_k[i_k, j_k] Tr[ρ T_{i1}…T_{in} T_{jn}^†…T_{j1}^†]` by explicit
    /// enumeration of all index strings.
    fn brute_expectation(t: &T, rho: &CMat<f64>, ops: &[CMat<f64>]) -> C<f64> {
        let d = t.phys_dim();
        let n = ops.len();
        let mut total = C::new(0.0, 0.0);
        let strings = d.pow(n as u32);
        for si in 0..strings {
            for sj in 0..strings {
                let digits = |mut s: usize| {
                    let mut v = vec![0; n];
                    for k in (0..n).rev() {
                        v[k] = s % d;
                        s /= d;
                    }
                    v
                };
                let (is, js) = (digits(si), digits(sj));
                let mut coeff = C::new(1.0, 0.0);
                for k in 0..n {
                    coeff *= ops[k][(is[k], js[k])];
                }
                if coeff == C::new(0.0, 0.0) {
                    continue;
                }
                let mut m = identity::<f64>(t.bond_dim());
                for &i in &is {
                    m *= &t.kraus()[i];
                }
                for &j in js.iter().rev() {
                    m *= t.kraus()[j].adjoint();
                }
                total += coeff * (rho * m).trace();
            }
        }
        total
    }

    #[test]
    fn aklt_is_unital_with_known_spectrum() {
        let t = T::aklt();
        assert!(t.unitality_residual() < 1e-14);
        let spec = QuantumChannel::from_tensor(&t).transfer_spectrum().unwrap();
        let expected = [1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0];
        for (z, e) in spec.eigenvalues.iter().zip(expected) {
            assert!(close(*z, C::new(e, 0.0), 1e-10), "{z}");
        }
        assert!((spec.gap - 2.0 / 3.0).abs() < 1e-10);
        assert_eq!(injectivity_length(&t, 8, 1e-10), Some(2));
    }

    #[test]
    fn aklt_stationary_state_is_maximally_mixed() {
        let ch = QuantumChannel::from_tensor(&T::aklt());
        let rho = ch.stationary_state(1e-8).unwrap();
        assert!(frobenius(&(rho.matrix() - identity::<f64>(2) * C::new(0.5, 0.0))) < 1e-10);
    }

    #[test]
    fn adjoint_pairing() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..10 {
            let t = T::random_unital(3, 3, &mut rng);
            let ch = QuantumChannel::from_tensor(&t);
            let x = crate::linalg::random_gaussian::<f64, _>(3, 3, &mut rng);
            let k = crate::linalg::random_gaussian::<f64, _>(3, 3, &mut rng);
            let lhs = (&k * ch.apply(&x).unwrap()).trace();
            let rhs = (ch.apply_adjoint(&k).unwrap() * &x).trace();
            assert!(close(lhs, rhs, 1e-10));
            // the transfer matrix agrees with the Kraus form
            let vx = ch.transfer_matrix() * vectorize(&x);
            assert!(frobenius(&(unvectorize(&vx, 3) - ch.apply(&x).unwrap())) < 1e-10);
        }
    }

    #[test]
    fn unitary_channel_is_not_primitive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let u = random_unitary::<f64, _>(2, &mut rng);
        let ch = QuantumChannel::from_tensor(&T::unitary(u.clone()).unwrap());
        let k = random_hermitian::<f64, _>(2, &mut rng);
        let adj = ch.apply_adjoint(&k).unwrap();
        assert!(frobenius(&(adj - u.adjoint() * &k * &u)) < 1e-12);
        assert!(matches!(ch.stationary_state(1e-8), Err(Error::NotPrimitive(_))));
        let report = ch.check_split_purity(8, 1e-8).unwrap();
        assert!(!report.converges);
        assert_eq!(report.peripheral.len(), 4);
    }

    #[test]
    fn split_purity_of_aklt() {
        let ch = QuantumChannel::from_tensor(&T::aklt());
        let r = ch.check_split_purity(8, 1e-8).unwrap();
        assert!(r.converges);
        assert_eq!(r.peripheral.len(), 1);
        assert!(r.distance.unwrap() <= 10.0 * (1.0f64 / 3.0).powi(8));
    }

    #[test]
    fn isometry_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for i in 0..100 {
            let (p, d) = (2 + i % 3, 1 + i % 4);
            let t = T::random_unital(p, d, &mut rng);
            let v = isometry_of(&t, 1e-10).unwrap();
            let vm = v.matrix();
            assert!(frobenius(&(vm.adjoint() * vm - identity::<f64>(d))) < 1e-10);
            let back = tensor_of(&v);
            for (a, b) in back.kraus().iter().zip(t.kraus()) {
                assert!(frobenius(&(a - b)) < 1e-12);
            }
            let x = crate::linalg::random_gaussian::<f64, _>(d, d, &mut rng);
            let ch = QuantumChannel::from_tensor(&t);
            assert!(frobenius(&(v.apply(&x) - ch.apply(&x).unwrap())) < 1e-10);
        }
    }

    #[test]
    fn non_unital_tensor_has_no_isometry() {
        let t = T::new(vec![identity::<f64>(2) * C::new(2.0, 0.0)]).unwrap();
        assert!(matches!(isometry_of(&t, 1e-10), Err(Error::NotUnital { .. })));
    }

    #[test]
    fn expectations_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let t = T::random_unital(2, 3, &mut rng);
        let state = Sfcs::from_tensor(&t, 1e-8).unwrap();
        let ops: Vec<CMat<f64>> = (0..3).map(|_| random_hermitian::<f64, _>(2, &mut rng)).collect();
        let fast = state.expectation(&ops).unwrap();
        let slow = brute_expectation(&t, state.rho().matrix(), &ops);
        assert!(close(fast, slow, 1e-10), "{fast} vs {slow}");
    }

    #[test]
    fn aklt_correlations() {
        let state = Sfcs::from_tensor(&T::aklt(), 1e-8).unwrap();
        let sz = spin_one_sz::<f64>();
        assert!(state.expectation(std::slice::from_ref(&sz)).unwrap().norm() < 1e-12);
        let id = identity::<f64>(3);
        // closed form (4/3)(−1/3)^r
        for r in 1..6 {
            let c = state.connected_two_point(&sz, &sz, r).unwrap();
            assert!(close(c, C::new(4.0 / 3.0 * (-1.0f64 / 3.0).powi(r as i32), 0.0), 1e-12));
            let c1 = state.connected_two_point(&sz, &sz, r + 1).unwrap();
            assert!((c1.re / c.re + 1.0 / 3.0).abs() < 1e-10);
            let mut chain = vec![sz.clone()];
            chain.extend(std::iter::repeat_n(id.clone(), r - 1));
            chain.push(sz.clone());
            assert!(close(state.expectation(&chain).unwrap(), c, 1e-12));
        }
    }

    #[test]
    fn gauge_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for t in [T::aklt(), T::random_unital(3, 3, &mut rng)] {
            let d = t.bond_dim();
            let u = random_unitary::<f64, _>(d, &mut rng);
            let tu = t.conjugated(&u);
            let s0 = QuantumChannel::from_tensor(&t).transfer_spectrum().unwrap();
            let s1 = QuantumChannel::from_tensor(&tu).transfer_spectrum().unwrap();
            assert!(crate::linalg::spectral_mismatch(&s0.eigenvalues, &s1.eigenvalues) < 1e-10);
            assert_eq!(injectivity_length(&t, 10, 1e-10), injectivity_length(&tu, 10, 1e-10));
            let (w0, w1) = (Sfcs::from_tensor(&t, 1e-8).unwrap(), Sfcs::from_tensor(&tu, 1e-8).unwrap());
            let ops: Vec<CMat<f64>> =
                (0..2).map(|_| random_hermitian::<f64, _>(t.phys_dim(), &mut rng)).collect();
            assert!(close(w0.expectation(&ops).unwrap(), w1.expectation(&ops).unwrap(), 1e-10));
        }
    }

    #[test]
    fn density_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_density::<f64, _>(3, &mut rng);
        let d = DensityOp::new(rho.clone(), 1e-10).unwrap();
        assert!(d.is_faithful(1e-6));
        assert!(DensityOp::new(rho * C::new(2.0, 0.0), 1e-10).is_err());
        let bad = DMatrix::from_fn(2, 2, |i, j| C::new(if i == j { 0.5 } else { 1.0 }, 0.0));
        assert!(DensityOp::new(bad, 1e-10).is_err());
    }

    #[test]
    fn stationarity_is_checked() {
        let ch = QuantumChannel::from_tensor(&T::aklt());
        let rho = DensityOp::new(
            DMatrix::from_fn(2, 2, |i, j| C::new(if i == j { 0.5 + 0.2 * (1.0 - 2.0 * i as f64) } else { 0.0 }, 0.0)),
            1e-10,
        )
        .unwrap();
        assert!(matches!(Sfcs::new(ch, rho, 1e-10), Err(Error::NotStationary(_))));
    }

    #[test]
    fn single_precision_channel() {
        let t = MpsTensor::<f32>::aklt();
        let spec = QuantumChannel::from_tensor(&t).transfer_spectrum().unwrap();
        assert!((spec.gap - 2.0 / 3.0).abs() < 1e-5);
    }
}
