//! Dense complex linear algebra helpers on top of nalgebra.

use nalgebra::{ComplexField, DMatrix, DVector, Hessenberg, SymmetricEigen, SVD};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{cplx, lit, real, CMat, Real, C};

/// Column-major vectorization, `vec(A X B) = (B^T ⊗ A) vec(X)`.
pub fn vectorize<R: Real>(x: &CMat<R>) -> DVector<C<R>> {
    DVector::from_column_slice(x.as_slice())
}

pub fn unvectorize<R: Real>(v: &DVector<C<R>>, rows: usize) -> CMat<R> {
    DMatrix::from_column_slice(rows, v.len() / rows, v.as_slice())
}

pub fn kron<R: Real>(a: &CMat<R>, b: &CMat<R>) -> CMat<R> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    out
}

pub fn identity<R: Real>(n: usize) -> CMat<R> {
    DMatrix::identity(n, n)
}

pub fn trace<R: Real>(m: &CMat<R>) -> C<R> {
    m.trace()
}

/// Largest singular value.
pub fn spectral_norm<R: Real>(m: &CMat<R>) -> R {
    if m.is_empty() {
        return R::zero();
    }
    let sv = SVD::new(m.clone(), false, false).singular_values;
    sv.iter().copied().fold(R::zero(), |a, b| a.max(b))
}

pub fn frobenius<R: Real>(m: &CMat<R>) -> R {
    m.norm()
}

/// Singular values in descending order.
pub fn singular_values<R: Real>(m: &CMat<R>) -> Vec<R> {
    if m.is_empty() {
        return Vec::new();
    }
    SVD::new(m.clone(), false, false).singular_values.iter().copied().collect()
}

/// Left singular vectors (as columns) and descending singular values.
pub fn left_singular<R: Real>(m: &CMat<R>) -> (CMat<R>, Vec<R>) {
    let svd = SVD::new(m.clone(), true, false);
    let sv = svd.singular_values.iter().copied().collect();
    (svd.u.expect("requested U"), sv)
}

/// Right singular vector belonging to the smallest singular value of a square
/// matrix, together with that singular value.
pub fn null_vector<R: Real>(m: &CMat<R>) -> (DVector<C<R>>, R) {
    let n = m.ncols();
    let svd = SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let k = svd.singular_values.len() - 1;
    let v = v_t.row(k).adjoint();
    debug_assert_eq!(v.len(), n);
    (v, svd.singular_values[k])
}

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues and
/// orthonormal eigenvectors as columns.
pub fn hermitian_eigen<R: Real>(m: &CMat<R>) -> (Vec<R>, CMat<R>) {
    let herm = (m + m.adjoint()) * real(lit::<R>(0.5));
    let eig = SymmetricEigen::new(herm);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub fn hermitian_fn<R: Real>(m: &CMat<R>, f: impl Fn(R) -> R) -> CMat<R> {
    let (vals, vecs) = hermitian_eigen(m);
    let n = vals.len();
    let mut scaled = vecs.clone();
    for c in 0..n {
        let fv = real(f(vals[c]));
        for r in 0..n {
            scaled[(r, c)] *= fv;
        }
    }
    scaled * vecs.adjoint()
}

/// Principal square root of a positive semidefinite matrix. Tiny negative
/// eigenvalues from rounding are clamped to zero.
pub fn psd_sqrt<R: Real>(m: &CMat<R>) -> CMat<R> {
    hermitian_fn(m, |x| x.max(R::zero()).sqrt())
}

/// Unitary factor `W Y^†` of `M = W Σ Y^†`.
pub fn polar_unitary<R: Real>(m: &CMat<R>) -> CMat<R> {
    let svd = SVD::new(m.clone(), true, true);
    svd.u.expect("requested U") * svd.v_t.expect("requested V^T")
}

/// Complex Givens rotation `[[c, s], [-s̄, c]]` mapping `(a, b)` to `(r, 0)`.
fn givens<R: Real>(a: C<R>, b: C<R>) -> (R, C<R>) {
    let abs_a = a.modulus();
    let abs_b = b.modulus();
    if abs_b == R::zero() {
        return (R::one(), C::new(R::zero(), R::zero()));
    }
    if abs_a == R::zero() {
        return (R::zero(), b.conj() / real(abs_b));
    }
    let r = abs_a.hypot(abs_b);
    let c = abs_a / r;
    let s = (a / real(abs_a)) * b.conj() / real(r);
    (c, s)
}

/// Eigenvalue of the 2x2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson<R: Real>(a: C<R>, b: C<R>, c: C<R>, d: C<R>) -> C<R> {
    let half = real(lit::<R>(0.5));
    let mean = (a + d) * half;
    let diff = (a - d) * half;
    let disc = ComplexField::sqrt(diff * diff + b * c);
    let l1 = mean + disc;
    let l2 = mean - disc;
    if (l1 - d).modulus() <= (l2 - d).modulus() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues of a general complex square matrix by Hessenberg reduction and
/// shifted complex QR iteration. Sorted by descending modulus, ties broken
/// by ascending argument.
pub fn eigenvalues<R: Real>(m: &CMat<R>) -> Result<Vec<C<R>>> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::DimensionMismatch("eigenvalues of non-square matrix".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical("non-finite matrix entry".into()));
    }
    let mut h = if n > 2 { Hessenberg::new(m.clone()).unpack_h() } else { m.clone() };
    let eps = <R as Real>::epsilon();
    let anorm = h.iter().fold(R::zero(), |acc, z| acc.max(z.modulus()));
    let tiny = eps * anorm;
    let mut eig = vec![C::new(R::zero(), R::zero()); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let max_iter = 60 * n.max(4);
    let mut total = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].modulus();
            let diag = h[(lo - 1, lo - 1)].modulus() + h[(lo, lo)].modulus();
            if sub <= eps * diag || sub <= tiny {
                h[(lo, lo - 1)] = C::new(R::zero(), R::zero());
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_iter {
            return Err(Error::Numerical("QR eigenvalue iteration did not converge".into()));
        }
        let mu = if iter.is_multiple_of(11) {
            h[(hi, hi)] + real(lit::<R>(0.75) * h[(hi, hi - 1)].modulus())
        } else {
            wilkinson(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for k in lo..=hi {
            h[(k, k)] -= mu;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = real(c) * x + s * y;
                h[(k + 1, j)] = -s.conj() * x + real(c) * y;
            }
            rots.push((c, s));
        }
        for (idx, &(c, s)) in rots.iter().enumerate() {
            let k = lo + idx;
            let top = (k + 2).min(hi);
            for i in lo..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * real(c) + y * s.conj();
                h[(i, k + 1)] = -x * s + y * real(c);
            }
        }
        for k in lo..=hi {
            h[(k, k)] += mu;
        }
    }
    sort_by_modulus(&mut eig);
    Ok(eig)
}

pub fn sort_by_modulus<R: Real>(v: &mut [C<R>]) {
    v.sort_by(|a, b| {
        b.modulus()
            .partial_cmp(&a.modulus())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.argument().partial_cmp(&b.argument()).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Largest distance between matched eigenvalues of two spectra, matching
/// each entry of `a` greedily to the nearest unused entry of `b`. Infinite
/// when the lengths differ.
pub fn spectral_mismatch<R: Real>(a: &[C<R>], b: &[C<R>]) -> R {
    if a.len() != b.len() {
        return R::max_value().unwrap_or_else(R::one);
    }
    let mut used = vec![false; b.len()];
    let mut worst = R::zero();
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (*x - *y).modulus()))
            .fold((usize::MAX, R::max_value().unwrap_or_else(R::one)), |acc, c| if c.1 < acc.1 { c } else { acc });
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

/// Eigenvector for a known eigenvalue `mu` as the null vector of `M - mu I`.
pub fn eigenvector<R: Real>(m: &CMat<R>, mu: C<R>) -> (DVector<C<R>>, R) {
    let n = m.nrows();
    let shifted = m - identity::<R>(n) * mu;
    null_vector(&shifted)
}

pub fn random_gaussian<R: Real, G: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut G) -> CMat<R> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        cplx(lit(re), lit(im))
    })
}

/// Haar-random unitary via QR of a Ginibre matrix with the phase correction on
/// the diagonal of R.
pub fn random_unitary<R: Real, G: Rng + ?Sized>(n: usize, rng: &mut G) -> CMat<R> {
    random_isometry(n, n, rng)
}

/// Haar-random isometry with `rows >= cols` (`V^† V = 1`).
pub fn random_isometry<R: Real, G: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut G) -> CMat<R> {
    assert!(rows >= cols);
    let g = random_gaussian::<R, G>(rows, cols, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for c in 0..cols {
        let d = r[(c, c)];
        let m = d.modulus();
        if m > R::zero() {
            let phase = d / real(m);
            for i in 0..rows {
                q[(i, c)] *= phase;
            }
        }
    }
    q
}

/// Random faithful density operator with smallest eigenvalue bounded away from
/// zero: `(G G^† + floor·1)` normalized to unit trace.
pub fn random_density<R: Real, G: Rng + ?Sized>(n: usize, rng: &mut G) -> CMat<R> {
    let g = random_gaussian::<R, G>(n, n, rng);
    let mut m = &g * g.adjoint();
    let floor = lit::<R>(0.1) * lit::<R>(n as f64);
    for i in 0..n {
        m[(i, i)] += real(floor);
    }
    let tr = m.trace().re;
    m / real(tr)
}

/// Random Hermitian matrix.
pub fn random_hermitian<R: Real, G: Rng + ?Sized>(n: usize, rng: &mut G) -> CMat<R> {
    let g = random_gaussian::<R, G>(n, n, rng);
    (&g + g.adjoint()) * real(lit::<R>(0.5))
}
