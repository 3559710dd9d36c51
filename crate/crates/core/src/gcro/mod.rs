//! Inner-outer GCRO and GCRO with deflated restarting.

use crate::dense::{hessenberg_lsq, orthonormalize_against, right_divide_upper, thin_qr, DenseMatrix, GivensLsq};
use crate::error::{check_len, Error, Result};
use crate::gmres::{
    restarted_fgmres, trivial_report, ArnoldiState, ConvergenceHistory, CycleRecord, EventKind, SolveConfig,
    SolveReport,
};
use crate::operators::{LinearOperator, Preconditioner};
use crate::recycle::{harmonic_ritz, harmonic_ritz_generalized, harvest, HarmonicRitz, HarmonicSpec, RecycleSpace};
use crate::vector::{self, Vector};
use crate::C64;

/// Correction basis `Z_k` and orthonormal approximation basis `V_k` with `A Z_k = V_k`.
#[derive(Clone, Debug, Default)]
pub struct OuterSpace {
    pub z: Vec<Vector>,
    pub v: Vec<Vector>,
    n: usize,
}

impl OuterSpace {
    pub fn new(n: usize) -> Self {
        Self { z: Vec::new(), v: Vec::new(), n }
    }

    pub fn k(&self) -> usize {
        self.z.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Appends `z` after orthonormalizing `A z` against `V_k`. Returns
    /// `false` and leaves the space untouched when `A z` lies in `span(V_k)`.
    pub fn append(&mut self, a: &dyn LinearOperator, z: &[C64]) -> Result<bool> {
        check_len(self.n, z.len())?;
        let s = a.apply(z);
        self.append_with_image(z, &s)
    }

    /// As [`append`](Self::append) with a precomputed image `s = A z`.
    pub fn append_with_image(&mut self, z: &[C64], s: &[C64]) -> Result<bool> {
        check_len(self.n, z.len())?;
        check_len(self.n, s.len())?;
        if !vector::is_finite(z) {
            return Err(Error::NonFinite("outer direction"));
        }
        let o = orthonormalize_against(s, &self.v)?;
        let snorm = vector::norm(s);
        let unit = match o.unit_vector {
            Some(u) if o.tail_norm > 1e-12 * snorm => u,
            _ => return Ok(false),
        };
        let mut znew = z.to_vec();
        for (zi, &h) in self.z.iter().zip(&o.coeffs) {
            vector::axpy(-h, zi, &mut znew);
        }
        vector::scale(C64::new(1.0 / o.tail_norm, 0.0), &mut znew);
        self.z.push(znew);
        self.v.push(unit);
        Ok(true)
    }

    /// `x += Z V^H r`, `r -= V V^H r`.
    pub fn project(&self, x: &mut [C64], r: &mut [C64]) {
        let coeffs = vector::adjoint_times(&self.v, r);
        for ((zi, vi), &c) in self.z.iter().zip(&self.v).zip(&coeffs) {
            vector::axpy(c, zi, x);
            vector::axpy(-c, vi, r);
        }
    }

    /// Drops the oldest directions until at most `k` remain.
    pub fn truncate_oldest(&mut self, k: usize) {
        let excess = self.k().saturating_sub(k);
        self.z.drain(..excess);
        self.v.drain(..excess);
    }

    /// Arnoldi state `A Z = [V, r/|r|] [I; 0]` with `c = |r| e_{k+1}`, for `r` orthogonal to `V`.
    pub fn prefix_state(&self, r: &[C64]) -> ArnoldiState {
        let k = self.k();
        let beta = vector::norm(r);
        let mut v = self.v.clone();
        v.push(vector::scaled(C64::new(1.0 / beta, 0.0), r));
        let mut h = DenseMatrix::zeros(k + 1, k);
        h.set_block(0, 0, &DenseMatrix::identity(k));
        let mut c = vector::zeros(k + 1);
        c[k] = C64::new(beta, 0.0);
        ArnoldiState::from_prefix(self.z.clone(), v, &h, c)
    }

    /// `||A Z_k - V_k||_F`
    pub fn relation_residual(&self, a: &dyn LinearOperator) -> f64 {
        self.z
            .iter()
            .zip(&self.v)
            .map(|(z, v)| vector::norm(&vector::sub(&a.apply(z), v)).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn orthonormality_error(&self) -> f64 {
        vector::orthonormality_error(&self.v)
    }

    /// Recycle container `A Z = [V, v_extra] [I; 0]`; `v_extra` is `r/|r|` when
    /// `r` is usable, otherwise any unit vector orthogonal to `V`.
    pub fn to_recycle(&self, r: &[C64], theta: Vec<C64>) -> Result<RecycleSpace> {
        let k = self.k();
        let mut v = self.v.clone();
        let o = orthonormalize_against(r, &v)?;
        let extra = match o.unit_vector {
            Some(u) => u,
            None => (0..self.n)
                .find_map(|i| {
                    orthonormalize_against(&vector::unit(self.n, i), &v)
                        .ok()
                        .filter(|o| o.tail_norm > 0.5)
                        .and_then(|o| o.unit_vector)
                })
                .ok_or_else(|| Error::Degenerate("outer space spans the whole space".into()))?,
        };
        v.push(extra);
        let mut hbar = DenseMatrix::zeros(k + 1, k);
        hbar.set_block(0, 0, &DenseMatrix::identity(k));
        let mut theta = theta;
        theta.resize(k, C64::new(0.0, 0.0));
        Ok(RecycleSpace { z: self.z.clone(), v, hbar, theta })
    }
}

/// Result of an inner minimum-residual cycle on `(I - V_k V_k^H) A`.
#[derive(Clone, Debug)]
pub struct InnerCycle {
    /// `What y`, the update to the iterate.
    pub correction: Vector,
    /// `A What y`, built without an extra operator application.
    pub image: Vector,
    pub residual: Vector,
    pub residual_norm: f64,
    /// Least-squares residual norm after each inner step.
    pub step_norms: Vec<f64>,
    /// `[V_k, V_{m+1}]` with the outer basis first.
    pub basis: Vec<Vector>,
    /// Inner preconditioned directions `Z_m`.
    pub z: Vec<Vector>,
    /// `Gbar = [[D, B], [0, Hbar_m]]` with `A What = basis Gbar`.
    pub g: DenseMatrix,
    /// Column scaling `D` of the outer correction basis.
    pub d: Vec<f64>,
    pub y: Vector,
    /// Norm of the residual the cycle started from.
    pub beta: f64,
    pub breakdown: bool,
}

/// Up to `steps` inner steps on the operator projected away from `space.v`,
/// minimizing over `range([Z_k, Z_m])`. `r` must be orthogonal to `space.v`.
/// Stops early once the least-squares residual drops to `target`.
pub fn gcro_inner_cycle(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    space: &OuterSpace,
    r: &[C64],
    steps: usize,
    target: f64,
) -> Result<InnerCycle> {
    let n = a.dim();
    check_len(n, r.len())?;
    let k = space.k();
    let beta = vector::norm(r);
    if beta == 0.0 {
        return Err(Error::invalid("inner cycle needs a nonzero residual"));
    }
    let leak = vector::norm(&vector::adjoint_times(&space.v, r));
    if leak > 1e-10 * beta {
        return Err(Error::invalid(format!("residual is not orthogonal to the outer space ({leak:.3e})")));
    }
    let d: Vec<f64> = space.z.iter().map(|z| 1.0 / vector::norm(z)).collect();
    let mut basis = space.v.clone();
    basis.push(vector::scaled(C64::new(1.0 / beta, 0.0), r));
    let mut rhs = vector::zeros(k + 1);
    rhs[k] = C64::new(beta, 0.0);
    let mut lsq = GivensLsq::new(&rhs);
    let mut cols: Vec<Vector> = Vec::new();
    for (i, &di) in d.iter().enumerate() {
        let mut col = vector::zeros(i + 1);
        col[i] = C64::new(di, 0.0);
        lsq.push_column(&col);
        cols.push(col);
    }
    let mut z = Vec::new();
    let mut step_norms = Vec::new();
    let mut breakdown = false;
    for j in 0..steps {
        let zj = m.apply(&basis[k + j]);
        if !vector::is_finite(&zj) {
            return Err(Error::NonFinite("preconditioner"));
        }
        let s = a.apply(&zj);
        let o = orthonormalize_against(&s, &basis)?;
        let mut col = o.coeffs;
        col.push(C64::new(o.tail_norm, 0.0));
        z.push(zj);
        let res = lsq.push_column(&col);
        cols.push(col);
        step_norms.push(res);
        match o.unit_vector {
            Some(u) => basis.push(u),
            None => {
                breakdown = true;
                break;
            }
        }
        if res <= target {
            break;
        }
    }
    let rows = basis.len();
    let ncols = cols.len();
    let mut g = DenseMatrix::zeros(rows, ncols);
    for (j, col) in cols.iter().enumerate() {
        for (i, &val) in col.iter().enumerate().take(rows) {
            g[(i, j)] = val;
        }
    }
    let mut full_rhs = vector::zeros(rows);
    full_rhs[k] = C64::new(beta, 0.0);
    let sol = hessenberg_lsq(&g, &full_rhs)?;
    let y = sol.solution;
    let mut correction = vector::zeros(n);
    for i in 0..k {
        vector::axpy(y[i] * d[i], &space.z[i], &mut correction);
    }
    for (zj, &yj) in z.iter().zip(&y[k..]) {
        vector::axpy(yj, zj, &mut correction);
    }
    let gy = g.mul_vec(&y);
    let image = vector::combine(n, &basis, &gy);
    let resid_coords = vector::sub(&full_rhs, &gy);
    let residual = vector::combine(n, &basis, &resid_coords);
    Ok(InnerCycle {
        correction,
        image,
        residual_norm: vector::norm(&resid_coords),
        residual,
        step_norms,
        basis,
        z,
        g,
        d,
        y,
        beta,
        breakdown,
    })
}

/// GCRO with an outer space of at most `config.augment` directions; each
/// inner cycle runs `restart - augment` steps and its correction joins the
/// outer space, evicting the oldest direction when full.
pub fn gcro_solve(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    b: &[C64],
    x0: Option<&[C64]>,
    config: &SolveConfig,
) -> Result<SolveReport> {
    config.validate()?;
    let k = config.augment;
    let setup = Setup::new(a, m, b, x0)?;
    let Some(mut st) = setup else {
        return Ok(trivial_report(a.dim()));
    };
    let mut outer = OuterSpace::new(a.dim());
    let mut cycles = 0;
    while !st.converged(config.tol) && cycles < config.max_cycles {
        cycles += 1;
        st.history.mark_cycle();
        let steps = if outer.k() == 0 { config.restart } else { config.restart - k };
        st.project(&outer);
        let inner = gcro_inner_cycle(a, m, &outer, &st.r, steps, config.tol * st.bnorm)?;
        st.absorb(a, b, &inner);
        if k > 0 {
            if outer.append_with_image(&inner.correction, &inner.image)? {
                outer.truncate_oldest(k);
            } else {
                st.history.record(EventKind::DimensionTruncated);
            }
        }
        if inner.breakdown && inner.residual_norm > 1e-10 * st.bnorm {
            st.history.record(EventKind::Breakdown);
            break;
        }
    }
    Ok(st.finish(a, b, config.tol, None, None))
}

/// GCRO with deflated restarting.
///
/// The outer space is replaced after every cycle by `config.augment` harmonic
/// Ritz directions selected by `spec.which`. A shadow copy of the outer
/// correction basis, expressed in the Arnoldi vectors, defines the harmonic
/// problem so that a fixed preconditioner reproduces GMRES-DR. A `warm` space
/// seeds the outer space for the first cycle.
pub fn gcro_dr_solve(
    a: &dyn LinearOperator,
    m: &mut dyn Preconditioner,
    b: &[C64],
    x0: Option<&[C64]>,
    config: &SolveConfig,
    spec: &HarmonicSpec,
    warm: Option<&RecycleSpace>,
) -> Result<SolveReport> {
    config.validate()?;
    let k = config.augment;
    if k == 0 && warm.is_none() {
        return restarted_fgmres(a, m, b, x0, config, vector::norm(b));
    }
    let n = a.dim();
    let Some(mut st) = Setup::new(a, m, b, x0)? else {
        return Ok(trivial_report(n));
    };
    let hspec = HarmonicSpec { k: k.max(1), which: spec.which };
    let mut outer = OuterSpace::new(n);
    // columns of the outer basis written in Arnoldi vectors; None after a warm start
    let mut shadow: Option<Vec<Vector>> = None;
    if let Some(space) = warm {
        check_len(n, space.n())?;
        for z in space.z.iter().take(config.restart - 1) {
            outer.append(a, z)?;
        }
        if outer.k() > 0 {
            st.history.record(EventKind::RecycleRefresh);
        }
    }
    let mut theta = Vec::new();
    let mut last_plain: Option<CycleRecord> = None;
    let mut cycles = 0;
    while !st.converged(config.tol) && cycles < config.max_cycles {
        cycles += 1;
        st.history.mark_cycle();
        let steps = config.restart.saturating_sub(outer.k()).max(1);
        st.project(&outer);
        let inner = gcro_inner_cycle(a, m, &outer, &st.r, steps, config.tol * st.bnorm)?;
        st.absorb(a, b, &inner);
        if inner.breakdown && inner.residual_norm > 1e-10 * st.bnorm {
            st.history.record(EventKind::Breakdown);
            break;
        }
        if outer.k() == 0 {
            last_plain = Some(plain_record(&inner));
        }
        if st.converged(config.tol) || inner.breakdown {
            break;
        }
        match refresh(&inner, &outer, shadow.as_deref(), &hspec) {
            Ok(Some((new_outer, new_shadow, new_theta))) => {
                outer = new_outer;
                shadow = Some(new_shadow);
                theta = new_theta;
                if outer.k() < hspec.k {
                    st.history.record(EventKind::DimensionTruncated);
                }
                st.history.record(EventKind::RecycleRefresh);
            }
            Ok(None) => st.history.record(EventKind::DimensionTruncated),
            Err(Error::HarmonicBreakdown(msg)) => {
                log::debug!("harmonic breakdown, outer space kept: {msg}");
                st.history.record(EventKind::HarmonicBreakdown);
            }
            Err(e) => return Err(e),
        }
    }
    let recycle = if outer.k() > 0 {
        outer.to_recycle(&st.r, theta).ok()
    } else {
        last_plain.as_ref().and_then(|rec| harvest(rec, &hspec).ok())
    };
    Ok(st.finish(a, b, config.tol, last_plain, recycle))
}

type Refreshed = (OuterSpace, Vec<Vector>, Vec<C64>);

fn refresh(
    inner: &InnerCycle,
    outer: &OuterSpace,
    shadow: Option<&[Vector]>,
    spec: &HarmonicSpec,
) -> Result<Option<Refreshed>> {
    let k = outer.k();
    let n = outer.n();
    let g = &inner.g;
    let cols = g.cols();
    let rows = g.rows();
    let mut spec = *spec;
    spec.k = spec.k.min(cols.saturating_sub(1)).max(1);
    let hr: HarmonicRitz = if k == 0 {
        harmonic_ritz(g, &spec)?
    } else {
        // S = [C, V_{m+1}]^H [U_t D, V_m]; without a shadow the outer basis stands in for U_t
        let mut s = DenseMatrix::zeros(rows, cols);
        for j in 0..k {
            let base = shadow.map_or(&outer.v[j], |sh| &sh[j]);
            let du = vector::scaled(C64::new(inner.d[j], 0.0), base);
            for (i, w) in inner.basis.iter().enumerate() {
                s[(i, j)] = vector::dot(w, &du);
            }
        }
        for j in k..cols {
            s[(j, j)] = C64::new(1.0, 0.0);
        }
        harmonic_ritz_generalized(g, &s, &spec)?
    };
    let keep = hr.k().min(cols - 1);
    let p = hr.p.block(0, cols, 0, keep);
    let qr = thin_qr(&g.matmul(&p))?;
    if !qr.is_full_rank() {
        return Err(Error::HarmonicBreakdown("Gbar P is rank deficient".into()));
    }
    // What = [Z_k D, Z_m] in x-space; shadow What = [U_t D, V_m]
    let what_x: Vec<Vector> = (0..cols)
        .map(|j| {
            if j < k {
                vector::scaled(C64::new(inner.d[j], 0.0), &outer.z[j])
            } else {
                inner.z[j - k].clone()
            }
        })
        .collect();
    let what_t: Vec<Vector> = (0..cols)
        .map(|j| {
            if j < k {
                let base = shadow.map_or(&outer.v[j], |sh| &sh[j]);
                vector::scaled(C64::new(inner.d[j], 0.0), base)
            } else {
                inner.basis[j].clone()
            }
        })
        .collect();
    let rinv_p = right_divide_upper(&p, &qr.r)?;
    let mut new_outer = OuterSpace::new(n);
    let mut new_shadow = Vec::with_capacity(keep);
    for j in 0..keep {
        new_outer.z.push(vector::combine(n, &what_x, rinv_p.col(j)));
        new_outer.v.push(vector::combine(n, &inner.basis[..rows], qr.q.col(j)));
        new_shadow.push(vector::combine(n, &what_t, rinv_p.col(j)));
    }
    if new_outer.orthonormality_error() > 1e-10 {
        return Ok(None);
    }
    Ok(Some((new_outer, new_shadow, hr.theta[..keep].to_vec())))
}

fn plain_record(inner: &InnerCycle) -> CycleRecord {
    let mut c = vector::zeros(inner.basis.len());
    c[0] = C64::new(inner.beta, 0.0);
    let state = ArnoldiState::from_prefix(inner.z.clone(), inner.basis.clone(), &inner.g, c);
    CycleRecord { state, y: inner.y.clone(), residual_norm: inner.residual_norm }
}

/// Shared iterate and history bookkeeping for the GCRO drivers.
struct Setup {
    x: Vector,
    r: Vector,
    rnorm: f64,
    bnorm: f64,
    history: ConvergenceHistory,
}

impl Setup {
    fn new(a: &dyn LinearOperator, m: &dyn Preconditioner, b: &[C64], x0: Option<&[C64]>) -> Result<Option<Self>> {
        let n = a.dim();
        check_len(n, b.len())?;
        check_len(n, m.dim())?;
        let x = match x0 {
            Some(x0) => {
                check_len(n, x0.len())?;
                x0.to_vec()
            }
            None => vector::zeros(n),
        };
        let bnorm = vector::norm(b);
        if bnorm == 0.0 {
            return Ok(None);
        }
        let r = vector::sub(b, &a.apply(&x));
        let rnorm = vector::norm(&r);
        let history = ConvergenceHistory::new(rnorm / bnorm);
        Ok(Some(Self { x, r, rnorm, bnorm, history }))
    }

    fn converged(&self, tol: f64) -> bool {
        self.rnorm <= tol * self.bnorm
    }

    /// Moves the residual component along the outer space into the iterate.
    fn project(&mut self, outer: &OuterSpace) {
        if outer.k() > 0 {
            outer.project(&mut self.x, &mut self.r);
            self.rnorm = vector::norm(&self.r);
        }
    }

    fn absorb(&mut self, a: &dyn LinearOperator, b: &[C64], inner: &InnerCycle) {
        for &res in &inner.step_norms {
            self.history.push(res / self.bnorm);
        }
        vector::axpy(C64::new(1.0, 0.0), &inner.correction, &mut self.x);
        let prev = self.rnorm;
        self.r = vector::sub(b, &a.apply(&self.x));
        self.rnorm = vector::norm(&self.r);
        if prev - inner.residual_norm < 1e-14 * prev {
            self.history.record(EventKind::Stagnation);
        }
    }

    fn finish(
        self,
        a: &dyn LinearOperator,
        b: &[C64],
        tol: f64,
        last_cycle: Option<CycleRecord>,
        recycle: Option<RecycleSpace>,
    ) -> SolveReport {
        let r = vector::sub(b, &a.apply(&self.x));
        let final_relres = vector::norm(&r) / self.bnorm;
        SolveReport {
            converged: final_relres <= tol,
            solution: self.x,
            iterations: self.history.iterations(),
            final_relres,
            history: self.history,
            last_cycle,
            recycle,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmres::fgmres_cycle;
    use crate::operators::{make_test_operator, CsrMatrix, Identity, Mixing, SpectrumSpec};
    use crate::random;
    use crate::recycle::gmres_dr_solve;
    use crate::vector::{from_real, unit};

    #[test]
    fn append_normalizes() {
        let a = CsrMatrix::identity(3);
        let mut s = OuterSpace::new(3);
        assert!(s.append(&a, &vector::scaled(C64::new(2.0, 0.0), &unit(3, 0))).unwrap());
        assert!(vector::norm(&vector::sub(&s.z[0], &unit(3, 0))) < 1e-15);
        assert!(vector::norm(&vector::sub(&s.v[0], &unit(3, 0))) < 1e-15);
    }

    #[test]
    fn append_rejects_dependent_image() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0, 3.0]));
        let mut s = OuterSpace::new(3);
        s.append(&a, &unit(3, 0)).unwrap();
        assert!(!s.append(&a, &vector::scaled(C64::new(-3.0, 0.0), &unit(3, 0))).unwrap());
        assert_eq!(s.k(), 1);
    }

    #[test]
    fn random_appends_keep_invariants() {
        let mut rng = random::seeded(11);
        let a = random::complex_matrix(&mut rng, 20, 20);
        let mut s = OuterSpace::new(20);
        for _ in 0..5 {
            s.append(&a, &random::complex_vector(&mut rng, 20)).unwrap();
        }
        let zf = vector::frobenius(&s.z);
        assert!(s.relation_residual(&a) <= 1e-10 * a.frobenius_norm() * zf);
        assert!(s.orthonormality_error() <= 1e-11);
    }

    #[test]
    fn empty_outer_matches_fgmres_cycle() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0, 3.0, 5.0, 8.0]));
        let b = from_real(&[1.0, 0.5, -1.0, 2.0, 1.0]);
        let inner = gcro_inner_cycle(&a, &mut Identity::new(5), &OuterSpace::new(5), &b, 3, 0.0).unwrap();
        let plain = fgmres_cycle(&a, &mut Identity::new(5), &b, &vector::zeros(5), &SolveConfig::new(3, 1e-300)).unwrap();
        assert!(vector::norm(&vector::sub(&inner.correction, &plain.x)) < 1e-13);
    }

    #[test]
    fn inner_cycle_with_outer_direction_is_exact() {
        let a = CsrMatrix::from_diagonal(&from_real(&[1.0, 2.0, 3.0]));
        let b = from_real(&[1.0, 1.0, 1.0]);
        let mut s = OuterSpace::new(3);
        s.append(&a, &unit(3, 0)).unwrap();
        let (mut x, mut r) = (vector::zeros(3), b.clone());
        s.project(&mut x, &mut r);
        let inner = gcro_inner_cycle(&a, &mut Identity::new(3), &s, &r, 2, 0.0).unwrap();
        vector::axpy(C64::new(1.0, 0.0), &inner.correction, &mut x);
        assert!(vector::norm(&vector::sub(&x, &from_real(&[1.0, 0.5, 1.0 / 3.0]))) < 1e-12);
    }

    #[test]
    fn inner_cycle_requires_orthogonal_residual() {
        let a = CsrMatrix::identity(3);
        let mut s = OuterSpace::new(3);
        s.append(&a, &unit(3, 0)).unwrap();
        assert!(gcro_inner_cycle(&a, &mut Identity::new(3), &s, &unit(3, 0), 2, 0.0).is_err());
    }

    #[test]
    fn zero_augment_is_restarted_gmres() {
        let a = CsrMatrix::from_diagonal(&from_real(&(1..=15).map(f64::from).collect::<Vec<_>>()));
        let b = from_real(&[1.0; 15]);
        let cfg = SolveConfig::new(4, 1e-10);
        let spec = HarmonicSpec::smallest(1).unwrap();
        let g = gcro_dr_solve(&a, &mut Identity::new(15), &b, None, &cfg, &spec, None).unwrap();
        let p = crate::gmres::fgmres_solve(&a, &mut Identity::new(15), &b, None, &cfg).unwrap();
        for (x, y) in g.history.relres.iter().zip(&p.history.relres) {
            assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn matches_gmres_dr_with_fixed_preconditioner() {
        let op = make_test_operator(&SpectrumSpec::clustered(50, &[1e-2, 2e-2], 1.0, 3.0, Mixing::Similarity {
            seed: 5,
            cond: 10.0,
        }))
        .unwrap();
        let b = random::complex_vector(&mut random::seeded(9), 50);
        let cfg = SolveConfig::new(10, 1e-13).with_augment(3).with_max_cycles(2);
        let spec = HarmonicSpec::smallest(3).unwrap();
        let dr = gmres_dr_solve(&op, &mut Identity::new(50), &b, None, &cfg, &spec, None).unwrap();
        let gc = gcro_dr_solve(&op, &mut Identity::new(50), &b, None, &cfg, &spec, None).unwrap();
        let diff = vector::norm(&vector::sub(&dr.solution, &gc.solution)) / vector::norm(&dr.solution);
        assert!(diff < 1e-8, "iterates differ by {diff:.3e}");
        assert!((dr.final_relres - gc.final_relres).abs() <= 1e-8 * dr.final_relres);
    }

    #[test]
    fn gcro_residuals_nonincreasing() {
        let op = make_test_operator(&SpectrumSpec::clustered(40, &[1e-2], 1.0, 2.0, Mixing::Orthogonal { seed: 2 })).unwrap();
        let b = from_real(&[1.0; 40]);
        let cfg = SolveConfig::new(8, 1e-9).with_augment(3);
        let rep = gcro_solve(&op, &mut Identity::new(40), &b, None, &cfg).unwrap();
        assert!(rep.converged);
        assert!(rep.history.relres.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }
}
