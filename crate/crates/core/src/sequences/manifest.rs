//! Matrix, right-hand-side and deflation-space sources, and the TOML
//! sequence manifest.
//!
//! Matrix sources are Matrix Market paths or `gen:<kind>:<n>` generators:
//!
//! | kind | operator |
//! |------|----------|
//! | `diag` | `diag(1, ..., n)` |
//! | `laplace1d` | tridiagonal `[-1, 2, -1]` |
//! | `clustered-hpd` | `{0.01, 0.02}` and `n - 2` points on `[1, 2]`, random orthogonal mixing |
//! | `clustered` | `{1e-3, 2e-3}` and `n - 2` points on `[1, 2]`, non-normal Schur mixing, coupling 2 |
//! | `random-hpd` | spectrum on `[1, 100]`, random unitary mixing |
//!
//! Right-hand sides are `ones`, `random`, `random:<seed>`, or a dense array path.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::dense::{dense_eig, hermitian_eig, DENSE_EIG_CAP};
use crate::error::{Error, Result};
use crate::operators::{
    make_test_operator, read_dense_array, read_matrix_market, read_rhs, CsrMatrix, LinearOperator, Mixing,
    SpectrumSpec,
};
use crate::random;
use crate::vector::Vector;
use crate::C64;

use super::method::{DeflationSpace, Method, MethodParams};
use super::{RecycleKind, RecycleStrategy};

fn resolve(base: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Loads a matrix from a path (relative to `base`) or a `gen:` spec.
pub fn load_matrix(spec: &str, base: &Path, seed: u64) -> Result<CsrMatrix> {
    let Some(rest) = spec.strip_prefix("gen:") else {
        return read_matrix_market(resolve(base, spec));
    };
    let (kind, n) = rest
        .rsplit_once(':')
        .ok_or_else(|| Error::invalid(format!("generator spec `{spec}` must be gen:<kind>:<n>")))?;
    let n: usize = n.parse().map_err(|_| Error::invalid(format!("bad generator size in `{spec}`")))?;
    if n < 3 {
        return Err(Error::invalid("generated operators need n >= 3"));
    }
    let from_spec = |s: SpectrumSpec| -> Result<CsrMatrix> { CsrMatrix::from_dense(&make_test_operator(&s)?.matrix) };
    match kind {
        "diag" => Ok(CsrMatrix::from_diagonal(&(1..=n).map(|i| C64::new(i as f64, 0.0)).collect::<Vec<_>>())),
        "laplace1d" => {
            let mut t = Vec::with_capacity(3 * n);
            for i in 0..n {
                t.push((i, i, C64::new(2.0, 0.0)));
                if i + 1 < n {
                    t.push((i, i + 1, C64::new(-1.0, 0.0)));
                    t.push((i + 1, i, C64::new(-1.0, 0.0)));
                }
            }
            CsrMatrix::from_triplets(n, &t)
        }
        "clustered-hpd" => from_spec(SpectrumSpec::clustered(n, &[0.01, 0.02], 1.0, 2.0, Mixing::Orthogonal { seed })),
        "clustered" => from_spec(SpectrumSpec::clustered(n, &[1e-3, 2e-3], 1.0, 2.0, Mixing::Schur {
            seed,
            coupling: 2.0,
            decoupled: 2,
        })),
        "random-hpd" => CsrMatrix::from_dense(&random::hpd_matrix(&mut random::seeded(seed), n, 1.0, 100.0)),
        _ => Err(Error::invalid(format!("unknown generator `{kind}`"))),
    }
}

/// Loads a right-hand side: `ones`, `random` (manifest seed), `random:<seed>`,
/// or a dense array path.
pub fn load_rhs(spec: Option<&str>, n: usize, base: &Path, seed: u64) -> Result<Vector> {
    match spec.unwrap_or("ones") {
        "random" => Ok(random::real_vector(&mut random::seeded(seed ^ 0x5eed), n)),
        "ones" => read_rhs("ones", n),
        s if s.starts_with("random:") => {
            let own: u64 = s[7..].parse().map_err(|_| Error::invalid(format!("bad rhs seed in `{s}`")))?;
            Ok(random::real_vector(&mut random::seeded(own), n))
        }
        path => read_rhs(&resolve(base, path).to_string_lossy(), n),
    }
}

/// Parses `none`, `auto-eig:<k>`, or `<W path>[,<W~ path>]`.
pub fn load_deflation_space(spec: &str, a: &dyn LinearOperator, base: &Path) -> Result<Option<DeflationSpace>> {
    if spec == "none" {
        return Ok(None);
    }
    if let Some(k) = spec.strip_prefix("auto-eig:") {
        let k: usize = k.parse().map_err(|_| Error::invalid(format!("bad deflation size in `{spec}`")))?;
        return auto_eig_space(a, k).map(Some);
    }
    let (wpath, wtpath) = match spec.split_once(',') {
        Some((w, wt)) => (w, Some(wt)),
        None => (spec, None),
    };
    let read = |p: &str| -> Result<Vec<Vector>> {
        let m = read_dense_array(resolve(base, p))?;
        if m.rows() != a.dim() {
            return Err(Error::DimensionMismatch { expected: a.dim(), got: m.rows() });
        }
        Ok(m.columns())
    };
    let w = read(wpath)?;
    let wt = wtpath.map(read).transpose()?;
    Ok(Some(DeflationSpace { w, wt }))
}

/// Eigenvectors of the `k` smallest-modulus eigenvalues from a dense
/// decomposition; left eigenvectors fill `W~` for non-Hermitian operators.
pub fn auto_eig_space(a: &dyn LinearOperator, k: usize) -> Result<DeflationSpace> {
    let n = a.dim();
    if n > DENSE_EIG_CAP {
        return Err(Error::SizeCap { n, cap: DENSE_EIG_CAP });
    }
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("auto-eig needs 0 < k < n, got k = {k}")));
    }
    let d = a.to_dense();
    if a.is_hermitian() {
        let (vals, vecs) = hermitian_eig(&d)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| vals[i].abs().total_cmp(&vals[j].abs()));
        return Ok(DeflationSpace::new(order[..k].iter().map(|&i| vecs.col(i).to_vec()).collect()));
    }
    let right = dense_eig(&d)?;
    let left = dense_eig(&d.adjoint())?;
    let w: Vec<Vector> = (0..k).map(|j| right.vectors.col(j).to_vec()).collect();
    let mut used = vec![false; n];
    let mut wt = Vec::with_capacity(k);
    for &lambda in &right.values[..k] {
        let (best, _) = left
            .values
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, mu)| (i, (mu.conj() - lambda).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        used[best] = true;
        wt.push(left.vectors.col(best).to_vec());
    }
    Ok(DeflationSpace { w, wt: Some(wt) })
}

fn default_restart() -> usize {
    20
}
fn default_tol() -> f64 {
    1e-8
}
fn default_maxiter() -> usize {
    10_000
}
fn default_seed() -> u64 {
    42
}
fn default_strategy() -> RecycleKind {
    RecycleKind::None
}

/// Sequence manifest (TOML).
///
/// ```toml
/// method = "gmres-dr"
/// restart = 20
/// recycle_dim = 4
/// tol = 1e-8
/// strategy = "harmonic-dr"
///
/// [[system]]
/// matrix = "a.mtx"
/// rhs = "ones"
///
/// [[system]]
/// matrix = "gen:clustered:200"
/// method = "gcro-dr"
/// ```
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceManifest {
    pub method: String,
    #[serde(default = "default_restart")]
    pub restart: usize,
    #[serde(default)]
    pub recycle_dim: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_maxiter")]
    pub maxiter: usize,
    #[serde(default = "default_strategy")]
    pub strategy: RecycleKind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub precond: Option<String>,
    #[serde(rename = "system", default)]
    pub systems: Vec<SystemSpec>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    pub matrix: String,
    #[serde(default)]
    pub rhs: Option<String>,
    #[serde(default)]
    pub method: Option<String>,
}

impl SequenceManifest {
    pub fn parse(text: &str) -> Result<Self> {
        let m: Self = toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(1, |s| text[..s.start].matches('\n').count() + 1);
            Error::Parse { line, msg: e.message().to_string() }
        })?;
        m.method()?;
        for s in &m.systems {
            if let Some(meth) = &s.method {
                meth.parse::<Method>()?;
            }
        }
        if m.systems.is_empty() {
            return Err(Error::invalid("sequence manifest lists no systems"));
        }
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn method(&self) -> Result<Method> {
        self.method.parse()
    }

    pub fn params(&self) -> MethodParams {
        MethodParams::new(self.restart, self.recycle_dim, self.tol, self.maxiter)
    }

    pub fn strategy(&self) -> RecycleStrategy {
        RecycleStrategy { kind: self.strategy, k: self.recycle_dim }
    }
}
