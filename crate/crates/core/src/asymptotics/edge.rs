use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use super::{sign_threshold, site_residuals, SolutionFamily, SolutionKind};
use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::jacobi::{Edge, JacobiMatrix};

/// Bounded and linearly growing solutions at a band edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgePair {
    pub edge: Edge,
    /// Normalized so that `(+-1)^k psi_s(k) -> 1`.
    pub small: SolutionFamily,
    /// Normalized so that `(+-1)^k psi_b(k) = k` past the support.
    pub big: SolutionFamily,
    pub k0: usize,
    pub k1_small: usize,
    pub k1_big: usize,
    pub contraction_small: f64,
    pub contraction_big: f64,
}

impl EdgePair {
    /// `psi_s(k) / psi_b(k)` for `k = 1 ..= K`.
    pub fn ratio(&self) -> Vec<f64> {
        (1..self.small.values.len())
            .map(|k| self.small.values[k] / self.big.values[k])
            .collect()
    }

    /// `+-psi_s(k+1) / psi_s(k) - 1` for `k = 0 .. K`.
    pub fn step(&self) -> Vec<f64> {
        let s = self.edge.sign();
        self.small.values.windows(2).map(|w| s * w[1] / w[0] - 1.0).collect()
    }

    /// `sum_{k=1}^{kmax} k (+-psi_s(k+1)/psi_s(k) - 1)^2`.
    pub fn step_sum(&self, kmax: usize) -> f64 {
        let step = self.step();
        (1..=kmax.min(step.len() - 1)).map(|k| k as f64 * step[k] * step[k]).sum()
    }

    /// Larger of the two per-site recurrence residuals.
    pub fn residuals(&self, j: &JacobiMatrix) -> Vec<f64> {
        let e = self.edge.point();
        site_residuals(j, e, &self.small.values)
            .into_iter()
            .zip(site_residuals(j, e, &self.big.values))
            .map(|(a, b)| a.max(b))
            .collect()
    }
}

fn reflect(j: &JacobiMatrix, edge: Edge) -> Result<JacobiMatrix> {
    match edge {
        Edge::Plus => Ok(j.clone()),
        Edge::Minus => {
            JacobiMatrix::new(j.a_values().to_vec(), j.b_values().iter().map(|b| -b).collect())
        }
    }
}

// Data of the z-system z(k+1) = [J(k) + R(k)] z(k) and the Jordan fundamental
// matrix Y(k) = [[u, v], [0, 1]]; every vector is indexed by k directly.
struct Reduced {
    k0: usize,
    window: usize,
    jk: Vec<Matrix2<f64>>,
    r: Vec<f64>,
    u: Vec<f64>,
    v: Vec<f64>,
    q: Vec<f64>,
    pi: Vec<f64>,
}

impl Reduced {
    fn step(&self, k: usize) -> Matrix2<f64> {
        self.jk[k] + Matrix2::new(0.0, 0.0, self.r[k], 0.0)
    }

    // first column entry of Y(k) Y(l+1)^{-1} acting on (0, 1)
    fn kernel(&self, k: usize, l: usize) -> f64 {
        self.v[k] - self.u[k] * self.v[l + 1] / self.u[l + 1]
    }

    fn support(&self) -> Vec<usize> {
        (self.k0..=self.window).filter(|&l| self.r[l] != 0.0).collect()
    }
}

fn reduce(j: &JacobiMatrix, window: usize) -> Result<Reduced> {
    let s = Matrix2::new(1.0, 0.5, 1.0, -0.5);
    let s_inv = Matrix2::new(0.5, 0.5, 1.0, -1.0);
    let jordan = Matrix2::new(1.0, 1.0, 0.0, 1.0);
    let b: Vec<Matrix2<f64>> = (0..=window)
        .map(|k| {
            if k == 0 {
                return Matrix2::zeros();
            }
            let t = Matrix2::new((2.0 - j.b(k)) / j.a(k), -j.a(k - 1) / j.a(k), 1.0, 0.0);
            s_inv * t * s - jordan
        })
        .collect();
    // q(k) = -sum_{l >= k} B(l)_21; B vanishes past the support
    let mut q = vec![0.0; window + 2];
    for k in (1..=window).rev() {
        q[k] = q[k + 1] - b[k][(1, 0)];
    }
    let qm = |k: usize| Matrix2::new(1.0, 1.0, q[k], 1.0);
    let mut g = vec![Matrix2::zeros(); window + 1];
    let mut k0 = 1;
    for k in 1..=window {
        let det_ok = (1.0 - q[k]).abs() > 1e-8 && (1.0 - q[k + 1]).abs() > 1e-8;
        if det_ok {
            g[k] = qm(k + 1).try_inverse().unwrap() * (jordan + b[k]) * qm(k);
        }
        let small = |x: f64| x.abs() < 1.0;
        if !(det_ok && small(g[k][(0, 0)] - 1.0) && small(g[k][(0, 1)] - 1.0) && small(g[k][(1, 1)] - 1.0)) {
            k0 = k + 1;
        }
    }
    if k0 + 2 > window {
        return Err(Error::Cutoff(format!("edge reduction needs a window longer than {window}")));
    }
    let mut pi = vec![1.0; window + 2];
    for k in k0..=window {
        pi[k + 1] = pi[k] * g[k][(1, 1)];
    }
    let mut jk = vec![Matrix2::zeros(); window + 1];
    let mut r = vec![0.0; window + 1];
    for k in k0..=window {
        jk[k] = Matrix2::new(g[k][(0, 0)], g[k][(0, 1)] * pi[k], 0.0, 1.0);
        r[k] = g[k][(1, 0)] / pi[k + 1];
    }
    let mut u = vec![1.0; window + 2];
    let mut v = vec![0.0; window + 2];
    for k in k0..=window {
        u[k + 1] = jk[k][(0, 0)] * u[k];
        v[k + 1] = jk[k][(0, 0)] * v[k] + jk[k][(0, 1)];
    }
    Ok(Reduced { k0, window, jk, r, u, v, q, pi })
}

fn small_cutoff(red: &Reduced) -> (usize, f64) {
    let nz = red.support();
    let estimate = |k1: usize| {
        (k1..=red.window)
            .map(|k| {
                nz.iter()
                    .filter(|&&l| l >= k)
                    .map(|&l| red.r[l].abs() * red.kernel(k, l).abs().max(1.0))
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    };
    let candidates = std::iter::once(red.k0).chain(nz.iter().map(|l| l + 1));
    candidates
        .map(|k1| (k1, estimate(k1)))
        .find(|(_, e)| *e < 0.5)
        .expect("past the last perturbation the operator vanishes")
}

fn big_cutoff(red: &Reduced) -> (usize, f64) {
    let nz = red.support();
    let estimate = |k1: usize| {
        (k1 + 1..=red.window + 1)
            .map(|k| {
                nz.iter()
                    .filter(|&&l| l >= k1 && l < k)
                    .map(|&l| red.r[l].abs() * l as f64 * red.kernel(k, l).abs().max(1.0))
                    .sum::<f64>()
                    / k as f64
            })
            .fold(0.0, f64::max)
    };
    let candidates = std::iter::once(red.k0).chain(nz.iter().map(|l| l + 1));
    candidates
        .map(|k1| (k1, estimate(k1)))
        .find(|(_, e)| *e < 0.5)
        .expect("past the last perturbation the operator vanishes")
}

// z = y + T z with T the backward (small) or forward (big) Jordan operator
fn fixed_point(red: &Reduced, k1: usize, small: bool, tol: &Tolerances) -> Result<Vec<Vector2<f64>>> {
    let top = red.window + 1;
    let y = |k: usize| {
        if small {
            Vector2::new(red.u[k], 0.0)
        } else {
            Vector2::new(red.v[k], 1.0)
        }
    };
    let mut z: Vec<Vector2<f64>> = (0..=top).map(y).collect();
    for _ in 0..tol.max_iterations {
        let mut next = z.clone();
        let (mut sa, mut sb) = (0.0, 0.0);
        let mut apply = |k: usize, sa: f64, sb: f64, sign: f64| {
            next[k] = y(k) + sign * Vector2::new(red.v[k] * sa - red.u[k] * sb, sa);
        };
        if small {
            for k in (k1..=top).rev() {
                if k <= red.window {
                    sa += red.r[k] * z[k][0];
                    sb += red.r[k] * z[k][0] * red.v[k + 1] / red.u[k + 1];
                }
                apply(k, sa, sb, -1.0);
            }
        } else {
            for k in k1..=top {
                apply(k, sa, sb, 1.0);
                if k <= red.window {
                    sa += red.r[k] * z[k][0];
                    sb += red.r[k] * z[k][0] * red.v[k + 1] / red.u[k + 1];
                }
            }
        }
        let weight = |k: usize| if small { 1.0 } else { k.max(1) as f64 };
        let change = (k1..=top).map(|k| (next[k] - z[k]).amax() / weight(k)).fold(0.0, f64::max);
        let size = (k1..=top).map(|k| next[k].amax() / weight(k)).fold(0.0, f64::max);
        z = next;
        if change <= tol.fixed_point * size {
            for k in (red.k0..k1).rev() {
                z[k] = red.step(k).try_inverse().ok_or_else(|| {
                    Error::Singular(format!("edge transfer matrix singular at k = {k}"))
                })? * z[k + 1];
            }
            return Ok(z);
        }
    }
    Err(Error::NoConvergence(format!(
        "edge fixed point did not settle in {} iterations",
        tol.max_iterations
    )))
}

// psi = top row of S Q(k) P(k) z(k), extended to k = 0 by the recurrence at E = 2
fn undo(j: &JacobiMatrix, red: &Reduced, z: &[Vector2<f64>]) -> Vec<f64> {
    let s = Matrix2::new(1.0, 0.5, 1.0, -0.5);
    let window = red.window;
    let psi_vec = |k: usize| {
        let qk = Matrix2::new(1.0, 1.0, red.q[k], 1.0);
        s * qk * Vector2::new(z[k][0], red.pi[k] * z[k][1])
    };
    let mut psi = vec![0.0; window + 1];
    psi[red.k0 - 1] = psi_vec(red.k0)[1];
    for k in red.k0..=window {
        psi[k] = psi_vec(k)[0];
    }
    for n in (1..red.k0).rev() {
        psi[n - 1] = ((2.0 - j.b(n)) * psi[n] - j.a(n) * psi[n + 1]) / j.a(n - 1);
    }
    psi
}

/// Solutions `psi_s`, `psi_b` of `J psi = E psi` at `E = +-2`.
///
/// At `E = -2` the matrix with `b -> -b` is solved at `+2` and the result is
/// multiplied by `(-1)^k`. At `+2` the recurrence is conjugated by `S` to a
/// Jordan block plus `B(k)`, then by `Q(k) = [[1, 1], [q(k), 1]]` and
/// `P(k) = diag(1, prod (1 + gamma))`; the bounded solution comes from the
/// backward contraction and the growing one from forward Picard iteration.
pub fn edge_solutions(j: &JacobiMatrix, edge: Edge, tol: &Tolerances) -> Result<EdgePair> {
    let jr = reflect(j, edge)?;
    let window = tol.window.max(j.support() + 8);
    let red = reduce(&jr, window)?;
    let (k1_small, contraction_small) = small_cutoff(&red);
    let (k1_big, contraction_big) = big_cutoff(&red);
    let zs = fixed_point(&red, k1_small, true, tol)?;
    let zb = fixed_point(&red, k1_big, false, tol)?;
    let mut small = undo(&jr, &red, &zs);
    let mut big = undo(&jr, &red, &zb);

    let ks = small[window];
    if ks == 0.0 {
        return Err(Error::Singular("bounded edge solution vanishes at the window end".into()));
    }
    small.iter_mut().for_each(|x| *x /= ks);
    let slope = big[window] - big[window - 1];
    let offset = big[window] - slope * window as f64;
    if slope == 0.0 {
        return Err(Error::Singular("growing edge solution has no linear part".into()));
    }
    for (b, s) in big.iter_mut().zip(&small) {
        *b = (*b - offset * s) / slope;
    }
    let sign = edge.sign();
    let orient = |v: Vec<f64>| -> Vec<f64> {
        let mut s = 1.0;
        v.into_iter()
            .map(|x| {
                let out = s * x;
                s *= sign;
                out
            })
            .collect()
    };
    let small_err = small.iter().map(|x| x - 1.0).collect();
    let big_err = big.iter().enumerate().map(|(k, x)| (x - k as f64) / k.max(1) as f64).collect();
    let (small, big) = (orient(small), orient(big));
    let family = |values: Vec<f64>, kind, errors| SolutionFamily {
        energy: edge.point(),
        kind,
        sign_threshold: sign_threshold(&values, sign),
        values,
        beta: None,
        leading_constant: Some(1.0),
        errors,
    };
    Ok(EdgePair {
        edge,
        small: family(small, SolutionKind::EdgeSmall, small_err),
        big: family(big, SolutionKind::EdgeBig, big_err),
        k0: red.k0,
        k1_small,
        k1_big,
        contraction_small,
        contraction_big,
    })
}
