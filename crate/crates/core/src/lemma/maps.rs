use super::{dist2, dot, AuxConfig};
use crate::error::{Error, Result};

/// `det(α I + β u vᵀ)` by the closed form `α^(d-1) (α + β (u, v))` and by
/// elimination, as `(formula, direct)`.
pub fn det_identity(alpha: f64, beta: f64, u: &[f64], v: &[f64]) -> Result<(f64, f64)> {
    let d = u.len();
    if v.len() != d || d == 0 {
        return Err(Error::InvalidArgument("u and v must have the same positive length".into()));
    }
    let formula = alpha.powi(d as i32 - 1) * (alpha + beta * dot(u, v));
    let m: Vec<Vec<f64>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { alpha } else { 0.0 } + beta * u[i] * v[j])
                .collect()
        })
        .collect();
    Ok((formula, determinant(&m)))
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap_or(col);
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

/// `p(x; r) = (r (x + x*) + |x - x*|₂ o) / (|x - x*|₂ + 2r)`.
pub fn p_map(cfg: &AuxConfig) -> Vec<f64> {
    let l = dist2(&cfg.x, &cfg.node);
    let den = l + 2.0 * cfg.r;
    (0..cfg.dim())
        .map(|i| (cfg.r * (cfg.x[i] + cfg.node[i]) + l * cfg.o[i]) / den)
        .collect()
}

/// `φ(x; r, t) = (1 - t) x* + t p(x; r)`.
pub fn phi_map(cfg: &AuxConfig) -> Vec<f64> {
    let p = p_map(cfg);
    cfg.node
        .iter()
        .zip(&p)
        .map(|(n, p)| (1.0 - cfg.t) * n + cfg.t * p)
        .collect()
}

/// `ψ(x; r, t) = t x + (1 - t) p(x; r)`.
pub fn psi_map(cfg: &AuxConfig) -> Vec<f64> {
    let p = p_map(cfg);
    cfg.x
        .iter()
        .zip(&p)
        .map(|(x, p)| cfg.t * x + (1.0 - cfg.t) * p)
        .collect()
}

/// `|x - x*|₂`, `(mo, Δx)` and the vectors `mo = o - m`, `Δx`.
struct Frame {
    l: f64,
    mo: Vec<f64>,
    dx: Vec<f64>,
    s: f64,
}

fn frame(cfg: &AuxConfig) -> Result<Frame> {
    let l = dist2(&cfg.x, &cfg.node);
    if l == 0.0 {
        return Err(Error::Degenerate("x coincides with the node".into()));
    }
    let d = cfg.dim();
    let mo: Vec<f64> = (0..d)
        .map(|i| cfg.o[i] - 0.5 * (cfg.x[i] + cfg.node[i]))
        .collect();
    let dx: Vec<f64> = (0..d).map(|i| (cfg.x[i] - cfg.node[i]) / l).collect();
    let s = dot(&mo, &dx);
    Ok(Frame { l, mo, dx, s })
}

/// `Dp/Dx = r/(2r+L) I + 2r/(2r+L)² mo Δxᵀ` with `L = |x - x*|₂`.
pub fn jacobian_p(cfg: &AuxConfig) -> Result<Vec<Vec<f64>>> {
    let f = frame(cfg)?;
    let den = 2.0 * cfg.r + f.l;
    let a = cfg.r / den;
    let b = 2.0 * cfg.r / (den * den);
    let d = cfg.dim();
    Ok((0..d)
        .map(|i| {
            (0..d)
                .map(|j| if i == j { a } else { 0.0 } + b * f.mo[i] * f.dx[j])
                .collect()
        })
        .collect())
}

/// `det Dφ = t^d r^d / (2r+L)^(d+1) · (2r + L + 2 (mo, Δx))`.
pub fn jacobian_phi(cfg: &AuxConfig) -> Result<f64> {
    let f = frame(cfg)?;
    let d = cfg.dim() as i32;
    let den = 2.0 * cfg.r + f.l;
    Ok(cfg.t.powi(d) * cfg.r.powi(d) / den.powi(d + 1) * (den + 2.0 * f.s))
}

/// `det Dψ = (r(1-t)/(2r+L) + t)^(d-1) · (A (t-1) + 1)` with
/// `A = (2r² + 3rL + L² - 2r (mo, Δx)) / (2r+L)²`.
pub fn jacobian_psi(cfg: &AuxConfig) -> Result<f64> {
    let f = frame(cfg)?;
    let d = cfg.dim() as i32;
    let (r, l, t) = (cfg.r, f.l, cfg.t);
    let den = 2.0 * r + l;
    let a = (2.0 * r * r + 3.0 * r * l + l * l - 2.0 * r * f.s) / (den * den);
    Ok((r * (1.0 - t) / den + t).powi(d - 1) * (a * (t - 1.0) + 1.0))
}

/// Central-difference Jacobian of `f` at `x` with step `1e-5 · max(1, |x|∞)`.
pub fn fd_jacobian(f: impl Fn(&[f64]) -> Vec<f64>, x: &[f64]) -> Vec<Vec<f64>> {
    let d = x.len();
    let h = 1e-5 * x.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut cols = Vec::with_capacity(d);
    let mut xp = x.to_vec();
    for j in 0..d {
        xp[j] = x[j] + h;
        let fp = f(&xp);
        xp[j] = x[j] - h;
        let fm = f(&xp);
        xp[j] = x[j];
        cols.push(
            fp.iter()
                .zip(&fm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect::<Vec<f64>>(),
        );
    }
    let m = cols.first().map_or(0, |c| c.len());
    (0..m).map(|i| (0..d).map(|j| cols[j][i]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(x: Vec<f64>, node: Vec<f64>, r: f64, t: f64) -> AuxConfig {
        AuxConfig {
            o: vec![0.0; x.len()],
            big_r: 1.0,
            r,
            node,
            x,
            t,
        }
    }

    #[test]
    fn det_identity_examples() {
        let (f, d) = det_identity(2.0, 0.0, &[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]).unwrap();
        assert_eq!((f, d), (8.0, 8.0));
        let (f, d) = det_identity(1.0, 1.0, &[1.0, 0.0], &[0.0, 1.0]).unwrap();
        assert_eq!((f, d), (1.0, 1.0));
        let (f, d) = det_identity(2.0, 3.0, &[1.0, 2.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(f, 44.0);
        assert!((d - 44.0).abs() < 1e-12);
    }

    #[test]
    fn p_map_examples() {
        let c = cfg(vec![3.0, -1.0], vec![3.0, -1.0], 0.5, 1.0);
        assert_eq!(p_map(&c), vec![3.0, -1.0]);
        assert_eq!(p_map(&cfg(vec![2.0, 0.0], vec![-2.0, 0.0], 1.0, 1.0)), vec![0.0, 0.0]);
        let p = p_map(&cfg(vec![4.0, 0.0], vec![0.0, 4.0], 1.0, 1.0));
        let want = 4.0 / (2.0 + 4.0 * 2f64.sqrt());
        assert!((p[0] - want).abs() < 1e-15 && (p[1] - want).abs() < 1e-15);
        assert!((want - 0.522_407_749_927_482_8).abs() < 1e-15);
    }

    #[test]
    fn symmetric_collinear_jacobians() {
        let c = cfg(vec![4.0, 0.0], vec![-4.0, 0.0], 1.0, 1.0);
        let j = jacobian_p(&c).unwrap();
        assert!((j[0][0] - 0.1).abs() < 1e-16 && (j[1][1] - 0.1).abs() < 1e-16);
        assert_eq!((j[0][1], j[1][0]), (0.0, 0.0));
        assert!((jacobian_phi(&c).unwrap() - 0.01).abs() < 1e-16);
        assert_eq!(jacobian_phi(&cfg(vec![4.0, 0.0], vec![-4.0, 0.0], 1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(jacobian_psi(&c).unwrap(), 1.0);
        assert!(jacobian_p(&cfg(vec![1.0, 1.0], vec![1.0, 1.0], 1.0, 1.0)).is_err());
    }

    #[test]
    fn determinant_of_permutation() {
        let m = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(determinant(&m), -1.0);
    }
}
