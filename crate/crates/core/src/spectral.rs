//! Jacobians of meridional fields, their invariants and eigenvalues, and
//! location of degenerate and critical points in the meridian half-plane.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::fields::{MeridionalField, RadialData, RHO_MIN};
use crate::quaternion::Quaternion;

/// Symmetric 4x4 matrix `J_lm = dV_l / dx_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jacobian4 {
    pub entries: [[f64; 4]; 4],
}

impl Jacobian4 {
    pub fn new(entries: [[f64; 4]; 4]) -> Self {
        Self { entries }
    }

    pub fn diag(d: [f64; 4]) -> Self {
        let mut e = [[0.0; 4]; 4];
        for i in 0..4 {
            e[i][i] = d[i];
        }
        Self { entries: e }
    }

    pub fn zero() -> Self {
        Self { entries: [[0.0; 4]; 4] }
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.entries.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.entries[i][i]).sum()
    }

    pub fn asymmetry(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..4 {
            for j in 0..i {
                m = m.max((self.entries[i][j] - self.entries[j][i]).abs());
            }
        }
        m
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.asymmetry() <= tol
    }

    /// Determinant by cofactor expansion along the first row.
    pub fn det(&self) -> f64 {
        let m = &self.entries;
        let minor = |c: usize| {
            let cols: Vec<usize> = (0..4).filter(|&k| k != c).collect();
            let a = |r: usize, k: usize| m[r][cols[k]];
            a(1, 0) * (a(2, 1) * a(3, 2) - a(2, 2) * a(3, 1)) - a(1, 1) * (a(2, 0) * a(3, 2) - a(2, 2) * a(3, 0))
                + a(1, 2) * (a(2, 0) * a(3, 1) - a(2, 1) * a(3, 0))
        };
        (0..4)
            .map(|c| if c % 2 == 0 { m[0][c] * minor(c) } else { -m[0][c] * minor(c) })
            .sum()
    }
}

impl fmt::Display for Jacobian4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.entries {
            writeln!(f, "[{:>12.6} {:>12.6} {:>12.6} {:>12.6}]", row[0], row[1], row[2], row[3])?;
        }
        Ok(())
    }
}

/// The Jacobian of the lifted field at `x`. The top-left entry is
/// `-dVrho/drho + (alpha - 2) Vrho/rho`, as the meridian system dictates.
pub fn jacobian(f: &MeridionalField, x: Quaternion) -> Result<Jacobian4> {
    let rho = x.rho();
    if rho < RHO_MIN {
        return Err(Error::OnAxis { rho });
    }
    let d = f.radial_data(x.x0, rho)?;
    Ok(jacobian_from_data(f.alpha(), &d, x))
}

pub fn jacobian_from_data(alpha: f64, d: &RadialData, x: Quaternion) -> Jacobian4 {
    let rho = x.rho();
    let v = d.vrho / rho;
    let xs = [x.x1, x.x2, x.x3];
    let mut e = [[0.0; 4]; 4];
    e[0][0] = -d.dvrho_drho + (alpha - 2.0) * v;
    for m in 0..3 {
        e[0][m + 1] = d.dvrho_dx0 * xs[m] / rho;
        e[m + 1][0] = e[0][m + 1];
        for n in 0..3 {
            let t = xs[m] * xs[n] / (rho * rho);
            e[m + 1][n + 1] = if m == n {
                d.dvrho_drho * t + v * (1.0 - t)
            } else {
                (d.dvrho_drho - v) * t
            };
        }
    }
    Jacobian4 { entries: e }
}

/// Principal invariants `(I, II, III, IV)` of a symmetric matrix, the
/// coefficients of `l^4 - I l^3 + II l^2 - III l + IV`.
pub fn invariants(j: &Jacobian4) -> [f64; 4] {
    let m = &j.entries;
    let d = |i: usize| m[i][i];
    let o = |i: usize, k: usize| m[i][k];

    let i1 = d(0) + d(1) + d(2) + d(3);

    let mut i2 = 0.0;
    for a in 0..4 {
        for b in a + 1..4 {
            i2 += d(a) * d(b) - o(a, b) * o(a, b);
        }
    }

    let i3 = d(0) * d(1) * d(2) + d(0) * d(1) * d(3) + d(0) * d(2) * d(3) + d(1) * d(2) * d(3)
        + 2.0 * o(0, 1) * o(0, 2) * o(1, 2)
        + 2.0 * o(0, 1) * o(0, 3) * o(1, 3)
        + 2.0 * o(0, 2) * o(0, 3) * o(2, 3)
        + 2.0 * o(1, 2) * o(1, 3) * o(2, 3)
        - d(0) * (o(1, 2).powi(2) + o(1, 3).powi(2) + o(2, 3).powi(2))
        - d(1) * (o(0, 2).powi(2) + o(0, 3).powi(2) + o(2, 3).powi(2))
        - d(2) * (o(0, 1).powi(2) + o(0, 3).powi(2) + o(1, 3).powi(2))
        - d(3) * (o(0, 1).powi(2) + o(0, 2).powi(2) + o(1, 2).powi(2));

    let i4 = d(0) * d(1) * d(2) * d(3)
        + 2.0 * d(0) * o(1, 2) * o(1, 3) * o(2, 3)
        + 2.0 * o(0, 1) * o(0, 2) * o(1, 2) * d(3)
        + 2.0 * o(0, 2) * o(0, 3) * o(2, 3) * d(1)
        + (o(0, 1) * o(2, 3)).powi(2)
        + 2.0 * o(0, 1) * o(0, 3) * o(1, 3) * d(2)
        + (o(0, 2) * o(1, 3)).powi(2)
        + (o(0, 3) * o(1, 2)).powi(2)
        - 2.0 * o(0, 1) * o(0, 3) * o(1, 2) * o(2, 3)
        - 2.0 * o(0, 1) * o(0, 2) * o(1, 3) * o(2, 3)
        - 2.0 * o(0, 2) * o(0, 3) * o(1, 2) * o(1, 3)
        - d(0) * d(1) * o(2, 3).powi(2)
        - d(0) * d(2) * o(1, 3).powi(2)
        - d(0) * d(3) * o(1, 2).powi(2)
        - d(1) * d(2) * o(0, 3).powi(2)
        - d(1) * d(3) * o(0, 2).powi(2)
        - d(2) * d(3) * o(0, 1).powi(2);

    [i1, i2, i3, i4]
}

/// Elementary symmetric polynomials of four numbers.
pub fn vieta(l: [f64; 4]) -> [f64; 4] {
    let mut e = [0.0; 4];
    e[0] = l.iter().sum();
    for a in 0..4 {
        for b in a + 1..4 {
            e[1] += l[a] * l[b];
            for c in b + 1..4 {
                e[2] += l[a] * l[b] * l[c];
            }
        }
    }
    e[3] = l.iter().product();
    e
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    JacobiNumeric,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ClosedForm => "closed_form",
            Method::JacobiNumeric => "jacobi_numeric",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralReport {
    /// Ascending.
    pub lambdas: [f64; 4],
    pub invariants: [f64; 4],
    pub degenerate: bool,
    pub method: Method,
    /// How many of the eigenvalues equal `Vrho/rho` within the degeneracy
    /// tolerance; 2 generically. Zero for numeric reports.
    pub pair_multiplicity: usize,
}

fn degeneracy_tol(j: &Jacobian4) -> f64 {
    1e-9 * j.norm().max(1.0)
}

fn sorted(mut l: [f64; 4]) -> [f64; 4] {
    l.sort_by(|a, b| a.total_cmp(b));
    l
}

/// Closed-form roots `(v, v, l+, l-)` with `v = Vrho/rho` and
/// `l+- = (alpha-2)/2 v +- sqrt(((alpha-2)/2 v - dVrho/drho)^2 + (dVrho/dx0)^2)`.
pub fn closed_form_lambdas(alpha: f64, d: &RadialData, rho: f64) -> [f64; 4] {
    let v = d.vrho / rho;
    let c = (alpha - 2.0) / 2.0 * v;
    let r = (c - d.dvrho_drho).hypot(d.dvrho_dx0);
    [v, v, c + r, c - r]
}

/// `alpha = -2`: `l+- = -2v +- sqrt((2v + dVrho/drho)^2 + (dVrho/dx0)^2)`.
pub fn lambdas_alpha_minus_two(d: &RadialData, rho: f64) -> [f64; 4] {
    let v = d.vrho / rho;
    let r = (2.0 * v + d.dvrho_drho).hypot(d.dvrho_dx0);
    [v, v, -2.0 * v + r, -2.0 * v - r]
}

/// `alpha = 0`: `l+- = -v +- sqrt((v + dVrho/drho)^2 + (dVrho/dx0)^2)`.
pub fn lambdas_alpha_zero(d: &RadialData, rho: f64) -> [f64; 4] {
    let v = d.vrho / rho;
    let r = (v + d.dvrho_drho).hypot(d.dvrho_dx0);
    [v, v, -v + r, -v - r]
}

/// `alpha = 2`: `l+- = +- |F'|` with `|F'| = sqrt(dVrho/drho^2 + dVrho/dx0^2)`.
pub fn lambdas_alpha_two(d: &RadialData, rho: f64) -> [f64; 4] {
    let v = d.vrho / rho;
    let r = d.dvrho_drho.hypot(d.dvrho_dx0);
    [v, v, r, -r]
}

pub fn eigen_closed(f: &MeridionalField, x: Quaternion) -> Result<SpectralReport> {
    let rho = x.rho();
    if rho < RHO_MIN {
        return Err(Error::OnAxis { rho });
    }
    let d = f.radial_data(x.x0, rho)?;
    let j = jacobian_from_data(f.alpha(), &d, x);
    let raw = closed_form_lambdas(f.alpha(), &d, rho);
    let tol = degeneracy_tol(&j);
    let v = raw[0];
    let pair_multiplicity = 2 + raw[2..].iter().filter(|l| (*l - v).abs() <= tol).count();
    let lambdas = sorted(raw);
    Ok(SpectralReport {
        lambdas,
        invariants: invariants(&j),
        degenerate: lambdas.iter().any(|l| l.abs() <= tol),
        method: Method::ClosedForm,
        pair_multiplicity,
    })
}

/// Cyclic Jacobi rotations to off-diagonal norm `<= 1e-13 |J|`.
pub fn eigen_numeric(j: &Jacobian4) -> Result<SpectralReport> {
    let scale = j.norm().max(1.0);
    let asym = j.asymmetry();
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric { asym });
    }
    let mut a = j.entries;
    let off = |a: &[[f64; 4]; 4]| {
        let mut s = 0.0;
        for p in 0..4 {
            for q in 0..4 {
                if p != q {
                    s += a[p][q] * a[p][q];
                }
            }
        }
        s.sqrt()
    };
    let target = 1e-13 * j.norm();
    for _sweep in 0..100 {
        if off(&a) <= target {
            break;
        }
        for p in 0..4 {
            for q in p + 1..4 {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..4 {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..4 {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let lambdas = sorted([a[0][0], a[1][1], a[2][2], a[3][3]]);
    let tol = degeneracy_tol(j);
    Ok(SpectralReport {
        lambdas,
        invariants: invariants(j),
        degenerate: lambdas.iter().any(|l| l.abs() <= tol),
        method: Method::JacobiNumeric,
        pair_multiplicity: 0,
    })
}

/// Axis-aligned rectangle in the meridian half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x0_min: f64,
    pub x0_max: f64,
    pub rho_min: f64,
    pub rho_max: f64,
}

impl Window {
    pub fn new(x0: (f64, f64), rho: (f64, f64)) -> Self {
        Self {
            x0_min: x0.0,
            x0_max: x0.1,
            rho_min: rho.0,
            rho_max: rho.1,
        }
    }

    fn validate(&self, grid: (usize, usize)) -> Result<()> {
        let ok = self.x0_max > self.x0_min
            && self.rho_max > self.rho_min
            && self.rho_min >= RHO_MIN
            && [self.x0_min, self.x0_max, self.rho_min, self.rho_max].iter().all(|v| v.is_finite())
            && grid.0 >= 2
            && grid.1 >= 2;
        if ok {
            Ok(())
        } else {
            Err(Error::EmptyWindow)
        }
    }

    /// Grid node `(i, k)` of an `n x m` lattice.
    fn node(&self, grid: (usize, usize), i: usize, k: usize) -> (f64, f64) {
        let x0 = self.x0_min + (self.x0_max - self.x0_min) * i as f64 / (grid.0 - 1) as f64;
        let rho = self.rho_min + (self.rho_max - self.rho_min) * k as f64 / (grid.1 - 1) as f64;
        (x0, rho)
    }

    pub fn contains(&self, x0: f64, rho: f64) -> bool {
        (self.x0_min..=self.x0_max).contains(&x0) && (self.rho_min..=self.rho_max).contains(&rho)
    }
}

/// Which degeneracy condition a level curve solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DegenerateEquation {
    /// `Vrho = 0`
    E1,
    /// `(dVrho/dx0)^2 + (dVrho/drho)^2 - (alpha-2)(Vrho/rho)(dVrho/drho) = 0`
    E2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelChain {
    pub equation: DegenerateEquation,
    /// `(x0, rho)` points in traversal order.
    pub points: Vec<(f64, f64)>,
}

pub fn e1(d: &RadialData) -> f64 {
    d.vrho
}

pub fn e2(alpha: f64, d: &RadialData, rho: f64) -> f64 {
    d.dvrho_dx0.powi(2) + d.dvrho_drho.powi(2) - (alpha - 2.0) * (d.vrho / rho) * d.dvrho_drho
}

const BISECT_TOL: f64 = 1e-10;

fn bisect(e: &dyn Fn(f64, f64) -> Result<f64>, a: (f64, f64), fa: f64, b: (f64, f64), fb: f64) -> Result<(f64, f64)> {
    let (mut a, mut b, mut fa) = (a, b, fa);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    for _ in 0..200 {
        let m = (0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
        let fm = e(m.0, m.1)?;
        if fm.abs() <= BISECT_TOL || (a.0 - b.0).abs().max((a.1 - b.1).abs()) < 1e-15 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok((0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1)))
}

/// Edge identifier: horizontal edges `(0, i, k)` join nodes `(i,k)-(i+1,k)`,
/// vertical edges `(1, i, k)` join `(i,k)-(i,k+1)`.
type EdgeId = (u8, usize, usize);

/// Zero level set of `e` on the window by marching squares with bisection
/// along crossed cell edges. Zeros where `e` touches 0 without changing sign
/// are not detected.
pub fn level_set(
    e: &dyn Fn(f64, f64) -> Result<f64>,
    window: Window,
    grid: (usize, usize),
) -> Result<Vec<Vec<(f64, f64)>>> {
    window.validate(grid)?;
    let (n, m) = grid;
    let mut vals = vec![vec![0.0; m]; n];
    for (i, row) in vals.iter_mut().enumerate() {
        for (k, v) in row.iter_mut().enumerate() {
            let (x0, rho) = window.node(grid, i, k);
            *v = e(x0, rho)?;
        }
    }
    let neg = |v: f64| v < 0.0;

    let mut crossings: HashMap<EdgeId, (f64, f64)> = HashMap::new();
    let mut crossing = |id: EdgeId| -> Result<Option<(f64, f64)>> {
        if let Some(p) = crossings.get(&id) {
            return Ok(Some(*p));
        }
        let (i, k) = (id.1, id.2);
        let (i2, k2) = if id.0 == 0 { (i + 1, k) } else { (i, k + 1) };
        let (fa, fb) = (vals[i][k], vals[i2][k2]);
        if neg(fa) == neg(fb) {
            return Ok(None);
        }
        let p = bisect(e, window.node(grid, i, k), fa, window.node(grid, i2, k2), fb)?;
        crossings.insert(id, p);
        Ok(Some(p))
    };

    let mut segments: Vec<(EdgeId, EdgeId)> = Vec::new();
    for i in 0..n - 1 {
        for k in 0..m - 1 {
            // counter-clockwise: bottom, right, top, left
            let edges = [(0u8, i, k), (1u8, i + 1, k), (0u8, i, k + 1), (1u8, i, k)];
            let mut hit = Vec::with_capacity(4);
            for id in edges {
                if crossing(id)?.is_some() {
                    hit.push(id);
                }
            }
            match hit.len() {
                2 => segments.push((hit[0], hit[1])),
                4 => {
                    let (x0, rho) = window.node(grid, i, k);
                    let (x1, rho1) = window.node(grid, i + 1, k + 1);
                    let centre = e(0.5 * (x0 + x1), 0.5 * (rho + rho1))?;
                    if neg(centre) == neg(vals[i][k]) {
                        segments.push((hit[0], hit[1]));
                        segments.push((hit[2], hit[3]));
                    } else {
                        segments.push((hit[0], hit[3]));
                        segments.push((hit[1], hit[2]));
                    }
                }
                _ => {}
            }
        }
    }

    let mut adjacency: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (s, (a, b)) in segments.iter().enumerate() {
        adjacency.entry(*a).or_default().push(s);
        adjacency.entry(*b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();
    // Open chains start at crossings with a single segment; closed loops follow.
    let mut starts: Vec<usize> = (0..segments.len())
        .filter(|&s| adjacency[&segments[s].0].len() == 1 || adjacency[&segments[s].1].len() == 1)
        .collect();
    starts.extend(0..segments.len());
    for s0 in starts {
        if used[s0] {
            continue;
        }
        let (a, b) = segments[s0];
        let (mut tail, mut head) = if adjacency[&b].len() == 1 { (b, a) } else { (a, b) };
        used[s0] = true;
        let mut ids = vec![tail, head];
        loop {
            let next = adjacency[&head].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (p, q) = segments[s];
            tail = head;
            head = if p == tail { q } else { p };
            ids.push(head);
        }
        let _ = tail;
        chains.push(ids.iter().map(|id| crossings[id]).collect());
    }
    Ok(chains)
}

/// Degenerate points: zero sets of `E1` and `E2`, tagged per equation.
/// For `alpha = -2` and `alpha = 0` the specialized conditions coincide with
/// the general `E2`.
pub fn degenerate_set(f: &MeridionalField, window: Window, grid: (usize, usize)) -> Result<Vec<LevelChain>> {
    let alpha = f.alpha();
    let mut out = Vec::new();
    for (eq, chains) in [
        (DegenerateEquation::E1, level_set(&|x0, rho| Ok(e1(&f.radial_data(x0, rho)?)), window, grid)?),
        (
            DegenerateEquation::E2,
            level_set(&|x0, rho| Ok(e2(alpha, &f.radial_data(x0, rho)?, rho)), window, grid)?,
        ),
    ] {
        out.extend(chains.into_iter().map(|points| LevelChain { equation: eq, points }));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceZero {
    pub x0: f64,
    pub rho: f64,
    pub det: f64,
    pub jacobian_norm: f64,
    /// `|det J| <= 1e-8 |J|^4`.
    pub verified: bool,
}

/// Zeros of `div V = alpha Vrho / rho`, each with the determinant check that
/// marks it as a degenerate point.
pub fn zero_divergence_scan(f: &MeridionalField, window: Window, grid: (usize, usize)) -> Result<Vec<DivergenceZero>> {
    if f.alpha() == 0.0 {
        return Err(Error::AlphaZero);
    }
    let chains = level_set(&|x0, rho| f.vrho(x0, rho), window, grid)?;
    let mut out = Vec::new();
    for (x0, rho) in chains.into_iter().flatten() {
        let j = jacobian(f, Quaternion::new(x0, rho, 0.0, 0.0))?;
        let (det, norm) = (j.det(), j.norm());
        out.push(DivergenceZero {
            x0,
            rho,
            det,
            jacobian_norm: norm,
            verified: det.abs() <= 1e-8 * norm.powi(4).max(f64::MIN_POSITIVE) || det == 0.0,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub x0: f64,
    pub rho: f64,
    pub report: SpectralReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalScan {
    pub points: Vec<CriticalPoint>,
    /// Seeds whose Newton iteration diverged, stalled or left the window.
    pub failed_seeds: usize,
}

fn newton(f: &MeridionalField, window: &Window, mut x0: f64, mut rho: f64) -> Option<(f64, f64)> {
    for _ in 0..60 {
        let j = f.jet(x0, rho).ok()?;
        let (a, b) = (j.g_x0, j.g_rho);
        let scale = 1.0 + j.g_x0x0.abs() + j.g_x0rho.abs() + j.g_rhorho.abs();
        if a.hypot(b) <= 1e-13 * scale {
            return Some((x0, rho));
        }
        let det = j.g_x0x0 * j.g_rhorho - j.g_x0rho * j.g_x0rho;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let dx = (a * j.g_rhorho - b * j.g_x0rho) / det;
        let dr = (j.g_x0x0 * b - j.g_x0rho * a) / det;
        x0 -= dx;
        rho -= dr;
        if !window.contains(x0, rho) {
            return None;
        }
        if dx.abs().max(dr.abs()) <= 1e-14 * (1.0 + x0.abs().max(rho)) {
            let j = f.jet(x0, rho).ok()?;
            return (j.g_x0.hypot(j.g_rho) <= 1e-9 * scale).then_some((x0, rho));
        }
    }
    None
}

/// Critical points `V0 = Vrho = 0` by Newton iteration from every grid node.
pub fn critical_points(f: &MeridionalField, window: Window, grid: (usize, usize)) -> Result<CriticalScan> {
    window.validate(grid)?;
    let mut points: Vec<CriticalPoint> = Vec::new();
    let mut failed_seeds = 0;
    for i in 0..grid.0 {
        for k in 0..grid.1 {
            let (x0, rho) = window.node(grid, i, k);
            match newton(f, &window, x0, rho) {
                Some((x0, rho)) => {
                    if points.iter().any(|p| (p.x0 - x0).abs() <= 1e-8 && (p.rho - rho).abs() <= 1e-8) {
                        continue;
                    }
                    let report = eigen_closed(f, Quaternion::new(x0, rho, 0.0, 0.0))?;
                    points.push(CriticalPoint { x0, rho, report });
                }
                None => failed_seeds += 1,
            }
        }
    }
    points.sort_by(|a, b| a.x0.total_cmp(&b.x0).then(a.rho.total_cmp(&b.rho)));
    Ok(CriticalScan { points, failed_seeds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{from_holomorphic_potential, from_separable, Jet, SeparableParams};
    use crate::holomorphic::{moebius_potential, MoebiusRealCoeffs, RadialFunction};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn example_41(d: f64) -> MeridionalField {
        from_holomorphic_potential(&moebius_potential(MoebiusRealCoeffs::unit_c(0.0, d)).unwrap()).unwrap()
    }

    /// `g = x0^2 - rho^2/3`, harmonic for `alpha = 0`.
    fn quadratic_saddle() -> MeridionalField {
        MeridionalField::custom("x0^2 - rho^2/3", 0.0, |x0, rho| {
            Ok(Jet {
                g: x0 * x0 - rho * rho / 3.0,
                g_x0: 2.0 * x0,
                g_rho: -2.0 * rho / 3.0,
                g_x0x0: 2.0,
                g_x0rho: 0.0,
                g_rhorho: -2.0 / 3.0,
            })
        })
    }

    fn uniform() -> MeridionalField {
        from_holomorphic_potential(&RadialFunction::qpow(1)).unwrap()
    }

    fn close(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn jacobian_examples() {
        assert_eq!(jacobian(&uniform(), Quaternion::new(0.3, 1.0, 2.0, -1.0)).unwrap(), Jacobian4::zero());

        let j = jacobian(&example_41(0.0), Quaternion::new(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert!(j.entries[0][0].abs() < 1e-15);
        assert!((j.entries[0][1] - 0.5).abs() < 1e-15);

        let half_sq = from_holomorphic_potential(&RadialFunction::qpow(2).scaled(0.5)).unwrap();
        let j = jacobian(&half_sq, Quaternion::new(0.0, 0.0, 3.0, 4.0)).unwrap();
        let expect = Jacobian4::diag([1.0, -1.0, -1.0, -1.0]);
        assert!(j.entries.iter().flatten().zip(expect.entries.iter().flatten()).all(|(a, b)| (a - b).abs() < 1e-14));
        assert!((j.trace() + 2.0).abs() < 1e-14);

        assert!(matches!(jacobian(&half_sq, Quaternion::real(1.0)), Err(Error::OnAxis { .. })));
    }

    #[test]
    fn matrix_34_entries() {
        // Moebius field with general d: J00 = ((x0+d)^2 - rho^2) / ((x0+d)^2 + rho^2)^2
        let d = 0.4;
        let f = example_41(d);
        let x = Quaternion::new(0.3, 0.5, -0.2, 0.6);
        let (s, rho) = (x.x0 + d, x.rho());
        let r2 = s * s + rho * rho;
        let j = jacobian(&f, x).unwrap();
        assert!((j.entries[0][0] - (s * s - rho * rho) / (r2 * r2)).abs() < 1e-14);
        for m in 1..4 {
            let xm = x.to_array()[m];
            assert!((j.entries[0][m] - 2.0 * s * xm / (r2 * r2)).abs() < 1e-14);
        }
    }

    #[test]
    fn invariants_examples() {
        assert_eq!(invariants(&Jacobian4::diag([1.0, 2.0, 3.0, 4.0])), [10.0, 35.0, 50.0, 24.0]);
        assert_eq!(invariants(&Jacobian4::zero()), [0.0; 4]);
    }

    fn random_symmetric(rng: &mut ChaCha8Rng) -> Jacobian4 {
        let mut e = [[0.0; 4]; 4];
        for i in 0..4 {
            for k in i..4 {
                e[i][k] = rng.gen_range(-3.0..3.0);
                e[k][i] = e[i][k];
            }
        }
        Jacobian4::new(e)
    }

    #[test]
    fn invariants_match_vieta_of_numeric_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let j = random_symmetric(&mut rng);
            let num = eigen_numeric(&j).unwrap();
            let v = vieta(num.lambdas);
            let inv = invariants(&j);
            assert!(close(inv, v, 1e-9 * 100.0), "{inv:?} vs {v:?}");
            assert!((inv[3] - j.det()).abs() < 1e-9);
        }
    }

    #[test]
    fn eigen_closed_examples() {
        let r = eigen_closed(&example_41(0.0), Quaternion::new(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert!(close(r.lambdas, [-0.5, -0.5, -0.5, 0.5], 1e-14));
        assert_eq!(r.pair_multiplicity, 3);

        let r = eigen_closed(&quadratic_saddle(), Quaternion::new(0.7, 0.2, 0.5, -1.0)).unwrap();
        assert!(close(r.lambdas, [-2.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0, 2.0], 1e-14));
        assert!(!r.degenerate);

        let r = eigen_closed(&uniform(), Quaternion::new(0.0, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(r.lambdas, [0.0; 4]);
        assert!(r.degenerate);
    }

    #[test]
    fn eigen_numeric_examples() {
        let r = eigen_numeric(&Jacobian4::diag([4.0, 3.0, 2.0, 1.0])).unwrap();
        assert_eq!(r.lambdas, [1.0, 2.0, 3.0, 4.0]);
        let j = jacobian(&example_41(0.0), Quaternion::new(1.0, 1.0, 0.0, 0.0)).unwrap();
        assert!(close(eigen_numeric(&j).unwrap().lambdas, [-0.5, -0.5, -0.5, 0.5], 1e-13));
        let mut bad = Jacobian4::zero();
        bad.entries[0][1] = 1.0;
        assert!(matches!(eigen_numeric(&bad), Err(Error::NotSymmetric { .. })));
    }

    fn sample_field(rng: &mut ChaCha8Rng) -> MeridionalField {
        let alphas = [-2.0, -1.0, 0.0, 1.0, 2.0, 3.0];
        let alpha = alphas[rng.gen_range(0..alphas.len())];
        if alpha == 2.0 && rng.gen_bool(0.5) {
            let g = match rng.gen_range(0..4) {
                0 => RadialFunction::qexp(),
                1 => RadialFunction::qsin(),
                2 => RadialFunction::qpow(3),
                _ => moebius_potential(MoebiusRealCoeffs::unit_c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .unwrap(),
            };
            return from_holomorphic_potential(&g).unwrap();
        }
        let p = SeparableParams::new(
            alpha,
            rng.gen_range(0.3..2.0),
            (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            (1.0, 0.0),
        );
        from_separable(p).unwrap()
    }

    #[test]
    fn closed_form_matches_numeric_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..1000 {
            let f = sample_field(&mut rng);
            let x = Quaternion::new(
                rng.gen_range(-1.5..1.5),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            if x.rho() < 0.3 {
                continue;
            }
            let c = eigen_closed(&f, x).unwrap();
            let n = eigen_numeric(&jacobian(&f, x).unwrap()).unwrap();
            let scale = 1.0f64.max(c.lambdas.iter().fold(0.0, |m, l| m.max(l.abs())));
            assert!(close(c.lambdas, n.lambdas, 1e-9 * scale), "{}: {:?} vs {:?}", f.name(), c.lambdas, n.lambdas);
            let v = vieta(c.lambdas);
            for k in 0..4 {
                let s = 1.0f64.max(scale.powi(k as i32 + 1));
                assert!((v[k] - c.invariants[k]).abs() <= 1e-8 * s);
            }
            let rho = x.rho();
            let d = f.radial_data(x.x0, rho).unwrap();
            assert!((c.invariants[0] - f.alpha() * d.vrho / rho).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn specializations_agree_with_general_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let d = RadialData {
                vrho: rng.gen_range(-3.0..3.0),
                dvrho_dx0: rng.gen_range(-3.0..3.0),
                dvrho_drho: rng.gen_range(-3.0..3.0),
            };
            let rho = rng.gen_range(0.1..3.0);
            let tol = 1e-12 * (1.0 + d.vrho.abs() / rho + d.dvrho_dx0.abs() + d.dvrho_drho.abs());
            assert!(close(closed_form_lambdas(-2.0, &d, rho), lambdas_alpha_minus_two(&d, rho), tol));
            assert!(close(closed_form_lambdas(0.0, &d, rho), lambdas_alpha_zero(&d, rho), tol));
            assert!(close(closed_form_lambdas(2.0, &d, rho), lambdas_alpha_two(&d, rho), tol));
        }
    }

    #[test]
    fn alpha_two_pair_is_modulus_of_second_derivative() {
        // for G with G' = F: lambda_{2,3} = +-|F'| = +-|G''|
        for g in [RadialFunction::qexp(), RadialFunction::qcos(), RadialFunction::qpow(4)] {
            let f = from_holomorphic_potential(&g).unwrap();
            let g2 = g.derivative().unwrap().derivative().unwrap();
            for (x0, rho) in [(0.3, 0.8), (-1.0, 1.7)] {
                let r = eigen_closed(&f, Quaternion::new(x0, 0.0, rho, 0.0)).unwrap();
                let m = g2.eval_meridian(x0, rho).unwrap().norm();
                assert!((r.lambdas[3].max(-r.lambdas[0]) - m).abs() < 1e-10 * m.max(1.0));
                let d = f.radial_data(x0, rho).unwrap();
                let l = lambdas_alpha_two(&d, rho);
                assert!((l[2] - m).abs() < 1e-10 * m.max(1.0));
            }
        }
    }

    proptest! {
        #[test]
        fn closed_form_roots_are_real(
            alpha in -4.0f64..4.0,
            vrho in -10.0f64..10.0,
            dx in -10.0f64..10.0,
            dr in -10.0f64..10.0,
            rho in 0.01f64..5.0,
        ) {
            let l = closed_form_lambdas(alpha, &RadialData { vrho, dvrho_dx0: dx, dvrho_drho: dr }, rho);
            prop_assert!(l.iter().all(|v| v.is_finite()));
        }

        #[test]
        fn jacobian_is_symmetric_with_trace_identity(
            alpha in -3.0f64..3.0,
            vrho in -5.0f64..5.0,
            dx in -5.0f64..5.0,
            dr in -5.0f64..5.0,
            x in prop::array::uniform4(-2.0f64..2.0),
        ) {
            let q = Quaternion::from_array(x);
            prop_assume!(q.rho() > 0.1);
            let j = jacobian_from_data(alpha, &RadialData { vrho, dvrho_dx0: dx, dvrho_drho: dr }, q);
            prop_assert!(j.is_symmetric(1e-12));
            let t = alpha * vrho / q.rho();
            prop_assert!((j.trace() - t).abs() <= 1e-10 * (1.0 + t.abs()));
        }
    }

    #[test]
    fn degenerate_set_examples() {
        let w = Window::new((-2.0, 2.0), (0.1, 3.0));
        assert!(degenerate_set(&example_41(0.0), w, (41, 30)).unwrap().is_empty());
        let half_sq = from_holomorphic_potential(&RadialFunction::qpow(2).scaled(0.5)).unwrap();
        assert!(degenerate_set(&half_sq, w, (21, 21)).unwrap().is_empty());
        assert!(degenerate_set(&quadratic_saddle(), w, (21, 21)).unwrap().is_empty());
        assert!(matches!(
            degenerate_set(&half_sq, Window::new((0.0, 1.0), (0.0, 1.0)), (5, 5)),
            Err(Error::EmptyWindow)
        ));
    }

    #[test]
    fn degenerate_chain_follows_a_known_curve() {
        // alpha = 2, g = c e^{x0} sin(rho): Vrho = 0 on rho = pi/2, E2 = 2 c^2 e^{2x0} > 0
        let f = from_separable(SeparableParams::new(2.0, 1.0, (1.0, 1.0), (1.0, 0.0))).unwrap();
        let chains = degenerate_set(&f, Window::new((-1.0, 1.0), (0.5, 3.0)), (21, 25)).unwrap();
        assert_eq!(chains.len(), 1);
        assert_eq!(chains[0].equation, DegenerateEquation::E1);
        assert!(chains[0].points.len() >= 20);
        for (_, rho) in &chains[0].points {
            assert!((rho - FRAC_PI_2).abs() < 1e-9);
        }
    }

    #[test]
    fn level_set_closes_loops() {
        let circle = |x: f64, y: f64| Ok((x - 0.5).powi(2) + (y - 1.0).powi(2) - 0.25);
        let chains = level_set(&circle, Window::new((-0.5, 1.5), (0.1, 2.0)), (30, 30)).unwrap();
        assert_eq!(chains.len(), 1);
        let c = &chains[0];
        assert_eq!(c.first(), c.last());
        for (x, y) in c {
            assert!((((x - 0.5).powi(2) + (y - 1.0).powi(2)).sqrt() - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_divergence_examples() {
        let f = from_separable(SeparableParams::new(2.0, 1.0, (1.0, 1.0), (1.0, 0.0))).unwrap();
        let zs = zero_divergence_scan(&f, Window::new((-1.0, 1.0), (0.5, 5.0)), (11, 40)).unwrap();
        assert!(!zs.is_empty());
        for z in &zs {
            assert!(z.verified);
            assert!((z.rho - FRAC_PI_2).abs() < 1e-9 || (z.rho - 1.5 * PI).abs() < 1e-9, "{}", z.rho);
        }

        let half_sq = from_holomorphic_potential(&RadialFunction::qpow(2).scaled(0.5)).unwrap();
        assert!(zero_divergence_scan(&half_sq, Window::new((-1.0, 1.0), (0.5, 2.0)), (5, 5)).unwrap().is_empty());
        assert!(matches!(
            zero_divergence_scan(&quadratic_saddle(), Window::new((-1.0, 1.0), (0.5, 2.0)), (5, 5)),
            Err(Error::AlphaZero)
        ));

        // alpha = -2: Vrho = 0 where J'_{-3/2}(b rho) - 3/(2 rho) J_{-3/2}(b rho) = 0
        let beta = 1.0;
        let f = from_separable(SeparableParams::new(-2.0, beta, (1.0, 1.0), (1.0, 0.0))).unwrap();
        let zs = zero_divergence_scan(&f, Window::new((-0.5, 0.5), (0.5, 6.0)), (5, 60)).unwrap();
        assert!(!zs.is_empty());
        for z in &zs {
            let x = beta * z.rho;
            let jp = crate::specfun::bessel_j_prime(-1.5, x).unwrap();
            let j = crate::specfun::bessel_j(-1.5, x).unwrap();
            assert!((beta * jp - 1.5 / z.rho * j).abs() < 1e-8);
            assert!(z.verified);
        }
    }

    #[test]
    fn critical_point_examples() {
        let w = Window::new((-2.0, 2.0), (0.1, 3.0));
        let scan = critical_points(&quadratic_saddle(), w, (9, 9)).unwrap();
        assert!(scan.points.is_empty());

        let f = from_separable(SeparableParams::new(2.0, 1.0, (1.0, 1.0), (1.0, 0.0))).unwrap();
        let scan = critical_points(&f, Window::new((-2.0, 2.0), (0.1, 4.0)), (9, 9)).unwrap();
        assert!(scan.points.is_empty());

        // cosh(x0) sin(rho) has a saddle-type critical point at (0, pi/2)
        let f = from_separable(SeparableParams::new(2.0, 1.0, (1.0, 0.0), (1.0, 0.0))).unwrap();
        let scan = critical_points(&f, Window::new((-1.0, 1.0), (0.5, 3.0)), (7, 7)).unwrap();
        assert_eq!(scan.points.len(), 1);
        let p = scan.points[0];
        assert!(p.x0.abs() < 1e-12 && (p.rho - FRAC_PI_2).abs() < 1e-12);
        assert!(p.report.degenerate);
    }
}
