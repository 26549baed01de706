//! Discretization and the Blahut-Arimoto rate-distortion solver.

use crate::dist::ScalarSource;
use crate::error::{Error, Result};

/// Largest probability mass a discretization may cut off.
pub const TRUNCATION_LIMIT: f64 = 1e-6;
/// Convergence threshold on the per-iteration rate change (nats).
pub const RATE_TOLERANCE: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 100_000;
/// Kernel entries below `e^{-KERNEL_CUTOFF}` of their row maximum are skipped.
const KERNEL_CUTOFF: f64 = 36.0;
/// Certified suboptimality `ln max_j c_j` at which the iteration stops.
pub const GAP_TOLERANCE: f64 = 1e-7;
/// Largest extrapolation length tried by the accelerated iteration.
const MAX_STEP: f64 = 64.0;

/// A probability mass function on a strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedSource {
    points: Vec<f64>,
    pmf: Vec<f64>,
    truncation_mass: f64,
}

impl DiscretizedSource {
    pub fn new(points: Vec<f64>, pmf: Vec<f64>) -> Result<Self> {
        Self::with_truncation(points, pmf, 0.0)
    }

    fn with_truncation(points: Vec<f64>, pmf: Vec<f64>, truncation_mass: f64) -> Result<Self> {
        if points.len() != pmf.len() || points.is_empty() {
            return Err(Error::InvalidSource("points and pmf must have equal nonzero length".into()));
        }
        if points.windows(2).any(|w| w[1] <= w[0]) || points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSource("points must be finite and strictly increasing".into()));
        }
        if pmf.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidSource("pmf must be finite and nonnegative".into()));
        }
        let total: f64 = pmf.iter().sum();
        if !(total > 0.0) {
            return Err(Error::InvalidSource("pmf has no mass".into()));
        }
        Ok(Self {
            points,
            pmf: pmf.into_iter().map(|p| p / total).collect(),
            truncation_mass,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.points.iter().zip(&self.pmf).map(|(x, p)| x * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.points.iter().zip(&self.pmf).map(|(x, p)| p * (x - m).powi(2)).sum()
    }
}

/// Cell-integrated pmf on `n` equal cells covering `mean ± k_sigma·sd`,
/// clipped to the support.
pub fn discretize(source: &ScalarSource, n: usize, k_sigma: f64) -> Result<DiscretizedSource> {
    if n < 16 {
        return Err(Error::InvalidParameter(format!("need at least 16 cells (got {n})")));
    }
    if !(k_sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("k_sigma must be positive (got {k_sigma})")));
    }
    let mean = source.mean();
    let sd = source.variance()?.sqrt();
    let (slo, shi) = source.support();
    let lo = (mean - k_sigma * sd).max(slo);
    let hi = (mean + k_sigma * sd).min(shi);
    let width = (hi - lo) / n as f64;
    let cdf: Vec<f64> = (0..=n).map(|i| source.cdf(lo + i as f64 * width)).collect();
    let inside = cdf[n] - cdf[0];
    let truncation = (1.0 - inside).max(0.0);
    if truncation > TRUNCATION_LIMIT {
        return Err(Error::Discretization {
            mass: truncation,
            limit: TRUNCATION_LIMIT,
        });
    }
    let points = (0..n).map(|i| lo + (i as f64 + 0.5) * width).collect();
    let pmf = cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0)).collect();
    DiscretizedSource::with_truncation(points, pmf, truncation)
}

/// Distortion between source letters (rows) and reconstruction letters (columns).
#[derive(Debug, Clone)]
pub struct DistortionMatrix {
    rows: usize,
    cols: usize,
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    Dense(Vec<f64>),
    /// `d_ij = (offset - (j - ratio·i)·step)²`: squared error between a grid
    /// of spacing `ratio·step` and one of spacing `step`.
    Shift { offset: f64, step: f64, ratio: usize },
}

impl DistortionMatrix {
    pub fn from_fn<F: Fn(usize, usize) -> f64>(rows: usize, cols: usize, f: F) -> Self {
        let values = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| f(i, j))
            .collect();
        Self {
            rows,
            cols,
            repr: Repr::Dense(values),
        }
    }

    /// `(x_i - y_j)²`.
    pub fn squared_error(xs: &[f64], ys: &[f64]) -> Self {
        if let Some(repr) = shift_structure(xs, ys) {
            return Self {
                rows: xs.len(),
                cols: ys.len(),
                repr,
            };
        }
        Self::from_fn(xs.len(), ys.len(), |i, j| (xs[i] - ys[j]).powi(2))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match &self.repr {
            Repr::Dense(v) => v[i * self.cols + j],
            Repr::Shift { offset, step, ratio } => {
                let u = j as f64 - (ratio * i) as f64;
                (offset - u * step).powi(2)
            }
        }
    }
}

/// Detects equally spaced grids whose spacings are in integer ratio and
/// where every source point has a reconstruction point within one step.
fn shift_structure(xs: &[f64], ys: &[f64]) -> Option<Repr> {
    let spacing = |v: &[f64]| -> Option<f64> {
        if v.len() < 2 {
            return None;
        }
        let h = (v[v.len() - 1] - v[0]) / (v.len() - 1) as f64;
        let ok = v.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
        (ok && h > 0.0).then_some(h)
    };
    let hx = spacing(xs)?;
    let hy = spacing(ys)?;
    let ratio = (hx / hy).round();
    if ratio < 1.0 || ((hx / hy) - ratio).abs() > 1e-9 * ratio {
        return None;
    }
    let covered = ys[0] <= xs[0] + hy && ys[ys.len() - 1] >= xs[xs.len() - 1] - hy;
    covered.then_some(Repr::Shift {
        offset: xs[0] - ys[0],
        step: hy,
        ratio: ratio as usize,
    })
}

/// One point on the rate-distortion curve of a discrete source.
#[derive(Debug, Clone, PartialEq)]
pub struct BASolution {
    pub rate: f64,
    pub distortion_achieved: f64,
    pub slope: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `ln max_j c_j` at the final marginal, where `c_j` is the update
    /// factor of letter `j`. Bounds the suboptimality of the Lagrangian.
    pub gap: f64,
    /// Output marginal over the reconstruction alphabet.
    pub output: Vec<f64>,
}

enum Storage {
    /// Per-row kernel values `exp(s (d_ij - min_j d_ij))`, and the matrix.
    Dense { values: Vec<Vec<f64>>, d: Vec<f64> },
    /// Shared `exp(s d)` and `d` indexed by `j - ratio·i + shift`.
    Shift { values: Vec<f64>, d: Vec<f64>, ratio: usize, shift: usize },
}

/// The kernel restricted, row by row, to the columns where it matters.
struct Kernel {
    start: Vec<usize>,
    len: Vec<usize>,
    row_min: Vec<f64>,
    cols: usize,
    storage: Storage,
}

impl Kernel {
    fn new(d: &DistortionMatrix, slope: f64) -> Self {
        let reach = if slope < 0.0 { KERNEL_CUTOFF / -slope } else { f64::INFINITY };
        if let Repr::Shift { offset, step, ratio } = d.repr {
            // Row minima are at most step², so an unscaled kernel is safe
            // unless the slope is extreme.
            if -slope * step * step < 600.0 {
                let shift = ratio * (d.rows - 1);
                let len = shift + d.cols;
                let dist: Vec<f64> = (0..len)
                    .map(|k| (offset - (k as f64 - shift as f64) * step).powi(2))
                    .collect();
                let values = dist.iter().map(|&v| (slope * v).exp()).collect();
                let mut start = Vec::with_capacity(d.rows);
                let mut lens = Vec::with_capacity(d.rows);
                let radius = (step * step + reach).sqrt();
                for i in 0..d.rows {
                    let centre = (ratio * i) as f64 + offset / step;
                    let lo = (centre - radius / step - 1.0).floor().max(0.0) as usize;
                    let hi = ((centre + radius / step + 1.0).ceil().max(0.0) as usize).min(d.cols - 1);
                    let lo = lo.min(hi);
                    start.push(lo);
                    lens.push(hi - lo + 1);
                }
                return Self {
                    start,
                    len: lens,
                    row_min: vec![0.0; d.rows],
                    cols: d.cols,
                    storage: Storage::Shift {
                        values,
                        d: dist,
                        ratio,
                        shift,
                    },
                };
            }
        }
        let dense: Vec<f64> = match &d.repr {
            Repr::Dense(v) => v.clone(),
            Repr::Shift { .. } => (0..d.rows)
                .flat_map(|i| (0..d.cols).map(move |j| (i, j)))
                .map(|(i, j)| d.get(i, j))
                .collect(),
        };
        let mut start = Vec::with_capacity(d.rows);
        let mut lens = Vec::with_capacity(d.rows);
        let mut values = Vec::with_capacity(d.rows);
        let mut row_min = Vec::with_capacity(d.rows);
        for i in 0..d.rows {
            let row = &dense[i * d.cols..(i + 1) * d.cols];
            let m = row.iter().copied().fold(f64::INFINITY, f64::min);
            let keep = |v: f64| v - m <= reach;
            let first = row.iter().position(|&v| keep(v)).unwrap_or(0);
            let last = row.iter().rposition(|&v| keep(v)).unwrap_or(0);
            start.push(first);
            lens.push(last - first + 1);
            values.push(row[first..=last].iter().map(|&v| (slope * (v - m)).exp()).collect());
            row_min.push(m);
        }
        Self {
            start,
            len: lens,
            row_min,
            cols: d.cols,
            storage: Storage::Dense { values, d: dense },
        }
    }

    /// First column, kernel values and distortions of row `i`.
    #[inline]
    fn row(&self, i: usize) -> (usize, &[f64], &[f64]) {
        let s0 = self.start[i];
        let n = self.len[i];
        match &self.storage {
            Storage::Dense { values, d } => (s0, &values[i], &d[i * self.cols + s0..i * self.cols + s0 + n]),
            Storage::Shift {
                values,
                d,
                ratio,
                shift,
            } => {
                let k = s0 + shift - ratio * i;
                (s0, &values[k..k + n], &d[k..k + n])
            }
        }
    }

    /// One plain update `q -> out`, restricted to the `active` columns when
    /// given (the others are carried over unchanged).
    fn step(
        &self,
        pmf: &[f64],
        slope: f64,
        q: &[f64],
        out: &mut [f64],
        c: &mut [f64],
        active: Option<&[usize]>,
        with_rate: bool,
    ) -> StepStats {
        c.iter_mut().for_each(|v| *v = 0.0);
        let mut log_z = 0.0;
        let mut dist = 0.0;
        let mut min_z = f64::INFINITY;
        for (i, &p) in pmf.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let (s0, a, drow) = self.row(i);
            let (zi, t) = match active {
                None => {
                    let qs = &q[s0..s0 + a.len()];
                    let zi: f64 = a.iter().zip(qs).map(|(x, y)| x * y).sum();
                    let w = p / zi;
                    for (ck, &ak) in c[s0..s0 + a.len()].iter_mut().zip(a) {
                        *ck += w * ak;
                    }
                    let t = if with_rate {
                        a.iter().zip(qs).zip(drow).map(|((x, y), dd)| x * y * dd).sum()
                    } else {
                        0.0
                    };
                    (zi, t)
                }
                Some(cols) => {
                    let lo = cols.partition_point(|&j| j < s0);
                    let hi = cols.partition_point(|&j| j < s0 + a.len());
                    let cols = &cols[lo..hi];
                    let zi: f64 = cols.iter().map(|&j| a[j - s0] * q[j]).sum();
                    let w = p / zi;
                    for &j in cols {
                        c[j] += w * a[j - s0];
                    }
                    let t = if with_rate {
                        cols.iter().map(|&j| a[j - s0] * q[j] * drow[j - s0]).sum()
                    } else {
                        0.0
                    };
                    (zi, t)
                }
            };
            min_z = min_z.min(zi);
            log_z += p * (zi.ln() + slope * self.row_min[i]);
            dist += p * t / zi;
        }
        let mut total = 0.0;
        let mut cmax: f64 = 0.0;
        match active {
            None => {
                for j in 0..out.len() {
                    cmax = cmax.max(c[j]);
                    out[j] = q[j] * c[j];
                    total += out[j];
                }
            }
            Some(cols) => {
                out.copy_from_slice(q);
                for &j in cols {
                    cmax = cmax.max(c[j]);
                    out[j] = q[j] * c[j];
                }
                total = out.iter().sum();
            }
        }
        for v in out.iter_mut() {
            *v = (*v / total).max(Q_FLOOR);
        }
        StepStats {
            objective: -log_z,
            rate: slope * dist - log_z,
            gap: cmax.ln(),
            min_z,
        }
    }

    /// Mutual information and distortion of the test channel induced by `q`.
    fn evaluate(&self, pmf: &[f64], q: &[f64]) -> (f64, f64) {
        let mut out = vec![0.0; self.cols];
        let mut z = vec![0.0; pmf.len()];
        for (i, &p) in pmf.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let (s0, a, _) = self.row(i);
            let qs = &q[s0..s0 + a.len()];
            z[i] = a.iter().zip(qs).map(|(x, y)| x * y).sum();
            for (k, (&ak, &qk)) in a.iter().zip(qs).enumerate() {
                out[s0 + k] += p * ak * qk / z[i];
            }
        }
        let mut rate = 0.0;
        let mut dist = 0.0;
        for (i, &p) in pmf.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let (s0, a, drow) = self.row(i);
            for (k, &ak) in a.iter().enumerate() {
                let j = s0 + k;
                let channel = ak * q[j] / z[i];
                if channel > 0.0 && out[j] > 0.0 {
                    rate += p * channel * (channel / out[j]).ln();
                    dist += p * channel * drow[k];
                }
            }
        }
        (rate, dist)
    }
}

struct StepStats {
    /// `-Σ p log Z`.
    objective: f64,
    /// `sD - Σ p log Z`; an upper estimate of the rate at this slope.
    rate: f64,
    /// `ln max_j c_j` over the updated columns.
    gap: f64,
    /// Smallest row normalizer `Z_i`.
    min_z: f64,
}

/// Columns whose total mass is below `SCREEN_MASS · min_i Z_i` are frozen;
/// this perturbs every `ln Z_i` by less than `SCREEN_MASS`.
const SCREEN_MASS: f64 = 1e-14;
/// Plain updates before the interior-point finish is tried, and the
/// largest candidate set it accepts.
const IPM_AFTER: usize = 200;
const IPM_COLUMNS: usize = 400;
const IPM_STEPS: usize = 200;
const FINISH_ROUNDS: usize = 24;
const WARM_BLEND: f64 = 0.01;
const PEAK_WIDTH: usize = 1;
/// Accelerated cycles between full passes while screening.
const FULL_PASS_EVERY: usize = 25;

/// Columns to keep updating after a full pass.
fn screen(q: &[f64], c: &[f64], min_z: f64) -> Option<Vec<usize>> {
    let mut order: Vec<usize> = (0..q.len()).collect();
    order.sort_by(|&a, &b| q[a].total_cmp(&q[b]));
    let budget = SCREEN_MASS * min_z;
    let mut mass = 0.0;
    let mut frozen = vec![false; q.len()];
    for &j in &order {
        mass += q[j];
        if mass > budget {
            break;
        }
        // A column the update would grow stays active.
        frozen[j] = c[j] < 1.0;
    }
    let active: Vec<usize> = (0..q.len()).filter(|&j| !frozen[j]).collect();
    // Not worth the indirection unless most columns drop out.
    (active.len() * 2 < q.len()).then_some(active)
}

/// Smallest output probability kept, so no letter is lost for good.
const Q_FLOOR: f64 = 1e-200;

impl Kernel {
    /// Adds columns until every row with mass reaches at least one of
    /// `cols` (kept sorted).
    fn cover(&self, pmf: &[f64], cols: &mut Vec<usize>) {
        for (i, &p) in pmf.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let (s0, a, d) = self.row(i);
            let lo = cols.partition_point(|&j| j < s0);
            if lo < cols.len() && cols[lo] < s0 + a.len() {
                continue;
            }
            let best = (0..d.len()).fold(0, |b, t| if d[t] < d[b] { t } else { b });
            cols.insert(lo, s0 + best);
        }
    }

    /// Primal-dual interior point for `min -Σ p ln (Ax)_i + Σ x` over
    /// `x ≥ 0` on the columns `cols`. The minimizer sums to one and is a
    /// fixed point of the plain update restricted to `cols`.
    fn interior_point(&self, pmf: &[f64], cols: &[usize], start: &[f64]) -> Option<Vec<f64>> {
        let k = cols.len();
        let rows: Vec<(Vec<usize>, Vec<f64>)> = pmf
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                if p == 0.0 {
                    return (Vec::new(), Vec::new());
                }
                let (s0, a, _) = self.row(i);
                let lo = cols.partition_point(|&j| j < s0);
                let hi = cols.partition_point(|&j| j < s0 + a.len());
                (lo..hi).map(|r| (r, a[cols[r] - s0])).unzip()
            })
            .collect();
        let eval = |x: &[f64]| -> Option<(f64, Vec<f64>, Vec<f64>)> {
            let mut z = vec![0.0; pmf.len()];
            let mut c = vec![0.0; k];
            let mut f: f64 = x.iter().sum();
            for (i, (rs, vals)) in rows.iter().enumerate() {
                if pmf[i] == 0.0 {
                    continue;
                }
                let zi: f64 = rs.iter().zip(vals).map(|(&r, &v)| v * x[r]).sum();
                if !(zi > 0.0) {
                    return None;
                }
                z[i] = zi;
                f -= pmf[i] * zi.ln();
                let w = pmf[i] / zi;
                for (&r, &v) in rs.iter().zip(vals) {
                    c[r] += w * v;
                }
            }
            Some((f, z, c))
        };
        let top = start.iter().copied().fold(0.0, f64::max);
        let mut x: Vec<f64> = start.iter().map(|&v| v.max(1e-6 * top)).collect();
        let total: f64 = x.iter().sum();
        x.iter_mut().for_each(|v| *v /= total);
        let (mut f, mut z, mut c) = eval(&x)?;
        let mut y: Vec<f64> = c.iter().map(|&cr| (1.0 - cr).max(1e-3)).collect();
        let mut h = vec![0.0; k * k];
        for _ in 0..IPM_STEPS {
            let g: Vec<f64> = c.iter().map(|&cr| 1.0 - cr).collect();
            let mu = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / k as f64;
            let residual = g.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if mu < 1e-15 && residual < 1e-12 {
                let total: f64 = x.iter().sum();
                return Some(x.into_iter().map(|v| v / total).collect());
            }
            let target = 0.1 * mu;
            h.iter_mut().for_each(|v| *v = 0.0);
            for (i, (rs, vals)) in rows.iter().enumerate() {
                if rs.is_empty() {
                    continue;
                }
                let w = pmf[i] / (z[i] * z[i]);
                for a in 0..rs.len() {
                    let wa = w * vals[a];
                    let row = &mut h[rs[a] * k..(rs[a] + 1) * k];
                    for b in a..rs.len() {
                        row[rs[b]] += wa * vals[b];
                    }
                }
            }
            for r in 0..k {
                for t in 0..r {
                    h[r * k + t] = h[t * k + r];
                }
                h[r * k + r] += y[r] / x[r];
            }
            let l = cholesky(&h, k)?;
            let rhs: Vec<f64> = (0..k).map(|r| -g[r] + target / x[r]).collect();
            let dx = cholesky_solve(&l, k, &rhs);
            let dy: Vec<f64> = (0..k).map(|r| target / x[r] - y[r] - y[r] / x[r] * dx[r]).collect();
            let mut ap: f64 = 1.0;
            let mut ad: f64 = 1.0;
            for r in 0..k {
                if dx[r] < 0.0 {
                    ap = ap.min(-0.99 * x[r] / dx[r]);
                }
                if dy[r] < 0.0 {
                    ad = ad.min(-0.99 * y[r] / dy[r]);
                }
            }
            // Backtrack on the barrier merit.
            let merit = |f: f64, x: &[f64]| f - target * x.iter().map(|v| v.ln()).sum::<f64>();
            let descent: f64 = (0..k).map(|r| (g[r] - target / x[r]) * dx[r]).sum();
            let m0 = merit(f, &x);
            let mut next = None;
            for _ in 0..50 {
                let xn: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + ap * b).collect();
                if let Some((fn_, zn, cn)) = eval(&xn) {
                    if merit(fn_, &xn) <= m0 + 1e-4 * ap * descent.min(0.0) {
                        next = Some((xn, fn_, zn, cn));
                        break;
                    }
                }
                ap *= 0.5;
            }
            // A stalled search leaves the current point to the certificate.
            let Some((xn, fn_, zn, cn)) = next else { break };
            x = xn;
            (f, z, c) = (fn_, zn, cn);
            for r in 0..k {
                y[r] = (y[r] + ad * dy[r]).max(1e-300);
            }
        }
        let total: f64 = x.iter().sum();
        Some(x.into_iter().map(|v| v / total).collect())
    }
}

fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut s = a[j * n + j];
        for k in 0..j {
            s -= l[j * n + k] * l[j * n + k];
        }
        if !(s > 0.0) {
            return None;
        }
        let d = s.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / d;
        }
    }
    Some(l)
}

fn cholesky_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    y
}

/// Interior-point finish on the columns that carry mass, certified over
/// all columns. Columns the certificate flags are added and the solve
/// repeated a few times.
fn finish(kernel: &Kernel, pmf: &[f64], slope: f64, q: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = q.len();
    let top = q.iter().copied().fold(0.0, f64::max);
    // Start from the peaks of the current marginal.
    let mut cols = peaks(q, |j| q[j] > 1e-6 * top);
    let mut out = vec![0.0; m];
    let mut c = vec![0.0; m];
    let mut start_from = q.to_vec();
    for _ in 0..FINISH_ROUNDS {
        if cols.is_empty() || cols.len() > IPM_COLUMNS {
            return None;
        }
        kernel.cover(pmf, &mut cols);
        let start: Vec<f64> = cols.iter().map(|&j| start_from[j]).collect();
        let x = kernel.interior_point(pmf, &cols, &start)?;
        let mut cand = vec![Q_FLOOR; m];
        for (&j, &v) in cols.iter().zip(&x) {
            cand[j] = v.max(Q_FLOOR);
        }
        let gap = kernel.step(pmf, slope, &cand, &mut out, &mut c, None, false).gap;
        if gap < GAP_TOLERANCE {
            return Some((cand, gap));
        }
        // Keep the atoms of the solution and admit the peaks of the
        // violated conditions.
        let top_x = cand.iter().copied().fold(0.0, f64::max);
        let top_c = c.iter().copied().fold(0.0, f64::max);
        let violated = peaks(&c, |j| c[j] > 1.0 && c[j] - 1.0 > 1e-6 * (top_c - 1.0));
        if violated.iter().all(|j| cols.binary_search(j).is_ok()) {
            return None;
        }
        cols = peaks(&cand, |j| cand[j] > 1e-9 * top_x);
        cols.extend(violated);
        cols.sort_unstable();
        cols.dedup();
        start_from = cand;
        let floor = 1e-3 * start_from.iter().copied().fold(0.0, f64::max);
        for &j in &cols {
            start_from[j] = start_from[j].max(floor);
        }
    }
    None
}

/// Local maxima of `v` satisfying `keep`, with one neighbour on each side.
fn peaks(v: &[f64], keep: impl Fn(usize) -> bool) -> Vec<usize> {
    let m = v.len();
    let mut out = Vec::new();
    for j in 0..m {
        let left = j == 0 || v[j] >= v[j - 1];
        let right = j + 1 == m || v[j] >= v[j + 1];
        if left && right && keep(j) {
            out.extend(j.saturating_sub(PEAK_WIDTH)..(j + PEAK_WIDTH + 1).min(m));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Slope-parameterized Blahut-Arimoto iteration for a generic distortion.
///
/// `warm` seeds the output marginal (e.g. from a nearby slope).
pub fn blahut_arimoto(
    pmf: &[f64],
    d: &DistortionMatrix,
    slope: f64,
    warm: Option<&[f64]>,
) -> Result<BASolution> {
    blahut_arimoto_capped(pmf, d, slope, warm, MAX_ITERATIONS)
}

/// As [`blahut_arimoto`] with a custom iteration cap.
pub fn blahut_arimoto_capped(
    pmf: &[f64],
    d: &DistortionMatrix,
    slope: f64,
    warm: Option<&[f64]>,
    max_iterations: usize,
) -> Result<BASolution> {
    if pmf.len() != d.rows {
        return Err(Error::InvalidParameter("pmf length must match distortion rows".into()));
    }
    if !(slope <= 0.0 && slope.is_finite()) {
        return Err(Error::InvalidParameter(format!("slope must be <= 0 (got {slope})")));
    }
    let m = d.cols;
    if slope == 0.0 {
        // Zero rate: the single best reconstruction point.
        let (best, dist) = (0..m)
            .map(|j| (j, (0..d.rows).map(|i| pmf[i] * d.get(i, j)).sum::<f64>()))
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        let mut output = vec![0.0; m];
        output[best] = 1.0;
        return Ok(BASolution {
            rate: 0.0,
            distortion_achieved: dist,
            slope,
            iterations: 0,
            converged: true,
            gap: 0.0,
            output,
        });
    }
    let kernel = Kernel::new(d, slope);
    let mut q: Vec<f64> = match warm {
        Some(w) if w.len() == m => {
            // Blend in some uniform mass: a marginal that is optimal at
            // another slope can be a saddle of this one.
            let t: f64 = w.iter().sum();
            w.iter().map(|&x| (1.0 - WARM_BLEND) * x / t + WARM_BLEND / m as f64).collect()
        }
        _ => vec![1.0 / m as f64; m],
    };
    let mut q1 = vec![0.0; m];
    let mut q2 = vec![0.0; m];
    let mut qx = vec![0.0; m];
    let mut q3 = vec![0.0; m];
    let mut c = vec![0.0; m];
    let mut last_rate = f64::INFINITY;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    let mut active: Option<Vec<usize>> = None;
    let mut cycles = 0;
    let mut hold_full = false;
    let mut fresh = false;
    // Plain updates interleaved with SQUAREM extrapolation. A step is kept
    // only if it does not increase the objective, so the iteration has the
    // fixed point of the plain one.
    let mut next_finish = IPM_AFTER;
    while iterations < max_iterations {
        if iterations >= next_finish {
            next_finish = iterations * 4;
            if let Some((x, g)) = finish(&kernel, pmf, slope, &q) {
                q = x;
                gap = g;
                converged = true;
                break;
            }
        }
        let st = kernel.step(pmf, slope, &q, &mut q1, &mut c, active.as_deref(), true);
        iterations += 1;
        let done = (last_rate - st.rate).abs() < RATE_TOLERANCE || (active.is_none() && st.gap < GAP_TOLERANCE);
        last_rate = st.rate;
        match active.take() {
            None => {
                gap = st.gap;
                if done && !fresh {
                    converged = true;
                    break;
                }
                if !hold_full {
                    active = screen(&q, &c, st.min_z);
                }
                hold_full = false;
                fresh = false;
                cycles = 0;
            }
            Some(cols) => {
                cycles += 1;
                if done || cycles >= FULL_PASS_EVERY {
                    // Re-check on full passes: this one sees the same q,
                    // so a stop needs one more full cycle.
                    hold_full = done;
                    fresh = true;
                    continue;
                }
                active = Some(cols);
            }
        }
        let cols = active.as_deref();
        let obj1 = kernel.step(pmf, slope, &q1, &mut q2, &mut c, cols, false).objective;
        iterations += 1;
        let (mut rr, mut vv) = (0.0, 0.0);
        for j in 0..m {
            let r = q1[j] - q[j];
            let v = q2[j] - 2.0 * q1[j] + q[j];
            rr += r * r;
            vv += v * v;
        }
        let mut alpha = if vv > 0.0 { -(rr / vv).sqrt() } else { -1.0 };
        alpha = alpha.clamp(-MAX_STEP, -1.0);
        let mut accepted = false;
        while alpha < -1.5 && iterations < max_iterations {
            for j in 0..m {
                let r = q1[j] - q[j];
                let v = q2[j] - 2.0 * q1[j] + q[j];
                qx[j] = (q[j] - 2.0 * alpha * r + alpha * alpha * v).max(0.0);
            }
            let total: f64 = qx.iter().sum();
            qx.iter_mut().for_each(|v| *v = (*v / total).max(Q_FLOOR));
            let objx = kernel.step(pmf, slope, &qx, &mut q3, &mut c, cols, false).objective;
            iterations += 1;
            if objx.is_finite() && objx <= obj1 {
                accepted = true;
                break;
            }
            alpha = 0.5 * (alpha - 1.0);
        }
        if accepted {
            std::mem::swap(&mut q, &mut q3);
        } else {
            std::mem::swap(&mut q, &mut q2);
        }
    }
    let (rate, dist) = kernel.evaluate(pmf, &q);
    if !(rate.is_finite() && dist.is_finite()) {
        return Err(Error::numerical("blahut_arimoto", "non-finite rate or distortion"));
    }
    Ok(BASolution {
        rate: rate.max(0.0),
        distortion_achieved: dist,
        slope,
        iterations,
        converged,
        gap,
        output: q,
    })
}

/// Reconstruction alphabet for the scalar oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum Reconstruction {
    /// The source grid itself.
    SourceGrid,
    /// The source grid with midpoints inserted.
    Refined,
    Custom(Vec<f64>),
}

impl Reconstruction {
    fn points(&self, source: &DiscretizedSource) -> Vec<f64> {
        match self {
            Reconstruction::SourceGrid => source.points.clone(),
            Reconstruction::Refined => {
                let p = &source.points;
                let mut out = Vec::with_capacity(2 * p.len() - 1);
                for w in p.windows(2) {
                    out.push(w[0]);
                    out.push(0.5 * (w[0] + w[1]));
                }
                out.push(p[p.len() - 1]);
                out
            }
            Reconstruction::Custom(v) => v.clone(),
        }
    }
}

/// Blahut-Arimoto for squared error on a discretized scalar source.
pub fn blahut_arimoto_rd(
    source: &DiscretizedSource,
    slope: f64,
    reconstruction: Option<&Reconstruction>,
) -> Result<BASolution> {
    let ys = reconstruction.unwrap_or(&Reconstruction::SourceGrid).points(source);
    let d = DistortionMatrix::squared_error(&source.points, &ys);
    blahut_arimoto(&source.pmf, &d, slope, None)
}

/// Distortion reached at zero rate.
pub fn zero_rate_distortion(pmf: &[f64], d: &DistortionMatrix) -> f64 {
    (0..d.cols)
        .map(|j| (0..d.rows).map(|i| pmf[i] * d.get(i, j)).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Relative accuracy of the distortion target.
pub const DISTORTION_TOLERANCE: f64 = 1e-6;

/// Outcome of a slope search.
pub(crate) enum SlopeHit<T> {
    Exact(T),
    /// The distortion jumps across the final bracket (a straight piece of
    /// the curve); `weight` on `a` and `1 - weight` on `b` meets the target.
    Shared { weight: f64, a: T, b: T },
}

/// Root of `log D(s) = log Δ` in `u = log(-s)` by bracketing and Illinois
/// false position. `solve` maps a slope to a solution whose distortion is
/// read by `dist`; `D` decreases in `u`.
pub(crate) fn search_slope<T>(
    delta: f64,
    mut solve: impl FnMut(f64) -> Result<T>,
    dist: impl Fn(&T) -> f64,
) -> Result<SlopeHit<T>> {
    let target = delta.ln();
    let f = |t: &T| dist(t).ln() - target;
    let mut run = |u: f64| solve(-u.exp());
    let mut u0 = (0.5 / delta).ln();
    let mut s0 = run(u0)?;
    if f(&s0).abs() <= DISTORTION_TOLERANCE {
        return Ok(SlopeHit::Exact(s0));
    }
    let step = if f(&s0) > 0.0 { 1.0 } else { -1.0 };
    let mut u1 = u0 + step;
    let mut s1 = run(u1)?;
    let mut guard = 0;
    while f(&s0).signum() == f(&s1).signum() {
        guard += 1;
        if guard > 60 {
            return Err(Error::numerical("rd_at_distortion", "could not bracket the slope"));
        }
        u0 = u1;
        s0 = s1;
        u1 += step;
        s1 = run(u1)?;
    }
    let (mut a, mut fa, mut b, mut fb) = (u0, f(&s0), u1, f(&s1));
    let (mut sa, mut sb) = (s0, s1);
    let mut side = 0;
    for _ in 0..200 {
        if f(&sa).abs() <= DISTORTION_TOLERANCE {
            return Ok(SlopeHit::Exact(sa));
        }
        if f(&sb).abs() <= DISTORTION_TOLERANCE {
            return Ok(SlopeHit::Exact(sb));
        }
        if (b - a).abs() < 1e-12 {
            break;
        }
        let u = (a * fb - b * fa) / (fb - fa);
        let u = if u.is_finite() && u > a.min(b) && u < a.max(b) { u } else { 0.5 * (a + b) };
        let s = run(u)?;
        let fu = f(&s);
        if fu.abs() <= DISTORTION_TOLERANCE {
            return Ok(SlopeHit::Exact(s));
        }
        if fu.signum() == fb.signum() {
            (b, fb, sb) = (u, fu, s);
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            (a, fa, sa) = (u, fu, s);
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    let (da, db) = (dist(&sa), dist(&sb));
    if (da - delta) * (db - delta) > 0.0 || da == db {
        return Err(Error::numerical(
            "rd_at_distortion",
            format!("slope search ended {:.3e} from the target", f(&sa).abs().min(f(&sb).abs())),
        ));
    }
    Ok(SlopeHit::Shared {
        weight: (delta - db) / (da - db),
        a: sa,
        b: sb,
    })
}

/// Finds the slope whose solution meets `delta` to within
/// `DISTORTION_TOLERANCE · delta`, time-sharing two slopes where the
/// curve is straight.
pub fn rd_for_matrix(pmf: &[f64], d: &DistortionMatrix, delta: f64) -> Result<BASolution> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!("distortion must be positive (got {delta})")));
    }
    let dmax = zero_rate_distortion(pmf, d);
    if delta >= dmax * (1.0 - DISTORTION_TOLERANCE) {
        if delta > dmax * (1.0 + 1e-9) {
            return Err(Error::InfeasibleDistortion(format!(
                "distortion {delta} exceeds the zero-rate distortion {dmax}"
            )));
        }
        return blahut_arimoto(pmf, d, 0.0, None);
    }
    let mut warm: Option<Vec<f64>> = None;
    let hit = search_slope(
        delta,
        |slope| {
            let sol = blahut_arimoto(pmf, d, slope, warm.as_deref())?;
            warm = Some(sol.output.clone());
            Ok(sol)
        },
        |s: &BASolution| s.distortion_achieved,
    )?;
    Ok(match hit {
        SlopeHit::Exact(s) => s,
        SlopeHit::Shared { weight: w, a, b } => BASolution {
            rate: w * a.rate + (1.0 - w) * b.rate,
            distortion_achieved: delta,
            slope: w * a.slope + (1.0 - w) * b.slope,
            iterations: a.iterations + b.iterations,
            converged: a.converged && b.converged,
            gap: a.gap.max(b.gap),
            output: a.output.iter().zip(&b.output).map(|(x, y)| w * x + (1.0 - w) * y).collect(),
        },
    })
}

/// Rate at distortion `delta` for squared error on the source grid.
pub fn rd_at_distortion(source: &DiscretizedSource, delta: f64) -> Result<BASolution> {
    rd_at_distortion_with(source, delta, &Reconstruction::SourceGrid)
}

pub fn rd_at_distortion_with(
    source: &DiscretizedSource,
    delta: f64,
    reconstruction: &Reconstruction,
) -> Result<BASolution> {
    let ys = reconstruction.points(source);
    let d = DistortionMatrix::squared_error(&source.points, &ys);
    rd_for_matrix(&source.pmf, &d, delta)
}
