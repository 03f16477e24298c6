//! Arthurs-Kelly joint measurement: the Husimi joint distribution of the two
//! pointer readings `x₁`, `x₂`, its marginals and moments, the `b → 0` and
//! `b → ∞` limits of the conditional means, and simulated heterodyne runs.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::quadrature::dot;
use crate::numerics::{simpson_weights, GridSpec, SeededStream};
use crate::quantum::{local_p_given_q, local_q_given_p, max_of, Axis, LocalCorrelationCurve, SUPPORT_THRESHOLD};
use crate::states::{moments, MomentReport, WaveFunction};

/// Joint grids span the mean ± this many smeared dispersions.
pub const SPAN_DISPERSIONS: f64 = 8.0;
pub const DEFAULT_JOINT_POINTS: usize = 256;
/// Largest tolerated deviation of the joint's total mass from 1.
pub const COVERAGE_TOLERANCE: f64 = 1e-4;
/// Gaussian kernels are truncated this many standard deviations out.
const KERNEL_REACH: f64 = 10.0;

/// Balance parameter of the measuring apparatus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApparatusParams {
    b: f64,
}

impl ApparatusParams {
    pub fn new(b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::InvalidParameter { name: "b", value: b });
        }
        Ok(Self { b })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Standard deviation of the smearing kernel on the given axis: `b` for
    /// positions and `1/(2b)` for momenta.
    pub fn kernel_width(&self, axis: Axis) -> f64 {
        match axis {
            Axis::GivenPosition => self.b,
            Axis::GivenMomentum => 0.5 / self.b,
        }
    }

    /// `(Δx₁, Δx₂)` predicted from the state's dispersions.
    pub fn smeared_dispersions(&self, m: &MomentReport) -> (f64, f64) {
        let w1 = self.kernel_width(Axis::GivenPosition);
        let w2 = self.kernel_width(Axis::GivenMomentum);
        (
            (m.delta_q * m.delta_q + w1 * w1).sqrt(),
            (m.delta_p * m.delta_p + w2 * w2).sqrt(),
        )
    }
}

/// Default `(x₁, x₂)` grids for a state measured with `app`.
pub fn default_grids(wf: &WaveFunction, app: &ApparatusParams, n_points: usize) -> Result<(GridSpec, GridSpec)> {
    let m = moments(wf)?;
    let (w1, w2) = app.smeared_dispersions(&m);
    let r1 = SPAN_DISPERSIONS * w1;
    let r2 = SPAN_DISPERSIONS * w2;
    Ok((
        GridSpec::new(m.mean_q - r1, m.mean_q + r1, n_points)?,
        GridSpec::new(m.mean_p - r2, m.mean_p + r2, n_points)?,
    ))
}

/// `P(x₁, x₂)` sampled on a rectangular grid, stored row-major with `x₁`
/// selecting the row.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistributionGrid {
    pub x1_grid: GridSpec,
    pub x2_grid: GridSpec,
    pub values: Vec<f64>,
    pub b: f64,
    /// Double integral of `values`; left as computed.
    pub mass: f64,
}

impl JointDistributionGrid {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.x2_grid.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n2 = self.x2_grid.len();
        &self.values[i * n2..(i + 1) * n2]
    }

    /// `∫∫ f(x₁, x₂) P(x₁, x₂)` by the product rule.
    pub fn expectation(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let w1 = simpson_weights(self.x1_grid.len(), self.x1_grid.step());
        let w2 = simpson_weights(self.x2_grid.len(), self.x2_grid.step());
        let x2: Vec<f64> = self.x2_grid.points().collect();
        let mut total = 0.0;
        for (i, x1) in self.x1_grid.points().enumerate() {
            let row: f64 = self
                .row(i)
                .iter()
                .zip(&w2)
                .zip(&x2)
                .map(|((p, w), &x2)| p * w * f(x1, x2))
                .sum();
            total += w1[i] * row;
        }
        total
    }

    pub fn means(&self) -> (f64, f64) {
        (self.expectation(|x1, _| x1), self.expectation(|_, x2| x2))
    }

    /// `(Δx₁, Δx₂)`.
    pub fn dispersions(&self) -> (f64, f64) {
        let (m1, m2) = self.means();
        (
            self.expectation(|x1, _| (x1 - m1) * (x1 - m1)).sqrt(),
            self.expectation(|_, x2| (x2 - m2) * (x2 - m2)).sqrt(),
        )
    }

    /// `⟨2x₁x₂⟩ − 2⟨x₁⟩⟨x₂⟩`.
    pub fn global_moment(&self) -> f64 {
        let (m1, m2) = self.means();
        self.expectation(|x1, x2| 2.0 * x1 * x2) - 2.0 * m1 * m2
    }

    /// Conditional mean of the other reading at grid index `index` of the
    /// conditioning axis, by direct quadrature over the joint. `None` below
    /// the support threshold.
    pub fn conditional_mean_at(&self, axis: Axis, index: usize) -> Option<f64> {
        let (p1, p2) = marginals(self);
        match axis {
            Axis::GivenPosition => {
                let w2 = simpson_weights(self.x2_grid.len(), self.x2_grid.step());
                let first: Vec<f64> = self
                    .row(index)
                    .iter()
                    .zip(self.x2_grid.points())
                    .map(|(p, x)| p * x)
                    .collect();
                (p1[index] >= SUPPORT_THRESHOLD * max_of(&p1)).then(|| dot(&w2, &first) / p1[index])
            }
            Axis::GivenMomentum => {
                let w1 = simpson_weights(self.x1_grid.len(), self.x1_grid.step());
                let first: Vec<f64> = self
                    .x1_grid
                    .points()
                    .enumerate()
                    .map(|(i, x)| self.value(i, index) * x)
                    .collect();
                (p2[index] >= SUPPORT_THRESHOLD * max_of(&p2)).then(|| dot(&w1, &first) / p2[index])
            }
        }
    }
}

/// Returns `(max_q_step, max_p_step)` under which a Gaussian kernel of width
/// `sigma` on `axis`, applied to an integrand whose spectrum reaches `band`,
/// is integrated to full precision by the trapezoid rule.
fn kernel_steps(wf: &WaveFunction, axis: Axis, sigma: f64, band: f64) -> (f64, f64) {
    let limit = 2.0 * PI / (band + KERNEL_REACH / sigma);
    match axis {
        Axis::GivenPosition => (wf.position_grid().step().min(limit), wf.momentum_grid().step()),
        Axis::GivenMomentum => (wf.position_grid().step(), wf.momentum_grid().step().min(limit)),
    }
}

/// Index range of grid points within `reach` of `x`.
fn window(grid: &GridSpec, x: f64, reach: f64) -> core::ops::Range<usize> {
    let h = grid.step();
    let lo = ((x - reach - grid.x_min()) / h).ceil().max(0.0);
    let hi = ((x + reach - grid.x_min()) / h).floor().min((grid.len() - 1) as f64);
    if lo > hi {
        0..0
    } else {
        lo as usize..hi as usize + 1
    }
}

/// `P(x₁,x₂) = |⟨φ_{b,x₁,x₂}|φ⟩|²/(2π)` on the given grids, with the overlap
/// evaluated by quadrature over the position representation.
pub fn joint_distribution(
    wf: &WaveFunction,
    app: &ApparatusParams,
    x1_grid: &GridSpec,
    x2_grid: &GridSpec,
) -> Result<JointDistributionGrid> {
    let b = app.b();
    // amplitude kernel e^{−(x₁−q)²/(4b²)} has standard deviation b√2
    let sigma = b * SQRT_2;
    let p = wf.momentum_grid();
    let band = (x2_grid.x_max() - p.x_min()).max(p.x_max() - x2_grid.x_min());
    let (hq, hp) = kernel_steps(wf, Axis::GivenPosition, sigma, band);
    let fine = wf.refined_to(hq, hp)?;
    let q = fine.position_grid();
    let phi = fine.position_amplitudes();
    let h = q.step();

    let windows: Vec<(usize, Vec<Complex64>)> = x1_grid
        .points()
        .map(|x1| {
            let range = window(q, x1, KERNEL_REACH * sigma);
            let start = range.start;
            let g = range
                .map(|k| {
                    let u = x1 - q.point(k);
                    phi[k] * (-u * u / (4.0 * b * b)).exp()
                })
                .collect();
            (start, g)
        })
        .collect();

    let scale = h * h / ((2.0 * PI * b * b).sqrt() * 2.0 * PI);
    let n2 = x2_grid.len();
    let mut values = vec![0.0; x1_grid.len() * n2];
    let mut phase = vec![Complex64::new(0.0, 0.0); q.len()];
    for (j, x2) in x2_grid.points().enumerate() {
        for (k, e) in phase.iter_mut().enumerate() {
            *e = Complex64::from_polar(1.0, -q.point(k) * x2);
        }
        for (i, (start, g)) in windows.iter().enumerate() {
            let overlap: Complex64 = g.iter().zip(&phase[*start..]).map(|(a, e)| a * e).sum();
            values[i * n2 + j] = scale * overlap.norm_sqr();
        }
    }

    let mut joint = JointDistributionGrid {
        x1_grid: *x1_grid,
        x2_grid: *x2_grid,
        values,
        b,
        mass: 0.0,
    };
    joint.mass = joint.expectation(|_, _| 1.0);
    if (joint.mass - 1.0).abs() > COVERAGE_TOLERANCE {
        return Err(Error::Coverage { mass: joint.mass });
    }
    Ok(joint)
}

/// Joint distribution on the default grids.
pub fn default_joint(wf: &WaveFunction, app: &ApparatusParams) -> Result<JointDistributionGrid> {
    let (g1, g2) = default_grids(wf, app, DEFAULT_JOINT_POINTS)?;
    joint_distribution(wf, app, &g1, &g2)
}

/// `(P₁(x₁), P₂(x₂))` by integrating out the other reading.
pub fn marginals(joint: &JointDistributionGrid) -> (Vec<f64>, Vec<f64>) {
    let n1 = joint.x1_grid.len();
    let n2 = joint.x2_grid.len();
    let w1 = simpson_weights(n1, joint.x1_grid.step());
    let w2 = simpson_weights(n2, joint.x2_grid.step());
    let p1 = (0..n1).map(|i| dot(&w2, joint.row(i))).collect();
    let mut p2 = vec![0.0; n2];
    for (i, w) in w1.iter().enumerate() {
        for (acc, v) in p2.iter_mut().zip(joint.row(i)) {
            *acc += w * v;
        }
    }
    (p1, p2)
}

/// Gaussian smoothing of one quantum marginal and of the matching current,
/// evaluated directly without the joint.
struct Smoothing {
    grid: GridSpec,
    density: Vec<f64>,
    current: Vec<f64>,
    sigma: f64,
}

impl Smoothing {
    fn new(wf: &WaveFunction, app: &ApparatusParams, axis: Axis) -> Result<Self> {
        let sigma = app.kernel_width(axis);
        let band = match axis {
            Axis::GivenPosition => wf.momentum_grid().x_max() - wf.momentum_grid().x_min(),
            Axis::GivenMomentum => wf.position_grid().x_max() - wf.position_grid().x_min(),
        };
        let (hq, hp) = kernel_steps(wf, axis, sigma, band);
        let fine = wf.refined_to(hq, hp)?;
        let (grid, amps, op) = match axis {
            Axis::GivenPosition => (
                *fine.position_grid(),
                fine.position_amplitudes(),
                fine.momentum_operator_position()?,
            ),
            Axis::GivenMomentum => (
                *fine.momentum_grid(),
                fine.momentum_amplitudes(),
                fine.position_operator_momentum()?,
            ),
        };
        Ok(Self {
            grid,
            density: amps.iter().map(|a| a.norm_sqr()).collect(),
            current: amps.iter().zip(&op).map(|(a, o)| (a.conj() * o).re).collect(),
            sigma,
        })
    }

    /// Smoothed `(density, current)` at `x`.
    fn eval(&self, x: f64) -> (f64, f64) {
        let norm = self.grid.step() / (self.sigma * (2.0 * PI).sqrt());
        let mut d = 0.0;
        let mut c = 0.0;
        for k in window(&self.grid, x, KERNEL_REACH * self.sigma) {
            let u = (x - self.grid.point(k)) / self.sigma;
            let w = (-0.5 * u * u).exp();
            d += w * self.density[k];
            c += w * self.current[k];
        }
        (norm * d, norm * c)
    }

    fn support_floor(&self, wf: &WaveFunction, app: &ApparatusParams, axis: Axis) -> Result<f64> {
        let (g1, g2) = default_grids(wf, app, DEFAULT_JOINT_POINTS)?;
        let g = match axis {
            Axis::GivenPosition => g1,
            Axis::GivenMomentum => g2,
        };
        Ok(SUPPORT_THRESHOLD * g.points().map(|x| self.eval(x).0).fold(0.0, f64::max))
    }
}

/// Smeared marginal `P₁` (position axis) or `P₂` (momentum axis) on `grid`.
pub fn smeared_marginal(wf: &WaveFunction, app: &ApparatusParams, axis: Axis, grid: &GridSpec) -> Result<Vec<f64>> {
    let s = Smoothing::new(wf, app, axis)?;
    Ok(grid.points().map(|x| s.eval(x).0).collect())
}

/// `⟨x₂⟩(x₁)` for `Axis::GivenPosition`, `⟨x₁⟩(x₂)` for `Axis::GivenMomentum`.
pub fn conditional_mean(wf: &WaveFunction, app: &ApparatusParams, axis: Axis, value: f64) -> Result<f64> {
    let s = Smoothing::new(wf, app, axis)?;
    let floor = s.support_floor(wf, app, axis)?;
    let (d, c) = s.eval(value);
    if !(d >= floor) || d <= 0.0 {
        return Err(Error::Unsupported { value });
    }
    Ok(c / d)
}

/// Conditional means at every point of `grid`, masked below the support
/// threshold.
pub fn conditional_curve(
    wf: &WaveFunction,
    app: &ApparatusParams,
    axis: Axis,
    grid: &GridSpec,
) -> Result<LocalCorrelationCurve> {
    let s = Smoothing::new(wf, app, axis)?;
    let floor = s.support_floor(wf, app, axis)?;
    let means = grid
        .points()
        .map(|x| {
            let (d, c) = s.eval(x);
            (d >= floor && d > 0.0).then(|| c / d)
        })
        .collect();
    Ok(LocalCorrelationCurve {
        axis,
        points: grid.points().collect(),
        means,
    })
}

/// `⟨2x₁x₂⟩ − 2⟨x₁⟩⟨x₂⟩` over the joint on default grids.
pub fn global_moment(wf: &WaveFunction, app: &ApparatusParams) -> Result<f64> {
    Ok(default_joint(wf, app)?.global_moment())
}

/// `(Δx₁, Δx₂)` over the joint on default grids.
pub fn apparatus_dispersions(wf: &WaveFunction, app: &ApparatusParams) -> Result<(f64, f64)> {
    Ok(default_joint(wf, app)?.dispersions())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub b: f64,
    pub conditional_mean: f64,
    /// `|conditional mean − quantum local value|`.
    pub deviation: f64,
    /// Richardson estimate from this row and the previous one, assuming an
    /// error quadratic in `b` (position axis) or in `1/b` (momentum axis).
    pub extrapolated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitStudy {
    pub axis: Axis,
    pub value: f64,
    pub quantum: f64,
    pub rows: Vec<LimitRow>,
    /// Deviations never grow along the schedule.
    pub monotone: bool,
}

/// Conditional means along a schedule of `b` moving toward the limit in which
/// they reproduce the quantum local correlation: `b → 0` for the position
/// axis, `b → ∞` for the momentum axis.
pub fn limit_study(wf: &WaveFunction, axis: Axis, value: f64, schedule: &[f64]) -> Result<LimitStudy> {
    let toward_zero = axis == Axis::GivenPosition;
    let ordered = schedule
        .windows(2)
        .all(|w| if toward_zero { w[1] < w[0] } else { w[1] > w[0] });
    if !ordered {
        return Err(Error::ScheduleDirection {
            toward: if toward_zero { "zero" } else { "infinity" },
        });
    }
    let quantum = match axis {
        Axis::GivenPosition => local_p_given_q(wf, value)?,
        Axis::GivenMomentum => local_q_given_p(wf, value)?,
    };
    let mut rows: Vec<LimitRow> = Vec::with_capacity(schedule.len());
    for &b in schedule {
        let app = ApparatusParams::new(b)?;
        let mean = conditional_mean(wf, &app, axis, value)?;
        let extrapolated = rows.last().map(|prev| {
            let r = if toward_zero { b / prev.b } else { prev.b / b };
            let r2 = r * r;
            (mean - r2 * prev.conditional_mean) / (1.0 - r2)
        });
        rows.push(LimitRow {
            b,
            conditional_mean: mean,
            deviation: (mean - quantum).abs(),
            extrapolated,
        });
    }
    let monotone = rows.windows(2).all(|w| w[1].deviation <= w[0].deviation + 1e-12);
    Ok(LimitStudy {
        axis,
        value,
        quantum,
        rows,
        monotone,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeterodyneSample {
    pub x1: f64,
    pub x2: f64,
}

/// Samples from one seeded run.
#[derive(Debug, Clone, PartialEq)]
pub struct HeterodyneSamples {
    pub seed: u64,
    pub samples: Vec<HeterodyneSample>,
}

/// Samples per independent sub-stream.
pub const SAMPLE_CHUNK: usize = 4096;

/// Draws `n` readings from the gridded joint.
///
/// The joint is treated as piecewise constant on the cells between grid
/// points, each cell carrying the mean of its four corner values. A sample
/// picks an `x₁` cell row from the row masses, then a cell within the row from
/// that row's masses, then a uniform point inside the cell. Chunk `c` of
/// [`SAMPLE_CHUNK`] samples draws from sub-stream `c` of `seed`.
pub fn sample_heterodyne(joint: &JointDistributionGrid, n: usize, seed: u64) -> Result<HeterodyneSamples> {
    if n == 0 {
        return Err(Error::SampleCount { required: 1, found: 0 });
    }
    let n1 = joint.x1_grid.len() - 1;
    let n2 = joint.x2_grid.len() - 1;
    let mut columns = vec![0.0; n1 * n2];
    let mut rows = vec![0.0; n1];
    let mut total = 0.0;
    for i in 0..n1 {
        let mut acc = 0.0;
        for j in 0..n2 {
            let cell =
                0.25 * (joint.value(i, j) + joint.value(i + 1, j) + joint.value(i, j + 1) + joint.value(i + 1, j + 1));
            acc += cell;
            columns[i * n2 + j] = acc;
        }
        total += acc;
        rows[i] = total;
    }
    if !(total > 0.0) {
        return Err(Error::DegenerateDensity);
    }
    let (h1, h2) = (joint.x1_grid.step(), joint.x2_grid.step());
    let mut samples = Vec::with_capacity(n);
    for chunk in 0..n.div_ceil(SAMPLE_CHUNK) {
        let mut rng = SeededStream::substream(seed, chunk as u64);
        let count = SAMPLE_CHUNK.min(n - chunk * SAMPLE_CHUNK);
        for _ in 0..count {
            let u = rng.next_uniform() * total;
            let i = rows.partition_point(|&c| c <= u).min(n1 - 1);
            let row = &columns[i * n2..(i + 1) * n2];
            let v = rng.next_uniform() * row[n2 - 1];
            let j = row.partition_point(|&c| c <= v).min(n2 - 1);
            samples.push(HeterodyneSample {
                x1: joint.x1_grid.point(i) + rng.next_uniform() * h1,
                x2: joint.x2_grid.point(j) + rng.next_uniform() * h2,
            });
        }
    }
    Ok(HeterodyneSamples { seed, samples })
}

pub const MIN_ESTIMATE_SAMPLES: usize = 100;
/// Bins with fewer samples are flagged and left out of the curves.
pub const MIN_BIN_COUNT: usize = 10;

/// Bin edges for the conditional-mean curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinSpec {
    pub x1_edges: GridSpec,
    pub x2_edges: GridSpec,
}

impl BinSpec {
    /// `bins` equal bins spanning each axis of `joint`.
    pub fn covering(joint: &JointDistributionGrid, bins: usize) -> Result<Self> {
        let edges = |g: &GridSpec| GridSpec::new(g.x_min(), g.x_max(), bins + 1);
        Ok(Self {
            x1_edges: edges(&joint.x1_grid)?,
            x2_edges: edges(&joint.x2_grid)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinnedCurve {
    pub axis: Axis,
    pub centers: Vec<f64>,
    pub counts: Vec<usize>,
    /// `None` for bins with fewer than [`MIN_BIN_COUNT`] samples.
    pub means: Vec<Option<f64>>,
    pub standard_errors: Vec<Option<f64>>,
}

impl BinnedCurve {
    pub fn flagged(&self) -> impl Iterator<Item = usize> + '_ {
        self.means
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_none())
            .map(|(k, _)| k)
    }
}

/// A value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationEstimate {
    pub given_x1: BinnedCurve,
    pub given_x2: BinnedCurve,
    pub mean_x1: Estimate,
    pub mean_x2: Estimate,
    /// `⟨2x₁x₂⟩ − 2⟨x₁⟩⟨x₂⟩`.
    pub global: Estimate,
    pub sample_count: usize,
    pub seed: u64,
}

fn mean_and_error(values: impl Iterator<Item = f64> + Clone) -> (f64, f64, usize) {
    let (sum, n) = values.clone().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    let mean = sum / n as f64;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    let se = if n > 1 {
        (ss / (n - 1) as f64 / n as f64).sqrt()
    } else {
        0.0
    };
    (mean, se, n)
}

fn binned(axis: Axis, edges: &GridSpec, samples: &[HeterodyneSample]) -> BinnedCurve {
    let bins = edges.len() - 1;
    let mut members: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for s in samples {
        let (key, other) = match axis {
            Axis::GivenPosition => (s.x1, s.x2),
            Axis::GivenMomentum => (s.x2, s.x1),
        };
        if edges.contains(key) {
            members[edges.cell_of(key).min(bins - 1)].push(other);
        }
    }
    let mut curve = BinnedCurve {
        axis,
        centers: (0..bins).map(|k| edges.point(k) + 0.5 * edges.step()).collect(),
        counts: members.iter().map(Vec::len).collect(),
        means: Vec::with_capacity(bins),
        standard_errors: Vec::with_capacity(bins),
    };
    for m in &members {
        if m.len() < MIN_BIN_COUNT {
            curve.means.push(None);
            curve.standard_errors.push(None);
        } else {
            let (mean, se, _) = mean_and_error(m.iter().copied());
            curve.means.push(Some(mean));
            curve.standard_errors.push(Some(se));
        }
    }
    curve
}

/// Sample estimates of the conditional-mean curves and of the moments.
pub fn estimate_from_samples(run: &HeterodyneSamples, bins: &BinSpec) -> Result<CorrelationEstimate> {
    let s = &run.samples;
    if s.len() < MIN_ESTIMATE_SAMPLES {
        return Err(Error::SampleCount {
            required: MIN_ESTIMATE_SAMPLES,
            found: s.len(),
        });
    }
    let (m1, se1, n) = mean_and_error(s.iter().map(|s| s.x1));
    let (m2, se2, _) = mean_and_error(s.iter().map(|s| s.x2));
    let (cov, se_cov, _) = mean_and_error(s.iter().map(|s| (s.x1 - m1) * (s.x2 - m2)));
    // the sample covariance divides by n − 1
    let g = 2.0 * cov * n as f64 / (n - 1) as f64;
    Ok(CorrelationEstimate {
        given_x1: binned(Axis::GivenPosition, &bins.x1_edges, s),
        given_x2: binned(Axis::GivenMomentum, &bins.x2_edges, s),
        mean_x1: Estimate {
            value: m1,
            standard_error: se1,
        },
        mean_x2: Estimate {
            value: m2,
            standard_error: se2,
        },
        global: Estimate {
            value: g,
            standard_error: 2.0 * se_cov,
        },
        sample_count: n,
        seed: run.seed,
    })
}
