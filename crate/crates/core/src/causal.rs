//! Roy-Singh causal phase-space densities as monotone transport curves, the
//! correlationless product density, and convex combinations fitted to the
//! quantum global correlation.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::numerics::{Cdf, GridSpec, MonotoneMap, Orientation};
use crate::quantum::{self, max_of, Axis, CorrelationReport, LocalCorrelationCurve, SUPPORT_THRESHOLD};
use crate::states::{moments, MomentReport, WaveFunction};

/// Orientation `ε` of a causal density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn sign(self) -> f64 {
        match self {
            Epsilon::Plus => 1.0,
            Epsilon::Minus => -1.0,
        }
    }

    pub fn orientation(self) -> Orientation {
        match self {
            Epsilon::Plus => Orientation::Increasing,
            Epsilon::Minus => Orientation::Decreasing,
        }
    }
}

/// Both grids are refined by this factor before the marginal CDFs are built.
pub const CURVE_REFINEMENT: usize = 4;
/// Probability trimmed from each end in [`TransportCurve::pushforward_distance`].
pub const PUSHFORWARD_TRIM: f64 = 1e-6;
const MAX_SPLIT_DEPTH: u32 = 40;

const GAUSS_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GAUSS_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_8,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_8,
];

/// The curve `p = Π_ε(q)` carrying the delta-supported density
/// `ρ_ε(q, p) = |φ(q)|² δ(p − Π_ε(q))`.
///
/// `Π₊ = F_p⁻¹ ∘ F_q` and `Π₋ = F_p⁻¹ ∘ (1 − F_q)`, with `F_q`, `F_p` the
/// cumulative distributions of the two quantum marginals.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportCurve {
    epsilon: Epsilon,
    map: MonotoneMap,
    q_grid: GridSpec,
    p_grid: GridSpec,
    q_density: Vec<f64>,
    p_density: Vec<f64>,
    fine_q: GridSpec,
    fine_p_step: f64,
    q_cdf: Cdf,
    p_cdf: Cdf,
    moments: MomentReport,
}

/// Moments of a coupling: `E[q]`, `E[p]`, `E[qp]`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Coupling {
    q: f64,
    p: f64,
    qp: f64,
    mass: f64,
}

impl TransportCurve {
    pub fn epsilon(&self) -> Epsilon {
        self.epsilon
    }

    /// Samples of `Π_ε` at the position grid points spanning the support.
    pub fn map(&self) -> &MonotoneMap {
        &self.map
    }

    pub fn q_grid(&self) -> &GridSpec {
        &self.q_grid
    }

    pub fn p_grid(&self) -> &GridSpec {
        &self.p_grid
    }

    /// `|φ(q)|²` on the position grid.
    pub fn source_density(&self) -> &[f64] {
        &self.q_density
    }

    pub fn target_density(&self) -> &[f64] {
        &self.p_density
    }

    pub fn moments(&self) -> &MomentReport {
        &self.moments
    }

    /// `Π_ε(q)`.
    pub fn eval(&self, q: f64) -> f64 {
        let t = self.q_cdf.tail(q);
        match self.epsilon {
            Epsilon::Plus => self.p_cdf.quantile_of(t),
            Epsilon::Minus => self.p_cdf.quantile_of(t.reflect()),
        }
    }

    /// `Π_ε⁻¹(p)`.
    pub fn inverse(&self, p: f64) -> f64 {
        let t = self.p_cdf.tail(p);
        match self.epsilon {
            Epsilon::Plus => self.q_cdf.quantile_of(t),
            Epsilon::Minus => self.q_cdf.quantile_of(t.reflect()),
        }
    }

    /// `|φ(q)|²` at any `q`, from the interpolated position distribution.
    pub fn source_density_at(&self, q: f64) -> f64 {
        self.q_cdf.density(q)
    }

    /// Density at `p` of the pushforward of `|φ(q)|²` through `Π_ε`, by
    /// central differences of the pushed distribution function.
    pub fn pushforward_density(&self, p: f64) -> f64 {
        let delta = 1e-3 * self.fine_p_step;
        let pushed = |p: f64| {
            let t = self.q_cdf.tail(self.inverse(p));
            match self.epsilon {
                Epsilon::Plus => t,
                Epsilon::Minus => t.reflect(),
            }
        };
        let (lo, hi) = (pushed(p - delta), pushed(p + delta));
        let mass = if lo.below <= 0.5 {
            hi.below - lo.below
        } else {
            lo.above - hi.above
        };
        (mass / (2.0 * delta)).max(0.0)
    }

    fn supported(&self, axis: Axis, x: f64) -> bool {
        let (cdf, density) = match axis {
            Axis::GivenPosition => (&self.q_cdf, &self.q_density),
            Axis::GivenMomentum => (&self.p_cdf, &self.p_density),
        };
        let d = cdf.density(x);
        d > 0.0 && d >= SUPPORT_THRESHOLD * max_of(density)
    }

    /// Visits the fine position cells carrying mass, split until `Π_ε` moves
    /// by at most `resolution` across each piece. `visit(a, b, Π(a), Π(b))`.
    fn for_each_piece(&self, resolution: f64, mut visit: impl FnMut(f64, f64)) {
        let g = &self.fine_q;
        let mut stack: Vec<(f64, f64, f64, f64, u32)> = Vec::new();
        let mut prev = (g.point(0), self.eval(g.point(0)));
        for k in 1..g.len() {
            let b = g.point(k);
            let pb = self.eval(b);
            let (a, pa) = prev;
            prev = (b, pb);
            if self.q_cdf.density(0.5 * (a + b)) <= 0.0 && self.q_cdf.below(b) - self.q_cdf.below(a) <= 0.0 {
                continue;
            }
            stack.push((a, b, pa, pb, 0));
            while let Some((a, b, pa, pb, depth)) = stack.pop() {
                if (pb - pa).abs() > resolution && depth < MAX_SPLIT_DEPTH {
                    let m = 0.5 * (a + b);
                    let pm = self.eval(m);
                    stack.push((m, b, pm, pb, depth + 1));
                    stack.push((a, m, pa, pm, depth + 1));
                } else {
                    visit(a, b);
                }
            }
        }
    }

    fn coupling(&self) -> Coupling {
        let mut c = Coupling::default();
        self.for_each_piece(self.fine_p_step, |a, b| {
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, w) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                let q = mid + half * x;
                let dm = w * half * self.q_cdf.density(q);
                let p = self.eval(q);
                c.mass += dm;
                c.q += dm * q;
                c.p += dm * p;
                c.qp += dm * q * p;
            }
        });
        c
    }

    /// Largest horizontal gap between the quantile functions of the
    /// pushforward of `|φ(q)|²` through `Π_ε` and of the gridded `|φ̃(p)|²`,
    /// over probability levels in `[trim, 1 − trim]`, in units of the
    /// momentum grid step.
    ///
    /// The source is split into atoms each of whose images spans at most half
    /// a momentum step; the target atoms are the momentum grid points.
    pub fn pushforward_distance(&self, trim: f64) -> f64 {
        let hp = self.p_grid.step();
        let mut pushed: Vec<(f64, f64)> = Vec::new();
        self.for_each_piece(0.5 * hp, |a, b| {
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            let mass: f64 = GAUSS_NODES
                .iter()
                .zip(GAUSS_WEIGHTS)
                .map(|(x, w)| w * half * self.q_cdf.density(mid + half * x))
                .sum();
            if mass > 0.0 {
                pushed.push((self.eval(mid), mass));
            }
        });
        if self.epsilon == Epsilon::Minus {
            pushed.reverse();
        }
        let target: Vec<(f64, f64)> = self
            .p_grid
            .points()
            .zip(&self.p_density)
            .filter(|(_, &d)| d > 0.0)
            .map(|(p, &d)| (p, d * hp))
            .collect();
        quantile_gap(&pushed, &target, trim) / hp
    }
}

/// Sup of `|Q_a(u) − Q_b(u)|` over `u ∈ [trim, 1 − trim]` for two sorted
/// weighted atom lists, each normalized to unit mass.
fn quantile_gap(a: &[(f64, f64)], b: &[(f64, f64)], trim: f64) -> f64 {
    let ta: f64 = a.iter().map(|x| x.1).sum();
    let tb: f64 = b.iter().map(|x| x.1).sum();
    let (mut i, mut j) = (0, 0);
    let (mut ca, mut cb) = (a[0].1 / ta, b[0].1 / tb);
    let mut gap: f64 = 0.0;
    loop {
        // both quantile functions are constant on (u_prev, min(ca, cb)]
        let u = ca.min(cb);
        if u >= trim {
            gap = gap.max((a[i].0 - b[j].0).abs());
        }
        if u >= 1.0 - trim {
            break;
        }
        if ca <= cb {
            i += 1;
            if i == a.len() {
                break;
            }
            ca += a[i].1 / ta;
        } else {
            j += 1;
            if j == b.len() {
                break;
            }
            cb += b[j].1 / tb;
        }
    }
    gap
}

pub fn build_transport_curve(wf: &WaveFunction, epsilon: Epsilon) -> Result<TransportCurve> {
    let q_density = wf.position_density();
    let p_density = wf.momentum_density();
    if max_of(&q_density) <= 0.0 || max_of(&p_density) <= 0.0 {
        return Err(Error::DegenerateDensity);
    }
    let fine = wf.refined(CURVE_REFINEMENT, CURVE_REFINEMENT)?;
    let q_cdf = Cdf::from_density(&fine.position_density(), fine.position_grid())?;
    let p_cdf = Cdf::from_density(&fine.momentum_density(), fine.momentum_grid())?;
    let q_grid = *wf.position_grid();
    let floor = SUPPORT_THRESHOLD * max_of(&q_density);
    let first = q_density
        .iter()
        .position(|&d| d >= floor)
        .ok_or(Error::DegenerateDensity)?;
    let last = q_density
        .iter()
        .rposition(|&d| d >= floor)
        .ok_or(Error::DegenerateDensity)?;
    let mut curve = TransportCurve {
        epsilon,
        map: MonotoneMap::new(alloc::vec![0.0, 1.0], alloc::vec![0.0, 0.0], None)?,
        q_grid,
        p_grid: *wf.momentum_grid(),
        q_density,
        p_density,
        fine_q: *fine.position_grid(),
        fine_p_step: fine.momentum_grid().step(),
        q_cdf,
        p_cdf,
        moments: moments(wf)?,
    };
    let inputs: Vec<f64> = (first..=last.max(first + 1)).map(|k| q_grid.point(k)).collect();
    let outputs: Vec<f64> = inputs.iter().map(|&q| curve.eval(q)).collect();
    curve.map = MonotoneMap::new(inputs, outputs, None)?;
    Ok(curve)
}

/// Conditional mean under `ρ_ε`: `Π_ε(q)` given a position, `Π_ε⁻¹(p)` given
/// a momentum.
pub fn causal_conditional(curve: &TransportCurve, axis: Axis, value: f64) -> Result<f64> {
    if !curve.supported(axis, value) {
        return Err(Error::Unsupported { value });
    }
    Ok(match axis {
        Axis::GivenPosition => curve.eval(value),
        Axis::GivenMomentum => curve.inverse(value),
    })
}

/// `2∫ q Π_ε(q) |φ(q)|² dq − 2⟨q⟩⟨p⟩`, with all three moments taken over
/// the coupling itself.
pub fn causal_global(curve: &TransportCurve) -> Result<f64> {
    let c = curve.coupling();
    if !(c.mass > 0.0) {
        return Err(Error::DegenerateDensity);
    }
    let (q, p) = (c.q / c.mass, c.p / c.mass);
    Ok(2.0 * (c.qp / c.mass - q * p))
}

fn masked_curve(axis: Axis, grid: &GridSpec, density: &[f64], f: impl Fn(f64) -> f64) -> LocalCorrelationCurve {
    let floor = SUPPORT_THRESHOLD * max_of(density);
    LocalCorrelationCurve {
        axis,
        points: grid.points().collect(),
        means: grid
            .points()
            .zip(density)
            .map(|(x, &d)| (d > 0.0 && d >= floor).then(|| f(x)))
            .collect(),
    }
}

/// Conditional means and global correlation of a single `ρ_ε`.
pub fn causal_report(curve: &TransportCurve) -> Result<CorrelationReport> {
    Ok(CorrelationReport {
        given_q: masked_curve(Axis::GivenPosition, &curve.q_grid, &curve.q_density, |q| curve.eval(q)),
        given_p: masked_curve(Axis::GivenMomentum, &curve.p_grid, &curve.p_density, |p| {
            curve.inverse(p)
        }),
        global: causal_global(curve)?,
        moments: curve.moments,
    })
}

/// Report for the product density `|φ(q)|² |φ̃(p)|²`.
pub fn correlationless_reference(wf: &WaveFunction) -> Result<CorrelationReport> {
    let m = moments(wf)?;
    Ok(CorrelationReport {
        given_q: masked_curve(Axis::GivenPosition, wf.position_grid(), &wf.position_density(), |_| {
            m.mean_p
        }),
        given_p: masked_curve(Axis::GivenMomentum, wf.momentum_grid(), &wf.momentum_density(), |_| {
            m.mean_q
        }),
        global: 0.0,
        moments: m,
    })
}

/// `λ₊ ρ₊ + λ₋ ρ₋`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalCombo {
    pub curve_plus: TransportCurve,
    pub curve_minus: TransportCurve,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub global_plus: f64,
    pub global_minus: f64,
}

/// Combination with fixed weights.
pub fn combine(wf: &WaveFunction, lambda_plus: f64) -> Result<CausalCombo> {
    if !(0.0..=1.0).contains(&lambda_plus) {
        return Err(Error::InvalidParameter {
            name: "lambda_plus",
            value: lambda_plus,
        });
    }
    let curve_plus = build_transport_curve(wf, Epsilon::Plus)?;
    let curve_minus = build_transport_curve(wf, Epsilon::Minus)?;
    Ok(CausalCombo {
        global_plus: causal_global(&curve_plus)?,
        global_minus: causal_global(&curve_minus)?,
        curve_plus,
        curve_minus,
        lambda_plus,
        lambda_minus: 1.0 - lambda_plus,
    })
}

/// `(λ₊, λ₋)` with `λ₊ g₊ + λ₋ g₋ = g` and `λ₊ + λ₋ = 1`:
/// `λ₊ = (g − g₋)/(g₊ − g₋)`, or `1/2` when the two causal globals coincide.
pub fn convex_weights(quantum: f64, plus: f64, minus: f64) -> Result<(f64, f64)> {
    let spread = plus - minus;
    let lambda = if spread.abs() <= 1e-14 * (plus.abs() + minus.abs()) {
        0.5
    } else {
        (quantum - minus) / spread
    };
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Infeasible { quantum, plus, minus });
    }
    Ok((lambda, 1.0 - lambda))
}

/// The combination of `ρ₊` and `ρ₋` reproducing the quantum global
/// correlation.
pub fn fit_convex_combination(wf: &WaveFunction) -> Result<CausalCombo> {
    let mut combo = combine(wf, 0.5)?;
    let quantum = quantum::global_correlation(wf)?;
    let (lp, lm) = convex_weights(quantum, combo.global_plus, combo.global_minus)?;
    combo.lambda_plus = lp;
    combo.lambda_minus = lm;
    Ok(combo)
}

/// Conditional means and global correlation of the combination.
pub fn combo_correlations(combo: &CausalCombo) -> Result<CorrelationReport> {
    let (a, b) = (&combo.curve_plus, &combo.curve_minus);
    let (lp, lm) = (combo.lambda_plus, combo.lambda_minus);
    Ok(CorrelationReport {
        given_q: masked_curve(Axis::GivenPosition, &a.q_grid, &a.q_density, |q| {
            lp * a.eval(q) + lm * b.eval(q)
        }),
        given_p: masked_curve(Axis::GivenMomentum, &a.p_grid, &a.p_density, |p| {
            lp * a.inverse(p) + lm * b.inverse(p)
        }),
        global: lp * combo.global_plus + lm * combo.global_minus,
        moments: a.moments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{
        build_gaussian_packet, build_generalized_coherent, build_hermite_superposition, hermite_superposition_grid,
        GaussianPacketParams, GeneralizedCoherentParams,
    };
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn packet(alpha: f64, beta: f64, t: f64) -> (GaussianPacketParams, WaveFunction) {
        let p = GaussianPacketParams::new(alpha, beta, t).unwrap();
        (p, build_gaussian_packet(&p, &p.auto_grid().unwrap()).unwrap())
    }

    fn fock(n: usize, amplitude: f64, theta: f64) -> (GeneralizedCoherentParams, WaveFunction) {
        let p = GeneralizedCoherentParams::new(n, amplitude, theta, 1.0, 0.0).unwrap();
        (p, build_generalized_coherent(&p, &p.auto_grid().unwrap()).unwrap())
    }

    const COEFFS: [(f64, f64); 4] = [(0.5, 0.2), (-0.3, 0.4), (0.1, -0.6), (0.3, 0.3)];

    fn superposition() -> WaveFunction {
        let c: Vec<Complex64> = COEFFS.iter().map(|&(r, i)| Complex64::new(r, i)).collect();
        build_hermite_superposition(&c, 0.0, &hermite_superposition_grid(3, 0.0).unwrap()).unwrap()
    }

    // `h_k` transforms to `(−i)^k h_k`; the median comes from a fine
    // trapezoid accumulation of the closed-form density.
    fn superposition_median(momentum: bool) -> f64 {
        let phase = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
        ];
        let density = |x: f64| {
            let h = crate::numerics::hermite_functions(3, x).unwrap();
            let mut a = Complex64::new(0.0, 0.0);
            for k in 0..4 {
                let c = Complex64::new(COEFFS[k].0, COEFFS[k].1);
                a += if momentum { c * phase[k] } else { c } * h[k];
            }
            a.norm_sqr()
        };
        let (lo, h, n) = (-12.0, 1e-4, 240_000);
        let mut cum = alloc::vec![0.0; n + 1];
        for k in 1..=n {
            let x = lo + h * k as f64;
            cum[k] = cum[k - 1] + 0.5 * h * (density(x - h) + density(x));
        }
        let half = 0.5 * cum[n];
        let k = cum.iter().position(|&c| c >= half).unwrap();
        lo + h * (k - 1) as f64 + h * (half - cum[k - 1]) / (cum[k] - cum[k - 1])
    }

    #[test]
    fn equal_width_gaussian_is_identity() {
        let (_, wf) = packet(1.0, 0.0, 0.0);
        let plus = build_transport_curve(&wf, Epsilon::Plus).unwrap();
        let minus = build_transport_curve(&wf, Epsilon::Minus).unwrap();
        assert_abs_diff_eq!(plus.eval(0.5), 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(minus.eval(0.5), -0.5, epsilon = 1e-8);
        assert_eq!(plus.map().orientation(), Orientation::Increasing);
        assert_eq!(minus.map().orientation(), Orientation::Decreasing);
    }

    #[test]
    fn gaussian_curves_match_quantile_slopes() {
        for (alpha, beta, t) in [(1.0, 0.0, 1.0), (2.0, 0.4, -0.6), (0.6, -1.0, 2.5)] {
            let (p, wf) = packet(alpha, beta, t);
            let slope = p.delta_p() / p.delta_q();
            for eps in [Epsilon::Plus, Epsilon::Minus] {
                let curve = build_transport_curve(&wf, eps).unwrap();
                for z in [-3.0, -1.2, 0.0, 0.7, 2.5] {
                    let q = p.mean_q() + z * p.delta_q();
                    let want = beta + eps.sign() * slope * (q - p.mean_q());
                    assert!((curve.eval(q) - want).abs() < 1e-6, "{q}");
                    assert!((curve.inverse(want) - q).abs() < 1e-6, "{q}");
                }
            }
        }
    }

    #[test]
    fn medians_are_matched() {
        let wf = superposition();
        let (mq, mp) = (superposition_median(false), superposition_median(true));
        let curve = build_transport_curve(&wf, Epsilon::Plus).unwrap();
        assert_abs_diff_eq!(curve.eval(mq), mp, epsilon = 1e-6);
        let curve = build_transport_curve(&wf, Epsilon::Minus).unwrap();
        assert_abs_diff_eq!(curve.eval(mq), mp, epsilon = 1e-6);
    }

    #[test]
    fn fock_curves_cross_nodes() {
        // both marginals are the same shifted |h_n|², nodes included
        for n in 1..4 {
            let (p, wf) = fock(n, 1.3, 0.4);
            let curve = build_transport_curve(&wf, Epsilon::Plus).unwrap();
            for z in [-2.0, -1.0, -0.3, 0.0, 0.4, 1.5] {
                let q = p.q_bar() + z;
                assert!((curve.eval(q) - (p.p_bar() + z)).abs() < 1e-6, "n={n} z={z}");
            }
            let (lo, hi) = curve.map().domain();
            let samples: Vec<(f64, f64)> = curve.map().samples().collect();
            assert!(samples.windows(2).all(|w| w[1].1 > w[0].1));
            assert!(lo < p.q_bar() - 3.0 && hi > p.q_bar() + 3.0);
        }
    }

    #[test]
    fn conditional_examples() {
        let (_, wf) = packet(1.0, 0.0, 1.0);
        let plus = build_transport_curve(&wf, Epsilon::Plus).unwrap();
        let got = causal_conditional(&plus, Axis::GivenPosition, 1.0).unwrap();
        assert_abs_diff_eq!(got, 0.5f64.sqrt(), epsilon = 1e-8);
        let got = causal_conditional(&plus, Axis::GivenMomentum, 1.0).unwrap();
        assert_abs_diff_eq!(got, 2.0f64.sqrt(), epsilon = 1e-8);

        let p = GeneralizedCoherentParams::from_alpha(2, Complex64::new(0.0, 1.1), 1.0, 0.0).unwrap();
        let wf = build_generalized_coherent(&p, &p.auto_grid().unwrap()).unwrap();
        let minus = build_transport_curve(&wf, Epsilon::Minus).unwrap();
        let got = causal_conditional(&minus, Axis::GivenPosition, 0.7).unwrap();
        assert_abs_diff_eq!(got, 1.1 - 0.7, epsilon = 1e-6);
    }

    #[test]
    fn conditional_outside_support_is_rejected() {
        let (_, wf) = packet(1.0, 0.0, 1.0);
        let plus = build_transport_curve(&wf, Epsilon::Plus).unwrap();
        assert!(matches!(
            causal_conditional(&plus, Axis::GivenPosition, 40.0),
            Err(Error::Unsupported { .. })
        ));
        assert!(matches!(
            causal_conditional(&plus, Axis::GivenMomentum, -9.0),
            Err(Error::Unsupported { .. })
        ));
    }

    #[test]
    fn single_curve_report() {
        let (p, wf) = packet(1.0, 0.0, 1.0);
        let curve = build_transport_curve(&wf, Epsilon::Minus).unwrap();
        let report = causal_report(&curve).unwrap();
        assert_abs_diff_eq!(report.global, -2.0f64.sqrt(), epsilon = 1e-8);
        let slope = p.delta_p() / p.delta_q();
        for (q, v) in report.given_q.supported().filter(|(q, _)| q.abs() < 5.0) {
            assert!((v + slope * q).abs() < 1e-6);
        }
    }

    #[test]
    fn gaussian_globals() {
        let (p, wf) = packet(1.0, 0.0, 1.0);
        let want = 2.0 * p.delta_q() * p.delta_p();
        assert_abs_diff_eq!(want, 2.0f64.sqrt(), epsilon = 1e-12);
        let plus = causal_global(&build_transport_curve(&wf, Epsilon::Plus).unwrap()).unwrap();
        let minus = causal_global(&build_transport_curve(&wf, Epsilon::Minus).unwrap()).unwrap();
        assert_abs_diff_eq!(plus, want, epsilon = 1e-8);
        assert_abs_diff_eq!(minus, -want, epsilon = 1e-8);
    }

    #[test]
    fn fock_globals() {
        let (_, wf) = fock(2, 1.3, 0.4);
        let g = causal_global(&build_transport_curve(&wf, Epsilon::Plus).unwrap()).unwrap();
        assert_abs_diff_eq!(g, 5.0, epsilon = 1e-8);
        let (_, wf) = fock(0, 1.3, 0.4);
        let g = causal_global(&build_transport_curve(&wf, Epsilon::Minus).unwrap()).unwrap();
        assert_abs_diff_eq!(g, -1.0, epsilon = 1e-8);
    }

    #[test]
    fn reference_is_flat() {
        let wf = superposition();
        let report = correlationless_reference(&wf).unwrap();
        assert_eq!(report.global, 0.0);
        let m = report.moments;
        assert!(report.given_q.supported().all(|(_, v)| v == m.mean_p));
        assert!(report.given_p.supported().all(|(_, v)| v == m.mean_q));
        assert!(report.given_q.supported().count() > 100);

        let (_, wf) = fock(1, 0.8, -1.0);
        let reference = correlationless_reference(&wf).unwrap();
        let exact = quantum::report(&wf).unwrap();
        assert!(reference.given_q.max_deviation(&exact.given_q).unwrap() < 1e-8);
        assert!(reference.given_p.max_deviation(&exact.given_p).unwrap() < 1e-8);
        assert_abs_diff_eq!(reference.global, exact.global, epsilon = 1e-10);
    }

    #[test]
    fn lambda_for_spreading_packet() {
        let (_, wf) = packet(1.0, 0.0, 1.0);
        let combo = fit_convex_combination(&wf).unwrap();
        let r = 0.5 * 0.5f64.sqrt();
        assert_abs_diff_eq!(combo.lambda_plus, 0.5 + r, epsilon = 1e-8);
        assert_abs_diff_eq!(combo.lambda_minus, 0.5 - r, epsilon = 1e-8);
        assert_abs_diff_eq!(combo.lambda_plus, 0.8536, epsilon = 1e-4);

        let report = combo_correlations(&combo).unwrap();
        let at_one = report.given_q.supported().find(|(q, _)| (q - 1.0).abs() < 1e-12);
        let exact = quantum::local_p_given_q(&wf, 1.0).unwrap();
        assert_abs_diff_eq!(exact, 0.5, epsilon = 1e-10);
        let value = (combo.lambda_plus - combo.lambda_minus) * combo.curve_plus.eval(1.0);
        assert_abs_diff_eq!(value, 0.5, epsilon = 1e-7);
        if let Some((_, v)) = at_one {
            assert_abs_diff_eq!(v, 0.5, epsilon = 1e-7);
        }
        assert_abs_diff_eq!(report.global, quantum::global_correlation(&wf).unwrap(), epsilon = 1e-8);
    }

    #[test]
    fn lambda_is_half_without_correlation() {
        let (_, wf) = packet(1.7, 0.3, 0.0);
        let combo = fit_convex_combination(&wf).unwrap();
        assert_abs_diff_eq!(combo.lambda_plus, 0.5, epsilon = 1e-8);
        for n in 0..3 {
            let (p, wf) = fock(n, 1.3, 0.4);
            let combo = fit_convex_combination(&wf).unwrap();
            assert_abs_diff_eq!(combo.lambda_plus, 0.5, epsilon = 1e-8);
            let report = combo_correlations(&combo).unwrap();
            for (_, v) in report.given_q.supported() {
                assert!((v - p.p_bar()).abs() < 1e-5);
            }
            for (_, v) in report.given_p.supported() {
                assert!((v - p.q_bar()).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn convex_weight_edges() {
        assert_eq!(convex_weights(0.0, 0.0, 0.0).unwrap(), (0.5, 0.5));
        assert_eq!(convex_weights(2.0, 2.0, -2.0).unwrap(), (1.0, 0.0));
        assert_eq!(convex_weights(-2.0, 2.0, -2.0).unwrap(), (0.0, 1.0));
        assert!(matches!(
            convex_weights(3.0, 2.0, -2.0),
            Err(Error::Infeasible { quantum, .. }) if quantum == 3.0
        ));
        assert!(matches!(
            combine(&superposition(), 1.5),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn superposition_marginals_and_fit() {
        let wf = superposition();
        let combo = fit_convex_combination(&wf).unwrap();
        for curve in [&combo.curve_plus, &combo.curve_minus] {
            assert!(curve.pushforward_distance(PUSHFORWARD_TRIM) < 2.0);
        }
        let report = combo_correlations(&combo).unwrap();
        let exact = quantum::global_correlation(&wf).unwrap();
        assert_abs_diff_eq!(report.global, exact, epsilon = 1e-8);
        assert!((0.0..=1.0).contains(&combo.lambda_plus));
    }

    #[test]
    fn pushforward_of_mismatched_curve_is_large() {
        let (_, wf) = packet(1.0, 0.0, 1.0);
        let mut curve = build_transport_curve(&wf, Epsilon::Plus).unwrap();
        curve.p_density.rotate_right(40);
        let d = curve.pushforward_distance(PUSHFORWARD_TRIM);
        assert!((d - 40.0).abs() < 2.0, "{d}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn gaussian_family_invariants(alpha in 0.4f64..2.5, beta in -1.0f64..1.0, t in -2.0f64..2.0) {
            let (p, wf) = packet(alpha, beta, t);
            let combo = fit_convex_combination(&wf).unwrap();
            let product = p.delta_q() * p.delta_p();
            let root = 0.5 * (1.0 - (2.0 * product).powi(-2)).max(0.0).sqrt();
            let want = 0.5 + t.signum() * root;
            prop_assert!((combo.lambda_plus - want).abs() < 1e-8);
            prop_assert!((0.0..=1.0).contains(&combo.lambda_plus));
            prop_assert!((combo.global_plus + combo.global_minus).abs() < 1e-6);
            for curve in [&combo.curve_plus, &combo.curve_minus] {
                prop_assert!(curve.pushforward_distance(PUSHFORWARD_TRIM) < 2.0);
                let s: Vec<(f64, f64)> = curve.map().samples().collect();
                let step = curve.epsilon().sign();
                prop_assert!(s.windows(2).all(|w| step * (w[1].1 - w[0].1) > 0.0));
            }
            let report = combo_correlations(&combo).unwrap();
            let exact = quantum::report(&wf).unwrap();
            prop_assert!(report.given_q.max_deviation(&exact.given_q).unwrap() < 1e-5);
            prop_assert!(report.given_p.max_deviation(&exact.given_p).unwrap() < 1e-5);
        }

        #[test]
        fn coherent_family_invariants(n in 0usize..4, amplitude in 0.0f64..2.0, theta in -3.0f64..3.0) {
            let (_, wf) = fock(n, amplitude, theta);
            let combo = fit_convex_combination(&wf).unwrap();
            let g = 2.0 * n as f64 + 1.0;
            prop_assert!((combo.global_plus - g).abs() < 1e-6);
            prop_assert!((combo.global_minus + g).abs() < 1e-6);
            prop_assert!((combo.lambda_plus - 0.5).abs() < 1e-8);
            for curve in [&combo.curve_plus, &combo.curve_minus] {
                prop_assert!(curve.pushforward_distance(PUSHFORWARD_TRIM) < 2.0);
            }
        }
    }
}
