//! Adaptive Gauss–Kronrod quadrature and Gauss–Legendre panel rules.
//!
//! Integrals over `[0, ∞)` are mapped to finite intervals: exponentially
//! decaying tails use `r = a + t/(1−t)`, algebraic tails `r ~ r^{−p}` use
//! `r = a·u^{−1/(p−1)}` which makes the mapped integrand bounded at `u = 0`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod 21-point nodes (positive half, descending) and weights; the
// embedded 10-point Gauss rule uses the odd-indexed nodes.
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_600_525_452_306,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances for the adaptive integrators.
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            max_subdivisions: 4000,
        }
    }
}

impl QuadOptions {
    pub fn with_abs_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// How the integrand decays at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tail {
    /// Faster than any power (e.g. `e^{−t}`).
    Exponential,
    /// Like `r^{−decay}` with `decay > 1`.
    Algebraic { decay: f64 },
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut gauss = 0.0;
    let mut kron = fc * WGK[10];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(10).enumerate() {
        let dx = h * x;
        let pair = f(c - dx) + f(c + dx);
        kron += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kron * h;
    let err = ((kron - gauss) * h).abs();
    (value, err)
}

/// Adaptive Gauss–Kronrod (G10/K21) on a finite interval.
///
/// Non-finite integrand values are reported as a numeric error rather than
/// silently propagated.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    opts: QuadOptions,
) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut evaluations = 0usize;
    let mut eval = |x: f64| {
        evaluations += 1;
        f(x)
    };
    let (v, e) = kronrod21(&mut eval, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value: v, error: e });
    let mut total = v;
    let mut total_err = e;
    let mut subdivisions = 1;
    loop {
        if !total.is_finite() || !total_err.is_finite() {
            return Err(Error::Numeric {
                method: "integrate",
                detail: format!("non-finite integrand on [{a}, {b}]"),
            });
        }
        if total_err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            break;
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::NonConvergence {
                method: "adaptive Gauss-Kronrod",
                achieved: total_err,
                requested: opts.abs_tol.max(opts.rel_tol * total.abs()),
            });
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a || mid >= seg.b {
            // interval exhausted at machine resolution
            heap.push(Segment {
                error: 0.0,
                ..seg
            });
            total_err -= seg.error;
            continue;
        }
        let (v1, e1) = kronrod21(&mut eval, seg.a, mid);
        let (v2, e2) = kronrod21(&mut eval, mid, seg.b);
        total += v1 + v2 - seg.value;
        total_err += e1 + e2 - seg.error;
        heap.push(Segment { a: seg.a, b: mid, value: v1, error: e1 });
        heap.push(Segment { a: mid, b: seg.b, value: v2, error: e2 });
        subdivisions += 1;
    }
    // re-sum to shed accumulated cancellation in the running totals
    let value: f64 = heap.iter().map(|s| s.value).sum();
    let error: f64 = heap.iter().map(|s| s.error).sum();
    Ok(Integral {
        value,
        error,
        evaluations,
    })
}

/// `∫_a^∞ f(r) dr` for `a ≥ 0` with the given tail behaviour.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    tail: Tail,
    opts: QuadOptions,
) -> Result<Integral> {
    match tail {
        Tail::Exponential => integrate(
            |t| {
                if t >= 1.0 {
                    return 0.0;
                }
                let u = 1.0 - t;
                let v = f(a + t / u) / (u * u);
                if v.is_finite() {
                    v
                } else {
                    0.0
                }
            },
            0.0,
            1.0,
            opts,
        ),
        Tail::Algebraic { decay } => {
            if !(decay > 1.0) {
                return Err(Error::Parameter(format!(
                    "algebraic tail needs decay > 1, got {decay}"
                )));
            }
            if a <= 0.0 {
                let head = integrate(&mut f, a, 1.0, opts)?;
                let rest = integrate_to_infinity(f, 1.0, tail, opts)?;
                return Ok(Integral {
                    value: head.value + rest.value,
                    error: head.error + rest.error,
                    evaluations: head.evaluations + rest.evaluations,
                });
            }
            let k = 1.0 / (decay - 1.0);
            integrate(
                |u| {
                    if u <= 0.0 {
                        return 0.0;
                    }
                    let r = a * u.powf(-k);
                    f(r) * a * k * u.powf(-k - 1.0)
                },
                0.0,
                1.0,
                opts,
            )
        }
    }
}

/// `∫_0^∞ f(t) dt` where `f(t) ~ t^{lead}` near the origin (`lead > −1`).
///
/// The substitution `t = u^m` with `m(lead+1) ≥ 2` removes the endpoint
/// singularity on `[0, 1]`; `[1, ∞)` is handled by [`integrate_to_infinity`].
pub fn integrate_half_line<F: FnMut(f64) -> f64>(
    mut f: F,
    lead: f64,
    tail: Tail,
    opts: QuadOptions,
) -> Result<Integral> {
    if !(lead > -1.0) {
        return Err(Error::Parameter(format!(
            "integrand t^{lead} is not integrable at 0"
        )));
    }
    let m = (2.0 / (lead + 1.0)).max(1.0);
    let head = integrate(
        |u| {
            if u <= 0.0 {
                return 0.0;
            }
            f(u.powf(m)) * m * u.powf(m - 1.0)
        },
        0.0,
        1.0,
        opts,
    )?;
    let rest = integrate_to_infinity(f, 1.0, tail, opts)?;
    Ok(Integral {
        value: head.value + rest.value,
        error: head.error + rest.error,
        evaluations: head.evaluations + rest.evaluations,
    })
}

/// Gauss–Legendre nodes and weights on `[−1, 1]` (Newton on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss–Legendre rule on consecutive panels `[b_i, b_{i+1}]`.
pub fn composite_rule(breaks: &[f64], points_per_panel: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(points_per_panel);
    let mut nodes = Vec::with_capacity((breaks.len().saturating_sub(1)) * points_per_panel);
    let mut weights = Vec::with_capacity(nodes.capacity());
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for (&x, &wt) in gx.iter().zip(&gw) {
            nodes.push(c + h * x);
            weights.push(h * wt);
        }
    }
    (nodes, weights)
}
