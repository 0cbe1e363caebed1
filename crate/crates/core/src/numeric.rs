//! Small numerical helpers shared across modules.

use std::sync::OnceLock;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes a unimodal function on `[lo, hi]` by golden-section search
/// until the bracket is narrower than `tol`. Returns `(argmax, max)`.
pub fn golden_section_max<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Golden-section minimization, see [`golden_section_max`].
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let (x, v) = golden_section_max(|t| -f(t), lo, hi, tol);
    (x, -v)
}

/// Least-squares slope of `ys` against `xs`.
pub fn ls_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Geometric grid from `lo` to `hi` (inclusive) with ratio at most `ratio`.
pub fn geometric_grid(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && ratio > 1.0);
    let steps = ((hi / lo).ln() / ratio.ln()).ceil().max(1.0) as usize;
    let step = (hi / lo).ln() / steps as f64;
    (0..=steps).map(|i| lo * (step * i as f64).exp()).collect()
}

const LAGUERRE_NODES: usize = 40;

/// Gauss–Laguerre nodes and weights for `∫_0^∞ e^{-t} φ(t) dt`.
pub fn gauss_laguerre() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = LAGUERRE_NODES;
        let nf = n as f64;
        let mut nodes = vec![0.0_f64; n];
        let mut out = Vec::with_capacity(n);
        let mut z = 0.0_f64;
        for i in 0..n {
            if i == 0 {
                z = 3.0 / (1.0 + 2.4 * nf);
            } else if i == 1 {
                z += 15.0 / (1.0 + 2.5 * nf);
            } else {
                let ai = (i - 1) as f64;
                z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - nodes[i - 2]);
            }
            let mut pp = 0.0;
            let mut p2 = 0.0;
            for _ in 0..100 {
                let mut p1 = 1.0_f64;
                p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = ((2.0 * jf + 1.0 - z) * p2 - jf * p3) / (jf + 1.0);
                }
                pp = (nf * p1 - nf * p2) / z;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs() {
                    break;
                }
            }
            nodes[i] = z;
            out.push((z, -1.0 / (pp * nf * p2)));
        }
        out
    })
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const GAUSS7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Returns the Kronrod value, the Kronrod-Gauss difference and `∫|f|`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_WEIGHTS[7];
    let mut g = fc * GAUSS7_WEIGHTS[3];
    let mut abs = fc.abs() * GK_WEIGHTS[7];
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let (fl, fr) = (f(c - dx), f(c + dx));
        k += GK_WEIGHTS[i] * (fl + fr);
        abs += GK_WEIGHTS[i] * (fl.abs() + fr.abs());
        if i % 2 == 1 {
            g += GAUSS7_WEIGHTS[i / 2] * (fl + fr);
        }
    }
    (k * h, ((k - g) * h).abs(), abs * h.abs())
}

/// Most subintervals [`integrate`] will create.
const MAX_INTERVALS: usize = 1 << 14;

struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    abs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature of `f` over `[a, b]`.
///
/// The panel with the largest error estimate is bisected until the total
/// error is below `max(abs_tol, rel_tol |I|)`, every remaining estimate is at
/// roundoff level, or [`MAX_INTERVALS`] panels exist. Returns
/// `(integral, error estimate)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let panel = |lo: f64, hi: f64| {
        let (value, error, abs) = gk15(&f, lo, hi);
        Panel { lo, hi, value, error, abs }
    };
    let first = panel(a, b);
    let (mut total, mut error) = (first.value, first.error);
    let mut heap = std::collections::BinaryHeap::from([first]);
    while heap.len() < MAX_INTERVALS && error > abs_tol.max(rel_tol * total.abs()) {
        let worst = heap.pop().expect("heap is never empty");
        // roundoff level: further bisection cannot help
        if worst.error <= 50.0 * f64::EPSILON * worst.abs {
            heap.push(worst);
            break;
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let (l, r) = (panel(worst.lo, mid), panel(mid, worst.hi));
        total += l.value + r.value - worst.value;
        error += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to drop the drift of the running updates
    let total = heap.iter().map(|p| p.value).sum();
    let error = heap.iter().map(|p| p.error).sum();
    (total, error)
}
