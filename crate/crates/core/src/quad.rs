//! Gauss-Legendre rules and hyperbola-split integration over rectangles.

use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn new(deg: usize) -> Self {
        let gl = GaussLegendre::new(deg).expect("degree >= 2");
        Self { nodes: gl.nodes().copied().collect(), weights: gl.weights().copied().collect() }
    }

    #[inline]
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let h = 0.5 * (b - a);
        let c = 0.5 * (b + a);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + h * x);
        }
        s * h
    }
}

pub fn gl8() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| Rule::new(8))
}

pub fn gl16() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| Rule::new(16))
}

pub fn gl32() -> &'static Rule {
    static R: OnceLock<Rule> = OnceLock::new();
    R.get_or_init(|| Rule::new(32))
}

/// Adaptive bisection driven by the 16-point rule against its two halves.
pub fn adaptive<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, f: &mut F) -> f64 {
    fn rec<F: FnMut(f64) -> f64>(a: f64, b: f64, whole: f64, tol: f64, depth: u32, f: &mut F) -> f64 {
        let m = 0.5 * (a + b);
        let l = gl16().integrate(a, m, &mut *f);
        let r = gl16().integrate(m, b, &mut *f);
        if (l + r - whole).abs() <= tol.max(4.0 * f64::EPSILON * (l + r).abs()) || depth >= 40 {
            return l + r;
        }
        rec(a, m, l, 0.5 * tol, depth + 1, f) + rec(m, b, r, 0.5 * tol, depth + 1, f)
    }
    let whole = gl16().integrate(a, b, &mut *f);
    rec(a, b, whole, tol, 0, f)
}

/// Integrate a function that is smooth between consecutive breakpoints.
pub fn piecewise<F: FnMut(f64) -> f64>(breaks: &[f64], rule: &Rule, mut f: F) -> f64 {
    let mut s = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            s += rule.integrate(w[0], w[1], &mut f);
        }
    }
    s
}

/// Intervals handled one by one before switching to the averaged form.
const EXACT_INTERVALS: f64 = 2048.0;

/// Integral of `g({1/(xy)})` over `[a, b] x [c, d]`, with `g` given on [0, 1).
///
/// The substitution s = 1/(xy) turns the double integral into
/// `int g({s}) rho(1/s) s^-2 ds`, where `rho` is the density of xy on the
/// rectangle. The s-line is cut at every integer (the hyperbolas xy = 1/m) and
/// at the two kinks of `rho`. Long runs of unit intervals far from the origin
/// use the period mean of `g` plus a first-order boundary correction.
pub fn rect_xy_periodic<G: Fn(f64) -> f64>(a: f64, b: f64, c: f64, d: f64, g: G) -> f64 {
    assert!(0.0 <= a && a < b && 0.0 <= c && c < d);
    let top = |s: f64| if c == 0.0 { b } else { b.min(1.0 / (s * c)) };
    let bot = |s: f64| if a == 0.0 { 1.0 / (s * d) } else { a.max(1.0 / (s * d)) };
    let w = |s: f64| {
        let (t, u) = (top(s), bot(s));
        if t <= u {
            0.0
        } else {
            (t / u).ln() / (s * s)
        }
    };
    let gbar = gl32().integrate(0.0, 1.0, &g);
    let cbar = gl32().integrate(0.0, 1.0, |u| (1.0 - u) * (g(u) - gbar));
    let f = |s: f64| g(s - s.floor()) * w(s);

    let s_lo = 1.0 / (b * d);
    let s_hi = if a == 0.0 || c == 0.0 { f64::INFINITY } else { 1.0 / (a * c) };
    let mut cuts = vec![s_lo];
    for k in [1.0 / (b * c), 1.0 / (a * d)] {
        if k.is_finite() && k > s_lo && k < s_hi {
            cuts.push(k);
        }
    }
    cuts.push(s_hi);
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());

    let mut total = 0.0;
    for p in cuts.windows(2) {
        let (p, q) = (p[0], p[1]);
        if !(q > p) {
            continue;
        }
        let m0 = p.ceil();
        if q <= m0 {
            total += gl16().integrate(p, q, f);
            continue;
        }
        total += gl16().integrate(p, m0, f);
        let m_end = if q.is_finite() { q.floor() } else { f64::INFINITY };
        let exact_end = m_end.min(m0 + EXACT_INTERVALS);
        let mut m = m0;
        while m < exact_end {
            total += gl16().integrate(m, m + 1.0, f);
            m += 1.0;
        }
        if m_end > exact_end {
            let a0 = exact_end;
            if m_end.is_finite() {
                total += gbar * smooth_integral(&w, a0, m_end) + cbar * (w(a0) - w(m_end));
            } else {
                total += gbar * tail_integral(a, b, c, d, a0) + cbar * w(a0);
            }
        }
        if q.is_finite() && q > m_end {
            total += gl16().integrate(m_end, q, f);
        }
    }
    total
}

/// Integral of a smooth positive weight over [a, b] on dyadic pieces.
fn smooth_integral<W: Fn(f64) -> f64>(w: &W, a: f64, b: f64) -> f64 {
    let mut s = 0.0;
    let mut lo = a;
    while lo < b {
        let hi = (2.0 * lo).min(b);
        s += gl32().integrate(lo, hi, w);
        lo = hi;
    }
    s
}

/// Closed form of the weight integral from `s0` to infinity once past both kinks.
fn tail_integral(a: f64, b: f64, c: f64, d: f64, s0: f64) -> f64 {
    match (a == 0.0, c == 0.0) {
        (true, true) => ((b * d).ln() + 1.0 + s0.ln()) / s0,
        (true, false) => (d / c).ln() / s0,
        (false, true) => (b / a).ln() / s0,
        (false, false) => 0.0,
    }
}
