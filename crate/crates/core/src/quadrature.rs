//! Composite Gauss-Legendre rules.

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;

/// Nodes per panel.
pub const PANEL_ORDER: usize = 16;

fn reference() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        let mut pairs = GaussLegendre::new(PANEL_ORDER).expect("order >= 2").into_node_weight_pairs();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs
    })
}

/// `(node, weight)` pairs of `panels` equal Gauss-Legendre panels on
/// `[a, b]`, in increasing node order.
pub fn composite(a: f64, b: f64, panels: usize) -> Vec<(f64, f64)> {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * PANEL_ORDER);
    for p in 0..panels {
        let lo = a + h * p as f64;
        for &(x, w) in reference() {
            out.push((lo + 0.5 * h * (x + 1.0), 0.5 * h * w));
        }
    }
    out
}

/// Panel breaks on `[a, b]`: width `fine` at `peak`, growing by 1.25 away
/// from it.
fn graded_breaks(a: f64, b: f64, peak: f64, fine: f64) -> Vec<f64> {
    let mut breaks = vec![peak.clamp(a, b)];
    for (end, dir) in [(a, -1.0), (b, 1.0)] {
        let mut x = peak.clamp(a, b);
        let mut h = fine;
        loop {
            let next = x + dir * h;
            if (dir < 0.0 && next <= end) || (dir > 0.0 && next >= end) {
                if (x - end).abs() > 0.0 {
                    breaks.push(end);
                }
                break;
            }
            breaks.push(next);
            x = next;
            h *= 1.25;
        }
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

/// Composite rule on `[a, b]` whose panels shrink to `fine` near `peak`
/// and grow geometrically away from it.
pub fn graded(a: f64, b: f64, peak: f64, fine: f64) -> Vec<(f64, f64)> {
    graded_capped(a, b, peak, fine, f64::INFINITY)
}

/// [`graded`] with every panel split to width at most `max_width`.
pub fn graded_capped(a: f64, b: f64, peak: f64, fine: f64, max_width: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in graded_breaks(a, b, peak, fine).windows(2) {
        let pieces = ((w[1] - w[0]) / max_width).ceil().clamp(1.0, 1e6) as usize;
        out.extend(composite(w[0], w[1], pieces));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let rule = composite(0.0, std::f64::consts::TAU, 8);
        let v: f64 = rule.iter().map(|(x, w)| w * (3.0 * x).cos().exp()).sum();
        // 2 pi I_0(1)
        assert!((v - std::f64::consts::TAU * 1.266_065_877_752_008_4).abs() < 1e-13);
        let g = graded(-1.0, 2.0, 0.3, 1e-3);
        let v: f64 = g.iter().map(|(x, w)| w * (-1e4 * (x - 0.3) * (x - 0.3)).exp()).sum();
        assert!((v - (std::f64::consts::PI / 1e4).sqrt()).abs() < 1e-13);
        assert!(g.windows(2).all(|p| p[0].0 < p[1].0));
    }
}
