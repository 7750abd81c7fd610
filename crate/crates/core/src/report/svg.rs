//! Static SVG diagrams: two adjacent developed sectors for cone scenarios, the
//! punctured axis for punctured-plane scenarios. Coordinates are rounded to
//! three decimals so output diffs cleanly.

use std::fmt::Write;

use super::scenario::{ConeParams, PuncturedParams};
use super::{Report, Scenario, Target};
use crate::cone;
use crate::error::{Error, Result};
use crate::punctured::{self, PlaneEvent};

/// User units per unit length.
const SCALE: f64 = 150.0;

/// Fixed three-decimal rendering without trailing zeros or `-0`.
pub fn num(x: f64) -> String {
    let s = format!("{:.3}", x);
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Doc {
    body: String,
    width: f64,
    height: f64,
}

impl Doc {
    fn new(width: f64, height: f64) -> Self {
        Doc { body: String::new(), width, height }
    }

    fn line(&mut self, a: (f64, f64), b: (f64, f64), style: &str) {
        let _ = writeln!(
            self.body,
            r#"  <line x1="{}" y1="{}" x2="{}" y2="{}" {style}/>"#,
            num(a.0),
            num(a.1),
            num(b.0),
            num(b.1)
        );
    }

    fn circle(&mut self, c: (f64, f64), r: f64, style: &str) {
        let _ = writeln!(self.body, r#"  <circle cx="{}" cy="{}" r="{}" {style}/>"#, num(c.0), num(c.1), num(r));
    }

    fn text(&mut self, at: (f64, f64), label: &str) {
        let _ = writeln!(
            self.body,
            r#"  <text x="{}" y="{}" font-family="serif" font-size="14">{label}</text>"#,
            num(at.0),
            num(at.1)
        );
    }

    fn path(&mut self, d: &str, style: &str) {
        let _ = writeln!(self.body, r#"  <path d="{d}" {style}/>"#);
    }

    fn finish(self, title: &str) -> String {
        format!(
            "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n  <title>{title}</title>\n{}</svg>\n",
            self.body,
            w = num(self.width),
            h = num(self.height),
        )
    }
}

/// The diagram for a scenario, or [`Error::NoDiagram`] for targets without one.
pub fn emit_svg(s: &Scenario, report: &Report) -> Result<String> {
    match &s.target {
        Target::Cone(c) => cone_diagram(&s.name, c),
        Target::Punctured(p) => punctured_diagram(&s.name, p, report),
        other => Err(Error::NoDiagram(format!("scenario `{}` (target {}) has no diagram", s.name, other.kind()))),
    }
}

fn cone_diagram(name: &str, c: &ConeParams) -> Result<String> {
    let theta = cone::sector_angle(c.slope)?;
    let rmax = 1.3 * c.r_a.max(c.r_b);
    let size = 2.0 * rmax * SCALE + 80.0;
    let mut doc = Doc::new(size, size);
    let o = (size / 2.0, size / 2.0);
    let at = |r: f64, psi: f64| (o.0 + SCALE * r * psi.cos(), o.1 - SCALE * r * psi.sin());

    // Two adjacent copies of the sector, spanning [0, theta] and [theta, 2 theta].
    for (k, fill) in [(0.0, "#e8eef8"), (1.0, "#f6ede2")] {
        let (s, e) = (k * theta, (k + 1.0) * theta);
        let (p0, p1) = (at(rmax, s), at(rmax, e));
        let large = if theta > std::f64::consts::PI { 1 } else { 0 };
        let d = format!(
            "M {} {} L {} {} A {r} {r} 0 {large} 0 {} {} Z",
            num(o.0),
            num(o.1),
            num(p0.0),
            num(p0.1),
            num(p1.0),
            num(p1.1),
            r = num(rmax * SCALE)
        );
        doc.path(&d, &format!(r##"fill="{fill}" stroke="#555" stroke-width="1""##));
    }
    let a = at(c.r_a, 0.0);
    let b = at(c.r_b, 0.5 * theta);
    let b_turn = at(c.r_b, 1.5 * theta);
    let solid = r##"stroke="#1f4e9a" stroke-width="2""##;
    let apex_route = r##"stroke="#b03a2e" stroke-width="2""##;
    doc.line(a, b, solid);
    doc.line(a, o, apex_route);
    doc.line(o, b_turn, apex_route);
    // The winding curve, unwrapped: a gentle arc from a to the copy of b.
    let mid = at(0.35 * (c.r_a + c.r_b), 0.75 * theta);
    doc.path(
        &format!("M {} {} Q {} {} {} {}", num(a.0), num(a.1), num(mid.0), num(mid.1), num(b_turn.0), num(b_turn.1)),
        r##"fill="none" stroke="#3a7d44" stroke-width="1.5" stroke-dasharray="6 4""##,
    );
    for (p, label) in [(a, "a"), (b, "b"), (b_turn, "b'")] {
        doc.circle(p, 3.5, r#"fill="black""#);
        doc.text((p.0 + 6.0, p.1 - 6.0), label);
    }
    let lab = |d: &mut Doc, p: (f64, f64), q: (f64, f64), t: &str| d.text(((p.0 + q.0) / 2.0 + 6.0, (p.1 + q.1) / 2.0 + 14.0), t);
    lab(&mut doc, a, b, "σ");
    lab(&mut doc, a, o, "η₁");
    lab(&mut doc, o, b_turn, "η₂");
    doc.text((mid.0 - 10.0, mid.1 - 8.0), "γ₁");
    doc.circle(o, 2.5, r#"fill="white" stroke="black""#);
    Ok(doc.finish(name))
}

fn punctured_diagram(name: &str, p: &PuncturedParams, report: &Report) -> Result<String> {
    let ep = PlaneEvent::parse(&p.p[0], &p.p[1])?;
    let eq = PlaneEvent::parse(&p.q[0], &p.q[1])?;
    let (pt, px) = ep.to_f64();
    let (qt, qx) = eq.to_f64();
    let half_w = 0.5 + [px.abs() + pt.abs(), qx.abs() + qt.abs(), 1.5].into_iter().fold(0.0, f64::max);
    let half_h = 0.3 + pt.abs().max(qt.abs());
    let (width, height) = (2.0 * half_w * SCALE, 2.0 * half_h * SCALE);
    let mut doc = Doc::new(width, height);
    let at = |t: f64, x: f64| (width / 2.0 + SCALE * x, height / 2.0 - SCALE * t);

    let future: Vec<String> = report
        .value("future_closure_sheets")
        .and_then(|v| serde_json::from_value(v.clone()).ok())
        .unwrap_or_default();
    // Highlight the gaps carrying future closure.
    for g in future.iter().filter_map(|g| g.parse::<punctured::Gap>().ok()) {
        let lo = g.lower().map(|v| crate::interval::rational_to_f64(&v)).unwrap_or(-half_w);
        let hi = g.upper().map(|v| crate::interval::rational_to_f64(&v)).unwrap_or(half_w);
        let (a, b) = (at(0.0, lo.max(-half_w)), at(0.0, hi.min(half_w)));
        doc.line(a, b, r##"stroke="#f2c14e" stroke-width="10" stroke-opacity="0.6""##);
    }
    doc.line(at(0.0, -half_w), at(0.0, half_w), r#"stroke="black" stroke-width="1""#);
    // Light-cone windows of p and q on the axis.
    for (t, x, colour) in [(pt, px, "#1f4e9a"), (qt, qx, "#b03a2e")] {
        let w = t.abs();
        doc.line(at(t, x), at(0.0, x - w), &format!(r#"stroke="{colour}" stroke-width="1" stroke-dasharray="4 3""#));
        doc.line(at(t, x), at(0.0, x + w), &format!(r#"stroke="{colour}" stroke-width="1" stroke-dasharray="4 3""#));
        let off = if t < 0.0 { 4.0 } else { -4.0 };
        let (a, b) = (at(0.0, x - w), at(0.0, x + w));
        doc.line((a.0, a.1 + off), (b.0, b.1 + off), &format!(r#"stroke="{colour}" stroke-width="3""#));
    }
    // Removed points r = (0, 0) and r_k = (0, -1/k), while they stay apart on screen.
    doc.circle(at(0.0, 0.0), 3.5, r#"fill="white" stroke="black""#);
    let r0 = at(0.0, 0.0);
    doc.text((r0.0 + 4.0, r0.1 + 20.0), "r");
    for k in 1..=200u64 {
        let x = -1.0 / k as f64;
        let sep = SCALE * (1.0 / k as f64 - 1.0 / (k + 1) as f64);
        if sep < 2.0 {
            break;
        }
        doc.circle(at(0.0, x), 2.5, r#"fill="white" stroke="black""#);
        if k <= 3 {
            let c = at(0.0, x);
            doc.text((c.0 - 8.0, c.1 + 20.0), &format!("r{k}"));
        }
    }
    for (e, label) in [(at(pt, px), "p"), (at(qt, qx), "q")] {
        doc.circle(e, 3.5, r#"fill="black""#);
        doc.text((e.0 + 6.0, e.1 - 6.0), label);
    }
    Ok(doc.finish(name))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::run_scenario;

    #[test]
    fn numbers_round_to_three_decimals() {
        assert_eq!(num(1.23456), "1.235");
        assert_eq!(num(2.0), "2");
        assert_eq!(num(-0.0001), "0");
        assert_eq!(num(-1.5), "-1.5");
    }

    #[test]
    fn diagrams_exist_only_for_cone_and_punctured() {
        let mut s = Scenario::builtin("cone-cover-closure").unwrap();
        if let Target::Cone(c) = &mut s.target {
            c.samples = 10;
        }
        let r = run_scenario(&s).unwrap();
        let svg = emit_svg(&s, &r).unwrap();
        assert!(svg.starts_with("<?xml") && svg.contains("version=\"1.1\"") && svg.contains("σ"));
        assert_eq!(svg, emit_svg(&s, &r).unwrap());

        let s = Scenario::builtin("sphere-trapped").unwrap();
        let r = run_scenario(&s).unwrap();
        assert!(matches!(emit_svg(&s, &r), Err(Error::NoDiagram(_))));
    }
}
