//! Deterministic SVG diagrams: the `ΔP` complex with its additive faces, and
//! overlaid function graphs.
//!
//! Coordinates are computed exactly and written with 18 fractional digits.

use std::fmt::Write;

use groupcut::extremality::additivity_domain;
use groupcut::minimality::detect_f;
use groupcut::{projections, Cell1D, PwlPeriodic, Rational, Side};

const DIGITS: usize = 18;
const SIZE: i64 = 400;
const MARGIN: i64 = 100;
const STRIP: i64 = 80;
const SHADOW: i64 = 6;
const COLORS: [&str; 6] = ["black", "blue", "red", "magenta", "green", "orange"];

fn num(r: &Rational) -> String {
    r.to_decimal(DIGITS)
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Frame {
    origin_x: Rational,
    origin_y: Rational,
    scale_x: Rational,
    scale_y: Rational,
}

impl Frame {
    fn x(&self, x: &Rational) -> String {
        num(&(&self.origin_x + &self.scale_x * x))
    }
    fn y(&self, y: &Rational) -> String {
        num(&(&self.origin_y + &self.scale_y * y))
    }
    fn point(&self, x: &Rational, y: &Rational) -> String {
        format!("{},{}", self.x(x), self.y(y))
    }
}

fn header(out: &mut String, width: i64, height: i64) {
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>"#).unwrap();
}

fn line(out: &mut String, class: &str, a: (String, String), b: (String, String), style: &str) {
    writeln!(out, r#"<line class="{class}" x1="{}" y1="{}" x2="{}" y2="{}" {style}/>"#, a.0, a.1, b.0, b.1).unwrap();
}

/// Segment of the line `x + y = s` inside the unit square.
fn diagonal_segment(s: &Rational) -> Option<((Rational, Rational), (Rational, Rational))> {
    let one = Rational::one();
    let lo = if *s > one { s - &one } else { Rational::zero() };
    let hi = if *s < one { s.clone() } else { one.clone() };
    (lo < hi).then(|| ((lo.clone(), s - &lo), (hi.clone(), s - &hi)))
}

/// `ΔP` diagram with additive faces shaded, `π` along the top and left
/// borders, and projection shadows of the additive 2-faces.
pub fn plot_complex(pi: &PwlPeriodic) -> String {
    let size = int(SIZE);
    let m = int(MARGIN);
    let strip = int(STRIP);
    let sq = Frame {
        origin_x: m.clone(),
        origin_y: m.clone(),
        scale_x: size.clone(),
        scale_y: size.clone(),
    };
    let total = 2 * MARGIN + SIZE;
    let mut out = String::new();
    header(&mut out, total, total);

    let f = detect_f(pi).ok();
    let domain = additivity_domain(pi).ok();
    let points: Vec<Rational> = {
        let mut p: Vec<Rational> = pi.points().cloned().chain(f.clone()).collect();
        p.sort();
        p.dedup();
        p
    };

    if let Some(d) = &domain {
        writeln!(out, r#"<g id="additive-faces">"#).unwrap();
        for face in &d.faces {
            match face.dimension {
                2 => {
                    let pts: Vec<String> = face.vertices.iter().map(|(x, y)| sq.point(x, y)).collect();
                    writeln!(
                        out,
                        r#"<polygon class="additive-2" points="{}" fill="mediumseagreen" fill-opacity="0.6" stroke="none"/>"#,
                        pts.join(" ")
                    )
                    .unwrap();
                }
                1 => {
                    let (a, b) = (&face.vertices[0], &face.vertices[face.vertices.len() - 1]);
                    line(
                        &mut out,
                        "additive-1",
                        (sq.x(&a.0), sq.y(&a.1)),
                        (sq.x(&b.0), sq.y(&b.1)),
                        r#"stroke="mediumseagreen" stroke-width="3""#,
                    );
                }
                _ => {
                    let (x, y) = &face.vertices[0];
                    writeln!(
                        out,
                        r#"<circle class="additive-0" cx="{}" cy="{}" r="3" fill="mediumseagreen"/>"#,
                        sq.x(x),
                        sq.y(y)
                    )
                    .unwrap();
                }
            }
        }
        writeln!(out, "</g>").unwrap();
    }

    writeln!(out, r#"<g id="complex" stroke="gray" stroke-width="0.5">"#).unwrap();
    let zero = Rational::zero();
    let one = Rational::one();
    for b in &points {
        line(&mut out, "grid", (sq.x(b), sq.y(&zero)), (sq.x(b), sq.y(&one)), "");
        line(&mut out, "grid", (sq.x(&zero), sq.y(b)), (sq.x(&one), sq.y(b)), "");
    }
    let diag: Vec<Rational> = points.iter().cloned().chain(points.iter().skip(1).map(|b| b + &one)).collect();
    for s in &diag {
        if let Some((a, b)) = diagonal_segment(s) {
            line(&mut out, "diagonal", (sq.x(&a.0), sq.y(&a.1)), (sq.x(&b.0), sq.y(&b.1)), "");
        }
    }
    writeln!(out, "</g>").unwrap();

    if let Some(f) = &f {
        for (class, s) in [("symmetry-f", f.clone()), ("symmetry-1f", f + &one)] {
            if let Some((a, b)) = diagonal_segment(&s) {
                line(
                    &mut out,
                    class,
                    (sq.x(&a.0), sq.y(&a.1)),
                    (sq.x(&b.0), sq.y(&b.1)),
                    r#"stroke="green" stroke-width="2""#,
                );
            }
        }
    }

    if let Some(d) = &domain {
        writeln!(out, r#"<g id="projections" fill="orange" fill-opacity="0.5" stroke="none">"#).unwrap();
        let shadow = int(SHADOW);
        let rect = |out: &mut String, class: &str, x: String, y: String, w: Rational, h: Rational| {
            writeln!(out, r#"<rect class="{class}" x="{x}" y="{y}" width="{}" height="{}"/>"#, num(&w), num(&h)).unwrap();
        };
        for face in d.of_dimension(2) {
            let (p1, p2, p3) = projections(face);
            let len = |c: &Cell1D| c.hi() - c.lo();
            rect(&mut out, "p1", sq.x(p1.lo()), num(&(&m - &shadow)), &size * len(&p1), shadow.clone());
            rect(&mut out, "p2", num(&(&m - &shadow)), sq.y(p2.lo()), shadow.clone(), &size * len(&p2));
            let lo = p3.lo().fract_mod1();
            let w = len(&p3);
            let w = if &lo + &w > one { &one - &lo } else { w };
            rect(&mut out, "p3", sq.x(&lo), num(&(&m + &size)), &size * &w, shadow.clone());
            rect(&mut out, "p3", num(&(&m + &size)), sq.y(&lo), shadow.clone(), &size * &w);
        }
        writeln!(out, "</g>").unwrap();
    }

    let top = Frame {
        origin_x: m.clone(),
        origin_y: &m - &shadow_gap(),
        scale_x: size.clone(),
        scale_y: -strip.clone(),
    };
    let left = Frame {
        origin_x: &m - &shadow_gap(),
        origin_y: m.clone(),
        scale_x: -strip,
        scale_y: size,
    };
    for (id, fr, swap) in [("graph-top", &top, false), ("graph-left", &left, true)] {
        writeln!(out, r#"<g id="{id}" fill="none" stroke="black" stroke-width="1">"#).unwrap();
        for seg in segments(pi) {
            let pts: Vec<String> = seg
                .iter()
                .map(|(x, v)| if swap { fr.point(v, x) } else { fr.point(x, v) })
                .collect();
            writeln!(out, r#"<polyline points="{}"/>"#, pts.join(" ")).unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}

fn shadow_gap() -> Rational {
    int(2 * SHADOW)
}

/// Maximal continuous runs of the graph on `[0, 1]` as `(x, y)` lists.
fn segments(pi: &PwlPeriodic) -> Vec<Vec<(Rational, Rational)>> {
    let bps = pi.breakpoints();
    let mut out: Vec<Vec<(Rational, Rational)>> = Vec::new();
    let mut current = vec![(bps[0].point.clone(), bps[0].right_limit.clone())];
    for b in &bps[1..] {
        current.push((b.point.clone(), b.left_limit.clone()));
        let last = b.point == Rational::one();
        if last || !b.is_continuous() {
            out.push(std::mem::take(&mut current));
            if !last {
                current.push((b.point.clone(), b.right_limit.clone()));
            }
        }
    }
    out
}

/// Overlaid graphs with open and closed endpoint markers at jumps.
pub fn plot_function(curves: &[(&str, &PwlPeriodic)]) -> String {
    let width = 2 * MARGIN + SIZE;
    let height = 2 * MARGIN + SIZE / 2 + 20 * curves.len() as i64;
    let mut lo = Rational::zero();
    let mut hi = Rational::one();
    for (_, pi) in curves {
        for b in pi.breakpoints() {
            for s in Side::ALL {
                let v = b.get(s);
                if *v < lo {
                    lo = v.clone();
                }
                if *v > hi {
                    hi = v.clone();
                }
            }
        }
    }
    let plot_h = int(SIZE / 2);
    let fr = Frame {
        origin_x: int(MARGIN),
        origin_y: int(MARGIN) + &plot_h * &hi / (&hi - &lo),
        scale_x: int(SIZE),
        scale_y: -(&plot_h / (&hi - &lo)),
    };
    let mut out = String::new();
    header(&mut out, width, height);
    let zero = Rational::zero();
    let one = Rational::one();
    line(
        &mut out,
        "axis",
        (fr.x(&zero), fr.y(&zero)),
        (fr.x(&one), fr.y(&zero)),
        r#"stroke="gray" stroke-width="0.5""#,
    );
    line(
        &mut out,
        "axis",
        (fr.x(&zero), fr.y(&lo)),
        (fr.x(&zero), fr.y(&hi)),
        r#"stroke="gray" stroke-width="0.5""#,
    );
    for (idx, (label, pi)) in curves.iter().enumerate() {
        let color = COLORS[idx % COLORS.len()];
        writeln!(out, r#"<g class="curve" data-label="{}" stroke="{color}" fill="none">"#, escape(label)).unwrap();
        for seg in segments(pi) {
            let pts: Vec<String> = seg.iter().map(|(x, v)| fr.point(x, v)).collect();
            writeln!(out, r#"<polyline points="{}"/>"#, pts.join(" ")).unwrap();
        }
        let bps = pi.breakpoints();
        for (k, b) in bps.iter().enumerate() {
            let mut sides = Vec::new();
            if k > 0 {
                sides.push(&b.left_limit);
            }
            if k + 1 < bps.len() {
                sides.push(&b.right_limit);
            }
            let jumps: Vec<&Rational> = sides.into_iter().filter(|l| **l != b.value).collect();
            if jumps.is_empty() {
                continue;
            }
            let mut seen: Vec<&Rational> = Vec::new();
            for l in jumps {
                if !seen.contains(&l) {
                    seen.push(l);
                    writeln!(
                        out,
                        r#"<circle class="open" cx="{}" cy="{}" r="3" fill="white"/>"#,
                        fr.x(&b.point),
                        fr.y(l)
                    )
                    .unwrap();
                }
            }
            writeln!(
                out,
                r#"<circle class="closed" cx="{}" cy="{}" r="3" fill="{color}"/>"#,
                fr.x(&b.point),
                fr.y(&b.value)
            )
            .unwrap();
        }
        writeln!(out, "</g>").unwrap();
        let ly = MARGIN + SIZE / 2 + 30 + 20 * idx as i64;
        writeln!(
            out,
            r#"<text x="{}" y="{ly}" fill="{color}" font-family="sans-serif" font-size="12">{}</text>"#,
            MARGIN,
            escape(label)
        )
        .unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    out
}
