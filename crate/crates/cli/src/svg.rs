//! Line plot of the absorption profile as a standalone SVG document.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use atomloc_core::scan::TableKind;
use atomloc_core::ProfileTable;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 460.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 70.0;
const BOTTOM: f64 = 50.0;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SvgError {
    #[error("unsupported table for SVG: {0}")]
    UnsupportedTable(&'static str),
}

fn tick_label(k: i64) -> String {
    // k counts half-periods of pi/2
    match k {
        0 => "0".into(),
        1 => "π/2".into(),
        -1 => "−π/2".into(),
        2 => "π".into(),
        -2 => "−π".into(),
        k if k % 2 == 0 => format!("{}π", k / 2).replace('-', "−"),
        k => format!("{k}π/2").replace('-', "−"),
    }
}

/// Plot `chi''` against `kappa_x` for a one-dimensional table.
pub fn render(table: &ProfileTable) -> Result<String, SvgError> {
    if table.kind != TableKind::Profile {
        return Err(SvgError::UnsupportedTable("only 1D profiles can be plotted"));
    }
    let points: Vec<(f64, f64)> = table.rows.iter().filter_map(|r| r.value.map(|v| (r.kappa_x, v.chi_im))).collect();
    if points.len() < 2 {
        return Err(SvgError::UnsupportedTable("fewer than two defined points"));
    }

    let (x0, x1) = table.metadata.request.x_range;
    let y_max = points.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    let y_min = points.iter().map(|p| p.1).fold(f64::MAX, f64::min).min(0.0);
    let y_span = if y_max > y_min { y_max - y_min } else { y_max.abs().max(1.0) };
    let (y_lo, y_hi) = (y_min, y_min + 1.05 * y_span);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * plot_w;
    let sy = |y: f64| TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let req = &table.metadata.request;
    let (d, g) = (&req.drive, &req.decay);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<g class="title">"#);
    let _ = writeln!(s, r#"<text x="{LEFT}" y="22" font-size="14">Absorption Im χ versus κx</text>"#);
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="40">Ω1={} Ω2={} Ω3={} φ={:.6} θ2={:.6} θ3={:.6}</text>"#,
        d.omega1, d.omega2, d.omega3, d.phi, d.theta2, d.theta3
    );
    let _ = writeln!(
        s,
        r#"<text x="{LEFT}" y="56">γ1={} γ2={} γbc={} Δ={} scale={}</text>"#,
        g.gamma1, g.gamma2, g.gamma_bc, req.delta, req.prefactor.scale
    );
    let _ = writeln!(s, "</g>");

    let _ = writeln!(
        s,
        r#"<rect class="frame" x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let k_lo = (x0 / FRAC_PI_2).ceil() as i64;
    let k_hi = (x1 / FRAC_PI_2).floor() as i64;
    let base = TOP + plot_h;
    for k in k_lo..=k_hi {
        let x = sx(k as f64 * FRAC_PI_2);
        let _ = writeln!(
            s,
            r#"<line class="tick" x1="{x:.3}" y1="{base:.3}" x2="{x:.3}" y2="{:.3}" stroke="black"/>"#,
            base + 6.0
        );
        let _ = writeln!(s, r#"<text x="{x:.3}" y="{:.3}" text-anchor="middle">{}</text>"#, base + 20.0, tick_label(k));
    }
    let _ =
        writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="middle">κx</text>"#, LEFT + plot_w / 2.0, HEIGHT - 8.0);
    for y in [y_lo, 0.5 * (y_lo + y_hi), y_hi] {
        let _ = writeln!(s, r#"<text x="{:.3}" y="{:.3}" text-anchor="end">{y:.3e}</text>"#, LEFT - 6.0, sy(y) + 4.0);
    }
    if x0 <= 0.0 && 0.0 <= x1 {
        let x = sx(0.0);
        let _ = writeln!(
            s,
            r#"<line class="guide" x1="{x:.3}" y1="{TOP:.3}" x2="{x:.3}" y2="{base:.3}" stroke="gray" stroke-dasharray="4 3"/>"#
        );
    }

    s.push_str(r#"<polyline fill="none" stroke="navy" stroke-width="1.5" points=""#);
    for (i, (x, y)) in points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.3},{:.3}", sx(*x), sy(*y));
    }
    s.push_str("\"/>\n</svg>\n");
    Ok(s)
}
