use std::fmt::Write;

use sinkchain::replicator::Field;
use sinkchain::Game;

const SIZE: f64 = 600.0;
const MARGIN: f64 = 50.0;
const GRID: usize = 15;

fn px(x: f64) -> f64 {
    MARGIN + x * (SIZE - 2.0 * MARGIN)
}

fn py(y: f64) -> f64 {
    SIZE - MARGIN - y * (SIZE - 2.0 * MARGIN)
}

/// Phase portrait of a 2x2 game on the unit square: x is player 0's
/// probability of strategy 0, y is player 1's. `shaded` holds rectangles
/// `(x0, x1, y0, y1)` drawn grey under a 15x15 grid of field arrows.
pub fn phase_portrait(game: &Game, shaded: &[(f64, f64, f64, f64)]) -> String {
    let field = Field::new(game);
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="600" height="600" viewBox="0 0 600 600">"#
    )
    .unwrap();
    svg.push_str(concat!(
        "<defs><marker id=\"head\" markerWidth=\"6\" markerHeight=\"6\" refX=\"5\" refY=\"3\" ",
        "orient=\"auto\"><path d=\"M0,0 L6,3 L0,6 z\" fill=\"black\"/></marker></defs>\n"
    ));
    writeln!(svg, r#"<rect x="0" y="0" width="600" height="600" fill="white"/>"#).unwrap();
    for &(x0, x1, y0, y1) in shaded {
        writeln!(
            svg,
            r#"<rect class="sink" x="{:.3}" y="{:.3}" width="{:.3}" height="{:.3}" fill="lightgrey" stroke="none"/>"#,
            px(x0),
            py(y1),
            px(x1) - px(x0),
            py(y0) - py(y1)
        )
        .unwrap();
    }
    writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{w}" height="{w}" fill="none" stroke="black"/>"#,
        w = SIZE - 2.0 * MARGIN
    )
    .unwrap();

    let mut vel = vec![(0.0, 0.0); GRID * GRID];
    let mut out = [0.0; 4];
    for i in 0..GRID {
        for j in 0..GRID {
            let (x, y) = ((i as f64 + 0.5) / GRID as f64, (j as f64 + 0.5) / GRID as f64);
            field.eval(&[x, 1.0 - x, y, 1.0 - y], &mut out);
            vel[i * GRID + j] = (out[0], out[2]);
        }
    }
    let vmax = vel.iter().map(|(a, b)| a.hypot(*b)).fold(0.0, f64::max);
    let cell = (SIZE - 2.0 * MARGIN) / GRID as f64;
    for i in 0..GRID {
        for j in 0..GRID {
            let (vx, vy) = vel[i * GRID + j];
            let speed = vx.hypot(vy);
            if vmax <= 0.0 || speed < 1e-12 * vmax {
                continue;
            }
            let len = 0.8 * cell * (speed / vmax).sqrt();
            let (x, y) = (px((i as f64 + 0.5) / GRID as f64), py((j as f64 + 0.5) / GRID as f64));
            let (dx, dy) = (vx / speed * len / 2.0, -vy / speed * len / 2.0);
            writeln!(
                svg,
                r#"<line class="arrow" x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="black" marker-end="url(#head)"/>"#,
                x - dx,
                y - dy,
                x + dx,
                y + dy
            )
            .unwrap();
        }
    }
    let label = |k: usize| game.labels()[k][0].replace('&', "&amp;").replace('<', "&lt;");
    writeln!(
        svg,
        r#"<text x="300" y="590" text-anchor="middle" font-size="14">player 0: P({})</text>"#,
        label(0)
    )
    .unwrap();
    writeln!(
        svg,
        r#"<text x="15" y="300" text-anchor="middle" font-size="14" transform="rotate(-90 15 300)">player 1: P({})</text>"#,
        label(1)
    )
    .unwrap();
    svg.push_str("</svg>\n");
    svg
}
