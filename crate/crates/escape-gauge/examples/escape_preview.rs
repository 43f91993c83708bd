//! Coarse ASCII preview of the escape raster around a pole cluster: cells
//! that leave the certified disk fastest print darkest, bounded orbits stay
//! blank. Poles show up as immediate-escape blobs.

use escape_gauge::report::{escape_grid, GridWindow};
use escape_gauge::scenario::Scenario;

const RAMP: [char; 10] = ['@', '%', '#', '*', '+', '=', '-', ':', ',', '.'];

fn main() {
    let s = Scenario::default();
    let growth = s.growth().unwrap();

    // Window centered on the third ring's real-axis pole, wide enough to
    // catch neighbours from nearby rings.
    let k = growth.k0() + 2;
    let center = growth.p(k).unwrap();
    let radius = 3.0 * std::f64::consts::PI * growth.p_prime(k as f64).unwrap();
    let w = GridWindow {
        re_min: center - radius,
        re_max: center + radius,
        im_min: -radius,
        im_max: radius,
        px: 41,
    };

    let grid = escape_grid(&s, &w, 10).unwrap();
    println!(
        "window [{:.3}, {:.3}] x [{:.3}, {:.3}], escape radius {:.3e}",
        w.re_min, w.re_max, w.im_min, w.im_max, grid.escape_radius
    );

    // The PGM body after the comments: P2, dimensions, maxval, then rows.
    let mut lines = grid
        .pgm
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(3);
    for _ in 0..w.px {
        let row = lines.next().unwrap();
        let rendered: String = row
            .split_whitespace()
            .map(|v| {
                let v: usize = v.parse().unwrap();
                if v == 255 {
                    ' '
                } else {
                    RAMP[v.saturating_sub(1).min(RAMP.len() - 1)]
                }
            })
            .collect();
        println!("{rendered}");
    }
}
