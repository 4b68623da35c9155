//! A small stroke font so SVG text never depends on installed fonts.
//!
//! Glyphs live on a 4x6 grid with the baseline at y = 0. Lowercase letters
//! are drawn as reduced capitals.

type Stroke = &'static [(f32, f32)];

const O: Stroke = &[(1., 0.), (0., 1.), (0., 5.), (1., 6.), (3., 6.), (4., 5.), (4., 1.), (3., 0.), (1., 0.)];
const P: Stroke = &[(0., 0.), (0., 6.), (3., 6.), (4., 5.), (4., 4.), (3., 3.), (0., 3.)];

fn glyph(c: char) -> &'static [Stroke] {
    match c {
        'A' => &[&[(0., 0.), (0., 4.), (2., 6.), (4., 4.), (4., 0.)], &[(0., 3.), (4., 3.)]],
        'B' => &[
            &[(0., 0.), (0., 6.), (3., 6.), (4., 5.), (4., 4.), (3., 3.), (0., 3.)],
            &[(3., 3.), (4., 2.), (4., 1.), (3., 0.), (0., 0.)],
        ],
        'C' => &[&[(4., 5.), (3., 6.), (1., 6.), (0., 5.), (0., 1.), (1., 0.), (3., 0.), (4., 1.)]],
        'D' => &[&[(0., 0.), (0., 6.), (3., 6.), (4., 5.), (4., 1.), (3., 0.), (0., 0.)]],
        'E' => &[&[(4., 6.), (0., 6.), (0., 0.), (4., 0.)], &[(0., 3.), (3., 3.)]],
        'F' => &[&[(4., 6.), (0., 6.), (0., 0.)], &[(0., 3.), (3., 3.)]],
        'G' => &[&[(4., 5.), (3., 6.), (1., 6.), (0., 5.), (0., 1.), (1., 0.), (3., 0.), (4., 1.), (4., 3.), (2., 3.)]],
        'H' => &[&[(0., 0.), (0., 6.)], &[(4., 0.), (4., 6.)], &[(0., 3.), (4., 3.)]],
        'I' => &[&[(1., 6.), (3., 6.)], &[(2., 6.), (2., 0.)], &[(1., 0.), (3., 0.)]],
        'J' => &[&[(4., 6.), (4., 1.), (3., 0.), (1., 0.), (0., 1.)]],
        'K' => &[&[(0., 0.), (0., 6.)], &[(4., 6.), (0., 2.)], &[(1., 3.), (4., 0.)]],
        'L' => &[&[(0., 6.), (0., 0.), (4., 0.)]],
        'M' => &[&[(0., 0.), (0., 6.), (2., 3.), (4., 6.), (4., 0.)]],
        'N' => &[&[(0., 0.), (0., 6.), (4., 0.), (4., 6.)]],
        'O' => &[O],
        'P' => &[P],
        'Q' => &[O, &[(2., 2.), (4., 0.)]],
        'R' => &[P, &[(2., 3.), (4., 0.)]],
        'S' => &[&[
            (4., 5.), (3., 6.), (1., 6.), (0., 5.), (0., 4.), (1., 3.), (3., 3.), (4., 2.), (4., 1.), (3., 0.), (1., 0.), (0., 1.),
        ]],
        'T' => &[&[(0., 6.), (4., 6.)], &[(2., 6.), (2., 0.)]],
        'U' => &[&[(0., 6.), (0., 1.), (1., 0.), (3., 0.), (4., 1.), (4., 6.)]],
        'V' => &[&[(0., 6.), (2., 0.), (4., 6.)]],
        'W' => &[&[(0., 6.), (1., 0.), (2., 3.), (3., 0.), (4., 6.)]],
        'X' => &[&[(0., 0.), (4., 6.)], &[(0., 6.), (4., 0.)]],
        'Y' => &[&[(0., 6.), (2., 3.), (4., 6.)], &[(2., 3.), (2., 0.)]],
        'Z' => &[&[(0., 6.), (4., 6.), (0., 0.), (4., 0.)]],
        '0' => &[O, &[(1., 1.), (3., 5.)]],
        '1' => &[&[(1., 5.), (2., 6.), (2., 0.)], &[(1., 0.), (3., 0.)]],
        '2' => &[&[(0., 5.), (1., 6.), (3., 6.), (4., 5.), (4., 4.), (0., 0.), (4., 0.)]],
        '3' => &[
            &[(0., 5.), (1., 6.), (3., 6.), (4., 5.), (4., 4.), (3., 3.), (1., 3.)],
            &[(3., 3.), (4., 2.), (4., 1.), (3., 0.), (1., 0.), (0., 1.)],
        ],
        '4' => &[&[(3., 0.), (3., 6.), (0., 2.), (4., 2.)]],
        '5' => &[&[(4., 6.), (0., 6.), (0., 3.), (3., 3.), (4., 2.), (4., 1.), (3., 0.), (0., 0.)]],
        '6' => &[&[
            (4., 5.), (3., 6.), (1., 6.), (0., 5.), (0., 1.), (1., 0.), (3., 0.), (4., 1.), (4., 2.), (3., 3.), (0., 3.),
        ]],
        '7' => &[&[(0., 6.), (4., 6.), (1., 0.)]],
        '8' => &[&[
            (1., 3.), (0., 4.), (0., 5.), (1., 6.), (3., 6.), (4., 5.), (4., 4.), (3., 3.), (1., 3.), (0., 2.), (0., 1.),
            (1., 0.), (3., 0.), (4., 1.), (4., 2.), (3., 3.),
        ]],
        '9' => &[&[
            (4., 3.), (1., 3.), (0., 4.), (0., 5.), (1., 6.), (3., 6.), (4., 5.), (4., 1.), (3., 0.), (1., 0.), (0., 1.),
        ]],
        '.' => &[&[(1.8, 0.), (2.2, 0.)]],
        ',' => &[&[(2., 0.5), (1.5, -1.)]],
        '-' => &[&[(1., 3.), (3., 3.)]],
        '+' => &[&[(2., 1.), (2., 5.)], &[(0., 3.), (4., 3.)]],
        '=' => &[&[(0., 2.), (4., 2.)], &[(0., 4.), (4., 4.)]],
        '(' => &[&[(3., 6.), (2., 5.), (2., 1.), (3., 0.)]],
        ')' => &[&[(1., 6.), (2., 5.), (2., 1.), (1., 0.)]],
        '/' => &[&[(0., 0.), (4., 6.)]],
        ':' => &[&[(2., 1.), (2., 1.4)], &[(2., 4.), (2., 4.4)]],
        '_' => &[&[(0., 0.), (4., 0.)]],
        '|' => &[&[(2., 0.), (2., 6.)]],
        ' ' => &[],
        _ => &[&[(0., 0.), (4., 0.), (4., 6.), (0., 6.), (0., 0.)]],
    }
}

const ADVANCE: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Start,
    Middle,
    End,
}

/// Width in pixels of `text` at cap height `size`.
pub fn text_width(text: &str, size: f64) -> f64 {
    let n = text.chars().count();
    if n == 0 {
        return 0.0;
    }
    (n as f64 * ADVANCE - 2.0) * size / 6.0
}

/// SVG path data for `text` with its baseline at `(x, y)`; `vertical` turns
/// it 90 degrees counter-clockwise around the anchor point.
pub fn text_path(text: &str, x: f64, y: f64, size: f64, anchor: Anchor, vertical: bool) -> String {
    let u = size / 6.0;
    let w = text_width(text, size);
    let shift = match anchor {
        Anchor::Start => 0.0,
        Anchor::Middle => -w / 2.0,
        Anchor::End => -w,
    };
    let mut d = String::new();
    for (k, c) in text.chars().enumerate() {
        let (g, scale) = if c.is_ascii_lowercase() {
            (glyph(c.to_ascii_uppercase()), 0.75)
        } else {
            (glyph(c), 1.0)
        };
        let ox = shift + k as f64 * ADVANCE * u;
        for stroke in g {
            for (i, &(gx, gy)) in stroke.iter().enumerate() {
                // along-text offset and height above the baseline
                let a = ox + (gx as f64 * scale + 2.0 * (1.0 - scale)) * u;
                let h = gy as f64 * scale * u;
                let (px, py) = if vertical { (x - h, y - a) } else { (x + a, y - h) };
                d.push(if i == 0 { 'M' } else { 'L' });
                d.push_str(&format!("{:.2} {:.2}", px, py));
            }
        }
    }
    d
}
