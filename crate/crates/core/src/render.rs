//! Poincaré-disc pictures of configurations.
//!
//! Every cell of a region is a copy of one regular heptagon moved around the
//! unit disc by a Möbius transform. The transforms are built once per
//! region by walking the father-to-son tree: a son's tile is its father's
//! tile pushed through one edge. Tile edges are geodesics, sampled as
//! straight chords of the Klein model and mapped back, so the pictures show
//! the genuinely curved tile boundaries. Output is a plain SVG string with
//! fixed-precision coordinates, byte-identical across runs.

use std::f64::consts::PI;
use std::fmt::Write;
use std::ops::{Add, Div, Mul, Sub};

use crate::ca::{Configuration, State};
use crate::grid::{Orientation, Region, EXTERIOR};

// --- complex arithmetic -------------------------------------------------

/// A complex number, used both as a point of the disc and as a matrix
/// entry.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cx {
    pub re: f64,
    pub im: f64,
}

impl Cx {
    pub const ZERO: Cx = Cx { re: 0.0, im: 0.0 };
    pub const ONE: Cx = Cx { re: 1.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Cx {
        Cx { re, im }
    }

    pub fn polar(r: f64, theta: f64) -> Cx {
        Cx { re: r * theta.cos(), im: r * theta.sin() }
    }

    pub fn conj(self) -> Cx {
        Cx { re: self.re, im: -self.im }
    }

    pub fn abs2(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    pub fn abs(self) -> f64 {
        self.abs2().sqrt()
    }
}

impl Add for Cx {
    type Output = Cx;
    fn add(self, rhs: Cx) -> Cx {
        Cx { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for Cx {
    type Output = Cx;
    fn sub(self, rhs: Cx) -> Cx {
        Cx { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for Cx {
    type Output = Cx;
    fn mul(self, rhs: Cx) -> Cx {
        Cx {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Div for Cx {
    type Output = Cx;
    fn div(self, rhs: Cx) -> Cx {
        let d = rhs.abs2();
        let n = self * rhs.conj();
        Cx { re: n.re / d, im: n.im / d }
    }
}

// --- disc isometries ----------------------------------------------------

/// An orientation-preserving isometry of the Poincaré disc, stored as the
/// 2x2 complex matrix of the Möbius map `z -> (az + b)/(cz + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Cx,
    pub b: Cx,
    pub c: Cx,
    pub d: Cx,
}

impl Mobius {
    pub const IDENTITY: Mobius =
        Mobius { a: Cx::ONE, b: Cx::ZERO, c: Cx::ZERO, d: Cx::ONE };

    /// Rotation by `theta` about the disc centre.
    pub fn rotation(theta: f64) -> Mobius {
        Mobius {
            a: Cx::polar(1.0, theta / 2.0),
            b: Cx::ZERO,
            c: Cx::ZERO,
            d: Cx::polar(1.0, -theta / 2.0),
        }
    }

    /// Translation by hyperbolic distance `t` along the positive real axis.
    pub fn translation_x(t: f64) -> Mobius {
        let (s, c) = ((t / 2.0).sinh(), (t / 2.0).cosh());
        Mobius { a: Cx::new(c, 0.0), b: Cx::new(s, 0.0), c: Cx::new(s, 0.0), d: Cx::new(c, 0.0) }
    }

    /// The map applying `inner` first, then `self`.
    pub fn compose(&self, inner: &Mobius) -> Mobius {
        Mobius {
            a: self.a * inner.a + self.b * inner.c,
            b: self.a * inner.b + self.b * inner.d,
            c: self.c * inner.a + self.d * inner.c,
            d: self.c * inner.b + self.d * inner.d,
        }
    }

    pub fn apply(&self, z: Cx) -> Cx {
        (self.a * z + self.b) / (self.c * z + self.d)
    }
}

/// Hyperbolic distance between two points of the disc.
pub fn distance(z: Cx, w: Cx) -> f64 {
    let num = (z - w).abs();
    let den = (Cx::ONE - z.conj() * w).abs();
    2.0 * (num / den).atanh()
}

// --- the base tile ------------------------------------------------------

/// Half the edge length of the tiling's heptagon.
pub fn half_edge() -> f64 {
    ((PI / 7.0).cos() / (PI / 3.0).sin()).acosh()
}

/// Distance from a tile's centre to the midpoint of one of its edges.
pub fn inradius() -> f64 {
    ((PI / 3.0).cos() / (PI / 7.0).sin()).acosh()
}

/// Distance from a tile's centre to one of its vertices.
pub fn circumradius() -> f64 {
    (1.0 / ((PI / 7.0).tan() * (PI / 3.0).tan())).acosh()
}

/// Distance between the centres of two tiles sharing an edge.
pub fn center_step() -> f64 {
    2.0 * inradius()
}

/// The base tile's vertices around the disc centre. The edge crossed
/// toward neighbor slot `k` has its outward normal at angle
/// `(k - 1) * 2 * PI / 7`.
pub fn base_vertices() -> [Cx; 7] {
    let rho = (circumradius() / 2.0).tanh();
    std::array::from_fn(|j| Cx::polar(rho, (2.0 * j as f64 + 1.0) * PI / 7.0))
}

fn to_klein(p: Cx) -> Cx {
    let s = 2.0 / (1.0 + p.abs2());
    Cx::new(s * p.re, s * p.im)
}

fn from_klein(k: Cx) -> Cx {
    let s = 1.0 / (1.0 + (1.0 - k.abs2()).max(0.0).sqrt());
    Cx::new(s * k.re, s * k.im)
}

/// The base tile's outline, `samples_per_edge` points per edge, following
/// the geodesic edges (straight chords of the Klein model).
pub fn base_outline(samples_per_edge: u32) -> Vec<Cx> {
    let samples = samples_per_edge.max(1);
    let vertices = base_vertices();
    let mut outline = Vec::with_capacity(7 * samples as usize);
    for j in 0..7 {
        let a = to_klein(vertices[j]);
        let b = to_klein(vertices[(j + 1) % 7]);
        for s in 0..samples {
            let t = s as f64 / samples as f64;
            let k = Cx::new(a.re + t * (b.re - a.re), a.im + t * (b.im - a.im));
            outline.push(from_klein(k));
        }
    }
    outline
}

// --- placing the tiles --------------------------------------------------

/// One isometry per cell, mapping the base tile onto the cell's place in
/// the disc. The centre takes the identity; every other cell is reached
/// from its father through the connecting edge, which pins the whole
/// layout.
pub fn cell_transforms(region: &Region) -> Vec<Mobius> {
    let step = center_step();
    let flip = Mobius::rotation(PI);
    let mut transforms = vec![Mobius::IDENTITY; region.cell_count()];
    // fathers precede sons in the index order, so one pass suffices. A
    // mirrored region's reversed slot tables already describe the reflected
    // tiling; only the centre keeps its slot array unreversed, so there the
    // reflection negates the angles instead.
    let mirrored = region.orientation() == Orientation::Mirrored;
    for c in 0..region.cell_count() as u32 {
        let sign = if mirrored && c == 0 { -1.0 } else { 1.0 };
        for (slot0, &n) in region.neighbors(c).iter().enumerate() {
            if n == EXTERIOR || region.father(n) != Some(c) {
                continue;
            }
            let alpha = sign * slot0 as f64 * 2.0 * PI / 7.0;
            let through = Mobius::rotation(alpha)
                .compose(&Mobius::translation_x(step))
                .compose(&flip);
            transforms[n as usize] = transforms[c as usize].compose(&through);
        }
    }
    transforms
}

// --- styles and SVG -----------------------------------------------------

/// How to draw a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderStyle {
    /// Width and height of the image in pixels.
    pub size_px: u32,
    /// Outline points per tile edge; 1 draws straight-sided tiles.
    pub samples_per_edge: u32,
    /// Deepest level to draw; `None` draws the whole region.
    pub max_level: Option<u32>,
    /// Fill colors for the states white, blue, green, red.
    pub fills: [String; 4],
    pub stroke: String,
    pub stroke_width: f64,
    pub background: String,
    /// Draw the locomotive front (a blue cell touching a red one) in
    /// `front_fill`. Purely a display aid; the state stays blue.
    pub darken_front: bool,
    pub front_fill: String,
}

impl Default for RenderStyle {
    fn default() -> RenderStyle {
        RenderStyle {
            size_px: 900,
            samples_per_edge: 6,
            max_level: None,
            fills: [
                "#fdfdf6".to_string(),
                "#4a7fd4".to_string(),
                "#4aa45e".to_string(),
                "#d44a4a".to_string(),
            ],
            stroke: "#555555".to_string(),
            stroke_width: 0.002,
            background: "#20242c".to_string(),
            darken_front: true,
            front_fill: "#1d4089".to_string(),
        }
    }
}

impl RenderStyle {
    /// A colorless variant: straight-sided tiles, white fills, thin grey
    /// strokes, letters carried only by the hover titles.
    pub fn plain() -> RenderStyle {
        RenderStyle {
            samples_per_edge: 1,
            fills: [
                "#ffffff".to_string(),
                "#b8c4dc".to_string(),
                "#c0d4c0".to_string(),
                "#dcb8b8".to_string(),
            ],
            stroke: "#888888".to_string(),
            background: "#ffffff".to_string(),
            darken_front: false,
            ..RenderStyle::default()
        }
    }

    /// Looks a style preset up by name: `default` or `plain`.
    pub fn preset(name: &str) -> Option<RenderStyle> {
        match name {
            "default" => Some(RenderStyle::default()),
            "plain" => Some(RenderStyle::plain()),
            _ => None,
        }
    }

    fn fill_for(&self, state: State) -> &str {
        match state {
            State::White => &self.fills[0],
            State::Blue => &self.fills[1],
            State::Green => &self.fills[2],
            State::Red => &self.fills[3],
        }
    }
}

/// Draws a configuration on its region as an SVG document.
pub fn render_svg(region: &Region, config: &Configuration, style: &RenderStyle) -> String {
    let max_level = style
        .max_level
        .unwrap_or(region.max_level())
        .min(region.max_level());
    let transforms = cell_transforms(region);
    let outline = base_outline(style.samples_per_edge);
    let mut svg = String::new();
    writeln!(
        svg,
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" ",
            "width=\"{size}\" height=\"{size}\" viewBox=\"-1.05 -1.05 2.1 2.1\">"
        ),
        size = style.size_px
    )
    .unwrap();
    writeln!(
        svg,
        "<rect x=\"-1.05\" y=\"-1.05\" width=\"2.1\" height=\"2.1\" fill=\"{}\"/>",
        style.background
    )
    .unwrap();
    writeln!(svg, "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"#ffffff\"/>").unwrap();
    for idx in 0..region.cell_count() as u32 {
        if region.level(idx) > max_level {
            continue;
        }
        let state = config.get(idx);
        let fill = if style.darken_front && state == State::Blue && touches_red(region, config, idx)
        {
            &style.front_fill
        } else {
            style.fill_for(state)
        };
        let mut points = String::new();
        for (i, &p) in outline.iter().enumerate() {
            let q = transforms[idx as usize].apply(p);
            if i > 0 {
                points.push(' ');
            }
            // the disc is drawn y-up
            write!(points, "{:.5},{:.5}", q.re, -q.im).unwrap();
        }
        writeln!(
            svg,
            "<polygon points=\"{}\" fill=\"{}\" stroke=\"{}\" stroke-width=\"{}\">\
             <title>{} {}</title></polygon>",
            points,
            fill,
            style.stroke,
            style.stroke_width,
            region.cell_id(idx),
            state.letter()
        )
        .unwrap();
    }
    writeln!(svg, "<circle cx=\"0\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#333333\" stroke-width=\"0.004\"/>")
        .unwrap();
    svg.push_str("</svg>\n");
    svg
}

fn touches_red(region: &Region, config: &Configuration, idx: u32) -> bool {
    region
        .neighbors(idx)
        .into_iter()
        .any(|n| n != EXTERIOR && config.get(n) == State::Red)
}
