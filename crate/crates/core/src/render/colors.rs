//! Named palettes and the perceptual color shift.

use palette::{FromColor, Lab, Srgb};
use serde::Serialize;

pub type Rgb = [u8; 3];

/// Lightness kept by the fully shifted color, relative to the rest color.
const SHIFT_LIGHTNESS: f32 = 0.45;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Palette {
    pub id: &'static str,
    pub background: Rgb,
    /// Word colors from the heaviest to the lightest weight band.
    pub ramp: &'static [Rgb],
}

pub const PALETTES: [Palette; 5] = [
    Palette { id: "classic", background: [255, 255, 255], ramp: &[[0, 0, 0]] },
    Palette {
        id: "happiness",
        background: [255, 249, 230],
        ramp: &[[226, 110, 0], [240, 160, 0], [214, 78, 62], [236, 185, 30]],
    },
    Palette {
        id: "sadness",
        background: [233, 238, 245],
        ramp: &[[36, 66, 118], [66, 98, 148], [92, 112, 140], [120, 136, 160]],
    },
    Palette {
        id: "anger",
        background: [28, 10, 10],
        ramp: &[[222, 32, 32], [250, 94, 40], [196, 24, 44], [255, 142, 62]],
    },
    Palette {
        id: "fear",
        background: [22, 24, 32],
        ramp: &[[162, 132, 204], [118, 146, 168], [184, 184, 204], [128, 112, 168]],
    },
];

pub fn palette(id: &str) -> Option<&'static Palette> {
    PALETTES.iter().find(|p| p.id == id)
}

impl Palette {
    /// Color for a word of normalized weight in `(0, 1]`.
    pub fn word_color(&self, weight: f64) -> Rgb {
        let n = self.ramp.len();
        let band = ((1.0 - weight.clamp(0.0, 1.0)) * n as f64).floor() as usize;
        self.ramp[band.min(n - 1)]
    }
}

fn to_lab(c: Rgb) -> Lab {
    Lab::from_color(Srgb::new(c[0], c[1], c[2]).into_format::<f32>().into_linear())
}

fn from_lab(lab: Lab) -> [f32; 3] {
    let s: Srgb<f32> = Srgb::from_linear(palette::LinSrgb::from_color(lab));
    [s.red, s.green, s.blue].map(|v| v.clamp(0.0, 1.0) * 255.0)
}

/// Interpolates from a rest color toward its darker variant in CIELAB (D65).
#[derive(Debug, Clone, Copy)]
pub struct ColorShift {
    rest: Rgb,
    from: Lab,
    to: Lab,
}

impl ColorShift {
    pub fn new(rest: Rgb) -> Self {
        let from = to_lab(rest);
        let to = Lab::new(from.l * SHIFT_LIGHTNESS, from.a, from.b);
        Self { rest, from, to }
    }

    /// Color in 0..=255 channel units at shift `amount` in `[0, 1]`.
    pub fn at(&self, amount: f64) -> [f32; 3] {
        let k = amount.clamp(0.0, 1.0) as f32;
        if k == 0.0 {
            return self.rest.map(f32::from);
        }
        let lerp = |a: f32, b: f32| a + (b - a) * k;
        from_lab(Lab::new(
            lerp(self.from.l, self.to.l),
            lerp(self.from.a, self.to.a),
            lerp(self.from.b, self.to.b),
        ))
    }
}
