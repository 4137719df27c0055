use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_sq(&self, other: &Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        dx * dx + dy * dy
    }
}

/// Axis-aligned rectangle in pixels, `x0 <= x1`, `y0 <= y1`, y pointing down.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn centered(cx: f64, cy: f64, width: f64, height: f64) -> Self {
        Self::new(cx - width / 2.0, cy - height / 2.0, cx + width / 2.0, cy + height / 2.0)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x0 + self.x1) / 2.0, (self.y0 + self.y1) / 2.0)
    }

    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    /// Open-interior test: rectangles that only share an edge do not intersect.
    pub fn intersects(&self, other: &Rect) -> bool {
        self.x0 < other.x1 && other.x0 < self.x1 && self.y0 < other.y1 && other.y0 < self.y1
    }

    pub fn contains(&self, other: &Rect) -> bool {
        other.x0 >= self.x0 && other.y0 >= self.y0 && other.x1 <= self.x1 && other.y1 <= self.y1
    }

    pub fn expand(&self, margin: f64) -> Rect {
        Rect::new(self.x0 - margin, self.y0 - margin, self.x1 + margin, self.y1 + margin)
    }

    pub fn scale_about_center(&self, factor: f64) -> Rect {
        let (cx, cy) = self.center();
        Rect::centered(cx, cy, self.width() * factor, self.height() * factor)
    }

    pub fn translate(&self, dx: f64, dy: f64) -> Rect {
        Rect::new(self.x0 + dx, self.y0 + dy, self.x1 + dx, self.y1 + dy)
    }

    /// Separation along the best separating axis; negative when overlapping.
    pub fn gap(&self, other: &Rect) -> f64 {
        let gx = (other.x0 - self.x1).max(self.x0 - other.x1);
        let gy = (other.y0 - self.y1).max(self.y0 - other.y1);
        gx.max(gy)
    }

    pub fn union(&self, other: &Rect) -> Rect {
        Rect::new(self.x0.min(other.x0), self.y0.min(other.y0), self.x1.max(other.x1), self.y1.max(other.y1))
    }
}

/// Rounds to the 6-decimal grid used by every exported document, folding `-0` into `0`.
pub fn quantize(x: f64) -> f64 {
    let q = (x * 1e6).round() / 1e6;
    if q == 0.0 {
        0.0
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn touching_is_not_intersecting() {
        let a = Rect::new(0.0, 0.0, 10.0, 10.0);
        let b = Rect::new(10.0, 0.0, 20.0, 10.0);
        assert!(!a.intersects(&b));
        assert!(a.intersects(&Rect::new(9.0, 9.0, 11.0, 11.0)));
        assert_eq!(a.gap(&b), 0.0);
        assert_eq!(a.gap(&Rect::new(0.0, 15.0, 5.0, 20.0)), 5.0);
    }

    #[test]
    fn quantize_is_idempotent() {
        for x in [0.1234567, -0.0000004, 1.0 / 3.0, 123.4567895, -7.25] {
            let q = quantize(x);
            assert_eq!(quantize(q), q);
            assert_eq!(q.to_string().parse::<f64>().unwrap(), q);
        }
        assert!(quantize(-0.0000001).is_sign_positive());
    }
}
