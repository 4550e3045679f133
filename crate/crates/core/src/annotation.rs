use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::mask::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Click,
    Line,
}

impl Kind {
    /// Click-equivalent cost: a line is two connected clicks.
    pub fn cost(self) -> u32 {
        match self {
            Kind::Click => 1,
            Kind::Line => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "pos")]
    Positive,
    #[serde(rename = "neg")]
    Negative,
}

impl Sign {
    /// Ground-truth label the annotated pixels belong to.
    pub fn label(self) -> Label {
        match self {
            Sign::Positive => Label::Foreground,
            Sign::Negative => Label::Background,
        }
    }

    pub fn opposite_label(self) -> Label {
        match self {
            Sign::Positive => Label::Background,
            Sign::Negative => Label::Foreground,
        }
    }
}

/// One user input: a signed click or a signed two-point line.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Annotation {
    pub kind: Kind,
    pub sign: Sign,
    pub points: Vec<Point>,
}

impl Annotation {
    pub fn click(sign: Sign, p: Point) -> Self {
        Self {
            kind: Kind::Click,
            sign,
            points: vec![p],
        }
    }

    pub fn line(sign: Sign, a: Point, b: Point) -> Self {
        Self {
            kind: Kind::Line,
            sign,
            points: vec![a, b],
        }
    }

    pub fn cost(&self) -> u32 {
        self.kind.cost()
    }

    /// Pixels covered: the click point, or the rasterized segment.
    pub fn pixels(&self) -> Vec<Point> {
        match self.kind {
            Kind::Click => self.points.clone(),
            Kind::Line => crate::raster::raster_line(self.points[0], self.points[1]),
        }
    }

    pub fn validate(&self, width: usize, height: usize) -> Result<()> {
        let expected = match self.kind {
            Kind::Click => 1,
            Kind::Line => 2,
        };
        if self.points.len() != expected {
            return Err(Error::InvalidParam(format!(
                "{:?} annotation with {} points",
                self.kind,
                self.points.len()
            )));
        }
        for p in &self.points {
            if p.x >= width || p.y >= height {
                return Err(Error::OutOfBounds {
                    x: p.x as i64,
                    y: p.y as i64,
                    width,
                    height,
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_shape() {
        let a = Annotation::line(Sign::Positive, Point::new(5, 5), Point::new(40, 8));
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"line","sign":"pos","points":[{"x":5,"y":5},{"x":40,"y":8}]}"#
        );
        let back: Annotation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert_eq!(a.cost(), 2);
        assert_eq!(Annotation::click(Sign::Negative, Point::new(0, 0)).cost(), 1);
    }

    #[test]
    fn validation() {
        let a = Annotation::click(Sign::Positive, Point::new(9, 0));
        assert!(a.validate(10, 1).is_ok());
        assert!(a.validate(9, 1).is_err());
        let bad = Annotation {
            kind: Kind::Line,
            sign: Sign::Positive,
            points: vec![Point::new(0, 0)],
        };
        assert!(bad.validate(5, 5).is_err());
    }
}
