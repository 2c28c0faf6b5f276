use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{GbdtError, Result};

/// Uniform 1-D grid `start, start + step, …`; `stop` is included when it lies
/// within half a step of a grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1 {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid1 {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let g = Grid1 { start, stop, step };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.step.is_finite()) {
            return Err(GbdtError::InvalidGrid("non-finite grid parameter".into()));
        }
        if self.step <= 0.0 {
            return Err(GbdtError::InvalidGrid(format!("step must be positive, got {}", self.step)));
        }
        if self.stop < self.start {
            return Err(GbdtError::InvalidGrid(format!(
                "stop {} lies before start {}",
                self.stop, self.start
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 0.5).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Same span, half the step.
    pub fn refined(&self) -> Grid1 {
        Grid1 {
            step: 0.5 * self.step,
            ..*self
        }
    }
}

impl FromStr for Grid1 {
    type Err = GbdtError;

    /// Parses `start:stop:step`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(GbdtError::InvalidGrid(format!("expected start:stop:step, got {s:?}")));
        }
        let num = |p: &str| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| GbdtError::InvalidGrid(format!("{p:?}: {e}")))
        };
        Grid1::new(num(parts[0])?, num(parts[1])?, num(parts[2])?)
    }
}

impl fmt::Display for Grid1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2 {
    pub x: Grid1,
    pub t: Grid1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Line(Grid1),
    Plane(Grid2),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stop_within_half_step_is_included() {
        let g: Grid1 = "0.1:5:0.1".parse().unwrap();
        assert_eq!(g.len(), 50);
        assert!((g.points().last().unwrap() - 5.0).abs() < 1e-12);
        let g = Grid1::new(0.0, 1.04, 0.1).unwrap();
        assert_eq!(g.len(), 11);
        let g = Grid1::new(0.0, 1.06, 0.1).unwrap();
        assert_eq!(g.len(), 12);
        assert_eq!(Grid1::new(2.0, 2.0, 0.5).unwrap().len(), 1);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!("1:2".parse::<Grid1>().is_err());
        assert!("1:2:0".parse::<Grid1>().is_err());
        assert!("3:2:0.1".parse::<Grid1>().is_err());
        assert!("a:2:0.1".parse::<Grid1>().is_err());
    }
}
