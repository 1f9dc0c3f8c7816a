//! Finite atomic measures on the complex plane.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: Complex64,
    pub mass: Complex64,
}

/// A finite list of atoms sorted by `(Re, Im)` of their locations.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    /// Sorts atoms and merges those closer than `cluster_tol`, summing masses.
    pub fn from_atoms(mut atoms: Vec<Atom>, cluster_tol: f64) -> Self {
        atoms.sort_by(|a, b| {
            a.location.re.total_cmp(&b.location.re).then(a.location.im.total_cmp(&b.location.im))
        });
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            let close = merged
                .iter_mut()
                .rev()
                .take_while(|m| atom.location.re - m.location.re <= cluster_tol)
                .find(|m| (m.location - atom.location).norm() <= cluster_tol);
            match close {
                Some(m) => m.mass += atom.mass,
                None => merged.push(atom),
            }
        }
        Self { atoms: merged }
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_mass(&self) -> Complex64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Total variation `sum |mass|` of atoms with `|Re location| < r`.
    pub fn variation_within(&self, r: f64) -> f64 {
        self.atoms.iter().filter(|a| a.location.re.abs() < r).map(|a| a.mass.norm()).sum()
    }

    /// Mass of the atom at `location` (zero when absent).
    pub fn mass_at(&self, location: Complex64, tol: f64) -> Complex64 {
        self.atoms
            .iter()
            .find(|a| (a.location - location).norm() <= tol)
            .map_or(Complex64::new(0.0, 0.0), |a| a.mass)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.atoms.iter().map(|a| a.location.im.abs()).fold(0.0, f64::max)
    }

    /// Restricts to atoms with `x_min <= Re location <= x_max`.
    pub fn restrict_real_window(&self, x_min: f64, x_max: f64) -> AtomicMeasure {
        let atoms = self
            .atoms
            .iter()
            .filter(|a| a.location.re >= x_min && a.location.re <= x_max)
            .copied()
            .collect();
        Self { atoms }
    }

    /// Writes `x,y,multiplicity` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,multiplicity")?;
        for a in &self.atoms {
            writeln!(out, "{:.16e},{:.16e},{}", a.location.re, a.location.im, a.mass.re.round() as i64)?;
        }
        Ok(())
    }
}

/// Axis-aligned rectangle `[x_min, x_max] x [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_min >= x_max || y_min >= y_max {
            return Err(Error::InvalidArgument(format!(
                "degenerate rectangle [{x_min}, {x_max}] x [{y_min}, {y_max}]"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x_min && z.re <= self.x_max && z.im >= self.y_min && z.im <= self.y_max
    }

    pub fn inflate(&self, margin: f64) -> Rect {
        Rect {
            x_min: self.x_min - margin,
            x_max: self.x_max + margin,
            y_min: self.y_min - margin,
            y_max: self.y_max + margin,
        }
    }

    /// Square of half-side `radius` around `z`.
    pub fn around(z: Complex64, radius: f64) -> Rect {
        Rect { x_min: z.re - radius, x_max: z.re + radius, y_min: z.im - radius, y_max: z.im + radius }
    }

    /// Counter-clockwise corners starting at the lower-left.
    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.x_min, self.y_min),
            Complex64::new(self.x_max, self.y_min),
            Complex64::new(self.x_max, self.y_max),
            Complex64::new(self.x_min, self.y_max),
        ]
    }

    /// Counter-clockwise boundary edges as `(start, end)` pairs.
    pub fn edges(&self) -> [(Complex64, Complex64); 4] {
        let c = self.corners();
        [(c[0], c[1]), (c[1], c[2]), (c[2], c[3]), (c[3], c[0])]
    }

    /// Splits across the longer side at relative position `frac`.
    pub fn split(&self, frac: f64) -> (Rect, Rect) {
        if self.width() >= self.height() {
            let x = self.x_min + frac * self.width();
            (Rect { x_max: x, ..*self }, Rect { x_min: x, ..*self })
        } else {
            let y = self.y_min + frac * self.height();
            (Rect { y_max: y, ..*self }, Rect { y_min: y, ..*self })
        }
    }
}
