//! Seven-point central finite differences on periodic lattices.

use crate::error::{Error, Result};

/// Number of points in every stencil (offsets -3..=3).
pub const STENCIL_WIDTH: usize = 7;

const ROWS: [[f64; STENCIL_WIDTH]; 4] = [
    [
        -1.0 / 60.0,
        3.0 / 20.0,
        -3.0 / 4.0,
        0.0,
        3.0 / 4.0,
        -3.0 / 20.0,
        1.0 / 60.0,
    ],
    [
        1.0 / 90.0,
        -3.0 / 20.0,
        3.0 / 2.0,
        -49.0 / 18.0,
        3.0 / 2.0,
        -3.0 / 20.0,
        1.0 / 90.0,
    ],
    [1.0 / 8.0, -1.0, 13.0 / 8.0, 0.0, -13.0 / 8.0, 1.0, -1.0 / 8.0],
    [
        -1.0 / 6.0,
        2.0,
        -13.0 / 2.0,
        28.0 / 3.0,
        -13.0 / 2.0,
        2.0,
        -1.0 / 6.0,
    ],
];

/// Central stencil for the derivative of a given order on a lattice of spacing `dx`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stencil7 {
    pub order: u32,
    pub coeffs: [f64; STENCIL_WIDTH],
    /// `dx^(-order)`.
    pub scale: f64,
}

impl Stencil7 {
    pub fn new(order: u32, dx: f64) -> Result<Self> {
        if !(1..=4).contains(&order) {
            return Err(Error::invalid(
                "order",
                format!("derivative order {order} not in 1..=4"),
            ));
        }
        Ok(Self {
            order,
            coeffs: ROWS[order as usize - 1],
            scale: dx.powi(-(order as i32)),
        })
    }

    /// Raw coefficient row for offsets -3..=3.
    pub fn row(order: u32) -> Option<[f64; STENCIL_WIDTH]> {
        ROWS.get((order as usize).checked_sub(1)?).copied()
    }

    /// Derivative at index `i` of a periodic array.
    #[inline]
    pub fn apply_periodic(&self, values: &[f64], i: usize) -> f64 {
        let n = values.len();
        let mut s = 0.0;
        for (o, c) in self.coeffs.iter().enumerate() {
            if *c != 0.0 {
                s += c * values[(i + n + o - 3) % n];
            }
        }
        s * self.scale
    }

    /// Derivative at every index of a periodic array.
    pub fn derivative(&self, values: &[f64]) -> Vec<f64> {
        (0..values.len())
            .map(|i| self.apply_periodic(values, i))
            .collect()
    }

    /// Derivative at an interior point of a non-periodic lattice (`3 <= i < n - 3`).
    pub fn apply_interior(&self, values: &[f64], i: usize) -> f64 {
        assert!(i >= 3 && i + 3 < values.len(), "index {i} not interior");
        let mut s = 0.0;
        for (o, c) in self.coeffs.iter().enumerate() {
            s += c * values[i + o - 3];
        }
        s * self.scale
    }
}

/// Periodic derivative at cell `i`, checking that the lattice supports the stencil.
pub fn apply_stencil(values: &[f64], stencil: &Stencil7, i: usize) -> Result<f64> {
    if values.len() < STENCIL_WIDTH {
        return Err(Error::MeshTooSmall {
            required: STENCIL_WIDTH,
            actual: values.len(),
        });
    }
    if i >= values.len() {
        return Err(Error::invalid("i", format!("{i} out of range {}", values.len())));
    }
    Ok(stencil.apply_periodic(values, i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn annihilates_constants() {
        for order in 1..=4 {
            let s = Stencil7::new(order, 1.0).unwrap();
            let v = vec![3.7; 12];
            for i in 0..12 {
                assert!(apply_stencil(&v, &s, i).unwrap().abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn linear_exactness() {
        let dx = 0.25;
        let s = Stencil7::new(1, dx).unwrap();
        let v: Vec<f64> = (0..10).map(|i| 1.5 + i as f64 * dx).collect();
        assert!((s.apply_interior(&v, 5) - 1.0).abs() <= 4.0 * f64::EPSILON);
    }

    #[test]
    fn high_order_monomials() {
        let dx = 0.5;
        let x: Vec<f64> = (0..11).map(|i| -1.0 + i as f64 * dx).collect();
        let x3: Vec<f64> = x.iter().map(|v| v.powi(3)).collect();
        let x4: Vec<f64> = x.iter().map(|v| v.powi(4)).collect();
        let s3 = Stencil7::new(3, dx).unwrap();
        let s4 = Stencil7::new(4, dx).unwrap();
        for i in 3..8 {
            assert!((s3.apply_interior(&x3, i) - 6.0).abs() <= 1e-9);
            assert!((s4.apply_interior(&x4, i) - 24.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn small_lattice_rejected() {
        let s = Stencil7::new(2, 1.0).unwrap();
        assert!(matches!(
            apply_stencil(&[0.0; 6], &s, 0),
            Err(Error::MeshTooSmall { .. })
        ));
        assert!(Stencil7::new(5, 1.0).is_err());
        assert!(Stencil7::new(0, 1.0).is_err());
    }

    #[test]
    fn row_parity() {
        for order in 1..=4u32 {
            let c = Stencil7::row(order).unwrap();
            for o in 0..3 {
                if order % 2 == 1 {
                    assert_eq!(c[o], -c[6 - o]);
                } else {
                    assert_eq!(c[o], c[6 - o]);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn odd_rows_kill_even_monomials_about_center(q in 0u32..4, dx in 0.05f64..1.0) {
            // even monomial about the evaluation point
            let v: Vec<f64> = (0..7).map(|o| ((o as f64 - 3.0) * dx).powi(2 * q as i32)).collect();
            for order in [1u32, 3] {
                let s = Stencil7::new(order, dx).unwrap();
                prop_assert!(s.apply_interior(&v, 3).abs() <= 1e-12 * s.scale);
            }
            let w: Vec<f64> = (0..7).map(|o| ((o as f64 - 3.0) * dx).powi(2 * q as i32 + 1)).collect();
            for order in [2u32, 4] {
                let s = Stencil7::new(order, dx).unwrap();
                prop_assert!(s.apply_interior(&w, 3).abs() <= 1e-12 * s.scale);
            }
        }
    }
}
