//! Chow rings of projective space and of smooth hypersurfaces, truncated to
//! the dimension, as polynomials in the hyperplane class h.

use std::ops::{Add, Mul, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactalg::{int, Rational};

/// P^n, or a smooth degree d hypersurface in P^n.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChowSpace {
    ambient: usize,
    degree: Option<u32>,
}

/// A class Σ cᵢhⁱ, truncated above the dimension of its space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChowClass {
    coeffs: Vec<Rational>,
}

impl ChowSpace {
    pub fn projective(n: usize) -> Self {
        ChowSpace { ambient: n, degree: None }
    }

    pub fn hypersurface(n: usize, d: u32) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::validation("hypersurface", "needs n ≥ 1 and degree ≥ 1"));
        }
        Ok(ChowSpace {
            ambient: n,
            degree: Some(d),
        })
    }

    pub fn dim(&self) -> usize {
        self.ambient - usize::from(self.degree.is_some())
    }

    pub fn constant(&self, c: Rational) -> ChowClass {
        let mut coeffs = vec![Rational::zero(); self.dim() + 1];
        coeffs[0] = c;
        ChowClass { coeffs }
    }

    pub fn h(&self) -> ChowClass {
        self.h_pow(1)
    }

    pub fn h_pow(&self, e: usize) -> ChowClass {
        let mut coeffs = vec![Rational::zero(); self.dim() + 1];
        if e <= self.dim() {
            coeffs[e] = Rational::one();
        }
        ChowClass { coeffs }
    }

    /// 1 + c·h.
    pub fn linear(&self, c: i64) -> ChowClass {
        &self.constant(Rational::one()) + &(&self.h() * int(c))
    }

    /// c(Ω) = (1−h)^{n+1}, divided by (1−dh) on a hypersurface.
    pub fn chern_omega(&self) -> ChowClass {
        let mut c = self.constant(Rational::one());
        let one_minus_h = self.linear(-1);
        for _ in 0..=self.ambient {
            c = &c * &one_minus_h;
        }
        if let Some(d) = self.degree {
            // 1/(1 − dh) = Σ (dh)^i
            let inv = ChowClass {
                coeffs: (0..=self.dim()).map(|i| int(d as i64).pow(i as i32)).collect(),
            };
            c = &c * &inv;
        }
        c
    }

    pub fn chern_omega_i(&self, i: usize) -> ChowClass {
        self.chern_omega().component(i)
    }

    /// ∫ h^{dim}: 1 on P^n, d on a degree d hypersurface.
    pub fn point_degree(&self) -> Rational {
        int(self.degree.unwrap_or(1) as i64)
    }
}

impl ChowClass {
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    /// The degree i part.
    pub fn component(&self, i: usize) -> ChowClass {
        let coeffs = (0..self.coeffs.len())
            .map(|j| if j == i { self.coeff(j) } else { Rational::zero() })
            .collect();
        ChowClass { coeffs }
    }
}

impl Add for &ChowClass {
    type Output = ChowClass;
    fn add(self, rhs: &ChowClass) -> ChowClass {
        ChowClass {
            coeffs: (0..self.coeffs.len()).map(|i| self.coeff(i) + rhs.coeff(i)).collect(),
        }
    }
}

impl Sub for &ChowClass {
    type Output = ChowClass;
    fn sub(self, rhs: &ChowClass) -> ChowClass {
        ChowClass {
            coeffs: (0..self.coeffs.len()).map(|i| self.coeff(i) - rhs.coeff(i)).collect(),
        }
    }
}

impl Mul for &ChowClass {
    type Output = ChowClass;
    fn mul(self, rhs: &ChowClass) -> ChowClass {
        let len = self.coeffs.len();
        let mut coeffs = vec![Rational::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] += a * b;
            }
        }
        ChowClass { coeffs }
    }
}

impl Mul<Rational> for &ChowClass {
    type Output = ChowClass;
    fn mul(self, c: Rational) -> ChowClass {
        ChowClass {
            coeffs: self.coeffs.iter().map(|x| x * &c).collect(),
        }
    }
}

/// Degree of a top-dimensional class. Nonzero lower-degree parts are rejected.
pub fn chow_pn(space: &ChowSpace, class: &ChowClass) -> Result<Rational> {
    let top = space.dim();
    if class.coeffs.len() != top + 1 {
        return Err(Error::Dimension(format!("class lives on a space of dimension {}", class.coeffs.len() - 1)));
    }
    if let Some(i) = (0..top).find(|&i| !class.coeffs[i].is_zero()) {
        return Err(Error::Dimension(format!("class has a nonzero part in degree {i} < {top}")));
    }
    Ok(class.coeff(top) * space.point_degree())
}
