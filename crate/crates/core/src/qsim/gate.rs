use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dense unitary on one or two qubits, row-major, first target is the most
/// significant bit of the local index.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate<T> {
    arity: usize,
    data: Vec<Complex<T>>,
}

fn c<T: Scalar>(re: f64, im: f64) -> Complex<T> {
    Complex::new(T::lit(re), T::lit(im))
}

impl<T: Scalar> Gate<T> {
    /// Checks unitarity against `T::exact_tol()`.
    pub fn new(data: Vec<Complex<T>>) -> Result<Self> {
        let arity = match data.len() {
            4 => 1,
            16 => 2,
            n => return Err(Error::BadLength(n)),
        };
        let gate = Self { arity, data };
        let dev = gate.unitarity_deviation();
        if dev > T::EXACT_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(gate)
    }

    fn from_real(rows: &[f64]) -> Self {
        let arity = if rows.len() == 4 { 1 } else { 2 };
        Self {
            arity,
            data: rows.iter().map(|&x| c(x, 0.0)).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn matrix(&self) -> &[Complex<T>] {
        &self.data
    }

    /// max |(U U†)_{ij} − δ_ij|
    pub fn unitarity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut dev = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..d {
                    acc += self.data[i * d + k] * self.data[j * d + k].conj();
                }
                if i == j {
                    acc -= Complex::new(T::one(), T::zero());
                }
                dev = dev.max(acc.norm().as_f64());
            }
        }
        dev
    }

    pub fn conjugate(&self) -> Self {
        Self {
            arity: self.arity,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim();
        let mut data = self.data.clone();
        for i in 0..d {
            for j in 0..d {
                data[i * d + j] = self.data[j * d + i].conj();
            }
        }
        Self {
            arity: self.arity,
            data,
        }
    }

    pub fn identity() -> Self {
        Self::from_real(&[1.0, 0.0, 0.0, 1.0])
    }

    pub fn x() -> Self {
        Self::from_real(&[0.0, 1.0, 1.0, 0.0])
    }

    pub fn z() -> Self {
        Self::from_real(&[1.0, 0.0, 0.0, -1.0])
    }

    pub fn y() -> Self {
        Self {
            arity: 1,
            data: vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        }
    }

    pub fn h() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_real(&[s, s, s, -s])
    }

    pub fn s() -> Self {
        Self {
            arity: 1,
            data: vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
        }
    }

    pub fn sdg() -> Self {
        Self::s().adjoint()
    }

    /// Control is the first target.
    pub fn cnot() -> Self {
        #[rustfmt::skip]
        let m = [
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 0.0, 1.0,
            0.0, 0.0, 1.0, 0.0,
        ];
        Self::from_real(&m)
    }

    pub fn cz() -> Self {
        #[rustfmt::skip]
        let m = [
            1.0, 0.0, 0.0, 0.0,
            0.0, 1.0, 0.0, 0.0,
            0.0, 0.0, 1.0, 0.0,
            0.0, 0.0, 0.0, -1.0,
        ];
        Self::from_real(&m)
    }
}
