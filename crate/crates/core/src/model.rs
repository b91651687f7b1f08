//! SU(2)_k model parameters: the Kauffman variable `A` and quantum dimension `d`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::{c_re, cos_pi, expi_pi, Real, C};

/// Level of the SU(2)_k theory. `Infinity` is the undeformed limit `A = i`, `d = 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    Finite(u32),
    Infinity,
}

impl Level {
    pub fn is_abelian(self) -> bool {
        self == Level::Finite(1)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Finite(k) => write!(f, "{k}"),
            Level::Infinity => f.write_str("inf"),
        }
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Level::Infinity),
            _ => {}
        }
        match s.parse::<u32>() {
            Ok(k) if k >= 1 => Ok(Level::Finite(k)),
            _ => Err(Error::InvalidLevel(s.to_owned())),
        }
    }
}

/// Immutable SU(2)_k parameter set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnyonModel<T> {
    level: Level,
    a: C<T>,
    d: T,
}

impl<T: Real> AnyonModel<T> {
    /// Builds the model for `level`: `A = i·e^{−iπ/(2(k+2))}`, `d = 2cos(π/(k+2))`.
    pub fn new(level: Level) -> Result<Self> {
        if let Level::Finite(0) = level {
            return Err(Error::InvalidLevel("0".into()));
        }
        let mut model = AnyonModel { level, a: C::new(T::zero(), T::one()), d: T::lit(2.0) };
        model.a = model.a_pow(1);
        if let Level::Finite(k) = level {
            model.d = T::lit(2.0) * cos_pi(1, i64::from(k) + 2);
        }
        Ok(model)
    }

    pub fn level(&self) -> Level {
        self.level
    }

    /// Kauffman variable `A`.
    pub fn a(&self) -> C<T> {
        self.a
    }

    /// Quantum dimension `d`.
    pub fn d(&self) -> T {
        self.d
    }

    /// `A^n`, with exact phases where they are rational.
    pub fn a_pow(&self, n: i64) -> C<T> {
        match self.level {
            // i^n
            Level::Infinity => expi_pi(n, 2),
            Level::Finite(k) => {
                // A^n = e^{iπn/2}·e^{−iπn/(2(k+2))} = e^{iπ n(k+1) / (2(k+2))}
                let k = i64::from(k);
                expi_pi(n * (k + 1), 2 * (k + 2))
            }
        }
    }

    /// Value of a removable loop, `−(A² + A⁻²)`.
    pub fn loop_value(&self) -> C<T> {
        -(self.a_pow(2) + self.a_pow(-2))
    }

    /// `A⁴ + A⁻⁴`, which vanishes for the Ising model.
    pub fn quartic_sum(&self) -> C<T> {
        self.a_pow(4) + self.a_pow(-4)
    }

    pub fn d_complex(&self) -> C<T> {
        c_re(self.d)
    }
}
