//! Signs of the m-system nonlinearities.
//!
//! Two printed listings of N₃, N₄, N₅ disagree in three signs and in the
//! coefficient of the critical quintic term. The values frozen here are the
//! ones under which `verify_m_derivation` converges at second order; the
//! test suite re-derives them from scratch and checks they still win.

/// Sign and coefficient choices inside N₃, N₄, N₅:
///
/// ```text
/// N₃ ∋ (2i/(2−Δ))·s_n3·m₁²u₂
/// N₄ ∋ (2i/(2−Δ))·s_n4·2u₂m₁R
/// N₅ = s_n5·(i/(2−Δ))[−2u₂R² + c_n5c·u₂|u|⁴]
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SignConvention {
    pub s_n3: i8,
    pub s_n4: i8,
    pub s_n5: i8,
    pub c_n5c: f64,
}

pub const FROZEN: SignConvention = SignConvention { s_n3: -1, s_n4: -1, s_n5: 1, c_n5c: 0.5 };

/// The alternative listing, kept for negative controls.
pub const ALTERNATE: SignConvention = SignConvention { s_n3: 1, s_n4: 1, s_n5: -1, c_n5c: 0.5 };

pub const C_N5C_CHOICES: [f64; 2] = [0.5, 0.125];

impl Default for SignConvention {
    fn default() -> Self {
        FROZEN
    }
}

impl SignConvention {
    /// Every combination of the three signs and the two quintic coefficients.
    pub fn all() -> Vec<Self> {
        let mut v = Vec::with_capacity(16);
        for s_n3 in [-1, 1] {
            for s_n4 in [-1, 1] {
                for s_n5 in [-1, 1] {
                    for c_n5c in C_N5C_CHOICES {
                        v.push(Self { s_n3, s_n4, s_n5, c_n5c });
                    }
                }
            }
        }
        v
    }

    pub fn flip_n3(self) -> Self {
        Self { s_n3: -self.s_n3, ..self }
    }

    pub fn flip_n4(self) -> Self {
        Self { s_n4: -self.s_n4, ..self }
    }

    pub fn flip_n5(self) -> Self {
        Self { s_n5: -self.s_n5, ..self }
    }

    pub fn other_quintic(self) -> Self {
        let c = if self.c_n5c == C_N5C_CHOICES[0] { C_N5C_CHOICES[1] } else { C_N5C_CHOICES[0] };
        Self { c_n5c: c, ..self }
    }
}
