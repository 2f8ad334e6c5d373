//! The sign engine: Koszul signs, the ϑ bookkeeping sign, and the global
//! suspension sign.
//!
//! Each sign function can be replaced by a deliberately wrong variant for the
//! current thread via [`with_mutant`]. The mutation suite uses this to confirm
//! that the checkers notice every single-sign corruption.

use std::cell::Cell;
use std::ops::Mul;

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    /// `(-1)^e`
    pub fn pow(e: i64) -> Self {
        Sign::from_parity(e.rem_euclid(2) == 1)
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn to_scalar(self) -> Scalar {
        match self {
            Sign::Plus => Scalar::one(),
            Sign::Minus => -Scalar::one(),
        }
    }

    pub fn apply(self, c: Scalar) -> Scalar {
        match self {
            Sign::Plus => c,
            Sign::Minus => -c,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self.is_minus() != rhs.is_minus())
    }
}

/// Single-sign corruptions of the engine, used only by the mutation suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mutant {
    KoszulTrivial,
    KoszulDropFirst,
    KoszulDropLast,
    KoszulShiftedMapDegree,
    KoszulShiftedSum,
    KoszulNegativeOnly,
    ThetaNoShift,
    ThetaSwapped,
    ThetaDropFirst,
    ThetaOffset,
    ThetaDropLast,
    SuspensionTrivial,
    SuspensionTriangular,
    SuspensionAlternating,
    SuspensionFlipped,
}

impl Mutant {
    pub const ALL: [Mutant; 15] = [
        Mutant::KoszulTrivial,
        Mutant::KoszulDropFirst,
        Mutant::KoszulDropLast,
        Mutant::KoszulShiftedMapDegree,
        Mutant::KoszulShiftedSum,
        Mutant::KoszulNegativeOnly,
        Mutant::ThetaNoShift,
        Mutant::ThetaSwapped,
        Mutant::ThetaDropFirst,
        Mutant::ThetaOffset,
        Mutant::ThetaDropLast,
        Mutant::SuspensionTrivial,
        Mutant::SuspensionTriangular,
        Mutant::SuspensionAlternating,
        Mutant::SuspensionFlipped,
    ];
}

thread_local! {
    static ACTIVE: Cell<Option<Mutant>> = const { Cell::new(None) };
}

fn active() -> Option<Mutant> {
    ACTIVE.with(|a| a.get())
}

/// Runs `f` with `m` replacing the correct sign rule on this thread.
pub fn with_mutant<R>(m: Mutant, f: impl FnOnce() -> R) -> R {
    struct Reset(Option<Mutant>);
    impl Drop for Reset {
        fn drop(&mut self) {
            ACTIVE.with(|a| a.set(self.0));
        }
    }
    let _reset = Reset(ACTIVE.with(|a| a.replace(Some(m))));
    f()
}

/// `(-1)^(map_degree · Σ left_degrees)`: the sign a map of degree `map_degree`
/// picks up when it passes elements of the given degrees.
pub fn koszul_sign(left_degrees: &[i32], map_degree: i32) -> Sign {
    let sum = |xs: &[i32]| xs.iter().map(|&d| d as i64).sum::<i64>();
    let d = map_degree as i64;
    match active() {
        Some(Mutant::KoszulTrivial) => Sign::Plus,
        Some(Mutant::KoszulDropFirst) => Sign::pow(d * sum(left_degrees.get(1..).unwrap_or(&[]))),
        Some(Mutant::KoszulDropLast) => {
            let n = left_degrees.len().saturating_sub(1);
            Sign::pow(d * sum(&left_degrees[..n]))
        }
        Some(Mutant::KoszulShiftedMapDegree) => Sign::pow((d + 1) * sum(left_degrees)),
        Some(Mutant::KoszulShiftedSum) => Sign::pow(d * (sum(left_degrees) + 1)),
        Some(Mutant::KoszulNegativeOnly) if d > 0 => Sign::Plus,
        _ => Sign::pow(d * sum(left_degrees)),
    }
}

/// `ϑ(u₁,…,u_k) = Σ_{i<j} u_i (u_j + 1)`.
pub fn theta(u: &[usize]) -> i64 {
    let pairs = |u: &[usize], f: &dyn Fn(i64, i64) -> i64| -> i64 {
        let mut t = 0;
        for i in 0..u.len() {
            for j in i + 1..u.len() {
                t += f(u[i] as i64, u[j] as i64);
            }
        }
        t
    };
    match active() {
        Some(Mutant::ThetaNoShift) => pairs(u, &|a, b| a * b),
        Some(Mutant::ThetaSwapped) => pairs(u, &|a, b| (a + 1) * b),
        Some(Mutant::ThetaDropFirst) => pairs(u.get(1..).unwrap_or(&[]), &|a, b| a * (b + 1)),
        Some(Mutant::ThetaOffset) => pairs(u, &|a, b| a * (b + 1)) + 1,
        Some(Mutant::ThetaDropLast) => {
            let n = u.len().saturating_sub(1);
            pairs(&u[..n], &|a, b| a * (b + 1))
        }
        _ => pairs(u, &|a, b| a * (b + 1)),
    }
}

/// The sign of `s^{⊗n} ∘ ω^{⊗n}` (and of `ω^{⊗n} ∘ s^{⊗n}`): `(-1)^{n(n-1)/2}`.
pub fn suspension_sign(n: usize) -> Sign {
    let n = n as i64;
    match active() {
        Some(Mutant::SuspensionTrivial) => Sign::Plus,
        Some(Mutant::SuspensionTriangular) => Sign::pow(n * (n + 1) / 2),
        Some(Mutant::SuspensionAlternating) => Sign::pow(n + 1),
        Some(Mutant::SuspensionFlipped) => Sign::pow(n * (n - 1) / 2 + 1),
        _ => Sign::pow(n * (n - 1) / 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[1], 1), Sign::Minus);
        assert_eq!(koszul_sign(&[2, 3], 0), Sign::Plus);
        assert_eq!(koszul_sign(&[1, 1], -1), Sign::Plus);
        assert_eq!(koszul_sign(&[], 7), Sign::Plus);
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(&[1, 1]), 2);
        assert_eq!(theta(&[2, 1]), 4);
        assert_eq!(theta(&[1, 2]), 3);
        assert_eq!(theta(&[1, 1, 1]), 6);
        assert_eq!(theta(&[5]), 0);
    }

    #[test]
    fn suspension_sign_examples() {
        assert_eq!(suspension_sign(1), Sign::Plus);
        assert_eq!(suspension_sign(2), Sign::Minus);
        assert_eq!(suspension_sign(3), Sign::Minus);
        assert_eq!(suspension_sign(4), Sign::Plus);
    }

    #[test]
    fn mutants_are_scoped_to_the_closure() {
        let inside = with_mutant(Mutant::ThetaOffset, || theta(&[1, 1]));
        assert_eq!(inside, 3);
        assert_eq!(theta(&[1, 1]), 2);
    }

    fn sign_table() -> Vec<i64> {
        let mut out = Vec::new();
        for a in 0..3usize {
            for b in 0..3usize {
                for c in 0..3usize {
                    out.push(theta(&[a, b, c]).rem_euclid(2));
                    out.push(theta(&[a, b]).rem_euclid(2));
                }
            }
        }
        for d in -2..=2 {
            for x in -2..=2 {
                for y in -2..=2 {
                    out.push(i64::from(koszul_sign(&[x, y], d).is_minus()));
                }
            }
        }
        out.extend((1..=8).map(|n| i64::from(suspension_sign(n).is_minus())));
        out
    }

    #[test]
    fn every_mutant_changes_some_sign() {
        let reference = sign_table();
        for m in Mutant::ALL {
            assert_ne!(with_mutant(m, sign_table), reference, "{m:?} never changes a sign");
        }
    }
}
