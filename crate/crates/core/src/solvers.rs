//! Closed-form and recurrence solvers for the free particle and the discrete
//! oscillator.
//!
//! Over `V₀ = 0` the seed equation has constant coefficients and its
//! characteristic equation is `-(1+ε)λ² + 2λ - 1 = 0`, with discriminant
//! `-4ε`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::seq::{Seq, Window};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum RootClass {
    DoubleReal { lambda: f64 },
    /// `ε = -κ²`, roots `1/(1+κ)` and `1/(1-κ)`.
    DistinctReal { kappa: f64, lambda_plus: f64, lambda_minus: f64 },
    /// `ε = μ²`, roots `r e^{±iθ}` with `r = 1/√(1+μ²)` and `tan θ = μ`.
    ComplexPair { mu: f64, modulus: f64, angle: f64 },
}

pub fn characteristic_classify<S: Scalar>(eps: &S) -> Result<RootClass> {
    if (S::one() + eps.clone()).is_zero() {
        return Err(Error::EpsIsMinusOne);
    }
    let e = eps.to_f64();
    Ok(if eps.is_zero() {
        RootClass::DoubleReal { lambda: 1.0 }
    } else if eps.is_negative() {
        let kappa = (-e).sqrt();
        RootClass::DistinctReal {
            kappa,
            lambda_plus: 1.0 / (1.0 + kappa),
            lambda_minus: 1.0 / (1.0 - kappa),
        }
    } else {
        let mu = e.sqrt();
        RootClass::ComplexPair {
            mu,
            modulus: 1.0 / (1.0 + e).sqrt(),
            angle: mu.atan(),
        }
    })
}

/// The standard seed for `V₀ = 0`: `n+1`, `(1+κ)^{-n} + (1-κ)^{-n}`, or
/// `rⁿ cos nθ` (float only).
pub fn canonical_seed<S: Scalar>(eps: &S, w: Window) -> Result<Seq<S>> {
    match characteristic_classify(eps)? {
        RootClass::DoubleReal { .. } => Ok(Seq::from_fn(w, |n| S::from_int(n + 1))),
        RootClass::DistinctReal { .. } => {
            let kappa = (-eps.clone())
                .sqrt_exact()
                .ok_or_else(|| Error::IrrationalRoot(eps.format()))?;
            let a = S::one() + kappa.clone();
            let b = S::one() - kappa;
            Ok(Seq::from_fn(w, |n| a.powi(-n).unwrap() + b.powi(-n).unwrap()))
        }
        RootClass::ComplexPair { modulus, angle, .. } => {
            if S::is_exact() {
                return Err(Error::BackendMismatch("complex characteristic roots need the float backend"));
            }
            Ok(Seq::from_fn(w, |n| {
                S::from_f64(modulus.powi(n as i32) * (n as f64 * angle).cos())
            }))
        }
    }
}

/// Kernel of `-Δ + f`: `φ(lo) = φ₀`, `φ(n+1) = (1 + f(n)) φ(n)`, on `[lo, hi+1]`.
pub fn kernel_first_order<S: Scalar>(f: &Seq<S>, phi0: S) -> Seq<S> {
    let mut phi = vec![phi0];
    for (_, fv) in f.iter() {
        let next = (S::one() + fv.clone()) * phi.last().unwrap().clone();
        phi.push(next);
    }
    Seq::new(f.lo(), phi).expect("nonempty")
}

/// General superpotential for `V₀ = n² + n + 1`: `f̃(n) = n + 1/u(n)` with
/// `u(1) = -C₁` and `-n u(n+1) = (n+1) u(n) + 1`.
///
/// Returns `(u, f̃)` on `w`, which must start at `n ≥ 1`.
pub fn riccati_general_oscillator<S: Scalar>(c1: &S, w: Window) -> Result<(Seq<S>, Seq<S>)> {
    if w.lo() < 1 {
        return Err(Error::Config(format!(
            "oscillator recurrence starts at n = 1, window begins at {}",
            w.lo()
        )));
    }
    let mut u = -c1.clone();
    let mut us = Vec::with_capacity(w.len());
    for n in 1..=w.hi() {
        if n >= w.lo() {
            us.push(u.clone());
        }
        let np1 = S::from_int(n + 1);
        u = -(np1 * u + S::one()) / S::from_int(n);
    }
    let u = Seq::new(w.lo(), us)?;
    if let Some(n) = u.first_zero() {
        return Err(Error::UZero(n));
    }
    let f = Seq::from_fn(w, |n| S::from_int(n) + S::one() / u.at(n).clone());
    Ok((u, f))
}

/// `C₁ + C₂ n`, the general zero mode of `-Δ²`.
pub fn free_particle_zero_mode<S: Scalar>(c1: &S, c2: &S, w: Window) -> Seq<S> {
    Seq::from_fn(w, |n| c1.clone() + c2.clone() * S::from_int(n))
}
