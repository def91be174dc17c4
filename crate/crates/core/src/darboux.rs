//! One discrete Darboux step.
//!
//! A seed `ψ` solving `(-Δ² + V₀(n)) ψ(n) = ε ψ(n+2)` defines the
//! superpotential `f(n) = Δψ(n)/ψ(n)`, and the intertwined potential is
//! `V₁(n) = V₀(n+1) - 2Δf(n+1)`. Zero modes of `H₀` are carried to zero modes
//! of `H₁` by `-Δ + f(n)`.

use crate::error::{Error, Result};
use crate::operators::{
    apply_h, apply_ladder, intertwining_residual, seed_equation_residual, theorem1_residuals,
    Hamiltonian, LadderSign, Residual, DEFAULT_FLOAT_TOL,
};
use crate::scalar::Scalar;
use crate::seq::{output_window, Seq};

/// A nowhere-vanishing solution of the shifted eigenproblem for `eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct Seed<S> {
    psi: Seq<S>,
    eps: S,
}

impl<S: Scalar> Seed<S> {
    /// Validates `psi` against `v0`: no zeros, and the shifted eigenproblem
    /// holds on every index where it can be evaluated.
    pub fn new(psi: Seq<S>, eps: S, v0: &Seq<S>) -> Result<Self> {
        Self::with_tolerance(psi, eps, v0, DEFAULT_FLOAT_TOL)
    }

    pub fn with_tolerance(psi: Seq<S>, eps: S, v0: &Seq<S>, tol: f64) -> Result<Self> {
        if let Some(n) = psi.first_zero() {
            return Err(Error::SeedVanishes(n));
        }
        let r = seed_equation_residual(v0, &psi, &eps)?;
        if !r.vanishes(tol) {
            return Err(Error::NotASeed {
                worst_index: r.worst_index(),
                max_abs: r.max_abs().format(),
            });
        }
        Ok(Seed { psi, eps })
    }

    pub fn psi(&self) -> &Seq<S> {
        &self.psi
    }

    pub fn eps(&self) -> &S {
        &self.eps
    }
}

/// Runs `ψ(n+2) = [2ψ(n+1) + (V₀(n) - 1)ψ(n)] / (1 + ε)` from two initial
/// values at `V₀`'s lower bound. The seed covers `[lo, hi + 2]`.
pub fn generate_seed<S: Scalar>(v0: &Seq<S>, eps: S, psi0: S, psi1: S) -> Result<Seed<S>> {
    let denom = S::one() + eps.clone();
    if denom.is_zero() {
        return Err(Error::EpsIsMinusOne);
    }
    let one = S::one();
    let two = S::from_int(2);
    let mut psi = Vec::with_capacity(v0.len() + 2);
    psi.push(psi0);
    psi.push(psi1);
    for (i, (_, v)) in v0.iter().enumerate() {
        let next = (two.clone() * psi[i + 1].clone() + (v.clone() - one.clone()) * psi[i].clone())
            / denom.clone();
        psi.push(next);
    }
    let psi = Seq::new(v0.lo(), psi)?;
    if let Some(n) = psi.first_zero() {
        return Err(Error::SeedVanishes(n));
    }
    Seed::new(psi, eps, v0)
}

/// `f(n) = ψ(n+1)/ψ(n) - 1`.
pub fn superpotential<S: Scalar>(seed: &Seed<S>) -> Seq<S> {
    log_ratio(seed.psi()).expect("seed windows hold at least three points")
}

/// `Δψ/ψ` for a nowhere-zero sequence.
pub(crate) fn log_ratio<S: Scalar>(psi: &Seq<S>) -> Result<Seq<S>> {
    let w = output_window("superpotential", &[(psi.window(), 0, 1)])?;
    Ok(Seq::from_fn(w, |n| {
        psi.at(n + 1).clone() / psi.at(n).clone() - S::one()
    }))
}

/// `V₁(n) = V₀(n+1) - 2(f(n+2) - f(n+1))`.
pub fn transform_potential<S: Scalar>(v0: &Seq<S>, f1: &Seq<S>) -> Result<Seq<S>> {
    let w = output_window("potential update", &[(v0.window(), 1, 1), (f1.window(), 1, 2)])?;
    let two = S::from_int(2);
    Ok(Seq::from_fn(w, |n| {
        v0.at(n + 1).clone() - two.clone() * (f1.at(n + 2).clone() - f1.at(n + 1).clone())
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DarbouxStep<S> {
    pub seed: Seed<S>,
    pub f1: Seq<S>,
    pub v0: Seq<S>,
    pub v1: Seq<S>,
}

impl<S: Scalar> DarbouxStep<S> {
    pub fn new(v0: Seq<S>, seed: Seed<S>) -> Result<Self> {
        let f1 = superpotential(&seed);
        let v1 = transform_potential(&v0, &f1)?;
        Ok(DarbouxStep { seed, f1, v0, v1 })
    }

    pub fn h0(&self) -> Hamiltonian<S> {
        Hamiltonian::new(self.v0.clone())
    }

    pub fn h1(&self) -> Hamiltonian<S> {
        Hamiltonian::new(self.v1.clone())
    }

    pub fn transform_solution(&self, phi: &Seq<S>) -> Result<Seq<S>> {
        transform_solution(self, phi)
    }

    pub fn theorem1_residuals(&self) -> Result<(Residual<S>, Residual<S>)> {
        theorem1_residuals(&self.v0, &self.v1, &self.f1)
    }

    pub fn intertwining_residual(&self, psi: &Seq<S>) -> Result<Residual<S>> {
        intertwining_residual(&self.h1(), &self.h0(), &self.f1, psi)
    }
}

/// `(-Δ + f₁(n)) φ(n) = (1 + f₁(n)) φ(n) - φ(n+1)`.
pub fn transform_solution<S: Scalar>(step: &DarbouxStep<S>, phi: &Seq<S>) -> Result<Seq<S>> {
    apply_ladder(&step.f1, LadderSign::Plus, phi)
}

/// `w(n) = (1+ε)ⁿ ψ(n) / C`, which solves `(-Δ² + (1+ε)V₀(n)) w = ε w`.
pub fn gauge_to_w<S: Scalar>(seed: &Seed<S>, c: &S) -> Result<Seq<S>> {
    let base = S::one() + seed.eps().clone();
    if base.is_zero() {
        return Err(Error::EpsIsMinusOne);
    }
    if c.is_zero() {
        return Err(Error::Config("gauge constant C must be nonzero".into()));
    }
    Seq::try_from_fn(seed.psi().window(), |n| {
        let p = base.powi(n).ok_or(Error::EpsIsMinusOne)?;
        Ok(p * seed.psi().at(n).clone() / c.clone())
    })
}

/// Defect of `(-Δ² + (1+ε)V₀(n)) w(n) = ε w(n)`.
pub fn gauge_residual<S: Scalar>(w: &Seq<S>, v0: &Seq<S>, eps: &S) -> Result<Residual<S>> {
    let scaled = v0.map(|v| (S::one() + eps.clone()) * v.clone());
    let hw = apply_h(&scaled, w)?;
    Ok(Residual::from_sides("gauged eigenproblem", hw.window(), |n| {
        (hw.at(n).clone(), eps.clone() * w.at(n).clone())
    }))
}

/// The `ε = -1` step, where the seed equation drops to first order,
/// `2ψ(n+1) = (1 - V₀(n)) ψ(n)`, and the new potential is `V₀(n+2)`.
pub fn eps_minus_one_step<S: Scalar>(v0: &Seq<S>) -> Result<DarbouxStep<S>> {
    if v0.len() < 3 {
        return Err(Error::WindowTooSmall {
            what: "eps = -1 step",
            needed: 3,
            got: v0.len(),
        });
    }
    let half = S::one() / S::from_int(2);
    let mut psi = vec![S::one()];
    for (n, v) in v0.iter() {
        let next = half.clone() * (S::one() - v.clone()) * psi.last().unwrap().clone();
        if next.is_zero() {
            return Err(Error::SeedVanishes(n + 1));
        }
        psi.push(next);
    }
    let psi = Seq::new(v0.lo(), psi)?;
    let seed = Seed::new(psi, -S::one(), v0)?;
    DarbouxStep::new(v0.clone(), seed)
}

pub fn eps_minus_one_shift<S: Scalar>(v0: &Seq<S>) -> Result<Seq<S>> {
    Ok(eps_minus_one_step(v0)?.v1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use crate::operators::{eps_potential_residual, factorization_residuals};
    use crate::scalar::{rational, Rational};
    use crate::seq::Window;
    use num_traits::Zero;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn tab(e: &str, lo: i64, hi: i64) -> Seq<Rational> {
        Expr::parse(e).unwrap().tabulate(Window::new(lo, hi).unwrap()).unwrap()
    }

    fn q(p: i64, d: i64) -> Rational {
        rational(p, d)
    }

    fn random_rat(rng: &mut ChaCha8Rng) -> Rational {
        q(rng.gen_range(-12..=12), rng.gen_range(1..=6))
    }

    fn random_seq(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> Seq<Rational> {
        Seq::from_fn(Window::new(lo, hi).unwrap(), |_| random_rat(rng))
    }

    #[test]
    fn seed_examples() {
        let v0 = tab("0", 0, 20);
        let s = generate_seed(&v0, q(0, 1), q(1, 1), q(2, 1)).unwrap();
        assert_eq!(s.psi(), &tab("n+1", 0, 22));

        let s = generate_seed(&v0, q(-1, 4), q(2, 1), q(8, 3)).unwrap();
        assert_eq!(s.psi().at(2), &q(40, 9));
        assert_eq!(s.psi().at(3), &q(224, 27));
        assert_eq!(s.psi(), &tab("(2/3)^n + 2^n", 0, 22));

        let s = generate_seed(&v0, q(0, 1), q(1, 1), q(1, 1)).unwrap();
        assert!(s.psi().values().iter().all(|x| *x == q(1, 1)));
    }

    #[test]
    fn seed_errors() {
        let v0 = tab("0", 0, 10);
        assert!(matches!(generate_seed(&v0, q(-1, 1), q(1, 1), q(2, 1)), Err(Error::EpsIsMinusOne)));
        // ψ(n) = 2 - n hits zero at n = 2
        assert!(matches!(generate_seed(&v0, q(0, 1), q(2, 1), q(1, 1)), Err(Error::SeedVanishes(2))));
        assert!(matches!(generate_seed(&v0, q(0, 1), q(0, 1), q(0, 1)), Err(Error::SeedVanishes(0))));
        // n^2 + 1 does not solve the free problem
        assert!(matches!(Seed::new(tab("n^2+1", 0, 12), q(0, 1), &v0), Err(Error::NotASeed { .. })));
    }

    #[test]
    fn superpotential_examples() {
        let v0 = tab("0", 0, 20);
        let s = generate_seed(&v0, q(0, 1), q(1, 1), q(2, 1)).unwrap();
        assert_eq!(superpotential(&s), tab("1/(n+1)", 0, 21));
        let s = generate_seed(&v0, q(0, 1), q(5, 1), q(5, 1)).unwrap();
        assert!(superpotential(&s).values().iter().all(|x| x.is_zero()));
        let s = generate_seed(&v0, q(-1, 4), q(2, 1), q(8, 3)).unwrap();
        assert_eq!(superpotential(&s).at(0), &q(1, 3));
    }

    #[test]
    fn potential_examples() {
        let v0 = tab("0", 0, 30);
        let f = tab("1/(n+1)", 0, 31);
        let v1 = transform_potential(&v0, &f).unwrap();
        assert_eq!(v1, tab("2/((n+2)*(n+3))", -1, 29));
        assert_eq!(v1.at(0), &q(1, 3));

        let v = tab("n^2 - 3", 0, 10);
        let c = tab("7/5", 0, 10);
        let v1 = transform_potential(&v, &c).unwrap();
        assert_eq!(v1, v.shift(1).restrict(v1.window()).unwrap());

        let s = generate_seed(&v0, q(-1, 4), q(2, 1), q(8, 3)).unwrap();
        let v1 = transform_potential(&v0, &superpotential(&s)).unwrap();
        assert_eq!(v1.at(0), &q(-2, 5));
    }

    #[test]
    fn solution_examples() {
        let v0 = tab("0", 0, 20);
        let step = DarbouxStep::new(v0.clone(), generate_seed(&v0, q(0, 1), q(1, 1), q(2, 1)).unwrap()).unwrap();
        let (c1, c2) = (q(3, 7), q(-5, 2));
        let phi = Seq::from_fn(Window::new(0, 22).unwrap(), |n| c1.clone() + c2.clone() * q(n, 1));
        let phi1 = step.transform_solution(&phi).unwrap();
        for (n, v) in phi1.iter() {
            assert_eq!(v, &((c1.clone() - c2.clone()) / q(n + 1, 1)));
        }
        assert!(apply_h(&step.v1, &phi1).unwrap().values().iter().all(|x| x.is_zero()));

        let own = step.transform_solution(step.seed.psi()).unwrap();
        assert!(own.values().iter().all(|x| x.is_zero()));

        // κ = 1/2: -C2 + (C1 + C2 n) f(n)
        let step = DarbouxStep::new(v0.clone(), generate_seed(&v0, q(-1, 4), q(2, 1), q(8, 3)).unwrap()).unwrap();
        let phi1 = step.transform_solution(&phi).unwrap();
        for n in 0..=10 {
            let (a0, b0) = (q(3, 2).powi(n).unwrap(), q(1, 2).powi(n).unwrap());
            let (a1, b1) = (q(3, 2).powi(n + 1).unwrap(), q(1, 2).powi(n + 1).unwrap());
            let printed = -c2.clone()
                + q(1, 2) * (c1.clone() + c2.clone() * q(n, 1)) * (a1 - b1) / (q(3, 4) * (a0 + b0));
            assert_eq!(phi1.at(n), &printed);
        }
    }

    #[test]
    fn gauge_examples() {
        let v0 = tab("0", 0, 20);
        let s = generate_seed(&v0, q(0, 1), q(1, 1), q(2, 1)).unwrap();
        let w = gauge_to_w(&s, &q(3, 1)).unwrap();
        assert_eq!(w, s.psi().map(|x| x / q(3, 1)));

        let s = generate_seed(&v0, q(-1, 4), q(2, 1), q(8, 3)).unwrap();
        let w = gauge_to_w(&s, &q(1, 1)).unwrap();
        assert_eq!(w, tab("(1/2)^n + (3/2)^n", 0, 22));
        assert!(gauge_residual(&w, &v0, &q(-1, 4)).unwrap().vanishes(0.0));

        let fake = Seed { psi: tab("(1/2)^n", 0, 10), eps: q(-1, 1) };
        assert!(matches!(gauge_to_w(&fake, &q(1, 1)), Err(Error::EpsIsMinusOne)));
    }

    #[test]
    fn eps_minus_one_examples() {
        let v0 = tab("0", 0, 20);
        let step = eps_minus_one_step(&v0).unwrap();
        assert_eq!(step.seed.psi(), &tab("(1/2)^n", 0, 21));
        assert!(step.v1.values().iter().all(|x| x.is_zero()));

        let v0 = tab("n", 2, 20);
        assert_eq!(eps_minus_one_shift(&v0).unwrap(), tab("n+2", 1, 18));

        let v0 = tab("n", -3, 10);
        assert!(matches!(eps_minus_one_shift(&v0), Err(Error::SeedVanishes(2))));
    }

    #[test]
    fn eps_minus_one_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..10 {
            let v0 = random_seq(&mut rng, -4, 16);
            if v0.values().iter().any(|v| *v == q(1, 1)) {
                continue;
            }
            let v1 = eps_minus_one_shift(&v0).unwrap();
            assert_eq!(v1, v0.shift(2).restrict(v1.window()).unwrap());
        }
    }

    #[test]
    fn random_steps_satisfy_every_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut built = 0;
        while built < 10 {
            let v0 = random_seq(&mut rng, -2, 14);
            let eps = if built % 3 == 0 { q(0, 1) } else { random_rat(&mut rng) };
            let Ok(seed) = generate_seed(&v0, eps.clone(), random_rat(&mut rng), random_rat(&mut rng)) else {
                continue;
            };
            built += 1;
            let r = seed_equation_residual(&v0, seed.psi(), &eps).unwrap();
            assert_eq!(r.defect.window(), v0.window());
            assert!(r.vanishes(0.0));

            let step = DarbouxStep::new(v0.clone(), seed).unwrap();
            let (a, b) = step.theorem1_residuals().unwrap();
            assert!(a.vanishes(0.0) && b.vanishes(0.0));
            for _ in 0..20 {
                let psi = random_seq(&mut rng, -2, 14);
                assert!(step.intertwining_residual(&psi).unwrap().vanishes(0.0));
            }
            if eps.is_zero() {
                let (r0, r1) = factorization_residuals(&step.f1, &step.v0, &step.v1).unwrap();
                assert!(r0.vanishes(0.0) && r1.vanishes(0.0));
            } else {
                assert!(eps_potential_residual(&step.f1, &step.v0, &eps).unwrap().vanishes(0.0));
            }
        }
    }

    #[test]
    fn scaling_leaves_the_step_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let v0 = random_seq(&mut rng, 0, 12);
        let (a, b) = (q(3, 1), q(-1, 2));
        let s1 = generate_seed(&v0, q(1, 3), a.clone(), b.clone()).unwrap();
        for c in [q(-4, 1), q(2, 9), q(7, 1)] {
            let s2 = generate_seed(&v0, q(1, 3), c.clone() * a.clone(), c * b.clone()).unwrap();
            let d1 = DarbouxStep::new(v0.clone(), s1.clone()).unwrap();
            let d2 = DarbouxStep::new(v0.clone(), s2).unwrap();
            assert_eq!(d1.f1, d2.f1);
            assert_eq!(d1.v1, d2.v1);
        }
    }
}
