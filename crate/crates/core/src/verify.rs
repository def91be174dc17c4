//! Residual verification of a chain, from memory or from files.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::crum::{bianchi_check, chain_intertwining_residual, Chain};
use crate::darboux::Seed;
use crate::error::{Error, Result};
use crate::operators::{apply_ladder, seed_equation_residual, theorem1_residuals, LadderSign, Residual, ResidualReport};
use crate::scalar::{random_rational, Backend, Scalar};
use crate::seq::{output_window, Seq};

/// Seed of the probe sequences used for the intertwining checks.
pub const PROBE_SEED: u64 = 20_240_601;
pub const PROBE_COUNT: usize = 10;

/// The sequences of a chain, trusted as given.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainData<S> {
    pub potentials: Vec<Seq<S>>,
    pub fs: Vec<Seq<S>>,
    pub states: Vec<Seq<S>>,
    pub seeds: Vec<Seq<S>>,
    pub eps: Vec<S>,
}

impl<S: Scalar> From<&Chain<S>> for ChainData<S> {
    fn from(c: &Chain<S>) -> Self {
        ChainData {
            potentials: c.potentials.clone(),
            fs: c.fs.clone(),
            states: c.states.clone(),
            seeds: c.seeds.iter().map(|s| s.psi().clone()).collect(),
            eps: c.eps(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeSummary {
    pub rng_seed: u64,
    pub count: usize,
    pub reports: Vec<ResidualReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub backend: Backend,
    pub tolerance: f64,
    pub k: usize,
    pub passed: bool,
    pub residuals: Vec<ResidualReport>,
    pub probes: ProbeSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bianchi: Option<ResidualReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl VerificationReport {
    /// The first failing residual, if any.
    pub fn first_failure(&self) -> Option<&ResidualReport> {
        self.residuals
            .iter()
            .chain(&self.probes.reports)
            .chain(&self.bianchi)
            .find(|r| !r.passed)
    }
}

fn named<S: Scalar>(mut r: Residual<S>, name: String) -> Residual<S> {
    r.identity = name;
    r
}

fn equal_on_overlap<S: Scalar>(name: String, a: &Seq<S>, b: &Seq<S>) -> Result<Residual<S>> {
    let w = a.window().intersect(&b.window()).ok_or(Error::EmptyOverlap("comparison"))?;
    Ok(Residual::from_sides(name, w, |n| (a.at(n).clone(), b.at(n).clone())))
}

fn step_residuals<S: Scalar>(d: &ChainData<S>, i: usize) -> Result<Vec<Residual<S>>> {
    let j = i + 1;
    let (v_prev, v_next, f, state, seed, eps) =
        (&d.potentials[i], &d.potentials[j], &d.fs[i], &d.states[i], &d.seeds[i], &d.eps[i]);
    let mut out = vec![named(seed_equation_residual(&d.potentials[0], seed, eps)?, format!("seed {j}: shifted eigenproblem"))];

    let mut lifted = seed.clone();
    for g in &d.fs[..i] {
        lifted = apply_ladder(g, LadderSign::Plus, &lifted)?;
    }
    out.push(equal_on_overlap(format!("step {j}: transformed state = ladders applied to seed"), state, &lifted)?);

    // Δψ̂ = f ψ̂, written without division
    let w = output_window("superpotential", &[(state.window(), 0, 1), (f.window(), 0, 0)])?;
    out.push(Residual::from_sides(format!("step {j}: superpotential"), w, |n| {
        (state.at(n + 1).clone() - state.at(n).clone(), f.at(n).clone() * state.at(n).clone())
    }));
    out.push(named(seed_equation_residual(v_prev, state, eps)?, format!("step {j}: transformed state eigenproblem")));
    let (a, b) = theorem1_residuals(v_prev, v_next, f)?;
    out.push(named(a, format!("step {j}: potential update")));
    out.push(named(b, format!("step {j}: compatibility")));
    Ok(out)
}

pub fn verify_chain<S: Scalar>(d: &ChainData<S>, tol: f64) -> VerificationReport {
    let k = d.fs.len();
    let mut residuals = Vec::new();
    let mut errors = Vec::new();
    for i in 0..k {
        match step_residuals(d, i) {
            Ok(rs) => residuals.extend(rs.iter().map(|r| r.report(tol))),
            Err(e) => errors.push(format!("step {}: {e}", i + 1)),
        }
    }

    let v0 = &d.potentials[0];
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    let mut probes = Vec::new();
    for p in 0..PROBE_COUNT {
        let psi = Seq::from_fn(v0.window(), |_| S::from_rational(&random_rational(&mut rng)));
        match chain_intertwining_residual(v0, &d.potentials[k], &d.fs, &psi) {
            Ok(r) => probes.push(named(r, format!("chain intertwining, probe {}", p + 1)).report(tol)),
            Err(e) => errors.push(format!("probe {}: {e}", p + 1)),
        }
    }

    let bianchi = if k == 2 {
        let seeds: Result<Vec<Seed<S>>> = (0..2)
            .map(|i| Seed::with_tolerance(d.seeds[i].clone(), d.eps[i].clone(), v0, tol))
            .collect();
        match seeds.and_then(|s| bianchi_check(v0, &s[0], &s[1])) {
            Ok(diff) => {
                let r = Residual::from_sides("bianchi", diff.window(), |n| (diff.at(n).clone(), S::zero()));
                Some(r.report(tol))
            }
            Err(e) => {
                errors.push(format!("bianchi: {e}"));
                None
            }
        }
    } else {
        None
    };

    let passed = errors.is_empty()
        && residuals.iter().chain(&probes).chain(&bianchi).all(|r| r.passed);
    VerificationReport {
        backend: S::BACKEND,
        tolerance: tol,
        k,
        passed,
        residuals,
        probes: ProbeSummary { rng_seed: PROBE_SEED, count: PROBE_COUNT, reports: probes },
        bianchi,
        errors,
    }
}
