//! End-to-end reproductions of the worked examples, each with a
//! computed-versus-printed comparison per closed form.
//!
//! A check is either asserted (its verdict decides [`ExampleReport::passed`])
//! or only reported, for displays known to carry misprints.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::crum::{bianchi_check, potential_closed_form_seq, Chain};
use crate::darboux::{eps_minus_one_step, generate_seed, transform_potential, DarbouxStep, Seed};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::operators::{
    apply_h, apply_ladder, riccati_residual, seed_equation_residual, theorem1_residuals, LadderSign,
    Residual, DEFAULT_FLOAT_TOL,
};
use crate::scalar::{random_rational, rational, Backend, Rational, Scalar};
use crate::seq::{Seq, Window};
use crate::solvers::{canonical_seed, free_particle_zero_mode, kernel_first_order, riccati_general_oscillator};

pub const EXAMPLES: [&str; 5] = ["1a", "1b", "1c", "2", "3"];

/// Seed for every random fixture drawn while reproducing examples.
pub const FIXTURE_SEED: u64 = 0x5eed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Match,
    Mismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub verdict: Verdict,
    pub asserted: bool,
    pub window: Option<Window>,
    pub max_abs_difference: String,
    pub worst_index: Option<i64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub excluded: Vec<i64>,
}

/// Pointwise table behind one check, written as `n,computed,printed,difference`.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub name: String,
    pub rows: Vec<[String; 4]>,
}

impl Comparison {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,computed,printed,difference\n");
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleReport {
    pub example: String,
    pub title: String,
    pub backend: Backend,
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub comparisons: Vec<Comparison>,
}

impl ExampleReport {
    fn new(example: &str, title: &str, backend: Backend, tol: f64) -> Self {
        ExampleReport {
            example: example.into(),
            title: title.into(),
            backend,
            tolerance: tol,
            passed: true,
            checks: Vec::new(),
            notes: Vec::new(),
            comparisons: Vec::new(),
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, check: Check, table: Option<Comparison>) {
        if check.asserted && check.verdict == Verdict::Mismatch {
            self.passed = false;
        }
        self.checks.push(check);
        self.comparisons.extend(table);
    }

    fn compare<S: Scalar>(
        &mut self,
        name: &str,
        asserted: bool,
        computed: &Seq<S>,
        w: Window,
        exclude: impl Fn(i64) -> bool,
        printed: impl Fn(i64) -> Result<S>,
    ) -> Result<()> {
        self.compare_scaled(name, asserted, computed, w, exclude, printed, 0.0)
    }

    /// Compares `computed` with a printed formula on `w`, skipping `exclude`d
    /// indices. Float differences are judged against
    /// `max(|computed|, |printed|, floor)`.
    #[allow(clippy::too_many_arguments)]
    fn compare_scaled<S: Scalar>(
        &mut self,
        name: &str,
        asserted: bool,
        computed: &Seq<S>,
        w: Window,
        exclude: impl Fn(i64) -> bool,
        printed: impl Fn(i64) -> Result<S>,
        floor: f64,
    ) -> Result<()> {
        let mut rows = Vec::new();
        let mut excluded = Vec::new();
        let mut worst: Option<(f64, i64, S)> = None;
        let mut ok = true;
        for n in w.indices() {
            if exclude(n) {
                excluded.push(n);
                continue;
            }
            let c = computed.get(n).cloned().ok_or(Error::OutOfWindow {
                index: n,
                lo: computed.lo(),
                hi: computed.hi(),
            })?;
            let p = printed(n)?;
            let d = c.clone() - p.clone();
            let scale = c.magnitude().max(p.magnitude()).max(floor);
            if !d.negligible(scale, self.tolerance) {
                ok = false;
            }
            let mag = d.magnitude();
            if worst.as_ref().is_none_or(|(m, _, _)| mag > *m) {
                worst = Some((mag, n, d.abs()));
            }
            rows.push([n.to_string(), c.format(), p.format(), d.format()]);
        }
        let (max_abs_difference, worst_index) = match worst {
            Some((_, n, d)) => (d.format(), Some(n)),
            None => (S::zero().format(), None),
        };
        self.push(
            Check {
                name: name.into(),
                verdict: if ok { Verdict::Match } else { Verdict::Mismatch },
                asserted,
                window: Some(w),
                max_abs_difference,
                worst_index,
                excluded,
            },
            Some(Comparison { name: name.into(), rows }),
        );
        Ok(())
    }

    /// Records an identity residual that must vanish.
    fn residual<S: Scalar>(&mut self, name: &str, r: &Residual<S>) {
        let ok = r.vanishes(self.tolerance);
        self.push(
            Check {
                name: name.into(),
                verdict: if ok { Verdict::Match } else { Verdict::Mismatch },
                asserted: true,
                window: Some(r.defect.window()),
                max_abs_difference: r.max_abs().format(),
                worst_index: Some(r.worst_index()),
                excluded: Vec::new(),
            },
            None,
        );
    }

    /// A single value checked against its expected value.
    fn fact<S: Scalar>(&mut self, name: &str, computed: &S, expected: &S) {
        let d = computed.clone() - expected.clone();
        let holds = d.negligible(computed.magnitude().max(expected.magnitude()), self.tolerance);
        self.push(
            Check {
                name: name.into(),
                verdict: if holds { Verdict::Match } else { Verdict::Mismatch },
                asserted: true,
                window: None,
                max_abs_difference: d.abs().format(),
                worst_index: None,
                excluded: Vec::new(),
            },
            None,
        );
    }
}

pub fn run_example(name: &str) -> Result<ExampleReport> {
    match name {
        "1a" => example_1a(),
        "1b" => example_1b(),
        "1c" => example_1c(),
        "2" => example_2(),
        "3" => example_3(),
        other => Err(Error::Config(format!(
            "unknown example `{other}`, expected one of {}",
            EXAMPLES.join(", ")
        ))),
    }
}

fn q(p: i64, d: i64) -> Rational {
    rational(p, d)
}

fn win(lo: i64, hi: i64) -> Window {
    Window::new(lo, hi).expect("static window")
}

fn expr<S: Scalar>(text: &str) -> impl Fn(i64) -> Result<S> {
    let e = Expr::parse(text).expect("static expression");
    move |n| e.eval(n)
}

fn free_step(eps: Rational, psi0: Rational, psi1: Rational, hi: i64) -> Result<DarbouxStep<Rational>> {
    let v0 = Seq::zeros(win(0, hi));
    let seed = generate_seed(&v0, eps, psi0, psi1)?;
    DarbouxStep::new(v0, seed)
}

fn no_exclusion(_: i64) -> bool {
    false
}

fn example_1a() -> Result<ExampleReport> {
    let mut rep = ExampleReport::new("1a", "Transparent potential, single real root (eps = 0)", Backend::Rational, 0.0);
    let w = win(0, 200);
    let step = free_step(q(0, 1), q(1, 1), q(2, 1), 201)?;
    rep.compare("psi1", true, step.seed.psi(), w, no_exclusion, expr("n+1"))?;
    rep.compare("f1", true, &step.f1, w, no_exclusion, expr("1/(n+1)"))?;
    rep.compare("V1", true, &step.v1, w, no_exclusion, expr("2/((n+2)*(n+3))"))?;
    let (a, b) = step.theorem1_residuals()?;
    rep.residual("potential update", &a);
    rep.residual("compatibility", &b);

    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED);
    for i in 0..5 {
        let (c1, c2) = (random_rational(&mut rng), random_rational(&mut rng));
        let phi0 = free_particle_zero_mode(&c1, &c2, win(0, 202));
        let phi1 = step.transform_solution(&phi0)?;
        let diff = c1.clone() - c2.clone();
        rep.compare(&format!("phi1 (C1={c1}, C2={c2})"), true, &phi1, w, no_exclusion, |n| {
            Ok(diff.clone() / q(n + 1, 1))
        })?;
        if i == 0 {
            rep.residual("H1 phi1 = 0", &zero_mode_residual(&step.v1, &phi1)?);
        }
    }
    Ok(rep)
}

fn zero_residual<S: Scalar>(s: &Seq<S>) -> Residual<S> {
    Residual::from_sides("zero", s.window(), |n| (s.at(n).clone(), S::zero()))
}

fn zero_mode_residual<S: Scalar>(v: &Seq<S>, phi: &Seq<S>) -> Result<Residual<S>> {
    Ok(zero_residual(&apply_h(v, phi)?))
}

/// `(1+κ)^n` and `(1-κ)^n`.
fn kappa_pows(kappa: &Rational, n: i64) -> (Rational, Rational) {
    let one = q(1, 1);
    (
        (one.clone() + kappa.clone()).powi(n).unwrap(),
        (one - kappa.clone()).powi(n).unwrap(),
    )
}

fn example_1b() -> Result<ExampleReport> {
    let mut rep = ExampleReport::new("1b", "Transparent potential, distinct real roots (kappa = 1/2)", Backend::Rational, 0.0);
    let kappa = q(1, 2);
    let eps = -(kappa.clone() * kappa.clone());
    let w = win(0, 60);
    let psi = canonical_seed(&eps, win(0, 63))?;
    let v0 = Seq::zeros(win(0, 61));
    let step = DarbouxStep::new(v0, Seed::new(psi, eps, &Seq::zeros(win(0, 61)))?)?;
    let lead = kappa.clone() / (q(1, 1) - kappa.clone() * kappa.clone());

    rep.compare("psi1", true, step.seed.psi(), w, no_exclusion, expr("(2/3)^n + 2^n"))?;
    rep.compare("f1", true, &step.f1, w, no_exclusion, |n| {
        let (a0, b0) = kappa_pows(&kappa, n);
        let (a1, b1) = kappa_pows(&kappa, n + 1);
        Ok(lead.clone() * (a1 - b1) / (a0 + b0))
    })?;
    rep.compare("V1", true, &step.v1, w, no_exclusion, |n| {
        let (a1, b1) = kappa_pows(&kappa, n + 1);
        let (a2, b2) = kappa_pows(&kappa, n + 2);
        let k2 = kappa.clone() * kappa.clone();
        Ok(q(-8, 1) * k2.clone() * (q(1, 1) - k2).powi(n).unwrap() / ((a1 + b1) * (a2 + b2)))
    })?;
    rep.fact("V1(0) = -2/5", step.v1.at(0), &q(-2, 5));

    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED);
    let (c1, c2) = (random_rational(&mut rng), random_rational(&mut rng));
    let phi1 = step.transform_solution(&free_particle_zero_mode(&c1, &c2, win(0, 62)))?;
    rep.compare(&format!("phi1 (C1={c1}, C2={c2})"), true, &phi1, w, no_exclusion, |n| {
        let (a0, b0) = kappa_pows(&kappa, n);
        let (a1, b1) = kappa_pows(&kappa, n + 1);
        Ok(-c2.clone() + lead.clone() * (c1.clone() + c2.clone() * q(n, 1)) * (a1 - b1) / (a0 + b0))
    })?;
    rep.residual("H1 phi1 = 0", &zero_mode_residual(&step.v1, &phi1)?);

    // κ = ±1 collapses the seed equation to 2ψ(n+1) = ψ(n)
    let degenerate = eps_minus_one_step(&Seq::<Rational>::zeros(win(0, 62)))?;
    rep.compare("kappa = 1 seed", true, degenerate.seed.psi(), w, no_exclusion, expr("(1/2)^n"))?;
    rep.compare("kappa = 1 V1", true, &degenerate.v1, w, no_exclusion, expr("0"))?;
    Ok(rep)
}

fn example_1c() -> Result<ExampleReport> {
    let tol = DEFAULT_FLOAT_TOL;
    let mut rep = ExampleReport::new("1c", "Transparent potential, complex roots (eps = 1)", Backend::Float, tol);
    let eps = 1.0f64;
    let mu = eps.sqrt();
    let r = 1.0 / (1.0 + mu * mu).sqrt();
    let theta = mu.atan();
    let cos = |n: i64| (n as f64 * theta).cos();
    let small = |n: i64| cos(n).abs() < 1e-6;
    let w = win(0, 50);

    let v0 = Seq::<f64>::zeros(win(0, 51));
    let psi = canonical_seed(&eps, win(0, 53))?;
    let step = DarbouxStep::new(v0.clone(), Seed::with_tolerance(psi, eps, &v0, tol)?)?;
    // f and φ₁ subtract O(1) terms and cross zero, so their scale is floored at 1
    rep.compare_scaled("f1", true, &step.f1, w, small, |n| Ok(r * cos(n + 1) / cos(n) - 1.0), 1.0)?;
    rep.compare("V1", true, &step.v1, w, |n| small(n + 1) || small(n + 2), |n| {
        Ok(-2.0 * r * (cos(n + 1) * cos(n + 3) - cos(n + 2).powi(2)) / (cos(n + 1) * cos(n + 2)))
    })?;
    let (c1, c2) = (1.5f64, -0.75f64);
    let phi1 = step.transform_solution(&free_particle_zero_mode(&c1, &c2, win(0, 52)))?;
    let printed_phi1 = |n: i64| {
        let nf = n as f64;
        Ok(-c2 * nf - (c1 + c2) + r * (c1 + c2 * nf) * cos(n + 1) / cos(n))
    };
    rep.compare_scaled("phi1 (C1=1.5, C2=-0.75)", true, &phi1, w, small, printed_phi1, 1.0)?;
    rep.notes.push(format!(
        "r = {r}, theta = {theta}; indices where a cosine in a denominator is below 1e-6 are excluded"
    ));

    // exact coverage of the same ε through the recurrence
    let step = free_step(q(1, 1), q(2, 1), q(3, 1), 60)?;
    let (a, b) = step.theorem1_residuals()?;
    let mut exact = ExampleReport::new("1c", "", Backend::Rational, 0.0);
    exact.residual("exact eps = 1 seed (psi0 = 2, psi1 = 3): potential update", &a);
    exact.residual("exact eps = 1 seed (psi0 = 2, psi1 = 3): compatibility", &b);
    for c in exact.checks {
        rep.push(c, None);
    }
    Ok(rep)
}

fn alternating_sum(from: i64, to: i64, term: impl Fn(i64) -> Rational) -> Rational {
    (from..=to).fold(q(0, 1), |acc, i| {
        let t = term(i);
        if i % 2 == 0 { acc + t } else { acc - t }
    })
}

fn sign(n: i64) -> Rational {
    if n % 2 == 0 { q(1, 1) } else { q(-1, 1) }
}

fn example_2() -> Result<ExampleReport> {
    let mut rep = ExampleReport::new("2", "Discrete harmonic oscillator", Backend::Rational, 0.0);
    let f1 = Expr::parse("n")?.tabulate::<Rational>(win(0, 22))?;
    let v0_expr = Expr::parse("n^2+n+1")?;
    let v0 = v0_expr.tabulate::<Rational>(win(0, 20))?;
    rep.residual("V0 = Δf + f f(n+1) with f = n", &riccati_residual(&f1, &v0, &q(0, 1))?);

    let phi0 = kernel_first_order(&f1.restrict(win(0, 21))?, q(1, 1));
    rep.compare("phi0", true, &phi0, win(0, 20), no_exclusion, expr("n!"))?;
    let killed = apply_ladder(&f1, LadderSign::Plus, &phi0)?;
    rep.residual("(-Δ + n) phi0 = 0", &zero_residual(&killed));
    rep.residual("H0 phi0 = 0", &zero_mode_residual(&v0, &phi0)?);

    let v_osc = v0_expr.tabulate::<Rational>(win(1, 100))?;
    let v_wide = v0_expr.tabulate::<Rational>(win(1, 102))?;
    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED);
    let mut cs = Vec::new();
    while cs.len() < 5 {
        let c1 = random_rational(&mut rng);
        let Ok((u, ft)) = riccati_general_oscillator(&c1, win(1, 103)) else {
            continue;
        };
        rep.residual(&format!("Riccati residual, C1 = {c1}"), &riccati_residual(&ft, &v_osc, &q(0, 1))?);
        let v1 = transform_potential(&v_wide, &ft)?;
        let (a, b) = theorem1_residuals(&v_wide, &v1, &ft)?;
        rep.residual(&format!("potential update, C1 = {c1}"), &a);
        rep.residual(&format!("compatibility, C1 = {c1}"), &b);
        cs.push((c1, u, ft, v1));
    }

    let (c1, u, ft, v1) = &cs[0];
    let pw = win(1, 40);
    rep.compare(&format!("u (C1={c1})"), true, u, pw, no_exclusion, |n| {
        let s = alternating_sum(1, n - 1, |i| q(1, i * (i + 1)));
        Ok(sign(n) * q(n, 1) * (c1.clone() + s))
    })?;
    rep.compare(&format!("f1 tilde (C1={c1})"), false, ft, pw, no_exclusion, |n| {
        let s = alternating_sum(3, n - 1, |i| q(1, i));
        let den = c1.clone() * q(n, 1) + sign(n) + q(2 * n, 1) * s;
        nonzero(den, n).map(|d| q(n, 1) + sign(n) / d)
    })?;
    rep.compare(&format!("V1 (C1={c1})"), false, v1, pw, no_exclusion, |n| {
        let s = |m: i64| alternating_sum(1, m, |i| q(1, i * (i + 1)));
        let num = sign(n) * c1.clone() * q(2 * n + 3, 1) + sign(n) * q(2 * n + 3, 1) * s(n) + q(1, n + 1);
        let den = q((n + 1) * (n + 2), 1) * (c1.clone() + s(n)) * (c1.clone() + s(n + 1));
        nonzero(den, n).map(|d| q(n * n + 3 * n + 1, 1) + q(2, 1) * num / d)
    })?;
    rep.notes.push(
        "the u recurrence -n u(n+1) = (n+1) u(n) + 1 forces u(0) = -1 while the printed u gives 0; it is started at n = 1 with u(1) = -C1".into(),
    );
    rep.notes.push(
        "the printed f1 tilde and V1 displays are compared but not asserted; the recurrence-built values satisfy every residual exactly".into(),
    );
    Ok(rep)
}

fn nonzero(x: Rational, n: i64) -> Result<Rational> {
    if num_traits::Zero::is_zero(&x) {
        Err(Error::DivByZero(n))
    } else {
        Ok(x)
    }
}

fn example_3() -> Result<ExampleReport> {
    let mut rep = ExampleReport::new("3", "Free particle, second order Crum transformation", Backend::Rational, 0.0);
    let w = win(0, 30);
    let v0 = Seq::<Rational>::zeros(win(0, 40));
    let s1 = generate_seed(&v0, q(0, 1), q(1, 1), q(2, 1))?;
    let s2 = generate_seed(&v0, q(-1, 4), q(2, 1), q(8, 3))?;
    rep.compare("psi2", true, s2.psi(), w, no_exclusion, expr("2^n*(1+3^n)/3^n"))?;
    let chain = Chain::new(v0.clone()).extend_all([s1.clone(), s2.clone()])?;
    let v2 = &chain.potentials[2];
    rep.compare(
        "V2",
        true,
        v2,
        w,
        no_exclusion,
        expr("2*(243*9^n + 12*(2*n^2+14*n+27)*3^n + 1) / ((n+5-9*(n+1)*3^n)*(n+6-27*(n+2)*3^n))"),
    )?;
    rep.fact("V2(0) = 71/12", v2.at(0), &q(71, 12));
    let closed = potential_closed_form_seq(&[s1.psi(), s2.psi()], &v0, 0.0)?;
    rep.compare("V2 Casoratian form", true, v2, w, no_exclusion, |n| Ok(closed.at(n).clone()))?;
    let printed_f2 = Expr::parse("2*(n+1)/(n+2) * ((1/3 - 3*3^n)*n + 5/3 - 3*3^n) / ((1 + 3*3^n)*n + 4)")?;
    rep.compare("f2", false, &chain.fs[1], w, no_exclusion, |n| printed_f2.eval(n))?;
    let bianchi = bianchi_check(&v0, &s1, &s2)?;
    rep.compare("Bianchi: V2(s1, s2) - V2(s2, s1)", true, &bianchi, w, no_exclusion, |_| Ok(q(0, 1)))?;

    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED);
    for _ in 0..3 {
        let (c1, c2) = (random_rational(&mut rng), random_rational(&mut rng));
        let hat = chain.transform(&free_particle_zero_mode(&c1, &c2, win(0, 40)))?;
        rep.residual(&format!("H2 psi3 hat = 0 (C1={c1}, C2={c2})"), &zero_mode_residual(v2, &hat)?);
    }

    // the ψ̂₃ display built with its own printed f₂ factor
    let f2_table = printed_f2.tabulate::<Rational>(win(0, 40))?;
    let (c1, c2) = (q(2, 1), q(1, 1));
    let mut hat = free_particle_zero_mode(&c1, &c2, win(0, 40));
    for f in [&chain.fs[0], &f2_table] {
        hat = apply_ladder(f, LadderSign::Plus, &hat)?;
    }
    let h = apply_h(v2, &hat)?;
    rep.compare("H2 applied to the printed psi3 hat display (C1=2, C2=1)", false, &h, win(0, 20), no_exclusion, |_| {
        Ok(q(0, 1))
    })?;

    let printed_psi1 = Expr::parse("1/(n+1)")?.tabulate::<Rational>(win(0, 42))?;
    let r = seed_equation_residual(&v0, &printed_psi1, &q(0, 1))?;
    rep.notes.push(format!(
        "the listed seed psi1(n) = 1/(n+1) is not an eps = 0 solution over V0 = 0 (largest residual {} at n = {}); \
         psi1(n) = n+1, whose superpotential 1/(n+1) appears in the psi3 hat display, reproduces V2",
        r.max_abs(),
        r.worst_index()
    ));
    rep.notes.push(format!(
        "the f2 factor printed inside the psi3 hat display differs from the iterated f2 (n = 0: printed {}, computed {}); \
         with it the printed psi3 hat is not a zero mode of H2, while the iterated psi3 hat is",
        printed_f2.eval::<Rational>(0)?,
        chain.fs[1].at(0)
    ));
    Ok(rep)
}
