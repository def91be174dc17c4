//! Iterated Darboux steps and their Casoratian closed forms.
//!
//! A [`Chain`] pushes each new seed through the ladders built so far,
//! `ψ̂_i = (-Δ + f_{i-1}) ··· (-Δ + f_1) ψ_i`, and takes `f_i = Δψ̂_i/ψ̂_i`.
//! The same objects have determinant expressions in the Casoratians
//! `C(ψ_1, …, ψ_k)(n) = det[ψ_c(n + r)]`; both routes are kept so that each
//! can check the other.

use crate::darboux::{log_ratio, transform_potential, Seed};
use crate::error::{Error, Result};
use crate::operators::{
    apply_h, apply_ladder, seed_equation_residual, theorem1_residuals, LadderSign, Residual,
    DEFAULT_FLOAT_TOL,
};
use crate::scalar::Scalar;
use crate::seq::{output_window, Seq, Window};

/// Determinant of a square matrix given by rows.
///
/// Exact scalars use fraction-free Bareiss elimination; floats use Gaussian
/// elimination with partial pivoting.
pub fn determinant<S: Scalar>(mut m: Vec<Vec<S>>) -> S {
    let k = m.len();
    debug_assert!(m.iter().all(|row| row.len() == k));
    if k == 0 {
        return S::one();
    }
    if S::is_exact() {
        bareiss(&mut m)
    } else {
        partial_pivot(&mut m)
    }
}

fn bareiss<S: Scalar>(m: &mut [Vec<S>]) -> S {
    let k = m.len();
    let mut sign = S::one();
    let mut prev = S::one();
    for p in 0..k - 1 {
        if m[p][p].is_zero() {
            let Some(r) = (p + 1..k).find(|&r| !m[r][p].is_zero()) else {
                return S::zero();
            };
            m.swap(p, r);
            sign = -sign;
        }
        for i in p + 1..k {
            for j in p + 1..k {
                let v = (m[i][j].clone() * m[p][p].clone() - m[i][p].clone() * m[p][j].clone())
                    / prev.clone();
                m[i][j] = v;
            }
        }
        prev = m[p][p].clone();
    }
    sign * m[k - 1][k - 1].clone()
}

fn partial_pivot<S: Scalar>(m: &mut [Vec<S>]) -> S {
    let k = m.len();
    let mut det = S::one();
    for p in 0..k {
        let r = (p..k)
            .max_by(|&a, &b| m[a][p].magnitude().total_cmp(&m[b][p].magnitude()))
            .unwrap();
        if m[r][p].is_zero() {
            return S::zero();
        }
        if r != p {
            m.swap(p, r);
            det = -det;
        }
        det = det * m[p][p].clone();
        for i in p + 1..k {
            let factor = m[i][p].clone() / m[p][p].clone();
            let (top, rest) = m.split_at_mut(i);
            for (x, piv) in rest[0][p..].iter_mut().zip(&top[p][p..]) {
                *x = x.clone() - factor.clone() * piv.clone();
            }
        }
    }
    det
}

/// Determinant of `M[r][c] = ψ_c(rows[r])`.
pub fn casoratian_rows<S: Scalar>(columns: &[&Seq<S>], rows: &[i64]) -> Result<S> {
    assert_eq!(columns.len(), rows.len(), "Casoratian must be square");
    let mut m = Vec::with_capacity(rows.len());
    for &n in rows {
        let mut row = Vec::with_capacity(columns.len());
        for col in columns {
            let v = col.get(n).ok_or(Error::WindowTooSmall {
                what: "casoratian",
                needed: rows.len(),
                got: col.len(),
            })?;
            row.push(v.clone());
        }
        m.push(row);
    }
    Ok(determinant(m))
}

/// `C(ψ_1, …, ψ_k)(n)`; the empty Casoratian is 1.
pub fn casoratian<S: Scalar>(columns: &[&Seq<S>], n: i64) -> Result<S> {
    let rows: Vec<i64> = (n..).take(columns.len()).collect();
    casoratian_rows(columns, &rows)
}

/// Rows `{m, …, m+k-2, m+k}`: the Casoratian with its last row pushed down by one.
fn modified_casoratian<S: Scalar>(columns: &[&Seq<S>], m: i64) -> Result<S> {
    let k = columns.len() as i64;
    let rows: Vec<i64> = (m..m + k - 1).chain(std::iter::once(m + k)).collect();
    casoratian_rows(columns, &rows)
}

/// Casoratian of a seed prefix tabulated on its maximal window.
#[derive(Clone, Debug, PartialEq)]
pub struct CasoratianTable<S> {
    pub j: usize,
    pub values: Seq<S>,
}

impl<S: Scalar> CasoratianTable<S> {
    pub fn new(columns: &[&Seq<S>]) -> Result<Self> {
        let j = columns.len();
        if j == 0 {
            return Err(Error::WindowTooSmall { what: "casoratian", needed: 1, got: 0 });
        }
        let reqs: Vec<_> = columns.iter().map(|c| (c.window(), 0, j as i64 - 1)).collect();
        let w = output_window("casoratian", &reqs)?;
        let values = Seq::try_from_fn(w, |n| casoratian(columns, n))?;
        Ok(CasoratianTable { j, values })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chain<S> {
    pub v0: Seq<S>,
    pub seeds: Vec<Seed<S>>,
    pub fs: Vec<Seq<S>>,
    /// `V_0, …, V_k`.
    pub potentials: Vec<Seq<S>>,
    /// `ψ̂_1, …, ψ̂_k`.
    pub states: Vec<Seq<S>>,
    pub tol: f64,
}

impl<S: Scalar> Chain<S> {
    pub fn new(v0: Seq<S>) -> Self {
        Chain {
            potentials: vec![v0.clone()],
            v0,
            seeds: Vec::new(),
            fs: Vec::new(),
            states: Vec::new(),
            tol: DEFAULT_FLOAT_TOL,
        }
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn k(&self) -> usize {
        self.seeds.len()
    }

    pub fn last_potential(&self) -> &Seq<S> {
        self.potentials.last().unwrap()
    }

    pub fn eps(&self) -> Vec<S> {
        self.seeds.iter().map(|s| s.eps().clone()).collect()
    }

    /// Applies `(-Δ + f_k) ··· (-Δ + f_1)`.
    pub fn transform(&self, phi: &Seq<S>) -> Result<Seq<S>> {
        let mut out = phi.clone();
        for f in &self.fs {
            out = apply_ladder(f, LadderSign::Plus, &out)?;
        }
        Ok(out)
    }

    /// Returns the chain with one more step.
    pub fn extend(&self, seed: Seed<S>) -> Result<Chain<S>> {
        if self.seeds.iter().any(|s| s.eps() == seed.eps()) {
            return Err(Error::DuplicateEps(seed.eps().format()));
        }
        let r = seed_equation_residual(&self.v0, seed.psi(), seed.eps())?;
        if !r.vanishes(self.tol) {
            return Err(Error::NotASeed {
                worst_index: r.worst_index(),
                max_abs: r.max_abs().format(),
            });
        }
        let step = self.k() + 1;
        let state = self.transform(seed.psi())?;
        if let Some(index) = state.first_zero() {
            return Err(Error::TransformedStateVanishes { step, index });
        }
        let f = log_ratio(&state)?;
        let v = transform_potential(self.last_potential(), &f)?;
        let mut next = self.clone();
        next.seeds.push(seed);
        next.fs.push(f);
        next.potentials.push(v);
        next.states.push(state);
        Ok(next)
    }

    pub fn extend_all(&self, seeds: impl IntoIterator<Item = Seed<S>>) -> Result<Chain<S>> {
        seeds.into_iter().try_fold(self.clone(), |c, s| c.extend(s))
    }

    /// Both update residuals for every step.
    pub fn step_residuals(&self) -> Result<Vec<(Residual<S>, Residual<S>)>> {
        (0..self.k())
            .map(|i| theorem1_residuals(&self.potentials[i], &self.potentials[i + 1], &self.fs[i]))
            .collect()
    }

    /// `(-Δ² + V_{i-1}) ψ̂_i - ε_i ψ̂_i(n+2)` for step `i` (1-based).
    pub fn state_residual(&self, i: usize) -> Result<Residual<S>> {
        seed_equation_residual(&self.potentials[i - 1], &self.states[i - 1], self.seeds[i - 1].eps())
    }

    pub fn intertwining_residual(&self, psi: &Seq<S>) -> Result<Residual<S>> {
        chain_intertwining_residual(&self.v0, self.last_potential(), &self.fs, psi)
    }
}

/// `H_k A_k⁺ ··· A_1⁺ ψ - A_k⁺⁽ⁿ⁺²⁾ ··· A_1⁺⁽ⁿ⁺²⁾ H_0 ψ`, where `A_j⁺ = -Δ + f_j(n)`.
pub fn chain_intertwining_residual<S: Scalar>(
    v0: &Seq<S>,
    vk: &Seq<S>,
    fs: &[Seq<S>],
    psi: &Seq<S>,
) -> Result<Residual<S>> {
    let mut lifted = psi.clone();
    for f in fs {
        lifted = apply_ladder(f, LadderSign::Plus, &lifted)?;
    }
    let lhs = apply_h(vk, &lifted)?;
    let mut rhs = apply_h(v0, psi)?;
    for f in fs {
        rhs = apply_ladder(&f.shift(2), LadderSign::Plus, &rhs)?;
    }
    let w = lhs.window().intersect(&rhs.window()).ok_or(Error::EmptyOverlap("chain intertwining"))?;
    Ok(Residual::from_sides("chain intertwining", w, |n| {
        (lhs.at(n).clone(), rhs.at(n).clone())
    }))
}

fn nonzero<S: Scalar>(x: S, n: i64) -> Result<S> {
    if x.is_zero() {
        Err(Error::ZeroCasoratian(n))
    } else {
        Ok(x)
    }
}

/// `(-1)^{i-1} C(ψ_1, …, ψ_{i-1}, extra)(n) / C(ψ_1, …, ψ_{i-1})(n)` with `i = seeds.len() + 1`.
pub fn transformed_state_closed_form<S: Scalar>(seeds: &[&Seq<S>], extra: &Seq<S>, n: i64) -> Result<S> {
    let mut cols = seeds.to_vec();
    let den = nonzero(casoratian(&cols, n)?, n)?;
    cols.push(extra);
    let num = casoratian(&cols, n)?;
    let sign = if seeds.len().is_multiple_of(2) { S::one() } else { -S::one() };
    Ok(sign * num / den)
}

/// `f_j(n) = C_{j-1}(n)/C_{j-1}(n+1) · C_j(n+1)/C_j(n) - 1` for `j = seeds.len()`.
pub fn superpotential_closed_form<S: Scalar>(seeds: &[&Seq<S>], n: i64) -> Result<S> {
    let j = seeds.len();
    let prev = &seeds[..j - 1];
    let a = casoratian(prev, n)?;
    let b = nonzero(casoratian(prev, n + 1)?, n + 1)?;
    let c = casoratian(seeds, n + 1)?;
    let d = nonzero(casoratian(seeds, n)?, n)?;
    Ok(a / b * c / d - S::one())
}

/// `V_i(n)` for `i = seeds.len()`, from the telescoped superpotential sum
/// `V_0(n+i) - 2Δ[f_1(n+i) + f_2(n+i-1) + ··· + f_i(n+1)]`.
///
/// The modified-Casoratian form `V_0(n+i) - 2Δ[D_i(n+1)/C_i(n+1)]` is
/// evaluated as well and must agree.
pub fn potential_closed_form<S: Scalar>(seeds: &[&Seq<S>], v0: &Seq<S>, n: i64, tol: f64) -> Result<S> {
    let i = seeds.len() as i64;
    let base = v0.get(n + i).cloned().ok_or(Error::WindowTooSmall {
        what: "potential closed form",
        needed: 1,
        got: 0,
    })?;
    let sum = |m: i64| -> Result<S> {
        let mut s = S::zero();
        for j in 1..=seeds.len() {
            s = s + superpotential_closed_form(&seeds[..j], m + i + 1 - j as i64)?;
        }
        Ok(s)
    };
    let two = S::from_int(2);
    let telescoped = base.clone() - two.clone() * (sum(n + 1)? - sum(n)?);

    let ratio = |m: i64| -> Result<S> {
        let c = nonzero(casoratian(seeds, m)?, m)?;
        Ok(modified_casoratian(seeds, m)? / c)
    };
    let modified = base - two * (ratio(n + 2)? - ratio(n + 1)?);
    let scale = telescoped.magnitude().max(modified.magnitude());
    if !(telescoped.clone() - modified).negligible(scale, tol) {
        return Err(Error::ClosedFormMismatch(n));
    }
    Ok(telescoped)
}

/// Largest window on which [`potential_closed_form`] is evaluable.
pub fn potential_closed_form_window<S: Scalar>(seeds: &[&Seq<S>], v0: &Seq<S>) -> Result<Window> {
    let i = seeds.len() as i64;
    let mut reqs: Vec<_> = seeds.iter().map(|s| (s.window(), 1, i + 2)).collect();
    reqs.push((v0.window(), i, i));
    output_window("potential closed form", &reqs)
}

pub fn potential_closed_form_seq<S: Scalar>(seeds: &[&Seq<S>], v0: &Seq<S>, tol: f64) -> Result<Seq<S>> {
    let w = potential_closed_form_window(seeds, v0)?;
    Seq::try_from_fn(w, |n| potential_closed_form(seeds, v0, n, tol))
}

/// `V_2` built in both orders, differenced pointwise.
pub fn bianchi_check<S: Scalar>(v0: &Seq<S>, s1: &Seed<S>, s2: &Seed<S>) -> Result<Seq<S>> {
    if s1.eps() == s2.eps() {
        return Err(Error::DuplicateEps(s1.eps().format()));
    }
    let build = |a: &Seed<S>, b: &Seed<S>, ordering: &'static str| {
        Chain::new(v0.clone())
            .extend_all([a.clone(), b.clone()])
            .map_err(|e| Error::Ordering { ordering, source: Box::new(e) })
    };
    let c12 = build(s1, s2, "s1 then s2")?;
    let c21 = build(s2, s1, "s2 then s1")?;
    let (a, b) = (c12.last_potential(), c21.last_potential());
    let w = a.window().intersect(&b.window()).ok_or(Error::EmptyOverlap("bianchi"))?;
    Ok(Seq::from_fn(w, |n| a.at(n).clone() - b.at(n).clone()))
}
