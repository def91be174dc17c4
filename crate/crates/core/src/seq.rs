//! Finite windows of integer-indexed sequences and the shift/difference
//! operators acting on them.
//!
//! Every operation returns the largest window on which its formula can be
//! evaluated from the inputs. Nothing is padded or extrapolated.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Closed integer interval `[lo, hi]`, never empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Window {
    lo: i64,
    hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidWindow { lo, hi });
        }
        Ok(Window { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn intersect(&self, other: &Window) -> Option<Window> {
        Window::new(self.lo.max(other.lo), self.hi.min(other.hi)).ok()
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl TryFrom<[i64; 2]> for Window {
    type Error = Error;

    fn try_from([lo, hi]: [i64; 2]) -> Result<Self> {
        Window::new(lo, hi)
    }
}

impl From<Window> for [i64; 2] {
    fn from(w: Window) -> Self {
        [w.lo, w.hi]
    }
}

impl std::fmt::Display for Window {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Output window of a pointwise formula.
///
/// Each requirement `(w, a, b)` says the formula at `n` reads an input on
/// window `w` at indices `n + a ..= n + b`.
pub(crate) fn output_window(what: &'static str, reqs: &[(Window, i64, i64)]) -> Result<Window> {
    let mut out: Option<Window> = None;
    for &(w, a, b) in reqs {
        let span = (b - a + 1) as usize;
        if w.len() < span {
            return Err(Error::WindowTooSmall {
                what,
                needed: span,
                got: w.len(),
            });
        }
        let own = Window::new(w.lo - a, w.hi - b)?;
        out = Some(match out {
            None => own,
            Some(acc) => acc.intersect(&own).ok_or(Error::EmptyOverlap(what))?,
        });
    }
    out.ok_or(Error::EmptyOverlap(what))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Seq<S> {
    window: Window,
    values: Vec<S>,
}

impl<S: Scalar> Seq<S> {
    pub fn new(lo: i64, values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::WindowTooSmall {
                what: "sequence",
                needed: 1,
                got: 0,
            });
        }
        let window = Window::new(lo, lo + values.len() as i64 - 1)?;
        Ok(Seq { window, values })
    }

    pub fn from_fn(window: Window, mut f: impl FnMut(i64) -> S) -> Self {
        let values = window.indices().map(&mut f).collect();
        Seq { window, values }
    }

    pub fn try_from_fn<E>(window: Window, f: impl FnMut(i64) -> Result<S, E>) -> Result<Self, E> {
        let values = window.indices().map(f).collect::<Result<Vec<_>, E>>()?;
        Ok(Seq { window, values })
    }

    pub fn constant(window: Window, value: S) -> Self {
        Seq {
            window,
            values: vec![value; window.len()],
        }
    }

    pub fn zeros(window: Window) -> Self {
        Self::constant(window, S::zero())
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn lo(&self) -> i64 {
        self.window.lo
    }

    pub fn hi(&self) -> i64 {
        self.window.hi
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn get(&self, n: i64) -> Option<&S> {
        if self.window.contains(n) {
            Some(&self.values[(n - self.window.lo) as usize])
        } else {
            None
        }
    }

    /// Value at `n`. Panics outside the window; callers size windows first.
    pub fn at(&self, n: i64) -> &S {
        self.get(n).unwrap_or_else(|| {
            panic!("index {n} outside window {}", self.window)
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &S)> {
        self.window.indices().zip(self.values.iter())
    }

    /// Restriction to a sub-window.
    pub fn restrict(&self, w: Window) -> Result<Self> {
        if !(self.window.contains(w.lo) && self.window.contains(w.hi)) {
            return Err(Error::OutOfWindow {
                index: if self.window.contains(w.lo) { w.hi } else { w.lo },
                lo: self.window.lo,
                hi: self.window.hi,
            });
        }
        let start = (w.lo - self.window.lo) as usize;
        Ok(Seq {
            window: w,
            values: self.values[start..start + w.len()].to_vec(),
        })
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Seq {
            window: self.window,
            values: self.values.iter().map(f).collect(),
        }
    }

    /// `result(n) = self(n + k)`, relabelled onto `[lo - k, hi - k]`.
    pub fn shift(&self, k: i64) -> Self {
        Seq {
            window: Window {
                lo: self.window.lo - k,
                hi: self.window.hi - k,
            },
            values: self.values.clone(),
        }
    }

    /// Forward difference `s(n+1) - s(n)` on `[lo, hi-1]`.
    pub fn fwd_diff(&self) -> Result<Self> {
        let w = output_window("forward difference", &[(self.window, 0, 1)])?;
        Ok(Seq::from_fn(w, |n| self.at(n + 1).clone() - self.at(n).clone()))
    }

    /// Second difference `s(n+2) - 2 s(n+1) + s(n)` on `[lo, hi-2]`.
    ///
    /// Evaluated as a difference of differences so that it agrees bit for bit
    /// with two forward differences in the float backend too.
    pub fn second_diff(&self) -> Result<Self> {
        let w = output_window("second difference", &[(self.window, 0, 2)])?;
        Ok(Seq::from_fn(w, |n| {
            let hi = self.at(n + 2).clone() - self.at(n + 1).clone();
            let lo = self.at(n + 1).clone() - self.at(n).clone();
            hi - lo
        }))
    }

    /// Index of the first vanishing value, if any.
    pub fn first_zero(&self) -> Option<i64> {
        self.iter().find(|(_, v)| v.is_zero()).map(|(n, _)| n)
    }

    /// Largest absolute value and the first index attaining it.
    pub fn max_abs(&self) -> (S, i64) {
        let mut best = (self.values[0].abs(), self.window.lo);
        for (n, v) in self.iter().skip(1) {
            let a = v.abs();
            if a > best.0 {
                best = (a, n);
            }
        }
        best
    }

    /// Pointwise binary combination on the common window.
    pub fn zip_with(&self, other: &Seq<S>, f: impl Fn(&S, &S) -> S) -> Result<Self> {
        let w = output_window("pointwise combination", &[(self.window, 0, 0), (other.window, 0, 0)])?;
        Ok(Seq::from_fn(w, |n| f(self.at(n), other.at(n))))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value\n");
        for (n, v) in self.iter() {
            let _ = writeln!(out, "{n},{}", v.format());
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let src = Path::new("<csv>");
        Self::parse_csv(text, src)
    }

    fn parse_csv(text: &str, src: &Path) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.replace(' ', "") == "n,value" => {}
            _ => return Err(Error::format(src, "expected header `n,value`")),
        }
        let mut lo = None;
        let mut values = Vec::new();
        for (row, line) in lines.enumerate() {
            let (n, v) = line
                .split_once(',')
                .ok_or_else(|| Error::format(src, format!("row {}: expected `n,value`", row + 1)))?;
            let n: i64 = n
                .trim()
                .parse()
                .map_err(|_| Error::format(src, format!("row {}: bad index `{n}`", row + 1)))?;
            let start = *lo.get_or_insert(n);
            if n != start + values.len() as i64 {
                return Err(Error::format(src, format!("row {}: indices must be consecutive", row + 1)));
            }
            values.push(S::parse_literal(v)?);
        }
        let lo = lo.ok_or_else(|| Error::format(src, "no data rows"))?;
        Seq::new(lo, values)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_csv(&text, path)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> Rational {
        rational(p, d)
    }

    fn ints(lo: i64, xs: &[i64]) -> Seq<Rational> {
        Seq::new(lo, xs.iter().map(|&x| q(x, 1)).collect()).unwrap()
    }

    #[test]
    fn shift_relabels() {
        let s = ints(0, &[5, 7, 9]);
        let t = s.shift(1);
        assert_eq!(t.window(), Window::new(-1, 1).unwrap());
        assert_eq!(t.values(), s.values());
        assert_eq!(t.at(0), &q(7, 1));
        assert_eq!(s.shift(0), s);

        let s = Seq::from_fn(Window::new(0, 3).unwrap(), |n| q(n + 1, 1));
        let t = s.shift(1);
        for n in -1..=2 {
            assert_eq!(t.at(n), &q(n + 2, 1));
        }
    }

    #[test]
    fn forward_difference() {
        assert_eq!(ints(0, &[0, 1, 4, 9]).fwd_diff().unwrap(), ints(0, &[1, 3, 5]));
        assert_eq!(ints(3, &[4, 4, 4]).fwd_diff().unwrap(), ints(3, &[0, 0]));
        let pow2 = ints(0, &[1, 2, 4, 8, 16]);
        assert_eq!(pow2.fwd_diff().unwrap(), ints(0, &[1, 2, 4, 8]));
        assert!(matches!(
            ints(0, &[1]).fwd_diff(),
            Err(Error::WindowTooSmall { .. })
        ));
    }

    #[test]
    fn second_difference() {
        let linear = Seq::from_fn(Window::new(-3, 6).unwrap(), |n| q(3, 2) + q(-2, 7) * q(n, 1));
        assert!(linear.second_diff().unwrap().values().iter().all(|v| v == &q(0, 1)));
        assert_eq!(ints(0, &[0, 1, 4, 9, 16]).second_diff().unwrap(), ints(0, &[2, 2, 2]));
        // closed form 2/((n+1)(n+2)(n+3)) computed by hand from the three terms
        let recip = Seq::from_fn(Window::new(0, 4).unwrap(), |n| q(1, n + 1));
        let d2 = recip.second_diff().unwrap();
        for n in 0..=2 {
            assert_eq!(d2.at(n), &q(2, (n + 1) * (n + 2) * (n + 3)));
        }
        assert!(ints(0, &[1, 2]).second_diff().is_err());
    }

    #[test]
    fn output_window_rules() {
        let a = Window::new(0, 10).unwrap();
        let b = Window::new(5, 20).unwrap();
        assert_eq!(output_window("t", &[(a, 0, 2), (b, 0, 0)]).unwrap(), Window::new(5, 8).unwrap());
        let c = Window::new(30, 40).unwrap();
        assert!(matches!(output_window("t", &[(a, 0, 0), (c, 0, 0)]), Err(Error::EmptyOverlap(_))));
    }

    #[test]
    fn csv_round_trip() {
        let s = Seq::from_fn(Window::new(-2, 2).unwrap(), |n| q(n, 3));
        let text = s.to_csv();
        assert!(text.starts_with("n,value\n-2,-2/3\n-1,-1/3\n0,0\n1,1/3\n"));
        assert_eq!(Seq::<Rational>::from_csv(&text).unwrap(), s);
        assert!(Seq::<Rational>::from_csv("n,value\n0,1\n2,3\n").is_err());
        assert!(Seq::<Rational>::from_csv("x,y\n0,1\n").is_err());

        let f = Seq::from_fn(Window::new(0, 3).unwrap(), |n| 1.0 / (n as f64 + 3.0));
        assert_eq!(Seq::<f64>::from_csv(&f.to_csv()).unwrap(), f);
    }

    #[test]
    fn max_abs_finds_worst() {
        let s = ints(4, &[1, -7, 3, 7]);
        assert_eq!(s.max_abs(), (q(7, 1), 5));
    }

    fn rat() -> impl Strategy<Value = Rational> {
        (-50i64..50, 1i64..12).prop_map(|(p, d)| q(p, d))
    }

    fn seq(min: usize) -> impl Strategy<Value = Seq<Rational>> {
        (-20i64..20, prop::collection::vec(rat(), min..min + 12))
            .prop_map(|(lo, v)| Seq::new(lo, v).unwrap())
    }

    proptest! {
        #[test]
        fn second_diff_is_iterated_fwd_diff(s in seq(3)) {
            prop_assert_eq!(s.fwd_diff().unwrap().fwd_diff().unwrap(), s.second_diff().unwrap());
            prop_assert_eq!(s.fwd_diff().unwrap().len(), s.len() - 1);
            prop_assert_eq!(s.second_diff().unwrap().len(), s.len() - 2);
        }

        #[test]
        fn float_second_diff_is_iterated_fwd_diff(v in prop::collection::vec(-1e3f64..1e3, 3..20)) {
            let s = Seq::new(0, v).unwrap();
            prop_assert_eq!(s.fwd_diff().unwrap().fwd_diff().unwrap(), s.second_diff().unwrap());
        }

        #[test]
        fn product_rule((lo, a, b) in (-10i64..10, prop::collection::vec(rat(), 2..14), prop::collection::vec(rat(), 2..14))) {
            let len = a.len().min(b.len());
            let psi = Seq::new(lo, a[..len].to_vec()).unwrap();
            let phi = Seq::new(lo, b[..len].to_vec()).unwrap();
            let prod = psi.zip_with(&phi, |x, y| x * y).unwrap();
            let lhs = prod.fwd_diff().unwrap();
            let dpsi = psi.fwd_diff().unwrap();
            let dphi = phi.fwd_diff().unwrap();
            for (n, v) in lhs.iter() {
                let rhs = psi.at(n) * dphi.at(n) + phi.at(n + 1) * dpsi.at(n);
                prop_assert_eq!(v, &rhs);
            }
        }

        #[test]
        fn shifts_compose(s in seq(1), a in -5i64..5, b in -5i64..5) {
            prop_assert_eq!(s.shift(a).shift(b), s.shift(a + b));
        }
    }
}
