//! The Skitovich-Darmois equation
//!
//! ```text
//! ∏_i f_i(Σ_j α_ij u_j) = ∏_i ∏_j f_i(α_ij u_j)
//! ```
//!
//! checked exhaustively on `box^n`, plus the identities the equation forces
//! for three forms `ξ1+ξ2+ξ3, ξ1-ξ2+ξ3, ξ1-ξ2-ξ3`.
//!
//! Matrix convention: row `j` is the form `L_j`, column `i` the variable
//! `ξ_i`, so `α_ij` is stored at `[j][i]`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_integer::Integer;

use crate::arith::Rational;
use crate::boxes::TestBox;
use crate::charfn::{CharFn, DEFAULT_TOLERANCE};
use crate::error::{Error, Result};
use crate::solenoid::{HElement, Multiplier, SupernaturalSpec};
use crate::value::Value;

/// Square matrix of dual automorphisms; rows are forms, columns variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FormsMatrix {
    rows: Vec<Vec<Multiplier>>,
}

impl FormsMatrix {
    pub fn new(rows: Vec<Vec<Multiplier>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParams("forms matrix must be square and nonempty".into()));
        }
        Ok(Self { rows })
    }

    pub fn from_integers(rows: &[&[i64]]) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&k| Multiplier::new(Rational::from_integer(k)))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(rows)
    }

    /// `L1 = ξ1+ξ2+ξ3, L2 = ξ1-ξ2+ξ3, L3 = ξ1-ξ2-ξ3`.
    pub fn three_forms() -> Self {
        Self::from_integers(&[&[1, 1, 1], &[1, -1, 1], &[1, -1, -1]]).expect("valid matrix")
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    /// Coefficient of `ξ_var` in `L_form`.
    pub fn entry(&self, form: usize, var: usize) -> Multiplier {
        self.rows[form][var]
    }

    pub fn rows(&self) -> &[Vec<Multiplier>] {
        &self.rows
    }

    /// First row and first column all identity.
    pub fn is_normalized(&self) -> bool {
        let id = Multiplier::identity();
        self.rows[0].iter().all(|m| *m == id) && self.rows.iter().all(|r| r[0] == id)
    }

    /// Every entry must be an automorphism of `H_a`.
    pub fn validate(&self, spec: &SupernaturalSpec) -> Result<()> {
        for (j, row) in self.rows.iter().enumerate() {
            for (i, m) in row.iter().enumerate() {
                if !spec.is_automorphism(m) {
                    return Err(Error::PreconditionViolated(format!(
                        "entry ({j}, {i}) = {} is not an automorphism",
                        m.ratio()
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub point: Vec<HElement>,
    pub lhs: Value,
    pub rhs: Value,
    pub zero: bool,
}

impl Residual {
    pub fn magnitude(&self) -> f64 {
        self.lhs.distance(&self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    /// Used only when a side of the equation is not exact.
    pub tolerance: f64,
    /// Maximum number of points of `box^n`.
    pub budget: u64,
    /// Number of violations kept in the report (all are counted).
    pub max_reported: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { tolerance: DEFAULT_TOLERANCE, budget: 1_000_000, max_reported: 100 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub points: u64,
    pub violation_count: u64,
    /// The first violations in lexicographic order of the point.
    pub violations: Vec<Residual>,
    /// Largest `|lhs - rhs|` seen, exact or not.
    pub worst_residual: f64,
    /// Every compared value was exact.
    pub exact: bool,
}

impl VerifyReport {
    pub fn holds(&self) -> bool {
        self.violation_count == 0
    }
}

fn check_dims(fs: &[CharFn], forms: &FormsMatrix) -> Result<()> {
    if fs.len() != forms.n() {
        return Err(Error::InvalidParams(format!(
            "{} functions for a {}x{} matrix",
            fs.len(),
            forms.n(),
            forms.n()
        )));
    }
    Ok(())
}

/// Both sides of the equation at a single point.
pub fn residual_at(fs: &[CharFn], forms: &FormsMatrix, point: &[HElement], tolerance: f64) -> Result<Residual> {
    check_dims(fs, forms)?;
    if point.len() != forms.n() {
        return Err(Error::InvalidParams(format!("point has {} coordinates", point.len())));
    }
    let mut lhs = Value::one();
    let mut rhs = Value::one();
    for (i, f) in fs.iter().enumerate() {
        let mut arg = HElement::zero();
        for (j, u) in point.iter().enumerate() {
            let term = forms.entry(j, i).apply(u);
            arg = arg + term;
            rhs = rhs * f.eval_at(&term)?;
        }
        lhs = lhs * f.eval_at(&arg)?;
    }
    let zero = lhs.approx_eq(&rhs, tolerance);
    Ok(Residual { point: point.to_vec(), lhs, rhs, zero })
}

/// Exhaustive check over `box^n`.
///
/// All arguments that occur are integers over one common denominator, so
/// each function is evaluated once per distinct argument and the tuples are
/// walked in lexicographic order.
pub fn verify_on_box(
    fs: &[CharFn],
    forms: &FormsMatrix,
    spec: &SupernaturalSpec,
    tbox: &TestBox,
    cfg: &VerifyConfig,
) -> Result<VerifyReport> {
    check_dims(fs, forms)?;
    forms.validate(spec)?;
    let pts = tbox.points()?;
    if let Some(y) = pts.iter().find(|y| !spec.contains(y)) {
        return Err(Error::NotMember(*y));
    }
    let n = forms.n();
    let total = (pts.len() as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if total > cfg.budget as u128 {
        return Err(Error::BudgetExceeded { points: total, cap: cfg.budget });
    }
    match Grid::new(&pts, forms) {
        Some(grid) => sweep(fs, forms, &pts, &grid, total as u64, cfg),
        None => sweep_slow(fs, forms, &pts, total as u64, cfg),
    }
}

/// Integer coordinates: box point `k` is `a[k] / den`, entry `(j, i)` is
/// `m[j][i] / scale`; every argument is an integer over `den * scale`.
struct Grid {
    a: Vec<i64>,
    m: Vec<Vec<i64>>,
    lo: i64,
    width: usize,
    unit: Rational,
}

const MAX_TABLE: i64 = 1 << 24;

impl Grid {
    fn new(pts: &[HElement], forms: &FormsMatrix) -> Option<Self> {
        let den = pts.iter().fold(1i64, |acc, y| acc.lcm(y.0.denom()));
        let scale = forms.rows().iter().flatten().fold(1i64, |acc, m| acc.lcm(m.ratio().denom()));
        let a: Vec<i64> = pts
            .iter()
            .map(|y| y.0.numer().checked_mul(den / y.0.denom()))
            .collect::<Option<_>>()?;
        let m: Vec<Vec<i64>> = forms
            .rows()
            .iter()
            .map(|r| r.iter().map(|e| e.ratio().numer().checked_mul(scale / e.ratio().denom())).collect())
            .collect::<Option<_>>()?;
        let amax = a.iter().map(|x| x.abs()).max().unwrap_or(0) as i128;
        let mut reach = 0i128;
        for i in 0..forms.n() {
            let col: i128 = m.iter().map(|r| r[i].abs() as i128).sum();
            reach = reach.max(col * amax);
        }
        if reach > MAX_TABLE as i128 {
            return None;
        }
        let unit = Rational::new(1, den.checked_mul(scale)?);
        Some(Self { a, m, lo: -(reach as i64), width: 2 * reach as usize + 1, unit })
    }
}

/// Lazily filled `f(k·unit)` for `k` in the grid's range.
struct Table<'a> {
    f: &'a CharFn,
    lo: i64,
    unit: Rational,
    cells: Vec<Option<Value>>,
}

impl<'a> Table<'a> {
    fn new(f: &'a CharFn, grid: &Grid) -> Self {
        Self { f, lo: grid.lo, unit: grid.unit, cells: vec![None; grid.width] }
    }

    fn get(&mut self, k: i64) -> Result<Value> {
        let idx = (k - self.lo) as usize;
        if let Some(v) = self.cells[idx] {
            return Ok(v);
        }
        let v = self.f.eval_at(&HElement(self.unit * k))?;
        self.cells[idx] = Some(v);
        Ok(v)
    }
}

struct Tally {
    report: VerifyReport,
    max_reported: usize,
    tolerance: f64,
}

impl Tally {
    fn new(total: u64, cfg: &VerifyConfig) -> Self {
        Self {
            report: VerifyReport {
                points: total,
                violation_count: 0,
                violations: Vec::new(),
                worst_residual: 0.0,
                exact: true,
            },
            max_reported: cfg.max_reported,
            tolerance: cfg.tolerance,
        }
    }

    fn record(&mut self, lhs: Value, rhs: Value, point: impl FnOnce() -> Vec<HElement>) {
        let exact = lhs.is_exact() && rhs.is_exact();
        self.report.exact &= exact;
        if exact && lhs == rhs {
            return;
        }
        let dist = lhs.distance(&rhs);
        if dist > self.report.worst_residual {
            self.report.worst_residual = dist;
        }
        if lhs.approx_eq(&rhs, self.tolerance) {
            return;
        }
        self.report.violation_count += 1;
        if self.report.violations.len() < self.max_reported {
            self.report.violations.push(Residual { point: point(), lhs, rhs, zero: false });
        }
    }
}

fn sweep(
    fs: &[CharFn],
    forms: &FormsMatrix,
    pts: &[HElement],
    grid: &Grid,
    total: u64,
    cfg: &VerifyConfig,
) -> Result<VerifyReport> {
    let n = forms.n();
    let mut tables: Vec<Table> = fs.iter().map(|f| Table::new(f, grid)).collect();
    // rhs_factor[j][k] = ∏_i f_i(α_ij · pts[k])
    let mut rhs_factor = vec![Vec::with_capacity(pts.len()); n];
    for (j, row) in rhs_factor.iter_mut().enumerate() {
        for &a in &grid.a {
            let mut acc = Value::one();
            for (i, t) in tables.iter_mut().enumerate() {
                acc = acc * t.get(grid.m[j][i] * a)?;
            }
            row.push(acc);
        }
    }
    let mut tally = Tally::new(total, cfg);
    let mut idx = vec![0usize; n];
    loop {
        let mut rhs = Value::one();
        for (j, &k) in idx.iter().enumerate() {
            let v = rhs_factor[j][k];
            if v.is_zero() {
                rhs = v;
                break;
            }
            rhs = rhs * v;
        }
        let mut lhs = Value::one();
        for (i, t) in tables.iter_mut().enumerate() {
            let arg: i64 = idx.iter().enumerate().map(|(j, &k)| grid.m[j][i] * grid.a[k]).sum();
            let v = t.get(arg)?;
            if v.is_zero() {
                lhs = v;
                break;
            }
            lhs = lhs * v;
        }
        tally.record(lhs, rhs, || idx.iter().map(|&k| pts[k]).collect());
        if !advance(&mut idx, pts.len()) {
            break;
        }
    }
    Ok(tally.report)
}

fn sweep_slow(fs: &[CharFn], forms: &FormsMatrix, pts: &[HElement], total: u64, cfg: &VerifyConfig) -> Result<VerifyReport> {
    let n = forms.n();
    let mut tally = Tally::new(total, cfg);
    let mut idx = vec![0usize; n];
    loop {
        let point: Vec<HElement> = idx.iter().map(|&k| pts[k]).collect();
        let r = residual_at(fs, forms, &point, cfg.tolerance)?;
        tally.record(r.lhs, r.rhs, || point);
        if !advance(&mut idx, pts.len()) {
            break;
        }
    }
    Ok(tally.report)
}

/// Odometer step, last coordinate fastest. `false` once wrapped.
fn advance(idx: &mut [usize], radix: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < radix {
            return true;
        }
        *slot = 0;
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportReport {
    /// `N ∩ box`, `N` the common non-vanishing set.
    pub n_points: Vec<HElement>,
    pub is_subgroup_on_box: bool,
    /// `2y ∈ N ⇒ y ∈ N`, for every `2y` in `N ∩ box` halvable in `H_a`.
    pub proph_holds: bool,
}

pub fn support_group_n(fs: &[CharFn], spec: &SupernaturalSpec, tbox: &TestBox) -> Result<SupportReport> {
    let pts = tbox.points()?;
    let nonvanishing = |y: &HElement| -> Result<bool> {
        for f in fs {
            if f.eval_at(y)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut n_points = Vec::new();
    for y in &pts {
        if nonvanishing(y)? {
            n_points.push(*y);
        }
    }
    let in_n = |y: &HElement| n_points.binary_search(y).is_ok();
    let mut is_subgroup_on_box = true;
    'outer: for a in &n_points {
        if !in_n(&-*a) {
            is_subgroup_on_box = false;
            break;
        }
        for b in &n_points {
            let s = *a + *b;
            if pts.binary_search(&s).is_ok() && !in_n(&s) {
                is_subgroup_on_box = false;
                break 'outer;
            }
        }
    }
    let mut proph_holds = true;
    for w in &n_points {
        if let Ok(half) = spec.halve(w) {
            if !nonvanishing(&half)? {
                proph_holds = false;
                break;
            }
        }
    }
    Ok(SupportReport { n_points, is_subgroup_on_box, proph_holds })
}

/// Identities forced by the equation for the forms of
/// [`FormsMatrix::three_forms`]:
///
/// * `f1(2y) = f1(y)²|f2(y)|²|f3(y)|²` and its two analogues, from the points
///   `(y, 0, y)`, `(y, -y, 0)` and `(0, y, -y)`;
/// * `|f_a(t1)||f_b(t2)||f_c(t2)| = |f_a(t2)||f_b(t1)||f_c(t1)|` for every
///   choice of `a` and every `t1, t2` in one coset of `Y^(2)`.
///
/// The equation itself is verified on the box first.
pub fn derived_identities_check(
    fs: &[CharFn],
    spec: &SupernaturalSpec,
    tbox: &TestBox,
    cfg: &VerifyConfig,
) -> Result<bool> {
    if fs.len() != 3 {
        return Err(Error::InvalidParams(format!("three functions expected, got {}", fs.len())));
    }
    let forms = FormsMatrix::three_forms();
    let report = verify_on_box(fs, &forms, spec, tbox, cfg)?;
    if !report.holds() {
        return Err(Error::PreconditionViolated(format!(
            "equation fails at {} of {} points",
            report.violation_count, report.points
        )));
    }
    let tol = cfg.tolerance;
    let pts = tbox.points()?;
    for y in &pts {
        if pts.binary_search(&(*y * 2)).is_err() {
            continue;
        }
        let v: Vec<Value> = fs.iter().map(|f| f.eval_at(y)).collect::<Result<_>>()?;
        let sq: Vec<Value> = v.iter().map(Value::norm_sqr).collect();
        for i in 0..3 {
            let lhs = fs[i].eval_at(&(*y * 2))?;
            let mut rhs = v[i] * v[i];
            for (k, s) in sq.iter().enumerate() {
                if k != i {
                    rhs = rhs * *s;
                }
            }
            if !lhs.approx_eq(&rhs, tol) {
                return Ok(false);
            }
        }
    }
    let labels: Vec<_> = pts.iter().map(|y| spec.coset_mod_2k(y, 1)).collect::<Result<_>>()?;
    for (x, lx) in pts.iter().zip(&labels) {
        let mx: Vec<Value> = fs.iter().map(|f| f.eval_at(x).map(|v| v.norm_sqr())).collect::<Result<_>>()?;
        for (z, lz) in pts.iter().zip(&labels) {
            if lx != lz || z <= x {
                continue;
            }
            let mz: Vec<Value> = fs.iter().map(|f| f.eval_at(z).map(|v| v.norm_sqr())).collect::<Result<_>>()?;
            // squared moduli keep the comparison exact
            for a in 0..3 {
                let (b, c) = ((a + 1) % 3, (a + 2) % 3);
                let left = mx[a] * mz[b] * mz[c];
                let right = mz[a] * mx[b] * mx[c];
                if !left.approx_eq(&right, tol) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Solves `u1+u2+u3 = y1, u1-u2-u3 = y2, u1+u2-u3 = y3` by halving, for
/// `y1, y2, y3` in one coset of `Y^(2)`.
pub fn halving_solve(ys: [HElement; 3], spec: &SupernaturalSpec) -> Result<[HElement; 3]> {
    let [y1, y2, y3] = ys;
    for y in &ys {
        if !spec.contains(y) {
            return Err(Error::NotMember(*y));
        }
    }
    let label = spec.coset_mod_2k(&y1, 1)?;
    for y in [y2, y3] {
        if spec.coset_mod_2k(&y, 1)? != label {
            return Err(Error::NotDivisible(y1 + y));
        }
    }
    let u = [spec.halve(&(y1 + y2))?, spec.halve(&(y3 - y2))?, spec.halve(&(y1 - y3))?];
    let [u1, u2, u3] = u;
    debug_assert!(u1 + u2 + u3 == y1 && u1 - u2 - u3 == y2 && u1 + u2 - u3 == y3);
    Ok(u)
}

/// For functions without zeros on the box that satisfy the equation there:
/// whether each is multiplicative on the box, i.e. a character at box scale.
pub fn nonvanishing_solution_is_character(
    fs: &[CharFn],
    forms: &FormsMatrix,
    spec: &SupernaturalSpec,
    tbox: &TestBox,
    cfg: &VerifyConfig,
) -> Result<bool> {
    let pts = tbox.points()?;
    for f in fs {
        for y in &pts {
            if f.eval_at(y)?.modulus() <= cfg.tolerance {
                return Err(Error::PreconditionViolated(format!("a function vanishes at {y}")));
            }
        }
    }
    let report = verify_on_box(fs, forms, spec, tbox, cfg)?;
    if let Some(r) = report.violations.first() {
        return Err(Error::PreconditionViolated(format!(
            "equation fails at {} of {} points, e.g. |lhs - rhs| = {:e}",
            report.violation_count,
            report.points,
            r.magnitude()
        )));
    }
    for f in fs {
        for u in &pts {
            let fu = f.eval_at(u)?;
            for v in &pts {
                let s = *u + *v;
                if pts.binary_search(&s).is_err() {
                    continue;
                }
                if !f.eval_at(&s)?.approx_eq(&(fu * f.eval_at(v)?), cfg.tolerance) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
