//! Brake orbits, the symmetric periodic and collision families, and the
//! behaviour of the period ratio `T_ξ/T_η` along one-parameter slices.
//!
//! Two launch families are studied:
//!
//! * from `(a, 0)` with velocity `(0, b)`; `ξ² = 2a` is then a turning point
//!   and the family degenerates onto the brake orbit at `b* = √(2/a − 2a)`;
//! * from rest at `(a′, d)`; both `ξ` and `η` start at turning points and the
//!   family degenerates onto the unit circle at `d = √(1 − a′²)`.
//!
//! Near the degenerate end the ratio grows like `−log(gap)`, and forming
//! `H² − 2(c+1)` from rounded `(H, c)` loses most of its digits there. The
//! solvers therefore work with the squared distance to the degenerate end,
//! for which the turning points are known in closed form.

use serde::Serialize;

use crate::elliptic::{complete_k, complete_k_complement};
use crate::error::{domain, Result, StarkError};
use crate::roots::monotone_root;
use crate::planar::{classify_eta, classify_xi, Conserved2, EtaClass, XiClass};

/// The brake orbit launched from `(a, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BrakeOrbitParams {
    pub a: f64,
    pub b_star: f64,
    pub h: f64,
    pub c: f64,
}

impl BrakeOrbitParams {
    pub fn conserved(&self) -> Conserved2 {
        Conserved2::new(self.h, self.c)
    }
}

pub fn brake_orbit_params(a: f64) -> Result<BrakeOrbitParams> {
    if a == 1.0 {
        return domain("a = 1 is the equilibrium point, not a brake orbit");
    }
    if !(a > 0.0 && a < 1.0) {
        return domain(format!("brake orbits need a in (0, 1), got {a}"));
    }
    Ok(BrakeOrbitParams {
        a,
        b_star: (2.0 / a - 2.0 * a).sqrt(),
        h: -2.0 * a,
        c: 2.0 * a * a - 1.0,
    })
}

/// `Φ(x) = K((1 − s)/(1 + s)) / √(1 + s)` with `s = √(1 − x)`.
pub fn phi_fn(x: f64) -> Result<f64> {
    if !(x < 1.0) {
        return domain(format!("phi needs x < 1, got {x}"));
    }
    let s = (1.0 - x).sqrt();
    Ok(complete_k((1.0 - s) / (1.0 + s))? / (1.0 + s).sqrt())
}

/// `T_ξ/T_η = Φ((2c+2)/H²) / Φ((2c−2)/H²)` for `H < 0`.
pub fn period_ratio(cq: &Conserved2) -> Result<f64> {
    if !(cq.h < 0.0) {
        return domain(format!("period ratio in phi form needs H < 0, got {}", cq.h));
    }
    match classify_xi(cq) {
        XiClass::PeriodicPlusUnbounded => {}
        other => return Err(StarkError::XiClassMismatch(other)),
    }
    match classify_eta(cq) {
        EtaClass::PeriodicOvalHneg => {}
        other => return Err(StarkError::EtaClassMismatch(other)),
    }
    let h2 = cq.h * cq.h;
    Ok(phi_fn((2.0 * cq.c + 2.0) / h2)? / phi_fn((2.0 * cq.c - 2.0) / h2)?)
}

/// Ratio from squared turning points `ξ₁²`, `ξ₂² − ξ₁²`, `η₁²`, `η₂²`.
fn ratio_from_turning(xi1: f64, xi_spread: f64, eta1: f64, eta2: f64) -> Result<f64> {
    let w2 = eta1 + eta2;
    let xi2 = xi1 + xi_spread;
    let t_xi = complete_k_complement(xi_spread / xi2)? / xi2.sqrt();
    let t_eta = complete_k(eta1 / w2)? / w2.sqrt();
    Ok(t_xi / t_eta)
}

/// `α(a) = √(1 + a²) K(a²) / K(0)`, the `b → 0` limit of the ratio.
pub fn alpha(a: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return domain(format!("alpha needs a in (0, 1), got {a}"));
    }
    Ok((1.0 + a * a).sqrt() * complete_k(a * a)? / std::f64::consts::FRAC_PI_2)
}

/// Smallest `k ≥ 1` with `2k + 1 > α(a)`.
pub fn min_family_index(a: f64) -> Result<u32> {
    Ok(first_index_above(alpha(a)?, 1))
}

/// Smallest `k ≥ 1` with `2k + offset > limit`.
fn first_index_above(limit: f64, offset: u32) -> u32 {
    let mut k = 1;
    while f64::from(2 * k + offset) <= limit {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FamilyKind {
    /// Axis launch, `T_ξ = (2k+1)T_η`: perpendicular return to the negative axis.
    A,
    /// Axis launch, `T_ξ = (2k+2)T_η`: collision.
    B,
    /// Release from rest, `T_ξ = 2k T_η`: perpendicular negative-axis crossing.
    ARest,
    /// Release from rest, `T_ξ = (2k+1)T_η`: collision.
    BRest,
}

impl FamilyKind {
    pub fn ratio_target(&self, k: u32) -> u32 {
        match self {
            FamilyKind::A => 2 * k + 1,
            FamilyKind::B => 2 * k + 2,
            FamilyKind::ARest => 2 * k,
            FamilyKind::BRest => 2 * k + 1,
        }
    }

    pub fn is_rest(&self) -> bool {
        matches!(self, FamilyKind::ARest | FamilyKind::BRest)
    }

    /// Event ending the symmetric half-orbit after the k positive-axis crossings.
    pub fn terminal_is_collision(&self) -> bool {
        matches!(self, FamilyKind::B | FamilyKind::BRest)
    }
}

/// A solved family member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilySolution {
    pub kind: FamilyKind,
    pub k: u32,
    /// Launch abscissa `a` or release abscissa `a′`.
    pub anchor: f64,
    /// `b_k`, `b′_k`, `d_k` or `d′_k`.
    pub root: f64,
    /// `root_max² − root²`, the variable the solver actually resolves; its
    /// relative accuracy is much better than that of `root` for large k.
    pub gap: f64,
    pub cq: Conserved2,
    pub ratio_target: u32,
    /// `T_ξ/T_η` at the solution, evaluated from the gap.
    pub ratio: f64,
}

impl FamilySolution {
    pub fn residual(&self) -> f64 {
        self.ratio - f64::from(self.ratio_target)
    }
}

/// One-parameter slice through the axis launches at fixed `a`, indexed by
/// `δ = b*² − b²`.
#[derive(Debug, Clone, Copy)]
pub struct AxisLaunchSlice {
    a: f64,
    b_star_sq: f64,
}

impl AxisLaunchSlice {
    pub fn new(a: f64) -> Result<Self> {
        brake_orbit_params(a)?;
        Ok(Self { a, b_star_sq: 2.0 / a - 2.0 * a })
    }

    pub fn b_star(&self) -> f64 {
        self.b_star_sq.sqrt()
    }

    pub fn gap_of(&self, b: f64) -> f64 {
        let bs = self.b_star();
        (bs - b) * (bs + b)
    }

    /// `H = −2a − δ/2`, `c = 2a² − 1 + aδ`.
    pub fn conserved(&self, gap: f64) -> Conserved2 {
        Conserved2::new(-2.0 * self.a - 0.5 * gap, 2.0 * self.a * self.a - 1.0 + self.a * gap)
    }

    /// Turning points are `ξ₁² = 2a`, `ξ₂² = 2a + δ`.
    pub fn ratio(&self, gap: f64) -> Result<f64> {
        if !(gap > 0.0 && gap <= self.b_star_sq) {
            return domain(format!("gap {gap} outside (0, b*^2]"));
        }
        let a = self.a;
        let b_sq = self.b_star_sq - gap;
        let h = -2.0 * a - 0.5 * gap;
        let prod = 2.0 * a * b_sq;
        let eta2 = (h * h + prod).sqrt() - h;
        let eta1 = prod / eta2;
        ratio_from_turning(2.0 * a, gap, eta1, eta2)
    }

    pub fn ratio_at_b(&self, b: f64) -> Result<f64> {
        self.ratio(self.gap_of(b))
    }
}

/// Releases from rest at `(a′, d)`, indexed by `g = 1 − a′² − d² = 1 − r²`.
#[derive(Debug, Clone, Copy)]
pub struct RestSlice {
    a_prime: f64,
    d_max_sq: f64,
}

impl RestSlice {
    pub fn new(a_prime: f64) -> Result<Self> {
        if !(a_prime > -1.0 && a_prime < 1.0) {
            return domain(format!("release abscissa must lie in (-1, 1), got {a_prime}"));
        }
        Ok(Self { a_prime, d_max_sq: 1.0 - a_prime * a_prime })
    }

    pub fn d_max(&self) -> f64 {
        self.d_max_sq.sqrt()
    }

    pub fn gap_of(&self, d: f64) -> f64 {
        let dm = self.d_max();
        (dm - d) * (dm + d)
    }

    fn d_sq(&self, gap: f64) -> f64 {
        self.d_max_sq - gap
    }

    pub fn conserved(&self, gap: f64) -> Conserved2 {
        let r = (1.0 - gap).sqrt();
        Conserved2::new(-1.0 / r - self.a_prime, self.a_prime / r - 0.5 * self.d_sq(gap))
    }

    /// With `r = √(1 − g)`: `ξ₁² = r + a′`, `ξ₂² = ξ₁² + 2g/r`, `η₁² = r − a′`,
    /// `η₂² = 2/r + ξ₁²`.
    pub fn ratio(&self, gap: f64) -> Result<f64> {
        if !(gap > 0.0 && gap < self.d_max_sq) {
            return domain(format!("gap {gap} outside (0, 1 - a'^2)"));
        }
        let ap = self.a_prime;
        let r = (1.0 - gap).sqrt();
        let d_sq = self.d_sq(gap);
        // each difference is formed from the larger-magnitude sum
        let (xi1, eta1) = if ap >= 0.0 {
            (r + ap, d_sq / (r + ap))
        } else {
            (d_sq / (r - ap), r - ap)
        };
        ratio_from_turning(xi1, 2.0 * gap / r, eta1, 2.0 / r + xi1)
    }

    pub fn ratio_at_d(&self, d: f64) -> Result<f64> {
        self.ratio(self.gap_of(d))
    }
}

/// Value of the d → 0 end of the release slice, taken at this `d`.
pub const REST_LIMIT_D: f64 = 1e-7;

/// Smallest `k ≥ 1` with `2k` above the ratio of a release at `d = 10⁻⁷`.
pub fn min_rest_family_index(a_prime: f64) -> Result<u32> {
    let slice = RestSlice::new(a_prime)?;
    Ok(first_index_above(slice.ratio_at_d(REST_LIMIT_D)?, 0))
}

pub fn find_family_a(a: f64, k: u32) -> Result<FamilySolution> {
    find_axis_family(a, k, FamilyKind::A)
}

pub fn find_family_b(a: f64, k: u32) -> Result<FamilySolution> {
    find_axis_family(a, k, FamilyKind::B)
}

fn find_axis_family(a: f64, k: u32, kind: FamilyKind) -> Result<FamilySolution> {
    let slice = AxisLaunchSlice::new(a)?;
    let kp = min_family_index(a)?;
    if k < kp {
        return Err(StarkError::NoSolution(format!(
            "k = {k} is below k_p = {kp} for a = {a}; admissible ratios are ({:.6}, inf)",
            alpha(a)?
        )));
    }
    let target = kind.ratio_target(k);
    let bs = slice.b_star();
    let gap_small_b = slice.gap_of(1e-9 * bs);
    let gap = solve_gap(|g| slice.ratio(g), f64::from(target), gap_small_b)?;
    let b = (slice.b_star_sq - gap).sqrt();
    Ok(FamilySolution {
        kind,
        k,
        anchor: a,
        root: b,
        gap,
        cq: slice.conserved(gap),
        ratio_target: target,
        ratio: slice.ratio(gap)?,
    })
}

/// Solves the release families; `kind` must be `ARest` or `BRest`.
pub fn find_family_rest(a_prime: f64, k: u32, kind: FamilyKind) -> Result<FamilySolution> {
    if !kind.is_rest() {
        return domain("find_family_rest needs a rest-family kind");
    }
    let slice = RestSlice::new(a_prime)?;
    let kb = min_rest_family_index(a_prime)?;
    if k < kb {
        return Err(StarkError::NoSolution(format!(
            "k = {k} is below k_b = {kb} for a' = {a_prime}; admissible ratios are ({:.6}, inf)",
            slice.ratio_at_d(REST_LIMIT_D)?
        )));
    }
    let target = kind.ratio_target(k);
    let gap = solve_gap(|g| slice.ratio(g), f64::from(target), slice.gap_of(REST_LIMIT_D))?;
    Ok(FamilySolution {
        kind,
        k,
        anchor: a_prime,
        root: slice.d_sq(gap).sqrt(),
        gap,
        cq: slice.conserved(gap),
        ratio_target: target,
        ratio: slice.ratio(gap)?,
    })
}

/// Finds `g` in `(0, g_far)` with `ratio(g) = target`, where the ratio
/// decreases in `g` and diverges as `g → 0`. Works in `x = −ln g`.
fn solve_gap<F: Fn(f64) -> Result<f64>>(ratio: F, target: f64, g_far: f64) -> Result<f64> {
    let f = |x: f64| -> Result<f64> { Ok(ratio((-x).exp())? - target) };
    let x_lo = -g_far.ln();
    let f_lo = f(x_lo)?;
    if f_lo >= 0.0 {
        return Err(StarkError::NoSolution(format!(
            "target ratio {target} is not above the slice minimum {:.6}",
            f_lo + target
        )));
    }
    let mut x_hi = x_lo + 1.0;
    let mut f_hi = f(x_hi)?;
    while f_hi <= 0.0 {
        x_hi += 2.0;
        if x_hi > 700.0 {
            return Err(StarkError::NoSolution(format!("no bracket for target ratio {target}")));
        }
        f_hi = f(x_hi)?;
    }
    let x = monotone_root(f, x_lo, x_hi, f_lo, f_hi)?;
    Ok((-x).exp())
}

/// `c₀ = min(−1 + h²/2, 1)`, the upper end of the torus range at energy `h`.
pub fn c_max(h: f64) -> Result<f64> {
    if !(h < 0.0) {
        return domain(format!("c_max needs h < 0, got {h}"));
    }
    Ok((-1.0 + 0.5 * h * h).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum UpperLimit {
    Finite(f64),
    Divergent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioLimits {
    /// `lim_{c → −1} T_ξ/T_η`.
    pub lower: f64,
    /// `lim_{c → c₀} T_ξ/T_η`.
    pub upper: UpperLimit,
}

/// End values of the ratio over the torus range `c ∈ (−1, c₀)` at energy `h`.
pub fn ratio_limits_fixed_energy(h: f64) -> Result<RatioLimits> {
    if !(h < 0.0) {
        return domain(format!("ratio limits need h < 0, got {h}"));
    }
    let q = (h * h + 4.0).sqrt();
    let lower = (1.0 + 4.0 / (h * h)).powf(0.25) * complete_k(0.0)? / complete_k((h + q) / (2.0 * q))?;
    let upper = if h >= -2.0 {
        UpperLimit::Divergent
    } else {
        let p = -h + (h * h - 4.0).sqrt();
        UpperLimit::Finite((-2.0 * h / p).sqrt() * complete_k(4.0 / (p * p))? / complete_k(0.0)?)
    };
    Ok(RatioLimits { lower, upper })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planar::{conserved_from_axis_launch, conserved_from_rest, period_eta, period_xi};
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn brake_parameters() {
        let p = brake_orbit_params(0.5).unwrap();
        assert!((p.b_star - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!((p.h, p.c), (-1.0, -0.5));
        let p = brake_orbit_params(0.2).unwrap();
        assert!((p.b_star - 9.6f64.sqrt()).abs() < 1e-15);
        assert!((p.h + 0.4).abs() < 1e-15 && (p.c + 0.92).abs() < 1e-15);
        assert!((p.h * p.h - 2.0 * (p.c + 1.0)).abs() < 1e-12);
        assert!(brake_orbit_params(1.0).is_err());
        assert!(brake_orbit_params(0.0).is_err());
        let p = brake_orbit_params(1.0 - 1e-12).unwrap();
        assert!(p.b_star < 1e-5 && (p.c - 1.0).abs() < 1e-11);
    }

    #[test]
    fn phi_values() {
        let s2 = 2f64.sqrt();
        assert!((phi_fn(0.0).unwrap() - std::f64::consts::PI / (2.0 * s2)).abs() < 1e-15);
        assert!(phi_fn(-1.0).unwrap() < phi_fn(0.5).unwrap());
        let s = 0.1f64.sqrt();
        let direct = complete_k((1.0 - s) / (1.0 + s)).unwrap() / (1.0 + s).sqrt();
        assert!((phi_fn(0.9).unwrap() - direct).abs() < 1e-12);
        assert!(phi_fn(1.0).is_err());
    }

    #[test]
    fn phi_form_matches_period_quotient() {
        for (h, c) in [(-2.0, 0.5), (-3.0, -0.9), (-1.5, 0.1), (-0.5, -0.95), (-6.0, 0.99)] {
            let cq = Conserved2::new(h, c);
            let direct = period_xi(&cq).unwrap() / period_eta(&cq).unwrap();
            assert!(rel(period_ratio(&cq).unwrap(), direct) < 1e-10, "({h}, {c})");
            // absolute periods too
            let scale = 4.0 / h.abs().sqrt();
            let h2 = h * h;
            assert!(rel(scale * phi_fn((2.0 * c + 2.0) / h2).unwrap(), period_xi(&cq).unwrap()) < 1e-12);
            assert!(rel(scale * phi_fn((2.0 * c - 2.0) / h2).unwrap(), period_eta(&cq).unwrap()) < 1e-12);
        }
        assert!(period_ratio(&Conserved2::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn slices_agree_with_generic_ratio_away_from_the_brake_end() {
        let slice = AxisLaunchSlice::new(0.5).unwrap();
        for b in [0.1, 0.7, 1.2, 1.6] {
            let cq = conserved_from_axis_launch(0.5, b).unwrap();
            assert!(rel(slice.ratio_at_b(b).unwrap(), period_ratio(&cq).unwrap()) < 1e-12);
        }
        for ap in [-0.7, 0.0, 0.4] {
            let slice = RestSlice::new(ap).unwrap();
            let dm = slice.d_max();
            for frac in [0.1, 0.5, 0.9] {
                let cq = conserved_from_rest(ap, frac * dm).unwrap();
                assert!(rel(slice.ratio_at_d(frac * dm).unwrap(), period_ratio(&cq).unwrap()) < 1e-11);
                let g = slice.gap_of(frac * dm);
                let sc = slice.conserved(g);
                assert!((sc.h - cq.h).abs() < 1e-13 && (sc.c - cq.c).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn alpha_values_and_small_b_limit() {
        let want = 1.25f64.sqrt() * complete_k(0.25).unwrap() / std::f64::consts::FRAC_PI_2;
        assert!((alpha(0.5).unwrap() - want).abs() < 1e-15);
        assert!((alpha(0.5).unwrap() - 1.2).abs() < 5e-3);
        let cq = conserved_from_axis_launch(0.5, 1e-5).unwrap();
        assert!(rel(period_ratio(&cq).unwrap(), alpha(0.5).unwrap()) < 1e-4);
        assert!((alpha(1e-8).unwrap() - 1.0).abs() < 1e-12);
        assert!(alpha(0.999_999).unwrap() > 5.0);
    }

    #[test]
    fn family_index() {
        for i in 1..=17 {
            let a = 0.05 * i as f64;
            assert_eq!(min_family_index(a).unwrap(), 1, "a = {a}");
        }
        assert_eq!(min_family_index(0.99).unwrap(), 2);
        assert!(min_family_index(1.0 - 1e-12).unwrap() > 3);
        assert_eq!(min_rest_family_index(0.0).unwrap(), 1);
    }

    #[test]
    fn axis_families_interleave() {
        let mut prev = 0.0;
        for k in 1..=6 {
            let a_k = find_family_a(0.5, k).unwrap();
            let b_k = find_family_b(0.5, k).unwrap();
            assert!(a_k.residual().abs() < 1e-10, "{a_k:?}");
            assert!(b_k.residual().abs() < 1e-10, "{b_k:?}");
            assert!(prev < a_k.root && a_k.root < b_k.root);
            assert!(a_k.gap > b_k.gap);
            prev = b_k.root;
        }
        assert!((prev - 3f64.sqrt()).abs() < 1e-8);
        let a1 = find_family_a(0.5, 1).unwrap();
        assert!((a1.root - 1.7039116506395934).abs() < 1e-12);
        assert!(matches!(find_family_a(0.99, 1), Err(StarkError::NoSolution(_))));
    }

    #[test]
    fn rest_families_interleave() {
        for ap in [0.0, 0.5, -0.5] {
            let mut prev = 0.0;
            let kb = min_rest_family_index(ap).unwrap();
            for k in kb..kb + 4 {
                let a_k = find_family_rest(ap, k, FamilyKind::ARest).unwrap();
                let b_k = find_family_rest(ap, k, FamilyKind::BRest).unwrap();
                assert!(a_k.residual().abs() < 1e-10);
                assert!(b_k.residual().abs() < 1e-10);
                assert!(prev < a_k.root && a_k.root < b_k.root, "{ap} {k}");
                prev = b_k.root;
            }
        }
        assert!(find_family_rest(0.0, 1, FamilyKind::A).is_err());
    }

    #[test]
    fn c_max_values() {
        assert_eq!(c_max(-2.0).unwrap(), 1.0);
        assert_eq!(c_max(-1.0).unwrap(), -0.5);
        assert_eq!(c_max(-3.0).unwrap(), 1.0);
        assert!(c_max(0.0).is_err());
    }

    #[test]
    fn ratio_limits() {
        let lim = ratio_limits_fixed_energy(-3.0).unwrap();
        let near = period_ratio(&Conserved2::new(-3.0, -1.0 + 1e-8)).unwrap();
        assert!((near - lim.lower).abs() < 1e-4);
        assert_eq!(ratio_limits_fixed_energy(-1.0).unwrap().upper, UpperLimit::Divergent);
        assert_eq!(ratio_limits_fixed_energy(-2.0).unwrap().upper, UpperLimit::Divergent);
        let UpperLimit::Finite(up) = lim.upper else { panic!("finite upper limit expected") };
        let near = period_ratio(&Conserved2::new(-3.0, 1.0 - 1e-9)).unwrap();
        assert!((near - up).abs() < 1e-4);
        for h in [-1.0, -2.0, -3.0, -5.0] {
            assert!(ratio_limits_fixed_energy(h).unwrap().lower > 1.0);
        }
    }

    proptest! {
        #[test]
        fn ratio_increases_along_axis_slice(a in 0.05f64..0.95, u in 0.01f64..0.98, w in 0.001f64..0.5) {
            let slice = AxisLaunchSlice::new(a).unwrap();
            let bs = slice.b_star();
            let b1 = u * bs;
            let b2 = b1 + w * (bs - b1);
            prop_assert!(slice.ratio_at_b(b1).unwrap() < slice.ratio_at_b(b2).unwrap());
        }

        #[test]
        fn ratio_increases_along_rest_slice(ap in -0.9f64..0.9, u in 0.01f64..0.98, w in 0.001f64..0.5) {
            let slice = RestSlice::new(ap).unwrap();
            let dm = slice.d_max();
            let d1 = u * dm;
            let d2 = d1 + w * (dm - d1);
            prop_assert!(slice.ratio_at_d(d1).unwrap() < slice.ratio_at_d(d2).unwrap());
        }
    }
}
