//! The canonical qubit map
//!
//! ```text
//! Λ[X] = ½ [ (I + t·σ) Tr X + Σ_k λ_k σ_k Tr(X σ_k) ]
//! ```
//!
//! with eigenvalues `λ_k` on the Pauli directions and translation `t`. On Bloch
//! vectors it acts as `r_k -> λ_k r_k + t_k`. Its Choi matrix is an X state
//! exactly when `t_1 = t_2 = 0`, and the identification with the X-state
//! entries is what lets CHSH conditions be phrased in channel parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{is_psd, pauli, Complex64, ComplexMatrix, PAULI, PSD_TOL};

/// Absolute slack on the complete-positivity inequalities. The CP set is
/// closed; this keeps boundary channels (e.g. amplitude damping, two-Pauli)
/// inside it after floating-point rounding of their parametrizations.
pub const CP_SLACK: f64 = 1e-12;

/// Tolerance on state-level invariants (unit trace, X-state positivity).
pub const STATE_TOL: f64 = 1e-12;

/// Tolerance used when inverting an X state back to a channel.
pub const INVERSION_TOL: f64 = 1e-10;

/// Canonical trace-preserving qubit map with eigenvalues `lambda` and
/// translation vector `t`. Complete positivity is not enforced.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChannelRepr", into = "ChannelRepr")]
pub struct QubitChannel {
    lambda: [f64; 3],
    t: [f64; 3],
}

#[derive(Serialize, Deserialize)]
struct ChannelRepr {
    lambda: [f64; 3],
    #[serde(default)]
    t: [f64; 3],
}

impl TryFrom<ChannelRepr> for QubitChannel {
    type Error = Error;

    fn try_from(r: ChannelRepr) -> Result<Self> {
        QubitChannel::new(r.lambda, r.t)
    }
}

impl From<QubitChannel> for ChannelRepr {
    fn from(ch: QubitChannel) -> Self {
        ChannelRepr {
            lambda: ch.lambda,
            t: ch.t,
        }
    }
}

impl QubitChannel {
    pub fn new(lambda: [f64; 3], t: [f64; 3]) -> Result<Self> {
        if lambda.iter().chain(&t).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("channel parameters must be finite".into()));
        }
        if let Some(k) = lambda.iter().position(|l| l.abs() > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "|lambda_{}| = {} exceeds 1",
                k + 1,
                lambda[k].abs()
            )));
        }
        Ok(Self { lambda, t })
    }

    /// Unital channel (`t = 0`).
    pub fn unital(lambda: [f64; 3]) -> Result<Self> {
        Self::new(lambda, [0.0; 3])
    }

    /// Channel with `t_1 = t_2 = 0`, the slice whose Choi matrix is an X state.
    pub fn diagonal(lambda: [f64; 3], t3: f64) -> Result<Self> {
        Self::new(lambda, [0.0, 0.0, t3])
    }

    pub fn identity() -> Self {
        Self {
            lambda: [1.0; 3],
            t: [0.0; 3],
        }
    }

    pub fn lambda(&self) -> [f64; 3] {
        self.lambda
    }

    pub fn t(&self) -> [f64; 3] {
        self.t
    }

    pub fn is_unital(&self) -> bool {
        self.t == [0.0; 3]
    }

    /// Whether the Choi matrix has X-state form.
    pub fn has_x_form(&self) -> bool {
        self.t[0] == 0.0 && self.t[1] == 0.0
    }

    fn require_x_form(&self, what: &str) -> Result<()> {
        if self.has_x_form() {
            Ok(())
        } else {
            Err(Error::UnsupportedRegion(format!(
                "{what} needs t1 = t2 = 0 (got t1 = {}, t2 = {}); use the numeric Choi PSD check instead",
                self.t[0], self.t[1]
            )))
        }
    }

    /// Affine action on a Bloch vector.
    pub fn apply(&self, x: &BlochState) -> BlochState {
        let mut r = [0.0; 3];
        for (k, rk) in r.iter_mut().enumerate() {
            *rk = self.lambda[k] * x.r[k] + self.t[k];
        }
        BlochState { r }
    }

    /// Action on an arbitrary 2x2 operator, evaluated from the operator form
    /// of the map rather than the Bloch affine action.
    pub fn apply_matrix(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if x.rows() != 2 || x.cols() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "qubit map acts on 2x2 operators, got {}x{}",
                x.rows(),
                x.cols()
            )));
        }
        let tr = x.trace()?;
        let mut out = pauli(0).scale(tr);
        for k in 1..=3 {
            let sigma = pauli(k);
            let overlap = x.matmul(&sigma)?.trace()?;
            let coeff = tr * self.t[k - 1] + overlap * self.lambda[k - 1];
            out = out.add(&sigma.scale(coeff))?;
        }
        Ok(out.scale(Complex64::new(0.5, 0.0)))
    }

    /// Fixed point `X_* = Λ[X_*]`. The flag is false when some axis has
    /// `λ_k = 1, t_k = 0`, in which case that component is free and reported
    /// as 0.
    pub fn stationary_state(&self) -> Result<(BlochState, bool)> {
        let mut r = [0.0; 3];
        let mut unique = true;
        for (k, rk) in r.iter_mut().enumerate() {
            if self.lambda[k] == 1.0 {
                if self.t[k] != 0.0 {
                    return Err(Error::NoStationaryState {
                        axis: k + 1,
                        t: self.t[k],
                    });
                }
                unique = false;
            } else {
                *rk = self.t[k] / (1.0 - self.lambda[k]);
            }
        }
        Ok((BlochState { r }, unique))
    }

    /// Closed-form complete positivity on the `t_1 = t_2 = 0` slice:
    /// `(1 ± λ_3)² - t_3² ≥ (λ_1 ± λ_2)²`, i.e. the square of
    /// `√((1±λ_3)² - t_3²) ≥ |λ_1 ± λ_2|`.
    pub fn is_completely_positive(&self) -> Result<bool> {
        self.require_x_form("closed-form complete positivity")?;
        let [l1, l2, l3] = self.lambda;
        let t3 = self.t[2];
        let plus = (1.0 + l3) * (1.0 + l3) - t3 * t3 >= (l1 + l2) * (l1 + l2) - CP_SLACK;
        let minus = (1.0 - l3) * (1.0 - l3) - t3 * t3 >= (l1 - l2) * (l1 - l2) - CP_SLACK;
        Ok(plus && minus)
    }

    /// Complete positivity from the spectrum of the Choi matrix. Works for
    /// any translation vector.
    pub fn is_completely_positive_numeric(&self, tol: f64) -> Result<bool> {
        is_psd(&self.choi().to_matrix(), tol)
    }

    /// Closed-form verdict where available, numeric Choi PSD otherwise.
    pub fn complete_positivity(&self) -> Result<bool> {
        if self.has_x_form() {
            self.is_completely_positive()
        } else {
            self.is_completely_positive_numeric(PSD_TOL)
        }
    }

    /// Choi matrix `(1 ⊗ Λ)[P₊]` written out entry by entry.
    pub fn choi(&self) -> ChoiMatrix {
        let [l1, l2, l3] = self.lambda;
        let [t1, t2, t3] = self.t;
        let q = 0.25;
        let re = |x: f64| Complex64::new(q * x, 0.0);
        let tm = Complex64::new(q * t1, -q * t2);
        let tp = Complex64::new(q * t1, q * t2);
        let z = Complex64::new(0.0, 0.0);
        ChoiMatrix([
            [re(1.0 + l3 + t3), tm, z, re(l1 + l2)],
            [tp, re(1.0 - l3 - t3), re(l1 - l2), z],
            [z, re(l1 - l2), re(1.0 - l3 + t3), tm],
            [re(l1 + l2), z, tp, re(1.0 + l3 - t3)],
        ])
    }

    /// Choi matrix assembled by applying the map to each `|k⟩⟨l|` block of
    /// the maximally entangled state.
    pub fn choi_by_extension(&self) -> Result<ChoiMatrix> {
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
        for k in 0..2 {
            for l in 0..2 {
                let mut unit = ComplexMatrix::zeros(2, 2);
                unit[(k, l)] = Complex64::new(1.0, 0.0);
                let image = self.apply_matrix(&unit)?;
                for i in 0..2 {
                    for j in 0..2 {
                        out[2 * k + i][2 * l + j] = image[(i, j)] * 0.5;
                    }
                }
            }
        }
        Ok(ChoiMatrix(out))
    }

    /// X-state parameters of the Choi matrix.
    pub fn to_xstate(&self) -> Result<XState> {
        self.require_x_form("X-state identification")?;
        let [l1, l2, l3] = self.lambda;
        let t3 = self.t[2];
        Ok(XState {
            a: (1.0 + l3 + t3) / 4.0,
            b: (1.0 - l3 - t3) / 4.0,
            c: (1.0 - l3 + t3) / 4.0,
            d: (1.0 + l3 - t3) / 4.0,
            w: Complex64::new((l1 + l2) / 4.0, 0.0),
            z: Complex64::new((l1 - l2) / 4.0, 0.0),
        })
    }

    /// Inverse Choi-Jamiołkowski map restricted to X states with real
    /// coherences and the marginal forced by trace preservation.
    pub fn from_xstate(x: &XState) -> Result<Self> {
        if (x.a + x.b - 0.5).abs() > INVERSION_TOL || (x.c + x.d - 0.5).abs() > INVERSION_TOL {
            return Err(Error::UnsupportedRegion(format!(
                "a + b = {} and c + d = {} must both be 1/2 for a trace-preserving map",
                x.a + x.b,
                x.c + x.d
            )));
        }
        if x.w.im.abs() > INVERSION_TOL || x.z.im.abs() > INVERSION_TOL {
            return Err(Error::UnsupportedRegion(format!(
                "complex coherences w = {}, z = {} are not in the image of the canonical map",
                x.w, x.z
            )));
        }
        let lambda = [
            2.0 * (x.w.re + x.z.re),
            2.0 * (x.w.re - x.z.re),
            2.0 * (x.a + x.d) - 1.0,
        ];
        Self::diagonal(lambda, 2.0 * (x.a + x.c) - 1.0)
    }
}

/// Qubit state as a Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    r: [f64; 3],
}

impl BlochState {
    pub fn new(r: [f64; 3]) -> Result<Self> {
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm > 1.0 + STATE_TOL {
            return Err(Error::InvalidState(format!("Bloch vector norm {norm} exceeds 1")));
        }
        Ok(Self { r })
    }

    pub fn maximally_mixed() -> Self {
        Self { r: [0.0; 3] }
    }

    pub fn r(&self) -> [f64; 3] {
        self.r
    }

    pub fn norm(&self) -> f64 {
        self.r.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `½ (I + r·σ)`.
    pub fn density_matrix(&self) -> ComplexMatrix {
        let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (k, p) in PAULI.iter().enumerate() {
            let coeff = if k == 0 { 0.5 } else { 0.5 * self.r[k - 1] };
            for i in 0..2 {
                for j in 0..2 {
                    rho[i][j] += p[i][j] * coeff;
                }
            }
        }
        ComplexMatrix::from_array(rho)
    }

    /// Bloch vector `r_k = Tr(ρ σ_k)` of a 2x2 operator.
    pub fn from_density_matrix(rho: &ComplexMatrix) -> Result<Self> {
        let mut r = [0.0; 3];
        for (k, rk) in r.iter_mut().enumerate() {
            *rk = rho.matmul(&pauli(k + 1))?.trace()?.re;
        }
        Self::new(r)
    }
}

/// Choi matrix of a qubit channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChoiMatrix([[Complex64; 4]; 4]);

impl ChoiMatrix {
    pub fn entries(&self) -> &[[Complex64; 4]; 4] {
        &self.0
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_array(self.0)
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.0[i][i].re).sum()
    }

    pub fn max_abs_diff(&self, other: &ChoiMatrix) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Two-qubit X state
///
/// ```text
/// ⎡ a  0  0  w ⎤
/// ⎢ 0  b  z  0 ⎥
/// ⎢ 0  z* c  0 ⎥
/// ⎣ w* 0  0  d ⎦
/// ```
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct XState {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub w: Complex64,
    pub z: Complex64,
}

impl XState {
    /// Validated constructor.
    pub fn new(a: f64, b: f64, c: f64, d: f64, w: Complex64, z: Complex64) -> Result<Self> {
        let x = Self { a, b, c, d, w, z };
        x.validate()?;
        Ok(x)
    }

    pub fn maximally_mixed() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: 0.25,
            b: 0.25,
            c: 0.25,
            d: 0.25,
            w: zero,
            z: zero,
        }
    }

    /// Φ₊ = (|00⟩ + |11⟩)/√2.
    pub fn bell() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self {
            a: 0.5,
            b: 0.0,
            c: 0.0,
            d: 0.5,
            w: Complex64::new(0.5, 0.0),
            z: zero,
        }
    }

    /// Checks unit trace, non-negative populations and
    /// `√(ad) ≥ |w|`, `√(bc) ≥ |z|`.
    pub fn validate(&self) -> Result<()> {
        let pops = [self.a, self.b, self.c, self.d];
        if pops.iter().any(|p| !p.is_finite()) || !self.w.is_finite() || !self.z.is_finite() {
            return Err(Error::InvalidState("X-state entries must be finite".into()));
        }
        let sum: f64 = pops.iter().sum();
        if (sum - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("a + b + c + d = {sum}, expected 1")));
        }
        if pops.iter().any(|&p| p < -STATE_TOL) {
            return Err(Error::InvalidState(format!("negative population in {pops:?}")));
        }
        let outer = (self.a.max(0.0) * self.d.max(0.0)).sqrt();
        if outer < self.w.norm() - STATE_TOL {
            return Err(Error::InvalidState(format!("sqrt(ad) = {outer} < |w| = {}", self.w.norm())));
        }
        let inner = (self.b.max(0.0) * self.c.max(0.0)).sqrt();
        if inner < self.z.norm() - STATE_TOL {
            return Err(Error::InvalidState(format!("sqrt(bc) = {inner} < |z| = {}", self.z.norm())));
        }
        Ok(())
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_ok()
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let zero = Complex64::new(0.0, 0.0);
        let re = |x: f64| Complex64::new(x, 0.0);
        ComplexMatrix::from_array([
            [re(self.a), zero, zero, self.w],
            [zero, re(self.b), self.z, zero],
            [zero, self.z.conj(), re(self.c), zero],
            [self.w.conj(), zero, zero, re(self.d)],
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn rejects_eigenvalues_outside_unit_interval() {
        assert!(QubitChannel::unital([1.1, 0.0, 0.0]).is_err());
        assert!(QubitChannel::unital([0.0, f64::NAN, 0.0]).is_err());
        assert!(serde_json::from_str::<QubitChannel>(r#"{"lambda":[2,0,0],"t":[0,0,0]}"#).is_err());
    }

    #[test]
    fn json_round_trip_format() {
        let ch: QubitChannel = serde_json::from_str(r#"{"lambda":[1,1,1],"t":[0,0,0]}"#).unwrap();
        assert_eq!(ch, QubitChannel::identity());
        let s = serde_json::to_string(&QubitChannel::diagonal([0.5, 0.25, 0.0], 0.125).unwrap()).unwrap();
        assert_eq!(s, r#"{"lambda":[0.5,0.25,0.0],"t":[0.0,0.0,0.125]}"#);
    }

    #[test]
    fn apply_examples() {
        let r = BlochState::new([0.3, 0.0, 0.4]).unwrap();
        assert_eq!(QubitChannel::identity().apply(&r).r(), [0.3, 0.0, 0.4]);
        assert_eq!(QubitChannel::unital([0.0; 3]).unwrap().apply(&r).r(), [0.0; 3]);

        let ch = QubitChannel::diagonal([0.5; 3], 0.25).unwrap();
        let x = BlochState::new([1.0, 0.0, 0.0]).unwrap();
        let affine = ch.apply(&x);
        assert_eq!(affine.r(), [0.5, 0.0, 0.25]);
        let via_matrix = BlochState::from_density_matrix(&ch.apply_matrix(&x.density_matrix()).unwrap()).unwrap();
        assert!(close(&affine.r(), &via_matrix.r(), 1e-15));
    }

    #[test]
    fn stationary_state_examples() {
        let (x, unique) = QubitChannel::unital([0.5; 3]).unwrap().stationary_state().unwrap();
        assert_eq!((x.r(), unique), ([0.0; 3], true));

        let ch = QubitChannel::diagonal([0.5, 0.5, 0.5], 0.25).unwrap();
        let (x, unique) = ch.stationary_state().unwrap();
        assert_eq!((x.r(), unique), ([0.0, 0.0, 0.5], true));
        assert!(close(&ch.apply(&x).r(), &x.r(), 1e-15));

        // pure stationary state |0><0|
        let (x, _) = QubitChannel::diagonal([0.0, 0.0, 0.5], 0.5).unwrap().stationary_state().unwrap();
        assert_eq!(x.r()[2], 1.0);

        let (x, unique) = QubitChannel::identity().stationary_state().unwrap();
        assert_eq!((x.r(), unique), ([0.0; 3], false));

        let err = QubitChannel::diagonal([0.0, 0.0, 1.0], 0.2).unwrap().stationary_state();
        assert!(matches!(err, Err(Error::NoStationaryState { axis: 3, .. })));
    }

    #[test]
    fn complete_positivity_examples() {
        assert!(QubitChannel::identity().is_completely_positive().unwrap());
        assert!(!QubitChannel::unital([1.0, 1.0, -1.0]).unwrap().is_completely_positive().unwrap());
        assert!(QubitChannel::diagonal([0.8, 0.0, 0.0], 0.5).unwrap().is_completely_positive().unwrap());
        // negative radicand
        assert!(!QubitChannel::diagonal([0.0, 0.0, 0.5], 0.8).unwrap().is_completely_positive().unwrap());
        let err = QubitChannel::new([0.1; 3], [0.1, 0.0, 0.0]).unwrap().is_completely_positive();
        assert!(matches!(err, Err(Error::UnsupportedRegion(_))));
    }

    #[test]
    fn choi_examples() {
        let id = QubitChannel::identity().choi().to_matrix();
        let mut expected = ComplexMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            expected[(i, j)] = Complex64::new(0.5, 0.0);
        }
        assert_eq!(id, expected);

        let zero = QubitChannel::unital([0.0; 3]).unwrap().choi().to_matrix();
        assert_eq!(zero, ComplexMatrix::identity(4).scale(Complex64::new(0.25, 0.0)));

        let half = QubitChannel::unital([0.5; 3]).unwrap();
        let m = half.choi().to_matrix();
        assert_eq!(m[(0, 0)].re, 0.375);
        assert_eq!(m[(3, 3)].re, 0.375);
        assert_eq!(m[(1, 1)].re, 0.125);
        assert_eq!(m[(2, 2)].re, 0.125);
        assert_eq!(m[(0, 3)].re, 0.25);
        assert_eq!(m[(1, 2)].re, 0.0);
        assert!(is_psd(&m, PSD_TOL).unwrap());
    }

    #[test]
    fn choi_matches_extension_with_full_translation() {
        let ch = QubitChannel::new([0.5, 0.3, 0.1], [0.1, 0.2, 0.3]).unwrap();
        let d = ch.choi().max_abs_diff(&ch.choi_by_extension().unwrap());
        assert!(d < 1e-15, "{d}");
        assert!((ch.choi().trace() - 1.0).abs() < 1e-15);
        assert!(ch.choi().to_matrix().is_hermitian(1e-15));
    }

    #[test]
    fn xstate_identification() {
        let x = QubitChannel::identity().to_xstate().unwrap();
        assert_eq!(x, XState::bell());

        let x = QubitChannel::diagonal([0.6, 0.2, 0.4], 0.2).unwrap().to_xstate().unwrap();
        let got = [x.a, x.b, x.c, x.d, x.w.re, x.z.re];
        assert!(close(&got, &[0.4, 0.1, 0.2, 0.3, 0.2, 0.1], 1e-15), "{got:?}");

        let x = QubitChannel::unital([0.0; 3]).unwrap().to_xstate().unwrap();
        assert_eq!(x, XState::maximally_mixed());

        assert!(QubitChannel::new([0.1; 3], [0.0, 0.1, 0.0]).unwrap().to_xstate().is_err());
    }

    #[test]
    fn xstate_matrix_matches_choi() {
        let ch = QubitChannel::diagonal([0.6, -0.2, 0.4], -0.3).unwrap();
        let diff = ch.to_xstate().unwrap().to_matrix().max_abs_diff(&ch.choi().to_matrix()).unwrap();
        assert!(diff < 1e-16);
    }

    #[test]
    fn channel_from_xstate_examples() {
        let ch = QubitChannel::from_xstate(&XState::bell()).unwrap();
        assert_eq!(ch, QubitChannel::identity());

        let ch = QubitChannel::from_xstate(&XState::maximally_mixed()).unwrap();
        assert_eq!((ch.lambda(), ch.t()), ([0.0; 3], [0.0; 3]));

        let zero = Complex64::new(0.0, 0.0);
        let x = XState::new(0.4, 0.1, 0.2, 0.3, Complex64::new(0.2, 0.0), Complex64::new(0.1, 0.0)).unwrap();
        let ch = QubitChannel::from_xstate(&x).unwrap();
        assert!(close(&ch.lambda(), &[0.6, 0.2, 0.4], 1e-15));
        assert!(close(&ch.t(), &[0.0, 0.0, 0.2], 1e-15));

        let unbalanced = XState::new(0.5, 0.2, 0.2, 0.1, zero, zero).unwrap();
        assert!(QubitChannel::from_xstate(&unbalanced).is_err());
        let complex = XState::new(0.25, 0.25, 0.25, 0.25, Complex64::new(0.0, 0.1), zero).unwrap();
        assert!(QubitChannel::from_xstate(&complex).is_err());
    }

    #[test]
    fn xstate_validation() {
        let zero = Complex64::new(0.0, 0.0);
        assert!(XState::new(0.5, 0.0, 0.0, 0.5, Complex64::new(0.6, 0.0), zero).is_err());
        assert!(XState::new(0.5, 0.5, 0.5, 0.5, zero, zero).is_err());
        assert!(XState::new(0.5, 0.0, 0.0, 0.5, Complex64::new(0.0, 0.5), zero).is_ok());
    }
}
