//! CHSH violation of Choi-Jamiołkowski states.
//!
//! A two-qubit state violates CHSH iff the two largest eigenvalues of `TᵀT`
//! sum to more than 1, where `T_jk = Tr(ρ σ_j ⊗ σ_k)`. For the Choi state of
//! the canonical map these eigenvalues are the squared channel eigenvalues,
//! independent of the translation vector.
//!
//! Two verdicts are reported side by side and never merged:
//!
//! * `ch1` / `ch2`: the channel-level conditions
//!   ```text
//!   CH1:  |λ1+λ2| + |λ1−λ2| < 2√(1−λ3²)   and  (|λ1+λ2| − |λ1−λ2|)² ≤ 4λ3²
//!   CH2:  |λ1+λ2| < 2                     and  (|λ1+λ2| − |λ1−λ2|)² > 4λ3²
//!   ```
//!   whose disjunction is what "nonlocality generating" means for the family
//!   ranges in [`crate::families`];
//! * `breaks_chsh_direct`: the Horodecki criterion `M > 1` on the Choi state.
//!
//! The two disagree on large regions (the identity channel violates CHSH
//! maximally yet satisfies neither condition).

use serde::{Deserialize, Serialize};

use crate::channel::{QubitChannel, XState};
use crate::error::{Error, Result};
use crate::numerics::{symmetric_eigenvalues3, Complex64, ComplexMatrix, HERMITIAN_TOL, PAULI};

/// Agreement required between closed-form and Jacobi s-values in [`classify`].
pub const ORACLE_TOL: f64 = 1e-10;

/// Trace tolerance for [`correlation_matrix_generic`].
pub const TRACE_TOL: f64 = 1e-10;

/// Pauli correlation matrix `T_jk = Tr(ρ σ_j ⊗ σ_k)`, `j, k = 1..3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationMatrix(pub [[f64; 3]; 3]);

impl CorrelationMatrix {
    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.0
    }

    /// `TᵀT` (T is real).
    pub fn gram(&self) -> [[f64; 3]; 3] {
        let t = &self.0;
        let mut g = [[0.0; 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            for (j, gij) in row.iter_mut().enumerate() {
                *gij = (0..3).map(|k| t[k][i] * t[k][j]).sum();
            }
        }
        g
    }

    /// Eigenvalues of `TᵀT` by Jacobi iteration, descending.
    pub fn gram_eigenvalues(&self) -> Result<[f64; 3]> {
        symmetric_eigenvalues3(&self.gram())
    }

    pub fn max_abs_diff(&self, other: &CorrelationMatrix) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Eigenvalues of `TᵀT`, labelled so that `s1` is the `σ_3 ⊗ σ_3` direction
/// and `s3 ≥ s2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SValues {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

impl SValues {
    /// The three values in descending order.
    pub fn sorted(&self) -> [f64; 3] {
        let mut v = [self.s1, self.s2, self.s3];
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    /// Largest elementwise gap between the sorted triples.
    pub fn max_sorted_diff(&self, other: &[f64; 3]) -> f64 {
        self.sorted()
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Horodecki quantity `M = max{s1+s2, s2+s3, s3+s1}`, the optimal CHSH value
/// `S = 2√M`, and whether `M > 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Horodecki {
    pub m: f64,
    pub s: f64,
    pub breaks: bool,
}

/// Verdicts of the two channel-level conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChshConditions {
    pub ch1: bool,
    pub ch2: bool,
}

impl ChshConditions {
    pub fn generating(&self) -> bool {
        self.ch1 || self.ch2
    }
}

/// Per-channel verdict bundle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub cp: bool,
    pub ch1: bool,
    pub ch2: bool,
    pub paper_generating: bool,
    pub horodecki_m: f64,
    pub chsh_s: f64,
    pub breaks_chsh_direct: bool,
}

impl Classification {
    /// CP channel on which the CH1/CH2 verdict and direct CHSH violation differ.
    pub fn is_discrepant(&self) -> bool {
        self.cp && self.paper_generating != self.breaks_chsh_direct
    }
}

/// Closed-form `T` of an X state.
pub fn correlation_matrix_xstate(x: &XState) -> CorrelationMatrix {
    let (w, z) = (x.w, x.z);
    let i = Complex64::new(0.0, 1.0);
    let t11 = w + w.conj() + z + z.conj();
    let t12 = i * (w - w.conj() - z + z.conj());
    let t21 = -i * (-w + w.conj() - z + z.conj());
    let t22 = -w - w.conj() + z + z.conj();
    CorrelationMatrix([
        [t11.re, t12.re, 0.0],
        [t21.re, t22.re, 0.0],
        [0.0, 0.0, x.a - x.b - x.c + x.d],
    ])
}

fn pauli_correlations(rho: &[[Complex64; 4]; 4]) -> [[f64; 3]; 3] {
    let mut t = [[0.0; 3]; 3];
    for (j, row) in t.iter_mut().enumerate() {
        let sj = &PAULI[j + 1];
        for (k, tjk) in row.iter_mut().enumerate() {
            let sk = &PAULI[k + 1];
            // Tr(ρ A) = Σ_ab ρ_ab A_ba with A = σ_j ⊗ σ_k
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..4 {
                for b in 0..4 {
                    let op = sj[b / 2][a / 2] * sk[b % 2][a % 2];
                    if op.re != 0.0 || op.im != 0.0 {
                        acc += rho[a][b] * op;
                    }
                }
            }
            *tjk = acc.re;
        }
    }
    t
}

/// `T` from numerically evaluated Pauli traces of any two-qubit state.
pub fn correlation_matrix_generic(rho: &ComplexMatrix) -> Result<CorrelationMatrix> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "two-qubit state must be 4x4, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    let defect = rho.hermiticity_defect()?;
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let tr = rho.trace()?;
    if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
        return Err(Error::InvalidState(format!("trace {tr} is not 1")));
    }
    let mut entries = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (a, row) in entries.iter_mut().enumerate() {
        for (b, e) in row.iter_mut().enumerate() {
            *e = rho[(a, b)];
        }
    }
    Ok(CorrelationMatrix(pauli_correlations(&entries)))
}

/// `s1 = (a−b−c+d)²`, `s2 = 4(|w|−|z|)²`, `s3 = 4(|w|+|z|)²`.
pub fn s_values_closed_form(x: &XState) -> SValues {
    let diag = x.a - x.b - x.c + x.d;
    let (w, z) = (x.w.norm(), x.z.norm());
    SValues {
        s1: diag * diag,
        s2: 4.0 * (w - z) * (w - z),
        s3: 4.0 * (w + z) * (w + z),
    }
}

/// s-values of the Choi state of `ch`; the translation vector never enters.
pub fn s_values_channel(ch: &QubitChannel) -> SValues {
    let [l1, l2, l3] = ch.lambda();
    let plus = (l1 + l2).abs();
    let minus = (l1 - l2).abs();
    SValues {
        s1: l3 * l3,
        s2: 0.25 * (plus - minus) * (plus - minus),
        s3: 0.25 * (plus + minus) * (plus + minus),
    }
}

pub fn horodecki(sv: &SValues) -> Horodecki {
    let m = (sv.s1 + sv.s2).max(sv.s2 + sv.s3).max(sv.s3 + sv.s1);
    Horodecki {
        m,
        s: 2.0 * m.sqrt(),
        breaks: m > 1.0,
    }
}

/// CH1 / CH2 with the printed strictness. Uses the identities
/// `|x+y| + |x−y| = 2 max(|x|,|y|)` and `||x+y| − |x−y|| = 2 min(|x|,|y|)`
/// so that boundary families (e.g. dephasing along x) do not pick up
/// rounding noise.
pub fn paper_conditions(ch: &QubitChannel) -> ChshConditions {
    let [l1, l2, l3] = ch.lambda();
    let hi = l1.abs().max(l2.abs());
    let lo = l1.abs().min(l2.abs());
    let ch1 = hi * hi < 1.0 - l3 * l3 && lo <= l3.abs();
    let ch2 = (l1 + l2).abs() < 2.0 && lo > l3.abs();
    ChshConditions { ch1, ch2 }
}

/// Full verdict for one channel. The closed-form s-values are cross-checked
/// against Jacobi eigenvalues of `TᵀT` built from the Choi matrix.
pub fn classify(ch: &QubitChannel) -> Result<Classification> {
    let cp = ch.complete_positivity()?;
    let conditions = paper_conditions(ch);
    let sv = s_values_channel(ch);

    let t = CorrelationMatrix(pauli_correlations(ch.choi().entries()));
    let numeric = t.gram_eigenvalues()?;
    let gap = sv.max_sorted_diff(&numeric);
    if gap > ORACLE_TOL || gap.is_nan() {
        return Err(Error::InternalConsistency(format!(
            "closed-form s-values {:?} disagree with Jacobi {numeric:?} by {gap:e} for {ch:?}",
            sv.sorted()
        )));
    }

    let h = horodecki(&sv);
    Ok(Classification {
        cp,
        ch1: conditions.ch1,
        ch2: conditions.ch2,
        paper_generating: conditions.generating(),
        horodecki_m: h.m,
        chsh_s: h.s,
        breaks_chsh_direct: h.breaks,
    })
}
