//! Named qubit channel families and their closed-form nonlocality ranges.
//!
//! Unital (Pauli) families:
//!
//! | family        | eigenvalues                    | domain          | generating        |
//! |---------------|--------------------------------|-----------------|-------------------|
//! | linear        | `λ` on one axis, 0 elsewhere   | `|λ| ≤ 1`       | `|λ| < 1`         |
//! | dephasing     | `1` on one axis, `λ` elsewhere | `|λ| ≤ 1`       | never             |
//! | depolarizing  | `(λ, λ, λ)`                    | `-1/3 ≤ λ ≤ 1`  | `λ < 1/√2`        |
//! | two-Pauli     | `(λ, λ, 2λ-1)`                 | `0 ≤ λ ≤ 1`     | `0 < λ < 1`       |
//!
//! Phase-covariant families (`λ1 = λ2`, translation along z):
//!
//! | family                | eigenvalues      | `t3`        | generating  |
//! |-----------------------|------------------|-------------|-------------|
//! | generalized ampl. dmp | `(λ, λ, λ²)`     | `p(1-λ²)`   | `|λ| < 1`   |
//! | shifted depolarizing  | `(λ, λ, λ)`      | `p(1-λ)`    | `λ < 1/√2`  |
//!
//! "Generating" here is CH1 ∨ CH2 from [`crate::nonlocality::paper_conditions`].
//! The depolarizing endpoint `λ = 1/√2` is excluded because CH1 is strict.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{QubitChannel, CP_SLACK};
use crate::error::{Error, Result};
use crate::grid::linspace;
use crate::nonlocality::paper_conditions;

/// Values of `p` used for the thermal-parameter grids.
pub const P_VALUES: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// Pauli channel mixing weights `p_α` for `σ_α ρ σ_α`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PauliProbabilities([f64; 4]);

impl PauliProbabilities {
    pub fn new(p: [f64; 4]) -> Result<Self> {
        if p.iter().any(|x| !x.is_finite() || *x < 0.0 || *x > 1.0) {
            return Err(Error::InvalidParameter(format!("Pauli weights {p:?} must lie in [0, 1]")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("Pauli weights sum to {total}, expected 1")));
        }
        Ok(Self(p))
    }

    pub fn weights(&self) -> [f64; 4] {
        self.0
    }
}

/// `λ_k = 2(p_0 + p_k) − 1`, `t = 0`.
pub fn channel_from_pauli(p: &PauliProbabilities) -> Result<QubitChannel> {
    let [p0, p1, p2, p3] = p.0;
    let lambda = [p1, p2, p3].map(|pk| (2.0 * (p0 + pk) - 1.0).clamp(-1.0, 1.0));
    QubitChannel::unital(lambda)
}

/// Tetrahedron conditions `|1 ± λ3| ≥ |λ1 ± λ2|` for unital channels.
pub fn pauli_cp(ch: &QubitChannel) -> Result<bool> {
    if !ch.is_unital() {
        return Err(Error::UnsupportedRegion(format!(
            "Pauli CP conditions need t = 0, got {:?}",
            ch.t()
        )));
    }
    let [l1, l2, l3] = ch.lambda();
    Ok((1.0 + l3).abs() >= (l1 + l2).abs() - CP_SLACK && (1.0 - l3).abs() >= (l1 - l2).abs() - CP_SLACK)
}

/// Phase-covariant CP: `|λ3| + |t3| ≤ 1` and `4λ1² + t3² ≤ (1 + λ3)²`.
pub fn phase_covariant_cp(l1: f64, l3: f64, t3: f64) -> bool {
    l3.abs() + t3.abs() <= 1.0 + CP_SLACK && 4.0 * l1 * l1 + t3 * t3 <= (1.0 + l3) * (1.0 + l3) + CP_SLACK
}

fn default_axis() -> u8 {
    3
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    Linear,
    Dephasing,
    Depolarizing,
    TwoPauli,
    PhaseCovariant,
    Gad,
    ShiftedDepolarizing,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 7] = [
        FamilyKind::Linear,
        FamilyKind::Dephasing,
        FamilyKind::Depolarizing,
        FamilyKind::TwoPauli,
        FamilyKind::PhaseCovariant,
        FamilyKind::Gad,
        FamilyKind::ShiftedDepolarizing,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Linear => "linear",
            FamilyKind::Dephasing => "dephasing",
            FamilyKind::Depolarizing => "depolarizing",
            FamilyKind::TwoPauli => "two_pauli",
            FamilyKind::PhaseCovariant => "phase_covariant",
            FamilyKind::Gad => "gad",
            FamilyKind::ShiftedDepolarizing => "shifted_depolarizing",
        }
    }

    /// Domain of the scalar `λ` parameter.
    pub fn lambda_domain(self) -> (f64, f64) {
        match self {
            FamilyKind::Depolarizing => (-1.0 / 3.0, 1.0),
            FamilyKind::TwoPauli | FamilyKind::ShiftedDepolarizing => (0.0, 1.0),
            _ => (-1.0, 1.0),
        }
    }

    pub fn has_thermal_parameter(self) -> bool {
        matches!(self, FamilyKind::Gad | FamilyKind::ShiftedDepolarizing)
    }

    /// Builds the family member at scalar `λ` (and `p`, `axis` where relevant).
    /// Phase-covariant members use `λ1 = λ3 = λ`, `t3 = 0`.
    pub fn spec(self, lambda: f64, p: f64, axis: u8) -> FamilySpec {
        match self {
            FamilyKind::Linear => FamilySpec::Linear { lambda, axis },
            FamilyKind::Dephasing => FamilySpec::Dephasing { lambda, axis },
            FamilyKind::Depolarizing => FamilySpec::Depolarizing { lambda },
            FamilyKind::TwoPauli => FamilySpec::TwoPauli { lambda },
            FamilyKind::PhaseCovariant => FamilySpec::PhaseCovariant {
                lambda1: lambda,
                lambda3: lambda,
                t3: 0.0,
            },
            FamilyKind::Gad => FamilySpec::Gad { lambda, p },
            FamilyKind::ShiftedDepolarizing => FamilySpec::ShiftedDepolarizing { lambda, p },
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        FamilyKind::ALL
            .into_iter()
            .find(|k| k.name() == norm)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown channel family '{s}'")))
    }
}

/// A family member with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilySpec {
    Linear {
        lambda: f64,
        #[serde(default = "default_axis")]
        axis: u8,
    },
    Dephasing {
        lambda: f64,
        #[serde(default = "default_axis")]
        axis: u8,
    },
    Depolarizing {
        lambda: f64,
    },
    TwoPauli {
        lambda: f64,
    },
    PhaseCovariant {
        lambda1: f64,
        lambda3: f64,
        #[serde(default)]
        t3: f64,
    },
    Gad {
        lambda: f64,
        p: f64,
    },
    ShiftedDepolarizing {
        lambda: f64,
        p: f64,
    },
}

fn check_range(name: &str, x: f64, lo: f64, hi: f64) -> Result<()> {
    if x.is_finite() && x >= lo && x <= hi {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {x} outside [{lo}, {hi}]")))
    }
}

fn axis_index(axis: u8) -> Result<usize> {
    match axis {
        1..=3 => Ok(axis as usize - 1),
        _ => Err(Error::InvalidParameter(format!("axis must be 1, 2 or 3, got {axis}"))),
    }
}

impl FamilySpec {
    pub fn kind(&self) -> FamilyKind {
        match self {
            FamilySpec::Linear { .. } => FamilyKind::Linear,
            FamilySpec::Dephasing { .. } => FamilyKind::Dephasing,
            FamilySpec::Depolarizing { .. } => FamilyKind::Depolarizing,
            FamilySpec::TwoPauli { .. } => FamilyKind::TwoPauli,
            FamilySpec::PhaseCovariant { .. } => FamilyKind::PhaseCovariant,
            FamilySpec::Gad { .. } => FamilyKind::Gad,
            FamilySpec::ShiftedDepolarizing { .. } => FamilyKind::ShiftedDepolarizing,
        }
    }

    /// Validates the parameters and returns the channel.
    pub fn channel(&self) -> Result<QubitChannel> {
        let (lo, hi) = self.kind().lambda_domain();
        match *self {
            FamilySpec::Linear { lambda, axis } => {
                check_range("lambda", lambda, lo, hi)?;
                let mut l = [0.0; 3];
                l[axis_index(axis)?] = lambda;
                QubitChannel::unital(l)
            }
            FamilySpec::Dephasing { lambda, axis } => {
                check_range("lambda", lambda, lo, hi)?;
                let mut l = [lambda; 3];
                l[axis_index(axis)?] = 1.0;
                QubitChannel::unital(l)
            }
            FamilySpec::Depolarizing { lambda } => {
                check_range("lambda", lambda, lo, hi)?;
                QubitChannel::unital([lambda; 3])
            }
            FamilySpec::TwoPauli { lambda } => {
                check_range("lambda", lambda, lo, hi)?;
                QubitChannel::unital([lambda, lambda, 2.0 * lambda - 1.0])
            }
            FamilySpec::PhaseCovariant { lambda1, lambda3, t3 } => {
                check_range("lambda1", lambda1, -1.0, 1.0)?;
                check_range("lambda3", lambda3, -1.0, 1.0)?;
                QubitChannel::diagonal([lambda1, lambda1, lambda3], t3)
            }
            FamilySpec::Gad { lambda, p } => {
                check_range("lambda", lambda, lo, hi)?;
                check_range("p", p, -1.0, 1.0)?;
                let sq = lambda * lambda;
                QubitChannel::diagonal([lambda, lambda, sq], p * (1.0 - sq))
            }
            FamilySpec::ShiftedDepolarizing { lambda, p } => {
                check_range("lambda", lambda, lo, hi)?;
                check_range("p", p, -1.0, 1.0)?;
                QubitChannel::diagonal([lambda; 3], p * (1.0 - lambda))
            }
        }
    }

    /// The family's own CP criterion: the tetrahedron conditions for the unital
    /// families, the phase-covariant conditions otherwise.
    pub fn family_cp(&self) -> Result<bool> {
        let ch = self.channel()?;
        match self.kind() {
            FamilyKind::PhaseCovariant | FamilyKind::Gad | FamilyKind::ShiftedDepolarizing => {
                let [l1, _, l3] = ch.lambda();
                Ok(phase_covariant_cp(l1, l3, ch.t()[2]))
            }
            _ => pauli_cp(&ch),
        }
    }

    /// Closed-form membership in the family's nonlocality-generating range.
    pub fn analytically_generating(&self) -> Result<bool> {
        self.channel()?;
        Ok(match *self {
            FamilySpec::Linear { lambda, .. } | FamilySpec::Gad { lambda, .. } => lambda.abs() < 1.0,
            FamilySpec::Dephasing { .. } => false,
            FamilySpec::Depolarizing { lambda } | FamilySpec::ShiftedDepolarizing { lambda, .. } => {
                lambda < FRAC_1_SQRT_2
            }
            FamilySpec::TwoPauli { lambda } => lambda > 0.0 && lambda < 1.0,
            FamilySpec::PhaseCovariant { lambda1, lambda3, .. } => phase_covariant_generating(lambda1, lambda3),
        })
    }
}

/// `λ1² < min{λ3², 1−λ3²}` or `|λ1| = |λ3| < 1/√2` or `|λ3| < |λ1| < 1`.
pub fn phase_covariant_generating(l1: f64, l3: f64) -> bool {
    let (a, c) = (l1.abs(), l3.abs());
    (a < c && a * a < 1.0 - c * c) || (a == c && a < FRAC_1_SQRT_2) || (c < a && a < 1.0)
}

/// Closed-form generating range of one family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnalyticRange {
    pub kind: FamilyKind,
    pub description: &'static str,
}

impl AnalyticRange {
    pub fn contains(&self, spec: &FamilySpec) -> Result<bool> {
        if spec.kind() != self.kind {
            return Err(Error::InvalidParameter(format!(
                "range for {} queried with a {} channel",
                self.kind,
                spec.kind()
            )));
        }
        spec.analytically_generating()
    }
}

pub fn analytic_generating_range(kind: FamilyKind) -> AnalyticRange {
    let description = match kind {
        FamilyKind::Linear => "|λ| < 1",
        FamilyKind::Dephasing => "none",
        FamilyKind::Depolarizing => "-1/3 ≤ λ < 1/√2",
        FamilyKind::TwoPauli => "0 < λ < 1",
        FamilyKind::PhaseCovariant => "λ1² < min(λ3², 1-λ3²)  or  |λ1| = |λ3| < 1/√2  or  |λ3| < |λ1| < 1",
        FamilyKind::Gad => "|λ| < 1 (any p)",
        FamilyKind::ShiftedDepolarizing => "0 ≤ λ < 1/√2 (any p)",
    };
    AnalyticRange { kind, description }
}

/// Grid of family members: `grid` points over each scalar parameter, all
/// three axes for linear/dephasing, every `p` in [`P_VALUES`] for the thermal
/// families, and a `grid x grid` plane over `(λ1, λ3)` for phase-covariant.
pub fn family_grid(kind: FamilyKind, grid: usize) -> Result<Vec<FamilySpec>> {
    if grid < 2 {
        return Err(Error::InvalidParameter(format!("grid must have at least 2 points, got {grid}")));
    }
    let (lo, hi) = kind.lambda_domain();
    let values = linspace(lo, hi, grid);
    let specs = match kind {
        FamilyKind::Linear | FamilyKind::Dephasing => (1..=3)
            .flat_map(|axis| values.iter().map(move |&l| kind.spec(l, 0.0, axis)))
            .collect(),
        FamilyKind::Gad | FamilyKind::ShiftedDepolarizing => P_VALUES
            .iter()
            .flat_map(|&p| values.iter().map(move |&l| kind.spec(l, p, 3)))
            .collect(),
        FamilyKind::PhaseCovariant => values
            .iter()
            .flat_map(|&l1| {
                values.iter().map(move |&l3| FamilySpec::PhaseCovariant {
                    lambda1: l1,
                    lambda3: l3,
                    t3: 0.0,
                })
            })
            .collect(),
        _ => values.iter().map(|&l| kind.spec(l, 0.0, 3)).collect(),
    };
    Ok(specs)
}

/// Outcome of comparing a family's closed-form range against CH1 ∨ CH2.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossCheck {
    pub kind: FamilyKind,
    pub range: &'static str,
    pub points: usize,
    pub generating: usize,
    /// Members where the closed form and CH1 ∨ CH2 disagree.
    pub mismatches: Vec<FamilySpec>,
    /// Members failing CP. For phase-covariant (whose domain is its CP set)
    /// these are instead members where the phase-covariant and general CP
    /// criteria disagree.
    pub cp_failures: Vec<FamilySpec>,
    /// `λ` values whose verdict changes with `p` (thermal families only).
    pub p_dependent: Vec<f64>,
}

impl CrossCheck {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.cp_failures.is_empty() && self.p_dependent.is_empty()
    }
}

pub fn cross_check(kind: FamilyKind, grid: usize) -> Result<CrossCheck> {
    let specs = family_grid(kind, grid)?;
    let mut mismatches = Vec::new();
    let mut cp_failures = Vec::new();
    let mut generating = 0;
    for spec in &specs {
        let ch = spec.channel()?;
        let numeric = paper_conditions(&ch).generating();
        if numeric {
            generating += 1;
        }
        if numeric != spec.analytically_generating()? {
            mismatches.push(*spec);
        }
        let family_cp = spec.family_cp()?;
        let cp_ok = if kind == FamilyKind::PhaseCovariant {
            family_cp == ch.is_completely_positive()?
        } else {
            family_cp && ch.is_completely_positive()?
        };
        if !cp_ok {
            cp_failures.push(*spec);
        }
    }

    let mut p_dependent = Vec::new();
    if kind.has_thermal_parameter() {
        let (lo, hi) = kind.lambda_domain();
        for lambda in linspace(lo, hi, grid) {
            let verdicts = P_VALUES
                .iter()
                .map(|&p| Ok(paper_conditions(&kind.spec(lambda, p, 3).channel()?).generating()))
                .collect::<Result<Vec<_>>>()?;
            if verdicts.iter().any(|&v| v != verdicts[0]) {
                p_dependent.push(lambda);
            }
        }
    }

    Ok(CrossCheck {
        kind,
        range: analytic_generating_range(kind).description,
        points: specs.len(),
        generating,
        mismatches,
        cp_failures,
        p_dependent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lambdas(spec: FamilySpec) -> ([f64; 3], [f64; 3]) {
        let ch = spec.channel().unwrap();
        (ch.lambda(), ch.t())
    }

    #[test]
    fn pauli_weights_to_eigenvalues() {
        let ch = channel_from_pauli(&PauliProbabilities::new([1.0, 0.0, 0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(ch.lambda(), [1.0; 3]);
        let ch = channel_from_pauli(&PauliProbabilities::new([0.25; 4]).unwrap()).unwrap();
        assert_eq!(ch.lambda(), [0.0; 3]);
        let ch = channel_from_pauli(&PauliProbabilities::new([0.5, 0.5, 0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(ch.lambda(), [1.0, 0.0, 0.0]);
        assert!(pauli_cp(&ch).unwrap());

        assert!(PauliProbabilities::new([0.5, 0.5, 0.5, 0.0]).is_err());
        assert!(PauliProbabilities::new([1.5, -0.5, 0.0, 0.0]).is_err());
    }

    #[test]
    fn fujiwara_algoet_examples() {
        assert!(pauli_cp(&QubitChannel::identity()).unwrap());
        assert!(!pauli_cp(&QubitChannel::unital([0.9, -0.9, 0.3]).unwrap()).unwrap());
        assert!(pauli_cp(&QubitChannel::unital([0.5, -0.5, -0.5]).unwrap()).unwrap());
        assert!(pauli_cp(&QubitChannel::diagonal([0.5; 3], 0.1).unwrap()).is_err());
    }

    #[test]
    fn phase_covariant_cp_examples() {
        assert!(phase_covariant_cp(0.0, 0.0, 1.0));
        assert!(phase_covariant_cp(1.0, 1.0, 0.0));
        assert!(!phase_covariant_cp(0.9, 0.0, 0.5));
    }

    #[test]
    fn parametrizations() {
        assert_eq!(lambdas(FamilySpec::Gad { lambda: 0.0, p: 1.0 }), ([0.0; 3], [0.0, 0.0, 1.0]));
        assert_eq!(lambdas(FamilySpec::TwoPauli { lambda: 1.0 }), ([1.0; 3], [0.0; 3]));
        assert_eq!(
            lambdas(FamilySpec::ShiftedDepolarizing { lambda: 0.5, p: -1.0 }),
            ([0.5; 3], [0.0, 0.0, -0.5])
        );
        assert_eq!(lambdas(FamilySpec::Linear { lambda: 0.3, axis: 1 }).0, [0.3, 0.0, 0.0]);
        assert_eq!(lambdas(FamilySpec::Dephasing { lambda: 0.3, axis: 3 }).0, [0.3, 0.3, 1.0]);
        let (l, t) = lambdas(FamilySpec::PhaseCovariant {
            lambda1: 0.4,
            lambda3: -0.2,
            t3: 0.3,
        });
        assert_eq!((l, t), ([0.4, 0.4, -0.2], [0.0, 0.0, 0.3]));
    }

    #[test]
    fn out_of_domain_parameters() {
        assert!(FamilySpec::Depolarizing { lambda: -0.5 }.channel().is_err());
        assert!(FamilySpec::TwoPauli { lambda: -0.1 }.channel().is_err());
        assert!(FamilySpec::Gad { lambda: 0.5, p: 1.5 }.channel().is_err());
        assert!(FamilySpec::Linear { lambda: 0.5, axis: 4 }.channel().is_err());
        assert!(FamilySpec::ShiftedDepolarizing { lambda: -0.1, p: 0.0 }.channel().is_err());
    }

    #[test]
    fn analytic_range_examples() {
        for l in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert!(!FamilySpec::Dephasing { lambda: l, axis: 3 }.analytically_generating().unwrap());
        }
        for p in P_VALUES {
            assert!(FamilySpec::Gad { lambda: 0.99, p }.analytically_generating().unwrap());
        }
        assert!(!FamilySpec::Depolarizing { lambda: 0.8 }.analytically_generating().unwrap());
        assert!(!FamilySpec::Depolarizing { lambda: FRAC_1_SQRT_2 }.analytically_generating().unwrap());

        let range = analytic_generating_range(FamilyKind::Gad);
        assert!(range.contains(&FamilySpec::TwoPauli { lambda: 0.5 }).is_err());
    }

    #[test]
    fn depolarizing_endpoint_is_excluded_by_strict_ch1() {
        let ch = FamilySpec::Depolarizing { lambda: FRAC_1_SQRT_2 }.channel().unwrap();
        assert!(!paper_conditions(&ch).generating());
    }

    #[test]
    fn kind_parsing_and_json() {
        assert_eq!("gad".parse::<FamilyKind>().unwrap(), FamilyKind::Gad);
        assert_eq!("two-pauli".parse::<FamilyKind>().unwrap(), FamilyKind::TwoPauli);
        assert!(matches!("erasure".parse::<FamilyKind>(), Err(Error::InvalidParameter(_))));

        let spec: FamilySpec = serde_json::from_str(r#"{"kind":"gad","lambda":0.9,"p":1.0}"#).unwrap();
        assert_eq!(spec, FamilySpec::Gad { lambda: 0.9, p: 1.0 });
        let spec: FamilySpec = serde_json::from_str(r#"{"kind":"linear","lambda":0.2}"#).unwrap();
        assert_eq!(spec, FamilySpec::Linear { lambda: 0.2, axis: 3 });
    }

    #[test]
    fn every_family_cross_checks_on_a_coarse_grid() {
        for kind in FamilyKind::ALL {
            let report = cross_check(kind, 21).unwrap();
            assert!(report.passed(), "{report:?}");
        }
    }
}
