//! Circulant operators on `C^n ⊗ C^m`.
//!
//! The base subspace `Σ_0 = span{e_k ⊗ f_k}` is permuted by `π` (with
//! `π(0) = 0`) and then cyclically shifted, giving `Σ_i = (I ⊗ S^i Π) Σ_0`
//! spanned by `e_k ⊗ f_{π(k)+i mod m}`. One coefficient block `a^(α)` lives on
//! each `Σ_α`, and the circulant operator is their direct sum. For
//! `n = m = 2` and the identity permutation this is exactly the X pattern.

use serde::{Deserialize, Serialize};

use crate::channel::{XState, STATE_TOL};
use crate::error::{Error, Result};
use crate::numerics::{is_psd, Complex64, ComplexMatrix, HERMITIAN_TOL, PSD_TOL};

/// Permutation of `{0, .., m-1}` in one-line notation with `π(0) = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let m = image.len();
        if m == 0 {
            return Err(Error::InvalidParameter("empty permutation".into()));
        }
        let mut seen = vec![false; m];
        for &p in &image {
            if p >= m || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidParameter(format!("{image:?} is not a bijection of 0..{m}")));
            }
        }
        if image[0] != 0 {
            return Err(Error::InvalidParameter(format!("permutation must fix 0, got pi(0) = {}", image[0])));
        }
        Ok(Self(image))
    }

    pub fn identity(m: usize) -> Self {
        Self((0..m).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

/// Circulant construction data: dimensions, permutation and one `m x m`
/// coefficient block per shift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct CirculantSpec {
    n: usize,
    m: usize,
    pi: Permutation,
    coeffs: Vec<ComplexMatrix>,
}

/// JSON layout: each block is a row-major list of `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct SpecRepr {
    n: usize,
    m: usize,
    pi: Permutation,
    coeffs: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<SpecRepr> for CirculantSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        let blocks = r
            .coeffs
            .into_iter()
            .map(|block| {
                let data = block.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
                ComplexMatrix::new(r.m, r.m, data)
            })
            .collect::<Result<Vec<_>>>()?;
        CirculantSpec::new(r.n, r.m, r.pi, blocks)
    }
}

impl From<CirculantSpec> for SpecRepr {
    fn from(s: CirculantSpec) -> Self {
        SpecRepr {
            n: s.n,
            m: s.m,
            pi: s.pi,
            coeffs: s
                .coeffs
                .iter()
                .map(|b| b.as_slice().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl CirculantSpec {
    /// Rejects `n != m`: the coefficient indices run over `0..m` while `e_ij`
    /// lives on `C^n`, so only the square case is well-typed.
    pub fn new(n: usize, m: usize, pi: Permutation, coeffs: Vec<ComplexMatrix>) -> Result<Self> {
        if n != m {
            return Err(Error::InvalidParameter(format!(
                "circulant construction is only defined for n = m (got n = {n}, m = {m})"
            )));
        }
        if pi.len() != m {
            return Err(Error::DimensionMismatch(format!(
                "permutation acts on {} points, expected {m}",
                pi.len()
            )));
        }
        if coeffs.len() != m {
            return Err(Error::DimensionMismatch(format!("expected {m} coefficient blocks, got {}", coeffs.len())));
        }
        if let Some(bad) = coeffs.iter().find(|b| b.rows() != m || b.cols() != m) {
            return Err(Error::DimensionMismatch(format!(
                "coefficient block is {}x{}, expected {m}x{m}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self { n, m, pi, coeffs })
    }

    /// All-zero coefficients.
    pub fn zeros(m: usize, pi: Permutation) -> Result<Self> {
        Self::new(m, m, pi, vec![ComplexMatrix::zeros(m, m); m])
    }

    /// X state as the `n = m = 2`, `π = id` circulant operator.
    pub fn from_xstate(x: &XState) -> Self {
        let re = |v: f64| Complex64::new(v, 0.0);
        let outer = ComplexMatrix::from_array([[re(x.a), x.w], [x.w.conj(), re(x.d)]]);
        let inner = ComplexMatrix::from_array([[re(x.b), x.z], [x.z.conj(), re(x.c)]]);
        Self {
            n: 2,
            m: 2,
            pi: Permutation::identity(2),
            coeffs: vec![outer, inner],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn permutation(&self) -> &Permutation {
        &self.pi
    }

    pub fn coeffs(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.n * self.m
    }

    fn product_index(&self, k: usize, alpha: usize) -> usize {
        k * self.m + (self.pi.apply(k) + alpha) % self.m
    }

    /// Computational-basis indices of `|e_k ⊗ f_{π(k)+i}⟩`, `k = 0..n`.
    pub fn subspace_indices(&self, i: usize) -> Result<Vec<usize>> {
        if i >= self.m {
            return Err(Error::IndexOutOfRange { index: i, limit: self.m });
        }
        Ok((0..self.n).map(|k| self.product_index(k, i)).collect())
    }

    /// Basis of `Σ_i` as the columns of an `nm x n` matrix.
    pub fn subspace_basis(&self, i: usize) -> Result<ComplexMatrix> {
        let indices = self.subspace_indices(i)?;
        let mut basis = ComplexMatrix::zeros(self.dim(), self.n);
        for (col, row) in indices.into_iter().enumerate() {
            basis[(row, col)] = Complex64::new(1.0, 0.0);
        }
        Ok(basis)
    }

    /// `O_α = Σ_ij a^(α)_ij e_ij ⊗ S^α f_{π(i)π(j)} (S^α)^T`.
    pub fn block_operator(&self, alpha: usize) -> Result<ComplexMatrix> {
        if alpha >= self.m {
            return Err(Error::IndexOutOfRange { index: alpha, limit: self.m });
        }
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        self.add_block(alpha, &mut out);
        Ok(out)
    }

    fn add_block(&self, alpha: usize, out: &mut ComplexMatrix) {
        let a = &self.coeffs[alpha];
        for i in 0..self.n {
            let row = self.product_index(i, alpha);
            for j in 0..self.n {
                out[(row, self.product_index(j, alpha))] += a[(i, j)];
            }
        }
    }

    /// Sum of all blocks.
    pub fn build_operator(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
        for alpha in 0..self.m {
            self.add_block(alpha, &mut out);
        }
        out
    }

    /// Unit trace (within 1e-12) and positive semidefinite (within 1e-10).
    pub fn is_circulant_state(&self) -> bool {
        let op = self.build_operator();
        let Ok(tr) = op.trace() else { return false };
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return false;
        }
        if !op.is_hermitian(HERMITIAN_TOL) {
            return false;
        }
        is_psd(&op, PSD_TOL).unwrap_or(false)
    }

    /// True iff the subspace bases together form an orthonormal basis of
    /// `C^n ⊗ C^m`.
    pub fn verify_direct_sum(&self) -> bool {
        let dim = self.dim();
        let mut stacked = ComplexMatrix::zeros(dim, self.m * self.n);
        for i in 0..self.m {
            let Ok(basis) = self.subspace_basis(i) else { return false };
            for col in 0..self.n {
                for row in 0..dim {
                    stacked[(row, i * self.n + col)] = basis[(row, col)];
                }
            }
        }
        if stacked.cols() != dim {
            return false;
        }
        let gram = match stacked.adjoint().matmul(&stacked) {
            Ok(g) => g,
            Err(_) => return false,
        };
        gram.max_abs_diff(&ComplexMatrix::identity(dim)).is_some_and(|d| d <= 1e-12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 2, 1]).is_ok());
        assert!(Permutation::new(vec![1, 0, 2]).is_err());
        assert!(Permutation::new(vec![0, 1, 1]).is_err());
        assert!(Permutation::new(vec![0, 3, 1]).is_err());
        assert!(Permutation::new(vec![]).is_err());
    }

    #[test]
    fn qubit_subspaces() {
        let spec = CirculantSpec::zeros(2, Permutation::identity(2)).unwrap();
        // |00>, |11>
        assert_eq!(spec.subspace_indices(0).unwrap(), vec![0, 3]);
        // |01>, |10>
        assert_eq!(spec.subspace_indices(1).unwrap(), vec![1, 2]);
        assert!(matches!(spec.subspace_indices(2), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn qutrit_second_shift() {
        let spec = CirculantSpec::zeros(3, Permutation::identity(3)).unwrap();
        // |02>, |10>, |21>
        assert_eq!(spec.subspace_indices(2).unwrap(), vec![2, 3, 7]);
        let basis = spec.subspace_basis(2).unwrap();
        let gram = basis.adjoint().matmul(&basis).unwrap();
        assert_eq!(gram, ComplexMatrix::identity(3));
    }

    #[test]
    fn rejects_rectangular_and_malformed() {
        let blocks = vec![ComplexMatrix::zeros(2, 2); 2];
        assert!(CirculantSpec::new(3, 2, Permutation::identity(2), blocks.clone()).is_err());
        assert!(CirculantSpec::new(3, 3, Permutation::identity(3), blocks.clone()).is_err());
        assert!(CirculantSpec::new(2, 2, Permutation::identity(2), blocks[..1].to_vec()).is_err());
    }

    #[test]
    fn zero_coefficients() {
        let spec = CirculantSpec::zeros(2, Permutation::identity(2)).unwrap();
        assert_eq!(spec.build_operator(), ComplexMatrix::zeros(4, 4));
        assert!(!spec.is_circulant_state());
    }

    #[test]
    fn x_pattern() {
        let (a, b, cc, d) = (0.4, 0.1, 0.2, 0.3);
        let (w, z) = (c(0.1, 0.05), c(0.02, -0.1));
        let x = XState { a, b, c: cc, d, w, z };
        let op = CirculantSpec::from_xstate(&x).build_operator();
        assert_eq!(op, x.to_matrix());
        assert_eq!(op[(0, 3)], w);
        assert_eq!(op[(3, 0)], w.conj());
        assert_eq!(op[(1, 2)], z);
        assert_eq!(op[(2, 1)], z.conj());
    }

    #[test]
    fn qutrit_identity_blocks() {
        let third = ComplexMatrix::identity(3).scale(c(1.0 / 3.0, 0.0));
        let spec = CirculantSpec::new(3, 3, Permutation::identity(3), vec![third; 3]).unwrap();
        let expected = ComplexMatrix::identity(9).scale(c(1.0 / 3.0, 0.0));
        assert_eq!(spec.build_operator(), expected);
    }

    #[test]
    fn blocks_live_on_their_subspace() {
        let pi = Permutation::new(vec![0, 2, 1]).unwrap();
        let blocks = (0..3)
            .map(|alpha| {
                let data = (0..9).map(|k| c(1.0 + alpha as f64, k as f64)).collect();
                ComplexMatrix::new(3, 3, data).unwrap()
            })
            .collect();
        let spec = CirculantSpec::new(3, 3, pi, blocks).unwrap();
        for alpha in 0..3 {
            let support = spec.subspace_indices(alpha).unwrap();
            let block = spec.block_operator(alpha).unwrap();
            for r in 0..9 {
                for s in 0..9 {
                    let inside = support.contains(&r) && support.contains(&s);
                    assert_eq!(block[(r, s)] != c(0.0, 0.0), inside, "alpha {alpha} ({r},{s})");
                }
            }
        }
    }

    #[test]
    fn state_checks() {
        assert!(CirculantSpec::from_xstate(&XState::maximally_mixed()).is_circulant_state());
        let bad = XState {
            a: 0.5,
            b: 0.0,
            c: 0.0,
            d: 0.5,
            w: c(0.6, 0.0),
            z: c(0.0, 0.0),
        };
        assert!(!CirculantSpec::from_xstate(&bad).is_circulant_state());
    }

    #[test]
    fn direct_sum_qubits() {
        assert!(CirculantSpec::zeros(2, Permutation::identity(2)).unwrap().verify_direct_sum());
    }

    #[test]
    fn json_layout() {
        let json = r#"{"n":2,"m":2,"pi":[0,1],"coeffs":[[[0.5,0],[0.5,0],[0.5,0],[0.5,0]],[[0,0],[0,0],[0,0],[0,0]]]}"#;
        let spec: CirculantSpec = serde_json::from_str(json).unwrap();
        assert_eq!(spec.build_operator(), XState::bell().to_matrix());
        let back: CirculantSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<CirculantSpec>(&json.replace("[0,1]", "[1,0]")).is_err());
    }
}
