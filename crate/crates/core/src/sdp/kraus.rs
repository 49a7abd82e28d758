//! Kraus sets, Choi matrices and certificate verification.
//!
//! Choi convention: `J = Σ_kl |k⟩⟨l|_in ⊗ Φ(|k⟩⟨l|)`, input index slow and
//! output index fast, so `J[(k·out + a), (l·out + b)] = Φ(|k⟩⟨l|)_ab` and
//! `Φ(X)_ab = Σ_kl X_kl J[(k,a),(l,b)]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, cr, ComplexMatrix};
use crate::state::TripartiteState;
use crate::Direction;

/// Tolerance on `‖Σ F*F − I‖` for a set to count as a channel.
pub const CPTP_TOL: f64 = 1e-8;

/// Kraus operators `F_j : C^in → C^out`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KrausJson", into = "KrausJson")]
pub struct KrausSet {
    ops: Vec<ComplexMatrix>,
}

/// Serialized form: `{"in_dim", "out_dim", "kraus": [[[re, im], ...], ...]}`
/// with each operator flattened row-major.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KrausJson {
    pub in_dim: usize,
    pub out_dim: usize,
    pub kraus: Vec<Vec<[f64; 2]>>,
}

impl From<KrausSet> for KrausJson {
    fn from(set: KrausSet) -> Self {
        let (out_dim, in_dim) = set.ops.first().map(|f| f.shape()).unwrap_or((0, 0));
        let kraus = set
            .ops
            .iter()
            .map(|f| {
                (0..out_dim)
                    .flat_map(|a| (0..in_dim).map(move |k| (a, k)))
                    .map(|(a, k)| [f[(a, k)].re, f[(a, k)].im])
                    .collect()
            })
            .collect();
        Self { in_dim, out_dim, kraus }
    }
}

impl TryFrom<KrausJson> for KrausSet {
    type Error = Error;

    /// Shapes are checked; trace preservation is not (see [`KrausSet::new`]).
    fn try_from(j: KrausJson) -> Result<Self> {
        let mut ops = Vec::with_capacity(j.kraus.len());
        for (idx, flat) in j.kraus.iter().enumerate() {
            if flat.len() != j.out_dim * j.in_dim {
                return Err(Error::Parse(format!(
                    "kraus[{idx}] has {} entries, expected out_dim × in_dim = {}",
                    flat.len(),
                    j.out_dim * j.in_dim
                )));
            }
            let entries: Vec<_> = flat.iter().map(|&[re, im]| linalg::c(re, im)).collect();
            ops.push(ComplexMatrix::from_row_slice(j.out_dim, j.in_dim, &entries));
        }
        if j.in_dim == 0 || j.out_dim == 0 {
            return Err(Error::Parse("in_dim and out_dim must be positive".into()));
        }
        let set = KrausSet::from_ops_unchecked(ops);
        set.check_shapes()?;
        Ok(set)
    }
}

impl KrausSet {
    /// Validated constructor: equal shapes and `Σ F*F = I` within [`CPTP_TOL`].
    pub fn new(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let set = Self::from_ops_unchecked(ops);
        set.check_shapes()?;
        let dev = set.completeness_deviation();
        if dev > CPTP_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(set)
    }

    /// No trace-preservation check; shapes are still expected to agree.
    pub fn from_ops_unchecked(ops: Vec<ComplexMatrix>) -> Self {
        Self { ops }
    }

    fn check_shapes(&self) -> Result<()> {
        let Some(first) = self.ops.first() else {
            return Err(Error::InvalidParameter("empty Kraus set".into()));
        };
        if let Some(bad) = self.ops.iter().find(|f| f.shape() != first.shape()) {
            return Err(Error::Dimension(format!(
                "Kraus operators of shapes {:?} and {:?}",
                first.shape(),
                bad.shape()
            )));
        }
        if self.ops.iter().any(|f| !linalg::is_finite(f)) {
            return Err(Error::NonFinite("Kraus operators"));
        }
        Ok(())
    }

    pub fn ops(&self) -> &[ComplexMatrix] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn in_dim(&self) -> usize {
        self.ops.first().map(|f| f.ncols()).unwrap_or(0)
    }

    pub fn out_dim(&self) -> usize {
        self.ops.first().map(|f| f.nrows()).unwrap_or(0)
    }

    pub fn completeness_deviation(&self) -> f64 {
        linalg::completeness_deviation(&self.ops)
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        linalg::apply_kraus(&self.ops, x)
    }

    /// `(I_n ⊗ Φ)(X)`.
    pub fn apply_local(&self, x: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
        linalg::apply_kraus_local(&self.ops, x, n)
    }

    pub fn choi(&self) -> ChoiMatrix {
        let (din, dout) = (self.in_dim(), self.out_dim());
        let mut j = ComplexMatrix::zeros(din * dout, din * dout);
        for f in &self.ops {
            // vec index (k, a) ↦ F[a, k]
            let w = ComplexMatrix::from_fn(din * dout, 1, |r, _| f[(r % dout, r / dout)]);
            j += &w * w.adjoint();
        }
        ChoiMatrix { matrix: j, in_dim: din, out_dim: dout }
    }

    /// Right-multiply every operator by `(Σ F*F)^{-1/2}`, making the set
    /// exactly trace preserving. Fails if `Σ F*F` is singular.
    pub fn make_trace_preserving(&self) -> Result<Self> {
        let d = self.in_dim();
        let mut sum = ComplexMatrix::zeros(d, d);
        for f in &self.ops {
            sum += f.adjoint() * f;
        }
        let (vals, vecs) = linalg::hermitian_eig(&sum, 1e-6)?;
        let min = vals.last().copied().unwrap_or(0.0);
        if min <= 1e-12 {
            return Err(Error::NotTracePreserving(self.completeness_deviation()));
        }
        let mut inv_sqrt = ComplexMatrix::zeros(d, d);
        for (j, &l) in vals.iter().enumerate() {
            let w = vecs.column(j);
            inv_sqrt += (w * w.adjoint()).scale(1.0 / l.sqrt());
        }
        Ok(Self { ops: self.ops.iter().map(|f| f * &inv_sqrt).collect() })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChoiMatrix {
    pub matrix: ComplexMatrix,
    pub in_dim: usize,
    pub out_dim: usize,
}

impl ChoiMatrix {
    pub fn new(matrix: ComplexMatrix, in_dim: usize, out_dim: usize) -> Result<Self> {
        if matrix.shape() != (in_dim * out_dim, in_dim * out_dim) {
            return Err(Error::Dimension(format!(
                "Choi matrix of shape {:?} for in/out dims {in_dim}/{out_dim}",
                matrix.shape()
            )));
        }
        Ok(Self { matrix, in_dim, out_dim })
    }

    /// `Φ(X)` read off from the Choi blocks.
    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let (din, dout) = (self.in_dim, self.out_dim);
        let mut out = ComplexMatrix::zeros(dout, dout);
        for k in 0..din {
            for l in 0..din {
                let xkl = x[(k, l)];
                if xkl == cr(0.0) {
                    continue;
                }
                out += self.matrix.view((k * dout, l * dout), (dout, dout)) * xkl;
            }
        }
        out
    }

    /// Partial trace over the output factor; the identity for trace-preserving maps.
    pub fn output_trace(&self) -> ComplexMatrix {
        let (din, dout) = (self.in_dim, self.out_dim);
        ComplexMatrix::from_fn(din, din, |k, l| {
            (0..dout).map(|a| self.matrix[(k * dout + a, l * dout + a)]).sum()
        })
    }
}

/// Kraus operators from the eigendecomposition of a PSD Choi matrix.
///
/// Eigenpairs with `λ > rank_tol · λ_max` give `F[a, k] = √λ w[k·out + a]`.
/// If the map is trace preserving up to `1e-4`, the result is polished to
/// exact trace preservation.
pub fn extract_kraus(choi: &ChoiMatrix, rank_tol: f64) -> Result<KrausSet> {
    let (vals, vecs) = linalg::hermitian_eig(&choi.matrix, 1e-8 * choi.matrix.norm().max(1.0))?;
    let lmax = vals.first().copied().unwrap_or(0.0);
    let lmin = vals.last().copied().unwrap_or(0.0);
    if lmin < -1e-7 * lmax.max(1.0) {
        return Err(Error::NotPsd(lmin));
    }
    let (din, dout) = (choi.in_dim, choi.out_dim);
    let ops: Vec<ComplexMatrix> = vals
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.0 && l > rank_tol * lmax)
        .map(|(j, &l)| {
            let s = l.sqrt();
            ComplexMatrix::from_fn(dout, din, |a, k| vecs[(k * dout + a, j)] * s)
        })
        .collect();
    if ops.is_empty() {
        return Err(Error::InvalidParameter("Choi matrix is zero".into()));
    }
    let set = KrausSet::from_ops_unchecked(ops);
    let dev = set.completeness_deviation();
    if dev > 1e-14 && dev <= 1e-4 {
        set.make_trace_preserving()
    } else {
        Ok(set)
    }
}

/// Frobenius distance `‖(I_n ⊗ Φ)(source) − target‖` for the reduced
/// densities of `state` in the given direction. Not normalized: the value
/// scales with `‖x‖²`.
pub fn verify_channel(kraus: &KrausSet, state: &TripartiteState, direction: Direction) -> Result<f64> {
    let (n, p, q) = state.dims();
    let (din, dout) = match direction {
        Direction::EveToBob => (q, p),
        Direction::BobToEve => (p, q),
    };
    if kraus.in_dim() != din || kraus.out_dim() != dout {
        return Err(Error::Dimension(format!(
            "{} map needs a {}→{} channel, got {}→{}",
            direction,
            din,
            dout,
            kraus.in_dim(),
            kraus.out_dim()
        )));
    }
    let (source, target) = state.source_target(direction);
    let image = kraus.apply_local(&source, n)?;
    Ok((image - target).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::state::{example2, ghz};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn m(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_row_slice(rows, cols, &entries.iter().map(|&x| cr(x)).collect::<Vec<_>>())
    }

    fn example2_kraus(a: f64, b: f64) -> KrausSet {
        KrausSet::new(vec![m(2, 2, &[a, a, b, -b]), m(2, 2, &[a, -a, b, b])]).unwrap()
    }

    #[test]
    fn example2_channel_verifies() {
        let s = example2(0.5, 0.5).unwrap();
        let k = example2_kraus(0.5, 0.5);
        assert!(k.completeness_deviation() < 1e-15);
        assert!(verify_channel(&k, &s, Direction::EveToBob).unwrap() <= 1e-12);
    }

    #[test]
    fn two_way_map_needs_equal_weights() {
        let g = |a: f64, b: f64| KrausSet::from_ops_unchecked(vec![m(2, 2, &[a, b, a, -b]) * cr(2f64.sqrt())]);
        let s = example2(0.5, 0.5).unwrap();
        let k = g(0.5, 0.5);
        assert!(k.completeness_deviation() < 1e-15);
        assert!(verify_channel(&k, &s, Direction::BobToEve).unwrap() <= 1e-12);
        let (a, b) = (0.6, (0.5f64 - 0.36).sqrt());
        let s = example2(a, b).unwrap();
        assert!(verify_channel(&g(a, b), &s, Direction::BobToEve).unwrap() > 1e-3);
    }

    #[test]
    fn identity_on_ghz() {
        let id = KrausSet::new(vec![ComplexMatrix::identity(2, 2)]).unwrap();
        for d in [Direction::EveToBob, Direction::BobToEve] {
            assert_eq!(verify_channel(&id, &ghz(), d).unwrap(), 0.0);
        }
    }

    #[test]
    fn identity_choi_gives_single_operator() {
        let id = KrausSet::new(vec![ComplexMatrix::identity(3, 3)]).unwrap();
        let k = extract_kraus(&id.choi(), 1e-10).unwrap();
        assert_eq!(k.len(), 1);
        let f = &k.ops()[0];
        let phase = f[(0, 0)];
        assert!((f - ComplexMatrix::identity(3, 3) * phase).norm() < 1e-12);
        assert!((phase.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn example2_choi_round_trip() {
        let k = example2_kraus(0.5, 0.5);
        let choi = k.choi();
        let back = extract_kraus(&choi, 1e-10).unwrap();
        assert!((back.choi().matrix - &choi.matrix).norm() < 1e-10);
        assert!((choi.output_trace() - ComplexMatrix::identity(2, 2)).norm() < 1e-14);
    }

    #[test]
    fn choi_apply_matches_kraus() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let k = random_channel(&mut rng, 3, 2, 3);
        let x = ComplexMatrix::from_fn(3, 3, |_, _| c(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)));
        assert!((k.choi().apply(&x) - k.apply(&x)).norm() < 1e-12);
    }

    fn random_channel(rng: &mut ChaCha8Rng, din: usize, dout: usize, r: usize) -> KrausSet {
        let ops: Vec<ComplexMatrix> = (0..r)
            .map(|_| ComplexMatrix::from_fn(dout, din, |_, _| c(StandardNormal.sample(rng), StandardNormal.sample(rng))))
            .collect();
        KrausSet::from_ops_unchecked(ops).make_trace_preserving().unwrap()
    }

    #[test]
    fn random_cptp_extraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let k = random_channel(&mut rng, 3, 2, 4);
            let back = extract_kraus(&k.choi(), 1e-12).unwrap();
            assert!(back.completeness_deviation() < 1e-8);
            assert!((back.choi().matrix - k.choi().matrix).norm() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_psd_choi() {
        let mut j = ComplexMatrix::identity(4, 4);
        j[(3, 3)] = cr(-0.5);
        let choi = ChoiMatrix::new(j, 2, 2).unwrap();
        assert!(matches!(extract_kraus(&choi, 1e-10), Err(Error::NotPsd(_))));
    }

    #[test]
    fn kraus_validation() {
        assert!(KrausSet::new(vec![]).is_err());
        assert!(KrausSet::new(vec![ComplexMatrix::identity(2, 2) * cr(0.9)]).is_err());
        assert!(KrausSet::new(vec![ComplexMatrix::identity(2, 2), ComplexMatrix::zeros(3, 2)]).is_err());
    }

    #[test]
    fn verify_rejects_wrong_dims() {
        let id = KrausSet::new(vec![ComplexMatrix::identity(3, 3)]).unwrap();
        assert!(verify_channel(&id, &ghz(), Direction::EveToBob).is_err());
    }
}
