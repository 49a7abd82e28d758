//! Tripartite pure states and their block structure.
//!
//! For `x = (x_ijk)` the block `S_i` is the `p × q` slice at fixed first
//! index and `R_i = S_iᵗ`. The reduced densities tile as
//! `tr_2(xx*) = (R_u R_v*)_{u,v}` and `tr_3(xx*) = (S_u S_v*)_{u,v}`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, ComplexMatrix, ComplexVector, Dims, Subsystem, SvdFactors};
use crate::Direction;

const NORM_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct TripartiteState {
    dims: Dims,
    amplitudes: Vec<Complex64>,
    normalized: bool,
}

impl TripartiteState {
    /// Build from lexicographically ordered amplitudes. Unnormalized vectors
    /// are accepted.
    pub fn new(dims: Dims, amplitudes: Vec<Complex64>) -> Result<Self> {
        let (n, p, q) = dims;
        if n == 0 || p == 0 || q == 0 {
            return Err(Error::InvalidParameter(format!("dimensions {dims:?} must be positive")));
        }
        if amplitudes.len() != n * p * q {
            return Err(Error::Dimension(format!(
                "{} amplitudes for dims {:?} (expected {})",
                amplitudes.len(),
                dims,
                n * p * q
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("state amplitudes"));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        Ok(Self { dims, amplitudes, normalized: (norm_sqr - 1.0).abs() <= NORM_TOL })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let (_, p, q) = self.dims;
        (i * p + j) * q + k
    }

    pub fn amplitude(&self, i: usize, j: usize, k: usize) -> Complex64 {
        self.amplitudes[self.index(i, j, k)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn vector(&self) -> ComplexVector {
        ComplexVector::from_column_slice(&self.amplitudes)
    }

    pub fn scaled(&self, t: Complex64) -> Result<Self> {
        Self::new(self.dims, self.amplitudes.iter().map(|z| z * t).collect())
    }

    /// Unit-norm copy. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize the zero state".into()));
        }
        let mut out = self.scaled(cr(1.0 / norm))?;
        out.normalized = true;
        Ok(out)
    }

    /// `(K ⊗ I ⊗ I) x`: a local operation on the first subsystem.
    pub fn apply_first(&self, k: &ComplexMatrix) -> Result<Self> {
        let (n, p, q) = self.dims;
        if k.ncols() != n {
            return Err(Error::Dimension(format!(
                "local operator with {} columns on a first subsystem of dimension {n}",
                k.ncols()
            )));
        }
        let m = k.nrows();
        let mut out = vec![Complex64::new(0.0, 0.0); m * p * q];
        for i2 in 0..m {
            for i in 0..n {
                let kv = k[(i2, i)];
                if kv == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for jk in 0..p * q {
                    out[i2 * p * q + jk] += kv * self.amplitudes[i * p * q + jk];
                }
            }
        }
        Self::new((m, p, q), out)
    }

    pub fn density(&self) -> ComplexMatrix {
        let x = self.vector();
        &x * x.adjoint()
    }

    pub fn blocks(&self) -> Result<BlockFamily> {
        BlockFamily::extract(self, linalg::DEFAULT_RANK_TOL)
    }

    pub fn reduced_densities(&self) -> ReducedDensities {
        let rho = self.density();
        let pt = |s| linalg::partial_trace(&rho, self.dims, s).expect("dims match by construction");
        ReducedDensities {
            x1: pt(Subsystem::First),
            x2: pt(Subsystem::Second),
            x3: pt(Subsystem::Third),
        }
    }

    /// `(source, target)` reduced densities for a direction: E→B maps
    /// `X₂ = ρ_AE` to `X₃ = ρ_AB`.
    pub fn source_target(&self, direction: Direction) -> (ComplexMatrix, ComplexMatrix) {
        let red = self.reduced_densities();
        match direction {
            Direction::EveToBob => (red.x2, red.x3),
            Direction::BobToEve => (red.x3, red.x2),
        }
    }
}

/// `X₁ = ρ_BE`, `X₂ = ρ_AE`, `X₃ = ρ_AB`.
#[derive(Clone, Debug)]
pub struct ReducedDensities {
    pub x1: ComplexMatrix,
    pub x2: ComplexMatrix,
    pub x3: ComplexMatrix,
}

/// The slices `S_i ∈ M_{p,q}`, their transposes `R_i`, and the compact SVDs
/// of the `R_i`.
#[derive(Clone, Debug)]
pub struct BlockFamily {
    pub s: Vec<ComplexMatrix>,
    pub r: Vec<ComplexMatrix>,
    pub svd_factors: Vec<SvdFactors>,
}

impl BlockFamily {
    pub fn extract(state: &TripartiteState, rank_tol: f64) -> Result<Self> {
        let (n, p, q) = state.dims();
        let s: Vec<ComplexMatrix> = (0..n)
            .map(|i| ComplexMatrix::from_fn(p, q, |j, k| state.amplitude(i, j, k)))
            .collect();
        let r: Vec<ComplexMatrix> = s.iter().map(|m| m.transpose()).collect();
        let svd_factors = r.iter().map(|m| linalg::svd(m, rank_tol)).collect::<Result<_>>()?;
        Ok(Self { s, r, svd_factors })
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// `(source, target)` block lists: E→B sends `R_u R_v*` to `S_u S_v*`.
    pub fn oriented(&self, direction: Direction) -> (&[ComplexMatrix], &[ComplexMatrix]) {
        match direction {
            Direction::EveToBob => (&self.r, &self.s),
            Direction::BobToEve => (&self.s, &self.r),
        }
    }

    /// Sum of squared Frobenius norms, i.e. `‖x‖²`.
    pub fn weight(&self) -> f64 {
        self.s.iter().map(|m| m.norm_squared()).sum()
    }
}

/// Block matrix `(B_u B_v*)_{u,v}`.
pub fn assemble(blocks: &[ComplexMatrix]) -> ComplexMatrix {
    let n = blocks.len();
    let d = blocks.first().map(|b| b.nrows()).unwrap_or(0);
    let mut out = ComplexMatrix::zeros(n * d, n * d);
    for u in 0..n {
        for v in 0..n {
            let prod = &blocks[u] * blocks[v].adjoint();
            out.view_mut((u * d, v * d), (d, d)).copy_from(&prod);
        }
    }
    out
}

/// `x = (a, 0, b, 0, 0, a, 0, −b)` on `C² ⊗ C² ⊗ C²`, with `2(a² + b²) = 1`.
pub fn example2(a: f64, b: f64) -> Result<TripartiteState> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::InvalidParameter(format!("example2 requires a, b ≥ 0 (got {a}, {b})")));
    }
    let constraint = 2.0 * (a * a + b * b);
    if (constraint - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidParameter(format!(
            "example2 requires 2(a² + b²) = 1 (got {constraint})"
        )));
    }
    let amps = [a, 0.0, b, 0.0, 0.0, a, 0.0, -b].map(cr).to_vec();
    TripartiteState::new((2, 2, 2), amps)
}

/// `(|000⟩ + |111⟩)/√2`.
pub fn ghz() -> TripartiteState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![cr(0.0); 8];
    amps[0] = cr(s);
    amps[7] = cr(s);
    TripartiteState::new((2, 2, 2), amps).expect("valid fixture")
}

/// The unnormalized `3 × 2 × 2` state whose diagonal terms are transformable
/// while the cross terms are not. Takes `α` and `a` (not squared); `β` and
/// `b` are their complements.
pub fn sec4(alpha: f64, a: f64) -> Result<TripartiteState> {
    for (name, v) in [("alpha", alpha), ("a", a)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidParameter(format!("sec4 requires {name} ∈ (0, 1) (got {v})")));
        }
    }
    let beta = (1.0 - alpha * alpha).sqrt();
    let b = (1.0 - a * a).sqrt();
    let i = c(0.0, 1.0);
    let ket = |u: [Complex64; 2], w: [Complex64; 2]| [u[0] * w[0], u[0] * w[1], u[1] * w[0], u[1] * w[1]];
    let p_plus = [cr(alpha), cr(beta)];
    let p_minus = [cr(alpha), cr(-beta)];
    let q_plus = [cr(alpha), i * beta];
    let q_minus = [cr(alpha), -i * beta];
    let phi_plus = [cr(a), cr(b)];
    let phi_minus = [cr(a), cr(-b)];
    let first: Vec<Complex64> = ket(p_plus, phi_plus)
        .iter()
        .zip(ket(p_minus, phi_minus).iter())
        .map(|(x, y)| x + y)
        .collect();
    let mut amps = first;
    amps.extend(ket(q_plus, phi_plus));
    amps.extend(ket(q_minus, phi_minus));
    TripartiteState::new((3, 2, 2), amps)
}

/// The purified output of the qubit depolarizing channel on `|00⟩ + |11⟩`,
/// written out directly (unnormalized, `‖x‖² = 2`):
/// `√(1−ε)(|00⟩+|11⟩)|0⟩ + √(ε/3)[(|00⟩−|11⟩)|1⟩ + (|01⟩−|10⟩)|2⟩ + (|01⟩+|10⟩)|3⟩]`.
pub fn bell_lift(epsilon: f64) -> Result<TripartiteState> {
    if !(0.0..=0.75).contains(&epsilon) {
        return Err(Error::InvalidParameter(format!("ε = {epsilon} outside [0, 3/4]")));
    }
    let alpha = (1.0 - epsilon).sqrt();
    let beta = (epsilon / 3.0).sqrt();
    let mut amps = vec![cr(0.0); 16];
    let idx = |i: usize, j: usize, k: usize| (i * 2 + j) * 4 + k;
    amps[idx(0, 0, 0)] = cr(alpha);
    amps[idx(1, 1, 0)] = cr(alpha);
    amps[idx(0, 0, 1)] = cr(beta);
    amps[idx(1, 1, 1)] = cr(-beta);
    amps[idx(0, 1, 2)] = cr(beta);
    amps[idx(1, 0, 2)] = cr(-beta);
    amps[idx(0, 1, 3)] = cr(beta);
    amps[idx(1, 0, 3)] = cr(beta);
    TripartiteState::new((2, 2, 4), amps)
}
