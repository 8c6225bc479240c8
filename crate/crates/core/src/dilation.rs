//! Truncated Schäffer dilation of a contraction.
//!
//! On `ℓ_2(ℋ) ⊕ ℋ ⊕ ℓ_2(ℋ)` the block matrix
//!
//! ```text
//! ⎡ S*            0    0 ⎤
//! ⎢ D_{T*} P_ℋ    T    0 ⎥
//! ⎣ −T* P_ℋ       D_T  S ⎦
//! ```
//!
//! is unitary and its middle compression reproduces every power of `T`.
//! Each `ℓ_2(ℋ)` is cut to `depth` copies of `ℋ`. The middle block of any
//! word in `U`, `U*` and `diag(0, ·, 0)` never sees the cut, since no path
//! leaving `ℋ` returns to it.
//!
//! Layout: top copies `0..N` at offsets `j·d`, the middle `ℋ` at `N·d`,
//! bottom copies at `(N + 1 + j)·d`.

use num_complex::Complex64;

use crate::config::Settings;
use crate::error::{Error, Result};
use crate::linops::{
    check_same_dim, defect_pair, identity, max_abs, max_abs_diff, trace, ComplexMatrix,
    ContractionOperator, SelfAdjointOperator,
};
use crate::paths::{MultiplicativePath, RemainderTable};
use crate::symbols::LaurentPolynomial;

#[derive(Debug, Clone, PartialEq)]
pub struct SchafferDilation {
    inner_dim: usize,
    depth: usize,
    matrix: ComplexMatrix,
}

impl SchafferDilation {
    pub fn inner_dim(&self) -> usize {
        self.inner_dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn total_dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn middle_offset(&self) -> usize {
        self.depth * self.inner_dim
    }

    /// `diag(0, B, 0)`.
    pub fn embed(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_same_dim(self.inner_dim, b, "generator")?;
        let mut a = ComplexMatrix::zeros(self.total_dim(), self.total_dim());
        let m = self.middle_offset();
        a.view_mut((m, m), (self.inner_dim, self.inner_dim))
            .copy_from(b);
        Ok(a)
    }

    /// `Q_ℋ M|_ℋ`.
    pub fn compress_middle(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        check_same_dim(self.total_dim(), m, "dilated operator")?;
        let o = self.middle_offset();
        Ok(m.view((o, o), (self.inner_dim, self.inner_dim))
            .clone_owned())
    }

    /// Traces of the three diagonal blocks and of the whole matrix.
    pub fn block_trace(&self, m: &ComplexMatrix) -> Result<BlockTrace> {
        check_same_dim(self.total_dim(), m, "dilated operator")?;
        let (top, middle, bottom) = self.diagonal_ranges();
        let part = |r: std::ops::Range<usize>| -> Complex64 { r.map(|i| m[(i, i)]).sum() };
        Ok(BlockTrace {
            total: trace(m),
            top: part(top),
            middle: part(middle),
            bottom: part(bottom),
        })
    }

    /// Largest entry of the top and bottom diagonal blocks.
    pub fn corner_max(&self, m: &ComplexMatrix) -> Result<f64> {
        check_same_dim(self.total_dim(), m, "dilated operator")?;
        let (top, _, bottom) = self.diagonal_ranges();
        let block = |r: std::ops::Range<usize>| {
            max_abs(&m.view((r.start, r.start), (r.len(), r.len())).clone_owned())
        };
        Ok(block(top).max(block(bottom)))
    }

    fn diagonal_ranges(
        &self,
    ) -> (
        std::ops::Range<usize>,
        std::ops::Range<usize>,
        std::ops::Range<usize>,
    ) {
        let m = self.middle_offset();
        let d = self.inner_dim;
        (0..m, m..m + d, m + d..self.total_dim())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockTrace {
    pub total: Complex64,
    pub top: Complex64,
    pub middle: Complex64,
    pub bottom: Complex64,
}

/// Assembles the dilation of `t0` with `depth` shift copies on each side.
pub fn build_dilation(
    t0: &ContractionOperator,
    depth: usize,
    settings: &Settings,
) -> Result<SchafferDilation> {
    if depth < 1 {
        return Err(Error::DepthTooSmall { depth, required: 1 });
    }
    let d = t0.dim();
    let n = depth;
    let total = d * (2 * n + 1);
    let (dt, dts) = defect_pair(t0, settings.tol.sqrt_clamp)?;
    let t = t0.matrix();
    let id = identity(d);
    let mid = n * d;
    let bottom = |j: usize| (n + 1 + j) * d;

    let mut u = ComplexMatrix::zeros(total, total);
    let mut put = |row: usize, col: usize, block: &ComplexMatrix| {
        u.view_mut((row, col), (d, d)).copy_from(block);
    };
    // S* on the top copies: copy j+1 -> copy j
    for j in 0..n - 1 {
        put(j * d, (j + 1) * d, &id);
    }
    put(mid, 0, &dts);
    put(mid, mid, t);
    put(bottom(0), 0, &(-t.adjoint()));
    put(bottom(0), mid, &dt);
    // S on the bottom copies: copy j -> copy j+1
    for j in 0..n - 1 {
        put(bottom(j + 1), bottom(j), &id);
    }
    Ok(SchafferDilation {
        inner_dim: d,
        depth,
        matrix: u,
    })
}

/// Remainders on the dilation space and on `ℋ`, with the trace identity.
#[derive(Debug, Clone, PartialEq)]
pub struct DilatedRemainder {
    /// Remainder along `e^{isA} U_{T_0}` with `A = diag(0, B, 0)`.
    pub dilated: ComplexMatrix,
    /// Remainder along `e^{isB} T_0`.
    pub contraction: ComplexMatrix,
    pub blocks: BlockTrace,
    /// `|Tr R_U − Tr R_T|`.
    pub trace_gap: f64,
    /// Largest entry in the top and bottom diagonal blocks of `R_U`.
    pub corner_max: f64,
    /// `‖Q_ℋ R_U|_ℋ − R_T‖_max`.
    pub compression_gap: f64,
}

/// Computes both sides of `Tr 𝓡(T_0, B, f) = Tr 𝓡(U_{T_0}, A, f)`.
pub fn dilated_remainder(
    t0: &ContractionOperator,
    b: &SelfAdjointOperator,
    f: &LaurentPolynomial,
    n: usize,
    depth: usize,
    settings: &Settings,
) -> Result<DilatedRemainder> {
    let top = f.max_abs_degree().max(0) as usize;
    DilatedPair::new(t0, b, n, top, depth, settings)?.remainder(f)
}

/// A contraction path together with its truncated dilation path, with
/// remainder tables for both up to a fixed degree.
#[derive(Debug, Clone)]
pub struct DilatedPair {
    pub dilation: SchafferDilation,
    big: RemainderTable,
    small: RemainderTable,
}

impl DilatedPair {
    pub fn new(
        t0: &ContractionOperator,
        b: &SelfAdjointOperator,
        n: usize,
        top: usize,
        depth: usize,
        settings: &Settings,
    ) -> Result<Self> {
        let required = top + 1;
        if depth < required {
            return Err(Error::DepthTooSmall { depth, required });
        }
        let dil = build_dilation(t0, depth, settings)?;
        let a = SelfAdjointOperator::new(dil.embed(b.matrix())?, b.tolerance())?;
        // the truncated dilation is a compression of a unitary, hence a contraction
        let u0 = ContractionOperator::new(dil.matrix().clone(), settings.tol.class)?;
        let big = MultiplicativePath::contraction(u0, a)?;
        let small = MultiplicativePath::contraction(t0.clone(), b.clone())?;
        Ok(Self {
            big: RemainderTable::new(&big, top, n)?,
            small: RemainderTable::new(&small, top, n)?,
            dilation: dil,
        })
    }

    pub fn remainder(&self, f: &LaurentPolynomial) -> Result<DilatedRemainder> {
        let dil = &self.dilation;
        let dilated = self.big.remainder(f)?.matrix;
        let contraction = self.small.remainder(f)?.matrix;
        let blocks = dil.block_trace(&dilated)?;
        let trace_gap = (blocks.total - trace(&contraction)).norm();
        let corner_max = dil.corner_max(&dilated)?;
        let compression_gap = max_abs_diff(&dil.compress_middle(&dilated)?, &contraction);
        Ok(DilatedRemainder {
            dilated,
            contraction,
            blocks,
            trace_gap,
            corner_max,
            compression_gap,
        })
    }
}
