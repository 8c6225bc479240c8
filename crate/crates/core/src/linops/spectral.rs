use nalgebra::{Schur, SymmetricEigen};
use num_complex::Complex64;

use super::{check_square, commutator_defect, hermiticity_defect, max_abs, ComplexMatrix};
use crate::config::Tolerances;
use crate::error::{Error, Result};

/// Eigenvalues and orthogonal eigenprojections of a normal matrix.
///
/// Internally the decomposition keeps an orthonormal eigenbasis `Q` together
/// with the cluster index of every basis vector, which is what the operator
/// integrals in [`crate::moi`] consume. The projection for cluster `c` is
/// `Σ_{j: cluster(j) = c} q_j q_j*`.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<Complex64>,
    projections: Vec<ComplexMatrix>,
    basis: ComplexMatrix,
    cluster_of: Vec<usize>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    /// One representative eigenvalue per cluster.
    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn projections(&self) -> &[ComplexMatrix] {
        &self.projections
    }

    /// Orthonormal eigenbasis, one column per eigenvector.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    /// Cluster index of every basis column.
    pub fn cluster_of(&self) -> &[usize] {
        &self.cluster_of
    }

    /// Eigenvalue attached to every basis column (its cluster representative).
    pub fn column_eigenvalues(&self) -> Vec<Complex64> {
        self.cluster_of
            .iter()
            .map(|&c| self.eigenvalues[c])
            .collect()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        let mut counts = vec![0; self.eigenvalues.len()];
        for &c in &self.cluster_of {
            counts[c] += 1;
        }
        counts
    }

    /// `Σ_j λ_j P_j`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|z| z)
    }

    /// Functional calculus `Σ_j g(λ_j) P_j`.
    pub fn apply(&self, g: impl Fn(Complex64) -> Complex64) -> ComplexMatrix {
        let values: Vec<Complex64> = self.eigenvalues.iter().map(|&z| g(z)).collect();
        let mut scaled = self.basis.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= values[self.cluster_of[j]];
        }
        scaled * self.basis.adjoint()
    }

    /// Smallest distance between distinct cluster representatives.
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for (a, za) in self.eigenvalues.iter().enumerate() {
            for zb in &self.eigenvalues[a + 1..] {
                best = best.min((za - zb).norm());
            }
        }
        best
    }
}

/// Spectral decomposition of a normal matrix.
///
/// Hermitian input goes through the Hermitian eigensolver; every other normal
/// matrix through a complex Schur factorization, whose triangular factor is
/// diagonal for normal matrices. Eigenvalues closer than `tol.cluster` are
/// merged (single linkage); a merged cluster wider than `tol.cluster` is
/// reported as [`Error::ClusterAmbiguity`].
pub fn spectral_decompose(m: &ComplexMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    check_square(m)?;
    let scale = max_abs(m).max(1.0);
    let defect = commutator_defect(m, &m.adjoint());
    let allowed = tol.normality * scale * scale;
    if defect > allowed {
        return Err(Error::NotNormal {
            defect,
            tolerance: allowed,
        });
    }

    if hermiticity_defect(m) <= f64::EPSILON * 16.0 * scale {
        return hermitian_eigen(m, tol.cluster);
    }

    let (q, t) = Schur::new(m.clone()).unpack();
    let values: Vec<Complex64> = t.diagonal().iter().copied().collect();
    cluster(q, values, tol.cluster)
}

/// Spectral decomposition of a Hermitian matrix with real eigenvalues.
pub fn hermitian_decompose(m: &ComplexMatrix, tol: &Tolerances) -> Result<SpectralDecomposition> {
    check_square(m)?;
    let defect = hermiticity_defect(m);
    let allowed = tol.class * max_abs(m).max(1.0);
    if defect > allowed {
        return Err(Error::ClassViolation {
            kind: crate::error::OperatorKind::SelfAdjoint,
            defect,
            tolerance: allowed,
        });
    }
    hermitian_eigen(m, tol.cluster)
}

fn hermitian_eigen(m: &ComplexMatrix, cluster_tol: f64) -> Result<SpectralDecomposition> {
    let sym = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(sym);
    let values = eig
        .eigenvalues
        .iter()
        .map(|&x| Complex64::new(x, 0.0))
        .collect();
    cluster(eig.eigenvectors, values, cluster_tol)
}

fn cluster(
    basis: ComplexMatrix,
    values: Vec<Complex64>,
    cluster_tol: f64,
) -> Result<SpectralDecomposition> {
    let d = values.len();
    // union-find over the "closer than cluster_tol" graph
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for a in 0..d {
        for b in a + 1..d {
            if (values[a] - values[b]).norm() < cluster_tol {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
    }

    let mut root_to_cluster = vec![usize::MAX; d];
    let mut cluster_of = vec![0; d];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for j in 0..d {
        let r = find(&mut parent, j);
        if root_to_cluster[r] == usize::MAX {
            root_to_cluster[r] = members.len();
            members.push(Vec::new());
        }
        cluster_of[j] = root_to_cluster[r];
        members[root_to_cluster[r]].push(j);
    }

    let mut eigenvalues = Vec::with_capacity(members.len());
    for group in &members {
        let mut diameter = 0.0_f64;
        for (i, &a) in group.iter().enumerate() {
            for &b in &group[i + 1..] {
                diameter = diameter.max((values[a] - values[b]).norm());
            }
        }
        if diameter >= cluster_tol {
            return Err(Error::ClusterAmbiguity {
                diameter,
                cluster_tol,
            });
        }
        let mean = group.iter().map(|&j| values[j]).sum::<Complex64>() / group.len() as f64;
        eigenvalues.push(mean);
    }

    let basis = orthonormalize(basis);
    let projections = members
        .iter()
        .map(|group| {
            let cols = basis.select_columns(group.iter());
            &cols * cols.adjoint()
        })
        .collect();

    Ok(SpectralDecomposition {
        eigenvalues,
        projections,
        basis,
        cluster_of,
    })
}

/// Re-orthonormalizes the eigenbasis (modified Gram–Schmidt, two passes).
fn orthonormalize(mut q: ComplexMatrix) -> ComplexMatrix {
    let n = q.ncols();
    for _ in 0..2 {
        for j in 0..n {
            for i in 0..j {
                let proj = q.column(i).dotc(&q.column(j));
                let ci = q.column(i).clone_owned();
                let mut cj = q.column_mut(j);
                cj -= ci * proj;
            }
            let norm = q.column(j).norm();
            q.column_mut(j).unscale_mut(norm);
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{c64, identity, max_abs_diff, zeros, I};

    #[test]
    fn diagonal_unitary_splits_into_coordinate_projections() {
        let mut u = zeros(2);
        u[(0, 0)] = c64(1.0, 0.0);
        u[(1, 1)] = I;
        let sd = spectral_decompose(&u, &Tolerances::default()).unwrap();
        assert_eq!(sd.eigenvalues().len(), 2);
        for (lambda, p) in sd.eigenvalues().iter().zip(sd.projections()) {
            let expected_index = if (lambda - c64(1.0, 0.0)).norm() < 1e-12 {
                0
            } else {
                1
            };
            assert!((lambda - [c64(1.0, 0.0), I][expected_index]).norm() < 1e-12);
            let mut e = zeros(2);
            e[(expected_index, expected_index)] = c64(1.0, 0.0);
            assert!(max_abs_diff(p, &e) < 1e-12);
        }
    }

    #[test]
    fn identity_has_single_cluster() {
        let sd = spectral_decompose(&identity(3), &Tolerances::default()).unwrap();
        assert_eq!(sd.eigenvalues().len(), 1);
        assert!((sd.eigenvalues()[0] - c64(1.0, 0.0)).norm() < 1e-14);
        assert!(max_abs_diff(&sd.projections()[0], &identity(3)) < 1e-14);
        assert_eq!(sd.multiplicities(), vec![3]);
    }

    #[test]
    fn non_normal_matrix_is_rejected() {
        let mut t = zeros(2);
        t[(0, 1)] = c64(1.0, 0.0);
        assert!(matches!(
            spectral_decompose(&t, &Tolerances::default()),
            Err(Error::NotNormal { .. })
        ));
    }

    #[test]
    fn chained_near_duplicates_are_ambiguous() {
        let tol = Tolerances {
            cluster: 1e-3,
            ..Tolerances::default()
        };
        let mut m = zeros(3);
        m[(0, 0)] = c64(0.0, 0.0);
        m[(1, 1)] = c64(0.0009, 0.0);
        m[(2, 2)] = c64(0.0018, 0.0);
        assert!(matches!(
            hermitian_decompose(&m, &tol),
            Err(Error::ClusterAmbiguity { .. })
        ));
    }

    #[test]
    fn near_duplicates_merge_into_one_projection() {
        let tol = Tolerances::default();
        let mut m = zeros(3);
        m[(0, 0)] = c64(0.5, 0.0);
        m[(1, 1)] = c64(0.5 + 1e-10, 0.0);
        m[(2, 2)] = c64(-0.5, 0.0);
        let sd = hermitian_decompose(&m, &tol).unwrap();
        assert_eq!(sd.eigenvalues().len(), 2);
        let mut sum = zeros(3);
        for p in sd.projections() {
            sum += p;
        }
        assert!(max_abs_diff(&sum, &identity(3)) < 1e-14);
    }
}
