#ifndef XTALK_SUPEROP_H
#define XTALK_SUPEROP_H

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <vector>

#include "xtalk/regions.h"

namespace xtalk {

using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using PauliVector = Eigen::VectorXd;

/// Normalized Pauli basis B_P = (P_1 x ... x P_k) / sqrt(2^k), digits I=0, X=1, Y=2, Z=3 with
/// qubit 0 as the most significant base-4 digit. Orthonormal under the Hilbert-Schmidt product.
CMatrix pauli_basis_element(size_t num_qubits, size_t index);

/// Coefficients Tr(B_P A) of a Hermitian operator A.
PauliVector to_pauli_vector(const CMatrix &op);
CMatrix from_pauli_vector(const PauliVector &v);

/// A CPTP map in Pauli-transfer-matrix form: R_PQ = Tr(B_P L(B_Q)).
class Superoperator {
   public:
    Superoperator() = default;
    explicit Superoperator(RMatrix ptm);

    static Superoperator identity(size_t num_qubits);
    static Superoperator from_unitary(const CMatrix &u);
    static Superoperator from_kraus(const std::vector<CMatrix> &kraus);

    size_t num_qubits() const {
        return num_qubits_;
    }
    const RMatrix &matrix() const {
        return ptm_;
    }
    /// `next` applied after this map.
    Superoperator then(const Superoperator &next) const;
    /// This map on the leading qubits, `other` on the trailing ones.
    Superoperator tensor(const Superoperator &other) const;

    /// Distance of the identity row from e_0; zero for trace-preserving maps.
    double tp_residual() const;
    CMatrix choi() const;
    double min_choi_eigenvalue() const;
    /// Max-abs entry difference between two transfer matrices.
    double distance(const Superoperator &other) const;

   private:
    size_t num_qubits_ = 0;
    RMatrix ptm_;
};

/// rho -> (1 - p) rho + p Tr(rho) I / 2 on one qubit.
Superoperator depolarizing(double p);

CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();
CMatrix kron(const CMatrix &a, const CMatrix &b);
/// exp(-i H / 2) for Hermitian H, via eigendecomposition.
CMatrix exp_minus_half_i(const CMatrix &hermitian);

/// A superoperator placed on specific qubits of a larger register. The first listed qubit is
/// the most significant digit of the factor's own index.
struct Factor {
    std::vector<Qubit> qubits;
    Superoperator op;
};

/// One circuit layer as an ordered product of local factors (applied first to last).
class LayerMap {
   public:
    void append(std::vector<Qubit> qubits, const Superoperator &op);
    /// Merges each factor into the latest earlier factor acting on the identical qubit list
    /// when nothing in between overlaps it.
    void fuse();
    const std::vector<Factor> &factors() const {
        return factors_;
    }
    void apply(PauliVector &state, size_t num_qubits) const;
    /// Full 4^n x 4^n transfer matrix; only meant for small registers.
    Superoperator dense(size_t num_qubits) const;

   private:
    std::vector<Factor> factors_;
};

/// Applies a factor in place to an n-qubit Pauli vector.
void apply_factor(const Factor &factor, PauliVector &state, size_t num_qubits);

}  // namespace xtalk

#endif
