#include "xtalk/superop.h"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "xtalk/errors.h"

namespace xtalk {

namespace {

size_t pow4(size_t k) {
    return size_t{1} << (2 * k);
}

size_t log4(size_t dim) {
    size_t k = 0;
    while (pow4(k) < dim) {
        k++;
    }
    if (pow4(k) != dim) {
        throw DimensionError("transfer matrix dimension is not a power of 4");
    }
    return k;
}

const CMatrix &single_pauli(size_t d) {
    static const CMatrix paulis[4] = {CMatrix::Identity(2, 2), pauli_x(), pauli_y(), pauli_z()};
    return paulis[d];
}

}  // namespace

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMatrix pauli_y() {
    using namespace std::complex_literals;
    CMatrix m(2, 2);
    m << 0, -1i, 1i, 0;
    return m;
}

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); i++) {
        for (Eigen::Index j = 0; j < a.cols(); j++) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix pauli_basis_element(size_t num_qubits, size_t index) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (size_t q = 0; q < num_qubits; q++) {
        size_t digit = (index >> (2 * (num_qubits - 1 - q))) & 3;
        out = kron(out, single_pauli(digit));
    }
    return out / std::sqrt(static_cast<double>(size_t{1} << num_qubits));
}

PauliVector to_pauli_vector(const CMatrix &op) {
    size_t dim = static_cast<size_t>(op.rows());
    size_t n = 0;
    while ((size_t{1} << n) < dim) {
        n++;
    }
    PauliVector v(pow4(n));
    for (size_t p = 0; p < pow4(n); p++) {
        v(p) = (pauli_basis_element(n, p) * op).trace().real();
    }
    return v;
}

CMatrix from_pauli_vector(const PauliVector &v) {
    size_t n = log4(static_cast<size_t>(v.size()));
    CMatrix out = CMatrix::Zero(1 << n, 1 << n);
    for (size_t p = 0; p < pow4(n); p++) {
        if (v(p) != 0) {
            out += v(p) * pauli_basis_element(n, p);
        }
    }
    return out;
}

Superoperator::Superoperator(RMatrix ptm) : ptm_(std::move(ptm)) {
    if (ptm_.rows() != ptm_.cols()) {
        throw DimensionError("transfer matrix must be square");
    }
    num_qubits_ = log4(static_cast<size_t>(ptm_.rows()));
}

Superoperator Superoperator::identity(size_t num_qubits) {
    return Superoperator(RMatrix::Identity(pow4(num_qubits), pow4(num_qubits)));
}

Superoperator Superoperator::from_kraus(const std::vector<CMatrix> &kraus) {
    if (kraus.empty()) {
        throw ParameterError("Kraus set is empty");
    }
    size_t dim = static_cast<size_t>(kraus[0].rows());
    size_t n = 0;
    while ((size_t{1} << n) < dim) {
        n++;
    }
    size_t d4 = pow4(n);
    std::vector<CMatrix> basis;
    basis.reserve(d4);
    for (size_t p = 0; p < d4; p++) {
        basis.push_back(pauli_basis_element(n, p));
    }
    RMatrix ptm(d4, d4);
    for (size_t q = 0; q < d4; q++) {
        CMatrix image = CMatrix::Zero(dim, dim);
        for (const auto &k : kraus) {
            image += k * basis[q] * k.adjoint();
        }
        for (size_t p = 0; p < d4; p++) {
            ptm(p, q) = (basis[p] * image).trace().real();
        }
    }
    return Superoperator(std::move(ptm));
}

Superoperator Superoperator::from_unitary(const CMatrix &u) {
    return from_kraus({u});
}

Superoperator Superoperator::then(const Superoperator &next) const {
    if (next.num_qubits_ != num_qubits_) {
        throw DimensionError("cannot compose maps on different qubit counts");
    }
    return Superoperator(next.ptm_ * ptm_);
}

Superoperator Superoperator::tensor(const Superoperator &other) const {
    RMatrix out(ptm_.rows() * other.ptm_.rows(), ptm_.cols() * other.ptm_.cols());
    for (Eigen::Index i = 0; i < ptm_.rows(); i++) {
        for (Eigen::Index j = 0; j < ptm_.cols(); j++) {
            out.block(i * other.ptm_.rows(), j * other.ptm_.cols(), other.ptm_.rows(), other.ptm_.cols()) =
                ptm_(i, j) * other.ptm_;
        }
    }
    return Superoperator(std::move(out));
}

double Superoperator::tp_residual() const {
    double r = 0;
    for (Eigen::Index j = 0; j < ptm_.cols(); j++) {
        r = std::max(r, std::abs(ptm_(0, j) - (j == 0 ? 1.0 : 0.0)));
    }
    return r;
}

CMatrix Superoperator::choi() const {
    // J = sum_PQ R_PQ B_P (x) B_Q^T
    size_t d4 = pow4(num_qubits_);
    size_t dim = size_t{1} << num_qubits_;
    CMatrix j = CMatrix::Zero(dim * dim, dim * dim);
    std::vector<CMatrix> basis;
    for (size_t p = 0; p < d4; p++) {
        basis.push_back(pauli_basis_element(num_qubits_, p));
    }
    for (size_t p = 0; p < d4; p++) {
        for (size_t q = 0; q < d4; q++) {
            if (ptm_(p, q) != 0) {
                j += ptm_(p, q) * kron(basis[p], basis[q].transpose());
            }
        }
    }
    return j;
}

double Superoperator::min_choi_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(choi(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

double Superoperator::distance(const Superoperator &other) const {
    if (other.num_qubits_ != num_qubits_) {
        throw DimensionError("cannot compare maps on different qubit counts");
    }
    return (ptm_ - other.ptm_).cwiseAbs().maxCoeff();
}

Superoperator depolarizing(double p) {
    if (!(p >= 0 && p <= 1)) {
        throw ParameterError("depolarizing rate must lie in [0, 1]");
    }
    RMatrix m = RMatrix::Identity(4, 4);
    for (int k = 1; k < 4; k++) {
        m(k, k) = 1 - p;
    }
    return Superoperator(std::move(m));
}

CMatrix exp_minus_half_i(const CMatrix &hermitian) {
    using namespace std::complex_literals;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian);
    const auto &vals = solver.eigenvalues();
    const auto &vecs = solver.eigenvectors();
    Eigen::VectorXcd phases(vals.size());
    for (Eigen::Index k = 0; k < vals.size(); k++) {
        phases(k) = std::exp(-0.5i * vals(k));
    }
    return vecs * phases.asDiagonal() * vecs.adjoint();
}

void LayerMap::append(std::vector<Qubit> qubits, const Superoperator &op) {
    if (op.num_qubits() != qubits.size()) {
        throw DimensionError("factor qubit list does not match its superoperator size");
    }
    factors_.push_back({std::move(qubits), op});
}

void LayerMap::fuse() {
    std::vector<Factor> out;
    for (auto &f : factors_) {
        bool merged = false;
        for (size_t k = out.size(); k-- > 0;) {
            bool overlap = false;
            for (Qubit a : out[k].qubits) {
                for (Qubit b : f.qubits) {
                    overlap |= a == b;
                }
            }
            if (!overlap) {
                continue;
            }
            if (out[k].qubits == f.qubits) {
                out[k].op = out[k].op.then(f.op);
                merged = true;
            }
            break;
        }
        if (!merged) {
            out.push_back(std::move(f));
        }
    }
    factors_ = std::move(out);
}

void apply_factor(const Factor &factor, PauliVector &state, size_t num_qubits) {
    size_t k = factor.qubits.size();
    size_t sub = pow4(k);
    std::vector<size_t> offsets(sub, 0);
    for (size_t s = 0; s < sub; s++) {
        for (size_t j = 0; j < k; j++) {
            size_t digit = (s >> (2 * (k - 1 - j))) & 3;
            offsets[s] += digit << (2 * (num_qubits - 1 - factor.qubits[j]));
        }
    }
    size_t mask = 0;
    for (Qubit q : factor.qubits) {
        mask |= size_t{3} << (2 * (num_qubits - 1 - q));
    }
    const RMatrix &m = factor.op.matrix();
    std::vector<double> in(sub);
    size_t total = pow4(num_qubits);
    for (size_t base = 0; base < total; base++) {
        if (base & mask) {
            continue;
        }
        for (size_t s = 0; s < sub; s++) {
            in[s] = state(base + offsets[s]);
        }
        for (size_t r = 0; r < sub; r++) {
            double acc = 0;
            for (size_t c = 0; c < sub; c++) {
                acc += m(r, c) * in[c];
            }
            state(base + offsets[r]) = acc;
        }
    }
}

void LayerMap::apply(PauliVector &state, size_t num_qubits) const {
    for (const auto &f : factors_) {
        apply_factor(f, state, num_qubits);
    }
}

Superoperator LayerMap::dense(size_t num_qubits) const {
    size_t d4 = pow4(num_qubits);
    RMatrix full(d4, d4);
    for (size_t col = 0; col < d4; col++) {
        PauliVector v = PauliVector::Zero(d4);
        v(col) = 1;
        apply(v, num_qubits);
        full.col(col) = v;
    }
    return Superoperator(std::move(full));
}

}  // namespace xtalk
