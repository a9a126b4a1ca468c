#pragma once

// Finite-dimensional pure-state quantum mechanics in natural units (hbar = 1).

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "qfep/rng.hpp"

namespace qfep {

using cplx = std::complex<double>;
using Dims = std::vector<std::size_t>;
using Subsystems = std::vector<std::size_t>;

inline constexpr double kStateTol = 1e-9;
inline constexpr double kCompositeTol = 1e-8;
// Largest joint Hilbert dimension accepted by dense routines.
inline constexpr std::size_t kMaxDim = std::size_t{1} << 12;

class StateVector {
public:
    // Validates normalization within kStateTol.
    StateVector(Dims dims, Eigen::VectorXcd amplitudes);

    static StateVector normalized(Dims dims, Eigen::VectorXcd amplitudes);
    static StateVector basis(Dims dims, std::size_t index);
    // Haar-random pure state.
    static StateVector random(Dims dims, Rng &rng);
    static StateVector qubits(std::size_t n, std::size_t index = 0) { return basis(Dims(n, 2), index); }

    const Dims &dims() const { return dims_; }
    const Eigen::VectorXcd &amplitudes() const { return amps_; }
    std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
    std::size_t num_subsystems() const { return dims_.size(); }
    cplx operator[](std::size_t i) const { return amps_[static_cast<Eigen::Index>(i)]; }

    double norm() const { return amps_.norm(); }
    cplx inner(const StateVector &other) const;

private:
    Dims dims_;
    Eigen::VectorXcd amps_;
};

class HermitianOperator {
public:
    // Validates hermiticity within kStateTol.
    explicit HermitianOperator(Eigen::MatrixXcd matrix);

    static HermitianOperator zero(std::size_t dim);
    static HermitianOperator identity(std::size_t dim);
    // Random GUE-like Hermitian matrix with entries of order `scale`.
    static HermitianOperator random(std::size_t dim, Rng &rng, double scale = 1.0);

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const Eigen::MatrixXcd &matrix() const { return m_; }

    HermitianOperator operator+(const HermitianOperator &o) const;
    HermitianOperator operator*(double s) const;

private:
    Eigen::MatrixXcd m_;
};

class DensityMatrix {
public:
    // Validates hermiticity, unit trace and positivity within kStateTol.
    explicit DensityMatrix(Eigen::MatrixXcd matrix);

    std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
    const Eigen::MatrixXcd &matrix() const { return m_; }
    // Ascending.
    Eigen::VectorXd eigenvalues() const;
    double purity() const;

private:
    Eigen::MatrixXcd m_;
};

struct SchmidtDecomposition {
    std::vector<double> coefficients;  // descending, numerically zero terms dropped
    std::vector<StateVector> left_basis;
    std::vector<StateVector> right_basis;
    Subsystems cut;
    Subsystems complement;

    // Rebuilds sum_i c_i |u_i>|v_i> in the original subsystem order.
    StateVector reconstruct(const Dims &dims) const;
};

// Spectral propagator exp(-i H t); the eigendecomposition is computed once.
class Propagator {
public:
    explicit Propagator(const HermitianOperator &h);

    StateVector apply(const StateVector &s, double t) const;
    Eigen::MatrixXcd unitary(double t) const;
    std::size_t dim() const { return static_cast<std::size_t>(values_.size()); }

private:
    Eigen::VectorXd values_;
    Eigen::MatrixXcd vectors_;
};

struct Measurement {
    int outcome;         // +1 or -1
    StateVector post_state;
    double probability;  // exact Born weight of the sampled outcome
};

StateVector tensor(const StateVector &a, const StateVector &b);
StateVector evolve(const StateVector &s, const HermitianOperator &h, double t);
SchmidtDecomposition schmidt(const StateVector &s, const Subsystems &cut);
double entanglement_entropy(const StateVector &s, const Subsystems &cut);
DensityMatrix partial_trace(const StateVector &s, const Subsystems &keep);

// Projective measurement of a binary (+1/-1 spectrum) observable acting on one
// subsystem. Consumes exactly one uniform draw from `rng`.
Measurement born_measure(const StateVector &s, const HermitianOperator &observable, std::size_t subsystem, Rng &rng);
// Exact probability of outcome `sign` without sampling.
double born_probability(const StateVector &s, const HermitianOperator &observable, std::size_t subsystem, int sign);

// Local operator applied to a single subsystem (identity elsewhere).
StateVector apply_local(const StateVector &s, const Eigen::MatrixXcd &op, std::size_t subsystem, bool renormalize = true);
// Operator embedded on the full space: I (x) ... (x) op (x) ... (x) I.
Eigen::MatrixXcd embed(const Dims &dims, const Eigen::MatrixXcd &op, std::size_t subsystem);
Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b);
double expectation(const StateVector &s, const Eigen::MatrixXcd &op);

// True when the matrix squares to the identity, i.e. a Hermitian matrix has
// spectrum in {-1, +1}.
bool is_binary_observable(const Eigen::MatrixXcd &m, double tol = kStateTol);

namespace pauli {
Eigen::Matrix2cd x();
Eigen::Matrix2cd y();
Eigen::Matrix2cd z();
Eigen::Matrix2cd identity();
}  // namespace pauli

}  // namespace qfep
