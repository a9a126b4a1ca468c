#include "qfep/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "qfep/error.hpp"

namespace qfep {

namespace {

std::size_t product(const Dims &dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_dims(const Dims &dims) {
    require(!dims.empty(), ErrorKind::invalid_argument, "state has no subsystems");
    for (std::size_t d : dims) require(d > 0, ErrorKind::invalid_argument, "subsystem dimension must be positive");
    require(product(dims) <= kMaxDim, ErrorKind::resource_limit, "joint dimension exceeds " + std::to_string(kMaxDim));
}

// Sorted, de-duplicated, range-checked subsystem set.
Subsystems normalize_set(const Subsystems &set, std::size_t n) {
    Subsystems out = set;
    std::sort(out.begin(), out.end());
    require(std::adjacent_find(out.begin(), out.end()) == out.end(), ErrorKind::invalid_argument,
            "duplicate subsystem index");
    for (std::size_t i : out) require(i < n, ErrorKind::invalid_argument, "subsystem index out of range");
    return out;
}

Subsystems complement_of(const Subsystems &set, std::size_t n) {
    Subsystems out;
    for (std::size_t i = 0; i < n; ++i)
        if (!std::binary_search(set.begin(), set.end(), i)) out.push_back(i);
    return out;
}

// Amplitudes reshaped to a (dim(first) x dim(rest)) matrix, both index groups in
// ascending subsystem order.
Eigen::MatrixXcd bipartition(const StateVector &s, const Subsystems &first, const Subsystems &rest) {
    const Dims &dims = s.dims();
    const std::size_t n = dims.size();
    std::size_t rows = 1, cols = 1;
    for (std::size_t i : first) rows *= dims[i];
    for (std::size_t i : rest) cols *= dims[i];

    std::vector<std::size_t> row_stride(n, 0), col_stride(n, 0);
    std::size_t acc = 1;
    for (auto it = first.rbegin(); it != first.rend(); ++it) {
        row_stride[*it] = acc;
        acc *= dims[*it];
    }
    acc = 1;
    for (auto it = rest.rbegin(); it != rest.rend(); ++it) {
        col_stride[*it] = acc;
        acc *= dims[*it];
    }

    Eigen::MatrixXcd m(rows, cols);
    std::vector<std::size_t> digit(n, 0);
    for (std::size_t flat = 0; flat < s.dim(); ++flat) {
        std::size_t r = 0, c = 0;
        for (std::size_t k = 0; k < n; ++k) {
            r += digit[k] * row_stride[k];
            c += digit[k] * col_stride[k];
        }
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = s[flat];
        for (std::size_t k = n; k-- > 0;) {
            if (++digit[k] < dims[k]) break;
            digit[k] = 0;
        }
    }
    return m;
}

Dims select(const Dims &dims, const Subsystems &idx) {
    Dims out;
    for (std::size_t i : idx) out.push_back(dims[i]);
    return out;
}

}  // namespace

// ---------------------------------------------------------------- StateVector

StateVector::StateVector(Dims dims, Eigen::VectorXcd amplitudes) : dims_(std::move(dims)), amps_(std::move(amplitudes)) {
    check_dims(dims_);
    require(static_cast<std::size_t>(amps_.size()) == product(dims_), ErrorKind::invalid_argument,
            "amplitude count does not match subsystem dimensions");
    require(std::abs(amps_.squaredNorm() - 1.0) <= kStateTol, ErrorKind::invalid_argument, "state is not normalized");
}

StateVector StateVector::normalized(Dims dims, Eigen::VectorXcd amplitudes) {
    const double n = amplitudes.norm();
    require(n > 0.0 && std::isfinite(n), ErrorKind::invalid_argument, "cannot normalize a zero vector");
    amplitudes /= n;
    return StateVector(std::move(dims), std::move(amplitudes));
}

StateVector StateVector::basis(Dims dims, std::size_t index) {
    check_dims(dims);
    const std::size_t d = product(dims);
    require(index < d, ErrorKind::invalid_argument, "basis index out of range");
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(d));
    a[static_cast<Eigen::Index>(index)] = 1.0;
    return StateVector(std::move(dims), std::move(a));
}

StateVector StateVector::random(Dims dims, Rng &rng) {
    check_dims(dims);
    const std::size_t d = product(dims);
    Eigen::VectorXcd a(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        const double re = rng.normal();
        const double im = rng.normal();
        a[i] = cplx(re, im);
    }
    return normalized(std::move(dims), std::move(a));
}

cplx StateVector::inner(const StateVector &other) const {
    require(other.dim() == dim(), ErrorKind::invalid_argument, "dimension mismatch in inner product");
    return amps_.dot(other.amps_);
}

// ---------------------------------------------------------- HermitianOperator

HermitianOperator::HermitianOperator(Eigen::MatrixXcd matrix) : m_(std::move(matrix)) {
    require(m_.rows() > 0 && m_.rows() == m_.cols(), ErrorKind::invalid_argument, "operator must be square and nonempty");
    require(static_cast<std::size_t>(m_.rows()) <= kMaxDim, ErrorKind::resource_limit, "operator dimension over cap");
    require((m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= kStateTol, ErrorKind::invalid_argument,
            "operator is not Hermitian");
}

HermitianOperator HermitianOperator::zero(std::size_t dim) {
    return HermitianOperator(Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

HermitianOperator HermitianOperator::identity(std::size_t dim) {
    return HermitianOperator(
        Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)));
}

HermitianOperator HermitianOperator::random(std::size_t dim, Rng &rng, double scale) {
    const auto d = static_cast<Eigen::Index>(dim);
    Eigen::MatrixXcd a(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            const double re = rng.normal();
            const double im = rng.normal();
            a(i, j) = cplx(re, im);
        }
    Eigen::MatrixXcd h = (a + a.adjoint()) * (0.5 * scale);
    return HermitianOperator(std::move(h));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator &o) const {
    require(o.dim() == dim(), ErrorKind::invalid_argument, "dimension mismatch in operator sum");
    return HermitianOperator(m_ + o.m_);
}

HermitianOperator HermitianOperator::operator*(double s) const { return HermitianOperator(m_ * s); }

// -------------------------------------------------------------- DensityMatrix

DensityMatrix::DensityMatrix(Eigen::MatrixXcd matrix) : m_(std::move(matrix)) {
    require(m_.rows() > 0 && m_.rows() == m_.cols(), ErrorKind::invalid_argument, "density matrix must be square");
    require((m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= kStateTol, ErrorKind::invalid_argument,
            "density matrix is not Hermitian");
    require(std::abs(m_.trace() - cplx(1.0)) <= kStateTol, ErrorKind::invalid_argument, "density matrix trace != 1");
    require(eigenvalues().minCoeff() >= -kStateTol, ErrorKind::invalid_argument, "density matrix is not positive");
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m_, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

// ------------------------------------------------------- SchmidtDecomposition

StateVector SchmidtDecomposition::reconstruct(const Dims &dims) const {
    std::size_t total = product(dims);
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total));
    const std::size_t n = dims.size();
    for (std::size_t term = 0; term < coefficients.size(); ++term) {
        const auto &u = left_basis[term];
        const auto &v = right_basis[term];
        std::vector<std::size_t> digit(n, 0);
        for (std::size_t flat = 0; flat < total; ++flat) {
            std::size_t r = 0, c = 0;
            for (std::size_t i : cut) r = r * dims[i] + digit[i];
            for (std::size_t i : complement) c = c * dims[i] + digit[i];
            amps[static_cast<Eigen::Index>(flat)] += coefficients[term] * u[r] * v[c];
            for (std::size_t k = n; k-- > 0;) {
                if (++digit[k] < dims[k]) break;
                digit[k] = 0;
            }
        }
    }
    return StateVector::normalized(dims, std::move(amps));
}

// ----------------------------------------------------------------- Propagator

Propagator::Propagator(const HermitianOperator &h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.matrix());
    require(es.info() == Eigen::Success, ErrorKind::invalid_argument, "eigendecomposition failed");
    values_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

Eigen::MatrixXcd Propagator::unitary(double t) const {
    Eigen::VectorXcd phases(values_.size());
    for (Eigen::Index i = 0; i < values_.size(); ++i) phases[i] = std::exp(cplx(0.0, -values_[i] * t));
    return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

StateVector Propagator::apply(const StateVector &s, double t) const {
    require(s.dim() == dim(), ErrorKind::invalid_argument, "Hamiltonian dimension does not match state");
    Eigen::VectorXcd coeff = vectors_.adjoint() * s.amplitudes();
    for (Eigen::Index i = 0; i < values_.size(); ++i) coeff[i] *= std::exp(cplx(0.0, -values_[i] * t));
    Eigen::VectorXcd out = vectors_ * coeff;
    // Unitary up to rounding; renormalize to hold the state invariant exactly.
    return StateVector::normalized(s.dims(), std::move(out));
}

// ------------------------------------------------------------------ operations

StateVector tensor(const StateVector &a, const StateVector &b) {
    Dims dims = a.dims();
    dims.insert(dims.end(), b.dims().begin(), b.dims().end());
    check_dims(dims);
    Eigen::VectorXcd out(static_cast<Eigen::Index>(a.dim() * b.dim()));
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i)
        out.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()[i] * b.amplitudes();
    return StateVector::normalized(std::move(dims), std::move(out));
}

StateVector evolve(const StateVector &s, const HermitianOperator &h, double t) {
    require(h.dim() == s.dim(), ErrorKind::invalid_argument, "Hamiltonian dimension does not match state");
    return Propagator(h).apply(s, t);
}

SchmidtDecomposition schmidt(const StateVector &s, const Subsystems &cut_in) {
    const std::size_t n = s.num_subsystems();
    Subsystems cut = normalize_set(cut_in, n);
    require(!cut.empty() && cut.size() < n, ErrorKind::invalid_argument, "cut must be a nonempty proper subset");
    Subsystems rest = complement_of(cut, n);

    Eigen::MatrixXcd m = bipartition(s, cut, rest);
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd &sv = svd.singularValues();

    SchmidtDecomposition out;
    out.cut = cut;
    out.complement = rest;
    const Dims left_dims = select(s.dims(), cut);
    const Dims right_dims = select(s.dims(), rest);
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv[i] <= 1e-12) break;
        out.coefficients.push_back(sv[i]);
        out.left_basis.emplace_back(left_dims, svd.matrixU().col(i));
        out.right_basis.emplace_back(right_dims, svd.matrixV().col(i).conjugate());
    }
    return out;
}

double entanglement_entropy(const StateVector &s, const Subsystems &cut) {
    const SchmidtDecomposition sd = schmidt(s, cut);
    double h = 0.0;
    for (double c : sd.coefficients) {
        const double p = c * c;
        if (p > 0.0) h -= p * std::log2(p);
    }
    return std::max(0.0, h);
}

DensityMatrix partial_trace(const StateVector &s, const Subsystems &keep_in) {
    const std::size_t n = s.num_subsystems();
    Subsystems keep = normalize_set(keep_in, n);
    require(!keep.empty(), ErrorKind::invalid_argument, "keep set must be nonempty");
    Subsystems rest = complement_of(keep, n);
    Eigen::MatrixXcd m = bipartition(s, keep, rest);
    Eigen::MatrixXcd rho = m * m.adjoint();
    rho = 0.5 * (rho + rho.adjoint());
    return DensityMatrix(std::move(rho));
}

bool is_binary_observable(const Eigen::MatrixXcd &m, double tol) {
    if (m.rows() != m.cols()) return false;
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) return false;
    const Eigen::MatrixXcd sq = m * m;
    return (sq - Eigen::MatrixXcd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

StateVector apply_local(const StateVector &s, const Eigen::MatrixXcd &op, std::size_t subsystem, bool renormalize) {
    const Dims &dims = s.dims();
    require(subsystem < dims.size(), ErrorKind::invalid_argument, "subsystem index out of range");
    const auto d = static_cast<Eigen::Index>(dims[subsystem]);
    require(op.rows() == d && op.cols() == d, ErrorKind::invalid_argument, "local operator dimension mismatch");
    std::size_t right = 1;
    for (std::size_t k = subsystem + 1; k < dims.size(); ++k) right *= dims[k];
    const std::size_t left = s.dim() / (right * dims[subsystem]);

    Eigen::VectorXcd out(s.amplitudes().size());
    const auto &in = s.amplitudes();
    for (std::size_t l = 0; l < left; ++l)
        for (std::size_t r = 0; r < right; ++r) {
            const auto base = static_cast<Eigen::Index>(l * dims[subsystem] * right + r);
            const auto stride = static_cast<Eigen::Index>(right);
            for (Eigen::Index i = 0; i < d; ++i) {
                cplx acc = 0.0;
                for (Eigen::Index j = 0; j < d; ++j) acc += op(i, j) * in[base + j * stride];
                out[base + i * stride] = acc;
            }
        }
    if (renormalize) return StateVector::normalized(dims, std::move(out));
    return StateVector(dims, std::move(out));
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::MatrixXcd embed(const Dims &dims, const Eigen::MatrixXcd &op, std::size_t subsystem) {
    require(subsystem < dims.size(), ErrorKind::invalid_argument, "subsystem index out of range");
    require(product(dims) <= kMaxDim, ErrorKind::resource_limit, "embedded operator dimension over cap");
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const auto d = static_cast<Eigen::Index>(dims[k]);
        out = kron(out, k == subsystem ? op : Eigen::MatrixXcd::Identity(d, d));
    }
    return out;
}

double expectation(const StateVector &s, const Eigen::MatrixXcd &op) {
    require(static_cast<std::size_t>(op.rows()) == s.dim(), ErrorKind::invalid_argument, "operator dimension mismatch");
    return s.amplitudes().dot(op * s.amplitudes()).real();
}

namespace {

// Unnormalized projection (I + sign*O)/2 applied on one subsystem, plus its squared norm.
std::pair<Eigen::VectorXcd, double> project(const StateVector &s, const Eigen::MatrixXcd &o, std::size_t subsystem,
                                            int sign) {
    const Dims &dims = s.dims();
    const auto d = static_cast<Eigen::Index>(dims[subsystem]);
    Eigen::MatrixXcd p = 0.5 * (Eigen::MatrixXcd::Identity(d, d) + static_cast<double>(sign) * o);
    std::size_t right = 1;
    for (std::size_t k = subsystem + 1; k < dims.size(); ++k) right *= dims[k];
    const std::size_t left = s.dim() / (right * dims[subsystem]);
    const auto &in = s.amplitudes();
    Eigen::VectorXcd out(in.size());
    for (std::size_t l = 0; l < left; ++l)
        for (std::size_t r = 0; r < right; ++r) {
            const auto base = static_cast<Eigen::Index>(l * dims[subsystem] * right + r);
            const auto stride = static_cast<Eigen::Index>(right);
            for (Eigen::Index i = 0; i < d; ++i) {
                cplx acc = 0.0;
                for (Eigen::Index j = 0; j < d; ++j) acc += p(i, j) * in[base + j * stride];
                out[base + i * stride] = acc;
            }
        }
    const double w = out.squaredNorm();
    return {std::move(out), w};
}

void check_observable(const StateVector &s, const HermitianOperator &o, std::size_t subsystem) {
    require(subsystem < s.num_subsystems(), ErrorKind::invalid_argument, "subsystem index out of range");
    require(o.dim() == s.dims()[subsystem], ErrorKind::invalid_argument, "observable dimension mismatch");
    require(is_binary_observable(o.matrix()), ErrorKind::unsupported_observable,
            "observable spectrum is not contained in {-1,+1}");
}

}  // namespace

double born_probability(const StateVector &s, const HermitianOperator &observable, std::size_t subsystem, int sign) {
    check_observable(s, observable, subsystem);
    require(sign == 1 || sign == -1, ErrorKind::invalid_argument, "outcome sign must be +1 or -1");
    return std::clamp(project(s, observable.matrix(), subsystem, sign).second, 0.0, 1.0);
}

Measurement born_measure(const StateVector &s, const HermitianOperator &observable, std::size_t subsystem, Rng &rng) {
    check_observable(s, observable, subsystem);
    auto [plus, p_plus] = project(s, observable.matrix(), subsystem, +1);
    p_plus = std::clamp(p_plus, 0.0, 1.0);
    const double u = rng.uniform();
    if (u < p_plus) return {+1, StateVector::normalized(s.dims(), std::move(plus)), p_plus};
    auto [minus, p_minus] = project(s, observable.matrix(), subsystem, -1);
    // u can land in the rounding gap above p_plus when p_plus == 1 - ulp.
    if (p_minus <= 1e-15) return {+1, StateVector::normalized(s.dims(), std::move(plus)), p_plus};
    return {-1, StateVector::normalized(s.dims(), std::move(minus)), std::clamp(p_minus, 0.0, 1.0)};
}

namespace pauli {
Eigen::Matrix2cd x() {
    Eigen::Matrix2cd m;
    m << 0, 1, 1, 0;
    return m;
}
Eigen::Matrix2cd y() {
    Eigen::Matrix2cd m;
    m << 0, cplx(0, -1), cplx(0, 1), 0;
    return m;
}
Eigen::Matrix2cd z() {
    Eigen::Matrix2cd m;
    m << 1, 0, 0, -1;
    return m;
}
Eigen::Matrix2cd identity() { return Eigen::Matrix2cd::Identity(); }
}  // namespace pauli

}  // namespace qfep
