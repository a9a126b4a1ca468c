#include "qfep/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "qfep/error.hpp"

namespace qfep {

MarkovKernel::MarkovKernel(std::vector<std::string> alphabet, std::vector<std::vector<double>> matrix)
    : alphabet_(std::move(alphabet)), m_(std::move(matrix)) {
    require(!alphabet_.empty(), ErrorKind::invalid_argument, "kernel alphabet is empty");
    require(m_.size() == alphabet_.size(), ErrorKind::invalid_argument, "kernel row count does not match alphabet");
    std::vector<std::string> sorted = alphabet_;
    std::sort(sorted.begin(), sorted.end());
    require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), ErrorKind::invalid_argument,
            "duplicate record in kernel alphabet");
    for (const auto &row : m_) {
        require(row.size() == alphabet_.size(), ErrorKind::invalid_argument, "kernel matrix is not square");
        double s = 0.0;
        for (double v : row) {
            require(v >= 0.0 && v <= 1.0, ErrorKind::invalid_argument, "kernel entry outside [0,1]");
            s += v;
        }
        require(std::abs(s - 1.0) <= 1e-9, ErrorKind::invalid_argument, "kernel row does not sum to 1");
    }
}

MarkovKernel MarkovKernel::identity(std::vector<std::string> alphabet) {
    const std::size_t n = alphabet.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1.0;
    return MarkovKernel(std::move(alphabet), std::move(m));
}

MarkovKernel MarkovKernel::uniform(std::vector<std::string> alphabet) {
    const std::size_t n = alphabet.size();
    require(n > 0, ErrorKind::invalid_argument, "kernel alphabet is empty");
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 1.0 / static_cast<double>(n)));
    return MarkovKernel(std::move(alphabet), std::move(m));
}

MarkovKernel MarkovKernel::permutation(std::vector<std::string> alphabet, const std::vector<std::size_t> &successor) {
    const std::size_t n = alphabet.size();
    require(successor.size() == n, ErrorKind::invalid_argument, "successor map size mismatch");
    std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        require(successor[i] < n, ErrorKind::invalid_argument, "successor out of range");
        m[i][successor[i]] = 1.0;
    }
    return MarkovKernel(std::move(alphabet), std::move(m));
}

MarkovKernel MarkovKernel::random(std::vector<std::string> alphabet, Rng &rng) {
    const std::size_t n = alphabet.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n));
    for (auto &row : m) {
        double s = 0.0;
        // Flat Dirichlet via normalized exponentials.
        for (auto &v : row) {
            double u = rng.uniform();
            while (u <= 0.0) u = rng.uniform();
            v = -std::log(u);
            s += v;
        }
        for (auto &v : row) v /= s;
    }
    return MarkovKernel(std::move(alphabet), std::move(m));
}

std::size_t MarkovKernel::index_of(const std::string &record) const {
    auto it = std::find(alphabet_.begin(), alphabet_.end(), record);
    require(it != alphabet_.end(), ErrorKind::invalid_argument, "record '" + record + "' not in alphabet");
    return static_cast<std::size_t>(it - alphabet_.begin());
}

bool MarkovKernel::contains(const std::string &record) const {
    return std::find(alphabet_.begin(), alphabet_.end(), record) != alphabet_.end();
}

std::size_t MarkovKernel::sample_next(std::size_t from, Rng &rng) const {
    require(from < m_.size(), ErrorKind::invalid_argument, "state out of range");
    const double u = rng.uniform();
    double acc = 0.0;
    const auto &row = m_[from];
    for (std::size_t j = 0; j < row.size(); ++j) {
        acc += row[j];
        if (u < acc) return j;
    }
    // Rounding: fall back to the last state with positive mass.
    for (std::size_t j = row.size(); j-- > 0;)
        if (row[j] > 0.0) return j;
    return row.size() - 1;
}

std::vector<std::string> bit_alphabet(std::size_t width) {
    require(width > 0 && width <= 20, ErrorKind::invalid_argument, "record width must be in [1, 20]");
    std::vector<std::string> out;
    for (std::size_t v = 0; v < (std::size_t{1} << width); ++v) {
        std::string s(width, '0');
        for (std::size_t b = 0; b < width; ++b)
            if ((v >> (width - 1 - b)) & 1) s[b] = '1';
        out.push_back(std::move(s));
    }
    return out;
}

double kernel_distance(const MarkovKernel &a, const MarkovKernel &b) {
    require(a.alphabet() == b.alphabet(), ErrorKind::invalid_argument, "kernel alphabets differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double tv = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) tv += std::abs(a(i, j) - b(i, j));
        worst = std::max(worst, 0.5 * tv);
    }
    return std::min(worst, 1.0);
}

// ---------------------------------------------------------------- KernelModel

KernelModel::KernelModel(std::vector<std::string> alphabet, double smoothing) : lambda_(smoothing) {
    require(smoothing >= 0.0, ErrorKind::invalid_argument, "smoothing must be non-negative");
    for (auto &a : alphabet) ensure(a);
}

std::size_t KernelModel::ensure(const std::string &record) {
    auto it = index_.find(record);
    if (it != index_.end()) return it->second;
    const std::size_t idx = alphabet_.size();
    alphabet_.push_back(record);
    index_.emplace(record, idx);
    for (auto &row : counts_) row.push_back(0.0);
    counts_.emplace_back(alphabet_.size(), 0.0);
    return idx;
}

double KernelModel::row_total(std::size_t from) const {
    return std::accumulate(counts_[from].begin(), counts_[from].end(), 0.0);
}

MarkovKernel KernelModel::kernel() const {
    require(!alphabet_.empty(), ErrorKind::invalid_argument, "model has an empty alphabet");
    const std::size_t n = alphabet_.size();
    std::vector<std::vector<double>> m(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double total = row_total(i);
        const double denom = total + lambda_ * static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j)
            m[i][j] = denom > 0.0 ? (counts_[i][j] + lambda_) / denom : 1.0 / static_cast<double>(n);
    }
    return MarkovKernel(alphabet_, std::move(m));
}

void KernelModel::observe(std::size_t prev, std::size_t next) {
    require(prev < alphabet_.size() && next < alphabet_.size(), ErrorKind::invalid_argument,
            "record index out of range");
    counts_[prev][next] += 1.0;
    ++total_;
}

void KernelModel::observe(const std::string &prev, const std::string &next) {
    const std::size_t p = ensure(prev);
    const std::size_t q = ensure(next);
    observe(p, q);
}

void KernelModel::reset() {
    for (auto &row : counts_) std::fill(row.begin(), row.end(), 0.0);
    total_ = 0;
}

KernelModel learn_update(KernelModel model, const std::string &prev_record, const std::string &new_record) {
    model.observe(prev_record, new_record);
    return model;
}

nlohmann::json kernel_to_json(const MarkovKernel &k) {
    return nlohmann::json{{"alphabet", k.alphabet()}, {"matrix", k.matrix()}};
}

MarkovKernel kernel_from_json(const nlohmann::json &j) {
    try {
        return MarkovKernel(j.at("alphabet").get<std::vector<std::string>>(),
                            j.at("matrix").get<std::vector<std::vector<double>>>());
    } catch (const nlohmann::json::exception &e) {
        fail(ErrorKind::parse_error, std::string("kernel JSON: ") + e.what());
    }
}

}  // namespace qfep
