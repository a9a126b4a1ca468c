#pragma once

// Markov kernels over finite record alphabets and their count-based learning.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfep/rng.hpp"

namespace qfep {

class MarkovKernel {
public:
    MarkovKernel() = default;
    // Rows = current record, columns = next record. Validates row-stochasticity.
    MarkovKernel(std::vector<std::string> alphabet, std::vector<std::vector<double>> matrix);

    static MarkovKernel identity(std::vector<std::string> alphabet);
    static MarkovKernel uniform(std::vector<std::string> alphabet);
    // Deterministic kernel i -> successor[i].
    static MarkovKernel permutation(std::vector<std::string> alphabet, const std::vector<std::size_t> &successor);
    static MarkovKernel random(std::vector<std::string> alphabet, Rng &rng);

    const std::vector<std::string> &alphabet() const { return alphabet_; }
    const std::vector<std::vector<double>> &matrix() const { return m_; }
    std::size_t size() const { return alphabet_.size(); }
    double operator()(std::size_t from, std::size_t to) const { return m_[from][to]; }
    std::size_t index_of(const std::string &record) const;
    bool contains(const std::string &record) const;

    std::size_t sample_next(std::size_t from, Rng &rng) const;

    bool operator==(const MarkovKernel &o) const = default;

private:
    std::vector<std::string> alphabet_;
    std::vector<std::vector<double>> m_;
};

// All bit strings of the given width, in lexicographic order ("00", "01", ...).
std::vector<std::string> bit_alphabet(std::size_t width);

// Max over rows of the total-variation distance between row distributions.
double kernel_distance(const MarkovKernel &a, const MarkovKernel &b);

// Transition counts plus additive (Dirichlet) smoothing. The kernel view is
// (count + lambda) / (row_total + lambda * |alphabet|), uniform for unseen rows.
class KernelModel {
public:
    explicit KernelModel(std::vector<std::string> alphabet = {}, double smoothing = 1.0);

    const std::vector<std::string> &alphabet() const { return alphabet_; }
    double smoothing() const { return lambda_; }
    double count(std::size_t from, std::size_t to) const { return counts_[from][to]; }
    double row_total(std::size_t from) const;
    std::size_t transitions() const { return total_; }

    MarkovKernel kernel() const;
    // Adds the record with an empty count row and column if it is new.
    std::size_t ensure(const std::string &record);
    void observe(const std::string &prev, const std::string &next);
    void observe(std::size_t prev, std::size_t next);
    void reset();

private:
    std::vector<std::string> alphabet_;
    std::map<std::string, std::size_t> index_;
    std::vector<std::vector<double>> counts_;
    double lambda_;
    std::size_t total_ = 0;
};

// One learning step: the model after observing prev -> next. Records outside
// the alphabet extend it.
KernelModel learn_update(KernelModel model, const std::string &prev_record, const std::string &new_record);

nlohmann::json kernel_to_json(const MarkovKernel &k);
MarkovKernel kernel_from_json(const nlohmann::json &j);

}  // namespace qfep
