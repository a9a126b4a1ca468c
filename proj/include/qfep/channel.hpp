#pragma once

// Finite channel theory: binary classifiers, infomorphisms, weighted cone
// diagrams, probabilistic sequents and the joint-distribution (contextuality)
// feasibility test.

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace qfep {

class MarkovKernel;

// ----------------------------------------------------------------- classifiers

class Classifier {
public:
    Classifier(std::vector<std::string> tokens, std::vector<std::string> types,
               std::vector<std::vector<bool>> relation);

    std::size_t num_tokens() const { return tokens_.size(); }
    std::size_t num_types() const { return types_.size(); }
    const std::vector<std::string> &tokens() const { return tokens_; }
    const std::vector<std::string> &types() const { return types_; }
    // token |= type
    bool satisfies(std::size_t token, std::size_t type) const { return rel_[token][type]; }
    void set(std::size_t token, std::size_t type, bool v) { rel_[token][type] = v; }

    bool operator==(const Classifier &o) const = default;

private:
    std::vector<std::string> tokens_;
    std::vector<std::string> types_;
    std::vector<std::vector<bool>> rel_;
};

// f : source -> target. Types map forward, tokens map backward.
struct Infomorphism {
    Classifier source;
    Classifier target;
    std::vector<std::size_t> type_map;   // source type -> target type
    std::vector<std::size_t> token_map;  // target token -> source token
};

// True iff token_map(b) |=_source a  <=>  b |=_target type_map(a) for all b, a.
bool check_infomorphism(const Infomorphism &f);
Infomorphism identity_infomorphism(const Classifier &c);
// g after f; requires f.target == g.source.
Infomorphism compose(const Infomorphism &f, const Infomorphism &g);

// Core of classifiers sharing one token set: the core's types are the disjoint
// union of all types, and each leg is the inclusion on types with the identity
// on tokens. Every leg is verified to be an infomorphism.
struct CoconeCore {
    Classifier core;
    std::vector<Infomorphism> legs;
};
CoconeCore shared_token_core(const std::vector<Classifier> &parts);

// ------------------------------------------------------ probabilistic sequents

// Conditional valuation P(type | token); every row is a distribution.
class ProbClassifier {
public:
    ProbClassifier(std::vector<std::string> tokens, std::vector<std::string> types,
                   std::vector<std::vector<double>> valuation);

    const std::vector<std::string> &tokens() const { return tokens_; }
    const std::vector<std::string> &types() const { return types_; }
    double valuation(std::size_t token, std::size_t type) const { return val_[token][type]; }
    const std::vector<std::vector<double>> &table() const { return val_; }

private:
    std::vector<std::string> tokens_;
    std::vector<std::string> types_;
    std::vector<std::vector<double>> val_;
};

ProbClassifier kernel_to_classifier(const MarkovKernel &k);
MarkovKernel classifier_to_kernel(const ProbClassifier &c);

// Posterior P(M | N = evidence) from prior P(M) and likelihood rows P(N | M).
std::vector<double> bayes_posterior(const std::vector<double> &prior,
                                    const std::vector<std::vector<double>> &likelihood, std::size_t evidence);

// -------------------------------------------------------------------- diagrams

struct DiagramEdge {
    std::size_t from;
    std::size_t to;
    double weight;  // conditional probability attached to the arrow, in (0, 1]
};

class DiagramCCD {
public:
    explicit DiagramCCD(std::vector<std::string> nodes = {}, std::optional<std::size_t> core = std::nullopt);

    std::size_t add_node(const std::string &name);
    void add_edge(std::size_t from, std::size_t to, double weight);
    void add_edge(const std::string &from, const std::string &to, double weight);

    const std::vector<std::string> &nodes() const { return nodes_; }
    const std::vector<DiagramEdge> &edges() const { return edges_; }
    std::optional<std::size_t> core() const { return core_; }
    void set_core(std::size_t c) { core_ = c; }
    std::size_t index_of(const std::string &name) const;

    // Products of weights along every simple directed path from -> to.
    std::vector<double> path_products(std::size_t from, std::size_t to) const;
    // Longest simple path length in edges.
    std::size_t depth() const;

private:
    std::vector<std::string> nodes_;
    std::vector<DiagramEdge> edges_;
    std::optional<std::size_t> core_;
};

// All directed-path weight products between each ordered node pair agree within tol.
bool ccd_commutes(const DiagramCCD &d, double tol = 1e-9);

// ------------------------------------------------------------ Bayesian network

struct BayesVariable {
    std::string name;
    std::size_t cardinality = 2;
    std::vector<std::size_t> parents;
    // Rows indexed by the parents' joint assignment (row-major over parents in
    // listed order), columns by this variable's value.
    std::vector<std::vector<double>> table;
};

struct JointDistribution {
    std::vector<std::size_t> cardinalities;
    std::vector<double> p;  // row-major over variables

    // Marginal over the listed variables, row-major in the listed order.
    std::vector<double> marginal(const std::vector<std::size_t> &vars) const;
};

JointDistribution chain_joint(const std::vector<BayesVariable> &network);

// ------------------------------------------------------------ contextuality

struct Context {
    std::string id;
    std::vector<std::size_t> vars;
    std::vector<double> distribution;  // row-major over `vars` in listed order
};

struct ContextFamily {
    std::vector<std::string> variables;
    std::vector<std::size_t> alphabet_sizes;
    // Optional outcome labels per variable (defaults to 0..k-1).
    std::vector<std::vector<std::string>> outcome_labels;
    std::vector<Context> contexts;

    std::size_t var_index(const std::string &name) const;
    void validate() const;
};

// Separating inequality: sum_k coefficient_k * p_k <= 0 holds for every
// deterministic global assignment, where p_k ranges over the context
// probabilities (one entry per context outcome) plus the constant term
// multiplying 1. The data give `violation` = sum coefficient_k * data_k > 0.
struct InfeasibilityCertificate {
    std::vector<std::vector<double>> coefficients;  // [context][outcome]
    double constant = 0.0;
    double violation = 0.0;
    bool verified_exact = false;
};

struct FeasibilityResult {
    bool feasible = false;
    // Global joint over all variables (row-major) when feasible.
    std::vector<double> witness;
    double max_marginal_error = 0.0;
    std::optional<InfeasibilityCertificate> certificate;
};

inline constexpr double kMarginalTol = 1e-7;

FeasibilityResult joint_feasible(const ContextFamily &family);

nlohmann::json feasibility_report(const ContextFamily &family, const FeasibilityResult &r);

// CSV: header `context_id,<var>...,probability`; blank cells mark variables
// outside a row's context.
ContextFamily read_context_csv(std::istream &is);
void write_context_csv(std::ostream &os, const ContextFamily &family);

// Convenience constructors.
ContextFamily pr_box_family();
// Marginalizes a global joint over binary variables onto the given contexts.
ContextFamily family_from_joint(const std::vector<std::string> &variables, const std::vector<std::size_t> &alphabet_sizes,
                                const std::vector<double> &joint, const std::vector<std::vector<std::size_t>> &contexts);

}  // namespace qfep
