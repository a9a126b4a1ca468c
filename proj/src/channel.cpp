#include "qfep/channel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "qfep/error.hpp"
#include "qfep/kernel.hpp"
#include "simplex.hpp"

namespace qfep {

// ----------------------------------------------------------------- classifiers

Classifier::Classifier(std::vector<std::string> tokens, std::vector<std::string> types,
                       std::vector<std::vector<bool>> relation)
    : tokens_(std::move(tokens)), types_(std::move(types)), rel_(std::move(relation)) {
    require(rel_.size() == tokens_.size(), ErrorKind::invalid_argument, "relation rows must match token count");
    for (const auto &row : rel_)
        require(row.size() == types_.size(), ErrorKind::invalid_argument, "relation columns must match type count");
}

bool check_infomorphism(const Infomorphism &f) {
    require(f.type_map.size() == f.source.num_types(), ErrorKind::invalid_argument,
            "type map must be total on source types");
    require(f.token_map.size() == f.target.num_tokens(), ErrorKind::invalid_argument,
            "token map must be total on target tokens");
    for (std::size_t t : f.type_map)
        require(t < f.target.num_types(), ErrorKind::invalid_argument, "type map points outside target types");
    for (std::size_t t : f.token_map)
        require(t < f.source.num_tokens(), ErrorKind::invalid_argument, "token map points outside source tokens");

    for (std::size_t b = 0; b < f.target.num_tokens(); ++b)
        for (std::size_t a = 0; a < f.source.num_types(); ++a)
            if (f.source.satisfies(f.token_map[b], a) != f.target.satisfies(b, f.type_map[a])) return false;
    return true;
}

Infomorphism identity_infomorphism(const Classifier &c) {
    std::vector<std::size_t> types(c.num_types()), tokens(c.num_tokens());
    std::iota(types.begin(), types.end(), 0);
    std::iota(tokens.begin(), tokens.end(), 0);
    return {c, c, std::move(types), std::move(tokens)};
}

Infomorphism compose(const Infomorphism &f, const Infomorphism &g) {
    require(f.target == g.source, ErrorKind::invalid_argument, "infomorphisms are not composable");
    Infomorphism h{f.source, g.target, {}, {}};
    for (std::size_t a = 0; a < f.source.num_types(); ++a) h.type_map.push_back(g.type_map.at(f.type_map.at(a)));
    for (std::size_t c = 0; c < g.target.num_tokens(); ++c) h.token_map.push_back(f.token_map.at(g.token_map.at(c)));
    return h;
}

CoconeCore shared_token_core(const std::vector<Classifier> &parts) {
    require(!parts.empty(), ErrorKind::invalid_argument, "no classifiers to join");
    const auto &tokens = parts.front().tokens();
    std::vector<std::string> types;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        require(parts[p].tokens() == tokens, ErrorKind::invalid_argument, "classifiers do not share a token set");
        for (const auto &t : parts[p].types()) types.push_back(std::to_string(p) + "." + t);
    }
    std::vector<std::vector<bool>> rel(tokens.size());
    for (std::size_t tok = 0; tok < tokens.size(); ++tok)
        for (const auto &part : parts)
            for (std::size_t ty = 0; ty < part.num_types(); ++ty) rel[tok].push_back(part.satisfies(tok, ty));

    CoconeCore out{Classifier(tokens, types, rel), {}};
    std::size_t offset = 0;
    std::vector<std::size_t> ident(tokens.size());
    std::iota(ident.begin(), ident.end(), 0);
    for (const auto &part : parts) {
        std::vector<std::size_t> tm(part.num_types());
        std::iota(tm.begin(), tm.end(), offset);
        offset += part.num_types();
        Infomorphism leg{part, out.core, std::move(tm), ident};
        require(check_infomorphism(leg), ErrorKind::invalid_argument, "cocone leg failed adjointness");
        out.legs.push_back(std::move(leg));
    }
    return out;
}

// ------------------------------------------------------ probabilistic sequents

namespace {
void check_distribution(const std::vector<double> &row, const std::string &what) {
    double s = 0.0;
    for (double v : row) {
        require(v >= 0.0 && v <= 1.0, ErrorKind::invalid_argument, what + ": probability outside [0,1]");
        s += v;
    }
    require(std::abs(s - 1.0) <= 1e-9, ErrorKind::invalid_argument, what + ": does not sum to 1");
}
}  // namespace

ProbClassifier::ProbClassifier(std::vector<std::string> tokens, std::vector<std::string> types,
                               std::vector<std::vector<double>> valuation)
    : tokens_(std::move(tokens)), types_(std::move(types)), val_(std::move(valuation)) {
    require(val_.size() == tokens_.size(), ErrorKind::invalid_argument, "valuation rows must match tokens");
    for (const auto &row : val_) {
        require(row.size() == types_.size(), ErrorKind::invalid_argument, "valuation columns must match types");
        check_distribution(row, "conditional valuation");
    }
}

ProbClassifier kernel_to_classifier(const MarkovKernel &k) {
    return ProbClassifier(k.alphabet(), k.alphabet(), k.matrix());
}

MarkovKernel classifier_to_kernel(const ProbClassifier &c) {
    require(c.tokens() == c.types(), ErrorKind::invalid_argument, "classifier tokens and types differ");
    return MarkovKernel(c.tokens(), c.table());
}

std::vector<double> bayes_posterior(const std::vector<double> &prior,
                                    const std::vector<std::vector<double>> &likelihood, std::size_t evidence) {
    check_distribution(prior, "prior");
    require(likelihood.size() == prior.size(), ErrorKind::invalid_argument, "likelihood rows must match prior");
    for (const auto &row : likelihood) {
        check_distribution(row, "likelihood");
        require(evidence < row.size(), ErrorKind::invalid_argument, "evidence value out of range");
    }
    std::vector<double> joint(prior.size());
    double evidence_p = 0.0;
    for (std::size_t m = 0; m < prior.size(); ++m) {
        joint[m] = prior[m] * likelihood[m][evidence];
        evidence_p += joint[m];
    }
    require(evidence_p > 0.0, ErrorKind::conditioning_on_null, "evidence has zero probability");
    for (double &v : joint) v /= evidence_p;
    return joint;
}

// -------------------------------------------------------------------- diagrams

DiagramCCD::DiagramCCD(std::vector<std::string> nodes, std::optional<std::size_t> core)
    : nodes_(std::move(nodes)), core_(core) {
    if (core_) require(*core_ < nodes_.size(), ErrorKind::invalid_argument, "core node out of range");
}

std::size_t DiagramCCD::add_node(const std::string &name) {
    require(std::find(nodes_.begin(), nodes_.end(), name) == nodes_.end(), ErrorKind::invalid_argument,
            "duplicate node '" + name + "'");
    nodes_.push_back(name);
    return nodes_.size() - 1;
}

std::size_t DiagramCCD::index_of(const std::string &name) const {
    auto it = std::find(nodes_.begin(), nodes_.end(), name);
    require(it != nodes_.end(), ErrorKind::invalid_argument, "unknown node '" + name + "'");
    return static_cast<std::size_t>(it - nodes_.begin());
}

void DiagramCCD::add_edge(std::size_t from, std::size_t to, double weight) {
    require(from < nodes_.size() && to < nodes_.size(), ErrorKind::invalid_argument, "edge endpoint out of range");
    require(from != to, ErrorKind::invalid_argument, "self loops are not allowed");
    require(weight > 0.0 && weight <= 1.0, ErrorKind::invalid_argument, "edge weight must lie in (0,1]");
    edges_.push_back({from, to, weight});
}

void DiagramCCD::add_edge(const std::string &from, const std::string &to, double weight) {
    add_edge(index_of(from), index_of(to), weight);
}

std::vector<double> DiagramCCD::path_products(std::size_t from, std::size_t to) const {
    std::vector<double> out;
    std::vector<bool> on_path(nodes_.size(), false);
    std::function<void(std::size_t, double)> dfs = [&](std::size_t u, double w) {
        if (u == to) {
            out.push_back(w);
            return;
        }
        on_path[u] = true;
        for (const auto &e : edges_)
            if (e.from == u && !on_path[e.to]) dfs(e.to, w * e.weight);
        on_path[u] = false;
    };
    if (from != to) dfs(from, 1.0);
    return out;
}

std::size_t DiagramCCD::depth() const {
    std::size_t best = 0;
    std::vector<bool> on_path(nodes_.size(), false);
    std::function<void(std::size_t, std::size_t)> dfs = [&](std::size_t u, std::size_t len) {
        best = std::max(best, len);
        on_path[u] = true;
        for (const auto &e : edges_)
            if (e.from == u && !on_path[e.to]) dfs(e.to, len + 1);
        on_path[u] = false;
    };
    for (std::size_t u = 0; u < nodes_.size(); ++u) dfs(u, 0);
    return best;
}

bool ccd_commutes(const DiagramCCD &d, double tol) {
    const std::size_t n = d.nodes().size();
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t v = 0; v < n; ++v) {
            if (u == v) continue;
            const auto products = d.path_products(u, v);
            if (products.size() < 2) continue;
            const auto [lo, hi] = std::minmax_element(products.begin(), products.end());
            if (*hi - *lo > tol) return false;
        }
    return true;
}

// ------------------------------------------------------------ Bayesian network

std::vector<double> JointDistribution::marginal(const std::vector<std::size_t> &vars) const {
    const std::size_t n = cardinalities.size();
    std::size_t out_size = 1;
    for (std::size_t v : vars) {
        require(v < n, ErrorKind::invalid_argument, "marginal variable out of range");
        out_size *= cardinalities[v];
    }
    std::vector<double> out(out_size, 0.0);
    std::vector<std::size_t> digit(n, 0);
    for (std::size_t flat = 0; flat < p.size(); ++flat) {
        std::size_t idx = 0;
        for (std::size_t v : vars) idx = idx * cardinalities[v] + digit[v];
        out[idx] += p[flat];
        for (std::size_t k = n; k-- > 0;) {
            if (++digit[k] < cardinalities[k]) break;
            digit[k] = 0;
        }
    }
    return out;
}

JointDistribution chain_joint(const std::vector<BayesVariable> &network) {
    const std::size_t n = network.size();
    require(n > 0, ErrorKind::invalid_argument, "empty network");
    std::size_t total = 1;
    for (const auto &v : network) {
        require(v.cardinality > 0, ErrorKind::invalid_argument, "variable " + v.name + " has no values");
        total *= v.cardinality;
        require(total <= (std::size_t{1} << 24), ErrorKind::resource_limit, "joint table too large");
    }

    // Kahn's algorithm; a leftover node means a cycle.
    std::vector<std::size_t> indeg(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p : network[i].parents) {
            require(p < n, ErrorKind::invalid_argument, "parent index out of range for " + network[i].name);
            ++indeg[i];
        }
    std::vector<std::size_t> order, ready;
    for (std::size_t i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
        const std::size_t u = ready.back();
        ready.pop_back();
        order.push_back(u);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t p : network[i].parents)
                if (p == u && --indeg[i] == 0) ready.push_back(i);
    }
    require(order.size() == n, ErrorKind::invalid_argument, "network contains a cycle");

    for (const auto &v : network) {
        std::size_t rows = 1;
        for (std::size_t p : v.parents) rows *= network[p].cardinality;
        require(v.table.size() == rows, ErrorKind::invalid_argument, "table of " + v.name + " has wrong row count");
        for (const auto &row : v.table) {
            require(row.size() == v.cardinality, ErrorKind::invalid_argument, "table of " + v.name + " has wrong width");
            check_distribution(row, "table of " + v.name);
        }
    }

    JointDistribution j;
    for (const auto &v : network) j.cardinalities.push_back(v.cardinality);
    j.p.assign(total, 0.0);
    std::vector<std::size_t> digit(n, 0);
    for (std::size_t flat = 0; flat < total; ++flat) {
        double prob = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t row = 0;
            for (std::size_t p : network[i].parents) row = row * network[p].cardinality + digit[p];
            prob *= network[i].table[row][digit[i]];
        }
        j.p[flat] = prob;
        for (std::size_t k = n; k-- > 0;) {
            if (++digit[k] < j.cardinalities[k]) break;
            digit[k] = 0;
        }
    }
    return j;
}

// ------------------------------------------------------------ contextuality

std::size_t ContextFamily::var_index(const std::string &name) const {
    auto it = std::find(variables.begin(), variables.end(), name);
    require(it != variables.end(), ErrorKind::invalid_argument, "unknown variable '" + name + "'");
    return static_cast<std::size_t>(it - variables.begin());
}

void ContextFamily::validate() const {
    require(!variables.empty(), ErrorKind::validation_error, "family has no variables");
    require(alphabet_sizes.size() == variables.size(), ErrorKind::validation_error, "alphabet sizes missing");
    for (std::size_t k : alphabet_sizes) require(k > 0, ErrorKind::validation_error, "empty outcome alphabet");
    require(!contexts.empty(), ErrorKind::validation_error, "family has no contexts");
    std::vector<bool> covered(variables.size(), false);
    for (const auto &c : contexts) {
        require(!c.vars.empty(), ErrorKind::validation_error, "context '" + c.id + "' has no variables");
        std::size_t size = 1;
        std::set<std::size_t> seen;
        for (std::size_t v : c.vars) {
            require(v < variables.size(), ErrorKind::validation_error, "context '" + c.id + "' names unknown variable");
            require(seen.insert(v).second, ErrorKind::validation_error, "context '" + c.id + "' repeats a variable");
            covered[v] = true;
            size *= alphabet_sizes[v];
        }
        require(c.distribution.size() == size, ErrorKind::validation_error,
                "context '" + c.id + "' distribution has wrong size");
        double s = 0.0;
        for (double p : c.distribution) {
            require(p >= -1e-12 && p <= 1.0 + 1e-12, ErrorKind::validation_error,
                    "context '" + c.id + "' has a probability outside [0,1]");
            s += p;
        }
        require(std::abs(s - 1.0) <= 1e-9, ErrorKind::validation_error,
                "context '" + c.id + "' probabilities sum to " + std::to_string(s));
    }
    for (std::size_t v = 0; v < variables.size(); ++v)
        require(covered[v], ErrorKind::validation_error, "variable '" + variables[v] + "' is in no context");
}

namespace {

using boost::multiprecision::cpp_rational;

// Row index of every (context, outcome) pair, followed by the normalization row.
struct LpLayout {
    std::vector<std::size_t> context_offset;
    std::size_t rows = 0;
    std::size_t vertices = 1;
};

LpLayout layout(const ContextFamily &f) {
    LpLayout l;
    for (const auto &c : f.contexts) {
        l.context_offset.push_back(l.rows);
        l.rows += c.distribution.size();
    }
    l.rows += 1;
    for (std::size_t k : f.alphabet_sizes) {
        l.vertices *= k;
        require(l.vertices <= (std::size_t{1} << 20), ErrorKind::resource_limit, "too many global assignments");
    }
    return l;
}

// Outcome index of context c under the global assignment `digit`.
std::size_t context_outcome(const ContextFamily &f, const Context &c, const std::vector<std::size_t> &digit) {
    std::size_t idx = 0;
    for (std::size_t v : c.vars) idx = idx * f.alphabet_sizes[v] + digit[v];
    return idx;
}

template <class Visit>
void for_each_assignment(const ContextFamily &f, Visit &&visit) {
    const std::size_t n = f.variables.size();
    std::vector<std::size_t> digit(n, 0);
    std::size_t total = 1;
    for (std::size_t k : f.alphabet_sizes) total *= k;
    for (std::size_t j = 0; j < total; ++j) {
        visit(j, digit);
        for (std::size_t k = n; k-- > 0;) {
            if (++digit[k] < f.alphabet_sizes[k]) break;
            digit[k] = 0;
        }
    }
}

}  // namespace

FeasibilityResult joint_feasible(const ContextFamily &family) {
    family.validate();
    const LpLayout l = layout(family);
    const auto m = static_cast<Eigen::Index>(l.rows);
    const auto n = static_cast<Eigen::Index>(l.vertices);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, n);
    Eigen::VectorXd b(m);
    for (std::size_t c = 0; c < family.contexts.size(); ++c)
        for (std::size_t o = 0; o < family.contexts[c].distribution.size(); ++o)
            b[static_cast<Eigen::Index>(l.context_offset[c] + o)] = std::max(0.0, family.contexts[c].distribution[o]);
    b[m - 1] = 1.0;
    for_each_assignment(family, [&](std::size_t j, const std::vector<std::size_t> &digit) {
        for (std::size_t c = 0; c < family.contexts.size(); ++c)
            a(static_cast<Eigen::Index>(l.context_offset[c] + context_outcome(family, family.contexts[c], digit)),
              static_cast<Eigen::Index>(j)) = 1.0;
        a(m - 1, static_cast<Eigen::Index>(j)) = 1.0;
    });

    const detail::PhaseOneResult lp = detail::phase_one(a, b);

    FeasibilityResult r;
    Eigen::VectorXd w = lp.primal.cwiseMax(0.0);
    const double mass = w.sum();
    if (mass > 0.0) w /= mass;
    r.max_marginal_error = (a * w - b).cwiseAbs().maxCoeff();
    if (r.max_marginal_error <= kMarginalTol) {
        r.feasible = true;
        r.witness.assign(w.data(), w.data() + w.size());
        return r;
    }

    // Farkas certificate from the phase-one duals. Shift the constant term so
    // that every deterministic assignment satisfies the inequality, then
    // evaluate the violation; small instances are checked in exact rationals.
    Eigen::VectorXd y = lp.dual;
    const double scale = y.cwiseAbs().maxCoeff();
    if (scale > 0.0) y /= scale;
    InfeasibilityCertificate cert;
    const bool exact = l.vertices <= 4096;
    if (exact) {
        std::vector<cpp_rational> yr(static_cast<std::size_t>(m));
        for (Eigen::Index i = 0; i < m; ++i) yr[static_cast<std::size_t>(i)] = cpp_rational(y[i]);
        cpp_rational worst;
        bool first = true;
        for (Eigen::Index j = 0; j < n; ++j) {
            cpp_rational s = 0;
            for (Eigen::Index i = 0; i < m; ++i)
                if (a(i, j) != 0.0) s += yr[static_cast<std::size_t>(i)];
            if (first || s > worst) worst = s;
            first = false;
        }
        yr.back() -= worst;
        cpp_rational viol = 0;
        for (Eigen::Index i = 0; i < m; ++i) viol += yr[static_cast<std::size_t>(i)] * cpp_rational(b[i]);
        y[m - 1] = static_cast<double>(yr.back());
        cert.violation = static_cast<double>(viol);
        cert.verified_exact = viol > 0;
    } else {
        const double worst = (y.transpose() * a).maxCoeff();
        y[m - 1] -= worst;
        cert.violation = y.dot(b);
    }
    for (std::size_t c = 0; c < family.contexts.size(); ++c) {
        std::vector<double> row;
        for (std::size_t o = 0; o < family.contexts[c].distribution.size(); ++o)
            row.push_back(y[static_cast<Eigen::Index>(l.context_offset[c] + o)]);
        cert.coefficients.push_back(std::move(row));
    }
    cert.constant = y[m - 1];
    r.certificate = std::move(cert);
    return r;
}

namespace {

std::string outcome_label(const ContextFamily &f, std::size_t var, std::size_t value) {
    if (var < f.outcome_labels.size() && value < f.outcome_labels[var].size()) return f.outcome_labels[var][value];
    return std::to_string(value);
}

nlohmann::json assignment_json(const ContextFamily &f, const std::vector<std::size_t> &vars,
                               const std::vector<std::size_t> &values) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t k = 0; k < vars.size(); ++k) j[f.variables[vars[k]]] = outcome_label(f, vars[k], values[k]);
    return j;
}

std::vector<std::size_t> decode(std::size_t idx, const std::vector<std::size_t> &sizes) {
    std::vector<std::size_t> out(sizes.size());
    for (std::size_t k = sizes.size(); k-- > 0;) {
        out[k] = idx % sizes[k];
        idx /= sizes[k];
    }
    return out;
}

}  // namespace

nlohmann::json feasibility_report(const ContextFamily &family, const FeasibilityResult &r) {
    nlohmann::json j;
    j["feasible"] = r.feasible;
    j["variables"] = family.variables;
    j["max_marginal_error"] = r.max_marginal_error;
    std::vector<std::size_t> all(family.variables.size());
    std::iota(all.begin(), all.end(), 0);
    if (r.feasible) {
        nlohmann::json w = nlohmann::json::array();
        for (std::size_t k = 0; k < r.witness.size(); ++k) {
            if (r.witness[k] <= 0.0) continue;
            w.push_back({{"assignment", assignment_json(family, all, decode(k, family.alphabet_sizes))},
                         {"weight", r.witness[k]}});
        }
        j["witness"] = std::move(w);
    } else if (r.certificate) {
        nlohmann::json terms = nlohmann::json::array();
        for (std::size_t c = 0; c < family.contexts.size(); ++c) {
            const auto &ctx = family.contexts[c];
            std::vector<std::size_t> sizes;
            for (std::size_t v : ctx.vars) sizes.push_back(family.alphabet_sizes[v]);
            for (std::size_t o = 0; o < ctx.distribution.size(); ++o) {
                const double coeff = r.certificate->coefficients[c][o];
                if (coeff == 0.0) continue;
                terms.push_back({{"context", ctx.id},
                                 {"assignment", assignment_json(family, ctx.vars, decode(o, sizes))},
                                 {"coefficient", coeff}});
            }
        }
        j["certificate"] = {{"terms", std::move(terms)},
                            {"constant", r.certificate->constant},
                            {"violation", r.certificate->violation},
                            {"verified_exact", r.certificate->verified_exact},
                            {"reading", "sum(coefficient * p) + constant <= 0 for every classical model"}};
    }
    return j;
}

// ------------------------------------------------------------------------ CSV

namespace {

std::vector<std::string> split_csv(const std::string &line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    for (auto &s : out) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    return out;
}

bool all_integers(const std::vector<std::string> &labels) {
    for (const auto &s : labels) {
        if (s.empty()) return false;
        std::size_t pos = 0;
        try {
            (void)std::stol(s, &pos);
        } catch (...) {
            return false;
        }
        if (pos != s.size()) return false;
    }
    return true;
}

}  // namespace

ContextFamily read_context_csv(std::istream &is) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        header = split_csv(line);
        break;
    }
    require(header.size() >= 3, ErrorKind::parse_error, "line " + std::to_string(line_no) +
                                                            ": header must be context_id,<variables...>,probability");
    require(header.front() == "context_id" && header.back() == "probability", ErrorKind::parse_error,
            "line " + std::to_string(line_no) + ": header must start with context_id and end with probability");

    ContextFamily f;
    f.variables.assign(header.begin() + 1, header.end() - 1);
    const std::size_t nv = f.variables.size();

    struct Row {
        std::size_t line;
        std::string context;
        std::vector<std::string> values;
        double p;
    };
    std::vector<Row> rows;
    std::vector<std::set<std::string>> labels(nv);
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
        auto cells = split_csv(line);
        const std::string where = "line " + std::to_string(line_no);
        require(cells.size() == header.size(), ErrorKind::parse_error,
                where + ": expected " + std::to_string(header.size()) + " fields, got " + std::to_string(cells.size()));
        require(!cells.front().empty(), ErrorKind::parse_error, where + ": empty context_id");
        double p = 0.0;
        try {
            std::size_t pos = 0;
            p = std::stod(cells.back(), &pos);
            require(pos == cells.back().size(), ErrorKind::parse_error, where + ": malformed probability");
        } catch (const Error &) {
            throw;
        } catch (...) {
            fail(ErrorKind::parse_error, where + ": malformed probability '" + cells.back() + "'");
        }
        require(p >= 0.0 && p <= 1.0, ErrorKind::parse_error, where + ": probability outside [0,1]");
        Row r{line_no, cells.front(), std::vector<std::string>(cells.begin() + 1, cells.end() - 1), p};
        for (std::size_t v = 0; v < nv; ++v)
            if (!r.values[v].empty()) labels[v].insert(r.values[v]);
        rows.push_back(std::move(r));
    }
    require(!rows.empty(), ErrorKind::parse_error, "no data rows");

    f.outcome_labels.resize(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        std::vector<std::string> l(labels[v].begin(), labels[v].end());
        if (all_integers(l))
            std::sort(l.begin(), l.end(), [](const auto &x, const auto &y) { return std::stol(x) < std::stol(y); });
        require(!l.empty(), ErrorKind::validation_error, "variable '" + f.variables[v] + "' never takes a value");
        f.alphabet_sizes.push_back(l.size());
        f.outcome_labels[v] = std::move(l);
    }

    std::map<std::string, std::size_t> ctx_index;
    for (const auto &r : rows) {
        std::vector<std::size_t> vars;
        for (std::size_t v = 0; v < nv; ++v)
            if (!r.values[v].empty()) vars.push_back(v);
        const std::string where = "line " + std::to_string(r.line);
        require(!vars.empty(), ErrorKind::parse_error, where + ": row assigns no variables");
        auto it = ctx_index.find(r.context);
        if (it == ctx_index.end()) {
            std::size_t size = 1;
            for (std::size_t v : vars) size *= f.alphabet_sizes[v];
            it = ctx_index.emplace(r.context, f.contexts.size()).first;
            f.contexts.push_back({r.context, vars, std::vector<double>(size, 0.0)});
        }
        Context &c = f.contexts[it->second];
        require(c.vars == vars, ErrorKind::parse_error,
                where + ": context '" + r.context + "' rows assign different variable sets");
        std::size_t idx = 0;
        for (std::size_t v : vars) {
            const auto &l = f.outcome_labels[v];
            const auto pos = static_cast<std::size_t>(std::find(l.begin(), l.end(), r.values[v]) - l.begin());
            idx = idx * f.alphabet_sizes[v] + pos;
        }
        c.distribution[idx] += r.p;
    }
    f.validate();
    return f;
}

void write_context_csv(std::ostream &os, const ContextFamily &f) {
    os << "context_id";
    for (const auto &v : f.variables) os << ',' << v;
    os << ",probability\n";
    char buf[64];
    for (const auto &c : f.contexts) {
        std::vector<std::size_t> sizes;
        for (std::size_t v : c.vars) sizes.push_back(f.alphabet_sizes[v]);
        for (std::size_t o = 0; o < c.distribution.size(); ++o) {
            const auto values = decode(o, sizes);
            os << c.id;
            for (std::size_t v = 0; v < f.variables.size(); ++v) {
                os << ',';
                auto it = std::find(c.vars.begin(), c.vars.end(), v);
                if (it != c.vars.end()) os << outcome_label(f, v, values[static_cast<std::size_t>(it - c.vars.begin())]);
            }
            std::snprintf(buf, sizeof buf, ",%.17g\n", c.distribution[o]);
            os << buf;
        }
    }
}

ContextFamily pr_box_family() {
    ContextFamily f;
    f.variables = {"A0", "A1", "B0", "B1"};
    f.alphabet_sizes = {2, 2, 2, 2};
    const std::vector<double> corr{0.5, 0.0, 0.0, 0.5};
    const std::vector<double> anti{0.0, 0.5, 0.5, 0.0};
    f.contexts = {{"A0B0", {0, 2}, corr}, {"A0B1", {0, 3}, corr}, {"A1B0", {1, 2}, corr}, {"A1B1", {1, 3}, anti}};
    return f;
}

ContextFamily family_from_joint(const std::vector<std::string> &variables, const std::vector<std::size_t> &alphabet_sizes,
                                const std::vector<double> &joint, const std::vector<std::vector<std::size_t>> &contexts) {
    JointDistribution j{alphabet_sizes, joint};
    ContextFamily f;
    f.variables = variables;
    f.alphabet_sizes = alphabet_sizes;
    for (std::size_t c = 0; c < contexts.size(); ++c)
        f.contexts.push_back({"c" + std::to_string(c), contexts[c], j.marginal(contexts[c])});
    f.validate();
    return f;
}

}  // namespace qfep
