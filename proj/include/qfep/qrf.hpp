#pragma once

// Quantum reference frames as executable measurement programs: a sector of
// screen qubits, a measurement axis per qubit, and a feed-forward classifier
// program that turns raw bits into a record.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qfep/channel.hpp"
#include "qfep/screen.hpp"

namespace qfep {

enum class GateOp { input, identity, negate, conj, disj, parity };

std::string_view to_string(GateOp op);
GateOp gate_from_string(std::string_view s);

// Feed-forward boolean program laid out as a weighted diagram. Node inputs are
// the sources of its incoming edges, in edge insertion order. At most three
// layers of gates.
class RecordProgram {
public:
    RecordProgram(std::size_t n_inputs, DiagramCCD diagram, std::vector<GateOp> ops, std::vector<std::size_t> outputs);

    static RecordProgram identity(std::size_t width);
    static RecordProgram negation(std::size_t width);

    std::size_t arity() const { return n_inputs_; }
    std::size_t output_width() const { return outputs_.size(); }
    const DiagramCCD &diagram() const { return diagram_; }
    const std::vector<GateOp> &ops() const { return ops_; }
    const std::vector<std::size_t> &outputs() const { return outputs_; }

    std::vector<int> run(const std::vector<int> &bits) const;
    // Preparation direction: the unique input pattern producing `record`.
    // Throws invalid-argument when the program is not injective.
    std::vector<int> preimage(const std::vector<int> &record) const;
    bool invertible() const;

private:
    std::size_t n_inputs_;
    DiagramCCD diagram_;
    std::vector<GateOp> ops_;
    std::vector<std::size_t> outputs_;
    std::vector<std::vector<std::size_t>> inputs_of_;
    std::vector<std::size_t> order_;
};

struct QRF {
    std::string name;
    std::vector<std::size_t> sector;
    std::vector<BasisAxis> axes;
    RecordProgram program;

    QRF(std::string name, std::vector<std::size_t> sector, std::vector<BasisAxis> axes);
    QRF(std::string name, std::vector<std::size_t> sector, std::vector<BasisAxis> axes, RecordProgram program);

    // Reads the sector along the frame's axes and runs the program.
    std::vector<int> read(QubitScreen &screen, Rng &rng, const std::string &actor = "A") const;
    void set_axis(std::size_t qubit, const BasisAxis &axis);
};

struct ContextPair {
    QRF u;
    QRF v;
    std::vector<std::size_t> background;
};

// Product of the per-qubit axis observables on the sector, identity elsewhere.
HermitianOperator observable_of(const QRF &q, std::size_t n_qubits);
// Max-norm of the commutator below 1e-9. Evaluated on the union of the two
// sectors; identity factors elsewhere do not change the norm.
bool qrfs_commute(const QRF &a, const QRF &b);
double commutator_norm(const QRF &a, const QRF &b);

// Statistics of the contexts (U, background) and (V, background) for a screen
// state. Variables: U.name, V.name and one "q<i>" per background qubit, read
// along z. Exact mode uses Born weights; otherwise `shots` samples per context.
ContextFamily context_statistics(const StateVector &state, const ContextPair &pair, std::optional<std::size_t> shots,
                                 Rng *rng = nullptr);

bool codeployable(const ContextPair &pair, const ContextFamily &stats);

// Single-qubit unitary carrying `from` to `to`: U (from.sigma) U^dagger = to.sigma.
Eigen::Matrix2cd rotation_between(const BasisAxis &from, const BasisAxis &to);

// Replaces the actor's axes on the target sector only. Throws if the rotation
// names a qubit outside the sector or in the background.
InteractionSpec context_switch(const InteractionSpec &spec, const QRF &target,
                               const std::map<std::size_t, BasisAxis> &rotation,
                               const std::vector<std::size_t> &background = {}, char actor = 'A');

using ScreenDynamics = std::function<StateVector(const StateVector &)>;

// Checks interpret-then-compute against evolve-then-interpret on random basis
// preparations of the frame's sector, bit-exact.
bool implements_check(const QRF &q, const ScreenDynamics &dynamics, std::size_t n_qubits, std::size_t trials, Rng &rng);

// Declarative block. Keys: sector ("0 1"), axes ("0 0 1 | 1 0 0"), optional
// program ("identity" | "not"), or nodes ("h=parity o=not"), edges
// ("in0->h:1 in1->h:1 h->o:1"), outputs ("o").
QRF qrf_from_config(const std::string &name, const std::map<std::string, std::string> &kv);

}  // namespace qfep
