#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "qamem/core.hpp"
#include "qamem/qstate.hpp"

namespace qamem {

/// Sorted distinct register values x with f(x) = 1 over an n-bit space.
class MarkedSet {
public:
    MarkedSet() = default;

    MarkedSet(int n, std::vector<Index> values) : n_(n), values_(std::move(values)) {
        if (n < 0 || n > kMaxRegisterQubits) throw CapacityError("MarkedSet: width out of range");
        std::sort(values_.begin(), values_.end());
        if (std::adjacent_find(values_.begin(), values_.end()) != values_.end()) {
            throw ValidationError("MarkedSet: repeated value");
        }
        if (!values_.empty() && values_.back() >= pow2(n)) {
            throw ValidationError("MarkedSet: value " + std::to_string(values_.back()) + " does not fit in " +
                                  std::to_string(n) + " bits");
        }
    }

    int n() const { return n_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }
    const std::vector<Index>& values() const { return values_; }
    bool contains(Index v) const { return std::binary_search(values_.begin(), values_.end(), v); }

    /// Dense membership table over [0, 2^n).
    std::vector<bool> mask() const {
        std::vector<bool> m(pow2(n_), false);
        for (auto v : values_) m[v] = true;
        return m;
    }

    friend bool operator==(const MarkedSet&, const MarkedSet&) = default;

private:
    int n_ = 0;
    std::vector<Index> values_;
};

/// Register qubits (1-based) whose value is known and which the oracle and
/// the NLE sweeps ignore.
class KnownQubits {
public:
    KnownQubits() = default;

    KnownQubits(int n, std::vector<int> qubits) : n_(n), known_(std::move(qubits)) {
        std::sort(known_.begin(), known_.end());
        if (std::adjacent_find(known_.begin(), known_.end()) != known_.end()) {
            throw ValidationError("known qubits: repeated index");
        }
        for (int q : known_) {
            if (q < 1 || q > n) throw ValidationError("known qubits: index " + std::to_string(q) + " outside [1, n]");
        }
        for (int q = 1; q <= n; ++q) {
            if (!std::binary_search(known_.begin(), known_.end(), q)) active_.push_back(q);
        }
    }

    static KnownQubits none(int n) { return KnownQubits(n, {}); }

    int n() const { return n_; }
    int t() const { return static_cast<int>(known_.size()); }
    const std::vector<int>& known() const { return known_; }
    /// Remaining register qubits, ascending.
    const std::vector<int>& active() const { return active_; }

    /// Packs the active bits of y into an (n - t)-bit value, lowest active
    /// qubit first.
    Index restrict(Index y) const {
        Index r = 0;
        for (std::size_t i = 0; i < active_.size(); ++i) {
            if ((y >> (active_[i] - 1)) & 1U) r |= pow2(static_cast<int>(i));
        }
        return r;
    }

private:
    int n_ = 0;
    std::vector<int> known_;
    std::vector<int> active_;
};

/// U_f: amplitude(y, k) -> amplitude(y, k XOR [y in marked]).
inline PureState oracle_apply(const PureState& s, const MarkedSet& marked) {
    if (marked.n() != s.n()) {
        throw ValidationError("oracle: marked set width " + std::to_string(marked.n()) + " != register width " +
                              std::to_string(s.n()));
    }
    std::vector<Complex> out(s.amplitudes().begin(), s.amplitudes().end());
    for (Index y : marked.values()) std::swap(out[2 * y], out[2 * y + 1]);
    return StateBuilder::make(s.n(), std::move(out));
}

/// Oracle acting on the (n - t) active qubits only: flips the flag for every
/// register value whose active bits form a marked value, whatever the known
/// qubits hold.
inline PureState restricted_oracle_apply(const PureState& s, const MarkedSet& marked, const KnownQubits& known) {
    if (known.n() != s.n()) throw ValidationError("restricted oracle: known-qubit set built for another width");
    if (marked.n() != s.n() - known.t()) {
        throw ValidationError("restricted oracle: marked width " + std::to_string(marked.n()) + " != n - t = " +
                              std::to_string(s.n() - known.t()));
    }
    const auto m = marked.mask();
    std::vector<Complex> out(s.amplitudes().begin(), s.amplitudes().end());
    for (Index y = 0; y < s.register_dim(); ++y) {
        if (m[known.restrict(y)]) std::swap(out[2 * y], out[2 * y + 1]);
    }
    return StateBuilder::make(s.n(), std::move(out));
}

/// Full-width register values flagged by the restricted oracle.
inline std::vector<Index> expand_marked(const MarkedSet& marked, const KnownQubits& known) {
    const auto m = marked.mask();
    std::vector<Index> out;
    for (Index y = 0; y < pow2(known.n()); ++y) {
        if (m[known.restrict(y)]) out.push_back(y);
    }
    return out;
}

}  // namespace qamem
