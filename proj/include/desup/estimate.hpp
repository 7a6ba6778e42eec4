// Adversary state estimates: the label sets attached to observer states.

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "desup/automaton.hpp"

namespace desup {

/// An immutable sorted set of plant state ids — the adversary's estimate of
/// where the plant might be after some observation.
class EstimateLabel {
public:
    EstimateLabel() = default;
    explicit EstimateLabel(std::vector<StateId> members);

    const std::vector<StateId>& members() const { return members_; }

    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }

    bool contains(StateId q) const;

    bool subset_of(const EstimateLabel& other) const;

    /// Set difference: this minus the (sorted ascending) ids in `removed`.
    EstimateLabel minus(std::span<const StateId> removed) const;

    friend bool operator==(const EstimateLabel&, const EstimateLabel&) = default;
    friend auto operator<=>(const EstimateLabel&, const EstimateLabel&) = default;

private:
    std::vector<StateId> members_;  // ascending, unique
};

struct EstimateLabelHash {
    std::size_t operator()(const EstimateLabel& label) const;
};

/// "{1,4,7}" — for diagnostics only (uses raw state ids, not document names).
std::string to_string(const EstimateLabel& label);

}  // namespace desup
