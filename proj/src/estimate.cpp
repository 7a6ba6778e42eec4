#include "desup/estimate.hpp"

#include <algorithm>

namespace desup {

EstimateLabel::EstimateLabel(std::vector<StateId> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool EstimateLabel::contains(StateId q) const {
    return std::binary_search(members_.begin(), members_.end(), q);
}

bool EstimateLabel::subset_of(const EstimateLabel& other) const {
    return std::includes(other.members_.begin(), other.members_.end(), members_.begin(),
                         members_.end());
}

EstimateLabel EstimateLabel::minus(std::span<const StateId> removed) const {
    EstimateLabel out;
    std::set_difference(members_.begin(), members_.end(), removed.begin(), removed.end(),
                        std::back_inserter(out.members_));
    return out;
}

std::size_t EstimateLabelHash::operator()(const EstimateLabel& label) const {
    // FNV-1a over the member ids.
    std::size_t h = 1469598103934665603ull;
    for (StateId q : label.members()) {
        h ^= q;
        h *= 1099511628211ull;
    }
    return h;
}

std::string to_string(const EstimateLabel& label) {
    std::string out = "{";
    for (std::size_t i = 0; i < label.members().size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += std::to_string(label.members()[i]);
    }
    out += '}';
    return out;
}

}  // namespace desup
