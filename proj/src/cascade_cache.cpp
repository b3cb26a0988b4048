#include "longdoc/cascade_cache.hpp"

#include <algorithm>

#include "longdoc/error.hpp"

namespace longdoc {

CascadeCache::CascadeCache(int budget) : budget_(budget) {
    if (budget < 1) fail(ErrorKind::config, "cascade cache budget must be >= 1");
    // halve capacity per older stage until the budget is spent
    int remaining = budget;
    int cap = (budget + 1) / 2;
    while (remaining > 0) {
        cap = std::min(std::max(cap, 1), remaining);
        capacities_.push_back(cap);
        remaining -= cap;
        cap = (cap + 1) / 2;
    }
    stages_.resize(capacities_.size());
}

int CascadeCache::size() const {
    int n = 0;
    for (const auto& stage : stages_) n += static_cast<int>(stage.size());
    return n;
}

double CascadeCache::stage_median_mass(const std::deque<int>& stage) const {
    std::vector<double> masses;
    masses.reserve(stage.size());
    for (int token : stage) masses.push_back(mass_.at(token));
    auto mid = masses.begin() + static_cast<std::ptrdiff_t>((masses.size() - 1) / 2);
    std::nth_element(masses.begin(), mid, masses.end());
    return *mid;
}

void CascadeCache::append(int token_index) {
    mass_.emplace(token_index, 0.0);
    stages_[0].push_front(token_index);
    for (std::size_t i = 0; i < stages_.size(); ++i) {
        if (static_cast<int>(stages_[i].size()) <= capacities_[i]) break;
        int overflow = stages_[i].back();
        stages_[i].pop_back();
        if (i + 1 >= stages_.size()) {
            mass_.erase(overflow);
            break;
        }
        auto& next = stages_[i + 1];
        if (static_cast<int>(next.size()) < capacities_[i + 1]) {
            next.push_front(overflow);
            break;
        }
        if (mass_.at(overflow) > stage_median_mass(next)) {
            next.push_front(overflow);  // next stage now overflows; cascade on
        } else {
            mass_.erase(overflow);
            break;
        }
    }
}

void CascadeCache::add_mass(int token_index, double mass) {
    auto it = mass_.find(token_index);
    if (it != mass_.end()) it->second += mass;
}

std::vector<int> CascadeCache::retained() const {
    std::vector<int> out;
    out.reserve(mass_.size());
    for (const auto& stage : stages_) out.insert(out.end(), stage.begin(), stage.end());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace longdoc
