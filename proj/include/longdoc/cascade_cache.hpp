#pragma once

#include <deque>
#include <unordered_map>
#include <vector>

namespace longdoc {

/// Bounded token-retention cache with exponentially staged sub-caches.
/// Stage 0 holds the newest tokens; when a stage overflows, its oldest token
/// moves to the next (older) stage. Entry into a full stage is contested:
/// the token survives only if its accumulated attention mass exceeds the
/// median mass of the stage's members, otherwise it is evicted. A token
/// pushed past the last stage is always evicted. With a budget covering the
/// whole input no contest ever happens, so nothing is evicted.
class CascadeCache {
  public:
    explicit CascadeCache(int budget);

    void append(int token_index);
    /// Accumulates attention mass for a retained token; ignored once evicted.
    void add_mass(int token_index, double mass);

    bool contains(int token_index) const { return mass_.count(token_index) > 0; }
    int size() const;
    int budget() const { return budget_; }
    const std::vector<int>& stage_capacities() const { return capacities_; }

    /// Retained token indices in ascending order.
    std::vector<int> retained() const;

  private:
    double stage_median_mass(const std::deque<int>& stage) const;

    int budget_;
    std::vector<int> capacities_;       // capacities_[0] = newest stage
    std::vector<std::deque<int>> stages_;  // front = newest within a stage
    std::unordered_map<int, double> mass_;
};

}  // namespace longdoc
