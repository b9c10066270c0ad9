#pragma once

#include <cstdint>
#include <functional>

#include "ldst/model.hpp"
#include "ldst/robust.hpp"

namespace ldst {

inline constexpr std::uint64_t kDefaultPolicyCap = 1'000'000;

/// Number of deterministic policies (product of action counts).
/// Throws Error(cap_exceeded) above `cap`.
std::uint64_t count_policies(const Instance& instance, std::uint64_t cap = kDefaultPolicyCap);

/// Streams every policy exactly once, in lexicographic order over states
/// sorted by (stage, id) with actions sorted by name.
void enumerate_policies(const Instance& instance, const std::function<void(const Policy&)>& visit,
                        std::uint64_t cap = kDefaultPolicyCap);

struct OptimumResult {
    Policy policy;
    double value = 0.0;        // max worst-case reward
    std::uint64_t policies = 0; // number of policies examined
};

/// Brute-force optimum of the worst-case reward; ties resolve to the first
/// policy in enumeration order. Ground truth for everything else here.
OptimumResult exact_optimum(const Instance& instance, std::uint64_t policy_cap = kDefaultPolicyCap,
                            std::uint64_t scenario_cap = kDefaultScenarioCap);

} // namespace ldst
