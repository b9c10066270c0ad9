#pragma once

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "ldst/model.hpp"

namespace ldst::testing {

/// Two actions at the start, each routing through a pass-through middle state
/// to its own unit-reward terminal whose reward can drop to 0; budget 1.
/// The nominal optimum is 1 while every deterministic policy has worst case 0.
inline Instance two_arms() {
    Instance inst;
    inst.horizon = 2;
    inst.initial = "s0";
    inst.kind = UncertaintyKind::reward;
    inst.budget = 1;

    State s0;
    s0.id = "s0";
    s0.stage = 0;
    Action a{"a", {{"ma", 1.0}}, {}, 0.0};
    Action b{"b", {{"mb", 1.0}}, {}, 0.0};
    s0.actions = {a, b};
    inst.states.push_back(s0);

    for (const auto& [mid, term] : {std::pair{"ma", "t1"}, std::pair{"mb", "t2"}}) {
        State m;
        m.id = mid;
        m.stage = 1;
        m.actions.push_back({"go", {{term, 1.0}}, {}, 0.0});
        inst.states.push_back(m);
        State t;
        t.id = term;
        t.stage = 2;
        t.reward = 1.0;
        t.alt_reward = 0.0;
        inst.states.push_back(t);
    }
    return inst;
}

inline Policy make_policy(std::map<std::string, std::string> assignment) {
    Policy p;
    p.assignment = std::move(assignment);
    return p;
}

inline bool close(double a, double b, double tol = 1e-9) { return std::fabs(a - b) <= tol; }

} // namespace ldst::testing
