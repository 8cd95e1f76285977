#pragma once

#include <string>
#include <vector>

#include "evac/rational.hpp"

namespace evac {

// Declarative behavior model: either everyone follows the prescribed schedule
// with delay tau_i (prob alpha_i), or with prob alpha follows it and with
// 1-alpha heads for the nearest exit.
struct BehaviorSpec {
    enum class Kind { Dbm, Nebm };
    struct Delay {
        int tau = 0;
        Rat alpha;
    };

    Kind kind = Kind::Dbm;
    std::vector<Delay> delays;  // Dbm: distinct taus, alphas > 0 summing to 1
    Rat alpha;                  // Nebm: follow probability in [0,1]

    int copies() const { return kind == Kind::Dbm ? (int)delays.size() : 2; }
    // Probability bound to copy i (z_i): alpha_i, or {alpha, 1-alpha}.
    Rat copy_prob(int i) const;
    void check() const;  // throws std::invalid_argument on violations

    static BehaviorSpec dbm(std::vector<Delay> d);
    static BehaviorSpec nebm(Rat alpha);
};

}  // namespace evac
