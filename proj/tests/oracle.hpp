#pragma once

#include "evac/instance.hpp"

// Exhaustive search over all integral time-expanded flows of a tiny instance
// (travel times up to 2): maximum number of people at exits by `deadline`
// among flows that park everyone at an exit by t_max. Returns -1 when no such
// flow exists. Independent of the solver and model-assembly code.
long long oracle_best_evacuated(const evac::Instance& inst, int deadline);
