#pragma once

#include "sdaas/schedule.hpp"
#include "sdaas/types.hpp"

namespace sdaas {

struct OracleLimits {
  int max_requests = 6;
  int max_slots = 4;
};

/// Exhaustive search over every subset of offers and every slot assignment;
/// returns a maximum-profit feasible schedule. Ties break lexicographically
/// on the allocated id set, then on the slot vector. Refuses instances
/// beyond the stated limits.
Schedule oracle_optimal(const std::vector<ServiceOffer>& offers, const ProviderConfig& cfg,
                        const OracleLimits& limits = {});

}  // namespace sdaas
