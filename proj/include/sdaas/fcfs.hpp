#pragma once

#include "sdaas/schedule.hpp"
#include "sdaas/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sdaas {

struct FcfsResult {
  Schedule schedule;
  std::vector<std::pair<RequestId, std::string>> skipped;  // id, reason
};

/// First-come-first-served baseline: walks the records in arrival order and
/// places each eligible request at the earliest capacity-feasible arrival
/// slot in its window; requests that fit nowhere are skipped.
FcfsResult allocate_fcfs(const std::vector<CompositionRecord>& records,
                         const std::vector<Request>& requests, const ProviderConfig& cfg,
                         double slot_granularity);

void write_skipped_csv(const std::string& path,
                       const std::vector<std::pair<RequestId, std::string>>& skipped);

}  // namespace sdaas
