// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "promdao/asub.hpp"
#include "promdao/rom.hpp"

namespace promdao {

// Consistent database of local PROM tuples sampled in the active subspace.
struct PromDatabase {
  std::vector<PromEntry> entries;
  AsBasis basis;
  int ref_index = 0;
  std::uint64_t hdm_digest = 0;
  bool consistency_applied = false;
  std::vector<double> history;  // max error-indicator per greedy iteration
  bool budget_exhausted = false;
  Eigen::MatrixXd as_snapshots;  // snapshot matrix behind the basis (optional)

  void require_consistent_dims() const;
};

// Versioned JSON envelope; matrices are stored as base64 little-endian
// float64 row-major payloads, so a save/load round trip is bit exact. Writes
// go through a temp file plus rename.
void save_database(const PromDatabase& db, const std::string& path);

// expected_digest, when given, must match the stored hdm_digest.
PromDatabase load_database(const std::string& path,
                           std::optional<std::uint64_t> expected_digest = std::nullopt);

}  // namespace promdao
