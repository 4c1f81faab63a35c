// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
//
// Periodic points of the semigroup: fixed points of contracted arcs, the
// G ∘ g^m ∘ F construction inside a prescribed arc, and density sweeps.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "arcs.hpp"
#include "ifs.hpp"
#include "symbolic.hpp"

namespace cifs {

inline constexpr double kTolFix = 1e-9;

struct PeriodicPointRecord {
  Word word;  // the composition f_{w_n} ∘ ... ∘ f_{w_1}
  CirclePoint point;
  double residual = 0.0;
  double multiplier = 1.0;
  double log_multiplier = 0.0;  // survives under/overflow of long products
  FixedPointStability stability = FixedPointStability::Neutral;
};

/// Residual, multiplier and stability of `word` at `q`.
PeriodicPointRecord make_record(const IFS& ifs, const Word& word, CirclePoint q);

struct ContractedArc {
  Word word;  // prefix w of the sampled sequence
  Arc U;      // f_w(U) inside U and shorter
  PeriodicPointRecord record;
};

ContractedArc find_contracted_fixed_arc(const IFS& ifs, const Word& omega);
ContractedArc find_contracted_fixed_arc(const IFS& ifs, const SequenceModel& model, std::uint64_t seed,
                                        int horizon = 5000);

struct PeriodicSearchParams {
  int depth_f = 12;
  int depth_g = 12;
  std::size_t node_cap = 100000;
  int m_max = 5000;
};

PeriodicPointRecord periodic_in_interval(const IFS& ifs, const Arc& J, const ContractedArc& attractor,
                                         const PeriodicSearchParams& params = {});

/// A repelling periodic point in J: the attracting construction on the inverse
/// IFS, mapped back (reversed word, reciprocal multiplier). The residual is
/// measured for the inverse composition.
PeriodicPointRecord repelling_in_interval(const IFS& ifs, const Arc& J, const ContractedArc& inverse_attractor,
                                          const PeriodicSearchParams& params = {});

struct SweepRow {
  int arc_index = 0;
  std::string cls;  // "attracting" or "repelling"
  bool found = false;
  std::optional<PeriodicPointRecord> record;
  std::string error;
};

struct SweepParams {
  std::optional<SequenceModel> model;  // uniform when empty
  std::uint64_t seed = 0;
  int horizon = 5000;
  PeriodicSearchParams search;
};

struct SweepReport {
  int mesh = 0;
  int attracting = 0;
  int repelling = 0;
  std::vector<SweepRow> rows;
  std::vector<std::string> notes;
};

SweepReport density_sweep(const IFS& ifs, int mesh, const SweepParams& params = {});

}  // namespace cifs
