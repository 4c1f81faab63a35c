// Copyright 2026 circle-ifs developers
// SPDX-License-Identifier: Apache-2.0
//
// JSON forms of maps, models, words and results. Parsing errors carry the
// field path, e.g. "generators[1].b".
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "certifier.hpp"
#include "ifs.hpp"
#include "periodic_points.hpp"
#include "synchronization.hpp"

namespace cifs {

using Json = nlohmann::json;

Json to_json(const LiftMap& f);
LiftMap map_from_json(const Json& j, const std::string& path = "map");

Json to_json(const SequenceModel& m);
SequenceModel model_from_json(const Json& j, const std::string& path = "model");

Json to_json(const Word& w);
Word word_from_json(const Json& j, int k, const std::string& path = "word");

Json to_json(const Arc& a);
Arc arc_from_json(const Json& j, const std::string& path = "arc");

Json to_json(const BasinData& b);
Json to_json(const Certificate& c);
Certificate certificate_from_json(const Json& j, const std::string& path = "certificate");
Json to_json(const Verification& v);

Json to_json(const MinimalityReport& r);
Json to_json(const DensityResult& r);
Json to_json(const SyncReport& r);
Json to_json(const RepellerEstimate& r);
Json to_json(const AntonovEvidence& e);
Json to_json(const PeriodicPointRecord& r);
Json to_json(const UniversalWord& u);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

/// Canonical text: sorted keys, shortest round-trip floats, trailing newline.
std::string canonical(const Json& j);

/// Field accessors that throw Config errors naming the path.
namespace field {
const Json* find(const Json& obj, const std::string& key);
double number(const Json& obj, const std::string& key, const std::string& path);
double number_or(const Json& obj, const std::string& key, double fallback, const std::string& path);
long integer(const Json& obj, const std::string& key, const std::string& path);
long integer_or(const Json& obj, const std::string& key, long fallback, const std::string& path);
bool boolean_or(const Json& obj, const std::string& key, bool fallback, const std::string& path);
std::string string_or(const Json& obj, const std::string& key, const std::string& fallback, const std::string& path);
}  // namespace field

Json parse_json(std::string_view text, const std::string& what);

}  // namespace cifs
