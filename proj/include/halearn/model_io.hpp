#pragma once

#include <string>

#include "halearn/model.hpp"

namespace halearn {

/// Schema-versioned JSON document with sorted keys and shortest round-trip
/// float formatting, so identical models serialize to identical bytes. The
/// document carries both the automaton view (flows, jump labels) and the full
/// learning state (stored segments, neighborhoods, confidence bookkeeping)
/// needed to resume an online run.
std::string serialize_model(const ModelStore& store);
ModelStore deserialize_model(const std::string& text);

void save_model(const ModelStore& store, const std::string& path);  // atomic
ModelStore load_model(const std::string& path);

inline constexpr int kModelSchemaVersion = 1;

} // namespace halearn
