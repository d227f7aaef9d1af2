#pragma once

#include <string>

#include <json.hpp>

#include "proskill/ir.hpp"

namespace proskill::ir {

/// `.tts.json` interchange form. Names are used instead of indices so the
/// document is readable and diffable; keys come out sorted.
nlohmann::json to_json(const ProcessNetwork& net);

/// Throws std::invalid_argument on unknown names or malformed documents.
ProcessNetwork network_from_json(const nlohmann::json& j);

std::string dump_network(const ProcessNetwork& net);

/// FNV-1a over the canonical dump, as 16 hex digits.
std::string network_hash(const ProcessNetwork& net);

nlohmann::json expr_to_json(const ProcessNetwork& net, const Expr& e);
Expr expr_from_json(const ProcessNetwork& net, const nlohmann::json& j);

}  // namespace proskill::ir
