#pragma once

#include <string>

#include "hybridbn/network.hpp"

namespace hbn {

/// Parses the JSON network format (see README, "Network files"). All errors
/// are reported as ParseError with `origin` in the location string. With
/// `validate` (the default) the parsed network is checked and violations
/// raise ParseError too; pass false to inspect an invalid network.
HybridNetwork parse_network_json(const std::string& text,
                                 const std::string& origin,
                                 bool validate = true);
HybridNetwork load_network(const std::string& path, bool validate = true);

std::string network_to_json(const HybridNetwork& net);
void save_network(const HybridNetwork& net, const std::string& path);

/// Evidence files map variable names to state names (discrete) or numbers.
Evidence parse_evidence_json(const HybridNetwork& net, const std::string& text,
                             const std::string& origin);
Evidence load_evidence(const HybridNetwork& net, const std::string& path);

std::string evidence_to_json(const HybridNetwork& net, const Evidence& ev);

}  // namespace hbn
