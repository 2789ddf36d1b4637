#pragma once
// Text formats: .pd rule files and ASPARTIX-style .aaf attack graphs.

#include <string>
#include <utility>
#include <vector>

#include "pd/model.hpp"

namespace pd {

Framework parse_pd(const std::string& text);
Framework parse_pd_file(const std::string& path);
// Round-trips: parse_pd(serialize_pd(fw)) is structurally equal to fw.
std::string serialize_pd(const Framework& fw);

struct AaGraph {
    std::vector<std::string> arguments;        // declaration order
    std::vector<std::pair<int, int>> attacks;  // attacker, attackee indices
};

AaGraph parse_aa(const std::string& text);
AaGraph parse_aa_file(const std::string& path);
std::string serialize_aa(const AaGraph& g);

}  // namespace pd
