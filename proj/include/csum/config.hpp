#ifndef CSUM_CONFIG_HPP
#define CSUM_CONFIG_HPP

#include "csum/basis.hpp"
#include "csum/modular.hpp"

#include <cstdint>
#include <string>
#include <variant>

namespace csum {

// Line-oriented `key = value` model files; distributions written as
// exp(rate), gamma(shape,rate), uniform(lo,hi), det(v); '#' starts a comment.
// Three complete examples live under configs/.
struct ParsedConfig {
    std::variant<BasisSpec, MarkovModulatedBasis> model;
    std::string raw_text;
    std::uint64_t hash = 0; // FNV-1a of the raw file bytes
};

DistributionSpec parse_distribution(const std::string& text);

ParsedConfig parse_config_text(const std::string& text);
ParsedConfig load_config(const std::string& path);

std::uint64_t fnv1a_hash(const std::string& text);

const BasisSpec& config_basis(const ParsedConfig& cfg);             // ConfigError if modular
const MarkovModulatedBasis& config_modulated(const ParsedConfig& cfg);

} // namespace csum

#endif
