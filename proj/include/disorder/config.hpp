#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "disorder/model.hpp"

namespace disorder {

/// Parses a model document. Recognized keys are exactly `alphabet_size`,
/// `pre_kernels`, `post_kernels`, `b`, `pi`, `p`, `d` and `x0`; anything else,
/// a missing key or a wrongly typed value raises ConfigError. The result is
/// structurally complete but not validated; call validate() on it.
ModelSpec parse_model(std::string_view json_text);
ModelSpec load_model(const std::filesystem::path& path);

/// Serializes with 17 significant digits so that parse_model(dump_model(s)) == s.
std::string dump_model(const ModelSpec& spec);

}  // namespace disorder
