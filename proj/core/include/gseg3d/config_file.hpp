#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "gseg3d/pipeline.hpp"

namespace gseg3d {

/// Keys understood by apply_setting, in dump order.
const std::vector<std::string>& config_keys();

/// Sets one flat key. `cellSizeZ` takes two numbers (phase 1, phase 2), e.g.
/// "1.5 (Phase I), 0.2 (Phase II)" or "1.5,0.2". Other keys apply to both phases.
/// Throws ConfigError naming the key on unknown keys or unparsable values.
void apply_setting(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// "key=value" form of apply_setting.
void apply_override(PipelineConfig& cfg, std::string_view assignment);

/// Parses "key: value" / "key = value" lines; '#' starts a comment.
void apply_config_text(PipelineConfig& cfg, std::string_view text);

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

/// Effective configuration in the same "key: value" format apply_config_text reads.
std::string dump_config(const PipelineConfig& cfg);

/// Shortest round-trip decimal, always with a fractional part ("1.0", "0.125").
std::string format_number(double v);

}  // namespace gseg3d
