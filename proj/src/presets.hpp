#pragma once

#include <vector>

namespace flexsim {

struct EmbeddedPreset {
  const char* name;
  const char* text;
};

const std::vector<EmbeddedPreset>& embedded_presets();

}  // namespace flexsim
