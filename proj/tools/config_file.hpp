#pragma once

#include <grasp/kv_text.hpp>
#include <grasp/synth.hpp>

namespace grasp::cli {

/// Keys mirror the SynthConfig field names. Unknown keys are rejected.
SynthConfig synth_config_from(const KeyValueDocument& doc);
KeyValueDocument synth_config_document(const SynthConfig& config);

}  // namespace grasp::cli
