/******************************************************************************
 * Project:  standage
 * Purpose:  End-to-end commands behind the CLI: metrics extraction, model
 *           fitting, map prediction, validation, synthetic scenes and
 *           response curves.
 *
 * SPDX-License-Identifier: MIT
 ****************************************************************************/
#pragma once

#include <string>

#include "core/config.hpp"

namespace standage {

/**
 * Run one named command ("metrics", "fit", "predict", "validate", "synth"
 * or "curves").  Every command writes its outputs plus a replayable
 * manifest.txt under the configured out_dir.  Throws ValidationError for
 * caller mistakes and ProcessingError for runtime failures.
 */
void run_command(const std::string &command, const RunConfig &cfg);

void cmd_metrics(const RunConfig &cfg);
void cmd_fit(const RunConfig &cfg);
void cmd_predict(const RunConfig &cfg);
void cmd_validate(const RunConfig &cfg);
void cmd_synth(const RunConfig &cfg);
void cmd_curves(const RunConfig &cfg);

}  // namespace standage
