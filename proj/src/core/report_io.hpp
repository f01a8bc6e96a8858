#pragma once

#include <string>
#include <vector>

#include "core/datasets.hpp"
#include "core/eval.hpp"
#include "core/narx.hpp"
#include "core/pruning.hpp"

namespace narxprune {

inline constexpr int kFormatVersion = 1;

// All emitters are deterministic: fixed key order, shortest round-trip number
// formatting, LF line endings. Timings are opt-in so reruns byte-match.

std::string model_to_json(const ReducedNarxModel& model, const std::string& preset_name);
ReducedNarxModel model_from_json_text(const std::string& text,
                                      std::string* preset_name = nullptr);

std::string fit_report_to_json(const EvalContext& context, const FitAssessment& assessment);

std::string prune_result_to_json(const PruneResult& result);

std::string trials_to_json(const TrialSet& set, const std::string& dataset_name,
                           const std::string& preset_name, bool include_timings = false);
std::string trials_to_csv(const TrialSet& set, bool include_timings = false);

std::string sweep_to_json(const SweepReport& report, const std::string& dataset_name,
                          const std::string& preset_name);
std::string sweep_to_csv(const SweepReport& report);

// `pc1,pc2,kind` rows: every sample column of X, then dictionary atoms and
// the selected samples (re-listed under their selection kind), all projected
// into the same 2-D frame.
std::string pca_to_csv(const Eigen::MatrixXd& X, const Dictionary* dictionary,
                       const std::vector<int>* fastcan_selected,
                       const std::vector<int>* random_selected);

std::string dataset_info_json(const Dataset& dataset);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace narxprune
