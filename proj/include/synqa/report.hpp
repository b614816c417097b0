// Plain-text and CSV renderings of scoreboards and distributions.

#ifndef SYNQA_REPORT_HPP_
#define SYNQA_REPORT_HPP_

#include <optional>
#include <span>
#include <string>

#include "synqa/qgen.hpp"
#include "synqa/scoring.hpp"

namespace synqa {

struct LabeledScoreboard {
  std::string label;
  Scoreboard board;
};

// Two decimals, "-" for an empty cell.
std::string format_cell(const std::optional<double>& v);

// One row per label: TF, MC, FITB Acc, FITB F1, OA.
std::string overall_table(std::span<const LabeledScoreboard> rows);
// One row per label: OA for each knowledge point.
std::string knowledge_point_table(std::span<const LabeledScoreboard> rows);
// Per knowledge point: #TF, #MC, #FITB, #Total, ratio.
std::string distribution_table(const DistributionReport& report);

std::string overall_csv(std::span<const LabeledScoreboard> rows);
std::string knowledge_point_csv(std::span<const LabeledScoreboard> rows);

// Metrics down, one column per label in the given order (checkpoint curves).
std::string series_csv(std::span<const LabeledScoreboard> columns);

}  // namespace synqa

#endif  // SYNQA_REPORT_HPP_
