#include "synqa/report.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <vector>

namespace synqa {

std::string format_cell(const std::optional<double>& v) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *v);
  return buf;
}

namespace {

using Table = std::vector<std::vector<std::string>>;

std::string render(const Table& t) {
  std::vector<std::size_t> width;
  for (const auto& row : t) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t i = 0; i < row.size(); ++i)
      width[i] = std::max(width[i], row[i].size());
  }
  std::ostringstream out;
  for (std::size_t r = 0; r < t.size(); ++r) {
    for (std::size_t i = 0; i < t[r].size(); ++i) {
      if (i) out << "  ";
      // First column left-aligned, numbers right-aligned.
      if (i == 0)
        out << t[r][i] << std::string(width[i] - t[r][i].size(), ' ');
      else
        out << std::string(width[i] - t[r][i].size(), ' ') << t[r][i];
    }
    out << '\n';
    if (r == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
    }
  }
  return out.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_cell(const std::optional<double>& v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::string render_csv(const Table& t) {
  std::ostringstream out;
  for (const auto& row : t) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << csv_field(row[i]);
    out << '\n';
  }
  return out.str();
}

std::vector<std::optional<double>> overall_cells(const ScoreSet& s) {
  return {s.tf_acc, s.mc_acc, s.fitb_acc, s.fitb_f1, s.oa};
}

const std::vector<std::string> kOverallHeader = {"TF", "MC", "FITB Acc",
                                                 "FITB F1", "OA"};

template <typename Fmt>
Table overall(std::span<const LabeledScoreboard> rows, Fmt fmt) {
  Table t;
  t.push_back({"Model"});
  t[0].insert(t[0].end(), kOverallHeader.begin(), kOverallHeader.end());
  for (const auto& r : rows) {
    std::vector<std::string> line{r.label};
    for (const auto& c : overall_cells(r.board.overall)) line.push_back(fmt(c));
    t.push_back(std::move(line));
  }
  return t;
}

template <typename Fmt>
Table per_kp(std::span<const LabeledScoreboard> rows, Fmt fmt) {
  Table t;
  t.push_back({"Model"});
  for (auto kp : kAllKnowledgePoints) t[0].emplace_back(to_string(kp));
  for (const auto& r : rows) {
    std::vector<std::string> line{r.label};
    for (auto kp : kAllKnowledgePoints) line.push_back(fmt(r.board.kp(kp).oa));
    t.push_back(std::move(line));
  }
  return t;
}

}  // namespace

std::string overall_table(std::span<const LabeledScoreboard> rows) {
  return render(overall(rows, format_cell));
}

std::string knowledge_point_table(std::span<const LabeledScoreboard> rows) {
  return render(per_kp(rows, format_cell));
}

std::string overall_csv(std::span<const LabeledScoreboard> rows) {
  return render_csv(overall(rows, csv_cell));
}

std::string knowledge_point_csv(std::span<const LabeledScoreboard> rows) {
  return render_csv(per_kp(rows, csv_cell));
}

std::string distribution_table(const DistributionReport& report) {
  Table t{{"Knowledge", "#TF", "#MC", "#FITB", "#Total", "Ratio"}};
  for (auto kp : kAllKnowledgePoints) {
    const auto& r = report.row(kp);
    t.push_back({std::string(to_string(kp)), std::to_string(r.tf),
                 std::to_string(r.mc), std::to_string(r.fitb),
                 std::to_string(r.count), format_cell(r.ratio) + "%"});
  }
  t.push_back({"Total", "", "", "", std::to_string(report.total),
               report.total ? "100.00%" : "0.00%"});
  return render(t);
}

std::string series_csv(std::span<const LabeledScoreboard> columns) {
  Table t{{"metric"}};
  for (const auto& c : columns) t[0].push_back(c.label);
  const char* names[] = {"TF", "MC", "FITB_acc", "FITB_f1", "OA"};
  for (std::size_t m = 0; m < 5; ++m) {
    std::vector<std::string> line{names[m]};
    for (const auto& c : columns)
      line.push_back(csv_cell(overall_cells(c.board.overall)[m]));
    t.push_back(std::move(line));
  }
  for (auto kp : kAllKnowledgePoints) {
    std::vector<std::string> line{std::string(to_string(kp)) + "_OA"};
    for (const auto& c : columns) line.push_back(csv_cell(c.board.kp(kp).oa));
    t.push_back(std::move(line));
  }
  return render_csv(t);
}

}  // namespace synqa
