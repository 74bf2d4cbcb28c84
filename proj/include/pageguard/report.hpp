#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pageguard/evaluator.hpp"
#include "pageguard/fragments.hpp"

namespace pageguard {

// One evaluated condition: the "None" control or a defended variant.
struct ReportColumn {
  std::string label;  // "None", a slot name, or a baseline variant name
  MetricsReport metrics;
  std::string fragment_id;         // empty for the control
  std::string fragment_slot;       // empty for the control
  std::string fragment_text_hash;  // 16-hex content hash, empty for control
};

struct ReportDocument {
  std::vector<ReportColumn> columns;  // control first when present
  std::string mode;
  std::string config_hash;
  std::string timestamp;        // fixed epoch under mock for stable bytes
  std::string transcript_path;  // empty when no transcript was written
};

ReportColumn make_control_column(const MetricsReport& metrics);
ReportColumn make_fragment_column(const std::string& label,
                                  const MetricsReport& metrics,
                                  const DefenseFragment& fragment);

// ISO-8601 UTC; mock runs pin the epoch so repeat runs are byte-identical.
std::string report_timestamp(bool mock);

std::string report_to_json(const ReportDocument& doc);
ReportDocument report_from_json(const std::string& json_text);

// Fixed rows DSR_R / DSR_J / MAF1 / BCR, one column per condition, control
// first, percentages with two decimals, "-" for absent metrics.
std::string render_report_table(const ReportDocument& doc);

void write_report(const ReportDocument& doc, const std::string& format,
                  const std::string& out_path);

}  // namespace pageguard
