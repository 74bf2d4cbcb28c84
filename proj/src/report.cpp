#include "pageguard/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>

#include <json.hpp>

#include "pageguard/errors.hpp"
#include "pageguard/gateway.hpp"

namespace pageguard {

namespace {

using nlohmann::json;

std::string two_decimals(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

std::string cell(const std::optional<double>& value) {
  return value ? two_decimals(*value) : "-";
}

json column_to_json(const ReportColumn& column) {
  json j{{"label", column.label},
         {"metrics", json::parse(metrics_to_json(column.metrics))}};
  if (column.fragment_id.empty()) {
    j["fragment"] = nullptr;
  } else {
    j["fragment"] = json{{"id", column.fragment_id},
                         {"slot", column.fragment_slot},
                         {"text_hash", column.fragment_text_hash}};
  }
  return j;
}

ReportColumn column_from_json(const json& j) {
  ReportColumn column;
  column.label = j.at("label").get<std::string>();
  column.metrics = metrics_from_json(j.at("metrics").dump());
  if (!j.at("fragment").is_null()) {
    const json& f = j["fragment"];
    column.fragment_id = f.at("id").get<std::string>();
    column.fragment_slot = f.at("slot").get<std::string>();
    column.fragment_text_hash = f.at("text_hash").get<std::string>();
  }
  return column;
}

}  // namespace

ReportColumn make_control_column(const MetricsReport& metrics) {
  ReportColumn column;
  column.label = "None";
  column.metrics = metrics;
  return column;
}

ReportColumn make_fragment_column(const std::string& label,
                                  const MetricsReport& metrics,
                                  const DefenseFragment& fragment) {
  ReportColumn column;
  column.label = label;
  column.metrics = metrics;
  column.fragment_id = fragment.fragment_id;
  column.fragment_slot = std::string(slot_name(fragment.slot));
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(fragment.text)));
  column.fragment_text_hash = buf;
  return column;
}

std::string report_timestamp(bool mock) {
  std::time_t now = mock ? 0 : std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buf;
}

std::string report_to_json(const ReportDocument& doc) {
  json columns = json::array();
  for (const ReportColumn& column : doc.columns)
    columns.push_back(column_to_json(column));
  json j{{"columns", std::move(columns)},
         {"mode", doc.mode},
         {"config_hash", doc.config_hash},
         {"timestamp", doc.timestamp},
         {"transcript_path", doc.transcript_path}};
  return j.dump(2);
}

ReportDocument report_from_json(const std::string& json_text) {
  json j = json::parse(json_text);
  ReportDocument doc;
  for (const json& column : j.at("columns"))
    doc.columns.push_back(column_from_json(column));
  doc.mode = j.at("mode").get<std::string>();
  doc.config_hash = j.at("config_hash").get<std::string>();
  doc.timestamp = j.at("timestamp").get<std::string>();
  doc.transcript_path = j.at("transcript_path").get<std::string>();
  return doc;
}

std::string render_report_table(const ReportDocument& doc) {
  struct Row {
    const char* name;
    std::vector<std::string> cells;
  };
  std::vector<Row> rows = {{"DSR_R", {}}, {"DSR_J", {}}, {"MAF1", {}},
                           {"BCR", {}}};
  for (const ReportColumn& column : doc.columns) {
    rows[0].cells.push_back(two_decimals(column.metrics.dsr_rule));
    rows[1].cells.push_back(cell(column.metrics.dsr_judge));
    rows[2].cells.push_back(cell(column.metrics.maf1));
    rows[3].cells.push_back(cell(column.metrics.bcr));
  }

  std::vector<std::size_t> widths;
  widths.push_back(6);  // metric-name column
  for (const ReportColumn& column : doc.columns) {
    std::size_t w = column.label.size();
    for (const Row& row : rows)
      w = std::max(w, row.cells[widths.size() - 1].size());
    widths.push_back(w);
  }

  auto pad = [](const std::string& text, std::size_t width) {
    std::string out = text;
    out.resize(std::max(width, text.size()), ' ');
    return out;
  };

  std::string out = pad("metric", widths[0]);
  for (std::size_t i = 0; i < doc.columns.size(); ++i)
    out += "  " + pad(doc.columns[i].label, widths[i + 1]);
  out += '\n';
  for (const Row& row : rows) {
    out += pad(row.name, widths[0]);
    for (std::size_t i = 0; i < row.cells.size(); ++i)
      out += "  " + pad(row.cells[i], widths[i + 1]);
    out += '\n';
  }
  out += "mode: " + doc.mode + "  config: " + doc.config_hash +
         "  at: " + doc.timestamp + '\n';
  return out;
}

void write_report(const ReportDocument& doc, const std::string& format,
                  const std::string& out_path) {
  if (format != "json" && format != "table")
    throw EmptyInput("unknown report format: " + format);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoFailure("cannot open for writing: " + out_path);
  if (format == "json") {
    out << report_to_json(doc) << '\n';
  } else {
    out << render_report_table(doc);
  }
  if (!out) throw IoFailure("write failed: " + out_path);
}

}  // namespace pageguard
