// Copyright 2026 The oarlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "oar/common/error.hpp"
#include "oarlab/commands.hpp"
#include "oarlab/run.hpp"
#include "oarlab/svg.hpp"

namespace oarlab {
namespace fs = std::filesystem;

namespace {

std::string join(const std::vector<std::string>& names) {
  std::string joined;
  for (const auto& name : names) {
    joined += (joined.empty() ? "" : ", ") + name;
  }
  return joined;
}

double numeric(const nlohmann::ordered_json& value) {
  return value.is_boolean() ? (value.get<bool>() ? 1.0 : 0.0) : value.get<double>();
}

}  // namespace

std::vector<oar::trainer::StepLog> read_run_logs(const fs::path& run_directory) {
  const fs::path path = run_directory / "logs" / "steps.jsonl";
  std::ifstream in(path);
  if (!in) {
    throw oar::Error("no step log at " + path.string());
  }
  const auto& fields = oar::trainer::step_log_fields();
  const std::set<std::string> expected(fields.begin(), fields.end());
  std::string line;
  std::size_t line_number = 0;
  std::stringstream records;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) {
      continue;
    }
    nlohmann::json object;
    try {
      object = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& error) {
      throw oar::FormatError(path.string() + ": line " + std::to_string(line_number) + ": " + error.what());
    }
    if (!object.is_object()) {
      throw oar::FormatError(path.string() + ": line " + std::to_string(line_number) + ": not a JSON object");
    }
    std::vector<std::string> missing;
    std::vector<std::string> unexpected;
    for (const auto& field : fields) {
      if (!object.contains(field)) {
        missing.push_back(field);
      }
    }
    for (const auto& item : object.items()) {
      if (expected.count(item.key()) == 0) {
        unexpected.push_back(item.key());
      }
    }
    if (!missing.empty() || !unexpected.empty()) {
      std::string message = path.string() + ": line " + std::to_string(line_number) + ": incompatible step log schema";
      if (!missing.empty()) {
        message += "; missing fields: " + join(missing);
      }
      if (!unexpected.empty()) {
        message += "; unexpected fields: " + join(unexpected);
      }
      throw oar::FormatError(message);
    }
    records << line << "\n";
  }
  try {
    return oar::trainer::read_step_logs(records);
  } catch (const oar::FormatError& error) {
    throw oar::FormatError(path.string() + ": " + error.what());
  }
}

const std::vector<std::string>& report_metrics() {
  static const std::vector<std::string> metrics = {"reward_overall", "reward_accuracy", "entropy", "ess_ratio",
                                                   "top10_mass"};
  return metrics;
}

fs::path cmd_report(const std::vector<fs::path>& runs, const fs::path& out, std::ostream& progress) {
  if (runs.empty()) {
    throw oar::Error("report needs at least one run directory");
  }
  std::vector<std::string> labels;
  std::vector<std::vector<nlohmann::ordered_json>> records;
  std::size_t common = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto logs = read_run_logs(runs[r]);
    if (logs.empty()) {
      throw oar::Error("run " + runs[r].string() + " has no logged steps");
    }
    std::vector<nlohmann::ordered_json> run_records;
    for (const auto& log : logs) {
      run_records.push_back(oar::trainer::to_json(log));
    }
    common = r == 0 ? logs.size() : std::min(common, logs.size());
    records.push_back(std::move(run_records));
    std::string label = fs::absolute(runs[r]).lexically_normal().filename().string();
    if (label.empty()) {
      label = fs::absolute(runs[r]).lexically_normal().parent_path().filename().string();
    }
    if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
      label += "#" + std::to_string(r);
    }
    labels.push_back(label);
  }

  RunDirectory report(out, "report", nullptr);
  for (const auto& run : runs) {
    report.add_input("run", run / "logs" / "steps.jsonl");
  }
  const auto& fields = oar::trainer::step_log_fields();
  const std::size_t window = std::max<std::size_t>(1, common / 10);

  std::ofstream summary(report.reports() / "summary.csv");
  summary << "run";
  for (const auto& field : fields) {
    summary << "," << field;
  }
  summary << ",steps_available,note\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    summary << labels[r];
    for (const auto& field : fields) {
      if (field == "step") {
        summary << "," << records[r][common - 1].at(field).dump();
        continue;
      }
      double sum = 0.0;
      for (std::size_t s = common - window; s < common; ++s) {
        sum += numeric(records[r][s].at(field));
      }
      summary << "," << format_number(sum / static_cast<double>(window));
    }
    const std::size_t available = records[r].size();
    summary << "," << available << ","
            << (available > common ? "truncated to " + std::to_string(common) + " steps" : std::string("full"))
            << "\n";
  }

  std::ofstream curves(report.reports() / "curves.csv");
  curves << "run";
  for (const auto& field : fields) {
    curves << "," << field;
  }
  curves << "\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (std::size_t s = 0; s < common; ++s) {
      curves << labels[r];
      for (const auto& field : fields) {
        const auto& value = records[r][s].at(field);
        curves << "," << (value.is_number_float() ? format_number(value.get<double>()) : value.dump());
      }
      curves << "\n";
    }
  }
  summary.close();
  curves.close();

  for (const auto& metric : report_metrics()) {
    LinePlot plot{metric, "step", metric, {}};
    for (std::size_t r = 0; r < runs.size(); ++r) {
      Series series{labels[r], {}, {}};
      for (std::size_t s = 0; s < common; ++s) {
        series.x.push_back(numeric(records[r][s].at("step")));
        series.y.push_back(numeric(records[r][s].at(metric)));
      }
      plot.series.push_back(std::move(series));
    }
    std::ofstream(report.reports() / (metric + ".svg")) << render_svg(plot);
  }
  report.finalize();
  progress << "report over " << runs.size() << " run(s), " << common << " common steps" << std::endl;
  return report.path();
}

}  // namespace oarlab
