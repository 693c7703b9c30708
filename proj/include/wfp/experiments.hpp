#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "wfp/inequalities.hpp"

namespace wfp {

struct MetricRow {
    double t = 0.0;
    std::string metric;
    double value = 0.0;
};

struct ReportRow {
    std::string constant_name;
    double value = 0.0;
    std::string kind;  // estimated | derived_formula
    bool valid = true;
    std::string notes;
};

struct SeriesPlot {
    std::string filename;
    std::string title;
    bool log_y = false;
    std::vector<std::string> metrics;  // names selected from the metric rows
};

struct ExperimentResult {
    std::vector<MetricRow> metrics;
    std::vector<ReportRow> report;
    std::vector<SeriesPlot> plots;
    std::map<std::string, std::string> files;  // extra artifacts (name -> content)
};

struct ExperimentInfo {
    std::string name;
    std::string checks;  // the claim the experiment reproduces
    std::map<std::string, double> defaults;
    // string-valued parameters (catalog selections) with their allowed values;
    // the first entry of each list is the default
    std::map<std::string, std::vector<std::string>> choices;
};

const std::vector<ExperimentInfo>& experiment_registry();
const ExperimentInfo* find_experiment(const std::string& name);

struct ExperimentConfig {
    std::string experiment;
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    std::map<std::string, double> params;  // keys must appear in the registry defaults
    std::map<std::string, std::string> selections;  // keys must appear in choices
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// metrics.csv: t,metric,value    report.csv: constant_name,value,kind,valid,notes
void write_metrics_csv(const std::vector<MetricRow>& rows, std::ostream& out);
void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out);
void write_svg_plot(const SeriesPlot& plot, const std::vector<MetricRow>& rows,
                    std::ostream& out);

}  // namespace wfp
