#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptinv/inverse.hpp"
#include "ptinv/propagate.hpp"

namespace ptinv {

/// Shortest-exact text for a double ("%.17g").
std::string fmt_double(double v);

/// `# lambda=..., x0=..., y0=..., dy0=..., h=...` followed by x,y,dy rows.
void write_trace_csv(std::ostream& os, const SolutionTrace& trace, double h);

void write_sample_csv(std::ostream& os, const SampleTable& table);
nlohmann::json sample_sidecar(const SampleTable& table);
void write_sample_files(const SampleTable& table, const std::string& csv_path, const std::string& json_path);

/// Reads t,r,lambda rows. A sidecar `<stem>.json` next to the file, when
/// present, supplies lambda_1 and the metadata; otherwise meta is "external".
SampleTable read_sample_table(const std::string& csv_path);

void write_reconstruction_csv(std::ostream& os, const ReconstructionResult& res,
                              const std::vector<double>* qtrue = nullptr);
nlohmann::json reconstruction_report(const ReconstructionResult& res);
nlohmann::json roundtrip_report(const RoundtripReport& rep);

/// Long-format `series,x,y` rows for a sample table, reconstruction or trace CSV.
void emit_plotdata(const std::string& path, std::ostream& os);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ptinv
