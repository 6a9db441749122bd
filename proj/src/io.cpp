#include "ptinv/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "ptinv/errors.hpp"

namespace ptinv {
namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) out.push_back(trim(cell));
    return out;
}

double to_double(const std::string& cell, const std::string& path, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end != cell.c_str() + cell.size())
        throw ParseError(fmt::format("{}:{}: '{}' is not a number", path, line, cell));
    return v;
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

Csv read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open '{}'", path));
    Csv csv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (csv.header.empty()) {
            csv.header = split(line);
            continue;
        }
        const auto cells = split(line);
        if (cells.size() != csv.header.size())
            throw ParseError(fmt::format("{}:{}: expected {} columns, found {}", path, lineno, csv.header.size(), cells.size()));
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(to_double(c, path, lineno));
        csv.rows.push_back(std::move(row));
    }
    if (csv.header.empty()) throw ParseError(fmt::format("'{}' has no header line", path));
    return csv;
}

}  // namespace

std::string fmt_double(double v) { return fmt::format("{:.17g}", v); }

void write_trace_csv(std::ostream& os, const SolutionTrace& trace, double h) {
    os << fmt::format("# lambda={}, x0={}, y0={}, dy0={}, h={}\n", fmt_double(trace.lambda), fmt_double(trace.x0),
                      fmt_double(trace.y0), fmt_double(trace.dy0), fmt_double(h));
    os << "x,y,dy\n";
    for (std::size_t i = 0; i < trace.size(); ++i)
        os << fmt_double(trace.xs[i]) << ',' << fmt_double(trace.ys[i]) << ',' << fmt_double(trace.dys[i]) << '\n';
}

void write_sample_csv(std::ostream& os, const SampleTable& table) {
    os << "t,r,lambda\n";
    for (const auto& e : table.entries) os << fmt_double(e.t) << ',' << fmt_double(e.r) << ',' << fmt_double(e.lambda) << '\n';
}

nlohmann::json sample_sidecar(const SampleTable& table) {
    nlohmann::json j = table.meta.is_object() ? table.meta : nlohmann::json{{"generator", "external"}};
    if (table.lambda_1) j["lambda_1"] = *table.lambda_1;
    if (j.contains("config")) {
        SolverConfig cfg;
        from_json(j["config"], cfg);
        j["config_hash"] = config_hash(cfg);
    }
    j["entries"] = table.entries.size();
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
    out << content;
    if (!out) throw ConfigError(fmt::format("write to '{}' failed", path));
}

void write_sample_files(const SampleTable& table, const std::string& csv_path, const std::string& json_path) {
    std::ostringstream csv;
    write_sample_csv(csv, table);
    write_text_file(csv_path, csv.str());
    write_text_file(json_path, sample_sidecar(table).dump(2) + "\n");
}

SampleTable read_sample_table(const std::string& csv_path) {
    const Csv csv = read_csv(csv_path);
    if (csv.header != std::vector<std::string>{"t", "r", "lambda"})
        throw ParseError(fmt::format("'{}' is not a sample table (header must be t,r,lambda)", csv_path));
    SampleTable table;
    for (const auto& row : csv.rows) table.entries.push_back({row[0], row[1], row[2]});
    table.meta = "external";

    const auto sidecar = std::filesystem::path(csv_path).replace_extension(".json");
    if (std::filesystem::exists(sidecar)) {
        std::ifstream in(sidecar);
        try {
            const auto j = nlohmann::json::parse(in);
            table.meta = j;
            if (j.contains("lambda_1") && j["lambda_1"].is_number()) table.lambda_1 = j["lambda_1"].get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(fmt::format("sidecar '{}' is not valid JSON: {}", sidecar.string(), e.what()));
        }
    }
    table.index();
    return table;
}

void write_reconstruction_csv(std::ostream& os, const ReconstructionResult& res, const std::vector<double>* qtrue) {
    os << (qtrue ? "x,phi0,qhat,qtrue\n" : "x,phi0,qhat\n");
    for (std::size_t i = 0; i < res.xs.size(); ++i) {
        os << fmt_double(res.xs[i]) << ',' << fmt_double(res.phi0[i]) << ',' << fmt_double(res.qhat[i]);
        if (qtrue) os << ',' << fmt_double((*qtrue)[i]);
        os << '\n';
    }
}

nlohmann::json reconstruction_report(const ReconstructionResult& res) {
    return {{"lambda_1", res.lambda_1},
            {"window", {res.window.first, res.window.second}},
            {"points", res.xs.size()},
            {"clamp_count", res.clamp_count},
            {"smoothed", res.smoothed},
            {"smooth_penalty", res.smooth_penalty},
            {"phi0_norm_on_window", res.normalization},
            {"fit_residuals", res.fit_residuals}};
}

nlohmann::json roundtrip_report(const RoundtripReport& rep) {
    nlohmann::json j = reconstruction_report(rep.result);
    j["max_error"] = rep.max_error;
    j["mean_error"] = rep.mean_error;
    j["error_points"] = rep.points;
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& [a, b] : rep.excluded) ex.push_back({a, b});
    j["excluded_near_jumps"] = ex;
    j["jump_overshoot"] = rep.jump_overshoot;
    return j;
}

void emit_plotdata(const std::string& path, std::ostream& os) {
    if (!std::filesystem::exists(path)) throw ConfigError(fmt::format("result file '{}' does not exist", path));
    const Csv csv = read_csv(path);
    os << "series,x,y\n";
    const auto& h = csv.header;
    if (h == std::vector<std::string>{"t", "r", "lambda"}) {
        std::map<double, std::vector<std::pair<double, double>>> by_r;
        for (const auto& row : csv.rows) by_r[row[1]].emplace_back(row[0], row[2]);
        for (const auto& [r, pts] : by_r)
            for (const auto& [t, l] : pts) os << "r=" << fmt_double(r) << ',' << fmt_double(t) << ',' << fmt_double(l) << '\n';
        return;
    }
    std::vector<std::string> series;
    if (h.size() >= 3 && h[0] == "x" && h[1] == "phi0" && h[2] == "qhat" && (h.size() == 3 || (h.size() == 4 && h[3] == "qtrue")))
        series.assign(h.begin() + 1, h.end());
    else if (h == std::vector<std::string>{"x", "y", "dy"})
        series = {"y", "dy"};
    else
        throw ConfigError(fmt::format("'{}' has an unknown result schema (header {})", path, fmt::join(h, ",")));
    for (std::size_t c = 0; c < series.size(); ++c)
        for (const auto& row : csv.rows) os << series[c] << ',' << fmt_double(row[0]) << ',' << fmt_double(row[c + 1]) << '\n';
}

}  // namespace ptinv
