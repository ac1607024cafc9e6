#include "adastep/trace.hpp"

#include "adastep/libsvm.hpp"
#include "adastep/types.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace adastep {

const char *const kTraceColumns =
    "t,epoch,suboptimality,suboptimality_avg,eta,grad_norm_sq,dist_sq,"
    "stochastic_grad_evals,full_grad_evals,function_evals,probes,refreshes";

namespace {

constexpr int kColumnCount = 12;

template <typename T>
T parse_field(const std::string &s, std::size_t line) {
  T value{};
  if constexpr (std::is_same_v<T, double>) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(line, "bad trace field '" + s + "'");
  return value;
}

}  // namespace

std::string format_trace(const Trace &trace) {
  nlohmann::json header = trace.header;
  header["schema"] = kTraceSchema;
  header["status"] = trace.status;
  std::ostringstream out;
  out << "# " << kTraceSchema << '\n';
  out << "# " << header.dump() << '\n';
  out << kTraceColumns << '\n';
  for (const TraceRecord &r : trace.records) {
    out << r.t << ',' << format_double(r.epoch) << ',' << format_double(r.suboptimality) << ','
        << format_double(r.suboptimality_avg) << ',' << format_double(r.eta) << ','
        << format_double(r.grad_norm_sq) << ',' << format_double(r.dist_sq) << ','
        << r.stochastic_grad_evals << ',' << r.full_grad_evals << ',' << r.function_evals << ','
        << r.probes << ',' << r.refreshes << '\n';
  }
  return out.str();
}

Trace parse_trace(std::istream &in) {
  Trace trace;
  std::string line;
  std::size_t lineno = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) throw ParseError(lineno + 1, "unexpected end of trace");
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  next();
  if (line != std::string("# ") + kTraceSchema) throw ParseError(lineno, "not an adastep trace");
  next();
  if (line.rfind("# ", 0) != 0) throw ParseError(lineno, "missing trace header");
  try {
    trace.header = nlohmann::json::parse(line.substr(2));
  } catch (const nlohmann::json::parse_error &e) {
    throw ParseError(lineno, std::string("bad trace header: ") + e.what());
  }
  trace.status = trace.header.value("status", "ok");
  next();
  if (line != kTraceColumns) throw ParseError(lineno, "unexpected trace columns");
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (static_cast<int>(f.size()) != kColumnCount) throw ParseError(lineno, "wrong number of trace fields");
    TraceRecord r;
    r.t = parse_field<std::uint64_t>(f[0], lineno);
    r.epoch = parse_field<double>(f[1], lineno);
    r.suboptimality = parse_field<double>(f[2], lineno);
    r.suboptimality_avg = parse_field<double>(f[3], lineno);
    r.eta = parse_field<double>(f[4], lineno);
    r.grad_norm_sq = parse_field<double>(f[5], lineno);
    r.dist_sq = parse_field<double>(f[6], lineno);
    r.stochastic_grad_evals = parse_field<std::uint64_t>(f[7], lineno);
    r.full_grad_evals = parse_field<std::uint64_t>(f[8], lineno);
    r.function_evals = parse_field<std::uint64_t>(f[9], lineno);
    r.probes = parse_field<std::uint64_t>(f[10], lineno);
    r.refreshes = parse_field<std::uint64_t>(f[11], lineno);
    trace.records.push_back(r);
  }
  return trace;
}

Trace read_trace_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read trace file '" + path + "'");
  return parse_trace(in);
}

std::string resolve_output_path(const std::string &path) {
  const char *dir = std::getenv("ADASTEP_OUTPUT_DIR");
  if (!dir || !*dir || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(dir) / path).string();
}

void write_file_atomic(const std::string &path, const std::string &content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace adastep
