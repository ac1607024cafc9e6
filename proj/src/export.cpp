#include "adastep/export.hpp"

#include "adastep/libsvm.hpp"
#include "adastep/types.hpp"

#include <cmath>
#include <sstream>

namespace adastep {

Aggregate aggregate_from_string(const std::string &s) {
  if (s == "none") return Aggregate::none;
  if (s == "mean_std") return Aggregate::mean_std;
  throw ConfigError("unknown aggregate '" + s + "' (expected none or mean_std)");
}

LabeledTrace label_trace(Trace trace) {
  LabeledTrace out;
  const auto &cfg = trace.header.at("config");
  out.algorithm = cfg.at("algorithm").at("name").get<std::string>();
  out.seed = cfg.at("seed").get<std::uint64_t>();
  out.trace = std::move(trace);
  return out;
}

namespace {

std::uint64_t cadence(const Trace &trace) {
  return trace.header.at("cadence").at("trace_every").get<std::uint64_t>();
}

struct Moments {
  double mean = 0.0;
  double std = 0.0;
};

Moments moments(const std::vector<double> &v) {
  Moments m;
  for (double x : v) m.mean += x;
  m.mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m.mean) * (x - m.mean);
  m.std = std::sqrt(ss / static_cast<double>(v.size()));
  return m;
}

void check_aligned(const std::vector<const LabeledTrace *> &group) {
  const LabeledTrace &first = *group.front();
  const std::uint64_t k = cadence(first.trace);
  for (const LabeledTrace *other : group) {
    const std::string who = first.algorithm + " seed " + std::to_string(other->seed);
    if (cadence(other->trace) != k) throw AlignmentError(who + ": trace cadence differs");
    if (other->trace.records.size() != first.trace.records.size())
      throw AlignmentError(who + ": record count differs");
    for (std::size_t r = 0; r < first.trace.records.size(); ++r) {
      const TraceRecord &a = first.trace.records[r];
      const TraceRecord &b = other->trace.records[r];
      const bool same = k > 0 ? a.t == b.t : std::floor(a.epoch) == std::floor(b.epoch);
      if (!same) throw AlignmentError(who + ": record " + std::to_string(r) + " is not aligned");
    }
  }
}

}  // namespace

std::string export_plot_data(const std::vector<LabeledTrace> &traces, Aggregate aggregate) {
  std::ostringstream out;
  if (aggregate == Aggregate::none) {
    out << "algorithm,seed,t,epoch,suboptimality,suboptimality_avg,eta\n";
    for (const LabeledTrace &lt : traces)
      for (const TraceRecord &r : lt.trace.records)
        out << lt.algorithm << ',' << lt.seed << ',' << r.t << ',' << format_double(r.epoch) << ','
            << format_double(r.suboptimality) << ',' << format_double(r.suboptimality_avg) << ','
            << format_double(r.eta) << '\n';
    return out.str();
  }

  std::vector<std::string> order;
  std::vector<std::vector<const LabeledTrace *>> groups;
  for (const LabeledTrace &lt : traces) {
    std::size_t g = 0;
    while (g < order.size() && order[g] != lt.algorithm) ++g;
    if (g == order.size()) {
      order.push_back(lt.algorithm);
      groups.emplace_back();
    }
    groups[g].push_back(&lt);
  }

  out << "algorithm,epoch,seeds,suboptimality_mean,suboptimality_std,suboptimality_avg_mean,"
         "suboptimality_avg_std,eta_mean,eta_std\n";
  for (std::size_t g = 0; g < groups.size(); ++g) {
    check_aligned(groups[g]);
    const std::size_t rows = groups[g].front()->trace.records.size();
    for (std::size_t r = 0; r < rows; ++r) {
      std::vector<double> epoch, sub, sub_avg, eta;
      for (const LabeledTrace *lt : groups[g]) {
        const TraceRecord &rec = lt->trace.records[r];
        epoch.push_back(rec.epoch);
        sub.push_back(rec.suboptimality);
        sub_avg.push_back(rec.suboptimality_avg);
        eta.push_back(rec.eta);
      }
      const Moments s = moments(sub), sa = moments(sub_avg), e = moments(eta);
      out << order[g] << ',' << format_double(moments(epoch).mean) << ',' << groups[g].size() << ','
          << format_double(s.mean) << ',' << format_double(s.std) << ',' << format_double(sa.mean) << ','
          << format_double(sa.std) << ',' << format_double(e.mean) << ',' << format_double(e.std) << '\n';
    }
  }
  return out.str();
}

}  // namespace adastep
