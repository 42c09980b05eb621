#include "bench/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "core/error.hpp"
#include "infer/engine.hpp"
#include "ingest/synth.hpp"
#include "service/pipeline.hpp"
#include "service/service.hpp"

namespace sfwi::bench {

namespace {

void ingest_all(store::RepositorySet& repos, const ingest::SyntheticStream& s, const ingest::NodeRegistry& nodes) {
  service::ingest_stream(repos, s.observations, nodes, ingest::CleanConfig{});
}

struct Timing {
  std::vector<double> ms;
  BenchRow row(std::int64_t period, const char* label, std::size_t triples) const {
    std::vector<double> v = ms;
    std::sort(v.begin(), v.end());
    double median = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    return {period, label, median, v.front(), v.back(), triples};
  }
};

}  // namespace

void BenchSpec::validate() const {
  if (periods.empty()) throw Error(ErrorCode::InvalidArgument, "no benchmark periods", "periods");
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (periods[i] <= 0) throw Error(ErrorCode::InvalidArgument, "periods must be positive", "periods");
    if (i > 0 && periods[i] <= periods[i - 1])
      throw Error(ErrorCode::InvalidArgument, "periods must be ascending", "periods");
  }
  if (repetitions < 3) throw Error(ErrorCode::InvalidArgument, "repetitions must be >= 3", "repetitions");
  if (nodes < 1) throw Error(ErrorCode::InvalidArgument, "nodes must be >= 1", "nodes");
  if (target_triples == 0) throw Error(ErrorCode::InvalidArgument, "target_triples must be > 0", "target_triples");
}

const BenchRow& BenchReport::row(std::int64_t period_seconds, const std::string& label) const {
  for (const auto& r : rows)
    if (r.period_seconds == period_seconds && r.label == label) return r;
  throw Error(ErrorCode::NotFound, "no bench row " + label + " @" + std::to_string(period_seconds));
}

std::string BenchReport::csv() const {
  std::string out = "period_seconds,label,median_ms,min_ms,max_ms,triples\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%lld,%s,%.3f,%.3f,%.3f,%zu\n", static_cast<long long>(r.period_seconds),
                  r.label.c_str(), r.median_ms, r.min_ms, r.max_ms, r.triples);
    out += buf;
  }
  return out;
}

Dataset build_dataset(const BenchSpec& spec) {
  spec.validate();
  const auto nodes = ingest::default_node_registry(spec.nodes);

  // Triples per day from a one-day probe, then whole days to reach the target.
  auto probe = store::RepositorySet::in_memory(store::StoreMode::Multi);
  TimeRange day{spec.start, {spec.start.seconds + 86400}};
  ingest_all(*probe, ingest::generate_synthetic(nodes, day, spec.seed, 0.0), nodes);
  const double per_day = static_cast<double>(probe->weather_triple_count());
  if (per_day <= 0) throw Error(ErrorCode::Internal, "synthetic probe produced no triples");
  const auto days = std::max<std::int64_t>(1, std::llround(static_cast<double>(spec.target_triples) / per_day));
  const auto longest = spec.periods.back();

  Dataset d;
  d.range = {spec.start, {spec.start.seconds + std::max(days * 86400, longest)}};
  const auto stream = ingest::generate_synthetic(nodes, d.range, spec.seed, 0.0);
  d.single = store::RepositorySet::in_memory(store::StoreMode::Single);
  d.multi = store::RepositorySet::in_memory(store::StoreMode::Multi);
  ingest_all(*d.single, stream, nodes);
  ingest_all(*d.multi, stream, nodes);
  return d;
}

BenchReport bench_run(const BenchSpec& spec, const rules::RuleSet& rules, const Progress& progress) {
  Dataset d = build_dataset(spec);
  return bench_run(spec, d, rules, progress);
}

BenchReport bench_run(const BenchSpec& spec, Dataset& data, const rules::RuleSet& rules, const Progress& progress) {
  spec.validate();
  BenchReport report;
  report.triples = data.multi->weather_triple_count();
  report.dataset = data.range;

  infer::EngineOptions opts;
  opts.threads = spec.threads;
  // Fixed provenance time keeps payloads comparable across runs.
  opts.clock = [t = data.range.end] { return t; };
  infer::InferenceEngine single(*data.single, rules, opts);
  infer::InferenceEngine multi(*data.multi, rules, opts);

  using clock = std::chrono::steady_clock;
  for (std::int64_t period : spec.periods) {
    TimeRange q{data.range.start, {data.range.start.seconds + period}};
    std::string reference;
    bool mismatch = false;
    int mode_index = 0;
    for (infer::InferenceEngine* engine : {&single, &multi}) {
      Timing nq, rq;
      for (int rep = 0; rep < spec.repetitions; ++rep) {
        engine->reset();
        auto t0 = clock::now();
        auto cold = engine->query_fwi(q);
        auto t1 = clock::now();
        auto warm = engine->query_fwi(q);
        auto t2 = clock::now();
        nq.ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        rq.ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
        std::string a = service::events_json(cold), b = service::events_json(warm);
        if (a != b) mismatch = true;
        if (reference.empty()) reference = a;
        else if (a != reference) mismatch = true;
      }
      for (auto row : {nq.row(period, kLabels[2 * mode_index], report.triples),
                       rq.row(period, kLabels[2 * mode_index + 1], report.triples)}) {
        report.rows.push_back(row);
        if (progress) progress(row);
      }
      ++mode_index;
    }
    if (mismatch) report.mismatched_periods.push_back(period);
  }
  return report;
}

}  // namespace sfwi::bench
