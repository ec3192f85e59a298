#include <cstdio>
#include <fstream>
#include <ostream>

#include "sbr/eval.hpp"

namespace sbr {

std::string format_metric(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

void write_results_csv(std::ostream& out, std::span<const ExperimentResult> results,
                       bool include_timing) {
  out << "content,scheme,algorithm,vector_size,k,seed,accuracy,precision,recall,f_score,wall_time_s\n";
  for (const auto& r : results) {
    const auto& s = r.spec;
    out << to_string(s.content) << ',' << to_string(s.scheme) << ',' << to_string(s.algorithm.kind)
        << ',' << s.vector_size << ',' << s.k << ',' << s.seed << ',';
    if (r.ok()) {
      out << format_metric(r.mean.accuracy) << ',' << format_metric(r.mean.precision) << ','
          << format_metric(r.mean.recall) << ',' << format_metric(r.mean.f_score) << ',';
      if (include_timing) out << format_metric(r.wall_seconds);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
}

namespace {

template <class T>
void push_unique(std::vector<T>& v, const T& x) {
  for (const auto& y : v)
    if (y == x) return;
  v.push_back(x);
}

std::string scheme_label(FeatureScheme s) {
  switch (s) {
    case FeatureScheme::bf: return "BF";
    case FeatureScheme::tf: return "TF";
    case FeatureScheme::tfidf: return "TF-IDF";
  }
  return "?";
}

}  // namespace

void write_results_markdown(std::ostream& out, std::span<const ExperimentResult> results) {
  std::vector<ContentVariant> contents;
  std::vector<FeatureScheme> schemes;
  std::vector<AlgorithmKind> learners;
  for (const auto& r : results) {
    push_unique(contents, r.spec.content);
    push_unique(schemes, r.spec.scheme);
    push_unique(learners, r.spec.algorithm.kind);
  }

  bool first = true;
  for (auto c : contents) {
    if (!first) out << '\n';
    first = false;
    out << "## Content: " << to_string(c) << "\n\n| Learner |";
    for (auto s : schemes) {
      const auto l = scheme_label(s);
      out << ' ' << l << " Acc | " << l << " Prec | " << l << " Rec | " << l << " F |";
    }
    out << "\n|---|";
    for (std::size_t i = 0; i < schemes.size(); ++i) out << "---:|---:|---:|---:|";
    out << '\n';
    for (auto a : learners) {
      out << "| " << to_string(a) << " |";
      for (auto s : schemes) {
        const ExperimentResult* cell = nullptr;
        for (const auto& r : results)
          if (r.spec.content == c && r.spec.scheme == s && r.spec.algorithm.kind == a) cell = &r;
        if (cell && cell->ok()) {
          const auto& m = cell->mean;
          out << ' ' << format_metric(m.accuracy) << " | " << format_metric(m.precision) << " | "
              << format_metric(m.recall) << " | " << format_metric(m.f_score) << " |";
        } else {
          out << " - | - | - | - |";
        }
      }
      out << '\n';
    }
  }

  bool any_failed = false;
  for (const auto& r : results) any_failed = any_failed || !r.ok();
  if (any_failed) {
    out << "\n## Failed cells\n\n";
    for (const auto& r : results)
      if (!r.ok())
        out << "- " << to_string(r.spec.content) << " / " << to_string(r.spec.scheme) << " / "
            << to_string(r.spec.algorithm.kind) << ": " << *r.error << '\n';
  }
}

void emit_report(std::span<const ExperimentResult> results, ReportFormat format,
                 const std::filesystem::path& path, bool include_timing) {
  if (results.empty()) throw DataError("no results to report");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report " + path.string());
  if (format == ReportFormat::csv)
    write_results_csv(out, results, include_timing);
  else
    write_results_markdown(out, results);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

void write_sweep_csv(std::ostream& out, std::span<const SweepPoint> points) {
  out << "vector_size,f_score\n";
  for (const auto& p : points) {
    out << p.size << ',';
    if (p.f_score) out << format_metric(*p.f_score);
    out << '\n';
  }
}

}  // namespace sbr
