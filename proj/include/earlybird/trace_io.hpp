// Copyright 2026 Earlybird Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EARLYBIRD_TRACE_IO_HPP
#define EARLYBIRD_TRACE_IO_HPP

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "earlybird/error.hpp"
#include "earlybird/trace.hpp"

namespace earlybird {

// Trace file contract: UTF-8 text, LF line endings, first line
//   #earlybird-trace v1 trials=T procs=P iters=I threads=N unit=ns
// optional "#meta key=value" lines, then one row per sample,
//   trial,process,iteration,thread,t_start,t_end
// in canonical (trial, process, iteration, thread) order. A header-less
// CSV is accepted when the caller supplies the shape explicitly.

inline constexpr std::string_view kTraceMagic = "#earlybird-trace v1";

namespace detail {

template <typename Int>
Int parse_int(std::string_view field, std::size_t line, const char* what) {
  Int value{};
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError(std::string("invalid ") + what + " '" + std::string(field) + "'", line);
  }
  return value;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      break;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

inline DatasetShape parse_header_shape(std::string_view line) {
  DatasetShape shape;
  bool unit_ok = false;
  for (const auto token : split(line, ' ')) {
    const std::size_t eq = token.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = token.substr(0, eq);
    const auto val = token.substr(eq + 1);
    if (key == "trials") shape.n_trials = parse_int<int>(val, 1, "trials");
    else if (key == "procs") shape.n_processes = parse_int<int>(val, 1, "procs");
    else if (key == "iters") shape.n_iterations = parse_int<int>(val, 1, "iters");
    else if (key == "threads") shape.n_threads = parse_int<int>(val, 1, "threads");
    else if (key == "unit") unit_ok = (val == "ns");
  }
  if (!unit_ok) throw ParseError("trace header must declare unit=ns", 1);
  if (!shape.valid()) throw ParseError("trace header has an invalid shape", 1);
  return shape;
}

}  // namespace detail

// Reads and validates a trace. `shape_override` enables header-less CSV
// input and is cross-checked against a header when both are present.
inline TraceDataset read_trace(const std::string& path,
                               std::optional<DatasetShape> shape_override = {},
                               bool allow_partial = false) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open trace file: " + path);

  TraceDataset ds;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind(kTraceMagic, 0) == 0) {
        if (lineno != 1) throw ParseError("trace header must be the first line", lineno);
        ds.shape = detail::parse_header_shape(line);
        have_header = true;
      } else if (line.rfind("#meta ", 0) == 0) {
        const std::string_view body = std::string_view(line).substr(6);
        const std::size_t eq = body.find('=');
        if (eq == std::string_view::npos) {
          throw ParseError("malformed #meta line (expected key=value)", lineno);
        }
        ds.metadata.emplace_back(std::string(body.substr(0, eq)),
                                 std::string(body.substr(eq + 1)));
      }
      // other comments ignored
      continue;
    }
    const auto fields = detail::split(line, ',');
    if (fields.size() != 6) {
      throw ParseError("expected 6 comma-separated fields, got " +
                           std::to_string(fields.size()),
                       lineno);
    }
    ThreadSample s;
    s.trial = detail::parse_int<int>(fields[0], lineno, "trial");
    s.process = detail::parse_int<int>(fields[1], lineno, "process");
    s.iteration = detail::parse_int<int>(fields[2], lineno, "iteration");
    s.thread = detail::parse_int<int>(fields[3], lineno, "thread");
    s.t_start = detail::parse_int<Nanoseconds>(fields[4], lineno, "t_start");
    s.t_end = detail::parse_int<Nanoseconds>(fields[5], lineno, "t_end");
    ds.samples.push_back(s);
  }

  if (have_header && shape_override && !(ds.shape == *shape_override)) {
    throw ParseError("header shape disagrees with the explicitly supplied shape", 1);
  }
  if (!have_header) {
    if (!shape_override) {
      throw ParseError(
          "no trace header found; header-less CSV needs an explicit shape", 0);
    }
    ds.shape = *shape_override;
  }

  const ValidationReport report = validate(ds);
  if (!report.clean()) {
    if (!report.duplicates.empty()) {
      const auto& [t, p, i, th] = report.duplicates.front();
      throw ParseError("duplicate sample (" + std::to_string(t) + "," +
                           std::to_string(p) + "," + std::to_string(i) + "," +
                           std::to_string(th) + ")",
                       0);
    }
    if (allow_partial && report.out_of_range.empty()) {
      TraceDataset pruned = complete_subset(ds);
      if (pruned.samples.empty()) {
        throw Error("no complete process-iterations in partial trace " + path);
      }
      return pruned;
    }
    std::ostringstream msg;
    msg << "trace fails validation: " << report.missing.size() << " missing, "
        << report.duplicates.size() << " duplicate, "
        << report.ordering_violations.size() << " misordered, "
        << report.out_of_range.size() << " out-of-range sample(s)";
    throw Error(msg.str());
  }
  canonicalize(ds);
  return ds;
}

// Writes the canonical form: fixed header, sorted #meta lines as given,
// rows in (trial, process, iteration, thread) order, LF endings.
inline void write_trace(const TraceDataset& dataset, const std::string& path) {
  TraceDataset ds = dataset;
  canonicalize(ds);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << kTraceMagic << " trials=" << ds.shape.n_trials
      << " procs=" << ds.shape.n_processes << " iters=" << ds.shape.n_iterations
      << " threads=" << ds.shape.n_threads << " unit=ns\n";
  for (const auto& [k, v] : ds.metadata) out << "#meta " << k << "=" << v << "\n";
  for (const auto& s : ds.samples) {
    out << s.trial << ',' << s.process << ',' << s.iteration << ',' << s.thread
        << ',' << s.t_start << ',' << s.t_end << '\n';
  }
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace earlybird

#endif  // EARLYBIRD_TRACE_IO_HPP
