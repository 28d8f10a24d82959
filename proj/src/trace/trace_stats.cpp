#include "levelk/trace/trace_stats.hpp"

#include "levelk/core/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace levelk::trace {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char c : line) {
    if (c == ',' || c == ';' || c == '\t' || c == ' ' || c == '\r') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

template <typename T>
T parse_number(const std::string& text, const std::string& column, std::size_t line) {
  T value{};
  const char* begin = text.data();
  const char* end = begin + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError("column '" + column + "': '" + text + "' is not a number", line);
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(value)) throw ParseError("column '" + column + "' is not finite", line);
  }
  return value;
}

}  // namespace

std::vector<TrajectoryRecord> load_trajectories(std::istream& in) {
  static const std::vector<std::string> kRequired = {"vehicle_id", "frame", "lane", "x", "v", "a"};
  std::vector<TrajectoryRecord> out;
  std::string line;
  std::size_t line_no = 0;
  std::vector<int> column(kRequired.size(), -1);
  bool have_header = false;
  std::unordered_map<int, std::int64_t> last_frame;

  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      for (std::size_t r = 0; r < kRequired.size(); ++r) {
        const auto it = std::find(fields.begin(), fields.end(), kRequired[r]);
        if (it == fields.end()) throw ParseError("missing column '" + kRequired[r] + "'", line_no);
        column[r] = static_cast<int>(it - fields.begin());
      }
      have_header = true;
      continue;
    }
    const int needed = *std::max_element(column.begin(), column.end());
    if (static_cast<int>(fields.size()) <= needed) {
      throw ParseError("expected at least " + std::to_string(needed + 1) + " fields", line_no);
    }
    auto field = [&](std::size_t r) -> const std::string& { return fields[static_cast<std::size_t>(column[r])]; };
    TrajectoryRecord rec;
    rec.vehicle_id = parse_number<int>(field(0), kRequired[0], line_no);
    rec.frame = parse_number<std::int64_t>(field(1), kRequired[1], line_no);
    rec.lane = parse_number<int>(field(2), kRequired[2], line_no);
    rec.x = parse_number<double>(field(3), kRequired[3], line_no);
    rec.v = parse_number<double>(field(4), kRequired[4], line_no);
    rec.a = parse_number<double>(field(5), kRequired[5], line_no);
    auto [it, fresh] = last_frame.try_emplace(rec.vehicle_id, rec.frame);
    if (!fresh) {
      if (rec.frame <= it->second) {
        throw ParseError("frames of vehicle " + std::to_string(rec.vehicle_id) +
                             " are not strictly increasing",
                         line_no);
      }
      it->second = rec.frame;
    }
    out.push_back(rec);
  }
  if (!have_header && line_no > 0 && !out.empty()) throw ParseError("missing header", 1);
  return out;
}

std::vector<TrajectoryRecord> load_trajectories(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read trajectory file " + path.string());
  return load_trajectories(in);
}

bool LaneFilter::accepts(int lane) const {
  const bool ramp = ramp_lanes.contains(lane);
  switch (scope) {
    case LaneScope::Main: return !ramp;
    case LaneScope::Ramp: return ramp;
    case LaneScope::Both: return true;
  }
  return true;
}

std::string_view to_string(LaneScope scope) {
  switch (scope) {
    case LaneScope::Main: return "main";
    case LaneScope::Ramp: return "ramp";
    case LaneScope::Both: return "both";
  }
  return "both";
}

std::size_t Histogram::mass() const {
  std::size_t m = 0;
  for (auto c : counts) m += c;
  return m;
}

Moments compute_moments(const std::vector<double>& samples) {
  Moments m;
  double m2 = 0.0;
  for (double x : samples) {
    if (m.count == 0) {
      m.min = m.max = x;
    } else {
      m.min = std::min(m.min, x);
      m.max = std::max(m.max, x);
    }
    ++m.count;
    const double delta = x - m.mean;
    m.mean += delta / static_cast<double>(m.count);
    m2 += delta * (x - m.mean);
  }
  if (m.count > 0) m.std = std::sqrt(std::max(m2, 0.0) / static_cast<double>(m.count));
  return m;
}

Histogram make_histogram(const std::vector<double>& samples, double width) {
  if (!(width > 0)) throw ContractViolation("histogram bin width must be positive");
  Histogram h;
  h.width = width;
  if (samples.empty()) return h;
  const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
  h.lo = std::floor(*mn / width) * width;
  const auto bins = static_cast<std::size_t>(std::floor((*mx - h.lo) / width)) + 1;
  h.counts.assign(bins, 0);
  for (double x : samples) {
    auto i = static_cast<std::size_t>(std::floor((x - h.lo) / width));
    ++h.counts[std::min(i, bins - 1)];
  }
  return h;
}

namespace {

Distribution from_samples(std::vector<double> samples, double width) {
  Distribution d;
  d.moments = compute_moments(samples);
  d.histogram = make_histogram(samples, width);
  d.samples = std::move(samples);
  return d;
}

}  // namespace

Distribution headway_distribution(const std::vector<TrajectoryRecord>& records, const LaneFilter& filter,
                                  const HeadwayOptions& options) {
  // (frame, lane) -> positions; a map keeps the sample order independent of input order
  std::map<std::pair<std::int64_t, int>, std::vector<std::pair<double, int>>> groups;
  for (const auto& r : records) {
    if (filter.accepts(r.lane)) groups[{r.frame, r.lane}].emplace_back(r.x, r.vehicle_id);
  }
  std::vector<double> samples;
  for (auto& [key, xs] : groups) {
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      samples.push_back(xs[i + 1].first - xs[i].first - options.car_length);
    }
  }
  return from_samples(std::move(samples), options.bin_width);
}

Distribution velocity_distribution(const std::vector<TrajectoryRecord>& records, const LaneFilter& filter,
                                   double bin_width) {
  std::vector<double> samples;
  for (const auto& r : records) {
    if (filter.accepts(r.lane)) samples.push_back(r.v);
  }
  return from_samples(std::move(samples), bin_width);
}

Distribution acceleration_distribution(const std::vector<TrajectoryRecord>& records,
                                       const LaneFilter& filter, double bin_width) {
  std::vector<double> samples;
  for (const auto& r : records) {
    if (filter.accepts(r.lane)) samples.push_back(r.a);
  }
  return from_samples(std::move(samples), bin_width);
}

PopulationDistribution population_distribution(const std::vector<TrajectoryRecord>& records,
                                               const LaneFilter& filter) {
  std::map<std::int64_t, int> per_frame;
  for (const auto& r : records) {
    auto& n = per_frame[r.frame];
    if (filter.accepts(r.lane)) ++n;
  }
  PopulationDistribution p;
  std::vector<double> samples;
  for (const auto& [frame, n] : per_frame) {
    ++p.counts[n];
    samples.push_back(n);
  }
  p.moments = compute_moments(samples);
  return p;
}

EnvSuggestion suggest_parameters(const Moments& velocity, const Moments& headway) {
  EnvSuggestion s;
  s.v_nom = velocity.mean;
  s.d_nom = headway.mean;
  s.d_far = headway.mean + headway.std;
  s.d_close = std::max(headway.mean - headway.std, 0.0);
  return s;
}

namespace {

nlohmann::ordered_json moments_json(const Moments& m) {
  return {{"count", m.count}, {"mean", m.mean}, {"std", m.std}, {"min", m.min}, {"max", m.max}};
}

void write_histogram(const Histogram& h, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(17);
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << h.bin_lo(i) << ',' << h.bin_lo(i + 1) << ',' << h.counts[i] << '\n';
  }
}

}  // namespace

void write_outputs(const std::vector<TrajectoryRecord>& records, const LaneFilter& filter,
                   const std::filesystem::path& out_dir, const HeadwayOptions& options) {
  std::filesystem::create_directories(out_dir);
  const std::string prefix(to_string(filter.scope));
  const auto headway = headway_distribution(records, filter, options);
  const auto velocity = velocity_distribution(records, filter);
  const auto accel = acceleration_distribution(records, filter);
  const auto population = population_distribution(records, filter);

  write_histogram(headway.histogram, out_dir / (prefix + "_headway.csv"));
  write_histogram(velocity.histogram, out_dir / (prefix + "_velocity.csv"));
  write_histogram(accel.histogram, out_dir / (prefix + "_acceleration.csv"));
  {
    std::ofstream out(out_dir / (prefix + "_population.csv"), std::ios::trunc);
    out << "vehicles,frames\n";
    for (const auto& [n, frames] : population.counts) out << n << ',' << frames << '\n';
  }
  nlohmann::ordered_json j;
  j["scope"] = prefix;
  j["headway"] = moments_json(headway.moments);
  j["velocity"] = moments_json(velocity.moments);
  j["acceleration"] = moments_json(accel.moments);
  j["population"] = moments_json(population.moments);
  std::ofstream(out_dir / (prefix + "_moments.json"), std::ios::trunc) << j.dump(2) << '\n';
}

}  // namespace levelk::trace
