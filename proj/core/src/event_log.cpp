#include "pco/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <ostream>

namespace pco {

namespace {

void append_double(std::string& out, double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace

std::string to_jsonl(const EventRecord& record) {
  std::string line = "{\"t\":";
  append_double(line, record.t);
  line += ",\"members\":[";
  for (std::size_t k = 0; k < record.members.size(); ++k) {
    if (k > 0) line += ',';
    line += std::to_string(record.members[k]);
  }
  line += "]}";
  return line;
}

void write_jsonl(std::ostream& out, const EventLog& log) {
  for (const auto& record : log.events) out << to_jsonl(record) << '\n';
}

std::optional<Recurrence> find_recurrence(const EventLog& log, double tolerance,
                                          std::size_t window) {
  const auto& snaps = log.snapshots;
  if (snaps.size() < 2) return std::nullopt;
  if (window == 0) window = 10 * std::max<std::size_t>(log.n, 1);
  const std::size_t later = snaps.size() - 1;
  const std::size_t stop = later > window ? later - window : 0;
  for (std::size_t k = later; k-- > stop;) {
    if (max_abs_diff(snaps[k].phases, snaps[later].phases) < tolerance) return Recurrence{k, later};
  }
  return std::nullopt;
}

ClusterPartition detect_clusters(const EventLog& log, std::size_t window, double tolerance) {
  ClusterPartition out;
  std::size_t begin = 0;
  std::size_t end = log.events.size();
  if (auto rec = find_recurrence(log, tolerance, window)) {
    out.periodic = true;
    out.period = log.snapshots[rec->later].t - log.snapshots[rec->earlier].t;
    begin = log.snapshots[rec->earlier].event_index;
    end = log.snapshots[rec->later].event_index;
    out.period_events = end - begin;
  }

  // Last avalanche index per oscillator within [begin, end).
  std::vector<long> last(log.n, -1);
  for (std::size_t e = begin; e < end; ++e) {
    for (int id : log.events[e].members) last[static_cast<std::size_t>(id)] = static_cast<long>(e);
  }
  std::map<long, int> groups;
  int unseen = 0;
  for (long e : last) {
    if (e < 0) {
      ++unseen;
    } else {
      ++groups[e];
    }
  }
  for (const auto& [e, size] : groups) out.sizes.push_back(size);
  out.sizes.insert(out.sizes.end(), static_cast<std::size_t>(unseen), 1);
  std::sort(out.sizes.begin(), out.sizes.end(), std::greater<>());
  return out;
}

}  // namespace pco
