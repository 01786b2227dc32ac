#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pco {

struct EventRecord {
  double t = 0.0;
  std::vector<int> members;  // sorted ids
};

// Sorted phase vector just before the reference oscillator fires.
struct SectionSnapshot {
  double t = 0.0;
  std::size_t event_index = 0;
  std::vector<double> phases;
  std::vector<int> perm;
};

struct EventLog {
  std::size_t n = 0;
  int reference = 0;
  std::vector<EventRecord> events;
  std::vector<SectionSnapshot> snapshots;
};

// One JSON object per line: {"t":...,"members":[...]}. Times use 17
// significant digits.
void write_jsonl(std::ostream& out, const EventLog& log);
std::string to_jsonl(const EventRecord& record);

struct ClusterPartition {
  std::vector<int> sizes;  // sorted non-increasing, sums to n
  bool periodic = false;
  std::optional<double> period;
  std::optional<std::size_t> period_events;

  int max_size() const { return sizes.empty() ? 0 : sizes.front(); }
};

// Locates the most recent snapshot that recurs within `window` reference
// spikes (0 means 10 n).
struct Recurrence {
  std::size_t earlier = 0;
  std::size_t later = 0;
};
std::optional<Recurrence> find_recurrence(const EventLog& log, double tolerance = 1e-7,
                                          std::size_t window = 0);

// Clusters are oscillators sharing their last avalanche in the log. When a
// recurrence exists, only the final period is used.
ClusterPartition detect_clusters(const EventLog& log, std::size_t window = 0,
                                 double tolerance = 1e-7);

}  // namespace pco
