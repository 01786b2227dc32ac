#include "pco/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pco/error.hpp"

namespace pco {

double NetworkState::phase_of(int id) const {
  for (std::size_t k = 0; k < perm.size(); ++k) {
    if (perm[k] == id) return phases[k];
  }
  throw ParameterError("unknown oscillator id " + std::to_string(id));
}

namespace {

// Orders ids by phase descending, ties by ascending id.
NetworkState sorted_state(const std::vector<double>& by_id) {
  std::vector<int> order(by_id.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double pa = by_id[static_cast<std::size_t>(a)];
    const double pb = by_id[static_cast<std::size_t>(b)];
    return pa > pb || (pa == pb && a < b);
  });
  NetworkState s;
  s.perm = order;
  s.phases.reserve(order.size());
  for (int id : order) s.phases.push_back(by_id[static_cast<std::size_t>(id)]);
  return s;
}

bool at_threshold(double phase) { return phase >= kThreshold - kThresholdTolerance; }

}  // namespace

NetworkState make_state(const std::vector<double>& phases) {
  if (phases.empty()) throw ParameterError("network needs at least one oscillator");
  for (double p : phases) {
    if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("initial phases must lie in [0, 1]");
  }
  return sorted_state(phases);
}

double advance_to_section(NetworkState& state) {
  const double shift = kThreshold - state.phases.front();
  if (shift != 0.0) {
    for (double& p : state.phases) p += shift;
  }
  state.phases.front() = kThreshold;
  return shift;
}

AvalancheResult resolve_avalanche(const std::vector<double>& potentials,
                                  const std::vector<int>& trigger, const CouplingMatrix& coupling,
                                  const PartialReset& reset) {
  const std::size_t n = potentials.size();
  if (coupling.size() != n) throw ParameterError("coupling size does not match the network");
  if (trigger.empty()) throw SimulationError("avalanche needs a non-empty triggering set");

  std::vector<double> received(n, 0.0);
  std::vector<char> fired(n, 0);
  std::vector<double> start = potentials;
  AvalancheResult result;

  std::vector<int> generation = trigger;
  std::sort(generation.begin(), generation.end());
  for (int id : generation) {
    fired[static_cast<std::size_t>(id)] = 1;
    start[static_cast<std::size_t>(id)] = kThreshold;
  }

  while (!generation.empty()) {
    if (result.steps.size() >= n) {
      throw SimulationError("avalanche exceeded N generations; coupling safety bound violated");
    }
    for (int j : generation) {
      const auto col = static_cast<std::size_t>(j);
      for (std::size_t i = 0; i < n; ++i) received[i] += coupling(i, col);
    }
    result.members.insert(result.members.end(), generation.begin(), generation.end());
    result.steps.push_back(generation);

    std::vector<int> next;
    for (std::size_t i = 0; i < n; ++i) {
      if (!fired[i] && start[i] + received[i] >= kThreshold - kThresholdTolerance) {
        next.push_back(static_cast<int>(i));
        fired[i] = 1;
      }
    }
    generation = std::move(next);
  }
  std::sort(result.members.begin(), result.members.end());

  result.potentials.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = start[i] + received[i];
    if (!fired[i]) {
      result.potentials[i] = u;
      continue;
    }
    const double zeta = std::max(0.0, u - kThreshold);
    const double r = reset(zeta);
    if (r >= kThreshold) throw DomainError("partial reset lands at or above threshold");
    if (r < kResetPotential) throw DomainError("partial reset lands below the reset potential");
    result.potentials[i] = r;
  }
  return result;
}

FiringStep firing_map(const NetworkState& state, const CouplingMatrix& coupling,
                      const PartialReset& reset, const RiseFunction& u) {
  const std::size_t n = state.size();
  if (n == 0 || !at_threshold(state.phases.front())) {
    throw SimulationError("firing map needs a section state with phases[0] at threshold");
  }
  std::vector<double> potentials(n);
  std::vector<int> trigger;
  for (std::size_t k = 0; k < n; ++k) {
    const auto id = static_cast<std::size_t>(state.perm[k]);
    if (at_threshold(state.phases[k])) {
      trigger.push_back(state.perm[k]);
      potentials[id] = kThreshold;
    } else {
      potentials[id] = u(state.phases[k]);
    }
  }

  AvalancheResult av = resolve_avalanche(potentials, trigger, coupling, reset);

  std::vector<double> by_id(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = av.potentials[i];
    if (p >= kThreshold - kThresholdTolerance) {
      throw SimulationError("post-avalanche potential at threshold outside the avalanche");
    }
    by_id[i] = u.inverse(p);
  }

  FiringStep step;
  step.next = sorted_state(by_id);
  step.event.sigma = advance_to_section(step.next);
  step.event.members = std::move(av.members);
  step.generations = av.steps.size();
  return step;
}

ReturnResult return_map(const NetworkState& state, int ref, const CouplingMatrix& coupling,
                        const PartialReset& reset, const RiseFunction& u) {
  const std::size_t n = state.size();
  auto contains = [ref](const FiringEvent& e) {
    return std::binary_search(e.members.begin(), e.members.end(), ref);
  };

  ReturnResult out;
  FiringStep step = firing_map(state, coupling, reset, u);
  if (!contains(step.event)) {
    throw ParameterError("reference oscillator does not fire in the first avalanche");
  }
  const std::size_t guard = std::max<std::size_t>(n * n, 1);
  for (std::size_t count = 1;; ++count) {
    out.sequence.push_back(step.event);
    FiringStep ahead = firing_map(step.next, coupling, reset, u);
    if (contains(ahead.event)) {
      out.state = std::move(step.next);
      return out;
    }
    if (count >= guard) {
      throw SimulationError("reference oscillator did not fire again within N*N firing maps");
    }
    step = std::move(ahead);
  }
}

SimulationResult simulate(const NetworkState& initial, const CouplingMatrix& coupling,
                          const PartialReset& reset, const RiseFunction& u,
                          const SimulationOptions& options) {
  const std::size_t n = initial.size();
  if (coupling.size() != n) throw ParameterError("coupling size does not match the network");
  SimulationResult result;
  NetworkState state = initial;
  double t = advance_to_section(state);
  const int ref = options.reference >= 0 ? options.reference : state.perm.front();
  result.log.n = n;
  result.log.reference = ref;

  const std::size_t window = options.periodic_window ? options.periodic_window : 10 * n;
  std::size_t periods_after_recurrence = 0;
  bool recurred = false;

  for (std::size_t e = 0; e < options.max_events; ++e) {
    if (options.max_time > 0.0 && t > options.max_time) break;
    FiringStep step = firing_map(state, coupling, reset, u);
    const bool ref_fired =
        std::binary_search(step.event.members.begin(), step.event.members.end(), ref);
    if (ref_fired) {
      if (options.record_snapshots || options.stop_when_periodic) {
        result.log.snapshots.push_back({t, result.log.events.size(), state.phases, state.perm});
      }
      if (options.stop_when_periodic) {
        if (recurred) {
          ++periods_after_recurrence;
        } else if (find_recurrence(result.log, options.periodic_tolerance, window)) {
          recurred = true;
        }
        if (recurred && periods_after_recurrence >= options.extra_periods) {
          result.stopped_periodic = true;
          break;
        }
      }
    }
    if (options.record_events) result.log.events.push_back({t, step.event.members});
    state = std::move(step.next);
    t += step.event.sigma;
    ++result.events;
  }
  result.final_state = std::move(state);
  result.time = t;
  return result;
}

}  // namespace pco
