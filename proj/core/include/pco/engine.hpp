#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pco/core.hpp"
#include "pco/event_log.hpp"
#include "pco/rise_function.hpp"

namespace pco {

// Phases sorted non-increasing; perm[k] is the oscillator at sorted index k.
// At a section snapshot phases[0] == 1.
struct NetworkState {
  std::vector<double> phases;
  std::vector<int> perm;

  std::size_t size() const { return phases.size(); }
  // Phase of oscillator id, O(N).
  double phase_of(int id) const;
};

// Sorts arbitrary phases in [0, 1] into a state. Ties keep ascending ids.
NetworkState make_state(const std::vector<double>& phases);
// Shifts so the largest phase sits at 1. Returns the shift applied.
double advance_to_section(NetworkState& state);

struct AvalancheResult {
  std::vector<int> members;                  // sorted ids
  std::vector<std::vector<int>> steps;       // generations, each sorted
  std::vector<double> potentials;            // by id, after resets
};

// potentials are indexed by oscillator id; trigger members are treated as
// sitting exactly at threshold.
AvalancheResult resolve_avalanche(const std::vector<double>& potentials,
                                  const std::vector<int>& trigger, const CouplingMatrix& coupling,
                                  const PartialReset& reset);

struct FiringEvent {
  std::vector<int> members;
  double sigma = 0.0;
};

struct FiringStep {
  NetworkState next;
  FiringEvent event;
  std::size_t generations = 0;
};

// One avalanche followed by the shift to the next section.
FiringStep firing_map(const NetworkState& state, const CouplingMatrix& coupling,
                      const PartialReset& reset, const RiseFunction& u);

using FiringSequence = std::vector<FiringEvent>;

struct ReturnResult {
  NetworkState state;
  FiringSequence sequence;
};

// Fires from a section where ref fires until the state just before ref fires
// again.
ReturnResult return_map(const NetworkState& state, int ref, const CouplingMatrix& coupling,
                        const PartialReset& reset, const RiseFunction& u);

struct SimulationOptions {
  std::size_t max_events = 100000;
  double max_time = 0.0;  // 0 disables the time budget
  // Reference oscillator for section snapshots; -1 picks perm[0] of the
  // initial state.
  int reference = -1;
  bool record_events = true;
  bool record_snapshots = true;
  // Stop once the reference section recurs and `extra_periods` more periods
  // have been logged.
  bool stop_when_periodic = false;
  std::size_t extra_periods = 1;
  double periodic_tolerance = 1e-7;
  std::size_t periodic_window = 0;  // reference spikes searched, 0 means 10 N
};

struct SimulationResult {
  EventLog log;
  NetworkState final_state;
  double time = 0.0;
  std::size_t events = 0;
  bool stopped_periodic = false;
};

// Event-driven evolution. Time advances by exact shifts between avalanches.
SimulationResult simulate(const NetworkState& initial, const CouplingMatrix& coupling,
                          const PartialReset& reset, const RiseFunction& u,
                          const SimulationOptions& options = {});

}  // namespace pco
