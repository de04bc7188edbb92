#pragma once

// Per-slot snapshot shared by resource allocation and the offloading game.

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "uavmec/compute_model.hpp"

namespace uavmec {

/// Offloading choice of one UD: kLocal, or an index into GameContext::servers
/// (SUAVs first, the LUAV last).
using Choice = std::int32_t;
inline constexpr Choice kLocal = -1;

struct ServerInfo {
  double compute_capacity = 0.0;  // F_s^max, cycles/s
  double bandwidth = 0.0;         // B_s, Hz
  bool is_suav = false;
  double queue_weight = 0.0;      // Q_n^c / V for SUAVs, 0 for the LUAV
};

struct PlayerInfo {
  TaskSpec task;
  double local_compute = 1e9;       // f_m^UD
  double tx_power = 0.1;            // p_m, W
  double weight_delay = 0.7;        // gamma^T
  double weight_energy = 0.3;       // gamma^E
  std::vector<double> full_rate;    // r_{s,m}: rate over the whole band of server s
};

enum class AllocationRule { optimal, equal };

struct GameContext {
  std::vector<ServerInfo> servers;
  std::vector<PlayerInfo> players;
  double cpu_capacitance = 1e-28;
  double energy_per_cycle = 8.2e-9;
  AllocationRule rule = AllocationRule::optimal;
  bool allow_local = true;

  std::size_t num_players() const { return players.size(); }
  std::size_t num_servers() const { return servers.size(); }

  void validate() const {
    for (const auto& p : players) {
      if (p.full_rate.size() != servers.size()) {
        throw std::invalid_argument("GameContext: one full-band rate per server required");
      }
      for (double r : p.full_rate) {
        if (!(r > 0)) throw std::invalid_argument("GameContext: full-band rates must be > 0");
      }
      if (!(p.local_compute > 0)) throw std::invalid_argument("GameContext: local compute must be > 0");
      if (p.weight_delay < 0 || p.weight_energy < 0 || (p.weight_delay == 0 && p.weight_energy == 0)) {
        throw std::invalid_argument("GameContext: cost weights must be >= 0 and not both 0");
      }
    }
    for (const auto& s : servers) {
      if (!(s.compute_capacity > 0) || !(s.bandwidth > 0)) {
        throw std::invalid_argument("GameContext: server capacities must be > 0");
      }
    }
  }
};

/// Offloading decision vector. Membership lists are derived on demand.
class StrategyProfile {
 public:
  StrategyProfile() = default;
  explicit StrategyProfile(std::size_t num_players, Choice initial = kLocal) : choices_(num_players, initial) {}
  explicit StrategyProfile(std::vector<Choice> choices) : choices_(std::move(choices)) {}

  std::size_t size() const { return choices_.size(); }
  Choice operator[](std::size_t m) const { return choices_[m]; }
  Choice& operator[](std::size_t m) { return choices_[m]; }
  const std::vector<Choice>& choices() const { return choices_; }

  std::vector<std::size_t> members(Choice server) const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < choices_.size(); ++m) {
      if (choices_[m] == server) out.push_back(m);
    }
    return out;
  }

  friend bool operator==(const StrategyProfile&, const StrategyProfile&) = default;

 private:
  std::vector<Choice> choices_;
};

/// Human-facing label: 0 for local, 1..N for SUAVs, "u" for the LUAV.
inline std::string choice_label(Choice c, std::size_t num_suavs) {
  if (c == kLocal) return "0";
  if (static_cast<std::size_t>(c) < num_suavs) return std::to_string(c + 1);
  return "u";
}

}  // namespace uavmec
