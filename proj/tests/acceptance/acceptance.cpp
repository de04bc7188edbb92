// Acceptance run: prints one PASS/FAIL line per criterion, exits nonzero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "uavmec/engine.hpp"
#include "uavmec/results_io.hpp"
#include "uavmec/verification.hpp"

using namespace uavmec;

namespace {

constexpr std::uint64_t kSeeds = 10;

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s %d %s: %s\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

unsigned threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// Re-checks a slot from the world it started in. Returns the first problem found.
std::string independent_audit(const World& before, const SlotDecision& d, const ScenarioConfig& c) {
  const std::size_t N = c.num_suavs;
  std::vector<double> z(N + 1, 0.0), w(N + 1, 0.0);
  std::ostringstream why;
  for (std::size_t m = 0; m < d.outcomes.size(); ++m) {
    const auto& o = d.outcomes[m];
    if (o.choice < kLocal || o.choice > static_cast<Choice>(N)) {
      why << "ud " << m << " bad choice";
      return why.str();
    }
    if (o.choice == kLocal) continue;
    if (o.delay > before.uds[m].task.deadline + 1e-9) {
      why << "ud " << m << " misses deadline (" << o.delay << " s)";
      return why.str();
    }
    if (!(o.compute_share > 0.0) || !(o.bandwidth_share > 0.0)) {
      why << "ud " << m << " offloads with a zero share";
      return why.str();
    }
    z[static_cast<std::size_t>(o.choice)] += o.compute_share;
    w[static_cast<std::size_t>(o.choice)] += o.bandwidth_share;
  }
  for (std::size_t s = 0; s <= N; ++s) {
    if (z[s] > 1.0 + 1e-12 || w[s] > 1.0 + 1e-12) {
      why << "server " << s << " over-allocated";
      return why.str();
    }
  }
  for (std::size_t n = 0; n < N; ++n) {
    if (d.slot == 1 && d.positions[n] != c.suav_initial_positions[n]) return "initial position moved";
    if (d.positions[n] != before.suavs[n].position) return "service position differs from world";
    if (distance(d.next_positions[n], d.positions[n]) > c.suav_max_speed * c.slot_duration * (1 + 1e-9)) {
      why << "suav " << n << " over speed";
      return why.str();
    }
    for (std::size_t j = n + 1; j < N; ++j) {
      if (distance(d.next_positions[n], d.next_positions[j]) < c.min_separation - 1e-6) {
        why << "suavs " << n << "," << j << " too close";
        return why.str();
      }
    }
  }
  return {};
}

struct MeanMetrics {
  double tac = 0, latency = 0, suav_energy = 0, backlog = 0;
};

MeanMetrics means(const std::vector<RunResult>& runs) {
  MeanMetrics m;
  for (const auto& r : runs) {
    m.tac += r.summary.time_avg_cost;
    m.latency += r.summary.avg_latency;
    m.suav_energy += r.summary.time_avg_suav_energy;
    for (double q : r.summary.final_queue_compute) m.backlog += q;
    for (double q : r.summary.final_queue_propulsion) m.backlog += q;
  }
  const double k = static_cast<double>(runs.size());
  m.tac /= k;
  m.latency /= k;
  m.suav_energy /= k;
  m.backlog /= k;
  return m;
}

std::vector<RunResult> seeds_of(const ScenarioConfig& c, ApproachId a) {
  std::vector<RunSpec> jobs;
  for (std::uint64_t s = 0; s < kSeeds; ++s) jobs.push_back({a, s});
  return run_many(c, jobs, threads());
}

}  // namespace

int main() {
  std::printf("threads: %u\n", threads());

  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = allocation_suite(100);
    const double dt = seconds_since(t0);
    report(1, "allocation oracle", r.passed && dt < 10.0, r.detail + fmt(" (%.2f s)", dt));
  }
  {
    const auto r = potential_suite(200, 100);
    report(2, "potential game", r.passed, r.detail);
  }
  {
    double max_poa = 0.0;
    const auto r = poa_suite(50, 37, &max_poa);
    report(3, "price of anarchy", r.passed, r.detail + fmt(" max PoA %.6f", max_poa));
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = sca_suite(1000, 30, 10);
    const double dt = seconds_since(t0);
    report(4, "SCA", r.passed && dt < 60.0, r.detail + fmt(" (%.2f s)", dt));
  }

  const auto desk = desk_profile();
  const double budget = desk.suav_energy_budget;

  // Desk OJTRTA runs driven slot by slot so every slot can be audited here.
  std::vector<RunResult> ojtrta(kSeeds);
  {
    std::string first_problem;
    std::size_t bad = 0;
    std::vector<std::thread> pool;
    std::vector<std::string> problems(kSeeds);
    std::vector<std::size_t> bad_slots(kSeeds, 0);
    for (std::uint64_t s = 0; s < kSeeds; ++s) {
      pool.emplace_back([&, s] {
        Simulator sim(desk, ApproachId::ojtrta, s);
        auto& r = ojtrta[s];
        r.config = desk;
        r.approach = ApproachId::ojtrta;
        r.seed = s;
        for (std::size_t t = 0; t < desk.num_slots; ++t) {
          const World before = sim.world();
          const auto d = sim.step();
          const auto why = independent_audit(before, d, desk);
          if (!why.empty()) {
            ++bad_slots[s];
            if (problems[s].empty()) problems[s] = "seed " + std::to_string(s) + " slot " + std::to_string(d.slot) + ": " + why;
          }
          r.rows.push_back(make_record(d));
        }
        r.summary = aggregate(r.rows, desk.num_suavs);
      });
    }
    for (auto& th : pool) th.join();
    for (std::uint64_t s = 0; s < kSeeds; ++s) {
      bad += bad_slots[s];
      if (first_problem.empty()) first_problem = problems[s];
    }
    report(5, "constraint audit", bad == 0,
           bad == 0 ? "0 violating slots over 10 seeds" : std::to_string(bad) + " violating slots; " + first_problem);
  }
  {
    bool ok = true;
    double worst_energy = 0, worst_queue = 0;
    const double T = static_cast<double>(desk.num_slots);
    for (const auto& r : ojtrta) {
      for (double e : r.summary.mean_suav_energy) {
        worst_energy = std::max(worst_energy, e);
        ok = ok && e <= 1.1 * budget;
      }
      for (const auto* qs : {&r.summary.final_queue_compute, &r.summary.final_queue_propulsion}) {
        for (double q : *qs) {
          worst_queue = std::max(worst_queue, q / T);
          ok = ok && q / T <= 0.05 * budget;
        }
      }
    }
    report(6, "energy budget", ok,
           fmt("max mean SUAV energy %.3f J", worst_energy) + fmt(" (limit %.1f)", 1.1 * budget) +
               fmt(", max Q(T)/T %.4f J", worst_queue) + fmt(" (limit %.1f)", 0.05 * budget));
  }
  {
    const auto t0 = std::chrono::steady_clock::now();
    std::map<ApproachId, MeanMetrics> m;
    m[ApproachId::ojtrta] = means(ojtrta);
    for (auto a : {ApproachId::eo, ApproachId::era, ApproachId::flp, ApproachId::ocq}) m[a] = means(seeds_of(desk, a));
    auto dense = desk;
    dense.num_uds = 2 * desk.num_uds;
    std::map<ApproachId, MeanMetrics> d;
    for (auto a : kAllApproaches) d[a] = means(seeds_of(dense, a));
    const double dt = seconds_since(t0);

    const auto& o = m[ApproachId::ojtrta];
    const bool c1 = o.tac < m[ApproachId::eo].tac;
    const bool c2 = o.tac <= m[ApproachId::era].tac;
    const bool c3 = o.tac <= m[ApproachId::flp].tac;
    const bool c4 = m[ApproachId::ocq].suav_energy >= o.suav_energy;
    bool c5 = true;
    for (auto a : kAllApproaches) {
      if (a != ApproachId::eo) c5 = c5 && d[ApproachId::eo].latency >= d[a].latency;
    }
    std::ostringstream os;
    os << "TAC";
    for (auto a : kAllApproaches) os << " " << to_string(a) << "=" << fmt("%.4f", m[a].tac);
    os << "; SUAV energy ocq=" << fmt("%.3f", m[ApproachId::ocq].suav_energy) << " ojtrta=" << fmt("%.3f", o.suav_energy);
    os << "; latency@M=" << dense.num_uds;
    for (auto a : kAllApproaches) os << " " << to_string(a) << "=" << fmt("%.4f", d[a].latency);
    os << fmt("; %.1f s", dt);
    std::string which;
    if (!c1) which += " [ojtrta<eo]";
    if (!c2) which += " [ojtrta<=era]";
    if (!c3) which += " [ojtrta<=flp]";
    if (!c4) which += " [ocq energy>=ojtrta]";
    if (!c5) which += " [eo latency worst]";
    if (dt >= 600.0) which += " [runtime]";
    report(7, "orderings", which.empty(), os.str() + (which.empty() ? "" : "; failed:" + which));
  }
  {
    std::vector<MeanMetrics> sweep;
    std::ostringstream os;
    for (double scale : {0.1, 1.0, 10.0}) {
      auto c = desk;
      c.lyapunov_v = desk.lyapunov_v * scale;
      sweep.push_back(scale == 1.0 ? means(ojtrta) : means(seeds_of(c, ApproachId::ojtrta)));
      os << "V=" << format_number(c.lyapunov_v) << " TAC=" << fmt("%.4f", sweep.back().tac)
         << " backlog=" << fmt("%.4f", sweep.back().backlog) << "; ";
    }
    bool ok = true;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
      ok = ok && sweep[i].tac <= sweep[i - 1].tac && sweep[i].backlog >= sweep[i - 1].backlog;
    }
    report(8, "V tradeoff", ok, os.str());
  }
  {
    auto c = desk;
    c.num_slots = 20;
    const std::vector<RunSpec> jobs{{ApproachId::ojtrta, 3}, {ApproachId::eo, 3}};
    std::ostringstream a, b;
    write_slot_csv(a, run_many(c, jobs, threads()), c.num_suavs);
    write_slot_csv(b, run_many(c, jobs, 1), c.num_suavs);
    report(9, "determinism", a.str() == b.str() && !a.str().empty(),
           std::to_string(a.str().size()) + " bytes compared");
  }

  std::printf("%s: %d criterion(s) failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
