#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace dmilp {

enum class Algorithm : std::uint8_t {
  Central,   // monolithic branch-and-bound
  Brute,     // enumeration oracle
  DD,        // basic dual decomposition
  MDD,       // modified dual decomposition (bounds both sides)
  Admm2,     // two-block alternating scheme
  Admm,      // consensus scheme on the LP relaxation
  Raf,       // release-and-fix heuristic
  Dmilp1,    // exact, binary-variable duplication
  Dmilp2,    // exact, auxiliary binary variables
};

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Central: return "central";
    case Algorithm::Brute: return "brute";
    case Algorithm::DD: return "dd";
    case Algorithm::MDD: return "mdd";
    case Algorithm::Admm2: return "admm2";
    case Algorithm::Admm: return "admm";
    case Algorithm::Raf: return "raf";
    case Algorithm::Dmilp1: return "dmilp1";
    case Algorithm::Dmilp2: return "dmilp2";
  }
  return "?";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "central") return Algorithm::Central;
  if (s == "brute") return Algorithm::Brute;
  if (s == "dd") return Algorithm::DD;
  if (s == "mdd") return Algorithm::MDD;
  if (s == "admm2") return Algorithm::Admm2;
  if (s == "admm") return Algorithm::Admm;
  if (s == "raf") return Algorithm::Raf;
  if (s == "dmilp1") return Algorithm::Dmilp1;
  if (s == "dmilp2") return Algorithm::Dmilp2;
  throw std::invalid_argument("unknown algorithm: " + s);
}

enum class Transport : std::uint8_t { Inproc, Socket };
enum class KnowledgeMode : std::uint8_t { Full, Alert };

/// All schedule constants surfaced by name; defaults follow the reported
/// experimental setup (steps 0.01 / 10 / 50, 100 warm-up dual iterations,
/// 200 outer cap with the first 10 cut-free, 10 inner iterations).
struct RunConfig {
  Algorithm algorithm = Algorithm::Dmilp2;

  double rho_mu = 0.01;
  double rho_lambda = 10.0;
  double rho_gamma = 50.0;
  bool step_decay = false;  // optional 1/k decay on rho_mu

  double admm_rho = 1.0;
  double admm_tol = 1e-5;
  long admm_cap = 5000;
  bool admm_warm_ub = true;  // warm-start consensus state across upper-bound solves
  double prox_eps = 1e-3;    // proximal ridge for the two-block scheme

  long dd_init_iters = 100;
  long outer_cap = 200;
  long warmup_outer = 10;  // outer iterations that update duals without adding cuts
  long inner_iters = 10;

  double tol = 1e-6;  // optimality gap tolerance: ub - lb <= tol * (1 + |ub|)
  double feas_tol = 1e-7;
  double int_tol = 1e-6;
  long node_limit = 2000000;
  std::uint64_t enum_guard = 1u << 20;

  Transport transport = Transport::Inproc;
  KnowledgeMode knowledge = KnowledgeMode::Full;
  bool distributed_upper_bounding = true;  // false = centralized simplex for z(u)
  std::uint64_t seed = 0;
  int threads = 0;  // 0 = one per block

  std::string result_path;
  std::string trace_path;
  std::string transcript_path;
  std::string pool_path;

  void check() const {
    if (rho_mu <= 0 || rho_lambda <= 0 || rho_gamma <= 0 || admm_rho <= 0)
      throw std::invalid_argument("step sizes must be positive");
    if (tol <= 0 || admm_tol <= 0 || feas_tol <= 0) throw std::invalid_argument("tolerances must be positive");
    if (dd_init_iters < 0 || outer_cap < 0 || warmup_outer < 0 || inner_iters < 0)
      throw std::invalid_argument("schedule fields must be >= 0");
  }
};

}  // namespace dmilp
