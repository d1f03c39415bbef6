#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "dmilp/config.hpp"
#include "dmilp/types.hpp"

namespace dmilp {

// Typed round-trip payloads between the coordinator role and one block
// worker. Every protocol in this project is a synchronous sequence of
// such rounds; transports serialize exactly these fields.

enum class AdmmMode : std::uint8_t { Relaxed, Integral, FixedBinaries };
enum class FixSource : std::uint8_t { Value, PoolIndex, Current };

struct SetupReq {
  std::uint8_t algorithm = 0;
  double rho_mu = 0.01, rho_lambda = 10.0, rho_gamma = 50.0, admm_rho = 1.0;
  double prox_eps = 1e-3;
  double int_tol = 1e-6, feas_tol = 1e-7;
  long node_limit = 2000000;
  std::vector<int> bin_sizes;  // every block's binary count (layout metadata)
  int coupling_rows = 0;
  std::uint8_t knowledge = 0;  // KnowledgeMode
  // Full-knowledge duplication mode shares every U description at setup;
  // the audit reports this as the documented exception.
  std::vector<std::vector<LinearConstraint>> u_descriptions;
};
struct SetupRep {
  std::uint8_t ok = 1;
};

struct LrSolveReq {
  Vec mu;
  std::uint8_t want_u = 0;
};
struct LrSolveRep {
  std::uint8_t status = 0;  // SolveStatus
  double value = 0.0;
  Vec coupling;  // A_v x_v
  BinaryVec u;   // only when requested
};

struct AdmmResetReq {
  std::uint8_t mode = 0;        // AdmmMode
  std::uint8_t fix_source = 0;  // FixSource (FixedBinaries only)
  BinaryVec fix_value;
  int pool_index = 0;  // 1-based into the block's own pool
  std::uint8_t zero_state = 1;
};
struct AdmmResetRep {
  std::uint8_t status = 0;
  Vec fixed_coupling_offset;  // A_v,u * uhat when binaries are fixed, else zeros
};

struct AdmmSolveReq {};
struct AdmmSolveRep {
  std::uint8_t status = 0;
  Vec t_coupled;  // coupled coordinates of x + mu/rho
  double obj = 0.0;
};

struct AdmmSyncReq {
  Vec xbar_coupled;
};
struct AdmmSyncRep {
  double r_primal_sq = 0.0;
  double r_dual_sq = 0.0;
};

struct TwoBlockSolveReq {
  Vec other_coupling;  // A_{3-v} x_{3-v} at its latest value
  Vec mu;
  std::uint8_t mode = 0;  // AdmmMode::Relaxed or Integral
  std::uint8_t reset = 0;
};
struct TwoBlockSolveRep {
  std::uint8_t status = 0;
  Vec coupling;        // A_v x_v
  Vec coupling_delta;  // A_v (x_v - x_v_prev)
  double obj = 0.0;
};

struct DupSolveReq {
  Vec mu;
  Vec lambda;  // length n^1
};
struct DupSolveRep {
  std::uint8_t status = 0;
  double value = 0.0;
  Vec coupling;
  BinaryVec perception;  // length n^1
};

struct AuxSolveReq {
  Vec mu;
  Vec gamma;  // selection-layout length
};
struct AuxSolveRep {
  std::uint8_t status = 0;
  double value = 0.0;
  Vec coupling;
  BinaryVec w;  // selection vector, layout order
  BinaryVec own_u;
  std::uint8_t own_is_new = 0;  // w_{v,v,0} = 1
};

struct PoolSyncReq {
  std::vector<int> sizes;                   // |S_v'| after this sync
  std::vector<BinaryVec> own_new;           // appended to the block's own list
  std::vector<std::vector<int>> new_cut_tuples;
  std::vector<BinaryVec> full_cuts;         // duplication mode only
  std::vector<std::pair<int, BinaryVec>> alert_exclusions;  // (block, pattern)
  std::uint8_t query_exhausted = 0;
};
struct PoolSyncRep {
  std::uint8_t exhausted = 0;
};

struct QueryOwnUReq {};
struct QueryOwnURep {
  BinaryVec u;
};

struct RepairReq {
  Vec coupling_target;
};
struct RepairRep {
  std::uint8_t status = 0;
  double obj = 0.0;
};

struct MembershipCheckReq {
  BinaryVec pattern;
};
struct MembershipCheckRep {
  std::uint8_t feasible = 0;
};

struct BoundNoteReq {
  double lb = -kInf;
  double ub = kInf;
};

using Request = std::variant<SetupReq, LrSolveReq, AdmmResetReq, AdmmSolveReq, AdmmSyncReq,
                             TwoBlockSolveReq, DupSolveReq, AuxSolveReq, PoolSyncReq, QueryOwnUReq,
                             RepairReq, MembershipCheckReq, BoundNoteReq>;
using Reply = std::variant<std::monostate, SetupRep, LrSolveRep, AdmmResetRep, AdmmSolveRep,
                           AdmmSyncRep, TwoBlockSolveRep, DupSolveRep, AuxSolveRep, PoolSyncRep,
                           QueryOwnURep, RepairRep, MembershipCheckRep>;

struct RoundMeta {
  long iteration = 0;
  bool broadcast = false;  // identical request to every block: logged once
  bool no_reply = false;   // informational; blocks do not answer
};

/// Coordinator-side handle on the set of block workers. Implementations
/// run the blocks in-thread, on worker threads, or behind sockets; the
/// algorithm drivers only see rounds.
class BlockGateway {
 public:
  virtual ~BlockGateway() = default;
  virtual int size() const = 0;
  virtual std::vector<Reply> round(const std::vector<Request>& reqs, const RoundMeta& meta) = 0;
  virtual Reply round_one(int block, const Request& req, const RoundMeta& meta) = 0;
  /// Estimated parallel seconds consumed so far: per round, the max block
  /// time; summed over rounds.
  virtual double parallel_seconds() const = 0;
};

}  // namespace dmilp
