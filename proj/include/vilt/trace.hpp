#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "vilt/tensor.hpp"

namespace vilt {

/// One monitoring row, appended at the initial point and at every completed
/// epoch (plus a final row when a run stops mid-epoch).
struct TraceRecord {
  std::size_t iteration = 0;
  std::size_t epoch = 0;
  double l1_err = 0.0;
  double l2_err = 0.0;
  double nat_res = 0.0;
  double wall_ms = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

struct Trace {
  std::vector<TraceRecord> records;
  Tensor final_theta;
  std::size_t total_iterations = 0;
  bool converged = false;  // residual tolerance reached

  // Allocation accounting, filled by the solvers: how many parameter-sized
  // vectors the run kept as state vs. reusable scratch.
  std::size_t param_state_vectors = 0;
  std::size_t param_scratch_vectors = 0;
  std::size_t codomain_scratch_vectors = 0;
};

/// CSV schema: header `iter,epoch,l1_err,l2_err,nat_res,wall_ms`, one row
/// per record, numbers printed with "%.17g".
void write_trace_csv(const std::filesystem::path& path, const Trace& trace);
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

}  // namespace vilt
