#include "vilt/trace.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vilt/vlt_io.hpp"

namespace vilt {

namespace {
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

void write_trace_csv(const std::filesystem::path& path, const Trace& trace) {
  std::string out = "iter,epoch,l1_err,l2_err,nat_res,wall_ms\n";
  for (const TraceRecord& r : trace.records) {
    out += std::to_string(r.iteration);
    out += ',';
    out += std::to_string(r.epoch);
    out += ',';
    out += fmt_double(r.l1_err);
    out += ',';
    out += fmt_double(r.l2_err);
    out += ',';
    out += fmt_double(r.nat_res);
    out += ',';
    out += fmt_double(r.wall_ms);
    out += '\n';
  }
  atomic_write(path, out);
}

std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trace csv: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "iter,epoch,l1_err,l2_err,nat_res,wall_ms") {
    throw std::runtime_error("bad trace csv header in " + path.string());
  }
  std::vector<TraceRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    TraceRecord r;
    char comma = 0;
    ls >> r.iteration >> comma >> r.epoch >> comma >> r.l1_err >> comma >>
        r.l2_err >> comma >> r.nat_res >> comma >> r.wall_ms;
    if (!ls) throw std::runtime_error("bad trace csv row in " + path.string());
    records.push_back(r);
  }
  return records;
}

}  // namespace vilt
