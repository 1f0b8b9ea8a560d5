#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "rhowave/errors.hpp"
#include "rhowave/solver.hpp"

namespace rhowave {

// Everything a run needs, mirrored one-to-one onto the JSON config keys:
//   coefficient{model,c|file}, boundary{a1,b1,a2,b2}, period{a,b}, mu, p,
//   truncation{jmax,kmax,grid_n,time_n}, solver{tol,max_iter,starts,seed,levels},
//   out_dir.
// Unknown keys are rejected; omitted blocks fall back to the defaults below, so
// serialize(parse(text)) is the canonical fully-explicit form.
struct RunConfig {
  std::string model = "exponential";  // exponential | tabulated | seismic
  double c = 1.0;                     // exponential exponent
  std::string file;                   // tabulated/seismic profile CSV

  double a1 = 1, b1 = 0, a2 = 1, b2 = 0;  // physical boundary data
  long long period_a = 1, period_b = 1;

  double mu = 2.5;
  double p = 0.5;

  int jmax = 12, kmax = 12, grid_n = 192, time_n = 100;

  double tol = 1e-9;
  int max_iter = 1500;
  int starts = 32;
  std::uint64_t seed = 1;
  int levels = 4;

  std::string out_dir = "out";
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const RunConfig& cfg);

std::string coeff_field_to_json(const CoeffField& u, double mu, const PeriodSpec& period);
CoeffField coeff_field_from_json(const std::string& text);

// time-by-space sample matrix of the synthesized field, first column t
void write_grid_csv(const std::filesystem::path& path, const Transform& tr, const CoeffField& u);

void write_archive(const std::filesystem::path& dir, const SequenceResult& seq,
                   const Functional& fn);
std::vector<SolutionRecord> read_archive(const std::filesystem::path& dir);

// One command per process: ingest-seismic | eigs | spectrum | certify | solve |
// verify | report. Artifacts land in cfg.out_dir, each written atomically.
// Returns the process exit status: 0 success, 1 a certification failed (the
// failing check is named on the log stream), 2 bad configuration, 3 numeric
// trouble.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log);

int exit_code_for(errc c);

}  // namespace rhowave
