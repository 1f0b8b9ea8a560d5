#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rhowave/variational.hpp"

namespace rhowave {

struct SolutionRecord {
  CoeffField u;
  double phi = 0;
  double residual = 0;  // energy norm of the gradient representation
  double mass = 0;      // integral of |u|^{p+1} against the density
  std::string method;   // "fixed-point" or "saddle"
  int iterations = 0;
  std::uint64_t seed = 0;
  int truncation = 0;
  int level = -1;
  double max_iterate_norm = 0;
  bool converged = false;
  bool trivial = false;
  bool saddle_of_residual = false;
};

using Projector = std::function<void(CoeffField&)>;

// Diagonal-inversion iteration u <- (L - mu)^{-1} P f(u) on a projected
// subspace; the default projector is the constrained-minus window. relax < 1
// averages each update with the previous iterate and halves itself whenever
// the step size grows, which tames modes where the plain map is expansive.
SolutionRecord fixed_point_solve(const Functional& fn, const CoeffField& u0, int m, double tol,
                                 int max_iter, double relax = 1.0);
SolutionRecord fixed_point_solve_projected(const Functional& fn, const CoeffField& u0,
                                           const Projector& proj, int m, double tol,
                                           int max_iter, double relax = 1.0);

// Minimizes half the squared energy norm of the gradient representation with
// spectral-step descent, backtracking, and a normal-equation polish.
SolutionRecord saddle_search(const Functional& fn, const CoeffField& u0, int m, double tol,
                             int max_iter);
SolutionRecord saddle_search_projected(const Functional& fn, const CoeffField& u0,
                                       const Projector& proj, int m, double tol, int max_iter);

// phase rotation u(t) -> u(t + t0) acting on the trig-pair coefficients
CoeffField time_translate(const SpectrumTable& table, const CoeffField& u, double t0);

struct DeflateDecision {
  bool accepted = true;
  int matched = -1;       // index of the colliding record
  int matched_sign = 0;   // sign that matched
  int matched_phase = 0;  // phase-scan index that matched
};

DeflateDecision deflate(const WorkingSpace& ws, const std::vector<SolutionRecord>& found,
                        const SolutionRecord& cand, double sep = -1.0, int phases = 64);

struct SequenceConfig {
  int levels = 4;
  int m = 8;
  int starts = 32;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  int max_iter = 1500;
  int c0_samples = 1024;
  double fp_relax = 0.35;  // damping for the fixed-point runs
};

struct LevelReport {
  LevelBounds bounds;
  int accepted = 0;
  bool found_in_window = false;  // a kept record with phi in [sigma, rho]
};

struct SequenceResult {
  std::vector<SolutionRecord> records;  // sorted by phi descending
  std::vector<LevelReport> levels;
};

SequenceResult solution_sequence(const Functional& fn, const SequenceConfig& cfg);

struct TruncationReport {
  int m_from = 0;
  int m_to = 0;
  double diff_e = 0;  // energy distance between the two solutions
  double max_iterate_norm = 0;
  bool converged = false;
  SolutionRecord refined;
};

TruncationReport truncation_study(const Functional& fn, const SolutionRecord& rec, int m_to,
                                  double tol, int max_iter);

struct VerifyReport {
  double max_weak_residual = 0;     // worst normalized test-field pairing
  double critical_value_defect = 0; // action vs mass identity
  double energy_balance_defect = 0; // quadratic form vs mass
  int n_tests = 0;
};

VerifyReport verify_solution(const Functional& fn, const SolutionRecord& rec, int n_tests,
                             std::uint64_t seed);

}  // namespace rhowave
