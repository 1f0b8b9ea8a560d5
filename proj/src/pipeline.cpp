#include "rhowave/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "rhowave/io.hpp"

namespace rhowave {

using json = nlohmann::ordered_json;

namespace {

void check_keys(const json& obj, const char* where, std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) fail(errc::invalid_spec, std::string("config: unknown key '") + it.key() + "' in " + where);
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void validate(const RunConfig& cfg) {
  if (cfg.model != "exponential" && cfg.model != "tabulated" && cfg.model != "seismic")
    fail(errc::invalid_spec, "coefficient.model must be exponential, tabulated, or seismic");
  if (cfg.model != "exponential" && cfg.file.empty())
    fail(errc::invalid_spec, "coefficient.file required for model " + cfg.model);
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) fail(errc::invalid_spec, "p must lie in (0,1)");
  if (cfg.jmax < 1 || cfg.kmax < 1 || cfg.grid_n < 1 || cfg.time_n < 1)
    fail(errc::invalid_spec, "all truncations must be positive");
  if (cfg.period_a < 1 || cfg.period_b < 1) fail(errc::invalid_spec, "period numbers must be positive");
  if (!(cfg.tol > 0)) fail(errc::invalid_spec, "solver.tol must be positive");
  if (cfg.max_iter < 1 || cfg.starts < 1 || cfg.levels < 1)
    fail(errc::invalid_spec, "solver.max_iter, starts, levels must be positive");
  if (cfg.out_dir.empty()) fail(errc::invalid_spec, "out_dir must not be empty");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(errc::invalid_spec, std::string("config: ") + e.what());
  }
  RunConfig cfg;
  try {
    check_keys(j, "config",
               {"coefficient", "boundary", "period", "mu", "p", "truncation", "solver", "out_dir"});
    if (j.contains("coefficient")) {
      const json& c = j.at("coefficient");
      check_keys(c, "coefficient", {"model", "c", "file"});
      read_field(c, "model", cfg.model);
      read_field(c, "c", cfg.c);
      read_field(c, "file", cfg.file);
    }
    if (j.contains("boundary")) {
      const json& b = j.at("boundary");
      check_keys(b, "boundary", {"a1", "b1", "a2", "b2"});
      read_field(b, "a1", cfg.a1);
      read_field(b, "b1", cfg.b1);
      read_field(b, "a2", cfg.a2);
      read_field(b, "b2", cfg.b2);
    }
    if (j.contains("period")) {
      const json& t = j.at("period");
      check_keys(t, "period", {"a", "b"});
      read_field(t, "a", cfg.period_a);
      read_field(t, "b", cfg.period_b);
    }
    read_field(j, "mu", cfg.mu);
    read_field(j, "p", cfg.p);
    if (j.contains("truncation")) {
      const json& t = j.at("truncation");
      check_keys(t, "truncation", {"jmax", "kmax", "grid_n", "time_n"});
      read_field(t, "jmax", cfg.jmax);
      read_field(t, "kmax", cfg.kmax);
      read_field(t, "grid_n", cfg.grid_n);
      read_field(t, "time_n", cfg.time_n);
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      check_keys(s, "solver", {"tol", "max_iter", "starts", "seed", "levels"});
      read_field(s, "tol", cfg.tol);
      read_field(s, "max_iter", cfg.max_iter);
      read_field(s, "starts", cfg.starts);
      read_field(s, "seed", cfg.seed);
      read_field(s, "levels", cfg.levels);
    }
    read_field(j, "out_dir", cfg.out_dir);
  } catch (const json::exception& e) {
    fail(errc::invalid_spec, std::string("config: ") + e.what());
  }
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  json j;
  j["coefficient"]["model"] = cfg.model;
  if (cfg.model == "exponential")
    j["coefficient"]["c"] = cfg.c;
  else
    j["coefficient"]["file"] = cfg.file;
  j["boundary"] = {{"a1", cfg.a1}, {"b1", cfg.b1}, {"a2", cfg.a2}, {"b2", cfg.b2}};
  j["period"] = {{"a", cfg.period_a}, {"b", cfg.period_b}};
  j["mu"] = cfg.mu;
  j["p"] = cfg.p;
  j["truncation"] = {
      {"jmax", cfg.jmax}, {"kmax", cfg.kmax}, {"grid_n", cfg.grid_n}, {"time_n", cfg.time_n}};
  j["solver"] = {{"tol", cfg.tol},
                 {"max_iter", cfg.max_iter},
                 {"starts", cfg.starts},
                 {"seed", cfg.seed},
                 {"levels", cfg.levels}};
  j["out_dir"] = cfg.out_dir;
  return j.dump(2) + "\n";
}

std::string coeff_field_to_json(const CoeffField& u, double mu, const PeriodSpec& period) {
  json j;
  j["truncation"] = {{"jmax", u.jmax}, {"nmodes", u.nmodes}};
  j["mu"] = mu;
  j["period"] = {{"a", period.a}, {"b", period.b}};
  json cosb = json::array(), sinb = json::array();
  for (int jj = 0; jj <= u.jmax; ++jj)
    for (int i = 0; i < u.nmodes; ++i) cosb.push_back(u.c(jj, i));
  for (int jj = 1; jj <= u.jmax; ++jj)
    for (int i = 0; i < u.nmodes; ++i) sinb.push_back(u.s(jj, i));
  j["cos"] = std::move(cosb);
  j["sin"] = std::move(sinb);
  return j.dump() + "\n";
}

namespace {

CoeffField coeff_field_from_parsed(const json& j) {
  int jmax = j.at("truncation").at("jmax").get<int>();
  int nmodes = j.at("truncation").at("nmodes").get<int>();
  if (jmax < 0 || nmodes < 1) fail(errc::invalid_spec, "field: bad truncation");
  CoeffField u(jmax, nmodes);
  const json& cosb = j.at("cos");
  const json& sinb = j.at("sin");
  if (static_cast<int>(cosb.size()) != (jmax + 1) * nmodes ||
      static_cast<int>(sinb.size()) != jmax * nmodes)
    fail(errc::invalid_spec, "field: coefficient array size mismatch");
  int idx = 0;
  for (int jj = 0; jj <= jmax; ++jj)
    for (int i = 0; i < nmodes; ++i) u.c(jj, i) = cosb.at(idx++).get<double>();
  idx = 0;
  for (int jj = 1; jj <= jmax; ++jj)
    for (int i = 0; i < nmodes; ++i) u.s(jj, i) = sinb.at(idx++).get<double>();
  return u;
}

}  // namespace

CoeffField coeff_field_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
    return coeff_field_from_parsed(j);
  } catch (const json::exception& e) {
    fail(errc::invalid_spec, std::string("field: ") + e.what());
  }
}

void write_grid_csv(const std::filesystem::path& path, const Transform& tr, const CoeffField& u) {
  std::vector<double> field = tr.synthesize(u);
  const auto& x = tr.basis().x();
  std::string s = "t";
  for (double xi : x) s += ",x=" + io::format_double(xi);
  s += "\n";
  for (int t = 0; t < tr.nt(); ++t) {
    s += io::format_double(tr.time(t));
    for (int i = 0; i < tr.nx(); ++i) s += "," + io::format_double(field[t * tr.nx() + i]);
    s += "\n";
  }
  io::atomic_write(path, s);
}

namespace {

std::string record_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "solution_%03d.json", index);
  return buf;
}

json record_meta_json(const SolutionRecord& rec) {
  json j;
  j["phi"] = rec.phi;
  j["residual"] = rec.residual;
  j["mass"] = rec.mass;
  j["method"] = rec.method;
  j["iterations"] = rec.iterations;
  j["seed"] = rec.seed;
  j["truncation"] = rec.truncation;
  j["level"] = rec.level;
  j["max_iterate_norm"] = rec.max_iterate_norm;
  j["converged"] = rec.converged;
  j["trivial"] = rec.trivial;
  j["saddle_of_residual"] = rec.saddle_of_residual;
  return j;
}

}  // namespace

void write_archive(const std::filesystem::path& dir, const SequenceResult& seq,
                   const Functional& fn) {
  std::filesystem::create_directories(dir);
  const WorkingSpace& ws = fn.space();
  for (size_t i = 0; i < seq.records.size(); ++i) {
    const SolutionRecord& rec = seq.records[i];
    json j = record_meta_json(rec);
    j["field"] = json::parse(coeff_field_to_json(rec.u, ws.mu(), ws.table().period()));
    io::atomic_write(dir / record_file_name(static_cast<int>(i)), j.dump(2) + "\n");
  }
  std::string csv = "l,phi,residual,mass,method,iters\n";
  for (const auto& rec : seq.records) {
    csv += std::to_string(rec.level) + "," + io::format_double(rec.phi) + "," +
           io::format_double(rec.residual) + "," + io::format_double(rec.mass) + "," + rec.method +
           "," + std::to_string(rec.iterations) + "\n";
  }
  io::atomic_write(dir / "summary.csv", csv);

  json levels = json::array();
  for (const auto& lr : seq.levels) {
    json j;
    j["l"] = lr.bounds.l;
    j["zeta"] = lr.bounds.zeta;
    j["rho"] = lr.bounds.rho;
    j["radius"] = lr.bounds.radius;
    j["sigma"] = lr.bounds.sigma;
    j["c0"] = lr.bounds.c0;
    j["samples"] = lr.bounds.samples;
    j["low_confidence"] = lr.bounds.low_confidence;
    j["accepted"] = lr.accepted;
    j["found_in_window"] = lr.found_in_window;
    levels.push_back(std::move(j));
  }
  io::atomic_write(dir / "levels.json", levels.dump(2) + "\n");
}

std::vector<SolutionRecord> read_archive(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (auto it = std::filesystem::directory_iterator(dir, ec);
       !ec && it != std::filesystem::directory_iterator(); ++it) {
    const auto& p = it->path();
    if (p.filename().string().rfind("solution_", 0) == 0 && p.extension() == ".json")
      files.push_back(p);
  }
  if (ec) fail(errc::io_error, "cannot read archive directory " + dir.string());
  std::sort(files.begin(), files.end());
  std::vector<SolutionRecord> out;
  for (const auto& p : files) {
    std::ifstream in(p);
    if (!in) fail(errc::io_error, "cannot open " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
      j = json::parse(ss.str());
      SolutionRecord rec;
      rec.phi = j.at("phi").get<double>();
      rec.residual = j.at("residual").get<double>();
      rec.mass = j.at("mass").get<double>();
      rec.method = j.at("method").get<std::string>();
      rec.iterations = j.at("iterations").get<int>();
      rec.seed = j.at("seed").get<std::uint64_t>();
      rec.truncation = j.at("truncation").get<int>();
      rec.level = j.at("level").get<int>();
      rec.max_iterate_norm = j.at("max_iterate_norm").get<double>();
      rec.converged = j.at("converged").get<bool>();
      rec.trivial = j.at("trivial").get<bool>();
      rec.saddle_of_residual = j.at("saddle_of_residual").get<bool>();
      rec.u = coeff_field_from_parsed(j.at("field"));
      out.push_back(std::move(rec));
    } catch (const json::exception& e) {
      fail(errc::invalid_spec, p.string() + ": " + e.what());
    }
  }
  return out;
}

int exit_code_for(errc c) {
  switch (c) {
    case errc::assumption_a1_violated:
    case errc::assumption_a2_violated:
    case errc::certification_failure:
    case errc::mu_in_spectrum:
    case errc::mu_below_window:
    case errc::inconclusive_gap:
      return 1;
    case errc::numeric_error:
    case errc::resolution_error:
    case errc::domain_error:
    case errc::degenerate_norm:
    case errc::aliasing_error:
    case errc::truncation_error:
    case errc::non_convergence:
      return 3;
    default:
      return 2;
  }
}

namespace {

struct Stage {
  Coefficient coeff = Coefficient::exponential(1.0);
  RobinBC bc;
  SpectralConstants consts;
  std::shared_ptr<const EigenBasis> basis;
  CertReport cert;
  std::shared_ptr<const SpectrumTable> table;
};

Coefficient make_coefficient(const RunConfig& cfg) {
  if (cfg.model == "exponential") return Coefficient::exponential(cfg.c);
  if (cfg.model == "tabulated") return load_coefficient_csv(cfg.file);
  return load_seismic_csv(cfg.file).coeff;
}

Stage make_stage(const RunConfig& cfg) {
  Stage st;
  st.coeff = make_coefficient(cfg);
  st.bc = boundary_transform(st.coeff, cfg.a1, cfg.b1, cfg.a2, cfg.b2);
  st.consts = (st.bc.beta1 > 0 && st.bc.beta2 > 0)
                  ? spectral_constants(st.coeff, st.bc.alpha1 / st.bc.beta1,
                                       st.bc.alpha2 / st.bc.beta2)
                  : spectral_constants(st.coeff);
  st.basis = std::make_shared<const EigenBasis>(eigensolve(st.coeff, st.bc, cfg.kmax, cfg.grid_n));
  st.cert = certify_asymptotics(*st.basis, st.consts);
  st.table = std::make_shared<const SpectrumTable>(build_spectrum(
      st.basis, reduce_period(cfg.period_a, cfg.period_b), cfg.jmax, st.consts, st.cert.n0));
  return st;
}

// pattern-aware exact temporal resonance of the pair (j, label)
bool pair_resonant(const SpectrumTable& table, int j, int label) {
  long long a = table.period().a, b = table.period().b;
  if (table.pattern_shift() == 0.0) return label >= 1 && label * a == j * b;
  return (2 * label + 1) * a == 2 * j * b;
}

json gap_certificate_json(const MuReport& rep, const EssentialWindow& win) {
  json j;
  j["delta"] = rep.delta;
  j["tail_floor"] = rep.tail.tail_floor;
  j["window_lo"] = win.lo;
  j["window_hi"] = win.hi;
  j["admissible"] = rep.admissible;
  return j;
}

json level_bounds_json(const LevelBounds& b) {
  json j;
  j["l"] = b.l;
  j["zeta"] = b.zeta;
  j["rho"] = b.rho;
  j["radius"] = b.radius;
  j["sigma"] = b.sigma;
  j["c0"] = b.c0;
  j["samples"] = b.samples;
  j["low_confidence"] = b.low_confidence;
  return j;
}

// names the first failing admissibility check, empty when mu passes
std::string mu_failure(const MuReport& rep) {
  if (rep.in_spectrum) return "mu in spectrum";
  if (!rep.above_window) return "mu not above the essential window";
  if (!rep.tail.conclusive) return "tail certificate inconclusive";
  if (!rep.admissible) return "mu not admissible";
  return "";
}

int cmd_ingest(const RunConfig& cfg, std::ostream& log) {
  if (cfg.model != "seismic")
    fail(errc::invalid_spec, "ingest-seismic needs coefficient.model = seismic");
  SeismicIngest ing = load_seismic_csv(cfg.file);
  std::filesystem::path dir(cfg.out_dir);
  std::vector<std::vector<double>> rows;
  for (size_t i = 0; i < ing.x.size(); ++i) rows.push_back({ing.x[i], ing.rho[i]});
  io::write_csv(dir / "profile.csv", {"x", "rho"}, rows);
  json j;
  j["scale"] = ing.scale;
  j["travel_max"] = ing.travel_max;
  j["samples"] = ing.x.size();
  io::atomic_write(dir / "ingest.json", j.dump(2) + "\n");
  log << "ingest-seismic: " << ing.x.size() << " samples, travel time " << ing.travel_max
      << " rescaled by " << ing.scale << "\n";
  return 0;
}

int cmd_eigs(const RunConfig& cfg, std::ostream& log) {
  Stage st;
  st.coeff = make_coefficient(cfg);
  st.bc = boundary_transform(st.coeff, cfg.a1, cfg.b1, cfg.a2, cfg.b2);
  EigenBasis basis = eigensolve(st.coeff, st.bc, cfg.kmax, cfg.grid_n);
  std::filesystem::path dir(cfg.out_dir);
  std::vector<std::vector<double>> rows;
  for (const auto& m : basis.modes())
    rows.push_back({static_cast<double>(m.label), m.lambda, m.theta, m.err_est});
  io::write_csv(dir / "eigs.csv", {"k", "lambda", "theta", "err_estimate"}, rows);

  std::vector<std::string> header = {"x"};
  for (const auto& m : basis.modes()) header.push_back("phi_" + std::to_string(m.label));
  std::vector<std::vector<double>> vec_rows;
  for (int n = 0; n < basis.nodes(); ++n) {
    std::vector<double> row = {basis.x()[n]};
    for (int i = 0; i < basis.size(); ++i) row.push_back(basis.phi(i, n));
    vec_rows.push_back(std::move(row));
  }
  io::write_csv(dir / "eigenvectors.csv", header, vec_rows);
  log << "eigs: " << basis.size() << " modes, case " << basis.bc().case_tag << ", grid "
      << cfg.grid_n << "\n";
  return 0;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& log) {
  Stage st = make_stage(cfg);
  std::filesystem::path dir(cfg.out_dir);

  std::vector<std::vector<double>> rows;
  for (int j = 0; j <= st.table->jmax(); ++j)
    for (const auto& m : st.basis->modes()) {
      double lam = st.table->lambda_jk(j, m.label);
      double sign_class = lam - cfg.mu > 1e-9 ? 1.0 : (lam - cfg.mu < -1e-9 ? -1.0 : 0.0);
      rows.push_back({static_cast<double>(j), static_cast<double>(m.label), lam,
                      pair_resonant(*st.table, j, m.label) ? 1.0 : 0.0, sign_class});
    }
  io::write_csv(dir / "spectrum.csv", {"j", "k", "lambda_jk", "resonant", "sign_class"}, rows);

  MuReport rep = assess_mu(*st.table, cfg.mu);
  EssentialWindow win = essential_window(st.table->case_tag(), st.table->consts());
  json cert = gap_certificate_json(rep, win);
  if (rep.admissible) {
    Functional fn(st.table, cfg.mu, cfg.p, cfg.time_n);
    json levels = json::array();
    for (int l = 1; l <= cfg.levels; ++l)
      levels.push_back(level_bounds_json(
          level_bounds(fn, l, 1024, cfg.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(l)))));
    cert["levels"] = std::move(levels);
  }
  io::atomic_write(dir / "certificate.json", cert.dump(2) + "\n");

  log << "spectrum: " << rows.size() << " pairs, delta = " << rep.delta << ", window ["
      << win.lo << ", " << win.hi << "]\n";
  std::string failing = mu_failure(rep);
  if (!failing.empty()) {
    log << "certification failed: " << failing << "\n";
    return 1;
  }
  return 0;
}

int cmd_certify(const RunConfig& cfg, std::ostream& log) {
  Stage st = make_stage(cfg);
  std::filesystem::path dir(cfg.out_dir);

  std::vector<std::vector<double>> rows;
  for (const auto& r : st.cert.rows)
    rows.push_back({static_cast<double>(r.k), r.lambda, r.theta, r.lower, r.upper, r.outer_lower,
                    r.outer_upper, r.tol, r.pass ? 1.0 : 0.0});
  io::write_csv(dir / "cert_report.csv",
                {"k", "lambda", "theta", "lower", "upper", "outer_lower", "outer_upper", "tol",
                 "pass"},
                rows);
  json cj;
  cj["case_tag"] = st.cert.case_tag;
  cj["verdict"] = st.cert.verdict;
  cj["n0"] = st.cert.n0;
  io::atomic_write(dir / "cert_report.json", cj.dump(2) + "\n");

  // containment of the exactly resonant pairs in the essential window
  EssentialWindow win = essential_window(st.table->case_tag(), st.table->consts());
  double worst_dev = 0;
  int resonant_pairs = 0;
  bool contained = true;
  for (int j = 0; j <= st.table->jmax(); ++j)
    for (const auto& m : st.basis->modes())
      if (pair_resonant(*st.table, j, m.label)) {
        double lam = st.table->lambda_jk(j, m.label);
        ++resonant_pairs;
        if (lam < win.lo - 1e-12 || lam > win.hi + 1e-12) contained = false;
        worst_dev = std::max(worst_dev, std::max(win.lo - lam, lam - win.hi));
      }
  MuReport rep = assess_mu(*st.table, cfg.mu);
  json acc;
  acc["window_lo"] = win.lo;
  acc["window_hi"] = win.hi;
  acc["resonant_pairs"] = resonant_pairs;
  acc["contained"] = contained;
  acc["worst_overshoot"] = worst_dev;
  acc["tail"] = {{"theta_bar", rep.tail.theta_bar},
                 {"floor_a", rep.tail.floor_a},
                 {"floor_b_pos", rep.tail.floor_b_pos},
                 {"floor_b_neg", rep.tail.floor_b_neg},
                 {"floor_res", rep.tail.floor_res},
                 {"tail_floor", rep.tail.tail_floor},
                 {"conclusive", rep.tail.conclusive}};
  io::atomic_write(dir / "accumulation.json", acc.dump(2) + "\n");

  json adm;
  adm["mu"] = rep.mu;
  adm["delta"] = rep.delta;
  adm["nearest"] = {{"j", rep.j_near}, {"k", rep.k_near}};
  adm["in_spectrum"] = rep.in_spectrum;
  adm["above_window"] = rep.above_window;
  adm["admissible"] = rep.admissible;
  io::atomic_write(dir / "admissibility.json", adm.dump(2) + "\n");

  io::atomic_write(dir / "certificate.json",
                   gap_certificate_json(rep, win).dump(2) + "\n");

  log << "certify: case " << st.cert.case_tag << ", delta = " << rep.delta << ", window ["
      << win.lo << ", " << win.hi << "]\n";
  std::string failing;
  if (!st.cert.verdict) failing = "eigenvalue asymptotics window";
  else if (resonant_pairs > 0 && !contained) failing = "essential accumulation containment";
  else failing = mu_failure(rep);
  if (!failing.empty()) {
    log << "certification failed: " << failing << "\n";
    return 1;
  }
  log << "certify: PASS\n";
  return 0;
}

int cmd_solve(const RunConfig& cfg, std::ostream& log) {
  Stage st = make_stage(cfg);
  Functional fn(st.table, cfg.mu, cfg.p, cfg.time_n);

  SequenceConfig sc;
  sc.levels = cfg.levels;
  sc.m = std::min(cfg.jmax, cfg.kmax);
  sc.starts = cfg.starts;
  sc.seed = cfg.seed;
  sc.tol = cfg.tol;
  sc.max_iter = cfg.max_iter;
  SequenceResult seq = solution_sequence(fn, sc);

  std::filesystem::path dir(cfg.out_dir);
  write_archive(dir, seq, fn);

  MuReport rep = assess_mu(*st.table, cfg.mu);
  EssentialWindow win = essential_window(st.table->case_tag(), st.table->consts());
  json cert = gap_certificate_json(rep, win);
  json levels = json::array();
  for (const auto& lr : seq.levels) levels.push_back(level_bounds_json(lr.bounds));
  cert["levels"] = std::move(levels);
  io::atomic_write(dir / "certificate.json", cert.dump(2) + "\n");

  for (const auto& lr : seq.levels)
    log << "level " << lr.bounds.l << ": accepted " << lr.accepted << ", rho = " << lr.bounds.rho
        << ", sigma = " << lr.bounds.sigma << (lr.found_in_window ? ", window hit" : "")
        << (lr.bounds.low_confidence ? ", low-confidence c0" : "") << "\n";
  log << "solve: " << seq.records.size() << " distinct records archived in " << cfg.out_dir
      << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  std::filesystem::path dir(cfg.out_dir);
  std::vector<SolutionRecord> recs = read_archive(dir);
  if (recs.empty()) fail(errc::io_error, "no archived solutions in " + dir.string());

  Stage st = make_stage(cfg);
  Functional fn(st.table, cfg.mu, cfg.p, cfg.time_n);
  const WorkingSpace& ws = fn.space();

  double worst_diff = 0, worst_weak = 0, worst_defect = 0;
  json rows = json::array();
  for (size_t i = 0; i < recs.size(); ++i) {
    SolutionRecord& rec = recs[i];
    if (rec.u.jmax != ws.jmax() || rec.u.nmodes != ws.nmodes())
      fail(errc::invalid_spec, "archived field truncation does not match the configuration");
    CoeffField g = fn.gradient(rec.u);
    ws.project_constrained_minus(g, rec.truncation);
    double resid = fn.grad_norm_e(g);
    double diff = std::abs(resid - rec.residual);
    VerifyReport vr = verify_solution(fn, rec, 100, cfg.seed + i);
    worst_diff = std::max(worst_diff, diff);
    worst_weak = std::max(worst_weak, vr.max_weak_residual);
    worst_defect = std::max(worst_defect, vr.critical_value_defect);
    json j;
    j["file"] = record_file_name(static_cast<int>(i));
    j["residual_stored"] = rec.residual;
    j["residual_recomputed"] = resid;
    j["residual_diff"] = diff;
    j["max_weak_residual"] = vr.max_weak_residual;
    j["critical_value_defect"] = vr.critical_value_defect;
    j["energy_balance_defect"] = vr.energy_balance_defect;
    j["n_tests"] = vr.n_tests;
    rows.push_back(std::move(j));
  }
  json rep;
  rep["records"] = recs.size();
  rep["max_residual_diff"] = worst_diff;
  rep["max_weak_residual"] = worst_weak;
  rep["max_critical_value_defect"] = worst_defect;
  rep["rows"] = std::move(rows);
  io::atomic_write(dir / "verify.json", rep.dump(2) + "\n");

  log << "verify: " << recs.size() << " records, max residual diff " << worst_diff
      << ", max weak residual " << worst_weak << "\n";
  if (worst_diff > 1e-12) {
    log << "certification failed: residual reproduction\n";
    return 1;
  }
  if (worst_weak > 1e-7) {
    log << "certification failed: weak-form residual\n";
    return 1;
  }
  return 0;
}

int cmd_report(const RunConfig& cfg, std::ostream& log) {
  std::filesystem::path dir(cfg.out_dir);
  std::vector<SolutionRecord> recs = read_archive(dir);
  if (recs.empty()) fail(errc::io_error, "no archived solutions in " + dir.string());

  std::ifstream in(dir / "levels.json");
  if (!in) fail(errc::io_error, "missing levels.json; run solve first");
  std::stringstream ss;
  ss << in.rdbuf();
  json levels;
  try {
    levels = json::parse(ss.str());
  } catch (const json::exception& e) {
    fail(errc::invalid_spec, std::string("levels.json: ") + e.what());
  }

  double frac = 1.0 / (cfg.p + 1.0) - 0.5;  // action-to-mass conversion for critical points
  std::ostringstream txt;
  txt << "periodic-solution archive: " << recs.size() << " records\n\n";
  txt << "level  count  phi_range                 mass_min      mass_bound\n";
  std::vector<std::vector<double>> trend;
  for (const auto& lj : levels) {
    int l = lj.at("l").get<int>();
    double rho_l = lj.at("rho").get<double>();
    double bound = rho_l / frac;
    int count = 0;
    double phi_lo = 0, phi_hi = 0, mass_min = 0;
    bool any = false;
    for (const auto& rec : recs)
      if (rec.level == l) {
        ++count;
        if (!any || rec.phi < phi_lo) phi_lo = rec.phi;
        if (!any || rec.phi > phi_hi) phi_hi = rec.phi;
        if (!any || rec.mass < mass_min) mass_min = rec.mass;
        any = true;
      }
    txt << "  " << l << "      " << count << "     ";
    if (any)
      txt << "[" << io::format_double(phi_lo) << ", " << io::format_double(phi_hi) << "]  "
          << io::format_double(mass_min);
    else
      txt << "-";
    txt << "  <= " << io::format_double(bound) << "\n";
    trend.push_back({static_cast<double>(l), static_cast<double>(count), any ? phi_hi : 0.0,
                     any ? mass_min : 0.0, bound});
  }
  txt << "\nrecords (phi descending):\n";
  for (size_t i = 0; i < recs.size(); ++i)
    txt << "  " << record_file_name(static_cast<int>(i)) << "  l=" << recs[i].level
        << "  phi=" << io::format_double(recs[i].phi)
        << "  residual=" << io::format_double(recs[i].residual)
        << "  mass=" << io::format_double(recs[i].mass) << "  " << recs[i].method << "/"
        << recs[i].iterations << "\n";
  io::atomic_write(dir / "report.txt", txt.str());
  io::write_csv(dir / "trend.csv", {"l", "count", "phi_max", "mass_min", "mass_bound"}, trend);

  Stage st = make_stage(cfg);
  Functional fn(st.table, cfg.mu, cfg.p, cfg.time_n);
  write_grid_csv(dir / "solution_best.csv", fn.transform(), recs.front().u);

  log << txt.str();
  return 0;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log) {
  try {
    validate(cfg);
    if (command == "ingest-seismic") return cmd_ingest(cfg, log);
    if (command == "eigs") return cmd_eigs(cfg, log);
    if (command == "spectrum") return cmd_spectrum(cfg, log);
    if (command == "certify") return cmd_certify(cfg, log);
    if (command == "solve") return cmd_solve(cfg, log);
    if (command == "verify") return cmd_verify(cfg, log);
    if (command == "report") return cmd_report(cfg, log);
    fail(errc::invalid_spec, "unknown command '" + command + "'");
  } catch (const Error& e) {
    log << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace rhowave
