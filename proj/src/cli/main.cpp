#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "chainz2/bdg.hpp"
#include "chainz2/fock.hpp"
#include "chainz2/jordan_wigner.hpp"
#include "chainz2/models.hpp"
#include "chainz2/par.hpp"
#include "chainz2/selftest.hpp"
#include "chainz2/skew.hpp"
#include "chainz2/z2flow.hpp"

namespace {

using nlohmann::json;
using namespace chainz2;

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::string fmt_sign(int s) { return s > 0 ? "+1" : std::to_string(s); }

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;  // extra "# key=value" header lines
};

struct RunOutcome {
  Table table;
  std::vector<std::string> summary;
  int exit_override = 0;
};

const json& need(const json& j, const char* field) {
  if (!j.contains(field))
    throw ConfigError(std::string("missing field '") + field + "'");
  return j.at(field);
}

double need_num(const json& j, const char* field) {
  const json& v = need(j, field);
  if (!v.is_number())
    throw ConfigError(std::string("field '") + field + "' must be a number");
  return v.get<double>();
}

int need_int(const json& j, const char* field) {
  const json& v = need(j, field);
  if (!v.is_number_integer())
    throw ConfigError(std::string("field '") + field + "' must be an integer");
  return v.get<int>();
}

double num_or(const json& j, const char* field, double dflt) {
  if (!j.contains(field)) return dflt;
  const json& v = j.at(field);
  if (!v.is_number())
    throw ConfigError(std::string("field '") + field + "' must be a number");
  return v.get<double>();
}

int int_or(const json& j, const char* field, int dflt) {
  if (!j.contains(field)) return dflt;
  const json& v = j.at(field);
  if (!v.is_number_integer())
    throw ConfigError(std::string("field '") + field + "' must be an integer");
  return v.get<int>();
}

Vec vec_field(const json& v, int n, const char* field) {
  if (v.is_number()) return Vec::Constant(n, v.get<double>());
  if (v.is_array()) {
    if (static_cast<int>(v.size()) != n)
      throw ConfigError(std::string("field '") + field + "' needs " + std::to_string(n) +
                        " entries, has " + std::to_string(v.size()));
    Vec out(n);
    for (int i = 0; i < n; ++i) {
      if (!v[i].is_number())
        throw ConfigError(std::string("field '") + field + "' has a non-numeric entry");
      out(i) = v[i].get<double>();
    }
    return out;
  }
  throw ConfigError(std::string("field '") + field + "' must be a number or an array");
}

std::vector<int> int_list(const json& v, const char* field) {
  std::vector<int> out;
  if (v.is_number_integer()) {
    out.push_back(v.get<int>());
    return out;
  }
  if (v.is_array()) {
    for (const auto& e : v) {
      if (!e.is_number_integer())
        throw ConfigError(std::string("field '") + field + "' has a non-integer entry");
      out.push_back(e.get<int>());
    }
    if (!out.empty()) return out;
  }
  throw ConfigError(std::string("field '") + field + "' must be an integer or a non-empty array");
}

ChainSpec::Boundary boundary_from(const std::string& name) {
  if (name == "open") return ChainSpec::Boundary::open;
  if (name == "periodic") return ChainSpec::Boundary::periodic;
  if (name == "antiperiodic") return ChainSpec::Boundary::antiperiodic;
  if (name == "flux") return ChainSpec::Boundary::flux;
  if (name == "two_cell_flux") return ChainSpec::Boundary::two_cell_flux;
  throw ConfigError("unknown boundary '" + name + "'");
}

ChainSpec parse_chain(const json& j) {
  ChainSpec s;
  s.L = need_int(j, "L");
  if (s.L <= 0) throw ConfigError("field 'L' must be positive");
  s.boundary = boundary_from(j.value("boundary", std::string("open")));
  s.alpha = num_or(j, "alpha", 0.0);
  const int nb = s.bonds();
  s.w = vec_field(need(j, "w"), nb, "w");
  s.mu = j.contains("mu") ? vec_field(j.at("mu"), s.L, "mu") : Vec::Zero(s.L);
  if (j.contains("delta")) s.delta_mag = vec_field(j.at("delta"), nb, "delta");
  s.delta_phase = num_or(j, "delta_phase", 0.0);
  s.quartic_K = num_or(j, "K", 0.0);
  s.validate();
  return s;
}

std::vector<double> parse_sweep(const json& cfg) {
  const json& sw = need(cfg, "sweep");
  const std::string var = sw.value("variable", std::string("alpha"));
  if (var != "alpha") throw ConfigError("sweep variable '" + var + "' is not supported");
  const int points = int_or(sw, "points", 0);
  if (points < 2) throw ConfigError("sweep grid needs at least 2 points");
  const double lo = num_or(sw, "min", 0.0);
  const double hi = num_or(sw, "max", kPi);
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) grid[i] = lo + (hi - lo) * i / (points - 1);
  return grid;
}

RunOutcome run_index(const json& cfg) {
  const ChainSpec s = parse_chain(need(cfg, "chain"));
  const Z2Report rep = kitaev_index(build_bdg(s));
  RunOutcome out;
  out.table.columns = {"sign", "pfaffian", "gap"};
  out.table.rows.push_back({fmt_sign(rep.sign), fmt(rep.pfaffian_value), fmt(rep.gap)});
  out.summary.push_back("index=" + fmt_sign(rep.sign));
  return out;
}

RunOutcome run_relative_index(const json& cfg) {
  RunOutcome out;
  Z2Report rep;
  if (cfg.value("double_sided", false)) {
    const int half = need_int(cfg, "half_width");
    if (half < 1) throw ConfigError("field 'half_width' must be positive");
    const int n = 2 * half + 1;
    ChainSpec base;
    base.L = half;
    base.boundary = ChainSpec::Boundary::flux;
    base.w = vec_field(need(cfg, "w"), n - 1, "w");
    base.mu = cfg.contains("mu") ? vec_field(cfg.at("mu"), n, "mu") : Vec::Zero(n);
    if (cfg.contains("delta")) base.delta_mag = vec_field(cfg.at("delta"), n - 1, "delta");
    base.delta_phase = num_or(cfg, "delta_phase", 0.0);
    ChainSpec s0 = base;
    s0.alpha = num_or(cfg, "alpha0", 0.0);
    ChainSpec s1 = base;
    s1.alpha = num_or(cfg, "alpha1", kPi);
    rep = relative_index(build_double_sided(s0), build_double_sided(s1), 1e-8, true);
  } else {
    const ChainSpec s0 = parse_chain(need(cfg, "chain0"));
    const ChainSpec s1 = parse_chain(need(cfg, "chain1"));
    rep = relative_index(build_bdg(s0), build_bdg(s1), 1e-8, true);
  }
  const int kc = rep.kernel_counts.empty() ? 0 : rep.kernel_counts.front();
  out.table.columns = {"sign", "kernel_count", "hs_norm"};
  out.table.rows.push_back({fmt_sign(rep.sign), std::to_string(kc), fmt(rep.hs_norm)});
  out.summary.push_back("relative_index=" + fmt_sign(rep.sign));
  return out;
}

RunOutcome run_sf2_flux(const json& cfg) {
  ChainSpec s = parse_chain(need(cfg, "chain"));
  if (s.boundary != ChainSpec::Boundary::flux &&
      s.boundary != ChainSpec::Boundary::two_cell_flux)
    throw ConfigError("sf2_flux needs boundary 'flux' or 'two_cell_flux'");
  const std::vector<double> grid = parse_sweep(cfg);
  auto sampler = [s](double alpha) {
    ChainSpec c = s;
    c.alpha = alpha;
    return majorana_form(build_bdg(c));
  };
  const HamiltonianPath path(sampler, grid);
  const Z2Report rep = sf2_path(path);
  RunOutcome out;
  out.table.columns = {"alpha", "gap", "pf_sign"};
  for (double a : grid) {
    const SkewMatrix m = sampler(a);
    const double gap = canonical_form(m).energies(0);
    const int ps = pfaffian(m) >= 0.0 ? 1 : -1;
    out.table.rows.push_back({fmt(a), fmt(gap), fmt_sign(ps)});
  }
  out.summary.push_back("sf2=" + fmt_sign(rep.sign));
  for (double x : rep.crossings) out.summary.push_back("crossing=" + fmt(x));
  return out;
}

RunOutcome run_ed_ground(const json& cfg) {
  const ChainSpec s = parse_chain(need(cfg, "chain"));
  const GroundSpaceReport gs = ground_space(assemble(s.L, build_terms(s)));
  RunOutcome out;
  out.table.columns = {"E0", "E1", "gap", "degeneracy", "parity0"};
  out.table.rows.push_back({fmt(gs.E0), fmt(gs.E0 + gs.gap), fmt(gs.gap),
                            std::to_string(gs.degeneracy), fmt_sign(gs.parities.at(0))});
  out.summary.push_back("E0=" + fmt(gs.E0) + " degeneracy=" + std::to_string(gs.degeneracy) +
                        " gap=" + fmt(gs.gap));
  return out;
}

RunOutcome run_flux_sweep(const json& cfg) {
  const int L = need_int(cfg, "L");
  const double w = need_num(cfg, "w");
  const double delta = need_num(cfg, "delta");
  const double K = num_or(cfg, "K", 0.0);
  const std::vector<double> grid = parse_sweep(cfg);
  const auto reports = flux_sweep(L, w, delta, K, grid);
  RunOutcome out;
  out.table.columns = {"alpha", "E0", "E1", "gap", "degeneracy", "parity0"};
  double mn = reports.front().gap;
  double mn_at = grid.front();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& r = reports[i];
    out.table.rows.push_back({fmt(grid[i]), fmt(r.E0), fmt(r.E0 + r.gap), fmt(r.gap),
                              std::to_string(r.degeneracy), fmt_sign(r.parities.at(0))});
    if (r.gap < mn) {
      mn = r.gap;
      mn_at = grid[i];
    }
  }
  out.summary.push_back("min_gap=" + fmt(mn) + " at alpha=" + fmt(mn_at));
  out.summary.push_back("parity0_first=" + fmt_sign(reports.front().parities.at(0)) +
                        " parity0_last=" + fmt_sign(reports.back().parities.at(0)));
  return out;
}

RunOutcome run_kst_verify(const json& cfg) {
  const std::vector<int> ls = int_list(need(cfg, "L"), "L");
  const double w = need_num(cfg, "w");
  const double delta = need_num(cfg, "delta");
  const double K = need_num(cfg, "K");
  RunOutcome out;
  out.table.columns = {"L",   "mu_e", "E0",            "degeneracy",
                       "gap", "residual_plus", "residual_minus", "ff_residual"};
  double worst = 0.0;
  for (int L : ls) {
    const KstReport rep = kst_build_and_verify(L, w, delta, K);
    out.table.rows.push_back({std::to_string(L), fmt(rep.mu_e), fmt(rep.E0),
                              std::to_string(rep.degeneracy), fmt(rep.gap),
                              fmt(rep.residual_plus), fmt(rep.residual_minus),
                              fmt(rep.ff_residual)});
    worst = std::max({worst, rep.residual_plus, rep.residual_minus, rep.ff_residual});
  }
  out.summary.push_back("max_residual=" + fmt(worst));
  return out;
}

RunOutcome run_kst_path(const json& cfg) {
  const int L = need_int(cfg, "L");
  const double K = need_num(cfg, "K");
  const int tp = int_or(cfg, "t_points", 9);
  const KstPathReport rep = kst_path_check(L, K, tp);
  RunOutcome out;
  out.table.columns = {"t", "gap"};
  for (int i = 0; i < static_cast<int>(rep.gap_grid.size()); ++i) {
    const double t = 2.0 * K * i / (tp - 1);
    out.table.rows.push_back({fmt(t), fmt(rep.gap_grid[i])});
  }
  std::string par;
  for (int p : rep.stage_parities) par += (par.empty() ? "" : ",") + fmt_sign(p);
  out.table.notes.push_back("identity_residual=" + fmt(rep.identity_residual));
  out.table.notes.push_back("q_annihilation=" + fmt(rep.q_annihilation));
  out.table.notes.push_back("monotone_min_eig=" + fmt(rep.monotone_min_eig));
  out.table.notes.push_back("stage_parities=" + par);
  out.table.notes.push_back(std::string("spectra_match=") + (rep.spectra_match_t2k ? "1" : "0"));
  out.summary.push_back("gap_t0=" + fmt(rep.gap_grid.front()) +
                        " gap_t2K=" + fmt(rep.gap_grid.back()));
  out.summary.push_back("stage_parities=" + par);
  return out;
}

RunOutcome run_band(const json& cfg) {
  const std::string model = cfg.value("model", std::string("kitaev"));
  const int kp = int_or(cfg, "k_points", 2048);
  if (kp < 2) throw ConfigError("field 'k_points' must be at least 2");
  BandStructure bs;
  if (model == "kitaev") {
    bs = band_structure(need_num(cfg, "w"), need_num(cfg, "mu"), need_num(cfg, "delta"), kp);
  } else if (model == "xy") {
    bs = band_structure_xy(num_or(cfg, "w", 1.0), need_num(cfg, "mu"), need_num(cfg, "rho"), kp);
  } else {
    throw ConfigError("unknown band model '" + model + "'");
  }
  RunOutcome out;
  out.table.columns = {"k", "E"};
  for (std::size_t i = 0; i < bs.k_grid.size(); ++i)
    out.table.rows.push_back({fmt(bs.k_grid[i]), fmt(bs.band(static_cast<int>(i)))});
  out.summary.push_back("support=[" + fmt(bs.band.minCoeff()) + "," + fmt(bs.band.maxCoeff()) +
                        "]");
  out.summary.push_back("min_gap=" + fmt(bs.min_gap));
  return out;
}

RunOutcome run_theta_index(const json& cfg, bool strict) {
  const std::string model = cfg.value("model", std::string("kitaev"));
  double w = 0.0, mu = 0.0, delta = 0.0;
  if (model == "kitaev") {
    w = need_num(cfg, "w");
    mu = need_num(cfg, "mu");
    delta = need_num(cfg, "delta");
  } else if (model == "xy") {
    // spin couplings (1 +- rho) and field mu land on Kitaev(w, rho w, 4 mu w)
    w = num_or(cfg, "w", 1.0);
    delta = need_num(cfg, "rho") * w;
    mu = 4.0 * need_num(cfg, "mu") * w;
  } else {
    throw ConfigError("unknown theta model '" + model + "'");
  }
  const std::vector<int> lts = int_list(need(cfg, "L_trunc"), "L_trunc");
  const double tol = num_or(cfg, "tol", 1e-3);
  ChainSpec s = ChainSpec::uniform(3, ChainSpec::Boundary::open, w, mu,
                                   delta >= 0.0 ? delta : 0.0);
  if (delta < 0.0) s.delta_mag = Vec::Constant(2, delta);
  RunOutcome out;
  out.table.columns = {"L_trunc",  "sign",         "sign_next",     "kernel_count",
                       "hs_norm", "hs_norm_next", "non_stabilized"};
  bool flagged = false;
  int last_sign = 0;
  for (int lt : lts) {
    const Z2Report rep = theta_minus_index(s, lt, tol);
    const int kc = rep.kernel_counts.empty() ? 0 : rep.kernel_counts.front();
    out.table.rows.push_back({std::to_string(lt), fmt_sign(rep.sign), fmt_sign(rep.sign_next),
                              std::to_string(kc), fmt(rep.hs_norm), fmt(rep.hs_norm_next),
                              rep.non_stabilized ? "1" : "0"});
    flagged = flagged || rep.non_stabilized;
    last_sign = rep.sign;
  }
  out.summary.push_back("theta=" + fmt_sign(last_sign) +
                        (flagged ? " non_stabilized" : ""));
  if (flagged && strict) {
    out.summary.push_back("strict mode: non-stabilized truncation treated as failure");
    out.exit_override = 2;
  }
  return out;
}

RunOutcome run_martingale(const json& cfg) {
  const int L = need_int(cfg, "L");
  const bool closed = cfg.value("closed", false);
  const int nb = closed ? L : 2 * L;
  const Vec w = vec_field(need(cfg, "w"), nb, "w");
  const MartingaleReport rep = martingale_identities(L, w, closed);
  RunOutcome out;
  out.table.columns = {"commutator_max", "sandwich_max", "lower_bound_min", "gap"};
  out.table.rows.push_back(
      {fmt(rep.commutator_max), fmt(rep.sandwich_max), fmt(rep.lower_bound_min), fmt(rep.gap)});
  out.summary.push_back("gap=" + fmt(rep.gap));
  return out;
}

RunOutcome run_jw_roundtrip(const json& cfg) {
  const ChainSpec s = parse_chain(need(cfg, "chain"));
  const auto terms = build_terms(s);
  const SpinHamiltonian h = normalized(jw_forward(s.L, terms));
  const SpinHamiltonian back = normalized(jw_forward(s.L, jw_inverse(h)));
  double drift = 0.0;
  if (h.terms.size() != back.terms.size()) {
    drift = std::numeric_limits<double>::infinity();
  } else {
    for (std::size_t i = 0; i < h.terms.size(); ++i) {
      if (h.terms[i].letters != back.terms[i].letters) {
        drift = std::numeric_limits<double>::infinity();
        break;
      }
      drift = std::max(drift, std::abs(h.terms[i].coeff - back.terms[i].coeff));
    }
  }
  RunOutcome out;
  out.table.columns = {"coeff_re", "coeff_im", "letters"};
  for (const auto& t : h.terms) {
    std::string letters;
    for (const auto& [site, l] : t.letters)
      letters += (letters.empty() ? "" : " ") + std::string(1, l) + std::to_string(site);
    out.table.rows.push_back({fmt(t.coeff.real()), fmt(t.coeff.imag()), letters});
  }
  out.summary.push_back("terms=" + std::to_string(h.terms.size()) +
                        " roundtrip_drift=" + fmt(drift));
  return out;
}

std::string default_name(const std::string& kind, const std::string& format) {
  return kind + (format == "json" ? ".json" : ".csv");
}

void write_output(const Table& t, const std::string& kind, std::uint64_t seed,
                  const std::string& out_dir, const json& cfg) {
  std::string format = "csv";
  std::string name;
  if (cfg.contains("output")) {
    const json& o = cfg.at("output");
    format = o.value("format", std::string("csv"));
    if (format != "csv" && format != "json")
      throw ConfigError("output format '" + format + "' is not supported");
    name = o.value("path", std::string());
  }
  if (name.empty()) name = default_name(kind, format);
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path path = std::filesystem::path(out_dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file " + path.string());
  if (format == "csv") {
    f << "# schema=1 kind=" << kind << " seed=" << seed << "\n";
    for (const auto& n : t.notes) f << "# " << n << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
      f << t.columns[i] << (i + 1 < t.columns.size() ? "," : "");
    f << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        f << row[i] << (i + 1 < row.size() ? "," : "");
      f << "\n";
    }
  } else {
    json doc;
    doc["schema"] = 1;
    doc["kind"] = kind;
    doc["seed"] = seed;
    doc["columns"] = t.columns;
    doc["rows"] = t.rows;
    if (!t.notes.empty()) doc["notes"] = t.notes;
    f << doc.dump(2) << "\n";
  }
  std::cout << "wrote " << path.string() << "\n";
}

int run_config(const std::string& config_path, const std::string& out_dir, int threads,
               bool strict, std::uint64_t seed) {
  par::set_threads(threads);
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "config error: cannot read " << config_path << "\n";
    return 1;
  }
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
  try {
    if (int_or(cfg, "schema", 0) != 1)
      throw ConfigError("field 'schema' must be 1");
    const std::string kind = need(cfg, "kind").get<std::string>();
    RunOutcome out;
    if (kind == "index")
      out = run_index(cfg);
    else if (kind == "relative_index")
      out = run_relative_index(cfg);
    else if (kind == "sf2_flux")
      out = run_sf2_flux(cfg);
    else if (kind == "ed_ground")
      out = run_ed_ground(cfg);
    else if (kind == "flux_sweep")
      out = run_flux_sweep(cfg);
    else if (kind == "kst_verify")
      out = run_kst_verify(cfg);
    else if (kind == "kst_path")
      out = run_kst_path(cfg);
    else if (kind == "band")
      out = run_band(cfg);
    else if (kind == "theta_index")
      out = run_theta_index(cfg, strict);
    else if (kind == "martingale")
      out = run_martingale(cfg);
    else if (kind == "jw_roundtrip")
      out = run_jw_roundtrip(cfg);
    else
      throw ConfigError("unknown kind '" + kind + "'");
    write_output(out.table, kind, seed, out_dir, cfg);
    for (const auto& line : out.summary) std::cout << line << "\n";
    return out.exit_override;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const QuarticNotQuadratic& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const WraparoundTerm& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NonLocalizable& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const ParameterOutOfDomain& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}

int run_repro(int threads, std::uint64_t seed) {
  par::set_threads(threads);
  const auto results = selftest::run_all(seed);
  int failed = 0;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name;
    if (!r.detail.empty()) std::cout << ": " << r.detail;
    std::cout << "\n";
    if (!r.pass) ++failed;
  }
  std::cout << (results.size() - failed) << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Z2 phase diagnostics for fermionic chains"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;
  bool strict = false;
  std::uint64_t seed = 12345;

  CLI::App* run = app.add_subcommand("run", "execute one experiment config");
  run->add_option("--config", config_path, "JSON experiment config")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--threads", threads, "worker cap, 0 = default");
  run->add_flag("--strict", strict, "treat non-stabilized truncations as failures");
  run->add_option("--seed", seed, "seed recorded in outputs");

  CLI::App* repro = app.add_subcommand("repro", "run the bundled reproduction suite");
  repro->add_option("--threads", threads, "worker cap, 0 = default");
  repro->add_option("--seed", seed, "seed for randomized checks");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return run_config(config_path, out_dir, threads, strict, seed);
  return run_repro(threads, seed);
}
