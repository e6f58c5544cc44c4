#include "fbi_cli/commands.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>

#include <spdlog/spdlog.h>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "fbi/classification.hpp"
#include "fbi/errors.hpp"
#include "fbi/ferro_propagation.hpp"
#include "fbi/fock_oracle.hpp"
#include "fbi/sylvester_kernel.hpp"
#include "fbi/theta_oracle.hpp"
#include "fbi_cli/report.hpp"

namespace fbi::cli {

namespace {

class Checks {
 public:
  void add(const std::string& name, double value, double bound, bool pass) {
    Json c;
    c["name"] = name;
    c["value"] = value;
    c["bound"] = bound;
    c["pass"] = pass;
    list_.push_back(std::move(c));
    if (!pass) {
      ok_ = false;
      spdlog::error("check failed: {} = {:.6g} (bound {:.6g})", name, value, bound);
    }
  }
  // value <= bound
  void at_most(const std::string& name, double value, double bound) { add(name, value, bound, value <= bound); }
  void at_least(const std::string& name, double value, double bound) { add(name, value, bound, value >= bound); }
  bool ok() const { return ok_; }
  const Json& json() const { return list_; }

 private:
  Json list_ = Json::array();
  bool ok_ = true;
};

Json run_header(const std::string& command, Pipeline& p) {
  const RunConfig& c = p.config();
  Json h;
  h["command"] = command;
  h["convention"] = c.convention;
  h["grid"] = {c.n_kx, c.n_ky};
  h["pw_shells"] = c.pw_shells;
  h["ff_shells"] = c.form_factor_shells();
  h["flavor"] = flavor_name(c.flavor);
  h["interaction"] = {{"family", c.interaction}, {"param", c.interaction_param}};
  h["seed"] = c.seed;
  return h;
}

Json momentum_json(GridMomentum m) { return {m.a, m.b}; }

std::vector<MatrixXc> fm_states_flavor(const FormFactorTable& t) {
  std::vector<MatrixXc> out;
  for (std::size_t i = 0; i < fm_generators(t.flavor()).size(); ++i) out.push_back(build_fm_state(t, i).P);
  return out;
}

// Occupied orbitals of a projector.
MatrixXc orbitals_of(const MatrixXc& P, int rank) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (P + P.adjoint()));
  return es.eigenvectors().rightCols(rank);
}

// Index of the first grid point that is neither 0 nor 2-torsion, or 0 if none.
std::size_t generic_point(const KGrid& grid) {
  for (std::size_t k = 1; k < grid.size(); ++k)
    if (!grid.is_two_torsion(k)) return k;
  return 0;
}

// ---- subcommands ----

bool cmd_magic_alpha(Pipeline& p, Json& r, Checks& checks) {
  const MagicAlphaResult& m = p.magic_alpha();
  r["auto"] = p.config().auto_alpha;
  r["alpha"] = m.alpha;
  r["residual"] = m.residual;
  r["evaluations"] = m.evaluations;
  r["plane_waves"] = p.basis().n_g();
  Json sample = Json::array();
  for (const Vec2& k : default_magic_sample(p.lattice()))
    sample.push_back({{"k", {k.x(), k.y()}}, {"sigma_min", flatness_residual(k, m.alpha, p.basis())}});
  r["sample"] = sample;
  checks.at_most("flatness_residual", m.residual, p.config().flat_tol);
  return checks.ok();
}

bool cmd_bands(Pipeline& p, Json& r, Checks& checks) {
  const double a = p.alpha();
  const KGrid grid = build_kgrid(p.lattice(), p.config().n_kx, p.config().n_ky);
  constexpr int n_sv = 4;
  CsvWriter csv({"k", "kx", "ky", "s0", "s1", "s2", "s3"});
  double worst = 0.0, gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec2 kv = grid.point(k);
    const MatrixXc D = assemble_D(kv, a, p.basis()).matrix;
    Eigen::BDCSVD<MatrixXc> svd(D);
    const Eigen::VectorXd s = svd.singularValues();
    std::vector<double> row = {double(k), kv.x(), kv.y()};
    // Singular values come in descending order.
    for (int i = 0; i < n_sv; ++i) row.push_back(s(s.size() - 1 - i));
    csv.row(row);
    worst = std::max(worst, s(s.size() - 1));
    gap = std::min(gap, s(s.size() - 2));
  }
  csv.save(p.config().out_dir, "bands");
  r["alpha"] = a;
  r["max_flat_residual"] = worst;
  r["min_next_singular"] = gap;
  checks.at_most("max_flat_residual", worst, p.config().flat_tol);
  checks.at_least("min_next_singular", gap, 10.0 * p.config().flat_tol);
  return checks.ok();
}

bool cmd_formfactors(Pipeline& p, Json& r, Checks& checks) {
  const FormFactorTable& T = p.spinless_table();
  const IdentityResiduals id = identity_residuals(T);
  const double sum_rule = sum_rule_check(T);
  r["cutoff"] = T.cutoff();
  r["entries"] = T.nq();
  r["tail_norm"] = T.tail_norm;
  r["cutoff_warning"] = T.cutoff_warning;
  r["normalization_residual"] = id.normalization;
  r["adjoint_residual"] = id.adjoint;
  r["sum_rule_residual"] = sum_rule;
  r["off_diagonal"] = off_diagonal_norm(T);
  r["time_reversal_residual"] = time_reversal_magnitude_residual(T);
  checks.at_most("normalization", id.normalization, 1e-10);
  checks.at_most("adjoint", id.adjoint, 1e-10);
  checks.at_most("sum_rule", sum_rule, 1e-8 * double(T.nk()));
  if (p.config().flavor != Flavor::spinless) {
    const FormFactorTable& F = p.table();
    const double bs = block_scalar_residual(F);
    r["block_scalar_residual"] = bs;
    checks.at_most("block_scalar", bs, 1e-8);
  }
  CsvWriter csv({"radius", "tail"});
  for (const TailShell& s : tail_profile(T, 0)) csv.row({s.radius, s.tail});
  csv.save(p.config().out_dir, "tail");
  return checks.ok();
}

bool cmd_hf_energy(Pipeline& p, Json& r, Checks& checks) {
  const FormFactorTable& T = p.table();
  const Interaction V = p.interaction();
  const DensityMatrix dm = p.state(T);
  require_projector(dm);
  const EnergyTerms e = energy_trace_form(dm, T, V);
  const double ec = energy_commutator_form(dm, T, V);
  r["state"] = p.config().state;
  r["half_filled"] = dm.half_filled();
  r["direct"] = e.direct;
  r["constant"] = e.constant;
  r["exchange"] = e.exchange;
  r["energy_trace_form"] = e.total;
  r["energy_commutator_form"] = ec;
  r["energy_per_k"] = e.per_k;
  checks.at_most("form_difference", std::abs(e.total - ec), 1e-10 * (1 + std::abs(e.total)));
  checks.at_least("commutator_form", ec, -1e-12);
  return checks.ok();
}

bool cmd_check_gs(Pipeline& p, Json& r, Checks& checks) {
  const FormFactorTable& T = p.table();
  const Interaction V = p.interaction();
  const DensityMatrix dm = p.state(T);
  require_projector(dm);
  const GsResiduals g = gs_condition_residuals(dm, T, V);
  r["state"] = p.config().state;
  r["trace_residual"] = g.trace_residual;
  r["trace_argmax"] = momentum_json(T.qprime(g.trace_argmax));
  r["commutator_residual"] = g.commutator_residual;
  r["commutator_argmax"] = momentum_json(T.qprime(g.commutator_argmax));
  CsvWriter csv({"qi", "a", "b", "qx", "qy", "V", "trace", "commutator"});
  for (std::size_t qi = 0; qi < T.nq(); ++qi) {
    const Vec2 q = T.qvec(qi);
    csv.row({double(qi), double(T.qprime(qi).a), double(T.qprime(qi).b), q.x(), q.y(), V(q), g.trace_per_q[qi],
             g.commutator_per_q[qi]});
  }
  csv.save(p.config().out_dir, "gs_residuals");
  checks.at_most("trace_residual", g.trace_residual, p.config().gs_tol);
  checks.at_most("commutator_residual", g.commutator_residual, p.config().gs_tol);
  return checks.ok();
}

bool cmd_sylvester(Pipeline& p, Json& r, Checks& checks) {
  const FormFactorTable& T = p.spinless_table();
  const KGrid& grid = T.grid();
  const KernelScan s = scan_pairs(T, p.config().kernel_tol);
  const std::size_t nk = s.nk;
  CsvWriter csv({"k", "kp", "dim", "gap", "ambiguous"});
  Json dims = Json::array();
  int mismatches = 0, ambiguous = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  Json two_torsion = Json::array();
  for (std::size_t k = 0; k < nk; ++k) {
    Json row = Json::array();
    const std::size_t mk = grid.negate(k);
    for (std::size_t kp = 0; kp < nk; ++kp) {
      const int d = s.dim(k, kp);
      row.push_back(d);
      csv.row({double(k), double(kp), double(d), s.gap(k, kp), double(s.ambiguous[k * nk + kp])});
      ambiguous += s.ambiguous[k * nk + kp];
      // k = -k points carry both the diagonal and the swapped solution.
      int expected = 0;
      if (kp == k && kp == mk) expected = 4;
      else if (kp == k || kp == mk) expected = 2;
      if (d != expected) ++mismatches;
      if (expected == 0) min_gap = std::min(min_gap, s.gap(k, kp));
    }
    if (k != 0 && k == mk) two_torsion.push_back(k);
    dims.push_back(row);
  }
  csv.save(p.config().out_dir, "kernel_dims");
  Json verdicts = Json::array();
  int inconclusive = 0;
  for (const AntipodalVerdict& v : s.antipodal) {
    Json j;
    j["k"] = v.k;
    j["verdict"] = AntipodalVerdict::name(v.kind);
    if (v.kind == AntipodalVerdict::Kind::forced_zero) {
      j["witness"] = momentum_json(v.witness);
      j["shifted"] = {v.shifted_k, v.shifted_kp};
    }
    if (v.kind == AntipodalVerdict::Kind::inconclusive) ++inconclusive;
    verdicts.push_back(std::move(j));
  }
  r["kernel_dims"] = dims;
  r["two_torsion_points"] = two_torsion;
  r["min_gap_off_pattern"] = min_gap;
  r["antipodal"] = verdicts;
  checks.at_most("pattern_mismatches", mismatches, 0);
  checks.at_most("ambiguous_pairs", ambiguous, 0);
  checks.at_least("min_gap_off_pattern", min_gap, 1e-6);
  checks.at_most("inconclusive_antipodal", inconclusive, 0);
  return checks.ok();
}

bool cmd_classify(Pipeline& p, Json& r, Checks& checks) {
  const RunConfig& cfg = p.config();
  std::vector<Flavor> flavors;
  if (cfg.flavor == Flavor::spinless) flavors = {Flavor::valley, Flavor::valley_spin};
  else flavors = {cfg.flavor};
  const Interaction V = p.interaction();
  Json out = Json::array();
  for (Flavor f : flavors) {
    const std::string tag = flavor_name(f);
    const FormFactorTable T = f == cfg.flavor ? p.table() : extend_flavor(p.spinless_table(), f);
    Json j;
    j["flavor"] = tag;
    const std::size_t k = generic_point(T.grid());
    const KernelReport kr = pair_kernel(T, k, k, cfg.kernel_tol);
    j["generic_k"] = k;
    j["kernel_dim"] = kr.dim;
    j["commutant_dim"] = commutant_dimension(f);
    checks.add(tag + ".kernel_dim", kr.dim, commutant_dimension(f), kr.dim == commutant_dimension(f));
    spdlog::info("orbit sweep for {}: {} samples per generator", tag, cfg.orbit_samples);
    const OrbitSweep sw = orbit_sweep(T, V, cfg.orbit_samples, cfg.seed);
    j["fm_trace_residual"] = sw.fm_trace_residual;
    j["fm_commutator_residual"] = sw.fm_commutator_residual;
    Json gens = Json::array();
    for (const GeneratorSweep& g : sw.generators) {
      Json gj;
      gj["generator"] = g.generator;
      gj["quantum_hall"] = g.quantum_hall;
      gj["max_trace_residual"] = g.max_trace_residual;
      gj["max_commutator_residual"] = g.max_commutator_residual;
      gj["energy_range"] = {g.min_energy, g.max_energy};
      gj["max_chern_residual"] = g.max_chern_residual;
      gj["max_distance_from_generator"] = g.max_distance_from_generator;
      gens.push_back(std::move(gj));
      const std::string name = tag + ".g" + std::to_string(g.generator);
      checks.at_most(name + ".trace_residual", g.max_trace_residual, 10.0 * sw.fm_trace_residual);
      checks.at_most(name + ".commutator_residual", g.max_commutator_residual, 10.0 * sw.fm_commutator_residual);
      if (g.quantum_hall) checks.at_most(name + ".orbit_spread", g.max_distance_from_generator, 1e-12);
    }
    j["generators"] = gens;
    out.push_back(std::move(j));
  }
  r["flavors"] = out;
  return checks.ok();
}

bool cmd_oracle(Pipeline& p, Json& r, Checks& checks) {
  const RunConfig& cfg = p.config();
  const BlochBundle b = build_bundle(build_kgrid(p.lattice(), cfg.oracle_nkx, cfg.oracle_nky), p.basis(), p.alpha(),
                                     cfg.flat_tol);
  const FormFactorTable T = compute_table(b, shells_to_radius(p.lattice(), cfg.oracle_ff_shells));
  const Interaction V = p.interaction();
  const auto t0 = std::chrono::steady_clock::now();
  const SparseXc H = build_h_fbi(T, V);
  const FockSpace space(T.nk(), T.dim());
  const int n = space.n_modes(), half = n / 2;

  std::mt19937_64 rng(cfg.seed);
  double worst = 0.0;
  for (int t = 0; t < cfg.random_states; ++t) {
    const MatrixXc Xi = haar_unitary(n, rng).leftCols(half);
    const VectorXc psi = slater_vector(space, Xi);
    DensityMatrix dm{T.flavor(), T.nk(), one_rdm(space, psi)};
    dm.P = (0.5 * (dm.P + dm.P.adjoint())).eval();
    const double e = energy_trace_form(dm, T, V).total;
    const double ref = psi.dot(H * psi).real();
    worst = std::max(worst, std::abs(e - ref) / (1.0 + std::abs(ref)));
  }
  std::vector<VectorXc> fm;
  Json fm_energy = Json::array();
  for (const MatrixXc& P : fm_states_flavor(T)) {
    fm.push_back(slater_vector(space, orbitals_of(P, half)));
    fm_energy.push_back(fm.back().dot(H * fm.back()).real());
  }
  const GroundSpaceReport g = ground_space(space, H, 1e-8, fm);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  double n_dev = 0.0;
  for (double v : g.number_values) n_dev = std::max(n_dev, std::abs(v - half));
  double angle = 0.0;
  for (double a : g.principal_angles) angle = std::max(angle, a);

  r["nk"] = T.nk();
  r["fock_dim"] = space.dim();
  r["q_entries"] = T.nq();
  r["slater_states"] = cfg.random_states;
  r["max_relative_difference"] = worst;
  r["lambda_min"] = g.eigenvalues(0);
  r["zero_dim"] = g.zero_dim;
  r["max_number_deviation"] = n_dev;
  r["fm_energies"] = fm_energy;
  r["hf_rank"] = g.hf_rank;
  r["max_principal_angle"] = angle;
  spdlog::info("oracle solved in {:.2f} s", seconds);
  checks.at_most("slater_energy", worst, 1e-8);
  checks.at_least("lambda_min", g.eigenvalues(0), -1e-10);
  checks.at_least("zero_dim", g.zero_dim, 1);
  checks.at_most("half_filling", n_dev, 1e-8);
  return checks.ok();
}

bool cmd_theta(Pipeline& p, Json& r, Checks& checks) {
  const MoireLattice& L = p.lattice();
  const double a = p.alpha();
  const ThetaOracle oracle(p.basis(), flat_band_states(Vec2::Zero(), a, p.basis(), p.config().flat_tol).bands[0]);
  const auto rs = r_sample(L, 16, true);
  const double c = 4 * std::numbers::pi / (3 * std::sqrt(3.0));
  Json samples = Json::array();
  double min_overlap = 1.0, worst_zero = 0.0, worst_loc = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Vec2 k = (i / 3.0 + 0.1) * L.g1 + (j / 3.0 + 0.05) * L.g2;
      const FlatBandState st = flat_band_states(k, a, p.basis(), p.config().flat_tol);
      const auto num = sample_state(st.bands[0], p.basis(), rs);
      const double ov = sampled_overlap(oracle.sample(k, rs), num);
      double peak = 0.0;
      for (const auto& v : num) peak = std::max(peak, v.norm());
      const Vec2 expect = c * Vec2(k.y(), -k.x());
      const Vec2 d = oracle.zero_location(k) - expect;
      const double s1 = d.dot(L.g1) / (2 * std::numbers::pi), s2 = d.dot(L.g2) / (2 * std::numbers::pi);
      const double loc = std::hypot(s1 - std::round(s1), s2 - std::round(s2));
      const double depth = evaluate_state(st.bands[0], p.basis(), expect).norm() / peak;
      min_overlap = std::min(min_overlap, ov);
      worst_zero = std::max(worst_zero, depth);
      worst_loc = std::max(worst_loc, loc);
      samples.push_back({{"k", {k.x(), k.y()}}, {"overlap", ov}, {"zero_depth", depth}, {"zero_offset", loc}});
    }
  r["samples"] = samples;
  checks.at_least("min_overlap", min_overlap, 1 - 1e-5);
  checks.at_most("zero_depth", worst_zero, 1e-6);
  checks.at_most("zero_location", worst_loc, 1e-6);
  return checks.ok();
}

bool cmd_loop(Pipeline& p, Json& r, Checks& checks) {
  const FormFactorTable& T = p.table();
  const KGrid& grid = T.grid();
  const std::vector<GridMomentum> steps = {{1, 0}, {1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {0, -1}};
  const std::size_t start = grid.index(std::min(1, grid.n_kx() - 1), std::min(1, grid.n_ky() - 1));
  const PropagationPath path = path_from_steps(T, start, steps, p.config().invertible_tol);
  r["start"] = start;
  r["path"] = path.momenta;
  r["condition_bound"] = path.condition_bound;
  double loop = 0.0, filling = 0.0;
  for (std::size_t i = 0; i < fm_generators(T.flavor()).size(); ++i) {
    const DensityMatrix fm = build_fm_state(T, i);
    loop = std::max(loop, (propagate_block(T, fm.block(start, start), {0, 0}, path) - fm.block(start, start)).norm());
    filling = std::max(filling, uniform_filling_check(fm));
  }
  if (T.flavor() != Flavor::spinless) {
    std::mt19937_64 rng(p.config().seed);
    for (const MatrixXc& g : generators(T.flavor()))
      filling = std::max(filling, uniform_filling_check(orbit_state(g, random_block_unitary(T.flavor(), rng), T)));
  }
  r["loop_residual"] = loop;
  r["uniform_filling_deviation"] = filling;
  checks.add("loop_closes", double(path.momenta.back()), double(start), path.momenta.back() == start);
  checks.at_most("loop_residual", loop, 1e-6);
  checks.at_most("uniform_filling", filling, 1e-6);
  return checks.ok();
}

using Handler = std::function<bool(Pipeline&, Json&, Checks&)>;

struct CommandInfo {
  const char* name;
  const char* help;
  Handler run;
};

const std::vector<CommandInfo>& registry() {
  static const std::vector<CommandInfo> r = {
      {"magic-alpha", "find the magic coupling", cmd_magic_alpha},
      {"bands", "lowest singular values of D_k on the grid (bands.csv)", cmd_bands},
      {"formfactors", "build and validate the form-factor table (tail.csv)", cmd_formfactors},
      {"hf-energy", "Hartree-Fock energy of the configured state", cmd_hf_energy},
      {"check-gs", "ground-state condition residuals (gs_residuals.csv)", cmd_check_gs},
      {"sylvester", "kernel dimensions for all (k, k') pairs (kernel_dims.csv)", cmd_sylvester},
      {"classify", "symmetry-orbit sweep of the ferromagnetic generators", cmd_classify},
      {"oracle", "exact diagonalization on the tiny oracle grid", cmd_oracle},
      {"theta", "compare flat bands with the theta-function construction", cmd_theta},
      {"loop", "closed-loop propagation of ferromagnetic blocks", cmd_loop},
  };
  return r;
}

int run_one(const CommandInfo& c, Pipeline& p, Json* summary) {
  const auto start = std::chrono::system_clock::now();
  spdlog::info("running {}", c.name);
  Json r = run_header(c.name, p);
  Checks checks;
  const bool ok = c.run(p, r, checks);
  r["checks"] = checks.json();
  r["passed"] = ok;
  const auto end = std::chrono::system_clock::now();
  write_json(p.config().out_dir, c.name, r);
  write_meta(p.config().out_dir, c.name, start, end,
             {{"cache_hits", p.cache_stats().hits}, {"cache_misses", p.cache_stats().misses}});
  if (summary) (*summary)[c.name] = ok;
  spdlog::info("{}: {}", c.name, ok ? "passed" : "FAILED");
  return ok ? exit_ok : exit_validation;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& c : registry()) n.push_back(c.name);
    n.push_back("all");
    return n;
  }();
  return names;
}

std::string command_help(const std::string& name) {
  if (name == "all") return "run every command and write summary.json";
  for (const auto& c : registry())
    if (name == c.name) return c.help;
  return "";
}

int run_command(const std::string& name, Pipeline& p) {
  if (name != "all") {
    for (const auto& c : registry())
      if (name == c.name) return run_one(c, p, nullptr);
    throw ConfigError("unknown command '" + name + "'");
  }
  const auto start = std::chrono::system_clock::now();
  Json summary = run_header("all", p);
  Json results;
  int code = exit_ok;
  for (const auto& c : registry())
    if (run_one(c, p, &results) != exit_ok) code = exit_validation;
  summary["results"] = results;
  summary["passed"] = code == exit_ok;
  write_json(p.config().out_dir, "summary", summary);
  write_meta(p.config().out_dir, "summary", start, std::chrono::system_clock::now());
  return code;
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace fbi::cli
