// agreelab: simulate, decode, and empirically validate agreement tests for
// ensembles of local functions on k-subsets, plus hypergraph pruning with
// checkable branching-factor and unique-hit guarantees.
//
// Subcommands: gen, corrupt, agree, decode, prune, verify, sweep.
// Reports are JSON on stdout unless --out is given; sweeps write CSV.
// Exit codes: 0 success, 1 usage/parameter error, 2 property failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "agreelab/agreement.hpp"
#include "agreelab/decode.hpp"
#include "agreelab/ensemble.hpp"
#include "agreelab/errors.hpp"
#include "agreelab/pruning.hpp"

using json = nlohmann::ordered_json;
using namespace agl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPropertyFailure = 2;

bool g_quiet = false;

void emit(const json& report, const std::string& out_path) {
  if (out_path.empty()) {
    if (!g_quiet) std::cout << report.dump(2) << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw parse_error("cannot write output file: " + out_path);
    out << report.dump(2) << "\n";
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

VertexSet parse_set_arg(const std::string& arg) {
  std::vector<unsigned> vs;
  std::istringstream in(arg);
  std::string tok;
  while (std::getline(in, tok, ','))
    if (!tok.empty()) vs.push_back(static_cast<unsigned>(std::stoul(tok)));
  return VertexSet(std::move(vs));
}

std::vector<VertexSet> parse_planted_arg(const std::string& arg) {
  std::vector<VertexSet> out;
  std::istringstream in(arg);
  std::string tok;
  while (std::getline(in, tok, ';'))
    if (!tok.empty()) out.push_back(parse_set_arg(tok));
  return out;
}

json mc_json(const McEstimate& e) {
  json j;
  j["estimate"] = e.estimate;
  j["ci_halfwidth"] = e.ci_halfwidth;
  j["samples"] = e.samples;
  j["exact"] = e.exact;
  return j;
}

json global_json(const GlobalFunction& g) {
  json values;
  for_each_small_subset(Mask128::full(g.n()), g.d(), g.include_empty(),
                        [&](const Mask128& a) { values[VertexSet(a).to_key()] = g.eval(a); });
  json j;
  j["n"] = g.n();
  j["d"] = g.d();
  j["alphabet_size"] = g.alphabet_size();
  j["values"] = std::move(values);
  return j;
}

// Config file merged under explicit flags: a flag the user typed wins, an
// absent flag falls back to the config value when present.
class ConfigLayer {
 public:
  void load(const std::string& path) {
    if (path.empty()) return;
    try {
      cfg_ = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw parse_error("config " + path + ": " + e.what());
    }
  }
  template <class T>
  void apply(const CLI::Option* opt, const char* key, T& value) const {
    if (opt->count() > 0) return;
    if (cfg_.contains(key)) value = cfg_.at(key).get<T>();
  }

 private:
  nlohmann::json cfg_;
};

CorruptionSpec make_corruption(const std::string& mode, double rate, const std::string& planted,
                               unsigned d) {
  CorruptionSpec spec;
  spec.mode = CorruptionSpec::mode_from_name(mode);
  spec.rate = rate;
  spec.planted = parse_planted_arg(planted);
  spec.validate(d);
  return spec;
}

// ---------------------------------------------------------------- gen ------

int cmd_gen(unsigned n, unsigned k, unsigned d, unsigned sigma, bool include_empty,
            const std::string& mode, double rate, const std::string& planted, std::uint64_t seed,
            const std::string& out) {
  RandomStream master(seed);
  RandomStream gen_rng = master.derive("gen");
  GlobalFunction f = GlobalFunction::random(n, d, sigma, include_empty, gen_rng);
  LocalEnsemble e = LocalEnsemble::from_global(std::move(f), k);
  if (mode != "none") {
    RandomStream corrupt_rng = master.derive("corrupt");
    e = e.corrupted(make_corruption(mode, rate, planted, d), corrupt_rng);
  }
  if (out.empty()) {
    std::cout << e.to_json();
  } else {
    e.save(out);
    if (!g_quiet) std::cerr << "wrote " << out << "\n";
  }
  return kExitOk;
}

// ------------------------------------------------------------- corrupt -----

int cmd_corrupt(const std::string& in, const std::string& mode, double rate,
                const std::string& planted, std::uint64_t seed, const std::string& out) {
  const LocalEnsemble e = LocalEnsemble::load(in);
  RandomStream rng = RandomStream(seed).derive("corrupt");
  const LocalEnsemble noisy =
      e.corrupted(make_corruption(mode, rate, planted, e.params().d), rng);
  if (out.empty())
    std::cout << noisy.to_json();
  else
    noisy.save(out);
  return kExitOk;
}

// --------------------------------------------------------------- agree -----

int cmd_agree(const std::string& in, const std::string& dist, unsigned t, double p, double q,
              std::uint64_t samples, bool exact, bool breakdown, std::uint64_t seed,
              const std::string& out) {
  const LocalEnsemble e = LocalEnsemble::load(in);
  RandomStream rng = RandomStream(seed).derive("agree");
  AgreementReport report;
  if (exact) {
    if (dist != "nu") throw parameter_error("--exact supports the nu distribution only");
    report = agreement_exact(e, t);
  } else if (dist == "nu") {
    report = agreement_estimate(e, NuDist{t}, samples, rng, breakdown);
  } else if (dist == "mu") {
    report = agreement_estimate(e, MuPQDist{p, q}, samples, rng, breakdown);
  } else {
    throw parameter_error("unknown distribution: " + dist);
  }
  json j;
  j["epsilon_hat"] = report.epsilon_hat;
  j["ci_halfwidth"] = report.ci_halfwidth;
  j["samples"] = report.samples;
  j["mode"] = report.exact ? "exact" : "mc";
  if (!report.per_size_breakdown.empty()) {
    json hist;
    for (const auto& [sz, mass] : report.per_size_breakdown) hist[std::to_string(sz)] = mass;
    j["per_size_breakdown"] = std::move(hist);
  }
  emit(j, out);
  return kExitOk;
}

// -------------------------------------------------------------- decode -----

int cmd_decode(const std::string& in, bool exact, std::uint64_t samples_per_a,
               const std::string& restrict_t, std::uint64_t pool, std::uint64_t seed,
               std::optional<std::uint64_t> tie_seed, const VoteDist& votes,
               const std::string& out) {
  const LocalEnsemble e = LocalEnsemble::load(in);
  RandomStream master(seed);
  json j;
  if (restrict_t.empty()) {
    PluralityOptions opt;
    opt.exact = exact;
    opt.samples_per_a = samples_per_a;
    opt.tie_seed = tie_seed;
    opt.votes = votes;
    RandomStream rng = master.derive("decode");
    const GlobalFunction g = plurality_decode(e, opt, rng);
    j["decoder"] = exact ? "plurality_exact" : "plurality_mc";
    j["global"] = global_json(g);
    j["diagnostics"] = nullptr;
  } else {
    RestrictedOptions opt;
    opt.exact = exact;
    opt.pool_size = pool;
    RandomStream rng = master.derive("decode");
    const auto [g, diag] = restricted_decode(e, parse_set_arg(restrict_t), opt, rng);
    j["decoder"] = "restricted";
    j["global"] = g ? global_json(*g) : json(nullptr);
    json dj;
    dj["aborted"] = diag.aborted;
    dj["pool_size"] = diag.pool_size;
    dj["exact"] = diag.exact;
    dj["delta"] = diag.delta;
    json gamma, rho;
    for (const auto& [a, v] : diag.gamma) gamma[a.to_key()] = v;
    for (const auto& [a, v] : diag.rho) rho[a.to_key()] = v;
    dj["gamma"] = std::move(gamma);
    dj["rho"] = std::move(rho);
    json fb = json::array();
    for (const auto& a : diag.fallback) fb.push_back(a.to_key());
    dj["fallback"] = std::move(fb);
    j["diagnostics"] = std::move(dj);
  }
  emit(j, out);
  return kExitOk;
}

// --------------------------------------------------------- prune/verify ----

struct UniqueHitSummary {
  double min_unique_hit = 1.0;
  json per_edge = json::array();
};

UniqueHitSummary unique_hit_report(const Hypergraph& h, const SubsetDist& dist,
                                   std::uint64_t samples, RandomStream& rng) {
  UniqueHitSummary s;
  for (const auto& e : h.edges()) {
    McEstimate uh;
    try {
      uh = verify_unique_hit(h, e, dist, true, 0, rng);
    } catch (const exact_infeasible_error&) {
      uh = verify_unique_hit(h, e, dist, false, samples, rng);
    }
    json rec;
    rec["edge"] = e.to_key();
    rec["unique_hit"] = uh.estimate;
    rec["ci_halfwidth"] = uh.ci_halfwidth;
    rec["exact"] = uh.exact;
    s.per_edge.push_back(std::move(rec));
    s.min_unique_hit = std::min(s.min_unique_hit, uh.estimate);
  }
  if (h.empty()) s.min_unique_hit = 1.0;
  return s;
}

int cmd_prune(const std::string& in, const std::string& mode, unsigned k, double p, double c,
              double epsilon, std::uint64_t samples, std::uint64_t seed, const std::string& out,
              const std::string& report_path) {
  const Hypergraph h = load_hypergraph(in);
  RandomStream master(seed);
  RandomStream prune_rng = master.derive("prune");

  Hypergraph pruned(h.ground_size(), {});
  SubsetDist dist;
  double p_eff = p;
  double rho = 0.0;
  std::vector<std::string> warnings;
  if (mode == "uniform") {
    std::optional<double> c_opt;
    if (c > 0) c_opt = c;
    PruneAudit audit;
    pruned = prune_uniform(h, h.ground_size(), k, epsilon, prune_rng, c_opt, &audit, &warnings);
    p_eff = static_cast<double>(k) / h.ground_size();
    rho = audit.budget_rho > 0 ? audit.budget_rho : 1.0;
    dist = SubsetDist::uniform(h.ground_size(), k);
  } else if (mode == "biased") {
    PruneConfig cfg;
    cfg.c = c;
    cfg.p = p;
    cfg.epsilon = epsilon;
    pruned = prune_biased(h, cfg, prune_rng);
    rho = cfg.rho();
    dist = SubsetDist::biased(h.ground_size(), p);
  } else {
    throw parameter_error("prune mode must be uniform or biased");
  }

  const BranchingReport br = check_branching(pruned, std::max(1.0, rho));
  RandomStream hit_rng = master.derive("hit");
  const SubsetDist hit_dist = SubsetDist::biased(h.ground_size(), p_eff);
  const McEstimate hit_before = hit_eval(h, hit_dist, samples, hit_rng);
  const McEstimate hit_after = hit_eval(pruned, hit_dist, samples, hit_rng);
  RandomStream verify_rng = master.derive("verify");
  const UniqueHitSummary uh = unique_hit_report(pruned, dist, samples, verify_rng);

  if (!out.empty()) save_hypergraph(pruned, out);
  json j;
  j["branching_ok"] = br.ok;
  j["rho"] = rho;
  j["edges_before"] = h.edge_count();
  j["edges_after"] = pruned.edge_count();
  j["hit_before"] = mc_json(hit_before);
  j["hit_after"] = mc_json(hit_after);
  j["hit_ratio"] = hit_before.estimate > 0 ? hit_after.estimate / hit_before.estimate : 0.0;
  j["min_unique_hit"] = uh.min_unique_hit;
  j["per_edge"] = uh.per_edge;
  j["warnings"] = warnings;
  emit(j, report_path);
  return br.ok ? kExitOk : kExitPropertyFailure;
}

int cmd_verify(const std::string& in, double rho, const std::string& mode, unsigned k, double p,
               double epsilon, std::uint64_t samples, std::uint64_t seed,
               const std::string& report_path) {
  const Hypergraph h = load_hypergraph(in);
  const SubsetDist dist = mode == "uniform" ? SubsetDist::uniform(h.ground_size(), k)
                                            : SubsetDist::biased(h.ground_size(), p);
  const BranchingReport br = check_branching(h, rho);
  RandomStream rng = RandomStream(seed).derive("verify");
  const UniqueHitSummary uh = unique_hit_report(h, dist, samples, rng);

  // unique-hit target with a 3-sigma allowance wherever MC ran
  bool unique_ok = true;
  for (const auto& rec : uh.per_edge) {
    const double est = rec.at("unique_hit").get<double>();
    const double ci = rec.at("ci_halfwidth").get<double>();
    const double slack = rec.at("exact").get<bool>() ? 0.0 : 3.0 * ci / 1.96;
    if (est < 1.0 - epsilon - slack) unique_ok = false;
  }

  json j;
  j["branching_ok"] = br.ok;
  j["rho"] = rho;
  if (br.witness) {
    json w;
    w["A"] = br.witness->a.to_key();
    w["r"] = br.witness->r;
    w["count"] = br.witness->count;
    j["witness"] = std::move(w);
  }
  j["min_unique_hit"] = uh.min_unique_hit;
  j["unique_hit_target"] = 1.0 - epsilon;
  j["unique_hit_ok"] = unique_ok;
  j["per_edge"] = uh.per_edge;
  emit(j, report_path);
  return (br.ok && unique_ok) ? kExitOk : kExitPropertyFailure;
}

// --------------------------------------------------------------- sweep -----

struct SweepRow {
  double rate;
  unsigned n, k, t, d;
  double epsilon_hat, epsilon_ci, disagreement, disagreement_ci;
  std::uint64_t seed;
};

std::string csv_row(const SweepRow& r) {
  std::ostringstream os;
  os.precision(10);
  os << r.rate << ',' << r.n << ',' << r.k << ',' << r.t << ',' << r.d << ',' << r.epsilon_hat
     << ',' << r.epsilon_ci << ',' << r.disagreement << ',' << r.disagreement_ci << ',' << r.seed;
  return os.str();
}

int cmd_sweep(const std::string& config_path, std::uint64_t seed_flag, bool seed_set,
              const std::string& out_flag, unsigned threads) {
  if (config_path.empty()) throw parameter_error("sweep requires --config");
  nlohmann::json cfg;
  try {
    cfg = nlohmann::json::parse(read_file(config_path));
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("sweep config: ") + e.what());
  }

  const unsigned base_n = cfg.at("n").get<unsigned>();
  const unsigned base_k = cfg.at("k").get<unsigned>();
  const unsigned base_t = cfg.at("t").get<unsigned>();
  const unsigned d = cfg.at("d").get<unsigned>();
  const unsigned sigma = cfg.value("alphabet_size", 2u);
  std::string dist_kind = "nu";
  double dist_p = 0.1, dist_q = 0.5;
  if (cfg.contains("distribution")) {
    const auto& dj = cfg.at("distribution");
    dist_kind = dj.value("kind", "nu");
    dist_p = dj.value("p", 0.1);
    dist_q = dj.value("q", 0.5);
    if (dist_kind != "nu" && dist_kind != "mu")
      throw parameter_error("sweep distribution kind must be nu or mu");
  }
  const std::string mode = cfg.at("corruption").value("mode", "replace_set");
  const std::vector<double> rates = cfg.at("corruption").at("rates").get<std::vector<double>>();
  const std::string planted = cfg.at("corruption").value("planted", "");
  const unsigned trials = cfg.value("trials", 1u);
  const std::uint64_t agree_samples = cfg.value("agree_samples", 20000u);
  const std::uint64_t dis_samples = cfg.value("disagree_samples", 10000u);
  const std::uint64_t votes_per_a = cfg.value("votes_per_a", 64u);
  const std::uint64_t seed = seed_set ? seed_flag : cfg.value("seed", 1u);
  const std::string out = !out_flag.empty() ? out_flag : cfg.value("out", "sweep.csv");

  std::vector<std::array<unsigned, 3>> geoms;
  if (cfg.contains("n_values")) {
    for (const auto& nv : cfg.at("n_values")) {
      const auto n2 = nv.get<unsigned>();
      const auto scale = static_cast<double>(n2) / base_n;
      geoms.push_back({n2, static_cast<unsigned>(std::lround(base_k * scale)),
                       static_cast<unsigned>(std::lround(base_t * scale))});
    }
  } else {
    geoms.push_back({base_n, base_k, base_t});
  }

  std::ofstream csv(out);
  if (!csv) throw parse_error("cannot write CSV: " + out);
  csv << "rate,n,k,t,d,epsilon_hat,epsilon_ci,decode_disagreement,disagreement_ci,seed\n";
  csv.flush();

  struct Task {
    double rate;
    std::array<unsigned, 3> geom;
    std::uint64_t row_seed;
  };
  std::vector<Task> tasks;
  RandomStream master(seed);
  std::uint64_t row_index = 0;
  for (const auto& geom : geoms)
    for (double rate : rates)
      for (unsigned trial = 0; trial < trials; ++trial) {
        (void)trial;
        tasks.push_back({rate, geom, master.derive("sweep").derive(row_index).key()});
        ++row_index;
      }

  auto run_task = [&](const Task& task) {
    RandomStream rng(task.row_seed);
    const auto [n2, k2, t2] = task.geom;
    RandomStream gen_rng = rng.derive("gen");
    LocalEnsemble e = LocalEnsemble::from_global(
        GlobalFunction::random(n2, d, sigma, false, gen_rng), k2);
    if (task.rate > 0.0) {
      RandomStream crng = rng.derive("corrupt");
      e = e.corrupted(make_corruption(mode, task.rate, planted, d), crng);
    }
    RandomStream arng = rng.derive("agree");
    const PairDist pair_dist = dist_kind == "nu" ? PairDist{NuDist{t2}}
                                                 : PairDist{MuPQDist{dist_p, dist_q}};
    const auto agree = agreement_estimate(e, pair_dist, agree_samples, arng);
    PluralityOptions opt;
    opt.samples_per_a = votes_per_a;
    const VoteDist regime =
        dist_kind == "nu" ? VoteDist::uniform() : VoteDist::biased(dist_p);
    opt.votes = regime;
    RandomStream drng = rng.derive("decode");
    const GlobalFunction g = plurality_decode(e, opt, drng);
    RandomStream srng = rng.derive("disagree");
    const auto dis = disagreement_rate(e, g, false, dis_samples, srng, regime);
    return SweepRow{task.rate,          n2,           k2, t2, d, agree.epsilon_hat,
                    agree.ci_halfwidth, dis.estimate, dis.ci_halfwidth, task.row_seed};
  };

  // Workers compute out of order; rows flush strictly in task order so a
  // rerun with the same seed produces an identical file and an interrupted
  // sweep loses at most the row in flight.
  const unsigned workers = std::max(1u, threads);
  std::vector<std::future<SweepRow>> futures(tasks.size());
  std::size_t launched = 0, drained = 0;
  while (drained < tasks.size()) {
    while (launched < tasks.size() && launched - drained < workers) {
      futures[launched] = std::async(std::launch::async, run_task, tasks[launched]);
      ++launched;
    }
    csv << csv_row(futures[drained].get()) << "\n";
    csv.flush();
    ++drained;
  }
  if (!g_quiet) std::cerr << "wrote " << tasks.size() << " rows to " << out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agreement testing and hypergraph pruning toolkit"};
  app.require_subcommand(1);
  app.add_flag("--quiet", g_quiet, "suppress stdout reports");

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; explicit flags win");

  // ------- gen
  auto* gen = app.add_subcommand("gen", "generate an ensemble file");
  unsigned g_n = 20, g_k = 5, g_d = 1, g_sigma = 2;
  bool g_empty = false;
  std::string g_mode = "none", g_planted, g_out;
  double g_rate = 0.0;
  std::uint64_t g_seed = 1;
  auto* og_n = gen->add_option("--n", g_n);
  auto* og_k = gen->add_option("--k", g_k);
  auto* og_d = gen->add_option("--d", g_d);
  auto* og_sigma = gen->add_option("--alphabet", g_sigma);
  gen->add_flag("--include-empty", g_empty);
  auto* og_mode =
      gen->add_option("--mode", g_mode, "none|replace_set|flip_entry|planted_disagreement");
  auto* og_rate = gen->add_option("--rate", g_rate);
  gen->add_option("--planted", g_planted, "semicolon-separated sets, e.g. '1,2;3,4'");
  auto* og_seed = gen->add_option("--seed", g_seed);
  gen->add_option("--out", g_out);

  // ------- corrupt
  auto* corrupt = app.add_subcommand("corrupt", "apply corruption to an ensemble file");
  std::string c_in, c_mode = "replace_set", c_planted, c_out;
  double c_rate = 0.05;
  std::uint64_t c_seed = 1;
  corrupt->add_option("--in", c_in)->required();
  corrupt->add_option("--mode", c_mode);
  corrupt->add_option("--rate", c_rate);
  corrupt->add_option("--planted", c_planted);
  corrupt->add_option("--seed", c_seed);
  corrupt->add_option("--out", c_out);

  // ------- agree
  auto* agree = app.add_subcommand("agree", "estimate pair agreement");
  std::string a_in, a_dist = "nu", a_out;
  unsigned a_t = 0;
  double a_p = 0.1, a_q = 0.5;
  std::uint64_t a_samples = 10000, a_seed = 1;
  bool a_exact = false, a_breakdown = false;
  agree->add_option("--in", a_in)->required();
  agree->add_option("--dist", a_dist, "nu|mu");
  agree->add_option("--t", a_t);
  agree->add_option("--p", a_p);
  agree->add_option("--q", a_q);
  auto* oa_samples = agree->add_option("--samples", a_samples);
  agree->add_flag("--exact", a_exact);
  agree->add_flag("--breakdown", a_breakdown);
  auto* oa_seed = agree->add_option("--seed", a_seed);
  agree->add_option("--out", a_out);

  // ------- decode
  auto* decode = app.add_subcommand("decode", "plurality or restricted decoding");
  std::string d_in, d_restrict, d_out;
  bool d_exact = false;
  std::uint64_t d_samples = 256, d_pool = 5000, d_seed = 1;
  std::uint64_t d_tie_seed = 0;
  std::string d_votes = "uniform";
  double d_p = 0.1;
  decode->add_option("--in", d_in)->required();
  decode->add_flag("--exact", d_exact);
  decode->add_option("--samples-per-a", d_samples);
  decode->add_option("--vote-dist", d_votes, "uniform|biased voter conditioning");
  decode->add_option("--p", d_p, "bias for --vote-dist biased");
  decode->add_option("--restrict-t", d_restrict, "run the restricted decoder seeded at T");
  decode->add_option("--pool", d_pool);
  auto* od_tie = decode->add_option("--tie-seed", d_tie_seed);
  decode->add_option("--seed", d_seed);
  decode->add_option("--out", d_out);

  // ------- prune
  auto* prune = app.add_subcommand("prune", "prune a hypergraph to bounded branching factor");
  std::string p_in, p_mode = "uniform", p_out, p_report;
  unsigned p_k = 4;
  double p_p = 0.1, p_c = 0.0, p_eps = 0.25;
  std::uint64_t p_samples = 10000, p_seed = 1;
  prune->add_option("--in", p_in)->required();
  prune->add_option("--mode", p_mode, "uniform|biased");
  prune->add_option("--k", p_k);
  prune->add_option("--p", p_p);
  prune->add_option("--c", p_c, "branching budget numerator (uniform mode derives a default)");
  prune->add_option("--epsilon", p_eps);
  prune->add_option("--samples", p_samples);
  prune->add_option("--seed", p_seed);
  prune->add_option("--out", p_out, "write the pruned hypergraph here");
  prune->add_option("--report", p_report, "write the JSON report here instead of stdout");

  // ------- verify
  auto* verify = app.add_subcommand("verify", "check branching factor and unique-hit");
  std::string v_in, v_mode = "uniform", v_report;
  double v_rho = 1.0, v_p = 0.1, v_eps = 0.25;
  unsigned v_k = 4;
  std::uint64_t v_samples = 10000, v_seed = 1;
  verify->add_option("--in", v_in)->required();
  verify->add_option("--rho", v_rho)->required();
  verify->add_option("--mode", v_mode);
  verify->add_option("--k", v_k);
  verify->add_option("--p", v_p);
  verify->add_option("--epsilon", v_eps);
  verify->add_option("--samples", v_samples);
  verify->add_option("--seed", v_seed);
  verify->add_option("--report", v_report);

  // ------- sweep
  auto* sweep = app.add_subcommand("sweep", "rate/n sweep to CSV");
  std::uint64_t s_seed = 1;
  std::string s_out;
  unsigned s_threads = 2;
  auto* os_seed = sweep->add_option("--seed", s_seed);
  sweep->add_option("--out", s_out);
  sweep->add_option("--threads", s_threads);

  CLI11_PARSE(app, argc, argv);

  try {
    ConfigLayer layer;
    layer.load(config_path);
    if (gen->parsed()) {
      layer.apply(og_n, "n", g_n);
      layer.apply(og_k, "k", g_k);
      layer.apply(og_d, "d", g_d);
      layer.apply(og_sigma, "alphabet_size", g_sigma);
      layer.apply(og_mode, "mode", g_mode);
      layer.apply(og_rate, "rate", g_rate);
      layer.apply(og_seed, "seed", g_seed);
      return cmd_gen(g_n, g_k, g_d, g_sigma, g_empty, g_mode, g_rate, g_planted, g_seed, g_out);
    }
    if (corrupt->parsed()) return cmd_corrupt(c_in, c_mode, c_rate, c_planted, c_seed, c_out);
    if (agree->parsed()) {
      layer.apply(oa_samples, "samples", a_samples);
      layer.apply(oa_seed, "seed", a_seed);
      return cmd_agree(a_in, a_dist, a_t, a_p, a_q, a_samples, a_exact, a_breakdown, a_seed,
                       a_out);
    }
    if (decode->parsed()) {
      std::optional<std::uint64_t> tie;
      if (od_tie->count() > 0) tie = d_tie_seed;
      const VoteDist votes =
          d_votes == "biased" ? VoteDist::biased(d_p) : VoteDist::uniform();
      if (d_votes != "uniform" && d_votes != "biased")
        throw parameter_error("--vote-dist must be uniform or biased");
      return cmd_decode(d_in, d_exact, d_samples, d_restrict, d_pool, d_seed, tie, votes, d_out);
    }
    if (prune->parsed())
      return cmd_prune(p_in, p_mode, p_k, p_p, p_c, p_eps, p_samples, p_seed, p_out, p_report);
    if (verify->parsed())
      return cmd_verify(v_in, v_rho, v_mode, v_k, v_p, v_eps, v_samples, v_seed, v_report);
    if (sweep->parsed()) return cmd_sweep(config_path, s_seed, os_seed->count() > 0, s_out,
                                          s_threads);
  } catch (const parameter_error& e) {
    std::cerr << "parameter error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const parse_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const exact_infeasible_error& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitUsage;
  } catch (const structural_error& e) {
    std::cerr << "structural failure: " << e.what() << "\n";
    return kExitPropertyFailure;
  }
  return kExitUsage;
}
