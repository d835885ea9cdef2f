// Command-line front end: size | constants | finite-prob | expand | verify.
// Identical configs and flags produce byte-identical reports.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latgibbs/config_io.hpp"
#include "latgibbs/cumulants.hpp"
#include "latgibbs/exactgibbs.hpp"
#include "latgibbs/expansion.hpp"
#include "latgibbs/graphkit.hpp"
#include "latgibbs/model.hpp"
#include "latgibbs/numeric.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitResource = 3;
constexpr int kExitRefused = 4;

struct CommonOpts {
  std::string model_path;
  std::string event_path;
  std::string out_path;
  std::string format = "json";
  std::vector<std::string> overrides;
  std::optional<int> nu_override;
  std::optional<int> r_override;
  std::optional<double> lambda_override;
};

void write_output(const CommonOpts& opts, const std::string& text) {
  if (opts.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(opts.out_path, std::ios::binary);
  if (!out) throw latgibbs::invalid_input("cannot write " + opts.out_path);
  out << text;
}

latgibbs::InteractionModel load_model(const CommonOpts& opts) {
  auto j = latgibbs::load_json_file(opts.model_path);
  for (const auto& kv : opts.overrides) latgibbs::apply_override(j, kv);
  if (opts.nu_override) j["nu"] = *opts.nu_override;
  if (opts.r_override) j["r"] = *opts.r_override;
  if (opts.lambda_override) j["lambda"] = *opts.lambda_override;
  return latgibbs::parse_model(j);
}

latgibbs::CylinderEvent load_event(const CommonOpts& opts) {
  return latgibbs::parse_event(latgibbs::load_json_file(opts.event_path));
}

void require_json_format(const CommonOpts& opts) {
  if (opts.format != "json")
    throw latgibbs::invalid_input("this subcommand emits json only");
}

// First lattice neighbor of the base (canonical order) that is outside it;
// used by `verify` to widen the event base for the consistency check.
latgibbs::Region widened_base(const latgibbs::Region& base) {
  std::vector<latgibbs::Point> neighbors;
  for (const auto& p : base.pts())
    for (std::size_t d = 0; d < p.size(); ++d)
      for (int step : {-1, +1}) {
        latgibbs::Point q = p;
        q[d] += step;
        if (!base.contains(q)) neighbors.push_back(q);
      }
  std::sort(neighbors.begin(), neighbors.end());
  std::vector<latgibbs::Point> pts = base.pts();
  pts.push_back(neighbors.front());
  return latgibbs::Region(std::move(pts));
}

int run_size(const CommonOpts& opts, const std::string& points_str, int nu) {
  require_json_format(opts);
  const auto j = nlohmann::json::parse("[" + points_str + "]");
  latgibbs::Region b = latgibbs::detail::parse_region(j);
  if (b.dim() != nu)
    throw latgibbs::invalid_input("size: points do not match --nu");
  const int s = latgibbs::size_of(b);
  latgibbs::UnitGraph g;
  latgibbs::Track tr;
  if (b.size() >= 2) {
    g = latgibbs::associated_graph(b);
    tr = latgibbs::associated_track(b);
  } else {
    g.vertices = b.pts();
    tr.pts = b.pts();
  }
  write_output(opts, latgibbs::size_report_json(b, s, g, tr));
  return kExitOk;
}

int run_constants(const CommonOpts& opts, int nu, int r, int max_track_n) {
  require_json_format(opts);
  const long long L = latgibbs::l_max(nu, r);
  const long long den = latgibbs::lambda0_denominator(nu, r);
  const auto checks = latgibbs::verify_counting_lemmas(nu, r, max_track_n);
  write_output(opts, latgibbs::constants_json(nu, r, L, den, checks));
  for (const auto& c : checks)
    if (!c.pass) return kExitRefused;
  return kExitOk;
}

int run_finite_prob(const CommonOpts& opts, int n_volume) {
  require_json_format(opts);
  const auto model = load_model(opts);
  const auto event = load_event(opts);
  const double p = latgibbs::gibbs_probability(model, n_volume, event);
  write_output(opts, latgibbs::finite_prob_json(n_volume, p));
  return kExitOk;
}

int run_expand(const CommonOpts& opts, int n_max, std::optional<int> oracle_n) {
  const auto model = load_model(opts);
  const auto event = load_event(opts);
  latgibbs::ExpansionOptions eopts;
  eopts.oracle_n = oracle_n;
  const auto rep = latgibbs::thermodynamic_probability(model, event, n_max, eopts);
  if (opts.format == "json")
    write_output(opts, latgibbs::expansion_report_json(rep));
  else if (opts.format == "csv")
    write_output(opts, latgibbs::expansion_report_csv(rep));
  else
    throw latgibbs::invalid_input("expand: format must be json or csv");
  return rep.lambda_ok ? kExitOk : kExitRefused;
}

int run_verify(const CommonOpts& opts, int n_max, int n_volume) {
  require_json_format(opts);
  const auto model = load_model(opts);
  const auto event = load_event(opts);
  const auto checks = latgibbs::verify_bounds(model, event, 0, n_max, n_volume);
  const bool lambda_ok =
      model.lambda() <= latgibbs::lambda0(model.nu(), model.r());
  latgibbs::ConsistencyRecord rec;
  bool have_rec = false;
  if (lambda_ok && n_max >= 3) {
    rec = latgibbs::consistency_check(model, event, widened_base(event.base), n_max);
    have_rec = true;
  }
  write_output(opts,
               latgibbs::verify_json(n_volume, lambda_ok, checks,
                                     have_rec ? &rec : nullptr));
  return lambda_ok ? kExitOk : kExitRefused;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latgibbs: exact finite-volume Gibbs probabilities and certified "
               "cluster expansions for lattice interaction models"};
  app.require_subcommand(1);

  CommonOpts opts;
  int threads = 1;

  std::string points_str;
  int nu = 1, r = 1, max_track_n = 6;
  int n_volume = 0, n_max = 4;
  std::optional<int> oracle_n;

  auto add_io = [&](CLI::App* cmd, bool with_model) {
    cmd->add_option("--threads", threads, "worker thread cap (default 1)");
    cmd->add_option("--out", opts.out_path, "output file (default stdout)");
    cmd->add_option("--format", opts.format, "json|csv");
    if (with_model) {
      cmd->add_option("--model", opts.model_path, "model config file")->required();
      cmd->add_option("--event", opts.event_path, "event config file")->required();
      cmd->add_option("--set", opts.overrides, "override model keys, key=value");
      cmd->add_option("--nu", opts.nu_override, "override model dimension");
      cmd->add_option("--r", opts.r_override, "override interaction radius");
      cmd->add_option("--lambda", opts.lambda_override, "override strength");
    }
  };

  auto* size_cmd = app.add_subcommand("size", "Steiner size, associated graph and track");
  size_cmd->add_option("--points", points_str, "points, e.g. \"[0],[3]\"")->required();
  size_cmd->add_option("--nu", nu, "lattice dimension")->required();
  add_io(size_cmd, false);

  auto* const_cmd = app.add_subcommand("constants", "L, lambda0 and counting-lemma checks");
  const_cmd->add_option("--nu", nu, "lattice dimension")->required();
  const_cmd->add_option("--r", r, "interaction radius")->required();
  const_cmd->add_option("--max-track-n", max_track_n, "largest track length to count");
  add_io(const_cmd, false);

  auto* prob_cmd = app.add_subcommand("finite-prob", "exact P_N(A) by enumeration");
  prob_cmd->add_option("--N", n_volume, "cube size")->required();
  add_io(prob_cmd, true);

  auto* expand_cmd = app.add_subcommand("expand", "cluster-series partial sum with certified tail");
  expand_cmd->add_option("--n-max", n_max, "highest series order")->required();
  expand_cmd->add_option("--N", oracle_n, "also compare against the exact P_N oracle");
  add_io(expand_cmd, true);

  auto* verify_cmd = app.add_subcommand("verify", "bound checks and consistency records");
  verify_cmd->add_option("--n-max", n_max, "highest order to check")->required();
  verify_cmd->add_option("--N", n_volume, "container cube size")->required();
  add_io(verify_cmd, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }

  latgibbs::set_thread_count(threads);
  try {
    if (app.got_subcommand(size_cmd)) return run_size(opts, points_str, nu);
    if (app.got_subcommand(const_cmd)) return run_constants(opts, nu, r, max_track_n);
    if (app.got_subcommand(prob_cmd)) return run_finite_prob(opts, n_volume);
    if (app.got_subcommand(expand_cmd)) return run_expand(opts, n_max, oracle_n);
    if (app.got_subcommand(verify_cmd)) return run_verify(opts, n_max, n_volume);
  } catch (const latgibbs::invalid_input& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const latgibbs::resource_limit& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kExitResource;
  } catch (const latgibbs::certificate_refusal& e) {
    std::cerr << "certificate refused: " << e.what() << "\n";
    return kExitRefused;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
