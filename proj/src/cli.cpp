#include "shrinkprior/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "shrinkprior/detail/fmt.hpp"
#include "shrinkprior/minimaxity.hpp"
#include "shrinkprior/prior_json.hpp"
#include "shrinkprior/risk_sim.hpp"
#include "shrinkprior/sampler.hpp"

namespace shrinkprior::cli {

namespace {

using detail::fmt17;
using nlohmann::json;

struct ResolvedPrior {
  PriorSpec spec;
  std::string config_path;  // empty unless the prior came from a file
};

ResolvedPrior resolve_prior(const std::string& text, std::optional<int> p) {
  if (text == "named:prior1" || text == "named:prior2") {
    if (!p) throw std::invalid_argument("named priors need --p");
    const auto which = text == "named:prior1" ? NamedPrior::Prior1 : NamedPrior::Prior2;
    return {named_prior(which, *p), ""};
  }
  if (text.rfind("named:", 0) == 0) {
    throw std::invalid_argument("unknown named prior '" + text + "'");
  }
  if (!text.empty() && text.front() == '{') {
    return {prior_from_json(json::parse(text), p), ""};
  }
  std::ifstream in(text);
  if (!in) throw std::invalid_argument("cannot open prior config '" + text + "'");
  json j;
  in >> j;
  return {prior_from_json(j, p), text};
}

std::vector<double> parse_numbers(const std::string& text) {
  std::string cleaned = text;
  for (char& c : cleaned) {
    if (c == ',' || c == '\n' || c == '\t' || c == '\r') c = ' ';
  }
  std::istringstream is(cleaned);
  std::vector<double> out;
  double v;
  while (is >> v) out.push_back(v);
  is.clear();
  std::string leftover;
  if (is >> leftover) throw std::invalid_argument("could not parse number '" + leftover + "'");
  if (out.empty()) throw std::invalid_argument("empty vector");
  return out;
}

std::vector<double> parse_y(const std::string& text) {
  if (std::filesystem::exists(text)) {
    std::ifstream in(text);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_numbers(buf.str());
  }
  return parse_numbers(text);
}

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

// The manifest's "args" field is a normalized, re-runnable argument vector
// with every prior already resolved to inline JSON, so a rerun does not
// depend on config files that may have changed since.
void write_manifest(const std::string& subcommand, const std::vector<std::string>& args,
                    const std::vector<PriorSpec>& priors,
                    const std::vector<std::string>& config_paths,
                    std::optional<std::uint64_t> seed, const std::string& out_path) {
  json m = {{"tool", "shrinkprior"},
            {"version", kVersion},
            {"subcommand", subcommand},
            {"args", args},
            {"config_paths", config_paths},
            {"outputs", json::array({out_path})},
            {"timestamp", iso_timestamp()}};
  m["priors"] = json::array();
  for (const auto& spec : priors) m["priors"].push_back(to_json(spec));
  if (seed) m["seed"] = *seed;
  std::ofstream mf(out_path + ".manifest.json");
  if (!mf) throw std::invalid_argument("cannot write manifest next to '" + out_path + "'");
  mf << m.dump(2) << '\n';
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file '" + path + "'");
  return f;
}

void print_report(std::ostream& out, const MinimaxReport& rep, bool as_json) {
  if (as_json) {
    out << to_json(rep).dump(2) << '\n';
    return;
  }
  out << "verdict:     " << to_string(rep.verdict) << '\n';
  out << "rule:        " << to_string(rep.rule) << '\n';
  out << "margin:      " << fmt17(rep.margin) << '\n';
  if (rep.b_threshold) out << "b_threshold: " << fmt17(*rep.b_threshold) << '\n';
  if (!rep.details.empty()) out << "details:     " << rep.details << '\n';
}

std::vector<EstimatorSpec> resolve_estimators(const std::vector<std::string>& tokens,
                                              int p, std::vector<PriorSpec>& priors,
                                              std::vector<std::string>& config_paths) {
  std::vector<EstimatorSpec> out;
  int custom = 0;
  auto add_token = [&](const std::string& tok) {
    if (tok == "js" || tok == "james-stein" || tok == "james_stein") {
      out.push_back(EstimatorSpec::james_stein());
    } else if (tok == "identity" || tok == "id") {
      out.push_back(EstimatorSpec::identity());
    } else {
      ResolvedPrior rp = resolve_prior(tok, p);
      std::string name;
      if (tok == "named:prior1") {
        name = "prior1";
      } else if (tok == "named:prior2") {
        name = "prior2";
      } else {
        name = "bayes" + std::to_string(++custom);
      }
      priors.push_back(rp.spec);
      if (!rp.config_path.empty()) config_paths.push_back(rp.config_path);
      out.push_back(EstimatorSpec::bayes(rp.spec, name));
    }
  };
  for (const auto& raw : tokens) {
    // comma-splitting only for plain token lists; inline JSON keeps its commas
    if (raw.find('{') == std::string::npos && raw.find(',') != std::string::npos) {
      std::istringstream is(raw);
      std::string tok;
      while (std::getline(is, tok, ',')) {
        if (!tok.empty()) add_token(tok);
      }
    } else {
      add_token(raw);
    }
  }
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_rerun(const std::string& manifest_path, std::ostream& out, std::ostream& err) {
  std::ifstream in(manifest_path);
  if (!in) throw std::invalid_argument("cannot open manifest '" + manifest_path + "'");
  json m;
  in >> m;
  std::vector<std::string> args = m.at("args").get<std::vector<std::string>>();
  if (args.empty() || args.front() == "rerun") {
    throw std::invalid_argument("manifest does not hold a re-runnable command");
  }
  return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized Bayes shrinkage estimation under U-shaped priors on the "
               "shrinkage coefficient"};
  app.set_version_flag("--version", std::string("shrinkprior ") + kVersion);
  app.require_subcommand(1);

  std::string prior_text, priors_text, y_text, grid_text, out_path, manifest_path;
  std::vector<std::string> estimator_tokens;
  int p = 0;
  bool as_json = false, with_betas = false, sample_beta = false;
  std::uint64_t seed = 0, iters = 100000, burn = 1000;
  int reps = 20000;

  auto* mm = app.add_subcommand("minimax-check", "Certify minimaxity for a prior");
  mm->add_option("--prior", prior_text, "named:prior1|named:prior2, inline JSON, or file")
      ->required();
  mm->add_option("--p", p, "dimension");
  mm->add_flag("--json", as_json, "emit the report as JSON");

  auto* es = app.add_subcommand("estimate", "Generalized Bayes estimate for an observation");
  es->add_option("--prior", prior_text)->required();
  es->add_option("--p", p);
  es->add_option("--y", y_text, "observation: comma-separated values or a file")->required();

  auto* sc = app.add_subcommand("shrink-curve", "Quadrature sweep of the shrinkage factor");
  sc->add_option("--prior", prior_text)->required();
  sc->add_option("--p", p);
  sc->add_option("--grid", grid_text, "|y| grid, lo:hi:step")->required();
  sc->add_option("--out", out_path)->required();

  auto* rs = app.add_subcommand("risk-sweep", "Monte Carlo quadratic-risk comparison");
  rs->add_option("--priors", estimator_tokens,
                 "estimators: named:prior1, named:prior2, js, identity, JSON, or file "
                 "(repeatable / comma-separated)")
      ->required();
  rs->add_option("--p", p)->required();
  rs->add_option("--grid", grid_text, "|beta| grid, lo:hi:step")->required();
  rs->add_option("--reps", reps, "replications per grid point");
  rs->add_option("--seed", seed);
  rs->add_option("--out", out_path)->required();

  auto* sp = app.add_subcommand("sample-posterior", "Metropolis-within-Gibbs trace");
  sp->add_option("--prior", prior_text)->required();
  sp->add_option("--p", p);
  sp->add_option("--y", y_text)->required();
  sp->add_option("--iters", iters);
  sp->add_option("--burn", burn);
  sp->add_option("--seed", seed);
  sp->add_option("--out", out_path)->required();
  sp->add_flag("--betas", with_betas, "include beta columns in the CSV");
  sp->add_flag("--sample-beta", sample_beta,
               "sample beta instead of recording its conditional mean");

  auto* pd = app.add_subcommand("prior-density", "Pointwise log prior density of kappa");
  pd->add_option("--prior", prior_text)->required();
  pd->add_option("--p", p);
  pd->add_option("--grid", grid_text, "kappa grid, lo:hi:step")->required();
  pd->add_option("--out", out_path)->required();

  auto* rr = app.add_subcommand("rerun", "Re-execute the command recorded in a manifest");
  rr->add_option("--manifest", manifest_path)->required();

  std::vector<std::string> argv_strings;
  argv_strings.push_back("shrinkprior");
  argv_strings.insert(argv_strings.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  argv.reserve(argv_strings.size());
  for (const auto& s : argv_strings) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << app.version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  const auto maybe_p = [&]() -> std::optional<int> {
    return p > 0 ? std::optional<int>(p) : std::nullopt;
  };

  if (mm->parsed()) {
    const ResolvedPrior rp = resolve_prior(prior_text, maybe_p());
    print_report(out, certify(rp.spec), as_json);
    return 0;
  }

  if (es->parsed()) {
    const std::vector<double> y = parse_y(y_text);
    const auto dim = maybe_p() ? maybe_p() : std::optional<int>(static_cast<int>(y.size()));
    const ResolvedPrior rp = resolve_prior(prior_text, dim);
    const auto est = bayes_estimate(rp.spec, y);
    for (size_t i = 0; i < est.size(); ++i) out << (i ? "," : "") << fmt17(est[i]);
    out << '\n';
    return 0;
  }

  if (sc->parsed()) {
    const ResolvedPrior rp = resolve_prior(prior_text, maybe_p());
    const auto grid = parse_grid(grid_text);
    const ShrinkCurve curve = shrink_sweep(rp.spec, grid);
    auto f = open_output(out_path);
    write_shrink_csv(f, curve);
    write_manifest("shrink-curve",
                   {"shrink-curve", "--prior", to_json(rp.spec).dump(), "--grid", grid_text,
                    "--out", out_path},
                   {rp.spec}, rp.config_path.empty() ? std::vector<std::string>{} :
                                                        std::vector<std::string>{rp.config_path},
                   std::nullopt, out_path);
    return 0;
  }

  if (rs->parsed()) {
    std::vector<PriorSpec> priors;
    std::vector<std::string> config_paths;
    const auto estimators = resolve_estimators(estimator_tokens, p, priors, config_paths);
    const auto grid = parse_grid(grid_text);
    const RiskCurve curve = risk_sweep(estimators, p, grid, reps, seed);
    auto f = open_output(out_path);
    write_risk_csv(f, curve);
    std::vector<std::string> norm{"risk-sweep", "--p", std::to_string(p)};
    for (const auto& e : estimators) {
      norm.push_back("--priors");
      if (e.kind == EstimatorSpec::Kind::JamesStein) {
        norm.push_back("js");
      } else if (e.kind == EstimatorSpec::Kind::Identity) {
        norm.push_back("identity");
      } else if (e.name == "prior1" || e.name == "prior2") {
        norm.push_back("named:" + e.name);  // keeps the column name on rerun
      } else {
        norm.push_back(to_json(*e.prior).dump());
      }
    }
    norm.insert(norm.end(), {"--grid", grid_text, "--reps", std::to_string(reps), "--seed",
                             std::to_string(seed), "--out", out_path});
    write_manifest("risk-sweep", norm, priors, config_paths, seed, out_path);
    return 0;
  }

  if (sp->parsed()) {
    const std::vector<double> y = parse_y(y_text);
    const auto dim = maybe_p() ? maybe_p() : std::optional<int>(static_cast<int>(y.size()));
    const ResolvedPrior rp = resolve_prior(prior_text, dim);
    SamplerConfig cfg;
    cfg.iterations = iters;
    cfg.burn_in = burn;
    cfg.seed = seed;
    cfg.rao_blackwell = !sample_beta;
    const ChainTrace trace = run_chain(rp.spec, y, cfg);
    auto f = open_output(out_path);
    write_trace_csv(f, trace, with_betas);
    std::vector<std::string> norm{"sample-posterior", "--prior", to_json(rp.spec).dump(),
                                  "--y", y_text, "--iters", std::to_string(iters),
                                  "--burn", std::to_string(burn), "--seed",
                                  std::to_string(seed), "--out", out_path};
    if (with_betas) norm.push_back("--betas");
    if (sample_beta) norm.push_back("--sample-beta");
    write_manifest("sample-posterior", norm, {rp.spec},
                   rp.config_path.empty() ? std::vector<std::string>{}
                                          : std::vector<std::string>{rp.config_path},
                   seed, out_path);
    return 0;
  }

  if (pd->parsed()) {
    const ResolvedPrior rp = resolve_prior(prior_text, maybe_p());
    const auto grid = parse_grid(grid_text);
    const auto rows = prior_density_sweep(rp.spec, grid);
    auto f = open_output(out_path);
    write_prior_density_csv(f, rows);
    write_manifest("prior-density",
                   {"prior-density", "--prior", to_json(rp.spec).dump(), "--grid", grid_text,
                    "--out", out_path},
                   {rp.spec}, rp.config_path.empty() ? std::vector<std::string>{}
                                                     : std::vector<std::string>{rp.config_path},
                   std::nullopt, out_path);
    return 0;
  }

  if (rr->parsed()) {
    return run_rerun(manifest_path, out, err);
  }

  err << "error: no subcommand\n";
  return 2;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ':')) parts.push_back(tok);
  if (parts.size() != 3) {
    throw std::invalid_argument("grid must have the form lo:hi:step, got '" + text + "'");
  }
  double lo, hi, step;
  try {
    size_t used = 0;
    lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("");
    hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("");
    step = std::stod(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("");
  } catch (const std::exception&) {
    throw std::invalid_argument("grid must have the form lo:hi:step, got '" + text + "'");
  }
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  if (hi < lo) throw std::invalid_argument("grid needs hi >= lo");
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  if (n > 100000000L) throw std::invalid_argument("grid too large");
  std::vector<double> out;
  out.reserve(static_cast<size_t>(n) + 1);
  for (long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
  return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(args, out, err);
  } catch (const RelaxedSpecError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const IntegrabilityError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  args.reserve(static_cast<size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace shrinkprior::cli
