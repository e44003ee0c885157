// brbvs command-line front end.
//
//   brbvs simulate --scenario A --n 600 --p 20 --seed 1 --out sim.csv
//   brbvs fit --data sim.csv --copula C0 --margins PH,PO
//   brbvs brbvs --data sim.csv --kmax 5 --copula PL --margins PO,PO --m 314 --tau 0.5 --B 50 --metric FIM
//   brbvs select-link | forward | backward | evaluate | plot
//
// Without a subcommand the BRBVS flags are accepted directly.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "brbvs/brbvs.hpp"

namespace {

using namespace brbvs;
using report::Json;

struct Common {
  std::string data;
  ColumnSchema schema;
  std::string json_out;
  bool json_stdout = false;
  int knots = 8;
  double ridge = 1e-4;
  double gradient_tol = 1e-6;
  double converged_gradient = 1e-4;
  int max_iter = 200;
};

void add_common(CLI::App* c, Common& o, bool needs_data) {
  auto* d = c->add_option("--data", o.data, "input CSV");
  if (needs_data) d->required()->check(CLI::ExistingFile);
  c->add_option("--t11", o.schema.t11, "column of the margin 1 lower time")->capture_default_str();
  c->add_option("--t12", o.schema.t12, "column of the margin 1 upper time")->capture_default_str();
  c->add_option("--t21", o.schema.t21, "column of the margin 2 lower time")->capture_default_str();
  c->add_option("--t22", o.schema.t22, "column of the margin 2 upper time")->capture_default_str();
  c->add_option("--cens1", o.schema.cens1, "column of the margin 1 censoring code")->capture_default_str();
  c->add_option("--cens2", o.schema.cens2, "column of the margin 2 censoring code")->capture_default_str();
  c->add_option("--ignore", o.schema.ignore, "columns that are neither times nor covariates")
      ->delimiter(',');
  c->add_option("--json", o.json_out, "write the JSON artifact here");
  c->add_flag("--json-stdout", o.json_stdout, "print JSON instead of the text summary");
  c->add_option("--knots", o.knots, "interior knots of each baseline spline")
      ->capture_default_str()->check(CLI::Range(1, 40));
  c->add_option("--ridge", o.ridge, "ridge on the baseline log-increments")->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  c->add_option("--gradient-tol", o.gradient_tol, "optimizer stopping gradient")->capture_default_str();
  c->add_option("--converged-gradient", o.converged_gradient,
                "largest gradient accepted as converged")->capture_default_str();
  c->add_option("--max-iter", o.max_iter, "optimizer iteration cap")->capture_default_str();
}

OptimOptions optim_of(const Common& c) {
  OptimOptions o;
  o.gradient_tol = c.gradient_tol;
  o.converged_gradient = c.converged_gradient;
  o.max_iterations = c.max_iter;
  return o;
}

Json common_json(const Common& c) {
  return Json{{"data", c.data},
              {"columns",
               {{"t11", c.schema.t11}, {"t12", c.schema.t12}, {"t21", c.schema.t21},
                {"t22", c.schema.t22}, {"cens1", c.schema.cens1}, {"cens2", c.schema.cens2},
                {"ignore", c.schema.ignore}}},
              {"interior_knots", c.knots},
              {"ridge", c.ridge},
              {"gradient_tol", c.gradient_tol},
              {"converged_gradient", c.converged_gradient},
              {"max_iter", c.max_iter}};
}

void write_text(const std::string& path, const std::string& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << s;
}

void emit(const Common& c, const Json& j, const std::string& text) {
  const std::string s = j.dump(2) + "\n";
  if (!c.json_out.empty()) write_text(c.json_out, s);
  std::cout << (c.json_stdout ? s : text);
}

std::pair<margin::Link, margin::Link> parse_margins(const std::string& s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) {
    const auto l = margin::link_from_code(s);
    return {l, l};
  }
  return {margin::link_from_code(s.substr(0, comma)), margin::link_from_code(s.substr(comma + 1))};
}

std::string margins_code(margin::Link a, margin::Link b) {
  return std::string(margin::code(a)) + "," + std::string(margin::code(b));
}

// "all" means every covariate, "none" or empty means intercept only.
std::vector<std::string> covariate_list(const std::string& s, const Dataset& d) {
  if (s == "all") return d.names;
  std::vector<std::string> out;
  if (s.empty() || s == "none") return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    d.column(item);  // throws on unknown names
    out.push_back(item);
  }
  return out;
}

struct SelectArgs {
  std::size_t kmax = 5;
  std::string copula = "C0";
  std::string margins = "PH,PH";
  std::size_t m = 0;
  double tau = 0.5;
  std::size_t B = 50;
  std::string metric = "FIM";
  std::uint64_t seed = 1;
};

void add_select(CLI::App* c, SelectArgs& a) {
  c->add_option("--kmax", a.kmax, "largest candidate set size")->capture_default_str();
  c->add_option("--copula", a.copula, "copula family code")->capture_default_str();
  c->add_option("--margins", a.margins, "link pair, e.g. PO,PO")->capture_default_str();
  c->add_option("--m", a.m, "subsample size (0: n/2)")->capture_default_str();
  c->add_option("--tau", a.tau, "selector exponent")->capture_default_str();
  c->add_option("--B", a.B, "number of subsample replicates")->capture_default_str();
  c->add_option("--metric", a.metric, "FIM or Abs")->capture_default_str();
  c->add_option("--seed", a.seed, "master seed")->capture_default_str();
}

BrbvsConfig brbvs_config(const SelectArgs& a, const Common& c) {
  BrbvsConfig cfg;
  cfg.kmax = a.kmax;
  cfg.copula = copula::family_from_code(a.copula);
  std::tie(cfg.link1, cfg.link2) = parse_margins(a.margins);
  cfg.m = a.m;
  cfg.tau = a.tau;
  cfg.B = a.B;
  cfg.metric = metric_from_code(a.metric);
  cfg.seed = a.seed;
  cfg.interior_knots = c.knots;
  cfg.ridge = c.ridge;
  cfg.optim = optim_of(c);
  return cfg;
}

Json brbvs_config_json(const BrbvsConfig& cfg, const Common& c) {
  Json j = report::to_json(cfg);
  j["input"] = common_json(c);
  return j;
}

struct SimArgs {
  char scenario = 'A';
  std::size_t n = 600;
  std::size_t p = 20;
  std::uint64_t seed = 1;
  std::string margins = "PH,PO";
};

void add_sim(CLI::App* c, SimArgs& a) {
  c->add_option("--scenario", a.scenario, "A (constant dependence) or B (covariate-driven)")
      ->capture_default_str()->check(CLI::IsMember({'A', 'B'}));
  c->add_option("--n", a.n, "units")->capture_default_str();
  c->add_option("--p", a.p, "covariates")->capture_default_str();
  c->add_option("--sim-margins", a.margins, "generating link pair")->capture_default_str();
}

sim::SimConfig sim_config(const SimArgs& a) {
  sim::SimConfig c;
  c.scenario = a.scenario;
  c.n = a.n;
  c.p = a.p;
  c.seed = a.seed;
  std::tie(c.link1, c.link2) = parse_margins(a.margins);
  return c;
}

std::string sidecar_path(const std::string& csv) { return csv + ".truth.json"; }

Json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// Rebuilds the parts of a BRBVS result needed for plotting from its artifact.
BrbvsResult brbvs_from_json(const Json& j) {
  const Json& r = j.contains("result") ? j.at("result") : j;
  BrbvsResult out;
  out.metric = metric_from_code(r.at("metric").get<std::string>());
  for (int which = 1; which <= 2; ++which) {
    auto& m = which == 1 ? out.margin1 : out.margin2;
    for (const auto& f : r.at(which == 1 ? "margin1" : "margin2").at("frequencies")) {
      const auto name = f.at("covariate").get<std::string>();
      auto it = std::find(out.names.begin(), out.names.end(), name);
      const std::size_t idx = static_cast<std::size_t>(it - out.names.begin());
      if (it == out.names.end()) out.names.push_back(name);
      m.frequencies.emplace_back(idx, f.at("frequency").get<double>());
      m.selected.push_back(idx);
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  // `brbvs --kmax 5 ...` is shorthand for the brbvs subcommand.
  std::vector<std::string> args(argv, argv + argc);
  if (args.size() > 1 && args[1].rfind("--", 0) == 0 && args[1] != "--help" && args[1] != "--version")
    args.insert(args.begin() + 1, "brbvs");
  std::vector<char*> av;
  for (auto& s : args) av.push_back(s.data());

  CLI::App app{"Copula survival models and bivariate ranking-based variable selection"};
  app.set_version_flag("--version", "brbvs 1.0");
  app.require_subcommand(1);

  Common common;
  SelectArgs sel;
  SimArgs sim_args;
  std::string sim_out, truth_out, criterion = "AIC", eta1 = "all", eta2 = "all", eta3 = "none",
              covariates = "all", plot_in, plot_out, truth_in;
  std::size_t reps = 10;
  std::string command;

  auto* c_sim = app.add_subcommand("simulate", "generate a bivariate censored dataset");
  add_sim(c_sim, sim_args);
  c_sim->add_option("--seed", sim_args.seed, "master seed")->capture_default_str();
  c_sim->add_option("--out", sim_out, "CSV output")->required();
  c_sim->add_option("--truth", truth_out, "hidden-truth sidecar (default: <out>.truth.json)");
  c_sim->add_option("--json", common.json_out, "write the JSON summary here");
  c_sim->add_flag("--json-stdout", common.json_stdout, "print JSON instead of the text summary");

  auto* c_fit = app.add_subcommand("fit", "fit one copula survival model");
  add_common(c_fit, common, true);
  c_fit->add_option("--copula", sel.copula, "copula family code")->capture_default_str();
  c_fit->add_option("--margins", sel.margins, "link pair")->capture_default_str();
  c_fit->add_option("--eta1", eta1, "covariates of margin 1 (comma list, all, none)")->capture_default_str();
  c_fit->add_option("--eta2", eta2, "covariates of margin 2")->capture_default_str();
  c_fit->add_option("--eta3", eta3, "covariates of the dependence predictor")->capture_default_str();

  auto* c_brbvs = app.add_subcommand("brbvs", "ranking-based variable selection");
  add_common(c_brbvs, common, true);
  add_select(c_brbvs, sel);
  c_brbvs->add_option("--plot", plot_out, "also write the SVG frequency plot");

  auto* c_link = app.add_subcommand("select-link", "choose each margin's link by AIC or BIC");
  add_common(c_link, common, true);
  c_link->add_option("--criterion", criterion, "AIC or BIC")->capture_default_str();
  c_link->add_option("--eta1", eta1, "covariates of margin 1")->capture_default_str();
  c_link->add_option("--eta2", eta2, "covariates of margin 2")->capture_default_str();

  CLI::App* c_step[2];
  const char* step_names[2] = {"forward", "backward"};
  for (int k = 0; k < 2; ++k) {
    c_step[k] = app.add_subcommand(step_names[k], std::string(step_names[k]) + " stepwise selection");
    add_common(c_step[k], common, true);
    c_step[k]->add_option("--copula", sel.copula, "copula family code")->capture_default_str();
    c_step[k]->add_option("--margins", sel.margins, "link pair")->capture_default_str();
    c_step[k]->add_option("--criterion", criterion, "AIC or BIC")->capture_default_str();
    c_step[k]->add_option("--covariates", covariates, "candidate covariates")->capture_default_str();
  }

  auto* c_eval = app.add_subcommand(
      "evaluate", "score BRBVS against the generating truth (one dataset, or Monte Carlo)");
  add_common(c_eval, common, false);
  add_select(c_eval, sel);
  add_sim(c_eval, sim_args);
  c_eval->add_option("--truth", truth_in, "truth sidecar (default: <data>.truth.json)");
  c_eval->add_option("--reps", reps, "Monte Carlo replicates when no --data is given")
      ->capture_default_str();

  auto* c_plot = app.add_subcommand("plot", "SVG of the selection frequencies");
  c_plot->add_option("--input", plot_in, "BRBVS JSON artifact")->required()->check(CLI::ExistingFile);
  c_plot->add_option("--out", plot_out, "SVG output")->required();

  try {
    app.parse(static_cast<int>(av.size()), av.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  command = app.get_subcommands().front()->get_name();

  try {
    if (command == "simulate") {
      const auto cfg = sim_config(sim_args);
      const auto r = sim::generate(cfg);
      write_csv(sim_out, r.data);
      const std::string tp = truth_out.empty() ? sidecar_path(sim_out) : truth_out;
      write_text(tp, report::sidecar_json(r, cfg).dump(2) + "\n");
      Json res{{"csv", sim_out},
               {"truth", tp},
               {"censoring_rate", {r.cens_rate1, r.cens_rate2}},
               {"s1", r.s1},
               {"s2", r.s2}};
      char buf[128];
      std::snprintf(buf, sizeof buf, "right-censored: %.1f%% (margin 1), %.1f%% (margin 2)\n",
                    100 * r.cens_rate1, 100 * r.cens_rate2);
      emit(common, report::envelope(command, report::to_json(cfg), res),
           "wrote " + sim_out + " (" + std::to_string(cfg.n) + " units, " +
               std::to_string(cfg.p) + " covariates)\n" + buf);
      return 0;
    }
    if (command == "plot") {
      emit_plot(brbvs_from_json(read_json(plot_in)), plot_out);
      std::cout << "wrote " << plot_out << "\n";
      return 0;
    }

    Dataset d;
    if (!common.data.empty()) d = parse_dataset(common.data, common.schema);

    if (command == "fit") {
      ModelSpec spec;
      spec.copula = copula::family_from_code(sel.copula);
      std::tie(spec.link1, spec.link2) = parse_margins(sel.margins);
      spec.eta1 = covariate_list(eta1, d);
      spec.eta2 = covariate_list(eta2, d);
      spec.eta3 = covariate_list(eta3, d);
      spec.interior_knots = common.knots;
      spec.ridge = common.ridge;
      FitOptions fo;
      fo.optim = optim_of(common);
      const auto s = summarize(fit_model(spec, d, fo));
      Json cfg{{"copula", sel.copula},
               {"margins", margins_code(spec.link1, spec.link2)},
               {"eta1", spec.eta1},
               {"eta2", spec.eta2},
               {"eta3", spec.eta3},
               {"input", common_json(common)}};
      emit(common, report::envelope(command, cfg, report::to_json(s)), report::summary_text(s));
      return 0;
    }
    if (command == "brbvs") {
      const auto cfg = brbvs_config(sel, common);
      const auto r = run_brbvs(d, cfg);
      if (!plot_out.empty()) emit_plot(r, plot_out);
      emit(common, report::envelope(command, brbvs_config_json(cfg, common), report::to_json(r)),
           report::brbvs_text(r, cfg));
      return 0;
    }
    if (command == "select-link") {
      const auto measure = criterion_from_code(criterion);
      StepOptions so{common.knots, common.ridge, optim_of(common)};
      const auto s = select_link(d, measure, covariate_list(eta1, d), covariate_list(eta2, d), so);
      Json cfg{{"criterion", code(measure)}, {"eta1", eta1}, {"eta2", eta2}, {"input", common_json(common)}};
      emit(common, report::envelope(command, cfg, report::to_json(s, measure)),
           report::link_text(s, measure));
      return 0;
    }
    if (command == "forward" || command == "backward") {
      const auto measure = criterion_from_code(criterion);
      const auto fam = copula::family_from_code(sel.copula);
      const auto [l1, l2] = parse_margins(sel.margins);
      StepOptions so{common.knots, common.ridge, optim_of(common)};
      const auto cov = covariate_list(covariates, d);
      const auto t = command == "forward" ? forward(d, fam, l1, l2, measure, so, cov)
                                          : backward(d, fam, l1, l2, measure, so, cov);
      Json cfg{{"copula", sel.copula},
               {"margins", margins_code(l1, l2)},
               {"criterion", code(measure)},
               {"covariates", cov},
               {"input", common_json(common)}};
      emit(common, report::envelope(command, cfg, report::to_json(t)), report::trace_text(t));
      return 0;
    }
    if (command == "evaluate") {
      const auto bcfg = brbvs_config(sel, common);
      if (!common.data.empty()) {
        const Json truth = read_json(truth_in.empty() ? sidecar_path(common.data) : truth_in);
        const auto s1 = truth.at("truth").at("s1").get<std::vector<std::string>>();
        const auto s2 = truth.at("truth").at("s2").get<std::vector<std::string>>();
        const auto r = run_brbvs(d, bcfg);
        const auto ev = sim::evaluate({{r.selected_names(1), r.selected_names(2)}}, s1, s2);
        Json res{{"truth", {{"s1", s1}, {"s2", s2}}},
                 {"selected", {{"s1", r.selected_names(1)}, {"s2", r.selected_names(2)}}},
                 {"evaluation", report::to_json(ev)}};
        emit(common, report::envelope(command, brbvs_config_json(bcfg, common), res),
             report::eval_text(ev));
        return 0;
      }
      MonteCarloConfig mc;
      mc.sim = sim_config(sim_args);
      mc.brbvs = bcfg;
      mc.reps = reps;
      mc.seed = sel.seed;
      mc.metrics = {bcfg.metric};
      const auto r = monte_carlo(mc);
      const auto& ev = r.reports.at(bcfg.metric);
      Json outcomes = Json::array();
      for (const auto& o : r.outcomes.at(bcfg.metric)) outcomes.push_back({{"s1", o.s1}, {"s2", o.s2}});
      Json cfg = brbvs_config_json(bcfg, common);
      cfg["simulation"] = report::to_json(mc.sim);
      cfg["reps"] = reps;
      Json res{{"truth", {{"s1", r.s1}, {"s2", r.s2}}},
               {"outcomes", outcomes},
               {"evaluation", report::to_json(ev)},
               {"subsample_fits", r.fits},
               {"failed_fits", r.failed_fits}};
      emit(common, report::envelope(command, cfg, res), report::eval_text(ev));
      return 0;
    }
  } catch (const std::exception& e) {
    const char* kind = dynamic_cast<const ParseError*>(&e)    ? "parse"
                       : dynamic_cast<const DomainError*>(&e) ? "domain"
                       : dynamic_cast<const NumericError*>(&e) ? "numeric"
                                                               : "internal";
    std::cerr << "brbvs " << command << ": " << kind << " error: " << e.what() << "\n";
    if (!common.json_out.empty()) {
      try {
        write_text(common.json_out,
                   Json{{"schema_version", report::kSchemaVersion},
                        {"command", command},
                        {"error", {{"kind", kind}, {"message", e.what()}}}}
                           .dump(2) + "\n");
      } catch (...) {
      }
    }
    return kind[0] == 'd' || kind[0] == 'p' ? 2 : 1;
  }
  return 0;
}
